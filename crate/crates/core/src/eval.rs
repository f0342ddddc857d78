//! Set-at-a-time evaluation over bitsets.
//!
//! A formula is compiled against its own signature (the atoms it can read and
//! the agents whose beliefs it inspects). Models are then lowered to that
//! signature, so the explorer can build them directly without going through
//! [`Model`].

use smallvec::{smallvec, SmallVec};

use crate::formula::{AgentId, Atom, Formula};
use crate::kripke::Model;

/// A set of worlds `0..n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct Set(SmallVec<[u64; 2]>);

impl Set {
    pub fn empty(n: usize) -> Self {
        Set(smallvec![0; n.div_ceil(64).max(1)])
    }

    pub fn full(n: usize) -> Self {
        let mut s = Set::empty(n);
        for w in 0..n {
            s.insert(w);
        }
        s
    }

    #[inline]
    pub fn get(&self, w: usize) -> bool {
        self.0[w / 64] >> (w % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, w: usize) {
        self.0[w / 64] |= 1 << (w % 64);
    }

    #[inline]
    pub fn is_subset(&self, other: &Set) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn and_with(&mut self, other: &Set) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }

    fn complement(&mut self, n: usize) {
        for (i, word) in self.0.iter_mut().enumerate() {
            let live = n.saturating_sub(i * 64).min(64);
            let mask = if live == 64 { u64::MAX } else { (1u64 << live) - 1 };
            *word = !*word & mask;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i * 64 + tz)
            })
        })
    }
}

enum Node {
    True,
    Atom(usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Bel(usize, Box<Node>),
    Dyn(usize, Box<Node>),
}

struct Event {
    pre: Node,
    /// Assigned value per signature atom, if any.
    post: Vec<Option<bool>>,
    /// Successor events per signature agent.
    succ: Vec<Vec<usize>>,
}

struct CompiledAction {
    events: Vec<Event>,
    point: usize,
}

/// A formula lowered to indices into its signature.
pub(crate) struct Compiled {
    pub atoms: Vec<Atom>,
    pub agents: Vec<AgentId>,
    root: Node,
    actions: Vec<CompiledAction>,
}

/// A model restricted to a compiled signature.
pub(crate) struct Frame {
    pub n: usize,
    /// Extension of each signature atom.
    pub val: Vec<Set>,
    /// Per signature agent, the successor set of each world.
    pub succ: Vec<Vec<Set>>,
}

impl Compiled {
    pub fn new(f: &Formula) -> Self {
        let atoms: Vec<Atom> = f.atoms_read().into_iter().collect();
        let agents: Vec<AgentId> = f.believers().into_iter().collect();
        let mut c = Compiled { atoms, agents, root: Node::True, actions: Vec::new() };
        c.root = c.lower(f);
        c
    }

    fn lower(&mut self, f: &Formula) -> Node {
        match f {
            Formula::True => Node::True,
            Formula::Prop(p) => Node::Atom(self.atom_index(&Atom::Prop(p.clone()))),
            Formula::Obs(o) => Node::Atom(self.atom_index(&Atom::Obs(o.clone()))),
            Formula::Not(g) => Node::Not(Box::new(self.lower(g))),
            Formula::And(l, r) => Node::And(Box::new(self.lower(l)), Box::new(self.lower(r))),
            Formula::Believes(a, g) => {
                let i = self.agents.binary_search(a).expect("believer in signature");
                Node::Bel(i, Box::new(self.lower(g)))
            }
            Formula::Dyn(act, g) => {
                let pa = act.pointed();
                let model = &pa.action;
                let events = (0..model.len())
                    .map(|e| {
                        let pre = self.lower(model.pre(e));
                        let post = self.atoms.iter().map(|atom| model.post(e).get(atom)).collect();
                        let succ = self
                            .agents
                            .iter()
                            .map(|a| match model.relation(a) {
                                Some(r) => r.successors(e).to_vec(),
                                None => Vec::new(),
                            })
                            .collect();
                        Event { pre, post, succ }
                    })
                    .collect();
                self.actions.push(CompiledAction { events, point: pa.point });
                let index = self.actions.len() - 1;
                Node::Dyn(index, Box::new(self.lower(g)))
            }
        }
    }

    fn atom_index(&self, atom: &Atom) -> usize {
        self.atoms.binary_search(atom).expect("atom in signature")
    }

    /// Lowers `model` to this signature. Agents the model lacks have no
    /// successors.
    pub fn frame_of(&self, model: &Model) -> Frame {
        let n = model.len();
        let val = self
            .atoms
            .iter()
            .map(|atom| {
                let mut s = Set::empty(n);
                for w in 0..n {
                    if model.holds_atom(w, atom) {
                        s.insert(w);
                    }
                }
                s
            })
            .collect();
        let succ = self
            .agents
            .iter()
            .map(|a| {
                (0..n)
                    .map(|w| {
                        let mut s = Set::empty(n);
                        if let Some(r) = model.relation(a) {
                            for &v in r.successors(w) {
                                s.insert(v);
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        Frame { n, val, succ }
    }

    pub fn eval(&self, frame: &Frame) -> Set {
        self.eval_node(&self.root, frame)
    }

    fn eval_node(&self, node: &Node, m: &Frame) -> Set {
        match node {
            Node::True => Set::full(m.n),
            Node::Atom(i) => m.val[*i].clone(),
            Node::Not(g) => {
                let mut s = self.eval_node(g, m);
                s.complement(m.n);
                s
            }
            Node::And(l, r) => {
                let mut s = self.eval_node(l, m);
                if s.0.iter().any(|&w| w != 0) {
                    s.and_with(&self.eval_node(r, m));
                }
                s
            }
            Node::Bel(a, g) => {
                let inner = self.eval_node(g, m);
                let mut s = Set::empty(m.n);
                for (w, succ) in m.succ[*a].iter().enumerate() {
                    if succ.is_subset(&inner) {
                        s.insert(w);
                    }
                }
                s
            }
            Node::Dyn(i, g) => self.eval_dyn(&self.actions[*i], g, m),
        }
    }

    fn eval_dyn(&self, act: &CompiledAction, body: &Node, m: &Frame) -> Set {
        let pre: Vec<Set> = act.events.iter().map(|e| self.eval_node(&e.pre, m)).collect();
        let mut result = pre[act.point].clone();
        result.complement(m.n);
        if pre[act.point].0.iter().all(|&w| w == 0) {
            return result;
        }

        let ne = act.events.len();
        let mut index = vec![usize::MAX; m.n * ne];
        let mut pairs = Vec::new();
        for w in 0..m.n {
            for (e, ext) in pre.iter().enumerate() {
                if ext.get(w) {
                    index[w * ne + e] = pairs.len();
                    pairs.push((w, e));
                }
            }
        }
        let n = pairs.len();
        let val = (0..self.atoms.len())
            .map(|k| {
                let mut s = Set::empty(n);
                for (i, &(w, e)) in pairs.iter().enumerate() {
                    if act.events[e].post[k].unwrap_or_else(|| m.val[k].get(w)) {
                        s.insert(i);
                    }
                }
                s
            })
            .collect();
        let succ = (0..self.agents.len())
            .map(|a| {
                pairs
                    .iter()
                    .map(|&(w, e)| {
                        let mut s = Set::empty(n);
                        for v in m.succ[a][w].iter() {
                            for &f in &act.events[e].succ[a] {
                                let j = index[v * ne + f];
                                if j != usize::MAX {
                                    s.insert(j);
                                }
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let after = self.eval_node(body, &Frame { n, val, succ });
        for w in pre[act.point].iter() {
            if after.get(index[w * ne + act.point]) {
                result.insert(w);
            }
        }
        result
    }
}

/// Membership vector of the worlds of `model` satisfying `f`.
pub(crate) fn extension(model: &Model, f: &Formula) -> Vec<bool> {
    if model.is_empty() {
        return Vec::new();
    }
    let compiled = Compiled::new(f);
    let ext = compiled.eval(&compiled.frame_of(model));
    (0..model.len()).map(|w| ext.get(w)).collect()
}
