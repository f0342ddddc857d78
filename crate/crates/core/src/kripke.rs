//! Relational models, observational validation and the satisfaction relation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::eval;
use crate::formula::{AgentId, Atom, Formula, PropId};
use crate::update;

pub type WorldId = String;

/// A binary relation over `0..n`, stored as sorted successor lists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    succ: Vec<Vec<usize>>,
}

impl Relation {
    pub fn new(n: usize) -> Self {
        Relation { succ: vec![Vec::new(); n] }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Relation::new(n);
        for (x, y) in pairs {
            r.insert(x, y);
        }
        r
    }

    /// Number of points the relation is defined over.
    pub fn domain(&self) -> usize {
        self.succ.len()
    }

    pub fn insert(&mut self, from: usize, to: usize) {
        let list = &mut self.succ[from];
        if let Err(at) = list.binary_search(&to) {
            list.insert(at, to);
        }
    }

    pub fn contains(&self, from: usize, to: usize) -> bool {
        self.succ[from].binary_search(&to).is_ok()
    }

    pub fn successors(&self, from: usize) -> &[usize] {
        &self.succ[from]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(x, ys)| ys.iter().map(move |&y| (x, y)))
    }

    pub fn is_serial(&self) -> bool {
        self.succ.iter().all(|ys| !ys.is_empty())
    }

    pub fn is_transitive(&self) -> bool {
        self.pairs().all(|(x, y)| self.succ[y].iter().all(|&z| self.contains(x, z)))
    }

    pub fn is_euclidean(&self) -> bool {
        self.succ.iter().all(|ys| ys.iter().all(|&y| ys.iter().all(|&z| self.contains(y, z))))
    }

    pub fn flags(&self) -> FrameFlags {
        FrameFlags {
            euclidean: self.is_euclidean(),
            transitive: self.is_transitive(),
            serial: self.is_serial(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FrameFlags {
    pub euclidean: bool,
    pub transitive: bool,
    pub serial: bool,
}

impl FrameFlags {
    pub fn all(&self) -> bool {
        self.euclidean && self.transitive && self.serial
    }
}

/// Frame properties per agent plus the model-level checks.
#[derive(Clone, PartialEq, Debug)]
pub struct FrameReport {
    pub frames: BTreeMap<AgentId, FrameFlags>,
    pub obs_consistent: bool,
    pub non_empty: bool,
    /// Whether the model passes in the strictness it was validated under.
    pub valid: bool,
}

impl FrameReport {
    pub fn all_euclidean(&self) -> bool {
        self.frames.values().all(|f| f.euclidean)
    }

    pub fn all_transitive(&self) -> bool {
        self.frames.values().all(|f| f.transitive)
    }

    pub fn all_serial(&self) -> bool {
        self.frames.values().all(|f| f.serial)
    }
}

/// `Observational` demands every frame condition; `Relational` only gates on
/// observation consistency, since updates may destroy seriality.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strictness {
    Observational,
    Relational,
}

/// Worlds, one relation per agent, and the set of atoms true at each world.
#[derive(Clone, PartialEq, Debug)]
pub struct Model {
    agents: Vec<AgentId>,
    props: Vec<PropId>,
    worlds: Vec<WorldId>,
    relations: Vec<Relation>,
    valuation: Vec<BTreeSet<Atom>>,
}

impl Model {
    pub fn builder() -> ModelBuilder {
        ModelBuilder::default()
    }

    /// Assembles a model from parts already known to be consistent.
    pub(crate) fn from_parts(
        agents: Vec<AgentId>,
        props: Vec<PropId>,
        worlds: Vec<WorldId>,
        relations: Vec<Relation>,
        valuation: Vec<BTreeSet<Atom>>,
    ) -> Self {
        debug_assert_eq!(agents.len(), relations.len());
        debug_assert_eq!(worlds.len(), valuation.len());
        Model { agents, props, worlds, relations, valuation }
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn props(&self) -> &[PropId] {
        &self.props
    }

    pub fn worlds(&self) -> &[WorldId] {
        &self.worlds
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn relation(&self, agent: &AgentId) -> Option<&Relation> {
        self.agents.iter().position(|a| a == agent).map(|i| &self.relations[i])
    }

    pub fn relations(&self) -> impl Iterator<Item = (&AgentId, &Relation)> {
        self.agents.iter().zip(&self.relations)
    }

    pub fn valuation(&self, world: usize) -> &BTreeSet<Atom> {
        &self.valuation[world]
    }

    pub fn holds_atom(&self, world: usize, atom: &Atom) -> bool {
        self.valuation[world].contains(atom)
    }

    pub fn point(self, name: &str) -> Result<PointedModel> {
        let point =
            self.world_index(name).ok_or_else(|| Error::Structure(format!("unknown world `{name}`")))?;
        Ok(PointedModel { model: self, point })
    }

    pub fn at(self, point: usize) -> PointedModel {
        assert!(point < self.len(), "world index out of range");
        PointedModel { model: self, point }
    }

    pub fn is_obs_consistent(&self) -> bool {
        self.valuation.iter().all(|atoms| {
            atoms.iter().all(|atom| match atom {
                Atom::Obs(o) if o.literal.positive => !atoms.contains(&Atom::Obs(o.counterpart())),
                _ => true,
            })
        })
    }

    /// The submodel on the given worlds, in the given order.
    pub fn restrict(&self, keep: &[usize]) -> Model {
        let mut index = vec![None; self.len()];
        for (new, &old) in keep.iter().enumerate() {
            index[old] = Some(new);
        }
        let relations = self
            .relations
            .iter()
            .map(|r| {
                Relation::from_pairs(keep.len(), r.pairs().filter_map(|(x, y)| Some((index[x]?, index[y]?))))
            })
            .collect();
        Model {
            agents: self.agents.clone(),
            props: self.props.clone(),
            worlds: keep.iter().map(|&w| self.worlds[w].clone()).collect(),
            relations,
            valuation: keep.iter().map(|&w| self.valuation[w].clone()).collect(),
        }
    }

    /// Worlds reachable from `from` through any agent's relation, `from` first.
    pub fn reachable(&self, from: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = vec![from];
        seen[from] = true;
        let mut next = 0;
        while next < order.len() {
            let w = order[next];
            next += 1;
            for r in &self.relations {
                for &v in r.successors(w) {
                    if !seen[v] {
                        seen[v] = true;
                        order.push(v);
                    }
                }
            }
        }
        order
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct PointedModel {
    pub model: Model,
    pub point: usize,
}

impl PointedModel {
    pub fn point_name(&self) -> &str {
        &self.model.worlds[self.point]
    }

    /// The submodel generated by the point.
    pub fn generated(&self) -> PointedModel {
        let keep = self.model.reachable(self.point);
        PointedModel { model: self.model.restrict(&keep), point: 0 }
    }
}

/// Incremental construction with structural checks on `build`.
#[derive(Default)]
pub struct ModelBuilder {
    agents: Vec<AgentId>,
    props: Vec<PropId>,
    worlds: Vec<WorldId>,
    valuation: Vec<BTreeSet<Atom>>,
    edges: Vec<(AgentId, String, String)>,
    error: Option<Error>,
}

impl ModelBuilder {
    pub fn agent(mut self, agent: impl Into<AgentId>) -> Self {
        self.add_agent(agent.into());
        self
    }

    pub fn prop(mut self, prop: impl Into<PropId>) -> Self {
        self.add_prop(prop.into());
        self
    }

    fn add_agent(&mut self, agent: AgentId) {
        if !self.agents.contains(&agent) {
            self.agents.push(agent);
        }
    }

    fn add_prop(&mut self, prop: PropId) {
        if !self.props.contains(&prop) {
            self.props.push(prop);
        }
    }

    /// Adds a world whose true atoms are written as in model documents
    /// (`p`, `obs(a,p)`, `obs(a,~p)`).
    pub fn world<S: AsRef<str>>(mut self, name: &str, atoms: impl IntoIterator<Item = S>) -> Self {
        let mut set = BTreeSet::new();
        for text in atoms {
            match text.as_ref().parse::<Atom>() {
                Ok(atom) => {
                    set.insert(atom);
                }
                Err(e) => {
                    self.error.get_or_insert(e);
                }
            }
        }
        self.world_atoms(name, set)
    }

    pub fn world_atoms(mut self, name: &str, atoms: impl IntoIterator<Item = Atom>) -> Self {
        let set: BTreeSet<Atom> = atoms.into_iter().collect();
        for atom in &set {
            self.add_prop(atom.prop().clone());
            if let Atom::Obs(o) = atom {
                self.add_agent(o.agent.clone());
            }
        }
        if self.worlds.iter().any(|w| w == name) {
            self.error.get_or_insert(Error::Structure(format!("duplicate world `{name}`")));
        }
        self.worlds.push(name.to_owned());
        self.valuation.push(set);
        self
    }

    pub fn edge(mut self, agent: impl Into<AgentId>, from: &str, to: &str) -> Self {
        let agent = agent.into();
        self.add_agent(agent.clone());
        self.edges.push((agent, from.to_owned(), to.to_owned()));
        self
    }

    /// Adds every pair over the listed worlds for `agent`.
    pub fn complete(mut self, agent: impl Into<AgentId>, worlds: &[&str]) -> Self {
        let agent = agent.into();
        for from in worlds {
            for to in worlds {
                self = self.edge(agent.clone(), from, to);
            }
        }
        self
    }

    pub fn build(self) -> Result<Model> {
        if let Some(e) = self.error {
            return Err(e);
        }
        if self.worlds.is_empty() {
            return Err(Error::Structure("a model needs at least one world".into()));
        }
        let n = self.worlds.len();
        let index = |name: &str| {
            self.worlds
                .iter()
                .position(|w| w == name)
                .ok_or_else(|| Error::Structure(format!("unknown world `{name}`")))
        };
        let mut relations = vec![Relation::new(n); self.agents.len()];
        for (agent, from, to) in &self.edges {
            let slot = self.agents.iter().position(|a| a == agent).expect("registered");
            relations[slot].insert(index(from)?, index(to)?);
        }
        Ok(Model {
            agents: self.agents,
            props: self.props,
            worlds: self.worlds,
            relations,
            valuation: self.valuation,
        })
    }
}

/// Frame flags of every agent and the observation-consistency check.
pub fn validate(model: &Model, strictness: Strictness) -> Result<FrameReport> {
    let frames: BTreeMap<AgentId, FrameFlags> =
        model.relations().map(|(a, r)| (a.clone(), r.flags())).collect();
    let obs_consistent = model.is_obs_consistent();
    let non_empty = !model.is_empty();
    let structural = obs_consistent && non_empty;
    let valid = match strictness {
        Strictness::Observational => structural && frames.values().all(FrameFlags::all),
        Strictness::Relational => structural,
    };
    Ok(FrameReport { frames, obs_consistent, non_empty, valid })
}

pub fn satisfies(pm: &PointedModel, f: &Formula) -> bool {
    eval::extension(&pm.model, f)[pm.point]
}

/// Worlds at which `f` holds, as a membership vector.
pub fn extension(model: &Model, f: &Formula) -> Vec<bool> {
    eval::extension(model, f)
}

pub fn holds_everywhere(model: &Model, f: &Formula) -> bool {
    extension(model, f).into_iter().all(|b| b)
}

/// One evaluated subformula occurrence.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub depth: usize,
    /// Index into [`Trace::models`] of the model the world belongs to.
    pub model: usize,
    pub world: WorldId,
    pub formula: String,
    pub value: bool,
}

/// Result of pointwise evaluation with every intermediate step recorded.
#[derive(Clone, Debug)]
pub struct Trace {
    pub value: bool,
    pub steps: Vec<TraceStep>,
    /// The input model first, then every product built along the way, each
    /// labelled by the action chain that produced it.
    pub models: Vec<(String, Model)>,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (label, m)) in self.models.iter().enumerate() {
            writeln!(f, "model #{i} {label}: {} worlds", m.len())?;
        }
        for step in &self.steps {
            writeln!(
                f,
                "{:indent$}#{} {} |= {} : {}",
                "",
                step.model,
                step.world,
                step.formula,
                step.value,
                indent = 2 * step.depth
            )?;
        }
        write!(f, "result: {}", self.value)
    }
}

/// Evaluates clause by clause at single worlds, building each product model
/// explicitly. Independent of the set-based evaluator behind [`satisfies`].
pub fn trace(pm: &PointedModel, f: &Formula) -> Trace {
    let mut tracer = Pointwise { record: true, steps: Vec::new(), models: Vec::new() };
    tracer.models.push(("M".into(), pm.model.clone()));
    let value = tracer.holds(0, pm.point, f, 0);
    Trace { value, steps: tracer.steps, models: tracer.models }
}

/// Pointwise evaluation without recording.
pub fn evaluate_pointwise(pm: &PointedModel, f: &Formula) -> bool {
    let mut tracer = Pointwise { record: false, steps: Vec::new(), models: Vec::new() };
    tracer.models.push(("M".into(), pm.model.clone()));
    tracer.holds(0, pm.point, f, 0)
}

struct Pointwise {
    record: bool,
    steps: Vec<TraceStep>,
    models: Vec<(String, Model)>,
}

impl Pointwise {
    fn holds(&mut self, m: usize, w: usize, f: &Formula, depth: usize) -> bool {
        let slot = self.record.then(|| {
            self.steps.push(TraceStep {
                depth,
                model: m,
                world: self.models[m].1.worlds()[w].clone(),
                formula: f.to_string(),
                value: false,
            });
            self.steps.len() - 1
        });
        let value = match f {
            Formula::True => true,
            Formula::Prop(p) => self.models[m].1.holds_atom(w, &Atom::Prop(p.clone())),
            Formula::Obs(o) => self.models[m].1.holds_atom(w, &Atom::Obs(o.clone())),
            Formula::Not(g) => !self.holds(m, w, g, depth + 1),
            Formula::And(l, r) => self.holds(m, w, l, depth + 1) && self.holds(m, w, r, depth + 1),
            Formula::Believes(a, g) => {
                let succ: Vec<usize> = match self.models[m].1.relation(a) {
                    Some(r) => r.successors(w).to_vec(),
                    None => Vec::new(),
                };
                succ.into_iter().all(|v| self.holds(m, v, g, depth + 1))
            }
            Formula::Dyn(act, g) => {
                let pa = act.pointed();
                if !self.holds(m, w, pa.precondition(), depth + 1) {
                    true
                } else {
                    let product = self.product(m, &act.to_string(), &pa.action, depth + 1);
                    let name = format!("({},{})", self.models[m].1.worlds()[w], pa.point_name());
                    let at = self.models[product].1.world_index(&name).expect("executable");
                    self.holds(product, at, g, depth + 1)
                }
            }
        };
        if let Some(i) = slot {
            self.steps[i].value = value;
        }
        value
    }

    fn product(&mut self, m: usize, label: &str, action: &crate::action::ActionModel, depth: usize) -> usize {
        let n = self.models[m].1.len();
        let pre: Vec<Vec<bool>> = (0..action.len())
            .map(|e| (0..n).map(|w| self.holds(m, w, action.pre(e), depth)).collect())
            .collect();
        let product = update::assemble(&self.models[m].1, action, &pre);
        let label = format!("{} x {label}", self.models[m].0);
        self.models.push((label, product));
        self.models.len() - 1
    }
}
