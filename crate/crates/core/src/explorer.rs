//! Bounded enumeration of pointed models for validity and satisfiability.
//!
//! Models with `1..=max_worlds` worlds named `w1..wn` are listed in a fixed
//! order: world count, then one relation per agent (earlier agents vary
//! slowest), then one valuation per world (earlier worlds vary slowest), then
//! the point. Valuations never let an agent observe a literal and its
//! negation, whatever the frame class.
//!
//! A query only enumerates the atoms and agents its formula can inspect; the
//! rest stay at the first choice of the full order (atoms false, first
//! relation of the class). Because evaluation cannot tell those choices
//! apart, the first hit of the reduced search is the first hit of the full
//! search.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::action::ActionModel;
use crate::error::{Error, Result};
use crate::eval::{Compiled, Frame, Set};
use crate::formula::{AgentId, Atom, Formula, Literal, ObsAtom, PropId};
use crate::kripke::{FrameReport, Model, PointedModel, Relation, Strictness};
use crate::update;

/// Candidate count allowed when neither the bounds nor `DLM_BUDGET` set one.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Largest world count accepted; relation lists are built by scanning all
/// `2^(n*n)` relations.
pub const MAX_WORLDS: usize = 5;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum FrameClass {
    /// Serial, transitive and Euclidean.
    Observational,
    EuclideanTransitive,
    All,
}

impl FrameClass {
    fn admits(self, r: &Relation) -> bool {
        match self {
            FrameClass::Observational => r.flags().all(),
            FrameClass::EuclideanTransitive => r.is_euclidean() && r.is_transitive(),
            FrameClass::All => true,
        }
    }

    pub fn strictness(self) -> Strictness {
        match self {
            FrameClass::Observational => Strictness::Observational,
            _ => Strictness::Relational,
        }
    }
}

impl FromStr for FrameClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "observational" => Ok(FrameClass::Observational),
            "euclidean_transitive" | "euclidean-transitive" => Ok(FrameClass::EuclideanTransitive),
            "all" => Ok(FrameClass::All),
            other => Err(Error::Bounds(format!("unknown frame class `{other}`"))),
        }
    }
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameClass::Observational => "observational",
            FrameClass::EuclideanTransitive => "euclidean_transitive",
            FrameClass::All => "all",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Bounds {
    pub max_worlds: usize,
    pub agents: Vec<AgentId>,
    pub props: Vec<PropId>,
    pub frame_class: FrameClass,
    /// Overrides `DLM_BUDGET` and [`DEFAULT_BUDGET`].
    pub budget: Option<u128>,
}

impl Bounds {
    pub fn new<A, P>(
        max_worlds: usize,
        agents: impl IntoIterator<Item = A>,
        props: impl IntoIterator<Item = P>,
        frame_class: FrameClass,
    ) -> Self
    where
        A: Into<AgentId>,
        P: Into<PropId>,
    {
        Bounds {
            max_worlds,
            agents: agents.into_iter().map(Into::into).collect(),
            props: props.into_iter().map(Into::into).collect(),
            frame_class,
            budget: None,
        }
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn budget(&self) -> u128 {
        self.budget
            .or_else(|| std::env::var("DLM_BUDGET").ok()?.trim().parse().ok())
            .unwrap_or(DEFAULT_BUDGET)
    }

    fn check(&self) -> Result<()> {
        if self.max_worlds == 0 || self.max_worlds > MAX_WORLDS {
            return Err(Error::Bounds(format!("max_worlds must be in 1..={MAX_WORLDS}")));
        }
        let distinct = |names: Vec<&str>| names.iter().collect::<BTreeSet<_>>().len() == names.len();
        if !distinct(self.agents.iter().map(AgentId::as_str).collect())
            || !distinct(self.props.iter().map(PropId::as_str).collect())
        {
            return Err(Error::Bounds("duplicate agent or proposition".into()));
        }
        Ok(())
    }

    /// Atoms of the full signature in enumeration order: each proposition,
    /// then every agent's positive and negative observation of it.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut atoms = Vec::new();
        for p in &self.props {
            atoms.push(Atom::Prop(p.clone()));
            for a in &self.agents {
                atoms.push(Atom::Obs(ObsAtom::new(a.clone(), Literal::pos(p.clone()))));
                atoms.push(Atom::Obs(ObsAtom::new(a.clone(), Literal::neg(p.clone()))));
            }
        }
        atoms
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// No countermodel among `checked` candidate pointed models.
    ValidWithinBounds {
        checked: u128,
    },
    Countermodel(PointedModel),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::ValidWithinBounds { .. })
    }

    pub fn countermodel(&self) -> Option<&PointedModel> {
        match self {
            Verdict::Countermodel(pm) => Some(pm),
            _ => None,
        }
    }
}

/// Relations on `n` points admitted by a class, as `n*n`-bit masks with bit
/// `i*n + j` for the pair `(i, j)`.
fn relation_masks(n: usize, class: FrameClass) -> Arc<Vec<u32>> {
    type Cache = Mutex<HashMap<(usize, FrameClass), Arc<Vec<u32>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(list) = cache.lock().expect("poisoned").get(&(n, class)) {
        return list.clone();
    }
    let list: Arc<Vec<u32>> =
        Arc::new((0u32..1 << (n * n)).filter(|&mask| class.admits(&mask_relation(n, mask))).collect());
    cache.lock().expect("poisoned").insert((n, class), list.clone());
    list
}

fn mask_relation(n: usize, mask: u32) -> Relation {
    Relation::from_pairs(
        n,
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| mask >> (i * n + j) & 1 == 1),
    )
}

/// The part of the signature a query varies.
struct Space {
    bounds: Bounds,
    atoms: Vec<Atom>,
    /// Indices into `bounds.agents`.
    live_agents: Vec<usize>,
    /// Indices into `atoms`.
    live_atoms: Vec<usize>,
    /// Per world count `n`, at index `n - 1`.
    relations: Vec<Arc<Vec<u32>>>,
    /// Admissible per-world valuations over `live_atoms`; bit `i` is
    /// `live_atoms[i]`.
    options: Vec<u32>,
}

impl Space {
    fn new(bounds: &Bounds, atoms_used: &BTreeSet<Atom>, agents_used: &BTreeSet<AgentId>) -> Result<Self> {
        bounds.check()?;
        let atoms = bounds.atoms();
        for atom in atoms_used {
            if !atoms.contains(atom) {
                return Err(Error::Bounds(format!("`{atom}` is outside the bounds' signature")));
            }
        }
        for agent in agents_used {
            if !bounds.agents.contains(agent) {
                return Err(Error::Bounds(format!("agent `{agent}` is outside the bounds")));
            }
        }
        let live_agents: Vec<usize> =
            (0..bounds.agents.len()).filter(|&i| agents_used.contains(&bounds.agents[i])).collect();
        let live_atoms: Vec<usize> = (0..atoms.len()).filter(|&i| atoms_used.contains(&atoms[i])).collect();
        if live_atoms.len() > 24 {
            return Err(Error::Bounds("too many atoms to enumerate".into()));
        }

        let k = live_atoms.len();
        let counterpart: Vec<Option<usize>> = live_atoms
            .iter()
            .map(|&i| match &atoms[i] {
                Atom::Obs(o) => {
                    let other = Atom::Obs(o.counterpart());
                    live_atoms.iter().position(|&j| atoms[j] == other)
                }
                Atom::Prop(_) => None,
            })
            .collect();
        // Earlier atoms are more significant, so count over reversed bits.
        let options = (0u32..1 << k)
            .map(|m| (0..k).fold(0u32, |acc, i| acc | ((m >> (k - 1 - i)) & 1) << i))
            .filter(|&opt| {
                (0..k).all(|i| match counterpart[i] {
                    Some(j) => !(opt >> i & 1 == 1 && opt >> j & 1 == 1),
                    None => true,
                })
            })
            .collect();
        let relations = (1..=bounds.max_worlds).map(|n| relation_masks(n, bounds.frame_class)).collect();
        Ok(Space { bounds: bounds.clone(), atoms, live_agents, live_atoms, relations, options })
    }

    fn frames(&self, n: usize) -> u128 {
        (self.relations[n - 1].len() as u128).pow(self.live_agents.len() as u32)
    }

    fn valuations(&self, n: usize) -> u128 {
        (self.options.len() as u128).pow(n as u32)
    }

    fn size(&self) -> u128 {
        (1..=self.bounds.max_worlds)
            .map(|n| (n as u128).saturating_mul(self.frames(n)).saturating_mul(self.valuations(n)))
            .fold(0u128, u128::saturating_add)
    }

    fn within_budget(&self) -> Result<u128> {
        let required = self.size();
        let budget = self.bounds.budget();
        if required > budget {
            return Err(Error::Budget { required, budget });
        }
        Ok(required)
    }

    /// Relation mask per live agent, decoded from a frame index.
    fn frame(&self, n: usize, mut index: u128) -> Vec<u32> {
        let list = &self.relations[n - 1];
        let mut masks = vec![0; self.live_agents.len()];
        for slot in masks.iter_mut().rev() {
            *slot = list[(index % list.len() as u128) as usize];
            index /= list.len() as u128;
        }
        masks
    }

    /// Option per world, decoded from a valuation index.
    fn valuation(&self, n: usize, mut index: u128) -> Vec<u32> {
        let mut opts = vec![0; n];
        for slot in opts.iter_mut().rev() {
            *slot = self.options[(index % self.options.len() as u128) as usize];
            index /= self.options.len() as u128;
        }
        opts
    }

    fn model(&self, n: usize, frame: &[u32], valuation: &[u32]) -> Model {
        let worlds: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
        let default = self.relations[n - 1][0];
        let relations = (0..self.bounds.agents.len())
            .map(|a| {
                let mask = match self.live_agents.iter().position(|&l| l == a) {
                    Some(slot) => frame[slot],
                    None => default,
                };
                mask_relation(n, mask)
            })
            .collect();
        let valuation = valuation
            .iter()
            .map(|&opt| {
                self.live_atoms
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| opt >> bit & 1 == 1)
                    .map(|(_, &i)| self.atoms[i].clone())
                    .collect()
            })
            .collect();
        Model::from_parts(self.bounds.agents.clone(), self.bounds.props.clone(), worlds, relations, valuation)
    }

    /// First pointed model (in enumeration order) whose point lies inside
    /// (`want = true`) or outside the formula's extension.
    fn search(&self, compiled: &Compiled, want: bool) -> Option<PointedModel> {
        let atom_slot: Vec<usize> = compiled
            .atoms
            .iter()
            .map(|atom| {
                let i = self.atoms.iter().position(|a| a == atom).expect("checked");
                self.live_atoms.iter().position(|&l| l == i).expect("live")
            })
            .collect();
        let agent_slot: Vec<usize> = compiled
            .agents
            .iter()
            .map(|agent| {
                let i = self.bounds.agents.iter().position(|a| a == agent).expect("checked");
                self.live_agents.iter().position(|&l| l == i).expect("live")
            })
            .collect();

        for n in 1..=self.bounds.max_worlds {
            let frames = self.frames(n);
            let valuations = self.valuations(n);
            let hit = (0..frames as u64).into_par_iter().find_map_first(|fi| {
                let masks = self.frame(n, fi as u128);
                let succ: Vec<Vec<Set>> = agent_slot
                    .iter()
                    .map(|&slot| {
                        (0..n)
                            .map(|w| {
                                let mut s = Set::empty(n);
                                for v in 0..n {
                                    if masks[slot] >> (w * n + v) & 1 == 1 {
                                        s.insert(v);
                                    }
                                }
                                s
                            })
                            .collect()
                    })
                    .collect();
                let mut frame = Frame { n, val: vec![Set::empty(n); atom_slot.len()], succ };
                let mut digits = vec![0usize; n];
                for vi in 0..valuations {
                    if vi > 0 {
                        // Odometer step, last world fastest.
                        let mut w = n;
                        loop {
                            w -= 1;
                            digits[w] += 1;
                            if digits[w] < self.options.len() {
                                break;
                            }
                            digits[w] = 0;
                        }
                    }
                    for (k, &slot) in atom_slot.iter().enumerate() {
                        let mut s = Set::empty(n);
                        for (w, &d) in digits.iter().enumerate() {
                            if self.options[d] >> slot & 1 == 1 {
                                s.insert(w);
                            }
                        }
                        frame.val[k] = s;
                    }
                    let ext = compiled.eval(&frame);
                    if let Some(point) = (0..n).find(|&w| ext.get(w) == want) {
                        return Some((masks, vi, point));
                    }
                }
                None
            });
            if let Some((masks, vi, point)) = hit {
                let valuation = self.valuation(n, vi);
                return Some(self.model(n, &masks, &valuation).at(point));
            }
        }
        None
    }
}

fn formula_space(f: &Formula, bounds: &Bounds) -> Result<(Space, Compiled)> {
    let compiled = Compiled::new(f);
    let atoms: BTreeSet<Atom> = compiled.atoms.iter().cloned().collect();
    let agents: BTreeSet<AgentId> = compiled.agents.iter().cloned().collect();
    Ok((Space::new(bounds, &atoms, &agents)?, compiled))
}

/// Number of candidate pointed models a query on `f` visits at most.
pub fn search_size(f: &Formula, bounds: &Bounds) -> Result<u128> {
    Ok(formula_space(f, bounds)?.0.size())
}

/// Bounded validity: the first countermodel in enumeration order, if any.
pub fn check_validity(f: &Formula, bounds: &Bounds) -> Result<Verdict> {
    let (space, compiled) = formula_space(f, bounds)?;
    let checked = space.within_budget()?;
    Ok(match space.search(&compiled, false) {
        Some(pm) => Verdict::Countermodel(pm),
        None => Verdict::ValidWithinBounds { checked },
    })
}

/// Bounded satisfiability: the first pointed model satisfying `f`, if any.
pub fn find_witness(f: &Formula, bounds: &Bounds) -> Result<Option<PointedModel>> {
    let (space, compiled) = formula_space(f, bounds)?;
    space.within_budget()?;
    Ok(space.search(&compiled, true))
}

/// Every pointed model within the bounds, over the full signature.
pub fn enumerate(bounds: &Bounds) -> Result<Enumeration> {
    let atoms: BTreeSet<Atom> = bounds.atoms().into_iter().collect();
    let agents: BTreeSet<AgentId> = bounds.agents.iter().cloned().collect();
    let space = Space::new(bounds, &atoms, &agents)?;
    let total = space.within_budget()?;
    Ok(Enumeration { space, total, n: 1, frame: 0, valuation: 0, point: 0, current: None })
}

/// Number of pointed models [`enumerate`] yields.
pub fn count(bounds: &Bounds) -> Result<u128> {
    let atoms: BTreeSet<Atom> = bounds.atoms().into_iter().collect();
    let agents: BTreeSet<AgentId> = bounds.agents.iter().cloned().collect();
    Ok(Space::new(bounds, &atoms, &agents)?.size())
}

/// Lazy stream of pointed models in enumeration order.
pub struct Enumeration {
    space: Space,
    total: u128,
    n: usize,
    frame: u128,
    valuation: u128,
    point: usize,
    current: Option<Model>,
}

impl Enumeration {
    pub fn total(&self) -> u128 {
        self.total
    }
}

impl Iterator for Enumeration {
    type Item = PointedModel;

    fn next(&mut self) -> Option<PointedModel> {
        if self.n > self.space.bounds.max_worlds {
            return None;
        }
        let n = self.n;
        let model = match &self.current {
            Some(m) => m.clone(),
            None => {
                let frame = self.space.frame(n, self.frame);
                let valuation = self.space.valuation(n, self.valuation);
                let m = self.space.model(n, &frame, &valuation);
                self.current = Some(m.clone());
                m
            }
        };
        let pm = model.at(self.point);
        self.point += 1;
        if self.point == n {
            self.point = 0;
            self.current = None;
            self.valuation += 1;
            if self.valuation == self.space.valuations(n) {
                self.valuation = 0;
                self.frame += 1;
                if self.frame == self.space.frames(n) {
                    self.frame = 0;
                    self.n += 1;
                }
            }
        }
        Some(pm)
    }
}

/// A model whose product with an action fails a frame condition.
#[derive(Clone, Debug)]
pub struct ProductFailure {
    pub model: Model,
    pub product: Model,
    pub report: FrameReport,
}

/// Searches the enumerated models (in order) for one whose product with
/// `action` yields a report rejected by `ok`. The product report is taken in
/// relational strictness.
///
/// The product's frame depends only on the model's frame and on which worlds
/// satisfy each precondition, so only atoms read by preconditions vary and
/// reports are cached per frame and precondition pattern.
pub fn find_product_failure(
    bounds: &Bounds,
    action: &ActionModel,
    ok: impl Fn(&FrameReport) -> bool + Sync,
) -> Result<(Option<ProductFailure>, u128)> {
    let pre = Formula::conj((0..action.len()).map(|e| action.pre(e).clone()));
    let atoms = pre.atoms_read();
    let agents: BTreeSet<AgentId> = bounds.agents.iter().cloned().collect();
    let space = Space::new(bounds, &atoms, &agents)?;
    let checked = space.within_budget()?;
    for n in 1..=bounds.max_worlds {
        let hit = (0..space.frames(n) as u64).into_par_iter().find_map_first(|fi| {
            let masks = space.frame(n, fi as u128);
            let mut seen: HashMap<Vec<bool>, bool> = HashMap::new();
            for vi in 0..space.valuations(n) {
                let model = space.model(n, &masks, &space.valuation(n, vi));
                let ext: Vec<Vec<bool>> =
                    (0..action.len()).map(|e| crate::kripke::extension(&model, action.pre(e))).collect();
                let key: Vec<bool> = ext.iter().flatten().copied().collect();
                if let Some(&fine) = seen.get(&key) {
                    if fine {
                        continue;
                    }
                }
                let product = update::assemble(&model, action, &ext);
                let report = crate::kripke::validate(&product, Strictness::Relational).expect("total");
                let fine = ok(&report);
                seen.insert(key, fine);
                if !fine {
                    return Some(ProductFailure { model, product, report });
                }
            }
            None
        });
        if hit.is_some() {
            return Ok((hit, checked));
        }
    }
    Ok((None, checked))
}
