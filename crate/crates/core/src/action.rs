//! Action models with pre- and postconditions, and the four action types
//! used to describe verbal and visual (mis)direction.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{AgentId, Atom, Formula, Literal, ObsAtom};
use crate::kripke::{FrameFlags, FrameReport, Relation};

pub type EventId = String;

/// Finite assignment of truth values to atoms. Atoms outside the map keep
/// their value through an update.
#[derive(Clone, PartialEq, Default, Debug)]
pub struct PostMap {
    assignments: BTreeMap<Atom, bool>,
}

impl PostMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, atom: Atom, value: bool) -> &mut Self {
        self.assignments.insert(atom, value);
        self
    }

    /// Assigns `o_a(l) := value` and `o_a(~l) := !value`... only when `value`
    /// is true; a false observation leaves the counterpart false as well.
    pub fn set_obs(&mut self, obs: ObsAtom, value: bool) -> &mut Self {
        self.assignments.insert(Atom::Obs(obs), value);
        self
    }

    pub fn get(&self, atom: &Atom) -> Option<bool> {
        self.assignments.get(atom).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.assignments.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, bool)> {
        self.assignments.iter().map(|(a, v)| (a, *v))
    }

    /// Observation atoms must be assigned in pairs, and a pair may not make
    /// both observations true.
    pub fn check_discipline(&self) -> std::result::Result<(), String> {
        for (atom, value) in &self.assignments {
            if let Atom::Obs(obs) = atom {
                let other = Atom::Obs(obs.counterpart());
                match self.assignments.get(&other) {
                    None => return Err(format!("`{atom}` is assigned but `{other}` is not")),
                    Some(true) if *value => {
                        return Err(format!("`{atom}` and `{other}` are both assigned true"))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Events, per-agent relations, a precondition and a postcondition per event.
#[derive(Clone, Debug)]
pub struct ActionModel {
    agents: Vec<AgentId>,
    events: Vec<EventId>,
    relations: Vec<Relation>,
    pre: Vec<Formula>,
    post: Vec<PostMap>,
}

/// Agent order is irrelevant and an undeclared agent equals an empty relation.
impl PartialEq for ActionModel {
    fn eq(&self, other: &Self) -> bool {
        let same_relation = |a: &AgentId| match (self.relation(a), other.relation(a)) {
            (Some(x), Some(y)) => x == y,
            (Some(r), None) | (None, Some(r)) => r.pairs().next().is_none(),
            (None, None) => true,
        };
        self.events == other.events
            && self.pre == other.pre
            && self.post == other.post
            && self.agents.iter().chain(&other.agents).all(same_relation)
    }
}

impl ActionModel {
    pub fn builder() -> ActionModelBuilder {
        ActionModelBuilder::default()
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn events(&self) -> &[EventId] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn event_index(&self, name: &str) -> Option<usize> {
        self.events.iter().position(|e| e == name)
    }

    /// The relation of `agent`; agents without a declared relation have none.
    pub fn relation(&self, agent: &AgentId) -> Option<&Relation> {
        self.agents.iter().position(|a| a == agent).map(|i| &self.relations[i])
    }

    pub fn pre(&self, event: usize) -> &Formula {
        &self.pre[event]
    }

    pub fn post(&self, event: usize) -> &PostMap {
        &self.post[event]
    }

    /// Frame properties of every relation plus the postcondition discipline.
    ///
    /// A postcondition violation is an error in both modes. In strict mode the
    /// report is only valid if every relation is Euclidean, transitive and
    /// serial; lenient mode ignores the frame flags.
    pub fn validate(&self, strictness: ActionStrictness) -> Result<FrameReport> {
        for (event, post) in self.events.iter().zip(&self.post) {
            post.check_discipline()
                .map_err(|reason| Error::PostCondition { event: event.clone(), reason })?;
        }
        let frames: BTreeMap<AgentId, FrameFlags> =
            self.agents.iter().zip(&self.relations).map(|(a, r)| (a.clone(), r.flags())).collect();
        let frames_ok = frames.values().all(FrameFlags::all);
        let valid = match strictness {
            ActionStrictness::Strict => frames_ok,
            ActionStrictness::Lenient => true,
        };
        Ok(FrameReport { frames, obs_consistent: true, non_empty: !self.is_empty(), valid })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ActionStrictness {
    Strict,
    Lenient,
}

#[derive(Default)]
pub struct ActionModelBuilder {
    agents: Vec<AgentId>,
    events: Vec<EventId>,
    pre: Vec<Formula>,
    post: Vec<PostMap>,
    edges: Vec<(AgentId, String, String)>,
}

impl ActionModelBuilder {
    /// Declares an agent so that it gets a (possibly empty) relation.
    pub fn agent(mut self, agent: impl Into<AgentId>) -> Self {
        let agent = agent.into();
        if !self.agents.contains(&agent) {
            self.agents.push(agent);
        }
        self
    }

    pub fn event(mut self, name: impl Into<String>, pre: Formula, post: PostMap) -> Self {
        self.events.push(name.into());
        self.pre.push(pre);
        self.post.push(post);
        self
    }

    pub fn edge(mut self, agent: impl Into<AgentId>, from: &str, to: &str) -> Self {
        let agent = agent.into();
        if !self.agents.contains(&agent) {
            self.agents.push(agent.clone());
        }
        self.edges.push((agent, from.to_owned(), to.to_owned()));
        self
    }

    pub fn build(self) -> Result<ActionModel> {
        if self.events.is_empty() {
            return Err(Error::Structure("an action model needs at least one event".into()));
        }
        for (i, e) in self.events.iter().enumerate() {
            if self.events[..i].contains(e) {
                return Err(Error::Structure(format!("duplicate event `{e}`")));
            }
        }
        let index = |name: &str| {
            self.events
                .iter()
                .position(|e| e == name)
                .ok_or_else(|| Error::Structure(format!("unknown event `{name}`")))
        };
        let mut relations = vec![Relation::new(self.events.len()); self.agents.len()];
        for (agent, from, to) in &self.edges {
            let slot = self.agents.iter().position(|a| a == agent).expect("declared");
            relations[slot].insert(index(from)?, index(to)?);
        }
        Ok(ActionModel {
            agents: self.agents,
            events: self.events,
            relations,
            pre: self.pre,
            post: self.post,
        })
    }
}

/// An action model with a designated actual event.
#[derive(Clone, PartialEq, Debug)]
pub struct PointedAction {
    pub action: ActionModel,
    pub point: usize,
}

impl PointedAction {
    pub fn new(action: ActionModel, point: &str) -> Result<Self> {
        let point =
            action.event_index(point).ok_or_else(|| Error::Structure(format!("unknown event `{point}`")))?;
        Ok(PointedAction { action, point })
    }

    pub fn point_name(&self) -> &str {
        &self.action.events[self.point]
    }

    pub fn precondition(&self) -> &Formula {
        self.action.pre(self.point)
    }
}

/// Non-empty conjunction of literals over pairwise distinct propositions.
#[derive(Clone, PartialEq, Debug)]
pub struct LiteralConj(Vec<Literal>);

impl LiteralConj {
    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn to_formula(&self) -> Formula {
        Formula::conj(self.0.iter().map(Literal::to_formula))
    }
}

impl TryFrom<Vec<Literal>> for LiteralConj {
    type Error = Error;

    fn try_from(literals: Vec<Literal>) -> Result<Self> {
        if literals.is_empty() {
            return Err(Error::ActionType("empty literal conjunction".into()));
        }
        for (i, l) in literals.iter().enumerate() {
            if literals[..i].iter().any(|m| m.prop == l.prop) {
                return Err(Error::ActionType(format!("proposition `{}` repeated", l.prop)));
            }
        }
        Ok(LiteralConj(literals))
    }
}

impl fmt::Display for LiteralConj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Truthful or untruthful announcements (`tell`) and genuine or bogus
/// demonstrations (`show`), each performed by an actor for everyone else.
#[derive(Clone, PartialEq, Debug)]
pub enum ActionType {
    TellPlus(AgentId, Formula),
    TellMinus(AgentId, Formula),
    ShowPlus(AgentId, LiteralConj),
    ShowMinus(AgentId, LiteralConj),
}

impl ActionType {
    pub fn actor(&self) -> &AgentId {
        match self {
            ActionType::TellPlus(a, _)
            | ActionType::TellMinus(a, _)
            | ActionType::ShowPlus(a, _)
            | ActionType::ShowMinus(a, _) => a,
        }
    }

    /// Builds the two-event pointed action model (actual event `e`, alternative
    /// `f`). Every agent of `agents` other than the actor is in the audience.
    pub fn expand(&self, agents: &[AgentId]) -> Result<PointedAction> {
        let actor = self.actor();
        if !agents.contains(actor) {
            return Err(Error::ActionType(format!("unknown actor `{actor}`")));
        }
        let audience: Vec<&AgentId> = agents.iter().filter(|b| *b != actor).collect();
        if audience.is_empty() {
            return Err(Error::ActionType(format!("`{actor}` has no audience")));
        }

        let mut builder = ActionModel::builder().agent(actor.clone());
        for b in &audience {
            builder = builder.agent((*b).clone());
        }

        let (pre_e, pre_f, post_e, post_f) = match self {
            ActionType::TellPlus(a, phi) | ActionType::TellMinus(a, phi) => {
                let believed = match self {
                    ActionType::TellPlus(..) => phi.clone(),
                    _ => phi.negation(),
                };
                let pre_e = Formula::believes(a.clone(), believed);
                let pre_f = Formula::and(phi.clone(), Formula::believes(a.clone(), phi.clone()));
                (pre_e, pre_f, PostMap::new(), PostMap::new())
            }
            ActionType::ShowPlus(a, psi) => {
                let lits = psi.literals();
                let pre_e = Formula::conj(
                    lits.iter()
                        .map(Literal::to_formula)
                        .chain(lits.iter().map(|l| Formula::obs(a.clone(), l.clone()))),
                );
                let pre_f =
                    Formula::conj(lits.iter().map(|l| Formula::not(Formula::obs(a.clone(), l.negate()))));
                let mut post = PostMap::new();
                for l in lits {
                    set_literal(&mut post, l, true);
                    for b in &audience {
                        set_seen(&mut post, b, l);
                    }
                }
                (pre_e, pre_f, post.clone(), post)
            }
            ActionType::ShowMinus(a, psi) => {
                let lits = psi.literals();
                let pre_e = Formula::conj(
                    lits.iter()
                        .map(|l| l.negate().to_formula())
                        .chain(lits.iter().map(|l| Formula::obs(a.clone(), l.negate()))),
                );
                let pre_f = Formula::conj(audience.iter().flat_map(|b| {
                    lits.iter().map(move |l| Formula::not(Formula::obs((*b).clone(), l.negate())))
                }));
                let mut post_e = PostMap::new();
                let mut post_f = PostMap::new();
                for l in lits {
                    set_literal(&mut post_e, l, false);
                    set_literal(&mut post_f, l, true);
                    set_seen(&mut post_f, a, l);
                    for b in &audience {
                        set_seen(&mut post_e, b, l);
                        set_seen(&mut post_f, b, l);
                    }
                }
                (pre_e, pre_f, post_e, post_f)
            }
        };

        builder = builder.event("e", pre_e, post_e).event("f", pre_f, post_f);
        let edges: &[(&str, &str)] = match self {
            ActionType::ShowMinus(..) => &[("e", "e"), ("f", "f"), ("f", "e")],
            _ => &[("e", "e"), ("e", "f"), ("f", "e"), ("f", "f")],
        };
        for (from, to) in edges {
            builder = builder.edge(actor.clone(), from, to);
        }
        for b in &audience {
            builder = builder.edge((*b).clone(), "e", "f").edge((*b).clone(), "f", "f");
        }
        PointedAction::new(builder.build()?, "e")
    }
}

/// Makes literal `l` true (or false) by assigning its proposition.
fn set_literal(post: &mut PostMap, l: &Literal, value: bool) {
    post.set(Atom::Prop(l.prop.clone()), l.positive == value);
}

/// `o_b(l) := true`, `o_b(~l) := false`.
fn set_seen(post: &mut PostMap, agent: &AgentId, l: &Literal) {
    let seen = ObsAtom::new(agent.clone(), l.clone());
    post.set(Atom::Obs(seen.counterpart()), false);
    post.set(Atom::Obs(seen), true);
}

impl fmt::Display for ActionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionType::TellPlus(a, phi) => write!(f, "tell+({a},{phi})"),
            ActionType::TellMinus(a, phi) => write!(f, "tell-({a},{phi})"),
            ActionType::ShowPlus(a, psi) => write!(f, "show+({a},{psi})"),
            ActionType::ShowMinus(a, psi) => write!(f, "show-({a},{psi})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agents() -> Vec<AgentId> {
        vec!["a".into(), "b".into()]
    }

    fn conj(lits: Vec<Literal>) -> LiteralConj {
        lits.try_into().unwrap()
    }

    fn pairs(pa: &PointedAction, agent: &str) -> Vec<(usize, usize)> {
        pa.action.relation(&agent.into()).unwrap().pairs().collect()
    }

    // Brute-force frame checks over explicit pair lists, independent of
    // `Relation`'s own implementation.
    fn brute_euclidean(r: &[(usize, usize)]) -> bool {
        r.iter().all(|&(x, y)| r.iter().filter(|&&(x2, _)| x2 == x).all(|&(_, z)| r.contains(&(y, z))))
    }
    fn brute_transitive(r: &[(usize, usize)]) -> bool {
        r.iter().all(|&(x, y)| r.iter().filter(|&&(y2, _)| y2 == y).all(|&(_, z)| r.contains(&(x, z))))
    }
    fn brute_serial(r: &[(usize, usize)], n: usize) -> bool {
        (0..n).all(|x| r.iter().any(|&(x2, _)| x2 == x))
    }

    #[test]
    fn tell_plus_is_strictly_valid() {
        let pa = ActionType::TellPlus("a".into(), Formula::prop("p")).expand(&agents()).unwrap();
        let actor = pairs(&pa, "a");
        let spectator = pairs(&pa, "b");
        assert_eq!(actor, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(spectator, vec![(0, 1), (1, 1)]);
        for r in [&actor, &spectator] {
            assert!(brute_euclidean(r) && brute_transitive(r) && brute_serial(r, 2));
        }
        let report = pa.action.validate(ActionStrictness::Strict).unwrap();
        assert!(report.valid);
        for e in 0..2 {
            assert!(pa.action.post(e).is_empty());
        }
    }

    #[test]
    fn show_minus_actor_relation_is_not_euclidean() {
        let pa = ActionType::ShowMinus("a".into(), conj(vec![Literal::pos("p")])).expand(&agents()).unwrap();
        let actor = pairs(&pa, "a");
        assert_eq!(actor, vec![(0, 0), (1, 0), (1, 1)]);
        assert!(!brute_euclidean(&actor));
        assert!(brute_transitive(&actor) && brute_serial(&actor, 2));

        let strict = pa.action.validate(ActionStrictness::Strict).unwrap();
        assert!(!strict.valid);
        assert!(!strict.frames[&AgentId::new("a")].euclidean);
        assert!(pa.action.validate(ActionStrictness::Lenient).unwrap().valid);
    }

    #[test]
    fn unpaired_observation_post_is_rejected() {
        let mut post = PostMap::new();
        post.set(Atom::Obs(ObsAtom::new("b", Literal::pos("p"))), true);
        let model = ActionModel::builder()
            .agent("a")
            .event("e", Formula::True, post)
            .edge("a", "e", "e")
            .build()
            .unwrap();
        for mode in [ActionStrictness::Strict, ActionStrictness::Lenient] {
            assert!(matches!(model.validate(mode), Err(Error::PostCondition { .. })));
        }
    }

    #[test]
    fn both_observations_true_is_rejected() {
        let mut post = PostMap::new();
        post.set(Atom::Obs(ObsAtom::new("b", Literal::pos("p"))), true);
        post.set(Atom::Obs(ObsAtom::new("b", Literal::neg("p"))), true);
        assert!(post.check_discipline().is_err());
    }

    #[test]
    fn show_minus_on_french_drop_payload() {
        let pa = ActionType::ShowMinus("a".into(), conj(vec![Literal::pos("r"), Literal::neg("l")]))
            .expand(&agents())
            .unwrap();
        let expected_pre_e = Formula::conj([
            Formula::not(Formula::prop("r")),
            Formula::prop("l"),
            Formula::obs("a", Literal::neg("r")),
            Formula::obs("a", Literal::pos("l")),
        ]);
        assert_eq!(pa.action.pre(0), &expected_pre_e);
        let expected_pre_f = Formula::conj([
            Formula::not(Formula::obs("b", Literal::neg("r"))),
            Formula::not(Formula::obs("b", Literal::pos("l"))),
        ]);
        assert_eq!(pa.action.pre(1), &expected_pre_f);

        let post_e = pa.action.post(0);
        assert_eq!(post_e.get(&Atom::Prop("r".into())), Some(false));
        assert_eq!(post_e.get(&Atom::Prop("l".into())), Some(true));
        assert_eq!(post_e.get(&"obs(b,r)".parse().unwrap()), Some(true));
        assert_eq!(post_e.get(&"obs(b,~r)".parse().unwrap()), Some(false));
        assert_eq!(post_e.get(&"obs(b,~l)".parse().unwrap()), Some(true));
        assert_eq!(post_e.get(&"obs(b,l)".parse().unwrap()), Some(false));
        assert_eq!(post_e.get(&"obs(a,r)".parse().unwrap()), None);

        let post_f = pa.action.post(1);
        assert_eq!(post_f.get(&Atom::Prop("r".into())), Some(true));
        assert_eq!(post_f.get(&Atom::Prop("l".into())), Some(false));
        for (atom, v) in [
            ("obs(a,r)", true),
            ("obs(a,~l)", true),
            ("obs(b,r)", true),
            ("obs(b,~l)", true),
            ("obs(a,~r)", false),
            ("obs(a,l)", false),
            ("obs(b,~r)", false),
            ("obs(b,l)", false),
        ] {
            assert_eq!(post_f.get(&atom.parse().unwrap()), Some(v), "{atom}");
        }
    }

    #[test]
    fn tell_minus_of_negation_believes_the_positive() {
        let not_p = Formula::not(Formula::prop("p"));
        let pa = ActionType::TellMinus("a".into(), not_p.clone()).expand(&agents()).unwrap();
        assert_eq!(pa.action.pre(0), &Formula::believes("a", Formula::prop("p")));
        assert_eq!(pa.action.pre(1), &Formula::and(not_p.clone(), Formula::believes("a", not_p)));
    }

    #[test]
    fn show_plus_reveal() {
        let pa = ActionType::ShowPlus("a".into(), conj(vec![Literal::pos("l"), Literal::neg("r")]))
            .expand(&agents())
            .unwrap();
        let expected = Formula::conj([
            Formula::prop("l"),
            Formula::not(Formula::prop("r")),
            Formula::obs("a", Literal::pos("l")),
            Formula::obs("a", Literal::neg("r")),
        ]);
        assert_eq!(pa.action.pre(0), &expected);
        assert_eq!(
            pa.action.pre(1),
            &Formula::conj([
                Formula::not(Formula::obs("a", Literal::neg("l"))),
                Formula::not(Formula::obs("a", Literal::pos("r"))),
            ])
        );
        assert_eq!(pa.action.post(0), pa.action.post(1));
    }

    #[test]
    fn expansion_errors() {
        assert!(LiteralConj::try_from(vec![Literal::pos("p"), Literal::neg("p")]).is_err());
        assert!(LiteralConj::try_from(vec![]).is_err());
        let solo = vec![AgentId::new("a")];
        assert!(ActionType::TellPlus("a".into(), Formula::True).expand(&solo).is_err());
        assert!(ActionType::TellPlus("z".into(), Formula::True).expand(&agents()).is_err());
    }

    #[test]
    fn multi_spectator_audience_replicates_the_pattern() {
        let three: Vec<AgentId> = vec!["a".into(), "b".into(), "c".into()];
        let pa = ActionType::ShowMinus("a".into(), conj(vec![Literal::pos("p")])).expand(&three).unwrap();
        assert_eq!(pairs(&pa, "b"), pairs(&pa, "c"));
        assert_eq!(pa.action.post(0).get(&"obs(c,p)".parse().unwrap()), Some(true));
        assert_eq!(
            pa.action.pre(1),
            &Formula::conj([
                Formula::not(Formula::obs("b", Literal::neg("p"))),
                Formula::not(Formula::obs("c", Literal::neg("p"))),
            ])
        );
    }

    #[test]
    fn expanded_posts_respect_discipline() {
        let payloads = [vec![Literal::pos("p")], vec![Literal::neg("p"), Literal::pos("q")]];
        for lits in payloads {
            for ty in [
                ActionType::ShowPlus("a".into(), conj(lits.clone())),
                ActionType::ShowMinus("b".into(), conj(lits.clone())),
            ] {
                let pa = ty.expand(&agents()).unwrap();
                for e in 0..2 {
                    pa.action.post(e).check_discipline().unwrap();
                }
                assert_eq!(ty.expand(&agents()).unwrap(), pa);
            }
        }
    }
}
