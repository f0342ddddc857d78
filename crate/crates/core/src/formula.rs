//! The formula language: atoms, boolean connectives, belief and dynamic boxes.
//!
//! Only the core constructors live in [`Formula`]. Disjunction, implication,
//! the biconditional, the dual of belief and the dynamic diamond are
//! abbreviations built by the helper constructors and recognised again by the
//! renderer, so `parse(render(f)) == f` holds for every formula.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::action::{ActionType, PointedAction};
use crate::error::{Error, Result};

macro_rules! ident_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(name: &str) -> Self {
                Self(Arc::from(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(name: &str) -> Self {
                Self::new(name)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

ident_type!(
    /// Name of an agent.
    AgentId
);
ident_type!(
    /// Name of a propositional symbol.
    PropId
);

/// Returns true if `name` is usable as an agent or proposition name.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !crate::parser::RESERVED.contains(&name)
}

/// A propositional symbol or its negation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Literal {
    pub prop: PropId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(prop: impl Into<PropId>) -> Self {
        Literal { prop: prop.into(), positive: true }
    }

    pub fn neg(prop: impl Into<PropId>) -> Self {
        Literal { prop: prop.into(), positive: false }
    }

    pub fn negate(&self) -> Self {
        Literal { prop: self.prop.clone(), positive: !self.positive }
    }

    pub fn to_formula(&self) -> Formula {
        let atom = Formula::Prop(self.prop.clone());
        if self.positive {
            atom
        } else {
            Formula::not(atom)
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("~")?;
        }
        write!(f, "{}", self.prop)
    }
}

/// `o_a(p)` or `o_a(~p)`: agent `a` sees that the literal holds.
///
/// `obs(a,~p)` is a separate atom, not the negation of `obs(a,p)`; both may
/// be false at once.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ObsAtom {
    pub agent: AgentId,
    pub literal: Literal,
}

impl ObsAtom {
    pub fn new(agent: impl Into<AgentId>, literal: Literal) -> Self {
        ObsAtom { agent: agent.into(), literal }
    }

    /// The observation of the opposite literal.
    pub fn counterpart(&self) -> Self {
        ObsAtom { agent: self.agent.clone(), literal: self.literal.negate() }
    }
}

impl fmt::Display for ObsAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "obs({},{})", self.agent, self.literal)
    }
}

/// Anything a valuation can make true: a proposition or an observation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Prop(PropId),
    Obs(ObsAtom),
}

impl Atom {
    pub fn prop(&self) -> &PropId {
        match self {
            Atom::Prop(p) => p,
            Atom::Obs(o) => &o.literal.prop,
        }
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            Atom::Prop(p) => Formula::Prop(p.clone()),
            Atom::Obs(o) => Formula::Obs(o.clone()),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Prop(p) => write!(f, "{p}"),
            Atom::Obs(o) => write!(f, "{o}"),
        }
    }
}

impl FromStr for Atom {
    type Err = Error;

    /// Parses `p`, `obs(a,p)` or `obs(a,~p)`, as used in model documents.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Structure(format!("malformed atom `{s}`"));
        if let Some(inner) = compact.strip_prefix("obs(").and_then(|r| r.strip_suffix(')')) {
            let (agent, lit) = inner.split_once(',').ok_or_else(bad)?;
            let (positive, prop) = match lit.strip_prefix('~') {
                Some(p) => (false, p),
                None => (true, lit),
            };
            if !is_identifier(agent) || !is_identifier(prop) {
                return Err(bad());
            }
            let literal = Literal { prop: prop.into(), positive };
            Ok(Atom::Obs(ObsAtom::new(agent, literal)))
        } else if is_identifier(&compact) {
            Ok(Atom::Prop(compact.as_str().into()))
        } else {
            Err(bad())
        }
    }
}

/// How an action inside a dynamic modality was written.
#[derive(Clone, PartialEq, Debug)]
pub enum ActionLabel {
    Type(Box<ActionType>),
    Named(String),
}

/// A pointed action model together with the name it was written under.
#[derive(Clone, PartialEq, Debug)]
pub struct Action {
    label: ActionLabel,
    pointed: Arc<PointedAction>,
}

impl Action {
    /// Expands an action type for the given agent registry; the audience is
    /// every agent other than the actor.
    pub fn from_type(ty: ActionType, agents: &[AgentId]) -> Result<Self> {
        let pointed = ty.expand(agents)?;
        Ok(Action { label: ActionLabel::Type(Box::new(ty)), pointed: Arc::new(pointed) })
    }

    pub fn named(name: impl Into<String>, pointed: Arc<PointedAction>) -> Self {
        Action { label: ActionLabel::Named(name.into()), pointed }
    }

    pub fn label(&self) -> &ActionLabel {
        &self.label
    }

    pub fn pointed(&self) -> &PointedAction {
        &self.pointed
    }

    pub fn shared(&self) -> &Arc<PointedAction> {
        &self.pointed
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            ActionLabel::Type(t) => write!(f, "{t}"),
            ActionLabel::Named(n) => write!(f, "@{n}"),
        }
    }
}

/// A formula over propositions, observation atoms, belief and dynamic boxes.
#[derive(Clone, PartialEq, Debug)]
pub enum Formula {
    True,
    Prop(PropId),
    Obs(ObsAtom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Believes(AgentId, Box<Formula>),
    /// `[A,e] φ`
    Dyn(Action, Box<Formula>),
}

impl Formula {
    pub fn prop(p: impl Into<PropId>) -> Self {
        Formula::Prop(p.into())
    }

    pub fn obs(agent: impl Into<AgentId>, literal: Literal) -> Self {
        Formula::Obs(ObsAtom::new(agent, literal))
    }

    pub fn falsum() -> Self {
        Formula::not(Formula::True)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    /// `~(~l & ~r)`
    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(l), Formula::not(r)))
    }

    /// `~(l & ~r)`
    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::not(Formula::and(l, Formula::not(r)))
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::and(Formula::implies(l.clone(), r.clone()), Formula::implies(r, l))
    }

    pub fn believes(agent: impl Into<AgentId>, f: Formula) -> Self {
        Formula::Believes(agent.into(), Box::new(f))
    }

    /// `~B[a]~f`
    pub fn believable(agent: impl Into<AgentId>, f: Formula) -> Self {
        Formula::not(Formula::believes(agent, Formula::not(f)))
    }

    pub fn boxed(action: Action, f: Formula) -> Self {
        Formula::Dyn(action, Box::new(f))
    }

    /// `~[A,e]~f`: the action is executable and `f` holds afterwards.
    pub fn diamond(action: Action, f: Formula) -> Self {
        Formula::not(Formula::boxed(action, Formula::not(f)))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts.into_iter().reduce(Formula::or).unwrap_or_else(Formula::falsum)
    }

    /// Negation that strips an existing outer negation instead of stacking one.
    pub fn negation(&self) -> Self {
        match self {
            Formula::Not(inner) => (**inner).clone(),
            other => Formula::not(other.clone()),
        }
    }

    /// True iff the formula contains no dynamic modality.
    pub fn is_static(&self) -> bool {
        match self {
            Formula::True | Formula::Prop(_) | Formula::Obs(_) => true,
            Formula::Not(f) | Formula::Believes(_, f) => f.is_static(),
            Formula::And(l, r) => l.is_static() && r.is_static(),
            Formula::Dyn(..) => false,
        }
    }

    /// Number of AST nodes, not counting action preconditions.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::Prop(_) | Formula::Obs(_) => 1,
            Formula::Not(f) | Formula::Believes(_, f) | Formula::Dyn(_, f) => 1 + f.size(),
            Formula::And(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Atoms whose truth value can influence evaluation, including those read
    /// by the preconditions of every nested action model.
    pub fn atoms_read(&self) -> BTreeSet<Atom> {
        let mut sig = Signature::default();
        sig.collect(self);
        sig.atoms
    }

    /// Agents whose accessibility relation can influence evaluation.
    pub fn believers(&self) -> BTreeSet<AgentId> {
        let mut sig = Signature::default();
        sig.collect(self);
        sig.believers
    }

    /// Every agent and proposition mentioned anywhere, including inside
    /// action models (relations and postconditions too).
    pub fn vocabulary(&self) -> (BTreeSet<AgentId>, BTreeSet<PropId>) {
        let mut sig = Signature::default();
        sig.collect(self);
        (sig.agents, sig.props)
    }
}

#[derive(Default)]
struct Signature {
    atoms: BTreeSet<Atom>,
    believers: BTreeSet<AgentId>,
    agents: BTreeSet<AgentId>,
    props: BTreeSet<PropId>,
}

impl Signature {
    fn collect(&mut self, f: &Formula) {
        match f {
            Formula::True => {}
            Formula::Prop(p) => {
                self.props.insert(p.clone());
                self.atoms.insert(Atom::Prop(p.clone()));
            }
            Formula::Obs(o) => {
                self.props.insert(o.literal.prop.clone());
                self.agents.insert(o.agent.clone());
                self.atoms.insert(Atom::Obs(o.clone()));
            }
            Formula::Not(g) => self.collect(g),
            Formula::And(l, r) => {
                self.collect(l);
                self.collect(r);
            }
            Formula::Believes(a, g) => {
                self.agents.insert(a.clone());
                self.believers.insert(a.clone());
                self.collect(g);
            }
            Formula::Dyn(action, g) => {
                let model = &action.pointed().action;
                for agent in model.agents() {
                    self.agents.insert(agent.clone());
                }
                for event in 0..model.len() {
                    self.collect(model.pre(event));
                    for atom in model.post(event).atoms() {
                        self.props.insert(atom.prop().clone());
                        if let Atom::Obs(o) = atom {
                            self.agents.insert(o.agent.clone());
                        }
                    }
                }
                self.collect(g);
            }
        }
    }
}

/// Rendered text plus whether it already carries outer parentheses.
fn render_parts(f: &Formula) -> (String, bool) {
    match f {
        Formula::True => ("true".into(), false),
        Formula::Prop(p) => (p.to_string(), false),
        Formula::Obs(o) => (o.to_string(), false),
        Formula::And(l, r) => match (implication(l), implication(r)) {
            (Some((a, b)), Some((b2, a2))) if a == a2 && b == b2 => {
                (format!("({} <-> {})", render(a), render(b)), true)
            }
            _ => (format!("({} & {})", render(l), render(r)), true),
        },
        Formula::Believes(a, g) => (format!("B[{a}]{}", render_arg(g)), false),
        Formula::Dyn(act, g) => (format!("[{act}]{}", render_arg(g)), false),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::True => ("false".into(), false),
            Formula::And(l, r) => match (l.as_ref(), r.as_ref()) {
                (Formula::Not(a), Formula::Not(b)) => (format!("({} | {})", render(a), render(b)), true),
                (a, Formula::Not(b)) => (format!("({} -> {})", render(a), render(b)), true),
                _ => (format!("~{}", render_arg(inner)), false),
            },
            Formula::Believes(a, g) => match g.as_ref() {
                Formula::Not(h) => (format!("Bhat[{a}]{}", render_arg(h)), false),
                _ => (format!("~{}", render_arg(inner)), false),
            },
            Formula::Dyn(act, g) => match g.as_ref() {
                Formula::Not(h) => (format!("<{act}>{}", render_arg(h)), false),
                _ => (format!("~{}", render_arg(inner)), false),
            },
            Formula::Prop(_) | Formula::Obs(_) => (format!("~{}", render(inner)), false),
            Formula::Not(_) => (format!("~{}", render_arg(inner)), false),
        },
    }
}

/// `~(l & ~r)` as `(l, r)`.
fn implication(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Not(inner) => match inner.as_ref() {
            Formula::And(l, r) => match r.as_ref() {
                Formula::Not(r) => Some((l, r)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn render_arg(f: &Formula) -> String {
    match render_parts(f) {
        (s, true) => s,
        (s, false) => format!("({s})"),
    }
}

/// Deterministic, fully parenthesised concrete syntax.
pub fn render(f: &Formula) -> String {
    render_parts(f).0
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}
