//! Built-in models: the French Drop coin trick and a two-world showing example.

use crate::formula::Action;
use crate::kripke::{Model, PointedModel};
use crate::parser::Registry;

/// A magician `a` holds a coin in the left hand (`l`); `r` is the right hand.
/// Spectator `b` cannot tell the three situations apart.
pub struct FrenchDrop {
    pub registry: Registry,
    pub initial: PointedModel,
    /// Bogus pass to the right hand: `show-(a, r & ~l)`.
    pub first_action: Action,
    /// Reveal: `show+(a, l & ~r)`.
    pub second_action: Action,
}

pub const FRENCH_DROP_FIRST: &str = "show-(a, r & ~l)";
pub const FRENCH_DROP_SECOND: &str = "show+(a, l & ~r)";

/// Holds at the initial point: the whole trick, step by step.
pub const FRENCH_DROP_POSTERIOR: &str = "l & obs(a,l) & obs(a,~r) & ~obs(a,r) & ~obs(b,r) \
     & <show-(a, r & ~l)>(obs(a,l) & obs(a,~r) & obs(b,r) & obs(b,~l) \
     & <show+(a, l & ~r)>(obs(b,l) & obs(b,~r)))";

/// Facts expected after the bogus pass.
pub const FRENCH_DROP_INTERMEDIATE_FACTS: &[&str] = &["O(b,~l)", "O(b,r)", "B[b] r", "l"];

/// Facts expected after the reveal.
pub const FRENCH_DROP_FINAL_FACTS: &[&str] = &["O(b,l)", "O(b,~r)", "B[a] l", "B[a] ~r"];

pub fn french_drop_model() -> Model {
    Model::builder()
        .agent("a")
        .agent("b")
        .prop("l")
        .prop("r")
        .world("w", ["l", "obs(a,l)", "obs(a,~r)"])
        .world("v", ["r", "obs(a,r)", "obs(a,~l)"])
        .world("u", ["obs(a,~r)", "obs(a,~l)"])
        .edge("a", "w", "w")
        .edge("a", "v", "v")
        .edge("a", "u", "u")
        .complete("b", &["w", "v", "u"])
        .build()
        .expect("well-formed")
}

pub fn french_drop() -> FrenchDrop {
    let model = french_drop_model();
    let registry = Registry::from_model(&model);
    let first_action = registry.parse_action(FRENCH_DROP_FIRST).expect("valid action");
    let second_action = registry.parse_action(FRENCH_DROP_SECOND).expect("valid action");
    FrenchDrop { registry, initial: model.point("w").expect("declared"), first_action, second_action }
}

/// Agent `a` sees `p`; `b` cannot distinguish this from a world where both
/// see `~p`.
pub struct ShowingExample {
    pub registry: Registry,
    pub initial: PointedModel,
    pub action: Action,
}

pub const SHOWING_ACTION: &str = "show-(a, ~p)";

pub const SHOWING_FORMULA: &str = "obs(a,p) & ~obs(b,~p) & [show-(a,~p)](p & obs(b,~p) & B[b] obs(a,~p))";

pub fn showing_model() -> Model {
    Model::builder()
        .agent("a")
        .agent("b")
        .prop("p")
        .world("w", ["p", "obs(a,p)"])
        .world("v", ["obs(a,~p)", "obs(b,~p)"])
        .edge("a", "w", "w")
        .edge("a", "v", "v")
        .complete("b", &["w", "v"])
        .build()
        .expect("well-formed")
}

pub fn showing_example() -> ShowingExample {
    let model = showing_model();
    let registry = Registry::from_model(&model);
    let action = registry.parse_action(SHOWING_ACTION).expect("valid action");
    ShowingExample { registry, initial: model.point("w").expect("declared"), action }
}
