//! Seeded random formulas shared by the integration suites.
#![allow(dead_code)]

use dlm::{Action, ActionType, AgentId, Formula, Literal, LiteralConj, PropId};
use rand::seq::SliceRandom;
use rand::Rng;

/// What a generated formula may mention.
#[derive(Clone)]
pub struct Pool {
    pub agents: Vec<AgentId>,
    /// Props usable as atoms and inside announcements.
    pub props: Vec<PropId>,
    /// Props whose observation atoms may appear; also the only payloads of
    /// `show` actions, so the searched atom set stays small.
    pub observed: Vec<PropId>,
}

impl Pool {
    pub fn new(agents: &[&str], props: &[&str], observed: &[&str]) -> Self {
        Pool {
            agents: agents.iter().map(|a| AgentId::new(a)).collect(),
            props: props.iter().map(|p| PropId::new(p)).collect(),
            observed: observed.iter().map(|p| PropId::new(p)).collect(),
        }
    }
}

fn literal<R: Rng>(rng: &mut R, props: &[PropId]) -> Literal {
    let p = props.choose(rng).unwrap().clone();
    if rng.gen() {
        Literal::pos(p)
    } else {
        Literal::neg(p)
    }
}

fn leaf<R: Rng>(rng: &mut R, pool: &Pool) -> Formula {
    match rng.gen_range(0..10) {
        0 => Formula::True,
        1 => Formula::falsum(),
        2..=5 if !pool.observed.is_empty() => {
            let a = pool.agents.choose(rng).unwrap().clone();
            Formula::obs(a, literal(rng, &pool.observed))
        }
        _ => Formula::prop(pool.props.choose(rng).unwrap().clone()),
    }
}

/// A static formula of roughly `size` connectives.
pub fn static_formula<R: Rng>(rng: &mut R, pool: &Pool, size: usize) -> Formula {
    formula(rng, pool, size, 0)
}

/// A formula whose dynamic modalities nest at most `dyn_depth` deep.
/// Announcement payloads are static and mention props only.
pub fn formula<R: Rng>(rng: &mut R, pool: &Pool, size: usize, dyn_depth: usize) -> Formula {
    if size == 0 {
        return leaf(rng, pool);
    }
    let choices = if dyn_depth > 0 { 8 } else { 6 };
    match rng.gen_range(0..choices) {
        0 => Formula::not(formula(rng, pool, size - 1, dyn_depth)),
        1 | 2 => {
            let left = rng.gen_range(0..size);
            let l = formula(rng, pool, left, dyn_depth);
            let r = formula(rng, pool, size - 1 - left, dyn_depth);
            match rng.gen_range(0..3) {
                0 => Formula::and(l, r),
                1 => Formula::or(l, r),
                _ => Formula::implies(l, r),
            }
        }
        3 | 4 => {
            let a = pool.agents.choose(rng).unwrap().clone();
            Formula::believes(a, formula(rng, pool, size - 1, dyn_depth))
        }
        5 => {
            let a = pool.agents.choose(rng).unwrap().clone();
            Formula::believable(a, formula(rng, pool, size - 1, dyn_depth))
        }
        _ => {
            let act = action(rng, pool);
            let body = formula(rng, pool, size - 1, dyn_depth - 1);
            if rng.gen() {
                Formula::boxed(act, body)
            } else {
                Formula::diamond(act, body)
            }
        }
    }
}

/// One of the four action types with a random actor and payload.
pub fn action<R: Rng>(rng: &mut R, pool: &Pool) -> Action {
    let actor = pool.agents.choose(rng).unwrap().clone();
    let payload_pool = Pool { observed: Vec::new(), ..pool.clone() };
    let ty = match rng.gen_range(0..4) {
        0 => ActionType::TellPlus(actor, formula(rng, &payload_pool, 1, 0)),
        1 => ActionType::TellMinus(actor, formula(rng, &payload_pool, 1, 0)),
        k => {
            let lits = vec![literal(rng, &pool.observed)];
            let psi = LiteralConj::try_from(lits).unwrap();
            if k == 2 {
                ActionType::ShowPlus(actor, psi)
            } else {
                ActionType::ShowMinus(actor, psi)
            }
        }
    };
    Action::from_type(ty, &pool.agents).unwrap()
}

/// Every action type instance over the given literals, for every actor.
pub fn all_instances(agents: &[AgentId], literals: &[Literal]) -> Vec<Action> {
    let mut out = Vec::new();
    for actor in agents {
        for l in literals {
            let psi = LiteralConj::try_from(vec![l.clone()]).unwrap();
            let phi = l.to_formula();
            for ty in [
                ActionType::TellPlus(actor.clone(), phi.clone()),
                ActionType::TellMinus(actor.clone(), phi.clone()),
                ActionType::ShowPlus(actor.clone(), psi.clone()),
                ActionType::ShowMinus(actor.clone(), psi.clone()),
            ] {
                out.push(Action::from_type(ty, agents).unwrap());
            }
        }
    }
    out
}
