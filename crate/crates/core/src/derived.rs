//! Builders for notions defined on top of the core language: epistemic and
//! strong observation, strong belief, simulation, dissimulation and surprise.
//!
//! Builders that mention actions need the agent registry, since an action's
//! audience is everyone except its actor.

use crate::action::{ActionType, LiteralConj};
use crate::error::{Error, Result};
use crate::formula::{Action, AgentId, Formula, Literal, PropId};

/// `O_a l := o_a(l) & B_a o_a(l)`
pub fn epistemic_obs(a: &AgentId, l: &Literal) -> Formula {
    let seen = Formula::obs(a.clone(), l.clone());
    Formula::and(seen.clone(), Formula::believes(a.clone(), seen))
}

fn diamond(ty: ActionType, agents: &[AgentId], body: Formula) -> Result<Formula> {
    Ok(Formula::diamond(Action::from_type(ty, agents)?, body))
}

fn actors<'a>(agents: &'a [AgentId], b: &'a AgentId) -> Result<Vec<&'a AgentId>> {
    if !agents.contains(b) {
        return Err(Error::ActionType(format!("unknown agent `{b}`")));
    }
    let actors: Vec<&AgentId> = agents.iter().filter(|a| *a != b).collect();
    if actors.is_empty() {
        return Err(Error::ActionType(format!("no agent other than `{b}`")));
    }
    Ok(actors)
}

fn distinct(a: &AgentId, b: &AgentId) -> Result<()> {
    if a == b {
        return Err(Error::ActionType(format!("actor and addressee are both `{a}`")));
    }
    Ok(())
}

/// `O_b l` supported by a truthful verbal or visual action of some other agent.
pub fn strong_epistemic_obs(agents: &[AgentId], b: &AgentId, l: &Literal) -> Result<Formula> {
    let believed = Formula::believes(b.clone(), l.to_formula());
    let mut disjuncts = Vec::new();
    for a in actors(agents, b)? {
        let payload = LiteralConj::try_from(vec![l.clone()])?;
        disjuncts.push(diamond(ActionType::TellPlus(a.clone(), l.to_formula()), agents, believed.clone())?);
        disjuncts.push(diamond(ActionType::ShowPlus(a.clone(), payload), agents, believed.clone())?);
    }
    Ok(Formula::and(epistemic_obs(b, l), Formula::disj(disjuncts)))
}

/// Reads `f` as a conjunction of literals over distinct propositions.
pub fn as_literal_conj(f: &Formula) -> Option<LiteralConj> {
    fn collect(f: &Formula, out: &mut Vec<Literal>) -> bool {
        match f {
            Formula::Prop(p) => {
                out.push(Literal::pos(p.clone()));
                true
            }
            Formula::Not(g) => match g.as_ref() {
                Formula::Prop(p) => {
                    out.push(Literal::neg(p.clone()));
                    true
                }
                _ => false,
            },
            Formula::And(l, r) => collect(l, out) && collect(r, out),
            _ => false,
        }
    }
    let mut lits = Vec::new();
    if !collect(f, &mut lits) {
        return None;
    }
    LiteralConj::try_from(lits).ok()
}

/// `B_b f` supported by a truthful action of another agent. The visual
/// disjunct is only present when `f` is a conjunction of literals.
pub fn strong_belief(agents: &[AgentId], b: &AgentId, f: &Formula) -> Result<Formula> {
    let believed = Formula::believes(b.clone(), f.clone());
    let visual = as_literal_conj(f);
    let mut disjuncts = Vec::new();
    for a in actors(agents, b)? {
        disjuncts.push(diamond(ActionType::TellPlus(a.clone(), f.clone()), agents, believed.clone())?);
        if let Some(psi) = &visual {
            disjuncts.push(diamond(ActionType::ShowPlus(a.clone(), psi.clone()), agents, believed.clone())?);
        }
    }
    Ok(Formula::and(believed, Formula::disj(disjuncts)))
}

/// `a` simulates `~p` to `b`: a lie or a bogus demonstration that succeeds.
pub fn sim(agents: &[AgentId], a: &AgentId, b: &AgentId, p: &PropId) -> Result<Formula> {
    distinct(a, b)?;
    let p_f = Formula::prop(p.clone());
    let not_p = Formula::not(p_f.clone());
    let verbal = Formula::and(
        Formula::believes(a.clone(), p_f),
        diamond(
            ActionType::TellMinus(a.clone(), not_p.clone()),
            agents,
            Formula::believes(b.clone(), not_p),
        )?,
    );
    let visual = Formula::and(
        Formula::obs(a.clone(), Literal::pos(p.clone())),
        diamond(
            ActionType::ShowMinus(a.clone(), LiteralConj::try_from(vec![Literal::neg(p.clone())])?),
            agents,
            Formula::obs(b.clone(), Literal::neg(p.clone())),
        )?,
    );
    Ok(Formula::or(verbal, visual))
}

/// Visual simulation of a literal conjunction `psi`: `a` sees the opposite of
/// every literal and the bogus demonstration makes `b` see `psi`.
pub fn sim_visual_literals(
    agents: &[AgentId],
    a: &AgentId,
    b: &AgentId,
    psi: &LiteralConj,
) -> Result<Formula> {
    distinct(a, b)?;
    let seen = Formula::conj(psi.literals().iter().map(|l| Formula::obs(a.clone(), l.negate())));
    let shown = Formula::conj(psi.literals().iter().map(|l| Formula::obs(b.clone(), l.clone())));
    Ok(Formula::and(seen, diamond(ActionType::ShowMinus(a.clone(), psi.clone()), agents, shown)?))
}

/// `a` dissimulates `p` to `b`: `b` is wrong about `p` and the truthful
/// action that would leave `b` wrong is not available.
pub fn dis(agents: &[AgentId], a: &AgentId, b: &AgentId, p: &PropId) -> Result<Formula> {
    distinct(a, b)?;
    let p_f = Formula::prop(p.clone());
    let not_p = Formula::not(p_f.clone());
    let b_not_p = Formula::believes(b.clone(), not_p);
    let verbal = Formula::conj([
        Formula::believes(a.clone(), p_f.clone()),
        b_not_p.clone(),
        Formula::not(diamond(ActionType::TellPlus(a.clone(), p_f), agents, b_not_p)?),
    ]);
    let b_sees_not_p = Formula::obs(b.clone(), Literal::neg(p.clone()));
    let visual = Formula::conj([
        Formula::obs(a.clone(), Literal::pos(p.clone())),
        b_sees_not_p.clone(),
        Formula::not(diamond(
            ActionType::ShowPlus(a.clone(), LiteralConj::try_from(vec![Literal::pos(p.clone())])?),
            agents,
            b_sees_not_p,
        )?),
    ]);
    Ok(Formula::or(verbal, visual))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SurpriseKind {
    /// `~B_a p & p`
    Mismatch,
    /// `B_a ~p & p`
    StrongMismatch,
    /// `p & ~B_a p & ~B_a ~p`
    Astonishment,
}

pub fn surprise(kind: SurpriseKind, a: &AgentId, p: &PropId) -> Formula {
    let p_f = Formula::prop(p.clone());
    let believes_p = Formula::believes(a.clone(), p_f.clone());
    let believes_not_p = Formula::believes(a.clone(), Formula::not(p_f.clone()));
    match kind {
        SurpriseKind::Mismatch => Formula::and(Formula::not(believes_p), p_f),
        SurpriseKind::StrongMismatch => Formula::and(believes_not_p, p_f),
        SurpriseKind::Astonishment => {
            Formula::conj([p_f, Formula::not(believes_p), Formula::not(believes_not_p)])
        }
    }
}
