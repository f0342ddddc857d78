//! Product update of a model by an action model.

use std::collections::BTreeSet;

use crate::action::{ActionModel, PointedAction};
use crate::formula::{AgentId, Atom, PropId};
use crate::kripke::{self, FrameReport, Model, PointedModel, Relation, Strictness};

/// `M ⊗ A`: pairs `(w,e)` with `pre(e)` true at `w`, listed world-major.
///
/// The result may have no worlds at all; check [`Model::is_empty`] before
/// treating it as a model proper.
pub fn product(model: &Model, action: &ActionModel) -> Model {
    let pre: Vec<Vec<bool>> = (0..action.len()).map(|e| kripke::extension(model, action.pre(e))).collect();
    assemble(model, action, &pre)
}

/// Builds the product from precomputed precondition extensions
/// (`pre[e][w]` iff `pre(e)` holds at `w`).
pub(crate) fn assemble(model: &Model, action: &ActionModel, pre: &[Vec<bool>]) -> Model {
    let ne = action.len();
    let mut index = vec![None; model.len() * ne];
    let mut pairs = Vec::new();
    for w in 0..model.len() {
        for e in 0..ne {
            if pre[e][w] {
                index[w * ne + e] = Some(pairs.len());
                pairs.push((w, e));
            }
        }
    }

    let mut agents: Vec<AgentId> = model.agents().to_vec();
    for a in action.agents() {
        if !agents.contains(a) {
            agents.push(a.clone());
        }
    }
    let mut props: Vec<PropId> = model.props().to_vec();
    for e in 0..ne {
        for atom in action.post(e).atoms() {
            if !props.contains(atom.prop()) {
                props.push(atom.prop().clone());
            }
        }
    }

    let relations = agents
        .iter()
        .map(|a| {
            let mut r = Relation::new(pairs.len());
            if let (Some(rm), Some(ra)) = (model.relation(a), action.relation(a)) {
                for (i, &(w, e)) in pairs.iter().enumerate() {
                    for &v in rm.successors(w) {
                        for &f in ra.successors(e) {
                            if let Some(j) = index[v * ne + f] {
                                r.insert(i, j);
                            }
                        }
                    }
                }
            }
            r
        })
        .collect();

    let worlds =
        pairs.iter().map(|&(w, e)| format!("({},{})", model.worlds()[w], action.events()[e])).collect();
    let valuation = pairs
        .iter()
        .map(|&(w, e)| {
            let mut atoms: BTreeSet<Atom> = model.valuation(w).clone();
            for (atom, value) in action.post(e).iter() {
                if value {
                    atoms.insert(atom.clone());
                } else {
                    atoms.remove(atom);
                }
            }
            atoms
        })
        .collect();

    Model::from_parts(agents, props, worlds, relations, valuation)
}

/// `((M ⊗ A), (w,e))` if the action is executable at the point.
pub fn apply(pm: &PointedModel, pa: &PointedAction) -> Option<PointedModel> {
    if !kripke::satisfies(pm, pa.precondition()) {
        return None;
    }
    Some(force(pm, pa))
}

/// The product pointed at `(w,e)`, or at its first world when `(w,e)` did not
/// survive. `None` only if the product is empty.
pub fn apply_forced(pm: &PointedModel, pa: &PointedAction) -> Option<PointedModel> {
    let product = product(&pm.model, &pa.action);
    if product.is_empty() {
        return None;
    }
    let name = format!("({},{})", pm.point_name(), pa.point_name());
    let point = product.world_index(&name).unwrap_or(0);
    Some(PointedModel { model: product, point })
}

fn force(pm: &PointedModel, pa: &PointedAction) -> PointedModel {
    apply_forced(pm, pa).expect("executable action leaves its own pair")
}

/// Frame reports of the model and of its product, both in relational
/// strictness.
pub fn preservation_report(model: &Model, action: &ActionModel) -> (FrameReport, FrameReport) {
    let before = kripke::validate(model, Strictness::Relational).expect("infallible");
    let after = kripke::validate(&product(model, action), Strictness::Relational).expect("infallible");
    (before, after)
}
