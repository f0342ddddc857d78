//! Elimination of dynamic modalities by reduction axioms.
//!
//! `translate` rewrites innermost boxes first. Once the body of a box is
//! static, the box is pushed through negation, conjunction and belief until
//! it meets an atom, where it is replaced by the event's precondition and the
//! atom's post-value.

use crate::action::ActionModel;
use crate::formula::{Atom, Formula};

/// An equivalent formula without dynamic modalities.
///
/// Preconditions copied into the result are translated as well, so the output
/// is static even when an action's precondition mentions another action.
pub fn translate(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::Prop(_) | Formula::Obs(_) => f.clone(),
        Formula::Not(g) => Formula::not(translate(g)),
        Formula::And(l, r) => Formula::and(translate(l), translate(r)),
        Formula::Believes(a, g) => Formula::believes(a.clone(), translate(g)),
        Formula::Dyn(act, g) => {
            let body = translate(g);
            let pa = act.pointed();
            let mut reducer = Reducer { model: &pa.action, pre: vec![None; pa.action.len()] };
            reducer.push(pa.point, &body)
        }
    }
}

struct Reducer<'a> {
    model: &'a ActionModel,
    /// Translated preconditions, filled on first use.
    pre: Vec<Option<Formula>>,
}

impl Reducer<'_> {
    fn pre(&mut self, e: usize) -> Formula {
        if self.pre[e].is_none() {
            self.pre[e] = Some(translate(self.model.pre(e)));
        }
        self.pre[e].clone().expect("filled")
    }

    /// `[A,e] body` for a static `body`.
    fn push(&mut self, e: usize, body: &Formula) -> Formula {
        match body {
            Formula::True => Formula::implies(self.pre(e), Formula::True),
            Formula::Prop(p) => self.atom(e, Atom::Prop(p.clone())),
            Formula::Obs(o) => self.atom(e, Atom::Obs(o.clone())),
            Formula::Not(g) => {
                let inner = self.push(e, g);
                Formula::implies(self.pre(e), Formula::not(inner))
            }
            Formula::And(l, r) => Formula::and(self.push(e, l), self.push(e, r)),
            Formula::Believes(a, g) => {
                let successors: Vec<usize> = match self.model.relation(a) {
                    Some(r) => r.successors(e).to_vec(),
                    None => Vec::new(),
                };
                let parts: Vec<Formula> =
                    successors.into_iter().map(|f| Formula::believes(a.clone(), self.push(f, g))).collect();
                Formula::implies(self.pre(e), Formula::conj(parts))
            }
            Formula::Dyn(..) => unreachable!("body is translated before reduction"),
        }
    }

    fn atom(&mut self, e: usize, atom: Atom) -> Formula {
        let value = match self.model.post(e).get(&atom) {
            Some(true) => Formula::True,
            Some(false) => Formula::falsum(),
            None => atom.to_formula(),
        };
        Formula::implies(self.pre(e), value)
    }
}

/// Deepest nesting of dynamic modalities, counting those inside preconditions.
pub fn dynamic_depth(f: &Formula) -> usize {
    match f {
        Formula::True | Formula::Prop(_) | Formula::Obs(_) => 0,
        Formula::Not(g) | Formula::Believes(_, g) => dynamic_depth(g),
        Formula::And(l, r) => dynamic_depth(l).max(dynamic_depth(r)),
        Formula::Dyn(act, g) => {
            let model = &act.pointed().action;
            let pre = (0..model.len()).map(|e| dynamic_depth(model.pre(e))).max().unwrap_or(0);
            1 + dynamic_depth(g).max(pre)
        }
    }
}

/// Bottom-up boolean cleanup: constant folding, double negation and
/// `B[a] true`. Preserves satisfaction on every model.
pub fn simplify(f: &Formula) -> Formula {
    let falsum = Formula::falsum();
    match f {
        Formula::True | Formula::Prop(_) | Formula::Obs(_) => f.clone(),
        Formula::Not(g) => match simplify(g) {
            Formula::Not(h) => *h,
            other => Formula::not(other),
        },
        Formula::And(l, r) => {
            let (l, r) = (simplify(l), simplify(r));
            if l == falsum || r == falsum {
                falsum
            } else if l == Formula::True {
                r
            } else if r == Formula::True || l == r {
                l
            } else {
                Formula::and(l, r)
            }
        }
        Formula::Believes(a, g) => match simplify(g) {
            Formula::True => Formula::True,
            other => Formula::believes(a.clone(), other),
        },
        Formula::Dyn(act, g) => Formula::boxed(act.clone(), simplify(g)),
    }
}
