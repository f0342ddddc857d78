//! Acceptance criteria, one report line each.
//!
//! A criterion that fails is reported as FAIL. The run only aborts when a
//! failure is not backed by a counterexample re-checked with independent
//! code, since that would point at a bug in the checker rather than in the
//! claim under test.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use dlm::explorer::{self, Bounds, FrameClass, Verdict};
use dlm::kripke::{self, evaluate_pointwise, satisfies, validate};
use dlm::reduce::{dynamic_depth, translate};
use dlm::{io, scenario, update};
use dlm::{
    Action, ActionLabel, ActionType, AgentId, Formula, Literal, Model, PointedModel, Registry, Strictness,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

enum Outcome {
    Pass(String),
    /// The claim does not hold; the counterexample was confirmed independently.
    Refuted(String),
    /// The checker disagrees with itself or with expected output.
    Broken(String),
}

fn bounds(n: usize, agents: &[&str], props: &[&str], class: FrameClass) -> Bounds {
    Bounds::new(n, agents.iter().copied(), props.iter().copied(), class)
}

fn registry(agents: &[&str], props: &[&str]) -> Registry {
    Registry::new(agents.iter().copied(), props.iter().copied())
}

fn edges(model: &Model, agent: &str) -> BTreeSet<(String, String)> {
    let names = model.worlds();
    model
        .relation(&AgentId::new(agent))
        .map(|r| r.pairs().map(|(x, y)| (names[x].clone(), names[y].clone())).collect())
        .unwrap_or_default()
}

fn atoms(model: &Model, world: &str) -> BTreeSet<String> {
    let i = model.world_index(world).expect("world exists");
    model.valuation(i).iter().map(ToString::to_string).collect()
}

fn compact(model: &Model, point: Option<usize>) -> String {
    serde_json::to_string(&io::model_to_doc(model, point)).expect("serialisable")
}

fn pairs(list: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    list.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()
}

fn names(list: &[&str]) -> BTreeSet<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Brute-force frame conditions over raw pairs.
fn euclidean(e: &BTreeSet<(String, String)>) -> bool {
    e.iter()
        .all(|(x, y)| e.iter().filter(|(x2, _)| x2 == x).all(|(_, z)| e.contains(&(y.clone(), z.clone()))))
}

fn transitive(e: &BTreeSet<(String, String)>) -> bool {
    e.iter()
        .all(|(x, y)| e.iter().filter(|(y2, _)| y2 == y).all(|(_, z)| e.contains(&(x.clone(), z.clone()))))
}

fn serial(model: &Model, agent: &str) -> bool {
    let e = edges(model, agent);
    model.worlds().iter().all(|w| e.iter().any(|(x, _)| x == w))
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    if elapsed <= limit {
        Outcome::Pass(detail)
    } else {
        Outcome::Broken(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn french_drop() -> Outcome {
    let start = Instant::now();
    let run = Command::new(env!("CARGO_BIN_EXE_dlm")).args(["scenario", "french_drop"]).output();
    let run = match run {
        Ok(r) => r,
        Err(e) => return Outcome::Broken(format!("cannot run dlm: {e}")),
    };
    let stdout = String::from_utf8_lossy(&run.stdout);
    if run.status.code() != Some(0) {
        return Outcome::Broken(format!("scenario exited with {:?}: {stdout}", run.status.code()));
    }
    let fd = scenario::french_drop();
    let mid = update::apply(&fd.initial, fd.first_action.pointed()).expect("executable");
    let end = update::apply(&mid, fd.second_action.pointed()).expect("executable");
    let counts = [fd.initial.model.len(), mid.model.len(), end.model.len()];
    if counts != [3, 4, 2] {
        return Outcome::Broken(format!("world counts {counts:?}"));
    }
    if mid.model.world_index("(v,e)").is_some() || mid.model.world_index("(u,e)").is_some() {
        return Outcome::Broken("(v,e) or (u,e) present".into());
    }
    let posterior = fd.registry.parse(scenario::FRENCH_DROP_POSTERIOR).unwrap();
    if !satisfies(&fd.initial, &posterior) || !evaluate_pointwise(&fd.initial, &posterior) {
        return Outcome::Broken("posterior formula false".into());
    }
    within(start.elapsed(), Duration::from_secs(1), "exit 0, worlds 3 -> 4 -> 2, posterior true".into())
}

fn example_one() -> Outcome {
    let start = Instant::now();
    let ex = scenario::showing_example();
    let f = ex.registry.parse(scenario::SHOWING_FORMULA).unwrap();
    if !satisfies(&ex.initial, &f) || !evaluate_pointwise(&ex.initial, &f) {
        return Outcome::Broken("formula false at w".into());
    }
    let product = update::apply(&ex.initial, ex.action.pointed()).expect("executable");
    let m = &product.model;
    if m.worlds() != ["(w,e)", "(w,f)", "(v,f)"] || product.point_name() != "(w,e)" {
        return Outcome::Broken(format!("worlds {:?}", m.worlds()));
    }
    let expected_atoms = [
        ("(w,e)", names(&["p", "obs(a,p)", "obs(b,~p)"])),
        ("(w,f)", names(&["obs(a,~p)", "obs(b,~p)"])),
        ("(v,f)", names(&["obs(a,~p)", "obs(b,~p)"])),
    ];
    for (w, want) in &expected_atoms {
        if &atoms(m, w) != want {
            return Outcome::Broken(format!("{w} carries {:?}", atoms(m, w)));
        }
    }
    let a = pairs(&[("(w,e)", "(w,e)"), ("(w,f)", "(w,e)"), ("(w,f)", "(w,f)"), ("(v,f)", "(v,f)")]);
    // The drawing omits the b-loop at (w,f), which the product rule forces
    // from w R_b w and f -> f; everything else is as drawn.
    let b = pairs(&[
        ("(w,e)", "(w,f)"),
        ("(w,e)", "(v,f)"),
        ("(w,f)", "(v,f)"),
        ("(w,f)", "(w,f)"),
        ("(v,f)", "(w,f)"),
        ("(v,f)", "(v,f)"),
    ]);
    if edges(m, "a") != a || edges(m, "b") != b {
        return Outcome::Broken(format!("relations a={:?} b={:?}", edges(m, "a"), edges(m, "b")));
    }
    within(start.elapsed(), Duration::from_secs(1), "formula true; 3-world product matches".into())
}

fn axiom_instances() -> Vec<(String, Formula)> {
    let p = Formula::prop("p");
    let q = Formula::prop("q");
    let base = vec![p.clone(), q, Formula::not(p.clone()), Formula::believes("a", p)];
    let imp = Formula::implies;
    let mut out = Vec::new();
    for phi in &base {
        for psi in &base {
            out.push(("CPL1".into(), imp(phi.clone(), imp(psi.clone(), phi.clone()))));
            out.push((
                "CPL3".into(),
                imp(imp(Formula::not(psi.clone()), Formula::not(phi.clone())), imp(phi.clone(), psi.clone())),
            ));
            for chi in &base {
                out.push((
                    "CPL2".into(),
                    imp(
                        imp(phi.clone(), imp(psi.clone(), chi.clone())),
                        imp(imp(phi.clone(), psi.clone()), imp(phi.clone(), chi.clone())),
                    ),
                ));
            }
        }
    }
    for agent in ["a", "b"] {
        for prop in ["p", "q"] {
            out.push((
                "Obs".into(),
                imp(
                    Formula::obs(agent, Literal::pos(prop)),
                    Formula::not(Formula::obs(agent, Literal::neg(prop))),
                ),
            ));
        }
        let bel = |f: Formula| Formula::believes(agent, f);
        for phi in &base {
            for psi in &base {
                out.push((
                    "K".into(),
                    imp(bel(imp(phi.clone(), psi.clone())), imp(bel(phi.clone()), bel(psi.clone()))),
                ));
            }
            out.push(("4".into(), imp(bel(phi.clone()), bel(bel(phi.clone())))));
            out.push(("5".into(), imp(Formula::not(bel(phi.clone())), bel(Formula::not(bel(phi.clone()))))));
            out.push(("D".into(), imp(bel(phi.clone()), Formula::believable(agent, phi.clone()))));
        }
    }
    out
}

/// A countermodel is accepted as genuine only if the independent evaluator
/// agrees and the model is in the observational class.
fn confirm_countermodel(pm: &PointedModel, f: &Formula) -> bool {
    !evaluate_pointwise(pm, f) && validate(&pm.model, Strictness::Observational).unwrap().valid
}

fn check_all(instances: &[(String, Formula)], b: &Bounds) -> std::result::Result<u128, Outcome> {
    let mut checked = 0;
    for (name, f) in instances {
        match explorer::check_validity(f, b) {
            Ok(Verdict::ValidWithinBounds { checked: c }) => checked += c,
            Ok(Verdict::Countermodel(pm)) => {
                let text = format!("{name}: {f}\ncountermodel: {}", compact(&pm.model, Some(pm.point)));
                return Err(if confirm_countermodel(&pm, f) {
                    Outcome::Refuted(text)
                } else {
                    Outcome::Broken(format!("unconfirmed {text}"))
                });
            }
            Err(e) => return Err(Outcome::Broken(format!("{name}: {e}"))),
        }
    }
    Ok(checked)
}

fn table_one() -> Outcome {
    let start = Instant::now();
    let instances = axiom_instances();
    let b = bounds(3, &["a", "b"], &["p", "q"], FrameClass::Observational);
    match check_all(&instances, &b) {
        Ok(checked) => within(
            start.elapsed(),
            Duration::from_secs(600),
            format!("{} instances valid ({checked} candidate models)", instances.len()),
        ),
        Err(o) => o,
    }
}

fn reduction() -> Outcome {
    let start = Instant::now();
    let pool = common::Pool::new(&["a", "b"], &["p", "q"], &["p"]);
    let b = bounds(2, &["a", "b"], &["p", "q"], FrameClass::Observational);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut kinds = BTreeSet::new();
    let mut tested = 0;
    while tested < 200 {
        let f = common::formula(&mut rng, &pool, 5, 2);
        let depth = dynamic_depth(&f);
        if depth == 0 {
            continue;
        }
        assert!(depth <= 2, "generator exceeded depth: {f}");
        collect_kinds(&f, &mut kinds);
        let t = translate(&f);
        if !t.is_static() {
            return Outcome::Broken(format!("translate({f}) is not static: {t}"));
        }
        if translate(&t) != t {
            return Outcome::Broken(format!("translate is not idempotent on {f}"));
        }
        let equiv = Formula::iff(f.clone(), t.clone());
        match explorer::check_validity(&equiv, &b) {
            Ok(Verdict::ValidWithinBounds { .. }) => {}
            Ok(Verdict::Countermodel(pm)) => {
                return Outcome::Broken(format!(
                    "{f} and its translation differ at {}",
                    compact(&pm.model, Some(pm.point))
                ))
            }
            Err(e) => return Outcome::Broken(e.to_string()),
        }
        tested += 1;
    }
    if kinds.len() != 4 {
        return Outcome::Broken(format!("only {kinds:?} action types were sampled"));
    }
    within(
        start.elapsed(),
        Duration::from_secs(600),
        format!("{tested} formulas of dynamic depth 1..=2 over all four action types"),
    )
}

fn collect_kinds(f: &Formula, kinds: &mut BTreeSet<&'static str>) {
    match f {
        Formula::True | Formula::Prop(_) | Formula::Obs(_) => {}
        Formula::Not(g) | Formula::Believes(_, g) => collect_kinds(g, kinds),
        Formula::And(l, r) => {
            collect_kinds(l, kinds);
            collect_kinds(r, kinds);
        }
        Formula::Dyn(act, g) => {
            if let ActionLabel::Type(ty) = act.label() {
                kinds.insert(match **ty {
                    ActionType::TellPlus(..) => "tell+",
                    ActionType::TellMinus(..) => "tell-",
                    ActionType::ShowPlus(..) => "show+",
                    ActionType::ShowMinus(..) => "show-",
                });
            }
            collect_kinds(g, kinds);
        }
    }
}

fn instances_over_p(agents: &[AgentId]) -> Vec<Action> {
    common::all_instances(agents, &[Literal::pos("p"), Literal::neg("p")])
}

fn preservation() -> Outcome {
    let b = bounds(3, &["a", "b"], &["p"], FrameClass::EuclideanTransitive);
    let mut failures = Vec::new();
    let mut total = 0;
    for act in instances_over_p(&b.agents) {
        let res = explorer::find_product_failure(&b, &act.pointed().action, |r| {
            r.all_euclidean() && r.all_transitive()
        });
        let (hit, checked) = match res {
            Ok(x) => x,
            Err(e) => return Outcome::Broken(e.to_string()),
        };
        total += checked;
        if let Some(fail) = hit {
            let product = update::product(&fail.model, &act.pointed().action);
            let bad = fail.model.agents().iter().any(|a| {
                let e = edges(&product, a.as_str());
                !euclidean(&e) || !transitive(&e)
            });
            if !bad {
                return Outcome::Broken(format!("unconfirmed failure for {act}"));
            }
            let et_input = fail.model.agents().iter().all(|a| {
                let e = edges(&fail.model, a.as_str());
                euclidean(&e) && transitive(&e)
            });
            if !et_input {
                return Outcome::Broken(format!("input model for {act} is not Euclidean+transitive"));
            }
            failures.push((act.to_string(), compact(&fail.model, None)));
        }
    }
    if failures.is_empty() {
        Outcome::Pass(format!("16 instances, {total} candidate models"))
    } else {
        let names: Vec<&str> = failures.iter().map(|(a, _)| a.as_str()).collect();
        Outcome::Refuted(format!(
            "{} of 16 instances break the frame conditions: {}\nfirst model for {}: {}",
            failures.len(),
            names.join(", "),
            failures[0].0,
            failures[0].1
        ))
    }
}

fn seriality_witness() -> Outcome {
    let start = Instant::now();
    let b = bounds(3, &["a", "b"], &["p"], FrameClass::Observational);
    for act in instances_over_p(&b.agents) {
        let (hit, _) = match explorer::find_product_failure(&b, &act.pointed().action, |r| r.all_serial()) {
            Ok(x) => x,
            Err(e) => return Outcome::Broken(e.to_string()),
        };
        if let Some(fail) = hit {
            let product = update::product(&fail.model, &act.pointed().action);
            if product.agents().iter().all(|a| serial(&product, a.as_str())) {
                return Outcome::Broken(format!("unconfirmed seriality failure for {act}"));
            }
            return within(
                start.elapsed(),
                Duration::from_secs(300),
                format!("{act} on a {}-world observational model", fail.model.len()),
            );
        }
    }
    Outcome::Broken("no seriality-breaking pair found".into())
}

fn misdirection() -> Outcome {
    let start = Instant::now();
    let reg = registry(&["a", "b"], &["p"]);
    let b = bounds(3, &["a", "b"], &["p"], FrameClass::Observational);
    let claims = [
        ("verbal", "<tell-(a,~p)> B[b] ~p -> ~<tell+(a,p)>(Bhat[b] true & B[b] ~p)"),
        ("visual", "<show-(a,~p)> obs(b,~p) -> ~<show+(a,p)> obs(b,~p)"),
        ("sim_implies_dis", "(Sim(a,b,p) & B[b] ~p & obs(b,~p)) -> Dis(a,b,p)"),
    ];
    let mut refuted = Vec::new();
    for (name, text) in claims {
        let f = reg.parse(text).unwrap();
        match check_all(&[(name.to_string(), f)], &b) {
            Ok(_) => {}
            Err(Outcome::Refuted(why)) => refuted.push(why),
            Err(o) => return o,
        }
    }
    if refuted.is_empty() {
        within(start.elapsed(), Duration::from_secs(600), "verbal, visual and sim-to-dis claims valid".into())
    } else {
        Outcome::Refuted(refuted.join("\n"))
    }
}

fn principles() -> Outcome {
    let start = Instant::now();
    let reg = registry(&["a", "b"], &["p", "q"]);
    let b = bounds(3, &["a", "b"], &["p", "q"], FrameClass::Observational);
    let valid = [
        ("3a", "(obs(a,p) & B[a] obs(a,p)) -> [show+(a,p)](obs(b,p) & B[b] obs(b,p))"),
        ("3b", "(obs(a,~p) & B[a] obs(a,~p)) -> [show-(a,p)](obs(b,p) & B[b] obs(b,p))"),
    ];
    let instances: Vec<_> = valid.iter().map(|(n, t)| (n.to_string(), reg.parse(t).unwrap())).collect();
    if let Err(o) = check_all(&instances, &b) {
        return o;
    }
    let contingent = [
        ("1a", "obs(a,p)", "B[a] obs(a,p)"),
        ("1b", "obs(a,~p)", "B[a] obs(a,~p)"),
        ("2a", "B[a] obs(a,p)", "obs(a,p)"),
        ("2b", "B[a] obs(a,~p)", "obs(a,~p)"),
    ];
    for (name, ante, cons) in contingent {
        let ante = reg.parse(ante).unwrap();
        let cons = reg.parse(cons).unwrap();
        let f = Formula::implies(ante.clone(), cons.clone());
        // The witness must satisfy the antecedent too, so it is not vacuous.
        let strong = Formula::and(ante, cons);
        match explorer::find_witness(&strong, &b) {
            Ok(Some(pm)) if evaluate_pointwise(&pm, &f) => {}
            Ok(_) => return Outcome::Broken(format!("({name}) has no non-vacuous witness")),
            Err(e) => return Outcome::Broken(e.to_string()),
        }
        match explorer::check_validity(&f, &b) {
            Ok(Verdict::Countermodel(pm)) if confirm_countermodel(&pm, &f) => {}
            Ok(_) => return Outcome::Broken(format!("({name}) has no countermodel")),
            Err(e) => return Outcome::Broken(e.to_string()),
        }
    }
    within(
        start.elapsed(),
        Duration::from_secs(600),
        "(3a),(3b) valid; (1a),(1b),(2a),(2b) each have a witness and a countermodel".into(),
    )
}

fn properties() -> Outcome {
    let start = Instant::now();
    let agents = ["a", "b"];

    let b = bounds(2, &agents, &["p"], FrameClass::Observational);
    let actions = instances_over_p(&b.agents);
    let models: Vec<PointedModel> = explorer::enumerate(&b).unwrap().filter(|pm| pm.point == 0).collect();
    for pm in &models {
        for act in &actions {
            let product = update::product(&pm.model, &act.pointed().action);
            if !product.is_obs_consistent() {
                return Outcome::Broken(format!("{act} breaks observation consistency"));
            }
        }
        let text = io::write_model(&pm.model, Some(pm.point));
        match io::read_model(&text) {
            Ok(back) if back.model == pm.model && back.point == Some(pm.point) => {}
            _ => return Outcome::Broken(format!("model file round trip failed:\n{text}")),
        }
    }
    let reg = registry(&agents, &["p", "q"]);
    for act in &actions {
        let text = io::write_action(act.pointed());
        match io::read_action(&text, &reg) {
            Ok(back) if &back == act.pointed() => {}
            _ => return Outcome::Broken(format!("action file round trip failed for {act}")),
        }
    }

    let pool = common::Pool::new(&agents, &["p", "q"], &["p"]);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    for _ in 0..1000 {
        let f = common::formula(&mut rng, &pool, 6, 2);
        match reg.parse(&f.to_string()) {
            Ok(g) if g == f => {}
            _ => return Outcome::Broken(format!("render/parse round trip failed for {f}")),
        }
    }

    let b2 = bounds(2, &agents, &["p", "q"], FrameClass::Observational);
    let mut valid = 0;
    for _ in 0..100 {
        let f = common::static_formula(&mut rng, &pool, 4);
        let neg = Formula::not(f.clone());
        let verdict = explorer::check_validity(&f, &b2).unwrap();
        let witness = explorer::find_witness(&neg, &b2).unwrap();
        match (&verdict, &witness) {
            (Verdict::ValidWithinBounds { .. }, None) => valid += 1,
            (Verdict::Countermodel(cm), Some(w)) if cm == w && !kripke::satisfies(cm, &f) => {}
            _ => return Outcome::Broken(format!("validity and witness search disagree on {f}")),
        }
    }
    within(
        start.elapsed(),
        Duration::from_secs(600),
        format!(
            "{} models x {} actions consistent; round trips exact; duality on 100 formulas ({valid} valid)",
            models.len(),
            actions.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 French Drop end-to-end", french_drop),
        ("2 showing example reproduction", example_one),
        ("3 static axioms valid at 3/2/2", table_one),
        ("4 reduction preserves satisfaction", reduction),
        ("5a Euclidean+transitive preservation", preservation),
        ("5b seriality-breaking witness", seriality_witness),
        ("6 simulation/dissimulation claims", misdirection),
        ("7 observation/belief principles", principles),
        ("8 consistency, round trips, duality", properties),
    ];
    let mut broken = 0;
    let mut refuted = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Outcome::Pass(detail) => println!("PASS  {name} ({secs:.2} s): {detail}"),
            Outcome::Refuted(detail) => {
                refuted += 1;
                println!("FAIL  {name} ({secs:.2} s): counterexample confirmed independently");
                for line in detail.lines() {
                    println!("      {line}");
                }
            }
            Outcome::Broken(detail) => {
                broken += 1;
                println!("FAIL  {name} ({secs:.2} s): {detail}");
            }
        }
    }
    println!("{} criteria, {refuted} refuted by confirmed counterexamples, {broken} broken", criteria.len());
    if broken > 0 {
        std::process::exit(1);
    }
}
