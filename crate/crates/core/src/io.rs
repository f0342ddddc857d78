//! JSON documents for models and action models.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::action::{ActionModel, ActionStrictness, PointedAction, PostMap};
use crate::error::{Error, Result};
use crate::formula::{is_identifier, AgentId, Atom, PropId};
use crate::kripke::{self, Model, PointedModel, Strictness};
use crate::parser::Registry;

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub agents: Vec<String>,
    pub props: Vec<String>,
    pub worlds: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<[String; 2]>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub agents: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub props: Vec<String>,
    pub events: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<[String; 2]>>,
    pub pre: BTreeMap<String, String>,
    #[serde(default)]
    pub post: BTreeMap<String, BTreeMap<String, bool>>,
    pub point: String,
}

/// A model read from a document, with its point if one was given.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub model: Model,
    pub point: Option<usize>,
}

impl LoadedModel {
    pub fn pointed(self) -> Result<PointedModel> {
        match self.point {
            Some(p) => Ok(self.model.at(p)),
            None => Err(Error::Structure("the model document has no `point`".into())),
        }
    }
}

fn check_names(kind: &str, names: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !is_identifier(n) {
            return Err(Error::Structure(format!("invalid {kind} name `{n}`")));
        }
        if !seen.insert(n) {
            return Err(Error::Structure(format!("duplicate {kind} `{n}`")));
        }
    }
    Ok(())
}

fn check_atom(atom: &Atom, agents: &[AgentId], props: &[PropId]) -> Result<()> {
    if !props.contains(atom.prop()) {
        return Err(Error::Structure(format!("atom `{atom}` uses an undeclared proposition")));
    }
    if let Atom::Obs(o) = atom {
        if !agents.contains(&o.agent) {
            return Err(Error::Structure(format!("atom `{atom}` uses an undeclared agent")));
        }
    }
    Ok(())
}

/// Parses and checks a model document. Observation inconsistency is
/// rejected; frame conditions are left to [`kripke::validate`].
pub fn read_model(text: &str) -> Result<LoadedModel> {
    let doc: ModelDoc = serde_json::from_str(text)?;
    model_from_doc(&doc)
}

pub fn model_from_doc(doc: &ModelDoc) -> Result<LoadedModel> {
    check_names("agent", &doc.agents)?;
    check_names("proposition", &doc.props)?;
    let mut seen = BTreeSet::new();
    for w in &doc.worlds {
        if w.is_empty() || !seen.insert(w) {
            return Err(Error::Structure(format!("empty or duplicate world `{w}`")));
        }
    }
    let agents: Vec<AgentId> = doc.agents.iter().map(|a| AgentId::new(a)).collect();
    let props: Vec<PropId> = doc.props.iter().map(|p| PropId::new(p)).collect();

    let mut builder = Model::builder();
    for a in &agents {
        builder = builder.agent(a.clone());
    }
    for p in &props {
        builder = builder.prop(p.clone());
    }
    for w in doc.valuation.keys() {
        if !seen.contains(w) {
            return Err(Error::Structure(format!("valuation for unknown world `{w}`")));
        }
    }
    for w in &doc.worlds {
        let mut atoms = BTreeSet::new();
        for text in doc.valuation.get(w).into_iter().flatten() {
            let atom: Atom = text.parse()?;
            check_atom(&atom, &agents, &props)?;
            atoms.insert(atom);
        }
        builder = builder.world_atoms(w, atoms);
    }
    for (agent, pairs) in &doc.relations {
        if !doc.agents.contains(agent) {
            return Err(Error::Structure(format!("relation for undeclared agent `{agent}`")));
        }
        for [from, to] in pairs {
            builder = builder.edge(agent.as_str(), from, to);
        }
    }
    let model = builder.build()?;
    if !model.is_obs_consistent() {
        return Err(Error::Structure("a world observes both a literal and its negation".into()));
    }
    let point = match &doc.point {
        Some(p) => {
            Some(model.world_index(p).ok_or_else(|| Error::Structure(format!("unknown point `{p}`")))?)
        }
        None => None,
    };
    Ok(LoadedModel { model, point })
}

pub fn model_to_doc(model: &Model, point: Option<usize>) -> ModelDoc {
    let name = |i: usize| model.worlds()[i].clone();
    ModelDoc {
        agents: model.agents().iter().map(ToString::to_string).collect(),
        props: model.props().iter().map(ToString::to_string).collect(),
        worlds: model.worlds().to_vec(),
        relations: model
            .relations()
            .map(|(a, r)| (a.to_string(), r.pairs().map(|(x, y)| [name(x), name(y)]).collect()))
            .collect(),
        valuation: (0..model.len())
            .map(|w| (name(w), model.valuation(w).iter().map(ToString::to_string).collect()))
            .collect(),
        point: point.map(name),
    }
}

pub fn write_model(model: &Model, point: Option<usize>) -> String {
    serde_json::to_string_pretty(&model_to_doc(model, point)).expect("serialisable")
}

pub fn write_pointed(pm: &PointedModel) -> String {
    write_model(&pm.model, Some(pm.point))
}

/// Parses an action document. Preconditions are parsed against `registry`
/// extended with the document's own `agents` and `props`.
pub fn read_action(text: &str, registry: &Registry) -> Result<PointedAction> {
    let doc: ActionDoc = serde_json::from_str(text)?;
    action_from_doc(&doc, registry)
}

pub fn action_from_doc(doc: &ActionDoc, registry: &Registry) -> Result<PointedAction> {
    check_names("agent", &doc.agents)?;
    check_names("proposition", &doc.props)?;
    let mut reg = registry.clone();
    for a in &doc.agents {
        reg.add_agent(AgentId::new(a));
    }
    for p in &doc.props {
        reg.add_prop(PropId::new(p));
    }
    for e in doc.pre.keys().chain(doc.post.keys()) {
        if !doc.events.contains(e) {
            return Err(Error::Structure(format!("condition for unknown event `{e}`")));
        }
    }
    let mut builder = ActionModel::builder();
    for agent in doc.relations.keys() {
        if !reg.agents().contains(&AgentId::new(agent)) {
            return Err(Error::Structure(format!("relation for undeclared agent `{agent}`")));
        }
        builder = builder.agent(agent.as_str());
    }
    for e in &doc.events {
        let text =
            doc.pre.get(e).ok_or_else(|| Error::Structure(format!("event `{e}` has no precondition")))?;
        let pre = reg.parse(text)?;
        let mut post = PostMap::new();
        for (atom_text, &value) in doc.post.get(e).into_iter().flatten() {
            let atom: Atom = atom_text.parse()?;
            check_atom(&atom, reg.agents(), reg.props())?;
            post.set(atom, value);
        }
        builder = builder.event(e.as_str(), pre, post);
    }
    for (agent, pairs) in &doc.relations {
        for [from, to] in pairs {
            builder = builder.edge(agent.as_str(), from, to);
        }
    }
    let action = builder.build()?;
    action.validate(ActionStrictness::Lenient)?;
    PointedAction::new(action, &doc.point)
}

pub fn action_to_doc(pa: &PointedAction) -> ActionDoc {
    let model = &pa.action;
    let name = |i: usize| model.events()[i].clone();
    let mut agents = BTreeSet::new();
    let mut props = BTreeSet::new();
    for e in 0..model.len() {
        let (a, p) = model.pre(e).vocabulary();
        agents.extend(a.into_iter().map(|a| a.to_string()));
        props.extend(p.into_iter().map(|p| p.to_string()));
        for atom in model.post(e).atoms() {
            props.insert(atom.prop().to_string());
            if let Atom::Obs(o) = atom {
                agents.insert(o.agent.to_string());
            }
        }
    }
    agents.extend(model.agents().iter().map(ToString::to_string));
    ActionDoc {
        agents: agents.into_iter().collect(),
        props: props.into_iter().collect(),
        events: model.events().to_vec(),
        relations: model
            .agents()
            .iter()
            .map(|a| {
                let r = model.relation(a).expect("declared");
                (a.to_string(), r.pairs().map(|(x, y)| [name(x), name(y)]).collect())
            })
            .collect(),
        pre: (0..model.len()).map(|e| (name(e), model.pre(e).to_string())).collect(),
        post: (0..model.len())
            .map(|e| {
                let map = model.post(e).iter().map(|(a, v)| (a.to_string(), v)).collect();
                (name(e), map)
            })
            .collect(),
        point: name(pa.point),
    }
}

pub fn write_action(pa: &PointedAction) -> String {
    serde_json::to_string_pretty(&action_to_doc(pa)).expect("serialisable")
}

/// Validates a loaded model in the given strictness, turning a failed check
/// into an error that names the first violated condition.
pub fn require_valid(model: &Model, strictness: Strictness) -> Result<()> {
    let report = kripke::validate(model, strictness)?;
    if report.valid {
        return Ok(());
    }
    if !report.non_empty {
        return Err(Error::Structure("the model has no worlds".into()));
    }
    if !report.obs_consistent {
        return Err(Error::Invalid("observation consistency fails".into()));
    }
    for (agent, flags) in &report.frames {
        for (ok, name) in
            [(flags.serial, "serial"), (flags.transitive, "transitive"), (flags.euclidean, "Euclidean")]
        {
            if !ok {
                return Err(Error::Invalid(format!("relation of `{agent}` is not {name}")));
            }
        }
    }
    unreachable!("an invalid report names a failing condition")
}
