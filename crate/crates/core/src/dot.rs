//! Graphviz output. Worlds are circles (the point doubled), events are boxes
//! (the point with a second border), and parallel edges of several agents
//! share one arrow labelled with all their names.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::action::PointedAction;
use crate::kripke::Model;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn merged_edges<'a>(
    relations: impl Iterator<Item = (String, Vec<(usize, usize)>)> + 'a,
) -> BTreeMap<(usize, usize), Vec<String>> {
    let mut edges: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    for (agent, pairs) in relations {
        for pair in pairs {
            edges.entry(pair).or_default().push(agent.clone());
        }
    }
    edges
}

pub fn model_to_dot(model: &Model, point: Option<usize>) -> String {
    let mut out = String::from("digraph model {\n  node [shape=circle];\n");
    for (i, w) in model.worlds().iter().enumerate() {
        let atoms: Vec<String> = model.valuation(i).iter().map(ToString::to_string).collect();
        let label = format!("{w}\n{}", atoms.join(", "));
        let shape = if point == Some(i) { ", shape=doublecircle" } else { "" };
        writeln!(out, "  {} [label={}{shape}];", quote(w), quote(&label)).unwrap();
    }
    let edges = merged_edges(model.relations().map(|(a, r)| (a.to_string(), r.pairs().collect())));
    for ((x, y), agents) in edges {
        let (x, y) = (&model.worlds()[x], &model.worlds()[y]);
        writeln!(out, "  {} -> {} [label={}];", quote(x), quote(y), quote(&agents.join(","))).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn action_to_dot(pa: &PointedAction) -> String {
    let model = &pa.action;
    let mut out = String::from("digraph action {\n  node [shape=box];\n");
    for (i, e) in model.events().iter().enumerate() {
        let post: Vec<String> = model.post(i).iter().map(|(a, v)| format!("{a}:={v}")).collect();
        let label = format!("{e}\npre: {}\npost: {}", model.pre(i), post.join(", "));
        let border = if i == pa.point { ", peripheries=2" } else { "" };
        writeln!(out, "  {} [label={}{border}];", quote(e), quote(&label)).unwrap();
    }
    let relations = model.agents().iter().map(|a| {
        let pairs = model.relation(a).map(|r| r.pairs().collect()).unwrap_or_default();
        (a.to_string(), pairs)
    });
    for ((x, y), agents) in merged_edges(relations) {
        let (x, y) = (&model.events()[x], &model.events()[y]);
        writeln!(out, "  {} -> {} [label={}];", quote(x), quote(y), quote(&agents.join(","))).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario;

    #[test]
    fn model_graph_marks_point_and_merges_labels() {
        let fd = scenario::french_drop();
        let dot = model_to_dot(&fd.initial.model, Some(fd.initial.point));
        assert!(dot.contains("\"w\" [label=\"w\\nl, obs(a,l), obs(a,~r)\", shape=doublecircle];"));
        assert!(dot.contains("\"v\" -> \"v\" [label=\"a,b\"];"));
        assert!(dot.contains("\"w\" -> \"v\" [label=\"b\"];"));
        assert_eq!(dot.matches("doublecircle").count(), 1);
    }

    #[test]
    fn action_graph_uses_boxes() {
        let fd = scenario::french_drop();
        let dot = action_to_dot(fd.first_action.pointed());
        assert!(dot.contains("node [shape=box]"));
        assert!(dot.contains("peripheries=2"));
        assert!(dot.contains("\"f\" -> \"e\" [label=\"a\"];"));
        assert!(dot.contains("\"f\" -> \"f\" [label=\"a,b\"];"));
    }
}
