//! Static information-flow graph over declared components.
//!
//! Edges point in the direction data moves. A pull moves data from the
//! pulled component to the puller, since pulls carry no arguments.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::spec::{Activation, ComponentName, DeclKind, Declaration, Specification};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Publish,
    Pull,
    Command,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Publish => "publish",
            EdgeKind::Pull => "pull",
            EdgeKind::Command => "command",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: ComponentName,
    pub to: ComponentName,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlowGraph {
    pub nodes: BTreeMap<ComponentName, DeclKind>,
    /// Ordered by (from, to, kind).
    pub edges: BTreeSet<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a node of the flow graph")]
pub struct NotFound(pub String);

impl NotFound {
    pub fn code(&self) -> &'static str {
        "NOT_FOUND"
    }
}

pub fn build_flow_graph(spec: &Specification) -> FlowGraph {
    let mut g = FlowGraph::default();
    for d in &spec.declarations {
        g.nodes.entry(d.name().clone()).or_insert(d.kind());
    }
    let mut add = |from: &ComponentName, to: &ComponentName, kind| {
        if g.nodes.contains_key(from) && g.nodes.contains_key(to) {
            g.edges.insert(Edge {
                from: from.clone(),
                to: to.clone(),
                kind,
            });
        }
    };
    for d in &spec.declarations {
        match d {
            Declaration::Context { name, contract, .. } => {
                if let Activation::WhenProvided(trigger) = &contract.activation {
                    add(trigger, name, EdgeKind::Publish);
                }
                if let Some(target) = &contract.get {
                    add(target, name, EdgeKind::Pull);
                }
            }
            Declaration::Controller {
                name,
                trigger,
                action,
            } => {
                add(trigger, name, EdgeKind::Publish);
                add(name, action, EdgeKind::Command);
            }
            Declaration::Source { .. } | Declaration::Action { .. } => {}
        }
    }
    g
}

/// Sources from which `name` is reachable along directed edges. A source is
/// its own ancestor.
pub fn source_ancestors(g: &FlowGraph, name: &str) -> Result<BTreeSet<ComponentName>, NotFound> {
    let start = g
        .nodes
        .get_key_value(name)
        .map(|(k, _)| k)
        .ok_or_else(|| NotFound(name.to_owned()))?;

    let mut preds: BTreeMap<&ComponentName, Vec<&ComponentName>> = BTreeMap::new();
    for e in &g.edges {
        preds.entry(&e.to).or_default().push(&e.from);
    }

    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        for &p in preds.get(n).into_iter().flatten() {
            if seen.insert(p) {
                queue.push_back(p);
            }
        }
    }
    Ok(seen
        .into_iter()
        .filter(|n| g.nodes[*n] == DeclKind::Source)
        .cloned()
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown export format `{other}`")),
        }
    }
}

fn shape(kind: DeclKind) -> &'static str {
    match kind {
        DeclKind::Source | DeclKind::Action => "box",
        DeclKind::Context => "ellipse",
        DeclKind::Controller => "diamond",
    }
}

#[derive(Serialize)]
struct JsonNode<'a> {
    name: &'a str,
    kind: &'static str,
}

#[derive(Serialize)]
struct JsonEdge<'a> {
    from: &'a str,
    to: &'a str,
    kind: EdgeKind,
}

#[derive(Serialize)]
struct JsonGraph<'a> {
    nodes: Vec<JsonNode<'a>>,
    edges: Vec<JsonEdge<'a>>,
}

pub fn export(g: &FlowGraph, format: ExportFormat) -> String {
    match format {
        ExportFormat::Dot => {
            let mut out = String::from("digraph flow {\n");
            for (name, kind) in &g.nodes {
                let _ = writeln!(out, "  \"{name}\" [shape={}];", shape(*kind));
            }
            for e in &g.edges {
                let style = if e.kind == EdgeKind::Pull {
                    ", style=dashed"
                } else {
                    ""
                };
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"{}\"{style}];",
                    e.from,
                    e.to,
                    e.kind.as_str()
                );
            }
            out.push_str("}\n");
            out
        }
        ExportFormat::Json => {
            let doc = JsonGraph {
                nodes: g
                    .nodes
                    .iter()
                    .map(|(name, kind)| JsonNode {
                        name: name.as_str(),
                        kind: kind.as_str(),
                    })
                    .collect(),
                edges: g
                    .edges
                    .iter()
                    .map(|e| JsonEdge {
                        from: e.from.as_str(),
                        to: e.to.as_str(),
                        kind: e.kind,
                    })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
            s.push('\n');
            s
        }
    }
}
