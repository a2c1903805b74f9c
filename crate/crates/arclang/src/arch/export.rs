//! Byte-deterministic renderings of an elaborated architecture: a JSON
//! document for tooling and a Graphviz DOT drawing for humans.

use serde::Serialize;

use crate::sema::CompKind;

use super::{ElaboratedArchitecture, End};

#[derive(Serialize)]
struct EndJson {
    instance: Option<String>,
    port: String,
}

#[derive(Serialize)]
struct ConnectorJson {
    level: Vec<String>,
    source: EndJson,
    target: EndJson,
    origin: String,
    #[serde(rename = "type")]
    msg_type: String,
}

#[derive(Serialize)]
struct InstanceJson {
    path: Vec<String>,
    #[serde(rename = "type")]
    type_name: String,
    kind: String,
}

#[derive(Serialize)]
struct GraphJson {
    root: String,
    instances: Vec<InstanceJson>,
    connectors: Vec<ConnectorJson>,
}

fn end_json(e: &End) -> EndJson {
    EndJson {
        instance: e.instance.clone(),
        port: e.port.clone(),
    }
}

/// Pretty-printed JSON (two-space indent, trailing newline).
pub fn export_json(ea: &ElaboratedArchitecture) -> String {
    let doc = GraphJson {
        root: ea.root_type.clone(),
        instances: ea
            .instances
            .iter()
            .map(|n| InstanceJson {
                path: n.path.clone(),
                type_name: n.type_name.clone(),
                kind: match n.kind {
                    CompKind::Structural => "structural".to_string(),
                    CompKind::Behavioral => "behavioral".to_string(),
                },
            })
            .collect(),
        connectors: ea
            .connectors
            .iter()
            .map(|c| ConnectorJson {
                level: c.level.clone(),
                source: end_json(&c.source),
                target: end_json(&c.target),
                origin: c.origin.as_str().to_string(),
                msg_type: c.msg_type.to_string(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serialization cannot fail");
    s.push('\n');
    s
}

fn node_id(path: &[String]) -> String {
    format!("/{}", path.join("/"))
}

fn cluster_id(path: &[String]) -> String {
    format!("cluster:{}", node_id(path))
}

fn has_children(ea: &ElaboratedArchitecture, path: &[String]) -> bool {
    ea.instances
        .iter()
        .any(|n| n.path.len() == path.len() + 1 && n.path.starts_with(path))
}

/// The drawable node an edge endpoint attaches to. A behavioral instance is
/// its own node; a structural instance is a cluster, so the edge attaches to
/// a node inside it (its first behavioral descendant, or the invisible
/// anchor of a childless branch) and is clipped at the cluster border via
/// `ltail`/`lhead`.
fn representative(ea: &ElaboratedArchitecture, path: &[String]) -> (String, Option<String>) {
    let node = ea
        .instances
        .iter()
        .find(|n| n.path == path)
        .expect("connector ends refer to instantiated components");
    if node.kind == CompKind::Behavioral {
        return (node_id(path), None);
    }
    if let Some(leaf) = ea
        .instances
        .iter()
        .find(|n| n.kind == CompKind::Behavioral && n.path.starts_with(path))
    {
        return (node_id(&leaf.path), Some(cluster_id(path)));
    }
    // Only pass-through dummies below here; attach to the first one's anchor.
    let end = ea
        .instances
        .iter()
        .find(|n| n.path.starts_with(path) && !has_children(ea, &n.path))
        .expect("every branch of the instance tree terminates");
    (
        format!("{}/.anchor", node_id(&end.path)),
        Some(cluster_id(path)),
    )
}

fn write_instance(ea: &ElaboratedArchitecture, idx: usize, out: &mut String, depth: usize) {
    let node = &ea.instances[idx];
    let pad = "  ".repeat(depth);
    let label = match node.path.last() {
        Some(name) => format!("{name} : {}", node.type_name),
        None => node.type_name.clone(),
    };
    match node.kind {
        CompKind::Behavioral => {
            out.push_str(&format!(
                "{pad}\"{}\" [label=\"{label}\"];\n",
                node_id(&node.path)
            ));
        }
        CompKind::Structural => {
            out.push_str(&format!(
                "{pad}subgraph \"{}\" {{\n",
                cluster_id(&node.path)
            ));
            out.push_str(&format!("{pad}  label=\"{label}\";\n"));
            let depth_here = node.path.len();
            let mut any_child = false;
            for (ci, child) in ea.instances.iter().enumerate() {
                if child.path.len() == depth_here + 1 && child.path.starts_with(&node.path) {
                    any_child = true;
                    write_instance(ea, ci, out, depth + 1);
                }
            }
            if !any_child {
                // Connect-only dummy: give edges something to attach to.
                out.push_str(&format!(
                    "{pad}  \"{}/.anchor\" [style=invis, label=\"\"];\n",
                    node_id(&node.path)
                ));
            }
            out.push_str(&format!("{pad}}}\n"));
        }
    }
}

/// Graphviz DOT rendering: one box per behavioral instance, one cluster per
/// structural instance, one labeled edge per connector (dashed when derived
/// by autoconnect).
pub fn export_dot(ea: &ElaboratedArchitecture) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph \"{}\" {{\n", ea.root_type));
    out.push_str("  compound=true;\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=box];\n");
    write_instance(ea, 0, &mut out, 1);
    for c in &ea.connectors {
        let mut src_path = c.level.clone();
        if let Some(i) = &c.source.instance {
            src_path.push(i.clone());
        }
        let mut tgt_path = c.level.clone();
        if let Some(i) = &c.target.instance {
            tgt_path.push(i.clone());
        }
        let (src_node, ltail) = representative(ea, &src_path);
        let (tgt_node, lhead) = representative(ea, &tgt_path);
        let mut attrs = vec![format!(
            "label=\"{} -> {} : {}\"",
            c.source.port, c.target.port, c.msg_type
        )];
        if c.origin == super::Origin::Auto {
            attrs.push("style=dashed".to_string());
        }
        if let Some(t) = ltail {
            attrs.push(format!("ltail=\"{t}\""));
        }
        if let Some(h) = lhead {
            attrs.push(format!("lhead=\"{h}\""));
        }
        out.push_str(&format!(
            "  \"{src_node}\" -> \"{tgt_node}\" [{}];\n",
            attrs.join(", ")
        ));
    }
    out.push_str("}\n");
    out
}
