//! Instance-tree construction: depth-first expansion of a root component
//! type into absolute instance paths.

use crate::diag::{self, Diagnostic, SourcePos};
use crate::sema::{CheckedModel, CompKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceNode {
    /// Instance names from the root; empty for the root itself.
    pub path: Vec<String>,
    pub type_name: String,
    pub kind: CompKind,
}

/// Expand `root_type` into a preorder list of instance nodes. Subcomponent
/// order follows declaration order. Unknown types and recursive containment
/// are reported; the offending branches are not expanded.
pub fn build_instance_tree(
    root_type: &str,
    model: &CheckedModel,
) -> Result<Vec<InstanceNode>, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut nodes = Vec::new();
    let Some(root) = model.component(root_type) else {
        return Err(vec![Diagnostic::error(
            diag::E0301,
            SourcePos::dummy(),
            format!("unknown component type `{root_type}`"),
        )]);
    };
    nodes.push(InstanceNode {
        path: Vec::new(),
        type_name: root_type.to_string(),
        kind: root.kind,
    });
    let mut stack = vec![root_type.to_string()];
    expand(
        root_type,
        &Vec::new(),
        model,
        &mut stack,
        &mut nodes,
        &mut diags,
    );
    if diags.is_empty() {
        Ok(nodes)
    } else {
        Err(diags)
    }
}

fn expand(
    type_name: &str,
    path: &[String],
    model: &CheckedModel,
    stack: &mut Vec<String>,
    nodes: &mut Vec<InstanceNode>,
    diags: &mut Vec<Diagnostic>,
) {
    let rc = model
        .component(type_name)
        .expect("expand called with known type");
    for sub in &rc.subcomponents {
        let Some(child) = model.component(&sub.type_name) else {
            diags.push(Diagnostic::error(
                diag::E0301,
                sub.pos.clone(),
                format!("unknown subcomponent type `{}`", sub.type_name),
            ));
            continue;
        };
        if stack.contains(&sub.type_name) {
            let mut cycle = stack.clone();
            cycle.push(sub.type_name.clone());
            diags.push(Diagnostic::error(
                diag::E0302,
                sub.pos.clone(),
                format!("recursive component containment: {}", cycle.join(" -> ")),
            ));
            continue;
        }
        let mut child_path = path.to_vec();
        child_path.push(sub.instance_name.clone());
        nodes.push(InstanceNode {
            path: child_path.clone(),
            type_name: sub.type_name.clone(),
            kind: child.kind,
        });
        stack.push(sub.type_name.clone());
        expand(&sub.type_name, &child_path, model, stack, nodes, diags);
        stack.pop();
    }
}
