//! Architecture elaboration: expands a checked model into an instance tree,
//! materializes every connector (written or derived), validates the wiring
//! rules, and flattens the result into a routing table for execution.

pub mod connectors;
pub mod export;
pub mod flatten;
pub mod tree;

pub use connectors::{Connector, End, Origin};
pub use export::{export_dot, export_json};
pub use flatten::{Dest, PortLoc, RoutingTable};
pub use tree::InstanceNode;

use crate::diag::{sort_diagnostics, Diagnostic};
use crate::sema::{CheckedModel, CompKind};

/// A fully wired architecture rooted at one component type.
#[derive(Debug, Clone)]
pub struct ElaboratedArchitecture {
    pub root_type: String,
    /// Preorder instance tree; the first entry is the root (empty path).
    pub instances: Vec<InstanceNode>,
    /// All connectors, grouped by declaring level in tree preorder.
    pub connectors: Vec<Connector>,
    pub routing: RoutingTable,
    /// Non-fatal findings (unconnected ports).
    pub warnings: Vec<Diagnostic>,
}

/// Expand, wire, validate, and flatten the architecture under `root_type`.
/// On failure the error list also carries any warnings gathered before the
/// failure, already sorted.
pub fn elaborate(
    root_type: &str,
    model: &CheckedModel,
) -> Result<ElaboratedArchitecture, Vec<Diagnostic>> {
    let instances = tree::build_instance_tree(root_type, model)?;
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut all = Vec::new();
    for node in &instances {
        if node.kind != CompKind::Structural {
            continue;
        }
        let rc = model
            .component(&node.type_name)
            .expect("instance tree only references declared components");
        let mut level = connectors::collect_explicit(&node.path, rc, model, &mut errors);
        let auto = connectors::autoconnect(&node.path, rc, model, &level, &mut errors);
        level.extend(auto);
        connectors::validate_connectors(rc, model, &level, &mut errors, &mut warnings);
        all.extend(level);
    }
    if !errors.is_empty() {
        errors.extend(warnings);
        sort_diagnostics(&mut errors);
        return Err(errors);
    }
    let routing = match flatten::flatten(model, &instances, &all) {
        Ok(r) => r,
        Err(mut errs) => {
            errs.extend(warnings);
            sort_diagnostics(&mut errs);
            return Err(errs);
        }
    };
    sort_diagnostics(&mut warnings);
    Ok(ElaboratedArchitecture {
        root_type: root_type.to_string(),
        instances,
        connectors: all,
        routing,
        warnings,
    })
}
