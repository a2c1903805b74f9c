//! Flattening of the hierarchical connector structure into a routing table
//! over absolute instance paths. Message routing at run time never crosses
//! levels one hop at a time; it jumps straight from an origin port to the
//! behavioral in-ports (or system boundary out-ports) it can reach.

use indexmap::IndexMap;

use crate::diag::{self, Diagnostic};
use crate::sema::{CheckedModel, CompKind};
use crate::syntax::ast::Direction;

use super::connectors::Connector;
use super::tree::InstanceNode;

/// An absolute port location: the instance path from the root (empty for the
/// root component itself) plus a port name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortLoc {
    pub instance: Vec<String>,
    pub port: String,
}

impl PortLoc {
    pub fn new(instance: &[String], port: &str) -> Self {
        PortLoc {
            instance: instance.to_vec(),
            port: port.to_string(),
        }
    }

    pub fn display(&self) -> String {
        if self.instance.is_empty() {
            self.port.clone()
        } else {
            format!("{}.{}", self.instance.join("."), self.port)
        }
    }
}

/// Where a routed message ultimately lands.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dest {
    /// An in-port of a behavioral leaf instance.
    LeafIn(PortLoc),
    /// An out-port of the root component: the message leaves the system.
    SystemOut(String),
}

/// Routes from every origin port to the destinations it reaches. Origins are
/// the root component's in-ports and every behavioral leaf's out-ports; a
/// port with no path to any destination maps to an empty list.
#[derive(Debug, Clone, Default)]
pub struct RoutingTable {
    pub routes: IndexMap<PortLoc, Vec<Dest>>,
}

impl RoutingTable {
    pub fn destinations(&self, origin: &PortLoc) -> &[Dest] {
        self.routes.get(origin).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn abs(level: &[String], instance: &Option<String>) -> Vec<String> {
    let mut path = level.to_vec();
    if let Some(i) = instance {
        path.push(i.clone());
    }
    path
}

struct Flattener<'a> {
    model: &'a CheckedModel,
    /// instance path -> (type name, kind)
    kinds: IndexMap<Vec<String>, (&'a str, CompKind)>,
    /// adjacency: port location -> (next hops, connector index used)
    edges: IndexMap<PortLoc, Vec<(PortLoc, usize)>>,
}

const WHITE: u8 = 0;
const GRAY: u8 = 1;
const BLACK: u8 = 2;

impl<'a> Flattener<'a> {
    fn is_terminal(&self, loc: &PortLoc) -> Option<Dest> {
        if loc.instance.is_empty() {
            let (root_ty, _) = self.kinds.get(&loc.instance)?;
            let rc = self.model.component(root_ty)?;
            let p = rc.port(&loc.port)?;
            if p.direction == Direction::Out {
                return Some(Dest::SystemOut(loc.port.clone()));
            }
        }
        let (ty, kind) = self.kinds.get(&loc.instance)?;
        if *kind == CompKind::Behavioral {
            let rc = self.model.component(ty)?;
            let p = rc.port(&loc.port)?;
            if p.direction == Direction::In {
                return Some(Dest::LeafIn(loc.clone()));
            }
        }
        None
    }

    /// Depth-first reachability from `loc`, collecting terminals. Validated
    /// architectures give every port at most one feed, so this walk cannot
    /// revisit a node; the seen-guard is belt and braces.
    fn walk(&self, loc: &PortLoc, seen: &mut Vec<PortLoc>, acc: &mut Vec<Dest>) {
        if seen.contains(loc) {
            return;
        }
        seen.push(loc.clone());
        if let Some(d) = self.is_terminal(loc) {
            acc.push(d);
        }
        if let Some(nexts) = self.edges.get(loc) {
            for (next, _) in nexts {
                self.walk(next, seen, acc);
            }
        }
    }

    /// Three-color depth-first scan over the whole connector graph. Any back
    /// edge closes a loop that no behavioral component interrupts, which
    /// would let a message circulate forever.
    fn scan_cycles(&self, connectors: &[Connector], diags: &mut Vec<Diagnostic>) {
        let mut color: IndexMap<&PortLoc, u8> = IndexMap::new();
        let starts: Vec<&PortLoc> = self.edges.keys().collect();
        for start in starts {
            if color.get(start).copied().unwrap_or(WHITE) != WHITE {
                continue;
            }
            self.dfs(start, &mut color, connectors, diags);
        }
    }

    fn dfs<'b>(
        &'b self,
        loc: &'b PortLoc,
        color: &mut IndexMap<&'b PortLoc, u8>,
        connectors: &[Connector],
        diags: &mut Vec<Diagnostic>,
    ) {
        color.insert(loc, GRAY);
        if let Some(nexts) = self.edges.get(loc) {
            for (next, ci) in nexts {
                match color.get(next).copied().unwrap_or(WHITE) {
                    GRAY => diags.push(Diagnostic::error(
                        diag::E0308,
                        connectors[*ci].pos.clone(),
                        format!(
                            "connector cycle: routing from `{}` back to `{}` never \
                             reaches a behavioral component",
                            loc.display(),
                            next.display()
                        ),
                    )),
                    WHITE => self.dfs(next, color, connectors, diags),
                    _ => {}
                }
            }
        }
        color.insert(loc, BLACK);
    }
}

/// Build the routing table for an elaborated architecture.
pub fn flatten(
    model: &CheckedModel,
    instances: &[InstanceNode],
    connectors: &[Connector],
) -> Result<RoutingTable, Vec<Diagnostic>> {
    let mut fl = Flattener {
        model,
        kinds: IndexMap::new(),
        edges: IndexMap::new(),
    };
    for node in instances {
        fl.kinds
            .insert(node.path.clone(), (node.type_name.as_str(), node.kind));
    }
    for (ci, c) in connectors.iter().enumerate() {
        let from = PortLoc {
            instance: abs(&c.level, &c.source.instance),
            port: c.source.port.clone(),
        };
        let to = PortLoc {
            instance: abs(&c.level, &c.target.instance),
            port: c.target.port.clone(),
        };
        fl.edges.entry(from).or_default().push((to, ci));
    }

    let mut diags = Vec::new();
    fl.scan_cycles(connectors, &mut diags);
    if !diags.is_empty() {
        crate::diag::sort_diagnostics(&mut diags);
        return Err(diags);
    }

    // Origin ports: the root's in-ports in declaration order, then each
    // behavioral instance's out-ports in tree preorder.
    let mut origins: Vec<PortLoc> = Vec::new();
    if let Some((root_ty, _)) = fl.kinds.get(&Vec::new()) {
        if let Some(rc) = model.component(root_ty) {
            for p in rc.in_ports() {
                origins.push(PortLoc::new(&[], &p.name));
            }
        }
    }
    for node in instances {
        if node.kind != CompKind::Behavioral {
            continue;
        }
        if let Some(rc) = model.component(&node.type_name) {
            for p in rc.out_ports() {
                origins.push(PortLoc::new(&node.path, &p.name));
            }
        }
    }

    let mut table = RoutingTable::default();
    for origin in origins {
        let mut seen = Vec::new();
        let mut acc = Vec::new();
        fl.walk(&origin, &mut seen, &mut acc);
        acc.sort();
        acc.dedup();
        table.routes.insert(origin, acc);
    }
    Ok(table)
}
