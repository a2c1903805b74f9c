//! Test support, compiled only with the `testkit` feature: a seeded random
//! architecture generator and an independent hop-by-hop message router used
//! as an oracle against the flattened routing table.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::{Rng as GenRng, SeedableRng};
pub use rand_chacha::ChaCha8Rng as SeededRng;

use crate::arch::{elaborate, Dest, ElaboratedArchitecture, PortLoc};
use crate::sema::{analyze, CheckedModel, CompKind};
use crate::syntax::ast::Direction;
use crate::syntax::parse_model;

/// Route a message the slow way: follow one connector at a time through the
/// level-by-level connector list, collecting behavioral in-ports and root
/// out-ports. Shares no code with the routing table construction.
pub fn reference_route(
    model: &CheckedModel,
    ea: &ElaboratedArchitecture,
    origin: &PortLoc,
) -> Vec<Dest> {
    let mut seen: Vec<PortLoc> = Vec::new();
    let mut work = vec![origin.clone()];
    let mut out = Vec::new();
    while let Some(loc) = work.pop() {
        if seen.contains(&loc) {
            continue;
        }
        seen.push(loc.clone());
        if let Some(node) = ea.instances.iter().find(|n| n.path == loc.instance) {
            if let Some(p) = model
                .component(&node.type_name)
                .and_then(|rc| rc.port(&loc.port))
            {
                if loc.instance.is_empty() && p.direction == Direction::Out {
                    out.push(Dest::SystemOut(loc.port.clone()));
                }
                if node.kind == CompKind::Behavioral && p.direction == Direction::In {
                    out.push(Dest::LeafIn(loc.clone()));
                }
            }
        }
        for c in &ea.connectors {
            let mut src = c.level.clone();
            if let Some(i) = &c.source.instance {
                src.push(i.clone());
            }
            if src == loc.instance && c.source.port == loc.port {
                let mut tgt = c.level.clone();
                if let Some(i) = &c.target.instance {
                    tgt.push(i.clone());
                }
                work.push(PortLoc::new(&tgt, &c.target.port));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Compare every route in the flattened table against the hop-by-hop oracle.
pub fn routing_agreement(model: &CheckedModel, ea: &ElaboratedArchitecture) -> Result<(), String> {
    for (origin, dests) in &ea.routing.routes {
        let expected = reference_route(model, ea, origin);
        if *dests != expected {
            return Err(format!(
                "route mismatch at `{}`: table {:?}, reference {:?}",
                origin.display(),
                dests,
                expected
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_depth: usize,
    pub max_children: usize,
    pub max_ports: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 3,
            max_children: 6,
            max_ports: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedArch {
    pub source: String,
    pub root: String,
}

const PORT_NAMES: &[&str] = &["alpha", "beta", "gamma", "delta", "sigma", "omega"];
const SCALARS: &[&str] = &["Boolean", "Integer", "String"];

struct GenComp {
    name: String,
    auto: bool,
    ports: Vec<(Direction, &'static str, &'static str)>,
    children: Vec<(String, String)>,
    connects: Vec<(String, String)>,
}

fn gen_ports(
    rng: &mut ChaCha8Rng,
    cfg: &GenConfig,
) -> Vec<(Direction, &'static str, &'static str)> {
    let n = rng.random_range(0..=cfg.max_ports.min(PORT_NAMES.len()));
    let mut names = PORT_NAMES.to_vec();
    names.shuffle(rng);
    names.truncate(n);
    names
        .into_iter()
        .map(|name| {
            let dir = if rng.random_bool(0.5) {
                Direction::In
            } else {
                Direction::Out
            };
            (dir, SCALARS[rng.random_range(0..SCALARS.len())], name)
        })
        .collect()
}

fn gen_comp(
    rng: &mut ChaCha8Rng,
    cfg: &GenConfig,
    depth: usize,
    counter: &mut usize,
    comps: &mut Vec<GenComp>,
) -> String {
    let name = format!("C{}", *counter);
    *counter += 1;
    let structural = depth == 0 || (depth + 1 < cfg.max_depth && rng.random_bool(0.4));
    let ports = gen_ports(rng, cfg);
    if !structural {
        comps.push(GenComp {
            name: name.clone(),
            auto: false,
            ports,
            children: Vec::new(),
            connects: Vec::new(),
        });
        return name;
    }

    let nkids = rng.random_range(1..=cfg.max_children);
    let children: Vec<(String, String)> = (0..nkids)
        .map(|k| {
            let ty = gen_comp(rng, cfg, depth + 1, counter, comps);
            (ty, format!("i{k}"))
        })
        .collect();
    let auto = rng.random_bool(0.3);

    // Wiring pools, everything addressable at this level.
    let mut sources: Vec<(String, &'static str)> = Vec::new();
    let mut targets: Vec<(String, &'static str)> = Vec::new();
    for (dir, ty, pname) in &ports {
        match dir {
            Direction::In => sources.push((pname.to_string(), ty)),
            Direction::Out => targets.push((pname.to_string(), ty)),
        }
    }
    for (cty, inst) in &children {
        let child = comps
            .iter()
            .find(|c| c.name == *cty)
            .expect("child rendered");
        for (dir, ty, pname) in &child.ports {
            match dir {
                Direction::In => targets.push((format!("{inst}.{pname}"), ty)),
                Direction::Out => sources.push((format!("{inst}.{pname}"), ty)),
            }
        }
    }
    // Feed each target at most once so multiplicity holds by construction;
    // leave room for autoconnect when the flag is on.
    let feed_prob = if auto { 0.35 } else { 0.8 };
    let mut connects = Vec::new();
    for (tref, tty) in &targets {
        if !rng.random_bool(feed_prob) {
            continue;
        }
        let compat: Vec<&(String, &'static str)> =
            sources.iter().filter(|(_, sty)| sty == tty).collect();
        if compat.is_empty() {
            continue;
        }
        let (sref, _) = compat[rng.random_range(0..compat.len())];
        connects.push((sref.clone(), tref.clone()));
    }

    comps.push(GenComp {
        name: name.clone(),
        auto,
        ports,
        children,
        connects,
    });
    name
}

/// Produce one random architecture as source text. Legal by construction in
/// most respects; autoconnect ambiguity and connector cycles can still slip
/// in, which is what [`gen_valid`]'s rejection loop is for.
pub fn gen_architecture(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> GeneratedArch {
    let mut comps = Vec::new();
    let mut counter = 0;
    let root = gen_comp(rng, cfg, 0, &mut counter, &mut comps);
    let mut source = String::new();
    for c in &comps {
        source.push_str(&format!("component {} {{\n", c.name));
        if c.auto {
            source.push_str("  autoconnect port;\n");
        }
        for (dir, ty, pname) in &c.ports {
            let d = match dir {
                Direction::In => "in",
                Direction::Out => "out",
            };
            source.push_str(&format!("  port {d} {ty} {pname};\n"));
        }
        for (cty, inst) in &c.children {
            source.push_str(&format!("  component {cty} {inst};\n"));
        }
        for (s, t) in &c.connects {
            source.push_str(&format!("  connect {s} -> {t};\n"));
        }
        source.push_str("}\n\n");
    }
    GeneratedArch { source, root }
}

/// Generate until the candidate parses, checks, and elaborates cleanly.
pub fn gen_valid(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> GeneratedArch {
    for _ in 0..10_000 {
        let g = gen_architecture(rng, cfg);
        let Ok(unit) = parse_model(&g.source, "generated.arc") else {
            continue;
        };
        let Ok(model) = analyze(&[unit]) else {
            continue;
        };
        if elaborate(&g.root, &model).is_ok() {
            return g;
        }
    }
    panic!("random architecture generation kept failing validation");
}
