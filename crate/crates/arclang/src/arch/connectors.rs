//! Connector collection (explicit `connect` statements and inline
//! `[p -> q.r]` forms), name-based autoconnect, and per-level validation of
//! direction, type, and multiplicity rules.

use crate::diag::{self, Diagnostic, SourcePos};
use crate::sema::{is_subtype, CheckedModel, MsgType, ResolvedComponent};
use crate::syntax::ast::{Direction, PortRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Origin {
    Explicit,
    Inline,
    Auto,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Explicit => "explicit",
            Origin::Inline => "inline",
            Origin::Auto => "auto",
        }
    }
}

/// One end of a connector, relative to its declaring level: a direct
/// subcomponent's port (`instance` set) or the declaring component's own
/// port (`instance` empty).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct End {
    pub instance: Option<String>,
    pub port: String,
}

impl End {
    pub fn parent(port: &str) -> Self {
        End {
            instance: None,
            port: port.to_string(),
        }
    }

    pub fn child(instance: &str, port: &str) -> Self {
        End {
            instance: Some(instance.to_string()),
            port: port.to_string(),
        }
    }

    pub fn display(&self) -> String {
        match &self.instance {
            Some(i) => format!("{i}.{}", self.port),
            None => self.port.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connector {
    /// Instance path of the structural component declaring this connector.
    pub level: Vec<String>,
    pub source: End,
    pub target: End,
    pub origin: Origin,
    /// The source port's message type.
    pub msg_type: MsgType,
    pub pos: SourcePos,
}

/// A resolved end paired with its port's message type.
struct EndInfo {
    end: End,
    ty: MsgType,
}

fn lookup_end(
    rc: &ResolvedComponent,
    model: &CheckedModel,
    end: &End,
) -> Option<(MsgType, bool, Direction)> {
    match &end.instance {
        None => rc
            .port(&end.port)
            .map(|p| (p.ty.clone(), true, p.direction)),
        Some(inst) => {
            let sub = rc.subcomponent(inst)?;
            let child = model.component(&sub.type_name)?;
            child
                .port(&end.port)
                .map(|p| (p.ty.clone(), false, p.direction))
        }
    }
}

fn resolve_ref(
    rc: &ResolvedComponent,
    model: &CheckedModel,
    r: &PortRef,
    diags: &mut Vec<Diagnostic>,
) -> Option<EndInfo> {
    match &r.owner {
        None => match rc.port(&r.port) {
            Some(p) => Some(EndInfo {
                end: End::parent(&r.port),
                ty: p.ty.clone(),
            }),
            None => {
                diags.push(Diagnostic::error(
                    diag::E0303,
                    r.pos.clone(),
                    format!("component `{}` has no port `{}`", rc.name, r.port),
                ));
                None
            }
        },
        Some(inst) => {
            let Some(sub) = rc.subcomponent(inst) else {
                diags.push(Diagnostic::error(
                    diag::E0303,
                    r.pos.clone(),
                    format!(
                        "component `{}` has no subcomponent instance `{inst}`",
                        rc.name
                    ),
                ));
                return None;
            };
            let Some(child) = model.component(&sub.type_name) else {
                // Unknown child type is already reported as E0301.
                return None;
            };
            match child.port(&r.port) {
                Some(p) => Some(EndInfo {
                    end: End::child(inst, &r.port),
                    ty: p.ty.clone(),
                }),
                None => {
                    diags.push(Diagnostic::error(
                        diag::E0303,
                        r.pos.clone(),
                        format!(
                            "instance `{inst}` of type `{}` has no port `{}`",
                            sub.type_name, r.port
                        ),
                    ));
                    None
                }
            }
        }
    }
}

/// Collect connectors written in the source: `connect` statements first (in
/// declaration order, fan-out expanded), then inline connectors in instance
/// declaration order.
pub fn collect_explicit(
    level: &[String],
    rc: &ResolvedComponent,
    model: &CheckedModel,
    diags: &mut Vec<Diagnostic>,
) -> Vec<Connector> {
    let mut out = Vec::new();
    for cn in &rc.connects {
        let src = resolve_ref(rc, model, &cn.source, diags);
        let mut targets = Vec::new();
        for t in &cn.targets {
            if let Some(ti) = resolve_ref(rc, model, t, diags) {
                targets.push(ti);
            }
        }
        if let Some(src) = src {
            for ti in targets {
                out.push(Connector {
                    level: level.to_vec(),
                    source: src.end.clone(),
                    target: ti.end,
                    origin: Origin::Explicit,
                    msg_type: src.ty.clone(),
                    pos: cn.pos.clone(),
                });
            }
        }
    }
    for sub in &rc.subcomponents {
        let Some(child) = model.component(&sub.type_name) else {
            continue;
        };
        for ic in &sub.inline_connects {
            let Some(src_port) = child.port(&ic.source_port) else {
                diags.push(Diagnostic::error(
                    diag::E0303,
                    ic.pos.clone(),
                    format!(
                        "instance `{}` of type `{}` has no port `{}`",
                        sub.instance_name, sub.type_name, ic.source_port
                    ),
                ));
                continue;
            };
            let Some(ti) = resolve_ref(rc, model, &ic.target, diags) else {
                continue;
            };
            out.push(Connector {
                level: level.to_vec(),
                source: End::child(&sub.instance_name, &ic.source_port),
                target: ti.end,
                origin: Origin::Inline,
                msg_type: src_port.ty.clone(),
                pos: ic.pos.clone(),
            });
        }
    }
    out
}

/// Derive connectors by port-name matching for a level whose component sets
/// the autoconnect flag. Targets already fed by an existing connector are
/// skipped; a target with two or more same-named compatible sources is an
/// error.
pub fn autoconnect(
    level: &[String],
    rc: &ResolvedComponent,
    model: &CheckedModel,
    existing: &[Connector],
    diags: &mut Vec<Diagnostic>,
) -> Vec<Connector> {
    let Some(ac_pos) = rc.autoconnect.clone() else {
        return Vec::new();
    };
    // Candidate sources: parent in-ports, then child out-ports, declaration order.
    let mut sources: Vec<(End, MsgType)> = Vec::new();
    for p in rc.in_ports() {
        sources.push((End::parent(&p.name), p.ty.clone()));
    }
    for sub in &rc.subcomponents {
        if let Some(child) = model.component(&sub.type_name) {
            for p in child.out_ports() {
                sources.push((End::child(&sub.instance_name, &p.name), p.ty.clone()));
            }
        }
    }
    // Candidate targets: child in-ports, then parent out-ports.
    let mut targets: Vec<(End, MsgType)> = Vec::new();
    for sub in &rc.subcomponents {
        if let Some(child) = model.component(&sub.type_name) {
            for p in child.in_ports() {
                targets.push((End::child(&sub.instance_name, &p.name), p.ty.clone()));
            }
        }
    }
    for p in rc.out_ports() {
        targets.push((End::parent(&p.name), p.ty.clone()));
    }

    let mut out = Vec::new();
    for (t_end, t_ty) in targets {
        if existing.iter().any(|c| c.target == t_end) {
            continue;
        }
        let candidates: Vec<&(End, MsgType)> = sources
            .iter()
            .filter(|(s_end, s_ty)| s_end.port == t_end.port && is_subtype(s_ty, &t_ty))
            .collect();
        match candidates.len() {
            0 => {}
            1 => {
                let (s_end, s_ty) = candidates[0];
                out.push(Connector {
                    level: level.to_vec(),
                    source: s_end.clone(),
                    target: t_end,
                    origin: Origin::Auto,
                    msg_type: s_ty.clone(),
                    pos: ac_pos.clone(),
                });
            }
            _ => {
                let names: Vec<String> = candidates
                    .iter()
                    .map(|(e, _)| format!("`{}`", e.display()))
                    .collect();
                diags.push(Diagnostic::error(
                    diag::E0304,
                    ac_pos.clone(),
                    format!(
                        "ambiguous autoconnect for target `{}`: candidate sources {}",
                        t_end.display(),
                        names.join(", ")
                    ),
                ));
            }
        }
    }
    out
}

/// Check direction legality, source-to-target subtyping, and one-feed-per-
/// target for every connector of one level, and warn about ports that no
/// connector touches.
pub fn validate_connectors(
    rc: &ResolvedComponent,
    model: &CheckedModel,
    all: &[Connector],
    diags: &mut Vec<Diagnostic>,
    warnings: &mut Vec<Diagnostic>,
) {
    let mut fed: Vec<(&End, &Connector)> = Vec::new();
    for c in all {
        let src = lookup_end(rc, model, &c.source);
        let tgt = lookup_end(rc, model, &c.target);
        // Unresolvable ends were already reported during collection.
        let (Some((s_ty, s_parent, s_dir)), Some((t_ty, t_parent, t_dir))) = (src, tgt) else {
            continue;
        };
        let src_ok = (s_parent && s_dir == Direction::In) || (!s_parent && s_dir == Direction::Out);
        if !src_ok {
            diags.push(Diagnostic::error(
                diag::E0305,
                c.pos.clone(),
                format!(
                    "illegal connector direction: source `{}` must be an own in-port \
                     or a subcomponent out-port",
                    c.source.display()
                ),
            ));
        }
        let tgt_ok = (!t_parent && t_dir == Direction::In) || (t_parent && t_dir == Direction::Out);
        if !tgt_ok {
            diags.push(Diagnostic::error(
                diag::E0305,
                c.pos.clone(),
                format!(
                    "illegal connector direction: target `{}` must be a subcomponent \
                     in-port or an own out-port",
                    c.target.display()
                ),
            ));
        }
        if src_ok && tgt_ok && !is_subtype(&s_ty, &t_ty) {
            diags.push(Diagnostic::error(
                diag::E0306,
                c.pos.clone(),
                format!(
                    "connector type mismatch: source `{}` of type `{s_ty}` cannot feed \
                     target `{}` of type `{t_ty}`",
                    c.source.display(),
                    c.target.display()
                ),
            ));
        }
        if let Some((_, first)) = fed.iter().find(|(e, _)| **e == c.target) {
            diags.push(Diagnostic::error(
                diag::E0307,
                c.pos.clone(),
                format!(
                    "target `{}` is fed by more than one connector (already fed from \
                     `{}`)",
                    c.target.display(),
                    first.source.display()
                ),
            ));
        } else {
            fed.push((&c.target, c));
        }
    }

    // Lint: every port of this level (own ports and direct children's ports)
    // should touch at least one connector.
    let touches = |end: &End| all.iter().any(|c| c.source == *end || c.target == *end);
    for p in &rc.ports {
        let end = End::parent(&p.name);
        if !touches(&end) {
            warnings.push(Diagnostic::warning(
                diag::W0301,
                p.pos.clone(),
                format!("port `{}` is not connected inside `{}`", p.name, rc.name),
            ));
        }
    }
    for sub in &rc.subcomponents {
        let Some(child) = model.component(&sub.type_name) else {
            continue;
        };
        for p in &child.ports {
            let end = End::child(&sub.instance_name, &p.name);
            if !touches(&end) {
                warnings.push(Diagnostic::warning(
                    diag::W0301,
                    p.pos.clone(),
                    format!(
                        "port `{}` is not connected inside `{}`",
                        end.display(),
                        rc.name
                    ),
                ));
            }
        }
    }
}
