//! Signature validation: name resolution, contractiveness, and checking each
//! process definition against its declared type.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ast::{ProcName, SessionType, Signature, TypeName};
use crate::typecheck::{check_def, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SigError {
    #[error("undefined type name `{name}` in {site}")]
    UndefinedType { name: TypeName, site: String },
    #[error("undefined process `{name}` in {site}")]
    UndefinedProc { name: ProcName, site: String },
    #[error("type `{name}` is not contractive: {}", cycle_text(.cycle))]
    NonContractive {
        name: TypeName,
        cycle: Vec<TypeName>,
    },
    #[error("process `{def}` does not have its declared type: {error}")]
    Type {
        def: ProcName,
        error: Box<TypeError>,
    },
}

fn cycle_text(cycle: &[TypeName]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(ToString::to_string).collect();
    if let Some(first) = cycle.first() {
        parts.push(first.to_string());
    }
    parts.join(" -> ")
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContractivenessReport {
    pub ok: bool,
    /// Each offending definition with the cycle of names it runs into.
    pub offenders: Vec<(TypeName, Vec<TypeName>)>,
}

impl fmt::Display for ContractivenessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("contractive");
        }
        for (i, (name, cycle)) in self.offenders.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{name}: {}", cycle_text(cycle))?;
        }
        Ok(())
    }
}

/// Every name and call in the signature resolves.
pub fn check_names(sig: &Signature) -> Result<(), Vec<SigError>> {
    let mut errors = Vec::new();
    let check_type = |t: &SessionType, site: &str, errors: &mut Vec<SigError>| {
        t.for_each_name(&mut |n| {
            if sig.typedef(n).is_none() {
                errors.push(SigError::UndefinedType {
                    name: n.clone(),
                    site: site.to_string(),
                });
            }
        });
    };
    for (name, body) in sig.typedefs() {
        check_type(body, &format!("type {name}"), &mut errors);
    }
    for def in sig.procdefs() {
        let site = format!("proc {}", def.name);
        check_type(&def.declared, &site, &mut errors);
        let mut types = Vec::new();
        let mut calls = Vec::new();
        def.body.visit(&mut |t| types.push(t.clone()), &mut |x| {
            calls.push(x.clone())
        });
        for t in &types {
            check_type(t, &site, &mut errors);
        }
        for x in calls {
            if sig.procdef(&x).is_none() {
                errors.push(SigError::UndefinedProc {
                    name: x,
                    site: site.clone(),
                });
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

/// Names reachable from `t` without passing a structural constructor.
fn guard_free_names(t: &SessionType, out: &mut Vec<TypeName>) {
    match t {
        SessionType::Name(n) => {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
        SessionType::Meet(a, b) | SessionType::Join(a, b) => {
            guard_free_names(a, out);
            guard_free_names(b, out);
        }
        _ => {}
    }
}

/// A definition is contractive when no path from its body through
/// intersections, unions and names revisits a name.
pub fn check_contractive(sig: &Signature) -> ContractivenessReport {
    let edges = |n: &TypeName| {
        let mut out = Vec::new();
        if let Some(body) = sig.typedef(n) {
            guard_free_names(body, &mut out);
        }
        out
    };
    let mut offenders = Vec::new();
    for (name, _) in sig.typedefs() {
        if let Some(cycle) = find_cycle(name, &edges) {
            offenders.push((name.clone(), cycle));
        }
    }
    ContractivenessReport {
        ok: offenders.is_empty(),
        offenders,
    }
}

/// Depth-first search from `start`; returns the path from `start` up to the
/// first name seen twice on the current path.
fn find_cycle(
    start: &TypeName,
    edges: &impl Fn(&TypeName) -> Vec<TypeName>,
) -> Option<Vec<TypeName>> {
    fn go(
        n: &TypeName,
        path: &mut Vec<TypeName>,
        done: &mut BTreeSet<TypeName>,
        edges: &impl Fn(&TypeName) -> Vec<TypeName>,
    ) -> Option<Vec<TypeName>> {
        if path.contains(n) {
            return Some(path.clone());
        }
        if done.contains(n) {
            return None;
        }
        path.push(n.clone());
        for m in edges(n) {
            if let Some(c) = go(&m, path, done, edges) {
                return Some(c);
            }
        }
        path.pop();
        done.insert(n.clone());
        None
    }
    go(start, &mut Vec::new(), &mut BTreeSet::new(), edges)
}

/// Resolution, then contractiveness, then every body against its declared
/// type. Type checking is skipped when an earlier stage fails.
pub fn check_signature(sig: &Signature) -> Result<(), Vec<SigError>> {
    check_names(sig)?;
    let report = check_contractive(sig);
    if !report.ok {
        return Err(report
            .offenders
            .into_iter()
            .map(|(name, cycle)| SigError::NonContractive { name, cycle })
            .collect());
    }
    let errors: Vec<SigError> = sig
        .procdefs()
        .filter_map(|def| {
            check_def(sig, &def.name).err().map(|e| SigError::Type {
                def: def.name.clone(),
                error: Box::new(e),
            })
        })
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}
