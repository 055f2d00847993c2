//! Concrete-syntax printing. The output parses back to the same tree.

use std::fmt;

use crate::ast::{Process, SessionType, Signature};

const JOIN: u8 = 0;
const MEET: u8 = 1;
const LOLLI: u8 = 2;
const TENSOR: u8 = 3;
const ATOM: u8 = 4;

fn level(t: &SessionType) -> u8 {
    match t {
        SessionType::Join(..) => JOIN,
        SessionType::Meet(..) => MEET,
        SessionType::Lolli(..) => LOLLI,
        SessionType::Tensor(..) => TENSOR,
        _ => ATOM,
    }
}

fn write_type(f: &mut fmt::Formatter<'_>, t: &SessionType, min: u8) -> fmt::Result {
    if level(t) < min {
        f.write_str("(")?;
        write_type(f, t, JOIN)?;
        return f.write_str(")");
    }
    match t {
        SessionType::End => f.write_str("1"),
        SessionType::Name(n) => write!(f, "{n}"),
        SessionType::Join(a, b) => {
            write_type(f, a, JOIN)?;
            f.write_str(" \\/ ")?;
            write_type(f, b, MEET)
        }
        SessionType::Meet(a, b) => {
            write_type(f, a, MEET)?;
            f.write_str(" /\\ ")?;
            write_type(f, b, LOLLI)
        }
        SessionType::Lolli(a, b) => {
            write_type(f, a, TENSOR)?;
            f.write_str(" -o ")?;
            write_type(f, b, LOLLI)
        }
        SessionType::Tensor(a, b) => {
            write_type(f, a, ATOM)?;
            f.write_str(" * ")?;
            write_type(f, b, TENSOR)
        }
        SessionType::Internal(bs) | SessionType::External(bs) => {
            f.write_str(if matches!(t, SessionType::Internal(_)) {
                "+{"
            } else {
                "&{"
            })?;
            for (i, (l, a)) in bs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}: ")?;
                write_type(f, a, JOIN)?;
            }
            f.write_str("}")
        }
    }
}

impl fmt::Display for SessionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_type(f, self, JOIN)
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Process::Spawn {
                bound,
                annot,
                child,
                cont,
            } => {
                write!(f, "{bound}")?;
                if let Some(a) = annot {
                    write!(f, " : {a}")?;
                }
                match child.as_ref() {
                    Process::Call(x) => write!(f, " <- {x}; {cont}"),
                    p => write!(f, " <- ({p}); {cont}"),
                }
            }
            Process::Fwd { offer, from } => write!(f, "{offer} <- {from}"),
            Process::Close(c) => write!(f, "close {c}"),
            Process::Wait(c, p) => write!(f, "wait {c}; {p}"),
            Process::Send {
                ch,
                bound,
                payload,
                cont,
            } => write!(f, "send {ch} ({bound} <- {payload}); {cont}"),
            Process::Recv { bound, ch, cont } => write!(f, "{bound} <- recv {ch}; {cont}"),
            Process::Select { ch, label, cont } => write!(f, "{ch}.{label}; {cont}"),
            Process::Case { ch, branches } => {
                write!(f, "case {ch} of {{ ")?;
                for (i, (l, p)) in branches.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{l} => {p}")?;
                }
                f.write_str(" }")
            }
            Process::Call(x) => write!(f, "{x}"),
        }
    }
}

/// Prints a whole signature in core form (no parameter sugar).
pub fn print_signature(sig: &Signature) -> String {
    let mut out = String::new();
    for (name, body) in sig.typedefs() {
        out.push_str(&format!("type {name} = {body}\n"));
    }
    for def in sig.procdefs() {
        out.push_str(&format!(
            "proc {} : {}\n  {} <- {} =\n  {}\n",
            def.name, def.declared, def.offer, def.name, def.body
        ));
    }
    out
}
