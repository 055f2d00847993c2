//! The algorithmic typing judgment `Ψ ⊢ P :: (c : Θ)`.
//!
//! Every channel carries a multiset of types: read conjunctively for used
//! channels and disjunctively for the offered one. Subtyping is consulted only
//! at forwards (and when closing a call against its declared type).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ast::{free_channels, rename_bound, Channel, Process, SessionType, Signature};
use crate::subtype::{decide, saturate_left, saturate_right, MemoTable, TypeMultiset};

/// `Ψ`: used channels and the types they are known to have.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChannelContext(BTreeMap<Channel, TypeMultiset>);

impl ChannelContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, c: Channel, types: TypeMultiset) -> Self {
        self.insert(c, types);
        self
    }

    pub fn insert(&mut self, c: Channel, types: TypeMultiset) {
        assert!(!types.is_empty(), "empty type multiset for `{c}`");
        self.0.insert(c, types);
    }

    pub fn remove(&mut self, c: &Channel) -> Option<TypeMultiset> {
        self.0.remove(c)
    }

    pub fn get(&self, c: &Channel) -> Option<&TypeMultiset> {
        self.0.get(c)
    }

    pub fn contains(&self, c: &Channel) -> bool {
        self.0.contains_key(c)
    }

    pub fn channels(&self) -> impl Iterator<Item = &Channel> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Channel, &TypeMultiset)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(Channel, TypeMultiset)> for ChannelContext {
    fn from_iter<I: IntoIterator<Item = (Channel, TypeMultiset)>>(iter: I) -> Self {
        let mut ctx = ChannelContext::new();
        for (c, t) in iter {
            ctx.insert(c, t);
        }
        ctx
    }
}

impl fmt::Display for ChannelContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("·");
        }
        for (i, (c, ts)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c} : {ts}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("no typing rule applies")]
    NoRule,
    #[error("forward fails: {left} is not a subtype of {right}")]
    Subtype {
        left: TypeMultiset,
        right: TypeMultiset,
    },
    #[error("call does not provide a type in {0}")]
    CallMismatch(TypeMultiset),
    #[error("channel `{0}` is not used")]
    Unused(Channel),
    #[error("channel `{0}` is used by both sides of a split")]
    UsedTwice(Channel),
    #[error("channel `{0}` is not in scope")]
    Unbound(Channel),
    #[error("spawn of `{0}` needs a type annotation")]
    MissingAnnotation(Channel),
    #[error("undefined process `{0}`")]
    UndefinedProc(String),
}

/// A failed sub-judgment together with where it sits in the term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    /// The judgment that could not be derived, rendered as text.
    pub judgment: String,
    /// Outermost first.
    pub path: Vec<String>,
    /// Structural types tried for the subject of the failing rule.
    pub tried: Vec<SessionType>,
}

impl TypeError {
    fn new(
        kind: TypeErrorKind,
        ctx: &ChannelContext,
        p: &Process,
        offer: &Channel,
        theta: &TypeMultiset,
    ) -> Self {
        TypeError {
            kind,
            judgment: format!("{ctx} ⊢ {} :: ({offer} : {theta})", p.head()),
            path: Vec::new(),
            tried: Vec::new(),
        }
    }

    fn tried(mut self, tried: Vec<SessionType>) -> Self {
        self.tried = tried;
        self
    }

    fn within(mut self, frame: impl Into<String>) -> Self {
        self.path.insert(0, frame.into());
        self
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\n  while checking {}", self.kind, self.judgment)?;
        for frame in self.path.iter().rev() {
            write!(f, "\n  {frame}")?;
        }
        if !self.tried.is_empty() {
            let tried: Vec<String> = self.tried.iter().map(ToString::to_string).collect();
            write!(f, "\n  candidates tried: {}", tried.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for TypeError {}

/// Splits `ctx` between two sub-terms according to the channels each uses.
/// Channels not in `ctx` are ignored.
pub fn split_context(
    ctx: &ChannelContext,
    left: &BTreeSet<Channel>,
    right: &BTreeSet<Channel>,
) -> Result<(ChannelContext, ChannelContext), TypeErrorKind> {
    let mut l = ChannelContext::new();
    let mut r = ChannelContext::new();
    for (c, ts) in ctx.iter() {
        match (left.contains(c), right.contains(c)) {
            (true, true) => return Err(TypeErrorKind::UsedTwice(c.clone())),
            (false, false) => return Err(TypeErrorKind::Unused(c.clone())),
            (true, false) => l.insert(c.clone(), ts.clone()),
            (false, true) => r.insert(c.clone(), ts.clone()),
        }
    }
    Ok((l, r))
}

/// Checks `ctx ⊢ p :: (offer : theta)`.
pub fn check(
    sig: &Signature,
    ctx: &ChannelContext,
    p: &Process,
    offer: &Channel,
    theta: &TypeMultiset,
) -> Result<(), TypeError> {
    assert!(!ctx.contains(offer), "offered channel `{offer}` also used");
    let thetas = saturate_right(sig, theta);
    let mut contexts = vec![ChannelContext::new()];
    for (c, ts) in ctx.iter() {
        let alternatives = saturate_left(sig, ts);
        contexts = contexts
            .into_iter()
            .flat_map(|base| {
                alternatives
                    .iter()
                    .map(move |alt| base.clone().with(c.clone(), alt.clone()))
            })
            .collect();
    }
    for th in &thetas {
        for cx in &contexts {
            dispatch(sig, cx, p, offer, th)?;
        }
    }
    Ok(())
}

/// The first success among `candidates`. With a single candidate its error is
/// reported as is; otherwise the error lists every candidate.
fn first_success<'a>(
    candidates: Vec<&'a SessionType>,
    mut attempt: impl FnMut(&'a SessionType) -> Result<(), TypeError>,
    no_rule: impl FnOnce() -> TypeError,
) -> Result<(), TypeError> {
    let mut last = None;
    for cand in &candidates {
        match attempt(cand) {
            Ok(()) => return Ok(()),
            Err(e) => last = Some(e),
        }
    }
    match (candidates.len(), last) {
        (1, Some(e)) => Err(e),
        _ => Err(no_rule().tried(candidates.into_iter().cloned().collect())),
    }
}

fn avoid_clash(
    ctx: &ChannelContext,
    offer: &Channel,
    bound: &Channel,
    scope: &Process,
) -> (Channel, Process) {
    if !ctx.contains(bound) && bound != offer {
        return (bound.clone(), scope.clone());
    }
    let mut used = std::collections::HashSet::new();
    scope.all_channels(&mut used);
    let fresh =
        bound.fresh_variant(&|c: &Channel| ctx.contains(c) || c == offer || used.contains(c));
    let renamed = rename_bound(scope, &fresh, bound);
    (fresh, renamed)
}

fn without(mut set: BTreeSet<Channel>, cs: &[&Channel]) -> BTreeSet<Channel> {
    for c in cs {
        set.remove(*c);
    }
    set
}

fn dispatch(
    sig: &Signature,
    ctx: &ChannelContext,
    p: &Process,
    offer: &Channel,
    theta: &TypeMultiset,
) -> Result<(), TypeError> {
    let err = |kind| TypeError::new(kind, ctx, p, offer, theta);
    if let Some(c) = p.subject() {
        if c != offer && !ctx.contains(c) {
            return Err(err(TypeErrorKind::Unbound(c.clone())));
        }
    }
    match p {
        Process::Fwd { offer: x, from } => {
            if x != offer {
                return Err(err(TypeErrorKind::Unbound(x.clone())));
            }
            let Some(delta) = ctx.get(from) else {
                return Err(err(TypeErrorKind::Unbound(from.clone())));
            };
            if let Some(c) = ctx.channels().find(|c| *c != from) {
                return Err(err(TypeErrorKind::Unused(c.clone())));
            }
            if decide(sig, delta, theta, &mut MemoTable::new()) {
                Ok(())
            } else {
                Err(err(TypeErrorKind::Subtype {
                    left: delta.clone(),
                    right: theta.clone(),
                }))
            }
        }
        Process::Spawn {
            bound,
            annot,
            child,
            cont,
        } => {
            let (x, cont) = avoid_clash(ctx, offer, bound, cont);
            let ty = match (annot, child.as_ref()) {
                (Some(a), _) => a.clone(),
                (None, Process::Call(name)) => match sig.procdef(name) {
                    Some(def) => def.declared.clone(),
                    None => return Err(err(TypeErrorKind::UndefinedProc(name.to_string()))),
                },
                (None, _) => return Err(err(TypeErrorKind::MissingAnnotation(bound.clone()))),
            };
            let (left, right) = split_context(
                ctx,
                &free_channels(child),
                &without(free_channels(&cont), &[&x, offer]),
            )
            .map_err(err)?;
            let a = TypeMultiset::singleton(ty);
            check(sig, &left, child, &x, &a)
                .map_err(|e| e.within(format!("in the provider of `{x}`")))?;
            check(sig, &right.with(x.clone(), a), &cont, offer, theta)
                .map_err(|e| e.within(format!("after spawning `{x}`")))
        }
        Process::Close(_) => {
            if let Some(c) = ctx.channels().next() {
                return Err(err(TypeErrorKind::Unused(c.clone())));
            }
            if theta.contains(&SessionType::End) {
                Ok(())
            } else {
                Err(err(TypeErrorKind::NoRule).tried(theta.iter().cloned().collect()))
            }
        }
        Process::Wait(c, q) => {
            let ts = ctx.get(c).expect("subject checked");
            if !ts.contains(&SessionType::End) {
                return Err(err(TypeErrorKind::NoRule).tried(ts.iter().cloned().collect()));
            }
            let mut rest = ctx.clone();
            rest.remove(c);
            check(sig, &rest, q, offer, theta).map_err(|e| e.within(format!("after wait {c}")))
        }
        Process::Send {
            ch,
            bound,
            payload,
            cont,
        } => {
            let (d, payload) = avoid_clash(ctx, offer, bound, payload);
            if ch == offer {
                // ⊗R
                let (left, right) = split_context(
                    ctx,
                    &without(free_channels(&payload), &[&d]),
                    &without(free_channels(cont), &[offer]),
                )
                .map_err(err)?;
                let cands: Vec<&SessionType> = theta
                    .distinct()
                    .filter(|t| matches!(t, SessionType::Tensor(..)))
                    .collect();
                first_success(
                    cands,
                    |t| {
                        let SessionType::Tensor(a, b) = t else {
                            unreachable!()
                        };
                        check(
                            sig,
                            &left,
                            &payload,
                            &d,
                            &TypeMultiset::singleton((**a).clone()),
                        )
                        .map_err(|e| e.within(format!("in the channel sent on {ch}")))?;
                        check(
                            sig,
                            &right,
                            cont,
                            offer,
                            &TypeMultiset::singleton((**b).clone()),
                        )
                        .map_err(|e| e.within(format!("after send {ch}")))
                    },
                    || err(TypeErrorKind::NoRule),
                )
            } else {
                // ⊸L
                let mut rest = ctx.clone();
                let ts = rest.remove(ch).expect("subject checked");
                let (left, right) = split_context(
                    &rest,
                    &without(free_channels(&payload), &[&d]),
                    &without(free_channels(cont), &[ch, offer]),
                )
                .map_err(err)?;
                let cands: Vec<&SessionType> = ts
                    .distinct()
                    .filter(|t| matches!(t, SessionType::Lolli(..)))
                    .collect();
                first_success(
                    cands,
                    |t| {
                        let SessionType::Lolli(a, b) = t else {
                            unreachable!()
                        };
                        check(
                            sig,
                            &left,
                            &payload,
                            &d,
                            &TypeMultiset::singleton((**a).clone()),
                        )
                        .map_err(|e| e.within(format!("in the channel sent on {ch}")))?;
                        let right = right
                            .clone()
                            .with(ch.clone(), TypeMultiset::singleton((**b).clone()));
                        check(sig, &right, cont, offer, theta)
                            .map_err(|e| e.within(format!("after send {ch}")))
                    },
                    || err(TypeErrorKind::NoRule),
                )
            }
        }
        Process::Recv { bound, ch, cont } => {
            let (d, cont) = avoid_clash(ctx, offer, bound, cont);
            if ch == offer {
                // ⊸R
                let cands: Vec<&SessionType> = theta
                    .distinct()
                    .filter(|t| matches!(t, SessionType::Lolli(..)))
                    .collect();
                first_success(
                    cands,
                    |t| {
                        let SessionType::Lolli(a, b) = t else {
                            unreachable!()
                        };
                        let ext = ctx
                            .clone()
                            .with(d.clone(), TypeMultiset::singleton((**a).clone()));
                        check(
                            sig,
                            &ext,
                            &cont,
                            offer,
                            &TypeMultiset::singleton((**b).clone()),
                        )
                        .map_err(|e| e.within(format!("after {d} <- recv {ch}")))
                    },
                    || err(TypeErrorKind::NoRule),
                )
            } else {
                // ⊗L
                let ts = ctx.get(ch).expect("subject checked");
                let cands: Vec<&SessionType> = ts
                    .distinct()
                    .filter(|t| matches!(t, SessionType::Tensor(..)))
                    .collect();
                first_success(
                    cands,
                    |t| {
                        let SessionType::Tensor(a, b) = t else {
                            unreachable!()
                        };
                        let ext = ctx
                            .clone()
                            .with(d.clone(), TypeMultiset::singleton((**a).clone()))
                            .with(ch.clone(), TypeMultiset::singleton((**b).clone()));
                        check(sig, &ext, &cont, offer, theta)
                            .map_err(|e| e.within(format!("after {d} <- recv {ch}")))
                    },
                    || err(TypeErrorKind::NoRule),
                )
            }
        }
        Process::Select { ch, label, cont } => {
            if ch == offer {
                // ⊕R
                let cands: Vec<&SessionType> = theta
                    .distinct()
                    .filter(|t| matches!(t, SessionType::Internal(bs) if bs.contains(label)))
                    .collect();
                first_success(
                    cands,
                    |t| {
                        let SessionType::Internal(bs) = t else {
                            unreachable!()
                        };
                        let a = bs.get(label).expect("filtered").clone();
                        check(sig, ctx, cont, offer, &TypeMultiset::singleton(a))
                            .map_err(|e| e.within(format!("after {ch}.{label}")))
                    },
                    || err(TypeErrorKind::NoRule).tried(theta.iter().cloned().collect()),
                )
            } else {
                // &L
                let ts = ctx.get(ch).expect("subject checked");
                let cands: Vec<&SessionType> = ts
                    .distinct()
                    .filter(|t| matches!(t, SessionType::External(bs) if bs.contains(label)))
                    .collect();
                first_success(
                    cands,
                    |t| {
                        let SessionType::External(bs) = t else {
                            unreachable!()
                        };
                        let a = bs.get(label).expect("filtered").clone();
                        let ext = ctx.clone().with(ch.clone(), TypeMultiset::singleton(a));
                        check(sig, &ext, cont, offer, theta)
                            .map_err(|e| e.within(format!("after {ch}.{label}")))
                    },
                    || err(TypeErrorKind::NoRule).tried(ts.iter().cloned().collect()),
                )
            }
        }
        Process::Case { ch, branches } => {
            if ch == offer {
                // &R
                let cands: Vec<&SessionType> = theta
                    .distinct()
                    .filter(
                        |t| matches!(t, SessionType::External(bs) if bs.labels_subset_of(branches)),
                    )
                    .collect();
                first_success(
                    cands,
                    |t| {
                        let SessionType::External(bs) = t else {
                            unreachable!()
                        };
                        for (l, a) in bs.iter() {
                            let q = branches.get(l).expect("label checked");
                            check(sig, ctx, q, offer, &TypeMultiset::singleton(a.clone()))
                                .map_err(|e| e.within(format!("in branch {l} of case {ch}")))?;
                        }
                        Ok(())
                    },
                    || err(TypeErrorKind::NoRule).tried(theta.iter().cloned().collect()),
                )
            } else {
                // ⊕L
                let ts = ctx.get(ch).expect("subject checked");
                let cands: Vec<&SessionType> = ts
                    .distinct()
                    .filter(
                        |t| matches!(t, SessionType::Internal(bs) if bs.labels_subset_of(branches)),
                    )
                    .collect();
                first_success(
                    cands,
                    |t| {
                        let SessionType::Internal(bs) = t else {
                            unreachable!()
                        };
                        for (l, a) in bs.iter() {
                            let q = branches.get(l).expect("label checked");
                            let ext = ctx
                                .clone()
                                .with(ch.clone(), TypeMultiset::singleton(a.clone()));
                            check(sig, &ext, q, offer, theta)
                                .map_err(|e| e.within(format!("in branch {l} of case {ch}")))?;
                        }
                        Ok(())
                    },
                    || err(TypeErrorKind::NoRule).tried(ts.iter().cloned().collect()),
                )
            }
        }
        Process::Call(name) => {
            let Some(def) = sig.procdef(name) else {
                return Err(err(TypeErrorKind::UndefinedProc(name.to_string())));
            };
            if let Some(c) = ctx.channels().next() {
                return Err(err(TypeErrorKind::Unused(c.clone())));
            }
            let declared = TypeMultiset::singleton(def.declared.clone());
            if decide(sig, &declared, theta, &mut MemoTable::new()) {
                Ok(())
            } else {
                Err(err(TypeErrorKind::CallMismatch(theta.clone()))
                    .tried(vec![def.declared.clone()]))
            }
        }
    }
}

/// Checks a definition body against its declared type in the empty context.
pub fn check_def(sig: &Signature, name: &crate::ast::ProcName) -> Result<(), TypeError> {
    let def = sig
        .procdef(name)
        .unwrap_or_else(|| panic!("no definition for `{name}`"));
    check(
        sig,
        &ChannelContext::new(),
        &def.body,
        &def.offer,
        &TypeMultiset::singleton(def.declared.clone()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_process, parse_signature, parse_type};

    const NATS: &str = "
        type Nat = +{zero: 1, succ: Nat}
        type Pos = +{succ: Nat}
        type Even = +{zero: 1, succ: Odd}
        type Odd = +{succ: Even}
        proc z : Nat /\\ Even
          c <- z = c.zero; close c
        proc s : (Nat -o Nat) /\\ (Even -o Odd) /\\ (Odd -o Even)
          c <- s d = c.succ; c <- d
        proc s2 : Even -o Even
          c <- s2 d = d1 <- s d; c <- s d1
    ";

    fn ch(s: &str) -> Channel {
        Channel::new(s)
    }

    fn ms(sig: &Signature, tys: &[&str]) -> TypeMultiset {
        let _ = sig;
        tys.iter().map(|t| parse_type(t).unwrap()).collect()
    }

    fn ok(sig: &Signature, ctx: &[(&str, &str)], p: &str, theta: &str) -> Result<(), TypeError> {
        let cx: ChannelContext = ctx
            .iter()
            .map(|(c, t)| (ch(c), TypeMultiset::singleton(parse_type(t).unwrap())))
            .collect();
        let p = parse_process(p, sig).unwrap();
        check(sig, &cx, &p, &ch("c"), &ms(sig, &[theta]))
    }

    #[test]
    fn corpus_definitions() {
        let sig = parse_signature(NATS).unwrap();
        for def in sig.procdefs() {
            check_def(&sig, &def.name).unwrap_or_else(|e| panic!("{}: {e}", def.name));
        }
    }

    #[test]
    fn forward_uses_subtyping() {
        let sig = parse_signature(NATS).unwrap();
        assert!(ok(&sig, &[("d", "Nat")], "c <- d", "Nat").is_ok());
        assert!(ok(&sig, &[("d", "Even")], "c <- d", "Nat").is_ok());
        let e = ok(&sig, &[("d", "Nat")], "c <- d", "Even").unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::Subtype { .. }));
    }

    #[test]
    fn wrong_direction_fails() {
        let sig = parse_signature(NATS).unwrap();
        assert!(ok(&sig, &[], "c.succ; c.zero; close c", "Even").is_err());
        assert!(ok(&sig, &[], "c.succ; c.zero; close c", "Odd").is_ok());
    }

    #[test]
    fn intersections_split_the_goal() {
        let sig = parse_signature(NATS).unwrap();
        assert!(ok(&sig, &[], "c.zero; close c", "Nat /\\ Even").is_ok());
        assert!(ok(&sig, &[], "c.zero; close c", "Nat /\\ Odd").is_err());
        assert!(ok(&sig, &[], "c.zero; close c", "Odd \\/ Even").is_ok());
    }

    #[test]
    fn union_on_the_left_needs_both_cases() {
        let sig = parse_signature(NATS).unwrap();
        let body = "case d of { zero => wait d; c.zero; close c | succ => c.succ; c <- d }";
        assert!(ok(&sig, &[("d", "Even \\/ Odd")], body, "Nat").is_ok());
        assert!(ok(&sig, &[("d", "Even \\/ Odd")], body, "Pos").is_err());
    }

    #[test]
    fn extra_branches() {
        let sig = parse_signature(NATS).unwrap();
        // unused case branch on a used channel is fine
        let body = "case d of { zero => wait d; c.zero; close c | succ => c.succ; c <- d }";
        assert!(ok(&sig, &[("d", "+{zero: 1}")], body, "Nat").is_ok());
        // a missing one is not
        let body = "case d of { zero => wait d; c.zero; close c }";
        assert!(ok(&sig, &[("d", "Nat")], body, "Nat").is_err());
        let body = "case c of { a => close c | b => close c }";
        assert!(ok(&sig, &[], body, "&{a: 1}").is_ok());
        assert!(ok(&sig, &[], body, "&{a: 1, b: 1, x: 1}").is_err());
    }

    #[test]
    fn cut_needs_annotation_for_non_calls() {
        let sig = parse_signature(NATS).unwrap();
        let e = ok(&sig, &[], "x <- (x.zero; close x); c <- x", "Nat").unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::MissingAnnotation(_)));
        assert!(ok(&sig, &[], "x : Even <- (x.zero; close x); c <- x", "Nat").is_ok());
        assert!(ok(&sig, &[], "x <- z; c <- x", "Even").is_ok());
    }

    #[test]
    fn linearity() {
        let sig = parse_signature(NATS).unwrap();
        let e = ok(&sig, &[("d", "Nat")], "c.zero; close c", "Nat").unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::Unused(ch("d")));
        let e = ok(&sig, &[], "c <- d", "Nat").unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::Unbound(ch("d")));
    }

    #[test]
    fn split_context_cases() {
        let d = TypeMultiset::singleton(SessionType::End);
        let ctx = ChannelContext::new().with(ch("d"), d.clone());
        let uses = |cs: &[&str]| cs.iter().map(|c| ch(c)).collect::<BTreeSet<_>>();
        assert_eq!(
            split_context(&ctx, &uses(&["d"]), &uses(&[])).unwrap(),
            (ctx.clone(), ChannelContext::new())
        );
        assert_eq!(
            split_context(&ctx, &uses(&["d"]), &uses(&["d"])),
            Err(TypeErrorKind::UsedTwice(ch("d")))
        );
        assert_eq!(
            split_context(&ChannelContext::new(), &uses(&[]), &uses(&[])).unwrap(),
            (ChannelContext::new(), ChannelContext::new())
        );
    }

    #[test]
    fn shadowed_binder_is_renamed() {
        let sig = parse_signature(NATS).unwrap();
        // the inner `d` shadows the used channel of the same name
        let body = "e <- (d <- z; e <- d); wait d; c <- e";
        let p = parse_process(body, &sig).unwrap();
        let ctx = ChannelContext::new().with(ch("d"), TypeMultiset::singleton(SessionType::End));
        assert!(check(&sig, &ctx, &p, &ch("c"), &ms(&sig, &["Nat"])).is_err());
        let body = "e : Nat <- (d <- z; e <- d); wait d; c <- e";
        let p = parse_process(body, &sig).unwrap();
        check(&sig, &ctx, &p, &ch("c"), &ms(&sig, &["Nat"])).unwrap();
    }

    #[test]
    fn error_mentions_the_path() {
        let sig = parse_signature(NATS).unwrap();
        let e = ok(&sig, &[], "c.succ; c.succ; close c", "Nat").unwrap_err();
        assert_eq!(
            e.path,
            vec!["after c.succ".to_string(), "after c.succ".to_string()]
        );
        assert!(e.to_string().contains("close c"));
    }
}
