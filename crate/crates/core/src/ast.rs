//! Syntax trees for session types and process expressions.
//!
//! Types and processes are plain immutable trees. Channel binders follow the
//! usual scoping: the bound channel of a spawn scopes over both the child and
//! the continuation, the bound channel of a send scopes over the payload only,
//! and the bound channel of a receive scopes over its continuation.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

/// An interned identifier. Used for labels, type names and process names.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(Arc<str>);

impl Ident {
    pub fn new(s: &str) -> Self {
        Ident(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

impl From<String> for Ident {
    fn from(s: String) -> Self {
        Ident(Arc::from(s))
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type Label = Ident;
pub type TypeName = Ident;
pub type ProcName = Ident;

/// A channel name. Source programs only produce generation 0; fresh channels
/// created during renaming or execution carry a positive generation so they
/// can never collide with a source name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Channel {
    pub name: Ident,
    pub gen: u32,
}

impl Channel {
    pub fn new(name: &str) -> Self {
        Channel {
            name: Ident::new(name),
            gen: 0,
        }
    }

    pub fn with_gen(name: Ident, gen: u32) -> Self {
        Channel { name, gen }
    }

    /// A variant of `self` that does not occur in `avoid`.
    pub fn fresh_variant(&self, avoid: &impl Fn(&Channel) -> bool) -> Channel {
        let mut gen = self.gen.max(1);
        loop {
            let c = Channel::with_gen(self.name.clone(), gen);
            if !avoid(&c) {
                return c;
            }
            gen += 1;
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gen == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}#{}", self.name, self.gen)
        }
    }
}

impl fmt::Debug for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchError {
    #[error("choice must have at least one branch")]
    Empty,
    #[error("duplicate label `{0}`")]
    Duplicate(Label),
}

/// A label-indexed family, kept sorted by label so that equality, ordering
/// and hashing are independent of the order the branches were written in.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branches<T> {
    entries: Vec<(Label, T)>,
}

impl<T> Branches<T> {
    pub fn new(entries: Vec<(Label, T)>) -> Result<Self, BranchError> {
        let mut entries = entries;
        if entries.is_empty() {
            return Err(BranchError::Empty);
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(BranchError::Duplicate(w[0].0.clone()));
            }
        }
        Ok(Branches { entries })
    }

    pub fn get(&self, label: &Label) -> Option<&T> {
        self.entries
            .binary_search_by(|(l, _)| l.cmp(label))
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.get(label).is_some()
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.entries.iter().map(|(l, _)| l)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &T)> {
        self.entries.iter().map(|(l, t)| (l, t))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Label-set inclusion `self ⊆ other`.
    pub fn labels_subset_of<U>(&self, other: &Branches<U>) -> bool {
        self.labels().all(|l| other.contains(l))
    }

    /// Structure-preserving map; labels are unchanged so the invariant holds.
    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Branches<U> {
        Branches {
            entries: self
                .entries
                .iter()
                .map(|(l, t)| (l.clone(), f(t)))
                .collect(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Branches<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SessionType {
    /// `1`: send `end` and terminate.
    End,
    /// `A * B`: send a channel of type A, continue as B.
    Tensor(Box<SessionType>, Box<SessionType>),
    /// `A -o B`: receive a channel of type A, continue as B.
    Lolli(Box<SessionType>, Box<SessionType>),
    /// `+{l: A, ...}`: provider sends a label.
    Internal(Branches<SessionType>),
    /// `&{l: A, ...}`: client sends a label.
    External(Branches<SessionType>),
    Meet(Box<SessionType>, Box<SessionType>),
    Join(Box<SessionType>, Box<SessionType>),
    Name(TypeName),
}

impl SessionType {
    pub fn tensor(a: SessionType, b: SessionType) -> Self {
        SessionType::Tensor(Box::new(a), Box::new(b))
    }

    pub fn lolli(a: SessionType, b: SessionType) -> Self {
        SessionType::Lolli(Box::new(a), Box::new(b))
    }

    pub fn meet(a: SessionType, b: SessionType) -> Self {
        SessionType::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: SessionType, b: SessionType) -> Self {
        SessionType::Join(Box::new(a), Box::new(b))
    }

    pub fn name(n: &str) -> Self {
        SessionType::Name(Ident::new(n))
    }

    /// Panics on an empty or duplicate label list; meant for literals.
    pub fn internal<'a>(branches: impl IntoIterator<Item = (&'a str, SessionType)>) -> Self {
        SessionType::Internal(
            Branches::new(
                branches
                    .into_iter()
                    .map(|(l, t)| (Ident::new(l), t))
                    .collect(),
            )
            .expect("valid branch list"),
        )
    }

    /// Panics on an empty or duplicate label list; meant for literals.
    pub fn external<'a>(branches: impl IntoIterator<Item = (&'a str, SessionType)>) -> Self {
        SessionType::External(
            Branches::new(
                branches
                    .into_iter()
                    .map(|(l, t)| (Ident::new(l), t))
                    .collect(),
            )
            .expect("valid branch list"),
        )
    }

    /// Structural types correspond to a specific process form; intersections,
    /// unions and names do not.
    pub fn is_structural(&self) -> bool {
        !matches!(
            self,
            SessionType::Meet(..) | SessionType::Join(..) | SessionType::Name(_)
        )
    }

    /// Calls `f` on every type name occurring in `self`.
    pub fn for_each_name(&self, f: &mut impl FnMut(&TypeName)) {
        match self {
            SessionType::End => {}
            SessionType::Tensor(a, b)
            | SessionType::Lolli(a, b)
            | SessionType::Meet(a, b)
            | SessionType::Join(a, b) => {
                a.for_each_name(f);
                b.for_each_name(f);
            }
            SessionType::Internal(bs) | SessionType::External(bs) => {
                for (_, t) in bs.iter() {
                    t.for_each_name(f);
                }
            }
            SessionType::Name(n) => f(n),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            SessionType::End | SessionType::Name(_) => 1,
            SessionType::Tensor(a, b)
            | SessionType::Lolli(a, b)
            | SessionType::Meet(a, b)
            | SessionType::Join(a, b) => 1 + a.size() + b.size(),
            SessionType::Internal(bs) | SessionType::External(bs) => {
                1 + bs.iter().map(|(_, t)| t.size()).sum::<usize>()
            }
        }
    }
}

impl fmt::Debug for SessionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Process {
    /// `x <- P; Q`, optionally annotated with the type of `x`.
    Spawn {
        bound: Channel,
        annot: Option<SessionType>,
        child: Box<Process>,
        cont: Box<Process>,
    },
    /// `offer <- from`
    Fwd {
        offer: Channel,
        from: Channel,
    },
    Close(Channel),
    Wait(Channel, Box<Process>),
    /// `send ch (bound <- payload); cont`. Used both for `⊗` on the offered
    /// channel and for `⊸` on a used channel.
    Send {
        ch: Channel,
        bound: Channel,
        payload: Box<Process>,
        cont: Box<Process>,
    },
    /// `bound <- recv ch; cont`
    Recv {
        bound: Channel,
        ch: Channel,
        cont: Box<Process>,
    },
    Select {
        ch: Channel,
        label: Label,
        cont: Box<Process>,
    },
    Case {
        ch: Channel,
        branches: Branches<Process>,
    },
    Call(ProcName),
}

impl fmt::Debug for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Process {
    pub fn fwd(offer: Channel, from: Channel) -> Self {
        Process::Fwd { offer, from }
    }

    pub fn close(ch: Channel) -> Self {
        Process::Close(ch)
    }

    pub fn wait(ch: Channel, cont: Process) -> Self {
        Process::Wait(ch, Box::new(cont))
    }

    pub fn spawn(
        bound: Channel,
        annot: Option<SessionType>,
        child: Process,
        cont: Process,
    ) -> Self {
        Process::Spawn {
            bound,
            annot,
            child: Box::new(child),
            cont: Box::new(cont),
        }
    }

    pub fn send(ch: Channel, bound: Channel, payload: Process, cont: Process) -> Self {
        Process::Send {
            ch,
            bound,
            payload: Box::new(payload),
            cont: Box::new(cont),
        }
    }

    pub fn recv(bound: Channel, ch: Channel, cont: Process) -> Self {
        Process::Recv {
            bound,
            ch,
            cont: Box::new(cont),
        }
    }

    pub fn select(ch: Channel, label: &str, cont: Process) -> Self {
        Process::Select {
            ch,
            label: Ident::new(label),
            cont: Box::new(cont),
        }
    }

    pub fn call(name: &str) -> Self {
        Process::Call(Ident::new(name))
    }

    /// The channel this process acts on first, if its head is a communication.
    pub fn subject(&self) -> Option<&Channel> {
        match self {
            Process::Close(c)
            | Process::Wait(c, _)
            | Process::Send { ch: c, .. }
            | Process::Recv { ch: c, .. }
            | Process::Select { ch: c, .. }
            | Process::Case { ch: c, .. } => Some(c),
            Process::Spawn { .. } | Process::Fwd { .. } | Process::Call(_) => None,
        }
    }

    /// Short description of the head form, used in diagnostics and traces.
    pub fn head(&self) -> String {
        match self {
            Process::Spawn { bound, annot, .. } => match annot {
                Some(a) => format!("{bound} : {a} <- ..."),
                None => format!("{bound} <- ..."),
            },
            Process::Fwd { offer, from } => format!("{offer} <- {from}"),
            Process::Close(c) => format!("close {c}"),
            Process::Wait(c, _) => format!("wait {c}"),
            Process::Send { ch, bound, .. } => format!("send {ch} ({bound} <- ...)"),
            Process::Recv { bound, ch, .. } => format!("{bound} <- recv {ch}"),
            Process::Select { ch, label, .. } => format!("{ch}.{label}"),
            Process::Case { ch, .. } => format!("case {ch} of ..."),
            Process::Call(x) => x.to_string(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Process::Spawn { child, cont, .. } => 1 + child.size() + cont.size(),
            Process::Fwd { .. } | Process::Close(_) | Process::Call(_) => 1,
            Process::Wait(_, p) => 1 + p.size(),
            Process::Send { payload, cont, .. } => 1 + payload.size() + cont.size(),
            Process::Recv { cont, .. } | Process::Select { cont, .. } => 1 + cont.size(),
            Process::Case { branches, .. } => {
                1 + branches.iter().map(|(_, p)| p.size()).sum::<usize>()
            }
        }
    }

    /// Every channel name occurring in the term, free or bound.
    pub fn all_channels(&self, out: &mut HashSet<Channel>) {
        match self {
            Process::Spawn {
                bound, child, cont, ..
            } => {
                out.insert(bound.clone());
                child.all_channels(out);
                cont.all_channels(out);
            }
            Process::Fwd { offer, from } => {
                out.insert(offer.clone());
                out.insert(from.clone());
            }
            Process::Close(c) => {
                out.insert(c.clone());
            }
            Process::Wait(c, p) => {
                out.insert(c.clone());
                p.all_channels(out);
            }
            Process::Send {
                ch,
                bound,
                payload,
                cont,
            } => {
                out.insert(ch.clone());
                out.insert(bound.clone());
                payload.all_channels(out);
                cont.all_channels(out);
            }
            Process::Recv { bound, ch, cont } => {
                out.insert(bound.clone());
                out.insert(ch.clone());
                cont.all_channels(out);
            }
            Process::Select { ch, cont, .. } => {
                out.insert(ch.clone());
                cont.all_channels(out);
            }
            Process::Case { ch, branches } => {
                out.insert(ch.clone());
                for (_, p) in branches.iter() {
                    p.all_channels(out);
                }
            }
            Process::Call(_) => {}
        }
    }

    /// Calls `f` on every annotation and every called definition name.
    pub fn visit(
        &self,
        on_type: &mut impl FnMut(&SessionType),
        on_call: &mut impl FnMut(&ProcName),
    ) {
        match self {
            Process::Spawn {
                annot, child, cont, ..
            } => {
                if let Some(a) = annot {
                    on_type(a);
                }
                child.visit(on_type, on_call);
                cont.visit(on_type, on_call);
            }
            Process::Fwd { .. } | Process::Close(_) => {}
            Process::Wait(_, p)
            | Process::Recv { cont: p, .. }
            | Process::Select { cont: p, .. } => p.visit(on_type, on_call),
            Process::Send { payload, cont, .. } => {
                payload.visit(on_type, on_call);
                cont.visit(on_type, on_call);
            }
            Process::Case { branches, .. } => {
                for (_, p) in branches.iter() {
                    p.visit(on_type, on_call);
                }
            }
            Process::Call(x) => on_call(x),
        }
    }
}

/// The set of channels occurring free in `term`.
pub fn free_channels(term: &Process) -> BTreeSet<Channel> {
    let mut out = BTreeSet::new();
    collect_free(term, &mut out);
    out
}

fn collect_free(term: &Process, out: &mut BTreeSet<Channel>) {
    let scoped = |p: &Process, bound: &Channel, out: &mut BTreeSet<Channel>| {
        let mut inner = BTreeSet::new();
        collect_free(p, &mut inner);
        inner.remove(bound);
        out.extend(inner);
    };
    match term {
        Process::Spawn {
            bound, child, cont, ..
        } => {
            scoped(child, bound, out);
            scoped(cont, bound, out);
        }
        Process::Fwd { offer, from } => {
            out.insert(offer.clone());
            out.insert(from.clone());
        }
        Process::Close(c) => {
            out.insert(c.clone());
        }
        Process::Wait(c, p) => {
            out.insert(c.clone());
            collect_free(p, out);
        }
        Process::Send {
            ch,
            bound,
            payload,
            cont,
        } => {
            out.insert(ch.clone());
            scoped(payload, bound, out);
            collect_free(cont, out);
        }
        Process::Recv { bound, ch, cont } => {
            out.insert(ch.clone());
            scoped(cont, bound, out);
        }
        Process::Select { ch, cont, .. } => {
            out.insert(ch.clone());
            collect_free(cont, out);
        }
        Process::Case { ch, branches } => {
            out.insert(ch.clone());
            for (_, p) in branches.iter() {
                collect_free(p, out);
            }
        }
        Process::Call(_) => {}
    }
}

pub fn occurs_free(term: &Process, c: &Channel) -> bool {
    free_channels(term).contains(c)
}

/// Capture-avoiding substitution `[new/old]term`.
pub fn subst_channel(term: &Process, new: &Channel, old: &Channel) -> Process {
    if new == old {
        return term.clone();
    }
    let rn = |c: &Channel| if c == old { new.clone() } else { c.clone() };
    match term {
        Process::Spawn {
            bound,
            annot,
            child,
            cont,
        } => {
            let scope = [child.as_ref(), cont.as_ref()];
            let (b, scope) = under_binder(bound, &scope, new, old);
            Process::Spawn {
                bound: b,
                annot: annot.clone(),
                child: Box::new(scope[0].clone()),
                cont: Box::new(scope[1].clone()),
            }
        }
        Process::Fwd { offer, from } => Process::Fwd {
            offer: rn(offer),
            from: rn(from),
        },
        Process::Close(c) => Process::Close(rn(c)),
        Process::Wait(c, p) => Process::Wait(rn(c), Box::new(subst_channel(p, new, old))),
        Process::Send {
            ch,
            bound,
            payload,
            cont,
        } => {
            let (b, scope) = under_binder(bound, &[payload.as_ref()], new, old);
            Process::Send {
                ch: rn(ch),
                bound: b,
                payload: Box::new(scope[0].clone()),
                cont: Box::new(subst_channel(cont, new, old)),
            }
        }
        Process::Recv { bound, ch, cont } => {
            let (b, scope) = under_binder(bound, &[cont.as_ref()], new, old);
            Process::Recv {
                bound: b,
                ch: rn(ch),
                cont: Box::new(scope[0].clone()),
            }
        }
        Process::Select { ch, label, cont } => Process::Select {
            ch: rn(ch),
            label: label.clone(),
            cont: Box::new(subst_channel(cont, new, old)),
        },
        Process::Case { ch, branches } => Process::Case {
            ch: rn(ch),
            branches: branches.map(|p| subst_channel(p, new, old)),
        },
        Process::Call(x) => Process::Call(x.clone()),
    }
}

/// Substitutes under a binder, renaming the binder first if it would capture `new`.
fn under_binder(
    bound: &Channel,
    scope: &[&Process],
    new: &Channel,
    old: &Channel,
) -> (Channel, Vec<Process>) {
    if bound == old || !scope.iter().any(|p| occurs_free(p, old)) {
        return (bound.clone(), scope.iter().map(|p| (*p).clone()).collect());
    }
    if bound != new {
        let body = scope.iter().map(|p| subst_channel(p, new, old)).collect();
        return (bound.clone(), body);
    }
    let mut used = HashSet::new();
    for p in scope {
        p.all_channels(&mut used);
    }
    used.insert(new.clone());
    used.insert(old.clone());
    let fresh = bound.fresh_variant(&|c| used.contains(c));
    let body = scope
        .iter()
        .map(|p| subst_channel(&subst_channel(p, &fresh, bound), new, old))
        .collect();
    (fresh, body)
}

/// Renames the binder `bound` of a scope to `fresh` (which must not occur in it).
pub fn rename_bound(scope: &Process, fresh: &Channel, bound: &Channel) -> Process {
    subst_channel(scope, fresh, bound)
}

/// Removes every cut annotation.
pub fn erase(term: &Process) -> Process {
    match term {
        Process::Spawn {
            bound, child, cont, ..
        } => Process::Spawn {
            bound: bound.clone(),
            annot: None,
            child: Box::new(erase(child)),
            cont: Box::new(erase(cont)),
        },
        Process::Fwd { .. } | Process::Close(_) | Process::Call(_) => term.clone(),
        Process::Wait(c, p) => Process::Wait(c.clone(), Box::new(erase(p))),
        Process::Send {
            ch,
            bound,
            payload,
            cont,
        } => Process::Send {
            ch: ch.clone(),
            bound: bound.clone(),
            payload: Box::new(erase(payload)),
            cont: Box::new(erase(cont)),
        },
        Process::Recv { bound, ch, cont } => Process::Recv {
            bound: bound.clone(),
            ch: ch.clone(),
            cont: Box::new(erase(cont)),
        },
        Process::Select { ch, label, cont } => Process::Select {
            ch: ch.clone(),
            label: label.clone(),
            cont: Box::new(erase(cont)),
        },
        Process::Case { ch, branches } => Process::Case {
            ch: ch.clone(),
            branches: branches.map(erase),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcDef {
    pub name: ProcName,
    /// Channel the body provides along; bound in `body`.
    pub offer: Channel,
    pub declared: SessionType,
    pub body: Process,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("type `{0}` is defined more than once")]
    DuplicateType(TypeName),
    #[error("process `{0}` is defined more than once")]
    DuplicateProc(ProcName),
    #[error("undefined type name `{0}`")]
    UndefinedType(TypeName),
}

/// Mutually recursive type and process definitions. Equality ignores
/// declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    types: IndexMap<TypeName, SessionType>,
    procs: IndexMap<ProcName, ProcDef>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_type(&mut self, name: TypeName, body: SessionType) -> Result<(), SignatureError> {
        if self.types.contains_key(&name) {
            return Err(SignatureError::DuplicateType(name));
        }
        self.types.insert(name, body);
        Ok(())
    }

    pub fn add_proc(&mut self, def: ProcDef) -> Result<(), SignatureError> {
        if self.procs.contains_key(&def.name) {
            return Err(SignatureError::DuplicateProc(def.name));
        }
        self.procs.insert(def.name.clone(), def);
        Ok(())
    }

    pub fn typedef(&self, name: &TypeName) -> Option<&SessionType> {
        self.types.get(name)
    }

    pub fn procdef(&self, name: &ProcName) -> Option<&ProcDef> {
        self.procs.get(name)
    }

    /// Type definitions in declaration order.
    pub fn typedefs(&self) -> impl Iterator<Item = (&TypeName, &SessionType)> {
        self.types.iter()
    }

    /// Process definitions in declaration order.
    pub fn procdefs(&self) -> impl Iterator<Item = &ProcDef> {
        self.procs.values()
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty() && self.procs.is_empty()
    }

    pub fn procdef_mut(&mut self, name: &ProcName) -> Option<&mut ProcDef> {
        self.procs.get_mut(name)
    }
}

/// One-step unfolding of a defined type name.
pub fn unfold<'s>(sig: &'s Signature, t: &TypeName) -> Result<&'s SessionType, SignatureError> {
    sig.typedef(t)
        .ok_or_else(|| SignatureError::UndefinedType(t.clone()))
}
