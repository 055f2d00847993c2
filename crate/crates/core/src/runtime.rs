//! Configurations of running processes and their multiset rewriting
//! semantics.
//!
//! A configuration maps each channel to the process providing it. Channels
//! that no process uses are observed by the environment, which drains labels,
//! closes and sent channels from them. Every channel with a known type is
//! tracked by a monitor that rejects messages no type alternative explains.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ast::{free_channels, subst_channel, Channel, Label, Process, SessionType, Signature};
use crate::parser::desugar_call;
use crate::subtype::TypeMultiset;
use crate::typecheck::{check, ChannelContext, TypeError};

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Fwd,
    Spawn,
    DefUnfold,
    Close,
    SendTensor,
    Select,
    SendLolli,
    CaseRecv,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Fwd => "fwd",
            StepKind::Spawn => "spawn",
            StepKind::DefUnfold => "defunfold",
            StepKind::Close => "close",
            StepKind::SendTensor => "send-tensor",
            StepKind::Select => "select",
            StepKind::SendLolli => "send-lolli",
            StepKind::CaseRecv => "case-recv",
        })
    }
}

/// One enabled rewrite.
///
/// `subjects[0]` is the process the rule fires on (for communication, the
/// provider of the channel). Communication with a process client adds the
/// client's label as `subjects[1]`; with the environment there is no second
/// subject. `fwd` lists the forwarder and the channel it forwards from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepEvent {
    pub kind: StepKind,
    pub subjects: Vec<Channel>,
    pub label: Option<Label>,
    pub fresh: Option<Channel>,
}

impl StepEvent {
    fn new(kind: StepKind, subjects: Vec<Channel>) -> Self {
        StepEvent {
            kind,
            subjects,
            label: None,
            fresh: None,
        }
    }

    fn labelled(mut self, l: &Label) -> Self {
        self.label = Some(l.clone());
        self
    }

    /// Communication with the environment rather than another process.
    pub fn is_observation(&self) -> bool {
        !matches!(
            self.kind,
            StepKind::Fwd | StepKind::Spawn | StepKind::DefUnfold
        ) && self.subjects.len() == 1
    }
}

impl fmt::Display for StepEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.kind)?;
        let subjects: Vec<String> = self.subjects.iter().map(ToString::to_string).collect();
        f.write_str(&subjects.join(","))?;
        if let Some(a) = &self.fresh {
            write!(f, ",+{a}")?;
        }
        if let Some(l) = &self.label {
            write!(f, " {l}")?;
        }
        Ok(())
    }
}

/// What the environment saw on one observed channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observation {
    Label(Label),
    End,
    /// A channel was received; its own observations form another stream.
    Channel(Channel),
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Label(l) => write!(f, "{l}"),
            Observation::End => f.write_str("end"),
            Observation::Channel(c) => write!(f, "<{c}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fidelity violation on `{channel}`: `{event}` is not allowed by {before}")]
pub struct FidelityViolation {
    pub channel: Channel,
    pub event: StepEvent,
    pub before: TypeMultiset,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("channel `{0}` is used by more than one process")]
    SharedChannel(Channel),
    #[error("channel `{0}` is used but no process provides it")]
    Unclaimed(Channel),
    #[error("cyclic dependency through `{0}`")]
    Cycle(Channel),
    #[error("no interface type for `{0}`")]
    MissingInterface(Channel),
    #[error("process providing `{channel}` is ill-typed: {error}")]
    Type {
        channel: Channel,
        error: Box<TypeError>,
    },
    #[error("undefined process `{0}`")]
    UndefinedProc(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    procs: BTreeMap<Channel, Process>,
    next_gen: u32,
    monitor: BTreeMap<Channel, TypeMultiset>,
    observed: BTreeMap<Channel, usize>,
    streams: Vec<(Channel, Vec<Observation>)>,
}

/// Unfolds names and flattens intersections and unions until only
/// structural types remain.
fn flatten(sig: &Signature, types: impl IntoIterator<Item = SessionType>) -> TypeMultiset {
    let mut seen = HashSet::new();
    let mut out = BTreeSet::new();
    let mut work: Vec<SessionType> = types.into_iter().collect();
    while let Some(t) = work.pop() {
        match t {
            SessionType::Meet(a, b) | SessionType::Join(a, b) => {
                work.push(*a);
                work.push(*b);
            }
            SessionType::Name(n) => {
                if seen.insert(n.clone()) {
                    if let Some(body) = sig.typedef(&n) {
                        work.push(body.clone());
                    }
                }
            }
            structural => {
                out.insert(structural);
            }
        }
    }
    out.into_iter().collect()
}

fn max_gen(p: &Process) -> u32 {
    let mut all = HashSet::new();
    p.all_channels(&mut all);
    all.iter().map(|c| c.gen).max().unwrap_or(0)
}

impl Configuration {
    /// A configuration with a monitor entry for every channel in `interface`.
    /// Channels that no process uses are observed by the environment.
    pub fn new(
        sig: &Signature,
        procs: BTreeMap<Channel, Process>,
        interface: &BTreeMap<Channel, SessionType>,
    ) -> Self {
        let next_gen = procs
            .iter()
            .map(|(c, p)| c.gen.max(max_gen(p)))
            .max()
            .unwrap_or(0)
            + 1;
        let monitor = interface
            .iter()
            .map(|(c, t)| (c.clone(), flatten(sig, [t.clone()])))
            .collect();
        let mut cfg = Configuration {
            procs,
            next_gen,
            monitor,
            observed: BTreeMap::new(),
            streams: Vec::new(),
        };
        let used: BTreeSet<Channel> = cfg.procs.keys().flat_map(|c| cfg.uses(c)).collect();
        let roots: Vec<Channel> = cfg
            .procs
            .keys()
            .filter(|c| !used.contains(c))
            .cloned()
            .collect();
        for r in roots {
            cfg.observe(r);
        }
        cfg
    }

    /// `root <- entry` for a definition without parameters.
    pub fn main(sig: &Signature, entry: &str) -> Result<Self, ConfigError> {
        let def = sig
            .procdef(&entry.into())
            .ok_or_else(|| ConfigError::UndefinedProc(entry.to_string()))?;
        let root = Channel::new("root");
        let procs = BTreeMap::from([(root.clone(), Process::call(entry))]);
        let interface = BTreeMap::from([(root, def.declared.clone())]);
        Ok(Configuration::new(sig, procs, &interface))
    }

    fn observe(&mut self, c: Channel) {
        self.observed.insert(c.clone(), self.streams.len());
        self.streams.push((c, Vec::new()));
    }

    pub fn procs(&self) -> &BTreeMap<Channel, Process> {
        &self.procs
    }

    pub fn monitor(&self) -> &BTreeMap<Channel, TypeMultiset> {
        &self.monitor
    }

    /// Observation streams in the order their channels reached the environment.
    pub fn streams(&self) -> &[(Channel, Vec<Observation>)] {
        &self.streams
    }

    /// The first observed stream.
    pub fn root_trace(&self) -> &[Observation] {
        self.streams
            .first()
            .map(|(_, o)| o.as_slice())
            .unwrap_or(&[])
    }

    /// Channels used by the process providing `c`.
    pub fn uses(&self, c: &Channel) -> BTreeSet<Channel> {
        let mut fc = self.procs.get(c).map(free_channels).unwrap_or_default();
        fc.remove(c);
        fc
    }

    fn fresh(&mut self, base: &Channel) -> Channel {
        let a = Channel::with_gen(base.name.clone(), self.next_gen);
        self.next_gen += 1;
        assert!(
            !self.procs.contains_key(&a),
            "fresh channel `{a}` already provided"
        );
        a
    }

    /// The process, other than its provider, whose next action is on `c`.
    fn client_of(&self, c: &Channel) -> Option<(&Channel, &Process)> {
        self.procs
            .iter()
            .find(|(e, p)| *e != c && p.subject() == Some(c))
    }

    /// All enabled rewrites, in channel order.
    pub fn enabled(&self) -> Vec<StepEvent> {
        let mut out = Vec::new();
        for (c, p) in &self.procs {
            let env = self.observed.contains_key(c);
            match p {
                Process::Fwd { from, .. } => {
                    out.push(StepEvent::new(StepKind::Fwd, vec![c.clone(), from.clone()]))
                }
                Process::Spawn { .. } => out.push(StepEvent::new(StepKind::Spawn, vec![c.clone()])),
                Process::Call(_) => out.push(StepEvent::new(StepKind::DefUnfold, vec![c.clone()])),
                Process::Close(x) if x == c => match self.client_of(c) {
                    Some((e, Process::Wait(..))) => {
                        out.push(StepEvent::new(StepKind::Close, vec![c.clone(), e.clone()]))
                    }
                    None if env => out.push(StepEvent::new(StepKind::Close, vec![c.clone()])),
                    _ => {}
                },
                Process::Send { ch, .. } if ch == c => match self.client_of(c) {
                    Some((e, Process::Recv { .. })) => out.push(StepEvent::new(
                        StepKind::SendTensor,
                        vec![c.clone(), e.clone()],
                    )),
                    None if env => out.push(StepEvent::new(StepKind::SendTensor, vec![c.clone()])),
                    _ => {}
                },
                Process::Select { ch, label, .. } if ch == c => match self.client_of(c) {
                    Some((e, Process::Case { branches, .. })) if branches.contains(label) => out
                        .push(
                            StepEvent::new(StepKind::Select, vec![c.clone(), e.clone()])
                                .labelled(label),
                        ),
                    None if env => {
                        out.push(StepEvent::new(StepKind::Select, vec![c.clone()]).labelled(label))
                    }
                    _ => {}
                },
                Process::Recv { ch, .. } if ch == c => {
                    if let Some((e, Process::Send { .. })) = self.client_of(c) {
                        out.push(StepEvent::new(
                            StepKind::SendLolli,
                            vec![c.clone(), e.clone()],
                        ))
                    }
                }
                Process::Case { ch, branches } if ch == c => {
                    if let Some((e, Process::Select { label, .. })) = self.client_of(c) {
                        if branches.contains(label) {
                            out.push(
                                StepEvent::new(StepKind::CaseRecv, vec![c.clone(), e.clone()])
                                    .labelled(label),
                            )
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }

    fn take(&mut self, c: &Channel) -> Process {
        self.procs
            .remove(c)
            .unwrap_or_else(|| panic!("no process provides `{c}`"))
    }

    /// Steps the monitor of `c` through an event. Returns the types of a
    /// transmitted channel, if any.
    fn track(
        &mut self,
        sig: &Signature,
        c: &Channel,
        event: &StepEvent,
    ) -> Result<Option<TypeMultiset>, FidelityViolation> {
        let Some(before) = self.monitor.get(c).cloned() else {
            return Ok(None);
        };
        let violation = || FidelityViolation {
            channel: c.clone(),
            event: event.clone(),
            before: before.clone(),
        };
        let mut after = Vec::new();
        let mut payload = Vec::new();
        for t in before.iter() {
            match (event.kind, t) {
                (StepKind::Close, SessionType::End) => {
                    self.monitor.remove(c);
                    return Ok(None);
                }
                (StepKind::SendTensor, SessionType::Tensor(a, b))
                | (StepKind::SendLolli, SessionType::Lolli(a, b)) => {
                    payload.push((**a).clone());
                    after.push((**b).clone());
                }
                (StepKind::Select, SessionType::Internal(bs))
                | (StepKind::CaseRecv, SessionType::External(bs)) => {
                    if let Some(a) = bs.get(event.label.as_ref().expect("labelled event")) {
                        after.push(a.clone());
                    }
                }
                _ => {}
            }
        }
        if after.is_empty() {
            return Err(violation());
        }
        self.monitor.insert(c.clone(), flatten(sig, after));
        Ok((!payload.is_empty()).then(|| flatten(sig, payload)))
    }

    fn record(&mut self, c: &Channel, o: Observation) {
        let i = self.observed[c];
        self.streams[i].1.push(o);
    }

    /// Applies one enabled rewrite.
    pub fn step(
        &mut self,
        sig: &Signature,
        event: &StepEvent,
    ) -> Result<StepEvent, FidelityViolation> {
        let c = event.subjects[0].clone();
        let client = event.subjects.get(1).cloned();
        let mut done = event.clone();
        match event.kind {
            StepKind::Fwd => {
                let Process::Fwd { from: d, .. } = self.take(&c) else {
                    panic!("not a forward")
                };
                self.procs = std::mem::take(&mut self.procs)
                    .into_iter()
                    .map(|(k, p)| (k, subst_channel(&p, &d, &c)))
                    .collect();
                if let Some(ts) = self.monitor.remove(&c) {
                    self.monitor.entry(d.clone()).or_insert(ts);
                }
                if let Some(i) = self.observed.remove(&c) {
                    self.observed.insert(d.clone(), i);
                    self.streams[i].0 = d;
                }
            }
            StepKind::Spawn => {
                let Process::Spawn {
                    bound,
                    annot,
                    child,
                    cont,
                } = self.take(&c)
                else {
                    panic!("not a spawn")
                };
                let a = self.fresh(&bound);
                let ty = annot.or_else(|| match child.as_ref() {
                    Process::Call(x) => sig.procdef(x).map(|d| d.declared.clone()),
                    _ => None,
                });
                if let Some(t) = ty {
                    self.monitor.insert(a.clone(), flatten(sig, [t]));
                }
                self.procs
                    .insert(a.clone(), subst_channel(&child, &a, &bound));
                self.procs.insert(c, subst_channel(&cont, &a, &bound));
                done.fresh = Some(a);
            }
            StepKind::DefUnfold => {
                let Process::Call(x) = self.take(&c) else {
                    panic!("not a call")
                };
                let def = sig
                    .procdef(&x)
                    .unwrap_or_else(|| panic!("undefined process `{x}`"));
                self.procs
                    .insert(c.clone(), subst_channel(&def.body, &c, &def.offer));
            }
            StepKind::Close => {
                self.track(sig, &c, event)?;
                self.take(&c);
                match client {
                    Some(e) => {
                        let Process::Wait(_, p) = self.take(&e) else {
                            panic!("not a wait")
                        };
                        self.procs.insert(e, *p);
                    }
                    None => {
                        self.record(&c, Observation::End);
                        self.observed.remove(&c);
                    }
                }
            }
            StepKind::SendTensor | StepKind::SendLolli => {
                let payload_types = self.track(sig, &c, event)?;
                let (sender, receiver) = match event.kind {
                    StepKind::SendTensor => (c.clone(), client.clone()),
                    _ => (client.clone().expect("client"), Some(c.clone())),
                };
                let Process::Send {
                    bound,
                    payload,
                    cont,
                    ..
                } = self.take(&sender)
                else {
                    panic!("not a send")
                };
                let a = self.fresh(&bound);
                if let Some(ts) = payload_types {
                    self.monitor.insert(a.clone(), ts);
                }
                self.procs
                    .insert(a.clone(), subst_channel(&payload, &a, &bound));
                self.procs.insert(sender, *cont);
                match receiver {
                    Some(r) => {
                        let Process::Recv { bound: y, cont, .. } = self.take(&r) else {
                            panic!("not a receive")
                        };
                        self.procs.insert(r, subst_channel(&cont, &a, &y));
                    }
                    None => {
                        self.record(&c, Observation::Channel(a.clone()));
                        self.observe(a.clone());
                    }
                }
                done.fresh = Some(a);
            }
            StepKind::Select | StepKind::CaseRecv => {
                self.track(sig, &c, event)?;
                let label = event.label.clone().expect("labelled event");
                let (selector, chooser) = match event.kind {
                    StepKind::Select => (c.clone(), client.clone()),
                    _ => (client.clone().expect("client"), Some(c.clone())),
                };
                let Process::Select { cont, .. } = self.take(&selector) else {
                    panic!("not a select")
                };
                self.procs.insert(selector, *cont);
                match chooser {
                    Some(k) => {
                        let Process::Case { branches, .. } = self.take(&k) else {
                            panic!("not a case")
                        };
                        let branch = branches.get(&label).expect("enabled label").clone();
                        self.procs.insert(k, branch);
                    }
                    None => self.record(&c, Observation::Label(label)),
                }
            }
        }
        Ok(done)
    }

    /// Every process waits on its own client.
    pub fn is_poised(&self) -> bool {
        self.procs.iter().all(|(c, p)| poised(p, c))
    }

    /// Checks that used-channel edges form a forest over provided channels.
    pub fn check_forest(&self) -> Result<(), ConfigError> {
        forest(&self.procs).map(|_| ())
    }
}

/// The next action of `p` is on the channel it provides.
pub fn poised(p: &Process, offer: &Channel) -> bool {
    match p {
        Process::Close(c)
        | Process::Recv { ch: c, .. }
        | Process::Send { ch: c, .. }
        | Process::Select { ch: c, .. }
        | Process::Case { ch: c, .. } => c == offer,
        _ => false,
    }
}

/// Used channels of every process, after checking the forest shape.
fn forest(
    procs: &BTreeMap<Channel, Process>,
) -> Result<BTreeMap<Channel, BTreeSet<Channel>>, ConfigError> {
    let mut uses = BTreeMap::new();
    let mut user: BTreeMap<Channel, Channel> = BTreeMap::new();
    for (c, p) in procs {
        let mut fc = free_channels(p);
        fc.remove(c);
        for d in &fc {
            if !procs.contains_key(d) {
                return Err(ConfigError::Unclaimed(d.clone()));
            }
            if user.insert(d.clone(), c.clone()).is_some() {
                return Err(ConfigError::SharedChannel(d.clone()));
            }
        }
        uses.insert(c.clone(), fc);
    }
    // With at most one user per channel, a cycle is a chain of users that
    // returns to its start.
    for start in procs.keys() {
        let mut at = start;
        let mut steps = 0;
        while let Some(u) = user.get(at) {
            steps += 1;
            if u == start || steps > procs.len() {
                return Err(ConfigError::Cycle(start.clone()));
            }
            at = u;
        }
    }
    Ok(uses)
}

/// Types a configuration: the used channels form a forest and every process
/// checks against its interface type with its children's types as context.
pub fn config_check(
    sig: &Signature,
    procs: &BTreeMap<Channel, Process>,
    interface: &BTreeMap<Channel, SessionType>,
) -> Result<(), ConfigError> {
    let uses = forest(procs)?;
    let type_of = |c: &Channel| {
        interface
            .get(c)
            .cloned()
            .ok_or_else(|| ConfigError::MissingInterface(c.clone()))
    };
    for (c, p) in procs {
        let ctx = uses[c]
            .iter()
            .map(|d| Ok((d.clone(), TypeMultiset::singleton(type_of(d)?))))
            .collect::<Result<ChannelContext, ConfigError>>()?;
        check(sig, &ctx, p, c, &TypeMultiset::singleton(type_of(c)?)).map_err(|e| {
            ConfigError::Type {
                channel: c.clone(),
                error: Box::new(e),
            }
        })?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Nothing is enabled and every remaining process waits on its client.
    Poised,
    Deadlock,
    FuelExhausted,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub outcome: Outcome,
    pub trace: Vec<StepEvent>,
    pub config: Configuration,
}

impl RunReport {
    pub fn root_trace(&self) -> &[Observation] {
        self.config.root_trace()
    }

    /// One line per step.
    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|e| format!("{e}\n")).collect()
    }
}

/// Runs until nothing is enabled or `fuel` steps have been taken, picking
/// uniformly among enabled events.
pub fn run(
    sig: &Signature,
    mut config: Configuration,
    seed: u64,
    fuel: u64,
) -> Result<RunReport, FidelityViolation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Vec::new();
    loop {
        let enabled = config.enabled();
        if enabled.is_empty() {
            let outcome = if config.is_poised() {
                Outcome::Poised
            } else {
                Outcome::Deadlock
            };
            return Ok(RunReport {
                outcome,
                trace,
                config,
            });
        }
        if trace.len() as u64 >= fuel {
            return Ok(RunReport {
                outcome: Outcome::FuelExhausted,
                trace,
                config,
            });
        }
        let pick = rng.gen_range(0..enabled.len());
        let done = config.step(sig, &enabled[pick])?;
        trace.push(done);
    }
}

/// Run-length encoded labels: `succ×3 zero end`.
pub fn render_observations(obs: &[Observation]) -> String {
    let mut parts: Vec<(String, usize)> = Vec::new();
    for o in obs {
        let s = o.to_string();
        match parts.last_mut() {
            Some((last, n)) if *last == s && matches!(o, Observation::Label(_)) => *n += 1,
            _ => parts.push((s, 1)),
        }
    }
    parts
        .into_iter()
        .map(|(s, n)| if n > 1 { format!("{s}×{n}") } else { s })
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("unexpected observation `{0}`")]
    Unexpected(String),
    #[error("trace ends early")]
    Truncated,
}

fn labels_then_end(obs: &[Observation]) -> Result<Vec<&str>, DecodeError> {
    let mut labels = Vec::new();
    let mut it = obs.iter();
    loop {
        match it.next() {
            Some(Observation::Label(l)) => labels.push(l.as_str()),
            Some(Observation::End) => break,
            Some(o) => return Err(DecodeError::Unexpected(o.to_string())),
            None => return Err(DecodeError::Truncated),
        }
    }
    if let Some(o) = it.next() {
        return Err(DecodeError::Unexpected(o.to_string()));
    }
    Ok(labels)
}

/// Provides `n` in unary along `offer`.
pub fn encode_nat(offer: &Channel, n: u64) -> Process {
    let mut p = Process::select(offer.clone(), "zero", Process::close(offer.clone()));
    for _ in 0..n {
        p = Process::select(offer.clone(), "succ", p);
    }
    p
}

pub fn decode_nat(obs: &[Observation]) -> Result<u64, DecodeError> {
    let labels = labels_then_end(obs)?;
    match labels.split_last() {
        Some((&"zero", succs)) => succs.iter().try_fold(0, |n, l| match *l {
            "succ" => Ok(n + 1),
            other => Err(DecodeError::Unexpected(other.to_string())),
        }),
        Some((l, _)) => Err(DecodeError::Unexpected(l.to_string())),
        None => Err(DecodeError::Truncated),
    }
}

/// Provides `n` in binary along `offer`, least significant bit first, with no
/// leading zeros.
pub fn encode_bits(offer: &Channel, n: u64) -> Process {
    let mut bits = Vec::new();
    let mut m = n;
    while m > 0 {
        bits.push(if m & 1 == 1 { "one" } else { "zero" });
        m >>= 1;
    }
    let mut p = Process::select(offer.clone(), "eps", Process::close(offer.clone()));
    for b in bits.into_iter().rev() {
        p = Process::select(offer.clone(), b, p);
    }
    p
}

/// The value of a bit string and whether it was in standard form.
pub fn decode_bits(obs: &[Observation]) -> Result<(u64, bool), DecodeError> {
    let labels = labels_then_end(obs)?;
    let Some((&"eps", bits)) = labels.split_last() else {
        return Err(labels.last().map_or(DecodeError::Truncated, |l| {
            DecodeError::Unexpected(l.to_string())
        }));
    };
    let mut n = 0u64;
    for (i, b) in bits.iter().enumerate() {
        match *b {
            "one" => n |= 1 << i,
            "zero" => {}
            other => return Err(DecodeError::Unexpected(other.to_string())),
        }
    }
    Ok((n, bits.last() != Some(&"zero")))
}

/// `root <- callee d` where `arg` provides `d`, ready for `config_check`.
pub fn apply(
    callee: &str,
    arg: Process,
    arg_type: SessionType,
    result_type: SessionType,
) -> (BTreeMap<Channel, Process>, BTreeMap<Channel, SessionType>) {
    let root = Channel::new("root");
    let d = Channel::new("d");
    let client = desugar_call(&callee.into(), 1, std::slice::from_ref(&d), &root, None)
        .expect("one argument");
    let procs = BTreeMap::from([(d.clone(), arg), (root.clone(), client)]);
    let interface = BTreeMap::from([(d, arg_type), (root, result_type)]);
    (procs, interface)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_process, parse_signature, parse_type};

    const NATS: &str = "
        type Nat = +{zero: 1, succ: Nat}
        type Even = +{zero: 1, succ: Odd}
        type Odd = +{succ: Even}
        type Empty = +{eps: 1}
        proc z : Nat /\\ Even
          c <- z = c.zero; close c
        proc double : Nat -o Nat
          c <- double d = case d of {
              zero => wait d; c.zero; close c
            | succ => c.succ; c.succ; c <- double d }
    ";

    fn ch(s: &str) -> Channel {
        Channel::new(s)
    }

    fn procs(sig: &Signature, ps: &[(&str, &str)]) -> BTreeMap<Channel, Process> {
        ps.iter()
            .map(|(c, p)| (ch(c), parse_process(p, sig).unwrap()))
            .collect()
    }

    fn config(sig: &Signature, ps: &[(&str, &str)]) -> Configuration {
        Configuration::new(sig, procs(sig, ps), &BTreeMap::new())
    }

    #[test]
    fn close_meets_wait() {
        let sig = parse_signature(NATS).unwrap();
        let mut cfg = config(&sig, &[("c", "close c"), ("e", "wait c; close e")]);
        let evs = cfg.enabled();
        assert_eq!(
            evs,
            vec![StepEvent::new(StepKind::Close, vec![ch("c"), ch("e")])]
        );
        cfg.step(&sig, &evs[0]).unwrap();
        assert_eq!(cfg.procs(), &procs(&sig, &[("e", "close e")]));
    }

    #[test]
    fn select_needs_a_matching_branch() {
        let sig = parse_signature(NATS).unwrap();
        let cfg = config(
            &sig,
            &[
                ("c", "c.a; close c"),
                ("e", "case c of { a => wait c; close e }"),
            ],
        );
        assert_eq!(cfg.enabled()[0].kind, StepKind::Select);
        let cfg = config(
            &sig,
            &[
                ("c", "c.b; close c"),
                ("e", "case c of { a => wait c; close e }"),
            ],
        );
        assert!(cfg.enabled().is_empty());
    }

    #[test]
    fn lone_provider_is_poised() {
        let sig = parse_signature(NATS).unwrap();
        let mut cfg = config(&sig, &[("c", "x <- recv c; wait x; close c")]);
        assert!(cfg.enabled().is_empty());
        assert!(cfg.is_poised());
        // a close toward the environment is drained instead
        cfg = config(&sig, &[("c", "close c")]);
        assert_eq!(cfg.enabled().len(), 1);
    }

    #[test]
    fn forward_substitutes_globally() {
        let sig = parse_signature(NATS).unwrap();
        let mut cfg = config(
            &sig,
            &[("c", "c <- d"), ("d", "close d"), ("e", "wait c; close e")],
        );
        let fwd = cfg
            .enabled()
            .into_iter()
            .find(|e| e.kind == StepKind::Fwd)
            .unwrap();
        cfg.step(&sig, &fwd).unwrap();
        assert_eq!(
            cfg.procs(),
            &procs(&sig, &[("d", "close d"), ("e", "wait d; close e")])
        );
    }

    #[test]
    fn spawn_allocates_fresh_channels() {
        let sig = parse_signature(NATS).unwrap();
        let mut cfg = config(&sig, &[("c", "x <- z; c <- x")]);
        let done = cfg.step(&sig, &cfg.enabled()[0]).unwrap();
        let a = done.fresh.clone().unwrap();
        assert_eq!(a, Channel::with_gen("x".into(), 1));
        assert_eq!(cfg.procs()[&a], Process::call("z"));
        assert_eq!(cfg.procs()[&ch("c")], Process::fwd(ch("c"), a.clone()));
        assert_eq!(done.to_string(), "spawn c,+x#1");
    }

    #[test]
    fn poised_reading() {
        let c = ch("c");
        assert!(poised(&Process::close(c.clone()), &c));
        assert!(!poised(
            &Process::wait(ch("d"), Process::close(c.clone())),
            &c
        ));
        assert!(!poised(&Process::fwd(c.clone(), ch("d")), &c));
    }

    #[test]
    fn monitor_steps_and_filters() {
        let sig = parse_signature(NATS).unwrap();
        let nat = parse_type("Nat").unwrap();
        let mut cfg = Configuration::new(
            &sig,
            procs(&sig, &[("c", "c.zero; close c")]),
            &BTreeMap::from([(ch("c"), nat)]),
        );
        cfg.step(&sig, &cfg.enabled()[0]).unwrap();
        assert_eq!(
            cfg.monitor()[&ch("c")],
            TypeMultiset::singleton(SessionType::End)
        );

        let both = parse_type("Even /\\ Nat").unwrap();
        let mut cfg = Configuration::new(
            &sig,
            procs(&sig, &[("c", "c.succ; c.zero; close c")]),
            &BTreeMap::from([(ch("c"), both)]),
        );
        cfg.step(&sig, &cfg.enabled()[0]).unwrap();
        let odd_or_nat = flatten(
            &sig,
            [parse_type("Odd").unwrap(), parse_type("Nat").unwrap()],
        );
        assert_eq!(cfg.monitor()[&ch("c")], odd_or_nat);

        let mut cfg = Configuration::new(
            &sig,
            procs(&sig, &[("c", "c.zero; close c")]),
            &BTreeMap::from([(ch("c"), parse_type("Empty").unwrap())]),
        );
        let err = cfg.step(&sig, &cfg.enabled()[0]).unwrap_err();
        assert_eq!(err.channel, ch("c"));
    }

    #[test]
    fn forest_violations() {
        let sig = parse_signature(NATS).unwrap();
        assert_eq!(
            config_check(&sig, &BTreeMap::new(), &BTreeMap::new()),
            Ok(())
        );
        let one = BTreeMap::from([(ch("c"), SessionType::End)]);
        assert_eq!(
            config_check(&sig, &procs(&sig, &[("c", "close c")]), &one),
            Ok(())
        );
        let cyc = procs(&sig, &[("c", "wait d; close c"), ("d", "wait c; close d")]);
        assert!(matches!(
            config_check(&sig, &cyc, &BTreeMap::new()),
            Err(ConfigError::Cycle(_))
        ));
        let shared = procs(
            &sig,
            &[
                ("c", "wait d; close c"),
                ("d", "close d"),
                ("e", "wait d; close e"),
            ],
        );
        assert!(matches!(
            config_check(&sig, &shared, &BTreeMap::new()),
            Err(ConfigError::SharedChannel(_))
        ));
    }

    #[test]
    fn codecs() {
        let c = ch("c");
        assert_eq!(
            encode_nat(&c, 0),
            parse_process("c.zero; close c", &Signature::new()).unwrap()
        );
        for n in 0..20 {
            let sig = Signature::new();
            let rep = run(
                &sig,
                Configuration::new(
                    &sig,
                    BTreeMap::from([(c.clone(), encode_nat(&c, n))]),
                    &BTreeMap::new(),
                ),
                0,
                100,
            )
            .unwrap();
            assert_eq!(decode_nat(rep.root_trace()), Ok(n));
            let rep = run(
                &sig,
                Configuration::new(
                    &sig,
                    BTreeMap::from([(c.clone(), encode_bits(&c, n))]),
                    &BTreeMap::new(),
                ),
                0,
                100,
            )
            .unwrap();
            assert_eq!(decode_bits(rep.root_trace()), Ok((n, true)));
        }
        let lz = [
            Observation::Label("one".into()),
            Observation::Label("zero".into()),
            Observation::Label("eps".into()),
            Observation::End,
        ];
        assert_eq!(decode_bits(&lz), Ok((1, false)));
        assert!(decode_nat(&lz).is_err());
    }

    #[test]
    fn doubling() {
        let sig = parse_signature(NATS).unwrap();
        let nat = parse_type("Nat").unwrap();
        for n in 0..6 {
            let (ps, iface) = apply("double", encode_nat(&ch("d"), n), nat.clone(), nat.clone());
            config_check(&sig, &ps, &iface).unwrap();
            for seed in 0..5 {
                let rep = run(
                    &sig,
                    Configuration::new(&sig, ps.clone(), &iface),
                    seed,
                    DEFAULT_FUEL,
                )
                .unwrap();
                assert_eq!(rep.outcome, Outcome::Poised);
                assert_eq!(decode_nat(rep.root_trace()), Ok(2 * n));
                assert!(rep.config.procs().is_empty());
            }
        }
    }

    #[test]
    fn rendering() {
        let obs: Vec<Observation> = ["succ", "succ", "zero"]
            .iter()
            .map(|l| Observation::Label((*l).into()))
            .chain([Observation::End])
            .collect();
        assert_eq!(render_observations(&obs), "succ×2 zero end");
    }

    #[test]
    fn deadlock_is_reported() {
        let sig = parse_signature(NATS).unwrap();
        let cfg = config(&sig, &[("c", "wait d; close c"), ("d", "wait c; close d")]);
        let rep = run(&sig, cfg, 0, 10).unwrap();
        assert_eq!(rep.outcome, Outcome::Deadlock);
    }
}
