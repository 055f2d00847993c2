//! Coinductive subtyping between multisets of types, `Δ ⩽ Θ`.
//!
//! The left multiset is read conjunctively and the right one disjunctively.
//! Intersection, union and definition rules are invertible and are applied
//! eagerly by [`saturate`]; once every type is structural, [`structural_step`]
//! lists the ways of matching one type on each side and [`decide`] backtracks
//! over them. Pairs already under consideration are assumed to hold, which is
//! what makes the relation coinductive and the search finite.

use std::collections::HashSet;
use std::fmt;

use crate::ast::{SessionType, Signature};

/// A multiset of types in canonical (sorted) order. Duplicates are kept.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeMultiset(Vec<SessionType>);

impl TypeMultiset {
    pub fn new(mut items: Vec<SessionType>) -> Self {
        items.sort();
        TypeMultiset(items)
    }

    pub fn singleton(t: SessionType) -> Self {
        TypeMultiset(vec![t])
    }

    pub fn iter(&self) -> impl Iterator<Item = &SessionType> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, t: &SessionType) -> bool {
        self.0.binary_search(t).is_ok()
    }

    pub fn is_structural(&self) -> bool {
        self.0.iter().all(SessionType::is_structural)
    }

    pub fn into_vec(self) -> Vec<SessionType> {
        self.0
    }

    /// Distinct members in canonical order.
    pub fn distinct(&self) -> impl Iterator<Item = &SessionType> {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, t)| *i == 0 || self.0[i - 1] != **t)
            .map(|(_, t)| t)
    }

    /// Intersection of the members (`all Δ`); `None` when empty.
    pub fn meet_all(&self) -> Option<SessionType> {
        self.0.iter().cloned().reduce(SessionType::meet)
    }

    /// Union of the members (`any Θ`); `None` when empty.
    pub fn join_any(&self) -> Option<SessionType> {
        self.0.iter().cloned().reduce(SessionType::join)
    }
}

impl From<SessionType> for TypeMultiset {
    fn from(t: SessionType) -> Self {
        TypeMultiset::singleton(t)
    }
}

impl FromIterator<SessionType> for TypeMultiset {
    fn from_iter<I: IntoIterator<Item = SessionType>>(iter: I) -> Self {
        TypeMultiset::new(iter.into_iter().collect())
    }
}

impl fmt::Display for TypeMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for TypeMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub type Goal = (TypeMultiset, TypeMultiset);

/// Pairs assumed to hold. Insertions are logged so a failed branch can undo
/// exactly the assumptions it introduced.
#[derive(Debug, Default)]
pub struct MemoTable {
    seen: HashSet<Goal>,
    log: Vec<Goal>,
    peak: usize,
}

impl MemoTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, goal: &Goal) -> bool {
        self.seen.contains(goal)
    }

    pub fn insert(&mut self, goal: Goal) {
        if self.seen.insert(goal.clone()) {
            self.log.push(goal);
            self.peak = self.peak.max(self.seen.len());
        }
    }

    pub fn mark(&self) -> usize {
        self.log.len()
    }

    pub fn rollback(&mut self, mark: usize) {
        for g in self.log.drain(mark..) {
            self.seen.remove(&g);
        }
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    /// Largest size the table reached.
    pub fn peak(&self) -> usize {
        self.peak
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

fn unfold_checked<'s>(sig: &'s Signature, t: &SessionType, depth: usize) -> &'s SessionType {
    let SessionType::Name(n) = t else {
        unreachable!()
    };
    assert!(
        depth <= sig.type_count(),
        "type definitions are not contractive: `{n}` never reaches a structural type"
    );
    sig.typedef(n)
        .unwrap_or_else(|| panic!("undefined type name `{n}`"))
}

/// Saturates one side of a judgment. On the left, intersections flatten and
/// unions split; on the right it is the other way round. Every returned
/// multiset must be proven, and all of its members are structural.
fn saturate_side(sig: &Signature, items: &TypeMultiset, side: Side) -> Vec<TypeMultiset> {
    // Each item carries the number of unfoldings on its chain since the last
    // structural constructor; contractiveness bounds it by the number of
    // definitions.
    let start: Vec<(SessionType, usize)> = items.iter().map(|t| (t.clone(), 0)).collect();
    let mut stack = vec![start];
    let mut out = Vec::new();
    while let Some(mut ms) = stack.pop() {
        loop {
            let flat = ms.iter().position(|(t, _)| {
                matches!(
                    (t, side),
                    (SessionType::Name(_), _)
                        | (SessionType::Meet(..), Side::Left)
                        | (SessionType::Join(..), Side::Right)
                )
            });
            let Some(i) = flat else { break };
            let (t, depth) = ms.swap_remove(i);
            match t {
                SessionType::Meet(a, b) | SessionType::Join(a, b) => {
                    ms.push((*a, depth));
                    ms.push((*b, depth));
                }
                name => {
                    let body = unfold_checked(sig, &name, depth + 1);
                    ms.push((body.clone(), depth + 1));
                }
            }
        }
        let split = ms.iter().position(|(t, _)| {
            matches!(
                (t, side),
                (SessionType::Join(..), Side::Left) | (SessionType::Meet(..), Side::Right)
            )
        });
        match split {
            Some(i) => {
                let (t, depth) = ms.swap_remove(i);
                let (SessionType::Join(a, b) | SessionType::Meet(a, b)) = t else {
                    unreachable!()
                };
                let mut first = ms.clone();
                first.push((*a, depth));
                let mut second = ms;
                second.push((*b, depth));
                stack.push(second);
                stack.push(first);
            }
            None => out.push(ms.into_iter().map(|(t, _)| t).collect()),
        }
    }
    out
}

/// `Δ` split by unions, intersections flattened, names unfolded.
pub fn saturate_left(sig: &Signature, delta: &TypeMultiset) -> Vec<TypeMultiset> {
    saturate_side(sig, delta, Side::Left)
}

/// `Θ` split by intersections, unions flattened, names unfolded.
pub fn saturate_right(sig: &Signature, theta: &TypeMultiset) -> Vec<TypeMultiset> {
    saturate_side(sig, theta, Side::Right)
}

/// Applies all invertible rules to a fixpoint. The judgment holds iff every
/// returned goal holds.
pub fn saturate(sig: &Signature, delta: &TypeMultiset, theta: &TypeMultiset) -> Vec<Goal> {
    let lefts = saturate_left(sig, delta);
    let rights = saturate_right(sig, theta);
    let mut out = Vec::with_capacity(lefts.len() * rights.len());
    for l in &lefts {
        for r in &rights {
            out.push((l.clone(), r.clone()));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructuralRule {
    End,
    Tensor,
    Lolli,
    Internal,
    External,
}

/// One way of closing a structural goal: a type picked on each side and the
/// singleton premises that remain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub rule: StructuralRule,
    pub left: SessionType,
    pub right: SessionType,
    pub premises: Vec<(SessionType, SessionType)>,
}

fn match_pair(
    l: &SessionType,
    r: &SessionType,
) -> Option<(StructuralRule, Vec<(SessionType, SessionType)>)> {
    use SessionType as T;
    match (l, r) {
        (T::End, T::End) => Some((StructuralRule::End, vec![])),
        (T::Tensor(a, b), T::Tensor(a2, b2)) => Some((
            StructuralRule::Tensor,
            vec![
                ((**a).clone(), (**a2).clone()),
                ((**b).clone(), (**b2).clone()),
            ],
        )),
        (T::Lolli(a, b), T::Lolli(a2, b2)) => Some((
            StructuralRule::Lolli,
            vec![
                ((**a2).clone(), (**a).clone()),
                ((**b).clone(), (**b2).clone()),
            ],
        )),
        (T::Internal(i), T::Internal(j)) if i.labels_subset_of(j) => Some((
            StructuralRule::Internal,
            i.iter()
                .map(|(l, a)| (a.clone(), j.get(l).expect("label checked").clone()))
                .collect(),
        )),
        (T::External(i), T::External(j)) if j.labels_subset_of(i) => Some((
            StructuralRule::External,
            j.iter()
                .map(|(l, a2)| (i.get(l).expect("label checked").clone(), a2.clone()))
                .collect(),
        )),
        _ => None,
    }
}

/// All applicable structural rules, left-to-right in canonical order.
pub fn structural_step(delta: &TypeMultiset, theta: &TypeMultiset) -> Vec<Candidate> {
    let mut out = Vec::new();
    for l in delta.distinct() {
        for r in theta.distinct() {
            if let Some((rule, premises)) = match_pair(l, r) {
                out.push(Candidate {
                    rule,
                    left: l.clone(),
                    right: r.clone(),
                    premises,
                });
            }
        }
    }
    out
}

/// Decides `Δ ⩽ Θ`. A pair already in `memo` is assumed to hold.
///
/// Assumptions introduced while exploring a structural candidate that fails
/// are rolled back before the next candidate is tried.
pub fn decide(
    sig: &Signature,
    delta: &TypeMultiset,
    theta: &TypeMultiset,
    memo: &mut MemoTable,
) -> bool {
    let key = (delta.clone(), theta.clone());
    if memo.contains(&key) {
        return true;
    }
    memo.insert(key);
    saturate(sig, delta, theta)
        .iter()
        .all(|(d, t)| prove_structural(sig, d, t, memo))
}

fn prove_structural(
    sig: &Signature,
    delta: &TypeMultiset,
    theta: &TypeMultiset,
    memo: &mut MemoTable,
) -> bool {
    if try_candidates(sig, delta, theta, memo) {
        return true;
    }
    match split_choices(delta, theta) {
        Some(goals) => goals.iter().all(|(d, t)| try_candidates(sig, d, t, memo)),
        None => false,
    }
}

fn try_candidates(
    sig: &Signature,
    delta: &TypeMultiset,
    theta: &TypeMultiset,
    memo: &mut MemoTable,
) -> bool {
    structural_step(delta, theta).into_iter().any(|cand| {
        let mark = memo.mark();
        let ok = cand.premises.iter().all(|(a, b)| {
            decide(
                sig,
                &TypeMultiset::singleton(a.clone()),
                &TypeMultiset::singleton(b.clone()),
                memo,
            )
        });
        if !ok {
            memo.rollback(mark);
        }
        ok
    })
}

/// Reads every n-ary choice as the union (internal) or intersection
/// (external) of its single-label choices and saturates again: internal
/// choices split on the left and flatten on the right, external choices the
/// other way round. `None` when every choice already has a single label.
pub fn split_choices(delta: &TypeMultiset, theta: &TypeMultiset) -> Option<Vec<Goal>> {
    let singletons = |bs: &crate::ast::Branches<SessionType>, internal: bool| -> Vec<SessionType> {
        bs.iter()
            .map(|(l, a)| {
                let one =
                    crate::ast::Branches::new(vec![(l.clone(), a.clone())]).expect("one label");
                if internal {
                    SessionType::Internal(one)
                } else {
                    SessionType::External(one)
                }
            })
            .collect()
    };
    // For each side: the fixed members plus the alternatives to choose from.
    let expand =
        |ms: &TypeMultiset, split_internal: bool| -> (Vec<SessionType>, Vec<Vec<SessionType>>) {
            let mut fixed = Vec::new();
            let mut alts = Vec::new();
            for t in ms.iter() {
                match t {
                    SessionType::Internal(bs) if bs.len() > 1 => {
                        if split_internal {
                            alts.push(singletons(bs, true));
                        } else {
                            fixed.extend(singletons(bs, true));
                        }
                    }
                    SessionType::External(bs) if bs.len() > 1 => {
                        if split_internal {
                            fixed.extend(singletons(bs, false));
                        } else {
                            alts.push(singletons(bs, false));
                        }
                    }
                    other => fixed.push(other.clone()),
                }
            }
            (fixed, alts)
        };
    let (lfixed, lalts) = expand(delta, true);
    let (rfixed, ralts) = expand(theta, false);
    if lfixed.len() == delta.len()
        && lalts.is_empty()
        && rfixed.len() == theta.len()
        && ralts.is_empty()
    {
        return None;
    }
    let product = |fixed: Vec<SessionType>, alts: Vec<Vec<SessionType>>| -> Vec<TypeMultiset> {
        let mut acc = vec![fixed];
        for choice in alts {
            acc = acc
                .into_iter()
                .flat_map(|base| {
                    choice.iter().map(move |c| {
                        let mut v = base.clone();
                        v.push(c.clone());
                        v
                    })
                })
                .collect();
        }
        acc.into_iter().map(TypeMultiset::new).collect()
    };
    let lefts = product(lfixed, lalts);
    let rights = product(rfixed, ralts);
    Some(
        lefts
            .iter()
            .flat_map(|l| rights.iter().map(move |r| (l.clone(), r.clone())))
            .collect(),
    )
}

/// `Δ ⩽ Θ` with a fresh memo table.
pub fn subtype_multi(sig: &Signature, delta: &TypeMultiset, theta: &TypeMultiset) -> bool {
    decide(sig, delta, theta, &mut MemoTable::new())
}

/// `A ≤ B`, i.e. `{A} ⩽ {B}`.
pub fn subtype(sig: &Signature, a: &SessionType, b: &SessionType) -> bool {
    subtype_with_stats(sig, a, b).0
}

/// Like [`subtype`], also returning the peak memo size.
pub fn subtype_with_stats(sig: &Signature, a: &SessionType, b: &SessionType) -> (bool, usize) {
    let mut memo = MemoTable::new();
    let ok = decide(
        sig,
        &TypeMultiset::singleton(a.clone()),
        &TypeMultiset::singleton(b.clone()),
        &mut memo,
    );
    (ok, memo.peak())
}

/// Mutual subtyping.
pub fn equivalent(sig: &Signature, a: &SessionType, b: &SessionType) -> bool {
    subtype(sig, a, b) && subtype(sig, b, a)
}
