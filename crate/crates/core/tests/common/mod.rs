#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use sill::ast::{Ident, Process, SessionType, Signature};
use sill::parser::{parse_signature, parse_type};
use sill::Channel;

pub const CORPUS: &str = include_str!("../../corpus/corpus.sill");

pub const MAINS: [&str; 5] = [
    "main_z",
    "main_double3",
    "main_s2",
    "main_inc7",
    "main_ctr2",
];

pub const DATA: [&str; 8] = [
    "Nat", "Pos", "Even", "Odd", "Bits", "Std", "Empty", "StdPos",
];

pub fn corpus() -> Signature {
    parse_signature(CORPUS).expect("corpus parses")
}

pub fn ty(s: &str) -> SessionType {
    parse_type(s).unwrap_or_else(|e| panic!("bad type `{s}`: {}", e.message))
}

pub fn ch(s: &str) -> Channel {
    Channel::new(s)
}

/// The corpus with `inc` declared only at `Std -o Std`.
pub fn weakened_corpus() -> Signature {
    let mut sig = corpus();
    sig.procdef_mut(&Ident::new("inc")).unwrap().declared = ty("Std -o Std");
    sig
}

fn random_leaf<R: Rng + ?Sized>(rng: &mut R) -> SessionType {
    let i = rng.gen_range(0..=DATA.len());
    if i == DATA.len() {
        SessionType::End
    } else {
        SessionType::name(DATA[i])
    }
}

fn random_branches<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> Vec<(&'static str, SessionType)> {
    let n = rng.gen_range(1..=3);
    ["zero", "succ", "eps"]
        .into_iter()
        .take(n)
        .map(|l| (l, random_type(rng, depth)))
        .collect()
}

/// A random type over the corpus names, at most `depth` constructors deep.
pub fn random_type<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> SessionType {
    if depth == 0 {
        return random_leaf(rng);
    }
    let d = depth - 1;
    match rng.gen_range(0..8) {
        1 => SessionType::tensor(random_type(rng, d), random_type(rng, d)),
        2 => SessionType::lolli(random_type(rng, d), random_type(rng, d)),
        3 => SessionType::internal(random_branches(rng, d)),
        4 => SessionType::external(random_branches(rng, d)),
        5 => SessionType::meet(random_type(rng, d), random_type(rng, d)),
        6 => SessionType::join(random_type(rng, d), random_type(rng, d)),
        _ => random_leaf(rng),
    }
}

/// `root` provided by a call to `entry`, typed at its declaration.
pub fn main_config(
    sig: &Signature,
    entry: &str,
) -> (BTreeMap<Channel, Process>, BTreeMap<Channel, SessionType>) {
    let decl = sig.procdef(&Ident::new(entry)).unwrap().declared.clone();
    (
        BTreeMap::from([(ch("root"), Process::call(entry))]),
        BTreeMap::from([(ch("root"), decl)]),
    )
}
