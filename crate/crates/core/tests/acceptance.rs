//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use sill::ast::{Ident, Process, SessionType, Signature};
use sill::runtime::{
    self, apply, config_check, decode_bits, decode_nat, encode_bits, encode_nat, Configuration,
    Outcome,
};
use sill::sigcheck::{check_signature, SigError};
use sill::subtype::{decide, subtype_with_stats, MemoTable, TypeMultiset};
use sill::typecheck::{check, check_def, ChannelContext};

type Verdict = Result<String, String>;

/// Largest memo table seen by any subtyping query in criteria 3 to 5.
#[derive(Default)]
struct MemoStats {
    queries: usize,
    peak: usize,
}

impl MemoStats {
    fn sub(&mut self, sig: &Signature, a: &SessionType, b: &SessionType) -> bool {
        let (ok, peak) = subtype_with_stats(sig, a, b);
        self.queries += 1;
        self.peak = self.peak.max(peak);
        ok
    }

    fn equiv(&mut self, sig: &Signature, a: &SessionType, b: &SessionType) -> bool {
        let ab = self.sub(sig, a, b);
        let ba = self.sub(sig, b, a);
        ab && ba
    }
}

fn corpus_typechecks(sig: &Signature) -> Verdict {
    let expected = [
        ("z", "Nat /\\ Even"),
        ("s", "(Nat -o Nat) /\\ (Even -o Odd) /\\ (Odd -o Even)"),
        ("double", "(Nat -o Nat) /\\ (Nat -o Even)"),
        ("s2", "Even -o Even"),
        (
            "inc",
            "(Std -o Std) /\\ (StdPos -o StdPos) /\\ (Empty -o StdPos)",
        ),
    ];
    for (name, decl) in expected {
        let def = sig
            .procdef(&Ident::new(name))
            .ok_or_else(|| format!("`{name}` missing"))?;
        if def.declared != ty(decl) {
            return Err(format!(
                "`{name}` declared as {}, expected {decl}",
                def.declared
            ));
        }
        check_def(sig, &def.name).map_err(|e| format!("`{name}` rejected: {e}"))?;
    }
    check_signature(sig).map_err(|errs| format!("{} signature errors", errs.len()))?;
    Ok(format!("{} definitions accepted", sig.procdefs().count()))
}

fn negative_control() -> Verdict {
    let sig = weakened_corpus();
    if check_def(&sig, &Ident::new("inc")).is_ok() {
        return Err("inc accepted at Std -o Std".into());
    }
    match check_signature(&sig) {
        Err(errs)
            if errs
                .iter()
                .any(|e| matches!(e, SigError::Type { def, .. } if def.as_str() == "inc")) =>
        {
            Ok("inc : Std -o Std rejected".into())
        }
        _ => Err("signature check did not flag inc".into()),
    }
}

fn subtyping_table(sig: &Signature, stats: &mut MemoStats) -> Verdict {
    let table = [
        ("Pos", "Nat", true),
        ("Even", "Nat", true),
        ("Odd", "Nat", true),
        ("Nat", "Pos", false),
        ("Nat", "Even", false),
        ("Even", "Odd", false),
    ];
    for (a, b, want) in table {
        if stats.sub(sig, &ty(a), &ty(b)) != want {
            return Err(format!("{a} <= {b} should be {want}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e55);
    let mut distinct = BTreeSet::new();
    for _ in 0..200 {
        let t = random_type(&mut rng, 5);
        if !stats.sub(sig, &t, &t) {
            return Err(format!("reflexivity fails for {t}"));
        }
        distinct.insert(t);
    }
    let mut unfolded = 0;
    for (name, body) in sig.typedefs() {
        if !stats.equiv(sig, &SessionType::Name(name.clone()), body) {
            return Err(format!("{name} is not equivalent to its unfolding"));
        }
        unfolded += 1;
    }
    Ok(format!(
        "table holds; reflexive on 200 random types ({} distinct); {unfolded} unfoldings",
        distinct.len()
    ))
}

fn distributivity(sig: &Signature, stats: &mut MemoStats) -> Verdict {
    let set = ["1", "Nat", "Even", "Odd", "Pos"].map(ty);
    let (mut first, mut second) = (0, 0);
    for a1 in &set {
        for a2 in &set {
            for b in &set {
                let (a1, a2, b) = (a1.clone(), a2.clone(), b.clone());
                let lhs = SessionType::meet(
                    SessionType::join(a1.clone(), b.clone()),
                    SessionType::join(a2.clone(), b.clone()),
                );
                let rhs = SessionType::join(SessionType::meet(a1.clone(), a2.clone()), b.clone());
                if !stats.equiv(sig, &lhs, &rhs) {
                    return Err(format!("{lhs} ≢ {rhs}"));
                }
                first += 1;
                let lhs = SessionType::meet(SessionType::join(a1.clone(), a2.clone()), b.clone());
                let rhs =
                    SessionType::join(SessionType::meet(a1, b.clone()), SessionType::meet(a2, b));
                if !stats.equiv(sig, &lhs, &rhs) {
                    return Err(format!("{lhs} ≢ {rhs}"));
                }
                second += 1;
            }
        }
    }
    Ok(format!(
        "{first} + {second} instantiations, both directions"
    ))
}

fn choice_decomposition(sig: &Signature, stats: &mut MemoStats) -> Verdict {
    let pairs = [
        ("Nat", "+{zero: 1} \\/ +{succ: Nat}"),
        ("+{zero: 1, succ: Nat}", "+{zero: 1} \\/ +{succ: Nat}"),
        ("Ctr", "&{inc: Ctr} /\\ &{val: Nat}"),
        ("&{inc: Ctr, val: Nat}", "&{inc: Ctr} /\\ &{val: Nat}"),
    ];
    for (a, b) in pairs {
        if !stats.equiv(sig, &ty(a), &ty(b)) {
            return Err(format!("{a} ≢ {b}"));
        }
    }
    Ok("Nat and Ctr equal their singleton decompositions".into())
}

/// Candidate types for weakening and strengthening.
fn pool() -> Vec<SessionType> {
    let mut base: Vec<SessionType> = DATA.iter().map(|n| ty(n)).collect();
    base.push(SessionType::End);
    let mut out = base.clone();
    for a in DATA {
        for b in DATA {
            out.push(SessionType::lolli(ty(a), ty(b)));
            out.push(SessionType::join(ty(a), ty(b)));
        }
    }
    out
}

fn components(t: &SessionType) -> Vec<SessionType> {
    match t {
        SessionType::Meet(a, b) => {
            let mut v = components(a);
            v.extend(components(b));
            v
        }
        other => vec![other.clone()],
    }
}

fn weakening_preserves_typing(sig: &Signature) -> Verdict {
    let pool = pool();
    let holds = |delta: &TypeMultiset, theta: &TypeMultiset| {
        decide(sig, delta, theta, &mut MemoTable::new())
    };
    let mut checked = 0;
    for def in sig.procdefs() {
        let theta = TypeMultiset::singleton(def.declared.clone());
        let empty = ChannelContext::new();
        // Offered multiset weakened upward.
        for b in &pool {
            for extra in [None, Some(SessionType::End), Some(ty("Bits"))] {
                let wider: TypeMultiset = std::iter::once(b.clone()).chain(extra).collect();
                if holds(&theta, &wider) {
                    check(sig, &empty, &def.body, &def.offer, &wider)
                        .map_err(|e| format!("{} at {wider}: {e}", def.name))?;
                    checked += 1;
                }
            }
        }
        // Used multiset strengthened downward, under each arrow the body has.
        let Process::Recv { bound, ch, cont } = &def.body else {
            continue;
        };
        if ch != &def.offer {
            continue;
        }
        for comp in components(&def.declared) {
            let SessionType::Lolli(a, b) = comp else {
                continue;
            };
            let result = TypeMultiset::singleton((*b).clone());
            let arg = TypeMultiset::singleton((*a).clone());
            check(
                sig,
                &empty.clone().with(bound.clone(), arg.clone()),
                cont,
                &def.offer,
                &result,
            )
            .map_err(|e| format!("{} under {a} -o {b}: {e}", def.name))?;
            for a2 in &pool {
                let narrower = TypeMultiset::singleton(a2.clone());
                if holds(&narrower, &arg) {
                    let ctx = empty.clone().with(bound.clone(), narrower.clone());
                    check(sig, &ctx, cont, &def.offer, &result)
                        .map_err(|e| format!("{} with {bound} : {narrower}: {e}", def.name))?;
                    checked += 1;
                }
            }
        }
    }
    if checked < 50 {
        return Err(format!("only {checked} substitutions exercised"));
    }
    Ok(format!("{checked} substituted judgments still accepted"))
}

fn execution_oracles(sig: &Signature) -> Verdict {
    let d = ch("d");
    for n in 0..8 {
        let (procs, iface) = apply("double", encode_nat(&d, n), ty("Nat"), ty("Nat"));
        config_check(sig, &procs, &iface).map_err(|e| e.to_string())?;
        let rep = runtime::run(
            sig,
            Configuration::new(sig, procs, &iface),
            n,
            runtime::DEFAULT_FUEL,
        )
        .map_err(|e| e.to_string())?;
        let got = decode_nat(rep.root_trace()).map_err(|e| e.to_string())?;
        if rep.outcome != Outcome::Poised || got != 2 * n {
            return Err(format!("double {n} gave {got} ({:?})", rep.outcome));
        }
    }
    for n in 0..32 {
        let (procs, iface) = apply("inc", encode_bits(&d, n), ty("Std"), ty("Std"));
        config_check(sig, &procs, &iface).map_err(|e| e.to_string())?;
        let rep = runtime::run(
            sig,
            Configuration::new(sig, procs, &iface),
            n,
            runtime::DEFAULT_FUEL,
        )
        .map_err(|e| e.to_string())?;
        let (got, standard) = decode_bits(rep.root_trace()).map_err(|e| e.to_string())?;
        if rep.outcome != Outcome::Poised || got != n + 1 || !standard {
            return Err(format!("inc {n} gave {got} (standard: {standard})"));
        }
    }
    Ok("double on 0..8 and inc on 0..32 exact".into())
}

fn progress_and_fidelity(sig: &Signature) -> Verdict {
    let mut runs = 0;
    for main in MAINS {
        let (procs, iface) = main_config(sig, main);
        config_check(sig, &procs, &iface).map_err(|e| format!("{main}: {e}"))?;
        let mut outputs = BTreeSet::new();
        for seed in 0..100 {
            let rep = runtime::run(
                sig,
                Configuration::new(sig, procs.clone(), &iface),
                seed,
                runtime::DEFAULT_FUEL,
            )
            .map_err(|v| format!("{main} seed {seed}: {v}"))?;
            if rep.outcome != Outcome::Poised {
                return Err(format!("{main} seed {seed}: {:?}", rep.outcome));
            }
            outputs.insert(runtime::render_observations(rep.root_trace()));
            runs += 1;
        }
        if outputs.len() != 1 {
            return Err(format!("{main} output depends on the seed: {outputs:?}"));
        }
    }
    Ok(format!(
        "{runs} runs poised, monitor silent, outputs seed-independent"
    ))
}

fn main() -> ExitCode {
    let sig = corpus();
    let mut stats = MemoStats::default();
    let mut results: Vec<(&str, Verdict, f64)> = Vec::new();
    let mut timed = |name, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = f();
        results.push((name, v, start.elapsed().as_secs_f64()));
    };
    timed("1 corpus typechecks", &mut || corpus_typechecks(&sig));
    timed("2 negative control", &mut negative_control);
    timed("3 subtyping table", &mut || {
        subtyping_table(&sig, &mut stats)
    });
    timed("4 distributivity", &mut || distributivity(&sig, &mut stats));
    timed("5 choice decomposition", &mut || {
        choice_decomposition(&sig, &mut stats)
    });
    timed("6 weakening preserves typing", &mut || {
        weakening_preserves_typing(&sig)
    });
    timed("7 execution oracles", &mut || execution_oracles(&sig));
    timed("8 progress and fidelity", &mut || {
        progress_and_fidelity(&sig)
    });
    let memo = if stats.peak < 100_000 {
        Ok(format!(
            "{} queries, largest memo {}",
            stats.queries, stats.peak
        ))
    } else {
        Err(format!("memo reached {}", stats.peak))
    };
    results.push(("9 subtyping termination", memo, 0.0));

    let mut failed = 0;
    for (name, verdict, secs) in &results {
        match verdict {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.2}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{secs:.2}s]");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
