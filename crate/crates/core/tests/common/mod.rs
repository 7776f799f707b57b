#![allow(dead_code)]

use lorenz_core::kneading::{validate, KneadingInvariant, Verdict};
use lorenz_core::renorm::{factorize, star_product, RenormStep, StepKind};
use lorenz_core::seqcore::{EpSeq, Word};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn k(s: &str) -> KneadingInvariant {
    s.parse().unwrap()
}

pub fn step(a: &str, b: &str) -> RenormStep {
    RenormStep::new(a.parse().unwrap(), b.parse().unwrap()).unwrap()
}

fn words_with_prefix(prefix: [u8; 2], max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for len in 2..=max_len {
        for bits in 0..(1u32 << (len - 2)) {
            let mut d = prefix.to_vec();
            d.extend((0..len - 2).rev().map(|i| ((bits >> i) & 1) as u8));
            let w = Word::new(d).unwrap();
            if w.primitive_root_len() == len {
                out.push(w);
            }
        }
    }
    out
}

/// Every purely periodic pair with primitive periods of length at most
/// `max_len`.
pub fn periodic_pairs(max_len: usize) -> Vec<KneadingInvariant> {
    let plus = words_with_prefix([1, 0], max_len);
    let minus = words_with_prefix([0, 1], max_len);
    let mut out = Vec::new();
    for a in &plus {
        for b in &minus {
            out.push(
                KneadingInvariant::new(EpSeq::periodic(a.clone()).unwrap(), EpSeq::periodic(b.clone()).unwrap())
                    .unwrap(),
            );
        }
    }
    out
}

/// Pairs `u·v^∞` with short preperiods, in addition to the periodic ones.
pub fn eventually_periodic_pairs(max_pre: usize, max_per: usize) -> Vec<KneadingInvariant> {
    let seqs = |first: [u8; 2]| -> Vec<EpSeq> {
        let mut v = Vec::new();
        for pre_len in 0..=max_pre {
            for per_len in 1..=max_per {
                let n = pre_len + per_len;
                if n < 2 {
                    continue;
                }
                for bits in 0..(1u32 << (n - 2)) {
                    let mut d = first.to_vec();
                    d.extend((0..n - 2).rev().map(|i| ((bits >> i) & 1) as u8));
                    let pre = Word::new(d[..pre_len].to_vec()).unwrap();
                    let per = Word::new(d[pre_len..].to_vec()).unwrap();
                    if per.is_empty() {
                        continue;
                    }
                    let s = EpSeq::new(pre, per).unwrap();
                    if s.prefix(2) == first {
                        v.push(s);
                    }
                }
            }
        }
        v.sort();
        v.dedup();
        v
    };
    let plus = seqs([1, 0]);
    let minus = seqs([0, 1]);
    let mut out = Vec::new();
    for a in &plus {
        for b in &minus {
            out.push(KneadingInvariant::new(a.clone(), b.clone()).unwrap());
        }
    }
    out
}

pub fn with_verdict(pool: &[KneadingInvariant], v: Verdict) -> Vec<KneadingInvariant> {
    pool.iter().filter(|x| validate(x).verdict == v).cloned().collect()
}

pub fn primes(pool: &[KneadingInvariant]) -> Vec<KneadingInvariant> {
    pool.iter()
        .filter(|x| factorize(x, 1).map(|f| f.steps().is_empty()).unwrap_or(false))
        .cloned()
        .collect()
}

/// Periodic renormalization words: `(10, 01)` under a random sequence of
/// the substitutions `1 → 10, 0 → 0` and `1 → 1, 0 → 01`.
pub fn random_rotation_step(rng: &mut impl Rng, max_depth: usize) -> RenormStep {
    let (mut a, mut b): (Word, Word) = ("10".parse().unwrap(), "01".parse().unwrap());
    let sub_a: (Word, Word) = ("10".parse().unwrap(), "0".parse().unwrap());
    let sub_b: (Word, Word) = ("1".parse().unwrap(), "01".parse().unwrap());
    for _ in 0..rng.gen_range(0..=max_depth) {
        let (p, m) = if rng.gen_bool(0.5) { &sub_a } else { &sub_b };
        a = a.substitute(p, m);
        b = b.substitute(p, m);
    }
    let w = RenormStep::new(a, b).unwrap();
    assert_eq!(w.kind(), StepKind::Periodic);
    w
}

/// Non-periodic words `(w₊, w₋)` from a prime periodic expansive invariant.
pub fn random_nonperiodic_step(rng: &mut impl Rng, prime_periodic: &[KneadingInvariant]) -> RenormStep {
    let f = prime_periodic.choose(rng).unwrap();
    RenormStep::new(f.kplus().per().clone(), f.kminus().per().clone()).unwrap()
}

pub fn random_step(rng: &mut impl Rng, prime_periodic: &[KneadingInvariant]) -> RenormStep {
    if rng.gen_bool(0.5) {
        random_rotation_step(rng, 3)
    } else {
        random_nonperiodic_step(rng, prime_periodic)
    }
}

/// `W₁ * … * W_n * K` for random words and a random base.
pub fn random_composite(
    rng: &mut impl Rng,
    base: &[KneadingInvariant],
    prime_periodic: &[KneadingInvariant],
    max_steps: usize,
) -> (Vec<RenormStep>, KneadingInvariant) {
    let n = rng.gen_range(0..=max_steps);
    let steps: Vec<RenormStep> = (0..n).map(|_| random_step(rng, prime_periodic)).collect();
    let kk = base.choose(rng).unwrap().clone();
    let c = steps.iter().rev().fold(kk, |acc, w| star_product(w, &acc));
    (steps, c)
}

/// `W₁ * … * W_n * K` with periodic words only, so the result keeps a
/// linear model `T_{β*,α*}` whenever `K` has one.
pub fn random_periodic_composite(rng: &mut impl Rng, base: &[KneadingInvariant], max_steps: usize) -> KneadingInvariant {
    let n = rng.gen_range(0..=max_steps);
    let steps: Vec<RenormStep> = (0..n).map(|_| random_rotation_step(rng, 3)).collect();
    let kk = base.choose(rng).unwrap().clone();
    steps.iter().rev().fold(kk, |acc, w| star_product(w, &acc))
}
