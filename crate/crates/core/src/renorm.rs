//! Renormalization of kneading invariants: the `*`-product, the quotient
//! operator `R`, minimal renormalization words and prime factorization.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::kneading::{check_pair, validate, KneadingInvariant, Verdict};
use crate::seqcore::{is_cyclic_shift, EpSeq, Rational, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// `w₊` and `w₋` are rotations of one word.
    Periodic,
    NonPeriodic,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Periodic => "Periodic",
            StepKind::NonPeriodic => "NonPeriodic",
        })
    }
}

/// A pair of renormalization words. `w₊` starts with `10`, `w₋` with `01`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RenormStep {
    wplus: Word,
    wminus: Word,
    kind: StepKind,
}

impl RenormStep {
    pub fn new(wplus: Word, wminus: Word) -> Result<Self> {
        if wplus.digits().get(..2) != Some(&[1, 0]) || wminus.digits().get(..2) != Some(&[0, 1]) {
            return Err(Error::InvalidInvariant(format!(
                "renormalization words must start 10 and 01, got ({wplus}, {wminus})"
            )));
        }
        let kind = if is_cyclic_shift(&wplus, &wminus) {
            StepKind::Periodic
        } else {
            StepKind::NonPeriodic
        };
        Ok(RenormStep { wplus, wminus, kind })
    }

    pub fn wplus(&self) -> &Word {
        &self.wplus
    }

    pub fn wminus(&self) -> &Word {
        &self.wminus
    }

    pub fn kind(&self) -> StepKind {
        self.kind
    }

    /// The periodic invariant `(w₊^∞, w₋^∞)`.
    pub fn factor(&self) -> KneadingInvariant {
        KneadingInvariant::new(
            EpSeq::periodic(self.wplus.clone()).expect("non-empty word"),
            EpSeq::periodic(self.wminus.clone()).expect("non-empty word"),
        )
        .expect("prefixes checked on construction")
    }

    /// Rotation number of `w₊^∞` for periodic steps.
    pub fn rotation_number(&self) -> Option<Rational> {
        match self.kind {
            StepKind::Periodic => Some(Rational::new(self.wplus.ones() as u64, self.wplus.len() as u64)),
            StepKind::NonPeriodic => None,
        }
    }

    /// Common word length `n` when `|w₊| = |w₋|`.
    pub fn uniform_len(&self) -> Option<usize> {
        (self.wplus.len() == self.wminus.len()).then_some(self.wplus.len())
    }
}

impl fmt::Display for RenormStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.wplus, self.wminus)
    }
}

/// `W * K`: replaces every 1 by `w₊` and every 0 by `w₋` in both sequences.
pub fn star_product(w: &RenormStep, k: &KneadingInvariant) -> KneadingInvariant {
    KneadingInvariant::new(
        k.kplus().substitute(&w.wplus, &w.wminus),
        k.kminus().substitute(&w.wplus, &w.wminus),
    )
    .expect("w+ starts 10 and w- starts 01")
}

/// Greedy block parse of `s` into `{w₊, w₋}`; the block at each position is
/// forced by the digit there. Returns the block sequence read as 1/0.
fn parse_blocks(s: &EpSeq, wp: &Word, wm: &Word) -> Option<EpSeq> {
    let p = s.pre().len();
    let q = s.per().len();
    let norm = |i: usize| if i < p { i } else { p + (i - p) % q };
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        i = norm(i);
        if let Some(&k) = seen.get(&i) {
            let pre = Word::from_digits_unchecked(out[..k].to_vec());
            let per = Word::from_digits_unchecked(out[k..].to_vec());
            return EpSeq::new(pre, per).ok();
        }
        seen.insert(i, out.len());
        let d = s.digit0(i);
        let w = if d == 1 { wp } else { wm };
        if !w.digits().iter().enumerate().all(|(j, &x)| s.digit0(i + j) == x) {
            return None;
        }
        out.push(d);
        i += w.len();
    }
}

/// `RK`, the invariant with `star_product(W, RK) = K`.
pub fn quotient(k: &KneadingInvariant, w: &RenormStep) -> Result<KneadingInvariant> {
    let fail = || Error::NotRenormalizable {
        wplus: w.wplus.to_string(),
        wminus: w.wminus.to_string(),
    };
    let plus = parse_blocks(k.kplus(), &w.wplus, &w.wminus).ok_or_else(fail)?;
    let minus = parse_blocks(k.kminus(), &w.wplus, &w.wminus).ok_or_else(fail)?;
    // k₊ = w₊ w₋^{p₁} …, k₋ = w₋ w₊^{m₁} … with p₁, m₁ ≥ 1.
    KneadingInvariant::new(plus, minus).map_err(|_| fail())
}

/// Longest word considered: `|pre| + 2|per|` of the longer sequence.
fn search_bound(k: &KneadingInvariant) -> usize {
    let b = |s: &EpSeq| s.pre().len() + 2 * s.per().len();
    b(k.kplus()).max(b(k.kminus()))
}

/// Smallest renormalization in the order `max(r, ℓ)`, then `r + ℓ`, then
/// `r`, with `r = |w₊| ≥ 2` and `ℓ = |w₋| ≥ 2`. The factor `(w₊^∞, w₋^∞)`
/// must be expansive for non-periodic words and rotational for periodic ones.
///
/// No admissibility check is made on `k`, so formally renormalizable but
/// invalid pairs are still parsed.
pub fn find_renorm_formal(k: &KneadingInvariant) -> Option<(RenormStep, KneadingInvariant)> {
    let bound = search_bound(k);
    let kp = k.kplus().prefix(2 * bound);
    let km = k.kminus().prefix(2 * bound);
    for m in 2..=bound {
        for sum in m + 2..=2 * m {
            for r in 2..=m {
                let l = sum - r;
                if l < 2 || l > m || (r != m && l != m) {
                    continue;
                }
                // k₊ = w₊w₋… and k₋ = w₋w₊…
                if kp[r..r + l] != km[..l] || km[l..l + r] != kp[..r] {
                    continue;
                }
                let step = RenormStep::new(
                    Word::from_digits_unchecked(kp[..r].to_vec()),
                    Word::from_digits_unchecked(km[..l].to_vec()),
                )
                .expect("prefixes of an invariant");
                let Ok(rk) = quotient(k, &step) else {
                    continue;
                };
                let f = step.factor();
                let wanted = match step.kind {
                    StepKind::Periodic => Verdict::Rotational,
                    StepKind::NonPeriodic => Verdict::Expansive,
                };
                if check_pair(f.kplus(), f.kminus()).verdict == wanted {
                    return Some((step, rk));
                }
            }
        }
    }
    None
}

/// Minimal renormalization of an admissible invariant.
pub fn find_minimal_renorm(k: &KneadingInvariant) -> Result<Option<(RenormStep, KneadingInvariant)>> {
    reject_invalid(k)?;
    Ok(find_renorm_formal(k))
}

fn reject_invalid(k: &KneadingInvariant) -> Result<()> {
    let a = validate(k);
    if a.verdict == Verdict::Invalid {
        let why = a.witness.map(|w| format!(" ({} at n = {})", w.relation, w.n)).unwrap_or_default();
        return Err(Error::InvalidInvariant(format!("{k} is not admissible{why}")));
    }
    Ok(())
}

/// `K = W₁ * W₂ * … * W_m * K*` with `K*` prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    steps: Vec<RenormStep>,
    /// `levels[i] = Rⁱ K`; the last entry is the terminal.
    levels: Vec<KneadingInvariant>,
    truncated: bool,
}

impl Factorization {
    pub fn steps(&self) -> &[RenormStep] {
        &self.steps
    }

    pub fn levels(&self) -> &[KneadingInvariant] {
        &self.levels
    }

    pub fn terminal(&self) -> &KneadingInvariant {
        self.levels.last().expect("at least the input level")
    }

    /// Set when the step budget ran out before a prime was reached.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Folds the terminal back through the steps.
    pub fn recompose(&self) -> KneadingInvariant {
        self.steps
            .iter()
            .rev()
            .fold(self.terminal().clone(), |acc, w| star_product(w, &acc))
    }
}

/// Repeated minimal renormalization until prime or `max_steps` is hit.
pub fn factorize(k: &KneadingInvariant, max_steps: usize) -> Result<Factorization> {
    reject_invalid(k)?;
    Ok(factorize_formal(k, max_steps))
}

/// [`factorize`] without the admissibility gate.
pub fn factorize_formal(k: &KneadingInvariant, max_steps: usize) -> Factorization {
    let mut steps = Vec::new();
    let mut levels = vec![k.clone()];
    let mut truncated = false;
    loop {
        let cur = levels.last().unwrap();
        let Some((step, rk)) = find_renorm_formal(cur) else {
            break;
        };
        if steps.len() == max_steps {
            truncated = true;
            break;
        }
        steps.push(step);
        levels.push(rk);
    }
    Factorization {
        steps,
        levels,
        truncated,
    }
}
