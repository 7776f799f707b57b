//! The parameters `(β, α)` of the linear mod one model of a kneading
//! invariant: the kneading series `K(z)`, its smallest root, the closed-form
//! α series, the periodic renormalization recursion and transition matrices.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::kneading::{validate, KneadingInvariant, Verdict};
use crate::renorm::{star_product, Factorization, RenormStep, StepKind};
use crate::seqcore::EpSeq;

/// `Σ c_i z^i = head(z) + z^shift · tail(z) / (1 − z^period)` with integer
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSeries {
    head: Vec<i64>,
    tail_num: Vec<i64>,
    tail_shift: usize,
    tail_period: usize,
}

impl RationalSeries {
    /// `Σ_{i≥0} s_i z^i` for the digits `s_0 s_1 …` of `s`.
    pub fn from_seq(s: &EpSeq) -> Self {
        let head = s.pre().digits().iter().map(|&d| d as i64).collect();
        let tail_num = s.per().digits().iter().map(|&d| d as i64).collect();
        RationalSeries {
            head,
            tail_num,
            tail_shift: s.pre().len(),
            tail_period: s.per().len(),
        }
    }

    /// `Σ_{i≥0} (a_i − b_i) z^i`, combined over a common preperiod and the
    /// least common multiple of the periods.
    pub fn difference(a: &EpSeq, b: &EpSeq) -> Self {
        let shift = a.pre().len().max(b.pre().len());
        let period = a.per().len().lcm(&b.per().len());
        let coeff = |i: usize| a.digit0(i) as i64 - b.digit0(i) as i64;
        RationalSeries {
            head: (0..shift).map(coeff).collect(),
            tail_num: (shift..shift + period).map(coeff).collect(),
            tail_shift: shift,
            tail_period: period,
        }
    }

    pub fn head(&self) -> &[i64] {
        &self.head
    }

    pub fn tail_num(&self) -> &[i64] {
        &self.tail_num
    }

    pub fn tail_shift(&self) -> usize {
        self.tail_shift
    }

    pub fn tail_period(&self) -> usize {
        self.tail_period
    }

    /// Coefficient of `z^i`.
    pub fn coeff(&self, i: usize) -> i64 {
        if i < self.tail_shift {
            self.head[i]
        } else {
            self.tail_num[(i - self.tail_shift) % self.tail_period]
        }
    }

    /// Value of the series for `|z| < 1`.
    pub fn eval(&self, z: f64) -> f64 {
        let head = horner(&self.head, z);
        let tail = horner(&self.tail_num, z);
        head + z.powi(self.tail_shift as i32) * tail / (1.0 - z.powi(self.tail_period as i32))
    }

    /// Numerator `N` with the series equal to `N(z) / (1 − z^period)`.
    pub fn numerator(&self) -> Vec<i64> {
        let len = (self.tail_shift + self.tail_period).max(self.head.len() + self.tail_period);
        let mut n = vec![0i64; len];
        for (i, &c) in self.head.iter().enumerate() {
            n[i] += c;
            n[i + self.tail_period] -= c;
        }
        for (i, &c) in self.tail_num.iter().enumerate() {
            n[self.tail_shift + i] += c;
        }
        while n.len() > 1 && n.last() == Some(&0) {
            n.pop();
        }
        n
    }
}

fn horner(c: &[i64], z: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * z + x as f64)
}

fn write_poly(f: &mut fmt::Formatter<'_>, c: &[i64]) -> fmt::Result {
    let mut first = true;
    for (i, &x) in c.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let sign = if x < 0 { "-" } else { "+" };
        if first {
            if x < 0 {
                f.write_str("-")?;
            }
        } else {
            write!(f, " {sign} ")?;
        }
        let m = x.unsigned_abs();
        match (i, m) {
            (0, _) => write!(f, "{m}")?,
            (_, 1) => {}
            _ => write!(f, "{m}")?,
        }
        match i {
            0 => {}
            1 => f.write_str("z")?,
            _ => write!(f, "z^{i}")?,
        }
        first = false;
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        write_poly(f, &self.numerator())?;
        f.write_str(")/(")?;
        let mut d = vec![0i64; self.tail_period + 1];
        d[0] = 1;
        d[self.tail_period] -= 1;
        write_poly(f, &d)?;
        f.write_str(")")
    }
}

/// `K(z) = Σ_{i≥1} (b_i − a_i) z^{i−1}` with `b = k₊`, `a = k₋`.
pub fn kz_series(k: &KneadingInvariant) -> RationalSeries {
    RationalSeries::difference(k.kplus(), k.kminus())
}

pub const DEFAULT_TOL: f64 = 1e-12;

const SCAN_STEP: f64 = 1e-3;

/// `β = 1/z` for the smallest root `z` of `K(z)` in `(0, 1)`.
///
/// A grid scan locates the first sign change, refined near 1 by geometric
/// steps, then bisection shrinks the bracket below `tol`.
pub fn solve_beta(k: &KneadingInvariant, tol: f64) -> Result<f64> {
    if validate(k).verdict == Verdict::Invalid {
        return Err(Error::InvalidInvariant(format!("{k} is not admissible")));
    }
    let series = kz_series(k);
    let f = |z: f64| series.eval(z);
    let mut grid: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
    let mut gap = SCAN_STEP;
    while gap > 1e-12 {
        gap /= 2.0;
        grid.push(1.0 - gap);
    }
    // K(0) = b₁ − a₁ = 1.
    let mut lo = 0.0;
    for z in grid {
        let v = f(z);
        if v == 0.0 {
            return Ok(1.0 / z);
        }
        if v < 0.0 {
            return Ok(1.0 / bisect(&f, lo, z, tol));
        }
        lo = z;
    }
    Err(Error::NoRoot)
}

/// Bisection on `[lo, hi]` with `f(lo) > 0 > f(hi)`.
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn require_expanding(beta: f64) -> Result<()> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta = {beta} must exceed 1")));
    }
    Ok(())
}

/// `Σ_{i≥1} s_i β^{−i}` for a sequence `s_1 s_2 …`.
fn beta_sum(s: &EpSeq, beta: f64) -> f64 {
    let z = 1.0 / beta;
    z * RationalSeries::from_seq(s).eval(z)
}

/// `α = (β − 1) Σ k_i(0) / β^i` with `k(0) = σ(k₊)`.
pub fn alpha_from_kplus(k: &KneadingInvariant, beta: f64) -> Result<f64> {
    require_expanding(beta)?;
    Ok((beta - 1.0) * beta_sum(&k.k0(), beta))
}

/// `α = (β − 1)(Σ k_i(1) / β^i − 1)` with `k(1) = σ(k₋)`.
pub fn alpha_from_kminus(k: &KneadingInvariant, beta: f64) -> Result<f64> {
    require_expanding(beta)?;
    Ok((beta - 1.0) * (beta_sum(&k.k1(), beta) - 1.0))
}

/// `α(β) = (β − 1) Σ a_i / β^i` for the itinerary `a` of 0 under a rotation,
/// which is the least sequence in its shift orbit.
pub fn rotation_limit_alpha(a: &EpSeq, beta: f64) -> Result<f64> {
    require_expanding(beta)?;
    if a.shifts().any(|s| s < *a) {
        return Err(Error::Domain(format!("{a} is not the least point of its orbit")));
    }
    Ok((beta - 1.0) * beta_sum(a, beta))
}

/// α of `W * RK` at `z = 1/β` from the quotient `RK`:
/// `K₊(z) = (1 − z)/2 · (RK₊(zⁿ) + RK₋(zⁿ)) + w₋(z)/(1 − zⁿ)` and
/// `α = (1/z − 1)(K₊(z) − 1)`, where `K₊(z) = Σ_{i≥0} k₊(i) zⁱ`.
pub fn alpha_via_renorm(w: &RenormStep, rk: &KneadingInvariant, z: f64) -> Result<f64> {
    if w.kind() != StepKind::Periodic {
        return Err(Error::Unsupported(format!("{w} is not a periodic renormalization")));
    }
    let Some(n) = w.uniform_len() else {
        return Err(Error::Unsupported(format!("{w} has words of different lengths")));
    };
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(format!("z = {z} outside (0, 1)")));
    }
    let zn = z.powi(n as i32);
    let rp = RationalSeries::from_seq(rk.kplus()).eval(zn);
    let rm = RationalSeries::from_seq(rk.kminus()).eval(zn);
    let wm = horner(&w.wminus().digits().iter().map(|&d| d as i64).collect::<Vec<_>>(), z);
    let kp = 0.5 * (1.0 - z) * (rp + rm) + wm / (1.0 - zn);
    Ok((1.0 / z - 1.0) * (kp - 1.0))
}

/// Applies the recursion to the outermost step of `steps * terminal`; with
/// no steps this is [`alpha_from_kplus`] at `β = 1/z`.
pub fn alpha_via_renorm_chain(steps: &[RenormStep], terminal: &KneadingInvariant, z: f64) -> Result<f64> {
    match steps.split_first() {
        None => alpha_from_kplus(terminal, 1.0 / z),
        Some((first, rest)) => {
            let inner = rest.iter().rev().fold(terminal.clone(), |acc, w| star_product(w, &acc));
            alpha_via_renorm(first, &inner, z)
        }
    }
}

/// `β* = β_terminal^(1/∏ lᵢ)` when every step is periodic with
/// `|w₊| = |w₋| = lᵢ`.
pub fn beta_star(factors: &Factorization, beta_terminal: f64) -> Result<f64> {
    let mut product = 1u64;
    for (step, w) in factors.steps().iter().enumerate() {
        match (w.kind(), w.uniform_len()) {
            (StepKind::Periodic, Some(l)) => product *= l as u64,
            _ => return Err(Error::NotUniformlyLinearizable { step }),
        }
    }
    Ok(beta_terminal.powf(1.0 / product as f64))
}

/// `w₊(z) − w₋(z) = 1 − z`, i.e. the words differ exactly in their first two
/// symbols.
pub fn periodic_words_identity(w: &RenormStep) -> Result<bool> {
    if w.kind() != StepKind::Periodic {
        return Err(Error::Domain(format!("{w} is not a periodic renormalization")));
    }
    let diff = w
        .wplus()
        .digits()
        .iter()
        .zip(w.wminus().digits())
        .map(|(&a, &b)| a as i64 - b as i64);
    Ok(diff.enumerate().all(|(i, d)| {
        d == match i {
            0 => 1,
            1 => -1,
            _ => 0,
        }
    }))
}

/// Square 0/1 matrix; every row has a nonzero entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<u8>>,
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("transition matrix must be square and non-empty".into()));
        }
        if rows.iter().flatten().any(|&x| x > 1) {
            return Err(Error::Domain("transition matrix entries must be 0 or 1".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.iter().all(|&x| x == 0)) {
            return Err(Error::Domain(format!("row {i} has no successor")));
        }
        Ok(TransitionMatrix { rows })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.rows[i][j]
    }

    /// True iff `P A Pᵀ = other` for some permutation matrix `P`.
    pub fn permutation_equivalent(&self, other: &TransitionMatrix) -> bool {
        let n = self.size();
        if n != other.size() {
            return false;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        fn extend(a: &TransitionMatrix, b: &TransitionMatrix, perm: &mut Vec<usize>, used: &mut [bool], k: usize) -> bool {
            let n = a.size();
            if k == n {
                return true;
            }
            for c in 0..n {
                if used[c] {
                    continue;
                }
                perm[k] = c;
                let ok = (0..=k).all(|i| a.get(i, k) == b.get(perm[i], c) && a.get(k, i) == b.get(c, perm[i]));
                if ok {
                    used[c] = true;
                    if extend(a, b, perm, used, k + 1) {
                        return true;
                    }
                    used[c] = false;
                }
            }
            false
        }
        extend(self, other, &mut perm, &mut used, 0)
    }
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

/// Markov partition of a purely periodic expansive invariant.
///
/// Partition points are the shifts of `k(0)` and `k(1)` in lexicographic
/// order; `k₋` and `k₊` are the two sides of the cut. States are the gaps
/// between consecutive points that start with the same symbol, and gap
/// `[u, v]` maps onto `[σu, σv]`.
pub fn transition_matrix(k: &KneadingInvariant) -> Result<TransitionMatrix> {
    if !k.is_purely_periodic() {
        return Err(Error::Unsupported("transition matrix requires purely periodic invariant".into()));
    }
    if validate(k).verdict != Verdict::Expansive {
        return Err(Error::InvalidInvariant(format!("{k} is not expansive")));
    }
    let mut points: Vec<EpSeq> = k.kplus().shifts().chain(k.kminus().shifts()).collect();
    points.sort();
    points.dedup();
    let gaps: Vec<(EpSeq, EpSeq)> = points
        .windows(2)
        .filter(|p| p[0].digit_at(1) == p[1].digit_at(1))
        .map(|p| (p[0].clone(), p[1].clone()))
        .collect();
    let rows = gaps
        .iter()
        .map(|(u, v)| {
            let (su, sv) = (u.shift(1), v.shift(1));
            gaps.iter().map(|(l, r)| u8::from(su <= *l && *r <= sv)).collect()
        })
        .collect();
    TransitionMatrix::new(rows)
}

/// Largest eigenvalue of a nonnegative matrix by power iteration on `A + I`,
/// stopped when the Collatz–Wielandt bounds agree to relative `tol`.
pub fn spectral_radius(m: &TransitionMatrix, tol: f64) -> f64 {
    let n = m.size();
    let mut x = vec![1.0f64; n];
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for _ in 0..1_000_000 {
        let y: Vec<f64> = (0..n)
            .map(|i| x[i] + (0..n).map(|j| m.get(i, j) as f64 * x[j]).sum::<f64>())
            .collect();
        let ratios = y.iter().zip(&x).map(|(a, b)| a / b);
        lo = ratios.clone().fold(f64::INFINITY, f64::min);
        hi = ratios.fold(0.0, f64::max);
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / norm).collect();
        if hi - lo <= tol * hi {
            break;
        }
    }
    0.5 * (lo + hi) - 1.0
}

/// Convenience: `(β, α)` of an expansive invariant.
pub fn params_of(k: &KneadingInvariant, tol: f64) -> Result<(f64, f64)> {
    let beta = solve_beta(k, tol)?;
    Ok((beta, alpha_from_kplus(k, beta)?))
}
