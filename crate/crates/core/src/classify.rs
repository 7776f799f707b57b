//! The complete invariant sequence `(β₁, α₁), …, (β*, α*)`, conjugacy,
//! the distance between kneading invariants, and region tags for
//! parameters in the triangle `Δ`.

use std::fmt;

use crate::error::{Error, Result};
use crate::kneading::{
    check_pair, kneading_from_params, validate, KneadingConfig, KneadingData, KneadingInvariant, LmoParams,
    Verdict,
};
use crate::param::params_of;
use crate::renorm::{factorize, factorize_formal, StepKind};
use crate::seqcore::{is_cyclic_shift, EpSeq, Rational, Word};

pub const DEFAULT_MAX_STEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    PrimePeriodic,
    PrimeExpansive,
    Rotation,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::PrimePeriodic => "PrimePeriodic",
            Region::PrimeExpansive => "PrimeExpansive",
            Region::Rotation => "Rotation",
        })
    }
}

/// One pair of the invariant sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamPoint {
    /// `(1, ρ)` for a periodic renormalization with rotation number `ρ`.
    Rotation(Rational),
    /// `(β, α)` of a prime factor; `periodic` when both sequences are
    /// purely periodic.
    Linear { beta: f64, alpha: f64, periodic: bool },
}

impl ParamPoint {
    pub fn beta(&self) -> f64 {
        match self {
            ParamPoint::Rotation(_) => 1.0,
            ParamPoint::Linear { beta, .. } => *beta,
        }
    }

    pub fn alpha(&self) -> f64 {
        match self {
            ParamPoint::Rotation(r) => *r.numer() as f64 / *r.denom() as f64,
            ParamPoint::Linear { alpha, .. } => *alpha,
        }
    }

    pub fn region(&self) -> Region {
        match self {
            ParamPoint::Rotation(_) => Region::Rotation,
            ParamPoint::Linear { periodic: true, .. } => Region::PrimePeriodic,
            ParamPoint::Linear { periodic: false, .. } => Region::PrimeExpansive,
        }
    }
}

impl fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamPoint::Rotation(r) => write!(f, "(1, {r}) {}", self.region()),
            ParamPoint::Linear { beta, alpha, .. } => write!(f, "({beta:.6}, {alpha:.6}) {}", self.region()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSequence {
    pub points: Vec<ParamPoint>,
    /// The factorization budget ran out; the terminal point is missing.
    pub truncated: bool,
}

fn require_expansive(k: &KneadingInvariant) -> Result<()> {
    let a = validate(k);
    if a.verdict != Verdict::Expansive {
        return Err(Error::Domain(format!("{k} is {}, not Expansive", a.verdict)));
    }
    Ok(())
}

/// Ordered pairs of the factorization `K = W₁ * … * W_m * K*`: `(1, ρ)` for a
/// periodic step, `(β, α)` of `(w₊^∞, w₋^∞)` for a non-periodic one, then
/// `(β*, α*)` of the terminal.
pub fn invariant_sequence(k: &KneadingInvariant, max_steps: usize, tol: f64) -> Result<InvariantSequence> {
    require_expansive(k)?;
    let f = factorize(k, max_steps)?;
    let mut points = Vec::with_capacity(f.steps().len() + 1);
    for w in f.steps() {
        points.push(match w.kind() {
            StepKind::Periodic => ParamPoint::Rotation(w.rotation_number().expect("periodic step")),
            StepKind::NonPeriodic => {
                let (beta, alpha) = params_of(&w.factor(), tol)?;
                ParamPoint::Linear {
                    beta,
                    alpha,
                    periodic: true,
                }
            }
        });
    }
    if !f.truncated() {
        let t = f.terminal();
        let (beta, alpha) = params_of(t, tol)?;
        points.push(ParamPoint::Linear {
            beta,
            alpha,
            periodic: t.is_purely_periodic(),
        });
    }
    Ok(InvariantSequence {
        points,
        truncated: f.truncated(),
    })
}

/// Topological conjugacy of two expansive maps, decided on canonical
/// invariants.
pub fn conjugate(a: &KneadingInvariant, b: &KneadingInvariant) -> Result<bool> {
    require_expansive(a)?;
    require_expansive(b)?;
    Ok(a == b)
}

/// `d = 2^{−p}(1 + 2^{−s₊} + 2^{−s₋})`; `None` stands for an infinite count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distance {
    pub p: Option<usize>,
    pub splus: Option<usize>,
    pub sminus: Option<usize>,
    pub value: f64,
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |x: Option<usize>| x.map_or("inf".to_string(), |v| v.to_string());
        write!(
            f,
            "{} (p={}, s+={}, s-={})",
            self.value,
            show(self.p),
            show(self.splus),
            show(self.sminus)
        )
    }
}

fn pow2_neg(s: Option<usize>) -> f64 {
    s.map_or(0.0, |s| 0.5f64.powi(s as i32))
}

/// `p` counts the leading renormalization steps with equal words; `s±` are
/// common prefix lengths of the `p`-fold quotients.
///
/// Works on the prefix constraints alone, so pairs that only satisfy the
/// non-strict admissibility inequalities, or fail them, still get a value.
pub fn distance(a: &KneadingInvariant, b: &KneadingInvariant, max_steps: usize) -> Distance {
    if a == b {
        return Distance {
            p: None,
            splus: None,
            sminus: None,
            value: 0.0,
        };
    }
    let fa = factorize_formal(a, max_steps);
    let fb = factorize_formal(b, max_steps);
    let p = fa
        .steps()
        .iter()
        .zip(fb.steps())
        .take_while(|(x, y)| x == y)
        .count();
    let (la, lb) = (&fa.levels()[p], &fb.levels()[p]);
    let splus = la.kplus().common_prefix_len(lb.kplus());
    let sminus = la.kminus().common_prefix_len(lb.kminus());
    let value = 0.5f64.powi(p as i32) * (1.0 + pow2_neg(splus) + pow2_neg(sminus));
    Distance {
        p: Some(p),
        splus,
        sminus,
        value,
    }
}

/// Classification of a parameter pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTag {
    Rotation(Rational),
    PrimePeriodic,
    PrimeExpansive,
    /// Renormalizable with `m` detected steps.
    Renormalizable(usize),
    Undetected,
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionTag::Rotation(r) => write!(f, "Rotation({r})"),
            RegionTag::PrimePeriodic => f.write_str("PrimePeriodic"),
            RegionTag::PrimeExpansive => f.write_str("PrimeExpansive"),
            RegionTag::Renormalizable(m) => write!(f, "Renormalizable({m})"),
            RegionTag::Undetected => f.write_str("Undetected"),
        }
    }
}

const UNIT_SLOPE_TOL: f64 = 1e-12;
const MAX_ROTATION_DENOM: u64 = 1000;
const ROTATION_TOL: f64 = 1e-9;
/// Longest renormalization word tried on finite kneading prefixes.
const PREFIX_WORD_MAX: usize = 64;
/// Fewest quotient symbols for a prefix parse to count.
const PREFIX_QUOTIENT_MIN: usize = 64;

fn as_rational(x: f64) -> Option<Rational> {
    (1..=MAX_ROTATION_DENOM).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() < ROTATION_TOL && p >= 0.0).then(|| Rational::new(p as u64, q))
    })
}

/// Region of `T_{β,α}`.
///
/// With the kneading period detected the invariant is factorized exactly.
/// Otherwise the finite prefixes are parsed into renormalization blocks:
/// no parse means prime expansive, and a prefix too short to decide is
/// reported as undetected.
pub fn region_of(p: &LmoParams, cfg: &KneadingConfig, max_steps: usize) -> Result<RegionTag> {
    if (p.beta() - 1.0).abs() <= UNIT_SLOPE_TOL {
        return Ok(as_rational(p.alpha()).map_or(RegionTag::Undetected, RegionTag::Rotation));
    }
    match kneading_from_params(p, cfg)? {
        KneadingData::Periodic(k) => {
            if validate(&k).verdict != Verdict::Expansive {
                return Ok(RegionTag::Undetected);
            }
            let f = factorize(&k, max_steps)?;
            Ok(match (f.steps().len(), k.is_purely_periodic()) {
                (0, true) => RegionTag::PrimePeriodic,
                (0, false) => RegionTag::PrimeExpansive,
                (m, _) => RegionTag::Renormalizable(m),
            })
        }
        KneadingData::Undetected { kplus, kminus } => Ok(prefix_region(kplus, kminus, max_steps)),
    }
}

enum PrefixParse {
    Prime,
    Inconclusive,
    Quotient(Vec<u8>, Vec<u8>),
}

fn prefix_region(mut kplus: Vec<u8>, mut kminus: Vec<u8>, max_steps: usize) -> RegionTag {
    let mut m = 0;
    while m < max_steps {
        match prefix_renorm(&kplus, &kminus) {
            PrefixParse::Prime => break,
            PrefixParse::Inconclusive if m == 0 => return RegionTag::Undetected,
            PrefixParse::Inconclusive => break,
            PrefixParse::Quotient(a, b) => {
                m += 1;
                kplus = a;
                kminus = b;
            }
        }
    }
    if m == 0 {
        RegionTag::PrimeExpansive
    } else {
        RegionTag::Renormalizable(m)
    }
}

/// Greedy block parse of a finite stream; the trailing partial block must
/// be a prefix of its word.
fn parse_prefix(s: &[u8], wp: &[u8], wm: &[u8]) -> Option<Vec<u8>> {
    let mut out = Vec::with_capacity(s.len() / wp.len().min(wm.len()) + 1);
    let mut i = 0;
    while i < s.len() {
        let w = if s[i] == 1 { wp } else { wm };
        let n = w.len().min(s.len() - i);
        if s[i..i + n] != w[..n] {
            return None;
        }
        if n == w.len() {
            out.push(s[i]);
        }
        i += w.len();
    }
    Some(out)
}

fn prefix_renorm(kplus: &[u8], kminus: &[u8]) -> PrefixParse {
    let bound = PREFIX_WORD_MAX.min(kplus.len() / 2).min(kminus.len() / 2);
    for m in 2..=bound {
        for sum in m + 2..=2 * m {
            for r in 2..=m {
                let l = sum - r;
                if l < 2 || l > m || (r != m && l != m) {
                    continue;
                }
                let (wp, wm) = (&kplus[..r], &kminus[..l]);
                if kplus[r..r + l] != *wm || kminus[l..l + r.min(kminus.len() - l)] != wp[..r.min(kminus.len() - l)] {
                    continue;
                }
                let (Some(a), Some(b)) = (parse_prefix(kplus, wp, wm), parse_prefix(kminus, wp, wm)) else {
                    continue;
                };
                if a.get(..2) != Some(&[1, 0]) || b.get(..2) != Some(&[0, 1]) {
                    continue;
                }
                let (wpw, wmw) = (Word::new(wp.to_vec()).expect("binary"), Word::new(wm.to_vec()).expect("binary"));
                let wanted = if is_cyclic_shift(&wpw, &wmw) {
                    Verdict::Rotational
                } else {
                    Verdict::Expansive
                };
                let factor = check_pair(
                    &EpSeq::periodic(wpw).expect("non-empty"),
                    &EpSeq::periodic(wmw).expect("non-empty"),
                );
                if factor.verdict != wanted {
                    continue;
                }
                if a.len() < PREFIX_QUOTIENT_MIN || b.len() < PREFIX_QUOTIENT_MIN {
                    return PrefixParse::Inconclusive;
                }
                return PrefixParse::Quotient(a, b);
            }
        }
    }
    PrefixParse::Prime
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::{solve_beta, DEFAULT_TOL};
    use crate::renorm::{star_product, RenormStep};

    fn k(s: &str) -> KneadingInvariant {
        s.parse().unwrap()
    }

    fn linear(p: &ParamPoint) -> (f64, f64) {
        (p.beta(), p.alpha())
    }

    #[test]
    fn invariant_sequence_examples() {
        let s = invariant_sequence(&k("(10) (011)"), 16, DEFAULT_TOL).unwrap();
        assert_eq!(s.points.len(), 1);
        let (b, a) = linear(&s.points[0]);
        assert!((b - 1.3247).abs() < 1e-4 && (a - 0.4302).abs() < 1e-4);
        assert_eq!(s.points[0].region(), Region::PrimePeriodic);

        for (composite, rho) in [("(100101) (0110)", Rational::new(1, 2)), ("(100010010) (010100)", Rational::new(1, 3))] {
            let s = invariant_sequence(&k(composite), 16, DEFAULT_TOL).unwrap();
            assert_eq!(s.points.len(), 2);
            assert_eq!(s.points[0], ParamPoint::Rotation(rho));
            let (b, a) = linear(&s.points[1]);
            assert!((b - 1.3247).abs() < 1e-4 && (a - 0.2451).abs() < 1e-4);
            assert_eq!(s.points[1].region(), Region::PrimePeriodic);
        }
    }

    #[test]
    fn invariant_sequence_rejects_non_expansive() {
        assert!(invariant_sequence(&k("(10) (01)"), 16, DEFAULT_TOL).is_err());
    }

    #[test]
    fn conjugacy() {
        let a = k("(10) (011)");
        let b = k("10(10) (011)");
        assert!(conjugate(&a, &b).unwrap());
        assert!(!conjugate(&a, &k("(100) (01)")).unwrap());
        assert!(!conjugate(&k("(100101) (0110)"), &k("(100010010) (010100)")).unwrap());
    }

    #[test]
    fn distance_examples() {
        let f = k("(10001) (01100)");
        let g = k("1000110001(110) 0110001100(01)");
        let h = k("10001(100) 01100(01)");
        let d = distance(&f, &g, 16);
        assert_eq!((d.p, d.splus, d.sminus), (Some(0), Some(11), Some(12)));
        assert_eq!(d.value, 1.0 + 2f64.powi(-11) + 2f64.powi(-12));
        let d = distance(&f, &h, 16);
        assert_eq!((d.p, d.splus, d.sminus), (Some(1), Some(3), Some(3)));
        assert_eq!(d.value, 0.625);
        let d = distance(&f, &f, 16);
        assert_eq!(d.value, 0.0);
        assert_eq!(d.p, None);
    }

    #[test]
    fn region_examples() {
        let cfg = KneadingConfig::default();
        assert_eq!(
            region_of(&LmoParams::new(1.0, 0.5).unwrap(), &cfg, 16).unwrap(),
            RegionTag::Rotation(Rational::new(1, 2))
        );
        let b1 = solve_beta(&k("(10) (011)"), DEFAULT_TOL).unwrap();
        let p1 = LmoParams::new(b1, 1.0 / (1.0 + b1)).unwrap();
        assert_eq!(region_of(&p1, &cfg, 16).unwrap(), RegionTag::PrimePeriodic);
        assert_eq!(
            region_of(&LmoParams::new(2.0, 0.0).unwrap(), &cfg, 16).unwrap(),
            RegionTag::PrimeExpansive
        );
        let k4 = k("(100101) (0110)");
        let b4 = solve_beta(&k4, DEFAULT_TOL).unwrap();
        let a4 = crate::param::alpha_from_kplus(&k4, b4).unwrap();
        let p4 = LmoParams::new(b4, a4).unwrap();
        assert_eq!(region_of(&p4, &cfg, 16).unwrap(), RegionTag::Renormalizable(1));
    }

    #[test]
    fn region_of_rounded_composite_parameters() {
        // Rounded parameters miss the periodic orbit; the prefix parse still
        // sees the outer renormalization.
        let p = LmoParams::new(1.150964, 0.418876).unwrap();
        let tag = region_of(&p, &KneadingConfig::default(), 16).unwrap();
        assert!(matches!(tag, RegionTag::Renormalizable(_)), "{tag}");
    }

    #[test]
    fn prefix_parse_finds_composite_structure() {
        let w = RenormStep::new("10".parse().unwrap(), "01".parse().unwrap()).unwrap();
        let c = star_product(&w, &k("1001(0) 01(1)"));
        let tag = prefix_region(c.kplus().prefix(1024), c.kminus().prefix(1024), 16);
        assert_eq!(tag, RegionTag::Renormalizable(1));
        assert_eq!(
            prefix_region(k("1(0) 0(1)").kplus().prefix(1024), k("1(0) 0(1)").kminus().prefix(1024), 16),
            RegionTag::PrimeExpansive
        );
    }

    #[test]
    fn irrational_rotation_is_undetected() {
        let p = LmoParams::new(1.0, std::f64::consts::FRAC_1_SQRT_2 - 0.5).unwrap();
        assert_eq!(
            region_of(&p, &KneadingConfig::default(), 16).unwrap(),
            RegionTag::Undetected
        );
    }
}
