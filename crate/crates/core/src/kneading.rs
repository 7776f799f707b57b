//! Kneading invariants of Lorenz maps, the Hubbard–Sparrow admissibility
//! test, and kneading data of linear mod one maps `x ↦ βx + α mod 1`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::{EpSeq, Word};

/// The pair `(k₊, k₋)` of itineraries of the two one-sided limits at the
/// discontinuity. `k₊` starts with `10` and `k₋` with `01`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInvariant", into = "RawInvariant")]
pub struct KneadingInvariant {
    kplus: EpSeq,
    kminus: EpSeq,
}

#[derive(Serialize, Deserialize)]
struct RawInvariant {
    kplus: EpSeq,
    kminus: EpSeq,
}

impl TryFrom<RawInvariant> for KneadingInvariant {
    type Error = Error;
    fn try_from(raw: RawInvariant) -> Result<Self> {
        KneadingInvariant::new(raw.kplus, raw.kminus)
    }
}

impl From<KneadingInvariant> for RawInvariant {
    fn from(k: KneadingInvariant) -> Self {
        RawInvariant {
            kplus: k.kplus,
            kminus: k.kminus,
        }
    }
}

impl KneadingInvariant {
    pub fn new(kplus: EpSeq, kminus: EpSeq) -> Result<Self> {
        if kplus.prefix(2) != [1, 0] {
            return Err(Error::InvalidInvariant(format!("k+ must start 10, got {kplus}")));
        }
        if kminus.prefix(2) != [0, 1] {
            return Err(Error::InvalidInvariant(format!("k- must start 01, got {kminus}")));
        }
        Ok(KneadingInvariant { kplus, kminus })
    }

    /// Builds `(1·k(0), 0·k(1))` from the itineraries of 0 and 1.
    pub fn from_endpoints(k0: &EpSeq, k1: &EpSeq) -> Result<Self> {
        Self::new(k0.prepend(&[1]), k1.prepend(&[0]))
    }

    pub fn kplus(&self) -> &EpSeq {
        &self.kplus
    }

    pub fn kminus(&self) -> &EpSeq {
        &self.kminus
    }

    /// `k(0) = σ(k₊)`.
    pub fn k0(&self) -> EpSeq {
        self.kplus.shift(1)
    }

    /// `k(1) = σ(k₋)`.
    pub fn k1(&self) -> EpSeq {
        self.kminus.shift(1)
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.kplus.is_purely_periodic() && self.kminus.is_purely_periodic()
    }
}

impl fmt::Display for KneadingInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kplus, self.kminus)
    }
}

impl fmt::Debug for KneadingInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K({self})")
    }
}

impl FromStr for KneadingInvariant {
    type Err = Error;

    /// Parses two whitespace separated sequence literals, `K+ K-`.
    fn from_str(s: &str) -> Result<Self> {
        let (kplus, kminus) = parse_pair(s)?;
        Self::new(kplus, kminus)
    }
}

/// Parses `K+ K-` without the prefix constraints. Error positions are
/// offsets into `s`.
pub fn parse_pair(s: &str) -> Result<(EpSeq, EpSeq)> {
    let mut tokens = s
        .char_indices()
        .filter(|&(i, c)| !c.is_whitespace() && (i == 0 || s[..i].ends_with(char::is_whitespace)))
        .map(|(i, _)| {
            let len = s[i..].find(char::is_whitespace).unwrap_or(s.len() - i);
            (i, &s[i..i + len])
        });
    let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
        return Err(Error::Parse {
            position: s.len(),
            message: "expected two sequence literals `K+ K-`".into(),
        });
    };
    if let Some((i, _)) = tokens.next() {
        return Err(Error::Parse {
            position: i,
            message: "unexpected third literal".into(),
        });
    }
    let at = |(offset, text): (usize, &str)| {
        text.parse::<EpSeq>().map_err(|e| match e {
            Error::Parse { position, message } => Error::Parse {
                position: position + offset,
                message,
            },
            other => other,
        })
    };
    Ok((at(a)?, at(b)?))
}

/// Which of the Hubbard–Sparrow inequalities failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `k₊` does not start with `10`, or `k₋` does not start with `01`.
    Prefix,
    /// `σⁿ(k₊) < σ(k₊)`.
    PlusBelowMin,
    /// `σⁿ(k₊) > σ(k₋)`.
    PlusAboveMax,
    /// `σⁿ(k₊) = σ(k₋)`.
    PlusHitsMax,
    /// `σⁿ(k₋) < σ(k₊)`.
    MinusBelowMin,
    /// `σⁿ(k₋) > σ(k₋)`.
    MinusAboveMax,
    /// `σⁿ(k₋) = σ(k₊)`.
    MinusHitsMin,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Relation::Prefix => "k+ must start 10 and k- must start 01",
            Relation::PlusBelowMin => "σⁿ(k+) < σ(k+)",
            Relation::PlusAboveMax => "σⁿ(k+) > σ(k-)",
            Relation::PlusHitsMax => "σⁿ(k+) = σ(k-)",
            Relation::MinusBelowMin => "σⁿ(k-) < σ(k+)",
            Relation::MinusAboveMax => "σⁿ(k-) > σ(k-)",
            Relation::MinusHitsMin => "σⁿ(k-) = σ(k+)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Expansive,
    Rotational,
    Invalid,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Expansive => "Expansive",
            Verdict::Rotational => "Rotational",
            Verdict::Invalid => "Invalid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub n: usize,
    pub relation: Relation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

/// Checks `σ(k₊) ≤ σⁿ(k₊) < σ(k₋)` and `σ(k₊) < σⁿ(k₋) ≤ σ(k₋)` over every
/// distinct shift. A non-strict failure makes the pair `Invalid`; if only a
/// strict inequality fails the pair is `Rotational`.
pub fn validate(k: &KneadingInvariant) -> Admissibility {
    check_pair(&k.kplus, &k.kminus)
}

/// Same as [`validate`] on raw sequences, reporting a bad prefix as
/// `Invalid` at `n = 0`.
pub fn check_pair(kplus: &EpSeq, kminus: &EpSeq) -> Admissibility {
    if kplus.prefix(2) != [1, 0] || kminus.prefix(2) != [0, 1] {
        return Admissibility {
            verdict: Verdict::Invalid,
            witness: Some(Witness {
                n: 0,
                relation: Relation::Prefix,
            }),
        };
    }
    let lo = kplus.shift(1);
    let hi = kminus.shift(1);
    let mut first_strict: Option<Witness> = None;

    // Orbits are short, so all shifts of k+ are checked before those of k-.
    for (n, s) in kplus.shifts().enumerate() {
        if s < lo {
            return invalid(n, Relation::PlusBelowMin);
        }
        match s.cmp(&hi) {
            Ordering::Greater => return invalid(n, Relation::PlusAboveMax),
            Ordering::Equal if first_strict.is_none() => {
                first_strict = Some(Witness {
                    n,
                    relation: Relation::PlusHitsMax,
                })
            }
            _ => {}
        }
    }
    for (n, s) in kminus.shifts().enumerate() {
        if s > hi {
            return invalid(n, Relation::MinusAboveMax);
        }
        match s.cmp(&lo) {
            Ordering::Less => return invalid(n, Relation::MinusBelowMin),
            Ordering::Equal if first_strict.is_none() => {
                first_strict = Some(Witness {
                    n,
                    relation: Relation::MinusHitsMin,
                })
            }
            _ => {}
        }
    }
    match first_strict {
        Some(w) => Admissibility {
            verdict: Verdict::Rotational,
            witness: Some(w),
        },
        None => Admissibility {
            verdict: Verdict::Expansive,
            witness: None,
        },
    }
}

fn invalid(n: usize, relation: Relation) -> Admissibility {
    Admissibility {
        verdict: Verdict::Invalid,
        witness: Some(Witness { n, relation }),
    }
}

/// Parameters of `T(x) = βx + α mod 1` with `(β, α)` in the triangle
/// `1 ≤ β ≤ 2`, `0 ≤ α ≤ 2 − β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmoParams {
    beta: f64,
    alpha: f64,
}

const DOMAIN_SLACK: f64 = 1e-12;

impl LmoParams {
    pub fn new(beta: f64, alpha: f64) -> Result<Self> {
        let ok = beta.is_finite()
            && alpha.is_finite()
            && (1.0..=2.0).contains(&beta)
            && alpha >= 0.0
            && alpha <= 2.0 - beta + DOMAIN_SLACK;
        if !ok {
            return Err(Error::ParamDomain { beta, alpha });
        }
        Ok(LmoParams {
            beta,
            alpha: alpha.min(2.0 - beta),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The discontinuity `c = (1 − α)/β`.
    pub fn critical_point(&self) -> f64 {
        (1.0 - self.alpha) / self.beta
    }
}

/// Side from which a landing on the critical point is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Right limit: symbol 1, continue from `T(c⁺) = 0`.
    Above,
    /// Left limit: symbol 0, continue from `T(c⁻) = 1`.
    Below,
}

/// Numerical settings for itineraries of `T_{β,α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItineraryConfig {
    /// An iterate within this distance of `c` is a landing on `c`.
    pub hit_tol: f64,
    /// Iterates farther than `hit_tol` but within this distance of `c`
    /// cannot be assigned a symbol reliably.
    pub ambiguity_tol: f64,
}

impl Default for ItineraryConfig {
    fn default() -> Self {
        ItineraryConfig {
            hit_tol: 1e-10,
            ambiguity_tol: 1e-9,
        }
    }
}

/// First `depth` symbols of the itinerary of `x` under `T_{β,α}`.
pub fn itinerary(p: &LmoParams, x: f64, side: Side, depth: usize) -> Result<Word> {
    itinerary_with(p, x, side, depth, &ItineraryConfig::default())
}

pub fn itinerary_with(
    p: &LmoParams,
    x: f64,
    side: Side,
    depth: usize,
    cfg: &ItineraryConfig,
) -> Result<Word> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
    }
    let (beta, alpha) = (p.beta, p.alpha);
    let c = p.critical_point();
    let mut out = Vec::with_capacity(depth);
    let mut x = x;
    for index in 0..depth {
        let gap = (x - c).abs();
        if gap <= cfg.hit_tol {
            match side {
                Side::Above => {
                    out.push(1);
                    x = 0.0;
                }
                Side::Below => {
                    out.push(0);
                    x = 1.0;
                }
            }
            continue;
        }
        if gap <= cfg.ambiguity_tol {
            return Err(Error::AmbiguousItinerary { index });
        }
        if x < c {
            out.push(0);
            x = beta * x + alpha;
        } else {
            out.push(1);
            x = beta * x + alpha - 1.0;
        }
        x = x.clamp(0.0, 1.0);
    }
    Ok(Word::from_digits_unchecked(out))
}

/// Settings for [`kneading_from_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KneadingConfig {
    pub depth: usize,
    pub match_window: usize,
    pub itinerary: ItineraryConfig,
}

impl Default for KneadingConfig {
    fn default() -> Self {
        KneadingConfig {
            depth: 4096,
            match_window: 32,
            itinerary: ItineraryConfig::default(),
        }
    }
}

/// Kneading data of `T_{β,α}`: either both sequences were recognised as
/// eventually periodic, or only finite prefixes are available.
#[derive(Debug, Clone, PartialEq)]
pub enum KneadingData {
    Periodic(KneadingInvariant),
    Undetected {
        /// Prefix of `k₊ = 1·k(0)`.
        kplus: Vec<u8>,
        /// Prefix of `k₋ = 0·k(1)`.
        kminus: Vec<u8>,
    },
}

/// Computes `k₊ = 1·k(0⁺)` and `k₋ = 0·k(1⁻)` and detects their eventual
/// periods by exact matching of digit windows.
pub fn kneading_from_params(p: &LmoParams, cfg: &KneadingConfig) -> Result<KneadingData> {
    if cfg.depth < 2 * cfg.match_window || cfg.match_window == 0 {
        return Err(Error::Domain(format!(
            "depth {} must be at least twice the match window {}",
            cfg.depth, cfg.match_window
        )));
    }
    let k0 = itinerary_with(p, 0.0, Side::Above, cfg.depth, &cfg.itinerary)?;
    let k1 = itinerary_with(p, 1.0, Side::Below, cfg.depth, &cfg.itinerary)?;
    let detected = (
        detect_period(k0.digits(), cfg.match_window),
        detect_period(k1.digits(), cfg.match_window),
    );
    if let (Some(a), Some(b)) = detected {
        return KneadingInvariant::from_endpoints(&a, &b).map(KneadingData::Periodic);
    }
    let mut kplus = vec![1];
    kplus.extend_from_slice(k0.digits());
    let mut kminus = vec![0];
    kminus.extend_from_slice(k1.digits());
    if kplus[..2] != [1, 0] || kminus[..2] != [0, 1] {
        return Err(Error::InvalidInvariant(
            "itineraries of 0 and 1 start with the wrong symbols".into(),
        ));
    }
    Ok(KneadingData::Undetected { kplus, kminus })
}

/// Finds an eventual period of a finite digit stream.
///
/// The candidate period is the smallest `p` for which the final `window`
/// digits repeat at distance `p`; the preperiod is then the start of the
/// longest periodic tail. The periodic tail must cover at least half the
/// stream and contain `window` digits beyond one period.
pub fn detect_period(digits: &[u8], window: usize) -> Option<EpSeq> {
    let n = digits.len();
    if n < 2 * window {
        return None;
    }
    let tail = &digits[n - window..];
    let p = (1..=n / 2 - window / 2).find(|&p| n >= window + p && &digits[n - window - p..n - p] == tail)?;
    let mut start = n - p;
    while start > 0 && digits[start - 1] == digits[start - 1 + p] {
        start -= 1;
    }
    if start > n / 2 || n - start < p + window {
        return None;
    }
    let pre = Word::from_digits_unchecked(digits[..start].to_vec());
    let per = Word::from_digits_unchecked(digits[start..start + p].to_vec());
    EpSeq::new(pre, per).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(s: &str) -> KneadingInvariant {
        s.parse().unwrap()
    }

    #[test]
    fn validate_examples() {
        assert_eq!(validate(&k("(10) (011)")).verdict, Verdict::Expansive);
        let rot = validate(&k("(10) (01)"));
        assert_eq!(rot.verdict, Verdict::Rotational);
        assert_eq!(
            rot.witness,
            Some(Witness {
                n: 0,
                relation: Relation::PlusHitsMax
            })
        );
        assert_eq!(validate(&k("1(0) 0(1)")).verdict, Verdict::Expansive);
    }

    #[test]
    fn parse_positions_are_absolute() {
        assert!(matches!(parse_pair("(10) (01x)"), Err(Error::Parse { position: 8, .. })));
        assert!(matches!(parse_pair("(10)"), Err(Error::Parse { position: 4, .. })));
        assert!(matches!(parse_pair("(10) (01) (1)"), Err(Error::Parse { position: 10, .. })));
        let (a, b) = parse_pair("  (01)\t(10) ").unwrap();
        assert_eq!((a.to_string(), b.to_string()), ("(01)".to_string(), "(10)".to_string()));
    }

    #[test]
    fn bad_prefix_is_invalid_at_zero() {
        let a = check_pair(&"(01)".parse().unwrap(), &"(10)".parse().unwrap());
        assert_eq!(a.verdict, Verdict::Invalid);
        assert_eq!(a.witness.unwrap().n, 0);
        assert!("(01) (10)".parse::<KneadingInvariant>().is_err());
    }

    #[test]
    fn paper_metric_examples_admissibility() {
        // f is only admissible in the non-strict sense: σ⁴(k+) = σ(k-).
        let f = validate(&k("(10001) (01100)"));
        assert_eq!(f.verdict, Verdict::Rotational);
        assert_eq!(f.witness.unwrap().n, 4);
        // g and h violate the non-strict inequalities as written.
        assert_eq!(validate(&k("1000110001(110) 0110001100(01)")).verdict, Verdict::Invalid);
        assert_eq!(validate(&k("10001(100) 01100(01)")).verdict, Verdict::Invalid);
    }

    #[test]
    fn expansive_extremes_are_shift_extremes() {
        for s in ["(10) (011)", "(100) (01)", "(100101) (0110)", "1(0) 0(1)", "(1001) (0110)"] {
            let kk = k(s);
            if validate(&kk).verdict != Verdict::Expansive {
                continue;
            }
            let all: Vec<EpSeq> = kk.kplus().shifts().chain(kk.kminus().shifts()).collect();
            assert_eq!(all.iter().min().unwrap(), &kk.k0());
            assert_eq!(all.iter().max().unwrap(), &kk.k1());
        }
    }

    #[test]
    fn validate_ignores_representation() {
        let a = KneadingInvariant::new(
            EpSeq::new("10".parse().unwrap(), "10".parse().unwrap()).unwrap(),
            "(011)".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(a, k("(10) (011)"));
        assert_eq!(validate(&a), validate(&k("(10) (011)")));
    }

    #[test]
    fn itinerary_examples() {
        let p = LmoParams::new(2.0, 0.0).unwrap();
        assert_eq!(itinerary(&p, 0.0, Side::Below, 5).unwrap().to_string(), "00000");
        let p = LmoParams::new(1.5, 0.0).unwrap();
        assert_eq!(itinerary(&p, 1.0, Side::Below, 10).unwrap().to_string(), "1010000010");
        let p = LmoParams::new(1.0, 0.5).unwrap();
        assert_eq!(itinerary(&p, 0.0, Side::Above, 6).unwrap().to_string(), "010101");
    }

    #[test]
    fn itinerary_of_zero_is_fixed_when_alpha_vanishes() {
        for i in 0..20 {
            let beta = 1.0 + i as f64 / 19.0;
            let p = LmoParams::new(beta, 0.0).unwrap();
            let w = itinerary(&p, 0.0, Side::Above, 64).unwrap();
            assert!(w.digits().iter().all(|&d| d == 0));
        }
    }

    #[test]
    fn params_outside_triangle_are_rejected() {
        assert!(LmoParams::new(0.9, 0.0).is_err());
        assert!(LmoParams::new(1.5, 0.6).is_err());
        assert!(LmoParams::new(1.5, -0.1).is_err());
        assert!(LmoParams::new(2.1, 0.0).is_err());
    }

    #[test]
    fn near_miss_is_ambiguous() {
        // T(0) = α lands 5e-10 above c.
        let beta = 1.5;
        let alpha = (1.0 + 5e-10 * beta) / (1.0 + beta);
        let p = LmoParams::new(beta, alpha).unwrap();
        assert!((alpha - p.critical_point() - 5e-10).abs() < 1e-12);
        assert_eq!(
            itinerary(&p, 0.0, Side::Above, 8),
            Err(Error::AmbiguousItinerary { index: 1 })
        );
    }

    #[test]
    fn kneading_of_doubling_and_half_rotation() {
        let cfg = KneadingConfig::default();
        let p = LmoParams::new(2.0, 0.0).unwrap();
        assert_eq!(
            kneading_from_params(&p, &cfg).unwrap(),
            KneadingData::Periodic(k("1(0) 0(1)"))
        );
        let p = LmoParams::new(1.0, 0.5).unwrap();
        assert_eq!(
            kneading_from_params(&p, &cfg).unwrap(),
            KneadingData::Periodic(k("(10) (01)"))
        );
    }

    #[test]
    fn detect_period_examples() {
        let mut d = vec![1, 1, 0];
        for _ in 0..100 {
            d.extend_from_slice(&[0, 1, 1]);
        }
        assert_eq!(detect_period(&d, 32), Some("110(011)".parse().unwrap()));
        let aperiodic: Vec<u8> = (0..512u32).map(|i| ((i * i + i / 3) % 7 % 2) as u8).collect();
        let _ = detect_period(&aperiodic, 32);
        assert_eq!(detect_period(&[1, 0], 32), None);
    }
}
