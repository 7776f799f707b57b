//! Finite binary words and eventually periodic binary sequences.
//!
//! An [`EpSeq`] is stored as a preperiod and a period and is always kept in
//! canonical form: the period is primitive and the preperiod is as short as
//! possible. Two values therefore denote the same infinite stream exactly when
//! they compare equal structurally.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};

/// Exact rational used for symbol frequencies and rotation numbers.
pub type Rational = Ratio<u64>;

/// A finite word over `{0, 1}`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = digits.iter().position(|&d| d > 1) {
            return Err(Error::Parse {
                position: pos,
                message: format!("digit {} is not binary", digits[pos]),
            });
        }
        Ok(Word(digits))
    }

    pub(crate) fn from_digits_unchecked(digits: Vec<u8>) -> Self {
        debug_assert!(digits.iter().all(|&d| d <= 1));
        Word(digits)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<u8> {
        self.0.first().copied()
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&d| d == 1).count()
    }

    /// Left rotation by `k` positions.
    pub fn rotate_left(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let mut v = self.0.clone();
        v.rotate_left(k % self.0.len());
        Word(v)
    }

    /// Length of the smallest `d` with `self = u^(len/d)` for some word `u`.
    pub fn primitive_root_len(&self) -> usize {
        let n = self.0.len();
        (1..=n)
            .filter(|d| n % d == 0)
            .find(|&d| (d..n).all(|i| self.0[i] == self.0[i - d]))
            .unwrap_or(n)
    }

    /// Replaces every 1 by `plus` and every 0 by `minus`.
    pub fn substitute(&self, plus: &Word, minus: &Word) -> Word {
        let mut v = Vec::new();
        for &d in &self.0 {
            v.extend_from_slice(if d == 1 { &plus.0 } else { &minus.0 });
        }
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.char_indices()
            .map(|(i, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse {
                    position: i,
                    message: format!("unexpected character {c:?}"),
                }),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

/// True iff `v` is a rotation of `u`, i.e. `u^∞` and `v^∞` lie on one shift orbit.
pub fn is_cyclic_shift(u: &Word, v: &Word) -> bool {
    if u.len() != v.len() {
        return false;
    }
    if u.is_empty() {
        return true;
    }
    (0..u.len()).any(|k| {
        let n = u.len();
        (0..n).all(|i| u.0[(i + k) % n] == v.0[i])
    })
}

/// An eventually periodic binary sequence `pre · per^∞`, kept canonical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EpSeq {
    pre: Word,
    per: Word,
}

impl EpSeq {
    /// Builds the canonical representative of `pre · per^∞`.
    pub fn new(pre: Word, per: Word) -> Result<Self> {
        if per.is_empty() {
            return Err(Error::MalformedSequence("empty period".into()));
        }
        Ok(Self::canonicalize(pre, per))
    }

    /// Purely periodic sequence `per^∞`.
    pub fn periodic(per: Word) -> Result<Self> {
        Self::new(Word::empty(), per)
    }

    fn canonicalize(pre: Word, per: Word) -> Self {
        let root = per.primitive_root_len();
        let mut per = per.0[..root].to_vec();
        let mut pre = pre.0;
        while let Some(&last) = pre.last() {
            if last != *per.last().unwrap() {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        EpSeq {
            pre: Word(pre),
            per: Word(per),
        }
    }

    pub fn pre(&self) -> &Word {
        &self.pre
    }

    pub fn per(&self) -> &Word {
        &self.per
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.pre.is_empty()
    }

    /// Number of distinct shifts `σ^n(self)`, `n ≥ 0`.
    pub fn orbit_len(&self) -> usize {
        self.pre.len() + self.per.len()
    }

    /// Digit at 1-based index `i`.
    pub fn digit_at(&self, i: usize) -> u8 {
        assert!(i >= 1, "digit indices are 1-based");
        self.digit0(i - 1)
    }

    /// Digit at 0-based index `i`.
    pub(crate) fn digit0(&self, i: usize) -> u8 {
        let p = self.pre.len();
        if i < p {
            self.pre.0[i]
        } else {
            self.per.0[(i - p) % self.per.len()]
        }
    }

    /// The first `n` digits.
    pub fn prefix(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.digit0(i)).collect()
    }

    pub fn digits(&self) -> impl Iterator<Item = u8> + '_ {
        (0..).map(move |i| self.digit0(i))
    }

    /// `σ^n(self)`.
    pub fn shift(&self, n: usize) -> EpSeq {
        let p = self.pre.len();
        if n <= p {
            Self::canonicalize(Word(self.pre.0[n..].to_vec()), self.per.clone())
        } else {
            Self::canonicalize(Word::empty(), self.per.rotate_left(n - p))
        }
    }

    /// All distinct shifts `σ^0, …, σ^(orbit_len-1)`.
    pub fn shifts(&self) -> impl Iterator<Item = EpSeq> + '_ {
        (0..self.orbit_len()).map(move |n| self.shift(n))
    }

    /// Number of leading digits that agree with `other` within which a
    /// difference must show up, if there is one.
    fn horizon(&self, other: &EpSeq) -> usize {
        self.pre.len() + other.pre.len() + self.per.len().lcm(&other.per.len())
    }

    /// Length of the common prefix, `None` when the streams are equal.
    pub fn common_prefix_len(&self, other: &EpSeq) -> Option<usize> {
        if self == other {
            return None;
        }
        let bound = self.horizon(other);
        let n = (0..bound)
            .find(|&i| self.digit0(i) != other.digit0(i))
            .expect("distinct canonical sequences differ within the horizon");
        Some(n)
    }

    /// Limit frequency of the symbol 1.
    pub fn one_frequency(&self) -> Rational {
        Rational::new(self.per.ones() as u64, self.per.len() as u64)
    }

    /// Substitutes `plus` for every 1 and `minus` for every 0.
    pub fn substitute(&self, plus: &Word, minus: &Word) -> EpSeq {
        Self::canonicalize(self.pre.substitute(plus, minus), self.per.substitute(plus, minus))
    }

    /// `w · self`.
    pub fn prepend(&self, w: &[u8]) -> EpSeq {
        let mut v = w.to_vec();
        v.extend_from_slice(self.pre.digits());
        Self::canonicalize(Word(v), self.per.clone())
    }
}

impl Ord for EpSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.common_prefix_len(other) {
            None => Ordering::Equal,
            Some(n) => self.digit0(n).cmp(&other.digit0(n)),
        }
    }
}

impl PartialOrd for EpSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EpSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.pre, self.per)
    }
}

impl fmt::Debug for EpSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EpSeq({self})")
    }
}

impl FromStr for EpSeq {
    type Err = Error;

    /// Parses `PRE(PER)`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |position: usize, message: &str| Error::Parse {
            position,
            message: message.to_string(),
        };
        if let Some((i, c)) = s
            .char_indices()
            .find(|(_, c)| !matches!(c, '0' | '1' | '(' | ')'))
        {
            return Err(err(i, &format!("unexpected character {c:?}")));
        }
        let open = s.find('(').ok_or_else(|| err(s.len(), "missing '('"))?;
        let close = s.find(')').ok_or_else(|| err(s.len(), "missing ')'"))?;
        if close < open {
            return Err(err(close, "')' before '('"));
        }
        if let Some(extra) = s[open + 1..].find('(') {
            return Err(err(open + 1 + extra, "nested '('"));
        }
        if close + 1 != s.len() {
            return Err(err(close + 1, "trailing input after ')'"));
        }
        if close == open + 1 {
            return Err(err(close, "empty period"));
        }
        let pre: Word = s[..open].parse()?;
        let per: Word = s[open + 1..close].parse()?;
        EpSeq::new(pre, per)
    }
}

impl serde::Serialize for EpSeq {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for EpSeq {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
