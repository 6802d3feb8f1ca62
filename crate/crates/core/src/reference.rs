//! Slow, independent oracles for the fast paths in [`crate::qm`] and
//! [`crate::extract`].
//!
//! Nothing here calls into those modules. Powers are built by repeated
//! multiplication, occurrence counts are quadratic, and lattice areas are
//! computed from the explicit prefix path under two discretizations that must
//! agree.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::form::Rational;
use crate::qm::QmSpec;
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("word is not in the commutator subgroup")]
    NotInCommutatorSubgroup,
    #[error("coordinates must satisfy 1 <= i < j <= m")]
    BadCoordinates,
    #[error("oracle cap exceeded: {what}")]
    CapExceeded { what: &'static str },
    #[error("invalid oracle configuration")]
    BadConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_word_length: usize,
    pub max_enumeration: usize,
}

impl OracleConfig {
    pub fn new(max_word_length: usize, max_enumeration: usize) -> Result<Self, OracleError> {
        if max_word_length == 0 || max_enumeration == 0 {
            return Err(OracleError::BadConfig);
        }
        Ok(OracleConfig { max_word_length, max_enumeration })
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_word_length: 4_000_000, max_enumeration: 50_000 }
    }
}

fn signed_counts(w: &Word) -> Vec<i64> {
    let mut v = alloc::vec![0i64; w.rank() as usize];
    for &l in w.letters() {
        if l > 0 {
            v[l as usize - 1] += 1;
        } else {
            v[(-l) as usize - 1] -= 1;
        }
    }
    v
}

/// `A_ij(w)` from the prefix path, computed as `sum p[i] dp[j]` and as the
/// trapezoid rule `1/2 sum (p_t[i] + p_{t+1}[i]) dp[j]`, plus the
/// `-sum p[j] dp[i]` form that holds on closed loops.
///
/// # Panics
///
/// If the three values disagree, which would be a bug.
pub fn shoelace_area(w: &Word, i: usize, j: usize) -> Result<i128, OracleError> {
    if i == 0 || i >= j || j > w.rank() as usize {
        return Err(OracleError::BadCoordinates);
    }
    if signed_counts(w).iter().any(|&c| c != 0) {
        return Err(OracleError::NotInCommutatorSubgroup);
    }
    let path = w.prefix_path();
    let pts = path.points();
    let (i, j) = (i - 1, j - 1);
    let mut left = 0i128;
    let mut trapezoid_twice = 0i128;
    let mut dual = 0i128;
    for t in 0..pts.len() - 1 {
        let (p, q) = (pts[t].entries(), pts[t + 1].entries());
        let dj = (q[j] - p[j]) as i128;
        let di = (q[i] - p[i]) as i128;
        left += p[i] as i128 * dj;
        trapezoid_twice += (p[i] + q[i]) as i128 * dj;
        dual -= p[j] as i128 * di;
    }
    assert!(trapezoid_twice % 2 == 0, "trapezoid sum is odd on a lattice loop");
    assert_eq!(left, trapezoid_twice / 2, "area conventions disagree");
    assert_eq!(left, dual, "area conventions disagree");
    Ok(left)
}

/// Quadratic-time count of `pattern` in `g` minus the count of its inverse.
pub fn naive_count(pattern: &Word, g: &Word) -> i64 {
    let p = pattern.letters();
    let inv: Vec<i32> = p.iter().rev().map(|&l| -l).collect();
    let text = g.letters();
    let count = |pat: &[i32]| -> i64 {
        if pat.is_empty() || pat.len() > text.len() {
            return 0;
        }
        (0..=text.len() - pat.len()).filter(|&s| &text[s..s + pat.len()] == pat).count() as i64
    };
    count(p) - count(&inv)
}

fn slow_inverse(w: &Word) -> Word {
    let letters: Vec<i32> = w.letters().iter().rev().map(|&l| -l).collect();
    Word::from_letters(w.rank(), &letters).expect("same rank")
}

fn slow_power(w: &Word, k: u64, cfg: &OracleConfig) -> Result<Word, OracleError> {
    let mut acc = Word::identity(w.rank());
    for _ in 0..k {
        acc = acc.multiply(w).expect("same rank");
        if acc.len() > cfg.max_word_length {
            return Err(OracleError::CapExceeded { what: "word length" });
        }
    }
    Ok(acc)
}

fn slow_qm(spec: &QmSpec, w: &Word, cfg: &OracleConfig) -> Result<Rational, OracleError> {
    let m = spec.rank() as usize;
    let mut value = Rational::zero();
    for i in 1..=m {
        for j in i + 1..=m {
            let b = spec.core().get(i - 1, j - 1);
            if !b.is_zero() {
                value += b * Rational::from_integer(BigInt::from(shoelace_area(w, i, j)?));
            }
        }
    }
    let depth = spec.homog_depth() as u64;
    let terms: Vec<_> = spec.brooks().iter().filter(|t| !t.weight().is_zero()).collect();
    if !terms.is_empty() {
        let powered = slow_power(w, depth, cfg)?;
        let k = Rational::from_integer(BigInt::from(depth));
        for t in terms {
            let c = naive_count(t.pattern(), &powered);
            value += t.weight() * Rational::from_integer(BigInt::from(c)) / &k;
        }
    }
    Ok(value)
}

/// `mu([g1^k, g2]) / k` from oracle primitives only.
pub fn bruteforce_pair(
    spec: &QmSpec,
    g1: &Word,
    g2: &Word,
    k: u64,
    cfg: &OracleConfig,
) -> Result<Rational, OracleError> {
    if k == 0 {
        return Err(OracleError::BadConfig);
    }
    let g1k = slow_power(g1, k, cfg)?;
    let c = g1k
        .multiply(g2)
        .and_then(|x| x.multiply(&slow_inverse(&g1k)))
        .and_then(|x| x.multiply(&slow_inverse(g2)))
        .map_err(|_| OracleError::BadCoordinates)?;
    let v = slow_qm(spec, &c, cfg)?;
    Ok(v / Rational::from_integer(BigInt::from(k)))
}

/// Every reduced word of length at most `max_len` with zero letter balance,
/// by plain enumeration of all reduced words.
fn ball(rank: u32, max_len: usize, cfg: &OracleConfig) -> Result<Vec<Word>, OracleError> {
    let alphabet: Vec<i32> = (1..=rank as i32).flat_map(|i| [i, -i]).collect();
    let mut layer: Vec<Vec<i32>> = alloc::vec![Vec::new()];
    let mut all: Vec<Vec<i32>> = alloc::vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &alphabet {
                if w.last() != Some(&-l) {
                    let mut x = w.clone();
                    x.push(l);
                    next.push(x);
                }
            }
        }
        if all.len() + next.len() > cfg.max_enumeration * 64 {
            return Err(OracleError::CapExceeded { what: "reduced-word enumeration" });
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    let out: Vec<Word> = all
        .into_iter()
        .map(|l| Word::from_letters(rank, &l).expect("in range"))
        .filter(|w| signed_counts(w).iter().all(|&c| c == 0))
        .collect();
    if out.len() > cfg.max_enumeration {
        return Err(OracleError::CapExceeded { what: "commutator-subgroup ball" });
    }
    Ok(out)
}

/// Exact `max |mu(xy) - mu(x) - mu(y)|` over the ball of radius `max_len` in
/// `[F, F]`.
pub fn exhaustive_defect(
    spec: &QmSpec,
    max_len: usize,
    cfg: &OracleConfig,
) -> Result<Rational, OracleError> {
    let words = ball(spec.rank(), max_len, cfg)?;
    let values = words.iter().map(|w| slow_qm(spec, w, cfg)).collect::<Result<Vec<_>, _>>()?;
    let mut best = Rational::zero();
    for (x, mx) in words.iter().zip(&values) {
        for (y, my) in words.iter().zip(&values) {
            let xy = x.multiply(y).expect("same rank");
            let d = slow_qm(spec, &xy, cfg)? - mx - my;
            let d = if d < Rational::zero() { -d } else { d };
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}
