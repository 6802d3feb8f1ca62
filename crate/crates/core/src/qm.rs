//! Quasimorphisms on the commutator subgroup `N = [F_m, F_m]`.
//!
//! The model is `mu = h_B + sum_i lambda_i * Brooks(w_i)`, where
//!
//! * `h_B` is the *core*: an `F_m`-invariant homomorphism `N -> Q` given by an
//!   antisymmetric matrix `B`. On a word `w` in `N` it integrates the closed
//!   prefix path of `w`: `h_B(w) = sum_{i<j} B[i][j] * A_ij(w)` with
//!   `A_ij = sum_t p_t[i] * (p_{t+1}[j] - p_t[j])`. For a commutator this is
//!   `h_B([f1, f2]) = ab(f1)^T B ab(f2)`.
//! * `Brooks(p)` counts occurrences of `p` in the reduced word minus
//!   occurrences of `p^-1`, overlaps allowed. It is a quasimorphism on all of
//!   `F_m`; restricted to `N` it is the part that does not survive in the
//!   bilinear form.
//!
//! The Brooks part is homogenized at a finite depth `K`:
//! `Brooks_K(w) = Brooks(w^K) / K`, which is within `D / K` of the limit.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use crate::form::{AltForm, FormError, Rational};
use crate::form::rat;
use crate::sample;
use crate::words::{Word, WordError};

pub const DEFAULT_HOMOG_DEPTH: u32 = 64;
/// Radius used when a defect bound has to be derived from an exhaustive search.
pub const DEFAULT_DEFECT_RADIUS: usize = 8;
/// Safety factor applied to an exhaustive lower bound to get a working bound.
pub const DEFAULT_DEFECT_SAFETY: i64 = 2;
/// Default cap on the number of words in the exhaustive ball.
pub const DEFAULT_BALL_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QmError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("word is not in the commutator subgroup (abelianization {0:?})")]
    NotInCommutatorSubgroup(Vec<i64>),
    #[error("Brooks pattern must be a nonempty word")]
    EmptyPattern,
    #[error("invalid quasimorphism spec: {0}")]
    InvalidSpec(String),
    #[error("resource limit: {what} would reach {count}, cap is {limit}")]
    ResourceLimit { what: &'static str, count: usize, limit: usize },
}

const STACK_RANK: usize = 8;

/// Signed lattice areas `A_ij(w)` for `i < j` at `i * m + j`, accumulated in
/// one pass, followed by the endpoint of the path at `m * m ..`.
fn fill_areas(w: &Word, buf: &mut [i128]) {
    let m = w.rank() as usize;
    let (area, pos) = buf.split_at_mut(m * m);
    for &l in w.letters() {
        let j = l.unsigned_abs() as usize - 1;
        let d = l.signum() as i128;
        for (i, &p) in pos.iter().enumerate().take(j) {
            area[i * m + j] += p * d;
        }
        pos[j] += d;
    }
}

/// Evaluates the core homomorphism `h_B` on `w` in `[F, F]`.
pub fn eval_core(core: &AltForm, w: &Word) -> Result<Rational, QmError> {
    if core.rank() != w.rank() as usize {
        return Err(WordError::RankMismatch { left: core.rank() as u32, right: w.rank() }.into());
    }
    if w.is_empty() {
        return Ok(Rational::zero());
    }
    let m = core.rank();
    let mut stack = [0i128; STACK_RANK * STACK_RANK + STACK_RANK];
    let mut heap = Vec::new();
    let buf: &mut [i128] = if m <= STACK_RANK {
        &mut stack[..m * m + m]
    } else {
        heap.resize(m * m + m, 0);
        &mut heap
    };
    fill_areas(w, buf);
    let (area, pos) = buf.split_at(m * m);
    if pos.iter().any(|&p| p != 0) {
        return Err(QmError::NotInCommutatorSubgroup(pos.iter().map(|&p| p as i64).collect()));
    }
    let mut acc: Option<Rational> = None;
    for i in 0..m {
        for j in i + 1..m {
            let a = area[i * m + j];
            let b = core.get(i, j);
            if a == 0 || b.is_zero() {
                continue;
            }
            let term = match a {
                1 => b.clone(),
                -1 => -b,
                _ => b * BigInt::from(a),
            };
            acc = Some(match acc {
                None => term,
                Some(x) => x + term,
            });
        }
    }
    Ok(acc.unwrap_or_else(Rational::zero))
}

fn failure_table(pattern: &[i32]) -> Vec<usize> {
    let mut fail = vec![0usize; pattern.len()];
    let mut k = 0;
    for i in 1..pattern.len() {
        while k > 0 && pattern[i] != pattern[k] {
            k = fail[k - 1];
        }
        if pattern[i] == pattern[k] {
            k += 1;
        }
        fail[i] = k;
    }
    fail
}

/// Knuth-Morris-Pratt occurrence count, overlaps included.
fn count_occurrences(pattern: &[i32], text: &[i32]) -> i64 {
    if pattern.is_empty() || pattern.len() > text.len() {
        return 0;
    }
    let fail = failure_table(pattern);
    let mut k = 0;
    let mut count = 0;
    for &c in text {
        while k > 0 && c != pattern[k] {
            k = fail[k - 1];
        }
        if c == pattern[k] {
            k += 1;
        }
        if k == pattern.len() {
            count += 1;
            k = fail[k - 1];
        }
    }
    count
}

/// Brooks counting function: occurrences of `pattern` in `g` minus
/// occurrences of `pattern^-1`.
pub fn eval_brooks(pattern: &Word, g: &Word) -> Result<i64, QmError> {
    if pattern.is_empty() {
        return Err(QmError::EmptyPattern);
    }
    if pattern.rank() != g.rank() {
        return Err(WordError::RankMismatch { left: pattern.rank(), right: g.rank() }.into());
    }
    let inv = pattern.inverse();
    Ok(count_occurrences(pattern.letters(), g.letters())
        - count_occurrences(inv.letters(), g.letters()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrooksTerm {
    pattern: Word,
    weight: Rational,
}

impl BrooksTerm {
    pub fn new(pattern: Word, weight: Rational) -> Result<Self, QmError> {
        if pattern.is_empty() {
            return Err(QmError::EmptyPattern);
        }
        Ok(BrooksTerm { pattern, weight })
    }

    pub fn pattern(&self) -> &Word {
        &self.pattern
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }
}

/// `mu = h_B + sum lambda_i Brooks(w_i)` on `[F_m, F_m]`, with homogenization
/// depth and a working defect bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QmSpec {
    core: AltForm,
    brooks: Vec<BrooksTerm>,
    homog_depth: u32,
    defect_bound: Rational,
}

impl QmSpec {
    pub fn new(
        core: AltForm,
        brooks: Vec<BrooksTerm>,
        homog_depth: u32,
        defect_bound: Rational,
    ) -> Result<Self, QmError> {
        if homog_depth == 0 {
            return Err(QmError::InvalidSpec("homog_depth must be at least 1".into()));
        }
        if defect_bound.is_negative() {
            return Err(QmError::InvalidSpec("defect_bound must be nonnegative".into()));
        }
        let rank = core.rank() as u32;
        for t in &brooks {
            if t.pattern.rank() != rank {
                return Err(WordError::RankMismatch { left: rank, right: t.pattern.rank() }.into());
            }
        }
        Ok(QmSpec { core, brooks, homog_depth, defect_bound })
    }

    /// A pure homomorphism: defect zero, depth one.
    pub fn pure_core(core: AltForm) -> Self {
        QmSpec { core, brooks: Vec::new(), homog_depth: 1, defect_bound: Rational::zero() }
    }

    pub fn zero(rank: u32) -> Self {
        Self::pure_core(AltForm::zero(rank as usize))
    }

    pub fn rank(&self) -> u32 {
        self.core.rank() as u32
    }

    pub fn core(&self) -> &AltForm {
        &self.core
    }

    pub fn brooks(&self) -> &[BrooksTerm] {
        &self.brooks
    }

    pub fn homog_depth(&self) -> u32 {
        self.homog_depth
    }

    pub fn defect_bound(&self) -> &Rational {
        &self.defect_bound
    }

    pub fn with_defect_bound(mut self, bound: Rational) -> Result<Self, QmError> {
        if bound.is_negative() {
            return Err(QmError::InvalidSpec("defect_bound must be nonnegative".into()));
        }
        self.defect_bound = bound;
        Ok(self)
    }

    pub fn with_homog_depth(mut self, depth: u32) -> Result<Self, QmError> {
        if depth == 0 {
            return Err(QmError::InvalidSpec("homog_depth must be at least 1".into()));
        }
        self.homog_depth = depth;
        Ok(self)
    }

    pub fn has_brooks_part(&self) -> bool {
        self.brooks.iter().any(|t| !t.weight.is_zero())
    }

    /// `defect_bound * (1 + 2/K)`: the constant in front of `1/k` in the
    /// limit-formula error envelope.
    pub fn envelope_constant(&self) -> Rational {
        if self.defect_bound.is_zero() {
            return Rational::zero();
        }
        let k = rat(self.homog_depth as i64);
        &self.defect_bound * (rat(1) + rat(2) / k)
    }

    /// Length of the longest word Brooks counting will scan for `w`.
    pub fn scan_len(&self, w: &Word) -> usize {
        if self.has_brooks_part() {
            w.power_len(self.homog_depth as i64)
        } else {
            w.len()
        }
    }
}

/// `phi(w^K) / K` for the spec's quasimorphism with depth `K` in place of the
/// spec's own. The core part is exactly homogeneous, so it is evaluated on `w`.
pub fn homogenize_estimate(spec: &QmSpec, w: &Word, depth: u32) -> Result<Rational, QmError> {
    if depth == 0 {
        return Err(QmError::InvalidSpec("homogenization depth must be at least 1".into()));
    }
    let mut value = eval_core(&spec.core, w)?;
    if w.is_empty() || !spec.has_brooks_part() {
        return Ok(value);
    }
    let powered = w.power(depth as i64);
    let mut brooks = Rational::zero();
    for t in &spec.brooks {
        if t.weight.is_zero() {
            continue;
        }
        let c = eval_brooks(&t.pattern, &powered)?;
        if c != 0 {
            brooks += &t.weight * rat(c);
        }
    }
    value += brooks / rat(depth as i64);
    Ok(value)
}

/// Evaluates `mu` on `w` in `[F, F]` at the spec's homogenization depth.
pub fn eval_qm(spec: &QmSpec, w: &Word) -> Result<Rational, QmError> {
    homogenize_estimate(spec, w, spec.homog_depth)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefectSearch {
    /// Every pair in the ball of `[F, F]`.
    Exhaustive,
    /// `samples` random pairs.
    Random { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectEstimate {
    pub lower_bound: Rational,
    pub witness_pair: (Word, Word),
    pub search_radius: usize,
    pub exhaustive: bool,
    pub pairs_examined: usize,
}

/// All reduced words in `[F_m, F_m]` with at most `max_len` letters.
pub fn commutator_ball(rank: u32, max_len: usize, cap: usize) -> Result<Vec<Word>, QmError> {
    fn dfs(
        rank: i32,
        max_len: usize,
        cap: usize,
        cur: &mut Vec<i32>,
        pos: &mut [i64],
        out: &mut Vec<Word>,
    ) -> Result<(), QmError> {
        if pos.iter().all(|&x| x == 0) {
            if out.len() >= cap {
                return Err(QmError::ResourceLimit {
                    what: "commutator-subgroup ball",
                    count: out.len() + 1,
                    limit: cap,
                });
            }
            out.push(Word::from_letters(rank as u32, cur).expect("reduced by construction"));
        }
        let remaining = max_len - cur.len();
        if remaining == 0 {
            return Ok(());
        }
        for idx in 1..=rank {
            for l in [idx, -idx] {
                if cur.last() == Some(&-l) {
                    continue;
                }
                let j = idx as usize - 1;
                pos[j] += l.signum() as i64;
                let dist: u64 = pos.iter().map(|x| x.unsigned_abs()).sum();
                if dist <= (remaining - 1) as u64 {
                    cur.push(l);
                    dfs(rank, max_len, cap, cur, pos, out)?;
                    cur.pop();
                }
                pos[j] -= l.signum() as i64;
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    let mut pos = vec![0i64; rank as usize];
    dfs(rank as i32, max_len, cap, &mut Vec::new(), &mut pos, &mut out)?;
    Ok(out)
}

fn abs(r: Rational) -> Rational {
    if r.is_negative() {
        -r
    } else {
        r
    }
}

/// Lower bound for the defect `D(mu) = sup |mu(xy) - mu(x) - mu(y)|` over
/// `x, y` in `[F, F]` with `|x|, |y| <= max_len`.
///
/// The exhaustive mode returns the exact maximum over that ball; the random
/// mode samples pairs. Either way the witness pair reproduces the bound.
pub fn estimate_defect(
    spec: &QmSpec,
    max_len: usize,
    search: DefectSearch,
    ball_cap: usize,
) -> Result<DefectEstimate, QmError> {
    if max_len == 0 {
        return Err(QmError::InvalidSpec("defect search radius must be at least 1".into()));
    }
    let rank = spec.rank();
    let id = Word::identity(rank);
    let mut best = DefectEstimate {
        lower_bound: Rational::zero(),
        witness_pair: (id.clone(), id),
        search_radius: max_len,
        exhaustive: matches!(search, DefectSearch::Exhaustive),
        pairs_examined: 0,
    };
    let mut consider = |x: &Word, mx: &Rational, y: &Word, my: &Rational| -> Result<(), QmError> {
        let xy = x.multiply(y)?;
        let d = abs(eval_qm(spec, &xy)? - mx - my);
        best.pairs_examined += 1;
        if d > best.lower_bound {
            best.lower_bound = d;
            best.witness_pair = (x.clone(), y.clone());
        }
        Ok(())
    };
    match search {
        DefectSearch::Exhaustive => {
            let ball = commutator_ball(rank, max_len, ball_cap)?;
            let values = ball.iter().map(|w| eval_qm(spec, w)).collect::<Result<Vec<_>, _>>()?;
            for (x, mx) in ball.iter().zip(&values) {
                for (y, my) in ball.iter().zip(&values) {
                    consider(x, mx, y, my)?;
                }
            }
        }
        DefectSearch::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let x = sample::random_in_commutator_subgroup_upto(&mut rng, rank, max_len);
                let y = sample::random_in_commutator_subgroup_upto(&mut rng, rank, max_len);
                let (mx, my) = (eval_qm(spec, &x)?, eval_qm(spec, &y)?);
                consider(&x, &mx, &y, &my)?;
            }
        }
    }
    Ok(best)
}

/// `DEFAULT_DEFECT_SAFETY` times the exhaustive lower bound at
/// `DEFAULT_DEFECT_RADIUS`.
pub fn default_defect_bound(spec: &QmSpec, ball_cap: usize) -> Result<Rational, QmError> {
    if !spec.has_brooks_part() {
        return Ok(Rational::zero());
    }
    let est = estimate_defect(spec, DEFAULT_DEFECT_RADIUS, DefectSearch::Exhaustive, ball_cap)?;
    Ok(est.lower_bound * rat(DEFAULT_DEFECT_SAFETY))
}
