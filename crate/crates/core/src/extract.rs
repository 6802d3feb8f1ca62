//! Recovering the alternating form `b_mu` from a quasimorphism oracle.
//!
//! For `g1, g2` in `F_m` with abelianizations `gamma1, gamma2`,
//!
//! ```text
//!     | mu([g1^k, g2]) / k - b_mu(gamma1, gamma2) | <= D(mu) / k
//! ```
//!
//! so the sequence `mu([g1^k, g2]) / k` converges to the form value. Nothing
//! here extrapolates: every report carries the full sequence of exact
//! estimates together with the envelope `D (1 + 2/K) / k`, where `D` is the
//! spec's defect bound and the `2/K` term absorbs finite-depth homogenization.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::form::{rat, AltForm, FormError, Rational};
use crate::qm::{self, QmError, QmSpec};
use crate::sample;
use crate::words::{IntVector, Word, WordError};

/// Default cap on the length of any word the extractor scans.
pub const DEFAULT_MAX_LETTERS: usize = 10_000_000;
pub const DEFAULT_KMAX: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error(transparent)]
    Qm(#[from] QmError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("representative {index} abelianizes to {found:?}, expected e_{}", index + 1)]
    RepresentativeMismatch { index: usize, found: Vec<i64> },
    #[error("expected {expected} representatives, got {found}")]
    RepresentativeCount { expected: usize, found: usize },
    #[error("invalid k schedule: {0}")]
    InvalidSchedule(&'static str),
}

impl From<WordError> for ExtractError {
    fn from(e: WordError) -> Self {
        ExtractError::Qm(QmError::Word(e))
    }
}

impl ExtractError {
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            ExtractError::Qm(QmError::ResourceLimit { .. })
                | ExtractError::Qm(QmError::Word(WordError::TooLong { .. }))
        )
    }
}

/// Strictly increasing positive values of `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSchedule(Vec<u64>);

impl KSchedule {
    pub fn new(values: Vec<u64>) -> Result<Self, ExtractError> {
        if values.is_empty() {
            return Err(ExtractError::InvalidSchedule("schedule is empty"));
        }
        if values[0] == 0 {
            return Err(ExtractError::InvalidSchedule("k must be positive"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExtractError::InvalidSchedule("k values must strictly increase"));
        }
        Ok(KSchedule(values))
    }

    /// `1, 2, 4, ...` up to the largest power of two not exceeding `kmax`.
    pub fn powers_of_two(kmax: u64) -> Result<Self, ExtractError> {
        if kmax == 0 {
            return Err(ExtractError::InvalidSchedule("kmax must be positive"));
        }
        let mut v = Vec::new();
        let mut k = 1u64;
        while k <= kmax {
            v.push(k);
            match k.checked_mul(2) {
                Some(n) => k = n,
                None => break,
            }
        }
        Ok(KSchedule(v))
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn last(&self) -> u64 {
        *self.0.last().expect("nonempty by construction")
    }
}

impl Default for KSchedule {
    fn default() -> Self {
        Self::powers_of_two(DEFAULT_KMAX).expect("valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_letters: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_letters: DEFAULT_MAX_LETTERS }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub gamma1: IntVector,
    pub gamma2: IntVector,
    /// `(k, mu([g1^k, g2]) / k)` for every scheduled `k`.
    pub estimates: Vec<(u64, Rational)>,
    /// `D (1 + 2/K) / k`, aligned with `estimates`.
    pub envelope: Vec<Rational>,
    pub final_estimate: Rational,
    pub certified_radius: Rational,
}

impl ConvergenceReport {
    /// Whether `target` lies within the envelope at every scheduled `k`.
    pub fn consistent_with(&self, target: &Rational) -> bool {
        self.estimates.iter().zip(&self.envelope).all(|((_, e), r)| (e - target).abs() <= *r)
    }
}

/// `mu([family(k), g2]) / k` along the schedule.
///
/// With `family(k) = g1^k` this is the plain limit formula; any family whose
/// abelianization is `k * gamma1` gives the refined version.
pub fn estimate_sequence<F>(
    spec: &QmSpec,
    family: F,
    g2: &Word,
    schedule: &KSchedule,
    limits: &Limits,
) -> Result<ConvergenceReport, ExtractError>
where
    F: Fn(u64) -> Result<Word, ExtractError>,
{
    let rank = spec.rank();
    if g2.rank() != rank {
        return Err(WordError::RankMismatch { left: rank, right: g2.rank() }.into());
    }
    let env_const = spec.envelope_constant();
    let mut estimates = Vec::with_capacity(schedule.values().len());
    let mut envelope = Vec::with_capacity(schedule.values().len());
    let mut gamma1 = None;
    for &k in schedule.values() {
        let g1k = family(k)?;
        if g1k.rank() != rank {
            return Err(WordError::RankMismatch { left: rank, right: g1k.rank() }.into());
        }
        if gamma1.is_none() {
            gamma1 = Some(if k == 1 { g1k.abelianize() } else { family(1)?.abelianize() });
        }
        let bound = 2 * (g1k.len() + g2.len());
        let scan = if spec.has_brooks_part() { bound * spec.homog_depth() as usize } else { bound };
        if scan > limits.max_letters {
            return Err(QmError::ResourceLimit {
                what: "commutator scan length",
                count: scan,
                limit: limits.max_letters,
            }
            .into());
        }
        let c = g1k.commutator(g2)?;
        let value = qm::eval_qm(spec, &c)?;
        if k == 1 {
            estimates.push((k, value));
            envelope.push(env_const.clone());
        } else {
            let kq = rat(k as i64);
            estimates.push((k, value / &kq));
            envelope.push(if env_const.is_zero() { Rational::zero() } else { &env_const / kq });
        }
    }
    let final_estimate = estimates.last().expect("nonempty schedule").1.clone();
    let certified_radius = envelope.last().expect("nonempty schedule").clone();
    Ok(ConvergenceReport {
        gamma1: gamma1.expect("nonempty schedule"),
        gamma2: g2.abelianize(),
        estimates,
        envelope,
        final_estimate,
        certified_radius,
    })
}

/// Limit-formula estimates of `b_mu(ab(g1), ab(g2))`.
pub fn estimate_pair(
    spec: &QmSpec,
    g1: &Word,
    g2: &Word,
    schedule: &KSchedule,
    limits: &Limits,
) -> Result<ConvergenceReport, ExtractError> {
    if g1.rank() != spec.rank() {
        return Err(WordError::RankMismatch { left: spec.rank(), right: g1.rank() }.into());
    }
    estimate_sequence(spec, |k| Ok(g1.power(k as i64)), g2, schedule, limits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub report: ConvergenceReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub form: AltForm,
    /// One report per `i < j`, row-major.
    pub pairs: Vec<PairReport>,
}

impl Extraction {
    /// Builds the matrix from per-pair reports; antisymmetry is by construction.
    pub fn assemble(rank: usize, mut pairs: Vec<PairReport>) -> Self {
        pairs.sort_by_key(|p| (p.i, p.j));
        let mut form = AltForm::zero(rank);
        for p in &pairs {
            form.set(p.i, p.j, p.report.final_estimate.clone());
        }
        Extraction { form, pairs }
    }

    /// Whether `target` lies inside every pair's envelope at every `k`.
    pub fn consistent_with(&self, target: &AltForm) -> bool {
        target.rank() == self.form.rank()
            && self.pairs.iter().all(|p| p.report.consistent_with(target.get(p.i, p.j)))
    }
}

/// Single-generator representatives `x_1, ..., x_m`.
pub fn generator_representatives(rank: u32) -> Vec<Word> {
    (1..=rank).map(|i| Word::generator(rank, i).expect("in range")).collect()
}

/// Checks that `reps[i]` abelianizes to the `i`-th standard basis vector.
pub fn check_representatives(rank: u32, reps: &[Word]) -> Result<(), ExtractError> {
    if reps.len() != rank as usize {
        return Err(ExtractError::RepresentativeCount { expected: rank as usize, found: reps.len() });
    }
    for (index, r) in reps.iter().enumerate() {
        if r.rank() != rank {
            return Err(WordError::RankMismatch { left: rank, right: r.rank() }.into());
        }
        let target = index as u32 + 1;
        if (1..=rank).any(|g| r.exponent_sum(g) != i64::from(g == target)) {
            return Err(ExtractError::RepresentativeMismatch {
                index,
                found: r.abelianize().entries().to_vec(),
            });
        }
    }
    Ok(())
}

/// Index pairs `(i, j)`, `i < j`, in row-major order.
pub fn upper_pairs(rank: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..rank).flat_map(move |i| (i + 1..rank).map(move |j| (i, j)))
}

/// Assembles `b_mu` on the basis given by `reps`.
pub fn extract_matrix(
    spec: &QmSpec,
    reps: &[Word],
    schedule: &KSchedule,
    limits: &Limits,
) -> Result<Extraction, ExtractError> {
    check_representatives(spec.rank(), reps)?;
    let pairs = upper_pairs(reps.len())
        .map(|(i, j)| {
            estimate_pair(spec, &reps[i], &reps[j], schedule, limits)
                .map(|report| PairReport { i, j, report })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Extraction::assemble(reps.len(), pairs))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtendabilityVerdict {
    Extendable,
    NotExtendable { u: Vec<Rational>, v: Vec<Rational>, value: Rational },
}

impl ExtendabilityVerdict {
    pub fn is_extendable(&self) -> bool {
        matches!(self, ExtendabilityVerdict::Extendable)
    }
}

/// Decides whether `form` vanishes on the span of `basis`.
///
/// By bilinearity it suffices to test basis pairs; a nonzero pair is returned
/// as a witness.
pub fn check_extendable(
    form: &AltForm,
    basis: &[Vec<Rational>],
) -> Result<ExtendabilityVerdict, FormError> {
    for v in basis {
        if v.len() != form.rank() {
            return Err(FormError::DimensionMismatch { expected: form.rank(), found: v.len() });
        }
    }
    for (a, u) in basis.iter().enumerate() {
        for v in &basis[a + 1..] {
            let value = form.pair(u, v)?;
            if !value.is_zero() {
                return Ok(ExtendabilityVerdict::NotExtendable {
                    u: u.clone(),
                    v: v.clone(),
                    value,
                });
            }
        }
    }
    Ok(ExtendabilityVerdict::Extendable)
}

/// Dimension `m(m-1)/2` of the space of alternating forms on `Z^m`.
pub fn form_space_dim(m: u64) -> u64 {
    m * m.saturating_sub(1) / 2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl CheckResult {
    fn new(name: &'static str) -> Self {
        CheckResult { name, cases: 0, failures: 0, counterexample: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarnessReport {
    pub checks: Vec<CheckResult>,
}

impl HarnessReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarnessConfig {
    pub trials: usize,
    pub seed: u64,
    /// Maximum length of random `g1, g2`.
    pub word_len: usize,
    /// The `k` used for estimate-level checks.
    pub k: u64,
}

impl HarnessConfig {
    pub fn new(trials: usize) -> Self {
        HarnessConfig { trials, seed: 0x5eed, word_len: 4, k: 8 }
    }
}

pub const CHECK_CORE_HOMOMORPHISM: &str = "core_homomorphism";
pub const CHECK_CORE_CONJUGATION: &str = "core_conjugation_invariance";
pub const CHECK_CORE_COMMUTATOR: &str = "core_commutator_value";
pub const CHECK_CORE_HOMOGENEITY: &str = "core_homogeneity";
pub const CHECK_BROOKS_ANTISYMMETRY: &str = "brooks_antisymmetry";
pub const CHECK_QUASIMORPHISM: &str = "quasimorphism_defect";
pub const CHECK_COMMUTATOR_BOUND: &str = "commutator_within_defect";
pub const CHECK_BILINEARITY: &str = "bilinearity";
pub const CHECK_ALTERNATION: &str = "alternation";
pub const CHECK_VANISHING_ON_N: &str = "vanishing_on_commutator_subgroup";

/// Runs the algebraic law suite on random words. Failures are reported, not
/// returned as errors; only malformed inputs error.
pub fn property_harness(spec: &QmSpec, cfg: &HarnessConfig) -> Result<HarnessReport, ExtractError> {
    let rank = spec.rank();
    let core = spec.core();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let env_const = spec.envelope_constant();
    let schedule = KSchedule::new(alloc::vec![cfg.k])?;
    let limits = Limits::default();
    let env_k = &env_const / rat(cfg.k as i64);

    let mut hom = CheckResult::new(CHECK_CORE_HOMOMORPHISM);
    let mut conj = CheckResult::new(CHECK_CORE_CONJUGATION);
    let mut comm = CheckResult::new(CHECK_CORE_COMMUTATOR);
    let mut homog = CheckResult::new(CHECK_CORE_HOMOGENEITY);
    let mut anti = CheckResult::new(CHECK_BROOKS_ANTISYMMETRY);
    let mut qmlaw = CheckResult::new(CHECK_QUASIMORPHISM);
    let mut cbound = CheckResult::new(CHECK_COMMUTATOR_BOUND);
    let mut bilin = CheckResult::new(CHECK_BILINEARITY);
    let mut alt = CheckResult::new(CHECK_ALTERNATION);
    let mut vanish = CheckResult::new(CHECK_VANISHING_ON_N);

    let est = |g1: &Word, g2: &Word| -> Result<Rational, ExtractError> {
        Ok(estimate_pair(spec, g1, g2, &schedule, &limits)?.final_estimate)
    };

    for _ in 0..cfg.trials {
        let u = sample::random_in_commutator_subgroup(&mut rng, rank, 3);
        let v = sample::random_in_commutator_subgroup(&mut rng, rank, 3);
        let f = sample::random_word_upto(&mut rng, rank, 6);
        let f1 = sample::random_word_upto(&mut rng, rank, cfg.word_len);
        let f2 = sample::random_word_upto(&mut rng, rank, cfg.word_len);

        let (hu, hv) = (qm::eval_core(core, &u)?, qm::eval_core(core, &v)?);
        let huv = qm::eval_core(core, &u.multiply(&v)?)?;
        hom.record(huv == &hu + &hv, || format!("u = {u}, v = {v}"));

        let hc = qm::eval_core(core, &u.conjugate_by(&f)?)?;
        conj.record(hc == hu, || format!("w = {u}, f = {f}"));

        let c12 = f1.commutator(&f2)?;
        let b12 = core.pair_int(&f1.abelianize(), &f2.abelianize())?;
        comm.record(qm::eval_core(core, &c12)? == b12, || format!("f1 = {f1}, f2 = {f2}"));

        let k: i64 = rng.gen_range(-8..=8);
        let hk = qm::eval_core(core, &u.power(k))?;
        homog.record(hk == &hu * rat(k), || format!("w = {u}, k = {k}"));

        for t in spec.brooks() {
            let a = qm::eval_brooks(t.pattern(), &f1)?;
            let b = qm::eval_brooks(t.pattern(), &f1.inverse())?;
            anti.record(a == -b, || format!("pattern = {}, g = {f1}", t.pattern()));
        }

        // short words keep the Brooks scans cheap
        let x = sample::random_in_commutator_subgroup_upto(&mut rng, rank, 10);
        let y = sample::random_in_commutator_subgroup_upto(&mut rng, rank, 10);
        let d = qm::eval_qm(spec, &x.multiply(&y)?)? - qm::eval_qm(spec, &x)? - qm::eval_qm(spec, &y)?;
        qmlaw.record(d.abs() <= env_const, || format!("x = {x}, y = {y}, deviation = {d}"));

        let mc = qm::eval_qm(spec, &c12)?;
        cbound.record((&mc - &b12).abs() <= env_const, || {
            format!("f1 = {f1}, f2 = {f2}, mu = {mc}, b = {b12}")
        });

        let g1p = sample::random_word_upto(&mut rng, rank, cfg.word_len);
        let e_sum = est(&f1.multiply(&g1p)?, &f2)?;
        let e1 = est(&f1, &f2)?;
        let e2 = est(&g1p, &f2)?;
        let gap = &e_sum - &e1 - &e2;
        bilin.record(gap.abs() <= &env_k * rat(3), || {
            format!("g1 = {f1}, g1' = {g1p}, g2 = {f2}, gap = {gap}")
        });

        let e21 = est(&f2, &f1)?;
        let gap = &e1 + &e21;
        alt.record(gap.abs() <= &env_k * rat(2), || format!("g1 = {f1}, g2 = {f2}, gap = {gap}"));

        let en = est(&u, &f2)?;
        vanish.record(en.abs() <= env_k, || format!("g1 = {u}, g2 = {f2}, estimate = {en}"));
    }

    Ok(HarnessReport {
        checks: alloc::vec![hom, conj, comm, homog, anti, qmlaw, cbound, bilin, alt, vanish],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::ratio;
    use crate::qm::BrooksTerm;
    use crate::words::parse_word;
    use alloc::vec;

    fn w(s: &str) -> Word {
        parse_word(s, 2).unwrap()
    }

    fn unit_core() -> QmSpec {
        QmSpec::pure_core(AltForm::unit(2, 0, 1))
    }

    #[test]
    fn schedule_validation() {
        assert!(KSchedule::new(vec![]).is_err());
        assert!(KSchedule::new(vec![0, 1]).is_err());
        assert!(KSchedule::new(vec![2, 2]).is_err());
        assert_eq!(KSchedule::default().values().len(), 11);
        assert_eq!(KSchedule::powers_of_two(5).unwrap().values(), &[1, 2, 4]);
    }

    #[test]
    fn pure_core_estimates_are_exact() {
        let r = estimate_pair(&unit_core(), &w("a"), &w("b"), &KSchedule::default(), &Limits::default())
            .unwrap();
        assert!(r.estimates.iter().all(|(_, e)| *e == rat(1)));
        assert!(r.envelope.iter().all(Zero::is_zero));
        assert_eq!(r.final_estimate, rat(1));
        assert_eq!(r.certified_radius, rat(0));
        assert_eq!(r.gamma1.entries(), &[1, 0]);
    }

    #[test]
    fn identity_first_argument() {
        let spec = QmSpec::new(
            AltForm::unit(2, 0, 1),
            vec![BrooksTerm::new(w("a b"), rat(1)).unwrap()],
            64,
            rat(2),
        )
        .unwrap();
        let r = estimate_pair(&spec, &Word::identity(2), &w("a b B b"), &KSchedule::default(), &Limits::default())
            .unwrap();
        assert!(r.estimates.iter().all(|(_, e)| e.is_zero()));
    }

    #[test]
    fn envelope_shape() {
        let spec = unit_core().with_defect_bound(rat(3)).unwrap();
        let r = estimate_pair(&spec, &w("a"), &w("b"), &KSchedule::powers_of_two(8).unwrap(), &Limits::default())
            .unwrap();
        // K = 1 for pure cores: 3 * (1 + 2) / k
        let env: Vec<Rational> = [1, 2, 4, 8].iter().map(|&k| ratio(9, k)).collect();
        assert_eq!(r.envelope, env);
        assert!(r.envelope.windows(2).all(|p| p[0] > p[1]));
    }

    #[test]
    fn resource_cap() {
        let spec = unit_core();
        let err = estimate_pair(&spec, &w("a"), &w("b"), &KSchedule::new(vec![1000]).unwrap(), &Limits { max_letters: 100 })
            .unwrap_err();
        assert!(err.is_resource_limit());
    }

    #[test]
    fn representatives_checked() {
        let spec = unit_core();
        let s = KSchedule::new(vec![1]).unwrap();
        let l = Limits::default();
        assert!(matches!(
            extract_matrix(&spec, &[w("a"), w("a b")], &s, &l),
            Err(ExtractError::RepresentativeMismatch { index: 1, .. })
        ));
        assert!(matches!(
            extract_matrix(&spec, &[w("a")], &s, &l),
            Err(ExtractError::RepresentativeCount { .. })
        ));
        // conjugated and padded representatives are fine
        let ex = extract_matrix(&spec, &[w("b a B"), w("a b A B b")], &s, &l).unwrap();
        assert_eq!(ex.form, AltForm::unit(2, 0, 1));
    }

    #[test]
    fn extendability_examples() {
        let j = AltForm::standard_symplectic();
        let g2 = AltForm::block_diag(&[j.clone(), j]).scaled(&rat(-2));
        let e = |i: usize| (0..4).map(|t| rat((t == i) as i64)).collect::<Vec<_>>();
        assert!(check_extendable(&g2, &[e(0), e(2)]).unwrap().is_extendable());
        assert!(check_extendable(&g2, &[]).unwrap().is_extendable());
        assert_eq!(
            check_extendable(&g2, &[e(0), e(1)]).unwrap(),
            ExtendabilityVerdict::NotExtendable { u: e(0), v: e(1), value: rat(-2) }
        );
        assert!(check_extendable(&g2, &[vec![rat(1)]]).is_err());
    }

    #[test]
    fn form_space_dims() {
        assert_eq!(form_space_dim(2), 1);
        assert_eq!(form_space_dim(4), 6);
        assert_eq!(form_space_dim(1), 0);
    }

    #[test]
    fn harness_pure_core_passes() {
        let report = property_harness(&unit_core(), &HarnessConfig::new(200)).unwrap();
        assert!(report.all_passed(), "{report:?}");
        let report = property_harness(&QmSpec::zero(3), &HarnessConfig::new(50)).unwrap();
        assert!(report.all_passed());
    }
}
