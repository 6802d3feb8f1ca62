//! Closed-form symplectic targets and the decisions built on them.
//!
//! First cohomology is always written in the basis `(alpha_1*, beta_1*, ...)`
//! of the surface (or torus) factors in input order. On that basis the
//! intersection form of a genus-`l` surface is `l` copies of
//! `J = [[0, 1], [-1, 0]]`, and the bilinear form induced by the Shelukhin-type
//! quasimorphism is a block-diagonal rescaling of it with coefficients
//! `Vol(M) * (2 - 2 l_i) / Area_i^2` (products of surfaces) or
//! `Vol(T) * A / Area(T^2(r_i))` (torus blow-ups).
//!
//! Volumes use `Vol(X, omega) = integral of omega^n`, so a product of `n`
//! surfaces has volume `n! * prod(area_i)`.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::extract::{check_extendable, ExtendabilityVerdict};
use crate::form::{rat, AltForm, FormError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymplError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("invalid manifold spec: {0}")]
    InvalidSpec(&'static str),
    #[error("operation not supported for torus blow-ups")]
    UnsupportedKind,
    #[error("torus blow-up requires curvature_A")]
    MissingCurvature,
    #[error("cyclic I_c1 model needs a nonzero generator")]
    ZeroGenerator,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub genus: u32,
    pub area: Rational,
}

impl SurfaceSpec {
    pub fn new(genus: u32, area: Rational) -> Result<Self, SymplError> {
        if !area.is_positive() {
            return Err(SymplError::InvalidSpec("surface area must be positive"));
        }
        Ok(SurfaceSpec { genus, area })
    }

    pub fn betti1(&self) -> usize {
        2 * self.genus as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupSpec {
    pub radii: Vec<Rational>,
    pub rho: Rational,
    pub r: Rational,
    /// Average Hermitian scalar curvature of the blow-up; an input.
    pub curvature_a: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ManifoldSpec {
    ProductOfSurfaces(Vec<SurfaceSpec>),
    /// `S x N` where only `Vol(N)`, `A(N)`, `dim N / 2` and `b_1(N)` are known.
    SurfaceTimesManifold {
        surface: SurfaceSpec,
        extra_volume: Rational,
        extra_curvature: Rational,
        extra_half_dim: u32,
        extra_betti1: usize,
    },
    TorusBlowup(BlowupSpec),
}

impl ManifoldSpec {
    pub fn validate(&self) -> Result<(), SymplError> {
        match self {
            ManifoldSpec::ProductOfSurfaces(s) => {
                if s.is_empty() {
                    return Err(SymplError::InvalidSpec("product needs at least one surface"));
                }
                for f in s {
                    if !f.area.is_positive() {
                        return Err(SymplError::InvalidSpec("surface area must be positive"));
                    }
                    if f.genus == 0 {
                        return Err(SymplError::InvalidSpec("product factors need genus >= 1"));
                    }
                }
            }
            ManifoldSpec::SurfaceTimesManifold { surface, extra_volume, extra_half_dim, .. } => {
                if !surface.area.is_positive() {
                    return Err(SymplError::InvalidSpec("surface area must be positive"));
                }
                if surface.genus == 0 {
                    return Err(SymplError::InvalidSpec("surface factor needs genus >= 1"));
                }
                if !extra_volume.is_positive() {
                    return Err(SymplError::InvalidSpec("extra_volume must be positive"));
                }
                if *extra_half_dim == 0 {
                    return Err(SymplError::InvalidSpec("extra_half_dim must be at least 1"));
                }
            }
            ManifoldSpec::TorusBlowup(b) => {
                if b.radii.is_empty() {
                    return Err(SymplError::InvalidSpec("blow-up needs at least one radius"));
                }
                if !b.rho.is_positive() || b.rho >= b.r || b.r >= b.radii[0] {
                    return Err(SymplError::InvalidSpec("need 0 < rho < r < r_1"));
                }
                if b.radii.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(SymplError::InvalidSpec("radii must strictly increase"));
                }
            }
        }
        Ok(())
    }

    /// Complex dimension `n` (half the real dimension).
    pub fn half_dim(&self) -> u32 {
        match self {
            ManifoldSpec::ProductOfSurfaces(s) => s.len() as u32,
            ManifoldSpec::SurfaceTimesManifold { extra_half_dim, .. } => 1 + extra_half_dim,
            ManifoldSpec::TorusBlowup(b) => b.radii.len() as u32,
        }
    }

    /// Number of `H^1` coordinates.
    pub fn betti1(&self) -> usize {
        match self {
            ManifoldSpec::ProductOfSurfaces(s) => s.iter().map(SurfaceSpec::betti1).sum(),
            ManifoldSpec::SurfaceTimesManifold { surface, extra_betti1, .. } => {
                surface.betti1() + extra_betti1
            }
            ManifoldSpec::TorusBlowup(b) => 2 * b.radii.len(),
        }
    }
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * rat(k))
}

/// Intersection form of a closed genus-`l` surface: `l` blocks of `J`.
pub fn surface_intersection_form(genus: u32) -> AltForm {
    let blocks: Vec<AltForm> = (0..genus).map(|_| AltForm::standard_symplectic()).collect();
    AltForm::block_diag(&blocks)
}

/// `(alpha, beta) -> integral alpha ^ beta ^ omega^(n-1)` on a product of
/// surfaces: block `i` is `(n-1)! * prod_{j != i} area_j` times the
/// intersection form of factor `i`.
pub fn symplectic_pairing_product(surfaces: &[SurfaceSpec]) -> Result<AltForm, SymplError> {
    if surfaces.is_empty() {
        return Err(SymplError::InvalidSpec("product needs at least one surface"));
    }
    let n = surfaces.len() as u32;
    let blocks: Vec<AltForm> = surfaces
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let others = surfaces
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Rational::one(), |acc, (_, t)| acc * &t.area);
            surface_intersection_form(s.genus).scaled(&(factorial(n - 1) * others))
        })
        .collect();
    Ok(AltForm::block_diag(&blocks))
}

/// `A(S) = (2 - 2l) / Area(S)`.
pub fn scalar_curvature_surface(s: &SurfaceSpec) -> Rational {
    rat(2 - 2 * s.genus as i64) / &s.area
}

/// Average Hermitian scalar curvature of a product, by additivity over factors.
pub fn scalar_curvature_product(spec: &ManifoldSpec) -> Result<Rational, SymplError> {
    spec.validate()?;
    match spec {
        ManifoldSpec::ProductOfSurfaces(s) => {
            Ok(s.iter().map(scalar_curvature_surface).fold(Rational::zero(), |a, b| a + b))
        }
        ManifoldSpec::SurfaceTimesManifold { surface, extra_curvature, .. } => {
            Ok(scalar_curvature_surface(surface) + extra_curvature)
        }
        ManifoldSpec::TorusBlowup(_) => Err(SymplError::UnsupportedKind),
    }
}

/// Area of the square torus `(R / 2r Z)^2`.
pub fn torus_factor_area(r: &Rational) -> Rational {
    let d = r * rat(2);
    &d * &d
}

/// `integral omega^n`. For blow-ups this is the volume of the underlying torus.
pub fn volume(spec: &ManifoldSpec) -> Result<Rational, SymplError> {
    spec.validate()?;
    Ok(match spec {
        ManifoldSpec::ProductOfSurfaces(s) => {
            s.iter().fold(factorial(s.len() as u32), |acc, f| acc * &f.area)
        }
        ManifoldSpec::SurfaceTimesManifold { surface, extra_volume, .. } => {
            rat(spec.half_dim() as i64) * extra_volume * &surface.area
        }
        ManifoldSpec::TorusBlowup(b) => b
            .radii
            .iter()
            .fold(factorial(b.radii.len() as u32), |acc, r| acc * torus_factor_area(r)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warning {
    /// A genus-1 factor: accepted, but outside the genus >= 2 hypothesis some
    /// statements of the formula carry. Its block is zero.
    GenusOneFactor { factor: usize },
}

/// A predicted form whose entries are only determined on a leading block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictedForm {
    pub form: AltForm,
    /// Entries `(i, j)` with `i < known_dim` and `j < known_dim` are
    /// determined; the rest are unknown and stored as zero.
    pub known_dim: usize,
    pub warnings: Vec<Warning>,
}

impl PredictedForm {
    pub fn is_known(&self, i: usize, j: usize) -> bool {
        i < self.known_dim && j < self.known_dim
    }

    pub fn is_complete(&self) -> bool {
        self.known_dim == self.form.rank()
    }
}

/// Coefficient `Vol(M) (2 - 2l) / Area^2` of the surface block.
pub fn surface_block_coefficient(vol: &Rational, s: &SurfaceSpec) -> Rational {
    vol * rat(2 - 2 * s.genus as i64) / (&s.area * &s.area)
}

/// The bilinear form predicted on `H^1(M)` in the factor basis.
pub fn predicted_form(spec: &ManifoldSpec) -> Result<PredictedForm, SymplError> {
    spec.validate()?;
    let vol = volume(spec)?;
    let genus_warnings = |surfaces: &[&SurfaceSpec]| -> Vec<Warning> {
        surfaces
            .iter()
            .enumerate()
            .filter(|(_, s)| s.genus == 1)
            .map(|(factor, _)| Warning::GenusOneFactor { factor })
            .collect()
    };
    match spec {
        ManifoldSpec::ProductOfSurfaces(s) => {
            let blocks: Vec<AltForm> = s
                .iter()
                .map(|f| surface_intersection_form(f.genus).scaled(&surface_block_coefficient(&vol, f)))
                .collect();
            let form = AltForm::block_diag(&blocks);
            let refs: Vec<&SurfaceSpec> = s.iter().collect();
            Ok(PredictedForm { known_dim: form.rank(), form, warnings: genus_warnings(&refs) })
        }
        ManifoldSpec::SurfaceTimesManifold { surface, extra_betti1, .. } => {
            let block = surface_intersection_form(surface.genus)
                .scaled(&surface_block_coefficient(&vol, surface));
            let known_dim = block.rank();
            let form = AltForm::block_diag(&[block, AltForm::zero(*extra_betti1)]);
            Ok(PredictedForm { form, known_dim, warnings: genus_warnings(&[surface]) })
        }
        ManifoldSpec::TorusBlowup(b) => {
            let a = b.curvature_a.as_ref().ok_or(SymplError::MissingCurvature)?;
            let blocks: Vec<AltForm> = b
                .radii
                .iter()
                .map(|r| AltForm::standard_symplectic().scaled(&(&vol * a / torus_factor_area(r))))
                .collect();
            let form = AltForm::block_diag(&blocks);
            Ok(PredictedForm { known_dim: form.rank(), form, warnings: Vec::new() })
        }
    }
}

/// Flux values in the `H^1` basis of a manifold spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FluxVector(pub Vec<Rational>);

impl FluxVector {
    pub fn basis(dim: usize, i: usize) -> Self {
        FluxVector((0..dim).map(|t| rat((t == i) as i64)).collect())
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }
}

/// What is known about the image of `I_c1` on `pi_1(Ham)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ic1Model {
    Zero,
    /// Image is `generator * Z`.
    Cyclic(Rational),
    DenseUnknown,
}

impl Ic1Model {
    pub fn cyclic(generator: Rational) -> Result<Self, SymplError> {
        if generator.is_zero() {
            return Err(SymplError::ZeroGenerator);
        }
        Ok(Ic1Model::Cyclic(generator))
    }

    /// Exact membership of `x` in the image, or `None` when undecidable.
    pub fn contains(&self, x: &Rational) -> Option<bool> {
        match self {
            Ic1Model::Zero => Some(x.is_zero()),
            Ic1Model::Cyclic(g) => Some((x / g).denom().is_one()),
            Ic1Model::DenseUnknown => x.is_zero().then_some(true),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Obstructed,
    NotObstructed,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutingVerdict {
    /// `v^T B w`.
    pub value: Rational,
    /// Lifts to the universal cover cannot commute.
    pub universal_cover: Decision,
    /// Representatives in the group itself cannot commute.
    pub base: Decision,
}

/// Obstructions to two elements with fluxes `v`, `w` commuting.
///
/// Commuting lifts force `b(v, w) = 0`; commuting elements downstairs force
/// `b(v, w)` into the image of `I_c1`.
pub fn commuting_obstruction(
    form: &AltForm,
    v: &FluxVector,
    w: &FluxVector,
    ic1: &Ic1Model,
) -> Result<CommutingVerdict, SymplError> {
    if let Ic1Model::Cyclic(g) = ic1 {
        if g.is_zero() {
            return Err(SymplError::ZeroGenerator);
        }
    }
    let value = form.pair(v.entries(), w.entries())?;
    let universal_cover =
        if value.is_zero() { Decision::NotObstructed } else { Decision::Obstructed };
    let base = match ic1.contains(&value) {
        Some(true) => Decision::NotObstructed,
        Some(false) => Decision::Obstructed,
        None => Decision::Undecided,
    };
    Ok(CommutingVerdict { value, universal_cover, base })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReznikovVerdict {
    Trivial,
    Nontrivial {
        /// Condition (1) fails: `I_c1` is not the zero map.
        ic1_nonzero: bool,
        /// Condition (2) fails: the form does not vanish on the flux subspace.
        form_witness: Option<ExtendabilityVerdict>,
    },
}

impl ReznikovVerdict {
    pub fn is_trivial(&self) -> bool {
        matches!(self, ReznikovVerdict::Trivial)
    }
}

/// Triviality of the Reznikov class on a flux-defined subgroup: both `I_c1 = 0`
/// and vanishing of the form on the flux subspace.
pub fn reznikov_trivial(
    ic1_is_zero: bool,
    form: &AltForm,
    subspace_basis: &[Vec<Rational>],
) -> Result<ReznikovVerdict, SymplError> {
    let ext = check_extendable(form, subspace_basis)?;
    if ic1_is_zero && ext.is_extendable() {
        return Ok(ReznikovVerdict::Trivial);
    }
    Ok(ReznikovVerdict::Nontrivial {
        ic1_nonzero: !ic1_is_zero,
        form_witness: (!ext.is_extendable()).then_some(ext),
    })
}
