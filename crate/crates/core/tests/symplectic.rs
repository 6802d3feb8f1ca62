use num_traits::Zero;
use qmform_core::form::{rat, ratio};
use qmform_core::sympl::{
    self, BlowupSpec, Decision, FluxVector, Ic1Model, ManifoldSpec, ReznikovVerdict, SurfaceSpec,
    SymplError, Warning,
};
use qmform_core::{AltForm, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn surf(genus: u32, area: Rational) -> SurfaceSpec {
    SurfaceSpec::new(genus, area).unwrap()
}

fn e(dim: usize, i: usize) -> Vec<Rational> {
    FluxVector::basis(dim, i).0
}

#[test]
fn genus_two_surface() {
    let p = sympl::predicted_form(&ManifoldSpec::ProductOfSurfaces(vec![surf(2, rat(1))])).unwrap();
    assert_eq!(p.form, sympl::surface_intersection_form(2).scaled(&rat(-2)));
    assert!(p.is_complete());
    assert!(p.warnings.is_empty());
}

#[test]
fn surface_with_other_area() {
    // Vol (2 - 2l) / Area^2 with Vol = Area: (2 - 6) / 3
    let p = sympl::predicted_form(&ManifoldSpec::ProductOfSurfaces(vec![surf(3, rat(3))])).unwrap();
    assert_eq!(p.form, sympl::surface_intersection_form(3).scaled(&ratio(-4, 3)));
}

#[test]
fn product_blocks() {
    let spec = ManifoldSpec::ProductOfSurfaces(vec![surf(2, rat(1)), surf(3, rat(2))]);
    assert_eq!(sympl::volume(&spec).unwrap(), rat(4));
    assert_eq!(sympl::scalar_curvature_product(&spec).unwrap(), rat(-4));
    let p = sympl::predicted_form(&spec).unwrap();
    assert_eq!(p.form.block(0, 4), sympl::surface_intersection_form(2).scaled(&rat(-8)));
    assert_eq!(p.form.block(4, 6), sympl::surface_intersection_form(3).scaled(&rat(-4)));
    assert!(p.form.get(0, 5).is_zero());
}

#[test]
fn pairing_matches_curvature_formula_on_products() {
    // On a product the predicted form is A(M) times the pairing only when all
    // factors share the same (2 - 2l) / Area; check that case exactly.
    let spec = ManifoldSpec::ProductOfSurfaces(vec![surf(2, rat(1)), surf(3, rat(2))]);
    let pairing = sympl::symplectic_pairing_product(&[surf(2, rat(1)), surf(3, rat(2))]).unwrap();
    assert_eq!(pairing.block(0, 4), sympl::surface_intersection_form(2).scaled(&rat(2)));
    assert_eq!(pairing.block(4, 6), sympl::surface_intersection_form(3).scaled(&rat(1)));
    let a = sympl::scalar_curvature_product(&spec).unwrap();
    let n = rat(2);
    // n * b_omega scaled by each factor's own curvature reproduces the blocks
    let p = sympl::predicted_form(&spec).unwrap();
    let s1 = sympl::scalar_curvature_surface(&surf(2, rat(1)));
    let s2 = sympl::scalar_curvature_surface(&surf(3, rat(2)));
    assert_eq!(p.form.block(0, 4), pairing.block(0, 4).scaled(&(&n * &s1)));
    assert_eq!(p.form.block(4, 6), pairing.block(4, 6).scaled(&(&n * &s2)));
    assert_eq!(a, s1 + s2);
}

#[test]
fn blowup_blocks() {
    let a = ratio(5, 3);
    let spec = ManifoldSpec::TorusBlowup(BlowupSpec {
        radii: vec![rat(1), rat(2)],
        rho: ratio(1, 4),
        r: ratio(1, 2),
        curvature_a: Some(a.clone()),
    });
    assert_eq!(sympl::volume(&spec).unwrap(), rat(128));
    let p = sympl::predicted_form(&spec).unwrap();
    let j = AltForm::standard_symplectic();
    assert_eq!(p.form, AltForm::block_diag(&[j.scaled(&(rat(32) * &a)), j.scaled(&(rat(8) * &a))]));
    assert_eq!(sympl::torus_factor_area(&ratio(3, 2)), rat(9));
}

#[test]
fn blowup_validation() {
    let mk = |radii: Vec<Rational>, rho: Rational, r: Rational| {
        ManifoldSpec::TorusBlowup(BlowupSpec { radii, rho, r, curvature_a: Some(rat(1)) }).validate()
    };
    assert!(mk(vec![rat(1), rat(2)], ratio(1, 4), ratio(1, 2)).is_ok());
    assert!(mk(vec![rat(2), rat(1)], ratio(1, 4), ratio(1, 2)).is_err());
    assert!(mk(vec![rat(1), rat(1)], ratio(1, 4), ratio(1, 2)).is_err());
    assert!(mk(vec![rat(1)], ratio(1, 2), ratio(1, 2)).is_err());
    assert!(mk(vec![rat(1)], rat(0), ratio(1, 2)).is_err());
    assert!(mk(vec![rat(1)], ratio(1, 4), rat(1)).is_err());
    assert!(mk(vec![], ratio(1, 4), ratio(1, 2)).is_err());
    let missing = ManifoldSpec::TorusBlowup(BlowupSpec {
        radii: vec![rat(1)],
        rho: ratio(1, 4),
        r: ratio(1, 2),
        curvature_a: None,
    });
    assert_eq!(sympl::predicted_form(&missing), Err(SymplError::MissingCurvature));
    assert_eq!(sympl::scalar_curvature_product(&missing), Err(SymplError::UnsupportedKind));
}

#[test]
fn surface_validation() {
    assert!(SurfaceSpec::new(2, rat(0)).is_err());
    assert!(SurfaceSpec::new(2, rat(-1)).is_err());
    assert!(ManifoldSpec::ProductOfSurfaces(vec![]).validate().is_err());
    assert!(ManifoldSpec::ProductOfSurfaces(vec![surf(0, rat(1))]).validate().is_err());
}

#[test]
fn torus_factors_warn_and_vanish() {
    let spec = ManifoldSpec::ProductOfSurfaces(vec![surf(1, rat(2)), surf(2, rat(1))]);
    let p = sympl::predicted_form(&spec).unwrap();
    assert_eq!(p.warnings, vec![Warning::GenusOneFactor { factor: 0 }]);
    assert!(p.form.block(0, 2).is_zero());
    assert!(!p.form.block(2, 4).is_zero());
}

#[test]
fn surface_times_manifold_leaves_the_rest_unknown() {
    let spec = ManifoldSpec::SurfaceTimesManifold {
        surface: surf(2, rat(1)),
        extra_volume: rat(3),
        extra_curvature: rat(5),
        extra_half_dim: 2,
        extra_betti1: 3,
    };
    assert_eq!(spec.half_dim(), 3);
    assert_eq!(spec.betti1(), 7);
    assert_eq!(sympl::volume(&spec).unwrap(), rat(9));
    assert_eq!(sympl::scalar_curvature_product(&spec).unwrap(), rat(3));
    let p = sympl::predicted_form(&spec).unwrap();
    assert_eq!(p.known_dim, 4);
    assert!(!p.is_complete());
    assert!(p.is_known(3, 3) && !p.is_known(3, 4));
    assert_eq!(p.form.block(0, 4), sympl::surface_intersection_form(2).scaled(&rat(-18)));
}

#[test]
fn curvature_is_additive() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let factors: Vec<SurfaceSpec> = (0..rng.gen_range(1..=4))
            .map(|_| surf(rng.gen_range(1..=5), ratio(rng.gen_range(1..=9), rng.gen_range(1..=4))))
            .collect();
        let total = sympl::scalar_curvature_product(&ManifoldSpec::ProductOfSurfaces(factors.clone())).unwrap();
        let mut sum = Rational::zero();
        for f in &factors {
            sum += sympl::scalar_curvature_product(&ManifoldSpec::ProductOfSurfaces(vec![f.clone()])).unwrap();
        }
        assert_eq!(total, sum);
    }
}

#[test]
fn commuting_examples() {
    let g2 = sympl::predicted_form(&ManifoldSpec::ProductOfSurfaces(vec![surf(2, rat(1))])).unwrap().form;
    let v = FluxVector::basis(4, 0);
    let w = FluxVector::basis(4, 1);
    let zero = sympl::commuting_obstruction(&g2, &v, &w, &Ic1Model::Zero).unwrap();
    assert_eq!(zero.value, rat(-2));
    assert_eq!((zero.universal_cover, zero.base), (Decision::Obstructed, Decision::Obstructed));
    let cyc = sympl::commuting_obstruction(&g2, &v, &w, &Ic1Model::cyclic(rat(-2)).unwrap()).unwrap();
    assert_eq!((cyc.universal_cover, cyc.base), (Decision::Obstructed, Decision::NotObstructed));
    let cyc3 = sympl::commuting_obstruction(&g2, &v, &w, &Ic1Model::cyclic(rat(3)).unwrap()).unwrap();
    assert_eq!(cyc3.base, Decision::Obstructed);
    let half = sympl::commuting_obstruction(&g2, &v, &w, &Ic1Model::cyclic(ratio(2, 3)).unwrap()).unwrap();
    assert_eq!(half.base, Decision::NotObstructed);
    let dense = sympl::commuting_obstruction(&g2, &v, &w, &Ic1Model::DenseUnknown).unwrap();
    assert_eq!(dense.base, Decision::Undecided);
    let same = sympl::commuting_obstruction(&g2, &v, &v, &Ic1Model::DenseUnknown).unwrap();
    assert_eq!((same.universal_cover, same.base), (Decision::NotObstructed, Decision::NotObstructed));
    assert!(Ic1Model::cyclic(rat(0)).is_err());
    assert_eq!(
        sympl::commuting_obstruction(&g2, &v, &w, &Ic1Model::Cyclic(rat(0))),
        Err(SymplError::ZeroGenerator)
    );
    assert!(sympl::commuting_obstruction(&g2, &FluxVector::basis(3, 0), &w, &Ic1Model::Zero).is_err());
}

#[test]
fn commuting_is_antisymmetric_in_the_fluxes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let form = AltForm::from_upper(4, |_, _| ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
        let v = FluxVector((0..4).map(|_| ratio(rng.gen_range(-3..=3), 1)).collect());
        let w = FluxVector((0..4).map(|_| ratio(rng.gen_range(-3..=3), 1)).collect());
        let ic1 = Ic1Model::cyclic(ratio(rng.gen_range(1..=3), rng.gen_range(1..=3))).unwrap();
        let a = sympl::commuting_obstruction(&form, &v, &w, &ic1).unwrap();
        let b = sympl::commuting_obstruction(&form, &w, &v, &ic1).unwrap();
        assert_eq!(a.value, -b.value.clone());
        assert_eq!((a.universal_cover, a.base), (b.universal_cover, b.base));
    }
}

#[test]
fn reznikov_conditions() {
    let g2 = sympl::predicted_form(&ManifoldSpec::ProductOfSurfaces(vec![surf(2, rat(1))])).unwrap().form;
    let iso = [e(4, 0), e(4, 2)];
    let not_iso = [e(4, 0), e(4, 1)];
    assert_eq!(sympl::reznikov_trivial(true, &g2, &iso).unwrap(), ReznikovVerdict::Trivial);
    match sympl::reznikov_trivial(false, &g2, &iso).unwrap() {
        ReznikovVerdict::Nontrivial { ic1_nonzero, form_witness } => {
            assert!(ic1_nonzero);
            assert!(form_witness.is_none());
        }
        v => panic!("{v:?}"),
    }
    match sympl::reznikov_trivial(true, &g2, &not_iso).unwrap() {
        ReznikovVerdict::Nontrivial { ic1_nonzero, form_witness } => {
            assert!(!ic1_nonzero);
            assert!(form_witness.is_some());
        }
        v => panic!("{v:?}"),
    }
    assert!(!sympl::reznikov_trivial(false, &g2, &not_iso).unwrap().is_trivial());
}

#[test]
fn isotropy_on_genus_three_lagrangian() {
    let g3 = sympl::predicted_form(&ManifoldSpec::ProductOfSurfaces(vec![surf(3, rat(1))])).unwrap().form;
    let lag = [e(6, 0), e(6, 2), e(6, 4)];
    assert!(qmform_core::check_extendable(&g3, &lag).unwrap().is_extendable());
    // a_1 + b_2 and a_2 + b_1 span an isotropic plane too
    let mut u = e(6, 0);
    u[3] = rat(1);
    let mut v = e(6, 2);
    v[1] = rat(1);
    assert!(qmform_core::check_extendable(&g3, &[u.clone(), v]).unwrap().is_extendable());
    let mut v = e(6, 2);
    v[1] = rat(-1);
    assert!(!qmform_core::check_extendable(&g3, &[u, v]).unwrap().is_extendable());
}
