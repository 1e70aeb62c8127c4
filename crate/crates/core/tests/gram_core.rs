mod common;

use approx::assert_abs_diff_eq;
use common::*;
use framescape::chart::{chart_coordinates, chart_reconstruct};
use framescape::constructors::{direct_sum, gramian_of, mercedes_benz, mubs_6_4_gramian, random_parseval};
use framescape::matrix::{cx, CMat};
use framescape::tangent::{
    lift_to_tangent, numeric_tangent_rank, retract, retract_spectral, tangent_dimension, tangent_project,
    tangent_reconstruct,
};
use framescape::{Field, FrameError, Gram, GramMatrix, HermMatrix, TangentDirection, Tolerances};
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn identity_is_accepted_with_zero_residuals() {
    let raw = HermMatrix::new(CMat::identity(4), Field::Real, &tol()).unwrap();
    let g: Gram = GramMatrix::validate(raw, 4, &tol()).unwrap();
    assert_eq!(g.residuals().idempotency, 0.0);
    assert_eq!(g.residuals().trace_gap, 0.0);
}

#[test]
fn half_identity_is_not_idempotent() {
    // G² − G = −I/4, whose HS norm is √2/4
    let raw = HermMatrix::new(CMat::<f64>::identity(2).scale(0.5), Field::Real, &tol()).unwrap();
    match GramMatrix::validate(raw, 1, &tol()) {
        Err(FrameError::NotIdempotent { residual }) => {
            assert_abs_diff_eq!(residual, 2f64.sqrt() / 4.0, epsilon = 1e-15)
        }
        other => panic!("expected NotIdempotent, got {other:?}"),
    }
}

#[test]
fn trace_mismatch_and_non_hermitian_are_rejected() {
    let raw = HermMatrix::new(CMat::identity(3), Field::Real, &tol()).unwrap();
    assert!(matches!(GramMatrix::<f64>::validate(raw, 2, &tol()), Err(FrameError::TraceMismatch { .. })));
    let mut m = CMat::<f64>::identity(2);
    m[(0, 1)] = cx(0.3, 0.0);
    assert!(matches!(HermMatrix::new(m, Field::Real, &tol()), Err(FrameError::NotHermitian { .. })));
}

#[test]
fn six_by_four_fixture_validates_with_rank_four() {
    let g: Gram = mubs_6_4_gramian().unwrap();
    assert_eq!((g.n(), g.k()), (6, 4));
    assert!(g.residuals().idempotency <= 1e-10);
    assert_abs_diff_eq!(g.frobenius_sq(), 4.0, epsilon = 1e-9);
}

#[test]
fn accepted_gramians_satisfy_the_parseval_identity() {
    for seed in 0..50 {
        let field = if seed % 2 == 0 { Field::Real } else { Field::Complex };
        let g: Gram = random_parseval(6, 4, field, seed).unwrap();
        assert!(g.residuals().idempotency <= 1e-10 && g.residuals().trace_gap <= 1e-10);
        assert_abs_diff_eq!(g.frobenius_sq(), 4.0, epsilon = 1e-9);
        assert!(g.diagonal().iter().all(|&d| (-1e-12..=1.0 + 1e-12).contains(&d)));
    }
}

#[test]
fn projection_annihilates_g_and_identity() {
    let g: Gram = gramian_of(&mercedes_benz()).unwrap();
    assert!(tangent_project(&g, g.matrix()).unwrap().hs_norm() < 1e-15);
    assert!(tangent_project(&g, &CMat::identity(3)).unwrap().hs_norm() < 1e-15);
}

#[test]
fn projection_is_idempotent_and_self_adjoint() {
    let g: Gram = gramian_of(&mercedes_benz()).unwrap();
    let mut r = rng(11);
    for _ in 0..20 {
        let x = random_hermitian(3, Field::Real, &mut r);
        let y = random_hermitian(3, Field::Real, &mut r);
        let px = tangent_project(&g, &x).unwrap();
        let ppx = tangent_project(&g, px.matrix()).unwrap();
        assert!(max_abs_diff(px.matrix(), ppx.matrix()) <= 1e-12);
        let py = tangent_project(&g, &y).unwrap();
        assert_abs_diff_eq!(px.matrix().hs_inner(&y), x.hs_inner(py.matrix()), epsilon = 1e-12);
        assert!(px.tangency_defect(&g) <= 1e-12);
    }
}

#[test]
fn projection_rejects_wrong_size() {
    let g: Gram = gramian_of(&mercedes_benz()).unwrap();
    assert!(matches!(tangent_project(&g, &CMat::identity(4)), Err(FrameError::DimensionMismatch { .. })));
}

#[test]
fn lift_vanishes_on_commuting_directions() {
    let g: Gram = mubs_6_4_gramian().unwrap();
    let zero = TangentDirection::zero(6, Field::Complex);
    assert_eq!(lift_to_tangent(&g, &zero).unwrap().hs_norm(), 0.0);
    let ig = TangentDirection::new(g.matrix().scale_c(cx(0.0, 1.0)), Field::Complex);
    assert!(lift_to_tangent(&g, &ig).unwrap().hs_norm() < 1e-14);
}

#[test]
fn lifted_basis_reconstructs_tangent_vectors() {
    let mut r = rng(12);
    for field in [Field::Real, Field::Complex] {
        let g: Gram = random_parseval(4, 2, field, 3).unwrap();
        for _ in 0..10 {
            let x = tangent_project(&g, &random_hermitian(4, field, &mut r)).unwrap();
            let back = tangent_reconstruct(&g, x.matrix()).unwrap();
            assert!(max_abs_diff(&back, x.matrix()) <= 1e-10, "{field}");
        }
    }
}

#[test]
fn lift_is_surjective_onto_tangent_space() {
    // X = lift(A) for A = XG − GX, since X is block off-diagonal
    let mut r = rng(13);
    let g: Gram = random_parseval(5, 2, Field::Complex, 8).unwrap();
    let x = tangent_project(&g, &random_hermitian(5, Field::Complex, &mut r)).unwrap();
    let a = TangentDirection::new(x.matrix().commutator(g.matrix()), Field::Complex);
    let lifted = lift_to_tangent(&g, &a).unwrap();
    assert!(max_abs_diff(lifted.matrix(), x.matrix()) <= 1e-12);
}

#[test]
fn tangent_dimension_matches_numeric_rank() {
    for (n, k, field, expected) in [
        (3, 2, Field::Real, 2),
        (3, 2, Field::Complex, 4),
        (4, 2, Field::Real, 4),
        (4, 2, Field::Complex, 8),
        (6, 4, Field::Real, 8),
        (6, 4, Field::Complex, 16),
        (4, 4, Field::Complex, 0),
    ] {
        let g: Gram = random_parseval(n, k, field, 5).unwrap();
        assert_eq!(tangent_dimension(&g), expected);
        assert_eq!(numeric_tangent_rank(&g), expected, "({n},{k}) {field}");
    }
}

#[test]
fn chart_center_has_zero_coordinates() {
    let m = CMat::from_real_fn(5, 5, |i, j| if i == j && i < 2 { 1.0 } else { 0.0 });
    let g: Gram = GramMatrix::from_matrix(m, Field::Real, 2, &tol()).unwrap();
    let c = chart_coordinates(&g, Some(&[0, 1]), &tol()).unwrap();
    assert_eq!(c.coords.max_abs(), 0.0);
    assert_eq!(chart_reconstruct(&c, 5, 2, &tol()).unwrap().hs_distance(&g), 0.0);
}

#[test]
fn chart_round_trips_on_fixtures() {
    let mb: Gram = gramian_of(&mercedes_benz()).unwrap();
    let c = chart_coordinates(&mb, Some(&[0, 1]), &tol()).unwrap();
    assert!(chart_reconstruct(&c, 3, 2, &tol()).unwrap().hs_distance(&mb) <= 1e-10);
    let g: Gram = mubs_6_4_gramian().unwrap();
    let c = chart_coordinates(&g, None, &tol()).unwrap();
    assert!(chart_reconstruct(&c, 6, 4, &tol()).unwrap().hs_distance(&g) <= 1e-10);
}

#[test]
fn chart_reconstruct_checks_dimensions() {
    let mb: Gram = gramian_of(&mercedes_benz()).unwrap();
    let c = chart_coordinates(&mb, Some(&[0, 1]), &tol()).unwrap();
    assert!(matches!(chart_reconstruct(&c, 4, 2, &tol()), Err(FrameError::DimensionMismatch { .. })));
    assert!(matches!(chart_reconstruct(&c, 3, 1, &tol()), Err(FrameError::DimensionMismatch { .. })));
}

#[test]
fn singular_pivot_block_is_reported() {
    let g: Gram = direct_sum(&GramMatrix::identity(1, Field::Real), &gramian_of(&mercedes_benz()).unwrap());
    // rows {1, 2, 3} of a rank-3 Gramian: rows 1..3 span only the Mercedes-Benz block
    let bad = chart_coordinates(&g, Some(&[1, 2, 3]), &tol());
    assert!(matches!(bad, Err(FrameError::SingularPivotBlock { .. })));
}

#[test]
fn retraction_with_zero_step_or_direction_is_identity() {
    let g: Gram = random_parseval(4, 2, Field::Complex, 1).unwrap();
    let mut r = rng(14);
    let a = random_anti_hermitian(4, Field::Complex, &mut r);
    assert_eq!(retract(&g, &a, 0.0).matrix(), g.matrix());
    assert_eq!(retract(&g, &TangentDirection::zero(4, Field::Complex), 3.0).matrix(), g.matrix());
}

#[test]
fn commuting_direction_leaves_gramian_fixed() {
    let mb: Gram = gramian_of(&mercedes_benz()).unwrap();
    let g = direct_sum(&mb, &mb);
    let a = TangentDirection::new(g.matrix().scale_c(cx(0.0, 0.7)), Field::Complex);
    let g = g.into_field(Field::Complex);
    for s in [0.1, 1.0, 10.0] {
        assert!(retract(&g, &a, s).hs_distance(&g) <= 1e-13);
    }
}

#[test]
fn retraction_slope_is_minus_the_lift() {
    let mut r = rng(15);
    for field in [Field::Real, Field::Complex] {
        let g: Gram = random_parseval(4, 2, field, 21).unwrap();
        let a = random_anti_hermitian(4, field, &mut r);
        let t = 1e-6;
        let slope = (retract(&g, &a, t).matrix() - g.matrix()).scale(1.0 / t);
        let expected = a.matrix().commutator(g.matrix()).scale(-1.0);
        let gap = (&slope - &expected).hs_norm() / expected.hs_norm();
        assert!(gap <= 1e-4, "{field}: {gap:e}");
    }
}

#[test]
fn retraction_matches_taylor_conjugation() {
    let mut r = rng(16);
    let g: Gram = random_parseval(5, 2, Field::Complex, 2).unwrap();
    let a = random_anti_hermitian(5, Field::Complex, &mut r);
    for s in [1e-3, 0.5, 4.0] {
        // retract uses exp(−sA)
        let oracle = conjugate(&g, a.matrix(), -s);
        assert!(retract(&g, &a, s).hs_distance(&oracle) <= 1e-11, "step {s}");
    }
}

#[test]
fn spectral_retraction_agrees_to_second_order() {
    let mut r = rng(17);
    let g: Gram = random_parseval(5, 3, Field::Real, 4).unwrap();
    let a = random_anti_hermitian(5, Field::Real, &mut r);
    let d1 = retract(&g, &a, 1e-3).hs_distance(&retract_spectral(&g, &a, 1e-3));
    let d2 = retract(&g, &a, 2e-3).hs_distance(&retract_spectral(&g, &a, 2e-3));
    assert!(d1 < 1e-4);
    // halving the step should cut the gap by about four
    assert!(d2 / d1 > 3.0 && d2 / d1 < 5.0, "ratio {}", d2 / d1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn retraction_stays_on_manifold(seed in 0u64..10_000, step in 0.0f64..10.0, complex in any::<bool>()) {
        let field = if complex { Field::Complex } else { Field::Real };
        let g: Gram = random_parseval(5, 2, field, seed).unwrap();
        let a = random_anti_hermitian(5, field, &mut rng(seed ^ 0xabc));
        let moved = retract(&g, &a, step);
        prop_assert!(moved.is_on_manifold(1e-9));
    }

    #[test]
    fn chart_round_trip_random(seed in 0u64..10_000, complex in any::<bool>()) {
        let field = if complex { Field::Complex } else { Field::Real };
        let g: Gram = random_parseval(5, 2, field, seed).unwrap();
        let c = chart_coordinates(&g, None, &Tolerances::default()).unwrap();
        let back = chart_reconstruct(&c, 5, 2, &Tolerances::default()).unwrap();
        prop_assert!(back.hs_distance(&g) <= 1e-10);
    }

    #[test]
    fn random_chart_coordinates_give_projections(entries in proptest::collection::vec(-3.0f64..3.0, 6)) {
        let g: Gram = random_parseval(5, 2, Field::Real, 0).unwrap();
        let mut c = chart_coordinates(&g, Some(&[0, 1]), &Tolerances::default()).unwrap();
        c.coords = CMat::from_real_fn(2, 3, |i, j| entries[3 * i + j]);
        let out = chart_reconstruct(&c, 5, 2, &Tolerances::default()).unwrap();
        prop_assert!(out.residuals().idempotency <= 1e-10);
        prop_assert!((out.frobenius_sq() - 2.0).abs() <= 1e-9);
    }
}
