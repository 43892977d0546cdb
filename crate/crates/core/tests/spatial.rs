use std::f64::consts::PI;

use proptest::prelude::*;
use sonine_core::spatial::{
    apply_operator, build_operator, coercivity_check, to_modal, to_nodal, Field, OperatorKind, SpectralOperator,
};
use sonine_core::Error;

const FD_CELLS: usize = 4096;

fn second_difference<F: Fn(f64) -> f64>(v: &F, x: f64, h: f64) -> f64 {
    (v(x + h) - 2.0 * v(x) + v(x - h)) / (h * h)
}

/// `max|Aφ - λφ| / max|λφ|` over the interior of a `FD_CELLS` grid.
fn relative_residual<A: Fn(f64) -> f64, P: Fn(f64) -> f64>(apply: A, phi: P, lambda: f64, length: f64) -> f64 {
    let h = length / FD_CELLS as f64;
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for i in 1..FD_CELLS {
        let x = h * i as f64;
        num = num.max((apply(x) - lambda * phi(x)).abs());
        den = den.max((lambda * phi(x)).abs());
    }
    num / den
}

#[test]
fn laplacian_eigenpairs_satisfy_the_difference_equation() {
    for length in [1.0, 2.5] {
        let op = build_operator(OperatorKind::DirichletLaplacian { length }, 8).unwrap();
        let h = length / FD_CELLS as f64;
        for idx in 0..8 {
            let phi = |x: f64| op.eigenfunction(idx, x);
            let r = relative_residual(|x| -second_difference(&phi, x, h), phi, op.eigenvalues()[idx], length);
            assert!(r <= 1e-4, "L = {length}, mode {idx}: {r}");
        }
    }
}

#[test]
fn involution_eigenpairs_satisfy_the_difference_equation() {
    let h = 1.0 / FD_CELLS as f64;
    for epsilon in [-0.9, -0.5, 0.0, 0.3, 0.5, 0.9] {
        let op = build_operator(OperatorKind::Involution { epsilon }, 8).unwrap();
        for idx in 0..8 {
            let phi = |x: f64| op.eigenfunction(idx, x);
            let apply = |x: f64| -second_difference(&phi, x, h) + epsilon * second_difference(&phi, 1.0 - x, h);
            let r = relative_residual(apply, phi, op.eigenvalues()[idx], 1.0);
            assert!(r <= 1e-4, "ε = {epsilon}, mode {idx}: {r}");
        }
    }
}

#[test]
fn fractional_eigenpairs_match_the_spectral_definition() {
    // (-Δ)^s v = Σ_j μ_j^s ⟨v, ψ_j⟩ ψ_j with μ_j, ψ_j from the difference Laplacian
    let length = 1.0;
    let s = 0.35;
    let op = build_operator(OperatorKind::SpectralFractionalLaplacian { length, s }, 8).unwrap();
    let h = length / FD_CELLS as f64;
    let nodes: Vec<f64> = (1..FD_CELLS).map(|i| h * i as f64).collect();
    let psi = |j: usize, x: f64| (2.0 / length).sqrt() * (j as f64 * PI * x / length).sin();
    let mu = |j: usize| {
        let x = 0.5 * length / j as f64;
        -second_difference(&|y| psi(j, y), x, h) / psi(j, x)
    };
    for idx in 0..8 {
        let phi: Vec<f64> = nodes.iter().map(|&x| op.eigenfunction(idx, x)).collect();
        let mut applied = vec![0.0; nodes.len()];
        for j in 1..=64 {
            let coef: f64 = nodes.iter().zip(&phi).map(|(&x, p)| h * p * psi(j, x)).sum();
            let w = mu(j).powf(s) * coef;
            for (a, &x) in applied.iter_mut().zip(&nodes) {
                *a += w * psi(j, x);
            }
        }
        let lambda = op.eigenvalues()[idx];
        let num = applied.iter().zip(&phi).map(|(a, p)| (a - lambda * p).abs()).fold(0.0, f64::max);
        let den = phi.iter().map(|p| (lambda * p).abs()).fold(0.0, f64::max);
        assert!(num / den <= 1e-4, "mode {idx}: {}", num / den);
    }
}

#[test]
fn eigenvalue_examples() {
    let inv = build_operator(OperatorKind::Involution { epsilon: 0.5 }, 8).unwrap();
    assert!((inv.eigenvalues()[0] - PI * PI / 2.0).abs() < 1e-12);
    let k2 = inv.index_of_wavenumber(2).unwrap();
    assert!((inv.eigenvalues()[k2] - 4.0 * PI * PI * 1.5).abs() < 1e-12);
    for kind in [
        OperatorKind::DirichletLaplacian { length: 0.0 },
        OperatorKind::SpectralFractionalLaplacian { length: 1.0, s: 1.0 },
        OperatorKind::Involution { epsilon: -1.0 },
    ] {
        assert!(matches!(build_operator(kind, 4), Err(Error::InvalidParameter { .. })), "{kind:?}");
    }
    assert!(build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, 0).is_err());
}

#[test]
fn involution_poincare_constant() {
    for epsilon in [-0.9, -0.5, 0.0, 0.5, 0.9] {
        let op = build_operator(OperatorKind::Involution { epsilon }, 64).unwrap();
        let bound = (1.0 - f64::abs(epsilon)) * PI * PI;
        assert!(op.coercivity_constant() >= bound * (1.0 - 1e-14), "ε = {epsilon}");
        let first = op.index_of_wavenumber(1).unwrap();
        assert!((op.eigenvalues()[first] - PI * PI * (1.0 - epsilon)).abs() < 1e-12);
    }
}

#[test]
fn spectra_are_positive_and_sorted() {
    for kind in [
        OperatorKind::DirichletLaplacian { length: 3.0 },
        OperatorKind::SpectralFractionalLaplacian { length: 1.0, s: 0.2 },
        OperatorKind::Involution { epsilon: -0.7 },
        OperatorKind::Involution { epsilon: 0.7 },
    ] {
        let op = build_operator(kind, 64).unwrap();
        let ev = op.eigenvalues();
        assert!(ev[0] > 0.0);
        assert!(ev.windows(2).all(|w| w[0] <= w[1]), "{kind:?}");
        assert_eq!(op.coercivity_constant(), ev[0]);
    }
}

#[test]
fn parabola_sine_coefficients() {
    // ∫₀¹ x(1-x) √2 sin(kπx) dx = 2√2(1 - (-1)^k)/(kπ)³
    let op = build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, 64).unwrap();
    let f = to_modal(&Field::sample(&op, |x| x * (1.0 - x)), &op).unwrap();
    for (c, &k) in f.modal().unwrap().iter().zip(op.wavenumbers()) {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let want = 2.0 * 2f64.sqrt() * (1.0 - sign) / (kf * PI).powi(3);
        assert!((c - want).abs() < 1e-8, "k = {k}: {c} vs {want}");
    }
}

#[test]
fn zero_field_round_trips() {
    let op = build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, 8).unwrap();
    let z = to_nodal(&Field::from_modal(vec![0.0; 8]), &op).unwrap();
    assert!(z.nodal().unwrap().iter().all(|v| *v == 0.0));
    let back = to_modal(&Field::from_nodal(z.nodal().unwrap().to_vec()), &op).unwrap();
    assert!(back.modal().unwrap().iter().all(|v| *v == 0.0));
    let lz = apply_operator(&op, &Field::zeros(&op)).unwrap();
    assert!(lz.modal().unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn apply_operator_examples() {
    let lap = build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, 8).unwrap();
    let out = apply_operator(&lap, &Field::eigenmode(&lap, 0, 1.0)).unwrap();
    assert!((out.modal().unwrap()[0] - PI * PI).abs() < 1e-13);

    let inv = build_operator(OperatorKind::Involution { epsilon: 0.3 }, 8).unwrap();
    let k2 = inv.index_of_wavenumber(2).unwrap();
    let out = apply_operator(&inv, &Field::eigenmode(&inv, k2, 1.0)).unwrap();
    let m = out.modal().unwrap();
    assert!((m[k2] - 4.0 * PI * PI * 1.3).abs() < 1e-12);
    assert!(m.iter().enumerate().all(|(i, v)| i == k2 || *v == 0.0));
}

#[test]
fn coercivity_examples() {
    let op = build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, 8).unwrap();
    let r = coercivity_check(&op, &Field::eigenmode(&op, 0, 1.0)).unwrap();
    assert!(r.pass && (r.lhs - r.rhs).abs() < 1e-13);
    let mut modal = vec![0.0; 8];
    modal[0] = 1.0;
    modal[1] = 1.0;
    let r = coercivity_check(&op, &Field::from_modal(modal)).unwrap();
    assert!((r.lhs - 5.0 * PI * PI).abs() < 1e-12);
    assert!((r.rhs - 2.0 * PI * PI).abs() < 1e-12);
    assert!(r.pass);
}

#[test]
fn shape_errors() {
    let op = build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, 8).unwrap();
    assert!(matches!(to_nodal(&Field::from_modal(vec![1.0; 7]), &op), Err(Error::Shape { .. })));
    assert!(matches!(apply_operator(&op, &Field::from_nodal(vec![1.0; 8])), Err(Error::Shape { .. })));
}

fn operator_strategy() -> impl Strategy<Value = SpectralOperator> {
    prop_oneof![
        (0.5f64..3.0).prop_map(|length| OperatorKind::DirichletLaplacian { length }),
        (0.05f64..0.95).prop_map(|s| OperatorKind::SpectralFractionalLaplacian { length: 1.0, s }),
        (-0.95f64..0.95).prop_map(|epsilon| OperatorKind::Involution { epsilon }),
    ]
    .prop_map(|kind| build_operator(kind, 16).unwrap())
}

proptest! {
    #[test]
    fn parseval_on_random_fields(op in operator_strategy(), modal in prop::collection::vec(-1.0f64..1.0, 16)) {
        prop_assume!(modal.iter().any(|c| *c != 0.0));
        let f = to_nodal(&Field::from_modal(modal.clone()), &op).unwrap();
        let nodal_sq: f64 = op.spacing() * f.nodal().unwrap().iter().map(|v| v * v).sum::<f64>();
        let modal_sq: f64 = modal.iter().map(|c| c * c).sum();
        prop_assert!(((nodal_sq - modal_sq) / modal_sq).abs() < 1e-12);
        let l2 = f.l2_norm().unwrap();
        prop_assert!((l2 * l2 - modal_sq).abs() <= 1e-12 * modal_sq);
    }

    #[test]
    fn round_trip_reproduces_coefficients(op in operator_strategy(), modal in prop::collection::vec(-1.0f64..1.0, 16)) {
        let nodal = to_nodal(&Field::from_modal(modal.clone()), &op).unwrap();
        let back = to_modal(&Field::from_nodal(nodal.nodal().unwrap().to_vec()), &op).unwrap();
        for (a, b) in back.modal().unwrap().iter().zip(&modal) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn coercivity_on_random_fields(op in operator_strategy(), modal in prop::collection::vec(-1.0f64..1.0, 16)) {
        prop_assume!(modal.iter().any(|c| *c != 0.0));
        let r = coercivity_check(&op, &Field::from_modal(modal)).unwrap();
        prop_assert!(r.pass && r.lhs >= r.rhs * (1.0 - 1e-12));
    }
}
