use dirac_core::clifford::{self, alpha, beta, Momentum3};
use dirac_core::evolution::evolve_free;
use dirac_core::invariants::{conjugate_invariant, InvariantOp};
use dirac_core::ops::{op, FieldOperator, Position};
use dirac_core::oracle::{
    ch_exact, ch_series, ch_truncation_gap, dense_expm, dense_free_propagator, dense_hamiltonian, dense_momentum,
    dense_position, dirac_green_eigen_residuals, max_abs, CMatrix, DenseOperator,
};
use dirac_core::{DiracError, GridSpec, Rep, SpinorField};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn closed_form_matches_dense_exponential() {
    for m in [0.0, 1.0, 10.0] {
        let g = GridSpec::cubic(1, 8, 10.0, m).unwrap();
        for t in [0.1, 1.0, 5.0] {
            let u = dense_free_propagator(&g, t).unwrap();
            for k in 0..8 {
                let cf = clifford::propagator(&g.mode(k), t);
                for r in 0..4 {
                    for cc in 0..4 {
                        assert!((u.matrix()[(4 * k + r, 4 * k + cc)] - cf.get(r, cc)).norm() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn dense_hamiltonian_structure() {
    let g = GridSpec::cubic(1, 2, 3.0, 1.0).unwrap();
    let h = dense_hamiltonian(&g).unwrap();
    assert_eq!(h.dim(), 8);
    assert!(h.is_hermitian(0.0));
    let ev = h.hermitian_eigenvalues().unwrap();
    let e1 = g.mode(1).energy();
    let want = [-e1, -e1, -1.0, -1.0, 1.0, 1.0, e1, e1];
    for (a, b) in ev.iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
    let p = dense_momentum(&g, 1).unwrap();
    let comm = h.matrix() * p.matrix() - p.matrix() * h.matrix();
    assert_eq!(max_abs(&comm), 0.0);
}

#[test]
fn eigenvalues_pair_up_on_larger_grid() {
    let g = GridSpec::cubic(2, 4, 3.0, 0.7).unwrap();
    let ev = dense_hamiltonian(&g).unwrap().hermitian_eigenvalues().unwrap();
    let mut want: Vec<f64> = (0..g.len())
        .flat_map(|k| {
            let e = g.mode(k).energy();
            [e, e, -e, -e]
        })
        .collect();
    want.sort_by(f64::total_cmp);
    for (a, b) in ev.iter().zip(&want) {
        assert!((a - b).abs() < 1e-11);
    }
}

#[test]
fn expm_trivial_cases() {
    let g = GridSpec::cubic(1, 4, 3.0, 1.0).unwrap();
    let h = dense_hamiltonian(&g).unwrap();
    let e0 = dense_expm(&h, c(0.0, 0.0)).unwrap();
    assert_eq!(max_abs(&(e0.matrix() - CMatrix::identity(16, 16))), 0.0);
    assert!(matches!(DenseOperator::new(CMatrix::zeros(3, 4)), Err(DiracError::Argument(_))));
    assert!(matches!(DenseOperator::new(CMatrix::zeros(1025, 1025)), Err(DiracError::Size { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn expm_of_random_hermitian_is_unitary(seed in any::<u64>(), scale in 0.1..20.0f64) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = 12;
        let a = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale);
        let h = DenseOperator::new(&a + a.adjoint()).unwrap();
        let u = dense_expm(&h, c(0.0, -1.0)).unwrap();
        prop_assert!(u.is_unitary(1e-12 * (1.0 + scale)));
        // exp(-iA) exp(iA) = E
        let v = dense_expm(&h, c(0.0, 1.0)).unwrap();
        prop_assert!(max_abs(&(u.matrix() * v.matrix() - CMatrix::identity(n, n))) < 1e-11 * (1.0 + scale));
    }

    #[test]
    fn ch_exact_matches_finite_difference(p in prop::array::uniform3(-2.0..2.0f64), m in 0.0..3.0f64, t in -2.0..2.0f64) {
        let q = Momentum3::new(p, m);
        let h = 1e-5;
        for axis in 1..=3 {
            let mut pp = p; pp[axis - 1] += h;
            let mut pm = p; pm[axis - 1] -= h;
            let d = (clifford::propagator(&Momentum3::new(pp, m), -t) - clifford::propagator(&Momentum3::new(pm, m), -t))
                .scale_re(0.5 / h);
            let fd = (clifford::propagator(&q, t) * d).scale(c(0.0, 1.0));
            prop_assert!(fd.max_abs_diff(&ch_exact(&q, t, axis).unwrap()) < 1e-7);
        }
    }
}

#[test]
fn ch_leading_terms() {
    let q = Momentum3::new([0.4, -0.3, 0.9], 1.3);
    let t = 0.37;
    for i in 1..=3 {
        let ai = alpha(i).unwrap();
        let s1 = ch_series(&q, t, 1, i).unwrap();
        assert!(s1.max_abs_diff(&ai.scale_re(-t)) < 1e-15);
        // second term: (i t^2 / 2) ([alpha_k, alpha_i] p_k + m [beta, alpha_i])
        let mut second = beta().commutator(&ai).scale_re(q.m);
        for k in 1..=3 {
            second += alpha(k).unwrap().commutator(&ai).scale_re(q.p[k - 1]);
        }
        let s2 = ch_series(&q, t, 2, i).unwrap();
        assert!((s2 - s1).max_abs_diff(&second.scale(c(0.0, 0.5 * t * t))) < 1e-15);
    }
}

#[test]
fn ch_gap_shrinks_with_order() {
    let q = Momentum3::new([0.3, 0.2, 0.1], 0.4);
    let t = 0.5 / q.energy();
    for order in 1..=10 {
        let a = ch_truncation_gap(&q, t, order, 1).unwrap();
        let b = ch_truncation_gap(&q, t, order + 2, 1).unwrap();
        assert!(b < a, "order {order}: {a} -> {b}");
    }
    assert!(ch_truncation_gap(&q, t, 12, 1).unwrap() < 1e-9);
}

#[test]
fn dirac_green_residuals() {
    for n in [8, 16] {
        let g = GridSpec::cubic(1, n, 6.0, 1.0).unwrap();
        let r = dirac_green_eigen_residuals(&g, 0.1, 1).unwrap();
        assert!(r.r_x < 1e-10 && r.r_p < 1e-10, "n = {n}: {r:?}");
        assert!(r.r_p_difference.is_finite());
    }
    let g = GridSpec::cubic(1, 8, 6.0, 1.0).unwrap();
    assert!(matches!(dirac_green_eigen_residuals(&g, 0.0, 1), Err(DiracError::Degenerate(_))));
}

#[test]
fn fast_paths_agree_with_oracles_on_tiny_grids() {
    for (ndim, n) in [(1, 4), (1, 8), (2, 4)] {
        for m in [0.0, 1.0, 10.0] {
            for t in [0.1, 1.0] {
                let g = GridSpec::cubic(ndim, n, 2.5, m).unwrap();
                let f = SpinorField::from_fn(g, Rep::Momentum, |i| {
                    let x = 1.0 + i as f64;
                    [c(1.0 / x, 0.0), c(0.0, x.sin()), c(x.cos(), 0.2), c(0.0, 0.0)]
                });
                let u = dense_free_propagator(&g, t).unwrap();
                for axis in 1..=ndim {
                    // U x U^dagger, densely
                    let x = dense_position(&g, axis).unwrap();
                    let xd = u.mul(&x).unwrap().mul(&u.adjoint()).unwrap();
                    let fast = conjugate_invariant(op(Position(axis)), t).apply(&f).unwrap();
                    let dense = xd.apply(&f).unwrap();
                    assert!(fast.max_abs_diff(&dense).unwrap() < 1e-11, "{ndim} {n} {m} {t} {axis}");
                    if m > 0.0 {
                        let ex = InvariantOp::x0d_explicit(axis).at(t).apply(&f).unwrap();
                        assert!(ex.max_abs_diff(&dense).unwrap() < 1e-11);
                    }
                }
                let fast = evolve_free(&f, t);
                assert!(fast.max_abs_diff(&u.apply(&f).unwrap()).unwrap() < 1e-11);
            }
        }
    }
}
