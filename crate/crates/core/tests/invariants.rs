use std::sync::Arc;

use dirac_core::evolution::{evolve_free, KickSchedule, Potential, Propagator};
use dirac_core::field::{make_gaussian, make_gaussian_scalar};
use dirac_core::invariants::{
    angular_momentum_invariant, angular_momentum_via_spin, invariant_eigen_check, invariant_maps_solutions,
    kicked_p0_expectation, kicked_p0_operator, newton_wigner, x0d_block_report, x0d_explicit, InvariantOp,
    NewtonWigner,
};
use dirac_core::ops::{mean, op, project_positive, Commutator, FieldOperator, ModeOp, Momentum, Position};
use dirac_core::schrodinger::{evolve_schrodinger, x0_invariant};
use dirac_core::{DiracError, GridSpec, Rep, SpinorField, WavepacketParams};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pol() -> [Complex64; 4] {
    [c(1.0, 0.0), c(0.3, 0.1), c(0.0, -0.4), c(0.2, 0.0)]
}

fn grid1(m: f64) -> GridSpec {
    GridSpec::cubic(1, 256, 60.0, m).unwrap()
}

fn packet1(g: &GridSpec) -> SpinorField {
    make_gaussian(g, &WavepacketParams::new([1.0, 0.0, 0.0], [0.8, 0.0, 0.0], 1.5).with_polarization(pol())).unwrap()
}

fn grid3() -> GridSpec {
    GridSpec::cubic(3, 32, 40.0, 2.0).unwrap()
}

fn packet3(g: &GridSpec) -> SpinorField {
    make_gaussian(g, &WavepacketParams::new([0.5, 1.0, -0.5], [0.3, -0.2, 0.1], 2.0).with_polarization(pol())).unwrap()
}

#[test]
fn one_dimensional_expectations_are_constant() {
    let g = grid1(1.0);
    let f = packet1(&g);
    let fp = project_positive(&f).unwrap().normalized().unwrap();
    let cases: Vec<(InvariantOp, &SpinorField)> = vec![
        (InvariantOp::p0d(1), &f),
        (InvariantOp::x0d(1), &f),
        (InvariantOp::x0d_explicit(1), &f),
        (InvariantOp::gamma0(), &f),
        (InvariantOp::newton_wigner(1), &fp),
    ];
    for (inv, f0) in cases {
        let e0 = mean(f0, &inv).unwrap();
        for t in [0.7, 3.0, 10.0] {
            let et = mean(&evolve_free(f0, t), &inv.at(t)).unwrap();
            assert!((et - e0).norm() < 1e-10 * (1.0 + e0.norm()), "{}: {e0} vs {et}", inv.label());
        }
    }
}

#[test]
fn weyl_heisenberg_pair() {
    let g = grid1(1.0);
    let f = packet1(&g);
    for t in [0.0, 1.0, 5.0] {
        let comm = Commutator(op(InvariantOp::p0d(1).at(t)), op(InvariantOp::x0d(1).at(t)));
        let r = comm.apply(&f).unwrap().combine(c(1.0, 0.0), &f, c(0.0, 1.0)).unwrap();
        assert!(r.norm() < 1e-6 * f.norm(), "t = {t}: {}", r.norm());
    }
}

#[test]
fn angular_momentum_routes_agree_and_close_algebra() {
    let g = grid3();
    let f = packet3(&g);
    for t in [0.0, 1.0] {
        let a = angular_momentum_invariant(&f, t, 3).unwrap();
        let b = angular_momentum_via_spin(&f, t, 3).unwrap();
        assert!(a.sub(&b).unwrap().norm() < 1e-8 * a.norm(), "t = {t}");
    }
    let t = 1.0;
    let l = |i| op(InvariantOp::angular(i).at(t));
    let lhs = Commutator(l(1), l(2)).apply(&f).unwrap();
    let rhs = l(3).apply(&f).unwrap().scaled(c(0.0, 1.0));
    let scale = f.apply_position(1).unwrap().apply_position(1).unwrap().norm();
    assert!(lhs.sub(&rhs).unwrap().norm() < 1e-5 * scale);
}

#[test]
fn three_dimensional_l_and_s_are_constant() {
    let g = grid3();
    let f = packet3(&g);
    for axis in 1..=3 {
        let l = InvariantOp::angular(axis);
        let s = InvariantOp::spin(axis).unwrap();
        let (l0, s0) = (mean(&f, &l).unwrap(), mean(&f, &s).unwrap());
        let ft = evolve_free(&f, 4.0);
        assert!((mean(&ft, &l.at(4.0)).unwrap() - l0).norm() < 1e-9 * (1.0 + l0.norm()));
        assert!((mean(&ft, &s.at(4.0)).unwrap() - s0).norm() < 1e-12);
    }
    assert!(matches!(
        angular_momentum_invariant(&packet1(&grid1(1.0)), 1.0, 1),
        Err(DiracError::UnsupportedDimension { required: 3, found: 1 })
    ));
}

#[test]
fn explicit_blocks_match_conjugation_and_report_printed_typos() {
    // m != 1 so that a dropped mass factor shows up
    let g = grid1(2.0);
    let f = packet1(&g);
    for t in [0.3, 1.0, 4.0] {
        let conj = InvariantOp::x0d(1).at(t).apply(&f).unwrap();
        let expl = x0d_explicit(&f, t, 1).unwrap();
        assert!(!expl.flagged());
        assert!(expl.value.max_abs_diff(&conj).unwrap() < 1e-8);
        let r = x0d_block_report(&f, t, 1).unwrap();
        assert!(r.derived_vs_conjugation < 1e-10);
        assert!(r.deviation[0][1] < 1e-12, "{}", r.render());
        for (i, j) in [(0, 0), (1, 0), (1, 1)] {
            assert!(r.deviation[i][j] > 1e-3, "block {}{}: {}", i + 1, j + 1, r.render());
        }
    }
}

#[test]
fn eigenvalues_do_not_move() {
    let g = GridSpec::cubic(1, 64, 20.0, 1.0).unwrap();
    let k = 5;
    let mut pw = SpinorField::zeros(g, Rep::Momentum);
    pw.data_mut()[4 * k] = c(1.0, 0.0);
    pw.data_mut()[4 * k + 2] = c(0.0, 1.0);
    let p = g.p_at(0, k);
    let r = invariant_eigen_check(&InvariantOp::p0d(1), &pw, c(p, 0.0), 3.0).unwrap();
    assert!(r < 1e-12);
    assert!(invariant_eigen_check(&InvariantOp::p0d(1), &pw, c(p, 0.0), 0.0).unwrap() < 1e-15);

    let plus = project_positive(&pw).unwrap();
    let h = InvariantOp::custom(op(ModeOp::hamiltonian()));
    let eps = g.mode(k).energy();
    assert!(invariant_eigen_check(&h, &plus, c(eps, 0.0), 2.5).unwrap() < 1e-10);

    let f = packet1(&grid1(1.0));
    assert!(matches!(
        invariant_eigen_check(&InvariantOp::p0d(1), &f, c(0.8, 0.0), 1.0),
        Err(DiracError::NotEigenpair { .. })
    ));
}

#[test]
fn invariants_map_solutions_to_solutions() {
    let g = grid1(1.0);
    let f = packet1(&g);
    let x = InvariantOp::x0d(1);
    assert!(invariant_maps_solutions(&f, &InvariantOp::p0d(1), 2.0).unwrap() < 1e-12);
    assert!(invariant_maps_solutions(&f, &x, 2.0).unwrap() < 1e-9);
    let x2 = x.polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    assert!(invariant_maps_solutions(&f, &x2, 2.0).unwrap() < 1e-8);
    // sum of invariants: p0D x0D is an invariant too
    let px = InvariantOp::custom(op(dirac_core::ops::Product(vec![op(Momentum(1)), op(Position(1))])));
    assert!(invariant_maps_solutions(&f, &px, 2.0).unwrap() < 1e-9);
}

#[test]
fn newton_wigner_properties() {
    let g = GridSpec::cubic(2, 64, 40.0, 1.5).unwrap();
    let f = make_gaussian(&g, &WavepacketParams::new([1.0, -1.0, 0.0], [0.5, 0.3, 0.0], 1.5).with_polarization(pol()))
        .unwrap();
    let h = make_gaussian(&g, &WavepacketParams::new([-1.0, 0.5, 0.0], [0.0, 0.4, 0.0], 1.8)).unwrap();
    // Hermitian
    let q = NewtonWigner(1);
    let a = f.inner(&q.apply(&h).unwrap()).unwrap();
    let b = q.apply(&f).unwrap().inner(&h).unwrap();
    assert!((a - b).norm() < 1e-12);
    // image lies in the positive-energy subspace
    let qf = q.apply(&f).unwrap();
    assert!(project_positive(&qf).unwrap().max_abs_diff(&qf).unwrap() < 1e-12);
    // components commute
    let comm = Commutator(op(NewtonWigner(1)), op(NewtonWigner(2))).apply(&f).unwrap();
    assert!(comm.norm() < 1e-8 * qf.norm());
    assert!(!newton_wigner(&f, 1).unwrap().flagged());

    let g0 = GridSpec::cubic(1, 32, 10.0, 0.0).unwrap();
    let z = SpinorField::zeros(g0, Rep::Momentum);
    assert!(matches!(newton_wigner(&z, 1), Err(DiracError::SingularProjector)));
}

#[test]
fn newton_wigner_nonrelativistic_limit() {
    let g = GridSpec::cubic(1, 512, 80.0, 100.0).unwrap();
    let sigma = 3.0;
    let f = make_gaussian(&g, &WavepacketParams::new([2.0, 0.0, 0.0], [1.0, 0.0, 0.0], sigma)).unwrap();
    let fp = project_positive(&f).unwrap().normalized().unwrap();
    let qx = mean(&fp, &NewtonWigner(1)).unwrap().re;
    let xx = mean(&fp, &Position(1)).unwrap().re;
    assert!((qx - xx).abs() < 1e-4 * sigma);
}

#[test]
fn dirac_x0_matches_schrodinger_in_nonrelativistic_limit() {
    let m = 100.0;
    let g = GridSpec::cubic(1, 512, 80.0, m).unwrap();
    let params = WavepacketParams::new([-3.0, 0.0, 0.0], [1.0, 0.0, 0.0], 3.0);
    let d = make_gaussian(&g, &params).unwrap();
    let s = make_gaussian_scalar(&g, &params).unwrap();
    for t in [1.0, 5.0] {
        let dt = evolve_free(&d, t);
        let xd = mean(&dt, &InvariantOp::x0d(1).at(t)).unwrap().re;
        let st = evolve_schrodinger(&s, t).unwrap();
        let xs = st.inner(&x0_invariant(&st, t, 1).unwrap().value).unwrap().re / st.norm_sq();
        assert!((xd - xs).abs() < 1e-3 * xs.abs());
    }
}

#[test]
fn kicked_initial_momentum() {
    let g = GridSpec::cubic(1, 64, 30.0, 1.0).unwrap();
    let f = make_gaussian(&g, &WavepacketParams::new([0.0; 3], [0.6, 0.0, 0.0], 1.5)).unwrap();
    let p_init = mean(&f, &Momentum(1)).unwrap().re;

    // boost: V = x, kappa = 0.5
    let s = KickSchedule::single(0.0, 0.5, Potential::linear(g, 1, 1.0).unwrap());
    let prop = dirac_core::evolution::KickedPropagator::new(s.clone(), 0.0);
    let after = prop.propagate(&f, 1.0).unwrap();
    let raw = mean(&after, &Momentum(1)).unwrap().re;
    assert!((raw - p_init + 0.5).abs() < 1e-6);
    for t in [-1.0, 0.0, 1.0, 5.0] {
        assert!((kicked_p0_expectation(&f, &s, t).unwrap()[0] - p_init).abs() < 1e-6);
    }

    // kappa = 0 is the free case
    let s0 = KickSchedule::single(0.0, 0.0, Potential::linear(g, 1, 1.0).unwrap());
    assert!((kicked_p0_expectation(&f, &s0, 2.0).unwrap()[0] - p_init).abs() < 1e-12);

    // random potential
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let vals: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sr = KickSchedule::single(0.0, 0.8, Potential::new(g, vals).unwrap());
    let vals_t: Vec<f64> = [-1.0, 1.0, 5.0]
        .iter()
        .map(|&t| kicked_p0_expectation(&f, &sr, t).unwrap()[0])
        .collect();
    for v in &vals_t {
        assert!((v - p_init).abs() < 1e-6);
    }

    // FFT route agrees with the dense kernel route
    let opk = kicked_p0_operator(sr.clone(), 0.0, 1, 3.0);
    let ft = dirac_core::evolution::KickedPropagator::new(sr.clone(), 0.0).propagate(&f, 3.0).unwrap();
    let e = mean(&ft, &opk).unwrap().re;
    assert!((e - vals_t[2]).abs() < 1e-10);

    let multi = KickSchedule::new(vec![
        dirac_core::evolution::Kick { time: 0.0, kappa: 1.0, potential: Potential::constant(g, 1.0).unwrap() },
        dirac_core::evolution::Kick { time: 1.0, kappa: 1.0, potential: Potential::constant(g, 1.0).unwrap() },
    ])
    .unwrap();
    assert!(matches!(kicked_p0_expectation(&f, &multi, 1.0), Err(DiracError::Unsupported(_))));
}

#[test]
fn kicked_invariant_is_constant_across_several_kicks() {
    let g = GridSpec::cubic(1, 128, 40.0, 1.0).unwrap();
    let f = make_gaussian(&g, &WavepacketParams::new([0.0; 3], [0.4, 0.0, 0.0], 1.5)).unwrap();
    let v = Potential::gaussian_bump(g, [1.0, 0.0, 0.0], 0.7, 1.5).unwrap();
    let sched = KickSchedule::new(vec![
        dirac_core::evolution::Kick { time: 0.5, kappa: 0.6, potential: v.clone() },
        dirac_core::evolution::Kick { time: 2.0, kappa: -0.9, potential: v },
    ])
    .unwrap();
    let inv = InvariantOp::p0_kicked(1, sched, 0.0);
    let prop: Arc<dyn Propagator> = inv.propagator().clone();
    let e0 = mean(&f, &inv).unwrap().re;
    for t in [0.5, 1.0, 2.0, 3.5] {
        let ft = prop.propagate(&f, t).unwrap();
        assert!((mean(&ft, &inv.at(t)).unwrap().re - e0).abs() < 1e-10, "t = {t}");
    }
}
