//! Oracle matrix run by `dirac selftest`.

use std::io::Write;

use dirac_core::clifford::{self, alpha, beta, dirac_h_mode, lambda_plus_mode, Momentum3, SpinorMatrix};
use dirac_core::evolution::{evolve_free, kicked_green_mode, KickSchedule, Potential, Propagator};
use dirac_core::field::make_gaussian;
use dirac_core::invariants::{
    conjugate_invariant, invariant_eigen_check, invariant_maps_solutions, kicked_p0_expectation, x0d_explicit,
    InvariantOp, NewtonWigner,
};
use dirac_core::ops::{mean, op, project_positive, FieldOperator, Momentum, Position};
use dirac_core::oracle::{
    ch_truncation_gap, dense_free_propagator, dense_kicked_propagator, dense_position, dirac_green_eigen_residuals,
};
use dirac_core::schrodinger::green_eigen_residuals;
use dirac_core::{GridSpec, Rep, Result, SpinorField, WavepacketParams};
use num_complex::Complex64;

use crate::scenario::fmt_f64;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tol
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn closed_form_vs_expm() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for m in [0.0, 1.0, 10.0] {
        let g = GridSpec::cubic(1, 8, 10.0, m)?;
        for t in [0.1, 1.0, 5.0] {
            let u = dense_free_propagator(&g, t)?;
            for k in 0..8 {
                let cf = clifford::evolution_mode(&g.mode(k), t).matrix;
                for r in 0..4 {
                    for col in 0..4 {
                        worst = worst.max((u.matrix()[(4 * k + r, 4 * k + col)] - cf.get(r, col)).norm());
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn clifford_relations() -> Result<f64> {
    let e = SpinorMatrix::identity();
    let b = beta();
    let mut worst = (b * b).max_abs_diff(&e);
    for i in 1..=3 {
        let ai = alpha(i)?;
        worst = worst.max(ai.anticommutator(&b).max_abs());
        for k in 1..=3 {
            let want = if i == k { e.scale_re(2.0) } else { SpinorMatrix::zero() };
            worst = worst.max(ai.anticommutator(&alpha(k)?).max_abs_diff(&want));
        }
    }
    Ok(worst)
}

fn projector_relations() -> Result<f64> {
    let modes = [
        Momentum3::new([0.0, 0.0, 0.0], 1.0),
        Momentum3::new([0.3, -1.2, 0.7], 0.5),
        Momentum3::new([5.0, 0.1, -2.0], 10.0),
        Momentum3::new([0.4, 0.0, 0.0], 0.0),
    ];
    let mut worst: f64 = 0.0;
    for q in &modes {
        let l = lambda_plus_mode(q)?;
        let h = dirac_h_mode(q);
        let minus = SpinorMatrix::identity() - l;
        worst = worst
            .max((l * l).max_abs_diff(&l))
            .max(l.max_abs_diff(&l.adjoint()))
            .max((h * l).max_abs_diff(&l.scale_re(q.energy())))
            .max((l * minus).max_abs())
            .max((l.trace() - c(2.0, 0.0)).norm())
            .max(l.commutator(&clifford::propagator(q, 1.7)).max_abs());
    }
    Ok(worst)
}

fn fast_paths_vs_oracles() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (ndim, n) in [(1, 4), (1, 8), (2, 4)] {
        for m in [0.0, 1.0, 10.0] {
            for t in [0.1, 1.0] {
                let g = GridSpec::cubic(ndim, n, 2.5, m)?;
                let f = SpinorField::from_fn(g, Rep::Momentum, |i| {
                    let x = 1.0 + i as f64;
                    [c(1.0 / x, 0.0), c(0.0, x.sin()), c(x.cos(), 0.2), c(0.0, 0.0)]
                });
                let u = dense_free_propagator(&g, t)?;
                worst = worst.max(evolve_free(&f, t).max_abs_diff(&u.apply(&f)?)?);
                for axis in 1..=ndim {
                    let xd = u.mul(&dense_position(&g, axis)?)?.mul(&u.adjoint())?;
                    let dense = xd.apply(&f)?;
                    let fast = conjugate_invariant(op(Position(axis)), t).apply(&f)?;
                    worst = worst.max(fast.max_abs_diff(&dense)?);
                    if m > 0.0 {
                        let ex = InvariantOp::x0d_explicit(axis).at(t).apply(&f)?;
                        worst = worst.max(ex.max_abs_diff(&dense)?);
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn kicked_kernel_vs_dense() -> Result<f64> {
    let g = GridSpec::cubic(1, 8, 5.0, 1.0)?;
    let v = Potential::gaussian_bump(g, [0.5, 0.0, 0.0], 1.0, 0.8)?;
    let (t0, tk, t, kappa) = (-0.4, 0.3, 1.1, 0.9);
    let dense = dense_kicked_propagator(&g, &KickSchedule::single(tk, kappa, v.clone()), t0, t)?;
    let mut worst: f64 = 0.0;
    for k1 in 0..8 {
        for k2 in 0..8 {
            let gm = kicked_green_mode(&g.momentum(k1), &g.momentum(k2), t, t0, tk, kappa, &v)?;
            for r in 0..4 {
                for col in 0..4 {
                    let want = dense.matrix()[(4 * k1 + r, 4 * k2 + col)];
                    worst = worst.max((gm.get(r, col) / g.volume() - want).norm());
                }
            }
        }
    }
    Ok(worst)
}

fn packet_1d(m: f64) -> Result<SpinorField> {
    let g = GridSpec::cubic(1, 128, 40.0, m)?;
    let pol = [c(1.0, 0.0), c(0.3, 0.1), c(0.0, -0.4), c(0.2, 0.0)];
    make_gaussian(&g, &WavepacketParams::new([1.0, 0.0, 0.0], [0.8, 0.0, 0.0], 1.5).with_polarization(pol))
}

fn drift(f: &SpinorField, inv: &InvariantOp) -> Result<f64> {
    let e0 = mean(f, inv)?;
    let mut worst: f64 = 0.0;
    for t in [1.0, 5.0, 10.0] {
        let et = mean(&evolve_free(f, t), &inv.at(t))?;
        worst = worst.max((et - e0).norm() / (1.0 + e0.norm()));
    }
    Ok(worst)
}

fn explicit_vs_conjugation() -> Result<f64> {
    let f = packet_1d(2.0)?;
    let mut worst: f64 = 0.0;
    for t in [0.3, 1.0, 4.0] {
        let conj = InvariantOp::x0d(1).at(t).apply(&f)?;
        worst = worst.max(x0d_explicit(&f, t, 1)?.value.max_abs_diff(&conj)?);
    }
    Ok(worst)
}

fn eigenvalue_constancy() -> Result<f64> {
    let g = GridSpec::cubic(1, 64, 20.0, 1.0)?;
    let k = 5;
    let mut pw = SpinorField::zeros(g, Rep::Momentum);
    pw.data_mut()[4 * k] = c(1.0, 0.0);
    pw.data_mut()[4 * k + 2] = c(0.0, 1.0);
    let p = g.p_at(0, k);
    invariant_eigen_check(&InvariantOp::p0d(1), &pw, c(p, 0.0), 3.0)
}

fn kicked_momentum() -> Result<(f64, f64)> {
    let g = GridSpec::cubic(1, 64, 30.0, 1.0)?;
    let f = make_gaussian(&g, &WavepacketParams::new([0.0; 3], [0.6, 0.0, 0.0], 1.5))?;
    let p_init = mean(&f, &Momentum(1))?.re;
    let kappa = 0.5;
    let s = KickSchedule::single(0.0, kappa, Potential::linear(g, 1, 1.0)?);
    let after = dirac_core::evolution::KickedPropagator::new(s.clone(), 0.0).propagate(&f, 1.0)?;
    let boost = (mean(&after, &Momentum(1))?.re - (p_init - kappa)).abs();
    let mut worst: f64 = 0.0;
    for t in [-1.0, 0.0, 1.0, 5.0] {
        worst = worst.max((kicked_p0_expectation(&f, &s, t)?[0] - p_init).abs());
    }
    Ok((worst, boost))
}

fn nw_nonrelativistic() -> Result<f64> {
    let m = 100.0;
    let g = GridSpec::cubic(1, 512, 80.0, m)?;
    let sigma = 3.0;
    let f = make_gaussian(&g, &WavepacketParams::new([2.0, 0.0, 0.0], [0.01 * m, 0.0, 0.0], sigma))?;
    let fp = project_positive(&f)?.normalized()?;
    let qx = mean(&fp, &NewtonWigner(1))?.re;
    let xx = mean(&fp, &Position(1))?.re;
    Ok((qx - xx).abs() / sigma)
}

/// Runs every check in a fixed order.
pub fn run_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut push = |name, value, tol| out.push(Check { name, value, tol });
    push("closed_form_vs_expm", closed_form_vs_expm()?, 1e-12);
    push("clifford_relations", clifford_relations()?, 0.0);
    push("projector_relations", projector_relations()?, 1e-12);
    push("fast_paths_vs_oracles", fast_paths_vs_oracles()?, 1e-11);
    let q = Momentum3::new([0.3, 0.2, 0.1], 0.4);
    push("ch_truncation_gap_order12", ch_truncation_gap(&q, 0.5 / q.energy(), 12, 1)?, 1e-9);
    push("kicked_kernel_vs_dense", kicked_kernel_vs_dense()?, 1e-9);
    let f = packet_1d(1.0)?;
    push("p0d_drift", drift(&f, &InvariantOp::p0d(1))?, 1e-10);
    push("x0d_drift", drift(&f, &InvariantOp::x0d(1))?, 1e-10);
    push("gamma0_drift", drift(&f, &InvariantOp::gamma0())?, 1e-10);
    push("x0d_explicit_vs_conjugation", explicit_vs_conjugation()?, 1e-8);
    push("eigenvalue_constancy", eigenvalue_constancy()?, 1e-9);
    push("maps_solutions_x0d", invariant_maps_solutions(&f, &InvariantOp::x0d(1), 2.0)?, 1e-9);
    let (kp, boost) = kicked_momentum()?;
    push("kicked_p0_constancy", kp, 1e-6);
    push("kick_boost", boost, 1e-6);
    push("nw_nonrelativistic", nw_nonrelativistic()?, 1e-4);
    let dg = dirac_green_eigen_residuals(&GridSpec::cubic(1, 8, 6.0, 1.0)?, 0.1, 1)?;
    push("dirac_green_r_x", dg.r_x, 1e-10);
    push("dirac_green_r_p", dg.r_p, 1e-10);
    let sg = green_eigen_residuals(&GridSpec::cubic(1, 256, 20.0, 1.0)?, 0.1, 1)?;
    push("schrodinger_green_r_x", sg.r_x, 1e-3);
    push("schrodinger_green_r_p", sg.r_p, 1e-2);
    Ok(out)
}

/// `check,value,tol,pass` rows.
pub fn write_csv<W: Write>(w: W, checks: &[Check]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["check", "value", "tol", "pass"])?;
    for ch in checks {
        let pass = if ch.passed() { "pass" } else { "FAIL" };
        out.write_record([ch.name, &fmt_f64(ch.value), &fmt_f64(ch.tol), pass])?;
    }
    out.flush()?;
    Ok(())
}
