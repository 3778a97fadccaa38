//! Free and delta-kicked propagation.
//!
//! Free evolution is exact per momentum mode. A kick
//! `V(x, t) = kappa V(x) delta(t - t')` contributes the instantaneous
//! factor `exp(-i kappa V(x))`, proportional to the 4x4 identity, so the
//! propagator across one kick factorizes as
//! `U_f(t_f - t') exp(-i kappa V) U_f(t' - t_in)`. Several kicks are
//! handled as the ordered product of such factors (an extension of the
//! single-kick model).
//!
//! Ordering at coincident times: a kick at the start time is applied after
//! zero free evolution, a kick at the end time is applied last, and the
//! state at a kick instant is the post-kick state.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::clifford::{self, SpinorMatrix};
use crate::error::{DiracError, Result};
use crate::field::{Rep, SpinorField};
use crate::grid::GridSpec;
use crate::ops::apply_mode_matrices;
use crate::par;

/// Real potential sampled on the position grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Potential {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(DiracError::Argument(format!(
                "potential has {} samples, grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DiracError::Argument("potential has non-finite samples".into()));
        }
        Ok(Potential { grid, values })
    }

    /// Accepts complex samples but rejects any nonzero imaginary part.
    pub fn from_complex(grid: GridSpec, values: &[Complex64]) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| v.im != 0.0) {
            return Err(DiracError::Argument(format!(
                "potential must be real; sample {i} is {v}"
            )));
        }
        Self::new(grid, values.iter().map(|v| v.re).collect())
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64 + Sync + Send) -> Result<Self> {
        let values = par::map_range(grid.len(), |i| f(grid.position(i)));
        Self::new(grid, values)
    }

    pub fn constant(grid: GridSpec, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    /// `slope * x_axis`.
    pub fn linear(grid: GridSpec, axis: usize, slope: f64) -> Result<Self> {
        let a = grid.check_axis(axis)?;
        Self::from_fn(grid, move |x| slope * x[a])
    }

    /// `height * exp(-|x - center|^2 / (2 width^2))`.
    pub fn gaussian_bump(grid: GridSpec, center: [f64; 3], height: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(DiracError::Argument(format!("bump width {width} must be > 0")));
        }
        let nd = grid.ndim();
        Self::from_fn(grid, move |x| {
            let r2: f64 = (0..nd).map(|a| (x[a] - center[a]).powi(2)).sum();
            height * (-r2 / (2.0 * width * width)).exp()
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kick {
    pub time: f64,
    pub kappa: f64,
    pub potential: Potential,
}

/// Kicks in strictly increasing time order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KickSchedule {
    kicks: Vec<Kick>,
}

impl KickSchedule {
    pub fn new(kicks: Vec<Kick>) -> Result<Self> {
        for w in kicks.windows(2) {
            if !(w[1].time > w[0].time) {
                return Err(DiracError::Schedule(format!(
                    "kick times must be strictly increasing ({} then {})",
                    w[0].time, w[1].time
                )));
            }
        }
        if let Some(k) = kicks.iter().find(|k| !k.time.is_finite() || !k.kappa.is_finite()) {
            return Err(DiracError::Schedule(format!("non-finite kick {k:?}")));
        }
        Ok(KickSchedule { kicks })
    }

    pub fn empty() -> Self {
        KickSchedule { kicks: Vec::new() }
    }

    pub fn single(time: f64, kappa: f64, potential: Potential) -> Self {
        KickSchedule {
            kicks: vec![Kick {
                time,
                kappa,
                potential,
            }],
        }
    }

    pub fn kicks(&self) -> &[Kick] {
        &self.kicks
    }

    pub fn is_empty(&self) -> bool {
        self.kicks.is_empty()
    }

    pub fn check_within(&self, t0: f64, t1: f64) -> Result<()> {
        match self.kicks.iter().find(|k| k.time < t0 || k.time > t1) {
            Some(k) => Err(DiracError::Schedule(format!(
                "kick at t = {} outside [{t0}, {t1}]",
                k.time
            ))),
            None => Ok(()),
        }
    }
}

/// Exact free evolution by `t`; the result is in momentum representation.
pub fn evolve_free(f: &SpinorField, t: f64) -> SpinorField {
    if t == 0.0 {
        return f.in_rep(Rep::Momentum);
    }
    apply_mode_matrices(f, move |q| clifford::propagator(q, t))
}

/// Multiplies every component by `exp(-i kappa V(x))`; the result is in
/// position representation.
pub fn apply_kick(f: &SpinorField, kappa: f64, v: &Potential) -> Result<SpinorField> {
    f.grid().ensure_same(&v.grid)?;
    let vals = &v.values;
    Ok(f.in_rep(Rep::Position).map_points(move |i, c| {
        let phase = Complex64::from_polar(1.0, -kappa * vals[i]);
        c.iter_mut().for_each(|z| *z *= phase);
    }))
}

/// Evolves `f` from `t0` to `t1 > t0` through the kicks of `schedule`.
pub fn evolve_kicked(f: &SpinorField, schedule: &KickSchedule, t0: f64, t1: f64) -> Result<SpinorField> {
    if !(t1 > t0) {
        return Err(DiracError::Argument(format!("need t0 < t1, got {t0} and {t1}")));
    }
    schedule.check_within(t0, t1)?;
    KickedPropagator::new(schedule.clone(), t0).propagate(f, t1)
}

/// A unitary evolution referenced to a fixed initial time.
pub trait Propagator: Send + Sync {
    /// Maps the state at the reference time to the state at `t`.
    fn propagate(&self, f: &SpinorField, t: f64) -> Result<SpinorField>;

    /// Maps the state at `t` back to the reference time.
    fn unpropagate(&self, f: &SpinorField, t: f64) -> Result<SpinorField>;

    fn reference_time(&self) -> f64;
}

/// Free evolution referenced to `t = 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FreePropagator;

impl Propagator for FreePropagator {
    fn propagate(&self, f: &SpinorField, t: f64) -> Result<SpinorField> {
        Ok(evolve_free(f, t))
    }
    fn unpropagate(&self, f: &SpinorField, t: f64) -> Result<SpinorField> {
        Ok(evolve_free(f, -t))
    }
    fn reference_time(&self) -> f64 {
        0.0
    }
}

/// Free evolution interrupted by delta kicks, referenced to `t_ref`.
///
/// The state at `t_ref` is the pre-kick state for a kick at exactly
/// `t_ref`. Forward in time, kicks with `t_ref <= t_k <= t` act; backward,
/// the kicks with `t < t_k < t_ref` are undone.
#[derive(Clone, Debug)]
pub struct KickedPropagator {
    schedule: KickSchedule,
    t_ref: f64,
}

impl KickedPropagator {
    pub fn new(schedule: KickSchedule, t_ref: f64) -> Self {
        KickedPropagator { schedule, t_ref }
    }

    pub fn schedule(&self) -> &KickSchedule {
        &self.schedule
    }
}

impl Propagator for KickedPropagator {
    fn propagate(&self, f: &SpinorField, t: f64) -> Result<SpinorField> {
        let mut g = f.clone();
        let mut now = self.t_ref;
        if t >= self.t_ref {
            for k in self.schedule.kicks.iter().filter(|k| k.time >= self.t_ref && k.time <= t) {
                g = evolve_free(&g, k.time - now);
                g = apply_kick(&g, k.kappa, &k.potential)?;
                now = k.time;
            }
        } else {
            for k in self.schedule.kicks.iter().rev().filter(|k| k.time > t && k.time < self.t_ref) {
                g = evolve_free(&g, k.time - now);
                g = apply_kick(&g, -k.kappa, &k.potential)?;
                now = k.time;
            }
        }
        Ok(evolve_free(&g, t - now))
    }

    fn unpropagate(&self, f: &SpinorField, t: f64) -> Result<SpinorField> {
        let mut g = f.clone();
        let mut now = t;
        if t >= self.t_ref {
            for k in self.schedule.kicks.iter().rev().filter(|k| k.time >= self.t_ref && k.time <= t) {
                g = evolve_free(&g, k.time - now);
                g = apply_kick(&g, -k.kappa, &k.potential)?;
                now = k.time;
            }
        } else {
            for k in self.schedule.kicks.iter().filter(|k| k.time > t && k.time < self.t_ref) {
                g = evolve_free(&g, k.time - now);
                g = apply_kick(&g, k.kappa, &k.potential)?;
                now = k.time;
            }
        }
        Ok(evolve_free(&g, self.t_ref - now))
    }

    fn reference_time(&self) -> f64 {
        self.t_ref
    }
}

/// Momentum kernel of the kick factor,
/// `sum_j prod(dx) exp(-i (p1 - p2) . x_j - i kappa V(x_j))`.
///
/// Divided by the box volume this is the matrix element
/// `<p1| exp(-i kappa V) |p2>` in the unitary momentum basis, so it agrees
/// with [`apply_kick`] exactly on the lattice. `kappa = 0` gives
/// `volume * delta(p1, p2)`.
pub fn kick_kernel_momentum(kappa: f64, v: &Potential, p1: &[f64], p2: &[f64]) -> Result<Complex64> {
    let grid = v.grid;
    let i1 = grid.mode_index(p1)?;
    let i2 = grid.mode_index(p2)?;
    Ok(kick_kernel_by_index(kappa, v, i1, i2))
}

fn kick_kernel_by_index(kappa: f64, v: &Potential, i1: usize, i2: usize) -> Complex64 {
    let grid = v.grid;
    let k1 = grid.unflatten(i1);
    let k2 = grid.unflatten(i2);
    let nd = grid.ndim();
    // exact integer phases: (p1 - p2) . x_j = 2 pi sum_a dk_a (j_a / n_a - 1/2)
    let terms = par::map_range(grid.len(), |j| {
        let ix = grid.unflatten(j);
        let mut turns = 0.0;
        for a in 0..nd {
            let dk = grid.signed_index(a, k1[a]) - grid.signed_index(a, k2[a]);
            let n = grid.n(a) as i64;
            let num = (dk * (2 * ix[a] as i64 - n)).rem_euclid(2 * n);
            turns += num as f64 / (2 * n) as f64;
        }
        Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * turns - kappa * v.values[j])
    });
    par::pairwise_sum(&terms) * grid.position_weight()
}

/// Largest grid for which dense kernels are assembled.
pub const DENSE_KERNEL_CAP: usize = 4096;

/// Full kernel matrix over all lattice modes (flat mode order).
pub fn kick_kernel_matrix(kappa: f64, v: &Potential) -> Result<DMatrix<Complex64>> {
    let n = v.grid.len();
    if n > DENSE_KERNEL_CAP {
        return Err(DiracError::Size {
            size: n,
            cap: DENSE_KERNEL_CAP,
        });
    }
    let entries = par::map_range(n * n, |idx| kick_kernel_by_index(kappa, v, idx / n, idx % n));
    Ok(DMatrix::from_row_slice(n, n, &entries))
}

/// Momentum-space Green function across one kick at `t_kick`:
/// `K(p1, p2) U(p1, t - t_kick) U(p2, t_kick - t0)`, with `K` from
/// [`kick_kernel_momentum`].
#[allow(clippy::too_many_arguments)]
pub fn kicked_green_mode(
    p1: &[f64],
    p2: &[f64],
    t: f64,
    t0: f64,
    t_kick: f64,
    kappa: f64,
    v: &Potential,
) -> Result<SpinorMatrix> {
    if !(t0 <= t_kick && t_kick <= t) {
        return Err(DiracError::Schedule(format!(
            "need t0 <= t' <= t, got t0 = {t0}, t' = {t_kick}, t = {t}"
        )));
    }
    let grid = v.grid;
    let k = kick_kernel_momentum(kappa, v, p1, p2)?;
    let q1 = grid.mode(grid.mode_index(p1)?);
    let q2 = grid.mode(grid.mode_index(p2)?);
    let u = clifford::propagator(&q1, t - t_kick) * clifford::propagator(&q2, t_kick - t0);
    Ok(u.scale(k))
}
