//! Grid fields with `NC` complex components per point.
//!
//! Position data are samples `psi(x_j)` with quadrature weight
//! `prod dx`. Momentum data are samples of the continuum transform
//! `phi(p_k) = sum_j prod(dx) exp(-i p_k . x_j) psi(x_j)` with weight
//! `prod 1/L`, which makes the transform pair unitary: norms and inner
//! products agree in both representations.

use num_complex::Complex64;

use crate::error::{DiracError, Result};
use crate::fft::{self, Direction};
use crate::grid::GridSpec;
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rep {
    Position,
    Momentum,
}

impl Rep {
    pub fn name(self) -> &'static str {
        match self {
            Rep::Position => "position",
            Rep::Momentum => "momentum",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridField<const NC: usize> {
    grid: GridSpec,
    rep: Rep,
    data: Vec<Complex64>,
}

/// Four-component Dirac bispinor field.
pub type SpinorField = GridField<4>;
/// Single-component Schrödinger field.
pub type ScalarField = GridField<1>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl<const NC: usize> GridField<NC> {
    pub fn new(grid: GridSpec, rep: Rep, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() * NC {
            return Err(DiracError::Argument(format!(
                "field data has {} values, grid needs {}",
                data.len(),
                grid.len() * NC
            )));
        }
        Ok(GridField { grid, rep, data })
    }

    pub fn zeros(grid: GridSpec, rep: Rep) -> Self {
        GridField {
            grid,
            rep,
            data: vec![ZERO; grid.len() * NC],
        }
    }

    /// Builds a field point by point from `f(flat_index)`.
    pub fn from_fn<F>(grid: GridSpec, rep: Rep, f: F) -> Self
    where
        F: Fn(usize) -> [Complex64; NC] + Sync + Send,
    {
        let mut data = vec![ZERO; grid.len() * NC];
        par::for_each_chunk(&mut data, NC, |i, c| c.copy_from_slice(&f(i)));
        GridField { grid, rep, data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// Components at flat index `idx`.
    pub fn point(&self, idx: usize) -> &[Complex64] {
        &self.data[idx * NC..(idx + 1) * NC]
    }

    pub fn weight(&self) -> f64 {
        match self.rep {
            Rep::Position => self.grid.position_weight(),
            Rep::Momentum => self.grid.momentum_weight(),
        }
    }

    fn expect_rep(&self, rep: Rep) -> Result<()> {
        if self.rep == rep {
            Ok(())
        } else {
            Err(DiracError::Representation {
                expected: rep.name(),
                found: self.rep.name(),
            })
        }
    }

    /// Position -> momentum. Fails if the field is already in momentum
    /// representation.
    pub fn to_momentum(&self) -> Result<Self> {
        self.expect_rep(Rep::Position)?;
        Ok(self.clone().forward())
    }

    /// Momentum -> position. Fails if the field is already in position
    /// representation.
    pub fn to_position(&self) -> Result<Self> {
        self.expect_rep(Rep::Momentum)?;
        Ok(self.clone().inverse())
    }

    /// Converts to `rep`, doing nothing if already there.
    pub fn into_rep(self, rep: Rep) -> Self {
        match (self.rep, rep) {
            (Rep::Position, Rep::Momentum) => self.forward(),
            (Rep::Momentum, Rep::Position) => self.inverse(),
            _ => self,
        }
    }

    pub fn in_rep(&self, rep: Rep) -> Self {
        self.clone().into_rep(rep)
    }

    fn forward(mut self) -> Self {
        let grid = self.grid;
        fft::transform(&grid, NC, &mut self.data, Direction::Forward);
        let w = grid.position_weight();
        par::for_each_chunk(&mut self.data, NC, |i, c| {
            let s = w * fft::alternating_sign(&grid, i);
            c.iter_mut().for_each(|v| *v *= s);
        });
        self.rep = Rep::Momentum;
        self
    }

    fn inverse(mut self) -> Self {
        let grid = self.grid;
        let w = grid.momentum_weight();
        par::for_each_chunk(&mut self.data, NC, |i, c| {
            let s = w * fft::alternating_sign(&grid, i);
            c.iter_mut().for_each(|v| *v *= s);
        });
        fft::transform(&grid, NC, &mut self.data, Direction::Inverse);
        self.rep = Rep::Position;
        self
    }

    /// `<self|other>` with the representation weight; `other` is converted
    /// to this field's representation. Summation is pairwise in a fixed
    /// order.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid)?;
        let conv;
        let o = if other.rep == self.rep {
            other
        } else {
            conv = other.in_rep(self.rep);
            &conv
        };
        let terms = par::map_range(self.grid.len(), |i| {
            let a = self.point(i);
            let b = o.point(i);
            let mut acc = ZERO;
            for c in 0..NC {
                acc += a[c].conj() * b[c];
            }
            acc
        });
        Ok(par::pairwise_sum(&terms) * self.weight())
    }

    pub fn norm_sq(&self) -> f64 {
        let terms = par::map_range(self.grid.len(), |i| {
            self.point(i).iter().map(|v| v.norm_sqr()).sum::<f64>()
        });
        par::pairwise_sum(&terms) * self.weight()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(DiracError::Argument("cannot normalize a zero field".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `a * self + b * other` in this field's representation.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let o = other.in_rep(self.rep);
        let mut out = self.clone();
        out.data
            .iter_mut()
            .zip(o.data.iter())
            .for_each(|(x, y)| *x = a * *x + b * *y);
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// Largest pointwise difference in position representation.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let a = self.in_rep(Rep::Position);
        let b = other.in_rep(Rep::Position);
        Ok(a.data
            .iter()
            .zip(b.data.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.in_rep(Rep::Position)
            .data
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Applies `f(flat_index, components)` to every point in the current
    /// representation.
    pub fn map_points<F>(mut self, f: F) -> Self
    where
        F: Fn(usize, &mut [Complex64]) + Sync + Send,
    {
        par::for_each_chunk(&mut self.data, NC, f);
        self
    }

    /// Multiplication by the coordinate `x_axis` (1-based axis); the result
    /// is in position representation. In momentum representation this is
    /// the spectral derivative `i d/dp_axis`.
    pub fn apply_position(&self, axis: usize) -> Result<Self> {
        let a = self.grid.check_axis(axis)?;
        let grid = self.grid;
        Ok(self
            .in_rep(Rep::Position)
            .map_points(move |i, c| {
                let x = grid.x_at(a, grid.unflatten(i)[a]);
                c.iter_mut().for_each(|v| *v *= x);
            }))
    }

    /// `p_axis = -i d/dx_axis`, applied as a multiplier in momentum
    /// representation; the result is in momentum representation.
    pub fn apply_momentum(&self, axis: usize) -> Result<Self> {
        let a = self.grid.check_axis(axis)?;
        let grid = self.grid;
        Ok(self
            .in_rep(Rep::Momentum)
            .map_points(move |i, c| {
                let p = grid.p_at(a, grid.unflatten(i)[a]);
                c.iter_mut().for_each(|v| *v *= p);
            }))
    }

    /// Boundary amplitudes relative to the peak, in both representations.
    pub fn decay_report(&self) -> DecayReport {
        let pos = self.in_rep(Rep::Position);
        let mom = self.in_rep(Rep::Momentum);
        DecayReport {
            position_edge: edge_ratio(&pos, |n, k| k == 0 || k == n - 1),
            momentum_edge: edge_ratio(&mom, |n, k| k == n / 2 || k == n / 2 - 1),
        }
    }
}

fn edge_ratio<const NC: usize>(f: &GridField<NC>, on_edge: impl Fn(usize, usize) -> bool) -> f64 {
    let g = f.grid();
    let mut peak = 0.0f64;
    let mut edge = 0.0f64;
    for i in 0..g.len() {
        let amp = f.point(i).iter().map(|v| v.norm()).fold(0.0, f64::max);
        peak = peak.max(amp);
        let ix = g.unflatten(i);
        if (0..g.ndim()).any(|a| on_edge(g.n(a), ix[a])) {
            edge = edge.max(amp);
        }
    }
    if peak == 0.0 {
        0.0
    } else {
        edge / peak
    }
}

/// Amplitude on the outermost grid planes relative to the peak. Operators
/// that are not periodic on the box (`x`, `i d/dp`) are only meaningful
/// when both ratios are negligible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayReport {
    pub position_edge: f64,
    pub momentum_edge: f64,
}

/// Relative edge amplitude above which a decay warning is raised.
pub const DECAY_TOLERANCE: f64 = 1e-10;

impl DecayReport {
    pub fn is_decaying(&self) -> bool {
        self.position_edge < DECAY_TOLERANCE && self.momentum_edge < DECAY_TOLERANCE
    }

    pub fn worst(&self) -> f64 {
        self.position_edge.max(self.momentum_edge)
    }
}

/// A value together with the boundary-decay state of the field it was
/// computed from.
#[derive(Clone, Debug)]
pub struct Guarded<T> {
    pub value: T,
    pub decay: DecayReport,
}

impl<T> Guarded<T> {
    pub fn flagged(&self) -> bool {
        !self.decay.is_decaying()
    }
}

/// Runs the decay guard on `f`, logging a warning if it fails.
pub fn guard<const NC: usize>(f: &GridField<NC>, what: &str) -> DecayReport {
    let report = f.decay_report();
    if !report.is_decaying() {
        log::warn!(
            "{what}: field not boundary-decaying (position edge {:.2e}, momentum edge {:.2e})",
            report.position_edge,
            report.momentum_edge
        );
    }
    report
}

/// Gaussian wavepacket parameters. `width` is the rms width of
/// `|psi|^2` along each axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WavepacketParams {
    pub center: [f64; 3],
    pub momentum: [f64; 3],
    pub width: f64,
    pub polarization: [Complex64; 4],
}

impl WavepacketParams {
    pub fn new(center: [f64; 3], momentum: [f64; 3], width: f64) -> Self {
        WavepacketParams {
            center,
            momentum,
            width,
            polarization: [
                Complex64::new(1.0, 0.0),
                ZERO,
                ZERO,
                ZERO,
            ],
        }
    }

    pub fn with_polarization(mut self, pol: [Complex64; 4]) -> Self {
        self.polarization = pol;
        self
    }
}

/// Narrowest packet, in grid spacings, accepted by the constructors.
pub const MIN_WIDTH_SPACINGS: f64 = 1.5;

/// Validates the width window `[MIN_WIDTH_SPACINGS dx, L/8]`.
pub fn check_width(grid: &GridSpec, width: f64) -> Result<()> {
    let dx = (0..grid.ndim()).map(|a| grid.dx(a)).fold(0.0, f64::max);
    let lmin = grid.lengths().iter().cloned().fold(f64::INFINITY, f64::min);
    if !(width >= MIN_WIDTH_SPACINGS * dx && width <= lmin / 8.0) {
        return Err(DiracError::Config(format!(
            "packet width {width} outside [{:.4}, {:.4}]",
            MIN_WIDTH_SPACINGS * dx,
            lmin / 8.0
        )));
    }
    Ok(())
}

/// Normalized scalar Gaussian envelope times plane wave.
fn gaussian_amplitudes(grid: &GridSpec, center: [f64; 3], momentum: [f64; 3], width: f64) -> Vec<Complex64> {
    let ndim = grid.ndim();
    let g = *grid;
    let raw = par::map_range(grid.len(), move |i| {
        let x = g.position(i);
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for a in 0..ndim {
            let d = x[a] - center[a];
            r2 += d * d;
            phase += momentum[a] * d;
        }
        Complex64::from_polar((-r2 / (4.0 * width * width)).exp(), phase)
    });
    let norm_terms: Vec<f64> = raw.iter().map(|v| v.norm_sqr()).collect();
    let norm = (par::pairwise_sum(&norm_terms) * grid.position_weight()).sqrt();
    raw.into_iter().map(|v| v / norm).collect()
}

/// Normalized Gaussian spinor packet `envelope x plane wave x polarization`.
pub fn make_gaussian(grid: &GridSpec, params: &WavepacketParams) -> Result<SpinorField> {
    check_width(grid, params.width)?;
    let pn: f64 = params.polarization.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if pn == 0.0 || !pn.is_finite() {
        return Err(DiracError::Config("polarization must be a nonzero spinor".into()));
    }
    let pol = params.polarization.map(|v| v / pn);
    let amps = gaussian_amplitudes(grid, params.center, params.momentum, params.width);
    Ok(SpinorField::from_fn(*grid, Rep::Position, |i| pol.map(|w| w * amps[i])))
}

/// Normalized scalar Gaussian packet.
pub fn make_gaussian_scalar(grid: &GridSpec, params: &WavepacketParams) -> Result<ScalarField> {
    check_width(grid, params.width)?;
    let amps = gaussian_amplitudes(grid, params.center, params.momentum, params.width);
    ScalarField::new(*grid, Rep::Position, amps)
}
