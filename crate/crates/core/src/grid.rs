//! Periodic simulation box.
//!
//! Along each active axis the box holds `n` points (a power of two)
//! `x_j = -L/2 + j dx`, `dx = L/n`, `j = 0..n`. The momentum lattice is
//! `p_k = 2 pi k / L` with `k` in standard FFT order: storage index
//! `0..n/2` maps to `k = 0..n/2` and `n/2..n` to `k = -n/2..0`.
//! Flattened indices are row-major with axis 1 slowest.

use crate::clifford::Momentum3;
use crate::error::{DiracError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    ndim: usize,
    n: [usize; 3],
    length: [f64; 3],
    mass: f64,
}

impl GridSpec {
    /// Grid with the same point count and box length on every active axis.
    pub fn cubic(ndim: usize, n: usize, length: f64, mass: f64) -> Result<Self> {
        Self::new(ndim, &vec![n; ndim.max(1)], &vec![length; ndim.max(1)], mass)
    }

    pub fn new(ndim: usize, n: &[usize], length: &[f64], mass: f64) -> Result<Self> {
        if !(1..=3).contains(&ndim) {
            return Err(DiracError::Config(format!("ndim = {ndim}, must be 1..=3")));
        }
        if n.len() != ndim || length.len() != ndim {
            return Err(DiracError::Config(format!(
                "expected {ndim} axis sizes and lengths, got {} and {}",
                n.len(),
                length.len()
            )));
        }
        let mut ns = [1usize; 3];
        let mut ls = [1.0f64; 3];
        for a in 0..ndim {
            if n[a] < 2 || !n[a].is_power_of_two() {
                return Err(DiracError::Config(format!(
                    "axis {} has n = {}, must be a power of two >= 2",
                    a + 1,
                    n[a]
                )));
            }
            if !(length[a].is_finite() && length[a] > 0.0) {
                return Err(DiracError::Config(format!(
                    "axis {} has box length {}",
                    a + 1,
                    length[a]
                )));
            }
            ns[a] = n[a];
            ls[a] = length[a];
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(DiracError::Config(format!("mass = {mass}, must be >= 0")));
        }
        Ok(GridSpec {
            ndim,
            n: ns,
            length: ls,
            mass,
        })
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    /// Points along `axis` (0-based).
    pub fn n(&self, axis: usize) -> usize {
        self.n[axis]
    }

    pub fn shape(&self) -> &[usize] {
        &self.n[..self.ndim]
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.length[axis]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.length[..self.ndim]
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        Self::new(self.ndim, self.shape(), self.lengths(), mass)
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self, axis: usize) -> f64 {
        self.length[axis] / self.n[axis] as f64
    }

    pub fn dp(&self, axis: usize) -> f64 {
        2.0 * std::f64::consts::PI / self.length[axis]
    }

    /// Quadrature weight of one point in position representation.
    pub fn position_weight(&self) -> f64 {
        (0..self.ndim).map(|a| self.dx(a)).product()
    }

    /// Quadrature weight of one mode in momentum representation,
    /// `prod (dp / 2 pi) = prod 1/L`.
    pub fn momentum_weight(&self) -> f64 {
        (0..self.ndim).map(|a| 1.0 / self.length[a]).product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths().iter().product()
    }

    /// Position of point `j` along `axis`.
    pub fn x_at(&self, axis: usize, j: usize) -> f64 {
        -0.5 * self.length[axis] + j as f64 * self.dx(axis)
    }

    /// Signed lattice integer for storage index `k`.
    pub fn signed_index(&self, axis: usize, k: usize) -> i64 {
        let n = self.n[axis];
        if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// Momentum of storage index `k` along `axis`.
    pub fn p_at(&self, axis: usize, k: usize) -> f64 {
        self.signed_index(axis, k) as f64 * self.dp(axis)
    }

    /// Splits a flat index into per-axis indices.
    pub fn unflatten(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for a in (0..self.ndim).rev() {
            out[a] = idx % self.n[a];
            idx /= self.n[a];
        }
        out
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for a in 0..self.ndim {
            flat = flat * self.n[a] + idx[a];
        }
        flat
    }

    /// Position vector of flat point index `idx` (inactive axes are 0).
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let ix = self.unflatten(idx);
        let mut x = [0.0; 3];
        for a in 0..self.ndim {
            x[a] = self.x_at(a, ix[a]);
        }
        x
    }

    /// Momentum vector of flat mode index `idx` (inactive axes are 0).
    pub fn momentum(&self, idx: usize) -> [f64; 3] {
        let ix = self.unflatten(idx);
        let mut p = [0.0; 3];
        for a in 0..self.ndim {
            p[a] = self.p_at(a, ix[a]);
        }
        p
    }

    /// `Momentum3` of flat mode `idx` carrying the grid mass.
    pub fn mode(&self, idx: usize) -> Momentum3 {
        Momentum3::new(self.momentum(idx), self.mass)
    }

    /// Flat index of the lattice mode with momentum `p`, or an argument
    /// error if `p` is not on the lattice.
    pub fn mode_index(&self, p: &[f64]) -> Result<usize> {
        if p.len() < self.ndim {
            return Err(DiracError::Argument(format!(
                "momentum has {} components, grid has {} axes",
                p.len(),
                self.ndim
            )));
        }
        let mut ix = [0usize; 3];
        for a in 0..self.ndim {
            let k = p[a] / self.dp(a);
            let kr = k.round();
            let half = (self.n[a] / 2) as f64;
            if (k - kr).abs() > 1e-9 || kr < -half || kr >= half {
                return Err(DiracError::Argument(format!(
                    "momentum {} on axis {} is off the lattice",
                    p[a],
                    a + 1
                )));
            }
            let kr = kr as i64;
            ix[a] = if kr >= 0 {
                kr as usize
            } else {
                (kr + self.n[a] as i64) as usize
            };
        }
        for (a, &q) in p.iter().enumerate().skip(self.ndim) {
            if q != 0.0 {
                return Err(DiracError::Argument(format!(
                    "momentum component {} = {q} on inactive axis",
                    a + 1
                )));
            }
        }
        Ok(self.flatten(&ix))
    }

    /// Largest mode energy on the lattice.
    pub fn max_energy(&self) -> f64 {
        let pmax2: f64 = (0..self.ndim)
            .map(|a| {
                let p = (self.n[a] / 2) as f64 * self.dp(a);
                p * p
            })
            .sum();
        (pmax2 + self.mass * self.mass).sqrt()
    }

    pub fn check_axis(&self, axis: usize) -> Result<usize> {
        if axis == 0 || axis > self.ndim {
            Err(DiracError::Argument(format!(
                "axis {axis} not in 1..={}",
                self.ndim
            )))
        } else {
            Ok(axis - 1)
        }
    }

    /// Two grids are compatible when they describe the same box and mass.
    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(DiracError::Argument(format!(
                "grid mismatch: {self:?} vs {other:?}"
            )))
        }
    }
}
