//! Free Schrödinger particle: exact spectral evolution, the initial
//! position invariant `x0(t) = x - (t/m) p`, and the propagator
//! eigen-equations used as a nonrelativistic reference.

use num_complex::Complex64;

use crate::error::{DiracError, Result};
use crate::evolution::evolve_free;
use crate::field::{guard, Guarded, Rep, ScalarField, SpinorField};
use crate::grid::GridSpec;
use crate::par;

fn mass_of(grid: &GridSpec) -> Result<f64> {
    let m = grid.mass();
    if m > 0.0 {
        Ok(m)
    } else {
        Err(DiracError::Argument("Schrödinger evolution needs m > 0".into()))
    }
}

/// `exp(-i t p^2 / 2m) f`; result in momentum representation.
pub fn evolve_schrodinger(f: &ScalarField, t: f64) -> Result<ScalarField> {
    let grid = *f.grid();
    let m = mass_of(&grid)?;
    Ok(f.in_rep(Rep::Momentum).map_points(move |i, c| {
        let p2 = grid.mode(i).p_squared();
        c[0] *= Complex64::from_polar(1.0, -t * p2 / (2.0 * m));
    }))
}

/// `x0(t)_axis f = x f - (t/m) p f`, in position representation.
pub fn x0_invariant(f: &ScalarField, t: f64, axis: usize) -> Result<Guarded<ScalarField>> {
    let m = mass_of(f.grid())?;
    let decay = guard(f, "x0_invariant");
    let x = f.apply_position(axis)?;
    let p = f.apply_momentum(axis)?;
    Ok(Guarded {
        value: x.combine(Complex64::new(1.0, 0.0), &p, Complex64::new(-t / m, 0.0))?,
        decay,
    })
}

/// `p0(t) = p`, in momentum representation.
pub fn p0_invariant(f: &ScalarField, axis: usize) -> Result<ScalarField> {
    f.apply_momentum(axis)
}

/// Mean and variance of `x_axis` under `|f|^2`.
pub fn position_moments(f: &ScalarField, axis: usize) -> Result<(f64, f64)> {
    let grid = *f.grid();
    let a = grid.check_axis(axis)?;
    let pos = f.in_rep(Rep::Position);
    let w = par::map_range(grid.len(), |i| pos.point(i)[0].norm_sqr());
    let x = par::map_range(grid.len(), |i| w[i] * grid.x_at(a, grid.unflatten(i)[a]));
    let x2 = par::map_range(grid.len(), |i| {
        let xi = grid.x_at(a, grid.unflatten(i)[a]);
        w[i] * xi * xi
    });
    let n = par::pairwise_sum(&w);
    let mean = par::pairwise_sum(&x) / n;
    Ok((mean, par::pairwise_sum(&x2) / n - mean * mean))
}

/// Relative residuals of the propagator eigen-equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenResiduals {
    /// `x0(t) G = x' G`.
    pub r_x: f64,
    /// `p0(t) G = i dG/dx'`.
    pub r_p: f64,
}

/// Source smoothing as a fraction of the box along the tested axis.
pub const GREEN_SOURCE_WIDTH: f64 = 1.0 / 32.0;
/// Source position as a fraction of the box.
pub const GREEN_SOURCE_CENTER: f64 = 1.0 / 8.0;

/// Normalized Gaussian of rms width `s` centred at `c` along `axis` (and
/// at the origin along the others).
fn nascent_delta(grid: &GridSpec, a: usize, c: f64, s: f64) -> ScalarField {
    let g = *grid;
    ScalarField::from_fn(g, Rep::Position, move |i| {
        let x = g.position(i);
        let mut v = 1.0;
        for (b, xb) in x.iter().enumerate().take(g.ndim()) {
            let d = if b == a { xb - c } else { *xb };
            v *= (-d * d / (2.0 * s * s)).exp() / ((2.0 * std::f64::consts::PI).sqrt() * s);
        }
        [Complex64::new(v, 0.0)]
    })
}

/// Propagator eigen-equation residuals along `axis`.
///
/// A single-point delta has the full lattice bandwidth, and its propagator
/// column never resolves the `x'` derivative: the neighbour-column
/// difference misses by O(1) at every resolution. The columns here are
/// therefore smeared over `x'` with a Gaussian of fixed physical width
/// `L * GREEN_SOURCE_WIDTH`, i.e. `G_c = U(t) delta_s(. - c)`. Then
///
/// * `r_x = |x0(t) G_c - U(t) (x delta_s)| / |U(t)(x delta_s)|`, the
///   smeared form of `x0(t) G = x' G`; exact up to roundoff;
/// * `r_p = |p G_c - i (G_{c+h} - G_{c-h}) / 2h| / |p G_c|` with
///   `h = dx`, the `x'`-derivative by central differences; this falls as
///   `dx^2` under refinement.
pub fn green_eigen_residuals(grid: &GridSpec, t: f64, axis: usize) -> Result<GreenResiduals> {
    mass_of(grid)?;
    let a = grid.check_axis(axis)?;
    if t == 0.0 {
        return Err(DiracError::Degenerate("propagator at t = 0 is the identity kernel".into()));
    }
    let len = grid.length(a);
    let s = len * GREEN_SOURCE_WIDTH;
    let c = len * GREEN_SOURCE_CENTER;
    let h = grid.dx(a);

    let src = nascent_delta(grid, a, c, s);
    let g = evolve_schrodinger(&src, t)?;
    let lhs = x0_invariant(&g, t, axis)?.value;
    let rhs = evolve_schrodinger(&src.apply_position(axis)?, t)?;
    let r_x = lhs.sub(&rhs)?.norm() / rhs.norm();

    let plus = evolve_schrodinger(&nascent_delta(grid, a, c + h, s), t)?;
    let minus = evolve_schrodinger(&nascent_delta(grid, a, c - h, s), t)?;
    let fd = plus.combine(
        Complex64::new(0.0, 1.0 / (2.0 * h)),
        &minus,
        Complex64::new(0.0, -1.0 / (2.0 * h)),
    )?;
    let pg = g.apply_momentum(axis)?;
    let r_p = pg.sub(&fd)?.norm() / pg.norm();
    Ok(GreenResiduals { r_x, r_p })
}

/// `|<psi_S(t) | e^{imt} psi_D,upper(t)>|` for a Dirac spinor whose first
/// component is the normalized profile `f` at `t = 0`, relative to the
/// norms of both fields.
pub fn nonrelativistic_overlap(f: &ScalarField, t: f64) -> Result<f64> {
    let grid = *f.grid();
    let m = mass_of(&grid)?;
    let fp = f.in_rep(Rep::Position);
    let dirac = SpinorField::from_fn(grid, Rep::Position, |i| {
        let z = Complex64::new(0.0, 0.0);
        [fp.point(i)[0], z, z, z]
    });
    let dt = evolve_free(&dirac, t);
    let phase = Complex64::from_polar(1.0, m * t);
    let upper = ScalarField::from_fn(grid, Rep::Momentum, |i| [dt.point(i)[0] * phase]);
    let s = evolve_schrodinger(f, t)?;
    Ok(s.inner(&upper)?.norm() / (s.norm() * upper.norm()))
}
