//! Dense brute-force counterparts of the fast paths, for verification on
//! tiny grids only.
//!
//! Spinor operators are `4N x 4N` matrices over the momentum basis with
//! index `4 k + c` (mode `k`, spinor component `c`), the same ordering as
//! the momentum-representation field storage. The DFT matrices are built
//! element by element, independently of the FFT path.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::clifford::{self, Momentum3, SpinorMatrix};
use crate::error::{DiracError, Result};
use crate::evolution::{KickSchedule, Potential};
use crate::field::{Rep, SpinorField};
use crate::grid::GridSpec;
use crate::invariants::x0d_explicit;

pub type CMatrix = DMatrix<Complex64>;

/// Largest dense dimension accepted.
pub const DENSE_CAP: usize = 1024;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_cap(size: usize) -> Result<()> {
    if size > DENSE_CAP {
        Err(DiracError::Size { size, cap: DENSE_CAP })
    } else {
        Ok(())
    }
}

/// Square complex matrix with an enforced size cap.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    matrix: CMatrix,
}

impl DenseOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(DiracError::Argument(format!(
                "dense operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_cap(matrix.nrows())?;
        Ok(DenseOperator { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(DiracError::Argument("dense operator sizes differ".into()));
        }
        Ok(DenseOperator {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs(&(&self.matrix - self.matrix.adjoint())) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let n = self.dim();
        max_abs(&(self.matrix.adjoint() * &self.matrix - CMatrix::identity(n, n))) <= tol
    }

    /// Eigenvalues, ascending; fails unless Hermitian to `1e-12`.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian(1e-12) {
            return Err(DiracError::Argument("operator is not Hermitian".into()));
        }
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    /// Applies the operator to a field's momentum-basis vector.
    pub fn apply(&self, f: &SpinorField) -> Result<SpinorField> {
        let v = field_vector(f);
        if v.len() != self.dim() {
            return Err(DiracError::Argument("field size does not match operator".into()));
        }
        SpinorField::new(*f.grid(), Rep::Momentum, (&self.matrix * v).iter().copied().collect())
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Momentum-representation samples of a field as one column.
pub fn field_vector(f: &SpinorField) -> DVector<Complex64> {
    DVector::from_vec(f.in_rep(Rep::Momentum).into_data())
}

/// `M (x) E_4`: lifts a scalar `N x N` matrix to spinor fields.
pub fn spin_lift(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    CMatrix::from_fn(4 * n, 4 * n, |r, c| if r % 4 == c % 4 { m[(r / 4, c / 4)] } else { ZERO })
}

fn block_diagonal(grid: &GridSpec, f: impl Fn(&Momentum3) -> SpinorMatrix) -> Result<DenseOperator> {
    let n = grid.len();
    check_cap(4 * n)?;
    let mut m = CMatrix::zeros(4 * n, 4 * n);
    for k in 0..n {
        let b = f(&grid.mode(k));
        for r in 0..4 {
            for c in 0..4 {
                m[(4 * k + r, 4 * k + c)] = b.get(r, c);
            }
        }
    }
    DenseOperator::new(m)
}

/// `H_D` assembled mode by mode in the momentum basis.
pub fn dense_hamiltonian(grid: &GridSpec) -> Result<DenseOperator> {
    block_diagonal(grid, clifford::dirac_h_mode)
}

/// `p_axis` in the momentum basis.
pub fn dense_momentum(grid: &GridSpec, axis: usize) -> Result<DenseOperator> {
    let a = grid.check_axis(axis)?;
    block_diagonal(grid, |q| SpinorMatrix::identity().scale_re(q.p[a]))
}

/// Position samples to momentum samples: `F[k][j] = dx^d exp(-i p_k . x_j)`.
pub fn dft_matrix(grid: &GridSpec) -> Result<CMatrix> {
    let n = grid.len();
    check_cap(n)?;
    let w = grid.position_weight();
    Ok(CMatrix::from_fn(n, n, |k, j| {
        let p = grid.momentum(k);
        let x = grid.position(j);
        let ph: f64 = (0..grid.ndim()).map(|a| p[a] * x[a]).sum();
        Complex64::from_polar(w, -ph)
    }))
}

/// Inverse of [`dft_matrix`]: `(1/L)^d exp(+i p_k . x_j)`.
pub fn idft_matrix(grid: &GridSpec) -> Result<CMatrix> {
    let n = grid.len();
    check_cap(n)?;
    let w = grid.momentum_weight();
    Ok(CMatrix::from_fn(n, n, |j, k| {
        let p = grid.momentum(k);
        let x = grid.position(j);
        let ph: f64 = (0..grid.ndim()).map(|a| p[a] * x[a]).sum();
        Complex64::from_polar(w, ph)
    }))
}

/// Multiplication by a position-space function, in the momentum basis.
pub fn dense_multiplier(grid: &GridSpec, f: impl Fn(usize) -> Complex64) -> Result<DenseOperator> {
    check_cap(4 * grid.len())?;
    let fwd = dft_matrix(grid)?;
    let inv = idft_matrix(grid)?;
    let d = CMatrix::from_diagonal(&DVector::from_fn(grid.len(), |j, _| f(j)));
    DenseOperator::new(spin_lift(&(fwd * d * inv)))
}

/// `x_axis` in the momentum basis.
pub fn dense_position(grid: &GridSpec, axis: usize) -> Result<DenseOperator> {
    let a = grid.check_axis(axis)?;
    dense_multiplier(grid, |j| Complex64::new(grid.position(j)[a], 0.0))
}

/// `exp(s A)` by Taylor series with scaling and squaring.
pub fn dense_expm(a: &DenseOperator, s: Complex64) -> Result<DenseOperator> {
    DenseOperator::new(expm(&(a.matrix() * s)))
}

/// `exp(A)` to about `1e-15` relative: scale by `2^-j` until the 1-norm is
/// at most 1/2, sum the Taylor series until terms vanish, square back.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|c| a.column(c).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut j = 0;
    while norm1 / 2f64.powi(j) > 0.5 {
        j += 1;
    }
    let b = a * Complex64::new(2f64.powi(-j), 0.0);
    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..40 {
        term = &term * &b * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
        if max_abs(&term) < 1e-18 * max_abs(&sum) {
            break;
        }
    }
    for _ in 0..j {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(-i t H_D)` without the closed form.
pub fn dense_free_propagator(grid: &GridSpec, t: f64) -> Result<DenseOperator> {
    dense_expm(&dense_hamiltonian(grid)?, Complex64::new(0.0, -t))
}

/// `exp(-i kappa V)` in the momentum basis.
pub fn dense_kick(kappa: f64, v: &Potential) -> Result<DenseOperator> {
    let vals = v.values();
    dense_multiplier(v.grid(), |j| Complex64::from_polar(1.0, -kappa * vals[j]))
}

/// Kicked propagator from `t0` to `t1` as a product of dense factors.
pub fn dense_kicked_propagator(grid: &GridSpec, schedule: &KickSchedule, t0: f64, t1: f64) -> Result<DenseOperator> {
    schedule.check_within(t0, t1)?;
    let h = dense_hamiltonian(grid)?;
    let mut u = DenseOperator::new(CMatrix::identity(4 * grid.len(), 4 * grid.len()))?;
    let mut now = t0;
    for k in schedule.kicks() {
        let free = dense_expm(&h, Complex64::new(0.0, -(k.time - now)))?;
        u = dense_kick(k.kappa, &k.potential)?.mul(&free.mul(&u)?)?;
        now = k.time;
    }
    dense_expm(&h, Complex64::new(0.0, -(t1 - now)))?.mul(&u)
}

/// Kicked propagator with the delta replaced by a rectangle of height
/// `kappa / width` on `[t_kick, t_kick + width]`.
pub fn dense_rectangle_kick_propagator(
    grid: &GridSpec,
    kappa: f64,
    v: &Potential,
    t_kick: f64,
    width: f64,
    t0: f64,
    t1: f64,
) -> Result<DenseOperator> {
    if !(width > 0.0 && t0 <= t_kick && t_kick + width <= t1) {
        return Err(DiracError::Schedule("rectangle must lie within [t0, t1]".into()));
    }
    let h = dense_hamiltonian(grid)?;
    let vals = v.values();
    let vd = dense_multiplier(grid, |j| Complex64::new(vals[j], 0.0))?;
    let hk = DenseOperator::new(h.matrix() + vd.matrix() * Complex64::new(kappa / width, 0.0))?;
    let before = dense_expm(&h, Complex64::new(0.0, -(t_kick - t0)))?;
    let during = dense_expm(&hk, Complex64::new(0.0, -width))?;
    let after = dense_expm(&h, Complex64::new(0.0, -(t1 - t_kick - width)))?;
    after.mul(&during.mul(&before)?)
}

// ---------------------------------------------------------------------------
// Campbell-Hausdorff series at the mode level

/// Partial sums of `e^B x e^-B - x = sum_k ad_B^(k-1)([B, x]) / k!` with
/// `B = -i t H(p)`. Only the matrix part survives: `[B, x_i] = -t alpha_i`.
pub fn ch_series(q: &Momentum3, t: f64, order: usize, axis: usize) -> Result<SpinorMatrix> {
    if !(1..=12).contains(&order) {
        return Err(DiracError::Argument(format!("series order {order} not in 1..=12")));
    }
    let b = clifford::dirac_h_mode(q).scale(Complex64::new(0.0, -t));
    let mut term = clifford::alpha(axis)?.scale_re(-t);
    let mut sum = term;
    let mut fact = 1.0;
    for k in 2..=order {
        fact *= k as f64;
        term = b.commutator(&term);
        sum += term.scale_re(1.0 / fact);
    }
    Ok(sum)
}

/// `i U(t) dU(t)^dagger/dp_axis`, the exact matrix part of `U x U^-1 - x`.
pub fn ch_exact(q: &Momentum3, t: f64, axis: usize) -> Result<SpinorMatrix> {
    let a = axis.checked_sub(1).filter(|a| *a < 3).ok_or_else(|| {
        DiracError::Argument(format!("axis {axis} not in 1..=3"))
    })?;
    let alpha = clifford::alpha(axis)?;
    let eps = q.energy();
    let i = Complex64::new(0.0, 1.0);
    let du_dag = if eps == 0.0 {
        alpha.scale(i * t)
    } else {
        let (s, c) = (eps * t).sin_cos();
        let pi = q.p[a];
        let h = clifford::dirac_h_mode(q);
        SpinorMatrix::identity().scale_re(-t * s * pi / eps)
            + h.scale(i * ((t * eps * c - s) * pi / eps.powi(3)))
            + alpha.scale(i * (s / eps))
    };
    Ok((clifford::propagator(q, t) * du_dag).scale(i))
}

/// Max-entry gap between the truncated series and the exact conjugation.
pub fn ch_truncation_gap(q: &Momentum3, t: f64, order: usize, axis: usize) -> Result<f64> {
    Ok(ch_series(q, t, order, axis)?.max_abs_diff(&ch_exact(q, t, axis)?))
}

// ---------------------------------------------------------------------------
// Green-function eigen-equations for the Dirac propagator

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracGreenResiduals {
    /// `x0D(t) G = x' G`, with `x0D` from the explicit blocks.
    pub r_x: f64,
    /// `p G = i dG/dx'`, with the `x'`-derivative as the exact lattice
    /// momentum matrix acting on the second index.
    pub r_p: f64,
    /// As `r_p` but with a neighbour-column central difference. Reported
    /// only: a single-point source is broadband and this does not converge.
    pub r_p_difference: f64,
}

/// Residuals of the Green-function eigen-equations along `axis`, with the
/// Green matrix `G(x, x')` built column by column from the dense
/// propagator.
pub fn dirac_green_eigen_residuals(grid: &GridSpec, t: f64, axis: usize) -> Result<DiracGreenResiduals> {
    let a = grid.check_axis(axis)?;
    if t == 0.0 {
        return Err(DiracError::Degenerate("propagator at t = 0 is the identity kernel".into()));
    }
    let n = grid.len();
    check_cap(4 * n)?;
    let fwd = spin_lift(&dft_matrix(grid)?);
    let inv = spin_lift(&idft_matrix(grid)?);
    let u = dense_free_propagator(grid, t)?;
    // position basis, index 4 j + c
    let g = &inv * u.matrix() * &fwd;

    let column = |col: usize| -> Result<SpinorField> {
        SpinorField::new(*grid, Rep::Position, g.column(col).iter().copied().collect())
    };

    let (mut num_x, mut den_x) = (0.0, 0.0);
    let mut pg = CMatrix::zeros(4 * n, 4 * n);
    for col in 0..4 * n {
        let f = column(col)?;
        let xprime = grid.position(col / 4)[a];
        let lhs = x0d_explicit(&f, t, axis)?.value.into_rep(Rep::Position);
        let rhs = f.scaled(Complex64::new(xprime, 0.0));
        num_x += lhs.sub(&rhs)?.norm_sq();
        den_x += rhs.norm_sq();
        let p = f.apply_momentum(axis)?.into_rep(Rep::Position);
        for (r, v) in p.data().iter().enumerate() {
            pg[(r, col)] = *v;
        }
    }

    // <x''| p |x'> in the position basis
    let p_pos = &inv * dense_momentum(grid, axis)?.matrix() * &fwd;
    // i dG(x, x')/dx' = sum_x'' G(x, x'') <x''| p |x'>
    let rhs_p = &g * &p_pos;
    let r_p = frob(&(&pg - &rhs_p)) / frob(&pg);

    let mut fd = CMatrix::zeros(4 * n, 4 * n);
    let h = grid.dx(a);
    for col in 0..4 * n {
        let ix = grid.unflatten(col / 4);
        let shifted = |d: isize| {
            let mut j = ix;
            j[a] = (ix[a] as isize + d).rem_euclid(grid.n(a) as isize) as usize;
            4 * grid.flatten(&j) + col % 4
        };
        let (up, down) = (shifted(1), shifted(-1));
        for r in 0..4 * n {
            fd[(r, col)] = (g[(r, up)] - g[(r, down)]) * Complex64::new(0.0, 1.0 / (2.0 * h));
        }
    }
    let r_p_difference = frob(&(&pg - &fd)) / frob(&pg);

    Ok(DiracGreenResiduals {
        r_x: (num_x / den_x).sqrt(),
        r_p,
        r_p_difference,
    })
}

fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}
