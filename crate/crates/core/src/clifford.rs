//! Dirac matrices in the standard representation and the closed-form
//! per-momentum-mode kernels built from them.
//!
//! Units are natural (`hbar = c = 1`). Every mode kernel relies on the
//! identity `H(p)^2 = eps^2 E` with `eps = sqrt(m^2 + p.p)`, so the free
//! propagator of a single mode is
//!
//! ```text
//! U(t) = cos(eps t) E - i sin(eps t) H / eps
//! ```
//!
//! which is `exp(tau H)` evaluated at imaginary `tau = -i t`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{DiracError, Result};

pub type Spinor = [Complex64; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense 4x4 complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct SpinorMatrix(pub [[Complex64; 4]; 4]);

impl SpinorMatrix {
    pub const fn zero() -> Self {
        SpinorMatrix([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::diag([ONE; 4])
    }

    pub fn diag(d: [Complex64; 4]) -> Self {
        let mut m = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    /// Block matrix `[[a, b], [c, d]]` from 2x2 blocks.
    pub fn from_blocks(a: Block2, b: Block2, c: Block2, d: Block2) -> Self {
        let mut m = Self::zero();
        for r in 0..2 {
            for col in 0..2 {
                m.0[r][col] = a[r][col];
                m.0[r][col + 2] = b[r][col];
                m.0[r + 2][col] = c[r][col];
                m.0[r + 2][col + 2] = d[r][col];
            }
        }
        m
    }

    /// 2x2 block at (`row`, `col`), each in `0..2`.
    pub fn block(&self, row: usize, col: usize) -> Block2 {
        let mut b = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                b[r][c] = self.0[2 * row + r][2 * col + c];
            }
        }
        b
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[r][c]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = self.0[c][r].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|v| *v *= s);
        m
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Self::zero())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Self::identity()) <= tol
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        let mut out = [ZERO; 4];
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.0[r][0] * v[0]
                + self.0[r][1] * v[1]
                + self.0[r][2] * v[2]
                + self.0[r][3] * v[3];
        }
        out
    }

    /// In-place application on a 4-component slice.
    #[inline]
    pub fn apply_in_place(&self, v: &mut [Complex64]) {
        let x = [v[0], v[1], v[2], v[3]];
        let y = self.apply(&x);
        v.copy_from_slice(&y);
    }
}

impl fmt::Debug for SpinorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SpinorMatrix[")?;
        for row in &self.0 {
            write!(f, " ")?;
            for v in row {
                write!(f, " {:+.6}{:+.6}i", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for SpinorMatrix {
    type Output = SpinorMatrix;
    fn mul(self, rhs: SpinorMatrix) -> SpinorMatrix {
        let mut m = SpinorMatrix::zero();
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = ZERO;
                for k in 0..4 {
                    acc += self.0[r][k] * rhs.0[k][c];
                }
                m.0[r][c] = acc;
            }
        }
        m
    }
}

impl Add for SpinorMatrix {
    type Output = SpinorMatrix;
    fn add(mut self, rhs: SpinorMatrix) -> SpinorMatrix {
        self += rhs;
        self
    }
}

impl AddAssign for SpinorMatrix {
    fn add_assign(&mut self, rhs: SpinorMatrix) {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
    }
}

impl Sub for SpinorMatrix {
    type Output = SpinorMatrix;
    fn sub(self, rhs: SpinorMatrix) -> SpinorMatrix {
        self + (-rhs)
    }
}

impl Neg for SpinorMatrix {
    type Output = SpinorMatrix;
    fn neg(self) -> SpinorMatrix {
        self.scale_re(-1.0)
    }
}

pub type Block2 = [[Complex64; 2]; 2];

fn check_axis(i: usize) -> Result<()> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(DiracError::Argument(format!("axis index {i} not in 1..=3")))
    }
}

/// The 2x2 Pauli matrix `sigma_i`, `i` in `1..=3`.
pub fn pauli_block(i: usize) -> Result<Block2> {
    check_axis(i)?;
    Ok(match i {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        _ => [[ONE, ZERO], [ZERO, -ONE]],
    })
}

/// `sigma_i` embedded in 4-spinor space as `diag(sigma_i, sigma_i)`.
///
/// This is the spin matrix acting on both the upper and lower pairs of
/// components; its upper-left block is the plain 2x2 Pauli matrix.
pub fn pauli(i: usize) -> Result<SpinorMatrix> {
    let s = pauli_block(i)?;
    let z = [[ZERO; 2]; 2];
    Ok(SpinorMatrix::from_blocks(s, z, z, s))
}

/// `alpha_i = [[0, sigma_i], [sigma_i, 0]]`.
pub fn alpha(i: usize) -> Result<SpinorMatrix> {
    let s = pauli_block(i)?;
    let z = [[ZERO; 2]; 2];
    Ok(SpinorMatrix::from_blocks(z, s, s, z))
}

/// `beta = diag(1, 1, -1, -1)`.
pub fn beta() -> SpinorMatrix {
    SpinorMatrix::diag([ONE, ONE, -ONE, -ONE])
}

/// Spin matrix `sigma_i / 2` in 4-spinor space.
pub fn spin_half(i: usize) -> Result<SpinorMatrix> {
    Ok(pauli(i)?.scale_re(0.5))
}

/// Momentum of a single mode together with the particle mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Momentum3 {
    pub p: [f64; 3],
    pub m: f64,
}

impl Momentum3 {
    pub fn new(p: [f64; 3], m: f64) -> Self {
        Momentum3 { p, m }
    }

    pub fn p_squared(&self) -> f64 {
        self.p.iter().map(|x| x * x).sum()
    }

    /// Mode energy `sqrt(m^2 + p.p)`.
    pub fn energy(&self) -> f64 {
        (self.m * self.m + self.p_squared()).sqrt()
    }
}

/// `sigma . p` as a 2x2 block.
pub fn sigma_dot_p(p: &[f64; 3]) -> Block2 {
    let (x, y, z) = (p[0], p[1], p[2]);
    [
        [Complex64::new(z, 0.0), Complex64::new(x, -y)],
        [Complex64::new(x, y), Complex64::new(-z, 0.0)],
    ]
}

/// `H(p) = alpha . p + beta m`.
pub fn dirac_h_mode(q: &Momentum3) -> SpinorMatrix {
    let m = Complex64::new(q.m, 0.0);
    let sp = sigma_dot_p(&q.p);
    SpinorMatrix::from_blocks([[m, ZERO], [ZERO, m]], sp, sp, [[-m, ZERO], [ZERO, -m]])
}

/// Result of [`evolution_mode`]; `zero_mode` flags the massless `p = 0`
/// mode, where the propagator is the identity.
#[derive(Clone, Copy, Debug)]
pub struct ModeEvolution {
    pub matrix: SpinorMatrix,
    pub zero_mode: bool,
}

/// Free propagator of one momentum mode, `exp(-i t H(p))`, in closed form.
pub fn evolution_mode(q: &Momentum3, t: f64) -> ModeEvolution {
    let eps = q.energy();
    if eps == 0.0 {
        return ModeEvolution {
            matrix: SpinorMatrix::identity(),
            zero_mode: true,
        };
    }
    let (s, c) = (eps * t).sin_cos();
    let h = dirac_h_mode(q);
    let matrix = SpinorMatrix::identity().scale_re(c) + h.scale(Complex64::new(0.0, -s / eps));
    ModeEvolution {
        matrix,
        zero_mode: false,
    }
}

/// Shorthand for the matrix part of [`evolution_mode`].
#[inline]
pub fn propagator(q: &Momentum3, t: f64) -> SpinorMatrix {
    evolution_mode(q, t).matrix
}

/// Positive-energy projector `(E + H/eps) / 2`.
pub fn lambda_plus_mode(q: &Momentum3) -> Result<SpinorMatrix> {
    let eps = q.energy();
    if eps == 0.0 {
        return Err(DiracError::SingularProjector);
    }
    Ok((SpinorMatrix::identity() + dirac_h_mode(q).scale_re(1.0 / eps)).scale_re(0.5))
}

/// `gamma0(t) = U(t) beta U(t)^dagger`, with `gamma0 = beta`.
pub fn gamma0_invariant_mode(q: &Momentum3, t: f64) -> SpinorMatrix {
    let u = propagator(q, t);
    u * beta() * u.adjoint()
}

/// The explicit reference matrix for `gamma0(t)`, with `cosh(eps tau) = cos(eps t)` and
/// `sinh(eps tau) = -i sin(eps t)`. It does not agree with
/// [`gamma0_invariant_mode`] in general; it is kept only so the deviation
/// can be reported.
pub fn gamma0_printed_mode(q: &Momentum3, t: f64) -> SpinorMatrix {
    let eps = q.energy();
    if eps == 0.0 {
        return beta();
    }
    let ch = Complex64::new((eps * t).cos(), 0.0);
    let sh = Complex64::new(0.0, -(eps * t).sin());
    let m2p2 = q.m * q.m - q.p_squared();
    let sp = sigma_dot_p(&q.p);
    let one = [[ONE, ZERO], [ZERO, ONE]];
    let a = ch * ch - sh * sh * (eps * eps * m2p2);
    let d = sh * sh * (m2p2 / (eps * eps)) - ch * ch;
    let b = sh * (sh / eps + ch) * (-2.0 / eps);
    let c = sh * (sh / eps - ch) * (-2.0 / eps);
    SpinorMatrix::from_blocks(
        scale_block(&one, a),
        scale_block(&sp, b),
        scale_block(&sp, c),
        scale_block(&one, d),
    )
}

pub fn scale_block(b: &Block2, s: Complex64) -> Block2 {
    [[b[0][0] * s, b[0][1] * s], [b[1][0] * s, b[1][1] * s]]
}

pub fn block_mul(a: &Block2, b: &Block2) -> Block2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}
