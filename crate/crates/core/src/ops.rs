//! Operators acting on spinor fields.
//!
//! Every operator declares the representation it works in natively; inputs
//! in the other representation are converted on the way in and the result
//! is returned in the native representation.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::clifford::{self, Momentum3, SpinorMatrix};
use crate::error::{DiracError, Result};
use crate::field::{Rep, SpinorField};

pub trait FieldOperator: Send + Sync {
    fn native_rep(&self) -> Rep {
        Rep::Momentum
    }

    fn apply(&self, f: &SpinorField) -> Result<SpinorField>;

    fn label(&self) -> String;
}

/// Shared, type-erased operator.
pub type Op = Arc<dyn FieldOperator>;

impl fmt::Debug for dyn FieldOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// `<f | A f>` with the representation weight (not normalized by `<f|f>`).
pub fn expectation(f: &SpinorField, op: &dyn FieldOperator) -> Result<Complex64> {
    let g = op.apply(f)?;
    f.inner(&g)
}

/// `<f | A f> / <f | f>`.
pub fn mean(f: &SpinorField, op: &dyn FieldOperator) -> Result<Complex64> {
    let n = f.norm_sq();
    if n == 0.0 {
        return Err(DiracError::Argument("mean value of a zero field".into()));
    }
    Ok(expectation(f, op)? / n)
}

/// Multiplies each momentum mode by the 4x4 matrix `m(q)`.
pub fn apply_mode_matrices<F>(f: &SpinorField, m: F) -> SpinorField
where
    F: Fn(&Momentum3) -> SpinorMatrix + Sync + Send,
{
    let grid = *f.grid();
    f.in_rep(Rep::Momentum).map_points(move |i, c| {
        m(&grid.mode(i)).apply_in_place(c);
    })
}

#[derive(Clone, Copy, Debug)]
pub struct Identity;

impl FieldOperator for Identity {
    fn native_rep(&self) -> Rep {
        Rep::Position
    }
    fn apply(&self, f: &SpinorField) -> Result<SpinorField> {
        Ok(f.clone())
    }
    fn label(&self) -> String {
        "1".into()
    }
}

/// `p_axis`.
#[derive(Clone, Copy, Debug)]
pub struct Momentum(pub usize);

impl FieldOperator for Momentum {
    fn apply(&self, f: &SpinorField) -> Result<SpinorField> {
        f.apply_momentum(self.0)
    }
    fn label(&self) -> String {
        format!("p{}", self.0)
    }
}

/// `x_axis`.
#[derive(Clone, Copy, Debug)]
pub struct Position(pub usize);

impl FieldOperator for Position {
    fn native_rep(&self) -> Rep {
        Rep::Position
    }
    fn apply(&self, f: &SpinorField) -> Result<SpinorField> {
        f.apply_position(self.0)
    }
    fn label(&self) -> String {
        format!("x{}", self.0)
    }
}

type ModeFn = dyn Fn(&Momentum3) -> SpinorMatrix + Send + Sync;

/// Operator diagonal in momentum: a 4x4 matrix per mode.
#[derive(Clone)]
pub struct ModeOp {
    label: String,
    f: Arc<ModeFn>,
    needs_gap: bool,
}

impl ModeOp {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Momentum3) -> SpinorMatrix + Send + Sync + 'static,
    {
        ModeOp {
            label: label.into(),
            f: Arc::new(f),
            needs_gap: false,
        }
    }

    pub fn constant(label: impl Into<String>, m: SpinorMatrix) -> Self {
        Self::new(label, move |_| m)
    }

    /// `H(p) = alpha . p + beta m`.
    pub fn hamiltonian() -> Self {
        Self::new("H", clifford::dirac_h_mode)
    }

    /// Positive-energy projector; fails on grids containing an `eps = 0`
    /// mode.
    pub fn lambda_plus() -> Self {
        let mut op = Self::new("L+", |q: &Momentum3| {
            clifford::lambda_plus_mode(q).unwrap_or_else(|_| SpinorMatrix::zero())
        });
        op.needs_gap = true;
        op
    }

    pub fn beta() -> Self {
        Self::constant("beta", clifford::beta())
    }

    /// `sigma_axis / 2`.
    pub fn spin(axis: usize) -> Result<Self> {
        Ok(Self::constant(format!("s{axis}"), clifford::spin_half(axis)?))
    }

    /// Free propagator `U(t)` as a mode operator.
    pub fn evolution(t: f64) -> Self {
        Self::new(format!("U({t})"), move |q| clifford::propagator(q, t))
    }

    /// `gamma0(t) = U(t) beta U(t)^dagger`.
    pub fn gamma0(t: f64) -> Self {
        Self::new(format!("gamma0({t})"), move |q| {
            clifford::gamma0_invariant_mode(q, t)
        })
    }

    /// Scalar function of the mode, times the identity matrix.
    pub fn scalar<F>(label: impl Into<String>, s: F) -> Self
    where
        F: Fn(&Momentum3) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(label, move |q| SpinorMatrix::identity().scale(s(q)))
    }

    pub fn matrix(&self, q: &Momentum3) -> SpinorMatrix {
        (self.f)(q)
    }
}

impl FieldOperator for ModeOp {
    fn apply(&self, f: &SpinorField) -> Result<SpinorField> {
        if self.needs_gap && f.grid().mass() == 0.0 {
            return Err(DiracError::SingularProjector);
        }
        let m = self.f.clone();
        Ok(apply_mode_matrices(f, move |q| m(q)))
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `ops[0] ops[1] ... ops[k]`, applied right to left.
#[derive(Clone)]
pub struct Product(pub Vec<Op>);

impl FieldOperator for Product {
    fn apply(&self, f: &SpinorField) -> Result<SpinorField> {
        let mut g = f.clone();
        for op in self.0.iter().rev() {
            g = op.apply(&g)?;
        }
        Ok(g)
    }
    fn native_rep(&self) -> Rep {
        self.0.first().map(|o| o.native_rep()).unwrap_or(Rep::Position)
    }
    fn label(&self) -> String {
        self.0.iter().map(|o| o.label()).collect::<Vec<_>>().join("*")
    }
}

/// `sum_k c_k A_k`.
#[derive(Clone)]
pub struct Sum(pub Vec<(Complex64, Op)>);

impl FieldOperator for Sum {
    fn apply(&self, f: &SpinorField) -> Result<SpinorField> {
        let rep = self.native_rep();
        let mut acc = SpinorField::zeros(*f.grid(), rep);
        for (c, op) in &self.0 {
            let g = op.apply(f)?;
            acc = acc.combine(Complex64::new(1.0, 0.0), &g, *c)?;
        }
        Ok(acc)
    }
    fn native_rep(&self) -> Rep {
        self.0.first().map(|(_, o)| o.native_rep()).unwrap_or(Rep::Momentum)
    }
    fn label(&self) -> String {
        self.0
            .iter()
            .map(|(c, o)| format!("({c})*{}", o.label()))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `[A, B] = AB - BA`.
#[derive(Clone)]
pub struct Commutator(pub Op, pub Op);

impl FieldOperator for Commutator {
    fn apply(&self, f: &SpinorField) -> Result<SpinorField> {
        let ab = self.0.apply(&self.1.apply(f)?)?;
        let ba = self.1.apply(&self.0.apply(f)?)?;
        ab.sub(&ba)
    }
    fn native_rep(&self) -> Rep {
        self.0.native_rep()
    }
    fn label(&self) -> String {
        format!("[{}, {}]", self.0.label(), self.1.label())
    }
}

/// Polynomial `sum_k c_k A^k` of an operator, by repeated application.
#[derive(Clone)]
pub struct Polynomial {
    pub op: Op,
    pub coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// `A^k`.
    pub fn power(op: Op, k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Polynomial { op, coeffs }
    }
}

impl FieldOperator for Polynomial {
    fn apply(&self, f: &SpinorField) -> Result<SpinorField> {
        // Horner: (((c_k A + c_{k-1}) A + ...) A + c_0)
        let rep = self.op.native_rep();
        let mut acc = SpinorField::zeros(*f.grid(), rep);
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if k + 1 < self.coeffs.len() {
                acc = self.op.apply(&acc)?;
            }
            acc = acc.combine(Complex64::new(1.0, 0.0), f, *c)?;
        }
        Ok(acc)
    }
    fn native_rep(&self) -> Rep {
        self.op.native_rep()
    }
    fn label(&self) -> String {
        format!("poly[{}; {}]", self.op.label(), self.coeffs.len() - 1)
    }
}

pub fn op<T: FieldOperator + 'static>(t: T) -> Op {
    Arc::new(t)
}

/// Projects a field onto the positive-energy subspace.
pub fn project_positive(f: &SpinorField) -> Result<SpinorField> {
    ModeOp::lambda_plus().apply(f)
}
