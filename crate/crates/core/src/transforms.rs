//! Conversions between problem forms.
//!
//! * Over a cone `K`, `VI(F, K)` and `CP(F, K)` have the same solutions.
//! * Equality constraints `Ay = b` are absorbed with free multipliers `λ`:
//!   `VI(F, K ∩ {Ay = b})` becomes `VI(F̄, K × ℝᵐ)` with
//!   `F̄(y, λ) = (F(y) − Aᵀλ, Ay − b)`.
//! * A polyhedral set `{x : Ax + b ≥ 0}` gets slack variables `s = Ax + b`,
//!   `s ≥ 0`, `x` free. Writing the slack definition as the equality
//!   `[−I  A](s, x) = −b` and eliminating it as above gives the operator on
//!   `(s, x, λ) ∈ ℝ₊ᵐ × ℝⁿ × ℝᵐ`
//!
//! ```text
//!   ⎡ 0    0   I  ⎤ ⎡s⎤   ⎡0⎤
//!   ⎢ 0    M  −Aᵀ ⎥ ⎢x⎥ + ⎢q⎥
//!   ⎣−I    A   0  ⎦ ⎣λ⎦   ⎣b⎦
//! ```
//!
//!   The `s` rows read `λ ⊥ s`, the `x` rows `Mx + q = Aᵀλ`, and the `λ` rows
//!   `s = Ax + b`: the KKT system of the polyhedral VI.
//!
//! The block matrices have skew off-diagonal blocks, so their symmetric part
//! is `diag(0, (M + Mᵀ)/2, 0)`: monotone when `M` is, but never strongly
//! monotone. The layouts say so, and the contraction-based solvers refuse them
//! unless given an explicit step; the interior-point solver needs only
//! monotonicity.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use crate::cones::SeparableCone;
use crate::error::{check_dim, Error, Result};
use crate::operators::{AffineOperator, Operator};

/// `VI(F, K)` over a separable cone.
#[derive(Debug, Clone)]
pub struct VariationalInequality<O> {
    pub op: O,
    pub cone: SeparableCone,
}

/// `CP(F, K)`: `x ∈ K`, `F(x) ∈ K*`, `xᵀF(x) = 0`.
#[derive(Debug, Clone)]
pub struct ComplementarityProblem<O> {
    pub op: O,
    pub cone: SeparableCone,
}

impl<O: Operator> VariationalInequality<O> {
    pub fn new(op: O, cone: SeparableCone) -> Result<Self> {
        check_dim("VI operator vs cone", cone.dim(), op.dim())?;
        Ok(VariationalInequality { op, cone })
    }

    /// Fixed-point residual `‖x − Π_K(x − F(x))‖`.
    pub fn natural_residual(&self, x: &DVector<f64>) -> Result<f64> {
        let fx = self.op.apply(x)?;
        Ok((x - self.cone.project(&(x - fx))?).norm())
    }
}

impl<O: Operator> ComplementarityProblem<O> {
    pub fn is_solution(&self, x: &DVector<f64>, tol: f64) -> Result<bool> {
        let fx = self.op.apply(x)?;
        self.cone.is_complementary(x, &fx, tol)
    }
}

/// A VI over a cone read as the equivalent complementarity problem.
pub fn vi_to_cp<O>(vi: VariationalInequality<O>) -> ComplementarityProblem<O> {
    ComplementarityProblem {
        op: vi.op,
        cone: vi.cone,
    }
}

pub fn cp_to_vi<O>(cp: ComplementarityProblem<O>) -> VariationalInequality<O> {
    VariationalInequality {
        op: cp.op,
        cone: cp.cone,
    }
}

/// Where each block of variables lives in a transformed problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSpan {
    pub name: &'static str,
    pub range: Range<usize>,
}

#[derive(Debug, Clone)]
pub struct ConicProgramLayout {
    pub cone: SeparableCone,
    pub op: AffineOperator,
    pub variable_map: Vec<VariableSpan>,
    /// Always `false` for the block forms built here.
    pub strongly_monotone: bool,
}

impl ConicProgramLayout {
    pub fn span(&self, name: &str) -> Option<&Range<usize>> {
        self.variable_map
            .iter()
            .find(|s| s.name == name)
            .map(|s| &s.range)
    }

    /// The block of `v` named `name`.
    pub fn extract(&self, name: &str, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim("layout vector", self.cone.dim(), v.len())?;
        let r = self
            .span(name)
            .ok_or_else(|| Error::InvalidArgument(format!("no variable block named `{name}`")))?;
        Ok(v.rows(r.start, r.len()).into_owned())
    }
}

fn spans(parts: &[(&'static str, usize)]) -> Vec<VariableSpan> {
    let mut start = 0;
    parts
        .iter()
        .filter(|(_, len)| *len > 0)
        .map(|&(name, len)| {
            let span = VariableSpan {
                name,
                range: start..start + len,
            };
            start += len;
            span
        })
        .collect()
}

/// `VI(My + q, K ∩ {Ay = b})` as `VI(F̄, K × ℝᵐ)` over `(y, λ)`, with matrix
/// `[[M, −Aᵀ], [A, 0]]` and offset `(q, −b)`.
pub fn eliminate_equalities(
    op: &AffineOperator,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    cone: &SeparableCone,
) -> Result<ConicProgramLayout> {
    let n = op.dim();
    let m = b.len();
    check_dim("equality operator vs cone", cone.dim(), n)?;
    check_dim("equality matrix rows", m, a.nrows())?;
    if m > 0 {
        check_dim("equality matrix cols", n, a.ncols())?;
    }

    let mut big = DMatrix::zeros(n + m, n + m);
    big.view_mut((0, 0), (n, n)).copy_from(op.matrix());
    if m > 0 {
        big.view_mut((0, n), (n, m)).copy_from(&(-a.transpose()));
        big.view_mut((n, 0), (m, n)).copy_from(a);
    }
    let mut offset = DVector::zeros(n + m);
    offset.rows_mut(0, n).copy_from(op.offset());
    offset.rows_mut(n, m).copy_from(&(-b));

    let out_cone = if m > 0 {
        cone.product(&SeparableCone::free(m)?)
    } else {
        cone.clone()
    };
    Ok(ConicProgramLayout {
        cone: out_cone,
        op: AffineOperator::new(big, offset)?,
        variable_map: spans(&[("y", n), ("lambda", m)]),
        strongly_monotone: m == 0 && op.contraction_params().is_ok(),
    })
}

/// `VI(Mx + q, {x : Ax + b ≥ 0})`.
#[derive(Debug, Clone)]
pub struct PolyhedralVI {
    pub m: DMatrix<f64>,
    pub q: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl PolyhedralVI {
    pub fn new(m: DMatrix<f64>, q: DVector<f64>, a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let n = q.len();
        check_dim("polyhedral M rows", n, m.nrows())?;
        check_dim("polyhedral M cols", n, m.ncols())?;
        check_dim("polyhedral A rows", b.len(), a.nrows())?;
        if !b.is_empty() {
            check_dim("polyhedral A cols", n, a.ncols())?;
        }
        Ok(PolyhedralVI { m, q, a, b })
    }
}

/// Slack-and-multiplier form over `(s, x, λ) ∈ ℝ₊ᵐ × ℝⁿ × ℝᵐ`. See the
/// module docs for the block matrix.
pub fn polyhedron_to_cone(p: &PolyhedralVI) -> Result<ConicProgramLayout> {
    let n = p.q.len();
    let m = p.b.len();
    let dim = 2 * m + n;

    let mut big = DMatrix::zeros(dim, dim);
    let mut offset = DVector::zeros(dim);
    // x rows
    big.view_mut((m, m), (n, n)).copy_from(&p.m);
    offset.rows_mut(m, n).copy_from(&p.q);
    if m > 0 {
        let (s0, x0, l0) = (0, m, m + n);
        // s rows: λ
        big.view_mut((s0, l0), (m, m)).fill_with_identity();
        // x rows: −Aᵀλ
        big.view_mut((x0, l0), (n, m))
            .copy_from(&(-p.a.transpose()));
        // λ rows: −s + Ax + b
        big.view_mut((l0, s0), (m, m))
            .copy_from(&(-DMatrix::<f64>::identity(m, m)));
        big.view_mut((l0, x0), (m, n)).copy_from(&p.a);
        offset.rows_mut(l0, m).copy_from(&p.b);
    }

    let mut cone = SeparableCone::free(n)?;
    if m > 0 {
        cone = SeparableCone::orthant(m)?
            .product(&cone)
            .product(&SeparableCone::free(m)?);
    }
    Ok(ConicProgramLayout {
        cone,
        op: AffineOperator::new(big, offset)?,
        variable_map: spans(&[("s", m), ("x", n), ("lambda", m)]),
        strongly_monotone: false,
    })
}
