//! Fixed-point iterations for `VI(F, C)` with `C` a separable cone.
//!
//! All three solvers share the step `α` and contraction factor `γ` of
//! [`ContractionParams`]. With `γ < 1` each update map is a `γ`-contraction,
//! so the iterates converge linearly to a unique fixed point. A caller may
//! force a step with [`SolveConfig::alpha_override`]; the report then carries
//! the factor `sqrt(1 − 2αβ + α²L²)` and `guaranteed = false` when it is not
//! below one.
//!
//! Every logged `x` iterate is the output of a cone projection and so lies in
//! `C` exactly.

mod bounds;
mod certificate;
mod intersection;

use nalgebra::DVector;

use crate::basis::Basis;
use crate::cones::SeparableCone;
use crate::error::{check_dim, Error, Result};
use crate::operators::{iteration_bound, ContractionParams, Operator};
use crate::projective::IpmSummary;

pub use bounds::{bound_report, BertsekasComparison, BoundComparison, GalerkinComparison};
pub use certificate::{certify, OptimalityCertificate};
pub use intersection::{project_intersection, project_intersection_dykstra};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Bertsekas,
    Galerkin,
    InteriorPoint,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Bertsekas => "bertsekas",
            Method::Galerkin => "galerkin",
            Method::InteriorPoint => "ipm",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Fixed step size; bypasses the `α = β/L²` rule and its guarantee.
    pub alpha_override: Option<f64>,
    /// Stop once the fixed-point step norm is at most this.
    pub tol: f64,
    /// `None` picks `100·⌈ln(1e-10)/ln γ⌉` for contractions, else 10000.
    pub max_iter: Option<usize>,
    pub dykstra_tol: f64,
    pub dykstra_max_iter: usize,
    /// Tolerance handed to [`certify`] by the Galerkin solver.
    pub cert_tol: f64,
    /// Starting point: `x⁽⁰⁾` for the exact and Bertsekas iterations, `z⁽⁰⁾`
    /// for the Galerkin iteration.
    pub start: Option<DVector<f64>>,
    pub record_trace: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            alpha_override: None,
            tol: 1e-10,
            max_iter: None,
            dykstra_tol: 1e-12,
            dykstra_max_iter: 10_000,
            cert_tol: 1e-8,
            start: None,
            record_trace: false,
        }
    }
}

impl SolveConfig {
    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} = {v} must be positive"
                )))
            }
        };
        positive("tol", self.tol)?;
        positive("dykstra_tol", self.dykstra_tol)?;
        positive("cert_tol", self.cert_tol)?;
        if let Some(a) = self.alpha_override {
            positive("alpha", a)?;
        }
        if self.max_iter == Some(0) || self.dykstra_max_iter == 0 {
            return Err(Error::InvalidArgument(
                "iteration limits must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Step parameters for `op`: the override if set, else `α = β/L²`.
    pub fn step_params<O: Operator + ?Sized>(&self, op: &O) -> Result<ContractionParams> {
        match self.alpha_override {
            Some(alpha) => Ok(ContractionParams::with_step(
                op.monotone_modulus(),
                op.lipschitz_constant(),
                alpha,
            )),
            None => op.contraction_params(),
        }
    }

    fn iteration_limit(&self, gamma: f64) -> usize {
        self.max_iter.unwrap_or_else(|| {
            if gamma == 0.0 {
                100
            } else {
                iteration_bound(gamma, 1e-10)
                    .map(|t| t.saturating_mul(100))
                    .unwrap_or(10_000)
            }
        })
    }
}

/// Iterates logged during a solve. `iterates[0]` is the starting point and
/// `step_norms[t − 1]` is the step norm that produced iterate `t`.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub iterates: Vec<DVector<f64>>,
    /// Companion `z` iterates for the Galerkin solver; empty otherwise.
    pub z_iterates: Vec<DVector<f64>>,
    pub step_norms: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub t: usize,
    pub step_norm: f64,
    pub distance_to_final: f64,
}

impl Trace {
    /// `‖x⁽ᵗ⁾ − x⁽ᵀ⁾‖` for every logged `t`.
    pub fn distances_to_final(&self) -> Vec<f64> {
        distances(&self.iterates)
    }

    pub fn z_distances_to_final(&self) -> Vec<f64> {
        distances(&self.z_iterates)
    }

    pub fn entries(&self) -> Vec<TraceEntry> {
        let d = self.distances_to_final();
        self.step_norms
            .iter()
            .enumerate()
            .map(|(i, &s)| TraceEntry {
                t: i + 1,
                step_norm: s,
                distance_to_final: d[i + 1],
            })
            .collect()
    }
}

fn distances(v: &[DVector<f64>]) -> Vec<f64> {
    match v.last() {
        Some(last) => v.iter().map(|x| (x - last).norm()).collect(),
        None => Vec::new(),
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: Method,
    /// The feasible solution iterate (`x*`, `x̂` or `x̄`).
    pub x: DVector<f64>,
    /// The pre-projection iterate `z̄` of the Galerkin solver.
    pub z: Option<DVector<f64>>,
    pub iterations: usize,
    pub final_step_norm: f64,
    /// Step and certified contraction factor; absent for the interior-point solver.
    pub contraction: Option<ContractionParams>,
    /// Whether `γ < 1`, so the convergence theory applies.
    pub guaranteed: bool,
    /// Representation error over `1 − γ`, when a reference solution was given.
    pub apriori_bound: Option<f64>,
    pub certificate: Option<OptimalityCertificate>,
    pub converged: bool,
    pub trace: Option<Trace>,
    pub ipm: Option<IpmSummary>,
}

impl SolveReport {
    pub fn gamma(&self) -> Option<f64> {
        self.contraction.map(|c| c.gamma)
    }

    pub fn alpha(&self) -> Option<f64> {
        self.contraction.map(|c| c.alpha)
    }
}

fn check_problem<O: Operator + ?Sized>(
    op: &O,
    cone: &SeparableCone,
    cfg: &SolveConfig,
) -> Result<()> {
    cfg.validate()?;
    check_dim("operator vs cone", cone.dim(), op.dim())?;
    if let Some(s) = &cfg.start {
        check_dim("starting point", cone.dim(), s.len())?;
    }
    Ok(())
}

fn base_report(method: Method, x: DVector<f64>, params: ContractionParams) -> SolveReport {
    SolveReport {
        method,
        x,
        z: None,
        iterations: 0,
        final_step_norm: f64::INFINITY,
        contraction: Some(params),
        guaranteed: params.is_contraction(),
        apriori_bound: None,
        certificate: None,
        converged: false,
        trace: None,
        ipm: None,
    }
}

/// Runs `x ← update(x)` until the step norm drops to `tol`.
fn run_fixed_point<U>(
    method: Method,
    x0: DVector<f64>,
    params: ContractionParams,
    cfg: &SolveConfig,
    mut update: U,
) -> Result<SolveReport>
where
    U: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let limit = cfg.iteration_limit(params.gamma);
    let mut trace = cfg.record_trace.then(|| Trace {
        iterates: vec![x0.clone()],
        ..Trace::default()
    });
    let mut report = base_report(method, x0, params);
    for t in 1..=limit {
        let next = update(&report.x)?;
        let step = (&next - &report.x).norm();
        report.x = next;
        report.iterations = t;
        report.final_step_norm = step;
        if let Some(tr) = trace.as_mut() {
            tr.iterates.push(report.x.clone());
            tr.step_norms.push(step);
        }
        if step <= cfg.tol {
            report.converged = true;
            break;
        }
    }
    report.trace = trace;
    Ok(report)
}

/// The projection method `x⁽ᵗ⁾ = Π_C(x⁽ᵗ⁻¹⁾ − αF(x⁽ᵗ⁻¹⁾))`, from `x⁽⁰⁾ = Π_C(0)`.
///
/// Exceeding the iteration limit is reported with `converged = false`.
pub fn solve_exact<O: Operator + ?Sized>(
    op: &O,
    cone: &SeparableCone,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    check_problem(op, cone, cfg)?;
    let params = cfg.step_params(op)?;
    let alpha = params.alpha;
    let mut x0 = cfg
        .start
        .clone()
        .unwrap_or_else(|| DVector::zeros(cone.dim()));
    cone.project_in_place(&mut x0);
    run_fixed_point(Method::Exact, x0, params, cfg, |x| {
        let mut next = x - op.eval(x) * alpha;
        cone.project_in_place(&mut next);
        Ok(next)
    })
}

/// The projection method written as the two-variable recursion
/// `x⁽ᵗ⁾ = Π_C(z⁽ᵗ⁾)`, `z⁽ᵗ⁺¹⁾ = x⁽ᵗ⁾ − αF(x⁽ᵗ⁾)`.
///
/// Started from `z⁽⁰⁾ = x⁽⁰⁾ ∈ C` it produces the same `x` sequence as
/// [`solve_exact`]; the report's `z` holds the final `z`.
pub fn solve_exact_split<O: Operator + ?Sized>(
    op: &O,
    cone: &SeparableCone,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    check_problem(op, cone, cfg)?;
    let params = cfg.step_params(op)?;
    let mut z0 = cfg
        .start
        .clone()
        .unwrap_or_else(|| DVector::zeros(cone.dim()));
    cone.project_in_place(&mut z0);
    let mut report = two_projection(op, cone, None, params, z0, cfg)?;
    report.method = Method::Exact;
    Ok(report)
}

/// The Bertsekas-Galerkin iteration `x⁽ᵗ⁾ = Π_Ĉ(x⁽ᵗ⁻¹⁾ − αF(x⁽ᵗ⁻¹⁾))` with
/// `Ĉ = C ∩ span(Φ)`, each projection computed by [`project_intersection`].
///
/// Given `reference = x*`, the report carries `‖Π_Ĉ(x*) − x*‖/(1 − γ)`.
pub fn solve_bertsekas<O: Operator + ?Sized>(
    op: &O,
    cone: &SeparableCone,
    basis: &Basis,
    cfg: &SolveConfig,
    reference: Option<&DVector<f64>>,
) -> Result<SolveReport> {
    check_problem(op, cone, cfg)?;
    check_dim("basis vs cone", cone.dim(), basis.dim())?;
    let params = cfg.step_params(op)?;
    let alpha = params.alpha;
    let project = |v: &DVector<f64>| {
        project_intersection(cone, basis, v, cfg.dykstra_tol, cfg.dykstra_max_iter)
    };
    let x0 = match &cfg.start {
        Some(s) => project(s)?,
        None => DVector::zeros(cone.dim()),
    };
    let mut report = run_fixed_point(Method::Bertsekas, x0, params, cfg, |x| {
        project(&(x - op.eval(x) * alpha))
    })?;
    if let Some(x_ref) = reference {
        check_dim("reference solution", cone.dim(), x_ref.len())?;
        let rep_err = (project(x_ref)? - x_ref).norm();
        report.apriori_bound = Some(rep_err / (1.0 - params.gamma));
    }
    Ok(report)
}

/// The two-projection Galerkin iteration
/// `x⁽ᵗ⁾ = Π_C(z⁽ᵗ⁾)`, `z⁽ᵗ⁺¹⁾ = Π_Φ(x⁽ᵗ⁾ − αF(x⁽ᵗ⁾))`, from `z⁽⁰⁾ = 0`.
///
/// `C ∩ span(Φ)` may be empty. On return `x̄ = Π_C(z̄)` exactly and the
/// report carries the optimality certificate of `(x̄, z̄)`. Given
/// `reference = z*`, it also carries `‖z* − Π_Φ z*‖/(1 − γ)`.
pub fn solve_galerkin<O: Operator + ?Sized>(
    op: &O,
    cone: &SeparableCone,
    basis: &Basis,
    cfg: &SolveConfig,
    reference: Option<&DVector<f64>>,
) -> Result<SolveReport> {
    check_problem(op, cone, cfg)?;
    check_dim("basis vs cone", cone.dim(), basis.dim())?;
    let params = cfg.step_params(op)?;
    let z0 = cfg
        .start
        .clone()
        .unwrap_or_else(|| DVector::zeros(cone.dim()));
    let mut report = two_projection(op, cone, Some(basis), params, z0, cfg)?;
    let z_bar = report.z.as_ref().expect("two-projection sets z");
    report.certificate = Some(certify(
        op,
        cone,
        basis,
        &report.x,
        z_bar,
        params.alpha,
        cfg.cert_tol,
    )?);
    if let Some(z_ref) = reference {
        check_dim("reference solution", cone.dim(), z_ref.len())?;
        report.apriori_bound = Some(basis.representation_error(z_ref)? / (1.0 - params.gamma));
    }
    Ok(report)
}

/// Shared `z` recursion; `basis = None` means `Π_Φ = I`.
fn two_projection<O: Operator + ?Sized>(
    op: &O,
    cone: &SeparableCone,
    basis: Option<&Basis>,
    params: ContractionParams,
    z0: DVector<f64>,
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    let alpha = params.alpha;
    let limit = cfg.iteration_limit(params.gamma);
    let method = if basis.is_some() {
        Method::Galerkin
    } else {
        Method::Exact
    };

    let mut z = z0;
    let mut x = z.clone();
    cone.project_in_place(&mut x);
    let mut trace = cfg.record_trace.then(|| Trace {
        iterates: vec![x.clone()],
        z_iterates: vec![z.clone()],
        step_norms: Vec::new(),
    });
    let mut report = base_report(method, x.clone(), params);
    for t in 1..=limit {
        let mut z_next = &x - op.eval(&x) * alpha;
        if let Some(b) = basis {
            z_next = b.project_unchecked(&z_next);
        }
        let step = (&z_next - &z).norm();
        z = z_next;
        x.copy_from(&z);
        cone.project_in_place(&mut x);
        report.iterations = t;
        report.final_step_norm = step;
        if let Some(tr) = trace.as_mut() {
            tr.iterates.push(x.clone());
            tr.z_iterates.push(z.clone());
            tr.step_norms.push(step);
        }
        if step <= cfg.tol {
            report.converged = true;
            break;
        }
    }
    report.x = x;
    report.z = Some(z);
    report.trace = trace;
    Ok(report)
}
