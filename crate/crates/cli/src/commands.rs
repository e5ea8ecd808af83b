use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use galerkin_vi::generate::{generate_instance, skew_instance};
use galerkin_vi::io::{parse_basis, parse_problem, write_basis, write_problem, write_vector};
use galerkin_vi::{
    bound_report, solve_bertsekas, solve_exact, solve_galerkin, solve_ipm, AffineOperator, Basis,
    Error, FnOperator, IpmConfig, Operator, ProjectiveLcp, SeparableCone, SolveConfig, SolveReport,
};
use nalgebra::DVector;

use crate::report::{fmt_f64, Format, Report};
use crate::{BenchArgs, BoundsArgs, CertifyArgs, CommonSolve, GenArgs, MethodArg, SolveArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable files, malformed input.
    Usage(String),
    /// A solver gave up.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::IntersectionProjectionFailed { .. }
            | Error::IpmBreakdown(_)
            | Error::Generation(_) => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("write failed: {e}"))
    }
}

type CliResult = Result<i32, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| CliError::Usage(format!("{}: {e}", path.display()))
}

fn load_problem(path: &Path) -> Result<(AffineOperator, SeparableCone), CliError> {
    parse_problem(&read(path)?).map_err(in_file(path))
}

fn load_basis(path: &Path, n: usize) -> Result<Basis, CliError> {
    let raw = parse_basis(&read(path)?).map_err(in_file(path))?;
    if raw.nrows() != n {
        return Err(CliError::Usage(format!(
            "{}: basis has {} rows but the problem has dimension {n}",
            path.display(),
            raw.nrows()
        )));
    }
    Basis::orthonormalize(raw, galerkin_vi::basis::DEFAULT_DROP_TOL).map_err(in_file(path))
}

fn solve_config(common: &CommonSolve, alpha: Option<f64>) -> SolveConfig {
    SolveConfig {
        alpha_override: alpha,
        tol: common.tol,
        max_iter: common.max_iter,
        ..SolveConfig::default()
    }
}

fn natural_residual<O: Operator + ?Sized>(
    op: &O,
    cone: &SeparableCone,
    x: &DVector<f64>,
) -> Result<f64, CliError> {
    let fx = op.apply(x)?;
    Ok((x - cone.project(&(x - fx))?).norm())
}

pub fn solve(a: SolveArgs, out: &mut dyn Write) -> CliResult {
    let (op, cone) = load_problem(&a.problem)?;
    let n = op.dim();
    let basis = match &a.basis {
        Some(p) => load_basis(p, n)?,
        None => Basis::identity(n)?,
    };
    if a.trace.is_some() && a.method == MethodArg::Ipm {
        return Err(CliError::Usage(
            "--trace is only available for the fixed-point methods".into(),
        ));
    }
    let mut cfg = solve_config(&a.common, a.alpha);
    cfg.record_trace = a.trace.is_some();

    let report = match a.method {
        MethodArg::Exact => solve_exact(&op, &cone, &cfg)?,
        MethodArg::Bertsekas => solve_bertsekas(&op, &cone, &basis, &cfg, None)?,
        MethodArg::Galerkin => solve_galerkin(&op, &cone, &basis, &cfg, None)?,
        MethodArg::Ipm => {
            let alpha = cfg.step_params(&op)?.alpha;
            let plcp = ProjectiveLcp::build(&op, &basis, alpha)?;
            let ipm_cfg = IpmConfig {
                mu_tol: a.common.tol,
                feas_tol: a.common.tol,
                max_iter: a.common.max_iter.unwrap_or(IpmConfig::default().max_iter),
                ..IpmConfig::default()
            };
            let mut r = solve_ipm(&plcp, &cone, &ipm_cfg)?;
            r.contraction = Some(cfg.step_params(&op)?);
            r
        }
    };

    if let (Some(path), Some(trace)) = (&a.trace, &report.trace) {
        let mut text = String::new();
        for e in trace.entries() {
            text.push_str(&format!(
                "{}\t{}\t{}\n",
                e.t,
                fmt_f64(e.step_norm),
                fmt_f64(e.distance_to_final)
            ));
        }
        write_file(path, &text)?;
    }
    if let Some(path) = &a.out {
        write_file(path, &write_vector(&report.x))?;
    }

    let mut rep = Report::new();
    rep.str("method", report.method.name())
        .flag("converged", report.converged)
        .int("iters", report.iterations)
        .num("residual", natural_residual(&op, &cone, &report.x)?);
    if let Some(p) = report.contraction {
        rep.num("alpha", p.alpha).num("gamma", p.gamma);
    }
    if report.method != galerkin_vi::Method::InteriorPoint {
        rep.num("step_norm", report.final_step_norm)
            .flag("guaranteed", report.guaranteed);
    }
    if let Some(c) = &report.certificate {
        rep.num("cert_nullspace", c.null_space_violation)
            .flag("cert_normalcone", c.normal_cone_ok);
    }
    if let Some(s) = &report.ipm {
        rep.num("gap", s.gap)
            .num("infeasibility", s.infeasibility)
            .num("per_iter_s", s.per_iteration().as_secs_f64());
    }
    rep.vector("x", &report.x);
    rep.write(out, a.common.format)?;
    Ok(if report.converged { 0 } else { 1 })
}

pub fn bounds(a: BoundsArgs, out: &mut dyn Write) -> CliResult {
    let (op, cone) = load_problem(&a.problem)?;
    let basis = load_basis(&a.basis, op.dim())?;
    let cfg = solve_config(&a.common, None);
    let r = bound_report(&op, &cone, &basis, &cfg)?;

    let mut rep = Report::new();
    let mut ok = r.exact_converged;
    rep.num("gamma", r.params.gamma)
        .num("alpha", r.params.alpha)
        .int("iters", r.exact_iterations);
    match &r.bertsekas {
        Ok(b) => {
            ok &= b.holds && b.converged;
            rep.num("bound_bertsekas", b.bound)
                .num("err_bertsekas", b.error)
                .int("iters_bertsekas", b.iterations)
                .verdict("verdict_bertsekas", b.holds);
        }
        Err(e) => {
            ok = false;
            rep.str("bound_bertsekas", "failed")
                .str("err_bertsekas", "failed")
                .str("verdict_bertsekas", format!("FAILED ({e})"));
        }
    }
    match &r.galerkin {
        Ok(g) => {
            ok &= g.holds_x && g.holds_z && g.converged;
            rep.num("bound_new", g.bound)
                .num("err_new", g.error_x)
                .num("err_new_z", g.error_z)
                .int("iters_new", g.iterations)
                .verdict("verdict_new", g.holds_x && g.holds_z);
            if let Some(c) = &g.certificate {
                rep.num("cert_nullspace", c.null_space_violation)
                    .flag("cert_normalcone", c.normal_cone_ok);
            }
        }
        Err(e) => {
            ok = false;
            rep.str("bound_new", "failed")
                .str("err_new", "failed")
                .str("verdict_new", format!("FAILED ({e})"));
        }
    }
    rep.write(out, a.common.format)?;
    Ok(if ok { 0 } else { 1 })
}

pub fn gen(a: GenArgs, out: &mut dyn Write) -> CliResult {
    let cone = match &a.cone {
        Some(spec) => spec.parse::<SeparableCone>()?,
        None => SeparableCone::orthant(a.n)?,
    };
    if cone.dim() != a.n {
        return Err(CliError::Usage(format!(
            "cone `{cone}` has dimension {}, expected {}",
            cone.dim(),
            a.n
        )));
    }
    let (op, basis) =
        generate_instance(a.n, a.k, a.beta, a.lipschitz, a.seed).map_err(|e| match e {
            Error::InvalidArgument(m) => CliError::Usage(m),
            e => e.into(),
        })?;
    write_file(&a.out, &write_problem(&op, &cone))?;
    write_file(&a.basis_out, &write_basis(basis.raw()))?;
    let mut rep = Report::new();
    rep.int("n", a.n)
        .int("k", basis.rank())
        .num("beta", op.monotone_modulus())
        .num("lipschitz", op.lipschitz_constant())
        .str("problem", a.out.display().to_string())
        .str("basis", a.basis_out.display().to_string());
    rep.write(out, Format::Text)?;
    Ok(0)
}

pub fn certify(a: CertifyArgs, out: &mut dyn Write) -> CliResult {
    let (op, cone) = load_problem(&a.problem)?;
    let basis = load_basis(&a.basis, op.dim())?;
    let mut cfg = solve_config(&a.common, a.alpha);
    cfg.cert_tol = a.cert_tol;
    let r = solve_galerkin(&op, &cone, &basis, &cfg, None)?;
    let c = r
        .certificate
        .as_ref()
        .expect("galerkin reports a certificate");
    let eps_norm = c.epsilon.norm();
    let valid = c.is_valid(a.cert_tol);

    let mut rep = Report::new();
    rep.flag("converged", r.converged)
        .int("iters", r.iterations)
        .num("alpha", r.alpha().unwrap_or(f64::NAN))
        .num("epsilon_norm", eps_norm)
        .num("cert_nullspace", c.null_space_violation)
        .num("cert_nullspace_limit", a.cert_tol * (1.0 + eps_norm))
        .flag("cert_normalcone", c.normal_cone_ok)
        .num("cert_gap", c.complementarity_gap)
        .verdict("verdict", valid);
    rep.write(out, a.common.format)?;
    Ok(if r.converged && valid { 0 } else { 1 })
}

struct BenchRow {
    n: usize,
    method: &'static str,
    iters: usize,
    per_iter: Duration,
    total: Duration,
    residual: f64,
    certificate: &'static str,
    converged: bool,
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

fn bench_size(n: usize, a: &BenchArgs) -> Result<Vec<BenchRow>, CliError> {
    let inst = skew_instance(n, a.k, a.skew, a.seed)?;
    let alpha = inst.beta / (inst.lipschitz_bound * inst.lipschitz_bound);
    let cone = SeparableCone::orthant(n)?;

    let plcp = ProjectiveLcp::build(&inst.op, &inst.basis, alpha)?;
    let mut per_iter = Vec::new();
    let mut totals = Vec::new();
    let mut last: Option<SolveReport> = None;
    for _ in 0..a.repeats {
        let r = solve_ipm(&plcp, &cone, &IpmConfig::default())?;
        let s = r.ipm.as_ref().expect("ipm summary");
        per_iter.push(s.per_iteration());
        totals.push(s.elapsed);
        last = Some(r);
    }
    let r = last.expect("repeats >= 1");
    let s = r.ipm.as_ref().expect("ipm summary");
    let ipm = BenchRow {
        n,
        method: "ipm",
        iters: r.iterations,
        per_iter: median(per_iter),
        total: median(totals),
        residual: s.gap.max(s.infeasibility),
        certificate: "-",
        converged: r.converged,
    };

    // Declared moduli avoid a dense eigenvalue computation.
    let m = inst.op.matrix();
    let q = inst.op.offset();
    let op = FnOperator::new(
        n,
        |x: &DVector<f64>| m * x + q,
        inst.beta,
        inst.lipschitz_bound,
    )?;
    let cfg = SolveConfig::default();
    let mut per_iter = Vec::new();
    let mut totals = Vec::new();
    let mut last = None;
    for _ in 0..a.repeats {
        let started = Instant::now();
        let r = solve_galerkin(&op, &cone, &inst.basis, &cfg, None)?;
        let elapsed = started.elapsed();
        per_iter.push(elapsed / r.iterations.max(1) as u32);
        totals.push(elapsed);
        last = Some(r);
    }
    let r = last.expect("repeats >= 1");
    let valid = r
        .certificate
        .as_ref()
        .is_some_and(|c| c.is_valid(cfg.cert_tol));
    let galerkin = BenchRow {
        n,
        method: "galerkin",
        iters: r.iterations,
        per_iter: median(per_iter),
        total: median(totals),
        residual: r.final_step_norm,
        certificate: if valid { "valid" } else { "invalid" },
        converged: r.converged,
    };
    Ok(vec![ipm, galerkin])
}

pub fn bench(a: BenchArgs, out: &mut dyn Write) -> CliResult {
    if a.sizes.is_empty() || a.repeats == 0 || a.threads == 0 {
        return Err(CliError::Usage(
            "--sizes, --repeats and --threads must be non-empty and positive".into(),
        ));
    }
    if let Some(&n) = a.sizes.iter().find(|&&n| n < a.k || n == 0) {
        return Err(CliError::Usage(format!(
            "size {n} is smaller than k = {}",
            a.k
        )));
    }
    let threads = a.threads.min(a.sizes.len());
    let mut results: Vec<Option<Result<Vec<BenchRow>, CliError>>> =
        (0..a.sizes.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let a = &a;
                scope.spawn(move || {
                    (w..a.sizes.len())
                        .step_by(threads)
                        .map(|i| (i, bench_size(a.sizes[i], a)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("bench worker panicked") {
                results[i] = Some(r);
            }
        }
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r.expect("every size is assigned")?);
    }

    let header = [
        "n",
        "k",
        "method",
        "iters",
        "per_iter_s",
        "total_s",
        "residual",
        "certificate",
    ];
    let lines: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            [
                r.n.to_string(),
                a.k.to_string(),
                r.method.to_string(),
                r.iters.to_string(),
                fmt_f64(r.per_iter.as_secs_f64()),
                fmt_f64(r.total.as_secs_f64()),
                fmt_f64(r.residual),
                r.certificate.to_string(),
            ]
        })
        .collect();
    match a.format {
        Format::Kv => {
            writeln!(out, "{}", header.join("\t"))?;
            for l in &lines {
                writeln!(out, "{}", l.join("\t"))?;
            }
        }
        Format::Text => {
            let mut widths = header.map(str::len);
            for l in &lines {
                for (w, c) in widths.iter_mut().zip(l) {
                    *w = (*w).max(c.len());
                }
            }
            let fmt_line = |cells: Vec<&str>| {
                cells
                    .iter()
                    .zip(widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            writeln!(out, "{}", fmt_line(header.to_vec()))?;
            for l in &lines {
                writeln!(out, "{}", fmt_line(l.iter().map(String::as_str).collect()))?;
            }
        }
    }
    Ok(if rows.iter().all(|r| r.converged) {
        0
    } else {
        1
    })
}
