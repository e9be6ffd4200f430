//! Manufactured solutions, convergence studies, spectrum comparisons and the
//! injectivity and right-hand-side probes, plus their CSV/JSON reports.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bdies::{
    assemble_f0, assemble_m12, build_extensions, solve_dense, solve_gmres_preconditioned, BdiesSystem, ExtensionPair, RhsOperator, SolveMethod,
    SolveReport,
};
use crate::coefficient::{make_coefficient, CoefficientField};
use crate::error::{Error, Result};
use crate::geometry::{build_ball_volume, build_sphere_boundary, BoundaryMesh, Region};
use crate::green::SmoothTestFunction;
use crate::harmonics::ShCoefficients;
use crate::laplace::{direct_v_delta_matrix, direct_w_delta_matrix, direct_wp_delta_matrix, sphere_spectral_apply_nodal, SphereOperator};
use crate::linalg::{max_abs, GmresConfig};
use crate::parametrix::{direct_v_matrix, ParametrixContext};

/// Mesh parameters for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub radius: f64,
    pub n_polar: usize,
    pub n_azimuth: usize,
    pub n_r: usize,
    pub volume_n_polar: usize,
    pub volume_n_azimuth: usize,
}

impl Resolution {
    /// Boundary `n_polar × n_azimuth`; the volume uses `n_r` radial nodes and
    /// three quarters of the boundary angular counts.
    pub fn from_boundary(radius: f64, n_polar: usize, n_azimuth: usize, n_r: usize) -> Self {
        Self { radius, n_polar, n_azimuth, n_r, volume_n_polar: (3 * n_polar).div_ceil(4), volume_n_azimuth: (3 * n_azimuth).div_ceil(4) }
    }

    pub fn coarse() -> Self {
        Self::from_boundary(1.0, 8, 16, 4)
    }

    pub fn medium() -> Self {
        Self::from_boundary(1.0, 12, 24, 6)
    }

    /// Boundary 16×32, volume 8×12×24.
    pub fn default_level() -> Self {
        Self::from_boundary(1.0, 16, 32, 8)
    }

    /// Every count of the default level doubled.
    pub fn refined() -> Self {
        Self::from_boundary(1.0, 32, 64, 16)
    }

    /// Representative mesh width, `π R / n_polar`.
    pub fn h(&self) -> f64 {
        std::f64::consts::PI * self.radius / self.n_polar as f64
    }

    pub fn boundary(&self) -> Result<BoundaryMesh> {
        build_sphere_boundary(self.radius, self.n_polar, self.n_azimuth)
    }

    pub fn context(&self, coefficient: CoefficientField) -> Result<ParametrixContext> {
        let volume = build_ball_volume(self.radius, self.n_r, self.volume_n_polar, self.volume_n_azimuth)?;
        ParametrixContext::new(coefficient, self.boundary()?, volume)
    }

    pub fn label(&self) -> String {
        format!("{}x{}/{}x{}x{}", self.n_polar, self.n_azimuth, self.n_r, self.volume_n_polar, self.volume_n_azimuth)
    }
}

/// Exact solution paired with a coefficient; data are derived from both.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManufacturedCase {
    pub name: String,
    pub coefficient: CoefficientField,
    pub solution: SmoothTestFunction,
}

pub const CASE_NAMES: [&str; 4] = ["laplace-linear", "exp-linear", "quadratic", "constant"];

pub fn make_manufactured_case(name: &str) -> Result<ManufacturedCase> {
    let (coefficient, solution) = match name {
        "laplace-linear" => (make_coefficient("const", &[1.0])?, SmoothTestFunction::linear([1.0, 2.0, 0.0])),
        "exp-linear" => (make_coefficient("exp_linear", &[2.0])?, SmoothTestFunction::linear([1.0, 0.0, 0.0])),
        "quadratic" => (make_coefficient("one_plus_x1_squared", &[])?, SmoothTestFunction::square(1)),
        "constant" => (make_coefficient("const", &[2.5])?, SmoothTestFunction::constant(1.0)),
        other => return Err(Error::UnknownCase(other.to_string())),
    };
    Ok(ManufacturedCase { name: name.to_string(), coefficient, solution })
}

impl ManufacturedCase {
    /// `f = 𝒜u` at the volume nodes.
    pub fn f(&self, ctx: &ParametrixContext) -> Vec<f64> {
        ctx.volume.sample(|x| self.solution.apply_operator(&self.coefficient, x))
    }

    /// `φ₀ = γ⁺u` on the Dirichlet nodes.
    pub fn phi0(&self, ctx: &ParametrixContext) -> Vec<f64> {
        ctx.boundary.region_indices(Region::Dirichlet).iter().map(|&i| self.solution.value(ctx.boundary.nodes[i].pos)).collect()
    }

    /// `ψ₀ = T⁺u` on the Neumann nodes.
    pub fn psi0(&self, ctx: &ParametrixContext) -> Vec<f64> {
        ctx.boundary
            .region_indices(Region::Neumann)
            .iter()
            .map(|&i| self.solution.conormal(&self.coefficient, &ctx.boundary.nodes[i]))
            .collect()
    }

    pub fn extensions(&self, ctx: &ParametrixContext) -> Result<ExtensionPair> {
        build_extensions(ctx, &self.phi0(ctx), &self.psi0(ctx))
    }

    /// Exact `(u, ψ, φ)` stacked in system order.
    pub fn exact_unknowns(&self, ctx: &ParametrixContext, sys: &BdiesSystem) -> Vec<f64> {
        let u = ctx.volume.sample(|x| self.solution.value(x));
        let t = self.solution.conormal_trace(ctx);
        let g = self.solution.trace(ctx);
        let psi: Vec<f64> = sys.dirichlet.iter().map(|&i| t[i]).collect();
        let phi: Vec<f64> = sys.neumann.iter().map(|&i| g[i]).collect();
        sys.stack(&u, &psi, &phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: SolveMethodConfig,
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethodConfig {
    Dense,
    Gmres,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { method: SolveMethodConfig::Dense, tol: 1e-8, max_iter: 200, restart: 50 }
    }
}

impl SolverConfig {
    pub fn gmres(&self) -> GmresConfig {
        GmresConfig { tol: self.tol, max_iter: self.max_iter, restart: self.restart }
    }
}

/// Errors against the exact solution. `u` uses the weighted L² norm over
/// the volume; `φ`, `ψ` and the recovered traces use the max-norm relative
/// to the max of the exact Cauchy datum on all of `S` (absolute when that
/// max vanishes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseErrors {
    pub u: f64,
    pub phi: f64,
    pub psi: f64,
    pub gamma_u: f64,
    pub t_u: f64,
    /// `‖Ax* − b‖_∞/‖b‖_∞` with the exact unknowns injected.
    pub injected_residual: f64,
}

fn rel_max(err: f64, scale: f64) -> f64 {
    if scale < 1e-12 {
        err
    } else {
        err / scale
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub case: String,
    pub resolution: Resolution,
    pub report: SolveReport,
    pub errors: CaseErrors,
}

pub fn case_errors(case: &ManufacturedCase, ctx: &ParametrixContext, sys: &BdiesSystem, b: &[f64], report: &SolveReport) -> CaseErrors {
    let exact_u = ctx.volume.sample(|x| case.solution.value(x));
    let num: f64 = ctx.volume.nodes.iter().zip(report.u.iter().zip(&exact_u)).map(|(n, (a, e))| n.weight * (a - e) * (a - e)).sum();
    let den: f64 = ctx.volume.nodes.iter().zip(&exact_u).map(|(n, e)| n.weight * e * e).sum();
    let u = if den.sqrt() < 1e-12 { num.sqrt() } else { (num / den).sqrt() };
    let g = case.solution.trace(ctx);
    let t = case.solution.conormal_trace(ctx);
    let (gs, ts) = (max_abs(&g), max_abs(&t));
    let phi_err = sys.neumann.iter().zip(&report.phi).fold(0.0_f64, |m, (&i, v)| m.max((v - g[i]).abs()));
    let psi_err = sys.dirichlet.iter().zip(&report.psi).fold(0.0_f64, |m, (&i, v)| m.max((v - t[i]).abs()));
    let gu_err = report.gamma_u.iter().zip(&g).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let tu_err = report.t_u.iter().zip(&t).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let xs = case.exact_unknowns(ctx, sys);
    let ax = sys.apply(&xs);
    let r: Vec<f64> = ax.iter().zip(b).map(|(a, b)| a - b).collect();
    let bn = max_abs(b);
    CaseErrors {
        u,
        phi: rel_max(phi_err, gs),
        psi: rel_max(psi_err, ts),
        gamma_u: rel_max(gu_err, gs),
        t_u: rel_max(tu_err, ts),
        injected_residual: rel_max(max_abs(&r), bn),
    }
}

/// Full pipeline: extensions, `F₀`, assembly, solve, recovery and errors.
pub fn run_case(case: &ManufacturedCase, resolution: &Resolution, solver: &SolverConfig) -> Result<CaseResult> {
    let ctx = resolution.context(case.coefficient)?;
    let ext = case.extensions(&ctx)?;
    let rhs = assemble_f0(&ctx, &case.f(&ctx), &ext)?;
    let sys = assemble_m12(&ctx)?;
    let report = match solver.method {
        SolveMethodConfig::Dense => solve_dense(&sys, &rhs, &ext)?,
        SolveMethodConfig::Gmres => solve_gmres_preconditioned(&sys, &rhs, &ext, &solver.gmres())?,
    };
    let errors = case_errors(case, &ctx, &sys, &rhs.stacked(), &report);
    Ok(CaseResult { case: case.name.clone(), resolution: *resolution, report, errors })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub case: String,
    pub level: usize,
    pub resolution: String,
    pub h: f64,
    pub err_u: f64,
    pub err_psi: f64,
    pub err_phi: f64,
    /// Observed orders against the previous level, `ln(e₁/e₂)/ln(h₁/h₂)`.
    pub order_u: Option<f64>,
    pub order_psi: Option<f64>,
    pub order_phi: Option<f64>,
}

fn observed_order(e1: f64, e2: f64, h1: f64, h2: f64) -> Option<f64> {
    (e1 > 0.0 && e2 > 0.0).then(|| (e1 / e2).ln() / (h1 / h2).ln())
}

pub fn convergence_study(case: &ManufacturedCase, levels: &[Resolution], solver: &SolverConfig) -> Result<Vec<ConvergenceRow>> {
    if levels.len() < 3 {
        return Err(Error::Config(format!("a convergence study needs at least 3 levels, got {}", levels.len())));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for (k, level) in levels.iter().enumerate() {
        let r = run_case(case, level, solver)?;
        let prev = rows.last();
        let h = level.h();
        rows.push(ConvergenceRow {
            case: case.name.clone(),
            level: k,
            resolution: level.label(),
            h,
            err_u: r.errors.u,
            err_psi: r.errors.psi,
            err_phi: r.errors.phi,
            order_u: prev.and_then(|p| observed_order(p.err_u, r.errors.u, p.h, h)),
            order_psi: prev.and_then(|p| observed_order(p.err_psi, r.errors.psi, p.h, h)),
            order_phi: prev.and_then(|p| observed_order(p.err_phi, r.errors.phi, p.h, h)),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub operator: String,
    pub degree: usize,
    pub exact: f64,
    pub numeric: f64,
    /// Relative error (absolute when the exact eigenvalue is zero).
    pub error: f64,
}

/// Apply the Nyström operator (or, for `ℒ_Δ`, the projected oracle) to the
/// sampled zonal harmonic of each degree and regress the eigenvalue as the
/// weighted Rayleigh quotient.
pub fn spectrum_compare(op: SphereOperator, mesh: &BoundaryMesh, max_degree: usize) -> Result<Vec<SpectrumRow>> {
    if (mesh.radius - 1.0).abs() > 1e-14 {
        return Err(Error::NonUnitSphere(mesh.radius));
    }
    let basis = crate::harmonics::ShBasis::for_mesh(mesh);
    let matrix = match op {
        SphereOperator::SingleLayer => Some(direct_v_delta_matrix(mesh)),
        SphereOperator::DoubleLayer => Some(direct_w_delta_matrix(mesh)),
        SphereOperator::AdjointDoubleLayer => Some(direct_wp_delta_matrix(mesh)),
        SphereOperator::Hypersingular => None,
    };
    let mut rows = Vec::new();
    for n in 0..=max_degree {
        let y = ShCoefficients::single(n, n, 0).synthesize(mesh);
        let ky = match &matrix {
            Some(m) => m.matvec(&y),
            None => sphere_spectral_apply_nodal(op, &basis, &y)?,
        };
        let num: f64 = mesh.nodes.iter().zip(ky.iter().zip(&y)).map(|(nd, (a, b))| nd.weight * a * b).sum();
        let den: f64 = mesh.nodes.iter().zip(&y).map(|(nd, b)| nd.weight * b * b).sum();
        let numeric = num / den;
        let exact = op.eigenvalue(n);
        let error = if exact == 0.0 { (numeric - exact).abs() } else { ((numeric - exact) / exact).abs() };
        rows.push(SpectrumRow { operator: op.name().to_string(), degree: n, exact, numeric, error });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectivityLevel {
    pub n_boundary: usize,
    pub sigma_min_v: f64,
    pub sigma_min_v_dirichlet: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectivityReport {
    pub coefficient: String,
    pub levels: Vec<InjectivityLevel>,
}

impl InjectivityReport {
    /// Relative drop of `σ_min(𝒱)` from the first to the last level.
    pub fn drop_v(&self) -> f64 {
        let (a, b) = (self.levels[0].sigma_min_v, self.levels[self.levels.len() - 1].sigma_min_v);
        (a - b) / a
    }

    pub fn drop_v_dirichlet(&self) -> f64 {
        let (a, b) = (self.levels[0].sigma_min_v_dirichlet, self.levels[self.levels.len() - 1].sigma_min_v_dirichlet);
        (a - b) / a
    }
}

fn smallest(s: &[f64]) -> f64 {
    s.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Smallest singular values (full SVD) of `𝒱` and of its Dirichlet block.
pub fn injectivity_check_v(coefficient: CoefficientField, boundaries: &[BoundaryMesh]) -> Result<InjectivityReport> {
    let mut levels = Vec::new();
    for mesh in boundaries {
        let volume = build_ball_volume(mesh.radius, 2, 2, 8)?;
        let ctx = ParametrixContext::new(coefficient, mesh.clone(), volume)?;
        let v = direct_v_matrix(&ctx);
        let d = mesh.region_indices(Region::Dirichlet);
        let vdd = v.select_rows(&d).select_columns(&d);
        levels.push(InjectivityLevel {
            n_boundary: mesh.len(),
            sigma_min_v: smallest(&v.singular_values()),
            sigma_min_v_dirichlet: smallest(&vdd.singular_values()),
        });
    }
    Ok(InjectivityReport { coefficient: format!("{}{:?}", coefficient.name(), coefficient.params()), levels })
}

#[derive(Debug, Clone, Serialize)]
pub struct RhsProbe {
    pub seed: u64,
    /// Max-norm of the output for zero data.
    pub zero_output: f64,
    /// Max-norm of `(F₀, γ⁺F₀ − Φ₀)` for each seeded input.
    pub outputs: Vec<f64>,
}

impl RhsProbe {
    pub fn min_output(&self) -> f64 {
        smallest(&self.outputs)
    }
}

/// Map `(f, Φ₀, Ψ₀) ↦ (F₀, γ⁺F₀ − Φ₀)` for zero data and `count` seeded
/// random inputs with entries uniform in `[−1, 1]`.
pub fn rhs_vanishing_check(ctx: &ParametrixContext, seed: u64, count: usize) -> Result<RhsProbe> {
    let d = ctx.boundary.region_indices(Region::Dirichlet);
    let n = ctx.boundary.region_indices(Region::Neumann);
    let op = RhsOperator::new(ctx)?;
    let zero = build_extensions(ctx, &vec![0.0; d.len()], &vec![0.0; n.len()])?;
    let z = op.apply(&vec![0.0; ctx.volume.len()], &zero)?;
    let zero_output = max_abs(&z.stacked());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outputs = Vec::with_capacity(count);
    for _ in 0..count {
        let f: Vec<f64> = (0..ctx.volume.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let phi0: Vec<f64> = (0..d.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let psi0: Vec<f64> = (0..n.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ext = build_extensions(ctx, &phi0, &psi0)?;
        outputs.push(max_abs(&op.apply(&f, &ext)?.stacked()));
    }
    Ok(RhsProbe { seed, zero_output, outputs })
}

/// One named check with its measured value and tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRow {
    pub fn at_most(suite: &str, name: &str, value: f64, tolerance: f64) -> Self {
        Self { suite: suite.into(), name: name.into(), value, tolerance, passed: value.is_finite() && value <= tolerance }
    }

    pub fn at_least(suite: &str, name: &str, value: f64, tolerance: f64) -> Self {
        Self { suite: suite.into(), name: name.into(), value, tolerance, passed: value.is_finite() && value >= tolerance }
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

fn write_rows<P: AsRef<Path>>(path: P, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_errors_csv<P: AsRef<Path>>(path: P, results: &[CaseResult]) -> Result<()> {
    write_rows(
        path,
        &["case", "resolution", "method", "iterations", "err_u", "err_phi", "err_psi", "err_gamma_u", "err_t_u", "injected_residual", "relative_residual", "trace_mismatch"],
        results.iter().map(|r| {
            vec![
                r.case.clone(),
                r.resolution.label(),
                match r.report.method {
                    SolveMethod::Dense => "dense".into(),
                    SolveMethod::Gmres => "gmres".into(),
                },
                r.report.iterations.to_string(),
                fmt(r.errors.u),
                fmt(r.errors.phi),
                fmt(r.errors.psi),
                fmt(r.errors.gamma_u),
                fmt(r.errors.t_u),
                fmt(r.errors.injected_residual),
                fmt(r.report.relative_residual),
                fmt(r.report.trace_mismatch),
            ]
        }),
    )
}

pub fn write_convergence_csv<P: AsRef<Path>>(path: P, rows: &[ConvergenceRow]) -> Result<()> {
    write_rows(
        path,
        &["case", "level", "resolution", "h", "err_u", "err_psi", "err_phi", "order_u", "order_psi", "order_phi"],
        rows.iter().map(|r| {
            vec![
                r.case.clone(),
                r.level.to_string(),
                r.resolution.clone(),
                fmt(r.h),
                fmt(r.err_u),
                fmt(r.err_psi),
                fmt(r.err_phi),
                fmt_opt(r.order_u),
                fmt_opt(r.order_psi),
                fmt_opt(r.order_phi),
            ]
        }),
    )
}

pub fn write_spectrum_csv<P: AsRef<Path>>(path: P, rows: &[SpectrumRow]) -> Result<()> {
    write_rows(
        path,
        &["operator", "degree", "exact", "numeric", "error"],
        rows.iter().map(|r| vec![r.operator.clone(), r.degree.to_string(), fmt(r.exact), fmt(r.numeric), fmt(r.error)]),
    )
}

pub fn write_identities_csv<P: AsRef<Path>>(path: P, rows: &[CheckRow]) -> Result<()> {
    write_rows(
        path,
        &["suite", "name", "value", "tolerance", "passed"],
        rows.iter().map(|r| vec![r.suite.clone(), r.name.clone(), fmt(r.value), fmt(r.tolerance), r.passed.to_string()]),
    )
}

pub fn write_json<P: AsRef<Path>, T: Serialize>(path: P, value: &T) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}
