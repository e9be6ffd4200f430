//! Batch runs driven by a JSON configuration: the solve, identities,
//! convergence and spectrum suites, their CSV tables and a JSON summary.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bdies::{assemble_m12, PrincipalSolver};
use crate::coefficient::{make_coefficient, CoefficientField};
use crate::error::{Error, Result};
use crate::geometry::{build_ball_volume, build_sphere_boundary, Point3};
use crate::green::{
    first_green_residual, second_green_residual, third_green_boundary_residual, third_green_domain_residual, SmoothTestFunction,
};
use crate::laplace::{
    conormal_t_delta_pm_of_v, direct_v_delta_matrix, direct_w_delta_matrix, direct_wp_delta_matrix, LayerMethod, Side, SphereOperator,
};
use crate::linalg::{max_abs, DenseMatrix};
use crate::parametrix::{
    direct_v_matrix, direct_w_matrix, direct_wp_matrix, p_matrix, pot_r, pot_v_radial_conormal, pot_w, r_matrix, v_matrix, w_matrix,
    ParametrixContext, RemainderMethod,
};
use crate::verify::{
    convergence_study, injectivity_check_v, make_manufactured_case, rhs_vanishing_check, run_case, spectrum_compare, write_convergence_csv,
    write_errors_csv, write_identities_csv, write_json, write_spectrum_csv, CheckRow, ManufacturedCase, Resolution, SolveMethodConfig,
    SolverConfig,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 20240607;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub radius: f64,
    pub n_polar: usize,
    pub n_azimuth: usize,
    pub n_r: usize,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self { radius: 1.0, n_polar: 16, n_azimuth: 32, n_r: 8 }
    }
}

impl GeometryConfig {
    pub fn resolution(&self) -> Resolution {
        Resolution::from_boundary(self.radius, self.n_polar, self.n_azimuth, self.n_r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Solve,
    Identities,
    Convergence,
    Spectrum,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Solve, Suite::Identities, Suite::Convergence, Suite::Spectrum];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Solve => "solve",
            Suite::Identities => "identities",
            Suite::Convergence => "convergence",
            Suite::Spectrum => "spectrum",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}` (expected solve, identities, convergence or spectrum)")))
    }
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_case() -> String {
    "exp-linear".into()
}

fn default_suites() -> Vec<Suite> {
    vec![Suite::Solve]
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Contents of a run configuration file.
///
/// `coefficient` is optional; when omitted the case's own coefficient is
/// used, otherwise it replaces it and the data are rederived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub coefficient: Option<CoefficientConfig>,
    #[serde(default = "default_case")]
    pub case: String,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            geometry: GeometryConfig::default(),
            coefficient: None,
            case: default_case(),
            solver: SolverConfig::default(),
            suites: default_suites(),
            seed: DEFAULT_SEED,
            output_dir: default_output_dir(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed config: {e}")))
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Schema and range checks; returns the case with the effective
    /// coefficient.
    pub fn validate(&self) -> Result<ManufacturedCase> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version)));
        }
        let g = &self.geometry;
        if !g.n_polar.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "n_polar must be even so that no boundary node sits on the equator (the Dirichlet/Neumann partition curve), got {}",
                g.n_polar
            )));
        }
        if !(g.radius > 0.0 && g.radius.is_finite()) {
            return Err(Error::Config(format!("radius must be positive, got {}", g.radius)));
        }
        let s = &self.solver;
        if !(s.tol > 0.0 && s.tol.is_finite()) {
            return Err(Error::Config(format!("solver tol must be positive, got {}", s.tol)));
        }
        if s.max_iter == 0 || s.restart == 0 {
            return Err(Error::Config("solver max_iter and restart must be positive".into()));
        }
        if self.suites.is_empty() {
            return Err(Error::Config("no suites requested".into()));
        }
        if self.suites.contains(&Suite::Convergence) {
            for level in convergence_levels(g) {
                validate_mesh(&level)?;
            }
        }
        validate_mesh(&g.resolution())?;
        let mut case = make_manufactured_case(&self.case).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(c) = &self.coefficient {
            case.coefficient = make_coefficient(&c.name, &c.params).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(case)
    }
}

fn validate_mesh(res: &Resolution) -> Result<()> {
    build_sphere_boundary(res.radius, res.n_polar, res.n_azimuth).map_err(|e| Error::Config(e.to_string()))?;
    build_ball_volume(res.radius, res.n_r, res.volume_n_polar, res.volume_n_azimuth).map_err(|e| Error::Config(e.to_string()))?;
    Ok(())
}

fn round_even(v: usize) -> usize {
    v.div_ceil(2) * 2
}

/// Half, three quarters and all of the configured counts.
pub fn convergence_levels(g: &GeometryConfig) -> Vec<Resolution> {
    [(1, 2), (3, 4), (1, 1)]
        .into_iter()
        .map(|(p, q)| {
            let scale = |v: usize| (v * p).div_ceil(q);
            Resolution::from_boundary(g.radius, round_even(scale(g.n_polar)), round_even(scale(g.n_azimuth)), scale(g.n_r))
        })
        .collect()
}

/// Everything a run reports besides its CSV tables.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub seed: u64,
    pub case: String,
    pub coefficient: CoefficientField,
    pub resolution: String,
    pub suites: Vec<Suite>,
    pub checks: Vec<CheckRow>,
    pub failed: Vec<String>,
    pub passed: bool,
}

/// Run every requested suite and write the reports to `output_dir`.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    let case = config.validate()?;
    std::fs::create_dir_all(&config.output_dir)?;
    let out = |name: &str| config.output_dir.join(name);
    let res = config.geometry.resolution();
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    let mut checks = Vec::new();
    for &suite in &suites {
        match suite {
            Suite::Solve => {
                let result = run_case(&case, &res, &config.solver)?;
                write_errors_csv(out("errors.csv"), std::slice::from_ref(&result))?;
                checks.extend(solve_checks(&result.errors, &result.report, &config.solver));
            }
            Suite::Identities => {
                let rows = identity_checks(&res, case.coefficient, config.seed)?;
                write_identities_csv(out("identities.csv"), &rows)?;
                checks.extend(rows);
            }
            Suite::Convergence => {
                let rows = convergence_study(&case, &convergence_levels(&config.geometry), &config.solver)?;
                write_convergence_csv(out("convergence.csv"), &rows)?;
                for w in rows.windows(2) {
                    let lv = &w[1].resolution;
                    for (name, a, b) in [("u", w[0].err_u, w[1].err_u), ("psi", w[0].err_psi, w[1].err_psi), ("phi", w[0].err_phi, w[1].err_phi)] {
                        checks.push(CheckRow::at_most("convergence", &format!("err_{name}_ratio@{lv}"), b / a, 1.0 - 1e-12));
                    }
                    if let Some(p) = w[1].order_u {
                        checks.push(CheckRow::at_least("convergence", &format!("order_u@{lv}"), p, 1.0));
                    }
                }
            }
            Suite::Spectrum => {
                let mesh = res.boundary()?;
                let max_degree = 8.min(mesh.max_exact_degree());
                let mut rows = Vec::new();
                for op in [SphereOperator::SingleLayer, SphereOperator::DoubleLayer, SphereOperator::AdjointDoubleLayer, SphereOperator::Hypersingular] {
                    rows.extend(spectrum_compare(op, &mesh, max_degree)?);
                }
                write_spectrum_csv(out("spectrum.csv"), &rows)?;
                for r in &rows {
                    match (r.operator.as_str(), r.degree) {
                        ("V", 0) => checks.push(CheckRow::at_most("spectrum", "V_n0", r.error, 1e-12)),
                        ("V", n) if n <= 4 => checks.push(CheckRow::at_most("spectrum", &format!("V_n{n}"), r.error, 1e-2)),
                        ("L", 0) => checks.push(CheckRow::at_most("spectrum", "L_n0", r.error, 1e-10)),
                        _ => {}
                    }
                }
            }
        }
    }
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| format!("{}/{}", c.suite, c.name)).collect();
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        case: case.name.clone(),
        coefficient: case.coefficient,
        resolution: res.label(),
        suites,
        checks,
        passed: failed.is_empty(),
        failed,
    };
    write_json(out("summary.json"), &summary)?;
    Ok(summary)
}

fn solve_checks(e: &crate::verify::CaseErrors, report: &crate::bdies::SolveReport, solver: &SolverConfig) -> Vec<CheckRow> {
    let residual_tol = match solver.method {
        SolveMethodConfig::Dense => 1e-10,
        SolveMethodConfig::Gmres => solver.tol,
    };
    vec![
        CheckRow::at_most("solve", "err_u", e.u, 1e-2),
        CheckRow::at_most("solve", "err_phi", e.phi, 1e-2),
        CheckRow::at_most("solve", "err_psi", e.psi, 2e-2),
        CheckRow::at_most("solve", "injected_residual", e.injected_residual, 2e-2),
        CheckRow::at_most("solve", "relative_residual", report.relative_residual, residual_tol),
    ]
}

/// Seeded points with `|y| ≤ 0.9R`.
pub fn interior_targets(radius: f64, count: usize, seed: u64) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (0.9 * radius);
        if p.norm() <= 0.9 * radius {
            out.push(p);
        }
    }
    out
}

fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.max_abs_diff(b) / b.max_abs().max(f64::MIN_POSITIVE)
}

/// Test functions used by the Green-identity checks.
pub fn test_function_catalog() -> Vec<SmoothTestFunction> {
    vec![
        SmoothTestFunction::constant(1.0),
        SmoothTestFunction::linear([1.0, 2.0, 0.0]),
        SmoothTestFunction::square(1),
        SmoothTestFunction::Exponential { k: [0.3, -0.2, 0.5] },
    ]
}

/// Reductions, anchors, jump relations, scaling identities, Green
/// identities, injectivity, the principal block solve and the
/// right-hand-side probe, all at one resolution.
pub fn identity_checks(res: &Resolution, coefficient: CoefficientField, seed: u64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let one = res.context(make_coefficient("const", &[1.0])?)?;
    let ctx = one.with_coefficient(coefficient)?;
    let vol = one.volume_positions();
    let bnd = one.boundary_positions();
    let targets = interior_targets(res.radius, 20, seed);
    let mesh = &one.boundary;
    let layers = one.layers();

    let s = "reduction";
    rows.push(CheckRow::at_most(s, "P", p_matrix(&one, &targets)?.max_abs_diff(&one.newton().value_matrix(&targets)?), 1e-12));
    rows.push(CheckRow::at_most(
        s,
        "V",
        v_matrix(&one, &vol, LayerMethod::Auto)?.max_abs_diff(&layers.single_layer_matrix(&vol, LayerMethod::Auto)?),
        1e-12,
    ));
    rows.push(CheckRow::at_most(
        s,
        "W",
        w_matrix(&one, &vol, LayerMethod::Auto)?.max_abs_diff(&layers.double_layer_matrix(&vol, LayerMethod::Auto)?),
        1e-12,
    ));
    rows.push(CheckRow::at_most(s, "direct_V", direct_v_matrix(&one).max_abs_diff(&direct_v_delta_matrix(mesh)), 1e-12));
    rows.push(CheckRow::at_most(s, "direct_W", direct_w_matrix(&one).max_abs_diff(&direct_w_delta_matrix(mesh)), 1e-12));
    rows.push(CheckRow::at_most(s, "direct_Wp", direct_wp_matrix(&one).max_abs_diff(&direct_wp_delta_matrix(mesh)), 1e-12));
    let r_vol = r_matrix(&one, &vol, RemainderMethod::Relation)?.max_abs();
    let r_bnd = r_matrix(&one, &bnd, RemainderMethod::Relation)?.max_abs();
    rows.push(CheckRow::at_most(s, "R_blocks", r_vol.max(r_bnd), 1e-12));

    let s = "anchors";
    let ones_b = vec![1.0; mesh.len()];
    let ones_v = vec![1.0; vol.len()];
    let (p0, _) = one.newton().apply(&ones_v, &[Point3::ZERO])?;
    let r2 = res.radius * res.radius;
    rows.push(CheckRow::at_most(s, "P_delta[1](0)", (p0[0] + 0.5 * r2).abs(), 1e-3));
    let v1 = direct_v_delta_matrix(mesh).matvec(&ones_b);
    rows.push(CheckRow::at_most(s, "direct_V_delta[1]", v1.iter().map(|v| (v - res.radius).abs()).fold(0.0, f64::max), 1e-12));
    let w1 = direct_w_delta_matrix(mesh).matvec(&ones_b);
    rows.push(CheckRow::at_most(s, "direct_W_delta[1]", w1.iter().map(|v| (v + 0.5).abs()).fold(0.0, f64::max), 1e-12));
    let inside = [Point3::new(0.3, 0.2, -0.1) * res.radius, Point3::ZERO];
    let outside = [Point3::new(1.5, 0.0, 0.0) * res.radius, Point3::new(0.0, -3.0, 2.0) * res.radius];
    let wi = layers.double_layer(&ones_b, &inside, LayerMethod::Auto)?;
    let we = layers.double_layer(&ones_b, &outside, LayerMethod::Auto)?;
    rows.push(CheckRow::at_most(s, "W_delta[1]_interior", wi.iter().map(|v| (v + 1.0).abs()).fold(0.0, f64::max), 1e-8));
    rows.push(CheckRow::at_most(s, "W_delta[1]_exterior", max_abs(&we), 1e-8));
    rows.push(CheckRow::at_most(s, "T+V_delta[1]", max_abs(&conormal_t_delta_pm_of_v(mesh, &ones_b, Side::Interior)?), 1e-12));

    rows.extend(jump_checks(&one)?);
    if ctx.coefficient != one.coefficient {
        rows.extend(jump_checks(&ctx)?);
    }

    let s = "relations";
    let rho = ctx.volume.sample(|x| SmoothTestFunction::Exponential { k: [0.3, -0.2, 0.5] }.value(x));
    let rel = pot_r(&ctx, &rho, &targets, RemainderMethod::Relation)?;
    let dir = pot_r(&ctx, &rho, &targets, RemainderMethod::Direct)?;
    let diff: Vec<f64> = rel.iter().zip(&dir).map(|(a, b)| a - b).collect();
    rows.push(CheckRow::at_most(s, "R_relation_vs_direct", max_abs(&diff), 1e-3));
    let c = 2.0;
    let two = one.with_coefficient(make_coefficient("const", &[c])?)?;
    rows.push(CheckRow::at_most(s, "const_P", rel_diff(&p_matrix(&two, &targets)?.scaled(c), &p_matrix(&one, &targets)?), 1e-12));
    rows.push(CheckRow::at_most(
        s,
        "const_V",
        rel_diff(&v_matrix(&two, &vol, LayerMethod::Auto)?.scaled(c), &v_matrix(&one, &vol, LayerMethod::Auto)?),
        1e-12,
    ));
    rows.push(CheckRow::at_most(
        s,
        "const_W",
        rel_diff(&w_matrix(&two, &vol, LayerMethod::Auto)?, &w_matrix(&one, &vol, LayerMethod::Auto)?),
        1e-12,
    ));
    rows.push(CheckRow::at_most(s, "const_direct_V", rel_diff(&direct_v_matrix(&two).scaled(c), &direct_v_matrix(&one)), 1e-12));
    rows.push(CheckRow::at_most(s, "const_direct_W", rel_diff(&direct_w_matrix(&two), &direct_w_matrix(&one)), 1e-12));
    rows.push(CheckRow::at_most(s, "const_direct_Wp", rel_diff(&direct_wp_matrix(&two), &direct_wp_matrix(&one)), 1e-12));
    rows.push(CheckRow::at_most(s, "const_R", r_matrix(&two, &vol, RemainderMethod::Relation)?.max_abs(), 1e-12));

    let s = "green";
    let catalog = test_function_catalog();
    let (mut first, mut second) = (0.0_f64, 0.0_f64);
    for u in &catalog {
        for v in &catalog {
            first = first.max(first_green_residual(u, v, &ctx));
            second = second.max(second_green_residual(u, v, &ctx));
        }
    }
    rows.push(CheckRow::at_most(s, "first", first, 1e-5));
    rows.push(CheckRow::at_most(s, "second", second, 1e-5));
    let (mut dom, mut bd) = (0.0_f64, 0.0_f64);
    for u in &catalog {
        dom = dom.max(max_abs(&third_green_domain_residual(u, &ctx, &targets)?));
        bd = bd.max(max_abs(&third_green_boundary_residual(u, &ctx)?));
    }
    rows.push(CheckRow::at_most(s, "third_domain", dom, 1e-2));
    rows.push(CheckRow::at_most(s, "third_boundary", bd, 1e-2));

    let s = "injectivity";
    let inj = injectivity_check_v(coefficient, std::slice::from_ref(mesh))?;
    rows.push(CheckRow::at_least(s, "sigma_min_V", inj.levels[0].sigma_min_v, 1e-6));
    rows.push(CheckRow::at_least(s, "sigma_min_V_dirichlet", inj.levels[0].sigma_min_v_dirichlet, 1e-6));
    let base = injectivity_check_v(make_coefficient("const", &[1.0])?, std::slice::from_ref(mesh))?;
    let half = injectivity_check_v(make_coefficient("const", &[2.0])?, std::slice::from_ref(mesh))?;
    let ratio = 2.0 * half.levels[0].sigma_min_v / base.levels[0].sigma_min_v;
    rows.push(CheckRow::at_most(s, "const_2_halves_sigma_min", (ratio - 1.0).abs(), 1e-12));

    let s = "principal";
    let sys = assemble_m12(&ctx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rhs: Vec<f64> = (0..sys.n_unknowns()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let block = PrincipalSolver::new(&sys)?.solve(&rhs);
    let dense = sys.principal_matrix().lu()?.solve(&rhs);
    let diff: Vec<f64> = block.iter().zip(&dense).map(|(a, b)| a - b).collect();
    rows.push(CheckRow::at_most(s, "block_vs_dense", max_abs(&diff) / max_abs(&dense), 1e-10));

    let s = "rhs_probe";
    let probe = rhs_vanishing_check(&ctx, seed, 20)?;
    rows.push(CheckRow::at_most(s, "zero_data", probe.zero_output, 0.0));
    rows.push(CheckRow::at_least(s, "min_nonzero_output", probe.min_output(), 1e-8));
    Ok(rows)
}

/// Near-surface limits of `W` and `T V` against the jump relations, for
/// the densities `1`, `Y₁` and `Y₂`.
fn jump_checks(ctx: &ParametrixContext) -> Result<Vec<CheckRow>> {
    let eps = 1e-6;
    let mesh = &ctx.boundary;
    let r = mesh.radius;
    let inner: Vec<Point3> = mesh.positions().map(|p| p * (1.0 - eps)).collect();
    let outer: Vec<Point3> = mesh.positions().map(|p| p * (1.0 + eps)).collect();
    let w_dir = direct_w_matrix(ctx);
    let wp_dir = direct_wp_matrix(ctx);
    let label = format!("{}{:?}", ctx.coefficient.name(), ctx.coefficient.params());
    let densities: [(&str, Vec<f64>); 3] = [
        ("1", vec![1.0; mesh.len()]),
        ("Y1", mesh.sample(|n| n.pos.get(2) / r)),
        ("Y2", mesh.sample(|n| 0.5 * (3.0 * (n.pos.get(2) / r).powi(2) - 1.0))),
    ];
    let gap = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let mut rows = Vec::new();
    for (name, tau) in &densities {
        let dw = w_dir.matvec(tau);
        let dwp = wp_dir.matvec(tau);
        let plus: Vec<f64> = dw.iter().zip(tau).map(|(w, t)| -0.5 * t + w).collect();
        let minus: Vec<f64> = dw.iter().zip(tau).map(|(w, t)| 0.5 * t + w).collect();
        let e_w = gap(&pot_w(ctx, tau, &inner)?, &plus).max(gap(&pot_w(ctx, tau, &outer)?, &minus));
        rows.push(CheckRow::at_most("jumps", &format!("W[{name}]@{label}"), e_w, 5e-3));
        let plus: Vec<f64> = dwp.iter().zip(tau).map(|(w, t)| 0.5 * t + w).collect();
        let minus: Vec<f64> = dwp.iter().zip(tau).map(|(w, t)| -0.5 * t + w).collect();
        let e_t = gap(&pot_v_radial_conormal(ctx, tau, &inner)?, &plus).max(gap(&pot_v_radial_conormal(ctx, tau, &outer)?, &minus));
        rows.push(CheckRow::at_most("jumps", &format!("TV[{name}]@{label}"), e_t, 5e-3));
    }
    Ok(rows)
}
