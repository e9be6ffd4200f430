//! The segregated boundary-domain system for the mixed problem:
//!
//! ```text
//! u + ℛu − Vψ + Wφ           = F₀          in Ω
//! γ⁺ℛu − 𝒱ψ + (½I + 𝒲)φ      = γ⁺F₀ − Φ₀   on S
//! F₀ = 𝒫f + VΨ₀ − WΦ₀
//! ```
//!
//! with `ψ` supported on the Dirichlet part and `φ` on the Neumann part.
//! Unknowns are nodal values (Nyström collocation) ordered `[u, ψ, φ]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::laplace::{BoundaryField, LayerMethod, VolumeField};
use crate::linalg::{
    estimate_condition, estimate_sigma_min, gmres, max_abs, norm2, DenseMatrix, GmresConfig, LinearOperator, LuFactor,
};
use crate::parametrix::{direct_v_matrix, direct_w_matrix, p_matrix, r_matrix, v_matrix, w_matrix, ParametrixContext, RemainderMethod};

/// Continuations of the boundary data to all of `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionPair {
    /// Equals `φ₀` on the Dirichlet nodes.
    pub phi0: BoundaryField,
    /// Equals `ψ₀` on the Neumann nodes.
    pub psi0: BoundaryField,
}

/// Zero-extend `φ₀` (given on the Dirichlet nodes, in index order) and `ψ₀`
/// (given on the Neumann nodes) to the whole boundary.
pub fn build_extensions(ctx: &ParametrixContext, phi0_dirichlet: &[f64], psi0_neumann: &[f64]) -> Result<ExtensionPair> {
    let d = ctx.boundary.region_indices(Region::Dirichlet);
    let n = ctx.boundary.region_indices(Region::Neumann);
    if phi0_dirichlet.len() != d.len() {
        return Err(Error::LengthMismatch { expected: d.len(), got: phi0_dirichlet.len() });
    }
    if psi0_neumann.len() != n.len() {
        return Err(Error::LengthMismatch { expected: n.len(), got: psi0_neumann.len() });
    }
    let mut phi0 = vec![0.0; ctx.boundary.len()];
    let mut psi0 = vec![0.0; ctx.boundary.len()];
    for (&i, &v) in d.iter().zip(phi0_dirichlet) {
        phi0[i] = v;
    }
    for (&i, &v) in n.iter().zip(psi0_neumann) {
        psi0[i] = v;
    }
    Ok(ExtensionPair { phi0, psi0 })
}

/// Right-hand side of the system.
#[derive(Debug, Clone, PartialEq)]
pub struct BdiesRhs {
    /// `F₀` at the volume nodes.
    pub r1: VolumeField,
    /// `γ⁺F₀ − Φ₀` at the boundary nodes.
    pub r2: BoundaryField,
    /// `γ⁺F₀` at the boundary nodes.
    pub gamma_f0: BoundaryField,
}

impl BdiesRhs {
    pub fn stacked(&self) -> Vec<f64> {
        let mut v = self.r1.clone();
        v.extend_from_slice(&self.r2);
        v
    }
}

/// The linear map `(f, Φ₀, Ψ₀) ↦ (F₀, γ⁺F₀ − Φ₀)` with its matrices
/// assembled once.
#[derive(Debug, Clone)]
pub struct RhsOperator {
    p_volume: DenseMatrix,
    p_boundary: DenseMatrix,
    v_volume: DenseMatrix,
    w_volume: DenseMatrix,
    v_direct: DenseMatrix,
    w_direct: DenseMatrix,
}

impl RhsOperator {
    pub fn new(ctx: &ParametrixContext) -> Result<Self> {
        let vol = ctx.volume_positions();
        let bnd = ctx.boundary_positions();
        Ok(Self {
            p_volume: p_matrix(ctx, &vol)?,
            p_boundary: p_matrix(ctx, &bnd)?,
            v_volume: v_matrix(ctx, &vol, LayerMethod::Auto)?,
            w_volume: w_matrix(ctx, &vol, LayerMethod::Auto)?,
            v_direct: direct_v_matrix(ctx),
            w_direct: direct_w_matrix(ctx),
        })
    }

    /// `F₀ = 𝒫f + VΨ₀ − WΦ₀` in the volume and `γ⁺F₀ − Φ₀` on `S`, with
    /// `γ⁺WΦ₀ = −Φ₀/2 + 𝒲Φ₀`.
    pub fn apply(&self, f: &[f64], ext: &ExtensionPair) -> Result<BdiesRhs> {
        let (nv, nb) = (self.p_volume.nrows(), self.v_direct.nrows());
        if f.len() != self.p_volume.ncols() {
            return Err(Error::LengthMismatch { expected: self.p_volume.ncols(), got: f.len() });
        }
        for g in [&ext.phi0, &ext.psi0] {
            if g.len() != nb {
                return Err(Error::LengthMismatch { expected: nb, got: g.len() });
            }
        }
        let pf = self.p_volume.matvec(f);
        let vpsi = self.v_volume.matvec(&ext.psi0);
        let wphi = self.w_volume.matvec(&ext.phi0);
        let r1 = (0..nv).map(|i| pf[i] + vpsi[i] - wphi[i]).collect();
        let gpf = self.p_boundary.matvec(f);
        let dv = self.v_direct.matvec(&ext.psi0);
        let dw = self.w_direct.matvec(&ext.phi0);
        let gamma_f0: Vec<f64> = (0..nb).map(|i| gpf[i] + dv[i] - (-0.5 * ext.phi0[i] + dw[i])).collect();
        let r2 = gamma_f0.iter().zip(&ext.phi0).map(|(g, p)| g - p).collect();
        Ok(BdiesRhs { r1, r2, gamma_f0 })
    }
}

/// Right-hand side for one data set; see [`RhsOperator::apply`].
pub fn assemble_f0(ctx: &ParametrixContext, f: &[f64], ext: &ExtensionPair) -> Result<BdiesRhs> {
    RhsOperator::new(ctx)?.apply(f, ext)
}

/// Assembled operators of the system, kept whole so that both the full
/// system and its principal part can be formed.
#[derive(Debug, Clone)]
pub struct BdiesSystem {
    pub n_volume: usize,
    pub n_boundary: usize,
    pub dirichlet: Vec<usize>,
    pub neumann: Vec<usize>,
    /// `ℛ` at volume nodes.
    pub r_volume: DenseMatrix,
    /// `γ⁺ℛ` at boundary nodes.
    pub r_boundary: DenseMatrix,
    /// `V` from all boundary nodes to volume nodes.
    pub v_volume: DenseMatrix,
    /// `W` from all boundary nodes to volume nodes.
    pub w_volume: DenseMatrix,
    /// `𝒱` on `S`.
    pub v_direct: DenseMatrix,
    /// `𝒲` on `S`.
    pub w_direct: DenseMatrix,
}

pub fn assemble_m12(ctx: &ParametrixContext) -> Result<BdiesSystem> {
    let vol = ctx.volume_positions();
    let bnd = ctx.boundary_positions();
    Ok(BdiesSystem {
        n_volume: vol.len(),
        n_boundary: bnd.len(),
        dirichlet: ctx.boundary.region_indices(Region::Dirichlet),
        neumann: ctx.boundary.region_indices(Region::Neumann),
        r_volume: r_matrix(ctx, &vol, RemainderMethod::Relation)?,
        r_boundary: r_matrix(ctx, &bnd, RemainderMethod::Relation)?,
        v_volume: v_matrix(ctx, &vol, LayerMethod::Auto)?,
        w_volume: w_matrix(ctx, &vol, LayerMethod::Auto)?,
        v_direct: direct_v_matrix(ctx),
        w_direct: direct_w_matrix(ctx),
    })
}

fn half_identity_columns(n: usize, cols: &[usize]) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, cols.len());
    for (c, &i) in cols.iter().enumerate() {
        m.set(i, c, 0.5);
    }
    m
}

impl BdiesSystem {
    pub fn n_unknowns(&self) -> usize {
        self.n_volume + self.dirichlet.len() + self.neumann.len()
    }

    /// `I + ℛ`.
    pub fn a_uu(&self) -> DenseMatrix {
        self.r_volume.add(&DenseMatrix::identity(self.n_volume))
    }

    /// `−V` restricted to Dirichlet columns.
    pub fn a_upsi(&self) -> DenseMatrix {
        self.v_volume.select_columns(&self.dirichlet).scaled(-1.0)
    }

    /// `W` restricted to Neumann columns.
    pub fn a_uphi(&self) -> DenseMatrix {
        self.w_volume.select_columns(&self.neumann)
    }

    /// `−𝒱` restricted to Dirichlet columns.
    pub fn b_psi(&self) -> DenseMatrix {
        self.v_direct.select_columns(&self.dirichlet).scaled(-1.0)
    }

    /// `½I + 𝒲` restricted to Neumann columns.
    pub fn b_phi(&self) -> DenseMatrix {
        self.w_direct.select_columns(&self.neumann).add(&half_identity_columns(self.n_boundary, &self.neumann))
    }

    /// The stacked square matrix of the full system.
    pub fn matrix(&self) -> DenseMatrix {
        DenseMatrix::from_blocks(&[
            vec![&self.a_uu(), &self.a_upsi(), &self.a_uphi()],
            vec![&self.r_boundary, &self.b_psi(), &self.b_phi()],
        ])
    }

    /// The principal part: blocks `(I, −V, W; 0, −𝒱, ½I)`.
    pub fn principal_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_blocks(&[
            vec![&DenseMatrix::identity(self.n_volume), &self.a_upsi(), &self.a_uphi()],
            vec![
                &DenseMatrix::zeros(self.n_boundary, self.n_volume),
                &self.b_psi(),
                &half_identity_columns(self.n_boundary, &self.neumann),
            ],
        ])
    }

    /// Split a stacked unknown vector into `(u, ψ, φ)`.
    pub fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], &'a [f64], &'a [f64]) {
        let (u, rest) = x.split_at(self.n_volume);
        let (psi, phi) = rest.split_at(self.dirichlet.len());
        (u, psi, phi)
    }

    /// Stack `(u, ψ, φ)` into one unknown vector.
    pub fn stack(&self, u: &[f64], psi: &[f64], phi: &[f64]) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.n_unknowns());
        x.extend_from_slice(u);
        x.extend_from_slice(psi);
        x.extend_from_slice(phi);
        x
    }

    /// Apply the full system without forming the stacked matrix.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let (u, psi, phi) = self.split(x);
        let psi_full = scatter(self.n_boundary, &self.dirichlet, psi);
        let phi_full = scatter(self.n_boundary, &self.neumann, phi);
        let ru = self.r_volume.matvec(u);
        let vp = self.v_volume.matvec(&psi_full);
        let wp = self.w_volume.matvec(&phi_full);
        let mut out: Vec<f64> = (0..self.n_volume).map(|i| u[i] + ru[i] - vp[i] + wp[i]).collect();
        let gru = self.r_boundary.matvec(u);
        let dv = self.v_direct.matvec(&psi_full);
        let dw = self.w_direct.matvec(&phi_full);
        out.extend((0..self.n_boundary).map(|i| gru[i] - dv[i] + 0.5 * phi_full[i] + dw[i]));
        out
    }
}

fn scatter(n: usize, idx: &[usize], values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (&i, &v) in idx.iter().zip(values) {
        out[i] = v;
    }
    out
}

/// Block-triangular solver for the principal part.
pub struct PrincipalSolver {
    n_volume: usize,
    n_boundary: usize,
    dirichlet: Vec<usize>,
    neumann: Vec<usize>,
    lu_dd: LuFactor,
    v_nd: DenseMatrix,
    v_vol_d: DenseMatrix,
    w_vol_n: DenseMatrix,
    /// Condition estimate of the Dirichlet–Dirichlet block of `𝒱`.
    pub condition: f64,
}

/// Largest admissible condition estimate of the Dirichlet block of `𝒱`.
pub const MAX_BLOCK_CONDITION: f64 = 1e12;

impl PrincipalSolver {
    pub fn new(sys: &BdiesSystem) -> Result<Self> {
        let v_dd = sys.v_direct.select_rows(&sys.dirichlet).select_columns(&sys.dirichlet);
        let lu_dd = v_dd.lu()?;
        let condition = estimate_condition(&v_dd, &lu_dd, 20);
        if !condition.is_finite() || condition > MAX_BLOCK_CONDITION {
            return Err(Error::IllConditioned { condition });
        }
        Ok(Self {
            n_volume: sys.n_volume,
            n_boundary: sys.n_boundary,
            dirichlet: sys.dirichlet.clone(),
            neumann: sys.neumann.clone(),
            lu_dd,
            v_nd: sys.v_direct.select_rows(&sys.neumann).select_columns(&sys.dirichlet),
            v_vol_d: sys.v_volume.select_columns(&sys.dirichlet),
            w_vol_n: sys.w_volume.select_columns(&sys.neumann),
            condition,
        })
    }

    /// Solve the principal system for a stacked right-hand side
    /// `(F̃₁, F̃₂)`:
    /// `ψ = −(r_D𝒱_D)⁻¹ F̃₂|_D`, `φ = 2(𝒱ψ + F̃₂)|_N`, `u = F̃₁ + Vψ − Wφ`.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (f1, f2) = rhs.split_at(self.n_volume);
        let f2_d: Vec<f64> = self.dirichlet.iter().map(|&i| f2[i]).collect();
        let psi: Vec<f64> = self.lu_dd.solve(&f2_d).into_iter().map(|v| -v).collect();
        let vpsi = self.v_nd.matvec(&psi);
        let phi: Vec<f64> = self.neumann.iter().zip(&vpsi).map(|(&i, v)| 2.0 * (v + f2[i])).collect();
        let a = self.v_vol_d.matvec(&psi);
        let b = self.w_vol_n.matvec(&phi);
        let mut x: Vec<f64> = (0..self.n_volume).map(|i| f1[i] + a[i] - b[i]).collect();
        x.extend(psi);
        x.extend(phi);
        x
    }
}

impl LinearOperator for PrincipalSolver {
    fn dim(&self) -> usize {
        self.n_volume + self.n_boundary
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.solve(x)
    }
}

/// Solve the principal system by the block-triangular route.
pub fn solve_m0_block(sys: &BdiesSystem, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != sys.n_volume + sys.n_boundary {
        return Err(Error::LengthMismatch { expected: sys.n_volume + sys.n_boundary, got: rhs.len() });
    }
    Ok(PrincipalSolver::new(sys)?.solve(rhs))
}

struct SystemOperator<'a>(&'a BdiesSystem);

impl LinearOperator for SystemOperator<'_> {
    fn dim(&self) -> usize {
        self.0.n_unknowns()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.0.apply(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Dense,
    Gmres,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub method: SolveMethod,
    /// `u` at the volume nodes.
    pub u: Vec<f64>,
    /// `ψ` at the Dirichlet nodes.
    pub psi: Vec<f64>,
    /// `φ` at the Neumann nodes.
    pub phi: Vec<f64>,
    /// `γ⁺u = Φ₀ + φ` on all of `S`.
    pub gamma_u: Vec<f64>,
    /// `T⁺u = Ψ₀ + ψ` on all of `S`.
    pub t_u: Vec<f64>,
    /// Max-norm gap between `Φ₀ + φ` and the trace of the representation.
    pub trace_mismatch: f64,
    /// `‖b − Ax‖ / ‖b‖` (zero for a zero right-hand side).
    pub relative_residual: f64,
    pub iterations: usize,
    pub condition_estimate: Option<f64>,
}

fn relative_residual(sys: &BdiesSystem, x: &[f64], b: &[f64]) -> f64 {
    let ax = sys.apply(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let nb = norm2(b);
    if nb == 0.0 {
        norm2(&r)
    } else {
        norm2(&r) / nb
    }
}

/// Dense LU solve of the full system.
pub fn solve_dense(sys: &BdiesSystem, rhs: &BdiesRhs, ext: &ExtensionPair) -> Result<SolveReport> {
    let b = rhs.stacked();
    let m = sys.matrix();
    let lu = m.lu()?;
    let x = lu.solve(&b);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("LU solve produced non-finite values".into()));
    }
    let res = relative_residual(sys, &x, &b);
    if res > 1e-6 {
        return Err(Error::Singular(format!("LU solve left relative residual {res:.3e}")));
    }
    Ok(recover_cauchy_data(sys, rhs, ext, &x, SolveMethod::Dense, 0, res, None))
}

/// Restarted GMRES on the full system, right-preconditioned by the
/// block-triangular principal solver.
pub fn solve_gmres_preconditioned(sys: &BdiesSystem, rhs: &BdiesRhs, ext: &ExtensionPair, config: &GmresConfig) -> Result<SolveReport> {
    let b = rhs.stacked();
    let pre = PrincipalSolver::new(sys)?;
    let out = gmres(&SystemOperator(sys), Some(&pre), &b, config);
    if !out.converged {
        return Err(Error::NotConverged { iterations: out.iterations, residual: out.residual });
    }
    Ok(recover_cauchy_data(sys, rhs, ext, &out.x, SolveMethod::Gmres, out.iterations, out.residual, Some(pre.condition)))
}

/// `γ⁺u := Φ₀ + φ`, `T⁺u := Ψ₀ + ψ`, plus the trace of the volume
/// equation `γ⁺u = γ⁺F₀ − γ⁺ℛu + 𝒱ψ + ½φ − 𝒲φ` as a consistency check.
#[allow(clippy::too_many_arguments)]
pub fn recover_cauchy_data(
    sys: &BdiesSystem,
    rhs: &BdiesRhs,
    ext: &ExtensionPair,
    x: &[f64],
    method: SolveMethod,
    iterations: usize,
    relative_residual: f64,
    condition_estimate: Option<f64>,
) -> SolveReport {
    let (u, psi, phi) = sys.split(x);
    let psi_full = scatter(sys.n_boundary, &sys.dirichlet, psi);
    let phi_full = scatter(sys.n_boundary, &sys.neumann, phi);
    let gamma_u: Vec<f64> = ext.phi0.iter().zip(&phi_full).map(|(a, b)| a + b).collect();
    let t_u: Vec<f64> = ext.psi0.iter().zip(&psi_full).map(|(a, b)| a + b).collect();
    let gru = sys.r_boundary.matvec(u);
    let vpsi = sys.v_direct.matvec(&psi_full);
    let wphi = sys.w_direct.matvec(&phi_full);
    let repr: Vec<f64> =
        (0..sys.n_boundary).map(|i| rhs.gamma_f0[i] - gru[i] + vpsi[i] + 0.5 * phi_full[i] - wphi[i]).collect();
    let gap: Vec<f64> = repr.iter().zip(&gamma_u).map(|(a, b)| a - b).collect();
    SolveReport {
        method,
        u: u.to_vec(),
        psi: psi.to_vec(),
        phi: phi.to_vec(),
        gamma_u,
        t_u,
        trace_mismatch: max_abs(&gap),
        relative_residual,
        iterations,
        condition_estimate,
    }
}

/// Smallest singular value of the full system matrix by inverse iteration.
pub fn sigma_min(matrix: &DenseMatrix) -> Result<f64> {
    let lu = matrix.lu()?;
    Ok(estimate_sigma_min(&lu, 300, 1e-10))
}

/// Condition estimate `‖A‖‖A⁻¹‖` from 20 power steps each.
pub fn condition_estimate(matrix: &DenseMatrix) -> Result<f64> {
    Ok(estimate_condition(matrix, &matrix.lu()?, 20))
}
