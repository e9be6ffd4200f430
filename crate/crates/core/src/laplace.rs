//! Laplace fundamental solution and its potentials on the ball: the Newton
//! volume potential, single and double layers off the surface, Nyström
//! direct values on the sphere and the spherical-harmonic spectral oracle.

use std::f64::consts::PI;

use faer::Mat;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryMesh, Point3, VolumeMesh};
use crate::harmonics::{eval_real_sh, sh_count, sh_degree, ShBasis, ShCoefficients};
use crate::linalg::DenseMatrix;

/// Nodal values on the boundary mesh.
pub type BoundaryField = Vec<f64>;
/// Nodal values on the volume mesh.
pub type VolumeField = Vec<f64>;

const FOUR_PI: f64 = 4.0 * PI;

/// `P_Δ(x − y)` and `∇ₓP_Δ(x − y)`.
pub fn eval_kernel_delta(x: Point3, y: Point3) -> Result<(f64, Point3)> {
    let d = x - y;
    let r = d.norm();
    if r == 0.0 {
        return Err(Error::CoincidentPoints(x));
    }
    Ok((-1.0 / (FOUR_PI * r), d / (FOUR_PI * r * r * r)))
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Newton potential
// ---------------------------------------------------------------------------

/// Exponents of the quadratic monomials `1, d_k, d_k d_l` in fit order.
const MONOMIALS: [&[usize]; 10] = [&[], &[0], &[1], &[2], &[0, 0], &[0, 1], &[0, 2], &[1, 1], &[1, 2], &[2, 2]];

fn monomial(alpha: &[usize], d: Point3) -> f64 {
    alpha.iter().map(|&k| d.get(k)).product()
}

/// Ball Newton potentials of `1`, `x_k` and `x_k x_l` and their gradients
/// at `y`, from the interior harmonic/radial decomposition.
fn ball_polynomial_potentials(y: Point3, radius: f64) -> ([(f64, Point3); 1], [(f64, Point3); 3], [[(f64, Point3); 3]; 3]) {
    let r2 = radius * radius;
    let s = y.norm_squared();
    let e = |k: usize| {
        let mut a = [0.0; 3];
        a[k] = 1.0;
        Point3::from_array(a)
    };
    let n0 = (-(3.0 * r2 - s) / 6.0, y / 3.0);
    let c1 = s / 10.0 - r2 / 6.0;
    let n1 = [0, 1, 2].map(|k| (y.get(k) * c1, e(k) * c1 + y * (y.get(k) / 5.0)));
    let quartic = (s * s / 20.0 - r2 * r2 / 4.0, y * (s / 5.0));
    let c2 = s / 14.0 - r2 / 10.0;
    let g2 = y / 7.0;
    let n2 = [0, 1, 2].map(|k| {
        [0, 1, 2].map(|l| {
            let delta = if k == l { 1.0 } else { 0.0 };
            let h = y.get(k) * y.get(l) - delta * s / 3.0;
            let gh = e(k) * y.get(l) + e(l) * y.get(k) - y * (2.0 * delta / 3.0);
            (h * c2 + delta * quartic.0 / 3.0, gh * c2 + g2 * h + quartic.1 * (delta / 3.0))
        })
    });
    ([n0], n1, n2)
}

/// `∫_B P_Δ(x − y) m_α((x − y)/h) dx` and its `y`-gradient with the
/// monomial frozen, for the ten quadratic monomials.
fn shifted_moments(y: Point3, radius: f64, h: f64) -> ([f64; 10], [Point3; 10]) {
    let ([n0], n1, n2) = ball_polynomial_potentials(y, radius);
    let mut val = [0.0; 10];
    let mut grad = [Point3::ZERO; 10];
    for (a, alpha) in MONOMIALS.iter().enumerate() {
        let (v, g) = match alpha.len() {
            0 => n0,
            1 => {
                let k = alpha[0];
                (n1[k].0 - y.get(k) * n0.0, n1[k].1 - n0.1 * y.get(k))
            }
            _ => {
                let (k, l) = (alpha[0], alpha[1]);
                let (yk, yl) = (y.get(k), y.get(l));
                (
                    n2[k][l].0 - yk * n1[l].0 - yl * n1[k].0 + yk * yl * n0.0,
                    n2[k][l].1 - n1[l].1 * yk - n1[k].1 * yl + n0.1 * (yk * yl),
                )
            }
        };
        let scale = h.powi(alpha.len() as i32);
        val[a] = v / scale;
        grad[a] = g / scale;
    }
    (val, grad)
}

/// Least-squares pseudo-inverse of a tall design matrix given row-major,
/// or `None` when its columns are numerically dependent.
fn pseudo_inverse(rows: usize, cols: usize, a: &[f64]) -> Option<Vec<f64>> {
    if cols == 0 {
        return Some(Vec::new());
    }
    if rows < cols {
        return None;
    }
    crate::linalg::serial_faer();
    let m = Mat::from_fn(rows, cols, |i, j| a[i * cols + j]);
    let svd = m.thin_svd();
    let s = svd.s_diagonal();
    let smax = (0..cols).map(|i| s[i]).fold(0.0_f64, f64::max);
    let smin = (0..cols).map(|i| s[i]).fold(f64::INFINITY, f64::min);
    if !(smax > 0.0) || smin < 1e-8 * smax {
        return None;
    }
    let (u, v) = (svd.u(), svd.v());
    // pinv = V S⁻¹ Uᵀ, cols × rows
    let mut out = vec![0.0; cols * rows];
    for p in 0..cols {
        for q in 0..rows {
            let mut acc = 0.0;
            for k in 0..cols {
                acc += v[(p, k)] * u[(q, k)] / s[k];
            }
            out[p * rows + q] = acc;
        }
    }
    Some(out)
}

/// Quadrature row for the Newton potential at one target: `value[i]`
/// weights nodal densities for `𝒫_Δg(y)`, `grad[c][i]` for `∂_c 𝒫_Δg(y)`.
#[derive(Debug, Clone)]
pub struct NewtonRow {
    pub target: Point3,
    pub value: Vec<f64>,
    pub grad: [Vec<f64>; 3],
}

impl NewtonRow {
    pub fn apply_value(&self, g: &[f64]) -> f64 {
        crate::linalg::dot(&self.value, g)
    }

    pub fn apply_grad(&self, g: &[f64]) -> Point3 {
        Point3::new(crate::linalg::dot(&self.grad[0], g), crate::linalg::dot(&self.grad[1], g), crate::linalg::dot(&self.grad[2], g))
    }
}

/// Newton-potential quadrature on a ball mesh with local quadratic
/// singularity subtraction: the density is replaced near the target by a
/// least-squares quadratic whose potential is known in closed form, and the
/// quadrature only sees the smooth remainder.
#[derive(Debug, Clone)]
pub struct NewtonQuadrature {
    positions: Vec<Point3>,
    weights: Vec<f64>,
    radius: f64,
    neighbours: usize,
}

pub const DEFAULT_FIT_NEIGHBOURS: usize = 24;

impl NewtonQuadrature {
    pub fn new(volume: &VolumeMesh) -> Self {
        Self::with_neighbours(volume, DEFAULT_FIT_NEIGHBOURS)
    }

    pub fn with_neighbours(volume: &VolumeMesh, neighbours: usize) -> Self {
        Self {
            positions: volume.positions(),
            weights: volume.nodes.iter().map(|n| n.weight).collect(),
            radius: volume.radius,
            neighbours: neighbours.min(volume.len().saturating_sub(1)).max(1),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    fn self_index(&self, y: Point3) -> Option<usize> {
        let tol = 1e-12 * self.radius;
        self.positions.iter().position(|p| (*p - y).norm() <= tol)
    }

    fn nearest_k(&self, y: Point3, skip: Option<usize>, k: usize) -> Vec<(f64, usize)> {
        let mut d: Vec<(f64, usize)> =
            self.positions.iter().enumerate().filter(|(i, _)| Some(*i) != skip).map(|(i, p)| ((*p - y).norm(), i)).collect();
        let k = k.min(d.len());
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, cmp);
            d.truncate(k);
        }
        d.sort_by(cmp);
        d
    }

    pub fn row(&self, y: Point3) -> Result<NewtonRow> {
        if y.norm() > self.radius * (1.0 + 1e-10) {
            return Err(Error::InvalidMesh(format!("Newton target {y} lies outside the ball")));
        }
        let n = self.len();
        let own = self.self_index(y);
        let mut value = vec![0.0; n];
        let mut grad = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let first = usize::from(own.is_some());
        let (near, pinv, n_mono) = self.local_fit(y, own, first);
        let h = near.last().map(|p| p.0).unwrap_or(self.radius).max(1e-300);

        // Plain quadrature of the kernel, plus its action on the monomials.
        let mut s_val = [0.0; 10];
        let mut s_grad = [Point3::ZERO; 10];
        for (i, (&x, &w)) in self.positions.iter().zip(&self.weights).enumerate() {
            if Some(i) == own {
                continue;
            }
            let d = x - y;
            let r = d.norm();
            let pk = -w / (FOUR_PI * r);
            let gk = d * (-w / (FOUR_PI * r * r * r));
            value[i] = pk;
            for c in 0..3 {
                grad[c][i] = gk.get(c);
            }
            let ds = d / h;
            for (a, alpha) in MONOMIALS.iter().enumerate() {
                let m = monomial(alpha, ds);
                s_val[a] += pk * m;
                s_grad[a] = s_grad[a] + gk * m;
            }
        }
        let (mom_val, mom_grad) = shifted_moments(y, self.radius, h);
        let defect_val: Vec<f64> = (0..10).map(|a| mom_val[a] - s_val[a]).collect();
        let defect_grad: Vec<Point3> = (0..10).map(|a| mom_grad[a] - s_grad[a]).collect();

        // Add the closed-form potential of the fitted polynomial minus its
        // quadrature; the self value (if any) is imposed exactly.
        let k = near.len();
        for (p, a) in (first..n_mono).enumerate() {
            let coeff_row = &pinv[p * k..(p + 1) * k];
            for (q, &(_, j)) in near.iter().enumerate() {
                let c = coeff_row[q];
                value[j] += defect_val[a] * c;
                for cc in 0..3 {
                    grad[cc][j] += defect_grad[a].get(cc) * c;
                }
                if let Some(s) = own {
                    value[s] -= defect_val[a] * c;
                    for cc in 0..3 {
                        grad[cc][s] -= defect_grad[a].get(cc) * c;
                    }
                }
            }
        }
        let anchor = own.or(if first == n_mono { near.first().map(|p| p.1) } else { None });
        if let Some(s) = anchor {
            value[s] += defect_val[0];
            for cc in 0..3 {
                grad[cc][s] += defect_grad[0].get(cc);
            }
        }
        Ok(NewtonRow { target: y, value, grad })
    }

    /// Neighbour set and least-squares coefficient map for the local fit.
    /// The quadratic fit widens its neighbourhood while the design is
    /// degenerate (nodes on a single shell); only then does it fall back to
    /// linear and constant fits.
    fn local_fit(&self, y: Point3, own: Option<usize>, first: usize) -> (Vec<(f64, usize)>, Vec<f64>, usize) {
        let available = self.len() - usize::from(own.is_some());
        let mut attempts: Vec<(usize, usize)> = Vec::new();
        let mut k = self.neighbours;
        loop {
            attempts.push((10, k.min(available)));
            if k >= available {
                break;
            }
            k *= 2;
        }
        attempts.push((4, self.neighbours.min(available)));
        for (n_mono, k) in attempts {
            let near = self.nearest_k(y, own, k);
            let Some(h) = near.last().map(|p| p.0) else { continue };
            let cols = n_mono - first;
            let mut design = Vec::with_capacity(near.len() * cols);
            for &(_, j) in &near {
                let ds = (self.positions[j] - y) / h;
                design.extend((first..n_mono).map(|a| monomial(MONOMIALS[a], ds)));
            }
            if let Some(pinv) = pseudo_inverse(near.len(), cols, &design) {
                return (near, pinv, n_mono);
            }
        }
        let near = self.nearest_k(y, own, 1);
        (near, Vec::new(), first)
    }

    /// Assemble a dense operator whose row `t` is `combine(row(targets[t]))`.
    pub fn assemble(&self, targets: &[Point3], combine: impl Fn(&NewtonRow, &mut [f64]) + Sync) -> Result<DenseMatrix> {
        for &t in targets {
            if t.norm() > self.radius * (1.0 + 1e-10) {
                return Err(Error::InvalidMesh(format!("Newton target {t} lies outside the ball")));
            }
        }
        Ok(DenseMatrix::from_row_fn(targets.len(), self.len(), |t, out| {
            let row = self.row(targets[t]).expect("targets validated");
            combine(&row, out)
        }))
    }

    /// Matrix of `g ↦ 𝒫_Δg` at the targets.
    pub fn value_matrix(&self, targets: &[Point3]) -> Result<DenseMatrix> {
        self.assemble(targets, |row, out| out.copy_from_slice(&row.value))
    }

    /// Values and gradients of `𝒫_Δg` at the targets.
    pub fn apply(&self, g: &[f64], targets: &[Point3]) -> Result<(Vec<f64>, Vec<Point3>)> {
        check_len(self.len(), g.len())?;
        use rayon::prelude::*;
        let out: Result<Vec<(f64, Point3)>> = targets
            .par_iter()
            .map(|&t| {
                let row = self.row(t)?;
                Ok((row.apply_value(g), row.apply_grad(g)))
            })
            .collect();
        Ok(out?.into_iter().unzip())
    }
}

/// `𝒫_Δg(y) = ∫_Ω P_Δ(x − y) g(x) dx` and its gradient at each target.
pub fn newton_delta(volume: &VolumeMesh, g: &[f64], targets: &[Point3]) -> Result<(Vec<f64>, Vec<Point3>)> {
    NewtonQuadrature::new(volume).apply(g, targets)
}

// ---------------------------------------------------------------------------
// Layer potentials off the surface
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerMethod {
    /// Expansion inside and near the sphere, quadrature far outside.
    Auto,
    /// Plain surface quadrature of the kernel.
    Quadrature,
    /// Spherical-harmonic expansion of the density up to the mesh's
    /// exactness degree, evaluated with the closed-form radial factors.
    Expansion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LayerKind {
    Single,
    Double,
    SingleRadialDerivative,
}

/// Single and double layer potentials of a sphere mesh evaluated off `S`.
#[derive(Debug, Clone)]
pub struct LayerPotentials {
    positions: Vec<Point3>,
    normals: Vec<Point3>,
    weights: Vec<f64>,
    radius: f64,
    basis: ShBasis,
}

impl LayerPotentials {
    pub fn new(mesh: &BoundaryMesh) -> Self {
        Self {
            positions: mesh.nodes.iter().map(|n| n.pos).collect(),
            normals: mesh.nodes.iter().map(|n| n.normal).collect(),
            weights: mesh.nodes.iter().map(|n| n.weight).collect(),
            radius: mesh.radius,
            basis: ShBasis::for_mesh(mesh),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn basis(&self) -> &ShBasis {
        &self.basis
    }

    fn check_target(&self, y: Point3) -> Result<()> {
        if (y.norm() - self.radius).abs() <= 1e-10 * self.radius {
            return Err(Error::TargetOnSurface(y));
        }
        Ok(())
    }

    fn resolve(&self, y: Point3, method: LayerMethod) -> LayerMethod {
        match method {
            LayerMethod::Auto if y.norm() < 2.0 * self.radius => LayerMethod::Expansion,
            LayerMethod::Auto => LayerMethod::Quadrature,
            m => m,
        }
    }

    fn radial_factor(&self, kind: LayerKind, n: usize, r: f64) -> f64 {
        let big_r = self.radius;
        let nf = n as f64;
        let q = 2.0 * nf + 1.0;
        if r < big_r {
            let t = r / big_r;
            match kind {
                LayerKind::Single => big_r * t.powi(n as i32) / q,
                LayerKind::Double => -(nf + 1.0) / q * t.powi(n as i32),
                LayerKind::SingleRadialDerivative if n == 0 => 0.0,
                LayerKind::SingleRadialDerivative => nf / q * t.powi(n as i32 - 1),
            }
        } else {
            let t = big_r / r;
            match kind {
                LayerKind::Single => big_r * t.powi(n as i32 + 1) / q,
                LayerKind::Double => nf / q * t.powi(n as i32 + 1),
                LayerKind::SingleRadialDerivative => -(nf + 1.0) / q * t.powi(n as i32 + 2),
            }
        }
    }

    fn row(&self, kind: LayerKind, y: Point3, method: LayerMethod) -> Result<Vec<f64>> {
        self.check_target(y)?;
        match self.resolve(y, method) {
            LayerMethod::Expansion => {
                let l = self.basis.l_max;
                let r = y.norm();
                let mut e = eval_real_sh(l, y);
                for (c, v) in e.iter_mut().enumerate() {
                    *v *= self.radial_factor(kind, sh_degree(c), r);
                }
                Ok((0..self.len()).map(|i| self.basis.unit_weight(i) * crate::linalg::dot(self.basis.row(i), &e)).collect())
            }
            _ => {
                let radial = y.normalized();
                Ok((0..self.len())
                    .map(|i| {
                        let d = self.positions[i] - y;
                        let r = d.norm();
                        let w = self.weights[i];
                        match kind {
                            LayerKind::Single => w / (FOUR_PI * r),
                            LayerKind::Double => -w * self.normals[i].dot(d) / (FOUR_PI * r * r * r),
                            LayerKind::SingleRadialDerivative => w * d.dot(radial) / (FOUR_PI * r * r * r),
                        }
                    })
                    .collect())
            }
        }
    }

    fn matrix(&self, kind: LayerKind, targets: &[Point3], method: LayerMethod) -> Result<DenseMatrix> {
        for &t in targets {
            self.check_target(t)?;
        }
        Ok(DenseMatrix::from_row_fn(targets.len(), self.len(), |t, out| {
            out.copy_from_slice(&self.row(kind, targets[t], method).expect("targets validated"))
        }))
    }

    fn apply(&self, kind: LayerKind, density: &[f64], targets: &[Point3], method: LayerMethod) -> Result<Vec<f64>> {
        check_len(self.len(), density.len())?;
        Ok(self.matrix(kind, targets, method)?.matvec(density))
    }

    /// `V_Δρ(y) = ∫_S ρ(x) / (4π|x − y|) dS(x)`.
    pub fn single_layer(&self, rho: &[f64], targets: &[Point3], method: LayerMethod) -> Result<Vec<f64>> {
        self.apply(LayerKind::Single, rho, targets, method)
    }

    /// `W_Δτ(y) = −∫_S ∂_{n(x)} P_Δ(x − y) τ(x) dS(x)`.
    pub fn double_layer(&self, tau: &[f64], targets: &[Point3], method: LayerMethod) -> Result<Vec<f64>> {
        self.apply(LayerKind::Double, tau, targets, method)
    }

    /// `ŷ·∇_y V_Δρ(y)`, the radial derivative of the single layer.
    pub fn single_layer_radial_derivative(&self, rho: &[f64], targets: &[Point3], method: LayerMethod) -> Result<Vec<f64>> {
        self.apply(LayerKind::SingleRadialDerivative, rho, targets, method)
    }

    pub fn single_layer_matrix(&self, targets: &[Point3], method: LayerMethod) -> Result<DenseMatrix> {
        self.matrix(LayerKind::Single, targets, method)
    }

    pub fn double_layer_matrix(&self, targets: &[Point3], method: LayerMethod) -> Result<DenseMatrix> {
        self.matrix(LayerKind::Double, targets, method)
    }
}

pub fn single_layer_delta(mesh: &BoundaryMesh, rho: &[f64], targets: &[Point3]) -> Result<Vec<f64>> {
    LayerPotentials::new(mesh).single_layer(rho, targets, LayerMethod::Auto)
}

pub fn double_layer_delta(mesh: &BoundaryMesh, tau: &[f64], targets: &[Point3]) -> Result<Vec<f64>> {
    LayerPotentials::new(mesh).double_layer(tau, targets, LayerMethod::Auto)
}

// ---------------------------------------------------------------------------
// Direct values on the sphere
// ---------------------------------------------------------------------------

/// Nyström matrix with subtraction: off-diagonal `w_i k(x_i, y_j)`, diagonal
/// chosen so that the row applied to a constant gives `exact_on_one`.
fn subtracted_matrix(mesh: &BoundaryMesh, exact_on_one: f64, kernel: impl Fn(usize, usize) -> f64 + Sync) -> DenseMatrix {
    DenseMatrix::from_row_fn(mesh.len(), mesh.len(), |j, row| {
        let mut off = 0.0;
        for (i, v) in row.iter_mut().enumerate() {
            if i != j {
                *v = mesh.nodes[i].weight * kernel(i, j);
                off += *v;
            }
        }
        row[j] = exact_on_one - off;
    })
}

/// Matrix of `𝒱_Δ`; constants are reproduced exactly (`𝒱_Δ[1] = R`).
pub fn direct_v_delta_matrix(mesh: &BoundaryMesh) -> DenseMatrix {
    let n = &mesh.nodes;
    subtracted_matrix(mesh, mesh.radius, |i, j| 1.0 / (FOUR_PI * (n[i].pos - n[j].pos).norm()))
}

/// Matrix of `𝒲_Δ`, kernel `−∂_{n(x)}P_Δ(x − y)`; `𝒲_Δ[1] = −1/2`.
pub fn direct_w_delta_matrix(mesh: &BoundaryMesh) -> DenseMatrix {
    let n = &mesh.nodes;
    subtracted_matrix(mesh, -0.5, |i, j| {
        let d = n[i].pos - n[j].pos;
        let r = d.norm();
        -n[i].normal.dot(d) / (FOUR_PI * r * r * r)
    })
}

/// Matrix of `𝒲'_Δ`, kernel `−∂_{n(y)}P_Δ(x − y)`; `𝒲'_Δ[1] = −1/2`.
pub fn direct_wp_delta_matrix(mesh: &BoundaryMesh) -> DenseMatrix {
    let n = &mesh.nodes;
    subtracted_matrix(mesh, -0.5, |i, j| {
        let d = n[j].pos - n[i].pos;
        let r = d.norm();
        -n[j].normal.dot(d) / (FOUR_PI * r * r * r)
    })
}

pub fn direct_v_delta(mesh: &BoundaryMesh, rho: &[f64]) -> Result<BoundaryField> {
    check_len(mesh.len(), rho.len())?;
    Ok(direct_v_delta_matrix(mesh).matvec(rho))
}

pub fn direct_w_delta(mesh: &BoundaryMesh, tau: &[f64]) -> Result<BoundaryField> {
    check_len(mesh.len(), tau.len())?;
    Ok(direct_w_delta_matrix(mesh).matvec(tau))
}

pub fn direct_wp_delta(mesh: &BoundaryMesh, rho: &[f64]) -> Result<BoundaryField> {
    check_len(mesh.len(), rho.len())?;
    Ok(direct_wp_delta_matrix(mesh).matvec(rho))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Interior trace (`+`).
    Interior,
    /// Exterior trace (`−`).
    Exterior,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Interior => 1.0,
            Side::Exterior => -1.0,
        }
    }
}

/// `T±_Δ V_Δρ = ±ρ/2 + 𝒲'_Δρ`.
pub fn conormal_t_delta_pm_of_v(mesh: &BoundaryMesh, rho: &[f64], side: Side) -> Result<BoundaryField> {
    let wp = direct_wp_delta(mesh, rho)?;
    Ok(wp.iter().zip(rho).map(|(w, r)| side.sign() * 0.5 * r + w).collect())
}

// ---------------------------------------------------------------------------
// Spectral oracle on the unit sphere
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereOperator {
    /// `𝒱_Δ`
    SingleLayer,
    /// `𝒲_Δ`
    DoubleLayer,
    /// `𝒲'_Δ`
    AdjointDoubleLayer,
    /// `ℒ_Δ = T±W_Δ`
    Hypersingular,
}

impl SphereOperator {
    pub fn name(self) -> &'static str {
        match self {
            SphereOperator::SingleLayer => "V",
            SphereOperator::DoubleLayer => "W",
            SphereOperator::AdjointDoubleLayer => "Wp",
            SphereOperator::Hypersingular => "L",
        }
    }

    /// Eigenvalue on degree-`n` harmonics of the unit sphere.
    pub fn eigenvalue(self, n: usize) -> f64 {
        let nf = n as f64;
        let q = 2.0 * nf + 1.0;
        match self {
            SphereOperator::SingleLayer => 1.0 / q,
            SphereOperator::DoubleLayer | SphereOperator::AdjointDoubleLayer => -0.5 / q,
            SphereOperator::Hypersingular => -nf * (nf + 1.0) / q,
        }
    }
}

pub fn sphere_spectral_apply(op: SphereOperator, c: &ShCoefficients, radius: f64) -> Result<ShCoefficients> {
    if (radius - 1.0).abs() > 1e-14 {
        return Err(Error::NonUnitSphere(radius));
    }
    debug_assert_eq!(c.coeffs.len(), sh_count(c.l_max));
    Ok(c.scale_by_degree(|n| op.eigenvalue(n)))
}

/// Apply a spectral operator to nodal data by projection on the mesh basis.
pub fn sphere_spectral_apply_nodal(op: SphereOperator, basis: &ShBasis, values: &[f64]) -> Result<BoundaryField> {
    check_len(basis.n_nodes(), values.len())?;
    let c = sphere_spectral_apply(op, &basis.project(values), basis.radius)?;
    Ok(basis.synthesize(&c))
}
