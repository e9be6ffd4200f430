//! The parametrix `P(x, y) = P_Δ(x − y)/a(x)`, its remainder and the
//! potentials built from it, each expressed through Laplace potentials:
//!
//! ```text
//! 𝒫ρ  = 𝒫_Δ(ρ/a)                      Vρ = V_Δ(ρ/a)       𝒱ρ = 𝒱_Δ(ρ/a)
//! ℛρ  = ∇·𝒫_Δ(ρ∇ln a) − 𝒫_Δ(ρΔln a)   Wτ = W_Δτ − V_Δ(τ∂ₙln a)
//! 𝒲τ  = 𝒲_Δτ − 𝒱_Δ(τ∂ₙln a)          𝒲'ρ = a𝒲'_Δ(ρ/a)
//! ℒ±ρ = aℒ_Δρ − aT±_ΔV_Δ(ρ∂ₙln a)
//! ```

use crate::coefficient::CoefficientField;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryMesh, Point3, VolumeMesh};
use crate::laplace::{
    direct_v_delta_matrix, direct_w_delta_matrix, direct_wp_delta_matrix, eval_kernel_delta, sphere_spectral_apply_nodal,
    BoundaryField, LayerMethod, LayerPotentials, NewtonQuadrature, Side, SphereOperator, VolumeField,
};
use crate::linalg::DenseMatrix;

/// Coefficient and meshes, plus the quadrature objects shared by every
/// operator.
#[derive(Debug, Clone)]
pub struct ParametrixContext {
    pub coefficient: CoefficientField,
    pub boundary: BoundaryMesh,
    pub volume: VolumeMesh,
    newton: NewtonQuadrature,
    layers: LayerPotentials,
    a_boundary: Vec<f64>,
    dlog_dn: Vec<f64>,
    a_volume: Vec<f64>,
    grad_ln_a_volume: Vec<Point3>,
    lap_ln_a_volume: Vec<f64>,
}

impl ParametrixContext {
    pub fn new(coefficient: CoefficientField, boundary: BoundaryMesh, volume: VolumeMesh) -> Result<Self> {
        if (boundary.radius - volume.radius).abs() > 1e-14 * boundary.radius {
            return Err(Error::InvalidMesh(format!(
                "boundary radius {} and volume radius {} differ",
                boundary.radius, volume.radius
            )));
        }
        let newton = NewtonQuadrature::new(&volume);
        let layers = LayerPotentials::new(&boundary);
        let a_boundary = boundary.nodes.iter().map(|n| coefficient.a(n.pos)).collect();
        let dlog_dn = boundary.nodes.iter().map(|n| coefficient.eval_dlog_a_dn(n)).collect();
        let a_volume = volume.nodes.iter().map(|n| coefficient.a(n.pos)).collect();
        let grad_ln_a_volume = volume.nodes.iter().map(|n| coefficient.grad_ln_a(n.pos)).collect();
        let lap_ln_a_volume = volume.nodes.iter().map(|n| coefficient.laplacian_ln_a(n.pos)).collect();
        Ok(Self { coefficient, boundary, volume, newton, layers, a_boundary, dlog_dn, a_volume, grad_ln_a_volume, lap_ln_a_volume })
    }

    /// Same meshes, different coefficient.
    pub fn with_coefficient(&self, coefficient: CoefficientField) -> Result<Self> {
        Self::new(coefficient, self.boundary.clone(), self.volume.clone())
    }

    pub fn newton(&self) -> &NewtonQuadrature {
        &self.newton
    }

    pub fn layers(&self) -> &LayerPotentials {
        &self.layers
    }

    /// `a` at the boundary nodes.
    pub fn a_boundary(&self) -> &[f64] {
        &self.a_boundary
    }

    /// `∂ln a/∂n` at the boundary nodes.
    pub fn dlog_a_dn(&self) -> &[f64] {
        &self.dlog_dn
    }

    /// `a` at the volume nodes.
    pub fn a_volume(&self) -> &[f64] {
        &self.a_volume
    }

    pub fn volume_positions(&self) -> Vec<Point3> {
        self.volume.positions()
    }

    pub fn boundary_positions(&self) -> Vec<Point3> {
        self.boundary.positions().collect()
    }

    fn check_boundary(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.boundary.len() {
            return Err(Error::LengthMismatch { expected: self.boundary.len(), got: f.len() });
        }
        Ok(())
    }

    fn check_volume(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.volume.len() {
            return Err(Error::LengthMismatch { expected: self.volume.len(), got: f.len() });
        }
        Ok(())
    }
}

fn recip(v: &[f64]) -> Vec<f64> {
    v.iter().map(|a| 1.0 / a).collect()
}

fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// `P(x, y) = P_Δ(x − y)/a(x)`.
pub fn eval_parametrix(ctx: &ParametrixContext, x: Point3, y: Point3) -> Result<f64> {
    let (p, _) = eval_kernel_delta(x, y)?;
    Ok(p / ctx.coefficient.a(x))
}

/// `R(x, y) = −Δln a(x)·P_Δ(x − y) − ∇ln a(x)·∇ₓP_Δ(x − y)`.
pub fn eval_remainder(ctx: &ParametrixContext, x: Point3, y: Point3) -> Result<f64> {
    let (p, g) = eval_kernel_delta(x, y)?;
    let c = &ctx.coefficient;
    Ok(-c.laplacian_ln_a(x) * p - c.grad_ln_a(x).dot(g))
}

// ---------------------------------------------------------------------------
// Volume potentials
// ---------------------------------------------------------------------------

/// Matrix of `𝒫` from volume nodes to `targets`.
pub fn p_matrix(ctx: &ParametrixContext, targets: &[Point3]) -> Result<DenseMatrix> {
    let inv_a = recip(&ctx.a_volume);
    ctx.newton.assemble(targets, |row, out| {
        for ((o, v), s) in out.iter_mut().zip(&row.value).zip(&inv_a) {
            *o = v * s;
        }
    })
}

/// `𝒫ρ = 𝒫_Δ(ρ/a)`.
pub fn pot_p(ctx: &ParametrixContext, rho: &[f64], targets: &[Point3]) -> Result<Vec<f64>> {
    ctx.check_volume(rho)?;
    let g: Vec<f64> = rho.iter().zip(&ctx.a_volume).map(|(r, a)| r / a).collect();
    Ok(ctx.newton.apply(&g, targets)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemainderMethod {
    /// Gradients of Laplace Newton potentials of `ρ∇ln a`, minus `𝒫_Δ(ρΔln a)`.
    Relation,
    /// Quadrature of the remainder kernel itself, with the same local
    /// polynomial correction.
    Direct,
}

/// Matrix of `ℛ` from volume nodes to `targets`.
pub fn r_matrix(ctx: &ParametrixContext, targets: &[Point3], method: RemainderMethod) -> Result<DenseMatrix> {
    let gl = &ctx.grad_ln_a_volume;
    let ll = &ctx.lap_ln_a_volume;
    match method {
        RemainderMethod::Relation => ctx.newton.assemble(targets, |row, out| {
            for (i, o) in out.iter_mut().enumerate() {
                *o = row.grad[0][i] * gl[i].x1 + row.grad[1][i] * gl[i].x2 + row.grad[2][i] * gl[i].x3 - row.value[i] * ll[i];
            }
        }),
        RemainderMethod::Direct => {
            let xs = ctx.volume.positions();
            let ws: Vec<f64> = ctx.volume.nodes.iter().map(|n| n.weight).collect();
            let four_pi = 4.0 * std::f64::consts::PI;
            ctx.newton.assemble(targets, |row, out| {
                // The corrected row minus the plain kernel weights is the
                // polynomial correction; the plain part is replaced by the
                // remainder kernel itself.
                let y = row.target;
                for (i, o) in out.iter_mut().enumerate() {
                    let d = xs[i] - y;
                    let r = d.norm();
                    let g = Point3::new(row.grad[0][i], row.grad[1][i], row.grad[2][i]);
                    if r == 0.0 {
                        *o = -ll[i] * row.value[i] + gl[i].dot(g);
                        continue;
                    }
                    let plain_p = -ws[i] / (four_pi * r);
                    let plain_g = d * (-ws[i] / (four_pi * r * r * r));
                    let kernel = ws[i] * eval_remainder(ctx, xs[i], y).expect("distinct points");
                    *o = kernel - ll[i] * (row.value[i] - plain_p) + gl[i].dot(g - plain_g);
                }
            })
        }
    }
}

pub fn pot_r(ctx: &ParametrixContext, rho: &[f64], targets: &[Point3], method: RemainderMethod) -> Result<Vec<f64>> {
    ctx.check_volume(rho)?;
    Ok(r_matrix(ctx, targets, method)?.matvec(rho))
}

// ---------------------------------------------------------------------------
// Surface potentials off S
// ---------------------------------------------------------------------------

/// Matrix of `V` from boundary nodes to off-surface targets.
pub fn v_matrix(ctx: &ParametrixContext, targets: &[Point3], method: LayerMethod) -> Result<DenseMatrix> {
    Ok(ctx.layers.single_layer_matrix(targets, method)?.scale_columns(&recip(&ctx.a_boundary)))
}

/// Matrix of `W` from boundary nodes to off-surface targets.
pub fn w_matrix(ctx: &ParametrixContext, targets: &[Point3], method: LayerMethod) -> Result<DenseMatrix> {
    let w = ctx.layers.double_layer_matrix(targets, method)?;
    let v = ctx.layers.single_layer_matrix(targets, method)?.scale_columns(&ctx.dlog_dn);
    Ok(w.sub(&v))
}

/// `Vρ = V_Δ(ρ/a)`.
pub fn pot_v(ctx: &ParametrixContext, rho: &[f64], targets: &[Point3]) -> Result<Vec<f64>> {
    ctx.check_boundary(rho)?;
    Ok(v_matrix(ctx, targets, LayerMethod::Auto)?.matvec(rho))
}

/// `Wτ = W_Δτ − V_Δ(τ∂ln a/∂n)`.
pub fn pot_w(ctx: &ParametrixContext, tau: &[f64], targets: &[Point3]) -> Result<Vec<f64>> {
    ctx.check_boundary(tau)?;
    Ok(w_matrix(ctx, targets, LayerMethod::Auto)?.matvec(tau))
}

/// Conormal derivative `a ∂V/∂r` of the single layer at off-surface points,
/// along the radial direction.
pub fn pot_v_radial_conormal(ctx: &ParametrixContext, rho: &[f64], targets: &[Point3]) -> Result<Vec<f64>> {
    ctx.check_boundary(rho)?;
    let g: Vec<f64> = rho.iter().zip(&ctx.a_boundary).map(|(r, a)| r / a).collect();
    let d = ctx.layers.single_layer_radial_derivative(&g, targets, LayerMethod::Auto)?;
    Ok(d.iter().zip(targets).map(|(v, y)| ctx.coefficient.a(*y) * v).collect())
}

// ---------------------------------------------------------------------------
// Direct values on S
// ---------------------------------------------------------------------------

/// Matrix of `𝒱 = 𝒱_Δ(·/a)`.
pub fn direct_v_matrix(ctx: &ParametrixContext) -> DenseMatrix {
    direct_v_delta_matrix(&ctx.boundary).scale_columns(&recip(&ctx.a_boundary))
}

/// Matrix of `𝒲 = 𝒲_Δ − 𝒱_Δ(·∂ln a/∂n)`.
pub fn direct_w_matrix(ctx: &ParametrixContext) -> DenseMatrix {
    let w = direct_w_delta_matrix(&ctx.boundary);
    w.sub(&direct_v_delta_matrix(&ctx.boundary).scale_columns(&ctx.dlog_dn))
}

/// Matrix of `𝒲' = a𝒲'_Δ(·/a)`.
pub fn direct_wp_matrix(ctx: &ParametrixContext) -> DenseMatrix {
    direct_wp_delta_matrix(&ctx.boundary).scale_rows(&ctx.a_boundary).scale_columns(&recip(&ctx.a_boundary))
}

pub fn direct_v(ctx: &ParametrixContext, rho: &[f64]) -> Result<BoundaryField> {
    ctx.check_boundary(rho)?;
    Ok(direct_v_matrix(ctx).matvec(rho))
}

pub fn direct_w(ctx: &ParametrixContext, tau: &[f64]) -> Result<BoundaryField> {
    ctx.check_boundary(tau)?;
    Ok(direct_w_matrix(ctx).matvec(tau))
}

pub fn direct_wp(ctx: &ParametrixContext, rho: &[f64]) -> Result<BoundaryField> {
    ctx.check_boundary(rho)?;
    Ok(direct_wp_matrix(ctx).matvec(rho))
}

/// `𝓛̂ρ = a ℒ_Δρ`, with `ℒ_Δ` from the spectral oracle (unit sphere only).
pub fn op_l_hat(ctx: &ParametrixContext, rho: &[f64]) -> Result<BoundaryField> {
    ctx.check_boundary(rho)?;
    let l = sphere_spectral_apply_nodal(SphereOperator::Hypersingular, ctx.layers.basis(), rho)?;
    Ok(hadamard(&ctx.a_boundary, &l))
}

/// `ℒ±ρ = 𝓛̂ρ − a T±_Δ V_Δ(ρ ∂ln a/∂n)`.
pub fn op_l(ctx: &ParametrixContext, rho: &[f64], side: Side) -> Result<BoundaryField> {
    let hat = op_l_hat(ctx, rho)?;
    let g = hadamard(rho, &ctx.dlog_dn);
    let t = crate::laplace::conormal_t_delta_pm_of_v(&ctx.boundary, &g, side)?;
    Ok(hat.iter().zip(&t).zip(&ctx.a_boundary).map(|((h, t), a)| h - a * t).collect())
}

/// Nodal field `ρ/a` on the volume, used for `𝒫`-type densities.
pub fn divide_by_a_volume(ctx: &ParametrixContext, rho: &[f64]) -> VolumeField {
    rho.iter().zip(&ctx.a_volume).map(|(r, a)| r / a).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::make_coefficient;
    use crate::geometry::{build_ball_volume, build_sphere_boundary};

    fn ctx(name: &str, params: &[f64]) -> ParametrixContext {
        let c = make_coefficient(name, params).unwrap();
        ParametrixContext::new(c, build_sphere_boundary(1.0, 8, 16).unwrap(), build_ball_volume(1.0, 4, 6, 12).unwrap()).unwrap()
    }

    #[test]
    fn parametrix_and_remainder_closed_forms() {
        let one = ctx("const", &[1.0]);
        let two = ctx("const", &[2.0]);
        let x = Point3::new(1.0, 0.0, 0.0);
        assert!((eval_parametrix(&one, x, Point3::ZERO).unwrap() + 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert!((eval_parametrix(&two, x, Point3::ZERO).unwrap() + 1.0 / (8.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert_eq!(eval_remainder(&one, x, Point3::ZERO).unwrap(), 0.0);
        let e = ctx("exp_linear", &[2.0]);
        let r = eval_remainder(&e, Point3::new(0.5, 0.0, 0.0), Point3::new(-0.5, 0.0, 0.0)).unwrap();
        assert!((r + 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-14);
        assert!(eval_parametrix(&e, x, x).is_err());
    }

    #[test]
    fn mismatched_radii_rejected() {
        let c = make_coefficient("const", &[1.0]).unwrap();
        let r = ParametrixContext::new(c, build_sphere_boundary(1.0, 8, 16).unwrap(), build_ball_volume(2.0, 4, 6, 12).unwrap());
        assert!(matches!(r, Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn remainder_routes_agree() {
        let e = ctx("exp_linear", &[2.0]);
        let targets = [Point3::new(0.1, 0.2, 0.3), Point3::new(-0.4, 0.0, 0.1), e.volume.nodes[17].pos];
        let rel = r_matrix(&e, &targets, RemainderMethod::Relation).unwrap();
        let dir = r_matrix(&e, &targets, RemainderMethod::Direct).unwrap();
        assert!(rel.max_abs_diff(&dir) < 1e-12);
    }

    #[test]
    fn wp_of_a_is_minus_half_a() {
        let e = ctx("exp_linear", &[2.0]);
        let out = direct_wp(&e, e.a_boundary()).unwrap();
        for (o, a) in out.iter().zip(e.a_boundary()) {
            assert!((o + 0.5 * a).abs() < 1e-12);
        }
    }
}
