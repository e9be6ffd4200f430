//! Residuals of the Green identities for the parametrix potentials, used as
//! correctness checks on closed-form test functions.

use serde::{Deserialize, Serialize};

use crate::coefficient::CoefficientField;
use crate::error::Result;
use crate::geometry::{BoundaryNode, Point3};
use crate::laplace::{BoundaryField, LayerMethod};
use crate::parametrix::{
    direct_v_matrix, direct_w_matrix, pot_p, r_matrix, v_matrix, w_matrix, ParametrixContext, RemainderMethod,
};

/// Closed-form smooth function with its gradient and Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothTestFunction {
    /// `c + b·x + xᵀQx` with symmetric `Q`.
    Quadratic { c: f64, b: [f64; 3], q: [[f64; 3]; 3] },
    /// `exp(k·x)`.
    Exponential { k: [f64; 3] },
}

impl SmoothTestFunction {
    pub fn constant(c: f64) -> Self {
        Self::Quadratic { c, b: [0.0; 3], q: [[0.0; 3]; 3] }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn linear(b: [f64; 3]) -> Self {
        Self::Quadratic { c: 0.0, b, q: [[0.0; 3]; 3] }
    }

    /// `x_k²`.
    pub fn square(k: usize) -> Self {
        let mut q = [[0.0; 3]; 3];
        q[k][k] = 1.0;
        Self::Quadratic { c: 0.0, b: [0.0; 3], q }
    }

    pub fn value(&self, x: Point3) -> f64 {
        match *self {
            Self::Quadratic { c, b, q } => {
                let xa = x.to_array();
                let mut v = c;
                for i in 0..3 {
                    v += b[i] * xa[i];
                    for j in 0..3 {
                        v += q[i][j] * xa[i] * xa[j];
                    }
                }
                v
            }
            Self::Exponential { k } => Point3::from_array(k).dot(x).exp(),
        }
    }

    pub fn gradient(&self, x: Point3) -> Point3 {
        match *self {
            Self::Quadratic { b, q, .. } => {
                let xa = x.to_array();
                let mut g = b;
                for i in 0..3 {
                    for j in 0..3 {
                        g[i] += (q[i][j] + q[j][i]) * xa[j];
                    }
                }
                Point3::from_array(g)
            }
            Self::Exponential { k } => Point3::from_array(k) * self.value(x),
        }
    }

    pub fn laplacian(&self, x: Point3) -> f64 {
        match *self {
            Self::Quadratic { q, .. } => 2.0 * (q[0][0] + q[1][1] + q[2][2]),
            Self::Exponential { k } => Point3::from_array(k).norm_squared() * self.value(x),
        }
    }

    /// `𝒜u = ∇·(a∇u) = aΔu + ∇a·∇u`.
    pub fn apply_operator(&self, a: &CoefficientField, x: Point3) -> f64 {
        a.a(x) * self.laplacian(x) + a.grad_a(x).dot(self.gradient(x))
    }

    /// Classical conormal derivative `T⁺u = a ∂u/∂n`.
    pub fn conormal(&self, a: &CoefficientField, node: &BoundaryNode) -> f64 {
        a.a(node.pos) * self.gradient(node.pos).dot(node.normal)
    }

    pub fn trace(&self, ctx: &ParametrixContext) -> BoundaryField {
        ctx.boundary.sample(|n| self.value(n.pos))
    }

    pub fn conormal_trace(&self, ctx: &ParametrixContext) -> BoundaryField {
        ctx.boundary.sample(|n| self.conormal(&ctx.coefficient, n))
    }
}

/// `|∫_S T⁺u γ⁺v − ∫_Ω (v𝒜u + a∇u·∇v)|`.
pub fn first_green_residual(u: &SmoothTestFunction, v: &SmoothTestFunction, ctx: &ParametrixContext) -> f64 {
    let a = &ctx.coefficient;
    let lhs: f64 = ctx.boundary.nodes.iter().map(|n| n.weight * u.conormal(a, n) * v.value(n.pos)).sum();
    let rhs: f64 = ctx
        .volume
        .nodes
        .iter()
        .map(|n| {
            let x = n.pos;
            n.weight * (v.value(x) * u.apply_operator(a, x) + a.a(x) * u.gradient(x).dot(v.gradient(x)))
        })
        .sum();
    (lhs - rhs).abs()
}

/// `|∫_Ω (u𝒜v − v𝒜u) − ∫_S (u T⁺v − v T⁺u)|`.
pub fn second_green_residual(u: &SmoothTestFunction, v: &SmoothTestFunction, ctx: &ParametrixContext) -> f64 {
    let a = &ctx.coefficient;
    let vol: f64 = ctx
        .volume
        .nodes
        .iter()
        .map(|n| n.weight * (u.value(n.pos) * v.apply_operator(a, n.pos) - v.value(n.pos) * u.apply_operator(a, n.pos)))
        .sum();
    let surf: f64 = ctx
        .boundary
        .nodes
        .iter()
        .map(|n| n.weight * (u.value(n.pos) * v.conormal(a, n) - v.value(n.pos) * u.conormal(a, n)))
        .sum();
    (vol - surf).abs()
}

/// `u + ℛu − V T⁺u + W γ⁺u − 𝒫𝒜u` at interior targets.
pub fn third_green_domain_residual(u: &SmoothTestFunction, ctx: &ParametrixContext, targets: &[Point3]) -> Result<Vec<f64>> {
    let uv = ctx.volume.sample(|x| u.value(x));
    let f = ctx.volume.sample(|x| u.apply_operator(&ctx.coefficient, x));
    let ru = r_matrix(ctx, targets, RemainderMethod::Relation)?.matvec(&uv);
    let vt = v_matrix(ctx, targets, LayerMethod::Auto)?.matvec(&u.conormal_trace(ctx));
    let wg = w_matrix(ctx, targets, LayerMethod::Auto)?.matvec(&u.trace(ctx));
    let pf = pot_p(ctx, &f, targets)?;
    Ok((0..targets.len()).map(|t| u.value(targets[t]) + ru[t] - vt[t] + wg[t] - pf[t]).collect())
}

/// `½γ⁺u + γ⁺ℛu − 𝒱T⁺u + 𝒲γ⁺u − γ⁺𝒫𝒜u` at the boundary nodes.
pub fn third_green_boundary_residual(u: &SmoothTestFunction, ctx: &ParametrixContext) -> Result<BoundaryField> {
    let targets = ctx.boundary_positions();
    let uv = ctx.volume.sample(|x| u.value(x));
    let f = ctx.volume.sample(|x| u.apply_operator(&ctx.coefficient, x));
    let gamma_u = u.trace(ctx);
    let ru = r_matrix(ctx, &targets, RemainderMethod::Relation)?.matvec(&uv);
    let vt = direct_v_matrix(ctx).matvec(&u.conormal_trace(ctx));
    let wg = direct_w_matrix(ctx).matvec(&gamma_u);
    let pf = pot_p(ctx, &f, &targets)?;
    Ok((0..targets.len()).map(|i| 0.5 * gamma_u[i] + ru[i] - vt[i] + wg[i] - pf[i]).collect())
}

/// `V(Ψ − T⁺u) − W(Φ − γ⁺u)` at interior targets.
pub fn indirect_relation_residual(
    psi: &[f64],
    phi: &[f64],
    u: &SmoothTestFunction,
    ctx: &ParametrixContext,
    targets: &[Point3],
) -> Result<Vec<f64>> {
    let dpsi: Vec<f64> = psi.iter().zip(u.conormal_trace(ctx)).map(|(p, t)| p - t).collect();
    let dphi: Vec<f64> = phi.iter().zip(u.trace(ctx)).map(|(p, g)| p - g).collect();
    let v = crate::parametrix::pot_v(ctx, &dpsi, targets)?;
    let w = crate::parametrix::pot_w(ctx, &dphi, targets)?;
    Ok(v.iter().zip(&w).map(|(a, b)| a - b).collect())
}

/// Classical Laplace representation residual
/// `u − V_Δ(∂u/∂n) + W_Δ(u) − 𝒫_Δ(Δu)` at interior targets.
pub fn classical_green_residual(u: &SmoothTestFunction, ctx: &ParametrixContext, targets: &[Point3]) -> Result<Vec<f64>> {
    let layers = ctx.layers();
    let dn = ctx.boundary.sample(|n| u.gradient(n.pos).dot(n.normal));
    let v = layers.single_layer(&dn, targets, LayerMethod::Auto)?;
    let w = layers.double_layer(&u.trace(ctx), targets, LayerMethod::Auto)?;
    let lap = ctx.volume.sample(|x| u.laplacian(x));
    let (p, _) = ctx.newton().apply(&lap, targets)?;
    Ok((0..targets.len()).map(|t| u.value(targets[t]) - v[t] + w[t] - p[t]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::make_coefficient;

    #[test]
    fn operator_matches_finite_differences() {
        let a = make_coefficient("exp_linear", &[2.0]).unwrap();
        let fns = [
            SmoothTestFunction::linear([1.0, 2.0, 0.0]),
            SmoothTestFunction::square(1),
            SmoothTestFunction::Exponential { k: [0.3, -0.2, 0.5] },
        ];
        let x = Point3::new(0.2, -0.1, 0.3);
        let h = 1e-4;
        for u in fns {
            // ∇·(a∇u) by central differences of the flux.
            let mut div = 0.0;
            for k in 0..3 {
                let mut e = [0.0; 3];
                e[k] = h;
                let e = Point3::from_array(e);
                let flux = |p: Point3| a.a(p) * u.gradient(p).get(k);
                div += (flux(x + e) - flux(x - e)) / (2.0 * h);
            }
            assert!((div - u.apply_operator(&a, x)).abs() < 1e-5);
            for k in 0..3 {
                let mut e = [0.0; 3];
                e[k] = h;
                let e = Point3::from_array(e);
                let fd = (u.value(x + e) - u.value(x - e)) / (2.0 * h);
                assert!((fd - u.gradient(x).get(k)).abs() < 1e-6);
            }
        }
    }
}
