//! Closed-form diffusion coefficients `a(x) > 0` and the derived fields the
//! parametrix relations need: `∇a`, `∇ln a`, `Δln a` and `∂ln a/∂n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryNode, Point3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum CoefficientField {
    /// `a ≡ c`.
    Const { c: f64 },
    /// `a = exp(k·x1)`.
    ExpLinear { k: f64 },
    /// `a = 1 + x1²`.
    OnePlusX1Squared,
}

/// Build a coefficient from its registry name and parameters.
pub fn make_coefficient(name: &str, params: &[f64]) -> Result<CoefficientField> {
    let field = match name {
        "const" => {
            let c = *params.first().unwrap_or(&1.0);
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidCoefficient(format!("const coefficient must be positive, got {c}")));
            }
            CoefficientField::Const { c }
        }
        "exp_linear" => {
            let k = *params.first().unwrap_or(&1.0);
            if !k.is_finite() {
                return Err(Error::InvalidCoefficient(format!("exp_linear rate must be finite, got {k}")));
            }
            CoefficientField::ExpLinear { k }
        }
        "one_plus_x1_squared" => CoefficientField::OnePlusX1Squared,
        other => return Err(Error::UnknownCoefficient(other.to_string())),
    };
    Ok(field)
}

impl CoefficientField {
    pub fn name(&self) -> &'static str {
        match self {
            CoefficientField::Const { .. } => "const",
            CoefficientField::ExpLinear { .. } => "exp_linear",
            CoefficientField::OnePlusX1Squared => "one_plus_x1_squared",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            CoefficientField::Const { c } => vec![c],
            CoefficientField::ExpLinear { k } => vec![k],
            CoefficientField::OnePlusX1Squared => vec![],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CoefficientField::Const { .. })
    }

    pub fn a(&self, x: Point3) -> f64 {
        match *self {
            CoefficientField::Const { c } => c,
            CoefficientField::ExpLinear { k } => (k * x.x1).exp(),
            CoefficientField::OnePlusX1Squared => 1.0 + x.x1 * x.x1,
        }
    }

    pub fn grad_a(&self, x: Point3) -> Point3 {
        match *self {
            CoefficientField::Const { .. } => Point3::ZERO,
            CoefficientField::ExpLinear { k } => Point3::new(k * (k * x.x1).exp(), 0.0, 0.0),
            CoefficientField::OnePlusX1Squared => Point3::new(2.0 * x.x1, 0.0, 0.0),
        }
    }

    pub fn grad_ln_a(&self, x: Point3) -> Point3 {
        match *self {
            CoefficientField::Const { .. } => Point3::ZERO,
            CoefficientField::ExpLinear { k } => Point3::new(k, 0.0, 0.0),
            CoefficientField::OnePlusX1Squared => Point3::new(2.0 * x.x1 / (1.0 + x.x1 * x.x1), 0.0, 0.0),
        }
    }

    pub fn laplacian_ln_a(&self, x: Point3) -> f64 {
        match *self {
            CoefficientField::Const { .. } | CoefficientField::ExpLinear { .. } => 0.0,
            CoefficientField::OnePlusX1Squared => {
                let s = x.x1 * x.x1;
                2.0 * (1.0 - s) / ((1.0 + s) * (1.0 + s))
            }
        }
    }

    /// `Δa`, used when applying `𝒜u = aΔu + ∇a·∇u`.
    pub fn laplacian_a(&self, x: Point3) -> f64 {
        match *self {
            CoefficientField::Const { .. } => 0.0,
            CoefficientField::ExpLinear { k } => k * k * (k * x.x1).exp(),
            CoefficientField::OnePlusX1Squared => 2.0,
        }
    }

    pub fn eval_dlog_a_dn(&self, node: &BoundaryNode) -> f64 {
        self.grad_ln_a(node.pos).dot(node.normal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Region;

    fn fd_laplacian(f: impl Fn(Point3) -> f64, x: Point3, h: f64) -> f64 {
        let mut acc = -6.0 * f(x);
        for k in 0..3 {
            let mut e = [0.0; 3];
            e[k] = h;
            let d = Point3::from_array(e);
            acc += f(x + d) + f(x - d);
        }
        acc / (h * h)
    }

    #[test]
    fn registry() {
        let c = make_coefficient("const", &[1.0]).unwrap();
        assert_eq!(c.a(Point3::new(0.3, 0.1, 0.2)), 1.0);
        assert_eq!(c.grad_ln_a(Point3::ZERO), Point3::ZERO);
        assert_eq!(c.laplacian_ln_a(Point3::ZERO), 0.0);
        assert!(make_coefficient("const", &[0.0]).is_err());
        assert!(make_coefficient("const", &[-2.0]).is_err());
        assert!(matches!(make_coefficient("bogus", &[]), Err(Error::UnknownCoefficient(_))));
    }

    #[test]
    fn exp_linear_fields() {
        let c = make_coefficient("exp_linear", &[2.0]).unwrap();
        let x = Point3::new(0.4, -0.2, 0.1);
        assert_eq!(c.grad_ln_a(x), Point3::new(2.0, 0.0, 0.0));
        assert_eq!(c.laplacian_ln_a(x), 0.0);
        let node = |p: Point3| BoundaryNode { pos: p, normal: p, weight: 1.0, region: Region::Neumann };
        assert!((c.eval_dlog_a_dn(&node(Point3::new(1.0, 0.0, 0.0))) - 2.0).abs() < 1e-15);
        assert_eq!(c.eval_dlog_a_dn(&node(Point3::new(0.0, 0.0, 1.0))), 0.0);
        let k = make_coefficient("const", &[3.0]).unwrap();
        assert_eq!(k.eval_dlog_a_dn(&node(Point3::new(0.6, 0.0, 0.8))), 0.0);
    }

    #[test]
    fn one_plus_x1_squared_laplacian_matches_finite_differences() {
        let c = CoefficientField::OnePlusX1Squared;
        let x = Point3::new(0.5, 0.0, 0.0);
        let fd = fd_laplacian(|p| c.a(p).ln(), x, 1e-4);
        assert!((fd - c.laplacian_ln_a(x)).abs() < 1e-6, "{fd} vs {}", c.laplacian_ln_a(x));
    }

    #[test]
    fn consistency_chain_at_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let fields = [
            CoefficientField::Const { c: 2.0 },
            CoefficientField::ExpLinear { k: 2.0 },
            CoefficientField::OnePlusX1Squared,
        ];
        for field in fields {
            for _ in 0..100 {
                let p = loop {
                    let p = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    if p.norm() < 1.0 {
                        break p;
                    }
                };
                let via_a = field.grad_a(p) / field.a(p);
                assert!((via_a - field.grad_ln_a(p)).norm() <= 1e-10);
                let fd = fd_laplacian(|q| field.a(q).ln(), p, 1e-4);
                assert!((fd - field.laplacian_ln_a(p)).abs() <= 1e-5);
                let fda = fd_laplacian(|q| field.a(q), p, 1e-4);
                assert!((fda - field.laplacian_a(p)).abs() <= 1e-5 * (1.0 + fda.abs()));
            }
        }
    }

    #[test]
    fn positive_on_closed_ball() {
        let fields = [CoefficientField::ExpLinear { k: 2.0 }, CoefficientField::OnePlusX1Squared];
        let n = 21;
        for field in fields {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let s = |t: usize| -1.0 + 2.0 * t as f64 / (n - 1) as f64;
                        let p = Point3::new(s(i), s(j), s(k));
                        if p.norm() <= 1.0 + 1e-9 {
                            assert!(field.a(p) > 0.0);
                        }
                    }
                }
            }
        }
    }
}
