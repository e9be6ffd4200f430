//! Real orthonormal spherical harmonics and their projection on the
//! boundary product rule.
//!
//! Coefficients are stored degree-major: `(n, m)` lives at `n² + n + m`,
//! `-n ≤ m ≤ n`. Negative orders carry the `sin(|m|φ)` factor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryMesh, Point3};

pub fn sh_index(n: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= n);
    ((n * n + n) as i64 + m) as usize
}

pub fn sh_count(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 1)
}

/// Degree of the harmonic stored at `idx`.
pub fn sh_degree(idx: usize) -> usize {
    (idx as f64).sqrt().floor() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShCoefficients {
    pub l_max: usize,
    pub coeffs: Vec<f64>,
}

impl ShCoefficients {
    pub fn zeros(l_max: usize) -> Self {
        Self { l_max, coeffs: vec![0.0; sh_count(l_max)] }
    }

    /// A single harmonic `Y_n^m` with unit coefficient.
    pub fn single(l_max: usize, n: usize, m: i64) -> Self {
        let mut c = Self::zeros(l_max);
        c.coeffs[sh_index(n, m)] = 1.0;
        c
    }

    pub fn get(&self, n: usize, m: i64) -> f64 {
        self.coeffs[sh_index(n, m)]
    }

    /// Multiply each degree-`n` block by `f(n)`.
    pub fn scale_by_degree(&self, f: impl Fn(usize) -> f64) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c * f(sh_degree(i))).collect();
        Self { l_max: self.l_max, coeffs }
    }

    /// Evaluate the expansion at a direction (normalized internally).
    pub fn eval(&self, dir: Point3) -> f64 {
        eval_real_sh(self.l_max, dir).iter().zip(&self.coeffs).map(|(y, c)| y * c).sum()
    }

    /// Evaluate at every node of a mesh.
    pub fn synthesize(&self, mesh: &BoundaryMesh) -> Vec<f64> {
        mesh.nodes.iter().map(|n| self.eval(n.normal)).collect()
    }
}

/// All real orthonormal harmonics up to `l_max` at the direction of `p`.
pub fn eval_real_sh(l_max: usize, p: Point3) -> Vec<f64> {
    let d = p.normalized();
    let t = d.x3.clamp(-1.0, 1.0);
    let s = (d.x1 * d.x1 + d.x2 * d.x2).sqrt();
    let phi = d.x2.atan2(d.x1);
    let plm = normalized_legendre(l_max, t, s);
    let mut out = vec![0.0; sh_count(l_max)];
    let sqrt2 = std::f64::consts::SQRT_2;
    for m in 0..=l_max {
        let (sm, cm) = (m as f64 * phi).sin_cos();
        for n in m..=l_max {
            let p = plm[n * (n + 1) / 2 + m];
            if m == 0 {
                out[sh_index(n, 0)] = p;
            } else {
                out[sh_index(n, m as i64)] = sqrt2 * p * cm;
                out[sh_index(n, -(m as i64))] = sqrt2 * p * sm;
            }
        }
    }
    out
}

/// Orthonormal associated Legendre functions `P̄_n^m(t)`, packed as
/// `n(n+1)/2 + m`, without the Condon–Shortley phase.
fn normalized_legendre(l_max: usize, t: f64, s: f64) -> Vec<f64> {
    let idx = |n: usize, m: usize| n * (n + 1) / 2 + m;
    let mut p = vec![0.0; (l_max + 1) * (l_max + 2) / 2];
    p[0] = (1.0 / (4.0 * PI)).sqrt();
    for m in 1..=l_max {
        let mf = m as f64;
        p[idx(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[idx(m - 1, m - 1)];
    }
    for m in 0..l_max {
        p[idx(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * t * p[idx(m, m)];
    }
    for m in 0..=l_max {
        let mf = m as f64;
        for n in (m + 2)..=l_max {
            let nf = n as f64;
            let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
            let b = (((nf - 1.0) * (nf - 1.0) - mf * mf) / (4.0 * (nf - 1.0) * (nf - 1.0) - 1.0)).sqrt();
            p[idx(n, m)] = a * (t * p[idx(n - 1, m)] - b * p[idx(n - 2, m)]);
        }
    }
    p
}

/// Harmonic table on a boundary mesh: row `i` holds all harmonics at node
/// `i`. Projection uses the mesh quadrature, which is exact for band-limited
/// data of degree `≤ mesh.max_exact_degree()`.
#[derive(Debug, Clone)]
pub struct ShBasis {
    pub l_max: usize,
    pub radius: f64,
    /// Row-major `n_nodes × sh_count(l_max)`.
    values: Vec<f64>,
    /// Quadrature weights on the unit sphere.
    weights: Vec<f64>,
}

impl ShBasis {
    pub fn new(mesh: &BoundaryMesh, l_max: usize) -> Result<Self> {
        if l_max > mesh.max_exact_degree() {
            return Err(Error::InvalidMesh(format!(
                "degree cap {l_max} exceeds the exactness degree {} of the boundary rule",
                mesh.max_exact_degree()
            )));
        }
        let r2 = mesh.radius * mesh.radius;
        let mut values = Vec::with_capacity(mesh.len() * sh_count(l_max));
        for n in &mesh.nodes {
            values.extend(eval_real_sh(l_max, n.normal));
        }
        let weights = mesh.nodes.iter().map(|n| n.weight / r2).collect();
        Ok(Self { l_max, radius: mesh.radius, values, weights })
    }

    pub fn for_mesh(mesh: &BoundaryMesh) -> Self {
        Self::new(mesh, mesh.max_exact_degree()).expect("exactness degree is admissible")
    }

    pub fn n_coeffs(&self) -> usize {
        sh_count(self.l_max)
    }

    pub fn n_nodes(&self) -> usize {
        self.weights.len()
    }

    pub fn row(&self, node: usize) -> &[f64] {
        let nc = self.n_coeffs();
        &self.values[node * nc..(node + 1) * nc]
    }

    /// Unit-sphere quadrature weight of node `i` (surface weight / R²).
    pub fn unit_weight(&self, node: usize) -> f64 {
        self.weights[node]
    }

    pub fn project(&self, values: &[f64]) -> ShCoefficients {
        assert_eq!(values.len(), self.n_nodes());
        let nc = self.n_coeffs();
        let mut coeffs = vec![0.0; nc];
        for (i, (&v, &w)) in values.iter().zip(&self.weights).enumerate() {
            let wv = w * v;
            for (c, y) in coeffs.iter_mut().zip(self.row(i)) {
                *c += wv * y;
            }
        }
        ShCoefficients { l_max: self.l_max, coeffs }
    }

    pub fn synthesize(&self, c: &ShCoefficients) -> Vec<f64> {
        assert_eq!(c.l_max, self.l_max);
        (0..self.n_nodes()).map(|i| self.row(i).iter().zip(&c.coeffs).map(|(y, c)| y * c).sum()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_sphere_boundary;

    #[test]
    fn index_layout() {
        assert_eq!(sh_index(0, 0), 0);
        assert_eq!(sh_index(1, -1), 1);
        assert_eq!(sh_index(1, 1), 3);
        assert_eq!(sh_index(3, 3), 15);
        for i in 0..sh_count(6) {
            let n = sh_degree(i);
            assert!(n * n <= i && i < (n + 1) * (n + 1));
        }
    }

    #[test]
    fn low_degree_closed_forms() {
        let p = Point3::new(0.3, -0.4, 0.5).normalized();
        let y = eval_real_sh(2, p);
        let c0 = (1.0 / (4.0 * PI)).sqrt();
        let c1 = (3.0 / (4.0 * PI)).sqrt();
        assert!((y[sh_index(0, 0)] - c0).abs() < 1e-14);
        assert!((y[sh_index(1, 0)] - c1 * p.x3).abs() < 1e-14);
        assert!((y[sh_index(1, 1)] - c1 * p.x1).abs() < 1e-14);
        assert!((y[sh_index(1, -1)] - c1 * p.x2).abs() < 1e-14);
        let c20 = (5.0 / (16.0 * PI)).sqrt();
        assert!((y[sh_index(2, 0)] - c20 * (3.0 * p.x3 * p.x3 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn orthonormal_on_gauss_product_rule() {
        let mesh = build_sphere_boundary(1.0, 10, 20).unwrap();
        let basis = ShBasis::for_mesh(&mesh);
        assert_eq!(basis.l_max, 9);
        let nc = basis.n_coeffs();
        for a in 0..nc {
            for b in 0..nc {
                let g: f64 = (0..mesh.len()).map(|i| basis.unit_weight(i) * basis.row(i)[a] * basis.row(i)[b]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-12, "gram({a},{b}) = {g}");
            }
        }
    }

    #[test]
    fn projection_reproduces_band_limited_data() {
        let mesh = build_sphere_boundary(2.0, 8, 16).unwrap();
        let basis = ShBasis::for_mesh(&mesh);
        let f = mesh.sample(|n| n.normal.x1 * n.normal.x2 + 0.5 * n.normal.x3 - 1.0);
        let c = basis.project(&f);
        let back = basis.synthesize(&c);
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
