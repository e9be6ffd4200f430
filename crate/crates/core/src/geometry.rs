//! Quadrature meshes for a ball and its bounding sphere.
//!
//! The boundary rule is a Gauss product rule: Gauss–Legendre in `cos θ`
//! times a uniform rule in azimuth. The volume rule adds a radial
//! Gauss–Legendre factor on `(0, R)` so that every node is strictly
//! interior. The boundary is split along the equator into a Dirichlet part
//! (`x3 < 0`) and a Neumann part (`x3 > 0`).

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes closer than this to the equator are considered to lie on the
/// partition curve.
pub const PARTITION_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Point3 {
    pub const ZERO: Point3 = Point3 { x1: 0.0, x2: 0.0, x3: 0.0 };

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    /// Component `k` (0-based).
    pub fn get(self, k: usize) -> f64 {
        match k {
            0 => self.x1,
            1 => self.x2,
            2 => self.x3,
            _ => panic!("Point3 component index {k} out of range"),
        }
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x1 * o.x1 + self.x2 * o.x2 + self.x3 * o.x3
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// Unit vector in the direction of `self`; the zero vector maps to `e3`.
    pub fn normalized(self) -> Point3 {
        let n = self.norm();
        if n == 0.0 {
            Point3::new(0.0, 0.0, 1.0)
        } else {
            self / n
        }
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }
}

impl Mul<Point3> for f64 {
    type Output = Point3;
    fn mul(self, p: Point3) -> Point3 {
        p * self
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x1 / s, self.x2 / s, self.x3 / s)
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Dirichlet,
    Neumann,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Dirichlet => f.write_str("dirichlet"),
            Region::Neumann => f.write_str("neumann"),
        }
    }
}

/// Dirichlet below the equator, Neumann above it.
pub fn classify_region(p: Point3) -> Result<Region> {
    if p.x3.abs() < PARTITION_TOL {
        return Err(Error::OnPartitionCurve(p));
    }
    Ok(if p.x3 < 0.0 { Region::Dirichlet } else { Region::Neumann })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub pos: Point3,
    /// Outward unit normal.
    pub normal: Point3,
    pub weight: f64,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMesh {
    pub nodes: Vec<BoundaryNode>,
    pub radius: f64,
    pub n_polar: usize,
    pub n_azimuth: usize,
}

impl BoundaryMesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Point3> + '_ {
        self.nodes.iter().map(|n| n.pos)
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Integrate nodal values against the surface weights.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len());
        self.nodes.iter().zip(values).map(|(n, v)| n.weight * v).sum()
    }

    /// Sample a function at the nodes.
    pub fn sample(&self, f: impl Fn(&BoundaryNode) -> f64) -> Vec<f64> {
        self.nodes.iter().map(f).collect()
    }

    pub fn region_indices(&self, region: Region) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.region == region)
            .map(|(i, _)| i)
            .collect()
    }

    /// Largest spherical-harmonic degree whose products are integrated
    /// exactly by this rule.
    pub fn max_exact_degree(&self) -> usize {
        (self.n_polar - 1).min((self.n_azimuth - 1) / 2)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x1", "x2", "x3", "n1", "n2", "n3", "weight", "region"])?;
        for n in &self.nodes {
            out.write_record(&[
                n.pos.x1.to_string(),
                n.pos.x2.to_string(),
                n.pos.x3.to_string(),
                n.normal.x1.to_string(),
                n.normal.x2.to_string(),
                n.normal.x3.to_string(),
                n.weight.to_string(),
                n.region.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeNode {
    pub pos: Point3,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeMesh {
    pub nodes: Vec<VolumeNode>,
    pub radius: f64,
}

impl VolumeMesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn positions(&self) -> Vec<Point3> {
        self.nodes.iter().map(|n| n.pos).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len());
        self.nodes.iter().zip(values).map(|(n, v)| n.weight * v).sum()
    }

    pub fn sample(&self, f: impl Fn(Point3) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|n| f(n.pos)).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x1", "x2", "x3", "weight"])?;
        for n in &self.nodes {
            out.write_record(&[
                n.pos.x1.to_string(),
                n.pos.x2.to_string(),
                n.pos.x3.to_string(),
                n.weight.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Unit directions and weights of the spherical product rule (weights sum to 4π).
fn unit_sphere_rule(n_polar: usize, n_azimuth: usize) -> Vec<(Point3, f64)> {
    let (t, w) = gauss_legendre(n_polar);
    let dphi = 2.0 * PI / n_azimuth as f64;
    let mut out = Vec::with_capacity(n_polar * n_azimuth);
    for (&ct, &wt) in t.iter().zip(&w) {
        let st = (1.0 - ct * ct).sqrt();
        for j in 0..n_azimuth {
            let phi = dphi * j as f64;
            out.push((Point3::new(st * phi.cos(), st * phi.sin(), ct), wt * dphi));
        }
    }
    out
}

/// Product-rule boundary mesh on the sphere of the given radius.
pub fn build_sphere_boundary(radius: f64, n_polar: usize, n_azimuth: usize) -> Result<BoundaryMesh> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidMesh(format!("radius must be positive, got {radius}")));
    }
    if n_polar % 2 == 1 {
        return Err(Error::InvalidMesh(format!(
            "n_polar must be even so that no node lies on the equator (the Dirichlet/Neumann partition curve), got {n_polar}"
        )));
    }
    if n_polar < 4 {
        return Err(Error::InvalidMesh(format!("n_polar must be at least 4, got {n_polar}")));
    }
    if n_azimuth < 8 {
        return Err(Error::InvalidMesh(format!("n_azimuth must be at least 8, got {n_azimuth}")));
    }
    let r2 = radius * radius;
    let nodes = unit_sphere_rule(n_polar, n_azimuth)
        .into_iter()
        .map(|(dir, w)| {
            let region = classify_region(dir).expect("even n_polar keeps nodes off the equator");
            BoundaryNode { pos: dir * radius, normal: dir, weight: w * r2, region }
        })
        .collect();
    Ok(BoundaryMesh { nodes, radius, n_polar, n_azimuth })
}

/// Radial Gauss–Legendre on `(0, R)` times the spherical product rule.
pub fn build_ball_volume(radius: f64, n_r: usize, n_polar: usize, n_azimuth: usize) -> Result<VolumeMesh> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidMesh(format!("radius must be positive, got {radius}")));
    }
    if n_r < 2 || n_polar < 2 || n_azimuth < 2 {
        return Err(Error::InvalidMesh(format!(
            "volume counts must all be at least 2, got ({n_r}, {n_polar}, {n_azimuth})"
        )));
    }
    let (xr, wr) = gauss_legendre(n_r);
    let sphere = unit_sphere_rule(n_polar, n_azimuth);
    let mut nodes = Vec::with_capacity(n_r * sphere.len());
    for (&x, &w) in xr.iter().zip(&wr) {
        let r = 0.5 * radius * (x + 1.0);
        let wrad = 0.5 * radius * w * r * r;
        for &(dir, ws) in &sphere {
            nodes.push(VolumeNode { pos: dir * r, weight: wrad * ws });
        }
    }
    Ok(VolumeMesh { nodes, radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        for deg in 0..=13 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}: {q} vs {exact}");
        }
    }

    #[test]
    fn sphere_node_counts_and_area() {
        let m = build_sphere_boundary(1.0, 16, 32).unwrap();
        assert_eq!(m.len(), 512);
        assert_relative_eq!(m.total_weight(), 4.0 * PI, max_relative = 1e-10);
        assert_eq!(m.region_indices(Region::Dirichlet).len(), 256);
        assert_eq!(m.region_indices(Region::Neumann).len(), 256);
        let m2 = build_sphere_boundary(2.0, 16, 32).unwrap();
        assert_relative_eq!(m2.total_weight(), 16.0 * PI, max_relative = 1e-10);
    }

    #[test]
    fn sphere_normals_are_unit_and_radial() {
        let m = build_sphere_boundary(1.0, 8, 16).unwrap();
        for n in &m.nodes {
            assert!((n.normal.norm() - 1.0).abs() < 1e-12);
            assert!((n.pos - n.normal).norm() < 1e-15);
            assert!(n.weight > 0.0);
        }
    }

    #[test]
    fn rejects_odd_polar_count() {
        let err = build_sphere_boundary(1.0, 15, 32).unwrap_err();
        assert!(err.to_string().contains("equator"));
        assert!(build_sphere_boundary(1.0, 2, 32).is_err());
        assert!(build_sphere_boundary(1.0, 4, 7).is_err());
        assert!(build_sphere_boundary(0.0, 4, 8).is_err());
    }

    #[test]
    fn ball_volume_moments() {
        let m = build_ball_volume(1.0, 8, 12, 24).unwrap();
        assert_relative_eq!(m.total_weight(), 4.0 * PI / 3.0, max_relative = 1e-10);
        let first = m.integrate(&m.sample(|p| p.x1));
        assert!(first.abs() < 1e-10);
        let second = m.integrate(&m.sample(|p| p.norm_squared()));
        assert!((second - 4.0 * PI / 5.0).abs() < 1e-8);
        assert!(m.nodes.iter().all(|n| n.pos.norm() < 1.0 && n.weight > 0.0));
    }

    #[test]
    fn classify_region_cases() {
        assert_eq!(classify_region(Point3::new(0.0, 0.0, -1.0)).unwrap(), Region::Dirichlet);
        assert_eq!(classify_region(Point3::new(0.0, 0.0, 1.0)).unwrap(), Region::Neumann);
        assert!(classify_region(Point3::new(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_sphere_boundary(1.0, 12, 24).unwrap();
        let b = build_sphere_boundary(1.0, 12, 24).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn boundary_rule_kills_degree_one() {
        let m = build_sphere_boundary(1.0, 16, 32).unwrap();
        for k in 0..3 {
            let q = m.integrate(&m.sample(|n| n.pos.get(k)));
            assert!(q.abs() < 1e-10);
        }
    }
}
