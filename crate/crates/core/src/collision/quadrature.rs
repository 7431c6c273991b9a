//! Radial Gauss–Legendre and spherical product rules for the separable gain
//! evaluation.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]

use num_traits::Float;

use crate::{Error, Result, TorusSpec, Vec3};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
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
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    // ascending order
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
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

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| (a + half * (xi + 1.0), half * wi))
        .collect()
}

/// Node on the unit sphere with its weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub sigma: Vec3,
    pub weight: f64,
}

/// Product rule on the sphere: Gauss–Legendre in `cos(theta)` times the
/// trapezoidal rule in `phi`. With `ceil((d+1)/2)` polar and twice as many
/// azimuthal nodes it integrates every spherical harmonic of degree `<= d`
/// exactly. The rule is symmetric under `sigma -> -sigma`.
pub fn sphere_product_rule(degree: usize) -> Vec<SpherePoint> {
    let n_theta = (degree + 2) / 2;
    let n_phi = 2 * n_theta;
    let (x, w) = gauss_legendre(n_theta);
    let mut points = Vec::with_capacity(n_theta * n_phi);
    let dphi = 2.0 * PI / n_phi as f64;
    for (xi, wi) in x.iter().zip(&w) {
        let s = (1.0 - xi * xi).max(0.0).sqrt();
        for j in 0..n_phi {
            let phi = (j as f64 + 0.5) * dphi;
            points.push(SpherePoint {
                sigma: [s * phi.cos(), s * phi.sin(), *xi],
                weight: wi * dphi,
            });
        }
    }
    points
}

/// Quadrature used by the separable (fast) gain evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct GainQuadrature {
    radial: Vec<(f64, f64)>,
    sphere: Vec<SpherePoint>,
    sphere_degree: usize,
}

/// Smallest admissible radial node count.
pub const MIN_RADIAL_NODES: usize = 8;

impl GainQuadrature {
    pub fn new(radial_nodes: usize, sphere_degree: usize) -> Self {
        Self {
            radial: gauss_legendre_on(radial_nodes, 0.0, 1.0),
            sphere: sphere_product_rule(sphere_degree),
            sphere_degree,
        }
    }

    /// Orders that resolve the oscillation of the gain integrand for this
    /// geometry to roughly 1e-8.
    ///
    /// On `[0, 1]` the radial integrand oscillates with frequency up to
    /// `pi lambda (|k| + |l - m|) <= 3 sqrt(3) pi lambda N`; the spherical
    /// factor needs harmonics up to `pi lambda |l - m| <= 2 sqrt(3) pi lambda N`.
    pub fn recommended(spec: &TorusSpec) -> Self {
        let w = PI * spec.lambda() * 3.0f64.sqrt() * spec.n() as f64;
        let radial = ((1.5 * w).ceil() as usize / 2 + 12).max(16);
        let degree = ((2.0 * w + 4.0 * (2.0 * w).cbrt()).ceil() as usize + 12).max(17);
        Self::new(radial, degree)
    }

    /// Minimum orders accepted for a given half-mode count: radial nodes at
    /// least [`MIN_RADIAL_NODES`], sphere degree at least 17 for `N <= 8` and
    /// growing linearly beyond.
    pub fn minimums(n: usize) -> (usize, usize) {
        (MIN_RADIAL_NODES, (17 * n).div_ceil(8).max(17))
    }

    pub fn check_for(&self, n: usize) -> Result<()> {
        let (min_radial, min_degree) = Self::minimums(n);
        if self.radial.len() < min_radial || self.sphere_degree < min_degree {
            return Err(Error::QuadratureTooCoarse {
                n,
                radial: self.radial.len(),
                degree: self.sphere_degree,
                min_radial,
                min_degree,
            });
        }
        Ok(())
    }

    /// `(r_q, w_q)` on `[0, 1]`, weights summing to 1.
    pub fn radial(&self) -> &[(f64, f64)] {
        &self.radial
    }

    /// Sphere nodes, weights summing to `4 pi`.
    pub fn sphere(&self) -> &[SpherePoint] {
        &self.sphere
    }

    pub fn sphere_degree(&self) -> usize {
        self.sphere_degree
    }

    /// One node from each antipodal pair, weight doubled.
    pub fn hemisphere(&self) -> Vec<SpherePoint> {
        let n_theta = (self.sphere_degree + 2) / 2;
        let n_phi = 2 * n_theta;
        let mut out = Vec::with_capacity(self.sphere.len() / 2);
        for i in 0..n_theta {
            for j in 0..n_phi {
                let partner = (n_theta - 1 - i) * n_phi + (j + n_phi / 2) % n_phi;
                let me = i * n_phi + j;
                if me < partner {
                    let p = self.sphere[me];
                    out.push(SpherePoint {
                        sigma: p.sigma,
                        weight: 2.0 * p.weight,
                    });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 16, 40] {
            let rule = gauss_legendre_on(n, 0.0, 1.0);
            let total: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-14);
            for deg in 0..(2 * n) {
                let approx: f64 = rule.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = 1.0 / (deg as f64 + 1.0);
                assert!((approx - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn sphere_weights_and_harmonics() {
        for degree in [5, 17, 30] {
            let rule = sphere_product_rule(degree);
            let total: f64 = rule.iter().map(|p| p.weight).sum();
            assert!((total - 4.0 * PI).abs() < 1e-12);
            // monomials x^a y^b z^c of total degree <= `degree`
            let exact = |a: i32, b: i32, c: i32| -> f64 {
                if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
                    return 0.0;
                }
                // 2 Gamma(a') Gamma(b') Gamma(c') / Gamma(a'+b'+c'), a' = (a+1)/2
                let g = |x: f64| libm_gamma(x);
                let (ap, bp, cp) = ((a as f64 + 1.0) / 2.0, (b as f64 + 1.0) / 2.0, (c as f64 + 1.0) / 2.0);
                2.0 * g(ap) * g(bp) * g(cp) / g(ap + bp + cp)
            };
            for a in 0..=degree as i32 {
                for b in 0..=(degree as i32 - a) {
                    for c in 0..=(degree as i32 - a - b).min(4) {
                        let approx: f64 = rule
                            .iter()
                            .map(|p| p.weight * p.sigma[0].powi(a) * p.sigma[1].powi(b) * p.sigma[2].powi(c))
                            .sum();
                        assert!((approx - exact(a, b, c)).abs() < 1e-12, "{a} {b} {c}");
                    }
                }
            }
        }
    }

    fn libm_gamma(x: f64) -> f64 {
        // half-integer and integer arguments only
        let mut acc = if (x - x.floor()).abs() < 1e-12 { 1.0 } else { PI.sqrt() };
        let mut y = if (x - x.floor()).abs() < 1e-12 { 1.0 } else { 0.5 };
        while y < x - 1e-12 {
            acc *= y;
            y += 1.0;
        }
        acc
    }

    #[test]
    fn hemisphere_pairs_cover_the_rule() {
        let q = GainQuadrature::new(8, 17);
        let half = q.hemisphere();
        assert_eq!(half.len() * 2, q.sphere().len());
        let total: f64 = half.iter().map(|p| p.weight).sum();
        assert!((total - 4.0 * PI).abs() < 1e-12);
        for p in &half {
            let anti = [-p.sigma[0], -p.sigma[1], -p.sigma[2]];
            assert!(q.sphere().iter().any(|s| {
                (s.sigma[0] - anti[0]).abs() < 1e-12
                    && (s.sigma[1] - anti[1]).abs() < 1e-12
                    && (s.sigma[2] - anti[2]).abs() < 1e-12
            }));
        }
    }

    #[test]
    fn minimum_orders_enforced() {
        let q = GainQuadrature::new(16, 17);
        assert!(q.check_for(4).is_ok());
        assert!(q.check_for(8).is_ok());
        assert!(matches!(q.check_for(16), Err(Error::QuadratureTooCoarse { .. })));
        assert!(GainQuadrature::new(6, 40).check_for(4).is_err());
    }
}
