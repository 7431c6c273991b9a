//! Scalar functionals of the discrete state: moments, entropies, Fisher
//! information and L2 distances. All integrals are rectangle-rule sums over
//! the `p = 1` grid of the torus; the numerical solution is taken to vanish
//! outside it.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::analytic::MaxwellianParams;
use crate::smoothing::{weight_mk, WeightSpec};
use crate::torus::{forward, inverse, PhysicalField};
use crate::{Error, Result, SpectralField, Vec3};

/// Samples at or below this value are dropped from logarithms and from the
/// Fisher quotient.
pub const FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub rho: f64,
    /// Bulk velocity.
    pub u: Vec3,
    pub temperature: f64,
    /// `int |v|^2 f`.
    pub energy: f64,
}

impl Moments {
    pub fn momentum(&self) -> Vec3 {
        [self.rho * self.u[0], self.rho * self.u[1], self.rho * self.u[2]]
    }

    /// Maxwellian with the same mass, momentum and energy.
    pub fn maxwellian(&self) -> Result<MaxwellianParams> {
        MaxwellianParams::new(self.rho, self.u, self.temperature)
    }
}

pub fn moments(f: &PhysicalField) -> Result<Moments> {
    let h3 = f.cell_volume();
    let mut rho = 0.0;
    let mut first = [0.0; 3];
    let mut second = 0.0;
    for (idx, &x) in f.samples().iter().enumerate() {
        let v = f.node(idx);
        rho += x;
        for axis in 0..3 {
            first[axis] += v[axis] * x;
        }
        second += (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) * x;
    }
    rho *= h3;
    if !(rho > 0.0) {
        return Err(Error::NonPositiveMass(rho));
    }
    let u = [first[0] * h3 / rho, first[1] * h3 / rho, first[2] * h3 / rho];
    let energy = second * h3;
    // sum |v - u|^2 f = E - rho |u|^2
    let u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    let temperature = (energy - rho * u2) / (3.0 * rho);
    Ok(Moments {
        rho,
        u,
        temperature,
        energy,
    })
}

/// `H(f) = int f log f`, nodes with `f <= FLOOR` contributing nothing.
pub fn entropy(f: &PhysicalField) -> f64 {
    f.samples()
        .iter()
        .filter(|&&x| x > FLOOR)
        .map(|&x| x * x.ln())
        .sum::<f64>()
        * f.cell_volume()
}

/// `H(f | mu) = int [f log(f / mu) - f + mu]` against the Maxwellian with
/// the moments of `f`.
pub fn relative_entropy(f: &PhysicalField) -> Result<f64> {
    let mu = moments(f)?.maxwellian()?;
    Ok(relative_entropy_to(f, &mu))
}

pub fn relative_entropy_to(f: &PhysicalField, mu: &MaxwellianParams) -> f64 {
    let mut sum = 0.0;
    for (idx, &x) in f.samples().iter().enumerate() {
        let v = f.node(idx);
        let ln_mu = mu.ln_density(v);
        let log_term = if x > FLOOR { x * (x.ln() - ln_mu) } else { 0.0 };
        sum += log_term - x + ln_mu.exp();
    }
    sum * f.cell_volume()
}

/// `I(f) = int |grad f|^2 / f`, evaluated as `4 int |grad sqrt(f)|^2`.
///
/// Dividing a spectral gradient by `f` amplifies rounding error in the
/// far tail by up to `1 / FLOOR`; the square-root form has no denominator.
/// `sqrt(f)` is resampled on the `p = 1` grid with nodes at or below
/// `FLOOR` set to zero, then differentiated spectrally.
pub fn fisher(f: &SpectralField) -> Result<f64> {
    let spec = *f.spec();
    let mut root = inverse(f, 1)?;
    for x in root.samples_mut() {
        *x = if *x > FLOOR { x.sqrt() } else { 0.0 };
    }
    let root_hat = forward(&root)?;
    let n = spec.n() as i64;
    let scale = PI / spec.half_width();
    let mut sum = 0.0;
    for axis in 0..3 {
        let mut d = root_hat.clone();
        for (idx, c) in d.coeffs_mut().iter_mut().enumerate() {
            let k = spec.mode_at(idx)[axis];
            // the unmatched -N mode has no real derivative on the grid
            *c = if k == -n {
                Complex64::new(0.0, 0.0)
            } else {
                *c * Complex64::new(0.0, scale * k as f64)
            };
        }
        sum += inverse(&d, 1)?.samples().iter().map(|x| x * x).sum::<f64>();
    }
    Ok(4.0 * sum * root.cell_volume())
}

/// `(h^3 sum (f - ref)^2 w)^(1/2)` on the `p = 1` grid, `w = m_k^2` when a
/// weight order is given.
pub fn l2_error<F: Fn(Vec3) -> f64>(
    f: &SpectralField,
    reference: F,
    weight_k: Option<u32>,
) -> Result<f64> {
    let values = inverse(f, 1)?;
    Ok(l2_error_samples(&values, reference, weight_k))
}

pub fn l2_error_samples<F: Fn(Vec3) -> f64>(
    values: &PhysicalField,
    reference: F,
    weight_k: Option<u32>,
) -> f64 {
    let weight = weight_k.map(|k| WeightSpec::new(k, *values.spec()));
    let sum: f64 = values
        .samples()
        .iter()
        .enumerate()
        .map(|(idx, &x)| {
            let v = values.node(idx);
            let d = x - reference(v);
            let w = weight.map_or(1.0, |w| {
                let m = weight_mk(v, &w);
                m * m
            });
            d * d * w
        })
        .sum();
    (sum * values.cell_volume()).sqrt()
}

/// One time sample of every diagnostic functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagRecord {
    pub t: f64,
    pub mass: f64,
    pub momentum: Vec3,
    pub energy: f64,
    pub temperature: f64,
    pub entropy: f64,
    pub rel_entropy: f64,
    pub fisher: f64,
    pub l2_error: Option<f64>,
    pub l2_to_equilibrium: f64,
}

impl DiagRecord {
    pub fn compute(
        t: f64,
        f: &SpectralField,
        reference: Option<&dyn Fn(Vec3) -> f64>,
    ) -> Result<Self> {
        let values = inverse(f, 1)?;
        let m = moments(&values)?;
        let mu = m.maxwellian()?;
        let l2_error = reference.map(|r| l2_error_samples(&values, r, None));
        let l2_to_equilibrium =
            l2_error_samples(&values, |v| crate::analytic::maxwellian(v, &mu), None);
        Ok(Self {
            t,
            mass: m.rho,
            momentum: m.momentum(),
            energy: m.energy,
            temperature: m.temperature,
            entropy: entropy(&values),
            rel_entropy: relative_entropy_to(&values, &mu),
            fisher: fisher(f)?,
            l2_error,
            l2_to_equilibrium,
        })
    }

    pub fn is_finite(&self) -> bool {
        let mut all: Vec<f64> = alloc::vec![
            self.t,
            self.mass,
            self.energy,
            self.temperature,
            self.entropy,
            self.rel_entropy,
            self.fisher,
            self.l2_to_equilibrium,
        ];
        all.extend_from_slice(&self.momentum);
        all.extend(self.l2_error);
        all.iter().all(|x| x.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{maxwellian, two_gaussian_ic};
    use crate::TorusSpec;

    fn gaussian_grid() -> TorusSpec {
        TorusSpec::new(8.0, 16, 0.0).unwrap()
    }

    #[test]
    fn maxwellian_moments_match_poisson_prediction() {
        // Poisson summation: per axis the rectangle rule picks up the
        // aliases of the Gaussian transform at 2 pi m / h, m = +-1.
        let spec = gaussian_grid();
        let mu = MaxwellianParams::standard();
        let f = PhysicalField::sample(spec, 1, |v| maxwellian(v, &mu)).unwrap();
        let m = moments(&f).unwrap();
        let xi = 2.0 * PI / f.spacing();
        let alias = 2.0 * (-xi * xi / 2.0).exp();
        let mass = (1.0 + alias).powi(3);
        let temperature = (1.0 + (1.0 - xi * xi) * alias) / (1.0 + alias);
        assert!((m.rho - mass).abs() < 1e-12);
        assert!((m.temperature - temperature).abs() < 1e-12);
        assert!((m.rho - 1.0).abs() < 1e-6);
        assert!(m.u.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn maxwellian_moments_on_fine_grid() {
        let spec = TorusSpec::new(8.0, 24, 0.0).unwrap();
        let mu = MaxwellianParams::new(1.0, [0.5, 0.0, -0.25], 1.0).unwrap();
        let f = PhysicalField::sample(spec, 1, |v| maxwellian(v, &mu)).unwrap();
        let m = moments(&f).unwrap();
        assert!((m.rho - 1.0).abs() < 1e-10);
        assert!((m.u[0] - 0.5).abs() < 1e-10 && m.u[1].abs() < 1e-10 && (m.u[2] + 0.25).abs() < 1e-10);
        assert!((m.temperature - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_gaussian_moments() {
        let spec = TorusSpec::new(8.0, 24, 0.0).unwrap();
        let f = PhysicalField::sample(spec, 1, two_gaussian_ic).unwrap();
        let m = moments(&f).unwrap();
        assert!((m.rho - 1.0).abs() < 1e-6);
        assert!(m.u.iter().all(|c| c.abs() < 1e-6));
        assert!((m.temperature - 7.0 / 3.0).abs() < 1e-6);
        assert!((m.energy - 7.0).abs() < 1e-6);
    }

    #[test]
    fn zero_field_has_no_moments() {
        let f = PhysicalField::zeros(gaussian_grid(), 1).unwrap();
        assert_eq!(moments(&f), Err(Error::NonPositiveMass(0.0)));
        assert!(relative_entropy(&f).is_err());
    }

    #[test]
    fn gaussian_entropy() {
        let spec = gaussian_grid();
        let mu = MaxwellianParams::standard();
        let f = PhysicalField::sample(spec, 1, |v| maxwellian(v, &mu)).unwrap();
        let expect = -1.5 * (1.0 + (2.0 * PI).ln());
        assert!((entropy(&f) - expect).abs() < 1e-4);
        assert!((expect + 4.256_815_599_6).abs() < 1e-9);
    }

    #[test]
    fn entropy_scaling_identity() {
        let spec = TorusSpec::new(4.0, 8, 0.0).unwrap();
        let mu = MaxwellianParams::standard();
        let f = PhysicalField::sample(spec, 1, |v| maxwellian(v, &mu)).unwrap();
        let twice = PhysicalField::sample(spec, 1, |v| 2.0 * maxwellian(v, &mu)).unwrap();
        let expect = 2.0 * entropy(&f) + 2.0 * 2f64.ln() * f.integral();
        // nodes crossing the floor under doubling are negligible here
        assert!((entropy(&twice) - expect).abs() < 1e-12);
    }

    #[test]
    fn floored_entropy_is_zero() {
        let spec = TorusSpec::new(1.0, 2, 0.0).unwrap();
        let f = PhysicalField::sample(spec, 1, |v| if v[0] > 0.0 { 1e-31 } else { -2.0 }).unwrap();
        assert_eq!(entropy(&f), 0.0);
    }

    #[test]
    fn relative_entropy_of_maxwellian_vanishes() {
        let spec = gaussian_grid();
        let mu = MaxwellianParams::new(1.0, [0.3, 0.0, -0.2], 1.2).unwrap();
        let f = PhysicalField::sample(spec, 1, |v| maxwellian(v, &mu)).unwrap();
        assert!(relative_entropy(&f).unwrap().abs() < 1e-8);
    }

    #[test]
    fn relative_entropy_of_bkw_start_is_positive() {
        let spec = gaussian_grid();
        let p = crate::analytic::BkwParams::default();
        let f = PhysicalField::sample(spec, 1, |v| crate::analytic::bkw(0.0, v, &p)).unwrap();
        assert!(relative_entropy(&f).unwrap() > 1e-3);
        let g = PhysicalField::sample(spec, 1, two_gaussian_ic).unwrap();
        assert!(relative_entropy(&g).unwrap() > 1e-3);
    }

    #[test]
    fn gaussian_fisher() {
        let spec = gaussian_grid();
        let mu = MaxwellianParams::standard();
        let f = SpectralField::sample(spec, 1, |v| maxwellian(v, &mu)).unwrap();
        assert!((fisher(&f).unwrap() - 3.0).abs() < 1e-3);
    }

    #[test]
    fn constant_has_no_fisher_information() {
        let spec = TorusSpec::new(2.0, 4, 0.0).unwrap();
        let f = SpectralField::sample(spec, 1, |_| 0.3).unwrap();
        assert!(fisher(&f).unwrap().abs() < 1e-20);
    }

    #[test]
    fn fisher_is_translation_invariant() {
        let spec = gaussian_grid();
        let h = spec.half_width() / spec.n() as f64;
        let shifted = MaxwellianParams::new(1.0, [2.0 * h, -h, 0.0], 1.0).unwrap();
        let centred = MaxwellianParams::standard();
        let a = fisher(&SpectralField::sample(spec, 1, |v| maxwellian(v, &centred)).unwrap()).unwrap();
        let b = fisher(&SpectralField::sample(spec, 1, |v| maxwellian(v, &shifted)).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn l2_error_examples() {
        let spec = TorusSpec::new(3.0, 6, 0.0).unwrap();
        let reference = |v: Vec3| two_gaussian_ic(v);
        let f = SpectralField::sample(spec, 1, reference).unwrap();
        assert!(l2_error(&f, reference, None).unwrap() <= 1e-12);
        let c = 0.01;
        let e = l2_error(&f, |v| reference(v) + c, None).unwrap();
        let expect = c * (2.0 * spec.half_width()).powf(1.5);
        assert!((e - expect).abs() < 1e-10 * expect);
        let weighted = l2_error(&f, |v| reference(v) + c, Some(2)).unwrap();
        assert!(weighted > e);
    }

    #[test]
    fn mass_from_grid_equals_zero_mode() {
        let spec = TorusSpec::new(3.0, 8, 0.0).unwrap();
        let f = PhysicalField::sample(spec, 1, two_gaussian_ic).unwrap();
        let s = forward(&f).unwrap();
        let m = moments(&inverse(&s, 1).unwrap()).unwrap();
        assert!((m.rho - s[[0, 0, 0]].re).abs() <= 1e-13 * m.rho);
    }

    #[test]
    fn record_is_complete() {
        let spec = TorusSpec::new(3.0, 6, 0.0).unwrap();
        let f = SpectralField::sample(spec, 1, two_gaussian_ic).unwrap();
        let r = DiagRecord::compute(0.5, &f, Some(&two_gaussian_ic)).unwrap();
        assert!(r.is_finite());
        assert_eq!(r.t, 0.5);
        assert!(r.l2_error.unwrap() < 1e-12);
        assert!(r.rel_entropy > 0.0);
        let r = DiagRecord::compute(0.0, &f, None).unwrap();
        assert_eq!(r.l2_error, None);
    }
}
