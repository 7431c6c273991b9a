//! Reference distributions: the BKW self-similar solution for Maxwellian
//! molecules, Maxwellians and the two-Gaussian initial datum.

use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result, Vec3};

fn norm2(v: &Vec3) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

/// Shape law `K(t) = 1 - (1 - K0) exp(-rate t)` of the BKW solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BkwParams {
    pub k0: f64,
    pub rate: f64,
}

impl Default for BkwParams {
    fn default() -> Self {
        Self {
            k0: 0.6,
            rate: 1.0 / 6.0,
        }
    }
}

impl BkwParams {
    pub fn shape(&self, t: f64) -> f64 {
        1.0 - (1.0 - self.k0) * (-self.rate * t).exp()
    }

    /// `K'(t)`.
    pub fn shape_rate(&self, t: f64) -> f64 {
        (1.0 - self.k0) * self.rate * (-self.rate * t).exp()
    }
}

/// `f(t, v) = (2 (2 pi K)^{3/2})^-1 exp(-|v|^2 / 2K) [(5K - 3)/K + (1 - K)/K^2 |v|^2]`.
pub fn bkw(t: f64, v: Vec3, p: &BkwParams) -> f64 {
    bkw_at_shape(p.shape(t), norm2(&v))
}

fn bkw_at_shape(k: f64, r2: f64) -> f64 {
    let amplitude = 1.0 / (2.0 * (2.0 * PI * k).powf(1.5));
    amplitude * (-r2 / (2.0 * k)).exp() * ((5.0 * k - 3.0) / k + (1.0 - k) / (k * k) * r2)
}

/// `d/dt` of [`bkw`] in closed form (chain rule through `K`).
pub fn bkw_time_derivative(t: f64, v: Vec3, p: &BkwParams) -> f64 {
    let k = p.shape(t);
    let r2 = norm2(&v);
    let amplitude = 1.0 / (2.0 * (2.0 * PI * k).powf(1.5));
    let gauss = (-r2 / (2.0 * k)).exp();
    let poly = 5.0 - 3.0 / k + r2 * (1.0 / (k * k) - 1.0 / k);
    let dpoly = 3.0 / (k * k) + r2 * (1.0 / (k * k) - 2.0 / (k * k * k));
    // d/dK of amplitude * gauss = (-3/(2K) + r^2/(2K^2)) amplitude * gauss
    let dlog = -1.5 / k + r2 / (2.0 * k * k);
    let df_dk = amplitude * gauss * (dlog * poly + dpoly);
    df_dk * p.shape_rate(t)
}

/// Density, bulk velocity and temperature of a Maxwellian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellianParams {
    rho: f64,
    u: Vec3,
    temperature: f64,
}

impl MaxwellianParams {
    pub fn new(rho: f64, u: Vec3, temperature: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::NonPositiveMass(rho));
        }
        if !(temperature > 0.0) {
            return Err(Error::InvalidSpec("nonpositive temperature"));
        }
        Ok(Self { rho, u, temperature })
    }

    /// `rho = 1`, `u = 0`, `T = 1`.
    pub fn standard() -> Self {
        Self {
            rho: 1.0,
            u: [0.0; 3],
            temperature: 1.0,
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn u(&self) -> Vec3 {
        self.u
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// `log` of the density at `v`, without underflow in the far tail.
    pub fn ln_density(&self, v: Vec3) -> f64 {
        let d = [v[0] - self.u[0], v[1] - self.u[1], v[2] - self.u[2]];
        self.rho.ln() - 1.5 * (2.0 * PI * self.temperature).ln() - norm2(&d) / (2.0 * self.temperature)
    }
}

/// `rho (2 pi T)^{-3/2} exp(-|v - u|^2 / 2T)`.
pub fn maxwellian(v: Vec3, p: &MaxwellianParams) -> f64 {
    p.ln_density(v).exp()
}

/// Centers of the two Gaussians in [`two_gaussian_ic`].
pub const TWO_GAUSSIAN_CENTERS: [Vec3; 2] = [[0.0, 0.0, 2.0], [0.0, 0.0, -2.0]];

/// Half-and-half mixture of unit-temperature Gaussians centred at
/// `(0, 0, +-2)`.
pub fn two_gaussian_ic(v: Vec3) -> f64 {
    let amplitude = 1.0 / (2.0 * (2.0 * PI).powf(1.5));
    TWO_GAUSSIAN_CENTERS
        .iter()
        .map(|c| {
            let d = [v[0] - c[0], v[1] - c[1], v[2] - c[2]];
            (-norm2(&d) / 2.0).exp()
        })
        .sum::<f64>()
        * amplitude
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{PhysicalField, TorusSpec};
    use proptest::prelude::*;

    fn big_box() -> TorusSpec {
        TorusSpec::from_half_width(12.0, 24, 0.0).unwrap()
    }

    fn integrate<F: Fn(Vec3) -> f64>(f: F) -> f64 {
        PhysicalField::sample(big_box(), 1, f).unwrap().integral()
    }

    #[test]
    fn bkw_relaxes_to_standard_maxwellian() {
        let p = BkwParams::default();
        for v in [[0.0; 3], [1.0, -0.5, 2.0], [3.0, 0.0, 0.0]] {
            let late = bkw(400.0, v, &p);
            let mu = maxwellian(v, &MaxwellianParams::standard());
            assert!((late - mu).abs() < 1e-14);
        }
    }

    #[test]
    fn bkw_at_time_zero_has_no_constant_term() {
        // 5 K0 - 3 = 0, leaving the |v|^2 term with exponent 2 K0
        let p = BkwParams::default();
        let k0: f64 = 0.6;
        for v in [[0.3, 0.1, -0.7], [1.5, 0.0, 0.2]] {
            let r2 = norm2(&v);
            let printed = 1.0 / (2.0 * (2.0 * PI * k0).powf(1.5)) * (1.0 - k0) / (k0 * k0) * r2
                * (-r2 / (2.0 * k0)).exp();
            assert!((bkw(0.0, v, &p) - printed).abs() < 1e-15);
        }
    }

    #[test]
    fn bkw_conserves_mass() {
        let p = BkwParams::default();
        for t in [0.0, 0.5, 1.0] {
            let mass = integrate(|v| bkw(t, v, &p));
            assert!((mass - 1.0).abs() < 1e-8, "t={t}: {mass}");
            let energy = integrate(|v| norm2(&v) * bkw(t, v, &p));
            assert!((energy - 3.0).abs() < 1e-7);
        }
    }

    #[test]
    fn time_derivative_matches_central_difference() {
        let p = BkwParams::default();
        let dt = 1e-4;
        for t in [0.0, 0.3, 1.0] {
            for v in [[0.0; 3], [0.5, 0.5, 0.5], [2.0, -1.0, 0.0]] {
                let fd = (bkw(t + dt, v, &p) - bkw(t - dt, v, &p)) / (2.0 * dt);
                let exact = bkw_time_derivative(t, v, &p);
                assert!((fd - exact).abs() < 1e-9, "{fd} {exact}");
            }
        }
    }

    #[test]
    fn maxwellian_examples() {
        let mu = MaxwellianParams::standard();
        assert!((maxwellian([0.0; 3], &mu) - 0.063_493_635_9).abs() < 1e-10);
        let p = MaxwellianParams::new(1.7, [0.5, -0.2, 1.0], 1.3).unwrap();
        let v = [0.1, 0.9, -0.4];
        let mirrored = [1.0 - v[0], -0.4 - v[1], 2.0 - v[2]];
        assert!((maxwellian(v, &p) - maxwellian(mirrored, &p)).abs() < 1e-15);
        assert!(MaxwellianParams::new(0.0, [0.0; 3], 1.0).is_err());
        assert!(MaxwellianParams::new(1.0, [0.0; 3], -1.0).is_err());
    }

    #[test]
    fn maxwellian_moments() {
        let p = MaxwellianParams::new(1.7, [0.5, -0.2, 1.0], 1.3).unwrap();
        let mass = integrate(|v| maxwellian(v, &p));
        assert!((mass - 1.7).abs() < 1e-8);
        for axis in 0..3 {
            let mean = integrate(|v| v[axis] * maxwellian(v, &p)) / mass;
            assert!((mean - p.u()[axis]).abs() < 1e-8);
        }
        let u = p.u();
        let var = integrate(|v| {
            let d = [v[0] - u[0], v[1] - u[1], v[2] - u[2]];
            norm2(&d) * maxwellian(v, &p)
        }) / (3.0 * mass);
        assert!((var - 1.3).abs() < 1e-8);
    }

    #[test]
    fn two_gaussian_examples() {
        let expect = (-2.0f64).exp() * (2.0 * PI).powf(-1.5);
        assert!((two_gaussian_ic([0.0; 3]) - expect).abs() < 1e-15);
        assert!((two_gaussian_ic([0.0; 3]) - 0.008_592).abs() < 1e-6);
        let mass = integrate(two_gaussian_ic);
        let energy = integrate(|v| norm2(&v) * two_gaussian_ic(v));
        assert!((mass - 1.0).abs() < 1e-8);
        assert!((energy - 7.0).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn two_gaussian_is_even_in_v3(x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0) {
            prop_assert_eq!(two_gaussian_ic([x, y, z]), two_gaussian_ic([x, y, -z]));
        }

        #[test]
        fn bkw_is_nonnegative(t in 0.0f64..50.0, x in -8.0f64..8.0, y in -8.0f64..8.0, z in -8.0f64..8.0) {
            let p = BkwParams::default();
            prop_assert!(bkw(t, [x, y, z], &p) >= 0.0);
            let k = p.shape(t);
            prop_assert!(k >= 0.6 && k < 1.0);
            prop_assert!(5.0 * k - 3.0 >= -1e-15);
        }
    }
}
