//! Classical fourth-order Runge–Kutta step.

use crate::{Error, Result, SpectralField};

/// State that can be advanced by [`rk4_step`].
pub trait OdeState: Clone {
    /// `self += alpha * other`.
    fn axpy(&mut self, alpha: f64, other: &Self);
    fn is_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn axpy(&mut self, alpha: f64, other: &Self) {
        *self += alpha * other;
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl OdeState for SpectralField {
    fn axpy(&mut self, alpha: f64, other: &Self) {
        SpectralField::axpy(self, alpha, other);
    }

    fn is_finite(&self) -> bool {
        SpectralField::is_finite(self)
    }
}

/// `y + dt/6 (k1 + 2 k2 + 2 k3 + k4)`. Fails on a nonpositive step and when
/// the result is not finite.
pub fn rk4_step<S, F>(y: &S, dt: f64, mut rhs: F) -> Result<S>
where
    S: OdeState,
    F: FnMut(&S) -> Result<S>,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidTimeStep(dt));
    }
    let stage = |k: &S, scale: f64| {
        let mut s = y.clone();
        s.axpy(scale, k);
        s
    };
    let k1 = rhs(y)?;
    let k2 = rhs(&stage(&k1, 0.5 * dt))?;
    let k3 = rhs(&stage(&k2, 0.5 * dt))?;
    let k4 = rhs(&stage(&k3, dt))?;
    let mut next = y.clone();
    next.axpy(dt / 6.0, &k1);
    next.axpy(dt / 3.0, &k2);
    next.axpy(dt / 3.0, &k3);
    next.axpy(dt / 6.0, &k4);
    if !next.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TorusSpec;
    use num_complex::Complex64;

    #[test]
    fn zero_rhs_leaves_state() {
        let spec = TorusSpec::new(1.0, 2, 0.0).unwrap();
        let mut f = SpectralField::zeros(spec);
        f[[1, 0, -1]] = Complex64::new(0.3, 0.2);
        let next = rk4_step(&f, 0.1, |s: &SpectralField| Ok(SpectralField::zeros(*s.spec()))).unwrap();
        assert_eq!(next, f);
    }

    #[test]
    fn linear_rhs_gives_taylor_polynomial() {
        let lambda = -0.7;
        let dt = 0.3;
        let z = lambda * dt;
        let taylor = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
        let y = rk4_step(&1.0, dt, |y: &f64| Ok(lambda * y)).unwrap();
        assert!((y - taylor).abs() < 1e-15);
    }

    #[test]
    fn exponential_global_error() {
        // y_n = R(dt)^n with R the degree-4 Taylor polynomial of exp
        let dt: f64 = 0.1;
        let r = 1.0 + dt + dt * dt / 2.0 + dt.powi(3) / 6.0 + dt.powi(4) / 24.0;
        let mut y = 1.0;
        for _ in 0..10 {
            y = rk4_step(&y, dt, |y: &f64| Ok(*y)).unwrap();
        }
        assert!((y - r.powi(10)).abs() < 1e-14);
        let err = (y - core::f64::consts::E).abs();
        // leading term e * dt^4 / 120
        let predicted = core::f64::consts::E * dt.powi(4) / 120.0;
        assert!((err - predicted).abs() < 0.1 * predicted, "{err:e}");
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |steps: u32| {
            let dt = 1.0 / steps as f64;
            let mut y = 1.0;
            for _ in 0..steps {
                y = rk4_step(&y, dt, |y: &f64| Ok(-2.0 * y)).unwrap();
            }
            (y - (-2.0f64).exp()).abs()
        };
        let order = (err(20) / err(40)).log2();
        assert!((order - 4.0).abs() < 0.15, "{order}");
    }

    #[test]
    fn rejects_bad_steps_and_blow_up() {
        assert_eq!(rk4_step(&1.0, 0.0, |y: &f64| Ok(*y)), Err(Error::InvalidTimeStep(0.0)));
        assert_eq!(rk4_step(&1.0, -0.1, |y: &f64| Ok(*y)), Err(Error::InvalidTimeStep(-0.1)));
        assert_eq!(rk4_step(&1.0, 0.1, |_: &f64| Ok(f64::NAN)), Err(Error::NonFinite));
    }
}
