//! Mode-truncation profiles, the velocity cut-off `psi^R` and the periodic
//! polynomial weights `m_k`.

#[cfg(not(feature = "std"))]

use num_traits::Float;

use crate::torus::{forward, inverse};
use crate::{norm, Result, SpectralField, TorusSpec, Vec3};

/// Multiplier applied to coefficient `k` as a function of `k / N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BumpProfile {
    /// Smooth bump `Phi`: 1 on the sup-norm ball of radius 0.9, 0 outside
    /// radius 1, cubic smoothstep in between.
    Full,
    /// `sqrt(Phi)`, so that two applications equal one of `Full`.
    Sqrt,
    /// Indicator of `[-1, 1]^3`: plain truncation.
    Sharp,
}

impl BumpProfile {
    pub fn eval(self, x: Vec3) -> f64 {
        let s = x[0].abs().max(x[1].abs()).max(x[2].abs());
        if s > 1.0 {
            return 0.0;
        }
        if self == BumpProfile::Sharp || s < 0.9 {
            return 1.0;
        }
        // 1 - 3t^2 + 2t^3 = (1 - t)^2 (1 + 2t)
        if s >= 1.0 {
            return 0.0;
        }
        let t = (10.0 * (s - 0.9)).clamp(0.0, 1.0);
        match self {
            BumpProfile::Full => (1.0 - t) * (1.0 - t) * (1.0 + 2.0 * t),
            BumpProfile::Sqrt => (1.0 - t) * (1.0 + 2.0 * t).sqrt(),
            BumpProfile::Sharp => unreachable!(),
        }
    }
}

/// Cubic smoothstep `Phi(x)` with the sup-norm argument.
pub fn bump_phi(x: Vec3) -> f64 {
    BumpProfile::Full.eval(x)
}

/// Multiplies every coefficient by `profile(k / N)`.
pub fn apply_projection(f: &SpectralField, profile: BumpProfile) -> SpectralField {
    let spec = *f.spec();
    let n = spec.n() as f64;
    let mut out = f.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k = spec.mode_at(idx);
        let w = profile.eval([k[0] as f64 / n, k[1] as f64 / n, k[2] as f64 / n]);
        *c *= w;
    }
    out
}

/// Radial ramp: 1 inside `0.9 radius`, `10 (1 - |v|/radius)` on the shell,
/// 0 outside `radius`.
pub fn ramp(r: f64, radius: f64) -> f64 {
    if r > radius {
        0.0
    } else if r < 0.9 * radius {
        1.0
    } else {
        10.0 * (1.0 - r / radius)
    }
}

/// Velocity cut-off `psi^R(v)`.
pub fn psi_r(v: Vec3, spec: &TorusSpec) -> f64 {
    ramp(norm(&v), spec.radius())
}

/// Product with `psi^R` (or its square) by collocation on the
/// `oversample`-refined grid, truncated back to the index cube. No
/// projection profile is applied.
pub fn multiply_psi(f: &SpectralField, squared: bool, oversample: usize) -> Result<SpectralField> {
    let spec = *f.spec();
    let mut phys = inverse(f, oversample)?;
    phys.multiply_by(|v| {
        let p = psi_r(v, &spec);
        if squared {
            p * p
        } else {
            p
        }
    });
    forward(&phys)
}

/// Periodic polynomial weight of order `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub order: u32,
    pub spec: TorusSpec,
}

impl WeightSpec {
    pub fn new(order: u32, spec: TorusSpec) -> Self {
        Self { order, spec }
    }
}

/// `m_k(v)`: `<v>^k` inside the truncation ball, blended towards `(R+1)^k`
/// through `psi^{2R}` on `R < |v| < 2R`, constant beyond.
pub fn weight_mk(v: Vec3, w: &WeightSpec) -> f64 {
    let r = norm(&v);
    let radius = w.spec.radius();
    let k = w.order as i32;
    if r <= radius {
        (1.0 + r * r).sqrt().powi(k)
    } else if r < 2.0 * radius {
        let psi = ramp(r, 2.0 * radius);
        (psi * radius + (1.0 - psi) * (radius + 1.0)).powi(k)
    } else {
        (radius + 1.0).powi(k)
    }
}
