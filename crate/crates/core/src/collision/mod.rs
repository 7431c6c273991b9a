//! Periodized collision operator in Fourier space and the truncated scheme
//! operator built on it.

mod gain;
pub mod kernel;
pub mod quadrature;

pub use gain::{gain_direct, gain_fast, gain_fast_with, loss_fft, Reduction};
pub use kernel::{beta_from_norms, kernel_key, KernelKey, KernelMethod, KernelTable};
pub use quadrature::{GainQuadrature, SpherePoint};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::smoothing::{apply_projection, multiply_psi, BumpProfile};
use crate::{Result, SpectralField, TorusSpec};

/// Evaluation strategy for the gain term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GainMethod {
    Direct,
    Fast,
}

impl GainMethod {
    /// Cheaper of the two for this geometry under a simple operation count:
    /// the direct sum touches about `0.42 (2N)^6` pairs, the fast path runs
    /// `2 S` forward transforms of side `4N` per radial node (`S` halved when
    /// both arguments coincide).
    pub fn auto(spec: &TorusSpec, quad: &GainQuadrature) -> Self {
        let side = spec.side() as f64;
        let direct = 0.42 * side.powi(6);
        let m = 2.0 * side;
        let transform = m * m * m * m.log2() * 2.5;
        let fast = quad.radial().len() as f64 * quad.sphere().len() as f64 * transform;
        if fast < direct {
            GainMethod::Fast
        } else {
            GainMethod::Direct
        }
    }
}

/// `Q_p(g, h) = Q+ - Q-` in Fourier space.
pub fn qp(
    g: &SpectralField,
    h: &SpectralField,
    method: GainMethod,
    table: &KernelTable,
    quad: &GainQuadrature,
) -> Result<SpectralField> {
    let gain = match method {
        GainMethod::Direct => gain_direct(g, h, table)?,
        GainMethod::Fast => gain_fast(g, h, quad, table)?,
    };
    Ok(gain - &loss_fft(g, h, table)?)
}

/// Everything needed to evaluate the scheme operator for one geometry.
#[derive(Debug, Clone)]
pub struct CollisionOperator {
    table: KernelTable,
    quadrature: GainQuadrature,
    method: GainMethod,
    oversample: usize,
    reduction: Reduction,
}

impl CollisionOperator {
    /// Prepares the kernel table for the spec. The quadrature is validated
    /// only when the fast path is selected.
    pub fn new(
        spec: TorusSpec,
        method: GainMethod,
        quadrature: GainQuadrature,
        oversample: usize,
    ) -> Result<Self> {
        Self::with_table(KernelTable::prepared(spec), method, quadrature, oversample)
    }

    pub fn with_table(
        mut table: KernelTable,
        method: GainMethod,
        quadrature: GainQuadrature,
        oversample: usize,
    ) -> Result<Self> {
        if oversample == 0 {
            return Err(crate::Error::InvalidOversample(0));
        }
        if method == GainMethod::Fast {
            quadrature.check_for(table.spec().n())?;
        }
        if !table.is_prepared() {
            table.prepare();
        }
        Ok(Self {
            table,
            quadrature,
            method,
            oversample,
            reduction: Reduction::Ordered,
        })
    }

    pub fn with_reduction(mut self, reduction: Reduction) -> Self {
        self.reduction = reduction;
        self
    }

    pub fn spec(&self) -> &TorusSpec {
        self.table.spec()
    }

    pub fn table(&self) -> &KernelTable {
        &self.table
    }

    pub fn method(&self) -> GainMethod {
        self.method
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn qp(&self, g: &SpectralField, h: &SpectralField) -> Result<SpectralField> {
        let gain = match self.method {
            GainMethod::Direct => gain_direct(g, h, &self.table)?,
            GainMethod::Fast => gain_fast_with(g, h, &self.quadrature, &self.table, self.reduction)?,
        };
        Ok(gain - &loss_fft(g, h, &self.table)?)
    }

    /// `Q_N^R(f, f) = P^{1/2}( P^{1/2}( Q_p(F, F) ) psi^R )` with
    /// `F = P(f psi^R)`, `P` the smoothing projection.
    pub fn q_scheme(&self, f: &SpectralField) -> Result<SpectralField> {
        let truncated = apply_projection(&multiply_psi(f, false, self.oversample)?, BumpProfile::Full);
        let collided = self.qp(&truncated, &truncated)?;
        let inner = apply_projection(&collided, BumpProfile::Sqrt);
        let localized = multiply_psi(&inner, false, self.oversample)?;
        Ok(apply_projection(&localized, BumpProfile::Sqrt))
    }
}
