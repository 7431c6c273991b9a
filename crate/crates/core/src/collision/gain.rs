//! Gain and loss coefficients of the periodized collision operator.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::kernel::{norm2, prefactor, sinc, KernelTable};
use super::quadrature::GainQuadrature;
use crate::fft::{fft3, Direction};
use crate::{Error, Result, SpectralField};

#[cfg(feature = "std")]
use rayon::prelude::*;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn check_specs(g: &SpectralField, h: &SpectralField, table: &KernelTable) -> Result<()> {
    g.ensure_same_spec(h)?;
    if g.spec() != table.spec() {
        return Err(Error::SpecMismatch);
    }
    Ok(())
}

/// `Q+(k) = (2L)^-3 sum_{l+m=k} g(l) h(m) beta(l, m)` by direct summation
/// over the index cube. Cost `O((2N)^6)`.
pub fn gain_direct(g: &SpectralField, h: &SpectralField, table: &KernelTable) -> Result<SpectralField> {
    check_specs(g, h, table)?;
    let spec = *g.spec();
    let n = spec.n() as i64;
    let side = spec.side();
    let inv_vol = 1.0 / spec.volume();
    let gc = g.coeffs();
    let hc = h.coeffs();

    let coefficient = |idx: usize| -> Complex64 {
        let k = spec.mode_at(idx);
        let row = table.gain_row(norm2(k) as usize);
        let lo = |c: i64| (-n).max(c - (n - 1));
        let hi = |c: i64| (n - 1).min(c + n);
        let mut acc = ZERO;
        for l0 in lo(k[0])..=hi(k[0]) {
            let d0 = 2 * l0 - k[0];
            let (gl0, hm0) = ((l0 + n) as usize * side, (k[0] - l0 + n) as usize * side);
            for l1 in lo(k[1])..=hi(k[1]) {
                let d1 = 2 * l1 - k[1];
                let partial = (d0 * d0 + d1 * d1) as usize;
                let gl1 = (gl0 + (l1 + n) as usize) * side;
                let hm1 = (hm0 + (k[1] - l1 + n) as usize) * side;
                for l2 in lo(k[2])..=hi(k[2]) {
                    let gv = gc[gl1 + (l2 + n) as usize];
                    if gv.re == 0.0 && gv.im == 0.0 {
                        continue;
                    }
                    let hv = hc[hm1 + (k[2] - l2 + n) as usize];
                    let d2 = 2 * l2 - k[2];
                    let diff2 = partial + (d2 * d2) as usize;
                    let beta = match row {
                        Some(r) => r[diff2],
                        None => table.lookup([l0, l1, l2], [k[0] - l0, k[1] - l1, k[2] - l2]),
                    };
                    acc += gv * hv * beta;
                }
            }
        }
        acc * inv_vol
    };

    let mut out = SpectralField::zeros(spec);
    #[cfg(feature = "std")]
    out.coeffs_mut()
        .par_iter_mut()
        .enumerate()
        .for_each(|(idx, c)| *c = coefficient(idx));
    #[cfg(not(feature = "std"))]
    out.coeffs_mut()
        .iter_mut()
        .enumerate()
        .for_each(|(idx, c)| *c = coefficient(idx));
    Ok(out)
}

/// Zero-padded linear convolution workspace of side `4N`.
struct Padded {
    n: i64,
    m: usize,
}

impl Padded {
    fn new(n: usize) -> Self {
        Self {
            n: n as i64,
            m: 4 * n,
        }
    }

    fn len(&self) -> usize {
        self.m * self.m * self.m
    }

    fn slot(&self, k: [i64; 3]) -> usize {
        let mi = self.m as i64;
        let w = |c: i64| c.rem_euclid(mi) as usize;
        (w(k[0]) * self.m + w(k[1])) * self.m + w(k[2])
    }

    /// Writes `values[idx] * weight(k)` into the padded buffer.
    fn fill<F: Fn([i64; 3]) -> Complex64>(&self, buf: &mut [Complex64], field: &SpectralField, weight: F) {
        buf.iter_mut().for_each(|c| *c = ZERO);
        let spec = field.spec();
        for (idx, c) in field.coeffs().iter().enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let k = spec.mode_at(idx);
            buf[self.slot(k)] = c * weight(k);
        }
    }

    /// Reads the index cube back out of an inverse-transformed buffer.
    fn extract(&self, buf: &[Complex64], out: &mut [Complex64], scale: f64) {
        let side = (2 * self.n) as usize;
        let n = self.n;
        for (idx, o) in out.iter_mut().enumerate() {
            let k = [
                (idx / (side * side)) as i64 - n,
                ((idx / side) % side) as i64 - n,
                (idx % side) as i64 - n,
            ];
            *o = buf[self.slot(k)] * scale;
        }
    }
}

/// `Q-(k) = (2L)^-3 sum_{l+m=k} g(l) beta(l, l) h(m)`, a linear convolution
/// evaluated with zero-padded transforms of side `4N`.
pub fn loss_fft(g: &SpectralField, h: &SpectralField, table: &KernelTable) -> Result<SpectralField> {
    check_specs(g, h, table)?;
    let spec = *g.spec();
    let pad = Padded::new(spec.n());
    let mut a = vec![ZERO; pad.len()];
    let mut b = vec![ZERO; pad.len()];
    pad.fill(&mut a, g, |l| Complex64::new(table.diagonal(l), 0.0));
    pad.fill(&mut b, h, |_| Complex64::new(1.0, 0.0));
    fft3(&mut a, pad.m, Direction::Forward);
    fft3(&mut b, pad.m, Direction::Forward);
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
    fft3(&mut a, pad.m, Direction::Inverse);
    let mut out = SpectralField::zeros(spec);
    let scale = 1.0 / (pad.len() as f64 * spec.volume());
    pad.extract(&a, out.coeffs_mut(), scale);
    Ok(out)
}

/// How partial sums over radial nodes are combined in [`gain_fast_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Fixed node order; results are bit-reproducible.
    #[default]
    Ordered,
    /// Whatever order the thread pool produces.
    Unordered,
}

/// Separable gain evaluation: the `sinc(pi lambda r |l-m|)` factor is written
/// as a spherical average of plane waves, which turns the double sum into
/// `Q * S` convolutions. Cost `O(Q S N^3 log N)`.
pub fn gain_fast(
    g: &SpectralField,
    h: &SpectralField,
    quad: &GainQuadrature,
    table: &KernelTable,
) -> Result<SpectralField> {
    gain_fast_with(g, h, quad, table, Reduction::Ordered)
}

pub fn gain_fast_with(
    g: &SpectralField,
    h: &SpectralField,
    quad: &GainQuadrature,
    table: &KernelTable,
    reduction: Reduction,
) -> Result<SpectralField> {
    check_specs(g, h, table)?;
    let spec = *g.spec();
    quad.check_for(spec.n())?;
    // A_{-s} * B_{-s} = B_s * A_s when g = h, so half the sphere suffices
    let sphere = if core::ptr::eq(g, h) {
        quad.hemisphere()
    } else {
        quad.sphere().to_vec()
    };
    let pad = Padded::new(spec.n());
    let side = spec.side();
    let n = spec.n() as i64;
    let gamma = spec.gamma();
    let freq = PI * spec.lambda();

    let radial_term = |&(r, w): &(f64, f64)| -> Vec<Complex64> {
        let mut a = vec![ZERO; pad.len()];
        let mut b = vec![ZERO; pad.len()];
        let mut acc = vec![ZERO; pad.len()];
        let mut phase = vec![ZERO; 3 * side];
        for point in &sphere {
            for axis in 0..3 {
                let theta = freq * r * point.sigma[axis];
                for (j, p) in phase[axis * side..(axis + 1) * side].iter_mut().enumerate() {
                    *p = Complex64::from_polar(1.0, theta * (j as i64 - n) as f64);
                }
            }
            let plane_wave = |k: [i64; 3]| {
                phase[(k[0] + n) as usize]
                    * phase[side + (k[1] + n) as usize]
                    * phase[2 * side + (k[2] + n) as usize]
            };
            pad.fill(&mut a, g, plane_wave);
            pad.fill(&mut b, h, |k| plane_wave(k).conj());
            fft3(&mut a, pad.m, Direction::Forward);
            fft3(&mut b, pad.m, Direction::Forward);
            for ((s, x), y) in acc.iter_mut().zip(&a).zip(&b) {
                *s += x * y * point.weight;
            }
        }
        fft3(&mut acc, pad.m, Direction::Inverse);
        let mut term = vec![ZERO; spec.mode_count()];
        pad.extract(&acc, &mut term, 1.0);
        let radial_weight = w * r.powf(2.0 + gamma);
        for (idx, t) in term.iter_mut().enumerate() {
            let k = spec.mode_at(idx);
            let kn = (norm2(k) as f64).sqrt();
            *t *= radial_weight * sinc(freq * r * kn);
        }
        term
    };

    let sum_terms = |mut total: Vec<Complex64>, term: Vec<Complex64>| {
        total.iter_mut().zip(&term).for_each(|(a, b)| *a += b);
        total
    };

    #[cfg(feature = "std")]
    let total = match reduction {
        Reduction::Ordered => {
            let terms: Vec<Vec<Complex64>> = quad.radial().par_iter().map(radial_term).collect();
            terms.into_iter().fold(vec![ZERO; spec.mode_count()], sum_terms)
        }
        Reduction::Unordered => quad
            .radial()
            .par_iter()
            .map(radial_term)
            .reduce(|| vec![ZERO; spec.mode_count()], sum_terms),
    };
    #[cfg(not(feature = "std"))]
    let total = {
        let _ = reduction;
        quad.radial()
            .iter()
            .map(radial_term)
            .fold(vec![ZERO; spec.mode_count()], sum_terms)
    };

    // (2L)^-3 (2R)^{3+gamma} 4 pi, the extra 1/M^3 from the unnormalized
    // inverse transform
    let scale = prefactor(&spec) / (4.0 * PI) / spec.volume() / pad.len() as f64;
    let mut out = SpectralField::from_coeffs(spec, total)?;
    out.coeffs_mut().iter_mut().for_each(|c| *c *= scale);
    Ok(out)
}
