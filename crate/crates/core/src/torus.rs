//! Geometry of the periodized velocity domain and the transforms between
//! Fourier coefficients and grid samples.
//!
//! Coefficients follow the integral convention
//! `f_hat(k) = int_{[-L,L]^3} f(v) exp(-i pi k.v / L) dv`, so synthesis
//! carries the factor `(2L)^-3`. The index set is the asymmetric cube
//! `[-N, N-1]^3`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::fft::{fft3, Direction};
use crate::{Error, Result, Vec3};

/// Ratio between the torus half-width and the truncation radius.
pub const HALF_WIDTH_OVER_RADIUS: f64 = (3.0 + core::f64::consts::SQRT_2) / 2.0;

/// Truncated torus `[-L, L)^3` with `L = (3 + sqrt 2)/2 R` and `2N` Fourier
/// modes per direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusSpec {
    radius: f64,
    half_width: f64,
    lambda: f64,
    n: usize,
    gamma: f64,
}

impl TorusSpec {
    /// Builds the geometry from the velocity truncation radius `R`.
    pub fn new(radius: f64, n: usize, gamma: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidSpec("nonpositive radius"));
        }
        if n < 2 {
            return Err(Error::InvalidSpec("N must be at least 2"));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidSpec("gamma outside [0, 1]"));
        }
        Ok(Self {
            radius,
            half_width: HALF_WIDTH_OVER_RADIUS * radius,
            lambda: 1.0 / HALF_WIDTH_OVER_RADIUS,
            n,
            gamma,
        })
    }

    /// Builds the geometry from the torus half-width `L`.
    pub fn from_half_width(half_width: f64, n: usize, gamma: f64) -> Result<Self> {
        let mut spec = Self::new(half_width / HALF_WIDTH_OVER_RADIUS, n, gamma)?;
        spec.half_width = half_width;
        Ok(spec)
    }

    /// Truncation radius `R`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Half side `L` of the torus.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// `R / L`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Half-mode count `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same geometry with a different mode count.
    pub fn with_modes(&self, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec("N must be at least 2"));
        }
        Ok(Self { n, ..*self })
    }

    /// Volume `(2L)^3` of the torus.
    pub fn volume(&self) -> f64 {
        let side = 2.0 * self.half_width;
        side * side * side
    }

    /// Modes per direction, `2N`.
    pub fn side(&self) -> usize {
        2 * self.n
    }

    /// Number of coefficients, `(2N)^3`.
    pub fn mode_count(&self) -> usize {
        let s = self.side();
        s * s * s
    }

    /// Flat index of mode `k`, or `None` when `k` lies outside `[-N, N-1]^3`.
    pub fn mode_index(&self, k: [i64; 3]) -> Option<usize> {
        let n = self.n as i64;
        let side = 2 * n;
        let mut idx = 0i64;
        for c in k {
            if c < -n || c >= n {
                return None;
            }
            idx = idx * side + (c + n);
        }
        Some(idx as usize)
    }

    /// Mode `k` stored at flat index `idx`.
    pub fn mode_at(&self, idx: usize) -> [i64; 3] {
        let side = self.side();
        let n = self.n as i64;
        [
            (idx / (side * side)) as i64 - n,
            ((idx / side) % side) as i64 - n,
            (idx % side) as i64 - n,
        ]
    }

    /// Iterator over every mode of the index cube, in storage order.
    pub fn modes(&self) -> impl Iterator<Item = [i64; 3]> + '_ {
        (0..self.mode_count()).map(move |idx| self.mode_at(idx))
    }
}

/// Fourier coefficients on `[-N, N-1]^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    spec: TorusSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(spec: TorusSpec) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); spec.mode_count()],
            spec,
        }
    }

    pub fn from_coeffs(spec: TorusSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != spec.mode_count() {
            return Err(Error::SpecMismatch);
        }
        Ok(Self { spec, coeffs })
    }

    /// Coefficients obtained by sampling `f` on the `p`-refined grid and
    /// transforming; the finer the grid, the closer to the exact integrals.
    pub fn sample<F: FnMut(Vec3) -> f64>(spec: TorusSpec, oversample: usize, f: F) -> Result<Self> {
        forward(&PhysicalField::sample(spec, oversample, f)?)
    }

    pub fn spec(&self) -> &TorusSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of mode `k`; zero outside the index cube.
    pub fn get(&self, k: [i64; 3]) -> Complex64 {
        self.spec
            .mode_index(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn ensure_same_spec(&self, other: &Self) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    /// `||f||_{L^2}` through Parseval: `((2L)^-3 sum |f_hat|^2)^(1/2)`.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (sum / self.spec.volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scale(mut self, factor: f64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= factor);
        self
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        debug_assert_eq!(self.spec, other.spec);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * alpha;
        }
    }

    /// Largest violation of `f_hat(-k) = conj f_hat(k)` over modes whose
    /// partner is present, relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for (idx, c) in self.coeffs.iter().enumerate() {
            let k = self.spec.mode_at(idx);
            if let Some(j) = self.spec.mode_index([-k[0], -k[1], -k[2]]) {
                worst = worst.max((self.coeffs[j] - c.conj()).norm());
            }
        }
        worst / scale
    }
}

impl Index<[i64; 3]> for SpectralField {
    type Output = Complex64;
    fn index(&self, k: [i64; 3]) -> &Complex64 {
        let idx = self.spec.mode_index(k).expect("mode outside index cube");
        &self.coeffs[idx]
    }
}

impl IndexMut<[i64; 3]> for SpectralField {
    fn index_mut(&mut self, k: [i64; 3]) -> &mut Complex64 {
        let idx = self.spec.mode_index(k).expect("mode outside index cube");
        &mut self.coeffs[idx]
    }
}

impl Add<&SpectralField> for SpectralField {
    type Output = SpectralField;
    fn add(mut self, rhs: &SpectralField) -> SpectralField {
        self.axpy(1.0, rhs);
        self
    }
}

impl Sub<&SpectralField> for SpectralField {
    type Output = SpectralField;
    fn sub(mut self, rhs: &SpectralField) -> SpectralField {
        self.axpy(-1.0, rhs);
        self
    }
}

impl Mul<f64> for SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(rhs)
    }
}

/// Real samples on the uniform grid `v_j = -L + j L/(pN)`, `j in [0, 2pN)^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    spec: TorusSpec,
    oversample: usize,
    samples: Vec<f64>,
}

impl PhysicalField {
    pub fn zeros(spec: TorusSpec, oversample: usize) -> Result<Self> {
        if oversample == 0 {
            return Err(Error::InvalidOversample(oversample));
        }
        let m = 2 * oversample * spec.n();
        Ok(Self {
            spec,
            oversample,
            samples: vec![0.0; m * m * m],
        })
    }

    pub fn from_samples(spec: TorusSpec, oversample: usize, samples: Vec<f64>) -> Result<Self> {
        let field = Self::zeros(spec, oversample)?;
        if samples.len() != field.samples.len() {
            return Err(Error::SpecMismatch);
        }
        Ok(Self { samples, ..field })
    }

    /// Evaluates `f` at every grid node.
    pub fn sample<F: FnMut(Vec3) -> f64>(spec: TorusSpec, oversample: usize, mut f: F) -> Result<Self> {
        let mut field = Self::zeros(spec, oversample)?;
        let m = field.grid_size();
        for idx in 0..m * m * m {
            let v = field.node(idx);
            field.samples[idx] = f(v);
        }
        Ok(field)
    }

    pub fn spec(&self) -> &TorusSpec {
        &self.spec
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    /// Nodes per direction, `2pN`.
    pub fn grid_size(&self) -> usize {
        2 * self.oversample * self.spec.n()
    }

    /// Grid spacing `h = L/(pN)`.
    pub fn spacing(&self) -> f64 {
        self.spec.half_width() / (self.oversample * self.spec.n()) as f64
    }

    /// Volume `h^3` of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        let h = self.spacing();
        h * h * h
    }

    /// Coordinate of the `j`-th node along one axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        -self.spec.half_width() + j as f64 * self.spacing()
    }

    /// Velocity at flat index `idx`.
    pub fn node(&self, idx: usize) -> Vec3 {
        let m = self.grid_size();
        [
            self.coordinate(idx / (m * m)),
            self.coordinate((idx / m) % m),
            self.coordinate(idx % m),
        ]
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    /// `h^3 sum_j f(v_j)`.
    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.cell_volume()
    }

    /// Pointwise product with a function of velocity.
    pub fn multiply_by<F: Fn(Vec3) -> f64>(&mut self, f: F) {
        for idx in 0..self.samples.len() {
            let v = self.node(idx);
            self.samples[idx] *= f(v);
        }
    }
}

/// Relative tolerance for the imaginary part discarded by [`inverse`].
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-10;

fn parity_sign(k: [i64; 3]) -> f64 {
    if (k[0] + k[1] + k[2]).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Grid samples to Fourier coefficients: `f_hat(k) = h^3 sum_j f(v_j)
/// exp(-i pi k.v_j / L)` for `k` in the index cube. Modes the grid resolves
/// beyond the cube are discarded.
pub fn forward(field: &PhysicalField) -> Result<SpectralField> {
    let m = field.grid_size();
    let mut data: Vec<Complex64> = field
        .samples
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    fft3(&mut data, m, Direction::Forward);
    let spec = field.spec;
    let h3 = field.cell_volume();
    let mut out = SpectralField::zeros(spec);
    let wrap = |c: i64| c.rem_euclid(m as i64) as usize;
    for (idx, slot) in out.coeffs.iter_mut().enumerate() {
        let k = spec.mode_at(idx);
        let src = (wrap(k[0]) * m + wrap(k[1])) * m + wrap(k[2]);
        *slot = data[src] * (h3 * parity_sign(k));
    }
    Ok(out)
}

/// Fourier coefficients to samples on the `p`-refined grid (zero padding in
/// the spectrum when `p > 1`).
///
/// On a refined grid the unmatched mode `-N` has no conjugate partner and its
/// synthesis is complex between coarse nodes; such components are split
/// evenly between `-N` and `+N`, which equals the real part of the asymmetric
/// synthesis. The remaining imaginary residue must stay below
/// [`IMAGINARY_RESIDUE_TOL`] relative to the field, otherwise the input was
/// not Hermitian.
pub fn inverse(field: &SpectralField, oversample: usize) -> Result<PhysicalField> {
    let data = synthesize(field, oversample)?;
    let (mut max_re, mut max_im) = (0.0f64, 0.0f64);
    for c in &data {
        max_re = max_re.max(c.re.abs());
        max_im = max_im.max(c.im.abs());
    }
    if max_im > 0.0 {
        let ratio = max_im / max_re.max(f64::MIN_POSITIVE);
        if ratio > IMAGINARY_RESIDUE_TOL {
            return Err(Error::ImaginaryResidue { ratio });
        }
    }
    PhysicalField::from_samples(
        field.spec,
        oversample,
        data.into_iter().map(|c| c.re).collect(),
    )
}

/// Complex synthesis on the `p`-refined grid without the Hermitian check.
pub(crate) fn synthesize(field: &SpectralField, oversample: usize) -> Result<Vec<Complex64>> {
    if oversample == 0 {
        return Err(Error::InvalidOversample(oversample));
    }
    let spec = field.spec;
    let n = spec.n() as i64;
    let m = 2 * oversample * spec.n();
    let mi = m as i64;
    let mut data = vec![Complex64::new(0.0, 0.0); m * m * m];
    let inv_vol = 1.0 / spec.volume();
    for (idx, c) in field.coeffs.iter().enumerate() {
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let k = spec.mode_at(idx);
        let base = *c * (inv_vol * parity_sign(k));
        // each axis contributes one or two (position, weight) targets
        let targets = |c: i64| -> ([(usize, f64); 2], usize) {
            if c == -n && oversample > 1 {
                ([((mi - n) as usize, 0.5), (n as usize, 0.5)], 2)
            } else {
                ([(c.rem_euclid(mi) as usize, 1.0), (0, 0.0)], 1)
            }
        };
        let (t0, c0) = targets(k[0]);
        let (t1, c1) = targets(k[1]);
        let (t2, c2) = targets(k[2]);
        for &(p0, w0) in &t0[..c0] {
            for &(p1, w1) in &t1[..c1] {
                for &(p2, w2) in &t2[..c2] {
                    data[(p0 * m + p1) * m + p2] += base * (w0 * w1 * w2);
                }
            }
        }
    }
    fft3(&mut data, m, Direction::Inverse);
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_real(spec: TorusSpec, p: usize, seed: u64) -> PhysicalField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut field = PhysicalField::zeros(spec, p).unwrap();
        field
            .samples_mut()
            .iter_mut()
            .for_each(|x| *x = rng.gen_range(-1.0..1.0));
        field
    }

    #[test]
    fn make_spec_examples() {
        let spec = TorusSpec::new(2.0, 8, 0.0).unwrap();
        assert!((spec.half_width() - 4.414_213_562_4).abs() < 1e-10);
        assert!((spec.lambda() - 0.453_081_839_4).abs() < 1e-10);
        assert!((spec.lambda() * spec.half_width() - spec.radius()).abs() < 1e-15);
        let spec = TorusSpec::new(1.0, 2, 1.0).unwrap();
        assert!((spec.half_width() - 2.207_106_781_2).abs() < 1e-10);
    }

    #[test]
    fn make_spec_rejects_bad_input() {
        assert_eq!(
            TorusSpec::new(0.0, 8, 0.0),
            Err(Error::InvalidSpec("nonpositive radius"))
        );
        assert!(TorusSpec::new(-1.0, 8, 0.0).is_err());
        assert!(TorusSpec::new(1.0, 1, 0.0).is_err());
        assert!(TorusSpec::new(1.0, 4, 1.5).is_err());
        assert!(TorusSpec::new(1.0, 4, -0.1).is_err());
    }

    #[test]
    fn half_width_constructor_keeps_exact_l() {
        let spec = TorusSpec::from_half_width(12.0, 8, 0.0).unwrap();
        assert_eq!(spec.half_width(), 12.0);
        assert!((spec.radius() * HALF_WIDTH_OVER_RADIUS - 12.0).abs() < 1e-13);
    }

    #[test]
    fn mode_index_roundtrip() {
        let spec = TorusSpec::new(1.0, 3, 0.0).unwrap();
        for idx in 0..spec.mode_count() {
            assert_eq!(spec.mode_index(spec.mode_at(idx)), Some(idx));
        }
        assert_eq!(spec.mode_index([3, 0, 0]), None);
        assert_eq!(spec.mode_index([-4, 0, 0]), None);
        assert!(spec.mode_index([-3, -3, -3]).is_some());
    }

    #[test]
    fn constant_field_has_only_mean_mode() {
        let spec = TorusSpec::new(1.5, 4, 0.0).unwrap();
        let c = 0.7;
        let s = SpectralField::sample(spec, 1, |_| c).unwrap();
        for k in spec.modes() {
            let expect = if k == [0, 0, 0] { c * spec.volume() } else { 0.0 };
            assert!((s[k] - Complex64::new(expect, 0.0)).norm() < 1e-12 * spec.volume());
        }
    }

    #[test]
    fn cosine_hits_two_modes() {
        let spec = TorusSpec::new(1.0, 4, 0.0).unwrap();
        let l = spec.half_width();
        let s = SpectralField::sample(spec, 1, |v| (PI * v[0] / l).cos()).unwrap();
        let half = spec.volume() / 2.0;
        for k in spec.modes() {
            let expect = if k == [1, 0, 0] || k == [-1, 0, 0] { half } else { 0.0 };
            assert!((s[k] - Complex64::new(expect, 0.0)).norm() < 1e-12 * half, "{k:?}");
        }
    }

    #[test]
    fn roundtrip_random_real_field() {
        let spec = TorusSpec::new(2.0, 4, 0.0).unwrap();
        let f = random_real(spec, 1, 3);
        let back = inverse(&forward(&f).unwrap(), 1).unwrap();
        for (a, b) in f.samples().iter().zip(back.samples()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn spectral_roundtrip_p1() {
        let spec = TorusSpec::new(2.0, 4, 0.0).unwrap();
        let s = forward(&random_real(spec, 1, 11)).unwrap();
        let again = forward(&inverse(&s, 1).unwrap()).unwrap();
        let scale = s.max_abs();
        for (a, b) in s.coeffs().iter().zip(again.coeffs()) {
            assert!((a - b).norm() <= 1e-13 * scale);
        }
    }

    #[test]
    fn zero_and_unit_mean() {
        let spec = TorusSpec::new(1.0, 3, 0.0).unwrap();
        let zero = inverse(&SpectralField::zeros(spec), 2).unwrap();
        assert!(zero.samples().iter().all(|&x| x == 0.0));
        let mut s = SpectralField::zeros(spec);
        s[[0, 0, 0]] = Complex64::new(spec.volume(), 0.0);
        for p in [1, 2, 3] {
            let f = inverse(&s, p).unwrap();
            assert!(f.samples().iter().all(|&x| (x - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn parseval_on_grid() {
        let spec = TorusSpec::new(1.7, 5, 0.0).unwrap();
        let f = random_real(spec, 1, 5);
        let s = forward(&f).unwrap();
        let spectral = s.l2_norm().powi(2);
        let grid: f64 = f.samples().iter().map(|x| x * x).sum::<f64>() * f.cell_volume();
        assert!((spectral - grid).abs() <= 1e-12 * grid);
    }

    #[test]
    fn real_input_gives_hermitian_coefficients() {
        let spec = TorusSpec::new(1.0, 4, 0.0).unwrap();
        let s = forward(&random_real(spec, 1, 8)).unwrap();
        assert!(s.hermitian_defect() < 1e-12);
    }

    #[test]
    fn refined_inverse_handles_unmatched_modes() {
        let spec = TorusSpec::new(1.0, 4, 0.0).unwrap();
        let s = forward(&random_real(spec, 1, 21)).unwrap();
        let fine = inverse(&s, 2).unwrap();
        // refined samples on coarse nodes reproduce the coarse field up to
        // the Nyquist split, which only touches the -N planes
        let mut no_nyquist = s.clone();
        for (idx, c) in no_nyquist.coeffs_mut().iter_mut().enumerate() {
            if spec.mode_at(idx).iter().any(|&k| k == -(spec.n() as i64)) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        let coarse = inverse(&no_nyquist, 1).unwrap();
        let fine_nn = inverse(&no_nyquist, 2).unwrap();
        let m = coarse.grid_size();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let a = coarse.samples()[(i * m + j) * m + k];
                    let b = fine_nn.samples()[((2 * i) * 2 * m + 2 * j) * 2 * m + 2 * k];
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
        assert!(fine.samples().iter().all(|x| x.is_finite()));
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let spec = TorusSpec::new(1.0, 3, 0.0).unwrap();
        let mut s = SpectralField::zeros(spec);
        s[[1, 0, 0]] = Complex64::new(1.0, 0.0);
        assert!(matches!(inverse(&s, 1), Err(Error::ImaginaryResidue { .. })));
    }
}
