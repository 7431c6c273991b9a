//! Fourier weights `beta(l, m)` of the periodized gain operator.
//!
//! `beta(l, m) = (2R)^{3+gamma} (4 pi)^2 int_0^1 r^{2+gamma}
//! sinc(pi lambda r |l-m|) sinc(pi lambda r |l+m|) dr` depends on the pair
//! only through `|l+m|^2` and `|l-m|^2`, and is symmetric under exchanging
//! the two. Values are memoized on the sorted pair of squared norms.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]

use num_traits::Float;

use super::quadrature::gauss_legendre_on;
use crate::TorusSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelMethod {
    /// Antiderivative formulas, available for `gamma` in `{0, 1}`.
    ClosedForm,
    /// Composite Gauss–Legendre resolving the sinc oscillation.
    Quadrature,
}

/// Canonical memo key: `(min, max)` of `(|l+m|^2, |l-m|^2)`.
pub type KernelKey = (u64, u64);

pub fn kernel_key(l: [i64; 3], m: [i64; 3]) -> KernelKey {
    let sum = norm2([l[0] + m[0], l[1] + m[1], l[2] + m[2]]);
    let diff = norm2([l[0] - m[0], l[1] - m[1], l[2] - m[2]]);
    canonical(sum, diff)
}

fn canonical(a: u64, b: u64) -> KernelKey {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn norm2(k: [i64; 3]) -> u64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as u64
}

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `int_0^1 r cos(w r) dr`.
fn cos_moment(w: f64) -> f64 {
    if w.abs() < 0.5 {
        // sum_n (-1)^n w^{2n} / ((2n)! (2n+2))
        let w2 = w * w;
        let mut term = 1.0;
        let mut sum = 0.5;
        for n in 1..12 {
            let nf = n as f64;
            term *= -w2 / ((2.0 * nf - 1.0) * (2.0 * nf));
            sum += term / (2.0 * nf + 2.0);
        }
        sum
    } else {
        (w.cos() + w * w.sin() - 1.0) / (w * w)
    }
}

/// `int_0^1 r^{2+gamma} sinc(xi r) sinc(eta r) dr` for `gamma` in `{0, 1}`.
fn radial_closed_form(gamma_one: bool, xi: f64, eta: f64) -> f64 {
    let (xi, eta) = if xi <= eta { (xi, eta) } else { (eta, xi) };
    if eta == 0.0 {
        return if gamma_one { 0.25 } else { 1.0 / 3.0 };
    }
    if xi == 0.0 {
        let (s, c) = (eta.sin(), eta.cos());
        return if gamma_one {
            (2.0 * eta * s - (eta * eta - 2.0) * c - 2.0) / eta.powi(4)
        } else {
            (s - eta * c) / eta.powi(3)
        };
    }
    if gamma_one {
        (cos_moment(eta - xi) - cos_moment(xi + eta)) / (2.0 * xi * eta)
    } else {
        (sinc(eta - xi) - sinc(xi + eta)) / (2.0 * xi * eta)
    }
}

/// Same integral by composite Gauss–Legendre, any `gamma`.
fn radial_quadrature(gamma: f64, xi: f64, eta: f64) -> f64 {
    const NODES: usize = 16;
    // at least four panels per period of the fastest factor of the product
    let panels = ((4.0 * (xi + eta) / (2.0 * PI)).ceil() as usize).max(2);
    let base = gauss_legendre_on(NODES, 0.0, 1.0);
    let width = 1.0 / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = p as f64 * width;
        let mut panel = 0.0;
        for &(x, w) in &base {
            let r = a + width * x;
            panel += w * r.powf(2.0 + gamma) * sinc(xi * r) * sinc(eta * r);
        }
        total += panel * width;
    }
    total
}

/// Uncached evaluation of `beta` from the squared norms `|l+m|^2`, `|l-m|^2`.
pub fn beta_from_norms(spec: &TorusSpec, method: KernelMethod, sum2: u64, diff2: u64) -> f64 {
    let (a, b) = canonical(sum2, diff2);
    let scale = PI * spec.lambda();
    let (xi, eta) = (scale * (a as f64).sqrt(), scale * (b as f64).sqrt());
    let gamma = spec.gamma();
    let radial = match method {
        KernelMethod::ClosedForm if gamma == 0.0 => radial_closed_form(false, xi, eta),
        KernelMethod::ClosedForm if gamma == 1.0 => radial_closed_form(true, xi, eta),
        _ => radial_quadrature(gamma, xi, eta),
    };
    prefactor(spec) * radial
}

/// `(2R)^{3+gamma} (4 pi)^2`.
pub fn prefactor(spec: &TorusSpec) -> f64 {
    (2.0 * spec.radius()).powf(3.0 + spec.gamma()) * (4.0 * PI) * (4.0 * PI)
}

/// Dense cache covering every pair that occurs in the gain sum on the index
/// cube, plus the diagonal `beta(l, l)` used by the loss term.
#[derive(Debug, Clone)]
struct DenseTable {
    /// Rows indexed by `|k|^2 <= 3N^2`, columns by `|l-m|^2 <= 3(2N-1)^2`.
    cols: usize,
    values: Vec<f64>,
    /// `beta(l, l)` indexed by `|l|^2`.
    diagonal: Vec<f64>,
}

/// Memoized `beta` values for one torus geometry.
#[derive(Debug, Clone)]
pub struct KernelTable {
    spec: TorusSpec,
    method: KernelMethod,
    memo: BTreeMap<KernelKey, f64>,
    dense: Option<DenseTable>,
}

impl KernelTable {
    /// Closed form when `gamma` is 0 or 1, quadrature otherwise.
    pub fn new(spec: TorusSpec) -> Self {
        let method = if spec.gamma() == 0.0 || spec.gamma() == 1.0 {
            KernelMethod::ClosedForm
        } else {
            KernelMethod::Quadrature
        };
        Self::with_method(spec, method)
    }

    pub fn with_method(spec: TorusSpec, method: KernelMethod) -> Self {
        Self {
            spec,
            method,
            memo: BTreeMap::new(),
            dense: None,
        }
    }

    /// Table with every value the collision sums on the index cube need,
    /// ready for concurrent read-only use.
    pub fn prepared(spec: TorusSpec) -> Self {
        let mut table = Self::new(spec);
        table.prepare();
        table
    }

    pub fn spec(&self) -> &TorusSpec {
        &self.spec
    }

    pub fn method(&self) -> KernelMethod {
        self.method
    }

    pub fn is_prepared(&self) -> bool {
        self.dense.is_some()
    }

    /// Memoized `beta(l, m)`.
    pub fn beta(&mut self, l: [i64; 3], m: [i64; 3]) -> f64 {
        let key = kernel_key(l, m);
        if let Some(v) = self.cached(key) {
            return v;
        }
        let v = self.compute(key);
        self.memo.insert(key, v);
        v
    }

    /// Read-only `beta(l, m)`: served from the cache when present, computed
    /// otherwise.
    pub fn lookup(&self, l: [i64; 3], m: [i64; 3]) -> f64 {
        let key = kernel_key(l, m);
        self.cached(key).unwrap_or_else(|| self.compute(key))
    }

    /// `beta(l, l)`, the loss weight.
    pub fn diagonal(&self, l: [i64; 3]) -> f64 {
        let n2 = norm2(l) as usize;
        if let Some(d) = &self.dense {
            if let Some(&v) = d.diagonal.get(n2) {
                return v;
            }
        }
        self.lookup(l, l)
    }

    fn cached(&self, key: KernelKey) -> Option<f64> {
        if let Some(&v) = self.memo.get(&key) {
            return Some(v);
        }
        let d = self.dense.as_ref()?;
        let (a, b) = (key.0 as usize, key.1 as usize);
        let rows = d.values.len() / d.cols;
        let hit = if a < rows && b < d.cols {
            d.values[a * d.cols + b]
        } else if b < rows && a < d.cols {
            d.values[b * d.cols + a]
        } else {
            f64::NAN
        };
        (!hit.is_nan()).then_some(hit)
    }

    fn compute(&self, key: KernelKey) -> f64 {
        beta_from_norms(&self.spec, self.method, key.0, key.1)
    }

    /// Stores a value, e.g. when reloading a dumped table.
    pub fn insert(&mut self, key: KernelKey, value: f64) {
        self.memo.insert(canonical(key.0, key.1), value);
    }

    /// Fills the dense cache for the index cube of the spec. Entries already
    /// memoized are reused verbatim.
    pub fn prepare(&mut self) {
        let n = self.spec.n() as u64;
        let rows = (3 * n * n + 1) as usize;
        let cols = (3 * (2 * n - 1) * (2 * n - 1) + 1) as usize;
        let mut values = vec![f64::NAN; rows * cols];
        for a in 0..rows {
            // |l+m|^2 - |l-m|^2 = 4 l.m, so only matching residues mod 4 occur
            let mut b = a % 4;
            while b < cols {
                let key = canonical(a as u64, b as u64);
                values[a * cols + b] = match self.memo.get(&key) {
                    Some(&v) => v,
                    None => self.compute(key),
                };
                b += 4;
            }
        }
        let diagonal = (0..rows as u64)
            .map(|n2| {
                let key = canonical(4 * n2, 0);
                self.memo.get(&key).copied().unwrap_or_else(|| self.compute(key))
            })
            .collect();
        self.dense = Some(DenseTable {
            cols,
            values,
            diagonal,
        });
    }

    /// Row of the dense cache for `|l+m|^2 = sum2`, indexed by `|l-m|^2`.
    pub(crate) fn gain_row(&self, sum2: usize) -> Option<&[f64]> {
        let d = self.dense.as_ref()?;
        d.values.get(sum2 * d.cols..(sum2 + 1) * d.cols)
    }

    /// Every known `(key, beta)` in key order.
    pub fn entries(&self) -> Vec<(KernelKey, f64)> {
        let mut all = self.memo.clone();
        if let Some(d) = &self.dense {
            let rows = d.values.len() / d.cols;
            for a in 0..rows {
                for b in a..d.cols {
                    let v = d.values[a * d.cols + b];
                    if !v.is_nan() {
                        all.entry((a as u64, b as u64)).or_insert(v);
                    }
                }
            }
            for (n2, &v) in d.diagonal.iter().enumerate() {
                all.entry((0, 4 * n2 as u64)).or_insert(v);
            }
        }
        all.into_iter().collect()
    }
}
