//! Unnormalized 3-D discrete Fourier transforms on cubic complex arrays.
//!
//! Arrays are row-major `n x n x n` with the last index contiguous. The
//! forward transform uses the kernel `exp(-2 pi i j k / n)`, the inverse
//! `exp(+2 pi i j k / n)`; neither divides by `n^3`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

/// Transforms `data` (length `n^3`) in place along all three axes.
pub fn fft3(data: &mut [Complex64], n: usize, dir: Direction) {
    assert_eq!(data.len(), n * n * n, "fft3: buffer is not an n^3 cube");
    if n == 0 {
        return;
    }
    #[cfg(feature = "std")]
    {
        planned::fft3(data, n, dir);
    }
    #[cfg(not(feature = "std"))]
    {
        naive_dft3(data, n, dir);
    }
}

/// Direct O(n^4) separable DFT. Exact up to roundoff and independent of any
/// FFT library; used as the `no_std` backend and as a test oracle.
pub fn naive_dft3(data: &mut [Complex64], n: usize, dir: Direction) {
    assert_eq!(data.len(), n * n * n);
    let twiddles: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, dir.sign() * 2.0 * PI * j as f64 / n as f64))
        .collect();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for stride in [1, n, n * n] {
        for start in line_starts(n, stride) {
            for (j, x) in line.iter_mut().enumerate() {
                *x = data[start + j * stride];
            }
            for (k, o) in out.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, x) in line.iter().enumerate() {
                    acc += x * twiddles[(j * k) % n];
                }
                *o = acc;
            }
            for (j, o) in out.iter().enumerate() {
                data[start + j * stride] = *o;
            }
        }
    }
}

/// Offsets of every 1-D line of an `n^3` cube running with the given stride.
fn line_starts(n: usize, stride: usize) -> impl Iterator<Item = usize> {
    let nn = n * n;
    (0..nn).map(move |idx| {
        let (a, b) = (idx / n, idx % n);
        match stride {
            1 => idx * n,
            s if s == n => a * nn + b,
            _ => idx,
        }
    })
}

#[cfg(feature = "std")]
mod planned {
    use super::Direction;
    use num_complex::Complex64;
    use rustfft::{FftDirection, FftPlanner};
    use std::cell::RefCell;

    thread_local! {
        static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    }

    pub(super) fn fft3(data: &mut [Complex64], n: usize, dir: Direction) {
        let fft_dir = match dir {
            Direction::Forward => FftDirection::Forward,
            Direction::Inverse => FftDirection::Inverse,
        };
        let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, fft_dir));
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let nn = n * n;

        // last axis: contiguous lines
        fft.process_with_scratch(data, &mut scratch);

        // middle axis
        let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
        for i0 in 0..n {
            let plane = &data[i0 * nn..(i0 + 1) * nn];
            let dst = &mut buf[i0 * nn..(i0 + 1) * nn];
            for i1 in 0..n {
                for i2 in 0..n {
                    dst[i2 * n + i1] = plane[i1 * n + i2];
                }
            }
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for i0 in 0..n {
            let src = &buf[i0 * nn..(i0 + 1) * nn];
            let plane = &mut data[i0 * nn..(i0 + 1) * nn];
            for i1 in 0..n {
                for i2 in 0..n {
                    plane[i1 * n + i2] = src[i2 * n + i1];
                }
            }
        }

        // first axis
        for i0 in 0..n {
            for r in 0..nn {
                buf[r * n + i0] = data[i0 * nn + r];
            }
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for i0 in 0..n {
            for r in 0..nn {
                data[i0 * nn + r] = buf[r * n + i0];
            }
        }
    }
}
