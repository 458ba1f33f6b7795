//! Complex FFT for arbitrary lengths.
//!
//! Power-of-two lengths use an iterative radix-2 kernel; every other length
//! goes through Bluestein's chirp-z algorithm on a power-of-two convolution.
//! Both directions are unnormalized: `inverse(forward(x)) == n * x`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone)]
enum Kernel {
    Radix2 {
        // exp(-2πik/n) for k < n/2
        twiddles: Vec<Complex64>,
    },
    Bluestein {
        inner: Radix2Plan,
        // exp(-πik²/n) for k < n
        chirp: Vec<Complex64>,
        // forward transform of the conjugate chirp, zero-padded to inner.len
        chirp_spectrum: Vec<Complex64>,
    },
}

#[derive(Debug, Clone)]
struct Radix2Plan {
    len: usize,
    twiddles: Vec<Complex64>,
}

impl Radix2Plan {
    fn new(len: usize) -> Self {
        debug_assert!(len.is_power_of_two());
        let twiddles = (0..len / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        Self { len, twiddles }
    }

    fn process(&self, data: &mut [Complex64], direction: Direction) {
        radix2(data, &self.twiddles, direction);
    }
}

/// A reusable transform plan for one length.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    kernel: Kernel,
}

impl FftPlan {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "FFT length must be positive");
        if len.is_power_of_two() {
            let Radix2Plan { twiddles, .. } = Radix2Plan::new(len);
            return Self {
                len,
                kernel: Kernel::Radix2 { twiddles },
            };
        }
        let inner = Radix2Plan::new((2 * len - 1).next_power_of_two());
        let modulus = 2 * len as u64;
        let chirp: Vec<Complex64> = (0..len as u64)
            .map(|k| {
                // k² mod 2n keeps the phase argument small for large k
                let q = (k * k) % modulus;
                Complex64::from_polar(1.0, -PI * q as f64 / len as f64)
            })
            .collect();
        let mut chirp_spectrum = vec![Complex64::new(0.0, 0.0); inner.len];
        chirp_spectrum[0] = chirp[0].conj();
        for k in 1..len {
            chirp_spectrum[k] = chirp[k].conj();
            chirp_spectrum[inner.len - k] = chirp[k].conj();
        }
        inner.process(&mut chirp_spectrum, Direction::Forward);
        Self {
            len,
            kernel: Kernel::Bluestein {
                inner,
                chirp,
                chirp_spectrum,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Transforms `data` in place. Panics if `data.len() != self.len()`.
    pub fn process(&self, data: &mut [Complex64], direction: Direction) {
        assert_eq!(data.len(), self.len, "buffer length does not match plan");
        match &self.kernel {
            Kernel::Radix2 { twiddles } => radix2(data, twiddles, direction),
            Kernel::Bluestein {
                inner,
                chirp,
                chirp_spectrum,
            } => {
                if direction == Direction::Inverse {
                    data.iter_mut().for_each(|z| *z = z.conj());
                }
                let mut work = vec![Complex64::new(0.0, 0.0); inner.len];
                for ((w, x), c) in work.iter_mut().zip(data.iter()).zip(chirp) {
                    *w = x * c;
                }
                inner.process(&mut work, Direction::Forward);
                for (w, b) in work.iter_mut().zip(chirp_spectrum) {
                    *w *= b;
                }
                inner.process(&mut work, Direction::Inverse);
                let scale = 1.0 / inner.len as f64;
                for ((x, w), c) in data.iter_mut().zip(&work).zip(chirp) {
                    *x = w * c * scale;
                }
                if direction == Direction::Inverse {
                    data.iter_mut().for_each(|z| *z = z.conj());
                }
            }
        }
    }
}

fn radix2(data: &mut [Complex64], twiddles: &[Complex64], direction: Direction) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut half = 1;
    while half < n {
        let stride = n / (2 * half);
        for start in (0..n).step_by(2 * half) {
            for k in 0..half {
                let mut w = twiddles[k * stride];
                if direction == Direction::Inverse {
                    w = w.conj();
                }
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        half *= 2;
    }
}

/// Row-major 2D transform built from two 1D plans.
#[derive(Debug, Clone)]
pub struct Fft2d {
    rows: usize,
    cols: usize,
    row_plan: FftPlan,
    col_plan: FftPlan,
}

impl Fft2d {
    pub fn new(rows: usize, cols: usize) -> Self {
        let row_plan = FftPlan::new(cols);
        let col_plan = if rows == cols {
            row_plan.clone()
        } else {
            FftPlan::new(rows)
        };
        Self {
            rows,
            cols,
            row_plan,
            col_plan,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Unnormalized 2D transform of a `rows x cols` row-major buffer.
    pub fn process(&self, data: &mut [Complex64], direction: Direction) {
        assert_eq!(data.len(), self.rows * self.cols);
        for row in data.chunks_exact_mut(self.cols) {
            self.row_plan.process(row, direction);
        }
        let mut column = vec![Complex64::new(0.0, 0.0); self.rows];
        for c in 0..self.cols {
            for (r, z) in column.iter_mut().enumerate() {
                *z = data[r * self.cols + c];
            }
            self.col_plan.process(&mut column, direction);
            for (r, z) in column.iter().enumerate() {
                data[r * self.cols + c] = *z;
            }
        }
    }
}

/// Signed frequency index of DFT bin `k` for length `n` (k for k <= n/2, k-n above).
pub fn signed_index(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Magnitude helper used by the periodogram.
pub(crate) fn norm_sqr(z: Complex64) -> f64 {
    z.re.powi(2) + z.im.powi(2)
}
