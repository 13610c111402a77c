//! Real-to-complex 3-D transforms on `n^3` grids stored x-fastest.
//!
//! The half spectrum has `nh = n/2 + 1` entries along x and is stored as
//! `kx + nh (ky + n kz)`. Inverse transforms are normalized by `1/n^3`.

use std::sync::Arc;

use rayon::prelude::*;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft3 {
    n: usize,
    nh: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut real = RealFftPlanner::<f64>::new();
        let mut complex = FftPlanner::<f64>::new();
        Self {
            n,
            nh: n / 2 + 1,
            r2c: real.plan_fft_forward(n),
            c2r: real.plan_fft_inverse(n),
            forward: complex.plan_fft_forward(n),
            inverse: complex.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entries along x in the half spectrum.
    pub fn half(&self) -> usize {
        self.nh
    }

    pub fn spectral_len(&self) -> usize {
        self.nh * self.n * self.n
    }

    /// Forward transform; `input` is used as scratch and left unspecified.
    pub fn forward(&self, input: &mut [f64], output: &mut [Complex64]) {
        let (n, nh) = (self.n, self.nh);
        assert_eq!(input.len(), n * n * n);
        assert_eq!(output.len(), self.spectral_len());
        input.par_chunks_mut(n * n).zip(output.par_chunks_mut(nh * n)).for_each(|(src, dst)| {
            let mut scratch = self.r2c.make_scratch_vec();
            for (row_in, row_out) in src.chunks_mut(n).zip(dst.chunks_mut(nh)) {
                self.r2c.process_with_scratch(row_in, row_out, &mut scratch).expect("r2c lengths");
            }
            self.along_y(dst, &*self.forward);
        });
        self.along_z(output, &*self.forward);
    }

    /// Inverse transform including the `1/n^3` factor; `input` is used as scratch.
    pub fn inverse(&self, input: &mut [Complex64], output: &mut [f64]) {
        let (n, nh) = (self.n, self.nh);
        assert_eq!(output.len(), n * n * n);
        assert_eq!(input.len(), self.spectral_len());
        self.along_z(input, &*self.inverse);
        let scale = 1.0 / (n * n * n) as f64;
        let even = n % 2 == 0;
        input.par_chunks_mut(nh * n).zip(output.par_chunks_mut(n * n)).for_each(|(src, dst)| {
            self.along_y(src, &*self.inverse);
            let mut scratch = self.c2r.make_scratch_vec();
            for (row_in, row_out) in src.chunks_mut(nh).zip(dst.chunks_mut(n)) {
                // Self-conjugate bins of a real signal; drop rounding noise.
                row_in[0].im = 0.0;
                if even {
                    row_in[nh - 1].im = 0.0;
                }
                self.c2r.process_with_scratch(row_in, row_out, &mut scratch).expect("c2r lengths");
                for v in row_out.iter_mut() {
                    *v *= scale;
                }
            }
        });
    }

    /// Transforms every y line of one z slab (`nh * n` entries).
    fn along_y(&self, slab: &mut [Complex64], fft: &dyn Fft<f64>) {
        let (n, nh) = (self.n, self.nh);
        let mut buf = vec![Complex64::default(); n * nh];
        for y in 0..n {
            for kx in 0..nh {
                buf[kx * n + y] = slab[kx + nh * y];
            }
        }
        fft.process(&mut buf);
        for y in 0..n {
            for kx in 0..nh {
                slab[kx + nh * y] = buf[kx * n + y];
            }
        }
    }

    fn along_z(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let (n, nh) = (self.n, self.nh);
        let plane = nh * n;
        let mut buf = vec![Complex64::default(); nh * n];
        for ky in 0..n {
            for z in 0..n {
                let base = nh * ky + plane * z;
                for kx in 0..nh {
                    buf[kx * n + z] = data[base + kx];
                }
            }
            fft.process(&mut buf);
            for z in 0..n {
                let base = nh * ky + plane * z;
                for kx in 0..nh {
                    data[base + kx] = buf[kx * n + z];
                }
            }
        }
    }
}

/// Signed integer frequency of spectral index `i` on an `n`-point axis, in `[-n/2, n/2)`.
pub fn frequency(i: usize, n: usize) -> i64 {
    if 2 * i >= n {
        i as i64 - n as i64
    } else {
        i as i64
    }
}
