//! Deterministic pseudo-random numbers (xoshiro256**, splitmix64 seeding).
//!
//! The crate never reaches for an OS entropy source: every randomized check
//! and generator takes an explicit 64-bit seed so reruns are bit-identical.

use crate::complex::Complex;
use crate::matrix::ComplexMatrix;

#[derive(Clone, Debug)]
pub struct Rng {
    state: [u64; 4],
}

fn splitmix64(x: &mut u64) -> u64 {
    *x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut x = seed;
        let state = [
            splitmix64(&mut x),
            splitmix64(&mut x),
            splitmix64(&mut x),
            splitmix64(&mut x),
        ];
        Rng { state }
    }

    /// Independent substream `i` of a seed, for per-trial determinism.
    pub fn substream(seed: u64, i: u64) -> Self {
        Rng::new(seed ^ i.wrapping_mul(0xa0761d6478bd642f).wrapping_add(0x1d8e4e27c47d124f))
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    pub fn range(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(1e-300);
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
    }

    /// Complex with independent N(0, 1/2) parts, so E|z|^2 = 1.
    pub fn complex_normal(&mut self) -> Complex {
        let s = 1.0 / libm::sqrt(2.0);
        Complex::new(self.normal() * s, self.normal() * s)
    }

    pub fn complex_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }

    pub fn hermitian(&mut self, n: usize) -> ComplexMatrix {
        let g = self.complex_matrix(n, n);
        g.add(&g.adjoint()).unwrap().scale_re(0.5)
    }

    pub fn psd(&mut self, n: usize) -> ComplexMatrix {
        let g = self.complex_matrix(n, n);
        g.adjoint().mul(&g).unwrap()
    }
}
