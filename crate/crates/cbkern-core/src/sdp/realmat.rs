//! Dense real symmetric workhorse for the interior-point iterations.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct RealMat {
    pub n: usize,
    pub a: Vec<f64>,
}

impl RealMat {
    pub fn zeros(n: usize) -> Self {
        RealMat {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn identity_scaled(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = s;
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.a[r * self.n + c] = v;
    }

    #[inline]
    pub fn add_at(&mut self, r: usize, c: usize, v: f64) {
        self.a[r * self.n + c] += v;
    }

    /// self += s * other
    pub fn axpy(&mut self, s: f64, other: &Self) {
        for (x, &y) in self.a.iter_mut().zip(&other.a) {
            *x += s * y;
        }
    }

    /// tr(self * other) for symmetric operands.
    pub fn dot(&self, other: &Self) -> f64 {
        self.a.iter().zip(&other.a).map(|(&x, &y)| x * y).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.a[i * self.n + i]).sum()
    }

    /// Dense product, ikj loop order for row-major locality.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row_i = i * n;
            for k in 0..n {
                let aik = self.a[row_i + k];
                if aik == 0.0 {
                    continue;
                }
                let row_k = k * n;
                let (dst, src) = (&mut out.a[row_i..row_i + n], &other.a[row_k..row_k + n]);
                for j in 0..n {
                    dst[j] += aik * src[j];
                }
            }
        }
        out
    }

    /// (self + self^T) / 2
    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (self.a[i * n + j] + self.a[j * n + i]);
                self.a[i * n + j] = v;
                self.a[j * n + i] = v;
            }
        }
    }

    /// Lower Cholesky factor, or None when a pivot drops below `floor`.
    pub fn cholesky(&self, floor: f64) -> Option<RealMat> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.a[i * n + j];
                let (ri, rj) = (i * n, j * n);
                for k in 0..j {
                    s -= l.a[ri + k] * l.a[rj + k];
                }
                if i == j {
                    if s <= floor {
                        return None;
                    }
                    l.a[ri + j] = libm::sqrt(s);
                } else {
                    l.a[ri + j] = s / l.a[rj + j];
                }
            }
        }
        Some(l)
    }

    pub fn is_pd(&self) -> bool {
        self.cholesky(0.0).is_some()
    }

    /// Solve (L L^T) x = rhs in place given the lower factor.
    pub fn chol_solve(l: &RealMat, rhs: &mut [f64]) {
        let n = l.n;
        for i in 0..n {
            let mut s = rhs[i];
            let row = i * n;
            for k in 0..i {
                s -= l.a[row + k] * rhs[k];
            }
            rhs[i] = s / l.a[row + i];
        }
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for k in i + 1..n {
                s -= l.a[k * n + i] * rhs[k];
            }
            rhs[i] = s / l.a[i * n + i];
        }
    }

    /// Inverse from the lower Cholesky factor.
    pub fn inverse_from_chol(l: &RealMat) -> RealMat {
        let n = l.n;
        let mut inv = RealMat::zeros(n);
        let mut col = vec![0.0f64; n];
        for j in 0..n {
            col.iter_mut().for_each(|x| *x = 0.0);
            col[j] = 1.0;
            Self::chol_solve(l, &mut col);
            for i in 0..n {
                inv.a[i * n + j] = col[i];
            }
        }
        inv.symmetrize();
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_and_inverse() {
        // A = [[4,2],[2,3]] is PD.
        let mut a = RealMat::zeros(2);
        a.a.copy_from_slice(&[4.0, 2.0, 2.0, 3.0]);
        let l = a.cholesky(0.0).unwrap();
        let mut rhs = [8.0, 7.0];
        RealMat::chol_solve(&l, &mut rhs);
        // Solution of A x = (8,7): x = (1.25, 1.5).
        assert!((rhs[0] - 1.25).abs() < 1e-14 && (rhs[1] - 1.5).abs() < 1e-14);
        let inv = RealMat::inverse_from_chol(&l);
        let prod = a.mul(&inv);
        assert!((prod.get(0, 0) - 1.0).abs() < 1e-14);
        assert!(prod.get(0, 1).abs() < 1e-14);

        let mut ind = RealMat::zeros(2);
        ind.a.copy_from_slice(&[1.0, 2.0, 2.0, 1.0]);
        assert!(!ind.is_pd());
    }
}
