//! Hermitian eigendecomposition, positivity tests, Jordan splitting, PSD
//! factorization, the canonical shuffle and the Schur (entrywise) product.
//!
//! The eigensolver runs cyclic Jacobi sweeps on the 2n x 2n real-symmetric
//! embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian matrix. Eigenvalues
//! of the embedding come in duplicated pairs; complex eigenvectors are
//! recovered by a pivoted Gram-Schmidt pass over each eigenvalue cluster.

use crate::complex::{self, Complex};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use alloc::vec;
use alloc::vec::Vec;

/// Default tolerance used wherever a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct Eig {
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors, aligned with `values`.
    pub vectors: ComplexMatrix,
}

impl Eig {
    /// V diag(values) V*, for residual checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let d = ComplexMatrix::diag_real(&self.values);
        self.vectors
            .mul(&d)
            .and_then(|m| m.mul(&self.vectors.adjoint()))
            .unwrap_or_else(|_| ComplexMatrix::zeros(n, n))
    }
}

fn hermitian_pre(h: &ComplexMatrix, tol: f64) -> Result<()> {
    // Allow float dust even when the caller passes tol = 0.
    let band = tol.max(1e-12 * h.max_abs_entry().max(1.0));
    h.check_hermitian(band)
}

/// Cyclic Jacobi on a dense real symmetric matrix (row-major, size n).
/// Returns (eigenvalues, eigenvectors row-major, columns are vectors).
fn jacobi_real_sym(a: &mut [f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0f64; n];
    if n <= 1 {
        return Ok((d, v));
    }

    let scale = a.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok((d, v));
    }

    for sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off += a[p * n + q].abs();
            }
        }
        if off <= 1e-15 * scale * (n as f64) {
            return Ok((d, v));
        }
        let thresh = if sweep < 3 {
            0.2 * off / ((n * n) as f64)
        } else {
            0.0
        };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3 && g <= f64::EPSILON * d[p].abs() && g <= f64::EPSILON * d[q].abs() {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if g <= f64::EPSILON * h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let mut t = 1.0 / (theta.abs() + libm::sqrt(1.0 + theta * theta));
                    if theta < 0.0 {
                        t = -t;
                    }
                    t
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;
                let rot = |a: &mut [f64], i: usize, j: usize| {
                    let g = a[i];
                    let h = a[j];
                    a[i] = g - s * (h + g * tau);
                    a[j] = h + s * (g - h * tau);
                };
                for j in 0..p {
                    rot(a, j * n + p, j * n + q);
                }
                for j in p + 1..q {
                    rot(a, p * n + j, j * n + q);
                }
                for j in q + 1..n {
                    rot(a, p * n + j, q * n + j);
                }
                for j in 0..n {
                    rot(&mut v, j * n + p, j * n + q);
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    Err(Error::NoConvergence("jacobi sweeps exhausted"))
}

/// H = V diag(lambda) V* with real eigenvalues in descending order.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<Eig> {
    hermitian_pre(h, 0.0)?;
    let n = h.rows();
    if n == 0 {
        return Ok(Eig {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }

    // Exactly symmetric embedding of the hermitized input.
    let m = 2 * n;
    let mut a = vec![0.0f64; m * m];
    for i in 0..n {
        for j in i..n {
            let re = 0.5 * (h.get(i, j).re + h.get(j, i).re);
            let im = 0.5 * (h.get(i, j).im - h.get(j, i).im);
            a[i * m + j] = re;
            a[j * m + i] = re;
            a[(i + n) * m + (j + n)] = re;
            a[(j + n) * m + (i + n)] = re;
            a[i * m + (j + n)] = -im;
            a[(j + n) * m + i] = -im;
            a[j * m + (i + n)] = im;
            a[(i + n) * m + j] = im;
        }
    }

    let (vals, vecs) = jacobi_real_sym(&mut a, m)?;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| vals[y].partial_cmp(&vals[x]).unwrap_or(core::cmp::Ordering::Equal));

    let scale = vals.iter().fold(0.0f64, |mx, &x| mx.max(x.abs())).max(1.0);
    let gap_thr = 1e-10 * scale;

    let mut out_vals: Vec<f64> = Vec::with_capacity(n);
    let mut out_vecs: Vec<Vec<Complex>> = Vec::with_capacity(n);

    let mut start = 0;
    while start < m {
        // Eigenvalues of the embedding pair up exactly; clusters must be even.
        let mut end = start + 1;
        while end < m
            && ((vals[order[end - 1]] - vals[order[end]]).abs() <= gap_thr
                || (end - start) % 2 == 1)
        {
            end += 1;
        }
        let take = (end - start) / 2;

        let mut cands: Vec<(f64, Vec<Complex>)> = (start..end)
            .map(|s| {
                let k = order[s];
                let z: Vec<Complex> = (0..n)
                    .map(|i| Complex::new(vecs[i * m + k], vecs[(i + n) * m + k]))
                    .collect();
                (vals[k], z)
            })
            .collect();

        let mut accepted: Vec<(f64, Vec<Complex>)> = Vec::with_capacity(take);
        for _ in 0..take {
            let (best, bn) = cands
                .iter()
                .enumerate()
                .map(|(i, (_, z))| (i, z.iter().map(|c| c.norm_sqr()).sum::<f64>()))
                .fold((0usize, -1.0f64), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if bn < 1e-12 {
                return Err(Error::NoConvergence("eigenvector pairing degenerated"));
            }
            let (lam, mut zb) = cands.swap_remove(best);
            let inv = 1.0 / libm::sqrt(bn);
            for c in zb.iter_mut() {
                *c = c.scale(inv);
            }
            for (_, z) in cands.iter_mut() {
                let mut dot = complex::ZERO;
                for (a, b) in z.iter().zip(&zb) {
                    dot += *a * b.conj();
                }
                for (a, b) in z.iter_mut().zip(&zb) {
                    *a -= dot * *b;
                }
            }
            accepted.push((lam, zb));
        }
        accepted.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(core::cmp::Ordering::Equal));
        for (lam, z) in accepted {
            out_vals.push(lam);
            out_vecs.push(z);
        }
        start = end;
    }

    let vectors = ComplexMatrix::from_fn(n, n, |r, c| out_vecs[c][r]);
    Ok(Eig {
        values: out_vals,
        vectors,
    })
}

enum CholOutcome {
    /// Lower factor L with A = L L*.
    Factor(ComplexMatrix),
    /// A pivot was decisively negative; the matrix is not PSD.
    Indefinite,
    /// A pivot fell into the noise band around zero.
    Inconclusive,
}

/// Cholesky of a Hermitian matrix with a pivot classification band.
fn try_cholesky(a: &ComplexMatrix, band: f64) -> CholOutcome {
    let n = a.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for k in 0..j {
            d -= l.get(j, k).norm_sqr();
        }
        if d <= band {
            return if d < -band {
                CholOutcome::Indefinite
            } else {
                CholOutcome::Inconclusive
            };
        }
        let dj = libm::sqrt(d);
        l.set(j, j, Complex::real(dj));
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, s.scale(1.0 / dj));
        }
    }
    CholOutcome::Factor(l)
}

/// Plain Cholesky factor L (A = L L*) of a positive definite Hermitian matrix.
pub fn cholesky(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    hermitian_pre(a, tol)?;
    match try_cholesky(a, 0.0) {
        CholOutcome::Factor(l) => Ok(l),
        _ => Err(Error::NotPsd { eigenvalue: 0.0 }),
    }
}

/// True iff the minimum eigenvalue of `h` is >= -tol.
///
/// A Cholesky attempt on H + tol I settles clear cases; only borderline
/// spectra fall back to the full eigendecomposition.
pub fn is_psd(h: &ComplexMatrix, tol: f64) -> Result<bool> {
    hermitian_pre(h, tol)?;
    let n = h.rows();
    let band = 1e-13 * h.max_abs_entry().max(1.0) * (n as f64).max(1.0);
    let mut shifted = h.clone();
    for i in 0..n {
        shifted.add_at(i, i, Complex::real(tol));
    }
    match try_cholesky(&shifted, band) {
        CholOutcome::Factor(_) => Ok(true),
        CholOutcome::Indefinite => Ok(false),
        CholOutcome::Inconclusive => {
            let eig = eig_hermitian(h)?;
            Ok(eig.values.last().is_none_or(|&lm| lm >= -tol))
        }
    }
}

/// Minimum eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    let eig = eig_hermitian(h)?;
    Ok(eig.values.last().copied().unwrap_or(0.0))
}

/// Jordan decomposition H = H_plus - H_minus with both parts PSD and
/// H_plus H_minus = 0.
pub fn jordan_split(h: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let eig = eig_hermitian(h)?;
    let n = h.rows();
    let mut plus = ComplexMatrix::zeros(n, n);
    let mut minus = ComplexMatrix::zeros(n, n);
    for (k, &lam) in eig.values.iter().enumerate() {
        let target = if lam >= 0.0 { &mut plus } else { &mut minus };
        let w = lam.abs();
        for r in 0..n {
            let vr = eig.vectors.get(r, k);
            for c in 0..n {
                target.add_at(r, c, (vr * eig.vectors.get(c, k).conj()).scale(w));
            }
        }
    }
    Ok((plus, minus))
}

/// Factor a PSD matrix as H = F* F where F has `rank` rows.
///
/// Eigenvalues <= tol * max(1, lambda_max) count as zero; an eigenvalue below
/// -tol rejects the input.
pub fn psd_factor(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(h)?;
    let n = h.rows();
    let lam_max = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    if let Some(&lam_min) = eig.values.last() {
        if lam_min < -tol {
            return Err(Error::NotPsd {
                eigenvalue: lam_min,
            });
        }
    }
    let cutoff = tol * lam_max.max(1.0);
    let kept: Vec<usize> = (0..n).filter(|&k| eig.values[k] > cutoff).collect();
    let mut f = ComplexMatrix::zeros(kept.len(), n);
    for (r, &k) in kept.iter().enumerate() {
        let s = libm::sqrt(eig.values[k]);
        for c in 0..n {
            f.set(r, c, eig.vectors.get(c, k).conj().scale(s));
        }
    }
    Ok(f)
}

/// Square root of a PSD matrix, negatives below -tol rejected.
pub fn psd_sqrt(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(h)?;
    let n = h.rows();
    if let Some(&lam_min) = eig.values.last() {
        if lam_min < -tol {
            return Err(Error::NotPsd {
                eigenvalue: lam_min,
            });
        }
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        let s = libm::sqrt(lam);
        for r in 0..n {
            let vr = eig.vectors.get(r, k);
            for c in 0..n {
                out.add_at(r, c, (vr * eig.vectors.get(c, k).conj()).scale(s));
            }
        }
    }
    Ok(out)
}

/// Spectral norm via the largest eigenvalue of M* M.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let g = m.adjoint().mul(m).expect("gram product");
    match eig_hermitian(&g) {
        Ok(eig) => libm::sqrt(eig.values.first().copied().unwrap_or(0.0).max(0.0)),
        Err(_) => m.frobenius_norm(),
    }
}

/// Conjugate M by the permutation that swaps the outer and inner block
/// indexings of a space of shape outer x inner x cell.
///
/// Applying the shuffle again with (inner, outer, cell) restores M.
pub fn canonical_shuffle(
    m: &ComplexMatrix,
    outer: usize,
    inner: usize,
    cell: usize,
) -> Result<ComplexMatrix> {
    let n = outer * inner * cell;
    if m.rows() != n || m.cols() != n {
        return Err(Error::Shape {
            expected: (n, n),
            got: (m.rows(), m.cols()),
        });
    }
    let sigma = |t: usize| -> usize {
        let c = t % cell;
        let rest = t / cell;
        let u = rest % inner;
        let i = rest / inner;
        (u * outer + i) * cell + c
    };
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let sr = sigma(r);
        for c in 0..n {
            out.set(sr, sigma(c), m.get(r, c));
        }
    }
    Ok(out)
}

/// Entrywise (Schur) product of two same-shaped matrices.
pub fn schur_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.same_shape(b) {
        return Err(Error::Shape {
            expected: (a.rows(), a.cols()),
            got: (b.rows(), b.cols()),
        });
    }
    Ok(ComplexMatrix::from_fn(a.rows(), a.cols(), |r, c| {
        a.get(r, c) * b.get(r, c)
    }))
}
