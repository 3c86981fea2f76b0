//! Bounded linear maps M_p -> M_q carried by their Choi matrices.
//!
//! The Choi matrix is C = sum_{u,v} E_{u,v} (x) phi(E_{u,v}), a pq x pq
//! matrix indexed by (source, target) composite indices with the source index
//! outermost. The map is completely positive iff C is PSD, and the adjoint
//! map phi*(a) = (phi(a*))* has Choi C*.
//!
//! The completely bounded norm is computed two independent ways: an SDP that
//! minimizes t over completely positive completions psi_1, psi_2 of the block
//! map [[psi_1, phi], [phi*, psi_2]] with psi_i(1) <= t I, and a sampled
//! lower-bound oracle that climbs ||(phi (x) id_r)(a)|| by alternating
//! singular-vector ascent.

use crate::complex::{self, Complex};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::ComplexMatrix;
use crate::rng::Rng;
use crate::sdp::SdpProblem;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct LinMap {
    p: usize,
    q: usize,
    choi: ComplexMatrix,
}

/// cb-norm value together with the completion certificate.
#[derive(Clone, Debug)]
pub struct CbNorm {
    pub value: f64,
    pub psi1: LinMap,
    pub psi2: LinMap,
}

impl LinMap {
    pub fn new(p: usize, q: usize, choi: ComplexMatrix) -> Result<Self> {
        if choi.rows() != p * q || choi.cols() != p * q {
            return Err(Error::Shape {
                expected: (p * q, p * q),
                got: (choi.rows(), choi.cols()),
            });
        }
        Ok(LinMap { p, q, choi })
    }

    pub fn zero(p: usize, q: usize) -> Self {
        LinMap {
            p,
            q,
            choi: ComplexMatrix::zeros(p * q, p * q),
        }
    }

    pub fn identity(p: usize) -> Self {
        let mut choi = ComplexMatrix::zeros(p * p, p * p);
        for u in 0..p {
            for v in 0..p {
                choi.set(u * p + u, v * p + v, complex::ONE);
            }
        }
        LinMap { p, q: p, choi }
    }

    /// Build from the action on matrix units.
    pub fn from_action(
        p: usize,
        q: usize,
        mut f: impl FnMut(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        let mut choi = ComplexMatrix::zeros(p * q, p * q);
        for u in 0..p {
            for v in 0..p {
                let img = f(&ComplexMatrix::matrix_unit(p, u, v));
                if img.rows() != q || img.cols() != q {
                    return Err(Error::Shape {
                        expected: (q, q),
                        got: (img.rows(), img.cols()),
                    });
                }
                for w in 0..q {
                    for s in 0..q {
                        choi.set(u * q + w, v * q + s, img.get(w, s));
                    }
                }
            }
        }
        Ok(LinMap { p, q, choi })
    }

    /// phi(a) = sum_t B_t a B_t* from q x p Kraus operators.
    pub fn from_kraus(p: usize, q: usize, ops: &[ComplexMatrix]) -> Result<Self> {
        let mut choi = ComplexMatrix::zeros(p * q, p * q);
        for b in ops {
            if b.rows() != q || b.cols() != p {
                return Err(Error::Shape {
                    expected: (q, p),
                    got: (b.rows(), b.cols()),
                });
            }
            for u in 0..p {
                for w in 0..q {
                    let x = b.get(w, u);
                    if x == complex::ZERO {
                        continue;
                    }
                    for v in 0..p {
                        for s in 0..q {
                            choi.add_at(u * q + w, v * q + s, x * b.get(s, v).conj());
                        }
                    }
                }
            }
        }
        Ok(LinMap { p, q, choi })
    }

    /// Kraus operators recovered from a PSD factorization of the Choi matrix.
    pub fn kraus(&self, tol: f64) -> Result<Vec<ComplexMatrix>> {
        let f = linalg::psd_factor(&self.choi, tol)?;
        let mut ops = Vec::with_capacity(f.rows());
        for t in 0..f.rows() {
            ops.push(ComplexMatrix::from_fn(self.q, self.p, |w, u| {
                f.get(t, u * self.q + w).conj()
            }));
        }
        Ok(ops)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// The (u, v) Choi block, a q x q matrix equal to phi(E_{u,v}).
    pub fn choi_block(&self, u: usize, v: usize) -> ComplexMatrix {
        self.choi.block(u * self.q, v * self.q, self.q, self.q)
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if a.rows() != self.p || a.cols() != self.p {
            return Err(Error::Shape {
                expected: (self.p, self.p),
                got: (a.rows(), a.cols()),
            });
        }
        let mut out = ComplexMatrix::zeros(self.q, self.q);
        for u in 0..self.p {
            for v in 0..self.p {
                let auv = a.get(u, v);
                if auv == complex::ZERO {
                    continue;
                }
                for w in 0..self.q {
                    for s in 0..self.q {
                        out.add_at(w, s, auv * self.choi.get(u * self.q + w, v * self.q + s));
                    }
                }
            }
        }
        Ok(out)
    }

    /// phi* with phi*(a) = (phi(a*))*; its Choi matrix is the adjoint Choi.
    pub fn adjoint_map(&self) -> LinMap {
        LinMap {
            p: self.p,
            q: self.q,
            choi: self.choi.adjoint(),
        }
    }

    /// ||phi - phi*|| <= tol in Choi Frobenius norm.
    pub fn is_hermitian_map(&self, tol: f64) -> bool {
        self.choi.sub(&self.choi.adjoint()).unwrap().frobenius_norm() <= tol
    }

    pub fn is_cp_map(&self, tol: f64) -> Result<bool> {
        linalg::is_psd(&self.choi, tol)
    }

    /// phi (x) id_r : M_{pr} -> M_{qr}, pure index bookkeeping on the Choi.
    pub fn tensor_id(&self, r: usize) -> LinMap {
        assert!(r >= 1);
        if r == 1 {
            return self.clone();
        }
        let (p, q) = (self.p, self.q);
        let (pr, qr) = (p * r, q * r);
        let mut choi = ComplexMatrix::zeros(pr * qr, pr * qr);
        for u in 0..p {
            for w in 0..q {
                for v in 0..p {
                    for s in 0..q {
                        let z = self.choi.get(u * q + w, v * q + s);
                        if z == complex::ZERO {
                            continue;
                        }
                        for alpha in 0..r {
                            for beta in 0..r {
                                choi.set(
                                    (u * r + alpha) * qr + (w * r + alpha),
                                    (v * r + beta) * qr + (s * r + beta),
                                    z,
                                );
                            }
                        }
                    }
                }
            }
        }
        LinMap { p: pr, q: qr, choi }
    }

    pub fn add(&self, other: &LinMap) -> Result<LinMap> {
        if self.p != other.p || self.q != other.q {
            return Err(Error::Mismatch("linear maps of different block sizes"));
        }
        Ok(LinMap {
            p: self.p,
            q: self.q,
            choi: self.choi.add(&other.choi)?,
        })
    }

    pub fn sub(&self, other: &LinMap) -> Result<LinMap> {
        self.add(&other.scale(Complex::real(-1.0)))
    }

    pub fn scale(&self, s: Complex) -> LinMap {
        LinMap {
            p: self.p,
            q: self.q,
            choi: self.choi.scale(s),
        }
    }

    /// Choi Frobenius distance.
    pub fn dist(&self, other: &LinMap) -> f64 {
        self.choi.dist(&other.choi)
    }

    /// Completely bounded norm as the optimum of the off-diagonal completion
    /// SDP, with the feasibility certificate returned alongside.
    pub fn cb_norm(&self, eps: f64) -> Result<CbNorm> {
        self.cb_norm_iter(eps, crate::sdp::DEFAULT_MAX_ITER)
    }

    /// `cb_norm` with an explicit solver iteration budget.
    pub fn cb_norm_iter(&self, eps: f64, max_iter: usize) -> Result<CbNorm> {
        let pq = self.p * self.q;
        let mut prob = SdpProblem::new();
        let t = prob.add_block("t", 1);
        let core = prob.add_block("core", 2 * pq);
        let s1 = prob.add_block("cap1", self.q);
        let s2 = prob.add_block("cap2", self.q);
        // Off-diagonal corner carries the fixed Choi matrix of phi.
        for i in 0..pq {
            for j in 0..pq {
                prob.pin(core, i, pq + j, self.choi.get(i, j));
            }
        }
        // cap_k = t I - psi_k(1), with psi_k(1) the sum of diagonal Choi blocks.
        for w in 0..self.q {
            for s in w..self.q {
                let mut terms1 = Vec::new();
                let mut terms2 = Vec::new();
                terms1.push((s1, w, s, complex::ONE));
                terms2.push((s2, w, s, complex::ONE));
                for u in 0..self.p {
                    terms1.push((core, u * self.q + w, u * self.q + s, complex::ONE));
                    terms2.push((core, pq + u * self.q + w, pq + u * self.q + s, complex::ONE));
                }
                if w == s {
                    terms1.push((t, 0, 0, -complex::ONE));
                    terms2.push((t, 0, 0, -complex::ONE));
                }
                prob.add_equality(&terms1, complex::ZERO);
                prob.add_equality(&terms2, complex::ZERO);
            }
        }
        prob.set_objective(&[(t, 0, 0, complex::ONE)]);

        let solver_eps = (eps * 1e-2).clamp(1e-10, 1e-7);
        let sol = prob.solve(solver_eps, max_iter);
        sol.require_optimal()?;
        let big = sol.block(core);
        let psi1 = LinMap::new(self.p, self.q, big.block(0, 0, pq, pq))?;
        let psi2 = LinMap::new(self.p, self.q, big.block(pq, pq, pq, pq))?;
        Ok(CbNorm {
            value: sol.objective_value,
            psi1,
            psi2,
        })
    }

    /// Sampled lower bound max ||(phi (x) id_r)(a)|| over unit-norm a,
    /// refined by alternating singular-vector ascent (50 sweeps max).
    /// Monotone nondecreasing in `trials` for a fixed seed.
    pub fn cb_norm_lower_bound(&self, r: usize, trials: usize, seed: u64) -> f64 {
        assert!(r >= 1);
        let theta = self.tensor_id(r);
        let (pr, qr) = (theta.p, theta.q);
        let mut best = 0.0f64;
        for trial in 0..trials {
            let mut rng = Rng::substream(seed, trial as u64);
            let mut a = rng.complex_matrix(pr, pr);
            let nrm = linalg::operator_norm(&a);
            if nrm <= 1e-300 {
                continue;
            }
            a = a.scale_re(1.0 / nrm);
            let mut current = 0.0f64;
            for _ in 0..50 {
                let b = theta.apply(&a).expect("shape");
                let (sigma, u, v) = match top_singular_triple(&b) {
                    Some(t) => t,
                    None => break,
                };
                if sigma <= current + 1e-12 {
                    current = current.max(sigma);
                    break;
                }
                current = sigma;
                // Optimal input for the fixed output pair (u, v): the
                // nuclear-norm contact point of M_ij = u* Theta(E_ij) v.
                let m = ComplexMatrix::from_fn(pr, pr, |i, j| {
                    let mut s = complex::ZERO;
                    for w in 0..qr {
                        let uw = u.get(w, 0).conj();
                        for x in 0..qr {
                            s += uw * theta.choi.get(i * qr + w, j * qr + x) * v.get(x, 0);
                        }
                    }
                    s
                });
                match nuclear_contact(&m) {
                    Some(next) => a = next,
                    None => break,
                }
            }
            best = best.max(current);
        }
        best
    }
}

/// Leading singular triple (sigma, u, v) with B v = sigma u.
fn top_singular_triple(b: &ComplexMatrix) -> Option<(f64, ComplexMatrix, ComplexMatrix)> {
    let g = b.adjoint().mul(b).ok()?;
    let eig = linalg::eig_hermitian(&g).ok()?;
    let lam = eig.values.first().copied()?.max(0.0);
    let sigma = libm::sqrt(lam);
    if sigma <= 1e-300 {
        return None;
    }
    let n = g.rows();
    let v = eig.vectors.block(0, 0, n, 1);
    let u = b.mul(&v).ok()?.scale_re(1.0 / sigma);
    Some((sigma, u, v))
}

/// A unit-operator-norm a maximizing Re tr(a^T M): a = conj(U) V^T from the
/// singular decomposition M = U S V*. Directions at the numerical noise
/// floor are dropped (their u-vectors are garbage amplified by 1/sigma), and
/// the result is renormalized so the ascent never leaves the unit ball.
fn nuclear_contact(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = m.rows();
    let g = m.adjoint().mul(m).ok()?;
    let eig = linalg::eig_hermitian(&g).ok()?;
    let sigma_max = libm::sqrt(eig.values.first().copied()?.max(0.0));
    let mut out = ComplexMatrix::zeros(n, n);
    let mut any = false;
    for k in 0..n {
        let lam = eig.values[k].max(0.0);
        let sigma = libm::sqrt(lam);
        if sigma <= 1e-7 * sigma_max.max(1e-300) {
            continue;
        }
        any = true;
        let vk = eig.vectors.block(0, k, n, 1);
        let uk = m.mul(&vk).ok()?.scale_re(1.0 / sigma);
        for i in 0..n {
            let ui = uk.get(i, 0).conj();
            for j in 0..n {
                out.add_at(i, j, ui * vk.get(j, 0));
            }
        }
    }
    if !any {
        return None;
    }
    let norm = linalg::operator_norm(&out);
    if norm > 1.0 {
        out = out.scale_re(1.0 / norm);
    }
    Some(out)
}

#[cfg(test)]
pub(crate) fn transpose_map(p: usize) -> LinMap {
    LinMap::from_action(p, p, |a| a.transpose()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{I, ONE};
    use crate::rng::Rng;

    fn random_cp(rng: &mut Rng, p: usize, q: usize, terms: usize) -> LinMap {
        let ops: Vec<ComplexMatrix> = (0..terms).map(|_| rng.complex_matrix(q, p)).collect();
        LinMap::from_kraus(p, q, &ops).unwrap()
    }

    #[test]
    fn apply_examples() {
        let id = LinMap::identity(2);
        let e12 = ComplexMatrix::matrix_unit(2, 0, 1);
        assert!(id.apply(&e12).unwrap().dist(&e12) < 1e-15);

        let zero = LinMap::zero(2, 3);
        assert_eq!(zero.apply(&e12).unwrap(), ComplexMatrix::zeros(3, 3));

        // Transpose map has the SWAP Choi and sends E_{1,2} to E_{2,1}.
        let t = transpose_map(2);
        assert!(t.apply(&e12).unwrap().dist(&ComplexMatrix::matrix_unit(2, 1, 0)) < 1e-15);
        let mut swap = ComplexMatrix::zeros(4, 4);
        for u in 0..2 {
            for v in 0..2 {
                swap.set(u * 2 + v, v * 2 + u, ONE);
            }
        }
        assert!(t.choi().dist(&swap) < 1e-15);

        assert!(id.apply(&ComplexMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let id = LinMap::identity(3);
        assert!(id.adjoint_map().dist(&id) < 1e-15);
        let t = transpose_map(2);
        assert!(t.adjoint_map().dist(&t) < 1e-15);

        let mut rng = Rng::new(17);
        let g = LinMap::new(2, 3, rng.complex_matrix(6, 6)).unwrap();
        assert!(g.adjoint_map().adjoint_map().dist(&g) < 1e-15);
        // phi*(a) = (phi(a*))* pointwise on a spanning set.
        for u in 0..2 {
            for v in 0..2 {
                let a = ComplexMatrix::matrix_unit(2, u, v);
                let lhs = g.adjoint_map().apply(&a).unwrap();
                let rhs = g.apply(&a.adjoint()).unwrap().adjoint();
                assert!(lhs.dist(&rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_and_cp_examples() {
        let id = LinMap::identity(2);
        assert!(id.is_hermitian_map(1e-12));
        assert!(id.is_cp_map(1e-10).unwrap());

        // phi(a) = i tr(a) I has adjoint -i tr(a) I.
        let itr =
            LinMap::from_action(2, 2, |a| ComplexMatrix::identity(2).scale(I * a.trace())).unwrap();
        assert!(!itr.is_hermitian_map(1e-6));

        let t = transpose_map(2);
        assert!(t.is_hermitian_map(1e-12));
        assert!(!t.is_cp_map(1e-10).unwrap());

        let mut rng = Rng::new(23);
        let v = rng.complex_matrix(2, 2);
        let conj_v =
            LinMap::from_action(2, 2, |a| v.adjoint().mul(a).unwrap().mul(&v).unwrap()).unwrap();
        assert!(conj_v.is_cp_map(1e-10).unwrap());
    }

    #[test]
    fn cp_implies_hermitian_on_random_maps() {
        let mut rng = Rng::new(29);
        for _ in 0..10 {
            let phi = random_cp(&mut rng, 2, 3, 2);
            assert!(phi.is_cp_map(1e-9).unwrap());
            assert!(phi.is_hermitian_map(1e-9));
        }
    }

    #[test]
    fn tensor_id_examples() {
        let mut rng = Rng::new(37);
        let phi = LinMap::new(2, 2, rng.complex_matrix(4, 4)).unwrap();
        assert!(phi.tensor_id(1).dist(&phi) < 1e-15);

        let id = LinMap::identity(2);
        assert!(id.tensor_id(3).dist(&LinMap::identity(6)) < 1e-15);

        let cp = random_cp(&mut rng, 2, 2, 2);
        assert!(cp.tensor_id(2).is_cp_map(1e-9).unwrap());

        // Amplification acts blockwise: (phi (x) id)(a (x) b) = phi(a) (x) b.
        let a = rng.complex_matrix(2, 2);
        let b = rng.complex_matrix(2, 2);
        let lhs = phi.tensor_id(2).apply(&a.kron(&b)).unwrap();
        let rhs = phi.apply(&a).unwrap().kron(&b);
        assert!(lhs.dist(&rhs) < 1e-12);
    }

    #[test]
    fn kraus_roundtrip() {
        let mut rng = Rng::new(41);
        let phi = random_cp(&mut rng, 3, 2, 2);
        let ops = phi.kraus(1e-9).unwrap();
        let back = LinMap::from_kraus(3, 2, &ops).unwrap();
        assert!(back.dist(&phi) <= 1e-8 * phi.choi().frobenius_norm().max(1.0));
    }

    #[test]
    fn cb_norm_identity_is_one() {
        let cb = LinMap::identity(2).cb_norm(1e-6).unwrap();
        assert!((cb.value - 1.0).abs() < 1e-5, "cb = {}", cb.value);
        assert!(cb.psi1.is_cp_map(1e-7).unwrap());
        // Oracle lower bound acknowledges the same value.
        let lb = LinMap::identity(2).cb_norm_lower_bound(2, 5, 7);
        assert!(lb <= cb.value + 1e-5);
        assert!(lb > 1.0 - 1e-9);
    }

    #[test]
    fn cb_norm_transpose_is_two() {
        let cb = transpose_map(2).cb_norm(1e-6).unwrap();
        assert!((cb.value - 2.0).abs() < 1e-4, "cb = {}", cb.value);
        let lb = transpose_map(2).cb_norm_lower_bound(2, 40, 11);
        assert!(lb <= cb.value + 1e-5);
        assert!(lb >= 2.0 - 2e-3, "lower bound {}", lb);
    }

    #[test]
    fn cb_norm_of_cp_map_is_norm_at_identity() {
        let mut rng = Rng::new(43);
        for &(p, q) in &[(2usize, 2usize), (2, 3), (3, 2)] {
            let phi = random_cp(&mut rng, p, q, 2);
            let cb = phi.cb_norm(1e-6).unwrap();
            let at_one = linalg::operator_norm(&phi.apply(&ComplexMatrix::identity(p)).unwrap());
            assert!(
                (cb.value - at_one).abs() < 1e-5,
                "p={} q={}: {} vs {}",
                p,
                q,
                cb.value,
                at_one
            );
        }
    }

    #[test]
    fn cb_norm_absolute_homogeneity() {
        let mut rng = Rng::new(47);
        let phi = LinMap::new(2, 2, rng.complex_matrix(4, 4)).unwrap();
        let lam = Complex::new(-0.7, 0.4);
        let a = phi.scale(lam).cb_norm(1e-7).unwrap().value;
        let b = phi.cb_norm(1e-7).unwrap().value;
        assert!((a - lam.abs() * b).abs() < 1e-6, "{} vs {}", a, lam.abs() * b);
    }

    #[test]
    fn lower_bound_monotone_in_trials() {
        let phi = transpose_map(2);
        let a = phi.cb_norm_lower_bound(2, 3, 99);
        let b = phi.cb_norm_lower_bound(2, 10, 99);
        assert!(b >= a);
        assert_eq!(LinMap::zero(2, 2).cb_norm_lower_bound(2, 4, 1), 0.0);
    }
}
