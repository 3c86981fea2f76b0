//! Kolmogorov decompositions of kernels as explicit matrix factorizations.
//!
//! The correspondence is concretized: the module is the space of d x q
//! complex matrices with d = p*m, right M_q-action by multiplication, left
//! action pi(a) = a (x) I_m, and B-valued inner product <u, v> = v* u (linear
//! in the first argument). A decomposition is then a contractive module map J
//! (a d x d matrix commuting with every a (x) I_m) together with one d x q
//! matrix iota(x) per point, reconstructing the kernel as
//!
//! ```text
//! k(x, y)[a] = (J iota(x))* (a (x) I_m) iota(y)
//! ```
//!
//! Positive decompositions (J = I) come from a Kraus factorization of the
//! Schur-operator Choi matrix; self-adjoint ones from differences of
//! completely positive kernels; general ones by combining the hermitian
//! decompositions of the real and imaginary parts with J_1 (+) -i J_2.

use crate::complex::{self, Complex};
use crate::error::{Error, Result};
use crate::kernel::{assemble_2x2, Kernel};
use crate::linalg;
use crate::linmap::LinMap;
use crate::matrix::ComplexMatrix;
use crate::offdiag;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct KolDecomp {
    labels: Vec<String>,
    p: usize,
    q: usize,
    /// Multiplicity: the module is the d x q matrices with d = p * m.
    m: usize,
    j: ComplexMatrix,
    iota: Vec<ComplexMatrix>,
}

impl KolDecomp {
    pub fn new(
        labels: Vec<String>,
        p: usize,
        q: usize,
        m: usize,
        j: ComplexMatrix,
        iota: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let d = p * m;
        if j.rows() != d || j.cols() != d {
            return Err(Error::Shape {
                expected: (d, d),
                got: (j.rows(), j.cols()),
            });
        }
        if iota.len() != labels.len() {
            return Err(Error::Mismatch("one iota matrix per label required"));
        }
        if iota.iter().any(|v| v.rows() != d || v.cols() != q) {
            return Err(Error::Mismatch("iota matrices must be d x q"));
        }
        Ok(KolDecomp {
            labels,
            p,
            q,
            m,
            j,
            iota,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.p * self.m
    }

    pub fn j(&self) -> &ComplexMatrix {
        &self.j
    }

    pub fn iota(&self, i: usize) -> &ComplexMatrix {
        &self.iota[i]
    }

    pub fn iotas(&self) -> &[ComplexMatrix] {
        &self.iota
    }

    /// The kernel (i, j) |-> a |-> (J iota_i)* (a (x) I_m) iota_j.
    pub fn reconstruct(&self) -> Kernel {
        let im = ComplexMatrix::identity(self.m);
        let jiota: Vec<ComplexMatrix> = self
            .iota
            .iter()
            .map(|v| self.j.mul(v).expect("module shapes"))
            .collect();
        Kernel::from_fn(self.labels.clone(), self.p, self.q, |i, jx| {
            LinMap::from_action(self.p, self.q, |a| {
                jiota[i]
                    .adjoint()
                    .mul(&a.kron(&im))
                    .unwrap()
                    .mul(&self.iota[jx])
                    .unwrap()
            })
            .expect("reconstruct shapes")
        })
        .expect("reconstruct kernel")
    }

    /// Commutation residual of J against the left action, maximized over
    /// matrix units a = E_{u,v}.
    pub fn module_map_residual(&self) -> f64 {
        let im = ComplexMatrix::identity(self.m);
        let mut worst = 0.0f64;
        for u in 0..self.p {
            for v in 0..self.p {
                let act = ComplexMatrix::matrix_unit(self.p, u, v).kron(&im);
                let lhs = self.j.mul(&act).unwrap();
                let rhs = act.mul(&self.j).unwrap();
                worst = worst.max(lhs.dist(&rhs));
            }
        }
        worst
    }
}

/// Interleave two decompositions on the same labels into the direct sum
/// module, with the second J scaled by `j2_scale`.
fn direct_sum(d1: &KolDecomp, d2: &KolDecomp, j2_scale: Complex) -> KolDecomp {
    let (p, q) = (d1.p, d1.q);
    let (m1, m2) = (d1.m, d2.m);
    let m = m1 + m2;
    let d = p * m;
    let mut j = ComplexMatrix::zeros(d, d);
    for u in 0..p {
        for v in 0..p {
            for s in 0..m1 {
                for t in 0..m1 {
                    j.set(u * m + s, v * m + t, d1.j.get(u * m1 + s, v * m1 + t));
                }
            }
            for s in 0..m2 {
                for t in 0..m2 {
                    j.set(
                        u * m + m1 + s,
                        v * m + m1 + t,
                        j2_scale * d2.j.get(u * m2 + s, v * m2 + t),
                    );
                }
            }
        }
    }
    let iota = (0..d1.labels.len())
        .map(|i| {
            ComplexMatrix::from_fn(d, q, |row, w| {
                let (u, s) = (row / m, row % m);
                if s < m1 {
                    d1.iota[i].get(u * m1 + s, w)
                } else {
                    d2.iota[i].get(u * m2 + (s - m1), w)
                }
            })
        })
        .collect();
    KolDecomp {
        labels: d1.labels.clone(),
        p,
        q,
        m,
        j,
        iota,
    }
}

/// Positive Kolmogorov decomposition (J = I) of a completely positive kernel
/// via Kraus extraction from the Schur-operator Choi matrix.
///
/// The multiplicity m is the numerical rank of that Choi matrix; a non-CP
/// input is rejected with its offending eigenvalue.
pub fn kolmogorov_positive(k: &Kernel, tol: f64) -> Result<KolDecomp> {
    let (n, p, q) = (k.n(), k.p(), k.q());
    let nq = n * q;
    let choi = k.schur_op().choi().clone();
    let f = linalg::psd_factor(&choi, tol)?;
    let m = f.rows();
    // iota(x_j)[(u, s), w] = F[s, (j p + u) nq + j q + w].
    let iota: Vec<ComplexMatrix> = (0..n)
        .map(|j| {
            ComplexMatrix::from_fn(p * m, q, |row, w| {
                let (u, s) = (row / m, row % m);
                f.get(s, (j * p + u) * nq + j * q + w)
            })
        })
        .collect();
    KolDecomp::new(
        k.labels().to_vec(),
        p,
        q,
        m,
        ComplexMatrix::identity(p * m),
        iota,
    )
}

/// Self-adjoint decomposition of k1 - k2 as the direct sum of the positive
/// decompositions with J = I (+) -I; J* = J and J^2 = I by construction.
pub fn difference_kolmogorov(k1: &Kernel, k2: &Kernel, tol: f64) -> Result<KolDecomp> {
    k1.check_compatible(k2)?;
    let d1 = kolmogorov_positive(k1, tol)?;
    let d2 = kolmogorov_positive(k2, tol)?;
    Ok(direct_sum(&d1, &d2, -complex::ONE))
}

/// Split a self-adjoint decomposition into two completely positive kernels
/// whose difference reconstructs it, via the Jordan parts of J.
pub fn decomp_to_difference(d: &KolDecomp, tol: f64) -> Result<(Kernel, Kernel)> {
    let dev = d.j.hermitian_deviation();
    if dev > tol {
        return Err(Error::NotHermitian { residual: dev });
    }
    let j_herm = d.j.add(&d.j.adjoint()).unwrap().scale_re(0.5);
    let (jp, jm) = linalg::jordan_split(&j_herm)?;
    let sp = linalg::psd_sqrt(&jp, 1e-8)?;
    let sm = linalg::psd_sqrt(&jm, 1e-8)?;
    let im = ComplexMatrix::identity(d.m);
    let side = |root: &ComplexMatrix| -> Result<Kernel> {
        let ri: Vec<ComplexMatrix> = d
            .iota
            .iter()
            .map(|v| root.mul(v).expect("root shapes"))
            .collect();
        Kernel::from_fn(d.labels.clone(), d.p, d.q, |i, jx| {
            LinMap::from_action(d.p, d.q, |a| {
                ri[i]
                    .adjoint()
                    .mul(&a.kron(&im))
                    .unwrap()
                    .mul(&ri[jx])
                    .unwrap()
            })
            .expect("difference shapes")
        })
    };
    Ok((side(&sp)?, side(&sm)?))
}

/// Minimize t over completely positive kernels L1, L2 making
/// \[\[L1, k\], \[k*, L2\]\] completely positive with S_{L_i}(1) <= t I.
/// The optimum equals the cb norm of the kernel.
pub fn offdiagonal_complete(k: &Kernel, eps: f64) -> Result<(Kernel, Kernel, f64)> {
    offdiagonal_complete_iter(k, eps, crate::sdp::DEFAULT_MAX_ITER)
}

/// `offdiagonal_complete` with an explicit solver iteration budget.
pub fn offdiagonal_complete_iter(
    k: &Kernel,
    eps: f64,
    max_iter: usize,
) -> Result<(Kernel, Kernel, f64)> {
    let c = offdiag::complete(k, eps, max_iter)?;
    Ok((c.l1, c.l2, c.value))
}

/// Hermitian completely positive split: k = first - second with both parts
/// completely positive. CP inputs split as (k, 0); otherwise the completion
/// diagonal is symmetrized and combined with k.
fn hermitian_cp_split(k: &Kernel, eps: f64, max_iter: usize) -> Result<(Kernel, Kernel)> {
    if k.is_cp_kernel(linalg::DEFAULT_TOL) {
        let zero = Kernel::zero(k.labels().to_vec(), k.p(), k.q())?;
        return Ok((k.clone(), zero));
    }
    let (l1, l2, _t) = offdiagonal_complete_iter(k, eps, max_iter)?;
    let l = l1.add(&l2)?.scale(Complex::real(0.5));
    // The swap-conjugation argument says the symmetrized diagonal stays
    // feasible; re-check it rather than trusting the argument.
    if !assemble_2x2(&l, k, &l)?.is_cp(1e-7)? {
        return Err(Error::Inconsistent(
            "symmetrized completion lost complete positivity",
        ));
    }
    let half = Complex::real(0.5);
    let k1 = l.add(k)?.scale(half);
    let k2 = l.sub(k)?.scale(half);
    Ok((k1, k2))
}

/// Self-adjoint Kolmogorov decomposition of a hermitian kernel. CP kernels
/// take the positive route (J = I); otherwise k is split through the
/// off-diagonal completion and decomposed as a difference.
pub fn kolmogorov_hermitian(k: &Kernel, eps: f64) -> Result<KolDecomp> {
    kolmogorov_hermitian_iter(k, eps, crate::sdp::DEFAULT_MAX_ITER)
}

/// `kolmogorov_hermitian` with an explicit solver iteration budget.
pub fn kolmogorov_hermitian_iter(k: &Kernel, eps: f64, max_iter: usize) -> Result<KolDecomp> {
    let dev = k.dist(&k.involution());
    if dev > eps.max(1e-10) {
        return Err(Error::NotHermitian { residual: dev });
    }
    if k.is_cp_kernel(linalg::DEFAULT_TOL) {
        return kolmogorov_positive(k, linalg::DEFAULT_TOL);
    }
    let (k1, k2) = hermitian_cp_split(k, eps, max_iter)?;
    difference_kolmogorov(&k1, &k2, 1e-8)
}

/// Kolmogorov decomposition of an arbitrary kernel: hermitian decompositions
/// of Re k and Im k glued with J = J_1 (+) -i J_2; J is contractive and the
/// reconstruction returns k.
pub fn kolmogorov_general(k: &Kernel, eps: f64) -> Result<KolDecomp> {
    kolmogorov_general_iter(k, eps, crate::sdp::DEFAULT_MAX_ITER)
}

/// `kolmogorov_general` with an explicit solver iteration budget.
pub fn kolmogorov_general_iter(k: &Kernel, eps: f64, max_iter: usize) -> Result<KolDecomp> {
    let (re, im) = k.re_im();
    let scale = 1.0 + k.max_entry_norm();
    if im.max_entry_norm() <= 1e-12 * scale {
        return kolmogorov_hermitian_iter(&re, eps, max_iter);
    }
    if re.max_entry_norm() <= 1e-12 * scale {
        let d2 = kolmogorov_hermitian_iter(&im, eps, max_iter)?;
        let j = d2.j.scale(-complex::I);
        return KolDecomp::new(d2.labels.clone(), d2.p, d2.q, d2.m, j, d2.iota.clone());
    }
    let d1 = kolmogorov_hermitian_iter(&re, eps, max_iter)?;
    let d2 = kolmogorov_hermitian_iter(&im, eps, max_iter)?;
    Ok(direct_sum(&d1, &d2, -complex::I))
}

/// k = (c1 - c2) + i (c3 - c4) with all four parts completely positive.
pub fn four_cp(k: &Kernel, eps: f64) -> Result<(Kernel, Kernel, Kernel, Kernel)> {
    four_cp_iter(k, eps, crate::sdp::DEFAULT_MAX_ITER)
}

/// `four_cp` with an explicit solver iteration budget.
pub fn four_cp_iter(
    k: &Kernel,
    eps: f64,
    max_iter: usize,
) -> Result<(Kernel, Kernel, Kernel, Kernel)> {
    let (re, im) = k.re_im();
    let (c1, c2) = hermitian_cp_split(&re, eps, max_iter)?;
    let (c3, c4) = hermitian_cp_split(&im, eps, max_iter)?;
    Ok((c1, c2, c3, c4))
}

/// Observed properties of a decomposition against a target kernel.
#[derive(Clone, Debug)]
pub struct DecompReport {
    pub reconstruction_residual: f64,
    pub reconstructs: bool,
    pub j_norm: f64,
    pub j_contractive: bool,
    pub module_residual: f64,
    pub j_module_map: bool,
    pub selfadjoint_residual: f64,
    pub j_selfadjoint: bool,
    pub j_min_eigenvalue: f64,
    pub j_psd: bool,
    /// J >= 0 implies the reconstruction is a completely positive kernel.
    pub cp_if_psd_consistent: bool,
    /// Reconstruction hermitian exactly when J is self-adjoint.
    pub hermitian_iff_selfadjoint: bool,
}

impl DecompReport {
    /// The decomposition-shape facts alone (not the class biconditionals).
    pub fn is_valid_decomposition(&self) -> bool {
        self.reconstructs && self.j_contractive && self.j_module_map
    }
}

pub fn verify_decomp(d: &KolDecomp, k: &Kernel, tol: f64) -> Result<DecompReport> {
    let rec = d.reconstruct();
    rec.check_compatible(k)?;
    let reconstruction_residual = rec.dist(k);
    let j_norm = linalg::operator_norm(&d.j);
    let module_residual = d.module_map_residual();
    let selfadjoint_residual = d.j.hermitian_deviation();
    let j_selfadjoint = selfadjoint_residual <= tol;
    let j_min_eigenvalue = if d.d() == 0 {
        0.0
    } else if j_selfadjoint {
        let herm = d.j.add(&d.j.adjoint()).unwrap().scale_re(0.5);
        linalg::min_eigenvalue(&herm)?
    } else {
        f64::NEG_INFINITY
    };
    let j_psd = j_selfadjoint && j_min_eigenvalue >= -tol;
    let band = tol.max(1e-9);
    let rec_hermitian = rec.is_hermitian(band * (1.0 + rec.max_entry_norm()));
    let cp_if_psd_consistent = !j_psd || rec.is_cp_kernel(band * 10.0);
    Ok(DecompReport {
        reconstruction_residual,
        reconstructs: reconstruction_residual <= tol,
        j_norm,
        j_contractive: j_norm <= 1.0 + tol,
        module_residual,
        j_module_map: module_residual <= tol.max(1e-9) * (1.0 + j_norm),
        selfadjoint_residual,
        j_selfadjoint,
        j_min_eigenvalue,
        j_psd,
        cp_if_psd_consistent,
        hermitian_iff_selfadjoint: rec_hermitian == j_selfadjoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::I;
    use crate::kernel::{kernel_from_gram, labels, random_cp_kernel, random_kernel};
    use crate::rng::Rng;

    #[test]
    fn reconstruct_scalar_gram() {
        // m = 1, J = I, p = q = 1: k(x_i, x_j) = conj(f_i) f_j.
        let f = [Complex::new(1.0, 2.0), Complex::new(-0.5, 0.25)];
        let iota: Vec<ComplexMatrix> = f
            .iter()
            .map(|&z| ComplexMatrix::from_fn(1, 1, |_, _| z))
            .collect();
        let d = KolDecomp::new(labels(2), 1, 1, 1, ComplexMatrix::identity(1), iota).unwrap();
        let k = d.reconstruct();
        for i in 0..2 {
            for j in 0..2 {
                let got = k.get(i, j).choi().get(0, 0);
                let want = f[i].conj() * f[j];
                assert!((got - want).abs() < 1e-14);
            }
        }
        assert!(k.is_cp_kernel(1e-12));

        let dz = KolDecomp::new(
            labels(2),
            1,
            1,
            1,
            ComplexMatrix::zeros(1, 1),
            (0..2).map(|_| ComplexMatrix::identity(1)).collect(),
        )
        .unwrap();
        assert!(dz.reconstruct().max_entry_norm() < 1e-15);
    }

    #[test]
    fn positive_roundtrip_random() {
        let mut rng = Rng::new(51);
        for &(n, p, q, m) in &[(1usize, 2usize, 2usize, 1usize), (2, 2, 2, 2), (3, 2, 1, 2)] {
            let k = random_cp_kernel(&mut rng, n, p, q, m);
            let d = kolmogorov_positive(&k, 1e-9).unwrap();
            assert!(d.reconstruct().dist(&k) <= 1e-8, "n={} p={} q={}", n, p, q);
            assert!(d.module_map_residual() < 1e-12);
        }
    }

    #[test]
    fn positive_of_zero_kernel_is_empty() {
        let k = Kernel::zero(labels(2), 2, 2).unwrap();
        let d = kolmogorov_positive(&k, 1e-9).unwrap();
        assert_eq!(d.m(), 0);
        assert!(d.reconstruct().dist(&k) < 1e-15);
    }

    #[test]
    fn positive_of_identity_point() {
        // One point, k(x,x) = id on M_2: multiplicity 1 and unitary iota.
        let k = Kernel::from_fn(labels(1), 2, 2, |_, _| LinMap::identity(2)).unwrap();
        let d = kolmogorov_positive(&k, 1e-9).unwrap();
        assert_eq!(d.m(), 1);
        let v = d.iota(0);
        let vv = v.adjoint().mul(v).unwrap();
        assert!(vv.dist(&ComplexMatrix::identity(2)) < 1e-10);
    }

    #[test]
    fn positive_rejects_non_cp() {
        let ind = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let k = Kernel::scalar(labels(2), &ind).unwrap();
        match kolmogorov_positive(&k, 1e-9) {
            Err(Error::NotPsd { eigenvalue }) => assert!((eigenvalue + 1.0).abs() < 1e-9),
            other => panic!("expected NotPsd, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn difference_and_back() {
        let mut rng = Rng::new(53);
        let k1 = random_cp_kernel(&mut rng, 2, 2, 2, 2);
        let k2 = random_cp_kernel(&mut rng, 2, 2, 2, 1);
        let d = difference_kolmogorov(&k1, &k2, 1e-9).unwrap();
        let target = k1.sub(&k2).unwrap();
        assert!(d.reconstruct().dist(&target) <= 1e-8);
        assert!(d.j.hermitian_deviation() < 1e-15);
        let jj = d.j.mul(&d.j).unwrap();
        assert!(jj.dist(&ComplexMatrix::identity(d.d())) < 1e-12);

        let (h1, h2) = decomp_to_difference(&d, 1e-9).unwrap();
        assert!(h1.is_cp_kernel(1e-8) && h2.is_cp_kernel(1e-8));
        assert!(h1.sub(&h2).unwrap().dist(&target) <= 1e-8);

        // k2 = 0 reduces to the positive decomposition.
        let z = Kernel::zero(k1.labels().to_vec(), 2, 2).unwrap();
        let d = difference_kolmogorov(&k1, &z, 1e-9).unwrap();
        assert!(d.reconstruct().dist(&k1) <= 1e-8);

        // k1 = k2 reconstructs zero though J is nonzero.
        let d = difference_kolmogorov(&k1, &k1, 1e-9).unwrap();
        assert!(d.reconstruct().dist(&z) <= 1e-8);
        assert!(d.j.frobenius_norm() > 0.5);
    }

    #[test]
    fn decomp_to_difference_identity_cases() {
        let mut rng = Rng::new(59);
        let k = random_cp_kernel(&mut rng, 2, 2, 2, 2);
        let d = kolmogorov_positive(&k, 1e-9).unwrap();
        let (h1, h2) = decomp_to_difference(&d, 1e-9).unwrap();
        assert!(h1.dist(&k) <= 1e-8);
        assert!(h2.max_entry_norm() < 1e-10);

        // J = -I: everything moves to the negative part.
        let dm = KolDecomp::new(
            d.labels().to_vec(),
            d.p(),
            d.q(),
            d.m(),
            ComplexMatrix::identity(d.d()).scale_re(-1.0),
            d.iotas().to_vec(),
        )
        .unwrap();
        let (h1, h2) = decomp_to_difference(&dm, 1e-9).unwrap();
        assert!(h1.max_entry_norm() < 1e-10);
        assert!(h2.dist(&k) <= 1e-8);

        // Non-self-adjoint J is rejected.
        let mut bad = ComplexMatrix::identity(d.d());
        bad.set(0, 1, I);
        let db = KolDecomp::new(
            d.labels().to_vec(),
            d.p(),
            d.q(),
            d.m(),
            bad,
            d.iotas().to_vec(),
        )
        .unwrap();
        assert!(matches!(
            decomp_to_difference(&db, 1e-9),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn offdiagonal_complete_examples() {
        let mut rng = Rng::new(61);
        // CP kernel: L1 = L2 = k is feasible, so t <= ||S_k(1)||.
        let k = random_cp_kernel(&mut rng, 2, 2, 2, 1);
        let feas = assemble_2x2(&k, &k, &k).unwrap();
        assert!(feas.is_cp(1e-8).unwrap());
        let (l1, l2, t) = offdiagonal_complete(&k, 1e-6).unwrap();
        let at_one = linalg::operator_norm(
            &k.schur_op()
                .apply(&ComplexMatrix::identity(2 * 2))
                .unwrap(),
        );
        assert!(t <= at_one + 1e-5, "t = {} vs feasible {}", t, at_one);
        assert!(l1.is_cp_kernel(1e-7) && l2.is_cp_kernel(1e-7));
        assert!(assemble_2x2(&l1, &k, &l2).unwrap().is_cp(1e-7).unwrap());

        // Zero kernel completes at zero.
        let z = Kernel::zero(labels(2), 2, 2).unwrap();
        let (_, _, t) = offdiagonal_complete(&z, 1e-6).unwrap();
        assert!(t.abs() < 1e-6);

        // Scalar [[0,1],[1,0]]: t = 1 with identity diagonals feasible.
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let k = Kernel::scalar(labels(2), &x).unwrap();
        let (l1, l2, t) = offdiagonal_complete(&k, 1e-7).unwrap();
        assert!((t - 1.0).abs() < 1e-5, "t = {}", t);
        let eye = Kernel::scalar(labels(2), &ComplexMatrix::identity(2)).unwrap();
        assert!(l1.dist(&eye) < 1e-3 && l2.dist(&eye) < 1e-3);
    }

    #[test]
    fn hermitian_decomposition_roundtrip() {
        let mut rng = Rng::new(67);
        // CP input defers to the positive route.
        let cp = random_cp_kernel(&mut rng, 2, 2, 2, 2);
        let d = kolmogorov_hermitian(&cp, 1e-6).unwrap();
        assert!(d.j().dist(&ComplexMatrix::identity(d.d())) < 1e-12);
        assert!(d.reconstruct().dist(&cp) <= 1e-8);

        // Generic hermitian difference.
        let k = random_cp_kernel(&mut rng, 2, 2, 2, 2)
            .sub(&random_cp_kernel(&mut rng, 2, 2, 2, 2))
            .unwrap();
        let d = kolmogorov_hermitian(&k, 1e-6).unwrap();
        assert!(d.reconstruct().dist(&k) <= 1e-6);
        assert!(d.j().hermitian_deviation() < 1e-12);
        let jj = d.j().mul(d.j()).unwrap();
        assert!(jj.dist(&ComplexMatrix::identity(d.d())) < 1e-10);

        // Negated CP kernel.
        let neg = random_cp_kernel(&mut rng, 2, 2, 2, 1).scale(Complex::real(-1.0));
        let d = kolmogorov_hermitian(&neg, 1e-6).unwrap();
        assert!(d.reconstruct().dist(&neg) <= 1e-6);

        // Scalar diag(1, -1) splits into the two Jordan pieces: the optimal
        // completion diagonal is the identity, so the recovered CP pair is
        // diag(1, 0) and diag(0, 1).
        let k = Kernel::scalar(labels(2), &ComplexMatrix::diag_real(&[1.0, -1.0])).unwrap();
        let d = kolmogorov_hermitian(&k, 1e-7).unwrap();
        assert!(d.reconstruct().dist(&k) <= 1e-7);
        let (h1, h2) = decomp_to_difference(&d, 1e-9).unwrap();
        let plus = Kernel::scalar(labels(2), &ComplexMatrix::diag_real(&[1.0, 0.0])).unwrap();
        let minus = Kernel::scalar(labels(2), &ComplexMatrix::diag_real(&[0.0, 1.0])).unwrap();
        assert!(h1.dist(&plus) < 1e-3, "{:?}", h1.scalar_matrix());
        assert!(h2.dist(&minus) < 1e-3);

        // Non-hermitian input rejected.
        let g = random_kernel(&mut rng, 2, 2, 2);
        assert!(matches!(
            kolmogorov_hermitian(&g, 1e-6),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn general_decomposition_and_contractivity() {
        let mut rng = Rng::new(71);
        // Purely imaginary CP multiple: J = -i I on the module of h.
        let h = random_cp_kernel(&mut rng, 2, 2, 2, 1);
        let k = h.scale(I);
        let d = kolmogorov_general(&k, 1e-6).unwrap();
        let want = ComplexMatrix::identity(d.d()).scale(-I);
        assert!(d.j().dist(&want) < 1e-10);
        assert!(d.reconstruct().dist(&k) <= 1e-6);

        // Random kernel: reconstruct within 1e-6, J contractive module map.
        let k = random_kernel(&mut rng, 2, 2, 2);
        let d = kolmogorov_general(&k, 1e-6).unwrap();
        assert!(d.reconstruct().dist(&k) <= 1e-6);
        assert!(linalg::operator_norm(d.j()) <= 1.0 + 1e-9);
        assert!(d.module_map_residual() <= 1e-8);
    }

    #[test]
    fn four_cp_reconstruction() {
        let mut rng = Rng::new(73);
        let k = random_kernel(&mut rng, 2, 2, 2);
        let (c1, c2, c3, c4) = four_cp(&k, 1e-6).unwrap();
        for c in [&c1, &c2, &c3, &c4] {
            assert!(c.is_cp_kernel(1e-7));
        }
        let back = c1
            .sub(&c2)
            .unwrap()
            .add(&c3.sub(&c4).unwrap().scale(I))
            .unwrap();
        assert!(back.dist(&k) <= 1e-6);

        // CP input comes back as (k, 0, 0, 0).
        let cp = random_cp_kernel(&mut rng, 2, 2, 2, 1);
        let (c1, c2, c3, c4) = four_cp(&cp, 1e-6).unwrap();
        assert!(c1.dist(&cp) < 1e-10);
        for c in [&c2, &c3, &c4] {
            assert!(c.max_entry_norm() < 1e-10);
        }

        // i times CP: weight moves to the third slot.
        let (c1, c2, c3, c4) = four_cp(&cp.scale(I), 1e-6).unwrap();
        assert!(c1.max_entry_norm() < 1e-10 && c2.max_entry_norm() < 1e-10);
        assert!(c3.dist(&cp) < 1e-10 && c4.max_entry_norm() < 1e-10);
    }

    #[test]
    fn verify_decomp_reports() {
        let mut rng = Rng::new(79);
        let k = random_cp_kernel(&mut rng, 2, 2, 2, 2);
        let d = kolmogorov_positive(&k, 1e-9).unwrap();
        let rep = verify_decomp(&d, &k, 1e-8).unwrap();
        assert!(rep.is_valid_decomposition());
        assert!(rep.j_selfadjoint && rep.j_psd);
        assert!(rep.cp_if_psd_consistent && rep.hermitian_iff_selfadjoint);

        // Hermitian non-CP: self-adjoint J that is not PSD.
        let k = random_cp_kernel(&mut rng, 2, 2, 2, 2)
            .sub(&random_cp_kernel(&mut rng, 2, 2, 2, 2))
            .unwrap();
        let d = kolmogorov_hermitian(&k, 1e-6).unwrap();
        let rep = verify_decomp(&d, &k, 1e-6).unwrap();
        assert!(rep.is_valid_decomposition());
        assert!(rep.j_selfadjoint && !rep.j_psd);
        assert!(rep.hermitian_iff_selfadjoint);

        // Hand-built decomposition with an expansive J.
        let iota = (0..2).map(|_| rng.complex_matrix(4, 2)).collect();
        let d = KolDecomp::new(
            labels(2),
            2,
            2,
            2,
            ComplexMatrix::identity(4).scale_re(2.0),
            iota,
        )
        .unwrap();
        let rep = verify_decomp(&d, &d.reconstruct(), 1e-8).unwrap();
        assert!(!rep.j_contractive);
        assert!((rep.j_norm - 2.0).abs() < 1e-9);
    }

    #[test]
    fn hermitian_iff_selfadjoint_on_spanning_modules() {
        let mut rng = Rng::new(83);
        for trial in 0..6 {
            let (p, q, m, n) = (2usize, 2usize, 2usize, 3usize);
            // Well-spread iota: identity-based frame plus noise.
            let iotas: Vec<ComplexMatrix> = (0..n)
                .map(|i| {
                    let mut base = ComplexMatrix::zeros(p * m, q);
                    for r in 0..q {
                        base.set((r + i) % (p * m), r, complex::ONE);
                    }
                    base.add(&rng.complex_matrix(p * m, q).scale_re(0.3)).unwrap()
                })
                .collect();
            let jm = {
                let h = rng.hermitian(m);
                let nrm = linalg::operator_norm(&h).max(1.0);
                h.scale_re(0.9 / nrm)
            };
            let selfadjoint = trial % 2 == 0;
            let jm = if selfadjoint {
                jm
            } else {
                let s = rng.hermitian(m);
                let nrm = linalg::operator_norm(&s).max(1.0);
                jm.scale_re(0.5)
                    .add(&s.scale(Complex::new(0.0, 0.4 / nrm)))
                    .unwrap()
            };
            let j = ComplexMatrix::identity(p).kron(&jm);
            let d = KolDecomp::new(labels(n), p, q, m, j, iotas).unwrap();
            let rec = d.reconstruct();
            let hermitian = rec.is_hermitian(1e-9);
            assert_eq!(
                hermitian,
                d.j().hermitian_deviation() <= 1e-9,
                "trial {}",
                trial
            );
            // Gram-form kernels with J = I are always CP.
            if trial == 0 {
                let gram = kernel_from_gram(labels(n), p, q, m, d.iotas());
                assert!(gram.is_cp_kernel(1e-8));
            }
        }
    }
}
