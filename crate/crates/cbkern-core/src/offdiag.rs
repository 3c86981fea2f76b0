//! The off-diagonal completion SDP for kernels.
//!
//! For a kernel k on n points, minimize t over completely positive kernels
//! L1, L2 with
//!
//! ```text
//! [[ Choi(S_L1), Choi(S_k) ], [ Choi(S_k)*, Choi(S_L2) ]] >= 0,   S_{L_i}(1) <= t I,
//! ```
//!
//! which is the Schur-operator completion problem with the completing maps
//! restricted to act entrywise. The PSD matrix above is the canonical shuffle
//! of the Choi matrix of the assembled 2x2 kernel map (the shuffle packs the
//! nonzero rows; the discarded rows are identically zero), so its positivity
//! is exactly complete positivity of the 2x2 kernel. The variable blocks are
//! declared only on the entrywise support pattern: off-pattern entries of the
//! diagonal quadrants are pinned to zero, and each on-pattern cell is the
//! Choi matrix of one kernel entry L_i(x_i, x_j).
//!
//! The optimal t is the completely bounded norm of S_k: restricting the
//! completion to entrywise maps does not raise the optimum, and any feasible
//! completion certifies ||S_k||_cb <= t.

use crate::complex;
use crate::error::Result;
use crate::kernel::Kernel;
use crate::linmap::LinMap;
use crate::matrix::ComplexMatrix;
use crate::sdp::SdpProblem;
use alloc::vec::Vec;

pub(crate) struct Completion {
    pub l1: Kernel,
    pub l2: Kernel,
    /// Optimal t = cb norm of the kernel's Schur operator.
    pub value: f64,
}

/// Split a Schur-Choi row index into (point, source, point, target) parts.
#[inline]
fn pattern_aligned(idx: usize, p: usize, q: usize, n: usize) -> bool {
    let nq = n * q;
    let outer = idx / nq;
    let inner = idx % nq;
    outer / p == inner / q
}

pub(crate) fn complete(k: &Kernel, eps: f64, max_iter: usize) -> Result<Completion> {
    let (n, p, q) = (k.n(), k.p(), k.q());
    let side = n * p * n * q;
    let schur_choi = k.schur_op().choi().clone();

    let mut prob = SdpProblem::new();
    let t = prob.add_block("t", 1);
    let core = prob.add_block("core", 2 * side);
    let cap1 = prob.add_block("cap1", n * q);
    let cap2 = prob.add_block("cap2", n * q);

    // Upper triangle of the core block: the corner quadrant is pinned to the
    // Choi matrix of S_k, diagonal quadrants are free exactly on the
    // entrywise support pattern.
    for r in 0..2 * side {
        for c in r..2 * side {
            match (r < side, c < side) {
                (true, false) => prob.pin(core, r, c, schur_choi.get(r, c - side)),
                (true, true) => {
                    if !(pattern_aligned(r, p, q, n) && pattern_aligned(c, p, q, n)) {
                        prob.pin(core, r, c, complex::ZERO);
                    }
                }
                (false, false) => {
                    if !(pattern_aligned(r - side, p, q, n) && pattern_aligned(c - side, p, q, n))
                    {
                        prob.pin(core, r, c, complex::ZERO);
                    }
                }
                (false, true) => unreachable!(),
            }
        }
    }

    // cap_k = t I - S_{L_k}(1). S_L(1) is block diagonal with blocks
    // sum_u Choi(L(x_j, x_j))[(u, w), (u, s)].
    let nq = n * q;
    for jw in 0..nq {
        for js in jw..nq {
            let (j1, w) = (jw / q, jw % q);
            let (j2, s) = (js / q, js % q);
            if j1 != j2 {
                prob.pin(cap1, jw, js, complex::ZERO);
                prob.pin(cap2, jw, js, complex::ZERO);
                continue;
            }
            let j = j1;
            let mut terms1 = Vec::with_capacity(p + 2);
            let mut terms2 = Vec::with_capacity(p + 2);
            terms1.push((cap1, jw, js, complex::ONE));
            terms2.push((cap2, jw, js, complex::ONE));
            for u in 0..p {
                let row = (j * p + u) * nq + j * q + w;
                let col = (j * p + u) * nq + j * q + s;
                terms1.push((core, row, col, complex::ONE));
                terms2.push((core, side + row, side + col, complex::ONE));
            }
            if jw == js {
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
    let extract = |offset: usize| -> Result<Kernel> {
        Kernel::from_fn(k.labels().to_vec(), p, q, |i, j| {
            let choi = ComplexMatrix::from_fn(p * q, p * q, |rc, cc| {
                let (u, w) = (rc / q, rc % q);
                let (v, s) = (cc / q, cc % q);
                big.get(
                    offset + (i * p + u) * nq + i * q + w,
                    offset + (j * p + v) * nq + j * q + s,
                )
            });
            LinMap::new(p, q, choi).expect("cell shape")
        })
    };
    let l1 = extract(0)?;
    let l2 = extract(side)?;
    Ok(Completion {
        l1,
        l2,
        value: sol.objective_value,
    })
}
