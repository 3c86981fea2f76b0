//! Infeasible-start primal-dual path-following on block-diagonal real
//! symmetric cones, Mehrotra predictor-corrector with the symmetrized
//! H..K..M scaling (the Monteiro-Zhang family member at P = Z^{1/2}).
//!
//! Standard form solved here: min <C, X> over X >= 0 with <A_j, X> = b_j,
//! whose dual is max b'y subject to Z = C - sum_j y_j A_j >= 0.
//!
//! Coefficient matrices A_j are sparse entry lists; the Schur complement is
//! assembled pairwise from those lists, which keeps the per-iteration cost at
//! O(m^2 K^2 + m^3/3 + sum n_b^3) for m variables and K entries per matrix.

use super::realmat::RealMat;
use super::SdpStatus;
use alloc::vec;
use alloc::vec::Vec;

/// One sparse coefficient entry: (block, row, col, value). Entry lists carry
/// the full symmetric expansion (both (r,c) and (c,r) present).
pub type SparseEntry = (u32, u32, u32, f64);

pub struct IpmInput {
    pub block_sizes: Vec<usize>,
    pub c_blocks: Vec<RealMat>,
    /// Per variable, the sparse symmetric coefficient matrix A_j.
    pub a_entries: Vec<Vec<SparseEntry>>,
    pub b: Vec<f64>,
    pub eps: f64,
    pub max_iter: usize,
    pub divergence_bound: f64,
}

pub struct IpmOutput {
    pub status: SdpStatus,
    pub y: Vec<f64>,
    pub pobj: f64,
    pub dobj: f64,
    pub rel_gap: f64,
    pub prim_inf: f64,
    pub dual_inf: f64,
    pub iterations: usize,
    pub trace: Vec<super::IterTrace>,
}

fn inner_sparse(entries: &[SparseEntry], blocks: &[RealMat]) -> f64 {
    entries
        .iter()
        .map(|&(bl, r, c, w)| w * blocks[bl as usize].get(r as usize, c as usize))
        .sum()
}

fn add_sparse(blocks: &mut [RealMat], entries: &[SparseEntry], s: f64) {
    for &(bl, r, c, w) in entries {
        blocks[bl as usize].add_at(r as usize, c as usize, s * w);
    }
}

/// Largest step alpha in (0, 1] keeping S + alpha dS positive definite,
/// located by bisection on Cholesky success.
fn max_step(s: &[RealMat], ds: &[RealMat]) -> f64 {
    let test = |alpha: f64| -> bool {
        s.iter().zip(ds).all(|(sb, db)| {
            let mut t = sb.clone();
            t.axpy(alpha, db);
            t.is_pd()
        })
    };
    if test(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..12 {
        let mid = 0.5 * (lo + hi);
        if test(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub fn run(input: &IpmInput) -> IpmOutput {
    let m = input.b.len();
    let nb = input.block_sizes.len();
    let nu: f64 = input.block_sizes.iter().sum::<usize>() as f64;

    let b_scale = input.b.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1.0);
    let c_scale = input
        .c_blocks
        .iter()
        .fold(0.0f64, |a, cb| a.max(cb.max_abs()))
        .max(1.0);

    let tau_p = 10.0 * b_scale;
    let tau_d = 10.0 * c_scale;
    let mut x: Vec<RealMat> = input
        .block_sizes
        .iter()
        .map(|&s| RealMat::identity_scaled(s, tau_p))
        .collect();
    let mut z: Vec<RealMat> = input
        .block_sizes
        .iter()
        .map(|&s| RealMat::identity_scaled(s, tau_d))
        .collect();
    let mut y = vec![0.0f64; m];

    let mut out = IpmOutput {
        status: SdpStatus::MaxIter,
        y: y.clone(),
        pobj: 0.0,
        dobj: 0.0,
        rel_gap: f64::INFINITY,
        prim_inf: f64::INFINITY,
        dual_inf: f64::INFINITY,
        iterations: 0,
        trace: Vec::new(),
    };

    let mut stall = 0usize;

    for iter in 0..input.max_iter {
        // Residuals and convergence measures.
        let pobj: f64 = input.c_blocks.iter().zip(&x).map(|(c, xb)| c.dot(xb)).sum();
        let dobj: f64 = input.b.iter().zip(&y).map(|(&bi, &yi)| bi * yi).sum();
        let rp: Vec<f64> = (0..m)
            .map(|j| input.b[j] - inner_sparse(&input.a_entries[j], &x))
            .collect();
        let mut rd: Vec<RealMat> = (0..nb)
            .map(|b| {
                let mut r = input.c_blocks[b].clone();
                r.axpy(-1.0, &z[b]);
                r
            })
            .collect();
        for j in 0..m {
            add_sparse(&mut rd, &input.a_entries[j], -y[j]);
        }

        let mu: f64 = x.iter().zip(&z).map(|(xb, zb)| xb.dot(zb)).sum::<f64>() / nu;
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let prim_inf = rp.iter().fold(0.0f64, |a, &r| a.max(r.abs())) / b_scale;
        let dual_inf = rd.iter().fold(0.0f64, |a, r| a.max(r.max_abs())) / c_scale;

        out.y = y.clone();
        out.pobj = pobj;
        out.dobj = dobj;
        out.rel_gap = rel_gap;
        out.prim_inf = prim_inf;
        out.dual_inf = dual_inf;
        out.iterations = iter;
        out.trace.push(super::IterTrace {
            iteration: iter,
            mu,
            rel_gap,
            prim_inf,
            dual_inf,
            step_primal: 0.0,
            step_dual: 0.0,
        });

        if rel_gap <= input.eps && prim_inf <= input.eps && dual_inf <= input.eps {
            out.status = SdpStatus::Optimal;
            return out;
        }
        if pobj < -input.divergence_bound {
            out.status = SdpStatus::Infeasible;
            return out;
        }
        if dobj > input.divergence_bound {
            out.status = SdpStatus::NumericalFailure;
            return out;
        }

        // Factor Z and invert.
        let mut zinv: Vec<RealMat> = Vec::with_capacity(nb);
        for zb in &z {
            match zb.cholesky(0.0) {
                Some(l) => zinv.push(RealMat::inverse_from_chol(&l)),
                None => {
                    out.status = SdpStatus::NumericalFailure;
                    return out;
                }
            }
        }

        // Schur complement M_ij = 1/2 tr(A_i (Zinv A_j X + X A_j Zinv)).
        let mut schur = RealMat::zeros(m);
        for i in 0..m {
            for j in i..m {
                let mut s = 0.0;
                for &(bli, a, bq, wi) in &input.a_entries[i] {
                    let (zb, xb) = (&zinv[bli as usize], &x[bli as usize]);
                    let (a, bq) = (a as usize, bq as usize);
                    for &(blj, cq, d, wj) in &input.a_entries[j] {
                        if blj != bli {
                            continue;
                        }
                        let (cq, d) = (cq as usize, d as usize);
                        s += wi
                            * wj
                            * 0.5
                            * (zb.get(bq, cq) * xb.get(d, a) + xb.get(bq, cq) * zb.get(d, a));
                    }
                }
                schur.set(i, j, s);
                schur.set(j, i, s);
            }
        }
        let schur_chol = match schur.cholesky(0.0).or_else(|| {
            let mut reg = schur.clone();
            let bump = 1e-12 * (reg.trace() / m.max(1) as f64).max(1e-30);
            for i in 0..m {
                reg.add_at(i, i, bump);
            }
            reg.cholesky(0.0)
        }) {
            Some(l) => l,
            None => {
                out.status = SdpStatus::NumericalFailure;
                return out;
            }
        };

        // sym(Zinv Rd X) enters both predictor and corrector right sides.
        let t_rd: Vec<RealMat> = (0..nb)
            .map(|b| {
                let mut v = zinv[b].mul(&rd[b]).mul(&x[b]);
                v.symmetrize();
                v
            })
            .collect();

        let solve_dir = |rhs: &[f64],
                         sigma_mu: f64,
                         extra: Option<&[RealMat]>|
         -> (Vec<f64>, Vec<RealMat>, Vec<RealMat>) {
            let mut dy = rhs.to_vec();
            RealMat::chol_solve(&schur_chol, &mut dy);
            // One round of iterative refinement on the Schur system.
            let mut resid = rhs.to_vec();
            for i in 0..m {
                let mut s = 0.0;
                for j in 0..m {
                    s += schur.get(i, j) * dy[j];
                }
                resid[i] -= s;
            }
            RealMat::chol_solve(&schur_chol, &mut resid);
            for (d, r) in dy.iter_mut().zip(&resid) {
                *d += r;
            }

            let mut dz: Vec<RealMat> = rd.clone();
            for j in 0..m {
                add_sparse(&mut dz, &input.a_entries[j], -dy[j]);
            }
            let dx: Vec<RealMat> = (0..nb)
                .map(|b| {
                    let mut v = zinv[b].mul(&dz[b]).mul(&x[b]);
                    v.symmetrize();
                    let mut d = RealMat::identity_scaled(x[b].n, 0.0);
                    d.axpy(sigma_mu, &zinv[b]);
                    d.axpy(-1.0, &x[b]);
                    d.axpy(-1.0, &v);
                    if let Some(e) = extra {
                        d.axpy(-1.0, &e[b]);
                    }
                    d
                })
                .collect();
            (dy, dz, dx)
        };

        // Predictor.
        let rhs_aff: Vec<f64> = (0..m)
            .map(|i| {
                rp[i]
                    + inner_sparse(&input.a_entries[i], &x)
                    + inner_sparse(&input.a_entries[i], &t_rd)
            })
            .collect();
        let (_dy_aff, dz_aff, dx_aff) = solve_dir(&rhs_aff, 0.0, None);

        let ap_aff = max_step(&x, &dx_aff);
        let ad_aff = max_step(&z, &dz_aff);
        let mu_aff = {
            let mut s = 0.0;
            for b in 0..nb {
                let mut xt = x[b].clone();
                xt.axpy(0.98 * ap_aff, &dx_aff[b]);
                let mut zt = z[b].clone();
                zt.axpy(0.98 * ad_aff, &dz_aff[b]);
                s += xt.dot(&zt);
            }
            (s / nu).max(0.0)
        };
        let ratio = if mu > 0.0 { mu_aff / mu } else { 0.0 };
        let sigma = (ratio * ratio * ratio).clamp(1e-10, 1.0);

        // Corrector with second-order term sym(Zinv dZ_aff dX_aff).
        let t2: Vec<RealMat> = (0..nb)
            .map(|b| {
                let mut v = zinv[b].mul(&dz_aff[b]).mul(&dx_aff[b]);
                v.symmetrize();
                v
            })
            .collect();
        let rhs_cor: Vec<f64> = (0..m)
            .map(|i| {
                rp[i]
                    + inner_sparse(&input.a_entries[i], &x)
                    + inner_sparse(&input.a_entries[i], &t_rd)
                    + inner_sparse(&input.a_entries[i], &t2)
                    - sigma * mu * inner_sparse(&input.a_entries[i], &zinv)
            })
            .collect();
        let (dy, dz, dx) = solve_dir(&rhs_cor, sigma * mu, Some(&t2));

        let ap = 0.98 * max_step(&x, &dx);
        let ad = 0.98 * max_step(&z, &dz);

        if ap < 1e-10 && ad < 1e-10 {
            stall += 1;
            if stall >= 3 {
                out.status = SdpStatus::NumericalFailure;
                return out;
            }
        } else {
            stall = 0;
        }

        for b in 0..nb {
            x[b].axpy(ap, &dx[b]);
            z[b].axpy(ad, &dz[b]);
        }
        for (yi, di) in y.iter_mut().zip(&dy) {
            *yi += ad * di;
        }
        if let Some(last) = out.trace.last_mut() {
            last.step_primal = ap;
            last.step_dual = ad;
        }
        out.iterations = iter + 1;
    }

    out.status = SdpStatus::MaxIter;
    out
}
