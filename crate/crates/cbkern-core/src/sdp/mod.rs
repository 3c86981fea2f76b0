//! Dense semidefinite solver for Hermitian LMIs.
//!
//! A problem is a list of named Hermitian PSD variable blocks, affine
//! equality constraints over block entries (complex targets), and a linear
//! objective. Structured problems declare variables only where their support
//! pattern lives: every entry not pinned by an equality is a free Hermitian
//! unknown, so a caller building (say) a bimodule-patterned completion pins
//! the off-pattern entries to zero and lets the pattern cells float.
//!
//! `solve` eliminates the equalities exactly by substitution, embeds each
//! complex block into its real symmetric double, and runs the primal-dual
//! path-following iteration from [`ipm`]. Equalities therefore hold exactly
//! in the returned blocks; interior-point accuracy only affects positivity
//! margins and the objective.

mod ipm;
mod realmat;

use crate::complex::{self, Complex};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::ComplexMatrix;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use realmat::RealMat;

/// Default interior-point iteration budget.
pub const DEFAULT_MAX_ITER: usize = 200;

/// Solver exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIter,
    NumericalFailure,
}

/// One interior-point iteration record, for diagnostic emission.
#[derive(Clone, Copy, Debug)]
pub struct IterTrace {
    pub iteration: usize,
    pub mu: f64,
    pub rel_gap: f64,
    pub prim_inf: f64,
    pub dual_inf: f64,
    pub step_primal: f64,
    pub step_dual: f64,
}

/// Handle to a declared Hermitian PSD variable block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockId(pub usize);

/// One affine constraint: sum of coeff * X\[r,c\] over terms = target.
/// Entries below the diagonal are read as conjugates of their mirror.
#[derive(Clone, Debug)]
struct Equality {
    terms: Vec<(usize, usize, usize, Complex)>,
    target: Complex,
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    names: Vec<String>,
    sizes: Vec<usize>,
    equalities: Vec<Equality>,
    objective: Vec<(usize, usize, usize, Complex)>,
    /// Dual objective magnitude beyond which the problem is declared
    /// infeasible/unbounded rather than iterated further.
    pub divergence_bound: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// Solved assignment of every declared block, equalities satisfied exactly.
    pub blocks: Vec<ComplexMatrix>,
    pub objective_value: f64,
    pub status: SdpStatus,
    /// Relative duality gap at exit.
    pub gap: f64,
    pub iterations: usize,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    /// Per-iteration diagnostics of the interior-point run.
    pub trace: Vec<IterTrace>,
}

impl SdpSolution {
    pub fn block(&self, id: BlockId) -> &ComplexMatrix {
        &self.blocks[id.0]
    }

    pub fn require_optimal(&self) -> Result<()> {
        if self.status == SdpStatus::Optimal {
            Ok(())
        } else {
            Err(Error::Sdp {
                status: self.status,
                iterations: self.iterations,
                gap: self.gap,
            })
        }
    }
}

/// \[\[Re H, -Im H\], \[Im H, Re H\]\]: PSD iff H is, eigenvalues doubled.
pub fn embed_complex(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    h.check_hermitian(1e-12 * h.max_abs_entry().max(1.0))?;
    let n = h.rows();
    let mut out = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h.get(i, j);
            out.set(i, j, Complex::real(z.re));
            out.set(i + n, j + n, Complex::real(z.re));
            out.set(i, j + n, Complex::real(-z.im));
            out.set(i + n, j, Complex::real(z.im));
        }
    }
    Ok(out)
}

/// Affine expression over real parameters.
#[derive(Clone, Debug, Default)]
struct LinExpr {
    c: f64,
    terms: Vec<(usize, f64)>,
}

impl LinExpr {
    fn normalize(&mut self) {
        self.terms.sort_by_key(|t| t.0);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(self.terms.len());
        for &(p, w) in &self.terms {
            match out.last_mut() {
                Some(last) if last.0 == p => last.1 += w,
                _ => out.push((p, w)),
            }
        }
        out.retain(|&(_, w)| w != 0.0);
        self.terms = out;
    }
}

impl SdpProblem {
    pub fn new() -> Self {
        SdpProblem {
            names: Vec::new(),
            sizes: Vec::new(),
            equalities: Vec::new(),
            objective: Vec::new(),
            divergence_bound: 1e8,
        }
    }

    /// Declare a Hermitian PSD variable block.
    pub fn add_block(&mut self, name: &str, size: usize) -> BlockId {
        assert!(size >= 1, "blocks must be non-empty");
        self.names.push(String::from(name));
        self.sizes.push(size);
        BlockId(self.sizes.len() - 1)
    }

    fn check_entry(&self, blk: BlockId, r: usize, c: usize) {
        let s = self.sizes[blk.0];
        assert!(r < s && c < s, "entry ({}, {}) outside block of size {}", r, c, s);
    }

    /// Constrain a single entry: X\[r,c\] = value.
    pub fn pin(&mut self, blk: BlockId, r: usize, c: usize, value: Complex) {
        self.add_equality(&[(blk, r, c, complex::ONE)], value);
    }

    /// Add sum of coeff * X\[r,c\] = target.
    pub fn add_equality(&mut self, terms: &[(BlockId, usize, usize, Complex)], target: Complex) {
        for &(blk, r, c, _) in terms {
            self.check_entry(blk, r, c);
        }
        self.equalities.push(Equality {
            terms: terms.iter().map(|&(b, r, c, w)| (b.0, r, c, w)).collect(),
            target,
        });
    }

    /// Minimize Re of sum of coeff * X\[r,c\].
    pub fn set_objective(&mut self, terms: &[(BlockId, usize, usize, Complex)]) {
        for &(blk, r, c, _) in terms {
            self.check_entry(blk, r, c);
        }
        self.objective = terms.iter().map(|&(b, r, c, w)| (b.0, r, c, w)).collect();
    }

    /// Real parameter indices of entry (r, c), r <= c: (re, im or diag-None).
    fn param_of(&self, bases: &[usize], blk: usize, r: usize, c: usize) -> (usize, Option<usize>) {
        debug_assert!(r <= c);
        let s = self.sizes[blk];
        let row_start = 2 * r * s - r * r;
        let re = bases[blk]
            + row_start
            + if c == r { 0 } else { 1 + 2 * (c - r - 1) };
        let im = if c > r { Some(re + 1) } else { None };
        (re, im)
    }

    /// Expand one complex term coeff * X\[r,c\] into the two real rows.
    fn push_term(
        &self,
        bases: &[usize],
        blk: usize,
        r: usize,
        c: usize,
        coeff: Complex,
        re_row: &mut Vec<(usize, f64)>,
        im_row: &mut Vec<(usize, f64)>,
    ) {
        if r <= c {
            let (pa, pb) = self.param_of(bases, blk, r, c);
            re_row.push((pa, coeff.re));
            im_row.push((pa, coeff.im));
            if let Some(pb) = pb {
                re_row.push((pb, -coeff.im));
                im_row.push((pb, coeff.re));
            }
        } else {
            // X[r,c] = conj(X[c,r]) = a - i b.
            let (pa, pb) = self.param_of(bases, blk, c, r);
            re_row.push((pa, coeff.re));
            im_row.push((pa, coeff.im));
            let pb = pb.expect("off-diagonal");
            re_row.push((pb, coeff.im));
            im_row.push((pb, -coeff.re));
        }
    }

    pub fn solve(&self, eps: f64, max_iter: usize) -> SdpSolution {
        assert!(eps > 0.0, "eps must be positive");
        let nb = self.sizes.len();
        let mut bases = vec![0usize; nb];
        let mut total = 0usize;
        for (b, &s) in self.sizes.iter().enumerate() {
            bases[b] = total;
            total += s * s;
        }

        let infeasible = |iterations: usize| SdpSolution {
            blocks: self.sizes.iter().map(|&s| ComplexMatrix::zeros(s, s)).collect(),
            objective_value: f64::NAN,
            status: SdpStatus::Infeasible,
            gap: f64::INFINITY,
            iterations,
            primal_infeasibility: f64::INFINITY,
            dual_infeasibility: f64::INFINITY,
            trace: Vec::new(),
        };

        // Gather real rows from the complex equalities.
        let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::with_capacity(2 * self.equalities.len());
        for eq in &self.equalities {
            let mut re_row = Vec::with_capacity(2 * eq.terms.len());
            let mut im_row = Vec::with_capacity(2 * eq.terms.len());
            for &(blk, r, c, coeff) in &eq.terms {
                self.push_term(&bases, blk, r, c, coeff, &mut re_row, &mut im_row);
            }
            rows.push((re_row, eq.target.re));
            rows.push((im_row, eq.target.im));
        }

        // Exact elimination: each consistent row removes one parameter.
        let mut elim: Vec<Option<LinExpr>> = vec![None; total];
        let mut elim_order: Vec<usize> = Vec::new();
        for (terms, target) in rows {
            let mut expr = LinExpr {
                c: -target,
                terms,
            };
            // Substitute previously eliminated parameters until none remain.
            loop {
                expr.normalize();
                let hit = expr.terms.iter().position(|&(p, _)| elim[p].is_some());
                let Some(pos) = hit else { break };
                let (p, w) = expr.terms.swap_remove(pos);
                let sub = elim[p].as_ref().unwrap();
                expr.c += w * sub.c;
                for &(q, wq) in &sub.terms {
                    expr.terms.push((q, w * wq));
                }
            }
            let row_scale = expr
                .terms
                .iter()
                .fold(0.0f64, |m, &(_, w)| m.max(w.abs()));
            expr.terms.retain(|&(_, w)| w.abs() > 1e-14 * row_scale.max(1.0));
            if expr.terms.is_empty() {
                if expr.c.abs() > 1e-8 * (1.0 + target.abs()) {
                    return infeasible(0);
                }
                continue;
            }
            // Pivot: largest coefficient, ties to the highest parameter index.
            let (pos, _) = expr
                .terms
                .iter()
                .enumerate()
                .fold((0usize, (0.0f64, 0usize)), |acc, (i, &(p, w))| {
                    let key = (w.abs(), p);
                    if key.0 > acc.1 .0 || (key.0 == acc.1 .0 && key.1 > acc.1 .1) {
                        (i, key)
                    } else {
                        acc
                    }
                });
            let (pivot, wp) = expr.terms.swap_remove(pos);
            let inv = -1.0 / wp;
            let mut rest = LinExpr {
                c: expr.c * inv,
                terms: expr.terms.iter().map(|&(q, w)| (q, w * inv)).collect(),
            };
            rest.normalize();
            elim[pivot] = Some(rest);
            elim_order.push(pivot);
        }

        // Resolve eliminated parameters down to surviving ones. Expressions
        // only ever reference parameters eliminated later, so one reverse
        // sweep suffices.
        for idx in (0..elim_order.len()).rev() {
            let p = elim_order[idx];
            let mut expr = elim[p].take().unwrap();
            let mut out = LinExpr {
                c: expr.c,
                terms: Vec::with_capacity(expr.terms.len()),
            };
            for &(q, w) in &expr.terms {
                match &elim[q] {
                    Some(sub) => {
                        out.c += w * sub.c;
                        for &(r, wr) in &sub.terms {
                            out.terms.push((r, w * wr));
                        }
                    }
                    None => out.terms.push((q, w)),
                }
            }
            out.normalize();
            expr = out;
            elim[p] = Some(expr);
        }

        let mut col_of: Vec<usize> = vec![usize::MAX; total];
        let mut survivors: Vec<usize> = Vec::new();
        for p in 0..total {
            if elim[p].is_none() {
                col_of[p] = survivors.len();
                survivors.push(p);
            }
        }
        let m = survivors.len();

        // Complex constant part and per-variable sparse coefficients.
        let mut g0: Vec<ComplexMatrix> =
            self.sizes.iter().map(|&s| ComplexMatrix::zeros(s, s)).collect();
        let mut coeffs: Vec<Vec<(usize, usize, usize, Complex)>> = vec![Vec::new(); m];
        for blk in 0..nb {
            let s = self.sizes[blk];
            for r in 0..s {
                for c in r..s {
                    let (pa, pb) = self.param_of(&bases, blk, r, c);
                    let mut push_part = |p: usize, unit: Complex| {
                        match &elim[p] {
                            None => {
                                let j = col_of[p];
                                coeffs[j].push((blk, r, c, unit));
                                if c > r {
                                    coeffs[j].push((blk, c, r, unit.conj()));
                                }
                            }
                            Some(expr) => {
                                g0[blk].add_at(r, c, unit.scale(expr.c));
                                if c > r {
                                    g0[blk].add_at(c, r, unit.conj().scale(expr.c));
                                }
                                for &(q, w) in &expr.terms {
                                    let j = col_of[q];
                                    coeffs[j].push((blk, r, c, unit.scale(w)));
                                    if c > r {
                                        coeffs[j].push((blk, c, r, unit.conj().scale(w)));
                                    }
                                }
                            }
                        }
                    };
                    push_part(pa, complex::ONE);
                    if let Some(pb) = pb {
                        push_part(pb, complex::I);
                    }
                }
            }
        }

        // Objective d0 + sum d_j v_j.
        let mut d0 = 0.0f64;
        let mut d = vec![0.0f64; m];
        {
            let mut re_row = Vec::new();
            let mut im_row = Vec::new();
            for &(blk, r, c, coeff) in &self.objective {
                self.push_term(&bases, blk, r, c, coeff, &mut re_row, &mut im_row);
            }
            for (p, w) in re_row {
                match &elim[p] {
                    None => d[col_of[p]] += w,
                    Some(expr) => {
                        d0 += w * expr.c;
                        for &(q, wq) in &expr.terms {
                            d[col_of[q]] += w * wq;
                        }
                    }
                }
            }
        }

        // Blocks untouched by any variable are constants: check and drop.
        let mut active = vec![false; nb];
        for list in &coeffs {
            for &(blk, _, _, _) in list {
                active[blk] = true;
            }
        }
        for blk in 0..nb {
            if !active[blk] {
                let band = 1e-9 * g0[blk].max_abs_entry().max(1.0);
                match linalg::min_eigenvalue(&g0[blk]) {
                    Ok(lm) if lm >= -band => {}
                    _ => return infeasible(0),
                }
            }
        }

        let eval_blocks = |vals: &[f64]| -> Vec<ComplexMatrix> {
            let mut out = g0.clone();
            for (j, list) in coeffs.iter().enumerate() {
                for &(blk, r, c, unit) in list {
                    out[blk].add_at(r, c, unit.scale(vals[j]));
                }
            }
            out
        };

        if m == 0 {
            return SdpSolution {
                blocks: g0.clone(),
                objective_value: d0,
                status: SdpStatus::Optimal,
                gap: 0.0,
                iterations: 0,
                primal_infeasibility: 0.0,
                dual_infeasibility: 0.0,
                trace: Vec::new(),
            };
        }

        // Real embedding of the active blocks.
        let act_idx: Vec<usize> = (0..nb).filter(|&b| active[b]).collect();
        let mut real_of = vec![usize::MAX; nb];
        for (k, &b) in act_idx.iter().enumerate() {
            real_of[b] = k;
        }
        let block_sizes: Vec<usize> = act_idx.iter().map(|&b| 2 * self.sizes[b]).collect();
        let c_blocks: Vec<RealMat> = act_idx
            .iter()
            .map(|&b| {
                let s = self.sizes[b];
                let mut cm = RealMat::zeros(2 * s);
                for r in 0..s {
                    for c in 0..s {
                        let z = g0[b].get(r, c);
                        cm.set(r, c, z.re);
                        cm.set(r + s, c + s, z.re);
                        cm.set(r, c + s, -z.im);
                        cm.set(r + s, c, z.im);
                    }
                }
                cm
            })
            .collect();
        let a_entries: Vec<Vec<ipm::SparseEntry>> = coeffs
            .iter()
            .map(|list| {
                let mut out: Vec<ipm::SparseEntry> = Vec::with_capacity(4 * list.len());
                for &(blk, r, c, z) in list {
                    let s = self.sizes[blk];
                    let k = real_of[blk] as u32;
                    let (r, c) = (r as u32, c as u32);
                    let sn = s as u32;
                    if z.re != 0.0 {
                        out.push((k, r, c, z.re));
                        out.push((k, r + sn, c + sn, z.re));
                    }
                    if z.im != 0.0 {
                        out.push((k, r, c + sn, -z.im));
                        out.push((k, r + sn, c, z.im));
                    }
                }
                out
            })
            .collect();

        let input = ipm::IpmInput {
            block_sizes,
            c_blocks,
            a_entries,
            b: d.clone(),
            eps,
            max_iter,
            divergence_bound: self.divergence_bound,
        };
        let res = ipm::run(&input);

        let vals: Vec<f64> = res.y.iter().map(|&y| -y).collect();
        let blocks = eval_blocks(&vals);
        let objective_value = d0 + d.iter().zip(&vals).map(|(&a, &b)| a * b).sum::<f64>();

        SdpSolution {
            blocks,
            objective_value: if res.status == SdpStatus::Infeasible {
                f64::NAN
            } else {
                objective_value
            },
            status: res.status,
            gap: res.rel_gap,
            iterations: res.iterations,
            primal_infeasibility: res.prim_inf,
            dual_infeasibility: res.dual_inf,
            trace: res.trace,
        }
    }
}

impl Default for SdpProblem {
    fn default() -> Self {
        Self::new()
    }
}
