//! Restrictions, padded kernels, pair completions, the canonical completion
//! L0, its cb-norm radius, and the local-solution compatibility predicate
//! across nested finite subsets.
//!
//! Every pair of points {x, y} gets one completion kernel L_(x,y): the Gram
//! kernel (J dropped) of a Kolmogorov decomposition of the pair kernel of k
//! at {x, y}, padded by zero to the full label set. The canonical completion
//! restricted to a subset F is
//!
//! ```text
//! L0|_F = restrict( 1/2 [ sum_{(x,y)} L_(x,y) + sum_x L_(x,x) ], F )
//! ```
//!
//! where the sums run over the full (finite) ground set. Summing over the
//! ground set rather than over F x F is what makes hereditarity
//! L0_F|_{G x G} = L0_G hold exactly: cross pairs (x in G, y outside) carry
//! nonzero diagonal mass at x, so the F x F sums of different subsets
//! genuinely differ on common points. The pair completions are cached per
//! unordered pair, so all of this is reproducible and restriction-exact.

use crate::decomp::{kolmogorov_general_iter, kolmogorov_positive, KolDecomp};
use crate::error::{Error, Result};
use crate::kernel::{assemble_2x2, Kernel};
use crate::linalg;
use crate::linmap::LinMap;
use crate::matrix::ComplexMatrix;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

/// Strictly increasing subsets of a ground ordering.
#[derive(Clone, Debug)]
pub struct SubsetChain {
    ground: Vec<String>,
    chain: Vec<Vec<String>>,
}

impl SubsetChain {
    /// Subsets are normalized to the ground order; inclusions must be strict.
    pub fn new(ground: Vec<String>, chain: Vec<Vec<String>>) -> Result<Self> {
        for i in 0..ground.len() {
            for j in i + 1..ground.len() {
                if ground[i] == ground[j] {
                    return Err(Error::Mismatch("ground labels must be distinct"));
                }
            }
        }
        let mut normalized: Vec<Vec<String>> = Vec::with_capacity(chain.len());
        for subset in &chain {
            let mut idx: Vec<usize> = Vec::with_capacity(subset.len());
            for l in subset {
                let i = ground
                    .iter()
                    .position(|g| g == l)
                    .ok_or_else(|| Error::UnknownLabel(l.clone()))?;
                if idx.contains(&i) {
                    return Err(Error::Mismatch("subset labels must be distinct"));
                }
                idx.push(i);
            }
            idx.sort_unstable();
            normalized.push(idx.iter().map(|&i| ground[i].clone()).collect());
        }
        for w in normalized.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.len() >= b.len() || !a.iter().all(|l| b.contains(l)) {
                return Err(Error::Mismatch("chain subsets must strictly increase"));
            }
        }
        Ok(SubsetChain {
            ground,
            chain: normalized,
        })
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn levels(&self) -> &[Vec<String>] {
        &self.chain
    }

    pub fn top(&self) -> &[String] {
        self.chain.last().map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// A candidate local solution (L1, L2) on some subset.
#[derive(Clone, Debug)]
pub struct LocalPair {
    pub l1: Kernel,
    pub l2: Kernel,
}

impl LocalPair {
    pub fn new(l1: Kernel, l2: Kernel) -> Result<Self> {
        l1.check_compatible(&l2)?;
        Ok(LocalPair { l1, l2 })
    }
}

/// Entries copied at G x G, ordering inherited from the kernel's labels.
pub fn restrict(k: &Kernel, subset: &[String]) -> Result<Kernel> {
    let mut idx: Vec<usize> = Vec::with_capacity(subset.len());
    for l in subset {
        let i = k
            .index_of(l)
            .ok_or_else(|| Error::UnknownLabel(l.clone()))?;
        if idx.contains(&i) {
            return Err(Error::Mismatch("restriction labels must be distinct"));
        }
        idx.push(i);
    }
    idx.sort_unstable();
    let labels: Vec<String> = idx.iter().map(|&i| k.labels()[i].clone()).collect();
    Kernel::from_fn(labels, k.p(), k.q(), |a, b| k.get(idx[a], idx[b]).clone())
}

/// Zero off F x F, original entries on it.
pub fn pad(k_f: &Kernel, x_labels: &[String]) -> Result<Kernel> {
    for l in k_f.labels() {
        if !x_labels.contains(l) {
            return Err(Error::UnknownLabel(l.clone()));
        }
    }
    let pos: Vec<Option<usize>> = x_labels.iter().map(|l| k_f.index_of(l)).collect();
    Kernel::from_fn(x_labels.to_vec(), k_f.p(), k_f.q(), |i, j| {
        match (pos[i], pos[j]) {
            (Some(a), Some(b)) => k_f.get(a, b).clone(),
            _ => LinMap::zero(k_f.p(), k_f.q()),
        }
    })
}

/// The kernel supported on the pair {x, y} alone: equal to k at (x, y) and
/// (y, x) when x != y, and to k at (x, x) for x = y; zero elsewhere.
/// Symmetric in its arguments.
pub fn pair_kernel(k: &Kernel, x: &str, y: &str) -> Result<Kernel> {
    let ix = k
        .index_of(x)
        .ok_or_else(|| Error::UnknownLabel(String::from(x)))?;
    let iy = k
        .index_of(y)
        .ok_or_else(|| Error::UnknownLabel(String::from(y)))?;
    Kernel::from_fn(k.labels().to_vec(), k.p(), k.q(), |i, j| {
        let keep = if ix == iy {
            i == ix && j == ix
        } else {
            (i == ix && j == iy) || (i == iy && j == ix)
        };
        if keep {
            k.get(i, j).clone()
        } else {
            LinMap::zero(k.p(), k.q())
        }
    })
}

/// The Gram kernel of a decomposition: J dropped, entries
/// iota(x)* (a (x) I_m) iota(y). Completely positive by construction.
fn gram_kernel(d: &KolDecomp) -> Kernel {
    let im = ComplexMatrix::identity(d.m());
    Kernel::from_fn(d.labels().to_vec(), d.p(), d.q(), |i, j| {
        LinMap::from_action(d.p(), d.q(), |a| {
            d.iota(i)
                .adjoint()
                .mul(&a.kron(&im))
                .unwrap()
                .mul(d.iota(j))
                .unwrap()
        })
        .expect("gram shapes")
    })
    .expect("gram kernel")
}

/// Pair-completion cache for one kernel: completions are computed once per
/// unordered pair and reused by every derived object, which keeps the
/// canonical completion hereditary under restriction, bit for bit.
pub struct CompletionCache {
    kernel: Kernel,
    eps: f64,
    max_iter: usize,
    pairs: BTreeMap<(usize, usize), Kernel>,
    global_l0: Option<Kernel>,
    radii: BTreeMap<Vec<usize>, f64>,
}

impl CompletionCache {
    pub fn new(kernel: Kernel, eps: f64) -> Self {
        Self::with_budget(kernel, eps, crate::sdp::DEFAULT_MAX_ITER)
    }

    /// Cache with an explicit solver iteration budget.
    pub fn with_budget(kernel: Kernel, eps: f64, max_iter: usize) -> Self {
        CompletionCache {
            kernel,
            eps,
            max_iter,
            pairs: BTreeMap::new(),
            global_l0: None,
            radii: BTreeMap::new(),
        }
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    fn subset_indices(&self, subset: &[String]) -> Result<Vec<usize>> {
        let mut idx = Vec::with_capacity(subset.len());
        for l in subset {
            let i = self
                .kernel
                .index_of(l)
                .ok_or_else(|| Error::UnknownLabel(l.clone()))?;
            idx.push(i);
        }
        idx.sort_unstable();
        idx.dedup();
        if idx.len() != subset.len() {
            return Err(Error::Mismatch("subset labels must be distinct"));
        }
        Ok(idx)
    }

    /// L_(x,y): the completion kernel of the pair {x, y}, padded to X.
    ///
    /// Diagonal pairs take the positive decomposition when the single entry
    /// is completely positive, otherwise the general construction.
    pub fn pair_completion(&mut self, x: &str, y: &str) -> Result<Kernel> {
        let ix = self
            .kernel
            .index_of(x)
            .ok_or_else(|| Error::UnknownLabel(String::from(x)))?;
        let iy = self
            .kernel
            .index_of(y)
            .ok_or_else(|| Error::UnknownLabel(String::from(y)))?;
        let key = (ix.min(iy), ix.max(iy));
        if let Some(hit) = self.pairs.get(&key) {
            return Ok(hit.clone());
        }
        let mut support: Vec<String> = Vec::new();
        support.push(self.kernel.labels()[key.0].clone());
        if key.1 != key.0 {
            support.push(self.kernel.labels()[key.1].clone());
        }
        let local = restrict(
            &pair_kernel(&self.kernel, x, y)?,
            &support,
        )?;
        let d = if key.0 == key.1 && local.is_cp_kernel(linalg::DEFAULT_TOL) {
            kolmogorov_positive(&local, linalg::DEFAULT_TOL)?
        } else {
            kolmogorov_general_iter(&local, self.eps, self.max_iter)?
        };
        let padded = pad(&gram_kernel(&d), self.kernel.labels())?;
        self.pairs.insert(key, padded.clone());
        Ok(padded)
    }

    /// The ground-set half-sum of all pair completions.
    fn global_l0(&mut self) -> Result<Kernel> {
        if let Some(hit) = &self.global_l0 {
            return Ok(hit.clone());
        }
        let labels: Vec<String> = self.kernel.labels().to_vec();
        let n = labels.len();
        let mut acc = Kernel::zero(labels.clone(), self.kernel.p(), self.kernel.q())?;
        for i in 0..n {
            for j in 0..n {
                acc = acc.add(&self.pair_completion(&labels[i], &labels[j])?)?;
            }
        }
        for i in 0..n {
            acc = acc.add(&self.pair_completion(&labels[i], &labels[i])?)?;
        }
        let half = acc.scale(crate::complex::Complex::real(0.5));
        self.global_l0 = Some(half.clone());
        Ok(half)
    }

    /// Canonical completion on F: the half-sum restricted to F x F.
    /// Hereditary: build_l0(G) equals restrict(build_l0(F), G) exactly.
    pub fn build_l0(&mut self, subset: &[String]) -> Result<Kernel> {
        self.subset_indices(subset)?;
        let global = self.global_l0()?;
        restrict(&global, subset)
    }

    /// r_F: the cb norm of the Schur operator of the canonical completion.
    pub fn radius(&mut self, subset: &[String]) -> Result<f64> {
        let idx = self.subset_indices(subset)?;
        if let Some(&hit) = self.radii.get(&idx) {
            return Ok(hit);
        }
        let l0 = self.build_l0(subset)?;
        let r = l0.cb_norm_iter(self.eps, self.max_iter)?;
        self.radii.insert(idx, r);
        Ok(r)
    }

    /// Membership of (L1, L2) in the local solution space of the chain's top
    /// set: both components completely positive with cb norm capped by the
    /// radius, the assembled 2x2 kernel completely positive, and recursively
    /// the restrictions passing at every lower chain level.
    pub fn local_solution_check(&mut self, pair: &LocalPair, chain: &SubsetChain) -> Result<bool> {
        let top = chain.top();
        if pair.l1.labels() != top {
            return Err(Error::Mismatch("pair must live on the chain's top set"));
        }
        let tol = self.eps.max(1e-9);
        for level in chain.levels().iter().rev() {
            let l1 = restrict(&pair.l1, level)?;
            let l2 = restrict(&pair.l2, level)?;
            let kr = restrict(&self.kernel, level)?;
            if !l1.is_cp_kernel(tol) || !l2.is_cp_kernel(tol) {
                return Ok(false);
            }
            let cap = self.radius(level)? + self.eps;
            if l1.cb_norm_iter(self.eps, self.max_iter)? > cap
                || l2.cb_norm_iter(self.eps, self.max_iter)? > cap
            {
                return Ok(false);
            }
            if !assemble_2x2(&l1, &kr, &l2)?.is_cp(tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// One-shot variants of the cached operations.
pub fn pair_completion(k: &Kernel, x: &str, y: &str, eps: f64) -> Result<Kernel> {
    CompletionCache::new(k.clone(), eps).pair_completion(x, y)
}

pub fn build_l0(k: &Kernel, subset: &[String], eps: f64) -> Result<Kernel> {
    CompletionCache::new(k.clone(), eps).build_l0(subset)
}

pub fn radius(k: &Kernel, subset: &[String], eps: f64) -> Result<f64> {
    CompletionCache::new(k.clone(), eps).radius(subset)
}

pub fn local_solution_check(
    pair: &LocalPair,
    k: &Kernel,
    chain: &SubsetChain,
    eps: f64,
) -> Result<bool> {
    CompletionCache::new(k.clone(), eps).local_solution_check(pair, chain)
}

/// The F x F half-sum of pair kernels restricted to F, which reconstructs
/// the restriction of k exactly (the pair kernels have zero diagonals, so
/// nothing leaks across subsets).
pub fn pair_half_sum(k: &Kernel, subset: &[String]) -> Result<Kernel> {
    let idx: Vec<usize> = {
        let mut v = Vec::new();
        for l in subset {
            v.push(
                k.index_of(l)
                    .ok_or_else(|| Error::UnknownLabel(l.clone()))?,
            );
        }
        v
    };
    let labels = k.labels();
    let mut acc = Kernel::zero(labels.to_vec(), k.p(), k.q())?;
    for &i in &idx {
        for &j in &idx {
            acc = acc.add(&pair_kernel(k, &labels[i], &labels[j])?)?;
        }
    }
    for &i in &idx {
        acc = acc.add(&pair_kernel(k, &labels[i], &labels[i])?)?;
    }
    restrict(&acc.scale(crate::complex::Complex::real(0.5)), subset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{labels, random_cp_kernel, random_kernel};
    use crate::rng::Rng;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| String::from(*s)).collect()
    }

    #[test]
    fn restrict_and_pad_adjunction() {
        let mut rng = Rng::new(91);
        let k = random_kernel(&mut rng, 4, 2, 2);
        let all = k.labels().to_vec();
        assert!(restrict(&k, &all).unwrap().dist(&k) < 1e-15);

        let one = restrict(&k, &names(&["x2"])).unwrap();
        assert_eq!(one.n(), 1);
        assert!(one.get(0, 0).dist(k.get(2, 2)) < 1e-15);

        let sub = names(&["x1", "x3"]);
        let r = restrict(&k, &sub).unwrap();
        let p = pad(&r, &all).unwrap();
        assert!(restrict(&p, &sub).unwrap().dist(&r) < 1e-15);
        assert!(p.get(0, 0).choi().frobenius_norm() < 1e-15);

        assert!(restrict(&k, &names(&["zz"])).is_err());
        assert!(pad(&r, &names(&["x1"])).is_err());

        // Restriction preserves complete positivity.
        let cp = random_cp_kernel(&mut rng, 4, 2, 2, 2);
        assert!(restrict(&cp, &sub).unwrap().is_cp_kernel(1e-8));
        // Padding preserves it too: the Choi gains zero rows and columns.
        assert!(pad(&restrict(&cp, &sub).unwrap(), &all).unwrap().is_cp_kernel(1e-8));
    }

    #[test]
    fn pair_kernel_support_and_symmetry() {
        let mut rng = Rng::new(93);
        let k = random_kernel(&mut rng, 3, 2, 2);
        let pk = pair_kernel(&k, "x0", "x2").unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect_nonzero = (i, j) == (0, 2) || (i, j) == (2, 0);
                let nrm = pk.get(i, j).choi().frobenius_norm();
                if expect_nonzero {
                    assert!(nrm > 1e-6);
                    assert!(pk.get(i, j).dist(k.get(i, j)) < 1e-15);
                } else {
                    assert!(nrm < 1e-15);
                }
            }
        }
        let sym = pair_kernel(&k, "x2", "x0").unwrap();
        assert!(sym.dist(&pk) < 1e-15);

        let diag = pair_kernel(&k, "x1", "x1").unwrap();
        assert!(diag.get(1, 1).dist(k.get(1, 1)) < 1e-15);
        assert!(diag.get(0, 0).choi().frobenius_norm() < 1e-15);
    }

    #[test]
    fn half_sum_reconstructs_exactly() {
        let mut rng = Rng::new(95);
        let k = random_kernel(&mut rng, 4, 2, 2);
        for sub in [names(&["x0"]), names(&["x0", "x2"]), k.labels().to_vec()] {
            let hs = pair_half_sum(&k, &sub).unwrap();
            let want = restrict(&k, &sub).unwrap();
            assert!(hs.dist(&want) <= 1e-12, "subset size {}", sub.len());
        }
    }

    #[test]
    fn pair_completion_examples() {
        let mut rng = Rng::new(97);
        let k = random_kernel(&mut rng, 3, 2, 2);
        let mut cache = CompletionCache::new(k.clone(), 1e-6);

        // Off-diagonal pair: completion is CP and completes the pair kernel.
        let l = cache.pair_completion("x0", "x1").unwrap();
        assert!(l.is_cp_kernel(1e-7));
        let support = names(&["x0", "x1"]);
        let lr = restrict(&l, &support).unwrap();
        let pk = restrict(&pair_kernel(&k, "x0", "x1").unwrap(), &support).unwrap();
        assert!(assemble_2x2(&lr, &pk, &lr).unwrap().is_cp(1e-6).unwrap());

        // Support: zero outside the pair.
        for i in 0..3 {
            for j in 0..3 {
                if i == 2 || j == 2 {
                    assert!(l.get(i, j).choi().frobenius_norm() < 1e-12);
                }
            }
        }

        // Diagonal pair with CP entry: the completion is the entry itself.
        let cp = random_cp_kernel(&mut rng, 3, 2, 2, 1);
        let mut cache = CompletionCache::new(cp.clone(), 1e-6);
        let l = cache.pair_completion("x1", "x1").unwrap();
        assert!(l.get(1, 1).dist(cp.get(1, 1)) <= 1e-8);

        // Zero kernel: zero completion.
        let z = Kernel::zero(labels(2), 2, 2).unwrap();
        let l = pair_completion(&z, "x0", "x1", 1e-6).unwrap();
        assert!(l.max_entry_norm() < 1e-8);
    }

    #[test]
    fn pair_completion_scalar_antidiagonal() {
        // k(x,y) = 1, zero diagonal: the completion carries diagonal 1.
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let k = Kernel::scalar(labels(2), &m).unwrap();
        let l = pair_completion(&k, "x0", "x1", 1e-7).unwrap();
        let l_mat = l.scalar_matrix().unwrap();
        assert!((l_mat.get(0, 0).re - 1.0).abs() < 1e-4, "{:?}", l_mat.get(0, 0));
        assert!((l_mat.get(1, 1).re - 1.0).abs() < 1e-4);
    }

    #[test]
    fn build_l0_hereditary_and_feasible() {
        let mut rng = Rng::new(101);
        let k = random_kernel(&mut rng, 3, 1, 2);
        let mut cache = CompletionCache::new(k.clone(), 1e-6);
        let all = k.labels().to_vec();
        let sub = names(&["x0", "x2"]);

        let l0_full = cache.build_l0(&all).unwrap();
        let l0_sub = cache.build_l0(&sub).unwrap();
        assert!(restrict(&l0_full, &sub).unwrap().dist(&l0_sub) == 0.0);

        assert!(l0_full.is_cp_kernel(1e-7));
        let kr = restrict(&k, &all).unwrap();
        assert!(assemble_2x2(&l0_full, &kr, &l0_full).unwrap().is_cp(1e-6).unwrap());

        // Zero kernel: zero completion.
        let z = Kernel::zero(labels(2), 1, 1).unwrap();
        assert!(build_l0(&z, &names(&["x0", "x1"]), 1e-6).unwrap().max_entry_norm() < 1e-8);
    }

    #[test]
    fn single_point_ground_set() {
        // With a one-point ground set the canonical completion is the single
        // diagonal pair completion and the radius is its cb norm.
        let one = ComplexMatrix::identity(1);
        let k = Kernel::scalar(names(&["x"]), &one).unwrap();
        let mut cache = CompletionCache::new(k.clone(), 1e-7);
        let l0 = cache.build_l0(&names(&["x"])).unwrap();
        let pc = cache.pair_completion("x", "x").unwrap();
        assert!(l0.dist(&pc) < 1e-12);
        let r = cache.radius(&names(&["x"])).unwrap();
        assert!((r - 1.0).abs() < 1e-5, "radius {}", r);
    }

    #[test]
    fn radius_monotone_and_local_solutions() {
        let mut rng = Rng::new(103);
        let k = random_kernel(&mut rng, 3, 1, 1);
        let mut cache = CompletionCache::new(k.clone(), 1e-6);
        let chain = SubsetChain::new(
            k.labels().to_vec(),
            [&["x0"][..], &["x0", "x1"][..], &["x0", "x1", "x2"][..]]
                .iter()
                .map(|v| names(v))
                .collect(),
        )
        .unwrap();

        let mut prev = 0.0;
        for level in chain.levels() {
            let r = cache.radius(level).unwrap();
            assert!(r >= prev - 1e-6, "radius not monotone: {} < {}", r, prev);
            prev = r;
        }

        let top = chain.top().to_vec();
        let l0 = cache.build_l0(&top).unwrap();
        let pair = LocalPair::new(l0.clone(), l0.clone()).unwrap();
        assert!(cache.local_solution_check(&pair, &chain).unwrap());

        // Zero pair against a nonzero kernel fails.
        let z = Kernel::zero(top.clone(), 1, 1).unwrap();
        let zp = LocalPair::new(z.clone(), z).unwrap();
        assert!(!cache.local_solution_check(&zp, &chain).unwrap());

        // A wildly scaled pair violates the norm cap.
        let big = LocalPair::new(
            l0.scale(crate::complex::Complex::real(50.0)),
            l0.scale(crate::complex::Complex::real(50.0)),
        )
        .unwrap();
        assert!(!cache.local_solution_check(&big, &chain).unwrap());
    }

    #[test]
    fn chain_validation() {
        let g = names(&["a", "b", "c"]);
        assert!(SubsetChain::new(g.clone(), [&["a"][..], &["a", "b"][..]].iter().map(|v| names(v)).collect()).is_ok());
        // Normalizes subset order to the ground ordering.
        let c = SubsetChain::new(g.clone(), [names(&["b", "a"])].to_vec()).unwrap();
        assert_eq!(c.top(), &names(&["a", "b"])[..]);
        // Non-strict inclusion rejected.
        assert!(SubsetChain::new(
            g.clone(),
            [names(&["a"]), names(&["a"])].to_vec()
        )
        .is_err());
        // Non-subset rejected.
        assert!(SubsetChain::new(
            g.clone(),
            [names(&["a", "b"]), names(&["a", "c"])].to_vec()
        )
        .is_err());
        assert!(SubsetChain::new(g, [names(&["z"])].to_vec()).is_err());
    }
}
