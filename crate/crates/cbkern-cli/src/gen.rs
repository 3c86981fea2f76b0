//! Deterministic random instance generation.
//!
//! Completely positive kernels are built in positive Kolmogorov form (random
//! iota with J = I), so class membership holds by construction rather than by
//! rejection sampling. Difference instances carry their ground-truth CP pair.

use cbkern_core::kernel::Kernel;
use cbkern_core::linmap::LinMap;
use cbkern_core::matrix::ComplexMatrix;
use cbkern_core::rng::Rng;
use cbkern_core::Complex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Cp,
    Hermitian,
    General,
    Difference,
}

pub fn point_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{}", i)).collect()
}

pub fn random_kernel(rng: &mut Rng, n: usize, p: usize, q: usize) -> Kernel {
    Kernel::from_fn(point_labels(n), p, q, |_, _| {
        LinMap::new(p, q, rng.complex_matrix(p * q, p * q)).unwrap()
    })
    .unwrap()
}

pub fn random_cp_kernel(rng: &mut Rng, n: usize, p: usize, q: usize, m: usize) -> Kernel {
    let iotas: Vec<ComplexMatrix> = (0..n).map(|_| rng.complex_matrix(p * m, q)).collect();
    Kernel::from_gram(point_labels(n), p, q, m, &iotas).unwrap()
}

pub fn random_hermitian_kernel(rng: &mut Rng, n: usize, p: usize, q: usize) -> Kernel {
    let g = random_kernel(rng, n, p, q);
    g.add(&g.involution()).unwrap().scale(Complex::real(0.5))
}

pub struct Generated {
    pub kernel: Kernel,
    /// Ground-truth CP pair for difference instances.
    pub witness: Option<(Kernel, Kernel)>,
}

pub fn generate(kind: GenKind, n: usize, p: usize, q: usize, seed: u64) -> Generated {
    let mut rng = Rng::new(seed);
    match kind {
        GenKind::Cp => Generated {
            kernel: random_cp_kernel(&mut rng, n, p, q, 2),
            witness: None,
        },
        GenKind::Hermitian => Generated {
            kernel: random_hermitian_kernel(&mut rng, n, p, q),
            witness: None,
        },
        GenKind::General => Generated {
            kernel: random_kernel(&mut rng, n, p, q),
            witness: None,
        },
        GenKind::Difference => {
            let k1 = random_cp_kernel(&mut rng, n, p, q, 2);
            let k2 = random_cp_kernel(&mut rng, n, p, q, 2);
            Generated {
                kernel: k1.sub(&k2).unwrap(),
                witness: Some((k1, k2)),
            }
        }
    }
}
