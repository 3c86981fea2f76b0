//! Randomized verification suites for the structural results the library
//! implements: order bounds and difference decompositions, off-diagonal
//! completions with their conjugation witnesses, agreement of the two 2x2
//! readings, decomposition round trips, and shuffle/restriction stability.
//!
//! Failures are data, not errors: each suite reports pass/fail counts, the
//! worst residual observed, and a message naming the first failing property.

use crate::gen;
use crate::report::{SuiteReport, SuiteResult, SCHEMA_VERSION};
use cbkern_core::decomp;
use cbkern_core::kernel::{assemble_2x2, Kernel, Kernel2x2};
use cbkern_core::linalg;
use cbkern_core::matrix::ComplexMatrix;
use cbkern_core::rng::Rng;
use cbkern_core::Complex;

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub eps: f64,
    pub max_iter: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            trials: 8,
            seed: 1,
            n: 2,
            p: 2,
            q: 2,
            eps: 1e-6,
            max_iter: 200,
        }
    }
}

/// Order bounds -(k1+k2) <= k1-k2 <= k1+k2, the difference decomposition
/// with J = J*, J^2 = I, and recovery of completely positive parts.
pub fn check_difference_instance(
    k1: &Kernel,
    k2: &Kernel,
    _eps: f64,
) -> Result<f64, String> {
    let sum = k1.add(k2).map_err(|e| e.to_string())?;
    let diff = k1.sub(k2).map_err(|e| e.to_string())?;
    if !sum
        .scale(Complex::real(-1.0))
        .leq(&diff, 1e-7)
        .map_err(|e| e.to_string())?
    {
        return Err("order bound -(k1+k2) <= k1-k2 violated".into());
    }
    if !diff.leq(&sum, 1e-7).map_err(|e| e.to_string())? {
        return Err("order bound k1-k2 <= k1+k2 violated".into());
    }

    let d = decomp::difference_kolmogorov(k1, k2, 1e-9)
        .map_err(|e| format!("difference decomposition: {}", e))?;
    let sa = d.j().hermitian_deviation();
    if sa > 1e-10 {
        return Err(format!("J not self-adjoint (deviation {:.3e})", sa));
    }
    let jj = d
        .j()
        .mul(d.j())
        .unwrap()
        .dist(&ComplexMatrix::identity(d.d()));
    if jj > 1e-10 {
        return Err(format!("J^2 != I (deviation {:.3e})", jj));
    }

    let (h1, h2) = decomp::decomp_to_difference(&d, 1e-9).map_err(|e| e.to_string())?;
    if !h1.is_cp_kernel(1e-8) || !h2.is_cp_kernel(1e-8) {
        return Err("recovered parts not completely positive".into());
    }
    let rec = h1.sub(&h2).unwrap().dist(&diff);
    if rec > 1e-8 {
        return Err(format!("difference reconstruction residual {:.3e}", rec));
    }
    Ok(sa.max(jj).max(rec))
}

/// Off-diagonal completion of a hermitian kernel, the assembled 2x2
/// positivity, and both conjugation witnesses.
pub fn check_completion_instance(k: &Kernel, eps: f64, max_iter: usize) -> Result<f64, String> {
    let (l1, l2, _t) =
        decomp::offdiagonal_complete_iter(k, eps, max_iter).map_err(|e| e.to_string())?;
    let assembled = assemble_2x2(&l1, k, &l2).map_err(|e| e.to_string())?;
    if !assembled.is_cp(1e-7).map_err(|e| e.to_string())? {
        return Err("assembled 2x2 kernel not completely positive".into());
    }

    let w1 = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0]);
    let mut w2 = ComplexMatrix::zeros(2, 2);
    w2.set(0, 0, Complex::real(1.0));
    w2.set(0, 1, Complex::new(0.0, 1.0));
    w2.set(1, 0, Complex::new(0.0, -1.0));
    w2.set(1, 1, Complex::real(-1.0));
    for (name, s) in [("real", w1), ("imaginary", w2)] {
        let conj = assembled.conjugate(&s).map_err(|e| e.to_string())?;
        for d in 0..2 {
            if !conj.block(d, d).is_cp_kernel(1e-7) {
                return Err(format!(
                    "{} witness produced non-CP diagonal block {}",
                    name, d
                ));
            }
        }
    }

    let lam = linalg::min_eigenvalue(assembled.psi_form().schur_op().choi())
        .map_err(|e| e.to_string())?;
    Ok((-lam).max(0.0))
}

/// The two readings of a 2x2 kernel matrix must never disagree.
pub fn check_haagerup_instance(kk: &Kernel2x2) -> Result<f64, String> {
    match kk.is_cp(1e-7) {
        Ok(_) => Ok(0.0),
        Err(e) => Err(e.to_string()),
    }
}

/// General decomposition round trip plus the four-CP combination.
pub fn check_roundtrip_instance(k: &Kernel, eps: f64, max_iter: usize) -> Result<f64, String> {
    let d = decomp::kolmogorov_general_iter(k, eps, max_iter).map_err(|e| e.to_string())?;
    let rec = d.reconstruct().dist(k);
    if rec > 1e-6 {
        return Err(format!("general reconstruction residual {:.3e}", rec));
    }
    let norm = linalg::operator_norm(d.j());
    if norm > 1.0 + 1e-8 {
        return Err(format!("J not contractive (norm {})", norm));
    }
    let module = d.module_map_residual();
    if module > 1e-8 {
        return Err(format!("J commutator residual {:.3e}", module));
    }

    let (c1, c2, c3, c4) = decomp::four_cp_iter(k, eps, max_iter).map_err(|e| e.to_string())?;
    for (i, c) in [&c1, &c2, &c3, &c4].iter().enumerate() {
        if !c.is_cp_kernel(1e-7) {
            return Err(format!("four-CP part {} not completely positive", i + 1));
        }
    }
    let back = c1
        .sub(&c2)
        .unwrap()
        .add(&c3.sub(&c4).unwrap().scale(Complex::new(0.0, 1.0)))
        .unwrap();
    let four_rec = back.dist(k);
    if four_rec > 1e-6 {
        return Err(format!("four-CP reconstruction residual {:.3e}", four_rec));
    }
    Ok(rec.max(module).max(four_rec))
}

/// Canonical shuffle preserves the CP verdict of the Schur Choi matrix, and
/// completions restrict to feasible completions on subsets.
pub fn check_shuffle_instance(k: &Kernel, eps: f64, max_iter: usize) -> Result<f64, String> {
    let choi = k.schur_op().choi().clone();
    let shuffled = linalg::canonical_shuffle(&choi, k.n(), k.p(), k.n() * k.q())
        .map_err(|e| e.to_string())?;
    // Non-hermitian Choi matrices are simply not PSD.
    let verdict = |m: &ComplexMatrix| -> Result<bool, String> {
        match linalg::is_psd(m, 1e-9) {
            Ok(v) => Ok(v),
            Err(cbkern_core::Error::NotHermitian { .. }) => Ok(false),
            Err(e) => Err(e.to_string()),
        }
    };
    let v1 = verdict(&choi)?;
    let v2 = verdict(&shuffled)?;
    if v1 != v2 {
        return Err("canonical shuffle changed the CP verdict".into());
    }

    if k.n() >= 2 {
        let sub: Vec<String> = k.labels()[..k.n() - 1].to_vec();
        let kr = cbkern_core::extension::restrict(k, &sub).map_err(|e| e.to_string())?;
        let (l1, l2, _t) =
            decomp::offdiagonal_complete_iter(&kr, eps, max_iter).map_err(|e| e.to_string())?;
        if !assemble_2x2(&l1, &kr, &l2)
            .map_err(|e| e.to_string())?
            .is_cp(1e-7)
            .map_err(|e| e.to_string())?
        {
            return Err("restricted completion lost positivity".into());
        }
    }
    Ok(0.0)
}

fn run_suite(
    name: &str,
    trials: usize,
    mut instance: impl FnMut(usize) -> Result<f64, String>,
) -> SuiteResult {
    let mut passed = 0;
    let mut failed = 0;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for t in 0..trials {
        match instance(t) {
            Ok(residual) => {
                passed += 1;
                worst = worst.max(residual);
            }
            Err(msg) => {
                failed += 1;
                failures.push(format!("trial {}: {}", t, msg));
            }
        }
    }
    SuiteResult {
        name: name.to_string(),
        trials,
        passed,
        failed,
        worst_residual: worst,
        failures,
    }
}

pub fn run_all(cfg: &VerifyConfig) -> SuiteReport {
    let (n, p, q) = (cfg.n, cfg.p, cfg.q);
    let suites = vec![
        run_suite("difference_decomposition", cfg.trials, |t| {
            let mut rng = Rng::substream(cfg.seed ^ 0x01, t as u64);
            let k1 = gen::random_cp_kernel(&mut rng, n, p, q, 2);
            let k2 = gen::random_cp_kernel(&mut rng, n, p, q, 2);
            check_difference_instance(&k1, &k2, cfg.eps)
        }),
        run_suite("offdiagonal_completion", cfg.trials, |t| {
            let mut rng = Rng::substream(cfg.seed ^ 0x02, t as u64);
            let k = gen::random_hermitian_kernel(&mut rng, n, p, q);
            check_completion_instance(&k, cfg.eps, cfg.max_iter)
        }),
        run_suite("haagerup_agreement", cfg.trials, |t| {
            let mut rng = Rng::substream(cfg.seed ^ 0x03, t as u64);
            let mk = |rng: &mut Rng| {
                if t % 2 == 0 {
                    gen::random_kernel(rng, n, p, q)
                } else {
                    gen::random_cp_kernel(rng, n, p, q, 1)
                }
            };
            let kk = Kernel2x2::new(
                mk(&mut rng),
                mk(&mut rng),
                mk(&mut rng),
                mk(&mut rng),
            )
            .map_err(|e| e.to_string())?;
            check_haagerup_instance(&kk)
        }),
        run_suite("decomposition_roundtrip", cfg.trials, |t| {
            let mut rng = Rng::substream(cfg.seed ^ 0x04, t as u64);
            let k = gen::random_kernel(&mut rng, n, p, q);
            check_roundtrip_instance(&k, cfg.eps, cfg.max_iter)
        }),
        run_suite("shuffle_and_restriction", cfg.trials, |t| {
            let mut rng = Rng::substream(cfg.seed ^ 0x05, t as u64);
            let k = if t % 2 == 0 {
                gen::random_cp_kernel(&mut rng, n, p, q, 2)
            } else {
                gen::random_kernel(&mut rng, n, p, q)
            };
            check_shuffle_instance(&k, cfg.eps, cfg.max_iter)
        }),
    ];
    let all_passed = suites.iter().all(|s| s.failed == 0);
    SuiteReport {
        schema_version: SCHEMA_VERSION,
        seed: cfg.seed,
        suites,
        all_passed,
    }
}
