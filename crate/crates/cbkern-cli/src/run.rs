//! Command implementations behind the CLI surface.

use crate::error::CliError;
use crate::gen::{self, GenKind};
use crate::io::{
    self, ChainDto, DecompDto, KernelDto, KernelFileDto, PairDto, WitnessDto,
};
use crate::report::{
    ChainLevelReport, ChainReport, CheckReport, DecomposeReport, FourCpReport, SCHEMA_VERSION,
};
use crate::verify::{self, VerifyConfig};
use cbkern_core::extension::{CompletionCache, LocalPair};
use cbkern_core::{decomp, linalg, Complex};
use serde::Serialize;
use std::path::Path;

#[derive(Clone, Copy, Debug)]
pub struct CommonOpts {
    pub eps: f64,
    pub max_iter: usize,
    pub verbose: bool,
}

fn note(opts: &CommonOpts, msg: &str) {
    if opts.verbose {
        eprintln!("cbkern: {}", msg);
    }
}

fn check_opts(opts: &CommonOpts) -> Result<(), CliError> {
    if !(opts.eps > 0.0) {
        return Err(CliError::Invalid("eps must be positive".into()));
    }
    if opts.max_iter == 0 {
        return Err(CliError::Invalid("max-iter must be positive".into()));
    }
    Ok(())
}

pub fn cmd_gen(
    kind: GenKind,
    n: usize,
    p: usize,
    q: usize,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    if n < 1 || p < 1 || q < 1 {
        return Err(CliError::Invalid("sizes must be at least 1".into()));
    }
    let generated = gen::generate(kind, n, p, q, seed);
    let file = match generated.witness {
        None => KernelFileDto::Plain(KernelDto::from_kernel(&generated.kernel)),
        Some((k1, k2)) => KernelFileDto::WithWitness {
            kernel: KernelDto::from_kernel(&generated.kernel),
            witness: WitnessDto {
                k1: KernelDto::from_kernel(&k1),
                k2: KernelDto::from_kernel(&k2),
            },
        },
    };
    io::write_json(out, &file)
}

pub fn cmd_check(input: &Path, opts: &CommonOpts) -> Result<CheckReport, CliError> {
    check_opts(opts)?;
    let k = io::read_kernel(input)?;
    note(opts, "kernel loaded, classifying");
    let hermitian = k.is_hermitian(1e-9 * (1.0 + k.max_entry_norm()));
    let cp = k.is_cp_kernel(linalg::DEFAULT_TOL);
    let completion = decomp::offdiagonal_complete_iter(&k, opts.eps, opts.max_iter);
    let (cb_norm, decomposable) = match completion {
        Ok((_, _, t)) => (t, true),
        Err(cbkern_core::Error::Sdp { status, .. })
            if status == cbkern_core::sdp::SdpStatus::Infeasible =>
        {
            (f64::NAN, false)
        }
        Err(e) => return Err(e.into()),
    };
    Ok(CheckReport {
        schema_version: SCHEMA_VERSION,
        hermitian,
        cp,
        cb_norm,
        decomposable,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecomposeMode {
    Positive,
    Hermitian,
    General,
    Four,
}

impl DecomposeMode {
    pub fn name(&self) -> &'static str {
        match self {
            DecomposeMode::Positive => "positive",
            DecomposeMode::Hermitian => "hermitian",
            DecomposeMode::General => "general",
            DecomposeMode::Four => "four",
        }
    }
}

/// Outcome of a decompose run: the serialized artifacts and whether the
/// verification report passed.
pub struct DecomposeOutcome {
    pub passed: bool,
    pub report_json: String,
}

pub fn cmd_decompose(
    input: &Path,
    mode: DecomposeMode,
    out_prefix: &Path,
    opts: &CommonOpts,
) -> Result<DecomposeOutcome, CliError> {
    check_opts(opts)?;
    let k = io::read_kernel(input)?;
    note(opts, "kernel loaded, decomposing");
    let tol = opts.eps.max(1e-8);

    if mode == DecomposeMode::Four {
        let (c1, c2, c3, c4) = decomp::four_cp_iter(&k, opts.eps, opts.max_iter)?;
        let all_parts_cp = [&c1, &c2, &c3, &c4].iter().all(|c| c.is_cp_kernel(1e-7));
        let back = c1
            .sub(&c2)
            .unwrap()
            .add(&c3.sub(&c4).unwrap().scale(Complex::new(0.0, 1.0)))
            .unwrap();
        let residual = back.dist(&k);
        let passed = all_parts_cp && residual <= 1e-6 * (1.0 + k.max_entry_norm());
        let report = FourCpReport {
            schema_version: SCHEMA_VERSION,
            mode: mode.name().to_string(),
            reconstruction_residual: residual,
            all_parts_cp,
            passed,
        };
        write_with_suffix(out_prefix, "four.json", &FourKernels {
            schema_version: SCHEMA_VERSION,
            kernels: [&c1, &c2, &c3, &c4]
                .iter()
                .map(|c| KernelDto::from_kernel(c))
                .collect(),
        })?;
        let report_json = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        write_with_suffix(out_prefix, "report.json", &report)?;
        return Ok(DecomposeOutcome {
            passed,
            report_json,
        });
    }

    let d = match mode {
        DecomposeMode::Positive => decomp::kolmogorov_positive(&k, linalg::DEFAULT_TOL)?,
        DecomposeMode::Hermitian => decomp::kolmogorov_hermitian_iter(&k, opts.eps, opts.max_iter)?,
        DecomposeMode::General => decomp::kolmogorov_general_iter(&k, opts.eps, opts.max_iter)?,
        DecomposeMode::Four => unreachable!(),
    };
    let rep = decomp::verify_decomp(&d, &k, tol)?;
    let mode_ok = match mode {
        DecomposeMode::Positive => rep.j_psd,
        DecomposeMode::Hermitian => rep.j_selfadjoint,
        _ => true,
    };
    let passed = rep.is_valid_decomposition()
        && mode_ok
        && rep.cp_if_psd_consistent
        && rep.hermitian_iff_selfadjoint;
    let report = DecomposeReport {
        schema_version: SCHEMA_VERSION,
        mode: mode.name().to_string(),
        reconstruction_residual: rep.reconstruction_residual,
        reconstructs: rep.reconstructs,
        j_norm: rep.j_norm,
        j_contractive: rep.j_contractive,
        module_residual: rep.module_residual,
        j_module_map: rep.j_module_map,
        selfadjoint_residual: rep.selfadjoint_residual,
        j_selfadjoint: rep.j_selfadjoint,
        j_psd: rep.j_psd,
        cp_if_psd_consistent: rep.cp_if_psd_consistent,
        hermitian_iff_selfadjoint: rep.hermitian_iff_selfadjoint,
        passed,
    };
    write_with_suffix(out_prefix, "decomp.json", &DecompDto::from_decomp(&d))?;
    write_with_suffix(out_prefix, "report.json", &report)?;
    let report_json =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(DecomposeOutcome {
        passed,
        report_json,
    })
}

#[derive(Serialize)]
struct FourKernels {
    schema_version: u32,
    kernels: Vec<KernelDto>,
}

fn write_with_suffix<T: Serialize>(prefix: &Path, suffix: &str, value: &T) -> Result<(), CliError> {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(".");
    name.push(suffix);
    io::write_json(Path::new(&name), value)
}

pub fn cmd_verify(cfg: &VerifyConfig) -> crate::report::SuiteReport {
    verify::run_all(cfg)
}

pub fn cmd_chain_check(
    kernel_path: &Path,
    chain_path: &Path,
    pair_path: Option<&Path>,
    opts: &CommonOpts,
) -> Result<ChainReport, CliError> {
    check_opts(opts)?;
    let k = io::read_kernel(kernel_path)?;
    let chain_dto: ChainDto = io::read_json(chain_path)?;
    if chain_dto.ground != k.labels() {
        return Err(CliError::Invalid(
            "chain ground set must equal the kernel's labels".into(),
        ));
    }
    let chain = chain_dto.to_chain()?;
    let mut cache = CompletionCache::with_budget(k.clone(), opts.eps, opts.max_iter);

    let mut levels = Vec::new();
    let mut monotone = true;
    let mut prev = 0.0f64;
    for level in chain.levels() {
        note(opts, &format!("radius at subset of size {}", level.len()));
        let r = cache.radius(level)?;
        if r < prev - opts.eps {
            monotone = false;
        }
        prev = r;
        levels.push(ChainLevelReport {
            labels: level.clone(),
            radius: r,
        });
    }

    let pair = match pair_path {
        Some(p) => {
            let dto: PairDto = io::read_json(p)?;
            LocalPair::new(dto.l1.to_kernel()?, dto.l2.to_kernel()?)?
        }
        None => {
            let l0 = cache.build_l0(chain.top())?;
            LocalPair::new(l0.clone(), l0)?
        }
    };
    let local_solution = cache.local_solution_check(&pair, &chain)?;
    let passed = monotone && local_solution;
    Ok(ChainReport {
        schema_version: SCHEMA_VERSION,
        levels,
        radius_monotone: monotone,
        local_solution,
        passed,
    })
}
