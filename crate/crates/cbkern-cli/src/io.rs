//! JSON schemas and conversions for the interchange formats.
//!
//! Complex scalars are `[re, im]` pairs; matrices are row-major:
//!
//! ```text
//! ComplexMatrix  {"rows": n, "cols": m, "data": [[re, im], ...]}
//! LinMap         {"p": p, "q": q, "choi": <ComplexMatrix>}
//! Kernel         {"labels": [...], "p": p, "q": q, "values": [[<LinMap>, ...], ...]}
//! KolDecomp      {"labels": [...], "p": p, "q": q, "m": m, "J": <ComplexMatrix>,
//!                 "iota": {label: <ComplexMatrix>}}
//! Chain          {"ground": [...], "chain": [[...], ...]}
//! ```

use crate::error::CliError;
use cbkern_core::decomp::KolDecomp;
use cbkern_core::extension::SubsetChain;
use cbkern_core::kernel::Kernel;
use cbkern_core::linmap::LinMap;
use cbkern_core::{Complex, ComplexMatrix};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDto {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixDto {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixDto {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        if self.data.len() != self.rows * self.cols {
            return Err(CliError::Invalid(format!(
                "matrix data length {} does not match {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        let data = self.data.iter().map(|&[re, im]| Complex::new(re, im)).collect();
        ComplexMatrix::from_vec(self.rows, self.cols, data).map_err(CliError::Core)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinMapDto {
    pub p: usize,
    pub q: usize,
    pub choi: MatrixDto,
}

impl LinMapDto {
    pub fn from_map(m: &LinMap) -> Self {
        LinMapDto {
            p: m.p(),
            q: m.q(),
            choi: MatrixDto::from_matrix(m.choi()),
        }
    }

    pub fn to_map(&self) -> Result<LinMap, CliError> {
        LinMap::new(self.p, self.q, self.choi.to_matrix()?).map_err(CliError::Core)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelDto {
    pub labels: Vec<String>,
    pub p: usize,
    pub q: usize,
    pub values: Vec<Vec<LinMapDto>>,
}

impl KernelDto {
    pub fn from_kernel(k: &Kernel) -> Self {
        let n = k.n();
        KernelDto {
            labels: k.labels().to_vec(),
            p: k.p(),
            q: k.q(),
            values: (0..n)
                .map(|i| (0..n).map(|j| LinMapDto::from_map(k.get(i, j))).collect())
                .collect(),
        }
    }

    pub fn to_kernel(&self) -> Result<Kernel, CliError> {
        let n = self.labels.len();
        if self.values.len() != n || self.values.iter().any(|row| row.len() != n) {
            return Err(CliError::Invalid(format!(
                "kernel on {} labels needs an {0}x{0} value grid",
                n
            )));
        }
        let mut values = Vec::with_capacity(n * n);
        for row in &self.values {
            for v in row {
                values.push(v.to_map()?);
            }
        }
        Kernel::new(self.labels.clone(), self.p, self.q, values).map_err(CliError::Core)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessDto {
    pub k1: KernelDto,
    pub k2: KernelDto,
}

/// A kernel file is either a bare kernel or a kernel together with the
/// ground-truth completely positive pair it was generated from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelFileDto {
    WithWitness {
        kernel: KernelDto,
        witness: WitnessDto,
    },
    Plain(KernelDto),
}

impl KernelFileDto {
    pub fn kernel(&self) -> &KernelDto {
        match self {
            KernelFileDto::Plain(k) => k,
            KernelFileDto::WithWitness { kernel, .. } => kernel,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompDto {
    pub labels: Vec<String>,
    pub p: usize,
    pub q: usize,
    pub m: usize,
    #[serde(rename = "J")]
    pub j: MatrixDto,
    pub iota: BTreeMap<String, MatrixDto>,
}

impl DecompDto {
    pub fn from_decomp(d: &KolDecomp) -> Self {
        DecompDto {
            labels: d.labels().to_vec(),
            p: d.p(),
            q: d.q(),
            m: d.m(),
            j: MatrixDto::from_matrix(d.j()),
            iota: d
                .labels()
                .iter()
                .enumerate()
                .map(|(i, l)| (l.clone(), MatrixDto::from_matrix(d.iota(i))))
                .collect(),
        }
    }

    pub fn to_decomp(&self) -> Result<KolDecomp, CliError> {
        let mut iota = Vec::with_capacity(self.labels.len());
        for l in &self.labels {
            let m = self
                .iota
                .get(l)
                .ok_or_else(|| CliError::Invalid(format!("iota missing label {}", l)))?;
            iota.push(m.to_matrix()?);
        }
        KolDecomp::new(
            self.labels.clone(),
            self.p,
            self.q,
            self.m,
            self.j.to_matrix()?,
            iota,
        )
        .map_err(CliError::Core)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainDto {
    pub ground: Vec<String>,
    pub chain: Vec<Vec<String>>,
}

impl ChainDto {
    pub fn to_chain(&self) -> Result<SubsetChain, CliError> {
        SubsetChain::new(self.ground.clone(), self.chain.clone()).map_err(CliError::Core)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairDto {
    pub l1: KernelDto,
    pub l2: KernelDto,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(&path.display().to_string(), &e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Invalid(format!("serialization failed: {}", e)))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_kernel(path: &Path) -> Result<Kernel, CliError> {
    let dto: KernelFileDto = read_json(path)?;
    dto.kernel().to_kernel()
}

#[cfg(test)]
mod tests {
    use super::*;
    use cbkern_core::rng::Rng;

    #[test]
    fn kernel_json_roundtrip() {
        let mut rng = Rng::new(7);
        let k = Kernel::from_fn(
            vec!["a".into(), "b".into()],
            2,
            1,
            |_, _| LinMap::new(2, 1, rng.complex_matrix(2, 2)).unwrap(),
        )
        .unwrap();
        let dto = KernelDto::from_kernel(&k);
        let text = serde_json::to_string(&dto).unwrap();
        let back: KernelDto = serde_json::from_str(&text).unwrap();
        assert!(back.to_kernel().unwrap().dist(&k) < 1e-15);

        // Bare kernels and witness files both parse through the file enum.
        let file: KernelFileDto = serde_json::from_str(&text).unwrap();
        assert!(matches!(file, KernelFileDto::Plain(_)));
    }

    #[test]
    fn matrix_shape_validated() {
        let bad = MatrixDto {
            rows: 2,
            cols: 2,
            data: vec![[1.0, 0.0]],
        };
        assert!(bad.to_matrix().is_err());
    }
}
