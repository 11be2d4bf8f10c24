//! Qubit encoding of the boundary operators: `D = Σ_i (a_i + a_i†) / √n`
//! with Jordan-Wigner fermions on `n` qubits, one qubit per vertex.
//!
//! Vertex 0 is the most significant bit of the basis index. `D` is kept
//! implicit: column `x` has exactly `n` nonzeros, one per flipped bit.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::complex::CliqueComplex;
use crate::error::{HodgeError, Result};
use crate::exec::Exec;

pub const MAX_QUBITS: usize = 14;

/// Largest size [`DiracEncoding::to_dense`] will materialize.
pub const MAX_DENSE_QUBITS: usize = 10;

/// Entry tolerance for the block check.
pub const PUE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    /// Jordan-Wigner string `(-1)^{occupied qubits before i}`
    Fermionic,
    /// drops the string; kept to check that the block test notices
    Unsigned,
}

#[derive(Clone, Debug)]
pub struct DiracEncoding {
    n: usize,
    convention: SignConvention,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PueReport {
    pub n: usize,
    /// `(k, max |Π_{k-1} D Π_k - B_k/√n|)`
    pub blocks: Vec<(usize, f64)>,
    pub max_error: f64,
}

impl DiracEncoding {
    pub fn new(n: usize, convention: SignConvention) -> Result<Self> {
        if n == 0 {
            return Err(HodgeError::InvalidParameter("need at least one qubit".into()));
        }
        if n > MAX_QUBITS {
            return Err(HodgeError::TooManyQubits { n, max: MAX_QUBITS });
        }
        Ok(DiracEncoding { n, convention })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    fn bit(&self, vertex: usize) -> usize {
        1 << (self.n - 1 - vertex)
    }

    /// Basis index of the state whose occupied qubits are `vertices`.
    pub fn basis_index(&self, vertices: &[usize]) -> usize {
        vertices.iter().fold(0, |acc, &v| acc | self.bit(v))
    }

    /// Nonzeros `(row, value)` of column `x`.
    pub fn column(&self, x: usize) -> Vec<(usize, f64)> {
        let scale = 1.0 / (self.n as f64).sqrt();
        let mut occupied_before = 0;
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let b = self.bit(i);
            let sign = match self.convention {
                SignConvention::Fermionic if occupied_before % 2 == 1 => -1.0,
                _ => 1.0,
            };
            out.push((x ^ b, sign * scale));
            if x & b != 0 {
                occupied_before += 1;
            }
        }
        out
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        let diff = row ^ col;
        if diff.count_ones() != 1 {
            return 0.0;
        }
        self.column(col).into_iter().find(|&(r, _)| r == row).map_or(0.0, |(_, v)| v)
    }

    /// `D` as a dense matrix.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(HodgeError::TooManyQubits { n: self.n, max: MAX_DENSE_QUBITS });
        }
        let mut d = DMatrix::zeros(self.dim(), self.dim());
        for x in 0..self.dim() {
            for (r, v) in self.column(x) {
                d[(r, x)] = v;
            }
        }
        Ok(d)
    }

    /// `D v` for a state on all `2^n` basis vectors.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(HodgeError::DimensionMismatch { expected: self.dim(), actual: v.len() });
        }
        let mut out = vec![0.0; v.len()];
        for (x, &a) in v.iter().enumerate() {
            if a != 0.0 {
                for (r, d) in self.column(x) {
                    out[r] += d * a;
                }
            }
        }
        Ok(out)
    }

    /// Characteristic mask of `Π_k`: basis states of the `k`-simplices.
    pub fn projector_mask(&self, complex: &CliqueComplex, k: usize) -> Result<Vec<bool>> {
        self.check_complex(complex)?;
        let mut mask = vec![false; self.dim()];
        for s in complex.simplices(k) {
            mask[self.basis_index(s.vertices())] = true;
        }
        Ok(mask)
    }

    /// `Π_{k-1} D Π_k` in the simplex bases.
    pub fn restricted_block(&self, complex: &CliqueComplex, k: usize) -> Result<DMatrix<f64>> {
        self.check_complex(complex)?;
        let rows = complex.simplices(k - 1);
        let cols = complex.simplices(k);
        let row_of: std::collections::HashMap<usize, usize> =
            rows.iter().enumerate().map(|(i, s)| (self.basis_index(s.vertices()), i)).collect();
        let mut block = DMatrix::zeros(rows.len(), cols.len());
        for (j, s) in cols.iter().enumerate() {
            for (r, d) in self.column(self.basis_index(s.vertices())) {
                if let Some(&i) = row_of.get(&r) {
                    block[(i, j)] = d;
                }
            }
        }
        Ok(block)
    }

    /// Compares every block `Π_{k-1} D Π_k` with `B_k/√n`.
    pub fn verify(&self, complex: &CliqueComplex, exec: Exec) -> Result<PueReport> {
        self.check_complex(complex)?;
        let scale = 1.0 / (self.n as f64).sqrt();
        let ks: Vec<usize> = (1..=complex.max_dim()).collect();
        let errors = exec.map(ks.len(), |i| {
            let k = ks[i];
            let block = self.restricted_block(complex, k)?;
            let target = complex.boundary_dense(k) * scale;
            Ok::<_, HodgeError>((k, (block - target).abs().max()))
        });
        let mut blocks = Vec::with_capacity(errors.len());
        for e in errors {
            blocks.push(e?);
        }
        let max_error = blocks.iter().map(|b| b.1).fold(0.0, f64::max);
        if let Some(&(k, err)) = blocks.iter().find(|b| b.1 > PUE_TOLERANCE) {
            return Err(HodgeError::EncodingMismatch { k, max_error: err });
        }
        Ok(PueReport { n: self.n, blocks, max_error })
    }

    fn check_complex(&self, complex: &CliqueComplex) -> Result<()> {
        if complex.n() != self.n {
            return Err(HodgeError::DimensionMismatch { expected: self.n, actual: complex.n() });
        }
        Ok(())
    }
}

/// Fermionic encoding for `complex`, verified block by block.
pub fn dirac_encoding(complex: &CliqueComplex) -> Result<(DiracEncoding, PueReport)> {
    dirac_encoding_with(complex, SignConvention::Fermionic, Exec::default())
}

pub fn dirac_encoding_with(
    complex: &CliqueComplex,
    convention: SignConvention,
    exec: Exec,
) -> Result<(DiracEncoding, PueReport)> {
    let d = DiracEncoding::new(complex.n(), convention)?;
    let report = d.verify(complex, exec)?;
    Ok((d, report))
}
