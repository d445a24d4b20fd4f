//! Wire forms: complex numbers as `[re, im]`, matrices as row-major nested
//! arrays, basis index `b = Σ n_i 2^{N-1-i}` (mode 0 most significant).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::descriptors::DescriptorSet;
use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockVector, ModeSet};
use crate::linalg::{CMatrix, CVector};
use crate::states::{self, PhenomenalState};
use crate::transformations::PSUnitary;

pub type ComplexJson = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<ComplexJson>>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorJson(pub Vec<ComplexJson>);

pub fn complex_to_json(z: Complex64) -> ComplexJson {
    [z.re, z.im]
}

pub fn complex_from_json(z: ComplexJson) -> Complex64 {
    Complex64::new(z[0], z[1])
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        MatrixJson(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect())
                .collect(),
        )
    }
}

impl MatrixJson {
    /// Square matrix; ragged or non-square input is a dimension error.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let rows = self.0.len();
        if let Some(bad) = self.0.iter().find(|r| r.len() != rows) {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: bad.len(),
            });
        }
        Ok(CMatrix::from_fn(rows, rows, |i, j| {
            complex_from_json(self.0[i][j])
        }))
    }
}

impl From<&CVector> for VectorJson {
    fn from(v: &CVector) -> Self {
        VectorJson(v.iter().map(|z| complex_to_json(*z)).collect())
    }
}

impl VectorJson {
    pub fn to_vector(&self) -> CVector {
        CVector::from_iterator(self.0.len(), self.0.iter().map(|z| complex_from_json(*z)))
    }
}

fn n_modes_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: dim.next_power_of_two().max(1),
            found: dim,
        });
    }
    Ok(dim.trailing_zeros() as usize)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptorSetJson {
    pub n_modes: usize,
    pub modes: Vec<usize>,
    pub descriptors: Vec<MatrixJson>,
    pub heisenberg_state: VectorJson,
}

impl From<&DescriptorSet> for DescriptorSetJson {
    fn from(d: &DescriptorSet) -> Self {
        Self {
            n_modes: d.n_modes(),
            modes: d.subsystem().indices().to_vec(),
            descriptors: d
                .descriptors()
                .iter()
                .map(|o| MatrixJson::from(o.matrix()))
                .collect(),
            heisenberg_state: VectorJson::from(d.heisenberg_state().amplitudes()),
        }
    }
}

impl DescriptorSetJson {
    pub fn to_descriptor_set(&self) -> Result<DescriptorSet> {
        let subsystem = ModeSet::new(self.modes.iter().copied(), self.n_modes)?;
        let descriptors = self
            .descriptors
            .iter()
            .map(|m| FockOperator::new(self.n_modes, m.to_matrix()?))
            .collect::<Result<Vec<_>>>()?;
        let psi0 = FockVector::new(self.n_modes, self.heisenberg_state.to_vector())?;
        DescriptorSet::new(subsystem, descriptors, psi0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub modes: Vec<usize>,
    pub matrix: MatrixJson,
}

impl From<&PhenomenalState> for StateJson {
    fn from(s: &PhenomenalState) -> Self {
        Self {
            modes: s.subsystem().indices().to_vec(),
            matrix: MatrixJson::from(s.matrix()),
        }
    }
}

impl StateJson {
    pub fn to_state(&self, n_modes: usize) -> Result<PhenomenalState> {
        let subsystem = ModeSet::new(self.modes.iter().copied(), n_modes)?;
        states::validate_phenomenal(&subsystem, self.matrix.to_matrix()?)
    }
}

impl From<&PSUnitary> for MatrixJson {
    fn from(u: &PSUnitary) -> Self {
        MatrixJson::from(u.matrix())
    }
}

impl MatrixJson {
    pub fn to_unitary(&self) -> Result<PSUnitary> {
        let m = self.to_matrix()?;
        n_modes_for_dim(m.nrows())?;
        crate::transformations::validate_ps_unitary(m)
    }
}
