//! Fock space of a finite set of fermionic modes.
//!
//! Conventions used by every module and by the serialized formats:
//!
//! * modes are labelled `0..n_modes`;
//! * the basis index of an occupation pattern is `Σ_i occ_i · 2^(N−1−i)`,
//!   so mode 0 is the most significant bit;
//! * ladder operators use the Jordan–Wigner string
//!   `f_i = Z^{⊗i} ⊗ σ⁻ ⊗ I^{⊗(N−i−1)}` with `Z = diag(+1, −1)` in
//!   (vacuum, occupied) order.
//!
//! All matrices built here have entries in {−1, 0, +1}, so the canonical
//! anticommutation relations hold exactly in floating point.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ONE, ZERO};

/// Largest mode count accepted unless overridden with [`FockSpace::with_cap`].
pub const DEFAULT_MODE_CAP: usize = 10;

/// Strictly increasing list of mode labels inside an `ambient`-mode system.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModeSet {
    indices: Vec<usize>,
    ambient: usize,
}

impl ModeSet {
    /// Builds a non-empty mode set. Input order does not matter; duplicates
    /// and out-of-range labels are rejected.
    pub fn new(indices: impl IntoIterator<Item = usize>, ambient: usize) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        if indices.is_empty() {
            return Err(Error::EmptySubsystem);
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidModeSet(format!(
                "duplicate mode in {indices:?}"
            )));
        }
        if let Some(&last) = indices.last() {
            if last >= ambient {
                return Err(Error::ModeOutOfRange {
                    mode: last,
                    n_modes: ambient,
                });
            }
        }
        Ok(Self { indices, ambient })
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            indices: (0..ambient).collect(),
            ambient,
        }
    }

    pub fn single(mode: usize, ambient: usize) -> Result<Self> {
        Self::new([mode], ambient)
    }

    /// Modes of the ambient system not in `self`. May be empty.
    pub fn complement(&self) -> Self {
        Self {
            indices: (0..self.ambient)
                .filter(|m| !self.indices.contains(m))
                .collect(),
            ambient: self.ambient,
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_same_ambient(other)?;
        let mut all: Vec<usize> = self.indices.iter().chain(&other.indices).copied().collect();
        all.sort_unstable();
        all.dedup();
        Ok(Self {
            indices: all,
            ambient: self.ambient,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.ambient
    }

    pub fn contains(&self, mode: usize) -> bool {
        self.indices.binary_search(&mode).is_ok()
    }

    /// Position of `mode` inside this set.
    pub fn position(&self, mode: usize) -> Option<usize> {
        self.indices.binary_search(&mode).ok()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.indices.iter().all(|m| !other.contains(*m))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.indices.iter().all(|m| other.contains(*m))
    }

    pub fn require_disjoint(&self, other: &Self) -> Result<()> {
        self.check_same_ambient(other)?;
        if self.is_disjoint(other) {
            Ok(())
        } else {
            Err(Error::Overlap {
                a: self.indices.clone(),
                b: other.indices.clone(),
            })
        }
    }

    pub fn require_subset_of(&self, other: &Self) -> Result<()> {
        self.check_same_ambient(other)?;
        if self.is_subset_of(other) {
            Ok(())
        } else {
            Err(Error::NotSubset {
                sub: self.indices.clone(),
                sup: other.indices.clone(),
            })
        }
    }

    /// This set expressed in the coordinates of `sup`: each mode is replaced
    /// by its position inside `sup`, and the ambient size becomes `|sup|`.
    pub fn relative_to(&self, sup: &Self) -> Result<Self> {
        self.require_subset_of(sup)?;
        Ok(Self {
            indices: self
                .indices
                .iter()
                .map(|m| sup.position(*m).expect("subset"))
                .collect(),
            ambient: sup.len(),
        })
    }

    fn check_same_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: other.ambient,
            })
        }
    }

    /// Every non-empty proper subset of `0..ambient`, ordered by bitmask.
    pub fn proper_subsets(ambient: usize) -> Vec<Self> {
        (1..(1usize << ambient) - 1)
            .map(|mask| Self {
                indices: (0..ambient).filter(|m| mask >> m & 1 == 1).collect(),
                ambient,
            })
            .collect()
    }
}

impl fmt::Debug for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{}", self.indices, self.ambient)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Annihilator,
    Creator,
}

/// Operator on the `2^N`-dimensional Fock space of an `N`-mode system.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    n_modes: usize,
    matrix: CMatrix,
}

impl FockOperator {
    pub fn new(n_modes: usize, matrix: CMatrix) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::NoModes);
        }
        let dim = 1usize << n_modes;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        if !linalg::is_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n_modes, matrix })
    }

    /// Wraps a matrix whose dimension is already known to be `2^n_modes`.
    pub(crate) fn from_parts(n_modes: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), 1 << n_modes);
        Self { n_modes, matrix }
    }

    /// Infers the mode count from a square power-of-two matrix.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(2),
                found: dim,
            });
        }
        Self::new(dim.trailing_zeros() as usize, matrix)
    }

    pub fn identity(n_modes: usize) -> Self {
        let dim = 1 << n_modes;
        Self {
            n_modes,
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(n_modes: usize) -> Self {
        let dim = 1 << n_modes;
        Self {
            n_modes,
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self {
            n_modes: self.n_modes,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            n_modes: self.n_modes,
            matrix: &self.matrix * z,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        linalg::distance(&self.matrix, &other.matrix)
    }

    pub fn require_same_space(&self, other: &Self) -> Result<()> {
        if self.n_modes == other.n_modes {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        }
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        Self::from_parts(
            self.n_modes,
            linalg::anticommutator(&self.matrix, &other.matrix),
        )
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self::from_parts(
            self.n_modes,
            linalg::commutator(&self.matrix, &other.matrix),
        )
    }

    pub fn apply(&self, v: &FockVector) -> CVector {
        &self.matrix * v.amplitudes()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&FockOperator> for &FockOperator {
            type Output = FockOperator;
            fn $method(self, rhs: &FockOperator) -> FockOperator {
                assert_eq!(self.n_modes, rhs.n_modes, "operators act on different Fock spaces");
                FockOperator::from_parts(self.n_modes, &self.matrix $op &rhs.matrix)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &FockOperator {
    type Output = FockOperator;
    fn neg(self) -> FockOperator {
        FockOperator::from_parts(self.n_modes, -&self.matrix)
    }
}

/// Amplitude vector on the Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    n_modes: usize,
    amplitudes: CVector,
}

impl FockVector {
    pub fn new(n_modes: usize, amplitudes: CVector) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::NoModes);
        }
        let dim = 1usize << n_modes;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            n_modes,
            amplitudes,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> FockOperator {
        FockOperator::from_parts(
            self.n_modes,
            linalg::outer(&self.amplitudes, &self.amplitudes),
        )
    }
}

/// An `N`-mode fermionic system with a resource cap on `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    n_modes: usize,
}

impl FockSpace {
    pub fn new(n_modes: usize) -> Result<Self> {
        Self::with_cap(n_modes, DEFAULT_MODE_CAP)
    }

    pub fn with_cap(n_modes: usize, cap: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::NoModes);
        }
        if n_modes > cap {
            return Err(Error::ModeCapExceeded { n_modes, cap });
        }
        Ok(Self { n_modes })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    pub fn modes(&self) -> ModeSet {
        ModeSet::full(self.n_modes)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.n_modes {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange {
                mode,
                n_modes: self.n_modes,
            })
        }
    }

    /// Bit mask selecting `mode` inside a basis index.
    #[inline]
    pub fn bit(&self, mode: usize) -> usize {
        1 << (self.n_modes - 1 - mode)
    }

    /// Jordan–Wigner realization of `f_mode` or `f_mode†`.
    pub fn ladder(&self, mode: usize, kind: LadderKind) -> Result<FockOperator> {
        self.check_mode(mode)?;
        let dim = self.dim();
        let bit = self.bit(mode);
        // modes 0..mode occupy the bits above `bit`
        let string_mask = !((bit << 1) - 1) & (dim - 1);
        let mut m = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            if b & bit == 0 {
                continue;
            }
            let sign = if (b & string_mask).count_ones().is_multiple_of(2) {
                ONE
            } else {
                -ONE
            };
            // f_mode maps occupied b to b ^ bit
            m[(b ^ bit, b)] = sign;
        }
        if kind == LadderKind::Creator {
            m = m.transpose();
        }
        Ok(FockOperator::from_parts(self.n_modes, m))
    }

    pub fn annihilator(&self, mode: usize) -> Result<FockOperator> {
        self.ladder(mode, LadderKind::Annihilator)
    }

    pub fn creator(&self, mode: usize) -> Result<FockOperator> {
        self.ladder(mode, LadderKind::Creator)
    }

    /// All annihilators `f_0 … f_{N−1}`.
    pub fn annihilators(&self) -> Vec<FockOperator> {
        (0..self.n_modes)
            .map(|m| self.annihilator(m).expect("mode in range"))
            .collect()
    }

    /// `ℙ = (−1)^{total occupation}`, diagonal in the Fock basis.
    pub fn parity(&self) -> FockOperator {
        let dim = self.dim();
        let diag = CVector::from_iterator(
            dim,
            (0..dim).map(|b| if b.count_ones() % 2 == 0 { ONE } else { -ONE }),
        );
        FockOperator::from_parts(self.n_modes, CMatrix::from_diagonal(&diag))
    }

    pub fn identity(&self) -> FockOperator {
        FockOperator::identity(self.n_modes)
    }

    pub fn basis_index(&self, occupation: &[u8]) -> Result<usize> {
        if occupation.len() != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                found: occupation.len(),
            });
        }
        let mut index = 0;
        for (mode, &occ) in occupation.iter().enumerate() {
            match occ {
                0 => {}
                1 => index |= self.bit(mode),
                _ => {
                    return Err(Error::InvalidModeSet(format!(
                        "occupation of mode {mode} must be 0 or 1, got {occ}"
                    )))
                }
            }
        }
        Ok(index)
    }

    pub fn occupation(&self, index: usize) -> Vec<u8> {
        (0..self.n_modes)
            .map(|m| u8::from(index & self.bit(m) != 0))
            .collect()
    }

    /// `f†_{i1} ⋯ f†_{ik} |Ω⟩` with creators in increasing mode order.
    pub fn basis_state(&self, occupation: &[u8]) -> Result<FockVector> {
        self.basis_index(occupation)?;
        let mut v = self.vacuum().amplitudes;
        for mode in (0..self.n_modes).rev().filter(|&m| occupation[m] == 1) {
            v = self.creator(mode)?.matrix() * v;
        }
        Ok(FockVector {
            n_modes: self.n_modes,
            amplitudes: v,
        })
    }

    pub fn vacuum(&self) -> FockVector {
        let mut v = CVector::from_element(self.dim(), ZERO);
        v[0] = ONE;
        FockVector {
            n_modes: self.n_modes,
            amplitudes: v,
        }
    }

    pub fn operator(&self, matrix: CMatrix) -> Result<FockOperator> {
        FockOperator::new(self.n_modes, matrix)
    }

    pub fn vector(&self, amplitudes: CVector) -> Result<FockVector> {
        FockVector::new(self.n_modes, amplitudes)
    }
}
