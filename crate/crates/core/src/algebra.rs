//! Operator-space geometry: Hilbert–Schmidt products, monomial bases of
//! subsystems, parity grading, locality and the wedge product.
//!
//! The workhorse is [`LadderFamily`], an ordered list of annihilation-like
//! operators `a_1 … a_s` acting on a common space. With it every monomial
//!
//! ```text
//! E_{l,p} = a†_{l_1} ⋯ a†_{l_m} · (Π_k a_k a_k†) · a_{p_r} ⋯ a_{p_1}
//! ```
//!
//! can be formed. For the canonical ladder operators of a subsystem these are
//! the matrix units of the subsystem, embedded in the ambient Fock space; for
//! Heisenberg-evolved descriptors they are the conjugated matrix units
//! `U† E_{l,p} U`, obtained without knowing `U`.
//!
//! Occupation patterns `l`, `p` over a family of `s` operators are encoded as
//! integers with family position 0 in the most significant of `s` bits, so a
//! pattern index is also the basis index in the subsystem's own Fock space.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockSpace, ModeSet};
use crate::linalg::{self, CMatrix, I, ONE, ZERO};

/// Tolerance on relative Frobenius residuals used for parity and locality
/// decisions.
pub const ALGEBRA_TOL: f64 = 1e-10;

/// Ordered family of annihilation operators on a space of dimension `dim`.
#[derive(Debug, Clone)]
pub struct LadderFamily {
    dim: usize,
    annihilators: Vec<CMatrix>,
    creators: Vec<CMatrix>,
}

impl LadderFamily {
    /// Canonical Jordan–Wigner annihilators of `subsystem`, embedded in the
    /// ambient Fock space.
    pub fn canonical(subsystem: &ModeSet) -> Result<Self> {
        let space = FockSpace::with_cap(subsystem.ambient(), usize::MAX)?;
        let ops = subsystem
            .indices()
            .iter()
            .map(|&m| space.annihilator(m).map(FockOperator::into_matrix))
            .collect::<Result<Vec<_>>>()?;
        Self::from_matrices(ops)
    }

    pub fn from_matrices(annihilators: Vec<CMatrix>) -> Result<Self> {
        let dim = annihilators.first().ok_or(Error::EmptySubsystem)?.nrows();
        for a in &annihilators {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.nrows(),
                });
            }
        }
        let creators = annihilators.iter().map(|a| a.adjoint()).collect();
        Ok(Self {
            dim,
            annihilators,
            creators,
        })
    }

    pub fn len(&self) -> usize {
        self.annihilators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annihilators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of occupation patterns, `2^s`.
    pub fn patterns(&self) -> usize {
        1 << self.len()
    }

    /// Family position of the leftmost operator of a pattern (its most
    /// significant set bit).
    fn leading_position(&self, pattern: usize) -> usize {
        let top = usize::BITS - 1 - pattern.leading_zeros();
        self.len() - 1 - top as usize
    }

    pub fn annihilator(&self, position: usize) -> &CMatrix {
        &self.annihilators[position]
    }

    /// `Π_k a_k a_k†`, the vacuum projector of the family.
    pub fn vacuum_projector(&self) -> CMatrix {
        let mut v = CMatrix::identity(self.dim, self.dim);
        for (a, ad) in self.annihilators.iter().zip(&self.creators) {
            v = v * a * ad;
        }
        v
    }

    /// `A_l = a†_{l_1} ⋯ a†_{l_m}` for every pattern `l`, creators in
    /// increasing position order.
    pub fn creation_strings(&self) -> Vec<CMatrix> {
        let mut out: Vec<CMatrix> = Vec::with_capacity(self.patterns());
        out.push(CMatrix::identity(self.dim, self.dim));
        for l in 1..self.patterns() {
            let k = self.leading_position(l);
            let rest = l ^ (1 << (self.len() - 1 - k));
            out.push(&self.creators[k] * &out[rest]);
        }
        out
    }

    pub fn monomial(&self, l: usize, p: usize) -> CMatrix {
        let strings = self.creation_strings();
        &strings[l] * self.vacuum_projector() * strings[p].adjoint()
    }

    /// `Σ_{l,p} coeffs[l,p] · E_{l,p}`.
    pub fn substitute(&self, coeffs: &CMatrix) -> Result<CMatrix> {
        let n = self.patterns();
        if coeffs.nrows() != n || coeffs.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: coeffs.nrows(),
            });
        }
        let strings = self.creation_strings();
        let daggers: Vec<CMatrix> = strings.iter().map(|a| a.adjoint()).collect();
        let vac = self.vacuum_projector();
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (l, string) in strings.iter().enumerate() {
            let row = coeffs.row(l);
            if row.iter().all(|z| *z == ZERO) {
                continue;
            }
            let mut right = CMatrix::zeros(self.dim, self.dim);
            for (p, z) in row.iter().enumerate() {
                if *z != ZERO {
                    right += &daggers[p] * *z;
                }
            }
            out += string * &vac * right;
        }
        Ok(out)
    }

    /// Coefficients of `o` in the monomial basis, assuming the family is
    /// unitarily conjugate to canonical ladder operators so that the monomials
    /// are Hilbert–Schmidt orthogonal with squared norm `dim / 2^s`.
    pub fn expand(&self, o: &CMatrix) -> Result<CMatrix> {
        if o.nrows() != self.dim || o.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: o.nrows(),
            });
        }
        let n = self.patterns();
        let norm_sq = (self.dim / n) as f64;
        let strings = self.creation_strings();
        let vac = self.vacuum_projector();
        let mut coeffs = CMatrix::zeros(n, n);
        // tr(E_{l,p}† o) = tr(V A_l† o A_p)
        for l in 0..n {
            let y = &vac * strings[l].adjoint() * o;
            for p in 0..n {
                let a = &strings[p];
                let mut acc = ZERO;
                for j in 0..self.dim {
                    for i in 0..self.dim {
                        let aji = a[(j, i)];
                        if aji != ZERO {
                            acc += y[(i, j)] * aji;
                        }
                    }
                }
                coeffs[(l, p)] = acc / norm_sq;
            }
        }
        Ok(coeffs)
    }
}

/// `tr(a† b)`
pub fn hs_inner(a: &FockOperator, b: &FockOperator) -> Result<Complex64> {
    a.require_same_space(b)?;
    Ok(a.matrix()
        .iter()
        .zip(b.matrix().iter())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Monomial operator basis of a subsystem, embedded in the ambient space.
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    pub subsystem: ModeSet,
    pub elements: Vec<FockOperator>,
    /// `(l, p)` occupation patterns over the subsystem, one per element.
    pub labels: Vec<(Vec<u8>, Vec<u8>)>,
    /// Squared Hilbert–Schmidt norm shared by every element, `2^{N−|S|}`.
    pub norm_sq: f64,
}

pub fn monomial_basis(subsystem: &ModeSet) -> Result<MonomialBasis> {
    if subsystem.is_empty() {
        return Err(Error::EmptySubsystem);
    }
    let family = LadderFamily::canonical(subsystem)?;
    let s = subsystem.len();
    let n = subsystem.ambient();
    let strings = family.creation_strings();
    let vac = family.vacuum_projector();
    let local = FockSpace::with_cap(s, usize::MAX)?;
    let mut elements = Vec::with_capacity(1 << (2 * s));
    let mut labels = Vec::with_capacity(1 << (2 * s));
    for (l, left_string) in strings.iter().enumerate() {
        let left = left_string * &vac;
        for (p, right_string) in strings.iter().enumerate() {
            elements.push(FockOperator::from_parts(n, &left * right_string.adjoint()));
            labels.push((local.occupation(l), local.occupation(p)));
        }
    }
    Ok(MonomialBasis {
        subsystem: subsystem.clone(),
        elements,
        labels,
        norm_sq: (1usize << (n - s)) as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grade {
    Even,
    Odd,
    Mixed,
}

/// `ℙ o ℙ` computed entrywise from the diagonal parity signs.
fn parity_conjugate(o: &CMatrix) -> CMatrix {
    CMatrix::from_fn(o.nrows(), o.ncols(), |i, j| {
        if (i.count_ones() + j.count_ones()) % 2 == 0 {
            o[(i, j)]
        } else {
            -o[(i, j)]
        }
    })
}

/// Norm of the parity-odd part of `o`, relative to `‖o‖`.
pub fn odd_part_residual(o: &CMatrix) -> f64 {
    let norm = o.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (o - parity_conjugate(o)).norm() / (2.0 * norm)
}

pub fn parity_grade(o: &FockOperator) -> Grade {
    let m = o.matrix();
    let norm = m.norm();
    if norm == 0.0 {
        return Grade::Even;
    }
    let conj = parity_conjugate(m);
    if (&conj - m).norm() <= ALGEBRA_TOL * norm {
        Grade::Even
    } else if (&conj + m).norm() <= ALGEBRA_TOL * norm {
        Grade::Odd
    } else {
        Grade::Mixed
    }
}

fn require_subsystem_of(o: &FockOperator, subsystem: &ModeSet) -> Result<()> {
    if subsystem.ambient() != o.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: o.n_modes(),
            found: subsystem.ambient(),
        });
    }
    if subsystem.is_empty() {
        return Err(Error::EmptySubsystem);
    }
    Ok(())
}

/// Relative distance from `o` to the span of the monomial basis of
/// `subsystem`.
pub fn locality_residual(o: &FockOperator, subsystem: &ModeSet) -> Result<f64> {
    require_subsystem_of(o, subsystem)?;
    let norm = o.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let family = LadderFamily::canonical(subsystem)?;
    let coeffs = family.expand(o.matrix())?;
    let projected = family.substitute(&coeffs)?;
    Ok(linalg::distance(&projected, o.matrix()) / norm)
}

/// Whether `o` is a polynomial in the ladder operators of `subsystem` alone.
pub fn is_local_to(o: &FockOperator, subsystem: &ModeSet) -> bool {
    locality_residual(o, subsystem)
        .map(|r| r <= ALGEBRA_TOL)
        .unwrap_or(false)
}

/// Cross-check for even operators: `o` commutes with `f_j`, `f_j†` for every
/// mode `j` outside `subsystem`.
pub fn commutes_outside(o: &FockOperator, subsystem: &ModeSet) -> Result<bool> {
    require_subsystem_of(o, subsystem)?;
    let space = FockSpace::with_cap(o.n_modes(), usize::MAX)?;
    let scale = o.norm().max(f64::MIN_POSITIVE);
    for &j in subsystem.complement().indices() {
        let f = space.annihilator(j)?;
        if o.commutator(&f).norm() > ALGEBRA_TOL * scale
            || o.commutator(&f.dagger()).norm() > ALGEBRA_TOL * scale
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Embeds an operator on the subsystem's own Fock space (`2^{|S|}`
/// dimensional, modes relabelled in order) into the ambient space by
/// monomial substitution.
pub fn embed(local: &FockOperator, subsystem: &ModeSet) -> Result<FockOperator> {
    if local.n_modes() != subsystem.len() {
        return Err(Error::DimensionMismatch {
            expected: 1 << subsystem.len(),
            found: local.dim(),
        });
    }
    let family = LadderFamily::canonical(subsystem)?;
    Ok(FockOperator::from_parts(
        subsystem.ambient(),
        family.substitute(local.matrix())?,
    ))
}

/// Inverse of [`embed`] for operators local to `subsystem`.
pub fn restrict(o: &FockOperator, subsystem: &ModeSet) -> Result<FockOperator> {
    let residual = locality_residual(o, subsystem)?;
    if residual > ALGEBRA_TOL {
        return Err(Error::NotLocal {
            modes: subsystem.indices().to_vec(),
            residual,
        });
    }
    let family = LadderFamily::canonical(subsystem)?;
    Ok(FockOperator::from_parts(
        subsystem.len(),
        family.expand(o.matrix())?,
    ))
}

/// Product `a·b` of operators local to disjoint subsystems.
pub fn wedge(
    a: &FockOperator,
    sub_a: &ModeSet,
    b: &FockOperator,
    sub_b: &ModeSet,
) -> Result<FockOperator> {
    a.require_same_space(b)?;
    sub_a.require_disjoint(sub_b)?;
    for (o, s) in [(a, sub_a), (b, sub_b)] {
        let residual = locality_residual(o, s)?;
        if residual > ALGEBRA_TOL {
            return Err(Error::NotLocal {
                modes: s.indices().to_vec(),
                residual,
            });
        }
    }
    if parity_grade(a) != Grade::Even && parity_grade(b) != Grade::Even {
        return Err(Error::OddWedge);
    }
    Ok(a * b)
}

/// `q_j = ½(σˣ_j + iσʸ_j)` on `n_qubits` tensor factors, no Jordan–Wigner
/// string. Qubit 0 is the most significant tensor factor.
pub fn qubit_ladder(n_qubits: usize, j: usize) -> Result<FockOperator> {
    if j >= n_qubits {
        return Err(Error::ModeOutOfRange {
            mode: j,
            n_modes: n_qubits,
        });
    }
    let x = pauli(n_qubits, j, Pauli::X)?;
    let y = pauli(n_qubits, j, Pauli::Y)?;
    Ok(FockOperator::from_parts(
        n_qubits,
        (x.matrix() + y.matrix() * I) * Complex64::from(0.5),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Single-qubit Pauli acting on factor `j` of `n_qubits`.
pub fn pauli(n_qubits: usize, j: usize, kind: Pauli) -> Result<FockOperator> {
    if j >= n_qubits {
        return Err(Error::ModeOutOfRange {
            mode: j,
            n_modes: n_qubits,
        });
    }
    let dim = 1usize << n_qubits;
    let bit = 1usize << (n_qubits - 1 - j);
    let mut m = CMatrix::zeros(dim, dim);
    for b in 0..dim {
        let occupied = b & bit != 0;
        match kind {
            Pauli::X => m[(b ^ bit, b)] = ONE,
            // σʸ|0⟩ = i|1⟩, σʸ|1⟩ = −i|0⟩
            Pauli::Y => m[(b ^ bit, b)] = if occupied { -I } else { I },
            Pauli::Z => m[(b, b)] = if occupied { -ONE } else { ONE },
        }
    }
    Ok(FockOperator::from_parts(n_qubits, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn space(n: usize) -> FockSpace {
        FockSpace::new(n).unwrap()
    }

    #[test]
    fn hs_inner_examples() {
        let s2 = space(2);
        assert_eq!(
            hs_inner(&s2.identity(), &s2.identity()).unwrap(),
            c(4.0, 0.0)
        );
        let f = space(1).annihilator(0).unwrap();
        assert_eq!(hs_inner(&f, &f).unwrap(), c(1.0, 0.0));
        let f0 = s2.annihilator(0).unwrap();
        let f1 = s2.annihilator(1).unwrap();
        assert_eq!(hs_inner(&f0, &f1).unwrap(), ZERO);
        assert!(hs_inner(&f0, &f).is_err());
    }

    #[test]
    fn single_mode_basis_is_matrix_units() {
        let basis = monomial_basis(&ModeSet::full(1)).unwrap();
        assert_eq!(basis.elements.len(), 4);
        for (k, e) in basis.elements.iter().enumerate() {
            let (l, p) = (k / 2, k % 2);
            let mut unit = CMatrix::zeros(2, 2);
            unit[(l, p)] = ONE;
            assert_eq!(e.matrix(), &unit);
        }
        assert_eq!(basis.labels[1], (vec![0], vec![1]));
    }

    #[test]
    fn subsystem_basis_norms_in_two_modes() {
        let basis = monomial_basis(&ModeSet::single(0, 2).unwrap()).unwrap();
        assert_eq!(basis.norm_sq, 2.0);
        for e in &basis.elements {
            assert_eq!(hs_inner(e, e).unwrap(), c(2.0, 0.0));
        }
    }

    #[test]
    fn monomial_bases_are_orthogonal() {
        for n in 1..=4 {
            for sub in ModeSet::proper_subsets(n)
                .into_iter()
                .chain([ModeSet::full(n)])
            {
                let basis = monomial_basis(&sub).unwrap();
                assert_eq!(basis.elements.len(), 1 << (2 * sub.len()));
                for (a, ea) in basis.elements.iter().enumerate() {
                    for (b, eb) in basis.elements.iter().enumerate() {
                        let ip = hs_inner(ea, eb).unwrap();
                        let expected = if a == b { basis.norm_sq } else { 0.0 };
                        assert!((ip - c(expected, 0.0)).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn parity_grades() {
        let s = space(2);
        let f0 = s.annihilator(0).unwrap();
        let f1 = s.annihilator(1).unwrap();
        let hop = &f0.dagger() * &f1;
        assert_eq!(parity_grade(&f0), Grade::Odd);
        assert_eq!(parity_grade(&hop), Grade::Even);
        assert_eq!(parity_grade(&(&f0 + &hop)), Grade::Mixed);
    }

    #[test]
    fn locality_examples() {
        let s3 = space(3);
        let n0 = &s3.creator(0).unwrap() * &s3.annihilator(0).unwrap();
        assert!(is_local_to(&n0, &ModeSet::single(0, 3).unwrap()));
        let s2 = space(2);
        let hop = &s2.creator(0).unwrap() * &s2.annihilator(1).unwrap();
        let m0 = ModeSet::single(0, 2).unwrap();
        assert!(!is_local_to(&hop, &m0));
        assert!(!is_local_to(&s2.parity(), &m0));
        assert!(is_local_to(&s2.parity(), &ModeSet::full(2)));
        // odd operators are decided by the support test too
        let f1 = s3.annihilator(1).unwrap();
        assert!(is_local_to(&f1, &ModeSet::single(1, 3).unwrap()));
        assert!(!is_local_to(&f1, &ModeSet::new([0, 2], 3).unwrap()));
    }

    #[test]
    fn embed_restrict_round_trip() {
        let sub = ModeSet::new([0, 2], 3).unwrap();
        let mut local = CMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                local[(i, j)] = c((i * 3 + j) as f64, (i as f64) - (j as f64));
            }
        }
        let local = FockOperator::new(2, local).unwrap();
        let emb = embed(&local, &sub).unwrap();
        assert!(is_local_to(&emb, &sub));
        let back = restrict(&emb, &sub).unwrap();
        assert!(back.distance(&local) < 1e-12);
    }

    #[test]
    fn wedge_examples() {
        let s = space(2);
        let a = ModeSet::single(0, 2).unwrap();
        let b = ModeSet::single(1, 2).unwrap();
        let id = s.identity();
        assert_eq!(wedge(&id, &a, &id, &b).unwrap(), id);

        let n0 = &s.creator(0).unwrap() * &s.annihilator(0).unwrap();
        let n1 = &s.creator(1).unwrap() * &s.annihilator(1).unwrap();
        let nn = wedge(&n0, &a, &n1, &b).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected[(3, 3)] = ONE;
        assert_eq!(nn.matrix(), &expected);

        let v0 = &s.annihilator(0).unwrap() * &s.creator(0).unwrap();
        let v1 = &s.annihilator(1).unwrap() * &s.creator(1).unwrap();
        let vac = wedge(&v0, &a, &v1, &b).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = ONE;
        assert_eq!(vac.matrix(), &expected);
    }

    #[test]
    fn wedge_errors() {
        let s = space(2);
        let a = ModeSet::single(0, 2).unwrap();
        let b = ModeSet::single(1, 2).unwrap();
        let f0 = s.annihilator(0).unwrap();
        let f1 = s.annihilator(1).unwrap();
        assert_eq!(wedge(&f0, &a, &f1, &b).unwrap_err(), Error::OddWedge);
        assert_eq!(wedge(&f0, &a, &f1, &a).unwrap_err().code(), "overlap");
        assert_eq!(wedge(&f1, &a, &f0, &b).unwrap_err().code(), "not_local");
        // one odd, one even is fine
        let n1 = &f1.dagger() * &f1;
        assert!(wedge(&f0, &a, &n1, &b).is_ok());
    }

    #[test]
    fn qubit_ladder_relations() {
        let q = qubit_ladder(1, 0).unwrap();
        assert_eq!(
            q.matrix(),
            &CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
        );
        let q0 = qubit_ladder(2, 0).unwrap();
        let q1 = qubit_ladder(2, 1).unwrap();
        assert_eq!(q0.commutator(&q1).norm(), 0.0);
        assert_eq!(q0.commutator(&q1.dagger()).norm(), 0.0);
        assert_eq!((&q0 * &q0).norm(), 0.0);
        assert_eq!(
            (&q0.anticommutator(&q0.dagger()) - &FockOperator::identity(2)).norm(),
            0.0
        );
        let x0 = pauli(2, 0, Pauli::X).unwrap();
        let y0 = pauli(2, 0, Pauli::Y).unwrap();
        assert_eq!(&q0 + &q0.dagger(), x0);
        assert_eq!((&q0 - &q0.dagger()).scale(-I), y0);
        assert!(qubit_ladder(2, 2).is_err());
    }
}
