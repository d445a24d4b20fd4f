//! Phenomenal states: parity-superselected density operators on a mode
//! subset, the fermionic partial trace, product states and expectations.
//!
//! A state on subsystem `S` is stored as a `2^{|S|}` matrix in the
//! subsystem's own Fock basis: the modes of `S` are relabelled `0..|S|` in
//! increasing order and the usual most-significant-bit convention applies.

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{self, Grade};
use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockSpace, FockVector, ModeSet};
use crate::linalg::{self, CMatrix, CVector, ZERO};
use crate::transformations::{self, parity_commutator_norm};

/// Tolerance for every state invariant: Hermiticity, unit trace, positivity
/// and parity superselection.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PhenomenalState {
    subsystem: ModeSet,
    matrix: CMatrix,
}

impl PhenomenalState {
    pub fn subsystem(&self) -> &ModeSet {
        &self.subsystem
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Number of modes the state lives on, `|subsystem|`.
    pub fn n_modes(&self) -> usize {
        self.subsystem.len()
    }

    pub fn as_operator(&self) -> FockOperator {
        FockOperator::from_parts(self.n_modes(), self.matrix.clone())
    }

    /// `|ψ⟩⟨ψ|` for a vector on the subsystem's own Fock space.
    pub fn pure(subsystem: &ModeSet, psi: &FockVector) -> Result<Self> {
        if !psi.is_normalized(STATE_TOL) {
            return Err(Error::TraceNotOne {
                trace: psi.norm().powi(2),
            });
        }
        validate_phenomenal(subsystem, psi.projector().into_matrix())
    }

    pub fn distance(&self, other: &Self) -> f64 {
        linalg::distance(&self.matrix, &other.matrix)
    }
}

pub fn validate_phenomenal(subsystem: &ModeSet, matrix: CMatrix) -> Result<PhenomenalState> {
    if subsystem.is_empty() {
        return Err(Error::EmptySubsystem);
    }
    let dim = 1usize << subsystem.len();
    if matrix.nrows() != dim || matrix.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: matrix.nrows().max(matrix.ncols()),
        });
    }
    if !linalg::is_finite(&matrix) {
        return Err(Error::NonFinite);
    }
    let residual = linalg::hermitian_residual(&matrix);
    if residual > STATE_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let trace = matrix.trace();
    if (trace.re - 1.0).abs() > STATE_TOL || trace.im.abs() > STATE_TOL {
        return Err(Error::TraceNotOne { trace: trace.re });
    }
    let residual = parity_commutator_norm(&matrix);
    if residual > STATE_TOL {
        return Err(Error::SsrViolation { residual });
    }
    let hermitian = (&matrix + matrix.adjoint()) * linalg::c(0.5, 0.0);
    let min_eigenvalue = SymmetricEigen::new(hermitian).eigenvalues.min();
    if min_eigenvalue < -STATE_TOL {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(PhenomenalState {
        subsystem: subsystem.clone(),
        matrix,
    })
}

/// Applies `f†_{q_1} ⋯ f†_{q_k}` (rightmost first) to the basis state `b` of
/// an `n`-mode space, tracking the Jordan–Wigner sign. Returns `None` when a
/// mode is created twice.
fn apply_creators(n: usize, creators: &[usize], mut b: usize) -> Option<(usize, f64)> {
    let mut sign = 1.0;
    for &q in creators.iter().rev() {
        let bit = 1usize << (n - 1 - q);
        if b & bit != 0 {
            return None;
        }
        let before = b >> (n - q);
        if before.count_ones() % 2 == 1 {
            sign = -sign;
        }
        b |= bit;
    }
    Some((b, sign))
}

/// Creators named by `pattern` over `modes` (pattern bit for `modes[0]` is
/// the most significant), in increasing order of `modes`.
fn pattern_modes(pattern: usize, modes: &[usize]) -> Vec<usize> {
    let s = modes.len();
    (0..s)
        .filter(|k| pattern >> (s - 1 - k) & 1 == 1)
        .map(|k| modes[k])
        .collect()
}

/// Fermionic partial trace onto `keep`.
///
/// The state is expanded over the monomials
/// `f†_l f†_u |Ω⟩⟨Ω| f_v f_p` with the kept modes ordered first. Only the
/// components whose traced-out patterns agree (`u = v`) survive, and they are
/// summed into the matrix unit `|l⟩⟨p|` of the kept subsystem.
pub fn partial_trace(state: &PhenomenalState, keep: &ModeSet) -> Result<PhenomenalState> {
    keep.require_subset_of(&state.subsystem)?;
    let local_keep = keep.relative_to(&state.subsystem)?;
    let n = state.n_modes();
    let kept: Vec<usize> = local_keep.indices().to_vec();
    let traced: Vec<usize> = local_keep.complement().indices().to_vec();
    let s = kept.len();
    let rho = &state.matrix;

    let mut out = CMatrix::zeros(1 << s, 1 << s);
    for u in 0..(1usize << traced.len()) {
        let traced_creators = pattern_modes(u, &traced);
        // f†_l f†_u |Ω⟩ for every kept pattern l
        let kets: Vec<Option<(usize, f64)>> = (0..(1usize << s))
            .map(|l| {
                let mut creators = pattern_modes(l, &kept);
                creators.extend_from_slice(&traced_creators);
                apply_creators(n, &creators, 0)
            })
            .collect();
        for (l, ket) in kets.iter().enumerate() {
            let Some((bl, sl)) = *ket else { continue };
            for (p, bra) in kets.iter().enumerate() {
                let Some((bp, sp)) = *bra else { continue };
                // coefficient tr(E† ρ) of the real, signed matrix unit E
                out[(l, p)] += rho[(bl, bp)] * (sl * sp);
            }
        }
    }
    validate_phenomenal(keep, out)
        .map_err(|e| Error::Internal(format!("partial trace produced an invalid state: {e}")))
}

/// Independent route to the partial trace, valid for parity-superselected
/// states: reorder the modes with the fermionic permutation that puts `keep`
/// first, then take the ordinary partial trace over the trailing tensor
/// factors of the Jordan–Wigner qubit picture.
pub fn partial_trace_jordan_wigner(state: &PhenomenalState, keep: &ModeSet) -> Result<CMatrix> {
    keep.require_subset_of(&state.subsystem)?;
    let local_keep = keep.relative_to(&state.subsystem)?;
    let n = state.n_modes();
    let order: Vec<usize> = local_keep
        .indices()
        .iter()
        .chain(local_keep.complement().indices())
        .copied()
        .collect();
    let dim = 1usize << n;
    // R|b⟩ = sign · |b'⟩
    let mut image = vec![(0usize, 1.0f64); dim];
    for (b, slot) in image.iter_mut().enumerate() {
        let occ: Vec<bool> = (0..n).map(|m| b >> (n - 1 - m) & 1 == 1).collect();
        let mut target = 0;
        for (new_pos, &old) in order.iter().enumerate() {
            if occ[old] {
                target |= 1 << (n - 1 - new_pos);
            }
        }
        let mut inversions = 0;
        for x in 0..n {
            for y in (x + 1)..n {
                if occ[order[x]] && occ[order[y]] && order[x] > order[y] {
                    inversions += 1;
                }
            }
        }
        *slot = (target, if inversions % 2 == 0 { 1.0 } else { -1.0 });
    }
    let mut reordered = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let (ti, si) = image[i];
            let (tj, sj) = image[j];
            reordered[(ti, tj)] = state.matrix[(i, j)] * (si * sj);
        }
    }
    let s = keep.len();
    let tail = 1usize << (n - s);
    let mut out = CMatrix::zeros(1 << s, 1 << s);
    for x in 0..(1 << s) {
        for y in 0..(1 << s) {
            let mut acc = ZERO;
            for z in 0..tail {
                acc += reordered[(x * tail + z, y * tail + z)];
            }
            out[(x, y)] = acc;
        }
    }
    Ok(out)
}

/// `a ∧ b` for states on disjoint subsystems.
pub fn product_state(a: &PhenomenalState, b: &PhenomenalState) -> Result<PhenomenalState> {
    a.subsystem.require_disjoint(&b.subsystem)?;
    let union = a.subsystem.union(&b.subsystem)?;
    let sub_a = a.subsystem.relative_to(&union)?;
    let sub_b = b.subsystem.relative_to(&union)?;
    let ea = algebra::embed(&a.as_operator(), &sub_a)?;
    let eb = algebra::embed(&b.as_operator(), &sub_b)?;
    let product = algebra::wedge(&ea, &sub_a, &eb, &sub_b)?;
    validate_phenomenal(&union, product.into_matrix())
}

/// `tr(O ρ)` for a Hermitian, parity-even observable on the state's space.
pub fn expectation(state: &PhenomenalState, observable: &FockOperator) -> Result<f64> {
    if observable.n_modes() != state.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: state.matrix.nrows(),
            found: observable.dim(),
        });
    }
    let scale = observable.norm().max(1.0);
    let residual = linalg::hermitian_residual(observable.matrix());
    if residual > STATE_TOL * scale {
        return Err(Error::NotHermitian { residual });
    }
    if algebra::parity_grade(observable) != Grade::Even {
        return Err(Error::SsrViolation {
            residual: algebra::odd_part_residual(observable.matrix()),
        });
    }
    let value = (observable.matrix() * &state.matrix).trace();
    if value.im.abs() > STATE_TOL * scale {
        return Err(Error::Internal(format!(
            "expectation has imaginary part {}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Random mixed state: `U diag(w) U†` with a random parity-superselected `U`
/// and random weights `w`.
pub fn random_phenomenal_state(subsystem: &ModeSet, seed: u64) -> Result<PhenomenalState> {
    let space = FockSpace::new(subsystem.len())?;
    let u = transformations::random_ps_unitary(&space, transformations::derive_seed(seed, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(transformations::derive_seed(seed, 2));
    let weights: Vec<f64> = (0..space.dim())
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    let diag = CVector::from_iterator(
        space.dim(),
        weights.iter().map(|w| linalg::c(w / total, 0.0)),
    );
    let rho = u.matrix() * CMatrix::from_diagonal(&diag) * u.matrix().adjoint();
    let rho = (&rho + rho.adjoint()) * linalg::c(0.5, 0.0);
    validate_phenomenal(subsystem, rho)
}

/// Random pure state: a random parity-superselected unitary applied to a
/// basis state of random parity.
pub fn random_pure_vector(space: &FockSpace, seed: u64) -> FockVector {
    let u = transformations::random_ps_unitary(space, transformations::derive_seed(seed, 3));
    let start = (seed % space.dim() as u64) as usize;
    let amplitudes = u.matrix().column(start).into_owned();
    space.vector(amplitudes).expect("column of a unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE};

    fn space(n: usize) -> FockSpace {
        FockSpace::new(n).unwrap()
    }

    #[test]
    fn coherent_vacuum_one_superposition_is_rejected() {
        let m = CMatrix::from_element(2, 2, c(0.5, 0.0));
        let err = validate_phenomenal(&ModeSet::full(1), m).unwrap_err();
        assert_eq!(err.code(), "ssr_violation");
    }

    #[test]
    fn valid_states_are_accepted() {
        let vac = space(1).vacuum().projector().into_matrix();
        assert!(validate_phenomenal(&ModeSet::full(1), vac).is_ok());
        let mut mix = CMatrix::zeros(4, 4);
        mix[(0, 0)] = c(0.5, 0.0);
        mix[(3, 3)] = c(0.5, 0.0);
        assert!(validate_phenomenal(&ModeSet::full(2), mix).is_ok());
    }

    #[test]
    fn each_invariant_has_its_own_code() {
        let full = ModeSet::full(1);
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(0.0, 1.0);
        m[(0, 0)] = ONE;
        assert_eq!(
            validate_phenomenal(&full, m).unwrap_err().code(),
            "not_hermitian"
        );
        let m = CMatrix::identity(2, 2);
        assert_eq!(
            validate_phenomenal(&full, m).unwrap_err().code(),
            "trace_not_one"
        );
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        assert_eq!(
            validate_phenomenal(&full, m).unwrap_err().code(),
            "not_positive"
        );
        let m = CMatrix::identity(4, 4);
        assert_eq!(
            validate_phenomenal(&full, m).unwrap_err().code(),
            "dimension_mismatch"
        );
    }

    #[test]
    fn partial_trace_of_single_particle_superposition() {
        let s = space(2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = s.basis_state(&[0, 1]).unwrap().amplitudes() * c(h, 0.0)
            + s.basis_state(&[1, 0]).unwrap().amplitudes() * c(h, 0.0);
        let rho = PhenomenalState::pure(&ModeSet::full(2), &s.vector(psi).unwrap()).unwrap();
        let reduced = partial_trace(&rho, &ModeSet::single(0, 2).unwrap()).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0)]));
        assert!(linalg::distance(reduced.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn partial_trace_identity_on_full_set() {
        let full = ModeSet::full(3);
        let rho = random_phenomenal_state(&full, 11).unwrap();
        let same = partial_trace(&rho, &full).unwrap();
        assert!(same.distance(&rho) < 1e-15);
    }

    #[test]
    fn partial_trace_requires_subset() {
        let rho = random_phenomenal_state(&ModeSet::new([0, 1], 3).unwrap(), 1).unwrap();
        let err = partial_trace(&rho, &ModeSet::single(2, 3).unwrap()).unwrap_err();
        assert_eq!(err.code(), "not_subset");
    }

    #[test]
    fn product_of_vacua_and_marginals() {
        let a = ModeSet::single(0, 2).unwrap();
        let b = ModeSet::single(1, 2).unwrap();
        let vac = space(1).vacuum();
        let va = PhenomenalState::pure(&a, &vac).unwrap();
        let vb = PhenomenalState::pure(&b, &vac).unwrap();
        let prod = product_state(&va, &vb).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = ONE;
        assert_eq!(prod.matrix(), &expected);
        assert!(partial_trace(&prod, &b).unwrap().distance(&vb) < 1e-15);
    }

    #[test]
    fn product_of_mixed_and_occupied() {
        let a = ModeSet::single(0, 2).unwrap();
        let b = ModeSet::single(1, 2).unwrap();
        let half = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0)]));
        let occupied = CMatrix::from_diagonal(&CVector::from_vec(vec![ZERO, ONE]));
        let ra = validate_phenomenal(&a, half).unwrap();
        let rb = validate_phenomenal(&b, occupied).unwrap();
        let prod = product_state(&ra, &rb).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![
            ZERO,
            c(0.5, 0.0),
            ZERO,
            c(0.5, 0.0),
        ]));
        assert!(linalg::distance(prod.matrix(), &expected) < 1e-15);
        assert!(partial_trace(&prod, &a).unwrap().distance(&ra) < 1e-10);
        assert!(partial_trace(&prod, &b).unwrap().distance(&rb) < 1e-10);
        assert_eq!(product_state(&ra, &ra).unwrap_err().code(), "overlap");
    }

    #[test]
    fn number_operator_expectations() {
        let s = space(1);
        let n0 = &s.creator(0).unwrap() * &s.annihilator(0).unwrap();
        let full = ModeSet::full(1);
        let vac = PhenomenalState::pure(&full, &s.vacuum()).unwrap();
        let one = PhenomenalState::pure(&full, &s.basis_state(&[1]).unwrap()).unwrap();
        assert_eq!(expectation(&vac, &n0).unwrap(), 0.0);
        assert_eq!(expectation(&one, &n0).unwrap(), 1.0);
        let f = s.annihilator(0).unwrap();
        assert_eq!(
            expectation(&vac, &(&f + &f.dagger())).unwrap_err().code(),
            "ssr_violation"
        );
        assert_eq!(
            expectation(&vac, &f.dagger()).unwrap_err().code(),
            "not_hermitian"
        );
    }

    #[test]
    fn sign_sensitive_partial_trace_matches_reordered_oracle() {
        // keep {0, 2}: the traced middle mode sits between kept modes, so the
        // fermionic and naive qubit partial traces differ
        let full = ModeSet::full(3);
        let keep = ModeSet::new([0, 2], 3).unwrap();
        for seed in 0..10 {
            let rho = random_phenomenal_state(&full, seed).unwrap();
            let fermionic = partial_trace(&rho, &keep).unwrap();
            let oracle = partial_trace_jordan_wigner(&rho, &keep).unwrap();
            assert!(linalg::distance(fermionic.matrix(), &oracle) < 1e-12);
        }
    }
}
