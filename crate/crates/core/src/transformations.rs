//! The group of parity-superselected unitaries.

use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::{self, Grade};
use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockSpace, ModeSet};
use crate::linalg::{self, CMatrix, I, ONE};

/// Unitarity and parity-commutation tolerance (absolute Frobenius).
pub const UNITARY_TOL: f64 = 1e-10;

/// A unitary on the Fock space that commutes with the parity operator.
#[derive(Debug, Clone, PartialEq)]
pub struct PSUnitary {
    op: FockOperator,
}

/// `‖U ℙ − ℙ U‖_F`, computed entrywise.
pub fn parity_commutator_norm(m: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if (i.count_ones() + j.count_ones()) % 2 == 1 {
                acc += 4.0 * m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

impl PSUnitary {
    pub fn validate(op: FockOperator) -> Result<Self> {
        Self::validate_with_tol(op, UNITARY_TOL)
    }

    pub fn validate_with_tol(op: FockOperator, tol: f64) -> Result<Self> {
        let residual = linalg::unitarity_residual(op.matrix());
        if residual > tol {
            return Err(Error::NotUnitary { residual });
        }
        let residual = parity_commutator_norm(op.matrix());
        if residual > tol {
            return Err(Error::SsrViolation { residual });
        }
        Ok(Self { op })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            op: FockOperator::identity(n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.op.n_modes()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn as_operator(&self) -> &FockOperator {
        &self.op
    }

    pub fn dagger(&self) -> Self {
        Self {
            op: self.op.dagger(),
        }
    }

    /// `u† · x · u`, the Heisenberg-picture action on an operator.
    pub fn conjugate(&self, x: &FockOperator) -> FockOperator {
        &(&self.op.dagger() * x) * &self.op
    }

    pub fn phase_blind_distance(&self, other: &Self) -> f64 {
        linalg::phase_blind_distance(self.matrix(), other.matrix())
    }

    /// Same unitary with its global phase fixed so the first entry of
    /// modulus above 1e-6 (row-major) is real and positive.
    pub fn canonical_phase(&self) -> Self {
        let m = linalg::canonicalize_phase(self.matrix(), 1e-6);
        Self {
            op: FockOperator::from_parts(self.n_modes(), m),
        }
    }
}

impl Mul<&PSUnitary> for &PSUnitary {
    type Output = PSUnitary;
    fn mul(self, rhs: &PSUnitary) -> PSUnitary {
        PSUnitary {
            op: &self.op * &rhs.op,
        }
    }
}

pub fn validate_ps_unitary(matrix: CMatrix) -> Result<PSUnitary> {
    PSUnitary::validate(FockOperator::from_matrix(matrix)?)
}

/// `exp(i·h)` for a Hermitian, parity-even generator `h`.
pub fn exp_hamiltonian(h: &FockOperator) -> Result<PSUnitary> {
    let scale = h.norm().max(1.0);
    let residual = linalg::hermitian_residual(h.matrix());
    if residual > UNITARY_TOL * scale {
        return Err(Error::NotHermitian { residual });
    }
    if algebra::parity_grade(h) != Grade::Even {
        return Err(Error::SsrViolation {
            residual: algebra::odd_part_residual(h.matrix()),
        });
    }
    let u = linalg::expm(&(h.matrix() * I));
    PSUnitary::validate(FockOperator::from_parts(h.n_modes(), u))
}

/// Parity-even convenience gates. The sign conventions are part of the
/// scenario file format:
///
/// * `tunneling(i, j, θ) = exp(θ (f_i† f_j − f_j† f_i))`
/// * `phase(i, θ) = exp(iθ f_i† f_i)`
/// * `interaction(i, j, θ) = exp(iθ f_i† f_i f_j† f_j)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case", deny_unknown_fields)]
pub enum NamedGate {
    Tunneling { i: usize, j: usize, theta: f64 },
    Phase { i: usize, theta: f64 },
    Interaction { i: usize, j: usize, theta: f64 },
}

impl NamedGate {
    pub fn modes(&self) -> Vec<usize> {
        match *self {
            NamedGate::Tunneling { i, j, .. } | NamedGate::Interaction { i, j, .. } => vec![i, j],
            NamedGate::Phase { i, .. } => vec![i],
        }
    }

    /// Hermitian generator `h` with `gate = exp(i h)`.
    pub fn generator(&self, space: &FockSpace) -> Result<FockOperator> {
        let modes = self.modes();
        if modes.len() == 2 && modes[0] == modes[1] {
            return Err(Error::InvalidModeSet(format!(
                "gate needs distinct modes, got {modes:?}"
            )));
        }
        let number =
            |m: usize| -> Result<FockOperator> { Ok(&space.creator(m)? * &space.annihilator(m)?) };
        match *self {
            NamedGate::Tunneling { i, j, theta } => {
                let hop = &(&space.creator(i)? * &space.annihilator(j)?)
                    - &(&space.creator(j)? * &space.annihilator(i)?);
                // exp(θ K) = exp(i · (−iθ K))
                Ok(hop.scale(Complex64::new(0.0, -theta)))
            }
            NamedGate::Phase { i, theta } => Ok(number(i)?.scale(theta.into())),
            NamedGate::Interaction { i, j, theta } => {
                Ok((&number(i)? * &number(j)?).scale(theta.into()))
            }
        }
    }
}

pub fn named_gate(gate: NamedGate, space: &FockSpace) -> Result<PSUnitary> {
    exp_hamiltonian(&gate.generator(space)?)
}

/// Whether `u` is a polynomial in the ladder operators of `subsystem`.
/// Global phases are local to every subsystem.
pub fn is_local_unitary(u: &PSUnitary, subsystem: &ModeSet) -> bool {
    algebra::is_local_to(u.as_operator(), subsystem)
}

/// The second locality criterion: `u† f_j u = f_j` for every mode outside
/// `subsystem`.
pub fn leaves_outside_invariant(u: &PSUnitary, subsystem: &ModeSet) -> Result<bool> {
    let space = FockSpace::with_cap(u.n_modes(), usize::MAX)?;
    for &j in subsystem.complement().indices() {
        let f = space.annihilator(j)?;
        if u.conjugate(&f).distance(&f) > UNITARY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Splitmix64 step, used to derive independent seeds from one user seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Haar-distributed `dim × dim` unitary: QR of a complex Ginibre matrix with
/// the phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Independent Haar blocks on the even and odd parity sectors.
pub fn random_ps_unitary(space: &FockSpace, seed: u64) -> PSUnitary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = space.dim();
    let even: Vec<usize> = (0..dim).filter(|b| b.count_ones() % 2 == 0).collect();
    let odd: Vec<usize> = (0..dim).filter(|b| b.count_ones() % 2 == 1).collect();
    let mut m = CMatrix::zeros(dim, dim);
    for sector in [&even, &odd] {
        let block = haar_unitary(sector.len(), &mut rng);
        for (a, &i) in sector.iter().enumerate() {
            for (b, &j) in sector.iter().enumerate() {
                m[(i, j)] = block[(a, b)];
            }
        }
    }
    PSUnitary {
        op: FockOperator::from_parts(space.n_modes(), m),
    }
}

/// Random parity-superselected unitary built on the subsystem's own Fock
/// space and embedded into the ambient space by monomial substitution.
pub fn local_random_ps_unitary(subsystem: &ModeSet, seed: u64) -> Result<PSUnitary> {
    if subsystem.is_empty() {
        return Err(Error::EmptySubsystem);
    }
    FockSpace::new(subsystem.ambient())?;
    let local_space = FockSpace::with_cap(subsystem.len(), usize::MAX)?;
    let local = random_ps_unitary(&local_space, seed);
    embed_unitary(&local, subsystem)
}

/// Embeds a unitary on the subsystem's own Fock space into the ambient space.
pub fn embed_unitary(local: &PSUnitary, subsystem: &ModeSet) -> Result<PSUnitary> {
    let op = algebra::embed(local.as_operator(), subsystem)?;
    PSUnitary::validate(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ZERO};
    use std::f64::consts::PI;

    fn space(n: usize) -> FockSpace {
        FockSpace::new(n).unwrap()
    }

    #[test]
    fn identity_is_accepted() {
        assert!(validate_ps_unitary(CMatrix::identity(4, 4)).is_ok());
    }

    #[test]
    fn hadamard_is_rejected_for_ssr() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
        assert_eq!(validate_ps_unitary(m).unwrap_err().code(), "ssr_violation");
        let not_unitary = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), ZERO, ZERO, ONE]);
        assert_eq!(
            validate_ps_unitary(not_unitary).unwrap_err().code(),
            "not_unitary"
        );
    }

    #[test]
    fn number_phase_is_accepted_for_any_angle() {
        let s = space(2);
        for theta in [0.0, 0.3, PI, 17.0] {
            let u = named_gate(NamedGate::Phase { i: 0, theta }, &s).unwrap();
            assert!((u.matrix()[(2, 2)] - Complex64::from_polar(1.0, theta)).norm() < 1e-12);
        }
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = exp_hamiltonian(&FockOperator::zeros(3)).unwrap();
        assert!(u.as_operator().distance(&FockOperator::identity(3)) < 1e-15);
    }

    #[test]
    fn odd_generator_is_rejected() {
        let s = space(2);
        let f = s.annihilator(0).unwrap();
        let h = &f + &f.dagger();
        assert_eq!(exp_hamiltonian(&h).unwrap_err().code(), "ssr_violation");
        let non_herm = &f.dagger() * &s.annihilator(1).unwrap();
        assert_eq!(
            exp_hamiltonian(&non_herm).unwrap_err().code(),
            "not_hermitian"
        );
    }

    #[test]
    fn tunneling_quarter_turn_moves_particle() {
        // Schrödinger: U|10⟩ = cos θ |10⟩ − sin θ |01⟩
        let s = space(2);
        let u = named_gate(
            NamedGate::Tunneling {
                i: 0,
                j: 1,
                theta: PI / 2.0,
            },
            &s,
        )
        .unwrap();
        let out = u.matrix() * s.basis_state(&[1, 0]).unwrap().amplitudes();
        let expected = -s.basis_state(&[0, 1]).unwrap().amplitudes();
        assert!((out - expected).norm() < 1e-12);
    }

    #[test]
    fn interaction_is_diagonal_and_fixes_vacuum() {
        let s = space(2);
        let u = named_gate(
            NamedGate::Interaction {
                i: 0,
                j: 1,
                theta: 0.9,
            },
            &s,
        )
        .unwrap();
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| u.matrix()[(i, j)].norm())
            .sum();
        assert!(off < 1e-14);
        assert!((u.matrix()[(0, 0)] - ONE).norm() < 1e-14);
        assert!((u.matrix()[(3, 3)] - Complex64::from_polar(1.0, 0.9)).norm() < 1e-12);
    }

    #[test]
    fn phase_zero_is_identity_and_gate_errors() {
        let s = space(2);
        let u = named_gate(NamedGate::Phase { i: 0, theta: 0.0 }, &s).unwrap();
        assert!(u.as_operator().distance(&s.identity()) < 1e-15);
        assert!(named_gate(NamedGate::Phase { i: 2, theta: 0.0 }, &s).is_err());
        assert!(named_gate(
            NamedGate::Tunneling {
                i: 1,
                j: 1,
                theta: 0.1
            },
            &s
        )
        .is_err());
    }

    #[test]
    fn locality_of_gates() {
        let s = space(2);
        let m0 = ModeSet::single(0, 2).unwrap();
        let p = named_gate(NamedGate::Phase { i: 0, theta: 0.4 }, &s).unwrap();
        assert!(is_local_unitary(&p, &m0));
        assert!(leaves_outside_invariant(&p, &m0).unwrap());
        let t = named_gate(
            NamedGate::Tunneling {
                i: 0,
                j: 1,
                theta: 0.4,
            },
            &s,
        )
        .unwrap();
        assert!(!is_local_unitary(&t, &m0));
        assert!(!leaves_outside_invariant(&t, &m0).unwrap());
        let global =
            PSUnitary::validate(s.identity().scale(Complex64::from_polar(1.0, 2.2))).unwrap();
        assert!(is_local_unitary(&global, &m0));
        assert!(leaves_outside_invariant(&global, &m0).unwrap());
    }

    #[test]
    fn random_unitaries_are_valid_and_deterministic() {
        let s = space(3);
        for seed in 0..20 {
            let u = random_ps_unitary(&s, seed);
            assert!(PSUnitary::validate(u.as_operator().clone()).is_ok());
            assert!(parity_commutator_norm(u.matrix()) < 1e-12);
            assert_eq!(u, random_ps_unitary(&s, seed));
        }
        let mut min = f64::INFINITY;
        for seed in 0..100 {
            let a = random_ps_unitary(&s, 2 * seed);
            let b = random_ps_unitary(&s, 2 * seed + 1);
            min = min.min(a.as_operator().distance(b.as_operator()));
        }
        assert!(min > 0.1, "closest pair {min}");
    }

    #[test]
    fn local_random_unitaries() {
        let sub = ModeSet::new([0, 2], 3).unwrap();
        let s = space(3);
        for seed in 0..10 {
            let u = local_random_ps_unitary(&sub, seed).unwrap();
            assert!(is_local_unitary(&u, &sub));
            let f1 = s.annihilator(1).unwrap();
            assert!(u.as_operator().commutator(&f1).norm() < 1e-12);
        }
        let id = embed_unitary(&PSUnitary::identity(2), &sub).unwrap();
        assert!(id.as_operator().distance(&s.identity()) < 1e-15);
        // the full set reproduces the unembedded sampler
        let full = local_random_ps_unitary(&ModeSet::full(3), 5).unwrap();
        assert!(
            full.as_operator()
                .distance(random_ps_unitary(&s, 5).as_operator())
                < 1e-14
        );
    }
}
