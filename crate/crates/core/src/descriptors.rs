//! Heisenberg-picture descriptors as ontic states.
//!
//! The ontic state of a mode subset `A` after a parity-superselected unitary
//! `U` is represented by the tuple of evolved annihilators `U† f_a U`,
//! `a ∈ A`, together with the fixed pure Heisenberg state `|ψ₀⟩`. Everything
//! in this module acts on those tuples directly: descriptor-substituted
//! monomials stand in for `U† E U` wherever the unitary itself is unknown.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{self, Grade, LadderFamily};
use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockSpace, FockVector, ModeSet};
use crate::linalg::{self, CMatrix, CVector, ZERO};
use crate::states::{self, PhenomenalState};
use crate::transformations::{parity_commutator_norm, PSUnitary};

/// Descriptor comparisons (conjugation accuracy).
pub const DESCRIPTOR_TOL: f64 = 1e-10;
/// Reconstruction round trip and the algebra precondition it relies on.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorSet {
    subsystem: ModeSet,
    descriptors: Vec<FockOperator>,
    heisenberg_state: FockVector,
}

fn check_heisenberg_state(psi0: &FockVector) -> Result<()> {
    if !psi0.is_normalized(DESCRIPTOR_TOL) {
        return Err(Error::TraceNotOne {
            trace: psi0.norm().powi(2),
        });
    }
    let residual = parity_commutator_norm(psi0.projector().matrix());
    if residual > DESCRIPTOR_TOL {
        return Err(Error::SsrViolation { residual });
    }
    Ok(())
}

impl DescriptorSet {
    /// Checks shapes, the Heisenberg state, and that every descriptor is
    /// parity-odd. The canonical algebra is not enforced here; see
    /// [`DescriptorSet::algebra_residual`].
    pub fn new(
        subsystem: ModeSet,
        descriptors: Vec<FockOperator>,
        heisenberg_state: FockVector,
    ) -> Result<Self> {
        if subsystem.is_empty() {
            return Err(Error::EmptySubsystem);
        }
        if descriptors.len() != subsystem.len() {
            return Err(Error::DimensionMismatch {
                expected: subsystem.len(),
                found: descriptors.len(),
            });
        }
        let n = subsystem.ambient();
        if heisenberg_state.n_modes() != n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: heisenberg_state.amplitudes().len(),
            });
        }
        for d in &descriptors {
            if d.n_modes() != n {
                return Err(Error::DimensionMismatch {
                    expected: 1 << n,
                    found: d.dim(),
                });
            }
            if algebra::parity_grade(d) != Grade::Odd {
                return Err(Error::SsrViolation {
                    residual: 1.0 - algebra::odd_part_residual(d.matrix()),
                });
            }
        }
        check_heisenberg_state(&heisenberg_state)?;
        Ok(Self {
            subsystem,
            descriptors,
            heisenberg_state,
        })
    }

    /// Untransformed annihilators of `subsystem`.
    pub fn canonical(subsystem: &ModeSet, psi0: &FockVector) -> Result<Self> {
        evolve_descriptors(&PSUnitary::identity(subsystem.ambient()), subsystem, psi0)
    }

    pub fn subsystem(&self) -> &ModeSet {
        &self.subsystem
    }

    pub fn descriptors(&self) -> &[FockOperator] {
        &self.descriptors
    }

    pub fn heisenberg_state(&self) -> &FockVector {
        &self.heisenberg_state
    }

    pub fn n_modes(&self) -> usize {
        self.subsystem.ambient()
    }

    /// Descriptor attached to `mode`, if the mode belongs to this set.
    pub fn get(&self, mode: usize) -> Option<&FockOperator> {
        self.subsystem.position(mode).map(|k| &self.descriptors[k])
    }

    pub fn family(&self) -> LadderFamily {
        LadderFamily::from_matrices(
            self.descriptors
                .iter()
                .map(|d| d.matrix().clone())
                .collect(),
        )
        .expect("non-empty descriptor set")
    }

    /// Largest Frobenius distance between corresponding descriptors.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.subsystem != other.subsystem {
            return Err(Error::NotSubset {
                sub: self.subsystem.indices().to_vec(),
                sup: other.subsystem.indices().to_vec(),
            });
        }
        Ok(self
            .descriptors
            .iter()
            .zip(&other.descriptors)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max))
    }

    /// Largest residual of `{d_i, d_j} = 0` and `{d_i, d_j†} = δ_ij I`.
    pub fn algebra_residual(&self) -> f64 {
        let id = FockOperator::identity(self.n_modes());
        let mut worst: f64 = 0.0;
        for (i, di) in self.descriptors.iter().enumerate() {
            for (j, dj) in self.descriptors.iter().enumerate().skip(i) {
                worst = worst.max(di.anticommutator(dj).norm());
                let mut r = di.anticommutator(&dj.dagger());
                if i == j {
                    r = &r - &id;
                }
                worst = worst.max(r.norm());
            }
        }
        worst
    }
}

/// `d_k = u† f_{a_k} u` for each mode of `subsystem`.
pub fn evolve_descriptors(
    u: &PSUnitary,
    subsystem: &ModeSet,
    psi0: &FockVector,
) -> Result<DescriptorSet> {
    let n = u.n_modes();
    if subsystem.ambient() != n || psi0.n_modes() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: subsystem.ambient().max(psi0.n_modes()),
        });
    }
    check_heisenberg_state(psi0)?;
    let space = FockSpace::with_cap(n, usize::MAX)?;
    let descriptors = subsystem
        .indices()
        .iter()
        .map(|&a| space.annihilator(a).map(|f| u.conjugate(&f)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DescriptorSet {
        subsystem: subsystem.clone(),
        descriptors,
        heisenberg_state: psi0.clone(),
    })
}

/// `[u]_A = [v]_A`, decided mode by mode: `u† f_a u = v† f_a v` for every
/// `a ∈ subsystem`.
pub fn equivalent_at(u: &PSUnitary, v: &PSUnitary, subsystem: &ModeSet) -> Result<bool> {
    if u.n_modes() != v.n_modes() || subsystem.ambient() != u.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: u.n_modes(),
            found: v.n_modes(),
        });
    }
    let space = FockSpace::with_cap(u.n_modes(), usize::MAX)?;
    for &a in subsystem.indices() {
        let f = space.annihilator(a)?;
        if u.conjugate(&f).distance(&v.conjugate(&f)) > DESCRIPTOR_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Ontic action `w ⋆ [U]_A = [w U]_A`.
///
/// Each `w† f_a w` is expanded over the monomials of `A` and the descriptors
/// are substituted for the ladder operators, which yields
/// `U† w† f_a w U`. Plain two-sided multiplication `w† d_a w` would give
/// `(U w)† f_a (U w)` instead. When `w† f_a w` involves modes outside `A`
/// the action cannot be computed from the local descriptors and
/// [`Error::NotRepresentable`] is returned.
pub fn ontic_apply(w: &PSUnitary, d: &DescriptorSet) -> Result<DescriptorSet> {
    let n = d.n_modes();
    if w.n_modes() != n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            found: w.matrix().nrows(),
        });
    }
    let space = FockSpace::with_cap(n, usize::MAX)?;
    let canonical = LadderFamily::canonical(&d.subsystem)?;
    let substituted = d.family();
    let mut out = Vec::with_capacity(d.descriptors.len());
    for &a in d.subsystem.indices() {
        let moved = w.conjugate(&space.annihilator(a)?);
        let coeffs = if d.subsystem.is_full() {
            // full-set monomials are the Fock matrix units themselves
            moved.matrix().clone()
        } else {
            let coeffs = canonical.expand(moved.matrix())?;
            let residual = linalg::distance(&canonical.substitute(&coeffs)?, moved.matrix());
            if residual > DESCRIPTOR_TOL * moved.norm().max(1.0) {
                return Err(Error::NotRepresentable {
                    mode: a,
                    modes: d.subsystem.indices().to_vec(),
                });
            }
            coeffs
        };
        out.push(FockOperator::from_parts(
            n,
            substituted.substitute(&coeffs)?,
        ));
    }
    Ok(DescriptorSet {
        subsystem: d.subsystem.clone(),
        descriptors: out,
        heisenberg_state: d.heisenberg_state.clone(),
    })
}

/// Keeps the descriptors of `subsystem`.
pub fn ontic_project(d: &DescriptorSet, subsystem: &ModeSet) -> Result<DescriptorSet> {
    subsystem.require_subset_of(&d.subsystem)?;
    let descriptors = subsystem
        .indices()
        .iter()
        .map(|&m| d.get(m).cloned().expect("subset"))
        .collect();
    Ok(DescriptorSet {
        subsystem: subsystem.clone(),
        descriptors,
        heisenberg_state: d.heisenberg_state.clone(),
    })
}

#[derive(Debug, Clone)]
pub enum Compatibility {
    /// A global unitary whose descriptors restrict to both inputs.
    Compatible(PSUnitary),
    Incompatible,
}

impl Compatibility {
    pub fn witness(&self) -> Option<&PSUnitary> {
        match self {
            Compatibility::Compatible(w) => Some(w),
            Compatibility::Incompatible => None,
        }
    }
}

fn same_heisenberg_state(a: &FockVector, b: &FockVector) -> bool {
    a.n_modes() == b.n_modes() && a.projector().distance(&b.projector()) <= DESCRIPTOR_TOL
}

/// Mode-sorted concatenation of two descriptor sets on disjoint subsystems.
fn merge(a: &DescriptorSet, b: &DescriptorSet) -> Result<DescriptorSet> {
    let union = a.subsystem.union(&b.subsystem)?;
    let descriptors = union
        .indices()
        .iter()
        .map(|&m| {
            a.get(m)
                .or_else(|| b.get(m))
                .cloned()
                .expect("mode from one side")
        })
        .collect();
    Ok(DescriptorSet {
        subsystem: union,
        descriptors,
        heisenberg_state: a.heisenberg_state.clone(),
    })
}

fn check_joinable(a: &DescriptorSet, b: &DescriptorSet) -> Result<()> {
    a.subsystem.require_disjoint(&b.subsystem)?;
    if !same_heisenberg_state(&a.heisenberg_state, &b.heisenberg_state) {
        return Err(Error::HeisenbergStateMismatch);
    }
    Ok(())
}

/// Residual of `w† f_a w = d_a` over every mode of `d`.
pub fn witness_residual(w: &PSUnitary, d: &DescriptorSet) -> Result<f64> {
    let evolved = evolve_descriptors(w, &d.subsystem, &d.heisenberg_state)?;
    evolved.distance(d)
}

/// Decides whether two local ontic states come from one global state.
pub fn compatible(a: &DescriptorSet, b: &DescriptorSet) -> Result<Compatibility> {
    check_joinable(a, b)?;
    let merged = merge(a, b)?;
    if merged.subsystem.is_full() {
        return Ok(match reconstruct_unitary(&merged) {
            Ok(w) => Compatibility::Compatible(w),
            Err(Error::DescriptorAlgebra { .. } | Error::Degenerate(_)) => {
                Compatibility::Incompatible
            }
            Err(e) => return Err(e),
        });
    }
    Ok(
        match intertwiner_witnesses(&merged, 1, 0)?.into_iter().next() {
            Some(w) => Compatibility::Compatible(w),
            None => Compatibility::Incompatible,
        },
    )
}

/// Up to `count` witnesses for a proper-subset descriptor tuple, each drawn
/// from a different random point of the intertwiner space.
pub fn witnesses(
    a: &DescriptorSet,
    b: &DescriptorSet,
    count: usize,
    seed: u64,
) -> Result<Vec<PSUnitary>> {
    check_joinable(a, b)?;
    let merged = merge(a, b)?;
    if merged.subsystem.is_full() {
        return Ok(reconstruct_unitary(&merged).into_iter().collect());
    }
    intertwiner_witnesses(&merged, count, seed)
}

/// Solves `f_a W = W d_a`, `f_a† W = W d_a†` (equivalently `W† f_a W = d_a`)
/// for a parity-even `W`, then takes the unitary polar factor of random
/// elements of the solution space. Every solution is `X W₀` with `X` in the
/// commutant of the covered modes' algebra, and the polar factor of such an
/// element stays in the same set, so a unitary witness exists iff the polar
/// factor of a generic solution is one.
fn intertwiner_witnesses(d: &DescriptorSet, count: usize, seed: u64) -> Result<Vec<PSUnitary>> {
    let n = d.n_modes();
    let dim = 1usize << n;
    let space = FockSpace::with_cap(n, usize::MAX)?;
    // parity-even unknowns W_{kj}
    let unknowns: Vec<(usize, usize)> = (0..dim)
        .flat_map(|j| (0..dim).map(move |k| (k, j)))
        .filter(|(k, j)| (k.count_ones() + j.count_ones()) % 2 == 0)
        .collect();
    let m = unknowns.len();
    let mut gram = CMatrix::zeros(m, m);
    for (&mode, desc) in d.subsystem.indices().iter().zip(&d.descriptors) {
        let f = space.annihilator(mode)?.into_matrix();
        let dd = desc.matrix();
        for (x, y) in [(f.clone(), dd.clone()), (f.adjoint(), dd.adjoint())] {
            // rows indexed by (i, j) of X W − W Y
            let mut k_mat = CMatrix::zeros(dim * dim, m);
            for (col, &(k, j)) in unknowns.iter().enumerate() {
                for i in 0..dim {
                    let xik = x[(i, k)];
                    if xik != ZERO {
                        k_mat[(i + dim * j, col)] += xik;
                    }
                }
                // W_{kj} enters (W Y)_{k,l} with Y_{j,l}
                for l in 0..dim {
                    let yjl = y[(j, l)];
                    if yjl != ZERO {
                        k_mat[(k + dim * l, col)] -= yjl;
                    }
                }
            }
            gram += k_mat.adjoint() * &k_mat;
        }
    }
    let eig = SymmetricEigen::new(gram);
    let scale = eig
        .eigenvalues
        .iter()
        .fold(1.0f64, |acc, v| acc.max(v.abs()));
    let null: Vec<usize> = (0..m)
        .filter(|&k| eig.eigenvalues[k] <= 1e-9 * scale)
        .collect();
    if null.is_empty() {
        return Ok(Vec::new());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = Vec::new();
    let attempts = count + 3;
    for _ in 0..attempts {
        if found.len() == count {
            break;
        }
        let mut vec = CVector::zeros(m);
        for &k in &null {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            vec += eig.eigenvectors.column(k) * Complex64::new(re, im);
        }
        let mut w = CMatrix::zeros(dim, dim);
        for (col, &(k, j)) in unknowns.iter().enumerate() {
            w[(k, j)] = vec[col];
        }
        let svd = w.svd(true, true);
        let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
            continue;
        };
        let polar = u * v_t;
        let Ok(candidate) =
            PSUnitary::validate_with_tol(FockOperator::from_parts(n, polar), RECONSTRUCTION_TOL)
        else {
            continue;
        };
        if witness_residual(&candidate, d)? <= RECONSTRUCTION_TOL {
            found.push(candidate);
        }
    }
    Ok(found)
}

/// Join `[U]_A ⊙ [V]_B` of compatible local ontic states.
pub fn join(a: &DescriptorSet, b: &DescriptorSet) -> Result<DescriptorSet> {
    join_with_witness(a, b).map(|(joined, _)| joined)
}

pub fn join_with_witness(
    a: &DescriptorSet,
    b: &DescriptorSet,
) -> Result<(DescriptorSet, PSUnitary)> {
    match compatible(a, b)? {
        Compatibility::Compatible(w) => Ok((merge(a, b)?, w)),
        Compatibility::Incompatible => Err(Error::Incompatible),
    }
}

/// Vectors `|k̄⟩ = U† |k⟩` for every Fock basis index `k`, up to one common
/// phase, built from the descriptors alone.
///
/// The conjugated vacuum projector `Π_i d_i d_i†` is rank one, so every
/// conjugated matrix unit factorizes as `|k̄⟩⟨l̄|` with
/// `|k̄⟩ = d†_{k_1} ⋯ d†_{k_m} |Ω̄⟩`.
fn conjugated_basis(d: &DescriptorSet) -> Result<Vec<CVector>> {
    let family = d.family();
    let vac = family.vacuum_projector();
    let dim = vac.nrows();
    let (col, weight) = (0..dim)
        .map(|c| (c, vac[(c, c)].re))
        .fold(
            (0, f64::MIN),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    if weight <= 0.0 {
        return Err(Error::Degenerate(
            "conjugated vacuum projector vanishes".into(),
        ));
    }
    let omega = vac.column(col) / Complex64::from(weight.sqrt());
    let s = family.len();
    let mut out: Vec<CVector> = Vec::with_capacity(dim);
    out.push(omega);
    for k in 1..dim {
        let top = (usize::BITS - 1 - k.leading_zeros()) as usize;
        let lead = s - 1 - top;
        let rest = k ^ (1 << top);
        let next = family.annihilator(lead).adjoint() * &out[rest];
        out.push(next);
    }
    Ok(out)
}

/// Recovers the unitary (up to global phase) whose descriptors are `d`.
///
/// With `|k̄⟩⟨l̄| = U†|k⟩⟨l|U` assembled from descriptors:
/// 1. the moduli `|⟨l|U|m⟩|² = tr(|l̄⟩⟨l̄| · |m⟩⟨m|)`;
/// 2. the anchor `(m₀, l₀)` of largest modulus gets phase zero;
/// 3. `⟨l|U|m⟩ = tr(|l̄₀⟩⟨l̄| · |m⟩⟨m₀|) / √tr(|l̄₀⟩⟨l̄₀| · |m₀⟩⟨m₀|)`.
pub fn reconstruct_unitary(d: &DescriptorSet) -> Result<PSUnitary> {
    if !d.subsystem.is_full() {
        return Err(Error::NotSubset {
            sub: ModeSet::full(d.n_modes()).indices().to_vec(),
            sup: d.subsystem.indices().to_vec(),
        });
    }
    let residual = d.algebra_residual();
    if residual > RECONSTRUCTION_TOL {
        return Err(Error::DescriptorAlgebra { residual });
    }
    let kets = conjugated_basis(d)?;
    let dim = kets.len();

    let mut anchor = (0, 0);
    let mut best = f64::MIN;
    for (l, ket) in kets.iter().enumerate() {
        for m in 0..dim {
            let modulus_sq = ket[m].norm_sqr();
            if modulus_sq > best {
                best = modulus_sq;
                anchor = (l, m);
            }
        }
    }
    let (l0, m0) = anchor;
    let anchor_value = kets[l0][m0];
    let norm = best.sqrt();

    let mut u = CMatrix::zeros(dim, dim);
    for (l, ket) in kets.iter().enumerate() {
        for m in 0..dim {
            u[(l, m)] = anchor_value * ket[m].conj() / norm;
        }
    }
    let op = FockOperator::from_parts(d.n_modes(), u);
    let unitary = match PSUnitary::validate_with_tol(op, RECONSTRUCTION_TOL) {
        Ok(u) => u.canonical_phase(),
        Err(e) => return Err(Error::Degenerate(format!("assembled matrix rejected: {e}"))),
    };
    let round_trip = witness_residual(&unitary, d)?;
    if round_trip > RECONSTRUCTION_TOL {
        return Err(Error::Degenerate(format!(
            "round-trip residual {round_trip:e}"
        )));
    }
    Ok(unitary)
}

/// Phenomenal state of the descriptors' subsystem.
///
/// The coefficient of the matrix unit `|l⟩⟨p|` is
/// `⟨ψ₀| Ē_{p,l} |ψ₀⟩`, where `Ē_{p,l}` is the monomial `E_{p,l}` with the
/// descriptors substituted for the ladder operators, which equals
/// `U† E_{p,l} U`.
pub fn phenomenal_of(d: &DescriptorSet) -> Result<PhenomenalState> {
    let family = d.family();
    let s = family.len();
    let vac = family.vacuum_projector();
    let psi = d.heisenberg_state.amplitudes();
    // x_l = d_{l_m} ⋯ d_{l_1} |ψ₀⟩
    let mut xs: Vec<CVector> = Vec::with_capacity(1 << s);
    xs.push(psi.clone());
    for l in 1..(1usize << s) {
        let low = l.trailing_zeros() as usize;
        let last = s - 1 - low;
        let rest = l ^ (1 << low);
        let next = family.annihilator(last) * &xs[rest];
        xs.push(next);
    }
    let ys: Vec<CVector> = xs.iter().map(|x| &vac * x).collect();
    let mut rho = CMatrix::zeros(1 << s, 1 << s);
    for (l, y) in ys.iter().enumerate() {
        for (p, x) in xs.iter().enumerate() {
            rho[(l, p)] = x.dotc(y);
        }
    }
    states::validate_phenomenal(&d.subsystem, rho)
        .map_err(|e| Error::Internal(format!("descriptor state is not phenomenal: {e}")))
}

/// Schrödinger-picture reference: `U |ψ₀⟩⟨ψ₀| U†` as a state on all modes.
pub fn schrodinger_state(u: &PSUnitary, psi0: &FockVector) -> Result<PhenomenalState> {
    let psi = u.matrix() * psi0.amplitudes();
    PhenomenalState::pure(
        &ModeSet::full(u.n_modes()),
        &FockVector::new(u.n_modes(), psi)?,
    )
}

/// `|ψ⟩` built from `(occupation, amplitude)` pairs, normalized.
pub fn superposition(space: &FockSpace, terms: &[(Vec<u8>, Complex64)]) -> Result<FockVector> {
    let mut v = CVector::zeros(space.dim());
    for (occ, amp) in terms {
        v += space.basis_state(occ)?.amplitudes() * *amp;
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::TraceNotOne { trace: 0.0 });
    }
    space.vector(v / Complex64::from(norm))
}
