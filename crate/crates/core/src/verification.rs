//! Executable theorem checks.
//!
//! Checkers return [`CheckResult`] evidence instead of asserting, so the test
//! suite and the command-line sweep share them.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra;
use crate::descriptors::{self, evolve_descriptors, ontic_apply, ontic_project, DescriptorSet};
use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockSpace, ModeSet};
use crate::states::{self, PhenomenalState};
use crate::transformations::{
    derive_seed, is_local_unitary, local_random_ps_unitary, random_ps_unitary, validate_ps_unitary,
    PSUnitary,
};

pub const NO_SIGNALLING_TOL: f64 = 1e-9;
pub const LOCALITY_TOL: f64 = 1e-10;
pub const DIAGRAM_TOL: f64 = 1e-9;
pub const PARTIAL_TRACE_AGREEMENT_TOL: f64 = 1e-10;
pub const PROPERTY_LIST_TOL: f64 = 1e-9;
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsystem: Option<Vec<usize>>,
    pub residual: f64,
}

impl Instance {
    pub fn new(label: impl Into<String>, residual: f64) -> Self {
        Self {
            label: label.into(),
            seed: None,
            subsystem: None,
            residual,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn subsystem(mut self, modes: &ModeSet) -> Self {
        self.subsystem = Some(modes.indices().to_vec());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    /// Set for negative controls, where `passed == false` is the desired
    /// outcome.
    #[serde(default)]
    pub expected_failure: bool,
    pub details: Vec<Instance>,
}

impl CheckResult {
    /// `residual` is the maximum over instances; `passed` compares it to the
    /// tolerance. A NaN residual never passes.
    pub fn from_instances(name: impl Into<String>, tolerance: f64, details: Vec<Instance>) -> Self {
        let residual = details.iter().map(|i| i.residual).fold(0.0, |acc: f64, r| {
            if r.is_nan() || acc.is_nan() {
                f64::NAN
            } else {
                acc.max(r)
            }
        });
        Self {
            name: name.into(),
            passed: residual <= tolerance,
            residual,
            tolerance,
            expected_failure: false,
            details,
        }
    }

    pub fn expecting_failure(mut self) -> Self {
        self.expected_failure = true;
        self
    }

    /// Passed, or failed when failure was the point.
    pub fn as_expected(&self) -> bool {
        self.passed != self.expected_failure
    }

    /// Folds several results for the same check into one.
    pub fn merge(name: impl Into<String>, results: Vec<CheckResult>) -> Self {
        let tolerance = results
            .iter()
            .map(|r| r.tolerance)
            .fold(f64::INFINITY, f64::min);
        let expected_failure = results.iter().any(|r| r.expected_failure);
        let details = results.into_iter().flat_map(|r| r.details).collect();
        let mut merged = Self::from_instances(name, tolerance, details);
        merged.expected_failure = expected_failure;
        merged
    }
}

fn require_unitary_local(op: &FockOperator, local: &ModeSet) -> Result<PSUnitary> {
    let u = validate_ps_unitary(op.matrix().clone())?;
    let residual = algebra::locality_residual(u.as_operator(), local)?;
    if residual > algebra::ALGEBRA_TOL {
        return Err(Error::NotLocal {
            modes: local.indices().to_vec(),
            residual,
        });
    }
    Ok(u)
}

fn evolve_state(u: &PSUnitary, rho: &PhenomenalState) -> Result<PhenomenalState> {
    let m = u.matrix() * rho.matrix() * u.matrix().adjoint();
    states::validate_phenomenal(rho.subsystem(), m)
}

/// No-signalling for a bipartition `A ∪ B` of `rho`'s subsystem:
/// `tr_B(U_A V_B ρ V_B† U_A†) = U_A tr_B(ρ) U_A†` and
/// `tr_B(V_B ρ V_B†) = tr_B(ρ)`.
///
/// `u_a` and `v_b` act on the Fock space of `rho`'s subsystem. They are
/// validated here: a parity-odd "unitary" such as `f + f†` is rejected with
/// [`Error::SsrViolation`] before any trace is taken.
pub fn check_no_signalling(
    rho: &PhenomenalState,
    a: &ModeSet,
    b: &ModeSet,
    u_a: &FockOperator,
    v_b: &FockOperator,
) -> Result<CheckResult> {
    a.require_disjoint(b)?;
    let whole = rho.subsystem();
    let union = a.union(b)?;
    if &union != whole {
        return Err(Error::InvalidModeSet(format!(
            "{:?} and {:?} do not partition {:?}",
            a.indices(),
            b.indices(),
            whole.indices()
        )));
    }
    let n = whole.len();
    for op in [u_a, v_b] {
        if op.n_modes() != n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: op.dim(),
            });
        }
    }
    let a_rel = a.relative_to(whole)?;
    let b_rel = b.relative_to(whole)?;
    let u = require_unitary_local(u_a, &a_rel)?;
    let v = require_unitary_local(v_b, &b_rel)?;

    let reduced = states::partial_trace(rho, a)?;
    let u_local = algebra::restrict(u.as_operator(), &a_rel)?;
    let expected = u_local.matrix() * reduced.matrix() * u_local.matrix().adjoint();

    let both = evolve_state(&(&u * &v), rho)?;
    let first = crate::linalg::distance(states::partial_trace(&both, a)?.matrix(), &expected);
    let only_b = evolve_state(&v, rho)?;
    let second = states::partial_trace(&only_b, a)?.distance(&reduced);

    Ok(CheckResult::from_instances(
        "no_signalling",
        NO_SIGNALLING_TOL,
        vec![
            Instance::new("joint evolution", first).subsystem(a),
            Instance::new("remote evolution only", second).subsystem(a),
        ],
    ))
}

/// `u† f_j u = f_j` for a mode `j` outside `subsystem`. Locality of `u` is
/// not presumed, so a global `u` is a failing input.
pub fn check_locality_invariance(
    u: &PSUnitary,
    subsystem: &ModeSet,
    j: usize,
) -> Result<CheckResult> {
    if subsystem.contains(j) {
        return Err(Error::InvalidModeSet(format!(
            "mode {j} lies inside {:?}",
            subsystem.indices()
        )));
    }
    let space = FockSpace::with_cap(u.n_modes(), usize::MAX)?;
    let f = space.annihilator(j)?;
    let residual = u.conjugate(&f).distance(&f);
    Ok(CheckResult::from_instances(
        "locality_invariance",
        LOCALITY_TOL,
        vec![Instance::new(format!("mode {j}"), residual).subsystem(subsystem)],
    ))
}

/// Both paths of the commuting square: trace the global phenomenal state
/// down to `j`, or project the descriptors to `j` first.
pub fn check_diagram(d: &DescriptorSet, j: &ModeSet) -> Result<CheckResult> {
    if !d.subsystem().is_full() {
        return Err(Error::NotSubset {
            sub: ModeSet::full(d.n_modes()).indices().to_vec(),
            sup: d.subsystem().indices().to_vec(),
        });
    }
    let global = descriptors::phenomenal_of(d)?;
    let left = states::partial_trace(&global, j)?;
    let right = descriptors::phenomenal_of(&ontic_project(d, j)?)?;
    Ok(CheckResult::from_instances(
        "diagram",
        DIAGRAM_TOL,
        vec![Instance::new("paths", left.distance(&right)).subsystem(j)],
    ))
}

/// Monomial-matching partial trace against the reordered tensor-factor one.
pub fn check_partial_trace_agreement(rho: &PhenomenalState, keep: &ModeSet) -> Result<CheckResult> {
    let fast = states::partial_trace(rho, keep)?;
    let oracle = states::partial_trace_jordan_wigner(rho, keep)?;
    Ok(CheckResult::from_instances(
        "partial_trace_agreement",
        PARTIAL_TRACE_AGREEMENT_TOL,
        vec![Instance::new(
            "implementations",
            crate::linalg::distance(fast.matrix(), &oracle),
        )
        .subsystem(keep)],
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlMode {
    Normal,
    /// Replaces the local `W_A` by a random global unitary.
    NegativeControl,
}

/// Random non-empty subset of `pool`.
fn random_subset(pool: &[usize], ambient: usize, rng: &mut ChaCha8Rng) -> Result<ModeSet> {
    loop {
        let picked: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.5))
            .collect();
        if !picked.is_empty() {
            return ModeSet::new(picked, ambient);
        }
    }
}

/// The four ontic-state properties on one random instance:
/// 1. `V ⋆ [U]_A = [VU]_A` (on the full set with a global `V`, and on `A`
///    with `V` local to `A`);
/// 2. `π_A([U]_{A∪B}) = [U]_A`;
/// 3. `[U]_A ⊙ [U]_B = [U]_{A∪B}`, for every witness found;
/// 4. `W_A ⋆ [V]_B = [V]_B`.
fn property_instance(space: &FockSpace, seed: u64, mode: ControlMode) -> Result<Vec<Instance>> {
    let n = space.n_modes();
    let full = space.modes();
    let psi0 = states::random_pure_vector(space, derive_seed(seed, 10));
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 11));
    let all: Vec<usize> = (0..n).collect();
    let a_size = rng.random_range(1..n);
    let a = ModeSet::new(all.choose_multiple(&mut rng, a_size).copied(), n)?;
    let b = random_subset(a.complement().indices(), n, &mut rng)?;
    let ab = a.union(&b)?;

    let u = random_ps_unitary(space, derive_seed(seed, 12));
    let v = random_ps_unitary(space, derive_seed(seed, 13));
    let v_local = local_random_ps_unitary(&a, derive_seed(seed, 14))?;
    let w = match mode {
        ControlMode::Normal => local_random_ps_unitary(&a, derive_seed(seed, 15))?,
        ControlMode::NegativeControl => random_ps_unitary(space, derive_seed(seed, 15)),
    };

    let mut out = Vec::new();
    let d_full = evolve_descriptors(&u, &full, &psi0)?;
    let p1_full =
        ontic_apply(&v, &d_full)?.distance(&evolve_descriptors(&(&v * &u), &full, &psi0)?)?;
    let d_a = evolve_descriptors(&u, &a, &psi0)?;
    let p1_local =
        ontic_apply(&v_local, &d_a)?.distance(&evolve_descriptors(&(&v_local * &u), &a, &psi0)?)?;
    out.push(
        Instance::new("action composes", p1_full.max(p1_local))
            .seed(seed)
            .subsystem(&a),
    );

    let d_ab = evolve_descriptors(&u, &ab, &psi0)?;
    out.push(
        Instance::new("projection", ontic_project(&d_ab, &a)?.distance(&d_a)?)
            .seed(seed)
            .subsystem(&a),
    );

    let d_b = evolve_descriptors(&u, &b, &psi0)?;
    let found = descriptors::witnesses(&d_a, &d_b, 2, derive_seed(seed, 16))?;
    let join_residual = if found.is_empty() {
        f64::INFINITY
    } else {
        let joined = descriptors::join(&d_a, &d_b)?.distance(&d_ab)?;
        found
            .iter()
            .map(|wit| evolve_descriptors(wit, &ab, &psi0).and_then(|e| e.distance(&d_ab)))
            .try_fold(joined, |acc, r| r.map(|r| acc.max(r)))?
    };
    out.push(
        Instance::new("join", join_residual)
            .seed(seed)
            .subsystem(&ab),
    );

    // W ⋆ [V]_B read off the full-set action, so a non-local W is detected
    // rather than refused
    let v_b = evolve_descriptors(&v, &b, &psi0)?;
    let acted = ontic_apply(&w, &evolve_descriptors(&v, &full, &psi0)?)?;
    let mut p4 = ontic_project(&acted, &b)?.distance(&v_b)?;
    if mode == ControlMode::Normal {
        p4 = p4.max(ontic_apply(&w, &v_b)?.distance(&v_b)?);
    }
    out.push(Instance::new("remote action", p4).seed(seed).subsystem(&b));
    Ok(out)
}

pub fn check_ontic_property_list(
    seeds: &[u64],
    n_modes: usize,
    mode: ControlMode,
) -> Result<CheckResult> {
    if n_modes < 2 {
        return Err(Error::InvalidModeSet(format!(
            "property list needs at least two modes, got {n_modes}"
        )));
    }
    let space = FockSpace::new(n_modes)?;
    let mut details = Vec::new();
    for &seed in seeds {
        details.extend(property_instance(&space, seed, mode)?);
    }
    Ok(match mode {
        ControlMode::Normal => {
            CheckResult::from_instances("ontic_property_list", PROPERTY_LIST_TOL, details)
        }
        ControlMode::NegativeControl => {
            // only the remote-action property is meant to break
            details.retain(|i| i.label == "remote action");
            CheckResult::from_instances(
                "ontic_property_list_negative_control",
                PROPERTY_LIST_TOL,
                details,
            )
            .expecting_failure()
        }
    })
}

/// Descriptor round trip and phase-blind distance after reconstruction.
pub fn check_reconstruction(u: &PSUnitary, seed: Option<u64>) -> Result<CheckResult> {
    let space = FockSpace::with_cap(u.n_modes(), usize::MAX)?;
    let d = evolve_descriptors(u, &space.modes(), &space.vacuum())?;
    let r = descriptors::reconstruct_unitary(&d)?;
    let mut round = Instance::new("round trip", descriptors::witness_residual(&r, &d)?);
    let mut dist = Instance::new("phase-blind distance", r.phase_blind_distance(u));
    if let Some(s) = seed {
        round = round.seed(s);
        dist = dist.seed(s);
    }
    Ok(CheckResult::from_instances(
        "reconstruction",
        descriptors::RECONSTRUCTION_TOL,
        vec![round, dist],
    ))
}

/// Single-mode equivalence in both directions. Candidates `v = w u` with
/// `w` local to the complement of `{a}` must be equivalent to `u` at `a`;
/// for every candidate (those plus an unrelated unitary) that is
/// equivalent, the quotient `u v†` must be local to the complement. A failed
/// forward direction contributes residual 1.
pub fn check_equivalence(u: &PSUnitary, a: usize, seed: u64) -> Result<CheckResult> {
    let n = u.n_modes();
    let space = FockSpace::with_cap(n, usize::MAX)?;
    let single = ModeSet::single(a, n)?;
    let rest = single.complement();
    let mut candidates = Vec::new();
    let mut details = Vec::new();
    if !rest.is_empty() {
        let w = local_random_ps_unitary(&rest, derive_seed(seed, 20))?;
        let wu = &w * u;
        let forward = if descriptors::equivalent_at(&wu, u, &single)? {
            0.0
        } else {
            1.0
        };
        details.push(
            Instance::new("local quotient implies equivalence", forward)
                .seed(seed)
                .subsystem(&single),
        );
        candidates.push(wu);
    }
    candidates.push(random_ps_unitary(&space, derive_seed(seed, 21)));
    for v in &candidates {
        if !descriptors::equivalent_at(u, v, &single)? {
            continue;
        }
        let quotient = u * &v.dagger();
        let residual = if rest.is_empty() {
            // only a global phase is local to the empty set
            quotient.phase_blind_distance(&PSUnitary::identity(n))
        } else {
            algebra::locality_residual(quotient.as_operator(), &rest)?
        };
        details.push(
            Instance::new("equivalence implies local quotient", residual)
                .seed(seed)
                .subsystem(&single),
        );
    }
    Ok(CheckResult::from_instances(
        "equivalence",
        EQUIVALENCE_TOL,
        details,
    ))
}

/// Parameters of a randomized sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_modes: usize,
    pub seed: u64,
    pub count: usize,
}

/// Runs every checker over `count` random instances at `n_modes`.
pub fn verify_sweep(config: SweepConfig) -> Result<Vec<CheckResult>> {
    let SweepConfig {
        n_modes: n,
        seed,
        count,
    } = config;
    let space = FockSpace::new(n)?;
    let full = space.modes();
    let seeds: Vec<u64> = (0..count as u64).map(|k| derive_seed(seed, k)).collect();
    let proper = ModeSet::proper_subsets(n);
    let mut results = Vec::new();

    let mut algebra_instances = Vec::new();
    for &s in &seeds {
        let u = random_ps_unitary(&space, s);
        let d = evolve_descriptors(&u, &full, &space.vacuum())?;
        algebra_instances.push(Instance::new("conjugated relations", d.algebra_residual()).seed(s));
    }
    results.push(CheckResult::from_instances(
        "canonical_algebra",
        descriptors::DESCRIPTOR_TOL,
        algebra_instances,
    ));

    if n >= 2 {
        let mut runs = Vec::new();
        for (k, &s) in seeds.iter().enumerate() {
            let a = &proper[k % proper.len()];
            let b = a.complement();
            let rho = states::random_phenomenal_state(&full, derive_seed(s, 1))?;
            let u_a = local_random_ps_unitary(a, derive_seed(s, 2))?;
            let v_b = local_random_ps_unitary(&b, derive_seed(s, 3))?;
            let mut r = check_no_signalling(&rho, a, &b, u_a.as_operator(), v_b.as_operator())?;
            for i in &mut r.details {
                i.seed = Some(s);
            }
            runs.push(r);
        }
        results.push(CheckResult::merge("no_signalling", runs));

        let mut runs = Vec::new();
        for (k, &s) in seeds.iter().enumerate() {
            let inside = &proper[k % proper.len()];
            let u = local_random_ps_unitary(inside, s)?;
            for &j in inside.complement().indices() {
                runs.push(check_locality_invariance(&u, inside, j)?);
            }
        }
        results.push(CheckResult::merge("locality_invariance", runs));
    }

    let mut runs = Vec::new();
    let mut traces = Vec::new();
    for (k, &s) in seeds.iter().enumerate() {
        let u = random_ps_unitary(&space, s);
        let psi0 = states::random_pure_vector(&space, derive_seed(s, 4));
        let d = evolve_descriptors(&u, &full, &psi0)?;
        let j = if proper.is_empty() {
            full.clone()
        } else {
            proper[k % proper.len()].clone()
        };
        runs.push(check_diagram(&d, &j)?);
        traces.push(check_partial_trace_agreement(
            &descriptors::phenomenal_of(&d)?,
            &j,
        )?);
    }
    results.push(CheckResult::merge("diagram", runs));
    results.push(CheckResult::merge("partial_trace_agreement", traces));

    let mut runs = Vec::new();
    for (k, &s) in seeds.iter().enumerate() {
        let u = random_ps_unitary(&space, s);
        runs.push(check_equivalence(&u, k % n, s)?);
    }
    results.push(CheckResult::merge("equivalence", runs));

    let mut runs = Vec::new();
    for &s in &seeds {
        runs.push(check_reconstruction(
            &random_ps_unitary(&space, s),
            Some(s),
        )?);
    }
    results.push(CheckResult::merge("reconstruction", runs));

    if n >= 2 {
        results.push(check_ontic_property_list(&seeds, n, ControlMode::Normal)?);
        results.push(check_ontic_property_list(
            &seeds,
            n,
            ControlMode::NegativeControl,
        )?);
    }
    Ok(results)
}

/// Local-unitary test used by the equivalence checks, exposed for callers
/// holding a [`PSUnitary`].
pub fn quotient_is_local(u: &PSUnitary, v: &PSUnitary, subsystem: &ModeSet) -> bool {
    is_local_unitary(&(u * &v.dagger()), subsystem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptors::superposition;
    use crate::linalg::ONE;
    use crate::transformations::{named_gate, NamedGate};
    use std::f64::consts::PI;

    #[test]
    fn no_signalling_bell_like_state() {
        let s = FockSpace::new(2).unwrap();
        let psi = superposition(&s, &[(vec![0, 1], ONE), (vec![1, 0], ONE)]).unwrap();
        let rho = PhenomenalState::pure(&s.modes(), &psi).unwrap();
        let a = ModeSet::single(0, 2).unwrap();
        let b = ModeSet::single(1, 2).unwrap();
        let v = named_gate(NamedGate::Phase { i: 1, theta: 0.9 }, &s).unwrap();
        let u = named_gate(NamedGate::Phase { i: 0, theta: -0.3 }, &s).unwrap();
        let r = check_no_signalling(&rho, &a, &b, u.as_operator(), v.as_operator()).unwrap();
        assert!(r.passed && r.residual < 1e-12);
        let id = FockOperator::identity(2);
        assert!(check_no_signalling(&rho, &a, &b, &id, &id).unwrap().passed);
    }

    #[test]
    fn no_signalling_rejects_parity_odd_unitary() {
        let s = FockSpace::new(2).unwrap();
        let rho = PhenomenalState::pure(&s.modes(), &s.basis_state(&[1, 0]).unwrap()).unwrap();
        let a = ModeSet::single(0, 2).unwrap();
        let b = ModeSet::single(1, 2).unwrap();
        let f = s.annihilator(1).unwrap();
        let odd = &f + &f.dagger();
        let err = check_no_signalling(&rho, &a, &b, &FockOperator::identity(2), &odd).unwrap_err();
        assert_eq!(err.code(), "ssr_violation");
        // an even but non-local "V_B" is refused too
        let g = random_ps_unitary(&s, 3);
        let err = check_no_signalling(&rho, &a, &b, &FockOperator::identity(2), g.as_operator())
            .unwrap_err();
        assert_eq!(err.code(), "not_local");
    }

    #[test]
    fn locality_examples() {
        let s = FockSpace::new(3).unwrap();
        let inside = ModeSet::new([0, 1], 3).unwrap();
        let t = named_gate(
            NamedGate::Tunneling {
                i: 0,
                j: 1,
                theta: 0.8,
            },
            &s,
        )
        .unwrap();
        assert!(check_locality_invariance(&t, &inside, 2).unwrap().passed);
        let id = check_locality_invariance(&PSUnitary::identity(3), &inside, 2).unwrap();
        assert_eq!(id.residual, 0.0);
        for seed in 0..100 {
            let u = local_random_ps_unitary(&inside, seed).unwrap();
            assert!(check_locality_invariance(&u, &inside, 2).unwrap().passed);
        }
        let global = random_ps_unitary(&s, 1);
        assert!(
            !check_locality_invariance(&global, &inside, 2)
                .unwrap()
                .passed
        );
        assert!(check_locality_invariance(&t, &inside, 1).is_err());
    }

    #[test]
    fn diagram_examples() {
        let s = FockSpace::new(2).unwrap();
        let d = DescriptorSet::canonical(&s.modes(), &s.vacuum()).unwrap();
        for j in ModeSet::proper_subsets(2) {
            assert!(check_diagram(&d, &j).unwrap().passed);
        }
        let u = named_gate(
            NamedGate::Tunneling {
                i: 0,
                j: 1,
                theta: PI / 4.0,
            },
            &s,
        )
        .unwrap();
        let d = evolve_descriptors(&u, &s.modes(), &s.basis_state(&[1, 0]).unwrap()).unwrap();
        let r = check_diagram(&d, &ModeSet::single(0, 2).unwrap()).unwrap();
        assert!(r.passed, "{r:?}");
        let rho = descriptors::phenomenal_of(&d).unwrap();
        assert!(
            check_partial_trace_agreement(&rho, &ModeSet::single(1, 2).unwrap())
                .unwrap()
                .passed
        );
    }

    #[test]
    fn property_list_and_negative_control() {
        let seeds: Vec<u64> = (0..5).collect();
        let r = check_ontic_property_list(&seeds, 3, ControlMode::Normal).unwrap();
        assert!(r.passed, "{r:?}");
        let neg = check_ontic_property_list(&seeds, 3, ControlMode::NegativeControl).unwrap();
        assert!(!neg.passed && neg.as_expected());
    }

    #[test]
    fn equivalence_and_reconstruction_checks() {
        let s = FockSpace::new(3).unwrap();
        let u = random_ps_unitary(&s, 1);
        let r = check_equivalence(&u, 1, 7).unwrap();
        assert!(r.passed && r.details.len() == 2, "{r:?}");
        let rest = ModeSet::new([0, 2], 3).unwrap();
        let w = local_random_ps_unitary(&rest, 4).unwrap();
        assert!(quotient_is_local(&(&w * &u), &u, &rest));
        assert!(!quotient_is_local(&random_ps_unitary(&s, 2), &u, &rest));
        assert!(check_reconstruction(&u, Some(1)).unwrap().passed);
    }

    #[test]
    fn sweep_is_deterministic_and_passes() {
        let cfg = SweepConfig {
            n_modes: 3,
            seed: 5,
            count: 4,
        };
        let a = verify_sweep(cfg).unwrap();
        let b = verify_sweep(cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(CheckResult::as_expected), "{a:#?}");
    }

    #[test]
    fn merge_takes_the_worst_residual() {
        let r = CheckResult::merge(
            "x",
            vec![
                CheckResult::from_instances("x", 1e-9, vec![Instance::new("a", 1e-12)]),
                CheckResult::from_instances("x", 1e-9, vec![Instance::new("b", 1e-3)]),
            ],
        );
        assert!(!r.passed && r.residual == 1e-3);
    }
}
