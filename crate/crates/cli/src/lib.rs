//! Scenario runner behind the `fdesc` binary.
//!
//! Exit codes: 0 when every validation and requested check passes, 1 when a
//! check fails, 2 for unreadable or malformed input, 3 for input that parses
//! but is rejected (superselection violations, bad mode indices, ...).

pub mod scenario;

use std::collections::BTreeMap;
use std::time::Instant;

use fdesc_core::descriptors::{self, witness_residual, DESCRIPTOR_TOL, RECONSTRUCTION_TOL};
use fdesc_core::serial::{DescriptorSetJson, MatrixJson, StateJson};
use fdesc_core::transformations::{derive_seed, local_random_ps_unitary, random_ps_unitary};
use fdesc_core::verification::{
    self, verify_sweep, CheckResult, ControlMode, Instance, SweepConfig,
};
use fdesc_core::{
    evolve_descriptors, ontic_project, partial_trace, DescriptorSet, ModeSet, PhenomenalState,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use scenario::{CheckName, CheckSpec, GateSpec, InitialState, Prepared, Scenario};

pub const REPORT_SCHEMA: &str = "fdesc.report/v1";
pub const VERIFY_SCHEMA: &str = "fdesc.verify/v1";
pub const RECONSTRUCTION_SCHEMA: &str = "fdesc.reconstruction/v1";
pub const BASIS_ORDERING: &str =
    "Fock basis index b = sum_i n_i * 2^(N-1-i) with mode 0 the most significant bit; \
     f_i = Z x ... x Z x sigma^- x I x ... x I with Z = diag(1, -1); \
     subsystem matrices use the subsystem's modes relabelled 0..|S| in increasing order; \
     complex numbers are [re, im]; matrices are row-major nested arrays";

/// Static schema document printed by `fdesc schema`.
pub const SCHEMA_DOCUMENT: &str = include_str!("../schema/fdesc.schema.json");

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Failure {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{code} at {path}: {message}")]
    Invalid {
        path: String,
        code: String,
        message: String,
    },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Io { .. } | Failure::Parse { .. } => 2,
            Failure::Invalid { .. } => 3,
        }
    }
}

fn core_failure(path: impl Into<String>, err: fdesc_core::Error) -> Failure {
    Failure::Invalid {
        path: path.into(),
        code: err.code().to_string(),
        message: err.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct States {
    pub global: StateJson,
    pub partitions: Vec<StateJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptors {
    pub full: DescriptorSetJson,
    pub partitions: Vec<DescriptorSetJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub schema: String,
    pub unitary: MatrixJson,
    pub round_trip_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub scenario: Scenario,
    pub scenario_sha256: String,
    pub basis_ordering: String,
    pub unitary: MatrixJson,
    pub states: States,
    pub descriptors: Descriptors,
    pub reconstruction: Reconstruction,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    pub timings_ms: BTreeMap<String, f64>,
}

impl Report {
    /// Copy with the wall-clock fields cleared, for determinism comparisons.
    pub fn without_timings(&self) -> Self {
        Self {
            timings_ms: BTreeMap::new(),
            ..self.clone()
        }
    }
}

pub fn scenario_hash(scenario: &Scenario) -> String {
    let bytes = serde_json::to_vec(scenario).expect("scenario serializes");
    hex::encode(Sha256::digest(&bytes))
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Subsets used by checks that need a bipartition: the scenario's proper
/// partitions, or every proper subset when none are given.
fn bipartitions(prep: &Prepared) -> Vec<ModeSet> {
    let proper: Vec<ModeSet> = prep
        .partitions
        .iter()
        .filter(|p| !p.is_full())
        .cloned()
        .collect();
    if proper.is_empty() {
        ModeSet::proper_subsets(prep.space.n_modes())
    } else {
        proper
    }
}

fn analysis_sets(prep: &Prepared) -> Vec<ModeSet> {
    if !prep.partitions.is_empty() {
        return prep.partitions.clone();
    }
    let proper = ModeSet::proper_subsets(prep.space.n_modes());
    if proper.is_empty() {
        vec![prep.space.modes()]
    } else {
        proper
    }
}

struct Context<'a> {
    prep: &'a Prepared,
    full: &'a DescriptorSet,
    global: &'a PhenomenalState,
    reconstructed: &'a fdesc_core::PSUnitary,
}

fn run_check(spec: &CheckSpec, ctx: &Context<'_>) -> fdesc_core::Result<CheckResult> {
    let prep = ctx.prep;
    let n = prep.space.n_modes();
    let seeds: Vec<u64> = (0..spec.count as u64)
        .map(|k| derive_seed(spec.seed, k))
        .collect();
    let name = spec.name.as_str();
    let result = match spec.name {
        CheckName::CanonicalAlgebra => {
            let mut details = vec![Instance::new(
                "scenario descriptors",
                ctx.full.algebra_residual(),
            )];
            for &s in &seeds {
                let u = random_ps_unitary(&prep.space, s);
                let d = evolve_descriptors(&u, &prep.space.modes(), &prep.psi0)?;
                details.push(Instance::new("random unitary", d.algebra_residual()).seed(s));
            }
            CheckResult::from_instances(name, DESCRIPTOR_TOL, details)
        }
        CheckName::NoSignalling => {
            let mut runs = Vec::new();
            for a in bipartitions(prep) {
                let b = a.complement();
                for &s in &seeds {
                    let u_a = local_random_ps_unitary(&a, derive_seed(s, 1))?;
                    let v_b = local_random_ps_unitary(&b, derive_seed(s, 2))?;
                    let mut r = verification::check_no_signalling(
                        ctx.global,
                        &a,
                        &b,
                        u_a.as_operator(),
                        v_b.as_operator(),
                    )?;
                    r.details.iter_mut().for_each(|i| i.seed = Some(s));
                    runs.push(r);
                }
            }
            CheckResult::merge(name, runs)
        }
        CheckName::LocalityInvariance => {
            let mut runs = Vec::new();
            for a in bipartitions(prep) {
                for &s in &seeds {
                    let u = local_random_ps_unitary(&a, s)?;
                    for &j in a.complement().indices() {
                        let mut r = verification::check_locality_invariance(&u, &a, j)?;
                        r.details.iter_mut().for_each(|i| i.seed = Some(s));
                        runs.push(r);
                    }
                }
            }
            CheckResult::merge(name, runs)
        }
        CheckName::Diagram => {
            let runs = analysis_sets(prep)
                .iter()
                .map(|j| verification::check_diagram(ctx.full, j))
                .collect::<fdesc_core::Result<Vec<_>>>()?;
            CheckResult::merge(name, runs)
        }
        CheckName::PartialTraceAgreement => {
            let runs = analysis_sets(prep)
                .iter()
                .map(|j| verification::check_partial_trace_agreement(ctx.global, j))
                .collect::<fdesc_core::Result<Vec<_>>>()?;
            CheckResult::merge(name, runs)
        }
        CheckName::Equivalence => {
            let mut runs = Vec::new();
            for (k, &s) in seeds.iter().enumerate() {
                let u = random_ps_unitary(&prep.space, s);
                runs.push(verification::check_equivalence(&u, k % n, s)?);
            }
            CheckResult::merge(name, runs)
        }
        CheckName::Reconstruction => {
            let mut runs = vec![CheckResult::from_instances(
                name,
                RECONSTRUCTION_TOL,
                vec![
                    Instance::new(
                        "scenario round trip",
                        witness_residual(ctx.reconstructed, ctx.full)?,
                    ),
                    Instance::new(
                        "scenario phase-blind distance",
                        ctx.reconstructed.phase_blind_distance(&prep.unitary),
                    ),
                ],
            )];
            for &s in &seeds {
                runs.push(verification::check_reconstruction(
                    &random_ps_unitary(&prep.space, s),
                    Some(s),
                )?);
            }
            CheckResult::merge(name, runs)
        }
        CheckName::OnticPropertyList => {
            verification::check_ontic_property_list(&seeds, n, ControlMode::Normal)?
        }
        CheckName::OnticPropertyListNegativeControl => {
            verification::check_ontic_property_list(&seeds, n, ControlMode::NegativeControl)?
        }
    };
    Ok(result)
}

fn override_tolerance(mut r: CheckResult, tolerance: Option<&f64>) -> CheckResult {
    if let Some(&t) = tolerance {
        r.tolerance = t;
        r.passed = r.residual <= t;
    }
    r
}

pub fn run_scenario(scenario: &Scenario) -> Result<Report, Failure> {
    run_scenario_with_cap(scenario, scenario::mode_cap()?)
}

pub fn run_scenario_with_cap(scenario: &Scenario, cap: usize) -> Result<Report, Failure> {
    let total = Instant::now();
    let mut timings = BTreeMap::new();

    let t = Instant::now();
    let prep = scenario.prepare(cap)?;
    timings.insert("prepare".to_string(), elapsed_ms(t));

    let t = Instant::now();
    let full_modes = prep.space.modes();
    let full = evolve_descriptors(&prep.unitary, &full_modes, &prep.psi0)
        .map_err(|e| core_failure("initial_state", e))?;
    let partition_sets = prep
        .partitions
        .iter()
        .enumerate()
        .map(|(k, p)| {
            ontic_project(&full, p).map_err(|e| core_failure(format!("partitions[{k}]"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    timings.insert("descriptors".to_string(), elapsed_ms(t));

    let t = Instant::now();
    let internal = |e: fdesc_core::Error| core_failure("descriptors", e);
    let global = descriptors::phenomenal_of(&full).map_err(internal)?;
    let partition_states = prep
        .partitions
        .iter()
        .map(|p| partial_trace(&global, p).map(|s| StateJson::from(&s)))
        .collect::<fdesc_core::Result<Vec<_>>>()
        .map_err(internal)?;
    timings.insert("states".to_string(), elapsed_ms(t));

    let t = Instant::now();
    let reconstructed = descriptors::reconstruct_unitary(&full).map_err(internal)?;
    let round_trip = witness_residual(&reconstructed, &full).map_err(internal)?;
    timings.insert("reconstruction".to_string(), elapsed_ms(t));

    let t = Instant::now();
    let ctx = Context {
        prep: &prep,
        full: &full,
        global: &global,
        reconstructed: &reconstructed,
    };
    let mut checks = Vec::new();
    for (k, spec) in scenario.checks.iter().enumerate() {
        let r = run_check(spec, &ctx).map_err(|e| core_failure(format!("checks[{k}]"), e))?;
        checks.push(override_tolerance(r, scenario.tolerances.get(&spec.name)));
    }
    timings.insert("checks".to_string(), elapsed_ms(t));

    let reconstruction = Reconstruction {
        schema: RECONSTRUCTION_SCHEMA.to_string(),
        unitary: MatrixJson::from(&reconstructed),
        round_trip_residual: round_trip,
        tolerance: RECONSTRUCTION_TOL,
        passed: round_trip <= RECONSTRUCTION_TOL,
    };
    let passed = reconstruction.passed && checks.iter().all(CheckResult::as_expected);
    timings.insert("total".to_string(), elapsed_ms(total));
    Ok(Report {
        schema: REPORT_SCHEMA.to_string(),
        scenario: scenario.clone(),
        scenario_sha256: scenario_hash(scenario),
        basis_ordering: BASIS_ORDERING.to_string(),
        unitary: MatrixJson::from(&prep.unitary),
        states: States {
            global: StateJson::from(&global),
            partitions: partition_states,
        },
        descriptors: Descriptors {
            full: DescriptorSetJson::from(&full),
            partitions: partition_sets.iter().map(DescriptorSetJson::from).collect(),
        },
        reconstruction,
        checks,
        passed,
        timings_ms: timings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: String,
    pub n_modes: usize,
    pub seeds: Vec<u64>,
    pub count: usize,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    pub timings_ms: BTreeMap<String, f64>,
}

/// Randomized sweep over every checker, one sweep per base seed; results
/// with the same name are merged.
pub fn run_verify(
    n_modes: usize,
    seeds: &[u64],
    count: usize,
    cap: usize,
) -> Result<VerifyReport, Failure> {
    let start = Instant::now();
    fdesc_core::FockSpace::with_cap(n_modes, cap).map_err(|e| core_failure("--modes", e))?;
    let mut merged: Vec<(String, Vec<CheckResult>)> = Vec::new();
    for &seed in seeds {
        let results = verify_sweep(SweepConfig {
            n_modes,
            seed,
            count,
        })
        .map_err(|e| core_failure("--modes", e))?;
        for r in results {
            match merged.iter_mut().find(|(name, _)| *name == r.name) {
                Some((_, list)) => list.push(r),
                None => merged.push((r.name.clone(), vec![r])),
            }
        }
    }
    let checks: Vec<CheckResult> = merged
        .into_iter()
        .map(|(name, list)| CheckResult::merge(name, list))
        .collect();
    let passed = checks.iter().all(CheckResult::as_expected);
    let mut timings = BTreeMap::new();
    timings.insert("total".to_string(), elapsed_ms(start));
    Ok(VerifyReport {
        schema: VERIFY_SCHEMA.to_string(),
        n_modes,
        seeds: seeds.to_vec(),
        count,
        checks,
        passed,
        timings_ms: timings,
    })
}

/// Reads either a serialized descriptor set or a `simulate` report (whose
/// full descriptor set is used).
pub fn parse_descriptor_input(text: &str) -> Result<DescriptorSet, Failure> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Failure::Parse {
        path: String::new(),
        message: e.to_string(),
    })?;
    let (value, prefix) = if value.get("schema").and_then(|s| s.as_str()) == Some(REPORT_SCHEMA) {
        let inner = value
            .get("descriptors")
            .and_then(|d| d.get("full"))
            .cloned()
            .ok_or_else(|| Failure::Parse {
                path: "descriptors.full".into(),
                message: "missing field".into(),
            })?;
        (inner, "descriptors.full.")
    } else {
        (value, "")
    };
    let json: DescriptorSetJson =
        serde_path_to_error::deserialize(value).map_err(|e| Failure::Parse {
            path: format!("{prefix}{}", e.path()),
            message: e.into_inner().to_string(),
        })?;
    json.to_descriptor_set()
        .map_err(|e| core_failure(prefix.trim_end_matches('.'), e))
}

pub fn run_reconstruct(d: &DescriptorSet) -> Result<Reconstruction, Failure> {
    let u = descriptors::reconstruct_unitary(d).map_err(|e| core_failure("descriptors", e))?;
    let residual = witness_residual(&u, d).map_err(|e| core_failure("descriptors", e))?;
    Ok(Reconstruction {
        schema: RECONSTRUCTION_SCHEMA.to_string(),
        unitary: MatrixJson::from(&u),
        round_trip_residual: residual,
        tolerance: RECONSTRUCTION_TOL,
        passed: residual <= RECONSTRUCTION_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tunneling_scenario() -> Scenario {
        Scenario::from_json(include_str!("../scenarios/tunneling.json")).unwrap()
    }

    #[test]
    fn example_scenario_passes() {
        let r = run_scenario_with_cap(&tunneling_scenario(), 10).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
        assert_eq!(r.checks.len(), 2);
        // ½-mixed marginals on both single modes
        for s in &r.states.partitions {
            assert!((s.matrix.0[0][0][0] - 0.5).abs() < 1e-12);
            assert!((s.matrix.0[1][1][0] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_gate_list_gives_canonical_descriptors() {
        let scn = Scenario::from_json(r#"{"n_modes": 2, "initial_state": {"occupation": [0, 1]}}"#)
            .unwrap();
        let r = run_scenario_with_cap(&scn, 10).unwrap();
        let d = r.descriptors.full.to_descriptor_set().unwrap();
        let canonical = DescriptorSet::canonical(&ModeSet::full(2), d.heisenberg_state()).unwrap();
        assert_eq!(d, canonical);
        let u = r.reconstruction.unitary.to_unitary().unwrap();
        assert!(u.phase_blind_distance(&fdesc_core::PSUnitary::identity(2)) < 1e-12);
    }

    #[test]
    fn parity_mixing_superposition_is_rejected() {
        let scn = Scenario::from_json(
            r#"{"n_modes": 1, "initial_state": {"superposition": [
                {"occupation": [0], "amplitude": [0.7071067811865476, 0.0]},
                {"occupation": [1], "amplitude": [0.7071067811865476, 0.0]}]}}"#,
        )
        .unwrap();
        let err = run_scenario_with_cap(&scn, 10).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(
            matches!(err, Failure::Invalid { ref path, ref code, .. } if path == "initial_state" && code == "ssr_violation")
        );
    }

    #[test]
    fn malformed_input_reports_path() {
        let err = Scenario::from_json(r#"{"n_modes": 2, "initial_state": {"occupation": [0, 1]}, "gates": [{"gate": "phase", "i": "x"}]}"#)
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let Failure::Parse { path, .. } = err else {
            panic!()
        };
        assert!(path.starts_with("gates[0]"), "{path}");
    }

    #[test]
    fn bad_gate_mode_points_at_the_field() {
        let scn = Scenario::from_json(r#"{"n_modes": 2, "initial_state": {"occupation": [0, 1]}, "gates": [{"gate": "tunneling", "i": 0, "j": 5, "theta": 1.0}]}"#)
            .unwrap();
        let err = run_scenario_with_cap(&scn, 10).unwrap_err();
        assert!(
            matches!(err, Failure::Invalid { ref path, .. } if path == "gates[0].j"),
            "{err}"
        );
    }

    #[test]
    fn odd_hamiltonian_is_an_ssr_violation() {
        // f + f† on one mode
        let scn = Scenario::from_json(
            r#"{"n_modes": 1, "initial_state": {"occupation": [0]},
                "gates": [{"gate": "hamiltonian", "matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]}]}"#,
        )
        .unwrap();
        let err = run_scenario_with_cap(&scn, 10).unwrap_err();
        assert!(
            matches!(err, Failure::Invalid { ref code, ref path, .. } if code == "ssr_violation" && path == "gates[0].matrix")
        );
    }

    #[test]
    fn report_reconstructs_from_its_own_descriptors() {
        let r = run_scenario_with_cap(&tunneling_scenario(), 10).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let d = parse_descriptor_input(&text).unwrap();
        assert!(run_reconstruct(&d).unwrap().round_trip_residual < 1e-8);
    }

    #[test]
    fn tolerance_override_applies() {
        let mut scn = tunneling_scenario();
        scn.tolerances.insert(CheckName::Diagram, 1e-300);
        scn.gates.push(GateSpec::Phase { i: 0, theta: 0.123 });
        let r = run_scenario_with_cap(&scn, 10).unwrap();
        let diagram = r.checks.iter().find(|c| c.name == "diagram").unwrap();
        assert_eq!(diagram.tolerance, 1e-300);
        assert_eq!(diagram.passed, diagram.residual <= 1e-300);
    }

    #[test]
    fn verify_sweep_small() {
        let r = run_verify(2, &[0, 1], 3, 10).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
    }

    #[test]
    fn schema_document_is_json() {
        let v: serde_json::Value = serde_json::from_str(SCHEMA_DOCUMENT).unwrap();
        assert!(v.get("report").is_some() && v.get("scenario").is_some());
    }
}
