//! Scenario files and their validation.

use std::collections::BTreeMap;

use fdesc_core::descriptors::superposition;
use fdesc_core::serial::{ComplexJson, MatrixJson};
use fdesc_core::{
    exp_hamiltonian, named_gate, Complex64, FockOperator, FockSpace, FockVector, ModeSet,
    NamedGate, PSUnitary,
};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub n_modes: usize,
    pub initial_state: InitialState,
    /// Applied in order: the first gate acts first.
    #[serde(default)]
    pub gates: Vec<GateSpec>,
    #[serde(default)]
    pub partitions: Vec<Vec<usize>>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<CheckName, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Occupation(Vec<u8>),
    Superposition(Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub occupation: Vec<u8>,
    pub amplitude: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case", deny_unknown_fields)]
pub enum GateSpec {
    Tunneling {
        i: usize,
        j: usize,
        theta: f64,
    },
    Phase {
        i: usize,
        theta: f64,
    },
    Interaction {
        i: usize,
        j: usize,
        theta: f64,
    },
    /// `exp(i h)` for a Hermitian, parity-even `h`.
    Hamiltonian {
        matrix: MatrixJson,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    CanonicalAlgebra,
    NoSignalling,
    LocalityInvariance,
    Diagram,
    PartialTraceAgreement,
    Equivalence,
    Reconstruction,
    OnticPropertyList,
    OnticPropertyListNegativeControl,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::CanonicalAlgebra => "canonical_algebra",
            CheckName::NoSignalling => "no_signalling",
            CheckName::LocalityInvariance => "locality_invariance",
            CheckName::Diagram => "diagram",
            CheckName::PartialTraceAgreement => "partial_trace_agreement",
            CheckName::Equivalence => "equivalence",
            CheckName::Reconstruction => "reconstruction",
            CheckName::OnticPropertyList => "ontic_property_list",
            CheckName::OnticPropertyListNegativeControl => "ontic_property_list_negative_control",
        }
    }

    /// Checks that draw a bipartition of the modes.
    fn needs_two_modes(self) -> bool {
        matches!(
            self,
            CheckName::NoSignalling
                | CheckName::LocalityInvariance
                | CheckName::OnticPropertyList
                | CheckName::OnticPropertyListNegativeControl
        )
    }
}

fn default_count() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub name: CheckName,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_count")]
    pub count: usize,
}

/// A scenario after validation: the Fock space, initial vector, composed
/// unitary and partitions.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub space: FockSpace,
    pub psi0: FockVector,
    pub unitary: PSUnitary,
    pub partitions: Vec<ModeSet>,
}

fn invalid(path: impl Into<String>, err: fdesc_core::Error) -> Failure {
    Failure::Invalid {
        path: path.into(),
        code: err.code().to_string(),
        message: err.to_string(),
    }
}

fn invalid_msg(path: impl Into<String>, code: &str, message: impl Into<String>) -> Failure {
    Failure::Invalid {
        path: path.into(),
        code: code.to_string(),
        message: message.into(),
    }
}

fn check_occupation(occ: &[u8], n: usize, path: &str) -> Result<(), Failure> {
    if occ.len() != n {
        return Err(invalid_msg(
            path,
            "dimension_mismatch",
            format!("expected {n} occupations, found {}", occ.len()),
        ));
    }
    if let Some(k) = occ.iter().position(|&x| x > 1) {
        return Err(invalid_msg(
            format!("{path}[{k}]"),
            "invalid_occupation",
            "occupations are 0 or 1",
        ));
    }
    Ok(())
}

fn initial_vector(state: &InitialState, space: &FockSpace) -> Result<FockVector, Failure> {
    let n = space.n_modes();
    match state {
        InitialState::Occupation(occ) => {
            check_occupation(occ, n, "initial_state.occupation")?;
            space
                .basis_state(occ)
                .map_err(|e| invalid("initial_state.occupation", e))
        }
        InitialState::Superposition(terms) => {
            if terms.is_empty() {
                return Err(invalid_msg(
                    "initial_state.superposition",
                    "empty_state",
                    "no terms",
                ));
            }
            let mut parities = Vec::new();
            let mut pairs = Vec::new();
            for (k, t) in terms.iter().enumerate() {
                let path = format!("initial_state.superposition[{k}]");
                check_occupation(&t.occupation, n, &format!("{path}.occupation"))?;
                if !t.amplitude.iter().all(|x| x.is_finite()) {
                    return Err(invalid_msg(
                        format!("{path}.amplitude"),
                        "non_finite",
                        "amplitude is not finite",
                    ));
                }
                let z = Complex64::new(t.amplitude[0], t.amplitude[1]);
                if z.norm() > 0.0 {
                    parities.push(t.occupation.iter().map(|&x| x as u32).sum::<u32>() % 2);
                }
                pairs.push((t.occupation.clone(), z));
            }
            if parities.windows(2).any(|w| w[0] != w[1]) {
                return Err(invalid_msg(
                    "initial_state",
                    "ssr_violation",
                    "superposition mixes even and odd particle numbers",
                ));
            }
            superposition(space, &pairs).map_err(|e| invalid("initial_state.superposition", e))
        }
    }
}

fn gate_unitary(gate: &GateSpec, space: &FockSpace, path: &str) -> Result<PSUnitary, Failure> {
    let n = space.n_modes();
    let named = match *gate {
        GateSpec::Tunneling { i, j, theta } => NamedGate::Tunneling { i, j, theta },
        GateSpec::Phase { i, theta } => NamedGate::Phase { i, theta },
        GateSpec::Interaction { i, j, theta } => NamedGate::Interaction { i, j, theta },
        GateSpec::Hamiltonian { ref matrix } => {
            let m = matrix
                .to_matrix()
                .map_err(|e| invalid(format!("{path}.matrix"), e))?;
            let h = FockOperator::new(n, m).map_err(|e| invalid(format!("{path}.matrix"), e))?;
            return exp_hamiltonian(&h).map_err(|e| invalid(format!("{path}.matrix"), e));
        }
    };
    let (fields, theta) = match named {
        NamedGate::Tunneling { i, j, theta } | NamedGate::Interaction { i, j, theta } => {
            (vec![("i", i), ("j", j)], theta)
        }
        NamedGate::Phase { i, theta } => (vec![("i", i)], theta),
    };
    for (field, mode) in &fields {
        if *mode >= n {
            return Err(invalid(
                format!("{path}.{field}"),
                fdesc_core::Error::ModeOutOfRange {
                    mode: *mode,
                    n_modes: n,
                },
            ));
        }
    }
    if !theta.is_finite() {
        return Err(invalid_msg(
            format!("{path}.theta"),
            "non_finite",
            "angle is not finite",
        ));
    }
    named_gate(named, space).map_err(|e| invalid(path, e))
}

/// `FDESC_MODE_CAP` if set, else the library default.
pub fn mode_cap() -> Result<usize, Failure> {
    match std::env::var("FDESC_MODE_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Parse {
            path: "FDESC_MODE_CAP".into(),
            message: format!("expected a positive integer, got {v:?}"),
        }),
        Err(_) => Ok(fdesc_core::DEFAULT_MODE_CAP),
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, Failure> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Failure::Parse {
                path,
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn prepare(&self, cap: usize) -> Result<Prepared, Failure> {
        let space = FockSpace::with_cap(self.n_modes, cap).map_err(|e| invalid("n_modes", e))?;
        let psi0 = initial_vector(&self.initial_state, &space)?;
        let mut unitary = PSUnitary::identity(self.n_modes);
        for (k, gate) in self.gates.iter().enumerate() {
            let g = gate_unitary(gate, &space, &format!("gates[{k}]"))?;
            unitary = &g * &unitary;
        }
        let partitions = self
            .partitions
            .iter()
            .enumerate()
            .map(|(k, p)| {
                ModeSet::new(p.iter().copied(), self.n_modes)
                    .map_err(|e| invalid(format!("partitions[{k}]"), e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (k, c) in self.checks.iter().enumerate() {
            if c.name.needs_two_modes() && self.n_modes < 2 {
                return Err(invalid_msg(
                    format!("checks[{k}].name"),
                    "invalid_mode_set",
                    format!("{} needs at least two modes", c.name.as_str()),
                ));
            }
        }
        for (name, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol > 0.0) {
                return Err(invalid_msg(
                    format!("tolerances.{}", name.as_str()),
                    "invalid_tolerance",
                    "tolerances are positive and finite",
                ));
            }
        }
        Ok(Prepared {
            space,
            psi0,
            unitary,
            partitions,
        })
    }
}
