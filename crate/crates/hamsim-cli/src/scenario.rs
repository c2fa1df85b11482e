//! Scenario schema, validation, and input resolution.
//!
//! A scenario file is a JSON object with a `kind` tag and kind-specific
//! parameters. Validation performs schema and physics checks (locality
//! versus system size, nonnegative strengths, ascending time grids,
//! mandatory seeds for randomized kinds) without executing anything.

use hamsim_core::models::CouplingConvention;
use hamsim_core::optimize::{BetaConvention, FloorMode};
use hamsim_core::pauli::{generate_interaction_basis, z_chain_target, Geometry, PauliOperator};
use hamsim_core::bounds::NormChoice;
use hamsim_core::dynamics::StateVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    ExactCommuting(ExactCommuting),
    ExactNoncommuting(ExactNoncommuting),
    SharedBound(SharedBound),
    DiameterMin(DiameterMin),
    ShortTime(ShortTime),
    BoundsCompare(BoundsCompare),
    FidelitySweep(FidelitySweep),
    ParentCheck(ParentCheck),
}

pub const KNOWN_KINDS: &str = "exact_commuting, exact_noncommuting, shared_bound, diameter_min, short_time, bounds_compare, fidelity_sweep, parent_check";

fn default_n4() -> usize {
    4
}
fn default_one() -> f64 {
    1.0
}
fn default_t_max() -> f64 {
    10.0
}
fn default_points() -> usize {
    50
}
fn default_states_per_set() -> usize {
    10
}
fn default_b() -> [f64; 3] {
    [-4.0, 0.0, 1.0]
}
fn default_trials() -> usize {
    200
}
fn default_n5() -> usize {
    5
}
fn default_k_prime() -> usize {
    2
}
fn default_chain_periodic() -> Geometry {
    Geometry::ChainPeriodic
}
fn default_all_subsets() -> Geometry {
    Geometry::AllSubsets
}
fn default_beta() -> f64 {
    0.01
}
fn default_k_values() -> Vec<usize> {
    vec![3, 4, 5]
}
fn default_restarts() -> usize {
    5
}
fn default_max_iters() -> usize {
    5000
}
fn default_presets() -> Vec<String> {
    vec!["cosdit".into(), "zero".into(), "ghz".into(), "w".into()]
}
fn default_short_t_max() -> f64 {
    0.1
}
fn default_localities() -> Vec<usize> {
    vec![1, 2]
}
fn default_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactCommuting {
    #[serde(default = "default_n4")]
    pub n_sites: usize,
    #[serde(default = "default_one")]
    pub j3: f64,
    #[serde(default = "default_one")]
    pub hx: f64,
    #[serde(default)]
    pub convention: CouplingConvention,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub time_points: usize,
    #[serde(default = "default_states_per_set")]
    pub states_per_set: usize,
    #[serde(default)]
    pub max_crossings: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactNoncommuting {
    #[serde(default = "default_n4")]
    pub n_sites: usize,
    #[serde(default = "default_one")]
    pub j3: f64,
    #[serde(default = "default_one")]
    pub hx: f64,
    #[serde(default = "default_b")]
    pub b: [f64; 3],
    #[serde(default)]
    pub convention: CouplingConvention,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub time_points: usize,
    /// Optional scan emitting commutator nullity over a field-parameter
    /// grid (the search helper for picking large-kernel parameters).
    #[serde(default)]
    pub b_grid: Option<BGrid>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharedBound {
    #[serde(default = "default_n4")]
    pub n_sites: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiameterMin {
    #[serde(default = "default_n5")]
    pub n_sites: usize,
    #[serde(default = "default_k_prime")]
    pub k_prime: usize,
    #[serde(default = "default_chain_periodic")]
    pub geometry: Geometry,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub beta_convention: BetaConvention,
    #[serde(default)]
    pub floor: FloorMode,
    #[serde(default = "default_k_values")]
    pub k_values: Vec<usize>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShortTime {
    pub target: OperatorSpec,
    #[serde(default = "default_k_prime")]
    pub k_prime: usize,
    #[serde(default = "default_chain_periodic")]
    pub geometry: Geometry,
    #[serde(default = "default_presets")]
    pub states: Vec<String>,
    #[serde(default = "default_short_t_max")]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub time_points: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsCompare {
    pub target: OperatorSpec,
    pub simulator: OperatorSpec,
    #[serde(default)]
    pub t_min: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub time_points: usize,
    #[serde(default)]
    pub norm_choice: NormChoice,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelitySweep {
    pub target: OperatorSpec,
    pub simulator: OperatorSpec,
    pub state: StateSpec,
    #[serde(default)]
    pub t_min: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub time_points: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParentCheck {
    pub state: StateSpec,
    #[serde(default = "default_localities")]
    pub localities: Vec<usize>,
    #[serde(default = "default_all_subsets")]
    pub geometry: Geometry,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Optionally also run the two-locality joint-eigenstate condition.
    #[serde(default)]
    pub necessary_condition: Option<NecessaryConditionSpec>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NecessaryConditionSpec {
    pub k: usize,
    pub k_prime: usize,
}

/// How an operator input is provided.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    File { file: String },
    Inline { inline: PauliOperator },
    Random { random: RandomOperator },
    ZChain { z_chain: ZChainSpec },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomOperator {
    pub n_sites: usize,
    pub max_locality: usize,
    #[serde(default = "default_chain_periodic")]
    pub geometry: Geometry,
    #[serde(default = "default_one")]
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZChainSpec {
    pub n_sites: usize,
    pub k: usize,
    #[serde(default = "default_true")]
    pub periodic: bool,
}

fn default_true() -> bool {
    true
}

/// How a state input is provided.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Preset { preset: String, n_sites: usize },
    File { file: String },
    Haar { haar: usize },
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Scenario::ExactCommuting(_) => "exact_commuting",
            Scenario::ExactNoncommuting(_) => "exact_noncommuting",
            Scenario::SharedBound(_) => "shared_bound",
            Scenario::DiameterMin(_) => "diameter_min",
            Scenario::ShortTime(_) => "short_time",
            Scenario::BoundsCompare(_) => "bounds_compare",
            Scenario::FidelitySweep(_) => "fidelity_sweep",
            Scenario::ParentCheck(_) => "parent_check",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Scenario::ExactCommuting(p) => p.seed,
            Scenario::ExactNoncommuting(p) => p.seed,
            Scenario::SharedBound(p) => p.seed,
            Scenario::DiameterMin(p) => p.seed,
            Scenario::ShortTime(p) => p.seed,
            Scenario::BoundsCompare(p) => p.seed,
            Scenario::FidelitySweep(p) => p.seed,
            Scenario::ParentCheck(p) => p.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Scenario::ExactCommuting(p) => p.seed = Some(seed),
            Scenario::ExactNoncommuting(p) => p.seed = Some(seed),
            Scenario::SharedBound(p) => p.seed = Some(seed),
            Scenario::DiameterMin(p) => p.seed = Some(seed),
            Scenario::ShortTime(p) => p.seed = Some(seed),
            Scenario::BoundsCompare(p) => p.seed = Some(seed),
            Scenario::FidelitySweep(p) => p.seed = Some(seed),
            Scenario::ParentCheck(p) => p.seed = Some(seed),
        }
    }

    /// Schema and physics checks; never executes the scenario.
    pub fn validate(&self) -> Vec<String> {
        let mut diags = Vec::new();
        let mut need_seed = || {
            if self.seed().is_none() {
                diags.push("seed is mandatory for randomized scenarios".to_string());
            }
        };
        match self {
            Scenario::ExactCommuting(p) => {
                need_seed();
                check_sites(p.n_sites, &mut diags);
                check_grid(0.0, p.t_max, p.time_points, &mut diags);
                if p.states_per_set == 0 {
                    diags.push("states_per_set must be positive".into());
                }
                if p.n_sites < 3 {
                    diags.push("the 3-body target needs at least 3 sites".into());
                }
            }
            Scenario::ExactNoncommuting(p) => {
                need_seed();
                check_sites(p.n_sites, &mut diags);
                check_grid(0.0, p.t_max, p.time_points, &mut diags);
                if p.n_sites < 3 {
                    diags.push("the 3-body target needs at least 3 sites".into());
                }
                if p.b == [0.0, 0.0, 0.0] {
                    diags.push("zero fields give a commuting pair; use exact_commuting".into());
                }
                if let Some(g) = &p.b_grid {
                    if g.step <= 0.0 || g.max < g.min {
                        diags.push("b_grid must have positive step and max >= min".into());
                    }
                }
            }
            Scenario::SharedBound(p) => {
                need_seed();
                check_sites(p.n_sites, &mut diags);
                if p.trials == 0 {
                    diags.push("trials must be positive".into());
                }
            }
            Scenario::DiameterMin(p) => {
                need_seed();
                check_sites(p.n_sites, &mut diags);
                if p.beta < 0.0 {
                    diags.push("beta must be nonnegative".into());
                }
                if p.k_prime == 0 || p.k_prime > p.n_sites {
                    diags.push(format!(
                        "simulator locality {} out of range for {} sites",
                        p.k_prime, p.n_sites
                    ));
                }
                for &k in &p.k_values {
                    if k > p.n_sites {
                        diags.push(format!("locality exceeds system size: k = {k} > n = {}", p.n_sites));
                    }
                }
                if p.restarts == 0 {
                    diags.push("restarts must be positive".into());
                }
            }
            Scenario::ShortTime(p) => {
                need_seed();
                check_grid(0.0, p.t_max, p.time_points, &mut diags);
                check_operator_spec(&p.target, &mut diags);
                if let Some(n) = operator_spec_sites(&p.target) {
                    if p.k_prime == 0 || p.k_prime > n {
                        diags.push(format!("simulator locality {} out of range for {n} sites", p.k_prime));
                    }
                }
                for s in &p.states {
                    if !matches!(s.as_str(), "zero" | "ghz" | "w" | "cosdit") {
                        diags.push(format!("unknown state preset {s:?}"));
                    }
                }
            }
            Scenario::BoundsCompare(p) => {
                need_seed();
                check_grid(p.t_min, p.t_max, p.time_points, &mut diags);
                check_operator_spec(&p.target, &mut diags);
                check_operator_spec(&p.simulator, &mut diags);
            }
            Scenario::FidelitySweep(p) => {
                need_seed();
                check_grid(p.t_min, p.t_max, p.time_points, &mut diags);
                check_operator_spec(&p.target, &mut diags);
                check_operator_spec(&p.simulator, &mut diags);
            }
            Scenario::ParentCheck(p) => {
                need_seed();
                if p.tol <= 0.0 {
                    diags.push("tol must be positive".into());
                }
                if p.localities.is_empty() {
                    diags.push("localities must be nonempty".into());
                }
                if let Some(n) = state_spec_sites(&p.state) {
                    for &j in &p.localities {
                        if j == 0 || j > n {
                            diags.push(format!("locality exceeds system size: j = {j} > n = {n}"));
                        }
                    }
                }
                if let Some(nc) = &p.necessary_condition {
                    if nc.k_prime >= nc.k {
                        diags.push("necessary_condition requires k' < k".into());
                    }
                }
            }
        }
        diags
    }
}

fn check_sites(n: usize, diags: &mut Vec<String>) {
    if n == 0 {
        diags.push("n_sites must be positive".into());
    } else if n > 12 {
        diags.push(format!("n_sites = {n} exceeds the dense cap of 12"));
    }
}

fn check_grid(t_min: f64, t_max: f64, points: usize, diags: &mut Vec<String>) {
    if t_min < 0.0 {
        diags.push("negative time in grid".into());
    }
    if t_max < t_min {
        diags.push("time grid must be ascending (t_max >= t_min)".into());
    }
    if points == 0 {
        diags.push("time_points must be positive".into());
    }
}

fn check_operator_spec(spec: &OperatorSpec, diags: &mut Vec<String>) {
    match spec {
        OperatorSpec::Random { random } => {
            if random.max_locality == 0 || random.max_locality > random.n_sites {
                diags.push(format!(
                    "locality exceeds system size: max_locality = {} > n = {}",
                    random.max_locality, random.n_sites
                ));
            }
        }
        OperatorSpec::ZChain { z_chain } => {
            if z_chain.k == 0 || z_chain.k > z_chain.n_sites {
                diags.push(format!(
                    "locality exceeds system size: k = {} > n = {}",
                    z_chain.k, z_chain.n_sites
                ));
            }
        }
        OperatorSpec::File { .. } | OperatorSpec::Inline { .. } => {}
    }
}

fn operator_spec_sites(spec: &OperatorSpec) -> Option<usize> {
    match spec {
        OperatorSpec::Inline { inline } => Some(inline.n_sites()),
        OperatorSpec::Random { random } => Some(random.n_sites),
        OperatorSpec::ZChain { z_chain } => Some(z_chain.n_sites),
        OperatorSpec::File { .. } => None,
    }
}

fn state_spec_sites(spec: &StateSpec) -> Option<usize> {
    match spec {
        StateSpec::Preset { n_sites, .. } => Some(*n_sites),
        StateSpec::Haar { haar } => Some(*haar),
        StateSpec::File { .. } => None,
    }
}

/// Uniform linear grid including both endpoints (a single point sits at
/// `t_min`).
pub fn time_grid(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![t_min];
    }
    (0..points)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Materialize an operator spec; random draws use the scenario seed
/// offset by a per-role stream index so each input is independent.
pub fn resolve_operator(spec: &OperatorSpec, seed: u64, stream: u64) -> Result<PauliOperator, String> {
    match spec {
        OperatorSpec::File { file } => {
            let text = std::fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?;
            PauliOperator::from_json(&text).map_err(|e| e.to_string())
        }
        OperatorSpec::Inline { inline } => Ok(inline.clone()),
        OperatorSpec::Random { random } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (stream.wrapping_mul(0x9e3779b97f4a7c15)));
            random_local_operator(
                random.n_sites,
                random.max_locality,
                random.geometry,
                random.scale,
                &mut rng,
            )
            .map_err(|e| e.to_string())
        }
        OperatorSpec::ZChain { z_chain } => {
            z_chain_target(z_chain.n_sites, z_chain.k, z_chain.periodic).map_err(|e| e.to_string())
        }
    }
}

/// Random real coefficients on every generator of locality up to
/// `max_locality`.
pub fn random_local_operator<R: Rng>(
    n_sites: usize,
    max_locality: usize,
    geometry: Geometry,
    scale: f64,
    rng: &mut R,
) -> hamsim_core::Result<PauliOperator> {
    let mut op = PauliOperator::zero(n_sites);
    for j in 1..=max_locality {
        for g in generate_interaction_basis(n_sites, j, geometry)?.generators() {
            op.add_term(g.clone(), scale * rng.gen_range(-1.0..1.0))?;
        }
    }
    Ok(op)
}

pub fn resolve_state(spec: &StateSpec, seed: u64, stream: u64) -> Result<StateVector, String> {
    match spec {
        StateSpec::Preset { preset, n_sites } => {
            StateVector::preset(preset, *n_sites).map_err(|e| e.to_string())
        }
        StateSpec::File { file } => {
            let text = std::fs::read_to_string(file).map_err(|e| format!("{file}: {e}"))?;
            StateVector::from_json(&text).map_err(|e| e.to_string())
        }
        StateSpec::Haar { haar } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (stream.wrapping_mul(0x9e3779b97f4a7c15)));
            Ok(StateVector::haar(1 << haar, &mut rng))
        }
    }
}
