//! Simulator search: spectral-diameter minimization over an interaction
//! ansatz, and the short-time least-squares best simulator.
//!
//! The diameter objective `f(c) = lambda_max(h(c)) - lambda_min(h(c))`
//! with `h(c) = sum_i c_i L_i - H_T` is convex (pointwise max/-min of
//! affine eigenvalue maps). It is minimized by projected subgradient
//! iteration with Polyak-style steps and multiple restarts; restart
//! agreement is the convergence certificate. At degenerate extremes the
//! subgradient is averaged over the extreme eigenspace.

use crate::error::{CoreError, Result};
use crate::pauli::{generate_interaction_basis, Geometry, PauliOperator, PauliString};
use crate::spectral::{cluster_values, default_degeneracy_tol, eigensystem_dense};
use crate::{CMatrix, CVector, RMatrix, RVector};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// How the strength floor `beta` constrains coefficients.
///
/// `Coefficient` reads `beta` as a direct floor `c_i >= beta`;
/// `Trace` reads the literal trace convention `Tr[H L_i] >= beta`,
/// i.e. `c_i >= beta / 2^n` under Pauli orthogonality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BetaConvention {
    #[default]
    Coefficient,
    Trace,
}

/// Which generators the floor applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FloorMode {
    /// Every generator of locality exactly `k_prime`.
    #[default]
    #[serde(rename = "all_kprime")]
    AllKPrime,
    None,
}

/// Decision-variable basis for the simulator: all generators of locality
/// `1..=k_prime` under a geometry, a strength floor `beta`, and the
/// subset of generators the floor applies to.
#[derive(Debug, Clone)]
pub struct SimulatorAnsatz {
    n_sites: usize,
    k_prime: usize,
    geometry: Geometry,
    generators: Vec<PauliString>,
    beta: f64,
    beta_convention: BetaConvention,
    floor_mode: FloorMode,
    floor_set: Vec<usize>,
}

impl SimulatorAnsatz {
    pub fn new(
        n_sites: usize,
        k_prime: usize,
        geometry: Geometry,
        beta: f64,
        floor_mode: FloorMode,
        beta_convention: BetaConvention,
    ) -> Result<SimulatorAnsatz> {
        if beta < 0.0 {
            return Err(CoreError::domain("beta must be nonnegative"));
        }
        let mut generators = Vec::new();
        for j in 1..=k_prime {
            generators.extend_from_slice(generate_interaction_basis(n_sites, j, geometry)?.generators());
        }
        if generators.is_empty() {
            return Err(CoreError::EmptyAnsatz);
        }
        let floor_set = match floor_mode {
            FloorMode::AllKPrime => generators
                .iter()
                .enumerate()
                .filter(|(_, g)| g.locality() == k_prime)
                .map(|(i, _)| i)
                .collect(),
            FloorMode::None => Vec::new(),
        };
        Ok(SimulatorAnsatz {
            n_sites,
            k_prime,
            geometry,
            generators,
            beta,
            beta_convention,
            floor_mode,
            floor_set,
        })
    }

    /// Ansatz with no strength floor, as used by the short-time search.
    pub fn without_floor(n_sites: usize, k_prime: usize, geometry: Geometry) -> Result<SimulatorAnsatz> {
        SimulatorAnsatz::new(n_sites, k_prime, geometry, 0.0, FloorMode::None, BetaConvention::Coefficient)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn k_prime(&self) -> usize {
        self.k_prime
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn beta_convention(&self) -> BetaConvention {
        self.beta_convention
    }

    pub fn floor_set(&self) -> &[usize] {
        &self.floor_set
    }

    /// The floor applied to raw coefficients.
    pub fn coefficient_floor(&self) -> f64 {
        match self.beta_convention {
            BetaConvention::Coefficient => self.beta,
            BetaConvention::Trace => self.beta / (1u64 << self.n_sites) as f64,
        }
    }

    /// Sum the generators with the given coefficients.
    pub fn assemble(&self, coefficients: &[f64]) -> Result<PauliOperator> {
        if coefficients.len() != self.generators.len() {
            return Err(CoreError::domain(format!(
                "expected {} coefficients, got {}",
                self.generators.len(),
                coefficients.len()
            )));
        }
        let mut op = PauliOperator::zero(self.n_sites);
        for (g, &c) in self.generators.iter().zip(coefficients) {
            op.add_term(g.clone(), c)?;
        }
        Ok(op)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&AnsatzRepr::from(self)).expect("ansatz serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<SimulatorAnsatz> {
        let repr: AnsatzRepr =
            serde_json::from_str(text).map_err(|e| CoreError::Format(e.to_string()))?;
        SimulatorAnsatz::new(
            repr.n_sites,
            repr.k_prime,
            repr.geometry,
            repr.beta,
            repr.floor,
            repr.beta_convention,
        )
    }
}

/// Wire format: `{ n_sites, k_prime, geometry, beta, beta_convention,
/// floor }`; the generator list is derived, not stored.
#[derive(Serialize, Deserialize)]
struct AnsatzRepr {
    n_sites: usize,
    k_prime: usize,
    geometry: Geometry,
    beta: f64,
    #[serde(default)]
    beta_convention: BetaConvention,
    #[serde(default)]
    floor: FloorMode,
}

impl From<&SimulatorAnsatz> for AnsatzRepr {
    fn from(a: &SimulatorAnsatz) -> AnsatzRepr {
        AnsatzRepr {
            n_sites: a.n_sites,
            k_prime: a.k_prime,
            geometry: a.geometry,
            beta: a.beta,
            beta_convention: a.beta_convention,
            floor: a.floor_mode,
        }
    }
}

/// Outcome of either optimizer.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    /// Coefficients aligned with the ansatz generator order.
    pub coefficients: Vec<f64>,
    /// Minimized diameter, or least-squares residual.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best restart objectives within `agreement_tol` of each other.
    pub restarts_agree: bool,
    /// Best objective per restart, in restart order.
    pub restart_objectives: Vec<f64>,
}

impl OptimizationResult {
    /// Result JSON keyed by Pauli string, with diagnostics.
    pub fn to_json(&self, ansatz: &SimulatorAnsatz) -> String {
        let coefficients: BTreeMap<String, f64> = ansatz
            .generators()
            .iter()
            .zip(&self.coefficients)
            .map(|(g, &c)| (g.to_string(), c))
            .collect();
        let repr = ResultRepr {
            coefficients,
            objective: self.objective,
            iterations: self.iterations,
            converged: self.converged,
            restarts_agree: self.restarts_agree,
            restart_objectives: self.restart_objectives.clone(),
            beta: ansatz.beta(),
            beta_convention: ansatz.beta_convention(),
        };
        serde_json::to_string_pretty(&repr).expect("result serialization cannot fail")
    }
}

#[derive(Serialize)]
struct ResultRepr {
    coefficients: BTreeMap<String, f64>,
    objective: f64,
    iterations: usize,
    converged: bool,
    restarts_agree: bool,
    restart_objectives: Vec<f64>,
    beta: f64,
    beta_convention: BetaConvention,
}

/// Knobs for the projected-subgradient diameter minimizer.
#[derive(Debug, Clone, Copy)]
pub struct DiameterOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop a restart when the best objective improves by less than
    /// `stall_tol` over `stall_window` iterations.
    pub stall_window: usize,
    pub stall_tol: f64,
    /// Restart objectives within this of each other count as agreement.
    pub agreement_tol: f64,
    pub seed: u64,
}

impl Default for DiameterOptions {
    fn default() -> Self {
        DiameterOptions {
            restarts: 5,
            max_iters: 5000,
            stall_window: 200,
            stall_tol: 1e-4,
            agreement_tol: 1e-3,
            seed: 0,
        }
    }
}

/// Precomputed signed-permutation action of one Pauli string: column `b`
/// maps to row `perm[b]` with entry `phase[b]`.
struct StringAction {
    perm: Vec<usize>,
    phase: Vec<Complex64>,
}

impl StringAction {
    fn build(s: &PauliString) -> StringAction {
        let dim = 1usize << s.n_sites();
        let mut perm = vec![0usize; dim];
        let mut phase = vec![Complex64::new(0.0, 0.0); dim];
        for b in 0..dim {
            let (idx, ph) = s.basis_action(b);
            perm[b] = idx;
            phase[b] = ph;
        }
        StringAction { perm, phase }
    }

    fn add_into(&self, m: &mut CMatrix, coeff: f64) {
        for b in 0..self.perm.len() {
            m[(self.perm[b], b)] += self.phase[b] * coeff;
        }
    }

    /// `<v| L |v>` (real for Hermitian strings).
    fn expectation(&self, v: &CVector) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..self.perm.len() {
            acc += v[self.perm[b]].conj() * self.phase[b] * v[b];
        }
        acc.re
    }
}

/// Backend interface for the diameter program. The built-in
/// [`SubgradientSolver`] is the default; an external semidefinite solver
/// can implement this to replace it behind the same contract.
pub trait DiameterSolver {
    fn minimize(&self, target: &PauliOperator, ansatz: &SimulatorAnsatz)
        -> Result<OptimizationResult>;
}

/// The built-in projected-subgradient backend.
pub struct SubgradientSolver(pub DiameterOptions);

impl DiameterSolver for SubgradientSolver {
    fn minimize(
        &self,
        target: &PauliOperator,
        ansatz: &SimulatorAnsatz,
    ) -> Result<OptimizationResult> {
        minimize_diameter(target, ansatz, &self.0)
    }
}

/// The convex objective `lambda_max - lambda_min` of
/// `h(c) = sum_i c_i L_i - target`.
pub fn diameter_objective(
    target: &PauliOperator,
    ansatz: &SimulatorAnsatz,
    coefficients: &[f64],
) -> Result<f64> {
    let h = ansatz.assemble(coefficients)?.sub(target)?;
    crate::spectral::spectral_diameter(&h)
}

/// Approximately minimize the connector's spectral diameter over the
/// ansatz, subject to the strength floor on the floor set.
pub fn minimize_diameter(
    target: &PauliOperator,
    ansatz: &SimulatorAnsatz,
    opts: &DiameterOptions,
) -> Result<OptimizationResult> {
    if ansatz.generators().is_empty() {
        return Err(CoreError::EmptyAnsatz);
    }
    if target.n_sites() != ansatz.n_sites() {
        return Err(CoreError::DimensionMismatch(target.n_sites(), ansatz.n_sites()));
    }
    let dim = target.dimension();
    let actions: Vec<StringAction> = ansatz.generators().iter().map(StringAction::build).collect();
    let minus_target = target.scaled(-1.0).to_dense()?;
    let floor = ansatz.coefficient_floor();
    let floor_set = ansatz.floor_set();

    let runs: Vec<RestartOutcome> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            run_restart(
                &actions,
                &minus_target,
                dim,
                floor,
                floor_set,
                opts,
                opts.seed.wrapping_add(r as u64),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    // deterministic merge: best feasible objective, lowest restart index on ties
    let restart_objectives: Vec<f64> = runs.iter().map(|r| r.objective).collect();
    let best_idx = restart_objectives
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let spread = restart_objectives.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - restart_objectives.iter().cloned().fold(f64::INFINITY, f64::min);
    let best = &runs[best_idx];
    Ok(OptimizationResult {
        coefficients: best.coefficients.clone(),
        objective: best.objective,
        iterations: runs.iter().map(|r| r.iterations).sum(),
        converged: runs.iter().all(|r| r.converged),
        restarts_agree: spread <= opts.agreement_tol,
        restart_objectives,
    })
}

struct RestartOutcome {
    coefficients: Vec<f64>,
    objective: f64,
    iterations: usize,
    converged: bool,
}

fn run_restart(
    actions: &[StringAction],
    minus_target: &CMatrix,
    dim: usize,
    floor: f64,
    floor_set: &[usize],
    opts: &DiameterOptions,
    seed: u64,
) -> Result<RestartOutcome> {
    let m = actions.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.1..0.1)).collect();
    for &i in floor_set {
        c[i] = floor + rng.gen_range(0.0..0.1);
    }

    let eval = |c: &[f64]| -> Result<(f64, Vec<f64>)> {
        let mut h = minus_target.clone();
        for (a, &ci) in actions.iter().zip(c) {
            a.add_into(&mut h, ci);
        }
        let es = eigensystem_dense(&h)?;
        let vals = es.eigenvalues();
        let f = vals[dim - 1] - vals[0];
        let ctol = default_degeneracy_tol(es.spectral_norm());
        let clusters = cluster_values(vals, ctol);
        let bottom = clusters.clusters.first().unwrap().clone();
        let top = clusters.clusters.last().unwrap().clone();
        // subgradient: eigenspace-averaged expectations at both extremes
        let mut g = vec![0.0f64; m];
        for (i, a) in actions.iter().enumerate() {
            let mut top_acc = 0.0;
            for k in top.clone() {
                top_acc += a.expectation(&es.vector(k));
            }
            let mut bot_acc = 0.0;
            for k in bottom.clone() {
                bot_acc += a.expectation(&es.vector(k));
            }
            g[i] = top_acc / top.len() as f64 - bot_acc / bottom.len() as f64;
        }
        Ok((f, g))
    };

    let (mut f_best, _) = eval(&c)?;
    let mut c_best = c.clone();
    // Polyak step toward an estimated optimum f_best - delta; the
    // estimate refreshes every 50 iterations, halving delta on stall.
    let mut delta = (0.25 * f_best).max(1e-3);
    let mut window_start_best = f_best;
    let mut stall_ref = f_best;
    let mut iterations = 0;
    let mut converged = false;

    for it in 0..opts.max_iters {
        iterations = it + 1;
        let (f, g) = eval(&c)?;
        if f < f_best {
            f_best = f;
            c_best = c.clone();
        }
        let gnorm2: f64 = g.iter().map(|v| v * v).sum();
        if gnorm2 <= 1e-24 {
            converged = true;
            break;
        }
        let target_level = (f_best - delta).max(0.0);
        let step = (f - target_level).max(0.0) / gnorm2;
        for i in 0..c.len() {
            c[i] -= step * g[i];
        }
        for &i in floor_set {
            if c[i] < floor {
                c[i] = floor;
            }
        }
        if (it + 1) % 50 == 0 {
            if window_start_best - f_best < delta / 4.0 {
                delta = (delta / 2.0).max(1e-7);
            }
            window_start_best = f_best;
        }
        if (it + 1) % opts.stall_window == 0 {
            if stall_ref - f_best < opts.stall_tol {
                converged = true;
                break;
            }
            stall_ref = f_best;
        }
    }
    Ok(RestartOutcome {
        coefficients: c_best,
        objective: f_best,
        iterations,
        converged,
    })
}

/// Best short-time simulator at a fixed initial state: minimizes
/// `||(H_T - sum_i c_i L_i)|psi0>||` over real coefficients, a linear
/// least-squares problem with complex design columns `L_i|psi0>` solved
/// by rank-revealing SVD with the minimum-norm solution on rank
/// deficiency. The short-time state distance at time `t` is
/// `t * residual`.
pub fn short_time_best_simulator(
    target: &PauliOperator,
    psi0: &crate::dynamics::StateVector,
    ansatz: &SimulatorAnsatz,
) -> Result<OptimizationResult> {
    if target.n_sites() != ansatz.n_sites() {
        return Err(CoreError::DimensionMismatch(target.n_sites(), ansatz.n_sites()));
    }
    if psi0.dimension() != target.dimension() {
        return Err(CoreError::DimensionMismatch(target.dimension(), psi0.dimension()));
    }
    let m = ansatz.generators().len();
    let dim = target.dimension();
    // real-stacked design matrix: ||y - A c|| over real c equals the
    // stacked-real-and-imaginary-parts least squares
    let mut design = RMatrix::zeros(2 * dim, m);
    for (col, g) in ansatz.generators().iter().enumerate() {
        let gop = PauliOperator::from_terms(ansatz.n_sites(), [(g.clone(), 1.0)])?;
        let gv = gop.apply(psi0.amplitudes())?;
        for r in 0..dim {
            design[(r, col)] = gv[r].re;
            design[(dim + r, col)] = gv[r].im;
        }
    }
    let y = target.apply(psi0.amplitudes())?;
    let mut rhs = RVector::zeros(2 * dim);
    for r in 0..dim {
        rhs[r] = y[r].re;
        rhs[dim + r] = y[r].im;
    }
    let svd = design.clone().svd(true, true);
    let sv_max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = sv_max * (2 * dim).max(m) as f64 * f64::EPSILON;
    let solution = svd
        .solve(&rhs, cutoff)
        .map_err(|e| CoreError::domain(format!("least-squares solve failed: {e}")))?;
    let residual = (&rhs - &design * &solution).norm();
    Ok(OptimizationResult {
        coefficients: solution.iter().copied().collect(),
        objective: residual,
        iterations: 1,
        converged: true,
        restarts_agree: true,
        restart_objectives: vec![residual],
    })
}

/// The short-time distance curve `(t, t * residual)`.
pub fn short_time_distance_curve(result: &OptimizationResult, times: &[f64]) -> Vec<(f64, f64)> {
    times.iter().map(|&t| (t, t * result.objective)).collect()
}
