//! Simulation fidelity at a state and time, worst-case fidelity over
//! states, and time-sweep curves.
//!
//! The fidelity is `|<psi| e^{itH_QS} e^{-itH_T} |psi>|`. The worst case
//! over states at fixed `t` is computed exactly: the echo operator
//! `U = e^{itH_QS} e^{-itH_T}` is unitary, hence normal, so its numerical
//! range is the convex hull of its eigenvalues on the unit circle; the
//! minimum modulus over the hull is `cos(spread/2)` for eigenphase spread
//! below pi and 0 once the hull contains the origin.

use crate::error::{CoreError, Result};
use crate::pauli::PauliOperator;
use crate::spectral::{
    default_degeneracy_tol, eigensystem, evolve_state, simultaneous_diagonalize_dense, EigenSystem,
};
use crate::{CMatrix, CVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    /// Wrap a vector, requiring unit norm to 1e-10.
    pub fn new(amplitudes: CVector) -> Result<StateVector> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(CoreError::NotNormalized(norm));
        }
        Ok(StateVector { amplitudes })
    }

    /// Normalize and wrap; errors on the zero vector.
    pub fn normalized(amplitudes: CVector) -> Result<StateVector> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(CoreError::NotNormalized(0.0));
        }
        Ok(StateVector {
            amplitudes: amplitudes / Complex64::from(norm),
        })
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `|0...0>` on n sites.
    pub fn zero_state(n_sites: usize) -> StateVector {
        let dim = 1 << n_sites;
        let mut v = CVector::zeros(dim);
        v[0] = Complex64::new(1.0, 0.0);
        StateVector { amplitudes: v }
    }

    /// `(|0...0> + |1...1>)/sqrt(2)`.
    pub fn ghz(n_sites: usize) -> StateVector {
        let dim = 1 << n_sites;
        let mut v = CVector::zeros(dim);
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[0] = a;
        v[dim - 1] = a;
        StateVector { amplitudes: v }
    }

    /// Equal superposition of the single-excitation basis states.
    pub fn w_state(n_sites: usize) -> StateVector {
        let dim = 1 << n_sites;
        let mut v = CVector::zeros(dim);
        let a = Complex64::new(1.0 / (n_sites as f64).sqrt(), 0.0);
        for s in 0..n_sites {
            v[1 << (n_sites - 1 - s)] = a;
        }
        StateVector { amplitudes: v }
    }

    /// Uniform superposition over the full basis.
    pub fn cosdit(n_sites: usize) -> StateVector {
        let dim = 1 << n_sites;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        StateVector {
            amplitudes: CVector::from_element(dim, a),
        }
    }

    /// Haar-random state from a seeded Gaussian-normalize construction.
    pub fn haar<R: rand::Rng>(dimension: usize, rng: &mut R) -> StateVector {
        let mut gauss = || {
            // Box-Muller
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let v = CVector::from_iterator(dimension, (0..dimension).map(|_| Complex64::new(gauss(), gauss())));
        StateVector::normalized(v).expect("Gaussian draw is nonzero almost surely")
    }

    /// Look up a named preset: `zero`, `ghz`, `w`, `cosdit`.
    pub fn preset(name: &str, n_sites: usize) -> Result<StateVector> {
        match name {
            "zero" => Ok(StateVector::zero_state(n_sites)),
            "ghz" => Ok(StateVector::ghz(n_sites)),
            "w" => Ok(StateVector::w_state(n_sites)),
            "cosdit" => Ok(StateVector::cosdit(n_sites)),
            other => Err(CoreError::Format(format!(
                "unknown state preset {other:?}; expected zero, ghz, w or cosdit"
            ))),
        }
    }

    /// JSON wire format: `{ "dimension": N, "amplitudes": [re, im, ...] }`.
    pub fn to_json(&self) -> String {
        let repr = StateRepr {
            dimension: self.dimension(),
            amplitudes: self
                .amplitudes
                .iter()
                .flat_map(|z| [z.re, z.im])
                .collect(),
        };
        serde_json::to_string_pretty(&repr).expect("state serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<StateVector> {
        let repr: StateRepr =
            serde_json::from_str(text).map_err(|e| CoreError::Format(e.to_string()))?;
        if repr.amplitudes.len() != 2 * repr.dimension {
            return Err(CoreError::Format(format!(
                "expected {} interleaved floats, got {}",
                2 * repr.dimension,
                repr.amplitudes.len()
            )));
        }
        let v = CVector::from_iterator(
            repr.dimension,
            repr.amplitudes
                .chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1])),
        );
        StateVector::new(v)
    }
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    dimension: usize,
    /// Interleaved re/im amplitudes.
    amplitudes: Vec<f64>,
}

/// `|<psi| e^{itH_QS} e^{-itH_T} |psi>|`.
pub fn fidelity(
    h_t: &PauliOperator,
    h_qs: &PauliOperator,
    psi: &StateVector,
    t: f64,
) -> Result<f64> {
    let es_t = eigensystem(h_t)?;
    let es_qs = eigensystem(h_qs)?;
    fidelity_from_eigs(&es_t, &es_qs, psi, t)
}

/// Fidelity from precomputed decompositions; avoids re-diagonalizing in
/// sweeps.
pub fn fidelity_from_eigs(
    es_t: &EigenSystem,
    es_qs: &EigenSystem,
    psi: &StateVector,
    t: f64,
) -> Result<f64> {
    if psi.dimension() != es_t.dimension() || psi.dimension() != es_qs.dimension() {
        return Err(CoreError::DimensionMismatch(
            es_t.dimension(),
            psi.dimension(),
        ));
    }
    let forward = evolve_state(es_t, psi.amplitudes(), t, -1.0);
    let back = evolve_state(es_qs, &forward, t, 1.0);
    Ok(psi.amplitudes().dotc(&back).norm())
}

/// Exact minimum of `|<psi|U|psi>|` over unit states at fixed `t`.
///
/// Eigenphases of the unitary echo operator are recovered by
/// simultaneously diagonalizing its commuting Hermitian and
/// anti-Hermitian parts; the minimum over the numerical range is then a
/// one-dimensional arc computation.
pub fn worst_case_fidelity_at_t(
    h_t: &PauliOperator,
    h_qs: &PauliOperator,
    t: f64,
) -> Result<f64> {
    let es_t = eigensystem(h_t)?;
    let es_qs = eigensystem(h_qs)?;
    worst_case_fidelity_from_eigs(&es_t, &es_qs, t)
}

pub fn worst_case_fidelity_from_eigs(
    es_t: &EigenSystem,
    es_qs: &EigenSystem,
    t: f64,
) -> Result<f64> {
    let u_t = crate::spectral::evolve_from(es_t, t, -1.0);
    let u_qs = crate::spectral::evolve_from(es_qs, t, 1.0);
    let u = u_qs * u_t;
    let phases = unitary_eigenphases(&u)?;
    Ok(min_modulus_over_hull(&phases))
}

/// Eigenphases of a unitary matrix via its commuting Cartesian parts
/// `C = (U + U^†)/2`, `S = (U - U^†)/(2i)`.
fn unitary_eigenphases(u: &CMatrix) -> Result<Vec<f64>> {
    let c = (u + u.adjoint()).scale(0.5);
    let minus_i = Complex64::new(0.0, -0.5);
    let s_raw = u - u.adjoint();
    let s = s_raw.map(|z| z * minus_i);
    let (_, cos_vals, sin_vals) = simultaneous_diagonalize_dense(&c, &s, default_degeneracy_tol(1.0))?;
    Ok(cos_vals
        .iter()
        .zip(&sin_vals)
        .map(|(&cv, &sv)| sv.atan2(cv))
        .collect())
}

/// Distance from the origin to the convex hull of `e^{i phase_k}`:
/// `cos(spread/2)` when all phases fit in an arc shorter than pi, else 0.
fn min_modulus_over_hull(phases: &[f64]) -> f64 {
    if phases.is_empty() {
        return 1.0;
    }
    let mut sorted: Vec<f64> = phases.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut max_gap = sorted[0] + two_pi - sorted[sorted.len() - 1];
    for w in sorted.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    let spread = two_pi - max_gap;
    if spread >= std::f64::consts::PI {
        0.0
    } else {
        (spread / 2.0).cos()
    }
}

/// Joint minimum of the worst-case fidelity over states and times in
/// `[0, t_max]`: a grid scan (default 400 points) with golden-section
/// refinement on the best cell. Returns `(t_min, value)`.
pub fn worst_case_fidelity(
    h_t: &PauliOperator,
    h_qs: &PauliOperator,
    t_max: f64,
    grid_points: Option<usize>,
) -> Result<(f64, f64)> {
    let points = grid_points.unwrap_or(400).max(2);
    let es_t = eigensystem(h_t)?;
    let es_qs = eigensystem(h_qs)?;
    let eval = |t: f64| worst_case_fidelity_from_eigs(&es_t, &es_qs, t);
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    let grid: Vec<f64> = (0..points)
        .map(|i| t_max * i as f64 / (points - 1) as f64)
        .collect();
    for (i, &t) in grid.iter().enumerate() {
        let v = eval(t)?;
        if v < best {
            best = v;
            best_i = i;
        }
    }
    // golden-section refinement on the cell around the best grid point
    let mut lo = grid[best_i.saturating_sub(1)];
    let mut hi = grid[(best_i + 1).min(points - 1)];
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    for _ in 0..60 {
        if hi - lo < 1e-12 * t_max.max(1.0) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = eval(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = eval(d)?;
        }
    }
    let t_star = 0.5 * (lo + hi);
    let v_star = eval(t_star)?;
    if v_star < best {
        Ok((t_star, v_star))
    } else {
        Ok((grid[best_i], best))
    }
}

/// Pointwise fidelity along a time grid with the matching `1 - eps*`
/// floor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityCurve {
    pub times: Vec<f64>,
    pub fidelities: Vec<f64>,
    /// `1 - min(1, t * Delta_h / 2)` at each time.
    pub bound_curve: Vec<f64>,
}

impl FidelityCurve {
    pub const CSV_HEADER: &'static str = "t,fidelity,bound";

    pub fn csv_rows(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.times[i], self.fidelities[i], self.bound_curve[i]
            ));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Fidelity of `psi` along `times` (ascending, nonnegative) plus the
/// `1 - eps*` bound curve.
pub fn fidelity_sweep(
    h_t: &PauliOperator,
    h_qs: &PauliOperator,
    psi: &StateVector,
    times: &[f64],
) -> Result<FidelityCurve> {
    for w in times.windows(2) {
        if w[1] < w[0] {
            return Err(CoreError::domain("time grid must be ascending"));
        }
    }
    if let Some(&t0) = times.first() {
        if t0 < 0.0 {
            return Err(CoreError::domain("time grid must be nonnegative"));
        }
    }
    let es_t = eigensystem(h_t)?;
    let es_qs = eigensystem(h_qs)?;
    let delta_h = crate::spectral::spectral_diameter(&h_qs.sub(h_t)?)?;
    let mut fidelities = Vec::with_capacity(times.len());
    let mut bound_curve = Vec::with_capacity(times.len());
    for &t in times {
        fidelities.push(fidelity_from_eigs(&es_t, &es_qs, psi, t)?);
        bound_curve.push(1.0 - (t * delta_h / 2.0).min(1.0));
    }
    Ok(FidelityCurve {
        times: times.to_vec(),
        fidelities,
        bound_curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{heisenberg_xxx, zzz_field_target, CouplingConvention};
    use crate::pauli::{Letter, PauliString};
    use crate::shared::{find_degeneracy_crossings, simulatable_sets, simultaneous_eigenbasis};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn single(n: usize, site: usize, l: Letter, c: f64) -> PauliOperator {
        PauliOperator::from_terms(n, [(PauliString::single(n, site, l), c)]).unwrap()
    }

    fn random_operator(n: usize, n_terms: usize, rng: &mut ChaCha8Rng) -> PauliOperator {
        let mut op = PauliOperator::zero(n);
        for _ in 0..n_terms {
            let letters: Vec<Letter> = (0..n)
                .map(|_| *[Letter::I, Letter::X, Letter::Y, Letter::Z].choose(rng).unwrap())
                .collect();
            let s = PauliString::from_letters(letters);
            if s.is_identity() {
                continue;
            }
            op.add_term(s, rng.gen_range(-1.0..1.0)).unwrap();
        }
        op
    }

    fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> StateVector {
        let v = CVector::from_iterator(
            dim,
            (0..dim).map(|_| {
                Complex64::new(
                    rng.sample::<f64, _>(rand::distributions::Standard) - 0.5,
                    rng.sample::<f64, _>(rand::distributions::Standard) - 0.5,
                )
            }),
        );
        StateVector::normalized(v).unwrap()
    }

    #[test]
    fn presets_are_normalized() {
        for n in [2, 3, 4] {
            for name in ["zero", "ghz", "w", "cosdit"] {
                let s = StateVector::preset(name, n).unwrap();
                assert!((s.amplitudes().norm() - 1.0).abs() < 1e-12);
            }
        }
        assert!(StateVector::preset("bell", 2).is_err());
    }

    #[test]
    fn state_json_roundtrip() {
        let s = StateVector::ghz(3);
        let back = StateVector::from_json(&s.to_json()).unwrap();
        assert!((s.amplitudes() - back.amplitudes()).norm() < 1e-12);
        assert!(StateVector::from_json("{\"dimension\":2,\"amplitudes\":[1.0]}").is_err());
    }

    #[test]
    fn fidelity_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_operator(2, 4, &mut rng);
        let psi = random_state(4, &mut rng);
        assert!((fidelity(&a, &a, &psi, 1.3).unwrap() - 1.0).abs() < 1e-10);
        assert!((fidelity(&a, &a, &psi, 0.0).unwrap() - 1.0).abs() < 1e-12);

        // identity shift changes only a global phase
        let shifted = a.add(&PauliOperator::identity_multiple(2, 0.7)).unwrap();
        for t in [0.5, 2.0, 7.7] {
            assert!((fidelity(&a, &shifted, &psi, t).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fidelity_ignores_global_phase_of_the_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let a = random_operator(3, 5, &mut rng);
        let b = random_operator(3, 5, &mut rng);
        let psi = random_state(8, &mut rng);
        let phase = Complex64::from_polar(1.0, 1.234);
        let rotated = StateVector::new(psi.amplitudes() * phase).unwrap();
        for t in [0.4, 1.7] {
            let f1 = fidelity(&a, &b, &psi, t).unwrap();
            let f2 = fidelity(&a, &b, &rotated, t).unwrap();
            assert!((f1 - f2).abs() < 1e-12);
        }
    }

    #[test]
    fn worst_case_below_ten_thousand_haar_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let a = random_operator(3, 4, &mut rng);
        let b = random_operator(3, 4, &mut rng);
        let t = 0.37;
        let es_a = eigensystem(&a).unwrap();
        let es_b = eigensystem(&b).unwrap();
        let wc = worst_case_fidelity_from_eigs(&es_a, &es_b, t).unwrap();
        let mut sample_min = f64::INFINITY;
        for _ in 0..10_000 {
            let psi = StateVector::haar(8, &mut rng);
            sample_min = sample_min.min(fidelity_from_eigs(&es_a, &es_b, &psi, t).unwrap());
        }
        assert!(wc <= sample_min + 1e-9, "exact {wc} above sampled {sample_min}");
        let eps = crate::bounds::epsilon_star(&a, &b, t).unwrap();
        if eps < 1.0 {
            assert!(wc >= 1.0 - eps - 1e-9);
        }
    }

    #[test]
    fn fidelity_is_time_reversal_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let a = random_operator(3, 5, &mut rng);
            let b = random_operator(3, 5, &mut rng);
            let psi = random_state(8, &mut rng);
            let t = rng.gen_range(0.0..5.0);
            let f1 = fidelity(&a, &b, &psi, t).unwrap();
            let f2 = fidelity(&b, &a, &psi, t).unwrap();
            assert!((f1 - f2).abs() < 1e-10);
        }
    }

    #[test]
    fn worst_case_single_qubit_is_cosine() {
        // h_t = 0, h_qs = Z: eigenphases of e^{itZ} are +-t, so the
        // Bloch-sphere minimum of |<psi|e^{itZ}|psi>| is |cos t| while the
        // phase spread stays below pi and 0 afterwards.
        let zero = PauliOperator::zero(1);
        let z = single(1, 0, Letter::Z, 1.0);
        for t in [0.0f64, 0.3, 1.0, 1.5, 2.0, 3.0] {
            let wc = worst_case_fidelity_at_t(&zero, &z, t).unwrap();
            let spread = (2.0 * t).min(2.0 * std::f64::consts::PI - 2.0 * t);
            let analytic = if spread >= std::f64::consts::PI {
                0.0
            } else {
                t.cos().abs()
            };
            assert!((wc - analytic).abs() < 1e-9, "t={t}: {wc} vs {analytic}");
        }
    }

    #[test]
    fn worst_case_bounds_every_state_and_primary_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let a = random_operator(3, 4, &mut rng);
            let b = random_operator(3, 4, &mut rng);
            let t = rng.gen_range(0.05..0.5);
            let wc = worst_case_fidelity_at_t(&a, &b, t).unwrap();
            for _ in 0..20 {
                let psi = random_state(8, &mut rng);
                let f = fidelity(&a, &b, &psi, t).unwrap();
                assert!(wc <= f + 1e-9, "worst case {wc} above sample {f}");
            }
            let eps = crate::bounds::epsilon_star(&a, &b, t).unwrap();
            assert!(wc >= 1.0 - eps - 1e-9);
        }
    }

    #[test]
    fn global_worst_case_matches_single_qubit_analysis() {
        // h = Z: the state-minimum is |cos t| while the phase spread stays
        // below pi; on [0, 1.2] the joint minimum sits at the right edge
        let zero = PauliOperator::zero(1);
        let z = single(1, 0, Letter::Z, 1.0);
        let (t_star, v) = worst_case_fidelity(&zero, &z, 1.2, Some(100)).unwrap();
        assert!((t_star - 1.2).abs() < 1e-6, "t* = {t_star}");
        assert!((v - 1.2f64.cos()).abs() < 1e-9);

        // on [0, 3] the spread passes pi and the minimum reaches 0
        let (_, v) = worst_case_fidelity(&zero, &z, 3.0, None).unwrap();
        assert!(v.abs() < 1e-12);

        // interior minimum: refinement must outperform the bare grid
        let (t_star, v) = worst_case_fidelity(&zero, &z, 2.2, Some(40)).unwrap();
        assert!(v.abs() < 1e-9);
        assert!(t_star > std::f64::consts::FRAC_PI_2 - 0.05);
    }

    #[test]
    fn sweep_shapes_and_invariants() {
        let a = single(2, 0, Letter::Z, 1.0);
        let b = single(2, 0, Letter::X, 0.4);
        let psi = StateVector::cosdit(2);

        let empty = fidelity_sweep(&a, &b, &psi, &[]).unwrap();
        assert!(empty.is_empty());

        let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let curve = fidelity_sweep(&a, &b, &psi, &times).unwrap();
        assert_eq!(curve.len(), 40);
        for i in 0..curve.len() {
            assert!(curve.fidelities[i] <= 1.0 + 1e-9);
            if curve.bound_curve[i] > 0.0 {
                assert!(curve.fidelities[i] >= curve.bound_curve[i] - 1e-9);
            }
        }
        assert!(fidelity_sweep(&a, &b, &psi, &[1.0, 0.5]).is_err());
        assert!(fidelity_sweep(&a, &b, &psi, &[-1.0, 0.5]).is_err());
    }

    #[test]
    fn simulatable_states_of_commuting_pair_have_unit_fidelity() {
        // pick a crossing coupling of the 4-qubit toy pair and check the
        // states in every simulatable set keep fidelity 1 along a sweep
        let ht = zzz_field_target(4, 1.0, 1.0, CouplingConvention::Pauli).unwrap();
        let unit = heisenberg_xxx(4, 1.0, CouplingConvention::Pauli).unwrap();
        let theta = simultaneous_eigenbasis(&ht, &unit, 1e-8).unwrap();
        let report = find_degeneracy_crossings(theta.eigs_a(), theta.eigs_b(), 1e-9);
        let j = report.crossings[report.crossings.len() / 2].coupling;
        let hqs = heisenberg_xxx(4, j, CouplingConvention::Pauli).unwrap();
        let conn = hqs.sub(&ht).unwrap();
        let tol = default_degeneracy_tol(conn.spectral_norm().unwrap());
        let sets = simulatable_sets(&ht, &hqs, tol).unwrap();
        assert!(!sets.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let times: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        for set in &sets {
            let d = set.dim();
            let coeffs = CVector::from_iterator(
                d,
                (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
            );
            let psi = StateVector::normalized(&set.basis * coeffs).unwrap();
            let curve = fidelity_sweep(&ht, &hqs, &psi, &times).unwrap();
            for f in &curve.fidelities {
                assert!((f - 1.0).abs() <= 1e-8, "fidelity {f} at J={j}");
            }
        }
    }
}
