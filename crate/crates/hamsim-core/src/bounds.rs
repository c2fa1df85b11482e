//! Worst-case fidelity error bounds for approximate simulation, the
//! weaker exponential/HS bounds, and the BCH convergence check.
//!
//! The primary bound guarantees that any simulator reproduces any target
//! to fidelity at least `1 - min(1, t * Delta_h / 2)` where `Delta_h` is
//! the spectral diameter of the connector `h = H_QS - H_T`. The weaker
//! bounds `b1 = (e^{t Delta_h} - 1)/2` and `b2 = t ||h||_HS` are reported
//! unclamped so plots can show them directly; neither dominates the other
//! universally.

use crate::error::Result;
use crate::pauli::PauliOperator;
use crate::spectral::spectral_diameter;
use serde::{Deserialize, Serialize};

/// Which submultiplicative norm the BCH convergence check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NormChoice {
    #[default]
    Spectral,
    HilbertSchmidt,
}

/// Error bounds for one `(H_T, H_QS, t)` triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub t: f64,
    /// Spectral diameter of the connector.
    pub delta_h: f64,
    /// `min(1, t * delta_h / 2)`.
    pub eps_star: f64,
    /// `(e^{t delta_h} - 1) / 2`, unclamped.
    pub b1: f64,
    /// `t * ||h||_HS`, unclamped.
    pub b2: f64,
    pub bch_convergent: bool,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "t,delta_h,eps_star,b1,b2,bch_convergent";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.t, self.delta_h, self.eps_star, self.b1, self.b2, self.bch_convergent
        )
    }

    /// Full report for a pair at time `t` under the given BCH norm.
    pub fn compute(
        h_t: &PauliOperator,
        h_qs: &PauliOperator,
        t: f64,
        norm_choice: NormChoice,
    ) -> Result<BoundReport> {
        let h = h_qs.sub(h_t)?;
        let delta_h = spectral_diameter(&h)?;
        let (b1, b2) = weak_bounds_from(delta_h, h.hs_norm(), t);
        Ok(BoundReport {
            t,
            delta_h,
            eps_star: eps_star_from(delta_h, t),
            b1,
            b2,
            bch_convergent: bch_convergence_check(h_t, h_qs, t, norm_choice)?,
        })
    }
}

fn eps_star_from(delta_h: f64, t: f64) -> f64 {
    (t * delta_h / 2.0).min(1.0)
}

fn weak_bounds_from(delta_h: f64, hs_norm: f64, t: f64) -> (f64, f64) {
    (((t * delta_h).exp() - 1.0) / 2.0, t * hs_norm)
}

/// `min(1, t * Delta_h / 2)` with `h = h_qs - h_t`; every state is
/// simulated to fidelity at least `1 - eps_star`.
pub fn epsilon_star(h_t: &PauliOperator, h_qs: &PauliOperator, t: f64) -> Result<f64> {
    assert!(t >= 0.0, "time must be nonnegative");
    let h = h_qs.sub(h_t)?;
    Ok(eps_star_from(spectral_diameter(&h)?, t))
}

/// The weaker bounds `(b1, b2)`, unclamped; callers compose `min(1, .)`.
pub fn weak_bounds(h_t: &PauliOperator, h_qs: &PauliOperator, t: f64) -> Result<(f64, f64)> {
    assert!(t >= 0.0, "time must be nonnegative");
    let h = h_qs.sub(h_t)?;
    Ok(weak_bounds_from(spectral_diameter(&h)?, h.hs_norm(), t))
}

/// True iff `||H_QS|| + ||H_T|| < pi / t` under the chosen norm, the
/// absolute-convergence condition for the BCH series; vacuously true at
/// `t = 0`.
pub fn bch_convergence_check(
    h_t: &PauliOperator,
    h_qs: &PauliOperator,
    t: f64,
    norm_choice: NormChoice,
) -> Result<bool> {
    if t == 0.0 {
        return Ok(true);
    }
    let norm = |op: &PauliOperator| -> Result<f64> {
        match norm_choice {
            NormChoice::Spectral => op.spectral_norm(),
            NormChoice::HilbertSchmidt => Ok(op.hs_norm()),
        }
    };
    Ok(norm(h_qs)? + norm(h_t)? < std::f64::consts::PI / t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Letter, PauliString};
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

    #[test]
    fn eps_star_basics() {
        let a = single(2, 0, Letter::Z, 1.0);
        let b = single(2, 1, Letter::X, 1.0);
        assert_eq!(epsilon_star(&a, &b, 0.0).unwrap(), 0.0);

        // identity shift: zero diameter for all t
        let shifted = a.add(&PauliOperator::identity_multiple(2, 3.0)).unwrap();
        assert_eq!(epsilon_star(&a, &shifted, 5.0).unwrap(), 0.0);

        // clamp at 1: connector Z has diameter 2, t = 2 gives t*d/2 = 2
        let zero = PauliOperator::zero(1);
        let z = single(1, 0, Letter::Z, 1.0);
        assert_eq!(epsilon_star(&zero, &z, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn weak_bounds_at_zero_time() {
        let a = single(1, 0, Letter::Z, 1.0);
        let b = single(1, 0, Letter::X, 1.0);
        assert_eq!(weak_bounds(&a, &b, 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn bound_orderings() {
        // t*d/2 <= b1 (x <= e^x - 1) and t*d/2 <= b2 on random pairs
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let a = random_operator(3, 4, &mut rng);
            let b = random_operator(3, 4, &mut rng);
            let t = rng.gen_range(0.0..2.0);
            let primary = epsilon_star(&a, &b, t).unwrap();
            let h = b.sub(&a).unwrap();
            let d = spectral_diameter(&h).unwrap();
            let unclamped = t * d / 2.0;
            let (b1, b2) = weak_bounds(&a, &b, t).unwrap();
            assert!(unclamped <= b1 + 1e-12, "t*d/2 {unclamped} > b1 {b1}");
            assert!(unclamped <= b2 + 1e-12, "t*d/2 {unclamped} > b2 {b2}");
            assert!(primary <= b1.min(1.0) + 1e-12);
            assert!(primary <= b2.min(1.0) + 1e-12);
        }
    }

    #[test]
    fn neither_weak_bound_dominates() {
        // single qubit, h = Z: b1 = (e^{2t}-1)/2, b2 = t*sqrt(2);
        // b1 < b2 at small t, b1 > b2 at large t
        let zero = PauliOperator::zero(1);
        let z = single(1, 0, Letter::Z, 1.0);
        let (b1_small, b2_small) = weak_bounds(&zero, &z, 0.05).unwrap();
        assert!(b1_small < b2_small);
        let (b1_large, b2_large) = weak_bounds(&zero, &z, 2.0).unwrap();
        assert!(b1_large > b2_large);
    }

    #[test]
    fn z_chain_pair_keeps_b1_below_b2_over_the_sub_one_range() {
        // wide-HS connector: the exponential bound stays below the HS
        // bound for every time where both are meaningful (< 1)
        let target = crate::pauli::z_chain_target(5, 3, true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let mut sim = PauliOperator::zero(5);
        for g in crate::pauli::generate_interaction_basis(5, 2, crate::pauli::Geometry::ChainPeriodic)
            .unwrap()
            .generators()
        {
            sim.add_term(g.clone(), 0.2 * rng.gen_range(-1.0..1.0)).unwrap();
        }
        let mut checked = 0;
        for i in 1..=200 {
            let t = 3.0 * i as f64 / 200.0;
            let (b1, b2) = weak_bounds(&target, &sim, t).unwrap();
            if b1 < 1.0 && b2 < 1.0 {
                assert!(b1 < b2, "b1 {b1} >= b2 {b2} at t = {t}");
                checked += 1;
            }
        }
        assert!(checked > 10, "sub-1 range too short to be meaningful");
    }

    #[test]
    fn bch_threshold_flip() {
        // ||H_QS|| = ||H_T|| = 1: flag flips exactly at t = pi/2
        let a = single(1, 0, Letter::Z, 1.0);
        let b = single(1, 0, Letter::X, 1.0);
        let threshold = std::f64::consts::PI / 2.0;
        assert!(bch_convergence_check(&a, &b, threshold - 1e-6, NormChoice::Spectral).unwrap());
        assert!(!bch_convergence_check(&a, &b, threshold + 1e-6, NormChoice::Spectral).unwrap());
        assert!(!bch_convergence_check(&a, &b, 2.0, NormChoice::Spectral).unwrap());
        assert!(bch_convergence_check(&a, &b, 1e-6, NormChoice::Spectral).unwrap());
        assert!(bch_convergence_check(&a, &b, 0.0, NormChoice::Spectral).unwrap());
    }

    #[test]
    fn report_row_shape() {
        let a = single(1, 0, Letter::Z, 1.0);
        let b = single(1, 0, Letter::X, 1.0);
        let report = BoundReport::compute(&a, &b, 0.5, NormChoice::Spectral).unwrap();
        assert!((report.eps_star - (0.5 * report.delta_h / 2.0).min(1.0)).abs() < 1e-12);
        let row = report.csv_row();
        assert_eq!(row.split(',').count(), 6);
        assert!(row.ends_with("true") || row.ends_with("false"));
    }
}
