//! Interaction-basis generators and the z-chain target family.

use super::{Letter, PauliOperator, PauliString};
use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Which j-site supports the generators may occupy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// Every j-subset of sites.
    AllSubsets,
    /// j consecutive sites, no wrap.
    ChainOpen,
    /// j consecutive sites with wrap-around.
    ChainPeriodic,
}

/// Complete, duplicate-free set of j-body generators under a geometry.
///
/// Generators are plain Pauli strings of locality exactly `locality`;
/// distinct strings are trace-orthogonal, so the set is an orthogonal
/// basis of the chosen interaction sector.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionBasis {
    n_sites: usize,
    locality: usize,
    geometry: Geometry,
    generators: Vec<PauliString>,
}

impl InteractionBasis {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn locality(&self) -> usize {
        self.locality
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// All strictly increasing index sequences of length `r` from `0..n`.
pub(crate) fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        // advance
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - r {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn letter_assignments(j: usize) -> Vec<Vec<Letter>> {
    let axes = [Letter::X, Letter::Y, Letter::Z];
    let mut out = vec![Vec::new()];
    for _ in 0..j {
        let mut next = Vec::with_capacity(out.len() * 3);
        for prefix in &out {
            for &a in &axes {
                let mut v = prefix.clone();
                v.push(a);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Generators of all possible j-body interactions under `geometry`.
///
/// Counts: `C(n,j) * 3^j` for [`Geometry::AllSubsets`], `n * 3^j` for
/// [`Geometry::ChainPeriodic`] when `j < n` (window starts), and
/// `(n-j+1) * 3^j` for [`Geometry::ChainOpen`]. Coinciding windows
/// (periodic with `j = n`) deduplicate.
pub fn generate_interaction_basis(
    n_sites: usize,
    locality: usize,
    geometry: Geometry,
) -> Result<InteractionBasis> {
    if locality == 0 || locality > n_sites {
        return Err(CoreError::LocalityTooLarge {
            locality,
            n_sites,
        });
    }
    let site_sets: Vec<Vec<usize>> = match geometry {
        Geometry::AllSubsets => combinations(n_sites, locality),
        Geometry::ChainOpen => (0..=n_sites - locality)
            .map(|l| (l..l + locality).collect())
            .collect(),
        Geometry::ChainPeriodic => {
            let mut seen = BTreeSet::new();
            let mut sets = Vec::new();
            for l in 0..n_sites {
                let mut sites: Vec<usize> = (0..locality).map(|o| (l + o) % n_sites).collect();
                sites.sort_unstable();
                if seen.insert(sites.clone()) {
                    sets.push(sites);
                }
            }
            sets
        }
    };
    let mut dedup = BTreeSet::new();
    for sites in &site_sets {
        for letters in letter_assignments(locality) {
            let assignments: Vec<(usize, Letter)> =
                sites.iter().copied().zip(letters).collect();
            dedup.insert(PauliString::from_sites(n_sites, &assignments));
        }
    }
    Ok(InteractionBasis {
        n_sites,
        locality,
        geometry,
        generators: dedup.into_iter().collect(),
    })
}

/// Consecutive-Z-window target `C_k * sum_l Z_l ... Z_{l+k-1}` with `C_k`
/// fixed so the HS norm is 1; coinciding windows merge their coefficients.
pub fn z_chain_target(n_sites: usize, k: usize, periodic: bool) -> Result<PauliOperator> {
    let raw = z_chain_target_unnormalized(n_sites, k, periodic, 1.0)?;
    let norm = raw.hs_norm();
    Ok(raw.scaled(1.0 / norm))
}

/// Same windows with an explicit `c_k` instead of the unit-HS-norm default.
pub fn z_chain_target_unnormalized(
    n_sites: usize,
    k: usize,
    periodic: bool,
    c_k: f64,
) -> Result<PauliOperator> {
    if k == 0 || k > n_sites {
        return Err(CoreError::LocalityTooLarge {
            locality: k,
            n_sites,
        });
    }
    let starts: Vec<usize> = if periodic {
        (0..n_sites).collect()
    } else {
        (0..=n_sites - k).collect()
    };
    let mut op = PauliOperator::zero(n_sites);
    for l in starts {
        let sites: Vec<(usize, Letter)> = (0..k).map(|o| ((l + o) % n_sites, Letter::Z)).collect();
        op.add_term(PauliString::from_sites(n_sites, &sites), c_k)?;
    }
    Ok(op)
}
