//! Exact-simulation machinery: simultaneous eigenbases of commuting pairs,
//! shared subspaces of non-commuting pairs, the shared-count upper bound,
//! projected connectors, and connector-degeneracy tuning.
//!
//! For a non-commuting pair the shared subspace is taken as the kernel of
//! the commutator (its span upper-bounds any set of joint eigenvectors),
//! re-rotated so that the compressions of both Hamiltonians onto it are
//! diagonal. The kernel need not be invariant under the full operators,
//! so each basis vector carries its full-operator eigen-residuals as a
//! diagnostic; vectors with residuals at solver accuracy are genuine
//! shared eigenstates.

use crate::error::{CoreError, Result};
use crate::pauli::{commutator, PauliOperator};
use crate::spectral::{
    cluster_values, default_degeneracy_tol, eigensystem, eigensystem_dense, kernel_basis,
    simultaneous_diagonalize_dense,
};
use crate::{CMatrix, CVector, Tolerances};
use serde::{Deserialize, Serialize};

/// Orthonormal basis on which two Hamiltonians are simultaneously
/// diagonal (exactly for commuting pairs; in compression for the
/// commutator-kernel construction), with both diagonal value lists.
#[derive(Debug, Clone)]
pub struct SharedSubspace {
    dimension: usize,
    basis: CMatrix,
    eigs_a: Vec<f64>,
    eigs_b: Vec<f64>,
    residuals_a: Vec<f64>,
    residuals_b: Vec<f64>,
}

impl SharedSubspace {
    fn from_frame(h_a: &PauliOperator, h_b: &PauliOperator, basis: CMatrix) -> Result<SharedSubspace> {
        let dimension = basis.nrows();
        let r = basis.ncols();
        let mut eigs_a = Vec::with_capacity(r);
        let mut eigs_b = Vec::with_capacity(r);
        let mut residuals_a = Vec::with_capacity(r);
        let mut residuals_b = Vec::with_capacity(r);
        for i in 0..r {
            let v = basis.column(i).into_owned();
            let av = h_a.apply(&v)?;
            let bv = h_b.apply(&v)?;
            let ea = v.dotc(&av).re;
            let eb = v.dotc(&bv).re;
            residuals_a.push((av - &v * num_complex::Complex64::from(ea)).norm());
            residuals_b.push((bv - &v * num_complex::Complex64::from(eb)).norm());
            eigs_a.push(ea);
            eigs_b.push(eb);
        }
        Ok(SharedSubspace {
            dimension,
            basis,
            eigs_a,
            eigs_b,
            residuals_a,
            residuals_b,
        })
    }

    pub fn empty(dimension: usize) -> SharedSubspace {
        SharedSubspace {
            dimension,
            basis: CMatrix::zeros(dimension, 0),
            eigs_a: Vec::new(),
            eigs_b: Vec::new(),
            residuals_a: Vec::new(),
            residuals_b: Vec::new(),
        }
    }

    /// Ambient Hilbert-space dimension N.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of shared basis vectors.
    pub fn n_theta(&self) -> usize {
        self.basis.ncols()
    }

    /// Basis vectors as columns.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.basis.column(i).into_owned()
    }

    /// Diagonal values of the first Hamiltonian on the basis.
    pub fn eigs_a(&self) -> &[f64] {
        &self.eigs_a
    }

    /// Diagonal values of the second Hamiltonian on the basis.
    pub fn eigs_b(&self) -> &[f64] {
        &self.eigs_b
    }

    /// Full-operator eigen-residuals `||H_A v - e v||` per vector.
    pub fn residuals_a(&self) -> &[f64] {
        &self.residuals_a
    }

    pub fn residuals_b(&self) -> &[f64] {
        &self.residuals_b
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals_a
            .iter()
            .chain(&self.residuals_b)
            .fold(0.0f64, |m, &v| m.max(v))
    }

    /// Indices of vectors that are genuine joint eigenvectors at the
    /// given absolute residual tolerances.
    pub fn exact_indices(&self, tol_a: f64, tol_b: f64) -> Vec<usize> {
        (0..self.n_theta())
            .filter(|&i| self.residuals_a[i] <= tol_a && self.residuals_b[i] <= tol_b)
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct SharedSubspaceRepr {
    dimension: usize,
    n_theta: usize,
    /// Interleaved re/im amplitudes, one array per basis vector.
    basis: Vec<Vec<f64>>,
    eigs_a: Vec<f64>,
    eigs_b: Vec<f64>,
}

impl SharedSubspace {
    pub fn to_json(&self) -> String {
        let basis: Vec<Vec<f64>> = (0..self.n_theta())
            .map(|i| {
                self.basis
                    .column(i)
                    .iter()
                    .flat_map(|z| [z.re, z.im])
                    .collect()
            })
            .collect();
        let repr = SharedSubspaceRepr {
            dimension: self.dimension,
            n_theta: self.n_theta(),
            basis,
            eigs_a: self.eigs_a.clone(),
            eigs_b: self.eigs_b.clone(),
        };
        serde_json::to_string_pretty(&repr).expect("shared-subspace serialization cannot fail")
    }
}

/// Single orthonormal basis diagonalizing a commuting pair.
///
/// Eigendecomposes `h_a`, then rotates inside each degenerate cluster by
/// the eigenvectors of `h_b`'s cluster compression. `cluster_tol` is the
/// absolute degeneracy tolerance on `h_a`'s spectrum.
pub fn simultaneous_eigenbasis(
    h_a: &PauliOperator,
    h_b: &PauliOperator,
    cluster_tol: f64,
) -> Result<SharedSubspace> {
    let comm = commutator(h_a, h_b)?;
    let hs = comm.hs_norm();
    if hs > 1e-10 {
        return Err(CoreError::NonCommutingPair(hs));
    }
    let da = h_a.to_dense()?;
    let db = h_b.to_dense()?;
    let (frame, _, _) = simultaneous_diagonalize_dense(&da, &db, cluster_tol)?;
    SharedSubspace::from_frame(h_a, h_b, frame)
}

/// Shared subspace of a non-commuting pair: the commutator kernel,
/// re-rotated so both compressions are diagonal. `kernel_tol` is the
/// relative kernel cutoff. An empty kernel yields `n_theta() == 0`.
pub fn shared_subspace(
    h_a: &PauliOperator,
    h_b: &PauliOperator,
    kernel_tol: f64,
) -> Result<SharedSubspace> {
    let comm = commutator(h_a, h_b)?;
    if comm.is_zero() {
        return Err(CoreError::CommutingPair(
            "use simultaneous_eigenbasis for commuting pairs",
        ));
    }
    let kernel = kernel_basis(&comm.to_dense()?, kernel_tol)?;
    if kernel.is_empty() {
        return Ok(SharedSubspace::empty(h_a.dimension()));
    }
    let n = h_a.dimension();
    let r = kernel.len();
    let mut theta = CMatrix::zeros(n, r);
    for (i, v) in kernel.iter().enumerate() {
        theta.set_column(i, v);
    }
    let da = h_a.to_dense()?;
    let db = h_b.to_dense()?;
    let a_c = compress(&da, &theta);
    let b_c = compress(&db, &theta);
    let scale = a_c.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let cluster_tol = default_degeneracy_tol(scale);
    let (w, eigs_a, eigs_b) = simultaneous_diagonalize_dense(&a_c, &b_c, cluster_tol)?;
    let mut frame = theta * w;
    refine_joint_degenerate_blocks(&da, &db, &mut frame, &eigs_a, &eigs_b, cluster_tol)?;
    SharedSubspace::from_frame(h_a, h_b, frame)
}

/// Inside blocks where both compressed values coincide, the rotation is
/// still free; separate directions by the eigen-residual quadratic form
/// `||(H_A - a)v||^2 + ||(H_B - b)v||^2` so genuine joint eigenvectors
/// (zero leak out of the subspace) come first and are not mixed with
/// non-invariant kernel directions.
fn refine_joint_degenerate_blocks(
    da: &CMatrix,
    db: &CMatrix,
    frame: &mut CMatrix,
    eigs_a: &[f64],
    eigs_b: &[f64],
    tol: f64,
) -> Result<()> {
    let r = frame.ncols();
    let mut start = 0;
    while start < r {
        let mut end = start + 1;
        while end < r
            && (eigs_a[end] - eigs_a[start]).abs() <= tol
            && (eigs_b[end] - eigs_b[start]).abs() <= tol
        {
            end += 1;
        }
        if end - start >= 2 {
            let block = frame.columns(start, end - start).into_owned();
            let mean = |vals: &[f64]| vals[start..end].iter().sum::<f64>() / (end - start) as f64;
            let ra = da * &block - &block * num_complex::Complex64::from(mean(eigs_a));
            let rb = db * &block - &block * num_complex::Complex64::from(mean(eigs_b));
            let gram = ra.adjoint() * &ra + rb.adjoint() * &rb;
            let hermitized = (&gram + gram.adjoint()).scale(0.5);
            let es = eigensystem_dense(&hermitized)?;
            let rotated = block * es.vectors();
            for (offset, col) in (start..end).enumerate() {
                frame.set_column(col, &rotated.column(offset));
            }
        }
        start = end;
    }
    Ok(())
}

fn compress(m: &CMatrix, frame: &CMatrix) -> CMatrix {
    let c = frame.adjoint() * m * frame;
    (&c + c.adjoint()).scale(0.5)
}

/// Upper bound on the number of shared eigenstates of a non-commuting
/// pair: `N - (||C||_HS / ||C||_2)^2` for `C = [H_A, H_B]`, not rounded.
pub fn shared_count_bound(h_a: &PauliOperator, h_b: &PauliOperator) -> Result<f64> {
    let comm = commutator(h_a, h_b)?;
    let spec = comm.spectral_norm()?;
    if spec <= 1e-12 {
        return Err(CoreError::CommutingPair("bound undefined; r = N"));
    }
    let n = h_a.dimension() as f64;
    Ok(n - (comm.hs_norm() / spec).powi(2))
}

/// The connector compressed to the shared basis:
/// the `N_theta x N_theta` matrix of `<phi_i| h |phi_j>`.
pub fn projected_connector(h: &PauliOperator, theta: &SharedSubspace) -> Result<CMatrix> {
    if theta.n_theta() == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    Ok(compress(&h.to_dense()?, theta.basis()))
}

/// A degenerate connector eigenspace hosting exactly-simulatable states;
/// dimension is at least 2 (a 1-dimensional space only permits trivial
/// global-phase simulation and is excluded).
#[derive(Debug, Clone)]
pub struct SimulatableSet {
    /// Orthonormal basis of the subspace, as columns in the ambient space.
    pub basis: CMatrix,
    /// Connector eigenvalue of the cluster.
    pub connector_eigenvalue: f64,
}

impl SimulatableSet {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Degenerate eigenspaces of the connector `h = h_qs - h_t`.
///
/// Commuting pairs use the full connector spectrum; non-commuting pairs
/// use the projected connector on the shared subspace. `cluster_tol` is
/// the absolute degeneracy tolerance on the connector spectrum; the
/// non-commuting path uses the default kernel cutoff from
/// [`Tolerances::DEFAULT`].
pub fn simulatable_sets(
    h_t: &PauliOperator,
    h_qs: &PauliOperator,
    cluster_tol: f64,
) -> Result<Vec<SimulatableSet>> {
    let connector = h_qs.sub(h_t)?;
    let comm = commutator(h_t, h_qs)?;
    if comm.is_zero() {
        let es = eigensystem(&connector)?;
        let clusters = cluster_values(es.eigenvalues(), cluster_tol);
        let mut out = Vec::new();
        for range in clusters.degenerate() {
            let basis = es.vectors().columns(range.start, range.len()).into_owned();
            let mean = es.eigenvalues()[range.clone()].iter().sum::<f64>() / range.len() as f64;
            out.push(SimulatableSet {
                basis,
                connector_eigenvalue: mean,
            });
        }
        Ok(out)
    } else {
        let theta = shared_subspace(h_t, h_qs, Tolerances::DEFAULT.kernel_rel)?;
        if theta.n_theta() == 0 {
            return Ok(Vec::new());
        }
        let proj = projected_connector(&connector, &theta)?;
        let es = eigensystem_dense(&proj)?;
        let clusters = cluster_values(es.eigenvalues(), cluster_tol);
        let mut out = Vec::new();
        for range in clusters.degenerate() {
            let local = es.vectors().columns(range.start, range.len()).into_owned();
            let basis = theta.basis() * local;
            let mean = es.eigenvalues()[range.clone()].iter().sum::<f64>() / range.len() as f64;
            out.push(SimulatableSet {
                basis,
                connector_eigenvalue: mean,
            });
        }
        Ok(out)
    }
}

/// A coupling value at which two connector eigenvalue lines cross,
/// with the index pairs that cross there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub coupling: f64,
    pub pairs: Vec<(usize, usize)>,
}

/// Crossing analysis of the connector family `J * lam_qs_unit - lam_t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    /// Distinct crossing couplings, ascending, deduplicated.
    pub crossings: Vec<Crossing>,
    /// Index pairs degenerate for every coupling.
    pub always_degenerate: Vec<(usize, usize)>,
}

/// Couplings at which the connector `h(J) = J * H_QS^{unit} - H_T`
/// becomes degenerate.
///
/// Both eigenvalue lists must refer to the same simultaneous-eigenbasis
/// ordering (sorting either list independently breaks the index
/// correspondence the crossing formula needs). A pair crosses at
/// `J = (lam_t_i - lam_t_j) / (lam_qs_i - lam_qs_j)` when the unit-
/// coupling eigenvalues differ; pairs equal in both lists are degenerate
/// for every `J` and reported separately.
pub fn find_degeneracy_crossings(
    lam_t: &[f64],
    lam_qs_unit: &[f64],
    dedup_tol: f64,
) -> CrossingReport {
    assert_eq!(
        lam_t.len(),
        lam_qs_unit.len(),
        "eigenvalue lists must share length and ordering"
    );
    let n = lam_t.len();
    let mut candidates: Vec<(f64, (usize, usize))> = Vec::new();
    let mut always = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dq = lam_qs_unit[i] - lam_qs_unit[j];
            let dt = lam_t[i] - lam_t[j];
            if dq.abs() > dedup_tol {
                candidates.push((dt / dq, (i, j)));
            } else if dt.abs() <= dedup_tol {
                always.push((i, j));
            }
            // parallel lines (dq ~ 0, dt != 0) never cross
        }
    }
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut crossings: Vec<Crossing> = Vec::new();
    for (j_value, pair) in candidates {
        match crossings.last_mut() {
            Some(last) if (j_value - last.coupling).abs() <= dedup_tol => {
                last.pairs.push(pair);
            }
            _ => crossings.push(Crossing {
                coupling: j_value,
                pairs: vec![pair],
            }),
        }
    }
    CrossingReport {
        crossings,
        always_degenerate: always,
    }
}

/// Singular values of `A^† B` for orthonormal frames: cosines of the
/// principal angles between the spanned subspaces.
pub fn principal_overlaps(a: &CMatrix, b: &CMatrix) -> Vec<f64> {
    let m = a.adjoint() * b;
    let mut sv: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}
