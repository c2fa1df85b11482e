//! Correlation matrices, parent-Hamiltonian existence, and the
//! block-determinant necessary condition for joint eigenstates of
//! Hamiltonians at two localities.
//!
//! The correlation matrix over a generator list is the covariance
//! `M_ij = Re<psi|L_i L_j|psi> - <L_i><L_j>` (the symmetrized
//! anticommutator form); it is positive semidefinite, and a kernel
//! vector `v` certifies that `sum_i v_i L_i` has `psi` as an eigenstate.

use crate::dynamics::StateVector;
use crate::error::{CoreError, Result};
use crate::pauli::{combinations, generate_interaction_basis, Geometry, PauliOperator, PauliString};
use crate::{CVector, RMatrix, RVector};
use serde::Serialize;

/// Cap on the minor-sum dimension; the double subset sum is exponential.
pub const MINOR_SUM_CAP: usize = 8;

/// Covariance matrix of a generator list at a state, with an optional
/// block split separating two locality sectors (higher-locality block
/// first).
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    generators: Vec<PauliString>,
    matrix: RMatrix,
    block_split: Option<usize>,
}

impl CorrelationMatrix {
    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Index separating the leading (higher-locality) block from the
    /// trailing one, when built with a two-block layout.
    pub fn block_split(&self) -> Option<usize> {
        self.block_split
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        let (values, _) = crate::spectral::eigensystem_symmetric_real(&self.matrix)
            .expect("covariance matrices are symmetric by construction");
        values.first().copied().unwrap_or(f64::INFINITY)
    }
}

/// `M_ij = (1/2)<psi|{L_i, L_j}|psi> - <psi|L_i|psi><psi|L_j|psi>`,
/// symmetrized after computation.
pub fn correlation_matrix(psi: &StateVector, generators: &[PauliString]) -> Result<CorrelationMatrix> {
    correlation_matrix_with_split(psi, generators, None)
}

fn correlation_matrix_with_split(
    psi: &StateVector,
    generators: &[PauliString],
    block_split: Option<usize>,
) -> Result<CorrelationMatrix> {
    let m = generators.len();
    let mut applied: Vec<CVector> = Vec::with_capacity(m);
    for g in generators {
        if (1usize << g.n_sites()) != psi.dimension() {
            return Err(CoreError::DimensionMismatch(1 << g.n_sites(), psi.dimension()));
        }
        let op = PauliOperator::from_terms(g.n_sites(), [(g.clone(), 1.0)])?;
        applied.push(op.apply(psi.amplitudes())?);
    }
    let means: Vec<f64> = applied
        .iter()
        .map(|v| psi.amplitudes().dotc(v).re)
        .collect();
    let mut matrix = RMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            // Re<L_i psi, L_j psi> is the symmetrized two-point function
            let val = applied[i].dotc(&applied[j]).re - means[i] * means[j];
            matrix[(i, j)] = val;
            matrix[(j, i)] = val;
        }
    }
    Ok(CorrelationMatrix {
        generators: generators.to_vec(),
        matrix,
        block_split,
    })
}

/// Parent-Hamiltonian test: true iff the correlation matrix has an
/// eigenvalue at most `tol`; the matching eigenvectors are coefficient
/// candidates (`psi` is an eigenstate of `sum_i v_i L_i`).
pub fn parent_exists(
    psi: &StateVector,
    generators: &[PauliString],
    tol: f64,
) -> Result<(bool, Vec<RVector>)> {
    let corr = correlation_matrix(psi, generators)?;
    let (values, vectors) = crate::spectral::eigensystem_symmetric_real(&corr.matrix)?;
    let mut kernel = Vec::new();
    for (i, &lambda) in values.iter().enumerate() {
        if lambda <= tol {
            kernel.push(vectors.column(i).into_owned());
        }
    }
    Ok((!kernel.is_empty(), kernel))
}

fn det(m: &RMatrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    m.clone().lu().determinant()
}

fn submatrix(m: &RMatrix, rows: &[usize], cols: &[usize]) -> RMatrix {
    let mut out = RMatrix::zeros(rows.len(), cols.len());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            out[(i, j)] = m[(r, c)];
        }
    }
    out
}

fn complement(n: usize, idx: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !idx.contains(i)).collect()
}

/// Determinant expansion check for `det(A + B)`:
/// `lhs = sum_{r=1}^{N-1} sum_{alpha,beta} (-1)^{s(alpha)+s(beta)}
/// det A[alpha|beta] det B(alpha|beta)` over strictly increasing length-r
/// index sequences (signs use 1-based index sums), and
/// `rhs = det(A+B) - det A - det B`; both are returned for comparison.
pub fn det_sum_identity_check(a: &RMatrix, b: &RMatrix) -> Result<(f64, f64)> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(CoreError::domain("matrices must be square and equal-sized"));
    }
    if n > MINOR_SUM_CAP {
        return Err(CoreError::MinorSumTooLarge {
            n,
            cap: MINOR_SUM_CAP,
        });
    }
    let mut lhs = 0.0;
    for r in 1..n {
        let index_sets = combinations(n, r);
        for alpha in &index_sets {
            let alpha_comp = complement(n, alpha);
            // s(alpha) with 1-based indices
            let s_alpha: usize = alpha.iter().map(|&i| i + 1).sum();
            for beta in &index_sets {
                let s_beta: usize = beta.iter().map(|&i| i + 1).sum();
                let sign = if (s_alpha + s_beta).is_multiple_of(2) { 1.0 } else { -1.0 };
                let det_a = det(&submatrix(a, alpha, beta));
                let det_b = det(&submatrix(b, &alpha_comp, &complement(n, beta)));
                lhs += sign * det_a * det_b;
            }
        }
    }
    let rhs = det(&(a + b)) - det(a) - det(b);
    Ok((lhs, rhs))
}

/// Outcome of the joint-eigenstate necessary condition.
#[derive(Debug, Clone, Serialize)]
pub struct NecessaryConditionReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    /// Agreement is necessary for `psi` to be a joint eigenstate;
    /// disagreement certifies it is not.
    pub condition_met: bool,
    /// Dimension of the higher-locality correlation block.
    pub dim_kk: usize,
    /// Dimension of the lower-locality correlation block.
    pub dim_kpkp: usize,
}

/// Necessary condition for `psi` to be an eigenstate of both a k-local
/// Hamiltonian (with non-vanishing k'-local terms) and a k'-local one.
///
/// Builds the two-block correlation matrix over all k-body and k'-body
/// generators, forms `A = M_k'k'` and the Schur term
/// `B = -M_k'k M_kk^{-1} M_kk'`, and compares the minor-sum expansion of
/// `det(A+B)` against `-det B`.
pub fn necessary_condition_check(
    psi: &StateVector,
    k: usize,
    k_prime: usize,
    tol: f64,
) -> Result<NecessaryConditionReport> {
    if k_prime >= k {
        return Err(CoreError::domain(format!(
            "the condition requires k' < k, got k = {k}, k' = {k_prime}"
        )));
    }
    let n_sites = psi.dimension().trailing_zeros() as usize;
    let gens_k = generate_interaction_basis(n_sites, k, Geometry::AllSubsets)?;
    let gens_kp = generate_interaction_basis(n_sites, k_prime, Geometry::AllSubsets)?;
    let dim_kk = gens_k.len();
    let dim_kpkp = gens_kp.len();
    if dim_kpkp > MINOR_SUM_CAP {
        return Err(CoreError::MinorSumTooLarge {
            n: dim_kpkp,
            cap: MINOR_SUM_CAP,
        });
    }
    let mut generators = gens_k.generators().to_vec();
    generators.extend_from_slice(gens_kp.generators());
    let corr = correlation_matrix_with_split(psi, &generators, Some(dim_kk))?;
    let m = corr.matrix();
    let m_kk = m.view((0, 0), (dim_kk, dim_kk)).into_owned();
    let m_kpk = m.view((dim_kk, 0), (dim_kpkp, dim_kk)).into_owned();
    let m_kkp = m.view((0, dim_kk), (dim_kk, dim_kpkp)).into_owned();
    let m_kpkp = m.view((dim_kk, dim_kk), (dim_kpkp, dim_kpkp)).into_owned();

    let (kk_values, _) = crate::spectral::eigensystem_symmetric_real(&m_kk)?;
    let max_abs = kk_values.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    let min_abs = kk_values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if min_abs <= 1e-10 * max_abs.max(1.0) {
        return Err(CoreError::SingularBlock(min_abs));
    }
    let inv = m_kk
        .try_inverse()
        .ok_or(CoreError::SingularBlock(min_abs))?;
    let b = -(&m_kpk * inv * &m_kkp);
    let (lhs, _) = det_sum_identity_check(&m_kpkp, &b)?;
    let rhs = -det(&b);
    let abs_diff = (lhs - rhs).abs();
    Ok(NecessaryConditionReport {
        lhs,
        rhs,
        abs_diff,
        condition_met: abs_diff <= tol * lhs.abs().max(rhs.abs()).max(1.0),
        dim_kk,
        dim_kpkp,
    })
}
