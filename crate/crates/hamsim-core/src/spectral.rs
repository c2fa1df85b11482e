//! Dense Hermitian eigendecomposition, unitary time evolution, spectral
//! diameter, degeneracy clustering, and commutator-kernel extraction.

use crate::error::{CoreError, Result};
use crate::pauli::PauliOperator;
use crate::{CMatrix, CVector};
use num_complex::Complex64;
use std::ops::Range;

/// Ascending eigenvalues with an orthonormal eigenvector frame.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, same order as `eigenvalues`.
    vectors: CMatrix,
}

impl EigenSystem {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// `lambda_max - lambda_min`.
    pub fn diameter(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }
}

fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Fix the global phase of each column: the first component with
/// significant modulus is rotated to the positive real axis. Keeps
/// eigenframes deterministic across runs.
fn fix_column_phases(v: &mut CMatrix) {
    let n = v.nrows();
    for c in 0..v.ncols() {
        let mut col = v.column_mut(c);
        let max_mod = col.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if max_mod == 0.0 {
            continue;
        }
        let pivot = (0..n).find(|&i| col[i].norm() > 1e-8 * max_mod).unwrap_or(0);
        let z = col[pivot];
        let phase = z / z.norm();
        let rot = phase.conj();
        for i in 0..n {
            col[i] *= rot;
        }
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation annihilates one off-diagonal entry with a complex Givens
/// rotation; sweeps repeat until the off-diagonal Frobenius mass falls to
/// machine precision relative to the matrix scale. Slower than
/// tridiagonalization-based solvers but accurate and deterministic on
/// degenerate spectra, which the clustering machinery depends on.
fn hermitian_jacobi(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n, n);
    let fro: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if fro == 0.0 {
        return (vec![0.0; n], v);
    }
    let threshold = (1e-15 * fro).powi(2);
    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[(i, j)].norm_sqr();
            }
        }
        if 2.0 * off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[(p, q)];
                let babs = b.norm();
                if babs <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = b / babs;
                let tau = (aqq - app) / (2.0 * babs);
                // stable small root of t^2 - 2 tau t - 1 = 0
                let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                let t = -sign / (tau.abs() + (tau * tau + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let cs = Complex64::from(c);
                let s_conj_phase = phase.conj() * s;
                let s_phase = phase * s;
                // columns p and q of A
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = cs * akp + s_conj_phase * akq;
                    a[(k, q)] = -s_phase * akp + cs * akq;
                }
                // rows p and q by conjugate symmetry
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = cs * apk + s_phase * aqk;
                    a[(q, k)] = -s_conj_phase * apk + cs * aqk;
                }
                // exact 2x2 closed form keeps the pivot clean
                let new_pp = c * c * app + s * s * aqq + 2.0 * c * s * babs;
                let new_qq = s * s * app + c * c * aqq - 2.0 * c * s * babs;
                a[(p, p)] = Complex64::from(new_pp);
                a[(q, q)] = Complex64::from(new_qq);
                a[(p, q)] = Complex64::from(0.0);
                a[(q, p)] = Complex64::from(0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = cs * vkp + s_conj_phase * vkq;
                    v[(k, q)] = -s_phase * vkp + cs * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// Full spectral decomposition of a dense Hermitian matrix.
///
/// Eigenvalues ascend; degenerate ties keep the solver order; each
/// eigenvector's phase is fixed so the first significant component is
/// positive real.
pub fn eigensystem_dense(m: &CMatrix) -> Result<EigenSystem> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let dev = hermiticity_deviation(m);
    if dev > 1e-10 * scale.max(1.0) {
        return Err(CoreError::NotHermitian(dev));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(EigenSystem {
            eigenvalues: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let (raw_values, raw_vectors) = hermitian_jacobi(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw_values[a].partial_cmp(&raw_values[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| raw_values[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vectors.set_column(c, &raw_vectors.column(i));
    }
    fix_column_phases(&mut vectors);
    Ok(EigenSystem {
        eigenvalues,
        vectors,
    })
}

/// Spectral decomposition of a real symmetric matrix via the Hermitian
/// path; eigenvectors are returned real.
pub fn eigensystem_symmetric_real(m: &crate::RMatrix) -> Result<(Vec<f64>, crate::RMatrix)> {
    let lifted = CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::from(m[(i, j)]));
    let es = eigensystem_dense(&lifted)?;
    let vectors = crate::RMatrix::from_fn(m.nrows(), m.ncols(), |i, j| es.vectors()[(i, j)].re);
    Ok((es.eigenvalues().to_vec(), vectors))
}

/// Spectral decomposition of a Pauli operator's dense realization.
pub fn eigensystem(h: &PauliOperator) -> Result<EigenSystem> {
    eigensystem_dense(&h.to_dense()?)
}

/// `e^{sign * i * t * H}` via the eigendecomposition.
pub fn evolve(h: &PauliOperator, t: f64, sign: f64) -> Result<CMatrix> {
    Ok(evolve_from(&eigensystem(h)?, t, sign))
}

/// Evolution operator from a precomputed decomposition; `sign` is +1 or -1.
pub fn evolve_from(es: &EigenSystem, t: f64, sign: f64) -> CMatrix {
    let n = es.dimension();
    let v = &es.vectors;
    let mut scaled = v.clone();
    for (c, &lambda) in es.eigenvalues.iter().enumerate() {
        let ph = Complex64::from_polar(1.0, sign * t * lambda);
        for r in 0..n {
            scaled[(r, c)] *= ph;
        }
    }
    scaled * v.adjoint()
}

/// Apply `e^{sign * i * t * H}` to a state without forming the matrix.
pub fn evolve_state(es: &EigenSystem, psi: &CVector, t: f64, sign: f64) -> CVector {
    let coeffs = es.vectors.adjoint() * psi;
    let mut out = CVector::zeros(psi.len());
    for (c, &lambda) in es.eigenvalues.iter().enumerate() {
        let ph = Complex64::from_polar(1.0, sign * t * lambda);
        out += es.vectors.column(c) * (coeffs[c] * ph);
    }
    out
}

/// `lambda_max - lambda_min` of the operator.
pub fn spectral_diameter(h: &PauliOperator) -> Result<f64> {
    if h.is_zero() {
        return Ok(0.0);
    }
    Ok(eigensystem(h)?.diameter())
}

/// Partition of eigenvalue indices into maximal groups equal within a
/// tolerance; groups are contiguous ranges of the ascending spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyClusters {
    pub clusters: Vec<Range<usize>>,
    pub tolerance: f64,
}

impl DegeneracyClusters {
    /// Clusters with at least two members.
    pub fn degenerate(&self) -> impl Iterator<Item = &Range<usize>> {
        self.clusters.iter().filter(|r| r.len() >= 2)
    }
}

/// Maximal-linkage clustering: split wherever the gap between adjacent
/// eigenvalues exceeds `tol`.
pub fn cluster_degeneracies(es: &EigenSystem, tol: f64) -> DegeneracyClusters {
    cluster_values(es.eigenvalues(), tol)
}

/// Clustering over a raw ascending value list.
pub fn cluster_values(values: &[f64], tol: f64) -> DegeneracyClusters {
    assert!(tol > 0.0, "cluster tolerance must be positive");
    let mut clusters = Vec::new();
    let n = values.len();
    let mut start = 0;
    for i in 1..=n {
        if i == n || values[i] - values[i - 1] > tol {
            clusters.push(start..i);
            start = i;
        }
    }
    DegeneracyClusters {
        clusters,
        tolerance: tol,
    }
}

/// Default relative degeneracy tolerance, scaled because connector
/// spectra scale with coupling strengths.
pub fn default_degeneracy_tol(spectral_norm: f64) -> f64 {
    1e-8 * spectral_norm.max(1.0)
}

/// Orthonormal basis of the near-kernel of an anti-Hermitian matrix:
/// eigenvectors of `i*m` with `|eigenvalue| <= tol * ||m||_2`.
///
/// An exactly zero input signals a commuting pair (the caller should use
/// the simultaneous-eigenbasis path) rather than silently returning the
/// full space.
pub fn kernel_basis(m: &CMatrix, tol: f64) -> Result<Vec<CVector>> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Err(CoreError::CommutingPair(
            "commutator is exactly zero; use the simultaneous-eigenbasis path",
        ));
    }
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] + m[(j, i)].conj()).norm());
        }
    }
    if dev > 1e-10 * scale.max(1.0) {
        return Err(CoreError::NotAntiHermitian(dev));
    }
    let i_unit = Complex64::new(0.0, 1.0);
    let herm = m.map(|z| z * i_unit);
    let es = eigensystem_dense(&herm)?;
    let cutoff = tol * es.spectral_norm();
    Ok((0..es.dimension())
        .filter(|&k| es.eigenvalues()[k].abs() <= cutoff)
        .map(|k| es.vector(k))
        .collect())
}

/// Simultaneously diagonalize two commuting Hermitian matrices.
///
/// Eigendecomposes `a`, then re-rotates inside each degenerate cluster of
/// `a` by the eigenvectors of `b`'s compression onto the cluster (the
/// coefficient-matrix construction for degenerate spectra). Returns the
/// common frame and both diagonal value lists, ordered by ascending `a`
/// eigenvalue and ascending `b` value within clusters.
pub fn simultaneous_diagonalize_dense(
    a: &CMatrix,
    b: &CMatrix,
    cluster_tol: f64,
) -> Result<(CMatrix, Vec<f64>, Vec<f64>)> {
    let es_a = eigensystem_dense(a)?;
    let mut frame = es_a.vectors().clone();
    let eigs_a = es_a.eigenvalues().to_vec();
    let clusters = cluster_values(&eigs_a, cluster_tol);
    for range in &clusters.clusters {
        if range.len() < 2 {
            continue;
        }
        let block = frame.columns(range.start, range.len()).into_owned();
        let compressed = block.adjoint() * b * &block;
        let hermitized = (&compressed + compressed.adjoint()).scale(0.5);
        let es_b = eigensystem_dense(&hermitized)?;
        let rotated = block * es_b.vectors();
        for (offset, col) in (range.start..range.end).enumerate() {
            frame.set_column(col, &rotated.column(offset));
        }
    }
    fix_column_phases(&mut frame);
    let diag_of = |m: &CMatrix| -> Vec<f64> {
        let t = frame.adjoint() * m * &frame;
        (0..t.nrows()).map(|i| t[(i, i)].re).collect()
    };
    let eigs_b = diag_of(b);
    let eigs_a_out = diag_of(a);
    Ok((frame, eigs_a_out, eigs_b))
}

/// HS norm of the off-diagonal part of `v^† m v`.
pub fn offdiagonal_residual(m: &CMatrix, v: &CMatrix) -> f64 {
    let t = v.adjoint() * m * v;
    let mut acc = 0.0;
    for i in 0..t.nrows() {
        for j in 0..t.ncols() {
            if i != j {
                acc += t[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{heisenberg_xxx, zzz_field_target, CouplingConvention};
    use crate::pauli::{commutator, Letter, PauliOperator, PauliString};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

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
    fn eigensystem_single_z() {
        let z = PauliOperator::from_terms(1, [(PauliString::parse("Z").unwrap(), 1.0)]).unwrap();
        let es = eigensystem(&z).unwrap();
        assert_eq!(es.eigenvalues(), &[-1.0, 1.0]);
    }

    #[test]
    fn eigensystem_zero_operator() {
        let es = eigensystem(&PauliOperator::zero(2)).unwrap();
        assert_eq!(es.eigenvalues(), &[0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn eigensystem_reconstruction_and_orthonormality() {
        let ht = zzz_field_target(4, 1.0, 1.0, CouplingConvention::Pauli).unwrap();
        let es = eigensystem(&ht).unwrap();
        let v = es.vectors();
        let gram = v.adjoint() * v;
        let id = CMatrix::identity(16, 16);
        assert!((gram - &id).iter().map(|z| z.norm()).fold(0.0f64, f64::max) < 1e-10);

        let mut lam = CMatrix::zeros(16, 16);
        for (i, &e) in es.eigenvalues().iter().enumerate() {
            lam[(i, i)] = Complex64::new(e, 0.0);
        }
        let recon = v * lam * v.adjoint();
        let dense = ht.to_dense().unwrap();
        let scale = es.spectral_norm();
        assert!((recon - dense).norm() < 1e-9 * scale.max(1.0));
    }

    #[test]
    fn eigensystem_rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(eigensystem_dense(&m), Err(CoreError::NotHermitian(_))));
    }

    #[test]
    fn evolve_identity_at_t_zero_and_diagonal_generator() {
        let z = PauliOperator::from_terms(1, [(PauliString::parse("Z").unwrap(), 1.0)]).unwrap();
        let u0 = evolve(&z, 0.0, -1.0).unwrap();
        assert!((u0 - CMatrix::identity(2, 2)).norm() < 1e-12);

        let t = 0.618;
        let u = evolve(&z, t, -1.0).unwrap();
        // e^{-itZ} = diag(e^{-it}, e^{+it})
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, -t)).norm() < 1e-12);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, t)).norm() < 1e-12);
        assert!(u[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn evolve_unitarity_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let h = random_operator(3, 6, &mut rng);
            let t = rng.gen_range(0.0..10.0);
            let es = eigensystem(&h).unwrap();
            let u = evolve_from(&es, t, 1.0);
            let id = CMatrix::identity(8, 8);
            assert!((&u * u.adjoint() - &id).norm() < 1e-9);
            let back = evolve_from(&es, t, -1.0);
            assert!((u * back - id).norm() < 1e-9);
        }
    }

    #[test]
    fn diameter_invariances() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let h = random_operator(3, 5, &mut rng);
            let d = spectral_diameter(&h).unwrap();
            let c = rng.gen_range(-3.0..3.0);
            let shifted = h
                .add(&PauliOperator::identity_multiple(3, c))
                .unwrap();
            let d2 = spectral_diameter(&shifted).unwrap();
            assert!((d - d2).abs() < 1e-10);

            // diameter equals 2 * min_c ||h + c*1||_2 at c = -(max+min)/2
            let es = eigensystem(&h).unwrap();
            let mid = (es.eigenvalues().last().unwrap() + es.eigenvalues().first().unwrap()) / 2.0;
            let centered = h
                .add(&PauliOperator::identity_multiple(3, -mid))
                .unwrap();
            let half = centered.spectral_norm().unwrap();
            assert!((d - 2.0 * half).abs() < 1e-9);
        }
    }

    #[test]
    fn diameter_trivial_cases() {
        assert_eq!(spectral_diameter(&PauliOperator::zero(2)).unwrap(), 0.0);
        let z = PauliOperator::from_terms(1, [(PauliString::parse("Z").unwrap(), 1.0)]).unwrap();
        assert!((spectral_diameter(&z).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn clustering_basics() {
        let c = cluster_values(&[0.0, 0.0, 1.0], 1e-9);
        assert_eq!(c.clusters, vec![0..2, 2..3]);

        let c = cluster_values(&[0.0, 1.0, 2.5], 1e-9);
        assert_eq!(c.clusters.len(), 3);
        assert_eq!(c.degenerate().count(), 0);
    }

    #[test]
    fn kernel_basis_cases() {
        // [X, Y] on one qubit: 2iZ, empty kernel
        let x = PauliOperator::from_terms(1, [(PauliString::parse("X").unwrap(), 1.0)]).unwrap();
        let y = PauliOperator::from_terms(1, [(PauliString::parse("Y").unwrap(), 1.0)]).unwrap();
        let c = commutator(&x, &y).unwrap().to_dense().unwrap();
        assert!(kernel_basis(&c, 1e-9).unwrap().is_empty());

        // block 0 (+) 2iZ: kernel is the first block
        let mut m = CMatrix::zeros(3, 3);
        m[(1, 1)] = Complex64::new(0.0, 2.0);
        m[(2, 2)] = Complex64::new(0.0, -2.0);
        let kb = kernel_basis(&m, 1e-9).unwrap();
        assert_eq!(kb.len(), 1);
        assert!((kb[0][0].norm() - 1.0).abs() < 1e-12);

        // kernel vectors nearly annihilate m
        for v in &kb {
            assert!((&m * v).norm() <= 10.0 * 1e-9 * 2.0);
        }

        // exactly zero input signals the commuting path
        let zero = CMatrix::zeros(4, 4);
        assert!(matches!(
            kernel_basis(&zero, 1e-9),
            Err(CoreError::CommutingPair(_))
        ));
    }

    #[test]
    fn kernel_rejects_non_antihermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            kernel_basis(&m, 1e-9),
            Err(CoreError::NotAntiHermitian(_))
        ));
    }

    #[test]
    fn simultaneous_diagonalization_of_toy_pair() {
        let ht = zzz_field_target(4, 1.0, 1.0, CouplingConvention::Pauli).unwrap();
        let hqs = heisenberg_xxx(4, 1.0, CouplingConvention::Pauli).unwrap();
        let da = ht.to_dense().unwrap();
        let db = hqs.to_dense().unwrap();
        let tol = default_degeneracy_tol(eigensystem(&ht).unwrap().spectral_norm());
        let (v, _, _) = simultaneous_diagonalize_dense(&da, &db, tol).unwrap();
        let na = eigensystem(&ht).unwrap().spectral_norm();
        let nb = eigensystem(&hqs).unwrap().spectral_norm();
        assert!(offdiagonal_residual(&da, &v) <= 1e-8 * na);
        assert!(offdiagonal_residual(&db, &v) <= 1e-8 * nb);
    }
}
