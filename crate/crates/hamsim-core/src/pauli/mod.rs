//! Symbolic Pauli-string operator algebra with exact dense realization.
//!
//! Operators are real-weighted sums of n-site Pauli strings, kept in
//! canonical form: strings sorted lexicographically, no exactly-zero
//! coefficients, arithmetic results pruned below [`PRUNE_EPS`]. Real
//! coefficients on Hermitian strings make every stored operator Hermitian;
//! commutators of Hermitian operators are returned as [`AntiHermitianOp`]
//! (an explicit `i * K` factorization with `K` Hermitian).
//!
//! Dense realizations use the Kronecker ordering with site 0 as the most
//! significant qubit, so basis index `b` assigns site `s` the bit
//! `(b >> (n_sites - 1 - s)) & 1`.

mod basis;
mod io;

pub use basis::{
    generate_interaction_basis, z_chain_target, z_chain_target_unnormalized, Geometry,
    InteractionBasis,
};
pub(crate) use basis::combinations;

use crate::error::{CoreError, Result};
use crate::{CMatrix, CVector};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// Coefficients below this are dropped when canonicalizing arithmetic
/// results; floating noise at this level is below eigensolver accuracy.
pub const PRUNE_EPS: f64 = 1e-14;

/// Default cap on the site count for dense realizations.
pub const DEFAULT_DENSE_CAP: usize = 12;

/// Single-site Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// Product of two letters as (quarter-turn phase exponent, letter):
/// `p * q = i^k * r`.
fn letter_product(p: Letter, q: Letter) -> (u8, Letter) {
    use Letter::*;
    match (p, q) {
        (I, r) | (r, I) => (0, r),
        (X, X) | (Y, Y) | (Z, Z) => (0, I),
        (X, Y) => (1, Z),
        (Y, X) => (3, Z),
        (Y, Z) => (1, X),
        (Z, Y) => (3, X),
        (Z, X) => (1, Y),
        (X, Z) => (3, Y),
    }
}

fn phase_from_quarter_turns(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// An n-site Pauli string: one letter per site.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<Letter>,
}

impl PauliString {
    pub fn identity(n_sites: usize) -> PauliString {
        assert!(n_sites > 0, "site count must be positive");
        PauliString {
            letters: vec![Letter::I; n_sites],
        }
    }

    pub fn from_letters(letters: Vec<Letter>) -> PauliString {
        assert!(!letters.is_empty(), "site count must be positive");
        PauliString { letters }
    }

    /// Single non-identity letter at `site`, identity elsewhere.
    pub fn single(n_sites: usize, site: usize, letter: Letter) -> PauliString {
        let mut s = PauliString::identity(n_sites);
        s.letters[site] = letter;
        s
    }

    /// Build from site assignments, identity on unmentioned sites.
    pub fn from_sites(n_sites: usize, sites: &[(usize, Letter)]) -> PauliString {
        let mut s = PauliString::identity(n_sites);
        for &(site, letter) in sites {
            s.letters[site] = letter;
        }
        s
    }

    /// Parse from a letter sequence such as `"IXZY"`.
    pub fn parse(text: &str) -> Result<PauliString> {
        let letters: Option<Vec<Letter>> = text.chars().map(Letter::from_char).collect();
        match letters {
            Some(l) if !l.is_empty() => Ok(PauliString { letters: l }),
            _ => Err(CoreError::Format(format!(
                "invalid Pauli string {text:?}: expected nonempty sequence over I,X,Y,Z"
            ))),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Number of non-identity letters.
    pub fn locality(&self) -> usize {
        self.letters.iter().filter(|&&l| l != Letter::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&l| l == Letter::I)
    }

    /// True when the strings anticommute (odd number of sites with
    /// distinct non-identity letters).
    pub fn anticommutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.n_sites(), other.n_sites());
        let mut odd = false;
        for (&p, &q) in self.letters.iter().zip(&other.letters) {
            if p != Letter::I && q != Letter::I && p != q {
                odd = !odd;
            }
        }
        odd
    }

    /// Image of basis index `b`: `P|b> = phase * |index>`.
    pub fn basis_action(&self, b: usize) -> (usize, Complex64) {
        let (idx, k) = self.apply_basis(b);
        (idx, phase_from_quarter_turns(k))
    }

    /// Apply the string to basis index `b`, returning the image index and
    /// the quarter-turn phase exponent.
    fn apply_basis(&self, b: usize) -> (usize, u8) {
        let n = self.letters.len();
        let mut out = b;
        let mut k = 0u8;
        for (s, &letter) in self.letters.iter().enumerate() {
            let bit_pos = n - 1 - s;
            let bit = (b >> bit_pos) & 1;
            match letter {
                Letter::I => {}
                Letter::X => out ^= 1 << bit_pos,
                Letter::Y => {
                    out ^= 1 << bit_pos;
                    // Y|0> = i|1>, Y|1> = -i|0>
                    k = (k + if bit == 0 { 1 } else { 3 }) % 4;
                }
                Letter::Z => {
                    if bit == 1 {
                        k = (k + 2) % 4;
                    }
                }
            }
        }
        (out, k)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// `a * b = phase * result` with `phase` a fourth root of unity.
pub fn pauli_product(a: &PauliString, b: &PauliString) -> Result<(Complex64, PauliString)> {
    if a.n_sites() != b.n_sites() {
        return Err(CoreError::DimensionMismatch(a.n_sites(), b.n_sites()));
    }
    let mut k = 0u8;
    let mut letters = Vec::with_capacity(a.n_sites());
    for (&p, &q) in a.letters.iter().zip(&b.letters) {
        let (dk, r) = letter_product(p, q);
        k = (k + dk) % 4;
        letters.push(r);
    }
    Ok((phase_from_quarter_turns(k), PauliString { letters }))
}

/// A real-weighted sum of Pauli strings on a fixed number of sites.
///
/// The dense realization is Hermitian; the term map is kept canonical
/// (sorted, pruned).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliOperator {
    n_sites: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl PauliOperator {
    pub fn zero(n_sites: usize) -> PauliOperator {
        assert!(n_sites > 0, "site count must be positive");
        PauliOperator {
            n_sites,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(n_sites: usize, terms: I) -> Result<PauliOperator>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let mut op = PauliOperator::zero(n_sites);
        for (s, c) in terms {
            op.add_term(s, c)?;
        }
        Ok(op)
    }

    /// `c` times the identity string.
    pub fn identity_multiple(n_sites: usize, c: f64) -> PauliOperator {
        let mut op = PauliOperator::zero(n_sites);
        op.add_term(PauliString::identity(n_sites), c).unwrap();
        op
    }

    /// Accumulate `coeff` onto `string`, pruning results below [`PRUNE_EPS`].
    pub fn add_term(&mut self, string: PauliString, coeff: f64) -> Result<()> {
        if string.n_sites() != self.n_sites {
            return Err(CoreError::DimensionMismatch(self.n_sites, string.n_sites()));
        }
        let updated = self.terms.get(&string).copied().unwrap_or(0.0) + coeff;
        if updated.abs() <= PRUNE_EPS {
            self.terms.remove(&string);
        } else {
            self.terms.insert(string, updated);
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dimension(&self) -> usize {
        1 << self.n_sites
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn coefficient(&self, string: &PauliString) -> f64 {
        self.terms.get(string).copied().unwrap_or(0.0)
    }

    /// Largest locality among stored strings (0 for the zero operator).
    pub fn locality(&self) -> usize {
        self.terms.keys().map(|s| s.locality()).max().unwrap_or(0)
    }

    pub fn scaled(&self, factor: f64) -> PauliOperator {
        let mut out = PauliOperator::zero(self.n_sites);
        for (s, c) in self.terms() {
            let v = c * factor;
            if v.abs() > PRUNE_EPS {
                out.terms.insert(s.clone(), v);
            }
        }
        out
    }

    pub fn add(&self, other: &PauliOperator) -> Result<PauliOperator> {
        if self.n_sites != other.n_sites {
            return Err(CoreError::DimensionMismatch(self.n_sites, other.n_sites));
        }
        let mut out = self.clone();
        for (s, c) in other.terms() {
            out.add_term(s.clone(), c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PauliOperator) -> Result<PauliOperator> {
        self.add(&other.scaled(-1.0))
    }

    /// Hilbert-Schmidt (Frobenius) norm, computed symbolically from Pauli
    /// orthogonality: `sqrt(2^n * sum of squared coefficients)`.
    pub fn hs_norm(&self) -> f64 {
        let sum: f64 = self.terms.values().map(|c| c * c).sum();
        (sum * (1u64 << self.n_sites) as f64).sqrt()
    }

    /// `Tr[a * b]`, computed symbolically as `2^n * sum over shared
    /// strings of coefficient products`.
    pub fn trace_inner_product(&self, other: &PauliOperator) -> Result<f64> {
        if self.n_sites != other.n_sites {
            return Err(CoreError::DimensionMismatch(self.n_sites, other.n_sites));
        }
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = 0.0;
        for (s, c) in small.terms() {
            acc += c * large.coefficient(s);
        }
        Ok(acc * (1u64 << self.n_sites) as f64)
    }

    /// Largest singular value of the dense realization; for Hermitian
    /// input this is the largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> Result<f64> {
        self.spectral_norm_capped(DEFAULT_DENSE_CAP)
    }

    pub fn spectral_norm_capped(&self, cap: usize) -> Result<f64> {
        if self.is_zero() {
            return Ok(0.0);
        }
        let dense = self.to_dense_capped(cap)?;
        Ok(crate::spectral::eigensystem_dense(&dense)?.spectral_norm())
    }

    /// Apply the operator to a state vector.
    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.dimension() {
            return Err(CoreError::DimensionMismatch(self.dimension(), v.len()));
        }
        let mut out = CVector::zeros(v.len());
        for (s, c) in self.terms() {
            for b in 0..v.len() {
                let (b2, k) = s.apply_basis(b);
                out[b2] += phase_from_quarter_turns(k) * c * v[b];
            }
        }
        Ok(out)
    }

    /// Dense Hermitian realization under the default site cap.
    pub fn to_dense(&self) -> Result<CMatrix> {
        self.to_dense_capped(DEFAULT_DENSE_CAP)
    }

    pub fn to_dense_capped(&self, cap: usize) -> Result<CMatrix> {
        if self.n_sites > cap {
            return Err(CoreError::CapacityExceeded {
                n_sites: self.n_sites,
                cap,
            });
        }
        let dim = self.dimension();
        let mut m = CMatrix::zeros(dim, dim);
        for (s, c) in self.terms() {
            for b in 0..dim {
                let (b2, k) = s.apply_basis(b);
                m[(b2, b)] += phase_from_quarter_turns(k) * c;
            }
        }
        Ok(m)
    }
}

/// An anti-Hermitian operator stored as `i * K` with `K` Hermitian.
///
/// This is the exact form of any commutator of Hermitian Pauli operators,
/// so commutators stay in the real-coefficient algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiHermitianOp {
    hermitian_factor: PauliOperator,
}

impl AntiHermitianOp {
    pub fn n_sites(&self) -> usize {
        self.hermitian_factor.n_sites()
    }

    pub fn is_zero(&self) -> bool {
        self.hermitian_factor.is_zero()
    }

    /// The Hermitian `K` in `i * K`.
    pub fn hermitian_factor(&self) -> &PauliOperator {
        &self.hermitian_factor
    }

    pub fn hs_norm(&self) -> f64 {
        self.hermitian_factor.hs_norm()
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        self.hermitian_factor.spectral_norm()
    }

    /// Dense anti-Hermitian realization `i * dense(K)`.
    pub fn to_dense(&self) -> Result<CMatrix> {
        let mut m = self.hermitian_factor.to_dense()?;
        let i = Complex64::new(0.0, 1.0);
        for v in m.iter_mut() {
            *v *= i;
        }
        Ok(m)
    }
}

/// Commutator `[a, b] = ab - ba` of Hermitian Pauli operators.
///
/// Only anticommuting string pairs contribute: `[P, Q] = 2 i^k R` with
/// `PQ = i^k R` and `k` odd, so the result is exactly `i * K` with `K`
/// Hermitian and real-weighted.
pub fn commutator(a: &PauliOperator, b: &PauliOperator) -> Result<AntiHermitianOp> {
    if a.n_sites() != b.n_sites() {
        return Err(CoreError::DimensionMismatch(a.n_sites(), b.n_sites()));
    }
    let mut k_op = PauliOperator::zero(a.n_sites());
    for (p, ca) in a.terms() {
        for (q, cb) in b.terms() {
            if !p.anticommutes_with(q) {
                continue;
            }
            let (phase, r) = pauli_product(p, q)?;
            // phase = i^k with k odd; [P,Q] = 2 i^k R = i * (2 * i^{k-1}) R
            let sign = if phase.im > 0.0 { 1.0 } else { -1.0 };
            k_op.add_term(r, 2.0 * sign * ca * cb)?;
        }
    }
    Ok(AntiHermitianOp {
        hermitian_factor: k_op,
    })
}
