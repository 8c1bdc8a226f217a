//! Companion matrix, the interleaving permutation and the initial structured
//! state `Ĉ = Û - e₁ p̂ᴴ`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Float, One, Zero};

use crate::dense_oracle::DenseMatrix;
use crate::poly::Polynomial;
use crate::structqr::{band_first_col, band_last_col, StructuredState};
use crate::Error;

/// Interleaving permutation `1, 2, n, 3, n-1, 4, ...` stored 0-based:
/// `pi[j]` is the image of `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationMap {
    pub pi: Vec<usize>,
    pub inverse: Vec<usize>,
}

impl PermutationMap {
    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// The images in 1-based numbering.
    pub fn one_based(&self) -> Vec<usize> {
        self.pi.iter().map(|&p| p + 1).collect()
    }
}

fn interleave(n: usize) -> PermutationMap {
    let mut pi = vec![0; n];
    for j in 2..=n {
        pi[j - 1] = if j % 2 == 0 { j / 2 } else { n - (j - 1) / 2 };
    }
    let mut inverse = vec![0; n];
    for (j, &p) in pi.iter().enumerate() {
        inverse[p] = j;
    }
    PermutationMap { pi, inverse }
}

pub fn build_permutation(n: usize) -> Result<PermutationMap, Error> {
    if n < 2 {
        return Err(Error::DegreeTooSmall { degree: n, min: 2 });
    }
    Ok(interleave(n))
}

/// Upper Hessenberg companion matrix with first row `-p_{n-1}/p_n ... -p_0/p_n`.
pub fn companion_dense(p: &Polynomial) -> Result<DenseMatrix, Error> {
    let n = p.degree();
    let c = p.coeffs();
    let lead = p.leading();
    if lead.is_zero() {
        return Err(Error::ZeroLeadingCoefficient);
    }
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -c[n - 1 - j] / lead
        } else if i == j + 1 {
            Complex64::one()
        } else {
            Complex64::zero()
        }
    }))
}

/// Everything needed to write the permuted companion matrix as a permuted
/// cyclic shift minus a rank-one term.
#[derive(Debug, Clone)]
pub struct CompanionSetup {
    pub p: Polynomial,
    pub perm: PermutationMap,
    /// Permuted correction vector; `Ĉ = Û - e₁ phatᴴ`.
    pub phat: Vec<Complex64>,
    /// Column of the single one in each row of `Û`.
    shift_col: Vec<usize>,
}

impl CompanionSetup {
    pub fn new(p: &Polynomial) -> Self {
        let n = p.degree();
        let perm = interleave(n);
        let c = p.coeffs();
        let lead = p.leading();
        let mut row: Vec<Complex64> = (0..n).map(|k| c[n - 1 - k] / lead).collect();
        row[n - 1] += Complex64::one();
        let phat = perm.pi.iter().map(|&k| row[k].conj()).collect();
        let shift_col = perm.pi.iter().map(|&r| perm.inverse[(r + n - 1) % n]).collect();
        Self { p: p.clone(), perm, phat, shift_col }
    }

    pub fn degree(&self) -> usize {
        self.phat.len()
    }

    /// 0-based positions of the ones of `Û`, one per row.
    pub fn uhat_support(&self) -> Vec<(usize, usize)> {
        self.shift_col.iter().copied().enumerate().collect()
    }

    pub fn uhat_dense(&self) -> DenseMatrix {
        let n = self.degree();
        let mut u = DenseMatrix::zeros(n, n);
        for (i, &j) in self.shift_col.iter().enumerate() {
            u[(i, j)] = Complex64::one();
        }
        u
    }

    /// `Û v`.
    pub fn apply_uhat(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.shift_col.iter().map(|&j| v[j]).collect()
    }

    /// `Ûᴴ v`.
    pub fn apply_uhat_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::zero(); v.len()];
        for (i, &j) in self.shift_col.iter().enumerate() {
            out[j] = v[i];
        }
        out
    }

    /// Entry `(i, j)` of `Ĉ`.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        let u = if self.shift_col[i] == j { Complex64::one() } else { Complex64::zero() };
        if i == 0 {
            u - self.phat[j].conj()
        } else {
            u
        }
    }

    pub fn permuted_companion(&self) -> DenseMatrix {
        let n = self.degree();
        DenseMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }

    /// `-conj(p_0) / conj(p_n)`.
    pub fn sigma(&self) -> Complex64 {
        -self.p.coeffs()[0].conj() / self.p.leading().conj()
    }

    /// `‖Â₀‖∞ + ‖σ⁻¹ f₀‖∞ + ‖w₀‖∞`, the norm factor of the expected error.
    pub fn norm_terms(&self) -> Result<f64, Error> {
        let n = self.degree();
        let sigma = self.sigma();
        if sigma.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let band = (0..n)
            .map(|i| (band_first_col(i)..=band_last_col(i, n)).map(|j| self.entry(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let f = self.apply_uhat(&self.phat);
        let fmax = f.iter().map(|x| x.norm()).fold(0.0, f64::max) / sigma.norm();
        let wmax = self.phat.iter().map(|x| x.norm()).fold(0.0, f64::max);
        Ok(band + fmax + wmax)
    }
}

/// Band, generators and `σ` of the first iterate.
pub fn initial_state(p: &Polynomial) -> Result<StructuredState, Error> {
    let n = p.degree();
    if n < 4 {
        return Err(Error::DegreeTooSmall { degree: n, min: 4 });
    }
    if p.coeffs()[0].is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let setup = CompanionSetup::new(p);
    let mut band = vec![[Complex64::zero(); 6]; n];
    for (i, row) in band.iter_mut().enumerate() {
        for j in band_first_col(i)..=band_last_col(i, n) {
            row[j + 2 - i] = setup.entry(i, j);
        }
    }
    let mut z = vec![Complex64::zero(); n];
    z[0] = Complex64::one();
    let w = setup.phat.clone();
    let f = setup.apply_uhat(&w);
    let g = setup.apply_uhat_adjoint(&z);
    let scale = setup.permuted_companion_frobenius();
    Ok(StructuredState::from_parts(band, z, w, f, g, setup.sigma(), scale))
}

impl CompanionSetup {
    fn permuted_companion_frobenius(&self) -> f64 {
        let n = self.degree();
        let top: f64 = (0..n).map(|j| self.entry(0, j).norm_sqr()).sum();
        Float::sqrt(top + (n - 1) as f64)
    }
}
