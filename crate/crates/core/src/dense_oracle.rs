//! Unstructured reference path: dense QR, explicit shifted QR iteration and
//! eigenvector conditioning.
//!
//! Uses the same reflectors, shift policy and deflation test as the structured
//! solver so the two can be compared step by step.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::{Float, One, Zero};

use crate::shift::{eig2, ShiftPolicy};
use crate::structqr::{band_first_col, band_last_col, Reflector};
use crate::EPS;

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Square block `[lo..=hi] x [lo..=hi]`.
    pub fn block(&self, lo: usize, hi: usize) -> Self {
        Self::from_fn(hi + 1 - lo, hi + 1 - lo, |i, j| self[(lo + i, lo + j)])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    fn rotate_rows(&mut self, g: &Reflector) {
        let c = self.cols;
        let (top, bottom) = self.data.split_at_mut((g.k + 1) * c);
        let x = &mut top[g.k * c..];
        for (a, b) in x.iter_mut().zip(bottom[..c].iter_mut()) {
            g.apply_adjoint(a, b);
        }
    }

    fn rotate_cols(&mut self, g: &Reflector) {
        for i in 0..self.rows {
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            let (a, b) = row.split_at_mut(g.k + 1);
            g.apply_right(&mut a[g.k], &mut b[0]);
        }
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

fn unit_phase(d: Complex64) -> Complex64 {
    let r = d.norm();
    if r > 0.0 {
        d / r
    } else {
        Complex64::one()
    }
}

/// Reduces the window block of `a` to upper triangular form from the left,
/// acting on whole rows. Returns the reflectors in application order and the
/// phase that made the last diagonal entry real and nonnegative.
fn triangularize(a: &mut DenseMatrix, lo: usize, hi: usize) -> (Vec<Reflector>, Complex64) {
    let mut rots = Vec::new();
    for c in lo..hi {
        let bot = (c + 1..=hi).rev().find(|&r| !a[(r, c)].is_zero()).unwrap_or(c + 1);
        for r in (c..bot).rev() {
            let (g, nu) = Reflector::annihilate_norm(r, a[(r, c)], a[(r + 1, c)]);
            a.rotate_rows(&g);
            a[(r, c)] = Complex64::new(nu, 0.0);
            a[(r + 1, c)] = Complex64::zero();
            rots.push(g);
        }
    }
    let d = a[(hi, hi)];
    let ph = unit_phase(d);
    let phc = ph.conj();
    let cols = a.cols;
    for x in &mut a.data[hi * cols..(hi + 1) * cols] {
        *x *= phc;
    }
    a[(hi, hi)] = Complex64::new(d.norm(), 0.0);
    (rots, ph)
}

/// `Q, R` with `QR = a`, `R` upper triangular with a real nonnegative diagonal.
pub fn dense_qr(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    assert_eq!(a.rows, a.cols, "dense_qr needs a square matrix");
    let n = a.rows;
    let mut r = a.clone();
    if n == 0 {
        return (DenseMatrix::identity(0), r);
    }
    let (rots, ph) = triangularize(&mut r, 0, n - 1);
    let mut q = DenseMatrix::identity(n);
    for g in &rots {
        q.rotate_cols(g);
    }
    for i in 0..n {
        q[(i, n - 1)] *= ph;
    }
    (q, r)
}

/// One explicit shifted QR step on the window `[lo..=hi]`, transforming the
/// whole matrix by `diag(I, Q, I)`. Returns the reflectors and tail phase of `Q`.
pub fn qr_step_window(
    a: &mut DenseMatrix,
    lo: usize,
    hi: usize,
    shift: Complex64,
) -> (Vec<Reflector>, Complex64) {
    assert!(lo <= hi && hi < a.rows && a.rows == a.cols);
    for i in lo..=hi {
        a[(i, i)] -= shift;
    }
    let (rots, ph) = triangularize(a, lo, hi);
    for g in &rots {
        a.rotate_cols(g);
    }
    for i in 0..a.rows {
        a[(i, hi)] *= ph;
    }
    for i in lo..=hi {
        a[(i, i)] += shift;
    }
    (rots, ph)
}

/// `Qᴴ a Q` where `a - shift I = QR`.
pub fn dense_qr_step(a: &DenseMatrix, shift: Complex64) -> DenseMatrix {
    let mut out = a.clone();
    if a.rows > 0 {
        qr_step_window(&mut out, 0, a.rows - 1, shift);
    }
    out
}

/// Eigenvalues from the dense shifted QR iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseEigen {
    pub values: Vec<Complex64>,
    pub sweeps: usize,
    pub converged: bool,
    pub exceptional_shifts: usize,
}

/// Seed of the exceptional-shift generator when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x5EED;

pub fn dense_eigenvalues(a: &DenseMatrix, max_sweeps: usize) -> DenseEigen {
    dense_eigenvalues_seeded(a, max_sweeps, DEFAULT_SEED, 1.0)
}

/// Dense iteration with an explicit seed and deflation tolerance multiplier.
pub fn dense_eigenvalues_seeded(
    a: &DenseMatrix,
    max_sweeps: usize,
    seed: u64,
    tol_multiplier: f64,
) -> DenseEigen {
    assert_eq!(a.rows, a.cols, "dense_eigenvalues needs a square matrix");
    let n = a.rows;
    let mut a = a.clone();
    let mut out = DenseEigen { values: Vec::with_capacity(n), sweeps: 0, converged: true, exceptional_shifts: 0 };
    if n == 0 {
        return out;
    }
    let mut policy = ShiftPolicy::new(n, seed);
    let (mut lo, mut hi) = (0usize, n - 1);
    loop {
        let size = hi + 1 - lo;
        if size <= 2 {
            push_block(&a, lo, hi, &mut out.values);
            break;
        }
        let split = [hi - 1, hi - 2, lo, lo + 1]
            .into_iter()
            .enumerate()
            .find(|&(t, k)| (t != 3 || size >= 4) && decoupled(&a, lo, hi, k, tol_multiplier));
        if let Some((t, k)) = split {
            for r in k + 1..=hi {
                for c in lo..=k {
                    a[(r, c)] = Complex64::zero();
                }
            }
            if t < 2 {
                push_block(&a, k + 1, hi, &mut out.values);
                hi = k;
            } else {
                push_block(&a, lo, k, &mut out.values);
                lo = k + 1;
            }
            policy.deflated();
            continue;
        }
        if out.sweeps >= max_sweeps {
            out.converged = false;
            out.values.extend((lo..=hi).map(|i| a[(i, i)]));
            break;
        }
        let shift = policy.next(a[(hi - 1, hi - 1)], a[(hi - 1, hi)], a[(hi, hi - 1)], a[(hi, hi)]);
        qr_step_window(&mut a, lo, hi, shift);
        out.sweeps += 1;
    }
    out.exceptional_shifts = policy.exceptional;
    out
}

fn push_block(a: &DenseMatrix, lo: usize, hi: usize, out: &mut Vec<Complex64>) {
    if lo == hi {
        out.push(a[(lo, lo)]);
    } else {
        let (l1, l2) = eig2(a[(lo, lo)], a[(lo, hi)], a[(hi, lo)], a[(hi, hi)]);
        out.push(l1);
        out.push(l2);
    }
}

/// Whether everything below row `k` and left of column `k + 1` in the window
/// is negligible next to the adjacent diagonal entries, or next to the
/// neighbouring entries of rows `k`, `k + 1` when both diagonals vanish.
fn decoupled(a: &DenseMatrix, lo: usize, hi: usize, k: usize, tol_multiplier: f64) -> bool {
    let n = a.rows();
    let mut tol = a[(k, k)].norm() + a[(k + 1, k + 1)].norm();
    if tol == 0.0 {
        tol = (k..=k + 1)
            .map(|r| (band_first_col(r).max(lo)..=band_last_col(r, n).min(hi)).map(|c| a[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max);
    }
    tol *= tol_multiplier * EPS;
    (k + 1..=hi).all(|r| (lo..=k).all(|c| a[(r, c)].norm() <= tol))
}

/// `κ∞(V)` for the companion eigenvector matrix, columns `(λ^{n-1}, ..., λ, 1)`
/// scaled to unit 2-norm.
///
/// Infinite when a pivot vanishes or the result overflows.
pub fn vandermonde_condition(roots: &[Complex64]) -> f64 {
    let n = roots.len();
    if n == 0 {
        return 1.0;
    }
    let mut v = DenseMatrix::zeros(n, n);
    for (k, &l) in roots.iter().enumerate() {
        // Powers of whichever of λ, 1/λ is inside the unit disc never overflow.
        let (mut p, step, up) = if l.norm() > 1.0 {
            (Complex64::one(), l.inv(), true)
        } else {
            (Complex64::one(), l, false)
        };
        for t in 0..n {
            let i = if up { t } else { n - 1 - t };
            v[(i, k)] = p;
            p *= step;
        }
        let norm = Float::sqrt((0..n).map(|i| v[(i, k)].norm_sqr()).sum::<f64>());
        for i in 0..n {
            v[(i, k)] /= norm;
        }
    }
    let norm_v = v.norm_inf();
    if !norm_v.is_finite() {
        return f64::INFINITY;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for c in 0..n {
        let (piv, mag) = (c..n)
            .map(|r| (r, v[(r, c)].norm()))
            .fold((c, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag == 0.0 || !mag.is_finite() {
            return f64::INFINITY;
        }
        if piv != c {
            for j in 0..n {
                v.data.swap(piv * n + j, c * n + j);
            }
            perm.swap(piv, c);
        }
        let d = v[(c, c)];
        for r in c + 1..n {
            let l = v[(r, c)] / d;
            v[(r, c)] = l;
            if l.is_zero() {
                continue;
            }
            for j in c + 1..n {
                let t = v[(c, j)];
                v[(r, j)] -= l * t;
            }
        }
    }
    // Solve LU X = P I with all right-hand sides at once, row by row.
    let mut x = DenseMatrix::zeros(n, n);
    for (i, &p) in perm.iter().enumerate() {
        x[(i, p)] = Complex64::one();
    }
    for i in 0..n {
        for k in 0..i {
            let l = v[(i, k)];
            if l.is_zero() {
                continue;
            }
            let (done, rest) = x.data.split_at_mut(i * n);
            for (a, b) in rest[..n].iter_mut().zip(&done[k * n..(k + 1) * n]) {
                *a -= l * b;
            }
        }
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let u = v[(i, k)];
            if u.is_zero() {
                continue;
            }
            let (head, tail) = x.data.split_at_mut(k * n);
            for (a, b) in head[i * n..(i + 1) * n].iter_mut().zip(&tail[..n]) {
                *a -= u * b;
            }
        }
        let d = v[(i, i)];
        for a in &mut x.data[i * n..(i + 1) * n] {
            *a /= d;
        }
    }
    let kappa = norm_v * x.norm_inf();
    if kappa.is_finite() {
        kappa
    } else {
        f64::INFINITY
    }
}
