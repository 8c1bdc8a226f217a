//! Polynomials, evaluation and the six benchmark families.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::Error;

/// Dense coefficient list `c[0] + c[1] z + ... + c[n] z^n` with `c[n] != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Checks degree ≥ 1, a nonzero leading coefficient and finite entries.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, Error> {
        if coeffs.len() < 2 {
            return Err(Error::DegreeTooSmall { degree: coeffs.len().saturating_sub(1), min: 1 });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if coeffs[coeffs.len() - 1].is_zero() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self, Error> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    /// Horner evaluation.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c)
    }

    /// `|p(z)| / Σ |c_j| |z|^j`, the backward error of `z` as a root.
    pub fn scaled_residual(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let scale = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
        if scale == 0.0 {
            return 0.0;
        }
        self.evaluate(z).norm() / scale
    }

    /// Splits `p = z^m q` with `q(0) != 0`.
    ///
    /// `q` is `None` when the remaining factor is a nonzero constant.
    pub fn strip_zero_roots(&self) -> (Option<Polynomial>, usize) {
        let m = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        let rest = &self.coeffs[m..];
        if rest.len() < 2 {
            (None, m)
        } else {
            (Some(Polynomial { coeffs: rest.to_vec() }), m)
        }
    }

    /// Multiplies every coefficient by `s`.
    pub fn scaled(&self, s: Complex64) -> Result<Self, Error> {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }
}

fn real_poly(c: Vec<f64>) -> Result<Polynomial, Error> {
    Polynomial::new(c.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
}

fn need(ok: bool, what: &'static str) -> Result<(), Error> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(what))
    }
}

/// `1 + (n/(n+1) + (n+1)/n) z^n + z^{2n}`: roots on two circles.
pub fn gen_p1(n: usize) -> Result<Polynomial, Error> {
    need(n >= 1, "P1 needs n >= 1")?;
    let nf = n as f64;
    let mut c = vec![0.0; 2 * n + 1];
    c[0] = 1.0;
    c[n] = nf / (nf + 1.0) + (nf + 1.0) / nf;
    c[2 * n] = 1.0;
    real_poly(c)
}

/// Closed-form roots of [`gen_p1`]: the n-th roots of `-n/(n+1)` and `-(n+1)/n`.
pub fn p1_roots(n: usize) -> Vec<Complex64> {
    let nf = n as f64;
    let mut out = Vec::with_capacity(2 * n);
    for r in [nf / (nf + 1.0), (nf + 1.0) / nf] {
        let rad = Float::powf(r, 1.0 / nf);
        for k in 0..n {
            let t = PI * (2 * k + 1) as f64 / nf;
            out.push(Complex64::from_polar(rad, t));
        }
    }
    out
}

/// Palindromic spectral-factorization test polynomial of degree `2n`.
pub fn gen_p2(n: usize) -> Result<Polynomial, Error> {
    need(n >= 1, "P2 needs n >= 1")?;
    let nf = n as f64;
    let mut c = vec![0.0; 2 * n + 1];
    for j in 0..n {
        let v = (nf + j as f64) / nf;
        c[j] = v;
        c[2 * n - j] = v;
    }
    c[n] = (nf + 1.0) / nf;
    real_poly(c)
}

/// `(1-λ) z^{n+1} - (λ+1) z^n + (λ+1) z - (1-λ)`, antipalindromic of degree `n+1`.
pub fn gen_p3(n: usize, lambda: f64) -> Result<Polynomial, Error> {
    need(n >= 1, "P3 needs n >= 1")?;
    need(lambda > 0.0 && lambda < 1.0, "P3 needs 0 < lambda < 1")?;
    let a = 1.0 - lambda;
    let b = lambda + 1.0;
    let mut c = vec![0.0; n + 2];
    c[0] = -a;
    c[n + 1] = a;
    c[1] += b;
    c[n] -= b;
    real_poly(c)
}

/// Small-degree families of the P4 suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P4Kind {
    Bernoulli,
    Chebyshev,
    Exp,
}

impl P4Kind {
    pub const ALL: [P4Kind; 3] = [P4Kind::Bernoulli, P4Kind::Chebyshev, P4Kind::Exp];

    pub fn name(self) -> &'static str {
        match self {
            P4Kind::Bernoulli => "bernoulli",
            P4Kind::Chebyshev => "chebyshev",
            P4Kind::Exp => "exp",
        }
    }
}

/// Pascal's triangle rows `0..=m` in floating point (exact for m ≤ 50).
fn binomials(m: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    for r in 0..=m {
        let mut row = vec![1.0; r + 1];
        for k in 1..r {
            row[k] = rows[r - 1][k - 1] + rows[r - 1][k];
        }
        rows.push(row);
    }
    rows
}

/// Bernoulli numbers `b_0..=b_m` with `b_1 = -1/2`.
pub fn bernoulli_numbers(m: usize) -> Vec<f64> {
    let binom = binomials(m + 1);
    let mut b = vec![0.0; m + 1];
    b[0] = 1.0;
    for k in 1..=m {
        let s: f64 = (0..k).map(|j| binom[k + 1][j] * b[j]).sum();
        b[k] = -s / (k + 1) as f64;
    }
    b
}

pub fn gen_p4(kind: P4Kind, n: usize) -> Result<Polynomial, Error> {
    need((1..=30).contains(&n), "P4 needs 1 <= n <= 30")?;
    let c = match kind {
        P4Kind::Bernoulli => {
            let b = bernoulli_numbers(n);
            let binom = binomials(n);
            (0..=n).map(|j| binom[n][j] * b[n - j]).collect()
        }
        P4Kind::Chebyshev => {
            let mut prev = vec![1.0];
            let mut cur = vec![0.0, 1.0];
            for _ in 1..n {
                let mut next = vec![0.0; cur.len() + 1];
                for (j, &c) in cur.iter().enumerate() {
                    next[j + 1] += 2.0 * c;
                }
                for (j, &c) in prev.iter().enumerate() {
                    next[j] -= c;
                }
                prev = core::mem::replace(&mut cur, next);
            }
            cur
        }
        P4Kind::Exp => {
            let mut c = Vec::with_capacity(n + 1);
            let mut t = 1.0;
            for j in 0..=n {
                if j > 0 {
                    t *= 2.0 / j as f64;
                }
                c.push(t);
            }
            c
        }
    };
    real_poly(c)
}

/// Zeros of the degree-`n` Chebyshev polynomial, `cos((2k-1)π/(2n))`.
pub fn chebyshev_roots(n: usize) -> Vec<Complex64> {
    (1..=n)
        .map(|k| {
            if 2 * k - 1 == n {
                return Complex64::zero();
            }
            Complex64::new(Float::cos(PI * (2 * k - 1) as f64 / (2 * n) as f64), 0.0)
        })
        .collect()
}

/// The splitmix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// `a * 10^e` with `a` uniform on [-1, 1] and `e` uniform on [-3, 3].
fn random_coeffs(len: usize, rng: &mut SplitMix64) -> Vec<f64> {
    loop {
        let c: Vec<f64> = (0..len)
            .map(|_| {
                let a = 2.0 * rng.next_f64() - 1.0;
                let e = 6.0 * rng.next_f64() - 3.0;
                a * Float::powf(10.0, e)
            })
            .collect();
        if c[0] != 0.0 && c[len - 1] != 0.0 {
            return c;
        }
    }
}

/// Random real coefficients spread over six decades.
pub fn gen_p5(n: usize, seed: u64) -> Result<Polynomial, Error> {
    need(n >= 1, "P5 needs n >= 1")?;
    real_poly(random_coeffs(n + 1, &mut SplitMix64::new(seed)))
}

/// `s(z) s(1/z) z^n` for the random `s` of [`gen_p5`] with the same seed.
pub fn gen_p6(n: usize, seed: u64) -> Result<Polynomial, Error> {
    need(n >= 1, "P6 needs n >= 1")?;
    let s = random_coeffs(n + 1, &mut SplitMix64::new(seed));
    real_poly(self_reciprocal(&s))
}

/// Coefficients of `s(z) s(1/z) z^n`; the upper half mirrors the lower bitwise.
pub fn self_reciprocal(s: &[f64]) -> Vec<f64> {
    let n = s.len() - 1;
    let mut c = vec![0.0; 2 * n + 1];
    for k in 0..=n {
        let v: f64 = (0..k + 1).map(|j| s[j] * s[j + n - k]).sum();
        c[k] = v;
        c[2 * n - k] = v;
    }
    c
}
