//! Shift selection shared by the structured solver and the dense oracle.

use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::poly::SplitMix64;

/// Sweeps without deflation before a random shift, once the band is filled.
pub(crate) const EXCEPTIONAL_AFTER: usize = 10;

/// Both eigenvalues of `[[a, b], [c, d]]`, larger magnitude first.
pub fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let m = (a + d) * 0.5;
    let h = (a - d) * 0.5;
    let disc = (h * h + b * c).sqrt();
    let (p, q) = (m + disc, m - disc);
    let big = if p.norm() >= q.norm() { p } else { q };
    if big.is_zero() {
        return (big, big);
    }
    (big, (a * d - b * c) / big)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
pub fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let (l1, l2) = eig2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Wilkinson shifts with a random-angle escape after stagnation.
///
/// The zero-shift start needs about `n/2` sweeps to fill the band and the
/// rank-two region; a random shift before that leaves the generators out of
/// step with the band. So until the first escape the wait is `ceil(n/2) + 2`
/// sweeps, deflations or not.
#[derive(Debug, Clone)]
pub(crate) struct ShiftPolicy {
    stall: usize,
    filled: bool,
    fill_limit: usize,
    rng: SplitMix64,
    pub exceptional: usize,
}

impl ShiftPolicy {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            stall: 0,
            filled: false,
            fill_limit: n.div_ceil(2) + 2,
            rng: SplitMix64::new(seed),
            exceptional: 0,
        }
    }

    pub fn next(&mut self, a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
        let limit = if self.filled { EXCEPTIONAL_AFTER } else { self.fill_limit };
        let shift = if self.stall >= limit {
            self.stall = 0;
            self.filled = true;
            self.exceptional += 1;
            let mag = [a, b, c, d].iter().map(|x| x.norm()).fold(0.0, Float::max);
            Complex64::from_polar(mag, 2.0 * PI * self.rng.next_f64())
        } else {
            wilkinson(a, b, c, d)
        };
        self.stall += 1;
        shift
    }

    pub fn deflated(&mut self) {
        self.stall = 0;
    }
}
