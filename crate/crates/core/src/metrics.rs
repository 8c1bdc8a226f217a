//! Matching computed roots to reference roots and the error statistics
//! err, nne, werr and averit.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::companion::CompanionSetup;
use crate::dense_oracle::vandermonde_condition;
use crate::poly::Polynomial;
use crate::structqr::{band_first_col, band_last_col, StructuredState};
use crate::{Error, Flag, EPS};

/// A matched pair: computed index, reference index, distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub computed: usize,
    pub reference: usize,
    pub distance: f64,
}

/// Greedy global matching, closest pair first. Ties break on the indices.
pub fn match_pairs(computed: &[Complex64], reference: &[Complex64]) -> Result<Vec<Pair>, Error> {
    if computed.len() != reference.len() {
        return Err(Error::LengthMismatch { left: computed.len(), right: reference.len() });
    }
    let n = computed.len();
    let mut all = Vec::with_capacity(n * n);
    for (i, a) in computed.iter().enumerate() {
        for (j, b) in reference.iter().enumerate() {
            all.push(Pair { computed: i, reference: j, distance: (a - b).norm() });
        }
    }
    all.sort_by(|x, y| {
        x.distance
            .total_cmp(&y.distance)
            .then(x.computed.cmp(&y.computed))
            .then(x.reference.cmp(&y.reference))
    });
    let mut used_c = vec![false; n];
    let mut used_r = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for p in all {
        if !used_c[p.computed] && !used_r[p.reference] {
            used_c[p.computed] = true;
            used_r[p.reference] = true;
            out.push(p);
            if out.len() == n {
                break;
            }
        }
    }
    Ok(out)
}

/// Per-pair distances in the order the pairs were formed.
pub fn match_roots(computed: &[Complex64], reference: &[Complex64]) -> Result<Vec<f64>, Error> {
    Ok(match_pairs(computed, reference)?.into_iter().map(|p| p.distance).collect())
}

/// `(‖Â₀‖∞ + ‖σ⁻¹f₀‖∞ + ‖w₀‖∞)·cond·ε` for the first iterate.
pub fn compute_nne(state0: &StructuredState, cond: f64) -> f64 {
    let n = state0.n();
    let band = (0..n)
        .map(|i| {
            let row = state0.band_row(i);
            (band_first_col(i)..=band_last_col(i, n)).map(|j| row[j + 2 - i].norm()).sum::<f64>()
        })
        .fold(0.0, f64::max);
    let mx = |v: &[Complex64]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let terms = band + mx(state0.f()) / state0.sigma().norm() + mx(state0.w());
    terms * cond * EPS
}

/// Same quantity from the polynomial alone; also defined for degrees below
/// the structured minimum. Zero roots are stripped first.
pub fn nne_for(p: &Polynomial, cond: f64) -> Result<f64, Error> {
    let Some(q) = p.strip_zero_roots().0 else {
        return Ok(f64::INFINITY);
    };
    if q.degree() < 2 {
        let terms = q.coeffs()[0].norm() / q.leading().norm();
        return Ok(terms * cond * EPS);
    }
    Ok(CompanionSetup::new(&q).norm_terms()? * cond * EPS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootReport {
    pub roots: Vec<Complex64>,
    pub per_root_err: Vec<f64>,
    pub err: f64,
    pub nne: f64,
    pub werr: f64,
    pub averit: f64,
    pub sweeps: usize,
    pub flags: Vec<Flag>,
}

/// Assemble the report. Without a reference `err` and `werr` are NaN and the
/// conditioning comes from the computed roots.
pub fn summarize(
    computed: &[Complex64],
    reference: Option<&[Complex64]>,
    p: &Polynomial,
    sweeps: usize,
    flags: &[Flag],
) -> Result<RootReport, Error> {
    let n = p.degree();
    if computed.len() != n {
        return Err(Error::LengthMismatch { left: computed.len(), right: n });
    }
    let mut flags = flags.to_vec();
    let (per_root_err, err, cond) = match reference {
        Some(r) => {
            let d = match_roots(computed, r)?;
            let err = if n == 0 { 0.0 } else { d.iter().sum::<f64>() / n as f64 };
            let worst = d.iter().copied().fold(0.0, f64::max);
            if ambiguous(r, worst) {
                flags.push(Flag::AmbiguousMatching);
            }
            (d, err, vandermonde_condition(r))
        }
        None => {
            flags.push(Flag::NoReference);
            (Vec::new(), f64::NAN, vandermonde_condition(computed))
        }
    };
    let nne = nne_for(p, cond)?;
    let werr = if nne.is_infinite() {
        flags.push(Flag::InfiniteNne);
        if err.is_nan() { f64::NAN } else { 0.0 }
    } else if nne.is_zero() {
        0.0
    } else {
        err / nne
    };
    Ok(RootReport {
        roots: computed.to_vec(),
        per_root_err,
        err,
        nne,
        werr,
        averit: if n == 0 { 0.0 } else { sweeps as f64 / n as f64 },
        sweeps,
        flags,
    })
}

fn ambiguous(reference: &[Complex64], worst: f64) -> bool {
    let gap = 10.0 * worst;
    reference
        .iter()
        .enumerate()
        .any(|(i, a)| reference[i + 1..].iter().any(|b| (a - b).norm() < gap))
}
