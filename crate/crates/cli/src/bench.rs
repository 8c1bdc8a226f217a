//! Test sets, reference roots and the benchmark table runner.

use std::fmt;
use std::str::FromStr;

use cmvroots::companion::companion_dense;
use cmvroots::dense_oracle::dense_eigenvalues;
use cmvroots::metrics::{summarize, RootReport};
use cmvroots::poly::{
    chebyshev_roots, gen_p1, gen_p2, gen_p3, gen_p4, gen_p5, gen_p6, p1_roots, P4Kind, Polynomial,
};
use cmvroots::structqr::{solve, SolveOptions};
use cmvroots::{Complex64, Flag, EPS};

/// Largest degree the `auto` oracle hands to the dense solver.
pub const DENSE_LIMIT: usize = 256;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(cmvroots::Error),
    Parse(crate::coeffs::ParseError),
    Io(std::io::Error),
    Csv(csv::Error),
    /// The reference solver itself did not converge.
    OracleFailed { test: String, degree: usize },
}

impl CliError {
    /// 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::OracleFailed { .. } => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Parse(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Csv(e) => write!(f, "{e}"),
            CliError::OracleFailed { test, degree } => {
                write!(f, "dense reference did not converge for {test} at degree {degree}")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<cmvroots::Error> for CliError {
    fn from(e: cmvroots::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e)
    }
}

impl From<crate::coeffs::ParseError> for CliError {
    fn from(e: crate::coeffs::ParseError) -> Self {
        CliError::Parse(e)
    }
}

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestSet {
    P1,
    P2,
    P3,
    P4(P4Kind),
    P5,
    P6,
}

impl TestSet {
    pub fn name(self) -> String {
        match self {
            TestSet::P4(k) => format!("P4-{}", k.name()),
            other => format!("{other:?}"),
        }
    }

    /// Whether rows aggregate over random seeds.
    pub fn is_random(self) -> bool {
        matches!(self, TestSet::P5 | TestSet::P6)
    }

    pub fn degree(self, n: usize) -> usize {
        match self {
            TestSet::P1 | TestSet::P2 | TestSet::P6 => 2 * n,
            TestSet::P3 => n + 1,
            TestSet::P4(_) | TestSet::P5 => n,
        }
    }

    pub fn instance(self, params: &Params, n: usize, seed: u64) -> Result<Polynomial, CliError> {
        params.check(self)?;
        Ok(match self {
            TestSet::P1 => gen_p1(n)?,
            TestSet::P2 => gen_p2(n)?,
            TestSet::P3 => gen_p3(n, params.lambda.expect("checked"))?,
            TestSet::P4(k) => gen_p4(k, n)?,
            TestSet::P5 => gen_p5(n, seed)?,
            TestSet::P6 => gen_p6(n, seed)?,
        })
    }

    fn closed_form(self, n: usize) -> Option<Vec<Complex64>> {
        match self {
            TestSet::P1 => Some(p1_roots(n)),
            TestSet::P4(P4Kind::Chebyshev) => Some(chebyshev_roots(n)),
            _ => None,
        }
    }
}

impl FromStr for TestSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        let kind = |name: &str| P4Kind::ALL.into_iter().find(|k| k.name() == name);
        match lower.as_str() {
            "p1" => Ok(TestSet::P1),
            "p2" => Ok(TestSet::P2),
            "p3" => Ok(TestSet::P3),
            "p5" => Ok(TestSet::P5),
            "p6" => Ok(TestSet::P6),
            other => other
                .strip_prefix("p4-")
                .or(Some(other))
                .and_then(kind)
                .map(TestSet::P4)
                .ok_or_else(|| {
                    format!("unknown set {s:?}; expected P1, P2, P3, P4-bernoulli, P4-chebyshev, P4-exp, P5 or P6")
                }),
        }
    }
}

/// Where reference roots come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Oracle {
    /// Closed form for P1, else dense up to [`DENSE_LIMIT`].
    #[default]
    Auto,
    Dense,
    ClosedForm,
    None,
}

impl FromStr for Oracle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Oracle::Auto),
            "dense" => Ok(Oracle::Dense),
            "closed-form" => Ok(Oracle::ClosedForm),
            "none" => Ok(Oracle::None),
            _ => Err(format!("unknown oracle {s:?}; expected auto, dense, closed-form or none")),
        }
    }
}

/// Instance parameters beyond the set and size.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params {
    pub lambda: Option<f64>,
    pub seeds: Option<usize>,
    pub seed: u64,
    pub max_sweeps: Option<usize>,
    pub oracle: Oracle,
}

impl Params {
    pub fn check(&self, set: TestSet) -> Result<(), CliError> {
        match (set, self.lambda) {
            (TestSet::P3, None) => return Err(usage("P3 needs --lambda")),
            (TestSet::P3, Some(l)) if !(l > 0.0 && l < 1.0) => {
                return Err(usage(format!("--lambda must lie in (0, 1), got {l}")))
            }
            (TestSet::P3, _) | (_, None) => {}
            (_, Some(_)) => return Err(usage("--lambda applies to P3 only")),
        }
        match self.seeds {
            Some(_) if !set.is_random() => Err(usage("--seeds applies to P5 and P6 only")),
            Some(0) => Err(usage("--seeds must be at least 1")),
            _ => Ok(()),
        }
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions { max_sweeps: self.max_sweeps, ..SolveOptions::default() }
    }
}

/// Dense QR on the companion matrix.
pub fn dense_reference(p: &Polynomial) -> Option<Vec<Complex64>> {
    let c = companion_dense(p).ok()?;
    let e = dense_eigenvalues(&c, 30 * p.degree());
    e.converged.then_some(e.values)
}

/// Reference roots for one instance, or `None` for residual-only validation.
/// `dense_limit` caps the degree `auto` sends to the dense solver.
pub fn reference_roots(
    set: Option<(TestSet, usize)>,
    p: &Polynomial,
    oracle: Oracle,
    dense_limit: Option<usize>,
) -> Result<Option<Vec<Complex64>>, CliError> {
    let closed = set.and_then(|(s, n)| s.closed_form(n));
    let label = || set.map_or_else(|| "input".to_string(), |(s, _)| s.name());
    let dense = || {
        dense_reference(p)
            .map(Some)
            .ok_or_else(|| CliError::OracleFailed { test: label(), degree: p.degree() })
    };
    match oracle {
        Oracle::None => Ok(None),
        Oracle::ClosedForm => {
            closed.map(Some).ok_or_else(|| usage(format!("no closed-form roots for {}", label())))
        }
        Oracle::Dense => dense(),
        Oracle::Auto => match (set, closed) {
            (Some((TestSet::P1, _)), Some(r)) => Ok(Some(r)),
            _ if dense_limit.is_some_and(|m| p.degree() > m) => Ok(None),
            _ => dense(),
        },
    }
}

/// One solve with its report.
#[derive(Debug, Clone)]
pub struct Run {
    pub report: RootReport,
    pub converged: bool,
}

pub fn run_polynomial(
    p: &Polynomial,
    reference: Option<&[Complex64]>,
    params: &Params,
) -> Result<Run, CliError> {
    let sol = solve(p, &params.solve_options())?;
    let report = summarize(&sol.roots, reference, p, sol.sweeps, &sol.flags)?;
    Ok(Run { report, converged: sol.converged })
}

pub fn run_instance(set: TestSet, n: usize, seed: u64, params: &Params) -> Result<(Polynomial, Run), CliError> {
    let p = set.instance(params, n, seed)?;
    let reference = reference_roots(Some((set, n)), &p, params.oracle, Some(DENSE_LIMIT))?;
    let run = run_polynomial(&p, reference.as_deref(), params)?;
    Ok((p, run))
}

/// One line of a results table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub test: String,
    pub degree: usize,
    pub nne_min: f64,
    pub nne_max: f64,
    pub err: f64,
    pub werr: f64,
    pub averit: f64,
    pub converged: bool,
    pub flags: Vec<Flag>,
}

/// Counted flags keep their largest count.
fn merge_flag(flags: &mut Vec<Flag>, f: Flag) {
    let slot = flags.iter_mut().find(|g| core::mem::discriminant(*g) == core::mem::discriminant(&f));
    match (slot, f) {
        (Some(Flag::ExceptionalShifts(m)), Flag::ExceptionalShifts(k)) => *m = (*m).max(k),
        (Some(Flag::ZeroRoots(m)), Flag::ZeroRoots(k)) => *m = (*m).max(k),
        (Some(_), _) => {}
        (None, _) => flags.push(f),
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// One row per size; random sets aggregate `seeds` runs with seeds
/// `seed, seed + 1, ...` into the nne range and the worst of the rest.
pub fn bench(set: TestSet, sizes: &[usize], params: &Params) -> Result<Vec<BenchRow>, CliError> {
    params.check(set)?;
    if sizes.is_empty() {
        return Err(usage("no sizes given"));
    }
    let runs = if set.is_random() { params.seeds.unwrap_or(1) } else { 1 };
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut row = BenchRow {
            test: set.name(),
            degree: set.degree(n),
            nne_min: f64::INFINITY,
            nne_max: f64::NEG_INFINITY,
            err: f64::NEG_INFINITY,
            werr: f64::NEG_INFINITY,
            averit: f64::NEG_INFINITY,
            converged: true,
            flags: Vec::new(),
        };
        for k in 0..runs {
            let (_, run) = run_instance(set, n, params.seed.wrapping_add(k as u64), params)?;
            let r = &run.report;
            let nne = r.nne / EPS;
            row.nne_min = row.nne_min.min(nne);
            row.nne_max = row.nne_max.max(nne);
            row.err = nan_max(row.err, r.err);
            row.werr = nan_max(row.werr, r.werr);
            row.averit = row.averit.max(r.averit);
            row.converged &= run.converged;
            for &f in &r.flags {
                merge_flag(&mut row.flags, f);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Sizes from a list such as `64,128` or the doubling range `64..1024`.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let int = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("not a size: {t:?}"));
        if let Some((a, b)) = part.split_once("..") {
            let (mut a, b) = (int(a)?, int(b)?);
            if a == 0 || a > b {
                return Err(format!("bad range {part:?}"));
            }
            while a <= b {
                out.push(a);
                a *= 2;
            }
        } else {
            out.push(int(part)?);
        }
    }
    if out.contains(&0) {
        return Err("sizes must be positive".into());
    }
    Ok(out)
}
