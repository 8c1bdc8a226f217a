//! One PASS/FAIL line per acceptance criterion, with the measured numbers.

use std::process::Command;
use std::time::{Duration, Instant};

use cmvroots::companion::initial_state;
use cmvroots::dense_oracle::{qr_step_window, DenseMatrix};
use cmvroots::metrics::{summarize, RootReport};
use cmvroots::poly::{chebyshev_roots, gen_p1, gen_p3, gen_p4, gen_p5, p1_roots, P4Kind, Polynomial};
use cmvroots::structqr::{band_first_col, band_last_col, solve, SolveOptions, Solver, Step, BAND_SLOTS};
use cmvroots::{Complex64, EPS};
use cmvroots_cli::bench::{dense_reference, run_instance};
use cmvroots_cli::{bench, Params, TestSet};

type C = Complex64;

struct Outcome {
    pass: bool,
    summary: String,
    info: Vec<String>,
}

fn outcome(pass: bool, summary: String) -> Outcome {
    Outcome { pass, summary, info: Vec::new() }
}

struct Solved {
    report: RootReport,
    converged: bool,
}

fn solve_against(p: &Polynomial, reference: Option<&[C]>) -> Solved {
    let sol = solve(p, &SolveOptions::default()).expect("valid instance");
    let report = summarize(&sol.roots, reference, p, sol.sweeps, &sol.flags).expect("consistent lengths");
    Solved { report, converged: sol.converged }
}

fn dense_ref(p: &Polynomial) -> Vec<C> {
    dense_reference(p).expect("dense reference converges")
}

fn mx(v: &[C]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Structured sweeps against one explicit dense step from the same iterate.
fn step_equivalence() -> Outcome {
    let t = Instant::now();
    let (mut worst, mut worst_scaled, mut failed) = (0.0f64, 0.0f64, 0usize);
    for k in 0..200u64 {
        let n = 8 + (k % 9) as usize;
        let p = gen_p5(n, k).expect("valid size");
        let mut solver = Solver::new(&p, &SolveOptions::default()).expect("p(0) != 0");
        let mut sweeps = 0;
        let mut bad = false;
        while sweeps < 5 {
            let before = solver.state().to_dense();
            let (lo, hi) = solver.state().window();
            match solver.step() {
                Step::Swept => {}
                Step::Deflated(_) => continue,
                Step::Finished => break,
            }
            sweeps += 1;
            let mut dense = before.clone();
            qr_step_window(&mut dense, lo, hi, solver.last_shift().expect("just swept"));
            let s = solver.state();
            let diff = s.to_dense().max_abs_diff(&dense);
            let rel = diff / before.norm_inf();
            let generators = before.norm_inf() + mx(s.f()) * mx(s.g()) / s.sigma().norm() + mx(s.z()) * mx(s.w());
            worst = worst.max(rel);
            worst_scaled = worst_scaled.max(diff / generators);
            bad |= rel > 1e-12;
        }
        failed += bad as usize;
    }
    let elapsed = t.elapsed();
    let pass = failed == 0 && elapsed < Duration::from_secs(30);
    let mut o = outcome(
        pass,
        format!("{failed}/200 instances exceed 1e-12*|A_s|inf; worst {worst:.2e}; {:.2} s", elapsed.as_secs_f64()),
    );
    o.info.push(format!(
        "worst difference relative to |A_s|inf + |f||g|/|sigma| + |z||w|: {worst_scaled:.2e}"
    ));
    o
}

fn p1_accuracy() -> Outcome {
    let t = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for n in [32, 64] {
        let p = gen_p1(n).expect("valid size");
        let s = solve_against(&p, Some(&p1_roots(n)));
        pass &= s.converged && s.report.err <= 1e-12 && s.report.averit <= 6.0;
        lines.push(format!("degree {}: err {:.2e} averit {:.2}", p.degree(), s.report.err, s.report.averit));
    }
    let elapsed = t.elapsed();
    pass &= elapsed < Duration::from_secs(10);
    outcome(pass, format!("{}; {:.2} s", lines.join(", "), elapsed.as_secs_f64()))
}

fn p3_reproduction() -> Outcome {
    let t = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for lambda in [0.9, 0.999] {
        let p = gen_p3(64, lambda).expect("valid parameters");
        let s = solve_against(&p, Some(&dense_ref(&p)));
        pass &= s.converged && s.report.err <= 1e-12 && s.report.averit <= 4.0;
        lines.push(format!(
            "lambda {lambda} degree {}: err {:.2e} averit {:.2} werr {:.2e}",
            p.degree(),
            s.report.err,
            s.report.averit,
            s.report.werr
        ));
    }
    let elapsed = t.elapsed();
    pass &= elapsed < Duration::from_secs(10);
    outcome(pass, format!("{}; {:.2} s", lines.join(", "), elapsed.as_secs_f64()))
}

fn p4_suite() -> Outcome {
    let t = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for (kind, tol) in [(P4Kind::Bernoulli, 1e-12), (P4Kind::Exp, 1e-12), (P4Kind::Chebyshev, 1e-9)] {
        let p = gen_p4(kind, 10).expect("valid size");
        let reference = if kind == P4Kind::Chebyshev { chebyshev_roots(10) } else { dense_ref(&p) };
        let s = solve_against(&p, Some(&reference));
        pass &= s.converged && s.report.err <= tol;
        lines.push(format!("{} err {:.2e} (<= {tol:e})", kind.name(), s.report.err));
    }
    let elapsed = t.elapsed();
    pass &= elapsed < Duration::from_secs(5);
    outcome(pass, format!("{}; {:.2} s", lines.join(", "), elapsed.as_secs_f64()))
}

fn werr_envelope() -> Outcome {
    let mut cases: Vec<(String, Polynomial, Vec<C>)> = Vec::new();
    for n in [32, 64] {
        let p = gen_p1(n).expect("valid size");
        cases.push((format!("P1 degree {}", p.degree()), p, p1_roots(n)));
    }
    for lambda in [0.9, 0.999] {
        let p = gen_p3(64, lambda).expect("valid parameters");
        let r = dense_ref(&p);
        cases.push((format!("P3 lambda {lambda}"), p, r));
    }
    for kind in P4Kind::ALL {
        for n in [10, 20, 30] {
            let p = gen_p4(kind, n).expect("valid size");
            let r = if kind == P4Kind::Chebyshev { chebyshev_roots(n) } else { dense_ref(&p) };
            cases.push((format!("{} {n}", kind.name()), p, r));
        }
    }
    for seed in 1..=50 {
        let p = gen_p5(32, seed).expect("valid size");
        let r = dense_ref(&p);
        cases.push((format!("P5 seed {seed}"), p, r));
    }
    let (mut worst_ratio, mut worst_name, mut worst_werr, mut checked, mut failed) =
        (0.0f64, String::new(), 0.0, 0, 0);
    for (name, p, r) in &cases {
        let s = solve_against(p, Some(r));
        if !s.report.nne.is_finite() {
            continue;
        }
        checked += 1;
        let n3 = (p.degree() as f64).powi(3);
        let ratio = s.report.werr / n3;
        failed += (ratio > 1.0 || ratio.is_nan()) as usize;
        if ratio > worst_ratio {
            (worst_ratio, worst_name, worst_werr) = (ratio, name.clone(), s.report.werr);
        }
    }
    outcome(
        failed == 0,
        format!(
            "{checked} runs with finite nne, {failed} above n^3; max werr/n^3 {worst_ratio:.2e} ({worst_name}, werr {worst_werr:.2e})"
        ),
    )
}

/// Last row with a nonzero entry in each column, at least the diagonal.
fn lower_profile(a: &DenseMatrix) -> Vec<usize> {
    (0..a.cols())
        .map(|j| (j..a.rows()).rev().find(|&i| a[(i, j)] != C::new(0.0, 0.0)).unwrap_or(j))
        .collect()
}

fn envelope(m: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    m.iter().map(|&x| {
        acc = acc.max(x);
        acc
    }).collect()
}

fn second_singular_value(m: [[C; 2]; 2]) -> (f64, f64) {
    let fro2: f64 = m.iter().flatten().map(|x| x.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    let s1 = ((fro2 + (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt();
    (s1, if s1 > 0.0 { det / s1 } else { 0.0 })
}

fn invariant_suite() -> Outcome {
    let p = gen_p5(32, 7).expect("valid size");
    let n = p.degree();
    let nf = n as f64;
    let mut solver = Solver::new(&p, &SolveOptions::default()).expect("p(0) != 0");
    let mut dense = initial_state(&p).expect("p(0) != 0").to_dense();
    let mut profile = envelope(&lower_profile(&dense));
    let (mut staircase, mut zeros, mut rank, mut unitary, mut upper) = (0, 0, 0, 0, 0);
    let (mut worst_rank, mut worst_unitary, mut worst_upper, mut worst_unitary_scaled) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut sweeps = 0;
    while sweeps < 50 {
        match solver.step() {
            Step::Swept => {}
            Step::Deflated(_) => continue,
            Step::Finished => break,
        }
        sweeps += 1;
        let q = solver.last_sweep().expect("just swept").to_dense(n);
        dense = q.adjoint().matmul(&dense).matmul(&q);
        let s = solver.state();
        let a = s.to_dense();

        let m = lower_profile(&a);
        staircase += (0..n).any(|j| m[j] > profile[j]) as usize;
        profile = envelope(&m);

        zeros += (0..n).any(|i| {
            let row = s.band_row(i);
            (0..BAND_SLOTS).any(|slot| {
                let inside = (i + slot).checked_sub(2).is_some_and(|j| j >= band_first_col(i) && j <= band_last_col(i, n));
                !inside && row[slot] != C::new(0.0, 0.0)
            })
        }) as usize;

        let norm = a.norm_inf();
        let mut bad_rank = false;
        let mut j = 1;
        while 2 * j + 1 < n {
            let (s1, s2) = second_singular_value([
                [a[(2 * j, 2 * j - 1)], a[(2 * j, 2 * j)]],
                [a[(2 * j + 1, 2 * j - 1)], a[(2 * j + 1, 2 * j)]],
            ]);
            worst_rank = worst_rank.max(s2 / (s1 + norm));
            bad_rank |= s2 > 1e2 * EPS * (s1 + norm);
            j += 1;
        }
        rank += bad_rank as usize;

        let u = s.unitary_part();
        let defect = u.matmul(&u.adjoint()).max_abs_diff(&DenseMatrix::identity(n));
        worst_unitary = worst_unitary.max(defect);
        unitary += (defect > 1e2 * EPS * nf) as usize;
        let zw = mx(s.z()) * mx(s.w());
        worst_unitary_scaled = worst_unitary_scaled.max(defect / (1.0 + zw * zw));

        let inv_sigma = s.sigma().inv();
        let fg = mx(s.f()) * mx(s.g()) * inv_sigma.norm();
        let mut bad_upper = false;
        for jj in 1..n / 2 {
            for r in 0..2 * jj {
                for c in 2 * jj + 2..n {
                    let ud = dense[(r, c)] + s.z()[r] * s.w()[c].conj();
                    let want = -inv_sigma * s.f()[r] * s.g()[c].conj();
                    let e = (ud - want).norm() / fg;
                    worst_upper = worst_upper.max(e);
                    bad_upper |= e > 1e2 * EPS * nf;
                }
            }
        }
        upper += bad_upper as usize;
    }
    let failures = staircase + zeros + rank + unitary + upper;
    let mut o = outcome(
        failures == 0 && sweeps == 50,
        format!(
            "{sweeps} sweeps; sweeps violating: staircase {staircase}, profile zeros {zeros}, coupling rank {rank} (worst {worst_rank:.1e}), \
             unitarity {unitary} (worst {worst_unitary:.1e} vs {:.1e}), rank-one upper {upper} (worst {worst_upper:.1e})",
            1e2 * EPS * nf
        ),
    );
    o.info.push(format!(
        "unitarity defect relative to 1 + (|z||w|)^2, the size of the generator cross term: worst {worst_unitary_scaled:.1e}"
    ));
    o
}

fn p1_sweep_times(n: usize) -> (Duration, Duration, usize, f64) {
    let p = gen_p1(n).expect("valid size");
    let mut solver = Solver::new(&p, &SolveOptions::default()).expect("p(0) != 0");
    let mut times = Vec::new();
    let start = Instant::now();
    loop {
        let t = Instant::now();
        match solver.step() {
            Step::Swept => times.push(t.elapsed()),
            Step::Deflated(_) => {}
            Step::Finished => break,
        }
    }
    let total = start.elapsed();
    let residual = solver.roots().iter().map(|z| p.scaled_residual(*z)).fold(0.0, f64::max);
    times.sort();
    (times[times.len() / 2], total, p.degree(), residual)
}

fn linear_cost() -> Outcome {
    let (m512, _, _, _) = p1_sweep_times(256);
    let (m1024, total, degree, r1) = p1_sweep_times(512);
    let ratio = m1024.as_secs_f64() / m512.as_secs_f64();

    let p3 = gen_p3(1024, 0.9).expect("valid parameters");
    let t = Instant::now();
    let sol = solve(&p3, &SolveOptions::default()).expect("valid instance");
    let t3 = t.elapsed();
    let r3 = sol.roots.iter().map(|z| p3.scaled_residual(*z)).fold(0.0, f64::max);

    let bound = |d: usize| 1e3 * d as f64 * EPS;
    let pass = ratio <= 2.5
        && total < Duration::from_secs(60)
        && t3 < Duration::from_secs(60)
        && sol.converged
        && r1 <= bound(degree)
        && r3 <= bound(p3.degree());
    outcome(
        pass,
        format!(
            "median sweep 512 -> 1024: {:.0} us -> {:.0} us (x{ratio:.2}); P1 degree {degree} solve {:.2} s residual {:.1e}; \
             P3 degree {} solve {:.2} s residual {:.1e}; bound 1e3*n*eps = {:.1e}",
            m512.as_secs_f64() * 1e6,
            m1024.as_secs_f64() * 1e6,
            total.as_secs_f64(),
            r1,
            p3.degree(),
            t3.as_secs_f64(),
            r3,
            bound(degree)
        ),
    )
}

fn random_regime() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (set, n) in [(TestSet::P5, 32), (TestSet::P6, 16)] {
        let params = Params { seeds: Some(50), seed: 1, ..Params::default() };
        let rows = bench(set, &[n], &params).expect("valid parameters");
        let r = &rows[0];
        let n3 = (r.degree as f64).powi(3);
        let werr_ok = r.werr <= n3 || r.nne_max.is_infinite();
        pass &= r.converged && r.err <= 0.1 && werr_ok;
        let over: Vec<u64> = (1..=50)
            .filter(|&seed| {
                let (_, run) = run_instance(set, n, seed, &Params::default()).expect("valid parameters");
                run.report.err > 0.1
            })
            .collect();
        lines.push(format!(
            "{} degree {}: converged {}, max err {:.2e} (seeds above 0.1: {over:?}), max werr {:.2e} (n^3 = {n3:.0}), nne/eps {:.1e}..{:.1e}",
            r.test, r.degree, r.converged, r.err, r.werr, r.nne_min, r.nne_max
        ));
    }
    outcome(pass, lines.join("; "))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_cmvroots"))
            .args(["bench", "--set", "P5", "--n", "32", "--seeds", "50", "--seed", "7"])
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let ok = a.status.success() && b.status.success();
    let same = a.stdout == b.stdout;
    outcome(ok && same && !a.stdout.is_empty(), format!("exit ok {ok}, {} bytes, identical {same}", a.stdout.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("structured sweep equals dense step", step_equivalence),
        ("P1 closed-form accuracy", p1_accuracy),
        ("P3 reproduction", p3_reproduction),
        ("P4 small degrees", p4_suite),
        ("werr <= n^3", werr_envelope),
        ("invariants over 50 sweeps", invariant_suite),
        ("linear cost per sweep", linear_cost),
        ("P5/P6 over 50 seeds", random_regime),
        ("deterministic bench output", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {verdict}: {name}: {}", k + 1, o.summary);
        for line in &o.info {
            println!("    info: {line}");
        }
        if !o.pass {
            failed.push(k + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
