//! Number formatting and CSV writers.

use std::io::Write;

use cmvroots::Complex64;

use crate::bench::BenchRow;

/// 17 significant digits, enough to read back the identical `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_roots_csv<W: Write>(out: W, roots: &[Complex64]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re", "im"])?;
    for z in roots {
        w.write_record([num(z.re), num(z.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_bench_csv<W: Write>(out: W, rows: &[BenchRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["test", "n", "nne_over_eps", "err", "werr", "averit"])?;
    for r in rows {
        let nne = if r.nne_min == r.nne_max || r.nne_min.is_nan() {
            num(r.nne_max)
        } else {
            format!("{}/{}", num(r.nne_min), num(r.nne_max))
        };
        w.write_record([r.test.clone(), r.degree.to_string(), nne, num(r.err), num(r.werr), num(r.averit)])?;
    }
    w.flush()?;
    Ok(())
}

/// Which solver produced a root in a comparison file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Fast,
    Reference,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Fast => "fast",
            Source::Reference => "reference",
        }
    }
}

pub fn write_compare_csv<W: Write>(out: W, fast: &[Complex64], reference: &[Complex64]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re", "im", "source"])?;
    for (roots, src) in [(fast, Source::Fast), (reference, Source::Reference)] {
        for z in roots {
            w.write_record([num(z.re), num(z.im), src.name().to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
