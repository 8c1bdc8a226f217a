//! Structured shifted QR iteration in O(n) work per sweep.
//!
//! An iterate `A` is stored as a band (two subdiagonals, three superdiagonals
//! in a fixed six-slot row) plus generators `z, w, f, g` and a scalar `σ`.
//! Entries right of the band profile are `-σ⁻¹ f_i ḡ_j - z_i w̄_j`.
//!
//! A sweep computes `A - ρI = QR` column by column with two-row reflectors,
//! keeping a few rows of `R` in a sliding buffer, then forms `RQ + ρI` on the
//! band only. The generators are multiplied by `Qᴴ`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Float, One, Zero};

use crate::companion::{companion_dense, initial_state};
use crate::dense_oracle::{dense_eigenvalues_seeded, DenseMatrix};
use crate::poly::Polynomial;
use crate::shift::{eig2, wilkinson, ShiftPolicy};
use crate::{Error, Flag, EPS};

type C = Complex64;

/// Slots per band row: column offsets -2..=3 from the diagonal.
pub const BAND_SLOTS: usize = 6;
/// Columns held per row while reducing to triangular form.
const WIDTH: usize = 9;
/// Columns held per row while multiplying back by `Q`.
const BACK: usize = 8;
/// Band entries larger than this multiple of `‖A₀‖_F` mean the representation broke down.
const GROWTH_LIMIT: f64 = 1e2;

/// First column of row `r` that can be nonzero.
pub fn band_first_col(r: usize) -> usize {
    if r.is_multiple_of(2) {
        r.saturating_sub(1)
    } else {
        r - 1 - (r > 1) as usize
    }
}

/// Last column of row `r` held in the band; columns beyond it are rank-two.
pub fn band_last_col(r: usize, n: usize) -> usize {
    (2 * ((r + 2) / 2) + 1).min(n - 1)
}

/// Lowest row that can be nonzero in column `c`.
pub fn last_row_in_col(c: usize, n: usize) -> usize {
    (if c % 2 == 1 { c + 2 } else { c + 1 }).min(n - 1)
}

/// `G = [[γ̄, s], [s̄, -γ]]` acting on rows or columns `k, k + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflector {
    pub k: usize,
    pub gamma: C,
    pub sigma_r: C,
}

impl Reflector {
    /// The reflector with `Gᴴ (x, y) = (ν, 0)`, `ν ≥ 0`; `γ = 1, s = 0` for `(0, 0)`.
    pub fn annihilate(k: usize, x: C, y: C) -> Self {
        Self::annihilate_norm(k, x, y).0
    }

    /// The reflector together with `ν`.
    pub(crate) fn annihilate_norm(k: usize, x: C, y: C) -> (Self, f64) {
        let nu = Float::hypot(x.norm(), y.norm());
        if nu == 0.0 {
            return (Self { k, gamma: C::one(), sigma_r: C::zero() }, nu);
        }
        (Self { k, gamma: x.conj() / nu, sigma_r: y.conj() / nu }, nu)
    }

    /// `[[γ̄, s], [s̄, -γ]]`.
    pub fn core(&self) -> [[C; 2]; 2] {
        [[self.gamma.conj(), self.sigma_r], [self.sigma_r.conj(), -self.gamma]]
    }

    /// `(x, y) ← Gᴴ (x, y)`.
    #[inline]
    pub fn apply_adjoint(&self, x: &mut C, y: &mut C) {
        let (a, b) = (*x, *y);
        *x = self.gamma * a + self.sigma_r * b;
        *y = self.sigma_r.conj() * a - self.gamma.conj() * b;
    }

    /// Row vector `(x, y) ← (x, y) G`.
    #[inline]
    pub fn apply_right(&self, x: &mut C, y: &mut C) {
        let (a, b) = (*x, *y);
        *x = a * self.gamma.conj() + b * self.sigma_r.conj();
        *y = a * self.sigma_r - b * self.gamma;
    }

    fn apply_adjoint_at(&self, v: &mut [C]) {
        let (a, b) = v.split_at_mut(self.k + 1);
        self.apply_adjoint(&mut a[self.k], &mut b[0]);
    }
}

pub fn reflector_annihilate(x: C, y: C) -> Reflector {
    Reflector::annihilate(0, x, y)
}

/// The unitary factor of one sweep: the reflectors in application order
/// followed by a unit phase on the last row of the window.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFactorization {
    pub reflectors: Vec<Reflector>,
    pub tail_phase: C,
    pub lo: usize,
    pub hi: usize,
}

impl SweepFactorization {
    /// `Q` as an `n x n` matrix, identity outside the window.
    pub fn to_dense(&self, n: usize) -> DenseMatrix {
        let mut q = DenseMatrix::identity(n);
        for g in &self.reflectors {
            for i in 0..n {
                let (mut a, mut b) = (q[(i, g.k)], q[(i, g.k + 1)]);
                g.apply_right(&mut a, &mut b);
                q[(i, g.k)] = a;
                q[(i, g.k + 1)] = b;
            }
        }
        for i in 0..n {
            q[(i, self.hi)] *= self.tail_phase;
        }
        q
    }
}

/// O(n) representation of one iterate.
#[derive(Debug, Clone)]
pub struct StructuredState {
    n: usize,
    band: Vec<[C; BAND_SLOTS]>,
    z: Vec<C>,
    w: Vec<C>,
    f: Vec<C>,
    g: Vec<C>,
    sigma: C,
    inv_sigma: C,
    pst: usize,
    qst: usize,
    sweeps: usize,
    scale: f64,
}

impl StructuredState {
    pub(crate) fn from_parts(
        band: Vec<[C; BAND_SLOTS]>,
        z: Vec<C>,
        w: Vec<C>,
        f: Vec<C>,
        g: Vec<C>,
        sigma: C,
        scale: f64,
    ) -> Self {
        Self {
            n: band.len(),
            band,
            z,
            w,
            f,
            g,
            sigma,
            inv_sigma: sigma.inv(),
            pst: 0,
            qst: 0,
            sweeps: 0,
            scale,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Band row `i`, slot `s` holding column `i + s - 2`.
    pub fn band_row(&self, i: usize) -> &[C; BAND_SLOTS] {
        &self.band[i]
    }

    pub fn z(&self) -> &[C] {
        &self.z
    }

    pub fn w(&self) -> &[C] {
        &self.w
    }

    pub fn f(&self) -> &[C] {
        &self.f
    }

    pub fn g(&self) -> &[C] {
        &self.g
    }

    pub fn sigma(&self) -> C {
        self.sigma
    }

    /// Rows deflated at the top.
    pub fn pst(&self) -> usize {
        self.pst
    }

    /// Rows deflated at the bottom.
    pub fn qst(&self) -> usize {
        self.qst
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn window_size(&self) -> usize {
        self.n - self.pst - self.qst
    }

    /// First and last index of the active window; meaningless when it is empty.
    pub fn window(&self) -> (usize, usize) {
        (self.pst, (self.n - 1).saturating_sub(self.qst))
    }

    #[inline]
    fn rank_two(&self, i: usize, j: usize) -> C {
        -(self.f[i] * self.g[j].conj() * self.inv_sigma) - self.z[i] * self.w[j].conj()
    }

    /// Entry `(i, j)` of the iterate, anywhere in the matrix.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> C {
        if j < band_first_col(i) {
            C::zero()
        } else if j <= band_last_col(i, self.n) {
            self.band[i][j + 2 - i]
        } else {
            self.rank_two(i, j)
        }
    }

    /// Entry `(i, j)` with both indices inside the active window.
    pub fn reconstruct_entry(&self, i: usize, j: usize) -> Result<C, Error> {
        let (lo, hi) = self.window();
        if self.window_size() == 0 || i < lo || j < lo || i > hi || j > hi {
            return Err(Error::OutOfWindow { i, j });
        }
        Ok(self.entry(i, j))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j))
    }

    /// The active window as a dense matrix.
    pub fn window_dense(&self) -> DenseMatrix {
        let (lo, hi) = self.window();
        DenseMatrix::from_fn(self.window_size(), self.window_size(), |i, j| {
            debug_assert!(lo + i <= hi);
            self.entry(lo + i, lo + j)
        })
    }

    /// `U = A + z wᴴ`, unitary in exact arithmetic.
    pub fn unitary_part(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j) + self.z[i] * self.w[j].conj())
    }

    fn trailing_block(&self) -> [C; 4] {
        let (_, hi) = self.window();
        [
            self.entry(hi - 1, hi - 1),
            self.entry(hi - 1, hi),
            self.entry(hi, hi - 1),
            self.entry(hi, hi),
        ]
    }

    /// Eigenvalue of the trailing 2x2 block of the window closest to its last entry.
    pub fn wilkinson_shift(&self) -> Result<C, Error> {
        if self.window_size() < 2 {
            return Err(Error::WindowTooSmall { size: self.window_size() });
        }
        let [a, b, c, d] = self.trailing_block();
        Ok(wilkinson(a, b, c, d))
    }

    /// Largest band magnitude in the window rows.
    fn window_band_max(&self) -> f64 {
        let (lo, hi) = self.window();
        self.band[lo..=hi].iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }

    fn window_is_finite(&self) -> bool {
        let (lo, hi) = self.window();
        let fin = |x: &C| x.re.is_finite() && x.im.is_finite();
        self.band[lo..=hi].iter().flatten().all(fin)
            && [&self.z, &self.w, &self.f, &self.g].iter().all(|v| v[lo..=hi].iter().all(fin))
    }

    /// Rows `k+1..=min(k+2, hi)`, columns `max(lo, k-1)..=k` all negligible.
    fn decoupled(&self, k: usize, tol_multiplier: f64) -> bool {
        let (lo, hi) = self.window();
        let mut tol = self.entry(k, k).norm() + self.entry(k + 1, k + 1).norm();
        if tol == 0.0 {
            tol = (k..=k + 1)
                .map(|r| (band_first_col(r).max(lo)..=band_last_col(r, self.n).min(hi)).map(|c| self.entry(r, c).norm()).sum::<f64>())
                .fold(0.0, f64::max);
        }
        tol *= tol_multiplier * EPS;
        (k + 1..=(k + 2).min(hi)).all(|r| (lo.max(k.saturating_sub(1))..=k).all(|c| self.entry(r, c).norm() <= tol))
    }

    fn zero_coupling(&mut self, k: usize) {
        let (lo, hi) = self.window();
        for r in k + 1..=(k + 2).min(hi) {
            for c in lo.max(k.saturating_sub(1)).max(band_first_col(r))..=k {
                self.band[r][c + 2 - r] = C::zero();
            }
        }
    }

    fn block_eigs(&self, lo: usize, hi: usize, out: &mut Vec<C>) {
        if lo == hi {
            out.push(self.entry(lo, lo));
        } else {
            let (l1, l2) = eig2(self.entry(lo, lo), self.entry(lo, hi), self.entry(hi, lo), self.entry(hi, hi));
            out.push(l1);
            out.push(l2);
        }
    }

    /// Splits off decoupled leading and trailing 1x1 and 2x2 blocks, and
    /// finishes windows of size two or less. Returns the eigenvalues found.
    pub fn deflate(&mut self, tol_multiplier: f64) -> Vec<C> {
        let mut out = Vec::new();
        loop {
            let size = self.window_size();
            if size == 0 {
                break;
            }
            let (lo, hi) = self.window();
            if size <= 2 {
                self.block_eigs(lo, hi, &mut out);
                self.qst += size;
                break;
            }
            if self.decoupled(hi - 1, tol_multiplier) {
                self.zero_coupling(hi - 1);
                out.push(self.entry(hi, hi));
                self.qst += 1;
            } else if self.decoupled(hi - 2, tol_multiplier) {
                self.zero_coupling(hi - 2);
                self.block_eigs(hi - 1, hi, &mut out);
                self.qst += 2;
            } else if self.decoupled(lo, tol_multiplier) {
                self.zero_coupling(lo);
                out.push(self.entry(lo, lo));
                self.pst += 1;
            } else if size >= 4 && self.decoupled(lo + 1, tol_multiplier) {
                self.zero_coupling(lo + 1);
                self.block_eigs(lo, lo + 1, &mut out);
                self.pst += 2;
            } else {
                break;
            }
        }
        out
    }

    /// Window row `r` from column `c` on, shifted, in a fresh buffer.
    fn load_row(&self, r: usize, c: usize, shift: C) -> [C; WIDTH] {
        let mut buf = [C::zero(); WIDTH];
        for (t, x) in buf.iter_mut().enumerate() {
            let k = c + t;
            if k >= self.n {
                break;
            }
            *x = self.entry(r, k);
            if k == r {
                *x -= shift;
            }
        }
        buf
    }

    /// One explicit shifted QR step `A ← Qᴴ A Q` on the active window.
    ///
    /// On a non-finite intermediate the state is left as it was.
    pub fn qr_sweep(&mut self, shift: C) -> Result<SweepFactorization, Error> {
        let m = self.window_size();
        if m < 3 {
            return Err(Error::WindowTooSmall { size: m });
        }
        let n = self.n;
        let (lo, hi) = self.window();
        let saved_z = self.z[lo..=hi].to_vec();
        let saved_f = self.f[lo..=hi].to_vec();

        // Reduce A - ρI to R, keeping R(i, i..i+6) for every window row.
        let mut rots: Vec<Reflector> = Vec::with_capacity(3 * m / 2 + 1);
        let mut col_start: Vec<usize> = Vec::with_capacity(m);
        let mut tri = vec![[C::zero(); BAND_SLOTS]; m];
        let mut rows: Vec<(usize, [C; WIDTH])> = Vec::with_capacity(4);
        for c in lo..hi {
            let bot = last_row_in_col(c, n).min(hi);
            let next = rows.last().map_or(c, |r| r.0 + 1);
            for r in next..=bot {
                rows.push((r, self.load_row(r, c, shift)));
            }
            col_start.push(rots.len());
            for r in (c..bot).rev() {
                let k = r - c;
                let (g, nu) = Reflector::annihilate_norm(r, rows[k].1[0], rows[k + 1].1[0]);
                let (upper, lower) = rows.split_at_mut(k + 1);
                for (x, y) in upper[k].1.iter_mut().zip(lower[0].1.iter_mut()).skip(1) {
                    g.apply_adjoint(x, y);
                }
                upper[k].1[0] = C::new(nu, 0.0);
                lower[0].1[0] = C::zero();
                g.apply_adjoint_at(&mut self.z);
                g.apply_adjoint_at(&mut self.f);
                rots.push(g);
            }
            let (_, done) = rows.remove(0);
            tri[c - lo].copy_from_slice(&done[..BAND_SLOTS]);
            let k = c + WIDTH;
            for (r, buf) in rows.iter_mut() {
                buf.copy_within(1.., 0);
                buf[WIDTH - 1] = if k < n { self.rank_two(*r, k) } else { C::zero() };
            }
        }
        let (_, mut last) = rows.pop().expect("last window row");
        let d = last[0];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C::one() };
        let phc = ph.conj();
        for x in last.iter_mut() {
            *x *= phc;
        }
        last[0] = C::new(d.norm(), 0.0);
        self.z[hi] *= phc;
        self.f[hi] *= phc;
        tri[m - 1].copy_from_slice(&last[..BAND_SLOTS]);

        let fin = |x: &C| x.re.is_finite() && x.im.is_finite();
        if !(fin(&ph)
            && tri.iter().flatten().all(fin)
            && self.z[lo..=hi].iter().chain(&self.f[lo..=hi]).all(fin))
        {
            self.z[lo..=hi].copy_from_slice(&saved_z);
            self.f[lo..=hi].copy_from_slice(&saved_f);
            return Err(Error::NonFinite);
        }

        // Rows just above the window keep band entries in window columns.
        let mut above: Vec<(usize, [C; BACK])> = Vec::new();
        for r in lo.saturating_sub(3)..lo {
            if band_last_col(r, n) >= lo {
                let mut buf = [C::zero(); BACK];
                for (t, x) in buf.iter_mut().enumerate() {
                    if lo + t < n {
                        *x = self.entry(r, lo + t);
                    }
                }
                above.push((r, buf));
            }
        }

        // Multiply back by Q on the band only.
        let multiply_q = |buf: &mut [C; BACK], base: isize, first: isize, last: usize| {
            let c0 = first.max(lo as isize) as usize;
            let c1 = last.min(hi - 1);
            if c0 <= c1 {
                let end = col_start.get(c1 + 1 - lo).copied().unwrap_or(rots.len());
                for g in &rots[col_start[c0 - lo]..end] {
                    let t = g.k as isize - base;
                    if t >= 0 && t + 1 < BACK as isize {
                        let t = t as usize;
                        let (a, b) = buf.split_at_mut(t + 1);
                        g.apply_right(&mut a[t], &mut b[0]);
                    }
                }
            }
            let t = hi as isize - base;
            if t >= 0 && t < BACK as isize {
                buf[t as usize] *= ph;
            }
        };
        for i in lo..=hi {
            // buf[t] holds column i - 2 + t.
            let mut buf = [C::zero(); BACK];
            buf[2..].copy_from_slice(&tri[i - lo]);
            let last = band_last_col(i, n);
            multiply_q(&mut buf, i as isize - 2, i as isize - 3, last);
            for j in lo.max(band_first_col(i))..=last {
                let mut v = buf[j + 2 - i];
                if j == i {
                    v += shift;
                }
                self.band[i][j + 2 - i] = v;
            }
        }
        for (r, mut buf) in above {
            let last = band_last_col(r, n);
            multiply_q(&mut buf, lo as isize, lo as isize, last);
            for j in lo..=last {
                self.band[r][j + 2 - r] = buf[j - lo];
            }
        }

        for g in &rots {
            g.apply_adjoint_at(&mut self.w);
            g.apply_adjoint_at(&mut self.g);
        }
        self.w[hi] *= phc;
        self.g[hi] *= phc;
        self.sweeps += 1;
        Ok(SweepFactorization { reflectors: rots, tail_phase: ph, lo, hi })
    }

    /// Band or generators grew far beyond what a unitary similarity allows.
    fn broken(&self) -> bool {
        !self.window_is_finite() || self.window_band_max() > GROWTH_LIMIT * self.scale
    }
}

/// Knobs for [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Sweep budget; `None` means `30 n`.
    pub max_sweeps: Option<usize>,
    /// Scales the deflation tolerance.
    pub tol_multiplier: f64,
    /// Finish on the dense oracle after a breakdown instead of giving up.
    pub fallback: bool,
    /// Seed of the random exceptional shifts.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { max_sweeps: None, tol_multiplier: 1.0, fallback: true, seed: crate::dense_oracle::DEFAULT_SEED }
    }
}

impl SolveOptions {
    fn budget(&self, n: usize) -> usize {
        self.max_sweeps.unwrap_or(30 * n)
    }

    fn check(&self) -> Result<(), Error> {
        if self.tol_multiplier > 0.0 && self.tol_multiplier.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter("deflation tolerance multiplier must be positive"))
        }
    }
}

/// Roots and iteration statistics of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub roots: Vec<C>,
    pub sweeps: usize,
    pub converged: bool,
    pub flags: Vec<Flag>,
}

impl Solution {
    /// Sweeps per root.
    pub fn averit(&self) -> f64 {
        if self.roots.is_empty() {
            0.0
        } else {
            self.sweeps as f64 / self.roots.len() as f64
        }
    }
}

/// What one call of [`Solver::step`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// This many eigenvalues were split off.
    Deflated(usize),
    /// One structured sweep.
    Swept,
    /// The window is empty.
    Finished,
}

/// Shift, sweep and deflate loop over a [`StructuredState`], one step at a time.
#[derive(Debug, Clone)]
pub struct Solver {
    poly: Polynomial,
    state: StructuredState,
    policy: ShiftPolicy,
    opts: SolveOptions,
    roots: Vec<C>,
    extra_sweeps: usize,
    converged: bool,
    flags: Vec<Flag>,
    last_shift: Option<C>,
    last_sweep: Option<SweepFactorization>,
}

impl Solver {
    /// Needs `p(0) != 0` and degree at least 4.
    pub fn new(p: &Polynomial, opts: &SolveOptions) -> Result<Self, Error> {
        opts.check()?;
        let state = initial_state(p)?;
        let n = state.n();
        Ok(Self {
            poly: p.clone(),
            state,
            policy: ShiftPolicy::new(n, opts.seed),
            opts: opts.clone(),
            roots: Vec::with_capacity(n),
            extra_sweeps: 0,
            converged: true,
            flags: Vec::new(),
            last_shift: None,
            last_sweep: None,
        })
    }

    pub fn state(&self) -> &StructuredState {
        &self.state
    }

    pub fn roots(&self) -> &[C] {
        &self.roots
    }

    /// Shift of the most recent sweep.
    pub fn last_shift(&self) -> Option<C> {
        self.last_shift
    }

    /// Unitary factor of the most recent sweep.
    pub fn last_sweep(&self) -> Option<&SweepFactorization> {
        self.last_sweep.as_ref()
    }

    pub fn step(&mut self) -> Step {
        if self.state.window_size() == 0 {
            return Step::Finished;
        }
        let found = self.state.deflate(self.opts.tol_multiplier);
        if !found.is_empty() {
            self.policy.deflated();
            self.roots.extend_from_slice(&found);
            return Step::Deflated(found.len());
        }
        if self.state.sweeps >= self.opts.budget(self.state.n) {
            self.give_up();
            return Step::Deflated(self.roots.len());
        }
        let [a, b, c, d] = self.state.trailing_block();
        let shift = self.policy.next(a, b, c, d);
        self.last_shift = Some(shift);
        match self.state.qr_sweep(shift) {
            Ok(q) if !self.state.broken() => {
                self.last_sweep = Some(q);
                Step::Swept
            }
            Ok(_) => {
                self.restart_dense();
                Step::Finished
            }
            Err(_) => {
                let before = self.roots.len();
                self.finish_window_dense();
                Step::Deflated(self.roots.len() - before)
            }
        }
    }

    /// Reports the unconverged diagonal and empties the window.
    fn give_up(&mut self) {
        let (lo, hi) = self.state.window();
        self.roots.extend((lo..=hi).map(|i| self.state.entry(i, i)));
        self.state.qst = self.state.n - self.state.pst;
        self.converged = false;
        self.flags.push(Flag::NonConvergence);
    }

    /// After a non-finite value the pre-sweep window is still intact.
    fn finish_window_dense(&mut self) {
        if !self.opts.fallback {
            self.give_up();
            return;
        }
        let block = self.state.window_dense();
        let budget = 30 * block.rows();
        let e = dense_eigenvalues_seeded(&block, budget, self.opts.seed, self.opts.tol_multiplier);
        self.extra_sweeps += e.sweeps;
        self.converged &= e.converged;
        self.roots.extend(e.values);
        self.state.qst = self.state.n - self.state.pst;
        self.flags.push(Flag::DenseFallback);
    }

    /// After gross growth nothing in the state can be trusted: start over densely.
    fn restart_dense(&mut self) {
        if !self.opts.fallback {
            self.give_up();
            return;
        }
        let c = companion_dense(&self.poly).expect("validated polynomial");
        let n = c.rows();
        let e = dense_eigenvalues_seeded(&c, 30 * n, self.opts.seed, self.opts.tol_multiplier);
        self.extra_sweeps += e.sweeps;
        self.converged = e.converged;
        self.roots = e.values;
        self.state.qst = self.state.n - self.state.pst;
        self.flags.push(Flag::DenseFallback);
    }

    pub fn run(mut self) -> Solution {
        while self.step() != Step::Finished {}
        if self.policy.exceptional > 0 {
            self.flags.push(Flag::ExceptionalShifts(self.policy.exceptional));
        }
        Solution {
            roots: self.roots,
            sweeps: self.state.sweeps + self.extra_sweeps,
            converged: self.converged,
            flags: self.flags,
        }
    }
}

/// All roots of `p`: zero roots split off, degree ≤ 4 dense, the rest structured.
pub fn solve(p: &Polynomial, opts: &SolveOptions) -> Result<Solution, Error> {
    opts.check()?;
    let (rest, zeros) = p.strip_zero_roots();
    let mut sol = match rest {
        None => Solution { roots: Vec::new(), sweeps: 0, converged: true, flags: Vec::new() },
        Some(q) if q.degree() <= 4 => {
            let c = companion_dense(&q)?;
            let e = dense_eigenvalues_seeded(&c, opts.budget(q.degree()), opts.seed, opts.tol_multiplier);
            let mut flags = vec![Flag::SmallDegree];
            if !e.converged {
                flags.push(Flag::NonConvergence);
            }
            Solution { roots: e.values, sweeps: e.sweeps, converged: e.converged, flags }
        }
        Some(q) => Solver::new(&q, opts)?.run(),
    };
    if zeros > 0 {
        let mut roots = vec![C::zero(); zeros];
        roots.append(&mut sol.roots);
        sol.roots = roots;
        sol.flags.insert(0, Flag::ZeroRoots(zeros));
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense_oracle::qr_step_window;
    use crate::poly::{gen_p1, gen_p5, p1_roots};

    fn r(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn profile_helpers() {
        // 1-based: rows 1,2 start at column 1; row 3 at 1; row 4 at 3; row 5 at 3.
        let first: Vec<usize> = (0..8).map(band_first_col).collect();
        assert_eq!(first, [0, 0, 1, 1, 3, 3, 5, 5]);
        let last: Vec<usize> = (0..8).map(|r| band_last_col(r, 20)).collect();
        assert_eq!(last, [3, 3, 5, 5, 7, 7, 9, 9]);
        let low: Vec<usize> = (0..8).map(|c| last_row_in_col(c, 20)).collect();
        assert_eq!(low, [1, 3, 3, 5, 5, 7, 7, 9]);
        assert_eq!(band_last_col(18, 20), 19);
        assert_eq!(last_row_in_col(19, 20), 19);
    }

    #[test]
    fn reflector_examples() {
        let g = reflector_annihilate(r(1.0), r(0.0));
        assert_eq!((g.gamma.conj(), g.sigma_r), (r(1.0), r(0.0)));
        let g = reflector_annihilate(r(0.0), r(1.0));
        let core = g.core();
        assert_eq!(core[0][0], r(0.0));
        assert_eq!(core[0][1], r(1.0));
        assert_eq!(core[1][0], r(1.0));
        let (mut x, mut y) = (r(3.0), r(4.0));
        reflector_annihilate(x, y).apply_adjoint(&mut x, &mut y);
        assert!((x - r(5.0)).norm() < 1e-15 && y.norm() < 1e-15);
        let g = reflector_annihilate(r(0.0), r(0.0));
        assert_eq!((g.gamma, g.sigma_r), (r(1.0), r(0.0)));
    }

    #[test]
    fn reflector_is_unitary_and_annihilates() {
        let (x, y) = (C::new(0.3, -1.2), C::new(-2.0, 0.7));
        let g = reflector_annihilate(x, y);
        assert!((g.gamma.norm_sqr() + g.sigma_r.norm_sqr() - 1.0).abs() < 1e-15);
        let m = g.core();
        for i in 0..2 {
            for j in 0..2 {
                let s: C = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((s - r(want)).norm() < 1e-15);
            }
        }
        let (mut a, mut b) = (x, y);
        g.apply_adjoint(&mut a, &mut b);
        assert!(b.norm() < 1e-15 && a.im == 0.0);
        assert!((a.re - Float::hypot(x.norm(), y.norm())).abs() < 1e-15);
    }

    #[test]
    fn three_by_three_factor_triangularizes() {
        // Reflectors on rows (2,3), (1,2), then (2,3) again, as one sweep uses them.
        let b = [[r(1.0), r(2.0), r(0.5)], [C::new(0.0, 1.0), r(-1.0), r(3.0)], [r(2.0), r(0.25), r(1.0)]];
        let mut a = b;
        let mut gs = Vec::new();
        for (k, col) in [(1usize, 0usize), (0, 0), (1, 1)] {
            let g = Reflector::annihilate(k, a[k][col], a[k + 1][col]);
            for j in 0..3 {
                let (mut x, mut y) = (a[k][j], a[k + 1][j]);
                g.apply_adjoint(&mut x, &mut y);
                a[k][j] = x;
                a[k + 1][j] = y;
            }
            gs.push(g);
        }
        assert!(a[1][0].norm() < 1e-15 && a[2][0].norm() < 1e-15 && a[2][1].norm() < 1e-15);
        assert_eq!(gs.iter().map(|g| g.k).collect::<Vec<_>>(), [1, 0, 1]);
    }

    #[test]
    fn sweep_matches_dense_step() {
        let mx = |v: &[C]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);
        for n in [5usize, 6, 9, 12] {
            let p = gen_p5(n, 7 + n as u64).unwrap();
            let mut s = initial_state(&p).unwrap();
            for t in 0..6 {
                let shift = if t < 2 { C::zero() } else { s.wilkinson_shift().unwrap() };
                let mut d = s.to_dense();
                // Rounding in the generators is relative to their own size.
                let scale = d.norm_inf() + mx(s.f()) * mx(s.g()) / s.sigma().norm() + mx(s.z()) * mx(s.w());
                s.qr_sweep(shift).unwrap();
                qr_step_window(&mut d, 0, n - 1, shift);
                let err = s.to_dense().max_abs_diff(&d);
                assert!(err <= 1e-12 * scale, "n={n} sweep={t} err={err}");
            }
        }
        // Unimodular coefficients keep the generators of unit size.
        let p = gen_p1(6).unwrap();
        let mut s = initial_state(&p).unwrap();
        for t in 0..5 {
            let shift = if t == 0 { C::zero() } else { s.wilkinson_shift().unwrap() };
            let mut d = s.to_dense();
            s.qr_sweep(shift).unwrap();
            qr_step_window(&mut d, 0, 11, shift);
            assert!(s.to_dense().max_abs_diff(&d) <= 1e-12 * d.norm_inf(), "sweep={t}");
        }
    }

    fn poly_from_roots(roots: &[C]) -> Polynomial {
        let mut c = vec![C::one()];
        for &r in roots {
            let mut next = vec![C::zero(); c.len() + 1];
            for (j, &x) in c.iter().enumerate() {
                next[j + 1] += x;
                next[j] -= r * x;
            }
            c = next;
        }
        Polynomial::new(c).unwrap()
    }

    #[test]
    fn exact_shift_deflates() {
        // (z-2)(z+1)(z-1)(z+3)(z²+z+3): integer coefficients, so 2 is an exact root.
        let mut p = poly_from_roots(&[r(2.0), r(-1.0), r(1.0), r(-3.0)]).coeffs().to_vec();
        p = (0..p.len() + 2)
            .map(|k| {
                let at = |j: usize| if j < p.len() { p[j] } else { C::zero() };
                at(k.wrapping_sub(2)) + at(k.wrapping_sub(1)) + at(k) * 3.0
            })
            .collect();
        let p = Polynomial::new(p).unwrap();
        assert!(p.coeffs().iter().all(|c| c.im == 0.0 && c.re.fract() == 0.0));
        let mut s = initial_state(&p).unwrap();
        s.qr_sweep(r(2.0)).unwrap();
        let a = s.to_dense();
        let norm = a.norm_inf();
        for c in 0..5 {
            assert!(a[(5, c)].norm() <= 1e2 * EPS * norm, "coupling {}", a[(5, c)].norm());
        }
        assert!((a[(5, 5)] - r(2.0)).norm() <= 1e2 * EPS * norm);
    }

    #[test]
    fn deflation_examples() {
        let p = gen_p5(8, 1).unwrap();
        let mut s = initial_state(&p).unwrap();
        for _ in 0..3 {
            s.qr_sweep(C::new(0.3, 0.1)).unwrap();
        }
        let base = s.clone();
        for c in 5..7 {
            s.band[7][c + 2 - 7] = C::zero();
        }
        let out = s.deflate(1.0);
        assert_eq!(out, [s.entry(7, 7)]);
        assert_eq!(s.qst(), 1);

        let mut s = base;
        for (rr, cc) in [(6usize, 4usize), (6, 5), (7, 5)] {
            s.band[rr][cc + 2 - rr] = C::zero();
        }
        let want = eig2(s.entry(6, 6), s.entry(6, 7), s.entry(7, 6), s.entry(7, 7));
        let out = s.deflate(1.0);
        assert_eq!(out, [want.0, want.1]);
        assert_eq!(s.qst(), 2);
    }

    #[test]
    fn p1_degree_eight() {
        let p = gen_p1(4).unwrap();
        let sol = solve(&p, &SolveOptions::default()).unwrap();
        assert!(sol.converged);
        for z in p1_roots(4) {
            let d = sol.roots.iter().map(|x| (x - z).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-12, "{d}");
        }
    }

    #[test]
    fn residual_example_and_zero_roots() {
        let p = Polynomial::from_real(&[2.0, -3.0, 0.0, 0.0, 4.0, 1.0]).unwrap();
        let sol = solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(sol.roots.len(), 5);
        for z in &sol.roots {
            assert!(p.scaled_residual(*z) <= 1e3 * 5.0 * EPS);
        }
        let p = Polynomial::from_real(&[0.0, 0.0, 2.0, -3.0, 0.0, 0.0, 4.0, 1.0]).unwrap();
        let sol = solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(sol.roots.len(), 7);
        assert_eq!(&sol.roots[..2], &[C::zero(), C::zero()]);
        assert_eq!(sol.flags[0], Flag::ZeroRoots(2));
        let sol = solve(&Polynomial::from_real(&[0.0, 0.0, 1.0]).unwrap(), &SolveOptions::default()).unwrap();
        assert_eq!(sol.roots, [C::zero(), C::zero()]);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let p = gen_p1(16).unwrap();
        let opts = SolveOptions { max_sweeps: Some(3), ..SolveOptions::default() };
        let sol = solve(&p, &opts).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.roots.len(), 32);
        assert!(sol.flags.contains(&Flag::NonConvergence));
        assert!(solve(&p, &SolveOptions { tol_multiplier: 0.0, ..SolveOptions::default() }).is_err());
    }

    #[test]
    fn window_checks() {
        let s = initial_state(&gen_p5(6, 2).unwrap()).unwrap();
        assert!(s.reconstruct_entry(0, 5).is_ok());
        assert_eq!(s.reconstruct_entry(6, 0), Err(Error::OutOfWindow { i: 6, j: 0 }));
    }
}
