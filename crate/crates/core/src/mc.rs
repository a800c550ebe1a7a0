//! Exact event-driven Monte Carlo for the telegraph and planar strip motions.
//!
//! Path `k` of a run with seed `s` draws from ChaCha8 seeded with `s` on
//! stream `k`, so any path can be regenerated alone and parallel runs are
//! bit-identical to serial ones.

use std::io::{self, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::error::{check_range, Error, Result};
use crate::format::g17;
use crate::model::{
    validate_interval_start, validate_strip_start, Direction1D, Direction2D, DriftTelegraphParams,
    Interval, PlanarStripProblem,
};
use crate::strip::DensityProfile;

/// Direction changes allowed before a path is declared divergent.
pub const MAX_EVENTS: u64 = 1_000_000_000;

/// Paths per reduction block; blocks are merged in index order.
const BLOCK: u64 = 1024;

/// Tolerance for recognising a no-switch exit straight below the start.
pub const ATOM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start<D> {
    Fixed(D),
    /// Each direction with equal probability.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalSide {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripSide {
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitRecord {
    pub side: IntervalSide,
    pub exit_point: f64,
    pub time: f64,
    pub switches: u64,
    pub initial: Direction1D,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarExitRecord {
    pub side: StripSide,
    pub exit_abscissa: f64,
    pub time: f64,
    pub switches: u64,
    pub initial: Direction2D,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n_paths)`.
    pub std_error: f64,
    pub n_paths: u64,
    pub seed: u64,
}

impl MCEstimate {
    /// `(mean - reference) / std_error`; zero when both the error and the
    /// difference vanish, infinite when only the error does.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean - reference;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff.abs() <= 1e-12 * reference.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }
}

pub fn path_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

fn holding_time(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    if rate == 0.0 {
        return f64::INFINITY;
    }
    let e: f64 = rng.sample(Exp1);
    e / rate
}

/// Simulates one path of the (possibly asymmetric) telegraph process on `iv`.
pub fn simulate_telegraph(
    p: impl Into<DriftTelegraphParams>,
    iv: Interval,
    x0: f64,
    start: Start<Direction1D>,
    seed: u64,
    path_index: u64,
) -> Result<ExitRecord> {
    validate_interval_start(iv, x0)?;
    run_telegraph(&p.into(), iv, x0, start, &mut path_rng(seed, path_index))
}

fn run_telegraph(
    p: &DriftTelegraphParams,
    iv: Interval,
    x0: f64,
    start: Start<Direction1D>,
    rng: &mut ChaCha8Rng,
) -> Result<ExitRecord> {
    let initial = match start {
        Start::Fixed(d) => d,
        Start::Uniform => {
            if rng.random::<bool>() {
                Direction1D::D1
            } else {
                Direction1D::D0
            }
        }
    };
    let (mut x, mut d, mut t, mut switches) = (x0, initial, 0.0, 0u64);
    loop {
        let c = p.speed(d);
        let gap = match d {
            Direction1D::D0 => iv.b() - x,
            Direction1D::D1 => x - iv.a(),
        };
        let to_exit = gap / c;
        let hold = holding_time(rng, p.rate(d));
        if hold >= to_exit {
            let (side, exit_point) = match d {
                Direction1D::D0 => (IntervalSide::Upper, iv.b()),
                Direction1D::D1 => (IntervalSide::Lower, iv.a()),
            };
            return Ok(ExitRecord {
                side,
                exit_point,
                time: t + to_exit,
                switches,
                initial,
            });
        }
        x = match d {
            Direction1D::D0 => (x + c * hold).min(iv.b()),
            Direction1D::D1 => (x - c * hold).max(iv.a()),
        };
        t += hold;
        d = d.reversed();
        switches += 1;
        if switches >= MAX_EVENTS {
            return Err(Error::SimulationDiverged { events: switches });
        }
    }
}

/// Simulates one path of the orthogonal planar motion started at `(x0, y0)`
/// until it leaves the strip.
pub fn simulate_planar_strip(
    prob: PlanarStripProblem,
    x0: f64,
    y0: f64,
    start: Start<Direction2D>,
    seed: u64,
    path_index: u64,
) -> Result<PlanarExitRecord> {
    validate_strip_start(prob, y0)?;
    check_range("x", x0, f64::MIN, f64::MAX)?;
    run_planar(prob, x0, y0, start, &mut path_rng(seed, path_index))
}

fn run_planar(
    prob: PlanarStripProblem,
    x0: f64,
    y0: f64,
    start: Start<Direction2D>,
    rng: &mut ChaCha8Rng,
) -> Result<PlanarExitRecord> {
    let (c, lambda, l) = (prob.c(), prob.lambda(), prob.height());
    let initial = match start {
        Start::Fixed(d) => d,
        Start::Uniform => Direction2D::ALL[rng.random_range(0..4)],
    };
    let (mut x, mut y, mut d, mut t, mut switches) = (x0, y0, initial, 0.0, 0u64);
    loop {
        let hold = holding_time(rng, lambda);
        match d {
            Direction2D::D0 => x += c * hold,
            Direction2D::D2 => x -= c * hold,
            Direction2D::D1 | Direction2D::D3 => {
                let gap = if d == Direction2D::D1 { l - y } else { y };
                let to_exit = gap / c;
                if hold >= to_exit {
                    let side = if d == Direction2D::D1 {
                        StripSide::Top
                    } else {
                        StripSide::Bottom
                    };
                    return Ok(PlanarExitRecord {
                        side,
                        exit_abscissa: x,
                        time: t + to_exit,
                        switches,
                        initial,
                    });
                }
                y = if d == Direction2D::D1 {
                    (y + c * hold).min(l)
                } else {
                    (y - c * hold).max(0.0)
                };
            }
        }
        t += hold;
        d = if rng.random::<bool>() {
            d.ccw()
        } else {
            d.cw()
        };
        switches += 1;
        if switches >= MAX_EVENTS {
            return Err(Error::SimulationDiverged { events: switches });
        }
    }
}

/// A configured simulator whose paths are indexed by `(seed, path_index)`.
pub trait PathSimulator: Sync {
    type Record: Send;
    fn simulate_path(&self, seed: u64, path_index: u64) -> Result<Self::Record>;
}

#[derive(Debug, Clone, Copy)]
pub struct TelegraphSim {
    params: DriftTelegraphParams,
    iv: Interval,
    x0: f64,
    start: Start<Direction1D>,
}

impl TelegraphSim {
    pub fn new(
        params: impl Into<DriftTelegraphParams>,
        iv: Interval,
        x0: f64,
        start: Start<Direction1D>,
    ) -> Result<Self> {
        validate_interval_start(iv, x0)?;
        Ok(Self {
            params: params.into(),
            iv,
            x0,
            start,
        })
    }
}

impl PathSimulator for TelegraphSim {
    type Record = ExitRecord;
    fn simulate_path(&self, seed: u64, path_index: u64) -> Result<ExitRecord> {
        run_telegraph(
            &self.params,
            self.iv,
            self.x0,
            self.start,
            &mut path_rng(seed, path_index),
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StripSim {
    prob: PlanarStripProblem,
    x0: f64,
    y0: f64,
    start: Start<Direction2D>,
}

impl StripSim {
    pub fn new(
        prob: PlanarStripProblem,
        x0: f64,
        y0: f64,
        start: Start<Direction2D>,
    ) -> Result<Self> {
        validate_strip_start(prob, y0)?;
        check_range("x", x0, f64::MIN, f64::MAX)?;
        Ok(Self {
            prob,
            x0,
            y0,
            start,
        })
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.x0, self.y0)
    }
}

impl PathSimulator for StripSim {
    type Record = PlanarExitRecord;
    fn simulate_path(&self, seed: u64, path_index: u64) -> Result<PlanarExitRecord> {
        run_planar(
            self.prob,
            self.x0,
            self.y0,
            self.start,
            &mut path_rng(seed, path_index),
        )
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        self.mean += delta * o.n as f64 / n as f64;
        self.m2 += o.m2 + delta * delta * (self.n as f64 * o.n as f64 / n as f64);
        self.n = n;
    }
}

fn block_ranges(n_paths: u64) -> impl IndexedParallelIterator<Item = std::ops::Range<u64>> {
    let blocks = n_paths.div_ceil(BLOCK) as usize;
    (0..blocks).into_par_iter().map(move |b| {
        let b = b as u64;
        b * BLOCK..((b + 1) * BLOCK).min(n_paths)
    })
}

/// A per-path quantity averaged by [`estimate_many`].
pub type Statistic<'a, R> = &'a (dyn Fn(&R) -> f64 + Sync);

/// Estimates the mean of `statistic` over `n_paths` independent paths.
pub fn estimate<S, F>(sim: &S, statistic: F, n_paths: u64, seed: u64) -> Result<MCEstimate>
where
    S: PathSimulator,
    F: Fn(&S::Record) -> f64 + Sync,
{
    let stats: [Statistic<S::Record>; 1] = [&statistic];
    Ok(estimate_many(sim, &stats, n_paths, seed)?[0])
}

/// Estimates several statistics from one shared set of paths.
pub fn estimate_many<S>(
    sim: &S,
    statistics: &[Statistic<S::Record>],
    n_paths: u64,
    seed: u64,
) -> Result<Vec<MCEstimate>>
where
    S: PathSimulator,
{
    if n_paths < 2 {
        return Err(Error::InvalidParameter {
            name: "n_paths",
            value: n_paths as f64,
        });
    }
    let blocks: Vec<Vec<Moments>> = block_ranges(n_paths)
        .map(|range| {
            let mut acc = vec![Moments::default(); statistics.len()];
            for k in range {
                let rec = sim.simulate_path(seed, k)?;
                for (m, f) in acc.iter_mut().zip(statistics) {
                    m.push(f(&rec));
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![Moments::default(); statistics.len()];
    for block in &blocks {
        for (t, m) in total.iter_mut().zip(block) {
            t.merge(m);
        }
    }
    Ok(total
        .iter()
        .map(|m| {
            let var = m.m2 / (m.n - 1) as f64;
            MCEstimate {
                mean: m.mean,
                std_error: (var.max(0.0) / m.n as f64).sqrt(),
                n_paths: m.n,
                seed,
            }
        })
        .collect())
}

/// All records of a run, in path order.
pub fn simulate_records<S: PathSimulator>(
    sim: &S,
    n_paths: u64,
    seed: u64,
) -> Result<Vec<S::Record>> {
    let blocks: Vec<Vec<S::Record>> = block_ranges(n_paths)
        .map(|range| {
            range
                .map(|k| sim.simulate_path(seed, k))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

/// Row view used by the per-path CSV export.
pub trait PathRow {
    fn side_label(&self) -> &'static str;
    fn exit_z(&self) -> f64;
    fn time(&self) -> f64;
    fn switches(&self) -> u64;
}

impl PathRow for ExitRecord {
    fn side_label(&self) -> &'static str {
        match self.side {
            IntervalSide::Lower => "lower",
            IntervalSide::Upper => "upper",
        }
    }
    fn exit_z(&self) -> f64 {
        self.exit_point
    }
    fn time(&self) -> f64 {
        self.time
    }
    fn switches(&self) -> u64 {
        self.switches
    }
}

impl PathRow for PlanarExitRecord {
    fn side_label(&self) -> &'static str {
        match self.side {
            StripSide::Bottom => "bottom",
            StripSide::Top => "top",
        }
    }
    fn exit_z(&self) -> f64 {
        self.exit_abscissa
    }
    fn time(&self) -> f64 {
        self.time
    }
    fn switches(&self) -> u64 {
        self.switches
    }
}

pub const PATH_CSV_HEADER: &str = "path,side,exit_z,time,switches";

pub fn write_path_csv<W: Write, R: PathRow>(mut out: W, records: &[R]) -> io::Result<()> {
    writeln!(out, "{PATH_CSV_HEADER}")?;
    for (k, r) in records.iter().enumerate() {
        writeln!(
            out,
            "{k},{},{},{},{}",
            r.side_label(),
            g17(r.exit_z()),
            g17(r.time()),
            r.switches()
        )?;
    }
    out.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KdeOptions {
    /// `None` selects Silverman's rule on the continuous subsample.
    pub bandwidth: Option<f64>,
    /// Smooth `z < x0` and `z > x0` separately, reflecting at `x0`, so a jump
    /// of the density at the starting abscissa is not blurred.
    pub split_at_origin: bool,
}

/// `0.9 min(sd, iqr/1.34) n^{-1/5}`; `sorted` must be ascending.
pub fn silverman_bandwidth(sorted: &[f64]) -> Result<f64> {
    let n = sorted.len();
    if n < 2 {
        return Err(Error::EmptySample);
    }
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let var = sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let q = |p: f64| {
        let pos = p * (n - 1) as f64;
        let i = pos.floor() as usize;
        let f = pos - i as f64;
        sorted[i] + f * (sorted[(i + 1).min(n - 1)] - sorted[i])
    };
    let iqr = q(0.75) - q(0.25);
    let spread = if iqr > 0.0 {
        var.sqrt().min(iqr / 1.34)
    } else {
        var.sqrt()
    };
    if !(spread > 0.0) {
        return Err(Error::EmptySample);
    }
    Ok(0.9 * spread * (n as f64).powf(-0.2))
}

fn gaussian_sum(sorted: &[f64], z: f64, h: f64) -> f64 {
    let lo = sorted.partition_point(|&v| v < z - 9.0 * h);
    let hi = sorted.partition_point(|&v| v <= z + 9.0 * h);
    sorted[lo..hi]
        .iter()
        .map(|&v| (-0.5 * ((z - v) / h).powi(2)).exp())
        .sum()
}

/// Kernel estimate of the exit-point density on the bottom boundary.
///
/// Records started downwards that exit at `x0` without switching form the
/// atom; they are removed before smoothing and reported as `singular_mass`,
/// and the smooth part is then normalised by the remaining paths, matching
/// the convention of [`DensityProfile`].
pub fn empirical_density(
    records: &[PlanarExitRecord],
    origin: (f64, f64),
    z_grid: &[f64],
    opts: KdeOptions,
) -> Result<DensityProfile> {
    if records.is_empty() || z_grid.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(h) = opts.bandwidth {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "bandwidth",
                value: h,
            });
        }
    }
    let x0 = origin.0;
    let j = records[0].initial;
    let is_atom = |r: &PlanarExitRecord| {
        r.initial == Direction2D::D3
            && r.side == StripSide::Bottom
            && (r.exit_abscissa - x0).abs() <= ATOM_TOL
    };
    let atoms = records.iter().filter(|r| is_atom(r)).count();
    let mut sample: Vec<f64> = records
        .iter()
        .filter(|r| r.side == StripSide::Bottom && !is_atom(r))
        .map(|r| r.exit_abscissa)
        .collect();
    sample.par_sort_unstable_by(f64::total_cmp);
    let h = match opts.bandwidth {
        Some(h) => h,
        None => silverman_bandwidth(&sample)?,
    };
    let continuous = (records.len() - atoms) as f64;
    if continuous == 0.0 {
        return Err(Error::EmptySample);
    }
    let norm = 1.0 / (continuous * h * (2.0 * std::f64::consts::PI).sqrt());
    let split = sample.partition_point(|&v| v < x0);
    let (left, right) = sample.split_at(split);
    let values = z_grid
        .par_iter()
        .map(|&z| {
            let s = if !opts.split_at_origin {
                gaussian_sum(&sample, z, h)
            } else {
                let one_side = |side: &[f64], z: f64| {
                    gaussian_sum(side, z, h) + gaussian_sum(side, 2.0 * x0 - z, h)
                };
                if z < x0 {
                    one_side(left, z)
                } else if z > x0 {
                    one_side(right, z)
                } else {
                    0.5 * (one_side(left, z) + one_side(right, z))
                }
            };
            s * norm
        })
        .collect();
    Ok(DensityProfile {
        z_grid: z_grid.to_vec(),
        values,
        singular_mass: atoms as f64 / records.len() as f64,
        j,
        origin,
    })
}
