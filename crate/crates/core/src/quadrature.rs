//! One-dimensional integration: adaptive Gauss-Kronrod (10/21 point pair),
//! composite trapezoid, and a scheme for integrals over `w in (0,1)` whose
//! integrands blow up like `(1-w)^(-1/2)` and oscillate ever faster as `w -> 1`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub err_estimate: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("evaluation budget exhausted (best estimate {} ± {:e})", .partial.value, .partial.err_estimate)]
    BudgetExhausted { partial: QuadResult },
    #[error("tail refinement did not settle (best estimate {} ± {:e})", .partial.value, .partial.err_estimate)]
    NonConvergentTail { partial: QuadResult },
    #[error("density integral is negative beyond its error estimate ({value} ± {err_estimate:e})")]
    NegativeDensity { value: f64, err_estimate: f64 },
    #[error("invalid quadrature input: {0}")]
    InvalidInput(&'static str),
}

impl QuadError {
    /// Best available estimate, if the failure produced one.
    pub fn partial(&self) -> Option<QuadResult> {
        match self {
            QuadError::BudgetExhausted { partial } | QuadError::NonConvergentTail { partial } => {
                Some(*partial)
            }
            QuadError::NegativeDensity { .. } | QuadError::InvalidInput(_) => None,
        }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

const RULE_EVALS: usize = 21;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    resabs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then(o.a.total_cmp(&self.a))
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv = [(0.0, 0.0); 10];
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv[j] = (f1, f2);
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        resasc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let (value, resabs, resasc) = (resk * half, resabs * half.abs(), resasc * half.abs());
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Segment {
        a,
        b,
        value,
        err,
        resabs,
    }
}

/// Globally adaptive bisection with the 10-point Gauss / 21-point Kronrod pair.
///
/// Stops when the summed error estimate falls below `tol` (or below the
/// round-off floor of the integrand). Subintervals too narrow to bisect are
/// retired with their current estimate.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    budget: usize,
) -> Result<QuadResult, QuadError> {
    integrate_adaptive_partitioned(f, &[a, b], tol, budget)
}

/// [`integrate_adaptive`] started from the subintervals between consecutive
/// `points` (strictly increasing) instead of from a single interval. Useful
/// when the integrand oscillates: one starting piece per half period keeps
/// the error estimates honest.
pub fn integrate_adaptive_partitioned<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: f64,
    budget: usize,
) -> Result<QuadResult, QuadError> {
    if points.len() < 2
        || points.iter().any(|p| !p.is_finite())
        || points.windows(2).any(|w| !(w[0] < w[1]))
    {
        return Err(QuadError::InvalidInput(
            "need finite, strictly increasing points",
        ));
    }
    if !(tol > 0.0) {
        return Err(QuadError::InvalidInput("need tol > 0"));
    }
    let pieces = points.len() - 1;
    if budget < RULE_EVALS * pieces {
        return Err(QuadError::InvalidInput(
            "budget below one rule application per piece",
        ));
    }
    let mut evals = 0;
    let mut heap = BinaryHeap::new();
    let mut retired: Vec<Segment> = Vec::new();
    let mut err_sum = 0.0;
    let mut abs_sum = 0.0;
    for w in points.windows(2) {
        let seg = kronrod21(&f, w[0], w[1]);
        evals += RULE_EVALS;
        err_sum += seg.err;
        abs_sum += seg.resabs;
        heap.push(seg);
    }
    let mut steps = 0usize;

    let result = loop {
        let floor = 50.0 * f64::EPSILON * abs_sum;
        if err_sum <= tol.max(floor) || heap.is_empty() {
            break Ok(());
        }
        if evals + 2 * RULE_EVALS > budget {
            break Err(());
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) || (worst.b - worst.a) < 1e-15 * mid.abs().max(1e-300)
        {
            retired.push(worst);
            err_sum -= worst.err;
            continue;
        }
        let left = kronrod21(&f, worst.a, mid);
        let right = kronrod21(&f, mid, worst.b);
        evals += 2 * RULE_EVALS;
        err_sum += left.err + right.err - worst.err;
        abs_sum += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
        steps += 1;
        if steps.is_multiple_of(64) {
            // refresh running sums to shed accumulated cancellation
            err_sum = heap.iter().map(|s| s.err).sum();
            abs_sum = heap.iter().chain(retired.iter()).map(|s| s.resabs).sum();
        }
    };

    let mut segs: Vec<Segment> = heap.into_vec();
    segs.extend(retired);
    segs.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = segs.iter().map(|s| s.value).sum();
    let err_estimate = segs.iter().map(|s| s.err).sum();
    let out = QuadResult {
        value,
        err_estimate,
        evals,
    };
    match result {
        Ok(()) => Ok(out),
        Err(()) => Err(QuadError::BudgetExhausted { partial: out }),
    }
}

/// Composite trapezoid on `n` equally spaced nodes.
pub fn integrate_trapezoid<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    n: usize,
) -> Result<f64, QuadError> {
    if n < 2 {
        return Err(QuadError::InvalidInput("trapezoid needs n >= 2"));
    }
    let values: Vec<f64> = (0..n).map(|i| f(node(a, b, n, i))).collect();
    trapezoid_from_samples(&values, a, b)
}

/// `i`-th of `n` equally spaced nodes on `[a, b]`, exact at both ends.
pub fn node(a: f64, b: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        b
    } else {
        a + (b - a) * (i as f64 / (n - 1) as f64)
    }
}

/// Trapezoid rule applied to precomputed samples at `node(a, b, n, i)`.
pub fn trapezoid_from_samples(values: &[f64], a: f64, b: f64) -> Result<f64, QuadError> {
    let n = values.len();
    if n < 2 {
        return Err(QuadError::InvalidInput("trapezoid needs n >= 2"));
    }
    let h = (b - a) / (n - 1) as f64;
    let inner: f64 = values[1..n - 1].iter().sum();
    Ok(h * (0.5 * (values[0] + values[n - 1]) + inner))
}

/// A point `w in [0,1)` with the complements needed by the integrands,
/// computed without cancellation near `w = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WNode {
    pub w: f64,
    /// `1 - w`
    pub one_minus_w: f64,
    /// `sqrt(1 - w^2)`
    pub root: f64,
}

impl WNode {
    /// The node `w = cos(psi)`.
    pub fn from_angle(psi: f64) -> Self {
        let s = (0.5 * psi).sin();
        Self {
            w: psi.cos(),
            one_minus_w: 2.0 * s * s,
            root: psi.sin(),
        }
    }

    pub fn from_w(w: f64) -> Self {
        Self {
            w,
            one_minus_w: 1.0 - w,
            root: ((1.0 - w) * (1.0 + w)).sqrt(),
        }
    }
}

const INITIAL_GAP: f64 = 1e-2 * FRAC_PI_2;
const MAX_HALVINGS: usize = 20;
const MAX_HALF_PERIODS: usize = 200;

impl WNode {
    /// The node with `w / sqrt(1 - w^2) = t`.
    pub fn from_cot(t: f64) -> Self {
        let s = 1f64.hypot(t);
        Self {
            w: t / s,
            one_minus_w: 1.0 / (s * (s + t)),
            root: 1.0 / s,
        }
    }

    /// `w / sqrt(1 - w^2)`, the phase variable of the oscillatory factors.
    pub fn cot(&self) -> f64 {
        self.w / self.root
    }
}

/// `int_0^1 g(w) dw` for integrands with an integrable `(1-w)^(-1/2)`
/// envelope that oscillate like `cos(k t + phi)` in `t = w/sqrt(1-w^2)`
/// as `w -> 1` (`k = 0` when they do not oscillate).
///
/// With `w = cos(psi)` the integral becomes `int_0^{pi/2} g(cos psi) sin psi dpsi`,
/// whose integrand is bounded. The bulk `psi in [gap, pi/2]` is integrated
/// adaptively. The remainder `psi < gap` is handled in one of two ways:
///
/// * `k = 0`: slabs `[gap/2, gap]`, `[gap/4, gap/2]`, ... are added; when
///   consecutive slabs shrink geometrically the rest is added as a geometric
///   tail. Stops after three successive estimates agree within `tol`.
/// * `k > 0`: in `t` the remainder is `int_T^inf g w'(t) dt` with
///   `w'(t) = (1+t^2)^(-3/2)`; it is summed over half-periods `pi/k` and the
///   partial sums are extrapolated with Wynn's epsilon algorithm until two
///   successive extrapolations agree within `tol`.
pub fn integrate_w_singular_oscillatory<G: Fn(WNode) -> f64>(
    g: G,
    frequency: f64,
    tol: f64,
    budget: usize,
) -> Result<QuadResult, QuadError> {
    if !(frequency >= 0.0 && frequency.is_finite()) {
        return Err(QuadError::InvalidInput("frequency must be finite and >= 0"));
    }
    let h = |psi: f64| {
        let node = WNode::from_angle(psi);
        g(node) * node.root
    };
    // one starting piece per period of cos(frequency * cot(psi))
    let period = 2.0 * std::f64::consts::PI / frequency;
    let t_max = INITIAL_GAP.cos() / INITIAL_GAP.sin();
    let cuts = ((t_max / period).floor() as usize).min(budget / (4 * RULE_EVALS));
    let mut points: Vec<f64> = (1..=cuts)
        .rev()
        .map(|i| (i as f64 * period).recip().atan())
        .filter(|&psi| psi > INITIAL_GAP && psi < FRAC_PI_2)
        .collect();
    points.insert(0, INITIAL_GAP);
    points.push(FRAC_PI_2);
    let bulk = integrate_adaptive_partitioned(h, &points, 0.5 * tol, budget)?;
    let acc = QuadResult {
        value: bulk.value,
        err_estimate: bulk.err_estimate,
        evals: bulk.evals,
    };
    if frequency == 0.0 {
        gap_by_halving(&h, acc, tol, budget)
    } else {
        let tail = |t: f64| {
            let node = WNode::from_cot(t);
            g(node) * node.root * node.root * node.root
        };
        gap_by_half_periods(
            &tail,
            frequency,
            INITIAL_GAP.cos() / INITIAL_GAP.sin(),
            acc,
            tol,
            budget,
        )
    }
}

fn add_partial(acc: QuadResult, e: QuadError) -> QuadError {
    match e {
        QuadError::BudgetExhausted { partial } => QuadError::BudgetExhausted {
            partial: QuadResult {
                value: acc.value + partial.value,
                err_estimate: acc.err_estimate + partial.err_estimate,
                evals: acc.evals + partial.evals,
            },
        },
        other => other,
    }
}

fn gap_by_halving<H: Fn(f64) -> f64>(
    h: &H,
    mut acc: QuadResult,
    tol: f64,
    budget: usize,
) -> Result<QuadResult, QuadError> {
    let mut gap = INITIAL_GAP;
    let mut prev_slab: Option<f64> = None;
    let mut prev_estimate = acc.value;
    let mut settled = 0;
    for _ in 0..MAX_HALVINGS {
        let slab = integrate_adaptive(
            h,
            0.5 * gap,
            gap,
            tol / 40.0,
            budget.saturating_sub(acc.evals),
        )
        .map_err(|e| add_partial(acc, e))?;
        acc.value += slab.value;
        acc.err_estimate += slab.err_estimate;
        acc.evals += slab.evals;
        gap *= 0.5;

        let tail = match prev_slab {
            Some(p) if p != 0.0 => {
                let ratio = slab.value / p;
                if ratio > 0.0 && ratio < 0.9 {
                    slab.value * ratio / (1.0 - ratio)
                } else {
                    0.0
                }
            }
            _ => 0.0,
        };
        let estimate = acc.value + tail;
        settled = if prev_slab.is_some() && (estimate - prev_estimate).abs() < tol {
            settled + 1
        } else {
            0
        };
        if settled == 2 {
            return Ok(QuadResult {
                value: estimate,
                err_estimate: acc.err_estimate + (estimate - prev_estimate).abs(),
                evals: acc.evals,
            });
        }
        prev_estimate = estimate;
        prev_slab = Some(slab.value);
    }
    Err(QuadError::NonConvergentTail {
        partial: QuadResult {
            value: prev_estimate,
            ..acc
        },
    })
}

fn gap_by_half_periods<F: Fn(f64) -> f64>(
    f: &F,
    k: f64,
    start: f64,
    mut acc: QuadResult,
    tol: f64,
    budget: usize,
) -> Result<QuadResult, QuadError> {
    let half = std::f64::consts::PI / k;
    let mut lo = start;
    let mut hi = (start / half).floor() * half + half;
    let mut sums = Vec::new();
    let mut running = 0.0;
    let mut prev: Option<f64> = None;
    for _ in 0..MAX_HALF_PERIODS {
        let piece = integrate_adaptive(f, lo, hi, tol / 100.0, budget.saturating_sub(acc.evals))
            .map_err(|e| add_partial(acc, e))?;
        acc.evals += piece.evals;
        acc.err_estimate += piece.err_estimate;
        running += piece.value;
        sums.push(running);
        lo = hi;
        hi += half;
        if sums.len() < 3 {
            continue;
        }
        let est = wynn_epsilon(&sums);
        if let Some(p) = prev {
            if (est - p).abs() < tol {
                return Ok(QuadResult {
                    value: acc.value + est,
                    err_estimate: acc.err_estimate + (est - p).abs(),
                    evals: acc.evals,
                });
            }
        }
        prev = Some(est);
    }
    Err(QuadError::NonConvergentTail {
        partial: QuadResult {
            value: acc.value + prev.unwrap_or(running),
            ..acc
        },
    })
}

/// Limit estimate of a sequence of partial sums by Wynn's epsilon algorithm
/// (highest even column reached).
fn wynn_epsilon(s: &[f64]) -> f64 {
    let n = s.len();
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut best = s[n - 1];
    for col in 1..n {
        let len = cur.len() - 1;
        let mut next = Vec::with_capacity(len);
        for i in 0..len {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 {
                return best;
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            best = *cur.last().expect("non-empty column");
            if !best.is_finite() {
                return s[n - 1];
            }
        }
        if cur.len() < 2 {
            break;
        }
    }
    best
}
