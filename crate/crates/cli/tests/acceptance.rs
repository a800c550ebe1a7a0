//! Acceptance gate: every criterion runs at its stated tolerance and prints one
//! PASS/FAIL line. With `ACCEPTANCE_STRICT` set, any failure makes the run
//! exit non-zero.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::Command;
use std::time::Instant;

use rand::Rng;
use telex_core::brownian::{
    bm_drift_mean_exit_time, bm_exit_prob_upper, bm_mean_exit_time, bm_strip_refs,
};
use telex_core::drift::{
    drift_exit_prob_upper, drift_mean_exit_time, hydrodynamic_drift_limit_check,
    hydrodynamic_drift_params, residual_drift_odes, residual_drift_systems,
};
use telex_core::interval::{
    exit_prob_upper, mean_exit_time, residual_h_ode, residual_h_system, residual_u_ode,
    residual_u_system,
};
use telex_core::mc::{
    empirical_density, estimate, estimate_many, path_rng, simulate_records, ExitRecord,
    IntervalSide, KdeOptions, MCEstimate, PlanarExitRecord, Start, StripSide, StripSim,
    TelegraphSim,
};
use telex_core::quadrature::{node, trapezoid_from_samples};
use telex_core::strip::{
    density_profile, exit_prob_lower_strip, fourier_u0, fourier_u1, fourier_u2, fourier_u3,
    mean_exit_time_strip, pj_by_density_integration, residual_fourier_system,
    residual_poisson_pde_conditional, ComplexVal, DensityOptions,
};
use telex_core::{
    Direction1D, Direction2D, DriftTelegraphParams, Interval, PlanarStripProblem, TelegraphParams,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 20_261_018;

fn unit() -> Interval {
    Interval::new(0.0, 1.0).unwrap()
}

fn rng(stream: u64) -> impl Rng {
    path_rng(SEED, stream)
}

fn check(ok: bool, summary: String) -> Outcome {
    if ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn crit1_boundaries() -> Outcome {
    let mut r = rng(1);
    let mut failures = Vec::new();
    for k in 0..100 {
        let a = r.random_range(-5.0..5.0);
        let b = a + r.random_range(0.01..10.0);
        let iv = Interval::new(a, b).unwrap();
        let (c, lambda) = (r.random_range(0.05..50.0), r.random_range(0.0..100.0));
        let p = TelegraphParams::new(c, lambda).unwrap();
        let ok_sym = exit_prob_upper(p, iv, b).unwrap().u0 == 1.0
            && exit_prob_upper(p, iv, a).unwrap().u1 == 0.0
            && mean_exit_time(p, iv, b).unwrap().h0 == 0.0
            && mean_exit_time(p, iv, a).unwrap().h1 == 0.0;

        let q = DriftTelegraphParams::new(
            r.random_range(0.1..20.0),
            r.random_range(0.1..20.0),
            r.random_range(0.1..50.0),
            r.random_range(0.1..50.0),
        )
        .unwrap();
        let ok_drift = drift_exit_prob_upper(q, iv, b).unwrap().u0 == 1.0
            && drift_exit_prob_upper(q, iv, a).unwrap().u1 == 0.0
            && drift_mean_exit_time(q, iv, b).map_or(true, |h| h.h0 == 0.0)
            && drift_mean_exit_time(q, iv, a).map_or(true, |h| h.h1 == 0.0);

        let l = r.random_range(0.01..10.0);
        let prob = PlanarStripProblem::from_values(
            r.random_range(0.05..50.0),
            r.random_range(0.01..100.0),
            l,
        )
        .unwrap();
        let ok_strip = exit_prob_lower_strip(prob, l).unwrap().p1 == 0.0
            && exit_prob_lower_strip(prob, 0.0).unwrap().p3 == 1.0
            && mean_exit_time_strip(prob, l).unwrap().h1 == 0.0
            && mean_exit_time_strip(prob, 0.0).unwrap().h3 == 0.0;
        if !(ok_sym && ok_drift && ok_strip) {
            failures.push(k);
        }
    }
    check(
        failures.is_empty(),
        format!("100 parameter sets, exact equality, failing sets {failures:?}"),
    )
}

fn crit2_residuals() -> Outcome {
    const TOL: f64 = 1e-6;
    const STEP: f64 = 1e-5;
    // second differences lose ~eps/h^2 ~ 2e-6 to rounding at h = 1e-5
    const STEP2: f64 = 1e-4;
    let mut r = rng(2);
    let (mut first, mut second, mut second_fine, mut fourier, mut poisson) =
        (0f64, 0f64, 0f64, 0f64, 0f64);
    for _ in 0..50 {
        let iv = unit();
        let x = r.random_range(0.05..0.95);
        let p = TelegraphParams::new(r.random_range(0.5..5.0), r.random_range(0.2..10.0)).unwrap();
        first = first.max(residual_u_system(p, iv, x, STEP).unwrap().max_abs());
        first = first.max(residual_h_system(p, iv, x, STEP).unwrap().max_abs());
        second = second.max(residual_u_ode(p, iv, x, STEP2).unwrap().abs());
        second = second.max(residual_h_ode(p, iv, x, STEP2).unwrap().abs());
        second_fine = second_fine.max(residual_u_ode(p, iv, x, STEP).unwrap().abs());
        second_fine = second_fine.max(residual_h_ode(p, iv, x, STEP).unwrap().abs());

        let q = loop {
            let q = DriftTelegraphParams::new(
                r.random_range(1.0..4.0),
                r.random_range(1.0..4.0),
                r.random_range(0.5..4.0),
                r.random_range(0.5..4.0),
            )
            .unwrap();
            if (q.lambda0() * q.c1() - q.lambda1() * q.c0()).abs() > 0.05 {
                break q;
            }
        };
        let (ru, rh) = residual_drift_systems(q, iv, x, STEP).unwrap();
        first = first.max(ru.max_abs()).max(rh.max_abs());
        let (ou, oh) = residual_drift_odes(q, iv, x, STEP2).unwrap();
        second = second.max(ou.abs()).max(oh.abs());
        let (fu, fh) = residual_drift_odes(q, iv, x, STEP).unwrap();
        second_fine = second_fine.max(fu.abs()).max(fh.abs());

        let l = r.random_range(0.5..2.0);
        let prob = PlanarStripProblem::from_values(
            r.random_range(1.0..10.0),
            r.random_range(1.0..20.0),
            l,
        )
        .unwrap();
        let y = r.random_range(0.05..0.95) * l;
        for alpha in [0.0, 0.3, 1.0, 5.0, -2.0] {
            let (a, b) = residual_fourier_system(prob, alpha, y, STEP).unwrap();
            fourier = fourier.max(a.norm()).max(b.norm());
        }
        for v in residual_poisson_pde_conditional(prob, y).unwrap() {
            poisson = poisson.max(v.abs());
        }
    }
    let ok = first < TOL && second < TOL && fourier < TOL && poisson < 1e-12;
    check(
        ok,
        format!(
            "max residuals: systems {first:.1e} (h=1e-5), scalar ODEs {second:.1e} (h=1e-4; {second_fine:.1e} at h=1e-5), \
             Fourier system {fourier:.1e}, Poisson {poisson:.1e} (analytic); tol {TOL:.0e}"
        ),
    )
}

struct ZTally {
    n: usize,
    worst: f64,
    fails: Vec<String>,
}

impl ZTally {
    fn new() -> Self {
        Self {
            n: 0,
            worst: 0.0,
            fails: Vec::new(),
        }
    }

    fn add(&mut self, label: String, est: MCEstimate, reference: f64) {
        let z = est.z_score(reference);
        self.n += 1;
        self.worst = self.worst.max(z.abs());
        if !(z.abs() < 3.0) {
            self.fails.push(format!(
                "{label}: mc {:.5} ref {reference:.5} z {z:.2}",
                est.mean
            ));
        }
    }

    /// Unconditional estimate from the two (or four) direction-stratified runs.
    fn pooled(parts: &[MCEstimate]) -> MCEstimate {
        let k = parts.len() as f64;
        MCEstimate {
            mean: parts.iter().map(|e| e.mean).sum::<f64>() / k,
            std_error: parts
                .iter()
                .map(|e| e.std_error.powi(2))
                .sum::<f64>()
                .sqrt()
                / k,
            n_paths: parts.iter().map(|e| e.n_paths).sum(),
            seed: parts[0].seed,
        }
    }
}

fn interval_mc(
    t: &mut ZTally,
    label: &str,
    p: DriftTelegraphParams,
    x: f64,
    seed: u64,
    closed: ([f64; 2], [f64; 2]),
) {
    const N: u64 = 200_000;
    let upper = |r: &ExitRecord| (r.side == IntervalSide::Upper) as u8 as f64;
    let time = |r: &ExitRecord| r.time;
    let mut us = Vec::new();
    let mut hs = Vec::new();
    for d in [Direction1D::D0, Direction1D::D1] {
        let sim = TelegraphSim::new(p, unit(), x, Start::Fixed(d)).unwrap();
        let est = estimate_many(&sim, &[&upper, &time], N, seed + d.index() as u64).unwrap();
        t.add(
            format!("{label} x={x} u{}", d.index()),
            est[0],
            closed.0[d.index()],
        );
        t.add(
            format!("{label} x={x} h{}", d.index()),
            est[1],
            closed.1[d.index()],
        );
        us.push(est[0]);
        hs.push(est[1]);
    }
    t.add(
        format!("{label} x={x} u"),
        ZTally::pooled(&us),
        0.5 * (closed.0[0] + closed.0[1]),
    );
    t.add(
        format!("{label} x={x} h"),
        ZTally::pooled(&hs),
        0.5 * (closed.1[0] + closed.1[1]),
    );
}

fn crit3_monte_carlo() -> Outcome {
    let mut t = ZTally::new();
    let mut seed = SEED;
    let xs = [0.0, 0.5, 0.9];
    for c in [1.0, 2.0, 5.0] {
        for lambda in [0.5, 2.0, 8.0] {
            let p = TelegraphParams::new(c, lambda).unwrap();
            for x in xs {
                let u = exit_prob_upper(p, unit(), x).unwrap();
                let h = mean_exit_time(p, unit(), x).unwrap();
                seed += 2;
                interval_mc(
                    &mut t,
                    &format!("c={c} l={lambda}"),
                    p.into(),
                    x,
                    seed,
                    ([u.u0, u.u1], [h.h0, h.h1]),
                );
            }
        }
    }
    for (c0, c1, l0, l1) in [
        (2.0, 1.0, 1.0, 1.0),
        (1.0, 1.0, 2.0, 1.0),
        (1.0, 3.0, 4.0, 1.0),
    ] {
        let p = DriftTelegraphParams::new(c0, c1, l0, l1).unwrap();
        for x in xs {
            let u = drift_exit_prob_upper(p, unit(), x).unwrap();
            let h = drift_mean_exit_time(p, unit(), x).unwrap();
            seed += 2;
            interval_mc(
                &mut t,
                &format!("drift ({c0},{c1},{l0},{l1})"),
                p,
                x,
                seed,
                ([u.u0, u.u1], [h.h0, h.h1]),
            );
        }
    }
    let bottom = |r: &PlanarExitRecord| (r.side == StripSide::Bottom) as u8 as f64;
    let time = |r: &PlanarExitRecord| r.time;
    for (c, lambda, l) in [(5.0, 10.0, 1.0), (2.0, 4.0, 2.0)] {
        let prob = PlanarStripProblem::from_values(c, lambda, l).unwrap();
        for frac in [0.25, 0.5, 0.75] {
            let y = frac * l;
            let p = exit_prob_lower_strip(prob, y).unwrap();
            let h = mean_exit_time_strip(prob, y).unwrap();
            let (mut ps, mut hs) = (Vec::new(), Vec::new());
            for j in Direction2D::ALL {
                let sim = StripSim::new(prob, 0.0, y, Start::Fixed(j)).unwrap();
                seed += 1;
                let est = estimate_many(&sim, &[&bottom, &time], 200_000, seed).unwrap();
                t.add(
                    format!("strip c={c} l={lambda} L={l} y={y} p{}", j.index()),
                    est[0],
                    p.get(j),
                );
                t.add(
                    format!("strip c={c} l={lambda} L={l} y={y} h{}", j.index()),
                    est[1],
                    h.get(j),
                );
                ps.push(est[0]);
                hs.push(est[1]);
            }
            t.add(format!("strip y={y} p"), ZTally::pooled(&ps), p.p);
            t.add(format!("strip y={y} h"), ZTally::pooled(&hs), h.h);
        }
    }
    check(
        t.fails.is_empty(),
        format!(
            "{} comparisons at 2e5 paths, max |z| = {:.2}, outside 3 SE: {:?}",
            t.n, t.worst, t.fails
        ),
    )
}

fn crit4_endpoint_start() -> Outcome {
    let p = TelegraphParams::new(1.0, 1.0).unwrap();
    let sim = TelegraphSim::new(p, unit(), 0.0, Start::Fixed(Direction1D::D0)).unwrap();
    let est = estimate(
        &sim,
        |r: &ExitRecord| (r.side == IntervalSide::Upper) as u8 as f64,
        1_000_000,
        SEED,
    )
    .unwrap();
    let closed = exit_prob_upper(p, unit(), 0.0).unwrap().u0;
    let z = est.z_score(0.5);
    check(
        closed == 0.5 && z.abs() < 3.0,
        format!(
            "closed form {closed}, MC {:.5} ± {:.5}, z = {z:.2}",
            est.mean, est.std_error
        ),
    )
}

fn crit5_singular_mass() -> Outcome {
    let prob = PlanarStripProblem::from_values(5.0, 10.0, 1.0).unwrap();
    let sim = StripSim::new(prob, 0.0, 0.5, Start::Fixed(Direction2D::D3)).unwrap();
    let est = estimate(
        &sim,
        |r: &PlanarExitRecord| (r.switches == 0) as u8 as f64,
        1_000_000,
        SEED,
    )
    .unwrap();
    let m = (-1f64).exp();
    let z = est.z_score(m);
    check(
        z.abs() < 3.0,
        format!(
            "zero-switch fraction {:.5} ± {:.5} vs e^-1 = {m:.6}, z = {z:.2}",
            est.mean, est.std_error
        ),
    )
}

fn crit6_fourier() -> Outcome {
    let mut r = rng(6);
    let (mut limit, mut fine, mut linear, mut identity) = (0f64, 0f64, 0f64, 0f64);
    let mut worst_set = String::new();
    for _ in 0..20 {
        let l = r.random_range(0.2..5.0);
        let prob = PlanarStripProblem::from_values(
            r.random_range(0.2..20.0),
            r.random_range(0.2..50.0),
            l,
        )
        .unwrap();
        let y = r.random_range(0.01..0.99) * l;
        let p = exit_prob_lower_strip(prob, y).unwrap();
        let at = |alpha: f64| {
            [
                fourier_u0(prob, alpha, y, 0.0).unwrap(),
                fourier_u1(prob, alpha, y, 0.0).unwrap(),
                fourier_u2(prob, alpha, y, 0.0).unwrap(),
                fourier_u3(prob, alpha, y, 0.0).unwrap(),
            ]
        };
        let shift = prob.c() / prob.lambda();
        for (j, (v, w)) in at(1e-8).iter().zip(at(1e-12)).enumerate() {
            let pj = p.get(Direction2D::from_index(j).unwrap());
            let err = (v - pj).norm();
            if err > limit {
                limit = err;
                worst_set = format!(
                    "c={:.2} lambda={:.2} L={l:.2} y={y:.2} j={j}",
                    prob.c(),
                    prob.lambda()
                );
            }
            fine = fine.max((w - pj).norm());
            // horizontal starts carry the exact first-order term -+ i alpha (c/lambda) p_j
            let slope = if j % 2 == 0 { shift * pj * 1e-8 } else { 0.0 };
            linear = linear.max((err - slope).abs());
        }
        for alpha in [0.1, 1.0, 7.5, -3.0, 40.0] {
            let z = r.random_range(-2.0..2.0);
            let u0 = fourier_u0(prob, alpha, y, z).unwrap();
            let u2 = fourier_u2(prob, alpha, y, z).unwrap();
            let s = fourier_u1(prob, alpha, y, z).unwrap() + fourier_u3(prob, alpha, y, z).unwrap();
            let ca = prob.c() * alpha;
            let rhs = prob.lambda() * s;
            let lhs0 = u0 * 2.0 * ComplexVal::new(prob.lambda(), ca);
            let lhs2 = u2 * 2.0 * ComplexVal::new(prob.lambda(), -ca);
            let scale = rhs.norm().max(f64::MIN_POSITIVE);
            identity = identity
                .max((lhs0 - rhs).norm() / scale)
                .max((lhs2 - rhs).norm() / scale);
        }
    }
    check(
        limit < 1e-8 && identity < 1e-10,
        format!(
            "max |u~_j(1e-8) - p_j| = {limit:.1e} (tol 1e-8; worst at {worst_set}); \
             at alpha=1e-12 {fine:.1e}; after removing the first-order term (c/lambda) p_j alpha {linear:.1e}; \
             max relative identity error {identity:.1e} (tol 1e-10)"
        ),
    )
}

fn crit7_density_integration() -> Outcome {
    let prob = PlanarStripProblem::from_values(5.0, 10.0, 1.0).unwrap();
    let p = exit_prob_lower_strip(prob, 0.5).unwrap();
    let mut worst = 0f64;
    let mut lines = Vec::new();
    for x in [-2.0, 0.0, 3.0] {
        for j in Direction2D::ALL {
            let v = pj_by_density_integration(prob, x, 0.5, j)
                .map_err(|e| format!("x={x} j={}: {e}", j.index()))?;
            worst = worst.max((v - p.get(j)).abs());
            if x == 0.0 {
                lines.push(format!("p{}={v:.5}", j.index()));
            }
        }
    }
    check(
        worst < 5e-3,
        format!(
            "max |integral - closed form| = {worst:.2e} over x in {{-2,0,3}} (tol 5e-3); {}",
            lines.join(" ")
        ),
    )
}

fn crit8_density_shape() -> Outcome {
    let prob = PlanarStripProblem::from_values(5.0, 10.0, 1.0).unwrap();
    let (x, y) = (0.0, 0.5);
    let opts = DensityOptions::default();
    let n = 121;
    let grid: Vec<f64> = (0..n).map(|i| node(x - 3.0, x + 3.0, n, i)).collect();
    let profiles: Vec<_> = Direction2D::ALL
        .iter()
        .map(|&j| density_profile(prob, j, x, y, &grid, opts).unwrap())
        .collect();
    let mirror = |i: usize| n - 1 - i;

    let mut sym = 0f64;
    for j in [1, 3] {
        for i in 0..n {
            sym = sym.max((profiles[j].values[i] - profiles[j].values[mirror(i)]).abs());
        }
    }
    let mut mirror_err = 0f64;
    for i in 0..n {
        mirror_err = mirror_err.max((profiles[0].values[i] - profiles[2].values[mirror(i)]).abs());
    }
    let sym_ok = sym <= 10.0 * opts.tol && mirror_err <= 10.0 * opts.tol;

    // one-sided masses of u0 over |z - x| <= 10
    let m = 1001;
    let right: Vec<f64> = (0..m).map(|i| node(x, x + 10.0, m, i)).collect();
    let left: Vec<f64> = (0..m).map(|i| node(x - 10.0, x, m, i)).collect();
    let mut right_vals = density_profile(prob, Direction2D::D0, x, y, &right, opts)
        .unwrap()
        .values;
    let mut left_vals = density_profile(prob, Direction2D::D0, x, y, &left, opts)
        .unwrap()
        .values;
    // the density jumps at z = x; use the one-sided limits there
    right_vals[0] = 2.0 * right_vals[1] - right_vals[2];
    left_vals[m - 1] = 2.0 * left_vals[m - 2] - left_vals[m - 3];
    let right_mass = trapezoid_from_samples(&right_vals, x, x + 10.0).unwrap();
    let left_mass = trapezoid_from_samples(&left_vals, x - 10.0, x).unwrap();
    let mass_ok = right_mass > left_mass;

    let mut kde = Vec::new();
    let mut kde_ok = true;
    for (k, j) in Direction2D::ALL.into_iter().enumerate() {
        let sim = StripSim::new(prob, x, y, Start::Fixed(j)).unwrap();
        let recs = simulate_records(&sim, 10_000_000, SEED + 80 + k as u64).unwrap();
        let opts = KdeOptions {
            bandwidth: None,
            split_at_origin: true,
        };
        let est = empirical_density(&recs, (x, y), &grid, opts).unwrap();
        let exact = &profiles[k];
        let peak = exact.values.iter().cloned().fold(0.0, f64::max);
        let sup = est
            .values
            .iter()
            .zip(&exact.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let rel = sup / peak;
        kde_ok &= rel <= 0.05;
        if j == Direction2D::D3 {
            kde_ok &= (est.singular_mass - exact.singular_mass).abs()
                < 3.0 * (exact.singular_mass * (1.0 - exact.singular_mass) / 1e7).sqrt();
        }
        kde.push(format!(
            "u{}{} {:.2}%",
            j.index(),
            if j == Direction2D::D3 { "*" } else { "" },
            100.0 * rel
        ));
    }
    check(
        sym_ok && mass_ok && kde_ok,
        format!(
            "symmetry {sym:.1e}, u0/u2 mirror {mirror_err:.1e} (tol {:.0e}); u0 mass right {right_mass:.4} > left {left_mass:.4}; \
             KDE sup-norm / peak at 1e7 paths: {} (tol 5%)",
            10.0 * opts.tol,
            kde.join(", ")
        ),
    )
}

fn crit9_hydrodynamic() -> Outcome {
    let iv = unit();
    let xs: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let cs = [2.0, 4.0, 8.0, 16.0];
    let mut identity = 0f64;
    let mut du = Vec::new();
    let mut dh = Vec::new();
    let mut dp = Vec::new();
    let mut dhs = Vec::new();
    for c in cs {
        let p = TelegraphParams::new(c, c * c).unwrap();
        let (mut su, mut sh) = (0f64, 0f64);
        for &x in &xs {
            let u = exit_prob_upper(p, iv, x).unwrap().u;
            identity = identity.max((u - x - (0.5 - x) / (1.0 + c)).abs());
            su = su.max((u - bm_exit_prob_upper(iv, x).unwrap()).abs());
            sh = sh.max(
                (mean_exit_time(p, iv, x).unwrap().h - bm_mean_exit_time(iv, x).unwrap()).abs(),
            );
        }
        du.push(su);
        dh.push(sh);
        let prob = PlanarStripProblem::from_values(c, c * c, 1.0).unwrap();
        let (mut sp, mut st) = (0f64, 0f64);
        for &y in &xs {
            let (bp, bt) = bm_strip_refs(1.0, y).unwrap();
            sp = sp.max((exit_prob_lower_strip(prob, y).unwrap().p - bp).abs());
            st = st.max((mean_exit_time_strip(prob, y).unwrap().h - bt).abs());
        }
        dp.push(sp);
        dhs.push(st);
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let monotone = decreasing(&du) && decreasing(&dh) && decreasing(&dp) && decreasing(&dhs);

    let mut drift = 0f64;
    for mu in [-1.0, -0.5, 0.5, 1.0] {
        let p = hydrodynamic_drift_params(mu, 1e4).unwrap();
        for &x in &xs {
            let (u, bu) = hydrodynamic_drift_limit_check(mu, 1e4, iv, x).unwrap();
            drift = drift.max((u - bu).abs());
            let h = drift_mean_exit_time(p, iv, x).unwrap().h;
            drift = drift.max((h - bm_drift_mean_exit_time(iv, x, mu).unwrap()).abs());
        }
    }
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|d| format!("{d:.2e}"))
            .collect::<Vec<_>>()
            .join(">")
    };
    check(
        identity < 1e-12 && monotone && drift < 1e-2,
        format!(
            "identity {identity:.1e} (tol 1e-12); sup distances along c=2,4,8,16: u {} h {} p {} h_strip {}; \
             drift at scale 1e4: {drift:.1e} (tol 1e-2)",
            fmt(&du),
            fmt(&dh),
            fmt(&dp),
            fmt(&dhs)
        ),
    )
}

fn crit10_determinism() -> Outcome {
    let runs: [&[&str]; 3] = [
        &[
            "simulate",
            "--model",
            "telegraph",
            "--c",
            "2",
            "--lambda",
            "4",
            "--x",
            "0.3",
            "--paths",
            "50000",
            "--seed",
            "17",
        ],
        &[
            "simulate",
            "--model",
            "telegraph-drift",
            "--c0",
            "2",
            "--c1",
            "1",
            "--lambda0",
            "1",
            "--lambda1",
            "3",
            "--x",
            "0.6",
            "--paths",
            "50000",
            "--seed",
            "18",
        ],
        &[
            "simulate",
            "--model",
            "planar-strip",
            "--c",
            "5",
            "--lambda",
            "10",
            "--L",
            "1",
            "--y",
            "0.5",
            "--paths",
            "50000",
            "--seed",
            "19",
        ],
    ];
    for args in runs {
        let mut outputs = Vec::new();
        for threads in ["1", "2", "4", "4"] {
            let o = Command::new(env!("CARGO_BIN_EXE_telex"))
                .args(args)
                .env("TELEX_THREADS", threads)
                .output()
                .map_err(|e| e.to_string())?;
            if !o.status.success() {
                return Err(format!(
                    "{} failed: {}",
                    args[2],
                    String::from_utf8_lossy(&o.stderr)
                ));
            }
            outputs.push(o.stdout);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!(
                "{} output differs across TELEX_THREADS=1,2,4",
                args[2]
            ));
        }
    }
    Ok("3 models x TELEX_THREADS=1,2,4,4: identical bytes".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("boundary conditions", crit1_boundaries),
        ("ODE/PDE residuals", crit2_residuals),
        ("Monte Carlo agreement", crit3_monte_carlo),
        ("endpoint start u0 = 1/2", crit4_endpoint_start),
        ("singular mass", crit5_singular_mass),
        ("Fourier consistency", crit6_fourier),
        ("density integration", crit7_density_integration),
        ("density shape", crit8_density_shape),
        ("hydrodynamic limits", crit9_hydrodynamic),
        ("determinism", crit10_determinism),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != k + 1) {
            continue;
        }
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS  {:>2} {name} [{secs:.1}s]: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {:>2} {name} [{secs:.1}s]: {msg}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        if std::env::var_os("ACCEPTANCE_STRICT").is_some() {
            std::process::exit(1);
        }
    }
}
