use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};
use telex_core::brownian::{
    bm_drift_exit_prob_upper, bm_drift_mean_exit_time, bm_exit_prob_upper, bm_mean_exit_time,
};
use telex_core::mc::{estimate, PlanarExitRecord, Start, StripSide, StripSim};
use telex_core::quadrature::node;
use telex_core::strip::{
    density_profile, exit_prob_lower_strip, pj_by_density_integration, DensityOptions,
};
use telex_core::{
    Direction2D, DriftTelegraphParams, Interval, PlanarStripProblem, TelegraphParams,
};

use crate::args::FigureArgs;
use crate::commands::Model;
use crate::error::{usage, CliResult};
use crate::table::{Format, OutputTable};

/// Switching rates of the interval figures (`c = sqrt(λ)`); not fixed by the
/// figure definitions, chosen to make the convergence visible.
pub const INTERVAL_LAMBDAS: [f64; 3] = [4.0, 16.0, 64.0];
/// Drift values of the asymmetric figure, with `c0 = 3`, `c1 = c0 + 2 mu`.
pub const DRIFT_MUS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
pub const DRIFT_C0: f64 = 3.0;
/// `(c, λ, L, y, x)` of the strip figures.
pub const STRIP_POINT: (f64, f64, f64, f64, f64) = (5.0, 10.0, 1.0, 0.5, 0.0);
pub const STRIP_ABSCISSAE: [f64; 3] = [-2.0, 0.0, 3.0];

struct Writer<'a> {
    dir: &'a Path,
    format: Format,
    files: Vec<String>,
}

impl Writer<'_> {
    fn write(&mut self, stem: &str, table: &OutputTable) -> CliResult<()> {
        let name = format!("{stem}.{}", self.format.extension());
        table.write(
            BufWriter::new(File::create(self.dir.join(&name))?),
            self.format,
        )?;
        self.files.push(name);
        Ok(())
    }
}

pub fn cmd_figure(
    args: &FigureArgs,
    out: Option<&PathBuf>,
    format: Format,
) -> CliResult<Vec<String>> {
    let Some(dir) = out else {
        return usage("figure needs --out DIR");
    };
    if args.n < 2 {
        return usage("--n must be at least 2");
    }
    fs::create_dir_all(dir)?;
    let mut w = Writer {
        dir,
        format,
        files: Vec::new(),
    };
    let meta = match args.id {
        1 | 2 => interval_figure(&mut w, args)?,
        3 => drift_figure(&mut w, args)?,
        4 => density_figure(&mut w, args)?,
        5 => integration_figure(&mut w, args)?,
        id => return usage(format!("no figure {id}")),
    };
    let meta = json!({ "figure": args.id, "files": w.files, "details": meta });
    fs::write(
        dir.join("metadata.json"),
        serde_json::to_string_pretty(&meta).expect("json value") + "\n",
    )?;
    Ok(w.files)
}

fn unit() -> Interval {
    Interval::new(0.0, 1.0).expect("valid interval")
}

fn interval_figure(w: &mut Writer, args: &FigureArgs) -> CliResult<Value> {
    let iv = unit();
    for lambda in INTERVAL_LAMBDAS {
        let model = Model::Symmetric(TelegraphParams::new(lambda.sqrt(), lambda)?);
        let table = if args.id == 1 {
            let mut t = OutputTable::new(["x", "u0", "u1", "u", "brownian"]);
            for i in 0..args.n {
                let x = node(0.0, 1.0, args.n, i);
                let u = model.exit_prob(iv, x)?;
                t.push_nums(&[x, u.u0, u.u1, u.u, bm_exit_prob_upper(iv, x)?]);
            }
            t
        } else {
            let mut t = OutputTable::new(["x", "h0", "h1", "h", "brownian"]);
            for i in 0..args.n {
                let x = node(0.0, 1.0, args.n, i);
                let h = model.exit_time(iv, x)?;
                t.push_nums(&[x, h.h0, h.h1, h.h, bm_mean_exit_time(iv, x)?]);
            }
            t
        };
        let prefix = if args.id == 1 {
            "exit_prob"
        } else {
            "exit_time"
        };
        w.write(&format!("{prefix}_lambda{lambda}"), &table)?;
    }
    Ok(json!({
        "interval": [0.0, 1.0],
        "lambda": INTERVAL_LAMBDAS,
        "speed": "c = sqrt(lambda)",
        "choice": "the lambda values are not fixed by the figure definition; chosen to show convergence to Brownian motion",
    }))
}

fn drift_figure(w: &mut Writer, args: &FigureArgs) -> CliResult<Value> {
    let iv = unit();
    for mu in DRIFT_MUS {
        let c1 = DRIFT_C0 + 2.0 * mu;
        let model = Model::Drift(DriftTelegraphParams::new(
            DRIFT_C0,
            c1,
            DRIFT_C0 * DRIFT_C0,
            c1 * c1,
        )?);
        let mut t = OutputTable::new([
            "x",
            "u0",
            "u1",
            "u",
            "h0",
            "h1",
            "h",
            "brownian_u",
            "brownian_h",
        ]);
        for i in 0..args.n {
            let x = node(0.0, 1.0, args.n, i);
            let u = model.exit_prob(iv, x)?;
            let h = model.exit_time(iv, x)?;
            let bu = bm_drift_exit_prob_upper(iv, x, mu)?;
            let bh = bm_drift_mean_exit_time(iv, x, mu)?;
            t.push_nums(&[x, u.u0, u.u1, u.u, h.h0, h.h1, h.h, bu, bh]);
        }
        w.write(&format!("drift_mu{mu}"), &t)?;
    }
    Ok(json!({
        "interval": [0.0, 1.0],
        "c0": DRIFT_C0,
        "lambda0": DRIFT_C0 * DRIFT_C0,
        "mu": DRIFT_MUS,
        "c1": "c0 + 2 mu",
        "lambda1": "c1^2",
        "choice": "c1 = c0 + 2 mu is the exact solution of (lambda1/c1 - lambda0/c0)/2 = mu with lambda_j = c_j^2; the mu values are a free choice",
    }))
}

fn strip_problem() -> CliResult<PlanarStripProblem> {
    let (c, lambda, l, _, _) = STRIP_POINT;
    Ok(PlanarStripProblem::from_values(c, lambda, l)?)
}

fn density_figure(w: &mut Writer, args: &FigureArgs) -> CliResult<Value> {
    let prob = strip_problem()?;
    let (_, _, _, y, x) = STRIP_POINT;
    let zs: Vec<f64> = (0..args.n)
        .map(|i| node(x - 3.0, x + 3.0, args.n, i))
        .collect();
    let mut masses = Vec::new();
    for j in Direction2D::ALL {
        let profile = density_profile(prob, j, x, y, &zs, DensityOptions::default())?;
        let mut t = OutputTable::new(["z", "density"]);
        for (z, v) in zs.iter().zip(&profile.values) {
            t.push_nums(&[*z, *v]);
        }
        let stem = if j == Direction2D::D3 {
            "density_u3_star".to_string()
        } else {
            format!("density_u{}", j.index())
        };
        w.write(&stem, &t)?;
        masses.push(profile.singular_mass);
    }
    Ok(json!({
        "c": STRIP_POINT.0, "lambda": STRIP_POINT.1, "L": STRIP_POINT.2, "y": y, "x": x,
        "z_range": [x - 3.0, x + 3.0],
        "singular_mass_u3": masses[3],
        "note": "density_u3_star is the continuous part of the downward-start law, normalised to total mass one",
    }))
}

fn integration_figure(w: &mut Writer, args: &FigureArgs) -> CliResult<Value> {
    let prob = strip_problem()?;
    let y = STRIP_POINT.3;
    let closed = exit_prob_lower_strip(prob, y)?;
    let cases: Vec<(f64, Direction2D)> = STRIP_ABSCISSAE
        .iter()
        .flat_map(|&x| Direction2D::ALL.map(|j| (x, j)))
        .collect();
    let rows = cases
        .par_iter()
        .enumerate()
        .map(|(k, &(x, j))| -> CliResult<[f64; 7]> {
            let numeric = pj_by_density_integration(prob, x, y, j)?;
            let sim = StripSim::new(prob, x, y, Start::Fixed(j))?;
            let mc = estimate(
                &sim,
                |r: &PlanarExitRecord| (r.side == StripSide::Bottom) as u8 as f64,
                args.paths,
                args.seed.wrapping_add(k as u64),
            )?;
            let exact = closed.get(j);
            Ok([
                x,
                j.index() as f64,
                exact,
                numeric,
                (numeric - exact).abs(),
                mc.mean,
                mc.std_error,
            ])
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut t = OutputTable::new([
        "x",
        "j",
        "p_closed",
        "p_numeric",
        "abs_diff",
        "p_mc",
        "mc_std_error",
    ]);
    for r in &rows {
        t.push_nums(r);
    }
    w.write("exit_prob_by_integration", &t)?;
    Ok(json!({
        "c": STRIP_POINT.0, "lambda": STRIP_POINT.1, "L": STRIP_POINT.2, "y": y,
        "x": STRIP_ABSCISSAE,
        "mc_paths": args.paths, "mc_seed": args.seed, "mc_seed_rule": "row k uses seed + k",
        "method": "adaptive inner quadrature of each density, trapezoid rule over z on [x - W, x + W]",
    }))
}
