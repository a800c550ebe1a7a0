use std::fs::File;
use std::io::BufWriter;

use rayon::prelude::*;
use telex_core::drift::{drift_exit_prob_upper, drift_mean_exit_time};
use telex_core::interval::{exit_prob_upper, mean_exit_time, ExitProbTriple, MeanExitTriple};
use telex_core::mc::{
    estimate_many, simulate_records, write_path_csv, ExitRecord, IntervalSide, PathRow,
    PathSimulator, PlanarExitRecord, Start, StripSide, StripSim, TelegraphSim,
};
use telex_core::quadrature::node;
use telex_core::strip::{
    density_with, exit_prob_lower_strip, mean_exit_time_strip, DensityOptions,
};
use telex_core::{
    Direction1D, Direction2D, DriftTelegraphParams, Interval, PlanarStripProblem, TelegraphParams,
};

use crate::args::{
    IntervalArgs, SimModel, SimulateArgs, Statistic, StripArgs, StripQuantity, TelegraphModelArgs,
};
use crate::error::{usage, CliResult};
use crate::table::{Cell, OutputTable};

#[derive(Debug, Clone, Copy)]
pub enum Model {
    Symmetric(TelegraphParams),
    Drift(DriftTelegraphParams),
}

impl Model {
    pub fn from_args(m: &TelegraphModelArgs) -> CliResult<Model> {
        let pair = (m.c, m.lambda);
        let quartet = (m.c0, m.c1, m.lambda0, m.lambda1);
        match (pair, quartet) {
            ((Some(c), Some(l)), (None, None, None, None)) => {
                Ok(Model::Symmetric(TelegraphParams::new(c, l)?))
            }
            ((None, None), (Some(c0), Some(c1), Some(l0), Some(l1))) => {
                Ok(Model::Drift(DriftTelegraphParams::new(c0, c1, l0, l1)?))
            }
            _ => usage("give either --c and --lambda, or all of --c0 --c1 --lambda0 --lambda1"),
        }
    }

    pub fn as_drift(&self) -> DriftTelegraphParams {
        match *self {
            Model::Symmetric(p) => p.into(),
            Model::Drift(p) => p,
        }
    }

    /// Equal speeds and rates, in which case the driftless formulas apply.
    fn symmetric_params(&self) -> Option<TelegraphParams> {
        match *self {
            Model::Symmetric(p) => Some(p),
            Model::Drift(p) if p.c0() == p.c1() && p.lambda0() == p.lambda1() => {
                TelegraphParams::new(p.c0(), p.lambda0()).ok()
            }
            Model::Drift(_) => None,
        }
    }

    pub fn exit_prob(&self, iv: Interval, x: f64) -> telex_core::Result<ExitProbTriple> {
        match *self {
            Model::Symmetric(p) => exit_prob_upper(p, iv, x),
            Model::Drift(p) => drift_exit_prob_upper(p, iv, x),
        }
    }

    pub fn exit_time(&self, iv: Interval, x: f64) -> telex_core::Result<MeanExitTriple> {
        match (self.symmetric_params(), *self) {
            (Some(p), _) => mean_exit_time(p, iv, x),
            (None, Model::Drift(p)) => drift_mean_exit_time(p, iv, x),
            (None, Model::Symmetric(_)) => {
                unreachable!("symmetric model always has symmetric params")
            }
        }
    }
}

fn start_points(args: &IntervalArgs, iv: Interval) -> CliResult<Vec<f64>> {
    match (args.x, args.grid) {
        (Some(x), None) => Ok(vec![x]),
        (None, Some(n)) if n >= 2 => Ok((0..n).map(|i| node(iv.a(), iv.b(), n, i)).collect()),
        (None, Some(n)) => usage(format!("--grid needs at least 2 points, got {n}")),
        _ => usage("give exactly one of --x and --grid"),
    }
}

fn triple_table(prefix: &str, dir: Option<u8>, rows: Vec<(f64, [f64; 3])>) -> OutputTable {
    let mut t = match dir {
        Some(j) => OutputTable::new(["x".to_string(), format!("{prefix}{j}")]),
        None => OutputTable::new([
            "x".to_string(),
            format!("{prefix}0"),
            format!("{prefix}1"),
            prefix.to_string(),
        ]),
    };
    for (x, v) in rows {
        match dir {
            Some(j) => t.push_nums(&[x, v[j as usize]]),
            None => t.push_nums(&[x, v[0], v[1], v[2]]),
        }
    }
    t
}

pub fn cmd_exit_prob(args: &IntervalArgs) -> CliResult<OutputTable> {
    let model = Model::from_args(&args.model)?;
    let iv = Interval::new(args.a, args.b)?;
    let rows = start_points(args, iv)?
        .into_iter()
        .map(|x| model.exit_prob(iv, x).map(|u| (x, [u.u0, u.u1, u.u])))
        .collect::<telex_core::Result<Vec<_>>>()?;
    Ok(triple_table("u", args.dir, rows))
}

pub fn cmd_exit_time(args: &IntervalArgs) -> CliResult<OutputTable> {
    let model = Model::from_args(&args.model)?;
    let iv = Interval::new(args.a, args.b)?;
    let rows = start_points(args, iv)?
        .into_iter()
        .map(|x| model.exit_time(iv, x).map(|h| (x, [h.h0, h.h1, h.h])))
        .collect::<telex_core::Result<Vec<_>>>()?;
    Ok(triple_table("h", args.dir, rows))
}

fn five_column(prefix: &str, dir: Option<u8>, v: [f64; 5]) -> OutputTable {
    let names: Vec<String> = (0..4)
        .map(|j| format!("{prefix}{j}"))
        .chain([prefix.to_string()])
        .collect();
    match dir {
        Some(j) => {
            let mut t = OutputTable::new([names[j as usize].clone()]);
            t.push_nums(&[v[j as usize]]);
            t
        }
        None => {
            let mut t = OutputTable::new(names);
            t.push_nums(&v);
            t
        }
    }
}

pub fn cmd_strip(args: &StripArgs) -> CliResult<OutputTable> {
    let prob = PlanarStripProblem::from_values(args.c, args.lambda, args.l)?;
    match args.quantity {
        StripQuantity::Prob => {
            let p = exit_prob_lower_strip(prob, args.y)?;
            Ok(five_column("p", args.dir, [p.p0, p.p1, p.p2, p.p3, p.p]))
        }
        StripQuantity::Time => {
            let h = mean_exit_time_strip(prob, args.y)?;
            Ok(five_column("h", args.dir, [h.h0, h.h1, h.h2, h.h3, h.h]))
        }
        StripQuantity::Density => strip_density(prob, args),
    }
}

fn strip_density(prob: PlanarStripProblem, args: &StripArgs) -> CliResult<OutputTable> {
    let Some(dir) = args.dir else {
        return usage("strip density needs --dir");
    };
    let j = Direction2D::from_index(dir as usize).expect("validated by the parser");
    let (lo, hi) = (
        args.z_min.unwrap_or(args.x - 3.0),
        args.z_max.unwrap_or(args.x + 3.0),
    );
    if !(lo < hi) || args.n < 2 {
        return usage("need z-min < z-max and --n >= 2");
    }
    if !(args.tol > 0.0) {
        return usage("--tol must be positive");
    }
    let opts = DensityOptions {
        tol: args.tol,
        budget: args.budget,
    };
    let zs: Vec<f64> = (0..args.n).map(|i| node(lo, hi, args.n, i)).collect();
    let values = zs
        .par_iter()
        .map(|&z| density_with(prob, j, args.x, args.y, z, opts))
        .collect::<telex_core::Result<Vec<_>>>()?;
    let mut t = OutputTable::new(["z", "value", "status"]);
    for (z, v) in zs.iter().zip(&values) {
        let status = if v.clamped > 0.0 { "clamped" } else { "ok" };
        t.push(vec![(*z).into(), v.value.into(), status.into()]);
    }
    if j == Direction2D::D3 {
        let m = telex_core::strip::singular_mass(prob, args.y)?;
        t.push(vec![f64::NAN.into(), m.into(), "singular_mass".into()]);
    }
    Ok(t)
}

enum SimSetup {
    Telegraph {
        sim: TelegraphSim,
        model: Model,
        iv: Interval,
        x: f64,
        start: Start<Direction1D>,
    },
    Strip {
        sim: StripSim,
        prob: PlanarStripProblem,
        y: f64,
        start: Start<Direction2D>,
    },
}

fn parse_start(dir: &str, count: usize) -> CliResult<Option<usize>> {
    if dir == "random" {
        return Ok(None);
    }
    match dir.parse::<usize>() {
        Ok(j) if j < count => Ok(Some(j)),
        _ => usage(format!(
            "--dir must be random or an integer below {count}, got `{dir}`"
        )),
    }
}

fn setup(args: &SimulateArgs) -> CliResult<SimSetup> {
    match args.model {
        SimModel::Telegraph | SimModel::TelegraphDrift => {
            let model = Model::from_args(&args.telegraph)?;
            if args.model == SimModel::Telegraph && matches!(model, Model::Drift(_)) {
                return usage(
                    "telegraph takes --c and --lambda; use telegraph-drift for the quartet",
                );
            }
            let iv = Interval::new(args.a, args.b)?;
            let Some(x) = args.x else {
                return usage("--x is required");
            };
            let start = match parse_start(&args.dir, 2)? {
                Some(j) => Start::Fixed(Direction1D::from_index(j).expect("checked")),
                None => Start::Uniform,
            };
            let sim = TelegraphSim::new(model.as_drift(), iv, x, start)?;
            Ok(SimSetup::Telegraph {
                sim,
                model,
                iv,
                x,
                start,
            })
        }
        SimModel::PlanarStrip => {
            let (Some(c), Some(lambda), Some(l), Some(y)) =
                (args.telegraph.c, args.telegraph.lambda, args.l, args.y)
            else {
                return usage("planar-strip needs --c --lambda --L --y");
            };
            let prob = PlanarStripProblem::from_values(c, lambda, l)?;
            let start = match parse_start(&args.dir, 4)? {
                Some(j) => Start::Fixed(Direction2D::from_index(j).expect("checked")),
                None => Start::Uniform,
            };
            let sim = StripSim::new(prob, args.x.unwrap_or(0.0), y, start)?;
            Ok(SimSetup::Strip {
                sim,
                prob,
                y,
                start,
            })
        }
    }
}

fn by_start1(start: Start<Direction1D>, v0: f64, v1: f64) -> f64 {
    match start {
        Start::Fixed(Direction1D::D0) => v0,
        Start::Fixed(Direction1D::D1) => v1,
        Start::Uniform => 0.5 * (v0 + v1),
    }
}

fn by_start2(start: Start<Direction2D>, v: [f64; 4]) -> f64 {
    match start {
        Start::Fixed(j) => v[j.index()],
        Start::Uniform => 0.25 * v.iter().sum::<f64>(),
    }
}

type Stat<'a, R> = (Statistic, Box<dyn Fn(&R) -> f64 + Sync + 'a>, Option<f64>);

fn telegraph_stats<'a>(
    model: Model,
    iv: Interval,
    x: f64,
    start: Start<Direction1D>,
) -> Vec<Stat<'a, ExitRecord>> {
    let u = model
        .exit_prob(iv, x)
        .ok()
        .map(|u| by_start1(start, u.u0, u.u1));
    let h = model
        .exit_time(iv, x)
        .ok()
        .map(|h| by_start1(start, h.h0, h.h1));
    let p = model.as_drift();
    let straight0 = (-p.lambda0() * (iv.b() - x) / p.c0()).exp();
    let straight1 = (-p.lambda1() * (x - iv.a()) / p.c1()).exp();
    vec![
        (
            Statistic::UpperExit,
            Box::new(|r: &ExitRecord| (r.side == IntervalSide::Upper) as u8 as f64),
            u,
        ),
        (Statistic::ExitTime, Box::new(|r: &ExitRecord| r.time), h),
        (
            Statistic::NoSwitch,
            Box::new(|r: &ExitRecord| (r.switches == 0) as u8 as f64),
            Some(by_start1(start, straight0, straight1)),
        ),
    ]
}

fn strip_stats<'a>(
    prob: PlanarStripProblem,
    y: f64,
    start: Start<Direction2D>,
) -> CliResult<Vec<Stat<'a, PlanarExitRecord>>> {
    let p = exit_prob_lower_strip(prob, y)?;
    let h = mean_exit_time_strip(prob, y)?;
    let k = prob.lambda() / prob.c();
    let straight = [0.0, (-k * (prob.height() - y)).exp(), 0.0, (-k * y).exp()];
    Ok(vec![
        (
            Statistic::BottomExit,
            Box::new(|r: &PlanarExitRecord| (r.side == StripSide::Bottom) as u8 as f64),
            Some(by_start2(start, [p.p0, p.p1, p.p2, p.p3])),
        ),
        (
            Statistic::ExitTime,
            Box::new(|r: &PlanarExitRecord| r.time),
            Some(by_start2(start, [h.h0, h.h1, h.h2, h.h3])),
        ),
        (
            Statistic::NoSwitch,
            Box::new(|r: &PlanarExitRecord| (r.switches == 0) as u8 as f64),
            Some(by_start2(start, straight)),
        ),
    ])
}

fn run_stats<S: PathSimulator>(
    sim: &S,
    stats: Vec<Stat<'_, S::Record>>,
    args: &SimulateArgs,
) -> CliResult<OutputTable>
where
    S::Record: PathRow,
{
    let stats: Vec<_> = match args.statistic {
        Some(s) => {
            let picked: Vec<_> = stats
                .into_iter()
                .filter(|(name, _, _)| *name == s)
                .collect();
            if picked.is_empty() {
                return usage(format!(
                    "statistic {} does not apply to this model",
                    s.name()
                ));
            }
            picked
        }
        None => stats,
    };
    let fns: Vec<telex_core::mc::Statistic<S::Record>> =
        stats.iter().map(|(_, f, _)| f.as_ref()).collect();
    let est = estimate_many(sim, &fns, args.paths, args.seed)?;
    if let Some(path) = &args.emit_paths {
        let records = simulate_records(sim, args.paths, args.seed)?;
        write_path_csv(BufWriter::new(File::create(path)?), &records)?;
    }
    let mut t = OutputTable::new([
        "statistic",
        "estimate",
        "std_error",
        "closed_form",
        "z_score",
        "paths",
        "seed",
        "status",
    ]);
    for ((name, _, closed), e) in stats.iter().zip(&est) {
        let (closed, z, status) = match closed {
            Some(v) => (*v, e.z_score(*v), "ok"),
            None => (f64::NAN, f64::NAN, "no_closed_form"),
        };
        t.push(vec![
            name.name().into(),
            e.mean.into(),
            e.std_error.into(),
            closed.into(),
            z.into(),
            Cell::Int(e.n_paths),
            Cell::Int(e.seed),
            status.into(),
        ]);
    }
    Ok(t)
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<OutputTable> {
    if args.paths < 2 {
        return usage("--paths must be at least 2");
    }
    match setup(args)? {
        SimSetup::Telegraph {
            sim,
            model,
            iv,
            x,
            start,
        } => run_stats(&sim, telegraph_stats(model, iv, x, start), args),
        SimSetup::Strip {
            sim,
            prob,
            y,
            start,
        } => run_stats(&sim, strip_stats(prob, y, start)?, args),
    }
}
