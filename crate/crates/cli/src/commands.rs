//! One function per subcommand. Each returns the rendered artifact; the
//! caller does all the writing.

use num_traits::ToPrimitive;
use plancherel::asymptotics::{depoissonize_contour, edge_cdf_exact, limit_density, limit_shape_omega, poisson_polynomial, scaled_profile};
use plancherel::exact::{corr_exact_descent, corr_exact_frobenius, corr_poisson_det};
use plancherel::fredholm::{airy_gap, count_table, edge_gap, joint_edge_cdf, Interval};
use plancherel::kernels::{airy_kernel, diagonal_kernel_d, kernel_j, kernel_k, kernel_l, sine_kernel, JMode, Offset};
use plancherel::lattice::{HalfInt, LatticeSet};
use plancherel::sampling::{chunked, sample_plancherel, sample_plancherel_with, sample_poissonized_with};
use plancherel::verify::verify_suite;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::config::{Cli, Command, Family, Options, RunConfig};
use crate::output::{Cell, Table};

/// Default Gauss–Legendre order for Airy determinants.
const AIRY_ORDER: usize = 60;
const DEFAULT_NODES: usize = 512;
const DEFAULT_COUNT_BOUND: usize = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] plancherel::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Library(e) if e.is_numeric() => 1,
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

pub struct Output {
    pub text: String,
    pub success: bool,
}

pub fn dispatch(cli: &Cli) -> Result<Output> {
    let o = &cli.opts;
    let meta = serde_json::to_value(RunConfig { subcommand: &cli.command, opts: o }).expect("serializable config");
    let table = match &cli.command {
        Command::Kernel => kernel(o)?,
        Command::Corr => corr(o)?,
        Command::Gap => gap(o)?,
        Command::Counts => counts(o)?,
        Command::EdgeCdf => edge_cdf(o)?,
        Command::Sample => sample(o)?,
        Command::Shape => shape(o)?,
        Command::Depoissonize => depoissonize(o)?,
        Command::Verify { suite, fast } => {
            let report = verify_suite(*suite, *fast);
            let mut v = serde_json::to_value(&report).expect("serializable report");
            v["pass"] = json!(report.pass());
            let mut text = serde_json::to_string_pretty(&json!({ "meta": meta, "report": v })).expect("serializable");
            text.push('\n');
            return Ok(Output { text, success: report.pass() });
        }
    };
    Ok(Output { text: table.render(o.format, meta), success: true })
}

fn require<T: Copy>(v: Option<T>, flag: &str, cmd: &str) -> Result<T> {
    v.ok_or_else(|| CliError::Usage(format!("{cmd} requires --{flag}")))
}

fn integer(v: f64, what: &str) -> Result<i64> {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 {
        Ok(v as i64)
    } else {
        usage(format!("{what} must be an integer, got {v}"))
    }
}

/// `--points` if given, otherwise the single flag value.
fn list(points: &Option<Vec<f64>>, single: Option<f64>, flag: &str, cmd: &str) -> Result<Vec<f64>> {
    match (points, single) {
        (Some(p), _) if !p.is_empty() => Ok(p.clone()),
        (_, Some(v)) => Ok(vec![v]),
        _ => usage(format!("{cmd} requires --{flag} or --points")),
    }
}

fn joined(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn kernel(o: &Options) -> Result<Table> {
    let family = require(o.family, "family", "kernel")?;
    let xs = list(&o.points, o.x, "x", "kernel")?;
    let y = o.y;
    let need_y = || require(y, "y", "kernel");
    let need_theta = || require(o.theta, "theta", "kernel");
    let values: Vec<Result<f64>> = xs
        .par_iter()
        .map(|&x| -> Result<f64> {
            Ok(match family {
                Family::J => kernel_j(integer(x, "x")?, integer(need_y()?, "y")?, need_theta()?, JMode::Auto)?,
                Family::K => kernel_k(HalfInt::from_f64(x)?, HalfInt::from_f64(need_y()?)?, need_theta()?)?,
                Family::L => kernel_l(HalfInt::from_f64(x)?, HalfInt::from_f64(need_y()?)?, need_theta()?)?,
                Family::S => {
                    let a = o.a.as_ref().and_then(|a| a.first().copied()).unwrap_or(0.0);
                    let k = if x.is_infinite() { Offset::Infinite } else { Offset::Finite(integer(x, "x")?) };
                    sine_kernel(k, a)
                }
                Family::D => diagonal_kernel_d(HalfInt::from_f64(x)?, HalfInt::from_f64(need_y()?)?),
                Family::A => airy_kernel(x, need_y()?),
            })
        })
        .collect();
    let mut t = Table::new(&["family", "x", "y", "value"]);
    for (x, v) in xs.iter().zip(values) {
        let y = y.map_or(Cell::Text(String::new()), Cell::Float);
        t.push(vec![format!("{family:?}").into(), (*x).into(), y, v?.into()]);
    }
    Ok(t)
}

fn lattice_set(points: &[f64]) -> Result<LatticeSet> {
    if points.iter().all(|p| p.fract() == 0.0) {
        Ok(LatticeSet::Integer(points.iter().map(|&p| integer(p, "point")).collect::<Result<_>>()?))
    } else {
        Ok(LatticeSet::Half(points.iter().map(|&p| HalfInt::from_f64(p)).collect::<plancherel::Result<_>>()?))
    }
}

fn corr(o: &Options) -> Result<Table> {
    let points = o.points.clone().unwrap_or_default();
    let set = lattice_set(&points)?;
    match (o.n, o.theta) {
        (Some(n), None) => {
            let r = match &set {
                LatticeSet::Integer(x) => corr_exact_descent(n, x)?,
                LatticeSet::Half(x) => corr_exact_frobenius(n, x)?,
            };
            let mut t = Table::new(&["n", "set", "value", "exact"]);
            t.push(vec![n.into(), joined(&points).into(), r.to_f64().unwrap_or(f64::NAN).into(), r.to_string().into()]);
            Ok(t)
        }
        (None, Some(theta)) => {
            let mut t = Table::new(&["theta", "set", "value"]);
            t.push(vec![theta.into(), joined(&points).into(), corr_poisson_det(theta, &set)?.into()]);
            Ok(t)
        }
        _ => usage("corr requires exactly one of --n and --theta"),
    }
}

fn gap(o: &Options) -> Result<Table> {
    let ss = list(&o.points, o.s, "s", "gap")?;
    let values: Vec<Result<f64>> = match o.theta {
        Some(theta) => ss.par_iter().map(|&s| Ok(edge_gap(theta, integer(s, "s")?, o.eps)?)).collect(),
        None => {
            let order = o.count.unwrap_or(AIRY_ORDER);
            ss.par_iter().map(|&s| Ok(airy_gap(s, order)?)).collect()
        }
    };
    let mut t = Table::new(&["theta", "s", "value"]);
    for (s, v) in ss.iter().zip(values) {
        t.push(vec![o.theta.map_or(Cell::Text("inf".into()), Cell::Float), (*s).into(), v?.into()]);
    }
    Ok(t)
}

/// Intervals `[a_i, a_{i+1})`; one threshold, or a trailing `inf`, gives a ray.
fn intervals(a: &[f64]) -> Result<Vec<Interval>> {
    match a {
        [] => usage("counts requires --a"),
        [lo] => Ok(vec![Interval::ray(integer(*lo, "threshold")?)]),
        _ => a
            .windows(2)
            .map(|w| {
                let lo = integer(w[0], "threshold")?;
                if w[1] == f64::INFINITY {
                    Ok(Interval::ray(lo))
                } else {
                    let hi = integer(w[1], "threshold")?;
                    if hi <= lo {
                        return usage("thresholds must increase");
                    }
                    Ok(Interval::finite(lo, hi))
                }
            })
            .collect(),
    }
}

fn counts(o: &Options) -> Result<Table> {
    let theta = require(o.theta, "theta", "counts")?;
    let ints = intervals(o.a.as_deref().unwrap_or_default())?;
    let bound = o.count.unwrap_or(DEFAULT_COUNT_BOUND);
    let table = count_table(theta, &ints, &vec![bound; ints.len()], o.eps)?;
    let names: Vec<String> = (1..=ints.len()).map(|j| format!("n{j}")).collect();
    let mut header: Vec<&str> = names.iter().map(String::as_str).collect();
    header.extend(["probability", "tail_bound"]);
    let mut t = Table::new(&header);
    for (c, p) in &table.rows {
        let mut row: Vec<Cell> = c.iter().map(|&k| k.into()).collect();
        row.push((*p).into());
        row.push(table.tail_bound.into());
        t.push(row);
    }
    Ok(t)
}

fn edge_cdf(o: &Options) -> Result<Table> {
    let x = o.points.clone().filter(|p| !p.is_empty()).ok_or_else(|| CliError::Usage("edge-cdf requires --points".into()))?;
    match (o.n, o.theta) {
        (Some(n), None) => {
            let xi: Vec<i64> = x.iter().map(|&v| integer(v, "threshold")).collect::<Result<_>>()?;
            let r = edge_cdf_exact(n, &xi)?;
            let mut t = Table::new(&["n", "x", "value", "exact"]);
            t.push(vec![n.into(), joined(&x).into(), r.to_f64().unwrap_or(f64::NAN).into(), r.to_string().into()]);
            Ok(t)
        }
        (None, Some(theta)) => {
            let mut t = Table::new(&["theta", "x", "value"]);
            t.push(vec![theta.into(), joined(&x).into(), joint_edge_cdf(theta, &x, o.eps)?.into()]);
            Ok(t)
        }
        _ => usage("edge-cdf requires exactly one of --n and --theta"),
    }
}

fn parts_text(p: &[usize]) -> String {
    p.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn sample(o: &Options) -> Result<Table> {
    let count = o.count.unwrap_or(1);
    let draws = match (o.n, o.theta) {
        (Some(n), None) => chunked(o.seed, count, |rng| Ok(sample_plancherel_with(n, rng))),
        (None, Some(theta)) => chunked(o.seed, count, |rng| sample_poissonized_with(theta, rng)),
        _ => return usage("sample requires exactly one of --n and --theta"),
    };
    let mut t = Table::new(&["index", "size", "parts"]);
    for (i, d) in draws.into_iter().enumerate() {
        let p = d?;
        t.push(vec![i.into(), p.size().into(), parts_text(p.parts()).into()]);
    }
    Ok(t)
}

fn shape(o: &Options) -> Result<Table> {
    let us = o.points.clone().filter(|p| !p.is_empty()).ok_or_else(|| CliError::Usage("shape requires --points".into()))?;
    let lambda = o.n.map(|n| sample_plancherel(n, o.seed));
    let mut header = vec!["u", "omega", "density"];
    if lambda.is_some() {
        header.push("profile");
    }
    let mut t = Table::new(&header);
    for &u in &us {
        let mut row: Vec<Cell> = vec![u.into(), limit_shape_omega(u).into(), limit_density(u).into()];
        if let Some(l) = &lambda {
            row.push(scaled_profile(l, u).into());
        }
        t.push(row);
    }
    Ok(t)
}

fn depoissonize(o: &Options) -> Result<Table> {
    let n = require(o.n, "n", "depoissonize")?;
    let nodes = o.count.unwrap_or(DEFAULT_NODES);
    let d = match &o.points {
        Some(c) if !c.is_empty() => depoissonize_contour(poisson_polynomial(c), n, nodes)?,
        // B(z) = e^{-z/2}, so b_n = 2^{-n}
        _ => depoissonize_contour(|z| (-z / 2.0).exp(), n, nodes)?,
    };
    if d.warning {
        eprintln!("warning: contour value changed by {:e} when the nodes were doubled", d.doubling_change);
    }
    let mut t = Table::new(&["n", "nodes", "value", "doubling_change", "warning"]);
    t.push(vec![n.into(), nodes.into(), d.value.into(), d.doubling_change.into(), d.warning.into()]);
    Ok(t)
}
