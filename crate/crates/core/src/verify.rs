//! Named numerical checks grouped into suites. Each criterion is a list of
//! checks `observed ≤ tolerance`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{
    bulk_convergence, bulk_determinants, commutation_check, depoissonize_contour, edge_grid_error, growth_monotonicity,
    limit_density, profile_deviation, sandwich_check,
};
use crate::error::{Error, Result};
use crate::exact::{corr_poisson_det, partition_table, WindowOracle};
use crate::fredholm::{
    airy_gap, airy_kth_cdf, count_table, eigenvalues, fredholm_det_l, joint_edge_cdf, l_window_for, resolvent_residual,
    Interval, Sites, TruncatedOperator,
};
use crate::kernels::{complement_kernel, kernel_k_with, DiscreteBessel};
use crate::lattice::{HalfInt, LatticeSet, Window};
use crate::partition::{descent_set, dimension, factorial, hook_determinant};
use crate::sampling::{sample_first_rows, scale_row, SampleBatch, SizeParam};

/// Quadrature order for Tracy–Widom values.
const AIRY_ORDER: usize = 60;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// False for values reported alongside a criterion without deciding it.
    pub gating: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        Check { name: name.into(), observed, tolerance, pass: observed <= tolerance, gating: true }
    }

    pub fn reported(name: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        Check { gating: false, ..Check::at_most(name, observed, tolerance) }
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Check { name: format!("{}: {err}", name.into()), observed: f64::NAN, tolerance: 0.0, pass: false, gating: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl Criterion {
    pub fn pass(&self) -> bool {
        let mut gating = self.checks.iter().filter(|c| c.gating).peekable();
        gating.peek().is_some() && gating.all(|c| c.pass)
    }
}

pub const CRITERIA: [(u8, &str); 14] = [
    (1, "exact normalization"),
    (2, "determinantal hook formula"),
    (3, "descent correlations equal det J"),
    (4, "Frobenius correlations equal conjugated J minors"),
    (5, "det(1+L) and resolvent identity"),
    (6, "positivity and trace of [J]"),
    (7, "commuting difference operator"),
    (8, "bulk sine-kernel limit"),
    (9, "edge Airy-kernel limit"),
    (10, "poissonized edge CDF vs Tracy-Widom"),
    (11, "count distributions vs enumeration"),
    (12, "Monte Carlo edge fluctuations"),
    (13, "limit shape and descent density"),
    (14, "depoissonization"),
];

/// Runs one criterion. `fast` shrinks Monte Carlo sizes and grids.
pub fn criterion(id: u8, fast: bool) -> Criterion {
    let title = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown");
    let checks = match id {
        1 => normalization(),
        2 => hook_formula(),
        3 => descent_correlations(fast),
        4 => frobenius_correlations(),
        5 => l_identities(),
        6 => positivity_and_trace(),
        7 => vec![guard("commutator θ=4 s=0 window=60", commutation_check(4.0, 0, 60), 1e-8)],
        8 => bulk_limit(fast),
        9 => edge_limit(),
        10 => edge_cdf_vs_tw(),
        11 => count_law(),
        12 => monte_carlo_edge(fast),
        13 => limit_shape(fast),
        14 => depoissonization(),
        _ => vec![Check::failed(format!("criterion {id}"), &Error::InvalidArgument("no such criterion".into()))],
    };
    Criterion { id, title, checks }
}

fn guard(name: &str, r: Result<f64>, tol: f64) -> Check {
    match r {
        Ok(v) => Check::at_most(name, v, tol),
        Err(e) => Check::failed(name, &e),
    }
}

fn collect(name: &str, r: Result<Vec<Check>>) -> Vec<Check> {
    r.unwrap_or_else(|e| vec![Check::failed(name, &e)])
}

fn normalization() -> Vec<Check> {
    let bad = (0..=20usize)
        .filter(|&n| {
            let t = partition_table(n).expect("n ≤ 20 is enumerable");
            let total = t.entries.iter().fold(num_bigint::BigUint::zero(), |a, e| a + &e.1);
            total != t.factorial
        })
        .count();
    vec![Check::at_most("n ≤ 20 with Σ M_n ≠ 1", bad as f64, 0.0)]
}

fn hook_formula() -> Vec<Check> {
    let bad: usize = (0..=12usize)
        .map(|n| {
            let t = partition_table(n).expect("enumerable");
            t.entries
                .iter()
                .filter(|(p, _)| hook_determinant(p) != BigRational::new(dimension(p).into(), factorial(n).into()))
                .count()
        })
        .sum();
    vec![Check::at_most("λ ⊢ n ≤ 12 with hook determinant ≠ dim/n!", bad as f64, 0.0)]
}

fn subsets(points: &[i64], max: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let n = points.len();
    for a in 0..n {
        out.push(vec![points[a]]);
        if max >= 2 {
            for b in a + 1..n {
                out.push(vec![points[a], points[b]]);
                if max >= 3 {
                    for c in b + 1..n {
                        out.push(vec![points[a], points[b], points[c]]);
                    }
                }
            }
        }
    }
    out
}

fn descent_correlations(fast: bool) -> Vec<Check> {
    collect("descent correlations", (|| {
        let oracle = WindowOracle::descents(Window::new(-6, 6)?, crate::exact::ENUMERATION_CAP)?;
        let sites: Vec<i64> = (-6..=6).collect();
        let sets = subsets(&sites, if fast { 2 } else { 3 });
        let mut checks = Vec::new();
        for theta in [0.5, 1.0, 2.0, 4.0] {
            let mut worst = f64::NEG_INFINITY;
            for x in &sets {
                let set = LatticeSet::Integer(x.clone());
                let series = oracle.poisson(theta, &set, 80)?;
                let det = corr_poisson_det(theta, &set)?;
                worst = worst.max((det - series.value).abs() - series.remainder);
            }
            checks.push(Check::at_most(format!("θ={theta}: max(|det J - series| - remainder)"), worst, 1e-9));
        }
        Ok(checks)
    })())
}

fn frobenius_correlations() -> Vec<Check> {
    collect("Frobenius correlations", (|| {
        let half: Vec<HalfInt> = (-6..6).map(HalfInt::above).collect();
        let idx: Vec<i64> = (0..half.len() as i64).collect();
        let mut checks = Vec::new();
        for theta in [0.5, 1.0, 2.0, 4.0] {
            let db = DiscreteBessel::new(theta, 8)?;
            let mut worst = 0.0f64;
            for s in subsets(&idx, 3) {
                let x: Vec<HalfInt> = s.iter().map(|&i| half[i as usize]).collect();
                let m = x.len();
                let k = DMatrix::from_fn(m, m, |i, j| kernel_k_with(&db, x[i], x[j]));
                // J on x - ½, complemented on the negative points, conjugated by ε
                let sites: Vec<i64> = x.iter().map(|p| p.floor()).collect();
                let neg: Vec<i64> = sites.iter().copied().filter(|&v| v < 0).collect();
                let c = complement_kernel(&db.matrix(&sites), &sites, &neg)?;
                let conj = DMatrix::from_fn(m, m, |i, j| if i == j { c[(i, j)] } else { x[i].epsilon() * x[j].epsilon() * c[(i, j)] });
                worst = worst.max((k.determinant() - conj.determinant()).abs());
            }
            checks.push(Check::at_most(format!("θ={theta}: max |det K - det conjugated J|"), worst, 1e-10));
        }
        Ok(checks)
    })())
}

fn l_identities() -> Vec<Check> {
    let mut checks = Vec::new();
    for theta in [0.5, 1.0, 2.0, 4.0] {
        let reach = l_window_for(theta, 1e-14);
        checks.push(guard(
            &format!("θ={theta}: |det(1+L) - e^θ| / e^θ"),
            fredholm_det_l(theta, reach).map(|d| (d - theta.exp()).abs() / theta.exp()),
            1e-8,
        ));
        checks.push(guard(&format!("θ={theta}: max |K - L(1+L)^-1|"), resolvent_residual(theta, reach), 1e-8));
    }
    checks
}

fn positivity_and_trace() -> Vec<Check> {
    collect("positivity", (|| {
        let theta = 4.0;
        let sites: Vec<i64> = (-40..=40).collect();
        let db = DiscreteBessel::new(theta, 41)?;
        let op = TruncatedOperator {
            matrix: db.matrix(&sites),
            tail_bound: crate::special::bessel_tail_bound(theta, 40, 0),
            sites: Sites::Integer { group: vec![0; sites.len()], points: sites },
        };
        let ev = eigenvalues(&op);
        let below = (-ev[0]).max(0.0);
        let above = (ev[ev.len() - 1] - 1.0).max(0.0);
        // Σ_{k≥-40} J(k,k) = Σ_{l≥1} l J_{l-40}²
        let weighted = db.weighted_tail(-40, 0);
        let trace_gap = ((op.trace() - weighted).abs() - op.tail_bound).max(0.0);
        Ok(vec![
            Check::at_most("distance of spectrum below 0", below, 1e-8),
            Check::at_most("distance of spectrum above 1", above, 1e-8),
            Check::at_most("trace excess over tail bound", trace_gap, 1e-12),
        ])
    })())
}

fn bulk_limit(fast: bool) -> Vec<Check> {
    collect("bulk", (|| {
        let grid: Vec<f64> = if fast { vec![1e2, 1e4, 1e6] } else { vec![1e2, 1e3, 1e4, 1e5, 1e6] };
        let reports = (0..=3).map(|d| bulk_convergence(0.0, d, &grid)).collect::<Result<Vec<_>>>()?;
        let at = |i: usize| reports.iter().map(|r| r.rows[i].error).fold(0.0, f64::max);
        let last = grid.len() - 1;
        let mut checks = vec![
            Check::at_most("max_d |J - S(d,0)| at n=1e6", at(last), 1e-2),
            Check::at_most("error(1e6) / error(1e2)", at(last) / at(0), 0.5),
        ];
        let offsets: Vec<i64> = (0..5).collect();
        let mut worst = 0.0f64;
        for a in [-1.0, 0.0, 1.0] {
            for x in subsets(&offsets, 3) {
                let (dj, ds) = bulk_determinants(a, &x, 1e6)?;
                worst = worst.max((dj - ds).abs());
            }
        }
        checks.push(Check::at_most("max |det J - det S| for |X| ≤ 3 at n=1e6", worst, 2e-2));
        Ok(checks)
    })())
}

fn edge_limit() -> Vec<Check> {
    collect("edge", (|| {
        let grid = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0];
        let small = edge_grid_error(1e2, &grid)?;
        let large = edge_grid_error(1e4, &grid)?;
        Ok(vec![
            Check::at_most("max grid error at r=1e4", large, 0.05),
            Check::at_most("error(r=1e4) / error(r=1e2)", large / small, 0.5),
        ])
    })())
}

/// Distance from `F` to the Tracy–Widom values over the lattice bracket
/// `[s(k⁻), s(k⁺)]`, and the literal `|F - F_2(s)|`.
pub fn bracketed_edge_error(theta: f64, s: f64) -> Result<(f64, f64)> {
    let c = theta.powf(1.0 / 6.0);
    let centre = 2.0 * theta.sqrt();
    let a = centre + s * c;
    let f = joint_edge_cdf(theta, &[a], 1e-12)?;
    let lo = airy_gap((a.ceil() - 1.0 - centre) / c, AIRY_ORDER)?;
    let hi = airy_gap((a.ceil() - centre) / c, AIRY_ORDER)?;
    let literal = (f - airy_gap(s, AIRY_ORDER)?).abs();
    Ok(((lo - f).max(f - hi).max(0.0), literal))
}

fn edge_cdf_vs_tw() -> Vec<Check> {
    [-2.0, -1.0, 0.0, 1.0, 2.0]
        .iter()
        .flat_map(|&s| match bracketed_edge_error(1e4, s) {
            Ok((b, lit)) => vec![
                Check::at_most(format!("s={s}: bracketed |F(θ=1e4) - F2|"), b, 0.02),
                Check::reported(format!("s={s}: literal |F(θ=1e4) - F2(s)|"), lit, 0.02),
            ],
            Err(e) => vec![Check::failed(format!("s={s}"), &e)],
        })
        .collect()
}

fn count_law() -> Vec<Check> {
    collect("counts", (|| {
        let mut checks = Vec::new();
        for (a, b, c) in [(-2i64, 1i64, 4i64), (0, 3, 6)] {
            let oracle = WindowOracle::descents(Window::new(a, c - 1)?, crate::exact::ENUMERATION_CAP)?;
            let (law, tail) = oracle.poisson_count_law(1.0, &[(a, b), (b, c)])?;
            let table = count_table(1.0, &[Interval::finite(a, b), Interval::finite(b, c)], &[2, 2], 1e-14)?;
            let mut worst = 0.0f64;
            for n1 in 0..=2 {
                for n2 in 0..=2 {
                    let want = law.get(&vec![n1, n2]).copied().unwrap_or(0.0);
                    let got = table.get(&[n1, n2]).unwrap_or(f64::NAN);
                    worst = worst.max((got - want).abs() - tail);
                }
            }
            checks.push(Check::at_most(format!("[{a},{b}) [{b},{c}): max |P - oracle|"), worst, 1e-6));
            let full = count_table(1.0, &[Interval::finite(a, b), Interval::finite(b, c)], &[3, 3], 1e-14)?;
            checks.push(Check::at_most(format!("[{a},{b}) [{b},{c}): |total mass - 1|"), (full.total() - 1.0).abs(), 1e-8));
        }
        Ok(checks)
    })())
}

/// Kolmogorov–Smirnov distance between integer rows `l` scaled at `n` and a
/// continuous CDF. Returns `(literal, bracketed)`: the bracketed distance
/// compares `P(l ≤ m)` with the range of the CDF over `[s(m), s(m+1)]`,
/// which is the spread allowed by the lattice.
pub fn lattice_ks<F: Fn(f64) -> f64 + Sync>(rows: &[usize], n: f64, cdf: F) -> (f64, f64) {
    let mut v = rows.to_vec();
    v.sort_unstable();
    let total = v.len() as f64;
    let (lo, hi) = (v[0].saturating_sub(1), v[v.len() - 1] + 1);
    let targets: Vec<f64> = (lo..=hi + 1).into_par_iter().map(|m| cdf(scale_row(m, n))).collect();
    let (mut literal, mut bracketed) = (0.0f64, 0.0f64);
    let mut idx = 0;
    for m in lo..=hi {
        while idx < v.len() && v[idx] <= m {
            idx += 1;
        }
        let g = idx as f64 / total;
        let (a, b) = (targets[m - lo], targets[m + 1 - lo]);
        literal = literal.max((g - a).abs()).max((g - b).abs());
        bracketed = bracketed.max((a - g).max(g - b).max(0.0));
    }
    (literal, bracketed)
}

fn monte_carlo_edge(fast: bool) -> Vec<Check> {
    let (c1, c2) = if fast { (2_000, 500) } else { (10_000, 2_000) };
    let rows = sample_first_rows(10_000, c1, 20_240_901);
    let (lit1, br1) = lattice_ks(&rows, 1e4, |s| airy_gap(s, AIRY_ORDER).unwrap_or(f64::NAN));
    let mut checks = vec![
        Check::at_most(format!("KS λ̃₁ n=1e4 ({c1} samples), bracketed"), br1, 0.1),
        Check::reported("KS λ̃₁ literal", lit1, 0.1),
    ];
    match SampleBatch::generate(20_240_902, SizeParam::Fixed(4000), c2) {
        Ok(batch) => {
            let r2: Vec<usize> = batch.samples.iter().map(|p| p.row(2)).collect();
            let (lit2, br2) = lattice_ks(&r2, 4000.0, |s| airy_kth_cdf(s, 2, AIRY_ORDER).unwrap_or(f64::NAN));
            checks.push(Check::at_most(format!("KS λ̃₂ n=4000 ({c2} samples), bracketed"), br2, 0.15));
            checks.push(Check::reported("KS λ̃₂ literal", lit2, 0.15));
            checks.push(guard("KS λ̃₂ samples vs exact θ=4000 law", finite_second_row_ks(&r2, 4000.0), 0.1));
        }
        Err(e) => checks.push(Check::failed("λ̃₂ batch", &e)),
    }
    checks
}

/// KS distance between sampled `λ_2` and its exact law under `M^θ`, from the
/// joint edge distribution with `λ_1` unconstrained in practice.
fn finite_second_row_ks(rows: &[usize], theta: f64) -> Result<f64> {
    let big = 2.0 * theta.sqrt() + 15.0 * theta.powf(1.0 / 6.0);
    let lo = rows.iter().copied().min().unwrap_or(0);
    let hi = rows.iter().copied().max().unwrap_or(0);
    let law: Vec<f64> = (lo..=hi)
        .into_par_iter()
        .map(|m| joint_edge_cdf(theta, &[big, (m + 1) as f64], 1e-12))
        .collect::<Result<_>>()?;
    let total = rows.len() as f64;
    let mut worst = law[0].max(0.0);
    for (i, m) in (lo..=hi).enumerate() {
        let emp = rows.iter().filter(|&&v| v <= m).count() as f64 / total;
        worst = worst.max((emp - law[i]).abs());
        if i > 0 {
            let below = rows.iter().filter(|&&v| v < m).count() as f64 / total;
            worst = worst.max((below - law[i - 1]).abs());
        }
    }
    Ok(worst)
}

/// Half-width of the site window averaged for the empirical descent density.
pub const DENSITY_HALF_WIDTH: i64 = 5;

fn limit_shape(fast: bool) -> Vec<Check> {
    collect("limit shape", (|| {
        let n = 10_000usize;
        let shapes = SampleBatch::generate(20_240_903, SizeParam::Fixed(n), 20)?;
        let mut dev: Vec<f64> = shapes.samples.iter().map(profile_deviation).collect();
        dev.sort_by(f64::total_cmp);
        let median = 0.5 * (dev[9] + dev[10]);
        let mut checks = vec![Check::at_most("median sup |ω - Ω| over 20 samples", median, 0.1)];
        let count = if fast { 200 } else { 1000 };
        let batch = SampleBatch::generate(20_240_904, SizeParam::Fixed(n), count)?;
        let root = (n as f64).sqrt();
        for a in [-1.5, -1.0, 0.0, 1.0, 1.5] {
            let x = (a * root).round() as i64;
            let w = Window::new(x - DENSITY_HALF_WIDTH, x + DENSITY_HALF_WIDTH)?;
            let e = batch.estimate(|p| {
                let d = descent_set(p, w);
                (w.lo..=w.hi).filter(|&k| d.contains(k)).count() as f64 / w.len() as f64
            })?;
            checks.push(Check::at_most(format!("a={a}: |density - ϱ(∞,a)|"), (e.mean - limit_density(a)).abs(), 0.03));
        }
        Ok(checks)
    })())
}

fn depoissonization() -> Vec<Check> {
    let mut checks = vec![guard(
        "contour b_20 for B = e^{-θ/2}",
        depoissonize_contour(|z| (-z / 2.0).exp(), 20, 512).map(|r| (r.value - 2f64.powi(-20)).abs()),
        1e-10,
    )];
    let mut xs: Vec<Vec<i64>> = (1..=13).map(|x| vec![x]).collect();
    for a in 1..=8 {
        for b in 1..=a {
            xs.push(vec![a, b]);
        }
    }
    for n in [8usize, 10, 12] {
        let r: Result<f64> = xs.iter().try_fold(0.0f64, |worst, x| {
            let s = sandwich_check(x, n)?;
            Ok(worst.max(s.lower - s.exact).max(s.exact - s.upper).max(0.0))
        });
        checks.push(guard(&format!("n={n}: largest sandwich violation"), r, 0.0));
    }
    let grid: Vec<i64> = (0..=15).collect();
    checks.push(match growth_monotonicity(14, &grid) {
        Ok(Ok(_)) => Check::at_most("F_{n+1} ≤ F_n for n ≤ 13", 0.0, 0.0),
        Ok(Err((n, x))) => Check::at_most(format!("F_{{n+1}} ≤ F_n fails at n={n}, x={x:?}"), 1.0, 0.0),
        Err(e) => Check::failed("growth monotonicity", &e),
    });
    checks
}

/// A named group of criteria.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Exact,
    Kernels,
    Fredholm,
    Bulk,
    Edge,
    Sampling,
    All,
}

impl Suite {
    pub fn criteria(self) -> Vec<u8> {
        match self {
            Suite::Exact => vec![1, 2, 3, 14],
            Suite::Kernels => vec![4, 7],
            Suite::Fredholm => vec![5, 6, 11],
            Suite::Bulk => vec![8],
            Suite::Edge => vec![9, 10],
            Suite::Sampling => vec![12, 13],
            Suite::All => (1..=14).collect(),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exact" => Suite::Exact,
            "kernels" => Suite::Kernels,
            "fredholm" => Suite::Fredholm,
            "bulk" => Suite::Bulk,
            "edge" => Suite::Edge,
            "sampling" => Suite::Sampling,
            "all" => Suite::All,
            _ => return Err(Error::InvalidArgument(format!("unknown suite {s:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Exact => "exact",
            Suite::Kernels => "kernels",
            Suite::Fredholm => "fredholm",
            Suite::Bulk => "bulk",
            Suite::Edge => "edge",
            Suite::Sampling => "sampling",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub fast: bool,
    pub criteria: Vec<Criterion>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.criteria.iter().all(Criterion::pass)
    }
}

pub fn verify_suite(suite: Suite, fast: bool) -> SuiteReport {
    SuiteReport { suite, fast, criteria: suite.criteria().into_iter().map(|id| criterion(id, fast)).collect() }
}
