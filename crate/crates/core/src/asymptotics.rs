//! Asymptotic regimes in numbers: limit shape, bulk sine-kernel and edge Airy
//! limits of the discrete Bessel kernel, depoissonization, and the commuting
//! difference operator.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exact::{partition_table, poisson_tail, ENUMERATION_CAP};
use crate::fredholm::det_one_minus;
use crate::kernels::{airy_kernel, diagonal_kernel_d, sine_kernel, DiscreteBessel, Offset};
use crate::lattice::HalfInt;
use crate::partition::Partition;
use crate::special::ln_factorial;

/// `Ω(u)`.
pub fn limit_shape_omega(u: f64) -> f64 {
    if u.abs() >= 2.0 {
        return u.abs();
    }
    2.0 / PI * (u * (u / 2.0).asin() + (4.0 - u * u).sqrt())
}

/// `ϱ(∞, a) = arccos(a/2)/π`, clamped to 0 and 1 outside `[-2, 2]`.
pub fn limit_density(a: f64) -> f64 {
    if a >= 2.0 {
        0.0
    } else if a <= -2.0 {
        1.0
    } else {
        (a / 2.0).acos() / PI
    }
}

/// Boundary of the diagram in rotated coordinates, scaled by `1/√n`, at `u`.
///
/// The unscaled profile has slope `-1` on `[k, k+1]` when `k` is a descent
/// `λ_i - i`, and `+1` otherwise.
pub fn scaled_profile(lambda: &Partition, u: f64) -> f64 {
    let n = lambda.size().max(1) as f64;
    profile(lambda, u * n.sqrt()) / n.sqrt()
}

fn profile(lambda: &Partition, t: f64) -> f64 {
    let len = lambda.length() as i64;
    let first = lambda.row(1) as i64;
    if t <= -len as f64 || t >= first as f64 {
        return t.abs();
    }
    // walk from u = -len where the profile equals len
    let descents: std::collections::HashSet<i64> = (1..=len).map(|i| lambda.row(i as usize) as i64 - i).collect();
    let mut v = len as f64;
    let mut k = -len;
    while (k + 1) as f64 <= t {
        v += if descents.contains(&k) { -1.0 } else { 1.0 };
        k += 1;
    }
    let frac = t - k as f64;
    v + frac * if descents.contains(&k) { -1.0 } else { 1.0 }
}

/// `sup_u |ω_λ(u) - Ω(u)|` over the breakpoints of the scaled profile and
/// their midpoints.
pub fn profile_deviation(lambda: &Partition) -> f64 {
    let n = lambda.size().max(1) as f64;
    let sq = n.sqrt();
    let lo = -(lambda.length() as i64) - 1;
    let hi = lambda.row(1) as i64 + 1;
    let lo = lo.min(-(2.0 * sq).ceil() as i64);
    let hi = hi.max((2.0 * sq).ceil() as i64);
    let mut worst = 0.0f64;
    for k in lo..=hi {
        for t in [k as f64, k as f64 + 0.5] {
            let d = (profile(lambda, t) / sq - limit_shape_omega(t / sq)).abs();
            worst = worst.max(d);
        }
    }
    worst
}

/// One row of a convergence report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub param: f64,
    /// Effective coordinates actually compared.
    pub x: f64,
    pub y: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Error at the largest parameter over the error at the smallest.
    pub fn reduction(&self) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) if a.error > 0.0 => b.error / a.error,
            _ => 0.0,
        }
    }

    /// Last error is at most half the first.
    pub fn halved(&self) -> bool {
        self.rows.len() >= 2 && self.rows.last().unwrap().error <= 0.5 * self.rows[0].error
    }

    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.error).fold(0.0, f64::max)
    }
}

fn site(v: f64) -> i64 {
    v.round() as i64
}

/// `J(x_n, x_n - d; θ=n)` against `S(d, a)` with `x_n = round(a√n)`.
pub fn bulk_convergence(a: f64, d: i64, n_list: &[f64]) -> Result<ConvergenceReport> {
    if !(a.abs() < 2.0) {
        return invalid(format!("bulk point must satisfy |a| < 2, got {a}"));
    }
    let rows = n_list
        .par_iter()
        .map(|&n| {
            let x = site(a * n.sqrt());
            let y = x - d;
            let db = DiscreteBessel::new(n, x.abs().max(y.abs()) + 1)?;
            let lhs = db.eval(x, y);
            let rhs = sine_kernel(Offset::Finite(d), a);
            Ok(ConvergenceRow { param: n, x: x as f64, y: y as f64, lhs, rhs, error: (lhs - rhs).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport { rows })
}

/// `det[J(x_i, x_j; n)]` and `det[S(x_i - x_j, a)]` for `x_i = round(a√n) + offsets_i`.
pub fn bulk_determinants(a: f64, offsets: &[i64], n: f64) -> Result<(f64, f64)> {
    if !(a.abs() < 2.0) {
        return invalid(format!("bulk point must satisfy |a| < 2, got {a}"));
    }
    let base = site(a * n.sqrt());
    let sites: Vec<i64> = offsets.iter().map(|o| base + o).collect();
    let reach = sites.iter().map(|s| s.abs()).max().unwrap_or(0) + 1;
    let db = DiscreteBessel::new(n, reach)?;
    let j = db.matrix(&sites);
    let m = sites.len();
    let s = DMatrix::from_fn(m, m, |i, k| sine_kernel(Offset::Finite(sites[i] - sites[k]), a));
    Ok((j.determinant(), s.determinant()))
}

/// Lattice site and effective coordinate for `2r + x r^{1/3}`.
pub fn edge_site(r: f64, x: f64) -> (i64, f64) {
    let c = r.cbrt();
    let k = site(2.0 * r + x * c);
    (k, (k as f64 - 2.0 * r) / c)
}

/// `r^{1/3} J(k_x, k_y; r²)` against `A(x_eff, y_eff)`.
pub fn edge_convergence(x: f64, y: f64, r_list: &[f64]) -> Result<ConvergenceReport> {
    let rows = r_list
        .par_iter()
        .map(|&r| {
            let (kx, xe) = edge_site(r, x);
            let (ky, ye) = edge_site(r, y);
            let db = DiscreteBessel::new(r * r, kx.abs().max(ky.abs()) + 1)?;
            let lhs = r.cbrt() * db.eval(kx, ky);
            let rhs = airy_kernel(xe, ye);
            Ok(ConvergenceRow { param: r, x: xe, y: ye, lhs, rhs, error: (lhs - rhs).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport { rows })
}

/// Largest edge error over the grid `points × points` at one `r`.
pub fn edge_grid_error(r: f64, points: &[f64]) -> Result<f64> {
    let sites: Vec<(i64, f64)> = points.iter().map(|&p| edge_site(r, p)).collect();
    let reach = sites.iter().map(|s| s.0.abs()).max().unwrap_or(0) + 1;
    let db = DiscreteBessel::new(r * r, reach)?;
    let mut worst = 0.0f64;
    for &(kx, xe) in &sites {
        for &(ky, ye) in &sites {
            worst = worst.max((r.cbrt() * db.eval(kx, ky) - airy_kernel(xe, ye)).abs());
        }
    }
    Ok(worst)
}

/// Outcome of contour depoissonization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Depoissonized {
    pub value: f64,
    /// Change when the node count is doubled.
    pub doubling_change: f64,
    pub warning: bool,
}

/// Recovers `b_n` from `B(θ) = e^{-θ} Σ b_k θ^k/k!` by the trapezoidal rule
/// on `|z| = n` applied to `n!/(2πi) ∮ B(z) e^z z^{-n-1} dz`.
pub fn depoissonize_contour<F: Fn(Complex64) -> Complex64 + Sync>(b: F, n: usize, nodes: usize) -> Result<Depoissonized> {
    if nodes < 2 {
        return invalid("at least two quadrature nodes are required");
    }
    let value = contour_sum(&b, n, nodes);
    let finer = contour_sum(&b, n, 2 * nodes);
    let change = (finer - value).abs();
    Ok(Depoissonized { value, doubling_change: change, warning: change > 1e-9 })
}

fn contour_sum<F: Fn(Complex64) -> Complex64 + Sync>(b: &F, n: usize, nodes: usize) -> f64 {
    let radius = (n as f64).max(1.0);
    let ln_fact = ln_factorial(n);
    let total: Complex64 = (0..nodes)
        .into_par_iter()
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / nodes as f64;
            let z = Complex64::from_polar(radius, phi);
            // n! e^z z^{-n}, in logs
            let w = (Complex64::new(ln_fact, 0.0) + z - n as f64 * z.ln()).exp();
            b(z) * w
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    total.re / nodes as f64
}

/// `B(z) = e^{-z} Σ_k b_k z^k / k!` for finitely many coefficients.
pub fn poisson_polynomial(coeffs: &[f64]) -> impl Fn(Complex64) -> Complex64 + Sync + '_ {
    move |z: Complex64| {
        let mut sum = Complex64::zero();
        let mut term = Complex64::new(1.0, 0.0);
        for (k, &c) in coeffs.iter().enumerate() {
            if k > 0 {
                term *= z / k as f64;
            }
            sum += term * c;
        }
        sum * (-z).exp()
    }
}

/// `F_n(x) = M_n(λ_i < x_i, i = 1..m)` exactly.
pub fn edge_cdf_exact(n: usize, x: &[i64]) -> Result<BigRational> {
    let t = partition_table(n)?;
    let num = t
        .entries
        .iter()
        .filter(|(p, _)| x.iter().enumerate().all(|(i, &xi)| (p.row(i + 1) as i64) < xi))
        .fold(BigUint::zero(), |acc, (_, d2)| acc + d2);
    Ok(BigRational::new(num.into(), t.factorial.clone().into()))
}

/// `F_k(x)` for `k = 0..=cap`.
fn edge_cdf_levels(x: &[i64]) -> Result<Vec<f64>> {
    (0..=ENUMERATION_CAP)
        .into_par_iter()
        .map(|k| edge_cdf_exact(k, x).map(|v| v.to_f64().unwrap_or(0.0)))
        .collect()
}

/// `e^{-θ} Σ_k F_k θ^k/k!` up to the cap. Since `F_k` is nonincreasing in
/// `k`, the dropped part lies in `[0, F_cap · tail]`.
fn poisson_mix(theta: f64, values: &[f64]) -> (f64, f64) {
    let mut sum = 0.0;
    for (k, v) in values.iter().enumerate() {
        let w = if theta == 0.0 {
            if k == 0 { 1.0 } else { 0.0 }
        } else {
            (-theta + k as f64 * theta.ln() - ln_factorial(k)).exp()
        };
        sum += w * v;
    }
    let last = values.len() - 1;
    (sum, values[last] * poisson_tail(theta, last))
}

/// `F(θ, x)` by its Poisson series, with a bound on the dropped part.
pub fn edge_cdf_poisson(theta: f64, x: &[i64]) -> Result<(f64, f64)> {
    if !theta.is_finite() || theta < 0.0 {
        return invalid(format!("theta must be finite and nonnegative, got {theta}"));
    }
    Ok(poisson_mix(theta, &edge_cdf_levels(x)?))
}

/// `F(θ, x)` with an error bound: the Poisson series when its dropped part is
/// negligible, otherwise the Fredholm determinant. `λ_i < x_i` for all `i`
/// only depends on the running minima of `x`.
fn edge_cdf_value(theta: f64, x: &[i64], levels: &[f64]) -> Result<(f64, f64)> {
    let (sum, tail) = poisson_mix(theta, levels);
    if tail <= 1e-12 {
        return Ok((sum + 0.5 * tail, 0.5 * tail + 1e-14));
    }
    let mut run = i64::MAX;
    let mins: Vec<f64> = x
        .iter()
        .map(|&v| {
            run = run.min(v);
            run as f64
        })
        .collect();
    if run <= 0 {
        return Ok((0.0, 0.0));
    }
    let eps = 1e-12;
    Ok((crate::fredholm::joint_edge_cdf(theta, &mins, eps)?, 10.0 * eps))
}

/// The two-sided depoissonization bound at one `(n, x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub n: usize,
    pub x: Vec<i64>,
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub exact: f64,
    /// Upper estimate of `F(θ+, x) - C`.
    pub lower: f64,
    /// Lower estimate of `F(θ-, x) + C`.
    pub upper: f64,
    /// `|F(n, x) - F_n(x)|`.
    pub raw_gap: f64,
    pub holds: bool,
}

/// `F(n+4√(n ln n), x) - C ≤ F_n(x) ≤ F(n-4√(n ln n), x) + C` with `C = 1/n²`;
/// `θ-` is clamped at 0.
pub fn sandwich_check(x: &[i64], n: usize) -> Result<SandwichReport> {
    if n < 2 || n > 14 {
        return invalid(format!("sandwich check needs 2 ≤ n ≤ 14, got {n}"));
    }
    if x.is_empty() {
        return invalid("at least one threshold is required");
    }
    let nf = n as f64;
    let spread = 4.0 * (nf * nf.ln()).sqrt();
    let theta_plus = nf + spread;
    let theta_minus = (nf - spread).max(0.0);
    let c = 1.0 / (nf * nf);
    let levels = edge_cdf_levels(x)?;
    let exact = levels[n];
    let (fp, ep) = edge_cdf_value(theta_plus, x, &levels)?;
    let (fm, em) = edge_cdf_value(theta_minus, x, &levels)?;
    let (fn_, _) = edge_cdf_value(nf, x, &levels)?;
    let lower = fp + ep - c;
    let upper = fm - em + c;
    Ok(SandwichReport {
        n,
        x: x.to_vec(),
        theta_plus,
        theta_minus,
        exact,
        lower,
        upper,
        raw_gap: (fn_ - exact).abs(),
        holds: lower <= exact && exact <= upper,
    })
}

/// Checks `F_{n+1}(x) ≤ F_n(x)` exactly for every `x` in `grid^m`
/// (`m = 1, 2`), `n < n_max`. Returns the number of comparisons made.
pub fn growth_monotonicity(n_max: usize, grid: &[i64]) -> Result<std::result::Result<usize, (usize, Vec<i64>)>> {
    let mut xs: Vec<Vec<i64>> = grid.iter().map(|&g| vec![g]).collect();
    for &a in grid {
        for &b in grid {
            xs.push(vec![a, b]);
        }
    }
    let mut checked = 0;
    for n in 0..n_max {
        for x in &xs {
            if edge_cdf_exact(n + 1, x)? > edge_cdf_exact(n, x)? {
                return Ok(Err((n, x.clone())));
            }
            checked += 1;
        }
    }
    Ok(Ok(checked))
}

/// Tridiagonal `D = Δ∘α∘∇ + β` on `{s, ..., s + size - 1}` with
/// `α(k) = k - s` and `β(k) = -k(k+1-s-2√θ)/√θ + shift`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceOperator {
    pub s: i64,
    pub theta: f64,
    pub shift: f64,
    pub size: usize,
}

impl DifferenceOperator {
    pub fn new(theta: f64, s: i64, size: usize) -> Self {
        DifferenceOperator { s, theta, shift: 0.0, size }
    }

    pub fn alpha(&self, k: i64) -> f64 {
        (k - self.s) as f64
    }

    pub fn beta(&self, k: i64) -> f64 {
        let r = self.theta.sqrt();
        -(k as f64) * (k as f64 + 1.0 - self.s as f64 - 2.0 * r) / r + self.shift
    }

    /// `(Df)(k) = (-α(k+1) - α(k) + β(k)) f(k) + α(k) f(k-1) + α(k+1) f(k+1)`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.size;
        DMatrix::from_fn(n, n, |i, j| {
            let k = self.s + i as i64;
            match j as i64 - i as i64 {
                0 => -self.alpha(k + 1) - self.alpha(k) + self.beta(k),
                -1 => self.alpha(k),
                1 => self.alpha(k + 1),
                _ => 0.0,
            }
        })
    }

    /// Applies `D` to `f` given on `{s, s+1, ...}`; values below `s` are zero.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let at = |i: i64| if i >= 0 && (i as usize) < f.len() { f[i as usize] } else { 0.0 };
        (0..f.len() as i64)
            .map(|i| {
                let k = self.s + i;
                (-self.alpha(k + 1) - self.alpha(k) + self.beta(k)) * at(i) + self.alpha(k) * at(i - 1) + self.alpha(k + 1) * at(i + 1)
            })
            .collect()
    }
}

/// Interior margin excluded from the commutator.
pub const COMMUTATOR_MARGIN: usize = 10;

/// `max |[D, [J]_s]|` over rows and columns at least [`COMMUTATOR_MARGIN`]
/// away from the truncation boundary.
pub fn commutation_check(theta: f64, s: i64, window: usize) -> Result<f64> {
    commutator_residual(&DifferenceOperator::new(theta, s, window))
}

pub fn commutator_residual(d: &DifferenceOperator) -> Result<f64> {
    if d.size < 2 * COMMUTATOR_MARGIN {
        return invalid(format!("window must be at least {}, got {}", 2 * COMMUTATOR_MARGIN, d.size));
    }
    let sites: Vec<i64> = (0..d.size as i64).map(|i| d.s + i).collect();
    let reach = sites.iter().map(|k| k.abs()).max().unwrap_or(0) + 1;
    let j = DiscreteBessel::new(d.theta, reach)?.matrix(&sites);
    let dm = d.matrix();
    let c = &dm * &j - &j * &dm;
    // the lower edge is a true boundary when α(s) = 0; only the cut at the top is artificial,
    // but both margins are excluded
    let lo = COMMUTATOR_MARGIN;
    let hi = d.size - COMMUTATOR_MARGIN;
    let mut worst = 0.0f64;
    for a in lo..hi {
        for b in lo..hi {
            worst = worst.max(c[(a, b)].abs());
        }
    }
    Ok(worst)
}

/// Frobenius correlations near the diagonal against `det[𝖣(x_i, x_j)]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalCheck {
    /// Exact `ρ(n, X)`.
    pub fixed: f64,
    /// Exact poissonized `ρ^θ(X)` at `θ = n`, from the enumeration oracle.
    pub poissonized: f64,
    pub limit: f64,
}

/// Fixed-`n` values oscillate in `n` with amplitude near 0.2 for `n ≤ 40`;
/// the poissonized value is the meaningful comparison at this scale.
pub fn diagonal_limit_check(n: usize, x: &[HalfInt]) -> Result<DiagonalCheck> {
    let fixed = crate::exact::corr_exact_frobenius(n, x)?.to_f64().unwrap_or(0.0);
    let set = crate::lattice::LatticeSet::Half(x.to_vec());
    let poissonized = crate::exact::corr_poisson_series(n as f64, &set, ENUMERATION_CAP)?.value;
    let m = x.len();
    let d = DMatrix::from_fn(m, m, |i, j| diagonal_kernel_d(x[i], x[j]));
    Ok(DiagonalCheck { fixed, poissonized, limit: d.determinant() })
}

/// Gap probability of the sine process on `offsets` (for reference).
pub fn sine_gap(offsets: &[i64], a: f64) -> f64 {
    let m = offsets.len();
    det_one_minus(&DMatrix::from_fn(m, m, |i, j| sine_kernel(Offset::Finite(offsets[i] - offsets[j]), a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_values() {
        assert!((limit_shape_omega(0.0) - 4.0 / PI).abs() < 1e-15);
        assert!((limit_shape_omega(2.0) - 2.0).abs() < 1e-15);
        assert!((limit_shape_omega(-2.0) - 2.0).abs() < 1e-15);
        assert_eq!(limit_shape_omega(3.0), 3.0);
        // area between Ω and |u| is 2
        let area = crate::quadrature::composite(|u| limit_shape_omega(u) - u.abs(), -2.0, 2.0, 64, 16);
        assert!((area - 2.0).abs() < 1e-6, "{area}");
    }

    #[test]
    fn density_is_half_of_one_minus_slope() {
        assert_eq!(limit_density(0.0), 0.5);
        assert_eq!(limit_density(2.0), 0.0);
        assert_eq!(limit_density(-2.0), 1.0);
        for i in -19..=19 {
            let a = i as f64 / 10.0;
            let h = 1e-5;
            let slope = (limit_shape_omega(a + h) - limit_shape_omega(a - h)) / (2.0 * h);
            assert!((limit_density(a) - (1.0 - slope) / 2.0).abs() <= 1e-8, "{a}");
        }
    }

    #[test]
    fn profile_of_small_diagrams() {
        let empty = Partition::empty();
        assert_eq!(profile(&empty, -3.0), 3.0);
        assert_eq!(profile(&empty, 0.0), 0.0);
        let one = Partition::new(vec![1]).unwrap();
        assert_eq!(profile(&one, 0.0), 2.0);
        assert_eq!(profile(&one, 0.5), 1.5);
        assert_eq!(profile(&one, -1.0), 1.0);
        let l = Partition::new(vec![3, 1]).unwrap();
        // corners at u = 3 and u = -2, peak side
        assert_eq!(profile(&l, 3.0), 3.0);
        assert_eq!(profile(&l, -2.0), 2.0);
        assert_eq!(profile(&l, 0.0), 2.0);
        assert_eq!(profile(&l, 1.0), 3.0);
        assert_eq!(profile(&l, -1.0), 3.0);
    }

    #[test]
    fn bulk_near_sine_kernel() {
        let r = bulk_convergence(0.0, 2, &[1e6]).unwrap();
        assert!(r.rows[0].lhs.abs() < 1e-2 && r.rows[0].rhs.abs() < 1e-15);
        let r = bulk_convergence(0.0, 1, &[1e6]).unwrap();
        assert!((r.rows[0].lhs - 1.0 / PI).abs() <= 1e-2);
        assert!(bulk_convergence(2.0, 1, &[10.0]).is_err());
    }

    #[test]
    fn edge_near_airy_kernel() {
        let r = edge_convergence(0.0, 0.0, &[1e2, 1e4]).unwrap();
        assert!(r.rows[1].error <= 0.05, "{:?}", r.rows);
        assert!(r.halved(), "{:?}", r.rows);
        let r = edge_convergence(5.0, 5.0, &[1e3]).unwrap();
        assert!(r.rows[0].lhs.abs() <= 1e-2 && r.rows[0].rhs.abs() <= 1e-2);
    }

    #[test]
    fn contour_depoissonization() {
        let c = depoissonize_contour(|_| Complex64::new(0.7, 0.0), 15, 64).unwrap();
        assert!((c.value - 0.7).abs() < 1e-12);
        let r = depoissonize_contour(|z| (-z / 2.0).exp(), 20, 512).unwrap();
        assert!((r.value - 2f64.powi(-20)).abs() < 1e-10 && !r.warning);
        assert!(depoissonize_contour(|z| z, 3, 1).is_err());
    }

    #[test]
    fn contour_recovers_polynomial_correlation() {
        let coeffs: Vec<f64> = (0..=10).map(|k| crate::exact::corr_exact_descent(k, &[0]).unwrap().to_f64().unwrap()).collect();
        let r = depoissonize_contour(poisson_polynomial(&coeffs), 10, 256).unwrap();
        assert!((r.value - coeffs[10]).abs() < 1e-6, "{} vs {}", r.value, coeffs[10]);
    }

    #[test]
    fn sandwich_at_ten() {
        let r = sandwich_check(&[5], 10).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(sandwich_check(&[5], 20).is_err());
    }

    #[test]
    fn series_and_fredholm_agree() {
        // F(θ, x) from the Poisson series against the Fredholm determinant
        for x in [vec![4i64], vec![6, 3], vec![9, 5, 2]] {
            let levels = edge_cdf_levels(&x).unwrap();
            let (series, tail) = poisson_mix(6.0, &levels);
            let a: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            let f = crate::fredholm::joint_edge_cdf(6.0, &a, 1e-13).unwrap();
            assert!(series <= f + 1e-12 && f <= series + tail + 1e-12, "{x:?}: {series} {tail} {f}");
        }
    }

    #[test]
    fn sandwich_uses_fredholm_when_series_tail_is_large() {
        let r = sandwich_check(&[13], 12).unwrap();
        assert!(r.holds && r.lower < 1.0, "{r:?}");
    }

    #[test]
    fn cdf_is_monotone_in_x() {
        for n in [6, 9] {
            for a in 0..8 {
                for b in 0..a {
                    assert!(edge_cdf_exact(n, &[a, b]).unwrap() <= edge_cdf_exact(n, &[a + 1, b]).unwrap());
                    assert!(edge_cdf_exact(n, &[a, b]).unwrap() <= edge_cdf_exact(n, &[a, b + 1]).unwrap());
                }
            }
        }
    }

    #[test]
    fn growth_monotone_small() {
        let grid: Vec<i64> = (0..=7).collect();
        assert!(growth_monotonicity(8, &grid).unwrap().is_ok());
    }

    #[test]
    fn commutator_vanishes() {
        let r = commutation_check(4.0, 0, 60).unwrap();
        assert!(r <= 1e-8, "{r}");
        let mut d = DifferenceOperator::new(4.0, 0, 60);
        d.shift = 3.7;
        let shifted = commutator_residual(&d).unwrap();
        assert!((shifted - r).abs() <= 1e-9);
        assert!(commutation_check(4.0, 0, 10).is_err());
    }

    #[test]
    fn d_preserves_support() {
        let d = DifferenceOperator::new(2.0, 3, 20);
        assert_eq!(d.alpha(3), 0.0);
        // (Df)(s-1) only sees f(s-2), f(s-1) and α(s) f(s)
        let f = |k: i64| if k >= 3 { (k as f64).sin() } else { 0.0 };
        let k = 2;
        let below = (-d.alpha(k + 1) - d.alpha(k) + d.beta(k)) * f(k) + d.alpha(k) * f(k - 1) + d.alpha(k + 1) * f(k + 1);
        assert_eq!(below, 0.0);
    }

    #[test]
    fn diagonal_limit_rough_agreement() {
        for x in [vec![0.5], vec![-0.5], vec![0.5, -0.5], vec![1.5]] {
            let h: Vec<HalfInt> = x.iter().map(|&v| HalfInt::from_f64(v).unwrap()).collect();
            let c = diagonal_limit_check(12, &h).unwrap();
            assert!((c.poissonized - c.limit).abs() <= 0.1, "{x:?}: {c:?}");
        }
        // fixed-n values oscillate in n; the poissonized determinant converges
        let h = |v: f64| HalfInt::from_f64(v).unwrap();
        for (x, y) in [(0.5, -0.5), (1.5, -0.5), (1.5, -1.5)] {
            let k = |a, b| crate::kernels::kernel_k(h(a), h(b), 1e4).unwrap();
            let d = |a, b| diagonal_kernel_d(h(a), h(b));
            let dk = k(x, x) * k(y, y) - k(x, y) * k(y, x);
            let dd = d(x, x) * d(y, y) - d(x, y) * d(y, x);
            assert!((dk - dd).abs() <= 5e-3, "({x}, {y}): {dk} vs {dd}");
        }
    }
}
