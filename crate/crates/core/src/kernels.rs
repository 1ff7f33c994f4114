//! Correlation kernels: the discrete Bessel kernel `J` on `Z`, its
//! half-integer relatives `K` and `L`, the discrete sine kernel, the
//! diagonal limit kernel `D`, and the Airy kernel.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::HalfInt;
use crate::quadrature::gauss_legendre;
use crate::special::{airy_pair, bessel_tail_bound, ln_factorial, BesselRow};

/// Target for the neglected part of the diagonal sums.
const SUM_TAIL: f64 = 1e-20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub theta: f64,
}

impl KernelParams {
    pub fn new(theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Ok(KernelParams { theta })
    }
}

/// The kernel families with their parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum KernelFamily {
    J(KernelParams),
    K(KernelParams),
    L(KernelParams),
    Sine { a: f64 },
    Diagonal,
    Airy,
}

impl KernelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::J(_) => "J",
            KernelFamily::K(_) => "K",
            KernelFamily::L(_) => "L",
            KernelFamily::Sine { .. } => "Sine",
            KernelFamily::Diagonal => "Diagonal",
            KernelFamily::Airy => "Airy",
        }
    }
}

/// Evaluation route for [`kernel_j`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JMode {
    /// Ratio off the diagonal; tail sum on the diagonal, reflected for `x ≤ -1`.
    Auto,
    /// The closed form with the `x - y` denominator.
    Ratio,
    /// Power series in `θ`, summed in exact rationals.
    Series,
    /// `Σ_{s≥1} J_{x+s} J_{y+s}`.
    Sum,
    /// `½∫_0^{2√θ} (J_x J_{y+1} + J_{x+1} J_y) dz`, for `x + y > -2`.
    Integral,
}

fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta < 0.0 {
        return invalid(format!("theta must be finite and nonnegative, got {theta}"));
    }
    Ok(())
}

/// Bessel values `J_n(2√θ)` for one `θ`, padded far enough past the largest
/// site that sums over `s ≥ 1` can be cut at the end of the row.
#[derive(Clone, Debug)]
pub struct DiscreteBessel {
    theta: f64,
    sqrt_theta: f64,
    max_site: i64,
    row: BesselRow,
}

impl DiscreteBessel {
    /// Prepares evaluation of `J(x, y)` for `|x|, |y| ≤ max_site`.
    pub fn new(theta: f64, max_site: i64) -> Result<Self> {
        check_theta(theta)?;
        let max_site = max_site.max(0);
        let pad = sum_padding(theta, max_site);
        let row = BesselRow::new(2.0 * theta.sqrt(), (max_site + pad + 2) as usize)?;
        Ok(DiscreteBessel { theta, sqrt_theta: theta.sqrt(), max_site, row })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn max_site(&self) -> i64 {
        self.max_site
    }

    /// `J_n(2√θ)`.
    pub fn bessel(&self, n: i64) -> f64 {
        self.row.get_or_zero(n)
    }

    fn check(&self, x: i64, y: i64) {
        assert!(
            x.abs() <= self.max_site && y.abs() <= self.max_site,
            "site ({x}, {y}) outside the prepared range ±{}",
            self.max_site
        );
    }

    /// `J(x, y; θ)`, auto dispatch.
    pub fn eval(&self, x: i64, y: i64) -> f64 {
        self.check(x, y);
        if x != y {
            self.ratio_unchecked(x, y)
        } else if x >= 0 {
            self.sum_unchecked(x, x)
        } else {
            let k = -x - 1;
            1.0 - self.sum_unchecked(k, k)
        }
    }

    /// The closed form; `x ≠ y`.
    pub fn ratio(&self, x: i64, y: i64) -> Result<f64> {
        if x == y {
            return invalid("ratio form is undefined on the diagonal");
        }
        self.check(x, y);
        Ok(self.ratio_unchecked(x, y))
    }

    fn ratio_unchecked(&self, x: i64, y: i64) -> f64 {
        let j = |n| self.bessel(n);
        self.sqrt_theta * (j(x) * j(y + 1) - j(x + 1) * j(y)) / (x - y) as f64
    }

    /// `Σ_{s≥1} J_{x+s} J_{y+s}`.
    pub fn sum(&self, x: i64, y: i64) -> f64 {
        self.check(x, y);
        self.sum_unchecked(x, y)
    }

    fn sum_unchecked(&self, x: i64, y: i64) -> f64 {
        let end = self.row.max_order() as i64;
        let top = end - x.max(y);
        // small terms first
        (1..=top).rev().map(|s| self.bessel(x + s) * self.bessel(y + s)).sum()
    }

    /// Dense `[J(x_i, x_j)]`.
    pub fn matrix(&self, sites: &[i64]) -> DMatrix<f64> {
        let n = sites.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = self.eval(sites[i], sites[j]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// `Σ_{l>L} l J_{k+l}²` evaluated from the row (not a bound).
    pub fn weighted_tail(&self, k: i64, big_l: i64) -> f64 {
        let end = self.row.max_order() as i64;
        ((big_l + 1)..=(end - k)).rev().map(|l| l as f64 * self.bessel(k + l).powi(2)).sum()
    }
}

/// Orders past `max_site` needed so the dropped part of any diagonal sum is
/// below [`SUM_TAIL`].
fn sum_padding(theta: f64, max_site: i64) -> i64 {
    if theta == 0.0 {
        return 2;
    }
    let x = 2.0 * theta.sqrt();
    let mut pad = ((x - max_site as f64).max(0.0) + 16.0 + 4.0 * x.cbrt()).ceil() as i64;
    while bessel_tail_bound(theta, max_site, pad) > SUM_TAIL {
        pad += pad / 2 + 8;
    }
    pad
}

/// `J(x, y; θ)` by the requested route.
pub fn kernel_j(x: i64, y: i64, theta: f64, mode: JMode) -> Result<f64> {
    check_theta(theta)?;
    match mode {
        JMode::Auto => Ok(DiscreteBessel::new(theta, x.abs().max(y.abs()) + 1)?.eval(x, y)),
        JMode::Ratio => DiscreteBessel::new(theta, x.abs().max(y.abs()) + 1)?.ratio(x, y),
        JMode::Sum => Ok(DiscreteBessel::new(theta, x.abs().max(y.abs()) + 1)?.sum(x, y)),
        JMode::Series => Ok(j_series(x, y, theta)),
        JMode::Integral => j_integral(x, y, theta),
    }
}

/// Power series in `θ` with exact rational partial sums. The common factor
/// `θ^{(x+y)/2 + m0 + 1}` is applied in floating point at the end.
fn j_series(x: i64, y: i64, theta: f64) -> f64 {
    // 1/Γ(x+m+2) vanishes until x+m+2 ≥ 1
    let m0 = 0i64.max(-x - 1).max(-y - 1);
    let lead_exp = (x + y) as f64 / 2.0 + (m0 + 1) as f64;
    if theta == 0.0 {
        return if lead_exp == 0.0 { series_term(x, y, m0).to_f64().unwrap_or(0.0) } else { 0.0 };
    }
    let t = BigRational::from_float(theta).expect("finite theta");
    let mut sum = BigRational::zero();
    let mut power = BigRational::one();
    let mut small_run = 0;
    let mut m = m0;
    loop {
        let term = series_term(x, y, m) * &power;
        let mag = term.abs().to_f64().unwrap_or(f64::INFINITY);
        sum += &term;
        let total = sum.abs().to_f64().unwrap_or(0.0);
        // past the peak and negligible several times in a row
        if mag <= 1e-25 * total.max(1e-300) || (mag == 0.0 && m - m0 > 40) {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if (small_run >= 3 && m - m0 >= 40) || m - m0 > 2000 {
            break;
        }
        power *= &t;
        m += 1;
    }
    sum.to_f64().unwrap_or(0.0) * theta.powf(lead_exp)
}

/// `(-1)^m (x+y+m+2)_m / ((x+m+1)! (y+m+1)! m!)`, zero when a factorial
/// argument is negative.
fn series_term(x: i64, y: i64, m: i64) -> BigRational {
    if x + m + 1 < 0 || y + m + 1 < 0 {
        return BigRational::zero();
    }
    let mut num = BigInt::one();
    for i in 0..m {
        num *= BigInt::from(x + y + m + 2 + i);
    }
    if m % 2 == 1 {
        num = -num;
    }
    let fact = |k: i64| (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    let den = fact(x + m + 1) * fact(y + m + 1) * fact(m);
    BigRational::new(num, den)
}

fn j_integral(x: i64, y: i64, theta: f64) -> Result<f64> {
    if x + y <= -2 {
        return invalid(format!("integral form needs x + y > -2, got x={x}, y={y}"));
    }
    let top = 2.0 * theta.sqrt();
    if top == 0.0 {
        return Ok(0.0);
    }
    let panels = top.ceil().max(1.0) as usize;
    let (t, w) = gauss_legendre(16);
    let h = top / panels as f64;
    let max_order = (x.abs().max(y.abs()) + 1) as usize;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (&ti, &wi) in t.iter().zip(&w) {
            let z = mid + 0.5 * h * ti;
            let row = BesselRow::new(z, max_order)?;
            let j = |n| row.get(n);
            total += 0.5 * h * wi * (j(x) * j(y + 1) + j(x + 1) * j(y));
        }
    }
    Ok(0.5 * total)
}

/// `K(x, y; θ)` on `Z + ½`.
pub fn kernel_k(x: HalfInt, y: HalfInt, theta: f64) -> Result<f64> {
    let reach = x.abs_floor().max(y.abs_floor()) + 2;
    let db = DiscreteBessel::new(theta, reach)?;
    Ok(kernel_k_with(&db, x, y))
}

/// `K(x, y)` using a prepared Bessel row.
pub fn kernel_k_with(db: &DiscreteBessel, x: HalfInt, y: HalfInt) -> f64 {
    let (a, b) = (x.abs_floor(), y.abs_floor()); // |x| - ½, |y| - ½
    if x == y {
        // occupation probability; for x < 0 this is 1 - J(x-½, x-½)
        return db.eval(a, a);
    }
    let j = |n: i64| db.bessel(n);
    let st = db.theta().sqrt();
    if x.is_positive() == y.is_positive() {
        // κ₊(|x|, |y|) / (|x| - |y|)
        let kp = j(a) * j(b + 1) - j(a + 1) * j(b);
        st * kp / (a - b) as f64
    } else {
        // κ₋(|x|, |y|) / (x - y)
        let km = j(a) * j(b) + j(a + 1) * j(b + 1);
        st * km / ((x.doubled() - y.doubled()) as f64 / 2.0)
    }
}

/// `L(x, y; θ)` on `Z + ½`.
pub fn kernel_l(x: HalfInt, y: HalfInt, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if x.is_positive() == y.is_positive() {
        return Ok(0.0);
    }
    let (a, b) = (x.abs_floor(), y.abs_floor());
    if theta == 0.0 {
        return Ok(0.0);
    }
    // Γ(|x| + ½) = (|x| - ½)!
    let ln = 0.5 * (a + b + 1) as f64 * theta.ln() - ln_factorial(a as usize) - ln_factorial(b as usize);
    Ok(ln.exp() / ((x.doubled() - y.doubled()) as f64 / 2.0))
}

/// Offset argument of the sine kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Offset {
    Finite(i64),
    Infinite,
}

impl fmt::Display for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Offset::Finite(k) => write!(f, "{k}"),
            Offset::Infinite => write!(f, "inf"),
        }
    }
}

/// Discrete sine kernel `S(k, a)`.
pub fn sine_kernel(k: Offset, a: f64) -> f64 {
    if a >= 2.0 {
        return 0.0;
    }
    if a <= -2.0 {
        return if k == Offset::Finite(0) { 1.0 } else { 0.0 };
    }
    let phi = (a / 2.0).acos();
    match k {
        Offset::Infinite => 0.0,
        Offset::Finite(0) => phi / PI,
        Offset::Finite(k) => (phi * k as f64).sin() / (PI * k as f64),
    }
}

/// The kernel `D` on `Z + ½`.
pub fn diagonal_kernel_d(x: HalfInt, y: HalfInt) -> f64 {
    let diff = (x.doubled() - y.doubled()) / 2;
    if x.is_positive() == y.is_positive() {
        return sine_kernel(Offset::Finite(diff), 0.0);
    }
    // cos(π(x+y)/2) with x + y an integer
    let c = match ((x.doubled() + y.doubled()) / 2).rem_euclid(4) {
        0 => 1.0,
        2 => -1.0,
        _ => 0.0,
    };
    c / (PI * diff as f64)
}

/// Below this separation the Airy kernel is summed from a Taylor expansion.
const AIRY_NEAR: f64 = 0.25;

/// The Airy kernel `(A(x)A'(y) - A'(x)A(y)) / (x - y)`.
pub fn airy_kernel(x: f64, y: f64) -> f64 {
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    if (x - y).abs() >= AIRY_NEAR {
        let (ax, dx) = airy_pair(x);
        let (ay, dy) = airy_pair(y);
        return (ax * dy - dx * ay) / (x - y);
    }
    // Expand A around x: A(x + h) = Σ c_k h^k with c_{k+2} = (x c_k + c_{k-1}) / ((k+2)(k+1)).
    // The numerator then equals Σ_{k≥1} h^k (c_0 (k+1) c_{k+1} - c_1 c_k).
    let h = y - x;
    let (a0, a1) = airy_pair(x);
    let mut c = vec![a0, a1];
    let mut sum = 0.0;
    let mut hp = 1.0; // h^{k-1}
    for k in 1..80usize {
        while c.len() < k + 2 {
            let j = c.len() - 2;
            let prev = if j >= 1 { c[j - 1] } else { 0.0 };
            c.push((x * c[j] + prev) / ((j + 2) * (j + 1)) as f64);
        }
        let term = hp * (a0 * (k + 1) as f64 * c[k + 1] - a1 * c[k]);
        sum += term;
        if k > 4 && term.abs() < 1e-19 * sum.abs().max(1e-300) {
            break;
        }
        hp *= h;
    }
    // numerator / (x - y) = -Σ h^{k-1}(...)
    -sum
}

/// Particle–hole transform on the rows indexed by `z`: blocks
/// `[A B; C D] ↦ [A B; -C 1-D]`, where the second block row and column
/// belong to `z`.
pub fn complement_kernel<T: PartialEq + fmt::Debug>(m: &DMatrix<f64>, labels: &[T], z: &[T]) -> Result<DMatrix<f64>> {
    if m.nrows() != labels.len() || m.ncols() != labels.len() {
        return invalid("matrix size does not match the window");
    }
    for p in z {
        if !labels.contains(p) {
            return invalid(format!("{p:?} is not in the window"));
        }
    }
    let mut out = m.clone();
    for (i, li) in labels.iter().enumerate() {
        if !z.contains(li) {
            continue;
        }
        for j in 0..labels.len() {
            out[(i, j)] = if i == j { 1.0 - m[(i, j)] } else { -m[(i, j)] };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: f64) -> HalfInt {
        HalfInt::from_f64(v).unwrap()
    }

    #[test]
    fn zero_theta() {
        for x in -3..4 {
            for y in -3..4 {
                if x + y > -2 {
                    assert_eq!(kernel_j(x, y, 0.0, JMode::Series).unwrap(), 0.0);
                    assert_eq!(kernel_j(x, y, 0.0, JMode::Auto).unwrap(), 0.0);
                }
            }
        }
        assert_eq!(kernel_j(-1, -1, 0.0, JMode::Auto).unwrap(), 1.0);
        assert_eq!(kernel_j(-1, -1, 0.0, JMode::Series).unwrap(), 1.0);
    }

    #[test]
    fn series_value_at_origin() {
        // J(0,0;1) from 40 exact terms of the power series; also Σ_{s≥1} J_s(2)² to 40 digits
        let oracle = {
            let t = BigRational::one();
            let mut s = BigRational::zero();
            for m in 0..40 {
                s += series_term(0, 0, m) * num_traits::pow(t.clone(), m as usize);
            }
            s.to_f64().unwrap()
        };
        assert!((oracle - 0.474_936_459_507_765_2).abs() < 1e-15, "{oracle}");
        for mode in [JMode::Auto, JMode::Sum, JMode::Series, JMode::Integral] {
            assert!((kernel_j(0, 0, 1.0, mode).unwrap() - oracle).abs() < 1e-12, "{mode:?}");
        }
    }

    #[test]
    fn modes_agree() {
        for &theta in &[0.3, 1.0, 7.0, 40.0, 100.0] {
            for &(x, y) in &[(0, 3), (-4, 2), (10, -3), (25, 24), (-7, -2), (3, 3), (-6, -6), (50, 49), (-50, 47), (-20, 20)] {
                let auto = kernel_j(x, y, theta, JMode::Auto).unwrap();
                let series = kernel_j(x, y, theta, JMode::Series).unwrap();
                let sum = kernel_j(x, y, theta, JMode::Sum).unwrap();
                assert!((auto - series).abs() < 1e-10, "θ={theta} ({x},{y}) auto {auto} series {series}");
                assert!((auto - sum).abs() < 1e-10, "θ={theta} ({x},{y}) auto {auto} sum {sum}");
                if x != y {
                    assert_eq!(auto, kernel_j(x, y, theta, JMode::Ratio).unwrap());
                }
                if x + y > -2 {
                    let int = kernel_j(x, y, theta, JMode::Integral).unwrap();
                    assert!((auto - int).abs() < 1e-10, "θ={theta} ({x},{y}) auto {auto} integral {int}");
                }
            }
        }
    }

    #[test]
    fn mode_domain_errors() {
        assert!(kernel_j(-1, -1, 1.0, JMode::Integral).is_err());
        assert!(kernel_j(2, 2, 1.0, JMode::Ratio).is_err());
        assert!(kernel_j(0, 0, -1.0, JMode::Auto).is_err());
    }

    #[test]
    fn shift_and_reflection() {
        for &theta in &[0.5, 4.0, 25.0] {
            let db = DiscreteBessel::new(theta, 32).unwrap();
            for x in -30..30 {
                for y in -30..30 {
                    let r = db.eval(x + 1, y + 1) - db.eval(x, y) + db.bessel(x + 1) * db.bessel(y + 1);
                    assert!(r.abs() <= 1e-11, "θ={theta} ({x},{y}) {r}");
                    assert_eq!(db.eval(x, y), db.eval(y, x));
                }
            }
            for k in 0..=20 {
                let r = 1.0 - db.sum(k, k) - db.sum(-k - 1, -k - 1);
                assert!(r.abs() <= 1e-11);
            }
        }
    }

    #[test]
    fn k_examples() {
        let theta = 2.0f64;
        let row = BesselRow::new(2.0 * theta.sqrt(), 4).unwrap();
        let expect = theta.sqrt() * (row.get(0).powi(2) + row.get(1).powi(2));
        assert!((kernel_k(h(0.5), h(-0.5), theta).unwrap() - expect).abs() < 1e-14);
        assert_eq!(kernel_k(h(0.5), h(-0.5), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn k_matches_conjugated_j() {
        for &theta in &[0.5, 3.0, 20.0] {
            let db = DiscreteBessel::new(theta, 12).unwrap();
            for dx in (-21..=21).step_by(2) {
                for dy in (-21..=21).step_by(2) {
                    let (x, y) = (HalfInt::from_doubled(dx).unwrap(), HalfInt::from_doubled(dy).unwrap());
                    let k = kernel_k_with(&db, x, y);
                    let via_j = if x == y {
                        let j = db.eval(x.floor(), x.floor());
                        if x.is_positive() { j } else { 1.0 - j }
                    } else {
                        x.signum() as f64 * x.epsilon() * y.epsilon() * db.eval(x.floor(), y.floor())
                    };
                    assert!((k - via_j).abs() < 1e-13, "θ={theta} {x} {y}");
                    let kt = kernel_k_with(&db, y, x);
                    if x.is_positive() == y.is_positive() {
                        assert!((k - kt).abs() < 1e-15);
                    } else {
                        assert!((k + kt).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn l_examples() {
        assert_eq!(kernel_l(h(1.5), h(0.5), 3.0).unwrap(), 0.0);
        assert_eq!(kernel_l(h(-1.5), h(-0.5), 3.0).unwrap(), 0.0);
        assert!((kernel_l(h(0.5), h(-0.5), 3.0).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        for &(x, y) in &[(0.5, -2.5), (3.5, -1.5), (-4.5, 6.5)] {
            let a = kernel_l(h(x), h(y), 2.0).unwrap();
            let b = kernel_l(h(y), h(x), 2.0).unwrap();
            assert!((a + b).abs() < 1e-15);
        }
        // θ^{(|x|+|y|)/2} / ((x-y) Γ(|x|+½) Γ(|y|+½)) at x = 2.5, y = -1.5, θ = 2
        let v = kernel_l(h(2.5), h(-1.5), 2.0).unwrap();
        assert!((v - 2f64.powi(2) / (4.0 * 2.0 * 1.0)).abs() < 1e-15);
    }

    #[test]
    fn sine_values() {
        assert_eq!(sine_kernel(Offset::Finite(0), 0.0), 0.5);
        assert!((sine_kernel(Offset::Finite(1), 0.0) - 1.0 / PI).abs() < 1e-16);
        assert!(sine_kernel(Offset::Finite(2), 0.0).abs() < 1e-16);
        assert!((sine_kernel(Offset::Finite(3), 0.0) + 1.0 / (3.0 * PI)).abs() < 1e-16);
        for k in -5..5 {
            assert_eq!(sine_kernel(Offset::Finite(k), 2.0), 0.0);
            assert_eq!(sine_kernel(Offset::Finite(k), -2.5), if k == 0 { 1.0 } else { 0.0 });
        }
        assert_eq!(sine_kernel(Offset::Infinite, 0.3), 0.0);
    }

    #[test]
    fn d_values() {
        assert!((diagonal_kernel_d(h(0.5), h(-0.5)) - 1.0 / PI).abs() < 1e-16);
        for dx in (-15..=15).step_by(2) {
            for dy in (-15..=15).step_by(2) {
                let (x, y) = (HalfInt::from_doubled(dx).unwrap(), HalfInt::from_doubled(dy).unwrap());
                let d = diagonal_kernel_d(x, y);
                if x.is_positive() == y.is_positive() {
                    assert_eq!(d, sine_kernel(Offset::Finite((dx - dy) / 2), 0.0));
                }
                let (x1, y1) = (HalfInt::from_doubled(dx + 2).unwrap(), HalfInt::from_doubled(dy + 2).unwrap());
                if x1.signum() == x.signum() && y1.signum() == y.signum() {
                    let s = (x.signum() * y.signum()) as f64;
                    assert!((diagonal_kernel_d(x1, y1) - s * d).abs() < 1e-15);
                }
            }
        }
    }

    /// `∫_0^∞ A(x+t) A(y+t) dt` by composite Gauss–Legendre; the integrand
    /// is below 1e-40 past t = 30.
    fn airy_integral(x: f64, y: f64) -> f64 {
        crate::quadrature::composite(|t| crate::special::airy(x + t) * crate::special::airy(y + t), 0.0, 30.0, 120, 20)
    }

    #[test]
    fn airy_kernel_matches_integral() {
        let k00 = airy_integral(0.0, 0.0);
        assert!((airy_kernel(0.0, 0.0) - k00).abs() < 1e-12, "{k00}");
        for i in 0..=12 {
            for j in 0..=12 {
                let (x, y) = (-6.0 + i as f64, -6.0 + j as f64 + 0.1 * (i % 3) as f64);
                let a = airy_kernel(x, y);
                assert!((a - airy_integral(x, y)).abs() < 1e-8, "({x},{y})");
                assert!((a - airy_kernel(y, x)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn airy_kernel_near_diagonal_is_continuous() {
        for &x in &[-8.0, -3.3, 0.0, 2.0, 7.0] {
            let d = airy_kernel(x, x);
            let (a, ap) = airy_pair(x);
            assert!((d - (ap * ap - x * a * a)).abs() < 1e-15);
            for &h in &[1e-9, 1e-5, 0.1, 0.2499, 0.2501] {
                let v = airy_kernel(x + h, x);
                let mid = airy_integral(x + h, x);
                assert!((v - mid).abs() < 1e-10, "x={x} h={h}");
            }
        }
        assert!(airy_kernel(12.0, 12.0) < 1e-10);
    }

    #[test]
    fn complement_involution() {
        let m = DMatrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64 * 0.1);
        let labels = [-2i64, -1, 0, 1];
        assert_eq!(complement_kernel(&m, &labels, &[]).unwrap(), m);
        let once = complement_kernel(&m, &labels, &[-2, -1]).unwrap();
        let twice = complement_kernel(&once, &labels, &[-2, -1]).unwrap();
        assert!((twice - &m).abs().max() < 1e-15);
        assert!(complement_kernel(&m, &labels, &[5]).is_err());
    }

    #[test]
    fn complement_of_j_gives_conjugated_k() {
        let theta = 1.7;
        let db = DiscreteBessel::new(theta, 10).unwrap();
        let half: Vec<HalfInt> = (-6..6).map(HalfInt::above).collect();
        let sites: Vec<i64> = half.iter().map(|p| p.floor()).collect();
        let j = db.matrix(&sites);
        let neg: Vec<i64> = sites.iter().copied().filter(|&s| s < 0).collect();
        let c = complement_kernel(&j, &sites, &neg).unwrap();
        for (a, &x) in half.iter().enumerate() {
            for (b, &y) in half.iter().enumerate() {
                let expect = kernel_k_with(&db, x, y);
                let conj = if a == b { c[(a, b)] } else { x.epsilon() * y.epsilon() * c[(a, b)] };
                assert!((expect - conj).abs() < 1e-13);
            }
        }
    }
}
