//! Integer-order Bessel functions of the first kind.
//!
//! Rows `J_0(x), ..., J_N(x)` come from Miller's backward recurrence,
//! normalized by `J_0 + 2 Σ J_{2k} = 1`. For `x < 1` the ascending series is
//! summed directly instead.

use serde::Serialize;

use crate::error::{invalid, Result};
use super::ln_factorial;

/// `J_0(x), ..., J_N(x)` for one argument `x ≥ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct BesselRow {
    x: f64,
    values: Vec<f64>,
}

const RESCALE_ABOVE: f64 = 1e250;

/// Extra orders above `N` where the backward recurrence starts.
pub fn miller_margin(x: f64) -> usize {
    (12.0 + x + 15.0 * x.cbrt()).ceil() as usize
}

impl BesselRow {
    pub fn new(x: f64, max_order: usize) -> Result<Self> {
        Self::with_margin(x, max_order, miller_margin(x))
    }

    /// Same as [`BesselRow::new`] with an explicit start-order margin.
    pub fn with_margin(x: f64, max_order: usize, margin: usize) -> Result<Self> {
        if !x.is_finite() || x < 0.0 {
            return invalid(format!("Bessel argument must be finite and nonnegative, got {x}"));
        }
        let values = if x == 0.0 {
            let mut v = vec![0.0; max_order + 1];
            v[0] = 1.0;
            v
        } else if x < 1.0 {
            ascending_row(x, max_order)
        } else {
            miller_row(x, max_order, margin)
        };
        Ok(BesselRow { x, values })
    }

    pub fn argument(&self) -> f64 {
        self.x
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `J_n(x)` for any integer order in range, using `J_{-n} = (-1)^n J_n`.
    pub fn get(&self, n: i64) -> f64 {
        let v = self.values[n.unsigned_abs() as usize];
        if n < 0 && n % 2 != 0 {
            -v
        } else {
            v
        }
    }

    /// `J_n(x)`, or zero when `|n|` exceeds the stored range. Only valid when
    /// the row was built past the point where the values underflow.
    pub fn get_or_zero(&self, n: i64) -> f64 {
        if n.unsigned_abs() as usize > self.max_order() {
            0.0
        } else {
            self.get(n)
        }
    }

    /// `|J_0 + 2 Σ_{k≥1} J_{2k} - 1|` over the stored orders.
    pub fn normalization_residual(&self) -> f64 {
        let even: f64 = self.values.iter().skip(2).step_by(2).sum();
        (self.values[0] + 2.0 * even - 1.0).abs()
    }
}

fn ascending_row(x: f64, max_order: usize) -> Vec<f64> {
    let half = 0.5 * x;
    let q = -half * half;
    let mut lead = 1.0; // (x/2)^n / n!
    (0..=max_order)
        .map(|n| {
            if n > 0 {
                lead *= half / n as f64;
            }
            let mut term = lead;
            let mut sum = lead;
            let mut k = 1;
            while term.abs() > 1e-18 * sum.abs() && k < 200 {
                term *= q / (k as f64 * (n + k) as f64);
                sum += term;
                k += 1;
            }
            sum
        })
        .collect()
}

fn miller_row(x: f64, max_order: usize, margin: usize) -> Vec<f64> {
    let mut start = max_order + margin;
    if start % 2 == 1 {
        start += 1;
    }
    let mut out = vec![0.0; max_order + 1];
    let mut above = 0.0; // j_{k+1}
    let mut cur = 1e-30; // j_k
    let mut norm = 0.0;
    let two_over_x = 2.0 / x;
    let mut k = start;
    loop {
        if k <= max_order {
            out[k] = cur;
        }
        if k.is_multiple_of(2) {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if k == 0 {
            break;
        }
        let below = (k as f64) * two_over_x * cur - above;
        above = cur;
        cur = below;
        k -= 1;
        if cur.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            cur *= s;
            above *= s;
            norm *= s;
            for v in out.iter_mut().skip(k + 1) {
                *v *= s;
            }
        }
    }
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

/// `J_n(x)` from the ascending series, summed in long form. Slow; for tests
/// and small arguments.
pub fn bessel_j_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = (0..n).fold(1.0, |acc, k| acc * half / (k + 1) as f64);
    let mut sum = term;
    for k in 1..400 {
        term *= -half * half / (k as f64 * (n as f64 + k as f64));
        sum += term;
        if term.abs() < 1e-20 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// `ln((x/2)^ν / ν!)`, the log of the first-term bound on `|J_ν(x)|`.
fn ln_series_bound(nu: i64, x: f64) -> f64 {
    nu as f64 * (0.5 * x).ln() - ln_factorial(nu as usize)
}

/// Kapteyn's bound `|J_ν(ν z)| ≤ (z e^{√(1-z²)} / (1 + √(1-z²)))^ν` for `0 < z ≤ 1`, in log form.
fn ln_kapteyn_bound(nu: i64, x: f64) -> f64 {
    let nu_f = nu as f64;
    if x >= nu_f {
        return 0.0;
    }
    let z = x / nu_f;
    let s = (1.0 - z * z).sqrt();
    (nu_f * (z.ln() + s - s.ln_1p())).min(0.0)
}

/// Rigorous upper bound on `Σ_{l > L} l · J_{k+l}(2√θ)²`.
///
/// Each term is bounded with `|J_ν| ≤ min(1, (x/2)^ν/ν!, Kapteyn)`; once the
/// ratio of consecutive first-term bounds drops below 1/2 the rest is closed
/// off with a geometric series.
pub fn bessel_tail_bound(theta: f64, k: i64, big_l: i64) -> f64 {
    assert!(theta >= 0.0 && k + big_l >= 0, "bessel_tail_bound needs θ ≥ 0 and k + L ≥ 0");
    if theta == 0.0 {
        return 0.0;
    }
    let x = 2.0 * theta.sqrt();
    let half_sq = theta; // (x/2)²
    let ln_half_x = (0.5 * x).ln();
    let mut total = 0.0;
    let mut l = big_l + 1;
    let mut ln_series = ln_series_bound(k + l, x);
    loop {
        let nu = k + l;
        let ln_b = ln_series.min(ln_kapteyn_bound(nu, x)).min(0.0);
        let lf = l as f64;
        total += lf * (2.0 * ln_b).exp();
        let ratio = ((lf + 1.0) / lf) * half_sq / ((nu + 1) as f64).powi(2);
        if ratio <= 0.5 && ln_series <= 0.0 {
            let rest = lf * (2.0 * ln_series).exp() * ratio / (1.0 - ratio);
            if rest <= 1e-6 * total || rest < 1e-300 {
                total += rest;
                break;
            }
        }
        l += 1;
        ln_series += ln_half_x - ((nu + 1) as f64).ln();
    }
    // slack for rounding in the log-space bounds
    total * (1.0 + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_argument() {
        let r = BesselRow::new(0.0, 5).unwrap();
        assert_eq!(r.values(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(BesselRow::new(-1.0, 3).is_err());
        assert!(BesselRow::new(f64::NAN, 3).is_err());
        assert!(BesselRow::new(f64::INFINITY, 3).is_err());
    }

    #[test]
    fn known_values() {
        // J_0(1), J_1(1), J_0(10), J_5(10) from standard tables
        let r = BesselRow::new(1.0, 2).unwrap();
        assert!((r.get(0) - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((r.get(1) - 0.440_050_585_744_933_5).abs() < 1e-14);
        let r = BesselRow::new(10.0, 6).unwrap();
        assert!((r.get(0) - -0.245_935_764_451_348_3).abs() < 1e-14);
        assert!((r.get(5) - -0.234_061_528_186_793_6).abs() < 1e-14);
    }

    #[test]
    fn small_order_asymptotic() {
        // J_3(2z) ~ z^3 / 3! at z = 0.1
        let z: f64 = 0.1;
        let r = BesselRow::new(2.0 * z, 3).unwrap();
        let lead = z.powi(3) / 6.0;
        assert!(((r.get(3) - lead) / lead).abs() < 1e-2);
        assert!((r.get(3) - bessel_j_series(3, 2.0 * z)).abs() < 1e-16);
    }

    #[test]
    fn lommel_integer_order() {
        for &x in &[0.5, 3.0, 17.0] {
            let r = BesselRow::new(x, 30).unwrap();
            for n in -10i64..=10 {
                let v = r.get(n) * r.get(1 - n) + r.get(-n) * r.get(n - 1);
                assert!(v.abs() < 1e-14, "n={n} x={x} residual {v}");
            }
        }
    }

    #[test]
    fn normalization_and_recurrence() {
        for &x in &[0.5f64, 2.0, 20.0, 200.0, 2000.0] {
            let n = (x + 20.0 * x.cbrt()) as usize + 60;
            let r = BesselRow::new(x, n).unwrap();
            assert!(r.normalization_residual() <= 1e-14, "x={x}: {}", r.normalization_residual());
            let z = 0.5 * x;
            for k in 1..n as i64 {
                let scale = r.get(k + 1).abs().max(r.get(k).abs() * k as f64 / z).max(r.get(k - 1).abs());
                let res = r.get(k + 1) - (k as f64 / z) * r.get(k) + r.get(k - 1);
                assert!(res.abs() <= 1e-12 * scale.max(1e-300), "x={x} k={k}");
            }
            assert!(r.values().iter().all(|v| v.abs() <= 1.0));
        }
    }

    #[test]
    fn agrees_with_series() {
        for &x in &[0.3, 0.9, 1.0, 1.5, 2.0] {
            let r = BesselRow::new(x, 10).unwrap();
            for n in 0..=10u32 {
                assert!((r.get(n as i64) - bessel_j_series(n, x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn doubling_the_margin_changes_nothing() {
        for &x in &[1.0, 7.0, 50.0, 400.0] {
            let n = x as usize + 40;
            let a = BesselRow::new(x, n).unwrap();
            let b = BesselRow::with_margin(x, n, 2 * miller_margin(x)).unwrap();
            for k in 0..=n {
                assert!((a.values()[k] - b.values()[k]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn tail_bound_is_an_upper_bound_and_monotone() {
        for &theta in &[0.5, 1.0, 16.0, 400.0] {
            let x = 2.0 * f64::sqrt(theta);
            let row = BesselRow::new(x, x as usize + 400).unwrap();
            for &k in &[0i64, 3, 20] {
                let mut prev = f64::INFINITY;
                for big_l in 0..40 {
                    let b = bessel_tail_bound(theta, k, big_l);
                    let actual: f64 = ((big_l + 1)..(x as i64 + 380))
                        .map(|l| l as f64 * row.get(k + l).powi(2))
                        .sum();
                    assert!(b >= actual, "θ={theta} k={k} L={big_l}");
                    assert!(b <= prev);
                    assert!(b >= 0.0);
                    prev = b;
                }
            }
        }
        assert!(bessel_tail_bound(1.0, 0, 20) < 1e-15);
        assert_eq!(bessel_tail_bound(0.0, 0, 0), 0.0);
    }

    #[test]
    fn tail_bound_useful_near_turning_point() {
        // θ = 1e8: the window past 2√θ needed for 1e-12 stays in the hundreds
        let b = bessel_tail_bound(1e8, 20_000, 400);
        assert!(b < 1e-12, "{b}");
    }
}
