//! The Airy function `Ai` and its derivative on the real line.
//!
//! Regimes:
//! - `|x| ≤ 5`: Maclaurin series.
//! - `x > 5`: exponentially decaying asymptotic expansion.
//! - `-9 ≤ x < -5`: Taylor continuation of `y'' = x y` from `x = -5`.
//! - `x < -9`: oscillatory asymptotic expansion.

use std::f64::consts::{FRAC_PI_4, PI};

/// `Ai(0)`.
const AI0: f64 = 0.355_028_053_887_817_24;
/// `-Ai'(0)`.
const AIP0: f64 = 0.258_819_403_792_806_8;

const SERIES_LIMIT: f64 = 5.0;
const OSCILLATORY_ASYMPTOTIC: f64 = -9.0;
const TAYLOR_STEP: f64 = 0.5;

pub fn airy(x: f64) -> f64 {
    airy_pair(x).0
}

pub fn airy_deriv(x: f64) -> f64 {
    airy_pair(x).1
}

/// `(Ai(x), Ai'(x))`.
pub fn airy_pair(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x > SERIES_LIMIT {
        asymptotic_positive(x)
    } else if x >= -SERIES_LIMIT {
        maclaurin(x)
    } else if x >= OSCILLATORY_ASYMPTOTIC {
        let start = -SERIES_LIMIT;
        taylor_continue(start, maclaurin(start), x)
    } else {
        asymptotic_negative(-x)
    }
}

fn maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = Σ x^{3k} / Π (3j-1)(3j), g = Σ x^{3k+1} / Π (3j)(3j+1)
    let (mut f, mut g) = (1.0, x);
    let (mut tf, mut tg) = (1.0, x);
    // f' and g'
    let (mut df, mut dg) = (0.0, 1.0);
    let (mut tdf, mut tdg) = (0.5 * x * x, 1.0);
    df += tdf;
    for k in 1..200 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tdg *= x3 / ((3.0 * kf) * (3.0 * kf - 2.0));
        f += tf;
        g += tg;
        dg += tdg;
        if k >= 2 {
            tdf *= x3 / ((3.0 * kf - 3.0) * (3.0 * kf - 1.0));
            df += tdf;
        }
        let biggest = tf.abs().max(tg.abs()).max(tdf.abs()).max(tdg.abs());
        if biggest < 1e-18 && k > 3 {
            break;
        }
    }
    (AI0 * f - AIP0 * g, AI0 * df - AIP0 * dg)
}

/// Integrates `y'' = x y` from `x0` (where `(y, y')` is known) to `x` by
/// repeated Taylor expansion.
fn taylor_continue(x0: f64, start: (f64, f64), x: f64) -> (f64, f64) {
    let (mut y, mut dy) = start;
    let mut at = x0;
    while (x - at).abs() > 0.0 {
        let h = (x - at).clamp(-TAYLOR_STEP, TAYLOR_STEP);
        // a_{k+2} = (at·a_k + a_{k-1}) / ((k+2)(k+1))
        let mut a_prev = 0.0; // a_{k-1}
        let mut a = [y, dy];
        let mut val = y + dy * h;
        let mut der = dy;
        let mut hp = h; // h^{k+1}
        for k in 0..120usize {
            let next = (at * a[0] + a_prev) / (((k + 2) * (k + 1)) as f64);
            a_prev = a[0];
            a = [a[1], next];
            der += (k + 2) as f64 * next * hp;
            hp *= h;
            let term = next * hp;
            val += term;
            if term.abs() < 1e-20 && k > 8 {
                break;
            }
        }
        y = val;
        dy = der;
        at += h;
    }
    (y, dy)
}

/// `u_k` coefficients of the Airy asymptotic expansions.
fn u_coefficients(count: usize) -> Vec<f64> {
    let mut u = vec![1.0; count];
    for k in 1..count {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
    }
    u
}

fn v_from_u(u: &[f64]) -> Vec<f64> {
    u.iter()
        .enumerate()
        .map(|(k, &uk)| if k == 0 { 1.0 } else { -(6.0 * k as f64 + 1.0) / (6.0 * k as f64 - 1.0) * uk })
        .collect()
}

/// `Σ c_k s_k ζ^{-k}` over the given index stride, truncated at the smallest term.
fn truncated_sum(c: &[f64], zeta: f64, first: usize, alternate: bool) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for (j, k) in (first..c.len()).step_by(2).enumerate() {
        let sign = if alternate && j % 2 == 1 { -1.0 } else { 1.0 };
        let term = sign * c[k] * zeta.powi(-(k as i32));
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        if last < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let u = u_coefficients(60);
    let v = v_from_u(&u);
    // full alternating series Σ (-1)^k c_k ζ^{-k}, truncated at the smallest term
    let alt = |c: &[f64]| {
        let mut sum = 0.0;
        let mut last = f64::INFINITY;
        for (k, &ck) in c.iter().enumerate() {
            let term = if k % 2 == 0 { ck } else { -ck } * zeta.powi(-(k as i32));
            if term.abs() > last {
                break;
            }
            sum += term;
            last = term.abs();
            if last < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    };
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    (e / q * alt(&u), -e * q * alt(&v))
}

fn asymptotic_negative(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let u = u_coefficients(80);
    let v = v_from_u(&u);
    let p = truncated_sum(&u, zeta, 0, true);
    let q = truncated_sum(&u, zeta, 1, true);
    let r = truncated_sum(&v, zeta, 0, true);
    let s = truncated_sum(&v, zeta, 1, true);
    let (sin, cos) = (zeta - FRAC_PI_4).sin_cos();
    let z4 = z.powf(0.25);
    let norm = 1.0 / PI.sqrt();
    (norm / z4 * (cos * p + sin * q), norm * z4 * (sin * r - cos * s))
}

/// `Γ(1/3)` and `Γ(2/3)`.
const GAMMA_THIRD: f64 = 2.678_938_534_707_747_6;
const GAMMA_TWO_THIRDS: f64 = 1.354_117_939_426_400_4;

/// Ascending series `Σ s^k (ζ/2)^{2k+ν} / (k! Γ(k+ν+1))`, with `s = +1` for
/// `I_ν` and `s = -1` for `J_ν`.
fn ascending_third_order(nu: f64, zeta: f64, sign: f64) -> f64 {
    let gamma_nu1 = if nu > 0.0 { GAMMA_THIRD / 3.0 } else { GAMMA_TWO_THIRDS };
    let h = 0.5 * zeta;
    let mut term = h.powf(nu) / gamma_nu1;
    let mut sum = term;
    for k in 1..500 {
        let kf = k as f64;
        term *= sign * h * h / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-19 * sum.abs() {
            break;
        }
    }
    sum
}

/// `Ai(x)` through its Bessel-function representation (`K_{1/3}` for
/// `x ≥ 0`, `J_{±1/3}` for `x ≤ 0`), with the Bessel functions summed from
/// their ascending series. Accurate for moderate `|x|` only.
pub fn airy_bessel_representation(x: f64) -> f64 {
    if x == 0.0 {
        return AI0;
    }
    let zeta = 2.0 / 3.0 * x.abs().powf(1.5);
    let third = 1.0 / 3.0;
    if x > 0.0 {
        let k = PI / (2.0 * (PI / 3.0).sin())
            * (ascending_third_order(-third, zeta, 1.0) - ascending_third_order(third, zeta, 1.0));
        (x / 3.0).sqrt() * k / PI
    } else {
        x.abs().sqrt() / 3.0
            * (ascending_third_order(third, zeta, -1.0) + ascending_third_order(-third, zeta, -1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_values() {
        // reference values computed to 30 digits
        let cases = [
            (0.0, 0.355_028_053_887_817_2, -0.258_819_403_792_806_8),
            (1.0, 0.135_292_416_312_881_4, -0.159_147_441_296_793_2),
            (2.0, 0.034_924_130_423_274_38, -0.053_090_384_433_653_63),
            (-1.0, 0.535_560_883_292_352_1, -0.010_160_567_116_645_03),
            (-2.0, 0.227_407_428_201_685_6, 0.618_259_020_741_691_4),
            (10.0, 1.104_753_255_289_869e-10, -3.520_633_676_738_924e-10),
        ];
        for (x, ai, aip) in cases {
            let (a, d) = airy_pair(x);
            assert!((a - ai).abs() < 1e-13, "Ai({x}) = {a}");
            assert!((d - aip).abs() < 1e-13, "Ai'({x}) = {d}");
        }
    }

    #[test]
    fn first_zero() {
        let z = -2.338_107_410_459_767;
        assert!(airy(z).abs() < 1e-14);
    }

    #[test]
    fn regime_overlaps() {
        // series vs. asymptotics on both switch points
        for i in 0..=20 {
            let x = 5.0 + 0.05 * i as f64;
            let (a1, d1) = maclaurin(x);
            let (a2, d2) = asymptotic_positive(x);
            assert!((a1 - a2).abs() < 1e-10 && (d1 - d2).abs() < 1e-10, "x={x}");
        }
        for i in 0..=20 {
            let x = -9.0 - 0.25 * i as f64;
            let (a1, d1) = taylor_continue(-5.0, maclaurin(-5.0), x);
            let (a2, d2) = asymptotic_negative(-x);
            assert!((a1 - a2).abs() < 1e-11 && (d1 - d2).abs() < 1e-10, "x={x}: {a1} {a2} {d1} {d2}");
        }
        for i in 0..=8 {
            let x = -5.0 + 0.25 * i as f64;
            let (a1, d1) = taylor_continue(-5.0, maclaurin(-5.0), x);
            let (a2, d2) = maclaurin(x);
            assert!((a1 - a2).abs() < 1e-12 && (d1 - d2).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn satisfies_airy_equation() {
        // central second difference of Ai against x·Ai
        let h = 1e-3;
        for i in 0..=60 {
            let x = -15.0 + 0.5 * i as f64;
            let second = (airy(x + h) - 2.0 * airy(x) + airy(x - h)) / (h * h);
            assert!((second - x * airy(x)).abs() < 1e-5, "x={x}");
            let slope = (airy(x + h) - airy(x - h)) / (2.0 * h);
            assert!((slope - airy_deriv(x)).abs() < 1e-6 * (1.0 + x.abs()), "x={x}");
        }
    }

    #[test]
    fn bessel_representation_agrees() {
        for i in 0..20 {
            let x = 0.5 + 4.5 * i as f64 / 19.0;
            assert!((airy(x) - airy_bessel_representation(x)).abs() < 1e-8, "x={x}");
            assert!((airy(-x) - airy_bessel_representation(-x)).abs() < 1e-8, "x={}", -x);
        }
    }

    #[test]
    fn decreasing_and_positive_on_the_right() {
        let mut prev = airy(1.0);
        for i in 1..=200 {
            let a = airy(1.0 + 0.1 * i as f64);
            assert!(a > 0.0 && a < prev);
            prev = a;
        }
    }

    #[test]
    fn wronskian_with_large_argument_phase() {
        // on the oscillatory side, Ai² + (Ai'/√|x|)² ≈ 1/(π√|x|)
        for &x in &[-9.5f64, -12.0, -15.0] {
            let (a, d) = airy_pair(x);
            let z = x.abs();
            let env = a * a + d * d / z;
            assert!((env * PI * z.sqrt() - 1.0).abs() < 5e-3, "x={x}");
        }
    }
}
