//! Special functions: integer-order Bessel rows, the Airy function, and the
//! tail bounds used to size truncations.

mod airy;
mod bessel;

pub use airy::{airy, airy_bessel_representation, airy_deriv, airy_pair};
pub use bessel::{bessel_j_series, bessel_tail_bound, miller_margin, BesselRow};

/// `ln(n!)`: exact product below 32, Stirling series above.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 32 {
        return (2..=n).fold(1.0f64, |acc, k| acc * k as f64).ln();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_direct_sum() {
        for n in 0..300usize {
            let direct: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
            assert!((ln_factorial(n) - direct).abs() <= 1e-12 * direct.max(1.0), "n={n}");
        }
    }
}
