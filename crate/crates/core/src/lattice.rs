//! Points of the integer lattice and of the half-integer lattice `Z + 1/2`,
//! and windowed point configurations on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A half-integer, stored as its double (always odd).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt(i64);

impl HalfInt {
    pub fn from_doubled(doubled: i64) -> Result<Self> {
        if doubled.rem_euclid(2) == 1 {
            Ok(HalfInt(doubled))
        } else {
            Err(Error::NotHalfInteger(doubled as f64 / 2.0))
        }
    }

    /// `k + 1/2`.
    pub fn above(k: i64) -> Self {
        HalfInt(2 * k + 1)
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        let d = 2.0 * x;
        if !d.is_finite() || d.fract() != 0.0 || d.abs() > 1e15 || (d as i64).rem_euclid(2) != 1 {
            return Err(Error::NotHalfInteger(x));
        }
        Ok(HalfInt(d as i64))
    }

    pub fn doubled(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// The integer `x - 1/2`.
    pub fn floor(self) -> i64 {
        (self.0 - 1) / 2
    }

    /// `|x| - 1/2`, a nonnegative integer.
    pub fn abs_floor(self) -> i64 {
        (self.0.abs() - 1) / 2
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn signum(self) -> i64 {
        self.0.signum()
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// `sgn(x)^(x + 1/2)`.
    pub fn epsilon(self) -> f64 {
        if self.0 > 0 || (self.floor() + 1).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.0)
    }
}

/// Closed integer interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty window [{lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    pub fn contains(&self, k: i64) -> bool {
        self.lo <= k && k <= self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A subset of `Z` seen through a finite window.
///
/// `cofinite_below` records whether the underlying (possibly infinite) set
/// contains every integer below the window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerPointSet {
    pub points: Vec<i64>,
    pub window: Window,
    pub cofinite_below: bool,
}

impl IntegerPointSet {
    pub fn contains(&self, k: i64) -> bool {
        if k < self.window.lo {
            return self.cofinite_below;
        }
        self.points.binary_search(&k).is_ok()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A finite subset of `Z + 1/2`, sorted ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfPointSet {
    pub doubled: Vec<i64>,
}

impl HalfPointSet {
    pub fn from_points(mut points: Vec<HalfInt>) -> Self {
        points.sort();
        points.dedup();
        HalfPointSet { doubled: points.into_iter().map(HalfInt::doubled).collect() }
    }

    pub fn points(&self) -> impl Iterator<Item = HalfInt> + '_ {
        self.doubled.iter().map(|&d| HalfInt(d))
    }

    pub fn contains(&self, x: HalfInt) -> bool {
        self.doubled.binary_search(&x.0).is_ok()
    }

    pub fn len(&self) -> usize {
        self.doubled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doubled.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.doubled.iter().filter(|&&d| d > 0).count()
    }

    pub fn negative_count(&self) -> usize {
        self.doubled.iter().filter(|&&d| d < 0).count()
    }
}

/// A finite point set on one of the two lattices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeSet {
    Integer(Vec<i64>),
    Half(Vec<HalfInt>),
}

impl LatticeSet {
    pub fn len(&self) -> usize {
        match self {
            LatticeSet::Integer(v) => v.len(),
            LatticeSet::Half(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_int_parsing() {
        assert_eq!(HalfInt::from_f64(1.5).unwrap().doubled(), 3);
        assert_eq!(HalfInt::from_f64(-0.5).unwrap().doubled(), -1);
        assert!(HalfInt::from_f64(2.0).is_err());
        assert!(HalfInt::from_f64(0.25).is_err());
        assert!(HalfInt::from_doubled(4).is_err());
        assert_eq!(HalfInt::above(-1).value(), -0.5);
    }

    #[test]
    fn floors() {
        let x = HalfInt::from_f64(-2.5).unwrap();
        assert_eq!(x.floor(), -3);
        assert_eq!(x.abs_floor(), 2);
        assert_eq!(HalfInt::from_f64(0.5).unwrap().floor(), 0);
    }

    #[test]
    fn epsilon_factor() {
        // sgn(x)^(x+1/2): +1 on positives, (-1)^(x+1/2) on negatives.
        let e = |v: f64| HalfInt::from_f64(v).unwrap().epsilon();
        assert_eq!(e(0.5), 1.0);
        assert_eq!(e(7.5), 1.0);
        assert_eq!(e(-0.5), 1.0);
        assert_eq!(e(-1.5), -1.0);
        assert_eq!(e(-2.5), 1.0);
    }
}
