//! Correlation functions by brute-force enumeration of partitions.
//!
//! Fixed-`n` correlations are exact rationals. The poissonized versions sum
//! the fixed-`n` values against Poisson weights, up to the enumeration cap,
//! and carry a bound on the dropped Poisson tail.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{kernel_k_with, DiscreteBessel};
use crate::lattice::{HalfInt, LatticeSet, Window};
use crate::partition::{descent_set, dimension, factorial, modified_frobenius, Partition, Partitions};
use crate::special::ln_factorial;

/// Largest `n` that is enumerated.
pub const ENUMERATION_CAP: usize = 40;

/// All partitions of `n` with their squared dimensions.
#[derive(Debug)]
pub struct PartitionTable {
    pub n: usize,
    pub entries: Vec<(Partition, BigUint)>,
    pub factorial: BigUint,
}

static TABLES: [OnceLock<PartitionTable>; ENUMERATION_CAP + 1] = [const { OnceLock::new() }; ENUMERATION_CAP + 1];

/// The cached table for `n`.
pub fn partition_table(n: usize) -> Result<&'static PartitionTable> {
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationCap { n, cap: ENUMERATION_CAP });
    }
    Ok(TABLES[n].get_or_init(|| build_table(n)))
}

fn build_table(n: usize) -> PartitionTable {
    // one task per leading part
    let entries = if n == 0 {
        vec![(Partition::empty(), BigUint::from(1u32))]
    } else {
        (1..=n)
            .rev()
            .collect::<Vec<_>>()
            .into_par_iter()
            .flat_map_iter(|first| {
                Partitions::bounded(n - first, first).map(move |rest| {
                    let mut parts = vec![first];
                    parts.extend_from_slice(rest.parts());
                    let p = Partition::new(parts).expect("valid by construction");
                    let d = dimension(&p);
                    (p, &d * &d)
                })
            })
            .collect()
    };
    PartitionTable { n, entries, factorial: factorial(n) }
}

fn exact_sum<F: Fn(&Partition) -> bool + Sync>(n: usize, accept: F) -> Result<BigRational> {
    let t = partition_table(n)?;
    let num = t
        .entries
        .par_iter()
        .filter(|(p, _)| accept(p))
        .map(|(_, d2)| d2.clone())
        .reduce(BigUint::zero, |a, b| a + b);
    Ok(BigRational::new(num.into(), t.factorial.clone().into()))
}

/// `Σ_{λ⊢n, X ⊆ 𝒟(λ)} M_n(λ)`.
pub fn corr_exact_descent(n: usize, x: &[i64]) -> Result<BigRational> {
    if x.is_empty() {
        return exact_sum(n, |_| true);
    }
    let window = Window { lo: *x.iter().min().unwrap(), hi: *x.iter().max().unwrap() };
    exact_sum(n, |p| {
        let d = descent_set(p, window);
        x.iter().all(|&k| d.contains(k))
    })
}

/// `Σ_{λ⊢n, X ⊆ Fr(λ)} M_n(λ)`.
pub fn corr_exact_frobenius(n: usize, x: &[HalfInt]) -> Result<BigRational> {
    exact_sum(n, |p| {
        let fr = modified_frobenius(p);
        x.iter().all(|&h| fr.contains(h))
    })
}

/// A truncated series value with a bound on what was dropped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub remainder: f64,
}

/// Upper bound on `P(Poisson(θ) > k)`.
pub fn poisson_tail(theta: f64, k: usize) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let k1 = (k + 1) as f64;
    let first = (-theta + k1 * theta.ln() - ln_factorial(k + 1)).exp();
    if theta < k1 + 1.0 {
        first / (1.0 - theta / (k1 + 1.0))
    } else {
        1.0
    }
}

/// Fixed-`n` correlations for every subset of a window, aggregated by the
/// occupation pattern inside the window. Serves many queries against the same
/// window cheaply.
#[derive(Clone, Debug)]
pub struct WindowOracle {
    sites: LatticeSet,
    /// `levels[k]`: occupation bitmask → `M_k`-mass of partitions with that pattern.
    levels: Vec<Vec<(u64, f64)>>,
}

impl WindowOracle {
    /// Oracle for descents on the integer window, levels `0..=max_level`.
    pub fn descents(window: Window, max_level: usize) -> Result<Self> {
        let sites: Vec<i64> = (window.lo..=window.hi).collect();
        let s2 = sites.clone();
        Self::build(LatticeSet::Integer(sites), max_level, move |p| {
            let d = descent_set(p, window);
            mask_of(s2.iter().map(|&k| d.contains(k)))
        })
    }

    /// Oracle for modified Frobenius coordinates on the given half-integers.
    pub fn frobenius(sites: Vec<HalfInt>, max_level: usize) -> Result<Self> {
        let s2 = sites.clone();
        Self::build(LatticeSet::Half(sites), max_level, move |p| {
            let fr = modified_frobenius(p);
            mask_of(s2.iter().map(|&h| fr.contains(h)))
        })
    }

    fn build<F: Fn(&Partition) -> u64 + Sync>(sites: LatticeSet, max_level: usize, mask: F) -> Result<Self> {
        if sites.len() > 64 {
            return Err(Error::InvalidArgument("window oracle supports at most 64 sites".into()));
        }
        if max_level > ENUMERATION_CAP {
            return Err(Error::EnumerationCap { n: max_level, cap: ENUMERATION_CAP });
        }
        let levels = (0..=max_level)
            .into_par_iter()
            .map(|k| {
                let t = partition_table(k)?;
                let mut acc: HashMap<u64, BigUint> = HashMap::new();
                for (p, d2) in &t.entries {
                    *acc.entry(mask(p)).or_default() += d2;
                }
                let fact: BigRational = BigRational::from_integer(t.factorial.clone().into());
                let mut out: Vec<(u64, f64)> = acc
                    .into_iter()
                    .map(|(m, s)| (m, (BigRational::from_integer(s.into()) / &fact).to_f64().unwrap_or(0.0)))
                    .collect();
                out.sort_unstable_by_key(|e| e.0);
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WindowOracle { sites, levels })
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    fn query_mask(&self, set: &LatticeSet) -> Result<u64> {
        let mut m = 0u64;
        match (set, &self.sites) {
            (LatticeSet::Integer(x), LatticeSet::Integer(s)) => {
                for k in x {
                    let i = s.iter().position(|v| v == k).ok_or_else(|| outside(k))?;
                    m |= 1 << i;
                }
            }
            (LatticeSet::Half(x), LatticeSet::Half(s)) => {
                for k in x {
                    let i = s.iter().position(|v| v == k).ok_or_else(|| outside(k))?;
                    m |= 1 << i;
                }
            }
            _ => return Err(Error::InvalidArgument("query lattice does not match the oracle".into())),
        }
        Ok(m)
    }

    /// `ρ(k, X)` as a float.
    pub fn correlation(&self, level: usize, set: &LatticeSet) -> Result<f64> {
        let q = self.query_mask(set)?;
        let lv = self.levels.get(level).ok_or(Error::EnumerationCap { n: level, cap: self.max_level() })?;
        Ok(lv.iter().filter(|(m, _)| m & q == q).map(|e| e.1).sum())
    }

    /// `e^{-θ} Σ_{k≤N} ρ(k, X) θ^k / k!` with the tail above the last level bounded.
    pub fn poisson(&self, theta: f64, set: &LatticeSet, terms: usize) -> Result<SeriesValue> {
        check_theta(theta)?;
        let top = terms.min(self.max_level());
        let q = self.query_mask(set)?;
        let mut value = 0.0;
        for k in 0..=top {
            let rho: f64 = self.levels[k].iter().filter(|(m, _)| m & q == q).map(|e| e.1).sum();
            value += rho * poisson_weight(theta, k);
        }
        // correlations are at most 1; slack for rounding in the float sum
        let remainder = poisson_tail(theta, top) + 1e-14;
        Ok(SeriesValue { value, remainder })
    }
}

impl WindowOracle {
    /// Joint law of the descent counts in half-open intervals `[lo, hi)` of the
    /// window under `M^θ`, with the dropped Poisson tail.
    pub fn poisson_count_law(&self, theta: f64, intervals: &[(i64, i64)]) -> Result<(HashMap<Vec<usize>, f64>, f64)> {
        check_theta(theta)?;
        let LatticeSet::Integer(sites) = &self.sites else {
            return Err(Error::InvalidArgument("count law needs an integer window".into()));
        };
        let mut masks = Vec::with_capacity(intervals.len());
        for &(lo, hi) in intervals {
            let mut m = 0u64;
            for k in lo..hi {
                let i = sites.iter().position(|&v| v == k).ok_or_else(|| outside(&k))?;
                m |= 1 << i;
            }
            masks.push(m);
        }
        let mut law: HashMap<Vec<usize>, f64> = HashMap::new();
        for (k, level) in self.levels.iter().enumerate() {
            let w = poisson_weight(theta, k);
            for &(pattern, mass) in level {
                let key = masks.iter().map(|m| (pattern & m).count_ones() as usize).collect();
                *law.entry(key).or_default() += w * mass;
            }
        }
        Ok((law, poisson_tail(theta, self.max_level())))
    }
}

fn outside<T: std::fmt::Debug>(k: &T) -> Error {
    Error::InvalidArgument(format!("{k:?} is outside the oracle window"))
}

fn mask_of(bits: impl Iterator<Item = bool>) -> u64 {
    bits.enumerate().fold(0, |m, (i, b)| if b { m | (1 << i) } else { m })
}

fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta < 0.0 {
        return Err(Error::InvalidArgument(format!("theta must be finite and nonnegative, got {theta}")));
    }
    Ok(())
}

fn poisson_weight(theta: f64, k: usize) -> f64 {
    if theta == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (-theta + k as f64 * theta.ln() - ln_factorial(k)).exp()
}

/// Poissonized correlation from the enumeration, truncated at `min(N, cap)`.
pub fn corr_poisson_series(theta: f64, set: &LatticeSet, terms: usize) -> Result<SeriesValue> {
    let oracle = match set {
        LatticeSet::Integer(x) => {
            let window = if x.is_empty() {
                Window { lo: 0, hi: 0 }
            } else {
                Window { lo: *x.iter().min().unwrap(), hi: *x.iter().max().unwrap() }
            };
            if window.len() > 64 {
                return Err(Error::InvalidArgument("point set spans more than 64 sites".into()));
            }
            WindowOracle::descents(window, terms.min(ENUMERATION_CAP))?
        }
        LatticeSet::Half(x) => WindowOracle::frobenius(x.clone(), terms.min(ENUMERATION_CAP))?,
    };
    oracle.poisson(theta, set, terms)
}

/// `det[J(x_i, x_j)]` or `det[K(x_i, x_j)]`.
pub fn corr_poisson_det(theta: f64, set: &LatticeSet) -> Result<f64> {
    check_theta(theta)?;
    match set {
        LatticeSet::Integer(x) => {
            let reach = x.iter().map(|v| v.abs()).max().unwrap_or(0) + 1;
            let db = DiscreteBessel::new(theta, reach)?;
            Ok(db.matrix(x).determinant())
        }
        LatticeSet::Half(x) => {
            let reach = x.iter().map(|v| v.abs_floor()).max().unwrap_or(0) + 2;
            let db = DiscreteBessel::new(theta, reach)?;
            let m = nalgebra::DMatrix::from_fn(x.len(), x.len(), |i, j| kernel_k_with(&db, x[i], x[j]));
            Ok(m.determinant())
        }
    }
}
