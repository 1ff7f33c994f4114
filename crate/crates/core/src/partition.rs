//! Exact combinatorics of integer partitions: Frobenius and descent
//! encodings, dimensions of irreducible representations, Plancherel weights
//! and enumeration.

use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::{HalfInt, HalfPointSet, IntegerPointSet, Window};
use crate::special::ln_factorial;

/// A partition `λ = (λ_1 ≥ λ_2 ≥ ... ≥ λ_ℓ ≥ 1)`, identified with its Young diagram.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return invalid("partition parts must be positive");
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return invalid("partition parts must be weakly decreasing");
        }
        Ok(Partition { parts })
    }

    pub(crate) fn from_parts_unchecked(parts: Vec<usize>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.iter().all(|&p| p > 0));
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `|λ|`.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of nonzero rows.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    /// `λ_i` with 1-based `i`; zero beyond the length.
    pub fn row(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.row(1);
        let cols = (1..=width)
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count())
            .collect();
        Partition { parts: cols }
    }

    /// Hook lengths, row by row.
    pub fn hooks(&self) -> Vec<usize> {
        let conj = self.conjugate();
        let mut out = Vec::with_capacity(self.size());
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                let arm = row - j - 1;
                let leg = conj.parts[j] - i - 1;
                out.push(arm + leg + 1);
            }
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Frobenius coordinates `(p_1, ..., p_d | q_1, ..., q_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusCoords {
    pub p: Vec<usize>,
    pub q: Vec<usize>,
}

impl FrobeniusCoords {
    /// Number of diagonal squares.
    pub fn d(&self) -> usize {
        self.p.len()
    }
}

pub fn frobenius(lambda: &Partition) -> FrobeniusCoords {
    let conj = lambda.conjugate();
    let d = lambda.parts.iter().enumerate().take_while(|(i, &p)| p > *i).count();
    FrobeniusCoords {
        p: (0..d).map(|i| lambda.parts[i] - i - 1).collect(),
        q: (0..d).map(|i| conj.parts[i] - i - 1).collect(),
    }
}

/// `{λ_i - i : i ≥ 1}` restricted to `window`, with `λ_i = 0` beyond the length.
pub fn descent_set(lambda: &Partition, window: Window) -> IntegerPointSet {
    let len = lambda.length() as i64;
    let mut points: Vec<i64> = lambda
        .parts
        .iter()
        .enumerate()
        .map(|(i, &p)| p as i64 - i as i64 - 1)
        .filter(|&k| window.contains(k))
        .collect();
    // the tail λ_i - i = -i for i > ℓ
    let tail_top = (-len - 1).min(window.hi);
    if tail_top >= window.lo {
        points.extend(window.lo..=tail_top);
    }
    points.sort_unstable();
    IntegerPointSet { points, window, cofinite_below: window.lo <= -len }
}

/// Modified Frobenius coordinates `{p_i + 1/2} ∪ {-q_i - 1/2}`.
pub fn modified_frobenius(lambda: &Partition) -> HalfPointSet {
    let fr = frobenius(lambda);
    let mut doubled: Vec<i64> = fr
        .p
        .iter()
        .map(|&p| 2 * p as i64 + 1)
        .chain(fr.q.iter().map(|&q| -(2 * q as i64) - 1))
        .collect();
    doubled.sort_unstable();
    HalfPointSet { doubled }
}

/// `(𝒟(λ) + 1/2) △ (Z_{≤0} - 1/2)`, computed on a window wide enough to
/// contain every point of the symmetric difference.
pub fn modified_frobenius_by_symmetric_difference(lambda: &Partition) -> HalfPointSet {
    let reach = lambda.row(1).max(lambda.length()) as i64 + 1;
    let window = Window { lo: -reach, hi: reach };
    let descents = descent_set(lambda, window);
    let points = (window.lo..=window.hi)
        .filter(|&k| descents.contains(k) != (k < 0))
        .map(HalfInt::above)
        .collect();
    HalfPointSet::from_points(points)
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// Number of standard Young tableaux of shape `λ`, by the hook-length formula.
pub fn dimension(lambda: &Partition) -> BigUint {
    let hooks: BigUint = lambda.hooks().into_iter().fold(BigUint::one(), |acc, h| acc * h as u64);
    factorial(lambda.size()) / hooks
}

/// `det[1 / ((p_i + q_j + 1) p_i! q_j!)]`, which equals `dim λ / |λ|!`.
pub fn hook_determinant(lambda: &Partition) -> BigRational {
    let fr = frobenius(lambda);
    let d = fr.d();
    let mut m: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let den = BigUint::from(fr.p[i] + fr.q[j] + 1) * factorial(fr.p[i]) * factorial(fr.q[j]);
                    BigRational::new(BigInt::one(), den.into())
                })
                .collect()
        })
        .collect();
    rational_determinant(&mut m)
}

/// Determinant by Gaussian elimination over the rationals (destroys `m`).
pub fn rational_determinant(m: &mut [Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let delta = &f * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

/// `M_n(λ) = (dim λ)² / n!`.
pub fn plancherel_weight(lambda: &Partition) -> BigRational {
    let d = dimension(lambda);
    BigRational::new((&d * &d).into(), factorial(lambda.size()).into())
}

/// `ln(dim λ)` in floating point, from the hook-length formula.
pub fn ln_dimension(lambda: &Partition) -> f64 {
    ln_factorial(lambda.size()) - lambda.hooks().into_iter().map(|h| (h as f64).ln()).sum::<f64>()
}

/// `M^θ(λ) = e^{-θ} θ^n (dim λ / n!)²`, evaluated in log space.
pub fn poissonized_weight(lambda: &Partition, theta: f64) -> f64 {
    let n = lambda.size();
    if n == 0 {
        return (-theta).exp();
    }
    if theta == 0.0 {
        return 0.0;
    }
    let ln_ratio = ln_dimension(lambda) - ln_factorial(n);
    (-theta + n as f64 * theta.ln() + 2.0 * ln_ratio).exp()
}

/// Partitions of `n` in reverse-lexicographic order, starting from `(n)`.
pub fn enumerate_partitions(n: usize) -> Partitions {
    Partitions::bounded(n, n)
}

/// Reverse-lexicographic iterator over partitions of `n` with parts `≤ max_part`.
#[derive(Clone, Debug)]
pub struct Partitions {
    current: Option<Vec<usize>>,
}

impl Partitions {
    pub fn bounded(n: usize, max_part: usize) -> Self {
        if n == 0 {
            return Partitions { current: Some(Vec::new()) };
        }
        if max_part == 0 {
            return Partitions { current: None };
        }
        let mut first = vec![max_part; n / max_part];
        if !n.is_multiple_of(max_part) {
            first.push(n % max_part);
        }
        Partitions { current: Some(first) }
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let cur = self.current.take()?;
        let out = Partition::from_parts_unchecked(cur.clone());
        let mut next = cur;
        // strip trailing ones, then decrement the last part > 1 and refill
        let mut rem = 0;
        while next.last() == Some(&1) {
            next.pop();
            rem += 1;
        }
        if let Some(last) = next.last_mut() {
            *last -= 1;
            let k = *last;
            rem += 1;
            while rem > 0 {
                let take = rem.min(k);
                next.push(take);
                rem -= take;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

static PARTITION_COUNTS: OnceLock<Mutex<Vec<BigUint>>> = OnceLock::new();

/// `p(n)`, memoized, via Euler's pentagonal recurrence.
pub fn partition_count(n: usize) -> BigUint {
    let table = PARTITION_COUNTS.get_or_init(|| Mutex::new(vec![BigUint::one()]));
    let mut t = table.lock().unwrap_or_else(|e| e.into_inner());
    while t.len() <= n {
        let i = t.len() as i64;
        let mut acc = BigInt::zero();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > i {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc += sign * BigInt::from(t[(i - g1) as usize].clone());
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= i {
                acc += sign * BigInt::from(t[(i - g2) as usize].clone());
            }
        }
        t.push(acc.to_biguint().expect("p(n) is nonnegative"));
    }
    t[n].clone()
}
