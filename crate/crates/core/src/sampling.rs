//! Monte Carlo for Plancherel measures: uniform permutations pushed through
//! Robinson–Schensted insertion, the poissonized variant, and mergeable
//! mean/standard-error estimates.
//!
//! Random streams: ChaCha20 keyed by `master_seed` (via `seed_from_u64`),
//! with the ChaCha stream id set to the chunk index. Chunks are fixed-size and
//! merged in index order, so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::partition::{dimension, Partition};

/// Samples per independent stream.
pub const CHUNK: usize = 64;

/// The generator for one chunk of a batch.
pub fn stream(master_seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let n = perm.len();
    let mut seen = vec![false; n + 1];
    for &v in perm {
        if v == 0 || v > n || seen[v] {
            return Err(Error::NotPermutation(n));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Shape of the insertion tableau of a permutation of `1..=n`.
pub fn rsk_shape(perm: &[usize]) -> Result<Partition> {
    check_permutation(perm)?;
    Ok(Partition::new(insertion_rows(perm)).expect("row lengths are weakly decreasing"))
}

fn insertion_rows(perm: &[usize]) -> Vec<usize> {
    let mut rows: Vec<Vec<usize>> = Vec::new();
    for &v in perm {
        let mut x = v;
        let mut r = 0;
        loop {
            if r == rows.len() {
                rows.push(vec![x]);
                break;
            }
            let row = &mut rows[r];
            let pos = row.partition_point(|&e| e < x);
            if pos == row.len() {
                row.push(x);
                break;
            }
            x = std::mem::replace(&mut row[pos], x);
            r += 1;
        }
    }
    rows.iter().map(Vec::len).collect()
}

/// Length of the longest increasing subsequence, by patience sorting.
pub fn lis_length(seq: &[usize]) -> usize {
    let mut piles: Vec<usize> = Vec::new();
    for &v in seq {
        let pos = piles.partition_point(|&e| e < v);
        if pos == piles.len() {
            piles.push(v);
        } else {
            piles[pos] = v;
        }
    }
    piles.len()
}

/// Uniform permutation of `1..=n` by Fisher–Yates.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// One draw from `M_n`.
pub fn sample_plancherel_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Partition {
    let p = random_permutation(n, rng);
    Partition::new(insertion_rows(&p)).expect("valid shape")
}

/// One draw from `M_n`, reproducible from `seed`.
pub fn sample_plancherel(n: usize, seed: u64) -> Partition {
    sample_plancherel_with(n, &mut stream(seed, 0))
}

fn poisson_draw<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> Result<usize> {
    if !theta.is_finite() || theta < 0.0 {
        return invalid(format!("theta must be finite and nonnegative, got {theta}"));
    }
    if theta == 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(theta).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(d.sample(rng) as usize)
}

/// One draw from `M^θ`.
pub fn sample_poissonized_with<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> Result<Partition> {
    let n = poisson_draw(theta, rng)?;
    Ok(sample_plancherel_with(n, rng))
}

/// One draw from `M^θ`, reproducible from `seed`.
pub fn sample_poissonized(theta: f64, seed: u64) -> Result<Partition> {
    sample_poissonized_with(theta, &mut stream(seed, 0))
}

/// One draw from `M_n` by the Plancherel growth process: a box is added at
/// outer corner `μ ⊃ λ` with probability `dim μ / ((|λ|+1) dim λ)`.
pub fn sample_growth<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Partition {
    let mut parts: Vec<usize> = Vec::new();
    for size in 0..n {
        let lambda = Partition::new(parts.clone()).expect("valid");
        let d = dimension(&lambda);
        let mut u: f64 = rng.random();
        let mut chosen = None;
        let corners: Vec<usize> = (0..=parts.len()).filter(|&i| i == 0 || parts[i - 1] > parts.get(i).copied().unwrap_or(0)).collect();
        for (k, &i) in corners.iter().enumerate() {
            let mut next = parts.clone();
            if i == next.len() {
                next.push(1);
            } else {
                next[i] += 1;
            }
            let dm = dimension(&Partition::new(next.clone()).expect("valid"));
            let p = ratio(&dm, &d) / (size + 1) as f64;
            if u < p || k == corners.len() - 1 {
                chosen = Some(next);
                break;
            }
            u -= p;
        }
        parts = chosen.expect("some corner is chosen");
    }
    Partition::new(parts).expect("valid")
}

fn ratio(a: &num_bigint::BigUint, b: &num_bigint::BigUint) -> f64 {
    use num_traits::ToPrimitive;
    num_rational::BigRational::new(a.clone().into(), b.clone().into()).to_f64().unwrap_or(0.0)
}

/// Which measure a batch samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SizeParam {
    Fixed(usize),
    Poissonized(f64),
}

/// A reproducible batch of sampled partitions.
#[derive(Clone, Debug, Serialize)]
pub struct SampleBatch {
    pub master_seed: u64,
    pub param: SizeParam,
    pub samples: Vec<Partition>,
}

impl SampleBatch {
    pub fn generate(master_seed: u64, param: SizeParam, count: usize) -> Result<Self> {
        if let SizeParam::Poissonized(t) = param {
            poisson_draw(t, &mut stream(0, 0))?;
        }
        let samples = chunked(master_seed, count, |rng| match param {
            SizeParam::Fixed(n) => sample_plancherel_with(n, rng),
            SizeParam::Poissonized(t) => sample_poissonized_with(t, rng).expect("theta checked"),
        });
        Ok(SampleBatch { master_seed, param, samples })
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// Mean and standard error of a statistic, merged chunk by chunk in index order.
    pub fn estimate<F: Fn(&Partition) -> f64 + Sync>(&self, f: F) -> Result<Estimate> {
        if self.count() < 2 {
            return invalid("at least two samples are needed");
        }
        let parts: Vec<Estimate> = self.samples.par_chunks(CHUNK).map(|c| Estimate::from_values(c.iter().map(&f))).collect();
        Ok(parts.into_iter().fold(Estimate::default(), |a, b| a.merge(&b)))
    }
}

/// Runs `draw` `count` times over chunked, independently seeded streams.
pub fn chunked<T: Send, F: Fn(&mut ChaCha20Rng) -> T + Sync>(master_seed: u64, count: usize, draw: F) -> Vec<T> {
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = stream(master_seed, c as u64);
            let take = CHUNK.min(count - c * CHUNK);
            (0..take).map(|_| draw(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

/// `λ_1` for `count` draws from `M_n`, by patience sorting only.
pub fn sample_first_rows(n: usize, count: usize, master_seed: u64) -> Vec<usize> {
    chunked(master_seed, count, |rng| lis_length(&random_permutation(n, rng)))
}

/// Running mean and variance (Welford), mergeable (Chan et al.).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Estimate {
    pub count: usize,
    pub mean: f64,
    m2: f64,
}

impl Estimate {
    pub fn from_values(values: impl Iterator<Item = f64>) -> Self {
        let mut e = Estimate::default();
        for v in values {
            e.push(v);
        }
        e
    }

    pub fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn merge(&self, other: &Estimate) -> Estimate {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        Estimate {
            count: self.count + other.count,
            mean: self.mean + d * other.count as f64 / n,
            m2: self.m2 + other.m2 + d * d * self.count as f64 * other.count as f64 / n,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Edge-scaled rows `n^{1/3}(λ_i/√n - 2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaledRows {
    pub values: Vec<f64>,
}

pub fn scaled_edge(lambda: &Partition, m: usize) -> Result<ScaledRows> {
    if m == 0 {
        return invalid("m must be at least 1");
    }
    let n = lambda.size() as f64;
    if n == 0.0 {
        return invalid("the empty partition has no edge scaling");
    }
    Ok(ScaledRows { values: (1..=m).map(|i| scale_row(lambda.row(i), n)).collect() })
}

/// `n^{1/3}(l/√n - 2)`.
pub fn scale_row(l: usize, n: f64) -> f64 {
    n.cbrt() * (l as f64 / n.sqrt() - 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::plancherel_weight;
    use num_traits::ToPrimitive;

    #[test]
    fn rsk_examples() {
        assert_eq!(rsk_shape(&[1, 2, 3, 4]).unwrap().parts(), &[4]);
        assert_eq!(rsk_shape(&[4, 3, 2, 1]).unwrap().parts(), &[1, 1, 1, 1]);
        assert_eq!(rsk_shape(&[3, 1, 2]).unwrap().parts(), &[2, 1]);
        assert!(rsk_shape(&[1, 1, 2]).is_err());
        assert!(rsk_shape(&[0, 1]).is_err());
        assert!(rsk_shape(&[1, 3]).is_err());
        assert_eq!(rsk_shape(&[]).unwrap(), Partition::empty());
    }

    #[test]
    fn first_row_is_lis() {
        let mut rng = stream(7, 0);
        for i in 0..1000 {
            let n = 1 + (i * 37) % 500;
            let p = random_permutation(n, &mut rng);
            assert_eq!(rsk_shape(&p).unwrap().row(1), lis_length(&p));
        }
    }

    #[test]
    fn deterministic_draws() {
        assert_eq!(sample_plancherel(1, 3).parts(), &[1]);
        assert_eq!(sample_plancherel(50, 11), sample_plancherel(50, 11));
        let a = SampleBatch::generate(5, SizeParam::Fixed(30), 300).unwrap();
        let b = SampleBatch::generate(5, SizeParam::Fixed(30), 300).unwrap();
        assert_eq!(a.samples, b.samples);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| SampleBatch::generate(5, SizeParam::Fixed(30), 300).unwrap());
        assert_eq!(a.samples, c.samples);
        assert_eq!(sample_poissonized(0.0, 1).unwrap(), Partition::empty());
        assert!(sample_poissonized(-1.0, 1).is_err());
    }

    #[test]
    fn small_n_frequencies() {
        let batch = SampleBatch::generate(1, SizeParam::Fixed(3), 100_000).unwrap();
        for (shape, p) in [(vec![3], 1.0 / 6.0), (vec![2, 1], 2.0 / 3.0), (vec![1, 1, 1], 1.0 / 6.0)] {
            let e = batch.estimate(|l| (l.parts() == shape.as_slice()) as u8 as f64).unwrap();
            assert!((e.mean - p).abs() <= 4.0 * e.stderr(), "{shape:?}");
        }
    }

    #[test]
    fn growth_process_frequencies() {
        let n = 5;
        let mut counts = std::collections::HashMap::new();
        let draws = chunked(9, 40_000, |rng| sample_growth(n, rng));
        for p in &draws {
            *counts.entry(p.clone()).or_insert(0usize) += 1;
        }
        for p in crate::partition::enumerate_partitions(n) {
            let w = plancherel_weight(&p).to_f64().unwrap();
            let f = *counts.get(&p).unwrap_or(&0) as f64 / draws.len() as f64;
            let sd = (w * (1.0 - w) / draws.len() as f64).sqrt();
            assert!((f - w).abs() <= 4.0 * sd, "{p}: {f} vs {w}");
        }
    }

    #[test]
    fn poissonized_mean_size() {
        let batch = SampleBatch::generate(2, SizeParam::Poissonized(6.5), 100_000).unwrap();
        let e = batch.estimate(|l| l.size() as f64).unwrap();
        assert!((e.mean - 6.5).abs() <= 4.0 * e.stderr());
    }

    #[test]
    fn estimate_merging() {
        let batch = SampleBatch::generate(3, SizeParam::Fixed(4), 500).unwrap();
        let e = batch.estimate(|_| 2.5).unwrap();
        assert_eq!(e.mean, 2.5);
        assert_eq!(e.stderr(), 0.0);
        let vals: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let whole = Estimate::from_values(vals.iter().copied());
        let left = Estimate::from_values(vals[..37].iter().copied());
        let right = Estimate::from_values(vals[37..].iter().copied());
        let m1 = left.merge(&right);
        let m2 = right.merge(&left);
        assert!((m1.mean - whole.mean).abs() < 1e-15 && (m1.variance() - whole.variance()).abs() < 1e-14);
        assert!((m2.mean - whole.mean).abs() < 1e-15 && (m2.variance() - whole.variance()).abs() < 1e-14);
        let single = SampleBatch { master_seed: 0, param: SizeParam::Fixed(1), samples: vec![Partition::empty()] };
        assert!(single.estimate(|_| 1.0).is_err());
    }

    #[test]
    fn scaled_rows() {
        let n = 100usize;
        let l = Partition::new(vec![n]).unwrap();
        let s = scaled_edge(&l, 3).unwrap();
        assert!((s.values[0] - (n as f64).cbrt() * ((n as f64).sqrt() - 2.0)).abs() < 1e-12);
        assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
        let batch = SampleBatch::generate(4, SizeParam::Fixed(200), 200).unwrap();
        for l in &batch.samples {
            let s = scaled_edge(l, 5).unwrap();
            assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
        }
        assert!(scaled_edge(&l, 0).is_err());
    }

    #[test]
    fn first_row_mean_at_ten_thousand() {
        let rows = sample_first_rows(10_000, 1000, 17);
        let mean = rows.iter().map(|&l| l as f64 / 100.0).sum::<f64>() / rows.len() as f64;
        // 2 + E[TW_2] n^{-1/3}, E[TW_2] = -1.7711
        let predicted = 2.0 - 1.7711 / 10_000f64.cbrt();
        assert!((mean - predicted).abs() < 0.02, "{mean} vs {predicted}");
    }
}
