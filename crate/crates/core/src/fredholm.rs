//! Fredholm determinants of the correlation kernels through finite
//! truncation: gap probabilities, occupation-count laws, joint edge
//! distributions, `det(1 + L)`, and the Airy-kernel distributions.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::jet::{count_coefficients, JetSpace};
use crate::kernels::{airy_kernel, complement_kernel, kernel_k_with, kernel_l, DiscreteBessel, KernelFamily};
use crate::lattice::HalfInt;
use crate::quadrature::gauss_legendre;
use crate::special::{airy_pair, bessel_tail_bound, ln_factorial};

/// Hard cap on truncation size.
pub const MAX_SITES: usize = 4096;

/// Length of the Airy quadrature interval `[s, s + cutoff]`.
pub const AIRY_CUTOFF: f64 = 40.0;
/// Clustering strength of the exponential node map.
const AIRY_CLUSTER: f64 = 2.5;

/// Half-open integer interval `[lo, hi)`; `hi = None` means `[lo, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: Option<i64>,
}

impl Interval {
    pub fn finite(lo: i64, hi: i64) -> Self {
        Interval { lo, hi: Some(hi) }
    }

    pub fn ray(lo: i64) -> Self {
        Interval { lo, hi: None }
    }

    fn overlaps(&self, other: &Interval) -> bool {
        let ends_before = |a: &Interval, b: &Interval| a.hi.is_some_and(|h| h <= b.lo);
        !(ends_before(self, other) || ends_before(other, self))
    }
}

/// Disjoint intervals with generating-function weights `z_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalFamily {
    pub intervals: Vec<Interval>,
    pub weights: Vec<f64>,
}

impl IntervalFamily {
    pub fn new(intervals: Vec<Interval>, weights: Vec<f64>) -> Result<Self> {
        if intervals.len() != weights.len() {
            return invalid("one weight per interval is required");
        }
        for (i, a) in intervals.iter().enumerate() {
            if a.hi.is_some_and(|h| h < a.lo) {
                return invalid(format!("interval [{}, {:?}) is reversed", a.lo, a.hi));
            }
            for b in &intervals[i + 1..] {
                if a.overlaps(b) {
                    return invalid("intervals must be pairwise disjoint");
                }
            }
        }
        Ok(IntervalFamily { intervals, weights })
    }

    /// Unit weights.
    pub fn unweighted(intervals: Vec<Interval>) -> Result<Self> {
        let w = vec![1.0; intervals.len()];
        Self::new(intervals, w)
    }
}

/// Where a truncated operator lives.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Sites {
    /// Integer sites, with the interval index of each site.
    Integer { points: Vec<i64>, group: Vec<usize> },
    /// Half-integer sites.
    Half(Vec<HalfInt>),
    /// Quadrature nodes and weights on the real line.
    Nodes { x: Vec<f64>, w: Vec<f64> },
}

/// A dense symmetric truncation of a kernel with a bound on the trace that
/// was cut off.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub sites: Sites,
    pub matrix: DMatrix<f64>,
    pub tail_bound: f64,
}

impl TruncatedOperator {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn symmetry_residual(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).abs().max()
    }
}

/// What to truncate.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// Integer intervals (for `J`).
    Intervals(Vec<Interval>),
    /// `[s, ∞)` on the real line, with the quadrature order (for the Airy kernel).
    AiryRay { s: f64, order: usize },
    /// All half-integers (for `L`); the window grows with the tolerance.
    HalfIntegers,
}

/// Number of sites kept from `[lo, ∞)` so that the `J`-trace beyond them is
/// at most `eps`.
fn ray_length(theta: f64, lo: i64, eps: f64) -> Result<(usize, f64)> {
    if theta == 0.0 {
        return Ok((0.max(-lo).max(1) as usize, 0.0));
    }
    // sites lo..lo+len-1 kept; the dropped trace is Σ_{l≥1} l J_{lo+len+l}²
    let mut len = (-lo).max(1) as usize;
    let mut best = f64::INFINITY;
    while len <= MAX_SITES {
        let b = bessel_tail_bound(theta, lo + len as i64, 0);
        best = b;
        if b <= eps {
            return Ok((len, b));
        }
        len += 1 + len / 16;
    }
    Err(Error::Unachievable { eps, cap: MAX_SITES, achieved: best })
}

/// Truncates a kernel to a finite matrix whose neglected trace is below `eps`.
pub fn build_truncation(family: KernelFamily, region: &Region, eps: f64) -> Result<TruncatedOperator> {
    if !(eps > 0.0) {
        return invalid("eps must be positive");
    }
    match (family, region) {
        (KernelFamily::J(p), Region::Intervals(iv)) => {
            IntervalFamily::unweighted(iv.clone())?;
            let mut points = Vec::new();
            let mut group = Vec::new();
            let mut tail = 0.0;
            for (g, i) in iv.iter().enumerate() {
                let hi = match i.hi {
                    Some(h) => h,
                    None => {
                        let (len, b) = ray_length(p.theta, i.lo, eps / iv.len() as f64)?;
                        tail += b;
                        i.lo + len as i64
                    }
                };
                if points.len() + (hi - i.lo).max(0) as usize > MAX_SITES {
                    return Err(Error::Unachievable { eps, cap: MAX_SITES, achieved: f64::INFINITY });
                }
                for k in i.lo..hi {
                    points.push(k);
                    group.push(g);
                }
            }
            let reach = points.iter().map(|v| v.abs()).max().unwrap_or(0) + 1;
            let db = DiscreteBessel::new(p.theta, reach)?;
            let matrix = db.matrix(&points);
            Ok(TruncatedOperator { sites: Sites::Integer { points, group }, matrix, tail_bound: tail })
        }
        (KernelFamily::Airy, Region::AiryRay { s, order }) => Ok(airy_truncation(*s, *order)),
        (KernelFamily::L(p), Region::HalfIntegers) => {
            let reach = l_window_for(p.theta, eps);
            let tail_bound = l_hilbert_schmidt_tail(p.theta, reach);
            if tail_bound > eps {
                return Err(Error::Unachievable { eps, cap: 2 * reach.abs_floor() as usize + 2, achieved: tail_bound });
            }
            let pts = half_window(reach);
            let matrix = l_matrix(p.theta, &pts)?;
            Ok(TruncatedOperator { sites: Sites::Half(pts), matrix, tail_bound })
        }
        (f, r) => invalid(format!("cannot truncate the {} kernel over {r:?}", f.name())),
    }
}

/// Nyström discretization of the Airy kernel on `[s, s + cutoff]` with
/// Gauss–Legendre nodes pushed towards `s` by an exponential map.
pub fn airy_truncation(s: f64, order: usize) -> TruncatedOperator {
    let (t, w) = gauss_legendre(order);
    let (c, k) = (AIRY_CUTOFF, AIRY_CLUSTER);
    let denom = k.exp_m1();
    let mut xs = Vec::with_capacity(order);
    let mut ws = Vec::with_capacity(order);
    for (&ti, &wi) in t.iter().zip(&w) {
        let u = 0.5 * (ti + 1.0);
        xs.push(s + c * (k * u).exp_m1() / denom);
        ws.push(0.5 * wi * c * k * (k * u).exp() / denom);
    }
    let matrix = DMatrix::from_fn(order, order, |i, j| ws[i].sqrt() * airy_kernel(xs[i], xs[j]) * ws[j].sqrt());
    let end = s + c;
    TruncatedOperator { sites: Sites::Nodes { x: xs, w: ws }, matrix, tail_bound: airy_trace_tail(end) }
}

/// Bound on `∫_y^∞ A(x, x) dx` for `y ≥ 1`, from `A(x,x) ≤ e^{-(4/3)x^{3/2}} / (8πx)`.
fn airy_trace_tail(y: f64) -> f64 {
    if y < 1.0 {
        return f64::INFINITY;
    }
    let z = 4.0 / 3.0 * y.powf(1.5);
    (-z).exp() / (8.0 * std::f64::consts::PI * y * 2.0 * y.sqrt())
}

/// `det(1 - M)` through a symmetric factorization, falling back to LU.
pub fn det_one_minus(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let a = DMatrix::identity(n, n) - m;
    match a.clone().cholesky() {
        Some(ch) => ch.l().diagonal().iter().map(|v| v * v).product(),
        None => a.lu().determinant(),
    }
}

/// `det(1 - K)` over the truncation: the probability of no particle there.
pub fn gap_probability(op: &TruncatedOperator) -> f64 {
    det_one_minus(&op.matrix)
}

/// `M^θ(λ_1 ≤ s) = det(1 - [J]_{s, s+1, ...})`.
pub fn edge_gap(theta: f64, s: i64, eps: f64) -> Result<f64> {
    let op = build_truncation(KernelFamily::J(crate::kernels::KernelParams::new(theta)?), &Region::Intervals(vec![Interval::ray(s)]), eps)?;
    Ok(gap_probability(&op))
}

/// `det(1 - Σ_j z_j [J]_{I_j})`.
pub fn weighted_determinant(theta: f64, family: &IntervalFamily, eps: f64) -> Result<f64> {
    let op = j_truncation(theta, &family.intervals, eps)?;
    let Sites::Integer { group, .. } = &op.sites else { unreachable!() };
    let n = op.size();
    let mut m = op.matrix.clone();
    for b in 0..n {
        let z = family.weights[group[b]];
        for a in 0..n {
            m[(a, b)] *= z;
        }
    }
    Ok((DMatrix::identity(n, n) - m).lu().determinant())
}

fn j_truncation(theta: f64, intervals: &[Interval], eps: f64) -> Result<TruncatedOperator> {
    build_truncation(KernelFamily::J(crate::kernels::KernelParams::new(theta)?), &Region::Intervals(intervals.to_vec()), eps)
}

/// Joint law of the counts `N_j = |𝒟 ∩ I_j|` for all `N_j ≤ bounds[j]`,
/// indexed by exponent vector in the returned table.
#[derive(Clone, Debug, Serialize)]
pub struct CountTable {
    pub bounds: Vec<usize>,
    /// `(counts, probability)`, counts in lexicographic order.
    pub rows: Vec<(Vec<usize>, f64)>,
    pub tail_bound: f64,
}

impl CountTable {
    pub fn get(&self, counts: &[usize]) -> Option<f64> {
        self.rows.iter().find(|(c, _)| c == counts).map(|r| r.1)
    }

    pub fn total(&self) -> f64 {
        self.rows.iter().map(|r| r.1).sum()
    }
}

/// Largest jet used by the count computation.
const MAX_JET: usize = 1 << 14;

/// Occupation-count law from a truncated kernel.
///
/// Sites with `K(x,x) > 1/2` are handled through their holes: after the
/// particle–hole transform on those sites the process is again determinantal,
/// and `1 - K` stays well conditioned even when the original gap probability
/// vanishes. With `P_g` particles off the transformed sites and `H_g` holes on
/// the `Z_g` transformed sites of group `g`, `N_g = P_g + Z_g - H_g`.
fn table_from_operator(op: &TruncatedOperator, groups: &[usize], bounds: &[usize]) -> Result<CountTable> {
    let n = op.size();
    let m = bounds.len();
    let mut flip: Vec<bool> = (0..n).map(|i| op.matrix[(i, i)] > 0.5).collect();
    let mut holes = vec![0usize; m];
    for i in 0..n {
        if flip[i] {
            holes[groups[i]] += 1;
        }
    }
    let jet_size: usize = bounds.iter().zip(&holes).map(|(b, h)| (b + 1) * (h + 1)).product();
    if jet_size > MAX_JET {
        flip.iter_mut().for_each(|f| *f = false);
        holes.iter_mut().for_each(|h| *h = 0);
    }
    // variables: particles of group g, then holes of group g (when present)
    let mut var_bounds = bounds.to_vec();
    let mut hole_var = vec![usize::MAX; m];
    for g in 0..m {
        if holes[g] > 0 {
            hole_var[g] = var_bounds.len();
            var_bounds.push(holes[g]);
        }
    }
    let labels: Vec<usize> = (0..n).collect();
    let z: Vec<usize> = (0..n).filter(|&i| flip[i]).collect();
    let kz = complement_kernel(&op.matrix, &labels, &z)?;
    let column_var: Vec<usize> = (0..n).map(|i| if flip[i] { hole_var[groups[i]] } else { groups[i] }).collect();
    let (space, coeffs) = count_coefficients(&kz, &column_var, &var_bounds)?;

    let table = JetSpace::new(bounds);
    let mut probs = vec![0.0; table.size()];
    for (idx, &c) in coeffs.iter().enumerate() {
        let e = space.exponents(idx);
        let counts: Option<Vec<usize>> = (0..m)
            .map(|g| {
                let h = if holes[g] > 0 { e[hole_var[g]] } else { 0 };
                let total = e[g] + holes[g];
                total.checked_sub(h)
            })
            .collect();
        if let Some(cnt) = counts.and_then(|c| table.index(&c)) {
            probs[cnt] += c;
        }
    }
    let mut rows: Vec<(Vec<usize>, f64)> = (0..table.size()).map(|i| (table.exponents(i), probs[i])).collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(CountTable { bounds: bounds.to_vec(), rows, tail_bound: op.tail_bound })
}

/// All probabilities `P(N_j = n_j ∀j)` with `n_j ≤ bounds[j]`.
///
/// These are `(Π_j (-1)^{n_j} / n_j!) ∂^n det(1 - Σ z_j [J]_{I_j})` at
/// `z = 1`, extracted as Taylor coefficients in `w = 1 - z`.
pub fn count_table(theta: f64, intervals: &[Interval], bounds: &[usize], eps: f64) -> Result<CountTable> {
    if bounds.len() != intervals.len() {
        return invalid("one count bound per interval is required");
    }
    let op = j_truncation(theta, intervals, eps)?;
    let Sites::Integer { group, .. } = &op.sites else { unreachable!() };
    table_from_operator(&op, &group.clone(), bounds)
}

/// `P(|𝒟 ∩ I_j| = N_j ∀j)` under `M^θ`.
pub fn count_distribution(theta: f64, family: &IntervalFamily, counts: &[usize], eps: f64) -> Result<f64> {
    let t = count_table(theta, &family.intervals, counts, eps)?;
    Ok(t.get(counts).expect("requested counts are inside the table"))
}

/// `M^θ(λ_i < a_i, i = 1..m)` for `a_1 ≥ a_2 ≥ ... ≥ a_m`.
///
/// With `t_i = ⌈a_i⌉ - i` (strictly decreasing), `λ_i < a_i` says that fewer
/// than `i` descents lie in `[t_i, ∞)`. The rays are split into
/// `I_1 = [t_1, ∞)`, `I_j = [t_j, t_{j-1})`, and admissible counts are those
/// whose partial sums satisfy `N_1 + ... + N_i ≤ i - 1`.
pub fn joint_edge_cdf(theta: f64, a: &[f64], eps: f64) -> Result<f64> {
    if a.is_empty() {
        return invalid("at least one threshold is required");
    }
    if a.iter().any(|v| !v.is_finite()) {
        return invalid("thresholds must be finite");
    }
    if a.windows(2).any(|w| w[0] < w[1]) {
        return invalid("thresholds must be nonincreasing");
    }
    let t: Vec<i64> = a.iter().enumerate().map(|(i, v)| v.ceil() as i64 - (i as i64 + 1)).collect();
    let intervals: Vec<Interval> = t
        .iter()
        .enumerate()
        .map(|(j, &tj)| if j == 0 { Interval::ray(tj) } else { Interval::finite(tj, t[j - 1]) })
        .collect();
    let bounds: Vec<usize> = (0..a.len()).collect();
    let table = count_table(theta, &intervals, &bounds, eps)?;
    Ok(table
        .rows
        .iter()
        .filter(|(n, _)| {
            let mut acc = 0;
            n.iter().enumerate().all(|(i, &k)| {
                acc += k;
                acc <= i
            })
        })
        .map(|r| r.1)
        .sum())
}

/// Half-integers `x` with `|x| ≤ reach`.
fn half_window(reach: HalfInt) -> Vec<HalfInt> {
    let r = reach.abs_floor();
    (-r - 1..=r).map(HalfInt::above).collect()
}

/// Bound on the squared Hilbert–Schmidt norm of `L` outside `|x| ≤ reach`.
pub fn l_hilbert_schmidt_tail(theta: f64, reach: HalfInt) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    // L(x,y)² ≤ θ^{a+b+1} / (a!² b!²) with a, b = |x| - ½, |y| - ½
    let term = |a: usize| (a as f64 * theta.ln() - 2.0 * ln_factorial(a)).exp();
    let full: f64 = (0..400).map(term).sum();
    let outside: f64 = ((reach.abs_floor() as usize + 1)..400).map(term).sum();
    // both halves of the window, both orders of (x, y)
    4.0 * theta * outside * full
}

/// Smallest half-integer reach whose Hilbert–Schmidt tail is below `eps`.
pub fn l_window_for(theta: f64, eps: f64) -> HalfInt {
    let mut r = 0;
    while l_hilbert_schmidt_tail(theta, HalfInt::above(r)) > eps && r < 400 {
        r += 1;
    }
    HalfInt::above(r)
}

fn l_matrix(theta: f64, pts: &[HalfInt]) -> Result<DMatrix<f64>> {
    let n = pts.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = kernel_l(pts[i], pts[j], theta)?;
        }
    }
    Ok(m)
}

/// `det(1 + [L])` over `|x| ≤ reach`.
pub fn fredholm_det_l(theta: f64, reach: HalfInt) -> Result<f64> {
    let pts = half_window(reach);
    let m = l_matrix(theta, &pts)?;
    let n = pts.len();
    Ok((DMatrix::identity(n, n) + m).lu().determinant())
}

/// `max |K - L(1+L)^{-1}|` over `|x| ≤ reach`.
pub fn resolvent_residual(theta: f64, reach: HalfInt) -> Result<f64> {
    let pts = half_window(reach);
    let n = pts.len();
    let l = l_matrix(theta, &pts)?;
    let inv = (DMatrix::identity(n, n) + &l)
        .try_inverse()
        .ok_or(Error::Singular { pivot: 0, magnitude: 0.0 })?;
    let r = &l * inv;
    let db = DiscreteBessel::new(theta, reach.abs_floor() + 2)?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((kernel_k_with(&db, pts[i], pts[j]) - r[(i, j)]).abs());
        }
    }
    Ok(worst)
}

/// `F_2(s) = det(1 - [A]_{[s,∞)})`.
pub fn airy_gap(s: f64, order: usize) -> Result<f64> {
    if order < 20 {
        return invalid("Airy quadrature order must be at least 20");
    }
    Ok(gap_probability(&airy_truncation(s, order)))
}

/// `P(N[s,∞) = k)` for `k ≤ max_count` in the Airy ensemble.
pub fn airy_count_probabilities(s: f64, order: usize, max_count: usize) -> Result<Vec<f64>> {
    if order < 20 {
        return invalid("Airy quadrature order must be at least 20");
    }
    let op = airy_truncation(s, order);
    let groups = vec![0; op.size()];
    let (_, c) = count_coefficients(&op.matrix, &groups, &[max_count])?;
    Ok(c)
}

/// Distribution function of the `k`-th largest Airy point (`k ≥ 1`):
/// `P(N[s,∞) ≤ k-1)`.
pub fn airy_kth_cdf(s: f64, k: usize, order: usize) -> Result<f64> {
    if k == 0 {
        return invalid("k starts at 1");
    }
    Ok(airy_count_probabilities(s, order, k - 1)?.iter().sum())
}

/// Eigenvalues of a symmetric truncation, ascending.
pub fn eigenvalues(op: &TruncatedOperator) -> Vec<f64> {
    let mut v: Vec<f64> = op.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `∫_s^∞ A(x,x) dx = (2s² A(s)² - 2s A'(s)² - A(s)A'(s)) / 3`.
pub fn airy_trace(s: f64) -> f64 {
    let (a, d) = airy_pair(s);
    (2.0 * s * s * a * a - 2.0 * s * d * d - a * d) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelParams;
    use crate::lattice::Window;
    use crate::partition::{descent_set, enumerate_partitions, poissonized_weight, Partition};

    /// `Σ_λ M^θ(λ)` over `|λ| ≤ 40` satisfying `pred`.
    fn enumeration_oracle<F: Fn(&Partition) -> bool>(theta: f64, pred: F) -> f64 {
        (0..=40).flat_map(enumerate_partitions).filter(|p| pred(p)).map(|p| poissonized_weight(&p, theta)).sum()
    }

    #[test]
    fn gap_at_zero_theta() {
        assert!((edge_gap(0.0, 0, 1e-12).unwrap() - 1.0).abs() < 1e-15);
        let op = build_truncation(KernelFamily::J(KernelParams::new(0.0).unwrap()), &Region::Intervals(vec![Interval::ray(0)]), 1e-12).unwrap();
        assert!(op.matrix.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gap_matches_enumeration() {
        for s in 0..6 {
            let oracle = enumeration_oracle(1.0, |p| p.row(1) as i64 <= s);
            let g = edge_gap(1.0, s, 1e-14).unwrap();
            assert!((g - oracle).abs() < 1e-8, "s={s}: {g} vs {oracle}");
        }
        let mut prev = 0.0;
        for s in -2..12 {
            let g = edge_gap(2.5, s, 1e-14).unwrap();
            assert!(g >= prev - 1e-15);
            prev = g;
        }
    }

    #[test]
    fn truncation_trace_and_positivity() {
        let p = KernelParams::new(4.0).unwrap();
        let op = build_truncation(KernelFamily::J(p), &Region::Intervals(vec![Interval::ray(0)]), 1e-12).unwrap();
        // Σ_{k≥0} J(k,k) = Σ_{l≥1} l J_l(4)²
        let db = DiscreteBessel::new(4.0, 80).unwrap();
        let exact = db.weighted_tail(0, 0);
        assert!((op.trace() - exact).abs() <= 1e-12 + op.tail_bound);
        assert!(eigenvalues(&op)[0] >= -1e-10);
        assert!(op.symmetry_residual() <= 1e-12);
    }

    #[test]
    fn unachievable_eps_is_reported() {
        let p = KernelParams::new(1e8).unwrap();
        let r = build_truncation(KernelFamily::J(p), &Region::Intervals(vec![Interval::ray(-20_000)]), 1e-12);
        assert!(matches!(r, Err(Error::Unachievable { .. })));
    }

    fn descent_counts(p: &Partition, intervals: &[(i64, i64)]) -> Vec<usize> {
        let w = Window { lo: intervals.iter().map(|i| i.0).min().unwrap(), hi: intervals.iter().map(|i| i.1).max().unwrap() };
        let d = descent_set(p, w);
        intervals.iter().map(|&(lo, hi)| (lo..hi).filter(|&k| d.contains(k)).count()).collect()
    }

    #[test]
    fn count_law_matches_enumeration() {
        let iv = [(0, 3), (3, 6)];
        let family = IntervalFamily::unweighted(vec![Interval::finite(0, 3), Interval::finite(3, 6)]).unwrap();
        let table = count_table(1.0, &family.intervals, &[3, 3], 1e-14).unwrap();
        assert!((table.total() - 1.0).abs() < 1e-8);
        for n1 in 0..=2 {
            for n2 in 0..=2 {
                let oracle = enumeration_oracle(1.0, |p| descent_counts(p, &iv) == vec![n1, n2]);
                let v = count_distribution(1.0, &family, &[n1, n2], 1e-14).unwrap();
                assert!((v - oracle).abs() < 1e-6, "({n1},{n2}): {v} vs {oracle}");
                assert!((table.get(&[n1, n2]).unwrap() - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_counts_and_single_site() {
        let family = IntervalFamily::unweighted(vec![Interval::finite(-1, 2), Interval::ray(4)]).unwrap();
        let zero = count_distribution(1.3, &family, &[0, 0], 1e-14).unwrap();
        assert!((zero - weighted_determinant(1.3, &family, 1e-14).unwrap()).abs() < 1e-13);
        let one = IntervalFamily::unweighted(vec![Interval::finite(2, 3)]).unwrap();
        let j = crate::kernels::kernel_j(2, 2, 1.3, crate::kernels::JMode::Auto).unwrap();
        assert!((count_distribution(1.3, &one, &[1], 1e-14).unwrap() - j).abs() < 1e-14);
        assert!(IntervalFamily::unweighted(vec![Interval::finite(0, 3), Interval::finite(2, 5)]).is_err());
        assert!(IntervalFamily::unweighted(vec![Interval::ray(0), Interval::finite(7, 9)]).is_err());
    }

    #[test]
    fn joint_edge_matches_enumeration() {
        let v = joint_edge_cdf(1.0, &[3.5, 2.5], 1e-14).unwrap();
        let oracle = enumeration_oracle(1.0, |p| p.row(1) < 4 && p.row(2) < 3);
        assert!((v - oracle).abs() < 1e-6, "{v} vs {oracle}");
        let v = joint_edge_cdf(1.5, &[4.0, 2.2, 1.0], 1e-14).unwrap();
        let oracle = enumeration_oracle(1.5, |p| (p.row(1) as f64) < 4.0 && (p.row(2) as f64) < 2.2 && (p.row(3) as f64) < 1.0);
        assert!((v - oracle).abs() < 1e-6, "{v} vs {oracle}");
        for a in [0.5, 2.0, 3.7] {
            let m1 = joint_edge_cdf(2.0, &[a], 1e-14).unwrap();
            assert!((m1 - edge_gap(2.0, a.ceil() as i64 - 1, 1e-14).unwrap()).abs() < 1e-14);
        }
        assert!(joint_edge_cdf(1.0, &[1.0, 2.0], 1e-12).is_err());
        // monotone in each threshold
        let base = joint_edge_cdf(2.0, &[4.0, 3.0], 1e-14).unwrap();
        assert!(joint_edge_cdf(2.0, &[5.0, 3.0], 1e-14).unwrap() >= base);
        assert!(joint_edge_cdf(2.0, &[4.0, 4.0], 1e-14).unwrap() >= base);
    }

    #[test]
    fn det_one_plus_l() {
        assert_eq!(fredholm_det_l(0.0, HalfInt::above(3)).unwrap(), 1.0);
        let v = fredholm_det_l(1.0, HalfInt::above(20)).unwrap();
        assert!((v / std::f64::consts::E - 1.0).abs() < 1e-10);
        for theta in [0.5, 1.0, 2.0, 4.0] {
            let reach = l_window_for(theta, 1e-20);
            assert!((fredholm_det_l(theta, reach).unwrap() / f64::exp(theta) - 1.0).abs() < 1e-10);
            assert!(resolvent_residual(theta, reach).unwrap() < 1e-10);
        }
        let op = build_truncation(KernelFamily::L(KernelParams::new(2.0).unwrap()), &Region::HalfIntegers, 1e-16).unwrap();
        assert!(op.tail_bound <= 1e-16);
    }

    #[test]
    fn airy_gap_values() {
        // Tracy–Widom F_2 from an independent Nyström computation
        let cases = [(-3.0, 0.080_319_552_939_34), (-2.0, 0.413_224_142_505_14), (-1.0, 0.807_214_241_999_3), (0.0, 0.969_372_828_355_27), (1.0, 0.997_505_438_149_39), (2.0, 0.999_887_553_698_31)];
        for (s, f) in cases {
            let g = airy_gap(s, 60).unwrap();
            assert!((g - f).abs() < 1e-9, "s={s}: {g}");
            assert!((airy_gap(s, 120).unwrap() - g).abs() < 1e-8);
        }
        assert!((airy_gap(8.0, 40).unwrap() - 1.0).abs() < 1e-12);
        assert!(airy_gap(0.0, 10).is_err());
        let mut prev = 1.0;
        for i in 0..30 {
            let g = airy_gap(4.0 - 0.3 * i as f64, 40).unwrap();
            assert!(g <= prev + 1e-14);
            prev = g;
        }
    }

    #[test]
    fn airy_second_point() {
        for (s, f) in [(-3.0, 0.821_790_663_299_51), (-2.0, 0.986_080_795_306_54), (-1.0, 0.999_686_094_617_46)] {
            let v = airy_kth_cdf(s, 2, 80).unwrap();
            assert!((v - f).abs() < 1e-9, "s={s}: {v}");
        }
        assert!((airy_kth_cdf(-1.5, 1, 60).unwrap() - airy_gap(-1.5, 60).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn airy_trace_closed_form() {
        for s in [-4.0, -1.0, 0.0, 2.0] {
            let op = airy_truncation(s, 80);
            assert!((op.trace() - airy_trace(s)).abs() < 1e-10, "s={s}");
        }
    }
}
