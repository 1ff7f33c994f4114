//! Truncated multivariate polynomials ("jets") and a determinant over them.
//!
//! A jet in variables `w_1..w_m` keeps the coefficients of `w^n` for
//! `n_j ≤ d_j`. Products drop everything above the bounds, which is exact for
//! the coefficients that are kept.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Degree bounds and precomputed product structure.
#[derive(Clone, Debug)]
pub struct JetSpace {
    bounds: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
    /// `(i, j, k)` with `index(i) + index(j) = index(k)` componentwise.
    products: Vec<(usize, usize, usize)>,
}

pub type Jet = Vec<f64>;

impl JetSpace {
    pub fn new(bounds: &[usize]) -> Self {
        let mut strides = Vec::with_capacity(bounds.len());
        let mut size = 1usize;
        for &b in bounds {
            strides.push(size);
            size *= b + 1;
        }
        let mut products = Vec::new();
        for i in 0..size {
            let mi = Self::digits(bounds, &strides, i);
            for j in 0..size {
                let mj = Self::digits(bounds, &strides, j);
                if mi.iter().zip(&mj).zip(bounds).all(|((a, b), &d)| a + b <= d) {
                    products.push((i, j, i + j));
                }
            }
        }
        JetSpace { bounds: bounds.to_vec(), strides, size, products }
    }

    fn digits(bounds: &[usize], strides: &[usize], mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; bounds.len()];
        for v in (0..bounds.len()).rev() {
            out[v] = idx / strides[v];
            idx %= strides[v];
        }
        out
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    /// Exponent vector of coefficient `idx`.
    pub fn exponents(&self, idx: usize) -> Vec<usize> {
        Self::digits(&self.bounds, &self.strides, idx)
    }

    /// Coefficient index of an exponent vector, if within bounds.
    pub fn index(&self, exps: &[usize]) -> Option<usize> {
        if exps.len() != self.bounds.len() || exps.iter().zip(&self.bounds).any(|(e, b)| e > b) {
            return None;
        }
        Some(exps.iter().zip(&self.strides).map(|(e, s)| e * s).sum())
    }

    pub fn constant(&self, c: f64) -> Jet {
        let mut j = vec![0.0; self.size];
        j[0] = c;
        j
    }

    pub fn mul(&self, a: &[f64], b: &[f64]) -> Jet {
        let mut out = vec![0.0; self.size];
        for &(i, j, k) in &self.products {
            out[k] += a[i] * b[j];
        }
        out
    }

    /// `out -= a * b`.
    fn mul_sub_assign(&self, out: &mut [f64], a: &[f64], b: &[f64]) {
        for &(i, j, k) in &self.products {
            out[k] -= a[i] * b[j];
        }
    }

    /// Multiplicative inverse; needs a nonzero constant term. Coefficients are
    /// solved in index order, which is compatible with the grading.
    pub fn inverse(&self, a: &[f64]) -> Jet {
        let inv0 = 1.0 / a[0];
        let mut out = vec![0.0; self.size];
        out[0] = inv0;
        // products are sorted by i; collect per target k
        for k in 1..self.size {
            let mut s = 0.0;
            for &(i, j, kk) in &self.products {
                if kk == k && i != 0 {
                    s += a[i] * out[j];
                }
            }
            out[k] = -inv0 * s;
        }
        out
    }

    /// Determinant of a matrix of jets by Gaussian elimination, pivoting on
    /// the constant terms. Fails when the constant part is singular.
    pub fn determinant(&self, mut m: Vec<Vec<Jet>>) -> Result<Jet> {
        let n = m.len();
        let mut det = self.constant(1.0);
        let scale = m.iter().flatten().map(|j| j[0].abs()).fold(0.0, f64::max).max(1.0);
        for c in 0..n {
            let best = (c..n).max_by(|&a, &b| m[a][c][0].abs().total_cmp(&m[b][c][0].abs())).unwrap_or(c);
            if best != c {
                m.swap(best, c);
                det.iter_mut().for_each(|v| *v = -*v);
            }
            let pivot = m[c][c].clone();
            if !(pivot[0].abs() > 1e-14 * scale) {
                return Err(Error::Singular { pivot: c, magnitude: pivot[0].abs() });
            }
            det = self.mul(&det, &pivot);
            let inv = self.inverse(&pivot);
            let (top, bottom) = m.split_at_mut(c + 1);
            let prow = &top[c];
            for row in bottom.iter_mut() {
                let f = self.mul(&row[c], &inv);
                if f.iter().all(|&v| v == 0.0) {
                    continue;
                }
                for k in (c + 1)..n {
                    self.mul_sub_assign(&mut row[k], &f, &prow[k]);
                }
            }
        }
        Ok(det)
    }
}

/// Coefficients of `det(1 - K + K·diag(w_{g(b)}))` in the variables `w`.
///
/// With `w_j = 1 - z_j` this is `det(1 - Σ_j z_j K χ_{I_j})`, the generating
/// function `E[Π w_j^{N_j}]` of the occupation counts of a determinantal
/// process with kernel `K`; coefficient `w^n` is therefore `P(N = n)`.
pub fn count_coefficients(k: &DMatrix<f64>, groups: &[usize], bounds: &[usize]) -> Result<(JetSpace, Jet)> {
    let space = JetSpace::new(bounds);
    let n = k.nrows();
    assert_eq!(groups.len(), n);
    let mut m = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut e = space.constant(if a == b { 1.0 } else { 0.0 } - k[(a, b)]);
            let mut unit = vec![0usize; bounds.len()];
            unit[groups[b]] = 1;
            if let Some(idx) = space.index(&unit) {
                e[idx] += k[(a, b)];
            }
            m[a][b] = e;
        }
    }
    let det = space.determinant(m)?;
    Ok((space, det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_product() {
        let s = JetSpace::new(&[3, 2]);
        let a: Jet = (0..s.size()).map(|i| 1.0 + 0.3 * i as f64).collect();
        let inv = s.inverse(&a);
        let one = s.mul(&a, &inv);
        for (i, v) in one.iter().enumerate() {
            let e = if i == 0 { 1.0 } else { 0.0 };
            assert!((v - e).abs() < 1e-12, "{i}: {v}");
        }
    }

    #[test]
    fn univariate_determinant_matches_polynomial() {
        // det [[1+w, 2], [w, 3]] = 3 + 3w - 2w = 3 + w
        let s = JetSpace::new(&[2]);
        let m = vec![
            vec![vec![1.0, 1.0, 0.0], vec![2.0, 0.0, 0.0]],
            vec![vec![0.0, 1.0, 0.0], vec![3.0, 0.0, 0.0]],
        ];
        let d = s.determinant(m).unwrap();
        assert!((d[0] - 3.0).abs() < 1e-15 && (d[1] - 1.0).abs() < 1e-15 && d[2].abs() < 1e-15);
    }

    #[test]
    fn one_site_counts() {
        // a single site with occupation probability k: P(N=0)=1-k, P(N=1)=k
        let k = DMatrix::from_element(1, 1, 0.3);
        let (_, c) = count_coefficients(&k, &[0], &[2]).unwrap();
        assert!((c[0] - 0.7).abs() < 1e-15 && (c[1] - 0.3).abs() < 1e-15 && c[2] == 0.0);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        // det [[w, 1], [1, 0]] = -1
        let s = JetSpace::new(&[1]);
        let m = vec![vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![vec![1.0, 0.0], vec![0.0, 0.0]]];
        let d = s.determinant(m).unwrap();
        assert_eq!(d, vec![-1.0, 0.0]);
    }

    #[test]
    fn singular_pivot_reported() {
        let k = DMatrix::from_element(1, 1, 1.0);
        assert!(matches!(count_coefficients(&k, &[0], &[1]), Err(Error::Singular { .. })));
    }

    #[test]
    fn independent_sites_give_product_law() {
        // diagonal kernel: independent Bernoulli sites
        let p = [0.2, 0.5, 0.7];
        let k = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&p));
        let (s, c) = count_coefficients(&k, &[0, 0, 1], &[2, 1]).unwrap();
        let two = s.index(&[2, 1]).unwrap();
        assert!((c[two] - 0.2 * 0.5 * 0.7).abs() < 1e-15);
        let zero = s.index(&[0, 0]).unwrap();
        assert!((c[zero] - 0.8 * 0.5 * 0.3).abs() < 1e-15);
        assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
