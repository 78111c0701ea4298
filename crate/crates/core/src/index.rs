//! Multi-indices, grid indices and monomials.
//!
//! A [`MultiIndex`] is an exponent vector `(n_1, .., n_d)`; it indexes
//! partial derivatives, monomials and Taylor coefficients. A [`GridIndex`]
//! is a lattice point `m` of `{0, .., N}^d` whose centre is `m / N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the number of units a synthesis run may allocate.
///
/// Counted as `(N + 1)^d` grid points times the number of Taylor terms per
/// grid point. Overridable through the `BIACT_SAFETY_CAP` environment variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SafetyCap(pub u64);

impl SafetyCap {
    pub const DEFAULT: SafetyCap = SafetyCap(10_000_000);
    pub const ENV_VAR: &'static str = "BIACT_SAFETY_CAP";

    pub fn from_env() -> Self {
        std::env::var(Self::ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(SafetyCap)
            .unwrap_or(Self::DEFAULT)
    }

    pub fn check(&self, what: impl Into<String>, estimate: u128) -> Result<()> {
        if estimate > self.0 as u128 {
            return Err(Error::Infeasible {
                what: what.into(),
                estimate,
                cap: self.0,
            });
        }
        Ok(())
    }
}

impl Default for SafetyCap {
    fn default() -> Self {
        Self::from_env()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// The unit multi-index `e_k` scaled by `order`.
    pub fn axis(d: usize, k: usize, order: u32) -> Self {
        let mut v = vec![0; d];
        v[k] = order;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `|n| = n_1 + .. + n_d`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `n! = n_1! .. n_d!`, with overflow reported.
    pub fn factorial(&self) -> Result<u64> {
        multi_factorial(self)
    }

    /// Places the exponents at positions `subset` of a length-`d` index.
    pub fn embed(&self, subset: &[usize], d: usize) -> MultiIndex {
        let mut v = vec![0; d];
        for (j, &k) in subset.iter().enumerate() {
            v[k] = self.0[j];
        }
        MultiIndex(v)
    }

    /// Concatenation, used to split monomials across coordinate blocks.
    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        MultiIndex(v)
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// A lattice point `m in {0, .., N}^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridIndex {
    coords: Vec<u32>,
    resolution: u32,
}

impl GridIndex {
    pub fn new(coords: Vec<u32>, resolution: u32) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::InvalidArgument("grid resolution must be >= 1".into()));
        }
        if let Some(c) = coords.iter().find(|&&c| c > resolution) {
            return Err(Error::InvalidArgument(format!(
                "grid coordinate {c} outside [0, {resolution}]"
            )));
        }
        Ok(GridIndex { coords, resolution })
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `m / N`.
    pub fn center(&self) -> Vec<f64> {
        let n = self.resolution as f64;
        self.coords.iter().map(|&m| m as f64 / n).collect()
    }
}

/// Checked binomial coefficient.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::Overflow("binomial coefficient"));
        }
    }
    Ok(acc as u64)
}

/// All multi-indices of length `d` with `|n| < n`, in graded lexicographic
/// order: ascending total order, and within one order the first exponent
/// descends (`(1,0)` before `(0,1)`).
pub fn enumerate_multi_indices(d: usize, n: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut scratch = vec![0u32; d];
    for order in 0..n {
        compositions(order, 0, &mut scratch, &mut out);
    }
    out
}

/// Multi-indices with `|n| == order` exactly, same ordering.
pub fn multi_indices_of_order(d: usize, order: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut scratch = vec![0u32; d];
    compositions(order, 0, &mut scratch, &mut out);
    out
}

fn compositions(remaining: u32, pos: usize, scratch: &mut [u32], out: &mut Vec<MultiIndex>) {
    if pos + 1 == scratch.len() {
        scratch[pos] = remaining;
        out.push(MultiIndex(scratch.to_vec()));
        return;
    }
    for first in (0..=remaining).rev() {
        scratch[pos] = first;
        compositions(remaining - first, pos + 1, scratch, out);
    }
    scratch[pos] = 0;
}

pub fn multi_factorial(n: &MultiIndex) -> Result<u64> {
    let mut acc: u64 = 1;
    for &e in n.exponents() {
        for i in 2..=e as u64 {
            acc = acc
                .checked_mul(i)
                .ok_or(Error::Overflow("multi-index factorial"))?;
        }
    }
    Ok(acc)
}

/// `prod_k (x_k - c_k)^{n_k}`; the zero multi-index gives 1.
pub fn monomial_eval(x: &[f64], center: &[f64], n: &MultiIndex) -> f64 {
    debug_assert_eq!(x.len(), center.len());
    debug_assert_eq!(x.len(), n.dim());
    x.iter()
        .zip(center)
        .zip(n.exponents())
        .fold(1.0, |acc, ((&xk, &ck), &e)| acc * (xk - ck).powi(e as i32))
}

/// Number of grid points `(N + 1)^d`, checked.
pub fn grid_size(resolution: u32, d: usize) -> Result<u128> {
    (resolution as u128 + 1)
        .checked_pow(d as u32)
        .ok_or(Error::Overflow("grid size"))
}

/// All `(N + 1)^d` grid indices; the last coordinate varies fastest.
pub fn enumerate_grid(resolution: u32, d: usize, cap: SafetyCap) -> Result<Vec<GridIndex>> {
    if resolution == 0 || d == 0 {
        return Err(Error::InvalidArgument("grid needs N >= 1 and d >= 1".into()));
    }
    let size = grid_size(resolution, d)?;
    cap.check(format!("grid (N+1)^d with N={resolution}, d={d}"), size)?;
    let mut out = Vec::with_capacity(size as usize);
    let mut coords = vec![0u32; d];
    loop {
        out.push(GridIndex {
            coords: coords.clone(),
            resolution,
        });
        let mut k = d;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if coords[k] < resolution {
                coords[k] += 1;
                break;
            }
            coords[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(d: usize, n: u32) -> usize {
        // every exponent vector in {0..n-1}^d, filtered by total order
        let mut count = 0;
        let total = (n as usize).pow(d as u32);
        for code in 0..total {
            let mut c = code;
            let mut sum = 0;
            for _ in 0..d {
                sum += c % n as usize;
                c /= n as usize;
            }
            if sum < n as usize {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn multi_index_examples() {
        assert_eq!(
            enumerate_multi_indices(1, 2),
            vec![MultiIndex::new(vec![0]), MultiIndex::new(vec![1])]
        );
        assert_eq!(
            enumerate_multi_indices(2, 2),
            vec![
                MultiIndex::new(vec![0, 0]),
                MultiIndex::new(vec![1, 0]),
                MultiIndex::new(vec![0, 1])
            ]
        );
        assert_eq!(enumerate_multi_indices(3, 3).len(), 10);
        assert_eq!(brute_force_count(3, 3), 10);
    }

    #[test]
    fn multi_index_count_matches_binomial() {
        for d in 1..=5 {
            for n in 1..=6u32 {
                let got = enumerate_multi_indices(d, n);
                assert_eq!(got.len(), brute_force_count(d, n), "d={d} n={n}");
                let expected = binomial(n as u64 - 1 + d as u64, d as u64).unwrap();
                assert_eq!(got.len() as u64, expected);
                assert!(got.iter().all(|m| m.order() < n && m.dim() == d));
                let mut sorted = got.clone();
                sorted.dedup();
                assert_eq!(sorted.len(), got.len());
            }
        }
    }

    #[test]
    fn enumeration_is_stable() {
        let a = serde_json::to_string(&enumerate_multi_indices(3, 4)).unwrap();
        let b = serde_json::to_string(&enumerate_multi_indices(3, 4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn factorials() {
        assert_eq!(multi_factorial(&MultiIndex::new(vec![0, 0, 0])).unwrap(), 1);
        assert_eq!(multi_factorial(&MultiIndex::new(vec![2, 1])).unwrap(), 2);
        assert_eq!(multi_factorial(&MultiIndex::new(vec![3, 2, 1])).unwrap(), 12);
        assert!(matches!(
            multi_factorial(&MultiIndex::new(vec![21])),
            Err(Error::Overflow(_))
        ));
        assert_eq!(
            multi_factorial(&MultiIndex::new(vec![20])).unwrap(),
            2_432_902_008_176_640_000
        );
    }

    #[test]
    fn monomials() {
        let n = MultiIndex::new(vec![1, 2]);
        assert_eq!(monomial_eval(&[0.4, 0.9], &[0.4, 0.9], &n), 0.0);
        assert_eq!(monomial_eval(&[0.5, 0.5], &[0.0, 0.0], &n), 0.125);
        let v = monomial_eval(&[0.3], &[0.1], &MultiIndex::new(vec![3]));
        assert!((v - 0.008).abs() < 1e-15);
        assert_eq!(monomial_eval(&[0.3, 7.0], &[0.1, 2.0], &MultiIndex::zeros(2)), 1.0);
    }

    #[test]
    fn grids() {
        let cap = SafetyCap::DEFAULT;
        let g = enumerate_grid(1, 1, cap).unwrap();
        assert_eq!(g.iter().map(|m| m.coords().to_vec()).collect::<Vec<_>>(), vec![vec![0], vec![1]]);
        assert_eq!(enumerate_grid(2, 2, cap).unwrap().len(), 9);
        let g = enumerate_grid(4, 3, cap).unwrap();
        assert_eq!(g.len(), 125);
        let mut seen = std::collections::HashSet::new();
        for m in &g {
            assert!(m.coords().iter().all(|&c| c <= 4));
            assert!(m.center().iter().all(|&c| (0.0..=1.0).contains(&c)));
            seen.insert(m.coords().to_vec());
        }
        assert_eq!(seen.len(), 125);
        assert!(matches!(
            enumerate_grid(100, 4, SafetyCap(1000)),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn embed_places_exponents() {
        let n = MultiIndex::new(vec![2, 1]);
        assert_eq!(n.embed(&[0, 2], 3), MultiIndex::new(vec![2, 0, 1]));
    }

    proptest::proptest! {
        #[test]
        fn monomial_multiplicative_over_splits(
            x in proptest::collection::vec(-2.0f64..2.0, 4),
            c in proptest::collection::vec(-2.0f64..2.0, 4),
            e in proptest::collection::vec(0u32..4, 4),
            split in 1usize..4,
        ) {
            let whole = monomial_eval(&x, &c, &MultiIndex::new(e.clone()));
            let left = monomial_eval(&x[..split], &c[..split], &MultiIndex::new(e[..split].to_vec()));
            let right = monomial_eval(&x[split..], &c[split..], &MultiIndex::new(e[split..].to_vec()));
            let prod = left * right;
            proptest::prop_assert!((whole - prod).abs() <= 1e-12 * whole.abs().max(1e-300) + 1e-300);
        }
    }
}
