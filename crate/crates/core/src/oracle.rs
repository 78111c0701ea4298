//! Target-function oracles with closed-form partial derivatives.
//!
//! Every builtin is scaled so that its `W^{n,inf}` norm is at most 1 for the
//! advertised smoothness order. `deriv_sup(j)` is a declared upper bound on
//! `max_{|n| = j} sup_{[0,1]^d} |D^n f|`; tests check it against sampling.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::index::{multi_indices_of_order, MultiIndex};

pub trait FunctionOracle: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// `D^n f(x)`; the zero multi-index gives the value.
    fn derivative(&self, n: &MultiIndex, x: &[f64]) -> f64;

    /// Bound on `max_{|n| = order} ess sup |D^n f|` over the unit cube.
    fn deriv_sup(&self, order: u32) -> f64;

    /// Bound on the Sobolev norm `max_{|n| <= n} ess sup |D^n f|`.
    fn sobolev_bound(&self, n: u32) -> f64 {
        (0..=n).map(|j| self.deriv_sup(j)).fold(0.0, f64::max)
    }

    /// `C_f` with `|D^n f| <= C_f^{|n|+1} n!` for every `n`, when known.
    fn analytic_constant(&self) -> Option<f64> {
        None
    }

    /// Total degree, for polynomial oracles.
    fn polynomial_degree(&self) -> Option<u32> {
        None
    }
}

pub type SharedOracle = Arc<dyn FunctionOracle>;

/// `k-th` derivative of `sin` at `t`.
fn sin_derivative(k: u32, t: f64) -> f64 {
    match k % 4 {
        0 => t.sin(),
        1 => t.cos(),
        2 => -t.sin(),
        _ => -t.cos(),
    }
}

/// Polynomial with non-negative coefficients in the monomials `x^k`.
///
/// Non-negativity makes every derivative increasing on the cube, so its
/// supremum sits at `(1, .., 1)` and the declared bounds are exact.
#[derive(Clone, Debug)]
pub struct Polynomial {
    name: String,
    d: usize,
    terms: Vec<(f64, MultiIndex)>,
}

impl Polynomial {
    pub fn new(name: impl Into<String>, d: usize, terms: Vec<(f64, MultiIndex)>) -> Result<Self> {
        if terms.iter().any(|(c, k)| *c < 0.0 || k.dim() != d) {
            return Err(Error::InvalidArgument(
                "polynomial oracles need non-negative coefficients of matching dimension".into(),
            ));
        }
        Ok(Polynomial {
            name: name.into(),
            d,
            terms,
        })
    }
}

impl FunctionOracle for Polynomial {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.derivative(&MultiIndex::zeros(self.d), x)
    }

    fn derivative(&self, n: &MultiIndex, x: &[f64]) -> f64 {
        let mut total = 0.0;
        'terms: for (c, k) in &self.terms {
            let mut v = *c;
            for ((&ki, &ni), &xi) in k.exponents().iter().zip(n.exponents()).zip(x) {
                if ni > ki {
                    continue 'terms;
                }
                for j in 0..ni {
                    v *= (ki - j) as f64;
                }
                v *= xi.powi((ki - ni) as i32);
            }
            total += v;
        }
        total
    }

    fn deriv_sup(&self, order: u32) -> f64 {
        let ones = vec![1.0; self.d];
        multi_indices_of_order(self.d, order)
            .iter()
            .map(|n| self.derivative(n, &ones))
            .fold(0.0, f64::max)
    }

    fn polynomial_degree(&self) -> Option<u32> {
        Some(self.terms.iter().map(|(_, k)| k.order()).max().unwrap_or(0))
    }
}

/// `pi^{-s} prod_k sin(pi x_k)`, scaled so the order-`s` derivatives peak at 1.
#[derive(Clone, Debug)]
pub struct SinProduct {
    d: usize,
    smoothness: u32,
}

impl SinProduct {
    pub fn new(d: usize, smoothness: u32) -> Self {
        SinProduct { d, smoothness }
    }

    fn scale_for(&self, order: u32) -> f64 {
        PI.powi(order as i32 - self.smoothness as i32)
    }
}

impl FunctionOracle for SinProduct {
    fn name(&self) -> &str {
        "sin"
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.derivative(&MultiIndex::zeros(self.d), x)
    }

    fn derivative(&self, n: &MultiIndex, x: &[f64]) -> f64 {
        let mut v = self.scale_for(n.order());
        for (&nk, &xk) in n.exponents().iter().zip(x) {
            v *= sin_derivative(nk, PI * xk);
        }
        v
    }

    fn deriv_sup(&self, order: u32) -> f64 {
        self.scale_for(order)
    }

    fn analytic_constant(&self) -> Option<f64> {
        Some(PI)
    }
}

/// `exp(x_1 + .. + x_d - d)`: every derivative equals the function, at most 1.
#[derive(Clone, Debug)]
pub struct ExpSum {
    d: usize,
}

impl ExpSum {
    pub fn new(d: usize) -> Self {
        ExpSum { d }
    }
}

impl FunctionOracle for ExpSum {
    fn name(&self) -> &str {
        "exp"
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64]) -> f64 {
        (x.iter().sum::<f64>() - self.d as f64).exp()
    }

    fn derivative(&self, _n: &MultiIndex, x: &[f64]) -> f64 {
        self.value(x)
    }

    fn deriv_sup(&self, _order: u32) -> f64 {
        1.0
    }

    fn analytic_constant(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `a sin(w . x + b)` with `0 < w_k <= 1`, `0 < a <= 1`.
///
/// Smooth on the whole cube, so restricting it to any coordinate subspace
/// gives a different, non-trivial function; used for the union regime.
#[derive(Clone, Debug)]
pub struct Ridge {
    weights: Vec<f64>,
    phase: f64,
    amplitude: f64,
}

impl Ridge {
    pub fn new(weights: Vec<f64>, phase: f64, amplitude: f64) -> Result<Self> {
        if weights.iter().any(|w| !(0.0..=1.0).contains(w)) || !(0.0..=1.0).contains(&amplitude) {
            return Err(Error::InvalidArgument("ridge weights and amplitude must lie in [0,1]".into()));
        }
        Ok(Ridge {
            weights,
            phase,
            amplitude,
        })
    }

    /// Builtin instance: weights `0.9, 0.7, 0.5, ..` (floored at 0.2).
    pub fn standard(d: usize) -> Self {
        let weights = (0..d).map(|k| (0.9 - 0.2 * k as f64).max(0.2)).collect();
        Ridge::new(weights, 0.4, 0.8).expect("standard ridge parameters are valid")
    }

    fn angle(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, xk)| w * xk).sum::<f64>() + self.phase
    }
}

impl FunctionOracle for Ridge {
    fn name(&self) -> &str {
        "ridge"
    }

    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.amplitude * self.angle(x).sin()
    }

    fn derivative(&self, n: &MultiIndex, x: &[f64]) -> f64 {
        let mut scale = self.amplitude;
        for (&nk, &w) in n.exponents().iter().zip(&self.weights) {
            scale *= w.powi(nk as i32);
        }
        scale * sin_derivative(n.order(), self.angle(x))
    }

    fn deriv_sup(&self, order: u32) -> f64 {
        let w_max = self.weights.iter().copied().fold(0.0, f64::max);
        self.amplitude * w_max.powi(order as i32)
    }

    fn analytic_constant(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Wraps an oracle and shifts one partial derivative by `delta`.
pub struct Corrupted {
    inner: SharedOracle,
    target: MultiIndex,
    delta: f64,
}

impl Corrupted {
    pub fn new(inner: SharedOracle, target: MultiIndex, delta: f64) -> Self {
        Corrupted {
            inner,
            target,
            delta,
        }
    }
}

impl FunctionOracle for Corrupted {
    fn name(&self) -> &str {
        "corrupted"
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(x)
    }

    fn derivative(&self, n: &MultiIndex, x: &[f64]) -> f64 {
        let v = self.inner.derivative(n, x);
        if *n == self.target {
            v + self.delta
        } else {
            v
        }
    }

    fn deriv_sup(&self, order: u32) -> f64 {
        self.inner.deriv_sup(order)
    }
}

pub const CATALOG: &[(&str, &str)] = &[
    ("sin", "pi^-n prod sin(pi x_k); unit Sobolev ball at the requested n"),
    ("sin1d", "sin restricted to d = 1"),
    ("exp", "exp(sum x_k - d); C_f = 1"),
    ("ridge", "0.8 sin(w.x + 0.4) with w = 0.9, 0.7, ..; for subspace runs"),
    ("const", "0.5"),
    ("linear", "sum x_k / d"),
    ("quad", "sum x_k^2 / (2d)"),
    ("cubic", "sum x_k^3 / (6d)"),
    ("xy", "x_1 x_2 (d >= 2)"),
    ("prod", "prod x_k"),
];

pub fn catalog_names() -> Vec<&'static str> {
    CATALOG.iter().map(|(n, _)| *n).collect()
}

fn axis_power_sum(name: &str, d: usize, power: u32, coeff: f64) -> Result<Polynomial> {
    let terms = (0..d)
        .map(|k| (coeff, MultiIndex::axis(d, k, power)))
        .collect();
    Polynomial::new(name, d, terms)
}

/// Looks up a builtin oracle. `n` is the smoothness order the caller will
/// synthesize with; only `sin` depends on it.
pub fn builtin(name: &str, d: usize, n: u32) -> Result<SharedOracle> {
    if d == 0 {
        return Err(Error::InvalidArgument("oracle dimension must be >= 1".into()));
    }
    let dd = d as f64;
    let oracle: SharedOracle = match name {
        "sin" => Arc::new(SinProduct::new(d, n)),
        "sin1d" if d == 1 => Arc::new(SinProduct::new(1, n)),
        "exp" => Arc::new(ExpSum::new(d)),
        "ridge" => Arc::new(Ridge::standard(d)),
        "const" => Arc::new(Polynomial::new("const", d, vec![(0.5, MultiIndex::zeros(d))])?),
        "linear" => Arc::new(axis_power_sum("linear", d, 1, 1.0 / dd)?),
        "quad" => Arc::new(axis_power_sum("quad", d, 2, 1.0 / (2.0 * dd))?),
        "cubic" => Arc::new(axis_power_sum("cubic", d, 3, 1.0 / (6.0 * dd))?),
        "xy" if d >= 2 => {
            let mut k = vec![0; d];
            k[0] = 1;
            k[1] = 1;
            Arc::new(Polynomial::new("xy", d, vec![(1.0, MultiIndex::new(k))])?)
        }
        "prod" => Arc::new(Polynomial::new("prod", d, vec![(1.0, MultiIndex::new(vec![1; d]))])?),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unknown oracle {name:?} for d={d}; available: {}",
                catalog_names().join(", ")
            )))
        }
    };
    Ok(oracle)
}

/// Every builtin polynomial oracle that exists in dimension `d`.
pub fn builtin_polynomials(d: usize) -> Vec<SharedOracle> {
    ["const", "linear", "quad", "cubic", "xy", "prod"]
        .iter()
        .filter_map(|name| builtin(name, d, 1).ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::enumerate_multi_indices;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sampled_sup(o: &dyn FunctionOracle, n: &MultiIndex, pts: &[Vec<f64>]) -> f64 {
        pts.iter().map(|x| o.derivative(n, x).abs()).fold(0.0, f64::max)
    }

    fn grid_points(d: usize, per_axis: usize) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new()];
        for _ in 0..d {
            out = out
                .into_iter()
                .flat_map(|p: Vec<f64>| {
                    (0..per_axis).map(move |i| {
                        let mut q = p.clone();
                        q.push(i as f64 / (per_axis - 1) as f64);
                        q
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn xy_mixed_derivative_is_one() {
        let o = builtin("xy", 2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let x = [rng.gen::<f64>(), rng.gen::<f64>()];
            assert_eq!(o.derivative(&MultiIndex::new(vec![1, 1]), &x), 1.0);
        }
    }

    #[test]
    fn sin_scale_makes_top_derivative_unit() {
        let o = builtin("sin", 1, 2).unwrap();
        assert!((o.value(&[0.5]) - 1.0 / (PI * PI)).abs() < 1e-16);
        assert_eq!(o.deriv_sup(2), 1.0);
        assert!((o.derivative(&MultiIndex::new(vec![2]), &[0.5]) + 1.0).abs() < 1e-15);
        assert!(o.sobolev_bound(2) <= 1.0);
    }

    #[test]
    fn declared_bounds_dominate_samples() {
        let pts2 = grid_points(2, 41);
        for name in ["sin", "exp", "ridge", "const", "linear", "quad", "cubic", "xy", "prod"] {
            let o = builtin(name, 2, 3).unwrap();
            for order in 0..=3 {
                for n in crate::index::multi_indices_of_order(2, order) {
                    let s = sampled_sup(o.as_ref(), &n, &pts2);
                    assert!(s <= o.deriv_sup(order) + 1e-12, "{name} {n}");
                }
            }
            assert!(o.sobolev_bound(3) <= 1.0 + 1e-12, "{name}");
        }
    }

    #[test]
    fn exp_satisfies_analytic_growth() {
        for d in 1..=3 {
            let o = builtin("exp", d, 1).unwrap();
            let cf = o.analytic_constant().unwrap();
            let pts = grid_points(d, 9);
            for n in enumerate_multi_indices(d, 7) {
                let bound = cf.powi(n.order() as i32 + 1) * n.factorial().unwrap() as f64;
                assert!(sampled_sup(o.as_ref(), &n, &pts) <= bound);
            }
        }
    }

    #[test]
    fn unknown_name_lists_catalog() {
        let err = builtin("nope", 2, 2).err().unwrap().to_string();
        assert!(err.contains("sin") && err.contains("ridge"));
        assert!(builtin("xy", 1, 2).is_err());
    }

    #[test]
    fn polynomial_degrees() {
        let degrees: Vec<u32> = builtin_polynomials(2)
            .iter()
            .map(|o| o.polynomial_degree().unwrap())
            .collect();
        assert_eq!(degrees, vec![0, 1, 2, 3, 2, 2]);
        assert_eq!(builtin_polynomials(1).len(), 5);
    }
}
