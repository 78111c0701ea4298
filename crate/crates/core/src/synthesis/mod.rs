//! Synthesis of localized-Taylor networks.
//!
//! For a grid resolution `N` and smoothness order `n` the approximant is
//!
//! ```text
//! f~(x) = sum_{m in {0..N}^d} sum_{|k| < n} a_{m,k} phi_m(x) (x - m/N)^k,
//! a_{m,k} = D^k f(m/N) / k!
//! ```
//!
//! Every term is an exact product of piecewise-linear factors, so the
//! network built here equals `f~` up to floating-point rounding. The three
//! pipelines differ only in how `N` (and, for analytic targets, `n`) is
//! chosen and in which coordinates the network reads.

pub mod analytic;
pub mod subspace;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadgets::{push_term, FactorCache, ProductPlan};
use crate::index::{
    binomial, enumerate_grid, enumerate_multi_indices, grid_size, monomial_eval, GridIndex,
    MultiIndex, SafetyCap,
};
use crate::netgraph::{Activation, ComplexityReport, GraphBuilder, NetGraph};
use crate::oracle::FunctionOracle;
use crate::partition::{neighbouring_indices, phi_scalar};

pub use analytic::{
    analytic_chain_bound, choose_n_analytic, choose_resolution_analytic, n_min_continuous,
    predicted_growth, synthesize_analytic, AnalyticInfo,
};
pub use subspace::{
    choose_resolution_union, coordinate_subsets, restriction_matrix, synthesize_single_subspace,
    synthesize_union, union_error_bound, Restriction, RestrictedOracle, UnionNet, UnionSynthesis,
};

/// Slack on the `|a_{m,k}| <= 1` coefficient bound.
pub const COEFFICIENT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Sobolev,
    Analytic,
    SingleSubspace,
    UnionSubspaces,
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sobolev" => Ok(Regime::Sobolev),
            "analytic" => Ok(Regime::Analytic),
            "single_subspace" | "single-subspace" => Ok(Regime::SingleSubspace),
            "union_subspaces" | "union-subspaces" | "union" => Ok(Regime::UnionSubspaces),
            other => Err(Error::InvalidArgument(format!(
                "unknown regime {other:?} (sobolev, analytic, single_subspace, union_subspaces)"
            ))),
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Sobolev => "sobolev",
            Regime::Analytic => "analytic",
            Regime::SingleSubspace => "single_subspace",
            Regime::UnionSubspaces => "union_subspaces",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SynthesisOptions {
    pub cap: SafetyCap,
    /// Reuse one copy of each univariate factor across terms.
    pub share_factors: bool,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            cap: SafetyCap::from_env(),
            share_factors: true,
        }
    }
}

/// Metadata written next to a synthesized network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub regime: Regime,
    pub oracle: String,
    pub d: usize,
    pub n: u32,
    pub epsilon: f64,
    #[serde(rename = "N")]
    pub resolution: u32,
    pub d_eff: Option<usize>,
    pub subsets: Option<Vec<Vec<usize>>>,
    pub theoretical_bound: f64,
    /// Derivative bound that went into `theoretical_bound`.
    pub deriv_sup: f64,
    pub complexity: ComplexityReport,
    pub share_factors: bool,
    /// Number of coefficients with `|a| > 1 + 1e-9`.
    pub norm_violations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticInfo>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl SynthesisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Scaled Taylor coefficients `a_{m,k}` for every grid point and
/// multi-index.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    resolution: u32,
    d: usize,
    grid: Vec<GridIndex>,
    indices: Vec<MultiIndex>,
    index_pos: HashMap<MultiIndex, usize>,
    values: Vec<f64>,
}

impl CoefficientTable {
    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn grid(&self) -> &[GridIndex] {
        &self.grid
    }

    pub fn multi_indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn grid_position(&self, m: &GridIndex) -> usize {
        let base = self.resolution as usize + 1;
        m.coords().iter().fold(0, |acc, &c| acc * base + c as usize)
    }

    pub fn get(&self, m: &GridIndex, k: &MultiIndex) -> Option<f64> {
        let j = *self.index_pos.get(k)?;
        if m.resolution() != self.resolution || m.dim() != self.d {
            return None;
        }
        Some(self.values[self.grid_position(m) * self.indices.len() + j])
    }

    /// `(m, k, a_{m,k})` in grid-major order.
    pub fn entries(&self) -> impl Iterator<Item = (&GridIndex, &MultiIndex, f64)> + '_ {
        let per = self.indices.len();
        self.values.iter().enumerate().map(move |(i, &a)| (&self.grid[i / per], &self.indices[i % per], a))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Entries breaking `|a| <= 1 + tol`.
    pub fn norm_violations(&self, tol: f64) -> Vec<(GridIndex, MultiIndex, f64)> {
        self.entries()
            .filter(|(_, _, a)| a.abs() > 1.0 + tol)
            .map(|(m, k, a)| (m.clone(), k.clone(), a))
            .collect()
    }

    /// The scalar approximant `f~` described by this table.
    pub fn approximant(&self) -> LocalizedTaylor<'_> {
        LocalizedTaylor { table: self }
    }
}

/// Closed-form evaluation of `f~` from the coefficient table, the scalar
/// trapezoids and monomials; shares no code with the network path.
pub struct LocalizedTaylor<'a> {
    table: &'a CoefficientTable,
}

impl LocalizedTaylor<'_> {
    pub fn dim(&self) -> usize {
        self.table.d
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let t = self.table;
        let mut total = 0.0;
        for m in neighbouring_indices(x, t.resolution) {
            let phi = phi_scalar(&m, x);
            if phi == 0.0 {
                continue;
            }
            let center = m.center();
            let poly: f64 = t
                .indices
                .iter()
                .map(|k| t.get(&m, k).expect("complete table") * monomial_eval(x, &center, k))
                .sum();
            total += phi * poly;
        }
        total
    }
}

fn factorial_f64(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Terms per grid point, `binomial(n - 1 + d, d)`.
pub fn terms_per_point(d: usize, n: u32) -> Result<u64> {
    binomial(n as u64 - 1 + d as u64, d as u64)
}

/// `(N + 1)^d` times the number of terms per grid point.
pub fn term_count(d: usize, n: u32, resolution: u32) -> Result<u128> {
    grid_size(resolution, d)?
        .checked_mul(terms_per_point(d, n)? as u128)
        .ok_or(Error::Overflow("term count"))
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} not in (0, 1)")));
    }
    Ok(())
}

fn check_order(n: u32) -> Result<()> {
    if !(1..=30).contains(&n) {
        return Err(Error::InvalidArgument(format!("smoothness order {n} not in [1, 30]")));
    }
    Ok(())
}

fn ceil_resolution(raw: f64) -> Result<u32> {
    if !raw.is_finite() || raw > u32::MAX as f64 {
        return Err(Error::Overflow("grid resolution"));
    }
    Ok((raw.ceil() as u32).max(1))
}

/// `N = ceil((n! / (2^d d^n) * eps)^{-1/n})`, at least 1.
pub fn choose_resolution_sobolev(epsilon: f64, d: usize, n: u32) -> Result<u32> {
    check_epsilon(epsilon)?;
    check_order(n)?;
    let inner = factorial_f64(n) / (2f64.powi(d as i32) * (d as f64).powi(n as i32)) * epsilon;
    let mut res = ceil_resolution(inner.powf(-1.0 / n as f64))?;
    // guard against the power landing a hair below an integer
    while error_bound_sobolev(res, d, n, 1.0) > epsilon {
        res += 1;
    }
    Ok(res)
}

/// `(2^d d^n / n!) N^{-n} * deriv_sup`.
pub fn error_bound_sobolev(resolution: u32, d: usize, n: u32, deriv_sup: f64) -> f64 {
    2f64.powi(d as i32) * (d as f64).powi(n as i32) / factorial_f64(n)
        * (resolution as f64).powi(-(n as i32))
        * deriv_sup
}

/// `a_{m,k} = D^k f(m/N) / k!` over the full grid.
pub fn taylor_coefficients(
    oracle: &dyn FunctionOracle,
    resolution: u32,
    n: u32,
    cap: SafetyCap,
) -> Result<CoefficientTable> {
    check_order(n)?;
    let d = oracle.dim();
    cap.check(
        format!("(N+1)^d * terms with N={resolution}, d={d}, n={n}"),
        term_count(d, n, resolution)?,
    )?;
    let grid = enumerate_grid(resolution, d, cap)?;
    let indices = enumerate_multi_indices(d, n);
    let factorials: Vec<f64> = indices
        .iter()
        .map(|k| k.factorial().map(|f| f as f64))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(grid.len() * indices.len());
    for m in &grid {
        let center = m.center();
        for (k, fact) in indices.iter().zip(&factorials) {
            let a = oracle.derivative(k, &center) / fact;
            if !a.is_finite() {
                return Err(Error::Oracle(format!(
                    "{}: non-finite derivative {k} at {center:?}",
                    oracle.name()
                )));
            }
            values.push(a);
        }
    }
    let index_pos = indices.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    Ok(CoefficientTable {
        resolution,
        d,
        grid,
        indices,
        index_pos,
        values,
    })
}

/// Network computing `f~` for a coefficient table. Terms with a zero
/// coefficient are left out.
pub fn build_network(table: &CoefficientTable, share_factors: bool) -> Result<NetGraph> {
    let mut b = GraphBuilder::new(table.d);
    let mut cache = FactorCache::new(table.resolution, share_factors);
    let mut terms = Vec::new();
    for (m, k, a) in table.entries() {
        if a == 0.0 {
            continue;
        }
        terms.push((push_term(&mut b, &mut cache, m, k)?, a));
    }
    let out = b.push(&terms, 0.0, Activation::Identity);
    b.finish(vec![out])
}

/// Exact parameter count of [`build_network`] when no coefficient vanishes.
pub fn predicted_parameters(d: usize, n: u32, resolution: u32, share_factors: bool) -> Result<u128> {
    let grid = grid_size(resolution, d)?;
    let big_n = resolution as u128;
    let dd = d as u128;
    // per-term gadgets (7 parameters each) plus the read-out weight
    let mut per_point: u128 = 0;
    let mut order_sum: u128 = 0;
    for j in 0..n as u64 {
        let count = binomial(j + d as u64 - 1, d as u64 - 1)? as u128;
        per_point += count * (7 * (dd + j as u128 - 1) + 1);
        order_sum += count * j as u128;
    }
    let total = if share_factors {
        let partition = dd * (big_n + 1) * 12;
        let linear = if n >= 2 { dd * (2 * (big_n + 1) - 1) } else { 0 };
        grid * per_point + partition + linear
    } else {
        // each term carries its own d partition factors and one linear
        // node per leaf; a linear node has a bias unless m_k = 0
        let terms = terms_per_point(d, n)? as u128;
        let linear_per_axis_order = grid + big_n * grid / (big_n + 1);
        grid * (per_point + terms * 12 * dd) + order_sum * linear_per_axis_order
    };
    Ok(total)
}

/// Depth of [`build_network`] for dense coefficients.
pub fn predicted_depth(d: usize, n: u32) -> u64 {
    let leaves = d + n as usize - 1;
    let rounds = ProductPlan::new(leaves).map(|p| p.rounds().len()).unwrap_or(0) as u64;
    3 + 2 * rounds
}

/// Output of a synthesis pipeline.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub report: SynthesisReport,
    pub network: NetGraph,
    pub table: CoefficientTable,
}

/// Coefficients plus network at a fixed resolution and order.
pub(crate) fn synthesize_at(
    oracle: &dyn FunctionOracle,
    resolution: u32,
    n: u32,
    opts: SynthesisOptions,
) -> Result<(CoefficientTable, NetGraph)> {
    let table = taylor_coefficients(oracle, resolution, n, opts.cap)?;
    let network = build_network(&table, opts.share_factors)?;
    Ok((table, network))
}

pub(crate) fn base_flags(oracle: &dyn FunctionOracle, n: u32, table: &CoefficientTable) -> (usize, Vec<String>) {
    let mut flags = Vec::new();
    let norm = oracle.sobolev_bound(n);
    if norm > 1.0 {
        flags.push(format!(
            "oracle Sobolev bound {norm} exceeds 1; error guarantee scales with it"
        ));
    }
    let violations = table.norm_violations(COEFFICIENT_TOLERANCE).len();
    if violations > 0 {
        flags.push(format!("{violations} coefficients exceed 1 + {COEFFICIENT_TOLERANCE}"));
    }
    (violations, flags)
}

/// Localized-Taylor network for a `W^{n,inf}` target at accuracy `epsilon`.
pub fn synthesize_sobolev(
    oracle: &dyn FunctionOracle,
    epsilon: f64,
    n: u32,
    opts: SynthesisOptions,
) -> Result<Synthesis> {
    let d = oracle.dim();
    let resolution = choose_resolution_sobolev(epsilon, d, n)?;
    let (table, network) = synthesize_at(oracle, resolution, n, opts)?;
    let deriv_sup = oracle.deriv_sup(n);
    let (norm_violations, flags) = base_flags(oracle, n, &table);
    let report = SynthesisReport {
        regime: Regime::Sobolev,
        oracle: oracle.name().to_string(),
        d,
        n,
        epsilon,
        resolution,
        d_eff: None,
        subsets: None,
        theoretical_bound: error_bound_sobolev(resolution, d, n, deriv_sup),
        deriv_sup,
        complexity: network.complexity(),
        share_factors: opts.share_factors,
        norm_violations,
        analytic: None,
        flags,
    };
    Ok(Synthesis {
        report,
        network,
        table,
    })
}
