//! Targets living on canonical coordinate subspaces: points whose
//! coordinates outside a subset `e` vanish.

use std::path::Path;

use serde_json::{json, Value};

use super::{
    base_flags, check_epsilon, check_order, ceil_resolution, error_bound_sobolev, factorial_f64,
    choose_resolution_sobolev, synthesize_at, CoefficientTable, Regime, Synthesis, SynthesisOptions,
    SynthesisReport,
};
use crate::error::{Error, Result};
use crate::index::{binomial, MultiIndex};
use crate::netgraph::{ComplexityReport, NetGraph, WeightFormat};
use crate::oracle::{FunctionOracle, SharedOracle};

/// Embedding `A: R^{d_eff} -> R^d` placing input `j` at coordinate `e[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    d: usize,
    subset: Vec<usize>,
}

impl Restriction {
    pub fn new(subset: &[usize], d: usize) -> Result<Self> {
        if subset.is_empty() || subset.len() >= d {
            return Err(Error::InvalidArgument(format!(
                "subset {subset:?} must have between 1 and {} entries",
                d - 1
            )));
        }
        for (i, &k) in subset.iter().enumerate() {
            if k >= d {
                return Err(Error::InvalidArgument(format!("subset index {k} out of range for d={d}")));
            }
            if subset[..i].contains(&k) {
                return Err(Error::InvalidArgument(format!("duplicate subset index {k}")));
            }
        }
        Ok(Restriction { d, subset: subset.to_vec() })
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        for (&k, &v) in self.subset.iter().zip(x) {
            out[k] = v;
        }
        out
    }

    /// Coordinates of `y` on the subset.
    pub fn project(&self, y: &[f64]) -> Vec<f64> {
        self.subset.iter().map(|&k| y[k]).collect()
    }

    /// Multi-index of `D^{A k}`.
    pub fn lift_index(&self, k: &MultiIndex) -> MultiIndex {
        k.embed(&self.subset, self.d)
    }

    /// The 0/1 matrix, row-major `d x d_eff`.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.subset.len()]; self.d];
        for (j, &k) in self.subset.iter().enumerate() {
            a[k][j] = 1.0;
        }
        a
    }
}

pub fn restriction_matrix(subset: &[usize], d: usize) -> Result<Vec<Vec<f64>>> {
    Ok(Restriction::new(subset, d)?.matrix())
}

/// `f o A` with derivatives `D^k (f o A)(x) = D^{A k} f(A x)`.
pub struct RestrictedOracle {
    inner: SharedOracle,
    restriction: Restriction,
    name: String,
}

impl RestrictedOracle {
    pub fn new(inner: SharedOracle, subset: &[usize]) -> Result<Self> {
        let restriction = Restriction::new(subset, inner.dim())?;
        let name = format!("{}|{:?}", inner.name(), subset);
        Ok(RestrictedOracle { inner, restriction, name })
    }

    pub fn restriction(&self) -> &Restriction {
        &self.restriction
    }
}

impl FunctionOracle for RestrictedOracle {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.restriction.subset.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(&self.restriction.apply(x))
    }

    fn derivative(&self, k: &MultiIndex, x: &[f64]) -> f64 {
        self.inner.derivative(&self.restriction.lift_index(k), &self.restriction.apply(x))
    }

    // the restricted derivatives are a subset of the ambient ones
    fn deriv_sup(&self, order: u32) -> f64 {
        self.inner.deriv_sup(order)
    }

    fn analytic_constant(&self) -> Option<f64> {
        self.inner.analytic_constant()
    }

    fn polynomial_degree(&self) -> Option<u32> {
        self.inner.polynomial_degree()
    }
}

fn synthesize_restricted(
    oracle: &SharedOracle,
    subset: &[usize],
    resolution: u32,
    n: u32,
    opts: SynthesisOptions,
) -> Result<(RestrictedOracle, CoefficientTable, NetGraph)> {
    let restricted = RestrictedOracle::new(oracle.clone(), subset)?;
    let (table, network) = synthesize_at(&restricted, resolution, n, opts)?;
    let lifted = network.lift_inputs(subset, oracle.dim())?;
    Ok((restricted, table, lifted))
}

/// Network on `d` inputs that reads only the coordinates in `subset`.
///
/// The coefficient table lives in `d_eff` dimensions; feed it
/// [`Restriction::project`]ed points.
pub fn synthesize_single_subspace(
    oracle: &SharedOracle,
    subset: &[usize],
    epsilon: f64,
    n: u32,
    opts: SynthesisOptions,
) -> Result<Synthesis> {
    let d = oracle.dim();
    let d_eff = subset.len();
    Restriction::new(subset, d)?;
    let resolution = choose_resolution_sobolev(epsilon, d_eff, n)?;
    let (restricted, table, network) = synthesize_restricted(oracle, subset, resolution, n, opts)?;
    let deriv_sup = restricted.deriv_sup(n);
    let (norm_violations, flags) = base_flags(&restricted, n, &table);
    let report = SynthesisReport {
        regime: Regime::SingleSubspace,
        oracle: oracle.name().to_string(),
        d,
        n,
        epsilon,
        resolution,
        d_eff: Some(d_eff),
        subsets: Some(vec![subset.to_vec()]),
        theoretical_bound: error_bound_sobolev(resolution, d_eff, n, deriv_sup),
        deriv_sup,
        complexity: network.complexity(),
        share_factors: opts.share_factors,
        norm_violations,
        analytic: None,
        flags,
    };
    Ok(Synthesis { report, network, table })
}

/// All `d_eff`-subsets of `0..d` in lexicographic order.
pub fn coordinate_subsets(d: usize, d_eff: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if d_eff == 0 || d_eff > d {
        return out;
    }
    let mut cur: Vec<usize> = (0..d_eff).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..d_eff).rev().find(|&i| cur[i] < d - d_eff + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..d_eff {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Smallest `N` with `(2^{d_eff} d_eff^n / n!) N^{-n} C(d, d_eff) <= eps`,
/// i.e. `ceil((n! / (2^{d_eff} d_eff^n C(d, d_eff)) * eps)^{-1/n})`.
pub fn choose_resolution_union(epsilon: f64, d: usize, d_eff: usize, n: u32) -> Result<u32> {
    check_epsilon(epsilon)?;
    check_order(n)?;
    check_dims(d, d_eff)?;
    let binom = binomial(d as u64, d_eff as u64)? as f64;
    let inner = factorial_f64(n) / (2f64.powi(d_eff as i32) * (d_eff as f64).powi(n as i32) * binom) * epsilon;
    let mut res = ceil_resolution(inner.powf(-1.0 / n as f64))?;
    while union_error_bound(res, d, d_eff, n, 1.0)? > epsilon {
        res += 1;
    }
    Ok(res)
}

/// `(2^{d_eff} d_eff^n / n!) N^{-n} C(d, d_eff) * deriv_sup`.
pub fn union_error_bound(resolution: u32, d: usize, d_eff: usize, n: u32, deriv_sup: f64) -> Result<f64> {
    check_dims(d, d_eff)?;
    let binom = binomial(d as u64, d_eff as u64)? as f64;
    Ok(error_bound_sobolev(resolution, d_eff, n, deriv_sup) * binom)
}

fn check_dims(d: usize, d_eff: usize) -> Result<()> {
    if d_eff == 0 || d_eff >= d {
        return Err(Error::InvalidArgument(format!("need 1 <= d_eff < d, got d_eff={d_eff}, d={d}")));
    }
    Ok(())
}

/// One network per coordinate subset plus a support router.
#[derive(Clone, Debug, PartialEq)]
pub struct UnionNet {
    d: usize,
    d_eff: usize,
    subsets: Vec<Vec<usize>>,
    networks: Vec<NetGraph>,
}

impl UnionNet {
    pub fn new(d: usize, d_eff: usize, subsets: Vec<Vec<usize>>, networks: Vec<NetGraph>) -> Result<Self> {
        check_dims(d, d_eff)?;
        if subsets.len() != networks.len() || subsets.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{} subsets for {} networks",
                subsets.len(),
                networks.len()
            )));
        }
        for (e, g) in subsets.iter().zip(&networks) {
            Restriction::new(e, d)?;
            if e.len() != d_eff || g.input_arity() != d {
                return Err(Error::InvalidArgument(format!("subset {e:?} does not match d_eff={d_eff}, d={d}")));
            }
        }
        Ok(UnionNet { d, d_eff, subsets, networks })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn d_eff(&self) -> usize {
        self.d_eff
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn networks(&self) -> &[NetGraph] {
        &self.networks
    }

    /// Index of the first subset (in stored order) containing `supp(x)`.
    pub fn route(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        let support: Vec<usize> = (0..self.d).filter(|&k| x[k] != 0.0).collect();
        self.subsets
            .iter()
            .position(|e| support.iter().all(|k| e.contains(k)))
            .ok_or(Error::Unroutable { support, d_eff: self.d_eff })
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.networks[self.route(x)?].eval(x)
    }

    pub fn eval_batch(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); self.networks.len()];
        for (i, p) in points.iter().enumerate() {
            groups[self.route(p)?].push(i);
        }
        let mut out = vec![0.0; points.len()];
        for (g, idx) in groups.iter().enumerate() {
            if idx.is_empty() {
                continue;
            }
            let pts: Vec<Vec<f64>> = idx.iter().map(|&i| points[i].clone()).collect();
            for (&i, v) in idx.iter().zip(self.networks[g].eval_batch(&pts)?) {
                out[i] = v;
            }
        }
        Ok(out)
    }

    /// Summed counts of the collection; depth is the deepest member.
    pub fn complexity(&self) -> ComplexityReport {
        self.networks
            .iter()
            .map(NetGraph::complexity)
            .fold(ComplexityReport::default(), |a, b| a + b)
    }

    pub fn to_json_value(&self, fmt: WeightFormat) -> Value {
        json!({
            "d": self.d,
            "d_eff": self.d_eff,
            "subsets": self.subsets,
            "networks": self.networks.iter().map(|g| g.to_json_value(fmt)).collect::<Vec<_>>(),
        })
    }

    pub fn to_json(&self, fmt: WeightFormat) -> String {
        serde_json::to_string_pretty(&self.to_json_value(fmt)).expect("json value serializes")
    }

    pub fn from_json_value(v: Value) -> Result<Self> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("union bundle: missing field {k:?}")));
        let as_usize = |x: &Value, what: &str| {
            x.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| Error::Parse(format!("union bundle: {what} must be a non-negative integer")))
        };
        let d = as_usize(field("d")?, "d")?;
        let d_eff = as_usize(field("d_eff")?, "d_eff")?;
        let subsets: Vec<Vec<usize>> = serde_json::from_value(field("subsets")?.clone())
            .map_err(|e| Error::Parse(format!("union bundle: subsets: {e}")))?;
        let networks = field("networks")?
            .as_array()
            .ok_or_else(|| Error::Parse("union bundle: networks must be an array".into()))?
            .iter()
            .enumerate()
            .map(|(i, g)| {
                NetGraph::from_json_value(g.clone()).map_err(|e| Error::Parse(format!("networks[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        UnionNet::new(d, d_eff, subsets, networks)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        Self::from_json_value(v)
    }

    pub fn write_json(&self, path: &Path, fmt: WeightFormat) -> Result<()> {
        std::fs::write(path, self.to_json(fmt))?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug)]
pub struct UnionSynthesis {
    pub report: SynthesisReport,
    pub net: UnionNet,
    /// Per-subset coefficient tables, in the order of `net.subsets()`.
    pub tables: Vec<CoefficientTable>,
}

/// One localized-Taylor network per `d_eff`-subset at the union resolution.
pub fn synthesize_union(
    oracle: &SharedOracle,
    d_eff: usize,
    epsilon: f64,
    n: u32,
    opts: SynthesisOptions,
) -> Result<UnionSynthesis> {
    let d = oracle.dim();
    let resolution = choose_resolution_union(epsilon, d, d_eff, n)?;
    let subsets = coordinate_subsets(d, d_eff);
    let mut networks = Vec::with_capacity(subsets.len());
    let mut tables = Vec::with_capacity(subsets.len());
    let mut norm_violations = 0;
    let mut flags = Vec::new();
    for e in &subsets {
        let (restricted, table, network) = synthesize_restricted(oracle, e, resolution, n, opts)?;
        let (v, f) = base_flags(&restricted, n, &table);
        norm_violations += v;
        for flag in f {
            if !flags.contains(&flag) {
                flags.push(flag);
            }
        }
        networks.push(network);
        tables.push(table);
    }
    let net = UnionNet::new(d, d_eff, subsets.clone(), networks)?;
    let deriv_sup = oracle.deriv_sup(n);
    let report = SynthesisReport {
        regime: Regime::UnionSubspaces,
        oracle: oracle.name().to_string(),
        d,
        n,
        epsilon,
        resolution,
        d_eff: Some(d_eff),
        subsets: Some(subsets),
        theoretical_bound: union_error_bound(resolution, d, d_eff, n, deriv_sup)?,
        deriv_sup,
        complexity: net.complexity(),
        share_factors: opts.share_factors,
        norm_violations,
        analytic: None,
        flags,
    };
    Ok(UnionSynthesis { report, net, tables })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::SafetyCap;
    use crate::oracle::{builtin, Polynomial, Ridge};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn opts() -> SynthesisOptions {
        SynthesisOptions { cap: SafetyCap::DEFAULT, share_factors: true }
    }

    fn subspace_point(rng: &mut ChaCha8Rng, d: usize, e: &[usize]) -> Vec<f64> {
        let mut x = vec![0.0; d];
        for &k in e {
            x[k] = rng.gen();
        }
        x
    }

    #[test]
    fn restriction_examples() {
        let r = Restriction::new(&[0, 1], 3).unwrap();
        assert_eq!(r.apply(&[0.3, 0.7]), vec![0.3, 0.7, 0.0]);
        let r = Restriction::new(&[0, 2], 3).unwrap();
        assert_eq!(r.apply(&[0.3, 0.7]), vec![0.3, 0.0, 0.7]);
        assert_eq!(
            restriction_matrix(&[0, 1], 3).unwrap(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]
        );
        assert!(Restriction::new(&[1, 1], 3).is_err());
        assert!(Restriction::new(&[3], 3).is_err());
        assert!(Restriction::new(&[0, 1, 2], 3).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y = r.apply(&x);
            let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>();
            assert_eq!(norm(&x), norm(&y));
            assert_eq!(r.project(&y), x);
        }
    }

    #[test]
    fn restricted_derivatives_follow_chain_rule() {
        let ridge: SharedOracle = Arc::new(Ridge::standard(3));
        let r = RestrictedOracle::new(ridge.clone(), &[2, 0]).unwrap();
        let k = MultiIndex::new(vec![2, 1]);
        let x = [0.3, 0.6];
        assert_eq!(r.derivative(&k, &x), ridge.derivative(&MultiIndex::new(vec![1, 0, 2]), &[0.6, 0.0, 0.3]));
        assert_eq!(r.value(&x), ridge.value(&[0.6, 0.0, 0.3]));
    }

    #[test]
    fn subsets_are_lexicographic() {
        assert_eq!(coordinate_subsets(3, 1), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(
            coordinate_subsets(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        for d in 2..7 {
            for e in 1..d {
                assert_eq!(coordinate_subsets(d, e).len() as u64, binomial(d as u64, e as u64).unwrap());
            }
        }
    }

    #[test]
    fn union_resolution_examples() {
        // 2 * 3 / N <= 0.1
        assert_eq!(choose_resolution_union(0.1, 3, 1, 1).unwrap(), 60);
        assert_eq!(union_error_bound(60, 3, 1, 1, 1.0).unwrap(), 0.1);
        assert_eq!(choose_resolution_union(0.05, 3, 1, 2).unwrap(), 8);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let d = rng.gen_range(2..7);
            let e = rng.gen_range(1..d);
            let n = rng.gen_range(1..5);
            let eps = rng.gen_range(1e-3..0.9);
            let res = choose_resolution_union(eps, d, e, n).unwrap();
            assert!(union_error_bound(res, d, e, n, 1.0).unwrap() <= eps);
            assert!(res == 1 || union_error_bound(res - 1, d, e, n, 1.0).unwrap() > eps);
        }
        assert!(choose_resolution_union(0.1, 3, 3, 1).is_err());
    }

    #[test]
    fn single_subspace_reproduces_polynomials() {
        let mut k = vec![0; 3];
        k[1] = 2;
        let f: SharedOracle = Arc::new(Polynomial::new("x2sq", 3, vec![(0.5, MultiIndex::new(k))]).unwrap());
        let s = synthesize_single_subspace(&f, &[1], 0.1, 3, opts()).unwrap();
        assert_eq!(s.network.input_arity(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let x = subspace_point(&mut rng, 3, &[1]);
            assert!((s.network.eval(&x).unwrap() - f.value(&x)).abs() < 1e-9);
        }
    }

    #[test]
    fn subspace_is_far_cheaper_than_full_dimension() {
        let f: SharedOracle = Arc::new(Ridge::standard(4));
        let sub = synthesize_single_subspace(&f, &[0, 2], 0.01, 2, opts()).unwrap();
        let full = super::super::predicted_parameters(4, 2, choose_resolution_sobolev(0.01, 4, 2).unwrap(), true).unwrap();
        assert!((sub.report.complexity.total_parameters as u128) * 100 < full);
    }

    #[test]
    fn router_examples() {
        let f = builtin("ridge", 3, 2).unwrap();
        let u = synthesize_union(&f, 1, 0.1, 2, opts()).unwrap();
        assert_eq!(u.net.networks().len(), 3);
        assert_eq!(u.net.route(&[0.0, 0.4, 0.0]).unwrap(), 1);
        assert_eq!(u.net.route(&[0.0, 0.0, 0.0]).unwrap(), 0);
        match u.net.route(&[0.1, 0.4, 0.0]) {
            Err(Error::Unroutable { support, d_eff }) => {
                assert_eq!(support, vec![0, 1]);
                assert_eq!(d_eff, 1);
            }
            other => panic!("{other:?}"),
        }
        let c = u.net.complexity();
        let each: u64 = u.net.networks().iter().map(|g| g.complexity().total_parameters).sum();
        assert_eq!(c.total_parameters, each);
    }

    #[test]
    fn union_meets_epsilon_on_subspaces() {
        let f = builtin("ridge", 3, 2).unwrap();
        let u = synthesize_union(&f, 1, 0.05, 2, opts()).unwrap();
        assert!(u.report.theoretical_bound <= 0.05);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let subsets = coordinate_subsets(3, 1);
        let pts: Vec<Vec<f64>> = (0..10_000)
            .map(|_| {
                let e = &subsets[rng.gen_range(0..subsets.len())];
                subspace_point(&mut rng, 3, e)
            })
            .collect();
        let vals = u.net.eval_batch(&pts).unwrap();
        for (p, v) in pts.iter().zip(vals) {
            assert!((v - f.value(p)).abs() <= 0.05);
            assert_eq!(v, u.net.eval(p).unwrap());
        }
    }

    #[test]
    fn networks_agree_on_intersections() {
        let f = builtin("ridge", 4, 2).unwrap();
        let u = synthesize_union(&f, 2, 0.2, 2, opts()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let subsets = u.net.subsets().to_vec();
        for (i, e) in subsets.iter().enumerate() {
            for (j, e2) in subsets.iter().enumerate().skip(i + 1) {
                let common: Vec<usize> = e.iter().copied().filter(|k| e2.contains(k)).collect();
                for _ in 0..50 {
                    let x = subspace_point(&mut rng, 4, &common);
                    let a = u.net.networks()[i].eval(&x).unwrap();
                    let b = u.net.networks()[j].eval(&x).unwrap();
                    assert!((a - b).abs() <= 1e-9, "{e:?} {e2:?}");
                }
            }
        }
    }

    #[test]
    fn union_polynomials_are_exact() {
        for f in crate::oracle::builtin_polynomials(3) {
            let degree = f.polynomial_degree().unwrap();
            let n = degree + 1;
            let u = synthesize_union(&f, 2, 0.3, n, opts()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            for e in u.net.subsets().to_vec() {
                for _ in 0..100 {
                    let x = subspace_point(&mut rng, 3, &e);
                    assert!((u.net.eval(&x).unwrap() - f.value(&x)).abs() <= 1e-9, "{}", f.name());
                }
            }
        }
    }

    #[test]
    fn bundle_round_trip() {
        let f = builtin("ridge", 3, 1).unwrap();
        let u = synthesize_union(&f, 1, 0.3, 1, opts()).unwrap();
        for fmt in [WeightFormat::Hex, WeightFormat::Decimal] {
            let back = UnionNet::from_json(&u.net.to_json(fmt)).unwrap();
            for (a, b) in back.networks().iter().zip(u.net.networks()) {
                for id in a.node_ids() {
                    assert_eq!(a.node(id), b.node(id), "{fmt:?} node {id}");
                }
                assert_eq!(a.outputs(), b.outputs());
            }
            assert_eq!(back, u.net);
        }
        assert!(UnionNet::from_json("{\"d\": 3}").is_err());
    }

    #[test]
    fn single_subspace_report() {
        let f = builtin("ridge", 3, 2).unwrap();
        let s: Synthesis = synthesize_single_subspace(&f, &[0, 2], 0.1, 2, opts()).unwrap();
        assert_eq!(s.report.regime, Regime::SingleSubspace);
        assert_eq!(s.report.d_eff, Some(2));
        assert_eq!(s.report.subsets, Some(vec![vec![0, 2]]));
        assert!(s.report.theoretical_bound <= 0.1);
    }
}
