//! Parameter-count and error sweeps over accuracy targets.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::SharedOracle;
use crate::sampling::{sup_error, Domain, SamplerConfig};
use crate::synthesis::{
    error_bound_sobolev, predicted_growth, synthesize_analytic, synthesize_single_subspace, synthesize_sobolev,
    synthesize_union, union_error_bound, Regime, SynthesisOptions, SynthesisReport,
};

#[derive(Clone)]
pub struct RateConfig {
    pub oracle: SharedOracle,
    pub regime: Regime,
    /// Ignored by the analytic regime, which picks its own order.
    pub n: u32,
    pub d_eff: Option<usize>,
    /// Coordinate subset for the single-subspace regime.
    pub subset: Option<Vec<usize>>,
    pub eps_list: Vec<f64>,
    /// Sup-error sampling budget per run; 0 skips measurement.
    pub budget: usize,
    pub seed: u64,
    pub opts: SynthesisOptions,
}

/// One CSV row. Infeasible runs keep their inputs and leave the outputs
/// empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub epsilon: f64,
    pub regime: Regime,
    pub d: usize,
    pub n: Option<u32>,
    pub d_eff: Option<usize>,
    #[serde(rename = "N")]
    pub resolution: Option<u32>,
    pub total_parameters: Option<u64>,
    pub num_nodes: Option<u64>,
    pub depth: Option<u64>,
    pub measured_sup_error: Option<f64>,
    pub theoretical_bound: Option<f64>,
    pub seed: u64,
    pub wall_time_ms: u64,
    pub deriv_sup: Option<f64>,
    pub predicted_growth: Option<f64>,
    pub note: String,
}

impl RateRow {
    pub fn feasible(&self) -> bool {
        self.total_parameters.is_some()
    }

    /// Bound recomputed from the row's own `N`, `d`, `n`, `d_eff` and
    /// `deriv_sup` columns.
    pub fn recomputed_bound(&self) -> Option<f64> {
        let (res, n, sup) = (self.resolution?, self.n?, self.deriv_sup?);
        match self.regime {
            Regime::Sobolev | Regime::Analytic => Some(error_bound_sobolev(res, self.d, n, sup)),
            Regime::SingleSubspace => Some(error_bound_sobolev(res, self.d_eff?, n, sup)),
            Regime::UnionSubspaces => union_error_bound(res, self.d, self.d_eff?, n, sup).ok(),
        }
    }
}

fn domain_for(report: &SynthesisReport) -> Domain {
    match &report.subsets {
        Some(subsets) => Domain::Subspaces { d: report.d, subsets: subsets.clone() },
        None => Domain::Cube(report.d),
    }
}

fn run_one(cfg: &RateConfig, epsilon: f64) -> Result<(SynthesisReport, Option<f64>)> {
    let o = cfg.oracle.as_ref();
    let sampler = |report: &SynthesisReport| SamplerConfig {
        budget: cfg.budget,
        seed: cfg.seed,
        resolution: report.resolution,
    };
    let (report, measured) = match cfg.regime {
        Regime::UnionSubspaces => {
            let d_eff = cfg.d_eff.ok_or_else(|| Error::InvalidArgument("union regime needs d_eff".into()))?;
            let u = synthesize_union(&cfg.oracle, d_eff, epsilon, cfg.n, cfg.opts)?;
            let m = if cfg.budget > 0 {
                Some(sup_error(&u.net, o, &domain_for(&u.report), sampler(&u.report))?.sup_error)
            } else {
                None
            };
            (u.report, m)
        }
        regime => {
            let s = match regime {
                Regime::Sobolev => synthesize_sobolev(o, epsilon, cfg.n, cfg.opts)?,
                Regime::Analytic => synthesize_analytic(o, epsilon, cfg.opts)?,
                _ => {
                    let subset = cfg
                        .subset
                        .as_deref()
                        .ok_or_else(|| Error::InvalidArgument("single-subspace regime needs a subset".into()))?;
                    synthesize_single_subspace(&cfg.oracle, subset, epsilon, cfg.n, cfg.opts)?
                }
            };
            let m = if cfg.budget > 0 {
                Some(sup_error(&s.network, o, &domain_for(&s.report), sampler(&s.report))?.sup_error)
            } else {
                None
            };
            (s.report, m)
        }
    };
    Ok((report, measured))
}

/// Runs the sweep; infeasible targets produce an empty row and the sweep
/// carries on. Other errors abort.
pub fn rate_experiment(cfg: &RateConfig) -> Result<Vec<RateRow>> {
    let d = cfg.oracle.dim();
    let mut rows = Vec::with_capacity(cfg.eps_list.len());
    for &epsilon in &cfg.eps_list {
        let start = Instant::now();
        let outcome = run_one(cfg, epsilon);
        let wall_time_ms = start.elapsed().as_millis() as u64;
        let growth = (cfg.regime == Regime::Analytic).then(|| predicted_growth(d, epsilon));
        let row = match outcome {
            Ok((r, measured)) => RateRow {
                epsilon,
                regime: cfg.regime,
                d,
                n: Some(r.n),
                d_eff: r.d_eff,
                resolution: Some(r.resolution),
                total_parameters: Some(r.complexity.total_parameters),
                num_nodes: Some(r.complexity.num_nodes),
                depth: Some(r.complexity.depth),
                measured_sup_error: measured,
                theoretical_bound: Some(r.theoretical_bound),
                seed: cfg.seed,
                wall_time_ms,
                deriv_sup: Some(r.deriv_sup),
                predicted_growth: growth,
                note: String::new(),
            },
            Err(e @ Error::Infeasible { .. }) => RateRow {
                epsilon,
                regime: cfg.regime,
                d,
                n: (cfg.regime != Regime::Analytic).then_some(cfg.n),
                d_eff: cfg.d_eff,
                resolution: None,
                total_parameters: None,
                num_nodes: None,
                depth: None,
                measured_sup_error: None,
                theoretical_bound: None,
                seed: cfg.seed,
                wall_time_ms,
                deriv_sup: None,
                predicted_growth: growth,
                note: e.to_string(),
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[RateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<RateRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Least-squares line through `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<RateFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(RateFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: n,
    })
}

/// Slope of `ln(total_parameters)` against `ln(1/eps)` over feasible rows.
pub fn fit_rate(rows: &[RateRow]) -> Option<RateFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| Some(((1.0 / r.epsilon).ln(), (r.total_parameters? as f64).ln())))
        .unzip();
    fit_line(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::SafetyCap;
    use crate::oracle::builtin;

    fn cfg(regime: Regime, eps: Vec<f64>) -> RateConfig {
        RateConfig {
            oracle: builtin("exp", 2, 2).unwrap(),
            regime,
            n: 2,
            d_eff: None,
            subset: None,
            eps_list: eps,
            budget: 2000,
            seed: 7,
            opts: SynthesisOptions { cap: SafetyCap(200_000), share_factors: true },
        }
    }

    #[test]
    fn fit_examples() {
        let f = fit_line(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert_eq!((f.slope, f.intercept, f.r_squared), (2.0, 1.0, 1.0));
        assert!(fit_line(&[1.0], &[1.0]).is_none());
        assert!(fit_line(&[1.0, 1.0], &[1.0, 2.0]).is_none());
    }

    #[test]
    fn sweep_rows_are_consistent() {
        let rows = rate_experiment(&cfg(Regime::Sobolev, vec![0.25, 0.125, 0.0625])).unwrap();
        assert_eq!(rows.len(), 3);
        for w in rows.windows(2) {
            assert!(w[1].total_parameters >= w[0].total_parameters);
            assert_eq!(w[1].depth, w[0].depth);
        }
        for r in &rows {
            assert_eq!(r.recomputed_bound(), r.theoretical_bound);
            assert!(r.measured_sup_error.unwrap() <= r.theoretical_bound.unwrap() + 1e-9);
        }
    }

    #[test]
    fn infeasible_rows_are_kept() {
        let rows = rate_experiment(&cfg(Regime::Sobolev, vec![0.25, 1e-5, 0.125])).unwrap();
        assert!(rows[0].feasible() && !rows[1].feasible() && rows[2].feasible());
        assert!(rows[1].note.contains("exceeds"), "{}", rows[1].note);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "epsilon,regime,d,n,d_eff,N,total_parameters,num_nodes,depth,measured_sup_error,theoretical_bound,seed,wall_time_ms"
        ));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back[0].theoretical_bound, rows[0].theoretical_bound);
        assert_eq!(back[1].total_parameters, None);
    }

    #[test]
    fn analytic_rows_carry_growth() {
        let rows = rate_experiment(&cfg(Regime::Analytic, vec![0.1, 0.01])).unwrap();
        for r in &rows {
            assert!(r.predicted_growth.is_some());
            assert_eq!(r.recomputed_bound(), r.theoretical_bound);
        }
    }
}
