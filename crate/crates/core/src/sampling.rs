//! Sup-norm error estimation.
//!
//! `f - f~` is smooth between the kinks of the trapezoids, which sit on
//! multiples of `1/(3N)`. The sampler spends part of its budget on a grid
//! aligned with those kinks, part on uniform random points, and the rest on
//! random refinement around the worst points found.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgraph::NetGraph;
use crate::oracle::FunctionOracle;
use crate::synthesis::{LocalizedTaylor, UnionNet};

/// Anything that can be evaluated on a batch of points.
pub trait Approximant {
    fn dim(&self) -> usize;

    fn eval_many(&self, points: &[Vec<f64>]) -> Result<Vec<f64>>;
}

impl Approximant for NetGraph {
    fn dim(&self) -> usize {
        self.input_arity()
    }

    fn eval_many(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.eval_batch(points)
    }
}

impl Approximant for UnionNet {
    fn dim(&self) -> usize {
        UnionNet::dim(self)
    }

    fn eval_many(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.eval_batch(points)
    }
}

impl Approximant for LocalizedTaylor<'_> {
    fn dim(&self) -> usize {
        LocalizedTaylor::dim(self)
    }

    fn eval_many(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        Ok(points.iter().map(|p| self.eval(p)).collect())
    }
}

/// Where errors are measured.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Cube(usize),
    /// Union of coordinate subspaces of `[0,1]^d`.
    Subspaces { d: usize, subsets: Vec<Vec<usize>> },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Cube(d) => *d,
            Domain::Subspaces { d, .. } => *d,
        }
    }

    fn pieces(&self) -> Vec<Vec<usize>> {
        match self {
            Domain::Cube(d) => vec![(0..*d).collect()],
            Domain::Subspaces { subsets, .. } => subsets.clone(),
        }
    }

    /// Uniform sample: pick a piece, then uniform coordinates on it.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let pieces = self.pieces();
        let e = &pieces[rng.gen_range(0..pieces.len())];
        let mut x = vec![0.0; self.dim()];
        for &k in e {
            x[k] = rng.gen();
        }
        x
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub sup_error: f64,
    pub argmax_point: Vec<f64>,
    pub num_samples: usize,
    pub sampler: String,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct SamplerConfig {
    pub budget: usize,
    pub seed: u64,
    /// Grid resolution of the approximant, used to align the grid; 0 means
    /// unknown.
    pub resolution: u32,
}

/// Grid lines per axis: a multiple of `3N` up to `12N`, else whatever fits.
fn grid_lines(resolution: u32, dim: usize, budget: usize) -> usize {
    if dim == 0 || budget < 2 {
        return 0;
    }
    let fits = |m: usize| (m as f64 + 1.0).powi(dim as i32) <= budget as f64;
    if resolution > 0 {
        let base = 3 * resolution as usize;
        if let Some(r) = (1..=4).rev().find(|&r| fits(base * r)) {
            return base * r;
        }
    }
    let mut m = (budget as f64).powf(1.0 / dim as f64).floor() as usize;
    while m > 1 && !fits(m - 1) {
        m -= 1;
    }
    m.saturating_sub(1)
}

fn grid_points(d: usize, subset: &[usize], lines: usize, out: &mut Vec<Vec<f64>>) {
    if lines == 0 {
        return;
    }
    let per = lines + 1;
    let total = per.pow(subset.len() as u32);
    for mut idx in 0..total {
        let mut x = vec![0.0; d];
        for &k in subset.iter().rev() {
            x[k] = (idx % per) as f64 / lines as f64;
            idx /= per;
        }
        out.push(x);
    }
}

struct Tracker<'a> {
    approx: &'a dyn Approximant,
    oracle: &'a dyn FunctionOracle,
    best: f64,
    best_point: Vec<f64>,
    count: usize,
    top: Vec<(f64, Vec<f64>)>,
}

const TOP_K: usize = 16;

impl Tracker<'_> {
    fn feed(&mut self, points: Vec<Vec<f64>>) -> Result<()> {
        for chunk in points.chunks(4096) {
            let vals = self.approx.eval_many(chunk)?;
            for (p, v) in chunk.iter().zip(vals) {
                let err = (v - self.oracle.value(p)).abs();
                self.count += 1;
                if err.is_nan() {
                    return Err(Error::Oracle(format!("NaN error at {p:?}")));
                }
                if err > self.best || self.count == 1 {
                    self.best = err;
                    self.best_point = p.clone();
                }
                if self.top.len() < TOP_K || err > self.top[self.top.len() - 1].0 {
                    let pos = self.top.partition_point(|(e, _)| *e >= err);
                    self.top.insert(pos, (err, p.clone()));
                    self.top.truncate(TOP_K);
                }
            }
        }
        Ok(())
    }
}

/// Estimates `sup |approx - f|` over `domain` with at most `budget`
/// evaluations (a few more when the grid is small).
pub fn sup_error(
    approx: &dyn Approximant,
    oracle: &dyn FunctionOracle,
    domain: &Domain,
    cfg: SamplerConfig,
) -> Result<ErrorEstimate> {
    let d = domain.dim();
    if approx.dim() != d || oracle.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: approx.dim().min(oracle.dim()) });
    }
    let mut t = Tracker {
        approx,
        oracle,
        best: 0.0,
        best_point: vec![0.0; d],
        count: 0,
        top: Vec::new(),
    };
    let pieces = domain.pieces();
    let grid_budget = cfg.budget / 2 / pieces.len();
    let mut grid = Vec::new();
    let mut lines = 0;
    for e in &pieces {
        lines = grid_lines(cfg.resolution, e.len(), grid_budget);
        grid_points(d, e, lines, &mut grid);
    }
    t.feed(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let random = cfg.budget.saturating_sub(t.count) / 2;
    t.feed((0..random).map(|_| domain.sample(&mut rng)).collect())?;

    // refine around the worst points, shrinking the radius each pass
    let mut radius = if lines > 0 { 1.0 / lines as f64 } else { 0.1 };
    while t.count < cfg.budget && !t.top.is_empty() {
        let per_pass = (cfg.budget - t.count).min(1024);
        let centres: Vec<Vec<f64>> = t.top.iter().map(|(_, p)| p.clone()).collect();
        let mut batch = Vec::with_capacity(per_pass);
        for i in 0..per_pass {
            let c = &centres[i % centres.len()];
            // stay on the subspace of the centre
            let p = c
                .iter()
                .map(|&v| if v == 0.0 && matches!(domain, Domain::Subspaces { .. }) { 0.0 } else { (v + rng.gen_range(-radius..=radius)).clamp(0.0, 1.0) })
                .collect();
            batch.push(p);
        }
        t.feed(batch)?;
        radius *= 0.7;
    }
    let sampler = format!("grid{lines}+uniform{random}+refine");
    Ok(ErrorEstimate {
        sup_error: t.best,
        argmax_point: t.best_point,
        num_samples: t.count,
        sampler,
        seed: cfg.seed,
    })
}

/// Max `|a - b|` over seeded uniform points of `domain`.
pub fn max_deviation(a: &dyn Approximant, b: &dyn Approximant, domain: &Domain, count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..count).map(|_| domain.sample(&mut rng)).collect();
    let va = a.eval_many(&pts)?;
    let vb = b.eval_many(&pts)?;
    Ok(va.iter().zip(&vb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}
