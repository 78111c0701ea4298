//! Piecewise-linear partition of unity on `[0,1]^d`.
//!
//! `phi_m(x) = prod_k psi(3N (x_k - m_k / N))` with the trapezoid
//! `psi(t) = 1` on `|t| < 1`, `2 - |t|` on `1 <= |t| <= 2`, `0` beyond.
//! Each univariate factor is realized exactly by four ReLU units.

use crate::index::GridIndex;
use crate::netgraph::{Activation, GraphBuilder, NetGraph, NodeId};

/// `(slope sign, offset)` of the four ReLU units in `psi`, with the output
/// weight of each unit.
const PSI_UNITS: [(f64, f64); 4] = [(2.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-2.0, 1.0)];

pub fn psi_scalar(t: f64) -> f64 {
    let a = t.abs();
    if a < 1.0 {
        1.0
    } else if a > 2.0 {
        0.0
    } else {
        2.0 - a
    }
}

/// `psi(t) = relu(t+2) - relu(t+1) - relu(t-1) + relu(t-2)` as a
/// one-input graph.
pub fn psi_network() -> NetGraph {
    let mut b = GraphBuilder::new(1);
    let out = push_psi(&mut b, 0, 1.0, 0.0);
    b.finish(vec![out]).expect("psi graph is well formed")
}

/// Appends `psi(scale * x + shift)` reading node `x`; returns the output id.
pub(crate) fn push_psi(b: &mut GraphBuilder, x: NodeId, scale: f64, shift: f64) -> NodeId {
    let units: Vec<(NodeId, f64)> = PSI_UNITS
        .iter()
        .map(|&(offset, w)| (b.push(&[(x, scale)], shift + offset, Activation::Relu), w))
        .collect();
    b.push(&units, 0.0, Activation::Identity)
}

/// Appends the factor `psi(3N (x_k - m_k / N))`, folding the affine map
/// into the ReLU layer as `3N x_k + (c - 3 m_k)`.
pub(crate) fn push_partition_factor(b: &mut GraphBuilder, k: usize, m_k: u32, resolution: u32) -> NodeId {
    let scale = 3.0 * resolution as f64;
    push_psi(b, b.input(k), scale, -3.0 * m_k as f64)
}

pub fn phi_scalar(m: &GridIndex, x: &[f64]) -> f64 {
    debug_assert_eq!(m.dim(), x.len());
    let n = m.resolution() as f64;
    m.coords()
        .iter()
        .zip(x)
        .map(|(&mk, &xk)| psi_scalar(3.0 * n * (xk - mk as f64 / n)))
        .product()
}

/// The `d` univariate factors of `phi_m`; factor `k` reads a single input
/// standing for `x_k`.
pub fn phi_factor_networks(m: &GridIndex) -> Vec<NetGraph> {
    (0..m.dim())
        .map(|k| {
            let mut b = GraphBuilder::new(1);
            let out = push_partition_factor(&mut b, 0, m.coords()[k], m.resolution());
            b.finish(vec![out]).expect("factor graph is well formed")
        })
        .collect()
}

/// All grid indices whose `phi_m` can be nonzero at `x`, i.e. those with
/// `|x_k - m_k / N| < 1/N` on every axis.
pub fn neighbouring_indices(x: &[f64], resolution: u32) -> Vec<GridIndex> {
    let n = resolution as f64;
    let per_axis: Vec<Vec<u32>> = x
        .iter()
        .map(|&xk| {
            let lo = ((xk * n).floor() as i64 - 1).max(0);
            let hi = ((xk * n).ceil() as i64 + 1).min(resolution as i64);
            (lo..=hi)
                .filter(|&m| (xk - m as f64 / n).abs() < 1.0 / n)
                .map(|m| m as u32)
                .collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for axis in &per_axis {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                axis.iter().map(move |&m| {
                    let mut p = prefix.clone();
                    p.push(m);
                    p
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|c| GridIndex::new(c, resolution).expect("neighbour inside grid"))
        .collect()
}

/// `max_x |sum_m phi_m(x) - 1|` over the samples, summing every grid index.
pub fn partition_sum_residual(resolution: u32, d: usize, samples: &[Vec<f64>]) -> f64 {
    let grid = crate::index::enumerate_grid(resolution, d, crate::index::SafetyCap::DEFAULT)
        .expect("residual grid within cap");
    samples
        .iter()
        .map(|x| {
            let s: f64 = grid.iter().map(|m| phi_scalar(m, x)).sum();
            (s - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Number of `phi_m` that are nonzero at `x`.
pub fn active_count(resolution: u32, x: &[f64]) -> usize {
    let grid = crate::index::enumerate_grid(resolution, x.len(), crate::index::SafetyCap::DEFAULT)
        .expect("grid within cap");
    grid.iter().filter(|m| phi_scalar(m, x) != 0.0).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::enumerate_grid;
    use crate::index::SafetyCap;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(seed: u64, count: usize, d: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| (0..d).map(|_| rng.gen_range(0.0..=1.0)).collect())
            .collect()
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi_scalar(0.0), 1.0);
        assert_eq!(psi_scalar(3.0), 0.0);
        assert_eq!(psi_scalar(-1.25), 0.75);
        let g = psi_network();
        assert_eq!(g.eval(&[0.0]).unwrap(), 1.0);
        assert_eq!(g.eval(&[1.5]).unwrap(), 0.5);
        assert_eq!(g.eval(&[-3.0]).unwrap(), 0.0);
        let c = g.complexity();
        assert_eq!((c.depth, c.nonzero_weights, c.nonzero_biases), (2, 8, 4));
    }

    #[test]
    fn psi_network_matches_scalar_on_dense_grid() {
        let g = psi_network();
        let n = 100_000;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![-4.0 + 8.0 * i as f64 / (n - 1) as f64])
            .collect();
        let vals = g.eval_batch(&pts).unwrap();
        let worst = pts
            .iter()
            .zip(&vals)
            .map(|(p, v)| (v - psi_scalar(p[0])).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-15, "max deviation {worst:e}");
    }

    #[test]
    fn phi_examples() {
        let m = GridIndex::new(vec![1], 2).unwrap();
        assert_eq!(phi_scalar(&m, &[0.5]), 1.0);
        assert_eq!(phi_scalar(&m, &[0.75]), 0.5);
        // |x - m/N| >= 2/(3N) kills the factor
        assert_eq!(phi_scalar(&m, &[0.875]), 0.0);
        assert_eq!(phi_scalar(&m, &[0.0]), 0.0);
        let m3 = GridIndex::new(vec![2, 0, 3], 3).unwrap();
        assert_eq!(phi_scalar(&m3, &m3.center()), 1.0);
    }

    #[test]
    fn factor_networks_match_scalars() {
        let m = GridIndex::new(vec![0], 1).unwrap();
        let f = &phi_factor_networks(&m)[0];
        assert_eq!(f.eval(&[1.0]).unwrap(), 0.0);
        assert_eq!(f.eval(&[0.0]).unwrap(), 1.0);

        let m = GridIndex::new(vec![3, 1], 4).unwrap();
        let factors = phi_factor_networks(&m);
        assert_eq!(factors.len(), 2);
        for (k, f) in factors.iter().enumerate() {
            assert_eq!(f.eval(&[m.center()[k]]).unwrap(), 1.0);
            assert_eq!(f.complexity(), psi_network().complexity());
            for i in 0..=2000 {
                let t = i as f64 / 2000.0;
                let single = GridIndex::new(vec![m.coords()[k]], 4).unwrap();
                let expected = phi_scalar(&single, &[t]);
                assert!((f.eval(&[t]).unwrap() - expected).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        assert!(partition_sum_residual(1, 1, &(0..1000).map(|i| vec![i as f64 / 999.0]).collect::<Vec<_>>()) <= 1e-12);
        assert!(partition_sum_residual(3, 2, &random_points(5, 10_000, 2)) <= 1e-12);
    }

    #[test]
    fn at_most_two_to_the_d_active() {
        for (n, d) in [(3u32, 2usize), (2, 3), (5, 1)] {
            for x in random_points(9, 2000, d) {
                assert!(active_count(n, &x) <= 1 << d);
            }
        }
    }

    #[test]
    fn support_is_tighter_than_one_over_n() {
        let n = 4;
        let grid = enumerate_grid(n, 2, SafetyCap::DEFAULT).unwrap();
        for x in random_points(13, 3000, 2) {
            for m in &grid {
                let v = phi_scalar(m, &x);
                assert!((0.0..=1.0).contains(&v));
                let far = m
                    .center()
                    .iter()
                    .zip(&x)
                    .any(|(c, xk)| (xk - c).abs() >= 2.0 / (3.0 * n as f64));
                if far {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn neighbours_cover_every_active_index() {
        let n = 5;
        let grid = enumerate_grid(n, 2, SafetyCap::DEFAULT).unwrap();
        for x in random_points(17, 1000, 2).into_iter().chain([vec![0.4, 1.0], vec![0.0, 0.2]]) {
            let near = neighbouring_indices(&x, n);
            for m in &grid {
                if phi_scalar(m, &x) != 0.0 {
                    assert!(near.contains(m));
                }
            }
        }
    }
}
