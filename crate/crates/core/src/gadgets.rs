//! Exact multiplication with square activations and the tournament
//! product tree built from it.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::index::{GridIndex, MultiIndex};
use crate::netgraph::{Activation, GraphBuilder, NetGraph, NodeId};
use crate::partition::push_partition_factor;

/// `xy = ((x+y)^2 - x^2 - y^2) / 2` as a two-input graph: three square
/// units fed with weights `[0,1]`, `[1,0]`, `[1,1]`, read out with
/// `[-1/2, -1/2, 1/2]`.
pub fn mult_gadget() -> NetGraph {
    let mut b = GraphBuilder::new(2);
    let out = push_product(&mut b, 0, 1);
    b.finish(vec![out]).expect("gadget graph is well formed")
}

pub(crate) fn push_product(b: &mut GraphBuilder, x: NodeId, y: NodeId) -> NodeId {
    let sq_y = b.push(&[(x, 0.0), (y, 1.0)], 0.0, Activation::Square);
    let sq_x = b.push(&[(x, 1.0), (y, 0.0)], 0.0, Activation::Square);
    let sq_sum = b.push(&[(x, 1.0), (y, 1.0)], 0.0, Activation::Square);
    b.push(
        &[(sq_y, -0.5), (sq_x, -0.5), (sq_sum, 0.5)],
        0.0,
        Activation::Identity,
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round {
    /// Pairs of positions in this round's input list.
    pub pairs: Vec<(usize, usize)>,
    /// Position carried unchanged to the end of the next round's list.
    pub bye: Option<usize>,
}

/// Pairing schedule for a `k`-fold product.
///
/// Each round multiplies neighbours left to right; an odd element out is
/// carried forward by a skip edge and appended after the products, so it
/// gets paired as late as possible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductPlan {
    leaf_count: usize,
    rounds: Vec<Round>,
}

impl ProductPlan {
    pub fn new(leaf_count: usize) -> Result<Self> {
        if leaf_count == 0 {
            return Err(Error::InvalidArgument("product of zero factors".into()));
        }
        let mut rounds = Vec::new();
        let mut width = leaf_count;
        while width > 1 {
            let pairs = (0..width / 2).map(|i| (2 * i, 2 * i + 1)).collect();
            let bye = (width % 2 == 1).then_some(width - 1);
            rounds.push(Round { pairs, bye });
            width = width.div_ceil(2);
        }
        Ok(ProductPlan { leaf_count, rounds })
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn gadget_count(&self) -> usize {
        self.rounds.iter().map(|r| r.pairs.len()).sum()
    }
}

/// Appends the tournament product of `leaves`; a single leaf is returned
/// as is.
pub(crate) fn push_tournament(b: &mut GraphBuilder, leaves: &[NodeId]) -> Result<NodeId> {
    let plan = ProductPlan::new(leaves.len())?;
    let mut current = leaves.to_vec();
    for round in plan.rounds() {
        let mut next: Vec<NodeId> = round
            .pairs
            .iter()
            .map(|&(i, j)| push_product(b, current[i], current[j]))
            .collect();
        if let Some(i) = round.bye {
            next.push(current[i]);
        }
        current = next;
    }
    Ok(current[0])
}

/// `prod_i factors[i](x)` for scalar factors over shared inputs.
pub fn tournament_product(factors: &[NetGraph]) -> Result<NetGraph> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidArgument("product of zero factors".into()))?;
    if factors.len() == 1 {
        return Ok(first.clone());
    }
    let d = first.input_arity();
    let inputs: Vec<NodeId> = (0..d).collect();
    let mut b = GraphBuilder::new(d);
    let mut leaves = Vec::with_capacity(factors.len());
    for f in factors {
        match b.append(f, &inputs)?.as_slice() {
            [o] => leaves.push(*o),
            outs => {
                return Err(Error::InvalidGraph(format!(
                    "factor has {} outputs, expected 1",
                    outs.len()
                )))
            }
        }
    }
    let out = push_tournament(&mut b, &leaves)?;
    b.finish(vec![out])
}

/// Builds the univariate factors of term networks, optionally reusing one
/// copy per `(axis, m_k)` across terms.
#[derive(Debug)]
pub struct FactorCache {
    resolution: u32,
    shared: bool,
    partition: HashMap<(usize, u32), NodeId>,
    linear: HashMap<(usize, u32), NodeId>,
}

impl FactorCache {
    pub fn new(resolution: u32, shared: bool) -> Self {
        FactorCache {
            resolution,
            shared,
            partition: HashMap::new(),
            linear: HashMap::new(),
        }
    }

    fn partition(&mut self, b: &mut GraphBuilder, k: usize, m_k: u32) -> NodeId {
        let n = self.resolution;
        if !self.shared {
            return push_partition_factor(b, k, m_k, n);
        }
        *self
            .partition
            .entry((k, m_k))
            .or_insert_with(|| push_partition_factor(b, k, m_k, n))
    }

    fn linear(&mut self, b: &mut GraphBuilder, k: usize, m_k: u32) -> NodeId {
        let center = m_k as f64 / self.resolution as f64;
        let make = |b: &mut GraphBuilder| b.push(&[(k, 1.0)], -center, Activation::Identity);
        if !self.shared {
            return make(b);
        }
        *self.linear.entry((k, m_k)).or_insert_with(|| make(b))
    }
}

/// Appends `phi_m(x) (x - m/N)^n`: the `d` partition factors first, then
/// `n_k` copies of `x_k - m_k/N` for each axis, multiplied in a tournament.
pub(crate) fn push_term(
    b: &mut GraphBuilder,
    cache: &mut FactorCache,
    m: &GridIndex,
    n: &MultiIndex,
) -> Result<NodeId> {
    let d = m.dim();
    if n.dim() != d || b.input_arity() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: n.dim(),
        });
    }
    let mut leaves = Vec::with_capacity(d + n.order() as usize);
    for (k, &mk) in m.coords().iter().enumerate() {
        leaves.push(cache.partition(b, k, mk));
    }
    for (k, (&mk, &nk)) in m.coords().iter().zip(n.exponents()).enumerate() {
        for _ in 0..nk {
            leaves.push(cache.linear(b, k, mk));
        }
    }
    push_tournament(b, &leaves)
}

/// Standalone network for one localized Taylor term.
pub fn term_network(m: &GridIndex, n: &MultiIndex) -> Result<NetGraph> {
    let mut b = GraphBuilder::new(m.dim());
    let mut cache = FactorCache::new(m.resolution(), true);
    let out = push_term(&mut b, &mut cache, m, n)?;
    b.finish(vec![out])
}
