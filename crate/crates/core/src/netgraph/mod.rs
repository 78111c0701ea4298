//! Computation-graph IR for bi-activation networks.
//!
//! Node ids `0..input_arity` denote the inputs; every further id is a
//! computation node whose value is `activation(bias + sum_i w_i * src_i)`.
//! Nodes are stored in topological order, so each source id is strictly
//! smaller than the id of the node that reads it.

mod json;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use json::{format_hex_f64, parse_hex_f64, WeightFormat};

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Relu,
    Square,
}

impl Activation {
    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Identity => v,
            Activation::Relu => {
                if v > 0.0 {
                    v
                } else {
                    0.0
                }
            }
            Activation::Square => v * v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub source: NodeId,
    pub weight: f64,
}

/// A computation node, as handed to [`GraphBuilder::push_node`] or read back
/// through [`NetGraph::node`].
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub incoming: Vec<Edge>,
    pub bias: f64,
    pub activation: Activation,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub nonzero_weights: u64,
    pub nonzero_biases: u64,
    /// Computation nodes only; inputs are not counted.
    pub num_nodes: u64,
    /// Longest input-to-output path measured in computation nodes.
    pub depth: u64,
    pub total_parameters: u64,
}

impl std::ops::Add for ComplexityReport {
    type Output = ComplexityReport;

    fn add(self, o: ComplexityReport) -> ComplexityReport {
        ComplexityReport {
            nonzero_weights: self.nonzero_weights + o.nonzero_weights,
            nonzero_biases: self.nonzero_biases + o.nonzero_biases,
            num_nodes: self.num_nodes + o.num_nodes,
            depth: self.depth.max(o.depth),
            total_parameters: self.total_parameters + o.total_parameters,
        }
    }
}

/// An immutable, finalized feed-forward graph.
///
/// A graph has one or more outputs; scalar networks have exactly one and
/// are the only ones accepted by [`NetGraph::eval`]. Multi-output graphs
/// come out of [`parallel`].
#[derive(Clone, Debug, PartialEq)]
pub struct NetGraph {
    input_arity: usize,
    offsets: Vec<usize>,
    edges: Vec<Edge>,
    bias: Vec<f64>,
    activation: Vec<Activation>,
    outputs: Vec<NodeId>,
}

/// Lanes evaluated together by [`NetGraph::eval_batch`].
const LANES: usize = 32;

/// Fan-in from which a node is accumulated incrementally in batch mode.
const STREAM_FAN_IN: usize = 16;

/// Buffer layout for [`NetGraph::eval_batch`].
struct BatchPlan {
    /// Buffer slot of every id, inputs included.
    slot: Vec<usize>,
    streamed: Vec<bool>,
    /// After id `k` is computed: `(slot, bias)` accumulators to start...
    init_offsets: Vec<usize>,
    inits: Vec<(usize, f64)>,
    /// ...then `(slot, weight)` contributions of id `k` to streamed nodes.
    push_offsets: Vec<usize>,
    pushes: Vec<(usize, f64)>,
    slots: usize,
}

impl BatchPlan {
    fn new(g: &NetGraph) -> Self {
        let d = g.input_arity;
        let total = d + g.bias.len();
        let streamed: Vec<bool> = (0..g.bias.len())
            .map(|i| {
                let e = &g.edges[g.offsets[i]..g.offsets[i + 1]];
                e.len() >= STREAM_FAN_IN && e.windows(2).all(|w| w[0].source <= w[1].source)
            })
            .collect();
        // last ordinary reader of each id; outputs stay alive
        let mut last_use = vec![None; total];
        let mut stream_out: Vec<Vec<(usize, f64)>> = vec![Vec::new(); total];
        for i in 0..g.bias.len() {
            for e in &g.edges[g.offsets[i]..g.offsets[i + 1]] {
                if streamed[i] {
                    stream_out[e.source].push((d + i, e.weight));
                } else {
                    last_use[e.source] = Some(d + i);
                }
            }
        }
        let mut keep = vec![false; total];
        for &o in &g.outputs {
            keep[o] = true;
        }
        let mut slot = vec![usize::MAX; total];
        let mut free: Vec<usize> = Vec::new();
        let mut slots = 0;
        let mut alloc = |free: &mut Vec<usize>| {
            free.pop().unwrap_or_else(|| {
                slots += 1;
                slots - 1
            })
        };
        let mut init_offsets = vec![0];
        let mut inits = Vec::new();
        let mut push_offsets = vec![0];
        let mut pushes = Vec::new();
        for (k, s) in slot.iter_mut().enumerate().take(d) {
            *s = k;
        }
        let mut started = vec![false; g.bias.len()];
        for _ in 0..d {
            alloc(&mut free);
        }
        for id in 0..total {
            if id >= d {
                let i = id - d;
                if !streamed[i] {
                    slot[id] = alloc(&mut free);
                    for e in &g.edges[g.offsets[i]..g.offsets[i + 1]] {
                        if last_use[e.source] == Some(id) && !keep[e.source] {
                            last_use[e.source] = None;
                            free.push(slot[e.source]);
                        }
                    }
                }
            }
            for &(target, w) in &stream_out[id] {
                let t = target - d;
                if !started[t] {
                    started[t] = true;
                    slot[target] = alloc(&mut free);
                    inits.push((slot[target], g.bias[t]));
                }
                pushes.push((slot[target], w));
            }
            init_offsets.push(inits.len());
            push_offsets.push(pushes.len());
            if last_use[id].is_none() && !keep[id] {
                free.push(slot[id]);
            }
        }
        BatchPlan {
            slot,
            streamed,
            init_offsets,
            inits,
            push_offsets,
            pushes,
            slots,
        }
    }
}

impl NetGraph {
    pub fn input_arity(&self) -> usize {
        self.input_arity
    }

    /// Number of computation nodes.
    pub fn num_nodes(&self) -> usize {
        self.bias.len()
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    /// The single output id; errors on multi-output graphs.
    pub fn output(&self) -> Result<NodeId> {
        match self.outputs.as_slice() {
            [o] => Ok(*o),
            other => Err(Error::InvalidGraph(format!(
                "expected a single output, graph has {}",
                other.len()
            ))),
        }
    }

    pub fn node_ids(&self) -> std::ops::Range<NodeId> {
        self.input_arity..self.input_arity + self.num_nodes()
    }

    pub fn incoming(&self, id: NodeId) -> &[Edge] {
        let i = id - self.input_arity;
        &self.edges[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn bias(&self, id: NodeId) -> f64 {
        self.bias[id - self.input_arity]
    }

    pub fn activation(&self, id: NodeId) -> Activation {
        self.activation[id - self.input_arity]
    }

    pub fn node(&self, id: NodeId) -> Node {
        Node {
            incoming: self.incoming(id).to_vec(),
            bias: self.bias(id),
            activation: self.activation(id),
        }
    }

    /// Validates and finalizes raw parts. Nodes must already be in
    /// topological order; dead nodes are pruned.
    pub fn from_nodes(input_arity: usize, nodes: Vec<Node>, outputs: Vec<NodeId>) -> Result<Self> {
        let mut b = GraphBuilder::new(input_arity);
        for node in nodes {
            b.push_raw(&node.incoming, node.bias, node.activation)?;
        }
        b.finish(outputs)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_arity {
            return Err(Error::DimensionMismatch {
                expected: self.input_arity,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn forward(&self, x: &[f64], values: &mut Vec<f64>) {
        values.clear();
        values.extend_from_slice(x);
        for i in 0..self.bias.len() {
            let mut acc = self.bias[i];
            for e in &self.edges[self.offsets[i]..self.offsets[i + 1]] {
                acc += e.weight * values[e.source];
            }
            values.push(self.activation[i].apply(acc));
        }
    }

    /// Value of the single output at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let out = self.output()?;
        self.check_point(x)?;
        let mut values = Vec::with_capacity(self.input_arity + self.num_nodes());
        self.forward(x, &mut values);
        Ok(values[out])
    }

    /// Values of every output at `x`, in output order.
    pub fn eval_outputs(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let mut values = Vec::with_capacity(self.input_arity + self.num_nodes());
        self.forward(x, &mut values);
        Ok(self.outputs.iter().map(|&o| values[o]).collect())
    }

    /// Evaluates the single output at many points.
    ///
    /// Points are pushed through the graph [`LANES`] at a time. Buffer slots
    /// are recycled once a value has no readers left, and wide sums (the
    /// final linear combination) are accumulated as their inputs appear, so
    /// the working set stays small. The arithmetic per lane is the same
    /// sequence of operations as [`NetGraph::eval`], so results are
    /// bit-identical.
    pub fn eval_batch(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        let out = self.output()?;
        for p in points {
            self.check_point(p)?;
        }
        let plan = BatchPlan::new(self);
        let mut buf = vec![[0.0f64; LANES]; plan.slots];
        let mut result = Vec::with_capacity(points.len());
        let d = self.input_arity;
        for chunk in points.chunks(LANES) {
            for (lane, p) in chunk.iter().enumerate() {
                for (k, &v) in p.iter().enumerate() {
                    buf[plan.slot[k]][lane] = v;
                }
            }
            for id in 0..d + self.bias.len() {
                if id >= d {
                    let i = id - d;
                    let act = self.activation[i];
                    let dst = plan.slot[id];
                    if plan.streamed[i] {
                        for v in buf[dst].iter_mut() {
                            *v = act.apply(*v);
                        }
                    } else {
                        let mut acc = [self.bias[i]; LANES];
                        for e in &self.edges[self.offsets[i]..self.offsets[i + 1]] {
                            let src = &buf[plan.slot[e.source]];
                            for l in 0..LANES {
                                acc[l] += e.weight * src[l];
                            }
                        }
                        let slot = &mut buf[dst];
                        match act {
                            Activation::Identity => *slot = acc,
                            _ => {
                                for l in 0..LANES {
                                    slot[l] = act.apply(acc[l]);
                                }
                            }
                        }
                    }
                }
                for &(target, bias) in &plan.inits[plan.init_offsets[id]..plan.init_offsets[id + 1]] {
                    buf[target] = [bias; LANES];
                }
                let pushes = &plan.pushes[plan.push_offsets[id]..plan.push_offsets[id + 1]];
                if pushes.is_empty() {
                    continue;
                }
                let src = buf[plan.slot[id]];
                for &(target, w) in pushes {
                    let acc = &mut buf[target];
                    for l in 0..LANES {
                        acc[l] += w * src[l];
                    }
                }
            }
            result.extend(buf[plan.slot[out]][..chunk.len()].iter().copied());
        }
        Ok(result)
    }

    /// Per-node depth; inputs have depth 0.
    fn depths(&self) -> Vec<u64> {
        let mut depth = vec![0u64; self.input_arity + self.num_nodes()];
        for id in self.node_ids() {
            let d = self
                .incoming(id)
                .iter()
                .map(|e| depth[e.source])
                .max()
                .unwrap_or(0);
            depth[id] = d + 1;
        }
        depth
    }

    pub fn complexity(&self) -> ComplexityReport {
        let nonzero_weights = self.edges.iter().filter(|e| e.weight != 0.0).count() as u64;
        let nonzero_biases = self.bias.iter().filter(|&&b| b != 0.0).count() as u64;
        let depths = self.depths();
        let depth = self.outputs.iter().map(|&o| depths[o]).max().unwrap_or(0);
        ComplexityReport {
            nonzero_weights,
            nonzero_biases,
            num_nodes: self.num_nodes() as u64,
            depth,
            total_parameters: nonzero_weights + nonzero_biases,
        }
    }

    /// Rewires input `j` of this graph to input `map[j]` of a graph with
    /// `new_arity` inputs. Used to lift a network built on a coordinate
    /// subspace back to the ambient dimension.
    pub fn lift_inputs(&self, map: &[usize], new_arity: usize) -> Result<NetGraph> {
        if map.len() != self.input_arity {
            return Err(Error::DimensionMismatch {
                expected: self.input_arity,
                got: map.len(),
            });
        }
        if map.iter().any(|&k| k >= new_arity) {
            return Err(Error::InvalidArgument(format!(
                "input map {map:?} out of range for arity {new_arity}"
            )));
        }
        let mut b = GraphBuilder::new(new_arity);
        let mapping = b.append(self, map)?;
        b.finish(mapping)
    }

    /// Layer-by-layer view: node ids grouped by depth.
    pub fn layers(&self) -> Vec<Vec<NodeId>> {
        let depths = self.depths();
        let max = depths.iter().copied().max().unwrap_or(0) as usize;
        let mut layers = vec![Vec::new(); max];
        for id in self.node_ids() {
            layers[depths[id] as usize - 1].push(id);
        }
        layers
    }
}

/// Single-owner incremental constructor for [`NetGraph`].
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    input_arity: usize,
    offsets: Vec<usize>,
    edges: Vec<Edge>,
    bias: Vec<f64>,
    activation: Vec<Activation>,
}

impl GraphBuilder {
    pub fn new(input_arity: usize) -> Self {
        GraphBuilder {
            input_arity,
            offsets: vec![0],
            edges: Vec::new(),
            bias: Vec::new(),
            activation: Vec::new(),
        }
    }

    pub fn input_arity(&self) -> usize {
        self.input_arity
    }

    pub fn input(&self, k: usize) -> NodeId {
        assert!(k < self.input_arity, "input {k} out of range");
        k
    }

    fn next_id(&self) -> NodeId {
        self.input_arity + self.bias.len()
    }

    /// Appends a node, dropping zero-weight edges.
    pub fn push(&mut self, incoming: &[(NodeId, f64)], bias: f64, activation: Activation) -> NodeId {
        let next = self.next_id();
        for &(src, w) in incoming {
            assert!(src < next, "edge from {src} into {next} violates topological order");
            if w != 0.0 {
                self.edges.push(Edge { source: src, weight: w });
            }
        }
        self.close(bias, activation)
    }

    /// Appends a node verbatim (zero weights kept), validating order.
    pub fn push_raw(&mut self, incoming: &[Edge], bias: f64, activation: Activation) -> Result<NodeId> {
        let next = self.next_id();
        for e in incoming {
            if e.source >= next {
                return Err(Error::InvalidGraph(format!(
                    "acyclicity violated: node {next} reads node {}",
                    e.source
                )));
            }
            if !e.weight.is_finite() {
                return Err(Error::InvalidGraph(format!("non-finite weight into node {next}")));
            }
        }
        if !bias.is_finite() {
            return Err(Error::InvalidGraph(format!("non-finite bias on node {next}")));
        }
        self.edges.extend_from_slice(incoming);
        Ok(self.close(bias, activation))
    }

    pub fn push_node(&mut self, node: &Node) -> Result<NodeId> {
        self.push_raw(&node.incoming, node.bias, node.activation)
    }

    fn close(&mut self, bias: f64, activation: Activation) -> NodeId {
        let id = self.next_id();
        self.offsets.push(self.edges.len());
        self.bias.push(bias);
        self.activation.push(activation);
        id
    }

    /// Copies all nodes of `g` into this builder, feeding `g`'s input `j`
    /// from `inputs[j]`. Returns the new ids of `g`'s outputs.
    pub fn append(&mut self, g: &NetGraph, inputs: &[NodeId]) -> Result<Vec<NodeId>> {
        if inputs.len() != g.input_arity {
            return Err(Error::DimensionMismatch {
                expected: g.input_arity,
                got: inputs.len(),
            });
        }
        let mut remap: Vec<NodeId> = inputs.to_vec();
        remap.reserve(g.num_nodes());
        for id in g.node_ids() {
            let next = self.next_id();
            for e in g.incoming(id) {
                self.edges.push(Edge {
                    source: remap[e.source],
                    weight: e.weight,
                });
            }
            self.close(g.bias(id), g.activation(id));
            remap.push(next);
        }
        Ok(g.outputs.iter().map(|&o| remap[o]).collect())
    }

    /// Finalizes the graph, removing every node that does not feed an output.
    pub fn finish(self, outputs: Vec<NodeId>) -> Result<NetGraph> {
        if outputs.is_empty() {
            return Err(Error::InvalidGraph("graph has no output".into()));
        }
        let total = self.next_id();
        if let Some(&o) = outputs.iter().find(|&&o| o >= total) {
            return Err(Error::InvalidGraph(format!("output id {o} does not exist")));
        }
        let d = self.input_arity;
        let mut live = vec![false; total];
        for &o in &outputs {
            live[o] = true;
        }
        for id in (d..total).rev() {
            if live[id] {
                let i = id - d;
                for e in &self.edges[self.offsets[i]..self.offsets[i + 1]] {
                    live[e.source] = true;
                }
            }
        }
        let mut remap = vec![usize::MAX; total];
        for (k, slot) in remap.iter_mut().enumerate().take(d) {
            *slot = k;
        }
        let mut g = NetGraph {
            input_arity: d,
            offsets: vec![0],
            edges: Vec::with_capacity(self.edges.len()),
            bias: Vec::new(),
            activation: Vec::new(),
            outputs: Vec::new(),
        };
        for id in d..total {
            if !live[id] {
                continue;
            }
            let i = id - d;
            remap[id] = d + g.bias.len();
            for e in &self.edges[self.offsets[i]..self.offsets[i + 1]] {
                g.edges.push(Edge {
                    source: remap[e.source],
                    weight: e.weight,
                });
            }
            g.offsets.push(g.edges.len());
            g.bias.push(self.bias[i]);
            g.activation.push(self.activation[i]);
        }
        g.outputs = outputs.iter().map(|&o| remap[o]).collect();
        Ok(g)
    }
}

/// Graph with one identity node forwarding input 0.
pub fn pass_through(input_arity: usize, k: usize) -> NetGraph {
    let mut b = GraphBuilder::new(input_arity);
    let out = b.push(&[(k, 1.0)], 0.0, Activation::Identity);
    b.finish(vec![out]).expect("pass-through graph is well formed")
}

fn shared_arity(nets: &[NetGraph]) -> Result<usize> {
    let first = nets
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty network list".into()))?;
    let d = first.input_arity;
    if let Some(bad) = nets.iter().find(|g| g.input_arity != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bad.input_arity,
        });
    }
    Ok(d)
}

/// Runs `nets` side by side on shared inputs; the result has one output
/// per sub-network, in order.
pub fn parallel(nets: &[NetGraph]) -> Result<NetGraph> {
    let d = shared_arity(nets)?;
    let inputs: Vec<NodeId> = (0..d).collect();
    let mut b = GraphBuilder::new(d);
    let mut outs = Vec::new();
    for g in nets {
        outs.extend(b.append(g, &inputs)?);
    }
    b.finish(outs)
}

/// `sum_i coeffs[i] * nets[i](x)` via one extra identity node.
///
/// Sub-networks with a zero coefficient are dropped entirely.
pub fn linear_combination(nets: &[NetGraph], coeffs: &[f64]) -> Result<NetGraph> {
    if nets.len() != coeffs.len() {
        return Err(Error::InvalidArgument(format!(
            "{} networks but {} coefficients",
            nets.len(),
            coeffs.len()
        )));
    }
    let d = shared_arity(nets)?;
    let inputs: Vec<NodeId> = (0..d).collect();
    let mut b = GraphBuilder::new(d);
    let mut terms = Vec::new();
    for (g, &c) in nets.iter().zip(coeffs) {
        if c == 0.0 {
            continue;
        }
        let o = b.append(g, &inputs)?;
        let o = single(&o)?;
        terms.push((o, c));
    }
    let out = b.push(&terms, 0.0, Activation::Identity);
    b.finish(vec![out])
}

fn single(outs: &[NodeId]) -> Result<NodeId> {
    match outs {
        [o] => Ok(*o),
        _ => Err(Error::InvalidGraph(format!(
            "expected a scalar sub-network, got {} outputs",
            outs.len()
        ))),
    }
}
