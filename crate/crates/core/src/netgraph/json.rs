//! JSON network format.
//!
//! ```text
//! {"input_arity": d,
//!  "nodes": [{"id": i, "activation": "identity"|"relu"|"square",
//!             "bias": b, "incoming": [[src, w], ...]}, ...],
//!  "output": o}
//! ```
//!
//! Inputs own ids `0..d`. Numbers may be JSON numbers or hex-float strings
//! such as `"0x1.8p+1"`; both forms are read back bit-exactly. Multi-output
//! graphs use `"outputs": [..]` in place of `"output"`.

use std::collections::{BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Activation, Edge, GraphBuilder, NetGraph, NodeId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WeightFormat {
    /// Shortest decimal that round-trips.
    #[default]
    Decimal,
    /// C99 hex-float strings.
    Hex,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    F(f64),
    S(String),
}

impl Num {
    fn encode(v: f64, fmt: WeightFormat) -> Num {
        match fmt {
            WeightFormat::Decimal => Num::F(v),
            WeightFormat::Hex => Num::S(format_hex_f64(v)),
        }
    }

    fn decode(&self, ctx: &str) -> Result<f64> {
        match self {
            Num::F(v) => Ok(*v),
            Num::S(s) => parse_hex_f64(s)
                .or_else(|| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("{ctx}: cannot read number {s:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawNode {
    id: usize,
    activation: Activation,
    bias: Num,
    incoming: Vec<(usize, Num)>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    input_arity: usize,
    nodes: Vec<RawNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outputs: Option<Vec<usize>>,
}

impl NetGraph {
    fn to_raw(&self, fmt: WeightFormat) -> RawGraph {
        let nodes = self
            .node_ids()
            .map(|id| RawNode {
                id,
                activation: self.activation(id),
                bias: Num::encode(self.bias(id), fmt),
                incoming: self
                    .incoming(id)
                    .iter()
                    .map(|e| (e.source, Num::encode(e.weight, fmt)))
                    .collect(),
            })
            .collect();
        let (output, outputs) = match self.outputs.as_slice() {
            [o] => (Some(*o), None),
            many => (None, Some(many.to_vec())),
        };
        RawGraph {
            input_arity: self.input_arity,
            nodes,
            output,
            outputs,
        }
    }

    pub fn to_json_value(&self, fmt: WeightFormat) -> Value {
        serde_json::to_value(self.to_raw(fmt)).expect("network serializes")
    }

    pub fn to_json(&self, fmt: WeightFormat) -> String {
        serde_json::to_string(&self.to_raw(fmt)).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<NetGraph> {
        let raw: RawGraph = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        from_raw(raw)
    }

    pub fn from_json_value(value: Value) -> Result<NetGraph> {
        let raw: RawGraph =
            serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        from_raw(raw)
    }

    pub fn write_json(&self, path: &Path, fmt: WeightFormat) -> Result<()> {
        std::fs::write(path, self.to_json(fmt))?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<NetGraph> {
        NetGraph::from_json(&std::fs::read_to_string(path)?)
    }
}

fn from_raw(raw: RawGraph) -> Result<NetGraph> {
    let d = raw.input_arity;
    if d == 0 {
        return Err(Error::Parse("input_arity must be positive".into()));
    }
    let mut position: HashMap<usize, usize> = HashMap::with_capacity(raw.nodes.len());
    for (i, node) in raw.nodes.iter().enumerate() {
        if node.id < d {
            return Err(Error::Parse(format!(
                "nodes[{i}]: id {} collides with an input id (< {d})",
                node.id
            )));
        }
        if position.insert(node.id, i).is_some() {
            return Err(Error::Parse(format!("nodes[{i}]: duplicate id {}", node.id)));
        }
    }
    // Resolve each edge to an input or a listing position.
    let mut deps: Vec<Vec<usize>> = Vec::with_capacity(raw.nodes.len());
    for (i, node) in raw.nodes.iter().enumerate() {
        let mut list = Vec::new();
        for (j, (src, _)) in node.incoming.iter().enumerate() {
            if *src < d {
                continue;
            }
            match position.get(src) {
                Some(&p) => list.push(p),
                None => {
                    return Err(Error::Parse(format!(
                        "nodes[{i}].incoming[{j}]: unknown source id {src}"
                    )))
                }
            }
        }
        deps.push(list);
    }
    let order = topological_order(&deps)?;

    let mut new_id = vec![0usize; raw.nodes.len()];
    for (rank, &p) in order.iter().enumerate() {
        new_id[p] = d + rank;
    }
    let resolve = |src: usize| -> NodeId {
        if src < d {
            src
        } else {
            new_id[position[&src]]
        }
    };
    let mut b = GraphBuilder::new(d);
    for &p in &order {
        let node = &raw.nodes[p];
        let ctx = format!("nodes[{p}]");
        let mut edges = Vec::with_capacity(node.incoming.len());
        for (src, w) in &node.incoming {
            edges.push(Edge {
                source: resolve(*src),
                weight: w.decode(&ctx)?,
            });
        }
        b.push_raw(&edges, node.bias.decode(&ctx)?, node.activation)?;
    }
    let outputs = match (raw.output, raw.outputs) {
        (Some(o), None) => vec![o],
        (None, Some(os)) if !os.is_empty() => os,
        _ => {
            return Err(Error::Parse(
                "exactly one of \"output\" or a non-empty \"outputs\" is required".into(),
            ))
        }
    };
    let outputs = outputs
        .into_iter()
        .map(|o| {
            if o < d || position.contains_key(&o) {
                Ok(resolve(o))
            } else {
                Err(Error::Parse(format!("output id {o} does not exist")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    b.finish(outputs)
}

/// Kahn's algorithm, preferring listing order so already-sorted input is
/// left untouched.
fn topological_order(deps: &[Vec<usize>]) -> Result<Vec<usize>> {
    let n = deps.len();
    let mut indegree = vec![0usize; n];
    let mut readers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, list) in deps.iter().enumerate() {
        indegree[i] = list.len();
        for &p in list {
            readers[p].push(i);
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &r in &readers[i] {
            indegree[r] -= 1;
            if indegree[r] == 0 {
                ready.push(Reverse(r));
            }
        }
    }
    if order.len() != n {
        let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap_or(0);
        return Err(Error::InvalidGraph(format!(
            "acyclicity violated: nodes[{stuck}] lies on a cycle"
        )));
    }
    Ok(order)
}

/// Formats `v` as a normalized hex float, e.g. `0x1.8p+1` for 3.0.
pub fn format_hex_f64(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && mantissa == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 {
        (0, -1022)
    } else {
        (1, exp_bits - 1023)
    };
    let mut frac = format!("{mantissa:013x}");
    while frac.ends_with('0') {
        frac.pop();
    }
    let exp_sign = if exp < 0 { "-" } else { "+" };
    if frac.is_empty() {
        format!("{sign}0x{lead}p{exp_sign}{}", exp.abs())
    } else {
        format!("{sign}0x{lead}.{frac}p{exp_sign}{}", exp.abs())
    }
}

/// Parses a hex-float literal (`[-+]0x<hex>[.<hex>]p[-+]<dec>`). Returns
/// `None` on anything else.
pub fn parse_hex_f64(s: &str) -> Option<f64> {
    let s = s.trim();
    let (neg, rest) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X"))?;
    let (body, exp) = match rest.find(['p', 'P']) {
        Some(i) => (&rest[..i], rest[i + 1..].parse::<i64>().ok()?),
        None => (rest, 0),
    };
    let (int_part, frac_part) = match body.find('.') {
        Some(i) => (&body[..i], &body[i + 1..]),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut mantissa: u64 = 0;
    let mut shift: i64 = 0;
    let mut sticky = false;
    for (digits, is_frac) in [(int_part, false), (frac_part, true)] {
        for c in digits.chars() {
            let v = c.to_digit(16)? as u64;
            if mantissa >> 56 == 0 {
                mantissa = (mantissa << 4) | v;
                if is_frac {
                    shift -= 4;
                }
            } else {
                // beyond 60 significant bits: keep a sticky bit for rounding
                sticky |= v != 0;
                if !is_frac {
                    shift += 4;
                }
            }
        }
    }
    if sticky {
        mantissa |= 1;
    }
    let mut value = mantissa as f64;
    let mut e = exp + shift;
    while e > 0 {
        let step = e.min(1000);
        value *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        value /= 2f64.powi(step as i32);
        e += step;
    }
    Some(if neg { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::Activation;

    fn small() -> NetGraph {
        let mut b = GraphBuilder::new(2);
        let a = b.push(&[(0, 0.1), (1, -3.0)], 0.3, Activation::Relu);
        let s = b.push(&[(a, 1.0 / 3.0), (0, 2.0)], 0.0, Activation::Square);
        let o = b.push(&[(s, -0.5), (a, 1e-300)], 1.0, Activation::Identity);
        b.finish(vec![o]).unwrap()
    }

    #[test]
    fn hex_examples() {
        assert_eq!(format_hex_f64(3.0), "0x1.8p+1");
        assert_eq!(format_hex_f64(1.0), "0x1p+0");
        assert_eq!(format_hex_f64(-0.0), "-0x0p+0");
        assert_eq!(parse_hex_f64("0x1.8p+1"), Some(3.0));
        assert_eq!(parse_hex_f64("-0x.8p0"), Some(-0.5));
        assert_eq!(parse_hex_f64("0x10"), Some(16.0));
        assert_eq!(parse_hex_f64("1.5"), None);
        for v in [0.1, -2.5e-310, f64::MAX, f64::MIN_POSITIVE, 1.0 / 3.0] {
            assert_eq!(parse_hex_f64(&format_hex_f64(v)).unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn round_trip_both_formats() {
        let g = small();
        for fmt in [WeightFormat::Decimal, WeightFormat::Hex] {
            let back = NetGraph::from_json(&g.to_json(fmt)).unwrap();
            assert_eq!(back, g);
        }
    }

    #[test]
    fn accepts_unsorted_listing() {
        let text = r#"{"input_arity":1,"nodes":[
            {"id":5,"activation":"identity","bias":0,"incoming":[[3,2.0]]},
            {"id":3,"activation":"relu","bias":"0x1p-1","incoming":[[0,1]]}],
            "output":5}"#;
        let g = NetGraph::from_json(text).unwrap();
        assert_eq!(g.eval(&[1.0]).unwrap(), 3.0);
    }

    #[test]
    fn rejects_cycles_and_garbage() {
        let cyclic = r#"{"input_arity":1,"nodes":[
            {"id":1,"activation":"relu","bias":0,"incoming":[[2,1.0]]},
            {"id":2,"activation":"relu","bias":0,"incoming":[[1,1.0]]}],
            "output":2}"#;
        let err = NetGraph::from_json(cyclic).unwrap_err().to_string();
        assert!(err.contains("acyclicity violated"), "{err}");

        let self_loop = r#"{"input_arity":1,"nodes":[
            {"id":1,"activation":"relu","bias":0,"incoming":[[1,1.0]]}],"output":1}"#;
        assert!(NetGraph::from_json(self_loop).unwrap_err().to_string().contains("acyclicity"));

        let err = NetGraph::from_json("{\"input_arity\": 1,\n \"nodes\": [}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");

        let bad_src = r#"{"input_arity":1,"nodes":[
            {"id":1,"activation":"relu","bias":0,"incoming":[[9,1.0]]}],"output":1}"#;
        assert!(NetGraph::from_json(bad_src).unwrap_err().to_string().contains("nodes[0]"));
    }

    proptest::proptest! {
        #[test]
        fn hex_round_trip(bits in proptest::num::u64::ANY) {
            let v = f64::from_bits(bits);
            proptest::prop_assume!(v.is_finite());
            proptest::prop_assert_eq!(parse_hex_f64(&format_hex_f64(v)).unwrap().to_bits(), bits);
        }
    }
}
