//! Quick invariant checks runnable from the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fdcheck::finite_diff_validate;
use crate::gadgets::{mult_gadget, tournament_product, ProductPlan};
use crate::index::{MultiIndex, SafetyCap};
use crate::netgraph::{pass_through, WeightFormat, NetGraph};
use crate::oracle::{builtin, catalog_names, Corrupted};
use crate::partition::{psi_network, psi_scalar, partition_sum_residual};
use crate::sampling::{max_deviation, Domain};
use crate::synthesis::{synthesize_sobolev, SynthesisOptions, COEFFICIENT_TOLERANCE};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn random_points(rng: &mut ChaCha8Rng, d: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..d).map(|_| rng.gen()).collect()).collect()
}

pub fn run(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let opts = SynthesisOptions { cap: SafetyCap::DEFAULT, share_factors: true };

    let mut worst: f64 = 0.0;
    for (n, d) in [(3, 1), (4, 2), (2, 3)] {
        let pts = random_points(&mut rng, d, 2000);
        worst = worst.max(partition_sum_residual(n, d, &pts));
    }
    out.push(check("partition sum is 1", worst <= 1e-12, format!("max residual {worst:e}")));

    let psi = psi_network();
    let mut dev: f64 = 0.0;
    for _ in 0..10_000 {
        let t = rng.gen_range(-4.0..4.0);
        dev = dev.max((psi.eval(&[t]).unwrap() - psi_scalar(t)).abs());
    }
    out.push(check("psi network equals psi", dev <= 1e-15, format!("max deviation {dev:e}")));

    let g = mult_gadget();
    let mut exact = true;
    for _ in 0..10_000 {
        // products of small integers are exact in binary
        let (x, y) = (rng.gen_range(-1000i32..1000) as f64, rng.gen_range(-1000i32..1000) as f64);
        exact &= g.eval(&[x, y]).unwrap() == x * y;
    }
    out.push(check("multiplication gadget exact on integers", exact, String::new()));

    let mut shapes = true;
    for k in 1..=16usize {
        let plan = ProductPlan::new(k).unwrap();
        let rounds = (k as f64).log2().ceil() as usize;
        let factors: Vec<NetGraph> = (0..k).map(|i| pass_through(k, i)).collect();
        let net = tournament_product(&factors).unwrap();
        shapes &= plan.gadget_count() == k - 1
            && plan.rounds().len() == rounds
            && net.complexity().depth == 1 + 2 * rounds as u64;
    }
    out.push(check("tournament gadgets k-1, rounds ceil(log2 k)", shapes, String::new()));

    let mut max_a: f64 = 0.0;
    let mut max_dev: f64 = 0.0;
    for (name, d, n) in [("sin", 2, 2), ("exp", 2, 3), ("ridge", 3, 2)] {
        let o = builtin(name, d, n).unwrap();
        let s = synthesize_sobolev(o.as_ref(), 0.2, n, opts).unwrap();
        max_a = max_a.max(s.table.max_abs());
        let dv = max_deviation(&s.network, &s.table.approximant(), &Domain::Cube(d), 2000, seed).unwrap();
        max_dev = max_dev.max(dv);
        let back = NetGraph::from_json(&s.network.to_json(WeightFormat::Hex)).unwrap();
        max_dev = max_dev.max(if back == s.network { 0.0 } else { f64::INFINITY });
    }
    out.push(check(
        "coefficients within unit bound",
        max_a <= 1.0 + COEFFICIENT_TOLERANCE,
        format!("max |a| {max_a}"),
    ));
    out.push(check(
        "network equals closed form, JSON round trip",
        max_dev <= 1e-10,
        format!("max deviation {max_dev:e}"),
    ));

    let mut fd_ok = true;
    let mut fd_checked = 0;
    for d in 1..=2 {
        let pts: Vec<Vec<f64>> = (0..4).map(|_| (0..d).map(|_| rng.gen_range(0.05..0.95)).collect()).collect();
        for name in catalog_names() {
            if let Ok(o) = builtin(name, d, 3) {
                let r = finite_diff_validate(o.as_ref(), 3, &pts, 1e-6);
                fd_ok &= r.passed();
                fd_checked += r.checked;
            }
        }
        let bad = Corrupted::new(builtin("exp", d, 3).unwrap(), MultiIndex::axis(d, 0, 2), 1e-3);
        fd_ok &= !finite_diff_validate(&bad, 3, &pts, 1e-6).passed();
    }
    out.push(check(
        "finite differences confirm derivatives",
        fd_ok,
        format!("{fd_checked} comparisons"),
    ));
    out
}
