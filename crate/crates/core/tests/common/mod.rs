#![allow(dead_code)]

use tollnet::network::Violation;
use tollnet::{CellModel, Network, Topology};

pub fn exp_cells(caps: &[f64]) -> Vec<CellModel> {
    caps.iter().map(|&c| CellModel::exponential(c).unwrap()).collect()
}

/// Builds `v0 → v{n−1}` networks from raw `(tail, head)` pairs, dropping
/// self-loops and links that lie on no o-d path. `None` when the destination
/// is unreachable.
pub fn prune(n: usize, raw: &[(usize, usize)]) -> Option<Network> {
    let nodes: Vec<String> = (0..n).map(|v| format!("v{v}")).collect();
    let links: Vec<(String, String, String)> = raw
        .iter()
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(k, &(a, b))| (format!("e{k}"), nodes[a].clone(), nodes[b].clone()))
        .collect();
    let dest = nodes[n - 1].clone();
    let t = Topology::new(&nodes, &links, "v0", &dest).ok()?;
    let report = t.validate();
    let mut off = Vec::new();
    for v in &report.violations {
        match v {
            Violation::LinkOffAllPaths { link } => off.push(*link),
            _ => return None,
        }
    }
    let kept: Vec<_> = links
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !off.contains(i))
        .map(|(_, l)| l)
        .collect();
    Network::new(Topology::new(&nodes, &kept, "v0", &dest).ok()?).ok()
}

/// Minimum over all o-d cuts `S ∋ o, S ∌ d` of the capacity leaving `S`.
pub fn brute_force_min_cut(t: &Topology, caps: &[f64]) -> f64 {
    let n = t.num_nodes();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        let inside = |v: usize| mask & (1 << v) != 0;
        if !inside(t.origin()) || inside(t.destination()) {
            continue;
        }
        let cut: f64 = t
            .links()
            .iter()
            .zip(caps)
            .filter(|(l, _)| inside(l.tail) && !inside(l.head))
            .map(|(_, c)| c)
            .sum();
        best = best.min(cut);
    }
    best
}
