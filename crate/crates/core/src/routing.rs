//! Path preferences, node-local routing splits, the fast-scale drift and
//! the logit perturbed best response.

use crate::cell::{CellModel, TollPolicy};
use crate::error::{CellError, RoutingError};
use crate::network::{Network, PathSet};

const SIMPLEX_TOL: f64 = 1e-9;

/// Relative threshold below which a node carries no flow and splits uniformly.
const SPLIT_ZERO_TOL: f64 = 1e-14;

/// A point `z` on the simplex `{z ≥ 0, Σ z = λ}` over o-d paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPreference {
    z: Vec<f64>,
    lambda: f64,
}

impl PathPreference {
    pub fn new(z: Vec<f64>, lambda: f64) -> Result<Self, RoutingError> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(RoutingError::OffSimplex(format!("bad throughput {lambda}")));
        }
        if let Some((i, v)) = z.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return Err(RoutingError::OffSimplex(format!("entry {i} is {v}")));
        }
        let sum: f64 = z.iter().sum();
        if (sum - lambda).abs() > SIMPLEX_TOL * lambda.max(1.0) {
            return Err(RoutingError::OffSimplex(format!(
                "entries sum to {sum}, expected {lambda}"
            )));
        }
        Ok(Self { z, lambda })
    }

    /// Skips validation; used by integrators whose steps preserve the sum.
    pub(crate) fn from_raw(z: Vec<f64>, lambda: f64) -> Self {
        Self { z, lambda }
    }

    pub fn uniform(num_paths: usize, lambda: f64) -> Self {
        Self {
            z: vec![lambda / num_paths as f64; num_paths],
            lambda,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.z
    }
}

/// Current per-link latencies `l` and tolls `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector {
    pub latency: Vec<f64>,
    pub toll: Vec<f64>,
}

impl CostVector {
    /// Evaluates `l = τ(y)` and `w = ω(y)` link by link.
    pub fn evaluate(y: &[f64], cells: &[CellModel], policy: &TollPolicy) -> Result<Self, CellError> {
        let latency = y.iter().zip(cells).map(|(&v, c)| c.latency(v)).collect();
        let toll = y
            .iter()
            .zip(cells)
            .enumerate()
            .map(|(i, (&v, c))| policy.toll(i, c, v))
            .collect::<Result<_, _>>()?;
        Ok(Self { latency, toll })
    }

    /// `l + w`.
    pub fn perceived(&self) -> Vec<f64> {
        self.latency.iter().zip(&self.toll).map(|(l, w)| l + w).collect()
    }
}

/// `A'(l + w)`.
pub fn path_costs(costs: &CostVector, paths: &PathSet) -> Vec<f64> {
    paths.path_sums(&costs.perceived())
}

/// Logit response to per-path costs:
/// `λ exp(−β c_γ) / Σ exp(−β c_γ')`, evaluated after shifting by `min c`.
pub fn logit_from_path_costs(
    costs: &[f64],
    beta: f64,
    lambda: f64,
) -> Result<Vec<f64>, RoutingError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(RoutingError::BadBeta(beta));
    }
    if let Some(path) = costs.iter().position(|c| !c.is_finite()) {
        return Err(RoutingError::NonFiniteCost { path });
    }
    let min = costs.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = costs.iter().map(|c| (-beta * (c - min)).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| lambda * w / total).collect())
}

/// `F^β(l, w)`.
pub fn logit_response(
    costs: &CostVector,
    paths: &PathSet,
    beta: f64,
    lambda: f64,
) -> Result<PathPreference, RoutingError> {
    let z = logit_from_path_costs(&path_costs(costs, paths), beta, lambda)?;
    Ok(PathPreference::from_raw(z, lambda))
}

/// Node-local split fractions `G(z)`: at each node, outgoing links share
/// the flow in proportion to `y^z`, or uniformly when `y^z` carries nothing
/// through the node.
pub fn local_splits(z: &PathPreference, net: &Network) -> Vec<f64> {
    let y = net.paths().link_flows(z.values());
    splits_from_flows(&y, net, z.lambda())
}

pub(crate) fn splits_from_flows(y_z: &[f64], net: &Network, lambda: f64) -> Vec<f64> {
    let topo = net.topology();
    let mut g = vec![0.0; y_z.len()];
    for v in 0..topo.num_nodes() {
        let out = net.out_links(v);
        if out.is_empty() {
            continue;
        }
        let denom: f64 = out.iter().map(|&i| y_z[i]).sum();
        if denom > SPLIT_ZERO_TOL * lambda {
            for &i in out {
                g[i] = y_z[i] / denom;
            }
        } else {
            let u = 1.0 / out.len() as f64;
            for &i in out {
                g[i] = u;
            }
        }
    }
    g
}

/// Fast-scale drift `H_i(y, z) = G_i(z) (λ [θ_i = o] + Σ_{κ_j = θ_i} y_j) − y_i`.
pub fn drift(y: &[f64], z: &PathPreference, net: &Network) -> Vec<f64> {
    drift_with_splits(y, &local_splits(z, net), net, z.lambda())
}

pub fn drift_with_splits(y: &[f64], splits: &[f64], net: &Network, lambda: f64) -> Vec<f64> {
    let topo = net.topology();
    topo.links()
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let mut inflow: f64 = net.in_links(l.tail).iter().map(|&j| y[j]).sum();
            if l.tail == topo.origin() {
                inflow += lambda;
            }
            splits[i] * inflow - y[i]
        })
        .collect()
}
