//! Static equilibria: social optimum, generalized Wardrop equilibria and
//! logit-perturbed equilibria.
//!
//! The feasible set `{y = A z : z ∈ S_λ}` is handled in path space, where it
//! is a simplex. Social optimum and Wardrop problems are solved by a
//! pairwise conditional-gradient method: each iteration shifts mass from the
//! costliest used path to the cheapest path, with an exact line search on
//! the directional derivative. The Frank-Wolfe duality gap
//! `Σ z_γ c_γ − λ min c` certifies the result.

use std::io::Write;

use crate::cell::{CellModel, TollPolicy};
use crate::error::{CellError, EquilibriumError};
use crate::network::{max_flow, Network};
use crate::routing::{logit_from_path_costs, PathPreference};
use crate::simulator::fmt_f64;

/// Paths with `z_γ` at or below this fraction of `λ` count as unused.
pub const USED_PATH_TOL: f64 = 1e-9;

/// Steps stop this far (relative) short of capacity.
const BARRIER: f64 = 1e-12;

const LINE_SEARCH_ITERS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Certificate {
    DualityGap(f64),
    FixedPointResidual(f64),
}

impl Certificate {
    pub fn value(&self) -> f64 {
        match *self {
            Certificate::DualityGap(v) | Certificate::FixedPointResidual(v) => v,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::DualityGap(_) => "duality_gap",
            Certificate::FixedPointResidual(_) => "fixed_point_residual",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub y: Vec<f64>,
    pub z: PathPreference,
    pub objective: f64,
    pub certificate: Certificate,
    pub iterations: usize,
    /// Objective after each iteration, when requested.
    pub history: Vec<f64>,
}

impl EquilibriumResult {
    /// Writes `entity,id,value` rows: link flows, path preferences, tolls
    /// under `policy`, the objective, the certificate and the iteration count.
    pub fn write_csv<W: Write>(
        &self,
        out: &mut W,
        net: &Network,
        cells: &[CellModel],
        policy: &TollPolicy,
    ) -> Result<(), crate::error::Error> {
        let io = |source| crate::error::Error::Io {
            path: "<equilibrium csv>".into(),
            source,
        };
        let ids = net.topology().link_ids();
        let mut rows = vec![("entity".to_string(), "id".to_string(), "value".to_string())];
        for (id, y) in ids.iter().zip(&self.y) {
            rows.push(("flow".into(), id.to_string(), fmt_f64(*y)));
        }
        for (p, z) in self.z.values().iter().enumerate() {
            rows.push(("path".into(), p.to_string(), fmt_f64(*z)));
        }
        for (i, (id, y)) in ids.iter().zip(&self.y).enumerate() {
            let w = policy.toll(i, &cells[i], *y)?;
            rows.push(("toll".into(), id.to_string(), fmt_f64(w)));
        }
        rows.push(("objective".into(), String::new(), fmt_f64(self.objective)));
        rows.push(("certificate".into(), self.certificate.kind().into(), fmt_f64(self.certificate.value())));
        rows.push(("iterations".into(), String::new(), self.iterations.to_string()));
        for (e, id, v) in rows {
            writeln!(out, "{e},{id},{v}").map_err(io)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Stop once the duality gap drops below `gap_tol * λ`.
    pub gap_tol: f64,
    pub max_iterations: usize,
    pub record_history: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-9,
            max_iterations: 100_000,
            record_history: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointOptions {
    /// Stop once `‖z − F^β(z)‖₁ < residual_tol * λ`.
    pub residual_tol: f64,
    pub max_iterations: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            max_iterations: 1_000_000,
        }
    }
}

fn capacities(cells: &[CellModel]) -> Vec<f64> {
    cells.iter().map(|c| c.capacity()).collect()
}

fn check_inputs(net: &Network, cells: &[CellModel], lambda: f64) -> Result<(), EquilibriumError> {
    if cells.len() != net.num_links() {
        return Err(EquilibriumError::BadArgument(format!(
            "{} cells for {} links",
            cells.len(),
            net.num_links()
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(EquilibriumError::BadArgument(format!("throughput {lambda}")));
    }
    let min_cut = net.min_cut_capacity(&capacities(cells))?;
    if lambda >= min_cut {
        return Err(EquilibriumError::Infeasible { lambda, min_cut });
    }
    Ok(())
}

fn strictly_feasible(y: &[f64], cells: &[CellModel]) -> bool {
    y.iter()
        .zip(cells)
        .all(|(&v, c)| v < c.capacity() * (1.0 - BARRIER))
}

/// A path preference whose flow is strictly below capacity: the uniform
/// split when that works, otherwise a scaled path decomposition of a
/// maximum flow.
pub fn feasible_start(
    net: &Network,
    cells: &[CellModel],
    lambda: f64,
) -> Result<PathPreference, EquilibriumError> {
    let uniform = PathPreference::uniform(net.num_paths(), lambda);
    if strictly_feasible(&net.paths().link_flows(uniform.values()), cells) {
        return Ok(uniform);
    }
    let topo = net.topology();
    let mf = max_flow(topo, &capacities(cells))?;
    let mut residual = mf.link_flow.clone();
    let mut z = vec![0.0; net.num_paths()];
    let eps = 1e-14 * mf.value;
    loop {
        // DFS for a simple o-d path through links with remaining flow
        let mut stack = vec![(topo.origin(), Vec::<usize>::new())];
        let mut found = None;
        let mut visited = vec![false; topo.num_nodes()];
        while let Some((v, path)) = stack.pop() {
            if v == topo.destination() {
                found = Some(path);
                break;
            }
            if visited[v] {
                continue;
            }
            visited[v] = true;
            for &i in net.out_links(v) {
                let w = topo.links()[i].head;
                if residual[i] > eps && !visited[w] {
                    let mut p = path.clone();
                    p.push(i);
                    stack.push((w, p));
                }
            }
        }
        let Some(path) = found else { break };
        let amount = path.iter().map(|&i| residual[i]).fold(f64::INFINITY, f64::min);
        for &i in &path {
            residual[i] -= amount;
        }
        let idx = net
            .paths()
            .index_of(&path)
            .expect("decomposed path is a simple o-d path");
        z[idx] += amount;
    }
    let total: f64 = z.iter().sum();
    if total <= 0.0 {
        return Err(EquilibriumError::Infeasible {
            lambda,
            min_cut: mf.value,
        });
    }
    let z = z.into_iter().map(|v| v * lambda / total).collect();
    Ok(PathPreference::from_raw(z, lambda))
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}

/// Pairwise conditional gradient over the path simplex. `link_cost(i, y)` is
/// the derivative of the separable objective on link `i`.
fn conditional_gradient<C, O>(
    net: &Network,
    cells: &[CellModel],
    lambda: f64,
    link_cost: C,
    objective: O,
    opts: &SolverOptions,
) -> Result<EquilibriumResult, EquilibriumError>
where
    C: Fn(usize, f64) -> f64,
    O: Fn(&[f64]) -> Result<f64, CellError>,
{
    let paths = net.paths();
    let mut z = feasible_start(net, cells, lambda)?.into_values();
    let mut y = paths.link_flows(&z);
    let mut history = Vec::new();
    if opts.record_history {
        history.push(objective(&y)?);
    }
    let tol = opts.gap_tol * lambda;
    let mut iterations = 0;
    let mut gap;
    loop {
        let g: Vec<f64> = y.iter().enumerate().map(|(i, &v)| link_cost(i, v)).collect();
        let c = paths.path_sums(&g);
        let best = argmin(&c);
        gap = z.iter().zip(&c).map(|(zp, cp)| zp * (cp - c[best])).sum::<f64>();
        if gap < tol || lambda == 0.0 {
            break;
        }
        if iterations >= opts.max_iterations {
            return Err(EquilibriumError::NotConverged {
                iterations,
                achieved: gap,
            });
        }
        iterations += 1;

        let used_cut = USED_PATH_TOL * lambda;
        let away = (0..z.len())
            .filter(|&p| z[p] > 0.0)
            .max_by(|&a, &b| {
                // prefer paths carrying visible mass on ties
                c[a].total_cmp(&c[b]).then((z[a] > used_cut).cmp(&(z[b] > used_cut)))
            })
            .expect("simplex has mass");
        if away == best {
            break;
        }
        // direction in link space: +1 on the cheapest path, -1 on the away path
        let mut dy = vec![0.0; y.len()];
        for &i in &paths.paths()[best] {
            dy[i] += 1.0;
        }
        for &i in &paths.paths()[away] {
            dy[i] -= 1.0;
        }
        let mut t_max = z[away];
        for (i, &d) in dy.iter().enumerate() {
            if d > 0.0 {
                let room = cells[i].capacity() * (1.0 - BARRIER) - y[i];
                t_max = t_max.min(room / d);
            }
        }
        let slope = |t: f64| -> f64 {
            dy.iter()
                .enumerate()
                .filter(|(_, d)| **d != 0.0)
                .map(|(i, &d)| d * link_cost(i, (y[i] + t * d).max(0.0)))
                .sum()
        };
        let t = if slope(t_max) <= 0.0 {
            t_max
        } else {
            let (mut lo, mut hi) = (0.0, t_max);
            for _ in 0..LINE_SEARCH_ITERS {
                let mid = 0.5 * (lo + hi);
                if slope(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            lo
        };
        if t <= 0.0 {
            break;
        }
        z[best] += t;
        if t >= z[away] {
            z[away] = 0.0;
        } else {
            z[away] -= t;
        }
        y = paths.link_flows(&z);
        if opts.record_history {
            history.push(objective(&y)?);
        }
    }
    if gap >= tol && lambda > 0.0 {
        return Err(EquilibriumError::NotConverged {
            iterations,
            achieved: gap,
        });
    }
    let objective = objective(&y)?;
    Ok(EquilibriumResult {
        y,
        z: PathPreference::from_raw(z, lambda),
        objective,
        certificate: Certificate::DualityGap(gap.max(0.0)),
        iterations,
        history,
    })
}

/// `L(y) = Σ y_i τ_i(y_i)`, `+∞` when some link is at capacity.
pub fn total_latency(y: &[f64], cells: &[CellModel]) -> f64 {
    y.iter()
        .zip(cells)
        .map(|(&v, c)| if v == 0.0 { 0.0 } else { v * c.latency(v) })
        .sum()
}

/// Minimizer of total latency over equilibrium flows of throughput `λ`.
pub fn social_optimum(
    net: &Network,
    cells: &[CellModel],
    lambda: f64,
) -> Result<EquilibriumResult, EquilibriumError> {
    social_optimum_with(net, cells, lambda, &SolverOptions::default())
}

pub fn social_optimum_with(
    net: &Network,
    cells: &[CellModel],
    lambda: f64,
    opts: &SolverOptions,
) -> Result<EquilibriumResult, EquilibriumError> {
    check_inputs(net, cells, lambda)?;
    conditional_gradient(
        net,
        cells,
        lambda,
        |i, y| cells[i].marginal_latency(y),
        |y| Ok(total_latency(y, cells)),
        opts,
    )
}

/// Generalized Wardrop equilibrium under a decentralized monotone policy,
/// found as the minimizer of `Σ D_i(y_i)`.
pub fn wardrop(
    net: &Network,
    cells: &[CellModel],
    lambda: f64,
    policy: &TollPolicy,
) -> Result<EquilibriumResult, EquilibriumError> {
    wardrop_with(net, cells, lambda, policy, &SolverOptions::default())
}

pub fn wardrop_with(
    net: &Network,
    cells: &[CellModel],
    lambda: f64,
    policy: &TollPolicy,
    opts: &SolverOptions,
) -> Result<EquilibriumResult, EquilibriumError> {
    check_inputs(net, cells, lambda)?;
    policy.check(cells)?;
    conditional_gradient(
        net,
        cells,
        lambda,
        |i, y| policy.perceived_cost(i, &cells[i], y),
        |y| potential(y, cells, policy),
        opts,
    )
}

/// `Σ_i D_i(y_i)`.
pub fn potential(y: &[f64], cells: &[CellModel], policy: &TollPolicy) -> Result<f64, CellError> {
    let mut total = 0.0;
    for (i, (&v, c)) in y.iter().zip(cells).enumerate() {
        total += policy.primitive(i, c, v)?;
    }
    Ok(total)
}

/// `w*_i = y*_i τ_i'(y*_i)`.
pub fn constant_marginal_tolls(y_star: &[f64], cells: &[CellModel]) -> Result<Vec<f64>, CellError> {
    y_star
        .iter()
        .zip(cells)
        .map(|(&v, c)| Ok(v * c.latency_prime(v)?))
        .collect()
}

/// Largest excess cost of a used path over the cheapest path; zero certifies
/// the Wardrop condition.
pub fn wardrop_gap(
    net: &Network,
    y: &[f64],
    z: &PathPreference,
    cells: &[CellModel],
    policy: &TollPolicy,
) -> f64 {
    let g: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(i, &v)| policy.perceived_cost(i, &cells[i], v))
        .collect();
    let c = net.paths().path_sums(&g);
    let min = c.iter().cloned().fold(f64::INFINITY, f64::min);
    let cut = USED_PATH_TOL * z.lambda();
    z.values()
        .iter()
        .zip(&c)
        .filter(|(zp, _)| **zp > cut)
        .map(|(_, cp)| cp - min)
        .fold(0.0, f64::max)
}

/// `β⁻¹ Σ z log z` with `0 log 0 = 0`.
pub fn negative_entropy(z: &[f64], beta: f64) -> f64 {
    z.iter()
        .filter(|v| **v > 0.0)
        .map(|v| v * v.ln())
        .sum::<f64>()
        / beta
}

/// `Θ(z) + h(z)`, minimized by the perturbed equilibrium.
pub fn perturbed_objective(
    net: &Network,
    cells: &[CellModel],
    policy: &TollPolicy,
    beta: f64,
    z: &[f64],
) -> Result<f64, CellError> {
    let y = net.paths().link_flows(z);
    Ok(potential(&y, cells, policy)? + negative_entropy(z, beta))
}

fn logit_map(
    net: &Network,
    cells: &[CellModel],
    policy: &TollPolicy,
    beta: f64,
    z: &[f64],
    lambda: f64,
) -> Result<Vec<f64>, EquilibriumError> {
    let y = net.paths().link_flows(z);
    let g: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(i, &v)| policy.perceived_cost(i, &cells[i], v))
        .collect();
    Ok(logit_from_path_costs(&net.paths().path_sums(&g), beta, lambda)?)
}

/// Fixed point `z = F^β(τ(Az), ω(Az))`, found by damped iteration
/// `z ← (1 − α) z + α F^β` with `α = min(1, 1/β)`. The step is halved when
/// it would leave the feasible set or when the residual grows.
pub fn perturbed_equilibrium(
    net: &Network,
    cells: &[CellModel],
    lambda: f64,
    beta: f64,
    policy: &TollPolicy,
) -> Result<EquilibriumResult, EquilibriumError> {
    perturbed_equilibrium_with(net, cells, lambda, beta, policy, &FixedPointOptions::default())
}

pub fn perturbed_equilibrium_with(
    net: &Network,
    cells: &[CellModel],
    lambda: f64,
    beta: f64,
    policy: &TollPolicy,
    opts: &FixedPointOptions,
) -> Result<EquilibriumResult, EquilibriumError> {
    check_inputs(net, cells, lambda)?;
    policy.check(cells)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(EquilibriumError::BadArgument(format!("beta {beta}")));
    }
    let paths = net.paths();
    let mut z = feasible_start(net, cells, lambda)?.into_values();
    let mut alpha = (1.0 / beta).min(1.0);
    let tol = opts.residual_tol * lambda;
    let mut prev_residual = f64::INFINITY;
    let mut iterations = 0;
    let residual = loop {
        let f = logit_map(net, cells, policy, beta, &z, lambda)?;
        let r: f64 = z.iter().zip(&f).map(|(a, b)| (a - b).abs()).sum();
        if r < tol || lambda == 0.0 {
            break r;
        }
        if iterations >= opts.max_iterations {
            return Err(EquilibriumError::NotConverged {
                iterations,
                achieved: r,
            });
        }
        iterations += 1;
        if r > prev_residual {
            alpha *= 0.5;
        }
        prev_residual = r;
        let mut step = alpha;
        loop {
            let cand: Vec<f64> = z.iter().zip(&f).map(|(a, b)| a + step * (b - a)).collect();
            if strictly_feasible(&paths.link_flows(&cand), cells) {
                z = cand;
                break;
            }
            step *= 0.5;
            if step < 1e-300 {
                return Err(EquilibriumError::NotConverged {
                    iterations,
                    achieved: r,
                });
            }
        }
    };
    let y = paths.link_flows(&z);
    let objective = perturbed_objective(net, cells, policy, beta, &z)?;
    Ok(EquilibriumResult {
        y,
        z: PathPreference::from_raw(z, lambda),
        objective,
        certificate: Certificate::FixedPointResidual(residual),
        iterations,
        history: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{fig4_topology, Topology};

    fn fig4() -> (Network, Vec<CellModel>) {
        let net = Network::new(fig4_topology()).unwrap();
        let cells = (0..5).map(|_| CellModel::exponential(2.0).unwrap()).collect();
        (net, cells)
    }

    const Y_STAR: [f64; 5] = [0.5, 0.5, 0.0, 0.5, 0.5];

    fn linf(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn fig4_social_optimum() {
        let (net, cells) = fig4();
        let r = social_optimum(&net, &cells, 1.0).unwrap();
        assert!(linf(&r.y, &Y_STAR) < 1e-6, "{:?}", r.y);
        assert!(r.certificate.value() < 1e-9);
        assert!(matches!(r.certificate, Certificate::DualityGap(_)));
        assert!(linf(&r.y, &net.paths().link_flows(r.z.values())) < 1e-10);
    }

    #[test]
    fn single_link_and_parallel_links() {
        let t = Topology::new(&["o", "d"], &[("e", "o", "d")], "o", "d").unwrap();
        let net = Network::new(t).unwrap();
        let cells = vec![CellModel::exponential(1.0).unwrap()];
        let r = social_optimum(&net, &cells, 0.7).unwrap();
        assert!((r.y[0] - 0.7).abs() < 1e-12);
        let w = wardrop(&net, &cells, 0.7, &TollPolicy::Zero).unwrap();
        assert!((w.y[0] - 0.7).abs() < 1e-12);
        assert_eq!(wardrop_gap(&net, &w.y, &w.z, &cells, &TollPolicy::Zero), 0.0);

        let t = Topology::new(&["o", "d"], &[("a", "o", "d"), ("b", "o", "d")], "o", "d").unwrap();
        let net = Network::new(t).unwrap();
        let cells = vec![CellModel::exponential(1.5).unwrap(); 2];
        let r = social_optimum(&net, &cells, 1.2).unwrap();
        assert!(linf(&r.y, &[0.6, 0.6]) < 1e-9);
    }

    #[test]
    fn infeasible_throughput_rejected() {
        let (net, cells) = fig4();
        assert!(matches!(
            social_optimum(&net, &cells, 4.0),
            Err(EquilibriumError::Infeasible { .. })
        ));
    }

    #[test]
    fn start_point_near_min_cut() {
        // uniform split overloads the narrow path
        let t = Topology::new(&["o", "d"], &[("a", "o", "d"), ("b", "o", "d")], "o", "d").unwrap();
        let net = Network::new(t).unwrap();
        let cells = vec![
            CellModel::exponential(0.1).unwrap(),
            CellModel::exponential(3.0).unwrap(),
        ];
        let z0 = feasible_start(&net, &cells, 2.9).unwrap();
        let y0 = net.paths().link_flows(z0.values());
        assert!(y0[0] < 0.1 && y0[1] < 3.0);
        assert!((z0.values().iter().sum::<f64>() - 2.9).abs() < 1e-12);
        let r = social_optimum(&net, &cells, 2.9).unwrap();
        assert!(r.y[0] < 0.1 && r.y[1] < 3.0);
    }

    #[test]
    fn objective_history_nonincreasing() {
        let (net, cells) = fig4();
        let opts = SolverOptions {
            record_history: true,
            ..Default::default()
        };
        let r = social_optimum_with(&net, &cells, 1.0, &opts).unwrap();
        for w in r.history.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
        let r = wardrop_with(&net, &cells, 1.0, &TollPolicy::Zero, &opts).unwrap();
        for w in r.history.windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
    }

    #[test]
    fn fig4_wardrop_variants() {
        let (net, cells) = fig4();
        let so = social_optimum(&net, &cells, 1.0).unwrap();
        let fb = wardrop(&net, &cells, 1.0, &TollPolicy::FeedbackMarginal).unwrap();
        assert!(linf(&fb.y, &so.y) < 1e-6);
        let zero = wardrop(&net, &cells, 1.0, &TollPolicy::Zero).unwrap();
        assert!(linf(&zero.y, &Y_STAR) < 1e-6);
        // the unused path is strictly costlier at the candidate
        let z = PathPreference::new(vec![0.5, 0.5, 0.0], 1.0).unwrap();
        assert_eq!(wardrop_gap(&net, &Y_STAR, &z, &cells, &TollPolicy::Zero), 0.0);
        let w_star = constant_marginal_tolls(&so.y, &cells).unwrap();
        let constant = TollPolicy::Constant(w_star);
        let cst = wardrop(&net, &cells, 1.0, &constant).unwrap();
        assert!(linf(&cst.y, &so.y) < 1e-6);
        assert!(wardrop_gap(&net, &zero.y, &zero.z, &cells, &TollPolicy::Zero) < 1e-6);
        assert!(wardrop_gap(&net, &cst.y, &cst.z, &cells, &constant) < 1e-6);
        assert!(wardrop_gap(&net, &fb.y, &fb.z, &cells, &TollPolicy::FeedbackMarginal) < 1e-6);
    }

    #[test]
    fn constant_tolls_examples() {
        let (_, cells) = fig4();
        assert_eq!(constant_marginal_tolls(&[0.0; 5], &cells).unwrap(), vec![0.0; 5]);
        let w = constant_marginal_tolls(&Y_STAR, &cells).unwrap();
        let tp = cells[0].latency_prime(0.5).unwrap();
        for (i, v) in w.iter().enumerate() {
            let expect = if i == 2 { 0.0 } else { 0.5 * tp };
            assert_eq!(*v, expect);
            assert_eq!(*v, TollPolicy::FeedbackMarginal.toll(i, &cells[i], Y_STAR[i]).unwrap());
        }
        assert!(constant_marginal_tolls(&[2.0, 0.0, 0.0, 0.0, 0.0], &cells).is_err());
    }

    #[test]
    fn wardrop_gap_costlier_path() {
        let (net, cells) = fig4();
        // all mass on (i1, i3, i5), strictly costlier than the others
        let z = PathPreference::new(vec![0.0, 0.0, 1.0], 1.0).unwrap();
        let y = net.paths().link_flows(z.values());
        let g: Vec<f64> = y.iter().zip(&cells).map(|(&v, c)| c.latency(v)).collect();
        let c = net.paths().path_sums(&g);
        let expect = c[2] - c[0].min(c[1]);
        let gap = wardrop_gap(&net, &y, &z, &cells, &TollPolicy::Zero);
        assert!(expect > 0.0);
        assert!((gap - expect).abs() < 1e-15);
    }

    #[test]
    fn perturbed_small_beta_is_nearly_uniform() {
        let (net, cells) = fig4();
        let r = perturbed_equilibrium(&net, &cells, 1.0, 1e-6, &TollPolicy::FeedbackMarginal).unwrap();
        for v in r.z.values() {
            assert!((v - 1.0 / 3.0).abs() < 1e-5);
        }
    }

    #[test]
    fn perturbed_fixed_point_and_minimizer() {
        use rand::{Rng, SeedableRng};
        let (net, cells) = fig4();
        let policy = TollPolicy::FeedbackMarginal;
        let beta = 5.0;
        let r = perturbed_equilibrium(&net, &cells, 1.0, beta, &policy).unwrap();
        assert!(r.certificate.value() < 1e-10);
        let f = logit_map(&net, &cells, &policy, beta, r.z.values(), 1.0).unwrap();
        let res: f64 = f.iter().zip(r.z.values()).map(|(a, b)| (a - b).abs()).sum();
        assert!(res < 1e-10);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let raw: Vec<f64> = (0..3).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            let z: Vec<f64> = raw.iter().map(|v| v / s).collect();
            let obj = perturbed_objective(&net, &cells, &policy, beta, &z).unwrap();
            assert!(r.objective <= obj + 1e-12);
        }
    }
}
