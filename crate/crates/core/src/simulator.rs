//! Fixed-step integration of the coupled density / path-preference dynamics
//!
//! ```text
//! ẋ = H(φ(x), z)
//! ż = η (F^β(l(t − φ), w(t − φ)) − z)
//! ```
//!
//! with classical fourth-order Runge-Kutta. Information delay is handled on
//! the step grid: the delay is rounded to a whole number of steps, costs are
//! stored once per step, and the delayed cost is held constant across the
//! four stages of a step.

use std::collections::VecDeque;
use std::io::{self, Write};

use crate::cell::{CellModel, TollPolicy};
use crate::equilibrium::total_latency;
use crate::error::SimError;
use crate::network::Network;
use crate::routing::{drift_with_splits, logit_response, splits_from_flows, CostVector, PathPreference};

#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Preference update rate.
    pub eta: f64,
    /// Logit inverse noise.
    pub beta: f64,
    /// Exogenous inflow at the origin.
    pub lambda: f64,
    pub dt: f64,
    pub horizon: f64,
    /// Information delay; rounded to a multiple of `dt`.
    pub delay: f64,
    pub toll_policy: TollPolicy,
    pub record_every: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            eta: 0.1,
            beta: 5.0,
            lambda: 1.0,
            dt: 0.01,
            horizon: 350.0,
            delay: 0.0,
            toll_policy: TollPolicy::FeedbackMarginal,
            record_every: 10,
        }
    }
}

impl SimConfig {
    pub fn num_steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn delay_steps(&self) -> usize {
        (self.delay / self.dt).round() as usize
    }

    fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::BadConfig(m.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad("horizon must be positive");
        }
        if !(self.delay >= 0.0 && self.delay.is_finite()) {
            return bad("delay must be nonnegative");
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return bad("eta must be nonnegative");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be positive");
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be nonnegative");
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub x: Vec<f64>,
    pub z: PathPreference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub t: f64,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub latency: Vec<f64>,
    pub toll: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub records: Vec<Record>,
    /// Number of density components reset to zero after a step.
    pub clamp_events: usize,
    /// Smallest density component seen before clamping.
    pub min_density: f64,
    /// Largest `|Σ z − λ|` over the run.
    pub max_simplex_drift: f64,
}

/// Past per-step costs, looked up `lag` steps back; before enough history
/// exists the first sample is returned.
#[derive(Debug, Clone)]
pub struct DelayBuffer {
    lag: usize,
    samples: VecDeque<CostVector>,
}

impl DelayBuffer {
    pub fn new(lag: usize) -> Self {
        Self {
            lag,
            samples: VecDeque::with_capacity(lag + 1),
        }
    }

    pub fn push(&mut self, sample: CostVector) {
        if self.samples.len() == self.lag + 1 {
            self.samples.pop_front();
        }
        self.samples.push_back(sample);
    }

    /// The sample `lag` steps before the most recent push.
    pub fn delayed(&self) -> Option<&CostVector> {
        self.samples.front()
    }
}

/// Integrator bound to one network, its cells and a configuration.
pub struct Simulator<'a> {
    net: &'a Network,
    cells: &'a [CellModel],
    cfg: &'a SimConfig,
}

impl<'a> Simulator<'a> {
    pub fn new(net: &'a Network, cells: &'a [CellModel], cfg: &'a SimConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        if cells.len() != net.num_links() {
            return Err(SimError::BadConfig(format!(
                "{} cells for {} links",
                cells.len(),
                net.num_links()
            )));
        }
        cfg.toll_policy.check(cells)?;
        let caps: Vec<f64> = cells.iter().map(|c| c.capacity()).collect();
        let min_cut = net
            .min_cut_capacity(&caps)
            .map_err(|e| SimError::BadConfig(e.to_string()))?;
        if cfg.lambda >= min_cut {
            return Err(SimError::Infeasible {
                lambda: cfg.lambda,
                min_cut,
            });
        }
        Ok(Self { net, cells, cfg })
    }

    fn flows(&self, x: &[f64], t: f64) -> Result<Vec<f64>, SimError> {
        let mut y = Vec::with_capacity(x.len());
        for (i, (&xi, c)) in x.iter().zip(self.cells).enumerate() {
            let v = c.phi(xi.max(0.0));
            if v >= c.capacity() {
                return Err(SimError::CapacityReached { link: i, t });
            }
            y.push(v);
        }
        Ok(y)
    }

    pub fn costs(&self, x: &[f64], t: f64) -> Result<CostVector, SimError> {
        let y = self.flows(x, t)?;
        Ok(CostVector::evaluate(&y, self.cells, &self.cfg.toll_policy)?)
    }

    /// Time derivatives `(ẋ, ż)`. With `delayed = None` the route choice sees
    /// current costs.
    pub fn rhs(
        &self,
        state: &SimState,
        delayed: Option<&CostVector>,
    ) -> Result<(Vec<f64>, Vec<f64>), SimError> {
        let lambda = self.cfg.lambda;
        let y = self.flows(&state.x, state.t)?;
        let y_z = self.net.paths().link_flows(state.z.values());
        let splits = splits_from_flows(&y_z, self.net, lambda);
        let dx = drift_with_splits(&y, &splits, self.net, lambda);
        let dz = if self.cfg.eta == 0.0 {
            vec![0.0; state.z.len()]
        } else {
            let current;
            let costs = match delayed {
                Some(c) => c,
                None => {
                    current = CostVector::evaluate(&y, self.cells, &self.cfg.toll_policy)?;
                    &current
                }
            };
            let f = logit_response(costs, self.net.paths(), self.cfg.beta, lambda)?;
            f.values()
                .iter()
                .zip(state.z.values())
                .map(|(fv, zv)| self.cfg.eta * (fv - zv))
                .collect()
        };
        if let Some(v) = dx.iter().chain(&dz).find(|v| !v.is_finite()) {
            return Err(SimError::NonFinite {
                t: state.t,
                detail: format!("derivative component {v}"),
            });
        }
        Ok((dx, dz))
    }

    fn record(&self, state: &SimState) -> Result<Record, SimError> {
        let y = self.flows(&state.x, state.t)?;
        let costs = CostVector::evaluate(&y, self.cells, &self.cfg.toll_policy)?;
        Ok(Record {
            t: state.t,
            x: state.x.clone(),
            z: state.z.values().to_vec(),
            y,
            latency: costs.latency,
            toll: costs.toll,
        })
    }

    fn check_initial(&self, init: &SimState) -> Result<(), SimError> {
        if init.x.len() != self.net.num_links() || init.z.len() != self.net.num_paths() {
            return Err(SimError::BadConfig("initial state has wrong dimensions".into()));
        }
        if init.x.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(SimError::BadConfig("initial densities must be finite and nonnegative".into()));
        }
        if (init.z.lambda() - self.cfg.lambda).abs() > 1e-9 * self.cfg.lambda.max(1.0) {
            return Err(SimError::BadConfig(format!(
                "initial preference has throughput {}, configuration {}",
                init.z.lambda(),
                self.cfg.lambda
            )));
        }
        Ok(())
    }

    pub fn simulate(&self, init: &SimState) -> Result<Trajectory, SimError> {
        self.check_initial(init)?;
        let cfg = self.cfg;
        let dt = cfg.dt;
        let steps = cfg.num_steps();
        let lag = cfg.delay_steps();
        let lambda = cfg.lambda;
        let t0 = init.t;

        let mut state = SimState {
            t: t0,
            x: init.x.clone(),
            z: PathPreference::from_raw(init.z.values().to_vec(), lambda),
        };
        let mut traj = Trajectory {
            min_density: state.x.iter().cloned().fold(f64::INFINITY, f64::min),
            ..Default::default()
        };
        let mut buffer = DelayBuffer::new(lag);
        traj.records.push(self.record(&state)?);

        for n in 0..steps {
            let delayed = if lag > 0 {
                buffer.push(self.costs(&state.x, state.t)?);
                buffer.delayed().cloned()
            } else {
                None
            };
            let d = delayed.as_ref();
            let stage = |s: &SimState, k: &(Vec<f64>, Vec<f64>), h: f64| SimState {
                t: s.t + h,
                x: s.x.iter().zip(&k.0).map(|(a, b)| a + h * b).collect(),
                z: PathPreference::from_raw(
                    s.z.values().iter().zip(&k.1).map(|(a, b)| a + h * b).collect(),
                    lambda,
                ),
            };
            let k1 = self.rhs(&state, d)?;
            let k2 = self.rhs(&stage(&state, &k1, 0.5 * dt), d)?;
            let k3 = self.rhs(&stage(&state, &k2, 0.5 * dt), d)?;
            let k4 = self.rhs(&stage(&state, &k3, dt), d)?;
            let combine = |s: &[f64], a: &[f64], b: &[f64], c: &[f64], e: &[f64]| -> Vec<f64> {
                (0..s.len())
                    .map(|i| s[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + e[i]))
                    .collect()
            };
            let mut x = combine(&state.x, &k1.0, &k2.0, &k3.0, &k4.0);
            let z = combine(state.z.values(), &k1.1, &k2.1, &k3.1, &k4.1);
            let t = t0 + (n + 1) as f64 * dt;
            if let Some(v) = x.iter().chain(&z).find(|v| !v.is_finite()) {
                return Err(SimError::NonFinite {
                    t,
                    detail: format!("state component {v}"),
                });
            }
            for v in x.iter_mut() {
                traj.min_density = traj.min_density.min(*v);
                if *v < 0.0 {
                    *v = 0.0;
                    traj.clamp_events += 1;
                }
            }
            let drift = (z.iter().sum::<f64>() - lambda).abs();
            traj.max_simplex_drift = traj.max_simplex_drift.max(drift);
            state = SimState {
                t,
                x,
                z: PathPreference::from_raw(z, lambda),
            };
            // asserts feasibility every step
            self.flows(&state.x, t)?;
            if (n + 1) % cfg.record_every == 0 || n + 1 == steps {
                traj.records.push(self.record(&state)?);
            }
        }
        Ok(traj)
    }
}

/// Convenience wrapper around [`Simulator`].
pub fn simulate(
    net: &Network,
    cells: &[CellModel],
    cfg: &SimConfig,
    init: &SimState,
) -> Result<Trajectory, SimError> {
    Simulator::new(net, cells, cfg)?.simulate(init)
}

/// `V = ‖y − y^z‖₁` and `W = ‖x − x^z‖₁` with `x^z = φ⁻¹(y^z)`; `W` is `+∞`
/// when `y^z` is not strictly feasible.
pub fn lyapunov_diagnostics(net: &Network, cells: &[CellModel], state: &SimState) -> (f64, f64) {
    let y_z = net.paths().link_flows(state.z.values());
    let mut v = 0.0;
    let mut w = 0.0;
    for ((&xi, &yz), c) in state.x.iter().zip(&y_z).zip(cells) {
        v += (c.phi(xi) - yz).abs();
        if yz >= c.capacity() {
            w = f64::INFINITY;
        } else {
            w += (xi - c.phi_inv(yz)).abs();
        }
    }
    (v, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    Converged,
    Oscillating,
}

impl Convergence {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convergence::Converged => "converged",
            Convergence::Oscillating => "oscillating",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub class: Convergence,
    /// Peak-to-peak of `‖y(t) − ȳ‖₁` over the tail window.
    pub amplitude: f64,
}

pub const DEFAULT_TAIL_FRACTION: f64 = 0.2;
pub const DEFAULT_AMPLITUDE_THRESHOLD: f64 = 1e-2;

/// Classifies the trailing `tail_fraction` of a run: converged when the
/// peak-to-peak amplitude of `‖y(t) − ȳ‖₁` stays below `amp_threshold`.
pub fn classify_convergence(
    traj: &Trajectory,
    tail_fraction: f64,
    amp_threshold: f64,
) -> ConvergenceReport {
    let recs = &traj.records;
    let amplitude = if recs.len() < 2 {
        0.0
    } else {
        let t_end = recs[recs.len() - 1].t;
        let t_start = t_end - tail_fraction * (t_end - recs[0].t);
        let tail: Vec<&Record> = recs.iter().filter(|r| r.t >= t_start).collect();
        let m = tail[0].y.len();
        let mean: Vec<f64> = (0..m)
            .map(|i| tail.iter().map(|r| r.y[i]).sum::<f64>() / tail.len() as f64)
            .collect();
        let dev: Vec<f64> = tail.iter().map(|r| l1(&r.y, &mean)).collect();
        let hi = dev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = dev.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    };
    let class = if amplitude < amp_threshold {
        Convergence::Converged
    } else {
        Convergence::Oscillating
    };
    ConvergenceReport { class, amplitude }
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistancePoint {
    pub t: f64,
    pub l1: f64,
    pub total_latency: f64,
}

/// `‖y(t) − reference‖₁` and `L(y(t))` per recorded sample.
pub fn distance_series(traj: &Trajectory, reference: &[f64], cells: &[CellModel]) -> Vec<DistancePoint> {
    traj.records
        .iter()
        .map(|r| DistancePoint {
            t: r.t,
            l1: l1(&r.y, reference),
            total_latency: total_latency(&r.y, cells),
        })
        .collect()
}

/// Formats a value with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl Trajectory {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }

    /// Writes the trajectory as CSV with columns
    /// `t, x_<link>…, z_<path>…, y_<link>…, w_<link>…, l1_dist, total_latency`.
    pub fn write_csv<W: Write>(
        &self,
        out: &mut W,
        net: &Network,
        cells: &[CellModel],
        reference: &[f64],
    ) -> io::Result<()> {
        let ids = net.topology().link_ids();
        let mut header = vec!["t".to_string()];
        header.extend(ids.iter().map(|id| format!("x_{id}")));
        header.extend((0..net.num_paths()).map(|p| format!("z_{p}")));
        header.extend(ids.iter().map(|id| format!("y_{id}")));
        header.extend(ids.iter().map(|id| format!("w_{id}")));
        header.push("l1_dist".into());
        header.push("total_latency".into());
        writeln!(out, "{}", header.join(","))?;
        for r in &self.records {
            let mut row = vec![fmt_f64(r.t)];
            row.extend(r.x.iter().map(|v| fmt_f64(*v)));
            row.extend(r.z.iter().map(|v| fmt_f64(*v)));
            row.extend(r.y.iter().map(|v| fmt_f64(*v)));
            row.extend(r.toll.iter().map(|v| fmt_f64(*v)));
            row.push(fmt_f64(l1(&r.y, reference)));
            row.push(fmt_f64(total_latency(&r.y, cells)));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
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

    fn fig4_init() -> SimState {
        SimState {
            t: 0.0,
            x: vec![4.0, 2.0, 3.0, 1.0, 5.0],
            z: PathPreference::new(vec![0.5, 1.0 / 6.0, 1.0 / 3.0], 1.0).unwrap(),
        }
    }

    #[test]
    fn delay_buffer_lookup() {
        let c = |v: f64| CostVector {
            latency: vec![v],
            toll: vec![0.0],
        };
        let mut b = DelayBuffer::new(2);
        assert!(b.delayed().is_none());
        b.push(c(0.0));
        assert_eq!(b.delayed().unwrap().latency[0], 0.0);
        b.push(c(1.0));
        assert_eq!(b.delayed().unwrap().latency[0], 0.0);
        b.push(c(2.0));
        assert_eq!(b.delayed().unwrap().latency[0], 0.0);
        b.push(c(3.0));
        assert_eq!(b.delayed().unwrap().latency[0], 1.0);
        let mut b0 = DelayBuffer::new(0);
        b0.push(c(5.0));
        b0.push(c(6.0));
        assert_eq!(b0.delayed().unwrap().latency[0], 6.0);
    }

    #[test]
    fn fixed_point_of_fast_dynamics() {
        let (net, cells) = fig4();
        let cfg = SimConfig::default();
        let sim = Simulator::new(&net, &cells, &cfg).unwrap();
        let z = PathPreference::new(vec![0.3, 0.3, 0.4], 1.0).unwrap();
        let y_z = net.paths().link_flows(z.values());
        let x: Vec<f64> = y_z.iter().zip(&cells).map(|(&y, c)| c.phi_inv(y)).collect();
        let state = SimState { t: 0.0, x, z };
        let (dx, dz) = sim.rhs(&state, None).unwrap();
        assert!(dx.iter().all(|v| v.abs() < 1e-12), "{dx:?}");
        assert!(dz.iter().sum::<f64>().abs() < 1e-15);
        let (v, w) = lyapunov_diagnostics(&net, &cells, &state);
        assert!(v < 1e-12 && w < 1e-12);
    }

    #[test]
    fn zero_eta_freezes_preferences() {
        let (net, cells) = fig4();
        let cfg = SimConfig {
            eta: 0.0,
            ..Default::default()
        };
        let sim = Simulator::new(&net, &cells, &cfg).unwrap();
        let (_, dz) = sim.rhs(&fig4_init(), None).unwrap();
        assert!(dz.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn tangent_to_simplex() {
        use rand::{Rng, SeedableRng};
        let (net, cells) = fig4();
        let cfg = SimConfig::default();
        let sim = Simulator::new(&net, &cells, &cfg).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let raw: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let s: f64 = raw.iter().sum();
            let z = PathPreference::new(raw.iter().map(|v| v / s).collect(), 1.0).unwrap();
            let x = (0..5).map(|_| rng.gen::<f64>() * 4.0).collect();
            let (_, dz) = sim.rhs(&SimState { t: 0.0, x, z }, None).unwrap();
            assert!(dz.iter().sum::<f64>().abs() < 1e-15);
        }
    }

    #[test]
    fn infeasible_and_bad_config() {
        let (net, cells) = fig4();
        let cfg = SimConfig {
            lambda: 4.0,
            ..Default::default()
        };
        let err = Simulator::new(&net, &cells, &cfg).err().unwrap();
        assert!(matches!(err, SimError::Infeasible { .. }));
        assert!(err.to_string().contains("not covered"));
        let cfg = SimConfig {
            dt: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            Simulator::new(&net, &cells, &cfg),
            Err(SimError::BadConfig(_))
        ));
    }

    #[test]
    fn no_inflow_drains() {
        let (net, cells) = fig4();
        let cfg = SimConfig {
            lambda: 0.0,
            horizon: 60.0,
            ..Default::default()
        };
        let init = SimState {
            t: 0.0,
            x: vec![4.0, 2.0, 3.0, 1.0, 5.0],
            z: PathPreference::new(vec![0.0; 3], 0.0).unwrap(),
        };
        let traj = simulate(&net, &cells, &cfg, &init).unwrap();
        let last = traj.last().unwrap();
        assert!(last.y.iter().all(|v| *v < 1e-6), "{:?}", last.y);
        assert_eq!(traj.clamp_events, 0);
    }

    #[test]
    fn frozen_preferences_contract() {
        let (net, cells) = fig4();
        let cfg = SimConfig {
            eta: 0.0,
            horizon: 60.0,
            record_every: 1,
            ..Default::default()
        };
        let init = fig4_init();
        let traj = simulate(&net, &cells, &cfg, &init).unwrap();
        let mut prev = f64::INFINITY;
        for r in &traj.records {
            let s = SimState {
                t: r.t,
                x: r.x.clone(),
                z: init.z.clone(),
            };
            let (_, w) = lyapunov_diagnostics(&net, &cells, &s);
            assert!(w <= prev + 1e-12, "W rose at t={}", r.t);
            prev = w;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn classification_of_synthetic_series() {
        let mk = |f: &dyn Fn(f64) -> f64| Trajectory {
            records: (0..1000)
                .map(|k| {
                    let t = k as f64 * 0.5;
                    Record {
                        t,
                        x: vec![],
                        z: vec![],
                        y: vec![f(t)],
                        latency: vec![],
                        toll: vec![],
                    }
                })
                .collect(),
            ..Default::default()
        };
        let flat = classify_convergence(&mk(&|_| 0.5), 0.2, 1e-2);
        assert_eq!(flat.class, Convergence::Converged);
        assert_eq!(flat.amplitude, 0.0);
        let wave = classify_convergence(&mk(&|t| 0.5 + 0.1 * (0.3 * t).sin()), 0.2, 1e-2);
        assert_eq!(wave.class, Convergence::Oscillating);
    }

    #[test]
    fn distance_to_own_final_state() {
        let (net, cells) = fig4();
        let cfg = SimConfig {
            horizon: 5.0,
            ..Default::default()
        };
        let traj = simulate(&net, &cells, &cfg, &fig4_init()).unwrap();
        let reference = traj.last().unwrap().y.clone();
        let series = distance_series(&traj, &reference, &cells);
        assert_eq!(series.last().unwrap().l1, 0.0);
        assert!(series.windows(2).all(|w| w[1].t > w[0].t));
        assert_eq!(total_latency(&[2.0, 0.0, 0.0, 0.0, 0.0], &cells), f64::INFINITY);
    }

    #[test]
    fn csv_layout() {
        let t = Topology::new(&["o", "d"], &[("e", "o", "d")], "o", "d").unwrap();
        let net = Network::new(t).unwrap();
        let cells = vec![CellModel::exponential(1.0).unwrap()];
        let cfg = SimConfig {
            lambda: 0.5,
            horizon: 0.1,
            record_every: 5,
            ..Default::default()
        };
        let init = SimState {
            t: 0.0,
            x: vec![0.0],
            z: PathPreference::new(vec![0.5], 0.5).unwrap(),
        };
        let traj = simulate(&net, &cells, &cfg, &init).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf, &net, &cells, &[0.5]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x_e,z_0,y_e,w_e,l1_dist,total_latency");
        assert_eq!(lines.count(), 3);
        assert!(text.contains("0.0000000000000000e0,"));
    }
}
