//! Parameter sweeps over the logit noise `β` or the information delay `φ`.
//!
//! Grid points run concurrently; rows come back in grid order.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::equilibrium::{perturbed_equilibrium, total_latency};
use crate::error::Error;
use crate::scenario::Model;
use crate::simulator::{
    classify_convergence, fmt_f64, l1, simulate, Convergence, SimConfig, SimState,
    DEFAULT_AMPLITUDE_THRESHOLD, DEFAULT_TAIL_FRACTION,
};

pub const DEFAULT_BETA_GRID: [f64; 5] = [1.0, 2.0, 5.0, 10.0, 20.0];
pub const DEFAULT_DELAY_GRID: [f64; 6] = [0.0, 5.0, 9.0, 10.0, 15.0, 20.0];

/// Horizon used for delay sweeps unless overridden. Near the onset of
/// oscillation the transient decays on a time scale of a few hundred time
/// units, so the default scenario horizon would label slowly decaying runs as
/// oscillating.
pub const DELAY_SWEEP_HORIZON: f64 = 1500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Beta,
    Delay,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::Beta => "beta",
            Axis::Delay => "delay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Integrate the dynamics and report the state at the horizon.
    Simulate,
    /// Solve for the perturbed equilibrium directly.
    Perturbed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: Axis,
    pub value: f64,
    pub tolls: &'static str,
    pub final_distance: f64,
    pub latency_loss: f64,
    /// `None` for perturbed-equilibrium rows.
    pub classification: Option<Convergence>,
    pub amplitude: f64,
    pub y: Vec<f64>,
}

impl SweepRow {
    pub fn label(&self) -> &'static str {
        self.classification.map_or("fixed_point", |c| c.as_str())
    }
}

/// Runs one grid point per value of `grid` on top of `base`, reporting the
/// final `ℓ₁` distance to `y_star` and the latency loss `L(y) − L(y*)`.
pub fn sweep(
    model: &Model,
    base: &SimConfig,
    init: &SimState,
    y_star: &[f64],
    axis: Axis,
    grid: &[f64],
    mode: Mode,
) -> Result<Vec<SweepRow>, Error> {
    if mode == Mode::Perturbed && axis == Axis::Delay {
        return Err(Error::Scenario("perturbed equilibria do not depend on the delay".into()));
    }
    let l_star = total_latency(y_star, &model.cells);
    grid.par_iter()
        .map(|&value| {
            let mut cfg = base.clone();
            match axis {
                Axis::Beta => cfg.beta = value,
                Axis::Delay => cfg.delay = value,
            }
            let (y, classification, amplitude) = match mode {
                Mode::Simulate => {
                    let traj = simulate(&model.network, &model.cells, &cfg, init)?;
                    let report = classify_convergence(&traj, DEFAULT_TAIL_FRACTION, DEFAULT_AMPLITUDE_THRESHOLD);
                    let y = traj.last().expect("trajectory has the initial record").y.clone();
                    (y, Some(report.class), report.amplitude)
                }
                Mode::Perturbed => {
                    let r = perturbed_equilibrium(&model.network, &model.cells, cfg.lambda, cfg.beta, &cfg.toll_policy)?;
                    (r.y, None, 0.0)
                }
            };
            Ok(SweepRow {
                axis,
                value,
                tolls: cfg.toll_policy.name(),
                final_distance: l1(&y, y_star),
                latency_loss: total_latency(&y, &model.cells) - l_star,
                classification,
                amplitude,
                y,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "axis,value,tolls,final_distance,latency_loss,classification,amplitude")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.axis.as_str(),
            fmt_f64(r.value),
            r.tolls,
            fmt_f64(r.final_distance),
            fmt_f64(r.latency_loss),
            r.label(),
            fmt_f64(r.amplitude)
        )?;
    }
    Ok(())
}
