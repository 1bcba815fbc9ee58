//! JSON scenario files and the two built-in paper networks.
//!
//! ```json
//! {
//!   "name": "fig4",
//!   "nodes": ["o", "a", "b", "d"],
//!   "origin": "o",
//!   "destination": "d",
//!   "links": [
//!     {"id": "i1", "tail": "o", "head": "a", "cell": {"family": "exponential", "capacity": 2.0}}
//!   ],
//!   "lambda": 1.0,
//!   "defaults": {
//!     "eta": 0.1, "beta": 5.0, "dt": 0.01, "horizon": 350.0, "delay": 0.0,
//!     "tolls": "marginal",
//!     "initial_x": [4.0, 2.0, 3.0, 1.0, 5.0],
//!     "initial_z": [0.5, 0.16666666666666666, 0.3333333333333333]
//!   }
//! }
//! ```
//!
//! `tolls` is one of `none`, `marginal` or `constant`; constant tolls are
//! taken from `constant_tolls` when present and otherwise computed from the
//! social optimum. `initial_x` defaults to zero, `initial_z` to the uniform
//! preference. `initial_z` is indexed by the enumerated path order.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cell::{CellModel, TollPolicy};
use crate::equilibrium::{constant_marginal_tolls, social_optimum};
use crate::error::Error;
use crate::network::{Network, Topology};
use crate::routing::PathPreference;
use crate::simulator::{SimConfig, SimState};

pub const BUILTINS: [&str; 2] = ["fig1", "fig4"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub family: String,
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub cell: CellSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TollKind {
    None,
    Marginal,
    Constant,
}

impl std::str::FromStr for TollKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(TollKind::None),
            "marginal" => Ok(TollKind::Marginal),
            "constant" => Ok(TollKind::Constant),
            other => Err(format!("unknown toll policy '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub eta: f64,
    pub beta: f64,
    pub dt: f64,
    pub horizon: f64,
    pub delay: f64,
    pub tolls: TollKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_tolls: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_z: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub nodes: Vec<String>,
    pub origin: String,
    pub destination: String,
    pub links: Vec<LinkSpec>,
    pub lambda: f64,
    pub defaults: Defaults,
}

/// A validated network with its cells and throughput.
#[derive(Debug, Clone)]
pub struct Model {
    pub network: Network,
    pub cells: Vec<CellModel>,
    pub lambda: f64,
}

impl Model {
    pub fn capacities(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.capacity()).collect()
    }

    pub fn min_cut(&self) -> Result<f64, Error> {
        Ok(self.network.min_cut_capacity(&self.capacities())?)
    }

    /// The social optimum flow.
    pub fn social_optimum(&self) -> Result<Vec<f64>, Error> {
        Ok(social_optimum(&self.network, &self.cells, self.lambda)?.y)
    }

    /// Builds the toll policy for `kind`; constant tolls default to
    /// `y* τ'(y*)`.
    pub fn toll_policy(&self, kind: TollKind, constant: Option<&[f64]>) -> Result<TollPolicy, Error> {
        Ok(match kind {
            TollKind::None => TollPolicy::Zero,
            TollKind::Marginal => TollPolicy::FeedbackMarginal,
            TollKind::Constant => match constant {
                Some(w) => {
                    let p = TollPolicy::Constant(w.to_vec());
                    p.check(&self.cells)?;
                    p
                }
                None => TollPolicy::Constant(constant_marginal_tolls(&self.social_optimum()?, &self.cells)?),
            },
        })
    }
}

fn scenario_err(msg: impl Into<String>) -> Error {
    Error::Scenario(msg.into())
}

fn build_cell(spec: &CellSpec, link: &str) -> Result<CellModel, Error> {
    match spec.family.as_str() {
        "exponential" => CellModel::exponential(spec.capacity)
            .map_err(|e| scenario_err(format!("link '{link}': {e}"))),
        other => Err(scenario_err(format!("link '{link}': unknown cell family '{other}'"))),
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| scenario_err(e.to_string()))?;
        s.model()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn model(&self) -> Result<Model, Error> {
        let links: Vec<(&str, &str, &str)> = self
            .links
            .iter()
            .map(|l| (l.id.as_str(), l.tail.as_str(), l.head.as_str()))
            .collect();
        let nodes: Vec<&str> = self.nodes.iter().map(String::as_str).collect();
        let topology = Topology::new(&nodes, &links, &self.origin, &self.destination)?;
        let network = Network::new(topology)?;
        let cells = self
            .links
            .iter()
            .map(|l| build_cell(&l.cell, &l.id))
            .collect::<Result<Vec<_>, _>>()?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(scenario_err("lambda must be finite and nonnegative"));
        }
        let model = Model {
            network,
            cells,
            lambda: self.lambda,
        };
        self.check_initial(&model)?;
        if let Some(w) = &self.defaults.constant_tolls {
            TollPolicy::Constant(w.clone()).check(&model.cells)?;
        }
        Ok(model)
    }

    fn check_initial(&self, model: &Model) -> Result<(), Error> {
        if let Some(x) = &self.defaults.initial_x {
            if x.len() != model.network.num_links() {
                return Err(scenario_err(format!(
                    "defaults.initial_x has {} entries for {} links",
                    x.len(),
                    model.network.num_links()
                )));
            }
            if x.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return Err(scenario_err("defaults.initial_x must be finite and nonnegative"));
            }
        }
        if let Some(z) = &self.defaults.initial_z {
            if z.len() != model.network.num_paths() {
                return Err(scenario_err(format!(
                    "defaults.initial_z has {} entries for {} paths",
                    z.len(),
                    model.network.num_paths()
                )));
            }
            PathPreference::new(z.clone(), self.lambda)
                .map_err(|e| scenario_err(format!("defaults.initial_z: {e}")))?;
        }
        Ok(())
    }

    pub fn initial_state(&self, model: &Model) -> Result<SimState, Error> {
        let x = self
            .defaults
            .initial_x
            .clone()
            .unwrap_or_else(|| vec![0.0; model.network.num_links()]);
        let z = match &self.defaults.initial_z {
            Some(z) => PathPreference::new(z.clone(), self.lambda)?,
            None => PathPreference::uniform(model.network.num_paths(), self.lambda),
        };
        Ok(SimState { t: 0.0, x, z })
    }

    /// Simulation configuration from the scenario defaults.
    pub fn sim_config(&self, model: &Model) -> Result<SimConfig, Error> {
        let d = &self.defaults;
        Ok(SimConfig {
            eta: d.eta,
            beta: d.beta,
            lambda: self.lambda,
            dt: d.dt,
            horizon: d.horizon,
            delay: d.delay,
            toll_policy: model.toll_policy(d.tolls, d.constant_tolls.as_deref())?,
            ..Default::default()
        })
    }

    pub fn builtin(name: &str) -> Option<Scenario> {
        match name {
            "fig1" => Some(fig1()),
            "fig4" => Some(fig4()),
            _ => None,
        }
    }
}

fn link(id: &str, tail: &str, head: &str, capacity: f64) -> LinkSpec {
    LinkSpec {
        id: id.into(),
        tail: tail.into(),
        head: head.into(),
        cell: CellSpec {
            family: "exponential".into(),
            capacity,
        },
    }
}

fn nodes() -> Vec<String> {
    ["o", "a", "b", "d"].iter().map(|s| s.to_string()).collect()
}

/// The four-node network with the `a ↔ b` cycle and capacities
/// `(3, 1, 1, 1, 1, 3)`.
pub fn fig1() -> Scenario {
    Scenario {
        name: "fig1".into(),
        nodes: nodes(),
        origin: "o".into(),
        destination: "d".into(),
        links: vec![
            link("i1", "o", "a", 3.0),
            link("i2", "o", "b", 1.0),
            link("i3", "a", "b", 1.0),
            link("i4", "b", "a", 1.0),
            link("i5", "a", "d", 1.0),
            link("i6", "b", "d", 3.0),
        ],
        lambda: 1.5,
        defaults: Defaults {
            eta: 0.1,
            beta: 5.0,
            dt: 0.01,
            horizon: 350.0,
            delay: 0.0,
            tolls: TollKind::Marginal,
            constant_tolls: None,
            initial_x: None,
            initial_z: None,
        },
    }
}

/// The five-link simulation network, `C_i = 2`, `λ = 1`, `η = 0.1`.
pub fn fig4() -> Scenario {
    Scenario {
        name: "fig4".into(),
        nodes: nodes(),
        origin: "o".into(),
        destination: "d".into(),
        links: vec![
            link("i1", "o", "a", 2.0),
            link("i2", "o", "b", 2.0),
            link("i3", "a", "b", 2.0),
            link("i4", "a", "d", 2.0),
            link("i5", "b", "d", 2.0),
        ],
        lambda: 1.0,
        defaults: Defaults {
            eta: 0.1,
            beta: 5.0,
            dt: 0.01,
            horizon: 350.0,
            delay: 0.0,
            tolls: TollKind::Marginal,
            constant_tolls: None,
            initial_x: Some(vec![4.0, 2.0, 3.0, 1.0, 5.0]),
            initial_z: Some(vec![0.5, 1.0 / 6.0, 1.0 / 3.0]),
        },
    }
}

/// Loads a built-in scenario by name, or a JSON file otherwise.
pub fn load_scenario(arg: &str) -> Result<Scenario, Error> {
    if let Some(s) = Scenario::builtin(arg) {
        return Ok(s);
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::from_json(&text).map_err(|e| match e {
        Error::Scenario(msg) => Error::Scenario(format!("{}: {msg}", path.display())),
        other => other,
    })
}
