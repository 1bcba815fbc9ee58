//! Per-link physics and pricing.
//!
//! A cell is described by its flow-density law `φ`: outflow `y = φ(x)` as a
//! function of density `x`. The law must satisfy `φ(0) = 0`, be strictly
//! increasing and strictly concave with finite `φ'(0)`, and saturate at the
//! link capacity `C = sup φ`. Latency is `τ(y) = φ⁻¹(y) / y`, extended by
//! continuity at `y = 0` and set to `+∞` for `y ≥ C`.

use std::fmt;
use std::sync::Arc;

use crate::error::CellError;
use crate::quad::adaptive_simpson;

/// Latency reported for flows at or beyond capacity.
pub const LATENCY_AT_CAPACITY: f64 = f64::INFINITY;

/// Below `SMALL_FLOW * C`, `τ'` is replaced by its limit at zero.
const SMALL_FLOW: f64 = 1e-8;

const PRIMITIVE_TOL: f64 = 1e-10;

/// A flow-density law. Implementors must supply `φ`, `φ'` and `φ''`; the
/// inverse defaults to bisection.
pub trait FlowDensity: Send + Sync + fmt::Debug {
    fn family(&self) -> &str;
    fn capacity(&self) -> f64;
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
    fn second_derivative(&self, x: f64) -> f64;

    /// `φ⁻¹(y)` for `0 ≤ y < C`.
    fn inverse(&self, y: f64) -> f64 {
        bisect_inverse(|x| self.value(x), y)
    }
}

/// Solves `φ(x) = y` to 1e-12 relative bracket width.
pub fn bisect_inverse<F: Fn(f64) -> f64>(phi: F, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while phi(hi) < y {
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi.max(1e-300) {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `φ(x) = C (1 − e^{−x})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub capacity: f64,
}

impl FlowDensity for Exponential {
    fn family(&self) -> &str {
        "exponential"
    }

    fn capacity(&self) -> f64 {
        self.capacity
    }

    fn value(&self, x: f64) -> f64 {
        -self.capacity * (-x).exp_m1()
    }

    fn derivative(&self, x: f64) -> f64 {
        self.capacity * (-x).exp()
    }

    fn second_derivative(&self, x: f64) -> f64 {
        -self.capacity * (-x).exp()
    }

    fn inverse(&self, y: f64) -> f64 {
        if y >= self.capacity {
            return f64::INFINITY;
        }
        -(-y / self.capacity).ln_1p()
    }
}

/// A link's flow-density law with derived latency and marginal quantities.
#[derive(Debug, Clone)]
pub struct CellModel {
    law: Arc<dyn FlowDensity>,
}

impl CellModel {
    pub fn new(law: Arc<dyn FlowDensity>) -> Result<Self, CellError> {
        let c = law.capacity();
        if !(c > 0.0 && c.is_finite()) {
            return Err(CellError::BadCapacity(c));
        }
        Ok(Self { law })
    }

    pub fn exponential(capacity: f64) -> Result<Self, CellError> {
        Self::new(Arc::new(Exponential { capacity }))
    }

    pub fn family(&self) -> &str {
        self.law.family()
    }

    pub fn capacity(&self) -> f64 {
        self.law.capacity()
    }

    pub fn phi(&self, x: f64) -> f64 {
        self.law.value(x)
    }

    pub fn phi_prime(&self, x: f64) -> f64 {
        self.law.derivative(x)
    }

    pub fn phi_inv(&self, y: f64) -> f64 {
        if y >= self.capacity() {
            return f64::INFINITY;
        }
        self.law.inverse(y)
    }

    /// `τ(y)`. Panics on negative or NaN flow.
    pub fn latency(&self, y: f64) -> f64 {
        assert!(y >= 0.0, "latency of negative flow {y}");
        if y == 0.0 {
            1.0 / self.law.derivative(0.0)
        } else if y < self.capacity() {
            self.law.inverse(y) / y
        } else {
            LATENCY_AT_CAPACITY
        }
    }

    /// `τ'(y) = (y − x φ'(x)) / (φ'(x) y²)` with `x = φ⁻¹(y)`; near zero the
    /// limit `−φ''(0) / (2 φ'(0)³)` is used.
    pub fn latency_prime(&self, y: f64) -> Result<f64, CellError> {
        assert!(y >= 0.0, "latency derivative at negative flow {y}");
        let c = self.capacity();
        if y >= c {
            return Err(CellError::AtCapacity {
                flow: y,
                capacity: c,
            });
        }
        if y < SMALL_FLOW * c {
            let d0 = self.law.derivative(0.0);
            return Ok(-self.law.second_derivative(0.0) / (2.0 * d0 * d0 * d0));
        }
        let x = self.law.inverse(y);
        let dphi = self.law.derivative(x);
        Ok((y - x * dphi) / (dphi * y * y))
    }

    /// `d/dy [y τ(y)] = τ(y) + y τ'(y)`, which simplifies to `1 / φ'(φ⁻¹(y))`.
    pub fn marginal_latency(&self, y: f64) -> f64 {
        if y >= self.capacity() {
            return f64::INFINITY;
        }
        1.0 / self.law.derivative(self.phi_inv(y))
    }

    /// Marginal-cost toll expressed in density: `1/φ'(x) − x/φ(x)`, with
    /// value 0 at `x = 0`.
    pub fn marginal_toll_alt(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        1.0 / self.law.derivative(x) - x / self.law.value(x)
    }
}

/// A per-link nondecreasing toll function of the link flow.
#[derive(Clone)]
pub struct CustomToll(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl CustomToll {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.0)(y)
    }
}

impl fmt::Debug for CustomToll {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomToll(..)")
    }
}

/// Decentralized toll policy: the toll on link `i` depends only on `y_i`.
#[derive(Debug, Clone, Default)]
pub enum TollPolicy {
    #[default]
    Zero,
    /// Fixed per-link tolls.
    Constant(Vec<f64>),
    /// `ω_i(y) = y τ_i'(y)`.
    FeedbackMarginal,
    Custom(Vec<CustomToll>),
}

impl TollPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            TollPolicy::Zero => "none",
            TollPolicy::Constant(_) => "constant",
            TollPolicy::FeedbackMarginal => "marginal",
            TollPolicy::Custom(_) => "custom",
        }
    }

    /// Checks dimensions, nonnegativity and (on a grid) monotonicity.
    pub fn check(&self, cells: &[CellModel]) -> Result<(), CellError> {
        match self {
            TollPolicy::Zero | TollPolicy::FeedbackMarginal => Ok(()),
            TollPolicy::Constant(w) => {
                if w.len() != cells.len() {
                    return Err(CellError::TollDimension {
                        expected: cells.len(),
                        got: w.len(),
                    });
                }
                match w.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
                    Some(i) => Err(CellError::NegativeToll {
                        flow: 0.0,
                        value: w[i],
                    }),
                    None => Ok(()),
                }
            }
            TollPolicy::Custom(fs) => {
                if fs.len() != cells.len() {
                    return Err(CellError::TollDimension {
                        expected: cells.len(),
                        got: fs.len(),
                    });
                }
                for (i, (f, cell)) in fs.iter().zip(cells).enumerate() {
                    let c = cell.capacity();
                    let mut prev = f64::NEG_INFINITY;
                    for k in 0..=100 {
                        let y = c * k as f64 / 101.0;
                        let v = f.eval(y);
                        if v.is_nan() || v < 0.0 {
                            return Err(CellError::NegativeToll { flow: y, value: v });
                        }
                        if v < prev - 1e-12 * prev.abs().max(1.0) {
                            return Err(CellError::NotMonotone { link: i, flow: y });
                        }
                        prev = v;
                    }
                }
                Ok(())
            }
        }
    }

    /// `ω_link(y)`.
    pub fn toll(&self, link: usize, cell: &CellModel, y: f64) -> Result<f64, CellError> {
        match self {
            TollPolicy::Zero => Ok(0.0),
            TollPolicy::Constant(w) => Ok(w[link]),
            TollPolicy::FeedbackMarginal => Ok(y * cell.latency_prime(y)?),
            TollPolicy::Custom(fs) => {
                let v = fs[link].eval(y);
                if v >= 0.0 {
                    Ok(v)
                } else {
                    Err(CellError::NegativeToll { flow: y, value: v })
                }
            }
        }
    }

    /// `τ(y) + ω(y)`, `+∞` at or above capacity.
    pub fn perceived_cost(&self, link: usize, cell: &CellModel, y: f64) -> f64 {
        if y >= cell.capacity() {
            return f64::INFINITY;
        }
        cell.latency(y) + self.toll(link, cell, y).unwrap_or(f64::NAN)
    }

    /// `D(y) = ∫₀^y (τ(s) + ω(s)) ds`.
    pub fn primitive(&self, link: usize, cell: &CellModel, y: f64) -> Result<f64, CellError> {
        assert!(y >= 0.0, "primitive at negative flow {y}");
        let c = cell.capacity();
        if y >= c {
            return Err(CellError::AtCapacity {
                flow: y,
                capacity: c,
            });
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        Ok(match self {
            TollPolicy::FeedbackMarginal => y * cell.latency(y),
            TollPolicy::Zero => latency_integral(cell, y),
            TollPolicy::Constant(w) => latency_integral(cell, y) + w[link] * y,
            TollPolicy::Custom(fs) => {
                let f = &fs[link];
                adaptive_simpson(|s| cell.latency(s) + f.eval(s), 0.0, y, PRIMITIVE_TOL)
            }
        })
    }
}

fn latency_integral(cell: &CellModel, y: f64) -> f64 {
    adaptive_simpson(|s| cell.latency(s), 0.0, y, PRIMITIVE_TOL)
}
