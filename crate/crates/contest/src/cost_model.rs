//! Producer cost primitives.
//!
//! A producer is a convex cost function φ with φ(0) = 0: `Power` (c·x^α),
//! `Linear` (c·x, the α = 1 special case), or `GenericSmooth` (caller-supplied
//! value/derivative closures). A [`CostProfile`] bundles one cost function per
//! producer with the designer's budget M.
//!
//! Costs can also be *derived*: given a production technology (Cobb–Douglas or
//! generalized CES) and input prices, the cheapest way to produce `x` units is
//! a pure power cost, and [`CobbDouglas::cost_function`] /
//! [`GeneralizedCes::cost_function`] compute its coefficient and exponent in
//! closed form.

use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Shared closure type for [`CostFunction::GenericSmooth`].
pub type SmoothFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Upper end of the probe range used to spot-check generic cost functions.
const GENERIC_PROBE_UPPER: f64 = 10.0;
/// Number of (a, b) probe pairs for the convexity/monotonicity spot checks.
const GENERIC_PROBE_PAIRS: usize = 32;
/// |φ(0)| tolerated for a generic cost function.
const GENERIC_ZERO_TOL: f64 = 1e-12;
/// Slack for the midpoint convexity comparison, scaled by the probe values.
const GENERIC_CONVEXITY_SLACK: f64 = 1e-9;
/// Slack when checking that an elasticity sum / returns exponent is admissible.
const RETURNS_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CostModelError {
    #[error("cost function evaluated at negative input x = {x}")]
    NegativeInput { x: f64 },
    #[error("{what} must be {requirement}, got {value}")]
    BadParameter { what: &'static str, requirement: &'static str, value: f64 },
    #[error("{what} must not be empty")]
    Empty { what: &'static str },
    #[error("{inputs} inputs but {prices} prices; the lengths must match")]
    DimensionMismatch { inputs: usize, prices: usize },
    #[error("technology has increasing returns to scale ({what} = {value}; limit 1)")]
    IncreasingReturns { what: &'static str, value: f64 },
    #[error("generic cost function failed the {check} check near x = {x}")]
    ShapeCheck { check: &'static str, x: f64 },
    #[error("generic smooth cost functions have no JSON representation")]
    Unserializable,
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// One producer's cost of output, convex with φ(0) = 0.
///
/// Construct through [`CostFunction::power`], [`CostFunction::linear`], or
/// [`CostFunction::generic_smooth`]; literal construction skips the parameter
/// checks, but every [`CostProfile`] re-validates its members.
#[derive(Clone)]
pub enum CostFunction {
    /// φ(x) = c·x^α with c > 0 and α ≥ 1.
    Power { coefficient: f64, exponent: f64 },
    /// φ(x) = c·x with c > 0. Interchangeable with `Power { exponent: 1 }`.
    Linear { coefficient: f64 },
    /// Caller-supplied φ and φ′. The derivative is trusted after construction,
    /// where value(0) = 0, positivity of φ′, monotonicity, and midpoint
    /// convexity are spot-checked on a fixed probe grid.
    GenericSmooth { value: SmoothFn, derivative: SmoothFn },
}

impl CostFunction {
    pub fn power(coefficient: f64, exponent: f64) -> Result<Self, CostModelError> {
        require_positive("cost coefficient", coefficient)?;
        if exponent.is_finite() && exponent >= 1.0 {
            Ok(CostFunction::Power { coefficient, exponent })
        } else {
            Err(CostModelError::BadParameter {
                what: "cost exponent",
                requirement: "finite and at least 1",
                value: exponent,
            })
        }
    }

    pub fn linear(coefficient: f64) -> Result<Self, CostModelError> {
        require_positive("cost coefficient", coefficient)?;
        Ok(CostFunction::Linear { coefficient })
    }

    /// Builds a generic cost from closures and runs the shape spot checks:
    /// φ(0) = 0, φ′ > 0 on the probe grid, φ nondecreasing, and midpoint
    /// convexity over [`GENERIC_PROBE_PAIRS`] pairs in (0, 10].
    pub fn generic_smooth(value: SmoothFn, derivative: SmoothFn) -> Result<Self, CostModelError> {
        let f = CostFunction::GenericSmooth { value, derivative };
        f.validate()?;
        Ok(f)
    }

    /// Re-runs the construction checks; profiles call this on every member.
    pub fn validate(&self) -> Result<(), CostModelError> {
        match self {
            CostFunction::Power { coefficient, exponent } => {
                Self::power(*coefficient, *exponent).map(|_| ())
            }
            CostFunction::Linear { coefficient } => Self::linear(*coefficient).map(|_| ()),
            CostFunction::GenericSmooth { value, derivative } => {
                let v0 = value(0.0);
                if v0.is_nan() || v0.abs() > GENERIC_ZERO_TOL {
                    return Err(CostModelError::ShapeCheck { check: "value(0) = 0", x: 0.0 });
                }
                let d0 = derivative(0.0);
                if !d0.is_finite() || d0 < 0.0 {
                    return Err(CostModelError::ShapeCheck { check: "derivative sign", x: 0.0 });
                }
                for k in 1..=GENERIC_PROBE_PAIRS {
                    let a = GENERIC_PROBE_UPPER * k as f64 / 40.0;
                    let b = GENERIC_PROBE_UPPER * (k + 8) as f64 / 40.0;
                    let (va, vb) = (value(a), value(b));
                    if va.is_nan() || vb.is_nan() {
                        return Err(CostModelError::ShapeCheck { check: "finite values", x: a });
                    }
                    let da = derivative(a);
                    if da.is_nan() || da <= 0.0 {
                        return Err(CostModelError::ShapeCheck { check: "derivative sign", x: a });
                    }
                    if vb < va - GENERIC_CONVEXITY_SLACK * (1.0 + va.abs()) {
                        return Err(CostModelError::ShapeCheck { check: "monotonicity", x: a });
                    }
                    let mid = value(0.5 * (a + b));
                    let chord = 0.5 * (va + vb);
                    let slack = GENERIC_CONVEXITY_SLACK * (1.0 + va.abs() + vb.abs());
                    if mid.is_nan() || mid > chord + slack {
                        return Err(CostModelError::ShapeCheck { check: "midpoint convexity", x: a });
                    }
                }
                Ok(())
            }
        }
    }

    /// φ(x). Errors on negative input.
    pub fn value(&self, x: f64) -> Result<f64, CostModelError> {
        if x < 0.0 {
            return Err(CostModelError::NegativeInput { x });
        }
        Ok(self.value_at(x))
    }

    /// φ′(x). Errors on negative input. At x = 0 a power cost has marginal 0
    /// when α > 1 and c when α = 1.
    pub fn marginal(&self, x: f64) -> Result<f64, CostModelError> {
        if x < 0.0 {
            return Err(CostModelError::NegativeInput { x });
        }
        Ok(self.marginal_at(x))
    }

    /// Unchecked φ(x); solver-internal, callers guarantee x ≥ 0.
    pub(crate) fn value_at(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        match self {
            CostFunction::Power { coefficient, exponent } => coefficient * x.powf(*exponent),
            CostFunction::Linear { coefficient } => coefficient * x,
            CostFunction::GenericSmooth { value, .. } => value(x),
        }
    }

    /// Unchecked φ′(x); solver-internal, callers guarantee x ≥ 0.
    pub(crate) fn marginal_at(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        match self {
            CostFunction::Power { coefficient, exponent } => {
                if *exponent == 1.0 {
                    *coefficient
                } else {
                    coefficient * exponent * x.powf(exponent - 1.0)
                }
            }
            CostFunction::Linear { coefficient } => *coefficient,
            CostFunction::GenericSmooth { derivative, .. } => derivative(x),
        }
    }

    /// The constant marginal cost, when there is one (`Linear`, or `Power`
    /// with α = 1 — the two are treated identically everywhere).
    pub fn linear_coefficient(&self) -> Option<f64> {
        match self {
            CostFunction::Linear { coefficient } => Some(*coefficient),
            CostFunction::Power { coefficient, exponent } if *exponent == 1.0 => Some(*coefficient),
            _ => None,
        }
    }

    /// Strictly increasing marginal cost? True for powers with α > 1 and (by
    /// the construction contract) for generic costs.
    pub fn is_strictly_convex(&self) -> bool {
        self.linear_coefficient().is_none()
    }
}

impl fmt::Debug for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostFunction::Power { coefficient, exponent } => {
                write!(f, "Power({coefficient}·x^{exponent})")
            }
            CostFunction::Linear { coefficient } => write!(f, "Linear({coefficient}·x)"),
            CostFunction::GenericSmooth { .. } => write!(f, "GenericSmooth(..)"),
        }
    }
}

/// Serialized form of one producer entry; generic costs have none.
#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum AgentDoc {
    Power { c: f64, alpha: f64 },
    Linear { c: f64 },
}

impl Serialize for CostFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let doc = match self {
            CostFunction::Power { coefficient, exponent } => {
                AgentDoc::Power { c: *coefficient, alpha: *exponent }
            }
            CostFunction::Linear { coefficient } => AgentDoc::Linear { c: *coefficient },
            CostFunction::GenericSmooth { .. } => {
                return Err(S::Error::custom(CostModelError::Unserializable));
            }
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CostFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let cost = match AgentDoc::deserialize(deserializer)? {
            AgentDoc::Power { c, alpha } => CostFunction::power(c, alpha),
            AgentDoc::Linear { c } => CostFunction::linear(c),
        };
        cost.map_err(D::Error::custom)
    }
}

/// The population: one cost function per producer plus the budget M > 0.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ProfileDoc")]
pub struct CostProfile {
    budget: f64,
    #[serde(rename = "agents")]
    costs: Vec<CostFunction>,
}

#[derive(Deserialize)]
struct ProfileDoc {
    budget: f64,
    agents: Vec<CostFunction>,
}

impl TryFrom<ProfileDoc> for CostProfile {
    type Error = CostModelError;
    fn try_from(doc: ProfileDoc) -> Result<Self, Self::Error> {
        CostProfile::new(doc.agents, doc.budget)
    }
}

impl CostProfile {
    pub fn new(costs: Vec<CostFunction>, budget: f64) -> Result<Self, CostModelError> {
        if costs.is_empty() {
            return Err(CostModelError::Empty { what: "cost profile" });
        }
        require_positive("budget", budget)?;
        for cost in &costs {
            cost.validate()?;
        }
        Ok(CostProfile { budget, costs })
    }

    /// Convenience: `n` producers sharing one cost function.
    pub fn identical(cost: CostFunction, n: usize, budget: f64) -> Result<Self, CostModelError> {
        Self::new(vec![cost; n.max(1)], budget)
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn costs(&self) -> &[CostFunction] {
        &self.costs
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    /// Any producer with constant marginal cost?
    pub fn has_linear(&self) -> bool {
        self.costs.iter().any(|c| c.linear_coefficient().is_some())
    }

    /// Every producer linear?
    pub fn all_linear(&self) -> bool {
        self.costs.iter().all(|c| c.linear_coefficient().is_some())
    }

    /// The common exponent when every producer is a power cost with exactly
    /// the same α (linear counts as α = 1); `None` for mixed or generic
    /// profiles.
    pub fn common_power_exponent(&self) -> Option<f64> {
        let exponent_of = |c: &CostFunction| match c {
            CostFunction::Power { exponent, .. } => Some(*exponent),
            CostFunction::Linear { .. } => Some(1.0),
            CostFunction::GenericSmooth { .. } => None,
        };
        let first = exponent_of(&self.costs[0])?;
        for c in &self.costs[1..] {
            if exponent_of(c)? != first {
                return None;
            }
        }
        Some(first)
    }

    pub fn from_json(text: &str) -> Result<Self, CostModelError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Fails for profiles containing generic costs.
    pub fn to_json(&self) -> Result<String, CostModelError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Cobb–Douglas technology F(r) = A·∏ r_j^{β_j} with per-input prices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CobbDouglas {
    #[serde(rename = "A")]
    pub scale: f64,
    #[serde(rename = "beta")]
    pub elasticities: Vec<f64>,
    pub prices: Vec<f64>,
}

/// Generalized CES technology F(r) = A·(Σ a_j^ρ r_j^ρ)^{γ/ρ} with prices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneralizedCes {
    #[serde(rename = "A")]
    pub scale: f64,
    #[serde(rename = "a")]
    pub weights: Vec<f64>,
    #[serde(rename = "gamma")]
    pub returns: f64,
    #[serde(rename = "rho")]
    pub substitution: f64,
    pub prices: Vec<f64>,
}

/// A production technology from which a power cost can be derived.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProductionTechnology {
    CobbDouglas(CobbDouglas),
    GeneralizedCes(GeneralizedCes),
}

impl CobbDouglas {
    /// True iff the technology has (weakly) decreasing returns to scale,
    /// i.e. Σβ_j ≤ 1 — the admissibility condition for a convex cost.
    pub fn decreasing_returns(&self) -> bool {
        self.elasticities.iter().sum::<f64>() <= 1.0 + RETURNS_TOL
    }

    /// Cheapest-input cost of output: φ(x) = c·x^α with α = 1/Σβ_j and
    /// c = (∏ (p_j/β_j)^{β_j})^α / (α·A^α).
    pub fn cost_function(&self) -> Result<CostFunction, CostModelError> {
        require_positive("technology scale", self.scale)?;
        check_input_lists(&self.elasticities, "elasticity", &self.prices)?;
        let beta_sum: f64 = self.elasticities.iter().sum();
        if beta_sum > 1.0 + RETURNS_TOL {
            return Err(CostModelError::IncreasingReturns { what: "elasticity sum", value: beta_sum });
        }
        let alpha = (1.0 / beta_sum).max(1.0);
        let bundle: f64 = self
            .elasticities
            .iter()
            .zip(&self.prices)
            .map(|(beta, p)| (p / beta).powf(*beta))
            .product();
        let c = bundle.powf(alpha) / (alpha * self.scale.powf(alpha));
        CostFunction::power(c, alpha)
    }
}

impl GeneralizedCes {
    /// True iff γ ≤ 1 (decreasing returns to scale).
    pub fn decreasing_returns(&self) -> bool {
        self.returns <= 1.0 + RETURNS_TOL
    }

    /// Cheapest-input cost of output: φ(x) = c·x^{1/γ} with
    /// c = A^{-1/γ}·(Σ (a_j/p_j)^{ρ/(1-ρ)})^{-(1-ρ)/ρ}.
    pub fn cost_function(&self) -> Result<CostFunction, CostModelError> {
        require_positive("technology scale", self.scale)?;
        check_input_lists(&self.weights, "weight", &self.prices)?;
        if !(self.substitution > 0.0 && self.substitution < 1.0) {
            return Err(CostModelError::BadParameter {
                what: "substitution parameter",
                requirement: "strictly inside (0, 1)",
                value: self.substitution,
            });
        }
        require_positive("returns exponent", self.returns)?;
        if self.returns > 1.0 + RETURNS_TOL {
            return Err(CostModelError::IncreasingReturns { what: "returns exponent", value: self.returns });
        }
        let rho = self.substitution;
        let alpha = (1.0 / self.returns).max(1.0);
        let sum: f64 = self
            .weights
            .iter()
            .zip(&self.prices)
            .map(|(a, p)| (a / p).powf(rho / (1.0 - rho)))
            .sum();
        let c = self.scale.powf(-alpha) * sum.powf(-(1.0 - rho) / rho);
        CostFunction::power(c, alpha)
    }
}

impl ProductionTechnology {
    pub fn cost_function(&self) -> Result<CostFunction, CostModelError> {
        match self {
            ProductionTechnology::CobbDouglas(t) => t.cost_function(),
            ProductionTechnology::GeneralizedCes(t) => t.cost_function(),
        }
    }

    pub fn decreasing_returns(&self) -> bool {
        match self {
            ProductionTechnology::CobbDouglas(t) => t.decreasing_returns(),
            ProductionTechnology::GeneralizedCes(t) => t.decreasing_returns(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CostModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String, CostModelError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn require_positive(what: &'static str, value: f64) -> Result<(), CostModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CostModelError::BadParameter { what, requirement: "positive and finite", value })
    }
}

fn check_input_lists(
    coefficients: &[f64],
    name: &'static str,
    prices: &[f64],
) -> Result<(), CostModelError> {
    if coefficients.is_empty() {
        return Err(CostModelError::Empty { what: "input list" });
    }
    if coefficients.len() != prices.len() {
        return Err(CostModelError::DimensionMismatch {
            inputs: coefficients.len(),
            prices: prices.len(),
        });
    }
    for &b in coefficients {
        if !(b > 0.0 && b.is_finite()) {
            return Err(CostModelError::BadParameter {
                what: name,
                requirement: "positive and finite",
                value: b,
            });
        }
    }
    for &p in prices {
        require_positive("input price", p)?;
    }
    Ok(())
}
