//! Utility families, expected utility and local risk aversion.
//!
//! Parameterisations are fixed so that `u(0) = 0` for the quadratic and CARA
//! families:
//!
//! * quadratic: `u(x) = 2ax - x^2`, satiated at `x = a` where `u(a) = a^2`
//! * CARA: `u(x) = 1 - exp(-kappa x)`
//! * log: `u(x) = ln x`, defined for `x > 0`
//! * tabulated: piecewise-linear through user points, nondecreasing and concave

use serde::{Deserialize, Serialize};

use crate::distributions::{DiscreteAsset, MomentPair};
use crate::error::{Error, Result};

/// Concave piecewise-linear utility through a table of `(x, u)` knots.
///
/// Outside the table the end segments are extended linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedUtility {
    points: Vec<(f64, f64)>,
}

impl TabulatedUtility {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain("tabulated utility needs at least two points".into()));
        }
        if points.iter().any(|(x, u)| !x.is_finite() || !u.is_finite()) {
            return Err(Error::Domain("tabulated utility has non-finite entries".into()));
        }
        let mut prev_slope = f64::INFINITY;
        for w in points.windows(2) {
            let (x0, u0) = w[0];
            let (x1, u1) = w[1];
            if x1 <= x0 {
                return Err(Error::Domain(format!(
                    "tabulated payoffs must be strictly increasing ({x0} then {x1})"
                )));
            }
            let slope = (u1 - u0) / (x1 - x0);
            if slope < 0.0 {
                return Err(Error::Domain(format!(
                    "tabulated utility decreases on [{x0}, {x1}]"
                )));
            }
            if slope > prev_slope * (1.0 + 1e-12) + 1e-15 {
                return Err(Error::Domain(format!(
                    "tabulated utility is not concave at x = {x0}"
                )));
            }
            prev_slope = slope;
        }
        Ok(TabulatedUtility { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.points.len();
        let k = self.points.partition_point(|&(px, _)| px <= x);
        k.clamp(1, n - 1) - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let (x0, u0) = self.points[i];
        let (x1, u1) = self.points[i + 1];
        u0 + (u1 - u0) * (x - x0) / (x1 - x0)
    }
}

/// A utility function from one of the supported families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUtility", into = "RawUtility")]
pub enum UtilitySpec {
    Quadratic { a: f64 },
    Cara { kappa: f64 },
    Log,
    Tabulated(TabulatedUtility),
}

#[derive(Serialize, Deserialize)]
struct RawUtility {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<(f64, f64)>>,
}

impl TryFrom<RawUtility> for UtilitySpec {
    type Error = Error;

    fn try_from(raw: RawUtility) -> Result<Self> {
        let missing = |field: &str| Error::Domain(format!("{} utility needs `{field}`", raw.family));
        match raw.family.as_str() {
            "quadratic" => UtilitySpec::quadratic(raw.a.ok_or_else(|| missing("a"))?),
            "cara" => UtilitySpec::cara(raw.kappa.ok_or_else(|| missing("kappa"))?),
            "log" => Ok(UtilitySpec::Log),
            "tabulated" => Ok(UtilitySpec::Tabulated(TabulatedUtility::new(
                raw.points.clone().ok_or_else(|| missing("points"))?,
            )?)),
            other => Err(Error::Domain(format!("unknown utility family `{other}`"))),
        }
    }
}

impl From<UtilitySpec> for RawUtility {
    fn from(u: UtilitySpec) -> Self {
        let mut raw = RawUtility {
            family: u.family().to_string(),
            a: None,
            kappa: None,
            points: None,
        };
        match u {
            UtilitySpec::Quadratic { a } => raw.a = Some(a),
            UtilitySpec::Cara { kappa } => raw.kappa = Some(kappa),
            UtilitySpec::Log => {}
            UtilitySpec::Tabulated(t) => raw.points = Some(t.points),
        }
        raw
    }
}

impl UtilitySpec {
    pub fn quadratic(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Domain(format!("quadratic utility needs a > 0, got {a}")));
        }
        Ok(UtilitySpec::Quadratic { a })
    }

    pub fn cara(kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::Domain(format!("CARA utility needs kappa > 0, got {kappa}")));
        }
        Ok(UtilitySpec::Cara { kappa })
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        Ok(UtilitySpec::Tabulated(TabulatedUtility::new(points)?))
    }

    pub fn family(&self) -> &'static str {
        match self {
            UtilitySpec::Quadratic { .. } => "quadratic",
            UtilitySpec::Cara { .. } => "cara",
            UtilitySpec::Log => "log",
            UtilitySpec::Tabulated(_) => "tabulated",
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            UtilitySpec::Quadratic { a } => Ok(2.0 * a * x - x * x),
            UtilitySpec::Cara { kappa } => Ok(-(-kappa * x).exp_m1()),
            UtilitySpec::Log => {
                if x > 0.0 {
                    Ok(x.ln())
                } else {
                    Err(Error::Domain(format!("log utility undefined at x = {x}")))
                }
            }
            UtilitySpec::Tabulated(t) => Ok(t.eval(x)),
        }
    }

    /// Pratt-Arrow local absolute risk aversion `-u''(x) / u'(x)`.
    pub fn risk_aversion(&self, x: f64) -> Result<f64> {
        match self {
            UtilitySpec::Quadratic { a } => {
                if x == *a {
                    Err(Error::Singularity(x))
                } else {
                    Ok(1.0 / (a - x))
                }
            }
            UtilitySpec::Cara { kappa } => Ok(*kappa),
            UtilitySpec::Log => {
                if x > 0.0 {
                    Ok(1.0 / x)
                } else {
                    Err(Error::Domain(format!("log utility undefined at x = {x}")))
                }
            }
            UtilitySpec::Tabulated(_) => Err(Error::Unsupported(
                "risk aversion of a piecewise-linear utility".into(),
            )),
        }
    }
}

/// `E[u(X)]` as an exact sum over the support of `asset`.
pub fn expected_utility(u: &UtilitySpec, asset: &DiscreteAsset) -> Result<f64> {
    asset
        .outcomes()
        .iter()
        .try_fold(0.0, |acc, o| Ok(acc + o.p * u.eval(o.x)?))
}

/// Quadratic expected utility from moments: `2a mu - (sigma^2 + mu^2)`.
///
/// Exact for every distribution with these moments.
pub fn quadratic_eu_mv(a: f64, m: MomentPair) -> f64 {
    2.0 * a * m.mu - (m.variance() + m.mu * m.mu)
}

/// Same quantity written as `a^2 - sigma^2 - (mu - a)^2`, which shows the
/// circular indifference curves centred at `(0, a)`.
pub fn quadratic_eu_mv_centered(a: f64, m: MomentPair) -> f64 {
    let d = m.mu - a;
    a * a - m.variance() - d * d
}

/// CARA expected utility of a normal payoff: `1 - exp(-kappa mu + kappa^2 sigma^2 / 2)`.
pub fn cara_normal_eu(kappa: f64, m: MomentPair) -> f64 {
    let exponent = -kappa * m.mu + 0.5 * kappa * kappa * m.variance();
    -exponent.exp_m1()
}

/// True iff every payoff of `asset` lies at or below the satiation point `a`.
pub fn quadratic_admissible(a: f64, asset: &DiscreteAsset) -> bool {
    asset.max_payoff() <= a
}
