//! Two-point counterexample assets for a pair of mean-variance targets.
//!
//! Given targets `(mu1, sigma1)` and `(mu2, sigma2)` the construction returns
//! two assets that share a common payoff `x` (probability `1 - p`) and differ
//! only in the payoff `y_i` received with probability `p`. Whenever the
//! targets differ, `y1 != y2`, so one asset is better in every state and the
//! two cannot be indifferent, whatever merit the targets were assigned.
//!
//! Both solution branches of the underlying moment equations are available:
//!
//! | branch    | `x`                                        | `p`                                      | `y_i`                                  |
//! |-----------|--------------------------------------------|------------------------------------------|----------------------------------------|
//! | primary   | `(s1 m2 - s2 m1) / (s1 - s2)`              | `dm^2 / (dm^2 + (s1 - s2)^2)`            | `m_i + s_i (s1 - s2) / dm`             |
//! | secondary | `(s1 m2 + s2 m1) / (s1 + s2)`              | `dm^2 / (dm^2 + (s1 + s2)^2)`            | `m1 + s1 (s1 + s2) / dm`, `m2 - s2 (s1 + s2) / dm` |
//!
//! with `dm = m1 - m2`. On the secondary branch the two `y` values sit on
//! opposite sides of `x`, which is why `y2` takes the minus sign: with a plus
//! sign asset 2 would not have mean `m2`.

use serde::{Deserialize, Serialize};

use crate::distributions::{DiscreteAsset, MomentPair};
use crate::dominance;
use crate::error::{Error, Result};

/// Default relative tolerance for the moment-verification gate.
pub const VERIFY_TOL: f64 = 1e-9;

/// Relative gap below which two means (or sigmas) are treated as equal.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Pays `y` with probability `p`, otherwise `x` (probability `q`).
///
/// `q` is stored rather than derived so that it keeps full relative precision
/// when `p` is close to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointAsset {
    pub x: f64,
    pub y: f64,
    pub p: f64,
    pub q: f64,
}

impl TwoPointAsset {
    pub fn new(x: f64, y: f64, p: f64) -> Result<Self> {
        Self::with_complement(x, y, p, 1.0 - p)
    }

    /// `p + q` must equal one to within rounding.
    pub fn with_complement(x: f64, y: f64, p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!(
                "two-point probabilities p = {p}, q = {q} outside (0, 1)"
            )));
        }
        if (p + q - 1.0).abs() > 4.0 * f64::EPSILON {
            return Err(Error::Domain(format!("two-point probabilities sum to {}", p + q)));
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain("two-point payoffs must be finite".into()));
        }
        Ok(TwoPointAsset { x, y, p, q })
    }

    pub fn to_discrete(&self) -> DiscreteAsset {
        DiscreteAsset::new([(self.y, self.p), (self.x, self.q)])
            .expect("two-point asset with p in (0, 1) is a valid distribution")
    }

    pub fn moments(&self) -> MomentPair {
        self.to_discrete().moments()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Primary,
    Secondary,
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primary" => Ok(Branch::Primary),
            "secondary" => Ok(Branch::Secondary),
            other => Err(Error::Domain(format!("unknown branch `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorchConstruction {
    pub asset1: TwoPointAsset,
    pub asset2: TwoPointAsset,
    pub branch: Branch,
    pub targets: (MomentPair, MomentPair),
}

impl BorchConstruction {
    /// Wraps two hand-built assets; they must share `x` and `p`.
    pub fn from_assets(
        asset1: TwoPointAsset,
        asset2: TwoPointAsset,
        branch: Branch,
    ) -> Result<Self> {
        if asset1.x != asset2.x || asset1.p != asset2.p || asset1.q != asset2.q {
            return Err(Error::Precondition(
                "paired assets must share the common payoff x and probability p".into(),
            ));
        }
        Ok(BorchConstruction {
            targets: (asset1.moments(), asset2.moments()),
            asset1,
            asset2,
            branch,
        })
    }
}

fn scale_of(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Builds the counterexample pair with the default verification tolerance.
pub fn construct(m1: MomentPair, m2: MomentPair, branch: Branch) -> Result<BorchConstruction> {
    construct_with_tol(m1, m2, branch, VERIFY_TOL)
}

/// Builds the counterexample pair and verifies that each asset reproduces its
/// target moments within `tol`, relative to `max(|mu|, sigma)` of the target.
pub fn construct_with_tol(
    m1: MomentPair,
    m2: MomentPair,
    branch: Branch,
    tol: f64,
) -> Result<BorchConstruction> {
    let (mu1, s1, mu2, s2) = (m1.mu, m1.sigma, m2.mu, m2.sigma);
    let scale = scale_of(&[mu1, mu2, s1, s2]);
    let dm = mu1 - mu2;
    if dm.abs() <= DEGENERACY_TOL * scale {
        return Err(Error::DegenerateMean(format!("mu1 = {mu1}, mu2 = {mu2}")));
    }

    let ds = match branch {
        Branch::Primary => {
            let ds = s1 - s2;
            if ds.abs() <= DEGENERACY_TOL * scale {
                return Err(Error::DegenerateSigma(format!("sigma1 = {s1}, sigma2 = {s2}")));
            }
            ds
        }
        Branch::Secondary => {
            let ss = s1 + s2;
            if ss <= DEGENERACY_TOL * scale {
                return Err(Error::DegenerateSigma(format!(
                    "secondary branch needs sigma1 + sigma2 > 0 (got {s1} and {s2})"
                )));
            }
            ss
        }
    };
    // Secondary uses the same algebra with sigma2 replaced by -sigma2.
    let signed_s2 = match branch {
        Branch::Primary => s2,
        Branch::Secondary => -s2,
    };

    let x = (s1 * mu2 - signed_s2 * mu1) / ds;
    let denom = dm * dm + ds * ds;
    let (p, q) = (dm * dm / denom, ds * ds / denom);
    let y1 = mu1 + s1 * ds / dm;
    let y2 = mu2 + signed_s2 * ds / dm;

    let asset1 = TwoPointAsset::with_complement(x, y1, p, q)?;
    let asset2 = TwoPointAsset::with_complement(x, y2, p, q)?;

    for (asset, target, label) in [(asset1, m1, "asset1"), (asset2, m2, "asset2")] {
        let got = asset.moments();
        let s = target.mu.abs().max(target.sigma).max(f64::MIN_POSITIVE);
        let err = ((got.mu - target.mu).abs()).max((got.sigma - target.sigma).abs()) / s;
        if !(err <= tol) {
            return Err(Error::Verification(format!(
                "{label} moments ({}, {}) miss target ({}, {}) by {err:e} relative",
                got.mu, got.sigma, target.mu, target.sigma
            )));
        }
    }

    Ok(BorchConstruction {
        asset1,
        asset2,
        branch,
        targets: (m1, m2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WhichAsset {
    Asset1,
    Asset2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxReport {
    pub indifference_possible: bool,
    pub dominant: Option<WhichAsset>,
    /// Whether the dominant asset passed the strict first-order dominance test.
    pub strict_fsd: bool,
    pub detail: String,
}

/// Decides whether the constructed pair could rationally be indifferent.
pub fn paradox_verdict(c: &BorchConstruction) -> ParadoxReport {
    let (y1, y2) = (c.asset1.y, c.asset2.y);
    if y1 == y2 {
        return ParadoxReport {
            indifference_possible: true,
            dominant: None,
            strict_fsd: false,
            detail: format!("identical assets: both pay {y1} w.p. {} else {}", c.asset1.p, c.asset1.x),
        };
    }
    let (dominant, hi, lo) = if y2 > y1 {
        (WhichAsset::Asset2, c.asset2, c.asset1)
    } else {
        (WhichAsset::Asset1, c.asset1, c.asset2)
    };
    let strict_fsd = dominance::fsd(&hi.to_discrete(), &lo.to_discrete()).is_strict();
    ParadoxReport {
        indifference_possible: false,
        dominant: Some(dominant),
        strict_fsd,
        detail: format!(
            "both pay {} w.p. {}; otherwise {} vs {}: the asset paying {} is better in every state{}",
            c.asset1.x,
            c.asset1.q,
            y1,
            y2,
            hi.y,
            if strict_fsd {
                " and strictly first-order dominates"
            } else {
                ""
            }
        ),
    }
}

/// `(mu1 - mu2)^2 + (sigma1 - sigma2)^2`, zero iff the targets coincide.
pub fn indifference_residual(m1: MomentPair, m2: MomentPair) -> f64 {
    let dm = m1.mu - m2.mu;
    let ds = m1.sigma - m2.sigma;
    dm * dm + ds * ds
}
