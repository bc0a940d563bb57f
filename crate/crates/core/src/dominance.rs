//! Stochastic dominance tests for discrete assets plus the mean-variance,
//! Levy-Sarnat and Fishburn moment checks.
//!
//! CDFs of discrete assets are step functions, so evaluating at the merged
//! support is exact for first order. The second-order integral is piecewise
//! linear between merged support points, so checking it at those breakpoints
//! (and at the top of the support, where it equals the mean difference) is
//! sufficient.

use serde::{Deserialize, Serialize};

use crate::distributions::{DiscreteAsset, MomentPair};
use crate::error::{Error, Result};

/// Tolerance below which CDF gaps count as zero.
pub const STRICT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    StrictDominance,
    WeakDominance,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    First,
    Second,
    Mv,
    LevySarnat,
}

/// Result of a dominance test of `a` over `b`.
///
/// For the distributional orders `witness` is the payoff where the defining
/// inequality is strict (strict dominance) or violated (no dominance). Weak
/// dominance and the moment-based orders carry no witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceVerdict {
    pub relation: Relation,
    pub order: Order,
    pub witness: Option<f64>,
}

impl DominanceVerdict {
    pub fn is_strict(&self) -> bool {
        self.relation == Relation::StrictDominance
    }

    pub fn is_weak_or_strict(&self) -> bool {
        self.relation != Relation::None
    }
}

fn merged_support(a: &DiscreteAsset, b: &DiscreteAsset) -> Vec<f64> {
    let mut xs: Vec<f64> = a
        .outcomes()
        .iter()
        .chain(b.outcomes())
        .map(|o| o.x)
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn classify(gaps: impl Iterator<Item = (f64, f64)>, tol: f64, order: Order) -> DominanceVerdict {
    let mut strict_at = None;
    for (x, gap) in gaps {
        if gap < -tol {
            return DominanceVerdict {
                relation: Relation::None,
                order,
                witness: Some(x),
            };
        }
        if gap > tol && strict_at.is_none() {
            strict_at = Some(x);
        }
    }
    match strict_at {
        Some(x) => DominanceVerdict {
            relation: Relation::StrictDominance,
            order,
            witness: Some(x),
        },
        None => DominanceVerdict {
            relation: Relation::WeakDominance,
            order,
            witness: None,
        },
    }
}

/// First-order stochastic dominance of `a` over `b`: `F_b(x) - F_a(x) >= 0` everywhere.
pub fn fsd(a: &DiscreteAsset, b: &DiscreteAsset) -> DominanceVerdict {
    let xs = merged_support(a, b);
    classify(
        xs.into_iter().map(|x| (x, b.cdf(x) - a.cdf(x))),
        STRICT_TOL,
        Order::First,
    )
}

/// Running integral `I(t) = \int_{-inf}^t (F_b - F_a) dx` at each merged
/// support point. The last value equals `mean(a) - mean(b)`.
pub fn ssd_integral(a: &DiscreteAsset, b: &DiscreteAsset) -> Vec<(f64, f64)> {
    let xs = merged_support(a, b);
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &x in &xs {
        if let Some((px, gap)) = prev {
            acc += gap * (x - px);
        }
        out.push((x, acc));
        prev = Some((x, b.cdf(x) - a.cdf(x)));
    }
    out
}

/// Second-order stochastic dominance of `a` over `b`.
///
/// The integral has money units, so its tolerance is `STRICT_TOL` scaled by
/// the payoff magnitude.
pub fn ssd(a: &DiscreteAsset, b: &DiscreteAsset) -> DominanceVerdict {
    let scale = [a.min_payoff(), a.max_payoff(), b.min_payoff(), b.max_payoff()]
        .iter()
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    classify(
        ssd_integral(a, b).into_iter(),
        STRICT_TOL * scale,
        Order::Second,
    )
}

/// Mean-variance dominance: `mu1 >= mu2` with `sigma1 < sigma2`, or
/// `mu1 > mu2` with `sigma1 <= sigma2`.
pub fn mv_dominance(m1: MomentPair, m2: MomentPair) -> DominanceVerdict {
    let dominates =
        (m1.mu >= m2.mu && m1.sigma < m2.sigma) || (m1.mu > m2.mu && m1.sigma <= m2.sigma);
    DominanceVerdict {
        relation: if dominates {
            Relation::StrictDominance
        } else {
            Relation::None
        },
        order: Order::Mv,
        witness: None,
    }
}

/// Levy-Sarnat test for quadratic-utility preference of `m1` over `m2`:
/// `(mu1 - mu2)^2 - (sigma1 - sigma2)^2 > 0`, requiring `mu1 > mu2`.
pub fn levy_sarnat(m1: MomentPair, m2: MomentPair) -> Result<bool> {
    if m1.mu <= m2.mu {
        return Err(Error::Precondition(format!(
            "Levy-Sarnat test needs mu1 > mu2 (got {} and {})",
            m1.mu, m2.mu
        )));
    }
    let dm = m1.mu - m2.mu;
    let ds = m1.sigma - m2.sigma;
    Ok(dm * dm - ds * ds > 0.0)
}

/// Lowest satiation level `a` from which quadratic utility ranks `m1` above `m2`.
///
/// Solves `quadratic_eu_mv(a, m1) = quadratic_eu_mv(a, m2)` for `a`; requires `mu1 > mu2`.
pub fn levy_sarnat_threshold(m1: MomentPair, m2: MomentPair) -> Result<f64> {
    if m1.mu <= m2.mu {
        return Err(Error::Precondition("threshold needs mu1 > mu2".into()));
    }
    let second = |m: MomentPair| m.mu * m.mu + m.variance();
    Ok((second(m1) - second(m2)) / (2.0 * (m1.mu - m2.mu)))
}

/// Moment conditions that accompany detected dominance of `a` over `b`.
///
/// Purely diagnostic: `None` means the corresponding dominance was not
/// detected, so there is nothing to check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FishburnReport {
    pub strict_fsd: bool,
    pub strict_ssd: bool,
    pub fsd_moment_ok: Option<bool>,
    pub ssd_moment_ok: Option<bool>,
    pub details: Vec<String>,
}

pub fn fishburn_diagnostic(a: &DiscreteAsset, b: &DiscreteAsset) -> FishburnReport {
    let ma = a.moments();
    let mb = b.moments();
    let strict_fsd = fsd(a, b).is_strict();
    let strict_ssd = ssd(a, b).is_strict();
    let mut details = Vec::new();

    let fsd_moment_ok = strict_fsd.then(|| {
        let ok = ma.mu > mb.mu;
        details.push(format!(
            "strict FSD: mean_a = {} vs mean_b = {} -> {}",
            ma.mu,
            mb.mu,
            if ok { "mean_a > mean_b holds" } else { "mean_a > mean_b fails" }
        ));
        ok
    });
    let ssd_moment_ok = strict_ssd.then(|| {
        let ok = ma.mu >= mb.mu && ma.sigma < mb.sigma;
        details.push(format!(
            "strict SSD: (mean, sd)_a = ({}, {}) vs (mean, sd)_b = ({}, {}) -> {}",
            ma.mu,
            ma.sigma,
            mb.mu,
            mb.sigma,
            if ok {
                "mean_a >= mean_b and sd_a < sd_b hold"
            } else {
                "mean_a >= mean_b and sd_a < sd_b fail (diagnostic finding)"
            }
        ));
        ok
    });

    FishburnReport {
        strict_fsd,
        strict_ssd,
        fsd_moment_ok,
        ssd_moment_ok,
        details,
    }
}

/// Indices of the assets not strictly FSD-dominated by any other, in input order.
pub fn fsd_filter(assets: &[DiscreteAsset]) -> Result<Vec<usize>> {
    if assets.is_empty() {
        return Err(Error::Domain("fsd_filter needs at least one asset".into()));
    }
    Ok((0..assets.len())
        .filter(|&i| {
            !assets
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && fsd(other, &assets[i]).is_strict())
        })
        .collect())
}
