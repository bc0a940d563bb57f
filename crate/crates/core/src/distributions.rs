//! Finite discrete and normal payoff distributions.
//!
//! [`DiscreteAsset`] is the workhorse: every expectation in the toolkit is an
//! exact finite sum over its support. Outcomes are kept in canonical form
//! (sorted ascending, duplicates merged, zero-probability atoms dropped) so
//! that structural equality and CDF comparisons are well defined.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total probability mass of a distribution.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// A single support point of a discrete payoff distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub x: f64,
    pub p: f64,
}

/// A finite payoff distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDiscrete")]
pub struct DiscreteAsset {
    outcomes: Vec<Outcome>,
}

#[derive(Deserialize)]
struct RawDiscrete {
    outcomes: Vec<Outcome>,
}

impl TryFrom<RawDiscrete> for DiscreteAsset {
    type Error = Error;

    fn try_from(raw: RawDiscrete) -> Result<Self> {
        DiscreteAsset::from_outcomes(raw.outcomes)
    }
}

impl DiscreteAsset {
    /// Builds an asset from `(payoff, probability)` pairs.
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        Self::from_outcomes(pairs.into_iter().map(|(x, p)| Outcome { x, p }).collect())
    }

    pub fn from_outcomes(mut outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        for o in &outcomes {
            if !o.x.is_finite() {
                return Err(Error::InvalidDistribution(format!("non-finite payoff {}", o.x)));
            }
            if !o.p.is_finite() || o.p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "probability {} of payoff {} is not a nonnegative number",
                    o.p, o.x
                )));
            }
        }
        let total: f64 = outcomes.iter().map(|o| o.p).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }

        outcomes.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut merged: Vec<Outcome> = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            match merged.last_mut() {
                Some(last) if last.x == o.x => last.p += o.p,
                _ => merged.push(o),
            }
        }
        merged.retain(|o| o.p > 0.0);
        Ok(DiscreteAsset { outcomes: merged })
    }

    /// The sure payoff `c`.
    pub fn degenerate(c: f64) -> Result<Self> {
        Self::new([(c, 1.0)])
    }

    /// Support points with their probabilities, ascending by payoff.
    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn min_payoff(&self) -> f64 {
        self.outcomes[0].x
    }

    pub fn max_payoff(&self) -> f64 {
        self.outcomes[self.outcomes.len() - 1].x
    }

    pub fn mean(&self) -> f64 {
        self.outcomes.iter().map(|o| o.p * o.x).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.outcomes
            .iter()
            .map(|o| {
                let d = o.x - mu;
                o.p * d * d
            })
            .sum()
    }

    /// Exact mean and standard deviation.
    pub fn moments(&self) -> MomentPair {
        MomentPair {
            mu: self.mean(),
            sigma: self.variance().sqrt(),
        }
    }

    /// Right-continuous CDF, `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x >= self.max_payoff() {
            return 1.0;
        }
        let k = self.outcomes.partition_point(|o| o.x <= x);
        self.outcomes[..k].iter().map(|o| o.p).sum()
    }

    /// Expectation of an arbitrary function of the payoff.
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.outcomes.iter().map(|o| o.p * f(o.x)).sum()
    }
}

/// Normally distributed payoff; `sigma = 0` is the risk-free asset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMoments")]
pub struct NormalAsset {
    pub mu: f64,
    pub sigma: f64,
}

impl NormalAsset {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        let m = MomentPair::new(mu, sigma)?;
        Ok(NormalAsset {
            mu: m.mu,
            sigma: m.sigma,
        })
    }

    pub fn moments(&self) -> MomentPair {
        MomentPair {
            mu: self.mu,
            sigma: self.sigma,
        }
    }
}

impl TryFrom<RawMoments> for NormalAsset {
    type Error = Error;

    fn try_from(raw: RawMoments) -> Result<Self> {
        NormalAsset::new(raw.mu, raw.sigma)
    }
}

/// A point of the mean / standard-deviation plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMoments")]
pub struct MomentPair {
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Deserialize)]
struct RawMoments {
    mu: f64,
    sigma: f64,
}

impl TryFrom<RawMoments> for MomentPair {
    type Error = Error;

    fn try_from(raw: RawMoments) -> Result<Self> {
        MomentPair::new(raw.mu, raw.sigma)
    }
}

impl MomentPair {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() {
            return Err(Error::Domain(format!("non-finite moments ({mu}, {sigma})")));
        }
        if sigma < 0.0 {
            return Err(Error::Domain(format!("negative standard deviation {sigma}")));
        }
        Ok(MomentPair { mu, sigma })
    }

    pub fn from_variance(mu: f64, variance: f64) -> Result<Self> {
        if variance < 0.0 {
            return Err(Error::Domain(format!("negative variance {variance}")));
        }
        Self::new(mu, variance.sqrt())
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// One state of a joint two-asset distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    pub a: f64,
    pub b: f64,
    pub p: f64,
}

/// Joint payoffs of two assets over a finite set of states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint")]
pub struct JointDiscrete {
    states: Vec<JointState>,
}

#[derive(Deserialize)]
struct RawJoint {
    states: Vec<JointState>,
}

impl TryFrom<RawJoint> for JointDiscrete {
    type Error = Error;

    fn try_from(raw: RawJoint) -> Result<Self> {
        JointDiscrete::new(raw.states)
    }
}

impl JointDiscrete {
    pub fn new(states: Vec<JointState>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidDistribution("no joint states".into()));
        }
        for s in &states {
            if !s.a.is_finite() || !s.b.is_finite() {
                return Err(Error::InvalidDistribution("non-finite joint payoff".into()));
            }
            if !s.p.is_finite() || s.p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "joint state probability {} is not a nonnegative number",
                    s.p
                )));
            }
        }
        let total: f64 = states.iter().map(|s| s.p).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "joint probabilities sum to {total}, not 1"
            )));
        }
        Ok(JointDiscrete { states })
    }

    /// Joint law of two independent assets.
    pub fn independent(a: &DiscreteAsset, b: &DiscreteAsset) -> Result<Self> {
        let states = a
            .outcomes()
            .iter()
            .flat_map(|oa| {
                b.outcomes().iter().map(move |ob| JointState {
                    a: oa.x,
                    b: ob.x,
                    p: oa.p * ob.p,
                })
            })
            .collect();
        Self::new(states)
    }

    pub fn states(&self) -> &[JointState] {
        &self.states
    }

    pub fn marginal_a(&self) -> DiscreteAsset {
        DiscreteAsset::new(self.states.iter().map(|s| (s.a, s.p)))
            .expect("marginal of a validated joint is valid")
    }

    pub fn marginal_b(&self) -> DiscreteAsset {
        DiscreteAsset::new(self.states.iter().map(|s| (s.b, s.p)))
            .expect("marginal of a validated joint is valid")
    }
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

/// Probability mixture: `a` with probability `alpha`, otherwise `b`.
pub fn mixture(a: &DiscreteAsset, b: &DiscreteAsset, alpha: f64) -> Result<DiscreteAsset> {
    check_unit_interval("alpha", alpha)?;
    if alpha == 1.0 {
        return Ok(a.clone());
    }
    if alpha == 0.0 {
        return Ok(b.clone());
    }
    let pairs = a
        .outcomes()
        .iter()
        .map(|o| (o.x, alpha * o.p))
        .chain(b.outcomes().iter().map(|o| (o.x, (1.0 - alpha) * o.p)));
    DiscreteAsset::new(pairs)
}

/// Mean and variance of the `alpha`-mixture computed from the component
/// moments alone.
///
/// The variance carries the inflation term `alpha (1 - alpha) (mu1 - mu0)^2`;
/// no joint information is needed because the mixture realises exactly one
/// component. `alpha` must lie in `[0, 1]`.
pub fn mixture_mean_variance(m0: MomentPair, m1: MomentPair, alpha: f64) -> (f64, f64) {
    debug_assert!((0.0..=1.0).contains(&alpha));
    let beta = 1.0 - alpha;
    let mu = alpha * m0.mu + beta * m1.mu;
    let spread = m1.mu - m0.mu;
    let var = alpha * m0.variance() + beta * m1.variance() + alpha * beta * spread * spread;
    (mu, var.max(0.0))
}

/// [`mixture_mean_variance`] as a moment pair.
pub fn mixture_moments(m0: MomentPair, m1: MomentPair, alpha: f64) -> MomentPair {
    let (mu, var) = mixture_mean_variance(m0, m1, alpha);
    MomentPair {
        mu,
        sigma: var.sqrt(),
    }
}

/// State-by-state weighted portfolio `w * a + (1 - w) * b`.
pub fn portfolio(joint: &JointDiscrete, w: f64) -> Result<DiscreteAsset> {
    check_unit_interval("w", w)?;
    DiscreteAsset::new(
        joint
            .states()
            .iter()
            .map(|s| (w * s.a + (1.0 - w) * s.b, s.p)),
    )
}

/// Outcome of a sure-thing comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statewise {
    ADominates,
    BDominates,
    Equal,
    Incomparable,
}

/// Compares two assets whose outcomes pair off under equal probabilities.
///
/// Outcomes are grouped by probability; each group must hold the same number
/// of atoms in both assets, and within a group atoms are paired by rank.
/// Rank pairing finds a dominating coupling whenever any pairing does.
/// Profiles that do not match are `Incomparable`.
pub fn statewise_compare(a: &DiscreteAsset, b: &DiscreteAsset) -> Statewise {
    if a.len() != b.len() {
        return Statewise::Incomparable;
    }
    let groups = |asset: &DiscreteAsset| {
        let mut v: Vec<Outcome> = asset.outcomes().to_vec();
        // stable sort keeps payoff order inside each probability group
        v.sort_by(|l, r| l.p.total_cmp(&r.p));
        v
    };
    let ga = groups(a);
    let gb = groups(b);

    let mut a_better = false;
    let mut b_better = false;
    for (oa, ob) in ga.iter().zip(&gb) {
        if (oa.p - ob.p).abs() > PROB_SUM_TOL {
            return Statewise::Incomparable;
        }
        if oa.x > ob.x {
            a_better = true;
        } else if ob.x > oa.x {
            b_better = true;
        }
    }
    match (a_better, b_better) {
        (false, false) => Statewise::Equal,
        (true, false) => Statewise::ADominates,
        (false, true) => Statewise::BDominates,
        (true, true) => Statewise::Incomparable,
    }
}
