//! Indifference geometry in the (sigma, mu) plane.
//!
//! Indifference between a sure payoff `mu0` and a risky `(sigma1, mu1)` that
//! is extended to every probability mixture of the two traces a circle
//! centred on the mu-axis at `mu0 + rho0`, with
//! `rho0 = (sigma1^2 / (mu1 - mu0) + (mu1 - mu0)) / 2`. That circle is the
//! quadratic-utility indifference curve with satiation point `a = mu0 + rho0`.
//! CARA utility on normal payoffs instead gives parabolas
//! `mu - kappa sigma^2 / 2 = const`, which are not closed under mixing; the
//! violation detector makes that failure concrete for any merit function.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distributions::{mixture_moments, MomentPair};
use crate::error::{Error, Result};
use crate::utility::{cara_normal_eu, quadratic_eu_mv};

/// Default number of points emitted by the curve samplers.
pub const DEFAULT_SAMPLES: usize = 256;

/// Merit gap (relative to `max(1, |V(m0)|)`) above which a mixture breaks indifference.
pub const VIOLATION_TOL: f64 = 1e-9;

type Evaluator = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A merit function `V(sigma, mu)` over the half-plane `sigma >= 0`.
pub struct MeritFunction {
    descriptor: String,
    evaluator: Box<Evaluator>,
}

impl fmt::Debug for MeritFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeritFunction")
            .field("descriptor", &self.descriptor)
            .finish_non_exhaustive()
    }
}

impl MeritFunction {
    pub fn new<F>(descriptor: impl Into<String>, evaluator: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        MeritFunction {
            descriptor: descriptor.into(),
            evaluator: Box::new(evaluator),
        }
    }

    /// Quadratic expected utility expressed through moments.
    pub fn quadratic(a: f64) -> Self {
        Self::new(format!("quadratic EU, a = {a}"), move |sigma, mu| {
            quadratic_eu_mv(a, MomentPair { mu, sigma })
        })
    }

    /// CARA expected utility of a normal payoff.
    pub fn cara_normal(kappa: f64) -> Self {
        Self::new(format!("CARA-normal EU, kappa = {kappa}"), move |sigma, mu| {
            cara_normal_eu(kappa, MomentPair { mu, sigma })
        })
    }

    /// Certainty equivalent of CARA-normal, `mu - kappa sigma^2 / 2`.
    pub fn cara_parabola(kappa: f64) -> Self {
        Self::new(format!("mu - {kappa} sigma^2 / 2"), move |sigma, mu| {
            mu - 0.5 * kappa * sigma * sigma
        })
    }

    /// `mu - sigma`: monotone in the right directions but not derived from any utility.
    pub fn mean_minus_sigma() -> Self {
        Self::new("mu - sigma", |sigma, mu| mu - sigma)
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn eval(&self, sigma: f64, mu: f64) -> f64 {
        (self.evaluator)(sigma, mu)
    }

    pub fn at(&self, m: MomentPair) -> f64 {
        self.eval(m.sigma, m.mu)
    }
}

/// Indifference circle through the sure point `(0, mu0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuridanCircle {
    pub mu0: f64,
    pub rho0: f64,
}

impl BuridanCircle {
    /// Centre `(sigma, mu) = (0, mu0 + rho0)`.
    pub fn center(&self) -> (f64, f64) {
        (0.0, self.mu0 + self.rho0)
    }

    /// `sigma^2 + (mu - mu0 - rho0)^2 - rho0^2`; zero on the circle.
    pub fn residual(&self, m: MomentPair) -> f64 {
        let d = m.mu - self.mu0 - self.rho0;
        m.variance() + d * d - self.rho0 * self.rho0
    }

    /// The same curve as a quadratic-utility contour.
    pub fn as_quadratic(&self) -> QuadraticCircle {
        let a = self.mu0 + self.rho0;
        QuadraticCircle {
            a,
            eu_level: a * a - self.rho0 * self.rho0,
        }
    }

    /// Points on the lower quarter arc from `(0, mu0)` up to `(rho0, mu0 + rho0)`.
    pub fn sample(&self, n: usize) -> Vec<MomentPair> {
        self.as_quadratic().sample(n)
    }
}

/// Circle through `(0, mu0)` and `anchor` traced by their probability mixtures.
pub fn buridan_circle(mu0: f64, anchor: MomentPair) -> Result<BuridanCircle> {
    if anchor.sigma <= 0.0 {
        return Err(Error::Degenerate(format!(
            "anchor must be risky (sigma = {})",
            anchor.sigma
        )));
    }
    let gap = anchor.mu - mu0;
    if gap <= 0.0 {
        return Err(Error::Ordering(format!(
            "anchor mean {} must exceed the sure payoff {mu0}",
            anchor.mu
        )));
    }
    Ok(BuridanCircle {
        mu0,
        rho0: 0.5 * (anchor.variance() / gap + gap),
    })
}

/// A quadratic-utility indifference curve: `a^2 - sigma^2 - (mu - a)^2 = eu_level`,
/// restricted to `sigma >= 0` and `mu <= a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCircle {
    pub a: f64,
    pub eu_level: f64,
}

impl QuadraticCircle {
    pub fn radius(&self) -> f64 {
        (self.a * self.a - self.eu_level).max(0.0).sqrt()
    }

    /// Mean on the admissible arc at a given sigma, if the arc reaches it.
    pub fn mu_at(&self, sigma: f64) -> Option<f64> {
        let r = self.radius();
        if !(0.0..=r).contains(&sigma) {
            return None;
        }
        Some(self.a - (r * r - sigma * sigma).max(0.0).sqrt())
    }

    /// `n` points with sigma evenly spaced over `[0, radius]`.
    ///
    /// A zero-radius circle is the single satiation point `(0, a)`.
    pub fn sample(&self, n: usize) -> Vec<MomentPair> {
        let r = self.radius();
        if r == 0.0 || n == 0 {
            return if n == 0 {
                Vec::new()
            } else {
                vec![MomentPair { mu: self.a, sigma: 0.0 }]
            };
        }
        sigma_grid(0.0, r, n)
            .into_iter()
            .map(|sigma| MomentPair {
                mu: self.mu_at(sigma).expect("grid lies on the arc"),
                sigma,
            })
            .collect()
    }
}

fn sigma_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Quadratic-utility indifference curve at a given expected-utility level.
pub fn quadratic_circles(a: f64, eu_level: f64) -> Result<QuadraticCircle> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("satiation point a must be positive, got {a}")));
    }
    if eu_level > a * a {
        return Err(Error::Infeasible(format!(
            "utility level {eu_level} exceeds the maximum a^2 = {}",
            a * a
        )));
    }
    Ok(QuadraticCircle { a, eu_level })
}

/// CARA-normal indifference curve `mu = level + kappa sigma^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaraParabola {
    pub kappa: f64,
    pub level: f64,
}

impl CaraParabola {
    pub fn mu_at(&self, sigma: f64) -> f64 {
        self.level + 0.5 * self.kappa * sigma * sigma
    }

    /// `n` points with sigma evenly spaced over `[0, sigma_max]`.
    pub fn sample(&self, n: usize, sigma_max: f64) -> Vec<MomentPair> {
        sigma_grid(0.0, sigma_max.max(0.0), n)
            .into_iter()
            .map(|sigma| MomentPair {
                mu: self.mu_at(sigma),
                sigma,
            })
            .collect()
    }
}

pub fn cara_parabolas(kappa: f64, level: f64) -> Result<CaraParabola> {
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    Ok(CaraParabola { kappa, level })
}

/// Both sides of `(1/sigma) dV/dsigma = d^2V/dmu^2` by central differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChipmanSides {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Default step `1e-3 * max(1, |sigma|, |mu|)`.
pub fn default_step(sigma: f64, mu: f64) -> f64 {
    1e-3 * 1f64.max(sigma.abs()).max(mu.abs())
}

pub fn chipman_sides(v: &MeritFunction, sigma: f64, mu: f64, h: f64) -> Result<ChipmanSides> {
    if !(h > 0.0 && sigma > h) {
        return Err(Error::Step { h, sigma });
    }
    let lhs = (v.eval(sigma + h, mu) - v.eval(sigma - h, mu)) / (2.0 * h) / sigma;
    let rhs = (v.eval(sigma, mu + h) - 2.0 * v.eval(sigma, mu) + v.eval(sigma, mu - h)) / (h * h);
    Ok(ChipmanSides {
        lhs,
        rhs,
        residual: lhs - rhs,
    })
}

/// Left minus right side of the heat-type equation every utility-derived
/// merit of normal payoffs satisfies.
pub fn chipman_residual(v: &MeritFunction, sigma: f64, mu: f64, h: f64) -> Result<f64> {
    chipman_sides(v, sigma, mu, h).map(|s| s.residual)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violated: bool,
    pub worst_alpha: Option<f64>,
    /// Largest `|V(mixture) - V(m0)|`, normalised by `max(1, |V(m0)|)`.
    pub merit_gap: f64,
}

/// Checks that `v` stays indifferent along the probability mixtures of an
/// indifferent pair.
pub fn detect_buridan_violation(
    v: &MeritFunction,
    m0: MomentPair,
    m1: MomentPair,
    alphas: &[f64],
) -> Result<ViolationReport> {
    let v0 = v.at(m0);
    let scale = 1f64.max(v0.abs());
    let start_gap = (v0 - v.at(m1)).abs() / scale;
    if !(start_gap < VIOLATION_TOL) {
        return Err(Error::Precondition(format!(
            "pair is not indifferent under {}: merit gap {start_gap:e}",
            v.descriptor()
        )));
    }
    if let Some(bad) = alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(Error::Precondition(format!("mixing weight {bad} outside (0, 1)")));
    }

    let mut worst: Option<(f64, f64)> = None;
    for &alpha in alphas {
        let gap = (v.at(mixture_moments(m0, m1, alpha)) - v0).abs() / scale;
        if worst.is_none_or(|(_, g)| gap > g) {
            worst = Some((alpha, gap));
        }
    }
    let merit_gap = worst.map_or(0.0, |(_, g)| g);
    Ok(ViolationReport {
        violated: merit_gap > VIOLATION_TOL,
        worst_alpha: worst.map(|(a, _)| a),
        merit_gap,
    })
}

/// False exactly when `m` lies above the satiation line `mu = mu0 + rho0`.
pub fn admissible_region(mu0: f64, rho0: f64, m: MomentPair) -> bool {
    m.mu <= mu0 + rho0
}
