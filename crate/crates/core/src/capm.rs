//! Returns-form and price-form CAPM.
//!
//! Prices follow from end-of-period value moments:
//!
//! ```text
//! P_j = [ E(V_j) - beta_j (E(V_M) - P_M (1 + r_rf)) ] / (1 + r_rf)
//! beta_j = cov(V_j, V_M) / var(V_M)
//! ```
//!
//! Summing over assets gives `sum P_j = P_M` identically because the betas sum
//! to one, so the market's total price is not pinned down by the model and has
//! to be supplied.
//!
//! Converting back to returns uses `r_j = V_j / P_j - 1`, hence
//! `E(r_j) = E(V_j) / P_j - 1`, `cov(r_j, r_M) = cov(V_j, V_M) / (P_j P_M)` and
//! `var(r_M) = var(V_M) / P_M^2`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the returns-form residual at CAPM prices.
pub const ROUND_TRIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaBasis {
    Returns,
    Values,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beta {
    pub value: f64,
    pub basis: BetaBasis,
}

/// Market of `n` risky assets described by the moments of their end-of-period values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMarket")]
pub struct MarketModel {
    pub r_rf: f64,
    pub value_means: Vec<f64>,
    pub value_cov: Vec<Vec<f64>>,
    pub market_price: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prices: Option<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawMarket {
    r_rf: f64,
    value_means: Vec<f64>,
    value_cov: Vec<Vec<f64>>,
    market_price: f64,
    #[serde(default)]
    prices: Option<Vec<f64>>,
}

impl TryFrom<RawMarket> for MarketModel {
    type Error = Error;

    fn try_from(raw: RawMarket) -> Result<Self> {
        MarketModel::new(
            raw.r_rf,
            raw.value_means,
            raw.value_cov,
            raw.market_price,
            raw.prices,
        )
    }
}

fn total_variance(value_cov: &[Vec<f64>]) -> f64 {
    value_cov.iter().flatten().sum()
}

impl MarketModel {
    pub fn new(
        r_rf: f64,
        value_means: Vec<f64>,
        value_cov: Vec<Vec<f64>>,
        market_price: f64,
        prices: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = value_means.len();
        if n == 0 {
            return Err(Error::Domain("market has no assets".into()));
        }
        if value_cov.len() != n || value_cov.iter().any(|r| r.len() != n) {
            return Err(Error::Domain(format!("value covariance must be {n} x {n}")));
        }
        let finite = value_means
            .iter()
            .chain(value_cov.iter().flatten())
            .chain([&r_rf, &market_price])
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("market contains non-finite entries".into()));
        }
        if !(1.0 + r_rf > 0.0) {
            return Err(Error::Domain(format!("1 + r_rf must be positive, got r_rf = {r_rf}")));
        }
        if !(market_price > 0.0) {
            return Err(Error::Domain(format!("market price must be positive, got {market_price}")));
        }

        let scale = value_cov.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
        let asymmetric = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .find(|&(i, j)| (value_cov[i][j] - value_cov[j][i]).abs() > 1e-12 * scale.max(1.0));
        if let Some((i, j)) = asymmetric {
            return Err(Error::Domain(format!("value covariance is not symmetric at ({i}, {j})")));
        }
        let mat = DMatrix::from_fn(n, n, |i, j| 0.5 * (value_cov[i][j] + value_cov[j][i]));
        let min_eig = SymmetricEigen::new(mat).eigenvalues.min();
        if min_eig < -1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Domain(format!(
                "value covariance is not positive semidefinite (eigenvalue {min_eig})"
            )));
        }
        if !(total_variance(&value_cov) > 0.0) {
            return Err(Error::DegenerateMarket("var(V_M) is not positive".into()));
        }
        if let Some(p) = &prices {
            if p.len() != n {
                return Err(Error::Domain(format!("{} prices for {n} assets", p.len())));
            }
            let sum: f64 = p.iter().sum();
            if (sum - market_price).abs() > 1e-9 * market_price.max(1.0) {
                return Err(Error::Domain(format!(
                    "prices sum to {sum}, market price is {market_price}"
                )));
            }
        }
        Ok(MarketModel {
            r_rf,
            value_means,
            value_cov,
            market_price,
            prices,
        })
    }

    pub fn len(&self) -> usize {
        self.value_means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value_means.is_empty()
    }

    /// `var(V_M)`, the sum of all covariance entries.
    pub fn market_value_variance(&self) -> f64 {
        total_variance(&self.value_cov)
    }

    pub fn market_value_mean(&self) -> f64 {
        self.value_means.iter().sum()
    }

    /// `cov(V_j, V_M)`, the row sums of the covariance.
    pub fn value_cov_with_market(&self) -> Vec<f64> {
        self.value_cov.iter().map(|r| r.iter().sum()).collect()
    }
}

/// Values-basis beta of asset `j`: row sum over total sum of the value covariance.
pub fn beta(value_cov: &[Vec<f64>], j: usize) -> Result<Beta> {
    let total = total_variance(value_cov);
    if !(total > 0.0) {
        return Err(Error::DegenerateMarket("var(V_M) is not positive".into()));
    }
    let row = value_cov
        .get(j)
        .ok_or_else(|| Error::Domain(format!("asset index {j} out of range")))?;
    Ok(Beta {
        value: row.iter().sum::<f64>() / total,
        basis: BetaBasis::Values,
    })
}

pub fn betas(value_cov: &[Vec<f64>]) -> Result<Vec<f64>> {
    (0..value_cov.len())
        .map(|j| beta(value_cov, j).map(|b| b.value))
        .collect()
}

/// Security market line `r_rf + beta (mu_market - r_rf)` for a returns-basis beta.
pub fn capm_expected_return(beta: f64, r_rf: f64, mu_market: f64) -> f64 {
    r_rf + beta * (mu_market - r_rf)
}

/// Price-form CAPM; rejects markets that would produce a nonpositive price.
pub fn capm_prices(m: &MarketModel) -> Result<Vec<f64>> {
    let var_m = m.market_value_variance();
    if !(var_m > 0.0) {
        return Err(Error::DegenerateMarket("var(V_M) is not positive".into()));
    }
    let growth = 1.0 + m.r_rf;
    let premium = m.market_value_mean() - m.market_price * growth;
    let prices: Vec<f64> = m
        .value_means
        .iter()
        .zip(m.value_cov_with_market())
        .map(|(mean, cov)| (mean - cov / var_m * premium) / growth)
        .collect();
    if let Some((index, &price)) = prices.iter().enumerate().find(|(_, p)| !(**p > 0.0)) {
        return Err(Error::NonpositivePrice { index, price });
    }
    Ok(prices)
}

/// Return moments implied by value moments and a price vector.
///
/// The market price is taken as the sum of `prices`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnMoments {
    pub asset_means: Vec<f64>,
    pub cov_with_market: Vec<f64>,
    pub market_mean: f64,
    pub market_variance: f64,
}

impl ReturnMoments {
    /// Returns-basis beta of each asset.
    pub fn betas(&self) -> Vec<f64> {
        self.cov_with_market
            .iter()
            .map(|c| c / self.market_variance)
            .collect()
    }
}

pub fn return_moments(m: &MarketModel, prices: &[f64]) -> Result<ReturnMoments> {
    if prices.len() != m.len() {
        return Err(Error::Domain(format!("{} prices for {} assets", prices.len(), m.len())));
    }
    if let Some((index, &price)) = prices.iter().enumerate().find(|(_, p)| !(**p > 0.0)) {
        return Err(Error::NonpositivePrice { index, price });
    }
    let pm: f64 = prices.iter().sum();
    Ok(ReturnMoments {
        asset_means: m
            .value_means
            .iter()
            .zip(prices)
            .map(|(v, p)| v / p - 1.0)
            .collect(),
        cov_with_market: m
            .value_cov_with_market()
            .iter()
            .zip(prices)
            .map(|(c, p)| c / (p * pm))
            .collect(),
        market_mean: m.market_value_mean() / pm - 1.0,
        market_variance: m.market_value_variance() / (pm * pm),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub prices: Vec<f64>,
    pub betas: Vec<f64>,
    /// Per-asset `|E(r_j) - SML(beta_j)| / max(|E(r_j)|, |SML(beta_j)|)`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Returns-form residuals of the security market line at the given prices.
pub fn round_trip_at(m: &MarketModel, prices: &[f64]) -> Result<RoundTripReport> {
    let rm = return_moments(m, prices)?;
    let return_betas = rm.betas();
    let residuals: Vec<f64> = rm
        .asset_means
        .iter()
        .zip(&return_betas)
        .map(|(&lhs, &b)| {
            let rhs = capm_expected_return(b, m.r_rf, rm.market_mean);
            (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE)
        })
        .collect();
    Ok(RoundTripReport {
        prices: prices.to_vec(),
        betas: betas(&m.value_cov)?,
        max_residual: residuals.iter().fold(0.0, |a: f64, &b| a.max(b)),
        residuals,
    })
}

/// Prices the market, converts to return moments and checks the security market line.
pub fn capm_round_trip(m: &MarketModel) -> Result<RoundTripReport> {
    let prices = capm_prices(m)?;
    round_trip_at(m, &prices)
}

/// Marginal rates of substitution of expected return for variance when a
/// small weight is moved from the risk-free asset into asset `j` (first
/// entry) or into the market portfolio (second entry).
pub fn substitution_rates(
    asset_excess: f64,
    cov_with_market: f64,
    market_excess: f64,
    market_variance: f64,
    w_m: f64,
) -> Result<(f64, f64)> {
    if !(w_m > 0.0) {
        return Err(Error::Precondition(format!("market weight must be positive, got {w_m}")));
    }
    if cov_with_market == 0.0 {
        return Err(Error::UndefinedRate("asset is uncorrelated with the market".into()));
    }
    if !(market_variance > 0.0) {
        return Err(Error::UndefinedRate("market variance is not positive".into()));
    }
    Ok((
        asset_excess / (2.0 * w_m * cov_with_market),
        market_excess / (2.0 * w_m * market_variance),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MrsReport {
    pub asset_rate: f64,
    pub market_rate: f64,
    /// `|asset_rate - market_rate| / max(|asset_rate|, |market_rate|)`.
    pub relative_gap: f64,
}

/// Compares the two substitution rates for asset `j` at the given prices.
pub fn mrs_check(m: &MarketModel, prices: &[f64], j: usize, w_m: f64) -> Result<MrsReport> {
    let rm = return_moments(m, prices)?;
    if j >= m.len() {
        return Err(Error::Domain(format!("asset index {j} out of range")));
    }
    let (asset_rate, market_rate) = substitution_rates(
        rm.asset_means[j] - m.r_rf,
        rm.cov_with_market[j],
        rm.market_mean - m.r_rf,
        rm.market_variance,
        w_m,
    )?;
    let denom = asset_rate.abs().max(market_rate.abs()).max(f64::MIN_POSITIVE);
    Ok(MrsReport {
        asset_rate,
        market_rate,
        relative_gap: (asset_rate - market_rate).abs() / denom,
    })
}
