//! Unconstrained Markowitz frontier.
//!
//! With `A = 1'S^-1 1`, `B = 1'S^-1 m`, `C = m'S^-1 m` and `D = AC - B^2`, the
//! minimum-variance portfolio for target mean `t` is
//! `w = S^-1 (lambda m + gamma 1)` where `(lambda, gamma)` solve
//! `[C B; B A] (lambda, gamma)' = (t, 1)'`. Both `S^-1 m` and `S^-1 1` come
//! from one Cholesky factorisation.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::distributions::MomentPair;
use crate::error::{Error, Result};

/// Absolute tolerance on covariance symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Expected returns and covariance of `n` risky assets, validated positive definite.
#[derive(Debug, Clone)]
pub struct AssetUniverse {
    means: DVector<f64>,
    cov: DMatrix<f64>,
    labels: Vec<String>,
    chol: Cholesky<f64, Dyn>,
    inv_means: DVector<f64>,
    inv_ones: DVector<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniverseInput {
    pub means: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    #[serde(default)]
    pub labels: Vec<String>,
}

impl TryFrom<UniverseInput> for AssetUniverse {
    type Error = Error;

    fn try_from(raw: UniverseInput) -> Result<Self> {
        AssetUniverse::new(raw.means, raw.cov, raw.labels)
    }
}

impl AssetUniverse {
    /// Validates the inputs and factorises the covariance.
    ///
    /// Empty `labels` are replaced by `asset_1 .. asset_n`.
    pub fn new(means: Vec<f64>, cov: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        let n = means.len();
        if n == 0 {
            return Err(Error::Domain("universe has no assets".into()));
        }
        if cov.len() != n || cov.iter().any(|row| row.len() != n) {
            return Err(Error::Domain(format!("covariance must be {n} x {n}")));
        }
        let labels = if labels.is_empty() {
            (1..=n).map(|i| format!("asset_{i}")).collect()
        } else if labels.len() == n {
            labels
        } else {
            return Err(Error::Domain(format!("{} labels for {n} assets", labels.len())));
        };
        if means.iter().chain(cov.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("universe contains non-finite entries".into()));
        }
        let raw = DMatrix::from_fn(n, n, |i, j| cov[i][j]);
        for i in 0..n {
            for j in 0..i {
                if (raw[(i, j)] - raw[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::Domain(format!(
                        "covariance is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let cov = (&raw + raw.transpose()) * 0.5;
        Self::from_matrix(DVector::from_vec(means), cov, labels)
    }

    fn from_matrix(means: DVector<f64>, cov: DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        let chol = Cholesky::new(cov.clone()).ok_or_else(|| {
            Error::Factorization("covariance is not positive definite".into())
        })?;
        let n = means.len();
        let inv_means = chol.solve(&means);
        let inv_ones = chol.solve(&DVector::from_element(n, 1.0));
        Ok(AssetUniverse {
            means,
            cov,
            labels,
            chol,
            inv_means,
            inv_ones,
        })
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn means(&self) -> &DVector<f64> {
        &self.means
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Solves `cov x = rhs` with the stored factor.
    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(rhs)
    }

    /// Same universe with every covariance multiplied by `factor`.
    pub fn scale_cov(&self, factor: f64) -> Result<Self> {
        Self::from_matrix(self.means.clone(), &self.cov * factor, self.labels.clone())
    }

    /// Builds a portfolio from weights, computing its moments.
    pub fn portfolio(&self, weights: DVector<f64>) -> Portfolio {
        let mu = self.means.dot(&weights);
        let var = weights.dot(&(&self.cov * &weights));
        Portfolio {
            weights: weights.iter().copied().collect(),
            moments: MomentPair {
                mu,
                sigma: var.max(0.0).sqrt(),
            },
        }
    }

    fn abc(&self) -> (f64, f64, f64) {
        let a = self.inv_ones.sum();
        let b = self.inv_means.sum();
        let c = self.means.dot(&self.inv_means);
        (a, b, c)
    }

    /// True when the means carry no information beyond the budget constraint.
    fn flat_means(&self) -> bool {
        let (a, b, c) = self.abc();
        let d = a * c - b * b;
        d <= 1e-12 * (a * c).abs().max(f64::MIN_POSITIVE)
    }
}

/// A fully invested portfolio and the moments of its return.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portfolio {
    pub weights: Vec<f64>,
    pub moments: MomentPair,
}

impl Portfolio {
    pub fn weights_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.weights)
    }
}

/// Global minimum-variance portfolio, `S^-1 1 / A`.
pub fn global_min_variance(u: &AssetUniverse) -> Portfolio {
    let (a, _, _) = u.abc();
    u.portfolio(&u.inv_ones / a)
}

/// Minimum-variance portfolio with expected return `target_mu`.
pub fn min_variance_for_mean(u: &AssetUniverse, target_mu: f64) -> Result<Portfolio> {
    if !target_mu.is_finite() {
        return Err(Error::Domain(format!("target mean {target_mu} is not finite")));
    }
    if u.flat_means() {
        let gmv = global_min_variance(u);
        let scale = 1f64.max(target_mu.abs());
        if (gmv.moments.mu - target_mu).abs() > 1e-12 * scale {
            return Err(Error::Infeasible(format!(
                "every portfolio has mean {}; target {target_mu} unreachable",
                gmv.moments.mu
            )));
        }
        return Ok(gmv);
    }
    let (a, b, c) = u.abc();
    let system = nalgebra::Matrix2::new(c, b, b, a);
    let coeffs = system
        .lu()
        .solve(&nalgebra::Vector2::new(target_mu, 1.0))
        .ok_or_else(|| Error::Factorization("frontier multiplier system is singular".into()))?;
    let w = &u.inv_means * coeffs[0] + &u.inv_ones * coeffs[1];
    Ok(u.portfolio(w))
}

/// Max-norm residual of the first-order condition `S w = lambda m + gamma 1`,
/// with the multipliers recovered by least squares.
pub fn kkt_residual(u: &AssetUniverse, p: &Portfolio) -> f64 {
    let w = p.weights_vector();
    let sw = &u.cov * &w;
    let n = u.len();
    let basis = if u.flat_means() {
        DMatrix::from_element(n, 1, 1.0)
    } else {
        DMatrix::from_fn(n, 2, |i, j| if j == 0 { u.means[i] } else { 1.0 })
    };
    let svd = basis.clone().svd(true, true);
    let coeffs = svd
        .solve(&sw, 1e-14)
        .expect("SVD with both factors computed always solves");
    (sw - basis * coeffs).amax()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub moments: MomentPair,
    pub portfolio: Portfolio,
    /// On the upper (efficient) branch, i.e. mean at or above the global minimum-variance mean.
    pub efficient: bool,
}

/// One minimum-variance solve per grid mean, in grid order.
pub fn frontier_sample(u: &AssetUniverse, mu_grid: &[f64]) -> Result<Vec<FrontierPoint>> {
    let gmv_mu = global_min_variance(u).moments.mu;
    mu_grid
        .iter()
        .map(|&t| {
            let portfolio = min_variance_for_mean(u, t)?;
            Ok(FrontierPoint {
                moments: portfolio.moments,
                efficient: t >= gmv_mu - 1e-12 * 1f64.max(gmv_mu.abs()),
                portfolio,
            })
        })
        .collect()
}

/// Tangency portfolio for a risk-free rate: weights proportional to `S^-1 (m - r_rf 1)`.
pub fn tangency_portfolio(u: &AssetUniverse, r_rf: f64) -> Result<Portfolio> {
    let bound = global_min_variance(u).moments.mu;
    if !(r_rf < bound) {
        return Err(Error::NoTangency { r_rf, bound });
    }
    let z = &u.inv_means - &u.inv_ones * r_rf;
    let total = z.sum();
    if !(total > 0.0) {
        return Err(Error::NoTangency { r_rf, bound });
    }
    Ok(u.portfolio(z / total))
}

/// Excess return per unit of covariance with the portfolio, for each asset.
///
/// At the tangency portfolio every entry is the same.
pub fn excess_return_per_covariance(u: &AssetUniverse, p: &Portfolio, r_rf: f64) -> Vec<f64> {
    let cov_with_p = &u.cov * p.weights_vector();
    u.means
        .iter()
        .zip(cov_with_p.iter())
        .map(|(m, c)| (m - r_rf) / c)
        .collect()
}

/// Covariance of each asset's return with the return of `p`.
pub fn covariance_with(u: &AssetUniverse, p: &Portfolio) -> Vec<f64> {
    (&u.cov * p.weights_vector()).iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_asset() -> AssetUniverse {
        AssetUniverse::new(
            vec![0.1, 0.2],
            vec![vec![0.01, 0.0], vec![0.0, 0.04]],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn two_asset_min_variance() {
        let u = two_asset();
        let p = min_variance_for_mean(&u, 0.12).unwrap();
        assert!((p.weights[0] - 0.8).abs() < 1e-12);
        assert!((p.weights[1] - 0.2).abs() < 1e-12);
        assert!((p.moments.variance() - 0.008).abs() < 1e-14);
        assert!(kkt_residual(&u, &p) < 1e-12);

        let gmv = global_min_variance(&u);
        assert!((gmv.weights[0] - 0.8).abs() < 1e-12);
        assert_eq!(u.labels(), &["asset_1".to_string(), "asset_2".to_string()]);
    }

    #[test]
    fn one_asset_universe() {
        let u = AssetUniverse::new(vec![0.07], vec![vec![0.02]], vec!["only".into()]).unwrap();
        let p = min_variance_for_mean(&u, 0.07).unwrap();
        assert_eq!(p.weights, vec![1.0]);
        assert!(matches!(min_variance_for_mean(&u, 0.08), Err(Error::Infeasible(_))));
        assert_eq!(tangency_portfolio(&u, 0.01).unwrap().weights, vec![1.0]);
        assert!(tangency_portfolio(&u, 0.07).is_err());
    }

    #[test]
    fn equal_means_are_infeasible_off_mean() {
        let u = AssetUniverse::new(
            vec![0.05, 0.05],
            vec![vec![0.02, 0.001], vec![0.001, 0.03]],
            vec![],
        )
        .unwrap();
        assert!(min_variance_for_mean(&u, 0.05).is_ok());
        assert!(matches!(min_variance_for_mean(&u, 0.06), Err(Error::Infeasible(_))));
    }

    #[test]
    fn invalid_universes() {
        assert!(matches!(
            AssetUniverse::new(vec![0.1, 0.2], vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![]),
            Err(Error::Factorization(_))
        ));
        assert!(AssetUniverse::new(vec![0.1, 0.2], vec![vec![1.0, 0.1], vec![0.2, 1.0]], vec![])
            .is_err());
        assert!(AssetUniverse::new(vec![0.1], vec![vec![1.0, 0.0]], vec![]).is_err());
        assert!(AssetUniverse::new(vec![], vec![], vec![]).is_err());
        assert!(AssetUniverse::new(vec![0.1], vec![vec![1.0]], vec!["a".into(), "b".into()])
            .is_err());
    }

    #[test]
    fn two_asset_tangency() {
        let u = two_asset();
        let t = tangency_portfolio(&u, 0.05).unwrap();
        assert!((t.weights[0] - 4.0 / 7.0).abs() < 1e-12);
        assert!((t.weights[1] - 3.0 / 7.0).abs() < 1e-12);
        let ratios = excess_return_per_covariance(&u, &t, 0.05);
        assert!((ratios[0] - ratios[1]).abs() < 1e-10 * ratios[0].abs());
        assert!(matches!(
            tangency_portfolio(&u, 0.12),
            Err(Error::NoTangency { .. })
        ));
    }

    #[test]
    fn sample_endpoints_are_pure_assets() {
        let u = two_asset();
        let pts = frontier_sample(&u, &[0.10, 0.12, 0.15, 0.20]).unwrap();
        assert!((pts[0].portfolio.weights[0] - 1.0).abs() < 1e-12);
        assert!((pts[3].portfolio.weights[1] - 1.0).abs() < 1e-12);
        let sigmas: Vec<f64> = pts.iter().map(|p| p.moments.sigma).collect();
        let argmin = (0..4).min_by(|&i, &j| sigmas[i].total_cmp(&sigmas[j])).unwrap();
        assert_eq!(argmin, 1);
        assert_eq!(
            pts.iter().map(|p| p.efficient).collect::<Vec<_>>(),
            vec![false, true, true, true]
        );
    }
}
