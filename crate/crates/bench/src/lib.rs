//! Deterministic fixtures shared by the criterion benches.

use mveu_core::{AssetUniverse, DiscreteAsset, MarketModel};

/// Equally weighted `n`-point asset on `offset, offset + 1, ...`.
pub fn ladder_asset(n: usize, offset: f64) -> DiscreteAsset {
    let p = 1.0 / n as f64;
    let mut pairs: Vec<(f64, f64)> = (0..n).map(|i| (offset + i as f64, p)).collect();
    // absorb rounding in the last atom so the mass is exactly one
    let head: f64 = pairs[..n - 1].iter().map(|(_, p)| p).sum();
    pairs[n - 1].1 = 1.0 - head;
    DiscreteAsset::new(pairs).expect("ladder asset is valid")
}

/// `n`-asset universe with a diagonally dominant covariance.
pub fn banded_universe(n: usize) -> AssetUniverse {
    let means = (0..n).map(|i| 0.05 + 0.01 * i as f64).collect();
    let cov = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.04 + 0.002 * i as f64
                    } else {
                        0.004 / (1.0 + (i as f64 - j as f64).abs())
                    }
                })
                .collect()
        })
        .collect();
    AssetUniverse::new(means, cov, Vec::new()).expect("banded covariance is positive definite")
}

/// `n`-asset market with positive CAPM prices.
pub fn banded_market(n: usize) -> MarketModel {
    let means: Vec<f64> = (0..n).map(|i| 100.0 + 5.0 * i as f64).collect();
    let cov = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 25.0 } else { 2.0 })
                .collect()
        })
        .collect();
    let market_price = 0.9 * means.iter().sum::<f64>();
    MarketModel::new(0.03, means, cov, market_price, None).expect("banded market is valid")
}
