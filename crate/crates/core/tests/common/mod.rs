//! Test-only oracles and random fixtures.
//!
//! Nothing here calls the code paths it is used to check: moments are summed
//! from raw `(x, p)` lists, mixtures are enumerated by hand, and normal
//! expectations use Gauss-Hermite quadrature.

#![allow(dead_code)]

use mveu_core::{AssetUniverse, DiscreteAsset, JointDiscrete, JointState, MarketModel};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mean and variance of a raw `(x, p)` list.
pub fn raw_mean_var(pairs: &[(f64, f64)]) -> (f64, f64) {
    let mu: f64 = pairs.iter().map(|(x, p)| x * p).sum();
    let var = pairs.iter().map(|(x, p)| p * (x - mu) * (x - mu)).sum();
    (mu, var)
}

/// Mixture support written out atom by atom, without merging.
pub fn enumerate_mixture(a: &DiscreteAsset, b: &DiscreteAsset, alpha: f64) -> Vec<(f64, f64)> {
    a.outcomes()
        .iter()
        .map(|o| (o.x, alpha * o.p))
        .chain(b.outcomes().iter().map(|o| (o.x, (1.0 - alpha) * o.p)))
        .collect()
}

/// `n` positive weights summing to one, drawn from integer tickets so that ties
/// and repeated probabilities occur.
pub fn random_probs(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| r.gen_range(1..=8) as f64).collect();
    let total: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|v| v / total).collect();
    let head: f64 = p[..n - 1].iter().sum();
    p[n - 1] = 1.0 - head;
    p
}

/// Random asset with up to `max_points` atoms on a coarse grid inside `[lo, hi]`.
pub fn random_asset(r: &mut ChaCha8Rng, max_points: usize, lo: f64, hi: f64) -> DiscreteAsset {
    let n = r.gen_range(1..=max_points);
    let probs = random_probs(r, n);
    let pairs: Vec<(f64, f64)> = probs
        .into_iter()
        .map(|p| {
            let x = lo + (hi - lo) * (r.gen_range(0..=40) as f64) / 40.0;
            (x, p)
        })
        .collect();
    DiscreteAsset::new(pairs).expect("generated asset is valid")
}

/// Asset with continuous random payoffs, for moment identities.
pub fn random_asset_continuous(
    r: &mut ChaCha8Rng,
    max_points: usize,
    lo: f64,
    hi: f64,
) -> DiscreteAsset {
    let n = r.gen_range(1..=max_points);
    let probs = random_probs(r, n);
    DiscreteAsset::new(probs.into_iter().map(|p| (r.gen_range(lo..hi), p)))
        .expect("generated asset is valid")
}

/// Pair likely to exhibit dominance: shifts atoms up (first order) or spreads
/// them around the mean (second order), or an unrelated pair.
pub fn random_dominance_pair(r: &mut ChaCha8Rng) -> (DiscreteAsset, DiscreteAsset) {
    let base = random_asset(r, 5, -10.0, 10.0);
    match r.gen_range(0..3) {
        0 => {
            let shifted = DiscreteAsset::new(base.outcomes().iter().map(|o| {
                let bump = if r.gen_bool(0.6) { r.gen_range(0..=4) as f64 } else { 0.0 };
                (o.x + bump, o.p)
            }))
            .unwrap();
            (shifted, base)
        }
        1 => {
            // split one atom into a mean-preserving two-point spread
            let outs = base.outcomes().to_vec();
            let k = r.gen_range(0..outs.len());
            let d = r.gen_range(1..=4) as f64;
            let mut pairs: Vec<(f64, f64)> = Vec::new();
            for (i, o) in outs.iter().enumerate() {
                if i == k {
                    pairs.push((o.x - d, o.p / 2.0));
                    pairs.push((o.x + d, o.p / 2.0));
                } else {
                    pairs.push((o.x, o.p));
                }
            }
            (base, DiscreteAsset::new(pairs).unwrap())
        }
        _ => (random_asset(r, 6, -10.0, 10.0), random_asset(r, 6, -10.0, 10.0)),
    }
}

pub fn random_joint(r: &mut ChaCha8Rng, max_states: usize, lo: f64, hi: f64) -> JointDiscrete {
    let n = r.gen_range(2..=max_states);
    let probs = random_probs(r, n);
    JointDiscrete::new(
        probs
            .into_iter()
            .map(|p| JointState {
                a: r.gen_range(lo..hi),
                b: r.gen_range(lo..hi),
                p,
            })
            .collect(),
    )
    .unwrap()
}

pub type Utility = Box<dyn Fn(f64) -> f64>;

/// Piecewise-linear interpolation through `knots` with linear extension.
fn piecewise(knots: Vec<(f64, f64)>) -> Utility {
    Box::new(move |x| {
        let n = knots.len();
        let k = knots.partition_point(|&(kx, _)| kx <= x).clamp(1, n - 1) - 1;
        let (x0, u0) = knots[k];
        let (x1, u1) = knots[k + 1];
        u0 + (u1 - u0) * (x - x0) / (x1 - x0)
    })
}

fn random_knots(r: &mut ChaCha8Rng, lo: f64, hi: f64, concave: bool) -> Vec<(f64, f64)> {
    let n = r.gen_range(3..=8);
    let mut xs: Vec<f64> = (0..n).map(|_| r.gen_range(lo..hi)).collect();
    xs.push(lo);
    xs.push(hi);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut slopes: Vec<f64> = (1..xs.len()).map(|_| r.gen_range(0.05..3.0)).collect();
    if concave {
        slopes.sort_by(|a, b| b.total_cmp(a));
    }
    let mut u = 0.0;
    let mut knots = vec![(xs[0], 0.0)];
    for (w, s) in xs.windows(2).zip(slopes) {
        u += s * (w[1] - w[0]);
        knots.push((w[1], u));
    }
    knots
}

/// Fifty strictly increasing utilities on `[lo, hi]`: concave, convex and
/// neither, smooth and piecewise linear.
pub fn increasing_family(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec<Utility> {
    let mut fam: Vec<Utility> = vec![Box::new(|x| x)];
    while fam.len() < 50 {
        let u: Utility = match fam.len() % 6 {
            0 => {
                let k = r.gen_range(0.01..0.5);
                Box::new(move |x| -(-k * x).exp())
            }
            1 => {
                let k = r.gen_range(0.01..0.3);
                Box::new(move |x| (k * x).exp())
            }
            2 => {
                let c = r.gen_range(0.001..0.05);
                Box::new(move |x| x + c * x * x * x)
            }
            3 => piecewise(random_knots(r, lo, hi, false)),
            4 => {
                let s = r.gen_range(0.2..2.0);
                Box::new(move |x: f64| (x * s).atan())
            }
            _ => {
                let t = r.gen_range(lo..hi);
                Box::new(move |x| if x > t { 1.0 + 1e-3 * x } else { 1e-3 * x })
                    as Utility
            }
        };
        fam.push(u);
    }
    fam
}

/// Fifty strictly increasing concave utilities on `[lo, hi]`.
pub fn increasing_concave_family(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> Vec<Utility> {
    let mut fam: Vec<Utility> = vec![Box::new(|x| x)];
    while fam.len() < 50 {
        let u: Utility = match fam.len() % 5 {
            0 => {
                let k = r.gen_range(0.01..1.0);
                Box::new(move |x| -(-k * x).exp())
            }
            1 => {
                let a = hi + r.gen_range(0.1..20.0);
                Box::new(move |x| 2.0 * a * x - x * x)
            }
            2 => {
                let shift = -lo + r.gen_range(0.1..5.0);
                Box::new(move |x: f64| (x + shift).ln())
            }
            3 => piecewise(random_knots(r, lo, hi, true)),
            _ => {
                let t = r.gen_range(lo..hi);
                Box::new(move |x: f64| x.min(t) + 1e-3 * x)
            }
        };
        fam.push(u);
    }
    fam
}

pub fn expect(u: &Utility, a: &DiscreteAsset) -> f64 {
    a.outcomes().iter().map(|o| o.p * u(o.x)).sum()
}

/// Physicists' Gauss-Hermite rule via the Golub-Welsch eigenproblem:
/// `int f(x) exp(-x^2) dx ~ sum w_i f(x_i)`.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            ((i.max(j)) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

/// `E f(X)` for `X ~ N(mu, sigma^2)` by Gauss-Hermite quadrature.
pub fn normal_expectation(rule: &[(f64, f64)], mu: f64, sigma: f64, f: impl Fn(f64) -> f64) -> f64 {
    let s2 = std::f64::consts::SQRT_2 * sigma;
    rule.iter().map(|(x, w)| w * f(mu + s2 * x)).sum::<f64>() / std::f64::consts::PI.sqrt()
}

/// Random positive-definite covariance of returns.
pub fn random_universe(r: &mut ChaCha8Rng, n: usize) -> AssetUniverse {
    let g = DMatrix::from_fn(n, n, |_, _| r.gen_range(-0.1..0.1));
    let cov = &g * g.transpose() + DMatrix::identity(n, n) * r.gen_range(0.001..0.01);
    let means = (0..n).map(|_| r.gen_range(0.02..0.2)).collect();
    let rows = (0..n).map(|i| (0..n).map(|j| cov[(i, j)]).collect()).collect();
    AssetUniverse::new(means, rows, Vec::new()).unwrap()
}

/// Random market with positive CAPM prices.
///
/// Value covariance is `G G'` with `G` entries in `[-5, 5]`; means are
/// `50 + U(0, 50)` plus three times each asset's covariance with the market
/// over `sd(V_M)`; the market price is `U(0.9, 1)` of the discounted mean
/// market value. Draws with a nonpositive price are rejected and redrawn.
pub fn random_market(r: &mut ChaCha8Rng, n: usize) -> MarketModel {
    loop {
        let g = DMatrix::from_fn(n, n, |_, _| r.gen_range(-5.0..5.0));
        let cov = &g * g.transpose();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| cov[(i, j)]).collect()).collect();
        let var_m: f64 = rows.iter().flatten().sum();
        if var_m <= 1e-6 {
            continue;
        }
        let sd_m = var_m.sqrt();
        let means: Vec<f64> = rows
            .iter()
            .map(|row| 50.0 + r.gen_range(0.0..50.0) + 3.0 * row.iter().sum::<f64>().abs() / sd_m)
            .collect();
        let r_rf = r.gen_range(0.0..0.1);
        let pm = means.iter().sum::<f64>() / (1.0 + r_rf) * r.gen_range(0.9..1.0);
        let m = MarketModel::new(r_rf, means, rows, pm, None).unwrap();
        if mveu_core::capm::capm_prices(&m).is_ok() {
            return m;
        }
    }
}
