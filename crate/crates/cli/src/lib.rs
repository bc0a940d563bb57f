//! Command-line front end for `mveu_core`.
//!
//! Every subcommand writes JSON (default) or CSV. Failures are reported as
//! `{"error": code, "message": text}` on standard error with exit code 1 for
//! domain and input errors and 2 for usage errors.

use std::fs;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mveu_core::borch::{self, Branch};
use mveu_core::capm;
use mveu_core::distributions::{self, DiscreteAsset, MomentPair};
use mveu_core::dominance::{self, DominanceVerdict};
use mveu_core::frontier::{self, AssetUniverse, Portfolio, UniverseInput};
use mveu_core::indifference::{self, MeritFunction};
use mveu_core::MarketModel;
use serde_json::{json, Value};

/// Environment variable overriding the two-point verification tolerance.
pub const TOL_ENV: &str = "MVEU_TOL";

#[derive(Debug)]
pub enum CliError {
    Core(mveu_core::Error),
    Input(String),
    Io(String),
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Input(_) => "input",
            CliError::Io(_) => "io",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Input(m) | CliError::Io(m) | CliError::Usage(m) => m.clone(),
        }
    }
}

impl From<mveu_core::Error> for CliError {
    fn from(e: mveu_core::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "mveu", version, about = "Mean-variance versus expected-utility toolkit")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Input JSON file, or `-` for standard input.
    #[arg(long, global = true, help_heading = "Global options")]
    input: Option<String>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json, help_heading = "Global options")]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long, global = true, help_heading = "Global options")]
    output: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two-point assets matching two (mean, variance) targets, with the dominance verdict.
    Borch(BorchArgs),
    /// Indifference-curve samples in the (sigma, mu) plane.
    Curves(CurvesArgs),
    /// Pairwise first- and second-order dominance and the undominated set.
    Dominate,
    /// Minimum-variance frontier, optionally with the tangency portfolio.
    Frontier(FrontierArgs),
    /// CAPM prices, betas and the security-market-line round trip.
    Capm,
    /// Probability mixture of two assets.
    Mixture(MixtureArgs),
    /// Heat-equation residual of a merit function on a (sigma, mu) grid.
    Chipman(ChipmanArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BranchArg {
    Primary,
    Secondary,
}

#[derive(Debug, Args)]
struct BorchArgs {
    /// Mean of the first target.
    #[arg(long, allow_hyphen_values = true)]
    mu1: f64,
    /// Variance of the first target.
    #[arg(long)]
    var1: f64,
    /// Mean of the second target.
    #[arg(long, allow_hyphen_values = true)]
    mu2: f64,
    /// Variance of the second target.
    #[arg(long)]
    var2: f64,
    /// Which root of the moment equations to use.
    #[arg(long, value_enum)]
    branch: BranchArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CurveKind {
    Buridan,
    Quadratic,
    Cara,
}

#[derive(Debug, Args)]
struct CurvesArgs {
    #[arg(long, value_enum)]
    kind: CurveKind,
    /// Buridan: mean of the zero-risk point on the curve.
    #[arg(long, allow_hyphen_values = true)]
    mu0: Option<f64>,
    /// Buridan: standard deviation of the anchor point.
    #[arg(long)]
    sigma1: Option<f64>,
    /// Buridan: mean of the anchor point.
    #[arg(long, allow_hyphen_values = true)]
    mu1: Option<f64>,
    /// Quadratic: bliss point of u(x) = 2 a x - x^2.
    #[arg(long)]
    a: Option<f64>,
    /// Quadratic and CARA: expected-utility level of the contour.
    #[arg(long, allow_hyphen_values = true)]
    level: Option<f64>,
    /// CARA: absolute risk aversion.
    #[arg(long)]
    kappa: Option<f64>,
    /// CARA: largest sigma sampled.
    #[arg(long)]
    sigma_max: Option<f64>,
    /// Sample points along the curve.
    #[arg(long, default_value_t = indifference::DEFAULT_SAMPLES)]
    n: usize,
}

#[derive(Debug, Args)]
struct FrontierArgs {
    /// Number of evenly spaced target means.
    #[arg(long, default_value_t = 50)]
    points: usize,
    /// Lowest target mean; defaults to the smallest asset mean.
    #[arg(long, allow_hyphen_values = true)]
    mu_min: Option<f64>,
    /// Highest target mean; defaults to the largest asset mean.
    #[arg(long, allow_hyphen_values = true)]
    mu_max: Option<f64>,
    /// Risk-free rate; adds the tangency portfolio.
    #[arg(long, allow_hyphen_values = true)]
    rf: Option<f64>,
}

#[derive(Debug, Args)]
struct MixtureArgs {
    /// Weight on asset `a`; overrides an `alpha` field in the input.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeritKind {
    Quadratic,
    Cara,
    MeanMinusSigma,
}

#[derive(Debug, Args)]
struct ChipmanArgs {
    #[arg(long, value_enum)]
    merit: MeritKind,
    /// Quadratic merit: bliss point.
    #[arg(long)]
    a: Option<f64>,
    /// CARA merit: absolute risk aversion.
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    sigma_min: f64,
    #[arg(long, default_value_t = 2.0)]
    sigma_max: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    mu_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    mu_max: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Fixed finite-difference step; scaled default when omitted.
    #[arg(long)]
    h: Option<f64>,
}

/// Streams the CLI talks to.
pub struct Streams<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
///
/// `tol_env` is the raw value of [`TOL_ENV`], if set.
pub fn run<I, S>(args: I, tol_env: Option<String>, io: Streams<'_>) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(io.stdout, "{}", e.render());
                return 0;
            }
            return report(io.stderr, &CliError::Usage(e.render().to_string()));
        }
    };
    match execute(&cli, tol_env, io.stdin) {
        Ok(text) => match emit(&cli, &text, io.stdout) {
            Ok(()) => 0,
            Err(e) => report(io.stderr, &e),
        },
        Err(e) => report(io.stderr, &e),
    }
}

fn report(stderr: &mut dyn Write, e: &CliError) -> i32 {
    let body = json!({ "error": e.code(), "message": e.message() });
    let _ = writeln!(stderr, "{body}");
    e.exit_code()
}

fn emit(cli: &Cli, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{path}: {e}"))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("standard output: {e}"))),
    }
}

/// Output of one subcommand before formatting.
struct Report {
    json: Value,
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json)
                    .expect("report values are finite JSON");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.header.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(",");
                s.push('\n');
                for row in &self.rows {
                    let line: Vec<String> = row
                        .iter()
                        .map(|c| match c {
                            // same shortest round-trip text as the JSON output
                            Cell::Num(v) => Value::from(*v).to_string(),
                            Cell::Text(t) => csv_field(t),
                            Cell::Empty => String::new(),
                        })
                        .collect();
                    s.push_str(&line.join(","));
                    s.push('\n');
                }
                s
            }
        }
    }
}

fn execute(cli: &Cli, tol_env: Option<String>, stdin: &mut dyn Read) -> CliResult<String> {
    let report = match &cli.command {
        Command::Borch(a) => borch_cmd(a, tol_env)?,
        Command::Curves(a) => curves_cmd(a)?,
        Command::Dominate => dominate_cmd(&read_input(cli, stdin)?)?,
        Command::Frontier(a) => frontier_cmd(a, &read_input(cli, stdin)?)?,
        Command::Capm => capm_cmd(&read_input(cli, stdin)?)?,
        Command::Mixture(a) => mixture_cmd(a, &read_input(cli, stdin)?)?,
        Command::Chipman(a) => chipman_cmd(a)?,
    };
    Ok(report.render(cli.format))
}

fn read_input(cli: &Cli, stdin: &mut dyn Read) -> CliResult<Value> {
    let (text, origin) = match cli.input.as_deref() {
        None => {
            return Err(CliError::Usage(
                "this subcommand needs --input <FILE> (or `--input -` for standard input)".into(),
            ))
        }
        Some("-") => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| CliError::Io(format!("standard input: {e}")))?;
            (s, "standard input".to_string())
        }
        Some(path) => (
            fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?,
            path.to_string(),
        ),
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{origin}: malformed JSON: {e}")))
}

fn decode<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::Input(format!("invalid {what}: {e}")))
}

fn need(v: Option<f64>, flag: &str, kind: &str) -> CliResult<f64> {
    v.ok_or_else(|| CliError::Usage(format!("--kind {kind} requires --{flag}")))
}

fn borch_cmd(a: &BorchArgs, tol_env: Option<String>) -> CliResult<Report> {
    let tol = match tol_env {
        None => borch::VERIFY_TOL,
        Some(raw) => raw
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0 && t.is_finite())
            .ok_or_else(|| {
                CliError::Input(format!("{TOL_ENV} must be a positive number, got `{raw}`"))
            })?,
    };
    let m1 = MomentPair::from_variance(a.mu1, a.var1)?;
    let m2 = MomentPair::from_variance(a.mu2, a.var2)?;
    let branch = match a.branch {
        BranchArg::Primary => Branch::Primary,
        BranchArg::Secondary => Branch::Secondary,
    };
    let c = borch::construct_with_tol(m1, m2, branch, tol)?;
    let verdict = borch::paradox_verdict(&c);
    let assets = [c.asset1, c.asset2];
    let json = json!({
        "branch": c.branch,
        "tolerance": tol,
        "targets": [moments_json(m1), moments_json(m2)],
        "x": c.asset1.x,
        "p": c.asset1.p,
        "q": c.asset1.q,
        "y1": c.asset1.y,
        "y2": c.asset2.y,
        "assets": assets.iter().map(|t| serde_json::to_value(t.to_discrete()).unwrap()).collect::<Vec<_>>(),
        "verdict": verdict,
    });
    let rows = assets
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let m = t.moments();
            vec![(i + 1).into(), t.x.into(), t.p.into(), t.y.into(), m.mu.into(), m.sigma.into()]
        })
        .collect();
    Ok(Report {
        json,
        header: strings(&["asset", "x", "p", "y", "mu", "sigma"]),
        rows,
    })
}

fn moments_json(m: MomentPair) -> Value {
    json!({ "mu": m.mu, "sigma": m.sigma, "variance": m.variance() })
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn curve_report(mut json: Value, points: &[MomentPair]) -> Report {
    json["points"] = points.iter().map(|m| json!({ "sigma": m.sigma, "mu": m.mu })).collect();
    Report {
        json,
        header: strings(&["sigma", "mu"]),
        rows: points.iter().map(|m| vec![m.sigma.into(), m.mu.into()]).collect(),
    }
}

fn curves_cmd(a: &CurvesArgs) -> CliResult<Report> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    match a.kind {
        CurveKind::Buridan => {
            let mu0 = need(a.mu0, "mu0", "buridan")?;
            let anchor = MomentPair::new(need(a.mu1, "mu1", "buridan")?, need(a.sigma1, "sigma1", "buridan")?)?;
            let c = indifference::buridan_circle(mu0, anchor)?;
            let (cs, cm) = c.center();
            let meta = json!({ "kind": "buridan", "mu0": c.mu0, "rho0": c.rho0, "center": { "sigma": cs, "mu": cm } });
            Ok(curve_report(meta, &c.sample(a.n)))
        }
        CurveKind::Quadratic => {
            let c = indifference::quadratic_circles(need(a.a, "a", "quadratic")?, need(a.level, "level", "quadratic")?)?;
            let meta = json!({ "kind": "quadratic", "a": c.a, "level": c.eu_level, "radius": c.radius() });
            Ok(curve_report(meta, &c.sample(a.n)))
        }
        CurveKind::Cara => {
            let c = indifference::cara_parabolas(need(a.kappa, "kappa", "cara")?, need(a.level, "level", "cara")?)?;
            let sigma_max = need(a.sigma_max, "sigma-max", "cara")?;
            let meta = json!({ "kind": "cara", "kappa": c.kappa, "level": c.level, "sigma_max": sigma_max });
            Ok(curve_report(meta, &c.sample(a.n, sigma_max)))
        }
    }
}

fn verdict_json(v: &DominanceVerdict) -> Value {
    json!({ "relation": v.relation, "witness": v.witness })
}

fn relation_name(v: &DominanceVerdict) -> String {
    serde_json::to_value(v.relation).unwrap().as_str().unwrap_or_default().to_string()
}

fn dominate_cmd(input: &Value) -> CliResult<Report> {
    let list = match input {
        Value::Array(_) => input.clone(),
        Value::Object(map) if map.contains_key("assets") => map["assets"].clone(),
        _ => {
            return Err(CliError::Input(
                "expected a list of assets or an object with an `assets` list".into(),
            ))
        }
    };
    let assets: Vec<DiscreteAsset> = decode(list, "asset list")?;
    let undominated = dominance::fsd_filter(&assets)?;
    let mut pairs = Vec::new();
    let mut rows = Vec::new();
    for (i, a) in assets.iter().enumerate() {
        for (j, b) in assets.iter().enumerate() {
            if i == j {
                continue;
            }
            let (f, s) = (dominance::fsd(a, b), dominance::ssd(a, b));
            pairs.push(json!({ "a": i, "b": j, "fsd": verdict_json(&f), "ssd": verdict_json(&s) }));
            rows.push(vec![
                i.into(),
                j.into(),
                Cell::Text(relation_name(&f)),
                f.witness.into(),
                Cell::Text(relation_name(&s)),
                s.witness.into(),
            ]);
        }
    }
    let moments: Vec<Value> = assets.iter().map(|a| moments_json(a.moments())).collect();
    Ok(Report {
        json: json!({ "moments": moments, "pairs": pairs, "undominated": undominated }),
        header: strings(&["a", "b", "fsd", "fsd_witness", "ssd", "ssd_witness"]),
        rows,
    })
}

fn portfolio_json(p: &Portfolio) -> Value {
    json!({ "mu": p.moments.mu, "sigma": p.moments.sigma, "weights": p.weights })
}

fn frontier_cmd(a: &FrontierArgs, input: &Value) -> CliResult<Report> {
    let raw: UniverseInput = decode(input.clone(), "universe")?;
    let u = AssetUniverse::try_from(raw)?;
    if a.points == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    let means = u.means();
    let lo = a.mu_min.unwrap_or_else(|| means.min());
    let hi = a.mu_max.unwrap_or_else(|| means.max());
    let grid: Vec<f64> = if a.points == 1 || lo == hi {
        vec![lo]
    } else {
        (0..a.points)
            .map(|k| lo + (hi - lo) * (k as f64 / (a.points - 1) as f64))
            .collect()
    };
    let points = frontier::frontier_sample(&u, &grid)?;
    let gmv = frontier::global_min_variance(&u);
    let mut json = json!({
        "labels": u.labels(),
        "points": points.iter().map(|p| {
            let mut v = portfolio_json(&p.portfolio);
            v["efficient"] = json!(p.efficient);
            v
        }).collect::<Vec<_>>(),
        "global_min_variance": portfolio_json(&gmv),
    });
    if let Some(rf) = a.rf {
        let t = frontier::tangency_portfolio(&u, rf)?;
        let mut v = portfolio_json(&t);
        v["r_rf"] = json!(rf);
        v["sharpe"] = json!((t.moments.mu - rf) / t.moments.sigma);
        json["tangency"] = v;
    }
    let mut header = strings(&["mu", "sigma"]);
    header.extend(u.labels().iter().map(|l| format!("w_{l}")));
    let rows = points
        .iter()
        .map(|p| {
            let mut row: Vec<Cell> = vec![p.moments.mu.into(), p.moments.sigma.into()];
            row.extend(p.portfolio.weights.iter().map(|&w| Cell::from(w)));
            row
        })
        .collect();
    Ok(Report { json, header, rows })
}

fn capm_cmd(input: &Value) -> CliResult<Report> {
    let m: MarketModel = decode(input.clone(), "market")?;
    let report = match &m.prices {
        Some(prices) => capm::round_trip_at(&m, prices)?,
        None => capm::capm_round_trip(&m)?,
    };
    let rows = (0..m.len())
        .map(|j| {
            vec![
                (j + 1).into(),
                report.prices[j].into(),
                report.betas[j].into(),
                report.residuals[j].into(),
            ]
        })
        .collect();
    Ok(Report {
        json: json!({
            "prices": report.prices,
            "betas": report.betas,
            "residuals": report.residuals,
            "max_residual": report.max_residual,
        }),
        header: strings(&["asset", "price", "beta", "residual"]),
        rows,
    })
}

fn mixture_cmd(a: &MixtureArgs, input: &Value) -> CliResult<Report> {
    let field = |k: &str| {
        input
            .get(k)
            .cloned()
            .ok_or_else(|| CliError::Input(format!("mixture input needs an `{k}` asset")))
    };
    let first: DiscreteAsset = decode(field("a")?, "asset `a`")?;
    let second: DiscreteAsset = decode(field("b")?, "asset `b`")?;
    let alpha = match a.alpha {
        Some(v) => v,
        None => input.get("alpha").and_then(Value::as_f64).ok_or_else(|| {
            CliError::Usage("mixing weight missing: pass --alpha or an `alpha` field".into())
        })?,
    };
    let mixed = distributions::mixture(&first, &second, alpha)?;
    let (mu, var) = distributions::mixture_mean_variance(first.moments(), second.moments(), alpha);
    let rows = mixed.outcomes().iter().map(|o| vec![o.x.into(), o.p.into()]).collect();
    Ok(Report {
        json: json!({
            "alpha": alpha,
            "outcomes": mixed.outcomes(),
            "mean": mixed.mean(),
            "variance": mixed.variance(),
            "formula": { "mean": mu, "variance": var },
        }),
        header: strings(&["x", "p"]),
        rows,
    })
}

fn chipman_cmd(a: &ChipmanArgs) -> CliResult<Report> {
    let merit = match a.merit {
        MeritKind::Quadratic => MeritFunction::quadratic(
            a.a.ok_or_else(|| CliError::Usage("--merit quadratic requires --a".into()))?,
        ),
        MeritKind::Cara => MeritFunction::cara_normal(
            a.kappa.ok_or_else(|| CliError::Usage("--merit cara requires --kappa".into()))?,
        ),
        MeritKind::MeanMinusSigma => MeritFunction::mean_minus_sigma(),
    };
    if a.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let axis = |lo: f64, hi: f64| -> Vec<f64> {
        if a.n == 1 {
            vec![lo]
        } else {
            (0..a.n).map(|k| lo + (hi - lo) * (k as f64 / (a.n - 1) as f64)).collect()
        }
    };
    let mut points = Vec::new();
    let mut rows = Vec::new();
    let mut worst = 0.0_f64;
    for sigma in axis(a.sigma_min, a.sigma_max) {
        for mu in axis(a.mu_min, a.mu_max) {
            let h = a.h.unwrap_or_else(|| indifference::default_step(sigma, mu));
            let s = indifference::chipman_sides(&merit, sigma, mu, h)?;
            worst = worst.max(s.residual.abs());
            points.push(json!({ "sigma": sigma, "mu": mu, "h": h, "lhs": s.lhs, "rhs": s.rhs, "residual": s.residual }));
            rows.push(vec![sigma.into(), mu.into(), h.into(), s.lhs.into(), s.rhs.into(), s.residual.into()]);
        }
    }
    Ok(Report {
        json: json!({ "merit": merit.descriptor(), "max_abs_residual": worst, "points": points }),
        header: strings(&["sigma", "mu", "h", "lhs", "rhs", "residual"]),
        rows,
    })
}
