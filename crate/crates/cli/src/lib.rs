//! `sobolev-lab`: command-line front end for the laboratory.
//!
//! Exit codes: `0` when every check passes, `1` when some check fails (the
//! failing CSV row is printed to stderr), `2` on usage or numerical errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use sobolev_core::deficit::{deficit_report, exponent_check, proof_constants, tail_lower_bound_check};
use sobolev_core::experiments::{
    constant_scan, generate_family, log_grid, sharpness_experiment, FamilyKind, FamilySpec, ScanTheorem,
};
use sobolev_core::params::derive_params;
use sobolev_core::pointwise::{estimate_c1_with, estimate_gamma_p_with, sweep, Inequality};
use sobolev_core::profile::{DomainBall, RadialProfile, SampledProfile};
use sobolev_core::projection::project;
use sobolev_core::quadrature::QuadConfig;
use sobolev_core::report::{fmt_num, to_json, Table};
use sobolev_core::{Lab64, LabError, Params64};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Default sample count of the pointwise sweeps and constant estimates.
pub const DEFAULT_POINTWISE_SAMPLES: usize = 100_000;

const DEFAULT_LAMBDAS: [f64; 4] = [2.0, 5.0, 10.0, 50.0];
const DEFAULT_RADII: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
/// Larger concentrations reach the small-deficit regime the lemma assumes.
const DEFAULT_LEMMA_LAMBDAS: [f64; 9] = [2.0, 5.0, 10.0, 50.0, 100.0, 500.0, 1e3, 5e3, 1e4];
const DEFAULT_TAIL_LAMBDAS: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];
const DEFAULT_PLATEAU_WIDTHS: [f64; 4] = [0.1, 0.25, 0.5, 0.9];
const KAPPAS: [f64; 3] = [0.1, 0.5, 0.9];

#[derive(Debug, Parser)]
#[command(name = "sobolev-lab", version, about = "Numerical checks of sharp Sobolev stability inequalities")]
struct Cli {
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// TOML file supplying defaults for any flag (flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bubble constants and the constants of the weak-norm lemma.
    Constants(ConstantsArgs),
    /// Norms, deficit and remainders of a profile read from CSV.
    Norms(NormsArgs),
    /// Nearest bubble to a profile read from CSV.
    Project(ProjectArgs),
    /// Evaluates one inequality over a family and reports violations.
    Check(CheckArgs),
    /// Fits the exponent of deficit against distance near the bubble.
    Sharpness(SharpnessArgs),
}

#[derive(Debug, Clone, Args)]
struct NpArgs {
    /// Dimension.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Sobolev exponent, 1 < p < N.
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Debug, Args)]
struct ConstantsArgs {
    #[command(flatten)]
    np: NpArgs,
    /// Lower bound on the gradient norm (default: that of the bubble).
    #[arg(long)]
    c0: Option<f64>,
    /// Upper bound on the gradient norm (default: that of the bubble).
    #[arg(long = "C0")]
    c0_upper: Option<f64>,
}

#[derive(Debug, Args)]
struct NormsArgs {
    /// Profile CSV with a `# N= p= R=` header.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    np: NpArgs,
    /// Domain radius (default: the header's R).
    #[arg(long = "R")]
    radius: Option<f64>,
}

#[derive(Debug, Args)]
struct ProjectArgs {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    np: NpArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Theorem {
    Thm11,
    Cor12,
    Thm13,
    Fz19,
    Lemma21,
    Tail29,
    Pointwise,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    theorem: Option<Theorem>,
    #[command(flatten)]
    np: NpArgs,
    /// truncated-bubble, perturbed-bubble, plateau or custom-csv.
    #[arg(long)]
    family: Option<String>,
    /// Concentrations λ (comma separated).
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    /// Domain radii R (comma separated).
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    /// Perturbation sizes, or plateau width fractions.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Profile files of a custom-csv family.
    #[arg(long, value_delimiter = ',')]
    csv: Option<Vec<PathBuf>>,
    /// Exponent of the strong-norm remainder (cor12).
    #[arg(long)]
    t: Option<f64>,
    /// Random samples per pointwise inequality.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SharpnessArgs {
    #[command(flatten)]
    np: NpArgs,
    #[arg(long)]
    eps_min: Option<f64>,
    #[arg(long)]
    eps_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Contents of a `--config` file. Keys are the flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct Config {
    tol: Option<f64>,
    #[serde(rename = "N")]
    n: Option<usize>,
    p: Option<f64>,
    c0: Option<f64>,
    #[serde(rename = "C0")]
    c0_upper: Option<f64>,
    #[serde(rename = "in")]
    input: Option<PathBuf>,
    #[serde(rename = "R")]
    radius: Option<f64>,
    theorem: Option<Theorem>,
    family: Option<String>,
    lambdas: Option<Vec<f64>>,
    radii: Option<Vec<f64>>,
    eps: Option<Vec<f64>>,
    csv: Option<Vec<PathBuf>>,
    t: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    eps_min: Option<f64>,
    eps_max: Option<f64>,
    steps: Option<usize>,
}

type Res<T> = std::result::Result<T, String>;

fn lab_err(e: LabError) -> String {
    e.to_string()
}

fn required<T>(flag: Option<T>, cfg: Option<T>, name: &str) -> Res<T> {
    flag.or(cfg).ok_or_else(|| format!("missing required option --{name}"))
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_ERROR
        }
    }
}

fn load_config(path: Option<&Path>) -> Res<Config> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn make_lab(n: usize, p: f64, tol: Option<f64>) -> Res<Lab64> {
    let params = derive_params(n, p).map_err(lab_err)?;
    let mut cfg = QuadConfig::default();
    if let Some(t) = tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(format!("--tol must lie in (0, 1) (got {t})"));
        }
        cfg.rel_tol = t;
    }
    Lab64::new(params, cfg).map_err(lab_err)
}

fn dispatch(cli: Cli) -> Res<i32> {
    let mut cfg = load_config(cli.config.as_deref())?;
    let tol = cli.tol.or(cfg.tol.take());
    match cli.command {
        Command::Constants(a) => cmd_constants(a, cfg, tol),
        Command::Norms(a) => cmd_norms(a, cfg, tol),
        Command::Project(a) => cmd_project(a, cfg, tol),
        Command::Check(a) => cmd_check(a, cfg, tol),
        Command::Sharpness(a) => cmd_sharpness(a, cfg, tol),
    }
}

/// Two-column `quantity,value` table.
fn key_values(pairs: &[(&str, String)]) -> Table {
    let mut t = Table::new(&["quantity", "value"]);
    t.rows = pairs.iter().map(|(k, v)| vec![k.to_string(), v.clone()]).collect();
    t
}

fn print_table(t: &Table) -> Res<()> {
    print!("{}", t.to_csv_string().map_err(lab_err)?);
    Ok(())
}

/// CSV goes to `out` (summary to stdout) or to stdout (summary to stderr).
fn emit(table: &Table, out: Option<&Path>, summary: &str) -> Res<()> {
    match out {
        Some(path) => {
            let f = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let mut w = BufWriter::new(f);
            table.write_csv(&mut w).map_err(lab_err)?;
            w.flush().map_err(|e| e.to_string())?;
            println!("{summary}");
        }
        None => {
            print_table(table)?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_constants(a: ConstantsArgs, mut cfg: Config, tol: Option<f64>) -> Res<i32> {
    let n = required(a.np.n, cfg.n.take(), "N")?;
    let p = required(a.np.p, cfg.p.take(), "p")?;
    let lab = make_lab(n, p, tol)?;
    let params = lab.params;
    let c = lab.constants;
    let mut rows = vec![
        ("N", n.to_string()),
        ("p", fmt_num(params.p)),
        ("p_star", fmt_num(params.pstar)),
        ("p_bar", fmt_num(params.pbar)),
        ("gamma", fmt_num(params.gamma)),
        ("zeta", fmt_num(params.zeta)),
        ("weak_norm_valid", params.weak_norm_valid.to_string()),
        ("gamma_np", fmt_num(c.gamma_np)),
        ("sharp_s", fmt_num(c.sharp_s)),
        ("grad_norm_u", fmt_num(c.grad_norm_u)),
        ("crit_norm_u", fmt_num(c.crit_norm_u)),
        ("weak_norm_u", fmt_num(c.weak_norm_u.value())),
        ("sphere_measure", fmt_num(c.sphere_measure)),
    ];
    if params.weak_norm_valid {
        let c0 = a.c0.or(cfg.c0.take()).unwrap_or(c.grad_norm_u);
        let big = a.c0_upper.or(cfg.c0_upper.take()).unwrap_or(c.grad_norm_u);
        let k = proof_constants(&lab, c0, big).map_err(lab_err)?;
        let e = exponent_check(&params);
        rows.extend([
            ("c0", fmt_num(k.c0)),
            ("C0", fmt_num(k.C0)),
            ("rho", fmt_num(k.rho)),
            ("K", fmt_num(k.K)),
            ("C_under", fmt_num(k.C_under)),
            ("B", fmt_num(k.B)),
            ("C_under_corrected", fmt_num(k.C_under_corrected)),
            ("B_corrected", fmt_num(k.B_corrected)),
            ("tail_exponent_derived", fmt_num(e.derived)),
            ("tail_exponent_displayed", fmt_num(e.displayed)),
            ("tail_exponent_matches", e.matches.to_string()),
        ]);
    }
    print_table(&key_values(&rows))?;
    Ok(EXIT_PASS)
}

fn read_profile(path: &Path) -> Res<(sobolev_core::profile::CsvHeader<f64>, SampledProfile<f64>)> {
    let f = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    SampledProfile::read_csv(BufReader::new(f)).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_norms(a: NormsArgs, mut cfg: Config, tol: Option<f64>) -> Res<i32> {
    let path = required(a.input, cfg.input.take(), "in")?;
    let (header, samples) = read_profile(&path)?;
    let n = a.np.n.or(cfg.n.take()).unwrap_or(header.n);
    let p = a.np.p.or(cfg.p.take()).unwrap_or(header.p);
    let radius = a.radius.or(cfg.radius.take()).unwrap_or(header.radius);
    let lab = make_lab(n, p, tol)?;
    let dom = DomainBall::new(n, radius).map_err(lab_err)?;
    let u = RadialProfile::from_samples(samples);
    let r = deficit_report(&lab, &u, &dom).map_err(lab_err)?;
    let mut rows = vec![
        ("N", n.to_string()),
        ("p", fmt_num(p)),
        ("R", fmt_num(radius)),
        ("grad_p", fmt_num(r.grad_p)),
        ("crit", fmt_num(r.crit)),
        ("weak", fmt_num(r.weak)),
        ("deficit", fmt_num(r.deficit)),
        ("remainder_thm11", fmt_num(r.remainder_thm11)),
        ("remainder_thm13_cap", fmt_num(r.remainder_thm13_cap)),
        ("distance", fmt_num(r.distance)),
    ];
    for (k, v) in &r.ratios {
        rows.push((k.as_str(), fmt_num(*v)));
    }
    print_table(&key_values(&rows))?;
    Ok(EXIT_PASS)
}

fn cmd_project(a: ProjectArgs, mut cfg: Config, tol: Option<f64>) -> Res<i32> {
    let path = required(a.input, cfg.input.take(), "in")?;
    let (header, samples) = read_profile(&path)?;
    let n = a.np.n.or(cfg.n.take()).unwrap_or(header.n);
    let p = a.np.p.or(cfg.p.take()).unwrap_or(header.p);
    let lab = make_lab(n, p, tol)?;
    let u = RadialProfile::from_samples(samples);
    let r = project(&lab.bubble, &u, &lab.cfg).map_err(lab_err)?;
    let rows = [
        ("c_opt", fmt_num(r.c_opt)),
        ("lambda_opt", fmt_num(r.lambda_opt)),
        ("distance", fmt_num(r.distance)),
        ("evaluations", r.evaluations.to_string()),
        ("converged", r.converged.to_string()),
    ];
    print_table(&key_values(&rows))?;
    Ok(EXIT_PASS)
}

/// Flags of `check` after merging with the config file.
struct CheckSettings {
    theorem: Theorem,
    params: Params64,
    family: Option<FamilyKind>,
    lambdas: Option<Vec<f64>>,
    radii: Option<Vec<f64>>,
    eps: Option<Vec<f64>>,
    csv: Option<Vec<PathBuf>>,
    t: Option<f64>,
    samples: usize,
    seed: u64,
    out: Option<PathBuf>,
}

fn cmd_check(a: CheckArgs, mut cfg: Config, tol: Option<f64>) -> Res<i32> {
    let theorem = required(a.theorem, cfg.theorem.take(), "theorem")?;
    let n = required(a.np.n, cfg.n.take(), "N")?;
    let p = required(a.np.p, cfg.p.take(), "p")?;
    let params = derive_params(n, p).map_err(lab_err)?;
    let family = match a.family.or(cfg.family.take()) {
        Some(s) => Some(s.parse::<FamilyKind>().map_err(lab_err)?),
        None => None,
    };
    let s = CheckSettings {
        theorem,
        params,
        family,
        lambdas: a.lambdas.or(cfg.lambdas.take()),
        radii: a.radii.or(cfg.radii.take()),
        eps: a.eps.or(cfg.eps.take()),
        csv: a.csv.or(cfg.csv.take()),
        t: a.t.or(cfg.t.take()),
        samples: a.samples.or(cfg.samples.take()).unwrap_or(DEFAULT_POINTWISE_SAMPLES),
        seed: a.seed.or(cfg.seed.take()).unwrap_or(0),
        out: a.out.or(cfg.out.take()),
    };
    match theorem {
        Theorem::Tail29 => check_tail(&s, tol),
        Theorem::Pointwise => check_pointwise(&s),
        _ => check_scan(&s, tol),
    }
}

fn family_spec(s: &CheckSettings) -> Res<FamilySpec<f64>> {
    let default_kind = match s.theorem {
        Theorem::Thm13 | Theorem::Fz19 => FamilyKind::PerturbedBubble,
        _ => FamilyKind::TruncatedBubble,
    };
    let radii = s.radii.clone().unwrap_or_else(|| DEFAULT_RADII.to_vec());
    let mut spec = match s.family.unwrap_or(default_kind) {
        FamilyKind::TruncatedBubble => {
            let lambdas = s.lambdas.clone().unwrap_or_else(|| {
                if s.theorem == Theorem::Lemma21 {
                    DEFAULT_LEMMA_LAMBDAS.to_vec()
                } else {
                    DEFAULT_LAMBDAS.to_vec()
                }
            });
            FamilySpec::truncated(s.params, &lambdas, &radii)
        }
        FamilyKind::PerturbedBubble => {
            let eps = match &s.eps {
                Some(e) => e.clone(),
                None => log_grid(1e-3, 1e-1, 9).map_err(lab_err)?,
            };
            FamilySpec::perturbed(s.params, &eps, s.seed)
        }
        FamilyKind::Plateau => {
            let widths = s.eps.clone().unwrap_or_else(|| DEFAULT_PLATEAU_WIDTHS.to_vec());
            FamilySpec::plateau(s.params, &radii, &widths)
        }
        FamilyKind::CustomCsv => {
            let paths = s.csv.clone().ok_or("custom-csv family needs --csv")?;
            FamilySpec::custom_csv(s.params, paths)
        }
    };
    spec.seed = s.seed;
    Ok(spec)
}

/// Prints every failing row and returns the matching exit code.
fn report_failures(failures: &[(usize, String)]) -> i32 {
    for (row, what) in failures {
        eprintln!("violation: CSV row {row}: {what}");
    }
    if failures.is_empty() {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}

fn check_scan(s: &CheckSettings, tol: Option<f64>) -> Res<i32> {
    let theorem = match s.theorem {
        Theorem::Thm11 => ScanTheorem::Thm11,
        Theorem::Cor12 => ScanTheorem::Cor12 { t: s.t.unwrap_or(1.0) },
        Theorem::Thm13 => ScanTheorem::Thm13,
        Theorem::Fz19 => ScanTheorem::Fz19,
        Theorem::Lemma21 => ScanTheorem::Lemma21,
        Theorem::Tail29 | Theorem::Pointwise => unreachable!("handled by dedicated checks"),
    };
    if matches!(s.theorem, Theorem::Thm11 | Theorem::Cor12 | Theorem::Lemma21) {
        s.params.require_weak_valid().map_err(lab_err)?;
    }
    let lab = make_lab(s.params.n, s.params.p, tol)?;
    let spec = family_spec(s)?;
    let family = generate_family(&lab, &spec).map_err(lab_err)?;
    let outcome = constant_scan(&lab, theorem, &family).map_err(lab_err)?;
    let table = Table::from_scan(&outcome.rows);
    let mut summary = json!({ "scan": outcome.summary });
    if s.theorem == Theorem::Lemma21 {
        let e = exponent_check(&s.params);
        let n = s.params.dim();
        let pm1 = s.params.p - 1.0;
        summary["tail_factor"] = json!({
            "displayed": n / pm1,
            "evaluated": pm1 / n,
            "ratio_displayed_over_evaluated": (n / pm1) / (pm1 / n),
        });
        summary["tail_exponent"] = serde_json::to_value(e).map_err(|e| e.to_string())?;
    }
    emit(&table, s.out.as_deref(), &to_json(&summary).map_err(lab_err)?)?;
    let failures: Vec<(usize, String)> = outcome
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.status() == "fail")
        .map(|(i, r)| {
            (
                i,
                format!(
                    "{} ratio {} at lambda={} R={} eps={}",
                    r.theorem,
                    fmt_num(r.ratio),
                    fmt_num(r.lambda),
                    fmt_num(r.radius),
                    fmt_num(r.eps)
                ),
            )
        })
        .collect();
    Ok(report_failures(&failures))
}

fn check_tail(s: &CheckSettings, tol: Option<f64>) -> Res<i32> {
    let lab = make_lab(s.params.n, s.params.p, tol)?;
    let lambdas = s.lambdas.clone().unwrap_or_else(|| DEFAULT_TAIL_LAMBDAS.to_vec());
    let radii = s.radii.clone().unwrap_or_else(|| vec![1.0]);
    let mut table = Table::new(&[
        "row",
        "N",
        "p",
        "lambda",
        "R",
        "lambda_R",
        "exact",
        "bound",
        "bound_displayed",
        "status",
        "status_displayed",
        "note",
    ]);
    let mut failures = Vec::new();
    let mut displayed_failures = 0usize;
    let verdict = |ok: bool| if ok { "pass" } else { "fail" }.to_string();
    let mut row = 0;
    for &radius in &radii {
        for &lambda in &lambdas {
            let head = vec![
                row.to_string(),
                s.params.n.to_string(),
                fmt_num(s.params.p),
                fmt_num(lambda),
                fmt_num(radius),
                fmt_num(lambda * radius),
            ];
            let rest = match tail_lower_bound_check(&lab, lambda, radius) {
                Ok(c) => {
                    if !c.holds {
                        failures.push((row, format!("tail mass {} below bound {}", fmt_num(c.exact), fmt_num(c.bound))));
                    }
                    if !c.holds_displayed {
                        displayed_failures += 1;
                    }
                    vec![
                        fmt_num(c.exact),
                        fmt_num(c.bound),
                        fmt_num(c.bound_displayed),
                        verdict(c.holds),
                        verdict(c.holds_displayed),
                        String::new(),
                    ]
                }
                Err(e @ LabError::Hypothesis(_)) => {
                    let nan = fmt_num(f64::NAN);
                    vec![nan.clone(), nan.clone(), nan, "filtered".into(), "filtered".into(), e.to_string()]
                }
                Err(e) => return Err(lab_err(e)),
            };
            table.push([head, rest].concat()).map_err(lab_err)?;
            row += 1;
        }
    }
    let n = s.params.dim();
    let pm1 = s.params.p - 1.0;
    let summary = json!({
        "theorem": "tail29",
        "N": s.params.n,
        "p": s.params.p,
        "rows": row,
        "failures": failures.len(),
        "displayed_bound_failures": displayed_failures,
        "tail_factor": { "displayed": n / pm1, "evaluated": pm1 / n },
        "tail_exponent": exponent_check(&s.params),
    });
    emit(&table, s.out.as_deref(), &to_json(&summary).map_err(lab_err)?)?;
    Ok(report_failures(&failures))
}

fn check_pointwise(s: &CheckSettings) -> Res<i32> {
    let p = s.params.p;
    let dim = s.params.n;
    let mut cases: Vec<(&str, Inequality<f64>, f64)> = Vec::new();
    if p >= 2.0 {
        cases.push(("upper_expansion", Inequality::Upper311 { p }, f64::NAN));
    } else {
        let g = estimate_gamma_p_with(p, s.samples, s.seed).map_err(lab_err)?;
        cases.push(("upper_expansion", Inequality::Upper312 { p, gamma: g.value }, g.value));
    }
    for kappa in KAPPAS {
        let c1 = estimate_c1_with(p, kappa, s.samples, s.seed).map_err(lab_err)?;
        cases.push((
            "lower_expansion",
            Inequality::Lower {
                r: p,
                kappa,
                c1: c1.value,
            },
            c1.value,
        ));
    }
    cases.push(("scalar_convexity", Inequality::Scalar33 { r: p }, f64::NAN));

    let mut table = Table::new(&[
        "row",
        "inequality",
        "dim",
        "exponent",
        "kappa",
        "constant",
        "samples",
        "violations",
        "min_normalized_margin",
        "status",
    ]);
    let mut failures = Vec::new();
    for (row, (name, ineq, constant)) in cases.iter().enumerate() {
        let rep = sweep(*ineq, dim, s.samples, s.seed).map_err(lab_err)?;
        let kappa = match ineq {
            Inequality::Lower { kappa, .. } => *kappa,
            _ => f64::NAN,
        };
        if rep.violations > 0 {
            failures.push((
                row,
                format!("{name}: {} violations, worst normalized margin {}", rep.violations, fmt_num(rep.min_normalized_margin)),
            ));
        }
        table
            .push(vec![
                row.to_string(),
                name.to_string(),
                dim.to_string(),
                fmt_num(p),
                fmt_num(kappa),
                fmt_num(*constant),
                rep.samples.to_string(),
                rep.violations.to_string(),
                fmt_num(rep.min_normalized_margin),
                if rep.violations == 0 { "pass" } else { "fail" }.to_string(),
            ])
            .map_err(lab_err)?;
    }
    let summary = json!({
        "theorem": "pointwise",
        "N": dim,
        "p": p,
        "seed": s.seed,
        "samples": s.samples,
        "failures": failures.len(),
    });
    emit(&table, s.out.as_deref(), &to_json(&summary).map_err(lab_err)?)?;
    Ok(report_failures(&failures))
}

fn cmd_sharpness(a: SharpnessArgs, mut cfg: Config, tol: Option<f64>) -> Res<i32> {
    let n = required(a.np.n, cfg.n.take(), "N")?;
    let p = required(a.np.p, cfg.p.take(), "p")?;
    let eps_min = a.eps_min.or(cfg.eps_min.take()).unwrap_or(1e-3);
    let eps_max = a.eps_max.or(cfg.eps_max.take()).unwrap_or(1e-1);
    let steps = a.steps.or(cfg.steps.take()).unwrap_or(9);
    let seed = a.seed.or(cfg.seed.take()).unwrap_or(0);
    let out = a.out.or(cfg.out.take());
    let lab = make_lab(n, p, tol)?;
    let grid = log_grid(eps_min, eps_max, steps).map_err(lab_err)?;
    let fit = sharpness_experiment(&lab, &grid, seed).map_err(lab_err)?;
    let mut table = Table::new(&[
        "row", "N", "p", "eps", "distance", "deficit", "grad_p", "cap", "converged", "in_fit",
    ]);
    for (i, pt) in fit.samples.iter().enumerate() {
        table
            .push(vec![
                i.to_string(),
                n.to_string(),
                fmt_num(p),
                fmt_num(pt.eps),
                fmt_num(pt.distance),
                fmt_num(pt.deficit),
                fmt_num(pt.grad),
                fmt_num(pt.cap),
                pt.converged.to_string(),
                pt.in_fit.to_string(),
            ])
            .map_err(lab_err)?;
    }
    let summary = json!({
        "N": n,
        "p": p,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual": fit.residual,
        "window": [fit.window.0, fit.window.1],
        "fit_points": fit.points.len(),
        "c_upper": fit.c_upper,
        "zeta": lab.params.zeta,
        "gamma": lab.params.gamma,
    });
    emit(&table, out.as_deref(), &to_json(&summary).map_err(lab_err)?)?;
    Ok(EXIT_PASS)
}
