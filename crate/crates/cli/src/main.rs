//! `mubcorr` command-line interface.
//!
//! Exit codes: 0 success, 2 usage or parse errors, 3 unsupported domain,
//! 4 numerical failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mubcorr::corr::{c_n_mum, MeasurementSetting};
use mubcorr::detect::{
    first_undetected, format_sig, noise_scan_state, r_quantity, threshold_table, write_csv, DetectionVerdict,
    Functional, ScanConfig, SettingPolicy, ThresholdKind,
};
use mubcorr::maxcheck::DecompositionVerdict;
use mubcorr::states::{ghz_mes_state, qutrit_mes_state, three_tangle, StateParams};
use mubcorr::{
    build_mum_set, c_n_given, c_n_optimize, catalog_state, certify_theorem2, lemma1_check, lemma2_necessary_check,
    noise_scan, p_max, pauli_eigenbasis, q_basis, CorrelationReport, Error, OptimizeConfig, PauliIndex, State,
    StateSpec, C64,
};

#[derive(Parser, Debug)]
#[command(name = "mubcorr", version, about = "Correlations in mutually unbiased bases and entanglement detection")]
struct Cli {
    /// Worker threads for parallel scans and restarts.
    #[arg(long, global = true, env = "MUBCORR_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate C_N for a state.
    Compute(ComputeArgs),
    /// Maximize C_N over local rotations of the standard MUB set.
    Optimize(ComputeArgs),
    /// Scan white-noise mixtures and apply the detection thresholds.
    Detect(DetectArgs),
    /// Noise level where R(p;d) = 1 for the noisy GHZ_{d,3} state.
    Pmax(PmaxArgs),
    /// Regenerate the threshold table or figure data.
    Reproduce(ReproduceArgs),
    /// Search for a Pauli-symmetry certificate of maximal correlation.
    Certify(CertifyArgs),
    /// Test the maximally-entangled decomposition across one-vs-rest cuts.
    #[command(name = "check-lemma1")]
    CheckLemma1(CheckArgs),
}

#[derive(Args, Debug, Clone)]
struct StateArgs {
    /// Catalog family: phi-plus, ghz, w, product, aharonov, psi33, ame4,
    /// ame-abc, classical, counterexample4, ghz-mes, qutrit-mes.
    #[arg(long, conflicts_with = "state_file")]
    state: Option<String>,
    /// JSON state file.
    #[arg(long)]
    state_file: Option<PathBuf>,
    /// Local dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Number of sites.
    #[arg(long)]
    n: Option<usize>,
    /// Complex coefficient, `re` or `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    a: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    b: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    c: Option<C64>,
    /// Filter parameters, one value or three comma-separated.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    x: Option<[f64; 3]>,
    /// Complex `P_z` parameter, `re` or `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Option<C64>,
    /// Pauli index `k1,k2`.
    #[arg(long, value_parser = parse_pair)]
    k: Option<(usize, usize)>,
}

#[derive(Args, Debug, Clone)]
struct OptArgs {
    /// Optimizer restarts.
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Optimizer seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Setting {
    Pauli,
    Optimize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FunctionalArg {
    /// The C_N average mutual information.
    C,
    /// The J_N Levi-Civita functional.
    J,
}

#[derive(Args, Debug)]
struct ComputeArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Number of bases per site.
    #[arg(long = "N", default_value_t = 2)]
    n_bases: usize,
    #[arg(long, value_enum)]
    setting: Option<Setting>,
    /// Use a complete set of mutually unbiased measurements with this efficiency.
    #[arg(long, conflicts_with = "setting")]
    kappa: Option<f64>,
    #[command(flatten)]
    opt: OptArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long = "N", default_value_t = 2)]
    n_bases: usize,
    /// Noise grid `start:stop:step`.
    #[arg(long, default_value = "0:0.2:0.01", value_parser = parse_grid)]
    noise: Grid,
    #[arg(long, value_enum)]
    setting: Option<Setting>,
    /// Closed-form values (GHZ_{3,3} with N ≤ 4, GHZ_{d,3} with N = 2).
    #[arg(long, conflicts_with_all = ["setting", "kappa"])]
    analytic: bool,
    #[arg(long, conflicts_with = "setting")]
    kappa: Option<f64>,
    #[arg(long, value_enum, default_value = "c")]
    functional: FunctionalArg,
    #[command(flatten)]
    opt: OptArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct PmaxArgs {
    /// Dimensions.
    #[arg(long, num_args = 1.., default_values_t = [3usize])]
    d: Vec<usize>,
    /// Tolerance on |R − 1|.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    Table1,
    Fig1,
    Fig2,
    Fig4,
    Fig5,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(value_enum)]
    target: Target,
    /// Parameter grid `start:stop:step` (x for fig1/fig2, p for fig4).
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Grid>,
    #[arg(long, default_value_t = 3)]
    dmin: usize,
    #[arg(long, default_value_t = 1000)]
    dmax: usize,
    #[arg(long, default_value_t = 40)]
    points: usize,
    #[arg(long, value_enum)]
    setting: Option<Setting>,
    #[command(flatten)]
    opt: OptArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long = "N", default_value_t = 2)]
    n_bases: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
struct Grid(Vec<f64>);

/// A failure with its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unsupported(_) => 3,
            Error::Numerical(_) => 4,
            Error::DimensionMismatch(_) | Error::InvalidState(_) | Error::InvalidArgument(_) | Error::Parse(_) => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected 're' or 're,im', got '{s}'")),
    }
}

fn parse_triple(s: &str) -> std::result::Result<[f64; 3], String> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match vals.as_slice() {
        [v] => Ok([*v; 3]),
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(format!("expected one or three values, got '{s}'")),
    }
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let vals: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match vals.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected 'k1,k2', got '{s}'")),
    }
}

/// `start:stop:step`; points `start + i·step` up to `stop + step/2`.
fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let vals: Vec<f64> = s
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect::<std::result::Result<_, _>>()?;
    let [start, stop, step] = vals.as_slice() else {
        return Err(format!("expected 'start:stop:step', got '{s}'"));
    };
    if !(step.is_finite() && *step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(format!("invalid grid '{s}'"));
    }
    let count = ((stop - start) / step + 0.5).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(format!("grid '{s}' has too many points"));
    }
    // round away float noise so printed grid values are clean
    let points = (0..count)
        .map(|i| ((start + step * i as f64) * 1e12).round() / 1e12)
        .filter(|v| *v <= stop + step / 2.0)
        .collect();
    Ok(Grid(points))
}

fn load_state(args: &StateArgs) -> CliResult<(State, Option<StateSpec>, String)> {
    if let Some(path) = &args.state_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        let state = State::from_json_str(&text)
            .map_err(|e| Failure::usage(format!("invalid state file {}: {e}", path.display())))?;
        return Ok((state, None, path.display().to_string()));
    }
    let name = args
        .state
        .as_deref()
        .ok_or_else(|| Failure::usage("one of --state or --state-file is required"))?;
    let params = StateParams {
        d: args.d,
        n: args.n,
        a: args.a,
        b: args.b,
        c: args.c,
        x: args.x,
        z: args.z,
        k: args.k,
    };
    let spec = StateSpec::from_family(name, &params)?;
    let state = catalog_state(&spec)?;
    Ok((state, Some(spec.clone()), spec.family().to_string()))
}

fn pauli_note() {
    eprintln!(
        "note: using the standard Pauli eigenbasis setting (a lower bound on the optimum); \
         pass --setting optimize to search local rotations"
    );
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn optimize_config(opt: &OptArgs) -> OptimizeConfig {
    OptimizeConfig { restarts: opt.restarts, seed: opt.seed, ..Default::default() }
}

fn run_compute(args: &ComputeArgs, force_optimize: bool) -> CliResult<()> {
    let (state, _, label) = load_state(&args.state)?;
    let setting = if force_optimize { Some(Setting::Optimize) } else { args.setting };
    let report: CorrelationReport = match (args.kappa, setting) {
        (Some(kappa), _) => {
            let d = state
                .layout()
                .uniform_dim()
                .ok_or_else(|| Failure::usage("measurement sets need equal local dimensions"))?;
            c_n_mum(&state, &build_mum_set(d, kappa)?)?
        }
        (None, Some(Setting::Optimize)) => c_n_optimize(&state, args.n_bases, &optimize_config(&args.opt))?,
        (None, s) => {
            if s.is_none() {
                pauli_note();
            }
            let mut r = c_n_given(&state, &MeasurementSetting::standard(state.layout(), args.n_bases)?)?;
            r.setting = "pauli".into();
            r
        }
    };
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&serde_json::json!({
            "state": label,
            "dims": state.layout().dims(),
            "report": report,
        })),
        Format::Csv => {
            let mut s = String::from("state,n_sites,N,c_value,setting,seed");
            for k in 0..report.n_bases {
                write!(s, ",Q_{}", k + 1).unwrap();
            }
            s.push('\n');
            let seed = report.optimizer.as_ref().map(|o| o.seed.to_string()).unwrap_or_default();
            write!(
                s,
                "{label},{},{},{},{},{seed}",
                report.n_sites,
                report.n_bases,
                format_sig(report.c_value),
                report.setting
            )
            .unwrap();
            for k in 0..report.n_bases {
                write!(s, ",{}", format_sig(report.q_value(k))).unwrap();
            }
            s.push('\n');
            s
        }
    };
    emit(&args.output.out, &text)
}

fn scan_config(args: &DetectArgs) -> ScanConfig {
    let policy = if args.analytic {
        SettingPolicy::Analytic
    } else if let Some(kappa) = args.kappa {
        SettingPolicy::Mum { kappa }
    } else {
        match args.setting {
            Some(Setting::Optimize) => SettingPolicy::Optimize(optimize_config(&args.opt)),
            Some(Setting::Pauli) => SettingPolicy::Pauli,
            None => {
                pauli_note();
                SettingPolicy::Pauli
            }
        }
    };
    let functional = match args.functional {
        FunctionalArg::C => Functional::CorrelationN,
        FunctionalArg::J => Functional::JN,
    };
    ScanConfig { n_bases: args.n_bases, policy, functional }
}

fn scan_points(state: &State, spec: Option<&StateSpec>, grid: &[f64], cfg: &ScanConfig) -> CliResult<Vec<DetectionVerdict>> {
    Ok(match spec {
        Some(spec) => noise_scan(spec, grid, cfg)?,
        None => noise_scan_state(state, grid, cfg)?,
    })
}

/// Bisects the detection flag between the last detected and the first
/// undetected grid point.
fn refine_crossing(
    state: &State,
    spec: Option<&StateSpec>,
    cfg: &ScanConfig,
    rows: &[DetectionVerdict],
    tripartite: bool,
) -> CliResult<Option<f64>> {
    let flag = |r: &DetectionVerdict| if tripartite { r.tripartite } else { r.entangled };
    let Some(hi_p) = first_undetected(rows, tripartite) else {
        return Ok(None);
    };
    let hi_idx = rows.iter().position(|r| r.p == hi_p).expect("grid point");
    let (mut lo, mut hi) = (rows[hi_idx - 1].p, hi_p);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        let row = &scan_points(state, spec, &[mid], cfg)?[0];
        if flag(row) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn describe(p: Option<f64>) -> String {
    p.map(|v| format!("{v}")).unwrap_or_else(|| "none in grid".into())
}

fn run_detect(args: &DetectArgs) -> CliResult<()> {
    let (state, spec, _) = load_state(&args.state)?;
    let cfg = scan_config(args);
    let rows = scan_points(&state, spec.as_ref(), &args.noise.0, &cfg)?;
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&mut buf, &rows).map_err(|e| Failure::usage(e.to_string()))?;
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
        Format::Json => to_json(&rows),
    };
    emit(&args.output.out, &text)?;
    let cheap = !matches!(cfg.policy, SettingPolicy::Optimize(_));
    let mut summary = String::from("summary:");
    let kinds: &[(bool, &str)] = if state.layout().n_sites() == 3 {
        &[(false, "entanglement"), (true, "genuine tripartite entanglement")]
    } else {
        &[(false, "entanglement")]
    };
    for (i, &(tripartite, name)) in kinds.iter().enumerate() {
        if i > 0 {
            summary.push(';');
        }
        let first = first_undetected(&rows, tripartite);
        write!(summary, " first undetected p for {name} = {}", describe(first)).unwrap();
        if cheap {
            if let Some(c) = refine_crossing(&state, spec.as_ref(), &cfg, &rows, tripartite)? {
                write!(summary, " (crossing at p = {c:.6})").unwrap();
            }
        }
    }
    eprintln!("{summary}");
    Ok(())
}

fn run_pmax(args: &PmaxArgs) -> CliResult<()> {
    let values: Vec<(usize, f64)> = args
        .d
        .iter()
        .map(|&d| p_max(d, args.tol).map(|p| (d, p)))
        .collect::<mubcorr::Result<_>>()?;
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("d,p_max\n");
            for (d, p) in &values {
                writeln!(s, "{d},{}", format_sig(*p)).unwrap();
            }
            s
        }
        Format::Json => to_json(
            &values
                .iter()
                .map(|(d, p)| serde_json::json!({ "d": d, "p_max": p }))
                .collect::<Vec<_>>(),
        ),
    };
    emit(&args.output.out, &text)
}

/// A table of rows rendered to CSV or JSON records.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Empty,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.columns.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|c| match c {
                            Cell::Num(v) => format_sig(*v),
                            Cell::Int(v) => v.to_string(),
                            Cell::Text(t) => t.clone(),
                            Cell::Empty => String::new(),
                        })
                        .collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let records: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut m = serde_json::Map::new();
                        for (name, c) in self.columns.iter().zip(row) {
                            let v = match c {
                                Cell::Num(v) => serde_json::json!(v),
                                Cell::Int(v) => serde_json::json!(v),
                                Cell::Text(t) => serde_json::json!(t),
                                Cell::Empty => serde_json::Value::Null,
                            };
                            m.insert(name.clone(), v);
                        }
                        serde_json::Value::Object(m)
                    })
                    .collect();
                to_json(&records)
            }
        }
    }
}

fn table1() -> Table {
    let mut t = Table::new(&["kind", "N", "d", "value", "value_in_log_d", "source", "note"]);
    for cell in threshold_table() {
        let kind = match cell.kind {
            ThresholdKind::Separable => "separable",
            ThresholdKind::Biseparable => "biseparable",
        };
        let num = |v: Option<f64>| v.map(Cell::Num).unwrap_or(Cell::Empty);
        let source = cell
            .source
            .map(|s| Cell::Text(serde_json::to_value(s).unwrap().as_str().unwrap().to_string()))
            .unwrap_or(Cell::Empty);
        let note = cell.note.map(|n| Cell::Text(format!("\"{}\"", n.replace('"', "'")))).unwrap_or(Cell::Empty);
        t.rows.push(vec![
            Cell::Text(kind.into()),
            Cell::Int(cell.n_bases),
            Cell::Int(cell.d),
            num(cell.value),
            num(cell.in_log_d),
            source,
            note,
        ]);
    }
    t
}

fn c_value(state: &State, n: usize, setting: Option<Setting>, opt: &OptArgs) -> CliResult<f64> {
    Ok(match setting {
        Some(Setting::Optimize) => c_n_optimize(state, n, &optimize_config(opt))?.c_value,
        _ => c_n_given(state, &MeasurementSetting::standard(state.layout(), n)?)?.c_value,
    })
}

fn fig1(grid: &[f64], setting: Option<Setting>, opt: &OptArgs) -> CliResult<Table> {
    let mut t = Table::new(&["x", "C2", "Q_x", "Q_y", "Q_z", "tau3", "setting"]);
    let bases = [(1, 0), (1, 1), (0, 1)].map(|(a, b)| pauli_eigenbasis(2, PauliIndex::new(a, b)).unwrap());
    let label = if setting == Some(Setting::Optimize) { "optimized" } else { "pauli" };
    for &x in grid {
        let psi = match ghz_mes_state([x; 3], C64::new(1.0, 0.0)) {
            Ok(psi) => psi,
            Err(Error::InvalidArgument(msg)) => {
                eprintln!("skipping x = {x}: {msg}");
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let tau = three_tangle(&psi)?;
        let state: State = psi.into();
        let mut row = vec![Cell::Num(x), Cell::Num(c_value(&state, 2, setting, opt)?)];
        for b in &bases {
            row.push(Cell::Num(q_basis(&state, &[b, b, b])?.average));
        }
        row.push(Cell::Num(tau));
        row.push(Cell::Text(label.into()));
        t.rows.push(row);
    }
    Ok(t)
}

fn fig2(grid: &[f64], state_args: &StateArgs, setting: Option<Setting>, opt: &OptArgs) -> CliResult<Table> {
    let mut t = Table::new(&["x", "C4", "Q_Z", "Q_X", "Q_XZ", "Q_XZZ", "setting"]);
    let (k1, k2) = state_args.k.unwrap_or((1, 0));
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let abc = (state_args.a.unwrap_or(one), state_args.b.unwrap_or(zero), state_args.c.unwrap_or(zero));
    let label = if setting == Some(Setting::Optimize) { "optimized" } else { "pauli" };
    for &x in grid {
        let psi = match qutrit_mes_state([x; 3], PauliIndex::new(k1, k2), abc) {
            Ok(psi) => psi,
            Err(Error::InvalidArgument(msg)) => {
                eprintln!("skipping x = {x}: {msg}");
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let state: State = psi.into();
        let pauli = c_n_given(&state, &MeasurementSetting::standard(state.layout(), 4)?)?;
        let c4 = match setting {
            Some(Setting::Optimize) => c_n_optimize(&state, 4, &optimize_config(opt))?.c_value,
            _ => pauli.c_value,
        };
        let mut row = vec![Cell::Num(x), Cell::Num(c4)];
        row.extend((0..4).map(|k| Cell::Num(pauli.q_value(k))));
        row.push(Cell::Text(label.into()));
        t.rows.push(row);
    }
    Ok(t)
}

const FIG4_DIMS: [usize; 5] = [3, 6, 12, 24, 48];

fn fig4(grid: &[f64]) -> CliResult<Table> {
    let names: Vec<String> = FIG4_DIMS.iter().map(|d| format!("R_d{d}")).collect();
    let mut cols = vec!["p"];
    cols.extend(names.iter().map(String::as_str));
    let mut t = Table::new(&cols);
    for &p in grid {
        let mut row = vec![Cell::Num(p)];
        for &d in &FIG4_DIMS {
            row.push(Cell::Num(r_quantity(p, d)?));
        }
        t.rows.push(row);
    }
    Ok(t)
}

fn fig5(dmin: usize, dmax: usize, points: usize) -> CliResult<Table> {
    if dmin < 2 || dmax < dmin || points == 0 {
        return Err(Failure::usage(format!(
            "need 2 ≤ dmin ≤ dmax and points ≥ 1, got {dmin}, {dmax}, {points}"
        )));
    }
    let mut dims: Vec<usize> = (0..points)
        .map(|i| {
            if points == 1 {
                return dmin;
            }
            let t = i as f64 / (points - 1) as f64;
            (dmin as f64 * (dmax as f64 / dmin as f64).powf(t)).round() as usize
        })
        .collect();
    dims.dedup();
    let mut t = Table::new(&["d", "p_max"]);
    for d in dims {
        t.rows.push(vec![Cell::Int(d), Cell::Num(p_max(d, 1e-9)?)]);
    }
    Ok(t)
}

fn run_reproduce(args: &ReproduceArgs) -> CliResult<()> {
    let grid = |default: &str| args.grid.clone().unwrap_or_else(|| parse_grid(default).expect("valid default")).0;
    let no_state = StateArgs {
        state: None,
        state_file: None,
        d: None,
        n: None,
        a: None,
        b: None,
        c: None,
        x: None,
        z: None,
        k: None,
    };
    let table = match args.target {
        Target::Table1 => table1(),
        Target::Fig1 => fig1(&grid("0:0.45:0.01"), args.setting, &args.opt)?,
        Target::Fig2 => fig2(&grid("0:0.3:0.01"), &no_state, args.setting, &args.opt)?,
        Target::Fig4 => fig4(&grid("0:0.2:0.005"))?,
        Target::Fig5 => fig5(args.dmin, args.dmax, args.points)?,
    };
    emit(&args.output.out, &table.render(args.output.format.unwrap_or(Format::Csv)))
}

fn run_certify(args: &CertifyArgs) -> CliResult<()> {
    let (state, _, label) = load_state(&args.state)?;
    let psi = state
        .as_pure()
        .ok_or_else(|| Failure::usage("the symmetry certificate needs a pure state"))?;
    let verdict = certify_theorem2(psi, args.n_bases)?;
    let text = to_json(&serde_json::json!({
        "state": label,
        "N": args.n_bases,
        "certification": verdict,
    }));
    emit(&args.out, &text)
}

fn decomposition_json(verdict: &DecompositionVerdict) -> serde_json::Value {
    match verdict {
        DecompositionVerdict::Decomposes(m) => serde_json::json!({
            "decomposes": true,
            "weights": m.weights,
            "residual": m.residual,
            "reconstruction_error": m.reconstruction_error,
        }),
        DecompositionVerdict::NoDecomposition { residual } => serde_json::json!({
            "decomposes": false,
            "residual": residual,
        }),
    }
}

fn run_check(args: &CheckArgs) -> CliResult<()> {
    let (state, _, label) = load_state(&args.state)?;
    let dims = state.layout().dims().to_vec();
    let text = if dims.len() == 2 {
        // the larger side plays the role of C^{d'}
        let rho = state.to_density();
        let (rho, split, cut) = if dims[0] >= dims[1] {
            (rho, (dims[0], dims[1]), "site 0 | site 1")
        } else {
            (rho.permute_sites(&[1, 0])?, (dims[1], dims[0]), "site 1 | site 0")
        };
        let mut v = decomposition_json(&lemma1_check(&rho, split)?);
        v["state"] = serde_json::json!(label);
        v["cut"] = serde_json::json!(cut);
        to_json(&v)
    } else {
        let flags = lemma2_necessary_check(&state)?;
        to_json(&serde_json::json!({
            "state": label,
            "cuts": flags.iter().enumerate().map(|(l, &ok)| serde_json::json!({"site": l, "decomposes": ok})).collect::<Vec<_>>(),
            "necessary_condition_holds": flags.iter().all(|&f| f),
        }))
    };
    emit(&args.out, &text)
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Compute(a) => run_compute(a, false),
        Command::Optimize(a) => run_compute(a, true),
        Command::Detect(a) => run_detect(a),
        Command::Pmax(a) => run_pmax(a),
        Command::Reproduce(a) => run_reproduce(a),
        Command::Certify(a) => run_certify(a),
        Command::CheckLemma1(a) => run_check(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
