//! `bellbidir` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::channels::{
    analytic_channel, analytic_channel_from_probabilities, fidelity_closed, fidelity_quadrature,
    DEFAULT_QUADRATURE_NODES,
};
use crate::error::Error;
use crate::infotheory::{
    aux_info_closed, classical_accessible_info, classical_capacity_closed, concurrence,
    concurrence_closed, info_report, info_report_for, quantum_mutual_information,
    shannon_mutual_information, total_info_closed, trigger_distribution_for,
    trigger_joint_distribution, InfoReport, DEFAULT_AXIS_GRID,
};
use crate::numerics::ComplexMatrix;
use crate::protocols::{
    apply_channel_from_choi, build_scheme_common_with, build_scheme_independent_with, choi_mixed, extract_choi,
    sample_channel_output, simulated_choi, trigger_angle, ChoiState, CorrectionAssignment,
    Direction, SchemeKind, SchemeParams, C_B, Q_A, Q_B,
};
use crate::qsim::bloch_state;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "bellbidir", version, about = "Bidirectional imperfect teleportation with a single Bell pair")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scheme at one parameter point and write a report.
    Simulate(SimulateArgs),
    /// Check simulated channels and numeric measures against closed forms.
    Verify(VerifyArgs),
    /// Write the data behind one figure as a table.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Independent,
    Common,
    Mixed,
}

impl From<Scheme> for SchemeKind {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Independent => SchemeKind::Independent,
            Scheme::Common => SchemeKind::Common,
            Scheme::Mixed => SchemeKind::Mixed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Ab,
    Ba,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Ab => Direction::AtoB,
            DirectionArg::Ba => Direction::BtoA,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    #[value(name = "3a")]
    Fig3a,
    #[value(name = "3b")]
    Fig3b,
    #[value(name = "3c")]
    Fig3c,
    #[value(name = "4")]
    Fig4,
}

/// Trigger parameters. Angles are radians; the `--p*` flags take firing
/// probabilities and override the matching angle.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = PI / 2.0, allow_negative_numbers = true)]
    pub theta1: f64,
    #[arg(long, default_value_t = PI / 2.0, allow_negative_numbers = true)]
    pub theta2: f64,
    #[arg(long, default_value_t = PI / 2.0, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, conflicts_with = "theta1")]
    pub p1: Option<f64>,
    #[arg(long, conflicts_with = "theta2")]
    pub p2: Option<f64>,
    #[arg(long, conflicts_with = "theta")]
    pub p: Option<f64>,
    /// Mixing weight of the independent-trigger scheme.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub t: f64,
}

impl ParamArgs {
    pub fn to_params(&self) -> Result<SchemeParams, Error> {
        let angle = |p: Option<f64>, theta: f64| p.map(trigger_angle).unwrap_or(Ok(theta));
        let params = SchemeParams {
            theta1: angle(self.p1, self.theta1)?,
            theta2: angle(self.p2, self.theta2)?,
            theta: angle(self.p, self.theta)?,
            t: self.t,
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Scheme::Mixed)]
    pub scheme: Scheme,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = DirectionArg::Ab)]
    pub direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Points per angle axis for the independent scheme; the common scheme uses 2·grid − 1.
    #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u32).range(2..))]
    pub grid: u32,
    #[arg(long, default_value_t = 20170417)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u32).range(2..))]
    pub trajectories: u32,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub figure: Figure,
    #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u32).range(2..))]
    pub points: u32,
    /// Unused by the deterministic sweeps; accepted for uniform invocation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid parameters: {0}")]
    Params(#[from] Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Params(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

/// Formats like C's `%.12g`.
pub fn format_number(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..DIGITS).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Bool(b) => json!(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(h, c)| (h.to_string(), c.to_json()))
                    .collect::<serde_json::Map<_, _>>();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("serializable");
        s.push('\n');
        s
    }
}

fn linspace(points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points).map(|i| i as f64 / last).collect()
}

/// Data for one figure, rows in ascending parameter order.
pub fn sweep_table(figure: Figure, points: usize) -> Result<Table, CliError> {
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let grid = linspace(points);
    let fid = |kind, p1, p2, p, t, dir| -> Result<f64, Error> {
        Ok(fidelity_closed(&analytic_channel_from_probabilities(kind, p1, p2, p, t, dir)?))
    };
    let table = match figure {
        Figure::Fig3a => {
            let mut rows = Vec::with_capacity(points * points);
            for &p1 in &grid {
                for &p2 in &grid {
                    let k = SchemeKind::Independent;
                    rows.push(vec![
                        Cell::Num(p1),
                        Cell::Num(p2),
                        Cell::Num(fid(k, p1, p2, 0.5, 1.0, Direction::AtoB)?),
                        Cell::Num(fid(k, p1, p2, 0.5, 1.0, Direction::BtoA)?),
                    ]);
                }
            }
            Table { header: vec!["p1", "p2", "F_ab", "F_ba"], rows }
        }
        Figure::Fig3b => {
            let rows = grid
                .iter()
                .map(|&p| {
                    let k = SchemeKind::Common;
                    Ok(vec![
                        Cell::Num(p),
                        Cell::Num(fid(k, 0.5, 0.5, p, 0.0, Direction::AtoB)?),
                        Cell::Num(fid(k, 0.5, 0.5, p, 0.0, Direction::BtoA)?),
                    ])
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Table { header: vec!["p", "F_ab", "F_ba"], rows }
        }
        Figure::Fig3c => {
            let rows = grid
                .iter()
                .map(|&t| {
                    Ok(vec![
                        Cell::Num(t),
                        Cell::Num(fid(SchemeKind::Mixed, 0.5, 0.5, 0.5, t, Direction::AtoB)?),
                    ])
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Table { header: vec!["t", "F"], rows }
        }
        Figure::Fig4 => {
            let rows = grid
                .iter()
                .map(|&t| {
                    let r = info_report(t)?;
                    Ok(vec![
                        Cell::Num(t),
                        Cell::Num(r.i_aux),
                        Cell::Num(r.i_tot),
                        Cell::Num(r.i_class),
                        Cell::Num(r.discord),
                        Cell::Num(r.concurrence),
                        Cell::Num(r.i_coh),
                        Cell::Num(r.min_pt_eigenvalue),
                        Cell::Bool(r.entanglement_breaking),
                    ])
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Table {
                header: vec![
                    "t",
                    "i_aux",
                    "i_tot",
                    "i_class",
                    "discord",
                    "concurrence",
                    "i_coh",
                    "min_pt_eig",
                    "entanglement_breaking",
                ],
                rows,
            }
        }
    };
    Ok(table)
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamsReport {
    pub theta1: f64,
    pub theta2: f64,
    pub theta: f64,
    pub t: f64,
    pub p1: f64,
    pub p2: f64,
    pub p: f64,
    pub direction: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChoiReport {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ChoiReport {
    fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&crate::numerics::C64) -> f64| {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        ChoiReport {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub scheme: SchemeKind,
    pub params: ParamsReport,
    pub choi: ChoiReport,
    pub q: f64,
    pub q_analytic: f64,
    pub fidelity: f64,
    pub fidelity_closed: f64,
    pub info: InfoReport,
    pub tool_version: &'static str,
}

/// Simulates the circuit(s), extracts the Choi state and evaluates every measure on it.
pub fn simulate_report(kind: SchemeKind, params: &SchemeParams, dir: Direction) -> Result<SimulationReport, Error> {
    params.validate()?;
    let choi = simulated_choi(kind, params, dir)?;
    let q = choi.werner_weight();
    let fidelity = fidelity_quadrature(
        |th, ph| apply_channel_from_choi(&choi, &bloch_state(th, ph).density_matrix()),
        DEFAULT_QUADRATURE_NODES,
    )?;
    let analytic = analytic_channel(kind, params, dir)?;
    let effective_t = match kind {
        SchemeKind::Independent => 1.0,
        SchemeKind::Common => 0.0,
        SchemeKind::Mixed => params.t,
    };
    let info = info_report_for(effective_t, &choi, &trigger_distribution_for(kind, params)?)?;
    Ok(SimulationReport {
        scheme: kind,
        params: ParamsReport {
            theta1: params.theta1,
            theta2: params.theta2,
            theta: params.theta,
            t: params.t,
            p1: params.p1(),
            p2: params.p2(),
            p: params.p(),
            direction: dir.to_string(),
        },
        choi: ChoiReport::from_matrix(choi.matrix()),
        q,
        q_analytic: analytic.q(),
        fidelity,
        fidelity_closed: fidelity_closed(&analytic),
        info,
        tool_version: TOOL_VERSION,
    })
}

impl SimulationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// Scalar fields as a one-row table.
    pub fn to_table(&self) -> Table {
        let i = &self.info;
        Table {
            header: vec![
                "theta1", "theta2", "theta", "t", "q", "fidelity", "i_aux", "i_tot", "i_class",
                "discord", "concurrence", "i_coh", "min_pt_eig", "entanglement_breaking",
            ],
            rows: vec![vec![
                Cell::Num(self.params.theta1),
                Cell::Num(self.params.theta2),
                Cell::Num(self.params.theta),
                Cell::Num(self.params.t),
                Cell::Num(self.q),
                Cell::Num(self.fidelity),
                Cell::Num(i.i_aux),
                Cell::Num(i.i_tot),
                Cell::Num(i.i_class),
                Cell::Num(i.discord),
                Cell::Num(i.concurrence),
                Cell::Num(i.i_coh),
                Cell::Num(i.min_pt_eigenvalue),
                Cell::Bool(i.entanglement_breaking),
            ]],
        }
    }
}

/// One verification check: the largest observed deviation against its tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub grid: usize,
    pub seed: u64,
    pub trajectories: usize,
    pub assignment: CorrectionAssignment,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            grid: 9,
            seed: 20170417,
            trajectories: 10_000,
            assignment: CorrectionAssignment::Standard,
        }
    }
}

fn max_over<I: IntoIterator<Item = Result<f64, Error>>>(it: I) -> Result<f64, Error> {
    it.into_iter().try_fold(0.0f64, |acc, x| Ok(acc.max(x?)))
}

fn angle_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect()
}

const DIRECTIONS: [Direction; 2] = [Direction::AtoB, Direction::BtoA];

/// Runs every check; `assignment` lets tests corrupt the circuit on purpose.
pub fn run_verification(cfg: &VerifyConfig) -> Result<Vec<CheckResult>, Error> {
    let mut checks = Vec::new();
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    let ind_angles = angle_grid(cfg.grid);
    let com_angles = angle_grid(2 * cfg.grid - 1);

    let mut ind_dev: f64 = 0.0;
    let mut marginal_dev: f64 = 0.0;
    let mut fid_dev: f64 = 0.0;
    let mut exchange_dev: f64 = 0.0;
    for &a in &ind_angles {
        for &b in &ind_angles {
            let params = SchemeParams::independent(a, b);
            let circuit = build_scheme_independent_with(&params, cfg.assignment)?;
            let swapped = build_scheme_independent_with(&SchemeParams::independent(b, a), cfg.assignment)?;
            for dir in DIRECTIONS {
                let choi = extract_choi(&circuit, dir.input_label(), dir.output_label())?;
                let analytic = analytic_channel(SchemeKind::Independent, &params, dir)?;
                ind_dev = ind_dev.max(choi.trace_distance(&analytic.choi())?);
                marginal_dev = marginal_dev.max(choi.reduced_reference().max_abs_diff(&half)?);
                let rev = dir.reversed();
                let mirrored = extract_choi(&swapped, rev.input_label(), rev.output_label())?;
                exchange_dev = exchange_dev.max(choi.matrix().max_abs_diff(mirrored.matrix())?);
                if dir == Direction::AtoB {
                    let f = fidelity_quadrature(
                        |th, ph| apply_channel_from_choi(&choi, &bloch_state(th, ph).density_matrix()),
                        DEFAULT_QUADRATURE_NODES,
                    )?;
                    fid_dev = fid_dev.max((f - fidelity_closed(&analytic)).abs());
                }
            }
        }
    }
    checks.push(CheckResult { name: "independent scheme channel (Choi trace distance)", max_deviation: ind_dev, tolerance: 1e-10 });

    let mut com_dev: f64 = 0.0;
    for &th in &com_angles {
        let params = SchemeParams::common(th);
        let circuit = build_scheme_common_with(&params, cfg.assignment)?;
        let mirrored_circuit = build_scheme_common_with(&SchemeParams::common(PI - th), cfg.assignment)?;
        for dir in DIRECTIONS {
            let choi = extract_choi(&circuit, dir.input_label(), dir.output_label())?;
            let analytic = analytic_channel(SchemeKind::Common, &params, dir)?;
            com_dev = com_dev.max(choi.trace_distance(&analytic.choi())?);
            marginal_dev = marginal_dev.max(choi.reduced_reference().max_abs_diff(&half)?);
            let rev = dir.reversed();
            let mirrored = extract_choi(&mirrored_circuit, rev.input_label(), rev.output_label())?;
            exchange_dev = exchange_dev.max(choi.matrix().max_abs_diff(mirrored.matrix())?);
        }
    }
    checks.push(CheckResult { name: "common scheme channel (Choi trace distance)", max_deviation: com_dev, tolerance: 1e-10 });
    checks.push(CheckResult { name: "direction exchange symmetry", max_deviation: exchange_dev, tolerance: 1e-10 });
    checks.push(CheckResult { name: "Choi reference marginal is I/2", max_deviation: marginal_dev, tolerance: 1e-10 });
    checks.push(CheckResult { name: "fidelity quadrature vs closed form", max_deviation: fid_dev, tolerance: 1e-9 });

    let ts = linspace(101);
    let sym = |t: f64| -> Result<ChoiState, Error> {
        Ok(analytic_channel(SchemeKind::Mixed, &SchemeParams::symmetric(t), Direction::AtoB)?.choi())
    };
    checks.push(CheckResult {
        name: "auxiliary information closed form",
        max_deviation: max_over(ts.iter().map(|&t| {
            Ok((aux_info_closed(t)? - shannon_mutual_information(&trigger_joint_distribution(t)?)).abs())
        }))?,
        tolerance: 1e-12,
    });
    checks.push(CheckResult {
        name: "total information closed form",
        max_deviation: max_over(ts.iter().map(|&t| Ok((total_info_closed(t)? - quantum_mutual_information(&sym(t)?)?).abs())))?,
        tolerance: 1e-10,
    });
    checks.push(CheckResult {
        name: "classical capacity closed form",
        max_deviation: max_over(ts.iter().map(|&t| {
            Ok((classical_capacity_closed(t)? - classical_accessible_info(&sym(t)?, DEFAULT_AXIS_GRID)?.bits).abs())
        }))?,
        tolerance: 1e-6,
    });
    checks.push(CheckResult {
        name: "concurrence closed form",
        max_deviation: max_over(ts.iter().map(|&t| Ok((concurrence_closed(t)? - concurrence(sym(t)?.matrix())?).abs())))?,
        tolerance: 1e-9,
    });

    checks.push(CheckResult {
        name: "sampled feed-forward vs deferred measurement (sigmas)",
        max_deviation: sampling_check(cfg)?,
        tolerance: 3.0,
    });
    Ok(checks)
}

/// Worst deviation, in standard errors, of sampled outputs from the
/// deterministic channel at three parameter points.
pub fn sampling_check(cfg: &VerifyConfig) -> Result<f64, Error> {
    let half = PI / 2.0;
    let inputs = [(Q_A, bloch_state(1.1, 0.7)), (Q_B, bloch_state(2.3, -1.9))];
    let rho_a = inputs[0].1.density_matrix();
    let ind = build_scheme_independent_with(&SchemeParams::independent(half, half), cfg.assignment)?;
    let com = build_scheme_common_with(&SchemeParams::common(half), cfg.assignment)?;
    let choi_ind = extract_choi(&ind, Q_A, C_B)?;
    let choi_com = extract_choi(&com, Q_A, C_B)?;
    let choi_mix = choi_mixed(0.5, &choi_ind, &choi_com)?;

    let cases: [(Vec<(f64, &_)>, &ChoiState); 3] = [
        (vec![(1.0, &ind)], &choi_ind),
        (vec![(1.0, &com)], &choi_com),
        (vec![(0.5, &ind), (0.5, &com)], &choi_mix),
    ];
    let mut worst: f64 = 0.0;
    for (k, (mixture, choi)) in cases.iter().enumerate() {
        let sampled = sample_channel_output(mixture, &inputs, C_B, cfg.trajectories, cfg.seed.wrapping_add(k as u64))?;
        let expected = apply_channel_from_choi(choi, &rho_a)?;
        worst = worst.max(sampled.max_sigma_deviation(&expected, 1e-12)?);
    }
    Ok(worst)
}

fn render_checks(checks: &[CheckResult]) -> String {
    let mut s = String::new();
    for c in checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{status}  {:<55} max_dev={:.3e}  tol={:.0e}", c.name, c.max_deviation, c.tolerance);
    }
    let all = checks.iter().all(CheckResult::passed);
    let _ = writeln!(s, "{}", if all { "PASS: all checks" } else { "FAIL: some checks did not pass" });
    s
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Executes a parsed command and returns the process exit code.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Simulate(args) => {
            let params = args.params.to_params()?;
            let report = simulate_report(args.scheme.into(), &params, args.direction.into())?;
            let text = match args.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_table().to_csv(),
            };
            emit(&text, args.out.as_ref())?;
            Ok(EXIT_OK)
        }
        Command::Verify(args) => {
            let cfg = VerifyConfig {
                grid: args.grid as usize,
                seed: args.seed,
                trajectories: args.trajectories as usize,
                assignment: CorrectionAssignment::Standard,
            };
            let checks = run_verification(&cfg)?;
            emit(&render_checks(&checks), None)?;
            Ok(if checks.iter().all(CheckResult::passed) { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Sweep(args) => {
            let table = sweep_table(args.figure, args.points as usize)?;
            let text = match args.format {
                Format::Csv => table.to_csv(),
                Format::Json => table.to_json(),
            };
            emit(&text, args.out.as_ref())?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bellbidir: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting_matches_printf_g() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.75), "0.75");
        assert_eq!(format_number(0.625), "0.625");
        assert_eq!(format_number(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_number(-0.125), "-0.125");
        assert_eq!(format_number(1e-5), "1e-05");
        assert_eq!(format_number(1.5e-17), "1.5e-17");
        assert_eq!(format_number(123456.0), "123456");
        assert_eq!(format_number(1e12), "1e+12");
        assert_eq!(format_number(0.0001), "0.0001");
    }

    #[test]
    fn fig3c_first_row() {
        let t = sweep_table(Figure::Fig3c, 5).unwrap();
        assert_eq!(t.rows[0], vec![Cell::Num(0.0), Cell::Num(0.75)]);
        assert_eq!(t.rows.len(), 5);
    }

    #[test]
    fn fig3a_unidirectional_corner() {
        let t = sweep_table(Figure::Fig3a, 3).unwrap();
        let row = t.rows.iter().find(|r| r[0] == Cell::Num(1.0) && r[1] == Cell::Num(0.0)).unwrap();
        assert_eq!(row[2], Cell::Num(1.0));
        assert_eq!(row[3], Cell::Num(0.5));
        assert_eq!(t.rows.len(), 9);
    }

    #[test]
    fn csv_layout() {
        let csv = sweep_table(Figure::Fig3b, 3).unwrap().to_csv();
        assert_eq!(csv, "p,F_ab,F_ba\n0,0.5,1\n0.5,0.75,0.75\n1,1,0.5\n");
    }

    #[test]
    fn rejects_single_point() {
        assert!(matches!(sweep_table(Figure::Fig4, 1), Err(CliError::Usage(_))));
    }

    #[test]
    fn probability_flags_override_angles() {
        let args = ParamArgs { theta1: 0.0, theta2: 0.0, theta: 0.0, p1: Some(1.0), p2: None, p: Some(0.5), t: 0.2 };
        let params = args.to_params().unwrap();
        assert!((params.p1() - 1.0).abs() < 1e-15);
        assert_eq!(params.p2(), 0.0);
        assert!((params.p() - 0.5).abs() < 1e-15);
        let bad = ParamArgs { t: 1.5, ..args };
        assert!(bad.to_params().is_err());
    }
}
