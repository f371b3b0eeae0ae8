//! The `haarcorr` batch front-end.
//!
//! Every subcommand produces one [`Table`]. Output bytes are a function of
//! the parsed configuration alone: sweeps are collected in `q` order and Monte
//! Carlo runs draw from per-sample seeded streams.

pub mod output;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cobweb::{self, CobwebDiagram};
use crate::correlators::{self, ProbeMode, TimeSequence};
use crate::error::{Error, Result};
use crate::haar_mc::{self, SEED_ENV};
use crate::oracle;
use crate::otoc::{self, OtocSystem};
use crate::perm::{self, Permutation};
use crate::weingarten;

pub use output::{Cell, Format, Metadata, Table};

#[derive(Clone, Debug, Parser, Serialize)]
#[command(
    name = "haarcorr",
    version,
    about = "Haar averages of correlators, their moments, and OTOCs"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Base seed for Monte Carlo runs.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file; standard output when absent.
    #[arg(long, short, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Weingarten function, exact and leading order, per cycle type.
    Wg(WgArgs),
    /// Haar average of one correlator.
    AvgCorr(ProbeArgs),
    /// Haar moments of products of traces of powers.
    Moments(MomentsArgs),
    /// q² times the average of a product of correlators (default t and t*).
    SecondMoment(SecondMomentArgs),
    /// Leading-order, exact or sampled OTOC for a layer description.
    Otoc(OtocArgs),
    /// q-sweep of a correlator with its q²-compensated value.
    Scaling(ProbeArgs),
    /// Loop count, crossings and reduction of a chord diagram.
    Cobweb(CobwebArgs),
    /// Run a named consistency check and report pass/fail rows.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OtocMode {
    Leading,
    Exact,
    Mc,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct WgArgs {
    /// Number of U / U† pairs.
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<usize>,
    /// Restrict to the class of this permutation, in 1-based cycle notation.
    #[arg(long)]
    pub sigma: Option<String>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ProbeArgs {
    /// Comma-separated time sequence, e.g. `0,1,0,1`.
    #[arg(long, allow_hyphen_values = true)]
    pub times: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Monte Carlo sample count.
    #[arg(long = "n", default_value_t = 10_000)]
    pub n_samples: usize,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct MomentsArgs {
    /// Multiplicities of Tr(U^m), m = 1, 2, ...
    #[arg(long, value_delimiter = ',', required = true)]
    pub a: Vec<usize>,
    /// Multiplicities of Tr(U^-m).
    #[arg(long, value_delimiter = ',', required = true)]
    pub b: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long = "n", default_value_t = 10_000)]
    pub n_samples: usize,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SecondMomentArgs {
    /// Time sequence; repeat for a product of different correlators.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub times: Vec<String>,
    /// Conjugation pattern, one `+`/`-` per factor; default `+-`.
    #[arg(long, allow_hyphen_values = true)]
    pub conj: Option<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long = "n", default_value_t = 10_000)]
    pub n_samples: usize,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct OtocArgs {
    /// Layers separated by `;`, legs by `,` (`1`, `1b`, `2`, `2b`); `-` is an
    /// empty layer. The empty string is the single-step OTOC.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub layers: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<usize>,
    #[arg(long, value_enum, default_value_t = OtocMode::Exact)]
    pub mode: OtocMode,
    #[arg(long = "n", default_value_t = 10_000)]
    pub n_samples: usize,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CobwebArgs {
    /// Diagram as `2E; a-b, c-d, ...` with optional `; colors: T; marks: s,...`.
    #[arg(long, conflicts_with = "leading", required_unless_present = "leading")]
    pub diagram: Option<String>,
    /// List the leading four-arc diagrams for this T instead.
    #[arg(long)]
    pub leading: Option<usize>,
    /// Emit the reduction step log instead of the summary row.
    #[arg(long, requires = "diagram")]
    pub log: bool,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: verify::Check,
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<usize>,
    /// Number of OTOC time steps.
    #[arg(long = "T")]
    pub t: Option<usize>,
    /// Random cases or Monte Carlo samples.
    #[arg(long)]
    pub samples: Option<usize>,
}

/// Result of a run: the table and whether every check in it passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
}

impl RunConfig {
    /// SHA-256 over the configuration minus the output path.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("configuration serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn metadata(&self) -> Metadata {
        Metadata {
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION"),
            config_hash: self.config_hash(),
        }
    }
}

/// Parses arguments, runs, writes the table. Exit code 0 on success, 1 when
/// a verification fails, 2 on invalid input or I/O failure.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run_and_write(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Runs `cfg` and writes its table; returns whether all checks passed.
pub fn run_and_write(cfg: &RunConfig) -> Result<bool> {
    let outcome = run(cfg)?;
    let meta = cfg.metadata();
    match &cfg.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            output::write_table(&mut w, &outcome.table, &meta, cfg.format)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            output::write_table(&mut w, &outcome.table, &meta, cfg.format)?;
            w.flush()?;
        }
    }
    Ok(outcome.passed)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let table = match &cfg.command {
        Command::Wg(a) => wg(a)?,
        Command::AvgCorr(a) => probe_table(a, cfg.seed, false)?,
        Command::Scaling(a) => probe_table(a, cfg.seed, true)?,
        Command::Moments(a) => moments(a, cfg.seed)?,
        Command::SecondMoment(a) => second_moment(a, cfg.seed)?,
        Command::Otoc(a) => otoc_table(a, cfg.seed)?,
        Command::Cobweb(a) => cobweb_table(a)?,
        Command::Verify(a) => return verify::run(a, cfg.seed),
    };
    Ok(Outcome {
        table,
        passed: true,
    })
}

/// Sorted, deduplicated dimensions, each at least 2.
pub fn q_list(qs: &[usize]) -> Result<Vec<usize>> {
    let mut v = qs.to_vec();
    v.sort_unstable();
    v.dedup();
    match v.first() {
        None => Err(Error::Parse("empty q list".into())),
        Some(&q) if q < 2 => Err(Error::DimensionTooSmall { q, min: 2 }),
        Some(_) => Ok(v),
    }
}

fn probe_mode(mode: Mode, n_samples: usize, seed: u64) -> ProbeMode {
    match mode {
        Mode::Exact => ProbeMode::Exact,
        Mode::Mc => ProbeMode::MonteCarlo { n_samples, seed },
    }
}

fn wg(a: &WgArgs) -> Result<Table> {
    let qs = q_list(&a.q)?;
    let classes = match &a.sigma {
        Some(s) => vec![Permutation::from_cycles(s, a.n)?.cycle_type()],
        None => perm::partitions(a.n),
    };
    let mut t = Table::new(&["q", "cycle_type", "exact", "leading", "rel_gap"]);
    for &q in &qs {
        for ct in &classes {
            let sigma = perm::representative(ct);
            let exact = weingarten::wg_exact(a.n, q as f64, &sigma)?;
            let leading = weingarten::wg_leading(a.n, q as f64, &sigma)?;
            let label = ct
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("+");
            t.push(vec![
                q.into(),
                label.into(),
                exact.into(),
                leading.into(),
                ((exact - leading) / leading).abs().into(),
            ]);
        }
    }
    Ok(t)
}

fn push_probe_rows(t: &mut Table, rows: &[correlators::ProbeRow], compensated: bool) {
    for r in rows {
        let mut row = vec![r.q.into(), r.value.re.into(), r.value.im.into()];
        if compensated {
            row.push(r.compensated.into());
        }
        row.push(r.std_error.into());
        t.push(row);
    }
}

fn probe_table(a: &ProbeArgs, seed: u64, compensated: bool) -> Result<Table> {
    let qs = q_list(&a.q)?;
    let ts: TimeSequence = a.times.parse()?;
    let rows = correlators::scaling_probe(&ts, &qs, probe_mode(a.mode, a.n_samples, seed))?;
    let mut t = if compensated {
        Table::new(&["q", "re", "im", "re_times_q2", "std_err"])
    } else {
        Table::new(&["q", "re", "im", "std_err"])
    };
    push_probe_rows(&mut t, &rows, compensated);
    Ok(t)
}

fn second_moment(a: &SecondMomentArgs, seed: u64) -> Result<Table> {
    let qs = q_list(&a.q)?;
    let mut ts = a
        .times
        .iter()
        .map(|s| s.parse::<TimeSequence>())
        .collect::<Result<Vec<_>>>()?;
    if ts.len() == 1 {
        ts.push(ts[0].clone());
    }
    let conj = correlators::parse_conjugation(a.conj.as_deref().unwrap_or("+-"))?;
    if conj.len() != ts.len() {
        return Err(Error::SizeMismatch {
            left: conj.len(),
            right: ts.len(),
        });
    }
    let rows = correlators::probe(&ts, &conj, &qs, probe_mode(a.mode, a.n_samples, seed))?;
    let mut t = Table::new(&["q", "re", "im", "re_times_q2", "std_err"]);
    push_probe_rows(&mut t, &rows, true);
    Ok(t)
}

fn moments(a: &MomentsArgs, seed: u64) -> Result<Table> {
    let qs = q_list(&a.q)?;
    let expr = oracle::trace_power_expression(&a.a, &a.b);
    let rows = qs
        .par_iter()
        .map(|&q| {
            let closed = oracle::trace_power_moment(&a.a, &a.b, q)?;
            let (v, se) = match a.mode {
                Mode::Exact => (oracle::haar_average(&expr, q)?.value, 0.0),
                Mode::Mc => {
                    let e = haar_mc::estimate(&expr, q, a.n_samples, seed)?;
                    (e.mean, e.std_error())
                }
            };
            Ok(vec![
                q.into(),
                v.re.into(),
                v.im.into(),
                closed.into(),
                se.into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["q", "re", "im", "closed_form", "std_err"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn otoc_table(a: &OtocArgs, seed: u64) -> Result<Table> {
    let qs = q_list(&a.q)?;
    let layers = otoc::parse_layers(&a.layers)?;
    let rows = qs
        .par_iter()
        .map(|&q| {
            let sys = OtocSystem::with_default_z(q)?;
            let lead = sys.theorem4_value(&layers)?;
            let (plus, minus) = sys.otoc_plus_minus(&layers)?;
            let (value, se): (Option<Complex64>, Option<f64>) = match a.mode {
                OtocMode::Leading => (None, None),
                OtocMode::Exact => (Some(sys.otoc_exact(&layers)?), Some(0.0)),
                OtocMode::Mc => {
                    let e = sys.otoc_mc(&layers, a.n_samples, seed)?;
                    (Some(e.mean), Some(e.std_error()))
                }
            };
            Ok(vec![
                q.into(),
                lead.re.into(),
                lead.im.into(),
                plus.re.into(),
                minus.re.into(),
                value.map(|v| v.re).into(),
                value.map(|v| v.im).into(),
                se.into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&[
        "q",
        "leading_re",
        "leading_im",
        "plus_re",
        "minus_re",
        "value_re",
        "value_im",
        "std_err",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

const COBWEB_COLUMNS: [&str; 15] = [
    "diagram",
    "vertices",
    "chords",
    "loops",
    "crossings",
    "planar",
    "removed_parallel",
    "removed_bubble",
    "loop_credits",
    "reduced_chords",
    "reduced",
    "one_onebar",
    "two_twobar",
    "one_twobar",
    "two_onebar",
];

fn cobweb_row(d: &CobwebDiagram) -> Vec<Cell> {
    let r = d.reduce();
    let counts = d.leg_counts();
    vec![
        d.to_string().into(),
        d.n_vertices().into(),
        d.n_chords().into(),
        d.count_loops().into(),
        d.crossings().into(),
        d.is_planar().into(),
        r.removed_parallel.into(),
        r.removed_bubble.into(),
        r.loop_credits.into(),
        r.reduced_chords().into(),
        r.reduced.to_string().into(),
        counts.map(|c| c.one_onebar).into(),
        counts.map(|c| c.two_twobar).into(),
        counts.map(|c| c.one_twobar).into(),
        counts.map(|c| c.two_onebar).into(),
    ]
}

fn cobweb_table(a: &CobwebArgs) -> Result<Table> {
    if let Some(t) = a.leading {
        let mut table = Table::new(&COBWEB_COLUMNS);
        for d in cobweb::enumerate_leading(t)? {
            table.push(cobweb_row(&d));
        }
        return Ok(table);
    }
    let text = a
        .diagram
        .as_deref()
        .ok_or_else(|| Error::Parse("missing --diagram".into()))?;
    let d: CobwebDiagram = text.parse()?;
    if a.log {
        let r = d.reduce();
        let mut table = Table::new(&["step", "rule", "removed", "result"]);
        for (i, s) in r.steps.iter().enumerate() {
            let rule = match s.rule {
                cobweb::Rule::Parallel => "parallel",
                cobweb::Rule::Bubble => "bubble",
            };
            table.push(vec![
                (i + 1).into(),
                rule.into(),
                format!("{}-{}", s.chord.0, s.chord.1).into(),
                s.result.to_string().into(),
            ]);
        }
        return Ok(table);
    }
    let mut table = Table::new(&COBWEB_COLUMNS);
    table.push(cobweb_row(&d));
    Ok(table)
}
