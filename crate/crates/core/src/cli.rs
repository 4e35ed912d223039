//! The `qwalk` command line.
//!
//! Every run writes into `<out>/<command>-seed<seed>/`, starting with
//! `config.json`, the fully resolved configuration. A JSON config file given
//! with `--config` supplies values that flags then override.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::experiments::{
    default_epsilons, grover_grid, grover_regression, hitting_scaling, johnson_demo, ChainFamily, DEFAULT_K_CAP,
    HITTING_THRESHOLD, JOHNSON_MAX_STATES,
};
use crate::findmarked::{
    amp_curve, classical_find_marked, decision_procedure, perturbed_walk, quantum_round_cost, DecisionConfig, Prices,
    QuantumDetector, RunRecord,
};
use crate::linalg::size_cap;
use crate::markov::{
    eigenvalue_gap, grover_chain, johnson_chain, lazy_cycle_chords, uniform_chain, ChainJson, MarkedSet,
    StochasticMatrix,
};
use crate::spectral::lift;
use crate::walk::{walk_unitary, BipartiteWalk, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Spectrum,
    Walk,
    Findmarked,
    Grover,
    Johnson,
    Scaling,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Walk => "walk",
            CommandKind::Findmarked => "findmarked",
            CommandKind::Grover => "grover",
            CommandKind::Johnson => "johnson",
            CommandKind::Scaling => "scaling",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Uniform,
    Johnson,
    Grover,
    Cycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum ChainSource {
    Generator { generator: Generator, n: usize, subset_size: usize, p: f64 },
    File { path: PathBuf },
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub chain: ChainSource,
    pub marked: Vec<usize>,
    /// Walk steps for `walk`.
    pub k: u64,
    pub k_max: u64,
    /// Promised marked fraction; `findmarked` runs the decision procedure when set.
    pub epsilon: Option<f64>,
    pub rule_constant: f64,
    pub rounds: usize,
    pub threshold: f64,
    pub exact: bool,
    /// `grover` checks only this `p` when set, otherwise a 50-point grid.
    pub p_single: Option<f64>,
    pub collision: Option<(usize, usize)>,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    pub size_cap: usize,
}

/// Values a `--config` file may set.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub generator: Option<Generator>,
    pub chain: Option<PathBuf>,
    pub n: Option<usize>,
    pub subset_size: Option<usize>,
    pub p: Option<f64>,
    pub marked: Option<Vec<usize>>,
    pub k: Option<u64>,
    pub k_max: Option<u64>,
    pub epsilon: Option<f64>,
    pub rule_constant: Option<f64>,
    pub rounds: Option<usize>,
    pub threshold: Option<f64>,
    pub exact: Option<bool>,
    pub collision: Option<(usize, usize)>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Chain generator.
    #[arg(long, value_enum)]
    pub generator: Option<Generator>,
    /// Chain file (`.json` with `{n, rows}` or `.csv`); overrides the generator.
    #[arg(long)]
    pub chain: Option<PathBuf>,
    /// States (uniform, cycle) or universe size (johnson).
    #[arg(long)]
    pub n: Option<usize>,
    /// Subset size of the Johnson chain.
    #[arg(long)]
    pub subset_size: Option<usize>,
    /// Grover chain parameter.
    #[arg(long)]
    pub p: Option<f64>,
    /// Marked states, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub marked: Option<Vec<usize>>,
    /// Walk steps.
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub k_max: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub rule_constant: Option<f64>,
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Hitting threshold on `|(u + nu^K u)/2|^2`.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Exact state-vector probabilities instead of sampled runs.
    #[arg(long)]
    pub exact: bool,
    /// Colliding pair `a,b` for the Johnson demo.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub collision: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with default values for any of the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lifted spectrum of the walk of a chain.
    Spectrum(Flags),
    /// Evolve a basis state under the walk (or the perturbed walk if states are marked).
    Walk(Flags),
    /// Classical and quantum FindMarked.
    Findmarked(Flags),
    /// Grover-chain closed-form regression.
    Grover(Flags),
    /// Collision search on a Johnson chain.
    Johnson(Flags),
    /// Hitting-time scaling sweep.
    Scaling(Flags),
}

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Quantized Markov-chain walks and marked-state search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SIZE_CAP: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::TooLarge { .. } => EXIT_SIZE_CAP,
        Error::EigensolverFailure(_) | Error::NotOrthonormal { .. } | Error::DegenerateGap | Error::NoHitWithinCap(_) => {
            EXIT_NUMERICAL
        }
        _ => EXIT_CONFIG,
    }
}

/// The single stderr line for a failed run.
pub fn error_line(kind: &str, message: &str, code: i32) -> String {
    serde_json::json!({ "error": kind, "message": message, "exit_code": code }).to_string()
}

fn default_n(command: CommandKind, generator: Generator) -> usize {
    match (command, generator) {
        (CommandKind::Scaling, _) => 128,
        (CommandKind::Johnson, _) | (_, Generator::Johnson) => 5,
        _ => 4,
    }
}

impl RunConfig {
    /// Merges flags over an optional config file over defaults.
    pub fn resolve(command: CommandKind, flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => serde_json::from_reader(File::open(path)?)?,
            None => PartialConfig::default(),
        };
        let generator = flags.generator.or(file.generator).unwrap_or(match command {
            CommandKind::Johnson => Generator::Johnson,
            CommandKind::Grover => Generator::Grover,
            _ => Generator::Uniform,
        });
        let chain = match flags.chain.clone().or(file.chain) {
            Some(path) => ChainSource::File { path },
            None => ChainSource::Generator {
                generator,
                n: flags.n.or(file.n).unwrap_or(default_n(command, generator)),
                subset_size: flags.subset_size.or(file.subset_size).unwrap_or(2),
                p: flags.p.or(file.p).unwrap_or(0.3),
            },
        };
        let collision = match &flags.collision {
            Some(v) if v.len() == 2 => Some((v[0], v[1])),
            Some(v) => return Err(Error::InvalidParameter(format!("--collision needs two indices, got {}", v.len()))),
            None => file.collision,
        };
        let cfg = RunConfig {
            command,
            chain,
            marked: flags.marked.clone().or(file.marked).unwrap_or_default(),
            k: flags.k.or(file.k).unwrap_or(1),
            k_max: flags.k_max.or(file.k_max).unwrap_or(32),
            epsilon: flags.epsilon.or(file.epsilon),
            rule_constant: flags.rule_constant.or(file.rule_constant).unwrap_or(1000.0),
            rounds: flags.rounds.or(file.rounds).unwrap_or(3000),
            threshold: flags.threshold.or(file.threshold).unwrap_or(HITTING_THRESHOLD),
            exact: flags.exact || file.exact.unwrap_or(false),
            p_single: flags.p.or(file.p),
            collision,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
            format: flags.format.or(file.format).unwrap_or(Format::Json),
            size_cap: size_cap(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.rule_constant > 0.0 && self.rule_constant.is_finite()) {
            return bad(format!("rule constant must be positive, got {}", self.rule_constant));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold must lie in (0, 1), got {}", self.threshold));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e <= 1.0) {
                return bad(format!("epsilon must lie in (0, 1], got {e}"));
            }
        }
        if self.k_max == 0 {
            return bad("k-max must be at least 1".into());
        }
        Ok(())
    }

    /// `<out>/<command>-seed<seed>`.
    pub fn run_dir(&self) -> PathBuf {
        self.out.join(format!("{}-seed{}", self.command.name(), self.seed))
    }

    pub fn chain_id(&self) -> String {
        match &self.chain {
            ChainSource::File { path } => {
                path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "file".into())
            }
            ChainSource::Generator { generator: Generator::Grover, p, .. } => format!("grover-p{p}"),
            ChainSource::Generator { generator: Generator::Johnson, n, subset_size, .. } => {
                format!("johnson-{n}-{subset_size}")
            }
            ChainSource::Generator { generator, n, .. } => format!("{}-{n}", generator_name(*generator)),
        }
    }

    pub fn build_chain(&self) -> Result<StochasticMatrix> {
        match &self.chain {
            ChainSource::File { path } => load_chain(path),
            ChainSource::Generator { generator, n, subset_size, p } => match generator {
                Generator::Uniform => uniform_chain(*n),
                Generator::Cycle => lazy_cycle_chords(*n),
                Generator::Grover => grover_chain(*p),
                Generator::Johnson => johnson_chain(*n, *subset_size, JOHNSON_MAX_STATES),
            },
        }
    }
}

fn generator_name(g: Generator) -> &'static str {
    match g {
        Generator::Uniform => "uniform",
        Generator::Johnson => "johnson",
        Generator::Grover => "grover",
        Generator::Cycle => "cycle",
    }
}

/// Reads a chain from `.json` (`{n, rows}`) or `.csv`.
pub fn load_chain(path: &Path) -> Result<StochasticMatrix> {
    let file = File::open(path)?;
    if path.extension().and_then(|e| e.to_str()) == Some("csv") {
        StochasticMatrix::read_csv(file)
    } else {
        let j: ChainJson = serde_json::from_reader(file)?;
        StochasticMatrix::from_json(&j)
    }
}

/// Writes run artifacts into one directory.
pub struct RunWriter {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl RunWriter {
    pub fn create(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, written: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.written
    }

    fn open(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        Ok(BufWriter::new(File::create(path)?))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut w = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn jsonl<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = self.open(name)?;
        for r in rows {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn with<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let mut w = self.open(name)?;
        f(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    /// Set when the run finished but a check it performs failed.
    pub failed_checks: Option<String>,
}

/// Executes a resolved configuration.
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    let mut out = RunWriter::create(cfg.run_dir())?;
    out.json("config.json", cfg)?;
    let failed_checks = match cfg.command {
        CommandKind::Spectrum => run_spectrum(cfg, &mut out)?,
        CommandKind::Walk => run_walk(cfg, &mut out)?,
        CommandKind::Findmarked => run_findmarked(cfg, &mut out)?,
        CommandKind::Grover => run_grover(cfg, &mut out)?,
        CommandKind::Johnson => run_johnson(cfg, &mut out)?,
        CommandKind::Scaling => run_scaling(cfg, &mut out)?,
    };
    Ok(RunSummary { dir: out.dir().to_path_buf(), files: out.files().to_vec(), failed_checks })
}

fn marked_set(cfg: &RunConfig, n: usize) -> Result<MarkedSet> {
    MarkedSet::new(n, cfg.marked.iter().copied())
}

fn run_spectrum(cfg: &RunConfig, out: &mut RunWriter) -> Result<Option<String>> {
    let p = cfg.build_chain()?;
    let walk = BipartiteWalk::from_chain(&p)?;
    crate::linalg::check_cap(walk.n() * walk.m(), cfg.size_cap)?;
    let spectrum = lift(&walk)?;
    if p.is_symmetric() {
        out.json("chain_analysis.json", &eigenvalue_gap(&p)?)?;
    }
    match cfg.format {
        Format::Json => out.json("spectrum.json", &spectrum.to_json())?,
        Format::Csv => out.with("spectrum.csv", |w| spectrum.write_csv(w))?,
    }
    Ok(None)
}

#[derive(Serialize)]
struct TrajectoryRow {
    k: u64,
    norm: f64,
    overlap_re: f64,
    overlap_im: f64,
}

fn run_walk(cfg: &RunConfig, out: &mut RunWriter) -> Result<Option<String>> {
    let p = cfg.build_chain()?;
    let n = p.require_square()?;
    let g = marked_set(cfg, n)?;
    let walk = if g.is_empty() { BipartiteWalk::from_chain(&p)? } else { perturbed_walk(&p, &g)? };
    let op = walk_unitary(walk, cfg.size_cap)?;
    let start = QuantumState::basis(vec![n, n], &[0, 0])?;
    let mut rows = Vec::new();
    let mut x = start.clone();
    for k in 0..=cfg.k {
        let ov = start.amplitudes().dotc(x.amplitudes());
        rows.push(TrajectoryRow { k, norm: x.norm(), overlap_re: ov.re, overlap_im: ov.im });
        if k < cfg.k {
            x = op.apply(&x)?;
        }
    }
    match cfg.format {
        Format::Json => out.json("trajectory.json", &rows)?,
        Format::Csv => out.with("trajectory.csv", |w| write_csv_rows(w, &rows))?,
    }
    out.json("state.json", &x.to_json())?;
    Ok(None)
}

fn write_csv_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SampledRow {
    #[serde(rename = "K")]
    k: u64,
    classical_output: u8,
    classical_cost: f64,
    quantum_output: u8,
    quantum_control: u8,
    quantum_left: usize,
    quantum_right: usize,
    quantum_cost: f64,
}

#[derive(Serialize)]
struct CsvRecord {
    #[serde(rename = "K")]
    k: u64,
    p_output1: f64,
    amp: Option<f64>,
    cost_total: f64,
}

fn run_findmarked(cfg: &RunConfig, out: &mut RunWriter) -> Result<Option<String>> {
    let p = cfg.build_chain()?;
    let n = p.require_square()?;
    let g = marked_set(cfg, n)?;
    let analysis = eigenvalue_gap(&p)?;
    let det = QuantumDetector::new(&p, &g, cfg.size_cap)?;
    let epsilon = cfg.epsilon.unwrap_or(g.fraction());

    if cfg.exact {
        let curve = det.curve(cfg.k_max);
        let amps = if g.is_empty() { None } else { Some(amp_curve(&p, &g, cfg.k_max)?) };
        let records: Vec<RunRecord> = (1..=cfg.k_max)
            .map(|k| RunRecord {
                chain_id: cfg.chain_id(),
                n,
                marked: g.members().to_vec(),
                epsilon,
                delta: analysis.gap,
                k,
                p_output1: curve[k as usize],
                amp: amps.as_ref().map(|a| vec![a.amp[k as usize - 1]]).unwrap_or_default(),
                cost_total: quantum_round_cost(k, Prices::default()).total(),
            })
            .collect();
        match cfg.format {
            Format::Json => out.jsonl("runs.jsonl", &records)?,
            Format::Csv => {
                let rows: Vec<CsvRecord> = records
                    .iter()
                    .map(|r| CsvRecord { k: r.k, p_output1: r.p_output1, amp: r.amp.first().copied(), cost_total: r.cost_total })
                    .collect();
                out.with("runs.csv", |w| write_csv_rows(w, &rows))?
            }
        }
    } else {
        let mut rows = Vec::new();
        for k in 1..=cfg.k_max {
            let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(k);
            let c = classical_find_marked(&p, &g, k, seed)?;
            let run = det.run(k)?;
            let q = det.sample(&run, Prices::default(), &mut ChaCha8Rng::seed_from_u64(seed))?;
            rows.push(SampledRow {
                k,
                classical_output: c.output_bit,
                classical_cost: c.ledger.total(),
                quantum_output: q.output_bit,
                quantum_control: q.final_sample.control,
                quantum_left: q.final_sample.left,
                quantum_right: q.final_sample.right,
                quantum_cost: q.ledger.total(),
            });
        }
        match cfg.format {
            Format::Json => out.jsonl("samples.jsonl", &rows)?,
            Format::Csv => out.with("samples.csv", |w| write_csv_rows(w, &rows))?,
        }
    }

    if let Some(eps) = cfg.epsilon {
        let dcfg = DecisionConfig {
            epsilon: eps,
            rule_constant: cfg.rule_constant,
            rounds: cfg.rounds,
            seed: cfg.seed,
            prices: Prices::default(),
        };
        let marked = g.mask();
        let outcome = decision_procedure(&p, |i| marked[i], &dcfg, cfg.size_cap)?;
        out.json("decision.json", &outcome)?;
    }
    Ok(None)
}

fn run_grover(cfg: &RunConfig, out: &mut RunWriter) -> Result<Option<String>> {
    let ps = match cfg.p_single {
        Some(p) => vec![p],
        None => grover_grid(50, 0.01, 0.99),
    };
    let report = grover_regression(&ps)?;
    match cfg.format {
        Format::Json => out.json("grover.json", &report)?,
        Format::Csv => out.with("grover.csv", |w| report.write_csv(w))?,
    }
    if report.all_passed {
        return Ok(None);
    }
    let failed: Vec<String> = report
        .cases
        .iter()
        .flat_map(|c| c.failures().map(move |f| format!("p={}: {} (diff {:e})", c.p, f.name, f.diff)))
        .collect();
    Ok(Some(failed.join("; ")))
}

fn run_johnson(cfg: &RunConfig, out: &mut RunWriter) -> Result<Option<String>> {
    let (n, k) = match &cfg.chain {
        ChainSource::Generator { n, subset_size, .. } => (*n, *subset_size),
        ChainSource::File { .. } => return Err(Error::InvalidParameter("johnson builds its own chain".into())),
    };
    let dcfg = DecisionConfig {
        epsilon: cfg.epsilon.unwrap_or(1.0),
        rule_constant: cfg.rule_constant,
        rounds: cfg.rounds,
        seed: cfg.seed,
        prices: Prices::default(),
    };
    let report = johnson_demo(n, k, cfg.collision, &dcfg, cfg.size_cap)?;
    out.json("johnson.json", &report)?;
    Ok(None)
}

fn run_scaling(cfg: &RunConfig, out: &mut RunWriter) -> Result<Option<String>> {
    let family = match &cfg.chain {
        ChainSource::Generator { generator: Generator::Uniform, n, .. } => ChainFamily::Uniform { n: *n },
        ChainSource::Generator { generator: Generator::Cycle, n, .. } => {
            ChainFamily::CycleChords { sizes: (3..).map(|e| 1usize << e).take_while(|&s| s <= (*n).max(8)).collect() }
        }
        _ => return Err(Error::InvalidParameter("scaling supports the uniform and cycle generators".into())),
    };
    let epsilons = match (&family, cfg.epsilon) {
        (ChainFamily::CycleChords { .. }, Some(e)) => vec![e],
        (ChainFamily::CycleChords { .. }, None) => vec![0.125],
        (ChainFamily::Uniform { .. }, _) => default_epsilons(),
    };
    let report = hitting_scaling(&family, &epsilons, cfg.threshold, DEFAULT_K_CAP)?;
    match cfg.format {
        Format::Json => out.json("scaling.json", &report)?,
        Format::Csv => out.with("scaling.csv", |w| report.write_csv(w))?,
    }
    Ok(None)
}

/// Parses arguments, runs, and returns the process exit status. Errors are
/// reported as one JSON line on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", error_line("ConfigError", first, EXIT_CONFIG));
            return EXIT_CONFIG;
        }
    };
    let (kind, flags) = match &cli.command {
        Command::Spectrum(f) => (CommandKind::Spectrum, f),
        Command::Walk(f) => (CommandKind::Walk, f),
        Command::Findmarked(f) => (CommandKind::Findmarked, f),
        Command::Grover(f) => (CommandKind::Grover, f),
        Command::Johnson(f) => (CommandKind::Johnson, f),
        Command::Scaling(f) => (CommandKind::Scaling, f),
    };
    let result = RunConfig::resolve(kind, flags).and_then(|cfg| run(&cfg));
    match result {
        Ok(summary) => match summary.failed_checks {
            None => {
                println!("{}", summary.dir.display());
                EXIT_OK
            }
            Some(msg) => {
                eprintln!("{}", error_line("CheckFailed", &msg, EXIT_NUMERICAL));
                EXIT_NUMERICAL
            }
        },
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("{}", error_line(e.kind(), &e.to_string(), code));
            code
        }
    }
}
