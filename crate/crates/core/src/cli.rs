//! The `profinite` command line: argument grammar, execution and reports.
//!
//! A report body is a list of `key = value` lines. It starts with the
//! convention version and the tower line and ends with `status = <code>`.
//! Wall-clock time is kept outside the body so that bodies can be diffed.

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::format::{fmt_complex, fmt_g, join};
use crate::integral::action::{parse_rational, ActionFunctional};
use crate::integral::characters::conductor_histogram;
use crate::integral::path_integral::{path_integral, Mode, ResultMode};
use crate::integral::{frobenius_correlation, haar_measure, partition_function, CylinderMeasure};
use crate::matrioshka::{
    block_decode, block_encode, block_truncate, build_partition_tree, BitSequence, Decoded, EncodingConvention,
    Payload, SerializedCode, CONVENTION_VERSION,
};
use crate::metric::{cantor_distance, hamming, Word};
use crate::tower::{make_tower, split_labels, validate_tower, CoherentElement, Tower, TowerKind, TowerSpec};

#[derive(Debug, Parser)]
#[command(name = "profinite", version, about = "Towers of finite groups, their binary codes and path integrals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the tower comes from.
#[derive(Clone, Debug, Default, Args)]
pub struct TowerArgs {
    /// `tower <kind> [p=<p>] depth=<d>`, the same without `tower`, or a bare kind
    #[arg(long)]
    pub tower: Option<String>,
    /// File holding a tower spec, including custom towers
    #[arg(long, value_name = "FILE")]
    pub tower_file: Option<PathBuf>,
    /// Depth, for a bare kind or to override the spec line
    #[arg(long)]
    pub depth: Option<usize>,
    /// Prime, for a bare `padic` or `cyclotomic` kind
    #[arg(long)]
    pub p: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Cantor,
    Hamming,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Print the levels of a tower
    Tower(TowerArgs),
    /// Check bonds for surjectivity, the homomorphism law and strict refinement
    Validate(TowerArgs),
    /// Binary code of a coherent element
    Encode {
        #[command(flatten)]
        tower: TowerArgs,
        /// Comma-separated labels, one per level, or the top-level label alone
        #[arg(long)]
        element: String,
    },
    /// Element or cell named by a code
    Decode {
        #[command(flatten)]
        tower: TowerArgs,
        /// Serialized code `conv=...;<tower line>;bits=...` or `...;blocks=...`
        #[arg(long, conflicts_with = "bits")]
        code: Option<String>,
        /// Raw bit string
        #[arg(long)]
        bits: Option<String>,
    },
    /// Fixed-width per-level block code of a coherent element
    Blocks {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        element: String,
    },
    /// Distance between two binary words
    Dist {
        #[arg(value_enum)]
        metric: Metric,
        left: String,
        right: String,
    },
    /// Path integral over the level-n cylinders
    Integral {
        #[command(flatten)]
        tower: TowerArgs,
        /// Level to sum over (default: tower depth)
        #[arg(long)]
        level: Option<usize>,
        /// Linear coefficients
        #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
        w: Vec<String>,
        /// Quadratic form, rows separated by `;`, entries by `,` or spaces
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        #[arg(long)]
        hbar: Option<f64>,
        /// Action file with `hbar`, `w` and optional `Q` lines
        #[arg(long, value_name = "FILE", conflicts_with_all = ["w", "q", "hbar"])]
        action: Option<PathBuf>,
        /// Monte Carlo sample count; exact summation when absent
        #[arg(long)]
        samples: Option<u64>,
        /// Seed, required with --samples
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Character partition function
    Partition {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        lambda: f64,
    },
    /// Frobenius eigenvalue correlation on a cyclotomic tower
    Correlate {
        #[command(flatten)]
        tower: TowerArgs,
        /// Comma-separated primes; empty for the trivial product
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
    },
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::Tower(_) => "tower",
            Command::Validate(_) => "validate",
            Command::Encode { .. } => "encode",
            Command::Decode { .. } => "decode",
            Command::Blocks { .. } => "blocks",
            Command::Dist { .. } => "dist",
            Command::Integral { .. } => "integral",
            Command::Partition { .. } => "partition",
            Command::Correlate { .. } => "correlate",
        }
    }

    fn tower_args(&self) -> Option<&TowerArgs> {
        match self {
            Command::Tower(t) | Command::Validate(t) => Some(t),
            Command::Encode { tower, .. }
            | Command::Decode { tower, .. }
            | Command::Blocks { tower, .. }
            | Command::Integral { tower, .. }
            | Command::Partition { tower, .. }
            | Command::Correlate { tower, .. } => Some(tower),
            Command::Dist { .. } => None,
        }
    }
}

/// Parses `argv` (without the program name) into a checked command.
pub fn parse_command<I, S>(argv: I) -> Result<Command>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once("profinite".into()).chain(argv.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Usage(first_line(&e.to_string())))?;
    check_command(&cli.command)?;
    Ok(cli.command)
}

/// Like [`parse_command`], but lets clap print help and version text.
pub fn parse_command_or_exit<I, S>(argv: I) -> Result<Command>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once("profinite".into()).chain(argv.into_iter().map(Into::into));
    match Cli::try_parse_from(args) {
        Ok(cli) => {
            check_command(&cli.command)?;
            Ok(cli.command)
        }
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => Err(Error::Usage(first_line(&e.to_string()))),
    }
}

fn first_line(text: &str) -> String {
    let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
    line.trim_start_matches("error: ").to_string()
}

fn check_command(cmd: &Command) -> Result<()> {
    if let Some(t) = cmd.tower_args() {
        let code_names_tower = matches!(cmd, Command::Decode { code: Some(_), .. });
        if t.tower.is_none() && t.tower_file.is_none() && !code_names_tower {
            return Err(Error::Usage(format!("{} needs --tower or --tower-file", cmd.verb())));
        }
        if t.tower.is_some() && t.tower_file.is_some() {
            return Err(Error::Usage("--tower and --tower-file are exclusive".into()));
        }
    }
    match cmd {
        Command::Decode { code: None, bits: None, .. } => Err(Error::Usage("decode needs --code or --bits".into())),
        Command::Integral { samples, seed, w, action, .. } => {
            if samples.is_some() && seed.is_none() {
                return Err(Error::Usage("Monte Carlo (--samples) requires --seed".into()));
            }
            if samples.is_none() && seed.is_some() {
                return Err(Error::Usage("--seed only applies with --samples".into()));
            }
            if w.is_empty() && action.is_none() {
                return Err(Error::Usage("integral needs --w or --action".into()));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// The outcome of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub convention_version: String,
    pub tower: Option<String>,
    pub results: Vec<(String, String)>,
    pub error: Option<String>,
    pub status: i32,
    pub elapsed: Duration,
}

impl RunReport {
    /// Everything except timing; identical inputs give identical bodies.
    pub fn body(&self) -> String {
        let mut out = format!("conv = {}\n", self.convention_version);
        if let Some(t) = &self.tower {
            out += &format!("tower = {t}\n");
        }
        for (k, v) in &self.results {
            out += &format!("{k} = {v}\n");
        }
        if let Some(e) = &self.error {
            out += &format!("error = {e}\n");
        }
        out += &format!("status = {}\n", self.status);
        out
    }

    pub fn timing_line(&self) -> String {
        format!("elapsed = {:.3} s", self.elapsed.as_secs_f64())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.results.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.body())
    }
}

struct Output {
    tower: Option<String>,
    results: Vec<(String, String)>,
}

impl Output {
    fn put(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.results.push((key.into(), value.into()));
    }
}

pub fn execute(cmd: &Command) -> RunReport {
    let start = Instant::now();
    let mut out = Output { tower: None, results: Vec::new() };
    let outcome = run(cmd, &mut out);
    let (error, status) = match outcome {
        Ok(status) => (None, status),
        Err(e) => (Some(e.diagnostic()), e.exit_code()),
    };
    RunReport {
        convention_version: CONVENTION_VERSION.to_string(),
        tower: out.tower,
        results: out.results,
        error,
        status,
        elapsed: start.elapsed(),
    }
}

/// Resolves the tower arguments into a spec.
pub fn resolve_tower_spec(args: &TowerArgs) -> Result<TowerSpec> {
    let mut spec = if let Some(path) = &args.tower_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        TowerSpec::parse_file(&text, path.parent())?
    } else {
        let text = args.tower.as_deref().unwrap_or_default().trim();
        let bare = !text.contains('=');
        if bare {
            let kind = text.strip_prefix("tower").unwrap_or(text).trim();
            let depth = args
                .depth
                .ok_or_else(|| Error::Usage(format!("tower kind '{kind}' needs --depth")))?;
            let line = match args.p {
                Some(p) => format!("{kind} p={p} depth={depth}"),
                None => format!("{kind} depth={depth}"),
            };
            TowerSpec::parse_line(&line)?
        } else {
            if args.p.is_some() {
                return Err(Error::Usage("--p only applies to a bare tower kind".into()));
            }
            TowerSpec::parse_line(text)?
        }
    };
    if let Some(depth) = args.depth {
        if spec.depth != depth {
            if spec.kind == TowerKind::Custom {
                return Err(Error::Usage("--depth cannot change a custom tower".into()));
            }
            spec.depth = depth;
        }
    }
    if spec.depth == 0 {
        return Err(Error::InvalidParameter("tower depth must be at least 1".into()));
    }
    Ok(spec)
}

fn load_tower(args: &TowerArgs, out: &mut Output) -> Result<Arc<Tower>> {
    let spec = resolve_tower_spec(args)?;
    out.tower = Some(spec.to_string());
    make_tower(&spec)
}

fn parse_element(tower: &Arc<Tower>, text: &str) -> Result<CoherentElement> {
    let labels = split_labels(text);
    if labels.is_empty() {
        return Err(Error::Parse("empty element".into()));
    }
    CoherentElement::from_labels(tower, &labels)
}

fn run(cmd: &Command, out: &mut Output) -> Result<i32> {
    match cmd {
        Command::Tower(args) => {
            let tower = load_tower(args, out)?;
            out.put("orders", join(&tower.orders()));
            for k in 1..=tower.depth() {
                out.put(format!("level_{k}"), tower.level(k)?.spec().to_string());
            }
            Ok(0)
        }
        Command::Validate(args) => {
            let tower = load_tower(args, out)?;
            let report = validate_tower(&tower);
            out.put("orders", join(&report.orders));
            for b in &report.bonds {
                out.put(
                    format!("bond_{}", b.bond),
                    format!(
                        "surjective={} homomorphism={} strict_refinement={}",
                        b.surjective, b.homomorphism, b.strict_refinement
                    ),
                );
            }
            out.put("inverse_system", report.is_inverse_system().to_string());
            out.put("valid", report.all_pass().to_string());
            Ok(if report.all_pass() { 0 } else { 3 })
        }
        Command::Encode { tower, element } => {
            let tower = load_tower(tower, out)?;
            let x = parse_element(&tower, element)?;
            let tree = build_partition_tree(&tower, &EncodingConvention::default())?;
            let bits = tree.encode(&x)?;
            out.put("element", x.to_string());
            out.put("bits", bits.to_string());
            out.put("length", bits.len().to_string());
            let code = SerializedCode {
                convention: CONVENTION_VERSION.into(),
                tower: tower.spec().to_string(),
                payload: Payload::Bits(bits.bits().to_vec()),
            };
            out.put("code", code.to_string());
            Ok(0)
        }
        Command::Blocks { tower, element } => {
            let tower = load_tower(tower, out)?;
            let x = parse_element(&tower, element)?;
            let code = block_encode(&tower, &x)?;
            out.put("element", x.to_string());
            out.put("m", join(code.m_values()));
            out.put("min_widths", join(&code.min_widths()));
            out.put("widths", join(code.widths()));
            out.put("blocks", code.payload());
            let coherent = (2..=tower.depth())
                .map(|k| Ok(block_truncate(&code, k)? == code.stripped(k - 1)?))
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .all(|b| b);
            out.put("coherent", coherent.to_string());
            let serialized = SerializedCode {
                convention: CONVENTION_VERSION.into(),
                tower: tower.spec().to_string(),
                payload: Payload::Blocks(code.blocks().to_vec()),
            };
            out.put("code", serialized.to_string());
            Ok(0)
        }
        Command::Decode { tower, code, bits } => run_decode(tower, code.as_deref(), bits.as_deref(), out),
        Command::Dist { metric, left, right } => {
            let (x, y): (Word, Word) = (left.parse()?, right.parse()?);
            out.put("metric", format!("{metric:?}").to_lowercase());
            let d = match metric {
                Metric::Cantor => cantor_distance(&x, &y)?.to_string(),
                Metric::Hamming => hamming(&x, &y)?.to_string(),
            };
            out.put("d", d);
            Ok(0)
        }
        Command::Integral { tower, level, w, q, hbar, action, samples, seed } => {
            let spec = resolve_tower_spec(tower)?;
            out.tower = Some(spec.to_string());
            // binary towers are summed over {0,1}^n directly, past the group budget
            let mu = if spec.kind == TowerKind::Binary {
                CylinderMeasure::cantor(spec.depth)?
            } else {
                haar_measure(&make_tower(&spec)?)
            };
            let s = match action {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
                    ActionFunctional::parse(&text)?
                }
                None => build_action(w, q.as_deref(), hbar.unwrap_or(1.0))?,
            };
            let n = level.unwrap_or(spec.depth);
            let mode = match (samples, seed) {
                (Some(samples), Some(seed)) => Mode::MonteCarlo { samples: *samples, seed: *seed },
                _ => Mode::Exact,
            };
            let r = path_integral(&mu, &s, mode, n)?;
            let key = format!("I_{n}");
            let value = fmt_complex(r.value);
            match r.mode {
                ResultMode::Exact => {
                    out.put("mode", "exact");
                    let delta = r.delta_prev.map_or("n/a".into(), fmt_g);
                    out.put(key, format!("{value}  delta = {delta}"));
                }
                ResultMode::MonteCarlo { samples, seed, stderr } => {
                    out.put("mode", format!("monte_carlo samples={samples} seed={seed}"));
                    out.put(key, format!("{value}  stderr = {}", fmt_g(stderr)));
                }
            }
            out.put("abs", fmt_g(r.value.norm()));
            Ok(0)
        }
        Command::Partition { tower, lambda } => {
            let tower = load_tower(tower, out)?;
            let z = partition_function(&tower, *lambda)?;
            out.put("lambda", fmt_g(*lambda));
            out.put("levels", join(&conductor_histogram(&tower)?));
            out.put("Z", fmt_g(z));
            Ok(0)
        }
        Command::Correlate { tower, primes, lambda } => {
            let tower = load_tower(tower, out)?;
            let c = frobenius_correlation(&tower, primes, *lambda)?;
            out.put("primes", join(primes));
            out.put("lambda", fmt_g(*lambda));
            out.put("correlation", fmt_complex(c));
            Ok(0)
        }
    }
}

fn run_decode(args: &TowerArgs, code: Option<&str>, bits: Option<&str>, out: &mut Output) -> Result<i32> {
    let given = if args.tower.is_some() || args.tower_file.is_some() { Some(resolve_tower_spec(args)?) } else { None };
    let (spec, payload, convention) = match code {
        Some(text) => {
            let parsed: SerializedCode = text.parse()?;
            let spec = match given {
                Some(spec) => {
                    let line = TowerSpec::parse_line(&parsed.tower).map_or(parsed.tower.clone(), |s| s.to_string());
                    if spec.to_string() != line {
                        return Err(Error::TowerMismatch);
                    }
                    spec
                }
                None => TowerSpec::parse_line(&parsed.tower)?,
            };
            (spec, parsed.payload, parsed.convention)
        }
        None => {
            let spec = given.ok_or_else(|| Error::Usage("decode --bits needs a tower".into()))?;
            let bits = crate::matrioshka::parse_bits(bits.unwrap_or_default())?;
            (spec, Payload::Bits(bits), CONVENTION_VERSION.to_string())
        }
    };
    out.tower = Some(spec.to_string());
    let tower = make_tower(&spec)?;
    match payload {
        Payload::Bits(bits) => {
            let tree = build_partition_tree(&tower, &EncodingConvention::default())?;
            let seq = BitSequence::new(bits, tower.depth(), convention);
            out.put("bits", seq.to_string());
            match tree.decode(&seq)? {
                Decoded::Element(x) => out.put("element", x.to_string()),
                Decoded::Cell(cell) => {
                    out.put("cell_level", cell.level().to_string());
                    let members: Vec<String> = cell.elements().iter().map(|x| format!("({x})")).collect();
                    out.put("cell", members.join(" "));
                    let cylinder = match cell.cylinder() {
                        Some(z) if z.level() == 0 => "level 0".to_string(),
                        Some(z) => format!("level {} base {}", z.level(), tower.level(z.level())?.label(z.base())),
                        None => "none".to_string(),
                    };
                    out.put("cylinder", cylinder);
                }
            }
        }
        Payload::Blocks(blocks) => {
            if convention != CONVENTION_VERSION {
                return Err(Error::InvalidParameter(format!("unsupported convention {convention}")));
            }
            let x = block_decode(&tower, &blocks)?;
            out.put("element", x.to_string());
        }
    }
    Ok(0)
}

fn build_action(w: &[String], q: Option<&str>, hbar: f64) -> Result<ActionFunctional> {
    let w = w
        .iter()
        .flat_map(|s| s.split_whitespace())
        .map(crate::integral::action::parse_real)
        .collect::<Result<Vec<f64>>>()?;
    let q = match q {
        None => Vec::new(),
        Some(text) => {
            let rows: Vec<Vec<Rational64>> = text
                .split(';')
                .map(|row| row.split([',', ' ']).filter(|t| !t.is_empty()).map(parse_rational).collect())
                .collect::<Result<_>>()?;
            if rows.len() != w.len() || rows.iter().any(|r| r.len() != w.len()) {
                return Err(Error::LengthMismatch {
                    left: w.len() * w.len(),
                    right: rows.iter().map(Vec::len).sum(),
                });
            }
            rows.concat()
        }
    };
    ActionFunctional::new(q, w, hbar)
}

/// Runs a command line and returns the report and process exit status.
pub fn run_argv<I, S>(argv: I) -> RunReport
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match parse_command(argv) {
        Ok(cmd) => execute(&cmd),
        Err(e) => usage_report(&e),
    }
}

pub fn usage_report(e: &Error) -> RunReport {
    RunReport {
        convention_version: CONVENTION_VERSION.to_string(),
        tower: None,
        results: Vec::new(),
        error: Some(e.diagnostic()),
        status: e.exit_code(),
        elapsed: Duration::ZERO,
    }
}
