//! Command-line front door. Text output is human-oriented and unstable;
//! JSON is the compatibility surface.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::json;

use digitmap::atlas::{AtlasError, CycleAtlas};
use digitmap::map::{DigitMap, MapFile};
use digitmap::premises::{check_premises, construct_g, pan_condition};
use digitmap::sieve::Sieve;
use digitmap::witness::{
    concurrent_pair, congruent_u_preimage, consecutive_run, shift_all_witness, shift_witness,
    verify_witness, Strategy, WitnessConfig, WitnessContext, WitnessError, WitnessTrace,
};

#[derive(Parser)]
#[command(name = "digitmap", version, about = "Digit-map dynamics toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Worker threads; falls back to DIGITMAP_THREADS, then 1.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn threads(&self) -> usize {
        self.threads
            .or_else(|| {
                std::env::var("DIGITMAP_THREADS")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(1)
            .max(1)
    }
}

/// Exactly one of: --map FILE, --base with --table, or --e with --b.
#[derive(Args)]
struct MapSource {
    /// JSON map file: {"base": B, "exponent": E} or {"base": B, "table": [...]}
    #[arg(long)]
    map: Option<PathBuf>,
    /// Base for an inline digit table.
    #[arg(long)]
    base: Option<u64>,
    /// Inline digit table, comma separated, length = base.
    #[arg(long, value_delimiter = ',')]
    table: Option<Vec<u64>>,
    /// Exponent of an (e,b)-power map.
    #[arg(long)]
    e: Option<u32>,
    /// Base of an (e,b)-power map.
    #[arg(long)]
    b: Option<u64>,
}

impl MapSource {
    fn load(&self) -> Result<DigitMap, CliError> {
        let sources = [
            self.map.is_some(),
            self.base.is_some() || self.table.is_some(),
            self.e.is_some() || self.b.is_some(),
        ];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(CliError::invalid(
                "specify exactly one map source: --map, --base/--table, or --e/--b",
            ));
        }
        if let Some(path) = &self.map {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
            let spec: MapFile = serde_json::from_str(&text)
                .map_err(|e| CliError::invalid(format!("bad map file: {e}")))?;
            return DigitMap::from_file(spec).map_err(|e| CliError::invalid(e.to_string()));
        }
        if let (Some(base), Some(table)) = (self.base, self.table.clone()) {
            return DigitMap::new(base, table).map_err(|e| CliError::invalid(e.to_string()));
        }
        if let (Some(e), Some(b)) = (self.e, self.b) {
            return DigitMap::power(e, b).map_err(|e| CliError::invalid(e.to_string()));
        }
        Err(CliError::invalid(
            "incomplete map source: need both halves of --base/--table or --e/--b",
        ))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessKind {
    Shift,
    Preimage,
    Pair,
    Shiftall,
    Run,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Search,
    Construct,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Search => Strategy::Search,
            StrategyArg::Construct => Strategy::Construct,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the cycle atlas: threshold, cycles, attractor set.
    Analyze {
        #[command(flatten)]
        source: MapSource,
        #[command(flatten)]
        common: Common,
    },
    /// Check the density-theorem premises.
    Check {
        #[command(flatten)]
        source: MapSource,
        #[command(flatten)]
        common: Common,
    },
    /// Classify an integer relative to a cycle number.
    Classify {
        /// The integer, decimal, any size.
        n: String,
        /// Cycle number; defaults to the least element of n's landing cycle.
        #[arg(long)]
        u: Option<u64>,
        #[command(flatten)]
        source: MapSource,
        #[command(flatten)]
        common: Common,
    },
    /// Scan [1, bound] for maximal runs of consecutive u-integers.
    Sieve {
        #[arg(long)]
        u: u64,
        #[arg(long)]
        bound: u64,
        #[arg(long, default_value_t = 1)]
        min_len: u64,
        #[command(flatten)]
        source: MapSource,
        #[command(flatten)]
        common: Common,
    },
    /// Produce and verify a constructive witness.
    Witness {
        #[arg(long, value_enum)]
        kind: WitnessKind,
        #[arg(long, value_enum, default_value = "search")]
        strategy: StrategyArg,
        /// Cycle number (preimage, pair, shiftall, run).
        #[arg(long)]
        u: Option<u64>,
        /// Shift amount (shift) or pair offset (pair).
        #[arg(long)]
        x: Option<u64>,
        /// Additand range bound (shift).
        #[arg(long)]
        m: Option<u64>,
        /// Iteration depth (shift).
        #[arg(long)]
        r: Option<u64>,
        /// Target residue mod f(b-1) (preimage).
        #[arg(long)]
        a: Option<u64>,
        /// Concurrency anchor, decimal (preimage); defaults to u.
        #[arg(long)]
        anchor: Option<String>,
        /// Run length (run).
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = WitnessConfig::default().search_budget)]
        budget: u64,
        #[arg(long, default_value_t = WitnessConfig::default().depth_limit)]
        depth_limit: u64,
        #[command(flatten)]
        source: MapSource,
        #[command(flatten)]
        common: Common,
    },
    /// Pan condition and the digit-g certificate for an (e,b)-power map.
    Happy {
        #[arg(long)]
        e: u64,
        #[arg(long)]
        b: u64,
        #[command(flatten)]
        common: Common,
    },
}

/// 0 success, 1 premises fail, 2 invalid input, 3 budget/depth exceeded.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<AtlasError> for CliError {
    fn from(e: AtlasError) -> Self {
        CliError::invalid(e.to_string())
    }
}

impl From<WitnessError> for CliError {
    fn from(e: WitnessError) -> Self {
        let code = match &e {
            WitnessError::PremisesNotSatisfied(_) => 1,
            WitnessError::BudgetExhausted { .. }
            | WitnessError::DepthExceeded { .. }
            | WitnessError::StrategyInfeasible(_) => 3,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn emit<T: Serialize>(format: Format, payload: &T, text: String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string(payload).unwrap()),
        Format::Text => println!("{text}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match &cli.command {
        Command::Analyze { common, .. }
        | Command::Check { common, .. }
        | Command::Classify { common, .. }
        | Command::Sieve { common, .. }
        | Command::Witness { common, .. }
        | Command::Happy { common, .. } => common.format,
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            match format {
                Format::Json => println!(
                    "{}",
                    json!({ "error": err.message, "code": err.code })
                ),
                Format::Text => eprintln!("error: {}", err.message),
            }
            ExitCode::from(err.code)
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Analyze { source, common } => {
            let map = source.load()?;
            let atlas = CycleAtlas::compute(&map)?;
            let payload = json!({
                "base": map.base(),
                "table": map.table(),
                "threshold": atlas.threshold(),
                "cycles": atlas.cycles(),
                "attractor_set": atlas.attractor_set(),
            });
            let mut text = format!(
                "base {} threshold {}\ncycles:",
                map.base(),
                atlas.threshold()
            );
            for c in atlas.cycles() {
                text.push_str(&format!("\n  {c:?}"));
            }
            emit(common.format, &payload, text);
            Ok(0)
        }
        Command::Check { source, common } => {
            let map = source.load()?;
            let report = check_premises(&map);
            let text = if report.ok {
                format!(
                    "premises hold; f(b-1) = {}, m* candidates {:?}",
                    report.f_top, report.m_star_candidates
                )
            } else {
                format!("premises fail: {:?}", report.failures)
            };
            emit(common.format, &report, text);
            Ok(if report.ok { 0 } else { 1 })
        }
        Command::Classify {
            n,
            u,
            source,
            common,
        } => {
            let map = source.load()?;
            let atlas = CycleAtlas::compute(&map)?;
            let n: BigUint = n
                .parse()
                .map_err(|_| CliError::invalid("n must be a decimal integer"))?;
            let u = match u {
                Some(u) => u,
                None => {
                    let probe = atlas.classify_big(&n, atlas.cycles()[0][0])?;
                    atlas.cycles()[probe.cycle_index][0]
                }
            };
            let c = atlas.classify_big(&n, u)?;
            let text = if c.is_u_integer {
                format!(
                    "{} is a {u}-integer: steps_to_u {} phase {} (cycle length {})",
                    c.n,
                    c.steps_to_u.unwrap(),
                    c.phase.unwrap(),
                    c.cycle_len
                )
            } else {
                format!(
                    "{} is not a {u}-integer (lands in cycle {})",
                    c.n, c.cycle_index
                )
            };
            emit(common.format, &c, text);
            Ok(0)
        }
        Command::Sieve {
            u,
            bound,
            min_len,
            source,
            common,
        } => {
            let map = source.load()?;
            let atlas = CycleAtlas::compute(&map)?;
            let sieve = Sieve::new(&atlas, bound);
            let runs = sieve.find_runs(u, bound, min_len, common.threads())?;
            match common.format {
                Format::Json => {
                    for r in &runs {
                        println!("{}", serde_json::to_string(r).unwrap());
                    }
                }
                Format::Text => {
                    for r in &runs {
                        println!(
                            "u {} start {} length {}{}",
                            r.u,
                            r.start,
                            r.length,
                            if r.clipped { " (clipped)" } else { "" }
                        );
                    }
                }
            }
            Ok(0)
        }
        Command::Witness {
            kind,
            strategy,
            u,
            x,
            m,
            r,
            a,
            anchor,
            n,
            budget,
            depth_limit,
            source,
            common,
        } => {
            let map = source.load()?;
            let atlas = CycleAtlas::compute(&map)?;
            let premises = check_premises(&map);
            let config = WitnessConfig {
                search_budget: budget,
                depth_limit,
                ..WitnessConfig::default()
            };
            let ctx = WitnessContext::with_config(&atlas, &premises, config);
            let strategy: Strategy = strategy.into();
            let need = |v: Option<u64>, flag: &str| {
                v.ok_or_else(|| CliError::invalid(format!("--{flag} is required for this kind")))
            };
            let trace = match kind {
                WitnessKind::Shift => WitnessTrace::Shift(shift_witness(
                    &map,
                    need(x, "x")?,
                    need(m, "m")?,
                    need(r, "r")?,
                    &ctx.config,
                )?),
                WitnessKind::Preimage => {
                    let u = need(u, "u")?;
                    let anchor = match anchor {
                        Some(s) => s
                            .parse()
                            .map_err(|_| CliError::invalid("--anchor must be decimal"))?,
                        None => BigUint::from(u),
                    };
                    WitnessTrace::Preimage(congruent_u_preimage(
                        &ctx,
                        u,
                        need(a, "a")?,
                        &anchor,
                        strategy,
                    )?)
                }
                WitnessKind::Pair => WitnessTrace::Pair(concurrent_pair(
                    &ctx,
                    need(u, "u")?,
                    need(x, "x")?,
                    strategy,
                )?),
                WitnessKind::Shiftall => {
                    WitnessTrace::ShiftAll(shift_all_witness(&ctx, need(u, "u")?, strategy)?)
                }
                WitnessKind::Run => WitnessTrace::Run(consecutive_run(
                    &ctx,
                    need(u, "u")?,
                    need(n, "n")?,
                    strategy,
                )?),
            };
            let verification = verify_witness(&ctx, &trace);
            let payload = json!({ "trace": trace, "verification": verification });
            let mut text = format!(
                "witness verification: {}",
                if verification.ok() { "pass" } else { "FAIL" }
            );
            for c in &verification.checks {
                text.push_str(&format!(
                    "\n  [{}] {}: {}",
                    if c.pass { "ok" } else { "!!" },
                    c.name,
                    c.detail
                ));
            }
            emit(common.format, &payload, text);
            Ok(if verification.ok() { 0 } else { 1 })
        }
        Command::Happy { e, b, common } => {
            let pan = pan_condition(e, b);
            let certificate = if pan.holds {
                Some(construct_g(e, b).map_err(|e| CliError::invalid(e.to_string()))?)
            } else {
                None
            };
            let ok = pan.holds && certificate.as_ref().map_or(false, |c| c.verified());
            let payload = json!({ "pan": pan, "certificate": certificate });
            let text = match &certificate {
                Some(c) => format!(
                    "pan condition holds for e={e} b={b}; g = {} ({})",
                    c.g,
                    if c.verified() { "verified" } else { "NOT verified" }
                ),
                None => format!("pan condition fails for e={e} b={b}"),
            };
            emit(common.format, &payload, text);
            Ok(if ok { 0 } else { 1 })
        }
    }
}
