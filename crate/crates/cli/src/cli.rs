//! Argument parsing and command dispatch.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use polarscope::graphs::AccountFilter;
use polarscope::ingest::WindowScheme;

use crate::commands::synth::EventFileFormat;
use crate::commands::{align, infer_groups, newsflow, open_cache, synth, trends, validate};
use crate::config::{LoadedConfig, Overrides};
use crate::data::Inputs;
use crate::error::{CliError, Result};
use crate::output::OutputDir;

#[derive(Debug, Parser)]
#[command(name = "polarscope", version, about = "Structural polarization measurements over interaction event streams")]
pub struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "polarscope.toml")]
    pub config: PathBuf,
    /// Inference seed; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Accounts kept in endorsement graphs.
    #[arg(long, global = true, value_parser = parse_subset)]
    pub subset: Option<AccountFilter>,
    /// Keep only retweets of tweets sharing news links.
    #[arg(long, global = true)]
    pub retweets_with_news: bool,
    /// `weekly`, `bimonthly` or `days:N`.
    #[arg(long, global = true, value_parser = parse_windows)]
    pub windows: Option<WindowScheme>,
    /// Print errors as one JSON object on stderr.
    #[arg(long, global = true)]
    pub error_json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the config, inputs, topic configs and seeds.
    Validate,
    /// Fit institutional and ideological reference partitions per period.
    InferGroups,
    /// Weekly AEI, participation and partisan sorting per topic.
    Trends {
        /// Recompute weekly model selections instead of using the cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// Cross-topic alignment of weekly partitions.
    Align {
        #[arg(long)]
        no_cache: bool,
    },
    /// Outlet tables, viral articles and sentiment breakdowns.
    Newsflow,
    /// validate, infer-groups, trends, align and newsflow in order.
    Run {
        #[arg(long)]
        no_cache: bool,
    },
    /// Generate a synthetic corpus from a spec.
    Synth {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: EventFileFormat,
    },
}

fn parse_subset(s: &str) -> std::result::Result<AccountFilter, String> {
    s.parse().map_err(|e: polarscope::Error| e.to_string())
}

fn parse_windows(s: &str) -> std::result::Result<WindowScheme, String> {
    s.parse().map_err(|e: polarscope::Error| e.to_string())
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            account_filter: self.subset,
            retweets_with_news: self.retweets_with_news,
            windows: self.windows,
        }
    }
}

/// Runs the parsed command on a pool of `--jobs` threads.
pub fn run(cli: &Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        pool = pool.num_threads(n.max(1));
    }
    let pool = pool.build().map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<()> {
    if let Command::Synth { spec, out, format } = &cli.command {
        return synth::synth(spec, cli.seed, *format, out);
    }
    let cfg = LoadedConfig::load(&cli.config, &cli.overrides())?;
    if matches!(cli.command, Command::Validate | Command::Run { .. }) {
        let report = validate::validate(&cfg);
        if !report.findings.is_empty() {
            return Err(CliError::Validation(report.findings));
        }
        println!(
            "ok: {} events, {} topics ({}), {} seed accounts",
            report.events,
            report.topics.len(),
            report.topics.join(", "),
            report.seeds
        );
        if matches!(cli.command, Command::Validate) {
            return Ok(());
        }
    } else {
        let findings = cfg.config.check();
        if !findings.is_empty() {
            return Err(CliError::Validation(findings));
        }
    }
    let inputs = Inputs::load(&cfg)?;
    log::info!("loaded {} events", inputs.events.len());
    let mut out = OutputDir::new(cfg.output_dir());
    match &cli.command {
        Command::InferGroups => infer_groups::infer_groups(&cfg, &inputs, &mut out)?,
        Command::Trends { no_cache } => trends::trends(&cfg, &inputs, &open_cache(&cfg, !no_cache), &mut out)?,
        Command::Align { no_cache } => align::align(&cfg, &inputs, &open_cache(&cfg, !no_cache), &mut out)?,
        Command::Newsflow => newsflow::newsflow(&cfg, &inputs, &mut out)?,
        Command::Run { no_cache } => {
            let cache = open_cache(&cfg, !no_cache);
            infer_groups::infer_groups(&cfg, &inputs, &mut out)?;
            trends::trends(&cfg, &inputs, &cache, &mut out)?;
            align::align(&cfg, &inputs, &cache, &mut out)?;
            newsflow::newsflow(&cfg, &inputs, &mut out)?;
        }
        Command::Validate | Command::Synth { .. } => unreachable!("handled above"),
    }
    println!("wrote {} files under {}", out.written().len(), cfg.output_dir().display());
    Ok(())
}
