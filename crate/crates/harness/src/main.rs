use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use corrida_core::chesscore::Variant;
use corrida_core::engines::EngineRef;
use corrida_core::strategy::{generate_script, TrackShape};
use corrida_harness::{
    effectiveness_csv, games_csv, handoff_autoplay, metrics_csv, run_match, sweep_n, validate_corpus, HarnessError,
    MatchConfig, MatchReport, PlayerSpec,
};

#[derive(Parser)]
#[command(name = "corrida", about = "Generous-start chess experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Builtin engine search depth.
    #[arg(long, default_value_t = 3)]
    depth: u32,
    #[arg(long, default_value = "STANDARD_8x8")]
    variant: Variant,
    #[arg(long, default_value_t = corrida_harness::DEFAULT_MAX_PLIES)]
    max_plies: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// First game seed; game i uses seed + i.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the JSON summary here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write per-ply metrics CSV here.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Replay the bundled corpus; prints one CSV row per game.
    Replay {
        #[arg(long)]
        corpus: bool,
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Play the match described by a TOML config; prints one CSV row per game.
    Match {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Score White for each N of generous moves; prints the effectiveness CSV.
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        games: usize,
        #[arg(long, default_value = "SINGLE_SHUTTLE")]
        shape: TrackShape,
        #[command(flatten)]
        common: Common,
    },
    /// Scripted start for N moves, then the engine plays both sides.
    Handoff {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        games: usize,
        #[arg(long, default_value = "TWO_KNIGHT_SHUTTLE")]
        shape: TrackShape,
        #[command(flatten)]
        common: Common,
    },
}

impl Common {
    fn base(&self, games: usize) -> MatchConfig {
        let engine = EngineRef::Builtin { depth: self.depth, seed: 0 };
        let mut c = MatchConfig::new(
            self.variant,
            PlayerSpec::engine(engine.clone()),
            PlayerSpec::engine(engine),
            (0..games as u64).map(|i| self.seed + i).collect(),
        );
        c.max_plies = self.max_plies;
        c.workers = self.workers;
        c
    }
}

fn write(path: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => Ok(()),
    }
}

fn report_outputs(report: &MatchReport, json: &Option<PathBuf>, metrics: &Option<PathBuf>) -> Result<(), String> {
    print!("{}", games_csv(report));
    write(json, &format!("{:#}\n", report.summary()))?;
    let rows: Vec<_> = report
        .games
        .iter()
        .map(|g| (g.index + 1, g.metrics.clone()))
        .collect();
    write(metrics, &metrics_csv(&rows))
}

fn run(cli: Cli) -> Result<(), String> {
    let err = |e: HarnessError| e.to_string();
    match cli.command {
        Command::Replay { corpus: _, metrics } => {
            let report = validate_corpus().map_err(err)?;
            print!("{}", report.rows_csv());
            write(&metrics, &report.metrics_csv())
        }
        Command::Match {
            config,
            workers,
            json,
            metrics,
        } => {
            let text = std::fs::read_to_string(&config).map_err(|e| format!("{}: {e}", config.display()))?;
            let mut c = MatchConfig::from_toml(&text).map_err(err)?;
            if let Some(w) = workers {
                c.workers = w;
            }
            let report = run_match(&c).map_err(err)?;
            report_outputs(&report, &json, &metrics)
        }
        Command::Sweep { n, games, shape, common } => {
            let base = common.base(games);
            let results = sweep_n(&base, shape, &n).map_err(err)?;
            let rows: Vec<_> = results.iter().map(|(r, _)| r.clone()).collect();
            print!("{}", effectiveness_csv(&rows));
            let summary: Vec<_> = results
                .iter()
                .map(|(r, m)| serde_json::json!({ "row": r, "report": m.summary() }))
                .collect();
            write(&common.json, &format!("{:#}\n", serde_json::Value::Array(summary)))?;
            let per_game: Vec<_> = results
                .iter()
                .flat_map(|(r, m)| m.games.iter().map(move |g| (format!("n{}-{}", r.n, g.index + 1), g.metrics.clone())))
                .collect();
            write(&common.metrics, &metrics_csv(&per_game))
        }
        Command::Handoff { n, games, shape, common } => {
            let base = common.base(games);
            let engine = EngineRef::Builtin { depth: common.depth, seed: 0 };
            let script = match n {
                0 => None,
                n => Some(generate_script(shape, n, common.variant).map_err(|e| e.to_string())?),
            };
            let report = handoff_autoplay(script.as_ref(), &engine, &base).map_err(err)?;
            report_outputs(&report, &common.json, &common.metrics)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("corrida: {e}");
            ExitCode::FAILURE
        }
    }
}
