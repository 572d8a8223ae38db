use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use deceptive_games::games::{load_game, GameId};
use deceptive_games::harness::{
    aggregate, evaluate, read_results_csv, report, run_episode, verify_replay_file,
    write_results_csv, AgentSpec, EpisodeResult, HarnessError, ReplayError, ReportFormat,
    DEFAULT_BUDGET, DEFAULT_EPISODES,
};
use deceptive_games::learners::{train, LearnerKind, TrainConfig};
use deceptive_games::planners::Budget;

#[derive(Parser)]
#[command(
    name = "decept",
    version,
    about = "Play, evaluate and train agents on deceptive grid games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one episode.
    Run(RunArgs),
    /// Evaluate agents over many seeded episodes.
    Eval(EvalArgs),
    /// Train a learner and save its policy and learning curve.
    Train(TrainArgs),
    /// Re-simulate a replay file and check it step by step.
    Verify(VerifyArgs),
    /// Aggregate per-episode result CSVs into a score table.
    Table(TableArgs),
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Forward-model advances (or MCTS iterations) per move.
    #[arg(long, conflicts_with = "budget_ms")]
    budget: Option<u32>,
    /// Wall-clock milliseconds per move; results are not reproducible.
    #[arg(long)]
    budget_ms: Option<u32>,
}

impl BudgetArgs {
    fn get(self) -> Budget {
        match (self.budget, self.budget_ms) {
            (Some(n), _) => Budget::Iterations(n),
            (None, Some(ms)) => Budget::WallClockMillis(ms),
            (None, None) => DEFAULT_BUDGET,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    game: String,
    /// greedy, astar, mcts, oracle, always, random or file:<policy.json>
    #[arg(long)]
    agent: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    replay_out: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Comma-separated game ids, or `all`.
    #[arg(long)]
    game: String,
    /// Comma-separated agent names.
    #[arg(long)]
    agent: String,
    #[arg(long, default_value_t = DEFAULT_EPISODES)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    /// `csv` prints one line per episode, `markdown` a score table.
    #[arg(long, default_value = "markdown")]
    format: String,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    game: String,
    /// q or ac
    #[arg(long)]
    learner: String,
    #[arg(long)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    curve_out: Option<PathBuf>,
    #[arg(long)]
    policy_out: Option<PathBuf>,
    /// Actor-critic step size.
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Q-learning step size.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Truncate training episodes after this many ticks.
    #[arg(long)]
    max_ticks: Option<u32>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    replay: PathBuf,
}

#[derive(Args)]
struct TableArgs {
    /// Directory of per-episode CSV files written by `eval --format csv`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "markdown")]
    format: String,
}

enum Failure {
    Usage(anyhow::Error),
    Verification(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Usage(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Train(a) => cmd_train(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Table(a) => cmd_table(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(1)
        }
        Err(Failure::Verification(e)) => {
            eprintln!("verification failed: {}", describe(&e));
            ExitCode::from(2)
        }
    }
}

/// Error chain joined by `: `, skipping causes the outer message already
/// spells out.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn parse_game(s: &str) -> Result<GameId> {
    s.parse::<GameId>().map_err(|e| anyhow!(e))
}

fn parse_games(s: &str) -> Result<Vec<GameId>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(GameId::ALL.to_vec());
    }
    s.split(',').map(|g| parse_game(g.trim())).collect()
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_run(a: RunArgs) -> Result<(), Failure> {
    let id = parse_game(&a.game)?;
    let spec: AgentSpec = a.agent.parse()?;
    let game = load_game(id).map_err(HarnessError::from)?.game;
    spec.check_game(&game)?;
    let mut agent = spec.build(id);
    let (mut result, replay) = run_episode(agent.as_mut(), id, &game, a.seed, a.budget.get());
    if let Some(path) = &a.replay_out {
        replay.save(path).map_err(|e| anyhow!(e))?;
        result.replay_path = Some(path.clone());
    }
    println!(
        "game={} agent={} seed={} score={} status={} ticks={}",
        result.game,
        result.agent,
        result.seed,
        result.score,
        result.status.as_str(),
        result.ticks
    );
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<(), Failure> {
    let games = parse_games(&a.game)?;
    let format: ReportFormat = a.format.parse()?;
    let agents: Vec<(String, AgentSpec)> = a
        .agent
        .split(',')
        .map(|s| Ok((s.trim().to_string(), s.trim().parse::<AgentSpec>()?)))
        .collect::<Result<_, HarnessError>>()?;
    let mut results: Vec<EpisodeResult> = Vec::new();
    for (_, spec) in &agents {
        for &g in &games {
            results.extend(evaluate(spec, g, a.episodes, a.base_seed, a.budget.get())?);
        }
    }
    let mut out = open_output(a.out.as_deref())?;
    match format {
        ReportFormat::Csv => write_results_csv(&results, &mut out)?,
        ReportFormat::Markdown => {
            let text = report(&aggregate(&results)?, format)?;
            out.write_all(text.as_bytes()).context("write failed")?;
        }
    }
    out.flush().context("write failed")?;
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<(), Failure> {
    let id = parse_game(&a.game)?;
    let kind: LearnerKind = a.learner.parse().map_err(|e: String| anyhow!(e))?;
    if a.episodes == 0 {
        return Err(anyhow!("--episodes must be at least 1").into());
    }
    let mut config = TrainConfig::default();
    if let Some(lr) = a.learning_rate {
        config.learning_rate = lr;
    }
    if let Some(alpha) = a.alpha {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(anyhow!("--alpha must lie in (0, 1]").into());
        }
        config.alpha = alpha;
    }
    if let Some(gamma) = a.gamma {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(anyhow!("--gamma must lie in [0, 1]").into());
        }
        config.gamma = gamma;
    }
    config.max_episode_ticks = a.max_ticks;
    let game = load_game(id).map_err(HarnessError::from)?.game;
    let (policy, curve) =
        train(&game, kind, a.episodes, a.seed, &config).map_err(HarnessError::from)?;
    if let Some(path) = &a.curve_out {
        let file =
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        curve
            .write_csv(BufWriter::new(file))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let Some(path) = &a.policy_out {
        policy.save(path).map_err(HarnessError::from)?;
    }
    let (peak, last) = curve.peak_and_final().unwrap_or((f64::NAN, f64::NAN));
    println!(
        "game={id} learner={kind} episodes={} seed={} peak_mean={peak:.3} final_mean={last:.3}",
        a.episodes, a.seed
    );
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    match verify_replay_file(&a.replay) {
        Ok(replay) => {
            println!(
                "ok: {} {} seed={} steps={} score={}",
                replay.game,
                replay.agent,
                replay.seed,
                replay.steps.len(),
                replay.final_score
            );
            Ok(())
        }
        Err(e @ ReplayError::Io { .. }) => Err(Failure::Usage(e.into())),
        Err(e) => Err(Failure::Verification(e.into())),
    }
}

fn cmd_table(a: TableArgs) -> Result<(), Failure> {
    let format: ReportFormat = a.format.parse()?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(&a.input)
        .with_context(|| format!("cannot read {}", a.input.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    let mut results = Vec::new();
    for f in &files {
        let file = File::open(f).with_context(|| format!("cannot open {}", f.display()))?;
        results.extend(
            read_results_csv(file).with_context(|| format!("cannot parse {}", f.display()))?,
        );
    }
    if results.is_empty() {
        return Err(anyhow!("no episode results found in {}", a.input.display()).into());
    }
    print!("{}", report(&aggregate(&results)?, format)?);
    Ok(())
}
