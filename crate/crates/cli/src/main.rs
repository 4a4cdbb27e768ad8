use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use symteam_core::analysis::{self, EquilibriumTol};
use symteam_core::gamut::{GamutClass, GamutGame, GamutSpec};
use symteam_core::harness::{self, sweep, SweepConfig};
use symteam_core::optimize::{self, best_of_runs, Method, OptimizerConfig};
use symteam_core::symmetry::{self, all_symmetries, generate_group, OrbitPartition, Permutation};
use symteam_core::{Error, Game, StrategyProfile};

/// Symmetric strategy optimization for common-payoff games.
#[derive(Parser, Debug)]
#[command(name = "symteam", version)]
struct Cli {
    /// Seed for generation, optimizer restarts and sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML (or JSON) settings: a sweep config for `sweep`, an optimizer config for `optimize`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory to write result files into.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format of what is printed to stdout.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Md,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a GAMUT game as JSON.
    Generate {
        #[arg(long, value_parser = parse_class)]
        class: GamutClass,
        #[arg(long)]
        players: usize,
        #[arg(long)]
        actions: usize,
    },
    /// Search for the best symmetric strategy profile.
    Optimize {
        #[command(flatten)]
        game: GameArg,
        #[command(flatten)]
        symmetry: SymmetryArgs,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        /// Restarts per method (overrides the config file).
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Equilibrium and stability report for a profile.
    Analyze {
        #[command(flatten)]
        game: GameArg,
        /// Profile JSON file (`{"strategies": [[...], ...]}`).
        #[arg(long, conflicts_with = "strategies")]
        profile: Option<PathBuf>,
        /// Inline profile: players separated by `;`, probabilities by `,`.
        #[arg(long)]
        strategies: Option<String>,
        /// Tolerances for the equilibrium checks.
        #[arg(long, value_enum, default_value = "exact")]
        tol: TolArg,
        /// Instead of a report, dump EU on an (N+1)×(N+1) grid (two players, two actions).
        #[arg(long, value_name = "N")]
        grid: Option<usize>,
    },
    /// Symmetry group and orbits of a game.
    Symmetries {
        #[command(flatten)]
        game: GameArg,
        #[command(flatten)]
        symmetry: SymmetryArgs,
    },
    /// Run the GAMUT experiment sweep.
    Sweep {
        /// Games per cell (overrides the config file).
        #[arg(long)]
        games_per_cell: Option<usize>,
        /// Inclusive player range, e.g. `2..5` (overrides the config file).
        #[arg(long, value_parser = parse_range)]
        players: Option<[usize; 2]>,
        /// Inclusive action range, e.g. `2..5` (overrides the config file).
        #[arg(long, value_parser = parse_range)]
        actions: Option<[usize; 2]>,
        /// Game classes, comma separated (overrides the config file).
        #[arg(long, value_delimiter = ',', value_parser = parse_class)]
        classes: Option<Vec<GamutClass>>,
        /// Restarts per method (overrides the config file).
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Check the worked examples.
    Fixtures,
}

#[derive(Args, Debug)]
struct GameArg {
    /// Game JSON file.
    #[arg(long)]
    game: PathBuf,
}

#[derive(Args, Debug)]
struct SymmetryArgs {
    /// Generator permutation as a comma-separated image list, e.g. `1,0,2`; repeatable.
    /// Without generators every symmetry of the game is found by brute force.
    #[arg(long = "perm", value_parser = parse_perm)]
    perms: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Replicator,
    Gradient,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TolArg {
    Exact,
    Optimizer,
}

fn parse_class(s: &str) -> Result<GamutClass, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_perm(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

fn parse_range(s: &str) -> Result<[usize; 2], String> {
    let (lo, hi) = s.split_once("..").unwrap_or((s, s));
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok([num(lo)?, num(hi.trim_start_matches('='))?])
}

enum Failure {
    /// Checks ran and something did not hold.
    Assertion(String),
    Usage(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

type Outcome = Result<(), Failure>;

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn read_game(path: &Path) -> Result<Game, Error> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), Error> {
    let io = |path: &Path, e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| io(&path, e))
}

fn json<T: Serialize>(value: &T) -> Result<String, Error> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Prints `text` and, with `--out`, saves it as `name`.
fn emit(cli: &Cli, name: &str, text: &str) -> Result<(), Error> {
    print!("{text}");
    if let Some(dir) = &cli.out {
        write_file(dir, name, text)?;
    }
    Ok(())
}

fn require_json(cli: &Cli, what: &str) -> Result<(), Error> {
    match cli.format {
        None | Some(Format::Json) => Ok(()),
        Some(f) => Err(Error::InvalidArgument(format!("{what} output is JSON only, not {f:?}"))),
    }
}

fn partition_for(game: &Game, args: &SymmetryArgs) -> Result<(symmetry::SymmetryGroup, OrbitPartition), Error> {
    let group = if args.perms.is_empty() {
        all_symmetries(game)?
    } else {
        let generators = args
            .perms
            .iter()
            .map(|p| {
                let perm = Permutation::new(p.clone())?;
                if let Err(why) = symmetry::check_symmetry(game, &perm) {
                    return Err(Error::InvalidPermutation(format!("{:?} is not a symmetry of the game: {why:?}", p)));
                }
                Ok(perm)
            })
            .collect::<Result<Vec<_>, _>>()?;
        generate_group(game.players(), &generators)?
    };
    let partition = symmetry::orbits(&group);
    Ok((group, partition))
}

fn optimizer_config(cli: &Cli) -> Result<OptimizerConfig, Error> {
    let mut config = match &cli.config {
        None => OptimizerConfig::default(),
        Some(path) if path.extension().is_some_and(|e| e == "json") => serde_json::from_str(&read_text(path)?)?,
        Some(path) => toml::from_str(&read_text(path)?)?,
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn parse_strategies(s: &str) -> Result<StrategyProfile, Error> {
    let strategies = s
        .split(';')
        .map(|player| {
            player
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidArgument(format!("bad probability {x:?}: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    StrategyProfile::new(strategies)
}

#[derive(Serialize)]
struct SymmetryOutput<'a> {
    order: usize,
    full_symmetric_group: bool,
    orbits: &'a [Vec<usize>],
    generators: &'a [Permutation],
    elements: Vec<&'a Permutation>,
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Generate { class, players, actions } => {
            require_json(cli, "generate")?;
            let spec = GamutSpec {
                class: *class,
                players: *players,
                actions: *actions,
                seed: cli.seed.unwrap_or(0),
            };
            emit(cli, "game.json", &json(&GamutGame::generate(spec)?)?)?;
        }
        Command::Optimize {
            game,
            symmetry,
            method,
            runs,
        } => {
            require_json(cli, "optimize")?;
            let game = read_game(&game.game)?;
            let (_, partition) = partition_for(&game, symmetry)?;
            let mut config = optimizer_config(cli)?;
            if let Some(r) = runs {
                config.restarts = *r;
            }
            let methods: &[Method] = match method {
                MethodArg::Replicator => &[Method::Replicator],
                MethodArg::Gradient => &[Method::Gradient],
                MethodArg::Both => &Method::BOTH,
            };
            let pool = thread_pool(cli.threads)?;
            let out = pool.install(|| best_of_runs(&game, &partition, &config, methods))?;
            #[derive(Serialize)]
            struct Output<'a> {
                orbits: &'a [Vec<usize>],
                best_index: usize,
                best: &'a optimize::OptRun,
                runs: &'a [optimize::OptRun],
            }
            let text = json(&Output {
                orbits: partition.orbits(),
                best_index: out.best_index,
                best: &out.best,
                runs: &out.runs,
            })?;
            emit(cli, "optrun.json", &text)?;
        }
        Command::Analyze {
            game,
            profile,
            strategies,
            tol,
            grid,
        } => {
            let game = read_game(&game.game)?;
            if let Some(steps) = grid {
                let rows = analysis::eu_grid(&game, *steps)?;
                let text = match cli.format {
                    Some(Format::Json) => json(&rows)?,
                    Some(Format::Md) => {
                        let mut t = String::from("| p | q | EU |\n|---|---|---|\n");
                        for (p, q, v) in rows {
                            t.push_str(&format!("| {p:.4} | {q:.4} | {v:.4} |\n"));
                        }
                        t
                    }
                    _ => {
                        let mut t = String::from("p,q,eu\n");
                        for (p, q, v) in rows {
                            t.push_str(&format!("{p},{q},{v}\n"));
                        }
                        t
                    }
                };
                emit(cli, "grid.csv", &text)?;
                return Ok(());
            }
            require_json(cli, "analyze")?;
            let profile = match (profile, strategies) {
                (Some(path), _) => serde_json::from_str(&read_text(path)?).map_err(Error::from)?,
                (None, Some(s)) => parse_strategies(s)?,
                (None, None) => return Err(Error::InvalidArgument("give --profile or --strategies".into()).into()),
            };
            let tol = match tol {
                TolArg::Exact => EquilibriumTol::exact(),
                TolArg::Optimizer => EquilibriumTol::optimizer(),
            };
            emit(cli, "report.json", &json(&analysis::analyze(&game, &profile, tol)?)?)?;
        }
        Command::Symmetries { game, symmetry } => {
            require_json(cli, "symmetries")?;
            let game = read_game(&game.game)?;
            let (group, partition) = partition_for(&game, symmetry)?;
            let text = json(&SymmetryOutput {
                order: group.len(),
                full_symmetric_group: group.is_full_symmetric_group(),
                orbits: partition.orbits(),
                generators: group.generators(),
                elements: group.elements().collect(),
            })?;
            emit(cli, "symmetries.json", &text)?;
        }
        Command::Sweep {
            games_per_cell,
            players,
            actions,
            classes,
            runs,
        } => {
            let mut config = match &cli.config {
                Some(path) => SweepConfig::from_toml(&read_text(path)?)?,
                None => SweepConfig::default(),
            };
            if let Some(seed) = cli.seed {
                config.master_seed = seed;
            }
            if let Some(dir) = &cli.out {
                config.output_dir = dir.clone();
            }
            if let Some(k) = games_per_cell {
                config.games_per_cell = *k;
            }
            if let Some(r) = players {
                config.player_range = *r;
            }
            if let Some(r) = actions {
                config.action_range = *r;
            }
            if let Some(c) = classes {
                config.classes = c.clone();
            }
            if let Some(r) = runs {
                config.runs_per_method = *r;
            }
            let report = harness::run_sweep(&config, cli.threads)?;
            harness::write_outputs(&report, &config.output_dir)?;
            let text = match cli.format {
                None | Some(Format::Csv) => sweep::cells_csv(&report),
                Some(Format::Md) => sweep::summary_markdown(&report),
                Some(Format::Json) => json(&report.cells)?,
            };
            print!("{text}");
            for f in &report.failures {
                eprintln!("failed {} n={} A={} #{}: {}", f.class, f.players, f.actions, f.index, f.error);
            }
            let violations = report.nash_violations();
            if violations > 0 || !report.failures.is_empty() {
                return Err(Failure::Assertion(format!(
                    "{violations} converged optima failed the Nash check, {} games failed",
                    report.failures.len()
                )));
            }
        }
        Command::Fixtures => {
            let report = harness::run_fixtures();
            let text = match cli.format {
                Some(Format::Json) => json(&report)?,
                Some(Format::Csv) => {
                    let mut t = String::from("fixture,check,passed,detail\n");
                    for c in &report.checks {
                        t.push_str(&format!("{},\"{}\",{},\"{}\"\n", c.fixture, c.name, c.passed, c.detail.replace('"', "'")));
                    }
                    t
                }
                _ => {
                    let mut t = String::new();
                    for c in &report.checks {
                        let mark = if c.passed { "PASS" } else { "FAIL" };
                        t.push_str(&format!("{mark} {}: {} ({})\n", c.fixture, c.name, c.detail));
                    }
                    t
                }
            };
            emit(cli, "fixtures.txt", &text)?;
            if !report.passed() {
                return Err(Failure::Assertion(format!("{} fixture checks failed", report.failures().count())));
            }
        }
    }
    Ok(())
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, Error> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))
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
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion(msg)) => {
            eprintln!("symteam: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("symteam: {e}");
            ExitCode::from(2)
        }
    }
}
