//! Batch experiment over GAMUT cells.
//!
//! Every game is generated from `derive_seed([master, class, players, actions,
//! index])`; its optimizer runs use `derive_seed([game_seed, 1])` as their
//! master seed. Nothing depends on execution order, so output is identical for
//! any thread count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, EquilibriumTol};
use crate::error::{Error, Result};
use crate::gamut::{self, GamutClass, GamutSpec};
use crate::optimize::{best_of_runs, Method, OptimizerConfig};
use crate::rng;
use crate::symmetry::{generate_group, is_symmetry, orbits, OrbitPartition, Permutation};

/// Converged runs must also reach this KKT residual to count toward the Nash check.
pub const KKT_CONVERGED: f64 = 1e-6;
/// Largest exploitability allowed for a converged symmetric optimum.
pub const NASH_TOL: f64 = 1e-4;
pub const CELLS_HEADER: &str =
    "class,players,actions,frac_mixed,frac_single_replicator,frac_single_gradient,frac_any10_replicator,frac_any10_gradient,mean_decrease_pct,n_games";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub classes: Vec<GamutClass>,
    /// Inclusive `[low, high]`.
    pub player_range: [usize; 2],
    pub action_range: [usize; 2],
    pub games_per_cell: usize,
    pub runs_per_method: usize,
    pub master_seed: u64,
    /// A best solution is mixed when some orbit's largest probability is below `1 − threshold`.
    pub mixedness_threshold: f64,
    pub output_dir: PathBuf,
    /// Local search settings; `restarts` and `seed` are replaced per game.
    pub optimizer: OptimizerConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            classes: GamutClass::ALL.to_vec(),
            player_range: [2, 5],
            action_range: [2, 5],
            games_per_cell: 100,
            runs_per_method: 10,
            master_seed: 0,
            mixedness_threshold: 1e-4,
            output_dir: PathBuf::from("sweep-out"),
            optimizer: OptimizerConfig::default(),
        }
    }
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: SweepConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.classes.is_empty() {
            return bad("no game classes selected".into());
        }
        for (name, [lo, hi]) in [("player_range", self.player_range), ("action_range", self.action_range)] {
            if lo > hi {
                return bad(format!("{name} [{lo}, {hi}] is empty"));
            }
            if lo < 2 {
                return bad(format!("{name} must start at 2 or more"));
            }
        }
        if self.games_per_cell == 0 {
            return bad("games_per_cell must be at least 1".into());
        }
        if self.runs_per_method == 0 {
            return bad("runs_per_method must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.mixedness_threshold) {
            return bad(format!("mixedness_threshold {} outside [0, 1)", self.mixedness_threshold));
        }
        self.optimizer.validate()
    }

    fn cells(&self) -> Vec<(GamutClass, usize, usize)> {
        let mut cells = Vec::new();
        for &class in &self.classes {
            for n in self.player_range[0]..=self.player_range[1] {
                for m in self.action_range[0]..=self.action_range[1] {
                    cells.push((class, n, m));
                }
            }
        }
        cells
    }
}

pub fn game_seed(master: u64, class: GamutClass, players: usize, actions: usize, index: usize) -> u64 {
    rng::derive_seed(&[master, class.code(), players as u64, actions as u64, index as u64])
}

/// Single orbit from the symmetric group, generated by a transposition and the full cycle.
fn symmetric_generators(players: usize) -> Vec<Permutation> {
    vec![Permutation::transposition(players, 0, 1), Permutation::rotation(players, 1)]
}

/// Outcome for one game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub class: GamutClass,
    pub players: usize,
    pub actions: usize,
    pub index: usize,
    pub seed: u64,
    pub best_eu: f64,
    pub best_method: Method,
    pub best_shared: Vec<f64>,
    pub mixed: bool,
    /// Runs per method (replicator, gradient) reaching the best solution.
    pub optimal_runs: [usize; 2],
    /// Converged runs checked for the Nash property and how many failed it.
    pub nash_checked: usize,
    pub nash_violations: usize,
    pub best_exploitability: f64,
    /// Worst-case perturbation decrease on the payoff-normalized game, mixed bests only.
    pub decrease_pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameFailure {
    pub class: GamutClass,
    pub players: usize,
    pub actions: usize,
    pub index: usize,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub class: GamutClass,
    pub players: usize,
    pub actions: usize,
    /// Games that completed; failures are excluded from every fraction.
    pub n_games: usize,
    pub n_failed: usize,
    pub frac_mixed: f64,
    pub frac_single_replicator: f64,
    pub frac_single_gradient: f64,
    pub frac_any_replicator: f64,
    pub frac_any_gradient: f64,
    /// Games where some run of either method reached the best solution (always all of them).
    pub frac_any_either: f64,
    pub mean_decrease_pct: Option<f64>,
    pub n_decrease: usize,
    pub nash_checked: usize,
    pub nash_violations: usize,
    pub max_best_exploitability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub runs_per_method: usize,
    pub cells: Vec<CellResult>,
    pub games: Vec<GameRecord>,
    pub failures: Vec<GameFailure>,
}

impl SweepReport {
    pub fn cell(&self, class: GamutClass, players: usize, actions: usize) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.class == class && c.players == players && c.actions == actions)
    }

    pub fn nash_violations(&self) -> usize {
        self.cells.iter().map(|c| c.nash_violations).sum()
    }
}

/// Best-solution tolerance: `1e-6·max(1, |best|)`.
pub fn optimal_tol(best: f64) -> f64 {
    1e-6 * best.abs().max(1.0)
}

fn run_game(config: &SweepConfig, class: GamutClass, n: usize, m: usize, index: usize, partition: &OrbitPartition) -> Result<GameRecord> {
    let seed = game_seed(config.master_seed, class, n, m, index);
    let spec = GamutSpec {
        class,
        players: n,
        actions: m,
        seed,
    };
    let game = gamut::generate(&spec)?;
    if !symmetric_generators(n).iter().all(|p| is_symmetry(&game, p)) {
        return Err(Error::InvalidGame("generated game is not totally symmetric".into()));
    }
    let optimizer = OptimizerConfig {
        restarts: config.runs_per_method,
        seed: rng::derive_seed(&[seed, 1]),
        ..config.optimizer.clone()
    };
    let out = best_of_runs(&game, partition, &optimizer, &Method::BOTH)?;
    let best = &out.best;
    let tol = optimal_tol(best.expected_utility);
    let optimal_runs = [Method::Replicator, Method::Gradient]
        .map(|method| out.runs_of(method).filter(|r| r.expected_utility >= best.expected_utility - tol).count());

    let mut nash_checked = 0;
    let mut nash_violations = 0;
    for run in out.runs.iter().filter(|r| r.converged && r.kkt_residual <= KKT_CONVERGED) {
        nash_checked += 1;
        if analysis::exploitability(&game, &run.profile(partition))? > NASH_TOL {
            nash_violations += 1;
        }
    }
    let best_profile = best.profile(partition);
    let best_exploitability = analysis::exploitability(&game, &best_profile)?;
    let mixed = !best.is_pure(config.mixedness_threshold);
    let decrease_pct = if mixed {
        let normalized = gamut::normalize(&game, class)?;
        let profile = analysis::snap_near_pure(&best_profile, config.mixedness_threshold);
        analysis::worst_case_perturbation_decrease(&normalized, &profile, EquilibriumTol::optimizer(), &mut rng::stream(seed, 2))?
            .decrease_pct
    } else {
        None
    };
    Ok(GameRecord {
        class,
        players: n,
        actions: m,
        index,
        seed,
        best_eu: best.expected_utility,
        best_method: best.method,
        best_shared: best.final_shared[0].clone(),
        mixed,
        optimal_runs,
        nash_checked,
        nash_violations,
        best_exploitability,
        decrease_pct,
    })
}

fn aggregate(class: GamutClass, n: usize, m: usize, runs: usize, games: &[&GameRecord], failed: usize) -> CellResult {
    let count = games.len();
    let frac = |k: usize| if count == 0 { f64::NAN } else { k as f64 / count as f64 };
    let single = |method: usize| {
        let hits: usize = games.iter().map(|g| g.optimal_runs[method]).sum();
        if count == 0 {
            f64::NAN
        } else {
            hits as f64 / (count * runs) as f64
        }
    };
    let decreases: Vec<f64> = games.iter().filter_map(|g| g.decrease_pct).collect();
    CellResult {
        class,
        players: n,
        actions: m,
        n_games: count,
        n_failed: failed,
        frac_mixed: frac(games.iter().filter(|g| g.mixed).count()),
        frac_single_replicator: single(0),
        frac_single_gradient: single(1),
        frac_any_replicator: frac(games.iter().filter(|g| g.optimal_runs[0] > 0).count()),
        frac_any_gradient: frac(games.iter().filter(|g| g.optimal_runs[1] > 0).count()),
        frac_any_either: frac(games.iter().filter(|g| g.optimal_runs.iter().any(|&k| k > 0)).count()),
        mean_decrease_pct: (!decreases.is_empty()).then(|| decreases.iter().sum::<f64>() / decreases.len() as f64),
        n_decrease: decreases.len(),
        nash_checked: games.iter().map(|g| g.nash_checked).sum(),
        nash_violations: games.iter().map(|g| g.nash_violations).sum(),
        max_best_exploitability: games.iter().map(|g| g.best_exploitability).fold(0.0, f64::max),
    }
}

/// Runs the sweep on `threads` workers (all available when `None`). Writes nothing; see [`write_outputs`].
pub fn run_sweep(config: &SweepConfig, threads: Option<usize>) -> Result<SweepReport> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;

    let cells = config.cells();
    let partitions = (config.player_range[0]..=config.player_range[1])
        .map(|n| Ok((n, orbits(&generate_group(n, &symmetric_generators(n))?))))
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<(GamutClass, usize, usize, usize)> = cells
        .iter()
        .flat_map(|&(c, n, m)| (0..config.games_per_cell).map(move |i| (c, n, m, i)))
        .collect();
    let outcomes: Vec<Result<GameRecord>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(c, n, m, i)| {
                let partition = &partitions.iter().find(|(k, _)| *k == n).expect("partition for every player count").1;
                run_game(config, c, n, m, i, partition)
            })
            .collect()
    });

    let mut games = Vec::new();
    let mut failures = Vec::new();
    for (&(class, players, actions, index), outcome) in tasks.iter().zip(outcomes) {
        match outcome {
            Ok(g) => games.push(g),
            Err(e) => failures.push(GameFailure {
                class,
                players,
                actions,
                index,
                error: e.to_string(),
            }),
        }
    }
    let cells = cells
        .into_iter()
        .map(|(c, n, m)| {
            let in_cell: Vec<&GameRecord> = games
                .iter()
                .filter(|g| g.class == c && g.players == n && g.actions == m)
                .collect();
            let failed = failures
                .iter()
                .filter(|f| f.class == c && f.players == n && f.actions == m)
                .count();
            aggregate(c, n, m, config.runs_per_method, &in_cell, failed)
        })
        .collect();
    Ok(SweepReport {
        runs_per_method: config.runs_per_method,
        cells,
        games,
        failures,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per cell with the fixed column schema.
pub fn cells_csv(report: &SweepReport) -> String {
    let mut out = String::new();
    let header = CELLS_HEADER.replace("any10", &format!("any{}", report.runs_per_method));
    writeln!(out, "{header}").unwrap();
    for c in &report.cells {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            c.class,
            c.players,
            c.actions,
            c.frac_mixed,
            c.frac_single_replicator,
            c.frac_single_gradient,
            c.frac_any_replicator,
            c.frac_any_gradient,
            opt(c.mean_decrease_pct),
            c.n_games
        )
        .unwrap();
    }
    out
}

type Column = (&'static str, fn(&CellResult) -> Option<f64>);

struct Table {
    file: &'static str,
    title: &'static str,
    columns: &'static [Column],
}

const TABLES: [Table; 4] = [
    Table {
        file: "table3_mixed.csv",
        title: "Fraction of games whose best symmetric solution is mixed",
        columns: &[("frac_mixed", |c| Some(c.frac_mixed))],
    },
    Table {
        file: "table4_6_single_run.csv",
        title: "Fraction of single runs reaching the best solution",
        columns: &[
            ("frac_single_replicator", |c| Some(c.frac_single_replicator)),
            ("frac_single_gradient", |c| Some(c.frac_single_gradient)),
        ],
    },
    Table {
        file: "table5_7_any_of_k.csv",
        title: "Fraction of games where at least one run reaches the best solution",
        columns: &[
            ("frac_any_replicator", |c| Some(c.frac_any_replicator)),
            ("frac_any_gradient", |c| Some(c.frac_any_gradient)),
        ],
    },
    Table {
        file: "table8_decrease.csv",
        title: "Mean worst-case perturbation decrease (%) over games with a mixed best solution",
        columns: &[("mean_decrease_pct", |c| c.mean_decrease_pct)],
    },
];

fn table_csv(report: &SweepReport, table: &Table) -> String {
    let mut out = String::from("class,players,actions");
    for (name, _) in table.columns {
        out.push(',');
        out.push_str(name);
    }
    out.push_str(",n_games\n");
    for c in &report.cells {
        write!(out, "{},{},{}", c.class, c.players, c.actions).unwrap();
        for (_, get) in table.columns {
            write!(out, ",{}", opt(get(c))).unwrap();
        }
        writeln!(out, ",{}", c.n_games).unwrap();
    }
    out
}

fn grid(out: &mut String, report: &SweepReport, class: GamutClass, name: &str, get: fn(&CellResult) -> Option<f64>) {
    let cells: Vec<&CellResult> = report.cells.iter().filter(|c| c.class == class).collect();
    let mut players: Vec<usize> = cells.iter().map(|c| c.players).collect();
    let mut actions: Vec<usize> = cells.iter().map(|c| c.actions).collect();
    players.dedup();
    actions.sort_unstable();
    actions.dedup();
    writeln!(out, "`{name}`\n").unwrap();
    write!(out, "| players \\ actions |").unwrap();
    for m in &actions {
        write!(out, " {m} |").unwrap();
    }
    write!(out, "\n|---|").unwrap();
    for _ in &actions {
        write!(out, "---|").unwrap();
    }
    out.push('\n');
    for n in &players {
        write!(out, "| {n} |").unwrap();
        for m in &actions {
            let v = cells
                .iter()
                .find(|c| c.players == *n && c.actions == *m)
                .and_then(|c| get(c));
            match v {
                Some(v) if v.is_finite() => write!(out, " {v:.4} |").unwrap(),
                _ => write!(out, " - |").unwrap(),
            }
        }
        out.push('\n');
    }
    out.push('\n');
}

/// Markdown tables, players as rows and actions as columns, four decimals.
/// Collaboration games come last under their own heading.
pub fn summary_markdown(report: &SweepReport) -> String {
    let mut out = String::from("# Sweep summary\n\n");
    let mut classes: Vec<GamutClass> = report.cells.iter().map(|c| c.class).collect();
    classes.sort_unstable();
    classes.dedup();
    for class in classes {
        if class == GamutClass::Collaboration {
            writeln!(out, "## Optional: {class} games\n").unwrap();
        } else {
            writeln!(out, "## {class} games\n").unwrap();
        }
        for table in &TABLES {
            writeln!(out, "### {}\n", table.title).unwrap();
            for (name, get) in table.columns {
                grid(&mut out, report, class, name, *get);
            }
        }
    }
    let games: usize = report.cells.iter().map(|c| c.n_games).sum();
    let checked: usize = report.cells.iter().map(|c| c.nash_checked).sum();
    writeln!(out, "## Checks\n").unwrap();
    writeln!(out, "- games completed: {games}").unwrap();
    writeln!(out, "- games failed: {}", report.failures.len()).unwrap();
    writeln!(
        out,
        "- converged runs checked for the Nash property: {checked}, violations: {}",
        report.nash_violations()
    )
    .unwrap();
    for f in &report.failures {
        writeln!(out, "- failed {} n={} A={} #{}: {}", f.class, f.players, f.actions, f.index, f.error).unwrap();
    }
    out
}

/// Writes `cells.csv`, one CSV per table, `summary.md` and `cells.json` into `dir`.
pub fn write_outputs(report: &SweepReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = vec![
        ("cells.csv".to_string(), cells_csv(report)),
        ("summary.md".to_string(), summary_markdown(report)),
        ("cells.json".to_string(), serde_json::to_string_pretty(&report.cells)? + "\n"),
    ];
    for table in &TABLES {
        files.push((table.file.to_string(), table_csv(report, table)));
    }
    files
        .into_iter()
        .map(|(name, text)| {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
