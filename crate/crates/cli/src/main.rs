mod bench;
mod repl;
mod session;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use excuse_guide_core::excuse::{
    enumerate_minimal_excuses, generate_excuse, rank_excuses, render_excuse, EnumerateOutcome,
    ExcuseOutcome, ExcuseSearchConfig, RenderStyle,
};
use excuse_guide_core::pddl::{parse_domain, parse_problem};
use excuse_guide_core::planner::{
    format_plan, ground, parse_plan, prove_unsolvable, solve, validate_plan, GroundConfig,
    PlanVerdict, SearchBudget, SolveMode, SolveOutcome, UnsolvabilityVerdict,
};

/// Exit codes shared across subcommands.
pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_UNSOLVABLE_AFTER_DEMO: u8 = 2;
pub const EXIT_MISDIRECTED: u8 = 3;
pub const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "excuse-guide",
    about = "Guided-demonstration sessions: find the minimal excuse for an unsolvable task, \
             guide a demonstration that negates it, learn operators and verify the merge"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Interactive,
    Replay,
    Simulate,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a task, print the plan, or prove unsolvability
    Solve {
        #[arg(long)]
        robot_domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        /// Accept any plan instead of an optimal one
        #[arg(long)]
        satisficing: bool,
        /// Validate this plan file instead of searching
        #[arg(long)]
        validate: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate (and optionally enumerate and rank) minimal excuses
    Excuse {
        #[arg(long)]
        robot_domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        /// Human model; enables demonstration-length ranking
        #[arg(long)]
        human_domain: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_edit_size: usize,
        #[arg(long)]
        enumerate_all: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a guided session: excuse, demonstration, learning, merge, verify
    Guide {
        #[arg(long)]
        robot_domain: PathBuf,
        #[arg(long)]
        human_domain: Option<PathBuf>,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Simulate)]
        mode: Mode,
        /// Demonstration trace file (replay mode)
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Embodiment mapping file; identity when absent
        #[arg(long)]
        mapping: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_edit_size: usize,
        #[arg(long)]
        enumerate_all: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an unguided session: the demonstration targets the full goal
    Teach {
        #[arg(long)]
        robot_domain: PathBuf,
        #[arg(long)]
        human_domain: Option<PathBuf>,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Simulate)]
        mode: Mode,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        mapping: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_edit_size: usize,
        #[arg(long)]
        enumerate_all: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark suite and emit a predicted-lengths table
    Bench {
        /// Suite manifest (JSON)
        suite: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve { robot_domain, problem, satisficing, validate, out } => {
            run_solve(&robot_domain, &problem, satisficing, validate.as_deref(), out.as_deref())
        }
        Command::Excuse { robot_domain, problem, human_domain, max_edit_size, enumerate_all, out } => {
            run_excuse(
                &robot_domain,
                &problem,
                human_domain.as_deref(),
                max_edit_size,
                enumerate_all,
                out.as_deref(),
            )
        }
        Command::Guide {
            robot_domain,
            human_domain,
            problem,
            mode,
            trace,
            mapping,
            max_edit_size,
            enumerate_all,
            out,
        } => session::run_session(session::SessionConfig {
            kind: session::SessionKind::Guided,
            robot_domain,
            human_domain,
            problem,
            mode,
            trace,
            mapping,
            max_edit_size,
            enumerate_all,
            out,
        }),
        Command::Teach {
            robot_domain,
            human_domain,
            problem,
            mode,
            trace,
            mapping,
            max_edit_size,
            enumerate_all,
            out,
        } => session::run_session(session::SessionConfig {
            kind: session::SessionKind::Unguided,
            robot_domain,
            human_domain,
            problem,
            mode,
            trace,
            mapping,
            max_edit_size,
            enumerate_all,
            out,
        }),
        Command::Bench { suite, out } => bench::run_benchmark(&suite, out.as_deref()),
    };
    ExitCode::from(code)
}

pub fn input_err(context: &str, err: impl std::fmt::Display) -> u8 {
    eprintln!("error [{context}]: {err}");
    EXIT_INPUT
}

pub fn load_inputs(
    domain_path: &std::path::Path,
    problem_path: &std::path::Path,
) -> Result<(excuse_guide_core::PlanningDomain, excuse_guide_core::PlanningProblem), u8> {
    let domain_text = std::fs::read_to_string(domain_path)
        .map_err(|e| input_err(&domain_path.display().to_string(), e))?;
    let domain = parse_domain(&domain_text)
        .map_err(|e| input_err(&domain_path.display().to_string(), e))?;
    let problem_text = std::fs::read_to_string(problem_path)
        .map_err(|e| input_err(&problem_path.display().to_string(), e))?;
    let problem = parse_problem(&problem_text, &domain)
        .map_err(|e| input_err(&problem_path.display().to_string(), e))?;
    Ok((domain, problem))
}

fn run_solve(
    domain_path: &std::path::Path,
    problem_path: &std::path::Path,
    satisficing: bool,
    validate: Option<&std::path::Path>,
    out: Option<&std::path::Path>,
) -> u8 {
    let (domain, problem) = match load_inputs(domain_path, problem_path) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let task = match ground(&domain, &problem, &GroundConfig::default()) {
        Ok(t) => t,
        Err(e) => return input_err("grounding", e),
    };

    if let Some(plan_path) = validate {
        let text = match std::fs::read_to_string(plan_path) {
            Ok(t) => t,
            Err(e) => return input_err(&plan_path.display().to_string(), e),
        };
        let plan = match parse_plan(&text, &task) {
            Ok(p) => p,
            Err(e) => return input_err("plan", e),
        };
        return match validate_plan(&task, &plan) {
            Ok(PlanVerdict::Valid { cost }) => {
                println!("valid, cost = {cost}");
                EXIT_OK
            }
            Ok(PlanVerdict::InapplicableStep { index }) => {
                println!("invalid: step {index} is inapplicable (cost = infinity)");
                EXIT_MISMATCH
            }
            Ok(PlanVerdict::GoalNotReached) => {
                println!("invalid: goal not reached (cost = infinity)");
                EXIT_MISMATCH
            }
            Err(e) => input_err("plan", e),
        };
    }

    if satisficing {
        match solve(&task, SolveMode::Satisficing, &SearchBudget::default()) {
            SolveOutcome::Plan(plan) => {
                let text = format_plan(&task, &plan);
                print!("{text}");
                if let Some(dir) = out {
                    if let Err(e) = persist(dir, "plan.txt", &text) {
                        return input_err("output", e);
                    }
                }
                EXIT_OK
            }
            SolveOutcome::Unsolvable => {
                println!("unsolvable");
                EXIT_OK
            }
            SolveOutcome::BudgetExceeded => {
                println!("budget exceeded: no verdict");
                EXIT_MISMATCH
            }
        }
    } else {
        match prove_unsolvable(&task, &SearchBudget::default()) {
            UnsolvabilityVerdict::Solvable(plan) => {
                let text = format_plan(&task, &plan);
                print!("{text}");
                if let Some(dir) = out {
                    if let Err(e) = persist(dir, "plan.txt", &text) {
                        return input_err("output", e);
                    }
                }
                EXIT_OK
            }
            UnsolvabilityVerdict::ProvenUnsolvable(cert) => {
                println!("proven unsolvable: {cert:?}");
                EXIT_OK
            }
            UnsolvabilityVerdict::Unknown => {
                println!("budget exceeded: no verdict");
                EXIT_MISMATCH
            }
        }
    }
}

fn run_excuse(
    domain_path: &std::path::Path,
    problem_path: &std::path::Path,
    human_domain: Option<&std::path::Path>,
    max_edit_size: usize,
    enumerate_all: bool,
    out: Option<&std::path::Path>,
) -> u8 {
    let (domain, problem) = match load_inputs(domain_path, problem_path) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let task = match ground(&domain, &problem, &GroundConfig::default()) {
        Ok(t) => t,
        Err(e) => return input_err("grounding", e),
    };
    let cfg = ExcuseSearchConfig { max_edit_size, enumerate_all, ..ExcuseSearchConfig::default() };

    if enumerate_all {
        match enumerate_minimal_excuses(&task, &cfg) {
            EnumerateOutcome::TaskAlreadySolvable(plan) => {
                println!("task already solvable (plan length {}); no excuses", plan.len());
                EXIT_OK
            }
            EnumerateOutcome::NoExcuseWithinBound(diag) => {
                println!("no excuse within {max_edit_size} moves ({diag:?})");
                EXIT_MISMATCH
            }
            EnumerateOutcome::Excuses(excuses, _) => {
                let reports: Vec<_> = excuses.iter().map(|e| e.report(&task)).collect();
                if let Some(human_path) = human_domain {
                    let human_text = match std::fs::read_to_string(human_path) {
                        Ok(t) => t,
                        Err(e) => return input_err(&human_path.display().to_string(), e),
                    };
                    let human = match parse_domain(&human_text) {
                        Ok(d) => d,
                        Err(e) => return input_err(&human_path.display().to_string(), e),
                    };
                    let human_task = match ground(&human, &problem, &GroundConfig::default()) {
                        Ok(t) => t,
                        Err(e) => return input_err("grounding human model", e),
                    };
                    for ranked in rank_excuses(&human_task, &excuses) {
                        let line = render_excuse(&ranked.excuse, RenderStyle::PositiveOnly)
                            .replace('\n', "; ");
                        match ranked.predicted_demo_len {
                            Some(len) => println!("{line}  [predicted demo length {len}]"),
                            None => println!("{line}  [human cannot reach this state]"),
                        }
                    }
                } else {
                    for report in &reports {
                        println!("{}", report.rendered.replace('\n', "; "));
                    }
                }
                if let Some(dir) = out {
                    let json = serde_json::to_string_pretty(&reports).expect("serializable");
                    if let Err(e) = persist(dir, "excuses.json", &json) {
                        return input_err("output", e);
                    }
                }
                EXIT_OK
            }
        }
    } else {
        match generate_excuse(&task, &cfg) {
            ExcuseOutcome::TaskAlreadySolvable(plan) => {
                println!("task already solvable (plan length {}); no excuse needed", plan.len());
                EXIT_OK
            }
            ExcuseOutcome::NoExcuseWithinBound(diag) => {
                println!("no excuse within {max_edit_size} moves ({diag:?})");
                EXIT_MISMATCH
            }
            ExcuseOutcome::Excuse(excuse, _) => {
                println!("{}", render_excuse(&excuse, RenderStyle::PositiveOnly));
                println!("--");
                println!("{}", render_excuse(&excuse, RenderStyle::FullDiff));
                println!("size: {} moves ({} raw edits)", excuse.size_moves, excuse.size_raw);
                if let Some(dir) = out {
                    let json =
                        serde_json::to_string_pretty(&excuse.report(&task)).expect("serializable");
                    if let Err(e) = persist(dir, "excuse.json", &json) {
                        return input_err("output", e);
                    }
                }
                EXIT_OK
            }
        }
    }
}

/// Writes a file atomically: temp file in the target directory, then rename.
pub fn persist(dir: &std::path::Path, name: &str, contents: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(".{name}.tmp"));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, dir.join(name))
}
