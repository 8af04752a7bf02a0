//! Command-line front end.
//!
//! Output is line oriented: results as `name=value`, run parameters echoed
//! on lines starting with `#`. Exit status is 0 on success or feasibility,
//! 2 when the answer is "infeasible" (or a board fails verification) and 1
//! for usage and I/O errors.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use zerodisc_core::annealer::{AnnealObjective, AnnealParams};
use zerodisc_core::builder::{build_with_budget, BuildError, DEFAULT_BACKTRACK_BUDGET};
use zerodisc_core::feasibility::{classify, decide, reduce};
use zerodisc_core::grid::{discrepancy_report, Dims};
use zerodisc_core::halftone::dither;
use zerodisc_core::oracle::{count_witnesses, oracle_decide, OracleStatus, DEFAULT_BUDGET};

use crate::matrix::{read_matrix, write_matrix};
use crate::netpbm::{read_pgm, write_pbm, PbmMode};
use crate::parallel::{anneal_parallel, ordered_map};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "zerodisc", version, about = "Zero-discrepancy toroidal matrices and ordered dithering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Max,
    L2,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether an m x n board with equal k x l region sums exists.
    Decide { m: usize, n: usize, k: usize, l: usize },
    /// Build and print a verified zero-discrepancy board.
    Construct {
        m: usize,
        n: usize,
        k: usize,
        l: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        /// Node budget for the backtracking fallback.
        #[arg(long, default_value_t = DEFAULT_BACKTRACK_BUDGET)]
        budget: u64,
    },
    /// Report region-sum statistics of a matrix file.
    Verify { file: PathBuf, k: usize, l: usize },
    /// Exhaustive search (small boards only).
    Oracle {
        m: usize,
        n: usize,
        k: usize,
        l: usize,
        /// Count all witnesses with 0 at the origin.
        #[arg(long)]
        count: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Simulated annealing for a low-discrepancy board.
    Anneal {
        m: usize,
        n: usize,
        k: usize,
        l: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        iters: u64,
        #[arg(long, default_value_t = 1)]
        restarts: u32,
        #[arg(long, value_enum, default_value = "l2")]
        objective: ObjectiveArg,
        /// Starting temperature as NUM or NUM/DEN (objective units).
        #[arg(long)]
        temperature: Option<String>,
        /// Geometric cooling factor as NUM/DEN.
        #[arg(long)]
        cooling: Option<String>,
        #[arg(long)]
        levels: Option<u32>,
        /// Worker threads; does not change the result.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Halftone a PGM image with a matrix as threshold array.
    Dither {
        #[arg(short = 'm', long = "matrix")]
        matrix: PathBuf,
        #[arg(short = 'i', long = "input")]
        input: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Write plain (P1) instead of packed (P4) PBM.
        #[arg(long)]
        ascii: bool,
    },
    /// Tabulate the decision rule for every tuple with m*n <= max-mn.
    Survey {
        #[arg(long = "max-mn")]
        max_mn: usize,
        /// Compare every row against exhaustive search and the builder.
        #[arg(long)]
        check_oracle: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn dims(m: usize, n: usize, k: usize, l: usize) -> Result<Dims> {
    Dims::new(m, n, k, l).map_err(|e| anyhow!("invalid dimensions ({m}, {n}, {k}, {l}): {e}"))
}

fn fraction(text: &str) -> Result<(u64, u64)> {
    let (num, den) = text.split_once('/').unwrap_or((text, "1"));
    let num = num.trim().parse().with_context(|| format!("bad numerator in {text:?}"))?;
    let den = den.trim().parse().with_context(|| format!("bad denominator in {text:?}"))?;
    Ok((num, den))
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    match command {
        Command::Decide { m, n, k, l } => {
            let d = dims(m, n, k, l)?;
            let r = reduce(&d);
            let reason = classify(&d);
            let verdict = if reason.is_feasible() { "feasible" } else { "infeasible" };
            writeln!(out, "{verdict} {reason}")?;
            writeln!(out, "g={}", r.g)?;
            writeln!(out, "h={}", r.h)?;
            writeln!(out, "target_x2={}", d.target_sum_x2())?;
            Ok(if reason.is_feasible() { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::Construct { m, n, k, l, output, budget } => {
            let d = dims(m, n, k, l)?;
            match build_with_budget(&d, budget) {
                Ok((strategy, board)) => {
                    writeln!(err, "# strategy={}", strategy.as_str())?;
                    let text = write_matrix(&board);
                    match output {
                        Some(path) => std::fs::write(&path, text)
                            .with_context(|| format!("writing {}", path.display()))?,
                        None => out.write_all(text.as_bytes())?,
                    }
                    Ok(EXIT_OK)
                }
                Err(BuildError::Infeasible(reason)) => {
                    writeln!(out, "infeasible {reason}")?;
                    Ok(EXIT_INFEASIBLE)
                }
                Err(e) => bail!("construction failed: {e}"),
            }
        }
        Command::Verify { file, k, l } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let board = read_matrix(&text).with_context(|| format!("parsing {}", file.display()))?;
            let rep = discrepancy_report(&board, k, l).map_err(|e| anyhow!("{e}"))?;
            writeln!(out, "target_x2={}", rep.target_x2)?;
            writeln!(out, "min_sum={}", rep.min_sum)?;
            writeln!(out, "max_sum={}", rep.max_sum)?;
            writeln!(out, "spread={}", rep.spread)?;
            writeln!(out, "max_abs_dev_x2={}", rep.max_abs_dev_x2)?;
            writeln!(out, "l2_dev_x4={}", rep.l2_dev_x4)?;
            Ok(if rep.is_zero() { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::Oracle { m, n, k, l, count, budget } => {
            let d = dims(m, n, k, l)?;
            writeln!(out, "# budget={budget}")?;
            if count {
                let c = count_witnesses(&d, budget).map_err(|e| anyhow!("{e}"))?;
                writeln!(out, "count={c}")?;
                return Ok(if c > 0 { EXIT_OK } else { EXIT_INFEASIBLE });
            }
            let res = oracle_decide(&d, budget);
            let status = match res.status {
                OracleStatus::Feasible => "feasible",
                OracleStatus::Infeasible => "infeasible",
                OracleStatus::BudgetExceeded => "budget-exceeded",
            };
            writeln!(out, "{status}")?;
            writeln!(out, "nodes={}", res.nodes_explored)?;
            if let Some(w) = &res.witness {
                out.write_all(write_matrix(w).as_bytes())?;
            }
            match res.status {
                OracleStatus::Feasible => Ok(EXIT_OK),
                OracleStatus::Infeasible => Ok(EXIT_INFEASIBLE),
                OracleStatus::BudgetExceeded => {
                    writeln!(err, "error: search budget of {budget} nodes exhausted")?;
                    Ok(EXIT_ERROR)
                }
            }
        }
        Command::Anneal {
            m,
            n,
            k,
            l,
            seed,
            iters,
            restarts,
            objective,
            temperature,
            cooling,
            levels,
            threads,
            output,
        } => {
            let d = dims(m, n, k, l)?;
            let objective = match objective {
                ObjectiveArg::Max => AnnealObjective::MaxAbsDevX2,
                ObjectiveArg::L2 => AnnealObjective::L2DevX4,
            };
            let mut params = AnnealParams::for_dims(&d, objective, seed, iters);
            params.restarts = restarts;
            if let Some(t) = temperature {
                params.initial_temperature = fraction(&t)?;
            }
            if let Some(c) = cooling {
                params.cooling = fraction(&c)?;
            }
            if let Some(lv) = levels {
                params.temperature_levels = lv;
            }
            params.validate().map_err(|e| anyhow!("{e}"))?;
            writeln!(out, "# seed={seed}")?;
            writeln!(out, "# iters={iters}")?;
            writeln!(out, "# restarts={restarts}")?;
            writeln!(out, "# objective={}", objective.as_str())?;
            let (tn, td) = params.initial_temperature;
            writeln!(out, "# temperature={tn}/{td}")?;
            let (cn, cd) = params.cooling;
            writeln!(out, "# cooling={cn}/{cd}")?;
            writeln!(out, "# levels={}", params.temperature_levels)?;
            let res = anneal_parallel(&d, &params, threads).map_err(|e| anyhow!("{e}"))?;
            let rep = &res.best_report;
            writeln!(out, "objective={}", res.objective(objective))?;
            writeln!(out, "initial_objective={}", res.initial_objective)?;
            writeln!(out, "spread={}", rep.spread)?;
            writeln!(out, "max_abs_dev_x2={}", rep.max_abs_dev_x2)?;
            writeln!(out, "l2_dev_x4={}", rep.l2_dev_x4)?;
            writeln!(out, "accepted_moves={}", res.accepted_moves)?;
            writeln!(out, "evaluations={}", res.evaluations)?;
            let text = write_matrix(&res.best_board);
            match output {
                Some(path) => {
                    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
        Command::Dither { matrix, input, output, ascii } => {
            let text = std::fs::read_to_string(&matrix).with_context(|| format!("reading {}", matrix.display()))?;
            let board = read_matrix(&text).with_context(|| format!("parsing {}", matrix.display()))?;
            let data = std::fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let image = read_pgm(&data).with_context(|| format!("decoding {}", input.display()))?;
            let bits = dither(&image, &board);
            let mode = if ascii { PbmMode::P1 } else { PbmMode::P4 };
            std::fs::write(&output, write_pbm(&bits, mode))
                .with_context(|| format!("writing {}", output.display()))?;
            writeln!(out, "width={}", bits.width())?;
            writeln!(out, "height={}", bits.height())?;
            writeln!(out, "ink={}", bits.ink_count())?;
            Ok(EXIT_OK)
        }
        Command::Survey { max_mn, check_oracle, budget } => survey(max_mn, check_oracle, budget, out, err),
    }
}

fn survey(max_mn: usize, check: bool, budget: u64, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    writeln!(out, "# max-mn={max_mn}")?;
    writeln!(out, "# check-oracle={check}")?;
    if check {
        writeln!(out, "# budget={budget}")?;
    }
    let mut tuples = Vec::new();
    for m in 1..=max_mn {
        for n in 1..=max_mn / m {
            for k in 1..=m {
                for l in 1..=n {
                    tuples.push(dims(m, n, k, l)?);
                }
            }
        }
    }
    let checks = if check {
        ordered_map(&tuples, |d| {
            let rule = classify(d).is_feasible();
            let res = oracle_decide(d, budget);
            let oracle = match res.status {
                OracleStatus::Feasible => Some(true),
                OracleStatus::Infeasible => Some(false),
                OracleStatus::BudgetExceeded => None,
            };
            let built = !rule
                || build_with_budget(d, DEFAULT_BACKTRACK_BUDGET)
                    .map(|(_, b)| b.is_zero_discrepancy(d.k(), d.l()).unwrap_or(false))
                    .unwrap_or(false);
            (oracle, built)
        })
    } else {
        Vec::new()
    };
    let mut disagreements = 0usize;
    for (idx, d) in tuples.iter().enumerate() {
        let r = reduce(d);
        let reason = classify(d);
        let verdict = if reason.is_feasible() { "feasible" } else { "infeasible" };
        writeln!(out, "{} {} {} {} {} {} {verdict} {reason}", d.m(), d.n(), d.k(), d.l(), r.g, r.h)?;
        if let Some(&(oracle, built)) = checks.get(idx) {
            match oracle {
                Some(o) if o == reason.is_feasible() => {}
                Some(o) => {
                    disagreements += 1;
                    writeln!(err, "mismatch {d}: rule={} oracle={o}", reason.is_feasible())?;
                }
                None => {
                    disagreements += 1;
                    writeln!(err, "unresolved {d}: oracle budget exhausted")?;
                }
            }
            if !built {
                disagreements += 1;
                writeln!(err, "build failed {d}")?;
            }
        }
    }
    if check {
        writeln!(out, "# disagreements={disagreements}")?;
    }
    Ok(if disagreements == 0 { EXIT_OK } else { EXIT_ERROR })
}

/// Decision with witness, for library users that want both at once.
pub fn decide_with_witness(m: usize, n: usize, k: usize, l: usize) -> Result<zerodisc_core::Verdict> {
    Ok(decide(&dims(m, n, k, l)?))
}
