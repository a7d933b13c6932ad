use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use qpgame_core::board::{Player, Position, MAX_N};
use qpgame_core::error::SolveError;
use qpgame_core::reporting::{ReportConfig, Reporter};
use qpgame_core::solver::{solve, ProgressSink, SearchOptions, SearchStats};
use qpgame_core::tables::AnswerTables;
use serde::Serialize;

use crate::args::CheckArgs;

/// The sizes checked when no range is given.
pub const DEFAULT_SIZES: [usize; 4] = [6, 8, 10, 12];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Conclusive,
    Inconclusive,
    Cancelled,
}

#[derive(Debug, Serialize)]
pub struct FirstMoveJson {
    pub row: u8,
    pub col: u8,
    pub winner: u8,
    pub calls: u64,
}

#[derive(Debug, Serialize)]
pub struct CaseJson {
    pub n: usize,
    /// `win` / `loss` for player 1, `inconclusive` or `cancelled`.
    pub result: &'static str,
    pub winner: Option<u8>,
    pub calls: u64,
    pub wall_time_ms: f64,
    pub restricted: bool,
    pub options: String,
    pub first_moves: Vec<FirstMoveJson>,
}

#[derive(Debug, Serialize)]
pub struct CheckJson {
    pub cases: Vec<CaseJson>,
}

pub fn sizes(args: &CheckArgs) -> Result<Vec<usize>> {
    if args.min.is_none() && args.max.is_none() {
        return Ok(DEFAULT_SIZES.to_vec());
    }
    let min = args.min.unwrap_or(1);
    let max = args.max.unwrap_or(min.max(12));
    if min < 1 || min > max || max > MAX_N {
        bail!("invalid range: need 1 <= min <= max <= {MAX_N}, got min {min}, max {max}");
    }
    Ok((min..=max).filter(|n| !args.even_only || n % 2 == 0).collect())
}

pub fn search_options(args: &CheckArgs) -> Result<SearchOptions> {
    let tables = match &args.tables {
        Some(path) => Some(Arc::new(
            AnswerTables::load(path).with_context(|| format!("loading tables {}", path.display()))?,
        )),
        None => None,
    };
    Ok(SearchOptions {
        use_rotsym_pruning: !args.no_rotsym,
        use_forbidden_pruning: !args.no_forbidden,
        use_first_move_canonicalization: !args.no_canonical,
        force_inner_start_even_small: !args.no_inner_start,
        use_reply_row_rotation: !args.no_row_rotation,
        odd_n_strategy_mode: !args.no_odd_strategy || args.odd_strategy,
        progress_interval: args.progress_interval,
        tables,
        ..SearchOptions::default()
    })
}

struct CheckSink<'a, S: Write, L: Write> {
    reporter: &'a mut Reporter<S, L>,
    cancel: &'a AtomicBool,
}

impl<S: Write, L: Write> ProgressSink for CheckSink<'_, S, L> {
    fn on_calls_milestone(&mut self, total_calls: u64) {
        self.reporter.on_calls_milestone(total_calls)
    }
    fn on_first_move_result(&mut self, first: Position, winner: Player, calls: u64) {
        self.reporter.on_first_move_result(first, winner, calls)
    }
    fn on_third_move_enter(&mut self, first: Position, third: Position) {
        self.reporter.on_third_move_enter(first, third)
    }
    fn on_third_move_exit(&mut self, player2_wins: bool) {
        self.reporter.on_third_move_exit(player2_wins)
    }
    fn poll_cancel(&mut self) -> bool {
        self.cancel.load(Ordering::Relaxed)
    }
}

fn first_moves_json(stats: &SearchStats) -> Vec<FirstMoveJson> {
    stats
        .per_first_move
        .iter()
        .map(|s| FirstMoveJson {
            row: s.position.row,
            col: s.position.col,
            winner: s.winner.number(),
            calls: s.calls,
        })
        .collect()
}

/// Runs every requested case, writing stream output and the listing through
/// `reporter`.
pub fn run_check<S: Write, L: Write>(
    args: &CheckArgs,
    reporter: &mut Reporter<S, L>,
    cancel: &AtomicBool,
) -> Result<(CheckStatus, CheckJson)> {
    let sizes = sizes(args)?;
    let opts = search_options(args)?;
    let mut cases = Vec::new();
    let mut status = CheckStatus::Conclusive;
    reporter.write_header()?;
    for n in sizes {
        {
            let config = reporter.config_mut();
            config.first_move_checking_statistics = args.first_move_stats.unwrap_or(n >= 16);
            config.indicate_third_moves_checking = args.third_move_markers.unwrap_or(n >= 16);
        }
        reporter.write_case_start(n)?;
        let started = Instant::now();
        let result = solve(n, &opts, CheckSink { reporter: &mut *reporter, cancel });
        let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
        let options = opts.fingerprint();
        match result {
            Ok(solution) => {
                reporter.write_case_end(solution.outcome, solution.stats.calls)?;
                let win = solution.outcome.winner == Player::One;
                cases.push(CaseJson {
                    n,
                    result: if win { "win" } else { "loss" },
                    winner: Some(solution.outcome.winner.number()),
                    calls: solution.stats.calls,
                    wall_time_ms,
                    restricted: solution.stats.restricted,
                    options,
                    first_moves: first_moves_json(&solution.stats),
                });
            }
            Err(SolveError::Inconclusive { winner, calls, stats }) => {
                reporter.line(&format!(
                    "Search inconclusive. {} wins only against a restricted opponent. Sum of calls: {calls}",
                    capitalize(&winner.to_string())
                ))?;
                reporter.line("")?;
                status = CheckStatus::Inconclusive;
                cases.push(CaseJson {
                    n,
                    result: "inconclusive",
                    winner: None,
                    calls,
                    wall_time_ms,
                    restricted: true,
                    options,
                    first_moves: first_moves_json(&stats),
                });
            }
            Err(SolveError::Cancelled { calls }) => {
                reporter.write_cancelled()?;
                reporter.flush()?;
                cases.push(CaseJson {
                    n,
                    result: "cancelled",
                    winner: None,
                    calls,
                    wall_time_ms,
                    restricted: false,
                    options,
                    first_moves: Vec::new(),
                });
                return Ok((CheckStatus::Cancelled, CheckJson { cases }));
            }
            Err(e) => return Err(e).with_context(|| format!("checking n = {n}")),
        }
    }
    reporter.write_stop()?;
    reporter.flush()?;
    Ok((status, CheckJson { cases }))
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn write_json(path: &Path, results: &CheckJson) -> Result<()> {
    let text = serde_json::to_string_pretty(results)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn report_config(args: &CheckArgs) -> ReportConfig {
    ReportConfig {
        listing_path: args.listing.clone(),
        emit_progress_plus: !args.no_progress,
        progress_interval: args.progress_interval,
        ..ReportConfig::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{Cli, Command};
    use clap::Parser;

    fn check_args(argv: &[&str]) -> CheckArgs {
        let mut full = vec!["qpgame", "check"];
        full.extend_from_slice(argv);
        match Cli::try_parse_from(full).unwrap().command {
            Command::Check(a) => a,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn default_sizes_follow_the_shipped_loop() {
        assert_eq!(sizes(&check_args(&[])).unwrap(), vec![6, 8, 10, 12]);
        assert_eq!(sizes(&check_args(&["--min", "5", "--max", "5"])).unwrap(), vec![5]);
        assert_eq!(sizes(&check_args(&["--min", "3", "--max", "8", "--even-only"])).unwrap(), vec![4, 6, 8]);
        assert!(sizes(&check_args(&["--min", "9", "--max", "4"])).is_err());
        assert!(sizes(&check_args(&["--min", "1", "--max", "33"])).is_err());
    }

    #[test]
    fn pruning_flags_map_to_options() {
        let opts = search_options(&check_args(&["--no-forbidden", "--no-row-rotation"])).unwrap();
        assert!(!opts.use_forbidden_pruning && !opts.use_reply_row_rotation);
        assert!(opts.use_rotsym_pruning && opts.odd_n_strategy_mode);
        let opts = search_options(&check_args(&["--no-odd-strategy"])).unwrap();
        assert!(!opts.odd_n_strategy_mode);
    }

    #[test]
    fn runs_small_cases_into_buffers() {
        let args = check_args(&["--min", "4", "--max", "6", "--first-move-stats", "true"]);
        let mut reporter = Reporter::new(report_config(&args), Vec::new(), Vec::new());
        let (status, json) = run_check(&args, &mut reporter, &AtomicBool::new(false)).unwrap();
        assert_eq!(status, CheckStatus::Conclusive);
        assert_eq!(json.cases.iter().map(|c| c.result).collect::<Vec<_>>(), ["win", "win", "win"]);
        let (_, listing) = reporter.into_parts();
        let listing = String::from_utf8(listing).unwrap();
        assert!(listing.contains("Starting search with n = 5\npl. 1: (2,2) -> pl. 2: loss."));
        assert!(listing.ends_with("== Regular program stop ==\n"));
    }

    #[test]
    fn cancellation_finalizes_listing() {
        let args = check_args(&["--min", "12", "--max", "12"]);
        let mut reporter = Reporter::new(report_config(&args), Vec::new(), Vec::new());
        let (status, json) = run_check(&args, &mut reporter, &AtomicBool::new(true)).unwrap();
        assert_eq!(status, CheckStatus::Cancelled);
        assert_eq!(json.cases[0].result, "cancelled");
        let (_, listing) = reporter.into_parts();
        assert!(String::from_utf8(listing).unwrap().ends_with("== Execution cancelled ==\n"));
    }
}
