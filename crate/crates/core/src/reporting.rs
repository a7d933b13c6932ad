//! Console progress and the `QPGAME.LST` listing.
//!
//! Summary lines go to both the stream and the listing. Progress `+`
//! characters and third-move markers go to the stream only. The listing is
//! flushed after every line so it stays readable if the run is cut short.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::board::{Player, Position};
use crate::solver::{Outcome, ProgressSink};

pub const DEFAULT_LISTING: &str = "QPGAME.LST";
pub const STOP_LINE: &str = "== Regular program stop ==";
pub const CANCEL_LINE: &str = "== Execution cancelled ==";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportConfig {
    pub listing_path: PathBuf,
    pub emit_progress_plus: bool,
    pub first_move_checking_statistics: bool,
    pub indicate_third_moves_checking: bool,
    /// Calls per `+`, only used for the hint line.
    pub progress_interval: u64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            listing_path: PathBuf::from(DEFAULT_LISTING),
            emit_progress_plus: true,
            first_move_checking_statistics: false,
            indicate_third_moves_checking: false,
            progress_interval: 1_000_000,
        }
    }
}

impl ReportConfig {
    /// Per-first-move and third-move output switch on for `n >= 16`.
    pub fn with_size_defaults(mut self, n: usize) -> Self {
        self.first_move_checking_statistics = n >= 16;
        self.indicate_third_moves_checking = n >= 16;
        self
    }
}

fn result_word(player1_wins: bool) -> &'static str {
    if player1_wins {
        "win"
    } else {
        "loss"
    }
}

pub fn case_start_line(n: usize) -> String {
    format!("Starting search with n = {n}")
}

pub fn case_end_line(outcome: Outcome, calls: u64) -> String {
    format!(
        "Search completed. Result of player 1: {}. Sum of calls: {calls}",
        result_word(outcome.winner == Player::One)
    )
}

/// `outcome` is the winner after `first`; the line reports player 2's result.
pub fn first_move_stat_line(first: Position, winner: Player, calls: u64) -> String {
    format!(
        "pl. 1: {first} -> pl. 2: {}. Sum of calls: {calls}",
        result_word(winner == Player::Two)
    )
}

pub fn third_move_enter_marker(first: Position, third: Position) -> String {
    format!("[1: {first}] 3: {third}")
}

pub fn third_move_exit_marker(player2_wins: bool) -> String {
    format!(" -> {}", u8::from(player2_wins))
}

/// Writes to a console stream and a listing sink.
///
/// I/O errors inside [`ProgressSink`] callbacks are held back and returned
/// from the next fallible call.
pub struct Reporter<S: Write, L: Write> {
    config: ReportConfig,
    stream: S,
    listing: L,
    /// The stream has characters after the last newline (`+` or a marker).
    line_open: bool,
    deferred: Option<io::Error>,
}

impl Reporter<io::Stdout, BufWriter<File>> {
    /// Stdout plus a freshly created listing file.
    pub fn to_stdout_and_file(config: ReportConfig) -> io::Result<Self> {
        let listing = create_listing(&config.listing_path)?;
        Ok(Reporter::new(config, io::stdout(), listing))
    }
}

fn create_listing(path: &Path) -> io::Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io::Error::new(e.kind(), format!("creating listing {}: {e}", path.display())))
}

impl<S: Write, L: Write> Reporter<S, L> {
    pub fn new(config: ReportConfig, stream: S, listing: L) -> Self {
        Reporter { config, stream, listing, line_open: false, deferred: None }
    }

    pub fn config(&self) -> &ReportConfig {
        &self.config
    }

    pub fn config_mut(&mut self) -> &mut ReportConfig {
        &mut self.config
    }

    pub fn into_parts(self) -> (S, L) {
        (self.stream, self.listing)
    }

    fn take_deferred(&mut self) -> io::Result<()> {
        self.deferred.take().map_or(Ok(()), Err)
    }

    fn close_stream_line(&mut self) -> io::Result<()> {
        if self.line_open {
            self.stream.write_all(b"\n")?;
            self.line_open = false;
        }
        Ok(())
    }

    /// A line for both the stream and the listing.
    pub fn line(&mut self, text: &str) -> io::Result<()> {
        self.take_deferred()?;
        self.close_stream_line()?;
        writeln!(self.stream, "{text}")?;
        self.stream.flush()?;
        writeln!(self.listing, "{text}")?;
        self.listing.flush()
    }

    pub fn write_header(&mut self) -> io::Result<()> {
        let path = self.config.listing_path.clone();
        let location = if path.parent().is_none_or(|p| p.as_os_str().is_empty()) {
            format!("Output listing into file {} within the working directory.", path.display())
        } else {
            format!("Output listing into file {}.", path.display())
        };
        self.line("=== Checking solutions for the queens placing game problem ===")?;
        self.line(&format!("=== qpgame {} ===", env!("CARGO_PKG_VERSION")))?;
        self.line("")?;
        self.line("Hints:")?;
        self.line(&format!("  {location}"))?;
        self.line(&format!(
            "  After each {} moves a + will be emitted.",
            self.config.progress_interval
        ))?;
        self.line("  To cancel the execution press Ctrl-C.")?;
        self.line("")
    }

    pub fn write_case_start(&mut self, n: usize) -> io::Result<()> {
        self.line(&case_start_line(n))
    }

    pub fn write_case_end(&mut self, outcome: Outcome, calls: u64) -> io::Result<()> {
        self.line(&case_end_line(outcome, calls))?;
        self.line("")
    }

    pub fn write_first_move_stat(&mut self, first: Position, winner: Player, calls: u64) -> io::Result<()> {
        self.line(&first_move_stat_line(first, winner, calls))
    }

    pub fn write_stop(&mut self) -> io::Result<()> {
        self.line(STOP_LINE)
    }

    pub fn write_cancelled(&mut self) -> io::Result<()> {
        self.line(CANCEL_LINE)
    }

    pub fn emit_progress(&mut self, _total_calls: u64) -> io::Result<()> {
        if self.config.emit_progress_plus {
            self.stream.write_all(b"+")?;
            self.stream.flush()?;
            self.line_open = true;
        }
        Ok(())
    }

    pub fn write_third_move_enter(&mut self, first: Position, third: Position) -> io::Result<()> {
        if self.config.indicate_third_moves_checking {
            self.close_stream_line()?;
            self.stream.write_all(third_move_enter_marker(first, third).as_bytes())?;
            self.stream.flush()?;
            self.line_open = true;
        }
        Ok(())
    }

    pub fn write_third_move_exit(&mut self, player2_wins: bool) -> io::Result<()> {
        if self.config.indicate_third_moves_checking {
            writeln!(self.stream, "{}", third_move_exit_marker(player2_wins))?;
            self.stream.flush()?;
            self.line_open = false;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.take_deferred()?;
        self.stream.flush()?;
        self.listing.flush()
    }

    fn defer(&mut self, result: io::Result<()>) {
        if let Err(e) = result {
            self.deferred.get_or_insert(e);
        }
    }
}

impl<S: Write, L: Write> ProgressSink for Reporter<S, L> {
    fn on_calls_milestone(&mut self, total_calls: u64) {
        let r = self.emit_progress(total_calls);
        self.defer(r);
    }

    fn on_first_move_result(&mut self, first: Position, winner: Player, calls: u64) {
        if self.config.first_move_checking_statistics {
            let r = self.write_first_move_stat(first, winner, calls);
            self.defer(r);
        }
    }

    fn on_third_move_enter(&mut self, first: Position, third: Position) {
        let r = self.write_third_move_enter(first, third);
        self.defer(r);
    }

    fn on_third_move_exit(&mut self, player2_wins: bool) {
        let r = self.write_third_move_exit(player2_wins);
        self.defer(r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reporter(config: ReportConfig) -> Reporter<Vec<u8>, Vec<u8>> {
        Reporter::new(config, Vec::new(), Vec::new())
    }

    fn text(bytes: Vec<u8>) -> String {
        String::from_utf8(bytes).unwrap()
    }

    #[test]
    fn case_lines() {
        let win = Outcome { winner: Player::One };
        let loss = Outcome { winner: Player::Two };
        assert_eq!(case_start_line(6), "Starting search with n = 6");
        assert_eq!(case_end_line(win, 54), "Search completed. Result of player 1: win. Sum of calls: 54");
        assert_eq!(
            case_end_line(loss, 653007),
            "Search completed. Result of player 1: loss. Sum of calls: 653007"
        );
        assert_eq!(case_end_line(win, 1), "Search completed. Result of player 1: win. Sum of calls: 1");
    }

    #[test]
    fn first_move_lines() {
        let p = Position::new;
        assert_eq!(
            first_move_stat_line(p(0, 0), Player::Two, 4470810024),
            "pl. 1: (0,0) -> pl. 2: win. Sum of calls: 4470810024"
        );
        assert_eq!(
            first_move_stat_line(p(5, 7), Player::Two, 1712035496),
            "pl. 1: (5,7) -> pl. 2: win. Sum of calls: 1712035496"
        );
        assert_eq!(
            first_move_stat_line(p(0, 0), Player::One, 7),
            "pl. 1: (0,0) -> pl. 2: loss. Sum of calls: 7"
        );
    }

    #[test]
    fn progress_stays_out_of_listing() {
        let mut r = reporter(ReportConfig::default());
        r.write_case_start(12).unwrap();
        r.on_calls_milestone(1_000_000);
        r.on_calls_milestone(2_000_000);
        r.write_case_end(Outcome { winner: Player::Two }, 2_500_000).unwrap();
        let (stream, listing) = r.into_parts();
        let stream = text(stream);
        assert_eq!(stream.matches('+').count(), 2);
        assert!(stream.contains("n = 12\n++\nSearch completed."));
        let listing = text(listing);
        assert!(!listing.contains('+'));
        assert_eq!(
            listing,
            "Starting search with n = 12\n\
             Search completed. Result of player 1: loss. Sum of calls: 2500000\n\n"
        );
    }

    #[test]
    fn third_move_markers_on_stream_only() {
        let config = ReportConfig::default().with_size_defaults(16);
        let mut r = reporter(config);
        let p = Position::new;
        r.on_third_move_enter(p(0, 0), p(2, 3));
        for _ in 0..7 {
            r.on_calls_milestone(0);
        }
        r.on_third_move_exit(true);
        r.on_first_move_result(p(0, 0), Player::Two, 4470810024);
        let (stream, listing) = r.into_parts();
        assert_eq!(
            text(stream),
            "[1: (0,0)] 3: (2,3)+++++++ -> 1\npl. 1: (0,0) -> pl. 2: win. Sum of calls: 4470810024\n"
        );
        assert_eq!(text(listing), "pl. 1: (0,0) -> pl. 2: win. Sum of calls: 4470810024\n");
    }

    #[test]
    fn markers_off_by_default_below_sixteen() {
        let mut r = reporter(ReportConfig::default().with_size_defaults(12));
        r.on_third_move_enter(Position::new(0, 0), Position::new(2, 3));
        r.on_third_move_exit(false);
        r.on_first_move_result(Position::new(0, 0), Player::Two, 3);
        let (stream, listing) = r.into_parts();
        assert!(stream.is_empty() && listing.is_empty());
        assert_eq!(third_move_exit_marker(false), " -> 0");
    }

    #[test]
    fn header_and_stop() {
        let mut r = reporter(ReportConfig::default());
        r.write_header().unwrap();
        r.write_stop().unwrap();
        let (_, listing) = r.into_parts();
        let listing = text(listing);
        assert!(listing.contains("  Output listing into file QPGAME.LST within the working directory.\n"));
        assert!(listing.contains("  After each 1000000 moves a + will be emitted.\n"));
        assert!(listing.ends_with("== Regular program stop ==\n"));
    }

    struct Broken;
    impl Write for Broken {
        fn write(&mut self, _: &[u8]) -> io::Result<usize> {
            Err(io::Error::other("disk full"))
        }
        fn flush(&mut self) -> io::Result<()> {
            Ok(())
        }
    }

    #[test]
    fn sink_errors_surface_later() {
        let mut r = Reporter::new(ReportConfig::default(), Broken, Vec::new());
        r.on_calls_milestone(1_000_000);
        assert_eq!(r.flush().unwrap_err().to_string(), "disk full");
    }
}
