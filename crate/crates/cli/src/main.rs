use std::io::{self, Write};
use std::net::SocketAddr;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::Parser;
use qpgame::args::{Cli, Command, ServeArgs};
use qpgame::check::{self, CheckStatus};
use qpgame::{demo, tables_cmd};
use qpgame_core::reporting::Reporter;
use qpgame_service::GameService;

const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_CANCELLED: u8 = 130;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check(args) => {
            let cancel = Arc::new(AtomicBool::new(false));
            let flag = Arc::clone(&cancel);
            ctrlc::set_handler(move || flag.store(true, Ordering::Relaxed))
                .context("installing the interrupt handler")?;
            let config = check::report_config(&args);
            let mut reporter = Reporter::to_stdout_and_file(config)
                .with_context(|| format!("opening listing {}", args.listing.display()))?;
            let (status, results) = check::run_check(&args, &mut reporter, &cancel)?;
            if let Some(path) = &args.json {
                check::write_json(path, &results)?;
            }
            Ok(match status {
                CheckStatus::Conclusive => ExitCode::SUCCESS,
                CheckStatus::Inconclusive => ExitCode::from(EXIT_INCONCLUSIVE),
                CheckStatus::Cancelled => ExitCode::from(EXIT_CANCELLED),
            })
        }
        Command::TablesGenerate(args) => {
            tables_cmd::generate(&args, &mut io::stdout())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::TablesValidate(args) => {
            let violations = tables_cmd::validate(&args, &mut io::stdout())?;
            Ok(if violations == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Demo(args) => {
            let strategy = match demo::build_strategy(&args) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("usage error: {e:#}");
                    return Ok(ExitCode::from(2));
                }
            };
            let mut opponent = demo::opponent_for(&args);
            let mut out = io::stdout().lock();
            demo::run_demo(&strategy, args.n, opponent.as_mut(), &mut out)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve(args) => {
            serve(args)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn serve(args: ServeArgs) -> Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port))
            .await
            .with_context(|| format!("binding {}:{}", args.host, args.port))?;
        let service = Arc::new(GameService::default());
        qpgame_service::serve(listener, service, args.static_dir, |addr: SocketAddr| {
            println!("Listening on http://{addr}");
        })
        .await
        .context("serving")
    })
}
