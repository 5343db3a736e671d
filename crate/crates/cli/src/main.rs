use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::Parser;

use wenxian_cli::args::Cli;
use wenxian_cli::error::EXIT_USAGE;
use wenxian_cli::{jobs, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", CliError::Usage(e.to_string().trim().to_string()).record());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match try_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (record, code) = match e.downcast_ref::<CliError>() {
                Some(c) => {
                    let mut r = c.record();
                    r["error"]["message"] = format!("{e:#}").into();
                    (r, c.exit_code())
                }
                None => (serde_json::json!({ "error": { "kind": "internal", "message": format!("{e:#}"), "exit_code": 1 } }), 1),
            };
            eprintln!("{record}");
            ExitCode::from(code)
        }
    }
}

fn try_main(cli: Cli) -> anyhow::Result<()> {
    let name = format!("{:?}", cli.command).split(['(', ' ', '{']).next().unwrap_or("job").to_lowercase();
    jobs::run(cli).with_context(|| format!("{name} failed"))
}
