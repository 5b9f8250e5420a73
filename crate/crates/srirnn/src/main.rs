use clap::Parser;

use srirnn::cli::{error_json, run, Cli};

fn main() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.kind().as_str().map(str::to_string).unwrap_or_else(|| e.to_string());
            eprintln!("{}", serde_json::json!({"error": "usage", "message": msg, "detail": e.to_string()}));
            return std::process::ExitCode::from(2);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            std::process::ExitCode::FAILURE
        }
    }
}
