use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use gsd_bench::{run, Cli, CliError};

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let outcome = run(&cli.command)?;
    let mut text = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    text.push('\n');
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|()| out.flush()).map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })?;
        }
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        pool = pool.num_threads(n.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("gsd-bench: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let code = match pool.install(|| execute(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gsd-bench: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
