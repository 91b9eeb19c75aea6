use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use stable_rd_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    let env_dir = std::env::var_os("STABLE_RD_OUT_DIR").map(PathBuf::from);
    match stable_rd_cli::run(&cli, env_dir) {
        Ok(written) => {
            for path in written {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
