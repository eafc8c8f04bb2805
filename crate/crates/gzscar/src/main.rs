use clap::Parser;
use std::process::ExitCode;

use gzscar::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command, &cli.out) {
        Ok(o) => {
            for line in &o.report {
                println!("{line}");
            }
            for f in &o.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::from(if o.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
