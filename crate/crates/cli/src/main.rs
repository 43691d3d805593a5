use std::process::ExitCode;

use clap::Parser;
use cylscat_cli::{emit_plots, run_sweep, Args, CliError, Summary, SweepConfig};

fn run(args: &Args) -> Result<bool, CliError> {
    let cfg = SweepConfig::resolve(args)?;
    let rows = run_sweep(&cfg)?;
    cylscat_cli::sweep::write_csv_file(&rows, &cfg.out)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    println!("wrote {} rows to {}{}", rows.len(), cfg.out.display(), if failed > 0 { format!(" ({failed} with errors)") } else { String::new() });
    if let Some(dir) = &cfg.plots {
        for p in emit_plots(&rows, &cfg.out, dir)? {
            println!("wrote {}", p.display());
        }
    }
    let summary = Summary::from_rows(&rows);
    println!("{summary}");
    Ok(summary.failures() == 0)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) if args.check => ExitCode::from(3),
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
