use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use quatlink::harness::{run_experiment, run_experiment_with_workers, summarize};
use quatlink_cli::{parse_args, summary_text, write_outputs, RunRequest};

fn run(req: &RunRequest) -> anyhow::Result<()> {
    let result = if req.workers == 0 {
        run_experiment(&req.config)
    } else {
        run_experiment_with_workers(&req.config, req.workers)
    }
    .context("experiment failed")?;
    let summary = summarize(&result.streams)?;
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let paths = write_outputs(&result, &summary, &req.out, timestamp)
        .with_context(|| format!("writing results to {}", req.out.display()))?;

    print!("{}", summary_text(&summary, &req.config));
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let req = match parse_args(std::env::args_os()) {
        Ok(req) => req,
        Err(e) => e.exit(),
    };
    match run(&req) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
