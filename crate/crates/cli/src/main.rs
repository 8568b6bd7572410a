use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use wavegap::{run_pipeline, ConfigError, RunConfig, RunOptions, Task};

/// Band gaps of two waveguides coupled through a periodic array of small windows.
#[derive(Parser)]
#[command(name = "wavegap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Crossings, gap forecasts and the decoupled band diagram.
    Analytic(Common),
    /// Finite-element band diagrams at eps = 0 and every configured window.
    Sweep(Common),
    /// Gaps detected in the band diagrams.
    Gaps(Common),
    /// Window-size study of the gap opened at the lowest crossing.
    Study(Common),
    /// Discrete shift bound and the algebraic identity suite.
    Verify(Common),
    /// Markdown summary of the results in the output directory.
    Report(Common),
    /// Every task listed in the configuration, in order.
    Run(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration document.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Lower strip width.
    #[arg(long)]
    d: Option<f64>,
    /// Half period.
    #[arg(long)]
    h: Option<f64>,
    /// Window half-widths, comma separated.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(common: &Common, task: Option<Task>) -> Result<RunConfig, ConfigError> {
    let mut doc: Value = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.clone(), source })?;
            // Schema errors are reported against the document as written.
            RunConfig::from_json(&text)?;
            serde_json::from_str(&text).map_err(|e| ConfigError::Syntax(e.to_string()))?
        }
        None => json!({}),
    };
    let obj = doc.as_object_mut().expect("a config document is an object");
    let geometry = obj.entry("geometry").or_insert_with(|| json!({}));
    if let Some(d) = common.d {
        geometry["d"] = json!(d);
    }
    if let Some(h) = common.h {
        geometry["h"] = json!(h);
    }
    if let Some(eps) = &common.eps {
        obj.insert("epsilons".into(), json!(eps));
    }
    if let Some(out) = &common.out {
        obj.insert("output_dir".into(), json!(out));
    }
    if let Some(task) = task {
        obj.insert("tasks".into(), json!([task]));
    }
    RunConfig::from_json(&doc.to_string())?.validated()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, task) = match &cli.command {
        Command::Analytic(c) => (c, Some(Task::Analytic)),
        Command::Sweep(c) => (c, Some(Task::Sweep)),
        Command::Gaps(c) => (c, Some(Task::Gaps)),
        Command::Study(c) => (c, Some(Task::Study)),
        Command::Verify(c) => (c, Some(Task::Verify)),
        Command::Report(c) => (c, Some(Task::Report)),
        Command::Run(c) => (c, None),
    };
    let cfg = match load(common, task) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run_pipeline(&cfg, &RunOptions::from_env()) {
        Ok(manifest) => {
            for t in &manifest.tasks {
                match &t.error {
                    None => println!("{}: ok ({} files)", t.name, t.outputs.len()),
                    Some(e) => println!("{}: FAILED: {e}", t.name),
                }
            }
            println!(
                "manifest: {}",
                cfg.output_dir.join(wavegap::pipeline::MANIFEST_FILE).display()
            );
            if manifest.succeeded() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
