//! `polylike`: runs one experiment described by a JSON config and writes
//! `<prefix>.manifest`, `<prefix>.csv` and, for sampling runs, `<prefix>.cloud`.
//!
//! Exit status: 0 on success, 2 when the config or the map is invalid,
//! 3 when the numerics fail.

mod config;
mod experiments;

use clap::Parser;
use config::{parse_config, resolve_map, RunConfig, Workers};
use polylike::measure::write_cloud;
use polylike::Error;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(
    name = "polylike",
    version,
    about = "Experiments on polynomial-like maps"
)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path prefix; overrides the config `out`.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads, or `auto`.
    #[arg(long, value_parser = Workers::parse)]
    workers: Option<Workers>,
}

enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

/// Written files; removed again unless the run completes.
struct Outputs {
    written: Vec<PathBuf>,
    keep: bool,
}

impl Outputs {
    fn write(&mut self, path: PathBuf, bytes: &[u8]) -> Result<(), Failure> {
        self.written.push(path.clone());
        std::fs::write(&path, bytes)
            .map_err(|e| Failure::Numerical(format!("writing {}: {e}", path.display())))
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.keep {
            for p in &self.written {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

fn load(args: &Args) -> Result<(RunConfig, polylike::MapSpec, String), Failure> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    let prefix = cfg.out.clone().ok_or_else(|| {
        Failure::Validation("no output prefix: set `out` in the config or pass --out".into())
    })?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let map = resolve_map(&mut cfg, base)?;
    experiments::check_paths(&cfg)?;
    Ok((cfg, map, prefix))
}

fn with_suffix(prefix: &str, ext: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}.{ext}"))
}

fn execute(args: &Args) -> Result<(), Failure> {
    let started = Instant::now();
    let (cfg, map, prefix) = load(args)?;
    let threads = cfg.workers.resolve();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Numerical(format!("thread pool: {e}")))?;
    let out = pool.install(|| experiments::run(&cfg, &map))?;

    let resolved = serde_json::to_string(&cfg).expect("config serialises");
    let mut csv = format!("# config: {resolved}\n").into_bytes();
    csv.extend_from_slice(&out.csv);

    if let Some(dir) = Path::new(&prefix)
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
    {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Validation(format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut files = Outputs {
        written: Vec::new(),
        keep: false,
    };
    let mut names = vec![with_suffix(&prefix, "csv")];
    files.write(with_suffix(&prefix, "csv"), &csv)?;
    if let Some(cloud) = &out.cloud {
        let mut buf = Vec::new();
        write_cloud(cloud, &mut buf)?;
        files.write(with_suffix(&prefix, "cloud"), &buf)?;
        names.push(with_suffix(&prefix, "cloud"));
    }
    let manifest = json!({
        "tool": "polylike",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": cfg.experiment.kind(),
        "status": "ok",
        "seed": cfg.seed,
        "workers": { "setting": cfg.workers, "resolved": threads },
        "wall_time_seconds": started.elapsed().as_secs_f64(),
        "outputs": names.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "config": cfg,
        "summary": out.summary,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    files.write(
        with_suffix(&prefix, "manifest"),
        format!("{text}\n").as_bytes(),
    )?;
    files.keep = true;
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("polylike: invalid run: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("polylike: numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
