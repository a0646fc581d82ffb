use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use secant_mpm::driver::{prepare_scene, run_scene, RunOverrides};
use secant_mpm::output::diff_runs;
use secant_mpm::scene::Integrator;

#[derive(Parser)]
#[command(
    name = "secant-mpm",
    version,
    about = "2D MLS-MPM with secant macro steps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scene file and write CSV frames plus manifest.json.
    Run {
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// explicit | secant_lumped | secant_full_ls
        #[arg(long)]
        integrator: Option<Integrator>,
        #[arg(long = "macro-dt")]
        macro_dt: Option<f64>,
        /// Fixed substep count per macro step.
        #[arg(long, conflicts_with = "cfl")]
        substeps: Option<usize>,
        /// CFL number for automatic substep counts.
        #[arg(long)]
        cfl: Option<f64>,
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "cg-tol")]
        cg_tol: Option<f64>,
    },
    /// Per-frame RMS and max particle position deviation between two runs.
    Diff { a: PathBuf, b: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scene,
            out,
            integrator,
            macro_dt,
            substeps,
            cfl,
            frames,
            lambda,
            seed,
            cg_tol,
        } => {
            let overrides = RunOverrides {
                integrator,
                macro_dt,
                substeps,
                cfl,
                frames,
                lambda,
                seed,
                cg_tol,
            };
            std::fs::read_to_string(&scene)
                .map_err(|e| format!("{}: {e}", scene.display()))
                .and_then(|text| prepare_scene(&text, &overrides).map_err(|e| e.to_string()))
                .and_then(|(config, state)| {
                    run_scene(&config, state, &out).map_err(|e| e.to_string())
                })
                .map(|manifest| {
                    eprintln!(
                        "wrote {} frames to {}",
                        manifest.frames.len(),
                        out.display()
                    );
                })
        }
        Command::Diff { a, b } => diff_runs(&a, &b).map_err(|e| e.to_string()).map(|frames| {
            println!("frame,rms,max");
            for f in frames {
                println!("{},{:e},{:e}", f.frame, f.rms, f.max);
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
