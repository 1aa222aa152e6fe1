use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use tabletop_core::controller::SessionConfig;
use tabletop_service::repl::run_repl;
use tabletop_service::{
    load_scenarios, run_scenarios, serve, GoldenMode, SceneLibrary, SessionStore,
};

#[derive(Parser)]
#[command(
    name = "tabletop",
    version,
    about = "Table-top referring-expression dialogues"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of scene JSON files.
        #[arg(long)]
        scenes: PathBuf,
    },
    /// Run a scenario file and report pass/fail per scenario.
    Run {
        #[arg(long)]
        scenarios: PathBuf,
        /// Compare transcripts with <name>.json files in this directory.
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Scene directory; defaults to scenes/ next to the scenario file.
        #[arg(long)]
        scenes: Option<PathBuf>,
        /// Write the golden transcripts instead of comparing them.
        #[arg(long, requires = "golden")]
        bless: bool,
    },
    /// Talk to the robot in the terminal.
    Repl {
        #[arg(long)]
        scene: String,
        #[arg(long)]
        scenes: PathBuf,
        /// Print the perceived scene after every turn.
        #[arg(long)]
        show_perceived: bool,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Serve { port, scenes } => cmd_serve(port, &scenes),
        Command::Run {
            scenarios,
            golden,
            scenes,
            bless,
        } => cmd_run(&scenarios, golden.as_deref(), scenes, bless),
        Command::Repl {
            scene,
            scenes,
            show_perceived,
        } => cmd_repl(&scene, &scenes, show_perceived),
    }
}

fn load_library(dir: &Path) -> Result<SceneLibrary, ExitCode> {
    SceneLibrary::load_dir(dir).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

fn cmd_serve(port: u16, scenes: &Path) -> ExitCode {
    let library = match load_library(scenes) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
    runtime.block_on(async move {
        let listener = match tokio::net::TcpListener::bind(("0.0.0.0", port)).await {
            Ok(l) => l,
            Err(e) => {
                eprintln!("error: cannot bind port {port}: {e}");
                return ExitCode::from(2);
            }
        };
        eprintln!(
            "serving {} scenes on http://{}",
            library.len(),
            listener
                .local_addr()
                .map(|a| a.to_string())
                .unwrap_or_default()
        );
        let store = Arc::new(SessionStore::new(library, SessionConfig::default()));
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
            eprintln!("shutting down");
        };
        match serve(listener, store, shutdown).await {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        }
    })
}

fn cmd_run(
    scenarios: &Path,
    golden: Option<&Path>,
    scenes: Option<PathBuf>,
    bless: bool,
) -> ExitCode {
    let scenes = scenes.unwrap_or_else(|| {
        scenarios
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join("scenes")
    });
    let entries = match load_scenarios(scenarios) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    // An empty list needs no scenes.
    let library = if entries.is_empty() {
        SceneLibrary::default()
    } else {
        match load_library(&scenes) {
            Ok(l) => l,
            Err(code) => return code,
        }
    };
    let mode = match (golden, bless) {
        (None, _) => GoldenMode::Ignore,
        (Some(_), false) => GoldenMode::Compare,
        (Some(_), true) => GoldenMode::Bless,
    };
    let report = run_scenarios(&entries, &library, golden, mode);
    print!("{report}");
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn cmd_repl(scene_id: &str, scenes: &Path, show_perceived: bool) -> ExitCode {
    let library = match load_library(scenes) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let Some(scene) = library.get(scene_id) else {
        eprintln!(
            "error: unknown scene {scene_id}; available: {}",
            library.ids().join(", ")
        );
        return ExitCode::from(2);
    };
    match run_repl(
        scene,
        io::stdin().lock(),
        io::stdout().lock(),
        show_perceived,
    ) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
