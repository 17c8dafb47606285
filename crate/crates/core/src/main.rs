use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hcurl_ife::analysis::hcurl_error;
use hcurl_ife::assembly::BasisKind;
use hcurl_ife::config::RunConfig;
use hcurl_ife::diagnostics::run_diagnostics;
use hcurl_ife::study::{discretize, e0_rates, e1_rates, exact_solution, run_scheme, solve_on, to_csv};
use hcurl_ife::Result;

/// Overrides `output.dir` from the config file.
const OUTPUT_ENV: &str = "HCURL_IFE_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "hcurl-ife", version, about = "Immersed Nedelec solver for H(curl) interface problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once on the finest configured mesh and write the edge DOFs.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Refinement study over all mesh sizes, one CSV per scheme.
    Study {
        #[arg(long)]
        config: PathBuf,
    },
    /// Structural checks of the basis and the schemes.
    Diagnose {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path) -> Result<RunConfig> {
    let mut cfg = RunConfig::from_file(path)?;
    if let Some(dir) = std::env::var_os(OUTPUT_ENV) {
        cfg.output_dir = PathBuf::from(dir);
    }
    std::fs::create_dir_all(&cfg.output_dir)?;
    Ok(cfg)
}

fn solve_cmd(cfg: &RunConfig) -> Result<bool> {
    let n = *cfg.sizes.last().expect("validated non-empty");
    let exact = exact_solution(cfg)?;
    let disc = discretize(cfg, n)?;
    for &scheme in &cfg.schemes {
        let sol = solve_on(&disc, cfg, scheme, &exact)?;
        let rep = hcurl_error(&disc, &sol.solution, BasisKind::Immersed, &exact, cfg.exact_split)?;
        let mut out = String::from("edge,x0,y0,x1,y1,dof\n");
        for (g, v) in sol.solution.iter().enumerate() {
            let (p0, p1) = disc.mesh.edge_points(g);
            out.push_str(&format!("{g},{},{},{},{},{:.15e}\n", p0.x, p0.y, p1.x, p1.y, v));
        }
        let path = cfg.output_dir.join(format!("solution_{}_N{}.csv", scheme.name(), n));
        std::fs::write(&path, out)?;
        println!(
            "{scheme}: N={n} dofs={} e0={:.6e} e1={:.6e} residual={:.2e} -> {}",
            rep.dofs,
            rep.e0,
            rep.e1,
            sol.relative_residual,
            path.display()
        );
    }
    Ok(true)
}

fn study_cmd(cfg: &RunConfig) -> Result<bool> {
    for &scheme in &cfg.schemes {
        let levels = run_scheme(cfg, scheme)?;
        let path = cfg.output_dir.join(format!("errors_{}.csv", scheme.name()));
        std::fs::write(&path, to_csv(&levels))?;
        let last = |r: Vec<f64>| r.last().map_or("-".to_string(), |v| format!("{v:.3}"));
        println!("{scheme}: final e0 rate {}, final e1 rate {} -> {}", last(e0_rates(&levels)), last(e1_rates(&levels)), path.display());
    }
    Ok(true)
}

fn diagnose_cmd(cfg: &RunConfig) -> Result<bool> {
    let report = run_diagnostics(cfg)?;
    let path = cfg.output_dir.join("diagnostics.txt");
    std::fs::write(&path, report.to_string())?;
    print!("{report}");
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (Command::Solve { config } | Command::Study { config } | Command::Diagnose { config }) = &cli.command;
    let run = load(config).and_then(|cfg| match cli.command {
        Command::Solve { .. } => solve_cmd(&cfg),
        Command::Study { .. } => study_cmd(&cfg),
        Command::Diagnose { .. } => diagnose_cmd(&cfg),
    });
    match run {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
