//! Single solves and refinement sweeps against the manufactured solution.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::analysis::{convergence_rates, hcurl_error, interpolation_error, ErrorReport, ManufacturedSolution};
use crate::assembly::{apply_dirichlet, assemble, boundary_values, BasisKind, Discretization, Scheme};
use crate::config::{InterfaceSpec, Resolution, RunConfig};
use crate::error::{Error, Result};
use crate::mesh::build_uniform_triangulation;
use crate::solve::{solve, SolveReport};

#[derive(Clone, Debug)]
pub struct LevelResult {
    pub n: Resolution,
    pub report: ErrorReport,
    pub solve_residual: f64,
    pub iterations: usize,
}

pub fn exact_solution(cfg: &RunConfig) -> Result<ManufacturedSolution> {
    match cfg.interface {
        InterfaceSpec::Circle { center, radius } => Ok(ManufacturedSolution::new(cfg.coeff, radius, cfg.r2, cfg.k2, center)),
        InterfaceSpec::Line { .. } => Err(Error::Config("the manufactured solution needs interface = circle".into())),
    }
}

pub fn discretize(cfg: &RunConfig, n: Resolution) -> Result<Discretization> {
    let mesh = build_uniform_triangulation(n.0, cfg.bounds)?;
    Discretization::new(mesh, cfg.interface.level_set(), cfg.coeff, cfg.snap_tol, cfg.quad)
}

/// Assemble, impose the exact boundary DOFs and solve.
pub fn solve_on(disc: &Discretization, cfg: &RunConfig, scheme: Scheme, exact: &ManufacturedSolution) -> Result<SolveReport> {
    let system = assemble(disc, scheme, &cfg.penalty, &|x, side| exact.source(x, side))?;
    let system = apply_dirichlet(&system, &disc.dofmap, &boundary_values(disc, exact));
    solve(&system, &cfg.solver)
}

pub fn run_level(cfg: &RunConfig, n: Resolution, scheme: Scheme) -> Result<LevelResult> {
    let exact = exact_solution(cfg)?;
    let disc = discretize(cfg, n)?;
    let sol = solve_on(&disc, cfg, scheme, &exact)?;
    let report = hcurl_error(&disc, &sol.solution, BasisKind::Immersed, &exact, cfg.exact_split)?;
    Ok(LevelResult { n, report, solve_residual: sol.relative_residual, iterations: sol.iterations })
}

pub fn run_scheme(cfg: &RunConfig, scheme: Scheme) -> Result<Vec<LevelResult>> {
    cfg.sizes.iter().map(|&n| run_level(cfg, n, scheme)).collect()
}

/// IFE interpolation error on every mesh size.
pub fn run_interpolation(cfg: &RunConfig) -> Result<Vec<LevelResult>> {
    let exact = exact_solution(cfg)?;
    cfg.sizes
        .iter()
        .map(|&n| {
            let disc = discretize(cfg, n)?;
            Ok(LevelResult { n, report: interpolation_error(&disc, &exact, cfg.exact_split)?, solve_residual: 0.0, iterations: 0 })
        })
        .collect()
}

pub fn e0_rates(levels: &[LevelResult]) -> Vec<f64> {
    convergence_rates(&levels.iter().map(|l| (l.report.h, l.report.e0)).collect::<Vec<_>>())
}

pub fn e1_rates(levels: &[LevelResult]) -> Vec<f64> {
    convergence_rates(&levels.iter().map(|l| (l.report.h, l.report.e1)).collect::<Vec<_>>())
}

pub const CSV_HEADER: &str = "N,h,dofs,e0,e0_rate,e1,e1_rate,l2_part,curl_part,solve_residual";

pub fn to_csv(levels: &[LevelResult]) -> String {
    let (r0, r1) = (e0_rates(levels), e1_rates(levels));
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (k, l) in levels.iter().enumerate() {
        let rate = |r: &[f64]| if k == 0 { String::new() } else { format!("{:.6}", r[k - 1]) };
        let e = &l.report;
        writeln!(
            out,
            "{},{:.10e},{},{:.10e},{},{:.10e},{},{:.10e},{:.10e},{:.3e}",
            l.n, e.h, e.dofs, e.e0, rate(&r0), e.e1, rate(&r1), e.l2, e.curl, l.solve_residual
        )
        .expect("writing to a String");
    }
    out
}

/// Run every configured scheme and write `errors_<scheme>.csv`.
pub fn run_study(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    let mut written = Vec::new();
    for &scheme in &cfg.schemes {
        let levels = run_scheme(cfg, scheme)?;
        let path = cfg.output_dir.join(format!("errors_{}.csv", scheme.name()));
        std::fs::write(&path, to_csv(&levels))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ife::CoefficientPair;

    fn small(sizes: &[usize]) -> RunConfig {
        RunConfig { sizes: sizes.iter().copied().map(Resolution).collect(), ..RunConfig::default() }
    }

    #[test]
    fn csv_layout_and_rates() {
        let levels = run_scheme(&small(&[4, 8]), Scheme::Pg).unwrap();
        let csv = to_csv(&levels);
        let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
        assert_eq!(rows[0].join(","), CSV_HEADER);
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.len() == 10));
        assert_eq!((rows[1][4], rows[1][6]), ("", ""));
        let rate = |col: usize| {
            let f = |r: usize, c: usize| rows[r][c].parse::<f64>().unwrap();
            (f(1, col) / f(2, col)).ln() / (f(1, 1) / f(2, 1)).ln()
        };
        assert!((rate(3) - rows[2][4].parse::<f64>().unwrap()).abs() < 1e-5);
        assert!((rate(5) - rows[2][6].parse::<f64>().unwrap()).abs() < 1e-5);
    }

    #[test]
    fn matched_coefficients_converge_at_first_order() {
        let cfg = RunConfig { coeff: CoefficientPair::matched(1.0, 1.0), ..small(&[8, 16, 32]) };
        for scheme in Scheme::ALL {
            let r = e0_rates(&run_scheme(&cfg, scheme).unwrap());
            assert!(r.iter().all(|v| (v - 1.0).abs() < 0.15), "{scheme}: {r:?}");
        }
    }

    #[test]
    fn line_interface_has_no_manufactured_solution() {
        let cfg = RunConfig { interface: InterfaceSpec::Line { normal: crate::mesh::Point::new(1.0, 0.0), offset: 0.0 }, ..small(&[4]) };
        assert!(matches!(run_level(&cfg, Resolution(4), Scheme::Pg), Err(Error::Config(_))));
    }
}
