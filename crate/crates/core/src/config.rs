//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma separated.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::analysis::ExactSplit;
use crate::assembly::{PenaltyParams, Scheme};
use crate::diagnostics::DiagnoseSettings;
use crate::error::{Error, Result};
use crate::ife::CoefficientPair;
use crate::interface::{Circle, HalfPlane, LevelSet, DEFAULT_SNAP_TOL};
use crate::mesh::{Point, Rect};
use crate::quadrature::QuadratureSettings;
use crate::solve::SolverOptions;

/// Number of cells per side of the structured mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Resolution(pub usize);

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InterfaceSpec {
    Circle { center: Point, radius: f64 },
    /// `normal . x = offset`, plus side where `normal . x > offset`.
    Line { normal: Point, offset: f64 },
}

impl InterfaceSpec {
    pub fn level_set(&self) -> Arc<dyn LevelSet> {
        match *self {
            InterfaceSpec::Circle { center, radius } => Arc::new(Circle::new(center, radius)),
            InterfaceSpec::Line { normal, offset } => Arc::new(HalfPlane { normal, offset }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub sizes: Vec<Resolution>,
    pub bounds: Rect,
    pub interface: InterfaceSpec,
    pub coeff: CoefficientPair,
    pub schemes: Vec<Scheme>,
    pub penalty: PenaltyParams,
    pub quad: QuadratureSettings,
    pub solver: SolverOptions,
    pub snap_tol: f64,
    pub exact_split: ExactSplit,
    pub diagnose: DiagnoseSettings,
    /// Outer radius and amplitude of the manufactured solution.
    pub r2: f64,
    pub k2: f64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sizes: [8, 16, 32, 64, 128].map(Resolution).to_vec(),
            bounds: Rect::symmetric_unit(),
            interface: InterfaceSpec::Circle { center: Point::zeros(), radius: std::f64::consts::PI / 5.0 },
            coeff: CoefficientPair { mu_minus: 1.0, mu_plus: 0.1, beta_minus: 1.0, beta_plus: 10.0 },
            schemes: vec![Scheme::Pg],
            penalty: PenaltyParams::default(),
            quad: QuadratureSettings::default(),
            solver: SolverOptions::default(),
            snap_tol: DEFAULT_SNAP_TOL,
            exact_split: ExactSplit::Interface,
            diagnose: DiagnoseSettings::default(),
            r2: 1.0,
            k2: 20.0,
            output_dir: PathBuf::from("output"),
        }
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').map(|s| num(key, s)).collect()
}

fn pair(key: &str, v: &str) -> Result<Point> {
    match list::<f64>(key, v)?.as_slice() {
        &[x, y] => Ok(Point::new(x, y)),
        _ => Err(Error::Config(format!("{key}: expected two numbers, got '{v}'"))),
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    fn set(&mut self, key: &str, v: &str, circle: &mut (Point, f64), line: &mut (Point, f64), kind: &mut String) -> Result<()> {
        let c = &mut self.coeff;
        match key {
            "mesh.sizes" => self.sizes = list(key, v)?.into_iter().map(Resolution).collect(),
            "domain.bounds" => match list::<f64>(key, v)?.as_slice() {
                &[x0, x1, y0, y1] => self.bounds = Rect::new(x0, x1, y0, y1),
                _ => return Err(Error::Config(format!("{key}: expected x_min,x_max,y_min,y_max"))),
            },
            "interface" => *kind = v.to_string(),
            "circle.radius" => circle.1 = num(key, v)?,
            "circle.center" => circle.0 = pair(key, v)?,
            "line.normal" => line.0 = pair(key, v)?,
            "line.offset" => line.1 = num(key, v)?,
            "coeff.mu_minus" => c.mu_minus = num(key, v)?,
            "coeff.mu_plus" => c.mu_plus = num(key, v)?,
            "coeff.beta_minus" => c.beta_minus = num(key, v)?,
            "coeff.beta_plus" => c.beta_plus = num(key, v)?,
            "scheme" => self.schemes = list(key, v)?,
            "penalty.c0" => self.penalty.c0 = num(key, v)?,
            "penalty.r" => self.penalty.r = num(key, v)?,
            "penalty.edges" => self.penalty.edges = v.parse()?,
            "quad.assembly_degree" => self.quad.assembly_degree = num(key, v)?,
            "quad.error_degree" => self.quad.error_degree = num(key, v)?,
            "quad.n_sub" => self.quad.n_sub = num(key, v)?,
            "solver.method" => self.solver.method = v.parse()?,
            "solver.tol" => self.solver.tol = num(key, v)?,
            "solver.max_iter" => self.solver.max_iter = num(key, v)?,
            "solver.restart" => self.solver.restart = num(key, v)?,
            "geometry.snap_tol" => self.snap_tol = num(key, v)?,
            "error.exact_split" => self.exact_split = v.parse()?,
            "diagnose.n" => self.diagnose.n = Resolution(num(key, v)?),
            "diagnose.random_elements" => self.diagnose.random_elements = num(key, v)?,
            "diagnose.seed" => self.diagnose.seed = num(key, v)?,
            "solution.r2" => self.r2 = num(key, v)?,
            "solution.k2" => self.k2 = num(key, v)?,
            "output.dir" => self.output_dir = PathBuf::from(v),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let c = self.coeff;
        CoefficientPair::new(c.mu_minus, c.mu_plus, c.beta_minus, c.beta_plus)?;
        if self.sizes.is_empty() || self.sizes[0].0 == 0 {
            return bad("mesh.sizes must be a non-empty list of positive integers".into());
        }
        if self.diagnose.n.0 == 0 {
            return bad("diagnose.n must be positive".into());
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad("mesh.sizes must be strictly increasing".into());
        }
        if self.bounds.is_degenerate() {
            return bad("domain.bounds is degenerate".into());
        }
        if self.schemes.is_empty() {
            return bad("scheme list is empty".into());
        }
        match self.interface {
            InterfaceSpec::Circle { radius, .. } if !(radius > 0.0) => return bad("circle.radius must be positive".into()),
            InterfaceSpec::Line { normal, .. } if !(normal.norm() > 0.0) => return bad("line.normal must be nonzero".into()),
            _ => {}
        }
        if !(1..=10).contains(&self.quad.assembly_degree) || !(1..=10).contains(&self.quad.error_degree) || self.quad.n_sub == 0 {
            return bad("quadrature degrees must lie in 1..=10 and quad.n_sub must be positive".into());
        }
        if !(self.solver.tol > 0.0) || self.solver.max_iter == 0 || self.solver.restart == 0 {
            return bad("solver.tol, solver.max_iter and solver.restart must be positive".into());
        }
        if !(self.snap_tol >= 0.0) || !(self.penalty.c0 >= 0.0) {
            return bad("geometry.snap_tol and penalty.c0 must be non-negative".into());
        }
        Ok(())
    }
}

impl FromStr for RunConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut circle = match cfg.interface {
            InterfaceSpec::Circle { center, radius } => (center, radius),
            InterfaceSpec::Line { .. } => unreachable!(),
        };
        let mut line = (Point::new(0.0, 1.0), 0.0);
        let mut kind = "circle".to_string();
        for (lineno, raw) in text.lines().enumerate() {
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let (k, v) = l.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(k.trim(), v.trim(), &mut circle, &mut line, &mut kind)
                .map_err(|e| match e {
                    Error::Config(m) => Error::Config(format!("line {}: {m}", lineno + 1)),
                    e => e,
                })?;
        }
        cfg.interface = match kind.as_str() {
            "circle" => InterfaceSpec::Circle { center: circle.0, radius: circle.1 },
            "line" => InterfaceSpec::Line { normal: line.0, offset: line.1 },
            other => return Err(Error::Config(format!("unknown interface '{other}'"))),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::SolverMethod;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg: RunConfig = "".parse().unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn all_keys_parse() {
        let text = "
# comment
mesh.sizes = 4, 8
domain.bounds = 0, 2, -1, 1
interface = circle
circle.radius = 0.5
circle.center = 1.0, 0.0
coeff.mu_minus = 2
coeff.mu_plus = 0.01
coeff.beta_minus = 3
coeff.beta_plus = 100
scheme = pg, pp, c
penalty.c0 = 5
penalty.r = 1
penalty.edges = cut_only
quad.assembly_degree = 3
quad.error_degree = 7
quad.n_sub = 2
solver.method = gmres
solver.tol = 1e-9
solver.max_iter = 500
geometry.snap_tol = 1e-9
error.exact_split = chord
output.dir = /tmp/out
";
        let cfg: RunConfig = text.parse().unwrap();
        assert_eq!(cfg.sizes, vec![Resolution(4), Resolution(8)]);
        assert_eq!(cfg.bounds, Rect::new(0.0, 2.0, -1.0, 1.0));
        assert_eq!(cfg.interface, InterfaceSpec::Circle { center: Point::new(1.0, 0.0), radius: 0.5 });
        assert_eq!(cfg.coeff.beta_plus, 100.0);
        assert_eq!(cfg.schemes, Scheme::ALL.to_vec());
        assert_eq!(cfg.quad.n_sub, 2);
        assert_eq!(cfg.solver.method, SolverMethod::Iterative);
        assert_eq!(cfg.exact_split, ExactSplit::Chord);
        assert_eq!(cfg.output_dir, PathBuf::from("/tmp/out"));
    }

    #[test]
    fn line_interface() {
        let cfg: RunConfig = "interface = line\nline.normal = 1, 0\nline.offset = 0.1".parse().unwrap();
        assert_eq!(cfg.interface, InterfaceSpec::Line { normal: Point::new(1.0, 0.0), offset: 0.1 });
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "mesh.sizes = 8, 4",
            "mesh.sizes = 0",
            "coeff.mu_plus = -1",
            "scheme = xyz",
            "interface = ellipse",
            "no_equals_sign",
            "unknown.key = 1",
            "solver.tol = abc",
            "circle.center = 1",
            "quad.error_degree = 11",
        ] {
            assert!(matches!(text.parse::<RunConfig>(), Err(Error::Config(_))), "{text}");
        }
    }
}
