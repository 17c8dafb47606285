//! Structural checks of the immersed basis, the discrete schemes and the
//! manufactured solution, each reported as a worst residual against a tolerance.

use std::fmt;

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::ManufacturedSolution;
use crate::assembly::{apply_dirichlet, assemble, assemble_bilinear, assemble_standard, boundary_values, BasisKind, Discretization, Scheme};
use crate::config::{Resolution, RunConfig};
use crate::error::Result;
use crate::ife::{
    build_local_basis, case1_eigenvalues, closed_form_curl, ct_apply, ct_inverse, exact_sequence_residual, far_dof_matrix,
    geometric_quantities, h1_local_basis, local_infsup_eigs, unisolvence_margin, CoefficientPair,
};
use crate::interface::{CutConfiguration, Side};
use crate::mesh::Point;
use crate::nedelec::{perp, NdPoly, PiecewiseField};
use crate::solve::solve;
use crate::study::{discretize, exact_solution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagnoseSettings {
    pub n: Resolution,
    pub random_elements: usize,
    pub seed: u64,
}

impl Default for DiagnoseSettings {
    fn default() -> Self {
        Self { n: Resolution(16), random_elements: 10_000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub worst: f64,
    pub tol: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `worst <= tol` (NaN fails).
    pub fn bounded(name: impl Into<String>, worst: f64, tol: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), worst, tol, passed: worst <= tol, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticsReport {
    pub checks: Vec<Check>,
}

impl DiagnosticsReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for DiagnosticsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:>11} {:>9}  {:<6} detail", "check", "worst", "tol", "status")?;
        for c in &self.checks {
            writeln!(f, "{:<28} {:>11.3e} {:>9.1e}  {:<6} {}", c.name, c.worst, c.tol, if c.passed { "PASS" } else { "FAIL" }, c.detail)?;
        }
        writeln!(f, "overall: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Right isosceles element in one of the structured-mesh orientations, random size,
/// position, apex, cut ratios and coefficients (each within a factor 10 of 1).
pub fn synthetic_cut(rng: &mut ChaCha8Rng) -> (CutConfiguration, CoefficientPair) {
    let h = 10f64.powf(rng.gen_range(-3.0..0.0));
    let base = [Point::new(0.0, 0.0), Point::new(h, 0.0), Point::new(h, h)];
    let (s, c) = (rng.gen_range(0..4) as f64 * std::f64::consts::FRAC_PI_2).sin_cos();
    let shift = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let verts = base.map(|q| shift + Point::new(c * q.x - s * q.y, s * q.x + c * q.y));
    let apex = rng.gen_range(0..3);
    let side = if rng.gen_bool(0.5) { Side::Minus } else { Side::Plus };
    let cut = CutConfiguration::new(0, verts, apex, rng.gen_range(1e-3..=1.0), rng.gen_range(1e-3..=1.0), side);
    let mut r = || 10f64.powf(rng.gen_range(-1.0..1.0));
    let coeff = CoefficientPair { mu_minus: r(), mu_plus: r(), beta_minus: r(), beta_plus: r() };
    (cut, coeff)
}

pub fn synthetic_cuts(count: usize, seed: u64) -> Vec<(CutConfiguration, CoefficientPair)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| synthetic_cut(&mut rng)).collect()
}

/// Largest relative deviation of `ct_inverse(ct_apply(v))` from `v` at the vertices.
fn round_trip_error(cut: &CutConfiguration, v: &NdPoly, coeff: &CoefficientPair) -> f64 {
    let w = ct_apply(cut, v, coeff);
    let back = ct_inverse(cut, &w, coeff);
    let mut scale: f64 = 0.0;
    let mut diff: f64 = 0.0;
    for &x in &cut.vertices {
        scale = scale.max(v.eval(x).norm()).max(w.eval(x).norm());
        diff = diff.max((back.eval(x) - v.eval(x)).norm());
    }
    diff / scale.max(f64::MIN_POSITIVE)
}

#[derive(Default)]
struct BasisWorst {
    count: usize,
    kronecker: f64,
    tangential: f64,
    normal: f64,
    curl: f64,
    round_trip: f64,
    exact_sequence: f64,
    margin_min: f64,
    margin_det: f64,
    sup_ratio: f64,
    a3_closed_form: f64,
}

impl BasisWorst {
    fn add(&mut self, cut: &CutConfiguration, coeff: &CoefficientPair) -> Result<()> {
        let basis = build_local_basis(cut, coeff)?;
        let sup = basis.scaled_sup_norm() / cut.diameter();
        let c0 = closed_form_curl(cut, coeff);
        for i in 0..3 {
            for j in 0..3 {
                self.kronecker = self.kronecker.max((basis.edge_dof(i, j) - if i == j { 1.0 } else { 0.0 }).abs());
            }
            let (m, p) = (basis.piece(i, Side::Minus), basis.piece(i, Side::Plus));
            for k in 0..10 {
                let x = cut.d_point + (k as f64 / 9.0) * (cut.e_point - cut.d_point);
                self.tangential = self.tangential.max((m.eval(x) - p.eval(x)).dot(&cut.tangent).abs() / sup);
            }
            let xm = cut.midpoint;
            let nj = coeff.beta_plus * p.eval(xm).dot(&cut.normal) - coeff.beta_minus * m.eval(xm).dot(&cut.normal);
            self.normal = self.normal.max(nj.abs() / (coeff.max_beta() * sup));
            self.curl = self.curl.max((basis.mu_inv_curl(i) - c0).abs() / c0.abs());
            self.round_trip = self.round_trip.max(round_trip_error(cut, m, coeff));
        }
        self.exact_sequence = self.exact_sequence.max(exact_sequence_residual(&basis, &h1_local_basis(cut, coeff)?));
        let (la, lb) = unisolvence_margin(cut, coeff);
        self.margin_min = if self.count == 0 { la.min(lb) } else { self.margin_min.min(la).min(lb) };
        let det = far_dof_matrix(cut, coeff)?.determinant();
        self.margin_det = self.margin_det.max((det - la * lb).abs() / (la * lb).abs().max(1.0));
        let matched = build_local_basis(cut, &CoefficientPair::matched(1.0, 1.0))?.scaled_sup_norm();
        self.sup_ratio = self.sup_ratio.max(basis.scaled_sup_norm() / matched);
        if let Some(d) = local_infsup_eigs(cut, coeff) {
            self.a3_closed_form = self.a3_closed_form.max(d.closed_form_residual / (1.0 + (d.rho - 1.0).abs()));
        }
        self.count += 1;
        Ok(())
    }

    fn checks(&self, tag: &str) -> Vec<Check> {
        let n = format!("{} elements", self.count);
        vec![
            Check::bounded(format!("kronecker[{tag}]"), self.kronecker, 1e-11, &n),
            Check::bounded(format!("tangential[{tag}]"), self.tangential, 1e-12, "relative to max |psi|"),
            Check::bounded(format!("beta_normal[{tag}]"), self.normal, 1e-12, "relative to max beta * max |psi|"),
            Check::bounded(format!("curl_closed_form[{tag}]"), self.curl, 1e-12, "relative"),
            Check::bounded(format!("ct_round_trip[{tag}]"), self.round_trip, 1e-13, "relative"),
            Check::bounded(format!("exact_sequence[{tag}]"), self.exact_sequence, 1e-10, "least-squares residual"),
            Check::bounded(format!("unisolvence_det[{tag}]"), self.margin_det, 1e-9, format!("min margin {:.3e}", self.margin_min)),
            Check { passed: self.margin_min > 0.0, ..Check::bounded(format!("unisolvence_margin[{tag}]"), -self.margin_min, 0.0, "negated min margin") },
            Check::bounded(format!("shape_bound[{tag}]"), self.sup_ratio, 100.0, "max |psi| h relative to matched"),
            Check::bounded(format!("a3_closed_form[{tag}]"), self.a3_closed_form, 1e-10, "scaled by 1 + |rho - 1|"),
        ]
    }
}

/// Basis-level checks over a set of cut elements.
pub fn basis_checks<'a>(tag: &str, cuts: impl IntoIterator<Item = (&'a CutConfiguration, &'a CoefficientPair)>) -> Result<Vec<Check>> {
    let mut w = BasisWorst::default();
    for (cut, coeff) in cuts {
        w.add(cut, coeff)?;
    }
    Ok(w.checks(tag))
}

/// Curl-curl blocks of the Petrov-Galerkin and IFE Galerkin matrices agree.
pub fn stiffness_identity_check(disc: &Discretization) -> Result<Check> {
    let pg = assemble_bilinear(disc, BasisKind::Immersed, BasisKind::Standard, true, false)?;
    let c = assemble_bilinear(disc, BasisKind::Immersed, BasisKind::Immersed, true, false)?;
    let worst = pg.max_abs_diff(&c) / c.max_abs().max(f64::MIN_POSITIVE);
    Ok(Check::bounded("pg_galerkin_curl_stiffness", worst, 1e-12, "entrywise, relative to max entry"))
}

/// Case-1 eigenvalues on a `steps x steps` grid of `(d, e)` in `(0, 1]`.
pub fn case1_range_check(steps: usize) -> Check {
    let lo = (5.0 - 3.0 * 3f64.sqrt()) / 8.0;
    let mut worst: f64 = 0.0;
    for i in 1..=steps {
        for j in 1..=steps {
            let (l1, l2) = case1_eigenvalues(i as f64 / steps as f64, j as f64 / steps as f64);
            worst = worst.max(lo - l1).max(l1).max(-l2).max(l2 - 1.0);
        }
    }
    Check::bounded("a3_case1_ranges", worst, 1e-12, format!("{steps}x{steps} grid, lambda1 in [{lo:.6}, 0], lambda2 in [0, 1]"))
}

/// Contrast above which the case-1 quadratic form can lose positivity.
pub fn case1_threshold() -> f64 {
    8.0 / (3.0 * 3f64.sqrt() - 5.0) + 1.0
}

/// Sign of `min 1 + (c - 1) lambda1` over the grid against the closed-form threshold.
pub fn case1_positivity_check(coeff: &CoefficientPair, steps: usize) -> Check {
    let c = (coeff.beta_plus / coeff.beta_minus).max(coeff.beta_minus / coeff.beta_plus);
    let mut min = f64::INFINITY;
    for i in 1..=steps {
        for j in 1..=steps {
            let (l1, _) = case1_eigenvalues(i as f64 / steps as f64, j as f64 / steps as f64);
            min = min.min(1.0 + (c - 1.0) * l1);
        }
    }
    let t = case1_threshold();
    let expected = c < t;
    let agrees = (min > 0.0) == expected || (c - t).abs() < 1e-3 * t;
    Check {
        name: "a3_case1_positivity".into(),
        worst: -min,
        tol: 0.0,
        passed: agrees,
        detail: format!("beta contrast {c:.4}, min form {min:.4e}, positive={}, expected {} (threshold {t:.3})", min > 0.0, expected),
    }
}

/// `n' . n_hat > 0` and the unisolvence ratio in `[0, 1]` on every cut element.
pub fn geometric_inequality_check(disc: &Discretization) -> Check {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for cut in disc.classification.cuts.iter().flatten() {
        let (dot, ratio) = geometric_quantities(cut);
        let v = if dot > 0.0 { (-ratio).max(ratio - 1.0).max(0.0) } else { f64::INFINITY };
        worst = worst.max(v);
        count += 1;
    }
    Check::bounded("a1_inequalities", worst, 1e-12, format!("{count} cut elements"))
}

/// With matched coefficients the PG matrix is the standard Nedelec matrix.
pub fn matched_reduction_check(cfg: &RunConfig, n: Resolution) -> Result<Check> {
    let matched = RunConfig { coeff: CoefficientPair::matched(cfg.coeff.mu_minus, cfg.coeff.beta_minus), ..cfg.clone() };
    let disc = discretize(&matched, n)?;
    let zero = |_: Point, _: Side| Vector2::zeros();
    let pg = assemble(&disc, Scheme::Pg, &cfg.penalty, &zero)?;
    let fe = assemble_standard(&disc, &zero)?;
    Ok(Check::bounded("matched_ife_equals_fe", pg.matrix.max_abs_diff(&fe.matrix), 1e-12, "entrywise"))
}

struct NdField(NdPoly);

impl PiecewiseField for NdField {
    fn value(&self, x: Point, _: Side) -> Vector2<f64> {
        self.0.eval(x)
    }

    fn curl(&self, _: Point, _: Side) -> f64 {
        self.0.curl()
    }
}

/// A global Nedelec field solves the matched problem with `f = beta u` exactly.
pub fn patch_test_check(cfg: &RunConfig, n: Resolution) -> Result<Check> {
    let coeff = CoefficientPair::matched(cfg.coeff.mu_minus, cfg.coeff.beta_minus);
    let matched = RunConfig { coeff, ..cfg.clone() };
    let disc = discretize(&matched, n)?;
    let field = NdField(NdPoly::new(Vector2::new(0.7, -1.3), 0.4, Point::new(0.1, -0.2)));
    let beta = coeff.beta_minus;
    let system = assemble(&disc, Scheme::Pg, &cfg.penalty, &|x, _| beta * field.0.eval(x))?;
    let system = apply_dirichlet(&system, &disc.dofmap, &boundary_values(&disc, &field));
    let sol = solve(&system, &cfg.solver)?;
    let exact = disc.interpolate(&field);
    let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let worst = sol.solution.iter().zip(&exact).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale;
    Ok(Check::bounded("patch_test", worst, cfg.solver.tol, format!("relative max DOF error, solver residual {:.1e}", sol.relative_residual)))
}

/// Jump conditions on 64 interface points and the source against finite differences.
pub fn manufactured_checks(sol: &ManufacturedSolution, seed: u64) -> Vec<Check> {
    let mut jump: f64 = 0.0;
    for k in 0..64 {
        let th = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
        let dir = Point::new(th.cos(), th.sin());
        let x = sol.center + sol.r1 * dir;
        let (um, up) = (sol.u(x, Side::Minus), sol.u(x, Side::Plus));
        let c = sol.coeff;
        jump = jump
            .max((um - up).dot(&perp(dir)).abs())
            .max((c.beta_minus * um - c.beta_plus * up).dot(&dir).abs())
            .max((sol.mu_inv_curl(x, Side::Minus) - sol.mu_inv_curl(x, Side::Plus)).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = 1e-5;
    let (dx, dy) = (Point::new(step, 0.0), Point::new(0.0, step));
    let mut fd: f64 = 0.0;
    for _ in 0..200 {
        let x = sol.center + Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let side = sol.side_of(x);
        let u = |q: Point| sol.u(q, side);
        let curl = (u(x + dx).y - u(x - dx).y - u(x + dy).x + u(x - dy).x) / (2.0 * step);
        let exact_curl = sol.curl(x, side);
        fd = fd.max((curl - exact_curl).abs() / exact_curl.abs().max(1.0));
        let w = |q: Point| sol.mu_inv_curl(q, side);
        let f = Vector2::new(w(x + dy) - w(x - dy), w(x - dx) - w(x + dx)) / (2.0 * step) + sol.coeff.beta(side) * u(x);
        let exact_f = sol.source(x, side);
        fd = fd.max((f - exact_f).norm() / exact_f.norm().max(1.0));
    }
    vec![
        Check::bounded("solution_jumps", jump, 1e-12, "tangential, beta-normal and mu^-1 curl at 64 points"),
        Check::bounded("solution_source_fd", fd, 1e-6, "200 points, step 1e-5, relative"),
    ]
}

pub fn run_diagnostics(cfg: &RunConfig) -> Result<DiagnosticsReport> {
    let settings = cfg.diagnose;
    let disc = discretize(cfg, settings.n)?;
    let mesh_cuts: Vec<_> = disc.classification.cuts.iter().flatten().map(|c| (c, &cfg.coeff)).collect();
    let mut checks = basis_checks("mesh", mesh_cuts)?;
    let synthetic = synthetic_cuts(settings.random_elements, settings.seed);
    if !synthetic.is_empty() {
        checks.extend(basis_checks("synthetic", synthetic.iter().map(|(c, k)| (c, k)))?);
    }
    checks.push(stiffness_identity_check(&disc)?);
    checks.push(case1_range_check(100));
    checks.push(case1_positivity_check(&cfg.coeff, 100));
    checks.push(geometric_inequality_check(&disc));
    checks.push(matched_reduction_check(cfg, settings.n)?);
    checks.push(patch_test_check(cfg, settings.n)?);
    if let Ok(sol) = exact_solution(cfg) {
        checks.extend(manufactured_checks(&sol, settings.seed));
    }
    Ok(DiagnosticsReport { checks })
}
