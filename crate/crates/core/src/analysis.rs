//! Manufactured solution, H(curl) error norms and convergence rates.

use nalgebra::Vector2;

use crate::assembly::{BasisKind, Discretization};
use crate::error::Result;
use crate::ife::CoefficientPair;
use crate::interface::Side;
use crate::mesh::Point;
use crate::nedelec::PiecewiseField;

/// Radially symmetric solution around a circular interface of radius `r1`:
/// `u- = mu- k1 q1 (-y, -x)`, `u+ = mu+ k2 q2 q1 (-y, -x)` with `qi = ri^2 - |x - c|^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManufacturedSolution {
    pub k1: f64,
    pub k2: f64,
    pub r1: f64,
    pub r2: f64,
    pub center: Point,
    pub coeff: CoefficientPair,
}

impl ManufacturedSolution {
    pub fn new(coeff: CoefficientPair, r1: f64, r2: f64, k2: f64, center: Point) -> Self {
        Self { k1: k2 * (r2 * r2 - r1 * r1), k2, r1, r2, center, coeff }
    }

    /// `k2 = 20`, `r1 = pi/5`, `r2 = 1`, centred at the origin.
    pub fn standard(coeff: CoefficientPair) -> Self {
        Self::new(coeff, std::f64::consts::PI / 5.0, 1.0, 20.0, Point::zeros())
    }

    pub fn side_of(&self, x: Point) -> Side {
        Side::of((x - self.center).norm_squared() - self.r1 * self.r1)
    }

    pub fn u(&self, x: Point, side: Side) -> Vector2<f64> {
        let p = x - self.center;
        let r2 = p.norm_squared();
        let q1 = self.r1 * self.r1 - r2;
        let s = match side {
            Side::Minus => self.coeff.mu_minus * self.k1 * q1,
            Side::Plus => self.coeff.mu_plus * self.k2 * (self.r2 * self.r2 - r2) * q1,
        };
        Vector2::new(-s * p.y, -s * p.x)
    }

    /// `mu^-1 curl u`
    pub fn mu_inv_curl(&self, x: Point, side: Side) -> f64 {
        let p = x - self.center;
        let d = p.x * p.x - p.y * p.y;
        match side {
            Side::Minus => 2.0 * self.k1 * d,
            Side::Plus => {
                let s = self.r1 * self.r1 + self.r2 * self.r2;
                2.0 * self.k2 * d * (s - 2.0 * p.norm_squared())
            }
        }
    }

    /// `f = curl mu^-1 curl u + beta u`, with `curl w = (d_y w, -d_x w)`.
    pub fn source(&self, x: Point, side: Side) -> Vector2<f64> {
        let p = x - self.center;
        let grad_w = match side {
            Side::Minus => Vector2::new(4.0 * self.k1 * p.x, -4.0 * self.k1 * p.y),
            Side::Plus => {
                let s = self.r1 * self.r1 + self.r2 * self.r2;
                let g = s - 2.0 * p.norm_squared();
                let d = p.x * p.x - p.y * p.y;
                2.0 * self.k2 * Vector2::new(2.0 * p.x * g - 4.0 * p.x * d, -2.0 * p.y * g - 4.0 * p.y * d)
            }
        };
        Vector2::new(grad_w.y, -grad_w.x) + self.coeff.beta(side) * self.u(x, side)
    }
}

impl PiecewiseField for ManufacturedSolution {
    fn value(&self, x: Point, side: Side) -> Vector2<f64> {
        self.u(x, side)
    }

    fn curl(&self, x: Point, side: Side) -> f64 {
        self.coeff.mu(side) * self.mu_inv_curl(x, side)
    }
}

/// Which interface decides the side of the exact solution inside interface elements.
/// The discrete solution is always split by the chord.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExactSplit {
    /// The true interface, integrated with the curved cut rule.
    #[default]
    Interface,
    /// The chord, so the sliver between chord and interface is not charged.
    Chord,
}

impl std::str::FromStr for ExactSplit {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interface" | "curved" => Ok(ExactSplit::Interface),
            "chord" => Ok(ExactSplit::Chord),
            other => Err(crate::error::Error::Config(format!("unknown exact split '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    pub dofs: usize,
    /// `|u - u_h|_{H(curl)}` over the domain.
    pub e0: f64,
    /// `|Omega_i|^{-1/2} |u - u_h|_{H(curl; Omega_i)}` over interface elements.
    pub e1: f64,
    pub l2: f64,
    pub curl: f64,
    pub l2_interface: f64,
    pub curl_interface: f64,
    pub interface_area: f64,
}

/// Error of the function with coefficients `dofs` in the `kind` basis.
pub fn hcurl_error(disc: &Discretization, dofs: &[f64], kind: BasisKind, exact: &dyn PiecewiseField, split: ExactSplit) -> Result<ErrorReport> {
    let degree = disc.quad.error_degree;
    let (mut l2, mut cu, mut l2_i, mut cu_i) = (0.0, 0.0, 0.0, 0.0);
    for t in 0..disc.mesh.num_elements() {
        let uh = disc.local_function(dofs, t, kind);
        let (mut el2, mut ecu) = (0.0, 0.0);
        for region in disc.curved_regions(t, degree)? {
            let piece = &uh[region.chord_side.index()];
            let curl_h = piece.curl();
            let side = match split {
                ExactSplit::Interface => region.true_side,
                ExactSplit::Chord => region.chord_side,
            };
            el2 += region.rule.integrate(|x| (exact.value(x, side) - piece.eval(x)).norm_squared());
            ecu += region.rule.integrate(|x| (exact.curl(x, side) - curl_h).powi(2));
        }
        l2 += el2;
        cu += ecu;
        if disc.is_interface(t) {
            l2_i += el2;
            cu_i += ecu;
        }
    }
    let area = disc.classification.interface_area(&disc.mesh);
    let e1 = if area > 0.0 { ((l2_i + cu_i) / area).sqrt() } else { 0.0 };
    Ok(ErrorReport {
        h: disc.mesh.h(),
        dofs: disc.num_dofs(),
        e0: (l2 + cu).sqrt(),
        e1,
        l2: l2.sqrt(),
        curl: cu.sqrt(),
        l2_interface: l2_i.sqrt(),
        curl_interface: cu_i.sqrt(),
        interface_area: area,
    })
}

/// Error of the IFE interpolant of `exact`.
pub fn interpolation_error(disc: &Discretization, exact: &dyn PiecewiseField, split: ExactSplit) -> Result<ErrorReport> {
    let dofs = disc.interpolate(exact);
    hcurl_error(disc, &dofs, BasisKind::Immersed, exact, split)
}

/// `log(e_k / e_{k+1}) / log(h_k / h_{k+1})`
pub fn convergence_rates(levels: &[(f64, f64)]) -> Vec<f64> {
    levels.windows(2).map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::Discretization;
    use crate::interface::{Circle, DEFAULT_SNAP_TOL};
    use crate::mesh::{build_uniform_triangulation, Rect};
    use crate::quadrature::QuadratureSettings;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn sol() -> ManufacturedSolution {
        ManufacturedSolution::standard(CoefficientPair::new(1.0, 0.1, 1.0, 10.0).unwrap())
    }

    #[test]
    fn values_on_interface_and_origin() {
        let s = sol();
        for k in 0..64 {
            let th = 2.0 * PI * k as f64 / 64.0;
            let x = Point::new(s.r1 * th.cos(), s.r1 * th.sin());
            assert!(s.u(x, Side::Minus).norm() < 1e-14 && s.u(x, Side::Plus).norm() < 1e-14);
            let (a, b) = (s.mu_inv_curl(x, Side::Minus), s.mu_inv_curl(x, Side::Plus));
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        assert_eq!(s.u(Point::zeros(), Side::Minus), Vector2::zeros());
        let x = Point::new(s.r1, 0.0);
        assert!((s.mu_inv_curl(x, Side::Minus) - 2.0 * s.k1 * s.r1 * s.r1).abs() < 1e-12);
    }

    #[test]
    fn curl_and_source_match_finite_differences() {
        let s = sol();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let step = 1e-5;
        let dx = Point::new(step, 0.0);
        let dy = Point::new(0.0, step);
        for _ in 0..200 {
            let x = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let side = s.side_of(x);
            let u = |q: Point| s.u(q, side);
            let curl_fd = (u(x + dx).y - u(x - dx).y) / (2.0 * step) - (u(x + dy).x - u(x - dy).x) / (2.0 * step);
            let curl = s.curl(x, side);
            assert!((curl_fd - curl).abs() <= 1e-6 * curl.abs().max(1.0));
            let w = |q: Point| s.mu_inv_curl(q, side);
            let f_fd = Vector2::new((w(x + dy) - w(x - dy)) / (2.0 * step), -(w(x + dx) - w(x - dx)) / (2.0 * step)) + s.coeff.beta(side) * u(x);
            let f = s.source(x, side);
            assert!((f_fd - f).norm() <= 1e-6 * f.norm().max(1.0));
        }
    }

    #[test]
    fn rates_of_power_laws() {
        let hs = [1.0, 0.5, 0.25, 0.125];
        let r = convergence_rates(&hs.map(|h| (h, 3.0 * h)));
        assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-14));
        let r = convergence_rates(&hs.map(|h: f64| (h, 2.0 * h.sqrt())));
        assert!(r.iter().all(|v| (v - 0.5).abs() < 1e-14));
    }

    #[test]
    fn nd_field_has_zero_error() {
        struct Nd;
        impl PiecewiseField for Nd {
            fn value(&self, x: Point, _: Side) -> Vector2<f64> {
                Vector2::new(1.0 + 0.5 * x.y, 2.0 - 0.5 * x.x)
            }
            fn curl(&self, _: Point, _: Side) -> f64 {
                -1.0
            }
        }
        let mesh = build_uniform_triangulation(8, Rect::symmetric_unit()).unwrap();
        let disc = Discretization::new(mesh, Arc::new(Circle::centered(PI / 5.0)), CoefficientPair::matched(1.0, 1.0), DEFAULT_SNAP_TOL, QuadratureSettings::default()).unwrap();
        for split in [ExactSplit::Interface, ExactSplit::Chord] {
            let rep = interpolation_error(&disc, &Nd, split).unwrap();
            assert!(rep.e0 < 1e-12, "{rep:?}");
        }
    }

    #[test]
    fn interface_area_shrinks_linearly() {
        let s = sol();
        for n in [16, 32, 64] {
            let mesh = build_uniform_triangulation(n, Rect::symmetric_unit()).unwrap();
            let disc = Discretization::new(mesh, Arc::new(Circle::centered(s.r1)), s.coeff, DEFAULT_SNAP_TOL, QuadratureSettings::default()).unwrap();
            let area = disc.classification.interface_area(&disc.mesh);
            let h = 2.0 / n as f64;
            // A band around the circle a few cells wide.
            let ratio = area / (2.0 * PI * s.r1 * h);
            assert!(ratio > 0.5 && ratio < 3.0, "n={n}: ratio {ratio}");
        }
    }
}
