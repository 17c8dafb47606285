//! Gauss rules on segments, triangles and convex (or signed simple) polygons.

use crate::error::{Error, Result};
use crate::interface::{project_to_interface, CutConfiguration, LevelSet, Side};
use crate::mesh::{cross, Point};

pub const MAX_TRIANGLE_DEGREE: usize = 10;

/// Points and weights in physical coordinates.
#[derive(Clone, Debug, Default)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn empty(degree: usize) -> Self {
        Self { points: Vec::new(), weights: Vec::new(), degree }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F: FnMut(Point) -> f64>(&self, mut f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    fn extend(&mut self, other: QuadratureRule) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }
}

/// Quadrature degrees used by assembly, load/error integration and the curved refinement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureSettings {
    /// Bilinear forms on straight sub-elements.
    pub assembly_degree: usize,
    /// Load vector and error norms.
    pub error_degree: usize,
    /// Chord subdivisions for the curved interface.
    pub n_sub: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self { assembly_degree: 4, error_degree: 6, n_sub: 4 }
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.5], vec![1.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton on P_n from the usual cosine guess.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 1.0 / ((1.0 - z * z) * dp * dp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss-Legendre rule on the segment `p0 -> p1`, exact for polynomials of the given degree.
pub fn segment_rule(degree: usize, p0: Point, p1: Point) -> QuadratureRule {
    let n = (degree + 2) / 2;
    let (x, w) = gauss_legendre_unit(n.max(1));
    let len = (p1 - p0).norm();
    QuadratureRule {
        points: x.iter().map(|&s| p0 + s * (p1 - p0)).collect(),
        weights: w.iter().map(|&wi| wi * len).collect(),
        degree,
    }
}

/// Reference rule on the triangle `(0,0), (1,0), (0,1)` (weights sum to 1/2).
fn reference_triangle_rule(degree: usize) -> Result<(Vec<[f64; 2]>, Vec<f64>)> {
    match degree {
        0 | 1 => Ok((vec![[1.0 / 3.0, 1.0 / 3.0]], vec![0.5])),
        2 => Ok((
            vec![[1.0 / 6.0, 1.0 / 6.0], [2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0]],
            vec![1.0 / 6.0; 3],
        )),
        3..=5 => {
            let s15 = 15f64.sqrt();
            let a = (6.0 - s15) / 21.0;
            let b = (6.0 + s15) / 21.0;
            let wa = (155.0 - s15) / 2400.0;
            let wb = (155.0 + s15) / 2400.0;
            Ok((
                vec![
                    [1.0 / 3.0, 1.0 / 3.0],
                    [a, a],
                    [1.0 - 2.0 * a, a],
                    [a, 1.0 - 2.0 * a],
                    [b, b],
                    [1.0 - 2.0 * b, b],
                    [b, 1.0 - 2.0 * b],
                ],
                vec![9.0 / 80.0, wa, wa, wa, wb, wb, wb],
            ))
        }
        6..=MAX_TRIANGLE_DEGREE => {
            // Collapsed (Duffy) tensor Gauss rule: x = u (1 - v), y = v, jacobian (1 - v).
            let n = (degree + 3) / 2;
            let (g, w) = gauss_legendre_unit(n);
            let mut pts = Vec::with_capacity(n * n);
            let mut wts = Vec::with_capacity(n * n);
            for (v, wv) in g.iter().zip(&w) {
                for (u, wu) in g.iter().zip(&w) {
                    pts.push([u * (1.0 - v), *v]);
                    wts.push(wu * wv * (1.0 - v));
                }
            }
            Ok((pts, wts))
        }
        d => Err(Error::UnsupportedDegree(d)),
    }
}

/// Rule on a physical triangle. Weights scale with the signed area, so a
/// clockwise triangle yields negative weights.
pub fn signed_triangle_rule(degree: usize, tri: [Point; 3]) -> Result<QuadratureRule> {
    let (pts, wts) = reference_triangle_rule(degree)?;
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let jac = cross(e1, e2);
    Ok(QuadratureRule {
        points: pts.iter().map(|p| tri[0] + p[0] * e1 + p[1] * e2).collect(),
        weights: wts.iter().map(|w| w * jac).collect(),
        degree,
    })
}

/// Rule on a physical triangle with positive weights.
pub fn triangle_rule(degree: usize, tri: [Point; 3]) -> Result<QuadratureRule> {
    if degree == 0 || degree > MAX_TRIANGLE_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    let mut rule = signed_triangle_rule(degree, tri)?;
    if rule.measure() < 0.0 {
        rule.weights.iter_mut().for_each(|w| *w = -*w);
    }
    Ok(rule)
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut a = 0.0;
    for i in 0..poly.len() {
        a += cross(poly[i], poly[(i + 1) % poly.len()]);
    }
    0.5 * a
}

/// Fan rule from vertex 0 of a counter-clockwise convex polygon. Degenerate
/// polygons (area below `1e-14 * scale^2`) give an empty rule.
pub fn polygon_rule(degree: usize, poly: &[Point]) -> Result<QuadratureRule> {
    if degree == 0 || degree > MAX_TRIANGLE_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    let scale = polygon_diameter(poly);
    if poly.len() < 3 || polygon_area(poly).abs() < 1e-14 * scale * scale {
        return Ok(QuadratureRule::empty(degree));
    }
    signed_polygon_rule(degree, poly)
}

/// Signed fan decomposition from vertex 0. Exact for polynomial integrands on
/// any simple polygon (the integrand must extend smoothly past the polygon when
/// the polygon is not star-shaped with respect to vertex 0).
pub fn signed_polygon_rule(degree: usize, poly: &[Point]) -> Result<QuadratureRule> {
    let mut rule = QuadratureRule::empty(degree);
    if poly.len() < 3 {
        return Ok(rule);
    }
    for k in 1..poly.len() - 1 {
        let tri = [poly[0], poly[k], poly[k + 1]];
        if cross(tri[1] - tri[0], tri[2] - tri[0]) == 0.0 {
            continue;
        }
        rule.extend(signed_triangle_rule(degree, tri)?);
    }
    Ok(rule)
}

fn polygon_diameter(poly: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in poly.iter().enumerate() {
        for q in &poly[i + 1..] {
            d = d.max((p - q).norm());
        }
    }
    d
}

/// Piece of an interface element with a fixed true side and chord side.
#[derive(Clone, Debug)]
pub struct CutRegion {
    pub rule: QuadratureRule,
    pub true_side: Side,
    pub chord_side: Side,
}

/// Keep the part of `poly` where `(x - origin) . normal` has sign `keep`.
pub fn clip_half_plane(poly: &[Point], origin: Point, normal: Point, keep: Side) -> Vec<Point> {
    let sgn = match keep {
        Side::Minus => -1.0,
        Side::Plus => 1.0,
    };
    let dist = |x: &Point| sgn * (x - origin).dot(&normal);
    let mut out = Vec::with_capacity(poly.len() + 2);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (da, db) = (dist(&a), dist(&b));
        if da >= 0.0 {
            out.push(a);
        }
        if (da >= 0.0) != (db >= 0.0) {
            out.push(a + (da / (da - db)) * (b - a));
        }
    }
    out
}

fn push_region(out: &mut Vec<CutRegion>, degree: usize, poly: &[Point], true_side: Side, chord_side: Side, scale: f64) -> Result<()> {
    if poly.len() < 3 || polygon_area(poly).abs() < 1e-14 * scale * scale {
        return Ok(());
    }
    let rule = signed_polygon_rule(degree, poly)?;
    out.push(CutRegion { rule, true_side, chord_side });
    Ok(())
}

/// The two straight sub-elements, true side taken equal to chord side.
pub fn straight_cut_regions(degree: usize, cut: &CutConfiguration) -> Result<Vec<CutRegion>> {
    let (minus, plus) = cut.subelement_polygons();
    let mut out = Vec::with_capacity(2);
    let scale = cut.diameter();
    push_region(&mut out, degree, &minus, Side::Minus, Side::Minus, scale)?;
    push_region(&mut out, degree, &plus, Side::Plus, Side::Plus, scale)?;
    Ok(out)
}

/// Split of an interface element by the true interface (a polyline through
/// `n_sub - 1` points re-intersected along the chord normal) and by the chord.
pub fn curved_cut_regions(degree: usize, cut: &CutConfiguration, iface: &dyn LevelSet, n_sub: usize) -> Result<Vec<CutRegion>> {
    let n_sub = n_sub.max(1);
    let reach = cut.diameter();
    let mut arc = Vec::with_capacity(n_sub.saturating_sub(1));
    for k in 1..n_sub {
        let p = cut.d_point + (k as f64 / n_sub as f64) * (cut.e_point - cut.d_point);
        arc.push(project_to_interface(iface, p, cut.normal, reach)?);
    }
    let [a1, a2, a3] = cut.vertices;
    let mut apex_poly = vec![a1, cut.d_point];
    apex_poly.extend(arc.iter().copied());
    apex_poly.push(cut.e_point);
    let mut far_poly = vec![cut.d_point, a2, a3, cut.e_point];
    far_poly.extend(arc.iter().rev().copied());

    let mut out = Vec::with_capacity(4);
    for (poly, true_side) in [(apex_poly, cut.apex_side), (far_poly, cut.far_side())] {
        for chord_side in Side::BOTH {
            let piece = clip_half_plane(&poly, cut.d_point, cut.normal, chord_side);
            push_region(&mut out, degree, &piece, true_side, chord_side, reach)?;
        }
    }
    Ok(out)
}

/// Rule for the part of an interface element on `side` of the true interface.
pub fn curved_subdomain_rule(degree: usize, cut: &CutConfiguration, iface: &dyn LevelSet, side: Side, n_sub: usize) -> Result<QuadratureRule> {
    let mut rule = QuadratureRule::empty(degree);
    for region in curved_cut_regions(degree, cut, iface, n_sub)? {
        if region.true_side == side {
            rule.extend(region.rule);
        }
    }
    Ok(rule)
}
