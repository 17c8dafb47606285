//! Level-set interfaces, element classification and per-element cut geometry.

use crate::error::{Error, Result};
use crate::mesh::{cross, MeshTopology, Point};

/// Side of the interface. `Minus` is `{phi < 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Minus, Side::Plus];

    pub fn of(phi: f64) -> Side {
        if phi < 0.0 {
            Side::Minus
        } else {
            Side::Plus
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::Minus => 0,
            Side::Plus => 1,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }
}

/// Signed scalar function with `phi < 0` in the inner medium.
pub trait LevelSet: Send + Sync {
    fn value(&self, x: Point) -> f64;

    fn gradient(&self, x: Point) -> Point {
        let step = 1e-6;
        let dx = Point::new(step, 0.0);
        let dy = Point::new(0.0, step);
        Point::new(
            (self.value(x + dx) - self.value(x - dx)) / (2.0 * step),
            (self.value(x + dy) - self.value(x - dy)) / (2.0 * step),
        )
    }

    fn side(&self, x: Point) -> Side {
        Side::of(self.value(x))
    }
}

/// `phi = |x - c|^2 - r^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn centered(radius: f64) -> Self {
        Self::new(Point::zeros(), radius)
    }
}

impl LevelSet for Circle {
    fn value(&self, x: Point) -> f64 {
        let d = x - self.center;
        d.dot(&d) - self.radius * self.radius
    }

    fn gradient(&self, x: Point) -> Point {
        2.0 * (x - self.center)
    }
}

/// `phi = normal . x - offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub normal: Point,
    pub offset: f64,
}

impl LevelSet for HalfPlane {
    fn value(&self, x: Point) -> f64 {
        self.normal.dot(&x) - self.offset
    }

    fn gradient(&self, _x: Point) -> Point {
        self.normal
    }
}

/// Adapter for closures.
pub struct FnLevelSet<F>(pub F);

impl<F: Fn(Point) -> f64 + Send + Sync> LevelSet for FnLevelSet<F> {
    fn value(&self, x: Point) -> f64 {
        (self.0)(x)
    }
}

/// Root of `phi` on `p0 -> p1` as a ratio `s`, by bracketed secant with bisection fallback.
pub fn edge_intersection(iface: &dyn LevelSet, p0: Point, p1: Point, tol: f64) -> Result<f64> {
    let f0 = iface.value(p0);
    let f1 = iface.value(p1);
    if f0 == 0.0 {
        return Ok(0.0);
    }
    if f1 == 0.0 {
        return Ok(1.0);
    }
    if f0.signum() == f1.signum() || !f0.is_finite() || !f1.is_finite() {
        return Err(Error::NoSignChange { p0: [p0.x, p0.y], p1: [p1.x, p1.y] });
    }
    let at = |s: f64| iface.value(p0 + s * (p1 - p0));
    let (mut lo, mut hi, mut flo, mut fhi) = (0.0, 1.0, f0, f1);
    let mut s = 0.5;
    for it in 0..200 {
        // Secant inside the bracket, bisection every third step or when it stalls.
        let secant = lo - flo * (hi - lo) / (fhi - flo);
        s = if it % 3 == 2 || !(secant > lo && secant < hi) { 0.5 * (lo + hi) } else { secant };
        let fs = at(s);
        if fs.abs() <= tol || fs == 0.0 {
            return Ok(s);
        }
        if fs.signum() == flo.signum() {
            lo = s;
            flo = fs;
        } else {
            hi = s;
            fhi = fs;
        }
        if hi - lo <= f64::EPSILON * 4.0 {
            break;
        }
    }
    Ok(if flo.abs() < fhi.abs() { lo } else if fhi.abs() < flo.abs() { hi } else { s })
}

/// Geometry of one interface element. `vertices` are `A1, A2, A3` with `A1` the
/// vertex shared by the two cut edges; `D` lies on `A1A2` and `E` on `A1A3`.
#[derive(Clone, Debug, PartialEq)]
pub struct CutConfiguration {
    pub element: usize,
    /// Element vertices in mesh (counter-clockwise) order.
    pub element_vertices: [Point; 3],
    /// Local index of the apex `A1` in `element_vertices`.
    pub apex_local: usize,
    pub vertices: [Point; 3],
    /// Local edges holding `D` and `E`.
    pub cut_local_edges: [usize; 2],
    pub d: f64,
    pub e: f64,
    pub d_point: Point,
    pub e_point: Point,
    pub midpoint: Point,
    /// Unit normal of the chord, pointing from the minus to the plus side.
    pub normal: Point,
    /// `normal` rotated by +90 degrees.
    pub tangent: Point,
    pub apex_side: Side,
}

impl CutConfiguration {
    /// Build from the element's vertices, the apex index and the ratios along `A1A2`, `A1A3`.
    pub fn new(element: usize, element_vertices: [Point; 3], apex_local: usize, d: f64, e: f64, apex_side: Side) -> Self {
        let k = apex_local;
        let a1 = element_vertices[k];
        let a2 = element_vertices[(k + 1) % 3];
        let a3 = element_vertices[(k + 2) % 3];
        let d_point = a1 + d * (a2 - a1);
        let e_point = a1 + e * (a3 - a1);
        let midpoint = 0.5 * (d_point + e_point);
        let chord = e_point - d_point;
        let len = chord.norm();
        let mut normal = if len > 0.0 {
            Point::new(chord.y, -chord.x) / len
        } else {
            // Vanishing chord: use the bisector direction of the apex angle.
            let b = (a2 - a1).normalize() + (a3 - a1).normalize();
            b.normalize()
        };
        // Orient away from the apex first, then from minus to plus.
        if (midpoint - a1).dot(&normal) < 0.0 || (len == 0.0 && (a2 - a1).dot(&normal) < 0.0) {
            normal = -normal;
        }
        if apex_side == Side::Plus {
            normal = -normal;
        }
        let tangent = Point::new(-normal.y, normal.x);
        Self {
            element,
            element_vertices,
            apex_local,
            vertices: [a1, a2, a3],
            cut_local_edges: [(k + 2) % 3, (k + 1) % 3],
            d,
            e,
            d_point,
            e_point,
            midpoint,
            normal,
            tangent,
            apex_side,
        }
    }

    pub fn far_side(&self) -> Side {
        self.apex_side.opposite()
    }

    pub fn chord_length(&self) -> f64 {
        (self.e_point - self.d_point).norm()
    }

    pub fn diameter(&self) -> f64 {
        let [a, b, c] = self.vertices;
        (b - a).norm().max((c - b).norm()).max((a - c).norm())
    }

    pub fn area(&self) -> f64 {
        let [a, b, c] = self.vertices;
        0.5 * cross(b - a, c - a)
    }

    /// Unit normal pointing away from the apex.
    pub fn normal_away_from_apex(&self) -> Point {
        match self.apex_side {
            Side::Minus => self.normal,
            Side::Plus => -self.normal,
        }
    }

    /// Side of the straight chord a point falls on.
    pub fn chord_side(&self, x: Point) -> Side {
        if (x - self.d_point).dot(&self.normal) < 0.0 {
            Side::Minus
        } else {
            Side::Plus
        }
    }

    /// Side of a mesh vertex (by local index).
    pub fn vertex_side(&self, local: usize) -> Side {
        if local == self.apex_local {
            self.apex_side
        } else {
            self.far_side()
        }
    }

    /// Sub-polygons `(T-_h, T+_h)` in counter-clockwise order.
    pub fn subelement_polygons(&self) -> (Vec<Point>, Vec<Point>) {
        let [a1, a2, a3] = self.vertices;
        let apex = vec![a1, self.d_point, self.e_point];
        let far = vec![self.d_point, a2, a3, self.e_point];
        match self.apex_side {
            Side::Minus => (apex, far),
            Side::Plus => (far, apex),
        }
    }

    /// Pieces of local edge `j` (counter-clockwise direction) with the side each lies on.
    pub fn edge_pieces(&self, local_edge: usize) -> Vec<(Point, Point, Side)> {
        let v = self.element_vertices;
        let start = v[(local_edge + 1) % 3];
        let end = v[(local_edge + 2) % 3];
        let apex = self.apex_side;
        let far = self.far_side();
        if local_edge == self.apex_local {
            vec![(start, end, far)]
        } else if local_edge == self.cut_local_edges[0] {
            // A1 -> A2 through D
            vec![(start, self.d_point, apex), (self.d_point, end, far)]
        } else {
            // A3 -> A1 through E
            vec![(start, self.e_point, far), (self.e_point, end, apex)]
        }
    }

    /// Jacobian `[A2 - A1, A3 - A1]` of the affine map from the reference triangle.
    pub fn jacobian(&self) -> nalgebra::Matrix2<f64> {
        let [a1, a2, a3] = self.vertices;
        nalgebra::Matrix2::from_columns(&[a2 - a1, a3 - a1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementLabel {
    Interior(Side),
    Interface,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub node_phi: Vec<f64>,
    pub node_side: Vec<Side>,
    pub snapped_nodes: Vec<usize>,
    pub labels: Vec<ElementLabel>,
    pub cuts: Vec<Option<CutConfiguration>>,
    /// Intersection ratio along each global edge (low -> high node) where node sides differ.
    pub edge_cut: Vec<Option<f64>>,
    pub interface_elements: Vec<usize>,
}

impl Classification {
    pub fn cut(&self, elem: usize) -> Option<&CutConfiguration> {
        self.cuts[elem].as_ref()
    }

    /// Whether global edge `g` is crossed strictly inside.
    pub fn edge_is_cut(&self, g: usize) -> bool {
        matches!(self.edge_cut[g], Some(s) if s > 0.0 && s < 1.0)
    }

    /// Side a point of element `elem` falls on with respect to the straight chord.
    pub fn chord_side(&self, elem: usize, x: Point) -> Side {
        match self.labels[elem] {
            ElementLabel::Interior(s) => s,
            ElementLabel::Interface => self.cuts[elem].as_ref().map_or(Side::Plus, |c| c.chord_side(x)),
        }
    }

    /// Pieces of global edge `g` (global direction) with the true side of each piece.
    pub fn global_edge_pieces(&self, mesh: &MeshTopology, g: usize) -> Vec<(Point, Point, Side)> {
        let [n0, n1] = mesh.edges[g];
        let (p0, p1) = mesh.edge_points(g);
        match self.edge_cut[g] {
            Some(s) if self.node_side[n0] != self.node_side[n1] => {
                let x = p0 + s * (p1 - p0);
                vec![(p0, x, self.node_side[n0]), (x, p1, self.node_side[n1])]
            }
            _ => vec![(p0, p1, self.node_side[n0])],
        }
    }

    pub fn interface_area(&self, mesh: &MeshTopology) -> f64 {
        self.interface_elements.iter().map(|&t| mesh.element_area(t)).sum()
    }
}

pub const DEFAULT_SNAP_TOL: f64 = 1e-8;
const ROOT_TOL: f64 = 1e-14;
const EDGE_SAMPLES: usize = 8;

/// Label every element against the interface and build cut configurations.
///
/// Nodes within `snap_tol * h` of the interface are treated as lying on the
/// plus side; the cut on an edge touching such a node sits exactly at the node.
/// An element whose apex is a snapped node has a zero-measure apex region and is
/// relabelled to its far side.
pub fn classify_elements(mesh: &MeshTopology, iface: &dyn LevelSet, snap_tol: f64) -> Result<Classification> {
    let h = mesh.h();
    let node_phi: Vec<f64> = mesh.nodes.iter().map(|&p| iface.value(p)).collect();
    let mut snapped = vec![false; mesh.num_nodes()];
    let mut node_side = Vec::with_capacity(mesh.num_nodes());
    for (i, &p) in mesh.nodes.iter().enumerate() {
        let phi = node_phi[i];
        let grad = iface.gradient(p).norm();
        if phi.abs() <= snap_tol * h * grad {
            snapped[i] = true;
            node_side.push(Side::Plus);
        } else {
            node_side.push(Side::of(phi));
        }
    }

    let mut edge_cut = vec![None; mesh.num_edges()];
    for (g, &[n0, n1]) in mesh.edges.iter().enumerate() {
        let (p0, p1) = mesh.edge_points(g);
        // Count sign changes along sampled points, endpoints taking their snapped sides.
        // A snapped endpoint takes the side of its neighbouring sample.
        let sample = |k: usize| iface.side(p0 + (k as f64 / EDGE_SAMPLES as f64) * (p1 - p0));
        let mut changes = 0;
        let mut prev = if snapped[n0] { sample(1) } else { node_side[n0] };
        for k in 1..=EDGE_SAMPLES {
            let side = if k < EDGE_SAMPLES {
                sample(k)
            } else if snapped[n1] {
                prev
            } else {
                node_side[n1]
            };
            if side != prev {
                changes += 1;
            }
            prev = side;
        }
        if changes > 1 {
            return Err(Error::A1Violation {
                element: mesh.edge_elements[g][0],
                reason: format!("edge {g} is crossed {changes} times"),
            });
        }
        if node_side[n0] != node_side[n1] {
            let s = if snapped[n0] {
                0.0
            } else if snapped[n1] {
                1.0
            } else {
                edge_intersection(iface, p0, p1, ROOT_TOL)?
            };
            edge_cut[g] = Some(s);
        }
    }

    let mut labels = Vec::with_capacity(mesh.num_elements());
    let mut cuts = Vec::with_capacity(mesh.num_elements());
    let mut interface_elements = Vec::new();
    for t in 0..mesh.num_elements() {
        let tri = mesh.elements[t];
        let sides = tri.map(|n| node_side[n]);
        if sides[0] == sides[1] && sides[1] == sides[2] {
            labels.push(ElementLabel::Interior(sides[0]));
            cuts.push(None);
            continue;
        }
        let apex = (0..3)
            .find(|&k| sides[k] != sides[(k + 1) % 3] && sides[k] != sides[(k + 2) % 3])
            .expect("mixed signs have a unique odd vertex");
        let apex_side = sides[apex];
        if snapped[tri[apex]] {
            labels.push(ElementLabel::Interior(apex_side.opposite()));
            cuts.push(None);
            continue;
        }
        // Ratio measured from the apex along a local edge.
        let ratio_from = |local_edge: usize| -> f64 {
            let g = mesh.element_edges[t][local_edge];
            let s = edge_cut[g].expect("sign change implies a cut");
            if mesh.edges[g][0] == tri[apex] {
                s
            } else {
                1.0 - s
            }
        };
        let d = ratio_from((apex + 2) % 3);
        let e = ratio_from((apex + 1) % 3);
        let verts = mesh.element_vertices(t);
        let cut = CutConfiguration::new(t, verts, apex, d, e, apex_side);
        labels.push(ElementLabel::Interface);
        cuts.push(Some(cut));
        interface_elements.push(t);
    }

    Ok(Classification {
        node_phi,
        node_side,
        snapped_nodes: snapped.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i).collect(),
        labels,
        cuts,
        edge_cut,
        interface_elements,
    })
}

/// Point on the interface reached from `p` along `dir` (unit), searching within `reach`.
pub fn project_to_interface(iface: &dyn LevelSet, p: Point, dir: Point, reach: f64) -> Result<Point> {
    let f0 = iface.value(p);
    if f0 == 0.0 {
        return Ok(p);
    }
    const STEPS: usize = 16;
    for k in 1..=STEPS {
        let r = reach * k as f64 / STEPS as f64;
        for sgn in [1.0, -1.0] {
            let q = p + sgn * r * dir;
            if iface.value(q).signum() != f0.signum() {
                let q_prev = p + sgn * reach * (k - 1) as f64 / STEPS as f64 * dir;
                let s = edge_intersection(iface, q_prev, q, ROOT_TOL)?;
                return Ok(q_prev + s * (q - q_prev));
            }
        }
    }
    Err(Error::NoSignChange { p0: [p.x, p.y], p1: [(p + reach * dir).x, (p + reach * dir).y] })
}

/// Largest distance from the interface to the chord over `samples` chord points.
pub fn chord_deviation(cut: &CutConfiguration, iface: &dyn LevelSet, samples: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 1..samples {
        let p = cut.d_point + (k as f64 / samples as f64) * (cut.e_point - cut.d_point);
        let q = project_to_interface(iface, p, cut.normal, cut.diameter())?;
        worst = worst.max((q - p).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_uniform_triangulation, Rect};
    use std::f64::consts::PI;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn circle_matches_generic_evaluation() {
        let c = Circle::new(p(0.1, -0.2), 0.7);
        let generic = FnLevelSet(|x: Point| (x.x - 0.1).powi(2) + (x.y + 0.2).powi(2) - 0.49);
        for &q in &[p(0.0, 0.0), p(0.5, 0.3), p(-0.9, 0.9), p(0.1, 0.5)] {
            assert!((c.value(q) - generic.value(q)).abs() < 1e-15);
            assert!((c.gradient(q) - generic.gradient(q)).norm() < 1e-8);
        }
    }

    #[test]
    fn edge_roots() {
        let c = Circle::centered(0.5);
        let s = edge_intersection(&c, p(0.0, 0.0), p(1.0, 0.0), 1e-14).unwrap();
        assert!((s - 0.5).abs() < 1e-14);

        let c = Circle::centered(PI / 5.0);
        let s = edge_intersection(&c, p(0.5, 0.0), p(0.75, 0.0), 1e-14).unwrap();
        assert!((s - (PI / 5.0 - 0.5) / 0.25).abs() < 1e-13);

        for a in [0.1, 0.3, 0.77] {
            let line = HalfPlane { normal: p(1.0, 0.0), offset: a };
            let s = edge_intersection(&line, p(0.0, 0.0), p(1.0, 0.0), 1e-14).unwrap();
            assert!((s - a).abs() < 1e-15);
        }
        assert!(matches!(
            edge_intersection(&Circle::centered(0.1), p(0.5, 0.0), p(1.0, 0.0), 1e-14),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn circle_on_n8_mesh_brute_force_counts() {
        let mesh = build_uniform_triangulation(8, Rect::symmetric_unit()).unwrap();
        let circle = Circle::centered(PI / 5.0);
        let cls = classify_elements(&mesh, &circle, DEFAULT_SNAP_TOL).unwrap();
        assert!(cls.snapped_nodes.is_empty());
        for t in 0..mesh.num_elements() {
            let phis = mesh.elements[t].map(|n| circle.value(mesh.nodes[n]));
            let mut sign_changes = 0;
            for k in 0..3 {
                if phis[k].signum() != phis[(k + 1) % 3].signum() {
                    sign_changes += 1;
                }
            }
            match cls.labels[t] {
                ElementLabel::Interface => assert_eq!(sign_changes, 2),
                ElementLabel::Interior(side) => {
                    assert_eq!(sign_changes, 0);
                    assert_eq!(side, Side::of(phis[0]));
                }
            }
        }
        assert!(!cls.interface_elements.is_empty());
    }

    #[test]
    fn cut_configuration_invariants() {
        let mesh = build_uniform_triangulation(16, Rect::symmetric_unit()).unwrap();
        let circle = Circle::centered(PI / 5.0);
        let cls = classify_elements(&mesh, &circle, DEFAULT_SNAP_TOL).unwrap();
        for &t in &cls.interface_elements {
            let cut = cls.cut(t).unwrap();
            assert_ne!(cut.cut_local_edges[0], cut.cut_local_edges[1]);
            assert!(cut.d > 0.0 && cut.d <= 1.0 && cut.e > 0.0 && cut.e <= 1.0);
            assert!(circle.value(cut.d_point).abs() < 1e-13);
            assert!(circle.value(cut.e_point).abs() < 1e-13);
            assert!((cut.normal.norm() - 1.0).abs() < 1e-15 && (cut.tangent.norm() - 1.0).abs() < 1e-15);
            assert!(cut.normal.dot(&cut.tangent).abs() < 1e-15);
            assert!((cut.midpoint - 0.5 * (cut.d_point + cut.e_point)).norm() < 1e-15);
            // Normal points from minus to plus: the circle's gradient direction.
            assert!(cut.normal.dot(&circle.gradient(cut.midpoint)) > 0.0);
            let (minus, plus) = cut.subelement_polygons();
            let a = crate::quadrature::polygon_area(&minus) + crate::quadrature::polygon_area(&plus);
            assert!((a - mesh.element_area(t)).abs() < 1e-15);
            assert!(crate::quadrature::polygon_area(&minus) >= 0.0);
            assert!(crate::quadrature::polygon_area(&plus) >= 0.0);
            for (local, &n) in mesh.elements[t].iter().enumerate() {
                assert_eq!(cut.vertex_side(local), cls.node_side[n]);
            }
        }
    }

    #[test]
    fn half_cut_polygon_areas() {
        let verts = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)];
        let cut = CutConfiguration::new(0, verts, 0, 0.5, 0.5, Side::Minus);
        let (minus, plus) = cut.subelement_polygons();
        assert_eq!(minus.len(), 3);
        assert_eq!(plus.len(), 4);
        assert!((crate::quadrature::polygon_area(&minus) - 0.125).abs() < 1e-15);
        assert!((crate::quadrature::polygon_area(&plus) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn interior_element_is_minus() {
        let mesh = build_uniform_triangulation(8, Rect::symmetric_unit()).unwrap();
        let cls = classify_elements(&mesh, &Circle::centered(PI / 5.0), DEFAULT_SNAP_TOL).unwrap();
        // Element touching the origin lies inside the circle.
        let t = (0..mesh.num_elements())
            .find(|&t| mesh.elements[t].iter().any(|&n| mesh.nodes[n].norm() < 1e-14))
            .unwrap();
        assert_eq!(cls.labels[t], ElementLabel::Interior(Side::Minus));
    }

    #[test]
    fn vertex_on_interface_is_snapped() {
        // Circle of radius 0.5 passes exactly through mesh nodes of the N=4 mesh.
        let mesh = build_uniform_triangulation(4, Rect::symmetric_unit()).unwrap();
        let cls = classify_elements(&mesh, &Circle::centered(0.5), DEFAULT_SNAP_TOL).unwrap();
        assert!(!cls.snapped_nodes.is_empty());
        for &n in &cls.snapped_nodes {
            assert_eq!(cls.node_side[n], Side::Plus);
        }
        for &t in &cls.interface_elements {
            let cut = cls.cut(t).unwrap();
            assert!(cut.d > 0.0 && cut.e > 0.0);
        }
    }

    #[test]
    fn double_crossing_is_rejected() {
        // Tiny circle straddling one coarse edge: crossed twice, both nodes outside.
        let mesh = build_uniform_triangulation(2, Rect::symmetric_unit()).unwrap();
        let circle = Circle::new(p(-0.5, 0.0), 0.1);
        assert!(matches!(classify_elements(&mesh, &circle, DEFAULT_SNAP_TOL), Err(Error::A1Violation { .. })));
    }

    #[test]
    fn chord_deviation_is_second_order() {
        let circle = Circle::centered(PI / 5.0);
        let mut prev = None;
        for n in [16, 32, 64, 128] {
            let mesh = build_uniform_triangulation(n, Rect::symmetric_unit()).unwrap();
            let cls = classify_elements(&mesh, &circle, DEFAULT_SNAP_TOL).unwrap();
            let mut worst: f64 = 0.0;
            for &t in &cls.interface_elements {
                worst = worst.max(chord_deviation(cls.cut(t).unwrap(), &circle, 8).unwrap());
            }
            let h = mesh.h();
            // The curvature bound gives deviation <= h^2 / (8 r).
            assert!(worst <= h * h / (8.0 * PI / 5.0) * 1.0001, "n={n}: {worst}");
            if let Some(c) = prev {
                assert!(worst / (h * h) <= 2.0 * c + 1e-3);
            }
            prev = Some(worst / (h * h));
        }
    }
}
