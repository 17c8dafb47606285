//! Global systems for the Petrov-Galerkin, penalized and classic IFE schemes.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector2};

use crate::error::{Error, Result};
use crate::ife::{build_local_basis, CoefficientPair, LocalEdgeBasis};
use crate::interface::{classify_elements, Classification, ElementLabel, LevelSet, Side};
use crate::mesh::{MeshTopology, Point};
use crate::nedelec::{interpolate, standard_local_basis, NdPoly, PiecewiseField};
use crate::quadrature::{curved_cut_regions, segment_rule, straight_cut_regions, triangle_rule, CutRegion, QuadratureRule, QuadratureSettings};
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// IFE trial functions, standard test functions.
    Pg,
    /// Galerkin IFE with interface-edge penalties.
    Pp,
    /// Galerkin IFE.
    C,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Pg, Scheme::Pp, Scheme::C];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Pg => "pg",
            Scheme::Pp => "pp",
            Scheme::C => "c",
        }
    }

    pub fn test_kind(self) -> BasisKind {
        match self {
            Scheme::Pg => BasisKind::Standard,
            Scheme::Pp | Scheme::C => BasisKind::Immersed,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pg" => Ok(Scheme::Pg),
            "pp" => Ok(Scheme::Pp),
            "c" => Ok(Scheme::C),
            other => Err(Error::Config(format!("unknown scheme '{other}' (expected pg, pp or c)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Standard,
    Immersed,
}

/// Which interior edges carry penalty terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PenaltyEdges {
    /// Edges crossed by the interface, plus edges shared by two interface elements.
    CutOrShared,
    CutOnly,
}

impl FromStr for PenaltyEdges {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cut_or_shared" | "default" => Ok(PenaltyEdges::CutOrShared),
            "cut_only" => Ok(PenaltyEdges::CutOnly),
            other => Err(Error::Config(format!("unknown penalty edge set '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyParams {
    pub c0: f64,
    pub r: f64,
    pub edges: PenaltyEdges,
    /// Include the two consistency terms.
    pub consistency: bool,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        Self { c0: 10.0, r: 1.0, edges: PenaltyEdges::CutOrShared, consistency: true }
    }
}

/// Edge DOF numbering: one DOF per mesh edge, local orientation signs per element.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub num_dofs: usize,
    pub is_boundary: Vec<bool>,
    pub boundary_dofs: Vec<usize>,
    /// `(global dof, sign)` for each local edge.
    pub element_dofs: Vec<[(usize, f64); 3]>,
}

impl DofMap {
    pub fn new(mesh: &MeshTopology) -> Result<Self> {
        let mut element_dofs = Vec::with_capacity(mesh.num_elements());
        for t in 0..mesh.num_elements() {
            let mut local = [(0, 0.0); 3];
            for (j, slot) in local.iter_mut().enumerate() {
                *slot = (mesh.element_edges[t][j], mesh.element_edge_sign(t, j)?.sign());
            }
            element_dofs.push(local);
        }
        let boundary_dofs = (0..mesh.num_edges()).filter(|&g| mesh.boundary_edge[g]).collect();
        Ok(Self { num_dofs: mesh.num_edges(), is_boundary: mesh.boundary_edge.clone(), boundary_dofs, element_dofs })
    }
}

#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

impl LinearSystem {
    pub fn num_dofs(&self) -> usize {
        self.rhs.len()
    }
}

/// Mesh, interface classification and local bases for one coefficient pair.
#[derive(Clone)]
pub struct Discretization {
    pub mesh: MeshTopology,
    pub interface: Arc<dyn LevelSet>,
    pub classification: Classification,
    pub coeff: CoefficientPair,
    pub dofmap: DofMap,
    pub quad: QuadratureSettings,
    pub standard: Vec<[NdPoly; 3]>,
    pub immersed: Vec<Option<LocalEdgeBasis>>,
}

impl fmt::Debug for Discretization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Discretization")
            .field("n", &self.mesh.n)
            .field("dofs", &self.dofmap.num_dofs)
            .field("interface_elements", &self.classification.interface_elements.len())
            .field("coeff", &self.coeff)
            .finish()
    }
}

impl Discretization {
    pub fn new(mesh: MeshTopology, interface: Arc<dyn LevelSet>, coeff: CoefficientPair, snap_tol: f64, quad: QuadratureSettings) -> Result<Self> {
        let classification = classify_elements(&mesh, interface.as_ref(), snap_tol)?;
        let dofmap = DofMap::new(&mesh)?;
        let standard = (0..mesh.num_elements())
            .map(|t| standard_local_basis(mesh.element_vertices(t)))
            .collect::<Result<Vec<_>>>()?;
        let immersed = classification
            .cuts
            .iter()
            .map(|c| c.as_ref().map(|cut| build_local_basis(cut, &coeff)).transpose())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { mesh, interface, classification, coeff, dofmap, quad, standard, immersed })
    }

    pub fn num_dofs(&self) -> usize {
        self.dofmap.num_dofs
    }

    pub fn is_interface(&self, elem: usize) -> bool {
        self.immersed[elem].is_some()
    }

    /// Local shape function `i` of element `elem` on `side` of the chord.
    pub fn piece(&self, elem: usize, kind: BasisKind, i: usize, side: Side) -> &NdPoly {
        match (kind, &self.immersed[elem]) {
            (BasisKind::Immersed, Some(b)) => b.piece(i, side),
            _ => &self.standard[elem][i],
        }
    }

    pub fn chord_side(&self, elem: usize, x: Point) -> Side {
        self.classification.chord_side(elem, x)
    }

    /// Straight sub-elements with the coefficient side of each.
    pub fn assembly_regions(&self, elem: usize, degree: usize) -> Result<Vec<(QuadratureRule, Side)>> {
        match (&self.classification.labels[elem], self.classification.cut(elem)) {
            (ElementLabel::Interface, Some(cut)) => {
                Ok(straight_cut_regions(degree, cut)?.into_iter().map(|r| (r.rule, r.chord_side)).collect())
            }
            (ElementLabel::Interior(side), _) => Ok(vec![(triangle_rule(degree, self.mesh.element_vertices(elem))?, *side)]),
            (ElementLabel::Interface, None) => unreachable!("interface label without a cut"),
        }
    }

    /// Regions split by the true interface and by the chord.
    pub fn curved_regions(&self, elem: usize, degree: usize) -> Result<Vec<CutRegion>> {
        match (&self.classification.labels[elem], self.classification.cut(elem)) {
            (ElementLabel::Interface, Some(cut)) => curved_cut_regions(degree, cut, self.interface.as_ref(), self.quad.n_sub),
            (ElementLabel::Interior(side), _) => Ok(vec![CutRegion {
                rule: triangle_rule(degree, self.mesh.element_vertices(elem))?,
                true_side: *side,
                chord_side: *side,
            }]),
            (ElementLabel::Interface, None) => unreachable!("interface label without a cut"),
        }
    }

    /// The global function with coefficients `dofs` restricted to `elem`, one piece per chord side.
    pub fn local_function(&self, dofs: &[f64], elem: usize, kind: BasisKind) -> [NdPoly; 2] {
        let origin = self.standard[elem][0].origin;
        Side::BOTH.map(|side| {
            let mut acc = NdPoly::new(Vector2::zeros(), 0.0, origin);
            for (i, &(g, s)) in self.dofmap.element_dofs[elem].iter().enumerate() {
                acc = acc.add(&self.piece(elem, kind, i, side).scale(s * dofs[g]));
            }
            acc
        })
    }

    /// Edge DOFs of a piecewise field, edges split at the interface.
    pub fn interpolate(&self, field: &dyn PiecewiseField) -> Vec<f64> {
        interpolate(field, &self.mesh, &self.classification, self.quad.error_degree)
    }
}

/// `(curl stiffness, beta mass)` with rows indexed by test and columns by trial.
pub fn local_matrices(disc: &Discretization, elem: usize, trial: BasisKind, test: BasisKind) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    let mut k = Matrix3::zeros();
    let mut m = Matrix3::zeros();
    for (rule, side) in disc.assembly_regions(elem, disc.quad.assembly_degree)? {
        let mu_inv = 1.0 / disc.coeff.mu(side);
        let beta = disc.coeff.beta(side);
        let area = rule.measure();
        for i in 0..3 {
            let v = disc.piece(elem, test, i, side);
            for j in 0..3 {
                let u = disc.piece(elem, trial, j, side);
                k[(i, j)] += mu_inv * u.curl() * v.curl() * area;
                m[(i, j)] += beta * rule.integrate(|x| u.eval(x).dot(&v.eval(x)));
            }
        }
    }
    Ok((k, m))
}

/// Sum of element contributions of the curl and/or mass parts.
pub fn assemble_bilinear(disc: &Discretization, trial: BasisKind, test: BasisKind, curl: bool, mass: bool) -> Result<CsrMatrix> {
    let n = disc.num_dofs();
    let mut triplets = Vec::with_capacity(9 * disc.mesh.num_elements());
    for t in 0..disc.mesh.num_elements() {
        let (k, m) = local_matrices(disc, t, trial, test)?;
        let dofs = disc.dofmap.element_dofs[t];
        for i in 0..3 {
            for j in 0..3 {
                let mut v = 0.0;
                if curl {
                    v += k[(i, j)];
                }
                if mass {
                    v += m[(i, j)];
                }
                triplets.push((dofs[i].0, dofs[j].0, dofs[i].1 * dofs[j].1 * v));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(n, n, triplets))
}

/// Interior edges receiving penalty terms.
pub fn interface_edges(disc: &Discretization, which: PenaltyEdges) -> Vec<usize> {
    let mesh = &disc.mesh;
    (0..mesh.num_edges())
        .filter(|&g| {
            let adj = &mesh.edge_elements[g];
            if adj.len() != 2 {
                return false;
            }
            let cut = disc.classification.edge_is_cut(g);
            match which {
                PenaltyEdges::CutOnly => cut,
                PenaltyEdges::CutOrShared => cut || (disc.is_interface(adj[0]) && disc.is_interface(adj[1])),
            }
        })
        .collect()
}

/// Penalty contributions of one interior edge, `[.]` taken as `T1 - T2`.
pub fn penalty_local(disc: &Discretization, edge: usize, elems: [usize; 2], params: &PenaltyParams) -> Vec<(usize, usize, f64)> {
    let mesh = &disc.mesh;
    let (p0, p1) = mesh.edge_points(edge);
    let t = (p1 - p0).normalize();
    let sigma = params.c0 * disc.coeff.max_beta() / mesh.h().powf(params.r);
    let mut points = vec![p0];
    if let Some(s) = disc.classification.edge_cut[edge] {
        if s > 0.0 && s < 1.0 {
            points.push(p0 + s * (p1 - p0));
        }
    }
    points.push(p1);

    let mut out = Vec::new();
    for seg in points.windows(2) {
        let mid = 0.5 * (seg[0] + seg[1]);
        let sides = elems.map(|e| disc.chord_side(e, mid));
        let rule = segment_rule(4, seg[0], seg[1]);
        // (dof, jump coefficient, average coefficient) for every local function of both elements
        for (x, w) in rule.iter() {
            let mut entries: Vec<(usize, f64, f64)> = Vec::with_capacity(6);
            for (k, &e) in elems.iter().enumerate() {
                let sgn = if k == 0 { 1.0 } else { -1.0 };
                let side = sides[k];
                let mu_inv = 1.0 / disc.coeff.mu(side);
                for (i, &(g, s)) in disc.dofmap.element_dofs[e].iter().enumerate() {
                    let psi = disc.piece(e, BasisKind::Immersed, i, side);
                    entries.push((g, sgn * s * psi.eval(x).dot(&t), 0.5 * s * mu_inv * psi.curl()));
                }
            }
            for &(gp, jp, ap) in &entries {
                for &(gq, jq, aq) in &entries {
                    let mut v = sigma * jq * jp;
                    if params.consistency {
                        v -= aq * jp + ap * jq;
                    }
                    out.push((gp, gq, w * v));
                }
            }
        }
    }
    out
}

pub fn penalty_matrix(disc: &Discretization, params: &PenaltyParams) -> CsrMatrix {
    let n = disc.num_dofs();
    let mut triplets = Vec::new();
    for g in interface_edges(disc, params.edges) {
        let adj = &disc.mesh.edge_elements[g];
        triplets.extend(penalty_local(disc, g, [adj[0], adj[1]], params));
    }
    CsrMatrix::from_triplets(n, n, triplets)
}

/// `int f . v` for every test function, using the curved split on interface elements.
pub fn load_vector(disc: &Discretization, test: BasisKind, f: &dyn Fn(Point, Side) -> Vector2<f64>) -> Result<Vec<f64>> {
    let mut rhs = vec![0.0; disc.num_dofs()];
    for t in 0..disc.mesh.num_elements() {
        let dofs = disc.dofmap.element_dofs[t];
        for region in disc.curved_regions(t, disc.quad.error_degree)? {
            for (i, &(g, s)) in dofs.iter().enumerate() {
                let v = disc.piece(t, test, i, region.chord_side);
                rhs[g] += s * region.rule.integrate(|x| f(x, region.true_side).dot(&v.eval(x)));
            }
        }
    }
    Ok(rhs)
}

/// Matrix and load vector of a scheme, before boundary conditions.
pub fn assemble(disc: &Discretization, scheme: Scheme, penalty: &PenaltyParams, f: &dyn Fn(Point, Side) -> Vector2<f64>) -> Result<LinearSystem> {
    let test = scheme.test_kind();
    let mut matrix = assemble_bilinear(disc, BasisKind::Immersed, test, true, true)?;
    if scheme == Scheme::Pp {
        matrix = matrix.add_scaled(&penalty_matrix(disc, penalty), 1.0);
    }
    let rhs = load_vector(disc, test, f)?;
    Ok(LinearSystem { matrix, rhs })
}

/// Standard Nedelec Galerkin system with coefficients taken by chord side.
pub fn assemble_standard(disc: &Discretization, f: &dyn Fn(Point, Side) -> Vector2<f64>) -> Result<LinearSystem> {
    let matrix = assemble_bilinear(disc, BasisKind::Standard, BasisKind::Standard, true, true)?;
    let rhs = load_vector(disc, BasisKind::Standard, f)?;
    Ok(LinearSystem { matrix, rhs })
}

/// Replace boundary rows by identity rows holding `values[g]`, moving the
/// boundary columns of the other rows to the right-hand side.
pub fn apply_dirichlet(system: &LinearSystem, dofmap: &DofMap, values: &[f64]) -> LinearSystem {
    let a = &system.matrix;
    let mut rhs = system.rhs.clone();
    let mut triplets = Vec::with_capacity(a.nnz());
    for r in 0..a.nrows {
        if dofmap.is_boundary[r] {
            triplets.push((r, r, 1.0));
            rhs[r] = values[r];
            continue;
        }
        for (c, v) in a.row(r) {
            if dofmap.is_boundary[c] {
                rhs[r] -= v * values[c];
            } else {
                triplets.push((r, c, v));
            }
        }
    }
    LinearSystem { matrix: CsrMatrix::from_triplets(a.nrows, a.ncols, triplets), rhs }
}

/// Boundary DOFs `int_e u . t` (zero on interior edges).
pub fn boundary_values(disc: &Discretization, field: &dyn PiecewiseField) -> Vec<f64> {
    let mut values = disc.interpolate(field);
    for (g, v) in values.iter_mut().enumerate() {
        if !disc.dofmap.is_boundary[g] {
            *v = 0.0;
        }
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interface::{Circle, DEFAULT_SNAP_TOL};
    use crate::mesh::{build_uniform_triangulation, Rect};
    use std::f64::consts::PI;

    fn disc(n: usize, coeff: CoefficientPair) -> Discretization {
        let mesh = build_uniform_triangulation(n, Rect::symmetric_unit()).unwrap();
        Discretization::new(mesh, Arc::new(Circle::centered(PI / 5.0)), coeff, DEFAULT_SNAP_TOL, QuadratureSettings::default()).unwrap()
    }

    fn contrast_coeff() -> CoefficientPair {
        CoefficientPair::new(1.0, 0.1, 1.0, 10.0).unwrap()
    }

    fn source(x: Point, side: Side) -> Vector2<f64> {
        let s = if side == Side::Minus { 1.0 } else { 2.0 };
        Vector2::new(s * x.y.sin(), x.x * x.x - s)
    }

    /// Whitney mass matrix from `int l_a l_b = |T| (1 + delta_ab) / 12`.
    fn whitney_mass(tri: [Point; 3]) -> Matrix3<f64> {
        let area = 0.5 * ((tri[1] - tri[0]).x * (tri[2] - tri[0]).y - (tri[1] - tri[0]).y * (tri[2] - tri[0]).x);
        let grad = |k: usize| {
            let a = tri[(k + 1) % 3];
            let b = tri[(k + 2) % 3];
            Vector2::new(a.y - b.y, b.x - a.x) / (2.0 * area)
        };
        let ll = |a: usize, b: usize| area * if a == b { 2.0 } else { 1.0 } / 12.0;
        // Edge i runs from vertex i+1 to vertex i+2.
        let ends = |i: usize| ((i + 1) % 3, (i + 2) % 3);
        Matrix3::from_fn(|i, j| {
            let (a, b) = ends(i);
            let (c, d) = ends(j);
            ll(a, c) * grad(b).dot(&grad(d)) - ll(a, d) * grad(b).dot(&grad(c)) - ll(b, c) * grad(a).dot(&grad(d))
                + ll(b, d) * grad(a).dot(&grad(c))
        })
    }

    #[test]
    fn dofmap_counts() {
        let d = disc(8, contrast_coeff());
        assert_eq!(d.num_dofs(), 3 * 64 + 2 * 8);
        assert_eq!(d.dofmap.boundary_dofs.len(), 32);
        let mut seen = vec![0; d.num_dofs()];
        for dofs in &d.dofmap.element_dofs {
            for &(g, s) in dofs {
                seen[g] += 1;
                assert!(s == 1.0 || s == -1.0);
            }
        }
        for g in 0..d.num_dofs() {
            assert_eq!(seen[g], if d.dofmap.is_boundary[g] { 1 } else { 2 });
        }
    }

    #[test]
    fn whitney_oracle_on_unit_triangle() {
        let mesh = build_uniform_triangulation(1, Rect::new(0.0, 1.0, 0.0, 1.0)).unwrap();
        let d = Discretization::new(mesh, Arc::new(Circle::new(Point::new(5.0, 5.0), 0.1)), CoefficientPair::matched(1.0, 1.0), DEFAULT_SNAP_TOL, QuadratureSettings::default()).unwrap();
        for t in 0..2 {
            let tri = d.mesh.element_vertices(t);
            let area = d.mesh.element_area(t);
            let (k, m) = local_matrices(&d, t, BasisKind::Standard, BasisKind::Standard).unwrap();
            let mo = whitney_mass(tri);
            for i in 0..3 {
                for j in 0..3 {
                    // curl of every Whitney function is 2 / det B = 1 / |T|.
                    assert!((k[(i, j)] - 4.0 * area / (4.0 * area * area)).abs() < 1e-13);
                    assert!((m[(i, j)] - mo[(i, j)]).abs() < 1e-14, "{} vs {}", m[(i, j)], mo[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn matched_pg_equals_standard_galerkin() {
        let d = disc(16, CoefficientPair::matched(1.0, 1.0));
        let pg = assemble(&d, Scheme::Pg, &PenaltyParams::default(), &source).unwrap();
        let std = assemble_standard(&d, &source).unwrap();
        assert!(pg.matrix.max_abs_diff(&std.matrix) <= 1e-12);
        let diff = pg.rhs.iter().zip(&std.rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-12);
        assert!(pg.matrix.asymmetry() <= 1e-12);
        assert!(penalty_matrix(&d, &PenaltyParams::default()).max_abs() <= 1e-12);
    }

    #[test]
    fn pg_is_nonsymmetric_with_beta_jump() {
        let d = disc(16, CoefficientPair::new(1.0, 1.0, 1.0, 10.0).unwrap());
        let mass = assemble_bilinear(&d, BasisKind::Immersed, BasisKind::Standard, false, true).unwrap();
        assert!(mass.asymmetry() > 1e-6);
        let curl_pg = assemble_bilinear(&d, BasisKind::Immersed, BasisKind::Standard, true, false).unwrap();
        let curl_c = assemble_bilinear(&d, BasisKind::Immersed, BasisKind::Immersed, true, false).unwrap();
        assert!(curl_pg.max_abs_diff(&curl_c) <= 1e-12 * curl_pg.max_abs());
    }

    #[test]
    fn classic_equals_penalized_without_penalty() {
        let d = disc(16, contrast_coeff());
        let c = assemble(&d, Scheme::C, &PenaltyParams::default(), &source).unwrap();
        let params = PenaltyParams { c0: 0.0, consistency: false, ..PenaltyParams::default() };
        let pp = assemble(&d, Scheme::Pp, &params, &source).unwrap();
        assert!(c.matrix.max_abs_diff(&pp.matrix) <= 1e-12 * c.matrix.max_abs());
        let full = assemble(&d, Scheme::Pp, &PenaltyParams::default(), &source).unwrap();
        assert!(c.matrix.max_abs_diff(&full.matrix) > 1e-3);
    }

    #[test]
    fn penalty_is_invariant_under_neighbour_swap() {
        let d = disc(16, contrast_coeff());
        let params = PenaltyParams::default();
        let edges = interface_edges(&d, params.edges);
        assert!(!edges.is_empty());
        assert!(interface_edges(&d, PenaltyEdges::CutOnly).len() <= edges.len());
        let n = d.num_dofs();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for &g in &edges {
            let adj = &d.mesh.edge_elements[g];
            a.extend(penalty_local(&d, g, [adj[0], adj[1]], &params));
            b.extend(penalty_local(&d, g, [adj[1], adj[0]], &params));
        }
        let ma = CsrMatrix::from_triplets(n, n, a);
        let mb = CsrMatrix::from_triplets(n, n, b);
        assert!(ma.max_abs_diff(&mb) <= 1e-12 * ma.max_abs());
        assert!(ma.asymmetry() <= 1e-12 * ma.max_abs());
    }

    #[test]
    fn dirichlet_rows_are_identity() {
        let d = disc(8, contrast_coeff());
        let sys = assemble(&d, Scheme::Pg, &PenaltyParams::default(), &source).unwrap();
        let values: Vec<f64> = (0..d.num_dofs()).map(|g| g as f64 * 0.01).collect();
        let bc = apply_dirichlet(&sys, &d.dofmap, &values);
        for &g in &d.dofmap.boundary_dofs {
            assert_eq!(bc.matrix.row(g).collect::<Vec<_>>(), vec![(g, 1.0)]);
            assert_eq!(bc.rhs[g], values[g]);
        }
        for r in 0..d.num_dofs() {
            for (c, _) in bc.matrix.row(r) {
                assert!(!d.dofmap.is_boundary[c] || c == r);
            }
        }
    }

    #[test]
    fn assembly_is_deterministic() {
        let d = disc(16, contrast_coeff());
        for scheme in Scheme::ALL {
            let a = assemble(&d, scheme, &PenaltyParams::default(), &source).unwrap();
            let b = assemble(&d, scheme, &PenaltyParams::default(), &source).unwrap();
            assert_eq!(a.matrix, b.matrix);
            assert_eq!(a.rhs, b.rhs);
        }
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("xyz".parse::<Scheme>().is_err());
    }
}
