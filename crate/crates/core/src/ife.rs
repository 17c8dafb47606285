//! Immersed shape functions on interface elements.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::interface::{CutConfiguration, Side};
use crate::mesh::Point;
use crate::nedelec::{local_edge, perp, piola_push, reference_basis, NdPoly};

pub const SINGULAR_RCOND: f64 = 1e-12;

/// Piecewise constant coefficients `mu`, `beta` on the two sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientPair {
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub beta_minus: f64,
    pub beta_plus: f64,
}

impl CoefficientPair {
    pub fn new(mu_minus: f64, mu_plus: f64, beta_minus: f64, beta_plus: f64) -> Result<Self> {
        for (name, v) in [("mu_minus", mu_minus), ("mu_plus", mu_plus), ("beta_minus", beta_minus), ("beta_plus", beta_plus)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { mu_minus, mu_plus, beta_minus, beta_plus })
    }

    pub fn matched(mu: f64, beta: f64) -> Self {
        Self { mu_minus: mu, mu_plus: mu, beta_minus: beta, beta_plus: beta }
    }

    pub fn mu(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.mu_minus,
            Side::Plus => self.mu_plus,
        }
    }

    pub fn beta(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.beta_minus,
            Side::Plus => self.beta_plus,
        }
    }

    /// `1 - mu+/mu-`
    pub fn kappa(&self) -> f64 {
        1.0 - self.mu_plus / self.mu_minus
    }

    /// `1 - beta-/beta+`
    pub fn lambda(&self) -> f64 {
        1.0 - self.beta_minus / self.beta_plus
    }

    /// `beta-/beta+`
    pub fn rho(&self) -> f64 {
        self.beta_minus / self.beta_plus
    }

    pub fn max_beta(&self) -> f64 {
        self.beta_minus.max(self.beta_plus)
    }

    pub fn is_matched(&self) -> bool {
        self.mu_minus == self.mu_plus && self.beta_minus == self.beta_plus
    }

    pub fn swapped(&self) -> Self {
        Self { mu_minus: self.mu_plus, mu_plus: self.mu_minus, beta_minus: self.beta_plus, beta_plus: self.beta_minus }
    }
}

/// Extend `v` from the side with `(mu_from, beta_from)` across the chord.
fn transmit(cut: &CutConfiguration, v: &NdPoly, mu_ratio: f64, beta_ratio: f64) -> NdPoly {
    // mu_ratio = mu_to / mu_from, beta_ratio = beta_from / beta_to
    let b1 = 0.5 * (1.0 - mu_ratio) * v.curl();
    let n = cut.normal;
    let b2 = (beta_ratio - 1.0) * v.eval(cut.midpoint).dot(&n) - b1 * perp(cut.midpoint - cut.d_point).dot(&n);
    let o = v.origin;
    NdPoly::new(v.a + b1 * perp(o - cut.d_point) + b2 * n, v.b + b1, o)
}

/// `C_T`: the piece on `T+` matching `v` on `T-`.
pub fn ct_apply(cut: &CutConfiguration, v: &NdPoly, coeff: &CoefficientPair) -> NdPoly {
    transmit(cut, v, coeff.mu_plus / coeff.mu_minus, coeff.beta_minus / coeff.beta_plus)
}

/// Inverse of [`ct_apply`].
pub fn ct_inverse(cut: &CutConfiguration, w: &NdPoly, coeff: &CoefficientPair) -> NdPoly {
    transmit(cut, w, coeff.mu_minus / coeff.mu_plus, coeff.beta_plus / coeff.beta_minus)
}

/// Piece of a function given on `from` extended to the other side.
pub fn extend_across(cut: &CutConfiguration, v: &NdPoly, from: Side, coeff: &CoefficientPair) -> NdPoly {
    match from {
        Side::Minus => ct_apply(cut, v, coeff),
        Side::Plus => ct_inverse(cut, v, coeff),
    }
}

/// Split edge-DOF of a pair of pieces on local edge `j`.
pub fn split_edge_dof(cut: &CutConfiguration, pieces: &[NdPoly; 2], j: usize) -> f64 {
    cut.edge_pieces(j).into_iter().map(|(s, e, side)| pieces[side.index()].edge_integral(s, e)).sum()
}

/// Three IFE shape functions, each a pair `[piece on T-_h, piece on T+_h]`.
#[derive(Clone, Debug)]
pub struct LocalEdgeBasis {
    pub cut: CutConfiguration,
    pub coeff: CoefficientPair,
    pub pieces: [[NdPoly; 2]; 3],
    pub rcond: f64,
}

impl LocalEdgeBasis {
    pub fn piece(&self, i: usize, side: Side) -> &NdPoly {
        &self.pieces[i][side.index()]
    }

    /// Value using the chord to pick the piece.
    pub fn eval(&self, i: usize, x: Point) -> Vector2<f64> {
        self.piece(i, self.cut.chord_side(x)).eval(x)
    }

    /// `mu^-1 curl psi_i`, read off the minus piece.
    pub fn mu_inv_curl(&self, i: usize) -> f64 {
        self.pieces[i][0].curl() / self.coeff.mu_minus
    }

    pub fn edge_dof(&self, i: usize, j: usize) -> f64 {
        split_edge_dof(&self.cut, &self.pieces[i], j)
    }

    /// `max |psi_i| * h_T` over the element (attained at sub-polygon vertices).
    pub fn scaled_sup_norm(&self) -> f64 {
        let (minus, plus) = self.cut.subelement_polygons();
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for (poly, side) in [(&minus, Side::Minus), (&plus, Side::Plus)] {
                for &x in poly.iter() {
                    m = m.max(self.piece(i, side).eval(x).norm());
                }
            }
        }
        m * self.cut.diameter()
    }
}

/// Closed form of the shared `mu^-1 curl` of the IFE shape functions.
pub fn closed_form_curl(cut: &CutConfiguration, coeff: &CoefficientPair) -> f64 {
    let de = cut.d * cut.e;
    let mu_apex = coeff.mu(cut.apex_side);
    let mu_far = coeff.mu(cut.far_side());
    2.0 / (cut.jacobian().determinant() * ((1.0 - de) * mu_far + de * mu_apex))
}

fn inverse_with_rcond(g: &Matrix3<f64>, element: usize) -> Result<(Matrix3<f64>, f64)> {
    let norm1 = |m: &Matrix3<f64>| (0..3).map(|c| m.column(c).abs().sum()).fold(0.0, f64::max);
    let inv = g.try_inverse().ok_or(Error::SingularSystem { element, rcond: 0.0 })?;
    let rcond = 1.0 / (norm1(g) * norm1(&inv));
    if !(rcond >= SINGULAR_RCOND) {
        return Err(Error::SingularSystem { element, rcond });
    }
    Ok((inv, rcond))
}

/// Shape functions with Kronecker split edge DOFs, unknowns taken on `T-`.
pub fn build_local_basis(cut: &CutConfiguration, coeff: &CoefficientPair) -> Result<LocalEdgeBasis> {
    let h = cut.diameter();
    let o = cut.midpoint;
    let unknowns = [
        NdPoly::new(Vector2::new(1.0, 0.0), 0.0, o),
        NdPoly::new(Vector2::new(0.0, 1.0), 0.0, o),
        NdPoly::new(Vector2::zeros(), 1.0 / h, o),
    ];
    let pairs = unknowns.map(|v| [v, ct_apply(cut, &v, coeff)]);
    let mut g = Matrix3::zeros();
    for j in 0..3 {
        for (c, pair) in pairs.iter().enumerate() {
            g[(j, c)] = split_edge_dof(cut, pair, j);
        }
    }
    let (inv, rcond) = inverse_with_rcond(&g, cut.element)?;
    let pieces = std::array::from_fn(|i| {
        let mut c: Vector3<f64> = inv.column(i).into();
        // One step of refinement on the Kronecker residual.
        let residual = Vector3::from_fn(|k, _| if k == i { 1.0 } else { 0.0 }) - g * c;
        c += inv * residual;
        let minus = NdPoly::new(Vector2::new(c[0], c[1]), c[2] / h, o);
        [minus, ct_apply(cut, &minus, coeff)]
    });
    Ok(LocalEdgeBasis { cut: cut.clone(), coeff: *coeff, pieces, rcond })
}

/// The same shape functions by the reference-element route: unknowns
/// `v1, c2, c3, b1, b2` on the reference triangle, then a Piola push.
pub fn build_local_basis_reference(cut: &CutConfiguration, coeff: &CoefficientPair) -> Result<LocalEdgeBasis> {
    let (d, e) = (cut.d, cut.e);
    let far = cut.far_side();
    let apex = cut.apex_side;
    let kappa = 1.0 - coeff.mu(apex) / coeff.mu(far);
    let lambda = 1.0 - coeff.beta(far) / coeff.beta(apex);
    let bmat = cut.jacobian();
    let binv = bmat.try_inverse().ok_or(Error::SingularJacobian { det: bmat.determinant() })?;
    let n_hat = binv * cut.normal;
    let n_prime = Vector2::new(e, d);
    let alpha = 0.5 * n_prime.dot(&n_hat);
    let xm = Point::new(d / 2.0, e / 2.0);
    let phi: Vec<NdPoly> = (0..3).map(reference_basis).collect::<Result<_>>()?;
    let a = Matrix2::new(1.0, 0.0, alpha, 2.0 * alpha);
    let gamma = Vector2::new(kappa, -lambda * phi[0].eval(xm).dot(&n_hat));
    let bm = Matrix2::new(kappa, kappa, -lambda * phi[1].eval(xm).dot(&n_hat), -lambda * phi[2].eval(xm).dot(&n_hat));
    let r = d * e * Matrix2::new(-1.0, -1.0, 0.0, 1.0);
    let a_inv = a.try_inverse().ok_or(Error::SingularSystem { element: cut.element, rcond: 0.0 })?;
    let system = Matrix2::identity() + r * a_inv * bm;
    let sys_inv = system.try_inverse().ok_or(Error::SingularSystem { element: cut.element, rcond: 0.0 })?;

    // Reference edge i corresponds to element local edge (apex_local + i) % 3.
    let mut pieces = [[NdPoly::zero(); 2]; 3];
    for i in 0..3 {
        let v = Vector3::from_fn(|k, _| if k == i { 1.0 } else { 0.0 });
        let v1 = v[0];
        let c = sys_inv * (Vector2::new(v[1], v[2]) - r * a_inv * gamma * v1);
        let b = a_inv * (gamma * v1 + bm * c);
        let z_far = phi[0].scale(v1).add(&phi[1].scale(c[0])).add(&phi[2].scale(c[1]));
        // b1 [x2, -(x1 - d)] + b2 [e, d]
        let z_apex = z_far.add(&NdPoly::new(b[1] * n_prime, b[0], Point::new(d, 0.0)));
        let local = (cut.apex_local + i) % 3;
        pieces[local][far.index()] = piola_push(&bmat, cut.vertices[0], &z_far)?;
        pieces[local][apex.index()] = piola_push(&bmat, cut.vertices[0], &z_apex)?;
    }
    Ok(LocalEdgeBasis { cut: cut.clone(), coeff: *coeff, pieces, rcond: f64::NAN })
}

/// DOF matrix of `(v, extension of v)` with `v` ranging over the standard basis on the far side.
pub fn far_dof_matrix(cut: &CutConfiguration, coeff: &CoefficientPair) -> Result<Matrix3<f64>> {
    let std = crate::nedelec::standard_local_basis(cut.element_vertices)?;
    let far = cut.far_side();
    let mut m = Matrix3::zeros();
    for (c, v) in std.iter().enumerate() {
        let mut pair = [*v; 2];
        pair[cut.apex_side.index()] = extend_across(cut, v, far, coeff);
        for j in 0..3 {
            m[(j, c)] = split_edge_dof(cut, &pair, j);
        }
    }
    Ok(m)
}

/// Reference-mapped chord normal `B^-1 n`, oriented away from the apex.
pub fn mapped_normal(cut: &CutConfiguration) -> Vector2<f64> {
    cut.jacobian().try_inverse().map_or(Vector2::zeros(), |b| b * cut.normal_away_from_apex())
}

/// `(n' . n_hat, de (n_hat1 + n_hat2) / (n' . n_hat))` with `n' = [e, d]`.
pub fn geometric_quantities(cut: &CutConfiguration) -> (f64, f64) {
    let n_hat = mapped_normal(cut);
    let dot = cut.e * n_hat.x + cut.d * n_hat.y;
    (dot, cut.d * cut.e * (n_hat.x + n_hat.y) / dot)
}

/// The two eigenvalues `1 - de kappa` and `1 - de (n1 + n2) lambda / (e n1 + d n2)` with
/// `kappa`, `lambda` taken relative to the apex side.
pub fn unisolvence_margin(cut: &CutConfiguration, coeff: &CoefficientPair) -> (f64, f64) {
    let far = cut.far_side();
    let apex = cut.apex_side;
    let kappa = 1.0 - coeff.mu(apex) / coeff.mu(far);
    let lambda = 1.0 - coeff.beta(far) / coeff.beta(apex);
    let de = cut.d * cut.e;
    let (_, ratio) = geometric_quantities(cut);
    (1.0 - de * kappa, 1.0 - ratio * lambda)
}

/// Scalar `c + g . (x - origin)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Linear {
    pub c: f64,
    pub g: Vector2<f64>,
    pub origin: Point,
}

impl Linear {
    pub fn eval(&self, x: Point) -> f64 {
        self.c + self.g.dot(&(x - self.origin))
    }
}

/// Piecewise-linear nodal IFE functions, `[piece on T-_h, piece on T+_h]`.
#[derive(Clone, Debug)]
pub struct LocalNodalIFEBasis {
    pub cut: CutConfiguration,
    pub pieces: [[Linear; 2]; 3],
}

impl LocalNodalIFEBasis {
    pub fn piece(&self, k: usize, side: Side) -> &Linear {
        &self.pieces[k][side.index()]
    }

    /// Nodal value at element vertex `local`, on that vertex's side.
    pub fn nodal_value(&self, k: usize, local: usize) -> f64 {
        let side = self.cut.vertex_side(local);
        self.piece(k, side).eval(self.cut.element_vertices[local])
    }
}

fn h1_extend(cut: &CutConfiguration, z: &Linear, coeff: &CoefficientPair) -> Linear {
    let n = cut.normal;
    let gamma = (coeff.beta_minus / coeff.beta_plus - 1.0) * z.g.dot(&n);
    // z + gamma (x - D) . n, re-anchored at z.origin
    Linear { c: z.c + gamma * (z.origin - cut.d_point).dot(&n), g: z.g + gamma * n, origin: z.origin }
}

/// Linear IFE hat functions: continuous across the chord with `beta grad z . n` continuous.
pub fn h1_local_basis(cut: &CutConfiguration, coeff: &CoefficientPair) -> Result<LocalNodalIFEBasis> {
    let h = cut.diameter();
    let o = cut.midpoint;
    let unknowns = [
        Linear { c: 1.0, g: Vector2::zeros(), origin: o },
        Linear { c: 0.0, g: Vector2::new(1.0 / h, 0.0), origin: o },
        Linear { c: 0.0, g: Vector2::new(0.0, 1.0 / h), origin: o },
    ];
    let pairs = unknowns.map(|z| [z, h1_extend(cut, &z, coeff)]);
    let mut m = Matrix3::zeros();
    for local in 0..3 {
        let side = cut.vertex_side(local);
        for (c, pair) in pairs.iter().enumerate() {
            m[(local, c)] = pair[side.index()].eval(cut.element_vertices[local]);
        }
    }
    let (inv, _) = inverse_with_rcond(&m, cut.element)?;
    let pieces = std::array::from_fn(|k| {
        let c: Vector3<f64> = inv.column(k).into();
        let minus = Linear { c: c[0], g: Vector2::new(c[1], c[2]) / h, origin: o };
        [minus, h1_extend(cut, &minus, coeff)]
    });
    Ok(LocalNodalIFEBasis { cut: cut.clone(), pieces })
}

fn pair_vector(pair: &[NdPoly; 2], o: Point, h: f64) -> [f64; 6] {
    let m = pair[0].reanchor(o);
    let p = pair[1].reanchor(o);
    [m.a.x, m.a.y, m.b * h, p.a.x, p.a.y, p.b * h]
}

/// Largest relative least-squares residual of `grad z_k` in `span{psi_i}`.
pub fn exact_sequence_residual(basis: &LocalEdgeBasis, nodal: &LocalNodalIFEBasis) -> f64 {
    let o = basis.cut.midpoint;
    let h = basis.cut.diameter();
    let cols: Vec<[f64; 6]> = basis.pieces.iter().map(|p| pair_vector(p, o, h)).collect();
    let a = DMatrix::from_fn(6, 3, |r, c| cols[c][r]);
    let svd = a.clone().svd(true, true);
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let grads = nodal.pieces[k].map(|z| NdPoly::new(z.g, 0.0, o));
        let target = DVector::from_row_slice(&pair_vector(&grads, o, h));
        let coef = svd.solve(&target, 1e-14).expect("svd with both factors");
        let res = (&a * coef - &target).norm() / target.norm().max(f64::MIN_POSITIVE);
        worst = worst.max(res);
    }
    worst
}

/// Edge DOFs of `grad z_k` from nodal differences (local CCW edges).
pub fn gradient_dofs(nodal: &LocalNodalIFEBasis, k: usize) -> [f64; 3] {
    std::array::from_fn(|j| nodal.nodal_value(k, (j + 2) % 3) - nodal.nodal_value(k, (j + 1) % 3))
}

/// Configuration of a right isosceles element relative to its apex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfSupCase {
    /// Apex at the right angle.
    RightAngleApex,
    /// Apex at an acute vertex.
    AcuteApex,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfSupDiagnostics {
    pub case: InfSupCase,
    /// `beta_far / beta_apex`
    pub rho: f64,
    /// Cut ratios in the canonical frame of the case.
    pub d: f64,
    pub e: f64,
    /// Eigenvalues of the symmetric part of the closed-form perturbation matrix.
    pub lambda: (f64, f64),
    /// Closed-form minimum of `u_far . Pi u` over unit curl-free `u`.
    pub predicted_min: f64,
    /// The same minimum computed from split edge integrals.
    pub observed_min: f64,
    /// Largest entry of the difference between the computed and closed-form matrices.
    pub closed_form_residual: f64,
}

/// Eigenvalues of the symmetric part of `A1 = de/(d^2+e^2) [[e, d], [e, d]]`.
pub fn case1_eigenvalues(d: f64, e: f64) -> (f64, f64) {
    let s = d * d + e * e;
    if s == 0.0 {
        return (0.0, 0.0);
    }
    let r = (2.0 * s).sqrt();
    (d * e * (d + e - r) / (2.0 * s), d * e * (d + e + r) / (2.0 * s))
}

fn sym_min_eig(m: &Matrix2<f64>) -> f64 {
    let s = 0.5 * (m + m.transpose());
    let tr = s.trace();
    let det = s.determinant();
    0.5 * tr - (0.25 * tr * tr - det).max(0.0).sqrt()
}

fn sym_eigs(m: &Matrix2<f64>) -> (f64, f64) {
    let s = 0.5 * (m + m.transpose());
    let tr = s.trace();
    let disc = (0.25 * tr * tr - s.determinant()).max(0.0).sqrt();
    (0.5 * tr - disc, 0.5 * tr + disc)
}

/// `Pi u` as a matrix acting on the far-side constant of a curl-free IFE function.
pub fn interpolation_matrix(cut: &CutConfiguration, coeff: &CoefficientPair) -> Matrix2<f64> {
    let rho = coeff.beta(cut.far_side()) / coeff.beta(cut.apex_side);
    let (t, n) = (cut.tangent, cut.normal);
    let s = t * t.transpose() + rho * n * n.transpose();
    let mut m = Matrix2::zeros();
    for k in 0..2 {
        let u_far = if k == 0 { Vector2::new(1.0, 0.0) } else { Vector2::new(0.0, 1.0) };
        let u_apex = s * u_far;
        let mut pair = [NdPoly::constant(u_far); 2];
        pair[cut.apex_side.index()] = NdPoly::constant(u_apex);
        // The interpolant is constant: solve c . (end - start) = dof in least squares.
        let mut lhs = Matrix2::zeros();
        let mut rhs = Vector2::zeros();
        for j in 0..3 {
            let (s0, s1) = local_edge(&cut.element_vertices, j);
            let tj = s1 - s0;
            let dof = split_edge_dof(cut, &pair, j);
            lhs += tj * tj.transpose();
            rhs += tj * dof;
        }
        let c = lhs.try_inverse().unwrap_or_else(Matrix2::zeros) * rhs;
        m.set_column(k, &c);
    }
    m
}

/// Local inf-sup quantities on a right isosceles interface element.
pub fn local_infsup_eigs(cut: &CutConfiguration, coeff: &CoefficientPair) -> Option<InfSupDiagnostics> {
    let v = cut.vertices;
    let right = (0..3).find(|&k| {
        let a = v[(k + 1) % 3] - v[k];
        let b = v[(k + 2) % 3] - v[k];
        a.dot(&b).abs() <= 1e-10 * a.norm() * b.norm()
    })?;
    let rho = coeff.beta(cut.far_side()) / coeff.beta(cut.apex_side);
    let m = interpolation_matrix(cut, coeff);
    let (case, frame_x, d, e) = if right == 0 {
        (InfSupCase::RightAngleApex, (v[1] - v[0]).normalize(), cut.d, cut.e)
    } else if right == 1 {
        (InfSupCase::AcuteApex, (v[1] - v[0]).normalize(), cut.d, cut.e)
    } else {
        (InfSupCase::AcuteApex, (v[2] - v[0]).normalize(), cut.e, cut.d)
    };
    // Orthonormal frame with the remaining vertex in the upper half plane.
    let other = if right == 2 { v[1] } else { v[2] };
    let mut frame_y = Vector2::new(-frame_x.y, frame_x.x);
    if (other - v[0]).dot(&frame_y) < 0.0 {
        frame_y = -frame_y;
    }
    let q = Matrix2::from_columns(&[frame_x, frame_y]);
    let m_frame = q.transpose() * m * q;
    let perturbation = match case {
        InfSupCase::RightAngleApex => {
            let s = d * d + e * e;
            d * e / s * Matrix2::new(e, d, e, d)
        }
        InfSupCase::AcuteApex => {
            let s = (d - e) * (d - e) + e * e;
            d * e / s * Matrix2::new(e, d - e, 0.0, 0.0)
        }
    };
    let predicted = Matrix2::identity() + (rho - 1.0) * perturbation;
    let lambda = sym_eigs(&perturbation);
    Some(InfSupDiagnostics {
        case,
        rho,
        d,
        e,
        lambda,
        predicted_min: sym_min_eig(&predicted),
        observed_min: sym_min_eig(&m),
        closed_form_residual: (m_frame - predicted).abs().max(),
    })
}
