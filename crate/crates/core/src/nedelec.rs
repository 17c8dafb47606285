//! Lowest-order Nedelec functions `a + b (y - o_y, -(x - o_x))`, Piola maps and edge DOFs.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::interface::{Classification, Side};
use crate::mesh::{MeshTopology, Point};
use crate::quadrature::segment_rule;

/// `R[x] = (x_2, -x_1)`.
pub fn perp(v: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(v.y, -v.x)
}

/// Member of the local Nedelec space, anchored at `origin` for conditioning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NdPoly {
    pub a: Vector2<f64>,
    pub b: f64,
    pub origin: Point,
}

impl NdPoly {
    pub fn new(a: Vector2<f64>, b: f64, origin: Point) -> Self {
        Self { a, b, origin }
    }

    pub fn constant(a: Vector2<f64>) -> Self {
        Self::new(a, 0.0, Point::zeros())
    }

    pub fn zero() -> Self {
        Self::constant(Vector2::zeros())
    }

    pub fn eval(&self, x: Point) -> Vector2<f64> {
        self.a + self.b * perp(x - self.origin)
    }

    pub fn curl(&self) -> f64 {
        -2.0 * self.b
    }

    /// Same function, new anchor.
    pub fn reanchor(&self, origin: Point) -> Self {
        Self { a: self.eval(origin), b: self.b, origin }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { a: s * self.a, b: s * self.b, origin: self.origin }
    }

    pub fn add(&self, other: &NdPoly) -> Self {
        let o = other.reanchor(self.origin);
        Self { a: self.a + o.a, b: self.b + o.b, origin: self.origin }
    }

    /// Exact `int_{p0}^{p1} v . t ds` with `t` the unit direction of the segment.
    pub fn edge_integral(&self, p0: Point, p1: Point) -> f64 {
        self.eval(0.5 * (p0 + p1)).dot(&(p1 - p0))
    }
}

/// Reference basis on `(0,0), (1,0), (0,1)`; edge `i` is opposite vertex `i`.
pub fn reference_basis(i: usize) -> Result<NdPoly> {
    let o = Point::zeros();
    match i {
        0 => Ok(NdPoly::new(Vector2::zeros(), -1.0, o)),
        1 => Ok(NdPoly::new(Vector2::new(0.0, -1.0), -1.0, o)),
        2 => Ok(NdPoly::new(Vector2::new(1.0, 0.0), -1.0, o)),
        _ => Err(Error::IndexOutOfRange { what: "reference basis", index: i, len: 3 }),
    }
}

pub fn reference_vertices() -> [Point; 3] {
    [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)]
}

/// `z(X) = B^{-T} z_hat(B^{-1}(X - shift))`.
pub fn piola_push(jacobian: &Matrix2<f64>, shift: Point, z_hat: &NdPoly) -> Result<NdPoly> {
    let det = jacobian.determinant();
    let scale = jacobian.norm_squared().max(f64::MIN_POSITIVE);
    if det.abs() <= 1e-14 * scale {
        return Err(Error::SingularJacobian { det });
    }
    let inv_t = jacobian.try_inverse().ok_or(Error::SingularJacobian { det })?.transpose();
    Ok(NdPoly::new(inv_t * z_hat.a, z_hat.b / det, shift + jacobian * z_hat.origin))
}

/// `int_{p0}^{p1} v . t ds` by Gauss quadrature of the given degree.
pub fn edge_dof<F: Fn(Point) -> Vector2<f64>>(v: F, p0: Point, p1: Point, degree: usize) -> f64 {
    let t = (p1 - p0).normalize();
    segment_rule(degree, p0, p1).integrate(|x| v(x).dot(&t))
}

/// Local edge `j` of `tri` as (start, end), counter-clockwise.
pub fn local_edge(tri: &[Point; 3], j: usize) -> (Point, Point) {
    (tri[(j + 1) % 3], tri[(j + 2) % 3])
}

/// Standard basis on a counter-clockwise triangle with local CCW tangents.
pub fn standard_local_basis(tri: [Point; 3]) -> Result<[NdPoly; 3]> {
    let origin = (tri[0] + tri[1] + tri[2]) / 3.0;
    let h = (tri[1] - tri[0]).norm().max((tri[2] - tri[1]).norm()).max((tri[0] - tri[2]).norm());
    let monomials = [
        NdPoly::new(Vector2::new(1.0, 0.0), 0.0, origin),
        NdPoly::new(Vector2::new(0.0, 1.0), 0.0, origin),
        NdPoly::new(Vector2::zeros(), 1.0 / h, origin),
    ];
    let mut g = Matrix3::zeros();
    for j in 0..3 {
        let (s, e) = local_edge(&tri, j);
        for (c, m) in monomials.iter().enumerate() {
            g[(j, c)] = m.edge_integral(s, e);
        }
    }
    let det = g.determinant();
    let inv = g.try_inverse().ok_or(Error::SingularJacobian { det })?;
    Ok(std::array::from_fn(|i| {
        let c: Vector3<f64> = inv.column(i).into();
        NdPoly::new(Vector2::new(c[0], c[1]), c[2] / h, origin)
    }))
}

/// Vector field given separately on each side of the interface.
pub trait PiecewiseField: Send + Sync {
    fn value(&self, x: Point, side: Side) -> Vector2<f64>;

    fn curl(&self, x: Point, side: Side) -> f64;
}

/// Global edge DOFs `int_e u . t` with `t` pointing from the lower to the higher node,
/// each edge split at its interface crossing.
pub fn interpolate(field: &dyn PiecewiseField, mesh: &MeshTopology, cls: &Classification, degree: usize) -> Vec<f64> {
    (0..mesh.num_edges())
        .map(|g| {
            cls.global_edge_pieces(mesh, g)
                .into_iter()
                .filter(|(p0, p1, _)| (p1 - p0).norm() > 0.0)
                .map(|(p0, p1, side)| edge_dof(|x| field.value(x, side), p0, p1, degree))
                .sum()
        })
        .collect()
}
