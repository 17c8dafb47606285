//! Sparse direct and preconditioned GMRES solves.

use std::fmt;
use std::str::FromStr;

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};

use crate::assembly::LinearSystem;
use crate::error::{Error, Result};
use crate::sparse::{norm2, CsrMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverMethod {
    Direct,
    Iterative,
}

impl SolverMethod {
    pub fn name(self) -> &'static str {
        match self {
            SolverMethod::Direct => "direct",
            SolverMethod::Iterative => "iterative",
        }
    }
}

impl fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "direct" => Ok(SolverMethod::Direct),
            "iterative" | "gmres" => Ok(SolverMethod::Iterative),
            other => Err(Error::Config(format!("unknown solver method '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub method: SolverMethod,
    /// Relative residual target `|Ax - b| / |b|`.
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { method: SolverMethod::Direct, tol: 1e-10, max_iter: 20_000, restart: 200 }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub relative_residual: f64,
    /// Krylov iterations, or refinement steps for the direct path.
    pub iterations: usize,
    pub method: SolverMethod,
}

pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    norm2(&r) / norm2(b).max(f64::MIN_POSITIVE)
}

pub fn solve(system: &LinearSystem, opts: &SolverOptions) -> Result<SolveReport> {
    let a = &system.matrix;
    if a.nrows != a.ncols || a.nrows != system.rhs.len() {
        return Err(Error::SolverBreakdown(format!("system is {}x{} with rhs of length {}", a.nrows, a.ncols, system.rhs.len())));
    }
    if norm2(&system.rhs) == 0.0 {
        return Ok(SolveReport { solution: vec![0.0; a.nrows], relative_residual: 0.0, iterations: 0, method: opts.method });
    }
    match opts.method {
        SolverMethod::Direct => solve_direct(a, &system.rhs, opts.tol),
        SolverMethod::Iterative => gmres(a, &system.rhs, opts),
    }
}

fn solve_direct(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<SolveReport> {
    let n = a.nrows;
    let triplets: Vec<Triplet<usize, usize, f64>> = a.triplets().into_iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::SolverBreakdown(format!("sparse matrix construction failed: {e:?}")))?;
    let lu = mat.sp_lu().map_err(|e| Error::SolverBreakdown(format!("sparse LU failed: {e:?}")))?;
    let lu_solve = |rhs: &[f64]| -> Vec<f64> {
        let mut col = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        lu.solve_in_place(col.as_mut());
        (0..n).map(|i| col[(i, 0)]).collect()
    };
    let mut x = lu_solve(b);
    let mut res = relative_residual(a, &x, b);
    let mut steps = 0;
    while !(res <= tol) && steps < 5 {
        let ax = a.matvec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let dx = lu_solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        res = relative_residual(a, &x, b);
        steps += 1;
    }
    if !res.is_finite() || res > tol {
        return Err(Error::SolverBreakdown(format!("direct solve reached relative residual {res:.3e} > {tol:.1e}")));
    }
    Ok(SolveReport { solution: x, relative_residual: res, iterations: steps, method: SolverMethod::Direct })
}

/// Preconditioner applied on the right.
enum Preconditioner {
    Jacobi(Vec<f64>),
    Ilu0(Ilu0),
}

impl Preconditioner {
    fn apply(&self, r: &[f64]) -> Vec<f64> {
        match self {
            Preconditioner::Jacobi(d) => r.iter().zip(d).map(|(ri, di)| ri / di).collect(),
            Preconditioner::Ilu0(f) => f.solve(r),
        }
    }
}

/// Incomplete LU with the sparsity of `A`; `values` hold `L` (unit diagonal, strict lower) and `U`.
pub struct Ilu0 {
    pattern: CsrMatrix,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows;
        let mut f = a.clone();
        let mut diag = vec![usize::MAX; n];
        for r in 0..n {
            for k in f.indptr[r]..f.indptr[r + 1] {
                if f.indices[k] == r {
                    diag[r] = k;
                }
            }
            if diag[r] == usize::MAX {
                return Err(Error::SolverBreakdown(format!("ILU(0): row {r} has no diagonal entry")));
            }
        }
        let mut pos = vec![usize::MAX; n];
        for r in 0..n {
            let (start, end) = (f.indptr[r], f.indptr[r + 1]);
            for k in start..end {
                pos[f.indices[k]] = k;
            }
            for k in start..end {
                let c = f.indices[k];
                if c >= r {
                    break;
                }
                let piv = f.values[diag[c]];
                if piv == 0.0 {
                    return Err(Error::SolverBreakdown(format!("ILU(0): zero pivot in row {c}")));
                }
                let l = f.values[k] / piv;
                f.values[k] = l;
                for kk in diag[c] + 1..f.indptr[c + 1] {
                    let cc = f.indices[kk];
                    if pos[cc] != usize::MAX {
                        f.values[pos[cc]] -= l * f.values[kk];
                    }
                }
            }
            for k in start..end {
                pos[f.indices[k]] = usize::MAX;
            }
            if f.values[diag[r]] == 0.0 {
                return Err(Error::SolverBreakdown(format!("ILU(0): zero pivot in row {r}")));
            }
        }
        Ok(Self { pattern: f, diag })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let f = &self.pattern;
        let n = f.nrows;
        let mut y = b.to_vec();
        for r in 0..n {
            let mut s = y[r];
            for k in f.indptr[r]..self.diag[r] {
                s -= f.values[k] * y[f.indices[k]];
            }
            y[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = y[r];
            for k in self.diag[r] + 1..f.indptr[r + 1] {
                s -= f.values[k] * y[f.indices[k]];
            }
            y[r] = s / f.values[self.diag[r]];
        }
        y
    }
}

fn gmres(a: &CsrMatrix, b: &[f64], opts: &SolverOptions) -> Result<SolveReport> {
    let n = a.nrows;
    let precond = match Ilu0::new(a) {
        Ok(f) => Preconditioner::Ilu0(f),
        Err(_) => {
            let d = a.diagonal();
            if d.iter().any(|&v| v == 0.0) {
                return Err(Error::SolverBreakdown("zero diagonal entry; no usable preconditioner".into()));
            }
            Preconditioner::Jacobi(d)
        }
    };
    let bnorm = norm2(b);
    let m = opts.restart.max(1);
    let mut x = vec![0.0; n];
    let mut iterations = 0;
    loop {
        let ax = a.matvec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm2(&r);
        if beta / bnorm <= opts.tol {
            return Ok(SolveReport { solution: x, relative_residual: beta / bnorm, iterations, method: SolverMethod::Iterative });
        }
        if iterations >= opts.max_iter {
            return Err(Error::SolverBreakdown(format!("GMRES stalled at relative residual {:.3e} after {iterations} iterations", beta / bnorm)));
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            iterations += 1;
            let z = precond.apply(&basis[k]);
            let mut w = a.matvec(&z);
            for (j, vj) in basis.iter().enumerate() {
                let hj: f64 = w.iter().zip(vj).map(|(a, b)| a * b).sum();
                h[j][k] = hj;
                for (wi, vi) in w.iter_mut().zip(vj) {
                    *wi -= hj * vi;
                }
            }
            let wn = norm2(&w);
            h[k + 1][k] = wn;
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let denom = (h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]).sqrt();
            if denom == 0.0 {
                return Err(Error::SolverBreakdown("GMRES breakdown (zero Hessenberg column)".into()));
            }
            cs[k] = h[k][k] / denom;
            sn[k] = h[k + 1][k] / denom;
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            if g[k + 1].abs() / bnorm <= 0.1 * opts.tol || wn == 0.0 || iterations >= opts.max_iter {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        // Back substitution for the Krylov coefficients.
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let s: f64 = (i + 1..k_used).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        let mut update = vec![0.0; n];
        for (yi, vi) in y.iter().zip(&basis) {
            for (u, v) in update.iter_mut().zip(vi) {
                *u += yi * v;
            }
        }
        let dz = precond.apply(&update);
        for (xi, di) in x.iter_mut().zip(&dz) {
            *xi += di;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(rows: &[Vec<f64>], rhs: Vec<f64>) -> LinearSystem {
        LinearSystem { matrix: CsrMatrix::from_dense(rows), rhs }
    }

    #[test]
    fn identity_returns_rhs() {
        let sys = LinearSystem { matrix: CsrMatrix::identity(4), rhs: vec![1.0, -2.0, 3.0, 0.5] };
        for method in [SolverMethod::Direct, SolverMethod::Iterative] {
            let rep = solve(&sys, &SolverOptions { method, ..Default::default() }).unwrap();
            assert_eq!(rep.solution, sys.rhs);
        }
    }

    #[test]
    fn two_by_two_hand_solve() {
        let sys = system(&[vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 4.0]);
        for method in [SolverMethod::Direct, SolverMethod::Iterative] {
            let rep = solve(&sys, &SolverOptions { method, ..Default::default() }).unwrap();
            assert!((rep.solution[0] - 1.0).abs() < 1e-12 && (rep.solution[1] - 1.0).abs() < 1e-12);
            assert!(rep.relative_residual <= 1e-10);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let sys = system(&[vec![2.0, 1.0], vec![1.0, 3.0]], vec![0.0, 0.0]);
        assert_eq!(solve(&sys, &SolverOptions::default()).unwrap().solution, vec![0.0, 0.0]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let sys = system(&[vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 0.0]);
        assert!(matches!(solve(&sys, &SolverOptions::default()), Err(Error::SolverBreakdown(_))));
    }

    #[test]
    fn nonsymmetric_convection_diffusion_agree() {
        let n = 200;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0));
            if i > 0 {
                t.push((i, i - 1, -1.7));
            }
            if i + 1 < n {
                t.push((i, i + 1, -0.3));
            }
            if i + 20 < n {
                t.push((i, i + 20, 0.5));
            }
        }
        let sys = LinearSystem { matrix: CsrMatrix::from_triplets(n, n, t), rhs: (0..n).map(|i| (i as f64).sin()).collect() };
        let d = solve(&sys, &SolverOptions::default()).unwrap();
        let it = solve(&sys, &SolverOptions { method: SolverMethod::Iterative, restart: 10, ..Default::default() }).unwrap();
        assert!(it.iterations > 0);
        let diff = d.solution.iter().zip(&it.solution).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-9);
        let again = solve(&sys, &SolverOptions::default()).unwrap();
        assert_eq!(d.solution, again.solution);
    }

    #[test]
    fn ilu0_is_exact_for_triangular_pattern() {
        let a = CsrMatrix::from_dense(&[vec![4.0, 1.0, 0.0], vec![2.0, 5.0, 1.0], vec![0.0, 3.0, 6.0]]);
        let f = Ilu0::new(&a).unwrap();
        let x = f.solve(&a.matvec(&[1.0, 2.0, 3.0]));
        for (xi, e) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((xi - e).abs() < 1e-14);
        }
    }
}
