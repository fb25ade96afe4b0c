//! Small dense complex matrices, a Hermitian eigensolver front end and pivoted Cholesky.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(CMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// `|v><v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let row = other.row(k);
                let out = &mut m.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(m)
    }

    pub fn mat_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("matrix difference".into()));
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, z: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |a_ij - conj(a_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> Result<Complex64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::ShapeMismatch("trace of product".into()));
        }
        let mut acc = Complex64::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self.get(i, j) * other.get(j, i);
            }
        }
        Ok(acc)
    }
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues in descending order and the
/// matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }
}

/// Wraps nalgebra's Hermitian eigensolver. Ties in the sorted spectrum keep the lower original
/// index, so the decomposition is deterministic.
pub fn hermitian_eigen(a: &CMatrix) -> Result<Eigen> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(
            "eigen-decomposition of a non-square matrix".into(),
        ));
    }
    let n = a.rows;
    // Symmetrize to kill rounding asymmetry.
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(a.get(i, i).re, 0.0)
        } else {
            (a.get(i, j) + a.get(j, i).conj()) * 0.5
        }
    });
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, k, eig.eigenvectors[(i, src)]);
        }
    }
    Ok(Eigen { values, vectors })
}

/// Low-rank factorization `a = sum_r f_r f_r^dagger` of a positive semidefinite matrix by
/// diagonally pivoted Cholesky. Stops once the residual diagonal is below `tol`; fails if the
/// matrix is not PSD within `tol`.
pub fn pivoted_cholesky(a: &CMatrix, tol: f64) -> Result<Vec<Vec<Complex64>>> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch("Cholesky of a non-square matrix".into()));
    }
    let n = a.rows;
    let mut diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    let mut factors: Vec<Vec<Complex64>> = Vec::new();
    while let Some((p, &dp)) = diag
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1).then(y.0.cmp(&x.0)))
    {
        if dp <= tol {
            break;
        }
        let root = dp.sqrt();
        let mut f: Vec<Complex64> = a.column(p);
        for g in &factors {
            let gp = g[p].conj();
            for (x, y) in f.iter_mut().zip(g) {
                *x -= y * gp;
            }
        }
        for x in f.iter_mut() {
            *x /= root;
        }
        for (d, x) in diag.iter_mut().zip(&f) {
            *d -= x.norm_sqr();
        }
        diag[p] = 0.0;
        factors.push(f);
        if factors.len() > n {
            break;
        }
    }
    if let Some(bad) = diag.iter().find(|&&x| x < -tol) {
        return Err(Error::ShapeMismatch(format!(
            "matrix is not positive semidefinite (residual {bad})"
        )));
    }
    Ok(factors)
}

/// Maximum entry of the residual `a - sum f f^dagger`; a PSD check companion to
/// [`pivoted_cholesky`].
pub fn factor_residual(a: &CMatrix, factors: &[Vec<Complex64>]) -> f64 {
    let n = a.rows;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let approx: Complex64 = factors.iter().map(|f| f[i] * f[j].conj()).sum();
            worst = worst.max((a.get(i, j) - approx).norm());
        }
    }
    worst
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<u|v>`.
pub fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check_decomposition(a: &CMatrix) {
        let e = hermitian_eigen(a).unwrap();
        let n = a.rows();
        for k in 0..n {
            let v = e.vector(k);
            let av = a.mat_vec(&v).unwrap();
            for i in 0..n {
                assert!((av[i] - v[i] * e.values[k]).norm() < 1e-12, "eigenpair {k}");
            }
            assert!((norm(&v) - 1.0).abs() < 1e-12);
        }
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let vv = e.vectors.adjoint().mul(&e.vectors).unwrap();
        assert!(vv.sub(&CMatrix::identity(n)).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn eigen_of_complex_hermitian() {
        let a = CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5)],
            vec![c(1.0, 1.0), c(-1.0, 0.0), c(0.3, 0.0)],
            vec![c(0.0, -0.5), c(0.3, 0.0), c(0.5, 0.0)],
        ])
        .unwrap();
        check_decomposition(&a);
        let sum: f64 = hermitian_eigen(&a).unwrap().values.iter().sum();
        assert!((sum - 1.5).abs() < 1e-12);
    }

    #[test]
    fn eigen_degenerate_and_diagonal() {
        check_decomposition(&CMatrix::identity(4));
        let a = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = hermitian_eigen(&a).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15 && (e.values[1] + 1.0).abs() < 1e-15);
        check_decomposition(&a);
    }

    #[test]
    fn cholesky_recovers_low_rank() {
        let u = vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, -0.5)];
        let w = vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 1.0)];
        let mut a = CMatrix::outer(&u);
        let b = CMatrix::outer(&w);
        a = CMatrix::from_rows(
            &(0..3)
                .map(|i| (0..3).map(|j| a.get(i, j) + b.get(i, j)).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let f = pivoted_cholesky(&a, 1e-12).unwrap();
        assert_eq!(f.len(), 2);
        assert!(factor_residual(&a, &f) < 1e-12);
        let neg = CMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(pivoted_cholesky(&neg, 1e-12).is_err());
    }
}
