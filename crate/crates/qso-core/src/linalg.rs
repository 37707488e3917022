//! Dense matrices over a coefficient ring: products, row reduction, rank,
//! kernels and generalized eigenspaces. Exact rings use exact zero tests;
//! complex matrices take an absolute tolerance.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ring::Coeff;

#[derive(Clone, PartialEq)]
pub struct Matrix<C> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Coeff> fmt::Debug for Matrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

fn negligible<C: Coeff>(c: &C, tol: f64) -> bool {
    if tol == 0.0 {
        c.is_zero()
    } else {
        c.magnitude() <= tol
    }
}

impl<C: Coeff> Matrix<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Domain("ragged matrix".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(rows: usize, cols: &[Vec<C>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn diagonal(d: &[C]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
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

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<C>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> Result<D>) -> Result<Matrix<D>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn mul(&self, o: &Matrix<C>) -> Result<Matrix<C>> {
        if self.cols != o.rows {
            return Err(Error::Domain(format!(
                "size mismatch {}x{} * {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut r: Matrix<C> = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = r.get(i, j).add(&a.mul(b));
                    r.set(i, j, v);
                }
            }
        }
        Ok(r)
    }

    pub fn mul_vec(&self, v: &[C]) -> Vec<C> {
        (0..self.rows)
            .map(|i| {
                let mut acc = C::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc.add(&a.mul(x));
                    }
                }
                acc
            })
            .collect()
    }

    fn zip(&self, o: &Matrix<C>, f: impl Fn(&C, &C) -> C) -> Result<Matrix<C>> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Domain("size mismatch".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, o: &Matrix<C>) -> Result<Matrix<C>> {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Matrix<C>) -> Result<Matrix<C>> {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn scale(&self, k: &C) -> Matrix<C> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul(k)).collect(),
        }
    }

    /// `self - mu * I`.
    pub fn shift(&self, mu: &C) -> Matrix<C> {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = m.get(i, i).sub(mu);
            m.set(i, i, v);
        }
        m
    }

    pub fn transpose(&self) -> Matrix<C> {
        let mut m = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Coeff::is_zero)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C {
        let mut t = C::zero();
        for i in 0..self.rows.min(self.cols) {
            t = t.add(self.get(i, i));
        }
        t
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, tol: f64) -> Result<(Matrix<C>, Vec<usize>)> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best = None;
            let mut best_mag = -1.0;
            for i in r..m.rows {
                let x = m.get(i, c);
                if negligible(x, tol) {
                    continue;
                }
                let mag = x.magnitude();
                if best.is_none() || (tol > 0.0 && mag > best_mag) {
                    best = Some(i);
                    best_mag = mag;
                }
            }
            let Some(p) = best else {
                for i in r..m.rows {
                    m.set(i, c, C::zero());
                }
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = C::one().div(m.get(r, c))?;
            for j in c..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let rj = m.get(r, j);
                    if rj.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).sub(&f.mul(rj));
                    m.set(i, j, v);
                }
                m.set(i, c, C::zero());
            }
            pivots.push(c);
            r += 1;
        }
        Ok((m, pivots))
    }

    pub fn rank(&self, tol: f64) -> Result<usize> {
        Ok(self.rref(tol)?.1.len())
    }

    /// Basis of the right kernel, as columns.
    pub fn kernel(&self, tol: f64) -> Result<Vec<Vec<C>>> {
        let (r, piv) = self.rref(tol)?;
        let mut out = Vec::new();
        for f in 0..self.cols {
            if piv.contains(&f) {
                continue;
            }
            let mut v = vec![C::zero(); self.cols];
            v[f] = C::one();
            for (row, &p) in piv.iter().enumerate() {
                v[p] = r.get(row, f).neg();
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Solve `self * x = b` for a consistent system; picks the solution with
    /// free variables zero.
    pub fn solve(&self, b: &[C], tol: f64) -> Result<Vec<C>> {
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, piv) = aug.rref(tol)?;
        if piv.contains(&self.cols) {
            return Err(Error::Domain("inconsistent linear system".into()));
        }
        let mut x = vec![C::zero(); self.cols];
        for (row, &p) in piv.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Ok(x)
    }

    /// Columns of `basis` span an invariant subspace; return the matrix of
    /// `self` restricted to it in that basis.
    pub fn restrict(&self, basis: &[Vec<C>], tol: f64) -> Result<Matrix<C>> {
        let k = Matrix::from_cols(self.rows, basis);
        let mut cols = Vec::with_capacity(basis.len());
        for b in basis {
            cols.push(k.solve(&self.mul_vec(b), tol)?);
        }
        Ok(Matrix::from_cols(basis.len(), &cols))
    }

    /// Basis of the generalized eigenspace `ker (self - mu)^dim`.
    pub fn generalized_eigenspace(&self, mu: &C, tol: f64) -> Result<Vec<Vec<C>>> {
        let a = self.shift(mu);
        let mut p = a.clone();
        let mut last = p.rank(tol)?;
        while last > 0 {
            p = p.mul(&a)?;
            let r = p.rank(tol)?;
            if r == last {
                break;
            }
            last = r;
        }
        p.kernel(tol)
    }

    /// Basis of the row space of the given vectors.
    pub fn span_basis(vectors: &[Vec<C>], dim: usize, tol: f64) -> Result<Vec<Vec<C>>> {
        if vectors.is_empty() {
            return Ok(Vec::new());
        }
        let m = Matrix::from_rows(vectors.to_vec())?;
        let (r, piv) = m.rref(tol)?;
        Ok((0..piv.len()).map(|i| r.row(i)[..dim].to_vec()).collect())
    }
}

impl Matrix<Complex64> {
    pub fn adjoint(&self) -> Matrix<Complex64> {
        let mut m = self.transpose();
        for x in m.data.iter_mut() {
            *x = x.conj();
        }
        m
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<Complex64>) -> Self {
        let mut r = Matrix::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                r.set(i, j, m[(i, j)]);
            }
        }
        r
    }

    pub fn inverse(&self) -> Result<Matrix<Complex64>> {
        self.to_nalgebra()
            .try_inverse()
            .map(|m| Matrix::from_nalgebra(&m))
            .ok_or_else(|| Error::Domain("singular matrix".into()))
    }

    /// Eigenvalues via the complex Schur form.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        if !self.is_square() {
            return Err(Error::Domain("eigenvalues of a non-square matrix".into()));
        }
        if self.rows == 0 {
            return Ok(Vec::new());
        }
        let s = nalgebra::linalg::Schur::new(self.to_nalgebra());
        let (_, t) = s.unpack();
        Ok((0..self.rows).map(|i| t[(i, i)]).collect())
    }
}

/// Residuals of the defining relations for matrices `b[0] = B_1, b[1] = B_2, ...`:
/// `B_i^2 B_j - [2] B_i B_j B_i + B_j B_i^2 - B_j` when `|i - j| = 1` and
/// `B_i B_j - B_j B_i` when `|i - j| > 1`. Labels are 1-based `(i, j)`.
pub fn relation_residuals<C: Coeff>(
    b: &[Matrix<C>],
    two: &C,
) -> Result<Vec<((usize, usize), Matrix<C>)>> {
    let k = b.len();
    if let Some(first) = b.first() {
        if b.iter().any(|m| !m.is_square() || m.rows() != first.rows()) {
            return Err(Error::Domain("generator matrices differ in size".into()));
        }
    }
    let mut out = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let (bi, bj) = (&b[i], &b[j]);
            if i.abs_diff(j) == 1 {
                let bij = bi.mul(bj)?;
                let t1 = bi.mul(&bij)?;
                let t2 = bij.mul(bi)?.scale(two);
                let t3 = bj.mul(bi)?.mul(bi)?;
                let r = t1.sub(&t2)?.add(&t3)?.sub(bj)?;
                out.push(((i + 1, j + 1), r));
            } else if i < j {
                let r = bi.mul(bj)?.sub(&bj.mul(bi)?)?;
                out.push(((i + 1, j + 1), r));
            }
        }
    }
    Ok(out)
}

/// Group complex numbers into clusters of diameter below `tol`, returning
/// (representative, count) pairs.
pub fn cluster(values: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for v in values {
        match out.iter_mut().find(|(c, _)| (c - v).norm() < tol) {
            Some(e) => e.1 += 1,
            None => out.push((*v, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::GaussRat;

    fn g(n: i64) -> GaussRat {
        GaussRat::from_int(n)
    }

    #[test]
    fn rank_and_kernel() {
        let m = Matrix::from_rows(vec![
            vec![g(1), g(2), g(3)],
            vec![g(2), g(4), g(6)],
            vec![g(0), g(1), g(1)],
        ])
        .unwrap();
        assert_eq!(m.rank(0.0).unwrap(), 2);
        let k = m.kernel(0.0).unwrap();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(GaussRat::is_zero));
    }

    #[test]
    fn generalized_eigenspace_of_jordan_block() {
        let m = Matrix::from_rows(vec![
            vec![g(2), g(1), g(0)],
            vec![g(0), g(2), g(0)],
            vec![g(0), g(0), g(5)],
        ])
        .unwrap();
        assert_eq!(m.generalized_eigenspace(&g(2), 0.0).unwrap().len(), 2);
        assert_eq!(m.generalized_eigenspace(&g(5), 0.0).unwrap().len(), 1);
        assert_eq!(m.generalized_eigenspace(&g(3), 0.0).unwrap().len(), 0);
    }

    #[test]
    fn complex_eigenvalues() {
        let i = Complex64::new(0.0, 1.0);
        let m = Matrix::from_rows(vec![
            vec![Complex64::new(0.0, 0.0), -i],
            vec![i, Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        let mut ev: Vec<f64> = m.eigenvalues().unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
    }
}
