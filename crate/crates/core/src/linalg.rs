//! Dense matrices and subspaces over a [`FieldSpec`]. Elimination pivots on
//! the first nonzero entry so echelon forms are reproducible.

use std::fmt;

use crate::field::{FieldElement, FieldSpec};

/// A column vector in some fixed basis.
pub type Vector = Vec<FieldElement>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} over {}", self.rows, self.cols, self.spec)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = FieldElement;
    fn index(&self, (i, j): (usize, usize)) -> &FieldElement {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElement {
        &mut self.data[i * self.cols + j]
    }
}

impl Mat {
    pub fn zeros(spec: FieldSpec, rows: usize, cols: usize) -> Mat {
        Mat { spec, rows, cols, data: vec![spec.zero(); rows * cols] }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Mat {
        let mut m = Mat::zeros(spec, n, n);
        for i in 0..n {
            m[(i, i)] = spec.one();
        }
        m
    }

    pub fn from_rows(spec: FieldSpec, rows: &[Vector]) -> Mat {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Mat::zeros(spec, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, x) in r.iter().enumerate() {
                m[(i, j)] = *x;
            }
        }
        m
    }

    /// Columns given as vectors; `n` is the column length, needed when `cols` is empty.
    pub fn from_cols(spec: FieldSpec, n: usize, cols: &[Vector]) -> Mat {
        let mut m = Mat::zeros(spec, n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "column length");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = *x;
            }
        }
        m
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
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

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| if i == j { self[(i, j)].is_one() } else { self[(i, j)].is_zero() }))
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.spec, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| *a + *b).collect();
        Mat { spec: self.spec, rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: FieldElement) -> Mat {
        let data = self.data.iter().map(|a| *a * c).collect();
        Mat { spec: self.spec, rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "inner dimension");
        let mut p = Mat::zeros(self.spec, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o[(k, j)];
                    if !b.is_zero() {
                        p[(i, j)] = p[(i, j)] + a * b;
                    }
                }
            }
        }
        p
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vector {
        assert_eq!(self.cols, v.len(), "vector length");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.spec.zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self[(i, j)];
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc + a * *x;
                    }
                }
                acc
            })
            .collect()
    }

    /// Sub-block with the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.spec, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)];
            }
        }
        m
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    let t = m[(p, j)];
                    m[(p, j)] = m[(r, j)];
                    m[(r, j)] = t;
                }
            }
            let inv = m[(r, c)].inv();
            for j in 0..m.cols {
                m[(r, j)] = m[(r, j)] * inv;
            }
            for i in 0..m.rows {
                if i != r {
                    let f = m[(i, c)];
                    if !f.is_zero() {
                        for j in 0..m.cols {
                            let v = m[(r, j)];
                            if !v.is_zero() {
                                m[(i, j)] = m[(i, j)] + f * v;
                            }
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of {x : Mx = 0}, one vector per free column, in column order.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![self.spec.zero(); self.cols];
            v[free] = self.spec.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = r[(row, free)];
            }
            out.push(v);
        }
        out
    }

    /// One solution of Mx = b, if any.
    pub fn solve(&self, b: &[FieldElement]) -> Option<Vector> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Mat::zeros(self.spec, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, self.cols)] = b[i];
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.spec.zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let mut aug = Mat::zeros(self.spec, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, n + i)] = self.spec.one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let idx: Vec<usize> = (0..n).collect();
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(r.select(&idx, &cols))
    }

    /// Basis of the column space drawn from the columns themselves (pivot columns).
    pub fn column_space(&self) -> Subspace {
        Subspace::span(self.spec, self.rows, &self.columns())
    }
}

/// Elimination of a fixed coefficient matrix, reusable across right-hand sides.
#[derive(Clone, Debug)]
pub struct Solver {
    /// row operations taking the matrix to its RREF
    ops: Mat,
    pivots: Vec<usize>,
    cols: usize,
}

impl Solver {
    pub fn new(a: &Mat) -> Solver {
        let (r, c) = (a.rows(), a.cols());
        let mut aug = Mat::zeros(a.spec(), r, c + r);
        for i in 0..r {
            for j in 0..c {
                aug[(i, j)] = a[(i, j)];
            }
            aug[(i, c + i)] = a.spec().one();
        }
        let (red, piv) = aug.rref();
        let pivots: Vec<usize> = piv.into_iter().filter(|&p| p < c).collect();
        let rows: Vec<usize> = (0..r).collect();
        let ops_cols: Vec<usize> = (c..c + r).collect();
        Solver { ops: red.select(&rows, &ops_cols), pivots, cols: c }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// One solution of Ax = b, free variables set to zero.
    pub fn solve(&self, b: &[FieldElement]) -> Option<Vector> {
        let eb = self.ops.mul_vec(b);
        if eb[self.pivots.len()..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let spec = self.ops.spec();
        let mut x = vec![spec.zero(); self.cols];
        for (row, &pc) in self.pivots.iter().enumerate() {
            x[pc] = eb[row];
        }
        Some(x)
    }
}

/// A subspace of k^n held by its canonical reduced echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    spec: FieldSpec,
    ambient: usize,
    /// rows of the RREF, nonzero only
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(spec: FieldSpec, ambient: usize) -> Subspace {
        Subspace { spec, ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(spec: FieldSpec, ambient: usize) -> Subspace {
        Subspace::span(spec, ambient, &Mat::identity(spec, ambient).columns())
    }

    pub fn span(spec: FieldSpec, ambient: usize, vectors: &[Vector]) -> Subspace {
        if vectors.is_empty() {
            return Subspace::zero(spec, ambient);
        }
        let (r, pivots) = Mat::from_rows(spec, vectors).rref();
        let basis = (0..pivots.len()).map(|i| r.row(i)).collect();
        Subspace { spec, ambient, basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// Canonical (reduced echelon) basis.
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let f = w[p];
            if !f.is_zero() {
                for (x, y) in w.iter_mut().zip(row) {
                    *x = *x + f * *y;
                }
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    pub fn contains_subspace(&self, o: &Subspace) -> bool {
        o.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, o: &Subspace) -> Subspace {
        let mut all = self.basis.clone();
        all.extend(o.basis.iter().cloned());
        Subspace::span(self.spec, self.ambient, &all)
    }

    pub fn intersection(&self, o: &Subspace) -> Subspace {
        // a in span(A), b in span(B) with a = b: kernel of [A^T | B^T]
        let (a, b) = (self.dim(), o.dim());
        if a == 0 || b == 0 {
            return Subspace::zero(self.spec, self.ambient);
        }
        let mut cols = self.basis.clone();
        cols.extend(o.basis.iter().cloned());
        let m = Mat::from_cols(self.spec, self.ambient, &cols);
        let vecs: Vec<Vector> = m
            .kernel()
            .iter()
            .map(|k| {
                let mut v = vec![self.spec.zero(); self.ambient];
                for i in 0..a {
                    for (x, y) in v.iter_mut().zip(&self.basis[i]) {
                        *x = *x + k[i] * *y;
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.spec, self.ambient, &vecs)
    }

    /// Extend `self`'s basis by standard basis vectors to a basis of k^n; returns the added vectors.
    pub fn complement_basis(&self) -> Vec<Vector> {
        (0..self.ambient)
            .filter(|j| !self.pivots.contains(j))
            .map(|j| {
                let mut e = vec![self.spec.zero(); self.ambient];
                e[j] = self.spec.one();
                e
            })
            .collect()
    }
}

pub fn vec_add(a: &[FieldElement], b: &[FieldElement]) -> Vector {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

pub fn vec_scale(c: FieldElement, a: &[FieldElement]) -> Vector {
    a.iter().map(|x| c * *x).collect()
}

pub fn unit(spec: FieldSpec, n: usize, i: usize) -> Vector {
    let mut e = vec![spec.zero(); n];
    e[i] = spec.one();
    e
}
