use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{rat_int, Integer, Rational};

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::Input("empty matrix".into()));
        }
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::Dimension { expected: c, got: bad.len() });
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Convenience for tests and literals.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat_int(v)).collect()).collect()).expect("well-formed literal")
    }

    pub fn from_integer_rows(rows: &[Vec<Integer>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().cloned().map(rat_int).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Rational>]) -> Result<Self> {
        Ok(Self::from_rows(cols.to_vec())?.transpose())
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

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a * &other[(k, j)];
                    out[(i, j)] += p;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn mul_int_vec(&self, v: &[Integer]) -> Result<Vec<Rational>> {
        let v: Vec<Rational> = v.iter().cloned().map(rat_int).collect();
        self.mul_vec(&v)
    }

    pub fn scaled(&self, s: &Rational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|e| e * s).collect() }
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|e| e.is_integer())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Exactly one nonzero entry in every row and every column.
    pub fn is_monomial(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).filter(|&j| !self[(i, j)].is_zero()).count() == 1)
            && (0..self.cols).all(|j| (0..self.rows).filter(|&i| !self[(i, j)].is_zero()).count() == 1)
    }

    pub fn to_integer_rows(&self) -> Result<Vec<Vec<Integer>>> {
        if !self.is_integral() {
            return Err(Error::NotIntegral);
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().map(|e| e.to_integer()).collect()).collect())
    }

    /// Exact determinant by Bareiss fraction-free elimination.
    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut sign = Rational::one();
        let mut prev = Rational::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(Rational::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
                a[i][k] = Rational::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = Matrix::identity(n).to_rows();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::Rank)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] /= &p;
                inv[col][j] /= &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    let (x, y) = (&a[col][j] * &f, &inv[col][j] * &f);
                    a[r][j] -= x;
                    inv[r][j] -= y;
                }
            }
        }
        Matrix::from_rows(inv)
    }

    /// Solves `self * x = b` for nonsingular square `self`.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        self.inverse()?.mul_vec(b)
    }

    pub fn rank(&self) -> usize {
        rank_of_rows(&self.to_rows())
    }

    pub fn abs_determinant(&self) -> Result<Rational> {
        Ok(self.determinant()?.abs())
    }
}

/// Rank of a list of rational row vectors.
pub fn rank_of_rows(rows: &[Vec<Rational>]) -> usize {
    let mut echelon = Echelon::default();
    rows.iter().filter(|r| echelon.insert(r)).count()
}

/// Incrementally maintained row-echelon basis, used to test linear
/// independence of vectors one at a time.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    // (pivot column, normalized row with 1 at pivot)
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Echelon {
    /// Reduces `v` against the current basis; adds it and returns true if it
    /// is independent of everything inserted so far.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let Some(mut r) = self.reduce(v) else {
            return false;
        };
        let pivot = r.iter().position(|e| !e.is_zero()).expect("nonzero remainder");
        let p = r[pivot].clone();
        for e in r.iter_mut() {
            *e /= &p;
        }
        self.rows.push((pivot, r));
        true
    }

    /// Is `v` in the span of the inserted vectors?
    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).is_none()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn reduce(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        let mut r = v.to_vec();
        for (pivot, row) in &self.rows {
            if r[*pivot].is_zero() {
                continue;
            }
            let f = r[*pivot].clone();
            for (x, y) in r.iter_mut().zip(row) {
                *x -= &f * y;
            }
        }
        r.iter().any(|e| !e.is_zero()).then_some(r)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, e) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    /// Cofactor expansion along the first row; independent of Bareiss.
    fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc = Rational::zero();
        for j in 0..n {
            let minor: Vec<Vec<Rational>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect()).collect();
            let term = &m[0][j] * cofactor_det(&minor);
            if j % 2 == 0 {
                acc += term
            } else {
                acc -= term
            }
        }
        acc
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(Matrix::identity(3).determinant().unwrap(), rat(1, 1));
        assert_eq!(Matrix::from_i64(&[&[2, 0], &[0, 3]]).determinant().unwrap(), rat(6, 1));
        assert_eq!(Matrix::from_i64(&[&[0, 1], &[-1, 2]]).determinant().unwrap(), rat(1, 1));
        // needs a row swap
        assert_eq!(Matrix::from_i64(&[&[0, 1], &[1, 0]]).determinant().unwrap(), rat(-1, 1));
    }

    #[test]
    fn determinant_rejects_non_square() {
        let m = Matrix::from_i64(&[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(m.determinant(), Err(Error::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn inverse_round_trips() {
        let m = Matrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert_eq!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Rank));
    }

    fn rational_matrix(n: usize) -> impl Strategy<Value = Matrix> {
        prop::collection::vec((-6i64..=6, 1i64..=4), n * n).prop_map(move |es| {
            let rows = es.chunks(n).map(|c| c.iter().map(|&(p, q)| rat(p, q)).collect()).collect();
            Matrix::from_rows(rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn determinant_matches_cofactor_expansion(m in (1usize..=4).prop_flat_map(rational_matrix)) {
            prop_assert_eq!(m.determinant().unwrap(), cofactor_det(&m.to_rows()));
        }
    }
}
