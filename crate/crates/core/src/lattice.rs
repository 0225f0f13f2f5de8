//! Full-rank lattices `Λ = B·Z^d`, integer sublattices and their cosets, and
//! the left Hermite normal form used to align witness vectors.

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rational::{rat_int, Integer, Rational};

/// A full-rank lattice given by a nonsingular basis matrix whose columns are
/// the basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    basis: Matrix,
    determinant: Rational,
}

impl Lattice {
    pub fn new(basis: Matrix) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::NotSquare { rows: basis.rows(), cols: basis.cols() });
        }
        let determinant = basis.abs_determinant()?;
        if determinant.is_zero() {
            return Err(Error::Rank);
        }
        Ok(Self { basis, determinant })
    }

    /// `Z^d`.
    pub fn standard(d: usize) -> Self {
        Self { basis: Matrix::identity(d), determinant: Rational::one() }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// `|det B|`.
    pub fn determinant(&self) -> &Rational {
        &self.determinant
    }

    pub fn is_standard(&self) -> bool {
        self.basis.is_identity()
    }

    /// The ambient point `B·x` for basis coordinates `x`.
    pub fn point(&self, coords: &[Integer]) -> Result<Vec<Rational>> {
        self.basis.mul_int_vec(coords)
    }

    /// Basis coordinates of `v` if `v ∈ Λ`.
    pub fn coordinates(&self, v: &[Rational]) -> Result<Option<Vec<Integer>>> {
        if v.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: v.len() });
        }
        let x = self.basis.solve(v)?;
        Ok(x.iter().all(|e| e.is_integer()).then(|| x.iter().map(|e| e.to_integer()).collect()))
    }

    /// Is `v ∈ Λ`?
    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        Ok(self.coordinates(v)?.is_some())
    }

    /// `rΛ`.
    pub fn scaled(&self, r: &Rational) -> Result<Self> {
        Self::new(self.basis.scaled(r))
    }
}

/// `Λ̃ ⊆ Λ` given by an integer coefficient matrix whose columns are the
/// basis vectors of `Λ̃` in parent-basis coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sublattice {
    parent: Lattice,
    coeff: Matrix,
    index: Integer,
    /// Lower-triangular basis of the coefficient lattice (columns), positive
    /// diagonal; gives the coset digits.
    triangular: Vec<Vec<Integer>>,
}

impl Sublattice {
    pub fn new(parent: Lattice, coeff: Matrix) -> Result<Self> {
        if !coeff.is_square() {
            return Err(Error::NotSquare { rows: coeff.rows(), cols: coeff.cols() });
        }
        if coeff.rows() != parent.dim() {
            return Err(Error::Dimension { expected: parent.dim(), got: coeff.rows() });
        }
        if !coeff.is_integral() {
            return Err(Error::NotIntegral);
        }
        let det = coeff.abs_determinant()?;
        if det.is_zero() {
            return Err(Error::Rank);
        }
        // u·Cᵀ = h upper triangular  =>  C·uᵀ = hᵀ lower triangular, same lattice.
        let (_, h) = hnf_left_int(&coeff.transpose().to_integer_rows()?)?;
        let d = h.len();
        let triangular = (0..d).map(|i| (0..d).map(|j| h[j][i].clone()).collect()).collect();
        Ok(Self { parent, coeff, index: det.to_integer(), triangular })
    }

    /// `nΛ`.
    pub fn scaled_parent(parent: Lattice, n: &Integer) -> Result<Self> {
        let d = parent.dim();
        Self::new(parent, Matrix::diagonal(&vec![rat_int(n.clone()); d]))
    }

    pub fn parent(&self) -> &Lattice {
        &self.parent
    }

    pub fn coeff(&self) -> &Matrix {
        &self.coeff
    }

    /// `det Λ̃ / det Λ`, the number of residue classes.
    pub fn index(&self) -> &Integer {
        &self.index
    }

    /// `Λ̃` as a lattice in its own right (basis `B·C`).
    pub fn lattice(&self) -> Lattice {
        let basis = self.parent.basis.mul(&self.coeff).expect("square, same dimension");
        let determinant = &self.parent.determinant * rat_int(self.index.clone());
        Lattice { basis, determinant }
    }

    /// One representative per coset of `Λ / Λ̃`, in parent-basis coordinates.
    /// Coordinate `j` ranges over `[0, t_jj)` for the triangular basis `t`.
    pub fn residue_representatives(&self) -> Vec<Vec<Integer>> {
        let radices: Vec<Integer> = (0..self.triangular.len()).map(|j| self.triangular[j][j].clone()).collect();
        let mut out = vec![Vec::new()];
        for r in &radices {
            let mut next = Vec::new();
            for prefix in &out {
                let mut k = Integer::zero();
                while &k < r {
                    let mut p = prefix.clone();
                    p.push(k.clone());
                    next.push(p);
                    k += 1;
                }
            }
            out = next;
        }
        out
    }

    /// The coset representative (as listed by
    /// [`residue_representatives`](Self::residue_representatives)) of `v`.
    pub fn reduce(&self, v: &[Integer]) -> Vec<Integer> {
        let t = &self.triangular;
        let mut x = v.to_vec();
        for j in 0..t.len() {
            // column j of the triangular basis has zeros above row j
            let q = x[j].div_floor(&t[j][j]);
            if q.is_zero() {
                continue;
            }
            for (i, xi) in x.iter_mut().enumerate().skip(j) {
                *xi -= &q * &t[i][j];
            }
        }
        x
    }

    /// `a ≡ b mod Λ̃`, with `a`, `b` in parent-basis coordinates.
    pub fn same_residue(&self, a: &[Integer], b: &[Integer]) -> Result<bool> {
        let d = self.parent.dim();
        for v in [a, b] {
            if v.len() != d {
                return Err(Error::Dimension { expected: d, got: v.len() });
            }
        }
        let diff: Vec<Integer> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        Ok(self.reduce(&diff).iter().all(Zero::is_zero))
    }
}

/// Left Hermite normal form of a nonsingular integer matrix: returns `(u, h)`
/// with `u` unimodular and `h = u·z` upper triangular, positive diagonal, and
/// entries above the diagonal reduced into `[0, h_jj)`.
pub fn hnf_left(z: &Matrix) -> Result<(Matrix, Matrix)> {
    if !z.is_square() {
        return Err(Error::NotSquare { rows: z.rows(), cols: z.cols() });
    }
    let (u, h) = hnf_left_int(&z.to_integer_rows()?)?;
    Ok((Matrix::from_integer_rows(&u)?, Matrix::from_integer_rows(&h)?))
}

type IntRows = Vec<Vec<Integer>>;

fn hnf_left_int(z: &[Vec<Integer>]) -> Result<(IntRows, IntRows)> {
    let n = z.len();
    // n×m with m ≤ n; rows m.. of h end up zero
    let m = z.first().map_or(0, Vec::len);
    let mut h = z.to_vec();
    let mut u: Vec<Vec<Integer>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Integer::one() } else { Integer::zero() }).collect()).collect();

    for i in 0..m {
        for r in i + 1..n {
            if h[r][i].is_zero() {
                continue;
            }
            let a = h[i][i].clone();
            let b = h[r][i].clone();
            let e = a.extended_gcd(&b);
            let (g, x, y) = if e.gcd.is_negative() { (-e.gcd, -e.x, -e.y) } else { (e.gcd, e.x, e.y) };
            let (p, q) = (-(&b / &g), &a / &g);
            // [[x, y], [p, q]] has determinant (x·a + y·b)/g = 1
            combine_rows(&mut h, i, r, &x, &y, &p, &q);
            combine_rows(&mut u, i, r, &x, &y, &p, &q);
        }
        if h[i][i].is_zero() {
            return Err(Error::Rank);
        }
        if h[i][i].is_negative() {
            for m in [&mut h, &mut u] {
                for e in m[i].iter_mut() {
                    *e = -&*e;
                }
            }
        }
        for r in 0..i {
            let q = h[r][i].div_floor(&h[i][i]);
            if q.is_zero() {
                continue;
            }
            for m in [&mut h, &mut u] {
                let src = m[i].clone();
                for (e, s) in m[r].iter_mut().zip(&src) {
                    *e -= &q * s;
                }
            }
        }
    }
    Ok((u, h))
}

fn combine_rows(m: &mut [Vec<Integer>], i: usize, r: usize, x: &Integer, y: &Integer, p: &Integer, q: &Integer) {
    let (ri, rr) = (m[i].clone(), m[r].clone());
    for k in 0..ri.len() {
        m[i][k] = x * &ri[k] + y * &rr[k];
        m[r][k] = p * &ri[k] + q * &rr[k];
    }
}

/// A unimodular `U` with `U·zⁱ ∈ lin{e¹,…,eⁱ}` for every `i`. Fewer than `d`
/// witnesses are allowed; they must be independent.
pub fn align_witnesses(witnesses: &[Vec<Integer>]) -> Result<Matrix> {
    let k = witnesses.len();
    let d = witnesses.first().ok_or_else(|| Error::Input("no witness vectors".into()))?.len();
    if let Some(bad) = witnesses.iter().find(|w| w.len() != d) {
        return Err(Error::Dimension { expected: d, got: bad.len() });
    }
    if k > d {
        return Err(Error::Rank);
    }
    // Z has the witnesses as columns
    let z: Vec<Vec<Integer>> = (0..d).map(|i| (0..k).map(|j| witnesses[j][i].clone()).collect()).collect();
    let (u, _) = hnf_left_int(&z)?;
    Matrix::from_integer_rows(&u)
}
