//! 0-symmetric convex bodies with an exact gauge.

mod fm;

use std::sync::{Arc, OnceLock};

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::GaugeValue;
use crate::matrix::Matrix;
use crate::rational::{ceil_sub_sqrt, floor_add_sqrt, rat_int, Integer, Rational};

use fm::{LevelRanges, Projection};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    /// `{x : |x_i| ≤ w_i}`
    Box { halfwidths: Vec<Rational> },
    /// `{x : |⟨a_i,x⟩| ≤ 1}` for the rows `a_i` of `normals`
    HPolytope { normals: Matrix },
    /// `{x : xᵀQx ≤ 1}`
    Ellipsoid { gram: Matrix },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    Box,
    HPolytope,
    Ellipsoid,
}

impl BodyKind {
    pub const ALL: [BodyKind; 3] = [BodyKind::Box, BodyKind::HPolytope, BodyKind::Ellipsoid];

    pub fn name(self) -> &'static str {
        match self {
            BodyKind::Box => "box",
            BodyKind::HPolytope => "hpolytope",
            BodyKind::Ellipsoid => "ellipsoid",
        }
    }
}

/// `xᵀQx = Σ_i d_i (x_i + Σ_{k<i} m_ik x_k)²`, so that the minimum over the
/// trailing coordinates with a fixed prefix is the sum of the leading terms.
#[derive(Debug)]
struct Decomposition {
    pivots: Vec<Rational>,
    mult: Vec<Vec<Rational>>,
    /// The same form over the integers: with `u_i = l_i x_i + Σ_{k<i} c_ik x_k`,
    /// `den · xᵀQx = Σ_i w_i u_i²`.
    int: IntForm,
}

#[derive(Debug)]
struct IntForm {
    l: Vec<Integer>,
    c: Vec<Vec<Integer>>,
    w: Vec<Integer>,
    den: Integer,
}

impl IntForm {
    fn new(pivots: &[Rational], mult: &[Vec<Rational>]) -> Self {
        let l: Vec<Integer> = mult.iter().map(|m| m.iter().fold(Integer::one(), |acc, e| acc.lcm(e.denom()))).collect();
        let c = mult.iter().zip(&l).map(|(m, l)| m.iter().map(|e| (e * rat_int(l.clone())).to_integer()).collect()).collect();
        let r: Vec<Rational> = pivots.iter().zip(&l).map(|(p, l)| p / rat_int(l * l)).collect();
        let den = r.iter().fold(Integer::one(), |acc, e| acc.lcm(e.denom()));
        let w = r.iter().map(|e| (e * rat_int(den.clone())).to_integer()).collect();
        Self { l, c, w, den }
    }

    /// `u_i` for `x_0..=x_i`, or the shift `Σ_{k<i} c_ik x_k` when only the
    /// prefix is given.
    fn shift(&self, i: usize, prefix: &[Integer]) -> Integer {
        let mut acc = Integer::zero();
        for (c, x) in self.c[i].iter().zip(prefix) {
            if !c.is_zero() && !x.is_zero() {
                acc += c * x;
            }
        }
        acc
    }
}

impl Decomposition {
    fn new(gram: &Matrix) -> Self {
        let d = gram.rows();
        let mut s = gram.to_rows();
        let mut pivots = vec![Rational::zero(); d];
        let mut mult = vec![Vec::new(); d];
        for i in (0..d).rev() {
            let p = s[i][i].clone();
            mult[i] = (0..i).map(|k| &s[i][k] / &p).collect();
            for j in 0..i {
                for k in 0..i {
                    let t = &s[j][i] * &s[i][k] / &p;
                    s[j][k] -= t;
                }
            }
            pivots[i] = p;
        }
        let int = IntForm::new(&pivots, &mult);
        Self { pivots, mult, int }
    }
}

#[derive(Debug, Default)]
struct Cache {
    projection: OnceLock<std::result::Result<Arc<Projection>, Error>>,
    decomposition: OnceLock<Arc<Decomposition>>,
}

/// A 0-symmetric convex body with nonempty interior.
#[derive(Debug, Clone)]
pub struct SymmetricBody {
    dim: usize,
    shape: Shape,
    cache: Arc<Cache>,
}

impl PartialEq for SymmetricBody {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.shape == other.shape
    }
}

impl Eq for SymmetricBody {}

impl SymmetricBody {
    pub fn new(shape: Shape) -> Result<Self> {
        let dim = match &shape {
            Shape::Box { halfwidths } => {
                if halfwidths.is_empty() {
                    return Err(Error::InvalidBody("box needs at least one halfwidth".into()));
                }
                if halfwidths.iter().any(|w| !w.is_positive()) {
                    return Err(Error::InvalidBody("box halfwidths must be positive".into()));
                }
                halfwidths.len()
            }
            Shape::HPolytope { normals } => {
                let d = normals.cols();
                if (0..normals.rows()).any(|i| normals.row(i).iter().all(Zero::is_zero)) {
                    return Err(Error::InvalidBody("polytope has a zero normal".into()));
                }
                if normals.rank() != d {
                    return Err(Error::InvalidBody(format!("polytope normals have rank < {d}")));
                }
                d
            }
            Shape::Ellipsoid { gram } => {
                if !gram.is_square() {
                    return Err(Error::NotSquare { rows: gram.rows(), cols: gram.cols() });
                }
                let d = gram.rows();
                if gram.transpose() != *gram {
                    return Err(Error::InvalidBody("ellipsoid gram matrix is not symmetric".into()));
                }
                for k in 1..=d {
                    let minor = Matrix::from_rows(gram.to_rows()[..k].iter().map(|r| r[..k].to_vec()).collect())?;
                    if !minor.determinant()?.is_positive() {
                        return Err(Error::InvalidBody("ellipsoid gram matrix is not positive definite".into()));
                    }
                }
                d
            }
        };
        let body = Self { dim, shape, cache: Arc::default() };
        if let Shape::HPolytope { .. } = body.shape {
            // every projection interval must be finite
            body.projection()?;
        }
        Ok(body)
    }

    pub fn cube(d: usize, w: Rational) -> Result<Self> {
        Self::new(Shape::Box { halfwidths: vec![w; d] })
    }

    pub fn boxed(halfwidths: Vec<Rational>) -> Result<Self> {
        Self::new(Shape::Box { halfwidths })
    }

    pub fn hpolytope(normals: Matrix) -> Result<Self> {
        Self::new(Shape::HPolytope { normals })
    }

    pub fn ellipsoid(gram: Matrix) -> Result<Self> {
        Self::new(Shape::Ellipsoid { gram })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn kind(&self) -> BodyKind {
        match self.shape {
            Shape::Box { .. } => BodyKind::Box,
            Shape::HPolytope { .. } => BodyKind::HPolytope,
            Shape::Ellipsoid { .. } => BodyKind::Ellipsoid,
        }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got == self.dim {
            Ok(())
        } else {
            Err(Error::Dimension { expected: self.dim, got })
        }
    }

    /// The Minkowski functional `‖x‖_K`.
    pub fn gauge(&self, x: &[Rational]) -> Result<GaugeValue> {
        self.check_dim(x.len())?;
        Ok(match &self.shape {
            Shape::Box { halfwidths } => {
                GaugeValue::Rational(x.iter().zip(halfwidths).map(|(xi, w)| xi.abs() / w).max().unwrap_or_else(Rational::zero))
            }
            Shape::HPolytope { normals } => GaugeValue::Rational(
                (0..normals.rows())
                    .map(|i| normals.row(i).iter().zip(x).map(|(a, b)| a * b).sum::<Rational>().abs())
                    .max()
                    .unwrap_or_else(Rational::zero),
            ),
            Shape::Ellipsoid { gram } => GaugeValue::Sqrt(quadratic_form(gram, x)),
        })
    }

    pub fn gauge_int(&self, x: &[Integer]) -> Result<GaugeValue> {
        let x: Vec<Rational> = x.iter().cloned().map(rat_int).collect();
        self.gauge(&x)
    }

    /// `x ∈ λK` (or `x ∈ int(λK)` when `strict`).
    pub fn contains(&self, lambda: &GaugeValue, x: &[Rational], strict: bool) -> Result<bool> {
        if lambda.is_negative() {
            return Err(Error::Input("negative scale".into()));
        }
        let g = self.gauge(x)?;
        Ok(if strict { g < *lambda } else { g <= *lambda })
    }

    /// `μK`.
    pub fn scale(&self, mu: &Rational) -> Result<Self> {
        if !mu.is_positive() {
            return Err(Error::Input(format!("scale factor must be positive, got {mu}")));
        }
        let shape = match &self.shape {
            Shape::Box { halfwidths } => Shape::Box { halfwidths: halfwidths.iter().map(|w| w * mu).collect() },
            Shape::HPolytope { normals } => Shape::HPolytope { normals: normals.scaled(&mu.recip()) },
            Shape::Ellipsoid { gram } => Shape::Ellipsoid { gram: gram.scaled(&(mu * mu).recip()) },
        };
        Ok(Self { dim: self.dim, shape, cache: Arc::default() })
    }

    /// `A⁻¹K`, i.e. the body whose gauge at `y` is the gauge of `K` at `A·y`.
    pub fn preimage(&self, a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        self.check_dim(a.rows())?;
        if a.determinant()?.is_zero() {
            return Err(Error::Rank);
        }
        if a.is_identity() {
            return Ok(self.clone());
        }
        let shape = match &self.shape {
            Shape::Box { halfwidths } if a.is_monomial() => {
                // (A·y)ᵢ = aᵢⱼ·yⱼ for the single nonzero aᵢⱼ of row i
                let mut out = vec![Rational::zero(); a.cols()];
                for (i, w) in halfwidths.iter().enumerate() {
                    let j = (0..a.cols()).find(|&j| !a[(i, j)].is_zero()).expect("nonsingular");
                    out[j] = w / a[(i, j)].abs();
                }
                Shape::Box { halfwidths: out }
            }
            Shape::Box { halfwidths } => {
                let inv_w: Vec<Rational> = halfwidths.iter().map(|w| w.recip()).collect();
                Shape::HPolytope { normals: Matrix::diagonal(&inv_w).mul(a)? }
            }
            Shape::HPolytope { normals } => Shape::HPolytope { normals: normals.mul(a)? },
            Shape::Ellipsoid { gram } => Shape::Ellipsoid { gram: a.transpose().mul(gram)?.mul(a)? },
        };
        Self::new(shape)
    }

    /// Exact range of coordinate `prefix.len()` over the slice of `K` with the
    /// leading coordinates fixed to `prefix`; `Ok(None)` when the slice is
    /// empty. For ellipsoids the true endpoints are irrational and the
    /// returned interval has the same integer points as the true one.
    pub fn coordinate_bounds(&self, prefix: &[Rational]) -> Result<Option<(Rational, Rational)>> {
        let j = prefix.len();
        if j >= self.dim {
            return Err(Error::Dimension { expected: self.dim - 1, got: j });
        }
        Ok(match &self.shape {
            Shape::Box { halfwidths } => {
                if prefix.iter().zip(halfwidths).any(|(x, w)| &x.abs() > w) {
                    None
                } else {
                    Some((-&halfwidths[j], halfwidths[j].clone()))
                }
            }
            Shape::HPolytope { .. } => self.projection()?.interval(prefix, &Rational::one(), true),
            Shape::Ellipsoid { .. } => {
                let dec = self.decomposition();
                let mut partial = Rational::zero();
                for i in 0..j {
                    let mut t = prefix[i].clone();
                    for (m, x) in dec.mult[i].iter().zip(prefix) {
                        t += m * x;
                    }
                    partial += &dec.pivots[i] * &t * &t;
                }
                let radius_sq = (Rational::one() - partial) / &dec.pivots[j];
                if radius_sq.is_negative() {
                    None
                } else {
                    let center: Rational = -dec.mult[j].iter().zip(prefix).map(|(m, x)| m * x).sum::<Rational>();
                    let lo = ceil_sub_sqrt(&center, &radius_sq);
                    let hi = floor_add_sqrt(&center, &radius_sq);
                    if lo <= hi {
                        Some((rat_int(lo), rat_int(hi)))
                    } else {
                        // no integer in the true interval; its center is a
                        // non-integer point of it
                        Some((center.clone(), center))
                    }
                }
            }
        })
    }

    fn projection(&self) -> Result<Arc<Projection>> {
        let Shape::HPolytope { normals } = &self.shape else { unreachable!("projection of a non-polytope") };
        self.cache.projection.get_or_init(|| Projection::new(normals).map(Arc::new)).clone()
    }

    fn decomposition(&self) -> Arc<Decomposition> {
        let Shape::Ellipsoid { gram } = &self.shape else { unreachable!("decomposition of a non-ellipsoid") };
        self.cache.decomposition.get_or_init(|| Arc::new(Decomposition::new(gram))).clone()
    }

    /// Prepares per-coordinate integer ranges of `level·K` (`int(level·K)`
    /// when `strict`) for enumeration.
    pub(crate) fn slicer(&self, level: &GaugeValue, strict: bool) -> Slicer {
        let inner = match &self.shape {
            Shape::Ellipsoid { .. } => {
                // level² = a/b: b·den·xᵀQx ≤ den·a
                let dec = self.decomposition();
                let bound = level.square();
                let total = &dec.int.den * bound.numer();
                SlicerKind::Ellipsoid { dec, scale: bound.denom().clone(), total }
            }
            shape => {
                let (mu, exact) = match level.as_rational() {
                    Some(r) => (r.clone(), true),
                    None => (level.upper_rational(), false),
                };
                match shape {
                    Shape::Box { halfwidths } => SlicerKind::Box { widths: halfwidths.iter().map(|w| w * &mu).collect(), exact },
                    _ => SlicerKind::Poly { ranges: self.projection().expect("validated at construction").at_level(&mu), exact },
                }
            }
        };
        Slicer { inner, strict }
    }

    /// `max` of the gauge over the vertices of `[-1/2, 1/2]^d`: the cube
    /// `[-1/2,1/2]^d` lies in `t·K`.
    pub fn half_cube_radius(&self) -> GaugeValue {
        let d = self.dim;
        let half = Rational::new(1.into(), 2.into());
        // ±v give the same gauge; fix the sign of the first coordinate
        (0..1usize << (d - 1))
            .map(|mask| {
                let v: Vec<Rational> =
                    (0..d).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -&half } else { half.clone() }).collect();
                self.gauge(&v).expect("dimension matches")
            })
            .max()
            .expect("nonempty")
    }
}

fn quadratic_form(q: &Matrix, x: &[Rational]) -> Rational {
    let d = x.len();
    let mut acc = Rational::zero();
    for i in 0..d {
        if x[i].is_zero() {
            continue;
        }
        let mut row = Rational::zero();
        for j in 0..d {
            if !x[j].is_zero() {
                row += &q[(i, j)] * &x[j];
            }
        }
        acc += &x[i] * row;
    }
    acc
}

#[derive(Debug)]
enum SlicerKind {
    Box {
        widths: Vec<Rational>,
        exact: bool,
    },
    Poly {
        ranges: LevelRanges,
        exact: bool,
    },
    /// `scale · Σ w_i u_i² ≤ total` (see [`IntForm`]).
    Ellipsoid {
        dec: Arc<Decomposition>,
        scale: Integer,
        total: Integer,
    },
}

/// Integer ranges per coordinate for a fixed body and level.
#[derive(Debug)]
pub(crate) struct Slicer {
    inner: SlicerKind,
    strict: bool,
}

/// Running state along a prefix, independent of the level; only ellipsoids
/// carry anything (`Σ w_i u_i²` so far).
#[derive(Debug, Clone, Default)]
pub(crate) struct SliceState {
    used: Integer,
}

impl Slicer {
    /// `true` when the ranges are exactly the points of the body; otherwise
    /// they are a superset and candidates must be filtered by the gauge.
    pub(crate) fn is_exact(&self) -> bool {
        match &self.inner {
            SlicerKind::Box { exact, .. } | SlicerKind::Poly { exact, .. } => *exact,
            SlicerKind::Ellipsoid { .. } => true,
        }
    }

    /// Integer range of coordinate `prefix.len()` given a feasible prefix.
    pub(crate) fn range(&self, prefix: &[Integer], state: &SliceState) -> Option<(Integer, Integer)> {
        // supersets are generated non-strict, then filtered
        let strict = self.strict && self.is_exact();
        match &self.inner {
            SlicerKind::Box { widths, .. } => {
                let w = &widths[prefix.len()];
                let hi = if strict { w.ceil().to_integer() - 1 } else { w.floor().to_integer() };
                (!hi.is_negative()).then(|| (-&hi, hi))
            }
            SlicerKind::Poly { ranges, .. } => ranges.int_range(prefix, strict),
            SlicerKind::Ellipsoid { dec, scale, total } => {
                let j = prefix.len();
                let room = total - scale * &state.used;
                if room.is_negative() || (strict && room.is_zero()) {
                    return None;
                }
                let w = &(scale * &dec.int.w[j]);
                let mut reach = (&room / w).sqrt();
                if strict && &reach * &reach * w == room {
                    reach -= 1;
                }
                // l·x_j + shift ∈ [−reach, reach]
                let (l, shift) = (&dec.int.l[j], dec.int.shift(j, prefix));
                let lo = (-&reach - &shift).div_ceil(l);
                let hi = (reach - shift).div_floor(l);
                (lo <= hi).then_some((lo, hi))
            }
        }
    }

    /// State after appending `x` (the value of coordinate `prefix.len()`).
    pub(crate) fn advance(&self, prefix_and_x: &[Integer], state: &SliceState) -> SliceState {
        match &self.inner {
            SlicerKind::Ellipsoid { dec, .. } => {
                let j = prefix_and_x.len() - 1;
                let u = &dec.int.l[j] * &prefix_and_x[j] + dec.int.shift(j, &prefix_and_x[..j]);
                SliceState { used: &state.used + &dec.int.w[j] * &u * &u }
            }
            _ => SliceState::default(),
        }
    }
}

/// `∏ 2w_i`.
pub fn volume_box(k: &SymmetricBody) -> Result<Rational> {
    match &k.shape {
        Shape::Box { halfwidths } => Ok(halfwidths.iter().map(|w| w * rat_int(2)).product()),
        _ => Err(Error::InvalidBody(format!("exact volume needs a box, got {}", k.kind().name()))),
    }
}
