//! Lattice points of `Λ` inside `μK` (or `int(μK)`).
//!
//! Points are found in basis coordinates: with `Λ = B·Z^d`,
//! `#(μK ∩ Λ) = #(μ(B⁻¹K) ∩ Z^d)`, and `B⁻¹K` is walked coordinate by
//! coordinate using the exact slice ranges of the body.

use num_traits::{One, Signed, Zero};

use crate::body::{SliceState, Slicer, SymmetricBody};
use crate::error::{Error, Result};
use crate::gauge::GaugeValue;
use crate::lattice::{Lattice, Sublattice};
use crate::matrix::Matrix;
use crate::rational::{int, pow, rat_int, Integer, Rational};

/// Lattice points in basis coordinates, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    pub dim: usize,
    pub points: Vec<Vec<Integer>>,
    pub lattice: Lattice,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, coords: &[Integer]) -> bool {
        self.points.binary_search_by(|p| p.as_slice().cmp(coords)).is_ok()
    }

    /// The points as ambient vectors `B·x`.
    pub fn ambient(&self) -> Vec<Vec<Rational>> {
        self.points.iter().map(|p| self.lattice.point(p).expect("dimension matches")).collect()
    }
}

/// The body seen from basis coordinates, with the level folded into a slicer.
struct Walk {
    body: SymmetricBody,
    slicer: Slicer,
    level: GaugeValue,
    strict: bool,
}

impl Walk {
    fn new(k: &SymmetricBody, lat: &Lattice, mu: &GaugeValue, strict: bool) -> Result<Self> {
        if lat.dim() != k.dim() {
            return Err(Error::Dimension { expected: k.dim(), got: lat.dim() });
        }
        if mu.is_negative() {
            return Err(Error::Input(format!("level must be nonnegative, got {mu}")));
        }
        let body = if lat.is_standard() { k.clone() } else { k.preimage(lat.basis())? };
        let slicer = body.slicer(mu, strict);
        Ok(Self { body, slicer, level: mu.clone(), strict })
    }

    fn accepts(&self, x: &[Integer]) -> bool {
        if self.slicer.is_exact() {
            return true;
        }
        let g = self.body.gauge_int(x).expect("dimension matches");
        if self.strict {
            g < self.level
        } else {
            g <= self.level
        }
    }

    fn for_each(&self, f: &mut dyn FnMut(&[Integer])) {
        self.find(&mut |x| {
            f(x);
            false
        });
    }

    /// Visits points until `f` returns true; reports whether it did.
    fn find(&self, f: &mut dyn FnMut(&[Integer]) -> bool) -> bool {
        let d = self.body.dim();
        let mut prefix = Vec::with_capacity(d);
        self.visit(&mut prefix, &SliceState::default(), d, f)
    }

    fn visit(&self, prefix: &mut Vec<Integer>, state: &SliceState, d: usize, f: &mut dyn FnMut(&[Integer]) -> bool) -> bool {
        let Some((lo, hi)) = self.slicer.range(prefix, state) else { return false };
        let mut x = lo;
        while x <= hi {
            prefix.push(x.clone());
            let stop = if prefix.len() == d {
                self.accepts(prefix) && f(prefix)
            } else {
                let next = self.slicer.advance(prefix, state);
                self.visit(prefix, &next, d, f)
            };
            prefix.pop();
            if stop {
                return true;
            }
            x += 1;
        }
        false
    }

    /// Streams the count, taking the last coordinate as a whole range when
    /// the ranges are exact. Gives up (`None`) after `budget` interior nodes.
    fn count(&self, budget: Option<u64>) -> Option<Integer> {
        let d = self.body.dim();
        let mut prefix = Vec::with_capacity(d);
        let mut nodes = 0u64;
        let mut total = Integer::zero();
        self.count_from(&mut prefix, &SliceState::default(), d, budget, &mut nodes, &mut total).then_some(total)
    }

    fn count_from(
        &self,
        prefix: &mut Vec<Integer>,
        state: &SliceState,
        d: usize,
        budget: Option<u64>,
        nodes: &mut u64,
        total: &mut Integer,
    ) -> bool {
        *nodes += 1;
        if budget.is_some_and(|b| *nodes > b) {
            return false;
        }
        let Some((lo, hi)) = self.slicer.range(prefix, state) else { return true };
        if prefix.len() + 1 == d && self.slicer.is_exact() {
            *total += hi - lo + 1;
            return true;
        }
        let mut x = lo;
        while x <= hi {
            prefix.push(x.clone());
            let ok = if prefix.len() == d {
                if self.accepts(prefix) {
                    *total += 1;
                }
                true
            } else {
                let next = self.slicer.advance(prefix, state);
                self.count_from(prefix, &next, d, budget, nodes, total)
            };
            prefix.pop();
            if !ok {
                return false;
            }
            x += 1;
        }
        true
    }
}

/// `μK ∩ Λ` (or `int(μK) ∩ Λ`), in basis coordinates.
pub fn enumerate(k: &SymmetricBody, lat: &Lattice, mu: &GaugeValue, strict: bool) -> Result<PointSet> {
    let walk = Walk::new(k, lat, mu, strict)?;
    let mut points = Vec::new();
    walk.for_each(&mut |x| points.push(x.to_vec()));
    Ok(PointSet { dim: k.dim(), points, lattice: lat.clone() })
}

/// Whether some point of `μK ∩ Λ` (or `int(μK) ∩ Λ`) satisfies `pred`,
/// stopping at the first one.
pub fn any_point(
    k: &SymmetricBody,
    lat: &Lattice,
    mu: &GaugeValue,
    strict: bool,
    mut pred: impl FnMut(&[Integer]) -> bool,
) -> Result<bool> {
    Ok(Walk::new(k, lat, mu, strict)?.find(&mut pred))
}

/// `#(μK ∩ Λ)` without materializing the points.
pub fn count(k: &SymmetricBody, lat: &Lattice, mu: &GaugeValue, strict: bool) -> Result<Integer> {
    Ok(Walk::new(k, lat, mu, strict)?.count(None).expect("unbounded budget"))
}

/// [`count`] with a cap on the number of interior search nodes.
pub fn count_within(
    k: &SymmetricBody,
    lat: &Lattice,
    mu: &GaugeValue,
    strict: bool,
    node_budget: u64,
) -> Result<Option<Integer>> {
    Ok(Walk::new(k, lat, mu, strict)?.count(Some(node_budget)))
}

/// `#(μK ∩ Λ̃)` for a sublattice, via its own basis `B·C`.
pub fn count_sublattice(k: &SymmetricBody, sub: &Sublattice, mu: &GaugeValue, strict: bool) -> Result<Integer> {
    count(k, &sub.lattice(), mu, strict)
}

/// Independent count: scans every `y ∈ [-R, R]^d` and tests the gauge of `K`
/// at the ambient point `B·y` directly.
pub fn count_oracle(k: &SymmetricBody, lat: &Lattice, mu: &GaugeValue, strict: bool, box_radius: u64) -> Result<Integer> {
    let d = k.dim();
    if lat.dim() != d {
        return Err(Error::Dimension { expected: d, got: lat.dim() });
    }
    let r = box_radius as i64;
    let mut y = vec![-r; d];
    let mut total = Integer::zero();
    loop {
        let coords: Vec<Integer> = y.iter().map(|&v| int(v)).collect();
        let g = k.gauge(&lat.point(&coords)?)?;
        if if strict { g < *mu } else { g <= *mu } {
            total += 1;
        }
        // odometer
        let mut i = 0;
        loop {
            if i == d {
                return Ok(total);
            }
            if y[i] < r {
                y[i] += 1;
                break;
            }
            y[i] = -r;
            i += 1;
        }
    }
}

/// A radius `R` such that every point of `μK ∩ Λ` has basis coordinates in
/// `[-R, R]`, from the first-coordinate bounds of permuted copies of `B⁻¹K`.
pub fn coordinate_radius(k: &SymmetricBody, lat: &Lattice, mu: &GaugeValue) -> Result<u64> {
    let d = k.dim();
    let mu = mu.upper_rational();
    if mu.is_zero() {
        return Ok(0);
    }
    let body = k.preimage(lat.basis())?.scale(&mu)?;
    let mut radius = Rational::zero();
    for j in 0..d {
        // swap coordinates 0 and j
        let mut p = Matrix::identity(d);
        if j > 0 {
            p[(0, 0)] = Rational::zero();
            p[(j, j)] = Rational::zero();
            p[(0, j)] = Rational::one();
            p[(j, 0)] = Rational::one();
        }
        let (lo, hi) = body.preimage(&p)?.coordinate_bounds(&[])?.expect("body contains the origin");
        radius = radius.max(lo.abs()).max(hi.abs());
    }
    let r = radius.ceil().to_integer();
    u64::try_from(r).map_err(|_| Error::Input("coordinate radius too large".into()))
}

/// `r^d · #(K ∩ rΛ) · det Λ`, which tends to `vol(K)` as `r → 0`.
pub fn volume_estimate(k: &SymmetricBody, lat: &Lattice, r: &Rational) -> Result<Rational> {
    volume_estimate_within(k, lat, r, None).map(|v| v.expect("unbounded budget"))
}

/// [`volume_estimate`] giving up after `node_budget` search nodes.
pub fn volume_estimate_within(
    k: &SymmetricBody,
    lat: &Lattice,
    r: &Rational,
    node_budget: Option<u64>,
) -> Result<Option<Rational>> {
    if !r.is_positive() {
        return Err(Error::Input(format!("resolution must be positive, got {r}")));
    }
    let fine = lat.scaled(r)?;
    let walk = Walk::new(k, &fine, &GaugeValue::one(), false)?;
    Ok(walk.count(node_budget).map(|n| pow(r, k.dim()) * rat_int(n) * lat.determinant()))
}
