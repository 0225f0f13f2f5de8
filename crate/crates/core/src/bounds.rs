//! Right-hand sides of the counting bounds, the divisor chain and its
//! sublattice, and the Minkowski inequalities.

use std::cmp::Ordering;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::body::SymmetricBody;
use crate::enumerate::count;
use crate::error::{Error, Result};
use crate::gauge::GaugeValue;
use crate::lattice::{Lattice, Sublattice};
use crate::matrix::Matrix;
use crate::rational::{floor, floor_sqrt, int, pow, rat_int, Integer, Rational};
use crate::succmin::MinimaResult;

/// `qᵢ = ⌊2/λᵢ + 1⌋`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloorTerms {
    pub q: Vec<Integer>,
}

/// `n₁..n_d` with `n_d = q_d`, `qᵢ ≤ nᵢ < 2qᵢ` and `n_{i+1} | nᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorChain {
    pub n: Vec<Integer>,
}

impl DivisorChain {
    pub fn product(&self) -> Integer {
        self.n.iter().product()
    }

    /// Checks the chain conditions against `q`.
    pub fn is_valid_for(&self, q: &FloorTerms) -> bool {
        let d = q.q.len();
        if self.n.len() != d || d == 0 || self.n[d - 1] != q.q[d - 1] {
            return false;
        }
        let bounded = self.n.iter().zip(&q.q).all(|(n, q)| q <= n && *n < q * 2);
        let divides = self.n.windows(2).all(|w| w[0].is_multiple_of(&w[1]));
        bounded && divides
    }
}

/// `⌊2/λ + 1⌋` for a single `λ > 0`. For `λ = sqrt(s)` this is
/// `1 + ⌊sqrt(4/s)⌋`, i.e. the largest `m` with `(m−1)²·s ≤ 4`.
pub fn floor_term(lambda: &GaugeValue) -> Result<Integer> {
    if lambda.is_zero() || lambda.is_negative() {
        return Err(Error::Input(format!("successive minimum must be positive, got {lambda}")));
    }
    Ok(match lambda {
        GaugeValue::Rational(l) => floor(&(rat_int(2) / l)) + 1,
        GaugeValue::Sqrt(s) => floor_sqrt(&(rat_int(4) / s)) + 1,
    })
}

pub fn floor_terms(m: &MinimaResult) -> Result<FloorTerms> {
    Ok(FloorTerms { q: m.minima.iter().map(floor_term).collect::<Result<_>>()? })
}

/// `q₁^d`.
pub fn first_bound_rhs(m: &MinimaResult) -> Result<Integer> {
    let q1 = floor_term(m.minima.first().ok_or_else(|| Error::Input("no minima".into()))?)?;
    Ok(num_traits::pow(q1, m.dim()))
}

/// `∏ qᵢ`.
pub fn conjecture_rhs(m: &MinimaResult) -> Result<Integer> {
    Ok(floor_terms(m)?.q.iter().product())
}

/// `2^{d−1} ∏ qᵢ`; only meaningful for `d ≥ 2`.
pub fn main_bound_rhs(m: &MinimaResult) -> Result<Integer> {
    let d = m.dim();
    if d < 2 {
        return Err(Error::Input(format!("the strict product bound needs d >= 2, got d = {d}")));
    }
    Ok(conjecture_rhs(m)? << (d - 1))
}

/// Builds `n_d..n₁` from the back: keep `n_{k+1}` when it already reaches
/// `q_k`, otherwise round `q_k` up to the next multiple of `n_{k+1}`.
pub fn divisor_chain(q: &FloorTerms) -> Result<DivisorChain> {
    let d = q.q.len();
    if d == 0 {
        return Err(Error::Input("empty floor terms".into()));
    }
    if q.q.iter().any(|v| !v.is_positive()) {
        return Err(Error::Input("floor terms must be positive".into()));
    }
    if q.q.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Input("floor terms must be nonincreasing".into()));
    }
    let mut n = vec![Integer::zero(); d];
    n[d - 1] = q.q[d - 1].clone();
    for k in (0..d - 1).rev() {
        let next = n[k + 1].clone();
        n[k] = if next >= q.q[k] {
            next
        } else {
            let r = q.q[k].mod_floor(&next);
            &q.q[k] + &next - r
        };
    }
    Ok(DivisorChain { n })
}

/// `Λ̃ = n₁Z ⊕ … ⊕ n_dZ` inside `Z^d`.
pub fn chain_sublattice(chain: &DivisorChain) -> Result<Sublattice> {
    let diag: Vec<Rational> = chain.n.iter().cloned().map(rat_int).collect();
    Sublattice::new(Lattice::standard(diag.len()), Matrix::diagonal(&diag))
}

/// `2K ∩ Λ̃ = {0}` for the chain sublattice of a canonical instance.
pub fn kernel_check(k_canonical: &SymmetricBody, chain: &DivisorChain) -> Result<bool> {
    let sub = chain_sublattice(chain)?;
    Ok(count(k_canonical, &sub.lattice(), &GaugeValue::from(2), false)? == Integer::one())
}

/// Both sides of `#(K∩Λ) ≤ [Λ:Λ̃]·#(2K∩Λ̃)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaBound {
    pub lhs: Integer,
    pub rhs: Integer,
    pub holds: bool,
}

pub fn lemma_bound(k: &SymmetricBody, lat: &Lattice, sub: &Sublattice) -> Result<LemmaBound> {
    if sub.parent() != lat {
        return Err(Error::Input("sublattice does not belong to the given lattice".into()));
    }
    let lhs = count(k, lat, &GaugeValue::one(), false)?;
    lemma_bound_with_count(k, sub, lhs)
}

/// [`lemma_bound`] with `#(K∩Λ)` already known.
pub fn lemma_bound_with_count(k: &SymmetricBody, sub: &Sublattice, lhs: Integer) -> Result<LemmaBound> {
    let rhs = sub.index() * count(k, &sub.lattice(), &GaugeValue::from(2), false)?;
    let holds = lhs <= rhs;
    Ok(LemmaBound { lhs, rhs, holds })
}

/// Is `λ · vol ≤ 2^d · det · slack`? Exact for both kinds of `λ`.
fn minkowski_holds(lambda: &GaugeValue, vol: &Rational, det: &Rational, d: usize, slack: &Rational) -> bool {
    let rhs = rat_int(int(1) << d) * det * slack;
    lambda.mul_rational(vol).cmp_rational(&rhs) != Ordering::Greater
}

/// `λ₁^d · vol ≤ 2^d · det`.
pub fn minkowski_first_check(m: &MinimaResult, vol: &Rational, det: &Rational) -> bool {
    minkowski_first_check_within(m, vol, det, &Rational::one())
}

/// `∏λᵢ · vol ≤ 2^d · det`.
pub fn minkowski_second_check(m: &MinimaResult, vol: &Rational, det: &Rational) -> bool {
    minkowski_second_check_within(m, vol, det, &Rational::one())
}

/// [`minkowski_first_check`] against a volume that may overshoot by the
/// factor `slack` (see [`riemann_slack`]).
pub fn minkowski_first_check_within(m: &MinimaResult, vol: &Rational, det: &Rational, slack: &Rational) -> bool {
    minkowski_holds(&m.minima[0].pow(m.dim()), vol, det, m.dim(), slack)
}

pub fn minkowski_second_check_within(m: &MinimaResult, vol: &Rational, det: &Rational, slack: &Rational) -> bool {
    let product = m.minima.iter().fold(GaugeValue::one(), |acc, l| acc.mul(l));
    minkowski_holds(&product, vol, det, m.dim(), slack)
}

/// `(1 + r·t)^d`, with `t` an upper bound for the gauge of `K` on the cell
/// `B·[−1/2, 1/2]^d`.
///
/// Each point of `K ∩ rΛ` owns the cell `p + rB[−1/2,1/2]^d` of volume
/// `r^d·det Λ`; the cells are disjoint and lie in `(1 + r·t)K`, so the
/// Riemann estimate never exceeds `(1 + r·t)^d · vol(K)`.
pub fn riemann_slack(k: &SymmetricBody, lat: &Lattice, r: &Rational) -> Result<Rational> {
    let t = k.preimage(lat.basis())?.half_cube_radius().upper_rational();
    Ok(pow(&(Rational::one() + r * t), k.dim()))
}

#[cfg(test)]
mod tests;
