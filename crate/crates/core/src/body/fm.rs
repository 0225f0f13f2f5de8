//! Fourier–Motzkin projection of a symmetric polytope `{x : |⟨a_i,x⟩| ≤ 1}`
//! onto its leading coordinates.
//!
//! Constraints stay in the symmetric form `|⟨u,x⟩| ≤ 1`. Eliminating `x_k`
//! from `|⟨u,x⟩| ≤ 1` and `|⟨w,x⟩| ≤ 1` (both with nonzero `x_k` coefficient)
//! gives `|⟨u/u_k − w/w_k, x⟩| ≤ 1/|u_k| + 1/|w_k|`, which is exactly the pair
//! of ordinary combinations "upper of one, lower of the other".
//!
//! Redundancy pruning without LP:
//! - Chernikov's rule: after `t` eliminations a constraint built from more
//!   than `t + 1` original rows is dropped;
//! - parallel dominance: a constraint is dropped when a parallel one is at
//!   least as tight and was built from a subset of its original rows.

use std::collections::HashMap;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rational::{Integer, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Rows(Vec<u64>);

impl Rows {
    fn single(i: usize) -> Self {
        let mut v = vec![0u64; i / 64 + 1];
        v[i / 64] |= 1 << (i % 64);
        Rows(v)
    }

    fn union(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Rows((0..n).map(|i| self.0.get(i).unwrap_or(&0) | other.0.get(i).unwrap_or(&0)).collect())
    }

    fn len(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().enumerate().all(|(i, w)| w & !other.0.get(i).unwrap_or(&0) == 0)
    }
}

#[derive(Debug, Clone)]
struct Constraint {
    u: Vec<Rational>,
    rows: Rows,
}

/// A constraint solved for its last coordinate: `|x_k + ⟨v, x_{<k}⟩| ≤ b·μ`.
#[derive(Debug, Clone)]
pub(crate) struct Bounder {
    v: Vec<Rational>,
    b: Rational,
}

/// `|d·x_k + ⟨c, x_{<k}⟩| ≤ p/q` with integer data.
#[derive(Debug)]
struct IntBounder {
    c: Vec<Integer>,
    d: Integer,
    p: Integer,
    q: Integer,
}

/// The projection's bounders at one level, in integers.
#[derive(Debug)]
pub(crate) struct LevelRanges {
    bounders: Vec<Vec<IntBounder>>,
}

impl LevelRanges {
    /// Integer points of coordinate `prefix.len()` in the (closed or open)
    /// slice of the projection, `None` if there are none.
    pub(crate) fn int_range(&self, prefix: &[Integer], strict: bool) -> Option<(Integer, Integer)> {
        let mut lo: Option<Integer> = None;
        let mut hi: Option<Integer> = None;
        for bd in &self.bounders[prefix.len()] {
            let mut s = Integer::zero();
            for (a, x) in bd.c.iter().zip(prefix) {
                if !a.is_zero() && !x.is_zero() {
                    s += a * x;
                }
            }
            // d·x_k ∈ [−s − p/q, −s + p/q]
            let base = -(s * &bd.q);
            let den = &bd.q * &bd.d;
            let (l_num, h_num) = (&base - &bd.p, base + &bd.p);
            let (l, h) = if strict {
                (l_num.div_floor(&den) + 1, h_num.div_ceil(&den) - 1)
            } else {
                (l_num.div_ceil(&den), h_num.div_floor(&den))
            };
            if lo.as_ref().is_none_or(|cur| &l > cur) {
                lo = Some(l);
            }
            if hi.as_ref().is_none_or(|cur| &h < cur) {
                hi = Some(h);
            }
            if lo > hi {
                return None;
            }
        }
        let (lo, hi) = (lo?, hi?);
        (lo <= hi).then_some((lo, hi))
    }
}

#[derive(Debug)]
pub(crate) struct Projection {
    /// `bounders[k]`: constraints of the projection onto `x_0..=x_k` with a
    /// nonzero `x_k` coefficient.
    bounders: Vec<Vec<Bounder>>,
    /// `side[k]`: constraints of the same projection not involving `x_k`.
    side: Vec<Vec<Vec<Rational>>>,
}

impl Projection {
    pub(crate) fn new(normals: &Matrix) -> Result<Self> {
        let d = normals.cols();
        let mut stage: Vec<Constraint> =
            (0..normals.rows()).map(|i| Constraint { u: normals.row(i).to_vec(), rows: Rows::single(i) }).collect();
        let mut bounders = vec![Vec::new(); d];
        let mut side = vec![Vec::new(); d];

        for k in (0..d).rev() {
            let (with, without): (Vec<_>, Vec<_>) = stage.into_iter().partition(|c| !c.u[k].is_zero());
            if with.is_empty() {
                return Err(Error::InvalidBody(format!("polytope is unbounded in coordinate {k}")));
            }
            bounders[k] = with
                .iter()
                .map(|c| {
                    let a = &c.u[k];
                    Bounder { v: c.u[..k].iter().map(|e| e / a).collect(), b: a.abs().recip() }
                })
                .collect();
            side[k] = without.iter().map(|c| c.u.clone()).collect();
            if k == 0 {
                break;
            }

            let eliminated = (d - k) as u32;
            let mut next: Vec<Constraint> = without
                .into_iter()
                .map(|mut c| {
                    c.u.truncate(k);
                    c
                })
                .collect();
            for (i, ci) in with.iter().enumerate() {
                for cj in &with[i + 1..] {
                    let rows = ci.rows.union(&cj.rows);
                    if rows.len() > eliminated + 1 {
                        continue;
                    }
                    let (ai, aj) = (&ci.u[k], &cj.u[k]);
                    let s = ai.abs().recip() + aj.abs().recip();
                    let u: Vec<Rational> = (0..k).map(|t| (&ci.u[t] / ai - &cj.u[t] / aj) / &s).collect();
                    if u.iter().all(Zero::is_zero) {
                        continue;
                    }
                    next.push(Constraint { u, rows });
                }
            }
            stage = prune(next);
        }
        Ok(Self { bounders, side })
    }

    /// Range of `x_k` over the projection onto `x_0..=x_k` scaled by `mu`,
    /// with the prefix fixed. `None` if the prefix is infeasible.
    pub(crate) fn interval(&self, prefix: &[Rational], mu: &Rational, check_prefix: bool) -> Option<(Rational, Rational)> {
        let k = prefix.len();
        if check_prefix {
            for u in &self.side[k] {
                let dot: Rational = u.iter().zip(prefix).map(|(a, x)| a * x).sum();
                if &dot.abs() > mu {
                    return None;
                }
            }
        }
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for bd in &self.bounders[k] {
            let center: Rational = -bd.v.iter().zip(prefix).map(|(a, x)| a * x).sum::<Rational>();
            let w = &bd.b * mu;
            let (l, h) = (&center - &w, center + w);
            if lo.as_ref().is_none_or(|cur| &l > cur) {
                lo = Some(l);
            }
            if hi.as_ref().is_none_or(|cur| &h < cur) {
                hi = Some(h);
            }
        }
        let (lo, hi) = (lo?, hi?);
        (lo <= hi).then_some((lo, hi))
    }

    /// Integer form of the bounders at a fixed level, for enumeration.
    pub(crate) fn at_level(&self, mu: &Rational) -> LevelRanges {
        let bounders = self
            .bounders
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|bd| {
                        let d = bd.v.iter().fold(Integer::one(), |acc, e| acc.lcm(e.denom()));
                        let c = bd.v.iter().map(|e| (e * Rational::from_integer(d.clone())).to_integer()).collect();
                        let r = &bd.b * mu * Rational::from_integer(d.clone());
                        IntBounder { c, d, p: r.numer().clone(), q: r.denom().clone() }
                    })
                    .collect()
            })
            .collect();
        LevelRanges { bounders }
    }

    #[cfg(test)]
    pub(crate) fn sizes(&self) -> Vec<usize> {
        self.bounders.iter().zip(&self.side).map(|(b, s)| b.len() + s.len()).collect()
    }
}

fn prune(constraints: Vec<Constraint>) -> Vec<Constraint> {
    // group by direction, sign-normalized so the first nonzero entry is 1
    let mut groups: HashMap<Vec<Rational>, Vec<(Rational, Rows)>> = HashMap::new();
    let mut order = Vec::new();
    for c in constraints {
        let lead = c.u.iter().find(|e| !e.is_zero()).expect("nonzero constraint").clone();
        let dir: Vec<Rational> = c.u.iter().map(|e| e / &lead).collect();
        let scale = lead.abs();
        let entry = groups.entry(dir.clone()).or_insert_with(|| {
            order.push(dir);
            Vec::new()
        });
        entry.push((scale, c.rows));
    }
    let mut out = Vec::new();
    for dir in order {
        let members = &groups[&dir];
        for (i, (scale, rows)) in members.iter().enumerate() {
            let dominated = members
                .iter()
                .enumerate()
                .any(|(j, (s2, r2))| j != i && s2 >= scale && r2.is_subset(rows) && (s2 > scale || r2 != rows || j < i));
            if !dominated {
                out.push(Constraint { u: dir.iter().map(|e| e * scale).collect(), rows: rows.clone() });
            }
        }
    }
    out
}
