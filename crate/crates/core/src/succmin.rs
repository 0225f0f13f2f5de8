//! Successive minima `λ₁ ≤ … ≤ λ_d` with witnesses, and the coordinate-aligned
//! form of an instance.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::body::{SliceState, Slicer, SymmetricBody};
use crate::enumerate::{any_point, coordinate_radius, count_within, enumerate};
use crate::error::{Error, Result};
use crate::gauge::GaugeValue;
use crate::lattice::{align_witnesses, Lattice};
use crate::matrix::{Echelon, Matrix};
use crate::rational::{int, rat, rat_int, Integer, Rational};

/// Above this many points in `μK` the search level is halved before the
/// doubling phase starts.
const SEARCH_POINTS: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimaResult {
    pub minima: Vec<GaugeValue>,
    /// `zⁱ` in lattice basis coordinates, with `gauge(B·zⁱ) = λᵢ`.
    pub witnesses: Vec<Vec<Integer>>,
}

impl MinimaResult {
    pub fn dim(&self) -> usize {
        self.minima.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalInstance {
    /// The body over `Z^d` after the lattice basis and the aligning
    /// unimodular map have been folded in.
    pub body: SymmetricBody,
    pub minima: MinimaResult,
    /// The aligning map `U`; witnesses are `U·zⁱ`.
    pub unimodular: Matrix,
}

fn to_rationals(v: &[Integer]) -> Vec<Rational> {
    v.iter().cloned().map(rat_int).collect()
}

/// First nonzero coordinate positive.
fn sign_canonical(v: &[Integer]) -> bool {
    v.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_positive)
}

/// Order among points of equal gauge: lexicographic on absolute values, then
/// on the signed coordinates.
fn tie_break(a: &[Integer], b: &[Integer]) -> Ordering {
    a.iter().map(Signed::abs).cmp(b.iter().map(Signed::abs)).then_with(|| a.cmp(b))
}

/// Exact successive minima of `K` with respect to `Λ`.
///
/// `λᵢ` is the least gauge over lattice points outside the span of
/// `z¹,…,z^{i−1}`. It is searched in a unimodular frame `z = M·w` in which
/// that span is `{w₁ = … = w_{d−i+1} = 0}`, so whole subtrees of the walk
/// are skipped: a strict walk below the best gauge found so far, tightened at
/// every hit, gives `λᵢ`. The witness is then the first point of gauge `λᵢ`
/// outside the span in the frame's tie order: coordinates in turn, each
/// ordered by absolute value and then sign, with the first nonzero one
/// positive. Witnesses are reported with their first nonzero coordinate
/// positive.
pub fn successive_minima(k: &SymmetricBody, lat: &Lattice) -> Result<MinimaResult> {
    let d = k.dim();
    if lat.dim() != d {
        return Err(Error::Dimension { expected: d, got: lat.dim() });
    }
    let body = if lat.is_standard() { k.clone() } else { k.preimage(lat.basis())? };
    let mut minima = Vec::with_capacity(d);
    let mut witnesses: Vec<Vec<Integer>> = Vec::with_capacity(d);
    for i in 0..d {
        let frame = search_frame(&witnesses, d)?;
        let framed = body.preimage(&frame)?;
        let free = d - i;
        let lambda = least_gauge_outside(&framed, free);
        let w = first_at_level(&framed, free, &lambda)
            .ok_or_else(|| Error::Invariant(format!("no lattice point of gauge {lambda} outside the span of {i} witnesses")))?;
        let mut z: Vec<Integer> = frame.mul_int_vec(&w)?.into_iter().map(|e| e.to_integer()).collect();
        if !sign_canonical(&z) {
            z.iter_mut().for_each(|e| *e = -&*e);
        }
        minima.push(lambda);
        witnesses.push(z);
    }
    Ok(MinimaResult { minima, witnesses })
}

/// `M` unimodular with `lin{z¹,…,zᵏ} = M·{w₁ = … = w_{d−k} = 0}`.
fn search_frame(witnesses: &[Vec<Integer>], d: usize) -> Result<Matrix> {
    let k = witnesses.len();
    if k == 0 {
        return Ok(Matrix::identity(d));
    }
    // V·zʲ ∈ lin{e¹,…,eᵏ}; w lists y_{k+1..d} before y_{1..k}
    let v_inv = align_witnesses(witnesses)?.inverse()?;
    let cols: Vec<Vec<Rational>> = (k..d).chain(0..k).map(|j| v_inv.column(j)).collect();
    Matrix::from_columns(&cols)
}

/// Values of one coordinate in tie order: by absolute value, negative
/// first; only nonnegative ones when `positive`.
fn tie_order(lo: Integer, hi: Integer, positive: bool) -> impl Iterator<Item = Integer> {
    let lo = if positive && lo.is_negative() { Integer::zero() } else { lo };
    // merge of the nonnegative values upwards and the negative ones downwards
    let mut up = std::cmp::max(lo.clone(), Integer::zero());
    let mut down = std::cmp::min(hi.clone(), int(-1));
    std::iter::from_fn(move || {
        let up_ok = up <= hi;
        if down >= lo && (!up_ok || -&down <= up) {
            down -= 1;
            Some(&down + 1)
        } else if up_ok {
            up += 1;
            Some(&up - 1)
        } else {
            None
        }
    })
}

/// Depth-first walk over `level·K` (or its interior) in tie order, skipping
/// points whose first `free` coordinates vanish and keeping only the
/// representative of `±x` whose first nonzero coordinate is positive.
struct FrameWalk<'a> {
    body: &'a SymmetricBody,
    free: usize,
    level: GaugeValue,
    strict: bool,
    slicer: Slicer,
}

impl<'a> FrameWalk<'a> {
    fn new(body: &'a SymmetricBody, free: usize, level: GaugeValue, strict: bool) -> Self {
        let slicer = body.slicer(&level, strict);
        Self { body, free, level, strict, slicer }
    }

    /// Calls `f` on every candidate leaf with its gauge; `f` returns `true`
    /// to stop. Ranges already being walked may be stale if `f` lowered the
    /// level, so leaves are always checked against the current level.
    fn walk(&mut self, f: &mut dyn FnMut(&mut Self, &[Integer], GaugeValue) -> bool) -> bool {
        let mut prefix = Vec::with_capacity(self.body.dim());
        self.visit(&mut prefix, &SliceState::default(), f)
    }

    fn visit(
        &mut self,
        prefix: &mut Vec<Integer>,
        state: &SliceState,
        f: &mut dyn FnMut(&mut Self, &[Integer], GaugeValue) -> bool,
    ) -> bool {
        let d = self.body.dim();
        let Some((lo, hi)) = self.slicer.range(prefix, state) else { return false };
        let zero_so_far = prefix.iter().all(Zero::is_zero);
        for x in tie_order(lo, hi, zero_so_far) {
            prefix.push(x);
            let skip = prefix.len() == self.free && prefix.iter().all(Zero::is_zero);
            let stop = if skip {
                false
            } else if prefix.len() == d {
                let g = self.body.gauge_int(prefix).expect("dimension matches");
                let inside = if self.strict { g < self.level } else { g <= self.level };
                inside && f(self, prefix, g)
            } else {
                let next = self.slicer.advance(prefix, state);
                self.visit(prefix, &next, f)
            };
            prefix.pop();
            if stop {
                return true;
            }
        }
        false
    }

    fn lower_to(&mut self, level: GaugeValue) {
        self.slicer = self.body.slicer(&level, self.strict);
        self.level = level;
    }
}

/// Least gauge over points of `Z^d` whose first `free` coordinates do not
/// all vanish.
fn least_gauge_outside(body: &SymmetricBody, free: usize) -> GaugeValue {
    let d = body.dim();
    let start = (0..free)
        .map(|j| {
            let e: Vec<Integer> = (0..d).map(|i| if i == j { int(1) } else { int(0) }).collect();
            body.gauge_int(&e).expect("dimension matches")
        })
        .min()
        .expect("at least one free coordinate");
    let mut walk = FrameWalk::new(body, free, start, true);
    walk.walk(&mut |w, _, g| {
        w.lower_to(g);
        false
    });
    walk.level
}

/// First point of gauge exactly `level` in tie order, outside the span.
fn first_at_level(body: &SymmetricBody, free: usize, level: &GaugeValue) -> Option<Vec<Integer>> {
    let mut found = None;
    FrameWalk::new(body, free, level.clone(), false).walk(&mut |_, x, g| {
        let hit = g == *level;
        if hit {
            found = Some(x.to_vec());
        }
        hit
    });
    found
}

/// Reference version of [`successive_minima`]: the search level `μ` starts at
/// 1, is halved while `μK` holds many lattice points and then doubled until
/// `μK ∩ Λ` spans. The points found are sorted by gauge and swept greedily for
/// independence. Only the sign-canonical representative of `±v` (first
/// nonzero coordinate positive) is kept, and equal gauges are ordered
/// lexicographically on absolute values, then on the signed coordinates.
pub fn successive_minima_by_sweep(k: &SymmetricBody, lat: &Lattice) -> Result<MinimaResult> {
    let d = k.dim();
    if lat.dim() != d {
        return Err(Error::Dimension { expected: d, got: lat.dim() });
    }
    let body = if lat.is_standard() { k.clone() } else { k.preimage(lat.basis())? };
    let std = Lattice::standard(d);

    let mut mu = rat(1, 1);
    loop {
        match count_within(&body, &std, &GaugeValue::from(mu.clone()), false, SEARCH_POINTS)? {
            Some(c) if c <= int(SEARCH_POINTS as i64) => break,
            _ => mu /= rat(2, 1),
        }
    }
    let candidates = loop {
        let pts = enumerate(&body, &std, &GaugeValue::from(mu.clone()), false)?;
        let mut span = Echelon::default();
        for p in &pts.points {
            span.insert(&to_rationals(p));
            if span.len() == d {
                break;
            }
        }
        if span.len() == d {
            break pts.points;
        }
        mu *= rat(2, 1);
    };

    let mut scored: Vec<(GaugeValue, Vec<Integer>)> = candidates
        .into_iter()
        .filter(|p| sign_canonical(p))
        .map(|p| (body.gauge_int(&p).expect("dimension matches"), p))
        .collect();
    scored.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| tie_break(&a.1, &b.1)));

    let mut span = Echelon::default();
    let mut minima = Vec::with_capacity(d);
    let mut witnesses = Vec::with_capacity(d);
    for (g, p) in scored {
        if span.insert(&to_rationals(&p)) {
            minima.push(g);
            witnesses.push(p);
            if minima.len() == d {
                break;
            }
        }
    }
    debug_assert_eq!(minima.len(), d);
    Ok(MinimaResult { minima, witnesses })
}

/// `λ₁` by exhaustive scan: the smallest gauge over nonzero `y ∈ [-R, R]^d`,
/// with `R` grown until it covers every point at or below the best gauge seen.
pub fn first_minimum_oracle(k: &SymmetricBody, lat: &Lattice) -> Result<GaugeValue> {
    let d = k.dim();
    if lat.dim() != d {
        return Err(Error::Dimension { expected: d, got: lat.dim() });
    }
    let mut r: u64 = 1;
    loop {
        let ri = r as i64;
        let mut best: Option<GaugeValue> = None;
        let mut y = vec![-ri; d];
        'scan: loop {
            if y.iter().any(|&v| v != 0) {
                let coords: Vec<Integer> = y.iter().map(|&v| int(v)).collect();
                let g = k.gauge(&lat.point(&coords)?)?;
                if best.as_ref().is_none_or(|b| g < *b) {
                    best = Some(g);
                }
            }
            let mut i = 0;
            loop {
                if i == d {
                    break 'scan;
                }
                if y[i] < ri {
                    y[i] += 1;
                    break;
                }
                y[i] = -ri;
                i += 1;
            }
        }
        let best = best.expect("scan includes e¹");
        let need = coordinate_radius(k, lat, &best)?;
        if need <= r {
            return Ok(best);
        }
        r = need;
    }
}

/// Folds the lattice basis `B` and the aligning unimodular `U` into the body:
/// `K'' = (B·U⁻¹)⁻¹K` over `Z^d`, with witnesses `U·zⁱ ∈ lin{e¹,…,eⁱ}`.
/// The minima are recomputed on the new instance and must agree exactly.
pub fn canonicalize(k: &SymmetricBody, lat: &Lattice) -> Result<CanonicalInstance> {
    let found = successive_minima(k, lat)?;
    canonicalize_with(k, lat, &found)
}

/// [`canonicalize`] reusing already computed minima.
pub fn canonicalize_with(k: &SymmetricBody, lat: &Lattice, found: &MinimaResult) -> Result<CanonicalInstance> {
    let u = align_witnesses(&found.witnesses)?;
    let map = lat.basis().mul(&u.inverse()?)?;
    let body = k.preimage(&map)?;
    let witnesses = found
        .witnesses
        .iter()
        .map(|z| {
            let v = u.mul_int_vec(z)?;
            Ok(v.into_iter().map(|e| e.to_integer()).collect())
        })
        .collect::<Result<Vec<Vec<Integer>>>>()?;

    for (i, w) in witnesses.iter().enumerate() {
        if w[i + 1..].iter().any(|e| !e.is_zero()) {
            return Err(Error::Invariant(format!("aligned witness {} leaves lin{{e1..e{}}}", i + 1, i + 1)));
        }
    }
    let again = successive_minima(&body, &Lattice::standard(k.dim()))?;
    if again.minima.iter().zip(&found.minima).any(|(a, b)| a.cmp(b) != Ordering::Equal) {
        return Err(Error::Invariant("successive minima changed under canonicalization".into()));
    }
    Ok(CanonicalInstance { body, minima: MinimaResult { minima: found.minima.clone(), witnesses }, unimodular: u })
}

/// Whether `int(λᵢK'') ∩ Z^d ⊆ lin{e¹,…,e^{i−1}}` for every `i`, checked by
/// strict enumeration.
pub fn satisfies_aligned_interiors(c: &CanonicalInstance) -> Result<bool> {
    let d = c.body.dim();
    let std = Lattice::standard(d);
    for (i, lambda) in c.minima.minima.iter().enumerate() {
        let pts = enumerate(&c.body, &std, lambda, true)?;
        if pts.points.iter().any(|p| p[i..].iter().any(|e| !e.is_zero())) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether strict enumeration at each `λᵢ` stays inside `lin{z¹,…,z^{i−1}}`.
pub fn witnesses_are_minimal(k: &SymmetricBody, lat: &Lattice, m: &MinimaResult) -> Result<bool> {
    let d = k.dim();
    for (i, lambda) in m.minima.iter().enumerate() {
        // x lies in lin{z¹,…,zⁱ⁻¹} iff the last d-i+1 rows of the aligning matrix vanish on it
        let normals: Vec<Vec<Integer>> = if i == 0 {
            Matrix::identity(d).to_integer_rows()?
        } else {
            align_witnesses(&m.witnesses[..i])?.to_integer_rows()?.split_off(i)
        };
        let outside = |x: &[Integer]| normals.iter().any(|n| !n.iter().zip(x).map(|(a, b)| a * b).sum::<Integer>().is_zero());
        if any_point(k, lat, lambda, true, outside)? {
            return Ok(false);
        }
    }
    Ok(true)
}
