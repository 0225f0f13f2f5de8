use super::*;
use crate::enumerate::{count_oracle, volume_estimate};
use crate::rational::{floor, rat};
use crate::succmin::{canonicalize, successive_minima};
use crate::testgen::instance;
use proptest::prelude::*;

fn minima(ls: Vec<GaugeValue>) -> MinimaResult {
    let d = ls.len();
    let witnesses = (0..d).map(|i| (0..d).map(|j| int(i64::from(i == j))).collect()).collect();
    MinimaResult { minima: ls, witnesses }
}

fn g(p: i64, q: i64) -> GaugeValue {
    GaugeValue::from(rat(p, q))
}

fn ints(v: &[i64]) -> Vec<Integer> {
    v.iter().map(|&x| int(x)).collect()
}

fn terms(v: &[i64]) -> FloorTerms {
    FloorTerms { q: ints(v) }
}

#[test]
fn floor_term_examples() {
    assert_eq!(floor_terms(&minima(vec![g(1, 1), g(1, 1)])).unwrap().q, ints(&[3, 3]));
    assert_eq!(floor_terms(&minima(vec![g(2, 3), g(2, 3)])).unwrap().q, ints(&[4, 4]));
    assert_eq!(floor_terms(&minima(vec![g(9, 10), g(1, 1)])).unwrap().q, ints(&[3, 3]));
    assert!(floor_terms(&minima(vec![g(0, 1)])).is_err());
    // sqrt kind: λ = sqrt(s)
    assert_eq!(floor_term(&GaugeValue::sqrt(rat(1, 1))).unwrap(), int(3));
    assert_eq!(floor_term(&GaugeValue::sqrt(rat(4, 9))).unwrap(), int(4));
    assert_eq!(floor_term(&GaugeValue::sqrt(rat(2, 1))).unwrap(), int(2)); // 2/1.414 + 1 = 2.41
    assert_eq!(floor_term(&GaugeValue::sqrt(rat(1, 2))).unwrap(), int(3)); // 2·1.414 + 1 = 3.83
}

#[test]
fn floor_term_matches_the_defining_inequality() {
    // m is the unique integer with (m−1)²·λ² ≤ 4 < m²·λ²
    for p in 1..=40 {
        for q in 1..=12 {
            for lambda in [GaugeValue::sqrt(rat(p, q)), g(p, q)] {
                let m = floor_term(&lambda).unwrap();
                let s = lambda.square();
                let sq = |v: Integer| rat_int(&v * &v) * &s;
                assert!(sq(&m - 1) <= rat(4, 1) && sq(m.clone()) > rat(4, 1), "λ = {lambda}, m = {m}");
            }
        }
    }
}

#[test]
fn right_hand_side_examples() {
    let ones = |d| minima(vec![g(1, 1); d]);
    assert_eq!(first_bound_rhs(&ones(2)).unwrap(), int(9));
    assert_eq!(first_bound_rhs(&minima(vec![g(2, 3), g(1, 1), g(1, 1)])).unwrap(), int(64));
    assert_eq!(first_bound_rhs(&minima(vec![g(9, 10), g(1, 1)])).unwrap(), int(9));

    assert_eq!(conjecture_rhs(&ones(2)).unwrap(), int(9));
    assert_eq!(conjecture_rhs(&minima(vec![g(1, 3), g(1, 1)])).unwrap(), int(21));
    assert_eq!(conjecture_rhs(&minima(vec![g(2, 3), g(2, 3), g(1, 1)])).unwrap(), int(48));

    assert_eq!(main_bound_rhs(&ones(2)).unwrap(), int(18));
    assert_eq!(main_bound_rhs(&minima(vec![g(1, 3), g(1, 1)])).unwrap(), int(42));
    assert_eq!(main_bound_rhs(&ones(3)).unwrap(), int(108));
    assert!(main_bound_rhs(&ones(1)).is_err());
}

#[test]
fn divisor_chain_examples() {
    assert_eq!(divisor_chain(&terms(&[3, 3, 3])).unwrap().n, ints(&[3, 3, 3]));
    assert_eq!(divisor_chain(&terms(&[6, 4, 3])).unwrap().n, ints(&[6, 6, 3]));
    assert_eq!(divisor_chain(&terms(&[5, 2])).unwrap().n, ints(&[6, 2]));
    assert_eq!(divisor_chain(&terms(&[7])).unwrap().n, ints(&[7]));
    assert!(divisor_chain(&terms(&[2, 3])).is_err());
    assert!(divisor_chain(&terms(&[3, 0])).is_err());
    assert!(divisor_chain(&terms(&[])).is_err());
}

/// All nonincreasing sequences of length `d` with entries in `1..=top`.
fn nonincreasing(d: usize, top: i64, f: &mut dyn FnMut(&[i64])) {
    fn go(seq: &mut Vec<i64>, d: usize, top: i64, f: &mut dyn FnMut(&[i64])) {
        if seq.len() == d {
            f(seq);
            return;
        }
        for v in 1..=top {
            seq.push(v);
            go(seq, d, v, f);
            seq.pop();
        }
    }
    go(&mut Vec::new(), d, top, f);
}

#[test]
fn divisor_chain_is_valid_exhaustively() {
    // every nonincreasing sequence with entries ≤ 30 for d ≤ 3; d = 4..6 on
    // entries ≤ 12 (the full space at 30 has ~10⁶ sequences at d = 6)
    let mut checked = 0u64;
    for (d, top) in [(1, 30), (2, 30), (3, 30), (4, 30), (5, 14), (6, 12)] {
        nonincreasing(d, top, &mut |q| {
            let q = terms(q);
            let chain = divisor_chain(&q).unwrap();
            assert!(chain.is_valid_for(&q), "q = {:?}, n = {:?}", q.q, chain.n);
            checked += 1;
        });
    }
    assert!(checked > 50_000);
}

#[test]
fn chain_sublattice_examples() {
    let chain = |v: &[i64]| DivisorChain { n: ints(v) };
    assert_eq!(chain_sublattice(&chain(&[3, 3])).unwrap().index(), &int(9));
    assert_eq!(chain_sublattice(&chain(&[6, 6, 3])).unwrap().index(), &int(108));
    assert_eq!(chain_sublattice(&chain(&[1, 1, 1])).unwrap().lattice(), Lattice::standard(3));
}

#[test]
fn kernel_check_examples() {
    let unit = SymmetricBody::cube(2, rat(1, 1)).unwrap();
    assert!(kernel_check(&unit, &DivisorChain { n: ints(&[3, 3]) }).unwrap());
    assert!(!kernel_check(&unit, &DivisorChain { n: ints(&[2, 2]) }).unwrap());

    let b13 = SymmetricBody::boxed(vec![rat(1, 1), rat(3, 1)]).unwrap();
    let c = canonicalize(&b13, &Lattice::standard(2)).unwrap();
    let chain = divisor_chain(&floor_terms(&c.minima).unwrap()).unwrap();
    assert_eq!(chain.n, ints(&[9, 3]));
    assert!(kernel_check(&c.body, &chain).unwrap());
}

#[test]
fn lemma_examples() {
    let z2 = Lattice::standard(2);
    let unit = SymmetricBody::cube(2, rat(1, 1)).unwrap();
    let three = Sublattice::scaled_parent(z2.clone(), &int(3)).unwrap();
    assert_eq!(lemma_bound(&unit, &z2, &three).unwrap(), LemmaBound { lhs: int(9), rhs: int(9), holds: true });

    let same = Sublattice::new(z2.clone(), Matrix::identity(2)).unwrap();
    let b = lemma_bound(&unit, &z2, &same).unwrap();
    assert!(b.holds && b.rhs == int(25));

    let square = SymmetricBody::hpolytope(Matrix::from_i64(&[&[1, 1], &[1, -1]])).unwrap();
    let two = Sublattice::scaled_parent(z2.clone(), &int(2)).unwrap();
    let b = lemma_bound(&square, &z2, &two).unwrap();
    let brute = count_oracle(&square, &two.lattice(), &GaugeValue::from(2), false, 2).unwrap();
    assert_eq!(b.lhs, int(5));
    assert_eq!(b.rhs, int(4) * brute);
    assert!(b.holds);

    let other = Sublattice::scaled_parent(Lattice::new(Matrix::identity(2).scaled(&rat(2, 1))).unwrap(), &int(2)).unwrap();
    assert!(lemma_bound(&unit, &z2, &other).is_err());
}

#[test]
fn minkowski_examples() {
    for d in 1..=4 {
        let m = minima(vec![g(1, 1); d]);
        let vol = rat_int(int(1) << d);
        assert!(minkowski_first_check(&m, &vol, &rat(1, 1)));
        assert!(minkowski_second_check(&m, &vol, &rat(1, 1)));
        assert!(!minkowski_second_check(&m, &(vol + rat(1, 100)), &rat(1, 1)));
    }
    let m = minima(vec![g(1, 3), g(1, 1)]);
    assert!(minkowski_first_check(&m, &rat(12, 1), &rat(1, 1)));
    assert!(minkowski_second_check(&m, &rat(12, 1), &rat(1, 1)));
    assert!(!minkowski_second_check(&m, &rat(13, 1), &rat(1, 1)));

    // Euclidean disc: λ = (1, 1), π ≤ vol estimate ≤ slack·π
    let z2 = Lattice::standard(2);
    let disc = SymmetricBody::ellipsoid(Matrix::identity(2)).unwrap();
    let m = successive_minima(&disc, &z2).unwrap();
    let r = rat(1, 32);
    let vol = volume_estimate(&disc, &z2, &r).unwrap();
    let slack = riemann_slack(&disc, &z2, &r).unwrap();
    assert!(minkowski_first_check_within(&m, &vol, &rat(1, 1), &slack));
    assert!(minkowski_second_check_within(&m, &vol, &rat(1, 1), &slack));
    // sqrt-kind product: sqrt(2)·vol with vol = 2 gives 2.83 ≤ 4, vol = 3 gives 4.24
    let m = minima(vec![GaugeValue::sqrt(rat(2, 1)), g(1, 1)]);
    assert!(minkowski_second_check(&m, &rat(2, 1), &rat(1, 1)));
    assert!(!minkowski_second_check(&m, &rat(3, 1), &rat(1, 1)));

    // rotated square |x₁ ± x₂| ≤ 1: area 2, λ = (1, 1)
    let square = SymmetricBody::hpolytope(Matrix::from_i64(&[&[1, 1], &[1, -1]])).unwrap();
    let m = successive_minima(&square, &z2).unwrap();
    assert_eq!(m.minima, vec![g(1, 1), g(1, 1)]);
    let vol = volume_estimate(&square, &z2, &r).unwrap();
    assert!(minkowski_second_check_within(&m, &vol, &rat(1, 1), &riemann_slack(&square, &z2, &r).unwrap()));
}

#[test]
fn riemann_slack_bounds_the_estimate() {
    // the estimate of a box over a sheared lattice stays below slack·vol
    let k = SymmetricBody::boxed(vec![rat(3, 2), rat(5, 3)]).unwrap();
    let lat = Lattice::new(Matrix::from_rows(vec![vec![rat(1, 1), rat(1, 2)], vec![rat(0, 1), rat(2, 3)]]).unwrap()).unwrap();
    let vol = volume_box(&k);
    for e in 0..=4 {
        let r = rat(1, 1 << e);
        let est = volume_estimate(&k, &lat, &r).unwrap();
        assert!(est <= riemann_slack(&k, &lat, &r).unwrap() * &vol);
    }
}

fn volume_box(k: &SymmetricBody) -> Rational {
    crate::body::volume_box(k).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn divisor_chain_is_valid(mut q in prop::collection::vec(1i64..=1000, 1..=6)) {
        q.sort_unstable_by(|a, b| b.cmp(a));
        let q = terms(&q);
        prop_assert!(divisor_chain(&q).unwrap().is_valid_for(&q));
    }

    #[test]
    fn pipeline_inequalities((k, lat) in instance()) {
        let c = canonicalize(&k, &lat).unwrap();
        let q = floor_terms(&c.minima).unwrap();
        prop_assert!(q.q.windows(2).all(|w| w[0] >= w[1]));
        let chain = divisor_chain(&q).unwrap();
        prop_assert!(chain.is_valid_for(&q));
        prop_assert!(kernel_check(&c.body, &chain).unwrap());

        let n = count(&k, &lat, &GaugeValue::one(), false).unwrap();
        prop_assert_eq!(&n, &count(&c.body, &Lattice::standard(k.dim()), &GaugeValue::one(), false).unwrap());
        let sub = chain_sublattice(&chain).unwrap();
        let lemma = lemma_bound(&c.body, &Lattice::standard(k.dim()), &sub).unwrap();
        prop_assert!(lemma.holds);
        prop_assert_eq!(&lemma.rhs, &chain.product());
        prop_assert!(n <= first_bound_rhs(&c.minima).unwrap());
        if k.dim() >= 2 {
            prop_assert!(chain.product() < main_bound_rhs(&c.minima).unwrap());
        }
        if k.dim() <= 2 {
            prop_assert!(n <= conjecture_rhs(&c.minima).unwrap());
        }
    }

    #[test]
    fn box_counts_against_the_conjecture(ws in prop::collection::vec((1i64..=9, 1i64..=4), 1..=4)) {
        // count = ∏(2⌊wᵢ⌋ + 1) ≤ ∏⌊2wᵢ + 1⌋, with equality iff every
        // fractional part of wᵢ is below 1/2
        let ws: Vec<Rational> = ws.iter().map(|&(p, q)| rat(p, q)).collect();
        let k = SymmetricBody::boxed(ws.clone()).unwrap();
        let z = Lattice::standard(k.dim());
        let m = successive_minima(&k, &z).unwrap();
        let n = count(&k, &z, &GaugeValue::one(), false).unwrap();
        prop_assert_eq!(&n, &ws.iter().map(|w| floor(w) * 2 + 1).product::<Integer>());
        let rhs = conjecture_rhs(&m).unwrap();
        let small_fractions = ws.iter().all(|w| w.fract() < rat(1, 2));
        prop_assert_eq!(n == rhs, small_fractions);
        prop_assert!(n <= rhs);

        let vol = volume_box(&k);
        let product = m.minima.iter().fold(GaugeValue::one(), |a, l| a.mul(l));
        prop_assert_eq!(product.mul_rational(&vol), GaugeValue::from(rat_int(int(1) << k.dim())));
        prop_assert!(minkowski_second_check(&m, &vol, &rat(1, 1)));
        prop_assert!(minkowski_first_check(&m, &vol, &rat(1, 1)));
    }
}
