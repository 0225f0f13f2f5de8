//! Random instances shared by the unit tests.

use proptest::prelude::*;

use crate::body::SymmetricBody;
use crate::gauge::GaugeValue;
use crate::lattice::Lattice;
use crate::matrix::Matrix;
use crate::rational::{rat, rat_int, Rational};

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-5i64..=5, 1i64..=3).prop_map(|(p, q)| rat(p, q))
}

pub fn body(d: usize) -> impl Strategy<Value = SymmetricBody> {
    let boxes = prop::collection::vec((1i64..=5, 1i64..=2), d)
        .prop_map(|w| SymmetricBody::boxed(w.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap());
    let polys =
        (d..=d + 2).prop_flat_map(move |m| prop::collection::vec(small_rational(), m * d)).prop_filter_map("rank", move |es| {
            SymmetricBody::hpolytope(Matrix::from_rows(es.chunks(d).map(<[Rational]>::to_vec).collect()).ok()?).ok()
        });
    let ellipsoids = prop::collection::vec(small_rational(), d * d).prop_filter_map("definite", move |es| {
        let m = Matrix::from_rows(es.chunks(d).map(<[Rational]>::to_vec).collect()).ok()?;
        let mut q = m.transpose().mul(&m).ok()?;
        for i in 0..d {
            q[(i, i)] += rat(1, 3);
        }
        SymmetricBody::ellipsoid(q).ok()
    });
    prop_oneof![boxes, polys, ellipsoids]
}

pub fn lattice(d: usize) -> impl Strategy<Value = Lattice> {
    prop::collection::vec(-2i64..=2, d * d)
        .prop_flat_map(move |es| (Just(es), prop::collection::vec((1i64..=3, 1i64..=2), d)))
        .prop_filter_map("nonsingular", move |(es, diag)| {
            let m = Matrix::from_rows(es.chunks(d).map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect()).ok()?;
            let dm = Matrix::diagonal(&diag.iter().map(|&(p, q)| rat(p, q)).collect::<Vec<_>>());
            Lattice::new(m.mul(&dm).ok()?).ok()
        })
}

pub fn instance() -> impl Strategy<Value = (SymmetricBody, Lattice)> {
    (1usize..=3).prop_flat_map(|d| (body(d), lattice(d)))
}

pub fn level() -> impl Strategy<Value = GaugeValue> {
    prop_oneof![
        (1i64..=4, 1i64..=2).prop_map(|(p, q)| GaugeValue::from(rat(p, q))),
        (1i64..=9, 1i64..=2).prop_map(|(p, q)| GaugeValue::sqrt(rat(p, q))),
    ]
}
