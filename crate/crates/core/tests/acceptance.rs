//! Acceptance criteria, run in order with one PASS/FAIL line each.
//!
//! `cargo test --test acceptance` runs everything; the process fails when any
//! asserted criterion fails.

use std::time::{Duration, Instant};

use num_traits::{One, Signed};

use latmin::body::volume_box;
use latmin::bounds::{conjecture_rhs, lemma_bound_with_count};
use latmin::enumerate::{coordinate_radius, count, count_oracle, volume_estimate};
use latmin::harness::{
    campaign, campaign_csv, fuzz_specs, generate, verify_spec, CheckStatus, InstanceSpec, LatticeKind, VerificationReport,
    VerifyOptions, DEFAULT_RANGE,
};
use latmin::rational::{floor, format_rational, int, rat, rat_int};
use latmin::rng::SplitMix64;
use latmin::succmin::{first_minimum_oracle, successive_minima};
use latmin::{BodyKind, GaugeValue, Integer, Lattice, Matrix, Rational, Shape, Sublattice};

const BOX_SEED: u64 = 0x5eed_0001;
const FUZZ_SEED: u64 = 0x5eed_0003;
const PLANE_SEED: u64 = 0x5eed_0007;
const ORACLE_SEED: u64 = 0x5eed_0008;
const LEMMA_SEED: u64 = 0x5eed_0005;

const FUZZ_INSTANCES: usize = 500;

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    /// Printed as FAIL but not counted against the run; see `detail`.
    known_conflict: bool,
}

fn line(o: &Outcome) {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    println!("criterion {:>2} {verdict}: {}: {}", o.id, o.title, o.detail);
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn box_corpus() -> Vec<InstanceSpec> {
    fuzz_specs(BOX_SEED, 50, &[2, 3, 4], &[BodyKind::Box], &[LatticeKind::Identity], DEFAULT_RANGE)
}

fn halfwidths(spec: &InstanceSpec) -> Vec<Rational> {
    let (k, _) = generate(spec).expect("generated");
    match k.shape() {
        Shape::Box { halfwidths } => halfwidths.clone(),
        _ => unreachable!("box corpus"),
    }
}

fn box_equality() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for spec in box_corpus() {
        let (k, lat) = generate(&spec).expect("generated");
        let m = successive_minima(&k, &lat).expect("minima");
        let product = m.minima.iter().fold(GaugeValue::one(), |acc, l| acc.mul(l));
        let lhs = product.mul_rational(&volume_box(&k).expect("box"));
        if lhs != GaugeValue::from(rat_int(int(1) << spec.dim)) {
            bad.push(spec.seed);
        }
    }
    let took = start.elapsed();
    Outcome {
        id: 1,
        title: "box equality (prod lambda_i) vol = 2^d",
        pass: bad.is_empty() && took < Duration::from_secs(10),
        detail: format!("50 boxes, {} violations, {} (limit 10s)", bad.len(), secs(took)),
        known_conflict: false,
    }
}

fn box_conjecture_equality() -> Outcome {
    // count = prod(2 floor(w) + 1) always; it reaches prod floor(2w + 1)
    // exactly when every halfwidth has fractional part below 1/2
    let mut literal_misses = 0;
    let mut corrected_ok = true;
    for spec in box_corpus() {
        let (k, lat) = generate(&spec).expect("generated");
        let w = halfwidths(&spec);
        let n = count(&k, &lat, &GaugeValue::one(), false).expect("count");
        let rhs = conjecture_rhs(&successive_minima(&k, &lat).expect("minima")).expect("rhs");
        let exact: Integer = w.iter().map(|w| floor(w) * 2 + 1).product();
        let small_fractions = w.iter().all(|w| (w - rat_int(floor(w))) * rat(2, 1) < Rational::one());
        corrected_ok &= n == exact && n <= rhs && ((n == rhs) == small_fractions);
        if n != rhs {
            literal_misses += 1;
        }
    }
    Outcome {
        id: 2,
        title: "box count = prod floor(2/lambda_i + 1)",
        pass: literal_misses == 0,
        detail: format!(
            "{literal_misses}/50 boxes differ (halfwidths with fractional part >= 1/2); \
             corrected statement count = prod(2 floor(w_i) + 1), equal iff all fractions < 1/2: {}",
            if corrected_ok { "holds" } else { "VIOLATED" }
        ),
        known_conflict: corrected_ok,
    }
}

fn fuzz_corpus() -> Vec<InstanceSpec> {
    fuzz_specs(FUZZ_SEED, FUZZ_INSTANCES, &[2, 3, 4], &BodyKind::ALL, &LatticeKind::ALL, DEFAULT_RANGE)
}

fn failures(reports: &[VerificationReport], check: &str) -> usize {
    reports.iter().filter(|r| r.status(check) != CheckStatus::Pass).count()
}

fn theorem_strict(reports: &[VerificationReport], took: Duration) -> Outcome {
    let bad = failures(reports, "thm-1.4");
    let kinds = BodyKind::ALL.map(|k| reports.iter().filter(|r| r.body_kind == k).count());
    Outcome {
        id: 3,
        title: "count < 2^(d-1) prod q_i",
        pass: bad == 0 && took < Duration::from_secs(300) && kinds.iter().all(|&c| c > 0),
        detail: format!(
            "{} instances (box/hpolytope/ellipsoid {}/{}/{}), {bad} failures, campaign {} (limit 300s)",
            reports.len(),
            kinds[0],
            kinds[1],
            kinds[2],
            secs(took)
        ),
        known_conflict: false,
    }
}

fn first_bound(reports: &[VerificationReport]) -> Outcome {
    let bad = failures(reports, "eq-1.4");
    Outcome {
        id: 4,
        title: "count <= q_1^d",
        pass: bad == 0,
        detail: format!("{} instances, {bad} failures", reports.len()),
        known_conflict: false,
    }
}

fn lemma(specs: &[InstanceSpec], reports: &[VerificationReport]) -> Outcome {
    let mut rng = SplitMix64::new(LEMMA_SEED);
    let mut checked = 0;
    let mut bad = 0;
    for (spec, report) in specs.iter().zip(reports) {
        let (k, lat) = generate(spec).expect("generated");
        for _ in 0..3 {
            let diag: Vec<Rational> = (0..spec.dim).map(|_| rat(rng.range(1, 4), 1)).collect();
            let sub = Sublattice::new(lat.clone(), Matrix::diagonal(&diag)).expect("sublattice");
            let b = lemma_bound_with_count(&k, &sub, report.count.clone()).expect("lemma");
            checked += 1;
            if !b.holds {
                bad += 1;
            }
        }
    }
    // the canonical chain sublattice of every instance as well
    let chain_bad = failures(reports, "lemma-2.1");
    Outcome {
        id: 5,
        title: "count(K, L) <= index * count(2K, sub)",
        pass: bad == 0 && chain_bad == 0,
        detail: format!("{checked} random diagonal sublattices, {bad} failures; chain sublattices {chain_bad} failures"),
        known_conflict: false,
    }
}

fn pipeline(reports: &[VerificationReport]) -> Outcome {
    let mut bad = 0;
    for r in reports {
        let chain = r.chain.chain();
        let main = r.bounds.main.clone().expect("d >= 2");
        let ok = chain.is_valid_for(&r.chain.terms())
            && r.status("kernel") == CheckStatus::Pass
            && r.count <= chain.product()
            && chain.product() < main;
        if !ok {
            bad += 1;
        }
    }
    Outcome {
        id: 6,
        title: "divisor chain, kernel and count <= prod n_i < 2^(d-1) prod q_i",
        pass: bad == 0,
        detail: format!("{} canonicalized instances, {bad} failures", reports.len()),
        known_conflict: false,
    }
}

fn plane() -> Outcome {
    let start = Instant::now();
    let specs = fuzz_specs(PLANE_SEED, 1000, &[2], &BodyKind::ALL, &LatticeKind::ALL, DEFAULT_RANGE);
    let (reports, _) = campaign(&specs, &VerifyOptions::default()).expect("campaign");
    let bad = reports.iter().filter(|r| !r.conjecture_holds || r.status("conj-d2") != CheckStatus::Pass).count();
    let took = start.elapsed();
    Outcome {
        id: 7,
        title: "d = 2: count <= q_1 q_2",
        pass: bad == 0 && took < Duration::from_secs(120),
        detail: format!("1000 instances, {bad} failures, {} (limit 120s)", secs(took)),
        known_conflict: false,
    }
}

fn oracles() -> Outcome {
    let specs = fuzz_specs(ORACLE_SEED, 100, &[1, 2, 3], &BodyKind::ALL, &LatticeKind::ALL, 5);
    let (mut count_bad, mut min_bad) = (0, 0);
    let one = GaugeValue::one();
    for spec in &specs {
        let (k, lat) = generate(spec).expect("generated");
        let radius = coordinate_radius(&k, &lat, &one).expect("radius");
        if count(&k, &lat, &one, false).unwrap() != count_oracle(&k, &lat, &one, false, radius).unwrap() {
            count_bad += 1;
        }
        let m = successive_minima(&k, &lat).expect("minima");
        if m.minima[0] != first_minimum_oracle(&k, &lat).expect("oracle") {
            min_bad += 1;
        }
    }
    Outcome {
        id: 8,
        title: "count and lambda_1 match brute force",
        pass: count_bad == 0 && min_bad == 0,
        detail: format!("100 instances d <= 3, {count_bad} count mismatches, {min_bad} lambda_1 mismatches"),
        known_conflict: false,
    }
}

fn minkowski(specs: &[InstanceSpec], reports: &[VerificationReport]) -> Outcome {
    let finest = VerifyOptions::finest();
    let mink = |r: &VerificationReport| r.status("mink-1") == CheckStatus::Pass && r.status("mink-2") == CheckStatus::Pass;
    let (mut boxes, mut box_bad) = (0, 0);
    let (mut others, mut other_bad) = (0, 0);
    let start = Instant::now();
    for (spec, r) in specs.iter().zip(reports) {
        if r.body_kind == BodyKind::Box {
            boxes += 1;
            // exact volume, no tolerance
            if !(mink(r) && r.volume.resolution.is_none() && r.volume.slack.is_one()) {
                box_bad += 1;
            }
        } else {
            others += 1;
            let fine = verify_spec(spec, &finest).expect("verify");
            if !(mink(&fine) && fine.volume.resolution == Some(rat(1, 32))) {
                other_bad += 1;
            }
        }
    }
    Outcome {
        id: 9,
        title: "Minkowski first and second theorems",
        pass: box_bad == 0 && other_bad == 0,
        detail: format!(
            "{boxes} boxes exact ({box_bad} violations); {others} polytopes/ellipsoids at r = 1/32, \
             tolerance (1 + r t)^d, {other_bad} violations, {:.1?}",
            start.elapsed()
        ),
        known_conflict: false,
    }
}

fn riemann() -> Outcome {
    let k = latmin::SymmetricBody::cube(2, Rational::one()).expect("box");
    let lat = Lattice::standard(2);
    let mut estimates = Vec::new();
    let mut ok = true;
    let mut r = Rational::one();
    for _ in 0..=5 {
        let est = volume_estimate(&k, &lat, &r).expect("estimate");
        let err = (est.clone() - rat(4, 1)).abs();
        let bound = &r * rat(8, 1) + &r * &r * rat(4, 1);
        ok &= err <= bound;
        estimates.push(format!("r={} est={}", format_rational(&r), format_rational(&est)));
        r /= rat(2, 1);
    }
    Outcome {
        id: 10,
        title: "Riemann estimate of the unit square within 8r + 4r^2",
        pass: ok,
        detail: estimates.join(", "),
        known_conflict: false,
    }
}

fn determinism(specs: &[InstanceSpec], first_csv: &str) -> Outcome {
    let (reports, _) = campaign(specs, &VerifyOptions::default()).expect("campaign");
    let again = campaign_csv(&reports);
    Outcome {
        id: 11,
        title: "repeated campaign gives a byte-identical CSV",
        pass: again == first_csv && !first_csv.is_empty(),
        detail: format!("{} bytes, {} rows", first_csv.len(), first_csv.lines().count() - 1),
        known_conflict: false,
    }
}

fn main() {
    let mut outcomes = Vec::new();
    let mut run = |o: Outcome| {
        line(&o);
        outcomes.push(o);
    };

    run(box_equality());
    run(box_conjecture_equality());

    let specs = fuzz_corpus();
    let start = Instant::now();
    let (reports, summary) = campaign(&specs, &VerifyOptions::default()).expect("campaign");
    let took = start.elapsed();
    let csv = campaign_csv(&reports);
    assert!(summary.bug_alarms.is_empty(), "bug alarms at seeds {:?}", summary.bug_alarms);

    run(theorem_strict(&reports, took));
    run(first_bound(&reports));
    run(lemma(&specs, &reports));
    run(pipeline(&reports));
    run(plane());
    run(oracles());
    run(minkowski(&specs, &reports));
    run(riemann());
    run(determinism(&specs, &csv));

    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.pass && !o.known_conflict).map(|o| o.id).collect();
    let conflicts: Vec<u32> = outcomes.iter().filter(|o| !o.pass && o.known_conflict).map(|o| o.id).collect();
    println!(
        "acceptance: {} passed, {} failed {:?}, {} printed FAIL as stated but hold in corrected form {:?}",
        outcomes.iter().filter(|o| o.pass).count(),
        failed.len(),
        failed,
        conflicts.len(),
        conflicts
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
