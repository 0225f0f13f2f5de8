//! Seeded instance generation, the per-instance verification pipeline and
//! campaigns over many instances.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{volume_box, BodyKind, Shape, SymmetricBody};
use crate::bounds::{
    chain_sublattice, conjecture_rhs, divisor_chain, first_bound_rhs, floor_terms, kernel_check, lemma_bound_with_count,
    main_bound_rhs, minkowski_first_check_within, minkowski_second_check_within, riemann_slack, DivisorChain, FloorTerms,
};
use crate::enumerate::{coordinate_radius, count, count_oracle, volume_estimate_within};
use crate::error::{Error, Result};
use crate::format::wire;
use crate::gauge::GaugeValue;
use crate::lattice::Lattice;
use crate::matrix::{Echelon, Matrix};
use crate::rational::{format_rational, rat, rat_int, Integer, Rational};
use crate::rng::SplitMix64;
use crate::succmin::{
    canonicalize_with, first_minimum_oracle, satisfies_aligned_interiors, successive_minima, witnesses_are_minimal, MinimaResult,
};

pub const MAX_DIM: usize = 6;
pub const DEFAULT_RANGE: u32 = 16;
/// Attempts per instance before generation gives up.
pub const GENERATION_RETRIES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    Identity,
    Diagonal,
    /// A random unimodular matrix times a random positive diagonal.
    UnimodularDiagonal,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 3] = [LatticeKind::Identity, LatticeKind::Diagonal, LatticeKind::UnimodularDiagonal];

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Identity => "identity",
            LatticeKind::Diagonal => "diagonal",
            LatticeKind::UnimodularDiagonal => "unimodular-diagonal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub seed: u64,
    pub dim: usize,
    pub body_kind: BodyKind,
    /// Bound on numerators and denominators of generated entries.
    pub coeff_range: u32,
    pub lattice_kind: LatticeKind,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_DIM).contains(&self.dim) {
            return Err(Error::Input(format!("dimension must be in 1..={MAX_DIM}, got {}", self.dim)));
        }
        if self.coeff_range == 0 {
            return Err(Error::Input("coefficient range must be positive".into()));
        }
        Ok(())
    }
}

fn positive_rational(rng: &mut SplitMix64, range: i64) -> Rational {
    rat(rng.range(1, range), rng.range(1, range))
}

fn signed_rational(rng: &mut SplitMix64, range: i64) -> Rational {
    rat(rng.range(-range, range), rng.range(1, range))
}

fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize, range: i64) -> Matrix {
    let rows = (0..rows).map(|_| (0..cols).map(|_| signed_rational(rng, range)).collect()).collect();
    Matrix::from_rows(rows).expect("rectangular")
}

fn generate_body(rng: &mut SplitMix64, spec: &InstanceSpec) -> Result<SymmetricBody> {
    let (d, range) = (spec.dim, i64::from(spec.coeff_range));
    match spec.body_kind {
        BodyKind::Box => SymmetricBody::boxed((0..d).map(|_| positive_rational(rng, range)).collect()),
        BodyKind::HPolytope => {
            let m = d + rng.below(3) as usize;
            SymmetricBody::hpolytope(random_matrix(rng, m, d, range))
        }
        BodyKind::Ellipsoid => {
            // Q = MᵀM, positive definite exactly when M is nonsingular
            let m = random_matrix(rng, d, d, range);
            SymmetricBody::ellipsoid(m.transpose().mul(&m)?)
        }
    }
}

fn generate_lattice(rng: &mut SplitMix64, spec: &InstanceSpec) -> Result<Lattice> {
    let (d, range) = (spec.dim, i64::from(spec.coeff_range));
    let diagonal = |rng: &mut SplitMix64| Matrix::diagonal(&(0..d).map(|_| positive_rational(rng, range)).collect::<Vec<_>>());
    match spec.lattice_kind {
        LatticeKind::Identity => Ok(Lattice::standard(d)),
        LatticeKind::Diagonal => Lattice::new(diagonal(rng)),
        LatticeKind::UnimodularDiagonal => {
            // product of d elementary row additions, each with a small multiplier
            let mut u = Matrix::identity(d);
            if d > 1 {
                for _ in 0..d {
                    let i = rng.below(d as u64) as usize;
                    let j = (i + 1 + rng.below(d as u64 - 1) as usize) % d;
                    let c = rat_int(rng.range(-2, 2));
                    for col in 0..d {
                        let add = &c * &u[(j, col)];
                        u[(i, col)] += add;
                    }
                }
            }
            Lattice::new(u.mul(&diagonal(rng))?)
        }
    }
}

/// The instance named by `spec`. Candidates that violate a body invariant
/// (rank-deficient normals, singular Gram factor) are discarded and redrawn
/// from the same stream.
pub fn generate(spec: &InstanceSpec) -> Result<(SymmetricBody, Lattice)> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    for _ in 0..GENERATION_RETRIES {
        match generate_body(&mut rng, spec) {
            Ok(body) => return Ok((body, generate_lattice(&mut rng, spec)?)),
            Err(Error::InvalidBody(_) | Error::Rank) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenerationExhausted(GENERATION_RETRIES))
}

/// `count` specs derived from one master seed; dimension, body kind and
/// lattice kind are drawn from the given choices.
pub fn fuzz_specs(
    seed: u64,
    count: usize,
    dims: &[usize],
    kinds: &[BodyKind],
    lattices: &[LatticeKind],
    coeff_range: u32,
) -> Vec<InstanceSpec> {
    let mut master = SplitMix64::new(seed);
    (0..count)
        .map(|_| InstanceSpec {
            seed: master.next_u64(),
            dim: *master.pick(dims),
            body_kind: *master.pick(kinds),
            coeff_range,
            lattice_kind: *master.pick(lattices),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Recorded but not asserted (unproven statements).
    Reported,
    /// Not applicable to this instance.
    Skipped,
    /// A statement the construction guarantees came out false.
    BugAlarm,
}

impl CheckStatus {
    pub fn name(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Reported => "reported",
            CheckStatus::Skipped => "skipped",
            CheckStatus::BugAlarm => "bug-alarm",
        }
    }

    fn asserted(holds: bool) -> Self {
        if holds {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every report carries exactly these checks.
pub const CHECK_NAMES: [&str; 9] =
    ["monotone-minima", "witness-validity", "lemma-2.1", "kernel", "thm-1.4", "eq-1.4", "mink-1", "mink-2", "conj-d2"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimaReport {
    #[serde(with = "wire::gauge_vec")]
    pub minima: Vec<GaugeValue>,
    #[serde(with = "wire::integer_rows")]
    pub witnesses: Vec<Vec<Integer>>,
}

impl From<&MinimaResult> for MinimaReport {
    fn from(m: &MinimaResult) -> Self {
        Self { minima: m.minima.clone(), witnesses: m.witnesses.clone() }
    }
}

impl From<MinimaReport> for MinimaResult {
    fn from(m: MinimaReport) -> Self {
        Self { minima: m.minima, witnesses: m.witnesses }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// `q₁^d`
    #[serde(with = "wire::integer")]
    pub first: Integer,
    /// `∏ qᵢ`
    #[serde(with = "wire::integer")]
    pub conjecture: Integer,
    /// `2^{d−1} ∏ qᵢ`, absent for `d = 1`
    #[serde(with = "wire::integer_opt")]
    pub main: Option<Integer>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    #[serde(with = "wire::integer")]
    pub lhs: Integer,
    #[serde(with = "wire::integer")]
    pub rhs: Integer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    #[serde(with = "wire::integer_vec")]
    pub q: Vec<Integer>,
    #[serde(with = "wire::integer_vec")]
    pub n: Vec<Integer>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeReport {
    /// Exact volume for boxes, otherwise the Riemann estimate.
    #[serde(with = "wire::rational")]
    pub value: Rational,
    /// Grid resolution of the estimate; absent when exact.
    #[serde(with = "wire::rational_opt")]
    pub resolution: Option<Rational>,
    /// The estimate may exceed the volume by at most this factor.
    #[serde(with = "wire::rational")]
    pub slack: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub instance: Option<InstanceSpec>,
    pub dim: usize,
    pub body_kind: BodyKind,
    pub minima: MinimaReport,
    #[serde(with = "wire::integer")]
    pub count: Integer,
    pub bounds: BoundsReport,
    pub lemma: LemmaReport,
    pub chain: ChainReport,
    pub volume: VolumeReport,
    pub checks: BTreeMap<String, CheckStatus>,
    /// Whether `count ≤ ∏ qᵢ` held, asserted or not.
    pub conjecture_holds: bool,
    /// `count / main`, absent for `d = 1`.
    #[serde(with = "wire::rational_opt")]
    pub tightness_ratio: Option<Rational>,
}

impl VerificationReport {
    pub fn status(&self, check: &str) -> CheckStatus {
        self.checks[check]
    }

    pub fn has(&self, status: CheckStatus) -> bool {
        self.checks.values().any(|&s| s == status)
    }
}

/// Knobs of [`verify`] that trade time for volume precision.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Resolutions tried for the Riemann estimate, coarse to fine.
    pub resolutions: Vec<Rational>,
    /// Search-node budget per resolution; the finest resolution that fits
    /// is used. `None` forces the finest one.
    pub node_budget: Option<u64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { resolutions: (0..=5).map(|e| rat(1, 1 << e)).collect(), node_budget: Some(20_000) }
    }
}

impl VerifyOptions {
    /// Only `r = 1/32`, whatever it costs.
    pub fn finest() -> Self {
        Self { resolutions: vec![rat(1, 32)], node_budget: None }
    }
}

fn volume_input(k: &SymmetricBody, lat: &Lattice, n: &Integer, opts: &VerifyOptions) -> Result<VolumeReport> {
    if matches!(k.shape(), Shape::Box { .. }) {
        return Ok(VolumeReport { value: volume_box(k)?, resolution: None, slack: Rational::one() });
    }
    // r = 1 is the count itself
    let mut best = (rat_int(n.clone()) * lat.determinant(), Rational::one());
    for r in &opts.resolutions {
        match volume_estimate_within(k, lat, r, opts.node_budget)? {
            Some(v) => best = (v, r.clone()),
            None => break,
        }
    }
    let slack = riemann_slack(k, lat, &best.1)?;
    Ok(VolumeReport { value: best.0, resolution: Some(best.1), slack })
}

/// The full pipeline on one instance.
pub fn verify(k: &SymmetricBody, lat: &Lattice) -> Result<VerificationReport> {
    verify_with(k, lat, &VerifyOptions::default())
}

pub fn verify_with(k: &SymmetricBody, lat: &Lattice, opts: &VerifyOptions) -> Result<VerificationReport> {
    let d = k.dim();
    let one = GaugeValue::one();
    let mut checks = BTreeMap::new();
    let mut set = |name: &str, s: CheckStatus| {
        checks.insert(name.to_string(), s);
    };

    let minima = successive_minima(k, lat)?;
    let n = count(k, lat, &one, false)?;

    let monotone = !minima.minima[0].is_zero() && minima.minima.windows(2).all(|w| w[0] <= w[1]);
    set("monotone-minima", CheckStatus::asserted(monotone));

    let mut span = Echelon::default();
    let mut witnesses_ok = true;
    for (l, z) in minima.minima.iter().zip(&minima.witnesses) {
        witnesses_ok &= k.gauge(&lat.point(z)?)? == *l;
        witnesses_ok &= span.insert(&z.iter().cloned().map(rat_int).collect::<Vec<_>>());
    }
    witnesses_ok = witnesses_ok && witnesses_are_minimal(k, lat, &minima)?;
    set("witness-validity", CheckStatus::asserted(witnesses_ok));

    let q = floor_terms(&minima)?;
    let first = first_bound_rhs(&minima)?;
    let conjecture = conjecture_rhs(&minima)?;
    let main = (d >= 2).then(|| main_bound_rhs(&minima)).transpose()?;

    // the proof pipeline: canonical form, chain, sublattice, kernel
    let canonical = canonicalize_with(k, lat, &minima)?;
    let chain = divisor_chain(&q)?;
    let sub = chain_sublattice(&chain)?;
    let pipeline_ok = satisfies_aligned_interiors(&canonical)?
        && chain.is_valid_for(&q)
        && n <= chain.product()
        && main.as_ref().is_none_or(|m| chain.product() < *m)
        && kernel_check(&canonical.body, &chain)?;
    set("kernel", if pipeline_ok { CheckStatus::Pass } else { CheckStatus::BugAlarm });

    let lemma = lemma_bound_with_count(&canonical.body, &sub, n.clone())?;
    set("lemma-2.1", CheckStatus::asserted(lemma.holds));

    set("thm-1.4", main.as_ref().map_or(CheckStatus::Skipped, |m| CheckStatus::asserted(n < *m)));
    set("eq-1.4", CheckStatus::asserted(n <= first));

    let volume = volume_input(k, lat, &n, opts)?;
    let det = lat.determinant();
    set("mink-1", CheckStatus::asserted(minkowski_first_check_within(&minima, &volume.value, det, &volume.slack)));
    set("mink-2", CheckStatus::asserted(minkowski_second_check_within(&minima, &volume.value, det, &volume.slack)));

    let conjecture_holds = n <= conjecture;
    set("conj-d2", if d == 2 { CheckStatus::asserted(conjecture_holds) } else { CheckStatus::Reported });

    let tightness_ratio = main.as_ref().map(|m| Rational::new(n.clone(), m.clone()));
    Ok(VerificationReport {
        instance: None,
        dim: d,
        body_kind: k.kind(),
        minima: MinimaReport::from(&minima),
        count: n,
        bounds: BoundsReport { first, conjecture, main },
        lemma: LemmaReport { lhs: lemma.lhs, rhs: lemma.rhs },
        chain: ChainReport { q: q.q, n: chain.n },
        volume,
        checks,
        conjecture_holds,
        tightness_ratio,
    })
}

/// Generates and verifies one spec.
pub fn verify_spec(spec: &InstanceSpec, opts: &VerifyOptions) -> Result<VerificationReport> {
    let (k, lat) = generate(spec)?;
    let mut report = verify_with(&k, &lat, opts)?;
    report.instance = Some(spec.clone());
    Ok(report)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub instances: usize,
    /// Number of check entries with each status, over all reports.
    pub statuses: BTreeMap<CheckStatus, usize>,
    /// `(seed, check)` for every asserted check that failed.
    pub failures: Vec<(u64, String)>,
    pub bug_alarms: Vec<u64>,
    /// Seeds of `d ≥ 3` instances where `count > ∏ qᵢ`.
    pub conjecture_violations: Vec<u64>,
    #[serde(with = "wire::rational_opt")]
    pub max_tightness_ratio: Option<Rational>,
    pub max_tightness_instance: Option<InstanceSpec>,
}

impl CampaignSummary {
    pub fn from_reports(reports: &[VerificationReport]) -> Self {
        let mut s = CampaignSummary { instances: reports.len(), ..Default::default() };
        for r in reports {
            let seed = r.instance.as_ref().map_or(0, |i| i.seed);
            for (name, &status) in &r.checks {
                *s.statuses.entry(status).or_default() += 1;
                match status {
                    CheckStatus::Fail => s.failures.push((seed, name.clone())),
                    CheckStatus::BugAlarm => s.bug_alarms.push(seed),
                    _ => {}
                }
            }
            if r.dim >= 3 && !r.conjecture_holds {
                s.conjecture_violations.push(seed);
            }
            if let Some(ratio) = &r.tightness_ratio {
                if s.max_tightness_ratio.as_ref().is_none_or(|m| ratio > m) {
                    s.max_tightness_ratio = Some(ratio.clone());
                    s.max_tightness_instance = r.instance.clone();
                }
            }
        }
        s
    }

    pub fn count(&self, status: CheckStatus) -> usize {
        self.statuses.get(&status).copied().unwrap_or(0)
    }
}

/// Verifies every spec (in parallel; results in spec order).
pub fn campaign(specs: &[InstanceSpec], opts: &VerifyOptions) -> Result<(Vec<VerificationReport>, CampaignSummary)> {
    let reports = specs.par_iter().map(|s| verify_spec(s, opts)).collect::<Result<Vec<_>>>()?;
    let summary = CampaignSummary::from_reports(&reports);
    Ok((reports, summary))
}

/// Leading columns of a campaign CSV; one column per check follows, in
/// [`CHECK_NAMES`] order.
pub const CSV_COLUMNS: [&str; 10] =
    ["seed", "dim", "kind", "lattice", "range", "count", "first_bound", "conjecture_bound", "main_bound", "ratio"];

/// Header plus one row per report. Every field is a number, a `p/q` string
/// or a plain name, so no quoting is needed; absent values are empty.
pub fn campaign_csv(reports: &[VerificationReport]) -> String {
    let mut out = CSV_COLUMNS.iter().chain(CHECK_NAMES.iter()).copied().collect::<Vec<_>>().join(",");
    out.push('\n');
    for r in reports {
        let (seed, lattice, range) = match &r.instance {
            Some(i) => (i.seed.to_string(), i.lattice_kind.name().to_string(), i.coeff_range.to_string()),
            None => Default::default(),
        };
        let mut row = vec![
            seed,
            r.dim.to_string(),
            r.body_kind.name().to_string(),
            lattice,
            range,
            r.count.to_string(),
            r.bounds.first.to_string(),
            r.bounds.conjecture.to_string(),
            r.bounds.main.as_ref().map(ToString::to_string).unwrap_or_default(),
            r.tightness_ratio.as_ref().map(format_rational).unwrap_or_default(),
        ];
        row.extend(CHECK_NAMES.iter().map(|c| r.status(c).name().to_string()));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// For every spec with `d ≤ 3`: the fast count agrees with the exhaustive
/// scan and `λ₁` with the brute-force minimum.
pub fn oracle_campaign(specs: &[InstanceSpec]) -> Result<bool> {
    let agree = specs.par_iter().filter(|s| s.dim <= 3).map(oracle_agrees).collect::<Result<Vec<bool>>>()?;
    Ok(agree.into_iter().all(|a| a))
}

fn oracle_agrees(spec: &InstanceSpec) -> Result<bool> {
    let (k, lat) = generate(spec)?;
    let one = GaugeValue::one();
    let radius = coordinate_radius(&k, &lat, &one)?;
    let counts_agree = count(&k, &lat, &one, false)? == count_oracle(&k, &lat, &one, false, radius)?;
    let minima = successive_minima(&k, &lat)?;
    Ok(counts_agree && minima.minima[0] == first_minimum_oracle(&k, &lat)?)
}

impl ChainReport {
    pub fn terms(&self) -> FloorTerms {
        FloorTerms { q: self.q.clone() }
    }

    pub fn chain(&self) -> DivisorChain {
        DivisorChain { n: self.n.clone() }
    }
}
