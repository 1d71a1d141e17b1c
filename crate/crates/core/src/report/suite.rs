use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{conventions_hash, CheckRecord, FieldClass, Provenance, Relation, RunReport, TargetReport, Tolerances};
use crate::error::{Error, Result};
use crate::fibration::{classify_map, vector_field_seeded, FibrationMap, MapClass, MapVerdict};
use crate::fixtures::Fixture;
use crate::flowlab::{
    chirality_witness, commutation_defect, dalpha, dflow_ker_alpha, e_defect, geodesic_flow, pushforward,
    AlmostComplex, Chirality, KerAlphaVector, SmPoint,
};
use crate::geometry::{defect_scan, DefectReport, FieldAt};
use crate::grassmann::{pair_from_plane, OrientedPlane};
use crate::quat::Quaternion;
use crate::sampling::{self, covered_points, CoveredPoint};

type Q = Quaternion<f64>;

/// Rotation senses expected on `[S²₋, S²₊]`.
pub const EXPECTED_CHIRALITY: Chirality = Chirality {
    symplectic: [1, -1],
    componentwise: [-1, -1],
};

const MAX_CHIRALITY_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    #[serde(rename = "prop-1")]
    Contact,
    #[serde(rename = "prop-a")]
    Invariance,
    #[serde(rename = "lemma-key")]
    TraceFormula,
    #[serde(rename = "prop-2-5")]
    Conformality,
    #[serde(rename = "theorem-b")]
    Correspondence,
    #[serde(rename = "flow")]
    Flow,
    #[serde(rename = "all")]
    All,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Self::Contact,
        Self::Invariance,
        Self::TraceFormula,
        Self::Conformality,
        Self::Correspondence,
        Self::Flow,
        Self::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Contact => "prop-1",
            Self::Invariance => "prop-a",
            Self::TraceFormula => "lemma-key",
            Self::Conformality => "prop-2-5",
            Self::Correspondence => "theorem-b",
            Self::Flow => "flow",
            Self::All => "all",
        }
    }

    fn runs(self, part: Suite) -> bool {
        self == Self::All || self == part
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// The four distance-decreasing fixtures, plus the cross-fixture checks.
    Fixtures,
    Fixture(Fixture),
    Map {
        name: String,
        map: FibrationMap,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub target: Target,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl SuiteConfig {
    pub fn new(suite: Suite, target: Target) -> Self {
        Self {
            suite,
            target,
            samples: 200,
            seed: 0,
            tolerances: Tolerances::standard(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("sample count must be at least 1".into()));
        }
        Ok(())
    }
}

fn max_of(reports: &[Result<DefectReport>], f: impl Fn(&DefectReport) -> f64) -> std::result::Result<f64, String> {
    fold_reports(reports, f, f64::NEG_INFINITY, f64::max)
}

fn min_of(reports: &[Result<DefectReport>], f: impl Fn(&DefectReport) -> f64) -> std::result::Result<f64, String> {
    fold_reports(reports, f, f64::INFINITY, f64::min)
}

fn fold_reports(
    reports: &[Result<DefectReport>],
    f: impl Fn(&DefectReport) -> f64,
    init: f64,
    op: fn(f64, f64) -> f64,
) -> std::result::Result<f64, String> {
    reports.iter().try_fold(init, |acc, r| match r {
        Ok(r) => Ok(op(acc, f(r))),
        Err(e) => Err(e.to_string()),
    })
}

/// Defect scan of a map over its covered sample.
struct FieldScan {
    points: Vec<CoveredPoint>,
    reports: Vec<Result<DefectReport>>,
}

impl FieldScan {
    fn run(map: &FibrationMap, samples: usize, seed: u64) -> Result<Self> {
        let points = covered_points(map, samples, seed)?;
        let reports = defect_scan(map, &points);
        Ok(Self { points, reports })
    }

    fn classify(&self, tol: &Tolerances) -> std::result::Result<FieldClass, String> {
        let div = max_of(&self.reports, |r| r.div_x.abs())?;
        let conf = max_of(&self.reports, |r| r.conformal().max())?;
        Ok(FieldClass::from_flags(div <= tol.div, conf <= tol.conf))
    }
}

fn contact_checks(scan: &FieldScan, tol: &Tolerances, out: &mut Vec<CheckRecord>) {
    let r = &scan.reports;
    out.push(CheckRecord::from_result(
        "geodesic",
        max_of(r, |d| d.geodesibility),
        Relation::AtMost,
        tol.geodesic,
        true,
    ));
    out.push(CheckRecord::from_result(
        "lambda-x",
        max_of(r, |d| d.lambda_x_defect),
        Relation::AtMost,
        tol.lambda,
        true,
    ));
    out.push(CheckRecord::from_result(
        "reeb",
        max_of(r, |d| d.reeb_residual),
        Relation::AtMost,
        tol.reeb,
        true,
    ));
    out.push(CheckRecord::from_result(
        "contact-det",
        min_of(r, |d| d.contact_det),
        Relation::AtLeast,
        tol.contact_min,
        true,
    ));
    out.push(CheckRecord::from_result(
        "dlambda-routes",
        max_of(r, |d| d.dlambda_cross_check()),
        Relation::AtMost,
        tol.dlambda,
        true,
    ));
}

fn invariance_checks(scan: &FieldScan, expect_div_free: bool, tol: &Tolerances, out: &mut Vec<CheckRecord>) {
    let r = &scan.reports;
    let div = max_of(r, |d| d.div_x.abs());
    let jdef = max_of(r, |d| d.j_defect);
    out.push(CheckRecord::from_result(
        "div-free",
        div.clone(),
        Relation::AtMost,
        tol.div,
        expect_div_free,
    ));
    out.push(CheckRecord::from_result(
        "j-invariant",
        jdef.clone(),
        Relation::AtMost,
        tol.jdefect,
        expect_div_free,
    ));
    if !expect_div_free {
        out.push(CheckRecord::from_result(
            "div-witness",
            div.clone(),
            Relation::AtLeast,
            tol.div_witness,
            true,
        ));
        out.push(CheckRecord::from_result(
            "j-defect-witness",
            jdef.clone(),
            Relation::AtLeast,
            tol.jdefect_witness,
            true,
        ));
    }
    match (div, jdef) {
        (Ok(d), Ok(j)) => {
            let agree = (d <= tol.div) == (j <= tol.jdefect);
            out.push(CheckRecord::condition("div-free-iff-j-invariant", usize::from(!agree)));
        }
        (Err(e), _) | (_, Err(e)) => {
            out.push(CheckRecord::failed(
                "div-free-iff-j-invariant",
                Relation::AtMost,
                0.0,
                true,
                e,
            ));
        }
    }
}

fn trace_formula_checks(scan: &FieldScan, tol: &Tolerances, out: &mut Vec<CheckRecord>) {
    out.push(CheckRecord::from_result(
        "key-formula",
        max_of(&scan.reports, |d| d.key_residual),
        Relation::AtMost,
        tol.key,
        true,
    ));
}

fn conformality_checks(scan: &FieldScan, expect_conformal: bool, tol: &Tolerances, out: &mut Vec<CheckRecord>) {
    let r = &scan.reports;
    out.push(CheckRecord::from_result(
        "conf3",
        max_of(r, |d| d.conf3),
        Relation::AtMost,
        tol.conf,
        expect_conformal,
    ));
    out.push(CheckRecord::from_result(
        "conf4",
        max_of(r, |d| d.conf4),
        Relation::AtMost,
        tol.conf,
        expect_conformal,
    ));
    out.push(CheckRecord::from_result(
        "conf5",
        max_of(r, |d| d.conf5),
        Relation::AtMost,
        tol.conf,
        expect_conformal,
    ));
    if !expect_conformal {
        out.push(CheckRecord::from_result(
            "conf-witness",
            max_of(r, |d| d.conformal().min()),
            Relation::AtLeast,
            tol.conf_witness,
            true,
        ));
    }
    out.push(CheckRecord::from_result(
        "conf-comparable",
        max_of(r, |d| d.conformal().comparability_excess()),
        Relation::AtMost,
        0.0,
        true,
    ));
}

/// Fibre and Grassmann label recovered from the field alone, against the
/// generating fibre of each covered point.
fn graph_recovery_check(map: &FibrationMap, scan: &FieldScan, tol: &Tolerances, out: &mut Vec<CheckRecord>) {
    let errors: Vec<Result<f64>> = scan
        .points
        .par_iter()
        .map(|c| {
            let (x, fibre) = vector_field_seeded(map, c.p, None)?;
            let g = pair_from_plane(OrientedPlane::new(c.p.get(), x.vec)?)?;
            Ok(g.max_abs_diff(c.grass).max(fibre.get().max_abs_diff(c.fibre.get())))
        })
        .collect();
    let worst = errors.iter().try_fold(f64::NEG_INFINITY, |acc, r| match r {
        Ok(v) => Ok(acc.max(*v)),
        Err(e) => Err(e.to_string()),
    });
    out.push(CheckRecord::from_result(
        "graph-recovery",
        worst,
        Relation::AtMost,
        tol.roundtrip,
        true,
    ));
}

/// Map-side and field-side verdicts of `map`, and their agreement.
fn correspondence_checks(
    map: &FibrationMap,
    class: &MapClass,
    field: std::result::Result<FieldClass, String>,
    config: &SuiteConfig,
    out: &mut Vec<CheckRecord>,
) {
    let tol = &config.tolerances;
    match &field {
        Ok(f) => out.push(CheckRecord::condition(
            "verdict-agreement",
            usize::from(*f != FieldClass::expected_from(class.verdict)),
        )),
        Err(e) => out.push(CheckRecord::failed(
            "verdict-agreement",
            Relation::AtMost,
            0.0,
            true,
            e.clone(),
        )),
    }
    if let Ok(f) = &field {
        out.push(CheckRecord::condition(
            "hopf-iff-constant",
            usize::from((*f == FieldClass::Hopf) != (class.verdict == MapVerdict::Constant)),
        ));
    }

    let sigma = map.sigma_conjugate();
    let swapped = classify_map(&sigma, config.samples, tol.classify)
        .map_err(|e| e.to_string())
        .and_then(|c| {
            let scan = FieldScan::run(&sigma, config.samples, config.seed).map_err(|e| e.to_string())?;
            Ok((c, scan.classify(tol)?))
        });
    match (swapped, field) {
        (Ok((sigma_class, sigma_field)), Ok(f)) => {
            let violations = usize::from(sigma_class.verdict != class.verdict.sigma_swapped())
                + usize::from(sigma_field != f.sigma_swapped());
            out.push(CheckRecord::condition("sigma-swap", violations));
        }
        (Err(e), _) | (_, Err(e)) => out.push(CheckRecord::failed("sigma-swap", Relation::AtMost, 0.0, true, e)),
    }
}

/// Flow checks that depend on the field: invariance of `X_*(X⊥)` under the
/// linearized flow, the pullback identity and the non-Lagrangian bound.
fn field_flow_checks(map: &FibrationMap, scan: &FieldScan, config: &SuiteConfig, out: &mut Vec<CheckRecord>) {
    let tol = &config.tolerances;
    let mut rng = sampling::rng(config.seed ^ 0x5eed_f10e);
    let params: Vec<(f64, f64)> = scan
        .points
        .iter()
        .map(|_| (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI)))
        .collect();

    let rows: Vec<Result<(f64, f64, f64)>> = scan
        .points
        .par_iter()
        .zip(params.par_iter())
        .map(|(c, &(theta, t))| {
            let at = FieldAt::new(map, c.p, Some(c.fibre))?;
            let frame = at.shape.frame;
            let u = frame.u1.scale(theta.cos()) + frame.u2.scale(theta.sin());
            let q = SmPoint { p: at.p, v: at.x.vec };
            let xi = pushforward(&at, u);
            let xi_t = dflow_ker_alpha(&q, xi, t)?;
            let q_t = geodesic_flow(&q, t);
            let at_t = FieldAt::new(map, q_t.p, Some(c.fibre))?;
            let invariance = e_defect(&at_t, xi_t) + (at_t.x.vec - q_t.v).norm();

            let area = dalpha(pushforward(&at, frame.u1), pushforward(&at, frame.u2));
            let pullback = (at.dlambda_stokes(frame.u1, frame.u2)? - area).abs();
            Ok((invariance, pullback, area.abs()))
        })
        .collect();

    let fold = |pick: fn(&(f64, f64, f64)) -> f64, init: f64, op: fn(f64, f64) -> f64| {
        rows.iter().try_fold(init, |acc, r| match r {
            Ok(v) => Ok(op(acc, pick(v))),
            Err(e) => Err(e.to_string()),
        })
    };
    out.push(CheckRecord::from_result(
        "e-invariance",
        fold(|r| r.0, f64::NEG_INFINITY, f64::max),
        Relation::AtMost,
        tol.e_invariance,
        true,
    ));
    out.push(CheckRecord::from_result(
        "pullback",
        fold(|r| r.1, f64::NEG_INFINITY, f64::max),
        Relation::AtMost,
        tol.dlambda,
        true,
    ));
    out.push(CheckRecord::from_result(
        "non-lagrangian",
        fold(|r| r.2, f64::INFINITY, f64::min),
        Relation::AtLeast,
        tol.non_lagrangian_min,
        true,
    ));
}

/// A random point of the unit tangent bundle with a random kernel vector.
pub(crate) fn random_flow_sample(rng: &mut impl Rng) -> (SmPoint, KerAlphaVector, f64) {
    let p = sampling::random_sphere3(rng);
    let v = sampling::random_orthogonal(rng, &[p.get()]);
    let q = SmPoint { p, v };
    let part = |rng: &mut _| sampling::random_orthogonal(rng, &[p.get(), v]).scale(sampling::gauss(rng));
    let h: Q = part(rng);
    let w: Q = part(rng);
    let t = rng.random_range(-2.0 * PI..2.0 * PI);
    (
        q,
        KerAlphaVector {
            horizontal: h,
            vertical: w,
        },
        t,
    )
}

/// Map-independent checks of the linearized geodesic flow.
fn structural_flow_checks(config: &SuiteConfig, out: &mut Vec<CheckRecord>) {
    let tol = &config.tolerances;
    let mut rng = sampling::rng(config.seed);
    let mut worst = [0.0f64; 3];
    let mut error = None;
    for _ in 0..config.samples {
        let (q, xi, t) = random_flow_sample(&mut rng);
        let (_, eta, _) = random_flow_sample(&mut rng);
        let eta = KerAlphaVector::project(&q, eta.horizontal, eta.vertical);
        let step = || -> Result<[f64; 3]> {
            let before = dalpha(xi, eta);
            let after = dalpha(dflow_ker_alpha(&q, xi, t)?, dflow_ker_alpha(&q, eta, t)?);
            Ok([
                commutation_defect(&q, xi, t, AlmostComplex::Symplectic)?,
                commutation_defect(&q, xi, t, AlmostComplex::Componentwise)?,
                (after - before).abs(),
            ])
        };
        match step() {
            Ok(v) => worst.iter_mut().zip(v).for_each(|(w, v)| *w = w.max(v)),
            Err(e) => error = Some(e.to_string()),
        }
    }
    let record = |name: &str, v: f64, thr: f64| match &error {
        None => CheckRecord::new(name, v, Relation::AtMost, thr, true),
        Some(e) => CheckRecord::failed(name, Relation::AtMost, thr, true, e.clone()),
    };
    out.push(record("commute-J", worst[0], tol.commute));
    out.push(record("commute-JJ", worst[1], tol.commute));
    out.push(record("dalpha-preserved", worst[2], tol.symplectic));

    let mut mismatches = 0;
    let mut error = None;
    for _ in 0..config.samples.min(MAX_CHIRALITY_SAMPLES) {
        let p = sampling::random_sphere3(&mut rng);
        let v = sampling::random_orthogonal(&mut rng, &[p.get()]);
        match chirality_witness(&SmPoint { p, v }) {
            Ok(c) => mismatches += usize::from(c != EXPECTED_CHIRALITY),
            Err(e) => error = Some(e.to_string()),
        }
    }
    out.push(match error {
        None => CheckRecord::condition("chirality", mismatches),
        Some(e) => CheckRecord::failed("chirality", Relation::AtMost, 0.0, true, e),
    });
}

fn target_report(name: &str, map: &FibrationMap, config: &SuiteConfig) -> TargetReport {
    let tol = &config.tolerances;
    let suite = config.suite;
    let mut report = TargetReport {
        name: name.to_string(),
        map_class: None,
        field_class: None,
        rejected: false,
        checks: Vec::new(),
        pass: false,
    };
    let class = match classify_map(map, config.samples, tol.classify) {
        Ok(c) => c,
        Err(e) => {
            report.checks.push(CheckRecord::failed(
                "classify",
                Relation::AtMost,
                0.0,
                true,
                e.to_string(),
            ));
            return report.finish();
        }
    };
    report.map_class = Some(class);
    report.checks.push(CheckRecord::new(
        "distance-decreasing",
        class.max_dilatation,
        Relation::Below,
        1.0,
        true,
    ));
    if !class.is_distance_decreasing() {
        report.rejected = true;
        return report.finish();
    }

    let scan = match FieldScan::run(map, config.samples, config.seed) {
        Ok(s) => s,
        Err(e) => {
            report.checks.push(CheckRecord::failed(
                "coverage",
                Relation::AtMost,
                0.0,
                true,
                e.to_string(),
            ));
            return report.finish();
        }
    };
    let field = scan.classify(tol);
    report.field_class = field.clone().ok();
    let expected = FieldClass::expected_from(class.verdict);
    let expect_div_free = matches!(expected, FieldClass::Hopf | FieldClass::VolumePreserving);
    let expect_conformal = matches!(expected, FieldClass::Hopf | FieldClass::Conformal);

    let out = &mut report.checks;
    if suite.runs(Suite::Contact) {
        contact_checks(&scan, tol, out);
    }
    if suite.runs(Suite::Invariance) {
        invariance_checks(&scan, expect_div_free, tol, out);
    }
    if suite.runs(Suite::TraceFormula) {
        trace_formula_checks(&scan, tol, out);
    }
    if suite.runs(Suite::Conformality) {
        conformality_checks(&scan, expect_conformal, tol, out);
    }
    if suite.runs(Suite::Correspondence) {
        correspondence_checks(map, &class, field, config, out);
        graph_recovery_check(map, &scan, tol, out);
    }
    if suite.runs(Suite::Flow) {
        field_flow_checks(map, &scan, config, out);
    }
    report.finish()
}

/// Checks across the fixture set: the full-sphere anti-holomorphic map is
/// rejected and only the constant map gives a field both conformal and
/// divergence-free.
fn fixture_set_checks(targets: &[TargetReport], config: &SuiteConfig, out: &mut Vec<CheckRecord>) {
    let tol = &config.tolerances;
    match classify_map(&Fixture::FullAnti.map(), config.samples, tol.classify) {
        Ok(c) => out.push(CheckRecord::new(
            "full-sphere-antiholomorphic-rejected",
            c.max_dilatation,
            Relation::AtLeast,
            tol.dilatation_reject,
            true,
        )),
        Err(e) => out.push(CheckRecord::failed(
            "full-sphere-antiholomorphic-rejected",
            Relation::AtLeast,
            tol.dilatation_reject,
            true,
            e.to_string(),
        )),
    }
    let violations = targets
        .iter()
        .filter(|t| (t.field_class == Some(FieldClass::Hopf)) != (t.name == Fixture::Hopf.name()))
        .count();
    out.push(CheckRecord::condition("unique-hopf", violations));
}

pub fn run_verification_suite(config: &SuiteConfig) -> Result<RunReport> {
    config.validate()?;
    let targets: Vec<(String, FibrationMap)> = match &config.target {
        Target::Fixtures => Fixture::VALID.iter().map(|f| (f.name().to_string(), f.map())).collect(),
        Target::Fixture(f) => vec![(f.name().to_string(), f.map())],
        Target::Map { name, map } => vec![(name.clone(), map.clone())],
    };
    let reports: Vec<TargetReport> = targets.iter().map(|(n, m)| target_report(n, m, config)).collect();

    let mut global = Vec::new();
    if config.suite.runs(Suite::Flow) {
        structural_flow_checks(config, &mut global);
    }
    if config.target == Target::Fixtures && config.suite.runs(Suite::Correspondence) {
        fixture_set_checks(&reports, config, &mut global);
    }
    let pass = reports.iter().all(|t| t.pass) && global.iter().all(|c| c.pass);
    Ok(RunReport {
        provenance: Provenance {
            conventions_sha256: conventions_hash(),
            suite: config.suite.name().to_string(),
            seed: config.seed,
            samples: config.samples,
            tolerances: config.tolerances,
        },
        targets: reports,
        global,
        pass,
    })
}

/// Map classification, field classification and their correspondence.
pub fn classify_fibration(config: &SuiteConfig) -> Result<RunReport> {
    run_verification_suite(&SuiteConfig {
        suite: Suite::Correspondence,
        ..config.clone()
    })
}
