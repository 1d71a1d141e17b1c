//! Acceptance criteria for the fixture set. One line per criterion; the
//! binary exits non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gcflow::fibration::{classify_map, locate_fibre_seeded, vector_field, FibrationMap, LocateOptions, MapVerdict};
use gcflow::fixtures::Fixture;
use gcflow::flowlab::{
    chirality_witness, commutation_defect, dalpha, dflow_ker_alpha, AlmostComplex, Chirality, KerAlphaVector, SmPoint,
};
use gcflow::geometry::{defect_scan, DefectReport};
use gcflow::grassmann::{pair_from_plane, plane_from_pair, GrassPoint, OrientedPlane};
use gcflow::report::{run_verification_suite, Suite, SuiteConfig, Target};
use gcflow::sampling::{self, covered_points, CoveredPoint};
use rand::Rng;

const SAMPLES: usize = 200;
const SEED: u64 = 0;
const CLASSIFY_TOL: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            detail: String::new(),
        }
    }

    /// Records one bound; `ok` decides it.
    fn bound(&mut self, ok: bool, what: String) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        if !ok {
            self.pass = false;
            self.detail.push_str("VIOLATED ");
        }
        self.detail.push_str(&what);
    }

    fn error(&mut self, what: &str, e: impl std::fmt::Display) {
        self.bound(false, format!("{what}: error: {e}"));
    }
}

fn scan(fixture: Fixture) -> gcflow::Result<(Vec<CoveredPoint>, Vec<DefectReport>)> {
    let map = fixture.map();
    let points = covered_points(&map, SAMPLES, SEED)?;
    let reports = defect_scan(&map, &points)
        .into_iter()
        .collect::<gcflow::Result<Vec<_>>>()?;
    Ok((points, reports))
}

fn max_by(reports: &[DefectReport], f: impl Fn(&DefectReport) -> f64) -> f64 {
    reports.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
}

fn min_by(reports: &[DefectReport], f: impl Fn(&DefectReport) -> f64) -> f64 {
    reports.iter().map(f).fold(f64::INFINITY, f64::min)
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    for f in Fixture::VALID {
        let reports = match scan(f) {
            Ok((_, r)) => r,
            Err(e) => {
                out.error(f.name(), e);
                continue;
            }
        };
        let geo = max_by(&reports, |r| r.geodesibility);
        let lam = max_by(&reports, |r| r.lambda_x_defect);
        let reeb = max_by(&reports, |r| r.reeb_residual);
        let det = min_by(&reports, |r| r.contact_det);
        // |λ(X) − 1| = 0 up to rounding of a unit-norm dot product.
        let lambda_tol = 8.0 * f64::EPSILON;
        out.bound(geo <= 1e-6, format!("{} max |nabla_X X| {geo:.2e} <= 1e-6", f.name()));
        out.bound(
            lam <= lambda_tol,
            format!("{} max |lambda(X)-1| {lam:.2e} <= {lambda_tol:.2e}", f.name()),
        );
        out.bound(
            reeb <= 1e-5,
            format!("{} max |i_X dlambda| {reeb:.2e} <= 1e-5", f.name()),
        );
        out.bound(
            det >= 0.1,
            format!("{} min det(dlambda|X-perp) {det:.4} >= 0.1", f.name()),
        );
    }
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    for f in Fixture::VALID {
        match scan(f) {
            Ok((_, r)) => {
                let key = max_by(&r, |d| d.key_residual);
                out.bound(
                    key <= 1e-4,
                    format!("{} max trace-formula residual {key:.2e} <= 1e-4", f.name()),
                );
            }
            Err(e) => out.error(f.name(), e),
        }
    }
    out
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    for f in Fixture::VALID {
        let r = match scan(f) {
            Ok((_, r)) => r,
            Err(e) => {
                out.error(f.name(), e);
                continue;
            }
        };
        match f {
            Fixture::Hopf | Fixture::Vol05 => {
                let j = max_by(&r, |d| d.j_defect);
                let div = max_by(&r, |d| d.div_x.abs());
                out.bound(j <= 1e-4, format!("{} max |beta^2+Id| {j:.2e} <= 1e-4", f.name()));
                out.bound(div <= 1e-5, format!("{} max |div X| {div:.2e} <= 1e-5", f.name()));
            }
            _ => {
                let witness = r.iter().filter(|d| d.j_defect > 1e-2 && d.div_x.abs() > 1e-3).count();
                let j = max_by(&r, |d| d.j_defect);
                let div = max_by(&r, |d| d.div_x.abs());
                out.bound(
                    witness > 0,
                    format!(
                        "{} {witness} points with |beta^2+Id| > 1e-2 and |div X| > 1e-3 (max {j:.2e}, {div:.2e})",
                        f.name()
                    ),
                );
            }
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    for f in Fixture::VALID {
        let r = match scan(f) {
            Ok((_, r)) => r,
            Err(e) => {
                out.error(f.name(), e);
                continue;
            }
        };
        match f {
            Fixture::Hopf | Fixture::Conf05 => {
                let c = max_by(&r, |d| d.conformal().max());
                out.bound(c <= 1e-4, format!("{} max conf3/4/5 {c:.2e} <= 1e-4", f.name()));
            }
            _ => {
                let c = max_by(&r, |d| d.conformal().min());
                out.bound(
                    c > 1e-3,
                    format!("{} best point min(conf3,conf4,conf5) {c:.2e} > 1e-3", f.name()),
                );
            }
        }
        let bad = r
            .iter()
            .filter(|d| {
                let c = [d.conf3, d.conf4, d.conf5];
                c.iter().any(|&a| c.iter().all(|&b| a > 5.0 * b + 1e-8))
            })
            .count();
        out.bound(bad == 0, format!("{} {bad} samples break comparability", f.name()));
    }
    out
}

/// Field-side verdict from a defect scan.
fn field_flags(map: &FibrationMap) -> gcflow::Result<(bool, bool)> {
    let points = covered_points(map, SAMPLES, SEED)?;
    let r = defect_scan(map, &points)
        .into_iter()
        .collect::<gcflow::Result<Vec<_>>>()?;
    Ok((
        max_by(&r, |d| d.div_x.abs()) <= 1e-5,
        max_by(&r, |d| d.conformal().max()) <= 1e-4,
    ))
}

fn agrees(verdict: MapVerdict, (div_free, conformal): (bool, bool)) -> bool {
    match verdict {
        MapVerdict::Constant => div_free && conformal,
        MapVerdict::Holomorphic => div_free && !conformal,
        MapVerdict::AntiHolomorphic => conformal && !div_free,
        MapVerdict::Generic => !conformal && !div_free,
    }
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();
    let mut check = |label: String, map: &FibrationMap| {
        let verdict = match classify_map(map, SAMPLES, CLASSIFY_TOL) {
            Ok(c) => c.verdict,
            Err(e) => {
                out.error(&label, e);
                return None;
            }
        };
        match field_flags(map) {
            Ok(flags) => out.bound(
                agrees(verdict, flags),
                format!("{label} map {verdict:?} / div-free {} conformal {}", flags.0, flags.1),
            ),
            Err(e) => out.error(&label, e),
        }
        Some(verdict)
    };
    for f in Fixture::VALID {
        check(f.name().to_string(), &f.map());
    }
    let conf = check("sigma(CONF05)".into(), &Fixture::Conf05.map().sigma_conjugate());
    let vol = check("sigma(VOL05)".into(), &Fixture::Vol05.map().sigma_conjugate());
    out.bound(
        conf == Some(MapVerdict::Holomorphic) && vol == Some(MapVerdict::AntiHolomorphic),
        format!("sigma swaps CONF05 -> {conf:?}, VOL05 -> {vol:?}"),
    );
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    match classify_map(&Fixture::FullAnti.map(), SAMPLES, CLASSIFY_TOL) {
        Ok(c) => out.bound(
            c.max_dilatation >= 1.0 - 1e-3,
            format!("FULLANTI max dilatation {:.4} >= 0.999", c.max_dilatation),
        ),
        Err(e) => out.error("FULLANTI", e),
    }
    let report = run_verification_suite(&SuiteConfig::new(Suite::Correspondence, Target::Fixtures));
    match report {
        Ok(r) => {
            let both: Vec<_> = r
                .targets
                .iter()
                .filter(|t| t.field_class == Some(gcflow::report::FieldClass::Hopf))
                .map(|t| t.name.as_str())
                .collect();
            out.bound(both == ["HOPF"], format!("conformal and volume-preserving: {both:?}"));
        }
        Err(e) => out.error("fixture set", e),
    }
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = sampling::rng(SEED);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let g = GrassPoint::new(sampling::random_sphere2(&mut rng), sampling::random_sphere2(&mut rng));
        match pair_from_plane(plane_from_pair(g)) {
            Ok(back) => worst = worst.max(back.max_abs_diff(g)),
            Err(e) => {
                return Outcome {
                    pass: false,
                    detail: format!("pair round trip: {e}"),
                }
            }
        }
    }
    out.bound(worst <= 1e-10, format!("pair->plane->pair {worst:.2e} <= 1e-10"));

    for f in Fixture::VALID {
        let map = f.map();
        let points = match covered_points(&map, SAMPLES, SEED) {
            Ok(p) => p,
            Err(e) => {
                out.error(f.name(), e);
                continue;
            }
        };
        let (mut graph, mut locate) = (0.0f64, 0.0f64);
        for c in &points {
            let step = || -> gcflow::Result<(f64, f64)> {
                let x = vector_field(&map, c.p)?;
                let g = pair_from_plane(OrientedPlane::new(c.p.get(), x.vec)?)?;
                let a = locate_fibre_seeded(&map, c.p, None, LocateOptions::default())?.fibre;
                Ok((g.max_abs_diff(c.grass), a.get().max_abs_diff(c.fibre.get())))
            };
            match step() {
                Ok((g, l)) => {
                    graph = graph.max(g);
                    locate = locate.max(l);
                }
                Err(e) => {
                    out.error(f.name(), e);
                    break;
                }
            }
        }
        out.bound(graph <= 1e-8, format!("{} field->graph {graph:.2e} <= 1e-8", f.name()));
        out.bound(locate <= 1e-8, format!("{} locate {locate:.2e} <= 1e-8", f.name()));
    }
    out
}

fn random_kernel_vector(rng: &mut impl Rng, q: &SmPoint) -> KerAlphaVector {
    let against = [q.p.get(), q.v];
    KerAlphaVector {
        horizontal: sampling::random_orthogonal(rng, &against).scale(sampling::gauss(rng)),
        vertical: sampling::random_orthogonal(rng, &against).scale(sampling::gauss(rng)),
    }
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = sampling::rng(SEED ^ 8);
    let mut worst = [0.0f64; 3];
    for _ in 0..100 {
        let p = sampling::random_sphere3(&mut rng);
        let q = SmPoint::new(p, sampling::random_orthogonal(&mut rng, &[p.get()])).expect("unit tangent");
        let xi = random_kernel_vector(&mut rng, &q);
        let eta = random_kernel_vector(&mut rng, &q);
        let t = rng.random_range(-10.0..10.0);
        let step = || -> gcflow::Result<[f64; 3]> {
            let moved = dalpha(dflow_ker_alpha(&q, xi, t)?, dflow_ker_alpha(&q, eta, t)?);
            Ok([
                commutation_defect(&q, xi, t, AlmostComplex::Symplectic)?,
                commutation_defect(&q, xi, t, AlmostComplex::Componentwise)?,
                (moved - dalpha(xi, eta)).abs(),
            ])
        };
        match step() {
            Ok(v) => worst.iter_mut().zip(v).for_each(|(w, v)| *w = w.max(v)),
            Err(e) => {
                return Outcome {
                    pass: false,
                    detail: format!("flow sample: {e}"),
                }
            }
        }
    }
    out.bound(worst[0] <= 1e-8, format!("J commutation {:.2e} <= 1e-8", worst[0]));
    out.bound(worst[1] <= 1e-8, format!("JJ commutation {:.2e} <= 1e-8", worst[1]));
    out.bound(worst[2] <= 1e-10, format!("dalpha drift {:.2e} <= 1e-10", worst[2]));

    let config = SuiteConfig {
        samples: 100,
        ..SuiteConfig::new(Suite::Flow, Target::Fixtures)
    };
    match run_verification_suite(&config) {
        Ok(r) => {
            for f in Fixture::VALID {
                for (check, thr) in [("e-invariance", 1e-6), ("pullback", 1e-5)] {
                    match r.find(f.name(), check).and_then(|c| c.value) {
                        Some(v) => out.bound(v <= thr, format!("{} {check} {v:.2e} <= {thr:.0e}", f.name())),
                        None => out.bound(false, format!("{} {check} missing", f.name())),
                    }
                }
            }
        }
        Err(e) => out.error("flow suite", e),
    }
    out
}

fn criterion_9() -> Outcome {
    let expected = Chirality {
        symplectic: [1, -1],
        componentwise: [-1, -1],
    };
    let mut rng = sampling::rng(SEED ^ 9);
    let mut mismatches = 0;
    for _ in 0..50 {
        let p = sampling::random_sphere3(&mut rng);
        let q = SmPoint::new(p, sampling::random_orthogonal(&mut rng, &[p.get()])).expect("unit tangent");
        match chirality_witness(&q) {
            Ok(c) => mismatches += usize::from(c != expected),
            Err(e) => {
                return Outcome {
                    pass: false,
                    detail: format!("witness: {e}"),
                }
            }
        }
    }
    let mut out = Outcome::new();
    out.bound(
        mismatches == 0,
        format!("{mismatches} of 50 points differ from J [+1,-1], JJ [-1,-1]"),
    );
    out
}

fn criterion_10() -> Outcome {
    let config = SuiteConfig::new(Suite::All, Target::Fixtures);
    let mut out = Outcome::new();
    match (run_verification_suite(&config), run_verification_suite(&config)) {
        (Ok(a), Ok(b)) => {
            let (a, b) = (a.to_json(), b.to_json());
            out.bound(a == b, format!("report of {} bytes reproduced byte for byte", a.len()));
        }
        (Err(e), _) | (_, Err(e)) => out.error("suite", e),
    }
    out
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(u32, &str, Criterion, Option<u64>); 10] = [
        (1, "geodesibility and Reeb", criterion_1, Some(5)),
        (2, "trace formula", criterion_2, Some(5)),
        (3, "div-free iff j-invariant", criterion_3, Some(5)),
        (4, "conformality equivalence", criterion_4, Some(5)),
        (5, "map and field verdicts", criterion_5, Some(10)),
        (6, "entire anti-holomorphic obstruction", criterion_6, Some(2)),
        (7, "round trips", criterion_7, Some(5)),
        (8, "linearized geodesic flow", criterion_8, Some(5)),
        (9, "chirality table", criterion_9, Some(2)),
        (10, "determinism", criterion_10, None),
    ];
    let total = Instant::now();
    let mut failed = 0;
    for (n, name, run, limit) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            outcome.bound(
                elapsed <= Duration::from_secs(limit),
                format!("runtime {:.2}s <= {limit}s", elapsed.as_secs_f64()),
            );
        }
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {verdict} {name}: {}", outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    let elapsed = total.elapsed().as_secs_f64();
    println!("acceptance: {} of 10 criteria pass in {elapsed:.2}s", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
