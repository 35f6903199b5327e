//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 6, 7 and 10 compare against printed closed forms that the
//! engine and the numerical oracle both contradict, so they are expected to
//! fail. The process exits nonzero when any verdict differs from `EXPECTED`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;

use doublefiber::curvefibers::{
    case_witness, classify_origin_fiber, derivative_ratio, normal_form, to_snd, FiberKind,
};
use doublefiber::harness::{brute_force_limit_oracle, run_campaign, Campaign, FiberReport, Target};
use doublefiber::moddouble::{double_gens, generic_rank, jacobian_module, CurveSampler, PairSampler, Variant, GENERIC_SAMPLES};
use doublefiber::problem::ProblemFile;
use doublefiber::projan::{Coef, Combination, CurvePair, PointCurve, ProjPoint, Reparam};
use doublefiber::symcore::{parse_series, PuiseuxSeries, Scalar};

const EXPECTED: [bool; 10] = [true, true, true, true, true, false, false, true, true, false];

fn problem(name: &str) -> ProblemFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    ProblemFile::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

struct Verdict {
    pass: bool,
    summary: String,
}

fn verdict(pass: bool, summary: impl Into<String>) -> Verdict {
    Verdict { pass, summary: summary.into() }
}

/// Every campaign report produced on the way, for the oracle criterion.
#[derive(Default)]
struct Log {
    reports: Vec<FiberReport>,
}

impl Log {
    fn run(&mut self, target: Target, name: &str, samples: usize) -> Result<FiberReport, String> {
        let c = Campaign::new(target, problem(name)).samples(samples);
        let r = run_campaign(&c).map_err(|e| format!("{target} on {name}: {e}"))?;
        self.reports.push(r.clone());
        Ok(r)
    }
}

fn describe(r: &FiberReport, name: &str) -> String {
    let first = r.violations.first().map(|v| format!(", first violation #{}: {}", v.index, v.message)).unwrap_or_default();
    format!("{name}: {} rows, {} violations{first}", r.evidence.len(), r.violations.len())
}

fn criterion_1() -> Verdict {
    let p = problem("worked");
    let start = Instant::now();
    let inv = match normal_form(&p.poly().unwrap(), &p.germ().unwrap()) {
        Ok(inv) => inv,
        Err(e) => return verdict(false, format!("normal_form failed: {e}")),
    };
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let e = |v: &[i64]| ProjPoint::from_ints(v).unwrap();
    let dt = inv.tau.distance(&e(&[1, 0, 0]));
    let dm = inv.mu.distance(&e(&[0, 1, 0]));
    let dn = inv.nu.as_ref().map_or(f64::INFINITY, |n| n.distance(&e(&[0, 0, 1])));
    let pass = inv.k == 6 && dt.max(dm).max(dn) < 1e-9 && ms < 1000.0;
    verdict(pass, format!("k = {}, distances tau {dt:.1e} mu {dm:.1e} nu {dn:.1e}, {ms:.1} ms", inv.k))
}

fn campaigns(log: &mut Log, target: Target, names: &[&str], samples: usize) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in names {
        match log.run(target, name, samples) {
            Ok(r) => {
                pass &= r.pass;
                parts.push(describe(&r, name));
            }
            Err(e) => {
                pass = false;
                parts.push(e);
            }
        }
    }
    verdict(pass, parts.join("; "))
}

fn criterion_3(log: &mut Log) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["cusp", "a4"] {
        let p = problem(name);
        let m = jacobian_module(&p.poly().unwrap()).unwrap();
        let d = double_gens(&m, Variant::B);
        let s = CurveSampler::new(p.eta_series().unwrap());
        let pair = PairSampler { first: &s, second: &s };
        let mut rng = doublefiber::harness::sample_rng(0, 0);
        let k = generic_rank(&d, &pair, &mut rng, GENERIC_SAMPLES).map(|r| r.rank);
        pass &= k == Ok(2);
        parts.push(format!("{name}: generic rank of the double {k:?}"));
    }
    let sigma = campaigns(log, Target::SigmaFormula, &["cusp", "a4"], 100);
    let ranks = campaigns(log, Target::RankDoubling, &["cusp", "a4"], 20);
    verdict(pass && sigma.pass && ranks.pass, format!("{}; sigma {}; pointwise ranks {}", parts.join(", "), sigma.summary, ranks.summary))
}

/// Per-coordinate ratios engine/printed after fixing the `A` coordinate to 1.
/// `None` when a coordinate is zero in one form and not the other.
fn coordinate_ratios(engine: &ProjPoint, printed: &ProjPoint) -> Option<Vec<Option<Complex64>>> {
    let e = engine.to_c64();
    let p = printed.to_c64();
    let (ea, pa) = (e[1], p[1]);
    if ea.norm() < 1e-12 || pa.norm() < 1e-12 {
        return None;
    }
    let scale_e = e.iter().map(|z| z.norm()).fold(0.0, f64::max) / ea.norm();
    let scale_p = p.iter().map(|z| z.norm()).fold(0.0, f64::max) / pa.norm();
    let mut out = Vec::new();
    for j in [0, 2, 3] {
        let (x, y) = (e[j] / ea, p[j] / pa);
        match (x.norm() <= 1e-10 * scale_e, y.norm() <= 1e-10 * scale_p) {
            (true, true) => out.push(None),
            (false, false) => out.push(Some(x / y)),
            _ => return None,
        }
    }
    Some(out)
}

/// Agreement with the printed form: exact up to scale, or a deviation by
/// fixed per-coordinate factors shared by every draw.
fn printed_form_check(r: &FiberReport) -> (bool, String) {
    let rows: Vec<(&ProjPoint, &ProjPoint)> =
        r.evidence.iter().filter_map(|e| Some((e.limit.as_ref()?, e.reference.as_ref()?))).collect();
    let worst = rows.iter().map(|(l, p)| l.distance(p)).fold(0.0, f64::max);
    if rows.is_empty() {
        return (false, "no rows".into());
    }
    if worst < 1e-8 {
        return (true, format!("printed form reproduced, max distance {worst:.1e}"));
    }
    let ratios: Vec<Option<Vec<Option<Complex64>>>> = rows.iter().map(|(l, p)| coordinate_ratios(l, p)).collect();
    let Some(first) = ratios[0].clone() else {
        return (false, format!("max distance {worst:.2e}; draw 0 has zeros in only one of the two forms"));
    };
    for (i, rat) in ratios.iter().enumerate() {
        let same = rat.as_ref().is_some_and(|v| {
            v.iter().zip(&first).all(|(a, b)| match (a, b) {
                (None, None) => true,
                (Some(a), Some(b)) => (a - b).norm() <= 1e-8 * b.norm().max(1.0),
                _ => false,
            })
        });
        if !same {
            let fmt = |v: &Option<Vec<Option<Complex64>>>| match v {
                None => "zero pattern differs".to_string(),
                Some(v) => v.iter().map(|z| z.map_or("-".into(), |z| format!("{:.4}{:+.4}i", z.re, z.im))).collect::<Vec<_>>().join(", "),
            };
            return (
                false,
                format!("max distance {worst:.2e}; deviation not uniform: draw 0 ratios [{}], draw {i} ratios [{}]", fmt(&ratios[0]), fmt(rat)),
            );
        }
    }
    (true, format!("uniform deviation, max distance {worst:.2e}"))
}

fn case_family(log: &mut Log, target: Target, names: &[&str]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in names {
        let start = Instant::now();
        let r = match log.run(target, name, 20) {
            Ok(r) => r,
            Err(e) => {
                pass = false;
                parts.push(e);
                continue;
            }
        };
        let secs = start.elapsed().as_secs_f64();
        let (ok, msg) = printed_form_check(&r);
        pass &= ok && r.pass && secs < 5.0;
        parts.push(format!(
            "{name}: engine vs expanded form {} (max {:.1e}), oracle max {:.1e}, {msg}, {secs:.2} s",
            if r.pass { "ok" } else { "VIOLATED" },
            r.max_distance(),
            r.max_oracle_distance()
        ));
    }
    verdict(pass, parts.join("; "))
}

fn criterion_8(log: &mut Log) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, want) in [("cusp", FiberKind::ConormalP1), ("a4", FiberKind::TangentComponent), ("t3t7", FiberKind::TangentComponent)] {
        let p = problem(name);
        let kind = classify_origin_fiber(&p.poly().unwrap(), &p.standard_germ().unwrap()).map(|c| c.kind);
        let ok_kind = kind.as_ref().is_ok_and(|k| *k == want);
        let v = campaigns(log, Target::OriginFiberInclusion, &[name], 200);
        pass &= ok_kind && v.pass;
        parts.push(format!("{} ({:?}), {}", kind.map_or_else(|e| e.to_string(), |k| k.to_string()), want, v.summary));
    }
    verdict(pass, parts.join("; "))
}

struct Example {
    label: &'static str,
    confirmed: Result<f64, String>,
}

fn plane_pair(eta: &[&str], phi2: Reparam) -> Vec<PointCurve> {
    let eta: Vec<PuiseuxSeries> = eta.iter().map(|s| parse_series(s).unwrap()).collect();
    let CurvePair { first, second } = CurvePair::germ(&eta, Reparam::identity(), phi2);
    vec![first, second]
}

/// Oracle distance of a plane-curve limit from a printed `SN_D` point.
fn oracle_snd(f: &str, eta: &[&str], phi2: Reparam, comb: Combination, want: &[i64]) -> Result<f64, String> {
    let curves = plane_pair(eta, phi2);
    let vars = doublefiber::symcore::poly::var_names(&["x", "y"]);
    let f = doublefiber::symcore::parse_poly(f, &vars).map_err(|e| e.to_string())?;
    let d = double_gens(&jacobian_module(&f).map_err(|e| e.to_string())?, Variant::B);
    let o = brute_force_limit_oracle(&d, &curves, &comb).map_err(|e| e.to_string())?;
    let (snd, _) = to_snd(&o.point).map_err(|e| e.to_string())?;
    Ok(snd.distance(&ProjPoint::from_ints(want).unwrap()))
}

fn witness_example(n: u32, b1: u32, c: i64, d: i64, want: ProjPoint) -> Result<f64, String> {
    let w = case_witness(n, b1, Coef::int(c), Scalar::from_int(d), Scalar::one(), Scalar::one()).map_err(|e| e.to_string())?;
    let m = jacobian_module(&w.f).map_err(|e| e.to_string())?;
    let dg = double_gens(&m, Variant::B);
    let CurvePair { first, second } = w.pair();
    let o = brute_force_limit_oracle(&dg, &[first, second], &w.combination).map_err(|e| e.to_string())?;
    let (snd, _) = to_snd(&o.point).map_err(|e| e.to_string())?;
    Ok(snd.distance(&want))
}

fn criterion_10(log: &Log) -> Verdict {
    let frac = |v: &[(i64, i64)]| ProjPoint::new(v.iter().map(|&(p, q)| Scalar::rational(p, q)).collect()).unwrap();
    let ratio = |a: &str, b: &str, want: &str| -> Result<f64, String> {
        let r = derivative_ratio(&parse_series(a).unwrap(), &parse_series(b).unwrap(), 16).map_err(|e| e.to_string())?;
        let w = parse_series(want).unwrap();
        Ok(if r.sub(&w).is_zero_so_far() { 0.0 } else { 1.0 })
    };
    let examples = vec![
        Example { label: "derivative ratio (t^2, t^3) = (3/2) t", confirmed: ratio("t^2", "t^3", "3/2*t") },
        Example { label: "derivative ratio (t^2, t^5) = (5/2) t^3", confirmed: ratio("t^2", "t^5", "5/2*t^3") },
        Example {
            label: "cusp, phi = 2t, psi = (1, 0) -> (0,1,0,0)",
            confirmed: oracle_snd(
                "y^2 - x^3",
                &["t^2", "t^3"],
                Reparam::monomial(Coef::int(2), 1),
                Combination::Constant(vec![Scalar::one(), Scalar::zero()]),
                &[0, 1, 0, 0],
            ),
        },
        Example {
            label: "case A n=2 B1=5 c=-1 d=1 A=B=1 -> <-5,1,-2,0>",
            confirmed: witness_example(2, 5, -1, 1, ProjPoint::from_ints(&[-5, 1, -2, 0]).unwrap()),
        },
        Example {
            label: "case B n=3 B1=5 c=-1 d=2 A=B=1 -> <10/3,1,-7,0>",
            confirmed: witness_example(3, 5, -1, 2, frac(&[(10, 3), (1, 1), (-7, 1), (0, 1)])),
        },
        Example {
            label: "case-A campaign on e8 passes",
            confirmed: match run_campaign(&Campaign::new(Target::CaseA, problem("e8")).seed(7)) {
                Ok(r) if r.pass => Ok(0.0),
                Ok(r) => Err(format!("{} violations", r.violations.len())),
                Err(e) => Err(e.to_string()),
            },
        },
    ];
    let mut pass = true;
    let mut bad = Vec::new();
    for ex in &examples {
        match &ex.confirmed {
            Ok(d) if *d < 1e-6 => {}
            Ok(d) => {
                pass = false;
                bad.push(format!("{} (oracle distance {d:.3})", ex.label));
            }
            Err(e) => {
                pass = false;
                bad.push(format!("{} ({e})", ex.label));
            }
        }
    }
    let rows: usize = log.reports.iter().map(|r| r.evidence.iter().filter(|e| e.oracle_distance.is_some()).count()).sum();
    let worst = log.reports.iter().map(FiberReport::max_oracle_distance).fold(0.0, f64::max);
    let over: usize = log
        .reports
        .iter()
        .map(|r| r.evidence.iter().filter(|e| e.oracle_distance.is_some_and(|d| d >= 1e-6)).count())
        .sum();
    pass &= over == 0;
    let confirmed = examples.len() - bad.len();
    let mut summary = format!(
        "{rows} oracle-checked evidence rows, max engine/oracle distance {worst:.1e}, {over} over 1e-6; {confirmed}/{} worked examples confirmed",
        examples.len()
    );
    if !bad.is_empty() {
        summary.push_str(&format!("; not confirmed: {}", bad.join("; ")));
    }
    verdict(pass, summary)
}

fn main() -> ExitCode {
    let mut log = Log::default();
    let verdicts = vec![
        criterion_1(),
        campaigns(&mut log, Target::GeneratorEquivalence, &["cusp", "a4", "worked"], 50),
        criterion_3(&mut log),
        campaigns(&mut log, Target::GammaLambdaRoundtrip, &["cusp"], 100),
        campaigns(&mut log, Target::JoinInclusion, &["cusp"], 20),
        case_family(&mut log, Target::CaseA, &["a4", "y2x7", "y3x10"]),
        case_family(&mut log, Target::CaseB, &["e8", "y4x7", "y5x8"]),
        criterion_8(&mut log),
        campaigns(&mut log, Target::SmoothFiberInclusion, &["paraboloid", "graph-xy3", "graph-xy3-shifted"], 50),
    ];
    let mut verdicts = verdicts;
    verdicts.push(criterion_10(&log));
    let mut surprises = 0;
    for (i, v) in verdicts.iter().enumerate() {
        println!("criterion {}: {} - {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.summary);
        if v.pass != EXPECTED[i] {
            surprises += 1;
        }
    }
    if surprises > 0 {
        println!("{surprises} verdicts differ from the recorded expectations");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
