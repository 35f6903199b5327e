use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use doublefiber::curvefibers::{
    classify_origin_fiber, fiber_dminus, normal_form, smooth_point_fiber, to_snd, FiberDescription, SecantOrientation,
};
use doublefiber::harness::{brute_force_limit_oracle, run_campaign, sample_rng, Campaign, Target};
use doublefiber::moddouble::{
    double_gens, generic_rank, jacobian_module, singular_locus_test, CurveSampler, HypersurfaceSampler, PairSampler,
    PointSampler, Variant, GENERIC_SAMPLES,
};
use doublefiber::problem::ProblemFile;
use doublefiber::projan::{parse_point, pullback, with_truncation_retry, Combination, CurvePair, Reparam};
use doublefiber::symcore::Scalar;
use doublefiber::Error;

#[derive(Parser)]
#[command(name = "doublefiber", version, about = "Doubles of Jacobian modules and the fibers of their Projan")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    truncation: Option<i64>,
    /// Membership tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Generator matrix of the double of the Jacobian module.
    DoubleGens {
        #[arg(long, default_value = "B")]
        variant: String,
    },
    /// Generic ranks of the Jacobian module and of its double.
    Rank {
        #[arg(long, default_value = "B")]
        variant: String,
    },
    /// Rank drop of the double at a pair of points, or the sigma campaign.
    SigmaTest {
        /// 2n comma-separated coordinates of (x, x').
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Fiber of the double over the origin of a plane branch.
    FiberOrigin,
    /// Fiber of the reduced double and the normal form of the branch.
    FiberDminus,
    /// Limit of a row combination along eta(phi1(t)), eta(phi2(t)).
    Limit {
        #[arg(long, default_value = "B")]
        variant: String,
        #[arg(long, default_value = "t", allow_hyphen_values = true)]
        phi1: String,
        #[arg(long, allow_hyphen_values = true)]
        phi2: String,
        /// `1,0`, `t^2,1` or `balanced(a=1, b=1, m=3, col=1)`.
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
    },
    /// Fiber over a smooth point of a hypersurface.
    SmoothFiber {
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Run a verification campaign.
    Verify {
        #[arg(long)]
        campaign: String,
    },
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

/// Input problems are usage errors; everything after parsing, and any
/// unmet precondition, is computation.
fn usage<T>(r: Result<T, Error>) -> Result<T, Failure> {
    r.map_err(|e| match e {
        Error::PreconditionFailed(_) => Failure::Compute(e),
        e => Failure::Usage(e.to_string()),
    })
}

struct Output {
    json: Value,
    text: String,
    pass: bool,
}

fn ok(json: Value, text: String) -> Result<Output, Failure> {
    Ok(Output { json, text, pass: true })
}

fn load(common: &Common) -> Result<ProblemFile, Failure> {
    let path = common.input.as_ref().ok_or_else(|| Failure::Usage("--input FILE is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut p = usage(ProblemFile::from_json(&text))?;
    if let Some(t) = common.truncation {
        p.options.truncation = Some(t);
    }
    if let Some(t) = common.tol {
        p.options.tolerance = Some(t);
    }
    if let Some(s) = common.seed {
        p.options.seed = Some(s);
    }
    Ok(p)
}

fn point_list(text: &str) -> Result<Vec<Scalar>, Failure> {
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    usage(parse_point(&items))
}

fn sampler(p: &ProblemFile) -> Result<Box<dyn PointSampler>, Failure> {
    Ok(match &p.eta {
        Some(_) => Box::new(CurveSampler::new(usage(p.eta_series())?)),
        None => Box::new(HypersurfaceSampler::new(&usage(p.poly())?)?),
    })
}

fn fiber_text(d: &FiberDescription) -> String {
    let mut s = format!("classification {}\n", d.kind);
    let _ = writeln!(s, "P^{} in P^{} ({:?})", d.subspace.dim(), d.subspace.ambient() - 1, d.claim);
    for v in d.subspace.basis_vectors() {
        let c: Vec<String> = v.iter().map(Scalar::to_string).collect();
        let _ = writeln!(s, "  [{}]", c.join(", "));
    }
    if let Some(n) = &d.note {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let common = &cli.common;
    let p = load(common)?;
    let f = usage(p.poly())?;
    match &cli.command {
        Command::DoubleGens { variant } => {
            let v: Variant = usage(variant.parse())?;
            let d = double_gens(&jacobian_module(&f)?, v);
            let rows: Vec<Vec<String>> = d.rows().iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect();
            let text = rows.iter().map(|r| format!("[{}]", r.join(", "))).collect::<Vec<_>>().join("\n");
            ok(json!({"variant": v.label(), "variables": d.vars(), "rows": rows}), text)
        }
        Command::Rank { variant } => {
            let v: Variant = usage(variant.parse())?;
            let m = jacobian_module(&f)?;
            let d = double_gens(&m, v);
            let s = sampler(&p)?;
            let pair = PairSampler { first: &*s, second: &*s };
            let n = common.samples.unwrap_or(GENERIC_SAMPLES);
            let mut rng = sample_rng(p.options.seed.unwrap_or(0), 0);
            let km = generic_rank(&m, &*s, &mut rng, n)?;
            let kd = generic_rank(&d, &pair, &mut rng, n)?;
            let text = format!("generic rank of M: {}\ngeneric rank of the {} double: {}", km.rank, v.label(), kd.rank);
            ok(json!({"variant": v.label(), "module": km, "double": kd}), text)
        }
        Command::SigmaTest { point: Some(pt) } => {
            let pt = point_list(pt)?;
            let m = jacobian_module(&f)?;
            if pt.len() != 2 * m.n() {
                return Err(Failure::Usage(format!("--point needs {} coordinates, got {}", 2 * m.n(), pt.len())));
            }
            let d = double_gens(&m, Variant::B);
            let s = sampler(&p)?;
            let pair = PairSampler { first: &*s, second: &*s };
            let mut rng = sample_rng(p.options.seed.unwrap_or(0), 0);
            generic_rank(&m, &*s, &mut rng, GENERIC_SAMPLES)?;
            generic_rank(&d, &pair, &mut rng, GENERIC_SAMPLES)?;
            let (x, x2) = pt.split_at(m.n());
            let t = singular_locus_test(&m, &d, x, x2)?;
            ok(json!(t), format!("in_sigma {}\npredicted {}", t.in_sigma, t.predicted))
        }
        Command::SigmaTest { point: None } => verify(common, p, Target::SigmaFormula),
        Command::FiberOrigin => {
            let d = classify_origin_fiber(&f, &usage(p.standard_germ())?)?;
            ok(json!({"classification": d.kind, "fiber": json!(d)}), fiber_text(&d))
        }
        Command::FiberDminus => {
            let germ = usage(p.germ())?;
            let d = fiber_dminus(&f, &germ)?;
            let nf = normal_form(&f, &germ)?;
            let mut text = fiber_text(&d);
            let _ = write!(text, "k = {}, r = {}, tau = {}, mu = {}", nf.k, nf.r, nf.tau, nf.mu);
            if let Some(nu) = &nf.nu {
                let _ = write!(text, ", nu = {nu}");
            }
            ok(json!({"classification": d.kind, "fiber": json!(d), "normal_form": json!(nf)}), text)
        }
        Command::Limit { variant, phi1, phi2, psi } => {
            let v: Variant = usage(variant.parse())?;
            let eta = usage(p.eta_series())?;
            let germ = usage(p.germ())?;
            let (r1, r2) = (usage(Reparam::parse(phi1))?, usage(Reparam::parse(phi2))?);
            let comb = usage(Combination::parse(psi))?;
            let d = double_gens(&jacobian_module(&f)?, v);
            let pair = CurvePair::germ(&eta, r1, r2);
            let t0 = p.options.truncation.unwrap_or_else(|| germ.default_truncation(&f));
            let l = with_truncation_retry(t0, |t| doublefiber::projan::limit(&pullback(&d, &pair, t)?, &comb))?;
            let mut json = json!({"variant": v.label(), "psi": comb.to_string(), "limit": json!(l)});
            let mut text = format!("limit {l}");
            if v == Variant::B && f.nvars() == 2 {
                let (snd, dropped) = to_snd(&l)?;
                json["snd"] = json!(snd);
                json["dropped"] = json!(dropped);
                let _ = write!(text, "\nSN_D coordinates {snd} (dropped {dropped:.1e})");
            }
            let CurvePair { first, second } = pair;
            match brute_force_limit_oracle(&d, &[first, second], &comb) {
                Ok(o) => {
                    let dist = o.point.distance(&l);
                    json["oracle"] = json!({"order": o.order, "point": json!(o.point), "distance": dist});
                    let _ = write!(text, "\noracle order {}, distance {dist:.2e}", o.order);
                }
                Err(e) => {
                    json["oracle"] = json!({"error": e.to_string()});
                    let _ = write!(text, "\noracle unavailable: {e}");
                }
            }
            ok(json, text)
        }
        Command::SmoothFiber { point } => {
            let x = match point {
                Some(pt) => point_list(pt)?,
                None => usage(p.point())?.ok_or_else(|| Failure::Usage("a point is needed (--point or \"point\" in the file)".into()))?,
            };
            let d = smooth_point_fiber(&f, &x, SecantOrientation::FirstMinusSecond)?;
            ok(json!({"classification": d.kind, "fiber": json!(d)}), fiber_text(&d))
        }
        Command::Verify { campaign } => {
            let target: Target = usage(campaign.parse())?;
            verify(common, p, target)
        }
    }
}

fn verify(common: &Common, p: ProblemFile, target: Target) -> Result<Output, Failure> {
    let mut c = Campaign::new(target, p);
    if let Some(n) = common.samples {
        c = c.samples(n);
    }
    let r = run_campaign(&c)?;
    Ok(Output { json: json!(r), text: r.to_string(), pass: r.pass })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = match cli.common.format {
                Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable"),
                Format::Text => out.text,
            };
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
