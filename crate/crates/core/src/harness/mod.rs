//! Seeded verification campaigns and the numerical limit oracle.
//!
//! A campaign runs one check over a deterministic sampling plan and returns
//! a [`FiberReport`]. Sample `i` draws from its own generator
//! (`seed`, stream `i`), so results do not depend on scheduling.

mod mp;
mod draw;
pub mod oracle;
mod targets;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvefibers::FiberDescription;
use crate::error::{Error, Result};
use crate::problem::ProblemFile;
use crate::projan::{Combination, PointCurve, ProjPoint};
use crate::symcore::Scalar;

pub use oracle::{brute_force_limit_oracle, OracleLimit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "generator-equivalence")]
    GeneratorEquivalence,
    #[serde(rename = "rank-doubling")]
    RankDoubling,
    #[serde(rename = "sigma-formula")]
    SigmaFormula,
    #[serde(rename = "gamma-lambda-roundtrip")]
    GammaLambdaRoundtrip,
    #[serde(rename = "join-inclusion")]
    JoinInclusion,
    #[serde(rename = "case-A")]
    CaseA,
    #[serde(rename = "case-B")]
    CaseB,
    /// Case A or B, whichever the branch falls in.
    #[serde(rename = "case-witness")]
    CaseWitness,
    #[serde(rename = "origin-fiber-inclusion")]
    OriginFiberInclusion,
    #[serde(rename = "normal-coordinate-vanishing")]
    NormalCoordinateVanishing,
    #[serde(rename = "smooth-fiber-inclusion")]
    SmoothFiberInclusion,
}

impl Target {
    pub const ALL: [Target; 11] = [
        Target::GeneratorEquivalence,
        Target::RankDoubling,
        Target::SigmaFormula,
        Target::GammaLambdaRoundtrip,
        Target::JoinInclusion,
        Target::CaseA,
        Target::CaseB,
        Target::CaseWitness,
        Target::OriginFiberInclusion,
        Target::NormalCoordinateVanishing,
        Target::SmoothFiberInclusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::GeneratorEquivalence => "generator-equivalence",
            Target::RankDoubling => "rank-doubling",
            Target::SigmaFormula => "sigma-formula",
            Target::GammaLambdaRoundtrip => "gamma-lambda-roundtrip",
            Target::JoinInclusion => "join-inclusion",
            Target::CaseA => "case-A",
            Target::CaseB => "case-B",
            Target::CaseWitness => "case-witness",
            Target::OriginFiberInclusion => "origin-fiber-inclusion",
            Target::NormalCoordinateVanishing => "normal-coordinate-vanishing",
            Target::SmoothFiberInclusion => "smooth-fiber-inclusion",
        }
    }

    pub fn default_samples(self) -> usize {
        match self {
            Target::GeneratorEquivalence | Target::SmoothFiberInclusion => 50,
            Target::SigmaFormula | Target::GammaLambdaRoundtrip => 100,
            Target::OriginFiberInclusion => 200,
            _ => 20,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::DegenerateInput(format!("unknown campaign `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Exact-route comparisons: closed forms, round trips, identities.
    pub symbolic: f64,
    /// Engine against the numerical oracle.
    pub oracle: f64,
    /// Sampled limits against a fiber description.
    pub membership: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { symbolic: 1e-8, oracle: 1e-6, membership: 1e-7 }
    }
}

/// One checked sample. Unused fields are omitted from the JSON.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub index: usize,
    pub check: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<PointCurve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Combination>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<ProjPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ProjPoint>,
    /// A second closed form, reported for comparison and not checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ProjPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Evidence {
    pub fn new(index: usize, check: &str) -> Self {
        Evidence { index, check: check.to_string(), ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub message: String,
    pub evidence: Evidence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub target: Target,
    pub seed: u64,
    /// Overrides [`Target::default_samples`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub inputs: ProblemFile,
}

impl Campaign {
    /// Seed and membership tolerance come from the problem options when set.
    pub fn new(target: Target, inputs: ProblemFile) -> Self {
        let mut tolerances = Tolerances::default();
        if let Some(t) = inputs.options.tolerance {
            tolerances.membership = t;
        }
        Campaign { target, seed: inputs.options.seed.unwrap_or(0), samples: None, tolerances, inputs }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn samples(mut self, samples: usize) -> Self {
        self.samples = Some(samples);
        self
    }

    pub fn sample_count(&self) -> usize {
        self.samples.unwrap_or_else(|| self.target.default_samples())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberReport {
    pub campaign: String,
    pub seed: u64,
    pub samples: usize,
    pub inputs: ProblemFile,
    pub classification: Option<FiberDescription>,
    pub evidence: Vec<Evidence>,
    pub violations: Vec<Violation>,
    pub tolerances: Tolerances,
    pub pass: bool,
    pub runtime_ms: u64,
}

impl FiberReport {
    pub fn max_distance(&self) -> f64 {
        self.evidence.iter().filter_map(|e| e.distance).fold(0.0, f64::max)
    }

    pub fn max_oracle_distance(&self) -> f64 {
        self.evidence.iter().filter_map(|e| e.oracle_distance).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl fmt::Display for FiberReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "campaign {} (seed {}, {} samples)", self.campaign, self.seed, self.samples)?;
        if let Some(c) = &self.classification {
            writeln!(f, "classification {} ({} in P^{})", c.kind, c.subspace.dim(), c.subspace.ambient() - 1)?;
            if let Some(n) = &c.note {
                writeln!(f, "  note: {n}")?;
            }
        }
        writeln!(
            f,
            "{} evidence rows, max distance {:.3e}, max oracle distance {:.3e}",
            self.evidence.len(),
            self.max_distance(),
            self.max_oracle_distance()
        )?;
        for v in &self.violations {
            writeln!(f, "violation #{}: {}", v.index, v.message)?;
        }
        write!(f, "{} in {} ms", if self.pass { "PASS" } else { "FAIL" }, self.runtime_ms)
    }
}

/// The generator for sample `index`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn run_campaign(c: &Campaign) -> Result<FiberReport> {
    c.inputs.validate()?;
    let start = Instant::now();
    let out = targets::run(c)?;
    let pass = out.violations.is_empty();
    Ok(FiberReport {
        campaign: c.target.name().to_string(),
        seed: c.seed,
        samples: c.sample_count(),
        inputs: c.inputs.clone(),
        classification: out.classification,
        evidence: out.evidence,
        violations: out.violations,
        tolerances: c.tolerances,
        pass,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}
