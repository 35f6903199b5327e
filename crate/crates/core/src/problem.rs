//! JSON problem files: a hypersurface, optionally a parametrized branch on
//! it and a base point, plus run options. Expressions use the polynomial and
//! series grammar of [`crate::symcore`].

use serde::{Deserialize, Serialize};

use crate::curvefibers::{CurveGerm, NormalizationMode};
use crate::error::{Error, Result};
use crate::projan::parse_point;
use crate::symcore::{parse_poly, parse_series, Poly, PuiseuxSeries, Scalar};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub normalization_mode: NormalizationMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub variables: Vec<String>,
    pub f: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
    #[serde(default)]
    pub options: ProblemOptions,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Syntax { pos: e.column(), msg: format!("line {}: {e}", e.line()) }
}

impl ProblemFile {
    pub fn new(variables: &[&str], f: &str) -> Self {
        ProblemFile {
            variables: variables.iter().map(|s| s.to_string()).collect(),
            f: f.to_string(),
            eta: None,
            point: None,
            options: ProblemOptions::default(),
        }
    }

    pub fn with_eta(mut self, eta: &[&str]) -> Self {
        self.eta = Some(eta.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn with_point(mut self, point: &[&str]) -> Self {
        self.point = Some(point.iter().map(|s| s.to_string()).collect());
        self
    }

    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Self> {
        let p: ProblemFile = serde_json::from_str(text).map_err(json_error)?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    /// Every expression parses and the lengths agree with `variables`.
    pub fn validate(&self) -> Result<()> {
        if self.variables.is_empty() {
            return Err(Error::DegenerateInput("no variables".into()));
        }
        self.poly()?;
        if let Some(eta) = &self.eta {
            if eta.len() != self.variables.len() {
                return Err(Error::DimensionMismatch { expected: self.variables.len(), got: eta.len() });
            }
            self.eta_series()?;
        }
        if let Some(pt) = self.point()? {
            if pt.len() != self.variables.len() {
                return Err(Error::DimensionMismatch { expected: self.variables.len(), got: pt.len() });
            }
        }
        Ok(())
    }

    pub fn poly(&self) -> Result<Poly> {
        parse_poly(&self.f, &self.variables)
    }

    pub fn eta_series(&self) -> Result<Vec<PuiseuxSeries>> {
        let eta = self.eta.as_ref().ok_or_else(|| Error::PreconditionFailed("problem has no parametrization eta".into()))?;
        eta.iter().map(|s| parse_series(s)).collect()
    }

    pub fn germ(&self) -> Result<CurveGerm> {
        CurveGerm::new(self.eta_series()?)
    }

    /// The germ checked against the standard normalization of plane branches.
    pub fn standard_germ(&self) -> Result<CurveGerm> {
        CurveGerm::standard(self.eta_series()?, self.options.normalization_mode)
    }

    pub fn point(&self) -> Result<Option<Vec<Scalar>>> {
        match &self.point {
            None => Ok(None),
            Some(p) => {
                let items: Vec<&str> = p.iter().map(String::as_str).collect();
                parse_point(&items).map(Some)
            }
        }
    }
}
