//! JSON inputs accepted by the command-line tool.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cones::Cone;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::metric::ConeMetric;
use crate::ordernorm::OrderUnitSpace;

/// `{"cone", "e", "x"}`; `e` defaults to the cone's canonical unit.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormInput {
    pub cone: Cone,
    #[serde(default)]
    pub e: Option<Vector>,
    pub x: Vector,
}

/// `{"cone", "e", "points"}`: a cone, an optional candidate unit and
/// optional points to classify.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConeInput {
    pub cone: Cone,
    #[serde(default)]
    pub e: Option<Vector>,
    #[serde(default)]
    pub points: Vec<Vector>,
}

/// `{"metric", "mu", "r"}` for the ball identities.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyInput {
    pub metric: ConeMetric,
    #[serde(default = "default_mus")]
    pub mu: Vec<f64>,
    #[serde(default = "default_radii")]
    pub r: Vec<f64>,
}

fn default_mus() -> Vec<f64> {
    vec![0.1, 0.5, 1.0, 2.0, 10.0]
}

fn default_radii() -> Vec<f64> {
    vec![1.0, 0.3, 0.05]
}

/// Parses `text`, reporting failures as `origin:line:column: message`.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
        Error::Parse {
            location: format!("{origin}:{}:{}", e.line(), e.column()),
            message,
        }
    })
}

/// The same space with membership tolerance `tol`.
pub fn with_membership_tol(space: &OrderUnitSpace, tol: f64) -> Result<OrderUnitSpace> {
    OrderUnitSpace::new(space.cone().clone(), space.unit().clone(), tol)
}

/// The same metric over a space with membership tolerance `tol`.
pub fn metric_with_membership_tol(m: &ConeMetric, tol: f64) -> Result<ConeMetric> {
    ConeMetric::new(
        with_membership_tol(m.space(), tol)?,
        m.points().to_vec(),
        m.family().clone(),
    )
}
