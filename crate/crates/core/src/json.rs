//! Machine-readable output.

use serde::Serialize;

use crate::calculus::ResidueVerdict;
use crate::coeff;
use crate::error::Result;
use crate::identities::IdentityReport;
use crate::order::PrecisionBox;
use crate::series::{Series, Term};

#[derive(Debug, Serialize)]
pub struct TermJson {
    pub exp: Vec<i64>,
    pub coeff: String,
}

#[derive(Debug, Serialize)]
pub struct SeriesJson {
    pub vars: Vec<String>,
    pub twist: Vec<Vec<i64>>,
    pub terms: Vec<TermJson>,
    #[serde(rename = "box")]
    pub region: Vec<(i64, i64)>,
    pub exact: bool,
}

fn term_json(t: Term) -> TermJson {
    TermJson { exp: t.exponent.0, coeff: coeff::format(&t.coeff) }
}

/// The terms of `s` inside `region`, which must be guaranteed. Exact series
/// report all their terms.
pub fn series_json(s: &Series, region: &PrecisionBox) -> Result<SeriesJson> {
    let terms = if s.is_exact() { s.terms().collect() } else { s.terms_in(region)? };
    Ok(SeriesJson {
        vars: s.spec().vars().to_vec(),
        twist: s.spec().twist().rows().to_vec(),
        terms: terms.into_iter().map(term_json).collect(),
        region: region.bounds().to_vec(),
        exact: s.is_exact(),
    })
}

#[derive(Debug, Serialize)]
pub struct VerdictJson {
    pub lhs: SeriesJson,
    pub rhs: SeriesJson,
    pub jacobian_number: i64,
    pub equal: bool,
    #[serde(rename = "box")]
    pub region: Vec<(i64, i64)>,
}

pub fn verdict_json(v: &ResidueVerdict) -> Result<VerdictJson> {
    Ok(VerdictJson {
        lhs: series_json(&v.lhs, &v.region)?,
        rhs: series_json(&v.rhs, &v.region)?,
        jacobian_number: v.jnum,
        equal: v.equal,
        region: v.region.bounds().to_vec(),
    })
}

#[derive(Debug, Serialize)]
pub struct IdentityJson {
    pub lhs: String,
    pub rhs: String,
    pub equal: bool,
}

pub fn identity_json(r: &IdentityReport) -> IdentityJson {
    IdentityJson { lhs: coeff::format(&r.lhs), rhs: coeff::format(&r.rhs), equal: r.equal() }
}
