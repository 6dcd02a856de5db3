//! Certificates for pumpable and fragile paths, and their independent verification.
//!
//! Verification only replays tiles through the basic model: it never calls the
//! analysis engine.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;
use crate::model::{grow_sequence, GrowthFailure, PathAssembly, TileAssemblySystem, TileId};
use crate::pumping::{pumping_horizon, Pumping};

pub const CERTIFICATE_VERSION: u32 = 1;

/// Witness that the pumping of `P[i, j]` grows forever.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PumpableCertificate {
    pub i: usize,
    pub j: usize,
    /// Number of iterations the producer checked.
    pub verified_horizon: u64,
    /// Horizon beyond which no conflict can appear.
    pub decision_horizon: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlacedTile {
    pub x: i64,
    pub y: i64,
    pub tile: usize,
}

impl PlacedTile {
    pub fn new(p: Point, t: TileId) -> PlacedTile {
        PlacedTile { x: p.x, y: p.y, tile: t.0 }
    }

    pub fn point(&self) -> Point {
        Point { x: self.x, y: self.y }
    }

    pub fn tile_id(&self) -> TileId {
        TileId(self.tile)
    }
}

/// Witness that some producible assembly disagrees with the path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragileCertificate {
    pub growth_order: Vec<PlacedTile>,
    pub conflict_point: Point,
}

impl FragileCertificate {
    pub fn new(order: &[(Point, TileId)], conflict_point: Point) -> FragileCertificate {
        FragileCertificate { growth_order: order.iter().map(|(p, t)| PlacedTile::new(*p, *t)).collect(), conflict_point }
    }

    pub fn order(&self) -> Vec<(Point, TileId)> {
        self.growth_order.iter().map(|t| (t.point(), t.tile_id())).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Pumpable(PumpableCertificate),
    Fragile(FragileCertificate),
}

/// On-disk form of a certificate, tagged with a format version.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionedCertificate {
    pub version: u32,
    #[serde(flatten)]
    pub certificate: Certificate,
}

impl From<Certificate> for VersionedCertificate {
    fn from(certificate: Certificate) -> Self {
        VersionedCertificate { version: CERTIFICATE_VERSION, certificate }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("unsupported certificate version {0}")]
    UnsupportedVersion(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Rejection {
    IndicesOutOfRange,
    TypeMismatch,
    ZeroVector,
    HorizonTooShort { claimed: u64, required: u64 },
    PumpingBreaks { index: usize, point: Point },
    ReplayFailed { step: usize, failure: GrowthFailure },
    ConflictPointOffPath,
    NoConflict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    Rejected(Rejection),
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

/// Replays the pumping of `P[i, j]` for `verified_horizon + 1` iterations.
pub fn verify_pumpable(
    tas: &TileAssemblySystem,
    path: &PathAssembly,
    cert: &PumpableCertificate,
) -> Result<Verdict, CertificateError> {
    let (i, j) = (cert.i, cert.j);
    if i >= j {
        return Err(CertificateError::Malformed(format!("i={i} must be less than j={j}")));
    }
    if i == 0 || j > path.len() {
        return Ok(Verdict::Rejected(Rejection::IndicesOutOfRange));
    }
    if path.tile(i) != path.tile(j) {
        return Ok(Verdict::Rejected(Rejection::TypeMismatch));
    }
    if path.pos(i) == path.pos(j) {
        return Ok(Verdict::Rejected(Rejection::ZeroVector));
    }
    let required = pumping_horizon(tas, path, i, j).expect("indices checked above").iterations;
    if cert.verified_horizon < required {
        return Ok(Verdict::Rejected(Rejection::HorizonTooShort { claimed: cert.verified_horizon, required }));
    }
    let pumping = Pumping::new(path, i, j).expect("indices checked above");
    let last = i + (cert.verified_horizon as usize + 1) * (j - i);
    let mut placed: HashMap<Point, TileId> = tas.seed.iter().collect();
    let mut prev: Option<(Point, TileId)> = None;
    for k in 1..=last {
        let (q, t) = pumping.get(k);
        let bound = match prev {
            None => tas.seed.iter().any(|(s, u)| s.direction_to(q).is_some_and(|d| tas.tileset.interacts(u, d, t))),
            Some((p, u)) => p.direction_to(q).is_some_and(|d| tas.tileset.interacts(u, d, t)),
        };
        let agrees = placed.get(&q).is_none_or(|&u| u == t);
        if !bound || !agrees {
            return Ok(Verdict::Rejected(Rejection::PumpingBreaks { index: k, point: q }));
        }
        placed.insert(q, t);
        prev = Some((q, t));
    }
    Ok(Verdict::Accepted)
}

/// Replays the growth order from the seed and checks that it disagrees with the path.
pub fn verify_fragile(
    tas: &TileAssemblySystem,
    path: &PathAssembly,
    cert: &FragileCertificate,
) -> Result<Verdict, CertificateError> {
    if cert.growth_order.is_empty() {
        return Err(CertificateError::Malformed("empty growth order".into()));
    }
    let grown = match grow_sequence(tas, &cert.order()) {
        Ok(a) => a,
        Err(e) => return Ok(Verdict::Rejected(Rejection::ReplayFailed { step: e.step, failure: e.kind })),
    };
    let Some(k) = path.index_of(cert.conflict_point) else {
        return Ok(Verdict::Rejected(Rejection::ConflictPointOffPath));
    };
    match grown.get(cert.conflict_point) {
        Some(t) if t != path.tile(k) => Ok(Verdict::Accepted),
        _ => Ok(Verdict::Rejected(Rejection::NoConflict)),
    }
}

pub fn verify(tas: &TileAssemblySystem, path: &PathAssembly, cert: &Certificate) -> Result<Verdict, CertificateError> {
    match cert {
        Certificate::Pumpable(c) => verify_pumpable(tas, path, c),
        Certificate::Fragile(c) => verify_fragile(tas, path, c),
    }
}

/// Parses a versioned certificate from JSON.
pub fn parse_certificate(json: &str) -> Result<Certificate, CertificateError> {
    let v: VersionedCertificate = serde_json::from_str(json).map_err(|e| CertificateError::Malformed(e.to_string()))?;
    if v.version != CERTIFICATE_VERSION {
        return Err(CertificateError::UnsupportedVersion(v.version));
    }
    Ok(v.certificate)
}

pub fn certificate_to_json(cert: &Certificate) -> String {
    serde_json::to_string_pretty(&VersionedCertificate::from(cert.clone())).expect("certificates serialize")
}
