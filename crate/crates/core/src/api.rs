//! Stateless request handlers shared by the command line and the HTTP service.
//!
//! Every response is a deterministic function of its request, except that a
//! wall-clock budget can cut an analysis short.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{verify_pumpable, Certificate, PumpableCertificate, VersionedCertificate};
use crate::engine::{
    algo_step, conclude, default_height_budget, detect_nice_uturn, find_initial_pair, uturn_candidates, AlgoState,
    ConcludeLimits, FinalReport, InconclusiveReason, InitialPair, NiceUTurn, Outcome, StakeInstance, TraceEvent, Transition,
};
use crate::instance::{Instance, InstanceError, InstanceFile};
use crate::model::{PathAssembly, TileAssemblySystem};
use crate::movies::{all_bounds, BoundParams};
use crate::pumping::{decide_pumping, PumpDecision, Pumping};
use crate::render::{render_svg, GhostTile, Overlays};
use crate::visibility::{dominating_tiles, visible_glues, Side, VisibilityReport};
use crate::Assembly;

/// Iterations of a pumping drawn beyond the end of the path.
const GHOST_ITERATIONS: u64 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Analyze,
    Pump { i: usize, j: usize },
    Visibility { side: Side },
    Uturn {
        #[serde(default)]
        hand: Option<Side>,
    },
    /// One step of the stake-path algorithm. Without `state` the run starts
    /// from `(i, j)`, or from the initial pair when those are absent too.
    Step {
        #[serde(default)]
        hand: Option<Side>,
        #[serde(default)]
        i: Option<usize>,
        #[serde(default)]
        j: Option<usize>,
        #[serde(default)]
        state: Option<AlgoState>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Pump { .. } => "pump",
            Command::Visibility { .. } => "visibility",
            Command::Uturn { .. } => "uturn",
            Command::Step { .. } => "step",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisRequest {
    pub instance: InstanceFile,
    pub command: Command,
    #[serde(default)]
    pub limits: ConcludeLimits,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Detail {
    Report(FinalReport),
    Pump(PumpDecision),
    Visibility(VisibilityReport),
    Uturn { hand: Side, uturn: Option<NiceUTurn>, candidates: Vec<NiceUTurn> },
    Step { hand: Side, i: usize, j: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisResponse {
    pub command: String,
    pub outcome: String,
    pub detail: Detail,
    pub certificates: Vec<VersionedCertificate>,
    pub trace: Vec<TraceEvent>,
    pub overlays: Overlays,
    /// The state to send back for the next step, while the run goes on.
    pub state: Option<AlgoState>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderRequest {
    pub instance: InstanceFile,
    #[serde(default)]
    pub overlays: Overlays,
    /// Commands whose overlays are drawn on top of `overlays`.
    #[serde(default)]
    pub with: Vec<Command>,
    #[serde(default)]
    pub limits: ConcludeLimits,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApiError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("compute budget of {budget_ms} ms exceeded")]
    Budget { budget_ms: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    pub field: Option<String>,
}

impl ApiError {
    /// The HTTP status the service answers with.
    pub fn status(&self) -> u16 {
        match self {
            ApiError::Instance(_) => 400,
            ApiError::Precondition(_) => 422,
            ApiError::Budget { .. } => 503,
        }
    }

    pub fn body(&self) -> ErrorBody {
        let (error, field) = match self {
            ApiError::Instance(e) => {
                let kind = serde_json::to_value(e).ok().and_then(|v| v["error"].as_str().map(String::from));
                (kind.unwrap_or_else(|| "instance".into()), e.field())
            }
            ApiError::Precondition(_) => ("precondition".into(), None),
            ApiError::Budget { .. } => ("budget".into(), None),
        };
        ErrorBody { error, message: self.to_string(), field }
    }
}

/// Parses a JSON request body, reporting the path of the first bad field.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, ApiError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        ApiError::Instance(InstanceError::Syntax { field, line: inner.line(), column: inner.column(), reason: inner.to_string() })
    })
}

fn instance_of(file: &InstanceFile) -> Result<Instance, ApiError> {
    file.validate().map_err(|e| match e {
        InstanceError::Syntax { field, line, column, reason } => {
            InstanceError::Syntax { field: format!("instance.{field}"), line, column, reason }
        }
        InstanceError::UnknownTile { name, field } => InstanceError::UnknownTile { name, field: format!("instance.{field}") },
        InstanceError::DuplicateTile { name, field } => InstanceError::DuplicateTile { name, field: format!("instance.{field}") },
        other => other,
    })
    .map_err(ApiError::from)
}

fn precondition(e: impl std::fmt::Display) -> ApiError {
    ApiError::Precondition(e.to_string())
}

/// Tiles of the pumping of `P[i, j]` beyond the path, up to index `end` (exclusive).
fn ghosts(path: &PathAssembly, pumping: &Pumping<'_>, end: usize) -> Vec<GhostTile> {
    (path.len() + 1..end)
        .map(|k| {
            let (p, t) = pumping.get(k);
            GhostTile::new(p, t, pumping.iteration(k))
        })
        .collect()
}

fn pumping_overlays(path: &PathAssembly, i: usize, j: usize) -> Overlays {
    let pumping = Pumping::new(path, i, j).expect("certified pumpings are valid");
    let end = path.len() + 1 + GHOST_ITERATIONS as usize * pumping.period();
    Overlays {
        pumping: ghosts(path, &pumping, end),
        dominating: dominating_tiles(path, pumping.vector()).unwrap_or_default(),
        ..Default::default()
    }
}

fn outcome_overlays(path: &PathAssembly, outcome: &Outcome) -> Overlays {
    match outcome {
        Outcome::Pumpable { certificate } => pumping_overlays(path, certificate.i, certificate.j),
        Outcome::Fragile { certificate } => Overlays {
            pumping: certificate.growth_order.iter().map(|t| GhostTile::new(t.point(), t.tile_id(), 0)).collect(),
            conflicts: vec![certificate.conflict_point],
            ..Default::default()
        },
        Outcome::StakeReached { stake, .. } => Overlays { stake: stake.iter().map(|s| s.point).collect(), ..Default::default() },
        _ => Overlays::default(),
    }
}

fn certificates(outcome: &Outcome) -> Vec<VersionedCertificate> {
    match outcome {
        Outcome::Pumpable { certificate } => vec![Certificate::Pumpable(certificate.clone()).into()],
        Outcome::Fragile { certificate } => vec![Certificate::Fragile(certificate.clone()).into()],
        _ => Vec::new(),
    }
}

fn analyze(tas: &TileAssemblySystem, path: &PathAssembly, limits: &ConcludeLimits) -> Result<AnalysisResponse, ApiError> {
    let report = conclude(tas, path, limits).map_err(precondition)?;
    if report.outcome == (Outcome::Inconclusive { reason: InconclusiveReason::Budget }) {
        return Err(ApiError::Budget { budget_ms: limits.budget_ms.unwrap_or(0) });
    }
    Ok(AnalysisResponse {
        command: "analyze".into(),
        outcome: report.outcome.label().into(),
        certificates: certificates(&report.outcome),
        trace: report.trace.clone(),
        overlays: outcome_overlays(path, &report.outcome),
        detail: Detail::Report(report),
        state: None,
    })
}

fn pump(tas: &TileAssemblySystem, path: &PathAssembly, i: usize, j: usize) -> Result<AnalysisResponse, ApiError> {
    let decision = decide_pumping(tas, path, i, j, &Assembly::empty()).map_err(precondition)?;
    let pumping = Pumping::new(path, i, j).map_err(precondition)?;
    let (outcome, certificates, overlays) = match &decision {
        PumpDecision::Infinite { horizon } => {
            let cert = PumpableCertificate { i, j, verified_horizon: horizon.iterations, decision_horizon: horizon.iterations };
            let verified = verify_pumpable(tas, path, &cert).is_ok_and(|v| v.is_accepted());
            let certs = if verified { vec![Certificate::Pumpable(cert).into()] } else { Vec::new() };
            ("infinite", certs, pumping_overlays(path, i, j))
        }
        PumpDecision::ConflictAt { point, index, .. } => {
            let overlays = Overlays { pumping: ghosts(path, &pumping, index + 1), conflicts: vec![*point], ..Default::default() };
            ("conflict", Vec::new(), overlays)
        }
    };
    Ok(AnalysisResponse {
        command: "pump".into(),
        outcome: outcome.into(),
        detail: Detail::Pump(decision),
        certificates,
        trace: Vec::new(),
        overlays,
        state: None,
    })
}

fn step(
    tas: &TileAssemblySystem,
    path: &PathAssembly,
    hand: Side,
    pair: (Option<usize>, Option<usize>),
    state: Option<AlgoState>,
    limits: &ConcludeLimits,
) -> Result<AnalysisResponse, ApiError> {
    let (i, j) = match (pair, &state) {
        ((Some(i), Some(j)), _) => (i, j),
        (_, Some(s)) if s.step == 0 => (s.u, s.v),
        ((None, None), None) => {
            let budget = limits.height_budget.unwrap_or_else(|| default_height_budget(tas));
            match find_initial_pair(tas, path, budget, hand) {
                InitialPair::Pair { i, j } | InitialPair::UTurnFound { i, j, .. } => (i, j),
                InitialPair::TooShort => return Err(ApiError::Precondition(InconclusiveReason::TooShort.to_string())),
            }
        }
        _ => return Err(ApiError::Precondition("a running state needs both `i` and `j`".into())),
    };
    let inst = StakeInstance::new(tas, path, i, j, hand).map_err(precondition)?;
    let state = state.unwrap_or_else(|| AlgoState::initial(i, j));
    if let Some(s) = state.stake.iter().find(|s| tas.tileset.try_get(s.tile).is_none()) {
        return Err(ApiError::Precondition(format!("stake tile at {} has unknown type {}", s.point, s.tile.0)));
    }
    let detail = Detail::Step { hand, i, j };
    Ok(match algo_step(&inst, &state).map_err(precondition)? {
        Transition::Next(next, event) => AnalysisResponse {
            command: "step".into(),
            outcome: "running".into(),
            detail,
            certificates: Vec::new(),
            trace: vec![event],
            overlays: Overlays { stake: next.stake.iter().map(|s| s.point).collect(), ..Default::default() },
            state: Some(next),
        },
        Transition::Halt(outcome, event) => AnalysisResponse {
            command: "step".into(),
            outcome: outcome.label().into(),
            detail,
            certificates: certificates(&outcome),
            trace: vec![event],
            overlays: outcome_overlays(path, &outcome),
            state: None,
        },
    })
}

/// Runs one command on a validated instance.
pub fn run_command(instance: &Instance, command: &Command, limits: &ConcludeLimits) -> Result<AnalysisResponse, ApiError> {
    let (tas, path) = (&instance.tas, &instance.path);
    match command {
        Command::Analyze => analyze(tas, path, limits),
        Command::Pump { i, j } => pump(tas, path, *i, *j),
        Command::Visibility { side } => {
            let report = visible_glues(tas, path, *side);
            Ok(AnalysisResponse {
                command: "visibility".into(),
                outcome: format!("{} visible", report.visible.len()),
                certificates: Vec::new(),
                trace: Vec::new(),
                overlays: Overlays { rays: report.rays.clone(), ..Default::default() },
                detail: Detail::Visibility(report),
                state: None,
            })
        }
        Command::Uturn { hand } => {
            let hand = hand.unwrap_or(Side::West);
            let uturn = detect_nice_uturn(tas, path, hand);
            let overlays = Overlays {
                stake: uturn.map(|u| vec![path.pos(u.i), path.pos(u.j), path.pos(u.k)]).unwrap_or_default(),
                ..Default::default()
            };
            Ok(AnalysisResponse {
                command: "uturn".into(),
                outcome: if uturn.is_some() { "found" } else { "absent" }.into(),
                detail: Detail::Uturn { hand, uturn, candidates: uturn_candidates(tas, path, hand) },
                certificates: Vec::new(),
                trace: Vec::new(),
                overlays,
                state: None,
            })
        }
        Command::Step { hand, i, j, state } => step(tas, path, hand.unwrap_or(Side::West), (*i, *j), state.clone(), limits),
    }
}

pub fn handle(request: &AnalysisRequest) -> Result<AnalysisResponse, ApiError> {
    run_command(&instance_of(&request.instance)?, &request.command, &request.limits)
}

/// The SVG for a render request, with the overlays of every listed command merged in.
pub fn render(request: &RenderRequest) -> Result<String, ApiError> {
    let instance = instance_of(&request.instance)?;
    let mut overlays = request.overlays.clone();
    for command in &request.with {
        let o = run_command(&instance, command, &request.limits)?.overlays;
        overlays.rays.extend(o.rays);
        overlays.dominating.extend(o.dominating);
        overlays.stake.extend(o.stake);
        overlays.pumping.extend(o.pumping);
        overlays.conflicts.extend(o.conflicts);
    }
    Ok(render_svg(&instance.tas, &instance.path, &overlays))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub formula: Option<String>,
    /// Decimal digits of the exact value.
    pub value: Option<String>,
    pub error: Option<String>,
}

/// Every named bound for `|T| = tiles` and `|σ| = seed`.
pub fn bounds(tiles: u64, seed: u64) -> Vec<BoundEntry> {
    all_bounds(&BoundParams { tiles: Some(tiles), seed: Some(seed), ..Default::default() })
        .into_iter()
        .map(|(name, r)| match r {
            Ok(r) => BoundEntry { name: name.into(), formula: Some(r.formula), value: Some(r.value.to_string()), error: None },
            Err(e) => BoundEntry { name: name.into(), formula: None, value: None, error: Some(e.to_string()) },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Mode;
    use crate::fixtures;
    use crate::geom::pt;
    use crate::pumping::ConflictSource;

    fn request(name: &str, command: Command) -> AnalysisRequest {
        let f = fixtures::by_name(name).unwrap();
        AnalysisRequest { instance: InstanceFile::from_system(&f.tas, &f.path), command, limits: ConcludeLimits::default() }
    }

    #[test]
    fn tall_column_is_pumpable() {
        let r = handle(&request("COL-N-TALL", Command::Analyze)).unwrap();
        assert_eq!(r.outcome, "pumpable");
        assert_eq!(r.certificates.len(), 1);
        assert!(!r.overlays.pumping.is_empty());
        assert!(r.overlays.pumping.iter().all(|g| g.x == 0 && g.y > 12));
    }

    #[test]
    fn fork_is_fragile_with_a_marker() {
        let r = handle(&request("FORK", Command::Analyze)).unwrap();
        assert_eq!(r.outcome, "fragile");
        assert_eq!(r.overlays.conflicts, vec![pt(1, 0)]);
    }

    #[test]
    fn hook_pump_conflicts_at_the_seed() {
        let r = handle(&request("HOOK-S", Command::Pump { i: 3, j: 4 })).unwrap();
        assert_eq!(r.outcome, "conflict");
        let Detail::Pump(PumpDecision::ConflictAt { point, iteration, against, .. }) = r.detail else { panic!() };
        assert_eq!((point, iteration, against), (pt(1, 0), 1, ConflictSource::Obstacle));
        assert_eq!(r.overlays.conflicts, vec![pt(1, 0)]);
        let r = handle(&request("COL-N", Command::Pump { i: 1, j: 2 })).unwrap();
        assert_eq!((r.outcome.as_str(), r.certificates.len()), ("infinite", 1));
    }

    #[test]
    fn bad_indices_are_preconditions() {
        let e = handle(&request("HOOK-S", Command::Pump { i: 4, j: 3 })).unwrap_err();
        assert_eq!(e.status(), 422);
    }

    #[test]
    fn visibility_rays() {
        let r = handle(&request("COL-N", Command::Visibility { side: Side::East })).unwrap();
        assert_eq!(r.overlays.rays.len(), 4);
        assert_eq!(r.outcome, "4 visible");
    }

    #[test]
    fn uturn_on_nshape() {
        let r = handle(&request("NSHAPE", Command::Uturn { hand: None })).unwrap();
        assert_eq!(r.outcome, "found");
        let Detail::Uturn { uturn, .. } = r.detail else { panic!() };
        assert_eq!(uturn, Some(NiceUTurn { i: 1, j: 2, k: 12 }));
    }

    #[test]
    fn stepping_replays_the_run() {
        let f = fixtures::col_n_tall(12);
        let limits = crate::engine::RunLimits { fragility_fallback: None, ..crate::engine::RunLimits::bare(Side::West) };
        let run = crate::engine::run_algorithm(&f.tas, &f.path, 1, 2, &limits).unwrap();
        let mut req = request("COL-N-TALL", Command::Step { hand: None, i: Some(1), j: Some(2), state: None });
        let mut events = Vec::new();
        let last = loop {
            let r = handle(&req).unwrap();
            events.extend(r.trace.clone());
            match r.state {
                Some(s) => req.command = Command::Step { hand: None, i: Some(1), j: Some(2), state: Some(s) },
                None => break r,
            }
        };
        assert_eq!(events, run.trace);
        assert_eq!(last.outcome, run.outcome.label());
        assert!(events.iter().all(|e| e.mode == Mode::Forward || e.mode == Mode::Backward));
    }

    #[test]
    fn invalid_states_are_rejected() {
        let mut state = AlgoState::initial(1, 2);
        state.u = 40;
        let e = handle(&request("COL-N", Command::Step { hand: None, i: Some(1), j: Some(2), state: Some(state) })).unwrap_err();
        assert_eq!(e.status(), 422);
    }

    #[test]
    fn invalid_instances_are_bad_requests() {
        let mut req = request("LINE-E", Command::Analyze);
        req.instance.path[1].tile = "zz".into();
        let e = handle(&req).unwrap_err();
        assert_eq!(e.status(), 400);
        assert_eq!(e.body().field.as_deref(), Some("instance.path[1].tile"));
        assert_eq!(e.body().error, "unknown_tile");
        let e = parse_json::<AnalysisRequest>(r#"{"instance": {"tileset": 3}}"#).unwrap_err();
        assert_eq!(e.body().field.as_deref(), Some("instance.tileset"));
    }

    #[test]
    fn requests_round_trip_as_json() {
        let req = request("HOOK-S", Command::Pump { i: 3, j: 4 });
        let text = serde_json::to_string(&req).unwrap();
        assert!(text.contains(r#""command":{"pump":{"i":3,"j":4}}"#), "{text}");
        assert_eq!(parse_json::<AnalysisRequest>(&text).unwrap(), req);
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["command"] = "analyze".into();
        value["limits"] = serde_json::json!({ "max_steps": 7 });
        let req: AnalysisRequest = parse_json(&value.to_string()).unwrap();
        assert_eq!((req.command, req.limits.max_steps), (Command::Analyze, 7));
    }

    #[test]
    fn responses_are_deterministic() {
        for name in ["NSHAPE", "FORK", "COL-N-TALL", "WML-BREAK"] {
            let a = serde_json::to_string(&handle(&request(name, Command::Analyze)).unwrap()).unwrap();
            let b = serde_json::to_string(&handle(&request(name, Command::Analyze)).unwrap()).unwrap();
            assert_eq!(a, b, "{name}");
        }
    }

    #[test]
    fn budget_errors() {
        let mut req = request("COL-N-TALL", Command::Analyze);
        req.limits.budget_ms = Some(0);
        assert_eq!(handle(&req).unwrap_err(), ApiError::Budget { budget_ms: 0 });
        assert_eq!(ApiError::Budget { budget_ms: 0 }.status(), 503);
    }

    #[test]
    fn render_merges_command_overlays() {
        let f = fixtures::hook_s();
        let req = RenderRequest {
            instance: InstanceFile::from_system(&f.tas, &f.path),
            overlays: Overlays::default(),
            with: vec![Command::Pump { i: 3, j: 4 }],
            limits: ConcludeLimits::default(),
        };
        let svg = render(&req).unwrap();
        assert!(svg.contains(r#"class="conflict" data-x="1" data-y="0""#));
    }

    #[test]
    fn bounds_table() {
        let b = bounds(1, 1);
        assert_eq!(b.len(), 6);
        assert_eq!(b[1].value.as_deref(), Some("3"));
        assert!(b.iter().any(|e| e.error.is_some()));
    }
}
