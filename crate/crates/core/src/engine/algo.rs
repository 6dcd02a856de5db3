//! The stake-path algorithm: alternating pumping attempts and branch growth.
//!
//! A state keeps the invariant `P_v = P_u + t`, where `t` is `vec(P_i P_j)` in
//! forward mode and its opposite in backward mode. The stake `S` is stored in
//! forward coordinates and ends at `P_v`. In forward mode the current assembly
//! is `seed ∪ P[1, j] ∪ S`; in backward mode it is `seed ∪ P[1, i] ∪ (S - t)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::certify::{verify_fragile, verify_pumpable, FragileCertificate, PumpableCertificate};
use crate::fragility::{fragility_witness, SearchBudget};
use crate::geom::{walk_side, Point, Vector, WalkSide};
use crate::model::{PathAssembly, TileAssemblySystem, TileId};
use crate::pumping::{decide_pumping, ConflictSource, PeriodicRun, PumpDecision, PumpError, ScanOutcome};
use crate::visibility::Side;

use super::contact::{classify_contact, Contact};
use super::{path_frame, EngineError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Forward,
    Backward,
}

impl Mode {
    pub fn flip(self) -> Mode {
        match self {
            Mode::Forward => Mode::Backward,
            Mode::Backward => Mode::Forward,
        }
    }
}

/// Where a stake tile comes from: `P_index` itself, or `P_index + vec(P_i P_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "from", content = "index", rename_all = "snake_case")]
pub enum Provenance {
    Path(usize),
    Translated(usize),
}

impl Provenance {
    pub fn index(self) -> usize {
        match self {
            Provenance::Path(k) | Provenance::Translated(k) => k,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StakeTile {
    pub point: Point,
    pub tile: TileId,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PumpDirection {
    North,
    South,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum AttemptResult {
    Infinite,
    Conflict { point: Point, against: ConflictSource },
}

/// A pumping of `P[min(u,v), max(u,v)]` tried from the current assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PumpAttempt {
    pub step: usize,
    pub u: usize,
    pub v: usize,
    pub direction: PumpDirection,
    pub result: AttemptResult,
}

impl PumpAttempt {
    pub fn segment(&self) -> (usize, usize) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgoState {
    pub mode: Mode,
    pub u: usize,
    pub v: usize,
    pub stake: Vec<StakeTile>,
    pub history: Vec<PumpAttempt>,
    pub step: usize,
}

impl AlgoState {
    pub fn initial(i: usize, j: usize) -> AlgoState {
        AlgoState { mode: Mode::Forward, u: i, v: j, stake: Vec::new(), history: Vec::new(), step: 0 }
    }

    /// Largest path index any stake tile derives from.
    pub fn reach(&self) -> usize {
        self.stake.iter().map(|s| s.provenance.index()).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stop", rename_all = "snake_case")]
pub enum BranchStop {
    Turn { point: Point, path_index: usize },
    Conflict { point: Point },
    Blocked { point: Point },
    End,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRecord {
    /// Path index of the branch's first tile (which sits at `P_v`).
    pub from: usize,
    /// Path index of the branch's last grown tile.
    pub to: usize,
    pub stop: BranchStop,
    pub zero_length: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub step: usize,
    pub mode: Mode,
    pub u: usize,
    pub v: usize,
    pub attempt: Option<PumpAttempt>,
    pub branch: Option<BranchRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum InconclusiveReason {
    TooShort,
    BranchBlocked { point: Point },
    StepLimit { steps: usize },
    Oscillation { u: usize, v: usize },
    CertificateRejected,
    NoCertificate,
    Budget,
}

impl std::fmt::Display for InconclusiveReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InconclusiveReason::TooShort => f.write_str("the path never climbs high enough to pick a pair"),
            InconclusiveReason::BranchBlocked { point } => write!(f, "branch blocked by the assembly at {point}"),
            InconclusiveReason::StepLimit { steps } => write!(f, "step limit of {steps} reached"),
            InconclusiveReason::Oscillation { u, v } => write!(f, "zero-length branches repeat at ({u},{v})"),
            InconclusiveReason::CertificateRejected => f.write_str("candidate certificate failed verification"),
            InconclusiveReason::NoCertificate => f.write_str("infinite pumping found but no certificate for the path"),
            InconclusiveReason::Budget => f.write_str("compute budget exhausted"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Pumpable { certificate: PumpableCertificate },
    Fragile { certificate: FragileCertificate },
    /// The branch `P[suffix, |P|-1] + translation` grew without a qualifying intersection.
    CageFree { mode: Mode, suffix: usize, translation: Vector },
    StakeReached { u: usize, v: usize, stake: Vec<StakeTile> },
    Inconclusive { reason: InconclusiveReason },
}

impl Outcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, Outcome::Pumpable { .. } | Outcome::Fragile { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Pumpable { .. } => "pumpable",
            Outcome::Fragile { .. } => "fragile",
            Outcome::CageFree { .. } => "cage_free",
            Outcome::StakeReached { .. } => "stake_reached",
            Outcome::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transition {
    Next(AlgoState, TraceEvent),
    Halt(Outcome, TraceEvent),
}

/// The fixed data of one run: system, path, pair and hand.
#[derive(Clone, Copy, Debug)]
pub struct StakeInstance<'a> {
    pub tas: &'a TileAssemblySystem,
    pub path: &'a PathAssembly,
    pub i: usize,
    pub j: usize,
    pub hand: Side,
}

impl<'a> StakeInstance<'a> {
    pub fn new(tas: &'a TileAssemblySystem, path: &'a PathAssembly, i: usize, j: usize, hand: Side) -> Result<Self, EngineError> {
        if i == 0 || i >= j || j > path.len() {
            return Err(EngineError::Pump(PumpError::InvalidIndices { i, j, len: path.len() }));
        }
        if path.tile(i) != path.tile(j) {
            return Err(EngineError::Pump(PumpError::TypeMismatch { i, j }));
        }
        if path.pos(i) == path.pos(j) {
            return Err(EngineError::Pump(PumpError::ZeroPeriod { i, j }));
        }
        Ok(StakeInstance { tas, path, i, j, hand })
    }

    pub fn forward(&self) -> Vector {
        self.path.pos(self.j) - self.path.pos(self.i)
    }

    pub fn translation(&self, mode: Mode) -> Vector {
        match mode {
            Mode::Forward => self.forward(),
            Mode::Backward => -self.forward(),
        }
    }

    /// The side of the path the stake must not enter.
    fn forbidden(&self) -> WalkSide {
        match self.hand {
            Side::West => WalkSide::Right,
            Side::East => WalkSide::Left,
        }
    }

    /// Growth order (seed excluded) and occupancy of the current assembly.
    pub fn assembly(&self, state: &AlgoState) -> (Vec<(Point, TileId)>, HashMap<Point, TileId>) {
        let (base, shift) = match state.mode {
            Mode::Forward => (self.j, Vector::ZERO),
            Mode::Backward => (self.i, -self.forward()),
        };
        let mut order: Vec<(Point, TileId)> = self.path.steps()[..base].to_vec();
        order.extend(state.stake.iter().map(|s| (s.point + shift, s.tile)));
        let mut occupied: HashMap<Point, TileId> = self.tas.seed.iter().collect();
        for &(p, t) in &order {
            occupied.entry(p).or_insert(t);
        }
        (order, occupied)
    }
}

/// Performs one step of the algorithm from `state`.
pub fn algo_step(inst: &StakeInstance<'_>, state: &AlgoState) -> Result<Transition, EngineError> {
    let path = inst.path;
    let n = path.len();
    let t = inst.translation(state.mode);
    let (u, v) = (state.u, state.v);
    if u == 0 || u > n || v == 0 || v > n || path.pos(u) + t != path.pos(v) {
        return Err(EngineError::InvalidState(format!("P_{v} is not P_{u} translated by {t}")));
    }
    let (order, occupied) = inst.assembly(state);
    let mut event = TraceEvent { step: state.step + 1, mode: state.mode, u, v, attempt: None, branch: None };
    let mut next = state.clone();
    next.step += 1;

    if state.mode == Mode::Forward {
        let (a, b) = (u.min(v), u.max(v));
        let direction = if u < v { PumpDirection::North } else { PumpDirection::South };
        let run = PeriodicRun {
            base: &path.steps()[a - 1..b - 1],
            vector: path.pos(b) - path.pos(a),
            start: if v == b { b - a } else { 0 },
        };
        let scan = run.scan(&occupied);
        let result = match scan {
            ScanOutcome::Infinite { .. } => AttemptResult::Infinite,
            ScanOutcome::Conflict { point, against, .. } => AttemptResult::Conflict { point, against },
        };
        let attempt = PumpAttempt { step: next.step, u, v, direction, result };
        event.attempt = Some(attempt);
        next.history.push(attempt);
        if result == AttemptResult::Infinite {
            let outcome = resolve_infinite_pumping(inst, &run, &order, &occupied, a, b)?;
            return Ok(Transition::Halt(outcome, event));
        }
    }

    let mut grown: Vec<(Point, TileId, usize)> = Vec::new();
    let mut placed = occupied;
    for k in u..n {
        let x = path.pos(k) + t;
        let tile = path.tile(k);
        if k > u {
            if placed.get(&x).is_some_and(|&y| y != tile) {
                let stop = BranchStop::Blocked { point: x };
                event.branch = Some(BranchRecord { from: u, to: k - 1, stop, zero_length: false });
                return Ok(Transition::Halt(
                    Outcome::Inconclusive { reason: InconclusiveReason::BranchBlocked { point: x } },
                    event,
                ));
            }
            if let Some(m) = path.index_of(x) {
                if path.tile(m) != tile {
                    let mut full = order.clone();
                    full.extend(grown.iter().map(|g| (g.0, g.1)));
                    full.push((x, tile));
                    let cert = FragileCertificate::new(&full, x);
                    event.branch = Some(BranchRecord { from: u, to: k, stop: BranchStop::Conflict { point: x }, zero_length: false });
                    return Ok(Transition::Halt(checked_fragile(inst, cert)?, event));
                }
            }
            placed.entry(x).or_insert(tile);
            grown.push((x, tile, k));
        }
        let Some(m) = path.index_of(x) else { continue };
        if k + 1 >= n {
            continue;
        }
        let Some((back, out)) = path_frame(inst.tas, path, m) else { continue };
        let Some(exit) = x.direction_to(path.pos(k + 1) + t) else {
            return Err(EngineError::InvalidState("branch is not a lattice walk".into()));
        };
        if walk_side(back, out, exit) == Some(inst.forbidden()) {
            let zero_length = k == u;
            event.branch = Some(BranchRecord { from: u, to: k, stop: BranchStop::Turn { point: x, path_index: m }, zero_length });
            let shift = match state.mode {
                Mode::Forward => Vector::ZERO,
                Mode::Backward => inst.forward(),
            };
            next.stake.extend(grown.iter().map(|&(p, tile, q)| StakeTile {
                point: p + shift,
                tile,
                provenance: match state.mode {
                    Mode::Forward => Provenance::Translated(q),
                    Mode::Backward => Provenance::Path(q),
                },
            }));
            next.mode = state.mode.flip();
            next.u = m;
            next.v = k;
            return Ok(Transition::Next(next, event));
        }
    }
    let last = if n > u + 1 { n - 1 } else { u };
    event.branch = Some(BranchRecord { from: u, to: last, stop: BranchStop::End, zero_length: false });
    Ok(Transition::Halt(Outcome::CageFree { mode: state.mode, suffix: u, translation: t }, event))
}

fn checked_fragile(inst: &StakeInstance<'_>, cert: FragileCertificate) -> Result<Outcome, EngineError> {
    Ok(if verify_fragile(inst.tas, inst.path, &cert)?.is_accepted() {
        Outcome::Fragile { certificate: cert }
    } else {
        Outcome::Inconclusive { reason: InconclusiveReason::CertificateRejected }
    })
}

/// The pumping of `P[a, b]` grows forever from the current assembly: either
/// the path's own pumping is infinite, or the path disagrees with it.
fn resolve_infinite_pumping(
    inst: &StakeInstance<'_>,
    run: &PeriodicRun<'_>,
    order: &[(Point, TileId)],
    occupied: &HashMap<Point, TileId>,
    a: usize,
    b: usize,
) -> Result<Outcome, EngineError> {
    let (tas, path) = (inst.tas, inst.path);
    if let PumpDecision::Infinite { horizon } = decide_pumping(tas, path, a, b, &crate::model::Assembly::empty())? {
        let cert = PumpableCertificate { i: a, j: b, verified_horizon: horizon.iterations, decision_horizon: horizon.iterations };
        return Ok(if verify_pumpable(tas, path, &cert)?.is_accepted() {
            Outcome::Pumpable { certificate: cert }
        } else {
            Outcome::Inconclusive { reason: InconclusiveReason::CertificateRejected }
        });
    }
    let mut reach = occupied.clone();
    reach.extend(path.steps().iter().copied());
    let horizon = run.horizon(&reach);
    let p = run.base.len();
    let mut full: Vec<(Point, TileId)> = order.to_vec();
    for s in run.start..(horizon.iterations as usize + 2) * p {
        let (q, t) = run.tile(s);
        full.push((q, t));
        if let Some(m) = path.index_of(q) {
            if path.tile(m) != t {
                return checked_fragile(inst, FragileCertificate::new(&full, q));
            }
        }
    }
    Ok(Outcome::Inconclusive { reason: InconclusiveReason::NoCertificate })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "claim", rename_all = "snake_case")]
pub enum InvariantViolation {
    /// A stake tile does not match its claimed origin.
    Provenance { step: usize, point: Point },
    /// The stake crosses the visibility ray of `P_i` or `P_j`.
    RayCrossed { step: usize, index: usize, point: Point },
    /// The stake, or its backward translate, crosses the path.
    Crossing { step: usize, translated: bool },
    /// The furthest path index reached by the stake did not increase.
    NoProgress { step: usize, before: usize, after: usize },
}

/// Checks the invariants every state reached by the algorithm should satisfy.
pub fn check_invariants(inst: &StakeInstance<'_>, state: &AlgoState, previous_reach: Option<usize>) -> Vec<InvariantViolation> {
    let (tas, path) = (inst.tas, inst.path);
    let fwd = inst.forward();
    let step = state.step;
    let mut out = Vec::new();
    for s in &state.stake {
        let (q, idx) = match s.provenance {
            Provenance::Path(k) => (path.pos(k), k),
            Provenance::Translated(k) => (path.pos(k) + fwd, k),
        };
        if q != s.point || path.tile(idx) != s.tile {
            out.push(InvariantViolation::Provenance { step, point: s.point });
        }
    }
    let mut walk: Vec<Point> = vec![path.pos(inst.j)];
    walk.extend(state.stake.iter().map(|s| s.point));
    for index in [inst.i, inst.j] {
        let (p, q) = (path.pos(index), path.pos(index + 1));
        if p.x != q.x || q.y != p.y + 1 {
            continue;
        }
        for w in walk.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.x == b.x && a.y.min(b.y) == p.y && a.y != b.y && inst.hand.beyond(a.x, p.x) {
                out.push(InvariantViolation::RayCrossed { step, index, point: a });
            }
        }
    }
    if classify_contact(tas, &walk, path) == Contact::Crosses {
        out.push(InvariantViolation::Crossing { step, translated: false });
    }
    let back: Vec<Point> = std::iter::once(path.pos(inst.i)).chain(state.stake.iter().map(|s| s.point - fwd)).collect();
    if classify_contact(tas, &back, path) == Contact::Crosses {
        out.push(InvariantViolation::Crossing { step, translated: true });
    }
    if let Some(before) = previous_reach {
        let after = state.reach();
        if after <= before {
            out.push(InvariantViolation::NoProgress { step, before, after });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunLimits {
    pub max_steps: usize,
    /// Rows above the seed at which the run stops with `StakeReached`; `None` disables the check.
    pub stake_height_budget: Option<i64>,
    pub hand: Side,
    /// Search for a fragility witness when the algorithm itself certifies nothing.
    pub fragility_fallback: Option<SearchBudget>,
    pub check_invariants: bool,
}

impl RunLimits {
    pub fn for_system(tas: &TileAssemblySystem) -> RunLimits {
        RunLimits {
            max_steps: 10_000,
            stake_height_budget: Some(8 * tas.tileset.len() as i64),
            hand: Side::West,
            fragility_fallback: Some(SearchBudget::default()),
            check_invariants: true,
        }
    }

    /// The bare algorithm: no fallback, no stake budget.
    pub fn bare(hand: Side) -> RunLimits {
        RunLimits { max_steps: 10_000, stake_height_budget: None, hand, fragility_fallback: None, check_invariants: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub outcome: Outcome,
    pub trace: Vec<TraceEvent>,
    pub history: Vec<PumpAttempt>,
    pub violations: Vec<InvariantViolation>,
    pub final_state: AlgoState,
    /// Whether the outcome came from the fragility fallback rather than the algorithm.
    pub from_fallback: bool,
}

/// Runs the algorithm from the pair `(i, j)` until it halts.
pub fn run_algorithm(
    tas: &TileAssemblySystem,
    path: &PathAssembly,
    i: usize,
    j: usize,
    limits: &RunLimits,
) -> Result<RunReport, EngineError> {
    let inst = StakeInstance::new(tas, path, i, j, limits.hand)?;
    let mut state = AlgoState::initial(i, j);
    let mut trace = Vec::new();
    let mut violations = Vec::new();
    let mut reach: Option<usize> = None;
    let mut last_zero: Option<(usize, usize)> = None;
    let top = tas.seed_top();
    let outcome = loop {
        if let Some(budget) = limits.stake_height_budget {
            if path.pos(state.u).y - top > budget {
                break Outcome::StakeReached { u: state.u, v: state.v, stake: state.stake.clone() };
            }
        }
        if state.step >= limits.max_steps {
            break Outcome::Inconclusive { reason: InconclusiveReason::StepLimit { steps: limits.max_steps } };
        }
        match algo_step(&inst, &state)? {
            Transition::Halt(outcome, event) => {
                trace.push(event);
                break outcome;
            }
            Transition::Next(next, event) => {
                let zero = event.branch.is_some_and(|b| b.zero_length);
                trace.push(event);
                if zero {
                    if last_zero == Some((next.u, next.v)) {
                        state = next;
                        break Outcome::Inconclusive { reason: InconclusiveReason::Oscillation { u: state.u, v: state.v } };
                    }
                    last_zero = Some((state.u, state.v));
                } else {
                    last_zero = None;
                }
                if limits.check_invariants {
                    violations.extend(check_invariants(&inst, &next, reach));
                }
                reach = Some(next.reach());
                state = next;
            }
        }
    };
    let history = trace.iter().filter_map(|e| e.attempt).collect();
    let mut report = RunReport { outcome, history, trace, violations, final_state: state, from_fallback: false };
    if !report.outcome.is_certified() {
        if let Some(budget) = limits.fragility_fallback {
            if let Ok(Some(cert)) = fragility_witness(tas, path, budget) {
                report.outcome = Outcome::Fragile { certificate: cert };
                report.from_fallback = true;
            }
        }
    }
    Ok(report)
}
