//! The whole pipeline for one path: pick a pair, run the algorithm, and
//! follow up on stake and cage-free outcomes until a certificate is found.

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::certify::{verify, verify_fragile, Certificate, FragileCertificate};
use crate::fragility::{fragility_witness, SearchBudget};
use crate::geom::{Point, Vector};
use crate::model::{PathAssembly, TileAssemblySystem, TileId};
use crate::movies::{cagefree_separators, diet_check, movies_equal_upto, record_movie, wml_pump, DietConfig, DietOutcome, WmlOutcome};
use crate::pumping::Pumping;
use crate::visibility::Side;

use super::algo::{
    algo_step, run_algorithm, AlgoState, AttemptResult, InconclusiveReason, Mode, Outcome, PumpAttempt, RunLimits,
    StakeInstance, TraceEvent, Transition,
};
use super::init::{default_height_budget, find_initial_pair, InitialPair};
use super::monitor::{south_pump_monitor, TrousCheck};
use super::EngineError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConcludeLimits {
    /// Rows the path must climb before a pair is chosen; defaults to `2|T| + 2`.
    pub height_budget: Option<i64>,
    pub max_steps: usize,
    /// Rows above the seed at which a run stops with `StakeReached`; defaults to `8|T|`.
    pub stake_height_budget: Option<i64>,
    /// Further steps taken after a stake is reached.
    pub stake_continuation: usize,
    pub fragility: SearchBudget,
    /// Check for a sideways exit of a flat rectangle around the seed first.
    pub diet: Option<DietConfig>,
    /// Wall-clock limit in milliseconds.
    pub budget_ms: Option<u64>,
}

impl Default for ConcludeLimits {
    fn default() -> Self {
        ConcludeLimits {
            height_budget: None,
            max_steps: 10_000,
            stake_height_budget: None,
            stake_continuation: 64,
            fragility: SearchBudget::default(),
            diet: None,
            budget_ms: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Stage {
    Diet { result: DietOutcome },
    Wml { result: WmlOutcome },
    InitialPair { hand: Side, result: InitialPair },
    Run { hand: Side, i: usize, j: usize, prefix: usize, outcome: String, steps: usize },
    Continuation { hand: Side, steps: usize, outcome: String, candidates: usize },
    Monitor { hand: Side, result: TrousCheck },
    CageFree { hand: Side, suffix: usize, vector: Vector, separators: usize, error: Option<String> },
    Fallback { found: bool },
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalReport {
    /// The hand of the run that produced the outcome, if any.
    pub hand: Option<Side>,
    pub stages: Vec<Stage>,
    pub outcome: Outcome,
    pub trace: Vec<TraceEvent>,
}

impl FinalReport {
    pub fn certificate(&self) -> Option<Certificate> {
        match &self.outcome {
            Outcome::Pumpable { certificate } => Some(Certificate::Pumpable(certificate.clone())),
            Outcome::Fragile { certificate } => Some(Certificate::Fragile(certificate.clone())),
            _ => None,
        }
    }
}

struct Pipeline<'a> {
    tas: &'a TileAssemblySystem,
    path: &'a PathAssembly,
    limits: &'a ConcludeLimits,
    started: Instant,
    stages: Vec<Stage>,
}

impl Pipeline<'_> {
    fn out_of_time(&self) -> bool {
        self.limits.budget_ms.is_some_and(|ms| self.started.elapsed().as_millis() >= u128::from(ms))
    }

    /// Keeps a certificate only if it verifies against the whole path.
    fn certified(&self, outcome: Outcome) -> Option<Outcome> {
        let cert = match &outcome {
            Outcome::Pumpable { certificate } => Certificate::Pumpable(certificate.clone()),
            Outcome::Fragile { certificate } => Certificate::Fragile(certificate.clone()),
            _ => return None,
        };
        verify(self.tas, self.path, &cert).ok().filter(|v| v.is_accepted()).map(|_| outcome)
    }

    fn wml(&mut self, path: &PathAssembly, w: &crate::movies::Window, v: Vector) -> Option<Outcome> {
        let result = wml_pump(self.tas, path, w, v).ok()?;
        let outcome = match &result {
            WmlOutcome::Pumpable { certificate, .. } => Some(Outcome::Pumpable { certificate: certificate.clone() }),
            WmlOutcome::Fragile { certificate, .. } => Some(Outcome::Fragile { certificate: certificate.clone() }),
            WmlOutcome::NotApplicable(_) => None,
        };
        self.stages.push(Stage::Wml { result });
        outcome.and_then(|o| self.certified(o))
    }

    fn diet(&mut self, config: DietConfig) -> Option<Outcome> {
        let result = diet_check(self.tas, self.path, &config);
        self.stages.push(Stage::Diet { result: result.clone() });
        let DietOutcome::RepeatFound { index, first, vector, .. } = result else { return None };
        self.wml(&self.path.prefix(index), &first, vector)
    }

    fn cage_free(&mut self, hand: Side, suffix: usize, translation: Vector) -> Option<Outcome> {
        for vector in [translation, -translation] {
            if vector.y <= 0 {
                continue;
            }
            let seps = match cagefree_separators(self.tas, self.path, suffix, vector) {
                Ok(s) => s,
                Err(e) => {
                    self.stages.push(Stage::CageFree { hand, suffix, vector, separators: 0, error: Some(e.to_string()) });
                    continue;
                }
            };
            self.stages.push(Stage::CageFree { hand, suffix, vector, separators: seps.len(), error: None });
            let movies: Vec<_> = seps.iter().map(|w| record_movie(self.tas, self.path, w).ok()).collect();
            let offset = |w: &crate::movies::Window| match &w.kind {
                crate::movies::WindowKind::PeriodicSeparator { offset, .. } => *offset,
                _ => Vector::ZERO,
            };
            for b in 0..seps.len() {
                for a in 0..b {
                    let (Some(ma), Some(mb)) = (&movies[a], &movies[b]) else { continue };
                    let shift = offset(&seps[b]) - offset(&seps[a]);
                    if ma.is_empty() || !movies_equal_upto(ma, mb, shift) {
                        continue;
                    }
                    if let Some(o) = self.wml(self.path, &seps[a], shift) {
                        return Some(o);
                    }
                }
            }
        }
        None
    }

    /// Keeps stepping past the stake budget and tries to break the path with
    /// the pumpings attempted along the way.
    fn continuation(&mut self, hand: Side, i: usize, j: usize, from: AlgoState) -> Option<Outcome> {
        let inst = StakeInstance::new(self.tas, self.path, i, j, hand).ok()?;
        let mut state = from;
        let mut visited: Vec<(AlgoState, PumpAttempt)> = Vec::new();
        let mut label = "step_limit".to_string();
        let mut steps = 0;
        let mut result = None;
        while steps < self.limits.stake_continuation && !self.out_of_time() {
            steps += 1;
            match algo_step(&inst, &state) {
                Ok(Transition::Next(next, event)) => {
                    if let Some(a) = event.attempt {
                        visited.push((state.clone(), a));
                    }
                    state = next;
                }
                Ok(Transition::Halt(outcome, event)) => {
                    if let Some(a) = event.attempt {
                        visited.push((state.clone(), a));
                    }
                    label = outcome.label().to_string();
                    result = self.certified(outcome);
                    break;
                }
                Err(_) => break,
            }
        }
        let mut candidates = 0;
        if result.is_none() {
            for (st, attempt) in &visited {
                if !matches!(attempt.result, AttemptResult::Conflict { .. }) {
                    continue;
                }
                for order in break_candidates(&inst, st, attempt) {
                    candidates += 1;
                    if let Some(cert) = first_disagreement(self.tas, self.path, &order) {
                        if verify_fragile(self.tas, self.path, &cert).is_ok_and(|v| v.is_accepted()) {
                            result = Some(Outcome::Fragile { certificate: cert });
                            break;
                        }
                    }
                }
                if result.is_some() {
                    break;
                }
            }
        }
        self.stages.push(Stage::Continuation { hand, steps, outcome: label, candidates });
        let history: Vec<PumpAttempt> = state.history.clone();
        self.stages.push(Stage::Monitor { hand, result: south_pump_monitor(self.path, &history) });
        result
    }
}

/// Growth orders that replay the pumping of an attempted segment from the
/// assemblies of both modes, one iteration past the decision horizon.
fn break_candidates(inst: &StakeInstance<'_>, state: &AlgoState, attempt: &PumpAttempt) -> Vec<Vec<(Point, TileId)>> {
    let (a, b) = attempt.segment();
    let path = inst.path;
    let Ok(pumping) = Pumping::new(path, a, b) else { return Vec::new() };
    let iterations = crate::pumping::pumping_horizon(inst.tas, path, a, b).map(|h| h.iterations as usize + 2).unwrap_or(2);
    let period = b - a;
    let pumped: Vec<(Point, TileId)> = (a..a + iterations * period).map(|k| pumping.get(k)).collect();
    let fwd = inst.forward();
    let mut out = Vec::new();
    for mode in [Mode::Forward, Mode::Backward] {
        let st = AlgoState { mode, ..state.clone() };
        let (mut order, _) = inst.assembly(&st);
        let segment: Vec<(Point, TileId)> = match mode {
            Mode::Forward => path.steps()[a - 1..b].iter().map(|&(p, t)| (p + fwd, t)).collect(),
            Mode::Backward => path.steps()[a - 1..b].to_vec(),
        };
        order.extend(segment);
        out.push(order.clone());
        order.extend(pumped.iter().copied());
        out.push(order);
    }
    let mut plain: Vec<(Point, TileId)> = path.steps()[..a - 1].to_vec();
    plain.extend(pumped);
    out.push(plain);
    out
}

/// Replays `order` (skipping repeats and tiles that cannot attach) and stops
/// at the first tile placed on the path with another type.
fn first_disagreement(tas: &TileAssemblySystem, path: &PathAssembly, order: &[(Point, TileId)]) -> Option<FragileCertificate> {
    let mut placed: HashMap<Point, TileId> = tas.seed.iter().collect();
    let mut kept = Vec::new();
    for &(p, t) in order {
        match placed.get(&p) {
            Some(&u) if u == t => continue,
            Some(_) => return None,
            None => {}
        }
        if !crate::model::binds_into(&tas.tileset, |q| placed.get(&q).copied(), p, t) {
            return None;
        }
        placed.insert(p, t);
        kept.push((p, t));
        if path.index_of(p).is_some_and(|k| path.tile(k) != t) {
            return Some(FragileCertificate::new(&kept, p));
        }
    }
    None
}

/// Runs the full analysis of `path`.
pub fn conclude(tas: &TileAssemblySystem, path: &PathAssembly, limits: &ConcludeLimits) -> Result<FinalReport, EngineError> {
    let mut pipe = Pipeline { tas, path, limits, started: Instant::now(), stages: Vec::new() };
    let finish = |pipe: Pipeline<'_>, hand, outcome, trace| FinalReport { hand, stages: pipe.stages, outcome, trace };

    if let Some(config) = limits.diet {
        if let Some(o) = pipe.diet(config) {
            return Ok(finish(pipe, None, o, Vec::new()));
        }
    }
    let height = limits.height_budget.unwrap_or_else(|| default_height_budget(tas));
    let mut pending: Option<(Side, Outcome, Vec<TraceEvent>)> = None;
    for hand in [Side::West, Side::East] {
        if pipe.out_of_time() {
            pipe.stages.push(Stage::Budget);
            return Ok(finish(pipe, None, Outcome::Inconclusive { reason: InconclusiveReason::Budget }, Vec::new()));
        }
        let init = find_initial_pair(tas, path, height, hand);
        pipe.stages.push(Stage::InitialPair { hand, result: init });
        let (i, j, run_path) = match init {
            InitialPair::TooShort => continue,
            InitialPair::Pair { i, j } => (i, j, path.clone()),
            InitialPair::UTurnFound { i, j, k } => (i, j, path.prefix((k + 1).min(path.len()))),
        };
        let run_limits = RunLimits {
            max_steps: limits.max_steps,
            stake_height_budget: Some(limits.stake_height_budget.unwrap_or(8 * tas.tileset.len() as i64)),
            hand,
            fragility_fallback: None,
            check_invariants: false,
        };
        let report = run_algorithm(tas, &run_path, i, j, &run_limits)?;
        pipe.stages.push(Stage::Run {
            hand,
            i,
            j,
            prefix: run_path.len(),
            outcome: report.outcome.label().to_string(),
            steps: report.trace.len(),
        });
        if let Some(o) = pipe.certified(report.outcome.clone()) {
            return Ok(finish(pipe, Some(hand), o, report.trace));
        }
        let resolved = match &report.outcome {
            Outcome::StakeReached { .. } => pipe.continuation(hand, i, j, report.final_state.clone()),
            Outcome::CageFree { suffix, translation, .. } => pipe.cage_free(hand, *suffix, *translation),
            _ => None,
        };
        if let Some(o) = resolved {
            return Ok(finish(pipe, Some(hand), o, report.trace));
        }
        let informative = matches!(report.outcome, Outcome::StakeReached { .. } | Outcome::CageFree { .. });
        if pending.is_none() || informative && !pending.as_ref().is_some_and(|p| matches!(p.1, Outcome::StakeReached { .. } | Outcome::CageFree { .. })) {
            pending = Some((hand, report.outcome, report.trace));
        }
    }
    let found = fragility_witness(tas, path, limits.fragility).ok().flatten();
    pipe.stages.push(Stage::Fallback { found: found.is_some() });
    if let Some(cert) = found {
        if let Some(o) = pipe.certified(Outcome::Fragile { certificate: cert }) {
            return Ok(finish(pipe, None, o, Vec::new()));
        }
    }
    Ok(match pending {
        Some((hand, outcome, trace)) => finish(pipe, Some(hand), outcome, trace),
        None => finish(pipe, None, Outcome::Inconclusive { reason: InconclusiveReason::TooShort }, Vec::new()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn tall_column_is_pumpable() {
        let f = fixtures::col_n_tall(12);
        let r = conclude(&f.tas, &f.path, &ConcludeLimits::default()).unwrap();
        assert!(matches!(r.outcome, Outcome::Pumpable { .. }), "{:?}", r.outcome);
        assert_eq!(r.hand, Some(Side::West));
        assert!(verify(&f.tas, &f.path, &r.certificate().unwrap()).unwrap().is_accepted());
    }

    #[test]
    fn line_is_too_short() {
        let f = fixtures::line_e();
        let r = conclude(&f.tas, &f.path, &ConcludeLimits::default()).unwrap();
        assert_eq!(r.outcome, Outcome::Inconclusive { reason: InconclusiveReason::TooShort });
        assert_eq!(r.stages.len(), 3);
    }

    #[test]
    fn line_with_a_diet_check_pumps() {
        let f = fixtures::line_e();
        let limits = ConcludeLimits { diet: Some(DietConfig { half_width: 2, half_height: 1 }), ..Default::default() };
        let r = conclude(&f.tas, &f.path, &limits).unwrap();
        assert!(matches!(r.outcome, Outcome::Pumpable { .. }));
    }

    #[test]
    fn fork_is_fragile_through_the_fallback() {
        let f = fixtures::fork();
        let r = conclude(&f.tas, &f.path, &ConcludeLimits::default()).unwrap();
        assert!(matches!(r.outcome, Outcome::Fragile { .. }), "{:?}", r.outcome);
        assert!(r.stages.iter().any(|s| matches!(s, Stage::Fallback { found: true })));
    }

    #[test]
    fn zero_budget_stops_immediately() {
        let f = fixtures::col_n_tall(12);
        let limits = ConcludeLimits { budget_ms: Some(0), ..Default::default() };
        let r = conclude(&f.tas, &f.path, &limits).unwrap();
        assert_eq!(r.outcome, Outcome::Inconclusive { reason: InconclusiveReason::Budget });
    }
}
