//! The closed loop, one BSM cycle at a time.
//!
//! Each cycle every terminal broadcasts on its network, every other terminal
//! receives (or loses) the message, updates its ledger and evaluates the
//! three networks. All decisions are then taken against that common snapshot
//! and applied together, so no terminal sees another's same-cycle move.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::domain::{
    validate_config, Bsm, DisturbanceSpec, MeasurementMode, NetworkKind, PerNetwork, ScenarioConfig, StrategyKind,
    TerminalId, Violation,
};
use crate::evaluation::NetEvaluation;
use crate::netmodel::{ground_truth_eval, sample_link, LinkSample, Perf};
use crate::report::steady_state_counts;
use crate::sensing::ReceptionLedger;
use crate::strategy::{decide_baseline, decide_game, Action, Decision, TerminalView};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid scenario: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidConfig(Vec<Violation>),
}

/// Per-terminal random stream: the master seed selects the key, the terminal
/// id selects the stream.
pub fn terminal_rng(seed: u64, id: TerminalId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(id.0));
    rng
}

#[derive(Debug, Clone)]
pub struct TerminalState {
    pub id: TerminalId,
    pub attached: NetworkKind,
    pub counter_c: u32,
    pub ledger: ReceptionLedger,
    noise_offset: i64,
    rng: ChaCha8Rng,
}

#[derive(Debug, Clone)]
pub struct WorldState {
    /// Index of the next cycle to run.
    pub cycle: u64,
    pub terminals: Vec<TerminalState>,
    pub counts: PerNetwork<u32>,
    /// Active evaluation penalty per network.
    pub offsets: PerNetwork<f64>,
}

impl WorldState {
    /// Terminals get ids in network order: the first `initial_assignment.dsrc`
    /// start on DSRC, then LTE, then Wi-Fi.
    pub fn new(cfg: &ScenarioConfig) -> Self {
        let mut terminals = Vec::with_capacity(cfg.total_terminals as usize);
        for kind in NetworkKind::ALL {
            for _ in 0..cfg.initial_assignment[kind] {
                let id = TerminalId(terminals.len() as u32);
                terminals.push(TerminalState {
                    id,
                    attached: kind,
                    counter_c: 0,
                    ledger: ReceptionLedger::new(cfg.cycle_length),
                    noise_offset: 0,
                    rng: terminal_rng(cfg.seed, id),
                });
            }
        }
        let mut state = WorldState {
            cycle: 0,
            terminals,
            counts: PerNetwork::default(),
            offsets: PerNetwork::default(),
        };
        state.recount();
        state
    }

    fn recount(&mut self) {
        self.counts = PerNetwork::default();
        for t in &self.terminals {
            self.counts[t.attached] += 1;
        }
    }

    pub fn attachment(&self) -> Vec<NetworkKind> {
        self.terminals.iter().map(|t| t.attached).collect()
    }

    /// Counts match the attachments and sum to the population.
    pub fn is_consistent(&self) -> bool {
        let mut counts = PerNetwork::<u32>::default();
        for t in &self.terminals {
            counts[t.attached] += 1;
        }
        counts == self.counts && counts.dsrc + counts.lte + counts.wifi == self.terminals.len() as u32
    }
}

/// Population-level outcome of one cycle, taken after the cycle's handoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub cycle: u64,
    pub time_s: f64,
    pub counts: PerNetwork<u32>,
    pub handoffs: u32,
    /// Mean score of the network each terminal is attached to.
    pub avg_score: f64,
    /// Ground-truth score per network, after any disturbance penalty.
    pub score: PerNetwork<f64>,
    /// Ground-truth metrics per network.
    pub perf: PerNetwork<Perf>,
}

/// Sets the evaluation penalty that `spec` imposes at `cycle`.
pub fn apply_disturbance(state: &mut WorldState, spec: &DisturbanceSpec, cycle: u64) {
    state.offsets = PerNetwork::default();
    if spec.is_active(cycle) {
        state.offsets[spec.network] = spec.delta_e;
    }
}

fn noise_period(cfg: &ScenarioConfig) -> Option<(u64, u32)> {
    let noise = cfg.noise.as_ref()?;
    let period = (1.0 / (noise.frequency_hz * cfg.cycle_length)).round().max(1.0) as u64;
    Some((period, noise.amplitude))
}

/// Receives this cycle's messages into `term`'s ledger and builds its view.
fn observe(term: &mut TerminalState, bsms: &[Bsm], cfg: &ScenarioConfig, counts: &PerNetwork<u32>, offsets: &PerNetwork<f64>, cycle: u64) -> TerminalView {
    term.ledger.advance_to(cycle);
    for bsm in bsms.iter().filter(|b| b.sender_id != term.id) {
        let profile = &cfg.profiles[bsm.network];
        let n = counts[bsm.network];
        let delay = match cfg.measurement_mode {
            MeasurementMode::Direct => Some(profile.perf_at(n).delay),
            MeasurementMode::Sampled => match sample_link(profile, n, &mut term.rng) {
                LinkSample::Delivered { delay } => Some(delay),
                LinkSample::Lost => None,
            },
        };
        if let Some(delay) = delay {
            term.ledger
                .record_reception(bsm, bsm.gen_time + delay)
                .expect("engine only delivers current-cycle messages after generation");
        }
    }

    if let Some((period, amplitude)) = noise_period(cfg) {
        if cycle.is_multiple_of(period) {
            let a = i64::from(amplitude);
            term.noise_offset = term.rng.random_range(-a..=a);
        }
    }

    let params = &cfg.strategy;
    let evals = PerNetwork::from_fn(|kind| {
        let prior = cfg.profiles[kind].perf_at(1);
        let (perf, measured) = match cfg.measurement_mode {
            MeasurementMode::Direct if counts[kind] > 0 => (cfg.profiles[kind].perf_at(counts[kind]), true),
            MeasurementMode::Direct => (prior, false),
            MeasurementMode::Sampled => {
                let m = term.ledger.measure(kind);
                (m.or_prior(&prior), m.is_complete())
            }
        };
        NetEvaluation::from_perf(kind, &perf, params, measured).penalized(offsets[kind])
    });

    let heard_dsrc = term.ledger.distinct_senders(NetworkKind::Dsrc) as i64;
    let x_dsrc = (heard_dsrc + term.noise_offset).max(0) as u32;
    let x_current = if term.attached == NetworkKind::Dsrc {
        x_dsrc
    } else {
        term.ledger.distinct_senders(term.attached) as u32
    };
    TerminalView {
        current: term.attached,
        x_dsrc,
        x_current,
        dsrc_meets: evals.dsrc.meets_requirements,
        current_meets: evals[term.attached].meets_requirements,
        evals,
        counter_c: term.counter_c,
    }
}

/// Advances the world by one cycle and reports the outcome.
pub fn run_cycle(state: &mut WorldState, cfg: &ScenarioConfig) -> CycleRecord {
    let order: Vec<usize> = (0..state.terminals.len()).collect();
    step(state, cfg, &order)
}

/// `decision_order` only fixes the order in which decisions are computed;
/// outcomes do not depend on it.
fn step(state: &mut WorldState, cfg: &ScenarioConfig, decision_order: &[usize]) -> CycleRecord {
    let cycle = state.cycle;
    match &cfg.disturbance {
        Some(spec) => apply_disturbance(state, spec, cycle),
        None => state.offsets = PerNetwork::default(),
    }

    let bsms: Vec<Bsm> = state
        .terminals
        .iter()
        .map(|t| Bsm::new(t.id, cycle, cfg.cycle_length, t.attached))
        .collect();

    let counts = state.counts;
    let offsets = state.offsets;
    let views: Vec<TerminalView> = state
        .terminals
        .iter_mut()
        .map(|t| observe(t, &bsms, cfg, &counts, &offsets, cycle))
        .collect();

    let mut decisions: Vec<Option<Decision>> = vec![None; views.len()];
    for &i in decision_order {
        let term = &mut state.terminals[i];
        decisions[i] = Some(match cfg.strategy_kind {
            StrategyKind::Game => decide_game(&views[i], &cfg.strategy, &mut term.rng),
            StrategyKind::BaselineMcdm => decide_baseline(&views[i]),
        });
    }

    let mut handoffs = 0;
    for (term, decision) in state.terminals.iter_mut().zip(decisions) {
        let decision = decision.expect("decision order covers every terminal");
        term.counter_c = decision.new_counter_c;
        if let Action::SwitchTo(target) = decision.action {
            debug_assert_ne!(target, term.attached);
            term.attached = target;
            handoffs += 1;
        }
    }
    state.recount();
    state.cycle += 1;

    let counts = state.counts;
    let perf = PerNetwork::from_fn(|k| cfg.profiles[k].perf_at(counts[k]));
    let score = PerNetwork::from_fn(|k| ground_truth_eval(&cfg.profiles[k], counts[k], &cfg.strategy) - offsets[k]);
    let total = f64::from(counts.dsrc + counts.lte + counts.wifi).max(1.0);
    let avg_score = NetworkKind::ALL
        .iter()
        .map(|&k| f64::from(counts[k]) * score[k])
        .sum::<f64>()
        / total;

    CycleRecord {
        cycle,
        time_s: cycle as f64 * cfg.cycle_length,
        counts,
        handoffs,
        avg_score,
        score,
        perf,
    }
}

/// Runs a validated scenario to completion.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<CycleRecord>, EngineError> {
    let violations = validate_config(cfg);
    if !violations.is_empty() {
        return Err(EngineError::InvalidConfig(violations));
    }
    let mut state = WorldState::new(cfg);
    Ok((0..cfg.num_cycles).map(|_| run_cycle(&mut state, cfg)).collect())
}

/// Number of terminals `s` in `0..=g` that best balances a penalty of
/// `delta_e` on network A against the load it pushes onto network B:
/// `f_a(g - s) - f_a(g) + f_b(h) - f_b(h + s) = delta_e`. Ties go to the
/// smaller `s`.
pub fn predict_equilibrium_shift(f_a: impl Fn(u32) -> f64, f_b: impl Fn(u32) -> f64, g: u32, h: u32, delta_e: f64) -> u32 {
    let (fa_g, fb_h) = (f_a(g), f_b(h));
    let mut best = (0, f64::INFINITY);
    for s in 0..=g {
        let residual = (f_a(g - s) - fa_g + fb_h - f_b(h + s) - delta_e).abs();
        if residual < best.1 {
            best = (s, residual);
        }
    }
    best.0
}

/// Prediction versus simulation for a scenario with a disturbance.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOutcome {
    pub disturbed: NetworkKind,
    /// Network that gains the most terminals under the disturbance.
    pub receiver: NetworkKind,
    /// Steady-state load of the disturbed network without the disturbance.
    pub g: u32,
    /// Steady-state load of the receiving network without the disturbance.
    pub h: u32,
    pub predicted: u32,
    /// Steady-state loss of terminals on the disturbed network.
    pub simulated: f64,
}

/// Runs `cfg` with and without its disturbance and compares the steady-state
/// shift off the disturbed network with [`predict_equilibrium_shift`].
/// Returns `Ok(None)` if the scenario has no disturbance.
pub fn equilibrium_experiment(cfg: &ScenarioConfig) -> Result<Option<ShiftOutcome>, EngineError> {
    let Some(spec) = cfg.disturbance else {
        return Ok(None);
    };
    let disturbed = steady_state_counts(&run_scenario(cfg)?);
    let calm_cfg = ScenarioConfig {
        disturbance: None,
        ..cfg.clone()
    };
    let calm = steady_state_counts(&run_scenario(&calm_cfg)?);

    let a = spec.network;
    let mut receiver = None;
    for k in NetworkKind::ALL.into_iter().filter(|&k| k != a) {
        let gain = disturbed[k] - calm[k];
        match receiver {
            Some((_, best)) if gain <= best => {}
            _ => receiver = Some((k, gain)),
        }
    }
    let b = receiver.expect("two other networks").0;

    let g = calm[a].round() as u32;
    let h = calm[b].round() as u32;
    let params = cfg.strategy;
    let (pa, pb) = (cfg.profiles[a], cfg.profiles[b]);
    let predicted = predict_equilibrium_shift(
        |n| ground_truth_eval(&pa, n, &params),
        |n| ground_truth_eval(&pb, n, &params),
        g,
        h,
        spec.delta_e,
    );
    Ok(Some(ShiftOutcome {
        disturbed: a,
        receiver: b,
        g,
        h,
        predicted,
        simulated: calm[a] - disturbed[a],
    }))
}
