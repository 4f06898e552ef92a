//! Value types shared by every stage of the simulator, plus the scenario
//! schema and its validation.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::netmodel::NetworkProfile;

/// One of the three access technologies available to every terminal.
///
/// The derived ordering (`Dsrc < Lte < WiFi`) is the deterministic tie-break
/// order used wherever two networks score equally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    Dsrc,
    Lte,
    #[serde(rename = "wifi")]
    WiFi,
}

impl NetworkKind {
    pub const ALL: [NetworkKind; 3] = [NetworkKind::Dsrc, NetworkKind::Lte, NetworkKind::WiFi];

    /// The network every terminal treats as home.
    pub const DEFAULT: NetworkKind = NetworkKind::Dsrc;

    pub fn index(self) -> usize {
        match self {
            NetworkKind::Dsrc => 0,
            NetworkKind::Lte => 1,
            NetworkKind::WiFi => 2,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            NetworkKind::Dsrc => "dsrc",
            NetworkKind::Lte => "lte",
            NetworkKind::WiFi => "wifi",
        }
    }
}

impl Default for NetworkKind {
    fn default() -> Self {
        NetworkKind::DEFAULT
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetworkKind::Dsrc => "DSRC",
            NetworkKind::Lte => "LTE",
            NetworkKind::WiFi => "Wi-Fi",
        })
    }
}

/// A value for each of the three networks, serialized as
/// `{"dsrc": .., "lte": .., "wifi": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerNetwork<T> {
    pub dsrc: T,
    pub lte: T,
    pub wifi: T,
}

impl<T> PerNetwork<T> {
    pub fn from_fn(mut f: impl FnMut(NetworkKind) -> T) -> Self {
        PerNetwork {
            dsrc: f(NetworkKind::Dsrc),
            lte: f(NetworkKind::Lte),
            wifi: f(NetworkKind::WiFi),
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(NetworkKind, &T) -> U) -> PerNetwork<U> {
        PerNetwork::from_fn(|k| f(k, &self[k]))
    }

    /// Iterates in the fixed network order.
    pub fn iter(&self) -> impl Iterator<Item = (NetworkKind, &T)> {
        NetworkKind::ALL.into_iter().map(move |k| (k, &self[k]))
    }
}

impl<T> Index<NetworkKind> for PerNetwork<T> {
    type Output = T;

    fn index(&self, kind: NetworkKind) -> &T {
        match kind {
            NetworkKind::Dsrc => &self.dsrc,
            NetworkKind::Lte => &self.lte,
            NetworkKind::WiFi => &self.wifi,
        }
    }
}

impl<T> IndexMut<NetworkKind> for PerNetwork<T> {
    fn index_mut(&mut self, kind: NetworkKind) -> &mut T {
        match kind {
            NetworkKind::Dsrc => &mut self.dsrc,
            NetworkKind::Lte => &mut self.lte,
            NetworkKind::WiFi => &mut self.wifi,
        }
    }
}

/// Identifier of an on-board unit. Ids are dense, `0..total_terminals`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TerminalId(pub u32);

impl fmt::Display for TerminalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "obu-{}", self.0)
    }
}

/// Parameters of the handoff strategy and of the network evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyParams {
    /// Expected maximum number of terminals broadcasting on DSRC.
    pub n_exp: u32,
    pub rho: f64,
    pub sigma: f64,
    /// Maximum acceptable propagation delay, seconds.
    pub f_delay_ref: f64,
    /// Maximum acceptable packet loss ratio.
    pub f_plr_ref: f64,
    /// Maximum acceptable jitter, seconds.
    pub f_jit_ref: f64,
    pub w_delay: f64,
    pub w_plr: f64,
    pub w_jit: f64,
}

impl Default for StrategyParams {
    fn default() -> Self {
        StrategyParams {
            n_exp: 30,
            rho: 0.5,
            sigma: 0.5,
            f_delay_ref: 0.1,
            f_plr_ref: 0.05,
            f_jit_ref: 0.1,
            w_delay: 0.7,
            w_plr: 0.2,
            w_jit: 0.1,
        }
    }
}

/// Basic Safety Message, broadcast once per cycle by every terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct Bsm {
    pub sender_id: TerminalId,
    /// Generation time in seconds since scenario start.
    pub gen_time: f64,
    pub cycle_seq: u64,
    pub network: NetworkKind,
    /// Kinematics; never inspected by the selection logic.
    pub payload: Vec<u8>,
}

impl Bsm {
    /// Builds the message a terminal emits in `cycle_seq`. Clocks are
    /// perfectly synchronized, so the timestamp is an exact cycle multiple.
    pub fn new(sender_id: TerminalId, cycle_seq: u64, cycle_length: f64, network: NetworkKind) -> Self {
        Bsm {
            sender_id,
            gen_time: cycle_seq as f64 * cycle_length,
            cycle_seq,
            network,
            payload: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Game,
    BaselineMcdm,
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Game => "game",
            StrategyKind::BaselineMcdm => "baseline_mcdm",
        })
    }
}

/// How per-network metrics reach a terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementMode {
    /// Every link is sampled (loss and delay perturbation) and the metrics
    /// are estimated from the received messages.
    #[default]
    Sampled,
    /// Links are lossless and the metrics equal the performance curves at the
    /// true attachment counts.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseTarget {
    /// Each terminal's own perception of how many terminals broadcast on DSRC.
    #[default]
    PerceivedDsrcSenders,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    /// Half-width, in terminals, of the integer offset added to the perceived count.
    pub amplitude: u32,
    pub frequency_hz: f64,
    #[serde(default)]
    pub target: NoiseTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceSpec {
    pub network: NetworkKind,
    /// Additive penalty subtracted from the network's evaluation.
    pub delta_e: f64,
    pub start_cycle: u64,
    /// `None` keeps the disturbance active until the end of the run.
    #[serde(default)]
    pub duration_cycles: Option<u64>,
}

impl DisturbanceSpec {
    pub fn is_active(&self, cycle: u64) -> bool {
        cycle >= self.start_cycle
            && self
                .duration_cycles
                .is_none_or(|d| cycle - self.start_cycle < d)
    }
}

/// Parameters of the quiet-window convergence detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    /// Largest handoff count per cycle still considered quiet.
    pub threshold: u32,
    /// Number of consecutive quiet cycles required.
    pub window: u32,
}

impl Default for ConvergenceSpec {
    fn default() -> Self {
        ConvergenceSpec { threshold: 1, window: 20 }
    }
}

fn default_cycle_length() -> f64 {
    0.1
}

/// A complete, self-contained description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub total_terminals: u32,
    pub initial_assignment: PerNetwork<u32>,
    #[serde(default = "default_cycle_length")]
    pub cycle_length: f64,
    pub num_cycles: u64,
    pub strategy: StrategyParams,
    pub strategy_kind: StrategyKind,
    #[serde(default)]
    pub measurement_mode: MeasurementMode,
    pub profiles: PerNetwork<NetworkProfile>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub disturbance: Option<DisturbanceSpec>,
    #[serde(default)]
    pub convergence: ConvergenceSpec,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario config always serializes")
    }

    /// Number of cycles covered by the one-second trailing record.
    pub fn trailing_cycles(&self) -> usize {
        trailing_cycles(self.cycle_length)
    }
}

pub(crate) fn trailing_cycles(cycle_length: f64) -> usize {
    // Guard against 1.0 / 0.1 = 10.000000000000002.
    let raw = 1.0 / cycle_length;
    let rounded = raw.round();
    if (raw - rounded).abs() < 1e-9 {
        rounded.max(1.0) as usize
    } else {
        raw.ceil().max(1.0) as usize
    }
}

/// One broken invariant of a [`ScenarioConfig`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Returns every invariant violation in `cfg`; an empty list means the
/// configuration can be run.
pub fn validate_config(cfg: &ScenarioConfig) -> Vec<Violation> {
    let mut out = Vec::new();

    if cfg.total_terminals == 0 {
        out.push(Violation::new("total_terminals", "must be at least 1"));
    }
    let assigned: u64 = NetworkKind::ALL
        .iter()
        .map(|&k| u64::from(cfg.initial_assignment[k]))
        .sum();
    if assigned != u64::from(cfg.total_terminals) {
        out.push(Violation::new(
            "initial_assignment",
            format!("assignment sum {assigned} ≠ {}", cfg.total_terminals),
        ));
    }
    if !(cfg.cycle_length.is_finite() && cfg.cycle_length > 0.0) {
        out.push(Violation::new("cycle_length", "must be a positive number of seconds"));
    }
    if cfg.num_cycles == 0 {
        out.push(Violation::new("num_cycles", "must be at least 1"));
    }

    validate_strategy(&cfg.strategy, &mut out);
    for (kind, profile) in cfg.profiles.iter() {
        validate_profile(kind, profile, &mut out);
    }

    if let Some(noise) = &cfg.noise {
        if !(noise.frequency_hz.is_finite() && noise.frequency_hz > 0.0) {
            out.push(Violation::new("noise.frequency_hz", "must be > 0"));
        }
    }
    if let Some(d) = &cfg.disturbance {
        if !(d.delta_e.is_finite() && d.delta_e >= 0.0) {
            out.push(Violation::new("disturbance.delta_e", "must be a finite value ≥ 0"));
        }
        if d.start_cycle >= cfg.num_cycles {
            out.push(Violation::new(
                "disturbance.start_cycle",
                format!("start cycle {} is not before num_cycles {}", d.start_cycle, cfg.num_cycles),
            ));
        }
    }
    if cfg.convergence.window == 0 {
        out.push(Violation::new("convergence.window", "must be at least 1"));
    }
    out
}

fn validate_strategy(p: &StrategyParams, out: &mut Vec<Violation>) {
    if p.n_exp == 0 {
        out.push(Violation::new("strategy.n_exp", "must be at least 1"));
    }
    if !(0.0..1.0).contains(&p.rho) {
        out.push(Violation::new("strategy.rho", "rho must be < 1 and ≥ 0"));
    }
    if !(0.0..=1.0).contains(&p.sigma) {
        out.push(Violation::new("strategy.sigma", "sigma must lie in [0, 1]"));
    }
    for (name, v) in [
        ("strategy.f_delay_ref", p.f_delay_ref),
        ("strategy.f_plr_ref", p.f_plr_ref),
        ("strategy.f_jit_ref", p.f_jit_ref),
    ] {
        if !(v.is_finite() && v > 0.0) {
            out.push(Violation::new(name, "reference threshold must be > 0"));
        }
    }
    let weights = [("strategy.w_delay", p.w_delay), ("strategy.w_plr", p.w_plr), ("strategy.w_jit", p.w_jit)];
    for (name, w) in weights {
        if !(w.is_finite() && w >= 0.0) {
            out.push(Violation::new(name, "weight must be ≥ 0"));
        }
    }
    let sum = p.w_delay + p.w_plr + p.w_jit;
    if (sum - 1.0).abs() > 1e-9 {
        out.push(Violation::new("strategy", format!("weights sum to {sum}, expected 1")));
    }
}

fn validate_profile(key: NetworkKind, p: &NetworkProfile, out: &mut Vec<Violation>) {
    let field = |name: &str| format!("profiles.{}.{name}", key.key());
    if p.kind != key {
        out.push(Violation::new(
            field("kind"),
            format!("profile kind {} stored under key \"{}\"", p.kind.key(), key.key()),
        ));
    }
    if !(p.d0.is_finite() && p.d0 > 0.0) {
        out.push(Violation::new(field("d0"), "must be > 0"));
    }
    if !(p.g0.is_finite() && p.g0 > 0.0) {
        out.push(Violation::new(field("g0"), "must be > 0"));
    }
    if !(0.0..1.0).contains(&p.p0) {
        out.push(Violation::new(field("p0"), "must lie in [0, 1)"));
    }
    for (name, v) in [("a", p.a), ("b", p.b), ("h", p.h)] {
        if !(v.is_finite() && v >= 0.0) {
            out.push(Violation::new(field(name), "must be ≥ 0"));
        }
    }
    if !(p.cap.is_finite() && p.cap >= 1.0) {
        out.push(Violation::new(field("cap"), "must be ≥ 1"));
    }
    if !(p.exponent.is_finite() && p.exponent >= 1.0) {
        out.push(Violation::new(field("exponent"), "must be ≥ 1"));
    }
}
