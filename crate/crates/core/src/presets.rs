//! Built-in curves and scenarios. The JSON files under `scenarios/` are
//! serializations of these and are checked against them in tests.

use crate::domain::{
    DisturbanceSpec, MeasurementMode, NetworkKind, NoiseSpec, NoiseTarget, PerNetwork, ScenarioConfig,
    StrategyKind, StrategyParams,
};
use crate::netmodel::NetworkProfile;

/// Calibrated quadratic curves.
///
/// DSRC is the best network when lightly loaded and falls apart as the
/// whole fleet joins it; LTE carries the relay overhead and is the worst
/// choice for a lone terminal; no network meets every threshold with 50
/// terminals on it, while a 30/10/10 split meets all of them.
pub fn default_profiles() -> PerNetwork<NetworkProfile> {
    PerNetwork {
        dsrc: NetworkProfile {
            kind: NetworkKind::Dsrc,
            d0: 0.005,
            a: 0.12,
            p0: 0.005,
            b: 0.06,
            g0: 0.002,
            h: 0.05,
            cap: 50.0,
            exponent: 2.0,
        },
        lte: NetworkProfile {
            kind: NetworkKind::Lte,
            d0: 0.06,
            a: 0.05,
            p0: 0.01,
            b: 0.03,
            g0: 0.02,
            h: 0.05,
            cap: 50.0,
            exponent: 2.0,
        },
        wifi: NetworkProfile {
            kind: NetworkKind::WiFi,
            d0: 0.03,
            a: 0.1,
            p0: 0.005,
            b: 0.05,
            g0: 0.01,
            h: 0.06,
            cap: 50.0,
            exponent: 2.0,
        },
    }
}

/// Step response: 50 terminals starting 10/20/20.
pub fn table2_step() -> ScenarioConfig {
    ScenarioConfig {
        total_terminals: 50,
        initial_assignment: PerNetwork { dsrc: 10, lte: 20, wifi: 20 },
        cycle_length: 0.1,
        num_cycles: 200,
        strategy: StrategyParams::default(),
        strategy_kind: StrategyKind::Game,
        measurement_mode: MeasurementMode::Sampled,
        profiles: default_profiles(),
        noise: None,
        disturbance: None,
        convergence: Default::default(),
        seed: 1,
    }
}

/// Noise on the perceived DSRC count: 50 terminals starting 0/25/25,
/// amplitude 2 at 10 Hz.
pub fn table2_disturbance() -> ScenarioConfig {
    ScenarioConfig {
        initial_assignment: PerNetwork { dsrc: 0, lte: 25, wifi: 25 },
        noise: Some(NoiseSpec {
            amplitude: 2,
            frequency_hz: 10.0,
            target: NoiseTarget::PerceivedDsrcSenders,
        }),
        ..table2_step()
    }
}

/// Curves whose evaluation falls linearly: 0.01 per terminal on LTE and
/// Wi-Fi, shallower on DSRC. Every network meets its thresholds at any load
/// up to 50.
pub fn linear_profiles() -> PerNetwork<NetworkProfile> {
    let relay = |kind| NetworkProfile {
        kind,
        d0: 0.02,
        a: 0.1,
        p0: 0.005,
        b: 0.0,
        g0: 0.01,
        h: 0.0,
        cap: 70.0,
        exponent: 1.0,
    };
    PerNetwork {
        dsrc: NetworkProfile {
            kind: NetworkKind::Dsrc,
            d0: 0.005,
            a: 0.05,
            p0: 0.005,
            b: 0.01,
            g0: 0.002,
            h: 0.01,
            cap: 50.0,
            exponent: 1.0,
        },
        lte: relay(NetworkKind::Lte),
        wifi: relay(NetworkKind::WiFi),
    }
}

/// Everyone starts on DSRC and the surplus spreads over LTE and Wi-Fi while
/// LTE carries an evaluation penalty of 0.08 from the first cycle.
pub fn linear_disturbance() -> ScenarioConfig {
    ScenarioConfig {
        initial_assignment: PerNetwork { dsrc: 50, lte: 0, wifi: 0 },
        measurement_mode: MeasurementMode::Direct,
        profiles: linear_profiles(),
        disturbance: Some(DisturbanceSpec {
            network: NetworkKind::Lte,
            delta_e: 0.08,
            start_cycle: 0,
            duration_cycles: None,
        }),
        seed: 11,
        ..table2_step()
    }
}

/// Looks up a built-in scenario by file stem.
pub fn by_name(name: &str) -> Option<ScenarioConfig> {
    match name {
        "table2_step" => Some(table2_step()),
        "table2_disturbance" => Some(table2_disturbance()),
        "linear_disturbance" => Some(linear_disturbance()),
        _ => None,
    }
}

pub const NAMES: [&str; 3] = ["table2_step", "table2_disturbance", "linear_disturbance"];
