use std::path::PathBuf;

use vnsim::domain::{validate_config, ScenarioConfig};
use vnsim::presets;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn shipped_files_match_presets() {
    for name in presets::NAMES {
        let text = std::fs::read_to_string(dir().join(format!("{name}.json"))).unwrap();
        let cfg = ScenarioConfig::from_json(&text).unwrap();
        assert_eq!(cfg, presets::by_name(name).unwrap(), "{name}");
        assert!(validate_config(&cfg).is_empty(), "{name}");
    }
}

#[test]
fn step_scenario_transcribes_table() {
    let cfg = presets::table2_step();
    assert_eq!(cfg.total_terminals, 50);
    assert_eq!((cfg.initial_assignment.dsrc, cfg.initial_assignment.lte, cfg.initial_assignment.wifi), (10, 20, 20));
    assert_eq!(cfg.strategy.n_exp, 30);
    assert_eq!((cfg.strategy.rho, cfg.strategy.sigma), (0.5, 0.5));
    assert_eq!((cfg.strategy.f_delay_ref, cfg.strategy.f_plr_ref, cfg.strategy.f_jit_ref), (0.1, 0.05, 0.1));
    assert_eq!((cfg.strategy.w_delay, cfg.strategy.w_plr, cfg.strategy.w_jit), (0.7, 0.2, 0.1));

    let noisy = presets::table2_disturbance();
    assert_eq!((noisy.initial_assignment.dsrc, noisy.initial_assignment.lte, noisy.initial_assignment.wifi), (0, 25, 25));
    let noise = noisy.noise.unwrap();
    assert_eq!((noise.amplitude, noise.frequency_hz), (2, 10.0));
}
