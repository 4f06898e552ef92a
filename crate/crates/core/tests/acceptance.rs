//! Acceptance criteria, one test each. Every test writes a single
//! `criterion N: PASS|FAIL ...` line straight to stdout so the verdicts show
//! up even when the harness captures output.

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vnsim::domain::{MeasurementMode, NetworkKind, PerNetwork, ScenarioConfig, StrategyKind, StrategyParams};
use vnsim::engine::{equilibrium_experiment, predict_equilibrium_shift, run_scenario, CycleRecord};
use vnsim::evaluation::{net_eva, normalize, NetEvaluation};
use vnsim::netmodel::Perf;
use vnsim::presets::default_profiles;
use vnsim::report::{summarize, write_csv_to, RunSummary};
use vnsim::strategy::{decide_game, p_degraded, p_overload, p_return, update_counter, TerminalView, Trigger};

const SEEDS: u64 = 100;

fn verdict(n: u32, passed: bool, detail: impl std::fmt::Display) {
    let line = format!("criterion {n}: {} {detail}\n", if passed { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(passed, "criterion {n} failed: {detail}");
}

fn scenario(name: &str) -> ScenarioConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"));
    ScenarioConfig::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

/// Runs a scenario and checks conservation on every cycle.
fn run(cfg: &ScenarioConfig) -> Vec<CycleRecord> {
    let records = run_scenario(cfg).unwrap();
    for r in &records {
        assert_eq!(
            r.counts.dsrc + r.counts.lte + r.counts.wifi,
            cfg.total_terminals,
            "conservation broken at cycle {} (seed {})",
            r.cycle,
            cfg.seed
        );
    }
    records
}

fn summary(cfg: &ScenarioConfig, records: &[CycleRecord]) -> RunSummary {
    summarize(records, cfg.convergence.threshold, cfg.convergence.window as usize).unwrap()
}

fn step_direct(kind: StrategyKind, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        strategy_kind: kind,
        measurement_mode: MeasurementMode::Direct,
        seed,
        ..scenario("table2_step")
    }
}

// ---- criterion 1 -----------------------------------------------------------

type Q = Ratio<i128>;

fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

fn to_f64(r: Q) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn close(a: f64, b: Q) -> bool {
    (a - to_f64(b)).abs() <= 1e-12
}

#[test]
fn criterion_1_formula_oracles() {
    let mut cases = 0;
    let mut bad = Vec::new();
    let rhos = [q(0, 1), q(1, 4), q(1, 2), q(3, 4), q(9, 10), q(1, 1)];

    for n_exp in [1u32, 5, 10, 30] {
        for x in n_exp + 1..n_exp + 7 {
            for &rho in &rhos {
                let want = rho * q(i128::from(x - n_exp + 1), i128::from(x + 1));
                cases += 1;
                if !close(p_overload(x, n_exp, to_f64(rho)), want) {
                    bad.push(format!("p_overload({x},{n_exp},{rho})"));
                }
            }
        }
    }

    for c in 0u32..12 {
        for x in [0u32, 1, 3, 7, 30] {
            for sigma in [q(0, 1), q(1, 4), q(1, 2), q(1, 1)] {
                let raw = sigma * q(i128::from(c), 1) / q(i128::from(x.max(1)), 1);
                let want = raw.min(q(1, 1));
                cases += 1;
                if !close(p_degraded(c, x, to_f64(sigma)), want) {
                    bad.push(format!("p_degraded({c},{x},{sigma})"));
                }
            }
        }
    }

    for n_exp in [10u32, 30] {
        for x in (0u32..=40).step_by(5) {
            for x_prime in [0u32, 4, 20] {
                for &rho in &rhos[1..4] {
                    let raw = rho * q(i128::from(n_exp) - i128::from(x), i128::from(x_prime) + 1);
                    let want = raw.max(q(0, 1)).min(rho);
                    cases += 1;
                    if !close(p_return(x, x_prime, n_exp, to_f64(rho)), want) {
                        bad.push(format!("p_return({x},{x_prime},{n_exp},{rho})"));
                    }
                }
            }
        }
    }

    // Metrics in thousandths, thresholds and weights as small fractions.
    let params_q = [
        (q(1, 10), q(1, 20), q(1, 10), q(7, 10), q(2, 10), q(1, 10)),
        (q(1, 5), q(1, 10), q(1, 20), q(1, 2), q(1, 4), q(1, 4)),
        (q(3, 100), q(1, 100), q(2, 100), q(1, 3), q(1, 3), q(1, 3)),
    ];
    for (fd, fp, fj, wd, wp, wj) in params_q {
        let params = StrategyParams {
            f_delay_ref: to_f64(fd),
            f_plr_ref: to_f64(fp),
            f_jit_ref: to_f64(fj),
            w_delay: to_f64(wd),
            w_plr: to_f64(wp),
            w_jit: to_f64(wj),
            ..StrategyParams::default()
        };
        for d in [0i128, 5, 40, 100, 250] {
            for p in [0i128, 10, 50, 300] {
                for j in [0i128, 2, 100, 180] {
                    let (dq, pq, jq) = (q(d, 1000), q(p, 1000), q(j, 1000));
                    let perf = Perf {
                        delay: to_f64(dq),
                        plr: to_f64(pq),
                        jitter: to_f64(jq),
                    };
                    let u = normalize(&perf, &params);
                    let (ud, up, uj) = ((fd - dq) / fd, (fp - pq) / fp, (fj - jq) / fj);
                    let score = wd * ud + wp * up + wj * uj;
                    cases += 4;
                    if !(close(u.delay, ud) && close(u.plr, up) && close(u.jitter, uj) && close(net_eva(&u, &params), score)) {
                        bad.push(format!("normalize/net_eva({d},{p},{j})"));
                    }
                }
            }
        }
    }

    for c in 0u32..64 {
        cases += 2;
        if update_counter(c, false) != c + 1 || update_counter(c, true) != c / 2 {
            bad.push(format!("update_counter({c})"));
        }
    }

    verdict(1, cases >= 100 && bad.is_empty(), format!("{cases} cases, {} mismatches {:?}", bad.len(), bad.iter().take(5).collect::<Vec<_>>()));
}

// ---- criterion 2 -----------------------------------------------------------

#[test]
fn criterion_2_step_response_convergence() {
    let n_exp = f64::from(scenario("table2_step").strategy.n_exp);
    let mut fast = 0;
    let mut near = 0;
    for seed in 0..SEEDS {
        let cfg = step_direct(StrategyKind::Game, seed);
        let s = summary(&cfg, &run(&cfg));
        if s.converged_at_cycle.is_some_and(|c| c <= 15) {
            fast += 1;
            if (s.mean_counts_post.dsrc - n_exp).abs() <= 3.0 {
                near += 1;
            }
        }
    }
    let passed = fast * 10 >= SEEDS * 9 && near == fast;
    verdict(2, passed, format!("{fast}/{SEEDS} converged within 15 cycles, {near} of those settled within n_exp±3"));
}

// ---- criterion 3 -----------------------------------------------------------

#[test]
fn criterion_3_baseline_pingpong() {
    let mut never = 0;
    let (mut game_rate, mut base_rate) = (0.0, 0.0);
    for seed in 0..SEEDS {
        let cfg = step_direct(StrategyKind::BaselineMcdm, seed);
        let records = run(&cfg);
        let s = summary(&cfg, &records);
        if s.converged_at_cycle.is_none() {
            never += 1;
        }
        base_rate += s.total_handoffs as f64 / s.num_cycles as f64;

        let cfg = step_direct(StrategyKind::Game, seed);
        let s = summary(&cfg, &run(&cfg));
        game_rate += s.total_handoffs as f64 / s.num_cycles as f64;
    }
    let (game_rate, base_rate) = (game_rate / SEEDS as f64, base_rate / SEEDS as f64);
    let passed = never * 100 >= SEEDS * 95 && base_rate >= 10.0 * game_rate;
    verdict(
        3,
        passed,
        format!("baseline never converged in {never}/{SEEDS}; handoffs/cycle baseline {base_rate:.3} vs game {game_rate:.3}"),
    );
}

// ---- criterion 4 -----------------------------------------------------------

#[test]
fn criterion_4_empty_lte() {
    let mut worst: f64 = 0.0;
    for mode in [MeasurementMode::Sampled, MeasurementMode::Direct] {
        for seed in 0..10 {
            let cfg = ScenarioConfig {
                strategy_kind: StrategyKind::BaselineMcdm,
                measurement_mode: mode,
                seed,
                ..scenario("table2_step")
            };
            let records = run(&cfg);
            let mean_lte = records.iter().map(|r| f64::from(r.counts.lte)).sum::<f64>() / records.len() as f64;
            worst = worst.max(mean_lte);
        }
    }
    verdict(4, worst <= 1.0, format!("largest mean LTE attachment {worst:.3} over 20 baseline runs"));
}

// ---- criterion 5 -----------------------------------------------------------

#[test]
fn criterion_5_disturbance_stability() {
    let mut stable = 0;
    let mut unconverged = 0;
    let mut offsets = Vec::new();
    for seed in 0..SEEDS {
        let cfg = ScenarioConfig {
            seed,
            ..scenario("table2_disturbance")
        };
        let records = run(&cfg);
        let Some(c) = summary(&cfg, &records).converged_at_cycle else {
            unconverged += 1;
            continue;
        };
        let settled = i64::from(records[c].counts.dsrc);
        let offset = records[c..]
            .iter()
            .map(|r| (i64::from(r.counts.dsrc) - settled).abs())
            .max()
            .unwrap();
        offsets.push(offset);
        if offset <= 3 {
            stable += 1;
        }
    }
    offsets.sort_unstable();
    let median = offsets.get(offsets.len() / 2).copied().unwrap_or(0);
    verdict(
        5,
        stable * 10 >= SEEDS * 9,
        format!("{stable}/{SEEDS} stayed within ±3 after converging ({unconverged} never converged, median offset {median})"),
    );
}

// ---- criterion 6 -----------------------------------------------------------

#[test]
fn criterion_6_equilibrium_oracle() {
    // closed form on generated linear curves
    let mut exact = 0;
    let mut cases = 0;
    for i in 0..6u32 {
        for s in [0u32, 1, 3, 7] {
            let slope_a = 0.005 + 0.003 * f64::from(i);
            let slope_b = 0.02 - 0.002 * f64::from(i);
            let (g, h) = (12 + i, 5 + 2 * i);
            let delta_e = f64::from(s) * (slope_a + slope_b);
            let predicted = predict_equilibrium_shift(|n| 0.9 - slope_a * f64::from(n), |n| 0.8 - slope_b * f64::from(n), g, h, delta_e);
            cases += 1;
            if predicted == s {
                exact += 1;
            }
        }
    }

    // simulation against the oracle, averaged over seeds
    let seeds = 20;
    let (mut simulated, mut predicted) = (0.0, 0.0);
    for seed in 0..seeds {
        let cfg = ScenarioConfig {
            seed,
            ..scenario("linear_disturbance")
        };
        let outcome = equilibrium_experiment(&cfg).unwrap().expect("scenario has a disturbance");
        simulated += outcome.simulated;
        predicted += f64::from(outcome.predicted);
    }
    let (simulated, predicted) = (simulated / seeds as f64, predicted / seeds as f64);
    let passed = exact == cases && cases >= 20 && (simulated - predicted).abs() <= 2.0;
    verdict(
        6,
        passed,
        format!("closed form {exact}/{cases}; mean simulated shift {simulated:.2} vs predicted {predicted:.2} over {seeds} seeds"),
    );
}

// ---- criterion 7 -----------------------------------------------------------

#[test]
fn criterion_7_expected_switchers() {
    let params = StrategyParams::default();
    let profiles = default_profiles();
    let evals = PerNetwork::from_fn(|k| NetEvaluation::from_perf(k, &profiles[k].perf_at(30), &params, true));
    let m = 30u32;
    let trials = 100_000u32;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut report = Vec::new();
    let mut passed = true;
    for sigma_c in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let c = (sigma_c / params.sigma) as u32;
        // A failing LTE terminal whose counter reaches `c` this cycle, with
        // DSRC also failing so the return branch stays closed.
        let view = TerminalView {
            current: NetworkKind::Lte,
            x_dsrc: 40,
            x_current: m,
            evals,
            dsrc_meets: false,
            current_meets: false,
            counter_c: c - 1,
        };
        let mut total = 0u64;
        for _ in 0..trials {
            for _ in 0..m {
                let d = decide_game(&view, &params, &mut rng);
                assert_eq!(d.new_counter_c, c);
                if d.trigger == Trigger::Degradation {
                    total += 1;
                }
            }
        }
        let mean = total as f64 / f64::from(trials);
        let p = sigma_c / f64::from(m);
        let se = (f64::from(m) * p * (1.0 - p) / f64::from(trials)).sqrt();
        let ok = (mean - sigma_c).abs() <= 3.0 * se;
        passed &= ok;
        report.push(format!("σc={sigma_c}: {mean:.4} (±{:.4})", 3.0 * se));
    }
    verdict(7, passed, report.join(", "));
}

// ---- criterion 8 -----------------------------------------------------------

fn csv_bytes(cfg: &ScenarioConfig) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv_to(&run(cfg), &mut buf).unwrap();
    buf
}

#[test]
fn criterion_8_conservation_and_determinism() {
    let mut configs = Vec::new();
    for name in ["table2_step", "table2_disturbance", "linear_disturbance"] {
        for kind in [StrategyKind::Game, StrategyKind::BaselineMcdm] {
            for seed in [0, 42] {
                configs.push(ScenarioConfig {
                    strategy_kind: kind,
                    seed,
                    ..scenario(name)
                });
            }
        }
    }
    let identical = configs.iter().filter(|cfg| csv_bytes(cfg) == csv_bytes(cfg)).count();
    verdict(
        8,
        identical == configs.len(),
        format!("{identical}/{} reruns byte-identical; conservation held on every cycle of every run", configs.len()),
    );
}

// ---- criterion 9 -----------------------------------------------------------

fn total_handoffs(path: &std::path::Path) -> u64 {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let col = reader.headers().unwrap().iter().position(|h| h == "handoffs").unwrap();
    reader.records().map(|r| r.unwrap()[col].parse::<u64>().unwrap()).sum()
}

#[test]
fn criterion_9_handoff_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let step = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/table2_step.json");
    let status = Command::new(env!("CARGO_BIN_EXE_vnsim"))
        .arg("compare")
        .arg(&step)
        .arg("-o")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let game = total_handoffs(&dir.path().join("game.csv"));
    let baseline = total_handoffs(&dir.path().join("baseline.csv"));
    verdict(
        9,
        game * 2 <= baseline,
        format!("game {game} vs baseline {baseline} total handoffs"),
    );
}
