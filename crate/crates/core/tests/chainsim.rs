use lossguard::analytics::{
    improved_storage_time, p_f, p_t_full, survival_prob, TransponderParams,
};
use lossguard::chainsim::{compare_modes, predict, run_chain, run_loop, ChainConfig, SimMode};

fn params(alpha: f64, d: f64, n: u32, eta: f64) -> TransponderParams<f64> {
    TransponderParams {
        alpha,
        d,
        n,
        eta,
        ..TransponderParams::default()
    }
}

fn within_sigmas(value: f64, expected: f64, std_err: f64, k: f64) -> bool {
    (value - expected).abs() <= k * std_err.max(1e-300) || value == expected
}

#[test]
fn lossless_perfect_chain_always_succeeds() {
    let mut c = ChainConfig::new(params(0.0, 10.0, 56, 1.0), 5, 2_000, 3);
    c.p_t = Some(1.0);
    let s = run_chain(&c).unwrap();
    assert_eq!(s.end_to_end_success.value, 1.0);
    assert!((s.mean_fidelity_given_success.unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(s.status_counts.intact, 10_000);
}

#[test]
fn single_stage_success_matches_product() {
    let c = ChainConfig::new(params(1.0 / 30.0, 10.0, 200, 1.0), 1, 100_000, 17);
    let s = run_chain(&c).unwrap();
    let expected =
        p_f(survival_prob(1.0 / 30.0, 10.0).unwrap()).unwrap() * p_t_full(&c.params).unwrap();
    let est = s.per_stage_success_rate;
    assert!(
        within_sigmas(est.value, expected, est.std_err, 3.0),
        "{est:?} vs {expected}"
    );
    assert!((s.mean_fidelity_given_success.unwrap() - 1.0).abs() < 1e-10);
    assert!(s.min_fidelity_given_success.unwrap() > 1.0 - 1e-10);
}

#[test]
fn multi_stage_success_and_effective_attenuation() {
    let mut c = ChainConfig::new(params(1.0 / 30.0, 6.0, 100, 1.0), 5, 100_000, 99);
    c.p_t = Some(0.97);
    let s = run_chain(&c).unwrap();
    let pred = predict(&c).unwrap();
    let e = s.end_to_end_success;
    assert!(within_sigmas(
        e.value,
        pred.end_to_end_success,
        e.std_err,
        3.0
    ));
    // Delta method: se(-ln p̂ / L) = se(p̂) / (p̂ L).
    let length = 5.0 * 6.0;
    let se_alpha = e.std_err / (e.value * length);
    let emp = s.empirical_alpha_prime.unwrap();
    let want = pred.alpha_prime_with_gates.unwrap();
    assert!(within_sigmas(emp, want, se_alpha, 3.0), "{emp} vs {want}");
}

#[test]
fn identical_seeds_identical_stats() {
    let c = ChainConfig::new(params(1.0 / 30.0, 12.0, 80, 1.0 - 1e-6), 3, 5_000, 1234);
    let a = run_chain(&c).unwrap();
    let b = run_chain(&c).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let mut other = c.clone();
    other.seed += 1;
    assert_ne!(run_chain(&other).unwrap(), a);
}

#[test]
fn loop_with_half_success_survives_one_cycle_on_average() {
    let mut c = ChainConfig::new(params(0.0, 5.0, 56, 1.0), 1, 100_000, 8);
    c.p_t = Some(0.5);
    let s = run_loop(&c).unwrap();
    assert!(
        within_sigmas(s.mean_cycles, 1.0, s.mean_cycles_std_err, 3.0),
        "{s:?}"
    );
    assert_eq!(s.expected_cycles, Some(1.0));
    assert_eq!(s.censored_fraction, 0.0);
}

#[test]
fn immortal_loop_is_censored() {
    let mut c = ChainConfig::new(params(0.0, 5.0, 56, 1.0), 1, 4, 8);
    c.p_t = Some(1.0);
    c.max_cycles = 20_000;
    let s = run_loop(&c).unwrap();
    assert_eq!(s.censored_fraction, 1.0);
    assert_eq!(s.mean_cycles, 20_000.0);
    assert!(s.analytic_storage_time.is_none());
}

#[test]
fn loop_storage_time_matches_analytic() {
    // q = p_f·p_t ≈ 0.98: long-lived enough that q/(1-q) and 1/(-ln q)
    // agree to ~1%.
    let mut c = ChainConfig::new(params(1.0 / 30.0, 2.0, 56, 1.0), 1, 100_000, 31);
    c.p_t = Some(0.985);
    let s = run_loop(&c).unwrap();
    let analytic = s.analytic_storage_time.unwrap();
    let rel = (s.implied_storage_time - analytic).abs() / analytic;
    assert!(rel < 0.05, "{} vs {analytic}", s.implied_storage_time);
    let q = s.stage_success;
    let r = -q.ln() / (2.0 * (1.0 / 30.0) * 2.0);
    assert_eq!(
        analytic,
        improved_storage_time(1.0 / 30.0, 2.0e5, r).unwrap()
    );
}

#[test]
fn modes_agree_for_large_n() {
    let c = ChainConfig::new(params(1.0 / 30.0, 8.0, 200, 1.0 - 1e-6), 1, 100_000, 5);
    let cmp = compare_modes(&c).unwrap();
    assert!(cmp.agree, "{cmp:?}");
    assert!(cmp.z_score.abs() <= 3.0, "z = {}", cmp.z_score);
    assert_eq!(cmp.per_gate.mode, SimMode::PerGate);
}

#[test]
fn per_gate_success_reproduces_detector_limited_value() {
    let mut c = ChainConfig::new(params(0.0, 1.0, 16, 1.0 - 1e-5), 1, 100_000, 6);
    c.mode = SimMode::PerGate;
    let s = run_chain(&c).unwrap();
    let est = s.per_stage_success_rate;
    // p_t ≈ 0.14 at n = 16, 1-η = 1e-5.
    assert!(
        within_sigmas(est.value, 0.142_957_495_920_971_9, est.std_err, 3.0),
        "{est:?}"
    );
}

#[test]
fn per_gate_perfect_components_tend_to_one() {
    let mut c = ChainConfig::new(params(0.0, 1.0, 100_000, 1.0), 1, 20_000, 6);
    c.mode = SimMode::PerGate;
    let s = run_chain(&c).unwrap();
    assert!(s.per_stage_success_rate.value > 0.999);
}
