use hexad_core::simulation::{
    qq_points, run_monte_carlo, simulate_network, Regime, SimulationConfig,
};
use hexad_core::ModelKind;

fn cfg(n: u32, regime: Regime, reps: usize, seed: u64, model: ModelKind) -> SimulationConfig {
    SimulationConfig::new(n, regime, reps, seed, model)
}

#[test]
fn dense_density_near_half() {
    let (net, _) = simulate_network(&cfg(20, Regime::Dense, 1, 7, ModelKind::DyadFe), 0).unwrap();
    let (_, rho) = net.average_degree_and_density();
    assert!((0.45..=0.55).contains(&rho), "rho = {rho}");
}

#[test]
fn logsqrt_density_falls_with_n() {
    for seed in 0..3 {
        let rho = |n| {
            let (net, _) = simulate_network(&cfg(n, Regime::LogSqrt, 1, seed, ModelKind::DyadFe), 0).unwrap();
            net.average_degree_and_density().1
        };
        assert!(rho(50) < rho(20));
    }
}

#[test]
fn density_decreases_across_regimes() {
    let mut last = f64::INFINITY;
    for regime in [Regime::Dense, Regime::LogLog, Regime::LogSqrt, Regime::LogN] {
        let c = cfg(20, regime, 20, 4, ModelKind::DyadFe);
        let rho: f64 = (0..20)
            .map(|rep| simulate_network(&c, rep).unwrap().0.average_degree_and_density().1)
            .sum::<f64>()
            / 20.0;
        assert!(rho < last, "{regime}: {rho} !< {last}");
        last = rho;
    }
}

#[test]
fn summary_json_is_reproducible() {
    let c = cfg(10, Regime::LogLog, 12, 99, ModelKind::DyadFe);
    let a = serde_json::to_string(&run_monte_carlo(&c).unwrap()).unwrap();
    let b = serde_json::to_string(&run_monte_carlo(&c).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn summary_has_table_columns() {
    let run = run_monte_carlo(&cfg(10, Regime::Dense, 12, 5, ModelKind::DyadFe)).unwrap();
    let value = serde_json::to_value(&run.summary).unwrap();
    for key in [
        "mean_beta", "bias", "sd_beta", "mean_se", "rmse", "se_ratio", "c90", "c95", "power", "mean_rho_hat",
        "mean_n_informative", "n_failed",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn node_level_model_centres_on_truth() {
    let run = run_monte_carlo(&cfg(15, Regime::Dense, 200, 21, ModelKind::NodeFe)).unwrap();
    let s = run.summary;
    assert_eq!(s.n_failed, 0);
    assert!((s.mean_beta - 1.0).abs() < 0.05, "mean {}", s.mean_beta);
}

#[test]
fn dyadic_model_centres_on_truth() {
    let run = run_monte_carlo(&cfg(30, Regime::Dense, 200, 22, ModelKind::Dyadic)).unwrap();
    let s = run.summary;
    assert_eq!(s.n_failed, 0);
    assert!((s.mean_beta - 1.0).abs() < 0.05, "mean {}", s.mean_beta);
}

#[test]
fn dense_estimates_look_normal() {
    let run = run_monte_carlo(&cfg(30, Regime::Dense, 200, 42, ModelKind::DyadFe)).unwrap();
    let sd = run.summary.sd_beta.unwrap();
    let mean = run.summary.mean_beta;
    let points = qq_points(&run.betas()).unwrap();
    let worst = points
        .iter()
        .filter(|p| ((p.theoretical - mean) / sd).abs() <= 2.0)
        .map(|p| (p.empirical - p.theoretical).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.15 * sd, "max deviation {worst} vs sd {sd}");
}
