use std::io::Write as _;

use chaincoord::blocked::{solve_blocked_centralized, solve_blocked_decentralized};
use chaincoord::centralized::solve_q_given_n;
use chaincoord::decentralized::manufacturer_profit;
use chaincoord::oracle::{simulate_contract, simulate_cycle};
use chaincoord::sweep::{linspace, sweep_theta, write_csv};
use chaincoord::{benchmark_problems, load_config, solve_all, Error, ModelParams, ParamField, SolverSettings};

fn settings() -> SolverSettings {
    SolverSettings::default()
}

/// Retailer profit rate built directly from cycle revenue, order cost and
/// holding cost over the closed-form cycle length.
fn retailer_rate_from_cycle(params: &ModelParams, p: f64, q: f64) -> f64 {
    let d0 = params.alpha - params.beta * p + params.lambda_csa * params.theta * p;
    let b = params.b;
    let k = params.k;
    let cycle = (1.0 - k.powf(1.0 - b)) * q.powf(1.0 - b) / ((1.0 - b) * d0);
    let area = (1.0 - k.powf(2.0 - b)) * q.powf(2.0 - b) / ((2.0 - b) * d0);
    ((p - params.v) * (1.0 - k) * q - params.order_cost - params.h_r * area) / cycle
}

#[test]
fn problem2_retailer_optimum_beats_dense_grid() {
    let params = benchmark_problems()[1];
    let sol = solve_all(&params, &settings()).unwrap().decentralized;
    let ceiling = params.price_ceiling();
    let (mut best, mut best_p, mut best_q) = (f64::NEG_INFINITY, 0.0, 0.0);
    let n = 2000;
    for i in 1..n {
        let p = params.v + (ceiling - params.v) * i as f64 / n as f64;
        for j in 1..=n {
            let q = 3000.0 * j as f64 / n as f64;
            let v = retailer_rate_from_cycle(&params, p, q);
            if v > best {
                (best, best_p, best_q) = (v, p, q);
            }
        }
    }
    assert!(
        best <= sol.profit_retailer * (1.0 + 1e-12),
        "grid {best} vs solver {}",
        sol.profit_retailer
    );
    assert!((best - sol.profit_retailer).abs() / sol.profit_retailer < 1e-4);

    // Polish along each axis from the grid winner.
    let golden = |f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64| {
        let r = (5f64.sqrt() - 1.0) / 2.0;
        while hi - lo > 1e-9 * hi {
            let (a, b) = (hi - r * (hi - lo), lo + r * (hi - lo));
            if f(a) < f(b) {
                lo = a;
            } else {
                hi = b;
            }
        }
        0.5 * (lo + hi)
    };
    let (mut p, mut q) = (best_p, best_q);
    for _ in 0..50 {
        q = golden(&|x| retailer_rate_from_cycle(&params, p, x), 0.5 * q, 1.5 * q);
        p = golden(&|x| retailer_rate_from_cycle(&params, x, q), params.v, ceiling);
    }
    assert!((q - sol.q_star).abs() / sol.q_star < 1e-5, "{q} vs {}", sol.q_star);
    assert!((p - sol.p_star).abs() / sol.p_star < 1e-6, "{p} vs {}", sol.p_star);
}

#[test]
fn closed_form_retailer_rate_matches_cycle_construction() {
    for params in benchmark_problems() {
        let sol = solve_all(&params, &settings()).unwrap().decentralized;
        let direct = retailer_rate_from_cycle(&params, sol.p_star, sol.q_star);
        assert!((direct - sol.profit_retailer).abs() / sol.profit_retailer < 1e-10);
    }
}

#[test]
fn shipment_counts_are_enumeration_argmax() {
    for params in benchmark_problems() {
        let s = solve_all(&params, &settings()).unwrap();
        let d = &s.decentralized;
        let chosen = manufacturer_profit(&params, d.p_star, d.q_star, d.n_star).unwrap();
        for n in 1..=30 {
            assert!(manufacturer_profit(&params, d.p_star, d.q_star, n).unwrap() <= chosen);
        }
        let c = &s.centralized;
        for n in 1..=30 {
            if let Ok((_, _, profit)) = solve_q_given_n(&params, n, &settings()) {
                assert!(profit <= c.profit_chain_c * (1.0 + 1e-12), "n = {n}");
            }
        }
    }
}

#[test]
fn zero_donation_reduces_to_blocked_model() {
    let params = benchmark_problems()[0];
    let main = solve_all(&params.with_theta(0.0), &settings()).unwrap();
    let d = solve_blocked_decentralized(&params, &settings()).unwrap();
    let c = solve_blocked_centralized(&params, &settings()).unwrap();
    assert_eq!(main.decentralized, d);
    assert_eq!(main.centralized, c);
}

#[test]
fn oracle_agrees_with_closed_forms_everywhere() {
    for params in benchmark_problems() {
        let s = solve_all(&params, &settings()).unwrap();
        let (d, c, o) = (&s.decentralized, &s.centralized, &s.coordinated);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-3 * b.abs();
        let sim = simulate_cycle(&params, d.p_star, d.q_star, d.n_star, &settings()).unwrap();
        assert!(close(sim.retailer_rate, d.profit_retailer));
        assert!(close(sim.manufacturer_rate, d.profit_manufacturer));
        let sim = simulate_cycle(&params, c.p_dstar, c.q_dstar, c.n_dstar, &settings()).unwrap();
        assert!(close(sim.chain_rate, c.profit_chain_c));
        let sim = simulate_contract(&params, c, o.mu_bargain, &settings()).unwrap();
        assert!(close(sim.retailer_rate, o.profit_retailer_co));
        assert!(close(sim.manufacturer_rate, o.profit_manufacturer_co));
    }
}

#[test]
fn coordinated_members_gain_on_every_problem() {
    for params in benchmark_problems() {
        let s = solve_all(&params, &settings()).unwrap();
        let o = &s.coordinated;
        assert!(o.mu_lower <= o.mu_bargain && o.mu_bargain <= o.mu_upper);
        assert!(o.profit_retailer_co >= s.decentralized.profit_retailer);
        assert!(o.profit_manufacturer_co >= s.decentralized.profit_manufacturer);
        assert!(o.savings_chain > 0.0);
    }
}

fn write_temp(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn config_loading_accepts_tables_and_rejects_bad_files() {
    let problem3 = r#"{"alpha":1600,"beta":14,"lambda":16,"b":0.2,"theta":0.2,"k":0.5,"R":2100,
        "v":70,"m":30,"A_r":300,"A_m":450,"h_r":15,"h_m":6,"xi":0.6}"#;
    let f = write_temp(problem3);
    let params = load_config(f.path()).unwrap();
    assert_eq!(params.order_cost, 300.0);
    assert_eq!(params.setup_cost, 450.0);
    assert_eq!(params, benchmark_problems()[2]);

    let empty = write_temp("");
    let err = load_config(empty.path()).unwrap_err();
    assert!(matches!(err, Error::Parse { .. }), "{err}");
    assert!(err.is_input_error());

    let bad = write_temp(&problem3.replace("\"b\":0.2", "\"b\":1.0"));
    match load_config(bad.path()).unwrap_err() {
        Error::Invalid(report) => assert!(report.violations.iter().any(|v| v.field == "b")),
        other => panic!("unexpected {other}"),
    }

    let unknown = write_temp(&problem3.replace("\"xi\"", "\"zeta\""));
    assert!(load_config(unknown.path()).is_err());
    assert!(load_config("/nonexistent/problem.json").unwrap_err().is_input_error());
}

#[test]
fn theta_sweep_has_expected_shapes() {
    let params = benchmark_problems()[0];
    let grid = linspace(0.0, 0.5, 11).unwrap();
    let rows = sweep_theta(&params, &grid, &settings()).unwrap();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.error.is_none()));

    let dec_q: Vec<f64> = rows.iter().map(|r| r.decentralized.as_ref().unwrap().q_star).collect();
    let cen_q: Vec<f64> = rows.iter().map(|r| r.centralized.as_ref().unwrap().q_dstar).collect();
    assert!(dec_q.windows(2).all(|w| w[1] > w[0]));
    assert!(cen_q.windows(2).all(|w| w[1] > w[0]));
    // The centralized order starts above the decentralized one and is overtaken once.
    let signs: Vec<bool> = dec_q.iter().zip(&cen_q).map(|(d, c)| c > d).collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    assert!(signs[0]);
    assert_eq!(changes, 1);

    let mut csv = Vec::new();
    write_csv(&rows, ParamField::Theta, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text.lines().next().unwrap().starts_with("theta,"));
}
