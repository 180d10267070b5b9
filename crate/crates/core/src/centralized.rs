//! Integrated channel: one decision maker sets price, order quantity and
//! shipment count to maximize total chain profit.
//!
//! For a fixed shipment count the best price is an explicit function of `Q`,
//! so the chain profit collapses to a one-dimensional function of `Q` whose
//! stationary point is found by bracketing and bisection. The shipment count
//! is then raised from 1 while the chain profit keeps improving.

use serde::{Deserialize, Serialize};

use crate::decentralized::{assumption_warnings, manufacturer_profit, retailer_profit};
use crate::error::{Error, Result};
use crate::kinetics::positive_demand;
use crate::params::{ModelParams, SolverSettings};
use crate::root::{bisect, golden_max};

/// Shorthand constants of the reduced chain profit for one shipment count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralizedAuxiliaries {
    /// α/(β−λθ) − m/(1−θ).
    pub rho: f64,
    /// A_r + A_m/n.
    pub a_hat: f64,
    /// h_m(2−n)/(2R); negative for `n > 2`.
    pub h_hat: f64,
}

impl CentralizedAuxiliaries {
    pub fn new(params: &ModelParams, n: u32) -> Self {
        let nf = f64::from(n);
        CentralizedAuxiliaries {
            rho: params.price_ceiling() - params.m / (1.0 - params.theta),
            a_hat: params.order_cost + params.setup_cost / nf,
            h_hat: params.h_m * (2.0 - nf) / (2.0 * params.production_rate),
        }
    }

    /// Unit production cost plus per-unit ordering, setup and manufacturer
    /// holding burden at order quantity `q`.
    pub(crate) fn effective_cost(&self, params: &ModelParams, q: f64) -> f64 {
        let lot = (1.0 - params.k) * q;
        params.m + self.a_hat / lot + self.h_hat * lot
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralizedSolution {
    pub p_dstar: f64,
    pub q_dstar: f64,
    pub n_dstar: u32,
    pub profit_retailer_c: f64,
    pub profit_manufacturer_c: f64,
    pub profit_chain_c: f64,
    /// Model assumptions that the solution violates.
    pub warnings: Vec<String>,
}

/// Chain-optimal price for given `Q` and `n`.
pub fn centralized_price_given_q(params: &ModelParams, q: f64, n: u32) -> f64 {
    let aux = CentralizedAuxiliaries::new(params, n);
    0.5 * (params.price_ceiling() + aux.effective_cost(params, q) / (1.0 - params.theta))
}

/// Total chain profit rate at `(p, Q, n)`. The wholesale price cancels.
pub fn chain_profit(params: &ModelParams, p: f64, q: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("shipment count must be at least 1".into()));
    }
    let d0 = positive_demand(params, p)?;
    let b = params.b;
    let k = params.k;
    let nf = f64::from(n);
    let c = (1.0 - b) / params.cycle_factor();
    let qb = q.powf(b);
    let a_hat = params.order_cost + params.setup_cost / nf;
    Ok(
        c * d0 * ((p - params.m - params.theta * p) * (1.0 - k) * qb - a_hat * q.powf(b - 1.0))
            - params.retailer_holding_coeff() * q
            - params.h_m * (1.0 - k) * q / 2.0
                * ((nf - 1.0) + c * d0 * (2.0 - nf) * (1.0 - k) * qb / params.production_rate),
    )
}

fn reduced_scale(params: &ModelParams) -> f64 {
    params.net_price_sensitivity() * (1.0 - params.b) * (1.0 - params.k) / (4.0 * params.cycle_factor())
}

fn linear_cost(params: &ModelParams, n: u32) -> f64 {
    params.retailer_holding_coeff() + (1.0 - params.k) * (f64::from(n) - 1.0) * params.h_m / 2.0
}

fn reduced_profit(params: &ModelParams, q: f64, n: u32, square_weight: f64) -> f64 {
    let aux = CentralizedAuxiliaries::new(params, n);
    let one_t = 1.0 - params.theta;
    let x = aux.a_hat / ((1.0 - params.k) * q) + aux.h_hat * (1.0 - params.k) * q;
    reduced_scale(params)
        * q.powf(params.b)
        * (one_t * aux.rho * aux.rho - 2.0 * aux.rho * x + square_weight * x * x / one_t)
        - linear_cost(params, n) * q
}

/// Chain profit with the chain-optimal price substituted, as a function of `Q`.
pub fn chain_profit_of_q(params: &ModelParams, q: f64, n: u32) -> f64 {
    reduced_profit(params, q, n, 1.0)
}

/// The reduced chain profit written with weight 3 on the squared cost term.
///
/// This variant does not equal the chain profit at the optimal price; it is
/// kept so reports can quantify how far it drifts from [`chain_profit_of_q`].
pub fn chain_profit_of_q_weight3(params: &ModelParams, q: f64, n: u32) -> f64 {
    reduced_profit(params, q, n, 3.0)
}

/// Derivative of [`chain_profit_of_q`] in `Q`.
pub fn chain_slope(params: &ModelParams, q: f64, n: u32) -> f64 {
    let aux = CentralizedAuxiliaries::new(params, n);
    let b = params.b;
    let k = params.k;
    let one_t = 1.0 - params.theta;
    let a = aux.a_hat / (1.0 - k);
    let h = aux.h_hat * (1.0 - k);
    let bracket = (one_t * aux.rho * aux.rho + 2.0 * aux.a_hat * aux.h_hat / one_t) * b * q.powf(b - 1.0)
        - 2.0 * aux.rho * (a * (b - 1.0) * q.powf(b - 2.0) + h * (b + 1.0) * q.powf(b))
        + (a * a * (b - 2.0) * q.powf(b - 3.0) + h * h * (b + 2.0) * q.powf(b + 1.0)) / one_t;
    reduced_scale(params) * bracket - linear_cost(params, n)
}

/// Chain-optimal `(p, Q, profit)` for a fixed shipment count.
///
/// The slope is scanned on a doubling grid from `Q = 1e−6`, skipping order
/// quantities whose price would choke off demand, until it turns from
/// positive to negative; that bracket is then bisected.
pub fn solve_q_given_n(params: &ModelParams, n: u32, settings: &SolverSettings) -> Result<(f64, f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("shipment count must be at least 1".into()));
    }
    let ceiling = params.price_ceiling();
    let mut q = 1e-6;
    let mut prev: Option<(f64, f64)> = None;
    let (lo, hi) = loop {
        if q > 1e12 {
            return Err(Error::NoRoot(format!(
                "chain profit has no interior maximum in Q for n = {n}"
            )));
        }
        let p = centralized_price_given_q(params, q, n);
        if p <= 0.0 {
            return Err(Error::NoRoot(format!(
                "chain price turns non-positive at Q = {q} before a maximum for n = {n}"
            )));
        }
        if p < ceiling {
            let slope = chain_slope(params, q, n);
            if let Some((q0, s0)) = prev {
                if s0 > 0.0 && slope <= 0.0 {
                    break (q0, q);
                }
            }
            prev = Some((q, slope));
        }
        q *= 2.0;
    };
    let q = bisect(
        |q| Ok(chain_slope(params, q, n)),
        lo,
        hi,
        settings.root_tol_rel,
        settings.max_root_iters,
    )?;
    let p = centralized_price_given_q(params, q, n);
    if p >= ceiling {
        return Err(Error::InfeasiblePrice { price: p, ceiling });
    }
    Ok((p, q, chain_profit(params, p, q, n)?))
}

/// Maximizer of [`chain_profit_of_q_weight3`] near `q_hint`, for diagnostics.
pub fn weight3_maximizer(params: &ModelParams, n: u32, q_hint: f64) -> f64 {
    golden_max(
        |q| chain_profit_of_q_weight3(params, q, n),
        0.25 * q_hint,
        4.0 * q_hint,
        1e-9 * q_hint,
    )
}

pub fn solve_centralized(params: &ModelParams, settings: &SolverSettings) -> Result<CentralizedSolution> {
    let mut best_n = 1;
    let mut best = solve_q_given_n(params, 1, settings)?;
    let mut stopped = false;
    for n in 2..=settings.max_n {
        match solve_q_given_n(params, n, settings) {
            Ok(candidate) if candidate.2 > best.2 => {
                best_n = n;
                best = candidate;
            }
            _ => {
                stopped = true;
                break;
            }
        }
    }
    if !stopped {
        return Err(Error::SearchExhausted { max_n: settings.max_n });
    }
    let (p, q, _) = best;
    let retailer = retailer_profit(params, p, q)?;
    let manufacturer = manufacturer_profit(params, p, q, best_n)?;
    Ok(CentralizedSolution {
        p_dstar: p,
        q_dstar: q,
        n_dstar: best_n,
        profit_retailer_c: retailer,
        profit_manufacturer_c: manufacturer,
        profit_chain_c: retailer + manufacturer,
        warnings: assumption_warnings(params, p, q, best_n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decentralized::retailer_price_given_q;
    use crate::params::benchmark_problems;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn problem(i: usize) -> ModelParams {
        benchmark_problems()[i - 1]
    }

    #[test]
    fn price_reduces_to_retailer_formula() {
        let params = ModelParams {
            theta: 0.0,
            setup_cost: 0.0,
            ..problem(1)
        };
        let as_retailer = ModelParams { v: params.m, ..params };
        let q = 640.0;
        assert!(
            rel(
                centralized_price_given_q(&params, q, 2),
                retailer_price_given_q(&as_retailer, q)
            ) < 1e-14
        );
    }

    #[test]
    fn price_at_tabulated_point() {
        assert!((centralized_price_given_q(&problem(1), 1007.78, 2) - 96.83).abs() < 0.01);
    }

    #[test]
    fn price_rises_with_theta() {
        let base = problem(1);
        let prices: Vec<f64> = [0.1, 0.2, 0.3]
            .iter()
            .map(|&t| centralized_price_given_q(&base.with_theta(t), 1000.0, 2))
            .collect();
        assert!(prices[0] < prices[1] && prices[1] < prices[2]);
    }

    #[test]
    fn reduced_form_matches_direct_profit() {
        for params in benchmark_problems() {
            for n in 1..=6 {
                for q in [300.0, 900.0, 2000.0] {
                    let p = centralized_price_given_q(&params, q, n);
                    if p >= params.price_ceiling() || p <= 0.0 {
                        continue;
                    }
                    let direct = chain_profit(&params, p, q, n).unwrap();
                    assert!((chain_profit_of_q(&params, q, n) - direct).abs() < 1e-9 * direct.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn slope_matches_finite_difference() {
        let params = problem(3);
        for n in [1, 2, 5] {
            let q = 1500.0;
            let h = 1e-3;
            let fd = (chain_profit_of_q(&params, q + h, n) - chain_profit_of_q(&params, q - h, n)) / (2.0 * h);
            assert!(rel(chain_slope(&params, q, n), fd) < 1e-6, "n = {n}");
        }
    }

    #[test]
    fn weight3_form_differs() {
        let params = problem(1);
        let q = 1007.78;
        let gap = rel(
            chain_profit_of_q_weight3(&params, q, 2),
            chain_profit_of_q(&params, q, 2),
        );
        assert!(gap > 1e-8);
        let q3 = weight3_maximizer(&params, 2, q);
        assert!((q3 - 1005.37).abs() < 0.5, "{q3}");
    }

    #[test]
    fn fixed_n_optima() {
        let s = SolverSettings::default();
        let (p, q, _) = solve_q_given_n(&problem(1), 2, &s).unwrap();
        assert!(rel(q, 1007.78) < 5e-3 && rel(p, 96.83) < 5e-3);
        let (p, q, _) = solve_q_given_n(&problem(3), 5, &s).unwrap();
        assert!(rel(q, 2457.64) < 5e-3 && rel(p, 89.73) < 5e-3);
    }

    #[test]
    fn large_n_without_interior_optimum() {
        assert!(matches!(
            solve_q_given_n(&problem(3), 7, &SolverSettings::default()),
            Err(Error::NoRoot(_))
        ));
    }

    #[test]
    fn stopping_rule_and_member_split() {
        let s = SolverSettings::default();
        let sol = solve_centralized(&problem(2), &s).unwrap();
        assert_eq!(sol.n_dstar, 1);
        assert!(rel(sol.q_dstar, 754.621) < 5e-3 && rel(sol.profit_chain_c, 22237.3) < 5e-3);
        assert_eq!(sol.profit_retailer_c + sol.profit_manufacturer_c, sol.profit_chain_c);
        let direct = chain_profit(&problem(2), sol.p_dstar, sol.q_dstar, 1).unwrap();
        assert!(rel(direct, sol.profit_chain_c) < 1e-10);
    }

    #[test]
    fn exhausted_search_is_reported() {
        let s = SolverSettings {
            max_n: 2,
            ..SolverSettings::default()
        };
        assert!(matches!(
            solve_centralized(&problem(1), &s),
            Err(Error::SearchExhausted { max_n: 2 })
        ));
    }

    proptest! {
        #[test]
        fn chain_profit_is_member_sum(
            p in 40.0f64..150.0, q in 50.0f64..4000.0, n in 1u32..9,
        ) {
            let params = problem(1);
            let total = chain_profit(&params, p, q, n).unwrap();
            let parts = retailer_profit(&params, p, q).unwrap() + manufacturer_profit(&params, p, q, n).unwrap();
            prop_assert!((total - parts).abs() <= 1e-10 * total.abs().max(parts.abs()).max(1.0));
        }
    }
}
