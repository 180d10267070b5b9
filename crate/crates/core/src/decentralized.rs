//! Traditional channel: the retailer sets price and order quantity for its own
//! profit, then the manufacturer picks how many shipments each production run
//! is split into.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetics::{self, positive_demand};
use crate::params::{ModelParams, SolverSettings};
use crate::root::bisect;

/// Coefficients of the retailer's curvature polynomial `−τ1·Q² − τ2·Q + τ3`
/// and its two roots.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FocCoefficients {
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    /// Positive root: the reduced retailer profit is concave for `Q > q1`.
    pub q1: f64,
    pub q2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecentralizedSolution {
    pub p_star: f64,
    pub q_star: f64,
    pub n_star: u32,
    /// Continuous shipment count before rounding; `None` when the closed form
    /// has no real value and the count came from enumeration.
    pub n_decimal: Option<f64>,
    pub profit_retailer: f64,
    pub profit_manufacturer: f64,
    pub profit_chain: f64,
    /// Model assumptions that the solution violates.
    pub warnings: Vec<String>,
}

/// Retailer's best price for a given order quantity.
pub fn retailer_price_given_q(params: &ModelParams, q: f64) -> f64 {
    0.5 * (params.price_ceiling() + params.v + params.order_cost / ((1.0 - params.k) * q))
}

/// Retailer's average profit rate at `(p, Q)`.
pub fn retailer_profit(params: &ModelParams, p: f64, q: f64) -> Result<f64> {
    let d0 = positive_demand(params, p)?;
    let b = params.b;
    let c = (1.0 - b) / params.cycle_factor();
    Ok(
        c * d0 * ((p - params.v) * (1.0 - params.k) * q.powf(b) - params.order_cost * q.powf(b - 1.0))
            - params.retailer_holding_coeff() * q,
    )
}

/// Retailer profit built from one cycle's cash flows divided by its length.
pub fn retailer_profit_per_cycle(params: &ModelParams, p: f64, q: f64) -> Result<f64> {
    let tr = kinetics::cycle_length(params, p, q)?;
    let area = kinetics::holding_integral(params, p, q)?;
    Ok(((p - params.v) * (1.0 - params.k) * q - params.order_cost - params.h_r * area) / tr)
}

/// Retailer profit with the best price already substituted, as a function of `Q`.
pub fn retailer_profit_of_q(params: &ModelParams, q: f64) -> f64 {
    let b = params.b;
    let k = params.k;
    let net = params.net_price_sensitivity();
    let margin = params.price_ceiling() - params.v;
    let term = margin * ((1.0 - k) * q.powf(b)).sqrt() - params.order_cost / ((1.0 - k) * q.powf(2.0 - b)).sqrt();
    net * (1.0 - b) / (4.0 * params.cycle_factor())
        * (term * term - 4.0 * (1.0 - k.powf(2.0 - b)) * params.h_r * q / (net * (2.0 - b)))
}

/// Derivative of [`retailer_profit_of_q`] with respect to `Q`.
pub fn retailer_slope(params: &ModelParams, q: f64) -> f64 {
    let b = params.b;
    let k = params.k;
    let net = params.net_price_sensitivity();
    let margin = params.price_ceiling() - params.v;
    let a = params.order_cost;
    let bracket = b * margin * margin * (1.0 - k) * q.powf(b - 1.0) + 2.0 * (1.0 - b) * margin * a * q.powf(b - 2.0)
        - (2.0 - b) * a * a * q.powf(b - 3.0) / (1.0 - k)
        - 4.0 * (1.0 - k.powf(2.0 - b)) * params.h_r / (net * (2.0 - b));
    net * (1.0 - b) / (4.0 * params.cycle_factor()) * bracket
}

/// Second derivative of [`retailer_profit_of_q`] in its factored form.
pub fn retailer_curvature(params: &ModelParams, q: f64) -> f64 {
    let foc = saddle_points(params);
    let b = params.b;
    params.net_price_sensitivity() * (1.0 - b) / (4.0 * params.cycle_factor())
        * q.powf(b - 4.0)
        * (-foc.tau1 * q * q - foc.tau2 * q + foc.tau3)
}

pub fn saddle_points(params: &ModelParams) -> FocCoefficients {
    let b = params.b;
    let k = params.k;
    let margin = params.price_ceiling() - params.v;
    let a = params.order_cost;
    let tau1 = b * (1.0 - b) * margin * margin * (1.0 - k);
    let tau2 = 2.0 * (1.0 - b) * (2.0 - b) * margin * a;
    let tau3 = (2.0 - b) * (3.0 - b) * a * a / (1.0 - k);
    let disc = (tau2 * tau2 + 4.0 * tau1 * tau3).sqrt();
    FocCoefficients {
        tau1,
        tau2,
        tau3,
        q1: (-tau2 + disc) / (2.0 * tau1),
        q2: (-tau2 - disc) / (2.0 * tau1),
    }
}

/// Retailer optimum `(p*, Q*, profit)` on the concave branch `Q > Q1`.
pub fn solve_retailer(params: &ModelParams, settings: &SolverSettings) -> Result<(f64, f64, f64)> {
    let foc = saddle_points(params);
    let lo = foc.q1 * (1.0 + 1e-9);
    if !(retailer_slope(params, lo) > 0.0) {
        return Err(Error::NoRoot(format!(
            "retailer profit is not increasing at the inflection point Q1 = {}",
            foc.q1
        )));
    }
    let mut hi = 2.0 * foc.q1;
    let mut doublings = 0;
    while retailer_slope(params, hi) >= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 || !hi.is_finite() {
            return Err(Error::NoRoot("retailer profit increases without bound in Q".into()));
        }
    }
    let q = bisect(
        |q| Ok(retailer_slope(params, q)),
        lo,
        hi,
        settings.root_tol_rel,
        settings.max_root_iters,
    )?;
    let p = retailer_price_given_q(params, q);
    let profit = retailer_profit(params, p, q)?;
    Ok((p, q, profit))
}

/// Manufacturer's average profit rate when the retailer orders `Q` at price `p`
/// and each production run is shipped in `n` lots.
pub fn manufacturer_profit(params: &ModelParams, p: f64, q: f64, n: u32) -> Result<f64> {
    manufacturer_profit_at(params, params.v, p, q, n)
}

/// As [`manufacturer_profit`] with an explicit wholesale price.
pub(crate) fn manufacturer_profit_at(params: &ModelParams, v: f64, p: f64, q: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("shipment count must be at least 1".into()));
    }
    let d0 = positive_demand(params, p)?;
    let b = params.b;
    let k = params.k;
    let nf = f64::from(n);
    let c = (1.0 - b) / params.cycle_factor();
    let qb = q.powf(b);
    Ok(
        c * d0 * ((v - params.m - params.theta * p) * (1.0 - k) * qb - params.setup_cost / nf * q.powf(b - 1.0))
            - params.h_m * (1.0 - k) * q / 2.0
                * ((nf - 1.0) + c * d0 * (2.0 - nf) * (1.0 - k) * qb / params.production_rate),
    )
}

/// Manufacturer profit from cash flows over one production cycle `T = n·T_r`.
pub fn manufacturer_profit_per_cycle(params: &ModelParams, p: f64, q: f64, n: u32) -> Result<f64> {
    let geo = kinetics::CycleGeometry::new(params, p, q, n)?;
    let shipped = f64::from(n) * (1.0 - params.k) * q;
    let avg = kinetics::manufacturer_avg_inventory(params, p, q, n)?;
    Ok((params.v - params.m - params.theta * p) * shipped / geo.t - params.setup_cost / geo.t - params.h_m * avg)
}

/// Continuous shipment count where the manufacturer's profit is flat in `n`;
/// `None` when the expression under the root is not positive.
pub fn shipments_decimal(params: &ModelParams, p: f64, q: f64) -> Result<Option<f64>> {
    let d0 = positive_demand(params, p)?;
    let b = params.b;
    let k = params.k;
    let r = params.production_rate;
    let qb = q.powf(b);
    let denom = params.h_m * (1.0 - k) * q * q * (r * params.cycle_factor() - (1.0 - b) * d0 * (1.0 - k) * qb);
    if !(denom > 0.0) {
        return Ok(None);
    }
    let n2 = 2.0 * r * params.setup_cost * (1.0 - b) * d0 * qb / denom;
    Ok(Some(n2.sqrt()))
}

/// Integer shipment count maximizing the manufacturer's profit at `(p, Q)`.
pub fn optimal_shipments(
    params: &ModelParams,
    p: f64,
    q: f64,
    settings: &SolverSettings,
) -> Result<(u32, Option<f64>)> {
    let n_decimal = shipments_decimal(params, p, q)?;
    let Some(nd) = n_decimal else {
        let n = enumerate_best(|n| manufacturer_profit(params, p, q, n), settings.max_n)?;
        return Ok((n, None));
    };
    let floor = nd.floor();
    let ceil = nd.ceil();
    if floor < 1.0 || floor == ceil {
        return Ok((ceil.max(1.0) as u32, Some(nd)));
    }
    if ceil > f64::from(settings.max_n) {
        return Err(Error::SearchExhausted { max_n: settings.max_n });
    }
    let (lo, hi) = (floor as u32, ceil as u32);
    let p_lo = manufacturer_profit(params, p, q, lo)?;
    let p_hi = manufacturer_profit(params, p, q, hi)?;
    let tie = (p_lo - p_hi).abs() <= 1e-12 * p_lo.abs().max(p_hi.abs());
    Ok((if tie || p_lo > p_hi { lo } else { hi }, Some(nd)))
}

/// Argmax over `1..=max_n`, preferring the smaller `n` on ties.
pub(crate) fn enumerate_best(profit: impl Fn(u32) -> Result<f64>, max_n: u32) -> Result<u32> {
    let mut best = (1, profit(1)?);
    for n in 2..=max_n {
        let value = profit(n)?;
        if value > best.1 {
            best = (n, value);
        }
    }
    if best.0 == max_n {
        return Err(Error::SearchExhausted { max_n });
    }
    Ok(best.0)
}

/// Notes on modelling assumptions that `(p, Q, n)` violates.
pub(crate) fn assumption_warnings(params: &ModelParams, p: f64, q: f64, n: u32) -> Vec<String> {
    let mut out = Vec::new();
    let d0 = kinetics::demand_coeff(params, p);
    let peak = d0 * q.powf(params.b);
    if peak > params.production_rate {
        out.push(format!(
            "peak demand rate {peak:.6} exceeds production rate R = {}",
            params.production_rate
        ));
    }
    if let Ok(avg) = kinetics::manufacturer_avg_inventory(params, p, q, n) {
        if avg < 0.0 {
            out.push(format!(
                "manufacturer average inventory is negative ({avg:.6}): shipments outpace production"
            ));
        }
    }
    out
}

pub fn solve_decentralized(params: &ModelParams, settings: &SolverSettings) -> Result<DecentralizedSolution> {
    let (p, q, profit_retailer) = solve_retailer(params, settings)?;
    if p >= params.price_ceiling() {
        return Err(Error::InfeasiblePrice {
            price: p,
            ceiling: params.price_ceiling(),
        });
    }
    let (n, n_decimal) = optimal_shipments(params, p, q, settings)?;
    let profit_manufacturer = manufacturer_profit(params, p, q, n)?;
    Ok(DecentralizedSolution {
        p_star: p,
        q_star: q,
        n_star: n,
        n_decimal,
        profit_retailer,
        profit_manufacturer,
        profit_chain: profit_retailer + profit_manufacturer,
        warnings: assumption_warnings(params, p, q, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::benchmark_problems;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn problem(i: usize) -> ModelParams {
        benchmark_problems()[i - 1]
    }

    #[test]
    fn price_midpoint_limits() {
        let params = problem(1);
        let mid = 0.5 * (params.price_ceiling() + params.v);
        let free = ModelParams {
            order_cost: 0.0,
            ..params
        };
        assert!(rel(retailer_price_given_q(&free, 500.0), mid) < 1e-15);
        assert!(rel(retailer_price_given_q(&params, 1e15), mid) < 1e-12);
        assert!((retailer_price_given_q(&params, 803.393) - 113.11).abs() < 0.01);
    }

    #[test]
    fn profit_forms_agree() {
        let params = problem(1);
        let (p, q) = (113.11, 803.393);
        let closed = retailer_profit(&params, p, q).unwrap();
        assert!(rel(retailer_profit_per_cycle(&params, p, q).unwrap(), closed) < 1e-10);
        assert!(rel(closed, 51079.8) < 5e-3);
        let pq = retailer_price_given_q(&params, q);
        assert!(
            rel(
                retailer_profit_of_q(&params, q),
                retailer_profit(&params, pq, q).unwrap()
            ) < 1e-10
        );
    }

    #[test]
    fn zero_margin_retailer_loses() {
        let params = ModelParams {
            order_cost: 0.0,
            ..problem(1)
        };
        assert!(retailer_profit(&params, params.v, 500.0).unwrap() < 0.0);
    }

    #[test]
    fn saddle_structure() {
        for params in benchmark_problems() {
            let foc = saddle_points(&params);
            assert!(foc.q2 < 0.0 && foc.q1 > 0.0);
            assert!(retailer_curvature(&params, 2.0 * foc.q1) < 0.0);
            assert!(retailer_curvature(&params, 0.5 * foc.q1) > 0.0);
        }
        assert!(saddle_points(&problem(1)).q1 < 803.393);
    }

    #[test]
    fn curvature_matches_slope_difference() {
        let params = problem(2);
        let q = 700.0;
        let h = 1e-3;
        let fd = (retailer_slope(&params, q + h) - retailer_slope(&params, q - h)) / (2.0 * h);
        assert!(rel(fd, retailer_curvature(&params, q)) < 1e-6);
    }

    #[test]
    fn retailer_optimum_problem1_and_4() {
        let s = SolverSettings::default();
        let (p, q, _) = solve_retailer(&problem(1), &s).unwrap();
        assert!(rel(q, 803.393) < 5e-3 && rel(p, 113.11) < 5e-3);
        let (p, q, _) = solve_retailer(&problem(4), &s).unwrap();
        assert!(rel(q, 552.893) < 5e-3 && rel(p, 68.37) < 5e-3);
    }

    #[test]
    fn manufacturer_profit_forms_agree() {
        let params = problem(1);
        for n in 1..6 {
            let a = manufacturer_profit(&params, 113.11, 803.393, n).unwrap();
            let b = manufacturer_profit_per_cycle(&params, 113.11, 803.393, n).unwrap();
            assert!(rel(a, b) < 1e-10, "n = {n}");
        }
        assert!(rel(manufacturer_profit(&params, 113.11, 803.393, 2).unwrap(), 13930.7) < 5e-3);
    }

    #[test]
    fn zero_margin_manufacturer_loses() {
        let params = ModelParams {
            theta: 0.0,
            m: 45.0,
            setup_cost: 0.0,
            ..problem(1)
        };
        for n in 1..5 {
            assert!(manufacturer_profit(&params, 90.0, 700.0, n).unwrap() <= 0.0);
        }
    }

    #[test]
    fn shipment_rounding() {
        let s = SolverSettings::default();
        let sol1 = solve_decentralized(&problem(1), &s).unwrap();
        assert!((sol1.n_decimal.unwrap() - 1.88).abs() < 0.01);
        assert_eq!(sol1.n_star, 2);
        let sol2 = solve_decentralized(&problem(2), &s).unwrap();
        assert!((sol2.n_decimal.unwrap() - 0.66).abs() < 0.01);
        assert_eq!(sol2.n_star, 1);
    }

    #[test]
    fn chain_profit_is_sum() {
        let sol = solve_decentralized(&problem(3), &SolverSettings::default()).unwrap();
        assert_eq!(sol.profit_chain, sol.profit_retailer + sol.profit_manufacturer);
        assert_eq!(sol.n_star, 2);
    }

    #[test]
    fn enumeration_hits_cap() {
        assert!(matches!(
            enumerate_best(|n| Ok(f64::from(n)), 10),
            Err(Error::SearchExhausted { max_n: 10 })
        ));
        assert_eq!(enumerate_best(|n| Ok(-(f64::from(n) - 3.0).powi(2)), 10).unwrap(), 3);
    }

    proptest! {
        #[test]
        fn cycle_and_closed_forms_agree(
            b in 0.05f64..0.9, k in 0.05f64..0.9, q in 50.0f64..5000.0, n in 1u32..8,
        ) {
            let params = ModelParams { b, k, ..problem(1) };
            let p = retailer_price_given_q(&params, q);
            let r1 = retailer_profit(&params, p, q).unwrap();
            let r2 = retailer_profit_per_cycle(&params, p, q).unwrap();
            prop_assert!((r1 - r2).abs() <= 1e-9 * r1.abs().max(1.0));
            let m1 = manufacturer_profit(&params, p, q, n).unwrap();
            let m2 = manufacturer_profit_per_cycle(&params, p, q, n).unwrap();
            prop_assert!((m1 - m2).abs() <= 1e-9 * m1.abs().max(1.0));
        }
    }
}
