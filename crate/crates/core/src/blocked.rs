//! The chain with the donation program switched off: demand loses its
//! donation term and the manufacturer pays no donation.
//!
//! Solutions delegate to the main solvers with `θ = 0`. The donation-free
//! closed forms below are written out separately so they can be checked
//! against the general ones.

use serde::{Deserialize, Serialize};

use crate::centralized::{solve_centralized, CentralizedSolution};
use crate::coordination::{coordinate, ContractOutcome};
use crate::decentralized::{solve_decentralized, DecentralizedSolution};
use crate::error::Result;
use crate::params::{validate, ModelParams, SolverSettings};

/// Copy of `params` with the donation fraction set to zero.
pub fn blocked_params(params: &ModelParams) -> ModelParams {
    params.with_theta(0.0)
}

/// `blocked_params`, rejected when the donation-free chain is itself invalid,
/// e.g. when `v` reaches `alpha/beta` once the donation lift is gone.
fn checked_blocked(params: &ModelParams) -> Result<ModelParams> {
    let bp = blocked_params(params);
    validate(&bp).into_result()?;
    Ok(bp)
}

pub fn solve_blocked_decentralized(params: &ModelParams, settings: &SolverSettings) -> Result<DecentralizedSolution> {
    solve_decentralized(&checked_blocked(params)?, settings)
}

pub fn solve_blocked_centralized(params: &ModelParams, settings: &SolverSettings) -> Result<CentralizedSolution> {
    solve_centralized(&checked_blocked(params)?, settings)
}

pub fn solve_blocked_coordinated(params: &ModelParams, settings: &SolverSettings) -> Result<ContractOutcome> {
    let bp = checked_blocked(params)?;
    let dec = solve_decentralized(&bp, settings)?;
    let cen = solve_centralized(&bp, settings)?;
    coordinate(&bp, &dec, &cen)
}

/// Chain with the donation program against the same chain without it,
/// both under the coordinated contract.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub profit_joint: f64,
    pub profit_blocked: f64,
    /// Percent gain of the joint chain over the blocked one.
    pub uplift_percent: f64,
    pub price_joint: f64,
    pub price_blocked: f64,
    pub quantity_joint: f64,
    pub quantity_blocked: f64,
}

pub fn compare_joint_vs_blocked(params: &ModelParams, settings: &SolverSettings) -> Result<ComparisonReport> {
    let joint = solve_centralized(params, settings)?;
    let blocked = solve_blocked_centralized(params, settings)?;
    Ok(ComparisonReport {
        profit_joint: joint.profit_chain_c,
        profit_blocked: blocked.profit_chain_c,
        uplift_percent: (joint.profit_chain_c - blocked.profit_chain_c) / blocked.profit_chain_c * 100.0,
        price_joint: joint.p_dstar,
        price_blocked: blocked.p_dstar,
        quantity_joint: joint.q_dstar,
        quantity_blocked: blocked.q_dstar,
    })
}

/// Donation-free shorthand constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockedAuxiliaries {
    /// α/β − m.
    pub phi: f64,
    /// Contract surplus kernel at the blocked centralized solution.
    pub delta_blocked: f64,
}

fn cycle_c(params: &ModelParams) -> f64 {
    (1.0 - params.b) / params.cycle_factor()
}

fn holding_c(params: &ModelParams) -> f64 {
    params.retailer_holding_coeff()
}

/// Retailer's best price for `Q` without donations.
pub fn retailer_price(params: &ModelParams, q: f64) -> f64 {
    0.5 * (params.alpha / params.beta + params.v + params.order_cost / ((1.0 - params.k) * q))
}

/// Retailer profit rate without donations.
pub fn retailer_profit(params: &ModelParams, p: f64, q: f64) -> f64 {
    let b = params.b;
    cycle_c(params)
        * (params.alpha - params.beta * p)
        * ((p - params.v) * (1.0 - params.k) * q.powf(b) - params.order_cost * q.powf(b - 1.0))
        - holding_c(params) * q
}

/// Retailer profit with its best price substituted.
pub fn retailer_profit_of_q(params: &ModelParams, q: f64) -> f64 {
    let b = params.b;
    let k = params.k;
    let term = (params.alpha / params.beta - params.v) * ((1.0 - k) * q.powf(b)).sqrt()
        - params.order_cost / ((1.0 - k) * q.powf(2.0 - b)).sqrt();
    params.beta * (1.0 - b) / (4.0 * params.cycle_factor())
        * (term * term - 4.0 * (1.0 - k.powf(2.0 - b)) * params.h_r * q / (params.beta * (2.0 - b)))
}

/// Manufacturer profit rate without donations.
pub fn manufacturer_profit(params: &ModelParams, p: f64, q: f64, n: u32) -> f64 {
    let b = params.b;
    let k = params.k;
    let nf = f64::from(n);
    let scaled = cycle_c(params) * (params.alpha - params.beta * p);
    scaled * ((params.v - params.m) * (1.0 - k) * q.powf(b) - params.setup_cost / nf * q.powf(b - 1.0))
        - params.h_m * (1.0 - k) * q / 2.0
            * ((nf - 1.0) + scaled * (2.0 - nf) * (1.0 - k) * q.powf(b) / params.production_rate)
}

/// Continuous shipment count without donations.
pub fn shipments_decimal(params: &ModelParams, p: f64, q: f64) -> f64 {
    let b = params.b;
    let k = params.k;
    let r = params.production_rate;
    let d0 = params.alpha - params.beta * p;
    (2.0 * r * params.setup_cost * (1.0 - b) * d0 * q.powf(b)
        / (params.h_m * (1.0 - k) * q * q * (r * params.cycle_factor() - (1.0 - b) * d0 * (1.0 - k) * q.powf(b))))
    .sqrt()
}

/// Chain-optimal price for `(Q, n)` without donations.
pub fn chain_price(params: &ModelParams, q: f64, n: u32) -> f64 {
    let nf = f64::from(n);
    let lot = (1.0 - params.k) * q;
    0.5 * (params.alpha / params.beta
        + params.m
        + (params.order_cost + params.setup_cost / nf) / lot
        + params.h_m * (2.0 - nf) * lot / (2.0 * params.production_rate))
}

/// Chain profit rate without donations.
pub fn chain_profit(params: &ModelParams, p: f64, q: f64, n: u32) -> f64 {
    let b = params.b;
    let k = params.k;
    let nf = f64::from(n);
    let scaled = cycle_c(params) * (params.alpha - params.beta * p);
    scaled * ((p - params.m) * (1.0 - k) * q.powf(b) - (params.order_cost + params.setup_cost / nf) * q.powf(b - 1.0))
        - holding_c(params) * q
        - params.h_m * (1.0 - k) * q / 2.0
            * ((nf - 1.0) + scaled * (2.0 - nf) * (1.0 - k) * q.powf(b) / params.production_rate)
}

/// Reduced chain profit in its completed-square written form, whose linear
/// manufacturer holding term carries `β/4` in place of `1/2`. The two agree
/// only when `n = 1`.
pub fn chain_profit_of_q_written(params: &ModelParams, q: f64, n: u32) -> f64 {
    let b = params.b;
    let k = params.k;
    let nf = f64::from(n);
    let phi = params.alpha / params.beta - params.m;
    let a_hat = params.order_cost + params.setup_cost / nf;
    let h_hat = params.h_m * (2.0 - nf) / (2.0 * params.production_rate);
    let a = phi - a_hat / ((1.0 - k) * q);
    let h = phi - h_hat * (1.0 - k) * q;
    params.beta * (1.0 - b) * (1.0 - k) * q.powf(b) / (4.0 * params.cycle_factor())
        * (a * a + h * h + (2.0 * a_hat * h_hat - phi * phi))
        - (holding_c(params) + params.beta * (1.0 - k) * (nf - 1.0) * params.h_m / 4.0) * q
}

pub fn blocked_auxiliaries(params: &ModelParams, cen: &CentralizedSolution) -> BlockedAuxiliaries {
    let b = params.b;
    let k = params.k;
    let (p, q, n) = (cen.p_dstar, cen.q_dstar, f64::from(cen.n_dstar));
    let lot = (1.0 - k) * q;
    let cost = params.m
        + (params.order_cost + params.setup_cost / n) / lot
        + params.h_m * (2.0 - n) * lot / (2.0 * params.production_rate);
    BlockedAuxiliaries {
        phi: params.alpha / params.beta - params.m,
        delta_blocked: (params.alpha - params.beta * p) * (1.0 - k) * q.powf(b) * (p - cost)
            - (1.0 - k.powf(2.0 - b)) * params.h_r * q / (2.0 - b),
    }
}

fn retailer_kernel(params: &ModelParams, dec: &DecentralizedSolution) -> f64 {
    let b = params.b;
    let k = params.k;
    let (p, q) = (dec.p_star, dec.q_star);
    (params.alpha - params.beta * p) * (1.0 - k) * q.powf(b) * (p - (params.v + params.order_cost / ((1.0 - k) * q)))
        - (1.0 - k.powf(2.0 - b)) * params.h_r * q / (2.0 - b)
}

/// Lower participation bound without donations.
pub fn mu_lower(params: &ModelParams, dec: &DecentralizedSolution, cen: &CentralizedSolution) -> f64 {
    retailer_kernel(params, dec) / blocked_auxiliaries(params, cen).delta_blocked
}

/// Bargained share in its written form, which adds the surplus without the
/// cycle factor `(1−b)/(1−k^(1−b))`; kept as a diagnostic.
pub fn mu_bargain_written(params: &ModelParams, dec: &DecentralizedSolution, cen: &CentralizedSolution) -> f64 {
    let delta = cen.profit_chain_c - dec.profit_chain;
    (params.xi * delta + retailer_kernel(params, dec)) / blocked_auxiliaries(params, cen).delta_blocked
}
