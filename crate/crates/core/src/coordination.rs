//! Revenue-and-cost-sharing contract.
//!
//! The retailer keeps a fraction `μ` of sales revenue and pays the same
//! fraction of its holding cost; the manufacturer absorbs the rest and sells
//! at a discounted wholesale price `v_co` chosen so that the retailer's own
//! best response is the chain-optimal policy. Both members' profits are then
//! affine in `μ` and always sum to the centralized chain profit.

use serde::{Deserialize, Serialize};

use crate::centralized::{CentralizedAuxiliaries, CentralizedSolution};
use crate::decentralized::{manufacturer_profit_at, DecentralizedSolution};
use crate::error::{Error, Result};
use crate::kinetics::{demand_coeff, positive_demand};
use crate::params::ModelParams;

/// Surplus kernel and pie growth of the contract.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractAuxiliaries {
    /// Retailer contract profit equals `(1−b)/(1−k^(1−b))·μ·eta`.
    pub eta: f64,
    /// Centralized minus decentralized chain profit.
    pub delta_profit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractOutcome {
    pub mu_lower: f64,
    pub mu_upper: f64,
    pub mu_bargain: f64,
    pub v_co: f64,
    /// `1 − v_co/v`, as a fraction.
    pub discount_rate: f64,
    pub profit_retailer_co: f64,
    pub profit_manufacturer_co: f64,
    pub profit_chain_co: f64,
    /// Percent change of each party's profit over the decentralized system.
    pub savings_retailer: f64,
    pub savings_manufacturer: f64,
    pub savings_chain: f64,
    /// Set when `v_co < 0`, i.e. the discount exceeds 100%.
    pub deep_discount: bool,
    /// Relative gap between the bargained retailer profit and
    /// `Π_r/d + ξ·ΔΠ`; zero up to rounding.
    pub split_residual: f64,
}

/// Wholesale price that makes the chain-optimal price the retailer's best
/// response when it keeps a revenue share `mu`.
pub fn discounted_wholesale(params: &ModelParams, cen: &CentralizedSolution, mu: f64) -> f64 {
    let aux = CentralizedAuxiliaries::new(params, cen.n_dstar);
    let q = cen.q_dstar;
    mu * aux.effective_cost(params, q) / (1.0 - params.theta) - params.order_cost / ((1.0 - params.k) * q)
}

/// Retailer's best-response price under the contract.
pub fn retailer_price_under_contract(params: &ModelParams, q: f64, mu: f64, v: f64) -> f64 {
    0.5 * (params.price_ceiling() + (v + params.order_cost / ((1.0 - params.k) * q)) / mu)
}

/// Member profit rates under the contract for an arbitrary policy and wholesale price.
pub fn contract_profits_at(params: &ModelParams, p: f64, q: f64, n: u32, mu: f64, v: f64) -> Result<(f64, f64)> {
    let d0 = positive_demand(params, p)?;
    let b = params.b;
    let k = params.k;
    let c = (1.0 - b) / params.cycle_factor();
    let qb = q.powf(b);
    let hc = params.retailer_holding_coeff() * q;
    let retailer = c * d0 * ((mu * p - v) * (1.0 - k) * qb - params.order_cost * q.powf(b - 1.0)) - mu * hc;
    let shared = (1.0 - mu) * (c * d0 * p * (1.0 - k) * qb - hc);
    let manufacturer = manufacturer_profit_at(params, v, p, q, n)? + shared;
    Ok((retailer, manufacturer))
}

/// `(retailer, manufacturer)` profit rates at the chain optimum with revenue share `mu`.
pub fn coordinated_profits(params: &ModelParams, cen: &CentralizedSolution, mu: f64) -> Result<(f64, f64)> {
    let v = discounted_wholesale(params, cen, mu);
    contract_profits_at(params, cen.p_dstar, cen.q_dstar, cen.n_dstar, mu, v)
}

pub fn contract_auxiliaries(
    params: &ModelParams,
    dec: &DecentralizedSolution,
    cen: &CentralizedSolution,
) -> ContractAuxiliaries {
    let aux = CentralizedAuxiliaries::new(params, cen.n_dstar);
    let (p, q) = (cen.p_dstar, cen.q_dstar);
    let b = params.b;
    let eta = demand_coeff(params, p)
        * (1.0 - params.k)
        * q.powf(b)
        * (p - aux.effective_cost(params, q) / (1.0 - params.theta))
        - (1.0 - params.k.powf(2.0 - b)) * params.h_r * q / (2.0 - b);
    ContractAuxiliaries {
        eta,
        delta_profit: cen.profit_chain_c - dec.profit_chain,
    }
}

/// Intercept and slope of an affine function of `mu`, from its values at 0 and 1.
fn affine(f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let at0 = f(0.0)?;
    Ok((at0, f(1.0)? - at0))
}

/// Participation bounds `(mu_lower, mu_upper)` on the retailer's revenue share.
pub fn mu_bounds(params: &ModelParams, dec: &DecentralizedSolution, cen: &CentralizedSolution) -> Result<(f64, f64)> {
    let (r0, r1) = affine(|mu| Ok(coordinated_profits(params, cen, mu)?.0))?;
    let (m0, m1) = affine(|mu| Ok(coordinated_profits(params, cen, mu)?.1))?;
    if !(r1 > 0.0) || !(m1 < 0.0) {
        return Err(Error::Domain(format!(
            "contract profits are not monotone in mu (slopes {r1}, {m1})"
        )));
    }
    let lower = (dec.profit_retailer - r0) / r1;
    let upper = (dec.profit_manufacturer - m0) / m1;
    if upper < lower {
        return Err(Error::InfeasibleContract { lower, upper });
    }
    Ok((lower, upper))
}

/// Revenue share that splits the surplus by the retailer's bargaining power `xi`.
pub fn mu_bargain(mu_lower: f64, mu_upper: f64, xi: f64) -> Result<f64> {
    if mu_upper < mu_lower {
        return Err(Error::InfeasibleContract {
            lower: mu_lower,
            upper: mu_upper,
        });
    }
    Ok(xi * mu_upper + (1.0 - xi) * mu_lower)
}

fn savings(coordinated: f64, decentralized: f64) -> f64 {
    (coordinated - decentralized) / decentralized * 100.0
}

pub fn coordinate(
    params: &ModelParams,
    dec: &DecentralizedSolution,
    cen: &CentralizedSolution,
) -> Result<ContractOutcome> {
    let (lower, upper) = mu_bounds(params, dec, cen)?;
    let mu = mu_bargain(lower, upper, params.xi)?;
    let v_co = discounted_wholesale(params, cen, mu);
    let (retailer, manufacturer) = coordinated_profits(params, cen, mu)?;
    let chain = cen.profit_chain_c;
    let target = dec.profit_retailer + params.xi * (chain - dec.profit_chain);
    Ok(ContractOutcome {
        mu_lower: lower,
        mu_upper: upper,
        mu_bargain: mu,
        v_co,
        discount_rate: 1.0 - v_co / params.v,
        profit_retailer_co: retailer,
        profit_manufacturer_co: manufacturer,
        profit_chain_co: chain,
        savings_retailer: savings(retailer, dec.profit_retailer),
        savings_manufacturer: savings(manufacturer, dec.profit_manufacturer),
        savings_chain: savings(chain, dec.profit_chain),
        deep_discount: v_co < 0.0,
        split_residual: (retailer - target).abs() / target.abs(),
    })
}

/// Lower participation bound written directly from the decentralized solution.
pub fn mu_lower_closed_form(params: &ModelParams, dec: &DecentralizedSolution, cen: &CentralizedSolution) -> f64 {
    let (p, q) = (dec.p_star, dec.q_star);
    let b = params.b;
    let k = params.k;
    let eta = contract_auxiliaries(params, dec, cen).eta;
    (demand_coeff(params, p) * (1.0 - k) * q.powf(b) * (p - (params.v + params.order_cost / ((1.0 - k) * q)))
        - (1.0 - k.powf(2.0 - b)) * params.h_r * q / (2.0 - b))
        / eta
}

/// Upper participation bound in its expanded written form.
///
/// Unlike [`mu_bounds`] this does not carry the cycle factor and repeats
/// `h_m` in its last term, so it is only a diagnostic.
pub fn mu_upper_written_form(params: &ModelParams, dec: &DecentralizedSolution, cen: &CentralizedSolution) -> f64 {
    let (p, q, n) = (dec.p_star, dec.q_star, f64::from(dec.n_star));
    let (qc, nc) = (cen.q_dstar, f64::from(cen.n_dstar));
    let b = params.b;
    let k = params.k;
    let eta = contract_auxiliaries(params, dec, cen).eta;
    let lot = (1.0 - k) * q;
    let margin = params.v
        - (params.theta * p
            + params.m
            + params.setup_cost / lot
            + params.h_m * (2.0 - n) * lot / (2.0 * params.production_rate));
    let inner = demand_coeff(params, p) * (1.0 - k) * q.powf(b) * margin
        + (1.0 - k.powf(2.0 - b)) * params.h_r * qc / (2.0 - b)
        - params.h_m * (1.0 - k) * params.cycle_factor() * params.h_m / (2.0 * (1.0 - b))
            * ((n - 1.0) * q - (nc - 1.0) * qc);
    1.0 - params.theta - inner / eta
}
