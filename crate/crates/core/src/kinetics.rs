//! Retailer inventory depletion under stock-dependent demand.
//!
//! Demand at stock level `q` is `D0(p)·q^b` with `D0(p) = α − βp + λθp`, so the
//! on-hand stock obeys `dq/dt = −D0·q^b` and falls from `Q` to the reorder
//! point `kQ` in one retailer cycle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// α − βp + λθp, the demand rate per unit of `q^b`.
pub fn demand_coeff(params: &ModelParams, p: f64) -> f64 {
    params.alpha - params.beta * p + params.lambda_csa * params.theta * p
}

/// Demand coefficient, rejecting prices at or above the demand-zero price.
pub(crate) fn positive_demand(params: &ModelParams, p: f64) -> Result<f64> {
    let d0 = demand_coeff(params, p);
    if d0 > 0.0 && p.is_finite() {
        Ok(d0)
    } else {
        Err(Error::InfeasiblePrice {
            price: p,
            ceiling: params.price_ceiling(),
        })
    }
}

/// Real power of a strictly positive base.
pub(crate) fn pos_pow(base: f64, exponent: f64, what: &str) -> Result<f64> {
    if base > 0.0 && base.is_finite() {
        Ok(base.powf(exponent))
    } else {
        Err(Error::Domain(format!("{what}: non-positive base {base}")))
    }
}

/// Stock level `t` time units after a replenishment of `q0`.
pub fn inventory_at(params: &ModelParams, p: f64, q0: f64, t: f64) -> Result<f64> {
    let d0 = positive_demand(params, p)?;
    let one_b = 1.0 - params.b;
    let bracket = q0.powf(one_b) - d0 * one_b * t;
    if bracket < 0.0 || !bracket.is_finite() {
        return Err(Error::Domain(format!("t = {t} lies beyond depletion of Q = {q0}")));
    }
    Ok(bracket.powf(1.0 / one_b))
}

/// Retailer cycle length: time for stock to fall from `Q` to `kQ`.
pub fn cycle_length(params: &ModelParams, p: f64, q: f64) -> Result<f64> {
    let d0 = positive_demand(params, p)?;
    let one_b = 1.0 - params.b;
    Ok(params.cycle_factor() * pos_pow(q, one_b, "order quantity")? / (one_b * d0))
}

/// Area under the stock curve over one retailer cycle.
pub fn holding_integral(params: &ModelParams, p: f64, q: f64) -> Result<f64> {
    let d0 = positive_demand(params, p)?;
    if q == 0.0 {
        return Ok(0.0);
    }
    let two_b = 2.0 - params.b;
    Ok((1.0 - params.k.powf(two_b)) * pos_pow(q, two_b, "order quantity")? / (two_b * d0))
}

/// Time-average manufacturer stock for `n` shipments of `(1−k)Q` per production run.
pub fn manufacturer_avg_inventory(params: &ModelParams, p: f64, q: f64, n: u32) -> Result<f64> {
    let tr = cycle_length(params, p, q)?;
    Ok(avg_inventory_given_cycle(params, q, n, tr))
}

pub(crate) fn avg_inventory_given_cycle(params: &ModelParams, q: f64, n: u32, tr: f64) -> f64 {
    let lot = (1.0 - params.k) * q;
    let nf = f64::from(n);
    // n(1−k)Q / (R·nT_r): the fraction of the manufacturer cycle spent producing.
    let x = lot / (params.production_rate * tr);
    lot / 2.0 * ((nf - 1.0) * (1.0 - x) + x)
}

/// Timing and demand scale of one replenishment policy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleGeometry {
    pub t_r: f64,
    /// Manufacturer cycle, exactly `n·t_r`.
    pub t: f64,
    pub holding_area: f64,
    pub demand_coeff: f64,
}

impl CycleGeometry {
    pub fn new(params: &ModelParams, p: f64, q: f64, n: u32) -> Result<Self> {
        let t_r = cycle_length(params, p, q)?;
        Ok(CycleGeometry {
            t_r,
            t: f64::from(n) * t_r,
            holding_area: holding_integral(params, p, q)?,
            demand_coeff: demand_coeff(params, p),
        })
    }
}
