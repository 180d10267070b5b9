//! Numerical replay of the inventory process, used to check the closed-form
//! profit rates.
//!
//! The retailer cycle is located on the stock trajectory itself and its stock
//! and sales are integrated numerically. The manufacturer's stock is rebuilt
//! event by event from the production run and the `n` shipments. Profits are
//! then assembled from the resulting cash flows and divided by cycle length.

use serde::{Deserialize, Serialize};

use crate::centralized::CentralizedSolution;
use crate::coordination::discounted_wholesale;
use crate::error::{Error, Result};
use crate::kinetics::{inventory_at, positive_demand};
use crate::params::{ModelParams, SolverSettings};
use crate::root::bisect;

/// How the retailer's stock curve is produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimMode {
    /// Closed-form trajectory with composite Simpson quadrature.
    #[default]
    ClosedForm,
    /// Classical Runge–Kutta on the depletion ODE with stock area and sales
    /// carried as extra states.
    Rk4,
}

/// Revenue share and wholesale price the retailer trades under.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractTerms {
    pub mu: f64,
    pub wholesale: f64,
}

impl ContractTerms {
    /// No sharing: the retailer keeps all revenue and pays the list wholesale price.
    pub fn plain(params: &ModelParams) -> Self {
        ContractTerms {
            mu: 1.0,
            wholesale: params.v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimProfits {
    pub retailer_rate: f64,
    pub manufacturer_rate: f64,
    pub chain_rate: f64,
    /// Stock area over one retailer cycle.
    pub retailer_holding_area: f64,
    pub manufacturer_avg_inventory: f64,
    /// Retailer cycle length.
    pub cycle_length: f64,
    /// Units sold in one retailer cycle.
    pub units_sold: f64,
}

struct RetailerReplay {
    cycle: f64,
    area: f64,
    sold: f64,
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let h = (b - a) / steps as f64;
    let mut acc = f(a) + f(b);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn replay_closed_form(params: &ModelParams, p: f64, q: f64, steps: usize) -> Result<RetailerReplay> {
    let d0 = positive_demand(params, p)?;
    let one_b = 1.0 - params.b;
    let depletion = q.powf(one_b) / (d0 * one_b);
    let reorder = params.k * q;
    let cycle = bisect(
        |t| Ok(inventory_at(params, p, q, t)? - reorder),
        0.0,
        depletion,
        1e-15,
        400,
    )?;
    let stock = |t: f64| inventory_at(params, p, q, t).unwrap_or(0.0);
    let area = simpson(stock, 0.0, cycle, steps);
    let sold = simpson(|t| d0 * stock(t).powf(params.b), 0.0, cycle, steps);
    Ok(RetailerReplay { cycle, area, sold })
}

/// Integrates `(q, area, sold)` over `[0, horizon]` in `steps` RK4 steps.
fn rk4_run(d0: f64, b: f64, q0: f64, horizon: f64, steps: usize) -> [f64; 3] {
    let rhs = |y: [f64; 3]| {
        let rate = d0 * y[0].max(0.0).powf(b);
        [-rate, y[0], rate]
    };
    let h = horizon / steps as f64;
    let mut y = [q0, 0.0, 0.0];
    let add = |y: [f64; 3], k: [f64; 3], s: f64| [y[0] + s * k[0], y[1] + s * k[1], y[2] + s * k[2]];
    for _ in 0..steps {
        let k1 = rhs(y);
        let k2 = rhs(add(y, k1, h / 2.0));
        let k3 = rhs(add(y, k2, h / 2.0));
        let k4 = rhs(add(y, k3, h));
        for i in 0..3 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

fn replay_rk4(params: &ModelParams, p: f64, q: f64, steps: usize) -> Result<RetailerReplay> {
    let d0 = positive_demand(params, p)?;
    let b = params.b;
    let reorder = params.k * q;
    // Stock falls fastest at the start, so this first guess is short of the
    // reorder time and Newton steps on the convex stock curve approach from below.
    let mut horizon = (q - reorder) / (d0 * q.powf(b));
    let mut state = rk4_run(d0, b, q, horizon, steps);
    for _ in 0..60 {
        let gap = state[0] - reorder;
        let step = gap / (d0 * state[0].powf(b));
        horizon += step;
        state = rk4_run(d0, b, q, horizon, steps);
        if step.abs() <= 1e-15 * horizon {
            break;
        }
    }
    Ok(RetailerReplay {
        cycle: horizon,
        area: state[1],
        sold: state[2],
    })
}

/// Area under the manufacturer's stock for one production run.
///
/// Production at rate `R` starts just early enough for the first lot to be
/// complete when the retailer first reorders; lots of `(1−k)Q` leave every
/// `T_r` after that. Stock is cumulative output minus cumulative shipments,
/// so it dips below zero when shipments outpace production.
fn manufacturer_area(params: &ModelParams, q: f64, n: u32, cycle: f64) -> f64 {
    let r = params.production_rate;
    let lot = (1.0 - params.k) * q;
    let total = f64::from(n) * lot;
    let first = lot / r;
    let produced_by = total / r;
    let shipment_times: Vec<f64> = (0..n).map(|j| first + f64::from(j) * cycle).collect();
    let end = produced_by.max(*shipment_times.last().expect("n >= 1"));

    let mut breaks = shipment_times.clone();
    breaks.push(0.0);
    breaks.push(produced_by);
    breaks.push(end);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let stock = |t: f64, shipped: f64| (r * t).min(total) - shipped;
    let mut area = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let shipped = lot * shipment_times.iter().filter(|&&s| s <= mid).count() as f64;
        // Stock is linear between events, so Simpson's rule is exact here.
        area += (b - a) / 6.0 * (stock(a, shipped) + 4.0 * stock(mid, shipped) + stock(b, shipped));
    }
    area
}

/// Replays one manufacturer cycle under explicit contract terms.
pub fn simulate_policy(
    params: &ModelParams,
    p: f64,
    q: f64,
    n: u32,
    terms: ContractTerms,
    settings: &SolverSettings,
    mode: SimMode,
) -> Result<SimProfits> {
    let steps = settings.sim_steps_per_cycle;
    if steps < 16 {
        return Err(Error::StepResolution(steps));
    }
    if n == 0 {
        return Err(Error::Domain("shipment count must be at least 1".into()));
    }
    let steps = steps + steps % 2;
    let replay = match mode {
        SimMode::ClosedForm => replay_closed_form(params, p, q, steps)?,
        SimMode::Rk4 => replay_rk4(params, p, q, steps)?,
    };
    let lot = (1.0 - params.k) * q;
    let ContractTerms { mu, wholesale } = terms;

    let retailer_cash = mu * p * replay.sold - wholesale * lot - params.order_cost - mu * params.h_r * replay.area;
    let retailer_rate = retailer_cash / replay.cycle;

    let nf = f64::from(n);
    let horizon = nf * replay.cycle;
    let avg_stock = manufacturer_area(params, q, n, replay.cycle) / horizon;
    let manufacturer_cash = nf
        * ((wholesale - params.m) * lot - params.theta * p * replay.sold + (1.0 - mu) * p * replay.sold
            - (1.0 - mu) * params.h_r * replay.area)
        - params.setup_cost;
    let manufacturer_rate = manufacturer_cash / horizon - params.h_m * avg_stock;

    Ok(SimProfits {
        retailer_rate,
        manufacturer_rate,
        chain_rate: retailer_rate + manufacturer_rate,
        retailer_holding_area: replay.area,
        manufacturer_avg_inventory: avg_stock,
        cycle_length: replay.cycle,
        units_sold: replay.sold,
    })
}

/// Replays the plain policy `(p, Q, n)` at the list wholesale price.
pub fn simulate_cycle(params: &ModelParams, p: f64, q: f64, n: u32, settings: &SolverSettings) -> Result<SimProfits> {
    simulate_policy(
        params,
        p,
        q,
        n,
        ContractTerms::plain(params),
        settings,
        SimMode::ClosedForm,
    )
}

/// Replays the centralized policy under the sharing contract with revenue share `mu`.
pub fn simulate_contract(
    params: &ModelParams,
    cen: &CentralizedSolution,
    mu: f64,
    settings: &SolverSettings,
) -> Result<SimProfits> {
    let terms = ContractTerms {
        mu,
        wholesale: discounted_wholesale(params, cen, mu),
    };
    simulate_policy(
        params,
        cen.p_dstar,
        cen.q_dstar,
        cen.n_dstar,
        terms,
        settings,
        SimMode::ClosedForm,
    )
}
