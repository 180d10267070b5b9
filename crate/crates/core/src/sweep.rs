//! One-parameter sensitivity sweeps across all three decision systems.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centralized::{solve_centralized, CentralizedSolution};
use crate::coordination::{coordinate, ContractOutcome};
use crate::decentralized::{solve_decentralized, DecentralizedSolution};
use crate::error::{Error, Result};
use crate::params::{validate, ModelParams, ParamField, SolverSettings};
use crate::root::bisect;

/// Token written to CSV cells that have no value.
pub const NA: &str = "NA";

/// Results at one grid point. Systems that could not be solved are `None`
/// and the first failure is kept in `error`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub decentralized: Option<DecentralizedSolution>,
    pub centralized: Option<CentralizedSolution>,
    pub coordinated: Option<ContractOutcome>,
    /// Participation bounds, also kept when they are inverted.
    pub mu_bounds: Option<(f64, f64)>,
    pub error: Option<String>,
}

impl SweepRow {
    fn solve(params: &ModelParams, value: f64, settings: &SolverSettings) -> Self {
        let mut row = SweepRow {
            value,
            decentralized: None,
            centralized: None,
            coordinated: None,
            mu_bounds: None,
            error: None,
        };
        if let Err(e) = validate(params).into_result() {
            row.error = Some(e.to_string());
            return row;
        }
        let dec = solve_decentralized(params, settings);
        let cen = solve_centralized(params, settings);
        match (&dec, &cen) {
            (Ok(d), Ok(c)) => match coordinate(params, d, c) {
                Ok(out) => {
                    row.mu_bounds = Some((out.mu_lower, out.mu_upper));
                    row.coordinated = Some(out);
                }
                Err(Error::InfeasibleContract { lower, upper }) => {
                    row.mu_bounds = Some((lower, upper));
                    row.error = Some(Error::InfeasibleContract { lower, upper }.to_string());
                }
                Err(e) => row.error = Some(e.to_string()),
            },
            (Err(e), _) | (_, Err(e)) => row.error = Some(e.to_string()),
        }
        row.decentralized = dec.ok();
        row.centralized = cen.ok();
        row
    }

    /// True when the sharing contract exists at this point.
    pub fn feasible(&self) -> bool {
        self.coordinated.is_some()
    }

    /// True when the manufacturer loses money even under the contract.
    pub fn manufacturer_loss(&self) -> bool {
        self.coordinated
            .as_ref()
            .is_some_and(|c| c.profit_manufacturer_co < 0.0)
    }

    fn status(&self) -> &'static str {
        match (&self.error, self.feasible()) {
            (None, _) => "ok",
            (Some(_), false) if self.mu_bounds.is_some() => "infeasible_contract",
            _ => "failed",
        }
    }
}

/// `steps` evenly spaced points from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || !(from < to) {
        return Err(Error::Domain(format!(
            "grid needs from < to and at least 2 steps (got {from}..{to}, {steps})"
        )));
    }
    let span = to - from;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                to
            } else {
                from + span * i as f64 / (steps - 1) as f64
            }
        })
        .collect())
}

/// Solves all three systems at every grid value of `field`. Rows come back
/// in grid order; per-row failures are recorded in the row.
pub fn sweep_param(
    params: &ModelParams,
    field: ParamField,
    grid: &[f64],
    settings: &SolverSettings,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Domain("sweep grid is empty".into()));
    }
    settings.check()?;
    Ok(grid
        .par_iter()
        .map(|&value| SweepRow::solve(&params.with(field, value), value, settings))
        .collect())
}

pub fn sweep_theta(params: &ModelParams, grid: &[f64], settings: &SolverSettings) -> Result<Vec<SweepRow>> {
    sweep_param(params, ParamField::Theta, grid, settings)
}

/// Where the manufacturer's coordinated profit first turns negative as θ grows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Frontier {
    Crossing(f64),
    NoCrossing,
}

fn coordinated_manufacturer_profit(params: &ModelParams, theta: f64, settings: &SolverSettings) -> Option<f64> {
    SweepRow::solve(&params.with_theta(theta), theta, settings)
        .coordinated
        .map(|c| c.profit_manufacturer_co)
}

/// Scans θ over `[0, β/λ)` in steps of 0.01, then bisects the first sign
/// change of the manufacturer's coordinated profit.
pub fn manufacturer_feasibility_frontier(params: &ModelParams, settings: &SolverSettings) -> Result<Frontier> {
    validate(&params.with_theta(0.0)).into_result()?;
    let upper = (params.beta / params.lambda_csa).min(1.0);
    let grid: Vec<f64> = (0..).map(|i| f64::from(i) * 0.01).take_while(|&t| t < upper).collect();
    let values: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&t| coordinated_manufacturer_profit(params, t, settings))
        .collect();

    let mut last_positive: Option<f64> = None;
    for (&theta, value) in grid.iter().zip(&values) {
        match value {
            Some(v) if *v >= 0.0 => last_positive = Some(theta),
            Some(_) => {
                let Some(lo) = last_positive else {
                    return Ok(Frontier::Crossing(theta));
                };
                let root = bisect(
                    |t| {
                        coordinated_manufacturer_profit(params, t, settings)
                            .ok_or_else(|| Error::NoRoot(format!("no contract at theta = {t}")))
                    },
                    lo,
                    theta,
                    1e-9,
                    100,
                )?;
                return Ok(Frontier::Crossing(root));
            }
            None => {}
        }
    }
    Ok(Frontier::NoCrossing)
}

/// Formats `x` with 6 significant digits, dropping trailing zeros.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return NA.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn num(x: Option<f64>) -> String {
    x.map_or_else(|| NA.to_string(), format_sig6)
}

fn int(x: Option<u32>) -> String {
    x.map_or_else(|| NA.to_string(), |n| n.to_string())
}

pub fn csv_header(field: ParamField) -> Vec<String> {
    let mut cols = vec![field.key().to_string()];
    cols.extend(
        [
            "dec_p",
            "dec_Q",
            "dec_n",
            "dec_profit_retailer",
            "dec_profit_manufacturer",
            "dec_profit_chain",
            "cen_p",
            "cen_Q",
            "cen_n",
            "cen_profit_retailer",
            "cen_profit_manufacturer",
            "cen_profit_chain",
            "co_p",
            "co_Q",
            "co_n",
            "co_profit_retailer",
            "co_profit_manufacturer",
            "co_profit_chain",
            "mu_lower",
            "mu_upper",
            "mu_bargain",
            "v_co",
            "feasible",
            "manufacturer_loss",
            "status",
        ]
        .map(String::from),
    );
    cols
}

fn csv_record(row: &SweepRow) -> Vec<String> {
    let d = row.decentralized.as_ref();
    let c = row.centralized.as_ref();
    let co = row.coordinated.as_ref();
    let co_policy = co.and(c);
    vec![
        format_sig6(row.value),
        num(d.map(|d| d.p_star)),
        num(d.map(|d| d.q_star)),
        int(d.map(|d| d.n_star)),
        num(d.map(|d| d.profit_retailer)),
        num(d.map(|d| d.profit_manufacturer)),
        num(d.map(|d| d.profit_chain)),
        num(c.map(|c| c.p_dstar)),
        num(c.map(|c| c.q_dstar)),
        int(c.map(|c| c.n_dstar)),
        num(c.map(|c| c.profit_retailer_c)),
        num(c.map(|c| c.profit_manufacturer_c)),
        num(c.map(|c| c.profit_chain_c)),
        num(co_policy.map(|c| c.p_dstar)),
        num(co_policy.map(|c| c.q_dstar)),
        int(co_policy.map(|c| c.n_dstar)),
        num(co.map(|o| o.profit_retailer_co)),
        num(co.map(|o| o.profit_manufacturer_co)),
        num(co.map(|o| o.profit_chain_co)),
        num(row.mu_bounds.map(|b| b.0)),
        num(row.mu_bounds.map(|b| b.1)),
        num(co.map(|o| o.mu_bargain)),
        num(co.map(|o| o.v_co)),
        row.feasible().to_string(),
        row.manufacturer_loss().to_string(),
        row.status().to_string(),
    ]
}

/// Writes the sweep as CSV: a header row, then one row per grid point.
pub fn write_csv<W: Write>(rows: &[SweepRow], field: ParamField, out: W) -> Result<()> {
    let to_err = |e: csv::Error| Error::Domain(format!("csv write failed: {e}"));
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(csv_header(field)).map_err(to_err)?;
    for row in rows {
        writer.write_record(csv_record(row)).map_err(to_err)?;
    }
    writer
        .flush()
        .map_err(|e| Error::Domain(format!("csv write failed: {e}")))?;
    Ok(())
}

pub fn write_csv_file(rows: &[SweepRow], field: ParamField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(rows, field, std::io::BufWriter::new(file))
}
