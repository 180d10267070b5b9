//! Self-checks run against one parameter set: first-order conditions,
//! contract identities, simulation agreement and the donation-free reduction.

use serde::{Deserialize, Serialize};

use crate::blocked;
use crate::centralized::{
    self, centralized_price_given_q, chain_profit, chain_profit_of_q, chain_profit_of_q_weight3, solve_q_given_n,
    weight3_maximizer, CentralizedSolution,
};
use crate::coordination::{self, coordinated_profits, ContractOutcome};
use crate::decentralized::{
    self, retailer_price_given_q, retailer_profit_of_q, retailer_profit_per_cycle, DecentralizedSolution,
};
use crate::kinetics::holding_integral;
use crate::oracle::{simulate_contract, simulate_cycle, SimProfits};
use crate::params::{validate, ModelParams, SolverSettings};
use crate::{solve_all, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Measured residual; for ratio checks the measured ratio.
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Largest relative gap between simulated and closed-form profit rates.
    pub fn max_oracle_delta(&self) -> Option<f64> {
        self.checks
            .iter()
            .filter(|c| c.name.starts_with("oracle"))
            .map(|c| c.residual)
            .reduce(f64::max)
    }

    fn at_most(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            detail: String::new(),
        });
    }

    fn at_least(&mut self, name: impl Into<String>, value: f64, floor: f64) {
        self.checks.push(Check {
            name: name.into(),
            residual: value,
            tolerance: floor,
            passed: value >= floor,
            detail: String::new(),
        });
    }

    fn failure(&mut self, name: impl Into<String>, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            residual: f64::NAN,
            tolerance: 0.0,
            passed: false,
            detail,
        });
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            residual: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            passed: ok,
            detail,
        });
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `x·f'(x)/|f(x)|` by central differences with relative step `1e−5`.
pub fn relative_slope(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-5;
    let d = (f(x * (1.0 + h)) - f(x * (1.0 - h))) / (2.0 * h);
    (d / f(x).abs()).abs()
}

/// Shipment count in `1..=20` with the highest value; errors rank last.
fn argmax_n(f: impl Fn(u32) -> Option<f64>) -> Option<u32> {
    (1..=20)
        .filter_map(|n| f(n).map(|v| (n, v)))
        .fold(None, |best: Option<(u32, f64)>, (n, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((n, v)),
        })
        .map(|(n, _)| n)
}

/// Warnings about inputs close to where the closed forms lose precision.
pub fn conditioning_warnings(params: &ModelParams) -> Vec<String> {
    let mut out = Vec::new();
    if params.b > 0.999 {
        out.push(format!(
            "b = {} is within 1e-3 of 1: the (1 - b) denominators are near-singular",
            params.b
        ));
    }
    if params.k > 0.999 {
        out.push(format!(
            "k = {} is within 1e-3 of 1: cycle length and lot size vanish",
            params.k
        ));
    }
    let net = params.net_price_sensitivity();
    if net > 0.0 && net < 1e-3 * params.beta {
        out.push(format!(
            "beta - lambda*theta = {net} is close to zero: the demand-zero price is huge"
        ));
    }
    out
}

fn stationarity(
    report: &mut VerificationReport,
    params: &ModelParams,
    dec: &DecentralizedSolution,
    cen: &CentralizedSolution,
) {
    let tol = 1e-6;
    report.at_most(
        "decentralized stationarity in Q",
        relative_slope(|q| retailer_profit_of_q(params, q), dec.q_star),
        tol,
    );
    report.at_most(
        "decentralized stationarity in p",
        relative_slope(
            |p| retailer_profit_per_cycle(params, p, dec.q_star).unwrap_or(f64::NAN),
            dec.p_star,
        ),
        tol,
    );
    report.at_most(
        "centralized stationarity in Q",
        relative_slope(|q| chain_profit_of_q(params, q, cen.n_dstar), cen.q_dstar),
        tol,
    );
    report.at_most(
        "centralized stationarity in p",
        relative_slope(
            |p| chain_profit(params, p, cen.q_dstar, cen.n_dstar).unwrap_or(f64::NAN),
            cen.p_dstar,
        ),
        tol,
    );
}

fn shipment_optimality(
    report: &mut VerificationReport,
    params: &ModelParams,
    settings: &SolverSettings,
    dec: &DecentralizedSolution,
    cen: &CentralizedSolution,
) {
    let best_dec = argmax_n(|n| decentralized::manufacturer_profit(params, dec.p_star, dec.q_star, n).ok());
    report.flag(
        "decentralized n is enumeration argmax",
        best_dec == Some(dec.n_star),
        format!("solver {} vs enumeration {:?}", dec.n_star, best_dec),
    );
    let best_cen = argmax_n(|n| solve_q_given_n(params, n, settings).ok().map(|s| s.2));
    report.flag(
        "centralized n is enumeration argmax",
        best_cen == Some(cen.n_dstar),
        format!("solver {} vs enumeration {:?}", cen.n_dstar, best_cen),
    );
    report.flag(
        "centralized chain profit exceeds decentralized",
        cen.profit_chain_c > dec.profit_chain,
        format!("{} vs {}", cen.profit_chain_c, dec.profit_chain),
    );
}

fn contract_identities(
    report: &mut VerificationReport,
    params: &ModelParams,
    dec: &DecentralizedSolution,
    cen: &CentralizedSolution,
    out: &ContractOutcome,
) -> Result<()> {
    report.at_most(
        "coordinated chain profit equals centralized",
        rel(out.profit_retailer_co + out.profit_manufacturer_co, cen.profit_chain_c),
        1e-9,
    );
    let (r_lo, _) = coordinated_profits(params, cen, out.mu_lower)?;
    let (_, m_hi) = coordinated_profits(params, cen, out.mu_upper)?;
    report.at_most(
        "retailer participation binds at mu_lower",
        rel(r_lo, dec.profit_retailer),
        1e-8,
    );
    report.at_most(
        "manufacturer participation binds at mu_upper",
        rel(m_hi, dec.profit_manufacturer),
        1e-8,
    );
    report.at_most("bargained share reproduces surplus split", out.split_residual, 1e-6);
    Ok(())
}

fn oracle_pairs(sim: &SimProfits, retailer: f64, manufacturer: f64) -> [(&'static str, f64); 3] {
    [
        ("retailer", rel(sim.retailer_rate, retailer)),
        ("manufacturer", rel(sim.manufacturer_rate, manufacturer)),
        ("chain", rel(sim.chain_rate, retailer + manufacturer)),
    ]
}

fn oracle_agreement(
    report: &mut VerificationReport,
    params: &ModelParams,
    settings: &SolverSettings,
    dec: &DecentralizedSolution,
    cen: &CentralizedSolution,
    out: &ContractOutcome,
) -> Result<()> {
    let tol = 1e-3;
    let sim = simulate_cycle(params, dec.p_star, dec.q_star, dec.n_star, settings)?;
    for (who, gap) in oracle_pairs(&sim, dec.profit_retailer, dec.profit_manufacturer) {
        report.at_most(format!("oracle decentralized {who}"), gap, tol);
    }
    let sim = simulate_cycle(params, cen.p_dstar, cen.q_dstar, cen.n_dstar, settings)?;
    for (who, gap) in oracle_pairs(&sim, cen.profit_retailer_c, cen.profit_manufacturer_c) {
        report.at_most(format!("oracle centralized {who}"), gap, tol);
    }
    let sim = simulate_contract(params, cen, out.mu_bargain, settings)?;
    for (who, gap) in oracle_pairs(&sim, out.profit_retailer_co, out.profit_manufacturer_co) {
        report.at_most(format!("oracle coordinated {who}"), gap, tol);
    }

    let coarse = SolverSettings {
        sim_steps_per_cycle: 16,
        ..*settings
    };
    let fine = SolverSettings {
        sim_steps_per_cycle: 32,
        ..*settings
    };
    let exact = holding_integral(params, dec.p_star, dec.q_star)?;
    let e16 = (simulate_cycle(params, dec.p_star, dec.q_star, 1, &coarse)?.retailer_holding_area - exact).abs();
    let e32 = (simulate_cycle(params, dec.p_star, dec.q_star, 1, &fine)?.retailer_holding_area - exact).abs();
    let ratio = if e32 == 0.0 { f64::INFINITY } else { e16 / e32 };
    report.at_least("quadrature error ratio on step halving", ratio, 4.0);
    Ok(())
}

fn reduction(report: &mut VerificationReport, params: &ModelParams, settings: &SolverSettings) -> Result<()> {
    let bp = blocked::blocked_params(params);
    let validation = validate(&bp);
    if !validation.is_ok() {
        report.warnings.push(format!(
            "theta = 0 reduction skipped: donation-free chain is invalid ({validation})"
        ));
        return Ok(());
    }
    let dec = blocked::solve_blocked_decentralized(params, settings)?;
    let cen = blocked::solve_blocked_centralized(params, settings)?;
    let main_dec = decentralized::solve_decentralized(&bp, settings)?;
    let main_cen = centralized::solve_centralized(&bp, settings)?;
    let field_gap = [
        rel(dec.p_star, main_dec.p_star),
        rel(dec.q_star, main_dec.q_star),
        rel(dec.profit_chain, main_dec.profit_chain),
        rel(cen.p_dstar, main_cen.p_dstar),
        rel(cen.q_dstar, main_cen.q_dstar),
        rel(cen.profit_chain_c, main_cen.profit_chain_c),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    report.at_most("theta = 0 reduction matches blocked solvers", field_gap, 1e-10);

    let (q, p) = (dec.q_star, dec.p_star);
    let (qc, pc, nc) = (cen.q_dstar, cen.p_dstar, cen.n_dstar);
    let written = [
        rel(blocked::retailer_price(&bp, q), retailer_price_given_q(&bp, q)),
        rel(blocked::retailer_profit(&bp, p, q), dec.profit_retailer),
        rel(
            blocked::manufacturer_profit(&bp, p, q, dec.n_star),
            dec.profit_manufacturer,
        ),
        dec.n_decimal
            .map_or(0.0, |nd| rel(blocked::shipments_decimal(&bp, p, q), nd)),
        rel(
            blocked::chain_price(&bp, qc, nc),
            centralized_price_given_q(&bp, qc, nc),
        ),
        rel(blocked::chain_profit(&bp, pc, qc, nc), cen.profit_chain_c),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    report.at_most("donation-free closed forms match general forms", written, 1e-8);
    Ok(())
}

/// Gaps between alternative written forms and the forms the solvers use.
fn written_form_warnings(
    params: &ModelParams,
    settings: &SolverSettings,
    dec: &DecentralizedSolution,
    cen: &CentralizedSolution,
    out: &ContractOutcome,
) -> Vec<String> {
    let mut warnings = Vec::new();
    let (q, n) = (cen.q_dstar, cen.n_dstar);
    let gap = rel(chain_profit_of_q_weight3(params, q, n), chain_profit_of_q(params, q, n));
    if gap > 1e-8 {
        let q3 = weight3_maximizer(params, n, q);
        warnings.push(format!(
            "reduced chain profit with weight 3/(1-theta) on the squared cost term differs by {:.3e} relative at Q = {q:.4}; its maximizer is Q = {q3:.4}",
            gap
        ));
    }
    let upper = coordination::mu_upper_written_form(params, dec, cen);
    let gap = (upper - out.mu_upper).abs();
    if gap > 0.01 * out.mu_upper.abs() {
        warnings.push(format!(
            "expanded mu_upper form gives {upper:.6}, participation bound is {:.6}",
            out.mu_upper
        ));
    }
    if let (Ok(bd), Ok(bc)) = (
        blocked::solve_blocked_decentralized(params, settings),
        blocked::solve_blocked_centralized(params, settings),
    ) {
        let bp = blocked::blocked_params(params);
        let gap = rel(
            blocked::chain_profit_of_q_written(&bp, bc.q_dstar, bc.n_dstar),
            chain_profit_of_q(&bp, bc.q_dstar, bc.n_dstar),
        );
        if gap > 1e-8 {
            warnings.push(format!(
                "donation-free completed-square chain profit differs by {gap:.3e} relative at n = {}",
                bc.n_dstar
            ));
        }
        if let Ok(bo) = coordination::coordinate(&bp, &bd, &bc) {
            let written = blocked::mu_bargain_written(&bp, &bd, &bc);
            if (written - bo.mu_bargain).abs() > 1e-6 {
                warnings.push(format!(
                    "donation-free written bargained share is {written:.6}, surplus split gives {:.6}",
                    bo.mu_bargain
                ));
            }
        }
    }
    warnings
}

/// Runs every check for `params`. Solver failures become failed checks.
pub fn verify(params: &ModelParams, settings: &SolverSettings) -> VerificationReport {
    let mut report = VerificationReport {
        warnings: conditioning_warnings(params),
        ..Default::default()
    };
    let validation = validate(params);
    if !validation.is_ok() {
        report.failure("parameters valid", validation.to_string());
        return report;
    }
    let solved = match solve_all(params, settings) {
        Ok(s) => s,
        Err(e) => {
            report.failure("solve all systems", e.to_string());
            return report;
        }
    };
    let (dec, cen, out) = (&solved.decentralized, &solved.centralized, &solved.coordinated);
    report
        .warnings
        .extend(dec.warnings.iter().map(|w| format!("decentralized: {w}")));
    report
        .warnings
        .extend(cen.warnings.iter().map(|w| format!("centralized: {w}")));
    if out.deep_discount {
        report
            .warnings
            .push(format!("discounted wholesale price is negative ({:.4})", out.v_co));
    }

    stationarity(&mut report, params, dec, cen);
    shipment_optimality(&mut report, params, settings, dec, cen);
    if let Err(e) = contract_identities(&mut report, params, dec, cen, out) {
        report.failure("contract identities", e.to_string());
    }
    if let Err(e) = oracle_agreement(&mut report, params, settings, dec, cen, out) {
        report.failure("oracle replay", e.to_string());
    }
    if let Err(e) = reduction(&mut report, params, settings) {
        report.failure("theta = 0 reduction", e.to_string());
    }
    report
        .warnings
        .extend(written_form_warnings(params, settings, dec, cen, out));
    report
}
