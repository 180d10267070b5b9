use std::fmt::Write as _;

use serde::Serialize;

use chaincoord::blocked::ComparisonReport;
use chaincoord::oracle::{simulate_contract, simulate_cycle};
use chaincoord::verify::VerificationReport;
use chaincoord::{ModelParams, Result, SolverSettings, SystemSolutions};

/// Relative gap between a replayed and a closed-form profit rate.
#[derive(Clone, Debug, Serialize)]
pub struct OracleDelta {
    pub system: &'static str,
    pub member: &'static str,
    pub relative_gap: f64,
}

/// Everything `solve` reports for one parameter set.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub label: String,
    pub blocked: bool,
    pub params: ModelParams,
    #[serde(flatten)]
    pub solutions: SystemSolutions,
    /// Present in blocked runs: the same chain with and without donations.
    pub comparison: Option<ComparisonReport>,
    pub oracle_deltas: Vec<OracleDelta>,
    pub warnings: Vec<String>,
}

fn gap(sim: f64, closed: f64) -> f64 {
    (sim - closed).abs() / closed.abs()
}

pub fn oracle_deltas(params: &ModelParams, s: &SystemSolutions, settings: &SolverSettings) -> Result<Vec<OracleDelta>> {
    let d = &s.decentralized;
    let c = &s.centralized;
    let o = &s.coordinated;
    let sim_d = simulate_cycle(params, d.p_star, d.q_star, d.n_star, settings)?;
    let sim_c = simulate_cycle(params, c.p_dstar, c.q_dstar, c.n_dstar, settings)?;
    let sim_o = simulate_contract(params, c, o.mu_bargain, settings)?;
    let rows = [
        ("decentralized", "retailer", sim_d.retailer_rate, d.profit_retailer),
        (
            "decentralized",
            "manufacturer",
            sim_d.manufacturer_rate,
            d.profit_manufacturer,
        ),
        ("decentralized", "chain", sim_d.chain_rate, d.profit_chain),
        ("centralized", "retailer", sim_c.retailer_rate, c.profit_retailer_c),
        (
            "centralized",
            "manufacturer",
            sim_c.manufacturer_rate,
            c.profit_manufacturer_c,
        ),
        ("centralized", "chain", sim_c.chain_rate, c.profit_chain_c),
        ("coordinated", "retailer", sim_o.retailer_rate, o.profit_retailer_co),
        (
            "coordinated",
            "manufacturer",
            sim_o.manufacturer_rate,
            o.profit_manufacturer_co,
        ),
        ("coordinated", "chain", sim_o.chain_rate, o.profit_chain_co),
    ];
    Ok(rows
        .into_iter()
        .map(|(system, member, sim, closed)| OracleDelta {
            system,
            member,
            relative_gap: gap(sim, closed),
        })
        .collect())
}

impl RunReport {
    /// Fixed-precision text in the row order of the results table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let d = &self.solutions.decentralized;
        let c = &self.solutions.centralized;
        let o = &self.solutions.coordinated;
        let kind = if self.blocked {
            "without donation"
        } else {
            "with donation"
        };
        let _ = writeln!(out, "== {} ({kind}) ==", self.label);

        let mut row = |name: &str, value: String| {
            if value.is_empty() {
                let _ = writeln!(out, "  {name}");
            } else {
                let _ = writeln!(out, "  {name:<16}{value:>16}");
            }
        };
        let n_dec = match d.n_decimal {
            Some(nd) => format!("[{nd:.2}] = {}", d.n_star),
            None => d.n_star.to_string(),
        };

        row("Decentralized", String::new());
        row("Q*", format!("{:.3}", d.q_star));
        row("p*", format!("{:.2}", d.p_star));
        row("n*", n_dec);
        row("Pi_r/d", format!("{:.2}", d.profit_retailer));
        row("Pi_m/d", format!("{:.2}", d.profit_manufacturer));
        row("Pi_sc/d", format!("{:.2}", d.profit_chain));
        row("Centralized", String::new());
        row("Q**", format!("{:.3}", c.q_dstar));
        row("p**", format!("{:.2}", c.p_dstar));
        row("n**", c.n_dstar.to_string());
        row("Pi_r/c", format!("{:.2}", c.profit_retailer_c));
        row("Pi_m/c", format!("{:.2}", c.profit_manufacturer_c));
        row("Pi_sc/c", format!("{:.2}", c.profit_chain_c));
        row("Coordinated", String::new());
        row("Q**", format!("{:.3}", c.q_dstar));
        row("p**", format!("{:.2}", c.p_dstar));
        row("n**", c.n_dstar.to_string());
        row("mu_lower", format!("{:.3}", o.mu_lower));
        row("mu_upper", format!("{:.3}", o.mu_upper));
        row("mu_B", format!("{:.3}", o.mu_bargain));
        row("v_co", format!("{:.2}", o.v_co));
        row("d(%)", format!("{:.2}", o.discount_rate * 100.0));
        row("Pi_r/co", format!("{:.2}", o.profit_retailer_co));
        row("Pi_m/co", format!("{:.2}", o.profit_manufacturer_co));
        row("Pi_sc/co", format!("{:.2}", o.profit_chain_co));
        row("Savings (%)", String::new());
        row("Retailer", format!("{:.2}", o.savings_retailer));
        row("Manufacturer", format!("{:.2}", o.savings_manufacturer));
        row("SC", format!("{:.2}", o.savings_chain));

        if let Some(cmp) = &self.comparison {
            let _ = writeln!(out, "  With vs without donation (coordinated chain)");
            let _ = writeln!(
                out,
                "    profit {:.2} vs {:.2}, uplift {:.2}%",
                cmp.profit_joint, cmp.profit_blocked, cmp.uplift_percent
            );
            let _ = writeln!(
                out,
                "    price {:.2} vs {:.2}, order quantity {:.3} vs {:.3}",
                cmp.price_joint, cmp.price_blocked, cmp.quantity_joint, cmp.quantity_blocked
            );
        }
        let worst = self.oracle_deltas.iter().map(|d| d.relative_gap).fold(0.0, f64::max);
        let _ = writeln!(out, "  max oracle gap  {worst:.3e}");
        for w in &self.warnings {
            let _ = writeln!(out, "  warning: {w}");
        }
        out
    }
}

pub fn verification_text(label: &str, report: &VerificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "== verify {label} ==");
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = write!(
            out,
            "  {status} {:<48} measured {:.3e} limit {:.1e}",
            c.name, c.residual, c.tolerance
        );
        if !c.detail.is_empty() && !c.passed {
            let _ = write!(out, " ({})", c.detail);
        }
        out.push('\n');
    }
    if let Some(delta) = report.max_oracle_delta() {
        let _ = writeln!(out, "  max oracle delta {delta:.3e}");
    }
    for w in &report.warnings {
        let _ = writeln!(out, "  warning: {w}");
    }
    out
}
