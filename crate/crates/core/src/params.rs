//! Exogenous model constants, solver settings and their validation.
//!
//! The JSON config uses the ASCII spellings of the usual notation:
//!
//! ```text
//! { "alpha": 1200, "beta": 8, "lambda": 9, "b": 0.1, "theta": 0.15, "k": 0.6,
//!   "R": 1600, "v": 45, "m": 10, "A_r": 250, "A_m": 500, "h_r": 10, "h_m": 5,
//!   "xi": 0.4 }
//! ```
//!
//! Unknown keys are rejected.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Demand, cost, rate and bargaining constants of the two-echelon chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Market potential scale.
    pub alpha: f64,
    /// Price sensitivity of demand.
    pub beta: f64,
    /// Consumer social awareness: demand gained per unit of donation.
    #[serde(rename = "lambda")]
    pub lambda_csa: f64,
    /// Elasticity of demand with respect to the displayed stock.
    pub b: f64,
    /// Fraction of the retail price donated per unit sold.
    pub theta: f64,
    /// Reorder point as a fraction of the order quantity.
    pub k: f64,
    /// Manufacturer production rate.
    #[serde(rename = "R")]
    pub production_rate: f64,
    /// Wholesale price.
    pub v: f64,
    /// Unit production cost.
    pub m: f64,
    /// Retailer ordering cost per order.
    #[serde(rename = "A_r")]
    pub order_cost: f64,
    /// Manufacturer setup cost per production run.
    #[serde(rename = "A_m")]
    pub setup_cost: f64,
    /// Retailer holding cost per unit per unit time.
    pub h_r: f64,
    /// Manufacturer holding cost per unit per unit time.
    pub h_m: f64,
    /// Retailer bargaining power.
    pub xi: f64,
}

impl ModelParams {
    /// β − λθ, the net price sensitivity once the donation is announced.
    pub fn net_price_sensitivity(&self) -> f64 {
        self.beta - self.lambda_csa * self.theta
    }

    /// α/(β − λθ): the price at which demand vanishes.
    pub fn price_ceiling(&self) -> f64 {
        self.alpha / self.net_price_sensitivity()
    }

    /// 1 − k^(1−b), a factor shared by every cycle-length expression.
    pub(crate) fn cycle_factor(&self) -> f64 {
        1.0 - self.k.powf(1.0 - self.b)
    }

    /// Retailer holding coefficient (1−b)(1−k^(2−b))h_r / ((2−b)(1−k^(1−b))).
    pub(crate) fn retailer_holding_coeff(&self) -> f64 {
        let b = self.b;
        (1.0 - b) * (1.0 - self.k.powf(2.0 - b)) * self.h_r / ((2.0 - b) * self.cycle_factor())
    }

    /// Copy of these parameters with a different donation fraction.
    pub fn with_theta(&self, theta: f64) -> Self {
        ModelParams { theta, ..*self }
    }

    pub fn get(&self, field: ParamField) -> f64 {
        match field {
            ParamField::Alpha => self.alpha,
            ParamField::Beta => self.beta,
            ParamField::Lambda => self.lambda_csa,
            ParamField::B => self.b,
            ParamField::Theta => self.theta,
            ParamField::K => self.k,
            ParamField::R => self.production_rate,
            ParamField::V => self.v,
            ParamField::M => self.m,
            ParamField::ArCost => self.order_cost,
            ParamField::AmCost => self.setup_cost,
            ParamField::Hr => self.h_r,
            ParamField::Hm => self.h_m,
            ParamField::Xi => self.xi,
        }
    }

    pub fn with(&self, field: ParamField, value: f64) -> Self {
        let mut out = *self;
        let slot = match field {
            ParamField::Alpha => &mut out.alpha,
            ParamField::Beta => &mut out.beta,
            ParamField::Lambda => &mut out.lambda_csa,
            ParamField::B => &mut out.b,
            ParamField::Theta => &mut out.theta,
            ParamField::K => &mut out.k,
            ParamField::R => &mut out.production_rate,
            ParamField::V => &mut out.v,
            ParamField::M => &mut out.m,
            ParamField::ArCost => &mut out.order_cost,
            ParamField::AmCost => &mut out.setup_cost,
            ParamField::Hr => &mut out.h_r,
            ParamField::Hm => &mut out.h_m,
            ParamField::Xi => &mut out.xi,
        };
        *slot = value;
        out
    }

    /// Parses a JSON config and validates it.
    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        let params: ModelParams = serde_json::from_str(text).map_err(|e| Error::Parse {
            origin: origin.to_string(),
            message: e.to_string(),
        })?;
        validate(&params).into_result()?;
        Ok(params)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct of floats serializes")
    }
}

/// Reads and validates a JSON parameter file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ModelParams> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ModelParams::from_json_str(&text, &path.display().to_string())
}

/// One field of [`ModelParams`], addressable by its config-file key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamField {
    Alpha,
    Beta,
    Lambda,
    B,
    Theta,
    K,
    R,
    V,
    M,
    ArCost,
    AmCost,
    Hr,
    Hm,
    Xi,
}

impl ParamField {
    pub const ALL: [ParamField; 14] = [
        ParamField::Alpha,
        ParamField::Beta,
        ParamField::Lambda,
        ParamField::B,
        ParamField::Theta,
        ParamField::K,
        ParamField::R,
        ParamField::V,
        ParamField::M,
        ParamField::ArCost,
        ParamField::AmCost,
        ParamField::Hr,
        ParamField::Hm,
        ParamField::Xi,
    ];

    /// Key used in config files and CSV headers.
    pub fn key(self) -> &'static str {
        match self {
            ParamField::Alpha => "alpha",
            ParamField::Beta => "beta",
            ParamField::Lambda => "lambda",
            ParamField::B => "b",
            ParamField::Theta => "theta",
            ParamField::K => "k",
            ParamField::R => "R",
            ParamField::V => "v",
            ParamField::M => "m",
            ParamField::ArCost => "A_r",
            ParamField::AmCost => "A_m",
            ParamField::Hr => "h_r",
            ParamField::Hm => "h_m",
            ParamField::Xi => "xi",
        }
    }
}

impl fmt::Display for ParamField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ParamField {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ParamField::ALL.iter().copied().find(|f| f.key() == s).ok_or_else(|| {
            let names: Vec<_> = ParamField::ALL.iter().map(|f| f.key()).collect();
            format!("unknown parameter `{s}`; valid fields: {}", names.join(", "))
        })
    }
}

/// Numerical knobs shared by the solvers and the simulation oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Relative tolerance for bracketed root finding.
    pub root_tol_rel: f64,
    /// Relative tolerance for fixed-point and consistency checks.
    pub fp_tol_rel: f64,
    pub max_root_iters: usize,
    /// Safety cap on the shipment-count search.
    pub max_n: u32,
    /// Quadrature intervals per simulated cycle.
    pub sim_steps_per_cycle: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            root_tol_rel: 1e-10,
            fp_tol_rel: 1e-9,
            max_root_iters: 200,
            max_n: 64,
            sim_steps_per_cycle: 100_000,
        }
    }
}

impl SolverSettings {
    pub fn check(&self) -> Result<()> {
        if !(self.root_tol_rel > 0.0) || !(self.fp_tol_rel > 0.0) {
            return Err(Error::Settings("tolerances must be positive".into()));
        }
        if self.max_root_iters < 1 || self.max_n < 1 || self.sim_steps_per_cycle < 1 {
            return Err(Error::Settings("iteration caps must be at least 1".into()));
        }
        Ok(())
    }
}

/// A single failed parameter condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Field the condition is attached to (config-file key).
    pub field: String,
    /// The condition, e.g. `0 < b < 1`.
    pub condition: String,
    /// The offending values.
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} violated ({})", self.field, self.condition, self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::Invalid(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks every domain condition on the parameters. Pure; never fails.
pub fn validate(params: &ModelParams) -> ValidationReport {
    let mut violations = Vec::new();
    let mut fail = |field: &str, condition: &str, detail: String| {
        violations.push(Violation {
            field: field.to_string(),
            condition: condition.to_string(),
            detail,
        })
    };

    for field in ParamField::ALL {
        let value = params.get(field);
        if !value.is_finite() {
            fail(field.key(), "finite value", format!("{} = {value}", field.key()));
        }
    }

    let positive = [
        ParamField::Alpha,
        ParamField::Beta,
        ParamField::Lambda,
        ParamField::R,
        ParamField::ArCost,
        ParamField::AmCost,
        ParamField::Hr,
        ParamField::Hm,
    ];
    for field in positive {
        let value = params.get(field);
        if !(value > 0.0) {
            fail(
                field.key(),
                &format!("{} > 0", field.key()),
                format!("{} = {value}", field.key()),
            );
        }
    }

    for field in [ParamField::B, ParamField::K, ParamField::Xi] {
        let value = params.get(field);
        if !(value > 0.0 && value < 1.0) {
            fail(
                field.key(),
                &format!("0 < {} < 1", field.key()),
                format!("{} = {value}", field.key()),
            );
        }
    }

    let ratio = params.beta / params.lambda_csa;
    if !(ratio < 1.0) {
        fail(
            "lambda",
            "beta/lambda < 1",
            format!("beta/lambda = {}/{} = {ratio}", params.beta, params.lambda_csa),
        );
    }
    if !(params.theta >= 0.0) {
        fail("theta", "0 <= theta", format!("theta = {}", params.theta));
    } else if !(params.theta < ratio) {
        fail(
            "theta",
            "theta < beta/lambda",
            format!("theta = {} >= beta/lambda = {ratio}", params.theta),
        );
    }

    if !(params.m < params.v) {
        fail("m", "m < v", format!("m = {} >= v = {}", params.m, params.v));
    }
    let net = params.net_price_sensitivity();
    if net > 0.0 {
        let ceiling = params.price_ceiling();
        if !(params.v < ceiling) {
            fail(
                "v",
                "v < alpha/(beta - lambda*theta)",
                format!("v = {} >= {ceiling}", params.v),
            );
        }
    }

    ValidationReport { violations }
}

/// The five benchmark parameter sets used throughout the tests and the CLI.
pub fn benchmark_problems() -> [ModelParams; 5] {
    #[allow(clippy::too_many_arguments)]
    fn p(
        alpha: f64,
        (beta, b, lambda_csa): (f64, f64, f64),
        theta: f64,
        k: f64,
        production_rate: f64,
        (v, m): (f64, f64),
        (order_cost, setup_cost): (f64, f64),
        (h_r, h_m): (f64, f64),
        xi: f64,
    ) -> ModelParams {
        ModelParams {
            alpha,
            beta,
            lambda_csa,
            b,
            theta,
            k,
            production_rate,
            v,
            m,
            order_cost,
            setup_cost,
            h_r,
            h_m,
            xi,
        }
    }
    [
        p(
            1200.0,
            (8.0, 0.1, 9.0),
            0.15,
            0.6,
            1600.0,
            (45.0, 10.0),
            (250.0, 500.0),
            (10.0, 5.0),
            0.4,
        ),
        p(
            900.0,
            (12.0, 0.2, 15.0),
            0.2,
            0.4,
            6500.0,
            (40.0, 25.0),
            (100.0, 250.0),
            (12.0, 7.0),
            0.5,
        ),
        p(
            1600.0,
            (14.0, 0.2, 16.0),
            0.2,
            0.5,
            2100.0,
            (70.0, 30.0),
            (300.0, 450.0),
            (15.0, 6.0),
            0.6,
        ),
        p(
            500.0,
            (10.0, 0.3, 14.0),
            0.3,
            0.5,
            5000.0,
            (50.0, 20.0),
            (150.0, 300.0),
            (9.0, 4.0),
            0.5,
        ),
        p(
            2500.0,
            (15.0, 0.1, 18.0),
            0.15,
            0.6,
            8000.0,
            (50.0, 15.0),
            (200.0, 400.0),
            (20.0, 10.0),
            0.4,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem1() -> ModelParams {
        benchmark_problems()[0]
    }

    #[test]
    fn benchmark_problems_validate() {
        for params in benchmark_problems() {
            assert!(validate(&params).is_ok(), "{}", validate(&params));
        }
    }

    #[test]
    fn theta_above_ratio_is_rejected() {
        let report = validate(&problem1().with_theta(0.95));
        assert!(!report.is_ok());
        assert!(report.violations.iter().any(|v| v.condition == "theta < beta/lambda"));
    }

    #[test]
    fn wholesale_above_ceiling_is_rejected() {
        // 1200 / (8 - 9 * 0.15) = 180.45...
        let params = ModelParams { v: 200.0, ..problem1() };
        let report = validate(&params);
        let hit = report
            .violations
            .iter()
            .find(|v| v.field == "v")
            .expect("v bound flagged");
        assert!(hit.detail.contains("180.45"), "{}", hit.detail);
    }

    #[test]
    fn validate_is_pure() {
        let params = ModelParams {
            b: 1.0,
            k: 0.0,
            ..problem1()
        };
        assert_eq!(validate(&params), validate(&params));
        assert_eq!(validate(&params).violations.len(), 2);
    }

    #[test]
    fn accepted_params_have_positive_net_sensitivity() {
        for params in benchmark_problems() {
            assert!(params.net_price_sensitivity() > 0.0);
        }
    }

    #[test]
    fn json_keys_follow_config_spelling() {
        let json = problem1().to_json_pretty();
        for field in ParamField::ALL {
            assert!(json.contains(&format!("\"{}\"", field.key())), "missing {field}");
        }
        let back = ModelParams::from_json_str(&json, "roundtrip").unwrap();
        assert_eq!(back, problem1());
    }

    #[test]
    fn unknown_and_empty_configs_fail_to_parse() {
        assert!(matches!(
            ModelParams::from_json_str("", "empty"),
            Err(Error::Parse { .. })
        ));
        let mut value: serde_json::Value = serde_json::from_str(&problem1().to_json_pretty()).unwrap();
        value["lamda"] = serde_json::json!(9.0);
        let err = ModelParams::from_json_str(&value.to_string(), "typo").unwrap_err();
        assert!(err.to_string().contains("lamda"), "{err}");
    }

    #[test]
    fn field_names_parse() {
        assert_eq!("A_r".parse::<ParamField>().unwrap(), ParamField::ArCost);
        let err = "bogus".parse::<ParamField>().unwrap_err();
        assert!(err.contains("theta") && err.contains("xi"));
    }

    #[test]
    fn settings_defaults() {
        let s = SolverSettings::default();
        assert_eq!(s.max_n, 64);
        assert_eq!(s.sim_steps_per_cycle, 100_000);
        s.check().unwrap();
        assert!(SolverSettings { root_tol_rel: 0.0, ..s }.check().is_err());
    }
}
