//! Matrix-free tables: endpoint solves against their expansions, and
//! single-point `λ_N` predictions.

use hankel_core::asymptotics::{
    endpoint_expansion, lambda_prediction, solve_endpoints_exact, AsymptoticsError,
};
use hankel_core::moments::WeightParams;
use hankel_core::PrecisionContext;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::sweep::format_f64;

pub const ENDPOINT_DEFAULT_BITS: usize = 192;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndpointRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub hard_edge: bool,
    pub a_exact: Option<String>,
    pub b_exact: Option<String>,
    pub a_expansion: String,
    pub b_expansion: String,
    pub rel_diff_a: Option<String>,
    pub rel_diff_b: Option<String>,
    /// `a_exact / a_expansion`.
    pub ratio_a: Option<String>,
    pub newton_iterations: Option<usize>,
    pub error: Option<String>,
}

/// Numeric view of one row, for callers that test trends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointComparison {
    pub n: u64,
    pub exact: (f64, f64),
    pub expansion: (f64, f64),
    pub hard_edge: bool,
}

impl EndpointComparison {
    pub fn rel_diff_a(&self) -> f64 {
        rel(self.exact.0, self.expansion.0)
    }

    pub fn rel_diff_b(&self) -> f64 {
        rel(self.exact.1, self.expansion.1)
    }
}

fn rel(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / x.abs()
    }
}

pub fn compare_endpoints(p: &WeightParams, n: u64, bits: usize) -> Result<(EndpointComparison, usize), AsymptoticsError> {
    let e = endpoint_expansion(p, n, false)?;
    let ctx = PrecisionContext::new(bits, bits - 32)?;
    let (exact, hard_edge, iters) = match solve_endpoints_exact(p, n, &ctx) {
        Ok(s) => ((s.endpoints.a(), s.endpoints.b()), false, s.iterations),
        Err(AsymptoticsError::HardEdge { b }) => ((0.0, b), true, 0),
        Err(e) => return Err(e),
    };
    Ok((
        EndpointComparison {
            n,
            exact,
            expansion: (e.a_n, e.b_n),
            hard_edge,
        },
        iters,
    ))
}

pub fn endpoint_rows(cfg: &RunConfig) -> Result<Vec<EndpointRow>, CliError> {
    let p = cfg.validate()?;
    let bits = cfg.bits_override.unwrap_or(ENDPOINT_DEFAULT_BITS).max(96);
    let rows = cfg
        .n_list
        .iter()
        .map(|&n| match compare_endpoints(&p, n, bits) {
            Ok((c, iters)) => EndpointRow {
                n,
                hard_edge: c.hard_edge,
                a_exact: Some(format_f64(c.exact.0)),
                b_exact: Some(format_f64(c.exact.1)),
                a_expansion: format_f64(c.expansion.0),
                b_expansion: format_f64(c.expansion.1),
                rel_diff_a: Some(format_f64(c.rel_diff_a())),
                rel_diff_b: Some(format_f64(c.rel_diff_b())),
                ratio_a: (c.expansion.0 > 0.0).then(|| format_f64(c.exact.0 / c.expansion.0)),
                newton_iterations: (!c.hard_edge).then_some(iters),
                error: None,
            },
            Err(e) => {
                let exp = endpoint_expansion(&p, n, false).ok();
                EndpointRow {
                    n,
                    hard_edge: false,
                    a_exact: None,
                    b_exact: None,
                    a_expansion: exp.map(|e| format_f64(e.a_n)).unwrap_or_default(),
                    b_expansion: exp.map(|e| format_f64(e.b_n)).unwrap_or_default(),
                    rel_diff_a: None,
                    rel_diff_b: None,
                    ratio_a: None,
                    newton_iterations: None,
                    error: Some(e.to_string()),
                }
            }
        })
        .collect();
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub variant: &'static str,
    pub lambda: String,
    pub ln_lambda: String,
}

pub fn predict_rows(cfg: &RunConfig) -> Result<Vec<PredictRow>, CliError> {
    let p = cfg.validate()?;
    if p.t() == 0.0 && cfg.variant.needs_positive_t() {
        return Err(CliError::Config(format!(
            "variant {} needs t > 0; use t0-alpha or t0-szego",
            cfg.variant
        )));
    }
    cfg.n_list
        .iter()
        .map(|&n| {
            let l = lambda_prediction(&p, n, cfg.variant).map_err(|e| CliError::Config(e.to_string()))?;
            Ok(PredictRow {
                n,
                variant: cfg.variant.name(),
                lambda: format_f64(l.value),
                ln_lambda: format_f64(l.ln_value),
            })
        })
        .collect()
}
