//! Exact circle kernel `𝒦_{μν}` on the window `[N - √N, N]` next to the
//! asymptotic diagonal.

use hankel_core::asymptotics::{kernel_diag_asymptotic, kernel_window};
use hankel_core::eigen::precision_policy;
use hankel_core::hankel::{assemble, kernel_matrix_quadrature};
use hankel_core::moments::WeightParams;
use hankel_core::Arith;
use serde::Serialize;

use crate::cache::load_or_compute;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::sweep::{format_f64, EIGEN_DIGITS};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelEntry {
    #[serde(rename = "N")]
    pub n: u64,
    pub mu: u64,
    pub nu: u64,
    pub k_exact: String,
    /// `|𝒦_{μν}| / (𝒦_{μμ} 𝒦_{νν})^{1/2}`.
    pub normalized: String,
    pub sign_ok: bool,
    pub k_asymptotic: Option<String>,
    pub ratio_exact_asymptotic: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelReport {
    pub n: u64,
    pub window: (u64, u64),
    pub bits: usize,
    pub entries: Vec<KernelEntry>,
    pub min_normalized: f64,
    pub sign_violations: usize,
    /// `(μ, exact/asymptotic)` along the diagonal.
    pub diagonal_ratios: Vec<(u64, f64)>,
}

pub fn kernel_report(p: &WeightParams, n: u64, bits_override: Option<usize>, cache: Option<&std::path::Path>) -> Result<KernelReport, CliError> {
    let bits = bits_override.unwrap_or_else(|| precision_policy(n as usize, p));
    let (table, _) = load_or_compute(p, bits, (2 * n as usize).max(2), cache)?;
    let sys = assemble(&table, n as usize).map_err(|e| CliError::Numeric(e.to_string()))?;
    let k = kernel_matrix_quadrature(&sys);
    let (lo, hi) = kernel_window(n);
    let mut ar = Arith::new(bits);
    let mut entries = Vec::new();
    let mut min_normalized = f64::INFINITY;
    let mut sign_violations = 0;
    let mut diagonal_ratios = Vec::new();
    for mu in lo..=hi {
        for nu in lo..=hi {
            let (i, j) = (mu as usize, nu as usize);
            let kij = &k[i][j];
            let norm = &kij.abs() / &(&k[i][i] * &k[j][j]).sqrt();
            let expected_negative = (mu + nu) % 2 == 1;
            let sign_ok = !kij.is_zero() && kij.is_negative() == expected_negative;
            if !sign_ok {
                sign_violations += 1;
            }
            min_normalized = min_normalized.min(norm.to_f64());
            let asym = (mu == nu)
                .then(|| kernel_diag_asymptotic(p, n, mu).ok())
                .flatten();
            let ratio = asym.map(|a| kij.to_f64() / a);
            if let Some(r) = ratio {
                diagonal_ratios.push((mu, r));
            }
            entries.push(KernelEntry {
                n,
                mu,
                nu,
                k_exact: ar.to_decimal(kij, EIGEN_DIGITS),
                normalized: ar.to_decimal(&norm, EIGEN_DIGITS),
                sign_ok,
                k_asymptotic: asym.map(format_f64),
                ratio_exact_asymptotic: ratio.map(format_f64),
            });
        }
    }
    Ok(KernelReport {
        n,
        window: (lo, hi),
        bits,
        entries,
        min_normalized,
        sign_violations,
        diagonal_ratios,
    })
}

pub fn kernel_rows(cfg: &RunConfig) -> Result<Vec<KernelEntry>, CliError> {
    let p = cfg.validate()?;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        rows.extend(kernel_report(&p, n, cfg.bits_override, cfg.cache_dir.as_deref())?.entries);
    }
    Ok(rows)
}
