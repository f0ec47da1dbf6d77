//! Certified `λ_N` against the asymptotic predictions, one record per order.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use hankel_core::asymptotics::{lambda_prediction, PredictionVariant};
use hankel_core::eigen::{precision_policy, smallest_eigenvalue_with, EigenCertificate, EigenOptions, CONFIRM_EXTRA_BITS};
use hankel_core::hankel::assemble_at;
use hankel_core::moments::{MomentTable, WeightParams};
use hankel_core::{Arith, Real};
use serde::Serialize;

use crate::cache::{load_or_compute, CacheStatus};
use crate::config::{OutFormat, RunConfig};
use crate::error::CliError;

/// Significant digits printed for eigenvalue columns.
pub const EIGEN_DIGITS: usize = 20;
/// Relative enclosure width `2^{-72}`, a few bits past the printed digits.
pub const EIGEN_WIDTH_EXPONENT: u32 = 72;

pub const CSV_HEADER: [&str; 11] = [
    "N",
    "lambda_exact",
    "lambda_lo",
    "lambda_hi",
    "pred_proof",
    "pred_theorem",
    "ratio_proof",
    "ratio_theorem",
    "rayleigh_bound",
    "bits",
    "wall_ms",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    #[serde(rename = "N")]
    pub n: u64,
    pub lambda_exact: Option<String>,
    pub lambda_lo: Option<String>,
    pub lambda_hi: Option<String>,
    pub pred_proof: Option<String>,
    pub pred_theorem: Option<String>,
    pub ratio_proof: Option<String>,
    pub ratio_theorem: Option<String>,
    pub rayleigh_bound: Option<String>,
    pub bits: usize,
    pub wall_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRecord {
    fn failed(n: u64, bits: usize, error: String) -> Self {
        SweepRecord {
            n,
            lambda_exact: None,
            lambda_lo: None,
            lambda_hi: None,
            pred_proof: None,
            pred_theorem: None,
            ratio_proof: None,
            ratio_theorem: None,
            rayleigh_bound: None,
            bits,
            wall_ms: None,
            error: Some(error),
        }
    }

    fn csv_row(&self) -> Vec<String> {
        let o = |v: &Option<String>| v.clone().unwrap_or_default();
        vec![
            self.n.to_string(),
            o(&self.lambda_exact),
            o(&self.lambda_lo),
            o(&self.lambda_hi),
            o(&self.pred_proof),
            o(&self.pred_theorem),
            o(&self.ratio_proof),
            o(&self.ratio_theorem),
            o(&self.rayleigh_bound),
            self.bits.to_string(),
            self.wall_ms.map(|w| w.to_string()).unwrap_or_default(),
        ]
    }
}

/// The two prediction columns: proof/theorem forms for `t > 0`, the
/// `t = 0` forms otherwise.
pub fn prediction_columns(p: &WeightParams) -> [PredictionVariant; 2] {
    if p.t() > 0.0 {
        [PredictionVariant::Proof, PredictionVariant::Theorem]
    } else {
        [PredictionVariant::T0Alpha, PredictionVariant::T0Szego]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepOutput {
    pub alpha: f64,
    pub t: f64,
    pub pred_proof_variant: &'static str,
    pub pred_theorem_variant: &'static str,
    pub records: Vec<SweepRecord>,
}

impl SweepOutput {
    pub fn failures(&self) -> impl Iterator<Item = &SweepRecord> {
        self.records.iter().filter(|r| r.error.is_some())
    }

    pub fn write<W: Write>(&self, format: OutFormat, mut w: W) -> Result<(), CliError> {
        match format {
            OutFormat::Json => {
                serde_json::to_writer_pretty(&mut w, self)?;
                writeln!(w)?;
            }
            OutFormat::Csv => {
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(CSV_HEADER)?;
                for r in &self.records {
                    csv.write_record(r.csv_row())?;
                }
                csv.flush()?;
            }
        }
        Ok(())
    }
}

pub fn format_f64(x: f64) -> String {
    format!("{x:e}")
}

fn order_bits(n: u64, p: &WeightParams, bits_override: Option<usize>) -> usize {
    bits_override.unwrap_or_else(|| precision_policy(n as usize, p))
}

fn certify(table: &MomentTable, n: u64, bits: usize) -> Result<EigenCertificate, String> {
    let sys = assemble_at(table, n as usize, bits).map_err(|e| e.to_string())?;
    let opts = EigenOptions {
        rel_width_exponent: EIGEN_WIDTH_EXPONENT,
        ..EigenOptions::for_bits(bits)
    };
    smallest_eigenvalue_with(&sys, bits, &opts).map_err(|e| e.to_string())
}

fn ratio(exact: &Real, pred: f64, ar: &mut Arith) -> Option<String> {
    (pred > 0.0).then(|| ar.to_decimal(&(exact / pred), EIGEN_DIGITS))
}

pub fn sweep_one(table: &MomentTable, n: u64, bits_override: Option<usize>, timing: bool) -> SweepRecord {
    let start = Instant::now();
    let p = *table.params();
    let bits = order_bits(n, &p, bits_override);
    let cert = match certify(table, n, bits) {
        Ok(c) => c,
        Err(e) => return SweepRecord::failed(n, bits, e),
    };
    let mut ar = Arith::new(cert.bits_used);
    let dec = |x: &Real, ar: &mut Arith| ar.to_decimal(x, EIGEN_DIGITS);
    let [v1, v2] = prediction_columns(&p);
    let pred = |v| lambda_prediction(&p, n, v).ok().map(|l| l.value);
    let (p1, p2) = (pred(v1), pred(v2));
    let lambda = &cert.lambda_min;
    SweepRecord {
        n,
        lambda_exact: Some(dec(lambda, &mut ar)),
        lambda_lo: Some(dec(cert.enclosure.lo(), &mut ar)),
        lambda_hi: Some(dec(cert.enclosure.hi(), &mut ar)),
        pred_proof: p1.map(format_f64),
        pred_theorem: p2.map(format_f64),
        ratio_proof: p1.and_then(|v| ratio(lambda, v, &mut ar)),
        ratio_theorem: p2.and_then(|v| ratio(lambda, v, &mut ar)),
        rayleigh_bound: Some(dec(&cert.rayleigh_bound, &mut ar)),
        bits: cert.bits_used,
        wall_ms: timing.then(|| start.elapsed().as_millis() as u64),
        error: None,
    }
}

/// Shared table wide enough for every order's confirming run.
pub fn sweep_table(cfg: &RunConfig, p: &WeightParams) -> Result<(MomentTable, CacheStatus), CliError> {
    let bits = cfg
        .n_list
        .iter()
        .map(|&n| order_bits(n, p, cfg.bits_override))
        .max()
        .unwrap_or(128)
        + CONFIRM_EXTRA_BITS;
    let k = (2 * cfg.max_n() as usize).max(2);
    load_or_compute(p, bits, k, cfg.cache_dir.as_deref())
}

/// Runs every order on `cfg.threads` workers; records come back sorted by `N`.
pub fn run_sweep(cfg: &RunConfig, timing: bool) -> Result<SweepOutput, CliError> {
    let p = cfg.validate()?;
    let (table, _) = sweep_table(cfg, &p)?;
    // largest orders first so the slowest jobs start early
    let mut jobs: Vec<u64> = cfg.n_list.clone();
    jobs.reverse();
    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(jobs.len()));
    std::thread::scope(|s| {
        for _ in 0..cfg.threads.min(jobs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&n) = jobs.get(i) else { break };
                let rec = sweep_one(&table, n, cfg.bits_override, timing);
                done.lock().expect("worker panicked").push(rec);
            });
        }
    });
    let mut records = done.into_inner().expect("worker panicked");
    records.sort_by_key(|r| r.n);
    let [v1, v2] = prediction_columns(&p);
    Ok(SweepOutput {
        alpha: p.alpha(),
        t: p.t(),
        pred_proof_variant: v1.name(),
        pred_theorem_variant: v2.name(),
        records,
    })
}
