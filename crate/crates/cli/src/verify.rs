//! Closed-form identities on a random grid of supports, plus orthonormality
//! and Parseval checks at small order.

use std::fmt::Write as _;

use hankel_core::hankel::{assemble, kernel_diagonal, kernel_matrix_quadrature};
use hankel_core::moments::{compute_moment_table, WeightParams};
use hankel_core::numerics::{verify_identity, Identity};
use hankel_core::real::rel_diff;
use hankel_core::{EndpointPair, PrecisionContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

pub const DEFAULT_VERIFY_BITS: usize = 256;
pub const DEFAULT_INSTANCES: usize = 50;
pub const DEFAULT_SEED: u64 = 0x5eed;
pub const GRID_ALPHAS: [f64; 3] = [0.0, 0.5, -0.5];
pub const GRID_TS: [f64; 4] = [0.0, 0.1, 1.0, 10.0];
const STRUCTURE_ORDER: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub bits: usize,
    pub instances: usize,
    pub seed: u64,
    /// Negates this identity's closed form before comparing.
    pub inject_fault: Option<Identity>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            bits: DEFAULT_VERIFY_BITS,
            instances: DEFAULT_INSTANCES,
            seed: DEFAULT_SEED,
            inject_fault: None,
        }
    }
}

impl VerifyOptions {
    /// Pass threshold `2^{-25·bits/64}`: `2^{-100}` at 256 bits.
    pub fn threshold_log2(&self) -> f64 {
        -((self.bits * 25 / 64) as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRow {
    pub check: String,
    pub cases: usize,
    pub worst_log2: f64,
    pub threshold_log2: f64,
}

impl VerifyRow {
    pub fn passes(&self) -> bool {
        self.worst_log2 <= self.threshold_log2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn failing(&self) -> Vec<&str> {
        self.rows.iter().filter(|r| !r.passes()).map(|r| r.check.as_str()).collect()
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{:<16} {:>6} {:>14} {:>12}  status", "check", "cases", "worst_log2", "limit_log2").unwrap();
        for r in &self.rows {
            let status = if r.passes() { "ok" } else { "FAIL" };
            writeln!(
                s,
                "{:<16} {:>6} {:>14.2} {:>12.2}  {status}",
                r.check, r.cases, r.worst_log2, r.threshold_log2
            )
            .unwrap();
        }
        s
    }
}

/// One random `(a, b, shift)` instance; the shift lies left of `a` or right
/// of `b` so that every identity is defined.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (EndpointPair, f64) {
    let a: f64 = rng.gen_range(0.05..5.0);
    let b = a + rng.gen_range(0.1..30.0);
    let shift = if rng.gen_bool(0.5) {
        a * rng.gen_range(0.05..0.95)
    } else {
        b + rng.gen_range(0.5..10.0)
    };
    (EndpointPair::new(a, b).expect("a < b by construction"), shift)
}

fn log2_rel(x: &hankel_core::Real, y: &hankel_core::Real) -> f64 {
    let d = rel_diff(x, y);
    if d == 0.0 {
        f64::NEG_INFINITY
    } else {
        d.log2()
    }
}

pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    let ctx = PrecisionContext::with_bits(opts.bits).map_err(|e| CliError::Config(e.to_string()))?;
    let threshold = opts.threshold_log2();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let instances: Vec<_> = (0..opts.instances).map(|_| random_instance(&mut rng)).collect();
    let mut rows = Vec::new();
    for id in Identity::ALL {
        let mut worst = f64::NEG_INFINITY;
        for (e, shift) in &instances {
            let r = verify_identity(id, e, *shift, &ctx).map_err(|e| CliError::Numeric(e.to_string()))?;
            let closed = if opts.inject_fault == Some(id) {
                -r.closed_form.clone()
            } else {
                r.closed_form.clone()
            };
            worst = worst.max(log2_rel(&r.quadrature, &closed));
        }
        rows.push(VerifyRow {
            check: id.name().to_string(),
            cases: instances.len(),
            worst_log2: worst,
            threshold_log2: threshold,
        });
    }
    let (mut ortho, mut parseval, mut cases) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0);
    for alpha in GRID_ALPHAS {
        for t in GRID_TS {
            let p = WeightParams::new(alpha, t).map_err(|e| CliError::Config(e.to_string()))?;
            let table = compute_moment_table(&p, 2 * STRUCTURE_ORDER, &ctx).map_err(|e| CliError::Numeric(e.to_string()))?;
            let sys = assemble(&table, STRUCTURE_ORDER).map_err(|e| CliError::Numeric(e.to_string()))?;
            ortho = ortho.max(sys.orthonormality_residual_log2());
            let kd = kernel_diagonal(&sys);
            let km = kernel_matrix_quadrature(&sys);
            for (k, v) in kd.kvals.iter().enumerate() {
                parseval = parseval.max(log2_rel(&km[k][k], v));
            }
            cases += 1;
        }
    }
    rows.push(VerifyRow {
        check: "orthonormality".into(),
        cases,
        worst_log2: ortho,
        threshold_log2: threshold,
    });
    rows.push(VerifyRow {
        check: "parseval".into(),
        cases,
        worst_log2: parseval,
        threshold_log2: -(opts.bits as f64) / 4.0,
    });
    Ok(VerifyReport { rows })
}
