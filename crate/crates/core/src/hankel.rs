//! Hankel moment matrices `H_N = (μ_{j+k})_{j,k=0}^N`, their Cholesky
//! factors, the orthonormal polynomials they define and the unit-circle
//! kernel `𝒦_{jk} = ∫_{-π}^{π} 𝒫_j(e^{iφ}) 𝒫_k(e^{-iφ}) dφ`.
//!
//! With `H = L Lᵀ`, the rows of `C = L⁻¹` are the coefficient vectors of the
//! orthonormal family: `C H Cᵀ = I` and `c_{kk} = 1/L_{kk} > 0`.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::moments::{MomentTable, WeightParams};
use crate::real::{Arith, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HankelError {
    #[error("moment table has K={have}, order N needs K >= {needed}")]
    TableTooShort { needed: usize, have: usize },
    #[error("Cholesky pivot {pivot} is not positive (value {magnitude:e}); precision insufficient")]
    PrecisionInsufficient { pivot: usize, magnitude: f64 },
}

/// Factored `H_N` with the orthonormal coefficient triangle.
#[derive(Clone, Debug)]
pub struct HankelSystem {
    params: WeightParams,
    n: usize,
    bits: usize,
    source: MomentTable,
    moments: Vec<Real>,
    cholesky: Vec<Vec<Real>>,
    coeffs: Vec<Vec<Real>>,
}

/// Factor `H_N` at the precision of the table.
pub fn assemble(moments: &MomentTable, n: usize) -> Result<HankelSystem, HankelError> {
    assemble_at(moments, n, moments.bits())
}

/// Factor `H_N` with the moments rounded to `bits` (at most the table width).
pub fn assemble_at(moments: &MomentTable, n: usize, bits: usize) -> Result<HankelSystem, HankelError> {
    if moments.max_index() < 2 * n {
        return Err(HankelError::TableTooShort {
            needed: 2 * n,
            have: moments.max_index(),
        });
    }
    let bits = bits.min(moments.bits());
    let source = moments.truncated(2 * n.max(1));
    let mu: Vec<Real> = source.values()[..=2 * n].iter().map(|v| v.with_bits(bits)).collect();
    let cholesky = cholesky(&mu, n)?;
    let coeffs = invert_lower(&cholesky);
    Ok(HankelSystem {
        params: *moments.params(),
        n,
        bits,
        source,
        moments: mu,
        cholesky,
        coeffs,
    })
}

fn cholesky(mu: &[Real], n: usize) -> Result<Vec<Vec<Real>>, HankelError> {
    let mut l: Vec<Vec<Real>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = Vec::with_capacity(i + 1);
        for j in 0..=i {
            let mut s = mu[i + j].clone();
            for k in 0..j {
                let ljk = if j == i { &row[k] } else { &l[j][k] };
                s -= &(&row[k] * ljk);
            }
            if i == j {
                if !s.is_positive() {
                    return Err(HankelError::PrecisionInsufficient {
                        pivot: i,
                        magnitude: s.to_f64(),
                    });
                }
                row.push(s.sqrt());
            } else {
                row.push(&s / &l[j][j]);
            }
        }
        l.push(row);
    }
    Ok(l)
}

fn invert_lower(l: &[Vec<Real>]) -> Vec<Vec<Real>> {
    let n = l.len();
    let mut c: Vec<Vec<Real>> = Vec::with_capacity(n);
    for i in 0..n {
        let inv = l[i][i].recip();
        let mut row = vec![Real::zero(inv.bits()); i + 1];
        for j in 0..i {
            let mut s = Real::zero(inv.bits());
            for k in j..i {
                s += &(&l[i][k] * &c[k][j]);
            }
            row[j] = -(&s * &inv);
        }
        row[i] = inv;
        c.push(row);
    }
    c
}

impl HankelSystem {
    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    /// Order `N`; the matrix is `(N+1) × (N+1)`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// The table the system was built from, truncated to `μ_0 … μ_{2N}`.
    pub fn source(&self) -> &MomentTable {
        &self.source
    }

    /// `μ_0 … μ_{2N}` at the working precision.
    pub fn moments(&self) -> &[Real] {
        &self.moments
    }

    pub fn entry(&self, j: usize, k: usize) -> &Real {
        &self.moments[j + k]
    }

    /// Dense `H_N`.
    pub fn dense(&self) -> Vec<Vec<Real>> {
        (0..=self.n)
            .map(|j| (0..=self.n).map(|k| self.moments[j + k].clone()).collect())
            .collect()
    }

    /// Rows of the lower Cholesky factor `L`.
    pub fn cholesky(&self) -> &[Vec<Real>] {
        &self.cholesky
    }

    /// `log2 max |C H Cᵀ - I|`.
    pub fn orthonormality_residual_log2(&self) -> f64 {
        let c = &self.coeffs;
        let m = self.n + 1;
        // row k of C H
        let ch: Vec<Vec<Real>> = (0..m)
            .map(|k| {
                (0..m)
                    .map(|s| {
                        let mut acc = Real::zero(self.bits);
                        for r in 0..=k {
                            acc += &(&c[k][r] * &self.moments[r + s]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let mut worst = f64::NEG_INFINITY;
        for k in 0..m {
            for j in 0..=k {
                let mut acc = Real::zero(self.bits);
                for s in 0..=j {
                    acc += &(&ch[k][s] * &c[j][s]);
                }
                if j == k {
                    acc = acc - 1.0;
                }
                if !acc.is_zero() {
                    worst = worst.max(acc.log2_abs());
                }
            }
        }
        worst
    }
}

/// Coefficient triangle: row `k` holds `c_{k,0} … c_{k,k}` of `𝒫_k(z) = Σ_j c_{k,j} z^j`.
pub fn orthonormal_coeffs(sys: &HankelSystem) -> &[Vec<Real>] {
    &sys.coeffs
}

/// `𝒫_k(z)` by Horner's rule on row `k` of the coefficient triangle.
pub fn evaluate_orthonormal(sys: &HankelSystem, k: usize, z: &Real) -> Real {
    let row = &sys.coeffs[k];
    let z = z.with_bits(sys.bits);
    let mut acc = Real::zero(sys.bits);
    for c in row.iter().rev() {
        acc = &(&acc * &z) + c;
    }
    acc
}

/// `𝒦_00 … 𝒦_NN`.
#[derive(Clone, Debug)]
pub struct KernelDiagonal {
    pub kvals: Vec<Real>,
}

impl KernelDiagonal {
    pub fn sum(&self) -> Real {
        let mut s = Real::zero(self.kvals[0].bits());
        for k in &self.kvals {
            s += k;
        }
        s
    }
}

/// `𝒦_kk = 2π Σ_j c_{k,j}²`.
pub fn kernel_diagonal(sys: &HankelSystem) -> KernelDiagonal {
    let two_pi = Arith::new(sys.bits).pi().ldexp(1);
    let kvals = sys
        .coeffs
        .iter()
        .map(|row| {
            let mut s = Real::zero(sys.bits);
            for c in row {
                s += &c.square();
            }
            &s * &two_pi
        })
        .collect();
    KernelDiagonal { kvals }
}

/// `𝒦_{jk}` for all `j, k ≤ N` by the trapezoidal rule on the circle with
/// `8(N+1)` nodes, exact for these trigonometric polynomials.
pub fn kernel_matrix_quadrature(sys: &HankelSystem) -> Vec<Vec<Real>> {
    let m = sys.n + 1;
    let nodes = 8 * m;
    let mut ar = Arith::new(sys.bits);
    let step = &ar.pi().ldexp(1) / nodes as f64;
    let (cos_t, sin_t): (Vec<Real>, Vec<Real>) = (0..nodes)
        .map(|r| {
            let phi = &step * r as f64;
            (ar.cos(&phi), ar.sin(&phi))
        })
        .unzip();
    // 𝒫_k(e^{iφ_q}) for every node q and order k
    let values: Vec<Vec<(Real, Real)>> = (0..nodes)
        .map(|q| {
            sys.coeffs
                .iter()
                .map(|row| {
                    let (mut re, mut im) = (Real::zero(sys.bits), Real::zero(sys.bits));
                    for (j, c) in row.iter().enumerate() {
                        let r = (j * q) % nodes;
                        re += &(c * &cos_t[r]);
                        im += &(c * &sin_t[r]);
                    }
                    (re, im)
                })
                .collect()
        })
        .collect();
    let mut k = vec![vec![Real::zero(sys.bits); m]; m];
    for (j, row) in k.iter_mut().enumerate() {
        for (l, cell) in row.iter_mut().enumerate().take(j + 1) {
            let mut s = Real::zero(sys.bits);
            for v in &values {
                // Re(P_j(w) conj(P_l(w)))
                s += &(&(&v[j].0 * &v[l].0) + &(&v[j].1 * &v[l].1));
            }
            *cell = &s * &step;
        }
    }
    for j in 0..m {
        for l in j + 1..m {
            k[j][l] = k[l][j].clone();
        }
    }
    k
}

/// `2π / Σ_k 𝒦_kk`, a lower bound for the smallest eigenvalue of `H_N`.
pub fn rayleigh_lower_bound(kd: &KernelDiagonal) -> Real {
    let two_pi = Arith::new(kd.kvals[0].bits()).pi().ldexp(1);
    &two_pi / &kd.sum()
}
