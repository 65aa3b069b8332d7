//! Dense symmetric eigensolving by cyclic Jacobi rotations, spectral
//! moments against exact closed-walk counts, Cartesian-product spectra by
//! multiset convolution, and the eigenvalue-outlier condition checker.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::MultiGraph;

/// Default termination tolerance for the Jacobi sweep: off-diagonal
/// Frobenius norm below `tol * ||A||_F`.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-10;

/// Default cap on Jacobi sweeps.
pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// Eigenvalue multiset, non-increasing, with exact multiplicities.
///
/// Multiplicities are big integers so that iterated product spectra do not
/// overflow.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub entries: Vec<(f64, BigUint)>,
}

impl Spectrum {
    pub fn total_multiplicity(&self) -> BigUint {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|(v, _)| v.abs()).fold(0.0, f64::max)
    }

    /// Sum of multiplicity * value^ell.
    pub fn moment(&self, ell: u32) -> f64 {
        self.entries
            .iter()
            .map(|(v, m)| big_to_f64(m) * v.powi(ell as i32))
            .sum()
    }

    /// Multiplicities of eigenvalues strictly outside `[-threshold, threshold]`.
    ///
    /// Values on the boundary count as inside; a guard of
    /// `1e-9 * max(1, max|lambda|)` absorbs eigensolver noise so that true
    /// boundary eigenvalues are not misclassified.
    pub fn outlier_count(&self, threshold: f64) -> BigUint {
        let eps = 1e-9 * self.max_abs().max(1.0);
        self.entries
            .iter()
            .filter(|(v, _)| v.abs() > threshold + eps)
            .map(|(_, m)| m)
            .sum()
    }

    /// Normalised weights: probability of each value when an eigenvalue is
    /// drawn uniformly. The f64 view of the multiplicity distribution.
    pub fn to_weights(&self) -> Vec<(f64, f64)> {
        let total = big_to_f64(&self.total_multiplicity());
        self.entries.iter().map(|(v, m)| (*v, big_to_f64(m) / total)).collect()
    }

    /// Collapse near-equal values (within `tol`) into multiplicities and
    /// sort non-increasing.
    fn from_raw(mut values: Vec<(f64, BigUint)>, tol: f64) -> Spectrum {
        values.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut entries: Vec<(f64, BigUint)> = Vec::new();
        for (v, m) in values {
            match entries.last_mut() {
                Some((last, mult)) if (*last - v).abs() <= tol => {
                    // Keep the first representative; neighbours differ by
                    // at most tol from it.
                    *mult += m;
                }
                _ => entries.push((v, m)),
            }
        }
        Spectrum { entries }
    }
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Eigenvalues of the adjacency matrix by cyclic Jacobi rotations.
///
/// Values within `1e-7 * max(1, ||A||_F)` of each other are merged into one
/// entry, so integer spectra collapse to exact multiplicities.
pub fn eigenvalues(g: &MultiGraph, tol: f64) -> Result<Spectrum> {
    if g.n() == 0 {
        return Err(Error::InvalidParam("empty graph has no spectrum".into()));
    }
    if tol <= 0.0 {
        return Err(Error::InvalidParam(format!("tolerance must be positive, got {tol}")));
    }
    let a: Vec<Vec<f64>> = g
        .adjacency_matrix()
        .into_iter()
        .map(|row| row.into_iter().map(|x| x as f64).collect())
        .collect();
    let values = jacobi_eigenvalues(a, tol, DEFAULT_MAX_SWEEPS)?;
    let norm: f64 = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    let merge_tol = 1e-7 * norm.max(1.0);
    Ok(Spectrum::from_raw(
        values.into_iter().map(|v| (v, BigUint::one())).collect(),
        merge_tol,
    ))
}

/// Cyclic Jacobi on a dense symmetric matrix. Deterministic: sweeps visit
/// (p, q) in row order until the off-diagonal Frobenius norm drops below
/// `tol` times the full norm.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>, tol: f64, max_sweeps: usize) -> Result<Vec<f64>> {
    let n = a.len();
    if n <= 1 {
        return Ok(a.first().map(|r| vec![r[0]]).unwrap_or_default());
    }
    let frob: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    if frob == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = tol * frob;
    for _ in 0..max_sweeps {
        let off: f64 = (0..n)
            .map(|p| ((p + 1)..n).map(|q| 2.0 * a[p][q] * a[p][q]).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            return Ok((0..n).map(|i| a[i][i]).collect());
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = {
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[p][i];
                    let aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    Err(Error::NoConvergence { sweeps: max_sweeps })
}

/// Spectrum of an iterated Cartesian product: the multiset of sums of one
/// eigenvalue per factor, multiplicities multiplied, computed by repeated
/// convolution.
pub fn product_spectrum(factors: &[Spectrum]) -> Result<Spectrum> {
    if factors.is_empty() {
        return Err(Error::InvalidParam("product of zero spectra".into()));
    }
    let max_abs: f64 = factors.iter().map(Spectrum::max_abs).sum();
    let merge_tol = 1e-9 * max_abs.max(1.0);
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        let mut raw = Vec::with_capacity(acc.entries.len() * f.entries.len());
        for (va, ma) in &acc.entries {
            for (vb, mb) in &f.entries {
                raw.push((va + vb, ma * mb));
            }
        }
        acc = Spectrum::from_raw(raw, merge_tol);
    }
    Ok(acc)
}

/// Probability-weight convolution of factor spectra: the distribution of
/// the sum of one uniformly drawn eigenvalue per factor. Agrees with
/// `product_spectrum` after normalisation but never forms the huge
/// multiplicity integers.
pub fn product_distribution(factors: &[Spectrum]) -> Result<Vec<(f64, f64)>> {
    if factors.is_empty() {
        return Err(Error::InvalidParam("product of zero spectra".into()));
    }
    let max_abs: f64 = factors.iter().map(Spectrum::max_abs).sum();
    let merge_tol = 1e-9 * max_abs.max(1.0);
    let mut acc = factors[0].to_weights();
    for f in &factors[1..] {
        let fw = f.to_weights();
        let mut raw: Vec<(f64, f64)> = Vec::with_capacity(acc.len() * fw.len());
        for (va, wa) in &acc {
            for (vb, wb) in &fw {
                raw.push((va + vb, wa * wb));
            }
        }
        raw.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (v, w) in raw {
            match merged.last_mut() {
                Some((last, acc_w)) if (*last - v).abs() <= merge_tol => *acc_w += w,
                _ => merged.push((v, w)),
            }
        }
        acc = merged;
    }
    Ok(acc)
}

/// Exact trace of A^ell via integer matrix powers: the number of closed
/// walks of length ell.
pub fn closed_walk_count(g: &MultiGraph, ell: u32) -> Result<BigUint> {
    if ell < 1 {
        return Err(Error::InvalidParam("walk length must be >= 1".into()));
    }
    let n = g.n();
    let a: Vec<Vec<BigUint>> = g
        .adjacency_matrix()
        .into_iter()
        .map(|row| row.into_iter().map(BigUint::from).collect())
        .collect();
    let mut acc = a.clone();
    for _ in 1..ell {
        acc = mat_mul(&acc, &a);
    }
    Ok((0..n).map(|i| acc[i][i].clone()).sum())
}

fn mat_mul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let n = a.len();
    let mut out = vec![vec![BigUint::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

/// Spectral outlier report for the eigenvalue condition: how many
/// eigenvalues fall strictly outside `[-d^(1-delta), d^(1-delta)]`, the
/// decay exponent f they imply via count = n * d^(-f), and the constant
/// C = e^(1 + 2/delta) with lmax = f * ln(d) / 2 that feed the trail-growth
/// hypothesis.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub delta: f64,
    pub threshold: f64,
    pub n: usize,
    pub d: usize,
    pub outliers: u64,
    pub fraction: f64,
    /// None encodes "no outliers at all" (infinite decay exponent).
    pub f_implied: Option<f64>,
    #[serde(rename = "C_constant")]
    pub c_constant: f64,
}

impl SpectralReport {
    /// lmax = f * ln(d) / 2 implied by the outlier decay; None when there
    /// are no outliers.
    pub fn implied_lmax(&self) -> Option<f64> {
        self.f_implied.map(|f| 0.5 * f * (self.d as f64).ln())
    }
}

/// Count spectral outliers at threshold d^(1-delta). Boundary values count
/// as inside (strict comparison).
pub fn check_corollary_spectral(g: &MultiGraph, delta: f64) -> Result<SpectralReport> {
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(Error::InvalidParam(format!("delta must lie in (0, 1), got {delta}")));
    }
    let d = g
        .regular_degree()
        .ok_or_else(|| Error::InvalidParam("spectral check needs a regular graph".into()))?;
    if d < 2 {
        return Err(Error::InvalidParam(format!("spectral check needs degree >= 2, got {d}")));
    }
    let spectrum = eigenvalues(g, DEFAULT_EIGEN_TOL)?;
    let threshold = (d as f64).powf(1.0 - delta);
    let outliers = spectrum
        .outlier_count(threshold)
        .to_u64()
        .expect("at most n outliers");
    let n = g.n();
    let fraction = outliers as f64 / n as f64;
    let f_implied = (outliers > 0).then(|| -fraction.ln() / (d as f64).ln());
    Ok(SpectralReport {
        delta,
        threshold,
        n,
        d,
        outliers,
        fraction,
        f_implied,
        c_constant: (1.0 + 2.0 / delta).exp(),
    })
}

/// Concentration bound for the spectrum of a Cartesian product of regular
/// factors with degrees `h`: the probability that the sum of one uniform
/// eigenvalue per factor exceeds d^(1-delta/4) in absolute value is at most
/// 2 exp(-d^(2-delta/2) / (2 sum h_i^2)), d = sum h_i.
pub fn hoeffding_tail_bound(h: &[u64], delta: f64) -> Result<f64> {
    if h.is_empty() {
        return Err(Error::InvalidParam("need at least one factor degree".into()));
    }
    if h.iter().any(|&x| x == 0) {
        return Err(Error::InvalidParam("factor degrees must be positive".into()));
    }
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(Error::InvalidParam(format!("delta must lie in (0, 1), got {delta}")));
    }
    let d: f64 = h.iter().map(|&x| x as f64).sum();
    let sum_sq: f64 = h.iter().map(|&x| (x * x) as f64).sum();
    Ok(2.0 * (-d.powf(2.0 - delta / 2.0) / (2.0 * sum_sq)).exp())
}
