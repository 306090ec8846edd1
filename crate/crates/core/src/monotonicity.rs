//! Behavior of the measures under white-noise fuzzification.
//!
//! Mixing an observable with white noise, `A_i ↦ λA_i + (1−λ)I/n`, rescales
//! every measure by an exact affine law:
//!
//! ```text
//! el(A^λ)      = λ²·el(A)      + (1−λ²)(1 − 1/n)
//! elprime(A^λ) = λ²·elprime(A) + (1−λ²)(1 − 1/n)
//! e(A^λ)       = λ²·e(A)       + γ(A, λ)
//! eprime(A^λ)  = λ²·eprime(A)  + γ(A, λ)
//! ```
//!
//! with `γ = ((1−λ)/n)·[(n−1) + λ(n − Σ‖A_i‖)] ≥ 0`. The Luder measures are
//! therefore monotone under noise unconditionally; the
//! instrument-independent ones are monotone for all λ exactly when the
//! scalar orderings `Σ₁ ≥ Σ₂` (resp. `Σ′₁ ≥ Σ′₂`) hold. For dichotomic
//! qubit observables those orderings admit closed forms in the eigenvalues
//! (ω₁, ω₂) of the first effect and are non-negative over the whole
//! parameter triangle, which the grid scan reproduces.
//!
//! Coarse-graining and convex mixing are *not* noise-like: the regression
//! tests pin examples where they sharpen an observable.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::linalg::HermitianMatrix;
use crate::measures::{
    luder_unsharpness, mean_luder_unsharpness, mean_min_unsharpness, measure_report,
    min_unsharpness, sum_effect_norms, x_matrix,
};
use crate::observables::Povm;
use crate::{Error, Result};

/// Tolerance used when asserting the Σ ordering conditions; absorbs
/// eigensolver noise at the proven boundary cases.
pub const SIGMA_TOL: f64 = 1e-12;

/// The additive offset `γ(A, λ) = ((1−λ)/n)·[(n−1) + λ(n − Σ_i ‖A_i‖)]`
/// in the scaling laws of the instrument-independent measures.
pub fn white_noise_gamma(a: &Povm, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::ParameterOutOfRange { value: lambda });
    }
    let n = a.n_outcomes() as f64;
    let norms = sum_effect_norms(a);
    Ok(((1.0 - lambda) / n) * ((n - 1.0) + lambda * (n - norms)))
}

/// Absolute differences between fuzzify-then-measure and the affine laws,
/// one per measure. All four vanish in exact arithmetic.
#[derive(Debug, Clone, Copy)]
pub struct ScalingLawResiduals {
    pub el: f64,
    pub elprime: f64,
    pub e: f64,
    pub eprime: f64,
}

impl ScalingLawResiduals {
    pub fn max(&self) -> f64 {
        self.el.max(self.elprime).max(self.e).max(self.eprime)
    }
}

pub fn scaling_law_residuals(a: &Povm, lambda: f64) -> Result<ScalingLawResiduals> {
    let gamma = white_noise_gamma(a, lambda)?;
    let fuzzed = a.fuzzify_white_noise(lambda)?;
    let ub = 1.0 - 1.0 / a.n_outcomes() as f64;
    let l2 = lambda * lambda;
    Ok(ScalingLawResiduals {
        el: (luder_unsharpness(&fuzzed) - (l2 * luder_unsharpness(a) + (1.0 - l2) * ub)).abs(),
        elprime: (mean_luder_unsharpness(&fuzzed)
            - (l2 * mean_luder_unsharpness(a) + (1.0 - l2) * ub))
            .abs(),
        e: (min_unsharpness(&fuzzed) - (l2 * min_unsharpness(a) + gamma)).abs(),
        eprime: (mean_min_unsharpness(&fuzzed) - (l2 * mean_min_unsharpness(a) + gamma)).abs(),
    })
}

/// Scalar functionals of the X-matrix whose orderings decide noise
/// monotonicity of `e` and `eprime`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaReport {
    /// `x_min − 1/n`; non-negative for every observable.
    pub sigma1: f64,
    /// `Σ‖A_i‖/n − x_min`.
    pub sigma2: f64,
    /// `sigma1 − sigma2`; `≥ 0` iff `e` is noise-monotone for all λ.
    pub sigma_min: f64,
    /// `Tr[X]/d − 1/n`; non-negative for every observable.
    pub sigma1p: f64,
    /// `Σ‖A_i‖/n − Tr[X]/d`.
    pub sigma2p: f64,
    /// `sigma1p − sigma2p`; `≥ 0` iff `eprime` is noise-monotone.
    pub sigma_min_p: f64,
    /// Smallest eigenvalue of the X-matrix.
    pub x_min: f64,
    /// `Σ_i ‖A_i‖`.
    pub sum_effect_norms: f64,
}

pub fn sigma_report(a: &Povm) -> SigmaReport {
    let x = x_matrix(a);
    let x_min = x.eig().min_value();
    let norms = sum_effect_norms(a);
    let n = a.n_outcomes() as f64;
    let d = a.dim() as f64;
    let mean_x = x.trace_real() / d;

    let sigma1 = x_min - 1.0 / n;
    let sigma2 = norms / n - x_min;
    let sigma1p = mean_x - 1.0 / n;
    let sigma2p = norms / n - mean_x;

    assert!(sigma1 >= -1e-9, "sigma1 = {sigma1} cannot be negative");
    assert!(sigma1p >= -1e-9, "sigma1p = {sigma1p} cannot be negative");

    SigmaReport {
        sigma1,
        sigma2,
        sigma_min: sigma1 - sigma2,
        sigma1p,
        sigma2p,
        sigma_min_p: sigma1p - sigma2p,
        x_min,
        sum_effect_norms: norms,
    }
}

/// Whether `e` (resp. `eprime`) is non-decreasing under white noise for all
/// λ, decided exactly by the Σ orderings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseMonotonicity {
    pub e_monotone: bool,
    pub eprime_monotone: bool,
}

pub fn monotone_under_noise(a: &Povm) -> NoiseMonotonicity {
    let sigma = sigma_report(a);
    NoiseMonotonicity {
        e_monotone: sigma.sigma_min >= -SIGMA_TOL,
        eprime_monotone: sigma.sigma_min_p >= -SIGMA_TOL,
    }
}

/// The dichotomic qubit observable `{W, I−W}` with `W = diag(ω₁, ω₂)`.
pub fn dichotomic_qubit_povm(omega1: f64, omega2: f64) -> Result<Povm> {
    for w in [omega1, omega2] {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::ParameterOutOfRange { value: w });
        }
    }
    Povm::new(vec![
        HermitianMatrix::from_real_diag(&[omega1, omega2]),
        HermitianMatrix::from_real_diag(&[1.0 - omega1, 1.0 - omega2]),
    ])
}

/// Closed-form Σ gaps for a dichotomic qubit observable with effect
/// eigenvalues `ω₁ ≥ ω₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DichotomicSigma {
    pub sigma_min: f64,
    pub sigma_min_prime: f64,
}

/// `sigma_min` uses the case split on `ω₁ + ω₂ ≥ 1` (which of the two
/// X-matrix eigenvalues is smallest flips at the seam); `sigma_min_prime`
/// has a single closed form. Both agree with [`sigma_report`] on the
/// constructed observable to `1e−12`.
pub fn dichotomic_sigma_closed_form(omega1: f64, omega2: f64) -> Result<DichotomicSigma> {
    if !(0.0..=1.0).contains(&omega2) || !(omega2..=1.0).contains(&omega1) {
        return Err(Error::OmegaOrdering { omega1, omega2 });
    }
    let sigma_min = if omega1 + omega2 >= 1.0 {
        sigma_min_upper_case(omega1, omega2)
    } else {
        sigma_min_lower_case(omega1, omega2)
    };
    Ok(DichotomicSigma {
        sigma_min,
        sigma_min_prime: sigma_min_prime_closed_form(omega1, omega2),
    })
}

/// Valid for `ω₁ + ω₂ ≥ 1`, where `x_min = ω₁ω₂ + (1−ω₂)²`.
fn sigma_min_upper_case(w1: f64, w2: f64) -> f64 {
    1.0 - 4.0 * w2 + 2.0 * w2 * w2 + 2.0 * w1 * w2 - (w1 - w2) / 2.0
}

/// Valid for `ω₁ + ω₂ ≤ 1`, where `x_min = ω₁² + (1−ω₁)(1−ω₂)`.
fn sigma_min_lower_case(w1: f64, w2: f64) -> f64 {
    1.0 + 2.0 * w1 * w1 + 2.0 * w1 * w2 - 2.0 * (w1 + w2) - (w1 - w2) / 2.0
}

fn sigma_min_prime_closed_form(w1: f64, w2: f64) -> f64 {
    w1 * w1 + w1 * w2 + (1.0 - w2) * (2.0 - w1 - w2) - 1.0 - (w1 - w2) / 2.0
}

/// One point of the dichotomic (ω₁, ω₂) scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridPoint {
    pub omega1: f64,
    pub omega2: f64,
    pub sigma_min: f64,
    pub sigma_min_prime: f64,
}

/// Closed-form Σ gaps over the triangle `0 ≤ ω₂ ≤ ω₁ ≤ 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridScan {
    pub resolution: usize,
    pub points: Vec<GridPoint>,
    pub min_sigma_min: f64,
    pub min_sigma_min_prime: f64,
    /// Largest disagreement between the two case formulas on the seam
    /// `ω₁ + ω₂ = 1`, where both are evaluated.
    pub max_seam_mismatch: f64,
}

/// Uniform scan of the closed triangle, `resolution` samples per axis,
/// including the boundaries and the seam.
pub fn dichotomic_grid_scan(resolution: usize) -> Result<GridScan> {
    if resolution < 2 {
        return Err(Error::BadResolution { resolution });
    }
    let step = 1.0 / (resolution - 1) as f64;
    let mut points = Vec::new();
    let mut min_sigma_min = f64::INFINITY;
    let mut min_sigma_min_prime = f64::INFINITY;
    let mut max_seam_mismatch: f64 = 0.0;
    for i in 0..resolution {
        let omega1 = i as f64 * step;
        for j in 0..=i {
            let omega2 = j as f64 * step;
            let sigma = dichotomic_sigma_closed_form(omega1, omega2)?;
            if (omega1 + omega2 - 1.0).abs() <= 1e-9 {
                let mismatch = (sigma_min_upper_case(omega1, omega2)
                    - sigma_min_lower_case(omega1, omega2))
                .abs();
                max_seam_mismatch = max_seam_mismatch.max(mismatch);
            }
            min_sigma_min = min_sigma_min.min(sigma.sigma_min);
            min_sigma_min_prime = min_sigma_min_prime.min(sigma.sigma_min_prime);
            points.push(GridPoint {
                omega1,
                omega2,
                sigma_min: sigma.sigma_min,
                sigma_min_prime: sigma.sigma_min_prime,
            });
        }
    }
    Ok(GridScan {
        resolution,
        points,
        min_sigma_min,
        min_sigma_min_prime,
        max_seam_mismatch,
    })
}

/// All measures of `A^λ` at one noise level, plus the γ offset at that λ.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepRecord {
    pub lambda: f64,
    pub el: f64,
    pub elprime: f64,
    pub e: f64,
    pub eprime: f64,
    pub gamma: f64,
}

/// Measures the fuzzified family `A^λ` over the given noise levels,
/// returned in descending λ (sharpest first).
pub fn lambda_sweep(a: &Povm, lambdas: &[f64]) -> Result<Vec<SweepRecord>> {
    let mut sorted = lambdas.to_vec();
    for &l in &sorted {
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::ParameterOutOfRange { value: l });
        }
    }
    sorted.sort_by(|x, y| y.total_cmp(x));
    let ub = 1.0 - 1.0 / a.n_outcomes() as f64;
    let mut records = Vec::with_capacity(sorted.len());
    for lambda in sorted {
        let fuzzed = a.fuzzify_white_noise(lambda)?;
        let report = measure_report(&fuzzed);
        for value in [report.el, report.elprime, report.e, report.eprime] {
            assert!((0.0..=ub + 1e-9).contains(&value));
        }
        records.push(SweepRecord {
            lambda,
            el: report.el,
            elprime: report.elprime,
            e: report.e,
            eprime: report.eprime,
            gamma: white_noise_gamma(a, lambda)?,
        });
    }
    Ok(records)
}

/// 17-significant-digit float formatting shared by the CSV emitters.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_sweep_csv<W: Write>(mut out: W, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(out, "lambda,eL,eLprime,e,eprime,gamma")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            format_f64(r.lambda),
            format_f64(r.el),
            format_f64(r.elprime),
            format_f64(r.e),
            format_f64(r.eprime),
            format_f64(r.gamma)
        )?;
    }
    Ok(())
}

pub fn write_grid_csv<W: Write>(mut out: W, scan: &GridScan) -> io::Result<()> {
    writeln!(out, "omega1,omega2,sigma_min,sigma_min_prime")?;
    for p in &scan.points {
        writeln!(
            out,
            "{},{},{},{}",
            format_f64(p.omega1),
            format_f64(p.omega2),
            format_f64(p.sigma_min),
            format_f64(p.sigma_min_prime)
        )?;
    }
    Ok(())
}
