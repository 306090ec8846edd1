//! Unsharpness measures of an observable and the matrices generating them.
//!
//! For a POVM `{A_i}` measured twice in immediate succession:
//!
//! - under the Luder instrument the probability that the outcome repeats is
//!   `Tr[ρ E]` with `E = Σ A_i²` (the E-matrix);
//! - under the best compatible instrument it is `Tr[ρ X]` with
//!   `X = Σ ‖A_i‖ A_i` (the X-matrix).
//!
//! The never-repeat probabilities derived from these give four scalar
//! measures: the worst case over states (`el`, `e`, via the smallest
//! eigenvalue) and the average over state space (`elprime`, `eprime`, via
//! the trace against `I/d`). All of them vanish on PVMs, are bounded by
//! `1 − 1/n`, and ignore outcome values and labels entirely.
//!
//! The state-dependent noise matrix `F_ρ` connects this picture to the
//! uncertainty-based measure `f` (entrywise ℓ¹ norm of `F_{I/d}`):
//! `Tr[F_ρ] = el_ρ` and `‖F_{I/d}‖_tr = elprime` hold identically.

use serde::{Deserialize, Serialize};

use crate::linalg::{
    sum_canonical, sum_matrices_canonical, trace_product, ComplexMatrix, HermitianMatrix,
};
use crate::observables::{DensityMatrix, Povm};
use crate::{Error, Result};

/// `E = Σ_i A_i²`: PSD, `E ≤ I`, and `Tr[ρE]` is the Luder repeat
/// probability.
pub fn e_matrix(a: &Povm) -> HermitianMatrix {
    let squares: Vec<ComplexMatrix> = a
        .effects()
        .iter()
        .map(|e| e.matrix().matmul(e.matrix()))
        .collect();
    HermitianMatrix::symmetrized(sum_matrices_canonical(&squares))
}

/// `X = Σ_i ‖A_i‖ A_i`: PSD, and `Tr[ρX]` is the best repeat probability
/// over all compatible instruments.
pub fn x_matrix(a: &Povm) -> HermitianMatrix {
    let terms: Vec<ComplexMatrix> = a
        .effects()
        .iter()
        .map(|e| e.matrix().scale(e.operator_norm()))
        .collect();
    HermitianMatrix::symmetrized(sum_matrices_canonical(&terms))
}

/// Sum of the effect operator norms, `Σ_i ‖A_i‖`, accumulated canonically.
pub fn sum_effect_norms(a: &Povm) -> f64 {
    sum_canonical(a.effects().iter().map(|e| e.operator_norm()).collect())
}

fn check_dims(a: &Povm, rho: &DensityMatrix) -> Result<()> {
    if a.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Never-repeat probability for the Luder instrument on `ρ`:
/// `Tr[ρ(I − E)] ∈ [0, 1]`.
pub fn luder_unsharpness_for(a: &Povm, rho: &DensityMatrix) -> Result<f64> {
    check_dims(a, rho)?;
    let e = e_matrix(a);
    let value = 1.0 - trace_product(rho.matrix().matrix(), e.matrix()).re;
    Ok(value.clamp(0.0, 1.0))
}

/// Worst-case Luder never-repeat probability: `‖I − E‖ = 1 − λ_min(E)`,
/// attained at the eigenstate of the minimal eigenvalue. Report key `el`.
pub fn luder_unsharpness(a: &Povm) -> f64 {
    (1.0 - e_matrix(a).eig().min_value()).max(0.0)
}

/// State-averaged Luder never-repeat probability: `1 − Tr[E]/d`, which is
/// the worst-case measure evaluated on `I/d`. Report key `elprime`.
pub fn mean_luder_unsharpness(a: &Povm) -> f64 {
    (1.0 - e_matrix(a).trace_real() / a.dim() as f64).max(0.0)
}

/// Never-repeat probability minimized over all compatible instruments:
/// `Tr[ρ(I − X)]`.
pub fn min_unsharpness_for(a: &Povm, rho: &DensityMatrix) -> Result<f64> {
    check_dims(a, rho)?;
    let x = x_matrix(a);
    let value = 1.0 - trace_product(rho.matrix().matrix(), x.matrix()).re;
    Ok(value.clamp(0.0, 1.0))
}

/// Instrument-independent unsharpness: `‖I − X‖ = 1 − λ_min(X)`.
/// Report key `e`.
pub fn min_unsharpness(a: &Povm) -> f64 {
    (1.0 - x_matrix(a).eig().min_value()).max(0.0)
}

/// State-averaged instrument-independent unsharpness: `1 − Tr[X]/d`.
/// Report key `eprime`.
pub fn mean_min_unsharpness(a: &Povm) -> f64 {
    (1.0 - x_matrix(a).trace_real() / a.dim() as f64).max(0.0)
}

/// The n×n noise matrix
/// `[F_ρ]_{ij} = δ_{ij} Tr[ρ A_i] − Tr[ρ (A_iA_j + A_jA_i)/2]`;
/// real symmetric and PSD, zero exactly when the observable is a PVM.
pub fn f_matrix(a: &Povm, rho: &DensityMatrix) -> Result<HermitianMatrix> {
    check_dims(a, rho)?;
    let n = a.n_outcomes();
    let r = rho.matrix().matrix();
    let mut f = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let ai = a.effect(i).matrix();
            let aj = a.effect(j).matrix();
            let anticomm = ai.matmul(aj).add(&aj.matmul(ai)).scale(0.5);
            let mut value = -trace_product(r, &anticomm).re;
            if i == j {
                value += trace_product(r, ai).re;
            }
            f.set(i, j, num_complex::Complex64::new(value, 0.0));
            f.set(j, i, num_complex::Complex64::new(value, 0.0));
        }
    }
    Ok(HermitianMatrix::symmetrized(f))
}

/// Uncertainty-based unsharpness: entrywise ℓ¹ norm of `F_{I/d}`.
pub fn luo_f(a: &Povm) -> f64 {
    let rho = DensityMatrix::maximally_mixed(a.dim());
    f_matrix(a, &rho)
        .expect("dimensions match by construction")
        .matrix()
        .entrywise_l1_norm()
}

/// Residuals of the two identities tying `F_ρ` to the Luder measures.
/// Both are zero in exact arithmetic.
#[derive(Debug, Clone, Copy)]
pub struct CrossIdentityResiduals {
    /// `|Tr[F_ρ] − el_ρ|`
    pub f_trace_vs_luder: f64,
    /// `|‖F_{I/d}‖_tr − elprime|`
    pub f_trace_norm_vs_mean: f64,
}

pub fn cross_identities(a: &Povm, rho: &DensityMatrix) -> Result<CrossIdentityResiduals> {
    let f = f_matrix(a, rho)?;
    let lhs1 = f.trace_real();
    let rhs1 = luder_unsharpness_for(a, rho)?;

    let f_mixed = f_matrix(a, &DensityMatrix::maximally_mixed(a.dim()))?;
    let lhs2 = f_mixed.trace_norm();
    let rhs2 = mean_luder_unsharpness(a);

    Ok(CrossIdentityResiduals {
        f_trace_vs_luder: (lhs1 - rhs1).abs(),
        f_trace_norm_vs_mean: (lhs2 - rhs2).abs(),
    })
}

/// Every scalar measure of one observable. Keys are frozen interchange
/// format; see the crate docs for the measure definitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub n: usize,
    pub d: usize,
    pub el: f64,
    pub elprime: f64,
    pub e: f64,
    pub eprime: f64,
    pub luo_f: f64,
    pub upper_bound: f64,
    pub is_pvm: bool,
}

/// Computes all measures of `a` and checks the bound chain
/// `eprime ≤ e ≤ el ≤ 1 − 1/n` and `elprime ≤ el` they satisfy.
pub fn measure_report(a: &Povm) -> MeasureReport {
    let n = a.n_outcomes();
    let upper_bound = 1.0 - 1.0 / n as f64;
    let report = MeasureReport {
        n,
        d: a.dim(),
        el: luder_unsharpness(a),
        elprime: mean_luder_unsharpness(a),
        e: min_unsharpness(a),
        eprime: mean_min_unsharpness(a),
        luo_f: luo_f(a),
        upper_bound,
        is_pvm: a.is_pvm(),
    };
    for (name, value) in [
        ("el", report.el),
        ("elprime", report.elprime),
        ("e", report.e),
        ("eprime", report.eprime),
    ] {
        assert!(
            (0.0..=upper_bound + 1e-9).contains(&value),
            "measure {name} = {value} outside [0, {upper_bound} + 1e-9]"
        );
    }
    assert!(
        report.e <= report.el + 1e-9,
        "instrument optimization cannot hurt"
    );
    assert!(
        report.eprime <= report.e + 1e-9,
        "average cannot exceed max"
    );
    assert!(
        report.elprime <= report.el + 1e-9,
        "average cannot exceed max"
    );
    assert!(report.luo_f >= 0.0);
    report
}
