//! Random generation of states, unitaries and POVMs, and the randomized
//! scan for qubit observables violating the Σ ordering conditions.
//!
//! The scan never asserts that the orderings hold: it partitions trials
//! into satisfied and violated, logs every violation with the full POVM
//! serialization so it can be re-verified independently, and tracks the
//! global minima of both Σ gaps. Trials are seeded individually through
//! [`crate::rng::derive_seed`], so reports are identical under any thread
//! count.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};
use crate::monotonicity::{sigma_report, SigmaReport};
use crate::observables::{DensityMatrix, Povm};
use crate::rng::{derive_seed, seeded_rng};
use crate::{Error, Result};

/// Σ gaps below this are logged as counterexamples; gaps in
/// `(VIOLATION_TOL, 0)` are logged separately as numerically marginal so
/// eigensolver dust is never reported as a violation.
pub const VIOLATION_TOL: f64 = -1e-9;

fn standard_complex_gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) / 2f64.sqrt()
}

fn ginibre(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |_, _| standard_complex_gaussian(rng))
}

/// Hilbert–Schmidt random state: `ρ = GG†/Tr[GG†]` with Ginibre `G`.
pub fn random_density(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    assert!(d >= 1);
    let g = ginibre(d, rng);
    let gg = g.matmul(&g.adjoint());
    let trace = gg.trace().re;
    DensityMatrix::new(HermitianMatrix::symmetrized(gg.scale(1.0 / trace)))
        .expect("normalized Gram matrix is a valid state")
}

/// Haar-style random unitary: Gram–Schmidt orthonormalization of a Ginibre
/// matrix, with each column phased so its first entry is real positive.
/// The phase convention makes the output a deterministic function of the
/// draws.
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(d >= 1);
    let g = ginibre(d, rng);
    let mut cols: Vec<Vec<C64>> = (0..d)
        .map(|c| (0..d).map(|r| g.get(r, c)).collect())
        .collect();
    // two modified Gram-Schmidt passes
    for _ in 0..2 {
        for k in 0..d {
            for j in 0..k {
                let proj: C64 = cols[j]
                    .iter()
                    .zip(&cols[k])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let basis = cols[j].clone();
                for (x, b) in cols[k].iter_mut().zip(basis) {
                    *x -= proj * b;
                }
            }
            let norm: f64 = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for x in cols[k].iter_mut() {
                *x /= norm;
            }
        }
    }
    for col in cols.iter_mut() {
        let lead = col
            .iter()
            .find(|z| z.norm() > 1e-12)
            .copied()
            .unwrap_or(C64::new(1.0, 0.0));
        let phase = lead / lead.norm();
        for z in col.iter_mut() {
            *z /= phase;
        }
    }
    ComplexMatrix::from_fn(d, |r, c| cols[c][r])
}

/// Random interior POVM: Gram matrices `G_i = M_i M_i†` normalized by the
/// symmetric square root of their sum, `A_i = S^{−1/2} G_i S^{−1/2}`.
pub fn random_povm(n: usize, d: usize, rng: &mut impl Rng) -> Result<Povm> {
    assert!(n >= 1 && d >= 1);
    let mut attempt = || -> Result<Povm> {
        let grams: Vec<ComplexMatrix> = (0..n)
            .map(|_| {
                let m = ginibre(d, rng);
                m.matmul(&m.adjoint())
            })
            .collect();
        let sum = HermitianMatrix::symmetrized(crate::linalg::sum_matrices_canonical(&grams));
        let inv_sqrt = sum.inv_psd_sqrt()?;
        let effects = grams
            .iter()
            .map(|g| {
                HermitianMatrix::symmetrized(inv_sqrt.matrix().matmul(g).matmul(inv_sqrt.matrix()))
            })
            .collect();
        Povm::new(effects)
    };
    // a singular sum has probability zero; one resample covers fp flukes
    attempt().or_else(|_| attempt())
}

/// Random rank-one PVM from the columns of a random unitary, zero-padded to
/// `n` outcomes when `n > d`.
pub fn random_rank1_pvm(n: usize, d: usize, rng: &mut impl Rng) -> Result<Povm> {
    assert!(
        n >= d,
        "a PVM with {n} outcomes on dimension {d} needs n >= d"
    );
    let u = random_unitary(d, rng);
    let mut effects: Vec<HermitianMatrix> = (0..d)
        .map(|k| {
            let col: Vec<C64> = (0..d).map(|r| u.get(r, k)).collect();
            HermitianMatrix::projector(&col)
        })
        .collect();
    effects.resize(n, HermitianMatrix::zeros(d));
    Povm::new(effects)
}

/// A logged trial: the sampled POVM in interchange form next to its Σ
/// report, sufficient for independent re-verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoggedTrial {
    pub n: usize,
    pub trial: u64,
    pub povm: serde_json::Value,
    pub sigma: SigmaReport,
}

/// Outcome of a conjecture scan over qubit observables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub seed: u64,
    pub d: usize,
    pub n_values: Vec<usize>,
    pub trials_per_n: u64,
    /// Trials with `Σ_min < −1e−9` or `Σ′_min < −1e−9`.
    pub counterexamples: Vec<LoggedTrial>,
    /// Trials with a Σ gap in `(−1e−9, 0)`: eigensolver-noise territory.
    pub marginal: Vec<LoggedTrial>,
    pub min_sigma_min: f64,
    pub min_sigma_min_prime: f64,
}

/// Samples `trials` random qubit POVMs per outcome count and records every
/// Σ ordering violation. Ten percent of trials mix the interior sample
/// with a random PVM at a random weight to cover the near-sharp boundary.
pub fn conjecture_scan(n_values: &[usize], trials: u64, seed: u64) -> Result<ScanReport> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    if n_values.is_empty() || n_values.contains(&0) {
        return Err(Error::BadOutcomeCounts);
    }
    let d = 2;
    let mut counterexamples = Vec::new();
    let mut marginal = Vec::new();
    let mut min_sigma_min = f64::INFINITY;
    let mut min_sigma_min_prime = f64::INFINITY;

    for (n_index, &n) in n_values.iter().enumerate() {
        let stream = derive_seed(seed, n_index as u64);
        let results: Vec<(SigmaReport, Option<Povm>)> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = seeded_rng(derive_seed(stream, trial));
                let povm = scan_trial_povm(n, d, &mut rng);
                let sigma = sigma_report(&povm);
                let log = sigma.sigma_min < 0.0 || sigma.sigma_min_p < 0.0;
                (sigma, log.then_some(povm))
            })
            .collect();
        for (trial, (sigma, logged)) in results.into_iter().enumerate() {
            min_sigma_min = min_sigma_min.min(sigma.sigma_min);
            min_sigma_min_prime = min_sigma_min_prime.min(sigma.sigma_min_p);
            if let Some(povm) = logged {
                let entry = LoggedTrial {
                    n,
                    trial: trial as u64,
                    povm: povm.to_json_value(),
                    sigma,
                };
                if sigma.sigma_min < VIOLATION_TOL || sigma.sigma_min_p < VIOLATION_TOL {
                    counterexamples.push(entry);
                } else {
                    marginal.push(entry);
                }
            }
        }
    }

    Ok(ScanReport {
        seed,
        d,
        n_values: n_values.to_vec(),
        trials_per_n: trials,
        counterexamples,
        marginal,
        min_sigma_min,
        min_sigma_min_prime,
    })
}

fn scan_trial_povm(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Povm {
    let interior = random_povm(n, d, rng).expect("interior POVM sampling cannot fail twice");
    let boundary_mix: f64 = rng.random();
    if boundary_mix < 0.1 && n >= d {
        let weight: f64 = rng.random();
        let pvm = random_rank1_pvm(n, d, rng).expect("rank-one PVM construction is total");
        pvm.convex_combine(&interior, weight)
            .expect("same-shape mixture is valid")
    } else {
        interior
    }
}

/// Recomputes the Σ report of a logged trial from its serialization.
pub fn reverify_logged_trial(entry: &LoggedTrial) -> Result<SigmaReport> {
    let povm = Povm::from_json_value(entry.povm.clone())?;
    Ok(sigma_report(&povm))
}
