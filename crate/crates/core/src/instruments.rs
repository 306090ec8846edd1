//! Executable measurement instruments and sequential-measurement sampling.
//!
//! Two instruments compatible with a POVM `{A_i}` are realized:
//!
//! - `Luder`: post-state `√A_i ρ √A_i / Tr[ρA_i]`; the outcome repeats with
//!   average probability `Tr[ρE]`.
//! - `JMax`: post-state the top eigenvector of `A_i`; this maximizes the
//!   repeat probability over all compatible instruments, achieving
//!   `Tr[ρX]`.
//!
//! [`sample_sequential`] Monte-Carlo samples outcome pairs of two
//! successive measurements. Shots are split into fixed blocks, each with a
//! seed derived from `(seed, block)`, so the count is reproducible
//! bit-for-bit under any thread schedule.
//!
//! [`estimate_qubit_e_matrix`] / [`estimate_qubit_x_matrix`] run the
//! six-probe repeat-frequency protocol on the Pauli eigenstates of an
//! unknown qubit observable, reconstruct the 2×2 repeat matrix
//! `[[a, c*], [c, b]]` from
//!
//! ```text
//! a = f_{z+}/n_{z+}    b = f_{z−}/n_{z−}
//! Re c = f_{x+}/n_{x+} − (a+b)/2    Im c = f_{y+}/n_{y+} − (a+b)/2
//! ```
//!
//! and estimate the worst-case measure through the closed-form smallest
//! eigenvalue `((a+b) − √((a−b)² + 4|c|²))/2` and the averaged measure
//! through `1 − (a+b)/2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::linalg::{sum_canonical, trace_product, C64};
use crate::measures::{e_matrix, x_matrix};
use crate::observables::{DensityMatrix, Povm};
use crate::rng::{derive_seed, seeded_rng};
use crate::{Error, Result};

/// Outcome probabilities below this never produce a post-state and are
/// excluded from sampling.
pub const ZERO_PROB_TOL: f64 = 1e-15;

/// Shots per deterministic sampling block. Part of the reproducibility
/// contract: changing it changes the sampled streams.
const SHOT_BLOCK: u64 = 1 << 14;

/// Which compatible instrument realizes the measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstrumentKind {
    Luder,
    JMax,
}

/// Probability of outcome `i` on `ρ` and the normalized post-measurement
/// state, or `None` when the outcome never occurs.
pub fn post_state(
    a: &Povm,
    i: usize,
    rho: &DensityMatrix,
    kind: InstrumentKind,
) -> Result<(f64, Option<DensityMatrix>)> {
    if i >= a.n_outcomes() {
        return Err(Error::OutcomeOutOfRange {
            index: i,
            n: a.n_outcomes(),
        });
    }
    if a.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            found: rho.dim(),
        });
    }
    let effect = a.effect(i);
    let p = trace_product(rho.matrix().matrix(), effect.matrix()).re;
    if p <= ZERO_PROB_TOL {
        return Ok((p.max(0.0), None));
    }
    let state = match kind {
        InstrumentKind::Luder => {
            let root = effect.psd_sqrt()?;
            let raw = root
                .matrix()
                .matmul(rho.matrix().matrix())
                .matmul(root.matrix());
            let sym = crate::linalg::HermitianMatrix::symmetrized(raw);
            let norm = sym.trace_real();
            DensityMatrix::new(crate::linalg::HermitianMatrix::symmetrized(
                sym.matrix().scale(1.0 / norm),
            ))?
        }
        InstrumentKind::JMax => {
            let top = effect.eig().max_eigenvector();
            DensityMatrix::pure(&top)
        }
    };
    Ok((p, Some(state)))
}

/// Exact average probability that the outcome repeats across two successive
/// measurements: `Tr[ρE]` for Luder, `Tr[ρX]` for JMax. Equals
/// `Σ_i p_i p_{ii}` with zero-probability outcomes contributing zero.
pub fn repeat_probability_exact(
    a: &Povm,
    rho: &DensityMatrix,
    kind: InstrumentKind,
) -> Result<f64> {
    if a.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            found: rho.dim(),
        });
    }
    let matrix = match kind {
        InstrumentKind::Luder => e_matrix(a),
        InstrumentKind::JMax => x_matrix(a),
    };
    Ok(trace_product(rho.matrix().matrix(), matrix.matrix()).re)
}

/// Tally of a sequential-measurement Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequentialSample {
    pub shots: u64,
    /// Shots whose second outcome equaled the first.
    pub repeat_count: u64,
    /// First-outcome tallies, one per outcome.
    pub outcome_histogram: Vec<u64>,
}

/// First- and second-outcome distributions of the sequential experiment;
/// fixed per (observable, state, instrument), so sampling reduces to two
/// inverse-CDF draws per shot.
struct SequentialTables {
    first: Vec<f64>,
    second_given_first: Vec<Vec<f64>>,
}

fn sequential_tables(
    a: &Povm,
    rho: &DensityMatrix,
    kind: InstrumentKind,
) -> Result<SequentialTables> {
    let n = a.n_outcomes();
    let mut first = vec![0.0; n];
    let mut second = vec![vec![0.0; n]; n];
    for i in 0..n {
        let (p, state) = post_state(a, i, rho, kind)?;
        match state {
            Some(post) => {
                first[i] = p;
                for (j, slot) in second[i].iter_mut().enumerate() {
                    let q = trace_product(post.matrix().matrix(), a.effect(j).matrix()).re;
                    *slot = q.max(0.0);
                }
            }
            None => first[i] = 0.0,
        }
    }
    Ok(SequentialTables {
        first,
        second_given_first: second,
    })
}

fn draw(pdf: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    let mut last = 0;
    for (j, &p) in pdf.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        cum += p;
        last = j;
        if u < cum {
            return j;
        }
    }
    last
}

/// Runs `shots` sequential double measurements, drawing the first outcome
/// from `Tr[ρA_i]` and the second from the instrument's post-state.
/// Deterministic for a given seed, independent of thread count.
pub fn sample_sequential(
    a: &Povm,
    rho: &DensityMatrix,
    kind: InstrumentKind,
    shots: u64,
    seed: u64,
) -> Result<SequentialSample> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let tables = sequential_tables(a, rho, kind)?;
    let n = a.n_outcomes();
    let blocks = shots.div_ceil(SHOT_BLOCK);
    let tallies: Vec<(u64, Vec<u64>)> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let block_shots = SHOT_BLOCK.min(shots - block * SHOT_BLOCK);
            let mut rng = seeded_rng(derive_seed(seed, block));
            let mut repeats = 0u64;
            let mut histogram = vec![0u64; n];
            for _ in 0..block_shots {
                let u1: f64 = rand::Rng::random(&mut rng);
                let u2: f64 = rand::Rng::random(&mut rng);
                let i = draw(&tables.first, u1);
                let j = draw(&tables.second_given_first[i], u2);
                histogram[i] += 1;
                if i == j {
                    repeats += 1;
                }
            }
            (repeats, histogram)
        })
        .collect();

    let mut repeat_count = 0u64;
    let mut outcome_histogram = vec![0u64; n];
    for (repeats, histogram) in tallies {
        repeat_count += repeats;
        for (acc, h) in outcome_histogram.iter_mut().zip(histogram) {
            *acc += h;
        }
    }
    Ok(SequentialSample {
        shots,
        repeat_count,
        outcome_histogram,
    })
}

/// Everything a simulation run produced, next to the exact value it
/// estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub instrument: InstrumentKind,
    pub shots: u64,
    pub seed: u64,
    pub repeat_count: u64,
    pub repeat_frequency: f64,
    pub exact_repeat_probability: f64,
    pub outcome_histogram: Vec<u64>,
}

pub fn simulate(
    a: &Povm,
    rho: &DensityMatrix,
    kind: InstrumentKind,
    shots: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let sample = sample_sequential(a, rho, kind, shots, seed)?;
    Ok(SimulationReport {
        instrument: kind,
        shots,
        seed,
        repeat_count: sample.repeat_count,
        repeat_frequency: sample.repeat_count as f64 / shots as f64,
        exact_repeat_probability: repeat_probability_exact(a, rho, kind)?,
        outcome_histogram: sample.outcome_histogram,
    })
}

/// Per-probe tally of the estimation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeCounts {
    pub n_shots: u64,
    pub repeat_count: u64,
}

/// Result of the six-probe tomographic estimation of a qubit observable's
/// repeat matrix and measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub instrument: InstrumentKind,
    pub seed: u64,
    pub shots_per_state: BTreeMap<String, ProbeCounts>,
    pub reconstructed_a: f64,
    pub reconstructed_b: f64,
    pub reconstructed_c_re: f64,
    pub reconstructed_c_im: f64,
    pub estimated_el: f64,
    pub estimated_elprime: f64,
}

/// The fixed probe order; probe `k` samples with sub-seed
/// `derive_seed(seed, k)`.
pub const PROBE_LABELS: [&str; 6] = ["z+", "z-", "x+", "x-", "y+", "y-"];

fn probe_state(label: &str) -> DensityMatrix {
    let h = 1.0 / 2f64.sqrt();
    match label {
        "z+" => DensityMatrix::basis_state(2, 0),
        "z-" => DensityMatrix::basis_state(2, 1),
        "x+" => DensityMatrix::pure(&[C64::new(h, 0.0), C64::new(h, 0.0)]),
        "x-" => DensityMatrix::pure(&[C64::new(h, 0.0), C64::new(-h, 0.0)]),
        "y+" => DensityMatrix::pure(&[C64::new(h, 0.0), C64::new(0.0, h)]),
        "y-" => DensityMatrix::pure(&[C64::new(h, 0.0), C64::new(0.0, -h)]),
        other => unreachable!("unknown probe label {other}"),
    }
}

/// Estimates the Luder repeat matrix `E` of an unknown qubit observable
/// from repeat frequencies on the six Pauli probes; `estimated_el` and
/// `estimated_elprime` are the Luder measures of the reconstruction.
pub fn estimate_qubit_e_matrix(
    a: &Povm,
    shots_per_probe: u64,
    seed: u64,
) -> Result<ExperimentRecord> {
    estimate_qubit(a, InstrumentKind::Luder, shots_per_probe, seed)
}

/// Same protocol with the repeat-optimal instrument: reconstructs the
/// X-matrix, so the estimates target the instrument-independent measures.
pub fn estimate_qubit_x_matrix(
    a: &Povm,
    shots_per_probe: u64,
    seed: u64,
) -> Result<ExperimentRecord> {
    estimate_qubit(a, InstrumentKind::JMax, shots_per_probe, seed)
}

fn estimate_qubit(
    a: &Povm,
    kind: InstrumentKind,
    shots_per_probe: u64,
    seed: u64,
) -> Result<ExperimentRecord> {
    if a.dim() != 2 {
        return Err(Error::NotQubit { dim: a.dim() });
    }
    if shots_per_probe == 0 {
        return Err(Error::NoShots);
    }
    let mut shots_per_state = BTreeMap::new();
    let mut frequency = BTreeMap::new();
    for (k, label) in PROBE_LABELS.iter().enumerate() {
        let rho = probe_state(label);
        let sample =
            sample_sequential(a, &rho, kind, shots_per_probe, derive_seed(seed, k as u64))?;
        frequency.insert(*label, sample.repeat_count as f64 / shots_per_probe as f64);
        shots_per_state.insert(
            label.to_string(),
            ProbeCounts {
                n_shots: shots_per_probe,
                repeat_count: sample.repeat_count,
            },
        );
    }

    let a_entry = frequency["z+"];
    let b_entry = frequency["z-"];
    let c_re = frequency["x+"] - (a_entry + b_entry) / 2.0;
    let c_im = frequency["y+"] - (a_entry + b_entry) / 2.0;

    let c_sqr = c_re * c_re + c_im * c_im;
    let disc = ((a_entry + b_entry) * (a_entry + b_entry) - 4.0 * (a_entry * b_entry - c_sqr))
        .max(0.0)
        .sqrt();
    let min_eigenvalue = ((a_entry + b_entry) - disc) / 2.0;

    Ok(ExperimentRecord {
        instrument: kind,
        seed,
        shots_per_state,
        reconstructed_a: a_entry,
        reconstructed_b: b_entry,
        reconstructed_c_re: c_re,
        reconstructed_c_im: c_im,
        estimated_el: 1.0 - min_eigenvalue,
        estimated_elprime: 1.0 - (a_entry + b_entry) / 2.0,
    })
}

/// `Σ_i p_i p_{ii}` assembled from per-outcome post-states; the brute-force
/// route to the repeat probability, used to cross-check the closed forms.
pub fn repeat_probability_by_outcomes(
    a: &Povm,
    rho: &DensityMatrix,
    kind: InstrumentKind,
) -> Result<f64> {
    let mut terms = Vec::with_capacity(a.n_outcomes());
    for i in 0..a.n_outcomes() {
        let (p, state) = post_state(a, i, rho, kind)?;
        match state {
            Some(post) => {
                let pii = trace_product(post.matrix().matrix(), a.effect(i).matrix()).re;
                terms.push(p * pii);
            }
            None => terms.push(0.0),
        }
    }
    Ok(sum_canonical(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HermitianMatrix;
    use crate::search::{random_density, random_povm};

    fn z_pvm() -> Povm {
        Povm::new(vec![
            HermitianMatrix::from_real_diag(&[1.0, 0.0]),
            HermitianMatrix::from_real_diag(&[0.0, 1.0]),
        ])
        .unwrap()
    }

    fn dichotomic_w() -> Povm {
        Povm::new(vec![
            HermitianMatrix::from_real_diag(&[0.8, 0.3]),
            HermitianMatrix::from_real_diag(&[0.2, 0.7]),
        ])
        .unwrap()
    }

    #[test]
    fn post_state_projective_repeat() {
        let z = z_pvm();
        let up = DensityMatrix::basis_state(2, 0);
        let (p, state) = post_state(&z, 0, &up, InstrumentKind::Luder).unwrap();
        assert_eq!(p, 1.0);
        assert!(
            state
                .unwrap()
                .matrix()
                .matrix()
                .sub(up.matrix().matrix())
                .max_abs_entry()
                < 1e-12
        );

        let (p, state) = post_state(&z, 1, &up, InstrumentKind::Luder).unwrap();
        assert_eq!(p, 0.0);
        assert!(state.is_none());
    }

    #[test]
    fn post_state_trivial_is_identity_channel() {
        let t = Povm::trivial(2, 2);
        let rho = random_density(2, &mut crate::rng::seeded_rng(3));
        let (p, state) = post_state(&t, 0, &rho, InstrumentKind::Luder).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!(
            state
                .unwrap()
                .matrix()
                .matrix()
                .sub(rho.matrix().matrix())
                .max_abs_entry()
                < 1e-10
        );
    }

    #[test]
    fn post_state_jmax_is_top_eigenprojector() {
        let w = dichotomic_w();
        let rho = DensityMatrix::maximally_mixed(2);
        let (p, state) = post_state(&w, 0, &rho, InstrumentKind::JMax).unwrap();
        assert!((p - 0.55).abs() < 1e-12);
        let m = state.unwrap();
        // top eigenvector of diag(0.8, 0.3) is |0>
        assert!((m.matrix().matrix().get(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn post_state_index_out_of_range() {
        let z = z_pvm();
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(matches!(
            post_state(&z, 5, &rho, InstrumentKind::Luder),
            Err(Error::OutcomeOutOfRange { .. })
        ));
    }

    #[test]
    fn exact_repeat_probabilities() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert_eq!(
            repeat_probability_exact(&z_pvm(), &rho, InstrumentKind::Luder).unwrap(),
            1.0
        );
        assert_eq!(
            repeat_probability_exact(&z_pvm(), &rho, InstrumentKind::JMax).unwrap(),
            1.0
        );

        let a = Povm::new(vec![
            HermitianMatrix::from_real_diag(&[0.5, 0.25, 0.0]),
            HermitianMatrix::from_real_diag(&[0.5, 0.75, 0.0]),
            HermitianMatrix::from_real_diag(&[0.0, 0.0, 1.0]),
        ])
        .unwrap();
        let mid = DensityMatrix::basis_state(3, 1);
        assert!(
            (repeat_probability_exact(&a, &mid, InstrumentKind::Luder).unwrap() - 0.625).abs()
                < 1e-12
        );

        let w = dichotomic_w();
        assert!(
            (repeat_probability_exact(&w, &rho, InstrumentKind::JMax).unwrap() - 0.755).abs()
                < 1e-12
        );
    }

    #[test]
    fn closed_form_equals_outcome_sum() {
        let mut rng = crate::rng::seeded_rng(113);
        for trial in 0..200 {
            let n = 2 + trial % 3;
            let d = 2 + trial % 2;
            let a = random_povm(n, d, &mut rng).unwrap();
            let rho = random_density(d, &mut rng);
            for kind in [InstrumentKind::Luder, InstrumentKind::JMax] {
                let closed = repeat_probability_exact(&a, &rho, kind).unwrap();
                let summed = repeat_probability_by_outcomes(&a, &rho, kind).unwrap();
                assert!((closed - summed).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn first_outcome_distribution_is_normalized_and_posts_valid() {
        let mut rng = crate::rng::seeded_rng(127);
        for trial in 0..200 {
            let n = 2 + trial % 3;
            let d = 2 + trial % 2;
            let a = random_povm(n, d, &mut rng).unwrap();
            let rho = random_density(d, &mut rng);
            let mut total = 0.0;
            for i in 0..n {
                // DensityMatrix::new inside post_state validates the post
                let (p, state) = post_state(&a, i, &rho, InstrumentKind::Luder).unwrap();
                total += p;
                if p > ZERO_PROB_TOL {
                    assert!(state.is_some());
                }
            }
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn pvm_sampling_always_repeats() {
        let z = z_pvm();
        let rho = DensityMatrix::pure(&[C64::new(0.6, 0.0), C64::new(0.8, 0.0)]);
        let sample = sample_sequential(&z, &rho, InstrumentKind::Luder, 20_000, 1).unwrap();
        assert_eq!(sample.repeat_count, 20_000);
    }

    #[test]
    fn trivial_sampling_matches_exact_value() {
        let t = Povm::trivial(2, 2);
        let rho = DensityMatrix::maximally_mixed(2);
        let shots = 1_000_000;
        let sample = sample_sequential(&t, &rho, InstrumentKind::Luder, shots, 77).unwrap();
        let freq = sample.repeat_count as f64 / shots as f64;
        let sigma = (0.25f64 / shots as f64).sqrt();
        assert!((freq - 0.5).abs() <= 3.0 * sigma, "freq = {freq}");
        let total: u64 = sample.outcome_histogram.iter().sum();
        assert_eq!(total, shots);
    }

    #[test]
    fn sampling_is_deterministic() {
        let w = dichotomic_w();
        let rho = DensityMatrix::maximally_mixed(2);
        let a = sample_sequential(&w, &rho, InstrumentKind::JMax, 50_000, 9).unwrap();
        let b = sample_sequential(&w, &rho, InstrumentKind::JMax, 50_000, 9).unwrap();
        assert_eq!(a, b);
        let c = sample_sequential(&w, &rho, InstrumentKind::JMax, 50_000, 10).unwrap();
        assert_ne!(a.repeat_count, c.repeat_count);
    }

    #[test]
    fn estimator_mean_is_unbiased() {
        let w = dichotomic_w();
        let rho = DensityMatrix::maximally_mixed(2);
        let exact = repeat_probability_exact(&w, &rho, InstrumentKind::Luder).unwrap();
        let shots = 10_000u64;
        let runs = 100;
        let mut mean = 0.0;
        for run in 0..runs {
            let sample = sample_sequential(&w, &rho, InstrumentKind::Luder, shots, run).unwrap();
            mean += sample.repeat_count as f64 / shots as f64;
        }
        mean /= runs as f64;
        let sem = (exact * (1.0 - exact) / shots as f64).sqrt() / (runs as f64).sqrt();
        assert!(
            (mean - exact).abs() <= 4.0 * sem,
            "mean {mean} vs exact {exact}"
        );
    }

    #[test]
    fn estimate_on_pvm_is_exact_zero() {
        let z = z_pvm();
        for record in [
            estimate_qubit_e_matrix(&z, 1000, 4).unwrap(),
            estimate_qubit_x_matrix(&z, 1000, 4).unwrap(),
        ] {
            assert_eq!(record.reconstructed_a, 1.0);
            assert_eq!(record.reconstructed_b, 1.0);
            assert_eq!(record.reconstructed_c_re, 0.0);
            assert_eq!(record.reconstructed_c_im, 0.0);
            assert_eq!(record.estimated_el, 0.0);
            assert_eq!(record.estimated_elprime, 0.0);
        }
    }

    #[test]
    fn estimate_records_all_probes_and_is_deterministic() {
        let w = dichotomic_w();
        let r1 = estimate_qubit_e_matrix(&w, 4000, 21).unwrap();
        let r2 = estimate_qubit_e_matrix(&w, 4000, 21).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.shots_per_state.len(), 6);
        for label in PROBE_LABELS {
            let counts = &r1.shots_per_state[label];
            assert_eq!(counts.n_shots, 4000);
            assert!(counts.repeat_count <= counts.n_shots);
        }
    }

    #[test]
    fn estimate_rejects_non_qubit() {
        let t = Povm::trivial(2, 3);
        assert!(matches!(
            estimate_qubit_e_matrix(&t, 100, 0),
            Err(Error::NotQubit { dim: 3 })
        ));
    }

    #[test]
    fn estimate_reconstructs_known_matrix() {
        // off-diagonal repeat matrix: conjugated observable so c != 0
        let w = dichotomic_w();
        let s = 1.0 / 2f64.sqrt();
        let h = crate::linalg::ComplexMatrix::from_rows(vec![
            vec![C64::new(s, 0.0), C64::new(s, 0.0)],
            vec![C64::new(s, 0.0), C64::new(-s, 0.0)],
        ])
        .unwrap();
        let rotated = w.conjugate_by_unitary(&h).unwrap();
        let record = estimate_qubit_e_matrix(&rotated, 2_000_000, 3).unwrap();
        let e = e_matrix(&rotated);
        assert!((record.reconstructed_a - e.matrix().get(0, 0).re).abs() < 5e-3);
        assert!((record.reconstructed_b - e.matrix().get(1, 1).re).abs() < 5e-3);
        assert!((record.reconstructed_c_re - e.matrix().get(1, 0).re).abs() < 5e-3);
        assert!((record.reconstructed_c_im - e.matrix().get(1, 0).im).abs() < 5e-3);
    }

    #[test]
    fn x_minus_e_is_positive_on_states() {
        let mut rng = crate::rng::seeded_rng(131);
        for trial in 0..1000 {
            let n = 2 + trial % 4;
            let d = 2 + trial % 3;
            let a = random_povm(n, d, &mut rng).unwrap();
            let rho = random_density(d, &mut rng);
            let lud = repeat_probability_exact(&a, &rho, InstrumentKind::Luder).unwrap();
            let opt = repeat_probability_exact(&a, &rho, InstrumentKind::JMax).unwrap();
            assert!(opt - lud >= -1e-10);
        }
    }
}
