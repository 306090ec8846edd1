//! POVM data model and the observable transformations used by the
//! measures: trivial observables, white-noise fuzzification, coarse
//! graining, convex combination, unitary conjugation and the depolarizing
//! dual channel.
//!
//! Outcome labels are decorative: no measure in this crate depends on them
//! or on the order of the effects list.

use serde::{Deserialize, Serialize};

use crate::linalg::{sum_matrices_canonical, ComplexMatrix, HermitianMatrix, C64, PSD_TOL};
use crate::{Error, Result};

/// Max entry deviation allowed in `Σ A_i − I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Max entry deviation allowed in `U†U − I` for conjugation.
pub const UNITARY_TOL: f64 = 1e-10;
/// Max entry deviation allowed in `A_i² − A_i` for the PVM test.
pub const PVM_TOL: f64 = 1e-9;

/// An observable: `n ≥ 1` PSD effects on a d-dimensional space summing to
/// the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<HermitianMatrix>,
    labels: Vec<String>,
}

impl Povm {
    /// Validates and wraps a list of effects; labels default to `"1".."n"`.
    pub fn new(effects: Vec<HermitianMatrix>) -> Result<Self> {
        let labels = (1..=effects.len()).map(|k| k.to_string()).collect();
        Self::with_labels(effects, labels)
    }

    pub fn with_labels(effects: Vec<HermitianMatrix>, labels: Vec<String>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::EmptyPovm);
        }
        let dim = effects[0].dim();
        for e in &effects {
            if e.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
        }
        if labels.len() != effects.len() {
            return Err(Error::LabelCount {
                expected: effects.len(),
                found: labels.len(),
            });
        }
        for (index, e) in effects.iter().enumerate() {
            let min_eigenvalue = e.min_eigenvalue();
            if min_eigenvalue < -PSD_TOL {
                return Err(Error::EffectNotPsd {
                    index,
                    min_eigenvalue,
                });
            }
        }
        let sum = sum_matrices_canonical(
            &effects
                .iter()
                .map(|e| e.matrix().clone())
                .collect::<Vec<_>>(),
        );
        let max_deviation = sum.sub(&ComplexMatrix::identity(dim)).max_abs_entry();
        if max_deviation > COMPLETENESS_TOL {
            return Err(Error::Incomplete { max_deviation });
        }
        Ok(Self {
            dim,
            effects,
            labels,
        })
    }

    /// The n-outcome trivial observable: n copies of `I/n`.
    pub fn trivial(n: usize, dim: usize) -> Povm {
        assert!(n >= 1 && dim >= 1);
        let effect = HermitianMatrix::identity(dim)
            .matrix()
            .scale(1.0 / n as f64);
        let effects = vec![HermitianMatrix::symmetrized(effect); n];
        Povm::new(effects).expect("trivial observable is always valid")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[HermitianMatrix] {
        &self.effects
    }

    pub fn effect(&self, i: usize) -> &HermitianMatrix {
        &self.effects[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// True iff every effect is idempotent within `1e−9` (max entry norm of
    /// `A_i² − A_i`).
    pub fn is_pvm(&self) -> bool {
        self.effects.iter().all(|e| {
            let sq = e.matrix().matmul(e.matrix());
            sq.sub(e.matrix()).max_abs_entry() <= PVM_TOL
        })
    }

    /// Heisenberg-picture unitary action: effects `U† A_i U`.
    pub fn conjugate_by_unitary(&self, u: &ComplexMatrix) -> Result<Povm> {
        if u.dim() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: u.dim(),
            });
        }
        let gram_dev = u
            .adjoint()
            .matmul(u)
            .sub(&ComplexMatrix::identity(self.dim))
            .max_abs_entry();
        if gram_dev > UNITARY_TOL {
            return Err(Error::NotUnitary {
                max_deviation: gram_dev,
            });
        }
        let ua = u.adjoint();
        let effects = self
            .effects
            .iter()
            .map(|e| HermitianMatrix::symmetrized(ua.matmul(e.matrix()).matmul(u)))
            .collect();
        Povm::with_labels(effects, self.labels.clone())
    }

    /// White-noise mixing: effects `λ A_i + (1−λ) I/n`.
    pub fn fuzzify_white_noise(&self, lambda: f64) -> Result<Povm> {
        check_unit_interval(lambda)?;
        let n = self.n_outcomes() as f64;
        let noise = ComplexMatrix::identity(self.dim).scale((1.0 - lambda) / n);
        let effects = self
            .effects
            .iter()
            .map(|e| HermitianMatrix::symmetrized(e.matrix().scale(lambda).add(&noise)))
            .collect();
        Povm::with_labels(effects, self.labels.clone())
    }

    /// Merges outcomes: one effect per partition block, summing the block.
    /// `partition` must list each outcome index exactly once (0-based).
    pub fn coarse_grain(&self, partition: &[Vec<usize>]) -> Result<Povm> {
        let n = self.n_outcomes();
        let mut seen = vec![false; n];
        for block in partition {
            if block.is_empty() {
                return Err(Error::BadPartition {
                    reason: "empty block".into(),
                });
            }
            for &i in block {
                if i >= n {
                    return Err(Error::BadPartition {
                        reason: format!("index {i} out of range for {n} outcomes"),
                    });
                }
                if seen[i] {
                    return Err(Error::BadPartition {
                        reason: format!("index {i} appears twice"),
                    });
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::BadPartition {
                reason: format!("index {missing} not covered"),
            });
        }
        let mut effects = Vec::with_capacity(partition.len());
        let mut labels = Vec::with_capacity(partition.len());
        for block in partition {
            let terms: Vec<ComplexMatrix> = block
                .iter()
                .map(|&i| self.effects[i].matrix().clone())
                .collect();
            effects.push(HermitianMatrix::symmetrized(sum_matrices_canonical(&terms)));
            labels.push(
                block
                    .iter()
                    .map(|&i| self.labels[i].as_str())
                    .collect::<Vec<_>>()
                    .join("+"),
            );
        }
        Povm::with_labels(effects, labels)
    }

    /// Outcome-wise mixture `λ A_i + (1−λ) B_i`.
    pub fn convex_combine(&self, other: &Povm, lambda: f64) -> Result<Povm> {
        check_unit_interval(lambda)?;
        if other.dim != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if other.n_outcomes() != self.n_outcomes() {
            return Err(Error::DimMismatch {
                expected: self.n_outcomes(),
                found: other.n_outcomes(),
            });
        }
        let effects = self
            .effects
            .iter()
            .zip(&other.effects)
            .map(|(a, b)| {
                HermitianMatrix::symmetrized(
                    a.matrix()
                        .scale(lambda)
                        .add(&b.matrix().scale(1.0 - lambda)),
                )
            })
            .collect();
        Povm::with_labels(effects, self.labels.clone())
    }

    /// Heisenberg-picture depolarizing channel: effects
    /// `t A_i + (1−t) Tr[A_i] I/d`. The trace weight keeps the output
    /// complete for arbitrary effects; for rank-one PVM effects it reduces
    /// to `t A_i + (1−t) I/d`.
    pub fn depolarize_dual(&self, t: f64) -> Result<Povm> {
        check_unit_interval(t)?;
        let d = self.dim as f64;
        let effects = self
            .effects
            .iter()
            .map(|e| {
                let weight = (1.0 - t) * e.trace_real() / d;
                let m = e
                    .matrix()
                    .scale(t)
                    .add(&ComplexMatrix::identity(self.dim).scale(weight));
                HermitianMatrix::symmetrized(m)
            })
            .collect();
        Povm::with_labels(effects, self.labels.clone())
    }

    /// Serializes to the interchange schema
    /// `{"dim", "effects": [[[[re, im]; d]; d]; n], "labels"?}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let default_labels: Vec<String> = (1..=self.n_outcomes()).map(|k| k.to_string()).collect();
        let wire = PovmWire {
            dim: self.dim,
            effects: self
                .effects
                .iter()
                .map(|e| matrix_to_wire(e.matrix()))
                .collect(),
            labels: if self.labels == default_labels {
                None
            } else {
                Some(self.labels.clone())
            },
        };
        serde_json::to_value(wire).expect("POVM wire form is always serializable")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value())
            .expect("POVM wire form is always serializable")
    }

    /// Parses and fully validates the interchange schema. Non-finite
    /// entries, non-Hermitian matrices and invalid POVMs are rejected.
    pub fn from_json_value(value: serde_json::Value) -> Result<Povm> {
        let wire: PovmWire = serde_json::from_value(value)?;
        wire.into_povm()
    }

    pub fn from_json_str(text: &str) -> Result<Povm> {
        let wire: PovmWire = serde_json::from_str(text)?;
        wire.into_povm()
    }
}

fn check_unit_interval(value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ParameterOutOfRange { value });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct PovmWire {
    dim: usize,
    effects: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

fn matrix_to_wire(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim())
        .map(|r| {
            (0..m.dim())
                .map(|c| [m.get(r, c).re, m.get(r, c).im])
                .collect()
        })
        .collect()
}

fn matrix_from_wire(dim: usize, rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::NotSquare { expected: dim });
    }
    let mut m = ComplexMatrix::zeros(dim);
    for (r, row) in rows.iter().enumerate() {
        for (c, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::NonFiniteEntry);
            }
            m.set(r, c, C64::new(re, im));
        }
    }
    Ok(m)
}

impl PovmWire {
    fn into_povm(self) -> Result<Povm> {
        if self.dim == 0 {
            return Err(Error::NotSquare { expected: 1 });
        }
        let mut effects = Vec::with_capacity(self.effects.len());
        for rows in &self.effects {
            effects.push(HermitianMatrix::new(matrix_from_wire(self.dim, rows)?)?);
        }
        match self.labels {
            Some(labels) => Povm::with_labels(effects, labels),
            None => Povm::new(effects),
        }
    }
}

/// A unit-trace PSD operator: the state the observable is measured on.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(m: HermitianMatrix) -> Result<Self> {
        let min = m.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        let trace = m.trace_real();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::TraceNotOne { trace });
        }
        Ok(Self { m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let m = ComplexMatrix::identity(dim).scale(1.0 / dim as f64);
        Self {
            m: HermitianMatrix::symmetrized(m),
        }
    }

    /// `|k⟩⟨k|` in the computational basis.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut diag = vec![0.0; dim];
        diag[k] = 1.0;
        Self {
            m: HermitianMatrix::from_real_diag(&diag),
        }
    }

    /// Pure state `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn pure(v: &[C64]) -> Self {
        Self {
            m: HermitianMatrix::projector(v),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.m
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let wire = StateWire {
            dim: self.dim(),
            entries: matrix_to_wire(self.m.matrix()),
        };
        serde_json::to_value(wire).expect("state wire form is always serializable")
    }

    pub fn from_json_str(text: &str) -> Result<DensityMatrix> {
        let wire: StateWire = serde_json::from_str(text)?;
        if wire.dim == 0 {
            return Err(Error::NotSquare { expected: 1 });
        }
        let m = matrix_from_wire(wire.dim, &wire.entries)?;
        DensityMatrix::new(HermitianMatrix::new(m)?)
    }
}

#[derive(Serialize, Deserialize)]
struct StateWire {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::EQ_TOL;
    use crate::measures;
    use crate::search::{random_povm, random_unitary};
    use rand::Rng;

    /// Three-outcome qutrit observable with effects
    /// diag(1/2, 1/4, 0), diag(1/2, 3/4, 0), diag(0, 0, 1).
    fn example_unsharp_qutrit() -> Povm {
        Povm::new(vec![
            HermitianMatrix::from_real_diag(&[0.5, 0.25, 0.0]),
            HermitianMatrix::from_real_diag(&[0.5, 0.75, 0.0]),
            HermitianMatrix::from_real_diag(&[0.0, 0.0, 1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn validates_example_qutrit() {
        let a = example_unsharp_qutrit();
        assert_eq!(a.n_outcomes(), 3);
        assert_eq!(a.dim(), 3);
        assert!(!a.is_pvm());
    }

    #[test]
    fn single_outcome_identity_is_valid_and_sharp() {
        let t = Povm::new(vec![HermitianMatrix::identity(3)]).unwrap();
        assert!(t.is_pvm());
        assert_eq!(t.n_outcomes(), 1);
    }

    #[test]
    fn completeness_violation_reports_deviation() {
        let e = HermitianMatrix::from_real_diag(&[0.6, 0.6]);
        match Povm::new(vec![e.clone(), e]) {
            Err(Error::Incomplete { max_deviation }) => {
                assert!((max_deviation - 0.2).abs() < 1e-12);
            }
            other => panic!("expected completeness error, got {other:?}"),
        }
    }

    #[test]
    fn psd_violation_names_index() {
        let ok = HermitianMatrix::from_real_diag(&[1.2, 1.0]);
        let bad = HermitianMatrix::from_real_diag(&[-0.2, 0.0]);
        match Povm::new(vec![ok, bad]) {
            Err(Error::EffectNotPsd { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected PSD error, got {other:?}"),
        }
    }

    #[test]
    fn pvm_detection() {
        let basis = Povm::new(vec![
            HermitianMatrix::from_real_diag(&[1.0, 0.0, 0.0]),
            HermitianMatrix::from_real_diag(&[0.0, 1.0, 0.0]),
            HermitianMatrix::from_real_diag(&[0.0, 0.0, 1.0]),
        ])
        .unwrap();
        assert!(basis.is_pvm());
        assert!(!example_unsharp_qutrit().is_pvm());
        assert!(!Povm::trivial(2, 2).is_pvm());
    }

    #[test]
    fn trivial_observables() {
        let t = Povm::trivial(2, 2);
        assert_eq!(t.effect(0).matrix().get(0, 0).re, 0.5);
        let single = Povm::trivial(1, 3);
        assert!(single.is_pvm());
        let t4 = Povm::trivial(4, 2);
        assert_eq!(t4.n_outcomes(), 4);
        assert_eq!(t4.effect(3).matrix().get(1, 1).re, 0.25);
    }

    #[test]
    fn conjugation_by_identity_and_hadamard() {
        let a = example_unsharp_qutrit();
        let id = ComplexMatrix::identity(3);
        let same = a.conjugate_by_unitary(&id).unwrap();
        assert_eq!(same.effect(1).matrix(), a.effect(1).matrix());

        let s = 1.0 / 2f64.sqrt();
        let h = ComplexMatrix::from_rows(vec![
            vec![C64::new(s, 0.0), C64::new(s, 0.0)],
            vec![C64::new(s, 0.0), C64::new(-s, 0.0)],
        ])
        .unwrap();
        let z = Povm::new(vec![
            HermitianMatrix::from_real_diag(&[1.0, 0.0]),
            HermitianMatrix::from_real_diag(&[0.0, 1.0]),
        ])
        .unwrap();
        let x = z.conjugate_by_unitary(&h).unwrap();
        // H conjugation sends the z projectors to the x projectors
        assert!((x.effect(0).matrix().get(0, 1).re - 0.5).abs() < 1e-12);
        assert!(x.is_pvm());
    }

    #[test]
    fn conjugation_rejects_non_unitary() {
        let a = Povm::trivial(2, 2);
        let m = ComplexMatrix::from_real_diag(&[1.0, 0.5]);
        assert!(matches!(
            a.conjugate_by_unitary(&m),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn conjugation_preserves_effect_spectra() {
        let mut rng = crate::rng::seeded_rng(31);
        for _ in 0..50 {
            let a = random_povm(3, 3, &mut rng).unwrap();
            let u = random_unitary(3, &mut rng);
            let b = a.conjugate_by_unitary(&u).unwrap();
            for (ea, eb) in a.effects().iter().zip(b.effects()) {
                let la = ea.eig().values;
                let lb = eb.eig().values;
                for (x, y) in la.iter().zip(&lb) {
                    assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn fuzzify_endpoints() {
        let a = example_unsharp_qutrit();
        let same = a.fuzzify_white_noise(1.0).unwrap();
        assert!(
            same.effect(0)
                .matrix()
                .sub(a.effect(0).matrix())
                .max_abs_entry()
                < 1e-15
        );
        let noise = a.fuzzify_white_noise(0.0).unwrap();
        let trivial = Povm::trivial(3, 3);
        assert!(
            noise
                .effect(2)
                .matrix()
                .sub(trivial.effect(2).matrix())
                .max_abs_entry()
                < 1e-15
        );
        assert!(a.fuzzify_white_noise(1.5).is_err());
        assert!(a.fuzzify_white_noise(-0.1).is_err());
    }

    #[test]
    fn fuzzify_composition_law() {
        let mut rng = crate::rng::seeded_rng(13);
        for _ in 0..100 {
            let a = random_povm(3, 2, &mut rng).unwrap();
            let l1: f64 = 0.05 + 0.95 * rng.random::<f64>();
            let l2: f64 = l1 * rng.random::<f64>();
            let gamma = l2 / l1;
            let two_step = a
                .fuzzify_white_noise(l1)
                .unwrap()
                .fuzzify_white_noise(gamma)
                .unwrap();
            let one_step = a.fuzzify_white_noise(l2).unwrap();
            for (x, y) in two_step.effects().iter().zip(one_step.effects()) {
                assert!(x.matrix().sub(y.matrix()).max_abs_entry() <= 1e-12);
            }
        }
    }

    #[test]
    fn coarse_grain_example_makes_pvm() {
        let a = example_unsharp_qutrit();
        let b = a.coarse_grain(&[vec![0, 1], vec![2]]).unwrap();
        assert_eq!(b.n_outcomes(), 2);
        assert!(b.is_pvm());
        assert_eq!(b.effect(0).matrix().get(0, 0).re, 1.0);
        assert_eq!(b.labels(), &["1+2".to_string(), "3".to_string()]);

        // singleton partition is the identity transformation
        let same = a.coarse_grain(&[vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(same.effect(1).matrix(), a.effect(1).matrix());

        // merging the trivial observable halves the outcome count
        let t2 = Povm::trivial(4, 2)
            .coarse_grain(&[vec![0, 1], vec![2, 3]])
            .unwrap();
        assert!(
            t2.effect(0)
                .matrix()
                .sub(Povm::trivial(2, 2).effect(0).matrix())
                .max_abs_entry()
                < 1e-15
        );
    }

    #[test]
    fn coarse_grain_rejects_malformed_partitions() {
        let a = example_unsharp_qutrit();
        assert!(matches!(
            a.coarse_grain(&[vec![0, 1]]),
            Err(Error::BadPartition { .. })
        ));
        assert!(matches!(
            a.coarse_grain(&[vec![0, 0], vec![1, 2]]),
            Err(Error::BadPartition { .. })
        ));
        assert!(matches!(
            a.coarse_grain(&[vec![0, 1], vec![2, 3]]),
            Err(Error::BadPartition { .. })
        ));
    }

    #[test]
    fn convex_combination() {
        let a = example_unsharp_qutrit();
        let b = Povm::new(vec![
            HermitianMatrix::from_real_diag(&[1.0, 0.0, 0.0]),
            HermitianMatrix::from_real_diag(&[0.0, 1.0, 0.0]),
            HermitianMatrix::from_real_diag(&[0.0, 0.0, 1.0]),
        ])
        .unwrap();
        assert_eq!(
            a.convex_combine(&b, 1.0).unwrap().effect(0).matrix(),
            a.effect(0).matrix()
        );
        assert_eq!(
            a.convex_combine(&b, 0.0).unwrap().effect(0).matrix(),
            b.effect(0).matrix()
        );
        let lam = 0.3;
        let c = a.convex_combine(&b, lam).unwrap();
        assert!((c.effect(0).matrix().get(0, 0).re - (1.0 - lam / 2.0)).abs() < 1e-15);
        assert!((c.effect(0).matrix().get(1, 1).re - lam / 4.0).abs() < 1e-15);

        let self_mix = a.convex_combine(&a, 0.42).unwrap();
        assert!(
            self_mix
                .effect(1)
                .matrix()
                .sub(a.effect(1).matrix())
                .max_abs_entry()
                < 1e-15
        );

        let w = Povm::trivial(2, 2);
        assert!(a.convex_combine(&w, 0.5).is_err());
    }

    #[test]
    fn depolarize_dual_cases() {
        let z = Povm::new(vec![
            HermitianMatrix::from_real_diag(&[1.0, 0.0]),
            HermitianMatrix::from_real_diag(&[0.0, 1.0]),
        ])
        .unwrap();
        let same = z.depolarize_dual(1.0).unwrap();
        assert_eq!(same.effect(0).matrix(), z.effect(0).matrix());

        let half = z.depolarize_dual(0.5).unwrap();
        // rank-one effects: t A_i + (1−t) I/d = A_i/2 + I/4
        assert!((half.effect(0).matrix().get(0, 0).re - 0.75).abs() < 1e-15);
        assert!((half.effect(0).matrix().get(1, 1).re - 0.25).abs() < 1e-15);

        // completeness survives arbitrary effects
        let a = example_unsharp_qutrit();
        let out = a.depolarize_dual(0.3).unwrap();
        assert_eq!(out.n_outcomes(), 3);
        assert!(z.depolarize_dual(1.2).is_err());
    }

    #[test]
    fn transformed_povms_stay_valid_on_random_inputs() {
        let mut rng = crate::rng::seeded_rng(17);
        for trial in 0..200 {
            let n = 2 + trial % 3;
            let a = random_povm(n, 2, &mut rng).unwrap();
            let lambda: f64 = rng.random();
            // Povm::new re-validates; reaching here means the invariants held.
            let f = a.fuzzify_white_noise(lambda).unwrap();
            assert_eq!(f.n_outcomes(), n);
            let g = a.coarse_grain(&[(0..n).collect()]).unwrap();
            assert_eq!(g.n_outcomes(), 1);
            let c = a.convex_combine(&a, lambda).unwrap();
            assert_eq!(c.n_outcomes(), n);
        }
    }

    #[test]
    fn measures_invariant_under_random_conjugation() {
        let mut rng = crate::rng::seeded_rng(23);
        for trial in 0..100 {
            let n = 2 + trial % 3;
            let d = 2 + trial % 2;
            let a = random_povm(n, d, &mut rng).unwrap();
            let u = random_unitary(d, &mut rng);
            let b = a.conjugate_by_unitary(&u).unwrap();
            let ra = measures::measure_report(&a);
            let rb = measures::measure_report(&b);
            assert!((ra.el - rb.el).abs() <= EQ_TOL);
            assert!((ra.elprime - rb.elprime).abs() <= EQ_TOL);
            assert!((ra.e - rb.e).abs() <= EQ_TOL);
            assert!((ra.eprime - rb.eprime).abs() <= EQ_TOL);
            assert!((ra.luo_f - rb.luo_f).abs() <= EQ_TOL);
            assert_eq!(ra.is_pvm, rb.is_pvm);
        }
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let a = example_unsharp_qutrit();
        let text = a.to_json_string();
        assert!(!text.contains("labels"), "default labels stay implicit");
        let back = Povm::from_json_str(&text).unwrap();
        assert_eq!(back, a);

        let named = Povm::with_labels(
            a.effects().to_vec(),
            vec!["left".into(), "right".into(), "top".into()],
        )
        .unwrap();
        let back = Povm::from_json_str(&named.to_json_string()).unwrap();
        assert_eq!(back.labels(), named.labels());

        assert!(Povm::from_json_str("{not json").is_err());
        let bad = r#"{"dim": 2, "effects": [[[[0.6,0],[0,0]],[[0,0],[0.6,0]]], [[[0.6,0],[0,0]],[[0,0],[0.6,0]]]]}"#;
        assert!(matches!(
            Povm::from_json_str(bad),
            Err(Error::Incomplete { .. })
        ));
    }

    #[test]
    fn density_matrix_construction() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!((rho.matrix().trace_real() - 1.0).abs() < 1e-15);
        let pure = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        assert!((pure.matrix().trace_real() - 1.0).abs() < 1e-12);
        assert!(DensityMatrix::new(HermitianMatrix::from_real_diag(&[0.9, 0.9])).is_err());
        assert!(DensityMatrix::new(HermitianMatrix::from_real_diag(&[1.5, -0.5])).is_err());
    }
}
