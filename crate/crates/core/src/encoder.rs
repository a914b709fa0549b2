//! Maps d×d matrices to Pauli sums, element by element over bitmask-subset unions.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::encoding::{ceil_log2, EncodingSpec};
use crate::error::{Error, Result};
use crate::operators::{bosonic, Origin, QuditMatrix};
use crate::pauli::{Pauli, PauliString, PauliSum, PRUNE_EPS};

/// Input entries below this magnitude are structural zeros.
pub const ZERO_ENTRY_EPS: f64 = 1e-14;

/// Residual threshold for accepting a diagonal binary-decomposable fit.
pub const DBD_FIT_EPS: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodedOperator {
    pub sum: PauliSum,
    pub spec: EncodingSpec,
    /// Hex SHA-256 of the source matrix entries.
    pub source_digest: String,
}

impl EncodedOperator {
    pub fn n_qubits(&self) -> usize {
        self.sum.n_qubits()
    }
}

// |bra><ket| on one qubit as a two-term Pauli expansion.
fn local_factor(bra: bool, ket: bool) -> [(Option<Pauli>, Complex64); 2] {
    let h = 0.5;
    match (bra, ket) {
        (false, true) => [
            (Some(Pauli::X), Complex64::new(h, 0.0)),
            (Some(Pauli::Y), Complex64::new(0.0, h)),
        ],
        (true, false) => [
            (Some(Pauli::X), Complex64::new(h, 0.0)),
            (Some(Pauli::Y), Complex64::new(0.0, -h)),
        ],
        (false, false) => [
            (None, Complex64::new(h, 0.0)),
            (Some(Pauli::Z), Complex64::new(h, 0.0)),
        ],
        (true, true) => [
            (None, Complex64::new(h, 0.0)),
            (Some(Pauli::Z), Complex64::new(-h, 0.0)),
        ],
    }
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

fn accumulate_element(
    spec: &EncodingSpec,
    l: usize,
    lp: usize,
    coeff: Complex64,
    out: &mut BTreeMap<PauliString, Complex64>,
) -> Result<()> {
    let bra = spec.encode(l)?;
    let ket = spec.encode(lp)?;
    let qubits = union(&spec.bitmask_subset(l)?, &spec.bitmask_subset(lp)?);
    let factors: Vec<_> = qubits
        .iter()
        .map(|&q| local_factor(bra.get(q), ket.get(q)))
        .collect();
    let k = qubits.len();
    let mut ops = Vec::with_capacity(k);
    for choice in 0..(1usize << k) {
        ops.clear();
        let mut c = coeff;
        for (i, f) in factors.iter().enumerate() {
            let (p, w) = f[(choice >> i) & 1];
            c *= w;
            if let Some(p) = p {
                ops.push((qubits[i], p));
            }
        }
        *out.entry(PauliString::from_sorted(ops.clone()))
            .or_insert(Complex64::new(0.0, 0.0)) += c;
    }
    Ok(())
}

/// Encodes `coeff · |l><l'|`.
pub fn encode_element(
    spec: &EncodingSpec,
    l: usize,
    lp: usize,
    coeff: Complex64,
) -> Result<PauliSum> {
    let mut terms = BTreeMap::new();
    accumulate_element(spec, l, lp, coeff, &mut terms)?;
    PauliSum::from_terms(spec.num_qubits(), terms).map(|s| s.simplify(PRUNE_EPS))
}

/// Encodes `coeff · (|l><l'| + |l'><l|)`.
pub fn encode_hermitian_pair(
    spec: &EncodingSpec,
    l: usize,
    lp: usize,
    coeff: f64,
) -> Result<PauliSum> {
    let mut terms = BTreeMap::new();
    let c = Complex64::new(coeff, 0.0);
    accumulate_element(spec, l, lp, c, &mut terms)?;
    if l != lp {
        accumulate_element(spec, lp, l, c, &mut terms)?;
    }
    PauliSum::from_terms(spec.num_qubits(), terms).map(|s| s.simplify(PRUNE_EPS))
}

pub fn matrix_digest(a: &QuditMatrix) -> String {
    let mut h = Sha256::new();
    h.update((a.d() as u64).to_le_bytes());
    for i in 0..a.d() {
        for j in 0..a.d() {
            let c = a.get(i, j);
            h.update(c.re.to_le_bytes());
            h.update(c.im.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn encode_matrix(spec: &EncodingSpec, a: &QuditMatrix) -> Result<EncodedOperator> {
    if a.d() != spec.d {
        return Err(Error::DimensionMismatch {
            expected: spec.d,
            got: a.d(),
        });
    }
    let mut terms = BTreeMap::new();
    for l in 0..a.d() {
        for lp in 0..a.d() {
            let c = a.get(l, lp);
            if c.norm() >= ZERO_ENTRY_EPS {
                accumulate_element(spec, l, lp, c, &mut terms)?;
            }
        }
    }
    let sum = PauliSum::from_terms(spec.num_qubits(), terms)?.simplify(PRUNE_EPS);
    Ok(EncodedOperator {
        sum,
        spec: *spec,
        source_digest: matrix_digest(a),
    })
}

/// Affine fit of a diagonal over the standard-binary bits of the level index:
/// `A_ll = offset + Σ_i k_i x_i(l)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DbdFit {
    pub offset: f64,
    pub k: Vec<f64>,
    pub residual: f64,
}

/// Returns the fit when `a` is real diagonal and its diagonal is affine in the
/// SB bits of the realized levels.
pub fn detect_dbd(a: &QuditMatrix) -> Option<DbdFit> {
    if !a.is_diagonal(ZERO_ENTRY_EPS) {
        return None;
    }
    let d = a.d();
    if (0..d).any(|l| a.get(l, l).im.abs() >= ZERO_ENTRY_EPS) {
        return None;
    }
    let kbits = ceil_log2(d).max(1);
    let design = DMatrix::from_fn(d, kbits + 1, |l, c| match c {
        0 => 1.0,
        _ => ((l >> (c - 1)) & 1) as f64,
    });
    let target = DVector::from_fn(d, |l, _| a.get(l, l).re);
    let svd = design.clone().svd(true, true);
    let x = svd.solve(&target, 1e-12).ok()?;
    let residual = (&design * &x - &target).amax();
    (residual < DBD_FIT_EPS).then(|| DbdFit {
        offset: x[0],
        k: x.iter().skip(1).copied().collect(),
        residual,
    })
}

/// Rebuilds a bosonic operator at the next power-of-two truncation.
///
/// Spin, grid and custom matrices carry a dimension that cannot be changed
/// without altering the physics, so they are refused.
pub fn augment_truncation(a: &QuditMatrix) -> Result<QuditMatrix> {
    match a.origin() {
        Origin::Boson { op } => {
            let target = a.d().next_power_of_two();
            if target == a.d() {
                Ok(a.clone())
            } else {
                bosonic(target, *op)
            }
        }
        Origin::Spin { .. } => Err(Error::AugmentationRefused(
            "spin dimension is physical; extra levels would be unphysical leakage states".into(),
        )),
        Origin::FirstQuantizedX { .. } => Err(Error::AugmentationRefused(
            "grid size of a first-quantized operator is not a truncation".into(),
        )),
        Origin::Random { .. } | Origin::Custom => Err(Error::AugmentationRefused(
            "matrix has no bosonic origin to rebuild from".into(),
        )),
    }
}
