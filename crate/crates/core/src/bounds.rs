//! Pauli-length distributions and CNOT upper bounds for encoded matrix elements.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::staircase_cnot_count;
use crate::encoder::encode_matrix;
use crate::encoding::EncodingSpec;
use crate::error::{Error, Result};
use crate::operators::QuditMatrix;

/// Largest union size accepted; keeps every count inside `u64`.
pub const MAX_UNION: usize = 60;

/// One Hermitian pair `α|l><l'| + h.c.` (or a diagonal element when `d_h = 0`)
/// whose codewords differ in `d_h` of the `k` bits they act on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub d_h: usize,
    pub k: usize,
}

impl BoundQuery {
    pub fn new(d_h: usize, k: usize) -> Result<Self> {
        if k == 0 || d_h > k || k > MAX_UNION {
            return Err(Error::InvalidBoundQuery { d_h, k });
        }
        Ok(Self { d_h, k })
    }

    pub fn is_diagonal(&self) -> bool {
        self.d_h == 0
    }
}

pub fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Number of weight-`p` strings, keyed by `p` (zero buckets omitted).
pub fn pauli_length_distribution(q: BoundQuery) -> BTreeMap<usize, u64> {
    if q.is_diagonal() {
        return (0..=q.k).map(|p| (p, binomial(q.k, p))).collect();
    }
    let half = 1u64 << (q.d_h - 1);
    (q.d_h..=q.k)
        .map(|p| (p, half * binomial(q.k - q.d_h, p - q.d_h)))
        .collect()
}

/// `Σ_{p≥2} f(p) (2p - 2)`.
pub fn cnot_upper_bound(q: BoundQuery) -> u64 {
    pauli_length_distribution(q)
        .into_iter()
        .filter(|&(p, _)| p >= 2)
        .map(|(p, n)| n * (2 * p as u64 - 2))
        .sum()
}

/// Closed form of [`cnot_upper_bound`]: `K 2^K - 2^{K+1} + 2` on the diagonal,
/// `2^{K-1} (K + d_H - 2)` otherwise.
pub fn cnot_upper_bound_closed(q: BoundQuery) -> u64 {
    let k = q.k as u64;
    if q.is_diagonal() {
        k * (1 << k) + 2 - 2 * (1 << k)
    } else {
        (1u64 << (k - 1)) * (k + q.d_h as u64 - 2)
    }
}

/// Compact-code forms in terms of `d = 2^K`; `None` unless `d` is a power of two
/// and `d_h ≤ 2`.
pub fn dense_code_upper_bound(d_h: usize, d: usize) -> Option<f64> {
    if d < 2 || !d.is_power_of_two() {
        return None;
    }
    let d = d as f64;
    let lg = d.log2();
    match d_h {
        0 => Some(d * lg - 2.0 * d + 2.0),
        1 => Some(0.5 * (d * lg - d)),
        2 => Some(0.5 * d * lg),
        _ => None,
    }
}

/// Staircase CNOT total over the simplified encoded operator.
pub fn operator_upper_bound(spec: &EncodingSpec, a: &QuditMatrix) -> Result<usize> {
    Ok(staircase_cnot_count(&encode_matrix(spec, a)?.sum))
}

/// Hamming distance and bitmask-union size for a level pair under `spec`.
pub fn pair_query(spec: &EncodingSpec, l: usize, lp: usize) -> Result<BoundQuery> {
    let a = spec.encode(l)?;
    let b = spec.encode(lp)?;
    let mut union = spec.bitmask_subset(l)?;
    union.extend(spec.bitmask_subset(lp)?);
    union.sort_unstable();
    union.dedup();
    let d_h = union.iter().filter(|&&i| a.get(i) != b.get(i)).count();
    BoundQuery::new(d_h, union.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeFamily {
    Unary,
    BlockUnary,
    Compact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sparsity {
    Pair,
    Tridiagonal,
    Dense,
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeFamily::Unary => "unary",
            CodeFamily::BlockUnary => "block_unary",
            CodeFamily::Compact => "compact",
        })
    }
}

/// Asymptotic entangling-gate upper bound for Trotterizing one d-level operator.
pub fn asymptotic_class(family: CodeFamily, sparsity: Sparsity) -> &'static str {
    match (family, sparsity) {
        (CodeFamily::Unary, Sparsity::Pair) => "O(1)",
        (CodeFamily::Unary, Sparsity::Tridiagonal) => "O(d)",
        (CodeFamily::Unary, Sparsity::Dense) => "O(d^2)",
        (CodeFamily::BlockUnary, Sparsity::Pair) => "O(g log g)",
        (CodeFamily::BlockUnary, Sparsity::Tridiagonal) => "O(d g log g)",
        (CodeFamily::BlockUnary, Sparsity::Dense) => "O(d^2 g log g)",
        (CodeFamily::Compact, Sparsity::Pair) => "O(d log d)",
        (CodeFamily::Compact, Sparsity::Tridiagonal) => "O(d^2 log d)",
        (CodeFamily::Compact, Sparsity::Dense) => "O(d^2 log d)",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::trotter_step;
    use crate::encoder::{encode_element, encode_hermitian_pair};
    use crate::encoding::LocalCode;
    use crate::operators::{bosonic, tridiag_test_matrix, BosonOp};
    use num_complex::Complex64;

    fn q(d_h: usize, k: usize) -> BoundQuery {
        BoundQuery::new(d_h, k).unwrap()
    }

    #[test]
    fn distributions() {
        assert_eq!(
            pauli_length_distribution(q(1, 3)),
            BTreeMap::from([(1, 1), (2, 2), (3, 1)])
        );
        assert_eq!(pauli_length_distribution(q(4, 4)), BTreeMap::from([(4, 8)]));
        assert_eq!(
            pauli_length_distribution(q(0, 2)),
            BTreeMap::from([(0, 1), (1, 2), (2, 1)])
        );
        for k in 1..=10 {
            for d_h in 0..=k {
                let total: u64 = pauli_length_distribution(q(d_h, k)).values().sum();
                assert_eq!(total, if d_h == 0 { 1 << k } else { 1 << (k - 1) });
            }
        }
    }

    #[test]
    fn upper_bounds() {
        assert_eq!(cnot_upper_bound(q(1, 3)), 8);
        assert_eq!(cnot_upper_bound(q(2, 3)), 12);
        assert_eq!(cnot_upper_bound(q(0, 2)), 2);
        assert_eq!(cnot_upper_bound(q(2, 4)), 32);
        for k in 1..=20 {
            for d_h in 0..=k {
                assert_eq!(
                    cnot_upper_bound(q(d_h, k)),
                    cnot_upper_bound_closed(q(d_h, k)),
                    "{d_h} {k}"
                );
            }
            let kk = k as u64;
            assert_eq!(cnot_upper_bound(q(1, k)), ((1 << kk) * kk - (1 << kk)) / 2);
            if k >= 2 {
                assert_eq!(cnot_upper_bound(q(2, k)), ((1 << kk) * kk) / 2);
            }
        }
    }

    #[test]
    fn dense_forms_follow_general_forms() {
        for k in 1..=10 {
            let d = 1usize << k;
            for d_h in 0..=2.min(k) {
                let want = cnot_upper_bound(q(d_h, k)) as f64;
                assert_eq!(dense_code_upper_bound(d_h, d), Some(want));
            }
        }
        assert_eq!(dense_code_upper_bound(1, 12), None);
    }

    #[test]
    fn invalid_queries() {
        assert!(matches!(
            BoundQuery::new(3, 2),
            Err(Error::InvalidBoundQuery { .. })
        ));
        assert!(BoundQuery::new(0, 0).is_err());
    }

    fn specs(d: usize) -> Vec<EncodingSpec> {
        vec![
            EncodingSpec::sb(d).unwrap(),
            EncodingSpec::gray(d).unwrap(),
            EncodingSpec::unary(d).unwrap(),
            EncodingSpec::block_unary(LocalCode::Sb, 3, d).unwrap(),
            EncodingSpec::block_unary(LocalCode::Gray, 3, d).unwrap(),
        ]
    }

    #[test]
    fn brute_force_pairs() {
        for d in 2..=8 {
            for spec in specs(d) {
                for l in 0..d {
                    for lp in l..d {
                        let query = pair_query(&spec, l, lp).unwrap();
                        let sum = if l == lp {
                            encode_element(&spec, l, l, Complex64::new(1.0, 0.0)).unwrap()
                        } else {
                            encode_hermitian_pair(&spec, l, lp, 1.0).unwrap()
                        };
                        let mut hist = sum.weight_histogram();
                        hist.retain(|_, n| *n > 0);
                        let want: BTreeMap<usize, usize> = pauli_length_distribution(query)
                            .into_iter()
                            .filter(|&(_, n)| n > 0)
                            .map(|(p, n)| (p, n as usize))
                            .collect();
                        assert_eq!(hist, want, "{spec} {l} {lp}");
                        let circ = trotter_step(&sum, 0.3).unwrap();
                        assert_eq!(circ.cnot_count() as u64, cnot_upper_bound(query));
                    }
                }
            }
        }
    }

    #[test]
    fn operator_bounds() {
        let n4 = bosonic(4, BosonOp::N).unwrap();
        assert_eq!(
            operator_upper_bound(&EncodingSpec::sb(4).unwrap(), &n4).unwrap(),
            0
        );
        let q4 = bosonic(4, BosonOp::Q).unwrap();
        let gray = operator_upper_bound(&EncodingSpec::gray(4).unwrap(), &q4).unwrap();
        let sb = operator_upper_bound(&EncodingSpec::sb(4).unwrap(), &q4).unwrap();
        assert!(gray < sb);
        // Unary: each tridiagonal pair has K = 2, d_H = 2, so 4 CNOTs.
        for d in [4, 8, 16, 32] {
            let b = tridiag_test_matrix(d, 3).unwrap();
            assert_eq!(
                operator_upper_bound(&EncodingSpec::unary(d).unwrap(), &b).unwrap(),
                4 * (d - 1)
            );
        }
    }

    #[test]
    fn growth_of_tridiagonal_bounds() {
        let mut prev_ratio = 0.0;
        for d in [4, 8, 16, 32] {
            let b = tridiag_test_matrix(d, 5).unwrap();
            let unary = operator_upper_bound(&EncodingSpec::unary(d).unwrap(), &b).unwrap() as f64;
            let sb = operator_upper_bound(&EncodingSpec::sb(d).unwrap(), &b).unwrap() as f64;
            let ratio = sb / unary;
            assert!(ratio > prev_ratio, "d={d}");
            prev_ratio = ratio;
        }
    }

    #[test]
    fn table_entries() {
        assert_eq!(asymptotic_class(CodeFamily::Unary, Sparsity::Pair), "O(1)");
        assert_eq!(
            asymptotic_class(CodeFamily::Compact, Sparsity::Tridiagonal),
            "O(d^2 log d)"
        );
        assert_eq!(
            asymptotic_class(CodeFamily::BlockUnary, Sparsity::Dense),
            "O(d^2 g log g)"
        );
        assert_eq!(
            asymptotic_class(CodeFamily::Unary, Sparsity::Tridiagonal),
            "O(d)"
        );
    }
}
