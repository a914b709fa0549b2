//! Weighted sums of Pauli strings.
//!
//! Strings store only their non-identity factors, sorted by qubit. The
//! derived ordering on [`PauliString`] compares `(qubit, letter)` pairs
//! lexicographically with `X < Y < Z`, which is the pseudo-alphabetical
//! term order used for Trotter synthesis: every string starting with `X0`
//! comes first, then `Y0`, `Z0`, `X1`, and so on.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped by [`PauliSum::simplify`].
pub const PRUNE_EPS: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// `self * other = phase * result`, `None` meaning identity.
    pub fn mul(self, other: Pauli) -> (Complex64, Option<Pauli>) {
        use Pauli::*;
        match (self, other) {
            (a, b) if a == b => (ONE, None),
            (X, Y) => (I, Some(Z)),
            (Y, X) => (-I, Some(Z)),
            (Y, Z) => (I, Some(X)),
            (Z, Y) => (-I, Some(X)),
            (Z, X) => (I, Some(Y)),
            (X, Z) => (-I, Some(Y)),
            _ => unreachable!(),
        }
    }
}

/// Tensor product of single-qubit Paulis; identity everywhere else.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    ops: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(qubit: usize, p: Pauli) -> Self {
        Self {
            ops: vec![(qubit, p)],
        }
    }

    /// Builds a string from `(qubit, letter)` pairs in any order.
    pub fn new(mut ops: Vec<(usize, Pauli)>) -> Result<Self> {
        ops.sort_by_key(|&(q, _)| q);
        if ops.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Parse("repeated qubit in Pauli string".into()));
        }
        Ok(Self { ops })
    }

    /// Caller guarantees strictly increasing qubit indices.
    pub(crate) fn from_sorted(ops: Vec<(usize, Pauli)>) -> Self {
        debug_assert!(ops.windows(2).all(|w| w[0].0 < w[1].0));
        Self { ops }
    }

    pub fn ops(&self) -> &[(usize, Pauli)] {
        &self.ops
    }

    pub fn weight(&self) -> usize {
        self.ops.len()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        self.ops
            .binary_search_by_key(&qubit, |&(q, _)| q)
            .ok()
            .map(|i| self.ops[i].1)
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.last().map(|&(q, _)| q)
    }

    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            ops: self.ops.iter().map(|&(q, p)| (q + offset, p)).collect(),
        }
    }

    /// Product `self * other = phase * string`.
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        let mut phase = ONE;
        let mut ops = Vec::with_capacity(self.ops.len() + other.ops.len());
        let (mut i, mut j) = (0, 0);
        while i < self.ops.len() || j < other.ops.len() {
            match (self.ops.get(i), other.ops.get(j)) {
                (Some(&(qa, pa)), Some(&(qb, pb))) if qa == qb => {
                    let (ph, p) = pa.mul(pb);
                    phase *= ph;
                    if let Some(p) = p {
                        ops.push((qa, p));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&(qa, pa)), Some(&(qb, _))) if qa < qb => {
                    ops.push((qa, pa));
                    i += 1;
                }
                (Some(&a), None) => {
                    ops.push(a);
                    i += 1;
                }
                (_, Some(&b)) => {
                    ops.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        (phase, PauliString { ops })
    }

    /// True when the two strings commute.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .ops
            .iter()
            .filter(|&&(q, p)| matches!(other.get(q), Some(o) if o != p))
            .count();
        anti % 2 == 0
    }

    /// Parses `"X0 Z2"`; an empty string or `"I"` is the identity.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ops = Vec::new();
        for token in text.split_whitespace() {
            if token.eq_ignore_ascii_case("I") {
                continue;
            }
            let mut chars = token.chars();
            let letter = chars
                .next()
                .and_then(Pauli::from_letter)
                .ok_or_else(|| Error::Parse(format!("bad Pauli token '{token}'")))?;
            let qubit: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::Parse(format!("bad qubit index in '{token}'")))?;
            ops.push((qubit, letter));
        }
        Self::new(ops)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ops.is_empty() {
            return f.write_str("I");
        }
        for (k, (q, p)) in self.ops.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", p.letter(), q)?;
        }
        Ok(())
    }
}

/// Finite map from Pauli strings to complex coefficients over `n_qubits` qubits.
///
/// Adding a term for a string already present sums the coefficients. Terms
/// iterate in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize, coeff: Complex64) -> Self {
        let mut s = Self::new(n_qubits);
        s.add_term(PauliString::identity(), coeff);
        s
    }

    pub fn from_terms(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (PauliString, Complex64)>,
    ) -> Result<Self> {
        let mut s = Self::new(n_qubits);
        for (p, c) in terms {
            if let Some(q) = p.max_qubit() {
                if q >= n_qubits {
                    return Err(Error::QubitCountMismatch {
                        left: q + 1,
                        right: n_qubits,
                    });
                }
            }
            s.add_term(p, c);
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, p: PauliString, c: Complex64) {
        *self.terms.entry(p).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn coeff(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    /// Terms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    /// Sums duplicate strings and drops coefficients with `|c| < eps`.
    pub fn simplify(&self, eps: f64) -> PauliSum {
        let mut out = self.clone();
        out.prune(eps);
        out
    }

    pub fn prune(&mut self, eps: f64) {
        self.terms.retain(|_, c| c.norm() >= eps);
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(p, c)| (p.clone(), c * factor))
                .collect(),
        }
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_width(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), *c);
        }
        Ok(out.simplify(PRUNE_EPS))
    }

    /// Distributes the product term by term and simplifies.
    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_width(other)?;
        let mut out = PauliSum::new(self.n_qubits);
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                let (phase, p) = pa.mul(pb);
                out.add_term(p, phase * ca * cb);
            }
        }
        Ok(out.simplify(PRUNE_EPS))
    }

    /// Moves every string up by `offset` qubits inside a `total`-qubit register.
    pub fn tensor_shift(&self, offset: usize, total: usize) -> Result<PauliSum> {
        if offset + self.n_qubits > total {
            return Err(Error::ShiftOverflow {
                offset,
                width: self.n_qubits,
                total,
            });
        }
        Ok(PauliSum {
            n_qubits: total,
            terms: self
                .terms
                .iter()
                .map(|(p, c)| (p.shifted(offset), *c))
                .collect(),
        })
    }

    /// Pauli strings are Hermitian, so the sum is Hermitian iff all coefficients are real.
    pub fn is_hermitian(&self, eps: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() < eps)
    }

    /// Number of strings of each weight.
    pub fn weight_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for p in self.terms.keys() {
            *hist.entry(p.weight()).or_insert(0) += 1;
        }
        hist
    }

    pub fn max_abs_diff(&self, other: &PauliSum) -> f64 {
        let mut worst: f64 = 0.0;
        for (p, c) in &self.terms {
            worst = worst.max((c - other.coeff(p)).norm());
        }
        for (p, c) in &other.terms {
            if !self.terms.contains_key(p) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    fn check_width(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> PauliSumJson {
        PauliSumJson {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(p, c)| PauliTermJson {
                    pauli: if p.is_identity() {
                        String::new()
                    } else {
                        p.to_string()
                    },
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PauliSumJson) -> Result<PauliSum> {
        let terms = json
            .terms
            .iter()
            .map(|t| Ok((PauliString::parse(&t.pauli)?, Complex64::new(t.re, t.im))))
            .collect::<Result<Vec<_>>>()?;
        PauliSum::from_terms(json.n_qubits, terms)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (p, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{} {}", c.re, p)?;
            } else {
                write!(f, "({}{:+}i) {}", c.re, c.im, p)?;
            }
        }
        Ok(())
    }
}

impl Add for &PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: &PauliSum) -> PauliSum {
        PauliSum::add(self, rhs).expect("qubit count mismatch")
    }
}

impl Sub for &PauliSum {
    type Output = PauliSum;
    fn sub(self, rhs: &PauliSum) -> PauliSum {
        PauliSum::add(self, &rhs.scale(-ONE)).expect("qubit count mismatch")
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;
    fn neg(self) -> PauliSum {
        self.scale(-ONE)
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: &PauliSum) -> PauliSum {
        self.multiply(rhs).expect("qubit count mismatch")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTermJson {
    pub pauli: String,
    pub re: f64,
    pub im: f64,
}

/// Wire form: `{"n_qubits": n, "terms": [{"pauli": "X0 Z2", "re": r, "im": i}, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSumJson {
    pub n_qubits: usize,
    pub terms: Vec<PauliTermJson>,
}

impl Serialize for PauliSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = PauliSumJson::deserialize(d)?;
        PauliSum::from_json(&json).map_err(serde::de::Error::custom)
    }
}
