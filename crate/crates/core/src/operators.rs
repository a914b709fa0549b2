//! Dense d×d operators for bosonic modes, spin-s particles and
//! first-quantized position grids.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Named truncated bosonic operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BosonOp {
    A,
    Adag,
    Q,
    P,
    Q2,
    P2,
    N,
    N2,
    NNminus1,
}

impl BosonOp {
    pub const ALL: [BosonOp; 9] = [
        BosonOp::A,
        BosonOp::Adag,
        BosonOp::Q,
        BosonOp::P,
        BosonOp::Q2,
        BosonOp::P2,
        BosonOp::N,
        BosonOp::N2,
        BosonOp::NNminus1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BosonOp::A => "a",
            BosonOp::Adag => "adag",
            BosonOp::Q => "q",
            BosonOp::P => "p",
            BosonOp::Q2 => "q2",
            BosonOp::P2 => "p2",
            BosonOp::N => "n",
            BosonOp::N2 => "n2",
            BosonOp::NNminus1 => "n_nminus1",
        }
    }
}

impl FromStr for BosonOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BosonOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::UnknownOperator(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

impl FromStr for SpinAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "sx" => Ok(SpinAxis::X),
            "y" | "sy" => Ok(SpinAxis::Y),
            "z" | "sz" => Ok(SpinAxis::Z),
            _ => Err(Error::UnknownOperator(s.to_string())),
        }
    }
}

/// Where a matrix came from. Bosonic matrices can be rebuilt at another
/// truncation; spin matrices have a physically fixed dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Origin {
    Boson { op: BosonOp },
    Spin { twice_s: usize, axis: SpinAxis },
    FirstQuantizedX { delta: f64 },
    Random { seed: u64, tridiagonal: bool },
    Custom,
}

/// Dense complex d×d operator; row index is the bra level, column the ket level.
#[derive(Clone, Debug, PartialEq)]
pub struct QuditMatrix {
    entries: DMatrix<Complex64>,
    origin: Origin,
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl QuditMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        Self::with_origin(entries, Origin::Custom)
    }

    pub fn with_origin(entries: DMatrix<Complex64>, origin: Origin) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        if entries.nrows() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: entries.nrows(),
            });
        }
        Ok(Self { entries, origin })
    }

    pub fn from_fn(d: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        Self::new(DMatrix::from_fn(d, d, f))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_fn(
            values.len(),
            |i, j| if i == j { re(values[i]) } else { re(0.0) },
        )
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(DMatrix::identity(d, d))
    }

    pub fn d(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn into_custom(mut self) -> Self {
        self.origin = Origin::Custom;
        self
    }

    pub fn is_hermitian(&self, eps: f64) -> bool {
        let d = self.d();
        (0..d).all(|i| (0..d).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() < eps))
    }

    pub fn is_diagonal(&self, eps: f64) -> bool {
        let d = self.d();
        (0..d).all(|i| (0..d).all(|j| i == j || self.get(i, j).norm() < eps))
    }

    pub fn nonzero_count(&self, eps: f64) -> usize {
        self.entries.iter().filter(|c| c.norm() >= eps).count()
    }

    pub fn dagger(&self) -> QuditMatrix {
        QuditMatrix {
            entries: self.entries.adjoint(),
            origin: Origin::Custom,
        }
    }

    pub fn matmul(&self, other: &QuditMatrix) -> Result<QuditMatrix> {
        self.check_dim(other)?;
        Ok(QuditMatrix {
            entries: &self.entries * &other.entries,
            origin: Origin::Custom,
        })
    }

    pub fn add(&self, other: &QuditMatrix) -> Result<QuditMatrix> {
        self.check_dim(other)?;
        Ok(QuditMatrix {
            entries: &self.entries + &other.entries,
            origin: Origin::Custom,
        })
    }

    pub fn scale(&self, factor: Complex64) -> QuditMatrix {
        QuditMatrix {
            entries: &self.entries * factor,
            origin: Origin::Custom,
        }
    }

    pub fn max_abs_diff(&self, other: &QuditMatrix) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &QuditMatrix) -> Result<()> {
        if self.d() != other.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: other.d(),
            });
        }
        Ok(())
    }

    /// Row-major `[[[re, im], ...], ...]`.
    pub fn to_json(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.d())
            .map(|i| {
                (0..self.d())
                    .map(|j| [self.get(i, j).re, self.get(i, j).im])
                    .collect()
            })
            .collect()
    }

    pub fn from_json(rows: &[Vec<[f64; 2]>]) -> Result<QuditMatrix> {
        let d = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.len(),
            });
        }
        Self::from_fn(d, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]))
    }
}

impl Serialize for QuditMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuditMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        QuditMatrix::from_json(&rows).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for QuditMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.d() {
            let row: Vec<String> = (0..self.d())
                .map(|j| {
                    let c = self.get(i, j);
                    if c.im == 0.0 {
                        format!("{:.6}", c.re)
                    } else {
                        format!("{:.6}{:+.6}i", c.re, c.im)
                    }
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Truncated bosonic operator at `d` levels, built from closed-form entries.
///
/// Quadratic operators (`q2`, `p2`, `n2`, `n_nminus1`) equal the top-left d×d
/// block of the untruncated product, so the diagonal of `q2` stays
/// `(2l + 1) / 2` all the way to the last level.
pub fn bosonic(d: usize, op: BosonOp) -> Result<QuditMatrix> {
    if d < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: d,
        });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // ⟨l|a|l+1⟩ and ⟨l|a^2|l+2⟩.
    let one = |l: usize| ((l + 1) as f64).sqrt();
    let two = |l: usize| (((l + 1) * (l + 2)) as f64).sqrt() / 2.0;
    let zero = re(0.0);
    let entries = DMatrix::from_fn(d, d, |i, j| {
        let n = i as f64;
        match op {
            BosonOp::A if j == i + 1 => re(one(i)),
            BosonOp::Adag if i == j + 1 => re(one(j)),
            BosonOp::Q if j == i + 1 => re(one(i) * s),
            BosonOp::Q if i == j + 1 => re(one(j) * s),
            BosonOp::P if j == i + 1 => Complex64::new(0.0, -one(i) * s),
            BosonOp::P if i == j + 1 => Complex64::new(0.0, one(j) * s),
            BosonOp::Q2 | BosonOp::P2 if i == j => re(n + 0.5),
            BosonOp::Q2 if j == i + 2 => re(two(i)),
            BosonOp::Q2 if i == j + 2 => re(two(j)),
            BosonOp::P2 if j == i + 2 => re(-two(i)),
            BosonOp::P2 if i == j + 2 => re(-two(j)),
            BosonOp::N if i == j => re(n),
            BosonOp::N2 if i == j => re(n * n),
            BosonOp::NNminus1 if i == j => re(n * (n - 1.0)),
            _ => zero,
        }
    });
    QuditMatrix::with_origin(entries, Origin::Boson { op })
}

/// Converts a spin value to `2s`, rejecting anything that is not a positive half-integer.
pub fn twice_spin(s: f64) -> Result<usize> {
    let twice = 2.0 * s;
    if twice.is_nan() || twice < 1.0 || (twice - twice.round()).abs() > 1e-9 {
        return Err(Error::InvalidSpin(s));
    }
    Ok(twice.round() as usize)
}

/// Spin-s operator with ħ = 1, levels ordered from m = s (level 0) down to m = -s.
pub fn spin(s: f64, axis: SpinAxis) -> Result<QuditMatrix> {
    spin_twice(twice_spin(s)?, axis)
}

pub fn spin_twice(twice_s: usize, axis: SpinAxis) -> Result<QuditMatrix> {
    if twice_s == 0 {
        return Err(Error::InvalidSpin(0.0));
    }
    let d = twice_s + 1;
    let s = twice_s as f64 / 2.0;
    // ⟨j|S+|j+1⟩ for 0-based j, m = s - j.
    let ladder = |j: usize| 0.5 * (((j + 1) as f64) * (2.0 * s - j as f64)).sqrt();
    let entries = DMatrix::from_fn(d, d, |i, j| match axis {
        SpinAxis::Z if i == j => re(s - i as f64),
        SpinAxis::X if j == i + 1 => re(ladder(i)),
        SpinAxis::X if i == j + 1 => re(ladder(j)),
        SpinAxis::Y if j == i + 1 => Complex64::new(0.0, -ladder(i)),
        SpinAxis::Y if i == j + 1 => Complex64::new(0.0, ladder(j)),
        _ => re(0.0),
    });
    QuditMatrix::with_origin(entries, Origin::Spin { twice_s, axis })
}

/// Discretized position operator with grid points `x_i = (i - nx/2) * delta`.
pub fn first_quantized_x(nx: usize, delta: f64) -> Result<QuditMatrix> {
    if nx < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: nx,
        });
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidModel(format!(
            "grid spacing must be positive, got {delta}"
        )));
    }
    let half = nx as f64 / 2.0;
    let entries = DMatrix::from_fn(nx, nx, |i, j| {
        if i == j {
            re((i as f64 - half) * delta)
        } else {
            re(0.0)
        }
    });
    QuditMatrix::with_origin(entries, Origin::FirstQuantizedX { delta })
}

/// Real symmetric tridiagonal matrix with a zero diagonal, entries uniform in [-1, 1].
pub fn tridiag_test_matrix(d: usize, seed: u64) -> Result<QuditMatrix> {
    if d < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: d,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = DMatrix::from_element(d, d, re(0.0));
    for k in 0..d - 1 {
        let mut v: f64 = rng.gen_range(-1.0..=1.0);
        while v == 0.0 {
            v = rng.gen_range(-1.0..=1.0);
        }
        entries[(k, k + 1)] = re(v);
        entries[(k + 1, k)] = re(v);
    }
    QuditMatrix::with_origin(
        entries,
        Origin::Random {
            seed,
            tridiagonal: true,
        },
    )
}

/// Dense Hermitian matrix: real diagonal, complex off-diagonal parts uniform in [-1, 1].
pub fn dense_hermitian_test_matrix(d: usize, seed: u64) -> Result<QuditMatrix> {
    if d < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: d,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = DMatrix::from_element(d, d, re(0.0));
    for i in 0..d {
        entries[(i, i)] = re(rng.gen_range(-1.0..=1.0));
        for j in i + 1..d {
            let c = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            entries[(i, j)] = c;
            entries[(j, i)] = c.conj();
        }
    }
    QuditMatrix::with_origin(
        entries,
        Origin::Random {
            seed,
            tridiagonal: false,
        },
    )
}

/// Resolves a CLI-style operator name at dimension `d`.
///
/// Bosonic names (`a`, `q`, `q2`, ...), spin axes (`sx`, `sy`, `sz`, with
/// `d = 2s + 1`), `x_fq` (unit grid spacing), `b` (tridiagonal test matrix)
/// and `dense` (dense Hermitian test matrix).
pub fn named_operator(name: &str, d: usize, seed: u64) -> Result<QuditMatrix> {
    if let Ok(op) = name.parse::<BosonOp>() {
        return bosonic(d, op);
    }
    match name {
        "sx" | "sy" | "sz" => {
            if d < 2 {
                return Err(Error::InvalidSpin((d as f64 - 1.0) / 2.0));
            }
            spin_twice(d - 1, name.parse()?)
        }
        "x_fq" => first_quantized_x(d, 1.0),
        "b" => tridiag_test_matrix(d, seed),
        "dense" => dense_hermitian_test_matrix(d, seed),
        _ => Err(Error::UnknownOperator(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn close(a: Complex64, b: f64) -> bool {
        (a - re(b)).norm() < EPS
    }

    #[test]
    fn number_operator() {
        let n = bosonic(3, BosonOp::N).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(close(n.get(i, j), if i == j { i as f64 } else { 0.0 }));
            }
        }
    }

    #[test]
    fn position_d2() {
        let q = bosonic(2, BosonOp::Q).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(q.get(0, 1), s) && close(q.get(1, 0), s));
        assert!(close(q.get(0, 0), 0.0) && close(q.get(1, 1), 0.0));
    }

    #[test]
    fn position_squared_matches_printed_block() {
        let q2 = bosonic(3, BosonOp::Q2).unwrap();
        let r2 = 2f64.sqrt();
        let expected = [[1.0, 0.0, r2], [0.0, 3.0, 0.0], [r2, 0.0, 5.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!(close(q2.get(i, j), 0.5 * expected[i][j]), "({i},{j})");
            }
        }
        let q2 = bosonic(6, BosonOp::Q2).unwrap();
        for l in 0..6 {
            assert!(close(q2.get(l, l), (2 * l + 1) as f64 / 2.0));
            if l + 2 < 6 {
                let v = (((l + 1) * (l + 2)) as f64).sqrt() / 2.0;
                assert!(close(q2.get(l, l + 2), v));
            }
        }
    }

    #[test]
    fn ladder_identities() {
        for d in 2..=12 {
            let a = bosonic(d, BosonOp::A).unwrap();
            let adag = bosonic(d, BosonOp::Adag).unwrap();
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let q = adag.add(&a).unwrap().scale(re(s));
            let p = adag
                .add(&a.scale(re(-1.0)))
                .unwrap()
                .scale(Complex64::new(0.0, s));
            assert!(q.max_abs_diff(&bosonic(d, BosonOp::Q).unwrap()) < EPS);
            assert!(p.max_abs_diff(&bosonic(d, BosonOp::P).unwrap()) < EPS);
            assert!(close(a.get(0, 1), 1.0));
            if d > 2 {
                assert!(close(a.get(1, 2), 2f64.sqrt()));
            }
            let n = bosonic(d, BosonOp::N).unwrap();
            let nn = n.matmul(&n).unwrap();
            let expected = nn.add(&n.scale(re(-1.0))).unwrap();
            assert!(expected.max_abs_diff(&bosonic(d, BosonOp::NNminus1).unwrap()) < EPS);
            assert!(nn.max_abs_diff(&bosonic(d, BosonOp::N2).unwrap()) < EPS);
            assert!(adag.matmul(&a).unwrap().max_abs_diff(&n) < EPS);
            for (single, square) in [(BosonOp::Q, BosonOp::Q2), (BosonOp::P, BosonOp::P2)] {
                let big = bosonic(d + 2, single).unwrap();
                let prod = big.matmul(&big).unwrap();
                let sq = bosonic(d, square).unwrap();
                for i in 0..d {
                    for j in 0..d {
                        assert!((prod.get(i, j) - sq.get(i, j)).norm() < EPS);
                    }
                }
            }
        }
    }

    #[test]
    fn squares_agree_with_truncated_products_away_from_the_edge() {
        for d in 3..=10 {
            for (single, square) in [(BosonOp::Q, BosonOp::Q2), (BosonOp::P, BosonOp::P2)] {
                let m = bosonic(d, single).unwrap();
                let prod = m.matmul(&m).unwrap();
                let sq = bosonic(d, square).unwrap();
                for i in 0..d {
                    for j in 0..d {
                        if i == d - 1 && j == d - 1 {
                            // The truncated product misses the |d-1> -> |d> -> |d-1> path.
                            assert!((sq.get(i, j) - prod.get(i, j)).norm() > 0.1);
                        } else {
                            assert!((sq.get(i, j) - prod.get(i, j)).norm() < EPS);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn spin_matrices() {
        let sz = spin(0.5, SpinAxis::Z).unwrap();
        assert!(close(sz.get(0, 0), 0.5) && close(sz.get(1, 1), -0.5));
        let sx = spin(1.0, SpinAxis::X).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [[0.0, s, 0.0], [s, 0.0, s], [0.0, s, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!(close(sx.get(i, j), expected[i][j]));
            }
        }
        let sy = spin(1.0, SpinAxis::Y).unwrap();
        for i in 0..3usize {
            for j in 0..3 {
                let c = sy.get(i, j);
                assert!(c.re.abs() < EPS);
                assert!((c + sy.get(j, i)).norm() < EPS);
                if i.abs_diff(j) != 1 {
                    assert!(c.norm() < EPS);
                }
            }
        }
        assert!(matches!(spin(0.3, SpinAxis::X), Err(Error::InvalidSpin(_))));
        assert!(matches!(spin(0.0, SpinAxis::X), Err(Error::InvalidSpin(_))));
    }

    #[test]
    fn spin_commutator() {
        for twice_s in 1..=7 {
            let sx = spin_twice(twice_s, SpinAxis::X).unwrap();
            let sy = spin_twice(twice_s, SpinAxis::Y).unwrap();
            let sz = spin_twice(twice_s, SpinAxis::Z).unwrap();
            let comm = sx
                .matmul(&sy)
                .unwrap()
                .add(&sy.matmul(&sx).unwrap().scale(re(-1.0)))
                .unwrap();
            assert!(comm.max_abs_diff(&sz.scale(Complex64::new(0.0, 1.0))) < 1e-10);
        }
    }

    #[test]
    fn first_quantized_grid() {
        let x = first_quantized_x(4, 1.0).unwrap();
        let expect = [-2.0, -1.0, 0.0, 1.0];
        for (i, e) in expect.iter().enumerate() {
            assert!(close(x.get(i, i), *e));
        }
        let x = first_quantized_x(2, 0.5).unwrap();
        assert!(close(x.get(0, 0), -0.5) && close(x.get(1, 1), 0.0));
        assert!(x.is_diagonal(EPS));
    }

    #[test]
    fn random_test_matrices() {
        let b = tridiag_test_matrix(3, 0).unwrap();
        assert_eq!(b.nonzero_count(1e-14), 4);
        for seed in 0..20 {
            let b = tridiag_test_matrix(7, seed).unwrap();
            assert!(b.is_hermitian(EPS));
            for i in 0..7usize {
                for j in 0..7 {
                    if i.abs_diff(j) != 1 {
                        assert_eq!(b.get(i, j), re(0.0));
                    }
                }
            }
            assert!(dense_hermitian_test_matrix(5, seed)
                .unwrap()
                .is_hermitian(EPS));
        }
        assert!(
            dense_hermitian_test_matrix(3, 1)
                .unwrap()
                .nonzero_count(1e-14)
                <= 9
        );
        assert_eq!(
            tridiag_test_matrix(5, 9).unwrap(),
            tridiag_test_matrix(5, 9).unwrap()
        );
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(
            "foo".parse::<BosonOp>(),
            Err(Error::UnknownOperator(_))
        ));
        assert!(named_operator("nope", 4, 0).is_err());
        assert_eq!(
            named_operator("sz", 4, 0).unwrap(),
            spin(1.5, SpinAxis::Z).unwrap()
        );
    }

    #[test]
    fn json_round_trip() {
        let m = bosonic(3, BosonOp::P).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: QuditMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back.max_abs_diff(&m), 0.0);
    }
}
