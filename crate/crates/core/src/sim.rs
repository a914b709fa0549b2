//! Dense state-vector and matrix oracles. Qubit 0 is the least significant
//! bit of the basis index.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate};
use crate::encoder::encode_matrix;
use crate::encoding::{BitString, EncodingSpec};
use crate::error::{Error, Result};
use crate::operators::QuditMatrix;
use crate::pauli::{Pauli, PauliString, PauliSum};

/// Largest register accepted by dense routes.
pub const DENSE_QUBIT_CAP: usize = 14;

/// Hermiticity tolerance for [`matrix_exponential`].
pub const HERMITIAN_EPS: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_cap(what: &'static str, n: usize) -> Result<()> {
    if n > DENSE_QUBIT_CAP {
        return Err(Error::SizeCap {
            what,
            n,
            cap: DENSE_QUBIT_CAP,
        });
    }
    Ok(())
}

/// X/Y positions, Z/Y positions and the `i^{#Y}` prefactor of a Pauli string.
struct Masks {
    x: usize,
    z: usize,
    phase: Complex64,
}

fn masks(p: &PauliString) -> Masks {
    let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
    for &(q, l) in p.ops() {
        match l {
            Pauli::X => x |= 1 << q,
            Pauli::Z => z |= 1 << q,
            Pauli::Y => {
                x |= 1 << q;
                z |= 1 << q;
                ny += 1;
            }
        }
    }
    Masks {
        x,
        z,
        phase: I.powu(ny),
    }
}

fn sign(bits: usize) -> f64 {
    if bits.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `⟨row| s |col⟩` without building the matrix.
pub fn pauli_matrix_element(s: &PauliSum, row: usize, col: usize) -> Complex64 {
    let mut acc = ZERO;
    for (p, c) in s.iter() {
        let m = masks(p);
        if row == col ^ m.x {
            acc += c * m.phase * sign(col & m.z);
        }
    }
    acc
}

pub fn pauli_to_matrix(s: &PauliSum) -> Result<DMatrix<Complex64>> {
    let n = s.n_qubits();
    check_cap("pauli_to_matrix", n)?;
    let dim = 1usize << n;
    let mut out = DMatrix::from_element(dim, dim, ZERO);
    for (p, c) in s.iter() {
        let m = masks(p);
        for col in 0..dim {
            out[(col ^ m.x, col)] += c * m.phase * sign(col & m.z);
        }
    }
    Ok(out)
}

/// `out = P |state⟩`.
pub fn apply_pauli(p: &PauliString, state: &[Complex64]) -> Vec<Complex64> {
    let m = masks(p);
    let mut out = vec![ZERO; state.len()];
    for (j, a) in state.iter().enumerate() {
        out[j ^ m.x] = a * m.phase * sign(j & m.z);
    }
    out
}

/// `exp(-i θ c P) |state⟩` for real `c`.
pub fn apply_pauli_exp(p: &PauliString, c: f64, theta: f64, state: &mut [Complex64]) {
    let phi = theta * c;
    let (s, co) = phi.sin_cos();
    let pv = apply_pauli(p, state);
    for (a, b) in state.iter_mut().zip(pv) {
        *a = *a * co - I * s * b;
    }
}

/// Applies `Π_k exp(-i θ c_k P_k)` in canonical term order.
pub fn apply_trotter_product_reference(h: &PauliSum, theta: f64, state: &mut [Complex64]) {
    for (p, c) in h.iter() {
        apply_pauli_exp(p, c.re, theta, state);
    }
}

fn gate_matrix(g: &Gate) -> Option<[[Complex64; 2]; 2]> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    Some(match *g {
        Gate::X(_) => [[ZERO, ONE], [ONE, ZERO]],
        Gate::H(_) => [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]],
        Gate::BasisY(_) => [[c(r, 0.0), c(0.0, -r)], [c(0.0, r), c(-r, 0.0)]],
        Gate::S(_) => [[ONE, ZERO], [ZERO, I]],
        Gate::Sdg(_) => [[ONE, ZERO], [ZERO, -I]],
        Gate::T(_) => [[ONE, ZERO], [ZERO, c(r, r)]],
        Gate::Tdg(_) => [[ONE, ZERO], [ZERO, c(r, -r)]],
        Gate::Rz(_, phi) => [
            [Complex64::from_polar(1.0, -phi / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, phi / 2.0)],
        ],
        _ => return None,
    })
}

pub fn apply_gate(g: &Gate, state: &mut [Complex64]) {
    if let Some(m) = gate_matrix(g) {
        let bit = 1usize << g.qubits()[0];
        for j in 0..state.len() {
            if j & bit == 0 {
                let (a0, a1) = (state[j], state[j | bit]);
                state[j] = m[0][0] * a0 + m[0][1] * a1;
                state[j | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        return;
    }
    match *g {
        Gate::Cnot { control, target } => {
            let (cb, tb) = (1usize << control, 1usize << target);
            for j in 0..state.len() {
                if j & cb != 0 && j & tb == 0 {
                    state.swap(j, j | tb);
                }
            }
        }
        Gate::Swap(a, b) => swap_bits(state, 1 << a, 1 << b, 0),
        Gate::Cswap { control, a, b } => swap_bits(state, 1 << a, 1 << b, 1 << control),
        _ => unreachable!("single-qubit gates handled above"),
    }
}

fn swap_bits(state: &mut [Complex64], ab: usize, bb: usize, cb: usize) {
    for j in 0..state.len() {
        if j & cb == cb && j & ab != 0 && j & bb == 0 {
            state.swap(j, (j & !ab) | bb);
        }
    }
}

pub fn apply_circuit(c: &Circuit, state: &mut [Complex64]) {
    for g in c.gates() {
        apply_gate(g, state);
    }
    let ph = Complex64::from_polar(1.0, c.global_phase());
    for a in state.iter_mut() {
        *a *= ph;
    }
}

pub fn basis_state(n_qubits: usize, index: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; 1 << n_qubits];
    v[index] = ONE;
    v
}

/// Maps a basis index through the circuit, failing if the image is not a single basis state.
pub fn permute_basis_state(c: &Circuit, index: usize) -> Option<usize> {
    let mut v = basis_state(c.n_qubits(), index);
    apply_circuit(c, &mut v);
    let hit = v.iter().position(|a| a.norm() > 1.0 - 1e-9)?;
    let rest: f64 = v
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != hit)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    (rest < 1e-18).then_some(hit)
}

pub fn circuit_to_unitary(c: &Circuit) -> Result<DMatrix<Complex64>> {
    let n = c.n_qubits();
    check_cap("circuit_to_unitary", n)?;
    let dim = 1usize << n;
    let cols: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut v = basis_state(n, j);
            apply_circuit(c, &mut v);
            v
        })
        .collect();
    Ok(DMatrix::from_fn(dim, dim, |i, j| cols[j][i]))
}

/// `exp(-i H t)` by Hermitian eigendecomposition.
pub fn matrix_exponential(h: &DMatrix<Complex64>, t: f64) -> Result<DMatrix<Complex64>> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            got: h.ncols(),
        });
    }
    if (h - h.adjoint()).iter().any(|c| c.norm() > HERMITIAN_EPS) {
        return Err(Error::NotHermitian);
    }
    let eig = h.clone().symmetric_eigen();
    let phases = eig
        .eigenvalues
        .map(|lambda| Complex64::from_polar(1.0, -lambda * t));
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&phases) * v.adjoint())
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn bits_to_index(b: &BitString) -> usize {
    b.value_of(0..b.len())
}

/// Largest `|⟨R(l)| enc(A) |R(l')⟩ - A_{l,l'}|` over all level pairs.
pub fn verify_encoding(spec: &EncodingSpec, a: &QuditMatrix) -> Result<f64> {
    let n = spec.num_qubits();
    if n >= usize::BITS as usize {
        return Err(Error::SizeCap {
            what: "verify_encoding",
            n,
            cap: usize::BITS as usize - 1,
        });
    }
    let enc = encode_matrix(spec, a)?;
    verify_encoded_sum(spec, a, &enc.sum)
}

/// As [`verify_encoding`] for an already encoded sum.
pub fn verify_encoded_sum(spec: &EncodingSpec, a: &QuditMatrix, sum: &PauliSum) -> Result<f64> {
    let codes: Vec<usize> = (0..spec.d)
        .map(|l| spec.encode(l).map(|b| bits_to_index(&b)))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (l, &row) in codes.iter().enumerate() {
        for (lp, &col) in codes.iter().enumerate() {
            worst = worst.max((pauli_matrix_element(sum, row, col) - a.get(l, lp)).norm());
        }
    }
    Ok(worst)
}

/// Compares two circuits column by column. With `up_to_phase`, a single
/// global phase is factored out first.
pub fn verify_circuit_equivalence(
    c1: &Circuit,
    c2: &Circuit,
    up_to_phase: bool,
    tol: f64,
) -> Result<bool> {
    if c1.n_qubits() != c2.n_qubits() {
        return Err(Error::QubitCountMismatch {
            left: c1.n_qubits(),
            right: c2.n_qubits(),
        });
    }
    let n = c1.n_qubits();
    check_cap("verify_circuit_equivalence", n)?;
    let mut align: Option<Complex64> = (!up_to_phase).then_some(ONE);
    for j in 0..1usize << n {
        let mut a = basis_state(n, j);
        let mut b = basis_state(n, j);
        apply_circuit(c1, &mut a);
        apply_circuit(c2, &mut b);
        if align.is_none() {
            let k = (0..a.len())
                .max_by(|&x, &y| a[x].norm().total_cmp(&a[y].norm()))
                .unwrap_or(0);
            if b[k].norm() < 1e-12 {
                return Ok(false);
            }
            let r = a[k] / b[k];
            align = Some(r / r.norm());
        }
        let ph = align.unwrap_or(ONE);
        if a.iter().zip(&b).any(|(x, y)| (x - y * ph).norm() > tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dense unitary of `Π_k exp(-i θ c_k P_k)` in canonical order.
pub fn trotter_product_unitary(h: &PauliSum, theta: f64) -> Result<DMatrix<Complex64>> {
    let n = h.n_qubits();
    check_cap("trotter_product_unitary", n)?;
    let dim = 1usize << n;
    let cols: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut v = basis_state(n, j);
            apply_trotter_product_reference(h, theta, &mut v);
            v
        })
        .collect();
    Ok(DMatrix::from_fn(dim, dim, |i, j| cols[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{trotter_step, trotter_term};
    use crate::encoding::LocalCode;
    use crate::operators::{bosonic, spin, BosonOp, SpinAxis};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sum(n: usize, terms: &[(&str, Complex64)]) -> PauliSum {
        let mut s = PauliSum::new(n);
        for (p, w) in terms {
            s.add_term(PauliString::parse(p).unwrap(), *w);
        }
        s
    }

    #[test]
    fn single_qubit_paulis() {
        let z = pauli_to_matrix(&sum(1, &[("Z0", ONE)])).unwrap();
        assert_eq!(z, DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]));
        let proj = pauli_to_matrix(&sum(1, &[("I", c(0.5, 0.0)), ("Z0", c(0.5, 0.0))])).unwrap();
        assert_eq!(
            proj,
            DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])
        );
        let y = pauli_to_matrix(&sum(1, &[("Y0", ONE)])).unwrap();
        assert_eq!(y, DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]));
    }

    #[test]
    fn qubit_zero_is_least_significant() {
        let x0 = pauli_to_matrix(&sum(2, &[("X0", ONE)])).unwrap();
        assert_eq!(x0[(1, 0)], ONE);
        assert_eq!(x0[(2, 0)], ZERO);
    }

    #[test]
    fn product_matches_matrix_product() {
        let a = sum(
            2,
            &[
                ("X0 Z1", c(0.3, 0.0)),
                ("Y1", c(0.0, 0.7)),
                ("I", c(1.0, -0.2)),
            ],
        );
        let b = sum(2, &[("Y0", c(0.5, 0.1)), ("Z0 X1", c(-1.0, 0.0))]);
        let lhs = pauli_to_matrix(&a.multiply(&b).unwrap()).unwrap();
        let rhs = pauli_to_matrix(&a).unwrap() * pauli_to_matrix(&b).unwrap();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn elementwise_matches_dense() {
        let a = sum(
            3,
            &[
                ("X0 Y2", c(0.3, 0.0)),
                ("Z1", c(0.2, 0.0)),
                ("Y0 Y1", c(-0.5, 0.0)),
            ],
        );
        let m = pauli_to_matrix(&a).unwrap();
        for r in 0..8 {
            for col in 0..8 {
                assert!((m[(r, col)] - pauli_matrix_element(&a, r, col)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn gates_as_matrices() {
        let mut circ = Circuit::new(1);
        circ.push(Gate::H(0)).unwrap();
        let u = circuit_to_unitary(&circ).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(
            max_abs_diff(
                &u,
                &DMatrix::from_row_slice(2, 2, &[c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)])
            ) < 1e-15
        );

        let circ = Circuit::from_gates(
            2,
            vec![Gate::Cnot {
                control: 0,
                target: 1,
            }],
            0.0,
        )
        .unwrap();
        let u = circuit_to_unitary(&circ).unwrap();
        for (from, to) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
            assert_eq!(u[(to, from)], ONE);
        }
    }

    #[test]
    fn basis_y_swaps_z_and_y() {
        let b = circuit_to_unitary(&Circuit::from_gates(1, vec![Gate::BasisY(0)], 0.0).unwrap())
            .unwrap();
        let z = pauli_to_matrix(&sum(1, &[("Z0", ONE)])).unwrap();
        let y = pauli_to_matrix(&sum(1, &[("Y0", ONE)])).unwrap();
        assert!(max_abs_diff(&(&b * &z * &b), &y) < 1e-15);
        assert!(max_abs_diff(&(&b * &b), &DMatrix::identity(2, 2)) < 1e-15);
    }

    #[test]
    fn rz_convention() {
        let theta = 0.37;
        let circ = trotter_term(&PauliString::parse("Z0").unwrap(), ONE, theta, 1).unwrap();
        let u = circuit_to_unitary(&circ).unwrap();
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, -theta)).norm() < 1e-15);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, theta)).norm() < 1e-15);
    }

    #[test]
    fn exponential() {
        let zero = DMatrix::from_element(4, 4, ZERO);
        assert!(
            max_abs_diff(
                &matrix_exponential(&zero, 1.3).unwrap(),
                &DMatrix::identity(4, 4)
            ) < 1e-14
        );
        let z = pauli_to_matrix(&sum(1, &[("Z0", ONE)])).unwrap();
        let u = matrix_exponential(&z, PI).unwrap();
        assert!(max_abs_diff(&u, &(DMatrix::identity(2, 2) * c(-1.0, 0.0))) < 1e-14);
        let bad = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(
            matrix_exponential(&bad, 1.0),
            Err(Error::NotHermitian)
        ));
    }

    #[test]
    fn trotter_circuits_match_reference_product() {
        for (spec, op) in [
            (EncodingSpec::sb(4).unwrap(), BosonOp::Q2),
            (EncodingSpec::gray(8).unwrap(), BosonOp::Q),
            (EncodingSpec::unary(5).unwrap(), BosonOp::P),
            (
                EncodingSpec::block_unary(LocalCode::Sb, 3, 6).unwrap(),
                BosonOp::Q,
            ),
        ] {
            let h = encode_matrix(&spec, &bosonic(spec.d, op).unwrap())
                .unwrap()
                .sum;
            let circ = trotter_step(&h, 0.41).unwrap();
            let u = circuit_to_unitary(&circ).unwrap();
            let r = trotter_product_unitary(&h, 0.41).unwrap();
            assert!(max_abs_diff(&u, &r) < 1e-9, "{spec}");
        }
    }

    #[test]
    fn trotter_converges_to_exponential() {
        let h = encode_matrix(
            &EncodingSpec::sb(4).unwrap(),
            &bosonic(4, BosonOp::Q2).unwrap(),
        )
        .unwrap()
        .sum;
        let exact = matrix_exponential(&pauli_to_matrix(&h).unwrap(), 1.0).unwrap();
        let err = |eta: u32| {
            let step = trotter_product_unitary(&h, 1.0 / eta as f64).unwrap();
            let mut u = DMatrix::identity(4, 4);
            for _ in 0..eta {
                u = &step * u;
            }
            max_abs_diff(&u, &exact)
        };
        // First order: eight times the steps, roughly an eighth of the error.
        assert!(err(64) < err(8) / 6.0);
    }

    #[test]
    fn encodings_reconstruct() {
        let q = bosonic(5, BosonOp::Q).unwrap();
        for spec in [
            EncodingSpec::sb(5).unwrap(),
            EncodingSpec::gray(5).unwrap(),
            EncodingSpec::unary(5).unwrap(),
            EncodingSpec::block_unary(LocalCode::Gray, 3, 5).unwrap(),
        ] {
            assert!(verify_encoding(&spec, &q).unwrap() < 1e-12);
        }
        let sx = spin(1.5, SpinAxis::Y).unwrap();
        assert!(verify_encoding(&EncodingSpec::gray(4).unwrap(), &sx).unwrap() < 1e-12);
    }

    #[test]
    fn equivalence_with_and_without_phase() {
        let a = Circuit::from_gates(
            2,
            vec![
                Gate::S(0),
                Gate::Cnot {
                    control: 0,
                    target: 1,
                },
            ],
            0.0,
        )
        .unwrap();
        let b = Circuit::from_gates(
            2,
            vec![
                Gate::Rz(0, PI / 2.0),
                Gate::Cnot {
                    control: 0,
                    target: 1,
                },
            ],
            PI / 4.0,
        )
        .unwrap();
        assert!(verify_circuit_equivalence(&a, &b, false, 1e-12).unwrap());
        let b2 = Circuit::from_gates(2, b.gates().to_vec(), 0.0).unwrap();
        assert!(!verify_circuit_equivalence(&a, &b2, false, 1e-12).unwrap());
        assert!(verify_circuit_equivalence(&a, &b2, true, 1e-12).unwrap());
        let other = Circuit::from_gates(2, vec![Gate::X(0)], 0.0).unwrap();
        assert!(!verify_circuit_equivalence(&a, &other, true, 1e-12).unwrap());
    }

    #[test]
    fn every_gate_agrees_with_its_qasm_reimport() {
        let gates = [
            Gate::X(1),
            Gate::H(0),
            Gate::BasisY(1),
            Gate::S(0),
            Gate::Sdg(1),
            Gate::T(0),
            Gate::Tdg(1),
            Gate::Rz(0, 0.77),
            Gate::Cnot {
                control: 1,
                target: 0,
            },
            Gate::Swap(0, 1),
            Gate::Cswap {
                control: 2,
                a: 0,
                b: 1,
            },
            Gate::Cswap {
                control: 0,
                a: 2,
                b: 1,
            },
        ];
        for g in gates {
            let direct = Circuit::from_gates(3, vec![g], 0.3).unwrap();
            let back = Circuit::from_qasm(&direct.to_qasm()).unwrap();
            assert!(
                verify_circuit_equivalence(&direct, &back, false, 1e-12).unwrap(),
                "{g:?}"
            );
        }
    }

    #[test]
    fn size_cap() {
        let s = PauliSum::new(DENSE_QUBIT_CAP + 1);
        assert!(matches!(pauli_to_matrix(&s), Err(Error::SizeCap { .. })));
        assert!(circuit_to_unitary(&Circuit::new(DENSE_QUBIT_CAP + 1)).is_err());
    }
}
