//! Gate-list IR, CNOT-staircase Trotter synthesis and resource counting.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

/// Imaginary parts below this are accepted as real coefficients.
pub const REAL_COEFF_EPS: f64 = 1e-12;

/// `BasisY` is `(Y + Z)/√2`: self-inverse, exchanges Z and Y under conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateJson", into = "GateJson")]
pub enum Gate {
    X(usize),
    H(usize),
    BasisY(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    /// `exp(-i φ Z / 2)`.
    Rz(usize, f64),
    Cnot {
        control: usize,
        target: usize,
    },
    Swap(usize, usize),
    Cswap {
        control: usize,
        a: usize,
        b: usize,
    },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "x",
            Gate::H(_) => "h",
            Gate::BasisY(_) => "basis_y",
            Gate::S(_) => "s",
            Gate::Sdg(_) => "sdg",
            Gate::T(_) => "t",
            Gate::Tdg(_) => "tdg",
            Gate::Rz(..) => "rz",
            Gate::Cnot { .. } => "cnot",
            Gate::Swap(..) => "swap",
            Gate::Cswap { .. } => "cswap",
        }
    }

    /// Qubits in control-first order.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X(q)
            | Gate::H(q)
            | Gate::BasisY(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::T(q)
            | Gate::Tdg(q)
            | Gate::Rz(q, _) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Swap(a, b) => vec![a, b],
            Gate::Cswap { control, a, b } => vec![control, a, b],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rz(_, a) => Some(a),
            _ => None,
        }
    }

    pub fn arity(&self) -> usize {
        self.qubits().len()
    }

    pub fn is_entangling(&self) -> bool {
        self.arity() > 1
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            Gate::T(q) => Gate::Tdg(q),
            Gate::Tdg(q) => Gate::T(q),
            Gate::Rz(q, a) => Gate::Rz(q, -a),
            g => g,
        }
    }

    pub fn from_parts(kind: &str, qubits: &[usize], angle: Option<f64>) -> Result<Gate> {
        let want = match kind {
            "cnot" | "swap" => 2,
            "cswap" => 3,
            _ => 1,
        };
        if qubits.len() != want {
            return Err(Error::InvalidGate(format!(
                "{kind} takes {want} qubits, got {}",
                qubits.len()
            )));
        }
        let q = qubits[0];
        let gate = match kind {
            "x" => Gate::X(q),
            "h" => Gate::H(q),
            "basis_y" => Gate::BasisY(q),
            "s" => Gate::S(q),
            "sdg" => Gate::Sdg(q),
            "t" => Gate::T(q),
            "tdg" => Gate::Tdg(q),
            "rz" => Gate::Rz(
                q,
                angle.ok_or_else(|| Error::InvalidGate("rz needs an angle".into()))?,
            ),
            "cnot" => Gate::Cnot {
                control: q,
                target: qubits[1],
            },
            "swap" => Gate::Swap(q, qubits[1]),
            "cswap" => Gate::Cswap {
                control: q,
                a: qubits[1],
                b: qubits[2],
            },
            other => return Err(Error::InvalidGate(format!("unknown gate kind '{other}'"))),
        };
        if kind != "rz" && angle.is_some() {
            return Err(Error::InvalidGate(format!("{kind} takes no angle")));
        }
        let qs = gate.qubits();
        for i in 0..qs.len() {
            if qs[i + 1..].contains(&qs[i]) {
                return Err(Error::InvalidGate(format!(
                    "repeated qubit {} in {kind}",
                    qs[i]
                )));
            }
        }
        Ok(gate)
    }

    /// Clifford+T expansion. SWAP becomes three CNOTs; CSWAP becomes a
    /// CNOT-conjugated Toffoli with 8 CNOT, 2 H, 4 T and 3 T†.
    pub fn clifford_t(&self) -> Vec<Gate> {
        match *self {
            Gate::Swap(a, b) => vec![cx(a, b), cx(b, a), cx(a, b)],
            Gate::Cswap { control, a, b } => {
                let mut out = vec![cx(b, a)];
                out.extend(toffoli(control, a, b));
                out.push(cx(b, a));
                out
            }
            g => vec![g],
        }
    }
}

fn cx(control: usize, target: usize) -> Gate {
    Gate::Cnot { control, target }
}

fn toffoli(c1: usize, c2: usize, t: usize) -> [Gate; 15] {
    [
        Gate::H(t),
        cx(c2, t),
        Gate::Tdg(t),
        cx(c1, t),
        Gate::T(t),
        cx(c2, t),
        Gate::Tdg(t),
        cx(c1, t),
        Gate::T(c2),
        Gate::T(t),
        Gate::H(t),
        cx(c1, c2),
        Gate::T(c1),
        Gate::Tdg(c2),
        cx(c1, c2),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateJson {
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

impl From<Gate> for GateJson {
    fn from(g: Gate) -> Self {
        GateJson {
            kind: g.name().to_string(),
            qubits: g.qubits(),
            angle: g.angle(),
        }
    }
}

impl TryFrom<GateJson> for Gate {
    type Error = Error;
    fn try_from(j: GateJson) -> Result<Gate> {
        Gate::from_parts(&j.kind, &j.qubits, j.angle)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    global_phase: f64,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            global_phase: 0.0,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>, global_phase: f64) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        c.global_phase = global_phase;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn add_phase(&mut self, phi: f64) {
        self.global_phase += phi;
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::InvalidGate(format!(
                "{} acts on qubit {q} of a {}-qubit circuit",
                g.name(),
                self.n_qubits
            )));
        }
        // Re-validate arity and distinctness through the checked constructor.
        Gate::from_parts(g.name(), &g.qubits(), g.angle())?;
        self.gates.push(g);
        Ok(())
    }

    /// Appends `other` (same width) after `self`.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        self.global_phase += other.global_phase;
        Ok(())
    }

    /// Reversed gate order with each gate inverted and the phase negated.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            global_phase: -self.global_phase,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Same gates on a wider register.
    pub fn widened(&self, n_qubits: usize) -> Result<Circuit> {
        if n_qubits < self.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: n_qubits,
            });
        }
        Ok(Circuit {
            n_qubits,
            ..self.clone()
        })
    }

    pub fn clifford_t(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            global_phase: self.global_phase,
            gates: self.gates.iter().flat_map(Gate::clifford_t).collect(),
        }
    }

    pub fn cnot_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { .. }))
            .count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let raw: Circuit = serde_json::from_str(text)?;
        Circuit::from_gates(raw.n_qubits, raw.gates, raw.global_phase)
    }

    /// OpenQASM 2.0 text. `BasisY` is written as `sdg; h; s` and CSWAP in its
    /// Clifford+T expansion; the global phase rides along in a comment.
    pub fn to_qasm(&self) -> String {
        let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        let _ = writeln!(out, "// global_phase {}", self.global_phase);
        let _ = writeln!(out, "qreg q[{}];", self.n_qubits);
        for g in &self.gates {
            for h in g.clifford_t() {
                match h {
                    Gate::BasisY(q) => {
                        let _ = writeln!(out, "sdg q[{q}];\nh q[{q}];\ns q[{q}];");
                    }
                    Gate::Rz(q, a) => {
                        let _ = writeln!(out, "rz({a}) q[{q}];");
                    }
                    Gate::Cnot { control, target } => {
                        let _ = writeln!(out, "cx q[{control}],q[{target}];");
                    }
                    other => {
                        let qs: Vec<String> =
                            other.qubits().iter().map(|q| format!("q[{q}]")).collect();
                        let _ = writeln!(out, "{} {};", other.name(), qs.join(","));
                    }
                }
            }
        }
        out
    }

    /// Reads the subset written by [`Circuit::to_qasm`].
    pub fn from_qasm(text: &str) -> Result<Circuit> {
        let mut n_qubits = None;
        let mut phase = 0.0;
        let mut gates = Vec::new();
        for raw in text.lines() {
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix("// global_phase") {
                phase = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad phase line '{line}'")))?;
                continue;
            }
            if line.is_empty()
                || line.starts_with("//")
                || line.starts_with("OPENQASM")
                || line.starts_with("include")
            {
                continue;
            }
            let stmt = line
                .strip_suffix(';')
                .ok_or_else(|| Error::Parse(format!("missing ';' in '{line}'")))?;
            if let Some(rest) = stmt.strip_prefix("qreg") {
                n_qubits = Some(parse_index(rest.trim())?);
                continue;
            }
            let (head, args) = stmt
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse(format!("bad statement '{line}'")))?;
            let qubits = args
                .split(',')
                .map(|a| parse_index(a.trim()))
                .collect::<Result<Vec<_>>>()?;
            let (name, angle) = match head.split_once('(') {
                Some((name, rest)) => {
                    let a = rest
                        .strip_suffix(')')
                        .and_then(|a| a.parse::<f64>().ok())
                        .ok_or_else(|| Error::Parse(format!("bad angle in '{line}'")))?;
                    (name, Some(a))
                }
                None => (head, None),
            };
            let kind = if name == "cx" { "cnot" } else { name };
            gates.push(Gate::from_parts(kind, &qubits, angle)?);
        }
        let n = n_qubits.ok_or_else(|| Error::Parse("missing qreg declaration".into()))?;
        Circuit::from_gates(n, gates, phase)
    }
}

fn parse_index(token: &str) -> Result<usize> {
    token
        .strip_prefix("q[")
        .and_then(|t| t.strip_suffix(']'))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad qubit reference '{token}'")))
}

/// Circuit for `exp(-i θ c P)` as a CNOT staircase onto the highest active qubit.
pub fn trotter_term(p: &PauliString, c: Complex64, theta: f64, n_qubits: usize) -> Result<Circuit> {
    if c.im.abs() >= REAL_COEFF_EPS {
        return Err(Error::ComplexCoefficient { re: c.re, im: c.im });
    }
    let mut circ = Circuit::new(n_qubits);
    append_term(&mut circ, p, c.re, theta)?;
    Ok(circ)
}

fn append_term(circ: &mut Circuit, p: &PauliString, c: f64, theta: f64) -> Result<()> {
    let ops = p.ops();
    if ops.is_empty() {
        circ.add_phase(-theta * c);
        return Ok(());
    }
    let basis = |q: usize, l: Pauli| match l {
        Pauli::X => Some(Gate::H(q)),
        Pauli::Y => Some(Gate::BasisY(q)),
        Pauli::Z => None,
    };
    for &(q, l) in ops {
        if let Some(g) = basis(q, l) {
            circ.push(g)?;
        }
    }
    for w in ops.windows(2) {
        circ.push(cx(w[0].0, w[1].0))?;
    }
    let top = ops[ops.len() - 1].0;
    circ.push(Gate::Rz(top, 2.0 * theta * c))?;
    for w in ops.windows(2).rev() {
        circ.push(cx(w[0].0, w[1].0))?;
    }
    for &(q, l) in ops {
        if let Some(g) = basis(q, l) {
            circ.push(g)?;
        }
    }
    Ok(())
}

/// One first-order Trotter factor `Π_k exp(-i θ c_k P_k)` in canonical term order.
pub fn trotter_step(h: &PauliSum, theta: f64) -> Result<Circuit> {
    let order: Vec<usize> = (0..h.len()).collect();
    trotter_step_ordered(h, theta, &order)
}

/// As [`trotter_step`], taking terms in `order` (indices into the canonical term list).
pub fn trotter_step_ordered(h: &PauliSum, theta: f64, order: &[usize]) -> Result<Circuit> {
    if !h.is_hermitian(REAL_COEFF_EPS) {
        return Err(Error::NotHermitian);
    }
    let terms: Vec<_> = h.iter().collect();
    let mut seen = vec![false; terms.len()];
    for &i in order {
        if i >= terms.len() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidGate(format!(
                "term ordering is not a permutation at index {i}"
            )));
        }
    }
    if order.len() != terms.len() {
        return Err(Error::LengthMismatch {
            left: order.len(),
            right: terms.len(),
        });
    }
    let mut circ = Circuit::new(h.n_qubits());
    for &i in order {
        let (p, c) = terms[i];
        append_term(&mut circ, p, c.re, theta)?;
    }
    Ok(circ)
}

/// Sum of `2(p - 1)` over the non-identity strings of `h`.
pub fn staircase_cnot_count(h: &PauliSum) -> usize {
    h.iter()
        .map(|(p, _)| 2 * p.weight().saturating_sub(1))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Decompose {
    #[default]
    None,
    CliffordT,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub n_qubits: usize,
    pub cnot: usize,
    pub swap: usize,
    pub cswap: usize,
    pub x: usize,
    pub h: usize,
    pub basis_y: usize,
    pub s: usize,
    pub sdg: usize,
    pub t: usize,
    pub tdg: usize,
    pub rz: usize,
    /// CNOT + SWAP + CSWAP, each multi-qubit gate counted once.
    pub entangling_raw: usize,
    /// CNOTs after SWAP → 3 CNOT and CSWAP → 8 CNOT.
    pub entangling_decomposed: usize,
}

impl ResourceReport {
    pub fn total_gates(&self) -> usize {
        self.cnot
            + self.swap
            + self.cswap
            + self.x
            + self.h
            + self.basis_y
            + self.s
            + self.sdg
            + self.t
            + self.tdg
            + self.rz
    }
}

pub fn count_resources(c: &Circuit, decompose: Decompose) -> ResourceReport {
    let expanded;
    let circ = match decompose {
        Decompose::None => c,
        Decompose::CliffordT => {
            expanded = c.clifford_t();
            &expanded
        }
    };
    let mut r = ResourceReport {
        n_qubits: circ.n_qubits(),
        ..Default::default()
    };
    for g in circ.gates() {
        match g {
            Gate::X(_) => r.x += 1,
            Gate::H(_) => r.h += 1,
            Gate::BasisY(_) => r.basis_y += 1,
            Gate::S(_) => r.s += 1,
            Gate::Sdg(_) => r.sdg += 1,
            Gate::T(_) => r.t += 1,
            Gate::Tdg(_) => r.tdg += 1,
            Gate::Rz(..) => r.rz += 1,
            Gate::Cnot { .. } => r.cnot += 1,
            Gate::Swap(..) => r.swap += 1,
            Gate::Cswap { .. } => r.cswap += 1,
        }
    }
    r.entangling_raw = r.cnot + r.swap + r.cswap;
    r.entangling_decomposed = r.cnot + 3 * r.swap + 8 * r.cswap;
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn string(text: &str) -> PauliString {
        PauliString::parse(text).unwrap()
    }

    #[test]
    fn staircase_cnot_law() {
        let letters = ["X", "Y", "Z"];
        for p in 1..=8 {
            let text: Vec<String> = (0..p)
                .map(|i| format!("{}{}", letters[i % 3], 2 * i))
                .collect();
            let c =
                trotter_term(&string(&text.join(" ")), Complex64::new(0.3, 0.0), 0.7, 16).unwrap();
            assert_eq!(c.cnot_count(), 2 * (p - 1));
            assert_eq!(count_resources(&c, Decompose::None).rz, 1);
        }
    }

    #[test]
    fn identity_term_is_phase_only() {
        let c = trotter_term(&PauliString::identity(), Complex64::new(0.5, 0.0), 0.8, 2).unwrap();
        assert!(c.is_empty());
        assert!((c.global_phase() + 0.4).abs() < 1e-15);
    }

    #[test]
    fn staircase_layout() {
        let c = trotter_term(&string("X0 Y1 Z3"), Complex64::new(1.0, 0.0), 0.25, 4).unwrap();
        let want = vec![
            Gate::H(0),
            Gate::BasisY(1),
            cx(0, 1),
            cx(1, 3),
            Gate::Rz(3, 0.5),
            cx(1, 3),
            cx(0, 1),
            Gate::H(0),
            Gate::BasisY(1),
        ];
        assert_eq!(c.gates(), &want[..]);
    }

    #[test]
    fn complex_coefficient_rejected() {
        let err = trotter_term(&string("Z0"), Complex64::new(1.0, 0.5), 1.0, 1);
        assert!(matches!(err, Err(Error::ComplexCoefficient { .. })));
        let mut h = PauliSum::new(1);
        h.add_term(string("X0"), Complex64::new(0.0, 1.0));
        assert!(matches!(trotter_step(&h, 1.0), Err(Error::NotHermitian)));
    }

    #[test]
    fn step_count_matches_sum_of_staircases() {
        let mut h = PauliSum::new(3);
        h.add_term(string("Z0"), Complex64::new(1.0, 0.0));
        h.add_term(string("X0 X1 X2"), Complex64::new(0.25, 0.0));
        h.add_term(string("Y0 Z2"), Complex64::new(-0.5, 0.0));
        h.add_term(PauliString::identity(), Complex64::new(2.0, 0.0));
        let c = trotter_step(&h, 0.1).unwrap();
        assert_eq!(c.cnot_count(), staircase_cnot_count(&h));
        assert_eq!(c.cnot_count(), 6);
        assert!(trotter_step_ordered(&h, 0.1, &[0, 1, 1, 2]).is_err());
        assert!(trotter_step_ordered(&h, 0.1, &[3, 2, 1, 0]).is_ok());
    }

    #[test]
    fn clifford_t_template_counts() {
        let mut c = Circuit::new(3);
        c.push(Gate::Cswap {
            control: 0,
            a: 1,
            b: 2,
        })
        .unwrap();
        c.push(Gate::Swap(0, 2)).unwrap();
        let raw = count_resources(&c, Decompose::None);
        assert_eq!(
            (
                raw.cswap,
                raw.swap,
                raw.entangling_raw,
                raw.entangling_decomposed
            ),
            (1, 1, 2, 11)
        );
        let r = count_resources(&c, Decompose::CliffordT);
        assert_eq!(
            (r.cnot, r.h, r.t, r.tdg, r.cswap, r.swap),
            (11, 2, 4, 3, 0, 0)
        );
        assert_eq!(
            count_resources(&Circuit::new(2), Decompose::CliffordT),
            ResourceReport {
                n_qubits: 2,
                ..Default::default()
            }
        );
    }

    #[test]
    fn gate_validation() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::X(2)).is_err());
        assert!(c.push(cx(1, 1)).is_err());
        assert!(Gate::from_parts("cnot", &[0], None).is_err());
        assert!(Gate::from_parts("rz", &[0], None).is_err());
        assert!(Gate::from_parts("h", &[0], Some(1.0)).is_err());
        assert!(Gate::from_parts("ccx", &[0], None).is_err());
    }

    #[test]
    fn qasm_text() {
        let mut c = Circuit::new(2);
        c.push(cx(0, 1)).unwrap();
        c.push(Gate::Rz(0, std::f64::consts::FRAC_PI_2)).unwrap();
        let text = c.to_qasm();
        assert!(text.contains("cx q[0],q[1];"));
        assert!(text.contains("rz(1.5707963267948966) q[0];"));
        assert_eq!(Circuit::from_qasm(&text).unwrap(), c);
        assert!(Circuit::from_qasm("qreg q[1];\nfoo q[0];").is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut c = Circuit::new(3);
        for g in [
            Gate::X(0),
            Gate::H(1),
            Gate::BasisY(2),
            Gate::S(0),
            Gate::Sdg(1),
            Gate::T(2),
            Gate::Tdg(0),
            Gate::Rz(1, 0.1 + 0.2),
            cx(2, 0),
            Gate::Swap(0, 1),
            Gate::Cswap {
                control: 2,
                a: 0,
                b: 1,
            },
        ] {
            c.push(g).unwrap();
        }
        c.add_phase(-1.0 / 3.0);
        let text = c.to_json().unwrap();
        assert!(text.contains("\"kind\": \"basis_y\""));
        assert_eq!(Circuit::from_json(&text).unwrap(), c);
        let bad = r#"{"n_qubits":1,"global_phase":0,"gates":[{"kind":"x","qubits":[3]}]}"#;
        assert!(Circuit::from_json(bad).is_err());
    }

    #[test]
    fn inverse_reverses() {
        let c = Circuit::from_gates(2, vec![Gate::T(0), cx(0, 1), Gate::Rz(1, 0.3)], 0.2).unwrap();
        let inv = c.inverse();
        assert_eq!(inv.gates(), &[Gate::Rz(1, -0.3), cx(0, 1), Gate::Tdg(0)]);
        assert_eq!(inv.global_phase(), -0.2);
    }
}
