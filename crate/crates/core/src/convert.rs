//! Circuits that move a register between encodings, and their closed-form costs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{count_resources, Circuit, Decompose, Gate, ResourceReport};
use crate::encoding::ceil_log2;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConversionKind {
    SbToGray,
    GrayToSb,
    SbToUnary,
    UnaryToSb,
    /// Fixed showcase: block unary with SB-coded blocks of size 3, d = 12.
    SbToBuG3D12,
}

impl ConversionKind {
    pub fn name(self) -> &'static str {
        match self {
            ConversionKind::SbToGray => "sb2gray",
            ConversionKind::GrayToSb => "gray2sb",
            ConversionKind::SbToUnary => "sb2unary",
            ConversionKind::UnaryToSb => "unary2sb",
            ConversionKind::SbToBuG3D12 => "sb2bu",
        }
    }
}

impl FromStr for ConversionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            ConversionKind::SbToGray,
            ConversionKind::GrayToSb,
            ConversionKind::SbToUnary,
            ConversionKind::UnaryToSb,
            ConversionKind::SbToBuG3D12,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::Parse(format!("unknown conversion kind '{s}'")))
    }
}

impl fmt::Display for ConversionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidEncoding(format!("need d >= 2, got {d}")));
    }
    Ok(())
}

fn cx(control: usize, target: usize) -> Gate {
    Gate::Cnot { control, target }
}

/// `K - 1` CNOTs, each folding bit `i + 1` into bit `i`, lowest pair first.
pub fn sb_to_gray_circuit(d: usize) -> Result<Circuit> {
    check_d(d)?;
    let k = ceil_log2(d);
    let gates = (0..k.saturating_sub(1)).map(|i| cx(i + 1, i)).collect();
    Circuit::from_gates(k, gates, 0.0)
}

pub fn gray_to_sb_circuit(d: usize) -> Result<Circuit> {
    Ok(sb_to_gray_circuit(d)?.inverse())
}

/// SB → unary on `d` qubits. The SB value enters on qubits `0..K`.
#[derive(Clone, Debug, PartialEq)]
pub struct SbToUnary {
    /// SWAPs moving SB bit `b` to qubit `2^(b+1) - 1` (the top bit to `d - 1`).
    pub layout: Circuit,
    /// X, CNOT and CSWAP fan-out on the relocated bits.
    pub body: Circuit,
}

impl SbToUnary {
    pub fn full(&self) -> Circuit {
        let mut c = self.layout.clone();
        c.append(&self.body).expect("same width");
        c
    }
}

pub fn sb_to_unary_circuit(d: usize) -> Result<SbToUnary> {
    check_d(d)?;
    let k = ceil_log2(d);
    let mut layout = Circuit::new(d);
    layout.push(Gate::Swap(k - 1, d - 1))?;
    for b in (0..k.saturating_sub(1)).rev() {
        layout.push(Gate::Swap(b, (1 << (b + 1)) - 1))?;
    }
    let mut body = Circuit::new(d);
    body.push(Gate::X(0))?;
    body.push(cx(1, 0))?;
    for b in 1..k {
        let step = 1usize << b;
        let ctr = ((1usize << (b + 1)) - 1).min(d - 1);
        for l in step..ctr {
            body.push(Gate::Cswap {
                control: ctr,
                a: l,
                b: l - step,
            })?;
        }
        for l in step..ctr {
            body.push(cx(l, ctr))?;
        }
        body.push(cx(ctr, ctr - step))?;
    }
    Ok(SbToUnary { layout, body })
}

pub fn unary_to_sb_circuit(d: usize) -> Result<Circuit> {
    Ok(sb_to_unary_circuit(d)?.full().inverse())
}

/// SB (qubits 0..4) → block unary with g = 3 and SB-coded blocks (qubits 0..8)
/// for d = 12. Qubits 8..12 are workspace that starts and ends in |0>.
pub fn sb_to_bu_circuit() -> Result<Circuit> {
    let mut c = sb_to_unary_circuit(12)?.full();
    for k in 0..4 {
        let (a, b, cc) = (3 * k, 3 * k + 1, 3 * k + 2);
        c.push(cx(cc, a))?;
        c.push(Gate::Cswap {
            control: a,
            a: b,
            b: cc,
        })?;
    }
    for k in 1..4 {
        c.push(Gate::Swap(3 * k, 2 * k))?;
        c.push(Gate::Swap(3 * k + 1, 2 * k + 1))?;
    }
    Ok(c)
}

pub fn conversion_circuit(kind: ConversionKind, d: usize) -> Result<Circuit> {
    match kind {
        ConversionKind::SbToGray => sb_to_gray_circuit(d),
        ConversionKind::GrayToSb => gray_to_sb_circuit(d),
        ConversionKind::SbToUnary => Ok(sb_to_unary_circuit(d)?.full()),
        ConversionKind::UnaryToSb => unary_to_sb_circuit(d),
        ConversionKind::SbToBuG3D12 => {
            if d != 12 {
                return Err(Error::InvalidEncoding(format!(
                    "the block-unary conversion is only built for d = 12, got {d}"
                )));
            }
            sb_to_bu_circuit()
        }
    }
}

/// Closed-form cost. SB↔unary counts exclude the layout SWAPs.
pub fn conversion_cost(
    kind: ConversionKind,
    d: usize,
    decompose: Decompose,
) -> Result<ResourceReport> {
    check_d(d)?;
    let k = ceil_log2(d);
    let mut r = ResourceReport::default();
    match kind {
        ConversionKind::SbToGray | ConversionKind::GrayToSb => {
            r.n_qubits = k;
            r.cnot = k - 1;
        }
        ConversionKind::SbToUnary | ConversionKind::UnaryToSb => {
            r.n_qubits = d;
            r.x = 1;
            let m = d - k - 1;
            match decompose {
                Decompose::None => {
                    r.cnot = d - 1;
                    r.cswap = m;
                }
                Decompose::CliffordT => {
                    r.cnot = 9 * d - 8 * k - 9;
                    r.h = 2 * m;
                    r.t = 4 * m;
                    r.tdg = 3 * m;
                }
            }
        }
        ConversionKind::SbToBuG3D12 => {
            return Ok(count_resources(&conversion_circuit(kind, d)?, decompose));
        }
    }
    r.entangling_raw = r.cnot + r.swap + r.cswap;
    r.entangling_decomposed = r.cnot + 3 * r.swap + 8 * r.cswap;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{EncodingSpec, LocalCode};
    use crate::sim::{apply_circuit, permute_basis_state, verify_circuit_equivalence};
    use num_complex::Complex64;

    fn index(spec: &EncodingSpec, l: usize) -> usize {
        let b = spec.encode(l).unwrap();
        b.value_of(0..b.len())
    }

    #[test]
    fn gray_conversion_maps_every_codeword() {
        for k in 1..=4 {
            let d = 1 << k;
            let c = sb_to_gray_circuit(d).unwrap();
            assert_eq!(c.cnot_count(), k - 1);
            let gray = EncodingSpec::gray(d).unwrap();
            for l in 0..d {
                assert_eq!(permute_basis_state(&c, l), Some(index(&gray, l)));
                assert_eq!(
                    permute_basis_state(&gray_to_sb_circuit(d).unwrap(), index(&gray, l)),
                    Some(l)
                );
            }
        }
        assert_eq!(
            permute_basis_state(&sb_to_gray_circuit(16).unwrap(), 0b0101),
            Some(0b0111)
        );
        assert!(sb_to_gray_circuit(2).unwrap().is_empty());
    }

    #[test]
    fn unary_conversion_maps_every_codeword() {
        for d in 2..=16 {
            let conv = sb_to_unary_circuit(d).unwrap();
            let full = conv.full();
            for l in 0..d {
                assert_eq!(permute_basis_state(&full, l), Some(1 << l), "d={d} l={l}");
            }
            let raw = count_resources(&conv.body, Decompose::None);
            let want = conversion_cost(ConversionKind::SbToUnary, d, Decompose::None).unwrap();
            assert_eq!(
                (raw.cnot, raw.cswap, raw.x),
                (want.cnot, want.cswap, want.x),
                "d={d}"
            );
            let ct = count_resources(&conv.body, Decompose::CliffordT);
            let want = conversion_cost(ConversionKind::SbToUnary, d, Decompose::CliffordT).unwrap();
            assert_eq!(
                (ct.cnot, ct.h, ct.t, ct.tdg, ct.x),
                (want.cnot, want.h, want.t, want.tdg, want.x)
            );
            assert!(conv
                .layout
                .gates()
                .iter()
                .all(|g| matches!(g, Gate::Swap(..))));
        }
    }

    #[test]
    fn last_cnot_for_five_levels() {
        let body = sb_to_unary_circuit(5).unwrap().body;
        assert_eq!(
            body.gates().last(),
            Some(&Gate::Cnot {
                control: 4,
                target: 0
            })
        );
    }

    #[test]
    fn sixteen_level_tallies() {
        let r = conversion_cost(ConversionKind::SbToUnary, 16, Decompose::None).unwrap();
        assert_eq!((r.cnot, r.cswap, r.x), (15, 11, 1));
        let r = conversion_cost(ConversionKind::SbToUnary, 16, Decompose::CliffordT).unwrap();
        assert_eq!((r.cnot, r.h, r.t, r.tdg), (103, 22, 44, 33));
        assert_eq!(
            conversion_cost(ConversionKind::SbToGray, 8, Decompose::None)
                .unwrap()
                .cnot,
            2
        );
    }

    #[test]
    fn superpositions_map_linearly() {
        let d = 6;
        let full = sb_to_unary_circuit(d).unwrap().full();
        let amps = [
            (1usize, Complex64::new(0.6, 0.0)),
            (3, Complex64::new(0.0, 0.48)),
            (5, Complex64::new(-0.64, 0.0)),
        ];
        let mut state = vec![Complex64::new(0.0, 0.0); 1 << d];
        for &(l, a) in &amps {
            state[l] = a;
        }
        apply_circuit(&full, &mut state);
        for &(l, a) in &amps {
            assert!((state[1 << l] - a).norm() < 1e-12);
        }
    }

    #[test]
    fn block_unary_conversion() {
        let c = sb_to_bu_circuit().unwrap();
        let bu = EncodingSpec::block_unary(LocalCode::Sb, 3, 12).unwrap();
        for l in 0..12 {
            assert_eq!(permute_basis_state(&c, l), Some(index(&bu, l)), "l={l}");
            assert_eq!(permute_basis_state(&c.inverse(), index(&bu, l)), Some(l));
        }
        assert_eq!(bu.display(&bu.encode(0).unwrap()), "00 00 00 01");
        assert_eq!(bu.display(&bu.encode(11).unwrap()), "11 00 00 00");
        assert!(conversion_circuit(ConversionKind::SbToBuG3D12, 8).is_err());
    }

    #[test]
    fn reversal_is_identity() {
        for d in [3, 4, 7] {
            let c = conversion_circuit(ConversionKind::SbToUnary, d).unwrap();
            let mut both = c.clone();
            both.append(&conversion_circuit(ConversionKind::UnaryToSb, d).unwrap())
                .unwrap();
            assert!(verify_circuit_equivalence(&both, &Circuit::new(d), false, 1e-10).unwrap());
        }
    }

    #[test]
    fn names_round_trip() {
        for k in ["sb2gray", "gray2sb", "sb2unary", "unary2sb", "sb2bu"] {
            assert_eq!(k.parse::<ConversionKind>().unwrap().name(), k);
        }
        assert!("x2y".parse::<ConversionKind>().is_err());
    }
}
