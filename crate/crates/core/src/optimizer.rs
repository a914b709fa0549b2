//! Peephole passes: inverse-pair cancellation, Rz merging and the
//! CNOT-triple rewrite, each commuting gates through a conservative table.

use std::f64::consts::PI;
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{trotter_step_ordered, Circuit, Gate};
use crate::error::Result;
use crate::pauli::PauliSum;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassConfig {
    pub cancel_inverse_pairs: bool,
    pub merge_rotations: bool,
    pub cnot_triple_rewrite: bool,
    pub max_sweeps: usize,
    pub angle_merge_eps: f64,
}

impl Default for PassConfig {
    fn default() -> Self {
        Self {
            cancel_inverse_pairs: true,
            merge_rotations: true,
            cnot_triple_rewrite: true,
            max_sweeps: 50,
            angle_merge_eps: 1e-12,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Action {
    /// Diagonal in the computational basis.
    Z,
    /// In span{I, X}.
    X,
    Other,
}

fn action(g: &Gate, q: usize) -> Option<Action> {
    Some(match *g {
        Gate::Rz(p, _) | Gate::T(p) | Gate::Tdg(p) | Gate::S(p) | Gate::Sdg(p) if p == q => {
            Action::Z
        }
        Gate::X(p) if p == q => Action::X,
        Gate::H(p) | Gate::BasisY(p) if p == q => Action::Other,
        Gate::Cnot { control, .. } if control == q => Action::Z,
        Gate::Cnot { target, .. } if target == q => Action::X,
        Gate::Swap(a, b) if a == q || b == q => Action::Other,
        Gate::Cswap { control, .. } if control == q => Action::Z,
        Gate::Cswap { a, b, .. } if a == q || b == q => Action::Other,
        _ => return None,
    })
}

/// True when the pair provably commutes: disjoint supports, identical gates,
/// or matching Z/Z or X/X action on every shared qubit.
pub fn gates_commute(a: &Gate, b: &Gate) -> bool {
    if a == b {
        return true;
    }
    a.qubits().iter().all(|&q| {
        matches!(
            (action(a, q), action(b, q)),
            (_, None) | (Some(Action::Z), Some(Action::Z)) | (Some(Action::X), Some(Action::X))
        )
    })
}

fn cancels(a: &Gate, b: &Gate) -> bool {
    !matches!(a, Gate::Rz(..)) && a.inverse() == *b
}

/// Positions gate `index` can be moved to by commuting it through neighbours.
pub fn commute_window(c: &Circuit, index: usize) -> Range<usize> {
    let gates = c.gates();
    let g = &gates[index];
    let mut lo = index;
    while lo > 0 && gates_commute(g, &gates[lo - 1]) {
        lo -= 1;
    }
    let mut hi = index;
    while hi + 1 < gates.len() && gates_commute(g, &gates[hi + 1]) {
        hi += 1;
    }
    lo..hi + 1
}

struct Work {
    n_qubits: usize,
    phase: f64,
    gates: Vec<Option<Gate>>,
    /// Gate inserted right after the slot with the same index.
    after: Vec<Option<Gate>>,
    wires: Vec<Vec<usize>>,
}

impl Work {
    fn new(c: &Circuit) -> Self {
        let mut w = Work {
            n_qubits: c.n_qubits(),
            phase: c.global_phase(),
            gates: c.gates().iter().copied().map(Some).collect(),
            after: vec![None; c.len()],
            wires: Vec::new(),
        };
        w.rebuild_wires();
        w
    }

    fn rebuild_wires(&mut self) {
        self.wires = vec![Vec::new(); self.n_qubits];
        for (i, g) in self.gates.iter().enumerate() {
            if let Some(g) = g {
                for q in g.qubits() {
                    self.wires[q].push(i);
                }
            }
        }
    }

    /// Next live gate index after `i` on wire `q`.
    fn next_on(&self, q: usize, i: usize) -> Option<usize> {
        let wire = &self.wires[q];
        let start = wire.partition_point(|&j| j <= i);
        wire[start..]
            .iter()
            .copied()
            .find(|&j| self.gates[j].is_some())
    }

    /// Walks forward from gate `i` through commuting gates and returns the
    /// first gate satisfying `hit`, if reached on every shared wire.
    fn find_forward(&self, i: usize, hit: impl Fn(&Gate) -> bool) -> Option<usize> {
        let g = self.gates[i]?;
        let qubits = g.qubits();
        let mut cursor: Vec<usize> = vec![i; qubits.len()];
        loop {
            let next = qubits
                .iter()
                .zip(&cursor)
                .filter_map(|(&q, &c)| self.next_on(q, c))
                .min()?;
            let h = self.gates[next]?;
            if hit(&h) {
                return Some(next);
            }
            if !gates_commute(&g, &h) {
                return None;
            }
            for (k, &q) in qubits.iter().enumerate() {
                if h.qubits().contains(&q) {
                    cursor[k] = next;
                }
            }
        }
    }

    fn finish(self) -> Circuit {
        let mut out = Vec::with_capacity(self.gates.len());
        for (g, extra) in self.gates.into_iter().zip(self.after) {
            out.extend(g);
            out.extend(extra);
        }
        Circuit::from_gates(self.n_qubits, out, self.phase).expect("rewrites keep gates valid")
    }

    fn cancel_pass(&mut self) -> bool {
        let mut changed = false;
        for i in (0..self.gates.len()).rev() {
            let Some(g) = self.gates[i] else { continue };
            if let Some(j) = self.find_forward(i, |h| cancels(&g, h)) {
                self.gates[i] = None;
                self.gates[j] = None;
                changed = true;
            }
        }
        changed
    }

    fn merge_pass(&mut self, eps: f64) -> bool {
        let mut changed = false;
        for i in (0..self.gates.len()).rev() {
            let Some(Gate::Rz(q, a)) = self.gates[i] else {
                continue;
            };
            if let Some(j) = self.find_forward(i, |h| matches!(h, Gate::Rz(p, _) if *p == q)) {
                if let Some(Gate::Rz(_, b)) = self.gates[j] {
                    self.gates[j] = Some(Gate::Rz(q, a + b));
                    self.gates[i] = None;
                    changed = true;
                }
            }
        }
        for slot in self.gates.iter_mut() {
            if let Some(Gate::Rz(_, a)) = *slot {
                // Rz(2π) = -I, so only multiples of 4π are free; 2π costs a phase of π.
                let r = a.rem_euclid(4.0 * PI);
                if r < eps || 4.0 * PI - r < eps {
                    *slot = None;
                    changed = true;
                } else if (r - 2.0 * PI).abs() < eps {
                    *slot = None;
                    self.phase += PI;
                    changed = true;
                }
            }
        }
        changed
    }

    /// CNOT(a,b) CNOT(b,c) CNOT(a,b) → CNOT(a,c) CNOT(b,c) when the three are
    /// consecutive on wires a and b and nothing touches c between the last two.
    fn triple_pass(&mut self) -> bool {
        let mut changed = false;
        let mut dirty = vec![false; self.n_qubits];
        for i in 0..self.gates.len() {
            let Some(Gate::Cnot {
                control: a,
                target: b,
            }) = self.gates[i]
            else {
                continue;
            };
            let Some(j) = self.next_on(b, i) else {
                continue;
            };
            let Some(Gate::Cnot {
                control: b2,
                target: c,
            }) = self.gates[j]
            else {
                continue;
            };
            if b2 != b || c == a {
                continue;
            }
            let Some(k) = self.next_on(b, j) else {
                continue;
            };
            if self.gates[k]
                != Some(Gate::Cnot {
                    control: a,
                    target: b,
                })
                || self.next_on(a, i) != Some(k)
            {
                continue;
            }
            if self.next_on(c, j).is_some_and(|m| m < k) {
                continue;
            }
            if dirty[a] || dirty[b] || dirty[c] {
                continue;
            }
            self.gates[i] = None;
            self.gates[j] = None;
            self.gates[k] = Some(Gate::Cnot {
                control: a,
                target: c,
            });
            self.after[k] = Some(Gate::Cnot {
                control: b,
                target: c,
            });
            dirty[a] = true;
            dirty[b] = true;
            dirty[c] = true;
            changed = true;
        }
        changed
    }
}

/// Runs the enabled passes (cancel, merge, triple) until nothing changes or
/// `max_sweeps` is reached. Returns the circuit and the sweep count.
pub fn optimize_with_stats(c: &Circuit, cfg: &PassConfig) -> (Circuit, usize) {
    let mut current = c.clone();
    for sweep in 1..=cfg.max_sweeps.max(1) {
        let mut changed = false;
        if cfg.cancel_inverse_pairs {
            let mut w = Work::new(&current);
            changed |= w.cancel_pass();
            current = w.finish();
        }
        if cfg.merge_rotations {
            let mut w = Work::new(&current);
            changed |= w.merge_pass(cfg.angle_merge_eps);
            current = w.finish();
        }
        if cfg.cnot_triple_rewrite {
            let mut w = Work::new(&current);
            changed |= w.triple_pass();
            current = w.finish();
        }
        if !changed {
            return (current, sweep);
        }
    }
    (current, cfg.max_sweeps.max(1))
}

pub fn optimize(c: &Circuit, cfg: &PassConfig) -> Circuit {
    optimize_with_stats(c, cfg).0
}

/// Optimized CNOT counts of `count` seeded random term orderings of `h`.
pub fn random_ordering_baseline(
    h: &PauliSum,
    theta: f64,
    count: usize,
    seed: u64,
    cfg: &PassConfig,
) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..h.len()).collect();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        order.shuffle(&mut rng);
        let circ = trotter_step_ordered(h, theta, &order)?;
        out.push(optimize(&circ, cfg).cnot_count());
    }
    Ok(out)
}
