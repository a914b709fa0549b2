//! Composite Hamiltonians as lists of local d-level terms, priced under the
//! five encoding schemes, plus the boson-sampling layer circuit.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{trotter_step, Circuit, Decompose};
use crate::convert::{conversion_cost, ConversionKind};
use crate::encoder::{augment_truncation, encode_matrix, matrix_digest};
use crate::encoding::{ceil_log2, EncodingSpec};
use crate::error::{Error, Result};
use crate::operators::{bosonic, spin_twice, BosonOp, Origin, QuditMatrix, SpinAxis};
use crate::optimizer::{optimize, PassConfig};
use crate::pauli::{PauliSum, PRUNE_EPS};
use crate::sim::pauli_matrix_element;

const COEFF_EPS: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    BoseHubbard,
    ShiftedQho,
    FranckCondon,
    Heisenberg,
    BosonSampling,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::BoseHubbard,
        ModelKind::ShiftedQho,
        ModelKind::FranckCondon,
        ModelKind::Heisenberg,
        ModelKind::BosonSampling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::BoseHubbard => "bose-hubbard",
            ModelKind::ShiftedQho => "shifted-qho",
            ModelKind::FranckCondon => "franck-condon",
            ModelKind::Heisenberg => "heisenberg",
            ModelKind::BosonSampling => "boson-sampling",
        }
    }

    pub fn is_spin(self) -> bool {
        self == ModelKind::Heisenberg
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        let alias = match key.as_str() {
            "qho" | "shifted-qho-1d" | "qho1d" => "shifted-qho",
            "fc" => "franck-condon",
            "bh" => "bose-hubbard",
            "bs" => "boson-sampling",
            other => other,
        };
        Self::ALL
            .into_iter()
            .find(|m| m.name() == alias)
            .ok_or_else(|| Error::Parse(format!("unknown model '{s}'")))
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One boson-sampling element with its angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpticalGate {
    PhaseShifter { mode: usize, theta: f64 },
    BeamSplitter { i: usize, j: usize, theta: f64 },
}

impl OpticalGate {
    pub fn theta(&self) -> f64 {
        match *self {
            OpticalGate::PhaseShifter { theta, .. } | OpticalGate::BeamSplitter { theta, .. } => {
                theta
            }
        }
    }

    pub fn modes(&self) -> Vec<usize> {
        match *self {
            OpticalGate::PhaseShifter { mode, .. } => vec![mode],
            OpticalGate::BeamSplitter { i, j, .. } => vec![i, j],
        }
    }
}

/// Model parameters. Config-file keys follow the Hamiltonian symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub t: f64,
    #[serde(rename = "U", alias = "u")]
    pub u: f64,
    pub mu: f64,
    pub omega: f64,
    pub delta: f64,
    #[serde(rename = "J", alias = "j")]
    pub j: f64,
    pub g_field: f64,
    /// Nonzeros per Duschinsky row.
    pub k: usize,
    pub seed: u64,
    /// Periodic bonds; defaults to true for Bose-Hubbard and false for Heisenberg.
    pub periodic: Option<bool>,
    /// Brick-wall depth for a generated boson-sampling gate list (0 means one layer per mode).
    pub layers: usize,
    /// Explicit boson-sampling gate list; generated from `seed` when absent.
    pub gates: Option<Vec<OpticalGate>>,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            t: 1.0,
            u: 1.0,
            mu: 0.5,
            omega: 1.0,
            delta: 0.5,
            j: 1.0,
            g_field: 1.0,
            k: 4,
            seed: 0,
            periodic: None,
            layers: 0,
            gates: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Levels per site (2s + 1 for spins).
    pub d: usize,
    /// Sites, modes or spins.
    pub n: usize,
    pub params: ModelParams,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, d: usize, n: usize, params: ModelParams) -> Result<Self> {
        let spec = Self { kind, d, n, params };
        spec.validate()?;
        Ok(spec)
    }

    /// Spin chain of spin `s`; `d = 2s + 1`.
    pub fn heisenberg(s: f64, n: usize, params: ModelParams) -> Result<Self> {
        let twice = crate::operators::twice_spin(s)?;
        Self::new(ModelKind::Heisenberg, twice + 1, n, params)
    }

    pub fn spin(&self) -> Option<f64> {
        self.kind.is_spin().then(|| (self.d - 1) as f64 / 2.0)
    }

    /// The `d_or_s` report column: `s` for spin models, `d` otherwise.
    pub fn d_or_s(&self) -> String {
        match self.spin() {
            Some(s) => format!("{s}"),
            None => self.d.to_string(),
        }
    }

    fn periodic(&self) -> bool {
        self.params
            .periodic
            .unwrap_or(self.kind == ModelKind::BoseHubbard)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModel(m));
        if self.d < 2 {
            return bad(format!("need d >= 2, got {}", self.d));
        }
        if self.n == 0 {
            return bad("need at least one site".into());
        }
        let p = &self.params;
        for (name, v) in [
            ("t", p.t),
            ("U", p.u),
            ("mu", p.mu),
            ("omega", p.omega),
            ("delta", p.delta),
            ("J", p.j),
            ("g_field", p.g_field),
        ] {
            if !v.is_finite() {
                return bad(format!("parameter {name} is not finite"));
            }
        }
        match self.kind {
            ModelKind::BoseHubbard if self.n < 2 => bad("Bose-Hubbard needs N >= 2".into()),
            ModelKind::Heisenberg if self.n < 2 => bad("Heisenberg needs N >= 2".into()),
            ModelKind::FranckCondon if p.k == 0 || p.k > self.n => bad(format!(
                "need 1 <= k <= M, got k = {} with M = {}",
                p.k, self.n
            )),
            ModelKind::FranckCondon if p.omega <= 0.0 => bad("omega must be positive".into()),
            ModelKind::BosonSampling => {
                if let Some(gates) = &p.gates {
                    for g in gates {
                        check_gate(g, self.n)?;
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn check_gate(g: &OpticalGate, n_modes: usize) -> Result<()> {
    let modes = g.modes();
    if let Some(&m) = modes.iter().find(|&&m| m >= n_modes) {
        return Err(Error::InvalidModel(format!(
            "mode {m} out of range for {n_modes} modes"
        )));
    }
    if modes.len() == 2 && modes[0] == modes[1] {
        return Err(Error::InvalidModel(format!(
            "beamsplitter needs two distinct modes, got {}",
            modes[0]
        )));
    }
    if !g.theta().is_finite() {
        return Err(Error::InvalidModel("gate angle is not finite".into()));
    }
    Ok(())
}

/// `coefficient · Σ_k ⊗_s factors[k][s]` on `sites`. Constant terms have no
/// sites and no factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalTerm {
    pub label: String,
    pub sites: Vec<usize>,
    pub factors: Vec<Vec<QuditMatrix>>,
    pub coefficient: f64,
}

impl LocalTerm {
    fn one(label: &str, site: usize, m: QuditMatrix, coefficient: f64) -> Self {
        Self {
            label: label.into(),
            sites: vec![site],
            factors: vec![vec![m]],
            coefficient,
        }
    }

    fn two(
        label: &str,
        i: usize,
        j: usize,
        products: Vec<[QuditMatrix; 2]>,
        coefficient: f64,
    ) -> Self {
        Self {
            label: label.into(),
            sites: vec![i, j],
            factors: products.into_iter().map(Vec::from).collect(),
            coefficient,
        }
    }

    fn constant(coefficient: f64) -> Self {
        Self {
            label: "const".into(),
            sites: Vec::new(),
            factors: Vec::new(),
            coefficient,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.sites.is_empty()
    }

    /// Dense matrix of the unit-coefficient operator, site 0 of `sites` least significant.
    pub fn dense(&self) -> DMatrix<Complex64> {
        let mut total: Option<DMatrix<Complex64>> = None;
        for product in &self.factors {
            let mut m = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
            for f in product {
                m = f.entries().kronecker(&m);
            }
            total = Some(match total {
                Some(t) => t + m,
                None => m,
            });
        }
        total.unwrap_or_else(|| DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)))
    }

    fn cache_key(&self) -> String {
        let mut key = self.label.clone();
        for product in &self.factors {
            key.push('|');
            for f in product {
                key.push_str(&matrix_digest(f)[..16]);
                key.push(',');
            }
        }
        key
    }

    fn augmentable(&self) -> bool {
        self.factors
            .iter()
            .flatten()
            .all(|f| matches!(f.origin(), Origin::Boson { .. }))
    }

    fn augmented(&self) -> Result<LocalTerm> {
        let mut out = self.clone();
        for f in out.factors.iter_mut().flatten() {
            *f = augment_truncation(f)?;
        }
        Ok(out)
    }
}

/// Unit-coefficient encoded operator on `sites.len()` consecutive blocks of
/// `spec.num_qubits()` qubits each.
pub fn encode_term(term: &LocalTerm, spec: &EncodingSpec) -> Result<PauliSum> {
    let w = spec.num_qubits();
    let total = w * term.sites.len();
    if term.is_constant() {
        return Ok(PauliSum::identity(0, Complex64::new(1.0, 0.0)));
    }
    let mut out = PauliSum::new(total);
    for product in &term.factors {
        let mut acc = PauliSum::identity(total, Complex64::new(1.0, 0.0));
        for (slot, f) in product.iter().enumerate() {
            let enc = encode_matrix(spec, f)?.sum.tensor_shift(slot * w, total)?;
            acc = acc.multiply(&enc)?;
        }
        for (p, c) in acc.iter() {
            out.add_term(p.clone(), *c);
        }
    }
    Ok(out.simplify(PRUNE_EPS))
}

/// Largest deviation between `encode_term` and the dense term on the codeword subspace.
pub fn verify_term(term: &LocalTerm, spec: &EncodingSpec) -> Result<f64> {
    let sum = encode_term(term, spec)?;
    let dense = term.dense();
    let sites = term.sites.len();
    let d = spec.d;
    let w = spec.num_qubits();
    let codes: Vec<usize> = spec
        .codewords()
        .iter()
        .map(|b| b.value_of(0..b.len()))
        .collect();
    let index = |mut flat: usize| {
        let mut idx = 0;
        for s in 0..sites {
            idx |= codes[flat % d] << (s * w);
            flat /= d;
        }
        idx
    };
    let mut err: f64 = 0.0;
    for r in 0..dense.nrows() {
        for c in 0..dense.ncols() {
            let got = pauli_matrix_element(&sum, index(r), index(c));
            err = err.max((got - dense[(r, c)]).norm());
        }
    }
    Ok(err)
}

/// Expands `spec` into its local terms.
pub fn build_model(spec: &ModelSpec) -> Result<Vec<LocalTerm>> {
    spec.validate()?;
    let (d, n, p) = (spec.d, spec.n, &spec.params);
    let b = |op| bosonic(d, op);
    let mut terms = Vec::new();
    match spec.kind {
        ModelKind::BoseHubbard => {
            let (a, ad) = (b(BosonOp::A)?, b(BosonOp::Adag)?);
            let bonds = if spec.periodic() { n } else { n - 1 };
            for i in 0..bonds {
                terms.push(hopping(i, (i + 1) % n, &a, &ad, -p.t));
            }
            for i in 0..n {
                terms.push(LocalTerm::one(
                    "n_nminus1",
                    i,
                    b(BosonOp::NNminus1)?,
                    p.u / 2.0,
                ));
            }
            for i in 0..n {
                terms.push(LocalTerm::one("n", i, b(BosonOp::N)?, -p.mu));
            }
        }
        ModelKind::ShiftedQho => {
            for i in 0..n {
                terms.push(LocalTerm::one("q2", i, b(BosonOp::Q2)?, p.omega / 2.0));
                terms.push(LocalTerm::one("p2", i, b(BosonOp::P2)?, p.omega / 2.0));
                terms.push(LocalTerm::one("q", i, b(BosonOp::Q)?, -p.omega * p.delta));
                terms.push(LocalTerm::constant(p.omega * p.delta * p.delta / 2.0));
            }
        }
        ModelKind::FranckCondon => terms = franck_condon_terms(spec)?,
        ModelKind::Heisenberg => {
            let twice = d - 1;
            let sz = spin_twice(twice, SpinAxis::Z)?;
            let sx = spin_twice(twice, SpinAxis::X)?;
            let bonds = if spec.periodic() { n } else { n - 1 };
            for i in 0..bonds {
                terms.push(LocalTerm::two(
                    "szsz",
                    i,
                    (i + 1) % n,
                    vec![[sz.clone(), sz.clone()]],
                    -p.j,
                ));
            }
            for i in 0..n {
                terms.push(LocalTerm::one("sx", i, sx.clone(), -p.g_field * p.j));
            }
        }
        ModelKind::BosonSampling => {
            let (a, ad, num) = (b(BosonOp::A)?, b(BosonOp::Adag)?, b(BosonOp::N)?);
            for g in boson_sampling_gates(spec) {
                check_gate(&g, n)?;
                terms.push(match g {
                    OpticalGate::PhaseShifter { mode, theta } => {
                        LocalTerm::one("n", mode, num.clone(), theta)
                    }
                    OpticalGate::BeamSplitter { i, j, theta } => hopping(i, j, &a, &ad, theta),
                });
            }
        }
    }
    Ok(terms)
}

fn hopping(i: usize, j: usize, a: &QuditMatrix, ad: &QuditMatrix, coefficient: f64) -> LocalTerm {
    LocalTerm::two(
        "hop",
        i,
        j,
        vec![[ad.clone(), a.clone()], [a.clone(), ad.clone()]],
        coefficient,
    )
}

/// The explicit gate list, or a seeded brick wall: every layer applies a phase
/// shifter to each mode, then beamsplitters on alternating neighbour pairs.
pub fn boson_sampling_gates(spec: &ModelSpec) -> Vec<OpticalGate> {
    if let Some(g) = &spec.params.gates {
        return g.clone();
    }
    let n = spec.n;
    let layers = if spec.params.layers == 0 {
        n
    } else {
        spec.params.layers
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.params.seed);
    let mut gates = Vec::new();
    for layer in 0..layers {
        for mode in 0..n {
            gates.push(OpticalGate::PhaseShifter {
                mode,
                theta: rng.gen_range(0.0..2.0 * PI),
            });
        }
        for i in (layer % 2..n.saturating_sub(1)).step_by(2) {
            gates.push(OpticalGate::BeamSplitter {
                i,
                j: i + 1,
                theta: rng.gen_range(0.0..PI / 2.0),
            });
        }
    }
    gates
}

/// Seeded frequencies, displacements and Duschinsky matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FranckCondonData {
    pub omega_a: Vec<f64>,
    pub omega_b: Vec<f64>,
    pub delta: Vec<f64>,
    /// `k` nonzeros per row (the diagonal always among them), rows normalized.
    pub duschinsky: DMatrix<f64>,
}

pub fn franck_condon_data(m: usize, params: &ModelParams) -> Result<FranckCondonData> {
    if params.k == 0 || params.k > m {
        return Err(Error::InvalidModel(format!(
            "need 1 <= k <= M, got k = {} with M = {m}",
            params.k
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let freq = |rng: &mut ChaCha8Rng| params.omega * rng.gen_range(0.5..1.5);
    let omega_a: Vec<f64> = (0..m).map(|_| freq(&mut rng)).collect();
    let omega_b: Vec<f64> = (0..m).map(|_| freq(&mut rng)).collect();
    let delta: Vec<f64> = (0..m)
        .map(|_| params.delta * rng.gen_range(0.5..1.5))
        .collect();
    let mut s = DMatrix::zeros(m, m);
    for row in 0..m {
        let mut cols = vec![row];
        let mut others: Vec<usize> = (0..m).filter(|&c| c != row).collect();
        while cols.len() < params.k {
            let pick = rng.gen_range(0..others.len());
            cols.push(others.swap_remove(pick));
        }
        for &c in &cols {
            let v: f64 = if c == row {
                rng.gen_range(0.5..1.0)
            } else {
                rng.gen_range(-0.5..0.5)
            };
            s[(row, c)] = if v.abs() < 1e-3 { 1e-3 } else { v };
        }
        let norm = s.row(row).norm();
        for c in 0..m {
            s[(row, c)] /= norm;
        }
    }
    Ok(FranckCondonData {
        omega_a,
        omega_b,
        delta,
        duschinsky: s,
    })
}

/// Expands `½ Σ_j ω_Bj (q_Bj² + p_Bj²)` with
/// `q_B = Ω_B S Ω_A⁻¹ q_A + δ` and `p_B = Ω_B⁻¹ S Ω_A p_A`.
fn franck_condon_terms(spec: &ModelSpec) -> Result<Vec<LocalTerm>> {
    let m = spec.n;
    let data = franck_condon_data(m, &spec.params)?;
    let s = &data.duschinsky;
    let mut q2 = vec![0.0; m];
    let mut p2 = vec![0.0; m];
    let mut q1 = vec![0.0; m];
    let mut qq: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut pp: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut constant = 0.0;
    for j in 0..m {
        let wb = data.omega_b[j];
        let half = wb / 2.0;
        let cq: Vec<f64> = (0..m)
            .map(|a| wb.sqrt() * s[(j, a)] / data.omega_a[a].sqrt())
            .collect();
        let cp: Vec<f64> = (0..m)
            .map(|a| s[(j, a)] * data.omega_a[a].sqrt() / wb.sqrt())
            .collect();
        for a in 0..m {
            q2[a] += half * cq[a] * cq[a];
            p2[a] += half * cp[a] * cp[a];
            q1[a] += half * 2.0 * data.delta[j] * cq[a];
            for b in a + 1..m {
                *qq.entry((a, b)).or_default() += half * 2.0 * cq[a] * cq[b];
                *pp.entry((a, b)).or_default() += half * 2.0 * cp[a] * cp[b];
            }
        }
        constant += half * data.delta[j] * data.delta[j];
    }
    let d = spec.d;
    let (q, p, qsq, psq) = (
        bosonic(d, BosonOp::Q)?,
        bosonic(d, BosonOp::P)?,
        bosonic(d, BosonOp::Q2)?,
        bosonic(d, BosonOp::P2)?,
    );
    let mut terms = Vec::new();
    for a in 0..m {
        for (label, op, c) in [("q2", &qsq, q2[a]), ("p2", &psq, p2[a]), ("q", &q, q1[a])] {
            if c.abs() > COEFF_EPS {
                terms.push(LocalTerm::one(label, a, op.clone(), c));
            }
        }
    }
    for (label, op, map) in [("qq", &q, &qq), ("pp", &p, &pp)] {
        for (&(a, b), &c) in map {
            if c.abs() > COEFF_EPS {
                terms.push(LocalTerm::two(
                    label,
                    a,
                    b,
                    vec![[op.clone(), op.clone()]],
                    c,
                ));
            }
        }
    }
    terms.push(LocalTerm::constant(constant));
    Ok(terms)
}

/// Circuit `Π_r exp(-i θ_r h_r)` with each factor a first-order Trotter step
/// of the encoded generator. Mode `i` occupies qubits `i·w .. (i+1)·w`.
pub fn boson_sampling_circuit(
    gates: &[OpticalGate],
    n_modes: usize,
    enc: &EncodingSpec,
) -> Result<Circuit> {
    let d = enc.d;
    let w = enc.num_qubits();
    let total = n_modes * w;
    let (a, ad, num) = (
        bosonic(d, BosonOp::A)?,
        bosonic(d, BosonOp::Adag)?,
        bosonic(d, BosonOp::N)?,
    );
    let mut circ = Circuit::new(total);
    for g in gates {
        check_gate(g, n_modes)?;
        let term = match *g {
            OpticalGate::PhaseShifter { mode, .. } => LocalTerm::one("n", mode, num.clone(), 1.0),
            OpticalGate::BeamSplitter { i, j, .. } => hopping(i, j, &a, &ad, 1.0),
        };
        let local = encode_term(&term, enc)?;
        let mut global = PauliSum::new(total);
        for (p, c) in local.iter() {
            let ops = p
                .ops()
                .iter()
                .map(|&(q, l)| (term.sites[q / w] * w + q % w, l))
                .collect();
            global.add_term(crate::pauli::PauliString::new(ops)?, *c);
        }
        circ.append(&trotter_step(&global.simplify(PRUNE_EPS), g.theta())?)?;
    }
    Ok(circ)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Code {
    Sb,
    Gray,
    Unary,
}

impl Code {
    pub const ALL: [Code; 3] = [Code::Sb, Code::Gray, Code::Unary];

    pub fn spec(self, d: usize) -> Result<EncodingSpec> {
        match self {
            Code::Sb => EncodingSpec::sb(d),
            Code::Gray => EncodingSpec::gray(d),
            Code::Unary => EncodingSpec::unary(d),
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "SB_only")]
    SbOnly,
    #[serde(rename = "Gray_only")]
    GrayOnly,
    #[serde(rename = "Unary_only")]
    UnaryOnly,
    #[serde(rename = "SB_and_Gray")]
    SbAndGray,
    #[serde(rename = "All_with_compacting")]
    AllWithCompacting,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::SbOnly,
        Scheme::GrayOnly,
        Scheme::UnaryOnly,
        Scheme::SbAndGray,
        Scheme::AllWithCompacting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SbOnly => "SB_only",
            Scheme::GrayOnly => "Gray_only",
            Scheme::UnaryOnly => "Unary_only",
            Scheme::SbAndGray => "SB_and_Gray",
            Scheme::AllWithCompacting => "All_with_compacting",
        }
    }

    pub fn qubits_per_particle(self, d: usize) -> usize {
        match self {
            Scheme::UnaryOnly => d,
            _ => ceil_log2(d),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown scheme '{s}'")))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scenario {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Optimized CNOT count of one unit-coefficient Trotter step per term and code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermCosts {
    pub d: usize,
    pub n: usize,
    /// Label and sites of each non-constant term, in model order.
    pub labels: Vec<String>,
    pub sites: Vec<Vec<usize>>,
    /// `costs[t][c]` for `c` in [`Code::ALL`] order.
    pub costs: Vec<[usize; 3]>,
    /// Whether a compact code used the next power-of-two truncation.
    pub augmented: Vec<[bool; 3]>,
}

fn circuit_cost(term: &LocalTerm, spec: &EncodingSpec, cfg: &PassConfig) -> Result<usize> {
    let sum = encode_term(term, spec)?;
    Ok(optimize(&trotter_step(&sum, 1.0)?, cfg).cnot_count())
}

fn price_term(term: &LocalTerm, d: usize, cfg: &PassConfig) -> Result<([usize; 3], [bool; 3])> {
    let mut costs = [0; 3];
    let mut aug = [false; 3];
    for (i, code) in Code::ALL.into_iter().enumerate() {
        costs[i] = circuit_cost(term, &code.spec(d)?, cfg)?;
        if code != Code::Unary && !d.is_power_of_two() && term.augmentable() {
            let up = term.augmented()?;
            let alt = circuit_cost(&up, &code.spec(d.next_power_of_two())?, cfg)?;
            if alt < costs[i] {
                costs[i] = alt;
                aug[i] = true;
            }
        }
    }
    Ok((costs, aug))
}

/// CNOT counts per code (SB, Gray, unary) and whether augmentation won.
type PricedTerm = ([usize; 3], [bool; 3]);

/// Prices every distinct non-constant term once, in parallel.
pub fn price_terms(spec: &ModelSpec, terms: &[LocalTerm], cfg: &PassConfig) -> Result<TermCosts> {
    let live: Vec<&LocalTerm> = terms
        .iter()
        .filter(|t| !t.is_constant() && t.coefficient.abs() > COEFF_EPS)
        .collect();
    let mut unique: BTreeMap<String, &LocalTerm> = BTreeMap::new();
    for t in &live {
        unique.entry(t.cache_key()).or_insert(t);
    }
    let priced: Vec<(String, PricedTerm)> = unique
        .into_par_iter()
        .map(|(k, t)| price_term(t, spec.d, cfg).map(|c| (k, c)))
        .collect::<Result<_>>()?;
    let table: BTreeMap<String, PricedTerm> = priced.into_iter().collect();
    let mut out = TermCosts {
        d: spec.d,
        n: spec.n,
        labels: Vec::with_capacity(live.len()),
        sites: Vec::with_capacity(live.len()),
        costs: Vec::with_capacity(live.len()),
        augmented: Vec::with_capacity(live.len()),
    };
    for t in live {
        let (c, a) = table[&t.cache_key()];
        out.labels.push(t.label.clone());
        out.sites.push(t.sites.clone());
        out.costs.push(c);
        out.augmented.push(a);
    }
    Ok(out)
}

/// Entangling total and the part of it spent on conversions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeCost {
    pub entangling_count: usize,
    pub conversions_counted: usize,
}

/// Each term takes its cheapest code in `allowed`. Per step and particle:
/// Gray mixed with any other code costs `2(K-1)`; unary under compacting
/// costs two SB↔unary conversions.
fn assign(costs: &TermCosts, allowed: u8, compacting: bool) -> Result<SchemeCost> {
    let d = costs.d;
    let k = ceil_log2(d);
    let unary_conv =
        conversion_cost(ConversionKind::SbToUnary, d, Decompose::CliffordT)?.entangling_decomposed;
    let mut used = vec![0u8; costs.n];
    let mut total = 0;
    for (c, sites) in costs.costs.iter().zip(&costs.sites) {
        let (code, cost) = Code::ALL
            .into_iter()
            .zip(c.iter().copied())
            .filter(|(code, _)| allowed & code.bit() != 0)
            .min_by_key(|&(_, cost)| cost)
            .expect("non-empty code set");
        total += cost;
        for &s in sites {
            used[s] |= code.bit();
        }
    }
    let mut conv = 0;
    for u in used {
        if u & Code::Gray.bit() != 0 && u != Code::Gray.bit() {
            conv += 2 * (k - 1);
        }
        if compacting && u & Code::Unary.bit() != 0 {
            conv += 2 * unary_conv;
        }
    }
    Ok(SchemeCost {
        entangling_count: total + conv,
        conversions_counted: conv,
    })
}

pub fn scheme_cost(costs: &TermCosts, scheme: Scheme) -> Result<SchemeCost> {
    let (sb, gray, unary) = (Code::Sb.bit(), Code::Gray.bit(), Code::Unary.bit());
    let candidates: Vec<(u8, bool)> = match scheme {
        Scheme::SbOnly => vec![(sb, false)],
        Scheme::GrayOnly => vec![(gray, false)],
        Scheme::UnaryOnly => vec![(unary, false)],
        Scheme::SbAndGray => vec![(sb, false), (gray, false), (sb | gray, false)],
        Scheme::AllWithCompacting => [unary, unary | sb, unary | gray, unary | sb | gray]
            .into_iter()
            .map(|m| (m, true))
            .collect(),
    };
    let mut best: Option<SchemeCost> = None;
    for (mask, compacting) in candidates {
        let c = assign(costs, mask, compacting)?;
        if best.is_none_or(|b| c.entangling_count < b.entangling_count) {
            best = Some(c);
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// Counts in [`Scheme::ALL`] order. Ties go to the scheme with fewer qubits.
pub fn classify_scenario(counts: [usize; 5]) -> Scenario {
    let [sb, gray, unary, mixed, compacting] = counts;
    let compact_best = sb.min(gray).min(mixed);
    if unary.min(compacting) < compact_best {
        if compacting < compact_best {
            Scenario::C
        } else {
            Scenario::D
        }
    } else if mixed < sb.min(gray) {
        Scenario::B
    } else {
        Scenario::A
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeEntry {
    pub scheme: Scheme,
    pub entangling_count: usize,
    pub relative_to_sb: f64,
    pub qubits_per_particle: usize,
    pub conversions_counted: usize,
    /// False when a mixed scheme does not beat the schemes it combines.
    pub reported: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeReport {
    pub model: ModelKind,
    pub d_or_s: String,
    pub d: usize,
    pub n: usize,
    pub entries: Vec<SchemeEntry>,
    pub scenario: Scenario,
    /// Per-label cost of one term in [`Code::ALL`] order.
    pub term_costs: BTreeMap<String, [usize; 3]>,
}

impl SchemeReport {
    pub fn count(&self, scheme: Scheme) -> usize {
        self.entries
            .iter()
            .find(|e| e.scheme == scheme)
            .map(|e| e.entangling_count)
            .expect("all schemes present")
    }

    pub fn entry(&self, scheme: Scheme) -> &SchemeEntry {
        self.entries
            .iter()
            .find(|e| e.scheme == scheme)
            .expect("all schemes present")
    }
}

pub fn report_from_costs(spec: &ModelSpec, costs: &TermCosts) -> Result<SchemeReport> {
    let mut raw = Vec::with_capacity(5);
    for scheme in Scheme::ALL {
        raw.push((scheme, scheme_cost(costs, scheme)?));
    }
    let counts: [usize; 5] = std::array::from_fn(|i| raw[i].1.entangling_count);
    let sb = counts[0];
    let [c_sb, c_gray, c_unary, c_mixed, _] = counts;
    let entries = raw
        .into_iter()
        .map(|(scheme, c)| {
            let relative_to_sb = match (sb, c.entangling_count) {
                (0, 0) => 1.0,
                (0, _) => f64::INFINITY,
                (s, x) => x as f64 / s as f64,
            };
            let reported = match scheme {
                Scheme::SbAndGray => c.entangling_count < c_sb.min(c_gray),
                Scheme::AllWithCompacting => c_unary < c_sb.min(c_gray).min(c_mixed),
                _ => true,
            };
            SchemeEntry {
                scheme,
                entangling_count: c.entangling_count,
                relative_to_sb,
                qubits_per_particle: scheme.qubits_per_particle(spec.d),
                conversions_counted: c.conversions_counted,
                reported,
            }
        })
        .collect();
    Ok(SchemeReport {
        model: spec.kind,
        d_or_s: spec.d_or_s(),
        d: spec.d,
        n: spec.n,
        entries,
        scenario: classify_scenario(counts),
        term_costs: costs
            .labels
            .iter()
            .cloned()
            .zip(costs.costs.iter().copied())
            .rev()
            .collect(),
    })
}

/// Builds, prices and classifies one model.
pub fn price_model(spec: &ModelSpec, cfg: &PassConfig) -> Result<SchemeReport> {
    let terms = build_model(spec)?;
    let costs = price_terms(spec, &terms, cfg)?;
    report_from_costs(spec, &costs)
}

/// Distinct operator labels of a term list.
pub fn term_labels(terms: &[LocalTerm]) -> BTreeSet<String> {
    terms.iter().map(|t| t.label.clone()).collect()
}
