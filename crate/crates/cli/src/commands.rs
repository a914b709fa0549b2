use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use qudit_core::bounds::{
    cnot_upper_bound, cnot_upper_bound_closed, dense_code_upper_bound, operator_upper_bound,
    pair_query, pauli_length_distribution, BoundQuery,
};
use qudit_core::circuit::{count_resources, trotter_step};
use qudit_core::convert::{conversion_circuit, conversion_cost};
use qudit_core::encoder::{augment_truncation, encode_matrix};
use qudit_core::models::{price_model, ModelKind, ModelParams, ModelSpec, Scheme, SchemeReport};
use qudit_core::operators::{named_operator, QuditMatrix};
use qudit_core::optimizer::{optimize, optimize_with_stats};
use qudit_core::sim::{
    circuit_to_unitary, matrix_exponential, max_abs_diff, pauli_to_matrix, trotter_product_unitary,
};
use qudit_core::{
    Circuit, ConversionKind, Decompose, EncodingSpec, LocalCode, PassConfig, PauliSum,
};

use crate::format::{read_file, sig12, to_json, write_file};
use crate::{
    BoundsArgs, BoundsOpArgs, Command, ConversionCostArgs, ConvertCircuitArgs, DecomposeArg,
    EncArg, EncodeArgs, EncodingArgs, ExportQasmArgs, LocalArg, MapOpArgs, OptimizeArgs, Outcome,
    PassArgs, ReferenceArg, ReportArgs, SimulateCheckArgs, TrotterArgs,
};

pub fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Encode(a) => encode(a),
        Command::MapOp(a) => map_op(a),
        Command::Trotter(a) => trotter(a),
        Command::Optimize(a) => optimize_cmd(a),
        Command::ConvertCircuit(a) => convert_circuit(a),
        Command::ConversionCost(a) => conversion_cost_cmd(a),
        Command::Bounds(a) => bounds(a),
        Command::BoundsOp(a) => bounds_op(a),
        Command::Report(a) => report(a),
        Command::SimulateCheck(a) => simulate_check(a),
        Command::ExportQasm(a) => export_qasm(a),
    }
}

/// Explicit flag, then the `SEED` environment variable, then the fallback.
fn resolve_seed(flag: Option<u64>, fallback: u64) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("SEED must be a non-negative integer, got '{v}'")),
        Err(_) => Ok(fallback),
    }
}

fn encoding_spec(a: &EncodingArgs) -> Result<EncodingSpec> {
    if a.enc != EncArg::Bu && (a.g.is_some() || a.local.is_some()) {
        bail!("--g and --local apply only to --enc bu");
    }
    Ok(match a.enc {
        EncArg::Sb => EncodingSpec::sb(a.d)?,
        EncArg::Gray => EncodingSpec::gray(a.d)?,
        EncArg::Unary => EncodingSpec::unary(a.d)?,
        EncArg::Bu => {
            let g = a.g.context("--enc bu needs --g")?;
            let local = match a.local.unwrap_or(LocalArg::Sb) {
                LocalArg::Sb => LocalCode::Sb,
                LocalArg::Gray => LocalCode::Gray,
            };
            EncodingSpec::block_unary(local, g, a.d)?
        }
    })
}

fn load_circuit(path: &std::path::Path) -> Result<Circuit> {
    let text = read_file(path)?;
    Circuit::from_json(&text).with_context(|| format!("parsing circuit {}", path.display()))
}

fn load_pauli(path: &std::path::Path) -> Result<PauliSum> {
    let text = read_file(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing Pauli sum {}", path.display()))
}

fn emit(out: Option<&std::path::Path>, json: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CodewordRow {
    level: usize,
    bits: String,
}

#[derive(Serialize)]
struct EncodeJson {
    encoding: String,
    d: usize,
    n_qubits: usize,
    codewords: Vec<CodewordRow>,
}

fn encode(a: EncodeArgs) -> Result<Outcome> {
    let spec = encoding_spec(&a.encoding)?;
    let codewords = (0..spec.d)
        .map(|l| {
            Ok(CodewordRow {
                level: l,
                bits: spec.display(&spec.encode(l)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    println!(
        "encoding {} d={} qubits={}",
        spec.label(),
        spec.d,
        spec.num_qubits()
    );
    for row in &codewords {
        println!("{:>4}  {}", row.level, row.bits);
    }
    if let Some(out) = &a.out {
        let json = EncodeJson {
            encoding: spec.label(),
            d: spec.d,
            n_qubits: spec.num_qubits(),
            codewords,
        };
        write_file(out, &to_json(&json)?)?;
    }
    Ok(Outcome::Pass)
}

fn operator(
    name: Option<&str>,
    matrix: Option<&std::path::Path>,
    d: usize,
    seed: u64,
) -> Result<QuditMatrix> {
    match (name, matrix) {
        (Some(n), None) => Ok(named_operator(n, d, seed)?),
        (None, Some(p)) => {
            let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&read_file(p)?)
                .with_context(|| format!("parsing matrix {}", p.display()))?;
            let m = QuditMatrix::from_json(&rows)?;
            if m.d() != d {
                bail!("matrix is {}x{} but --d is {d}", m.d(), m.d());
            }
            Ok(m)
        }
        _ => bail!("give exactly one of --op or --matrix"),
    }
}

fn histogram_line(sum: &PauliSum) -> String {
    sum.weight_histogram()
        .iter()
        .map(|(w, n)| format!("{w}:{n}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn map_op(a: MapOpArgs) -> Result<Outcome> {
    let mut spec = encoding_spec(&a.encoding)?;
    let seed = resolve_seed(a.seed, 0)?;
    let mut m = operator(a.op.as_deref(), a.matrix.as_deref(), spec.d, seed)?;
    if a.augment {
        m = augment_truncation(&m)?;
        spec = spec.with_levels(m.d())?;
    }
    let enc = encode_matrix(&spec, &m)?;
    let sum = &enc.sum;
    println!(
        "encoding {} d={} qubits={}",
        spec.label(),
        spec.d,
        sum.n_qubits()
    );
    println!("terms {}", sum.len());
    println!("weights {}", histogram_line(sum));
    println!("hermitian {}", sum.is_hermitian(1e-12));
    println!("source_digest {}", enc.source_digest);
    emit(a.out.as_deref(), &to_json(sum)?)?;
    Ok(Outcome::Pass)
}

fn summary(label: &str, c: &Circuit) {
    let r = count_resources(c, Decompose::None);
    println!(
        "{label}: qubits={} gates={} cnot={} rz={} global_phase={}",
        c.n_qubits(),
        c.len(),
        r.cnot,
        r.rz,
        sig12(c.global_phase())
    );
}

fn trotter(a: TrotterArgs) -> Result<Outcome> {
    if a.steps == 0 {
        bail!("--steps must be at least 1");
    }
    let h = load_pauli(&a.pauli)?;
    let step = trotter_step(&h, a.theta / a.steps as f64)?;
    let mut c = Circuit::new(h.n_qubits());
    for _ in 0..a.steps {
        c.append(&step)?;
    }
    if a.optimize {
        c = optimize(&c, &PassConfig::default());
    }
    summary("trotter", &c);
    emit(a.out.as_deref(), &c.to_json()?)?;
    if let Some(q) = &a.qasm {
        write_file(q, &c.to_qasm())?;
    }
    Ok(Outcome::Pass)
}

fn pass_config(p: &PassArgs) -> PassConfig {
    PassConfig {
        cancel_inverse_pairs: !p.no_cancel,
        merge_rotations: !p.no_merge,
        cnot_triple_rewrite: !p.no_triple,
        max_sweeps: p.max_sweeps,
        ..PassConfig::default()
    }
}

fn optimize_cmd(a: OptimizeArgs) -> Result<Outcome> {
    let c = load_circuit(&a.circuit)?;
    let (o, sweeps) = optimize_with_stats(&c, &pass_config(&a.passes));
    summary("before", &c);
    summary("after", &o);
    println!("sweeps {sweeps}");
    emit(a.out.as_deref(), &o.to_json()?)?;
    Ok(Outcome::Pass)
}

fn parse_kind(s: &str) -> Result<ConversionKind> {
    Ok(s.parse::<ConversionKind>()?)
}

fn convert_circuit(a: ConvertCircuitArgs) -> Result<Outcome> {
    let kind = parse_kind(&a.kind)?;
    let c = conversion_circuit(kind, a.d)?;
    let r = count_resources(&c, Decompose::None);
    println!(
        "{kind} d={}: qubits={} cnot={} swap={} cswap={} x={}",
        a.d,
        c.n_qubits(),
        r.cnot,
        r.swap,
        r.cswap,
        r.x
    );
    emit(a.out.as_deref(), &c.to_json()?)?;
    if let Some(q) = &a.qasm {
        write_file(q, &c.to_qasm())?;
    }
    Ok(Outcome::Pass)
}

fn conversion_cost_cmd(a: ConversionCostArgs) -> Result<Outcome> {
    let kind = parse_kind(&a.kind)?;
    let decompose = match a.decompose {
        DecomposeArg::None => Decompose::None,
        DecomposeArg::CliffordT => Decompose::CliffordT,
    };
    let r = conversion_cost(kind, a.d, decompose)?;
    println!(
        "{kind} d={}: entangling_raw={} entangling_decomposed={}",
        a.d, r.entangling_raw, r.entangling_decomposed
    );
    emit(a.out.as_deref(), &to_json(&r)?)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct BoundsJson {
    d_h: usize,
    k: usize,
    distribution: BTreeMap<usize, u64>,
    cnot_upper_bound: u64,
    closed_form: u64,
    dense_code_form: Option<f64>,
}

fn bounds(a: BoundsArgs) -> Result<Outcome> {
    let q = BoundQuery::new(a.d_h, a.k)?;
    let ub = cnot_upper_bound(q);
    let closed = cnot_upper_bound_closed(q);
    let dense = dense_code_upper_bound(a.d_h, 1usize.checked_shl(a.k as u32).unwrap_or(0));
    println!("{ub}");
    println!(
        "distribution {}",
        pauli_length_distribution(q)
            .iter()
            .map(|(p, n)| format!("{p}:{n}"))
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!("closed_form {closed}");
    if let Some(x) = dense {
        println!("dense_code_form {}", sig12(x));
    }
    if let Some(out) = &a.out {
        let json = BoundsJson {
            d_h: a.d_h,
            k: a.k,
            distribution: pauli_length_distribution(q),
            cnot_upper_bound: ub,
            closed_form: closed,
            dense_code_form: dense,
        };
        write_file(out, &to_json(&json)?)?;
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct PairRow {
    l: usize,
    lp: usize,
    d_h: usize,
    k: usize,
    upper_bound: u64,
}

#[derive(Serialize)]
struct BoundsOpJson {
    encoding: String,
    d: usize,
    op: String,
    staircase_count: usize,
    optimized_count: usize,
    pairs: Vec<PairRow>,
}

fn bounds_op(a: BoundsOpArgs) -> Result<Outcome> {
    let spec = encoding_spec(&a.encoding)?;
    let seed = resolve_seed(a.seed, 0)?;
    let m = named_operator(&a.op, spec.d, seed)?;
    let staircase = operator_upper_bound(&spec, &m)?;
    let sum = encode_matrix(&spec, &m)?.sum;
    let optimized = optimize(&trotter_step(&sum, 1.0)?, &PassConfig::default()).cnot_count();
    let mut pairs = Vec::new();
    for l in 0..spec.d {
        for lp in l..spec.d {
            if m.get(l, lp).norm() > 1e-14 || m.get(lp, l).norm() > 1e-14 {
                let q = pair_query(&spec, l, lp)?;
                pairs.push(PairRow {
                    l,
                    lp,
                    d_h: q.d_h,
                    k: q.k,
                    upper_bound: cnot_upper_bound(q),
                });
            }
        }
    }
    let pair_sum: u64 = pairs.iter().map(|p| p.upper_bound).sum();
    println!("{} d={} op={}", spec.label(), spec.d, a.op);
    println!("pairwise_upper_bound {pair_sum}");
    println!("staircase_count {staircase}");
    println!("optimized_count {optimized}");
    if let Some(out) = &a.out {
        let json = BoundsOpJson {
            encoding: spec.label(),
            d: spec.d,
            op: a.op.clone(),
            staircase_count: staircase,
            optimized_count: optimized,
            pairs,
        };
        write_file(out, &to_json(&json)?)?;
    }
    Ok(Outcome::Pass)
}

fn parse_usize_set(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if let Some((lo, hi)) = part.split_once("..") {
            let (lo, hi): (usize, usize) = (lo.trim().parse()?, hi.trim().parse()?);
            if lo > hi {
                bail!("empty range '{part}'");
            }
            out.extend(lo..=hi);
        } else {
            out.push(
                part.parse()
                    .with_context(|| format!("bad value '{part}'"))?,
            );
        }
    }
    Ok(out)
}

/// Spins as `2s`, accepting values, lists and half-step ranges.
fn parse_spin_set(text: &str) -> Result<Vec<usize>> {
    let twice = |v: &str| -> Result<usize> {
        let s: f64 = v
            .trim()
            .parse()
            .with_context(|| format!("bad spin '{v}'"))?;
        Ok(qudit_core::operators::twice_spin(s)?)
    };
    let mut out = Vec::new();
    for part in text.split(',') {
        if let Some((lo, hi)) = part.split_once("..") {
            let (lo, hi) = (twice(lo)?, twice(hi)?);
            if lo > hi {
                bail!("empty range '{part}'");
            }
            out.extend(lo..=hi);
        } else {
            out.push(twice(part)?);
        }
    }
    Ok(out)
}

fn report(a: ReportArgs) -> Result<Outcome> {
    let kind: ModelKind = a.model.parse()?;
    let mut params: ModelParams = match &a.config {
        Some(p) => toml::from_str(&read_file(p)?)
            .with_context(|| format!("parsing config {}", p.display()))?,
        None => ModelParams::default(),
    };
    params.seed = resolve_seed(a.seed, params.seed)?;
    let ds: Vec<usize> = match (&a.d, &a.s) {
        (Some(d), None) => parse_usize_set(d)?,
        (None, Some(s)) if kind.is_spin() => {
            parse_spin_set(s)?.into_iter().map(|t| t + 1).collect()
        }
        (None, Some(_)) => bail!("--s applies only to the heisenberg model"),
        _ => bail!("give --d (or --s for heisenberg)"),
    };
    let schemes: Vec<Scheme> = if a.schemes.eq_ignore_ascii_case("all") {
        Scheme::ALL.to_vec()
    } else {
        a.schemes
            .split(',')
            .map(|s| s.trim().parse::<Scheme>())
            .collect::<std::result::Result<_, _>>()?
    };
    let n = a.n.unwrap_or(if kind == ModelKind::FranckCondon {
        4
    } else {
        3
    });
    let cfg = PassConfig::default();
    let mut reports: Vec<SchemeReport> = Vec::with_capacity(ds.len());
    for &d in &ds {
        let spec = ModelSpec::new(kind, d, n, params.clone())?;
        reports.push(price_model(&spec, &cfg)?);
    }
    let mut csv = String::from(
        "model,d_or_s,N,scheme,entangling_count,relative_to_sb,qubits_per_particle,conversions_counted,scenario\n",
    );
    for r in &reports {
        println!(
            "{} d_or_s={} N={} scenario={}",
            r.model, r.d_or_s, r.n, r.scenario
        );
        for e in r.entries.iter().filter(|e| schemes.contains(&e.scheme)) {
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{}",
                r.model,
                r.d_or_s,
                r.n,
                e.scheme,
                e.entangling_count,
                sig12(e.relative_to_sb),
                e.qubits_per_particle,
                e.conversions_counted,
                r.scenario
            )?;
            println!(
                "  {:<20} {:>8}  x{}{}",
                e.scheme.name(),
                e.entangling_count,
                sig12(e.relative_to_sb),
                if e.reported { "" } else { "  (no improvement)" }
            );
        }
        for (label, c) in &r.term_costs {
            println!(
                "  term {label:<10} sb={} gray={} unary={}",
                c[0], c[1], c[2]
            );
        }
    }
    match &a.out {
        Some(p) => write_file(p, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(p) = &a.json {
        write_file(p, &to_json(&reports)?)?;
    }
    Ok(Outcome::Pass)
}

fn simulate_check(a: SimulateCheckArgs) -> Result<Outcome> {
    let h = load_pauli(&a.pauli)?;
    let c = load_circuit(&a.circuit)?;
    if c.n_qubits() != h.n_qubits() {
        bail!(
            "circuit has {} qubits but the Pauli sum has {}",
            c.n_qubits(),
            h.n_qubits()
        );
    }
    let want = match a.reference {
        ReferenceArg::Trotter => trotter_product_unitary(&h, a.theta)?,
        ReferenceArg::Exact => matrix_exponential(&pauli_to_matrix(&h)?, a.theta)?,
    };
    let mut got = circuit_to_unitary(&c)?;
    if a.up_to_phase {
        let (r, col) = (0..want.nrows())
            .flat_map(|r| (0..want.ncols()).map(move |c| (r, c)))
            .max_by(|x, y| want[*x].norm().total_cmp(&want[*y].norm()))
            .context("empty unitary")?;
        let z = want[(r, col)] / got[(r, col)];
        if z.norm() > 0.0 {
            got *= z / z.norm();
        }
    }
    let err = max_abs_diff(&got, &want);
    let pass = err <= a.tol;
    println!(
        "{} max_abs_err={} tol={}",
        if pass { "PASS" } else { "FAIL" },
        sig12(err),
        sig12(a.tol)
    );
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn export_qasm(a: ExportQasmArgs) -> Result<Outcome> {
    let c = load_circuit(&a.circuit)?;
    let qasm = c.to_qasm();
    match &a.out {
        Some(p) => {
            write_file(p, &qasm)?;
            summary("exported", &c);
        }
        None => print!("{qasm}"),
    }
    Ok(Outcome::Pass)
}
