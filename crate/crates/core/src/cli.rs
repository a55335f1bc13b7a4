//! Command-line front end. Every CSV written here starts with a
//! `# manifest: {json}` line; the body below it depends only on the
//! manifest parameters, never on the timestamp or thread count.
//!
//! Exit codes: 0 success, 2 bad flags or inputs, 3 failed verification.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{metrics, Circuit, Metrics};
use crate::encodings::{conversion_mismatches, convert_encoding_circuit, Encoding, HilbertLayout};
use crate::error::Error;
use crate::fperm::{cost_model, standard_ensemble, CostMethod, FermPermJob, Instance, Method};
use crate::gamma::{build_gamma, check_parity_encoding};
use crate::geometry::Permutation;
use crate::verify::{check_majorana_permutation, estimate_fidelity, matches_fperm_oracle};
use crate::workloads::{
    build_ffft_2d, build_trotter_step_with, color_terms, ffft_sector_error, ffft_unitary_error,
    packing_permutation, sample_syk_terms, trotter_error, FfftConfig, FfftVariant, SykInstance,
    DEFAULT_DT,
};

pub const DEFAULT_SEED: u64 = 2024;
/// Exhaustive basis checks stop here; larger grids use Majorana conjugation.
const EXHAUSTIVE_MAX_SIDE: usize = 3;
/// Sparse keys are `u128`.
const SPARSE_MAX_SIDE: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {invariant}: {detail}")]
    Verification {
        invariant: &'static str,
        detail: String,
    },
    #[error(transparent)]
    Lib(#[from] Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification { .. } => 3,
            _ => 2,
        }
    }

    fn verification(invariant: &'static str, detail: impl Into<String>) -> Self {
        CliError::Verification {
            invariant,
            detail: detail.into(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "fermgrid",
    version,
    about = "Fermionic permutation circuits on 2D qubit grids"
)]
pub struct Cli {
    /// Base seed; per-instance seeds are split from it.
    #[arg(long, global = true, env = "FERMGRID_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "fermgrid-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PermKind {
    Reversal,
    Transpose,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Table {
    #[value(name = "I")]
    One,
    #[value(name = "II")]
    Two,
    #[value(name = "III")]
    Three,
    #[value(name = "IV")]
    Four,
    #[value(name = "fidelity")]
    Fidelity,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compile fermionic permutations and write circuits plus metrics.
    Fperm {
        #[arg(long = "L")]
        side: usize,
        #[arg(long, value_enum)]
        perm: PermKind,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value = "ours")]
        method: Method,
        #[arg(long)]
        verify: bool,
    },
    /// Symbolic parity-encoding check of the diagonal operator.
    GammaCheck {
        #[arg(long = "L-max", default_value_t = 32)]
        side_max: usize,
    },
    /// Encoding conversion circuit on the Hilbert layout.
    Encode {
        #[arg(long)]
        from: Encoding,
        #[arg(long, default_value = "jw")]
        to: Encoding,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        verify: bool,
    },
    /// Grid fermionic Fourier transform.
    Ffft {
        #[arg(long = "L")]
        side: usize,
        /// All three variants when omitted.
        #[arg(long)]
        variant: Option<FfftVariant>,
        #[arg(long)]
        verify: bool,
    },
    /// Sparse SYK instance and one Trotter step.
    Syk {
        #[arg(long = "N")]
        modes: usize,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        #[arg(long, default_value = "ours")]
        method: Method,
        /// Read the instance from JSON instead of sampling.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        verify: bool,
    },
    /// Aggregate metrics CSVs into summary tables.
    Report {
        #[arg(long, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum)]
        table: Table,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 1e-4, 1e-5])]
        p2q: Vec<f64>,
        /// Sides for the analytic tables.
        #[arg(long = "L", value_delimiter = ',', default_values_t = [4, 8, 16, 32])]
        sides: Vec<usize>,
    },
}

/// Provenance line embedded in every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub version: String,
    pub timestamp: u64,
}

impl RunManifest {
    fn new(command: &str, seed: u64, parameters: &[(&str, String)]) -> Self {
        Self {
            command: command.into(),
            parameters: parameters
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn header_line(&self) -> String {
        format!(
            "# manifest: {}",
            serde_json::to_string(self).expect("manifest serializes")
        )
    }
}

/// One row of the shared metrics schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub method: String,
    #[serde(rename = "L")]
    pub side: usize,
    #[serde(rename = "N")]
    pub modes: usize,
    pub instance: String,
    pub cnot_depth: usize,
    pub gates: usize,
    pub idle: usize,
    pub qubits: usize,
    pub spacetime: usize,
    pub fidelity_p1e3: f64,
    pub fidelity_p1e4: f64,
    pub fidelity_p1e5: f64,
}

impl MetricsRow {
    pub fn new(method: &str, side: usize, modes: usize, instance: &str, m: &Metrics) -> Self {
        Self {
            method: method.into(),
            side,
            modes,
            instance: instance.into(),
            cnot_depth: m.cnot_depth,
            gates: m.gates,
            idle: m.idle,
            qubits: m.qubits,
            spacetime: m.spacetime,
            fidelity_p1e3: estimate_fidelity(m, 1e-3),
            fidelity_p1e4: estimate_fidelity(m, 1e-4),
            fidelity_p1e5: estimate_fidelity(m, 1e-5),
        }
    }

    fn metrics(&self) -> Metrics {
        Metrics {
            cnot_depth: self.cnot_depth,
            gates: self.gates,
            idle: self.idle,
            qubits: self.qubits,
            spacetime: self.spacetime,
        }
    }
}

/// Writes the manifest line followed by `rows` as CSV (header always).
pub fn write_csv<T: Serialize>(
    path: &Path,
    manifest: &RunManifest,
    header: &[&str],
    rows: &[T],
) -> CliResult<()> {
    let mut file = fs::File::create(path)?;
    writeln!(file, "{}", manifest.header_line())?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

const METRICS_HEADER: [&str; 12] = [
    "method",
    "L",
    "N",
    "instance",
    "cnot_depth",
    "gates",
    "idle",
    "qubits",
    "spacetime",
    "fidelity_p1e3",
    "fidelity_p1e4",
    "fidelity_p1e5",
];

/// Reads a metrics CSV, skipping manifest comments.
pub fn read_metrics_csv(path: &Path) -> CliResult<Vec<MetricsRow>> {
    if !path.is_file() {
        return Err(CliError::Usage(format!(
            "input {} does not exist",
            path.display()
        )));
    }
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

fn write_circuit(dir: &Path, name: &str, c: &Circuit) -> CliResult<()> {
    fs::write(dir.join(format!("{name}.json")), c.to_json())?;
    Ok(())
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            if let CliError::Verification { invariant, detail } = &e {
                let diag = serde_json::json!({ "status": "verification_failed", "invariant": invariant, "detail": detail });
                eprintln!("{diag}");
            } else {
                eprintln!("error: {e}");
            }
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Fperm {
            side,
            perm,
            count,
            method,
            verify,
        } => cmd_fperm(cli, *side, *perm, *count, *method, *verify),
        Command::GammaCheck { side_max } => cmd_gamma_check(*side_max),
        Command::Encode {
            from,
            to,
            k,
            verify,
        } => cmd_encode(cli, *from, *to, *k, *verify),
        Command::Ffft {
            side,
            variant,
            verify,
        } => cmd_ffft(cli, *side, *variant, *verify),
        Command::Syk {
            modes,
            k,
            dt,
            method,
            instance,
            verify,
        } => cmd_syk(cli, *modes, *k, *dt, *method, instance.as_deref(), *verify),
        Command::Report {
            inputs,
            table,
            p2q,
            sides,
        } => cmd_report(cli, inputs, *table, p2q, sides),
    }
}

fn fperm_instances(side: usize, kind: PermKind, count: usize, seed: u64) -> Vec<Instance> {
    let pick = |label: &str| {
        standard_ensemble(side, 0, seed)
            .into_iter()
            .filter(|i| i.label == label)
            .collect::<Vec<_>>()
    };
    match kind {
        PermKind::Random => standard_ensemble(side, count, seed)
            .into_iter()
            .skip(2)
            .collect(),
        PermKind::Reversal if count > 0 => pick("reversal"),
        PermKind::Transpose if count > 0 => pick("transpose"),
        _ => Vec::new(),
    }
}

fn verify_fperm(c: &Circuit, perm: &Permutation, side: usize, label: &str) -> CliResult<()> {
    if side <= EXHAUSTIVE_MAX_SIDE {
        let n = side * side;
        for s in 0..1usize << n {
            let bits: Vec<bool> = (0..n).map(|i| s >> i & 1 == 1).collect();
            if !matches_fperm_oracle(c, perm, side, &bits)? {
                return Err(CliError::verification(
                    "fperm_oracle",
                    format!("instance {label}, basis state {s}"),
                ));
            }
        }
    } else {
        let report = check_majorana_permutation(c, perm, side)?;
        if !report.passed() {
            return Err(CliError::verification(
                "majorana_permutation",
                format!("instance {label}, majoranas {:?}", report.failures),
            ));
        }
    }
    Ok(())
}

fn cmd_fperm(
    cli: &Cli,
    side: usize,
    kind: PermKind,
    count: usize,
    method: Method,
    verify: bool,
) -> CliResult<()> {
    if side < 2 {
        return Err(CliError::Usage(format!(
            "--L must be at least 2, got {side}"
        )));
    }
    let instances = fperm_instances(side, kind, count, cli.seed);
    let compiled: Vec<(Instance, Circuit)> = instances
        .into_par_iter()
        .map(|inst| {
            let job = FermPermJob {
                perm: inst.perm.clone(),
                side,
                method,
                seed_tag: inst.seed,
            };
            job.compile().map(|c| (inst, c))
        })
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for (inst, c) in &compiled {
        if verify {
            verify_fperm(c, &inst.perm, side, &inst.label)?;
        }
        write_circuit(
            &cli.out,
            &format!("fperm_{}_L{side}_{}", method.label(), inst.label),
            c,
        )?;
        rows.push(MetricsRow::new(
            method.label(),
            side,
            side * side,
            &inst.label,
            &metrics(c)?,
        ));
    }
    let manifest = RunManifest::new(
        "fperm",
        cli.seed,
        &[
            ("L", side.to_string()),
            ("perm", format!("{kind:?}").to_lowercase()),
            ("count", count.to_string()),
            ("method", method.label().into()),
        ],
    );
    let path = cli.out.join(format!(
        "fperm_{}_L{side}_{}.csv",
        method.label(),
        format!("{kind:?}").to_lowercase()
    ));
    write_csv(&path, &manifest, &METRICS_HEADER, &rows)?;
    let depth = mean(rows.iter().map(|r| r.cnot_depth as f64));
    println!(
        "fperm L={side} method={} instances={} mean_cnot_depth={depth:.1}{} -> {}",
        method.label(),
        rows.len(),
        if verify { " verified" } else { "" },
        path.display()
    );
    Ok(())
}

fn cmd_gamma_check(side_max: usize) -> CliResult<()> {
    if side_max < 2 {
        return Err(CliError::Usage("--L-max must be at least 2".into()));
    }
    let reports: Vec<_> = (2..=side_max)
        .into_par_iter()
        .map(check_parity_encoding)
        .collect::<Result<_, _>>()?;
    for r in &reports {
        println!(
            "L={} vertical_pairs={} {}",
            r.side,
            r.pairs.len(),
            if r.passed() { "pass" } else { "FAIL" }
        );
    }
    if let Some(bad) = reports.iter().find(|r| !r.passed()) {
        return Err(CliError::verification(
            "parity_encoding",
            format!("L={} failing pairs {:?}", bad.side, bad.failures()),
        ));
    }
    Ok(())
}

fn cmd_encode(cli: &Cli, from: Encoding, to: Encoding, k: u32, verify: bool) -> CliResult<()> {
    let c = convert_encoding_circuit(from, to, k)?;
    let layout = HilbertLayout::new(k)?;
    let name = format!("encode_{}_{}_k{k}", from.label(), to.label());
    write_circuit(&cli.out, &name, &c)?;
    let m = metrics(&c)?;
    let row = MetricsRow::new(
        &format!("{}->{}", from.label(), to.label()),
        layout.cols(),
        layout.modes(),
        &format!("k{k}"),
        &m,
    );
    let manifest = RunManifest::new(
        "encode",
        cli.seed,
        &[
            ("from", from.label().into()),
            ("to", to.label().into()),
            ("k", k.to_string()),
        ],
    );
    write_csv(
        &cli.out.join(format!("{name}.csv")),
        &manifest,
        &METRICS_HEADER,
        &[row],
    )?;
    println!(
        "encode {}->{} k={k} grid={}x{} modes={} cnot_depth={} gates={}",
        from.label(),
        to.label(),
        layout.rows(),
        layout.cols(),
        layout.modes(),
        m.cnot_depth,
        m.gates
    );
    if verify {
        let bad = conversion_mismatches(&c, from, to, k)?;
        if !bad.is_empty() {
            return Err(CliError::verification(
                "majorana_conjugation",
                format!("majoranas {bad:?}"),
            ));
        }
        println!(
            "verify: all {} majorana strings map exactly",
            2 * layout.modes()
        );
    }
    Ok(())
}

fn cmd_ffft(cli: &Cli, side: usize, variant: Option<FfftVariant>, verify: bool) -> CliResult<()> {
    let variants: Vec<FfftVariant> = variant.map_or(FfftVariant::ALL.to_vec(), |v| vec![v]);
    let mut rows = Vec::new();
    for v in variants {
        let c = build_ffft_2d(&FfftConfig { side, variant: v })?;
        let m = metrics(&c)?;
        write_circuit(&cli.out, &format!("ffft_{}_L{side}", v.label()), &c)?;
        println!(
            "ffft L={side} variant={} cnot_depth={} gates={}",
            v.label(),
            m.cnot_depth,
            m.gates
        );
        rows.push(MetricsRow::new(v.label(), side, side * side, "ffft", &m));
        if verify {
            let tol = 1e-10;
            if side == 2 {
                let err = ffft_unitary_error(&c, side)?;
                println!("verify: full unitary vs matrix-log oracle, max error {err:.2e}");
                if err > tol {
                    return Err(CliError::verification(
                        "ffft_unitary",
                        format!("{} error {err:e}", v.label()),
                    ));
                }
            }
            if side <= SPARSE_MAX_SIDE {
                let pairs = side <= 4;
                let err = ffft_sector_error(&c, side, pairs)?;
                println!(
                    "verify: {} sector vs DFT, max error {err:.2e}",
                    if pairs {
                        "one- and two-particle"
                    } else {
                        "one-particle"
                    }
                );
                if err > tol {
                    return Err(CliError::verification(
                        "ffft_sector",
                        format!("{} error {err:e}", v.label()),
                    ));
                }
            } else {
                println!("verify: skipped above L={SPARSE_MAX_SIDE}");
            }
        }
    }
    let manifest = RunManifest::new(
        "ffft",
        cli.seed,
        &[
            ("L", side.to_string()),
            ("variant", variant.map_or("all", |v| v.label()).into()),
        ],
    );
    write_csv(
        &cli.out.join(format!("ffft_L{side}.csv")),
        &manifest,
        &METRICS_HEADER,
        &rows,
    )?;
    Ok(())
}

fn square_side(n: usize) -> Option<usize> {
    let s = (n as f64).sqrt().round() as usize;
    (s * s == n && s >= 2).then_some(s)
}

fn cmd_syk(
    cli: &Cli,
    modes: usize,
    k: f64,
    dt: f64,
    method: Method,
    instance: Option<&Path>,
    verify: bool,
) -> CliResult<()> {
    let inst = match instance {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
            SykInstance::from_json(&text)?
        }
        None => {
            let mut s = sample_syk_terms(modes, k, cli.seed)?;
            s.dt = dt;
            s
        }
    };
    let tag = format!("syk_N{}_seed{}", inst.modes, inst.seed);
    fs::write(cli.out.join(format!("{tag}_instance.json")), inst.to_json())?;
    println!(
        "syk N={} terms={} expected={:.0}",
        inst.modes,
        inst.terms.len(),
        2.0 * inst.k * inst.modes as f64
    );
    let Some(side) = square_side(inst.modes) else {
        if verify {
            return Err(CliError::Usage(format!(
                "circuit runs need a square N, got {}",
                inst.modes
            )));
        }
        println!("N is not a square; no circuit built");
        return Ok(());
    };
    let step = build_trotter_step_with(&inst, method)?;
    let m = metrics(&step.circuit)?;
    write_circuit(
        &cli.out,
        &format!("{tag}_{}", method.label()),
        &step.circuit,
    )?;
    println!(
        "trotter method={} groups={} cnot_depth={} fp_depth={} rotation_depth={} rotation_fraction={:.4}",
        method.label(),
        step.groups,
        m.cnot_depth,
        step.fp_depth,
        step.rotation_depth,
        step.rotation_depth as f64 / step.fp_depth.max(1) as f64
    );
    let manifest = RunManifest::new(
        "syk",
        cli.seed,
        &[
            ("N", inst.modes.to_string()),
            ("k", inst.k.to_string()),
            ("dt", inst.dt.to_string()),
            ("method", method.label().into()),
        ],
    );
    let row = MetricsRow::new(
        &format!("syk_{}", method.label()),
        side,
        inst.modes,
        &tag,
        &m,
    );
    write_csv(
        &cli.out.join(format!("{tag}_{}.csv", method.label())),
        &manifest,
        &METRICS_HEADER,
        &[row],
    )?;
    if verify {
        if inst.modes <= 9 {
            let err = trotter_error(&inst, 100, cli.seed)?;
            println!("verify: dense product of term exponentials, max error {err:.2e}");
            if err > 1e-10 {
                return Err(CliError::verification(
                    "trotter_oracle",
                    format!("error {err:e}"),
                ));
            }
        } else {
            for (g, group) in color_terms(&inst.terms).iter().enumerate() {
                let pack = packing_permutation(group, inst.modes)?;
                let c = FermPermJob {
                    perm: pack.clone(),
                    side,
                    method,
                    seed_tag: None,
                }
                .compile()?;
                let report = check_majorana_permutation(&c, &pack, side)?;
                if !report.passed() {
                    return Err(CliError::verification(
                        "packing_permutation",
                        format!("group {g}"),
                    ));
                }
            }
            println!("verify: every packing permutation conjugates Majoranas exactly");
        }
    }
    Ok(())
}

/// Mean of each metric per (method, L), in sorted key order.
fn aggregate(rows: &[MetricsRow]) -> BTreeMap<(String, usize), Vec<&MetricsRow>> {
    let mut groups: BTreeMap<(String, usize), Vec<&MetricsRow>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.method.clone(), r.side))
            .or_default()
            .push(r);
    }
    groups
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn p2q_tag(p: f64) -> String {
    format!("{p:e}").replace('-', "m")
}

fn cmd_report(
    cli: &Cli,
    inputs: &[PathBuf],
    table: Table,
    p2q: &[f64],
    sides: &[usize],
) -> CliResult<()> {
    let mut rows = Vec::new();
    for p in inputs {
        rows.extend(read_metrics_csv(p)?);
    }
    let needs_inputs = matches!(table, Table::Three | Table::Four | Table::Fidelity);
    if needs_inputs && rows.is_empty() {
        return Err(CliError::Usage(
            "this table needs --inputs with at least one metrics row".into(),
        ));
    }
    let params = [
        ("table", format!("{table:?}")),
        (
            "inputs",
            inputs
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
        (
            "p2q",
            p2q.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
        (
            "L",
            sides
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
    ];
    let manifest = RunManifest::new("report", cli.seed, &params);
    let groups = aggregate(&rows);
    let measured = |method: &str, side: usize| -> String {
        groups
            .get(&(method.to_string(), side))
            .map(|g| format!("{:.1}", mean(g.iter().map(|r| r.cnot_depth as f64))))
            .unwrap_or_default()
    };
    let mut outputs: Vec<(String, Vec<String>, Vec<Vec<String>>)> = Vec::new();
    match table {
        Table::One => {
            let header = [
                "L",
                "N",
                "fperm_bound",
                "fperm_measured_mean",
                "gamma_bound",
                "gamma_measured",
            ];
            let body = sides
                .iter()
                .map(|&l| -> CliResult<Vec<String>> {
                    let g = metrics(&build_gamma(l)?)?.cnot_depth;
                    Ok(vec![
                        l.to_string(),
                        (l * l).to_string(),
                        (22 * l + 20).to_string(),
                        measured("ours", l),
                        (8 * l + 10).to_string(),
                        g.to_string(),
                    ])
                })
                .collect::<CliResult<_>>()?;
            outputs.push(("table_I".into(), header.map(String::from).to_vec(), body));
        }
        Table::Two => {
            let mut header = vec!["L".to_string(), "N".to_string()];
            header.extend(CostMethod::ALL.iter().map(|m| m.label().to_string()));
            header.extend(["measured_ours".to_string(), "measured_1d".to_string()]);
            let body = sides
                .iter()
                .map(|&l| {
                    let mut row = vec![l.to_string(), (l * l).to_string()];
                    row.extend(CostMethod::ALL.iter().map(|&m| {
                        cost_model(m, l as u64)
                            .map(|c| c.depth.to_string())
                            .unwrap_or_default()
                    }));
                    row.push(measured("ours", l));
                    row.push(measured(Method::OnedFswap.label(), l));
                    row
                })
                .collect();
            outputs.push(("table_II".into(), header, body));
        }
        Table::Three | Table::Four => {
            let want_ffft = table == Table::Four;
            let header = [
                "method",
                "L",
                "N",
                "instances",
                "mean_cnot_depth",
                "mean_gates",
                "mean_idle",
                "mean_spacetime",
            ];
            let body = groups
                .iter()
                .filter(|((m, _), _)| FfftVariant::ALL.iter().any(|v| v.label() == m) == want_ffft)
                .map(|((m, l), g)| {
                    vec![
                        m.clone(),
                        l.to_string(),
                        g[0].modes.to_string(),
                        g.len().to_string(),
                        format!("{:.1}", mean(g.iter().map(|r| r.cnot_depth as f64))),
                        format!("{:.1}", mean(g.iter().map(|r| r.gates as f64))),
                        format!("{:.1}", mean(g.iter().map(|r| r.idle as f64))),
                        format!("{:.1}", mean(g.iter().map(|r| r.spacetime as f64))),
                    ]
                })
                .collect();
            let name = if want_ffft { "table_IV" } else { "table_III" };
            outputs.push((name.into(), header.map(String::from).to_vec(), body));
        }
        Table::Fidelity => {
            for &p in p2q {
                if !(0.0..1.0).contains(&p) {
                    return Err(CliError::Usage(format!("p2q {p} outside [0, 1)")));
                }
                let header = ["method", "L", "N", "p2q", "mean_fidelity"];
                let body = groups
                    .iter()
                    .map(|((m, l), g)| {
                        vec![
                            m.clone(),
                            l.to_string(),
                            g[0].modes.to_string(),
                            p.to_string(),
                            format!(
                                "{:.6}",
                                mean(g.iter().map(|r| estimate_fidelity(&r.metrics(), p)))
                            ),
                        ]
                    })
                    .collect();
                outputs.push((
                    format!("fidelity_p{}", p2q_tag(p)),
                    header.map(String::from).to_vec(),
                    body,
                ));
            }
        }
    }
    for (name, header, body) in outputs {
        let path = cli.out.join(format!("{name}.csv"));
        let h: Vec<&str> = header.iter().map(String::as_str).collect();
        write_csv(&path, &manifest, &h, &body)?;
        println!("{}", header.join(","));
        for r in &body {
            println!("{}", r.join(","));
        }
        println!("-> {}", path.display());
    }
    Ok(())
}
