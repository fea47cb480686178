use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use aklt_core::bond::{bond_operator, nu_isotropic, nu_s};
use aklt_core::graphs::{catalog, Graph};
use aklt_core::hamiltonian::{analyze, gosset_mozgunov_bound, knabe_bound, AkltHamiltonian, ChainKind};
use aklt_core::report::{
    evaluate_protocol, resolve_protocol, CoverRef, GraphRef, MuRef, ProbRef, ProtocolFile,
    ProtocolRequest,
};
use aklt_core::simulator::{simulate, Ensemble, NoiseModel};
use aklt_core::sphere::{Builtin, SphereDistribution};
use aklt_core::spin::Spin;
use aklt_core::tables::{
    bond_gap_table, bond_table_spins, catalog_table, chain_gap_table, matching_count_table,
    overlap_table, overlap_table_spins, CHAIN_LENGTHS,
};
use aklt_core::Error;

use crate::format::{number, Csv};
use crate::{BondArgs, Command, Format, GapArgs, GraphArgs, ProtocolArgs, ProtocolSelect, SimulateArgs, Table};

/// Longest chain accepted by `gap --chain`.
pub const MAX_CHAIN: usize = 10;

/// Largest total bond spin (twice) accepted by `bond`.
const MAX_BOND_TWICE: u32 = 8;

/// Everything a command prints in JSON mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    /// Arguments as given on the command line.
    pub command: Vec<String>,
    pub inputs: Value,
    pub outputs: Value,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ReportDocument {
    fn new(argv: &[String], inputs: Value, outputs: Value, seed: Option<u64>) -> Self {
        Self {
            command: argv.iter().skip(1).cloned().collect(),
            inputs,
            outputs,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
        }
    }
}

/// What a command produced: the JSON document and its CSV view.
struct Output {
    doc: ReportDocument,
    csv: Csv,
}

pub fn run(cmd: &Command, format: Format, out: Option<&Path>, argv: &[String]) -> Result<()> {
    let output = match cmd {
        Command::Gap(a) => gap(a, argv)?,
        Command::Bond(a) => bond(a, argv)?,
        Command::Protocol(a) => protocol(a, argv)?,
        Command::Tables(a) => tables(a.which, argv)?,
        Command::Simulate(a) => simulate_cmd(a, argv)?,
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&output.doc)? + "\n",
        Format::Csv => output.csv.render(),
    };
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// 2 for invalid input, 3 for size-limit refusals, 1 otherwise.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::ResourceGuard(_)) => 3,
        Some(Error::NoConvergence(_) | Error::Numerical(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidArgument(msg.into()).into()
}

fn select_graph(a: &GraphArgs) -> Result<(String, Graph, Option<(ChainKind, usize)>)> {
    if let Some(kind) = a.chain {
        let n = a.n.ok_or_else(|| invalid("--chain needs --n"))?;
        if n > MAX_CHAIN {
            return Err(Error::ResourceGuard(format!("chains are limited to n <= {MAX_CHAIN}, got {n}")).into());
        }
        return Ok((format!("{kind}-{n}"), kind.graph(n)?, Some((kind, n))));
    }
    if let Some(name) = &a.catalog {
        return Ok((name.clone(), catalog(name)?, None));
    }
    if let Some(path) = &a.graph {
        return Ok((path.display().to_string(), Graph::load(path)?, None));
    }
    Err(invalid("select a graph with --chain/--n, --catalog or --graph"))
}

/// Key/value CSV of a flat JSON object; nested values are flattened with
/// dotted keys and arrays are kept as JSON text.
fn record_csv(value: &Value) -> Csv {
    fn walk(prefix: &str, v: &Value, csv: &mut Csv) {
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, csv);
                }
            }
            _ => csv.push(vec![prefix.to_string(), cell(v)]),
        }
    }
    let mut csv = Csv::new(["key", "value"]);
    walk("", value, &mut csv);
    csv
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) if !(n.is_u64() || n.is_i64()) => number(n.as_f64().unwrap_or(f64::NAN)),
        other => other.to_string(),
    }
}

/// Adds a `display` object holding the formatted form of every top-level
/// floating point output.
fn with_display(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        let display: Map<String, Value> = map
            .iter()
            .filter_map(|(k, x)| match x {
                Value::Number(n) if !(n.is_u64() || n.is_i64()) => {
                    Some((k.clone(), Value::String(number(n.as_f64()?))))
                }
                _ => None,
            })
            .collect();
        if !display.is_empty() {
            map.insert("display".into(), Value::Object(display));
        }
    }
    v
}

fn gap(a: &GapArgs, argv: &[String]) -> Result<Output> {
    let (name, graph, chain) = select_graph(&a.graph)?;
    let spectrum = analyze(&AkltHamiltonian::new(&graph)?)?;
    let mut outputs = json!({
        "gamma": spectrum.gap,
        "ground_energy": spectrum.ground.energy,
        "ground_degeneracy": spectrum.ground.degeneracy,
    });
    if let Some((kind, n)) = chain {
        if n > 2 {
            // the bounds are stated for the open chain with spin-1 ends
            let g11 = if kind == ChainKind::OpenOneOne {
                spectrum.gap
            } else {
                analyze(&AkltHamiltonian::new(&ChainKind::OpenOneOne.graph(n)?)?)?.gap
            };
            outputs["gamma_open_one_one"] = json!(g11);
            outputs["knabe"] = json!(knabe_bound(g11, n)?);
            outputs["gosset_mozgunov"] = json!(gosset_mozgunov_bound(g11, n)?);
        }
    }
    let inputs = json!({
        "graph": name,
        "vertices": graph.n(),
        "edges": graph.edge_count(),
        "dim": graph.hilbert_dim().to_string(),
    });
    let csv = record_csv(&json!({ "inputs": inputs, "outputs": outputs }));
    Ok(Output {
        doc: ReportDocument::new(argv, inputs, with_display(outputs), None),
        csv,
    })
}

fn load_distribution(name: &str) -> Result<SphereDistribution> {
    match name.parse::<Builtin>() {
        Ok(b) => Ok(b.distribution()),
        Err(e) => {
            let path = PathBuf::from(name);
            if path.exists() {
                Ok(SphereDistribution::load(&path)?)
            } else {
                Err(e.into())
            }
        }
    }
}

fn bond(a: &BondArgs, argv: &[String]) -> Result<Output> {
    let (s, pair) = match (a.s, a.s1, a.s2) {
        (Some(s), None, None) => (s, None),
        (None, Some(s1), Some(s2)) => (Spin::from_twice(s1.twice() + s2.twice()), Some((s1, s2))),
        _ => return Err(invalid("give either --S or both --S1 and --S2")),
    };
    if s.twice() > MAX_BOND_TWICE {
        return Err(invalid(format!("bond spin {s} exceeds 4")));
    }
    let mut inputs = json!({ "mu": a.mu, "S": s });
    if let Some((s1, s2)) = pair {
        inputs["S1"] = json!(s1);
        inputs["S2"] = json!(s2);
    }
    let outputs = if a.mu == "isotropic" {
        json!({ "nu": nu_isotropic(s) })
    } else {
        let mu = load_distribution(&a.mu)?;
        let nu = match pair {
            Some((s1, s2)) => bond_operator(s1, s2, &mu).gap(),
            None => nu_s(s, &mu),
        };
        json!({
            "nu": nu,
            "vertices": mu.len(),
            "distinct_tests": mu.distinct_test_count(),
            "design_strength": mu.design_strength(),
        })
    };
    let csv = record_csv(&json!({ "inputs": inputs, "outputs": outputs }));
    Ok(Output {
        doc: ReportDocument::new(argv, inputs, with_display(outputs), None),
        csv,
    })
}

fn parse_probabilities(text: &str) -> Result<ProbRef> {
    if text.contains(',') || text.parse::<f64>().is_ok() {
        let p = text
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| invalid(format!("bad probability `{x}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProbRef::Explicit(p))
    } else {
        Ok(ProbRef::Named(text.to_string()))
    }
}

/// The protocol file described by the flags, with its base directory and
/// a display name overriding the graph label.
fn protocol_file(sel: &ProtocolSelect) -> Result<(ProtocolFile, Option<PathBuf>, Option<String>)> {
    let (mut file, base, label) = match &sel.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file = ProtocolFile::from_json_str(&text)
                .with_context(|| format!("invalid protocol file {}", path.display()))?;
            (file, path.parent().map(Path::to_path_buf), None)
        }
        None => {
            let (name, graph, chain) = select_graph(&sel.graph)?;
            let graph = match (chain, &sel.graph.catalog) {
                (None, Some(c)) => GraphRef::Name(c.clone()),
                _ => GraphRef::Inline(graph.to_file()),
            };
            let file = ProtocolFile {
                graph,
                mu: MuRef::default(),
                cover: CoverRef::default(),
                p: ProbRef::default(),
            };
            (file, None, Some(name))
        }
    };
    if let Some(mu) = &sel.mu {
        file.mu = MuRef::Name(mu.clone());
    }
    if let Some(c) = sel.cover.as_ref().or(sel.coloring.as_ref()) {
        file.cover = CoverRef::Named(c.clone());
    }
    if let Some(p) = &sel.p {
        file.p = parse_probabilities(p)?;
    }
    Ok((file, base, label))
}

fn protocol(a: &ProtocolArgs, argv: &[String]) -> Result<Output> {
    let (file, base_dir, label) = protocol_file(&a.select)?;
    let req = ProtocolRequest {
        file: file.clone(),
        base_dir,
        epsilon: a.epsilon,
        delta: a.delta,
    };
    let mut report = evaluate_protocol(&req)?;
    if let Some(l) = label {
        report.graph = l;
    }
    let inputs = json!({ "protocol": file, "epsilon": a.epsilon, "delta": a.delta });
    let outputs = serde_json::to_value(&report)?;
    let csv = record_csv(&outputs);
    Ok(Output {
        doc: ReportDocument::new(argv, inputs, with_display(outputs), None),
        csv,
    })
}

fn simulate_cmd(a: &SimulateArgs, argv: &[String]) -> Result<Output> {
    let noise: NoiseModel = a.noise.parse()?;
    let (file, base_dir, _) = protocol_file(&a.select)?;
    let r = resolve_protocol(&file, base_dir.as_deref())?;
    let cover = &r.cover.cover;
    let ensemble = Ensemble::for_protocol(&r.ctx, cover, &r.probabilities, noise)?;
    let result = simulate(&r.ctx, cover, &r.probabilities, &ensemble, a.runs, a.seed)?;
    let exact = ensemble.exact_pass_probability(&r.ctx, cover, &r.probabilities)?;
    let fidelity = ensemble.fidelity(&r.ctx.ground().basis[0]);
    let inputs = json!({ "protocol": file, "noise": noise, "runs": a.runs });
    let mut outputs = serde_json::to_value(&result)?;
    outputs["exact_pass_probability"] = json!(exact);
    outputs["fidelity"] = json!(fidelity);
    outputs["probabilities"] = json!(r.probabilities);
    let csv = record_csv(&outputs);
    Ok(Output {
        doc: ReportDocument::new(argv, inputs, with_display(outputs), Some(a.seed)),
        csv,
    })
}

fn tables(which: Table, argv: &[String]) -> Result<Output> {
    let (rows, csv) = match which {
        Table::I => {
            let rows = chain_gap_table(CHAIN_LENGTHS)?;
            let mut csv = Csv::new(["n", "open_half_half", "open_half_one", "open_one_one", "closed", "knabe", "gosset_mozgunov"]);
            for r in &rows {
                csv.push(vec![
                    r.n.to_string(),
                    number(r.open_half_half),
                    number(r.open_half_one),
                    number(r.open_one_one),
                    number(r.closed),
                    number(r.knabe),
                    number(r.gosset_mozgunov),
                ]);
            }
            (serde_json::to_value(rows)?, csv)
        }
        Table::II => {
            let rows = bond_gap_table();
            let mut header: Vec<String> = ["distribution", "vertices", "distinct_tests", "design_strength"]
                .map(String::from)
                .to_vec();
            header.extend(bond_table_spins().iter().map(|s| format!("S={s}")));
            let mut csv = Csv::new(header);
            let opt = |x: Option<usize>| x.map_or_else(|| "-".to_string(), |v| v.to_string());
            for r in &rows {
                let mut line = vec![
                    r.distribution.clone(),
                    opt(r.vertices),
                    opt(r.distinct_tests),
                    opt(r.design_strength),
                ];
                line.extend(r.nu.iter().map(|&x| number(x)));
                csv.push(line);
            }
            (serde_json::to_value(rows)?, csv)
        }
        Table::III => {
            let rows = overlap_table();
            let mut header: Vec<String> = vec!["S1".into(), "S3".into()];
            header.extend(overlap_table_spins().iter().map(|s| format!("S2={s}")));
            let mut csv = Csv::new(header);
            for r in &rows {
                let mut line = vec![r.s1.to_string(), r.s3.to_string()];
                line.extend(r.s_squared.iter().map(|&x| number(x)));
                csv.push(line);
            }
            (serde_json::to_value(rows)?, csv)
        }
        Table::IV => {
            let rows = matching_count_table(CHAIN_LENGTHS)?;
            let mut csv = Csv::new([
                "n",
                "closed_matching_number",
                "closed_maximal",
                "closed_maximum",
                "open_matching_number",
                "open_maximal",
                "open_maximum",
            ]);
            for r in &rows {
                csv.push(
                    [r.n, r.closed.0, r.closed.1, r.closed.2, r.open.0, r.open.1, r.open.2]
                        .iter()
                        .map(|v| v.to_string())
                        .collect(),
                );
            }
            (serde_json::to_value(rows)?, csv)
        }
        Table::V => {
            let rows = catalog_table(&Builtin::Mu32.distribution())?;
            let mut csv = Csv::new([
                "index",
                "vertices",
                "edges",
                "max_degree",
                "matching_number",
                "chromatic_number",
                "chromatic_index",
                "dim",
                "gamma",
                "nu_trivial",
                "nu_uniform",
                "nu_optimized",
                "probabilities",
            ]);
            for r in &rows {
                let p: Vec<String> = r.probabilities.iter().map(|x| format!("{x:.4}")).collect();
                csv.push(vec![
                    r.index.to_string(),
                    r.vertices.to_string(),
                    r.edges.to_string(),
                    r.max_degree.to_string(),
                    r.matching_number.to_string(),
                    r.chromatic_number.to_string(),
                    r.chromatic_index.to_string(),
                    r.dim.to_string(),
                    number(r.gamma),
                    number(r.nu_trivial),
                    number(r.nu_uniform),
                    number(r.nu_optimized),
                    p.join(";"),
                ]);
            }
            (serde_json::to_value(rows)?, csv)
        }
    };
    let name = format!("{which:?}");
    Ok(Output {
        doc: ReportDocument::new(argv, json!({ "table": name }), json!({ "rows": rows }), None),
        csv,
    })
}
