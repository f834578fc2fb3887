use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use arbordet::io::{
    graph_from_json_value, matrix_from_csv, matrix_from_json_value, to_dot, JsonWeight,
};
use arbordet::{
    arborescence_weight, det_reference, det_via_arborescences, digraph_to_matrix,
    enumerate_arborescences, isolate_vertex, matrix_to_digraph, partitioned_factor,
    partitioned_factor_ordered, partitioned_factor_traced, sequential_factor,
    sequential_factor_ordered, sequential_factor_traced, verify, BigRational, Digraph, Expr,
    FactorEvent, Factorization, Matrix, VertexId,
};

#[derive(Parser)]
#[command(
    name = "arbordet",
    version,
    about = "Compute and factor matrix determinants through spanning arborescences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the determinant of a matrix file
    Det {
        /// Matrix file: JSON {"n", "entries"} or numeric CSV
        file: PathBuf,
        /// How to compute it
        #[arg(long, value_enum, default_value_t = Method::Tree)]
        method: Method,
    },
    /// List every arborescence of the input's digraph, then the sum
    Enumerate {
        /// Matrix or graph file (JSON, or numeric CSV matrix)
        file: PathBuf,
    },
    /// Run the randomized invariant suites against the brute-force oracle
    Verify {
        /// Generator seed; identical seeds replay identical cases
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Total number of cases across all suites
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
    /// Factor the determinant into a sum of products of linear factors
    Factor {
        /// Matrix or graph file (JSON, or numeric CSV matrix)
        file: PathBuf,
        /// Recursion strategy
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        /// Isolation order as a comma list, e.g. 3,2,1 (default ascending)
        #[arg(long)]
        order: Option<String>,
        /// Write every intermediate digraph as a numbered DOT file plus a
        /// manifest into this directory
        #[arg(long, value_name = "DIR")]
        emit_dot: Option<PathBuf>,
    },
    /// Write the input's digraph as DOT, optionally after isolating a vertex
    ExportDot {
        /// Matrix or graph file (JSON, or numeric CSV matrix)
        file: PathBuf,
        /// Output directory
        dir: PathBuf,
        /// Also export the graph with this vertex isolated
        #[arg(long, value_name = "VERTEX")]
        isolate: Option<VertexId>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Brute-force arborescence sum
    Tree,
    /// Gaussian elimination with partial pivoting
    Reference,
    /// Sequential factoring (n! leaves)
    FactorSequential,
    /// Partitioned factoring (ordered-Bell leaves)
    FactorPartitioned,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Sequential,
    Partitioned,
}

/// Failures carry the exit code: 1 for input and property problems, 2 when a
/// guard rail stops an oversized computation.
enum Failure {
    Input(String),
    Guard(String),
    Properties(String),
}

impl Failure {
    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Guard(m) | Failure::Properties(m) => m,
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) | Failure::Properties(_) => 1,
            Failure::Guard(_) => 2,
        }
    }
}

impl From<arbordet::Error> for Failure {
    fn from(error: arbordet::Error) -> Self {
        match error {
            arbordet::Error::TooLarge { .. } | arbordet::Error::ExpansionTooLarge(_) => {
                Failure::Guard(error.to_string())
            }
            _ => Failure::Input(error.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => {
            let code = match error.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = error.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Det { file, method } => {
            let loaded = load_input(&file)?;
            match loaded {
                Loaded::RationalMatrix(m) => det_command(&m, method),
                Loaded::SymbolicMatrix(m) => det_command(&m, method),
                Loaded::RationalGraph(g) => det_command(&digraph_to_matrix(&g)?, method),
                Loaded::SymbolicGraph(g) => det_command(&digraph_to_matrix(&g)?, method),
            }
        }
        Command::Enumerate { file } => match load_input(&file)? {
            Loaded::RationalMatrix(m) => enumerate_command(&matrix_to_digraph(&m)?),
            Loaded::SymbolicMatrix(m) => enumerate_command(&matrix_to_digraph(&m)?),
            Loaded::RationalGraph(g) => enumerate_command(&g),
            Loaded::SymbolicGraph(g) => enumerate_command(&g),
        },
        Command::Verify { seed, cases } => verify_command(seed, cases),
        Command::Factor {
            file,
            strategy,
            order,
            emit_dot,
        } => {
            let order = order.map(|text| parse_order(&text)).transpose()?;
            match load_input(&file)? {
                Loaded::RationalMatrix(m) => factor_command(
                    &matrix_to_digraph(&m)?,
                    strategy,
                    order.as_deref(),
                    emit_dot.as_deref(),
                ),
                Loaded::SymbolicMatrix(m) => factor_command(
                    &matrix_to_digraph(&m)?,
                    strategy,
                    order.as_deref(),
                    emit_dot.as_deref(),
                ),
                Loaded::RationalGraph(g) => {
                    factor_command(&g, strategy, order.as_deref(), emit_dot.as_deref())
                }
                Loaded::SymbolicGraph(g) => {
                    factor_command(&g, strategy, order.as_deref(), emit_dot.as_deref())
                }
            }
        }
        Command::ExportDot { file, dir, isolate } => match load_input(&file)? {
            Loaded::RationalMatrix(m) => export_dot_command(&matrix_to_digraph(&m)?, &dir, isolate),
            Loaded::SymbolicMatrix(m) => export_dot_command(&matrix_to_digraph(&m)?, &dir, isolate),
            Loaded::RationalGraph(g) => export_dot_command(&g, &dir, isolate),
            Loaded::SymbolicGraph(g) => export_dot_command(&g, &dir, isolate),
        },
    }
}

/// Inputs are either matrices or digraphs, and either fully numeric (kept as
/// exact rationals) or symbolic (any string entry switches the whole file).
enum Loaded {
    RationalMatrix(Matrix<BigRational>),
    SymbolicMatrix(Matrix<Expr>),
    RationalGraph(Digraph<BigRational>),
    SymbolicGraph(Digraph<Expr>),
}

fn load_input(path: &Path) -> Result<Loaded, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    if path.extension().and_then(|e| e.to_str()) == Some("csv") {
        let numeric = matrix_from_csv(&text)?;
        return Ok(Loaded::RationalMatrix(rationalize(&numeric)?));
    }
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("{} is not valid JSON: {e}", path.display())))?;
    if let Some(entries) = value.get("entries") {
        if has_string_values(entries) {
            Ok(Loaded::SymbolicMatrix(matrix_from_json_value(&value)?))
        } else {
            Ok(Loaded::RationalMatrix(matrix_from_json_value(&value)?))
        }
    } else if let Some(arcs) = value.get("arcs") {
        let symbolic = arcs
            .as_array()
            .map(|arcs| {
                arcs.iter()
                    .any(|arc| arc.get("weight").is_some_and(Value::is_string))
            })
            .unwrap_or(false);
        if symbolic {
            Ok(Loaded::SymbolicGraph(graph_from_json_value(&value)?))
        } else {
            Ok(Loaded::RationalGraph(graph_from_json_value(&value)?))
        }
    } else {
        Err(Failure::Input(format!(
            "{} is neither a matrix file (needs `entries`) nor a graph file (needs `arcs`)",
            path.display()
        )))
    }
}

fn has_string_values(entries: &Value) -> bool {
    match entries {
        Value::Array(items) => items.iter().any(has_string_values),
        Value::String(_) => true,
        _ => false,
    }
}

fn rationalize(a: &Matrix<f64>) -> Result<Matrix<BigRational>, Failure> {
    let rows = a
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| {
                    BigRational::from_float(x)
                        .ok_or_else(|| Failure::Input(format!("entry {x} is not finite")))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::new(rows)?)
}

fn parse_order(text: &str) -> Result<Vec<VertexId>, Failure> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<VertexId>().map_err(|_| {
                Failure::Input(format!(
                    "`{}` in --order is not a vertex number",
                    part.trim()
                ))
            })
        })
        .collect()
}

fn det_command<W: JsonWeight>(matrix: &Matrix<W>, method: Method) -> Result<String, Failure> {
    let printed = match method {
        Method::Tree => det_via_arborescences(matrix)?.to_string(),
        Method::Reference => det_reference(matrix)?.to_string(),
        Method::FactorSequential => sequential_factor(&matrix_to_digraph(matrix)?)?
            .total()
            .to_string(),
        Method::FactorPartitioned => partitioned_factor(&matrix_to_digraph(matrix)?)?
            .total()
            .to_string(),
    };
    Ok(format!("{printed}\n"))
}

fn enumerate_command<W: JsonWeight>(g: &Digraph<W>) -> Result<String, Failure> {
    let mut out = String::new();
    let arborescences = enumerate_arborescences(g, 0)?;
    let mut sum = W::zero();
    for a in &arborescences {
        let arcs = a
            .arc_ids
            .iter()
            .map(|&id| {
                let arc = g.arc(id).expect("enumerated arcs exist");
                format!("{}->{}", arc.source, arc.target)
            })
            .collect::<Vec<_>>()
            .join(" ");
        let weight = arborescence_weight(a, g)?;
        sum = sum.add(&weight);
        if arcs.is_empty() {
            out.push_str(&format!("(empty) : {weight}\n"));
        } else {
            out.push_str(&format!("{arcs} : {weight}\n"));
        }
    }
    let sum = sum.normalize()?;
    out.push_str(&format!("{sum}\n"));
    Ok(out)
}

fn verify_command(seed: u64, cases: usize) -> Result<String, Failure> {
    let report = verify::run_all(seed, cases);
    let mut out = format!("seed: {seed}\n");
    for suite in &report.suites {
        out.push_str(&format!(
            "{}: {}/{} passed\n",
            suite.name, suite.passed, suite.cases
        ));
        for failure in &suite.failures {
            out.push_str(&format!("  {failure}\n"));
        }
    }
    out.push_str(&format!(
        "{}/{} passed\n",
        report.total_passed(),
        report.total_cases()
    ));
    if report.all_passed() {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Properties(format!(
            "{} of {} cases failed",
            report.total_cases() - report.total_passed(),
            report.total_cases()
        )))
    }
}

fn factor_command<W: JsonWeight>(
    g: &Digraph<W>,
    strategy: StrategyArg,
    order: Option<&[VertexId]>,
    emit_dot: Option<&Path>,
) -> Result<String, Failure> {
    let default_order: Vec<VertexId> = (1..g.vertex_count()).collect();
    let order = order.unwrap_or(&default_order);

    let mut records: Vec<DotRecord> = Vec::new();
    let factorization = if emit_dot.is_some() {
        let mut sink = |event: FactorEvent<W>| record_event(&mut records, event);
        match strategy {
            StrategyArg::Sequential => sequential_factor_traced(g, order, &mut sink)?,
            StrategyArg::Partitioned => partitioned_factor_traced(g, order, &mut sink)?,
        }
    } else {
        match strategy {
            StrategyArg::Sequential => sequential_factor_ordered(g, order)?,
            StrategyArg::Partitioned => partitioned_factor_ordered(g, order)?,
        }
    };

    let mut out = format!("strategy: {}\n", factorization.strategy);
    for (index, term) in factorization.terms.iter().enumerate() {
        let trace = term
            .isolation_order
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!(
            "term {} [{}]: {}\n",
            index + 1,
            trace,
            term.value()
        ));
    }
    out.push_str(&format!("terms: {}\n", factorization.terms.len()));
    out.push_str(&format!("total: {}\n", factorization.total()));

    if let Some(dir) = emit_dot {
        write_dot_records(dir, &records, &factorization)?;
        out.push_str(&format!(
            "wrote {} dot files and manifest.json to {}\n",
            records.len(),
            dir.display()
        ));
    }
    Ok(out)
}

struct DotRecord {
    file: String,
    dot: String,
    step: &'static str,
    vertices: Vec<VertexId>,
}

fn record_event<W: arbordet::Weight>(records: &mut Vec<DotRecord>, event: FactorEvent<W>) {
    let (graph, step, vertices) = match event {
        FactorEvent::Start { graph } => (graph, "start", Vec::new()),
        FactorEvent::Rooted { graph, vertices } => (graph, "rooted", vertices.to_vec()),
        FactorEvent::Isolated { graph, vertices } => (graph, "isolated", vertices.to_vec()),
        FactorEvent::Leaf {
            graph,
            isolation_order,
        } => (graph, "leaf", isolation_order.to_vec()),
    };
    records.push(DotRecord {
        file: format!("{:04}.dot", records.len()),
        dot: to_dot(graph),
        step,
        vertices,
    });
}

fn write_dot_records<W: arbordet::Weight>(
    dir: &Path,
    records: &[DotRecord],
    factorization: &Factorization<W>,
) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
    for record in records {
        let path = dir.join(&record.file);
        fs::write(&path, &record.dot)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    let manifest = json!({
        "strategy": factorization.strategy.to_string(),
        "files": records
            .iter()
            .map(|r| json!({"file": r.file, "step": r.step, "vertices": r.vertices}))
            .collect::<Vec<_>>(),
    });
    let path = dir.join("manifest.json");
    fs::write(
        &path,
        serde_json::to_string_pretty(&manifest).expect("serializable"),
    )
    .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn export_dot_command<W: JsonWeight>(
    g: &Digraph<W>,
    dir: &Path,
    isolate: Option<VertexId>,
) -> Result<String, Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))?;
    let mut out = String::new();
    let graph_path = dir.join("graph.dot");
    fs::write(&graph_path, to_dot(g))
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", graph_path.display())))?;
    out.push_str(&format!("wrote {}\n", graph_path.display()));
    if let Some(v) = isolate {
        let isolated = isolate_vertex(g, v)?;
        let isolated_path = dir.join(format!("isolated-{v}.dot"));
        fs::write(&isolated_path, to_dot(&isolated)).map_err(|e| {
            Failure::Input(format!("cannot write {}: {e}", isolated_path.display()))
        })?;
        out.push_str(&format!("wrote {}\n", isolated_path.display()));
    }
    Ok(out)
}
