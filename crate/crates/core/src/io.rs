use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::graph::Digraph;
use crate::matrix::Matrix;
use crate::weight::{rational_from_str, rational_to_string, Weight};

/// Weights that can live in the JSON graph and matrix formats, where a
/// weight is either a JSON number or an expression string.
pub trait JsonWeight: Weight {
    fn weight_to_json(&self) -> Value;
    fn weight_from_json(value: &Value) -> Result<Self>;
}

impl JsonWeight for f64 {
    fn weight_to_json(&self) -> Value {
        json!(self)
    }

    fn weight_from_json(value: &Value) -> Result<Self> {
        match value {
            Value::Number(number) => number
                .as_f64()
                .ok_or_else(|| Error::InvalidInput(format!("bad number {number}"))),
            Value::String(text) => {
                if let Ok(parsed) = text.trim().parse::<f64>() {
                    return Ok(parsed);
                }
                rational_from_str(text)
                    .map(|r| crate::weight::rational_to_f64(&r))
                    .ok_or_else(|| Error::InvalidInput(format!("`{text}` is not numeric")))
            }
            other => Err(Error::InvalidInput(format!(
                "expected a numeric weight, got {other}"
            ))),
        }
    }
}

impl JsonWeight for BigRational {
    fn weight_to_json(&self) -> Value {
        if num_traits::One::is_one(self.denom()) {
            if let Some(int) = self.numer().to_i64() {
                return json!(int);
            }
        }
        json!(rational_to_string(self))
    }

    fn weight_from_json(value: &Value) -> Result<Self> {
        match value {
            Value::Number(number) => {
                if let Some(int) = number.as_i64() {
                    return Ok(BigRational::from_integer(int.into()));
                }
                let float = number
                    .as_f64()
                    .ok_or_else(|| Error::InvalidInput(format!("bad number {number}")))?;
                BigRational::from_float(float)
                    .ok_or_else(|| Error::InvalidInput(format!("{float} is not finite")))
            }
            Value::String(text) => rational_from_str(text)
                .or_else(|| crate::weight::rational_from_decimal(text))
                .ok_or_else(|| Error::InvalidInput(format!("`{text}` is not a rational"))),
            other => Err(Error::InvalidInput(format!(
                "expected a rational weight, got {other}"
            ))),
        }
    }
}

impl JsonWeight for Expr {
    fn weight_to_json(&self) -> Value {
        if let Expr::Constant(value) = self {
            if num_traits::One::is_one(value.denom()) {
                if let Some(int) = value.numer().to_i64() {
                    return json!(int);
                }
            }
        }
        json!(self.to_string())
    }

    fn weight_from_json(value: &Value) -> Result<Self> {
        match value {
            Value::Number(number) => {
                if let Some(int) = number.as_i64() {
                    return Ok(Expr::int(int));
                }
                let float = number
                    .as_f64()
                    .ok_or_else(|| Error::InvalidInput(format!("bad number {number}")))?;
                let rational = BigRational::from_float(float)
                    .ok_or_else(|| Error::InvalidInput(format!("{float} is not finite")))?;
                Ok(Expr::Constant(rational))
            }
            Value::String(text) => expr::parse(text),
            other => Err(Error::InvalidInput(format!(
                "expected an expression weight, got {other}"
            ))),
        }
    }
}

/// Serialize a digraph to the round-trip JSON format.
pub fn graph_to_json<W: JsonWeight>(g: &Digraph<W>) -> Value {
    let arcs: Vec<Value> = g
        .arcs()
        .iter()
        .map(|arc| {
            json!({
                "source": arc.source,
                "target": arc.target,
                "weight": arc.weight.weight_to_json(),
            })
        })
        .collect();
    json!({
        "vertex_count": g.vertex_count(),
        "arcs": arcs,
    })
}

pub fn graph_to_json_string<W: JsonWeight>(g: &Digraph<W>) -> String {
    serde_json::to_string_pretty(&graph_to_json(g)).expect("serializable value")
}

/// Parse a digraph from the round-trip JSON format. Arc ids are assigned in
/// listing order.
pub fn graph_from_json<W: JsonWeight>(text: &str) -> Result<Digraph<W>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad JSON: {e}")))?;
    graph_from_json_value(&value)
}

pub fn graph_from_json_value<W: JsonWeight>(value: &Value) -> Result<Digraph<W>> {
    let vertex_count = value
        .get("vertex_count")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidInput("missing numeric `vertex_count`".into()))?;
    let arcs = value
        .get("arcs")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInput("missing `arcs` array".into()))?;
    let mut g = Digraph::new(vertex_count as usize)?;
    for (index, arc) in arcs.iter().enumerate() {
        let source = arc
            .get("source")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidInput(format!("arc {index}: missing `source`")))?;
        let target = arc
            .get("target")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidInput(format!("arc {index}: missing `target`")))?;
        let weight = arc
            .get("weight")
            .ok_or_else(|| Error::InvalidInput(format!("arc {index}: missing `weight`")))?;
        let weight = W::weight_from_json(weight)?;
        g = g.add_arc(source as usize, target as usize, weight)?.0;
    }
    Ok(g)
}

/// Serialize a matrix to the JSON matrix format.
pub fn matrix_to_json<W: JsonWeight>(a: &Matrix<W>) -> Value {
    let entries: Vec<Value> = a
        .rows()
        .iter()
        .map(|row| Value::Array(row.iter().map(JsonWeight::weight_to_json).collect()))
        .collect();
    json!({
        "n": a.n(),
        "entries": entries,
    })
}

pub fn matrix_to_json_string<W: JsonWeight>(a: &Matrix<W>) -> String {
    serde_json::to_string_pretty(&matrix_to_json(a)).expect("serializable value")
}

/// Parse a matrix from the JSON matrix format.
pub fn matrix_from_json<W: JsonWeight>(text: &str) -> Result<Matrix<W>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad JSON: {e}")))?;
    matrix_from_json_value(&value)
}

pub fn matrix_from_json_value<W: JsonWeight>(value: &Value) -> Result<Matrix<W>> {
    let entries = value
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInput("missing `entries` array".into()))?;
    let mut rows = Vec::with_capacity(entries.len());
    for (index, row) in entries.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::InvalidInput(format!("row {index} is not an array")))?;
        rows.push(
            row.iter()
                .map(W::weight_from_json)
                .collect::<Result<Vec<W>>>()?,
        );
    }
    let matrix = Matrix::new(rows)?;
    if let Some(n) = value.get("n").and_then(Value::as_u64) {
        if n as usize != matrix.n() {
            return Err(Error::InvalidInput(format!(
                "`n` is {n} but `entries` is {0}x{0}",
                matrix.n()
            )));
        }
    }
    Ok(matrix)
}

/// Parse a numeric matrix from CSV text: one row per line, comma-separated.
pub fn matrix_from_csv(text: &str) -> Result<Matrix<f64>> {
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!(
                        "line {}: `{}` is not a number",
                        line_no + 1,
                        cell.trim()
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Matrix::new(rows)
}

/// Render a digraph in DOT format: the root gets a distinct shape and every
/// arc becomes one edge statement labeled with its weight.
pub fn to_dot<W: Weight>(g: &Digraph<W>) -> String {
    let mut out = String::from("digraph {\n  rankdir=LR;\n");
    out.push_str("  0 [shape=doublecircle];\n");
    for v in 1..g.vertex_count() {
        out.push_str(&format!("  {v} [shape=circle];\n"));
    }
    for arc in g.arcs() {
        out.push_str(&format!(
            "  {} -> {} [label=\"{}\"];\n",
            arc.source,
            arc.target,
            escape_label(&arc.weight.to_string())
        ));
    }
    out.push_str("}\n");
    out
}

fn escape_label(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Export an expression as a JSON AST mirroring the node variants.
pub fn expr_to_json_ast(e: &Expr) -> Value {
    match e {
        Expr::Constant(value) => json!({ "constant": rational_to_string(value) }),
        Expr::Variable(name) => json!({ "variable": name }),
        Expr::Sum(children) => {
            json!({ "sum": children.iter().map(expr_to_json_ast).collect::<Vec<_>>() })
        }
        Expr::Product(children) => {
            json!({ "product": children.iter().map(expr_to_json_ast).collect::<Vec<_>>() })
        }
    }
}

/// Rebuild an expression from its JSON AST. Node invariants are re-imposed
/// by the smart constructors.
pub fn expr_from_json_ast(value: &Value) -> Result<Expr> {
    let object = value
        .as_object()
        .ok_or_else(|| Error::InvalidInput(format!("expected an AST object, got {value}")))?;
    if let Some(constant) = object.get("constant") {
        let text = constant
            .as_str()
            .ok_or_else(|| Error::InvalidInput("`constant` must be a string".into()))?;
        let rational = rational_from_str(text)
            .or_else(|| crate::weight::rational_from_decimal(text))
            .ok_or_else(|| Error::InvalidInput(format!("`{text}` is not a rational")))?;
        return Ok(Expr::Constant(rational));
    }
    if let Some(variable) = object.get("variable") {
        let name = variable
            .as_str()
            .ok_or_else(|| Error::InvalidInput("`variable` must be a string".into()))?;
        return Ok(Expr::var(name));
    }
    if let Some(children) = object.get("sum") {
        return Ok(Expr::sum(ast_children(children)?));
    }
    if let Some(children) = object.get("product") {
        return Ok(Expr::product(ast_children(children)?));
    }
    Err(Error::InvalidInput(format!(
        "AST node must have constant/variable/sum/product, got {value}"
    )))
}

fn ast_children(value: &Value) -> Result<Vec<Expr>> {
    value
        .as_array()
        .ok_or_else(|| Error::InvalidInput("AST children must be an array".into()))?
        .iter()
        .map(expr_from_json_ast)
        .collect()
}
