//! Problem-spec documents: exact-rational JSON in, validated engine inputs
//! out.
//!
//! Every numeric literal must be an integer or a `p/q` string; JSON floats
//! are rejected by naming the offending literal, because a decimal would
//! silently break the exactness contract. Unknown fields are rejected with
//! their field path.

use feqn_core::domains::{BoxDomain, Cone, Domain, Interval};
use feqn_core::equation::{AffineMap, EquationSpec};
use feqn_core::extension::Point;
use feqn_core::groups::{FiniteAbelianGroup, GroupFunction};
use feqn_core::rational::{parse_rational, QMatrix, QVector, Rational};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    /// Field path like `equation.alphas[0]`, or `<document>` for syntax
    /// errors.
    pub path: String,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "spec error at {}: {}", self.path, self.message)
    }
}

impl std::error::Error for SpecError {}

fn err(path: &str, message: impl Into<String>) -> SpecError {
    SpecError {
        path: path.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CheckInvariance,
    Characterize,
    Verify,
    Extend,
    EnumerateFinite,
    WeightedCheck,
    Shrink,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckInvariance => "check-invariance",
            Command::Characterize => "characterize",
            Command::Verify => "verify",
            Command::Extend => "extend",
            Command::EnumerateFinite => "enumerate-finite",
            Command::WeightedCheck => "weighted-check",
            Command::Shrink => "shrink",
        }
    }

    fn from_name(name: &str) -> Option<Command> {
        Some(match name {
            "check-invariance" => Command::CheckInvariance,
            "characterize" => Command::Characterize,
            "verify" => Command::Verify,
            "extend" => Command::Extend,
            "enumerate-finite" => Command::EnumerateFinite,
            "weighted-check" => Command::WeightedCheck,
            "shrink" => Command::Shrink,
            _ => return None,
        })
    }
}

/// Input function for the extend command: a closed affine form to sample, or
/// an explicit point table.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtendFunction {
    Affine(AffineMap),
    Table(BTreeMap<Point, QVector>),
}

/// One validated problem document: one command plus its inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub command: Command,
    pub domain: Option<Domain>,
    pub equation: Option<EquationSpec>,
    pub candidate: Option<AffineMap>,
    pub group: Option<FiniteAbelianGroup>,
    pub codomain: Option<FiniteAbelianGroup>,
    pub weights: Option<Vec<i64>>,
    pub f_table: Option<Vec<u64>>,
    pub g_tables: Option<Vec<Vec<u64>>>,
    pub function: Option<ExtendFunction>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub radius: Option<Rational>,
    pub patches: Option<usize>,
}

pub fn parse_spec(text: &str) -> Result<ProblemSpec, SpecError> {
    let value: Value = serde_json::from_str(text).map_err(|e| err("<document>", e.to_string()))?;
    let Some(root) = value.as_object() else {
        return Err(err("<document>", "the spec must be a JSON object"));
    };

    let command_value = root
        .get("command")
        .ok_or_else(|| err("command", "missing required field"))?;
    let command_name = command_value
        .as_str()
        .ok_or_else(|| err("command", "must be a string"))?;
    let command = Command::from_name(command_name).ok_or_else(|| {
        err(
            "command",
            format!(
                "unknown command `{command_name}`; expected one of check-invariance, \
                 characterize, verify, extend, enumerate-finite, weighted-check, shrink"
            ),
        )
    })?;

    let (required, optional): (&[&str], &[&str]) = match command {
        Command::CheckInvariance => (&["domain", "equation"], &["seed"]),
        Command::Characterize => (&["equation"], &[]),
        Command::Verify => (&["domain", "equation", "candidate"], &["trials", "seed"]),
        Command::Extend => (&["domain", "equation", "function"], &["radius", "patches"]),
        Command::EnumerateFinite => (&["group", "codomain"], &[]),
        Command::WeightedCheck => (&["group", "alphas", "f", "gs"], &["codomain"]),
        Command::Shrink => (&["domain", "equation"], &[]),
    };
    for key in root.keys() {
        if key != "command"
            && !required.contains(&key.as_str())
            && !optional.contains(&key.as_str())
        {
            return Err(err(
                key,
                format!("unknown field for command `{command_name}`"),
            ));
        }
    }
    for key in required {
        if !root.contains_key(*key) {
            return Err(err(
                key,
                format!("missing field required by `{command_name}`"),
            ));
        }
    }

    let mut spec = ProblemSpec {
        command,
        domain: None,
        equation: None,
        candidate: None,
        group: None,
        codomain: None,
        weights: None,
        f_table: None,
        g_tables: None,
        function: None,
        trials: None,
        seed: None,
        radius: None,
        patches: None,
    };

    if let Some(v) = root.get("domain") {
        spec.domain = Some(parse_domain(v, "domain")?);
    }
    if let Some(v) = root.get("equation") {
        spec.equation = Some(parse_equation(v, "equation")?);
    }
    if let Some(v) = root.get("candidate") {
        spec.candidate = Some(parse_affine(v, "candidate")?);
    }
    if let Some(v) = root.get("group") {
        spec.group = Some(parse_group(v, "group")?);
    }
    if let Some(v) = root.get("codomain") {
        spec.codomain = Some(parse_group(v, "codomain")?);
    }
    if let Some(v) = root.get("alphas") {
        spec.weights = Some(parse_integer_list(v, "alphas")?);
    }
    if let Some(v) = root.get("f") {
        spec.f_table = Some(parse_index_list(v, "f")?);
    }
    if let Some(v) = root.get("gs") {
        let list = v
            .as_array()
            .ok_or_else(|| err("gs", "must be an array of tables"))?;
        let mut tables = Vec::with_capacity(list.len());
        for (i, t) in list.iter().enumerate() {
            tables.push(parse_index_list(t, &format!("gs[{i}]"))?);
        }
        spec.g_tables = Some(tables);
    }
    if let Some(v) = root.get("function") {
        spec.function = Some(parse_function(v, "function")?);
    }
    if let Some(v) = root.get("trials") {
        spec.trials = Some(parse_count(v, "trials")?);
    }
    if let Some(v) = root.get("seed") {
        spec.seed = Some(parse_count(v, "seed")? as u64);
    }
    if let Some(v) = root.get("radius") {
        spec.radius = Some(parse_rational_value(v, "radius")?);
    }
    if let Some(v) = root.get("patches") {
        spec.patches = Some(parse_count(v, "patches")?);
    }
    Ok(spec)
}

fn parse_count(v: &Value, path: &str) -> Result<usize, SpecError> {
    match v.as_u64() {
        Some(n) => Ok(n as usize),
        None => Err(err(path, format!("`{v}` is not a non-negative integer"))),
    }
}

/// Exact rational: a `p/q` / integer string, or an integer JSON number.
/// Floats are rejected by naming the literal.
fn parse_rational_value(v: &Value, path: &str) -> Result<Rational, SpecError> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| err(path, e.to_string())),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(feqn_core::rational::rat(i))
            } else {
                Err(err(
                    path,
                    format!("numeric literal `{n}` is not exact; write it as a `p/q` string"),
                ))
            }
        }
        other => Err(err(path, format!("`{other}` is not a rational"))),
    }
}

/// Interval endpoint: rational, or the matching infinite sentinel
/// ("-inf" for lower endpoints, "inf" for upper ones).
fn parse_endpoint(v: &Value, path: &str, lower: bool) -> Result<Option<Rational>, SpecError> {
    if let Value::String(s) = v {
        match (s.trim(), lower) {
            ("-inf", true) | ("inf", false) | ("+inf", false) => return Ok(None),
            ("-inf", false) | ("inf", true) | ("+inf", true) => {
                return Err(err(
                    path,
                    format!("`{}` points the wrong way for this endpoint", s.trim()),
                ))
            }
            _ => {}
        }
    }
    parse_rational_value(v, path).map(Some)
}

fn parse_interval(map: &Map<String, Value>, path: &str) -> Result<Interval, SpecError> {
    for key in map.keys() {
        if key != "lo" && key != "hi" && key != "type" {
            return Err(err(&format!("{path}.{key}"), "unknown field in interval"));
        }
    }
    let lo = parse_endpoint(
        map.get("lo")
            .ok_or_else(|| err(&format!("{path}.lo"), "missing endpoint"))?,
        &format!("{path}.lo"),
        true,
    )?;
    let hi = parse_endpoint(
        map.get("hi")
            .ok_or_else(|| err(&format!("{path}.hi"), "missing endpoint"))?,
        &format!("{path}.hi"),
        false,
    )?;
    Interval::new(lo, hi).map_err(|e| err(path, e.to_string()))
}

fn parse_domain(v: &Value, path: &str) -> Result<Domain, SpecError> {
    let map = v
        .as_object()
        .ok_or_else(|| err(path, "domain must be an object"))?;
    let kind = map
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| err(&format!("{path}.type"), "missing domain type"))?;
    match kind {
        "interval" => Ok(Domain::Interval(parse_interval(map, path)?)),
        "box" => {
            for key in map.keys() {
                if key != "type" && key != "sides" {
                    return Err(err(&format!("{path}.{key}"), "unknown field in box"));
                }
            }
            let sides_value = map
                .get("sides")
                .and_then(Value::as_array)
                .ok_or_else(|| err(&format!("{path}.sides"), "box needs a `sides` array"))?;
            let mut sides = Vec::with_capacity(sides_value.len());
            for (i, side) in sides_value.iter().enumerate() {
                let side_path = format!("{path}.sides[{i}]");
                let side_map = side
                    .as_object()
                    .ok_or_else(|| err(&side_path, "side must be an object"))?;
                sides.push(parse_interval(side_map, &side_path)?);
            }
            BoxDomain::new(sides)
                .map(Domain::Box)
                .map_err(|e| err(path, e.to_string()))
        }
        "cone" => {
            for key in map.keys() {
                if key != "type" && key != "generators" {
                    return Err(err(&format!("{path}.{key}"), "unknown field in cone"));
                }
            }
            let gens_value = map
                .get("generators")
                .and_then(Value::as_array)
                .ok_or_else(|| {
                    err(
                        &format!("{path}.generators"),
                        "cone needs a `generators` array",
                    )
                })?;
            let mut generators = Vec::with_capacity(gens_value.len());
            for (i, g) in gens_value.iter().enumerate() {
                generators.push(parse_rational_list(g, &format!("{path}.generators[{i}]"))?);
            }
            Cone::new(generators)
                .map(Domain::Cone)
                .map_err(|e| err(path, e.to_string()))
        }
        other => Err(err(
            &format!("{path}.type"),
            format!("unknown domain type `{other}`; expected interval, box, or cone"),
        )),
    }
}

fn parse_rational_list(v: &Value, path: &str) -> Result<Vec<Rational>, SpecError> {
    let list = v
        .as_array()
        .ok_or_else(|| err(path, "must be an array of rationals"))?;
    list.iter()
        .enumerate()
        .map(|(i, x)| parse_rational_value(x, &format!("{path}[{i}]")))
        .collect()
}

fn parse_integer_list(v: &Value, path: &str) -> Result<Vec<i64>, SpecError> {
    let list = v
        .as_array()
        .ok_or_else(|| err(path, "must be an array of integers"))?;
    list.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_i64()
                .ok_or_else(|| err(&format!("{path}[{i}]"), format!("`{x}` is not an integer")))
        })
        .collect()
}

fn parse_index_list(v: &Value, path: &str) -> Result<Vec<u64>, SpecError> {
    let list = v
        .as_array()
        .ok_or_else(|| err(path, "must be an array of element indices"))?;
    list.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_u64().ok_or_else(|| {
                err(
                    &format!("{path}[{i}]"),
                    format!("`{x}` is not a non-negative element index"),
                )
            })
        })
        .collect()
}

fn parse_equation(v: &Value, path: &str) -> Result<EquationSpec, SpecError> {
    let map = v
        .as_object()
        .ok_or_else(|| err(path, "equation must be an object"))?;
    for key in map.keys() {
        if key != "alphas" && key != "betas" {
            return Err(err(&format!("{path}.{key}"), "unknown field in equation"));
        }
    }
    let alphas = parse_rational_list(
        map.get("alphas")
            .ok_or_else(|| err(&format!("{path}.alphas"), "missing coefficients"))?,
        &format!("{path}.alphas"),
    )?;
    let betas = parse_rational_list(
        map.get("betas")
            .ok_or_else(|| err(&format!("{path}.betas"), "missing coefficients"))?,
        &format!("{path}.betas"),
    )?;
    EquationSpec::new(alphas, betas).map_err(|e| err(path, e.to_string()))
}

fn parse_affine(v: &Value, path: &str) -> Result<AffineMap, SpecError> {
    let map = v
        .as_object()
        .ok_or_else(|| err(path, "affine map must be an object"))?;
    for key in map.keys() {
        if key != "A" && key != "b" {
            return Err(err(&format!("{path}.{key}"), "unknown field in affine map"));
        }
    }
    let rows_value = map
        .get("A")
        .and_then(Value::as_array)
        .ok_or_else(|| err(&format!("{path}.A"), "missing matrix rows"))?;
    let mut rows = Vec::with_capacity(rows_value.len());
    for (i, row) in rows_value.iter().enumerate() {
        rows.push(parse_rational_list(row, &format!("{path}.A[{i}]"))?);
    }
    let matrix = QMatrix::from_rows(rows).map_err(|e| err(&format!("{path}.A"), e))?;
    let offset = parse_rational_list(
        map.get("b")
            .ok_or_else(|| err(&format!("{path}.b"), "missing offset"))?,
        &format!("{path}.b"),
    )?;
    AffineMap::new(matrix, offset).map_err(|e| err(path, e.to_string()))
}

fn parse_group(v: &Value, path: &str) -> Result<FiniteAbelianGroup, SpecError> {
    let map = v
        .as_object()
        .ok_or_else(|| err(path, "group must be an object"))?;
    for key in map.keys() {
        if key != "moduli" {
            return Err(err(&format!("{path}.{key}"), "unknown field in group"));
        }
    }
    let moduli_value = map
        .get("moduli")
        .and_then(Value::as_array)
        .ok_or_else(|| err(&format!("{path}.moduli"), "group needs a `moduli` array"))?;
    let mut moduli = Vec::with_capacity(moduli_value.len());
    for (i, m) in moduli_value.iter().enumerate() {
        moduli.push(m.as_u64().ok_or_else(|| {
            err(
                &format!("{path}.moduli[{i}]"),
                format!("`{m}` is not a positive integer"),
            )
        })?);
    }
    FiniteAbelianGroup::new(moduli).map_err(|e| err(path, e.to_string()))
}

fn parse_function(v: &Value, path: &str) -> Result<ExtendFunction, SpecError> {
    let map = v
        .as_object()
        .ok_or_else(|| err(path, "function must be an object"))?;
    for key in map.keys() {
        if key != "affine" && key != "table" {
            return Err(err(&format!("{path}.{key}"), "unknown field in function"));
        }
    }
    match (map.get("affine"), map.get("table")) {
        (Some(aff), None) => Ok(ExtendFunction::Affine(parse_affine(
            aff,
            &format!("{path}.affine"),
        )?)),
        (None, Some(table)) => {
            // point → value map with comma-joined rational coordinates as
            // keys, e.g. {"1/4,3/8": ["7/4", "0"]}
            let table_path = format!("{path}.table");
            let tmap = table
                .as_object()
                .ok_or_else(|| err(&table_path, "table must be an object"))?;
            let mut out = BTreeMap::new();
            for (key, val) in tmap {
                let entry_path = format!("{table_path}.{key}");
                let point: Point = key
                    .split(',')
                    .map(|part| parse_rational(part).map_err(|e| err(&entry_path, e.to_string())))
                    .collect::<Result<_, _>>()?;
                let value = parse_rational_list(val, &entry_path)?;
                out.insert(point, value);
            }
            if out.is_empty() {
                return Err(err(&table_path, "table has no entries"));
            }
            Ok(ExtendFunction::Table(out))
        }
        _ => Err(err(
            path,
            "function must have exactly one of `affine` or `table`",
        )),
    }
}

/// Convert group function tables (element indices) into engine functions.
pub fn group_function_from_indices(
    domain: &FiniteAbelianGroup,
    codomain: &FiniteAbelianGroup,
    table: &[u64],
    path: &str,
) -> Result<GroupFunction, SpecError> {
    let codomain_elements = codomain.elements();
    let mut values = Vec::with_capacity(table.len());
    for (i, &index) in table.iter().enumerate() {
        let element = codomain_elements.get(index as usize).ok_or_else(|| {
            err(
                &format!("{path}[{i}]"),
                format!(
                    "index {index} is out of range for a codomain of order {}",
                    codomain_elements.len()
                ),
            )
        })?;
        values.push(element.clone());
    }
    GroupFunction::new(domain.clone(), codomain.clone(), values)
        .map_err(|e| err(path, e.to_string()))
}

// ---- canonical rendering (round-trip support) ----

fn rational_json(x: &Rational) -> Value {
    Value::String(x.to_string())
}

fn rational_list_json(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(rational_json).collect())
}

fn endpoint_json(side: Option<&Rational>, negative: bool) -> Value {
    match side {
        Some(x) => rational_json(x),
        None => Value::String(if negative { "-inf" } else { "inf" }.to_string()),
    }
}

fn interval_json(iv: &Interval, with_type: bool) -> Value {
    let mut map = Map::new();
    if with_type {
        map.insert("type".into(), Value::String("interval".into()));
    }
    map.insert("lo".into(), endpoint_json(iv.lo_finite(), true));
    map.insert("hi".into(), endpoint_json(iv.hi_finite(), false));
    Value::Object(map)
}

pub fn domain_json(domain: &Domain) -> Value {
    match domain {
        Domain::Interval(iv) => interval_json(iv, true),
        Domain::Box(b) => {
            let mut map = Map::new();
            map.insert("type".into(), Value::String("box".into()));
            map.insert(
                "sides".into(),
                Value::Array(b.sides().iter().map(|s| interval_json(s, false)).collect()),
            );
            Value::Object(map)
        }
        Domain::Cone(c) => {
            let mut map = Map::new();
            map.insert("type".into(), Value::String("cone".into()));
            map.insert(
                "generators".into(),
                Value::Array(
                    c.generators()
                        .iter()
                        .map(|g| rational_list_json(g))
                        .collect(),
                ),
            );
            Value::Object(map)
        }
    }
}

pub fn affine_json(map: &AffineMap) -> Value {
    let mut out = Map::new();
    out.insert(
        "A".into(),
        Value::Array(
            map.linear()
                .rows()
                .iter()
                .map(|r| rational_list_json(r))
                .collect(),
        ),
    );
    out.insert("b".into(), rational_list_json(map.offset()));
    Value::Object(out)
}

/// Canonical JSON for a spec; `parse_spec(render_spec(s).to_string()) == s`.
pub fn render_spec(spec: &ProblemSpec) -> Value {
    let mut map = Map::new();
    map.insert(
        "command".into(),
        Value::String(spec.command.name().to_string()),
    );
    if let Some(d) = &spec.domain {
        map.insert("domain".into(), domain_json(d));
    }
    if let Some(e) = &spec.equation {
        let mut eq = Map::new();
        eq.insert("alphas".into(), rational_list_json(e.alphas()));
        eq.insert("betas".into(), rational_list_json(e.betas()));
        map.insert("equation".into(), Value::Object(eq));
    }
    if let Some(c) = &spec.candidate {
        map.insert("candidate".into(), affine_json(c));
    }
    if let Some(g) = &spec.group {
        map.insert("group".into(), serde_json::json!({ "moduli": g.moduli() }));
    }
    if let Some(g) = &spec.codomain {
        map.insert(
            "codomain".into(),
            serde_json::json!({ "moduli": g.moduli() }),
        );
    }
    if let Some(w) = &spec.weights {
        map.insert("alphas".into(), serde_json::json!(w));
    }
    if let Some(f) = &spec.f_table {
        map.insert("f".into(), serde_json::json!(f));
    }
    if let Some(gs) = &spec.g_tables {
        map.insert("gs".into(), serde_json::json!(gs));
    }
    if let Some(function) = &spec.function {
        let value = match function {
            ExtendFunction::Affine(a) => serde_json::json!({ "affine": affine_json(a) }),
            ExtendFunction::Table(t) => {
                let mut entries = Map::new();
                for (point, v) in t {
                    let key = point
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",");
                    entries.insert(key, rational_list_json(v));
                }
                serde_json::json!({ "table": entries })
            }
        };
        map.insert("function".into(), value);
    }
    if let Some(t) = spec.trials {
        map.insert("trials".into(), serde_json::json!(t));
    }
    if let Some(s) = spec.seed {
        map.insert("seed".into(), serde_json::json!(s));
    }
    if let Some(r) = &spec.radius {
        map.insert("radius".into(), rational_json(r));
    }
    if let Some(p) = spec.patches {
        map.insert("patches".into(), serde_json::json!(p));
    }
    Value::Object(map)
}
