//! Finite graphs of finite groups, described by simple-module dimensions and
//! restriction matrices.
//!
//! Vertex 0 is the root. Amalgam edges come first and form a spanning tree in
//! the fixed order `t(j) = j`, `s(j) < j` (1-based `j`); HNN edges follow and
//! may join any two vertices. A restriction matrix has one row per simple
//! module of the edge group and one column per simple module of the vertex
//! group; entry `[δ][γ]` is the multiplicity of edge-simple `δ` in the
//! restriction of vertex-simple `γ`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::exactalg::QPower;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteGroupData {
    pub label: String,
    pub simple_dims: Vec<u32>,
    pub order: u64,
    pub exponent: u64,
}

impl FiniteGroupData {
    pub fn new(label: impl Into<String>, simple_dims: Vec<u32>, order: u64, exponent: u64) -> Self {
        Self {
            label: label.into(),
            simple_dims,
            order,
            exponent,
        }
    }

    pub fn trivial() -> Self {
        Self::new("1", vec![1], 1, 1)
    }

    pub fn cyclic(n: u32) -> Self {
        Self::new(format!("C{n}"), vec![1; n as usize], n as u64, n as u64)
    }

    /// Dihedral group of order `2n` (`n >= 2`); `D2` is the Klein four group.
    pub fn dihedral(n: u32) -> Self {
        assert!(n >= 2, "dihedral groups start at D2");
        let dims = if n % 2 == 0 {
            let mut v = vec![1; 4];
            v.extend(std::iter::repeat(2).take((n / 2 - 1) as usize));
            v
        } else {
            let mut v = vec![1; 2];
            v.extend(std::iter::repeat(2).take(((n - 1) / 2) as usize));
            v
        };
        Self::new(format!("D{n}"), dims, 2 * n as u64, (2u64).lcm(&(n as u64)))
    }

    pub fn klein_four() -> Self {
        Self::new("C2xC2", vec![1; 4], 4, 2)
    }

    pub fn num_simples(&self) -> usize {
        self.simple_dims.len()
    }

    pub fn is_abelian_split(&self) -> bool {
        self.simple_dims.iter().all(|&d| d == 1)
    }
}

/// Restriction matrix, rows indexed by edge-group simples, columns by
/// vertex-group simples. Entries are stored signed so that loaded data with
/// negative entries can be reported by [`GraphOfGroups::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RestrictionMap {
    pub matrix: Vec<Vec<i64>>,
}

impl RestrictionMap {
    pub fn new(matrix: Vec<Vec<i64>>) -> Self {
        Self { matrix }
    }

    /// Congruence pattern for `C_a -> C_c` restriction: edge character `δ`
    /// receives the vertex characters `γ ≡ δ (mod c)`.
    pub fn cyclic(a: u32, c: u32) -> Self {
        let matrix = (0..c)
            .map(|delta| (0..a).map(|g| i64::from(g % c == delta)).collect())
            .collect();
        Self { matrix }
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    /// Apply to a vertex multiplicity vector.
    pub fn apply(&self, m: &[u32]) -> Vec<u32> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(m)
                    .map(|(&a, &x)| a as u32 * x)
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Amalgam,
    Hnn,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub edge_group: FiniteGroupData,
    pub s: usize,
    pub t: usize,
    pub iota: RestrictionMap,
    pub kappa: RestrictionMap,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphOfGroups {
    /// Display name (preset name, file stem, or "custom"). Not part of the
    /// serialized form.
    pub name: String,
    pub vertices: Vec<FiniteGroupData>,
    pub edges: Vec<Edge>,
}

/// One invariant violation, with a JSON-pointer style location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("bad preset parameters for {name:?}: {reason}")]
    BadParameters { name: String, reason: String },
    #[error("JSON parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("invalid graph of groups: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Alg(#[from] crate::exactalg::AlgError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl GraphOfGroups {
    /// Builds and validates.
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<FiniteGroupData>,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        let g = Self {
            name: name.into(),
            vertices,
            edges,
        };
        let v = g.validate();
        if v.is_empty() {
            Ok(g)
        } else {
            Err(GraphError::Invalid(v))
        }
    }

    pub fn num_amalgam(&self) -> usize {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Amalgam).count()
    }

    pub fn num_hnn(&self) -> usize {
        self.edges.len() - self.num_amalgam()
    }

    /// All invariant violations; empty iff the data is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut bad = |path: String, message: String| out.push(Violation { path, message });
        if self.vertices.is_empty() {
            bad("/vertices".into(), "at least one vertex group is required".into());
        }
        for (i, v) in self.vertices.iter().enumerate() {
            check_group(v, &format!("/vertices/{i}"), &mut bad);
        }
        let mut seen_hnn = false;
        let mut amalgams = 0usize;
        for (j, e) in self.edges.iter().enumerate() {
            let path = format!("/edges/{j}");
            check_group(&e.edge_group, &format!("{path}/edge"), &mut bad);
            match e.kind {
                EdgeKind::Amalgam => {
                    if seen_hnn {
                        bad(format!("{path}/kind"), "amalgam edges must precede HNN edges".into());
                    }
                    amalgams += 1;
                    if e.t != amalgams || e.s >= amalgams {
                        bad(
                            path.clone(),
                            format!(
                                "tree condition: amalgam edge {amalgams} needs t = {amalgams} and s < {amalgams}, got s = {}, t = {}",
                                e.s, e.t
                            ),
                        );
                    }
                }
                EdgeKind::Hnn => seen_hnn = true,
            }
            for (key, idx) in [("s", e.s), ("t", e.t)] {
                if idx >= self.vertices.len() {
                    bad(format!("{path}/{key}"), format!("vertex index {idx} out of range"));
                }
            }
            for (key, map, idx) in [("iota", &e.iota, e.s), ("kappa", &e.kappa, e.t)] {
                if let Some(vg) = self.vertices.get(idx) {
                    check_restriction(map, &e.edge_group, vg, &format!("{path}/{key}"), &mut bad);
                }
            }
        }
        if !self.vertices.is_empty() && amalgams + 1 != self.vertices.len() {
            bad(
                "/edges".into(),
                format!(
                    "tree condition: {} vertices need {} amalgam edges, found {amalgams}",
                    self.vertices.len(),
                    self.vertices.len() - 1
                ),
            );
        }
        out
    }

    /// Serialize to canonical JSON (object keys in schema order, matrices
    /// row-major, two-space indentation).
    pub fn save(&self) -> Vec<u8> {
        let doc = SpecDoc {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| SpecEdge {
                    edge: e.edge_group.clone(),
                    s: e.s,
                    t: e.t,
                    iota: e.iota.matrix.clone(),
                    kappa: e.kappa.matrix.clone(),
                    kind: e.kind,
                })
                .collect(),
        };
        let mut bytes = serde_json::to_vec_pretty(&doc).expect("serializable");
        bytes.push(b'\n');
        bytes
    }

    /// Parse and validate a group description document.
    pub fn load(bytes: &[u8]) -> Result<Self, GraphError> {
        Self::load_named("custom", bytes)
    }

    pub fn load_named(name: &str, bytes: &[u8]) -> Result<Self, GraphError> {
        let root: Value = serde_json::from_slice(bytes).map_err(|e| GraphError::Parse {
            offset: byte_offset(bytes, e.line(), e.column()),
            message: e.to_string(),
        })?;
        let obj = as_object(&root, "")?;
        let vertices = as_array(field(obj, "vertices", "")?, "/vertices")?
            .iter()
            .enumerate()
            .map(|(i, v)| parse_group(v, &format!("/vertices/{i}")))
            .collect::<Result<Vec<_>, _>>()?;
        let edges = as_array(field(obj, "edges", "")?, "/edges")?
            .iter()
            .enumerate()
            .map(|(j, v)| parse_edge(v, &format!("/edges/{j}")))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, vertices, edges)
    }

    /// Sufficient test for `F_q` being suitable: the characteristic is coprime
    /// to every vertex-group order and `q ≡ 1` modulo every vertex-group
    /// exponent, so all group algebras split completely. Conservative: some
    /// suitable fields are rejected.
    pub fn is_suitable_prime_power(&self, q: u64) -> Result<bool, GraphError> {
        let qp = QPower::new(q)?;
        Ok(self
            .vertices
            .iter()
            .all(|v| v.order % qp.p != 0 && (q - 1) % v.exponent == 0))
    }

    /// Looks up a preset by name, e.g. `psl2z`, `free(2)`, `cyclic_amalgam(4,2,6)`.
    pub fn preset(spec: &str) -> Result<Self, GraphError> {
        let spec = spec.trim();
        let (name, args) = parse_call(spec)?;
        let arity = |n: usize| -> Result<(), GraphError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(GraphError::BadParameters {
                    name: spec.to_string(),
                    reason: format!("expected {n} parameter(s), got {}", args.len()),
                })
            }
        };
        let bad = |reason: &str| GraphError::BadParameters {
            name: spec.to_string(),
            reason: reason.to_string(),
        };
        let g = match name {
            "free" => {
                arity(1)?;
                free_group(args[0])
            }
            "cyclic" => {
                arity(1)?;
                if args[0] < 1 {
                    return Err(bad("order must be positive"));
                }
                Self::new(spec, vec![FiniteGroupData::cyclic(args[0])], vec![])
            }
            "cyclic_free_product" => {
                arity(2)?;
                cyclic_amalgam(spec, args[0], 1, args[1])
            }
            "cyclic_amalgam" => {
                arity(3)?;
                cyclic_amalgam(spec, args[0], args[1], args[2])
            }
            "dinf" => {
                arity(0)?;
                cyclic_amalgam(spec, 2, 1, 2)
            }
            "gc" => {
                arity(1)?;
                let c = args[0];
                if c < 1 {
                    return Err(bad("c must be positive"));
                }
                cyclic_amalgam(spec, 2 * c, c, 2 * c)
            }
            "psl2z" => {
                arity(0)?;
                cyclic_amalgam(spec, 2, 1, 3)
            }
            "sl2z" => {
                arity(0)?;
                cyclic_amalgam(spec, 4, 2, 6)
            }
            "gl2z" => {
                arity(0)?;
                gl2z()
            }
            "pgl2z" => {
                arity(0)?;
                pgl2z()
            }
            "dihedral" => {
                arity(1)?;
                if args[0] < 2 {
                    return Err(bad("dihedral(n) needs n >= 2"));
                }
                Self::new(spec, vec![FiniteGroupData::dihedral(args[0])], vec![])
            }
            _ => return Err(GraphError::UnknownPreset(spec.to_string())),
        }?;
        Ok(Self {
            name: spec.to_string(),
            ..g
        })
    }

    /// Names accepted by [`GraphOfGroups::preset`], with placeholder parameters.
    pub fn preset_names() -> &'static [&'static str] {
        &[
            "free(a)",
            "cyclic(n)",
            "cyclic_free_product(a,b)",
            "cyclic_amalgam(a,c,b)",
            "dinf",
            "gc(c)",
            "psl2z",
            "sl2z",
            "gl2z",
            "pgl2z",
            "dihedral(n)",
        ]
    }
}

fn check_group(g: &FiniteGroupData, path: &str, bad: &mut impl FnMut(String, String)) {
    if g.simple_dims.is_empty() {
        bad(format!("{path}/simple_dims"), "simple_dims must be nonempty".into());
    }
    if g.simple_dims.contains(&0) {
        bad(format!("{path}/simple_dims"), "simple module dimensions must be positive".into());
    }
    if g.order == 0 || g.exponent == 0 {
        bad(path.to_string(), "order and exponent must be positive".into());
    }
    let total: u64 = g.simple_dims.iter().map(|&d| u64::from(d) * u64::from(d)).sum();
    if total != g.order {
        bad(
            format!("{path}/order"),
            format!("dimension count: sum of squared simple dimensions is {total}, order is {}", g.order),
        );
    }
}

fn check_restriction(
    map: &RestrictionMap,
    edge: &FiniteGroupData,
    vertex: &FiniteGroupData,
    path: &str,
    bad: &mut impl FnMut(String, String),
) {
    let rows = edge.num_simples();
    let cols = vertex.num_simples();
    if map.matrix.len() != rows || map.matrix.iter().any(|r| r.len() != cols) {
        bad(path.to_string(), format!("shape: expected {rows}x{cols} matrix"));
        return;
    }
    for (r, row) in map.matrix.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            if x < 0 {
                bad(format!("{path}/{r}/{c}"), format!("entries must be nonnegative, got {x}"));
            }
        }
    }
    for c in 0..cols {
        let column: Vec<i64> = map.matrix.iter().map(|r| r[c]).collect();
        if column.iter().all(|&x| x == 0) {
            bad(format!("{path}/*/{c}"), "zero column".into());
            continue;
        }
        let dim: i64 = column
            .iter()
            .zip(&edge.simple_dims)
            .map(|(&x, &d)| x * i64::from(d))
            .sum();
        if dim != i64::from(vertex.simple_dims[c]) {
            bad(
                format!("{path}/*/{c}"),
                format!(
                    "dimension preservation: column restricts to dimension {dim}, vertex simple has dimension {}",
                    vertex.simple_dims[c]
                ),
            );
        }
    }
}

#[derive(Serialize)]
struct SpecDoc {
    vertices: Vec<FiniteGroupData>,
    edges: Vec<SpecEdge>,
}

#[derive(Serialize)]
struct SpecEdge {
    edge: FiniteGroupData,
    s: usize,
    t: usize,
    iota: Vec<Vec<i64>>,
    kappa: Vec<Vec<i64>>,
    kind: EdgeKind,
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (i, l) in bytes.split(|&b| b == b'\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1).min(l.len());
        }
        offset += l.len() + 1;
    }
    bytes.len()
}

fn schema(path: &str, message: impl Into<String>) -> GraphError {
    GraphError::Schema {
        path: if path.is_empty() { "/".into() } else { path.into() },
        message: message.into(),
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a serde_json::Map<String, Value>, GraphError> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, GraphError> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn field<'a>(
    obj: &'a serde_json::Map<String, Value>,
    key: &str,
    path: &str,
) -> Result<&'a Value, GraphError> {
    obj.get(key)
        .ok_or_else(|| schema(&format!("{path}/{key}"), "missing field"))
}

fn as_u64(v: &Value, path: &str) -> Result<u64, GraphError> {
    v.as_u64().ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn parse_group(v: &Value, path: &str) -> Result<FiniteGroupData, GraphError> {
    let obj = as_object(v, path)?;
    let label = field(obj, "label", path)?
        .as_str()
        .ok_or_else(|| schema(&format!("{path}/label"), "expected a string"))?
        .to_string();
    let dims_path = format!("{path}/simple_dims");
    let simple_dims = as_array(field(obj, "simple_dims", path)?, &dims_path)?
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let p = format!("{dims_path}/{k}");
            u32::try_from(as_u64(x, &p)?).map_err(|_| schema(&p, "too large"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let order = as_u64(field(obj, "order", path)?, &format!("{path}/order"))?;
    let exponent = as_u64(field(obj, "exponent", path)?, &format!("{path}/exponent"))?;
    Ok(FiniteGroupData {
        label,
        simple_dims,
        order,
        exponent,
    })
}

fn parse_matrix(v: &Value, path: &str) -> Result<RestrictionMap, GraphError> {
    let rows = as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let rp = format!("{path}/{r}");
            as_array(row, &rp)?
                .iter()
                .enumerate()
                .map(|(c, x)| {
                    x.as_i64()
                        .ok_or_else(|| schema(&format!("{rp}/{c}"), "expected an integer"))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RestrictionMap::new(rows))
}

fn parse_edge(v: &Value, path: &str) -> Result<Edge, GraphError> {
    let obj = as_object(v, path)?;
    let edge_group = parse_group(field(obj, "edge", path)?, &format!("{path}/edge"))?;
    let s = as_u64(field(obj, "s", path)?, &format!("{path}/s"))? as usize;
    let t = as_u64(field(obj, "t", path)?, &format!("{path}/t"))? as usize;
    let iota = parse_matrix(field(obj, "iota", path)?, &format!("{path}/iota"))?;
    let kappa = parse_matrix(field(obj, "kappa", path)?, &format!("{path}/kappa"))?;
    let kind = match field(obj, "kind", path)?.as_str() {
        Some("amalgam") => EdgeKind::Amalgam,
        Some("hnn") => EdgeKind::Hnn,
        _ => return Err(schema(&format!("{path}/kind"), "expected \"amalgam\" or \"hnn\"")),
    };
    Ok(Edge {
        edge_group,
        s,
        t,
        iota,
        kappa,
        kind,
    })
}

fn parse_call(spec: &str) -> Result<(&str, Vec<u32>), GraphError> {
    let Some(open) = spec.find('(') else {
        return Ok((spec, Vec::new()));
    };
    let inner = spec[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| GraphError::BadParameters {
            name: spec.to_string(),
            reason: "missing closing parenthesis".into(),
        })?;
    let args = inner
        .split(',')
        .map(|a| {
            a.trim().parse::<u32>().map_err(|_| GraphError::BadParameters {
                name: spec.to_string(),
                reason: format!("parameter {a:?} is not a nonnegative integer"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((&spec[..open], args))
}

fn free_group(a: u32) -> Result<GraphOfGroups, GraphError> {
    let unit = RestrictionMap::new(vec![vec![1]]);
    let edges = (0..a)
        .map(|_| Edge {
            edge_group: FiniteGroupData::trivial(),
            s: 0,
            t: 0,
            iota: unit.clone(),
            kappa: unit.clone(),
            kind: EdgeKind::Hnn,
        })
        .collect();
    GraphOfGroups::new(format!("free({a})"), vec![FiniteGroupData::trivial()], edges)
}

fn cyclic_amalgam(name: &str, a: u32, c: u32, b: u32) -> Result<GraphOfGroups, GraphError> {
    if a < 1 || b < 1 || c < 1 || a % c != 0 || b % c != 0 {
        return Err(GraphError::BadParameters {
            name: name.to_string(),
            reason: format!("need c | a and c | b with positive a, b, c; got a={a}, c={c}, b={b}"),
        });
    }
    let edge_group = if c == 1 {
        FiniteGroupData::trivial()
    } else {
        FiniteGroupData::cyclic(c)
    };
    GraphOfGroups::new(
        name,
        vec![FiniteGroupData::cyclic(a), FiniteGroupData::cyclic(b)],
        vec![Edge {
            edge_group,
            s: 0,
            t: 1,
            iota: RestrictionMap::cyclic(a, c),
            kappa: RestrictionMap::cyclic(b, c),
            kind: EdgeKind::Amalgam,
        }],
    )
}

/// `D4 *_{C2xC2} D6`. Both dihedral groups are generated by reflections
/// `s, t` with rotation `r = st`; the edge group is `<s, r^a>` with `r^a`
/// central of order two. Edge characters are ordered by their values on
/// `(s, r^a)`: `(+,+), (-,+), (+,-), (-,-)`. Linear characters of the
/// vertex groups are ordered by their values on `(s, t)`:
/// `(+,+), (+,-), (-,+), (-,-)`; the 2-dimensional simples follow, for D6
/// first the one with `r^3 = -1`, then the one with `r^3 = +1`.
fn gl2z() -> Result<GraphOfGroups, GraphError> {
    let iota = RestrictionMap::new(vec![
        vec![1, 1, 0, 0, 0],
        vec![0, 0, 1, 1, 0],
        vec![0, 0, 0, 0, 1],
        vec![0, 0, 0, 0, 1],
    ]);
    let kappa = RestrictionMap::new(vec![
        vec![1, 0, 0, 0, 0, 1],
        vec![0, 0, 0, 1, 0, 1],
        vec![0, 1, 0, 0, 1, 0],
        vec![0, 0, 1, 0, 1, 0],
    ]);
    GraphOfGroups::new(
        "gl2z",
        vec![FiniteGroupData::dihedral(4), FiniteGroupData::dihedral(6)],
        vec![Edge {
            edge_group: FiniteGroupData::klein_four(),
            s: 0,
            t: 1,
            iota,
            kappa,
            kind: EdgeKind::Amalgam,
        }],
    )
}

/// `D2 *_{C2} D3` with the edge group generated by the reflection `s`.
/// Linear characters ordered by values on `(s, t)` as for [`gl2z`]; the D3
/// simples are (trivial, sign, standard).
fn pgl2z() -> Result<GraphOfGroups, GraphError> {
    let iota = RestrictionMap::new(vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1]]);
    let kappa = RestrictionMap::new(vec![vec![1, 0, 1], vec![0, 1, 1]]);
    GraphOfGroups::new(
        "pgl2z",
        vec![FiniteGroupData::dihedral(2), FiniteGroupData::dihedral(3)],
        vec![Edge {
            edge_group: FiniteGroupData::cyclic(2),
            s: 0,
            t: 1,
            iota,
            kappa,
            kind: EdgeKind::Amalgam,
        }],
    )
}
