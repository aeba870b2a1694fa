//! The dimension vector monoid `T(G)`.
//!
//! A dimension vector assigns to every vertex group a multiplicity vector
//! over its simple modules, subject to the edge constraints
//! `iota_j · m_{s(j)} = kappa_j · m_{t(j)}`. Because restriction preserves
//! dimension and the amalgam edges form a spanning tree, every vertex then has
//! the same weighted total `|m| = Σ_γ d_γ m_i(γ)`.
//!
//! `T(G)` is the set of nonnegative solutions of a homogeneous integer linear
//! system inside `Π_i N0^{c_i}`. Hence `c | m` in the monoid (some `n` in
//! `T(G)` with `c·n = m`) holds exactly when `c` divides every entry of `m`,
//! and the monoid gcd coincides with the entrywise gcd.
//!
//! Enumeration order is ascending lexicographic on the concatenation of the
//! per-vertex vectors, vertex 0 first.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;
use thiserror::Error;

use crate::groupgraph::GraphOfGroups;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("dimension vector shape does not match the graph: {0}")]
    Shape(String),
    #[error("edge constraint {edge} violated: {lhs:?} != {rhs:?}")]
    EdgeConstraint {
        edge: usize,
        lhs: Vec<u32>,
        rhs: Vec<u32>,
    },
    #[error("cannot parse dimension vector {0:?}")]
    Parse(String),
    #[error("division by zero")]
    DivideByZero,
    #[error("odd value {0} of <m,m> - Y(m) at {1}")]
    Parity(i64, String),
    #[error("symmetry descriptor not applicable: {0}")]
    NotApplicable(String),
}

/// A validated element of `T(G)` with cached edge restrictions
/// `u_j = iota_j · m_{s(j)}` and total dimension.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DimVector {
    parts: Vec<Vec<u32>>,
    edge_parts: Vec<Vec<u32>>,
    total: u32,
}

impl DimVector {
    pub fn new(g: &GraphOfGroups, parts: Vec<Vec<u32>>) -> Result<Self, MonoidError> {
        if parts.len() != g.vertices.len() {
            return Err(MonoidError::Shape(format!(
                "{} vertex parts for {} vertices",
                parts.len(),
                g.vertices.len()
            )));
        }
        for (i, (p, v)) in parts.iter().zip(&g.vertices).enumerate() {
            if p.len() != v.num_simples() {
                return Err(MonoidError::Shape(format!(
                    "vertex {i} has {} simples, got {} entries",
                    v.num_simples(),
                    p.len()
                )));
            }
        }
        let mut edge_parts = Vec::with_capacity(g.edges.len());
        for (j, e) in g.edges.iter().enumerate() {
            let lhs = e.iota.apply(&parts[e.s]);
            let rhs = e.kappa.apply(&parts[e.t]);
            if lhs != rhs {
                return Err(MonoidError::EdgeConstraint { edge: j, lhs, rhs });
            }
            edge_parts.push(lhs);
        }
        let total = weighted(&parts[0], &g.vertices[0].simple_dims);
        Ok(Self {
            parts,
            edge_parts,
            total,
        })
    }

    pub fn zero(g: &GraphOfGroups) -> Self {
        Self {
            parts: g.vertices.iter().map(|v| vec![0; v.num_simples()]).collect(),
            edge_parts: g.edges.iter().map(|e| vec![0; e.edge_group.num_simples()]).collect(),
            total: 0,
        }
    }

    /// Parses the text form `((2,1),(1,1,1))`.
    pub fn parse(g: &GraphOfGroups, text: &str) -> Result<Self, MonoidError> {
        let err = || MonoidError::Parse(text.to_string());
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(err)?;
        let mut parts = Vec::new();
        let mut rest = inner;
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(err)?;
            let close = body.find(')').ok_or_else(err)?;
            let part = body[..close]
                .split(',')
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<u32>().map_err(|_| err()))
                .collect::<Result<Vec<_>, _>>()?;
            parts.push(part);
            rest = &body[close + 1..];
            rest = rest.strip_prefix(',').unwrap_or(rest);
        }
        Self::new(g, parts)
    }

    pub fn parts(&self) -> &[Vec<u32>] {
        &self.parts
    }

    pub fn edge_parts(&self) -> &[Vec<u32>] {
        &self.edge_parts
    }

    /// Concatenated per-vertex entries.
    pub fn flat(&self) -> Vec<u32> {
        self.parts.concat()
    }

    pub fn total_dim(&self) -> u32 {
        self.total
    }

    pub fn is_zero(&self) -> bool {
        self.total == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "mismatched dimension vector shapes");
        Self {
            parts: zip_with(&self.parts, &other.parts, |a, b| a + b),
            edge_parts: zip_with(&self.edge_parts, &other.edge_parts, |a, b| a + b),
            total: self.total + other.total,
        }
    }

    /// Componentwise difference when it stays nonnegative. Edge constraints
    /// are linear equalities, so the difference is again in `T(G)`.
    pub fn try_sub(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.shape(), other.shape(), "mismatched dimension vector shapes");
        let ok = self
            .parts
            .iter()
            .zip(&other.parts)
            .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x >= y));
        ok.then(|| Self {
            parts: zip_with(&self.parts, &other.parts, |a, b| a - b),
            edge_parts: zip_with(&self.edge_parts, &other.edge_parts, |a, b| a - b),
            total: self.total - other.total,
        })
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = |v: &Vec<Vec<u32>>| v.iter().map(|p| p.iter().map(|x| x * c).collect()).collect();
        Self {
            parts: f(&self.parts),
            edge_parts: f(&self.edge_parts),
            total: self.total * c,
        }
    }

    /// Entrywise gcd and all common divisors (trial division up to the gcd).
    /// Returns `None` for the zero vector.
    pub fn gcd_div(&self) -> Option<(u32, Vec<u32>)> {
        let g = self.parts.iter().flatten().fold(0u32, |acc, &x| acc.gcd(&x));
        (g > 0).then(|| (g, (1..=g).filter(|c| g % c == 0).collect()))
    }

    pub fn divide(&self, c: u32) -> Result<Option<Self>, MonoidError> {
        if c == 0 {
            return Err(MonoidError::DivideByZero);
        }
        if self.parts.iter().flatten().any(|x| x % c != 0) {
            return Ok(None);
        }
        let f = |v: &Vec<Vec<u32>>| v.iter().map(|p| p.iter().map(|x| x / c).collect()).collect();
        Ok(Some(Self {
            parts: f(&self.parts),
            edge_parts: f(&self.edge_parts),
            total: self.total / c,
        }))
    }

    /// Apply a per-vertex permutation of simple indices:
    /// `(τ·m)_i(τ_i(γ)) = m_i(γ)`.
    pub fn permuted(&self, g: &GraphOfGroups, perm: &[Vec<usize>]) -> Self {
        let parts = self
            .parts
            .iter()
            .zip(perm)
            .map(|(p, tau)| {
                let mut out = vec![0; p.len()];
                for (gamma, &x) in p.iter().enumerate() {
                    out[tau[gamma]] = x;
                }
                out
            })
            .collect();
        Self::new(g, parts).expect("symmetry maps T(G) to itself")
    }

    fn shape(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }
}

fn zip_with(a: &[Vec<u32>], b: &[Vec<u32>], f: impl Fn(u32, u32) -> u32) -> Vec<Vec<u32>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| f(p, q)).collect())
        .collect()
}

fn weighted(m: &[u32], dims: &[u32]) -> u32 {
    m.iter().zip(dims).map(|(a, b)| a * b).sum()
}

fn dot(a: &[u32], b: &[u32]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| i64::from(x) * i64::from(y)).sum()
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            let inner: Vec<String> = p.iter().map(u32::to_string).collect();
            write!(f, "({})", inner.join(","))?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Euler form `Σ_i m_i·n_i − Σ_j u_j·v_j`.
pub fn euler_form(m: &DimVector, n: &DimVector) -> i64 {
    let v: i64 = m.parts.iter().zip(&n.parts).map(|(a, b)| dot(a, b)).sum();
    let e: i64 = m.edge_parts.iter().zip(&n.edge_parts).map(|(a, b)| dot(a, b)).sum();
    v - e
}

/// Additive integer map congruent to `<m,m>` mod 2, used to define the shift
/// operator without square roots of `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Correction {
    /// `Y(m) = Σ_i Σ_γ m_i(γ) − Σ_j Σ_δ u_j(δ)`.
    #[default]
    Standard,
    /// `Y(m) + 2 Σ_i m_i(0)`; same parity, used to test independence of the
    /// choice.
    Alternate,
}

impl Correction {
    pub fn value(self, m: &DimVector) -> i64 {
        let v: i64 = m.parts.iter().flatten().map(|&x| i64::from(x)).sum();
        let e: i64 = m.edge_parts.iter().flatten().map(|&x| i64::from(x)).sum();
        match self {
            Correction::Standard => v - e,
            Correction::Alternate => v - e + 2 * m.parts.iter().map(|p| i64::from(p[0])).sum::<i64>(),
        }
    }
}

pub fn correction_y(m: &DimVector) -> i64 {
    Correction::Standard.value(m)
}

/// `(<m,m> − Y(m)) / 2`.
pub fn shift_exponent(m: &DimVector, y: Correction) -> Result<i64, MonoidError> {
    let diff = euler_form(m, m) - y.value(m);
    if diff % 2 != 0 {
        return Err(MonoidError::Parity(diff, m.to_string()));
    }
    Ok(diff / 2)
}

/// Linear constraints on the concatenated coordinates of a dimension vector.
struct Constraints {
    /// Edge rows: `Σ_k a_k x_k = 0`.
    rows: Vec<Vec<i64>>,
    offsets: Vec<usize>,
    len: usize,
}

impl Constraints {
    fn new(g: &GraphOfGroups) -> Self {
        let mut offsets = Vec::with_capacity(g.vertices.len());
        let mut len = 0;
        for v in &g.vertices {
            offsets.push(len);
            len += v.num_simples();
        }
        let mut rows = Vec::new();
        for e in &g.edges {
            for delta in 0..e.edge_group.num_simples() {
                let mut row = vec![0i64; len];
                for (gamma, &a) in e.iota.matrix[delta].iter().enumerate() {
                    row[offsets[e.s] + gamma] += a;
                }
                for (gamma, &b) in e.kappa.matrix[delta].iter().enumerate() {
                    row[offsets[e.t] + gamma] -= b;
                }
                if row.iter().any(|&x| x != 0) {
                    rows.push(row);
                }
            }
        }
        Self { rows, offsets, len }
    }

    fn split(&self, flat: &[u32]) -> Vec<Vec<u32>> {
        self.offsets
            .iter()
            .enumerate()
            .map(|(i, &o)| {
                let end = self.offsets.get(i + 1).copied().unwrap_or(self.len);
                flat[o..end].to_vec()
            })
            .collect()
    }
}

/// Depth-first enumeration of `x ∈ Π [0, ub_k]` with `rows[r]·x = rhs[r]`,
/// in ascending lexicographic order. Prunes with suffix min/max bounds.
fn solve_box(rows: &[Vec<i64>], rhs: &[i64], ub: &[u32], mut visit: impl FnMut(&[u32])) {
    let n = ub.len();
    let nr = rows.len();
    // sufmin[r][k], sufmax[r][k]: range of Σ_{k' >= k} rows[r][k'] x_k'.
    let mut sufmin = vec![vec![0i64; n + 1]; nr];
    let mut sufmax = vec![vec![0i64; n + 1]; nr];
    for r in 0..nr {
        for k in (0..n).rev() {
            let v = rows[r][k] * i64::from(ub[k]);
            sufmin[r][k] = sufmin[r][k + 1] + v.min(0);
            sufmax[r][k] = sufmax[r][k + 1] + v.max(0);
        }
    }
    if (0..nr).any(|r| rhs[r] < sufmin[r][0] || rhs[r] > sufmax[r][0]) {
        return;
    }
    let mut x = vec![0u32; n];
    let mut partial = vec![0i64; nr];
    fn rec(
        k: usize,
        x: &mut Vec<u32>,
        partial: &mut Vec<i64>,
        rows: &[Vec<i64>],
        rhs: &[i64],
        ub: &[u32],
        sufmin: &[Vec<i64>],
        sufmax: &[Vec<i64>],
        visit: &mut dyn FnMut(&[u32]),
    ) {
        if k == ub.len() {
            visit(x);
            return;
        }
        for v in 0..=ub[k] {
            let mut ok = true;
            for r in 0..rows.len() {
                let p = partial[r] + rows[r][k] * i64::from(v);
                if rhs[r] < p + sufmin[r][k + 1] || rhs[r] > p + sufmax[r][k + 1] {
                    ok = false;
                    // Rows with a positive coefficient only get further from
                    // feasibility as v grows past the upper end.
                    if rows[r][k] > 0 && rhs[r] < p + sufmin[r][k + 1] {
                        return;
                    }
                    if rows[r][k] < 0 && rhs[r] > p + sufmax[r][k + 1] {
                        return;
                    }
                }
            }
            if !ok {
                continue;
            }
            for r in 0..rows.len() {
                partial[r] += rows[r][k] * i64::from(v);
            }
            x[k] = v;
            rec(k + 1, x, partial, rows, rhs, ub, sufmin, sufmax, visit);
            for r in 0..rows.len() {
                partial[r] -= rows[r][k] * i64::from(v);
            }
        }
        x[k] = 0;
    }
    rec(0, &mut x, &mut partial, rows, rhs, ub, &sufmin, &sufmax, &mut visit);
}

/// `T_d(G)` in ascending lexicographic order.
pub fn enumerate(g: &GraphOfGroups, d: u32) -> Vec<DimVector> {
    let c = Constraints::new(g);
    let mut rows = c.rows.clone();
    let mut rhs = vec![0i64; rows.len()];
    let mut w = vec![0i64; c.len];
    for (gamma, &dim) in g.vertices[0].simple_dims.iter().enumerate() {
        w[gamma] = i64::from(dim);
    }
    rows.insert(0, w);
    rhs.insert(0, i64::from(d));
    let ub: Vec<u32> = g
        .vertices
        .iter()
        .flat_map(|v| v.simple_dims.iter().map(move |&dim| d / dim))
        .collect();
    let mut out = Vec::new();
    solve_box(&rows, &rhs, &ub, |x| {
        out.push(DimVector::new(g, c.split(x)).expect("solver output satisfies constraints"));
    });
    out
}

/// All elements of `T(G)` with `|m| <= max_dim`, ordered by total dimension
/// and then lexicographically, with a lookup table and (lazily) the list of
/// decompositions `m = m1 + m2` into nonzero parts.
pub struct GradedIndex {
    graph: GraphOfGroups,
    max_dim: u32,
    elems: Vec<DimVector>,
    starts: Vec<usize>,
    lookup: HashMap<Vec<u32>, usize>,
    pairs: OnceLock<Pairs>,
}

/// Compressed pair lists: the decompositions of element `i` are
/// `pairs[offsets[i]..offsets[i + 1]]`, ordered by the index of the first
/// summand.
pub struct Pairs {
    pub offsets: Vec<usize>,
    pub pairs: Vec<(u32, u32)>,
}

impl GradedIndex {
    pub fn new(g: &GraphOfGroups, max_dim: u32) -> Self {
        let mut elems = Vec::new();
        let mut starts = Vec::with_capacity(max_dim as usize + 2);
        for d in 0..=max_dim {
            starts.push(elems.len());
            elems.extend(enumerate(g, d));
        }
        starts.push(elems.len());
        let lookup = elems.iter().enumerate().map(|(i, m)| (m.flat(), i)).collect();
        Self {
            graph: g.clone(),
            max_dim,
            elems,
            starts,
            lookup,
            pairs: OnceLock::new(),
        }
    }

    pub fn graph(&self) -> &GraphOfGroups {
        &self.graph
    }

    pub fn max_dim(&self) -> u32 {
        self.max_dim
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[DimVector] {
        &self.elems
    }

    pub fn elem(&self, i: usize) -> &DimVector {
        &self.elems[i]
    }

    /// Index range of the elements of total dimension `d`.
    pub fn range(&self, d: u32) -> std::ops::Range<usize> {
        self.starts[d as usize]..self.starts[d as usize + 1]
    }

    pub fn index_of(&self, m: &DimVector) -> Option<usize> {
        self.lookup.get(&m.flat()).copied()
    }

    pub fn index_of_flat(&self, flat: &[u32]) -> Option<usize> {
        self.lookup.get(flat).copied()
    }

    pub fn pairs(&self) -> &Pairs {
        self.pairs.get_or_init(|| self.build_pairs())
    }

    fn build_pairs(&self) -> Pairs {
        let c = Constraints::new(&self.graph);
        let rhs = vec![0i64; c.rows.len()];
        let mut offsets = Vec::with_capacity(self.elems.len() + 1);
        let mut pairs = Vec::new();
        let mut diff = vec![0u32; c.len];
        for m in &self.elems {
            offsets.push(pairs.len());
            if m.is_zero() {
                continue;
            }
            let full = m.flat();
            let start = pairs.len();
            solve_box(&c.rows, &rhs, &full, |x| {
                if x.iter().all(|&v| v == 0) || x == full.as_slice() {
                    return;
                }
                for k in 0..full.len() {
                    diff[k] = full[k] - x[k];
                }
                let i1 = self.lookup[x] as u32;
                let i2 = self.lookup[&diff] as u32;
                pairs.push((i1, i2));
            });
            pairs[start..].sort_unstable();
        }
        offsets.push(pairs.len());
        Pairs { offsets, pairs }
    }
}

impl Pairs {
    pub fn of(&self, i: usize) -> &[(u32, u32)] {
        &self.pairs[self.offsets[i]..self.offsets[i + 1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryKind {
    TrivialEdges,
    AbelianVertices,
}

/// A finite group acting on `T(G)` by permuting simple modules of vertex
/// groups. Elements are tuples of per-vertex permutations.
#[derive(Debug, Clone)]
pub struct SymmetryGroupDescriptor {
    pub kind: SymmetryKind,
    pub generators: Vec<Vec<Vec<usize>>>,
    /// For `AbelianVertices`: per edge, the blocks `I_δ` of vertex simples
    /// restricting to edge simple `δ`, on the `s` side and on the `t` side.
    pub blocks: Vec<(Vec<Vec<usize>>, Vec<Vec<usize>>)>,
}

const MAX_PERMUTED_SIMPLES: usize = 8;
const MAX_GROUP_ELEMENTS: usize = 200_000;

impl SymmetryGroupDescriptor {
    /// The trivial group.
    pub fn trivial(g: &GraphOfGroups) -> Self {
        Self {
            kind: SymmetryKind::TrivialEdges,
            generators: vec![identity(g)],
            blocks: Vec::new(),
        }
    }

    /// All edge groups trivial: the product over vertices of the symmetric
    /// groups on simples of equal dimension. Generated by adjacent
    /// transpositions within each dimension class.
    pub fn trivial_edges(g: &GraphOfGroups) -> Result<Self, MonoidError> {
        if let Some(j) = g.edges.iter().position(|e| e.edge_group.num_simples() != 1) {
            return Err(MonoidError::NotApplicable(format!("edge {j} has a nontrivial edge group")));
        }
        let id = identity(g);
        let mut generators = vec![id.clone()];
        for (i, v) in g.vertices.iter().enumerate() {
            for a in 0..v.num_simples() {
                let next = (a + 1..v.num_simples()).find(|&b| v.simple_dims[b] == v.simple_dims[a]);
                if let Some(b) = next {
                    let mut el = id.clone();
                    el[i].swap(a, b);
                    generators.push(el);
                }
            }
        }
        Ok(Self {
            kind: SymmetryKind::TrivialEdges,
            generators,
            blocks: Vec::new(),
        })
    }

    /// All vertex groups abelian: tuples of partition-preserving permutations
    /// that induce the same permutation of edge simples from both ends of
    /// every edge.
    pub fn abelian_vertices(g: &GraphOfGroups) -> Result<Self, MonoidError> {
        if let Some(i) = g.vertices.iter().position(|v| !v.is_abelian_split()) {
            return Err(MonoidError::NotApplicable(format!("vertex {i} is not abelian")));
        }
        if let Some(i) = g.vertices.iter().position(|v| v.num_simples() > MAX_PERMUTED_SIMPLES) {
            return Err(MonoidError::NotApplicable(format!(
                "vertex {i} has more than {MAX_PERMUTED_SIMPLES} simples"
            )));
        }
        let blocks: Vec<_> = g
            .edges
            .iter()
            .map(|e| (partition_blocks(&e.iota.matrix), partition_blocks(&e.kappa.matrix)))
            .collect();
        // Candidates per vertex, with the induced edge permutation for every
        // incident (edge, side).
        let mut candidates: Vec<Vec<(Vec<usize>, Vec<Option<Vec<usize>>>)>> = Vec::new();
        for (i, v) in g.vertices.iter().enumerate() {
            let mut list = Vec::new();
            for tau in permutations(v.num_simples()) {
                let mut induced = Vec::new();
                let mut ok = true;
                for (j, e) in g.edges.iter().enumerate() {
                    for (side, vertex) in [(0, e.s), (1, e.t)] {
                        if vertex != i {
                            induced.push(None);
                            continue;
                        }
                        let b = if side == 0 { &blocks[j].0 } else { &blocks[j].1 };
                        match induced_perm(b, &tau) {
                            Some(sigma) => induced.push(Some(sigma)),
                            None => {
                                ok = false;
                                induced.push(None);
                            }
                        }
                    }
                }
                if ok {
                    list.push((tau, induced));
                }
            }
            candidates.push(list);
        }
        let mut generators = Vec::new();
        let mut chosen: Vec<usize> = Vec::new();
        fibre_product(g, &candidates, &mut chosen, &mut generators)?;
        Ok(Self {
            kind: SymmetryKind::AbelianVertices,
            generators,
            blocks,
        })
    }

    /// Whichever construction applies (trivial edges preferred).
    pub fn for_graph(g: &GraphOfGroups) -> Result<Self, MonoidError> {
        Self::trivial_edges(g).or_else(|_| Self::abelian_vertices(g))
    }
}

fn identity(g: &GraphOfGroups) -> Vec<Vec<usize>> {
    g.vertices.iter().map(|v| (0..v.num_simples()).collect()).collect()
}

fn partition_blocks(matrix: &[Vec<i64>]) -> Vec<Vec<usize>> {
    matrix
        .iter()
        .map(|row| row.iter().enumerate().filter(|(_, &x)| x != 0).map(|(k, _)| k).collect())
        .collect()
}

fn induced_perm(blocks: &[Vec<usize>], tau: &[usize]) -> Option<Vec<usize>> {
    let mut sigma = Vec::with_capacity(blocks.len());
    for b in blocks {
        let image: BTreeSet<usize> = b.iter().map(|&k| tau[k]).collect();
        let target = blocks
            .iter()
            .position(|c| c.len() == image.len() && c.iter().all(|k| image.contains(k)))?;
        sigma.push(target);
    }
    Some(sigma)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            let j = if k % 2 == 0 { i } else { 0 };
            cur.swap(j, k - 1);
        }
    }
    heap(n, &mut cur, &mut out);
    out.sort();
    out
}

type Candidate = (Vec<usize>, Vec<Option<Vec<usize>>>);

fn fibre_product(
    g: &GraphOfGroups,
    candidates: &[Vec<Candidate>],
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<Vec<usize>>>,
) -> Result<(), MonoidError> {
    let i = chosen.len();
    if i == candidates.len() {
        if out.len() >= MAX_GROUP_ELEMENTS {
            return Err(MonoidError::NotApplicable("symmetry group too large".into()));
        }
        out.push(chosen.iter().enumerate().map(|(v, &c)| candidates[v][c].0.clone()).collect());
        return Ok(());
    }
    'cand: for c in 0..candidates[i].len() {
        for (j, e) in g.edges.iter().enumerate() {
            // Check each edge once, when its later endpoint is chosen.
            if e.s.max(e.t) != i {
                continue;
            }
            let pick = |v: usize| if v == i { c } else { chosen[v] };
            let a = &candidates[e.s][pick(e.s)].1[2 * j];
            let b = &candidates[e.t][pick(e.t)].1[2 * j + 1];
            if a != b {
                continue 'cand;
            }
        }
        chosen.push(c);
        fibre_product(g, candidates, chosen, out)?;
        chosen.pop();
    }
    Ok(())
}

/// Orbits of `T_d(G)` under the group, each sorted, listed by smallest member.
pub fn symmetry_orbits(
    g: &GraphOfGroups,
    desc: &SymmetryGroupDescriptor,
    d: u32,
) -> Vec<Vec<DimVector>> {
    let elems = enumerate(g, d);
    let index: HashMap<&DimVector, usize> = elems.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut seen = vec![false; elems.len()];
    let mut orbits = Vec::new();
    for start in 0..elems.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(k) = queue.pop_front() {
            for gen in &desc.generators {
                let img = elems[k].permuted(g, gen);
                let t = index[&img];
                if !seen[t] {
                    seen[t] = true;
                    orbit.push(t);
                    queue.push_back(t);
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit.into_iter().map(|k| elems[k].clone()).collect());
    }
    orbits
}
