//! Brute-force point counts over small finite fields.
//!
//! Presentations cover the one- and two-vertex presets whose vertex groups
//! are cyclic. A cyclic vertex `C_n` generated by `x` has its character `i`
//! sending `x` to `ζ_n^i`, with `ζ_n = g^((q-1)/n)` for the least primitive
//! element `g` of `F_q` (see [`Field::zeta`]). Under that convention the
//! restriction to the edge group `C_c = <x^(n/c)>` is the congruence pattern
//! used by the presets.

mod field;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use thiserror::Error;

pub use field::{FFMatrix, Field};

use crate::dimmonoid::{DimVector, MonoidError};
use crate::groupgraph::{GraphError, GraphOfGroups};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("unsupported oracle input: {0}")]
    Unsupported(String),
    #[error("q = {0} is not suitable for this group")]
    UnsuitableField(u64),
    #[error("point count {count} is not divisible by {divisor}")]
    Divisibility { count: u64, divisor: u64 },
    #[error("characteristic polynomial has an irreducible factor over F_{0}")]
    IrreducibleFactor(u64),
    #[error("tuple does not satisfy the relations: {0}")]
    Relations(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// One relation between generator images.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `g^k = 1`
    Power { gen: usize, k: u64 },
    /// `g^k = h^l`
    Equal { lhs: (usize, u64), rhs: (usize, u64) },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Readout {
    /// One trivial vertex; every point has dimension vector `(d)`.
    Free,
    /// Generators 0 and 1 generate the vertex groups `C_a` and `C_b`.
    Amalgam { a: u64, b: u64 },
}

#[derive(Debug, Clone)]
pub struct PresentationData {
    pub generators: usize,
    pub relations: Vec<Relation>,
    readout: Readout,
    graph: GraphOfGroups,
}

impl PresentationData {
    /// Presentation of `dinf`, `gc(c)`, `psl2z`, `sl2z`,
    /// `cyclic_free_product(a,b)`, `cyclic_amalgam(a,c,b)` or `free(a)`.
    pub fn preset(spec: &str) -> Result<Self, OracleError> {
        let head = spec.split('(').next().unwrap_or("").trim();
        let graph = GraphOfGroups::preset(spec)?;
        match head {
            "free" => Ok(Self {
                generators: graph.edges.len(),
                relations: Vec::new(),
                readout: Readout::Free,
                graph,
            }),
            "dinf" | "gc" | "psl2z" | "sl2z" | "cyclic_free_product" | "cyclic_amalgam" => {
                let a = graph.vertices[0].order;
                let b = graph.vertices[1].order;
                let c = graph.edges[0].edge_group.order;
                let mut relations = vec![Relation::Power { gen: 0, k: a }, Relation::Power { gen: 1, k: b }];
                if c > 1 {
                    relations.push(Relation::Equal { lhs: (0, a / c), rhs: (1, b / c) });
                }
                Ok(Self {
                    generators: 2,
                    relations,
                    readout: Readout::Amalgam { a, b },
                    graph,
                })
            }
            _ => Err(OracleError::Unsupported(format!(
                "no presentation for {spec:?}; the oracle covers dinf, gc(c), psl2z, sl2z, \
                 cyclic_free_product(a,b), cyclic_amalgam(a,c,b) and free(a)"
            ))),
        }
    }

    /// The graph of groups the presentation belongs to.
    pub fn graph(&self) -> &GraphOfGroups {
        &self.graph
    }

    pub fn satisfies(&self, f: &Field, tuple: &[FFMatrix]) -> bool {
        tuple.len() == self.generators && self.relations.iter().all(|r| holds(f, r, tuple))
    }
}

fn holds(f: &Field, r: &Relation, tuple: &[FFMatrix]) -> bool {
    match *r {
        Relation::Power { gen, k } => f.mat_pow(&tuple[gen], k) == f.identity(tuple[gen].d as usize),
        Relation::Equal { lhs, rhs } => f.mat_pow(&tuple[lhs.0], lhs.1) == f.mat_pow(&tuple[rhs.0], rhs.1),
    }
}

fn setup(p: &PresentationData, d: usize, q: u64) -> Result<Field, OracleError> {
    if !(1..=2).contains(&d) {
        return Err(OracleError::Unsupported(format!("dimension {d} (supported: 1, 2)")));
    }
    if q > 13 {
        return Err(OracleError::Unsupported(format!("field size {q} (at most 13)")));
    }
    let field = Field::new(q)?;
    if !p.graph.is_suitable_prime_power(q)? {
        return Err(OracleError::UnsuitableField(q));
    }
    Ok(field)
}

/// Candidate images per generator plus join indices for equality relations.
struct Search<'a> {
    p: &'a PresentationData,
    f: &'a Field,
    cands: Vec<Vec<FFMatrix>>,
    /// For generator `j`: `(i, k, index)` where `index` maps a value of the
    /// matching power of `j` to candidate positions, to be looked up at
    /// `tuple[i]^k` with `i < j`.
    joins: Vec<Option<Join>>,
    /// Relations not enforced by the candidate sets or the joins.
    residual: Vec<Relation>,
}

struct Join {
    src: usize,
    k: u64,
    index: HashMap<FFMatrix, Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(p: &'a PresentationData, f: &'a Field, d: usize) -> Self {
        let gl = f.general_linear(d);
        let id = f.identity(d);
        let mut cands = Vec::with_capacity(p.generators);
        for gen in 0..p.generators {
            let mut set = gl.clone();
            for r in &p.relations {
                if let Relation::Power { gen: g, k } = *r {
                    if g == gen {
                        set.retain(|m| f.mat_pow(m, k) == id);
                    }
                }
            }
            cands.push(set);
        }
        let mut joins: Vec<Option<Join>> = (0..p.generators).map(|_| None).collect();
        let mut residual = Vec::new();
        for r in &p.relations {
            let Relation::Equal { lhs, rhs } = *r else { continue };
            let ((src, k), (dst, l)) = if lhs.0 < rhs.0 { (lhs, rhs) } else { (rhs, lhs) };
            if src == dst || joins[dst].is_some() {
                residual.push(*r);
                continue;
            }
            let mut index: HashMap<FFMatrix, Vec<usize>> = HashMap::new();
            for (pos, m) in cands[dst].iter().enumerate() {
                index.entry(f.mat_pow(m, l)).or_default().push(pos);
            }
            joins[dst] = Some(Join { src, k, index });
        }
        Self { p, f, cands, joins, residual }
    }

    fn choices(&self, gen: usize, tuple: &[FFMatrix]) -> Choices<'_> {
        match &self.joins[gen] {
            None => Choices::All(self.cands[gen].len()),
            Some(j) => match j.index.get(&self.f.mat_pow(&tuple[j.src], j.k)) {
                Some(v) => Choices::Some(v),
                None => Choices::Some(&[]),
            },
        }
    }

    fn accept(&self, tuple: &[FFMatrix]) -> bool {
        self.residual.iter().all(|r| holds(self.f, r, tuple))
    }

    /// Folds `leaf` over every relation-satisfying tuple, in parallel over
    /// the first generator's candidates.
    fn fold<A, I, L, M>(&self, init: I, leaf: L, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        L: Fn(&mut A, &[FFMatrix]) + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        if self.p.generators == 0 {
            let mut acc = init();
            leaf(&mut acc, &[]);
            return acc;
        }
        self.cands[0]
            .par_iter()
            .fold(&init, |mut acc, x| {
                let mut tuple = vec![*x];
                self.walk(&mut tuple, &mut acc, &leaf);
                acc
            })
            .reduce(&init, &merge)
    }

    fn walk<A>(&self, tuple: &mut Vec<FFMatrix>, acc: &mut A, leaf: &(impl Fn(&mut A, &[FFMatrix]) + Sync)) {
        let gen = tuple.len();
        if gen == self.p.generators {
            if self.accept(tuple) {
                leaf(acc, tuple);
            }
            return;
        }
        let choices = self.choices(gen, tuple);
        for pos in choices.iter() {
            tuple.push(self.cands[gen][pos]);
            self.walk(tuple, acc, leaf);
            tuple.pop();
        }
    }

    /// Number of tuples, skipping the last level when nothing is left to check.
    fn count(&self) -> u64 {
        let n = self.p.generators;
        if n == 0 {
            return 1;
        }
        if !self.residual.is_empty() {
            return self.fold(|| 0u64, |acc, _| *acc += 1, |a, b| a + b);
        }
        self.cands[0]
            .par_iter()
            .map(|x| {
                let mut tuple = vec![*x];
                self.count_walk(&mut tuple)
            })
            .sum()
    }

    fn count_walk(&self, tuple: &mut Vec<FFMatrix>) -> u64 {
        let gen = tuple.len();
        if gen == self.p.generators {
            return 1;
        }
        let choices = self.choices(gen, tuple);
        if gen + 1 == self.p.generators {
            return choices.len() as u64;
        }
        let mut total = 0;
        for pos in choices.iter() {
            tuple.push(self.cands[gen][pos]);
            total += self.count_walk(tuple);
            tuple.pop();
        }
        total
    }
}

enum Choices<'a> {
    All(usize),
    Some(&'a [usize]),
}

impl Choices<'_> {
    fn len(&self) -> usize {
        match self {
            Choices::All(n) => *n,
            Choices::Some(v) => v.len(),
        }
    }

    fn iter(&self) -> Box<dyn Iterator<Item = usize> + '_> {
        match self {
            Choices::All(n) => Box::new(0..*n),
            Choices::Some(v) => Box::new(v.iter().copied()),
        }
    }
}

/// Number of tuples in `GL_d(F_q)` satisfying the relations.
pub fn count_hom(p: &PresentationData, d: usize, q: u64) -> Result<u64, OracleError> {
    let f = setup(p, d, q)?;
    Ok(Search::new(p, &f, d).count())
}

/// Whether the tuple is absolutely simple: no common eigenvector over `F_q`
/// and a one-dimensional commutant. Every 1-dimensional tuple is.
pub fn is_absolutely_simple(f: &Field, tuple: &[FFMatrix]) -> bool {
    let Some(first) = tuple.first() else {
        return false;
    };
    if first.d == 1 {
        return true;
    }
    // lines of F_q^2: (1, t) and (0, 1)
    let lines = f.elements().map(|t| (1u8, t)).chain(std::iter::once((0, 1)));
    for (v0, v1) in lines {
        let fixed = tuple.iter().all(|m| {
            let w0 = f.add(f.mul(m.e[0], v0), f.mul(m.e[1], v1));
            let w1 = f.add(f.mul(m.e[2], v0), f.mul(m.e[3], v1));
            f.sub(f.mul(w0, v1), f.mul(w1, v0)) == 0
        });
        if fixed {
            return false;
        }
    }
    commutant_dim(f, tuple) == 1
}

/// Dimension of `{X : AX = XA for all A in tuple}` for 2×2 matrices.
pub fn commutant_dim(f: &Field, tuple: &[FFMatrix]) -> usize {
    let mut rows = Vec::with_capacity(4 * tuple.len());
    for a in tuple {
        // column k of the map X -> AX - XA applied to the unit matrix E_k
        let cols: Vec<FFMatrix> = (0..4)
            .map(|k| {
                let mut e = [0u8; 4];
                e[k] = 1;
                let x = FFMatrix { d: 2, e };
                let ax = f.mat_mul(a, &x);
                let xa = f.mat_mul(&x, a);
                FFMatrix { d: 2, e: std::array::from_fn(|i| f.sub(ax.e[i], xa.e[i])) }
            })
            .collect();
        for i in 0..4 {
            rows.push(cols.iter().map(|c| c.e[i]).collect());
        }
    }
    if rows.is_empty() {
        return 4;
    }
    4 - f.rank(rows)
}

/// Number of `PGL_d(F_q)`-orbits of absolutely simple tuples.
pub fn count_absim_orbits(p: &PresentationData, d: usize, q: u64) -> Result<u64, OracleError> {
    let f = setup(p, d, q)?;
    let search = Search::new(p, &f, d);
    let points = search.fold(
        || 0u64,
        |acc, t| {
            if is_absolutely_simple(&f, t) {
                *acc += 1;
            }
        },
        |a, b| a + b,
    );
    // stabilisers of absolutely simple points are the scalars
    let divisor = f.gl_order(d) / (q - 1);
    if points % divisor != 0 {
        return Err(OracleError::Divisibility { count: points, divisor });
    }
    Ok(points / divisor)
}

/// Dimension vector of a relation-satisfying tuple, read off from the
/// eigenvalue multiplicities of the vertex generators.
pub fn dimvector_of_point(p: &PresentationData, tuple: &[FFMatrix], q: u64) -> Result<DimVector, OracleError> {
    let d = tuple.first().map_or(1, |m| m.d as usize);
    let f = setup(p, d, q)?;
    if !p.satisfies(&f, tuple) {
        return Err(OracleError::Relations(format!("{tuple:?}")));
    }
    readout(p, &f, tuple, d)
}

fn readout(p: &PresentationData, f: &Field, tuple: &[FFMatrix], d: usize) -> Result<DimVector, OracleError> {
    let parts = match p.readout {
        Readout::Free => vec![vec![d as u32]],
        Readout::Amalgam { a, b } => vec![multiplicities(f, &tuple[0], a)?, multiplicities(f, &tuple[1], b)?],
    };
    Ok(DimVector::new(&p.graph, parts)?)
}

fn multiplicities(f: &Field, m: &FFMatrix, n: u64) -> Result<Vec<u32>, OracleError> {
    let zeta = f.zeta(n).ok_or(OracleError::UnsuitableField(f.size()))?;
    let powers: Vec<u8> = (0..n).map(|i| f.pow(zeta, i)).collect();
    let mut mult = vec![0u32; n as usize];
    for ev in f.eigenvalues(m).ok_or(OracleError::IrreducibleFactor(f.size()))? {
        let i = powers
            .iter()
            .position(|&z| z == ev)
            .ok_or_else(|| OracleError::Relations(format!("eigenvalue {ev} is not an {n}-th root of unity")))?;
        mult[i] += 1;
    }
    Ok(mult)
}

/// Point counts refined by dimension vector.
pub fn census(p: &PresentationData, d: usize, q: u64) -> Result<BTreeMap<DimVector, u64>, OracleError> {
    let f = setup(p, d, q)?;
    let search = Search::new(p, &f, d);
    type Acc = Result<BTreeMap<DimVector, u64>, OracleError>;
    search.fold(
        || Ok(BTreeMap::new()),
        |acc: &mut Acc, t| {
            if let Ok(map) = acc {
                match readout(p, &f, t, d) {
                    Ok(m) => *map.entry(m).or_insert(0) += 1,
                    Err(e) => *acc = Err(e),
                }
            }
        },
        |a: Acc, b: Acc| {
            let (mut a, b) = (a?, b?);
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples_hom() {
        let dinf = PresentationData::preset("dinf").unwrap();
        assert_eq!(count_hom(&dinf, 1, 5).unwrap(), 4);
        let psl = PresentationData::preset("psl2z").unwrap();
        assert_eq!(count_hom(&psl, 1, 7).unwrap(), 6);
    }

    #[test]
    fn free_group_is_power_of_gl() {
        let f2 = PresentationData::preset("free(2)").unwrap();
        assert_eq!(count_hom(&f2, 2, 3).unwrap(), 48 * 48);
        let f0 = PresentationData::preset("free(0)").unwrap();
        assert_eq!(count_hom(&f0, 2, 5).unwrap(), 1);
        assert_eq!(count_absim_orbits(&f0, 2, 5).unwrap(), 0);
    }

    #[test]
    fn absim_examples() {
        let psl = PresentationData::preset("psl2z").unwrap();
        assert_eq!(count_absim_orbits(&psl, 2, 7).unwrap(), 15);
        let dinf = PresentationData::preset("dinf").unwrap();
        assert_eq!(count_absim_orbits(&dinf, 2, 5).unwrap(), 3);
    }

    #[test]
    fn readout_examples() {
        let psl = PresentationData::preset("psl2z").unwrap();
        let f = Field::new(7).unwrap();
        let omega = f.zeta(3).unwrap();
        let x = FFMatrix::diag(1, 6);
        let y = FFMatrix::diag(1, omega);
        let m = dimvector_of_point(&psl, &[x, y], 7).unwrap();
        assert_eq!(m.to_string(), "((1,1),(1,1,0))");
        let id = FFMatrix::scalar(1, 1);
        let m = dimvector_of_point(&psl, &[id, id], 7).unwrap();
        assert_eq!(m.to_string(), "((1,0),(1,0,0))");
        assert!(dimvector_of_point(&psl, &[x, FFMatrix::diag(3, 3)], 7).is_err());
    }

    #[test]
    fn range_errors() {
        let psl = PresentationData::preset("psl2z").unwrap();
        assert!(matches!(count_hom(&psl, 3, 7), Err(OracleError::Unsupported(_))));
        assert!(matches!(count_hom(&psl, 2, 5), Err(OracleError::UnsuitableField(5))));
        assert!(matches!(count_hom(&psl, 2, 17), Err(OracleError::Unsupported(_))));
        assert!(matches!(PresentationData::preset("gl2z"), Err(OracleError::Unsupported(_))));
    }
}
