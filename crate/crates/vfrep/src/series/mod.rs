//! Truncated graded series over `T(G)` and the counting pipeline
//!
//! `F = S(Σ_m P_m/gl_{|m|} t^m)`, `R^absim = (1−s) Log(S^{-1}(F^{-1}))`,
//! `R^ss = Exp(R^absim)`.
//!
//! Multiplication is always the untwisted monoid-algebra product; the shift
//! `S` multiplies the `m`-coefficient by `s^{(⟨m,m⟩−Y(m))/2}`. `F` is inverted
//! in the untwisted algebra and the inverse shift is applied afterwards.
//!
//! Two engines evaluate the pipeline. [`Engine::Exact`] works with
//! [`GradedSeries`] over normalized rational functions and is practical up to
//! total dimension 5 or 6. [`Engine::Modular`] evaluates the same composition
//! at sample points modulo two 61-bit primes and interpolates; it rejects any
//! result that is not a consistent integer polynomial.

mod modular;
pub mod table;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::dimmonoid::{euler_form, shift_exponent, Correction, DimVector, GradedIndex, MonoidError};
use crate::exactalg::{gl_count, mobius, Poly, RatFunc};
use crate::groupgraph::GraphOfGroups;

pub use table::{epoly_and_euler, CountingTable, EpolyRow, Kind, TableEntry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("coefficient at {m} is not an integer polynomial: {value}")]
    NonPolynomialCoefficient { m: String, value: String },
    #[error("pipeline integrity check failed: {0}")]
    Integrity(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("series over different graphs or truncations")]
    GraphMismatch,
    #[error(transparent)]
    Monoid(#[from] MonoidError),
}

/// Truncated series `Σ_{|m| <= D} f_m t^m` with rational-function
/// coefficients, stored densely in the order of its [`GradedIndex`].
#[derive(Clone)]
pub struct GradedSeries {
    index: Arc<GradedIndex>,
    coeffs: Vec<RatFunc>,
}

impl PartialEq for GradedSeries {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.index, &other.index) || self.index.elems() == other.index.elems())
            && self.coeffs == other.coeffs
    }
}

impl std::fmt::Debug for GradedSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.iter().map(|(m, c)| (m.to_string(), c.to_string()))).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plethystic {
    Exp,
    Log,
}

impl GradedSeries {
    pub fn zero(index: Arc<GradedIndex>) -> Self {
        let n = index.len();
        Self {
            index,
            coeffs: vec![RatFunc::zero(); n],
        }
    }

    pub fn one(index: Arc<GradedIndex>) -> Self {
        let mut s = Self::zero(index);
        s.coeffs[0] = RatFunc::one();
        s
    }

    /// Builds a series from a coefficient function on the index.
    pub fn from_fn(index: Arc<GradedIndex>, mut f: impl FnMut(&DimVector) -> RatFunc) -> Self {
        let coeffs = index.elems().iter().map(&mut f).collect();
        Self { index, coeffs }
    }

    pub fn index(&self) -> &Arc<GradedIndex> {
        &self.index
    }

    pub fn max_dim(&self) -> u32 {
        self.index.max_dim()
    }

    /// Coefficient at `m`; zero outside the truncation.
    pub fn get(&self, m: &DimVector) -> RatFunc {
        self.index
            .index_of(m)
            .map_or_else(RatFunc::zero, |i| self.coeffs[i].clone())
    }

    pub fn coeff_at(&self, i: usize) -> &RatFunc {
        &self.coeffs[i]
    }

    pub fn set(&mut self, m: &DimVector, c: RatFunc) {
        let i = self.index.index_of(m).expect("key within truncation");
        self.coeffs[i] = c;
    }

    /// Nonzero coefficients in index order.
    pub fn iter(&self) -> impl Iterator<Item = (&DimVector, &RatFunc)> {
        self.index
            .elems()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
    }

    fn check_same(&self, other: &Self) -> Result<(), PipelineError> {
        if Arc::ptr_eq(&self.index, &other.index)
            || (self.index.graph() == other.index.graph() && self.max_dim() == other.max_dim())
        {
            Ok(())
        } else {
            Err(PipelineError::GraphMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PipelineError> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PipelineError> {
        self.check_same(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &Self, f: impl Fn(&RatFunc, &RatFunc) -> RatFunc) -> Self {
        Self {
            index: self.index.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Multiply every coefficient by a scalar of the coefficient field.
    pub fn scale(&self, c: &RatFunc) -> Self {
        self.map(|_, x| x * c)
    }

    fn map(&self, mut f: impl FnMut(&DimVector, &RatFunc) -> RatFunc) -> Self {
        Self {
            index: self.index.clone(),
            coeffs: self
                .index
                .elems()
                .iter()
                .zip(&self.coeffs)
                .map(|(m, c)| if c.is_zero() { RatFunc::zero() } else { f(m, c) })
                .collect(),
        }
    }

    /// Untwisted product, truncated at `D`.
    pub fn mul(&self, other: &Self) -> Result<Self, PipelineError> {
        self.check_same(other)?;
        let pairs = self.index.pairs();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for i in 0..self.coeffs.len() {
            let mut acc = if i == 0 {
                &self.coeffs[0] * &other.coeffs[0]
            } else {
                &(&self.coeffs[0] * &other.coeffs[i]) + &(&self.coeffs[i] * &other.coeffs[0])
            };
            for &(a, b) in pairs.of(i) {
                let (x, y) = (&self.coeffs[a as usize], &other.coeffs[b as usize]);
                if !x.is_zero() && !y.is_zero() {
                    acc = &acc + &(x * y);
                }
            }
            out.push(acc);
        }
        Ok(Self {
            index: self.index.clone(),
            coeffs: out,
        })
    }

    /// Multiplicative inverse, degree by degree.
    pub fn invert(&self) -> Result<Self, PipelineError> {
        let c0 = &self.coeffs[0];
        let inv0 = c0
            .inv()
            .map_err(|_| PipelineError::Precondition("constant term is zero".into()))?;
        let pairs = self.index.pairs();
        let mut g = vec![RatFunc::zero(); self.coeffs.len()];
        g[0] = inv0.clone();
        for i in 1..self.coeffs.len() {
            let mut acc = &self.coeffs[i] * &g[0];
            for &(a, b) in pairs.of(i) {
                let (x, y) = (&self.coeffs[a as usize], &g[b as usize]);
                if !x.is_zero() && !y.is_zero() {
                    acc = &acc + &(x * y);
                }
            }
            g[i] = -&(&acc * &inv0);
        }
        Ok(Self {
            index: self.index.clone(),
            coeffs: g,
        })
    }

    /// `S` (forward) or `S^{-1}` (inverse) with the given correction form.
    pub fn shift(&self, dir: ShiftDirection, y: Correction) -> Result<Self, PipelineError> {
        let mut err = None;
        let out = self.map(|m, c| match shift_exponent(m, y) {
            Ok(e) => {
                let e = if dir == ShiftDirection::Forward { e } else { -e };
                c * &RatFunc::s_pow(e)
            }
            Err(e) => {
                err = Some(e);
                RatFunc::zero()
            }
        });
        match err {
            Some(e) => Err(e.into()),
            None => Ok(out),
        }
    }

    /// Adams operation `ψ_β`: `f_m(s) t^m -> f_m(s^β) t^{βm}`, dropping keys
    /// beyond the truncation.
    pub fn adams(&self, beta: u32) -> Self {
        let mut out = Self::zero(self.index.clone());
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = self.index.elem(i);
            if m.total_dim() * beta > self.max_dim() {
                continue;
            }
            let j = self.index.index_of(&m.scale(beta)).expect("multiple within truncation");
            out.coeffs[j] = c.adams(beta as usize);
        }
        out
    }

    /// `log(f) = Σ_{β>=1} (−1)^{β+1} h^β / β` with `h = f − 1`; needs `f_0 = 1`.
    pub fn log(&self) -> Result<Self, PipelineError> {
        if !self.coeffs[0].is_one() {
            return Err(PipelineError::Precondition("log needs constant term 1".into()));
        }
        let mut h = self.clone();
        h.coeffs[0] = RatFunc::zero();
        let mut power = h.clone();
        let mut acc = h.clone();
        for beta in 2..=self.max_dim() {
            power = power.mul(&h)?;
            let sign = if beta % 2 == 0 { -1 } else { 1 };
            let c = RatFunc::from_poly(Poly::constant(BigRational::new(sign.into(), beta.into())));
            acc = acc.add(&power.scale(&c))?;
        }
        Ok(acc)
    }

    /// `exp(h) = Σ_k h^k / k!`; needs `h_0 = 0`.
    pub fn exp(&self) -> Result<Self, PipelineError> {
        if !self.coeffs[0].is_zero() {
            return Err(PipelineError::Precondition("exp needs constant term 0".into()));
        }
        let mut acc = Self::one(self.index.clone());
        let mut term = Self::one(self.index.clone());
        for k in 1..=self.max_dim() {
            let c = RatFunc::from_poly(Poly::constant(BigRational::new(BigInt::one(), k.into())));
            term = term.mul(self)?.scale(&c);
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// `Ψ(f) = Σ_β ψ_β(f)/β`.
    pub fn psi(&self) -> Self {
        self.adams_sum(|beta| BigRational::new(BigInt::one(), beta.into()))
    }

    /// `Ψ^{-1}(f) = Σ_β μ(β) ψ_β(f)/β`.
    pub fn psi_inverse(&self) -> Self {
        self.adams_sum(|beta| BigRational::new(mobius(beta as u64).into(), beta.into()))
    }

    fn adams_sum(&self, weight: impl Fn(u32) -> BigRational) -> Self {
        let mut acc = Self::zero(self.index.clone());
        for beta in 1..=self.max_dim().max(1) {
            let w = weight(beta);
            if w.is_zero() {
                continue;
            }
            let term = self.adams(beta).scale(&RatFunc::from_poly(Poly::constant(w)));
            acc = acc.zip(&term, |a, b| a + b);
        }
        acc
    }

    /// Plethystic `Exp = exp ∘ Ψ` or `Log = Ψ^{-1} ∘ log`.
    pub fn plethystic(&self, dir: Plethystic) -> Result<Self, PipelineError> {
        match dir {
            Plethystic::Exp => self.psi().exp(),
            Plethystic::Log => Ok(self.log()?.psi_inverse()),
        }
    }
}

/// `Π_j Π_δ gl_{u_j(δ)} / Π_i Π_γ gl_{m_i(γ)}`, i.e. `P_m^G / gl_{|m|}`.
pub fn p_over_gl(m: &DimVector) -> RatFunc {
    let mut num = Poly::one();
    for u in m.edge_parts().iter().flatten() {
        num = &num * &gl_count(*u as usize);
    }
    let mut den = Poly::one();
    for x in m.parts().iter().flatten() {
        den = &den * &gl_count(*x as usize);
    }
    RatFunc::new(num, den).expect("gl counts are nonzero")
}

/// Counting polynomial `P_m^G` of the representation space component `m`:
/// the iterated amalgam/HNN product of the vertex-level counts
/// `gl_{|m|} / Π_γ gl_{m(γ)}`, which collapses to
/// `gl_{|m|} · Π_j Π_δ gl_{u_j(δ)} / Π_i Π_γ gl_{m_i(γ)}`.
pub fn rep_space_count(m: &DimVector) -> Poly {
    let f = &p_over_gl(m) * &RatFunc::from_poly(gl_count(m.total_dim() as usize));
    f.as_poly()
        .cloned()
        .expect("representation space counts are polynomials")
}

/// `F = S(Σ_m P_m/gl_{|m|} t^m)`.
pub fn build_f(index: Arc<GradedIndex>, y: Correction) -> Result<GradedSeries, PipelineError> {
    GradedSeries::from_fn(index, p_over_gl).shift(ShiftDirection::Forward, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Rational-function series arithmetic.
    Exact,
    /// Evaluation at sample points modulo two primes, then interpolation.
    #[default]
    Modular,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub engine: Engine,
    pub correction: Correction,
}

impl Options {
    pub fn exact() -> Self {
        Self {
            engine: Engine::Exact,
            ..Self::default()
        }
    }
}

/// Per-dimension-vector `R^absim` and `R^ss` for all `|m| <= D`, in index
/// order. Entry 0 is the zero vector (`R^absim_0 = 0`, `R^ss_0 = 1`).
#[derive(Clone)]
pub struct Counts {
    pub index: Arc<GradedIndex>,
    pub absim: Vec<Poly>,
    pub ss: Vec<Poly>,
}

impl Counts {
    /// `Σ_{|m| = d} C_m`.
    pub fn total(&self, kind: Kind, d: u32) -> Poly {
        let v = match kind {
            Kind::Absim => &self.absim,
            Kind::Ss => &self.ss,
            Kind::Sim => return self.sim_total(d),
        };
        self.index.range(d).fold(Poly::zero(), |acc, i| &acc + &v[i])
    }

    fn sim_total(&self, d: u32) -> Poly {
        self.index
            .range(d)
            .fold(Poly::zero(), |acc, i| &acc + &self.sim(i).1)
    }

    pub fn absim_of(&self, m: &DimVector) -> Option<&Poly> {
        self.index.index_of(m).map(|i| &self.absim[i])
    }

    pub fn ss_of(&self, m: &DimVector) -> Option<&Poly> {
        self.index.index_of(m).map(|i| &self.ss[i])
    }

    /// `R^sim_{m,c} = (1/c) Σ_{γ|c} μ(γ) R^absim_{m/c}(s^{c/γ})` for every
    /// `c | m`, and their sum `R^sim_m`.
    pub fn sim(&self, i: usize) -> (Vec<(u32, Poly)>, Poly) {
        let m = self.index.elem(i);
        let Some((_, divs)) = m.gcd_div() else {
            return (Vec::new(), Poly::zero());
        };
        let mut parts = Vec::new();
        let mut total = Poly::zero();
        for c in divs {
            let base = m.divide(c).expect("c > 0").expect("c divides m");
            let r = &self.absim[self.index.index_of(&base).expect("within truncation")];
            let v = sim_part(r, c);
            total = &total + &v;
            parts.push((c, v));
        }
        (parts, total)
    }
}

/// `(1/c) Σ_{γ|c} μ(γ) r(s^{c/γ})`.
pub fn sim_part(r: &Poly, c: u32) -> Poly {
    let mut acc = Poly::zero();
    for gamma in (1..=c).filter(|g| c % g == 0) {
        let mu = mobius(gamma as u64);
        if mu != 0 {
            acc = &acc + &r.adams((c / gamma) as usize).scale(&BigRational::from_integer(mu.into()));
        }
    }
    acc.scale(&BigRational::new(BigInt::one(), c.into()))
}

/// Runs the full pipeline up to total dimension `max_dim`.
pub fn compute_counts(g: &GraphOfGroups, max_dim: u32, opts: &Options) -> Result<Counts, PipelineError> {
    let index = Arc::new(GradedIndex::new(g, max_dim));
    compute_counts_on(index, opts)
}

pub fn compute_counts_on(index: Arc<GradedIndex>, opts: &Options) -> Result<Counts, PipelineError> {
    match opts.engine {
        Engine::Exact => exact_counts(index, opts.correction),
        Engine::Modular => modular::counts(index, opts.correction),
    }
}

fn exact_counts(index: Arc<GradedIndex>, y: Correction) -> Result<Counts, PipelineError> {
    let absim_series = exact_absim_series(index.clone(), y)?;
    let absim = to_integer_polys(&absim_series)?;
    let ss_series = absim_series.plethystic(Plethystic::Exp)?;
    let ss = to_integer_polys(&ss_series)?;
    Ok(Counts { index, absim, ss })
}

/// `(1−s) Log(S^{-1}(F^{-1}))` over rational functions.
pub fn exact_absim_series(index: Arc<GradedIndex>, y: Correction) -> Result<GradedSeries, PipelineError> {
    let f = build_f(index, y)?;
    let h = f.invert()?.shift(ShiftDirection::Inverse, y)?;
    let l = h.plethystic(Plethystic::Log)?;
    Ok(l.scale(&RatFunc::from_poly(Poly::from_ints(&[1, -1]))))
}

fn to_integer_polys(s: &GradedSeries) -> Result<Vec<Poly>, PipelineError> {
    s.index
        .elems()
        .iter()
        .zip(&s.coeffs)
        .map(|(m, c)| {
            c.is_integer_poly()
                .ok_or_else(|| PipelineError::NonPolynomialCoefficient {
                    m: m.to_string(),
                    value: c.to_string(),
                })
        })
        .collect()
}

/// Per-vector `R^absim` for `|m| <= max_dim` with default options.
pub fn compute_absim(g: &GraphOfGroups, max_dim: u32) -> Result<Vec<(DimVector, Poly)>, PipelineError> {
    let c = compute_counts(g, max_dim, &Options::default())?;
    Ok(c.index.elems().iter().cloned().zip(c.absim).skip(1).collect())
}

/// Per-vector `R^ss` for `1 <= |m| <= max_dim` with default options.
pub fn compute_ss(g: &GraphOfGroups, max_dim: u32) -> Result<Vec<(DimVector, Poly)>, PipelineError> {
    let c = compute_counts(g, max_dim, &Options::default())?;
    Ok(c.index.elems().iter().cloned().zip(c.ss).skip(1).collect())
}

/// Degree predicted for nonzero counting polynomials at `m`: `1 − ⟨m,m⟩`.
pub fn expected_degree(m: &DimVector) -> i64 {
    1 - euler_form(m, m)
}
