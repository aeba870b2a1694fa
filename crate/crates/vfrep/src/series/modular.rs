//! Evaluation/interpolation engine.
//!
//! Every coefficient of every series in the pipeline is a rational function
//! of `s`, so the whole composition can be evaluated at a point `s = x` over
//! `F_p`: products become scalar convolutions over the pair lists. The Adams
//! operations need the values of the logarithm at `x^β`; those come from
//! rerunning the truncated pipeline (up to `D/β`) at the points `x^β`.
//!
//! The final coefficients of `R^absim` and `R^ss` are interpolated from `K`
//! points per prime. `K` exceeds the largest degree allowed (the predicted
//! degree `1 − ⟨m,m⟩` plus a margin) by [`CHECK_POINTS`]; the surplus
//! coefficients must vanish. Results from the two primes are combined by CRT
//! and lifted to the symmetric range; anything outside a plausibility bound
//! is rejected.

use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::{Counts, PipelineError};
use crate::dimmonoid::{euler_form, shift_exponent, Correction, GradedIndex};
use crate::exactalg::{mobius, Poly};

const PRIMES: [u64; 2] = [(1 << 61) - 1, (1 << 61) - 31];
const DEGREE_MARGIN: usize = 2;
const CHECK_POINTS: usize = 3;
/// Products are below 2^122, so 32 of them fit in a u128 accumulator.
const REDUCE_EVERY: usize = 32;
const LIFT_BOUND_BITS: u64 = 100;

#[derive(Clone, Copy)]
struct Field {
    p: u64,
}

impl Field {
    fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn reduce(self, a: u128) -> u64 {
        (a % self.p as u128) as u64
    }

    fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    fn inv(self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    /// `a^e` for a possibly negative exponent.
    fn ipow(self, a: u64, e: i64) -> u64 {
        let r = self.pow(a, e.unsigned_abs());
        if e < 0 {
            self.inv(r)
        } else {
            r
        }
    }

    fn from_i64(self, a: i64) -> u64 {
        let r = a.rem_euclid(self.p as i64);
        r as u64
    }
}

/// Static per-run data shared by both primes.
struct Plan {
    index: Arc<GradedIndex>,
    k: usize,
    cap: usize,
    points: Vec<u64>,
    exps: Vec<i64>,
    /// For each element, `(γ, index of m/γ)` for every `γ | gcd(m)`.
    divisors: Vec<Vec<(u32, usize)>>,
}

/// Upper bound for every absim and ss degree. A nonzero `R^absim_n` has
/// degree at most `e(n) = 1 - <n,n>` and needs `e(n) >= 0`; the degree of
/// `R^ss_m` is at most the best sum of `e` over decompositions of `m`.
fn degree_bound(index: &GradedIndex) -> i64 {
    let pairs = index.pairs();
    let mut ub = vec![i64::MIN; index.len()];
    let mut best = 0;
    for i in 1..index.len() {
        let m = index.elem(i);
        let e = 1 - euler_form(m, m);
        let mut b = if e >= 0 { e } else { i64::MIN };
        for &(l, r) in &pairs.pairs[pairs.offsets[i]..pairs.offsets[i + 1]] {
            let (l, r) = (ub[l as usize], ub[r as usize]);
            if l != i64::MIN && r != i64::MIN {
                b = b.max(l + r);
            }
        }
        ub[i] = b;
        best = best.max(b);
    }
    best
}

pub(super) fn counts(index: Arc<GradedIndex>, y: Correction) -> Result<Counts, PipelineError> {
    let n = index.len();
    let mut exps = Vec::with_capacity(n);
    for m in index.elems() {
        exps.push(shift_exponent(m, y)?);
    }
    let cap = degree_bound(&index).max(0) as usize + DEGREE_MARGIN;
    let k = cap + 1 + CHECK_POINTS;
    let divisors = index
        .elems()
        .iter()
        .map(|m| match m.gcd_div() {
            None => Vec::new(),
            Some((_, divs)) => divs
                .into_iter()
                .map(|c| {
                    let q = m.divide(c).expect("c > 0").expect("divides");
                    (c, index.index_of(&q).expect("quotient within truncation"))
                })
                .collect(),
        })
        .collect();
    let d = index.max_dim() as u64;
    let points = choose_points(k, d.max(1) * d.max(1));
    let plan = Plan {
        index: index.clone(),
        k,
        cap,
        points,
        exps,
        divisors,
    };
    let residues: Vec<(Vec<Vec<u64>>, Vec<Vec<u64>>)> = PRIMES
        .iter()
        .map(|&p| run_prime(&plan, Field { p }))
        .collect::<Result<_, _>>()?;
    let lift = |which: usize, label: &str| -> Result<Vec<Poly>, PipelineError> {
        (0..n)
            .map(|i| {
                let per_prime: Vec<&Vec<u64>> = residues
                    .iter()
                    .map(|r| if which == 0 { &r.0[i] } else { &r.1[i] })
                    .collect();
                crt_poly(&per_prime).ok_or_else(|| PipelineError::NonPolynomialCoefficient {
                    m: index.elem(i).to_string(),
                    value: format!("{label} coefficients do not lift to small integers"),
                })
            })
            .collect()
    };
    let absim = lift(0, "absim")?;
    let ss = lift(1, "ss")?;
    Ok(Counts { index, absim, ss })
}

/// `k` small integers `x >= 2` such that no `x^n` with `n <= order_bound` is
/// 1 modulo either prime.
fn choose_points(k: usize, order_bound: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut x = 2u64;
    while out.len() < k {
        let ok = PRIMES.iter().all(|&p| {
            let f = Field { p };
            let mut acc = 1;
            (1..=order_bound).all(|_| {
                acc = f.mul(acc, x);
                acc != 1
            })
        });
        if ok {
            out.push(x);
        }
        x += 1;
    }
    out
}

/// Values of `R^absim` and `R^ss` interpolated modulo `f.p`, as coefficient
/// vectors (length `cap + 1`) per element.
#[allow(clippy::type_complexity)]
fn run_prime(plan: &Plan, f: Field) -> Result<(Vec<Vec<u64>>, Vec<Vec<u64>>), PipelineError> {
    let index = &plan.index;
    let d = index.max_dim();
    let k = plan.k;
    // log_levels[β-1]: values of the logarithm L at the points x^β for the
    // elements with |m| <= D/β.
    let mut log_levels: Vec<Vec<u64>> = Vec::with_capacity(d as usize);
    for beta in 1..=d.max(1) {
        let pts: Vec<u64> = plan.points.iter().map(|&x| f.pow(x, beta as u64)).collect();
        log_levels.push(log_at(plan, f, d / beta, &pts));
    }
    let level_len = |beta: u32| index.range(d / beta).end;
    // R^absim at level β: (1 − x^β) Σ_{γ|m} μ(γ)/γ L^{(βγ)}_{m/γ}.
    let mut absim_levels: Vec<Vec<u64>> = Vec::with_capacity(d as usize);
    for beta in 1..=d.max(1) {
        let n = level_len(beta);
        let one_minus: Vec<u64> = plan.points.iter().map(|&x| f.sub(1, f.pow(x, beta as u64))).collect();
        let mut vals = vec![0u64; n * k];
        for i in 1..n {
            for &(gamma, q) in &plan.divisors[i] {
                let mu = mobius(gamma as u64);
                if mu == 0 {
                    continue;
                }
                let w = f.mul(f.from_i64(mu as i64), f.inv(gamma as u64));
                let src = &log_levels[(beta * gamma - 1) as usize];
                for t in 0..k {
                    let v = f.mul(w, src[q * k + t]);
                    vals[i * k + t] = f.add(vals[i * k + t], v);
                }
            }
            for t in 0..k {
                vals[i * k + t] = f.mul(vals[i * k + t], one_minus[t]);
            }
        }
        absim_levels.push(vals);
    }
    // B = Ψ(R^absim) at level 1, then R^ss = exp(B).
    let n = index.len();
    let mut b = vec![0u64; n * k];
    for i in 1..n {
        for &(beta, q) in &plan.divisors[i] {
            let w = f.inv(beta as u64);
            let src = &absim_levels[(beta - 1) as usize];
            for t in 0..k {
                let v = f.mul(w, src[q * k + t]);
                b[i * k + t] = f.add(b[i * k + t], v);
            }
        }
    }
    let ss_vals = exp_at(plan, f, &b);
    let absim_vals = &absim_levels[0];
    let newton = Newton::new(f, &plan.points);
    let interp = |vals: &[u64], label: &str| -> Result<Vec<Vec<u64>>, PipelineError> {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let c = newton.interpolate(&vals[i * k..(i + 1) * k]);
                if c[plan.cap + 1..].iter().any(|&x| x != 0) {
                    return Err(PipelineError::NonPolynomialCoefficient {
                        m: index.elem(i).to_string(),
                        value: format!("{label} values are not a polynomial of degree <= {}", plan.cap),
                    });
                }
                Ok(c[..=plan.cap].to_vec())
            })
            .collect()
    };
    Ok((interp(absim_vals, "absim")?, interp(&ss_vals, "ss")?))
}

/// Logarithm of `S^{-1}(F^{-1})` at the given points, for elements with
/// `|m| <= dmax`, via `|m| L_m = |m| H_m − Σ |m1| L_{m1} H_{m2}`.
fn log_at(plan: &Plan, f: Field, dmax: u32, pts: &[u64]) -> Vec<u64> {
    let index = &plan.index;
    let k = plan.k;
    let n = index.range(dmax).end;
    // gl_j(y) for j <= dmax and their inverses.
    let mut gl = vec![vec![1u64; k]; dmax as usize + 1];
    for j in 1..=dmax as usize {
        for t in 0..k {
            let y = pts[t];
            let yj = f.pow(y, j as u64);
            let mut acc = 1;
            for i in 0..j {
                acc = f.mul(acc, f.sub(yj, f.pow(y, i as u64)));
            }
            gl[j][t] = acc;
        }
    }
    let gl_inv: Vec<Vec<u64>> = gl.iter().map(|r| r.iter().map(|&v| f.inv(v)).collect()).collect();
    let pairs = index.pairs();
    // F values.
    let mut fv = vec![0u64; n * k];
    for i in 0..n {
        let m = index.elem(i);
        for t in 0..k {
            let mut v = f.ipow(pts[t], plan.exps[i]);
            for &u in m.edge_parts().iter().flatten() {
                v = f.mul(v, gl[u as usize][t]);
            }
            for &x in m.parts().iter().flatten() {
                v = f.mul(v, gl_inv[x as usize][t]);
            }
            fv[i * k + t] = v;
        }
    }
    // G = F^{-1}; F_0 = 1.
    let mut gv = vec![0u64; n * k];
    gv[..k].fill(1);
    for d in 1..=dmax {
        let r = index.range(d);
        let (done, rest) = gv.split_at_mut(r.start * k);
        rest[..r.len() * k]
            .par_chunks_mut(k)
            .enumerate()
            .for_each(|(off, out)| {
                let i = r.start + off;
                let acc = convolve(f, k, pairs.of(i), &fv, done);
                for t in 0..k {
                    out[t] = f.sub(0, f.add(fv[i * k + t], acc[t]));
                }
            });
    }
    // H = S^{-1}(G).
    for i in 0..n {
        for t in 0..k {
            let s = f.ipow(pts[t], -plan.exps[i]);
            gv[i * k + t] = f.mul(gv[i * k + t], s);
        }
    }
    let hv = gv;
    // dl holds |m| L_m.
    let mut dl = vec![0u64; n * k];
    for d in 1..=dmax {
        let r = index.range(d);
        let dm = d as u64;
        let (done, rest) = dl.split_at_mut(r.start * k);
        rest[..r.len() * k]
            .par_chunks_mut(k)
            .enumerate()
            .for_each(|(off, out)| {
                let i = r.start + off;
                let acc = convolve(f, k, pairs.of(i), done, &hv);
                for t in 0..k {
                    out[t] = f.sub(f.mul(dm, hv[i * k + t]), acc[t]);
                }
            });
    }
    for d in 1..=dmax {
        let inv = f.inv(d as u64);
        for v in &mut dl[index.range(d).start * k..index.range(d).end * k] {
            *v = f.mul(*v, inv);
        }
    }
    dl
}

/// `exp(B)` at level 1 via `|m| E_m = Σ_{0 < m2 <= m} |m2| B_{m2} E_{m−m2}`.
fn exp_at(plan: &Plan, f: Field, b: &[u64]) -> Vec<u64> {
    let index = &plan.index;
    let k = plan.k;
    let n = index.len();
    let pairs = index.pairs();
    let mut db = vec![0u64; n * k];
    for d in 1..=index.max_dim() {
        for i in index.range(d) {
            for t in 0..k {
                db[i * k + t] = f.mul(d as u64, b[i * k + t]);
            }
        }
    }
    let mut ev = vec![0u64; n * k];
    ev[..k].fill(1);
    for d in 1..=index.max_dim() {
        let r = index.range(d);
        let inv = f.inv(d as u64);
        let (done, rest) = ev.split_at_mut(r.start * k);
        rest[..r.len() * k]
            .par_chunks_mut(k)
            .enumerate()
            .for_each(|(off, out)| {
                let i = r.start + off;
                let acc = convolve(f, k, pairs.of(i), done, &db);
                for t in 0..k {
                    out[t] = f.mul(inv, f.add(db[i * k + t], acc[t]));
                }
            });
    }
    ev
}

/// `Σ_{(a,b)} x[a] y[b]` pointwise; every `a` indexes into `x` and every `b`
/// into `y`.
fn convolve(f: Field, k: usize, pairs: &[(u32, u32)], x: &[u64], y: &[u64]) -> Vec<u64> {
    let mut acc = vec![0u128; k];
    let mut out = vec![0u64; k];
    for chunk in pairs.chunks(REDUCE_EVERY) {
        for &(a, b) in chunk {
            let xa = &x[a as usize * k..a as usize * k + k];
            let yb = &y[b as usize * k..b as usize * k + k];
            for t in 0..k {
                acc[t] += xa[t] as u128 * yb[t] as u128;
            }
        }
        for t in 0..k {
            out[t] = f.add(out[t], f.reduce(acc[t]));
            acc[t] = 0;
        }
    }
    out
}

/// Interpolation through fixed nodes with precomputed inverse differences.
struct Newton {
    f: Field,
    xs: Vec<u64>,
    /// `inv_diff[j][i] = 1 / (xs[i] − xs[i − j])`.
    inv_diff: Vec<Vec<u64>>,
}

impl Newton {
    fn new(f: Field, xs: &[u64]) -> Self {
        let n = xs.len();
        let inv_diff = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| if j == 0 || i < j { 0 } else { f.inv(f.sub(xs[i], xs[i - j])) })
                    .collect()
            })
            .collect();
        Self {
            f,
            xs: xs.to_vec(),
            inv_diff,
        }
    }

    /// Coefficients (low degree first) of the polynomial of degree
    /// `< xs.len()` through `(xs[t], ys[t])`.
    fn interpolate(&self, ys: &[u64]) -> Vec<u64> {
        let f = self.f;
        let n = self.xs.len();
        let mut c = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                c[i] = f.mul(f.sub(c[i], c[i - 1]), self.inv_diff[j][i]);
            }
        }
        // Horner expansion of the Newton form: poly = poly * (s − xs[i]) + c[i].
        let mut poly = vec![0u64; n];
        for i in (0..n).rev() {
            for d in (0..n).rev() {
                let shifted = if d > 0 { poly[d - 1] } else { 0 };
                poly[d] = f.sub(shifted, f.mul(poly[d], self.xs[i]));
            }
            poly[0] = f.add(poly[0], c[i]);
        }
        poly
    }
}

/// Chinese remaindering of per-prime coefficient vectors into integers in
/// the symmetric range, rejecting values beyond the plausibility bound.
fn crt_poly(per_prime: &[&Vec<u64>]) -> Option<Poly> {
    let (p1, p2) = (PRIMES[0] as u128, PRIMES[1] as u128);
    let f2 = Field { p: PRIMES[1] };
    let p1_inv = f2.inv(PRIMES[0] % PRIMES[1]) as u128;
    let modulus = p1 * p2;
    let bound = 1u128 << LIFT_BOUND_BITS;
    let mut coeffs = Vec::with_capacity(per_prime[0].len());
    for (&a1, &a2) in per_prime[0].iter().zip(per_prime[1]) {
        let a1m2 = a1 as u128 % p2;
        let diff = (a2 as u128 + p2 - a1m2) % p2;
        let h = (diff * p1_inv) % p2;
        let c = a1 as u128 + p1 * h;
        let v: BigInt = if c > modulus / 2 {
            let mag = modulus - c;
            if mag > bound {
                return None;
            }
            -BigInt::from(mag)
        } else {
            if c > bound {
                return None;
            }
            BigInt::from(c)
        };
        coeffs.push(v);
    }
    Some(Poly::from_bigints(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_recovers_polynomial() {
        let f = Field { p: PRIMES[0] };
        let coeffs = [f.from_i64(-23), 35, f.from_i64(-27), 14, 3, f.from_i64(-10), 3, 1];
        let xs: Vec<u64> = (2..14).collect();
        let ys: Vec<u64> = xs
            .iter()
            .map(|&x| coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c)))
            .collect();
        let c = Newton::new(f, &xs).interpolate(&ys);
        assert_eq!(&c[..8], &coeffs);
        assert!(c[8..].iter().all(|&x| x == 0));
    }

    #[test]
    fn crt_symmetric_lift() {
        let vals: [i64; 4] = [-23, 35, 0, 1 << 40];
        let per: Vec<Vec<u64>> = PRIMES
            .iter()
            .map(|&p| vals.iter().map(|&v| Field { p }.from_i64(v)).collect())
            .collect();
        let poly = crt_poly(&[&per[0], &per[1]]).unwrap();
        assert_eq!(poly, Poly::from_ints(&vals));
        // A rational such as 1/2 has no small integer lift.
        let half: Vec<Vec<u64>> = PRIMES.iter().map(|&p| vec![Field { p }.inv(2)]).collect();
        assert!(crt_poly(&[&half[0], &half[1]]).is_none());
    }
}
