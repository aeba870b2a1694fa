//! Small finite fields as lookup tables, and 1×1 / 2×2 matrices over them.

use super::OracleError;

/// `F_q` for `q <= 13`. An element `a0 + a1*x` is encoded as `a0 + p*a1`;
/// prime fields are just `0..p`. `F_4 = F_2[x]/(x^2+x+1)`, `F_9 = F_3[x]/(x^2+1)`.
#[derive(Debug, Clone)]
pub struct Field {
    q: usize,
    p: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    prim: u8,
}

impl Field {
    pub fn new(q: u64) -> Result<Self, OracleError> {
        // (p, c0, c1) for the reduction x^2 = -c1*x - c0; prime fields use no extension
        let (p, ext) = match q {
            2 | 3 | 5 | 7 | 11 | 13 => (q as usize, None),
            4 => (2, Some((1usize, 1usize))),
            9 => (3, Some((1, 0))),
            _ => {
                return Err(OracleError::Unsupported(format!(
                    "field size {q} (supported: 2, 3, 4, 5, 7, 9, 11, 13)"
                )))
            }
        };
        let q = q as usize;
        let split = |a: usize| (a % p, a / p);
        let join = |a0: usize, a1: usize| ((a0 % p) + p * (a1 % p)) as u8;
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                let (a0, a1) = split(a);
                let (b0, b1) = split(b);
                add[a * q + b] = join(a0 + b0, a1 + b1);
                mul[a * q + b] = match ext {
                    None => ((a * b) % p) as u8,
                    Some((c0, c1)) => {
                        let hi = a1 * b1;
                        let lo = a0 * b0 + p * p - (hi * c0) % p;
                        let mid = a0 * b1 + a1 * b0 + p * p - (hi * c1) % p;
                        join(lo, mid)
                    }
                };
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8)
            .collect();
        let inv = (0..q)
            .map(|a| (1..q).find(|&b| mul[a * q + b] == 1).unwrap_or(0) as u8)
            .collect();
        let mut field = Self { q, p, add, mul, neg, inv, prim: 0 };
        field.prim = (1..q as u8)
            .find(|&g| field.order(g) == q as u64 - 1)
            .expect("multiplicative group of a finite field is cyclic");
        Ok(field)
    }

    pub fn size(&self) -> u64 {
        self.q as u64
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `0` maps to `0`.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    pub fn pow(&self, a: u8, mut e: u64) -> u8 {
        let (mut base, mut acc) = (a, 1u8);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: u8) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
            if k > self.q as u64 {
                return 0;
            }
        }
        k
    }

    /// Least primitive element in the encoding order.
    pub fn primitive(&self) -> u8 {
        self.prim
    }

    /// `ζ_n = g^((q-1)/n)` for the primitive element `g`; needs `n | q - 1`.
    pub fn zeta(&self, n: u64) -> Option<u8> {
        let m = self.q as u64 - 1;
        (n > 0 && m % n == 0).then(|| self.pow(self.prim, m / n))
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.q as u8
    }

    /// Rank of a matrix given as rows, by Gaussian elimination.
    pub fn rank(&self, mut rows: Vec<Vec<u8>>) -> usize {
        let cols = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
                continue;
            };
            rows.swap(rank, piv);
            let scale = self.inv(rows[rank][c]);
            for v in rows[rank].iter_mut() {
                *v = self.mul(*v, scale);
            }
            for r in 0..rows.len() {
                if r != rank && rows[r][c] != 0 {
                    let f = rows[r][c];
                    for k in 0..cols {
                        let t = self.mul(f, rows[rank][k]);
                        rows[r][k] = self.sub(rows[r][k], t);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn identity(&self, d: usize) -> FFMatrix {
        match d {
            1 => FFMatrix { d: 1, e: [1, 0, 0, 0] },
            _ => FFMatrix { d: 2, e: [1, 0, 0, 1] },
        }
    }

    pub fn mat_mul(&self, a: &FFMatrix, b: &FFMatrix) -> FFMatrix {
        if a.d == 1 {
            return FFMatrix { d: 1, e: [self.mul(a.e[0], b.e[0]), 0, 0, 0] };
        }
        let [a0, a1, a2, a3] = a.e;
        let [b0, b1, b2, b3] = b.e;
        let dot = |x: u8, y: u8, z: u8, w: u8| self.add(self.mul(x, y), self.mul(z, w));
        FFMatrix {
            d: 2,
            e: [dot(a0, b0, a1, b2), dot(a0, b1, a1, b3), dot(a2, b0, a3, b2), dot(a2, b1, a3, b3)],
        }
    }

    pub fn mat_pow(&self, a: &FFMatrix, mut k: u64) -> FFMatrix {
        let mut base = *a;
        let mut acc = self.identity(a.d as usize);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mat_mul(&acc, &base);
            }
            base = self.mat_mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn det(&self, a: &FFMatrix) -> u8 {
        match a.d {
            1 => a.e[0],
            _ => self.sub(self.mul(a.e[0], a.e[3]), self.mul(a.e[1], a.e[2])),
        }
    }

    pub fn trace(&self, a: &FFMatrix) -> u8 {
        match a.d {
            1 => a.e[0],
            _ => self.add(a.e[0], a.e[3]),
        }
    }

    /// All of `GL_d(F_q)`, in lexicographic order of entries.
    pub fn general_linear(&self, d: usize) -> Vec<FFMatrix> {
        let q = self.q as u8;
        match d {
            1 => (1..q).map(|a| FFMatrix { d: 1, e: [a, 0, 0, 0] }).collect(),
            _ => {
                let mut out = Vec::new();
                for a in 0..q {
                    for b in 0..q {
                        for c in 0..q {
                            for e in 0..q {
                                let m = FFMatrix { d: 2, e: [a, b, c, e] };
                                if self.det(&m) != 0 {
                                    out.push(m);
                                }
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// `|GL_d(F_q)|`.
    pub fn gl_order(&self, d: usize) -> u64 {
        let q = self.q as u64;
        (0..d as u32).map(|i| q.pow(d as u32) - q.pow(i)).product()
    }

    /// Eigenvalues with multiplicity, or `None` if the characteristic
    /// polynomial has an irreducible quadratic factor.
    pub fn eigenvalues(&self, a: &FFMatrix) -> Option<Vec<u8>> {
        if a.d == 1 {
            return Some(vec![a.e[0]]);
        }
        let (tr, det) = (self.trace(a), self.det(a));
        let r1 = self
            .elements()
            .find(|&t| self.add(self.sub(self.mul(t, t), self.mul(tr, t)), det) == 0)?;
        let r2 = self.sub(tr, r1);
        debug_assert_eq!(self.mul(r1, r2), det);
        Some(vec![r1, r2])
    }
}

/// A `d×d` matrix, `d ∈ {1, 2}`, stored row-major; a 1×1 matrix uses `e[0]`
/// and keeps the other slots zero so that equality and hashing are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FFMatrix {
    pub d: u8,
    pub e: [u8; 4],
}

impl FFMatrix {
    pub fn scalar(d: usize, a: u8) -> Self {
        match d {
            1 => Self { d: 1, e: [a, 0, 0, 0] },
            _ => Self { d: 2, e: [a, 0, 0, a] },
        }
    }

    pub fn diag(a: u8, b: u8) -> Self {
        Self { d: 2, e: [a, 0, 0, b] }
    }

    pub fn from_rows(rows: [[u8; 2]; 2]) -> Self {
        Self { d: 2, e: [rows[0][0], rows[0][1], rows[1][0], rows[1][1]] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        for q in [2, 3, 4, 5, 7, 9, 11, 13] {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "q={q} a={a}");
                }
                for b in f.elements() {
                    for c in f.elements() {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    }
                }
            }
            assert_eq!(f.order(f.primitive()), q - 1);
        }
        assert!(Field::new(8).is_err());
        assert!(Field::new(6).is_err());
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(Field::new(7).unwrap().primitive(), 3);
        assert_eq!(Field::new(13).unwrap().primitive(), 2);
        assert_eq!(Field::new(5).unwrap().primitive(), 2);
    }

    #[test]
    fn gl_sizes() {
        for q in [2, 3, 4, 5, 7] {
            let f = Field::new(q).unwrap();
            assert_eq!(f.general_linear(2).len() as u64, f.gl_order(2));
            assert_eq!(f.general_linear(1).len() as u64, q - 1);
        }
    }

    #[test]
    fn rank_and_eigenvalues() {
        let f = Field::new(7).unwrap();
        assert_eq!(f.rank(vec![vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(f.rank(vec![vec![1, 2], vec![0, 4]]), 2);
        let m = FFMatrix::diag(2, 4);
        let mut ev = f.eigenvalues(&m).unwrap();
        ev.sort();
        assert_eq!(ev, vec![2, 4]);
        // rotation by a primitive 4th root has no eigenvalues in F_7
        let r = FFMatrix::from_rows([[0, 6], [1, 0]]);
        assert_eq!(f.eigenvalues(&r), None);
    }
}
