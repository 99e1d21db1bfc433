//! Exact arithmetic for `F_p`, vectors in `F_p^n`, small extension fields
//! `GF(p^m)`, and non-degenerate inner-product spaces.
//!
//! Ranks encode vectors as base-`p` integers with the first digit most
//! significant; every table in the crate is indexed in rank order.

use crate::error::{Error, Result};

/// Hard cap on dense tables: at most `2^24` entries of `F_p^n`.
pub const TABLE_GUARD: usize = 1 << 24;

/// Hard cap on codeword enumeration: at most `5^8` messages.
pub const ENUM_GUARD: u64 = 390_625;

/// An odd prime modulus in `3..=31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if !(3..=31).contains(&p) {
            return Err(Error::Guard(format!("modulus {p} outside supported range 3..=31")));
        }
        if p % 2 == 0 || (2..p).any(|d| d * d <= p && p % d == 0) {
            return Err(Error::Invalid(format!("{p} is not an odd prime")));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.0 - b % self.0) % self.0
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.0
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        (self.0 - a % self.0) % self.0
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        a %= self.0;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.0 != 0, "inverse of zero");
        self.pow(a, (self.0 - 2) as u64)
    }

    /// Quadratic character: 1 on nonzero squares, -1 on nonsquares, 0 at 0.
    pub fn eta(self, a: u32) -> i8 {
        let a = a % self.0;
        if a == 0 {
            return 0;
        }
        if self.pow(a, ((self.0 - 1) / 2) as u64) == 1 {
            1
        } else {
            -1
        }
    }

    /// Sign of `p* = eta(-1) p`.
    pub fn eta_minus_one(self) -> i8 {
        self.eta(self.0 - 1)
    }

    pub fn squares(self) -> Vec<u32> {
        (1..self.0).filter(|&a| self.eta(a) == 1).collect()
    }

    pub fn nonsquares(self) -> Vec<u32> {
        (1..self.0).filter(|&a| self.eta(a) == -1).collect()
    }
}

/// Convenience free function mirroring [`Prime::eta`].
pub fn quadratic_character(p: Prime, a: u32) -> i8 {
    p.eta(a)
}

/// `p^n` as usize, checked against the table guard.
pub fn checked_table_size(p: Prime, n: usize) -> Result<usize> {
    let mut size = 1usize;
    for _ in 0..n {
        size = size
            .checked_mul(p.get() as usize)
            .filter(|&s| s <= TABLE_GUARD)
            .ok_or_else(|| Error::Guard(format!("p^n table with p={} n={n} exceeds {TABLE_GUARD} entries", p.get())))?;
    }
    Ok(size)
}

pub fn pow_usize(base: usize, e: usize) -> usize {
    base.pow(e as u32)
}

/// Digits of `rank` in base `p`, most significant first.
pub fn digits_of(p: Prime, n: usize, rank: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    write_digits(p, rank, &mut out);
    out
}

pub fn write_digits(p: Prime, mut rank: usize, out: &mut [u8]) {
    let p = p.get() as usize;
    for slot in out.iter_mut().rev() {
        *slot = (rank % p) as u8;
        rank /= p;
    }
}

pub fn rank_of(p: Prime, digits: &[u8]) -> usize {
    let p = p.get() as usize;
    digits.iter().fold(0usize, |acc, &d| acc * p + d as usize)
}

/// A polynomial basis extension field `GF(p^m)` with a fixed monic
/// irreducible reduction polynomial, `m <= 4`.
///
/// Elements are coordinate vectors on the power basis `1, x, ..., x^{m-1}`,
/// listed constant term first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtField {
    p: Prime,
    m: usize,
    /// Coefficients `r_0..r_{m-1}` of the reduction `x^m = -(r_{m-1} x^{m-1} + ... + r_0)`,
    /// i.e. the monic irreducible is `x^m + r_{m-1} x^{m-1} + ... + r_0`.
    reduction: Vec<u8>,
}

impl ExtField {
    /// Builds `GF(p^m)` with the lexicographically smallest monic irreducible
    /// reduction polynomial. Deterministic, and recorded in reports.
    pub fn new(p: Prime, m: usize) -> Result<Self> {
        if m == 0 || m > 4 {
            return Err(Error::Guard(format!("extension degree {m} outside 1..=4")));
        }
        let pm = (p.get() as usize).pow(m as u32);
        for code in 0..pm {
            let coeffs = digits_of(p, m, code).iter().rev().map(|&d| d).collect::<Vec<u8>>();
            if is_irreducible(p, &coeffs) {
                return Ok(ExtField { p, m, reduction: coeffs });
            }
        }
        unreachable!("an irreducible monic polynomial of each degree exists over F_p")
    }

    /// Builds `GF(p^m)` with a caller-supplied reduction polynomial
    /// `x^m + r_{m-1} x^{m-1} + ... + r_0`, verified irreducible.
    pub fn with_reduction(p: Prime, m: usize, reduction: Vec<u8>) -> Result<Self> {
        if m == 0 || m > 4 {
            return Err(Error::Guard(format!("extension degree {m} outside 1..=4")));
        }
        if reduction.len() != m {
            return Err(Error::Invalid("reduction polynomial must list m coefficients".into()));
        }
        if !is_irreducible(p, &reduction) {
            return Err(Error::Invalid("reduction polynomial is reducible over F_p".into()));
        }
        Ok(ExtField { p, m, reduction })
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn reduction(&self) -> &[u8] {
        &self.reduction
    }

    pub fn size(&self) -> usize {
        (self.p.get() as usize).pow(self.m as u32)
    }

    pub fn add(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        a.iter().zip(b).map(|(&x, &y)| self.p.add(x as u32, y as u32) as u8).collect()
    }

    pub fn mul(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        let m = self.m;
        let p = self.p;
        let mut prod = vec![0u32; 2 * m - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u32 * y as u32) % p.get();
            }
        }
        // Reduce x^{m+k} using x^m = -(r_{m-1} x^{m-1} + ... + r_0).
        for d in (m..2 * m - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (j, &r) in self.reduction.iter().enumerate() {
                let t = p.mul(c, r as u32);
                prod[d - m + j] = p.sub(prod[d - m + j], t);
            }
        }
        prod[..m].iter().map(|&c| c as u8).collect()
    }

    pub fn pow(&self, a: &[u8], mut e: u64) -> Vec<u8> {
        let mut base = a.to_vec();
        let mut acc = vec![0u8; self.m];
        acc[0] = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Absolute trace to `F_p`, computed by repeated Frobenius.
    pub fn trace(&self, a: &[u8]) -> u32 {
        let mut acc = vec![0u8; self.m];
        let mut frob = a.to_vec();
        for _ in 0..self.m {
            acc = self.add(&acc, &frob);
            frob = self.pow(&frob, self.p.get() as u64);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0), "trace must land in F_p");
        acc[0] as u32
    }

    /// Rank <-> coords uses the same most-significant-first convention as
    /// vector digits: coords `c_0..c_{m-1}` with `c_0` most significant.
    pub fn coords_of(&self, rank: usize) -> Vec<u8> {
        digits_of(self.p, self.m, rank)
    }

    pub fn rank_of(&self, coords: &[u8]) -> usize {
        rank_of(self.p, coords)
    }
}

/// Brute-force irreducibility over `F_p` for degree <= 4: no linear factor,
/// and for degree 4 additionally no irreducible quadratic factor.
fn is_irreducible(p: Prime, reduction: &[u8]) -> bool {
    let m = reduction.len();
    if m == 1 {
        return true;
    }
    let eval = |poly: &[u8], x: u32| -> u32 {
        // poly is r_0..r_{m-1} plus implicit leading 1
        let mut acc = 1u32;
        for &c in poly.iter().rev() {
            acc = p.add(p.mul(acc, x), c as u32);
        }
        acc
    };
    if (0..p.get()).any(|x| eval(reduction, x) == 0) {
        return false;
    }
    if m <= 3 {
        return true;
    }
    // Degree 4: trial division by every monic irreducible quadratic.
    let field = |c1: u32, c0: u32| -> bool { (0..p.get()).all(|x| p.add(p.mul(p.add(x, c1), x), c0) != 0) };
    for c1 in 0..p.get() {
        for c0 in 0..p.get() {
            if !field(c1, c0) {
                continue;
            }
            if divides_quartic(p, reduction, c1, c0) {
                return false;
            }
        }
    }
    true
}

fn divides_quartic(p: Prime, reduction: &[u8], c1: u32, c0: u32) -> bool {
    // Long division of x^4 + r3 x^3 + r2 x^2 + r1 x + r0 by x^2 + c1 x + c0.
    let r = [reduction[0] as u32, reduction[1] as u32, reduction[2] as u32, reduction[3] as u32];
    let q1 = p.sub(r[3], c1);
    let q0 = p.sub(r[2], p.add(c0, p.mul(q1, c1)));
    let rem1 = p.sub(r[1], p.add(p.mul(q1, c0), p.mul(q0, c1)));
    let rem0 = p.sub(r[0], p.mul(q0, c0));
    rem1 == 0 && rem0 == 0
}

/// One factor of an inner-product space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factor {
    /// `F_p^len` with the standard dot product.
    Dot(usize),
    /// `GF(p^m)` with the trace form `(a, b) -> Tr(ab)`.
    Ext(ExtField),
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::Dot(len) => *len,
            Factor::Ext(f) => f.degree(),
        }
    }
}

/// A non-degenerate symmetric inner product on `F_p^n`, assembled from
/// dot-product and trace-form factors. The product is realized as
/// `<a, b> = a^T M b` with `M` the block-diagonal Gram matrix over the
/// coordinate basis; non-degeneracy is `det M != 0`, checked at build time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    p: Prime,
    factors: Vec<Factor>,
    n: usize,
    size: usize,
    gram: Vec<u8>,
    gram_is_identity: bool,
}

impl Space {
    pub fn dot(p: Prime, n: usize) -> Result<Self> {
        Space::product(p, vec![Factor::Dot(n)])
    }

    pub fn product(p: Prime, factors: Vec<Factor>) -> Result<Self> {
        let n: usize = factors.iter().map(|f| f.dim()).sum();
        if n == 0 {
            return Err(Error::Invalid("inner-product space must have positive dimension".into()));
        }
        let size = checked_table_size(p, n)?;
        let mut gram = vec![0u8; n * n];
        let mut offset = 0usize;
        for factor in &factors {
            match factor {
                Factor::Dot(len) => {
                    for i in 0..*len {
                        gram[(offset + i) * n + offset + i] = 1;
                    }
                    offset += len;
                }
                Factor::Ext(field) => {
                    if field.p() != p {
                        return Err(Error::Invalid("extension factor modulus mismatch".into()));
                    }
                    let m = field.degree();
                    for i in 0..m {
                        let mut bi = vec![0u8; m];
                        bi[i] = 1;
                        for j in 0..m {
                            let mut bj = vec![0u8; m];
                            bj[j] = 1;
                            let t = field.trace(&field.mul(&bi, &bj));
                            gram[(offset + i) * n + offset + j] = t as u8;
                        }
                    }
                    offset += m;
                }
            }
        }
        let gram_is_identity =
            (0..n).all(|i| (0..n).all(|j| gram[i * n + j] == u8::from(i == j)));
        let space = Space { p, factors, n, size, gram, gram_is_identity };
        if space.gram_det() == 0 {
            return Err(Error::Invalid("degenerate inner product".into()));
        }
        Ok(space)
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p^n`, guaranteed within the table guard.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn gram(&self) -> &[u8] {
        &self.gram
    }

    pub fn digits_of(&self, rank: usize) -> Vec<u8> {
        digits_of(self.p, self.n, rank)
    }

    pub fn rank_of(&self, digits: &[u8]) -> usize {
        rank_of(self.p, digits)
    }

    pub fn inner(&self, a: &[u8], b: &[u8]) -> u32 {
        assert_eq!(a.len(), self.n, "dimension mismatch");
        assert_eq!(b.len(), self.n, "dimension mismatch");
        let p = self.p;
        if self.gram_is_identity {
            let mut acc = 0u32;
            for (&x, &y) in a.iter().zip(b) {
                acc = p.add(acc, p.mul(x as u32, y as u32));
            }
            return acc;
        }
        let mut acc = 0u32;
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let mut row = 0u32;
            for (j, &y) in b.iter().enumerate() {
                row = p.add(row, p.mul(self.gram[i * self.n + j] as u32, y as u32));
            }
            acc = p.add(acc, p.mul(x as u32, row));
        }
        acc
    }

    pub fn inner_ranks(&self, a: usize, b: usize) -> u32 {
        self.inner(&self.digits_of(a), &self.digits_of(b))
    }

    /// `M b` as digit vector: the coordinate form of the functional `<., b>`.
    pub fn functional(&self, b: &[u8]) -> Vec<u8> {
        if self.gram_is_identity {
            return b.to_vec();
        }
        let p = self.p;
        (0..self.n)
            .map(|i| {
                let mut acc = 0u32;
                for (j, &y) in b.iter().enumerate() {
                    acc = p.add(acc, p.mul(self.gram[i * self.n + j] as u32, y as u32));
                }
                acc as u8
            })
            .collect()
    }

    /// Table of `<b, x>` for every rank `x`, built digit by digit.
    pub fn functional_table(&self, b_rank: usize) -> Vec<u8> {
        let c = self.functional(&self.digits_of(b_rank));
        let p = self.p;
        let mut table = vec![0u8];
        for &ci in &c {
            let mut next = Vec::with_capacity(table.len() * p.get() as usize);
            for &t in &table {
                for d in 0..p.get() {
                    next.push(p.add(t as u32, p.mul(ci as u32, d)) as u8);
                }
            }
            table = next;
        }
        table
    }

    pub fn neg_rank(&self, rank: usize) -> usize {
        let digits: Vec<u8> = self.digits_of(rank).iter().map(|&d| self.p.neg(d as u32) as u8).collect();
        self.rank_of(&digits)
    }

    pub fn scale_rank(&self, rank: usize, a: u32) -> usize {
        let digits: Vec<u8> =
            self.digits_of(rank).iter().map(|&d| self.p.mul(d as u32, a) as u8).collect();
        self.rank_of(&digits)
    }

    /// Rank of `M x` for the Gram matrix `M`; the identity when all factors
    /// are dot products.
    pub fn gram_map_rank(&self, rank: usize) -> usize {
        if self.gram_is_identity {
            return rank;
        }
        let digits = self.digits_of(rank);
        self.rank_of(&self.functional(&digits))
    }

    pub fn gram_is_identity(&self) -> bool {
        self.gram_is_identity
    }

    fn gram_det(&self) -> u32 {
        let p = self.p;
        let n = self.n;
        let mut m: Vec<u32> = self.gram.iter().map(|&x| x as u32).collect();
        let mut det = 1u32;
        for col in 0..n {
            let pivot = (col..n).find(|&r| m[r * n + col] != 0);
            let Some(pivot) = pivot else { return 0 };
            if pivot != col {
                for j in 0..n {
                    m.swap(pivot * n + j, col * n + j);
                }
                det = p.neg(det);
            }
            let inv = p.inv(m[col * n + col]);
            det = p.mul(det, m[col * n + col]);
            for r in col + 1..n {
                let factor = p.mul(m[r * n + col], inv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let t = p.mul(factor, m[col * n + j]);
                    m[r * n + j] = p.sub(m[r * n + j], t);
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u32) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn prime_guard() {
        assert!(Prime::new(2).is_err());
        assert!(Prime::new(9).is_err());
        assert!(Prime::new(33).is_err());
        assert!(Prime::new(31).is_ok());
    }

    #[test]
    fn quadratic_character_values() {
        assert_eq!(p(5).eta(0), 0);
        assert_eq!(p(5).squares(), vec![1, 4]);
        assert_eq!(p(5).nonsquares(), vec![2, 3]);
        // 2 is a nonsquare mod 3, so p* = -3.
        assert_eq!(p(3).eta_minus_one(), -1);
        assert_eq!(p(5).eta_minus_one(), 1);
        assert_eq!(p(7).eta_minus_one(), -1);
    }

    #[test]
    fn eta_is_multiplicative() {
        for q in [3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let pr = p(q);
            for a in 1..q {
                for b in 1..q {
                    assert_eq!(pr.eta(pr.mul(a, b)), pr.eta(a) * pr.eta(b));
                }
            }
        }
    }

    #[test]
    fn rank_digit_roundtrip() {
        let pr = p(3);
        for rank in 0..81 {
            let d = digits_of(pr, 4, rank);
            assert_eq!(rank_of(pr, &d), rank);
        }
        // first digit is most significant
        assert_eq!(digits_of(pr, 3, 9), vec![1, 0, 0]);
    }

    #[test]
    fn trace_on_gf9() {
        let pr = p(3);
        let f = ExtField::with_reduction(pr, 2, vec![1, 0]).unwrap(); // x^2 + 1
        assert_eq!(f.trace(&[0, 0]), 0);
        assert_eq!(f.trace(&[1, 0]), 2); // m * 1 mod p
        assert_eq!(f.trace(&[0, 1]), 0); // generator: a + a^3 = a - a
    }

    #[test]
    fn trace_linear_and_surjective() {
        for (q, m) in [(3u32, 2usize), (3, 3), (5, 2), (5, 3), (3, 4)] {
            let pr = p(q);
            let f = ExtField::new(pr, m).unwrap();
            let mut hit = vec![false; q as usize];
            for r in 0..f.size() {
                hit[f.trace(&f.coords_of(r)) as usize] = true;
            }
            assert!(hit.iter().all(|&h| h), "trace must be surjective");
            for a in 0..f.size() {
                for b in 0..f.size().min(40) {
                    let (ca, cb) = (f.coords_of(a), f.coords_of(b));
                    let lhs = f.trace(&f.add(&ca, &cb));
                    assert_eq!(lhs, pr.add(f.trace(&ca), f.trace(&cb)));
                }
            }
        }
    }

    #[test]
    fn smallest_irreducible_is_deterministic() {
        let f = ExtField::new(p(3), 2).unwrap();
        assert_eq!(f.reduction(), &[1, 0]); // x^2 + 1
        let g = ExtField::new(p(5), 2).unwrap();
        assert_eq!(g.reduction(), &[2, 0]); // x^2 + 2
    }

    #[test]
    fn dot_inner_product() {
        let s = Space::dot(p(3), 2).unwrap();
        assert_eq!(s.inner(&[1, 2], &[2, 2]), 0);
        assert_eq!(s.inner(&[0, 0], &[2, 1]), 0);
    }

    #[test]
    fn non_degenerate_exhaustive_small() {
        let pr = p(3);
        let ext = ExtField::new(pr, 2).unwrap();
        for space in [
            Space::dot(pr, 3).unwrap(),
            Space::product(pr, vec![Factor::Dot(1), Factor::Ext(ext.clone()), Factor::Ext(ext)]).unwrap(),
        ] {
            for a in 1..space.size() {
                let found = (0..space.size()).any(|b| space.inner_ranks(a, b) != 0);
                assert!(found, "vector {a} pairs to zero with everything");
            }
        }
    }

    #[test]
    fn functional_table_matches_inner() {
        let pr = p(3);
        let ext = ExtField::new(pr, 2).unwrap();
        let s = Space::product(pr, vec![Factor::Dot(1), Factor::Ext(ext)]).unwrap();
        for b in 0..s.size() {
            let table = s.functional_table(b);
            for x in 0..s.size() {
                assert_eq!(table[x] as u32, s.inner_ranks(b, x));
            }
        }
    }

    #[test]
    fn table_guard_rejects_oversized() {
        assert!(checked_table_size(p(5), 11).is_err());
        assert!(checked_table_size(p(3), 15).is_ok());
    }
}
