//! Exact arithmetic in the ring `Z[ξ_p]` for an odd prime `p`.
//!
//! Elements are stored on the integral basis `ξ^1, ..., ξ^{p-1}`; the
//! relation `1 + ξ + ... + ξ^{p-1} = 0` eliminates the `ξ^0` component, so a
//! rational integer `c` is held as `-c (ξ + ... + ξ^{p-1})`. Coefficients are
//! arbitrary-precision, which keeps every Walsh value and Gauss-sum product
//! exact.

use crate::error::{Error, Result};
use crate::field::Prime;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycInt {
    p: u32,
    /// `c[j-1]` is the coefficient of `ξ^j`.
    c: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(p: Prime) -> Self {
        CycInt { p: p.get(), c: vec![BigInt::zero(); (p.get() - 1) as usize] }
    }

    pub fn from_int(p: Prime, value: impl Into<BigInt>) -> Self {
        let v: BigInt = value.into();
        CycInt { p: p.get(), c: vec![-v; (p.get() - 1) as usize] }
    }

    /// `ξ^j`.
    pub fn root(p: Prime, j: u32) -> Self {
        let mut out = CycInt::zero(p);
        let j = j % p.get();
        if j == 0 {
            return CycInt::from_int(p, 1);
        }
        out.c[(j - 1) as usize] = BigInt::one();
        out
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// Coefficients on the integral basis, index `j-1` for `ξ^j`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    /// Coefficient of `ξ^j`, `1 <= j <= p-1`.
    pub fn coeff(&self, j: u32) -> BigInt {
        assert!(j >= 1 && j < self.p);
        self.c[(j - 1) as usize].clone()
    }

    pub fn prime(&self) -> Prime {
        Prime::new(self.p).expect("stored modulus is always valid")
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// Returns the value as a rational integer if it is one.
    pub fn as_int(&self) -> Option<BigInt> {
        let first = &self.c[0];
        if self.c.iter().all(|x| x == first) {
            Some(-first.clone())
        } else {
            None
        }
    }

    pub fn checked_pair(&self, other: &CycInt) -> Result<()> {
        if self.p != other.p {
            return Err(Error::Invalid(format!("cyclotomic modulus mismatch: {} vs {}", self.p, other.p)));
        }
        Ok(())
    }

    pub fn add(&self, other: &CycInt) -> CycInt {
        self.checked_pair(other).expect("modulus mismatch");
        let c = self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect();
        CycInt { p: self.p, c }
    }

    pub fn sub(&self, other: &CycInt) -> CycInt {
        self.checked_pair(other).expect("modulus mismatch");
        let c = self.c.iter().zip(&other.c).map(|(a, b)| a - b).collect();
        CycInt { p: self.p, c }
    }

    pub fn neg(&self) -> CycInt {
        CycInt { p: self.p, c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn scalar_mul(&self, s: &BigInt) -> CycInt {
        CycInt { p: self.p, c: self.c.iter().map(|a| a * s).collect() }
    }

    /// Multiplication by `ξ^j`: a rotation of exponents mod `p`.
    pub fn mul_root(&self, j: u32) -> CycInt {
        let p = self.p;
        let j = j % p;
        if j == 0 {
            return self.clone();
        }
        let mut raw = vec![BigInt::zero(); p as usize];
        for (idx, coeff) in self.c.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let e = (idx as u32 + 1 + j) % p;
            raw[e as usize] += coeff;
        }
        CycInt::from_raw(self.prime(), raw)
    }

    pub fn mul(&self, other: &CycInt) -> CycInt {
        self.checked_pair(other).expect("modulus mismatch");
        let p = self.p;
        let mut raw = vec![BigInt::zero(); p as usize];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let e = ((i + j + 2) % p as usize) as usize;
                raw[e] += a * b;
            }
        }
        CycInt::from_raw(self.prime(), raw)
    }

    /// Normalizes raw coefficients on `ξ^0..ξ^{p-1}` into the integral basis.
    pub fn from_raw(p: Prime, mut raw: Vec<BigInt>) -> CycInt {
        assert_eq!(raw.len(), p.get() as usize);
        let head = std::mem::take(&mut raw[0]);
        let c = raw.into_iter().skip(1).map(|x| x - &head).collect();
        CycInt { p: p.get(), c }
    }

    /// Adds `src * ξ^j` into a raw coefficient accumulator of length `p`.
    pub fn accumulate_rotated(acc: &mut [BigInt], src: &CycInt, j: u32) {
        let p = src.p;
        debug_assert_eq!(acc.len(), p as usize);
        let j = j % p;
        for (idx, coeff) in src.c.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let e = (idx as u32 + 1 + j) % p;
            acc[e as usize] += coeff;
        }
    }

    /// Galois action `σ_t: ξ -> ξ^t`, `t` nonzero mod `p`.
    pub fn galois(&self, t: u32) -> Result<CycInt> {
        let p = self.p;
        if t % p == 0 {
            return Err(Error::Invalid("galois action requires a nonzero residue".into()));
        }
        let mut raw = vec![BigInt::zero(); p as usize];
        for (idx, coeff) in self.c.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let e = ((idx as u64 + 1) * t as u64 % p as u64) as usize;
            raw[e] += coeff;
        }
        Ok(CycInt::from_raw(self.prime(), raw))
    }

    /// Complex conjugation `σ_{-1}`.
    pub fn conj(&self) -> CycInt {
        self.galois(self.p - 1).expect("p-1 is nonzero mod p")
    }

    /// `|z|^2 = z σ_{-1}(z)`. The product lies in the real subfield; it is a
    /// rational integer exactly for the plateau-shaped values this crate
    /// classifies, so a `None` here means "not of that shape".
    pub fn norm_sq(&self) -> Option<BigInt> {
        let v = self.mul(&self.conj()).as_int()?;
        debug_assert!(!v.is_negative());
        Some(v)
    }

    /// `z σ_{-1}(z)` as an element of the real subfield.
    pub fn abs_sq(&self) -> CycInt {
        self.mul(&self.conj())
    }
}

/// The quadratic Gauss sum `g = Σ_{y != 0} η(y) ξ^y`; `g^2 = η(-1) p`.
pub fn gauss_sum(p: Prime) -> CycInt {
    let mut raw = vec![BigInt::zero(); p.get() as usize];
    for y in 1..p.get() {
        raw[y as usize] = BigInt::from(p.eta(y) as i64);
    }
    CycInt::from_raw(p, raw)
}

/// Recognizes a nonzero plateau-magnitude Walsh value.
///
/// For even `n + s` the admissible values are `± p^{(n+s)/2} ξ^j`; for odd
/// `n + s` they are `± g p^{(n+s-1)/2} ξ^j` with `g` the quadratic Gauss sum
/// (this encodes the unit `1` or `sqrt(-1)` exactly). Returns the sign and
/// the exponent `j`, or `None` when the value matches neither form.
pub fn recognize_plateau_value(w: &CycInt, p: Prime, n: usize, s: usize) -> Option<(i8, u32)> {
    PlateauMatcher::new(p, n, s).recognize(w)
}

/// Precomputed candidate table for [`recognize_plateau_value`].
pub struct PlateauMatcher {
    candidates: Vec<(CycInt, i8, u32)>,
}

impl PlateauMatcher {
    pub fn new(p: Prime, n: usize, s: usize) -> Self {
        let total = n + s;
        let base = if total % 2 == 0 {
            CycInt::from_int(p, BigInt::from(p.get()).pow((total / 2) as u32))
        } else {
            gauss_sum(p).scalar_mul(&BigInt::from(p.get()).pow(((total - 1) / 2) as u32))
        };
        let mut candidates = Vec::with_capacity(2 * p.get() as usize);
        for j in 0..p.get() {
            let plus = base.mul_root(j);
            candidates.push((plus.neg(), -1, j));
            candidates.push((plus, 1, j));
        }
        PlateauMatcher { candidates }
    }

    pub fn recognize(&self, w: &CycInt) -> Option<(i8, u32)> {
        if w.is_zero() {
            return None;
        }
        self.candidates.iter().find(|(cand, _, _)| cand == w).map(|&(_, eps, j)| (eps, j))
    }

    /// The exact value `eps * μ p^{(n+s)/2} ξ^j` this matcher recognizes.
    pub fn reconstruct(&self, eps: i8, j: u32) -> CycInt {
        self.candidates
            .iter()
            .find(|&&(_, e, jj)| e == eps && jj == j)
            .map(|(cand, _, _)| cand.clone())
            .expect("sign in {-1, 1} and exponent below p")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u32) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn root_of_unity_relation() {
        let pr = p(5);
        let lhs = CycInt::root(pr, 1).mul(&CycInt::root(pr, 4));
        assert_eq!(lhs, CycInt::from_int(pr, 1));
    }

    #[test]
    fn additive_inverse() {
        let pr = p(7);
        let a = CycInt::root(pr, 3).add(&CycInt::from_int(pr, -4));
        assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn gauss_sum_squares_to_p_star() {
        // p = 3: g = ξ - ξ^2 and g^2 = -3.
        let g3 = gauss_sum(p(3));
        assert_eq!(g3.mul(&g3).as_int().unwrap(), BigInt::from(-3));
        // p = 5: g = ξ - ξ^2 - ξ^3 + ξ^4 and g^2 = 5.
        let g5 = gauss_sum(p(5));
        assert_eq!(g5.mul(&g5).as_int().unwrap(), BigInt::from(5));
        for q in [3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let pr = p(q);
            let g = gauss_sum(pr);
            let expect = BigInt::from(pr.eta_minus_one() as i64 * q as i64);
            assert_eq!(g.mul(&g).as_int().unwrap(), expect);
            // |g|^2 = p via the exact conjugate product.
            assert_eq!(g.norm_sq().unwrap(), BigInt::from(q));
        }
    }

    #[test]
    fn galois_identity_and_permutation() {
        let pr = p(5);
        let a = CycInt::root(pr, 1).add(&CycInt::root(pr, 4));
        assert_eq!(a.galois(1).unwrap(), a);
        let expect = CycInt::root(pr, 2).add(&CycInt::root(pr, 3));
        assert_eq!(a.galois(2).unwrap(), expect);
        assert!(a.galois(0).is_err());
    }

    #[test]
    fn galois_scales_gauss_sum_by_character() {
        for q in [3u32, 5, 7, 11, 13] {
            let pr = p(q);
            let g = gauss_sum(pr);
            for t in 1..q {
                let lhs = g.galois(t).unwrap();
                let rhs = if pr.eta(t) == 1 { g.clone() } else { g.neg() };
                assert_eq!(lhs, rhs, "σ_{t} on the Gauss sum for p={q}");
            }
        }
    }

    #[test]
    fn square_expansion() {
        // (ξ - ξ^2)^2 = -3 for p = 3.
        let pr = p(3);
        let a = CycInt::root(pr, 1).sub(&CycInt::root(pr, 2));
        assert_eq!(a.mul(&a).as_int().unwrap(), BigInt::from(-3));
    }

    #[test]
    fn recognize_even_and_odd_forms() {
        let pr = p(3);
        // W = -3 ξ^0 with n=2, s=0.
        let w = CycInt::from_int(pr, -3);
        assert_eq!(recognize_plateau_value(&w, pr, 2, 0), Some((-1, 0)));
        assert_eq!(recognize_plateau_value(&CycInt::zero(pr), pr, 2, 0), None);
        // Odd case: W = g * 3 * ξ^2 with n=3, s=0.
        let w = gauss_sum(pr).scalar_mul(&BigInt::from(3)).mul_root(2);
        assert_eq!(recognize_plateau_value(&w, pr, 3, 0), Some((1, 2)));
        // A non-plateau value.
        let w = CycInt::from_int(pr, 4);
        assert_eq!(recognize_plateau_value(&w, pr, 2, 0), None);
    }

    #[test]
    fn matcher_reconstruction_roundtrip() {
        let pr = p(5);
        for (n, s) in [(2usize, 0usize), (3, 0), (3, 1), (4, 2)] {
            let m = PlateauMatcher::new(pr, n, s);
            for j in 0..5 {
                for eps in [-1i8, 1] {
                    let w = m.reconstruct(eps, j);
                    assert_eq!(m.recognize(&w), Some((eps, j)));
                }
            }
        }
    }

    #[test]
    fn norm_detects_non_plateau_shapes() {
        let pr = p(5);
        // |ξ|² = 1 and |c ξ^j|² = c².
        assert_eq!(CycInt::root(pr, 3).norm_sq().unwrap(), BigInt::from(1));
        let a = CycInt::root(pr, 2).scalar_mul(&BigInt::from(-7));
        assert_eq!(a.norm_sq().unwrap(), BigInt::from(49));
        // |1 + ξ|² = 2 + ξ + ξ⁴ is not rational for p = 5.
        let b = CycInt::from_int(pr, 1).add(&CycInt::root(pr, 1));
        assert_eq!(b.norm_sq(), None);
    }
}
