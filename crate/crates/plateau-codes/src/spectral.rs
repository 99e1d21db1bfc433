//! Walsh transform engine, plateaued-function classification, dual profiles,
//! family membership, and exponential-sum oracles.
//!
//! All spectra are exact cyclotomic integers. The fast transform runs one
//! `p`-point pass per coordinate axis with the dot-product kernel and then
//! remaps indices through the space's Gram matrix; a naive quadratic-cost
//! path is kept as the oracle.

use crate::cyclotomic::{gauss_sum, CycInt, PlateauMatcher};
use crate::error::{Error, Result};
use crate::field::{Prime, Space};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

/// A function `F_p^n -> F_p` stored as a dense table in rank order.
#[derive(Debug, Clone)]
pub struct PFunction {
    space: Space,
    table: Vec<u8>,
}

impl PFunction {
    pub fn new(space: Space, table: Vec<u8>) -> Result<Self> {
        if table.len() != space.size() {
            return Err(Error::Parse(format!(
                "truth table has {} entries, expected {}",
                table.len(),
                space.size()
            )));
        }
        if table.iter().any(|&v| v as u32 >= space.p().get()) {
            return Err(Error::Parse("truth table entry out of range".into()));
        }
        Ok(PFunction { space, table })
    }

    pub fn from_fn(space: Space, f: impl Fn(&[u8]) -> u32) -> Self {
        let table = (0..space.size()).map(|r| (f(&space.digits_of(r)) % space.p().get()) as u8).collect();
        PFunction { space, table }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn p(&self) -> Prime {
        self.space.p()
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    #[inline]
    pub fn eval_rank(&self, rank: usize) -> u8 {
        self.table[rank]
    }

    /// `f(x) = f(-x)` everywhere.
    pub fn is_even(&self) -> bool {
        (0..self.table.len()).all(|r| self.table[r] == self.table[self.space.neg_rank(r)])
    }

    /// `N_j(f)` for each `j`.
    pub fn value_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.p().get() as usize];
        for &v in &self.table {
            counts[v as usize] += 1;
        }
        counts
    }

    /// Ranks of the level set `D_{f,i}`.
    pub fn level_set(&self, i: u32) -> Vec<usize> {
        (0..self.table.len()).filter(|&r| self.table[r] as u32 == i % self.p().get()).collect()
    }

    /// Ranks where `f` takes a nonzero square value.
    pub fn square_level_set(&self) -> Vec<usize> {
        (0..self.table.len()).filter(|&r| self.p().eta(self.table[r] as u32) == 1).collect()
    }

    /// Ranks where `f` takes a nonsquare value.
    pub fn nonsquare_level_set(&self) -> Vec<usize> {
        (0..self.table.len()).filter(|&r| self.p().eta(self.table[r] as u32) == -1).collect()
    }
}

/// Exact Walsh spectrum, indexed by rank.
#[derive(Debug, Clone)]
pub struct WalshSpectrum {
    p: Prime,
    n: usize,
    values: Vec<CycInt>,
}

impl WalshSpectrum {
    pub fn value(&self, rank: usize) -> &CycInt {
        &self.values[rank]
    }

    pub fn values(&self) -> &[CycInt] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Σ |W(α)|² as an exact integer; the Parseval identity demands `p^{2n}`.
    /// Individual summands live in the real subfield, so the sum is formed
    /// there and converted at the end.
    pub fn energy(&self) -> BigInt {
        let total = self
            .values
            .par_iter()
            .map(|w| w.abs_sq())
            .reduce(|| CycInt::zero(self.p), |a, b| a.add(&b));
        total.as_int().expect("the Parseval sum is a rational integer")
    }

    pub fn parseval_holds(&self) -> bool {
        self.energy() == BigInt::from(self.p.get()).pow(2 * self.n as u32)
    }
}

/// One `p`-point pass per axis with kernel `ξ^{-a d}`, for dot-product
/// coordinates. Cost `O(n p^{n+1})` cyclotomic operations.
fn dot_kernel_transform(p: Prime, n: usize, mut v: Vec<CycInt>) -> Vec<CycInt> {
    let pp = p.get() as usize;
    let size = v.len();
    for axis in 0..n {
        let stride = pp.pow((n - 1 - axis) as u32);
        let next: Vec<CycInt> = (0..size)
            .into_par_iter()
            .map(|idx| {
                let digit = (idx / stride) % pp;
                let base = idx - digit * stride;
                let mut raw = vec![BigInt::zero(); pp];
                for d in 0..pp {
                    let j = p.neg(p.mul(digit as u32, d as u32));
                    CycInt::accumulate_rotated(&mut raw, &v[base + d * stride], j);
                }
                CycInt::from_raw(p, raw)
            })
            .collect();
        v = next;
    }
    v
}

/// Fast exact Walsh transform `W(α) = Σ_x ξ^{f(x) - <α, x>}`.
pub fn walsh_transform(f: &PFunction) -> WalshSpectrum {
    let space = f.space();
    let p = space.p();
    let n = space.n();
    let input: Vec<CycInt> = f.table().iter().map(|&t| CycInt::root(p, t as u32)).collect();
    let transformed = dot_kernel_transform(p, n, input);
    let values = if space.gram_is_identity() {
        transformed
    } else {
        (0..space.size()).map(|r| transformed[space.gram_map_rank(r)].clone()).collect()
    };
    WalshSpectrum { p, n, values }
}

/// Reference `O(p^{2n})` transform used as the oracle for the fast path.
pub fn walsh_transform_naive(f: &PFunction) -> WalshSpectrum {
    let space = f.space();
    let p = space.p();
    let values: Vec<CycInt> = (0..space.size())
        .into_par_iter()
        .map(|alpha| {
            let dots = space.functional_table(alpha);
            let mut raw = vec![BigInt::zero(); p.get() as usize];
            for (x, &fx) in f.table().iter().enumerate() {
                let e = p.sub(fx as u32, dots[x] as u32);
                raw[e as usize] += 1;
            }
            CycInt::from_raw(p, raw)
        })
        .collect();
    WalshSpectrum { p, n: space.n(), values }
}

/// Restricted transform `Σ_{x in S} ξ^{g(x) - <α, x>}` for a partial table.
pub fn restricted_transform(space: &Space, table: &[Option<u8>]) -> Vec<CycInt> {
    let p = space.p();
    let input: Vec<CycInt> = table
        .iter()
        .map(|entry| match entry {
            Some(v) => CycInt::root(p, *v as u32),
            None => CycInt::zero(p),
        })
        .collect();
    let transformed = dot_kernel_transform(p, space.n(), input);
    if space.gram_is_identity() {
        transformed
    } else {
        (0..space.size()).map(|r| transformed[space.gram_map_rank(r)].clone()).collect()
    }
}

/// Classification data for an `s`-plateaued function.
#[derive(Debug, Clone)]
pub struct PlateauProfile {
    pub s: usize,
    /// Membership mask of the Walsh support.
    pub supp: Vec<bool>,
    pub supp_ranks: Vec<usize>,
    /// Dual value `f*(α)` for `α` in the support, 0 elsewhere.
    pub dual: Vec<u8>,
    /// Sign `ε_α` for `α` in the support, 0 elsewhere.
    pub eps: Vec<i8>,
    /// Sign at 0 if `f` is unbalanced.
    pub eps0: Option<i8>,
    /// `#B_+(f)`.
    pub k: usize,
    pub weakly_regular: bool,
    pub balanced: bool,
    /// `f*(0)` when `0` lies in the support.
    pub j0: Option<u32>,
}

impl PlateauProfile {
    pub fn in_supp(&self, rank: usize) -> bool {
        self.supp[rank]
    }

    /// Ranks of `B_+(f)` / `B_-(f)`.
    pub fn b_plus(&self) -> Vec<usize> {
        self.supp_ranks.iter().copied().filter(|&r| self.eps[r] == 1).collect()
    }

    pub fn b_minus(&self) -> Vec<usize> {
        self.supp_ranks.iter().copied().filter(|&r| self.eps[r] == -1).collect()
    }

    pub fn type_sign(&self) -> Option<i8> {
        self.eps0
    }
}

/// Infers `s` from exact magnitudes and extracts the dual and signs.
/// Returns `None` for non-plateaued spectra or unrecognizable values.
pub fn classify_plateaued(f: &PFunction, spectrum: &WalshSpectrum) -> Option<PlateauProfile> {
    let p = f.p();
    let n = f.n();
    let size = f.space().size();
    let norms: Vec<Option<BigInt>> = spectrum.values.par_iter().map(|w| w.norm_sq()).collect();
    let mut magnitude: Option<BigInt> = None;
    for nv in &norms {
        let nv = nv.as_ref()?;
        if nv.is_zero() {
            continue;
        }
        match &magnitude {
            None => magnitude = Some(nv.clone()),
            Some(m) if m == nv => {}
            Some(_) => return None,
        }
    }
    let magnitude = magnitude?;
    let s = (0..=n).find(|&s| BigInt::from(p.get()).pow((n + s) as u32) == magnitude)?;
    let supp: Vec<bool> =
        norms.iter().map(|nv| !nv.as_ref().expect("checked above").is_zero()).collect();
    let supp_ranks: Vec<usize> = (0..size).filter(|&r| supp[r]).collect();
    if supp_ranks.len() != crate::field::pow_usize(p.get() as usize, n - s) {
        return None;
    }
    let matcher = PlateauMatcher::new(p, n, s);
    let mut dual = vec![0u8; size];
    let mut eps = vec![0i8; size];
    let mut k = 0usize;
    for &r in &supp_ranks {
        let (e, j) = matcher.recognize(&spectrum.values[r])?;
        dual[r] = j as u8;
        eps[r] = e;
        if e == 1 {
            k += 1;
        }
    }
    let balanced = !supp[0];
    let eps0 = if balanced { None } else { Some(eps[0]) };
    let j0 = if balanced { None } else { Some(dual[0] as u32) };
    let weakly_regular = supp_ranks.iter().all(|&r| eps[r] == eps[supp_ranks[0]]);
    Some(PlateauProfile { s, supp, supp_ranks, dual, eps, eps0, k, weakly_regular, balanced, j0 })
}

/// Rebuilds the spectrum from `(s, supp, dual, eps)`; equality with the
/// transform is the classification round-trip invariant.
pub fn reconstruct_spectrum(f: &PFunction, profile: &PlateauProfile) -> WalshSpectrum {
    let p = f.p();
    let n = f.n();
    let matcher = PlateauMatcher::new(p, n, profile.s);
    let values = (0..f.space().size())
        .map(|r| {
            if profile.supp[r] {
                matcher.reconstruct(profile.eps[r], profile.dual[r] as u32)
            } else {
                CycInt::zero(p)
            }
        })
        .collect();
    WalshSpectrum { p, n, values }
}

/// Dual-side data when `f*` is bent relative to the support.
#[derive(Debug, Clone)]
pub struct DualProfile {
    /// `f**(α) = f(-α)` for every `α`.
    pub f_star_star: Vec<u8>,
    /// `ε*_α` for every `α`.
    pub eps_star: Vec<i8>,
    pub eps0_star: i8,
    /// `#B_+(f*)`.
    pub plus_count: usize,
}

impl DualProfile {
    pub fn b_plus(&self) -> Vec<usize> {
        (0..self.eps_star.len()).filter(|&r| self.eps_star[r] == 1).collect()
    }

    pub fn b_minus(&self) -> Vec<usize> {
        (0..self.eps_star.len()).filter(|&r| self.eps_star[r] == -1).collect()
    }
}

/// Transforms `f*` over the support and checks it is bent relative to the
/// support; verifies `f**(α) = f(-α)` pointwise.
pub fn dual_profile(f: &PFunction, profile: &PlateauProfile) -> Option<DualProfile> {
    let space = f.space();
    let p = space.p();
    let n = space.n();
    let s = profile.s;
    let partial: Vec<Option<u8>> = (0..space.size())
        .map(|r| if profile.supp[r] { Some(profile.dual[r]) } else { None })
        .collect();
    let dual_spectrum = restricted_transform(space, &partial);
    let matcher = PlateauMatcher::new(p, n - s, 0);
    let mut f_star_star = vec![0u8; space.size()];
    let mut eps_star = vec![0i8; space.size()];
    let mut plus_count = 0usize;
    for (alpha, w) in dual_spectrum.iter().enumerate() {
        let (e, j) = matcher.recognize(w)?;
        if j as u8 != f.eval_rank(space.neg_rank(alpha)) {
            return None;
        }
        f_star_star[alpha] = j as u8;
        eps_star[alpha] = e;
        if e == 1 {
            plus_count += 1;
        }
    }
    Some(DualProfile { f_star_star, eps_star: eps_star.clone(), eps0_star: eps_star[0], plus_count })
}

/// Family-membership report: the four conditions plus all valid exponents.
#[derive(Debug, Clone)]
pub struct FamilyCheck {
    pub member: bool,
    pub failures: Vec<String>,
    /// Valid scaling exponents on `B_+(f*)`, smallest first.
    pub t: Vec<u32>,
    /// Valid scaling exponents on `B_-(f*)`, smallest first.
    pub t_prime: Vec<u32>,
}

impl FamilyCheck {
    pub fn has_t_equal_2(&self) -> bool {
        self.t.contains(&2) && self.t_prime.contains(&2)
    }
}

fn scaling_exponents(f: &PFunction, set: &[usize], side: &str, failures: &mut Vec<String>) -> Vec<u32> {
    let p = f.p();
    let space = f.space();
    let mut valid = Vec::new();
    for t in 2..p.get() {
        if gcd(t as u64 - 1, p.get() as u64 - 1) != 1 {
            continue;
        }
        let ok = set.iter().all(|&x| {
            (1..p.get()).all(|a| {
                let lhs = f.eval_rank(space.scale_rank(x, a)) as u32;
                let rhs = p.mul(p.pow(a, t as u64), f.eval_rank(x) as u32);
                lhs == rhs
            })
        });
        if ok {
            valid.push(t);
        }
    }
    if valid.is_empty() {
        failures.push(format!("no admissible scaling exponent on {side}"));
    }
    valid
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Checks the four membership conditions: `f(0)=0`, dual bent relative to
/// the support, scale-closed sign classes of the dual spectrum, and the
/// existence of homogeneity exponents with `gcd(t-1, p-1) = 1`.
pub fn family_f_check(f: &PFunction, profile: &PlateauProfile, dual: Option<&DualProfile>) -> FamilyCheck {
    let p = f.p();
    let space = f.space();
    let mut failures = Vec::new();
    if f.eval_rank(0) != 0 {
        failures.push("f(0) != 0".to_string());
    }
    let Some(dual) = dual else {
        failures.push("dual is not bent relative to the support".to_string());
        let _ = profile;
        return FamilyCheck { member: false, failures, t: vec![], t_prime: vec![] };
    };
    let mut closed = true;
    'outer: for r in 0..space.size() {
        for a in 2..p.get() {
            if dual.eps_star[space.scale_rank(r, a)] != dual.eps_star[r] {
                closed = false;
                break 'outer;
            }
        }
    }
    if !closed {
        failures.push("sign classes of the dual spectrum are not scale-closed".to_string());
    }
    let plus = dual.b_plus();
    let minus = dual.b_minus();
    let t = scaling_exponents(f, &plus, "B_+(f*)", &mut failures);
    let t_prime = scaling_exponents(f, &minus, "B_-(f*)", &mut failures);
    FamilyCheck { member: failures.is_empty(), failures, t, t_prime }
}

/// All `l` in `1..p` with `f(cx) = c^l f(x)` for every `c != 0` and `x`.
pub fn lform_exponents(f: &PFunction) -> Vec<u32> {
    let p = f.p();
    let space = f.space();
    (1..p.get())
        .filter(|&l| {
            (0..space.size()).all(|x| {
                (1..p.get()).all(|c| {
                    f.eval_rank(space.scale_rank(x, c)) as u32 == p.mul(p.pow(c, l as u64), f.eval_rank(x) as u32)
                })
            })
        })
        .collect()
}

fn rational(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `p^e` for a possibly negative exponent, as an exact rational.
pub fn p_pow(p: Prime, e: i64) -> BigRational {
    let base = BigInt::from(p.get());
    if e >= 0 {
        BigRational::from_integer(base.pow(e as u32))
    } else {
        BigRational::new(BigInt::one(), base.pow((-e) as u32))
    }
}

/// Closed-form value distribution of an unbalanced plateaued function:
/// even `n+s`: `N_j = p^{n-1} + ε₀ (δ₀(j - j₀) p - 1) p^{(n+s)/2 - 1}`,
/// odd `n+s`: `N_j = p^{n-1} + ε₀ η(j - j₀) p^{(n+s-1)/2}`.
pub fn closed_value_counts(p: Prime, n: usize, s: usize, eps0: i8, j0: u32) -> Vec<BigRational> {
    let total = n + s;
    (0..p.get())
        .map(|j| {
            let base = p_pow(p, n as i64 - 1);
            let dev = if total % 2 == 0 {
                let delta = if j == j0 % p.get() { p.get() as i64 } else { 0 };
                rational(eps0 as i64) * rational(delta - 1) * p_pow(p, total as i64 / 2 - 1)
            } else {
                let eta = p.eta(p.sub(j, j0)) as i64;
                rational(eps0 as i64 * eta) * p_pow(p, (total as i64 - 1) / 2)
            };
            base + dev
        })
        .collect()
}

/// Closed-form distribution of the dual over the support (`j₀ = f(0)`):
/// even: `p^{n-s-1} + ε₀*(δ₀(j-j₀)p - 1) p^{(n-s)/2-1}`,
/// odd:  `p^{n-s-1} + ε₀* η(j-j₀) p^{(n-s-1)/2}`.
pub fn closed_dual_value_counts(p: Prime, n: usize, s: usize, eps0_star: i8, j0: u32) -> Vec<BigRational> {
    let diff = n - s;
    (0..p.get())
        .map(|j| {
            let base = p_pow(p, diff as i64 - 1);
            let dev = if (n + s) % 2 == 0 {
                let delta = if j == j0 % p.get() { p.get() as i64 } else { 0 };
                rational(eps0_star as i64) * rational(delta - 1) * p_pow(p, diff as i64 / 2 - 1)
            } else {
                let eta = p.eta(p.sub(j, j0)) as i64;
                rational(eps0_star as i64 * eta) * p_pow(p, (diff as i64 - 1) / 2)
            };
            base + dev
        })
        .collect()
}

/// Closed-form split counts `(c_j, d_j)` of the dual over `B_+(f)` and
/// `B_-(f)`, with `k = #B_+(f)` and `j₀ = f(0)`.
pub fn closed_split_dual_counts(
    p: Prime,
    n: usize,
    s: usize,
    eps0_star: i8,
    k: u64,
    j0: u32,
) -> (Vec<BigRational>, Vec<BigRational>) {
    let diff = n - s;
    let k_over_p = BigRational::new(BigInt::from(k), BigInt::from(p.get()));
    let mut cs = Vec::new();
    let mut ds = Vec::new();
    for j in 0..p.get() {
        let (c, d) = if (n + s) % 2 == 0 {
            let delta = if j == j0 % p.get() { p.get() as i64 } else { 0 };
            let shift = rational(delta - 1) * p_pow(p, diff as i64 / 2 - 1);
            (
                k_over_p.clone() + rational((eps0_star as i64 + 1) / 2) * shift.clone(),
                p_pow(p, diff as i64 - 1) - k_over_p.clone()
                    + rational((eps0_star as i64 - 1) / 2) * shift,
            )
        } else {
            let eta_m1 = p.eta_minus_one() as i64;
            let eta = p.eta(p.sub(j, j0)) as i64;
            let shift = rational(eta) * p_pow(p, (diff as i64 - 1) / 2);
            (
                k_over_p.clone()
                    + BigRational::new(BigInt::from(eps0_star as i64 + eta_m1), BigInt::from(2)) * shift.clone(),
                p_pow(p, diff as i64 - 1) - k_over_p.clone()
                    + BigRational::new(BigInt::from(eps0_star as i64 - eta_m1), BigInt::from(2)) * shift,
            )
        };
        cs.push(c);
        ds.push(d);
    }
    (cs, ds)
}

/// Brute-force counts of the dual over the support, split by sign class.
pub fn dual_value_distribution(profile: &PlateauProfile, p: Prime) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    let mut total = vec![0u64; p.get() as usize];
    let mut plus = vec![0u64; p.get() as usize];
    let mut minus = vec![0u64; p.get() as usize];
    for &r in &profile.supp_ranks {
        let j = profile.dual[r] as usize;
        total[j] += 1;
        if profile.eps[r] == 1 {
            plus[j] += 1;
        } else {
            minus[j] += 1;
        }
    }
    (total, plus, minus)
}

/// Brute-force partial sums `S₀(α), S₁(α)` over the sign classes of the
/// dual spectrum, with kernel `ξ^{f(x) + <α, x>}`.
pub fn partial_walsh_sums(f: &PFunction, dual: &DualProfile, alpha: usize) -> (CycInt, CycInt) {
    let space = f.space();
    let p = space.p();
    let dots = space.functional_table(alpha);
    let mut raw0 = vec![BigInt::zero(); p.get() as usize];
    let mut raw1 = vec![BigInt::zero(); p.get() as usize];
    for r in 0..space.size() {
        let e = p.add(f.eval_rank(r) as u32, dots[r] as u32) as usize;
        if dual.eps_star[r] == 1 {
            raw0[e] += 1;
        } else {
            raw1[e] += 1;
        }
    }
    (CycInt::from_raw(p, raw0), CycInt::from_raw(p, raw1))
}

/// Closed forms for the partial sums at `α`:
/// off the support both vanish; on it,
/// even: `S₀ = (ε_α+1)/2 · p^{(n+s)/2} ξ^{f*(α)}`, `S₁ = (ε_α-1)/2 · ...`,
/// odd:  the same with `(ε_α ± η(-1))/2 · g · p^{(n+s-1)/2}`.
pub fn closed_partial_sums(f: &PFunction, profile: &PlateauProfile, alpha: usize) -> (CycInt, CycInt) {
    let p = f.p();
    if !profile.supp[alpha] {
        return (CycInt::zero(p), CycInt::zero(p));
    }
    let n = f.n();
    let s = profile.s;
    let eps = profile.eps[alpha] as i64;
    let j = profile.dual[alpha] as u32;
    if (n + s) % 2 == 0 {
        let scale = BigInt::from(p.get()).pow(((n + s) / 2) as u32);
        let base = CycInt::root(p, j).scalar_mul(&scale);
        (
            base.scalar_mul(&BigInt::from((eps + 1) / 2)),
            base.scalar_mul(&BigInt::from((eps - 1) / 2)),
        )
    } else {
        let scale = BigInt::from(p.get()).pow(((n + s - 1) / 2) as u32);
        let base = gauss_sum(p).mul_root(j).scalar_mul(&scale);
        let eta_m1 = p.eta_minus_one() as i64;
        (
            base.scalar_mul(&BigInt::from((eps + eta_m1) / 2)),
            base.scalar_mul(&BigInt::from((eps - eta_m1) / 2)),
        )
    }
}

/// Orbit structure of the support under scalar scaling.
#[derive(Debug, Clone)]
pub struct OrbitReport {
    /// Support and sign classes closed under `F_p^*` scaling.
    pub closure_ok: bool,
    /// Valid exponents `h` on `B_+(f)` with `f*(aα) = a^h f*(α)`.
    pub h: Vec<u32>,
    /// Valid exponents `h'` on `B_-(f)`.
    pub h_prime: Vec<u32>,
    /// Sign at 0 of `f` and of the dual spectrum agree exactly when
    /// `p^{n+s} ≡ 1 (mod 4)`.
    pub type_relation_ok: Option<bool>,
    /// `f*(0) = 0`.
    pub dual_zero_ok: bool,
}

pub fn orbit_exponents(
    f: &PFunction,
    profile: &PlateauProfile,
    dual: Option<&DualProfile>,
) -> OrbitReport {
    let p = f.p();
    let space = f.space();
    let mut closure_ok = true;
    'outer: for r in 0..space.size() {
        for a in 2..p.get() {
            let sr = space.scale_rank(r, a);
            if profile.supp[r] != profile.supp[sr] || profile.eps[r] != profile.eps[sr] {
                closure_ok = false;
                break 'outer;
            }
        }
    }
    let exponents = |set: &[usize]| -> Vec<u32> {
        (2..p.get())
            .filter(|&h| {
                gcd(h as u64 - 1, p.get() as u64 - 1) == 1
                    && set.iter().all(|&alpha| {
                        (1..p.get()).all(|a| {
                            let lhs = profile.dual[space.scale_rank(alpha, a)] as u32;
                            let rhs = p.mul(p.pow(a, h as u64), profile.dual[alpha] as u32);
                            lhs == rhs
                        })
                    })
            })
            .collect()
    };
    let h = exponents(&profile.b_plus());
    let h_prime = exponents(&profile.b_minus());
    let type_relation_ok = match (profile.eps0, dual) {
        (Some(e0), Some(d)) => {
            let n = f.n();
            let s = profile.s;
            let one_mod_four = p.get() % 4 == 1 || (n + s) % 2 == 0;
            Some(if one_mod_four { d.eps0_star == e0 } else { d.eps0_star == -e0 })
        }
        _ => None,
    };
    let dual_zero_ok = profile.j0 == Some(0);
    OrbitReport { closure_ok, h, h_prime, type_relation_ok, dual_zero_ok }
}

/// Which exponential-sum oracles to run.
#[derive(Debug, Clone, Copy)]
pub struct OracleSelection {
    /// `M_{a,b}` — needs only the plateau profile.
    pub affine: bool,
    /// `N_{(0,a)}`, `N_{(sq,a)}`, `N_{(nsq,a)}` — need family membership.
    pub hyperplane: bool,
    /// `N_{(i,a,b)}` — needs family membership with `t = t' = 2`.
    pub level: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Decide by query volume: exhaustive iff `p^{n+1} <= 3^9`.
    Auto,
    Exhaustive,
    /// All scalar parameters, 1000 vectors spread by rank stride.
    Sample,
}

#[derive(Debug, Clone, Default)]
pub struct SweepReport {
    pub exhaustive: bool,
    pub vectors: usize,
    pub checked: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<String>,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.mismatches == 0
    }
}

/// Exhaustive (or stride-sampled) comparison of the five counting oracles
/// against their closed forms. A single mismatch is a failure.
pub fn lemma_oracle_sweep(
    f: &PFunction,
    profile: &PlateauProfile,
    selection: OracleSelection,
    mode: SweepMode,
) -> SweepReport {
    let space = f.space();
    let p = space.p();
    let pp = p.get();
    let size = space.size();
    let exhaustive = match mode {
        SweepMode::Exhaustive => true,
        SweepMode::Sample => false,
        SweepMode::Auto => size * pp as usize <= 19_683,
    };
    let vectors: Vec<usize> = if exhaustive {
        (0..size).collect()
    } else {
        let stride = (size / 1000).max(1);
        (0..size).step_by(stride).collect()
    };

    let n = f.n();
    let s = profile.s;
    let half_inv = p.inv(4 % pp);

    let results: Vec<(u64, u64, Option<String>)> = vectors
        .par_iter()
        .map(|&b| {
            let dots = space.functional_table(b);
            // Joint counts #{x : f(x) = v, <b, x> = d}.
            let mut joint = vec![0u64; (pp * pp) as usize];
            for r in 0..size {
                joint[(f.eval_rank(r) as u32 * pp + dots[r] as u32) as usize] += 1;
            }
            let mut checked = 0u64;
            let mut mismatches = 0u64;
            let mut first = None;
            let record = |ok: bool, what: String, first: &mut Option<String>| {
                if !ok {
                    if first.is_none() {
                        *first = Some(what);
                    }
                    1u64
                } else {
                    0
                }
            };

            if selection.affine {
                for a in 0..pp {
                    let brute: u64 = (0..pp)
                        .map(|v| {
                            let d = p.neg(p.mul(a, v));
                            joint[(v * pp + d) as usize]
                        })
                        .sum();
                    let closed = closed_affine_count(p, n, s, profile, space, a, b);
                    checked += 1;
                    mismatches += record(
                        BigRational::from_integer(BigInt::from(brute)) == closed,
                        format!("M_(a={a}, b={b}): brute {brute} vs closed {closed}"),
                        &mut first,
                    );
                }
            }
            if selection.hyperplane {
                let n0 = joint[0];
                let nsq: u64 = (1..pp).filter(|&v| p.eta(v) == 1).map(|v| joint[(v * pp) as usize]).sum();
                let nnsq: u64 = (1..pp).filter(|&v| p.eta(v) == -1).map(|v| joint[(v * pp) as usize]).sum();
                let c0 = closed_zero_hyperplane_count(p, n, s, profile, b);
                let (csq, cnsq) = closed_square_hyperplane_counts(p, n, s, profile, b);
                checked += 3;
                mismatches += record(
                    BigRational::from_integer(BigInt::from(n0)) == c0,
                    format!("N_(0, a={b}): brute {n0} vs closed {c0}"),
                    &mut first,
                );
                mismatches += record(
                    BigRational::from_integer(BigInt::from(nsq)) == csq,
                    format!("N_(sq, a={b}): brute {nsq} vs closed {csq}"),
                    &mut first,
                );
                mismatches += record(
                    BigRational::from_integer(BigInt::from(nnsq)) == cnsq,
                    format!("N_(nsq, a={b}): brute {nnsq} vs closed {cnsq}"),
                    &mut first,
                );
            }
            if selection.level {
                for i in 1..pp {
                    for bb in 1..pp {
                        let brute = joint[(i * pp + bb) as usize];
                        let closed = closed_level_affine_count(p, n, s, profile, half_inv, i, b, bb);
                        checked += 1;
                        mismatches += record(
                            BigRational::from_integer(BigInt::from(brute)) == closed,
                            format!("N_(i={i}, a={b}, b={bb}): brute {brute} vs closed {closed}"),
                            &mut first,
                        );
                    }
                }
            }
            (checked, mismatches, first)
        })
        .collect();

    let mut report = SweepReport { exhaustive, vectors: vectors.len(), ..Default::default() };
    for (checked, mismatches, first) in results {
        report.checked += checked;
        report.mismatches += mismatches;
        if report.first_mismatch.is_none() {
            report.first_mismatch = first;
        }
    }
    report
}

/// `M_{a,b} = #{x : a f(x) + <b, x> = 0}` in closed form.
pub fn closed_affine_count(
    p: Prime,
    n: usize,
    s: usize,
    profile: &PlateauProfile,
    space: &Space,
    a: u32,
    b: usize,
) -> BigRational {
    if a == 0 {
        return if b == 0 { p_pow(p, n as i64) } else { p_pow(p, n as i64 - 1) };
    }
    let alpha = space.scale_rank(b, p.neg(p.inv(a)));
    if !profile.supp[alpha] {
        return p_pow(p, n as i64 - 1);
    }
    let eps = profile.eps[alpha] as i64;
    let fstar = profile.dual[alpha] as u32;
    if (n + s) % 2 == 0 {
        let delta = if fstar == 0 { p.get() as i64 } else { 0 };
        rational(eps) * rational(delta - 1) * p_pow(p, (n + s) as i64 / 2 - 1) + p_pow(p, n as i64 - 1)
    } else {
        let p_star = p.eta_minus_one() as i64 * p.get() as i64;
        rational(eps * p.eta(fstar) as i64 * p_star) * p_pow(p, ((n + s) as i64 - 3) / 2)
            + p_pow(p, n as i64 - 1)
    }
}

/// `N_{(0,a)} = #{x in D_{f,0} : <a, x> = 0}` in closed form (family members).
pub fn closed_zero_hyperplane_count(
    p: Prime,
    n: usize,
    s: usize,
    profile: &PlateauProfile,
    a: usize,
) -> BigRational {
    let eps0 = profile.eps0.expect("family members are unbalanced") as i64;
    let even = (n + s) % 2 == 0;
    if a == 0 {
        return if even {
            p_pow(p, n as i64 - 1) + rational(eps0 * (p.get() as i64 - 1)) * p_pow(p, (n + s) as i64 / 2 - 1)
        } else {
            p_pow(p, n as i64 - 1)
        };
    }
    if !profile.supp[a] {
        return if even {
            rational(eps0 * (p.get() as i64 - 1)) * p_pow(p, (n + s) as i64 / 2 - 2) + p_pow(p, n as i64 - 2)
        } else {
            p_pow(p, n as i64 - 2)
        };
    }
    let eps = profile.eps[a] as i64;
    let fstar = profile.dual[a] as u32;
    if even {
        let delta = if fstar == 0 { p.get() as i64 } else { 0 };
        rational((p.get() as i64 - 1) * (eps * (delta - 1) + eps0)) * p_pow(p, (n + s) as i64 / 2 - 2)
            + p_pow(p, n as i64 - 2)
    } else {
        let p_star = p.eta_minus_one() as i64 * p.get() as i64;
        rational(eps * (p.get() as i64 - 1) * p_star * p.eta(fstar) as i64)
            * p_pow(p, ((n + s) as i64 - 5) / 2)
            + p_pow(p, n as i64 - 2)
    }
}

/// `N_{(sq,a)}` and `N_{(nsq,a)}` in closed form (family members).
pub fn closed_square_hyperplane_counts(
    p: Prime,
    n: usize,
    s: usize,
    profile: &PlateauProfile,
    a: usize,
) -> (BigRational, BigRational) {
    let eps0 = profile.eps0.expect("family members are unbalanced") as i64;
    let even = (n + s) % 2 == 0;
    let half = BigRational::new(BigInt::from(p.get() as i64 - 1), BigInt::from(2));
    if a == 0 {
        return if even {
            let common = p_pow(p, n as i64 - 1) - rational(eps0) * p_pow(p, (n + s) as i64 / 2 - 1);
            (half.clone() * common.clone(), half * common)
        } else {
            let dev = rational(eps0) * p_pow(p, ((n + s) as i64 - 1) / 2);
            (
                half.clone() * (p_pow(p, n as i64 - 1) + dev.clone()),
                half * (p_pow(p, n as i64 - 1) - dev),
            )
        };
    }
    if !profile.supp[a] {
        return if even {
            let common = p_pow(p, n as i64 - 2) - rational(eps0) * p_pow(p, (n + s) as i64 / 2 - 2);
            (half.clone() * common.clone(), half * common)
        } else {
            let dev = rational(eps0) * p_pow(p, ((n + s) as i64 - 3) / 2);
            (
                half.clone() * (p_pow(p, n as i64 - 2) + dev.clone()),
                half * (p_pow(p, n as i64 - 2) - dev),
            )
        };
    }
    let eps = profile.eps[a] as i64;
    let fstar = profile.dual[a] as u32;
    if even {
        let eta = p.eta(fstar) as i64;
        let delta = if fstar == 0 { 1i64 } else { 0 };
        let shift = p_pow(p, (n + s) as i64 / 2 - 2);
        let sq = half.clone()
            * (p_pow(p, n as i64 - 2)
                + rational(eps * (p.get() as i64 * (eta - delta) + 1) - eps0) * shift.clone());
        let nsq = half
            * (p_pow(p, n as i64 - 2)
                - rational(eps * (p.get() as i64 * (eta + delta) - 1) + eps0) * shift);
        (sq, nsq)
    } else {
        let eta_neg = p.eta(p.neg(fstar)) as i64;
        let delta = if fstar == 0 { 1i64 } else { 0 };
        let shift = p_pow(p, ((n + s) as i64 - 3) / 2);
        let sq = half.clone()
            * (p_pow(p, n as i64 - 2)
                + rational(eps * (p.get() as i64 * delta - eta_neg - 1) + eps0) * shift.clone());
        let nsq = half
            * (p_pow(p, n as i64 - 2)
                - rational(eps * (p.get() as i64 * delta + eta_neg - 1) + eps0) * shift);
        (sq, nsq)
    }
}

/// `N_{(i,a,b)} = #{x in D_{f,i} : <a, x> = b}`, `i, b != 0`, in closed form
/// (family members with `t = t' = 2`).
pub fn closed_level_affine_count(
    p: Prime,
    n: usize,
    s: usize,
    profile: &PlateauProfile,
    four_inv: u32,
    i: u32,
    a: usize,
    b: u32,
) -> BigRational {
    let eps0 = profile.eps0.expect("family members are unbalanced") as i64;
    let even = (n + s) % 2 == 0;
    if a == 0 {
        return BigRational::zero();
    }
    if !profile.supp[a] {
        return if even {
            p_pow(p, n as i64 - 2) - rational(eps0) * p_pow(p, (n + s) as i64 / 2 - 2)
        } else {
            rational(eps0 * p.eta(i) as i64) * p_pow(p, ((n + s) as i64 - 3) / 2) + p_pow(p, n as i64 - 2)
        };
    }
    let eps = profile.eps[a] as i64;
    let fstar = profile.dual[a] as u32;
    let disc = p.add(p.mul(p.mul(b, b), four_inv), p.mul(i, fstar));
    if even {
        if fstar == 0 {
            rational(eps - eps0) * p_pow(p, (n + s) as i64 / 2 - 2) + p_pow(p, n as i64 - 2)
        } else {
            rational(eps * p.get() as i64 * p.eta(disc) as i64 + (eps - eps0))
                * p_pow(p, (n + s) as i64 / 2 - 2)
                + p_pow(p, n as i64 - 2)
        }
    } else if fstar == 0 {
        rational((eps0 - eps) * p.eta(i) as i64) * p_pow(p, ((n + s) as i64 - 3) / 2)
            + p_pow(p, n as i64 - 2)
    } else {
        let delta = if disc == 0 { p.get() as i64 } else { 0 };
        rational(
            eps * p.eta(p.neg(fstar)) as i64 * (delta - 1) + (eps0 - eps) * p.eta(i) as i64,
        ) * p_pow(p, ((n + s) as i64 - 3) / 2)
            + p_pow(p, n as i64 - 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::quadratic_form;

    fn p(v: u32) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn constant_zero_function_spectrum() {
        let f = quadratic_form(p(3), &[0, 0]).unwrap();
        let w = walsh_transform(&f);
        assert_eq!(w.value(0).as_int().unwrap(), BigInt::from(9));
        for r in 1..9 {
            assert!(w.value(r).is_zero());
        }
    }

    #[test]
    fn bent_two_squares() {
        let f = quadratic_form(p(3), &[1, 1]).unwrap();
        let w = walsh_transform(&f);
        for r in 0..9 {
            assert_eq!(w.value(r).norm_sq().unwrap(), BigInt::from(9));
        }
        assert!(w.parseval_holds());
        let prof = classify_plateaued(&f, &w).unwrap();
        assert_eq!(prof.s, 0);
        assert_eq!(prof.eps0, Some(-1));
        assert!(prof.weakly_regular);
        assert_eq!(prof.k, 0);
        assert_eq!(prof.j0, Some(0));
        // W(0) = (ξ - ξ²)² = -3.
        assert_eq!(w.value(0).as_int().unwrap(), BigInt::from(-3));
        // Value distribution matches the closed form with ε₀ = -1, j₀ = 0.
        assert_eq!(f.value_counts(), vec![1, 4, 4]);
        let closed = closed_value_counts(p(3), 2, 0, -1, 0);
        for (j, c) in closed.iter().enumerate() {
            assert_eq!(*c, BigRational::from_integer(BigInt::from(f.value_counts()[j])));
        }
    }

    #[test]
    fn fast_equals_naive_on_random_functions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &(q, n) in &[(3u32, 3usize), (3, 4), (5, 2), (5, 3)] {
            let pr = p(q);
            let space = Space::dot(pr, n).unwrap();
            for _ in 0..12 {
                let table: Vec<u8> = (0..space.size()).map(|_| rng.gen_range(0..q) as u8).collect();
                let f = PFunction::new(space.clone(), table).unwrap();
                let fast = walsh_transform(&f);
                let naive = walsh_transform_naive(&f);
                assert_eq!(fast.values(), naive.values());
            }
        }
    }

    #[test]
    fn classify_rejects_non_plateaued() {
        // x1^3 + x2 over F_5 is not plateaued (mixed magnitudes).
        let space = Space::dot(p(5), 2).unwrap();
        let f = PFunction::from_fn(space, |x| {
            let p5 = Prime::new(5).unwrap();
            p5.add(p5.pow(x[0] as u32, 3), x[1] as u32)
        });
        let w = walsh_transform(&f);
        assert!(classify_plateaued(&f, &w).is_none());
    }

    #[test]
    fn dummy_variable_raises_plateau_level() {
        let f = quadratic_form(p(3), &[1, 2, 0]).unwrap();
        let w = walsh_transform(&f);
        let prof = classify_plateaued(&f, &w).unwrap();
        assert_eq!(prof.s, 1);
        assert_eq!(prof.eps0, Some(1));
        assert_eq!(prof.k, 9);
        assert!(prof.weakly_regular);
    }

    #[test]
    fn reconstruction_roundtrip() {
        let f = quadratic_form(p(3), &[1, 2, 1]).unwrap();
        let w = walsh_transform(&f);
        let prof = classify_plateaued(&f, &w).unwrap();
        let back = reconstruct_spectrum(&f, &prof);
        assert_eq!(back.values(), w.values());
    }

    #[test]
    fn weakly_regular_dual_is_bent_relative() {
        let f = quadratic_form(p(3), &[1, 2, 0]).unwrap();
        let w = walsh_transform(&f);
        let prof = classify_plateaued(&f, &w).unwrap();
        let dual = dual_profile(&f, &prof).unwrap();
        // f**(x) = f(-x) = f(x) for the even function.
        for r in 0..27 {
            assert_eq!(dual.f_star_star[r], f.eval_rank(r));
        }
    }

    #[test]
    fn balanced_linear_function_dual() {
        let space = Space::dot(p(3), 1).unwrap();
        let f = PFunction::from_fn(space, |x| x[0] as u32);
        let w = walsh_transform(&f);
        let prof = classify_plateaued(&f, &w).unwrap();
        assert!(prof.balanced);
        assert_eq!(prof.s, 1);
        let dual = dual_profile(&f, &prof).unwrap();
        for r in 0..3 {
            assert_eq!(dual.f_star_star[r], f.eval_rank(space_neg(&f, r)));
        }
    }

    fn space_neg(f: &PFunction, r: usize) -> usize {
        f.space().neg_rank(r)
    }

    #[test]
    fn quadratic_forms_are_family_members() {
        let f = quadratic_form(p(3), &[1, 1]).unwrap();
        let w = walsh_transform(&f);
        let prof = classify_plateaued(&f, &w).unwrap();
        let dual = dual_profile(&f, &prof).unwrap();
        let fam = family_f_check(&f, &prof, Some(&dual));
        assert!(fam.member, "{:?}", fam.failures);
        assert!(fam.t.contains(&2));
        assert!(fam.t_prime.contains(&2));
        assert_eq!(lform_exponents(&f), vec![2]);
    }

    #[test]
    fn nonzero_constant_breaks_membership() {
        let space = Space::dot(p(3), 2).unwrap();
        let f = PFunction::from_fn(space, |x| {
            let p3 = Prime::new(3).unwrap();
            p3.add(p3.add(p3.mul(x[0] as u32, x[0] as u32), p3.mul(x[1] as u32, x[1] as u32)), 1)
        });
        let w = walsh_transform(&f);
        let prof = classify_plateaued(&f, &w).unwrap();
        let dual = dual_profile(&f, &prof);
        let fam = family_f_check(&f, &prof, dual.as_ref());
        assert!(!fam.member);
        assert!(fam.failures.iter().any(|m| m.contains("f(0)")));
    }

    #[test]
    fn linear_function_lform() {
        let space = Space::dot(p(5), 2).unwrap();
        let f = PFunction::from_fn(space, |x| x[0] as u32);
        assert_eq!(lform_exponents(&f), vec![1]);
    }

    #[test]
    fn partial_sums_match_closed_forms_small() {
        for coeffs in [[1u8, 1], [1, 2]] {
            let f = quadratic_form(p(3), &coeffs).unwrap();
            let w = walsh_transform(&f);
            let prof = classify_plateaued(&f, &w).unwrap();
            let dual = dual_profile(&f, &prof).unwrap();
            for alpha in 0..9 {
                let (s0, s1) = partial_walsh_sums(&f, &dual, alpha);
                let (c0, c1) = closed_partial_sums(&f, &prof, alpha);
                assert_eq!(s0, c0, "S0 at {alpha}");
                assert_eq!(s1, c1, "S1 at {alpha}");
            }
        }
    }

    #[test]
    fn orbit_exponents_on_quadratic() {
        let f = quadratic_form(p(5), &[1, 1]).unwrap();
        let w = walsh_transform(&f);
        let prof = classify_plateaued(&f, &w).unwrap();
        let dual = dual_profile(&f, &prof).unwrap();
        let orbit = orbit_exponents(&f, &prof, Some(&dual));
        assert!(orbit.closure_ok);
        assert!(orbit.h.contains(&2));
        assert!(orbit.dual_zero_ok);
        assert_eq!(orbit.type_relation_ok, Some(true));
    }

    #[test]
    fn oracle_sweep_quadratics() {
        for (q, coeffs) in [(3u32, vec![1u8, 1]), (3, vec![1, 2, 0]), (5, vec![1, 2]), (3, vec![1, 1, 1])] {
            let pr = p(q);
            let f = quadratic_form(pr, &coeffs).unwrap();
            let w = walsh_transform(&f);
            let prof = classify_plateaued(&f, &w).unwrap();
            let report = lemma_oracle_sweep(
                &f,
                &prof,
                OracleSelection { affine: true, hyperplane: true, level: true },
                SweepMode::Exhaustive,
            );
            assert!(report.ok(), "mismatch: {:?}", report.first_mismatch);
        }
    }

    #[test]
    fn whole_space_count_is_trivial() {
        let f = quadratic_form(p(3), &[1, 1]).unwrap();
        let w = walsh_transform(&f);
        let prof = classify_plateaued(&f, &w).unwrap();
        let m00 = closed_affine_count(p(3), 2, 0, &prof, f.space(), 0, 0);
        assert_eq!(m00, BigRational::from_integer(BigInt::from(9)));
        // a=1, b=0: the count is N_0(f) = 1.
        let m10 = closed_affine_count(p(3), 2, 0, &prof, f.space(), 1, 0);
        assert_eq!(m10, BigRational::from_integer(BigInt::from(1)));
    }
}
