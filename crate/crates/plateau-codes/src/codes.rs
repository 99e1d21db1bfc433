//! Linear-code core: generator matrices for the function-based code
//! families, exact weight enumeration, MacWilliams duals, and the
//! self-orthogonality / LCD / minimality / bound predicates.

use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::field::{Prime, Space, ENUM_GUARD};
use crate::linalg::Mat;
use crate::spectral::{PFunction, WalshSpectrum};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};

/// A generator matrix plus the provenance of each coordinate (the rank of
/// the defining vector, when the column comes from one).
#[derive(Debug, Clone)]
pub struct GenMatrix {
    pub mat: Mat,
    pub col_ranks: Option<Vec<usize>>,
}

impl GenMatrix {
    pub fn p(&self) -> Prime {
        self.mat.p()
    }

    pub fn length(&self) -> usize {
        self.mat.cols()
    }

    pub fn rows(&self) -> usize {
        self.mat.rows()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.mat.rows() {
            let row: Vec<String> = self.mat.row(i).iter().map(|d| d.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Rows of `<e_i, x>` for the canonical coordinate basis over the given
/// columns, i.e. the evaluation of every linear functional.
fn functional_rows(space: &Space, cols: &[usize]) -> Vec<Vec<u8>> {
    let n = space.n();
    (0..n)
        .map(|i| {
            let mut basis = vec![0u8; n];
            basis[i] = 1;
            let basis_rank = space.rank_of(&basis);
            let table = space.functional_table(basis_rank);
            cols.iter().map(|&x| table[x]).collect()
        })
        .collect()
}

/// The code spanned by the function row and all linear functionals over
/// `V \ {0}`; message `(a, b)` maps to `a f(x) + <b, x>` per column.
pub fn build_cf(f: &PFunction) -> Result<GenMatrix> {
    if f.eval_rank(0) != 0 {
        return Err(Error::Hypothesis("construction requires f(0) = 0".into()));
    }
    let cols: Vec<usize> = (1..f.space().size()).collect();
    Ok(build_cf_over(f, cols))
}

/// Same construction punctured to the columns where `f` is nonzero.
pub fn build_cf_punctured(f: &PFunction) -> Result<GenMatrix> {
    if f.eval_rank(0) != 0 {
        return Err(Error::Hypothesis("construction requires f(0) = 0".into()));
    }
    let cols: Vec<usize> = (0..f.space().size()).filter(|&r| f.eval_rank(r) != 0).collect();
    Ok(build_cf_over(f, cols))
}

fn build_cf_over(f: &PFunction, cols: Vec<usize>) -> GenMatrix {
    let space = f.space();
    let mut rows = Vec::with_capacity(space.n() + 1);
    rows.push(cols.iter().map(|&x| f.eval_rank(x)).collect::<Vec<u8>>());
    rows.extend(functional_rows(space, &cols));
    GenMatrix { mat: Mat::from_rows(space.p(), rows), col_ranks: Some(cols) }
}

/// How orbit representatives are picked; the alternative selector exists to
/// exercise representative-invariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RepSelector {
    #[default]
    Canonical,
    Alternative,
}

/// Provenance of a defining set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetKind {
    AllNonzero,
    ComplementOfZeroSet,
    ZeroSetMinusOrigin,
    SquareSet,
    NonsquareSet,
    /// Scalar-orbit representatives of the complement of the zero set.
    ComplementOrbitReps,
    /// Scalar-orbit representatives of the zero set minus the origin.
    ZeroSetOrbitReps,
    /// Representatives covering the square (resp. nonsquare) levels.
    SquareSetReps,
    NonsquareSetReps,
    /// Sign-pair representatives of a single level set.
    LevelPairReps(u32),
    Custom,
}

#[derive(Debug, Clone)]
pub struct DefiningSet {
    pub kind: SetKind,
    pub ranks: Vec<usize>,
}

impl DefiningSet {
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

fn first_nonzero_digit(space: &Space, rank: usize) -> Option<u8> {
    space.digits_of(rank).into_iter().find(|&d| d != 0)
}

fn orbit_reps(space: &Space, member: impl Fn(usize) -> bool, selector: RepSelector) -> Vec<usize> {
    match selector {
        RepSelector::Canonical => (1..space.size())
            .filter(|&r| member(r) && first_nonzero_digit(space, r) == Some(1))
            .collect(),
        RepSelector::Alternative => {
            // Largest rank in each scalar orbit.
            (1..space.size())
                .filter(|&r| member(r) && (2..space.p().get()).all(|a| space.scale_rank(r, a) < r))
                .collect()
        }
    }
}

fn pair_reps(space: &Space, member: impl Fn(usize) -> bool, selector: RepSelector) -> Vec<usize> {
    (1..space.size())
        .filter(|&r| {
            if !member(r) {
                return false;
            }
            let neg = space.neg_rank(r);
            match selector {
                RepSelector::Canonical => r < neg,
                RepSelector::Alternative => r > neg,
            }
        })
        .collect()
}

pub fn zero_set_minus_origin(f: &PFunction) -> DefiningSet {
    let ranks = (1..f.space().size()).filter(|&r| f.eval_rank(r) == 0).collect();
    DefiningSet { kind: SetKind::ZeroSetMinusOrigin, ranks }
}

pub fn square_set(f: &PFunction) -> DefiningSet {
    DefiningSet { kind: SetKind::SquareSet, ranks: f.square_level_set() }
}

pub fn nonsquare_set(f: &PFunction) -> DefiningSet {
    DefiningSet { kind: SetKind::NonsquareSet, ranks: f.nonsquare_level_set() }
}

/// Scalar-orbit representatives of `V \ D_{f,0}`; the scaled copies
/// partition the complement.
pub fn complement_orbit_reps(f: &PFunction, selector: RepSelector) -> Result<DefiningSet> {
    let ranks = orbit_reps(f.space(), |r| f.eval_rank(r) != 0, selector);
    let set = DefiningSet { kind: SetKind::ComplementOrbitReps, ranks };
    validate_orbit_cover(f.space(), &set.ranks, &|r| r != 0 && f.eval_rank(r) != 0)?;
    Ok(set)
}

/// Scalar-orbit representatives of `D_{f,0} \ {0}`.
pub fn zero_set_orbit_reps(f: &PFunction, selector: RepSelector) -> Result<DefiningSet> {
    let ranks = orbit_reps(f.space(), |r| r != 0 && f.eval_rank(r) == 0, selector);
    let set = DefiningSet { kind: SetKind::ZeroSetOrbitReps, ranks };
    validate_orbit_cover(f.space(), &set.ranks, &|r| r != 0 && f.eval_rank(r) == 0)?;
    Ok(set)
}

/// Representatives covering the square levels: sign-pair representatives of
/// the smallest square level when the function scales quadratically
/// everywhere (the scalar orbits then sweep the whole square class),
/// otherwise scalar-orbit representatives of the full square set.
pub fn square_set_reps(
    f: &PFunction,
    quadratic_scaling: bool,
    selector: RepSelector,
) -> Result<DefiningSet> {
    let p = f.p();
    if quadratic_scaling {
        let level = (1..p.get()).find(|&i| p.eta(i) == 1).expect("squares exist");
        let mut set = level_pair_reps(f, level, selector)?;
        set.kind = SetKind::SquareSetReps;
        validate_orbit_cover(f.space(), &set.ranks, &|r| p.eta(f.eval_rank(r) as u32) == 1)?;
        Ok(set)
    } else {
        let ranks = orbit_reps(f.space(), |r| p.eta(f.eval_rank(r) as u32) == 1, selector);
        let set = DefiningSet { kind: SetKind::SquareSetReps, ranks };
        validate_orbit_cover(f.space(), &set.ranks, &|r| p.eta(f.eval_rank(r) as u32) == 1)?;
        Ok(set)
    }
}

pub fn nonsquare_set_reps(
    f: &PFunction,
    quadratic_scaling: bool,
    selector: RepSelector,
) -> Result<DefiningSet> {
    let p = f.p();
    if quadratic_scaling {
        let level = (1..p.get()).find(|&i| p.eta(i) == -1).expect("nonsquares exist");
        let mut set = level_pair_reps(f, level, selector)?;
        set.kind = SetKind::NonsquareSetReps;
        validate_orbit_cover(f.space(), &set.ranks, &|r| p.eta(f.eval_rank(r) as u32) == -1)?;
        Ok(set)
    } else {
        let ranks = orbit_reps(f.space(), |r| p.eta(f.eval_rank(r) as u32) == -1, selector);
        let set = DefiningSet { kind: SetKind::NonsquareSetReps, ranks };
        validate_orbit_cover(f.space(), &set.ranks, &|r| p.eta(f.eval_rank(r) as u32) == -1)?;
        Ok(set)
    }
}

/// Sign-pair representatives of the single level set `D_{f,i}`.
pub fn level_pair_reps(f: &PFunction, i: u32, selector: RepSelector) -> Result<DefiningSet> {
    let ranks = pair_reps(f.space(), |r| f.eval_rank(r) as u32 == i, selector);
    let set = DefiningSet { kind: SetKind::LevelPairReps(i), ranks };
    validate_pair_cover(f.space(), &set.ranks, &|r| f.eval_rank(r) as u32 == i)?;
    Ok(set)
}

/// Checks that the scalar multiples of `reps` tile the target exactly once.
pub fn validate_orbit_cover(
    space: &Space,
    reps: &[usize],
    target: &dyn Fn(usize) -> bool,
) -> Result<()> {
    let mut seen = vec![false; space.size()];
    for &r in reps {
        for a in 1..space.p().get() {
            let s = space.scale_rank(r, a);
            if !target(s) {
                return Err(Error::Verification(format!(
                    "scaled representative {s} leaves the target set"
                )));
            }
            if seen[s] {
                return Err(Error::Verification(format!("rank {s} covered twice by the representatives")));
            }
            seen[s] = true;
        }
    }
    for r in 0..space.size() {
        if target(r) && !seen[r] {
            return Err(Error::Verification(format!("rank {r} not covered by the representatives")));
        }
    }
    Ok(())
}

/// Checks that `reps ∪ -reps` tiles the target exactly once.
pub fn validate_pair_cover(
    space: &Space,
    reps: &[usize],
    target: &dyn Fn(usize) -> bool,
) -> Result<()> {
    let mut seen = vec![false; space.size()];
    for &r in reps {
        for s in [r, space.neg_rank(r)] {
            if !target(s) {
                return Err(Error::Verification(format!("representative {s} leaves the target set")));
            }
            if seen[s] {
                return Err(Error::Verification(format!("rank {s} covered twice by the representatives")));
            }
            seen[s] = true;
        }
    }
    for r in 0..space.size() {
        if target(r) && !seen[r] {
            return Err(Error::Verification(format!("rank {r} not covered by the representatives")));
        }
    }
    Ok(())
}

/// A caller-supplied representative set, validated against the covering
/// invariant.
pub fn custom_zero_set_reps(f: &PFunction, ranks: Vec<usize>) -> Result<DefiningSet> {
    validate_orbit_cover(f.space(), &ranks, &|r| r != 0 && f.eval_rank(r) == 0)?;
    Ok(DefiningSet { kind: SetKind::Custom, ranks })
}

/// The defining-set code: rows are the coordinate functionals evaluated on
/// the set, message `a` maps to `(<a, x>)_{x in D}`.
pub fn build_cd(space: &Space, set: &DefiningSet) -> GenMatrix {
    let rows = functional_rows(space, &set.ranks);
    GenMatrix { mat: Mat::from_rows(space.p(), rows), col_ranks: Some(set.ranks.clone()) }
}

/// Exact weight distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightDist {
    pub length: usize,
    /// Rank of the generator actually enumerated.
    pub rank: usize,
    pub counts: BTreeMap<usize, BigUint>,
}

impl WeightDist {
    pub fn min_distance(&self) -> usize {
        self.counts.keys().copied().find(|&w| w > 0).unwrap_or(0)
    }

    pub fn max_weight(&self) -> usize {
        self.counts.keys().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    /// Weight enumerator rendered as `1 + A_w z^w + ...`.
    pub fn enumerator(&self) -> String {
        let mut parts = Vec::new();
        for (&w, count) in &self.counts {
            if w == 0 {
                parts.push("1".to_string());
            } else {
                parts.push(format!("{count}z^{w}"));
            }
        }
        parts.join(" + ")
    }
}

/// Enumerates all `p^rank` codewords of the row space. The message space is
/// walked so consecutive messages differ by adding one basis row; chunks
/// over leading digits run in parallel and merge deterministically.
pub fn weight_distribution(g: &GenMatrix) -> Result<WeightDist> {
    let p = g.p();
    let (rref, pivots) = g.mat.rref();
    let rank = pivots.len();
    let m = g.length();
    let mut total = 1u64;
    for _ in 0..rank {
        total = total
            .checked_mul(p.get() as u64)
            .filter(|&t| t <= ENUM_GUARD)
            .ok_or_else(|| Error::Guard(format!("p^{rank} codewords exceed the enumeration cap")))?;
    }
    if rank == 0 {
        let mut counts = BTreeMap::new();
        counts.insert(0usize, BigUint::one());
        return Ok(WeightDist { length: m, rank: 0, counts });
    }
    let basis: Vec<&[u8]> = (0..rank).map(|i| rref.row(i)).collect();
    let prefix_digits = rank.min(2);
    let chunk_count = (p.get() as usize).pow(prefix_digits as u32);
    let suffix_rows = rank - prefix_digits;
    let suffix_count = (p.get() as u64).pow(suffix_rows as u32);

    let histograms: Vec<Vec<u64>> = (0..chunk_count)
        .into_par_iter()
        .map(|chunk| {
            let mut hist = vec![0u64; m + 1];
            let mut word = vec![0u8; m];
            let mut c = chunk;
            for d in (0..prefix_digits).rev() {
                let digit = (c % p.get() as usize) as u8;
                c /= p.get() as usize;
                if digit != 0 {
                    add_scaled(p, &mut word, basis[d], digit);
                }
            }
            let mut odometer = vec![0u8; suffix_rows];
            let mut weight = word.iter().filter(|&&v| v != 0).count();
            hist[weight] += 1;
            for _ in 1..suffix_count {
                // Increment the base-p odometer; each reset digit wraps
                // p-1 -> 0, a change of +1 mod p, so add that row once.
                let mut pos = suffix_rows;
                loop {
                    pos -= 1;
                    add_row(p, &mut word, basis[prefix_digits + pos]);
                    if odometer[pos] == p.get() as u8 - 1 {
                        odometer[pos] = 0;
                    } else {
                        odometer[pos] += 1;
                        break;
                    }
                }
                weight = word.iter().filter(|&&v| v != 0).count();
                hist[weight] += 1;
            }
            hist
        })
        .collect();

    let mut counts = BTreeMap::new();
    for hist in histograms {
        for (w, c) in hist.into_iter().enumerate() {
            if c > 0 {
                *counts.entry(w).or_insert_with(BigUint::zero) += BigUint::from(c);
            }
        }
    }
    Ok(WeightDist { length: m, rank, counts })
}

#[inline]
fn add_row(p: Prime, word: &mut [u8], row: &[u8]) {
    let q = p.get() as u8;
    for (w, &r) in word.iter_mut().zip(row) {
        let v = *w + r;
        *w = if v >= q { v - q } else { v };
    }
}

#[inline]
fn add_scaled(p: Prime, word: &mut [u8], row: &[u8], scale: u8) {
    for (w, &r) in word.iter_mut().zip(row) {
        *w = p.add(*w as u32, p.mul(r as u32, scale as u32)) as u8;
    }
}

/// Galois-trace of a cyclotomic integer down to the rationals:
/// `Σ_{u != 0} σ_u(z) = -(sum of basis coefficients)`.
fn galois_trace(w: &CycInt) -> BigInt {
    let mut s = BigInt::zero();
    for j in 1..w.modulus() {
        s += w.coeff(j);
    }
    -s
}

/// Independent weight computation for the function-based codes: message
/// `(a, b)` has weight `p^n - M_{a,b}` over the nonzero columns, minus the
/// zero-level correction when those columns are removed. `M_{a,b}` comes
/// from Galois-summing the exact Walsh value, never from counting.
pub fn cf_weights_via_spectrum(
    f: &PFunction,
    spectrum: &WalshSpectrum,
    punctured: bool,
) -> Result<WeightDist> {
    let space = f.space();
    let p = space.p();
    let size = space.size();
    let pn = size as i64;
    let n0 = f.level_set(0).len() as i64;
    let length = if punctured { (pn - n0) as usize } else { size - 1 };

    let traces: Vec<BigInt> = spectrum.values().par_iter().map(galois_trace).collect();

    // Indicator spectrum of the zero set for the punctured correction:
    // N_(0,b) = (#D_{f,0} + Σ_{u != 0} σ_u(Θ(b))) / p.
    let zero_traces: Option<Vec<BigInt>> = if punctured {
        let partial: Vec<Option<u8>> =
            (0..size).map(|r| if f.eval_rank(r) == 0 { Some(0) } else { None }).collect();
        let theta = crate::spectral::restricted_transform(space, &partial);
        Some(theta.par_iter().map(galois_trace).collect())
    } else {
        None
    };

    let p_big = BigInt::from(p.get());
    let mut counts: BTreeMap<usize, BigUint> = BTreeMap::new();
    for a in 0..p.get() {
        for b in 0..size {
            if a == 0 && b == 0 {
                *counts.entry(0).or_insert_with(BigUint::zero) += BigUint::one();
                continue;
            }
            let m_ab: BigInt = if a == 0 {
                BigInt::from(pn / p.get() as i64)
            } else {
                let alpha = space.scale_rank(b, p.neg(p.inv(a)));
                exact_div(BigInt::from(pn) + &traces[alpha], &p_big)
            };
            let weight = if punctured {
                let zt = zero_traces.as_ref().expect("punctured path");
                let n0b = exact_div(BigInt::from(n0) + &zt[b], &p_big);
                BigInt::from(pn - n0) - (m_ab - n0b)
            } else {
                BigInt::from(pn) - m_ab
            };
            let w = weight.to_usize().ok_or_else(|| {
                Error::Verification("spectrum path produced a negative weight".into())
            })?;
            *counts.entry(w).or_insert_with(BigUint::zero) += BigUint::one();
        }
    }
    Ok(WeightDist { length, rank: f.n() + 1, counts })
}

fn exact_div(num: BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_rem(den);
    assert!(r.is_zero(), "expected exact division");
    q
}

pub fn binomial(m: u64, j: u64) -> BigUint {
    if j > m {
        return BigUint::zero();
    }
    let j = j.min(m - j);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..j {
        num *= BigUint::from(m - i);
        den *= BigUint::from(i + 1);
    }
    num / den
}

/// Dual weight distribution via the exact MacWilliams transform:
/// `A'_j = p^{-k} Σ_i A_i K_j(i)` with big-integer Krawtchouk values from
/// the three-term recurrence. Fails hard on non-integral or negative output.
pub fn macwilliams(dist: &WeightDist, p: Prime) -> Result<Vec<BigUint>> {
    let m = dist.length;
    let k = dist.rank;
    let q = BigInt::from(p.get());
    let support: Vec<(usize, BigInt)> =
        dist.counts.iter().map(|(&w, c)| (w, BigInt::from(c.clone()))).collect();

    // For each support point x, all K_j(x) by the recurrence
    // (j+1) K_{j+1}(x) = [j + (p-1)(m-j) - p x] K_j(x) - (p-1)(m-j+1) K_{j-1}(x).
    let per_point: Vec<Vec<BigInt>> = support
        .par_iter()
        .map(|&(x, _)| {
            let mut values = Vec::with_capacity(m + 1);
            let x = BigInt::from(x as u64);
            let pm1 = BigInt::from(p.get() as u64 - 1);
            values.push(BigInt::one());
            if m >= 1 {
                values.push(&pm1 * (BigInt::from(m as u64) - &x) - &x);
            }
            for j in 1..m {
                let a = BigInt::from(j as u64) + &pm1 * BigInt::from((m - j) as u64) - &q * &x;
                let b = &pm1 * BigInt::from((m - j + 1) as u64);
                let next = (&a * &values[j] - &b * &values[j - 1]) / BigInt::from(j as u64 + 1);
                values.push(next);
            }
            values
        })
        .collect();

    let scale = q.pow(k as u32);
    let mut out = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let mut acc = BigInt::zero();
        for (idx, (_, count)) in support.iter().enumerate() {
            acc += count * &per_point[idx][j];
        }
        let (quot, rem) = acc.div_rem(&scale);
        if !rem.is_zero() || quot.is_negative() {
            return Err(Error::Verification(format!(
                "MacWilliams output at weight {j} is not a nonnegative integer"
            )));
        }
        out.push(quot.to_biguint().expect("nonnegative"));
    }
    let total: BigUint = out.iter().sum();
    let expect = BigUint::from(p.get()).pow((m - k) as u32);
    if total != expect {
        return Err(Error::Verification(format!(
            "MacWilliams total {total} differs from p^(m-k) = {expect}"
        )));
    }
    Ok(out)
}

pub fn dual_min_distance(dual_dist: &[BigUint]) -> usize {
    dual_dist.iter().enumerate().skip(1).find(|(_, c)| !c.is_zero()).map(|(j, _)| j).unwrap_or(0)
}

/// Stirling numbers of the second kind up to r = 5.
const STIRLING2: [[i64; 6]; 6] = [
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 1, 1, 0, 0, 0],
    [0, 1, 3, 1, 0, 0],
    [0, 1, 7, 6, 1, 0],
    [0, 1, 15, 25, 10, 1],
];

/// First dual-weight counts `A^⊥_1 .. A^⊥_upto` from the power moments of
/// the primal distribution:
/// `Σ_j j^r A_j = Σ_{t<=r} (-1)^t A^⊥_t Σ_{ν=t}^{r} ν! S(r,ν) p^{k-ν} (p-1)^{ν-t} C(m-t, ν-t)`.
pub fn pless_dual_prefix(dist: &WeightDist, p: Prime, upto: usize) -> Result<Vec<BigInt>> {
    assert!(upto <= 5);
    let m = dist.length as u64;
    let k = dist.rank as i64;
    let q = BigInt::from(p.get());
    let q_rat = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(q.pow(e as u32))
        } else {
            BigRational::new(BigInt::one(), q.pow((-e) as u32))
        }
    };
    let moments: Vec<BigRational> = (0..=upto)
        .map(|r| {
            let mut acc = BigInt::zero();
            for (&w, c) in &dist.counts {
                acc += BigInt::from(w as u64).pow(r as u32) * BigInt::from(c.clone());
            }
            BigRational::from_integer(acc)
        })
        .collect();
    let coeff = |r: usize, t: usize| -> BigRational {
        let mut acc = BigRational::zero();
        for nu in t..=r {
            let stir = STIRLING2[r][nu];
            if stir == 0 {
                continue;
            }
            let mut term = BigRational::from_integer(BigInt::from(factorial(nu) * stir));
            term *= q_rat(k - nu as i64);
            term *= BigRational::from_integer(BigInt::from(p.get() as i64 - 1).pow((nu - t) as u32));
            term *= BigRational::from_integer(BigInt::from(binomial(m - t as u64, (nu - t) as u64)));
            acc += term;
        }
        acc
    };
    let mut duals: Vec<BigRational> = vec![BigRational::one()]; // A^⊥_0 = 1
    for r in 1..=upto {
        let mut rhs = moments[r].clone();
        for (t, a) in duals.iter().enumerate() {
            let sign = if t % 2 == 0 { BigRational::one() } else { -BigRational::one() };
            rhs -= sign * a * coeff(r, t);
        }
        let lead = coeff(r, r);
        let sign = if r % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        duals.push(rhs / (sign * lead));
    }
    duals
        .into_iter()
        .skip(1)
        .map(|a| {
            if a.is_integer() {
                Ok(a.to_integer())
            } else {
                Err(Error::Verification("power-moment solution is not integral".into()))
            }
        })
        .collect()
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product::<i64>().max(1)
}

/// Dual distance by column dependencies, exact when at most 4. Independent
/// of the MacWilliams route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualDistance {
    Exact(usize),
    AtLeastFive,
}

impl DualDistance {
    pub fn as_exact(&self) -> Option<usize> {
        match self {
            DualDistance::Exact(d) => Some(*d),
            DualDistance::AtLeastFive => None,
        }
    }
}

pub fn dual_distance_upto4(g: &GenMatrix) -> DualDistance {
    let p = g.p();
    let m = g.length();
    let k = g.rows();
    let columns: Vec<Vec<u8>> = (0..m).map(|j| g.mat.column(j)).collect();
    // Weight 1: a zero column.
    if columns.iter().any(|c| c.iter().all(|&v| v == 0)) {
        return DualDistance::Exact(1);
    }
    let normalize = |col: &[u8]| -> Vec<u8> {
        let lead = col.iter().find(|&&v| v != 0).copied().expect("nonzero column");
        let inv = p.inv(lead as u32);
        col.iter().map(|&v| p.mul(v as u32, inv) as u8).collect()
    };
    // Weight 2: two proportional columns.
    let mut index: HashMap<Vec<u8>, Vec<usize>> = HashMap::new();
    for (j, col) in columns.iter().enumerate() {
        index.entry(normalize(col)).or_default().push(j);
    }
    if index.values().any(|cols| cols.len() > 1) {
        return DualDistance::Exact(2);
    }
    // Weight 3: a column in the span of two others.
    let mut scratch = vec![0u8; k];
    for i in 0..m {
        for j in i + 1..m {
            for mu in 1..p.get() {
                for (s, (&a, &b)) in scratch.iter_mut().zip(columns[i].iter().zip(&columns[j])) {
                    *s = p.add(a as u32, p.mul(mu, b as u32)) as u8;
                }
                if scratch.iter().all(|&v| v == 0) {
                    continue;
                }
                if let Some(hits) = index.get(&normalize(&scratch)) {
                    if hits.iter().any(|&h| h != i && h != j) {
                        return DualDistance::Exact(3);
                    }
                }
            }
        }
    }
    // Weight 4: two disjoint column pairs spanning a common projective point.
    let mut pair_index: HashMap<Vec<u8>, Vec<(usize, usize)>> = HashMap::new();
    for i in 0..m {
        for j in i + 1..m {
            for mu in 1..p.get() {
                let mut v = vec![0u8; k];
                for (s, (&a, &b)) in v.iter_mut().zip(columns[i].iter().zip(&columns[j])) {
                    *s = p.add(a as u32, p.mul(mu, b as u32)) as u8;
                }
                if v.iter().all(|&x| x == 0) {
                    continue;
                }
                let key = normalize(&v);
                let entry = pair_index.entry(key).or_default();
                if entry.iter().any(|&(a, b)| a != i && a != j && b != i && b != j) {
                    return DualDistance::Exact(4);
                }
                entry.push((i, j));
            }
        }
    }
    DualDistance::AtLeastFive
}

/// `G G^T = 0`, the exact self-orthogonality criterion in odd
/// characteristic.
pub fn is_self_orthogonal(g: &GenMatrix) -> bool {
    g.mat.gram().is_zero()
}

/// LCD iff the Gram matrix of a row basis is nonsingular. Returns the
/// verdict with the effective rank used.
pub fn is_lcd(g: &GenMatrix) -> (bool, usize) {
    let (rref, pivots) = g.mat.rref();
    let rank = pivots.len();
    if rank == 0 {
        return (true, 0);
    }
    let basis = Mat::from_rows(g.p(), (0..rank).map(|i| rref.row(i).to_vec()).collect());
    (basis.gram().det() != 0, rank)
}

/// Sufficient self-orthogonality hypotheses checked directly on the
/// function: evenness with a vanishing weighted value sum (p > 3), and
/// per-scalar even homogeneity exponents (p > 3).
#[derive(Debug, Clone)]
pub struct SoChecks {
    pub is_even_function: bool,
    /// `Σ_{i != 0} i² N_i(f) ≡ 0 (mod p)`; `None` when p = 3.
    pub weighted_sum_zero: Option<bool>,
    /// Smallest even exponent per scalar, when one exists for every scalar.
    pub even_exponents: Option<Vec<u32>>,
}

pub fn so_sufficient_checks(f: &PFunction) -> SoChecks {
    let p = f.p();
    let is_even_function = f.is_even();
    let weighted_sum_zero = if p.get() > 3 {
        let counts = f.value_counts();
        let mut acc = 0u64;
        for i in 1..p.get() {
            acc = (acc
                + (i as u64 * i as u64 % p.get() as u64) * (counts[i as usize] % p.get() as u64))
                % p.get() as u64;
        }
        Some(acc == 0)
    } else {
        None
    };
    let even_exponents = if p.get() > 3 {
        let space = f.space();
        let mut exps = Vec::new();
        let mut all_found = true;
        for a in 1..p.get() {
            let found = (2..p.get()).step_by(2).find(|&l| {
                (0..space.size()).all(|x| {
                    f.eval_rank(space.scale_rank(x, a)) as u32
                        == p.mul(p.pow(a, l as u64), f.eval_rank(x) as u32)
                })
            });
            match found {
                Some(l) => exps.push(l),
                None => {
                    all_found = false;
                    break;
                }
            }
        }
        if all_found {
            Some(exps)
        } else {
            None
        }
    } else {
        None
    };
    SoChecks { is_even_function, weighted_sum_zero, even_exponents }
}

/// `p^m >= p^k Σ_{j <= (d-1)/2} C(m,j)(p-1)^j`.
pub fn sphere_packing_holds(p: Prime, m: usize, k: usize, d: usize) -> bool {
    if d == 0 {
        return true;
    }
    let mut sum = BigUint::zero();
    for j in 0..=(d - 1) / 2 {
        sum += binomial(m as u64, j as u64) * BigUint::from(p.get() as u64 - 1).pow(j as u32);
    }
    BigUint::from(p.get()).pow(m as u32) >= BigUint::from(p.get()).pow(k as u32) * sum
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SpVerdicts {
    /// `[m, k+1, d]` is excluded by the sphere-packing bound.
    pub larger_dimension_excluded: bool,
    /// `[m, k, d+1]` is excluded by the sphere-packing bound.
    pub larger_distance_excluded: bool,
}

pub fn sphere_packing_verdicts(p: Prime, m: usize, k: usize, d: usize) -> SpVerdicts {
    SpVerdicts {
        larger_dimension_excluded: !sphere_packing_holds(p, m, k + 1, d),
        larger_distance_excluded: !sphere_packing_holds(p, m, k, d + 1),
    }
}

/// Every nonzero codeword is minimal when `w_min / w_max > (p-1)/p`.
pub fn minimality_flag(dist: &WeightDist, p: Prime) -> bool {
    let wmin = dist.min_distance();
    let wmax = dist.max_weight();
    if wmin == 0 || wmax == 0 {
        return false;
    }
    (p.get() as u64) * wmin as u64 > (p.get() as u64 - 1) * wmax as u64
}

/// Full enumerated report for one code.
#[derive(Debug, Clone)]
pub struct CodeReport {
    pub length: usize,
    pub dimension: usize,
    pub min_distance: usize,
    pub dist: WeightDist,
    pub self_orthogonal: bool,
    pub lcd: bool,
    pub minimal: bool,
    pub sp: SpVerdicts,
    pub dual_dimension: usize,
    pub dual_min_distance: usize,
    pub dual_distance_column_check: DualDistance,
    pub degenerate: bool,
}

pub fn analyze_code(g: &GenMatrix) -> Result<CodeReport> {
    let p = g.p();
    if g.length() == 0 {
        return Ok(CodeReport {
            length: 0,
            dimension: 0,
            min_distance: 0,
            dist: WeightDist { length: 0, rank: 0, counts: BTreeMap::from([(0, BigUint::one())]) },
            self_orthogonal: true,
            lcd: true,
            minimal: false,
            sp: SpVerdicts { larger_dimension_excluded: true, larger_distance_excluded: true },
            dual_dimension: 0,
            dual_min_distance: 0,
            dual_distance_column_check: DualDistance::AtLeastFive,
            degenerate: true,
        });
    }
    let dist = weight_distribution(g)?;
    let dual = macwilliams(&dist, p)?;
    let dual_d = dual_min_distance(&dual);
    let column_check = dual_distance_upto4(g);
    if let DualDistance::Exact(d) = column_check {
        if d != dual_d {
            return Err(Error::Verification(format!(
                "dual distance disagrees: columns say {d}, MacWilliams says {dual_d}"
            )));
        }
    } else if dual_d != 0 && dual_d <= 4 {
        return Err(Error::Verification(format!(
            "column search says dual distance >= 5 but MacWilliams says {dual_d}"
        )));
    }
    let d = dist.min_distance();
    Ok(CodeReport {
        length: dist.length,
        dimension: dist.rank,
        min_distance: d,
        self_orthogonal: is_self_orthogonal(g),
        lcd: is_lcd(g).0,
        minimal: minimality_flag(&dist, p),
        sp: sphere_packing_verdicts(p, dist.length, dist.rank, d),
        dual_dimension: dist.length - dist.rank,
        dual_min_distance: dual_d,
        dual_distance_column_check: column_check,
        degenerate: false,
        dist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::walsh_transform;
    use crate::zoo::quadratic_form;

    fn p(v: u32) -> Prime {
        Prime::new(v).unwrap()
    }

    fn dist_of(pairs: &[(usize, u64)], length: usize, rank: usize) -> WeightDist {
        let counts = pairs.iter().map(|&(w, c)| (w, BigUint::from(c))).collect();
        WeightDist { length, rank, counts }
    }

    #[test]
    fn small_bent_code_is_8_3_5() {
        let f = quadratic_form(p(3), &[1, 1]).unwrap();
        let g = build_cf(&f).unwrap();
        let dist = weight_distribution(&g).unwrap();
        assert_eq!(dist.length, 8);
        assert_eq!(dist.rank, 3);
        assert_eq!(dist.min_distance(), 5);
        let expect = dist_of(&[(0, 1), (5, 16), (6, 8), (8, 2)], 8, 3);
        assert_eq!(dist, expect);
    }

    #[test]
    fn spectrum_path_matches_enumeration() {
        for coeffs in [vec![1u8, 1], vec![1, 2], vec![1, 2, 0], vec![1, 1, 1]] {
            let f = quadratic_form(p(3), &coeffs).unwrap();
            let w = walsh_transform(&f);
            let g = build_cf(&f).unwrap();
            let by_enum = weight_distribution(&g).unwrap();
            let by_spec = cf_weights_via_spectrum(&f, &w, false).unwrap();
            assert_eq!(by_enum.counts, by_spec.counts, "full code {coeffs:?}");
            let gp = build_cf_punctured(&f).unwrap();
            let by_enum_p = weight_distribution(&gp).unwrap();
            let by_spec_p = cf_weights_via_spectrum(&f, &w, true).unwrap();
            assert_eq!(by_enum_p.counts, by_spec_p.counts, "punctured code {coeffs:?}");
        }
    }

    #[test]
    fn zero_code_report() {
        let g = GenMatrix { mat: Mat::from_rows(p(3), vec![vec![0, 0, 0]]), col_ranks: None };
        let dist = weight_distribution(&g).unwrap();
        assert_eq!(dist.rank, 0);
        assert_eq!(dist.counts, dist_of(&[(0, 1)], 3, 0).counts);
    }

    #[test]
    fn macwilliams_of_zero_code_is_whole_space() {
        let dist = dist_of(&[(0, 1)], 4, 0);
        let dual = macwilliams(&dist, p(3)).unwrap();
        for (j, c) in dual.iter().enumerate() {
            let expect = binomial(4, j as u64) * BigUint::from(2u64).pow(j as u32);
            assert_eq!(*c, expect);
        }
    }

    #[test]
    fn macwilliams_matches_direct_dual_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &q in &[3u32, 5] {
            let pr = p(q);
            for _ in 0..6 {
                let m = rng.gen_range(4..8usize);
                let k = rng.gen_range(1..3usize);
                let rows: Vec<Vec<u8>> =
                    (0..k).map(|_| (0..m).map(|_| rng.gen_range(0..q) as u8).collect()).collect();
                let g = GenMatrix { mat: Mat::from_rows(pr, rows), col_ranks: None };
                let dist = weight_distribution(&g).unwrap();
                let dual = macwilliams(&dist, pr).unwrap();
                let ns = g.mat.nullspace_basis();
                let gd = GenMatrix { mat: ns, col_ranks: None };
                let dual_direct = weight_distribution(&gd).unwrap();
                for (j, c) in dual.iter().enumerate() {
                    let direct = dual_direct.counts.get(&j).cloned().unwrap_or_else(BigUint::zero);
                    assert_eq!(*c, direct, "A^perp_{j} for p={q}");
                }
                let pless = pless_dual_prefix(&dist, pr, 4).unwrap();
                for (idx, a) in pless.iter().enumerate() {
                    let direct = BigInt::from(
                        dual_direct.counts.get(&(idx + 1)).cloned().unwrap_or_else(BigUint::zero),
                    );
                    assert_eq!(*a, direct, "pless A^perp_{} for p={q}", idx + 1);
                }
            }
        }
    }

    #[test]
    fn dual_distance_detects_small_dependencies() {
        let g = GenMatrix {
            mat: Mat::from_rows(p(3), vec![vec![1, 1, 0], vec![0, 0, 1]]),
            col_ranks: None,
        };
        assert_eq!(dual_distance_upto4(&g), DualDistance::Exact(2));
        let g = GenMatrix {
            mat: Mat::from_rows(p(3), vec![vec![1, 0, 0], vec![0, 0, 1]]),
            col_ranks: None,
        };
        assert_eq!(dual_distance_upto4(&g), DualDistance::Exact(1));
        let g = GenMatrix { mat: Mat::identity(p(3), 2), col_ranks: None };
        assert_eq!(dual_distance_upto4(&g), DualDistance::AtLeastFive);
    }

    #[test]
    fn dual_distance_matches_macwilliams_on_random_codes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let m = rng.gen_range(4..9usize);
            let k = rng.gen_range(2..4usize);
            let rows: Vec<Vec<u8>> =
                (0..k).map(|_| (0..m).map(|_| rng.gen_range(0..3) as u8).collect()).collect();
            let g = GenMatrix { mat: Mat::from_rows(p(3), rows), col_ranks: None };
            let dist = weight_distribution(&g).unwrap();
            if dist.rank == 0 {
                continue;
            }
            let dual = macwilliams(&dist, p(3)).unwrap();
            let exact = dual_min_distance(&dual);
            match dual_distance_upto4(&g) {
                DualDistance::Exact(d) => assert_eq!(d, exact),
                DualDistance::AtLeastFive => assert!(exact >= 5 || exact == 0),
            }
        }
    }

    #[test]
    fn self_orthogonal_and_lcd_flags() {
        let zero = GenMatrix { mat: Mat::zero(p(3), 2, 4), col_ranks: None };
        assert!(is_self_orthogonal(&zero));
        let id = GenMatrix { mat: Mat::identity(p(3), 3), col_ranks: None };
        assert!(is_lcd(&id).0);
        // Self-orthogonal with positive rank is never LCD.
        let so =
            GenMatrix { mat: Mat::from_rows(p(3), vec![vec![1, 1, 1, 0, 0, 0]]), col_ranks: None };
        assert!(is_self_orthogonal(&so));
        assert!(!is_lcd(&so).0);
    }

    #[test]
    fn sphere_packing_examples() {
        assert!(sphere_packing_holds(p(3), 5, 5, 1));
        assert!(!sphere_packing_holds(p(3), 5, 5, 3));
        // Ternary [11, 6, 5]: 1 + 22 + 220 = 3^5 exactly.
        assert!(sphere_packing_holds(p(3), 11, 6, 5));
        assert!(!sphere_packing_holds(p(3), 11, 7, 5));
    }

    #[test]
    fn minimality_from_weight_range() {
        // 5 * 12000 > 4 * 13000.
        let dist = dist_of(&[(0, 1), (12000, 180), (13000, 400)], 15624, 7);
        assert!(minimality_flag(&dist, p(5)));
        // 5 * 9200 = 46000 < 4 * 12000 = 48000: the ratio test fails here.
        let dist = dist_of(&[(0, 1), (9200, 100), (12000, 4)], 12000, 7);
        assert!(!minimality_flag(&dist, p(5)));
        let dist = dist_of(&[(0, 1), (2, 2), (8, 2)], 8, 1);
        assert!(!minimality_flag(&dist, p(3)));
    }

    #[test]
    fn defining_sets_cover_and_build() {
        let f = quadratic_form(p(3), &[1, 1, 1]).unwrap();
        let d0 = zero_set_minus_origin(&f);
        let reps = zero_set_orbit_reps(&f, RepSelector::Canonical).unwrap();
        assert_eq!(reps.len() * 2, d0.len());
        let g = build_cd(f.space(), &reps);
        assert_eq!(g.length(), reps.len());
        let m = complement_orbit_reps(&f, RepSelector::Canonical).unwrap();
        assert_eq!(m.len() * 2, f.space().size() - d0.len() - 1);
        // Weight distribution is invariant under the representative choice.
        let alt = zero_set_orbit_reps(&f, RepSelector::Alternative).unwrap();
        let d1 = weight_distribution(&build_cd(f.space(), &reps)).unwrap();
        let d2 = weight_distribution(&build_cd(f.space(), &alt)).unwrap();
        assert_eq!(d1.counts, d2.counts);
    }

    #[test]
    fn pair_reps_cover_level_sets() {
        let f = quadratic_form(p(5), &[1, 1, 1]).unwrap();
        for i in 1..5 {
            let set = level_pair_reps(&f, i, RepSelector::Canonical).unwrap();
            assert_eq!(set.len() * 2, f.level_set(i).len());
        }
        let sq = square_set_reps(&f, true, RepSelector::Canonical).unwrap();
        assert_eq!(sq.len() * 4, f.square_level_set().len());
    }

    #[test]
    fn custom_rep_set_is_validated() {
        let f = quadratic_form(p(3), &[1, 1, 1]).unwrap();
        let good = zero_set_orbit_reps(&f, RepSelector::Canonical).unwrap();
        assert!(custom_zero_set_reps(&f, good.ranks.clone()).is_ok());
        let mut bad = good.ranks.clone();
        bad.pop();
        assert!(custom_zero_set_reps(&f, bad).is_err());
    }
}
