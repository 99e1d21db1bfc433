//! Constructors for the function families: diagonal quadratic forms, the
//! trace-form Maiorana–McFarland composition, its prime-field variant, the
//! two built-in worked examples, a polynomial DSL, and truth-table I/O.

use crate::error::{Error, Result};
use crate::field::{ExtField, Factor, Prime, Space};
use crate::spectral::{classify_plateaued, lform_exponents, walsh_transform, PFunction};

/// A sparse multivariate polynomial over `F_p`; exponents are evaluated
/// literally (no implicit reduction), matching the DSL text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialExpr {
    p: Prime,
    n: usize,
    terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Term {
    coeff: u32,
    /// `(variable index, exponent)` with exponent >= 1.
    powers: Vec<(usize, u32)>,
}

impl PolynomialExpr {
    /// Parses terms joined by `+`; each term multiplies an optional integer
    /// coefficient and factors `x<i>` or `x<i>^<e>`. Whitespace is ignored.
    pub fn parse(p: Prime, n: Option<usize>, text: &str) -> Result<Self> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut max_var = 0usize;
        for term_text in cleaned.split('+') {
            if term_text.is_empty() {
                return Err(Error::Parse("empty term".into()));
            }
            let mut coeff = 1u32;
            let mut powers: Vec<(usize, u32)> = Vec::new();
            for factor in term_text.split('*') {
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in '{term_text}'")));
                }
                if let Some(rest) = factor.strip_prefix('x') {
                    let (var_text, exp_text) = match rest.split_once('^') {
                        Some((v, e)) => (v, Some(e)),
                        None => (rest, None),
                    };
                    let var: usize = var_text
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad variable '{factor}'")))?;
                    if var == 0 {
                        return Err(Error::Parse("variables are numbered from x1".into()));
                    }
                    let exp: u32 = match exp_text {
                        Some(e) => e.parse().map_err(|_| Error::Parse(format!("bad exponent '{factor}'")))?,
                        None => 1,
                    };
                    max_var = max_var.max(var);
                    if exp > 0 {
                        match powers.iter_mut().find(|(v, _)| *v == var - 1) {
                            Some((_, old)) => *old += exp,
                            None => powers.push((var - 1, exp)),
                        }
                    }
                } else {
                    let c: u32 = factor
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad coefficient '{factor}'")))?;
                    coeff = p.mul(coeff, c % p.get());
                }
            }
            terms.push(Term { coeff, powers });
        }
        let n = match n {
            Some(n) => {
                if max_var > n {
                    return Err(Error::Parse(format!("polynomial uses x{max_var} but n = {n}")));
                }
                n
            }
            None => max_var.max(1),
        };
        Ok(PolynomialExpr { p, n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, x: &[u8]) -> u32 {
        let p = self.p;
        let mut acc = 0u32;
        for term in &self.terms {
            let mut v = term.coeff;
            for &(var, exp) in &term.powers {
                v = p.mul(v, p.pow(x[var] as u32, exp as u64));
                if v == 0 {
                    break;
                }
            }
            acc = p.add(acc, v);
        }
        acc
    }

    pub fn to_function(&self) -> Result<PFunction> {
        let space = Space::dot(self.p, self.n)?;
        Ok(PFunction::from_fn(space, |x| self.eval(x)))
    }
}

/// Evaluates a polynomial at a point; the DSL entry point for single calls.
pub fn eval_polynomial(expr: &PolynomialExpr, x: &[u8]) -> Result<u32> {
    if x.len() != expr.n() {
        return Err(Error::Parse(format!("point has {} coordinates, expected {}", x.len(), expr.n())));
    }
    Ok(expr.eval(x))
}

/// The diagonal quadratic form `Σ d_i x_i²` on `F_p^n`. Zero coefficients
/// contribute dummy variables and raise the plateau level accordingly.
pub fn quadratic_form(p: Prime, coeffs: &[u8]) -> Result<PFunction> {
    let space = Space::dot(p, coeffs.len())?;
    let coeffs = coeffs.to_vec();
    Ok(PFunction::from_fn(space, move |x| {
        let mut acc = 0u32;
        for (&d, &xi) in coeffs.iter().zip(x) {
            acc = p.add(acc, p.mul(d as u32, p.mul(xi as u32, xi as u32)));
        }
        acc
    }))
}

/// Parameters of the trace-form composition
/// `F(x, y, z) = f^{(z)}(x) + Tr(y z^{l-1})` on `V_{n1} x GF(p^{n2}) x GF(p^{n2})`.
pub struct GmmfSpec {
    pub p: Prime,
    pub n1: usize,
    pub n2: usize,
    pub l: u64,
    /// One bent function on `F_p^{n1}` per element of `GF(p^{n2})`, indexed
    /// by rank.
    pub family: Vec<PFunction>,
}

pub struct GmmfOutput {
    pub function: PFunction,
    /// `e` with `e (l-1) ≡ 1 (mod p^{n2} - 1)`.
    pub e: u64,
    /// Reduction polynomial of the extension factor, for reproducibility.
    pub reduction: Vec<u8>,
    /// Ranks `z` whose associated member `f^{(z^e)}` is of type `+` / `-`.
    pub w_plus: Vec<usize>,
    pub w_minus: Vec<usize>,
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub fn gmmf(spec: &GmmfSpec) -> Result<GmmfOutput> {
    let p = spec.p;
    let ext = ExtField::new(p, spec.n2)?;
    let field_size = ext.size();
    if spec.family.len() != field_size {
        return Err(Error::Invalid(format!("family must have {field_size} members")));
    }
    let order = field_size as u64 - 1;
    if spec.l < 2 {
        return Err(Error::Invalid("exponent l must be at least 2".into()));
    }
    let e = mod_inverse((spec.l - 1) % order, order)
        .ok_or_else(|| Error::Hypothesis(format!("gcd(l-1, p^n2 - 1) != 1 for l = {}", spec.l)))?;
    // Verify every member is weakly regular bent on V_{n1} and record types.
    let mut types = Vec::with_capacity(field_size);
    for (z, member) in spec.family.iter().enumerate() {
        if member.n() != spec.n1 || member.p() != p {
            return Err(Error::Invalid("family member has the wrong domain".into()));
        }
        let w = walsh_transform(member);
        let prof = classify_plateaued(member, &w)
            .ok_or_else(|| Error::Hypothesis(format!("family member {z} is not plateaued")))?;
        if prof.s != 0 || !prof.weakly_regular {
            return Err(Error::Hypothesis(format!("family member {z} is not weakly regular bent")));
        }
        types.push(prof.eps0.expect("bent functions are unbalanced"));
    }
    let space = Space::product(
        p,
        vec![Factor::Dot(spec.n1), Factor::Ext(ext.clone()), Factor::Ext(ext.clone())],
    )?;
    let n1 = spec.n1;
    let n2 = spec.n2;
    let l = spec.l;
    let family_tables: Vec<Vec<u8>> = spec.family.iter().map(|f| f.table().to_vec()).collect();
    let ext2 = ext.clone();
    let function = PFunction::from_fn(space, move |digits| {
        let x = &digits[..n1];
        let y = &digits[n1..n1 + n2];
        let z = &digits[n1 + n2..n1 + 2 * n2];
        let zr = ext2.rank_of(z);
        let xr = crate::field::rank_of(p, x);
        let fz = family_tables[zr][xr] as u32;
        let zz = ext2.pow(z, l - 1);
        let prod = ext2.mul(y, &zz);
        p.add(fz, ext2.trace(&prod))
    });
    let mut w_plus = Vec::new();
    let mut w_minus = Vec::new();
    for z in 0..field_size {
        let ze = if z == 0 { 0 } else { ext.rank_of(&ext.pow(&ext.coords_of(z), e)) };
        if types[ze] == 1 {
            w_plus.push(z);
        } else {
            w_minus.push(z);
        }
    }
    Ok(GmmfOutput { function, e, reduction: ext.reduction().to_vec(), w_plus, w_minus })
}

/// The prime-field variant `f(x, y, z, u) = f^{(z)}(x) + y·z` on
/// `F_p^{n1} x F_p^{n2} x F_p^{n2} x F_p^s`.
///
/// Every member must be a weakly regular bent 2-form with `f^{(cz)} = f^{(z)}`
/// and `f^{(z)}(0) = 0`; the result then lies in the checked family with
/// homogeneity exponents 2 on both sign classes.
pub fn variant10(
    p: Prime,
    n1: usize,
    n2: usize,
    s: usize,
    family: &[PFunction],
) -> Result<PFunction> {
    let z_count = crate::field::checked_table_size(p, n2)?;
    if family.len() != z_count {
        return Err(Error::Invalid(format!("family must have {z_count} members")));
    }
    for (z, member) in family.iter().enumerate() {
        if member.n() != n1 || member.p() != p {
            return Err(Error::Hypothesis(format!("family member {z} has the wrong domain")));
        }
        if member.eval_rank(0) != 0 {
            return Err(Error::Hypothesis(format!("family member {z} has f(0) != 0")));
        }
        let w = walsh_transform(member);
        let prof = classify_plateaued(member, &w)
            .ok_or_else(|| Error::Hypothesis(format!("family member {z} is not plateaued")))?;
        if prof.s != 0 || !prof.weakly_regular {
            return Err(Error::Hypothesis(format!("family member {z} is not weakly regular bent")));
        }
        if !lform_exponents(member).contains(&2) {
            return Err(Error::Hypothesis(format!("family member {z} is not a 2-form")));
        }
    }
    let zspace = Space::dot(p, n2)?;
    for z in 0..z_count {
        for c in 2..p.get() {
            let cz = zspace.scale_rank(z, c);
            if family[z].table() != family[cz].table() {
                return Err(Error::Hypothesis(format!("family is not scale-invariant at z = {z}, c = {c}")));
            }
        }
    }
    let n = n1 + 2 * n2 + s;
    let space = Space::dot(p, n)?;
    let tables: Vec<Vec<u8>> = family.iter().map(|f| f.table().to_vec()).collect();
    Ok(PFunction::from_fn(space, move |digits| {
        let x = &digits[..n1];
        let y = &digits[n1..n1 + n2];
        let z = &digits[n1 + n2..n1 + 2 * n2];
        let zr = crate::field::rank_of(p, z);
        let xr = crate::field::rank_of(p, x);
        let mut acc = tables[zr][xr] as u32;
        for (&yi, &zi) in y.iter().zip(z) {
            acc = p.add(acc, p.mul(yi as u32, zi as u32));
        }
        acc
    }))
}

/// The diagonal-quadratic instance of [`variant10`]: `f^{(0)} = Σ u_i x_i²`
/// and `f^{(z)} = Σ v_i x_i²` for `z != 0`.
pub fn construction_star(
    p: Prime,
    n1: usize,
    n2: usize,
    s: usize,
    u_coeffs: &[u8],
    v_coeffs: &[u8],
) -> Result<PFunction> {
    if u_coeffs.len() != n1 || v_coeffs.len() != n1 {
        return Err(Error::Invalid("coefficient lists must have length n1".into()));
    }
    if u_coeffs.iter().chain(v_coeffs).any(|&c| c == 0 || c as u32 >= p.get()) {
        return Err(Error::Hypothesis("quadratic coefficients must be nonzero".into()));
    }
    let z_count = crate::field::checked_table_size(p, n2)?;
    let zero_member = quadratic_form(p, u_coeffs)?;
    let other = quadratic_form(p, v_coeffs)?;
    let family: Vec<PFunction> =
        (0..z_count).map(|z| if z == 0 { zero_member.clone() } else { other.clone() }).collect();
    variant10(p, n1, n2, s, &family)
}

/// The two built-in worked examples: `1` is the six-variable function over
/// `F_5`, `2` the six-variable function over `F_3`.
pub fn builtin_example(idx: u32) -> Result<PFunction> {
    match idx {
        1 => {
            let p = Prime::new(5)?;
            let expr = PolynomialExpr::parse(
                p,
                Some(6),
                "x1^2*x4^4 + 4*x1*x2^3*x4^4 + x1*x2^3 + 2*x2^2*x4^4 + x3*x4",
            )?;
            expr.to_function()
        }
        2 => {
            let p = Prime::new(3)?;
            let expr = PolynomialExpr::parse(p, Some(6), "x1^2*x5^2 + x1^2 + x2^2 + x3^2 + x4*x5")?;
            expr.to_function()
        }
        other => Err(Error::Invalid(format!("no built-in example {other}"))),
    }
}

/// Truth-table text format: first line `p n`, second line `p^n` digits in
/// rank order.
pub fn parse_truth_table(text: &str) -> Result<PFunction> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("missing header line".into()))?;
    let mut parts = header.split_whitespace();
    let p: u32 = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse("header must start with p".into()))?;
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse("header must contain n".into()))?;
    if parts.next().is_some() {
        return Err(Error::Parse("header must be exactly 'p n'".into()));
    }
    let p = Prime::new(p)?;
    let body = lines.next().ok_or_else(|| Error::Parse("missing table line".into()))?;
    let digits: Vec<u8> = body
        .trim()
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Parse(format!("bad digit '{c}'"))))
        .collect::<Result<_>>()?;
    let space = Space::dot(p, n)?;
    if digits.len() != space.size() {
        return Err(Error::Parse(format!(
            "table has {} digits, expected {}",
            digits.len(),
            space.size()
        )));
    }
    PFunction::new(space, digits)
}

pub fn format_truth_table(f: &PFunction) -> String {
    let digits: String = f.table().iter().map(|d| char::from_digit(*d as u32, 10).unwrap()).collect();
    format!("{} {}\n{}\n", f.p().get(), f.n(), digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{dual_profile, family_f_check};

    fn p(v: u32) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn parse_and_eval() {
        let expr = PolynomialExpr::parse(p(3), None, "x1^2").unwrap();
        assert_eq!(eval_polynomial(&expr, &[2]).unwrap(), 1);
        let zero = PolynomialExpr::parse(p(3), Some(2), "0").unwrap();
        for x in [[0u8, 0], [1, 2], [2, 2]] {
            assert_eq!(eval_polynomial(&zero, &x).unwrap(), 0);
        }
        // Example-2 polynomial at (1,1,1,1,1,0): 1+1+1+1+1 = 2 mod 3.
        let e2 = PolynomialExpr::parse(p(3), Some(6), "x1^2*x5^2+x1^2+x2^2+x3^2+x4*x5").unwrap();
        assert_eq!(eval_polynomial(&e2, &[1, 1, 1, 1, 1, 0]).unwrap(), 2);
        assert!(PolynomialExpr::parse(p(3), None, "x0^2").is_err());
        assert!(PolynomialExpr::parse(p(3), None, "x1^").is_err());
        assert!(eval_polynomial(&e2, &[0, 0]).is_err());
    }

    #[test]
    fn quadratic_form_types() {
        for (coeffs, want_s, want_eps) in [(vec![1u8, 1], 0usize, -1i8), (vec![1, 2], 0, 1)] {
            let f = quadratic_form(p(3), &coeffs).unwrap();
            let w = walsh_transform(&f);
            let prof = classify_plateaued(&f, &w).unwrap();
            assert_eq!(prof.s, want_s);
            assert_eq!(prof.eps0, Some(want_eps));
        }
    }

    #[test]
    fn gmmf_all_equal_family_is_weakly_regular() {
        let pr = p(3);
        let member = quadratic_form(pr, &[1]).unwrap();
        let spec = GmmfSpec { p: pr, n1: 1, n2: 1, l: 2, family: vec![member.clone(), member.clone(), member] };
        let out = gmmf(&spec).unwrap();
        let w = walsh_transform(&out.function);
        let prof = classify_plateaued(&out.function, &w).unwrap();
        assert_eq!(prof.s, 0);
        assert!(prof.weakly_regular);
    }

    #[test]
    fn gmmf_mixed_family_is_non_weakly_regular() {
        let pr = p(3);
        let zero = quadratic_form(pr, &[1]).unwrap();
        let other = quadratic_form(pr, &[2]).unwrap();
        let spec = GmmfSpec { p: pr, n1: 1, n2: 1, l: 2, family: vec![zero, other.clone(), other] };
        let out = gmmf(&spec).unwrap();
        let w = walsh_transform(&out.function);
        let prof = classify_plateaued(&out.function, &w).unwrap();
        assert_eq!(prof.s, 0);
        assert!(!prof.weakly_regular);
        // B_± = V_{n1} x W_± x GF(p^{n2}) as rank sets.
        let space = out.function.space();
        for r in 0..space.size() {
            let d = space.digits_of(r);
            let y_rank = d[1] as usize; // n1 = n2 = 1
            let expect = if out.w_plus.contains(&y_rank) { 1 } else { -1 };
            assert_eq!(prof.eps[r], expect, "sign at rank {r}");
        }
    }

    #[test]
    fn gmmf_rejects_bad_l() {
        let pr = p(3);
        let member = quadratic_form(pr, &[1]).unwrap();
        let spec = GmmfSpec { p: pr, n1: 1, n2: 1, l: 3, family: vec![member.clone(), member.clone(), member] };
        assert!(gmmf(&spec).is_err()); // gcd(2, 2) != 1
    }

    #[test]
    fn variant10_membership() {
        let pr = p(3);
        let f = construction_star(pr, 2, 1, 0, &[1, 1], &[1, 2]).unwrap();
        let w = walsh_transform(&f);
        let prof = classify_plateaued(&f, &w).unwrap();
        assert_eq!(prof.s, 0);
        assert!(!prof.weakly_regular);
        let dual = dual_profile(&f, &prof).unwrap();
        let fam = family_f_check(&f, &prof, Some(&dual));
        assert!(fam.member, "{:?}", fam.failures);
        assert!(fam.t.contains(&2) && fam.t_prime.contains(&2));
    }

    #[test]
    fn variant10_with_dummy_block_is_plateaued() {
        let pr = p(3);
        let f = construction_star(pr, 2, 1, 1, &[1, 2], &[1, 2]).unwrap();
        let w = walsh_transform(&f);
        let prof = classify_plateaued(&f, &w).unwrap();
        assert_eq!(prof.s, 1);
        assert!(prof.weakly_regular);
    }

    #[test]
    fn truth_table_roundtrip() {
        let f = quadratic_form(p(3), &[1, 2]).unwrap();
        let text = format_truth_table(&f);
        let g = parse_truth_table(&text).unwrap();
        assert_eq!(f.table(), g.table());
        assert!(parse_truth_table("3 2\n012").is_err());
    }
}
