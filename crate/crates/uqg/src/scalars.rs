//! Exact scalar arithmetic: arbitrary-precision rationals, sparse Laurent
//! polynomials in a single variable `v`, and their fraction field.
//!
//! Provides:
//! - `Rat`: arbitrary-precision rational numbers (re-exported `BigRational`).
//! - `LaurentPoly`: sparse Laurent polynomial in `v` with `Rat` coefficients.
//! - `LaurentFrac`: quotient of two Laurent polynomials, kept in a canonical
//!   reduced form so that structural equality is mathematical equality.
//!
//! The variable `v` stands for a fixed root of the deformation parameter
//! (`q = v^D` for a context-wide positive integer `D`), so every fractional
//! power of `q` needed anywhere becomes an integer power of `v`.
//!
//! Canonical form of a `LaurentFrac`: the denominator is an honest polynomial
//! (no negative exponents, nonzero constant term), monic in its highest-degree
//! coefficient, and coprime to the polynomial part of the numerator; all unit
//! factors `c * v^k` are absorbed into the numerator. Zero is `0/1`.
//!
//! Sign or positivity questions are never decided symbolically; use
//! `eval_at` with a rational evaluation point and decide on the result.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Exact rational scalar.
pub type Rat = BigRational;

/// Rational from a machine integer.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `p/q` from machine integers; `q` must be nonzero.
pub fn rat_pq(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Errors from scalar arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarError {
    /// Division by the zero polynomial or zero fraction.
    DivisionByZero,
    /// The denominator vanishes at the requested evaluation point.
    DenominatorVanishes,
    /// A string did not parse back into a scalar.
    Parse(String),
}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarError::DivisionByZero => write!(f, "division by zero"),
            ScalarError::DenominatorVanishes => {
                write!(f, "denominator vanishes at evaluation point")
            }
            ScalarError::Parse(s) => write!(f, "parse error: {s}"),
        }
    }
}

impl std::error::Error for ScalarError {}

/// Sparse Laurent polynomial in `v` over `Rat`.
///
/// Invariant: no explicitly stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, Rat::one())
    }

    /// `c * v^k`.
    pub fn monomial(k: i64, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        LaurentPoly { terms }
    }

    pub fn from_rat(c: Rat) -> Self {
        Self::monomial(0, c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the polynomial is the constant one.
    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && matches!(self.terms.get(&0), Some(c) if c.is_one())
    }

    pub fn coeff(&self, k: i64) -> Rat {
        self.terms.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    /// Lowest exponent present; `None` for the zero polynomial.
    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Highest exponent present; `None` for the zero polynomial.
    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Coefficient of the highest exponent; zero for the zero polynomial.
    pub fn leading_coeff(&self) -> Rat {
        match self.max_exp() {
            Some(k) => self.coeff(k),
            None => Rat::zero(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            let e = terms.entry(*k).or_insert_with(Rat::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        LaurentPoly { terms }
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<i64, Rat> = BTreeMap::new();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let k = k1 + k2;
                let e = terms.entry(k).or_insert_with(Rat::zero);
                *e += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        LaurentPoly { terms }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect() }
    }

    /// Multiply by `v^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// Evaluate at a nonzero rational point.
    pub fn eval(&self, v0: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (k, c) in &self.terms {
            acc += c * rat_pow(v0, *k);
        }
        acc
    }

    /// Number of stored terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Polynomial long division for polynomials with `min_exp >= 0`.
    /// Returns `(quotient, remainder)`. Panics if `div` is zero.
    fn divrem(&self, div: &Self) -> (Self, Self) {
        assert!(!div.is_zero(), "polynomial division by zero");
        let dmax = div.max_exp().unwrap();
        let dlc = div.leading_coeff();
        if div.term_count() == 1 {
            let mut quo = BTreeMap::new();
            let mut rem = BTreeMap::new();
            for (k, c) in &self.terms {
                if *k >= dmax {
                    quo.insert(k - dmax, c / &dlc);
                } else {
                    rem.insert(*k, c.clone());
                }
            }
            return (LaurentPoly { terms: quo }, LaurentPoly { terms: rem });
        }
        let mut rem = self.clone();
        let mut quo = LaurentPoly::zero();
        while !rem.is_zero() {
            let rmax = rem.max_exp().unwrap();
            if rmax < dmax {
                break;
            }
            let c = rem.coeff(rmax) / &dlc;
            let t = LaurentPoly::monomial(rmax - dmax, c);
            quo = quo.add(&t);
            rem = rem.sub(&t.mul(div));
        }
        (quo, rem)
    }

    /// Quotient by a divisor known to divide exactly.
    fn exact_div(&self, div: &Self) -> Self {
        let (quo, rem) = self.divrem(div);
        debug_assert!(rem.is_zero(), "division must be exact");
        quo
    }

    /// Monic GCD of two polynomials with `min_exp >= 0`, computed over the
    /// integers with a primitive pseudo-remainder sequence so coefficients
    /// stay small; naive rational Euclid blows up on them.
    fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            if other.is_zero() {
                return LaurentPoly::zero();
            }
            return other.scale(&(Rat::one() / other.leading_coeff()));
        }
        if other.is_zero() {
            return self.scale(&(Rat::one() / self.leading_coeff()));
        }
        let sa = self.min_exp().unwrap();
        let sb = other.min_exp().unwrap();
        let shift = sa.min(sb);
        let mut a = int_primitive(&self.shift(-sa));
        let mut b = int_primitive(&other.shift(-sb));
        if int_deg(&a) < int_deg(&b) {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            if int_deg(&b) == 0 {
                a = BTreeMap::from([(0, BigInt::one())]);
                break;
            }
            let r = int_pseudo_rem(&a, &b);
            a = b;
            b = if r.is_empty() { r } else { int_primitive_part(r) };
        }
        let lc = a[&int_deg(&a)].clone();
        let terms: BTreeMap<i64, Rat> =
            a.into_iter().map(|(k, c)| (k, Rat::new(c, lc.clone()))).collect();
        LaurentPoly { terms }.shift(shift)
    }
}

/// Integer polynomial as a sparse exponent map without zero entries.
type IntPoly = BTreeMap<i64, BigInt>;

fn int_deg(p: &IntPoly) -> i64 {
    *p.keys().next_back().expect("degree of the zero polynomial")
}

/// Clear rational denominators and divide out the integer content; the
/// result has a positive leading coefficient.
fn int_primitive(p: &LaurentPoly) -> IntPoly {
    let mut denom_lcm = BigInt::one();
    for c in p.terms.values() {
        denom_lcm = denom_lcm.lcm(c.denom());
    }
    let scaled: IntPoly =
        p.terms.iter().map(|(k, c)| (*k, c.numer() * (&denom_lcm / c.denom()))).collect();
    int_primitive_part(scaled)
}

/// Divide out the content and normalize the leading coefficient positive.
fn int_primitive_part(mut p: IntPoly) -> IntPoly {
    let mut content = BigInt::zero();
    for c in p.values() {
        content = content.gcd(c);
    }
    if p.values().next_back().map_or(false, Signed::is_negative) {
        content = -content;
    }
    for c in p.values_mut() {
        *c = &*c / &content;
    }
    p
}

/// One full pseudo-reduction of `a` by `b`: repeatedly scale by the leading
/// coefficient of `b` and subtract, staying in integer arithmetic.
fn int_pseudo_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = int_deg(b);
    let lb = b[&db].clone();
    let mut r = a.clone();
    while let Some((&dr, _)) = r.iter().next_back() {
        if dr < db {
            break;
        }
        let lr = r[&dr].clone();
        let mut next: IntPoly = r.iter().map(|(k, c)| (*k, c * &lb)).collect();
        for (k, c) in b {
            let e = next.entry(k + dr - db).or_insert_with(BigInt::zero);
            *e -= c * &lr;
        }
        next.retain(|_, c| !c.is_zero());
        r = next;
    }
    r
}

/// `v0^k` for possibly negative `k`; `v0` must be nonzero when `k < 0`.
pub fn rat_pow(v0: &Rat, k: i64) -> Rat {
    let e = i32::try_from(k).expect("exponent fits in i32");
    if e == 0 {
        return Rat::one();
    }
    v0.pow(e)
}

impl fmt::Display for LaurentPoly {
    /// Terms in descending exponent, each `c*v^k`, joined by ` + `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{c}*v^{k}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, ScalarError> {
        let s = s.trim();
        if s == "0" {
            return Ok(LaurentPoly::zero());
        }
        let mut poly = LaurentPoly::zero();
        for part in s.split(" + ") {
            let (cs, ks) = part
                .split_once("*v^")
                .ok_or_else(|| ScalarError::Parse(format!("bad term {part:?}")))?;
            let c = Rat::from_str(cs.trim())
                .map_err(|_| ScalarError::Parse(format!("bad coefficient {cs:?}")))?;
            let k = i64::from_str(ks.trim())
                .map_err(|_| ScalarError::Parse(format!("bad exponent {ks:?}")))?;
            poly = poly.add(&LaurentPoly::monomial(k, c));
        }
        Ok(poly)
    }
}

/// Element of the fraction field of Laurent polynomials, in canonical form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentFrac {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl LaurentFrac {
    pub fn zero() -> Self {
        LaurentFrac { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        LaurentFrac { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    /// `c * v^k` as a fraction.
    pub fn monomial(k: i64, c: Rat) -> Self {
        LaurentFrac { num: LaurentPoly::monomial(k, c), den: LaurentPoly::one() }
    }

    pub fn from_rat(c: Rat) -> Self {
        Self::monomial(0, c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat_i(n))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        LaurentFrac { num: p, den: LaurentPoly::one() }
    }

    /// Build `num/den` in canonical form. Errors if `den` is zero.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        // Shift the denominator to an honest polynomial with nonzero constant
        // term, moving the unit v^b over to the numerator.
        let b = den.min_exp().unwrap();
        let den = den.shift(-b);
        let num = num.shift(-b);
        if den.term_count() == 1 {
            // Constant denominator: absorb it into the numerator.
            let c = den.leading_coeff();
            return Ok(LaurentFrac { num: num.scale(&(Rat::one() / c)), den: LaurentPoly::one() });
        }
        // Split the numerator as v^s * polynomial and cancel the GCD.
        let s = num.min_exp().unwrap();
        let num_poly = num.shift(-s);
        let g = num_poly.gcd(&den);
        let (num_poly, den) =
            if g.is_one() { (num_poly, den) } else { (num_poly.exact_div(&g), den.exact_div(&g)) };
        // Normalize the denominator monic.
        let lc = den.leading_coeff();
        if den.term_count() == 1 {
            return Ok(LaurentFrac {
                num: num_poly.shift(s).scale(&(Rat::one() / &lc)),
                den: LaurentPoly::one(),
            });
        }
        let den = den.scale(&(Rat::one() / &lc));
        let num = num_poly.shift(s).scale(&(Rat::one() / &lc));
        Ok(LaurentFrac { num, den })
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self == &Self::one()
    }

    /// True when the canonical denominator is 1 (a genuine Laurent polynomial).
    pub fn is_polynomial(&self) -> bool {
        self.den == LaurentPoly::one()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if num.is_zero() {
                return Self::zero();
            }
            if self.den.is_one() {
                return LaurentFrac { num, den: LaurentPoly::one() };
            }
            // Only the shared denominator can cancel against the sum.
            let s = num.min_exp().unwrap();
            let num_poly = num.shift(-s);
            let h = num_poly.gcd(&self.den);
            if h.is_one() {
                return LaurentFrac { num, den: self.den.clone() };
            }
            let den = self.den.exact_div(&h);
            let num = num_poly.exact_div(&h).shift(s);
            if den.is_one() {
                return LaurentFrac { num, den: LaurentPoly::one() };
            }
            return LaurentFrac { num, den };
        }
        // Split the denominators along their GCD; the canonical coprimality
        // of each side confines any new cancellation to that GCD.
        let g = self.den.gcd(&other.den);
        if g.is_one() {
            let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            if num.is_zero() {
                return Self::zero();
            }
            return LaurentFrac { num, den: self.den.mul(&other.den) };
        }
        let u1 = self.den.exact_div(&g);
        let u2 = other.den.exact_div(&g);
        let num = self.num.mul(&u2).add(&other.num.mul(&u1));
        if num.is_zero() {
            return Self::zero();
        }
        let s = num.min_exp().unwrap();
        let num_poly = num.shift(-s);
        let h = num_poly.gcd(&g);
        let (num_poly, g) =
            if h.is_one() { (num_poly, g) } else { (num_poly.exact_div(&h), g.exact_div(&h)) };
        let den = g.mul(&u1).mul(&u2);
        if den.is_one() {
            return LaurentFrac { num: num_poly.shift(s), den: LaurentPoly::one() };
        }
        LaurentFrac { num: num_poly.shift(s), den }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentFrac { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return LaurentFrac { num: self.num.mul(&other.num), den: LaurentPoly::one() };
        }
        // Cross-cancel each numerator against the opposite denominator; the
        // canonical coprimality on each side makes the result canonical.
        let s1 = self.num.min_exp().unwrap();
        let s2 = other.num.min_exp().unwrap();
        let n1 = self.num.shift(-s1);
        let n2 = other.num.shift(-s2);
        let g1 = if other.den.is_one() { LaurentPoly::one() } else { n1.gcd(&other.den) };
        let g2 = if self.den.is_one() { LaurentPoly::one() } else { n2.gcd(&self.den) };
        let (n1, d2) = if g1.is_one() {
            (n1, other.den.clone())
        } else {
            (n1.exact_div(&g1), other.den.exact_div(&g1))
        };
        let (n2, d1) = if g2.is_one() {
            (n2, self.den.clone())
        } else {
            (n2.exact_div(&g2), self.den.exact_div(&g2))
        };
        let num = n1.mul(&n2).shift(s1 + s2);
        let den = d1.mul(&d2);
        if den.is_one() {
            return LaurentFrac { num, den: LaurentPoly::one() };
        }
        LaurentFrac { num, den }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentFrac { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn div(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        // The stored parts are coprime, so inversion only rearranges them:
        // swap, move the unit v-power, and renormalize monic.
        let s = self.num.min_exp().unwrap();
        let n = self.num.shift(-s);
        let lc = n.leading_coeff();
        let num = self.den.scale(&(Rat::one() / &lc)).shift(-s);
        let den = n.scale(&(Rat::one() / &lc));
        if den.is_one() {
            return Ok(LaurentFrac { num, den: LaurentPoly::one() });
        }
        Ok(LaurentFrac { num, den })
    }

    pub fn pow(&self, k: i64) -> Result<Self, ScalarError> {
        if k == 0 {
            return Ok(Self::one());
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Complex conjugation hook. Coefficients are real rationals and `v`
    /// stands for a real point, so this is the identity.
    pub fn conj(&self) -> Self {
        self.clone()
    }

    /// Evaluate at a rational `v0`, exactly.
    pub fn eval_at(&self, v0: &Rat) -> Result<Rat, ScalarError> {
        let d = self.den.eval(v0);
        if d.is_zero() {
            return Err(ScalarError::DenominatorVanishes);
        }
        Ok(self.num.eval(v0) / d)
    }
}

impl fmt::Display for LaurentFrac {
    /// `num` when the denominator is 1, else `(num)/(den)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl FromStr for LaurentFrac {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, ScalarError> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('(') {
            let (num_s, den_s) = rest
                .split_once(")/(")
                .ok_or_else(|| ScalarError::Parse(format!("bad fraction {s:?}")))?;
            let den_s = den_s
                .strip_suffix(')')
                .ok_or_else(|| ScalarError::Parse(format!("bad fraction {s:?}")))?;
            let num = LaurentPoly::from_str(num_s)?;
            let den = LaurentPoly::from_str(den_s)?;
            Self::new(num, den)
        } else {
            Ok(Self::from_poly(LaurentPoly::from_str(s)?))
        }
    }
}

impl std::ops::Add for &LaurentFrac {
    type Output = LaurentFrac;
    fn add(self, rhs: &LaurentFrac) -> LaurentFrac {
        LaurentFrac::add(self, rhs)
    }
}

impl std::ops::Sub for &LaurentFrac {
    type Output = LaurentFrac;
    fn sub(self, rhs: &LaurentFrac) -> LaurentFrac {
        LaurentFrac::sub(self, rhs)
    }
}

impl std::ops::Mul for &LaurentFrac {
    type Output = LaurentFrac;
    fn mul(self, rhs: &LaurentFrac) -> LaurentFrac {
        LaurentFrac::mul(self, rhs)
    }
}

impl std::ops::Neg for &LaurentFrac {
    type Output = LaurentFrac;
    fn neg(self) -> LaurentFrac {
        LaurentFrac::neg(self)
    }
}

impl std::ops::Add for LaurentFrac {
    type Output = LaurentFrac;
    fn add(self, rhs: LaurentFrac) -> LaurentFrac {
        LaurentFrac::add(&self, &rhs)
    }
}

impl std::ops::Mul for LaurentFrac {
    type Output = LaurentFrac;
    fn mul(self, rhs: LaurentFrac) -> LaurentFrac {
        LaurentFrac::mul(&self, &rhs)
    }
}

impl num::Zero for LaurentFrac {
    fn zero() -> Self {
        LaurentFrac::zero()
    }
    fn is_zero(&self) -> bool {
        LaurentFrac::is_zero(self)
    }
}

impl num::One for LaurentFrac {
    fn one() -> Self {
        LaurentFrac::one()
    }
}

/// Exact integer n-th root: largest `r >= 0` with `r^n <= x`, checked for
/// exactness by the caller. `x >= 0`, `n >= 1`.
fn bigint_nth_root(x: &BigInt, n: u32) -> BigInt {
    assert!(!x.is_negative() && n >= 1);
    if x.is_zero() || x.is_one() || n == 1 {
        return x.clone();
    }
    let mut lo = BigInt::from(0);
    let mut hi = x.clone() + 1;
    while &lo + 1 < hi {
        let mid: BigInt = (&lo + &hi) / 2;
        if num::pow::pow(mid.clone(), n as usize) <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Exact positive rational n-th root of a positive rational, when it exists.
pub fn rational_nth_root(x: &Rat, n: u32) -> Option<Rat> {
    if !x.is_positive() || n == 0 {
        return None;
    }
    let p = bigint_nth_root(x.numer(), n);
    let q = bigint_nth_root(x.denom(), n);
    if &num::pow::pow(p.clone(), n as usize) == x.numer()
        && &num::pow::pow(q.clone(), n as usize) == x.denom()
    {
        Some(Rat::new(p, q))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lf(s: &str) -> LaurentFrac {
        LaurentFrac::from_str(s).unwrap()
    }

    #[test]
    fn canonical_form_reduces_gcd() {
        // (v^2 - 1) / (v - 1) = v + 1
        let num = LaurentPoly::monomial(2, rat_i(1)).add(&LaurentPoly::monomial(0, rat_i(-1)));
        let den = LaurentPoly::monomial(1, rat_i(1)).add(&LaurentPoly::monomial(0, rat_i(-1)));
        let f = LaurentFrac::new(num, den).unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f, lf("1*v^1 + 1*v^0"));
    }

    #[test]
    fn canonical_form_monic_denominator_and_shifted() {
        // (v^-1) / (2v^3 - 2v) has canonical denominator with constant term.
        let num = LaurentPoly::monomial(-1, rat_i(1));
        let den = LaurentPoly::monomial(3, rat_i(2)).add(&LaurentPoly::monomial(1, rat_i(-2)));
        let f = LaurentFrac::new(num, den).unwrap();
        assert_eq!(f.denominator().leading_coeff(), Rat::one());
        assert_eq!(f.denominator().min_exp(), Some(0));
        // Cross-check by evaluation.
        let v0 = rat_pq(1, 3);
        let expect = rat_pow(&v0, -1)
            / (rat_i(2) * rat_pow(&v0, 3) - rat_i(2) * rat_pow(&v0, 1));
        assert_eq!(f.eval_at(&v0).unwrap(), expect);
    }

    #[test]
    fn zero_is_canonical() {
        let f = lf("1*v^3").sub(&lf("1*v^3"));
        assert!(f.is_zero());
        assert_eq!(f, LaurentFrac::zero());
    }

    #[test]
    fn division_by_zero_detected() {
        assert_eq!(
            LaurentFrac::new(LaurentPoly::one(), LaurentPoly::zero()),
            Err(ScalarError::DivisionByZero)
        );
        assert_eq!(lf("1*v^0").div(&LaurentFrac::zero()), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn eval_detects_vanishing_denominator() {
        // 1/(v - 1/2) at v0 = 1/2.
        let den = LaurentPoly::monomial(1, rat_i(1)).add(&LaurentPoly::monomial(0, rat_pq(-1, 2)));
        let f = LaurentFrac::new(LaurentPoly::one(), den).unwrap();
        assert_eq!(f.eval_at(&rat_pq(1, 2)), Err(ScalarError::DenominatorVanishes));
        assert!(f.eval_at(&rat_pq(1, 3)).is_ok());
    }

    #[test]
    fn display_round_trip_examples() {
        for s in [
            "0",
            "1*v^0",
            "-3/2*v^2 + 1*v^0 + 1/2*v^-4",
            "(1*v^2 + -1*v^-2)/(1*v^1 + 2*v^0)",
        ] {
            let f = lf(s);
            assert_eq!(format!("{f}"), s, "canonical display of {s}");
            assert_eq!(LaurentFrac::from_str(&format!("{f}")).unwrap(), f);
        }
    }

    #[test]
    fn nth_root_exact_and_inexact() {
        assert_eq!(rational_nth_root(&rat_pq(1, 16), 4), Some(rat_pq(1, 2)));
        assert_eq!(rational_nth_root(&rat_pq(27, 8), 3), Some(rat_pq(3, 2)));
        assert_eq!(rational_nth_root(&rat_pq(1, 2), 2), None);
        assert_eq!(rational_nth_root(&rat_i(-4), 2), None);
    }

    // Small generator for property tests: fractions from sparse parts.
    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-6i64..=6, -8i64..=8), 0..5).prop_map(|ts| {
            let mut p = LaurentPoly::zero();
            for (k, c) in ts {
                p = p.add(&LaurentPoly::monomial(k, rat_i(c)));
            }
            p
        })
    }

    fn arb_frac() -> impl Strategy<Value = LaurentFrac> {
        (arb_poly(), arb_poly())
            .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
            .prop_map(|(n, d)| LaurentFrac::new(n, d).unwrap())
    }

    proptest! {
        #[test]
        fn field_axioms_sampled(a in arb_frac(), b in arb_frac(), c in arb_frac()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert!(a.sub(&a).is_zero());
            if !b.is_zero() {
                prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a.clone());
            }
        }

        #[test]
        fn eval_is_a_homomorphism(a in arb_frac(), b in arb_frac()) {
            let v0 = rat_pq(1, 2);
            let (ea, eb) = (a.eval_at(&v0), b.eval_at(&v0));
            if let (Ok(ea), Ok(eb)) = (ea, eb) {
                if let Ok(es) = a.add(&b).eval_at(&v0) {
                    prop_assert_eq!(es, ea.clone() + eb.clone());
                }
                if let Ok(ep) = a.mul(&b).eval_at(&v0) {
                    prop_assert_eq!(ep, ea * eb);
                }
            }
        }

        #[test]
        fn serialization_round_trips(a in arb_frac()) {
            let s = format!("{a}");
            prop_assert_eq!(LaurentFrac::from_str(&s).unwrap(), a);
        }

        #[test]
        fn canonicalization_is_idempotent(a in arb_frac()) {
            let again = LaurentFrac::new(a.numerator().clone(), a.denominator().clone()).unwrap();
            prop_assert_eq!(again, a);
        }
    }
}
