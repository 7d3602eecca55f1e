//! Exact scalar arithmetic: rationals, prime fields, and simple algebraic
//! extensions K[x]/(f) for a basic irreducible f (irreducible, f(0) = -1).

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Errors from field construction and scalar arithmetic.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("the zero polynomial cannot be used here")]
    ZeroPolynomial,
    #[error("polynomial is not basic irreducible: {0}")]
    NotBasicIrreducible(String),
    #[error("irreducibility over Q is only decided up to degree 4 (got degree {0})")]
    UnsupportedDegree(usize),
    #[error("irreducibility over F_p is only decided for p <= 13 and degree <= 6")]
    UnsupportedFiniteField,
    #[error("coefficient magnitude too large for the divisor search")]
    CoefficientTooLarge,
    #[error("x is only defined in an extension field")]
    NotAnExtension,
    #[error("cannot parse {what}: {message}")]
    Parse { what: &'static str, message: String },
}

fn parse_err(what: &'static str, message: impl Into<String>) -> ScalarError {
    ScalarError::Parse { what, message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum BaseKind {
    Rational,
    FinitePrime(u64),
}

/// A prime field F_p or the rationals Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseField(BaseKind);

/// One coefficient in a base field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum BaseValue {
    Rat(BigRational),
    Mod(u64),
}

impl BaseField {
    /// The field of rational numbers.
    pub fn rational() -> Self {
        BaseField(BaseKind::Rational)
    }

    /// The prime field F_p; errors when p is not prime.
    pub fn finite_prime(p: u64) -> Result<Self, ScalarError> {
        if !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(BaseField(BaseKind::FinitePrime(p)))
    }

    /// Parses "Q" or "F<p>".
    pub fn parse(text: &str) -> Result<Self, ScalarError> {
        let text = text.trim();
        if text == "Q" {
            return Ok(BaseField::rational());
        }
        if let Some(digits) = text.strip_prefix('F') {
            let p: u64 = digits
                .parse()
                .map_err(|_| parse_err("base field", format!("bad prime in `{text}`")))?;
            return BaseField::finite_prime(p);
        }
        Err(parse_err("base field", format!("expected Q or F<p>, got `{text}`")))
    }

    /// The characteristic: 0 for Q, p for F_p.
    pub fn characteristic(&self) -> u64 {
        match self.0 {
            BaseKind::Rational => 0,
            BaseKind::FinitePrime(p) => p,
        }
    }

    fn zero(&self) -> BaseValue {
        match self.0 {
            BaseKind::Rational => BaseValue::Rat(BigRational::zero()),
            BaseKind::FinitePrime(_) => BaseValue::Mod(0),
        }
    }

    fn one(&self) -> BaseValue {
        match self.0 {
            BaseKind::Rational => BaseValue::Rat(BigRational::one()),
            BaseKind::FinitePrime(_) => BaseValue::Mod(1),
        }
    }

    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, n: i64) -> BaseValue {
        match self.0 {
            BaseKind::Rational => BaseValue::Rat(BigRational::from_integer(BigInt::from(n))),
            BaseKind::FinitePrime(p) => {
                let p = p as i128;
                BaseValue::Mod(((n as i128).rem_euclid(p)) as u64)
            }
        }
    }

    fn is_zero(&self, a: &BaseValue) -> bool {
        match a {
            BaseValue::Rat(r) => r.is_zero(),
            BaseValue::Mod(m) => *m == 0,
        }
    }

    fn add(&self, a: &BaseValue, b: &BaseValue) -> BaseValue {
        match (a, b) {
            (BaseValue::Rat(x), BaseValue::Rat(y)) => BaseValue::Rat(x + y),
            (BaseValue::Mod(x), BaseValue::Mod(y)) => {
                let p = self.characteristic();
                BaseValue::Mod((x + y) % p)
            }
            _ => unreachable!("mixed base values"),
        }
    }

    fn neg(&self, a: &BaseValue) -> BaseValue {
        match a {
            BaseValue::Rat(x) => BaseValue::Rat(-x),
            BaseValue::Mod(x) => {
                let p = self.characteristic();
                BaseValue::Mod((p - x) % p)
            }
        }
    }

    fn sub(&self, a: &BaseValue, b: &BaseValue) -> BaseValue {
        self.add(a, &self.neg(b))
    }

    fn mul(&self, a: &BaseValue, b: &BaseValue) -> BaseValue {
        match (a, b) {
            (BaseValue::Rat(x), BaseValue::Rat(y)) => BaseValue::Rat(x * y),
            (BaseValue::Mod(x), BaseValue::Mod(y)) => {
                let p = self.characteristic() as u128;
                BaseValue::Mod(((*x as u128 * *y as u128) % p) as u64)
            }
            _ => unreachable!("mixed base values"),
        }
    }

    fn inv(&self, a: &BaseValue) -> Result<BaseValue, ScalarError> {
        if self.is_zero(a) {
            return Err(ScalarError::DivisionByZero);
        }
        match a {
            BaseValue::Rat(x) => Ok(BaseValue::Rat(x.recip())),
            BaseValue::Mod(x) => {
                let p = self.characteristic();
                Ok(BaseValue::Mod(mod_pow(*x, p - 2, p)))
            }
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_pow(base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b = base as u128 % p as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u128;
        }
        b = b * b % p as u128;
        exp >>= 1;
    }
    acc as u64
}

/// A univariate polynomial over a base field, used as an extension modulus
/// and as the argument of evaluation maps. Coefficients run from degree 0
/// upward with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    base: BaseField,
    coeffs: Vec<BaseValue>,
}

fn trim(base: &BaseField, mut v: Vec<BaseValue>) -> Vec<BaseValue> {
    while v.last().is_some_and(|c| base.is_zero(c)) {
        v.pop();
    }
    v
}

impl Polynomial {
    /// Builds a polynomial from integer coefficients a_0, a_1, ...
    pub fn from_i64_coeffs(base: &BaseField, coeffs: &[i64]) -> Polynomial {
        let v = coeffs.iter().map(|&c| base.from_i64(c)).collect();
        Polynomial { base: base.clone(), coeffs: trim(base, v) }
    }

    /// The base field of the coefficients.
    pub fn base(&self) -> &BaseField {
        &self.base
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The coefficient of x^i as a scalar of `field` (whose base must match).
    pub fn coeff_in(&self, i: usize, field: &Field) -> Result<Scalar, ScalarError> {
        if field.base_field() != &self.base {
            return Err(ScalarError::FieldMismatch);
        }
        let v = self.coeffs.get(i).cloned().unwrap_or_else(|| self.base.zero());
        Ok(Scalar { field: field.clone(), rep: trim(&self.base, vec![v]) })
    }

    /// Evaluates the polynomial at a scalar by Horner's rule.
    pub fn eval(&self, at: &Scalar) -> Result<Scalar, ScalarError> {
        if at.field.base_field() != &self.base {
            return Err(ScalarError::FieldMismatch);
        }
        let mut acc = at.field.zero();
        for c in self.coeffs.iter().rev() {
            let c = Scalar { field: at.field.clone(), rep: trim(&self.base, vec![c.clone()]) };
            acc = acc.mul(at)?.add(&c)?;
        }
        Ok(acc)
    }

    /// Parses a literal like "x^2+x-1 over Q" or "x^3+x+1 over F2".
    /// An omitted "over" clause means Q.
    pub fn parse(text: &str) -> Result<Polynomial, ScalarError> {
        let (poly_part, base) = match text.split_once(" over ") {
            Some((l, r)) => (l, BaseField::parse(r)?),
            None => (text, BaseField::rational()),
        };
        parse_poly_body(poly_part.trim(), &base)
    }

    /// True when the polynomial is irreducible with constant term -1.
    /// Over Q this is decided up to degree 4; over F_p for p <= 13 and
    /// degree <= 6. Out-of-range inputs get an error, not a guess.
    pub fn is_basic_irreducible(&self) -> Result<bool, ScalarError> {
        let m = match self.degree() {
            None | Some(0) => return Ok(false),
            Some(m) => m,
        };
        let minus_one = self.base.neg(&self.base.one());
        if self.coeffs[0] != minus_one {
            return Ok(false);
        }
        if m == 1 {
            return Ok(true);
        }
        match self.base.0 {
            BaseKind::FinitePrime(p) => {
                if p > 13 || m > 6 {
                    return Err(ScalarError::UnsupportedFiniteField);
                }
                Ok(self.finite_irreducible(p, m))
            }
            BaseKind::Rational => {
                if m > 4 {
                    return Err(ScalarError::UnsupportedDegree(m));
                }
                self.rational_irreducible(m)
            }
        }
    }

    fn finite_irreducible(&self, p: u64, m: usize) -> bool {
        for d in 1..=m / 2 {
            let mut g = vec![0u64; d + 1];
            g[d] = 1;
            loop {
                let gv: Vec<BaseValue> = g.iter().map(|&c| BaseValue::Mod(c)).collect();
                let (_, rem) = poly_divrem(&self.base, &self.coeffs, &gv);
                if rem.is_empty() {
                    return false;
                }
                // advance the d free coefficients like a base-p counter
                let mut i = 0;
                while i < d {
                    g[i] += 1;
                    if g[i] < p {
                        break;
                    }
                    g[i] = 0;
                    i += 1;
                }
                if i == d {
                    break;
                }
            }
        }
        true
    }

    fn rational_irreducible(&self, m: usize) -> Result<bool, ScalarError> {
        let f = self.primitive_integer();
        if has_rational_root(&f)? {
            return Ok(false);
        }
        if m < 4 {
            return Ok(true);
        }
        Ok(!has_quadratic_factor(&f)?)
    }

    /// Clears denominators and divides out the content.
    fn primitive_integer(&self) -> Vec<BigInt> {
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            if let BaseValue::Rat(r) = c {
                lcm = lcm.lcm(r.denom());
            }
        }
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| match c {
                BaseValue::Rat(r) => r.numer() * (&lcm / r.denom()),
                BaseValue::Mod(_) => unreachable!(),
            })
            .collect();
        let mut content = BigInt::zero();
        for c in &ints {
            content = content.gcd(c);
        }
        if !content.is_zero() && !content.is_one() {
            for c in &mut ints {
                *c = &*c / &content;
            }
        }
        ints
    }
}

fn poly_add(base: &BaseField, a: &[BaseValue], b: &[BaseValue]) -> Vec<BaseValue> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| base.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| base.zero());
        out.push(base.add(&x, &y));
    }
    trim(base, out)
}

fn poly_scale(base: &BaseField, a: &[BaseValue], k: &BaseValue) -> Vec<BaseValue> {
    trim(base, a.iter().map(|c| base.mul(c, k)).collect())
}

fn poly_mul(base: &BaseField, a: &[BaseValue], b: &[BaseValue]) -> Vec<BaseValue> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![base.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let prod = base.mul(x, y);
            out[i + j] = base.add(&out[i + j], &prod);
        }
    }
    trim(base, out)
}

/// Euclidean division by a nonzero divisor over a field.
fn poly_divrem(
    base: &BaseField,
    a: &[BaseValue],
    b: &[BaseValue],
) -> (Vec<BaseValue>, Vec<BaseValue>) {
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut rem: Vec<BaseValue> = a.to_vec();
    let mut quo = vec![base.zero(); a.len().saturating_sub(b.len() - 1)];
    let lead_inv = base.inv(b.last().unwrap()).expect("nonzero leading coefficient");
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let factor = base.mul(rem.last().unwrap(), &lead_inv);
        quo[shift] = base.add(&quo[shift], &factor);
        for (i, c) in b.iter().enumerate() {
            let sub = base.mul(c, &factor);
            rem[shift + i] = base.sub(&rem[shift + i], &sub);
        }
        rem = trim(base, rem);
        if rem.is_empty() {
            break;
        }
    }
    (trim(base, quo), rem)
}

/// Extended Euclid: returns (g, u, v) with u*a + v*b = g.
fn poly_xgcd(
    base: &BaseField,
    a: &[BaseValue],
    b: &[BaseValue],
) -> (Vec<BaseValue>, Vec<BaseValue>, Vec<BaseValue>) {
    let one = vec![base.one()];
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut u0, mut u1) = (one.clone(), Vec::new());
    let (mut v0, mut v1) = (Vec::new(), one);
    while !r1.is_empty() {
        let (q, r) = poly_divrem(base, &r0, &r1);
        let qu = poly_mul(base, &q, &u1);
        let qv = poly_mul(base, &q, &v1);
        let nu = poly_add(base, &u0, &poly_scale(base, &qu, &base.neg(&base.one())));
        let nv = poly_add(base, &v0, &poly_scale(base, &qv, &base.neg(&base.one())));
        r0 = std::mem::replace(&mut r1, r);
        u0 = std::mem::replace(&mut u1, nu);
        v0 = std::mem::replace(&mut v1, nv);
    }
    (r0, u0, v0)
}

fn eval_int_poly(f: &[BigInt], at: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in f.iter().rev() {
        acc = acc * at + BigRational::from_integer(c.clone());
    }
    acc
}

fn eval_int_poly_int(f: &[BigInt], at: i64) -> BigInt {
    let at = BigInt::from(at);
    let mut acc = BigInt::zero();
    for c in f.iter().rev() {
        acc = acc * &at + c;
    }
    acc
}

fn positive_divisors(n: &BigInt) -> Result<Vec<u64>, ScalarError> {
    let n = n.abs().to_u64().ok_or(ScalarError::CoefficientTooLarge)?;
    assert!(n > 0, "divisors of zero requested");
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    Ok(out)
}

fn has_rational_root(f: &[BigInt]) -> Result<bool, ScalarError> {
    let a0 = f.first().cloned().unwrap_or_default();
    let am = f.last().cloned().unwrap_or_default();
    assert!(!a0.is_zero() && !am.is_zero());
    let mut seen = BTreeSet::new();
    for r in positive_divisors(&a0)? {
        for s in positive_divisors(&am)? {
            for sign in [1i64, -1] {
                let cand = BigRational::new(BigInt::from(sign) * BigInt::from(r), BigInt::from(s));
                if seen.insert(cand.clone()) && eval_int_poly(f, &cand).is_zero() {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Kronecker-style search for an integer quadratic factor of a primitive
/// quartic: any factor is pinned by its values at 0, 1 and -1, which must
/// divide the corresponding values of f.
fn has_quadratic_factor(f: &[BigInt]) -> Result<bool, ScalarError> {
    let q = BaseField::rational();
    let f0 = eval_int_poly_int(f, 0);
    let f1 = eval_int_poly_int(f, 1);
    let fm1 = eval_int_poly_int(f, -1);
    assert!(!f1.is_zero() && !fm1.is_zero(), "roots at +-1 were excluded earlier");
    let fq: Vec<BaseValue> =
        f.iter().map(|c| BaseValue::Rat(BigRational::from_integer(c.clone()))).collect();
    let signed = |d: u64| [d as i64, -(d as i64)];
    for d0 in positive_divisors(&f0)? {
        for g0 in signed(d0) {
            for d1 in positive_divisors(&f1)? {
                for g1 in signed(d1) {
                    for dm1 in positive_divisors(&fm1)? {
                        for gm1 in signed(dm1) {
                            let two_a = g1 + gm1 - 2 * g0;
                            let two_b = g1 - gm1;
                            if two_a % 2 != 0 || two_b % 2 != 0 || two_a == 0 {
                                continue;
                            }
                            let g = [g0, two_b / 2, two_a / 2]
                                .map(|c| BaseValue::Rat(BigRational::from_integer(c.into())));
                            let (_, rem) = poly_divrem(&q, &fq, &g);
                            if rem.is_empty() {
                                return Ok(true);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(false)
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct FieldRepr {
    base: BaseField,
    modulus: Option<Polynomial>,
}

/// A coefficient field: a base field or an extension K[x]/(f) by a basic
/// irreducible f. Cloning is cheap; equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Field(Arc<FieldRepr>);

impl Field {
    /// Q as a field of scalars.
    pub fn rational() -> Field {
        Field::base(BaseField::rational())
    }

    /// F_p as a field of scalars.
    pub fn prime(p: u64) -> Result<Field, ScalarError> {
        Ok(Field::base(BaseField::finite_prime(p)?))
    }

    /// Wraps a base field without extension.
    pub fn base(base: BaseField) -> Field {
        Field(Arc::new(FieldRepr { base, modulus: None }))
    }

    /// The extension K[x]/(f); f must be basic irreducible over `base`.
    pub fn extend(base: &BaseField, f: &Polynomial) -> Result<Field, ScalarError> {
        if f.base() != base {
            return Err(ScalarError::FieldMismatch);
        }
        if f.is_zero() {
            return Err(ScalarError::ZeroPolynomial);
        }
        if !f.is_basic_irreducible()? {
            return Err(ScalarError::NotBasicIrreducible(f.to_string()));
        }
        if f.degree() == Some(1) {
            // linear modulus: the extension is the base field itself
            return Ok(Field::base(base.clone()));
        }
        Ok(Field(Arc::new(FieldRepr { base: base.clone(), modulus: Some(f.clone()) })))
    }

    /// The underlying base field.
    pub fn base_field(&self) -> &BaseField {
        &self.0.base
    }

    /// The extension modulus, if any.
    pub fn modulus(&self) -> Option<&Polynomial> {
        self.0.modulus.as_ref()
    }

    /// Dimension over the base field (1 when unextended).
    pub fn degree(&self) -> usize {
        match &self.0.modulus {
            Some(f) => f.degree().expect("nonzero modulus"),
            None => 1,
        }
    }

    pub fn zero(&self) -> Scalar {
        Scalar { field: self.clone(), rep: Vec::new() }
    }

    pub fn one(&self) -> Scalar {
        Scalar { field: self.clone(), rep: vec![self.0.base.one()] }
    }

    /// The integer n as a scalar.
    pub fn from_i64(&self, n: i64) -> Scalar {
        let v = self.0.base.from_i64(n);
        Scalar { field: self.clone(), rep: trim(&self.0.base, vec![v]) }
    }

    /// The fraction n/d as a scalar; d must be invertible.
    pub fn from_ratio(&self, n: i64, d: i64) -> Result<Scalar, ScalarError> {
        self.from_i64(n).div(&self.from_i64(d))
    }

    /// The image of x in an extension field.
    pub fn x_bar(&self) -> Result<Scalar, ScalarError> {
        if self.0.modulus.is_none() {
            return Err(ScalarError::NotAnExtension);
        }
        let b = &self.0.base;
        Ok(Scalar { field: self.clone(), rep: vec![b.zero(), b.one()] })
    }

    /// A scalar from base-field coordinates 1, x, x^2, ...
    #[allow(clippy::wrong_self_convention)]
    pub(crate) fn from_coords(&self, coords: Vec<Scalar>) -> Result<Scalar, ScalarError> {
        let b = &self.0.base;
        let mut rep = Vec::with_capacity(coords.len());
        for c in coords {
            if c.field.degree() != 1 || c.field.base_field() != b {
                return Err(ScalarError::FieldMismatch);
            }
            rep.push(c.rep.first().cloned().unwrap_or_else(|| b.zero()));
        }
        if rep.len() > self.degree() {
            let tail = trim(b, rep[self.degree()..].to_vec());
            assert!(tail.is_empty(), "coordinates exceed the extension degree");
            rep.truncate(self.degree());
        }
        Ok(Scalar { field: self.clone(), rep: trim(b, rep) })
    }
}

impl fmt::Display for Field {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.0.base.0 {
            BaseKind::Rational => "Q".to_string(),
            BaseKind::FinitePrime(p) => format!("F{p}"),
        };
        match &self.0.modulus {
            None => write!(out, "{base}"),
            Some(f) => write!(out, "{base}[x]/({f})"),
        }
    }
}

/// An element of a [`Field`]. Extension elements are stored in coordinates
/// over the base field with respect to 1, x, ..., x^(m-1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    field: Field,
    rep: Vec<BaseValue>,
}

impl Scalar {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.rep.len() == 1 && self.rep[0] == self.field.0.base.one()
    }

    /// Coordinates over the base field, padded to the extension degree.
    pub fn coords(&self) -> Vec<Scalar> {
        let b = self.field.base_field().clone();
        let bf = Field::base(b.clone());
        (0..self.field.degree())
            .map(|i| {
                let v = self.rep.get(i).cloned().unwrap_or_else(|| b.zero());
                Scalar { field: bf.clone(), rep: trim(&b, vec![v]) }
            })
            .collect()
    }

    fn check(&self, other: &Scalar) -> Result<(), ScalarError> {
        if self.field != other.field {
            return Err(ScalarError::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        let b = &self.field.0.base;
        Ok(Scalar { field: self.field.clone(), rep: poly_add(b, &self.rep, &other.rep) })
    }

    pub fn neg(&self) -> Scalar {
        let b = &self.field.0.base;
        Scalar { field: self.field.clone(), rep: poly_scale(b, &self.rep, &b.neg(&b.one())) }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        let b = &self.field.0.base;
        let mut rep = poly_mul(b, &self.rep, &other.rep);
        if let Some(f) = &self.field.0.modulus {
            rep = poly_divrem(b, &rep, &f.coeffs).1;
        }
        Ok(Scalar { field: self.field.clone(), rep })
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let b = &self.field.0.base;
        match &self.field.0.modulus {
            None => Ok(Scalar { field: self.field.clone(), rep: vec![b.inv(&self.rep[0])?] }),
            Some(f) => {
                let (g, u, _) = poly_xgcd(b, &self.rep, &f.coeffs);
                assert_eq!(g.len(), 1, "modulus is irreducible, gcd must be a unit");
                let ginv = b.inv(&g[0])?;
                let rep = poly_divrem(b, &poly_scale(b, &u, &ginv), &f.coeffs).1;
                Ok(Scalar { field: self.field.clone(), rep })
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.mul(&other.inv()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, n: i64) -> Result<Scalar, ScalarError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.field.one();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }
}

fn fmt_terms(out: &mut fmt::Formatter<'_>, base: &BaseField, coeffs: &[BaseValue]) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(out, "0");
    }
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if base.is_zero(c) {
            continue;
        }
        let (sign_neg, mag) = match c {
            BaseValue::Rat(r) if r.is_negative() => (true, BaseValue::Rat(-r)),
            _ => (false, c.clone()),
        };
        if first {
            if sign_neg {
                write!(out, "-")?;
            }
            first = false;
        } else if sign_neg {
            write!(out, "-")?;
        } else {
            write!(out, "+")?;
        }
        let mag_str = match &mag {
            BaseValue::Rat(r) => r.to_string(),
            BaseValue::Mod(m) => m.to_string(),
        };
        let mag_is_one = mag == base.one();
        match i {
            0 => write!(out, "{mag_str}")?,
            1 => {
                if !mag_is_one {
                    write!(out, "{mag_str}")?;
                }
                write!(out, "x")?;
            }
            _ => {
                if !mag_is_one {
                    write!(out, "{mag_str}")?;
                }
                write!(out, "x^{i}")?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(out, &self.base, &self.coeffs)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(out, &self.field.0.base, &self.rep)
    }
}

/// Parses a polynomial body like "x^2+x-1" or "2x^3-1/2x+1".
fn parse_poly_body(text: &str, base: &BaseField) -> Result<Polynomial, ScalarError> {
    let bad = |msg: String| parse_err("polynomial", msg);
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(bad("empty polynomial".into()));
    }
    let mut coeffs: Vec<BaseValue> = Vec::new();
    let mut pos = 0usize;
    let mut first_term = true;
    while pos < chars.len() {
        let mut sign = 1i64;
        if chars[pos] == '+' || chars[pos] == '-' {
            if chars[pos] == '-' {
                sign = -1;
            }
            pos += 1;
        } else if !first_term {
            return Err(bad(format!("expected + or - at position {pos}")));
        }
        first_term = false;
        let read_uint = |pos: &mut usize| -> Option<i64> {
            let start = *pos;
            while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                *pos += 1;
            }
            if *pos == start {
                return None;
            }
            chars[start..*pos].iter().collect::<String>().parse().ok()
        };
        let numer = read_uint(&mut pos);
        let denom = if numer.is_some() && pos < chars.len() && chars[pos] == '/' {
            pos += 1;
            Some(read_uint(&mut pos).ok_or_else(|| bad("missing denominator".into()))?)
        } else {
            None
        };
        let mut power = 0usize;
        if pos < chars.len() && chars[pos] == 'x' {
            pos += 1;
            power = 1;
            if pos < chars.len() && chars[pos] == '^' {
                pos += 1;
                power = read_uint(&mut pos).ok_or_else(|| bad("missing exponent".into()))? as usize;
            }
        } else if numer.is_none() {
            return Err(bad(format!("expected a term at position {pos}")));
        }
        let mut value = base.from_i64(sign * numer.unwrap_or(1));
        if let Some(d) = denom {
            if d == 0 {
                return Err(ScalarError::DivisionByZero);
            }
            value = base.mul(&value, &base.inv(&base.from_i64(d))?);
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, base.zero());
        }
        coeffs[power] = base.add(&coeffs[power], &value);
    }
    Ok(Polynomial { base: base.clone(), coeffs: trim(base, coeffs) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rational()
    }

    #[test]
    fn rational_arithmetic() {
        let f = q();
        let half = f.from_ratio(1, 2).unwrap();
        let third = f.from_ratio(1, 3).unwrap();
        let sum = half.add(&third).unwrap();
        assert_eq!(sum, f.from_ratio(5, 6).unwrap());
        assert_eq!(sum.to_string(), "5/6");
        assert!(f.from_i64(0).inv().is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(7).unwrap();
        let three = f.from_i64(3);
        assert_eq!(three.mul(&three.inv().unwrap()).unwrap(), f.one());
        assert_eq!(f.from_i64(-1), f.from_i64(6));
        assert!(Field::prime(6).is_err());
    }

    #[test]
    fn extension_q_golden_ratio_style() {
        // x^2 + x - 1: the modulus from the running examples over Q
        let f = Polynomial::parse("x^2+x-1 over Q").unwrap();
        assert_eq!(f.is_basic_irreducible(), Ok(true));
        let k = Field::extend(&BaseField::rational(), &f).unwrap();
        assert_eq!(k.degree(), 2);
        let x = k.x_bar().unwrap();
        assert!(f.eval(&x).unwrap().is_zero());
        assert_eq!(x.mul(&x.inv().unwrap()).unwrap(), k.one());
        // inv(x) = 1 + x since x^2 = 1 - x
        assert_eq!(x.inv().unwrap(), x.add(&k.one()).unwrap());
    }

    #[test]
    fn extension_f2_cube_root() {
        let f = Polynomial::parse("x^2+x+1 over F2").unwrap();
        assert_eq!(f.is_basic_irreducible(), Ok(true));
        let k = Field::extend(&BaseField::finite_prime(2).unwrap(), &f).unwrap();
        let x = k.x_bar().unwrap();
        assert_eq!(x.pow(3).unwrap(), k.one());
        assert_ne!(x.pow(2).unwrap(), k.one());
    }

    #[test]
    fn linear_modulus_collapses_to_base() {
        let f = Polynomial::parse("x-1 over Q").unwrap();
        let k = Field::extend(&BaseField::rational(), &f).unwrap();
        assert_eq!(k.degree(), 1);
        assert!(k.x_bar().is_err());
    }

    #[test]
    fn basic_irreducibility_gate() {
        // constant term must be -1
        let f = Polynomial::parse("x^2+x+1 over Q").unwrap();
        assert_eq!(f.is_basic_irreducible(), Ok(false));
        // x^2 - 1 = (x-1)(x+1)
        let f = Polynomial::parse("x^2-1 over Q").unwrap();
        assert_eq!(f.is_basic_irreducible(), Ok(false));
        let f = Polynomial::parse("x^3+x-1 over Q").unwrap();
        assert_eq!(f.is_basic_irreducible(), Ok(true));
        // 1 - 2x^3 reversed sign convention: constant -1 after negation
        let f = Polynomial::parse("2x^3-1 over Q").unwrap();
        assert_eq!(f.is_basic_irreducible(), Ok(true));
        let f = Polynomial::parse("x^5-1 over Q").unwrap();
        assert!(matches!(f.is_basic_irreducible(), Err(ScalarError::UnsupportedDegree(5))));
    }

    #[test]
    fn quartic_factor_search() {
        // a quartic with constant term -1 built from two quadratics must be
        // caught by the factor search
        let a = Polynomial::parse("x^2+x-1").unwrap();
        let b = Polynomial::parse("x^2-2x+1").unwrap();
        let base = BaseField::rational();
        let prod = poly_mul(&base, &a.coeffs, &b.coeffs);
        let prod = Polynomial { base: base.clone(), coeffs: prod };
        assert_eq!(prod.is_basic_irreducible(), Ok(false));
        let irr = Polynomial::parse("x^4+x-1").unwrap();
        assert_eq!(irr.is_basic_irreducible(), Ok(true));
    }

    #[test]
    fn finite_field_irreducibility_oracle() {
        // independent oracle: exhaustive product of all monic factor pairs
        for p in [2u64, 3, 5] {
            let base = BaseField::finite_prime(p).unwrap();
            for m in 2..=4usize {
                let mut poly = vec![0i64; m + 1];
                poly[0] = -1;
                poly[m] = 1;
                // sample a few middle-coefficient fills deterministically
                for fill in 0..p.pow((m - 1) as u32).min(30) {
                    let mut f = fill;
                    for c in poly.iter_mut().take(m).skip(1) {
                        *c = (f % p) as i64;
                        f /= p;
                    }
                    let cand = Polynomial::from_i64_coeffs(&base, &poly);
                    let got = cand.is_basic_irreducible().unwrap();
                    let want = !exhaustive_reducible(&base, &cand, p, m);
                    assert_eq!(got, want, "p={p} poly={cand}");
                }
            }
        }
    }

    fn exhaustive_reducible(base: &BaseField, f: &Polynomial, p: u64, m: usize) -> bool {
        // multiply every pair of monic polynomials with degrees summing to m
        for da in 1..m {
            let db = m - da;
            if db < da {
                break;
            }
            for ia in 0..p.pow(da as u32) {
                for ib in 0..p.pow(db as u32) {
                    let mk = |deg: usize, mut idx: u64| {
                        let mut c = vec![0i64; deg + 1];
                        c[deg] = 1;
                        for v in c.iter_mut().take(deg) {
                            *v = (idx % p) as i64;
                            idx /= p;
                        }
                        Polynomial::from_i64_coeffs(base, &c)
                    };
                    let prod = poly_mul(base, &mk(da, ia).coeffs, &mk(db, ib).coeffs);
                    if prod == f.coeffs {
                        return true;
                    }
                }
            }
        }
        false
    }

    #[test]
    fn poly_parse_round_trip() {
        for text in ["x^2+x-1", "x^3-2x+5", "2x^4-1/2x^2+3", "x-1"] {
            let f = Polynomial::parse(text).unwrap();
            let again = Polynomial::parse(&f.to_string()).unwrap();
            assert_eq!(f, again, "{text}");
        }
    }

    #[test]
    fn field_mismatch_is_an_error() {
        let a = q().from_i64(1);
        let b = Field::prime(5).unwrap().from_i64(1);
        assert_eq!(a.add(&b), Err(ScalarError::FieldMismatch));
    }
}
