//! Rational tangle arithmetic.
//!
//! A rational tangle is determined up to isotopy by its fraction `p/q`
//! (with `1/0` standing for the vertical tangle `[∞]`). This module holds the
//! exact fraction type, continued fractions `[a1,...,an]`, standard forms
//! `⟨a1,...,an⟩`, the notation parser, canonical forms and the
//! number-theoretic facts about the numerator closures `N(p/q)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{domain, Error, Result};

/// Exact tangle fraction, kept normalized: `gcd(|p|, q) = 1`, `q >= 0`, and
/// `∞` is stored as `1/0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fraction {
    p: BigInt,
    q: BigInt,
}

impl Fraction {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (mut p, mut q) = (p.into(), q.into());
        if p.is_zero() && q.is_zero() {
            return domain("0/0 is not a tangle fraction");
        }
        if q.is_zero() {
            return Ok(Self::infinity());
        }
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        let g = p.gcd(&q);
        Ok(Fraction { p: p / &g, q: q / &g })
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Fraction { p: n.into(), q: BigInt::one() }
    }

    pub fn infinity() -> Self {
        Fraction { p: BigInt::one(), q: BigInt::zero() }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn numer(&self) -> &BigInt {
        &self.p
    }

    pub fn denom(&self) -> &BigInt {
        &self.q
    }

    pub fn is_infinite(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.is_infinite() && self.p.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        !self.is_infinite() && self.p.is_negative()
    }

    pub fn add_int(&self, n: &BigInt) -> Self {
        if self.is_infinite() {
            return self.clone();
        }
        Fraction { p: &self.p + n * &self.q, q: self.q.clone() }
    }

    pub fn add_one(&self) -> Self {
        self.add_int(&BigInt::one())
    }

    pub fn sub_one(&self) -> Self {
        self.add_int(&-BigInt::one())
    }

    /// `1/f`, exchanging `0` and `∞`.
    pub fn invert(&self) -> Self {
        Fraction::new(self.q.clone(), self.p.clone()).expect("a normalized fraction is never 0/0")
    }

    pub fn negate(&self) -> Self {
        if self.is_infinite() {
            return self.clone();
        }
        Fraction { p: -&self.p, q: self.q.clone() }
    }

    /// Fraction of the tangle turned a quarter turn: `-1/f`.
    pub fn rotate(&self) -> Self {
        self.invert().negate()
    }

    pub fn apply(&self, op: TangleOp) -> Self {
        match op {
            TangleOp::AddOne => self.add_one(),
            TangleOp::SubOne => self.sub_one(),
            TangleOp::Invert => self.invert(),
            TangleOp::Negate => self.negate(),
            TangleOp::Rotate => self.rotate(),
        }
    }

    /// Fraction of `T * [n̄]` given `self = F(T)`: `1/(n + 1/F(T))`.
    pub fn bottom_twist(&self, n: &BigInt) -> Self {
        self.invert().add_int(n).invert()
    }

    pub fn to_json(&self) -> Value {
        let (cf, standard) = match canonical_form(self) {
            Ok(cf) => {
                let sf = cf.to_standard_form();
                (terms_json(&cf.terms), terms_json(&sf.twists))
            }
            Err(_) => (Value::Null, Value::Null),
        };
        json!({
            "p": int_json(&self.p),
            "q": int_json(&self.q),
            "cf": cf,
            "standard": standard,
        })
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) | (false, true) => None,
            _ => Some((&self.p * &other.q).cmp(&(&other.p * &self.q))),
        }
    }
}

/// The five unary tangle operations that act on fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TangleOp {
    AddOne,
    SubOne,
    Invert,
    Negate,
    Rotate,
}

/// `[a1, a2, ..., an]` = `a1 + 1/(a2 + 1/(... + 1/an))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    terms: Vec<BigInt>,
}

impl ContinuedFraction {
    /// Interior and final terms must be nonzero; the first may be zero.
    pub fn new(terms: Vec<BigInt>) -> Result<Self> {
        if terms.is_empty() {
            return domain("a continued fraction needs at least one term");
        }
        if let Some(i) = terms.iter().skip(1).position(|t| t.is_zero()) {
            return domain(format!("term {} of a continued fraction must be nonzero", i + 2));
        }
        Ok(ContinuedFraction { terms })
    }

    pub fn from_i64(terms: &[i64]) -> Result<Self> {
        Self::new(terms.iter().map(|&t| BigInt::from(t)).collect())
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluate from the innermost term outwards.
    pub fn eval(&self) -> Fraction {
        let mut it = self.terms.iter().rev();
        let last = it.next().expect("nonempty by construction");
        let mut acc = Fraction::integer(last.clone());
        for a in it {
            acc = acc.invert().add_int(a);
        }
        acc
    }

    /// Odd length and sign-coherent (the first term may be zero).
    pub fn is_canonical(&self) -> bool {
        if self.terms.len().is_multiple_of(2) {
            return false;
        }
        let rest = &self.terms[1..];
        let a1 = &self.terms[0];
        let pos = !a1.is_negative() && rest.iter().all(|t| t.is_positive());
        let neg = !a1.is_positive() && rest.iter().all(|t| t.is_negative());
        pos || neg
    }

    /// The standard form `⟨an, ..., a1⟩` obtained by reversing the terms.
    pub fn to_standard_form(&self) -> StandardForm {
        StandardForm { twists: self.terms.iter().rev().cloned().collect() }
    }

    pub fn crossing_count(&self) -> BigInt {
        self.terms.iter().map(|t| t.abs()).sum()
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", join(&self.terms))
    }
}

/// `⟨a1, ..., an⟩`: `a1` horizontal twists, then `a2` twists added at the
/// bottom, then `a3` on the right, and so on.
///
/// The seed is `[0]`, except that a leading zero followed by more terms
/// means the construction starts from `[∞]`, so `⟨0, a2, ...⟩` begins with the
/// vertical twist `[ā2]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StandardForm {
    twists: Vec<BigInt>,
}

impl StandardForm {
    pub fn new(twists: Vec<BigInt>) -> Result<Self> {
        if twists.is_empty() {
            return domain("a standard form needs at least one term");
        }
        Ok(StandardForm { twists })
    }

    pub fn from_i64(twists: &[i64]) -> Result<Self> {
        Self::new(twists.iter().map(|&t| BigInt::from(t)).collect())
    }

    pub fn twists(&self) -> &[BigInt] {
        &self.twists
    }

    pub fn starts_vertical(&self) -> bool {
        self.twists.len() > 1 && self.twists[0].is_zero()
    }

    /// Fold the construction directly: `T + [a]` adds `a`, and
    /// `T * [ā] = 1/(a + 1/T)`.
    pub fn fraction(&self) -> Fraction {
        let mut f = if self.starts_vertical() { Fraction::infinity() } else { Fraction::zero() };
        for (i, a) in self.twists.iter().enumerate() {
            f = if i % 2 == 0 { f.add_int(a) } else { f.bottom_twist(a) };
        }
        f
    }

    pub fn crossing_count(&self) -> usize {
        self.twists
            .iter()
            .map(|t| t.abs().to_usize().unwrap_or(usize::MAX))
            .fold(0usize, |acc, t| acc.saturating_add(t))
    }

    /// All terms share one sign (zeros allowed anywhere).
    pub fn is_sign_coherent(&self) -> bool {
        let pos = self.twists.iter().all(|t| !t.is_negative());
        let neg = self.twists.iter().all(|t| !t.is_positive());
        pos || neg
    }

    pub fn is_negative(&self) -> bool {
        self.twists.iter().any(|t| t.is_negative())
    }

    pub fn negate(&self) -> StandardForm {
        StandardForm { twists: self.twists.iter().map(|t| -t).collect() }
    }

    /// Unit steps of the construction in order: `true` for a right addition,
    /// `false` for a bottom multiplication. Signs are dropped.
    pub fn build_steps(&self) -> Vec<bool> {
        let mut steps = Vec::with_capacity(self.crossing_count());
        for (i, a) in self.twists.iter().enumerate() {
            let n = a.abs().to_usize().expect("twist count fits in memory");
            steps.extend(std::iter::repeat_n(i % 2 == 0, n));
        }
        steps
    }

    /// Per-crossing signs of the twists (`+1` for a positive-slope
    /// overcrossing), in construction order.
    pub fn twist_signs(&self) -> Vec<i8> {
        let mut out = Vec::with_capacity(self.crossing_count());
        for a in &self.twists {
            let n = a.abs().to_usize().expect("twist count fits in memory");
            let s = if a.is_negative() { -1 } else { 1 };
            out.extend(std::iter::repeat_n(s, n));
        }
        out
    }
}

impl fmt::Display for StandardForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}⟩", join(&self.twists))
    }
}

/// A parsed piece of tangle notation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Notation {
    Standard(StandardForm),
    Continued(ContinuedFraction),
    Fraction(Fraction),
}

impl Notation {
    pub fn fraction(&self) -> Fraction {
        match self {
            Notation::Standard(sf) => sf.fraction(),
            Notation::Continued(cf) => cf.eval(),
            Notation::Fraction(f) => f.clone(),
        }
    }
}

/// Parse `⟨i,...⟩`, `<i,...>`, `[i,...]`, `i/i`, `i` or `inf`.
///
/// ASCII whitespace around tokens is ignored. `−` (U+2212) is accepted as a
/// minus sign and `∞` as a synonym for `inf`.
pub fn parse_tangle(text: &str) -> Result<Notation> {
    let mut p = Parser { s: text, pos: 0 };
    p.skip_ws();
    let out = if p.eat("⟨") {
        Notation::Standard(StandardForm::new(p.list("⟩")?)?)
    } else if p.eat("<") {
        Notation::Standard(StandardForm::new(p.list(">")?)?)
    } else if p.peek_is("[") {
        let start = p.pos;
        p.eat("[");
        let terms = p.list("]")?;
        match terms.iter().skip(1).position(|t| t.is_zero()) {
            Some(i) => {
                return Err(Error::Parse {
                    offset: start,
                    message: format!("term {} of a continued fraction must be nonzero", i + 2),
                })
            }
            None => Notation::Continued(ContinuedFraction::new(terms)?),
        }
    } else if p.eat("inf") || p.eat("∞") {
        Notation::Fraction(Fraction::infinity())
    } else {
        let num = p.int()?;
        p.skip_ws();
        if p.eat("/") {
            p.skip_ws();
            let at = p.pos;
            let den = p.int()?;
            if num.is_zero() && den.is_zero() {
                return Err(Error::Parse { offset: at, message: "0/0 is not a fraction".into() });
            }
            Notation::Fraction(Fraction::new(num, den)?)
        } else {
            Notation::Fraction(Fraction::integer(num))
        }
    };
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.s[self.pos..]
    }

    fn peek_is(&self, tok: &str) -> bool {
        self.rest().starts_with(tok)
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.peek_is(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn err(&self, message: &str) -> Error {
        Error::Parse { offset: self.pos, message: message.to_string() }
    }

    fn int(&mut self) -> Result<BigInt> {
        let start = self.pos;
        let neg = if self.eat("-") || self.eat("−") {
            true
        } else {
            self.eat("+");
            false
        };
        let digits_start = self.pos;
        while self.rest().starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.err("expected an integer"));
        }
        let v: BigInt = self.s[digits_start..self.pos].parse().expect("ascii digits");
        Ok(if neg { -v } else { v })
    }

    fn list(&mut self, close: &str) -> Result<Vec<BigInt>> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            out.push(self.int()?);
            self.skip_ws();
            if self.eat(",") {
                continue;
            }
            if self.eat(close) {
                return Ok(out);
            }
            return Err(self.err(&format!("expected ',' or '{close}'")));
        }
    }
}

/// The unique odd-length, sign-coherent continued fraction of `f`.
///
/// Runs Euclid's algorithm on `|f|`; an even-length expansion has its last
/// term `an` replaced by `an - 1, 1`. Negative input is negated, expanded and
/// negated back.
pub fn canonical_form(f: &Fraction) -> Result<ContinuedFraction> {
    if f.is_infinite() {
        return domain("[∞] has no canonical form");
    }
    if f.is_negative() {
        let cf = canonical_form(&f.negate())?;
        return Ok(ContinuedFraction { terms: cf.terms.iter().map(|t| -t).collect() });
    }
    let (mut p, mut q) = (f.p.clone(), f.q.clone());
    let mut terms = Vec::new();
    loop {
        let (a, r) = p.div_mod_floor(&q);
        terms.push(a);
        if r.is_zero() {
            break;
        }
        p = q;
        q = r;
    }
    if terms.len() % 2 == 0 {
        let last = terms.pop().expect("nonempty");
        terms.push(last - 1);
        terms.push(BigInt::one());
    }
    Ok(ContinuedFraction { terms })
}

/// Canonical standard form of `f`, i.e. the reversed canonical continued
/// fraction.
pub fn canonical_standard_form(f: &Fraction) -> Result<StandardForm> {
    Ok(canonical_form(f)?.to_standard_form())
}

pub fn tangles_isotopic(a: &Fraction, b: &Fraction) -> bool {
    a == b
}

/// Number of components of `N(p/q)`: two exactly when `p` is even.
pub fn link_components(f: &Fraction) -> Result<u8> {
    if f.is_infinite() {
        return domain("N(∞) is not classified here");
    }
    Ok(if f.p.is_even() { 2 } else { 1 })
}

/// Move the sign onto `q`, check coprimality and reduce `q` into `[0, p)`.
fn link_rep(p: &BigInt, q: &BigInt) -> Result<(BigInt, BigInt)> {
    if !p.gcd(q).is_one() {
        return domain(format!("{p} and {q} are not coprime"));
    }
    let (p, q) = if p.is_negative() { (-p, -q) } else { (p.clone(), q.clone()) };
    if p.is_zero() {
        return domain("N(0/1) is the two-component unlink; p must be nonzero");
    }
    let q = q.mod_floor(&p);
    Ok((p, q))
}

/// Schubert's criterion: same `p`, and `q ≡ q'` or `q q' ≡ 1 (mod p)`.
pub fn links_isotopic(p: &BigInt, q: &BigInt, p2: &BigInt, q2: &BigInt) -> Result<bool> {
    let (p, q) = link_rep(p, q)?;
    let (p2, q2) = link_rep(p2, q2)?;
    if p != p2 {
        return Ok(false);
    }
    Ok(q == q2 || (&q * &q2).mod_floor(&p).is_one() || p.is_one())
}

/// `N(p/q)` is achiral iff `q² ≡ -1 (mod p)`.
pub fn is_achiral(p: &BigInt, q: &BigInt) -> Result<bool> {
    let (p, q) = link_rep(p, q)?;
    Ok((&q * &q + 1u32).mod_floor(&p).is_zero())
}

/// For a two-component `N(p/q)`: strongly invertible iff `q² = 1 + o·p` with
/// `o` odd. The parity of `o` does not depend on the representative of `q`
/// modulo `p`, since `p` is even.
pub fn is_strongly_invertible(p: &BigInt, q: &BigInt) -> Result<bool> {
    let (p, q) = link_rep(p, q)?;
    if p.is_odd() {
        return domain("strong invertibility is only asked of two-component links");
    }
    let diff = &q * &q - 1u32;
    if !diff.mod_floor(&p).is_zero() {
        return Ok(false);
    }
    Ok((diff / &p).is_odd())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkClassification {
    pub components: u8,
    pub achiral: bool,
    pub strongly_invertible: Option<bool>,
}

pub fn classify(f: &Fraction) -> Result<LinkClassification> {
    let components = link_components(f)?;
    let achiral = is_achiral(&f.p, &f.q)?;
    let strongly_invertible = if components == 2 { Some(is_strongly_invertible(&f.p, &f.q)?) } else { None };
    Ok(LinkClassification { components, achiral, strongly_invertible })
}

pub(crate) fn int_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn terms_json(terms: &[BigInt]) -> Value {
    Value::Array(terms.iter().map(int_json).collect())
}

fn join(terms: &[BigInt]) -> String {
    terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}
