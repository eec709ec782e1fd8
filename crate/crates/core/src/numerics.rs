//! Exact arithmetic shared by every other module, including exhaustive
//! integer-box search over polynomial inequality systems.
//!
//! Everything is arbitrary precision. There is no floating point anywhere in
//! this crate.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("divisor must be positive, got {0}")]
    NonPositiveDivisor(Int),
    #[error("polynomial {poly} is not integer-valued at {at}: value {value}")]
    NotIntegral { poly: String, at: Int, value: Rat },
    #[error("invalid box bounds for variable {var}: lo {lo} > hi {hi}")]
    InvalidBounds { var: usize, lo: i64, hi: i64 },
    #[error("constraint system is empty")]
    EmptyConstraints,
    #[error("constraint mentions variable x{var} but the box has only {dims} variables")]
    VariableOutOfRange { var: usize, dims: usize },
    #[error("interpolation nodes must be distinct")]
    RepeatedNode,
}

/// Lifts a machine integer into the exact integer type.
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Exact rational `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

pub fn rat_from_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

/// Binomial coefficient with `C(n, k) = 0` whenever `k < 0`, `k > n` or `n < 0`.
pub fn binomial(n: i64, k: i64) -> Int {
    if n < 0 || k < 0 || k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for i in 0..k {
        acc *= Int::from(n - i);
        acc /= Int::from(i + 1);
    }
    acc
}

/// `⌈d / r⌉` for `r > 0`, exact for negative `d`.
pub fn ceil_div(d: &Int, r: &Int) -> Result<Int, NumericsError> {
    if !r.is_positive() {
        return Err(NumericsError::NonPositiveDivisor(r.clone()));
    }
    Ok(Integer::div_ceil(d, r))
}

/// Number of integer partitions of `r`, via Euler's pentagonal recurrence.
pub fn partition_count(r: u64) -> Int {
    let n = r as usize;
    let mut table: Vec<Int> = Vec::with_capacity(n + 1);
    table.push(Int::one());
    for m in 1..=n {
        let mut acc = Int::zero();
        for j in 1.. {
            let j = j as usize;
            let g1 = j * (3 * j - 1) / 2;
            if g1 > m {
                break;
            }
            let positive = j % 2 == 1;
            let mut term = table[m - g1].clone();
            let g2 = j * (3 * j + 1) / 2;
            if g2 <= m {
                term += &table[m - g2];
            }
            if positive {
                acc += term;
            } else {
                acc -= term;
            }
        }
        table.push(acc);
    }
    table.swap_remove(n)
}

/// A polynomial `Z -> Z` stored with rational coefficients, lowest degree
/// first. Integrality is checked at every evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<serde_int::RatRepr>", into = "Vec<serde_int::RatRepr>")]
pub struct IntPoly {
    coeffs: Vec<Rat>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn new(coeffs: Vec<Rat>) -> Self {
        let mut p = IntPoly { coeffs };
        while p.coeffs.last().is_some_and(|c| c.is_zero()) {
            p.coeffs.pop();
        }
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rat::from_integer(int(c))).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Index of the last nonzero coefficient; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval_rational(&self, k: &Int) -> Rat {
        let k = rat_from_int(k);
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * &k + c)
    }

    pub fn eval(&self, k: &Int) -> Result<Int, NumericsError> {
        let value = self.eval_rational(k);
        if value.is_integer() {
            Ok(value.to_integer())
        } else {
            Err(NumericsError::NotIntegral { poly: self.to_string(), at: k.clone(), value })
        }
    }

    pub fn eval_i64(&self, k: i64) -> Result<Int, NumericsError> {
        self.eval(&int(k))
    }

    /// The polynomial `k ↦ p(k + shift)`.
    pub fn shifted(&self, shift: &Int) -> IntPoly {
        let mut out = vec![Rat::zero(); self.coeffs.len()];
        let s = rat_from_int(shift);
        for (i, c) in self.coeffs.iter().enumerate() {
            // c (k + s)^i = c Σ_j C(i, j) k^j s^(i-j)
            let mut s_pow = Rat::one();
            for j in (0..=i).rev() {
                out[j] += c * Rat::from_integer(binomial(i as i64, j as i64)) * &s_pow;
                s_pow *= &s;
            }
        }
        IntPoly::new(out)
    }

    /// The discrete derivative `k ↦ p(k) - p(k - 1)`.
    pub fn discrete_derivative(&self) -> IntPoly {
        let back = self.shifted(&int(-1));
        let len = self.coeffs.len();
        IntPoly::new(
            (0..len).map(|i| &self.coeffs[i] - back.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)).collect(),
        )
    }

    /// Unique polynomial of degree `< points.len()` through the given points.
    pub fn interpolate(points: &[(Int, Int)]) -> Result<IntPoly, NumericsError> {
        let mut result = vec![Rat::zero(); points.len()];
        for (i, (xi, yi)) in points.iter().enumerate() {
            // Lagrange basis polynomial for node i, built by repeated multiplication.
            let mut basis = vec![Rat::one()];
            let mut denom = Rat::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                if xi == xj {
                    return Err(NumericsError::RepeatedNode);
                }
                let xj = rat_from_int(xj);
                let mut next = vec![Rat::zero(); basis.len() + 1];
                for (d, c) in basis.iter().enumerate() {
                    next[d + 1] += c;
                    next[d] -= c * &xj;
                }
                basis = next;
                denom *= rat_from_int(xi) - xj;
            }
            let scale = rat_from_int(yi) / denom;
            for (d, c) in basis.iter().enumerate() {
                result[d] += c * &scale;
            }
        }
        Ok(IntPoly::new(result))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let abs = c.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = i == 0 || !abs.is_one();
            if show_coeff {
                write!(f, "{abs}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "k")?,
                _ => write!(f, "k^{i}")?,
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<serde_int::RatRepr>> for IntPoly {
    type Error = String;

    fn try_from(v: Vec<serde_int::RatRepr>) -> Result<Self, Self::Error> {
        Ok(IntPoly::new(v.into_iter().map(|r| r.0).collect()))
    }
}

impl From<IntPoly> for Vec<serde_int::RatRepr> {
    fn from(p: IntPoly) -> Self {
        p.coeffs.into_iter().map(serde_int::RatRepr).collect()
    }
}

/// Sparse multivariate polynomial with integer coefficients. Monomials are
/// exponent vectors with trailing zeros stripped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Vec<u32>, Int>,
}

fn normalize_exponents(mut e: Vec<u32>) -> Vec<u32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Int>) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c.into());
        p
    }

    /// The variable `x_index`.
    pub fn var(index: usize) -> Self {
        let mut e = vec![0; index + 1];
        e[index] = 1;
        let mut p = Self::zero();
        p.add_term(e, Int::one());
        p
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Int) {
        let exps = normalize_exponents(exps);
        let entry = self.terms.entry(exps.clone()).or_insert_with(Int::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Int)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// One more than the largest variable index used.
    pub fn arity(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn coefficient(&self, exps: &[u32]) -> Int {
        self.terms.get(&normalize_exponents(exps.to_vec())).cloned().unwrap_or_else(Int::zero)
    }

    pub fn eval(&self, point: &[Int]) -> Int {
        let mut acc = Int::zero();
        for (exps, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term *= num::pow::pow(point[v].clone(), e as usize);
                }
            }
            acc += term;
        }
        acc
    }

    pub fn eval_i64(&self, point: &[i64]) -> Int {
        let p: Vec<Int> = point.iter().map(|&v| int(v)).collect();
        self.eval(&p)
    }

    /// Replaces `x_var` by `replacement` everywhere.
    pub fn substitute(&self, var: usize, replacement: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (exps, c) in &self.terms {
            let power = exps.get(var).copied().unwrap_or(0);
            let mut rest = exps.clone();
            if var < rest.len() {
                rest[var] = 0;
            }
            let mut mono = MultiPoly::zero();
            mono.add_term(rest, c.clone());
            for _ in 0..power {
                mono = &mono * replacement;
            }
            out = &out + &mono;
        }
        out
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        // Highest total degree first, then lexicographic, for a stable rendering.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (i, (exps, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    let name = names.get(v).map(|s| s.to_string()).unwrap_or(format!("x{v}"));
                    if e == 1 {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    out.push_str(&abs.to_string());
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&[]))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    // Monomials multiply by adding exponent vectors.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let len = ea.len().max(eb.len());
                let e: Vec<u32> =
                    (0..len).map(|i| ea.get(i).copied().unwrap_or(0) + eb.get(i).copied().unwrap_or(0)).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        &MultiPoly::zero() - self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl From<i64> for MultiPoly {
    fn from(c: i64) -> Self {
        MultiPoly::constant(c)
    }
}

/// Comparison of a polynomial against zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
}

impl Relation {
    fn holds(self, v: &Int) -> bool {
        match self {
            Relation::Gt => v.is_positive(),
            Relation::Ge => !v.is_negative(),
            Relation::Lt => v.is_negative(),
            Relation::Le => !v.is_positive(),
            Relation::Eq => v.is_zero(),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
        }
    }
}

/// `poly REL 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub poly: MultiPoly,
    pub relation: Relation,
}

impl Constraint {
    pub fn new(lhs: MultiPoly, relation: Relation, rhs: MultiPoly) -> Self {
        Constraint { poly: lhs - rhs, relation }
    }

    pub fn gt(lhs: MultiPoly, rhs: MultiPoly) -> Self {
        Self::new(lhs, Relation::Gt, rhs)
    }

    pub fn ge(lhs: MultiPoly, rhs: MultiPoly) -> Self {
        Self::new(lhs, Relation::Ge, rhs)
    }

    pub fn lt(lhs: MultiPoly, rhs: MultiPoly) -> Self {
        Self::new(lhs, Relation::Lt, rhs)
    }

    pub fn le(lhs: MultiPoly, rhs: MultiPoly) -> Self {
        Self::new(lhs, Relation::Le, rhs)
    }

    pub fn is_satisfied(&self, point: &[Int]) -> bool {
        self.relation.holds(&self.poly.eval(point))
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        format!("{} {} 0", self.poly.display_with(names), self.relation.symbol())
    }
}

/// Inclusive integer bounds, one pair per variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntBox {
    bounds: Vec<(i64, i64)>,
}

impl IntBox {
    pub fn new(bounds: Vec<(i64, i64)>) -> Result<Self, NumericsError> {
        for (var, &(lo, hi)) in bounds.iter().enumerate() {
            if lo > hi {
                return Err(NumericsError::InvalidBounds { var, lo, hi });
            }
        }
        Ok(IntBox { bounds })
    }

    pub fn bounds(&self) -> &[(i64, i64)] {
        &self.bounds
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }

    pub fn point_count(&self) -> u128 {
        self.bounds.iter().map(|&(lo, hi)| (hi as i128 - lo as i128 + 1) as u128).product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum SearchOutcome {
    /// No point of the box satisfies every constraint.
    Empty { points_checked: u128 },
    /// Lexicographically smallest satisfying point.
    Witness { point: Vec<i64> },
}

impl SearchOutcome {
    pub fn is_empty(&self) -> bool {
        matches!(self, SearchOutcome::Empty { .. })
    }
}

/// Exhaustively searches `bx` for an integer point satisfying every
/// constraint. The first coordinate is split across threads; the returned
/// witness is always the lexicographically smallest one.
pub fn box_search_empty(constraints: &[Constraint], bx: &IntBox) -> Result<SearchOutcome, NumericsError> {
    if constraints.is_empty() {
        return Err(NumericsError::EmptyConstraints);
    }
    let dims = bx.dims();
    for c in constraints {
        let arity = c.poly.arity();
        if arity > dims {
            return Err(NumericsError::VariableOutOfRange { var: arity - 1, dims });
        }
    }
    if dims == 0 {
        let satisfied = constraints.iter().all(|c| c.is_satisfied(&[]));
        return Ok(if satisfied {
            SearchOutcome::Witness { point: Vec::new() }
        } else {
            SearchOutcome::Empty { points_checked: 1 }
        });
    }

    let (lo0, hi0) = bx.bounds[0];
    let rest = &bx.bounds[1..];
    let witness = (lo0..=hi0).into_par_iter().find_map_first(|x0| {
        let mut current: Vec<i64> = std::iter::once(x0).chain(rest.iter().map(|b| b.0)).collect();
        loop {
            let point: Vec<Int> = current.iter().map(|&v| int(v)).collect();
            if constraints.iter().all(|c| c.is_satisfied(&point)) {
                return Some(current);
            }
            // Odometer step over the trailing coordinates.
            let mut idx = dims - 1;
            loop {
                if idx == 0 {
                    return None;
                }
                let (lo, hi) = bx.bounds[idx];
                if current[idx] < hi {
                    current[idx] += 1;
                    break;
                }
                current[idx] = lo;
                idx -= 1;
            }
        }
    });
    Ok(match witness {
        Some(point) => SearchOutcome::Witness { point },
        None => SearchOutcome::Empty { points_checked: bx.point_count() },
    })
}

/// Serde helpers that write exact integers as JSON numbers when they fit in
/// an `i64` and as decimal strings otherwise. Rationals with a denominator
/// are written as `"p/q"`.
pub mod serde_int {
    use super::{Int, Rat};
    use num::{One, ToPrimitive};
    use serde::de::{self, Visitor};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &Int, s: S) -> Result<S::Ok, S::Error> {
        match v.to_i64() {
            Some(x) => s.serialize_i64(x),
            None => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        d.deserialize_any(IntVisitor)
    }

    struct IntVisitor;

    impl Visitor<'_> for IntVisitor {
        type Value = Int;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an integer or a decimal integer string")
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
            Ok(Int::from(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
            Ok(Int::from(v))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
            v.trim().parse::<Int>().map_err(|_| E::custom(format!("not an integer: {v:?}")))
        }
    }

    /// Newtype carrying the integer serialization, for use inside
    /// containers.
    #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
    pub struct IntRepr(pub Int);

    impl Serialize for IntRepr {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize(&self.0, s)
        }
    }

    impl<'de> Deserialize<'de> for IntRepr {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            deserialize(d).map(IntRepr)
        }
    }

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct RatRepr(pub Rat);

    pub fn parse_rat(v: &str) -> Option<Rat> {
        let v = v.trim();
        match v.split_once('/') {
            Some((n, d)) => {
                let n: Int = n.trim().parse().ok()?;
                let d: Int = d.trim().parse().ok()?;
                if d == Int::from(0) {
                    None
                } else {
                    Some(Rat::new(n, d))
                }
            }
            None => v.parse::<Int>().ok().map(Rat::from_integer),
        }
    }

    pub fn serialize_rat<S: Serializer>(v: &Rat, s: S) -> Result<S::Ok, S::Error> {
        if v.denom().is_one() {
            serialize(v.numer(), s)
        } else {
            s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
        }
    }

    pub fn deserialize_rat<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        d.deserialize_any(RatVisitor)
    }

    struct RatVisitor;

    impl Visitor<'_> for RatVisitor {
        type Value = Rat;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an integer or a string \"p/q\"")
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
            Ok(Rat::from_integer(Int::from(v)))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
            Ok(Rat::from_integer(Int::from(v)))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
            parse_rat(v).ok_or_else(|| E::custom(format!("not a rational: {v:?}")))
        }
    }

    impl Serialize for RatRepr {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize_rat(&self.0, s)
        }
    }

    impl<'de> Deserialize<'de> for RatRepr {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            deserialize_rat(d).map(RatRepr)
        }
    }

    pub mod rational {
        pub use super::deserialize_rat as deserialize;
        pub use super::serialize_rat as serialize;
    }

    /// `Option<Int>` as an integer or `null`.
    pub mod option {
        use super::{Int, IntRepr};
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<Int>, s: S) -> Result<S::Ok, S::Error> {
            v.clone().map(IntRepr).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Int>, D::Error> {
            Ok(Option::<IntRepr>::deserialize(d)?.map(|r| r.0))
        }
    }
}

/// Converts to `i64` when the value fits; used for loop bounds and display.
pub fn to_i64(v: &Int) -> Option<i64> {
    v.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_partitions(n: u64, max_part: u64) -> u64 {
        if n == 0 {
            return 1;
        }
        (1..=max_part.min(n)).map(|p| brute_partitions(n - p, p)).sum()
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 3), int(4));
        assert_eq!(binomial(7, 7), int(1));
        // (n+1+m choose n) for n=2, m=3 by factorials: 6!/(2! 4!) = 15
        assert_eq!(binomial(2 + 1 + 3, 2), int(15));
        assert_eq!(binomial(3, -1), int(0));
        assert_eq!(binomial(3, 4), int(0));
        assert_eq!(binomial(-2, 1), int(0));
    }

    #[test]
    fn pascal_rule() {
        for n in 1..=64 {
            for k in 1..=n {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }

    #[test]
    fn ceil_div_examples() {
        assert_eq!(ceil_div(&int(3), &int(2)).unwrap(), int(2));
        assert_eq!(ceil_div(&int(-3), &int(2)).unwrap(), int(-1));
        assert_eq!(ceil_div(&int(7), &int(3)).unwrap(), int(3));
        assert!(matches!(ceil_div(&int(1), &int(0)), Err(NumericsError::NonPositiveDivisor(_))));
        assert!(ceil_div(&int(1), &int(-2)).is_err());
    }

    #[test]
    fn ceil_div_is_unique_bracketing_quotient() {
        for r in 1..=12i64 {
            for d in -60..=60i64 {
                let q = ceil_div(&int(d), &int(r)).unwrap().to_i64().unwrap();
                assert!(r * (q - 1) < d && d <= r * q, "d={d} r={r} q={q}");
            }
        }
    }

    #[test]
    fn partition_examples_and_brute_force() {
        assert_eq!(partition_count(0), int(1));
        assert_eq!(partition_count(2), int(2));
        assert_eq!(partition_count(5), int(7));
        for r in 0..=30 {
            assert_eq!(partition_count(r), int(brute_partitions(r, r) as i64), "r={r}");
        }
    }

    #[test]
    fn poly_eval_examples() {
        let p = IntPoly::from_ints(&[0, 7, 1]);
        assert_eq!(p.eval_i64(1).unwrap(), int(8));
        assert_eq!(IntPoly::zero().eval_i64(-17).unwrap(), int(0));
        assert_eq!(IntPoly::from_ints(&[0, 7, 3]).eval_i64(1).unwrap(), int(10));
        assert_eq!(IntPoly::zero().degree(), -1);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn poly_eval_rejects_non_integral() {
        // k/2 is not integer-valued at odd k
        let half = IntPoly::new(vec![Rat::zero(), rat(1, 2)]);
        assert_eq!(half.eval_i64(4).unwrap(), int(2));
        assert!(matches!(half.eval_i64(3), Err(NumericsError::NotIntegral { .. })));
        // k(k+1)/2 is integer-valued everywhere
        let tri = IntPoly::new(vec![Rat::zero(), rat(1, 2), rat(1, 2)]);
        for k in -20..=20 {
            assert!(tri.eval_i64(k).is_ok());
        }
    }

    #[test]
    fn discrete_derivative_examples() {
        assert_eq!(IntPoly::from_ints(&[0, 0, 1]).discrete_derivative(), IntPoly::from_ints(&[-1, 2]));
        assert!(IntPoly::from_ints(&[5]).discrete_derivative().is_zero());
        assert_eq!(IntPoly::from_ints(&[0, 7, 1]).discrete_derivative(), IntPoly::from_ints(&[6, 2]));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = IntPoly::from_ints(&[-2, 7, 3]);
        let pts: Vec<_> = [0, 1, 2].iter().map(|&k| (int(k), p.eval_i64(k).unwrap())).collect();
        assert_eq!(IntPoly::interpolate(&pts).unwrap(), p);
        assert!(IntPoly::interpolate(&[(int(1), int(1)), (int(1), int(2))]).is_err());
    }

    #[test]
    fn poly_display() {
        assert_eq!(IntPoly::from_ints(&[0, 7, 3]).to_string(), "3k^2 + 7k");
        assert_eq!(IntPoly::from_ints(&[-1, 2]).to_string(), "2k - 1");
        assert_eq!(IntPoly::zero().to_string(), "0");
    }

    #[test]
    fn box_search_trivial_contradiction() {
        let x = MultiPoly::var(0);
        let cs = [Constraint::gt(x.clone(), 0.into()), Constraint::lt(x, 0.into())];
        let bx = IntBox::new(vec![(-5, 5)]).unwrap();
        assert_eq!(box_search_empty(&cs, &bx).unwrap(), SearchOutcome::Empty { points_checked: 11 });
    }

    #[test]
    fn box_search_witness_is_lexicographically_smallest() {
        let x = MultiPoly::var(0);
        let y = MultiPoly::var(1);
        // x + y >= 3 with x, y in [-2, 4]
        let cs = [Constraint::ge(&x + &y, 3.into())];
        let bx = IntBox::new(vec![(-2, 4), (-2, 4)]).unwrap();
        let out = box_search_empty(&cs, &bx).unwrap();
        assert_eq!(out, SearchOutcome::Witness { point: vec![-1, 4] });
        if let SearchOutcome::Witness { point } = out {
            let p: Vec<Int> = point.iter().map(|&v| int(v)).collect();
            assert!(cs.iter().all(|c| c.is_satisfied(&p)));
        }
    }

    #[test]
    fn box_search_errors() {
        let bx = IntBox::new(vec![(0, 1)]).unwrap();
        assert_eq!(box_search_empty(&[], &bx), Err(NumericsError::EmptyConstraints));
        let cs = [Constraint::gt(MultiPoly::var(3), 0.into())];
        assert!(matches!(box_search_empty(&cs, &bx), Err(NumericsError::VariableOutOfRange { .. })));
        assert!(IntBox::new(vec![(2, 1)]).is_err());
    }

    #[test]
    fn multipoly_substitute_and_display() {
        let x = MultiPoly::var(0);
        let y = MultiPoly::var(1);
        let p = &(&x * &y) + &MultiPoly::constant(2);
        // x -> y + 1
        let q = p.substitute(0, &(&y + &MultiPoly::constant(1)));
        assert_eq!(q, &(&(&y * &y) + &y) + &MultiPoly::constant(2));
        assert_eq!(p.display_with(&["a", "b"]), "a*b + 2");
    }

    #[test]
    fn serde_int_roundtrip() {
        #[derive(Serialize, Deserialize, PartialEq, Debug)]
        struct W {
            #[serde(with = "serde_int")]
            v: Int,
            #[serde(with = "serde_int::rational")]
            q: Rat,
        }
        let big: Int = "123456789012345678901234567890".parse().unwrap();
        let w = W { v: big, q: rat(-3, 2) };
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"v":"123456789012345678901234567890","q":"-3/2"}"#);
        assert_eq!(serde_json::from_str::<W>(&s).unwrap(), w);
        let small: W = serde_json::from_str(r#"{"v": -4, "q": 7}"#).unwrap();
        assert_eq!(small, W { v: int(-4), q: rat(7, 1) });
    }
}
