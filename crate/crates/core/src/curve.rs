//! K-theory classes on a smooth projective curve of genus `g` and their
//! Riemann–Roch Euler pairing.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{int, serde_int, Int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("slope undefined for rank-0 class {0}")]
    SlopeUndefined(CurveClass),
    #[error("{0} is not the class of a sheaf")]
    NotSheafClass(CurveClass),
    #[error("rank must be positive, got class {0}")]
    NonPositiveRank(CurveClass),
    #[error("class {0} was not declared semistable")]
    NotSemistable(CurveClass),
    #[error("no semistable sheaf of class {0} exists on P^1 (rank must divide degree)")]
    NoSemistableOnP1(CurveClass),
    #[error("the context has no polarisation degree D")]
    MissingPolarisation,
    #[error("polarisation degree must be positive, got {0}")]
    InvalidPolarisation(i64),
}

/// Genus of the curve plus, optionally, the degree `D` of a very ample
/// line bundle `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveCtx {
    pub genus: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarisation_degree: Option<i64>,
}

impl CurveCtx {
    pub fn new(genus: u32) -> Self {
        CurveCtx { genus, polarisation_degree: None }
    }

    pub fn with_polarisation(genus: u32, degree: i64) -> Result<Self, CurveError> {
        if degree < 1 {
            return Err(CurveError::InvalidPolarisation(degree));
        }
        Ok(CurveCtx { genus, polarisation_degree: Some(degree) })
    }

    pub fn elliptic() -> Self {
        Self::new(1)
    }

    pub fn g(&self) -> Int {
        Int::from(self.genus)
    }

    /// `2g - 2`, the degree of the canonical bundle.
    pub fn canonical_degree(&self) -> Int {
        int(2) * self.g() - int(2)
    }

    pub fn omega(&self) -> CurveClass {
        CurveClass::new(Int::one(), self.canonical_degree())
    }

    pub fn polarisation(&self) -> Result<CurveClass, CurveError> {
        let d = self.polarisation_degree.ok_or(CurveError::MissingPolarisation)?;
        Ok(CurveClass::from_i64(1, d))
    }

    pub fn validate(&self) -> Result<(), CurveError> {
        match self.polarisation_degree {
            Some(d) if d < 1 => Err(CurveError::InvalidPolarisation(d)),
            _ => Ok(()),
        }
    }
}

/// A class `(rank, degree)` in the numerical K-group of the curve.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveClass {
    #[serde(with = "serde_int")]
    pub rank: Int,
    #[serde(with = "serde_int")]
    pub degree: Int,
}

impl CurveClass {
    pub fn new(rank: Int, degree: Int) -> Self {
        CurveClass { rank, degree }
    }

    pub fn from_i64(rank: i64, degree: i64) -> Self {
        CurveClass::new(int(rank), int(degree))
    }

    pub fn zero() -> Self {
        CurveClass::from_i64(0, 0)
    }

    pub fn structure_sheaf() -> Self {
        CurveClass::from_i64(1, 0)
    }

    pub fn point() -> Self {
        CurveClass::from_i64(0, 1)
    }

    /// Class of a line bundle of the given degree.
    pub fn line_bundle(degree: Int) -> Self {
        CurveClass::new(Int::one(), degree)
    }

    pub fn is_zero(&self) -> bool {
        self.rank.is_zero() && self.degree.is_zero()
    }

    pub fn is_torsion(&self) -> bool {
        self.rank.is_zero()
    }

    /// Rank nonnegative, and a rank-0 class has nonnegative degree.
    pub fn is_sheaf_class(&self) -> bool {
        !self.rank.is_negative() && !(self.rank.is_zero() && self.degree.is_negative())
    }

    /// The class of the shift by `[n]`: negated when `n` is odd.
    pub fn shifted(&self, n: i64) -> CurveClass {
        if n.rem_euclid(2) == 1 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn scaled(&self, k: &Int) -> CurveClass {
        CurveClass::new(&self.rank * k, &self.degree * k)
    }

    pub fn slope(&self) -> Result<Rat, CurveError> {
        if self.rank.is_zero() {
            return Err(CurveError::SlopeUndefined(self.clone()));
        }
        Ok(Rat::new(self.degree.clone(), self.rank.clone()))
    }

    /// Slope with torsion sent to `+∞`.
    pub fn extended_slope(&self) -> Slope {
        match self.slope() {
            Ok(s) => Slope::Finite(s),
            Err(_) => Slope::Infinite,
        }
    }

    /// `gcd(rank, degree) = 1`; a semistable class with this property is
    /// automatically stable.
    pub fn is_primitive(&self) -> bool {
        self.rank.gcd(&self.degree).is_one()
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.rank, self.degree)
    }
}

impl Add for &CurveClass {
    type Output = CurveClass;
    fn add(self, rhs: &CurveClass) -> CurveClass {
        CurveClass::new(&self.rank + &rhs.rank, &self.degree + &rhs.degree)
    }
}

impl Sub for &CurveClass {
    type Output = CurveClass;
    fn sub(self, rhs: &CurveClass) -> CurveClass {
        CurveClass::new(&self.rank - &rhs.rank, &self.degree - &rhs.degree)
    }
}

impl Neg for &CurveClass {
    type Output = CurveClass;
    fn neg(self) -> CurveClass {
        CurveClass::new(-&self.rank, -&self.degree)
    }
}

impl Add for CurveClass {
    type Output = CurveClass;
    fn add(self, rhs: CurveClass) -> CurveClass {
        &self + &rhs
    }
}

impl Sub for CurveClass {
    type Output = CurveClass;
    fn sub(self, rhs: CurveClass) -> CurveClass {
        &self - &rhs
    }
}

impl Neg for CurveClass {
    type Output = CurveClass;
    fn neg(self) -> CurveClass {
        -&self
    }
}

/// Slope extended by `+∞` for torsion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slope {
    Finite(Rat),
    Infinite,
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Slope::Finite(a), Slope::Finite(b)) => a.cmp(b),
            (Slope::Finite(_), Slope::Infinite) => Ordering::Less,
            (Slope::Infinite, Slope::Finite(_)) => Ordering::Greater,
            (Slope::Infinite, Slope::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(s) => write!(f, "{s}"),
            Slope::Infinite => write!(f, "inf"),
        }
    }
}

/// `χ(a, b) = rk(a)·deg(b) − rk(b)·deg(a) + rk(a)·rk(b)·(1 − g)`.
pub fn euler_pairing(ctx: &CurveCtx, a: &CurveClass, b: &CurveClass) -> Int {
    &a.rank * &b.degree - &b.rank * &a.degree + &a.rank * &b.rank * (Int::one() - ctx.g())
}

/// Tensor with a line bundle of degree `line_degree`.
pub fn twist(c: &CurveClass, line_degree: &Int) -> CurveClass {
    CurveClass::new(c.rank.clone(), &c.degree + &c.rank * line_degree)
}

/// Dimensions `(hom⁰, hom¹)` of a pair of objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomDims {
    #[serde(with = "serde_int")]
    pub hom0: Int,
    #[serde(with = "serde_int")]
    pub hom1: Int,
}

impl HomDims {
    pub fn new(hom0: Int, hom1: Int) -> Self {
        HomDims { hom0, hom1 }
    }

    pub fn from_i64(hom0: i64, hom1: i64) -> Self {
        HomDims::new(int(hom0), int(hom1))
    }

    pub fn chi(&self) -> Int {
        &self.hom0 - &self.hom1
    }

    pub fn zero() -> Self {
        HomDims::from_i64(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.hom0.is_zero() && self.hom1.is_zero()
    }
}

/// Given `(hom⁰, hom¹)` of `(a, b)`, returns `(hom⁰, hom¹)` of
/// `(b, a ⊗ ω)`. The context is unused beyond fixing the curve; duality on
/// a curve just exchanges the two degrees.
pub fn serre_dual_dims(_ctx: &CurveCtx, _a: &CurveClass, _b: &CurveClass, dims: &HomDims) -> HomDims {
    HomDims::new(dims.hom1.clone(), dims.hom0.clone())
}

/// How much is known about a class fed to [`hom_dims_semistable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Unstable,
    Semistable,
    Stable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclaredClass {
    pub class: CurveClass,
    pub stability: Stability,
}

impl DeclaredClass {
    pub fn semistable(class: CurveClass) -> Self {
        DeclaredClass { class, stability: Stability::Semistable }
    }

    pub fn stable(class: CurveClass) -> Self {
        DeclaredClass { class, stability: Stability::Stable }
    }

    /// Stable when primitive (or a torsion class, which never needs it),
    /// semistable otherwise.
    pub fn inferred(class: CurveClass) -> Self {
        let stability =
            if !class.is_torsion() && class.is_primitive() { Stability::Stable } else { Stability::Semistable };
        DeclaredClass { class, stability }
    }
}

/// Outcome of a hom-dimension computation that may not be decided by
/// Riemann–Roch and slope vanishing alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum HomOutcome {
    Determined(HomDims),
    Indeterminate {
        #[serde(with = "serde_int")]
        chi: Int,
        reason: String,
    },
}

impl HomOutcome {
    pub fn determined(&self) -> Option<&HomDims> {
        match self {
            HomOutcome::Determined(d) => Some(d),
            HomOutcome::Indeterminate { .. } => None,
        }
    }

    pub fn chi(&self) -> Int {
        match self {
            HomOutcome::Determined(d) => d.chi(),
            HomOutcome::Indeterminate { chi, .. } => chi.clone(),
        }
    }
}

/// `(hom⁰, hom¹)(a, b)` for semistable sheaves, when forced by slopes.
///
/// `assume_vanishing` lets the caller assert `hom¹ = 0` when `μ(a) < μ(b)`
/// but the slope gap is at most `2g − 2`. It is ignored when `χ < 0`, since
/// then `hom¹ ≥ −χ > 0`.
pub fn hom_dims_semistable(
    ctx: &CurveCtx,
    a: &DeclaredClass,
    b: &DeclaredClass,
    assume_vanishing: bool,
) -> Result<HomOutcome, CurveError> {
    for x in [a, b] {
        if !x.class.is_sheaf_class() {
            return Err(CurveError::NotSheafClass(x.class.clone()));
        }
        if x.stability == Stability::Unstable {
            return Err(CurveError::NotSemistable(x.class.clone()));
        }
        // Bundles on P^1 split into line bundles.
        if ctx.genus == 0
            && !x.class.is_torsion()
            && !x.class.is_zero()
            && !x.class.degree.is_multiple_of(&x.class.rank)
        {
            return Err(CurveError::NoSemistableOnP1(x.class.clone()));
        }
    }
    let chi = euler_pairing(ctx, &a.class, &b.class);
    let neg_chi = -chi.clone();
    let indeterminate = |reason: &str| HomOutcome::Indeterminate { chi: chi.clone(), reason: reason.to_string() };

    if a.class.is_zero() || b.class.is_zero() {
        return Ok(HomOutcome::Determined(HomDims::zero()));
    }

    match (a.class.is_torsion(), b.class.is_torsion()) {
        (true, true) => {
            return Ok(indeterminate("both classes are torsion; hom depends on the supports"));
        }
        // Nothing maps from torsion into a bundle.
        (true, false) => return Ok(HomOutcome::Determined(HomDims::new(Int::zero(), neg_chi))),
        // A bundle has no higher Ext into torsion.
        (false, true) => return Ok(HomOutcome::Determined(HomDims::new(chi, Int::zero()))),
        (false, false) => {}
    }

    let mu_a = a.class.slope()?;
    let mu_b = b.class.slope()?;
    match mu_a.cmp(&mu_b) {
        Ordering::Greater => Ok(HomOutcome::Determined(HomDims::new(Int::zero(), neg_chi))),
        Ordering::Less | Ordering::Equal => {
            // hom¹(a, b) = hom⁰(b, a ⊗ ω)^∨, zero once μ(b) > μ(a) + 2g − 2.
            let gap_forces = &mu_b - &mu_a > Rat::from_integer(ctx.canonical_degree());
            let asserted = mu_a < mu_b && assume_vanishing && !chi.is_negative();
            if gap_forces || asserted {
                return Ok(HomOutcome::Determined(HomDims::new(chi, Int::zero())));
            }
            if mu_a == mu_b {
                if a.class == b.class && a.stability == Stability::Stable && b.stability == Stability::Stable {
                    // Assumes a ≅ b: a stable object is simple.
                    return Ok(HomOutcome::Determined(HomDims::new(Int::one(), Int::one() - chi)));
                }
                return Ok(indeterminate("equal slopes"));
            }
            Ok(indeterminate("slope gap too small for Serre-duality vanishing"))
        }
    }
}

/// True iff `μ(quotient) < μ(parent) − 1/r²` with `r = rk(parent)`.
pub fn destabilizes(parent: &CurveClass, quotient: &CurveClass) -> Result<bool, CurveError> {
    for c in [parent, quotient] {
        if !c.rank.is_positive() {
            return Err(CurveError::NonPositiveRank(c.clone()));
        }
    }
    let gap = Rat::new(Int::one(), &parent.rank * &parent.rank);
    Ok(quotient.slope()? < parent.slope()? - gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;

    fn c(r: i64, d: i64) -> CurveClass {
        CurveClass::from_i64(r, d)
    }

    /// Riemann–Roch written out independently of `euler_pairing`:
    /// χ(a, b) = deg(a^∨ ⊗ b) + rk(a^∨ ⊗ b)(1 − g).
    fn rr_oracle(g: i64, a: (i64, i64), b: (i64, i64)) -> i64 {
        let rank = a.0 * b.0;
        let degree = a.0 * b.1 - b.0 * a.1;
        degree + rank * (1 - g)
    }

    #[test]
    fn pairing_examples() {
        let g1 = CurveCtx::new(1);
        for r in 1..=6 {
            assert_eq!(euler_pairing(&g1, &c(1, -3), &c(0, r)), int(r));
        }
        for g in 0..5 {
            assert_eq!(euler_pairing(&CurveCtx::new(g), &c(1, 0), &c(1, 0)), int(1 - g as i64));
        }
        assert_eq!(euler_pairing(&CurveCtx::new(2), &c(2, -3), &c(1, -23)), int(-45));
    }

    #[test]
    fn pairing_matches_tensor_oracle() {
        for g in 0..4 {
            for a in [(1, 0), (2, -3), (0, 4), (3, 7)] {
                for b in [(1, 5), (0, 1), (4, -9), (2, 2)] {
                    assert_eq!(
                        euler_pairing(&CurveCtx::new(g as u32), &c(a.0, a.1), &c(b.0, b.1)),
                        int(rr_oracle(g, a, b))
                    );
                }
            }
        }
    }

    #[test]
    fn slope_examples() {
        assert_eq!(c(2, -1).slope().unwrap(), rat(-1, 2));
        // F class for r=2, d=1, g=2
        assert_eq!(c(4, 2).slope().unwrap(), rat(1, 2));
        assert_eq!(c(1, 5).slope().unwrap(), rat(5, 1));
        assert!(matches!(c(0, 3).slope(), Err(CurveError::SlopeUndefined(_))));
        assert!(c(0, 1).extended_slope() > c(100, 99).extended_slope());
    }

    #[test]
    fn twist_examples() {
        assert_eq!(twist(&c(2, 7), &int(5)), c(2, 17));
        assert_eq!(twist(&c(0, 4), &int(-11)), c(0, 4));
        let ctx = CurveCtx::with_polarisation(2, 5).unwrap();
        // χ(E(1)) = rD + d − r(g − 1)
        let e = c(2, 15);
        assert_eq!(euler_pairing(&ctx, &c(1, 0), &twist(&e, &int(5))), int(23));
    }

    #[test]
    fn serre_duality_examples() {
        let g1 = CurveCtx::new(1);
        assert_eq!(serre_dual_dims(&g1, &c(1, 0), &c(1, 3), &HomDims::from_i64(3, 0)), HomDims::from_i64(0, 3));
        let g2 = CurveCtx::new(2);
        // hom(O, O) = (1, g); dual pair is hom(O, ω) = (g, 1)
        assert_eq!(serre_dual_dims(&g2, &c(1, 0), &c(1, 0), &HomDims::from_i64(1, 2)), HomDims::from_i64(2, 1));
        assert_eq!(euler_pairing(&g2, &c(1, 0), &g2.omega()), int(1));
        assert_eq!(serre_dual_dims(&g2, &c(1, 0), &c(0, 3), &HomDims::from_i64(3, 0)), HomDims::from_i64(0, 3));
    }

    #[test]
    fn hom_dims_examples() {
        let g1 = CurveCtx::new(1);
        for r in 1..=4 {
            // e = (r, 0), A line bundle of negative degree
            let out =
                hom_dims_semistable(&g1, &DeclaredClass::semistable(c(r, 0)), &DeclaredClass::stable(c(1, -4)), false)
                    .unwrap();
            assert_eq!(out, HomOutcome::Determined(HomDims::from_i64(0, 4 * r)));
        }
        let out = hom_dims_semistable(&g1, &DeclaredClass::stable(c(1, 0)), &DeclaredClass::semistable(c(0, 1)), false)
            .unwrap();
        assert_eq!(out, HomOutcome::Determined(HomDims::from_i64(1, 0)));
        let g2 = CurveCtx::new(2);
        let out =
            hom_dims_semistable(&g2, &DeclaredClass::semistable(c(2, -3)), &DeclaredClass::stable(c(1, -23)), false)
                .unwrap();
        assert_eq!(out, HomOutcome::Determined(HomDims::from_i64(0, 45)));
    }

    #[test]
    fn hom_dims_indeterminate_cases() {
        let g2 = CurveCtx::new(2);
        let small_gap =
            hom_dims_semistable(&g2, &DeclaredClass::stable(c(1, 0)), &DeclaredClass::stable(c(1, 1)), false).unwrap();
        assert!(matches!(small_gap, HomOutcome::Indeterminate { ref chi, .. } if *chi == int(0)));
        let asserted =
            hom_dims_semistable(&g2, &DeclaredClass::stable(c(1, 0)), &DeclaredClass::stable(c(1, 1)), true).unwrap();
        assert_eq!(asserted, HomOutcome::Determined(HomDims::from_i64(0, 0)));
        let equal =
            hom_dims_semistable(&g2, &DeclaredClass::semistable(c(2, 2)), &DeclaredClass::semistable(c(1, 1)), false)
                .unwrap();
        assert!(matches!(equal, HomOutcome::Indeterminate { .. }));
        let torsion =
            hom_dims_semistable(&g2, &DeclaredClass::semistable(c(0, 2)), &DeclaredClass::semistable(c(0, 1)), false)
                .unwrap();
        assert!(matches!(torsion, HomOutcome::Indeterminate { .. }));
    }

    #[test]
    fn stable_self_hom_is_simple() {
        for g in 1..4 {
            let ctx = CurveCtx::new(g);
            let a = DeclaredClass::stable(c(2, 1));
            let out = hom_dims_semistable(&ctx, &a, &a, false).unwrap();
            let dims = out.determined().unwrap();
            assert_eq!(dims.hom0, int(1));
            assert_eq!(dims.chi(), euler_pairing(&ctx, &a.class, &a.class));
        }
        let ell = hom_dims_semistable(
            &CurveCtx::new(1),
            &DeclaredClass::stable(c(3, 1)),
            &DeclaredClass::stable(c(3, 1)),
            false,
        )
        .unwrap();
        assert_eq!(ell, HomOutcome::Determined(HomDims::from_i64(1, 1)));
    }

    #[test]
    fn genus_zero_equal_slopes_are_rigid() {
        let out = hom_dims_semistable(
            &CurveCtx::new(0),
            &DeclaredClass::semistable(c(2, 2)),
            &DeclaredClass::semistable(c(1, 1)),
            false,
        )
        .unwrap();
        assert_eq!(out, HomOutcome::Determined(HomDims::from_i64(2, 0)));
    }

    #[test]
    fn hom_dims_rejects_bad_input() {
        let ctx = CurveCtx::new(1);
        let bad = DeclaredClass::semistable(c(-1, 0));
        let ok = DeclaredClass::semistable(c(1, 0));
        assert!(matches!(hom_dims_semistable(&ctx, &bad, &ok, false), Err(CurveError::NotSheafClass(_))));
        let unstable = DeclaredClass { class: c(2, 1), stability: Stability::Unstable };
        assert!(matches!(hom_dims_semistable(&ctx, &ok, &unstable, false), Err(CurveError::NotSemistable(_))));
    }

    #[test]
    fn destabilizes_examples() {
        assert!(destabilizes(&c(2, 0), &c(1, -1)).unwrap());
        assert!(!destabilizes(&c(2, 0), &c(1, 0)).unwrap());
        assert!(destabilizes(&c(3, 1), &c(2, 0)).unwrap());
        assert!(destabilizes(&c(0, 1), &c(1, 0)).is_err());
        assert!(destabilizes(&c(1, 1), &c(0, 0)).is_err());
    }

    #[test]
    fn class_predicates() {
        assert!(c(0, 2).is_sheaf_class());
        assert!(!c(0, -2).is_sheaf_class());
        assert!(!c(-1, 5).is_sheaf_class());
        assert_eq!(c(2, 3).shifted(1), c(-2, -3));
        assert_eq!(c(2, 3).shifted(-3), c(-2, -3));
        assert_eq!(c(2, 3).shifted(2), c(2, 3));
        assert!(c(3, 1).is_primitive());
        assert!(!c(2, 2).is_primitive());
    }

    #[test]
    fn context_validation() {
        assert!(CurveCtx::with_polarisation(1, 0).is_err());
        assert_eq!(CurveCtx::new(3).omega(), c(1, 4));
        assert!(matches!(CurveCtx::new(1).polarisation(), Err(CurveError::MissingPolarisation)));
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn class() -> impl Strategy<Value = CurveClass> {
        (-50i64..=50, -50i64..=50).prop_map(|(r, d)| CurveClass::from_i64(r, d))
    }

    fn sheaf_class() -> impl Strategy<Value = DeclaredClass> {
        prop_oneof![
            (1i64..=8, -30i64..=30).prop_map(|(r, d)| DeclaredClass::semistable(CurveClass::from_i64(r, d))),
            (1i64..=8).prop_map(|n| DeclaredClass::semistable(CurveClass::from_i64(0, n))),
        ]
    }

    proptest! {
        #[test]
        fn pairing_is_biadditive(g in 0u32..6, a in class(), a2 in class(), b in class(), b2 in class()) {
            let ctx = CurveCtx::new(g);
            prop_assert_eq!(
                euler_pairing(&ctx, &(&a + &a2), &b),
                euler_pairing(&ctx, &a, &b) + euler_pairing(&ctx, &a2, &b)
            );
            prop_assert_eq!(
                euler_pairing(&ctx, &a, &(&b + &b2)),
                euler_pairing(&ctx, &a, &b) + euler_pairing(&ctx, &a, &b2)
            );
            prop_assert_eq!(euler_pairing(&ctx, &a.shifted(1), &b), -euler_pairing(&ctx, &a, &b));
        }

        #[test]
        fn serre_duality_on_pairing(g in 0u32..6, a in class(), b in class()) {
            let ctx = CurveCtx::new(g);
            let a_omega = twist(&a, &ctx.canonical_degree());
            prop_assert_eq!(euler_pairing(&ctx, &a, &b), -euler_pairing(&ctx, &b, &a_omega));
        }

        #[test]
        fn twist_is_additive(c in class(), m in -40i64..40, n in -40i64..40) {
            prop_assert_eq!(twist(&c, &int(0)), c.clone());
            prop_assert_eq!(twist(&twist(&c, &int(m)), &int(n)), twist(&c, &int(m + n)));
        }

        #[test]
        fn determined_dims_match_chi(g in 0u32..5, a in sheaf_class(), b in sheaf_class(), flag: bool) {
            let ctx = CurveCtx::new(g);
            let out = match hom_dims_semistable(&ctx, &a, &b, flag) {
                Err(CurveError::NoSemistableOnP1(c)) => {
                    prop_assert!(g == 0 && !c.degree.is_multiple_of(&c.rank));
                    return Ok(());
                }
                other => other.unwrap(),
            };
            prop_assert_eq!(out.chi(), euler_pairing(&ctx, &a.class, &b.class));
            if let HomOutcome::Determined(d) = out {
                prop_assert!(!d.hom0.is_negative() && !d.hom1.is_negative());
            }
        }
    }
}
