//! Even cohomology of `X = P¹ × C` with `C` elliptic, written in the basis
//! `[X], f_q, f_p, z` where `f_q` and `f_p` are the fibre classes of the two
//! projections and `z` is the point class. The ring relations are
//! `f_q·f_p = z` and `f_q² = f_p² = 0`; the Todd class is `1 + f_p`.
//!
//! Also holds the inequality verifiers for rank-2 bundles on this surface.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{
    box_search_empty, int, rat, serde_int, Constraint, Int, IntBox, IntPoly, MultiPoly, NumericsError, Rat,
    SearchOutcome,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("Euler characteristic {0} is not an integer")]
    NonIntegralChi(Rat),
    #[error("{0} is not a divisor class (needs zero rank and zero point part)")]
    NotDivisor(Box<SurfaceClass>),
    #[error("rank must be positive, got {0}")]
    NonPositiveRank(i64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `a0·[X] + aq·f_q + ap·f_p + a4·z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceClass {
    #[serde(with = "serde_int")]
    pub a0: Int,
    #[serde(with = "serde_int")]
    pub aq: Int,
    #[serde(with = "serde_int")]
    pub ap: Int,
    #[serde(with = "serde_int::rational")]
    pub a4: Rat,
}

impl SurfaceClass {
    pub fn new(a0: Int, aq: Int, ap: Int, a4: Rat) -> Self {
        SurfaceClass { a0, aq, ap, a4 }
    }

    pub fn from_i64(a0: i64, aq: i64, ap: i64, a4: i64) -> Self {
        SurfaceClass::new(int(a0), int(aq), int(ap), rat(a4, 1))
    }

    pub fn zero() -> Self {
        Self::from_i64(0, 0, 0, 0)
    }

    pub fn unit() -> Self {
        Self::from_i64(1, 0, 0, 0)
    }

    pub fn f_q() -> Self {
        Self::from_i64(0, 1, 0, 0)
    }

    pub fn f_p() -> Self {
        Self::from_i64(0, 0, 1, 0)
    }

    pub fn z() -> Self {
        Self::from_i64(0, 0, 0, 1)
    }

    /// `n_q f_q + n_p f_p`.
    pub fn divisor(n_q: i64, n_p: i64) -> Self {
        Self::from_i64(0, n_q, n_p, 0)
    }

    /// The polarisation `H = f_q + 3 f_p`.
    pub fn polarisation() -> Self {
        Self::divisor(1, 3)
    }

    /// Todd class `1 + f_p` (from `c₁(X) = 2 f_p`, `c₂(X) = 0`).
    pub fn todd() -> Self {
        Self::from_i64(1, 0, 1, 0)
    }

    pub fn is_divisor(&self) -> bool {
        self.a0.is_zero() && self.a4.is_zero()
    }

    pub fn scaled(&self, k: &Rat) -> SurfaceClass {
        // Only the point part may pick up a denominator.
        assert!(k.is_integer() || (self.a0.is_zero() && self.aq.is_zero() && self.ap.is_zero()));
        let ki = k.to_integer();
        SurfaceClass::new(&self.a0 * &ki, &self.aq * &ki, &self.ap * &ki, &self.a4 * k)
    }

    /// Dual class: degree-2 part negated.
    pub fn dual(&self) -> SurfaceClass {
        SurfaceClass::new(self.a0.clone(), -&self.aq, -&self.ap, self.a4.clone())
    }

    /// Divisor part `c₁`.
    pub fn c1(&self) -> SurfaceClass {
        SurfaceClass::divisor_big(self.aq.clone(), self.ap.clone())
    }

    fn divisor_big(aq: Int, ap: Int) -> SurfaceClass {
        SurfaceClass::new(Int::zero(), aq, ap, Rat::zero())
    }

    /// `c₂ = c₁²/2 − ch₂` for a Chern character.
    pub fn c2(&self) -> Rat {
        let c1 = self.c1();
        cup(&c1, &c1).a4 / Rat::from_integer(int(2)) - &self.a4
    }

    /// Chern character `r + c₁ + (c₁²/2 − c₂)`.
    pub fn chern_character(rank: Int, c1: &SurfaceClass, c2: &Rat) -> Result<SurfaceClass, SurfaceError> {
        if !c1.is_divisor() {
            return Err(SurfaceError::NotDivisor(Box::new(c1.clone())));
        }
        let ch2 = cup(c1, c1).a4 / Rat::from_integer(int(2)) - c2;
        Ok(SurfaceClass::new(rank, c1.aq.clone(), c1.ap.clone(), ch2))
    }
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (c, name) in [
            (&Rat::from_integer(self.a0.clone()), ""),
            (&Rat::from_integer(self.aq.clone()), "f_q"),
            (&Rat::from_integer(self.ap.clone()), "f_p"),
            (&self.a4, "z"),
        ] {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let abs = c.abs();
            let body = match (name, abs == Rat::from_integer(int(1))) {
                ("", _) => abs.to_string(),
                (n, true) => n.to_string(),
                (n, false) => format!("{abs}{n}"),
            };
            parts.push((sign, body));
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        for (i, (sign, body)) in parts.iter().enumerate() {
            match (i, *sign) {
                (0, "-") => write!(f, "-{body}")?,
                (0, _) => write!(f, "{body}")?,
                (_, s) => write!(f, " {s} {body}")?,
            }
        }
        Ok(())
    }
}

/// Graded product under `f_q·f_p = z`, `f_q² = f_p² = 0`.
pub fn cup(x: &SurfaceClass, y: &SurfaceClass) -> SurfaceClass {
    let a0 = &x.a0 * &y.a0;
    let aq = &x.a0 * &y.aq + &x.aq * &y.a0;
    let ap = &x.a0 * &y.ap + &x.ap * &y.a0;
    let a4 = Rat::from_integer(x.a0.clone()) * &y.a4
        + &x.a4 * Rat::from_integer(y.a0.clone())
        + Rat::from_integer(&x.aq * &y.ap + &x.ap * &y.aq);
    SurfaceClass::new(a0, aq, ap, a4)
}

impl Add for &SurfaceClass {
    type Output = SurfaceClass;
    fn add(self, o: &SurfaceClass) -> SurfaceClass {
        SurfaceClass::new(&self.a0 + &o.a0, &self.aq + &o.aq, &self.ap + &o.ap, &self.a4 + &o.a4)
    }
}

impl Sub for &SurfaceClass {
    type Output = SurfaceClass;
    fn sub(self, o: &SurfaceClass) -> SurfaceClass {
        self + &(-o)
    }
}

impl Neg for &SurfaceClass {
    type Output = SurfaceClass;
    fn neg(self) -> SurfaceClass {
        SurfaceClass::new(-&self.a0, -&self.aq, -&self.ap, -&self.a4)
    }
}

impl Mul for &SurfaceClass {
    type Output = SurfaceClass;
    fn mul(self, o: &SurfaceClass) -> SurfaceClass {
        cup(self, o)
    }
}

/// Intersection number of two divisor classes.
pub fn intersect(d1: &SurfaceClass, d2: &SurfaceClass) -> Result<Rat, SurfaceError> {
    for d in [d1, d2] {
        if !d.is_divisor() {
            return Err(SurfaceError::NotDivisor(Box::new(d.clone())));
        }
    }
    Ok(cup(d1, d2).a4)
}

/// `χ = ∫ x · td(X)`.
pub fn hrr_chi(x: &SurfaceClass) -> Result<Int, SurfaceError> {
    let value = cup(x, &SurfaceClass::todd()).a4;
    if value.is_integer() {
        Ok(value.to_integer())
    } else {
        Err(SurfaceError::NonIntegralChi(value))
    }
}

/// `χ(a, b) = ∫ ch(a)^∨ · ch(b) · td(X)`.
pub fn surface_euler_pairing(a: &SurfaceClass, b: &SurfaceClass) -> Result<Int, SurfaceError> {
    hrr_chi(&cup(&a.dual(), b))
}

/// `x · exp(kH) = x · (1 + kH + k²H²/2)`.
pub fn twist_by(x: &SurfaceClass, k: &Int, h: &SurfaceClass) -> Result<SurfaceClass, SurfaceError> {
    if !h.is_divisor() {
        return Err(SurfaceError::NotDivisor(Box::new(h.clone())));
    }
    let kr = Rat::from_integer(k.clone());
    let h2 = cup(h, h).a4;
    let exp = SurfaceClass::new(int(1), &h.aq * k, &h.ap * k, &kr * &kr * h2 / Rat::from_integer(int(2)));
    Ok(cup(x, &exp))
}

/// Cohomological action of the relative Fourier–Mukai transform along `C`:
/// `(a0, aq, ap, a4) ↦ (aq, −a0, a4, −ap)`.
pub fn fm_relative(x: &SurfaceClass) -> Result<SurfaceClass, SurfaceError> {
    if !x.a4.is_integer() {
        return Err(SurfaceError::NonIntegralChi(x.a4.clone()));
    }
    Ok(SurfaceClass::new(x.aq.clone(), -&x.a0, x.a4.to_integer(), Rat::from_integer(-&x.ap)))
}

/// `c₁² − 4c₂` for a rank-2 class.
pub fn bogomolov_delta(c1: &SurfaceClass, c2: &Int) -> Result<Int, SurfaceError> {
    let c1sq = intersect(c1, c1)?;
    Ok(c1sq.to_integer() - int(4) * c2)
}

/// True iff `c₁(M)·H < c₁(E)·H / rank`.
pub fn stability_slope_test(
    c1_e: &SurfaceClass,
    rank: i64,
    c1_m: &SurfaceClass,
    h: &SurfaceClass,
) -> Result<bool, SurfaceError> {
    if rank < 1 {
        return Err(SurfaceError::NonPositiveRank(rank));
    }
    let lhs = intersect(c1_m, h)?;
    let rhs = intersect(c1_e, h)? / Rat::from_integer(int(rank));
    Ok(lhs < rhs)
}

/// A divisor `q·f_q + p·f_p` whose coefficients are polynomials in
/// symbolic integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymDivisor {
    pub q: MultiPoly,
    pub p: MultiPoly,
}

impl SymDivisor {
    pub fn new(q: MultiPoly, p: MultiPoly) -> Self {
        SymDivisor { q, p }
    }

    pub fn constant(d: &SurfaceClass) -> Self {
        SymDivisor::new(MultiPoly::constant(d.aq.clone()), MultiPoly::constant(d.ap.clone()))
    }

    pub fn dot(&self, o: &SymDivisor) -> MultiPoly {
        &(&self.q * &o.p) + &(&self.p * &o.q)
    }

    pub fn scaled(&self, k: i64) -> SymDivisor {
        let k = MultiPoly::constant(k);
        SymDivisor::new(&self.q * &k, &self.p * &k)
    }
}

impl Add for &SymDivisor {
    type Output = SymDivisor;
    fn add(self, o: &SymDivisor) -> SymDivisor {
        SymDivisor::new(&self.q + &o.q, &self.p + &o.p)
    }
}

impl Sub for &SymDivisor {
    type Output = SymDivisor;
    fn sub(self, o: &SymDivisor) -> SymDivisor {
        SymDivisor::new(&self.q - &o.q, &self.p - &o.p)
    }
}

/// Variable order used by the two verifiers.
pub const NP: usize = 0;
pub const NQ: usize = 1;
pub const VAR_NAMES: [&str; 2] = ["n_p", "n_q"];

fn n_p() -> MultiPoly {
    MultiPoly::var(NP)
}

fn n_q() -> MultiPoly {
    MultiPoly::var(NQ)
}

/// The line bundle class `n_p f_p + n_q f_q` with symbolic coefficients.
fn symbolic_line() -> SymDivisor {
    SymDivisor::new(n_q(), n_p())
}

fn show(p: &MultiPoly) -> String {
    p.display_with(&VAR_NAMES)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub description: String,
    pub constraints: Vec<String>,
    /// Inclusive bounds for `(n_p, n_q)`.
    pub search_box: IntBox,
    pub outcome: SearchOutcome,
}

fn run_search(description: &str, constraints: Vec<Constraint>, bx: IntBox) -> Result<SearchRecord, SurfaceError> {
    let outcome = box_search_empty(&constraints, &bx)?;
    Ok(SearchRecord {
        description: description.to_string(),
        constraints: constraints.iter().map(|c| c.display_with(&VAR_NAMES)).collect(),
        search_box: bx,
        outcome,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExaSheafReport {
    pub length_polynomial: String,
    pub matches_stated_polynomial: bool,
    /// `(n_q, n_p, length)` at the first admissible corner.
    pub corner_value: (i64, i64, i64),
    pub search: SearchRecord,
    /// Length after `n_q = 1 + t`, `n_p = −3 − 3n_q − s`, with `s, t ≥ 0`.
    pub certificate_polynomial: String,
    pub certificate_all_coefficients_negative: bool,
    pub empty: bool,
}

/// `length(Z) = c₂(F) − c₁(L)·c₁(det F ⊗ L⁻¹)` with `c₂(F) = 2`,
/// `c₁(F) = −f_q − 2f_p` and `L = n_p f_p + n_q f_q`.
pub fn exa_sheaf_length_polynomial() -> MultiPoly {
    let det_f = SymDivisor::constant(&SurfaceClass::divisor(-1, -2));
    let l = symbolic_line();
    let quotient = &det_f - &l;
    &MultiPoly::constant(2) - &l.dot(&quotient)
}

pub fn verify_exa_sheaf_lemma() -> Result<ExaSheafReport, SurfaceError> {
    let length = exa_sheaf_length_polynomial();
    // 2 + 2n_q + n_p + 2 n_p n_q, built directly.
    let stated = &(&(&MultiPoly::constant(2) + &(&MultiPoly::constant(2) * &n_q())) + &n_p())
        + &(&MultiPoly::constant(2) * &(&n_p() * &n_q()));

    let constraints = vec![
        Constraint::ge(n_q(), 1.into()),
        Constraint::le(n_p(), &MultiPoly::constant(-3) - &(&MultiPoly::constant(3) * &n_q())),
        Constraint::ge(length.clone(), 0.into()),
    ];
    let search = run_search(
        "subline with n_q >= 1 violating stability and nonnegative length",
        constraints,
        IntBox::new(vec![(-500, 0), (1, 50)])?,
    )?;

    // Substitute n_q = 1 + t (t = x1) and n_p = −3 − 3n_q − s (s = x0).
    let t = MultiPoly::var(NQ);
    let s = MultiPoly::var(NP);
    let nq_sub = &MultiPoly::constant(1) + &t;
    let np_sub = &(&MultiPoly::constant(-3) - &(&MultiPoly::constant(3) * &nq_sub)) - &s;
    // Replace n_p first (it mentions n_q through nq_sub, so no clash).
    let cert = length.substitute(NP, &np_sub).substitute(NQ, &nq_sub);
    let all_negative = !cert.is_zero() && cert.terms().all(|(_, c)| c.is_negative());
    let corner = length.eval_i64(&[-6, 1]).try_into().unwrap_or(i64::MIN);

    let empty = search.outcome.is_empty() && all_negative;
    Ok(ExaSheafReport {
        length_polynomial: show(&length),
        matches_stated_polynomial: length == stated,
        corner_value: (1, -6, corner),
        search,
        certificate_polynomial: cert.display_with(&["s", "t"]),
        certificate_all_coefficients_negative: all_negative,
        empty,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionFreeReport {
    pub first_inequality: String,
    pub second_inequality: String,
    pub stated_third_inequality: String,
    pub derived_third_inequality: String,
    pub third_inequalities_agree: bool,
    pub stated_system: SearchRecord,
    pub derived_system: SearchRecord,
    pub implication_np: SearchRecord,
    pub implication_nq: SearchRecord,
    pub case_analysis_holds: bool,
    pub empty: bool,
}

/// Linear-form data of the torsion-free argument, derived by intersection:
/// `F'` has `c₁ = −f_q − 3f_p`, `F` has `c₁ = −f_q − 2f_p`,
/// `M = n_p f_p + n_q f_q`.
pub struct TorsionFreeForms {
    /// `(2c₁(M) − c₁(F'))·H`
    pub first: MultiPoly,
    /// `(2c₁(M) − c₁(F'))²`
    pub second: MultiPoly,
    /// `(2c₁(M) − c₁(F))·H`
    pub third: MultiPoly,
}

pub fn torsionfree_forms() -> TorsionFreeForms {
    let h = SymDivisor::constant(&SurfaceClass::polarisation());
    let m2 = symbolic_line().scaled(2);
    let d_fprime = &m2 - &SymDivisor::constant(&SurfaceClass::divisor(-1, -3));
    let d_f = &m2 - &SymDivisor::constant(&SurfaceClass::divisor(-1, -2));
    TorsionFreeForms { first: d_fprime.dot(&h), second: d_fprime.dot(&d_fprime), third: d_f.dot(&h) }
}

/// `2n_p + 3n_q + 5`, the reference form of the third inequality.
pub fn stated_third_form() -> MultiPoly {
    &(&(&MultiPoly::constant(2) * &n_p()) + &(&MultiPoly::constant(3) * &n_q())) + &MultiPoly::constant(5)
}

/// Lower bound of a linear form with nonnegative coefficients on the
/// quadrant `n_p ≥ p0, n_q ≥ q0` (attained at the corner), or `None` if the
/// form is not of that shape.
fn corner_min(form: &MultiPoly, p0: i64, q0: i64) -> Option<Int> {
    let linear = form.terms().all(|(e, _)| e.iter().sum::<u32>() <= 1);
    let nonneg = form.terms().all(|(e, c)| e.is_empty() || !c.is_negative());
    (linear && nonneg).then(|| form.eval_i64(&[p0, q0]))
}

/// Upper bound on the quadrant `n_p ≤ p0, n_q ≤ q0`.
fn corner_max(form: &MultiPoly, p0: i64, q0: i64) -> Option<Int> {
    corner_min(form, p0, q0)
}

pub fn verify_torsionfree_lemma() -> Result<TorsionFreeReport, SurfaceError> {
    let forms = torsionfree_forms();
    let stated = stated_third_form();
    let bx = || IntBox::new(vec![(-50, 50), (-50, 50)]);
    let c1 = || Constraint::gt(forms.first.clone(), 0.into());
    let c2 = || Constraint::gt(forms.second.clone(), 0.into());

    let stated_system = run_search(
        "first two inequalities with the printed third",
        vec![c1(), c2(), Constraint::le(stated.clone(), 0.into())],
        bx()?,
    )?;
    let derived_system = run_search(
        "first two inequalities with the intersection-derived third",
        vec![c1(), c2(), Constraint::le(forms.third.clone(), 0.into())],
        bx()?,
    )?;
    let implication_np = run_search(
        "first two inequalities with n_p <= -2",
        vec![c1(), c2(), Constraint::le(n_p(), (-2).into())],
        bx()?,
    )?;
    let implication_nq = run_search(
        "first two inequalities with n_q <= -1",
        vec![c1(), c2(), Constraint::le(n_q(), (-1).into())],
        bx()?,
    )?;

    // The square is 2(2n_q+1)(2n_p+3): both factors share a sign.
    // Both negative means n_p <= -2, n_q <= -1, where the first form is at most its corner value.
    let negative_branch_dead = corner_max(&forms.first, -2, -1).is_some_and(|v| !v.is_positive());
    // Both positive means n_p >= -1, n_q >= 0, where each third form is at least its corner value.
    let stated_dead = corner_min(&stated, -1, 0).is_some_and(|v| v.is_positive());
    let derived_dead = corner_min(&forms.third, -1, 0).is_some_and(|v| v.is_positive());
    let square_factorises = forms.second
        == &MultiPoly::constant(2)
            * &(&(&(&MultiPoly::constant(2) * &n_q()) + &MultiPoly::constant(1))
                * &(&(&MultiPoly::constant(2) * &n_p()) + &MultiPoly::constant(3)));
    let case_analysis_holds = square_factorises && negative_branch_dead && stated_dead && derived_dead;

    let empty = stated_system.outcome.is_empty()
        && derived_system.outcome.is_empty()
        && implication_np.outcome.is_empty()
        && implication_nq.outcome.is_empty()
        && case_analysis_holds;
    Ok(TorsionFreeReport {
        first_inequality: format!("{} > 0", show(&forms.first)),
        second_inequality: format!("{} > 0", show(&forms.second)),
        stated_third_inequality: format!("{} <= 0", show(&stated)),
        derived_third_inequality: format!("{} <= 0", show(&forms.third)),
        third_inequalities_agree: stated == forms.third,
        stated_system,
        derived_system,
        implication_np,
        implication_nq,
        case_analysis_holds,
        empty,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiTwistComparison {
    /// Interpolated from `hrr_chi(ch(E)·exp(kH))` at `k = 0, 1, 2`, then
    /// confirmed on `|k| ≤ 20`.
    pub computed: IntPoly,
    pub stated: IntPoly,
    pub agree: bool,
    pub computed_display: String,
    pub stated_display: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuliReport {
    pub ch_e: SurfaceClass,
    #[serde(with = "serde_int")]
    pub chi_e_e: Int,
    /// `(hom, ext¹, ext²)` as listed for `E`.
    pub ext_table: (i64, i64, i64),
    pub ext_table_consistent: bool,
    /// `ext¹ = hom + ext² − χ(E,E)`.
    #[serde(with = "serde_int")]
    pub ext1_from_chi: Int,
    /// `dim Pic²(C) + dim Hilb²(X)`.
    pub product_dimension: i64,
    pub chi_twist: ChiTwistComparison,
    pub fm_ch: SurfaceClass,
    pub fm_c1: SurfaceClass,
    #[serde(with = "serde_int::rational")]
    pub fm_c2: Rat,
    #[serde(with = "serde_int::rational")]
    pub fm_c1_dot_h: Rat,
    /// `−5/2 > −3`, the slope comparison for sub line bundles.
    pub fm_slope_test: bool,
    /// Sub line bundles with `n_p ≤ 0`, `n_q ≤ −1` have `c₁(M)·H ≤ −3`.
    pub subline_bound: SearchRecord,
    /// `c₂` of the kernel in the fibre-contained case.
    #[serde(with = "serde_int::rational")]
    pub case2_c2: Rat,
    /// `Δ(F')` as a polynomial in `d`, by interpolation at three points.
    pub delta_polynomial: IntPoly,
    pub delta_matches: bool,
    pub consistent: bool,
}

/// `ch(E) = 1 + 2f_q − 2z`.
pub fn ch_e() -> SurfaceClass {
    SurfaceClass::from_i64(1, 2, 0, -2)
}

pub fn chi_twist_comparison() -> Result<ChiTwistComparison, SurfaceError> {
    let h = SurfaceClass::polarisation();
    let chi_at = |k: i64| -> Result<Int, SurfaceError> { hrr_chi(&twist_by(&ch_e(), &int(k), &h)?) };
    let pts = (0..3).map(|k| Ok((int(k), chi_at(k)?))).collect::<Result<Vec<_>, SurfaceError>>()?;
    let computed = IntPoly::interpolate(&pts)?;
    for k in -20..=20 {
        if computed.eval_i64(k)? != chi_at(k)? {
            return Err(SurfaceError::Numerics(NumericsError::NotIntegral {
                poly: computed.to_string(),
                at: int(k),
                value: Rat::from_integer(chi_at(k)?),
            }));
        }
    }
    let stated = IntPoly::from_ints(&[0, 7, 1]);
    Ok(ChiTwistComparison {
        agree: computed == stated,
        computed_display: computed.to_string(),
        stated_display: stated.to_string(),
        computed,
        stated,
    })
}

pub fn m1_m2_invariants() -> Result<ModuliReport, SurfaceError> {
    let e = ch_e();
    let h = SurfaceClass::polarisation();
    let chi_e_e = surface_euler_pairing(&e, &e)?;
    let ext_table = (1i64, 5i64, 0i64);
    let ext_table_consistent = chi_e_e == int(ext_table.0 - ext_table.1 + ext_table.2);
    let ext1_from_chi = int(ext_table.0 + ext_table.2) - &chi_e_e;
    // Pic of an elliptic curve is 1-dimensional; Hilb² of a surface has dimension 4.
    let product_dimension = 1 + 2 * 2;

    let fm_ch = fm_relative(&e)?;
    let fm_c1 = fm_ch.c1();
    let fm_c2 = fm_ch.c2();
    let fm_c1_dot_h = intersect(&fm_c1, &h)?;
    let worst_subline = SurfaceClass::divisor(-1, 0);
    let fm_slope_test =
        stability_slope_test(&fm_c1, 2, &worst_subline, &h)? && intersect(&worst_subline, &h)? == rat(-3, 1);

    let subline_bound = run_search(
        "sub line bundle with n_p <= 0, n_q <= -1 and c1(M).H > -3",
        vec![
            Constraint::le(n_p(), 0.into()),
            Constraint::le(n_q(), (-1).into()),
            Constraint::gt(&n_p() + &(&MultiPoly::constant(3) * &n_q()), (-3).into()),
        ],
        IntBox::new(vec![(-50, 0), (-50, -1)])?,
    )?;

    let kernel_ch = &fm_ch + &SurfaceClass::z();
    let case2_c2 = kernel_ch.c2();

    let f_prime_c1 = SurfaceClass::divisor(-1, -3);
    let delta_pts = [-2i64, 0, 3]
        .iter()
        .map(|&d| Ok((int(d), bogomolov_delta(&f_prime_c1, &int(3 + d))?)))
        .collect::<Result<Vec<_>, SurfaceError>>()?;
    let delta_polynomial = IntPoly::interpolate(&delta_pts)?;
    let delta_matches = delta_polynomial == IntPoly::from_ints(&[-6, -4]);

    let chi_twist = chi_twist_comparison()?;
    let consistent = ext_table_consistent
        && ext1_from_chi == int(product_dimension)
        && fm_c1 == SurfaceClass::divisor(-1, -2)
        && fm_c2 == rat(2, 1)
        && fm_c1_dot_h == rat(-5, 1)
        && fm_slope_test
        && subline_bound.outcome.is_empty()
        && case2_c2 == rat(1, 1)
        && delta_matches;
    Ok(ModuliReport {
        ch_e: e,
        chi_e_e,
        ext_table,
        ext_table_consistent,
        ext1_from_chi,
        product_dimension,
        chi_twist,
        fm_ch,
        fm_c1,
        fm_c2,
        fm_c1_dot_h,
        fm_slope_test,
        subline_bound,
        case2_c2,
        delta_polynomial,
        delta_matches,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis() -> Vec<SurfaceClass> {
        vec![SurfaceClass::unit(), SurfaceClass::f_q(), SurfaceClass::f_p(), SurfaceClass::z()]
    }

    /// Multiplication table of the basis, written out by hand.
    fn table(i: usize, j: usize) -> SurfaceClass {
        let b = basis();
        match (i, j) {
            (0, k) | (k, 0) => b[k].clone(),
            (1, 2) | (2, 1) => SurfaceClass::z(),
            _ => SurfaceClass::zero(),
        }
    }

    #[test]
    fn cup_matches_table() {
        let b = basis();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(cup(&b[i], &b[j]), table(i, j), "{i} {j}");
            }
        }
    }

    #[test]
    fn cup_examples() {
        let h = SurfaceClass::polarisation();
        assert_eq!(cup(&h, &h), SurfaceClass::from_i64(0, 0, 0, 6));
        assert_eq!(cup(&SurfaceClass::f_q(), &SurfaceClass::f_p()), SurfaceClass::z());
        assert_eq!(cup(&SurfaceClass::divisor(-1, -2), &h), SurfaceClass::from_i64(0, 0, 0, -5));
    }

    #[test]
    fn hrr_examples() {
        assert_eq!(hrr_chi(&SurfaceClass::unit()).unwrap(), int(0));
        assert_eq!(surface_euler_pairing(&ch_e(), &ch_e()).unwrap(), int(-4));
        let half = SurfaceClass::new(int(0), int(0), int(0), rat(1, 2));
        assert!(matches!(hrr_chi(&half), Err(SurfaceError::NonIntegralChi(_))));
    }

    /// χ(O(a f_q + b f_p)) = χ(O_{P¹}(b))·χ(O_C(a)) = (b + 1)·a by Künneth.
    #[test]
    fn hrr_matches_kunneth_for_line_bundles() {
        for a in -5..=5 {
            for b in -5..=5 {
                let d = SurfaceClass::divisor(a, b);
                let ch = SurfaceClass::chern_character(int(1), &d, &Rat::zero()).unwrap();
                assert_eq!(hrr_chi(&ch).unwrap(), int((b + 1) * a), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn twist_examples() {
        let h = SurfaceClass::polarisation();
        for k in -4..=4 {
            assert_eq!(
                twist_by(&SurfaceClass::unit(), &int(k), &h).unwrap(),
                SurfaceClass::from_i64(1, k, 3 * k, 3 * k * k)
            );
        }
        assert_eq!(twist_by(&ch_e(), &int(0), &h).unwrap(), ch_e());
        assert_eq!(twist_by(&ch_e(), &int(1), &h).unwrap(), SurfaceClass::from_i64(1, 3, 3, 7));
        assert!(twist_by(&ch_e(), &int(1), &SurfaceClass::unit()).is_err());
    }

    #[test]
    fn chi_twist_differs_from_printed_value() {
        let cmp = chi_twist_comparison().unwrap();
        assert_eq!(cmp.computed, IntPoly::from_ints(&[0, 7, 3]));
        assert!(!cmp.agree);
        assert_eq!(cmp.stated.eval_i64(1).unwrap(), int(8));
        assert_eq!(cmp.computed.eval_i64(1).unwrap(), int(10));
    }

    #[test]
    fn bogomolov_examples() {
        assert_eq!(bogomolov_delta(&SurfaceClass::divisor(-1, -3), &int(1)).unwrap(), int(2));
        assert_eq!(bogomolov_delta(&SurfaceClass::zero(), &int(0)).unwrap(), int(0));
        assert_eq!(bogomolov_delta(&SurfaceClass::divisor(-1, -2), &int(2)).unwrap(), int(-4));
        for d in -10..=10 {
            assert_eq!(bogomolov_delta(&SurfaceClass::divisor(-1, -3), &int(3 + d)).unwrap(), int(-4 * d - 6));
        }
    }

    #[test]
    fn slope_test_examples() {
        let h = SurfaceClass::polarisation();
        let c1e = SurfaceClass::divisor(-1, -2);
        assert!(stability_slope_test(&c1e, 2, &SurfaceClass::divisor(-1, 0), &h).unwrap());
        assert!(!stability_slope_test(&c1e, 1, &c1e, &h).unwrap());
        for n_p in -6..=0 {
            for n_q in -6..=-1 {
                let m = SurfaceClass::divisor(n_q, n_p);
                assert_eq!(intersect(&m, &h).unwrap(), rat(n_p + 3 * n_q, 1));
                assert!(stability_slope_test(&c1e, 2, &m, &h).unwrap());
            }
        }
        assert!(stability_slope_test(&c1e, 0, &c1e, &h).is_err());
    }

    #[test]
    fn fm_relative_squares_to_negation() {
        for x in basis() {
            assert_eq!(fm_relative(&fm_relative(&x).unwrap()).unwrap(), -&x);
        }
        assert_eq!(fm_relative(&ch_e()).unwrap(), SurfaceClass::from_i64(2, -1, -2, 0));
    }

    #[test]
    fn exa_sheaf_lemma() {
        let r = verify_exa_sheaf_lemma().unwrap();
        assert!(r.matches_stated_polynomial, "{}", r.length_polynomial);
        assert_eq!(r.corner_value, (1, -6, -14));
        assert!(r.search.outcome.is_empty());
        assert!(r.certificate_all_coefficients_negative, "{}", r.certificate_polynomial);
        assert!(r.empty);
    }

    #[test]
    fn torsionfree_lemma() {
        let r = verify_torsionfree_lemma().unwrap();
        assert_eq!(r.derived_third_inequality, "2*n_p + 6*n_q + 5 <= 0");
        assert!(!r.third_inequalities_agree);
        assert!(r.case_analysis_holds);
        assert!(r.empty);
        let forms = torsionfree_forms();
        // (n_p, n_q) = (-1, 0): first two hold, third fails.
        assert!(forms.first.eval_i64(&[-1, 0]).is_positive());
        assert!(forms.second.eval_i64(&[-1, 0]).is_positive());
        assert_eq!(stated_third_form().eval_i64(&[-1, 0]), int(3));
        assert_eq!(stated_third_form().eval_i64(&[0, 0]), int(5));
    }

    #[test]
    fn moduli_invariants() {
        let r = m1_m2_invariants().unwrap();
        assert_eq!(r.chi_e_e, int(-4));
        assert_eq!(r.ext1_from_chi, int(5));
        assert_eq!(r.product_dimension, 5);
        assert_eq!(r.fm_c1_dot_h, rat(-5, 1));
        assert_eq!(r.fm_c2, rat(2, 1));
        assert_eq!(r.case2_c2, rat(1, 1));
        assert!(r.delta_matches);
        assert!(r.consistent);
    }

    #[test]
    fn display() {
        assert_eq!(ch_e().to_string(), "1 + 2f_q - 2z");
        assert_eq!(SurfaceClass::divisor(-1, -2).to_string(), "-f_q - 2f_p");
        assert_eq!(SurfaceClass::zero().to_string(), "0");
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn class() -> impl Strategy<Value = SurfaceClass> {
        (-20i64..=20, -20i64..=20, -20i64..=20, -40i64..=40, 1i64..=2)
            .prop_map(|(a, b, c, n, d)| SurfaceClass::new(int(a), int(b), int(c), rat(n, d)))
    }

    proptest! {
        #[test]
        fn cup_is_commutative_and_associative(x in class(), y in class(), z in class()) {
            prop_assert_eq!(cup(&x, &y), cup(&y, &x));
            prop_assert_eq!(cup(&cup(&x, &y), &z), cup(&x, &cup(&y, &z)));
        }

        #[test]
        fn twist_is_additive(x in class(), m in -30i64..30, n in -30i64..30, hq in -3i64..4, hp in -3i64..4) {
            let h = SurfaceClass::divisor(hq, hp);
            let lhs = twist_by(&x, &int(m + n), &h).unwrap();
            let rhs = twist_by(&twist_by(&x, &int(m), &h).unwrap(), &int(n), &h).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
