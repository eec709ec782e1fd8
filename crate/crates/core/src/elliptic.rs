//! Formal objects in the derived category of a curve, written as direct sums
//! of shifted semistable sheaves ("atoms"). On an elliptic curve this module
//! also carries the Fourier–Mukai action and theta divisors of torsion sheaves.
//!
//! Convention: an atom with `shift = s` stands for `V[-s]`, i.e. the sheaf
//! `V` placed in cohomological degree `s`. Its K-class is `(-1)^s [V]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{hom_dims_semistable, CurveClass, CurveCtx, CurveError, DeclaredClass, HomOutcome};
use crate::numerics::{ceil_div, int, partition_count, Int, NumericsError, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EllipticError {
    #[error("atom class {0} is not a nonzero sheaf class")]
    NotSheafClass(CurveClass),
    #[error("torsion atom {class} needs exactly {expected} support labels, got {got}")]
    SupportSize { class: CurveClass, expected: Int, got: usize },
    #[error("support labels are only allowed on torsion or degree-0 atoms, got {0}")]
    UnexpectedSupport(CurveClass),
    #[error("degree-0 bundle {0} needs its Jordan–Hölder points as support labels to be transformed")]
    MissingSupport(CurveClass),
    #[error("invalid point label {0:?}")]
    InvalidLabel(String),
    #[error("object is not a torsion sheaf in degree 0")]
    NotTorsion,
    #[error("rank must be positive, got {0}")]
    NonPositiveRank(i64),
    #[error("the Fourier–Mukai action needs an elliptic curve, got genus {0}")]
    NotElliptic(u32),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// A point of the curve, kept as an opaque label with a formal inversion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PointLabel(String);

impl PointLabel {
    pub const ORIGIN: &'static str = "O";

    pub fn new(name: impl Into<String>) -> Result<Self, EllipticError> {
        let name = name.into();
        let body = name.strip_prefix('-').unwrap_or(&name);
        if body.is_empty() || body.starts_with('-') || name.chars().any(char::is_whitespace) {
            return Err(EllipticError::InvalidLabel(name));
        }
        if name == format!("-{}", Self::ORIGIN) {
            return Ok(Self::origin());
        }
        Ok(PointLabel(name))
    }

    pub fn origin() -> Self {
        PointLabel(Self::ORIGIN.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Image under `x ↦ -x`; the origin is fixed.
    pub fn negated(&self) -> PointLabel {
        if self.0 == Self::ORIGIN {
            return self.clone();
        }
        match self.0.strip_prefix('-') {
            Some(rest) => PointLabel(rest.to_string()),
            None => PointLabel(format!("-{}", self.0)),
        }
    }
}

impl fmt::Display for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for PointLabel {
    type Error = EllipticError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        PointLabel::new(s)
    }
}

impl From<PointLabel> for String {
    fn from(p: PointLabel) -> String {
        p.0
    }
}

pub fn labels<I, S>(names: I) -> Result<Vec<PointLabel>, EllipticError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    names.into_iter().map(PointLabel::new).collect()
}

/// `(r, d) ↦ (d, −r)`.
pub fn fm_kclass(c: &CurveClass) -> CurveClass {
    CurveClass::new(c.degree.clone(), -&c.rank)
}

/// A semistable sheaf placed in cohomological degree `shift`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "AtomRepr", into = "AtomRepr")]
pub struct Atom {
    kclass: CurveClass,
    shift: i64,
    support: Vec<PointLabel>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomRepr {
    #[serde(with = "crate::numerics::serde_int")]
    rank: Int,
    #[serde(with = "crate::numerics::serde_int")]
    degree: Int,
    #[serde(default)]
    shift: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    support: Vec<PointLabel>,
}

impl TryFrom<AtomRepr> for Atom {
    type Error = EllipticError;
    fn try_from(r: AtomRepr) -> Result<Self, Self::Error> {
        Atom::new(CurveClass::new(r.rank, r.degree), r.shift, r.support)
    }
}

impl From<Atom> for AtomRepr {
    fn from(a: Atom) -> Self {
        AtomRepr { rank: a.kclass.rank, degree: a.kclass.degree, shift: a.shift, support: a.support }
    }
}

impl Atom {
    /// Validates the class and support; the support is stored sorted.
    pub fn new(kclass: CurveClass, shift: i64, mut support: Vec<PointLabel>) -> Result<Self, EllipticError> {
        if !kclass.is_sheaf_class() || kclass.is_zero() {
            return Err(EllipticError::NotSheafClass(kclass));
        }
        if kclass.is_torsion() {
            if Int::from(support.len()) != kclass.degree {
                return Err(EllipticError::SupportSize {
                    expected: kclass.degree.clone(),
                    got: support.len(),
                    class: kclass,
                });
            }
        } else if !support.is_empty() {
            if !kclass.degree.is_zero() {
                return Err(EllipticError::UnexpectedSupport(kclass));
            }
            if Int::from(support.len()) != kclass.rank {
                return Err(EllipticError::SupportSize {
                    expected: kclass.rank.clone(),
                    got: support.len(),
                    class: kclass,
                });
            }
        }
        support.sort();
        Ok(Atom { kclass, shift, support })
    }

    /// A bundle atom without support labels.
    pub fn bundle(rank: i64, degree: i64, shift: i64) -> Result<Self, EllipticError> {
        Atom::new(CurveClass::from_i64(rank, degree), shift, Vec::new())
    }

    /// A torsion sheaf in degree `shift` supported on the given points.
    pub fn torsion(support: Vec<PointLabel>, shift: i64) -> Result<Self, EllipticError> {
        let n = support.len() as i64;
        Atom::new(CurveClass::from_i64(0, n), shift, support)
    }

    /// `O_X`, whose Jordan–Hölder point is the origin.
    pub fn structure_sheaf() -> Self {
        Atom { kclass: CurveClass::structure_sheaf(), shift: 0, support: vec![PointLabel::origin()] }
    }

    pub fn kclass(&self) -> &CurveClass {
        &self.kclass
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn support(&self) -> &[PointLabel] {
        &self.support
    }

    /// Signed class `(-1)^shift [V]`.
    pub fn signed_class(&self) -> CurveClass {
        self.kclass.shifted(self.shift)
    }

    pub fn is_torsion(&self) -> bool {
        self.kclass.is_torsion()
    }

    /// The atom moved `n` places up in cohomological degree (`V[-n]`).
    pub fn shifted(&self, n: i64) -> Atom {
        Atom { shift: self.shift + n, ..self.clone() }
    }

    /// Image under `x ↦ -x`.
    pub fn inverted(&self) -> Atom {
        let mut support: Vec<_> = self.support.iter().map(PointLabel::negated).collect();
        support.sort();
        Atom { support, ..self.clone() }
    }

    /// Fourier–Mukai image with the Poincaré bundle normalised at the origin.
    pub fn fm(&self) -> Result<Atom, EllipticError> {
        let r = &self.kclass.rank;
        let d = &self.kclass.degree;
        let out = if r.is_zero() {
            Atom { kclass: CurveClass::new(d.clone(), Int::zero()), shift: self.shift, support: self.support.clone() }
        } else if d.is_positive() {
            Atom { kclass: CurveClass::new(d.clone(), -r), shift: self.shift, support: Vec::new() }
        } else if d.is_negative() {
            Atom { kclass: CurveClass::new(-d, r.clone()), shift: self.shift + 1, support: Vec::new() }
        } else {
            if self.support.is_empty() {
                return Err(EllipticError::MissingSupport(self.kclass.clone()));
            }
            Atom {
                kclass: CurveClass::new(Int::zero(), r.clone()),
                shift: self.shift + 1,
                support: self.support.clone(),
            }
            .inverted()
        };
        if out.signed_class() != fm_kclass(&self.signed_class()) {
            return Err(EllipticError::Internal(format!(
                "FM image {} of {} disagrees with the K-theory action",
                out.signed_class(),
                self.signed_class()
            )));
        }
        Ok(out)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kclass, self.shift)?;
        if !self.support.is_empty() {
            let names: Vec<_> = self.support.iter().map(PointLabel::as_str).collect();
            write!(f, "{{{}}}", names.join(","))?;
        }
        Ok(())
    }
}

/// A finite direct sum of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EllipticObject {
    atoms: Vec<Atom>,
}

impl EllipticObject {
    pub fn new(mut atoms: Vec<Atom>) -> Self {
        atoms.sort();
        EllipticObject { atoms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(atom: Atom) -> Self {
        EllipticObject { atoms: vec![atom] }
    }

    /// A torsion sheaf in degree 0 whose support is the given multiset,
    /// one atom per point.
    pub fn torsion_from_points(points: &[PointLabel]) -> Result<Self, EllipticError> {
        let atoms = points.iter().map(|p| Atom::torsion(vec![p.clone()], 0)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(atoms))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn kclass(&self) -> CurveClass {
        self.atoms.iter().fold(CurveClass::zero(), |acc, a| &acc + &a.signed_class())
    }

    /// All atoms torsion in degree 0.
    pub fn is_torsion(&self) -> bool {
        self.atoms.iter().all(|a| a.is_torsion() && a.shift == 0)
    }

    pub fn torsion_length(&self) -> Result<Int, EllipticError> {
        if !self.is_torsion() {
            return Err(EllipticError::NotTorsion);
        }
        Ok(self.kclass().degree)
    }

    /// Sorted multiset of all support labels.
    pub fn support(&self) -> Vec<PointLabel> {
        let mut out: Vec<_> = self.atoms.iter().flat_map(|a| a.support.iter().cloned()).collect();
        out.sort();
        out
    }

    pub fn shifted(&self, n: i64) -> EllipticObject {
        EllipticObject::new(self.atoms.iter().map(|a| a.shifted(n)).collect())
    }

    pub fn inverted(&self) -> EllipticObject {
        EllipticObject::new(self.atoms.iter().map(Atom::inverted).collect())
    }

    pub fn fm(&self) -> Result<EllipticObject, EllipticError> {
        Ok(EllipticObject::new(self.atoms.iter().map(Atom::fm).collect::<Result<Vec<_>, _>>()?))
    }
}

impl fmt::Display for EllipticObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.atoms.iter().map(Atom::to_string).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Graded hom dimensions between two objects, or the Euler characteristic
/// when the individual degrees are not forced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GradedHom {
    /// Nonzero entries only, keyed by degree.
    Determined(#[serde(with = "degree_map")] BTreeMap<i64, Int>),
    Indeterminate {
        #[serde(with = "crate::numerics::serde_int")]
        chi: Int,
        reasons: Vec<String>,
    },
}

impl GradedHom {
    pub fn chi(&self) -> Int {
        match self {
            GradedHom::Determined(m) => {
                m.iter().fold(Int::zero(), |acc, (j, v)| if j.rem_euclid(2) == 0 { acc + v } else { acc - v })
            }
            GradedHom::Indeterminate { chi, .. } => chi.clone(),
        }
    }

    pub fn at(&self, degree: i64) -> Option<Int> {
        match self {
            GradedHom::Determined(m) => Some(m.get(&degree).cloned().unwrap_or_else(Int::zero)),
            GradedHom::Indeterminate { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, GradedHom::Determined(m) if m.is_empty())
    }
}

pub(crate) mod degree_map {
    use crate::numerics::serde_int::IntRepr;
    use crate::numerics::Int;
    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::collections::BTreeMap;

    /// JSON object keys must be strings; entries stay in numeric order.
    pub fn serialize<S: Serializer>(m: &BTreeMap<i64, Int>, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(&k.to_string(), &IntRepr(v.clone()))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<i64, Int>, D::Error> {
        let raw: BTreeMap<String, IntRepr> = BTreeMap::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<i64>()
                    .map(|k| (k, v.0))
                    .map_err(|_| serde::de::Error::custom(format!("degree key {k:?} is not an integer")))
            })
            .collect()
    }
}

fn disjoint(a: &[PointLabel], b: &[PointLabel]) -> bool {
    let sa: BTreeSet<_> = a.iter().collect();
    b.iter().all(|x| !sa.contains(x))
}

/// Sheaf-level `(hom⁰, hom¹)` of two atoms, ignoring shifts.
fn sheaf_hom(ctx: &CurveCtx, a: &Atom, b: &Atom) -> Result<HomOutcome, EllipticError> {
    let labelled = !a.support.is_empty() && !b.support.is_empty();
    let both_torsion = a.is_torsion() && b.is_torsion();
    let both_degree_zero = !a.is_torsion() && !b.is_torsion() && a.kclass.degree.is_zero() && b.kclass.degree.is_zero();
    // Torsion sheaves with disjoint support, or (on an elliptic curve) degree-0
    // bundles with disjoint Jordan–Hölder points, are mutually orthogonal.
    if labelled && (both_torsion || (both_degree_zero && ctx.genus == 1)) && disjoint(&a.support, &b.support) {
        return Ok(HomOutcome::Determined(crate::curve::HomDims::zero()));
    }
    // Semistable only: equal classes need not be isomorphic.
    Ok(hom_dims_semistable(
        ctx,
        &DeclaredClass::semistable(a.kclass.clone()),
        &DeclaredClass::semistable(b.kclass.clone()),
        false,
    )?)
}

/// `hom^j(a, b)` for all `j`, summing over atom pairs:
/// `hom^j(V[-s], W[-t]) = hom^{j+s-t}(V, W)`.
pub fn object_hom(ctx: &CurveCtx, a: &EllipticObject, b: &EllipticObject) -> Result<GradedHom, EllipticError> {
    let mut table: BTreeMap<i64, Int> = BTreeMap::new();
    let mut reasons = Vec::new();
    for x in &a.atoms {
        for y in &b.atoms {
            match sheaf_hom(ctx, x, y)? {
                HomOutcome::Determined(dims) => {
                    for (k, v) in [(0, dims.hom0), (1, dims.hom1)] {
                        if !v.is_zero() {
                            *table.entry(k - x.shift + y.shift).or_insert_with(Int::zero) += v;
                        }
                    }
                }
                HomOutcome::Indeterminate { reason, .. } => {
                    reasons.push(format!("hom({x}, {y}): {reason}"));
                }
            }
        }
    }
    if reasons.is_empty() {
        table.retain(|_, v| !v.is_zero());
        Ok(GradedHom::Determined(table))
    } else {
        Ok(GradedHom::Indeterminate { chi: crate::curve::euler_pairing(ctx, &a.kclass(), &b.kclass()), reasons })
    }
}

/// Theta divisor of a torsion sheaf: one line per support point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThetaDivisor {
    pub lines: Vec<PointLabel>,
    pub ambient: String,
    #[serde(with = "crate::numerics::serde_int")]
    pub degree: Int,
}

impl ThetaDivisor {
    /// Lines with their multiplicities.
    pub fn multiplicities(&self) -> BTreeMap<PointLabel, usize> {
        let mut m = BTreeMap::new();
        for l in &self.lines {
            *m.entry(l.clone()).or_insert(0) += 1;
        }
        m
    }
}

pub const THETA_AMBIENT: &str = "P(H^0(O_X(3P))^v)";

pub fn theta_torsion(t: &EllipticObject) -> Result<ThetaDivisor, EllipticError> {
    if t.is_zero() || !t.is_torsion() {
        return Err(EllipticError::NotTorsion);
    }
    let lines = t.support();
    Ok(ThetaDivisor { degree: Int::from(lines.len()), lines, ambient: THETA_AMBIENT.to_string() })
}

pub fn p_equivalent(t1: &EllipticObject, t2: &EllipticObject) -> Result<bool, EllipticError> {
    Ok(theta_torsion(t1)?.lines == theta_torsion(t2)?.lines)
}

/// Largest number of isomorphism classes of length-`r` torsion sheaves
/// sharing one theta divisor.
pub fn p_class_max_isoclasses(r: i64) -> Result<Int, EllipticError> {
    if r < 1 {
        return Err(EllipticError::NonPositiveRank(r));
    }
    Ok(partition_count(r as u64))
}

/// `(2g + ⌈d/r⌉ − d/r)(r³ + r)`.
pub fn theta_degree_general(g: u32, r: i64, d: i64) -> Result<Int, EllipticError> {
    if r < 1 {
        return Err(EllipticError::NonPositiveRank(r));
    }
    let (ri, di) = (int(r), int(d));
    let c = ceil_div(&di, &ri)?;
    let factor = Rat::from_integer(int(2) * Int::from(g) + c) - Rat::new(di, ri.clone());
    let value = factor * Rat::from_integer(&ri * &ri * &ri + &ri);
    if !value.is_integer() {
        return Err(EllipticError::Internal(format!("theta degree {value} is not an integer")));
    }
    Ok(value.to_integer())
}

/// Requires an elliptic context.
pub fn require_elliptic(ctx: &CurveCtx) -> Result<(), EllipticError> {
    if ctx.genus == 1 {
        Ok(())
    } else {
        Err(EllipticError::NotElliptic(ctx.genus))
    }
}
