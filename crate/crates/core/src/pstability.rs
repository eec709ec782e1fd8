//! P-data are finite families of test objects with prescribed hom tables,
//! plus an optional cone orthogonality requirement. The verdict engine
//! compares an object against one.

use std::collections::{BTreeMap, BTreeSet};

use num::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{CurveClass, CurveCtx, CurveError};
use crate::elliptic::{
    degree_map, object_hom, require_elliptic, theta_degree_general, Atom, EllipticError, EllipticObject, GradedHom,
    PointLabel,
};
use crate::numerics::{int, serde_int, Int};
use crate::sheaf::{f_rd_class, frd_pair, SheafError};
use crate::surface::SurfaceClass;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PStabError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid datum: {0}")]
    InvalidDatum(String),
    #[error("condition {index}: {reason}")]
    Unrepresentable { index: i64, reason: String },
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
}

/// `Covariant` tests `hom(C, X)`, `Contravariant` tests `hom(X, C)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Covariant,
    Contravariant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatumContext {
    Curve(CurveCtx),
    Surface,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConditionObject {
    /// A semistable sheaf of the given class placed in cohomological degree `shift`.
    Curve {
        class: CurveClass,
        #[serde(default)]
        shift: i64,
    },
    Elliptic {
        object: EllipticObject,
    },
    Surface {
        class: SurfaceClass,
    },
    Symbolic {
        name: String,
        description: String,
    },
}

impl ConditionObject {
    pub fn curve(rank: i64, degree: i64, shift: i64) -> Self {
        ConditionObject::Curve { class: CurveClass::from_i64(rank, degree), shift }
    }

    /// Atom form of a curve condition, when there is one.
    pub fn to_object(&self) -> Result<EllipticObject, String> {
        match self {
            ConditionObject::Curve { class, .. } if class.is_zero() => Ok(EllipticObject::zero()),
            ConditionObject::Curve { class, shift } => {
                Atom::new(class.clone(), *shift, Vec::new()).map(EllipticObject::single).map_err(|e| e.to_string())
            }
            ConditionObject::Elliptic { object } => Ok(object.clone()),
            ConditionObject::Surface { class } => Err(format!("surface class {class} has no curve hom oracle")),
            ConditionObject::Symbolic { name, .. } => Err(format!("symbolic object {name} has no hom oracle")),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            ConditionObject::Curve { class, .. } => class.is_zero(),
            ConditionObject::Elliptic { object } => object.is_zero(),
            ConditionObject::Surface { class } => *class == SurfaceClass::zero(),
            ConditionObject::Symbolic { .. } => false,
        }
    }

    fn describe(&self) -> String {
        match self {
            ConditionObject::Curve { class, shift } => format!("{class}@{shift}"),
            ConditionObject::Elliptic { object } => object.to_string(),
            ConditionObject::Surface { class } => class.to_string(),
            ConditionObject::Symbolic { name, .. } => name.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Exactly(#[serde(with = "serde_int")] Int),
    Free,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Others {
    #[default]
    Zero,
    Free,
}

/// Expected `N^j` by degree; unlisted degrees follow `others`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedTable {
    pub entries: BTreeMap<i64, Expect>,
    #[serde(default)]
    pub others: Others,
}

impl ExpectedTable {
    pub fn new(entries: impl IntoIterator<Item = (i64, Expect)>, others: Others) -> Self {
        ExpectedTable { entries: entries.into_iter().collect(), others }
    }

    /// `{degree: value}`, zero elsewhere.
    pub fn single(degree: i64, value: Int) -> Self {
        Self::new([(degree, Expect::Exactly(value))], Others::Zero)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn at(&self, degree: i64) -> Option<Int> {
        match self.entries.get(&degree) {
            Some(Expect::Exactly(v)) => Some(v.clone()),
            Some(Expect::Free) => None,
            None => match self.others {
                Others::Zero => Some(Int::zero()),
                Others::Free => None,
            },
        }
    }

    pub fn fully_constrained(&self) -> bool {
        self.others == Others::Zero && self.entries.values().all(|e| matches!(e, Expect::Exactly(_)))
    }

    /// `Σ (−1)^j N^j` when every degree is fixed.
    pub fn chi(&self) -> Option<Int> {
        self.fully_constrained().then(|| {
            self.entries.iter().fold(Int::zero(), |acc, (j, e)| match e {
                Expect::Exactly(v) if j.rem_euclid(2) == 0 => acc + v,
                Expect::Exactly(v) => acc - v,
                Expect::Free => acc,
            })
        })
    }

    fn validate(&self) -> Result<(), String> {
        for (j, e) in &self.entries {
            if let Expect::Exactly(v) = e {
                if v.is_negative() {
                    return Err(format!("expected dimension {v} in degree {j} is negative"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub index: i64,
    pub label: String,
    pub object: ConditionObject,
    pub direction: Direction,
    pub expected: ExpectedTable,
}

/// Existence of `ψ: source → target` with the test object orthogonal to
/// `cone(ψ)` in the given direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeDatum {
    pub source: ConditionObject,
    pub target: ConditionObject,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PDatum {
    pub name: String,
    pub context: DatumContext,
    pub conditions: Vec<Condition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeDatum>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl PDatum {
    pub fn condition(&self, index: i64) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.index == index)
    }

    /// Indices taking part in the convolution.
    pub fn active_indices(&self) -> Vec<i64> {
        self.conditions.iter().map(|c| c.index).filter(|&i| i > 0).collect()
    }

    pub fn passive_indices(&self) -> Vec<i64> {
        self.conditions.iter().map(|c| c.index).filter(|&i| i <= 0).collect()
    }

    pub fn validate(&self) -> Result<(), PStabError> {
        let mut seen = BTreeSet::new();
        for c in &self.conditions {
            if !seen.insert(c.index) {
                return Err(PStabError::InvalidDatum(format!("index {} appears twice", c.index)));
            }
            c.expected.validate().map_err(|e| PStabError::InvalidDatum(format!("condition {}: {e}", c.index)))?;
            let surface_obj = matches!(c.object, ConditionObject::Surface { .. });
            let curve_obj = matches!(c.object, ConditionObject::Curve { .. } | ConditionObject::Elliptic { .. });
            match &self.context {
                DatumContext::Curve(_) if surface_obj => {
                    return Err(PStabError::InvalidDatum(format!(
                        "condition {} is a surface class on a curve",
                        c.index
                    )))
                }
                DatumContext::Surface if curve_obj => {
                    return Err(PStabError::InvalidDatum(format!(
                        "condition {} is a curve object on a surface",
                        c.index
                    )))
                }
                _ => {}
            }
        }
        if let DatumContext::Curve(ctx) = &self.context {
            ctx.validate()?;
        }
        Ok(())
    }

    /// Conditions whose objects are all zero constrain nothing.
    pub fn is_trivial(&self) -> bool {
        self.cone.is_none() && self.conditions.iter().all(|c| c.object.is_zero())
    }
}

/// User-supplied hom dimensions per condition index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomTable {
    pub rows: BTreeMap<i64, HomRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomRow {
    pub direction: Direction,
    /// Absent degrees are zero.
    #[serde(with = "degree_map")]
    pub values: BTreeMap<i64, Int>,
}

impl HomTable {
    pub fn insert(&mut self, index: i64, direction: Direction, values: impl IntoIterator<Item = (i64, Int)>) {
        let values = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        self.rows.insert(index, HomRow { direction, values });
    }

    /// Absent rows and degrees are zero.
    fn graded(&self, index: i64, direction: Direction) -> Result<GradedHom, PStabError> {
        match self.rows.get(&index) {
            None => Ok(GradedHom::Determined(BTreeMap::new())),
            Some(row) if row.direction != direction => Err(PStabError::InvalidDatum(format!(
                "table row {index} is {:?} but the condition is {:?}",
                row.direction, direction
            ))),
            Some(row) => {
                if let Some((j, v)) = row.values.iter().find(|(_, v)| v.is_negative()) {
                    return Err(PStabError::InvalidDatum(format!("table entry ({index}, {j}) = {v} is negative")));
                }
                Ok(GradedHom::Determined(row.values.clone()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestObject {
    Atoms { object: EllipticObject },
    Table { table: HomTable },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DiffAt {
    Degree(i64),
    EulerCharacteristic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diff {
    pub index: i64,
    pub at: DiffAt,
    #[serde(with = "serde_int")]
    pub expected: Int,
    #[serde(with = "serde_int")]
    pub actual: Int,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blocking {
    pub index: Option<i64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub index: i64,
    pub label: String,
    pub direction: Direction,
    pub object: String,
    pub actual: Option<GradedHom>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orthogonality {
    /// Both endpoints are orthogonal, so every cone is.
    Proven,
    /// A generic cone (a semistable sheaf up to shift, with support away from
    /// the test object) is orthogonal.
    GenericRepresentative,
    /// Only `χ = 0` is known.
    NumericOnly,
    /// `χ ≠ 0`, so no cone is orthogonal.
    Violated,
    NotEvaluated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeReport {
    /// `[target] − [source]` when both are curve objects.
    pub cone_class: Option<CurveClass>,
    pub representative: Option<EllipticObject>,
    #[serde(with = "crate::numerics::serde_int::option")]
    pub chi: Option<Int>,
    pub consistent: bool,
    pub orthogonality: Orthogonality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub rows: Vec<ConditionRow>,
    pub diffs: Vec<Diff>,
    pub blocking: Vec<Blocking>,
    pub cone: Option<ConeReport>,
    pub warnings: Vec<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status == VerdictStatus::Pass
    }
}

fn curve_ctx(datum: &PDatum) -> Result<&CurveCtx, PStabError> {
    match &datum.context {
        DatumContext::Curve(ctx) => Ok(ctx),
        DatumContext::Surface => {
            Err(PStabError::InvalidDatum("atom objects need a curve context; use a hom table on a surface".into()))
        }
    }
}

fn hom_in_direction(
    ctx: &CurveCtx,
    direction: Direction,
    c: &EllipticObject,
    x: &EllipticObject,
) -> Result<GradedHom, EllipticError> {
    match direction {
        Direction::Covariant => object_hom(ctx, c, x),
        Direction::Contravariant => object_hom(ctx, x, c),
    }
}

fn compare(index: i64, expected: &ExpectedTable, actual: &GradedHom) -> (Vec<Diff>, Vec<Blocking>) {
    let mut diffs = Vec::new();
    let mut blocking = Vec::new();
    match actual {
        GradedHom::Determined(map) => {
            let degrees: BTreeSet<i64> = expected.entries.keys().chain(map.keys()).copied().collect();
            for j in degrees {
                let got = map.get(&j).cloned().unwrap_or_else(Int::zero);
                if let Some(want) = expected.at(j) {
                    if want != got {
                        diffs.push(Diff { index, at: DiffAt::Degree(j), expected: want, actual: got });
                    }
                }
            }
        }
        GradedHom::Indeterminate { chi, reasons } => match expected.chi() {
            Some(want) if &want != chi => {
                diffs.push(Diff { index, at: DiffAt::EulerCharacteristic, expected: want, actual: chi.clone() })
            }
            _ => blocking.push(Blocking { index: Some(index), reason: reasons.join("; ") }),
        },
    }
    (diffs, blocking)
}

fn fresh_labels(n: usize, taken: &BTreeSet<PointLabel>) -> Result<Vec<PointLabel>, EllipticError> {
    let mut out = Vec::with_capacity(n);
    let mut k = 1;
    while out.len() < n {
        let l = PointLabel::new(format!("psi{k}"))?;
        if !taken.contains(&l) && !taken.contains(&l.negated()) {
            out.push(l);
        }
        k += 1;
    }
    Ok(out)
}

/// A sheaf (up to shift) in the cone class, with generic support when the
/// class is torsion or of degree zero on an elliptic curve.
fn generic_cone(
    ctx: &CurveCtx,
    source: &EllipticObject,
    target: &EllipticObject,
    x: &EllipticObject,
) -> Result<Option<EllipticObject>, EllipticError> {
    let shifts: BTreeSet<i64> = source.atoms().iter().chain(target.atoms()).map(Atom::shift).collect();
    let base = match shifts.len() {
        0 => 0,
        1 => *shifts.iter().next().unwrap_or(&0),
        _ => return Ok(None),
    };
    let signed = &target.kclass() - &source.kclass();
    if signed.is_zero() {
        return Ok(Some(EllipticObject::zero()));
    }
    let at_base = signed.shifted(base);
    let (class, shift) = if at_base.is_sheaf_class() {
        (at_base, base)
    } else if (-&at_base).is_sheaf_class() {
        (-&at_base, base - 1)
    } else {
        return Ok(None);
    };
    let taken: BTreeSet<PointLabel> = x.support().into_iter().collect();
    let support = if class.is_torsion() {
        fresh_labels(crate::numerics::to_i64(&class.degree).unwrap_or(0) as usize, &taken)?
    } else if class.degree.is_zero() && ctx.genus == 1 {
        fresh_labels(crate::numerics::to_i64(&class.rank).unwrap_or(0) as usize, &taken)?
    } else {
        Vec::new()
    };
    Ok(Some(EllipticObject::single(Atom::new(class, shift, support)?)))
}

fn cone_report_atoms(ctx: &CurveCtx, cone: &ConeDatum, x: &EllipticObject) -> Result<ConeReport, PStabError> {
    let rep = |o: &ConditionObject| {
        o.to_object().map_err(|reason| PStabError::InvalidDatum(format!("cone endpoint: {reason}")))
    };
    let (a, b) = (rep(&cone.source)?, rep(&cone.target)?);
    let ha = hom_in_direction(ctx, cone.direction, &a, x)?;
    let hb = hom_in_direction(ctx, cone.direction, &b, x)?;
    let chi = hb.chi() - ha.chi();
    let consistent = chi.is_zero();
    let mut representative = None;
    let orthogonality = if ha.is_zero() && hb.is_zero() {
        Orthogonality::Proven
    } else if !consistent {
        Orthogonality::Violated
    } else {
        representative = generic_cone(ctx, &a, &b, x)?;
        match &representative {
            Some(r) if hom_in_direction(ctx, cone.direction, r, x)?.is_zero() => Orthogonality::GenericRepresentative,
            _ => Orthogonality::NumericOnly,
        }
    };
    Ok(ConeReport {
        cone_class: Some(&b.kclass() - &a.kclass()),
        representative,
        chi: Some(chi),
        consistent,
        orthogonality,
    })
}

/// Locates a cone endpoint among the conditions, allowing a shift for curve
/// objects, and returns `(index, shift)` with `endpoint = object[−shift]`.
fn match_condition(datum: &PDatum, endpoint: &ConditionObject, direction: Direction) -> Option<(i64, i64)> {
    datum.conditions.iter().filter(|c| c.direction == direction).find_map(|c| {
        if &c.object == endpoint {
            return Some((c.index, 0));
        }
        let (e, o) = (endpoint.to_object().ok()?, c.object.to_object().ok()?);
        (-4..=4).find(|&k| e == o.shifted(k)).map(|k| (c.index, k))
    })
}

fn cone_report_table(datum: &PDatum, cone: &ConeDatum, table: &HomTable) -> Result<ConeReport, PStabError> {
    let endpoint = |o: &ConditionObject| -> Result<Option<GradedHom>, PStabError> {
        match match_condition(datum, o, cone.direction) {
            None => Ok(None),
            Some((index, k)) => {
                let g = table.graded(index, cone.direction)?;
                Ok(Some(if k.rem_euclid(2) == 0 {
                    g
                } else {
                    GradedHom::Indeterminate { chi: -g.chi(), reasons: vec![] }
                }))
            }
        }
    };
    let cone_class = match (cone.source.to_object(), cone.target.to_object()) {
        (Ok(a), Ok(b)) => Some(&b.kclass() - &a.kclass()),
        _ => None,
    };
    let (Some(ha), Some(hb)) = (endpoint(&cone.source)?, endpoint(&cone.target)?) else {
        return Ok(ConeReport {
            cone_class,
            representative: None,
            chi: None,
            consistent: false,
            orthogonality: Orthogonality::NotEvaluated,
        });
    };
    let chi = hb.chi() - ha.chi();
    let consistent = chi.is_zero();
    let orthogonality = if ha.is_zero() && hb.is_zero() {
        Orthogonality::Proven
    } else if consistent {
        Orthogonality::NumericOnly
    } else {
        Orthogonality::Violated
    };
    Ok(ConeReport { cone_class, representative: None, chi: Some(chi), consistent, orthogonality })
}

type ConditionOutcome = Result<(ConditionRow, Vec<Diff>, Vec<Blocking>), PStabError>;

/// Compares the object's hom tables with the datum.
pub fn check_object(datum: &PDatum, object: &TestObject) -> Result<Verdict, PStabError> {
    datum.validate()?;
    let per_condition: Vec<ConditionOutcome> = datum
        .conditions
        .par_iter()
        .map(|c| {
            let actual = match object {
                TestObject::Atoms { object: x } => {
                    let ctx = curve_ctx(datum)?;
                    match c.object.to_object() {
                        Ok(o) => Some(hom_in_direction(ctx, c.direction, &o, x)?),
                        Err(_) => None,
                    }
                }
                TestObject::Table { table } => Some(table.graded(c.index, c.direction)?),
            };
            let (diffs, blocking) = match &actual {
                Some(a) => compare(c.index, &c.expected, a),
                None => (
                    Vec::new(),
                    vec![Blocking {
                        index: Some(c.index),
                        reason: format!("no hom oracle for {}", c.object.describe()),
                    }],
                ),
            };
            let row = ConditionRow {
                index: c.index,
                label: c.label.clone(),
                direction: c.direction,
                object: c.object.describe(),
                actual,
            };
            Ok((row, diffs, blocking))
        })
        .collect();

    let mut rows = Vec::new();
    let mut diffs = Vec::new();
    let mut blocking = Vec::new();
    for r in per_condition {
        let (row, d, b) = r?;
        rows.push(row);
        diffs.extend(d);
        blocking.extend(b);
    }
    rows.sort_by_key(|r| std::cmp::Reverse(r.index));
    diffs.sort_by_key(|d| (d.index, d.at));
    blocking.sort_by_key(|b| b.index);

    let cone = match (&datum.cone, object) {
        (None, _) => None,
        (Some(cone), TestObject::Atoms { object: x }) => Some(cone_report_atoms(curve_ctx(datum)?, cone, x)?),
        (Some(cone), TestObject::Table { table }) => Some(cone_report_table(datum, cone, table)?),
    };
    if let Some(c) = &cone {
        if c.orthogonality == Orthogonality::NotEvaluated {
            blocking.push(Blocking { index: None, reason: "cone endpoints are not rows of the table".into() });
        }
    }

    let mut warnings = Vec::new();
    if datum.is_trivial() {
        warnings.push("trivial datum: no condition constrains the object".into());
    }
    let cone_failed = cone.as_ref().is_some_and(|c| c.orthogonality == Orthogonality::Violated);
    let status = if !diffs.is_empty() || cone_failed {
        VerdictStatus::Fail
    } else if !blocking.is_empty() {
        VerdictStatus::Indeterminate
    } else {
        VerdictStatus::Pass
    };
    Ok(Verdict { status, rows, diffs, blocking, cone, warnings })
}

/// Hom table of an atom object against every condition, when all entries
/// are determined.
pub fn hom_table_of(datum: &PDatum, x: &EllipticObject) -> Result<Option<HomTable>, PStabError> {
    let ctx = curve_ctx(datum)?;
    let mut table = HomTable::default();
    for c in &datum.conditions {
        let Ok(o) = c.object.to_object() else { return Ok(None) };
        match hom_in_direction(ctx, c.direction, &o, x)? {
            GradedHom::Determined(m) => table.insert(c.index, c.direction, m),
            GradedHom::Indeterminate { .. } => return Ok(None),
        }
    }
    Ok(Some(table))
}

fn polarised(ctx: &CurveCtx) -> Result<i64, PStabError> {
    ctx.validate()?;
    ctx.polarisation_degree.ok_or_else(|| PStabError::Precondition("the datum needs a polarisation degree D".into()))
}

/// Passive datum for semistable bundles of rank `r`, degree `d` on a curve
/// polarised by a line bundle `L` of degree `D`.
pub fn gen_datum_prop12(ctx: &CurveCtx, r: i64, d: i64) -> Result<PDatum, PStabError> {
    let big_d = polarised(ctx)?;
    if r < 1 {
        return Err(PStabError::Precondition(format!("r must be positive, got {r}")));
    }
    let g = ctx.genus as i64;
    let bound = (2 * g - 2 + big_d) * r;
    if d <= bound {
        return Err(PStabError::Precondition(format!("need d > (2g-2+D)r = {bound}, got d = {d}")));
    }
    let h0 = int(d) - int(r) * int(g - 1);
    let h0_twist = int(d) - int(r) * int(g - 1 - big_d);
    let h0_dual = int(d) - int(r) * int(g - 1 + big_d);
    let k = int(r) * int(g - 1 - big_d) - int(d);
    let frd = f_rd_class(ctx, r, d)?;
    let conditions = vec![
        Condition {
            index: 0,
            label: "O".into(),
            object: ConditionObject::curve(1, 0, 0),
            direction: Direction::Covariant,
            expected: ExpectedTable::single(0, h0.clone()),
        },
        Condition {
            index: -1,
            label: "L^v".into(),
            object: ConditionObject::curve(1, -big_d, 0),
            direction: Direction::Covariant,
            expected: ExpectedTable::single(0, h0_twist.clone()),
        },
        Condition {
            index: -2,
            label: format!("L^{k}"),
            object: ConditionObject::Curve { class: CurveClass::new(int(1), &k * int(big_d)), shift: 0 },
            direction: Direction::Covariant,
            expected: ExpectedTable::new([(0, Expect::Free)], Others::Zero),
        },
        Condition {
            index: -3,
            label: "F_{r,d}".into(),
            object: ConditionObject::Curve { class: frd.f.clone(), shift: 0 },
            direction: Direction::Contravariant,
            expected: ExpectedTable::new([(0, Expect::Exactly(Int::zero()))], Others::Free),
        },
    ];
    let metadata = BTreeMap::from([
        ("object_class".into(), CurveClass::from_i64(r, d).to_string()),
        ("hom_O_e".into(), h0.to_string()),
        ("hom_L_e_twist_reading".into(), h0_twist.to_string()),
        ("hom_L_e_dual_reading".into(), h0_dual.to_string()),
        ("hom_L_e_used".into(), "twist reading: hom(L^v, e) = h^0(E(1))".into()),
        ("tensor_power_k".into(), k.to_string()),
    ]);
    Ok(PDatum {
        name: format!("prop12(g={g}, D={big_d}, r={r}, d={d})"),
        context: DatumContext::Curve(*ctx),
        conditions,
        cone: None,
        metadata,
    })
}

/// Datum whose objects are `e` of class `(r, −d)`, with the active pair
/// `A → B` and the expected theta degree.
pub fn gen_datum_prop14(ctx: &CurveCtx, r: i64, d: i64) -> Result<PDatum, PStabError> {
    ctx.validate()?;
    if r < 1 {
        return Err(PStabError::Precondition(format!("r must be positive, got {r}")));
    }
    let value = theta_degree_general(ctx.genus, r, d)?;
    let (a, b, _) = frd_pair(ctx, r, d)?;
    let cond = |index: i64, label: &str, class: &CurveClass| Condition {
        index,
        label: label.into(),
        object: ConditionObject::Curve { class: class.clone(), shift: -1 },
        direction: Direction::Contravariant,
        expected: ExpectedTable::single(0, value.clone()),
    };
    let metadata = BTreeMap::from([
        ("object_class".into(), CurveClass::from_i64(r, -d).to_string()),
        ("expected_value".into(), value.to_string()),
        ("A".into(), a.to_string()),
        ("B".into(), b.to_string()),
    ]);
    Ok(PDatum {
        name: format!("prop14(g={}, r={r}, d={d})", ctx.genus),
        context: DatumContext::Curve(*ctx),
        conditions: vec![cond(1, "A[1]", &a), cond(0, "B[1]", &b)],
        cone: Some(ConeDatum {
            source: ConditionObject::Curve { class: a, shift: 0 },
            target: ConditionObject::Curve { class: b, shift: 0 },
            direction: Direction::Contravariant,
        }),
        metadata,
    })
}

/// Datum for torsion sheaves of length `r` on an elliptic curve, built on
/// `α: O(−3P) → O`.
pub fn gen_datum_elliptic_torsion(r: i64) -> Result<PDatum, PStabError> {
    if r < 1 {
        return Err(PStabError::Precondition(format!("r must be positive, got {r}")));
    }
    let m1 = EllipticObject::single(Atom::bundle(1, -3, 0)?);
    let m0 = EllipticObject::single(Atom::structure_sheaf());
    let cond = |index: i64, label: &str, object: &EllipticObject| Condition {
        index,
        label: label.into(),
        object: ConditionObject::Elliptic { object: object.clone() },
        direction: Direction::Covariant,
        expected: ExpectedTable::single(0, int(r)),
    };
    Ok(PDatum {
        name: format!("elliptic-torsion(r={r})"),
        context: DatumContext::Curve(CurveCtx::elliptic()),
        conditions: vec![cond(1, "O(-3P)", &m1), cond(0, "O", &m0)],
        cone: Some(ConeDatum {
            source: ConditionObject::Elliptic { object: m1 },
            target: ConditionObject::Elliptic { object: m0 },
            direction: Direction::Covariant,
        }),
        metadata: BTreeMap::from([("object".into(), format!("torsion sheaf of length {r}"))]),
    })
}

fn push_object(index: i64, o: &ConditionObject) -> Result<ConditionObject, PStabError> {
    let obj = o.to_object().map_err(|reason| PStabError::Unrepresentable { index, reason })?;
    let image = obj.fm().map_err(|e| PStabError::Unrepresentable { index, reason: e.to_string() })?;
    Ok(ConditionObject::Elliptic { object: image })
}

/// Transports a datum on an elliptic curve along the Fourier–Mukai
/// equivalence. Expected tables are unchanged.
pub fn fm_push_datum(datum: &PDatum) -> Result<PDatum, PStabError> {
    require_elliptic(curve_ctx(datum)?)?;
    let conditions = datum
        .conditions
        .iter()
        .map(|c| {
            Ok(Condition { object: push_object(c.index, &c.object)?, label: format!("FM({})", c.label), ..c.clone() })
        })
        .collect::<Result<Vec<_>, PStabError>>()?;
    let cone = datum
        .cone
        .as_ref()
        .map(|c| {
            Ok::<_, PStabError>(ConeDatum {
                source: push_object(i64::MAX, &c.source)?,
                target: push_object(i64::MIN, &c.target)?,
                direction: c.direction,
            })
        })
        .transpose()?;
    let mut metadata = datum.metadata.clone();
    let depth = metadata.get("fm_depth").and_then(|v| v.parse::<u32>().ok()).unwrap_or(0) + 1;
    metadata.insert("fm_depth".into(), depth.to_string());
    Ok(PDatum { name: format!("FM({})", datum.name), context: datum.context.clone(), conditions, cone, metadata })
}

/// Elliptic datum for semistable rank-`r` degree-0 bundles.
pub fn gen_datum_elliptic_bundle(r: i64) -> Result<PDatum, PStabError> {
    fm_push_datum(&gen_datum_elliptic_torsion(r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::euler_pairing;
    use crate::elliptic::labels;

    fn torsion(names: &[&str]) -> TestObject {
        TestObject::Atoms {
            object: EllipticObject::torsion_from_points(&labels(names.iter().copied()).unwrap()).unwrap(),
        }
    }

    fn atoms(a: Atom) -> TestObject {
        TestObject::Atoms { object: EllipticObject::single(a) }
    }

    #[test]
    fn prop12_examples() {
        let ctx = CurveCtx::with_polarisation(2, 5).unwrap();
        let dat = gen_datum_prop12(&ctx, 2, 15).unwrap();
        assert_eq!(dat.condition(0).unwrap().expected.at(0), Some(int(13)));
        assert_eq!(euler_pairing(&ctx, &CurveClass::from_i64(1, 0), &CurveClass::from_i64(2, 15)), int(13));
        assert_eq!(dat.metadata["hom_L_e_twist_reading"], "23");
        assert_eq!(dat.metadata["hom_L_e_dual_reading"], "3");
        let ctx1 = CurveCtx::with_polarisation(1, 1).unwrap();
        let dat1 = gen_datum_prop12(&ctx1, 1, 2).unwrap();
        assert_eq!(dat1.condition(0).unwrap().expected.at(0), Some(int(2)));
        assert!(gen_datum_prop12(&ctx, 2, 14).is_err());
        assert!(gen_datum_prop12(&CurveCtx::new(2), 2, 15).is_err());
    }

    #[test]
    fn prop12_pass_and_fail() {
        let ctx = CurveCtx::with_polarisation(2, 5).unwrap();
        let dat = gen_datum_prop12(&ctx, 2, 15).unwrap();
        let v = check_object(&dat, &atoms(Atom::bundle(2, 15, 0).unwrap())).unwrap();
        assert!(v.passed(), "{v:?}");
        assert!(v.cone.is_none());
        for (r, d) in [(2, 16), (1, 15), (3, 15), (0, 13)] {
            let x = if r == 0 {
                let pts: Vec<String> = (0..d).map(|i| format!("P{i}")).collect();
                torsion(&pts.iter().map(String::as_str).collect::<Vec<_>>())
            } else {
                atoms(Atom::bundle(r, d, 0).unwrap())
            };
            let v = check_object(&dat, &x).unwrap();
            assert_eq!(v.status, VerdictStatus::Fail, "({r},{d})");
        }
    }

    #[test]
    fn prop14_examples() {
        let dat = gen_datum_prop14(&CurveCtx::new(2), 2, 3).unwrap();
        let a = dat.condition(1).unwrap();
        assert_eq!(a.expected.at(0), Some(int(45)));
        assert_eq!(a.object, ConditionObject::curve(1, -23, -1));
        assert_eq!(dat.condition(0).unwrap().object, ConditionObject::curve(5, -25, -1));
        let e = CurveClass::from_i64(2, -3);
        let ctx = CurveCtx::new(2);
        assert_eq!(euler_pairing(&ctx, &e, &CurveClass::from_i64(1, -23)), int(-45));
        assert_eq!(euler_pairing(&ctx, &e, &CurveClass::from_i64(5, -25)), int(-45));

        let v = check_object(&dat, &atoms(Atom::bundle(2, -3, 0).unwrap())).unwrap();
        assert!(v.passed(), "{v:?}");
        let cone = v.cone.unwrap();
        assert_eq!(cone.cone_class, Some(CurveClass::from_i64(4, -2)));
        assert_eq!(cone.orthogonality, Orthogonality::NumericOnly);

        let dat = gen_datum_prop14(&CurveCtx::new(1), 1, 0).unwrap();
        assert_eq!(dat.condition(1).unwrap().expected.at(0), Some(int(4)));
        assert_eq!(dat.condition(1).unwrap().object, ConditionObject::curve(1, -4, -1));
    }

    #[test]
    fn elliptic_torsion_examples() {
        let dat = gen_datum_elliptic_torsion(2).unwrap();
        let v = check_object(&dat, &torsion(&["P", "Q"])).unwrap();
        assert!(v.passed(), "{v:?}");
        let cone = v.cone.unwrap();
        assert_eq!(cone.cone_class, Some(CurveClass::from_i64(0, 3)));
        assert_eq!(cone.orthogonality, Orthogonality::GenericRepresentative);

        let v = check_object(&dat, &torsion(&["P", "Q", "R"])).unwrap();
        assert_eq!(v.status, VerdictStatus::Fail);
        assert!(v.diffs.contains(&Diff { index: 0, at: DiffAt::Degree(0), expected: int(2), actual: int(3) }));
        assert_eq!(v.diffs.len(), 2);

        let ctx = CurveCtx::elliptic();
        assert_eq!(euler_pairing(&ctx, &CurveClass::from_i64(1, -3), &CurveClass::from_i64(0, 2)), int(2));
        assert_eq!(euler_pairing(&ctx, &CurveClass::from_i64(1, 0), &CurveClass::from_i64(0, 2)), int(2));
    }

    #[test]
    fn fm_push_examples() {
        let pushed = fm_push_datum(&gen_datum_elliptic_torsion(2).unwrap()).unwrap();
        let m1 = pushed.condition(1).unwrap().object.to_object().unwrap();
        let m0 = pushed.condition(0).unwrap().object.to_object().unwrap();
        assert_eq!(m1.kclass(), CurveClass::from_i64(-3, -1));
        assert_eq!(m0.kclass(), CurveClass::from_i64(0, -1));
        assert_eq!(m1.atoms()[0].shift(), 1);
        assert_eq!(pushed.condition(1).unwrap().expected.at(0), Some(int(2)));

        let v = check_object(&pushed, &atoms(Atom::bundle(2, 0, 0).unwrap())).unwrap();
        assert!(v.passed(), "{v:?}");
        let cone = v.cone.unwrap();
        assert_eq!(cone.cone_class, Some(CurveClass::from_i64(3, 0)));
        assert_eq!(cone.orthogonality, Orthogonality::NumericOnly);

        let labelled = Atom::new(CurveClass::from_i64(2, 0), 0, labels(["P", "Q"]).unwrap()).unwrap();
        let v = check_object(&pushed, &atoms(labelled)).unwrap();
        assert!(v.passed());
        assert_eq!(v.cone.unwrap().orthogonality, Orthogonality::GenericRepresentative);

        let v = check_object(&pushed, &atoms(Atom::bundle(3, 0, 0).unwrap())).unwrap();
        assert_eq!(v.status, VerdictStatus::Fail);

        assert!(fm_push_datum(&gen_datum_prop14(&CurveCtx::new(2), 2, 3).unwrap()).is_err());
    }

    #[test]
    fn unrepresentable_condition() {
        let mut dat = gen_datum_elliptic_torsion(1).unwrap();
        dat.conditions.push(Condition {
            index: -1,
            label: "E0".into(),
            object: ConditionObject::curve(2, 0, 0),
            direction: Direction::Covariant,
            expected: ExpectedTable::zero(),
        });
        assert!(matches!(fm_push_datum(&dat), Err(PStabError::Unrepresentable { index: -1, .. })));
    }

    #[test]
    fn indeterminate_when_equal_slopes_leave_free_entries() {
        let ctx = CurveCtx::new(2);
        let dat = PDatum {
            name: "t".into(),
            context: DatumContext::Curve(ctx),
            conditions: vec![Condition {
                index: 0,
                label: "E".into(),
                object: ConditionObject::curve(2, 1, 0),
                direction: Direction::Covariant,
                expected: ExpectedTable::new([(0, Expect::Exactly(int(0)))], Others::Free),
            }],
            cone: None,
            metadata: BTreeMap::new(),
        };
        let v = check_object(&dat, &atoms(Atom::bundle(2, 1, 0).unwrap())).unwrap();
        assert_eq!(v.status, VerdictStatus::Indeterminate);
        assert_eq!(v.blocking.len(), 1);
    }

    #[test]
    fn trivial_datum_warns() {
        let dat = PDatum {
            name: "empty".into(),
            context: DatumContext::Curve(CurveCtx::elliptic()),
            conditions: vec![],
            cone: None,
            metadata: BTreeMap::new(),
        };
        let v = check_object(&dat, &torsion(&["P"])).unwrap();
        assert!(v.passed());
        assert_eq!(v.warnings.len(), 1);
    }

    #[test]
    fn table_objects() {
        let dat = gen_datum_elliptic_torsion(2).unwrap();
        let obj = EllipticObject::torsion_from_points(&labels(["P", "Q"]).unwrap()).unwrap();
        let table = hom_table_of(&dat, &obj).unwrap().unwrap();
        let v = check_object(&dat, &TestObject::Table { table: table.clone() }).unwrap();
        assert!(v.passed(), "{v:?}");
        assert_eq!(v.cone.as_ref().unwrap().orthogonality, Orthogonality::NumericOnly);

        let mut bad = table.clone();
        bad.insert(1, Direction::Covariant, [(0, int(1))]);
        let v = check_object(&dat, &TestObject::Table { table: bad }).unwrap();
        assert_eq!(v.status, VerdictStatus::Fail);

        let mut wrong_dir = table;
        wrong_dir.insert(1, Direction::Contravariant, [(0, int(2))]);
        assert!(check_object(&dat, &TestObject::Table { table: wrong_dir }).is_err());
    }

    #[test]
    fn surface_datum_with_table() {
        let dat = PDatum {
            name: "surface".into(),
            context: DatumContext::Surface,
            conditions: vec![Condition {
                index: -1,
                label: "O".into(),
                object: ConditionObject::Surface { class: SurfaceClass::unit() },
                direction: Direction::Covariant,
                expected: ExpectedTable::single(0, int(3)),
            }],
            cone: None,
            metadata: BTreeMap::new(),
        };
        let mut t = HomTable::default();
        t.insert(-1, Direction::Covariant, [(0, int(3))]);
        assert!(check_object(&dat, &TestObject::Table { table: t }).unwrap().passed());
        assert!(check_object(&dat, &torsion(&["P"])).is_err());
    }

    #[test]
    fn datum_serde_roundtrip() {
        for dat in [
            gen_datum_prop12(&CurveCtx::with_polarisation(2, 5).unwrap(), 2, 15).unwrap(),
            gen_datum_prop14(&CurveCtx::new(2), 2, 3).unwrap(),
            gen_datum_elliptic_bundle(3).unwrap(),
        ] {
            let s = serde_json::to_string(&dat).unwrap();
            let back: PDatum = serde_json::from_str(&s).unwrap();
            assert_eq!(back, dat);
        }
        let v = check_object(&gen_datum_elliptic_torsion(2).unwrap(), &torsion(&["P", "Q"])).unwrap();
        let back: Verdict = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn invalid_data_rejected() {
        let mut dat = gen_datum_elliptic_torsion(2).unwrap();
        dat.conditions[0].expected = ExpectedTable::single(0, int(-1));
        assert!(check_object(&dat, &torsion(&["P"])).is_err());
        let mut dat = gen_datum_elliptic_torsion(2).unwrap();
        dat.conditions[1].index = 1;
        assert!(check_object(&dat, &torsion(&["P"])).is_err());
    }
}
