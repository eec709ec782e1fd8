//! Command-line front end. The binary is a thin wrapper around [`run`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::checks::all_checks;
use crate::curve::{euler_pairing, hom_dims_semistable, twist, CurveClass, CurveCtx, DeclaredClass};
use crate::elliptic::{
    fm_kclass, labels, p_class_max_isoclasses, theta_degree_general, theta_torsion, Atom, EllipticObject,
};
use crate::numerics::IntPoly;
use crate::pstability::{
    check_object, gen_datum_elliptic_bundle, gen_datum_elliptic_torsion, gen_datum_prop12, gen_datum_prop14,
    DatumContext, HomTable, PDatum, TestObject, VerdictStatus,
};
use crate::sheaf::{
    f_rd_class, frd_slope_check, gen_sheaf_conditions, gen_surface_pipeline, lemma51_bound, lemma54_threshold,
    sm_rank_det, SurfaceConstants,
};
use crate::surface::{m1_m2_invariants, torsionfree_forms, verify_exa_sheaf_lemma, verify_torsionfree_lemma};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {message}")]
    Document { path: String, message: String },
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "pstab", version, about = "Exact checks for Postnikov-stability data", disable_help_subcommand = true)]
pub struct Cli {
    /// Print the machine-readable JSON report instead of the table.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Euler pairing and slope-forced hom dimensions: g= a=r,d b=r,d
    Pairing { params: Vec<String> },
    /// Fourier-Mukai action on an elliptic curve: class=r,d or --input DOC
    Fm {
        #[arg(long)]
        input: Option<PathBuf>,
        params: Vec<String>,
    },
    /// Generate a datum document
    GenDatum {
        kind: DatumKind,
        /// Also write the datum document to this path.
        #[arg(long)]
        out: Option<PathBuf>,
        params: Vec<String>,
    },
    /// Check an object against a datum
    Check {
        #[arg(long)]
        datum: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        params: Vec<String>,
    },
    /// Theta divisor degrees: g= r= d=, points=P,Q, partitions=r
    Theta { params: Vec<String> },
    /// Rank and determinant of S^m(V,O,L): dim_v= m= [dim_u= n=] [hom_bc=]
    Sm { params: Vec<String> },
    /// Class of the orthogonal test bundle F_{r,d}: g= r= d=
    Frd { params: Vec<String> },
    /// Sheaf-condition lists: n= p=c0,c1,.. [dim_v=] or p= m0= m1= m2= m3=
    SheafConditions { params: Vec<String> },
    /// Lattice computations on P1 x C
    VerifySurface { params: Vec<String> },
    /// Run every self-check
    ReportAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatumKind {
    Prop12,
    Prop14,
    EllipticTorsion,
    EllipticBundle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
    Info,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass | Status::Info => 0,
            Status::Fail => 1,
            Status::Indeterminate => 3,
        }
    }
}

/// Where a reported number comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub anchor: String,
    pub value: String,
}

fn prov(anchor: impl Into<String>, value: impl ToString) -> Provenance {
    Provenance { anchor: anchor.into(), value: value.to_string() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: String,
    pub command: String,
    pub status: Status,
    pub payload: Value,
    pub provenance: Vec<Provenance>,
}

impl Report {
    fn new(command: &str, status: Status, payload: Value, provenance: Vec<Provenance>) -> Self {
        Report { schema_version: SCHEMA_VERSION.into(), command: command.into(), status, payload, provenance }
    }
}

/// Input format shared by every command that reads a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<DatumContext>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objects: Option<Vec<Atom>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<HomTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datum: Option<PDatum>,
}

impl Document {
    pub fn with_datum(datum: PDatum) -> Self {
        Document {
            schema_version: SCHEMA_VERSION.into(),
            context: None,
            objects: None,
            table: None,
            datum: Some(datum),
        }
    }

    pub fn with_objects(context: Option<DatumContext>, atoms: Vec<Atom>) -> Self {
        Document { schema_version: SCHEMA_VERSION.into(), context, objects: Some(atoms), table: None, datum: None }
    }
}

pub fn parse_document(path: &str, text: &str) -> Result<Document, CliError> {
    let doc: Document =
        serde_json::from_str(text).map_err(|e| CliError::Document { path: path.into(), message: e.to_string() })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(CliError::Document {
            path: path.into(),
            message: format!("field schema_version: expected \"{SCHEMA_VERSION}\", got {:?}", doc.schema_version),
        });
    }
    Ok(doc)
}

pub fn load_document(path: &Path) -> Result<Document, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Document { path: shown.clone(), message: e.to_string() })?;
    parse_document(&shown, &text)
}

/// `key=value` parameters, validated against an allow-list.
#[derive(Debug, Default)]
struct Params(BTreeMap<String, String>);

impl Params {
    fn parse(raw: &[String], allowed: &[&str]) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for item in raw {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| invalid(format!("parameter {item:?} is not of the form key=value")))?;
            if !allowed.contains(&k) {
                return Err(invalid(format!("unknown parameter {k:?}; allowed: {}", allowed.join(", "))));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(invalid(format!("parameter {k:?} given twice")));
            }
        }
        Ok(Params(map))
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn i64(&self, key: &str) -> Result<Option<i64>, CliError> {
        self.str(key)
            .map(|v| v.trim().parse::<i64>().map_err(|_| invalid(format!("parameter {key}: {v:?} is not an integer"))))
            .transpose()
    }

    fn req_i64(&self, key: &str) -> Result<i64, CliError> {
        self.i64(key)?.ok_or_else(|| invalid(format!("missing parameter {key}")))
    }

    fn u32(&self, key: &str) -> Result<Option<u32>, CliError> {
        self.i64(key)?
            .map(|v| u32::try_from(v).map_err(|_| invalid(format!("parameter {key} must be nonnegative, got {v}"))))
            .transpose()
    }

    fn ints(&self, key: &str) -> Result<Option<Vec<i64>>, CliError> {
        self.str(key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<i64>()
                            .map_err(|_| invalid(format!("parameter {key}: {v:?} is not a list of integers")))
                    })
                    .collect()
            })
            .transpose()
    }

    fn class(&self, key: &str) -> Result<Option<CurveClass>, CliError> {
        match self.ints(key)? {
            None => Ok(None),
            Some(v) if v.len() == 2 => Ok(Some(CurveClass::from_i64(v[0], v[1]))),
            Some(_) => Err(invalid(format!("parameter {key} must be rank,degree"))),
        }
    }

    fn labels(&self, key: &str) -> Result<Option<Vec<crate::elliptic::PointLabel>>, CliError> {
        self.str(key).map(|v| labels(v.split(',').map(str::trim)).map_err(invalid)).transpose()
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(invalid)
}

fn pairing(p: &Params) -> Result<Report, CliError> {
    let g = p.u32("g")?.unwrap_or(1);
    let a = p.class("a")?.ok_or_else(|| invalid("missing parameter a"))?;
    let b = p.class("b")?.ok_or_else(|| invalid("missing parameter b"))?;
    let ctx = CurveCtx::new(g);
    let chi = euler_pairing(&ctx, &a, &b);
    let serre = -euler_pairing(&ctx, &b, &twist(&a, &ctx.canonical_degree()));
    let hom =
        hom_dims_semistable(&ctx, &DeclaredClass::semistable(a.clone()), &DeclaredClass::semistable(b.clone()), false)
            .map(|h| to_value(&h))
            .unwrap_or_else(|e| Ok(json!({ "kind": "unavailable", "reason": e.to_string() })))?;
    let payload = json!({ "genus": g, "a": a, "b": b, "chi": to_value(&crate::numerics::serde_int::IntRepr(chi.clone()))?,
        "serre_dual_chi": to_value(&crate::numerics::serde_int::IntRepr(serre))?, "hom": hom });
    Ok(Report::new(
        "pairing",
        Status::Info,
        payload,
        vec![prov("Riemann-Roch: rk(a)deg(b) - rk(b)deg(a) + rk(a)rk(b)(1-g)", chi)],
    ))
}

fn fm(input: Option<&Path>, p: &Params) -> Result<Report, CliError> {
    if let Some(path) = input {
        let doc = load_document(path)?;
        let atoms = doc.objects.ok_or_else(|| invalid("the input document has no objects"))?;
        let object = EllipticObject::new(atoms);
        let image = object.fm().map_err(invalid)?;
        let payload = json!({ "object": object, "object_class": object.kclass(), "image": image,
            "image_class": image.kclass() });
        return Ok(Report::new(
            "fm",
            Status::Info,
            payload,
            vec![prov("K-theory action (r, d) -> (d, -r)", image.kclass())],
        ));
    }
    let c = p.class("class")?.ok_or_else(|| invalid("give class=r,d or --input"))?;
    let image = fm_kclass(&c);
    let twice = fm_kclass(&image);
    let payload = json!({ "class": c, "image": image, "image_twice": twice });
    Ok(Report::new("fm", Status::Info, payload, vec![prov("K-theory action (r, d) -> (d, -r)", image)]))
}

fn build_datum(kind: DatumKind, p: &Params) -> Result<PDatum, CliError> {
    match kind {
        DatumKind::Prop12 => {
            let ctx = CurveCtx::with_polarisation(p.u32("g")?.unwrap_or(1), p.req_i64("D")?).map_err(invalid)?;
            gen_datum_prop12(&ctx, p.req_i64("r")?, p.req_i64("d")?).map_err(invalid)
        }
        DatumKind::Prop14 => {
            gen_datum_prop14(&CurveCtx::new(p.u32("g")?.unwrap_or(1)), p.req_i64("r")?, p.req_i64("d")?)
                .map_err(invalid)
        }
        DatumKind::EllipticTorsion => gen_datum_elliptic_torsion(p.req_i64("r")?).map_err(invalid),
        DatumKind::EllipticBundle => gen_datum_elliptic_bundle(p.req_i64("r")?).map_err(invalid),
    }
}

fn datum_keys(kind: DatumKind) -> &'static [&'static str] {
    match kind {
        DatumKind::Prop12 => &["g", "D", "r", "d"],
        DatumKind::Prop14 => &["g", "r", "d"],
        DatumKind::EllipticTorsion | DatumKind::EllipticBundle => &["r"],
    }
}

fn gen_datum(kind: DatumKind, out: Option<&Path>, raw: &[String]) -> Result<Report, CliError> {
    let p = Params::parse(raw, datum_keys(kind))?;
    let datum = build_datum(kind, &p)?;
    let doc = Document::with_datum(datum.clone());
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&doc).map_err(invalid)?;
        std::fs::write(path, text + "\n").map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    }
    let mut provenance = Vec::new();
    for c in &datum.conditions {
        for (j, e) in &c.expected.entries {
            if let crate::pstability::Expect::Exactly(v) = e {
                let anchor = match kind {
                    DatumKind::Prop14 => "theta degree (2g + ceil(d/r) - d/r)(r^3 + r) = -chi((r,-d), A)".to_string(),
                    _ => format!("Riemann-Roch for condition {} ({}) in degree {j}", c.index, c.label),
                };
                provenance.push(prov(anchor, v));
            }
        }
    }
    let payload = json!({ "document": doc });
    Ok(Report::new("gen-datum", Status::Info, payload, provenance))
}

const CHECK_KEYS: [&str; 8] = ["datum", "g", "D", "r", "d", "points", "bundle", "support"];

fn inline_object(p: &Params) -> Result<Option<TestObject>, CliError> {
    if let Some(points) = p.labels("points")? {
        let object = EllipticObject::torsion_from_points(&points).map_err(invalid)?;
        return Ok(Some(TestObject::Atoms { object }));
    }
    if let Some(v) = p.ints("bundle")? {
        let (r, d, s) = match v.as_slice() {
            [r, d] => (*r, *d, 0),
            [r, d, s] => (*r, *d, *s),
            _ => return Err(invalid("parameter bundle must be rank,degree[,shift]")),
        };
        let support = p.labels("support")?.unwrap_or_default();
        let atom = Atom::new(CurveClass::from_i64(r, d), s, support).map_err(invalid)?;
        return Ok(Some(TestObject::Atoms { object: EllipticObject::single(atom) }));
    }
    Ok(None)
}

fn check(datum_path: Option<&Path>, input: Option<&Path>, raw: &[String]) -> Result<Report, CliError> {
    let p = Params::parse(raw, &CHECK_KEYS)?;
    let input_doc = input.map(load_document).transpose()?;
    let datum = if let Some(path) = datum_path {
        load_document(path)?.datum.ok_or_else(|| invalid(format!("{}: no datum", path.display())))?
    } else if let Some(kind) = p.str("datum") {
        let kind = DatumKind::from_str(kind, true).map_err(invalid)?;
        build_datum(kind, &p)?
    } else if let Some(d) = input_doc.as_ref().and_then(|d| d.datum.clone()) {
        d
    } else {
        return Err(invalid("no datum: use --datum DOC, datum=<kind>, or a document with a datum"));
    };
    let object = match (&input_doc, inline_object(&p)?) {
        (_, Some(o)) => o,
        (Some(doc), None) => match (&doc.objects, &doc.table) {
            (Some(atoms), None) => TestObject::Atoms { object: EllipticObject::new(atoms.clone()) },
            (None, Some(t)) => TestObject::Table { table: t.clone() },
            (Some(_), Some(_)) => return Err(invalid("the input document has both objects and a table")),
            (None, None) => return Err(invalid("the input document has neither objects nor a table")),
        },
        (None, None) => return Err(invalid("no object: use --input DOC, points=..., or bundle=r,d")),
    };
    let verdict = check_object(&datum, &object).map_err(invalid)?;
    let status = match verdict.status {
        VerdictStatus::Pass => Status::Pass,
        VerdictStatus::Fail => Status::Fail,
        VerdictStatus::Indeterminate => Status::Indeterminate,
    };
    let mut provenance: Vec<Provenance> = verdict
        .rows
        .iter()
        .filter_map(|r| {
            r.actual.as_ref().map(|a| prov(format!("hom oracle, condition {} ({})", r.index, r.label), a.chi()))
        })
        .collect();
    if let Some(c) = &verdict.cone {
        if let Some(chi) = &c.chi {
            provenance.push(prov("Euler characteristic against the cone class", chi));
        }
    }
    let payload = json!({ "datum": datum.name, "object": object, "verdict": verdict, "diffs": verdict.diffs });
    Ok(Report::new("check", status, payload, provenance))
}

fn theta(p: &Params) -> Result<Report, CliError> {
    let mut payload = serde_json::Map::new();
    let mut provenance = Vec::new();
    if p.has("r") && p.has("d") {
        let g = p.u32("g")?.unwrap_or(1);
        let (r, d) = (p.req_i64("r")?, p.req_i64("d")?);
        let deg = theta_degree_general(g, r, d).map_err(invalid)?;
        provenance.push(prov("(2g + ceil(d/r) - d/r)(r^3 + r)", &deg));
        payload.insert(
            "theta_degree".into(),
            json!({ "g": g, "r": r, "d": d, "degree": to_value(&crate::numerics::serde_int::IntRepr(deg))? }),
        );
    }
    if let Some(points) = p.labels("points")? {
        let t = EllipticObject::torsion_from_points(&points).map_err(invalid)?;
        let div = theta_torsion(&t).map_err(invalid)?;
        provenance.push(prov("one line per support point", &div.degree));
        payload.insert("torsion_divisor".into(), to_value(&div)?);
    }
    if let Some(r) = p.i64("partitions")? {
        let n = p_class_max_isoclasses(r).map_err(invalid)?;
        provenance.push(prov("partition count of r", &n));
        payload.insert(
            "max_isoclasses".into(),
            json!({ "r": r, "count": to_value(&crate::numerics::serde_int::IntRepr(n))? }),
        );
    }
    if payload.is_empty() {
        return Err(invalid("give r= d= [g=], points=..., or partitions=r"));
    }
    Ok(Report::new("theta", Status::Info, Value::Object(payload), provenance))
}

fn sm(p: &Params) -> Result<Report, CliError> {
    let dim_v = p.u32("dim_v")?.ok_or_else(|| invalid("missing parameter dim_v"))?;
    let m = p.u32("m")?.ok_or_else(|| invalid("missing parameter m"))?;
    let s = sm_rank_det(dim_v, m).map_err(invalid)?;
    let mut provenance = vec![
        prov("rank C(m + dim V - 1, m + 1)", &s.rank),
        prov("determinant exponent -C(m + dim V - 1, m)", &s.det_exponent),
    ];
    let mut payload = json!({ "sm": s });
    if p.has("dim_u") || p.has("n") {
        let b = lemma51_bound(p.req_i64("dim_u")?, p.req_i64("n")?).map_err(invalid)?;
        provenance.push(prov("(dim U - 1) n", b));
        payload["kernel_section_bound"] = json!(b);
    }
    if let Some(h) = p.i64("hom_bc")? {
        let t = lemma54_threshold(dim_v as i64, h).map_err(invalid)?;
        provenance.push(prov("max(0, (dim V - 1)(hom(b,c) - 1))", t));
        payload["injectivity_threshold"] = json!(t);
    }
    Ok(Report::new("sm", Status::Info, payload, provenance))
}

fn frd(p: &Params) -> Result<Report, CliError> {
    let ctx = CurveCtx::new(p.u32("g")?.unwrap_or(1));
    let (r, d) = (p.req_i64("r")?, p.req_i64("d")?);
    let f = f_rd_class(&ctx, r, d).map_err(invalid)?;
    let slope = frd_slope_check(&ctx, r, d).map_err(invalid)?;
    let provenance = vec![prov("deg B - deg A = r^2(g-1) - rd", &f.det_exponent), prov("rank r^2", &f.f.rank)];
    Ok(Report::new("frd", Status::Info, json!({ "frd": f, "slope_check": slope }), provenance))
}

fn sheaf_conditions(p: &Params) -> Result<Report, CliError> {
    let coeffs = p.ints("p")?.ok_or_else(|| invalid("missing parameter p=c0,c1,..."))?;
    let poly = IntPoly::from_ints(&coeffs);
    let pipeline = ["m0", "m1", "m2", "m3"].iter().any(|k| p.has(k));
    let list = if pipeline {
        if p.has("n") {
            return Err(invalid("n does not apply to the surface pipeline"));
        }
        let constants = SurfaceConstants { m0: p.i64("m0")?, m1: p.i64("m1")?, m2: p.i64("m2")?, m3: p.i64("m3")? };
        gen_surface_pipeline(&poly, &constants, p.u32("dim_v")?.unwrap_or(3)).map_err(invalid)?
    } else {
        let n = p.u32("n")?.ok_or_else(|| invalid("missing parameter n (or m0..m3 for the surface pipeline)"))?;
        let default_dim = if n == 2 { 3 } else { 2 };
        gen_sheaf_conditions(n, &poly, p.u32("dim_v")?.unwrap_or(default_dim)).map_err(invalid)?
    };
    let provenance = list
        .items()
        .filter_map(|i| match &i.expected {
            crate::sheaf::ExpectedValue::Value { value, oracle } => {
                Some(prov(format!("polynomial value {oracle}"), value))
            }
            _ => None,
        })
        .collect();
    Ok(Report::new(
        "sheaf-conditions",
        Status::Info,
        json!({ "polynomial": poly.to_string(), "conditions": list }),
        provenance,
    ))
}

/// Both readings of the second curve condition, and which one is used.
fn hom_l_note(g: u32, big_d: i64, r: i64, d: i64) -> Result<Value, CliError> {
    let ctx = CurveCtx::new(g);
    let e = CurveClass::from_i64(r, d);
    let twist_reading = euler_pairing(&ctx, &CurveClass::from_i64(1, -big_d), &e);
    let dual_reading = euler_pairing(&ctx, &CurveClass::from_i64(1, big_d), &e);
    Ok(json!({
        "topic": "hom(L, e)",
        "parameters": { "g": g, "D": big_d, "r": r, "d": d },
        "twist_reading": to_value(&crate::numerics::serde_int::IntRepr(twist_reading))?,
        "twist_formula": "d - r(g-1-D) = chi(E(1)) = hom(L^v, e)",
        "dual_reading": to_value(&crate::numerics::serde_int::IntRepr(dual_reading))?,
        "dual_formula": "d - r(g-1+D) = chi(E (x) L^v) = hom(L, e)",
        "used": "twist_reading",
    }))
}

fn verify_surface(p: &Params) -> Result<Report, CliError> {
    let exa = verify_exa_sheaf_lemma().map_err(invalid)?;
    let tf = verify_torsionfree_lemma().map_err(invalid)?;
    let moduli = m1_m2_invariants().map_err(invalid)?;
    let forms = torsionfree_forms();
    let chi_note = json!({
        "topic": "chi(E(k))",
        "reference": moduli.chi_twist.stated_display,
        "computed": moduli.chi_twist.computed_display,
        "agree": moduli.chi_twist.agree,
        "method": "hrr_chi(ch(E) exp(kH)) with td = 1 + f_p, interpolated at k = 0, 1, 2",
    });
    let third_note = json!({
        "topic": "third torsion-free inequality",
        "reference": tf.stated_third_inequality,
        "computed": tf.derived_third_inequality,
        "agree": tf.third_inequalities_agree,
        "both_systems_empty": tf.stated_system.outcome.is_empty() && tf.derived_system.outcome.is_empty(),
    });
    let l_note = hom_l_note(
        p.u32("g")?.unwrap_or(2),
        p.i64("D")?.unwrap_or(5),
        p.i64("r")?.unwrap_or(2),
        p.i64("d")?.unwrap_or(15),
    )?;
    let mut diffs = Vec::new();
    if !exa.empty {
        diffs.push(json!({ "check": "exa_sheaf", "witness": exa.search.outcome }));
    }
    if !tf.empty {
        diffs.push(json!({ "check": "torsion_free", "stated": tf.stated_system.outcome, "derived": tf.derived_system.outcome }));
    }
    if !moduli.consistent {
        diffs.push(json!({ "check": "moduli_invariants" }));
    }
    let status = if diffs.is_empty() { Status::Pass } else { Status::Fail };
    let provenance = vec![
        prov("HRR chi(E,E) against Ext table (1, 5, 0)", &moduli.chi_e_e),
        prov("c1(FM E).H by intersection", &moduli.fm_c1_dot_h),
        prov("Delta(F') interpolated in d", &moduli.delta_polynomial),
        prov("length polynomial re-derived by intersection", &exa.length_polynomial),
        prov("first torsion-free form", forms.first.display_with(&crate::surface::VAR_NAMES)),
    ];
    let payload = json!({
        "exa_sheaf": exa,
        "torsion_free": tf,
        "moduli": moduli,
        "discrepancies": [chi_note, l_note, third_note],
        "diffs": diffs,
    });
    Ok(Report::new("verify-surface", status, payload, provenance))
}

fn report_all() -> Result<Report, CliError> {
    let checks = all_checks();
    let diffs: Vec<Value> =
        checks.iter().filter(|c| !c.passed).map(|c| json!({ "check": c.name, "failure": c.failure })).collect();
    let status = if diffs.is_empty() { Status::Pass } else { Status::Fail };
    let provenance = checks.iter().map(|c| prov(format!("self-check {}", c.name), c.cases)).collect();
    Ok(Report::new("report-all", status, json!({ "checks": checks, "diffs": diffs }), provenance))
}

pub fn dispatch(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Pairing { params } => pairing(&Params::parse(params, &["g", "a", "b"])?),
        Command::Fm { input, params } => fm(input.as_deref(), &Params::parse(params, &["class"])?),
        Command::GenDatum { kind, out, params } => gen_datum(*kind, out.as_deref(), params),
        Command::Check { datum, input, params } => check(datum.as_deref(), input.as_deref(), params),
        Command::Theta { params } => theta(&Params::parse(params, &["g", "r", "d", "points", "partitions"])?),
        Command::Sm { params } => sm(&Params::parse(params, &["dim_v", "m", "dim_u", "n", "hom_bc"])?),
        Command::Frd { params } => frd(&Params::parse(params, &["g", "r", "d"])?),
        Command::SheafConditions { params } => {
            sheaf_conditions(&Params::parse(params, &["n", "p", "dim_v", "m0", "m1", "m2", "m3"])?)
        }
        Command::VerifySurface { params } => verify_surface(&Params::parse(params, &["g", "D", "r", "d"])?),
        Command::ReportAll => report_all(),
    }
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if is_scalar(x) || is_scalar_list(x) {
                    let _ = writeln!(out, "{pad}{k}: {}", scalar_text(x));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    render_value(x, indent + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if is_scalar(x) || is_scalar_list(x) {
                    let _ = writeln!(out, "{pad}- {}", scalar_text(x));
                } else {
                    let _ = writeln!(out, "{pad}-");
                    render_value(x, indent + 1, out);
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar_text(other));
        }
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Object(_) | Value::Array(_))
}

fn is_scalar_list(v: &Value) -> bool {
    matches!(v, Value::Array(items) if items.iter().all(is_scalar))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(items) => format!("[{}]", items.iter().map(scalar_text).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

/// Plain-text rendering of a report.
pub fn render_human(report: &Report) -> String {
    let status = serde_json::to_value(report.status).ok().map(|v| scalar_text(&v)).unwrap_or_default();
    let mut out = format!("{}: {}\n", report.command, status.to_uppercase());
    render_value(&report.payload, 1, &mut out);
    if !report.provenance.is_empty() {
        out.push_str("provenance:\n");
        for p in &report.provenance {
            let _ = writeln!(out, "  {} = {}", p.anchor, p.value);
        }
    }
    out
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(report) => {
            let stdout = if cli.json {
                serde_json::to_string_pretty(&report).map(|s| s + "\n").unwrap_or_default()
            } else {
                render_human(&report)
            };
            Outcome { code: report.status.exit_code(), stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
