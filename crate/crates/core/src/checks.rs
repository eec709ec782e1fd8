//! Grid self-checks run by `pstab report-all`.

use num::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{euler_pairing, CurveClass, CurveCtx};
use crate::elliptic::{fm_kclass, labels, p_class_max_isoclasses, theta_degree_general, Atom, EllipticObject};
use crate::numerics::{int, Int, Rat};
use crate::pstability::{check_object, fm_push_datum, gen_datum_elliptic_torsion, gen_datum_prop14, TestObject};
use crate::sheaf::{f_rd_class, frd_pair, sm_rank_det};
use crate::surface::{m1_m2_invariants, verify_exa_sheaf_lemma, verify_torsionfree_lemma};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfCheck {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    /// First failing case, if any.
    pub failure: Option<String>,
}

type Outcome = (u64, Option<String>);

fn run(name: &str, f: fn() -> Outcome) -> SelfCheck {
    let (cases, failure) = f();
    SelfCheck { name: name.into(), passed: failure.is_none(), cases, failure }
}

fn theta_formula(g: u32, r: i64, d: i64) -> Int {
    let c = Integer::div_ceil(&d, &r);
    let v =
        (Rat::from_integer(int(2 * g as i64 + c)) - Rat::new(int(d), int(r))) * Rat::from_integer(int(r * r * r + r));
    v.to_integer()
}

fn prop14_identity() -> Outcome {
    let mut n = 0;
    for g in 0..=4u32 {
        let ctx = CurveCtx::new(g);
        for r in 1..=6 {
            for d in -20..=20 {
                n += 1;
                let Ok(dat) = gen_datum_prop14(&ctx, r, d) else {
                    return (n, Some(format!("generator failed at g={g} r={r} d={d}")));
                };
                let value = dat.conditions[0].expected.at(0).unwrap_or_default();
                let (a, _, _) = match frd_pair(&ctx, r, d) {
                    Ok(p) => p,
                    Err(e) => return (n, Some(e.to_string())),
                };
                let chi = -euler_pairing(&ctx, &CurveClass::from_i64(r, -d), &a);
                if value != theta_formula(g, r, d) || value != chi {
                    return (n, Some(format!("g={g} r={r} d={d}: {value} vs {chi}")));
                }
            }
        }
    }
    (n, None)
}

fn theta_coincidence() -> Outcome {
    let mut n = 0;
    for g in 0..=4u32 {
        let ctx = CurveCtx::new(g);
        for r in 1..=6 {
            for d in -20..=20 {
                n += 1;
                let value = gen_datum_prop14(&ctx, r, d).ok().and_then(|dat| dat.conditions[0].expected.at(0));
                if value != theta_degree_general(g, r, d).ok() {
                    return (n, Some(format!("g={g} r={r} d={d}")));
                }
            }
        }
    }
    (n, None)
}

fn fm_vectors() -> Outcome {
    for ((r, d), (r2, d2)) in [((1, 0), (0, -1)), ((1, -3), (-3, -1)), ((1, 2), (2, -1))] {
        if fm_kclass(&CurveClass::from_i64(r, d)) != CurveClass::from_i64(r2, d2) {
            return (0, Some(format!("fm({r}, {d})")));
        }
    }
    let mut n = 3;
    for r in -50..50 {
        for d in -50..50 {
            n += 1;
            let c = CurveClass::from_i64(r, d);
            if fm_kclass(&fm_kclass(&c)) != -&c {
                return (n, Some(format!("fm^2({c})")));
            }
        }
    }
    (n, None)
}

fn torsion(n: i64) -> EllipticObject {
    let names: Vec<String> = (0..n).map(|i| format!("P{i}")).collect();
    labels(names).ok().and_then(|l| EllipticObject::torsion_from_points(&l).ok()).unwrap_or_else(EllipticObject::zero)
}

fn elliptic_equivalence() -> Outcome {
    let mut n = 0;
    for r in 1..=5 {
        let Ok(dat) = gen_datum_elliptic_torsion(r) else { return (n, Some(format!("r={r}"))) };
        for len in 1..=8 {
            n += 1;
            let v = check_object(&dat, &TestObject::Atoms { object: torsion(len) });
            if v.map(|v| v.passed()).ok() != Some(len == r) {
                return (n, Some(format!("r={r} length={len}")));
            }
        }
        n += 1;
        let pushed = fm_push_datum(&dat);
        let bundle = Atom::bundle(r, 0, 0).map(EllipticObject::single);
        let ok = match (pushed, bundle) {
            (Ok(p), Ok(b)) => check_object(&p, &TestObject::Atoms { object: b }).map(|v| v.passed()).unwrap_or(false),
            _ => false,
        };
        if !ok {
            return (n, Some(format!("bundle ({r}, 0) against the pushed datum")));
        }
    }
    (n, None)
}

fn frd_identity() -> Outcome {
    let mut n = 0;
    for g in 0..=5u32 {
        let ctx = CurveCtx::new(g);
        for r in 1..=8 {
            for d in -40..=40 {
                n += 1;
                match f_rd_class(&ctx, r, d) {
                    Ok(f) if &f.b.degree - &f.a.degree == int(r * r * (g as i64 - 1) - r * d) => {}
                    _ => return (n, Some(format!("g={g} r={r} d={d}"))),
                }
            }
        }
    }
    (n, None)
}

fn sm_formulas() -> Outcome {
    let mut n = 0;
    for k in 1..=10u32 {
        n += 1;
        match sm_rank_det(k + 1, 0) {
            Ok(s) if s.rank == int(k as i64) && s.det_exponent == int(-1) => {}
            _ => return (n, Some(format!("dim V = {}, m = 0", k + 1))),
        }
    }
    for m in 1..=30u32 {
        n += 1;
        match sm_rank_det(2, m - 1) {
            Ok(s) if s.rank == int(1) && s.det_exponent == int(-(m as i64)) => {}
            _ => return (n, Some(format!("dim V = 2, index {m} - 1"))),
        }
    }
    (n, None)
}

fn surface_verifiers() -> Outcome {
    let exa = verify_exa_sheaf_lemma().map(|r| r.empty).unwrap_or(false);
    let tf = verify_torsionfree_lemma().map(|r| r.empty).unwrap_or(false);
    let moduli = m1_m2_invariants().map(|r| {
        r.chi_e_e == int(-4)
            && r.ext_table == (1, 5, 0)
            && r.fm_c1_dot_h == Rat::from_integer(int(-5))
            && r.delta_matches
    });
    let failure = match (exa, tf, moduli) {
        (true, true, Ok(true)) => None,
        (false, _, _) => Some("length search found a witness".into()),
        (_, false, _) => Some("torsion-free system is not empty".into()),
        (_, _, m) => Some(format!("moduli invariants: {m:?}")),
    };
    (4, failure)
}

/// Counts partitions of `n` into parts of size at most `max`.
fn count_partitions(n: u32, max: u32) -> u64 {
    if n == 0 {
        return 1;
    }
    (1..=max.min(n)).map(|part| count_partitions(n - part, part)).sum()
}

fn partition_bound() -> Outcome {
    for r in 1..=30u32 {
        let brute = count_partitions(r, r);
        if p_class_max_isoclasses(r as i64).ok() != Some(Int::from(brute)) {
            return (r as u64, Some(format!("r={r}")));
        }
    }
    (30, None)
}

fn pairing_biadditivity() -> Outcome {
    let mut n = 0;
    let classes: Vec<CurveClass> = (-4..=4).flat_map(|r| (-6..=6).map(move |d| CurveClass::from_i64(r, d))).collect();
    for g in 0..=3u32 {
        let ctx = CurveCtx::new(g);
        for a in classes.iter().step_by(7) {
            for b in classes.iter().step_by(5) {
                for c in classes.iter().step_by(11) {
                    n += 1;
                    let sum = euler_pairing(&ctx, &(a + c), b);
                    if sum != euler_pairing(&ctx, a, b) + euler_pairing(&ctx, c, b)
                        || euler_pairing(&ctx, &a.shifted(1), b) != -euler_pairing(&ctx, a, b)
                    {
                        return (n, Some(format!("g={g} {a} {b} {c}")));
                    }
                }
            }
        }
    }
    (n, None)
}

fn hilbert_polynomial_twist() -> Outcome {
    // χ(E(k)) on a curve: (r, d) twisted by k·D pairs with O to d + rDk − r(g−1).
    let mut n = 0;
    for g in 0..=3u32 {
        let ctx = CurveCtx::new(g);
        for (r, d, big_d) in [(1, 2, 1), (2, 15, 5), (3, -4, 2)] {
            let p = crate::sheaf::curve_hilbert_polynomial(g, big_d, r, d);
            for k in -5..=5 {
                n += 1;
                let twisted = CurveClass::from_i64(r, d + r * big_d * k);
                let chi = euler_pairing(&ctx, &CurveClass::structure_sheaf(), &twisted);
                if p.eval_i64(k).ok() != Some(chi) {
                    return (n, Some(format!("g={g} r={r} d={d} k={k}")));
                }
            }
        }
    }
    (n, None)
}

pub const CHECK_NAMES: [&str; 10] = [
    "prop14-identity",
    "theta-coincidence",
    "fm-vectors",
    "elliptic-equivalence",
    "frd-identity",
    "sm-formulas",
    "surface-verifiers",
    "partition-bound",
    "pairing-biadditivity",
    "hilbert-polynomial",
];

/// Every check, evaluated in parallel and returned in `CHECK_NAMES` order.
pub fn all_checks() -> Vec<SelfCheck> {
    let fns: [fn() -> Outcome; 10] = [
        prop14_identity,
        theta_coincidence,
        fm_vectors,
        elliptic_equivalence,
        frd_identity,
        sm_formulas,
        surface_verifiers,
        partition_bound,
        pairing_biadditivity,
        hilbert_polynomial_twist,
    ];
    CHECK_NAMES.par_iter().zip(fns.par_iter()).map(|(name, f)| run(name, *f)).collect()
}
