"""Smoke test for the pstab extension.

Build and install first:
    pip install --no-build-isolation -e crates/py
Then run:
    python3 python/smoke_test.py
"""

import json
import math

import pstab


def ceil_div(a, b):
    return -((-a) // b)


def rr(g, a, b):
    (r1, d1), (r2, d2) = a, b
    return r1 * d2 - r2 * d1 + r1 * r2 * (1 - g)


def main():
    a = pstab.CurveClass(1, 0)
    b = pstab.CurveClass(2, 15)
    assert pstab.euler_pairing(2, a, b) == rr(2, (1, 0), (2, 15)) == 13
    assert b.slope() == (15, 2)
    assert pstab.fm_kclass(pstab.CurveClass(1, -3)) == pstab.CurveClass(-3, -1)
    assert b.fm().fm() == -b

    for g in range(3):
        for r in range(1, 5):
            for d in range(-8, 9):
                want = (2 * g + ceil_div(d, r)) * (r ** 3 + r) - d * (r * r + 1)
                assert pstab.theta_degree_general(g, r, d) == want, (g, r, d)

    assert pstab.partition_count(30) == 5604
    assert pstab.binomial(10, 3) == math.comb(10, 3)
    assert pstab.sm_rank_det(3, 0)["rank"] == 2

    frd = pstab.f_rd_class(2, 2, 3)
    assert frd["b"] == {"rank": 5, "degree": -25}
    assert frd["b"]["degree"] - frd["a"]["degree"] == 2 * 2 * (2 - 1) - 2 * 3

    e = pstab.SurfaceClass(1, 2, 0, -2)
    assert e.euler_pairing(e) == -4
    assert e.fm_relative().c1().intersect(pstab.SurfaceClass.polarisation()) == "-5"

    datum = pstab.PDatum.elliptic_torsion(2)
    assert datum.check_points(["P", "Q"])["status"] == "pass"
    assert datum.check_points(["P"])["status"] == "fail"
    assert datum.fm_push().check_sheaf(2, 0)["status"] == "pass"
    again = pstab.PDatum.from_json(datum.to_json())
    doc = json.dumps({"schema_version": "1", "objects": [{"rank": 0, "degree": 2, "shift": 0, "support": ["P", "-P"]}]})
    assert pstab.check(again, doc)["status"] == "pass"

    surface = pstab.verify_surface()
    assert surface["exa_sheaf"]["empty"] and surface["torsion_free"]["empty"]

    code, out, err = pstab.run_command(["verify-surface", "--json"])
    assert code == 0, err
    notes = json.loads(out)["payload"]["discrepancies"]
    assert notes[0]["reference"] == "k^2 + 7k" and notes[0]["computed"] == "3k^2 + 7k"

    code, _, err = pstab.run_command(["pairing", "bogus=1"])
    assert code == 2 and err
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
