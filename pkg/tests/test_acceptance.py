"""Acceptance criteria 1-9, one PASS/FAIL line per criterion on the terminal."""
import cmath
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from helpers import feasible_instance, random_instance
from lemlab.bounds import chain_certificate, lower_bound_constant
from lemlab.constructions import (RESONANT_W_BOUNDS, build_axis_case, build_generic_case,
                                  build_resonant_case, certify_nodes, rescale_to_bidisk)
from lemlab.core import PoleConfig, assemble_map, interpolation_conditions, node_feasible, normalized_cost
from lemlab.errors import Infeasible, LemlabError
from lemlab.experiments import SweepSpec, run_sweep
from lemlab.geometry import Verdict, arg_separation_bound, mobius, pick_disk, reduced_arg
from lemlab.green import BidiskPoint, Region, g1, g2, g3, region_of
from lemlab.maps import verify_map
from lemlab.optimizer import OptimizerOptions, lempert_upper_via_nodes


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail=""):
        with capsys.disabled():
            print(f"\n[acceptance] criterion {label}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return emit


def _disk(rng, n, rmax):
    return np.sqrt(rng.uniform(0, rmax ** 2, n)) * np.exp(1j * rng.uniform(-np.pi, np.pi, n))


# -- 1 ------------------------------------------------------------------------------

def test_criterion_1_geometry(report):
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    n = 100_000
    a, z, c = _disk(rng, n, 0.99), _disk(rng, n, 0.99), _disk(rng, n, 0.95)
    u = np.exp(1j * rng.uniform(-np.pi, np.pi, n))
    ac = np.conj(a)
    phi = lambda p, w: (p - w) / (1 - w * np.conj(p))
    inv = np.abs(phi(a, phi(a, z)) - z).max()
    circ = np.abs(np.abs(phi(a, u)) - 1).max()
    a2, b2 = _disk(rng, n, 0.95), _disk(rng, n, 0.95)
    dg = np.abs(np.abs(phi(phi(c, a2), phi(c, b2))) - np.abs(phi(a2, b2))).max()
    # Pick disks: points at d_G = delta lie on the predicted circle
    m = 10_000
    pa, delta = _disk(rng, m, 0.95), rng.uniform(0.01, 0.99, m)
    pick_err = 0.0
    for k in range(m):
        disk = pick_disk(complex(pa[k]), float(delta[k]))
        b = mobius(complex(pa[k]), delta[k] * complex(u[k]))
        pick_err = max(pick_err, abs(abs(b - disk.center) - disk.radius))
    # separation lemma
    lemma_excess = -math.inf
    for k in range(m):
        ak = complex(_disk(rng, 1, 0.95)[0])
        if abs(ak) < 0.02:
            continue
        d = min(0.5, abs(ak)) * rng.uniform(0.01, 0.999)
        b = mobius(ak, d * rng.uniform(0, 1) * complex(u[k]))
        lemma_excess = max(lemma_excess, abs(reduced_arg(ak / b)) - arg_separation_bound(ak, d))
    elapsed = time.perf_counter() - start
    ok = inv < 1e-10 and circ < 1e-12 and dg < 1e-10 and pick_err < 1e-12 and lemma_excess <= 1e-12 and elapsed < 10
    report(1, ok, f"involution {inv:.1e}, circle {circ:.1e}, d_G {dg:.1e}, Pick {pick_err:.1e}, "
                  f"lemma excess {lemma_excess:.1e}, {elapsed:.1f}s")
    assert ok


# -- 2 ------------------------------------------------------------------------------

def test_criterion_2_reduction_oracle(report):
    start = time.perf_counter()
    rng = np.random.default_rng(202)
    mismatches, n_feas, n_other = 0, 0, 0
    for k in range(500):
        z, p, n = feasible_instance(rng) if k % 2 == 0 else random_instance(rng)
        verdict = node_feasible(n, p, z).verdict
        try:
            chk = verify_map(assemble_map(n, p, z), interpolation_conditions(n, p, z), 4096)
            built = chk.residual < 1e-9 and chk.boundary_sup <= 1 + 1e-10
        except Infeasible:
            built = False
        if verdict is Verdict.BOUNDARY:
            continue
        n_feas += verdict is Verdict.FEASIBLE
        n_other += verdict is Verdict.INFEASIBLE
        mismatches += (verdict is Verdict.FEASIBLE) != built
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and n_feas > 100 and n_other > 100 and elapsed < 30
    report(2, ok, f"{n_feas} feasible, {n_other} infeasible, {mismatches} mismatches, {elapsed:.1f}s")
    assert ok


# -- 3 ------------------------------------------------------------------------------

def test_criterion_3_construction_exactness(report):
    start = time.perf_counter()
    ident = err = res = sup = 0.0
    cases = [(BidiskPoint(0.3, 0.3j), (1, 1)), (BidiskPoint(0.2, -0.15 + 0.1j), (1, 1j)),
             (BidiskPoint(0.1j, 0.25), (1j, 1))]
    for z, (u1, u2) in cases:
        for t in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
            p = PoleConfig(t * u1, t * u2)
            r = build_generic_case(z, p, c0=0.5)
            scale = max(abs(p.eps1), abs(p.eps2))
            ident = max(ident, abs(r.info["identity1"]) / scale, abs(r.info["identity2"]) / scale)
            err = max(err, max(abs(a - b) for a, b in zip(r.info["E"], r.info["E_formula"])))
            res = max(res, verify_map(r.map, interpolation_conditions(r.nodes, p, z)).residual)
            m2, n2 = rescale_to_bidisk(r.map, r.nodes)
            chk = verify_map(m2, interpolation_conditions(n2, p, z))
            res, sup = max(res, chk.residual), max(sup, chk.boundary_sup)
    for k in (3, 4, 5, 6):
        z, p = BidiskPoint(0.3, 0), PoleConfig(10.0 ** -k, 10.0 ** -k)
        r = build_axis_case(z, p)
        err = max(err, *(abs(r.info[e] - r.info[e + "_formula"]) for e in ("E1", "E2", "E3")))
        res = max(res, verify_map(r.map, interpolation_conditions(r.nodes, p, z)).residual)
    elapsed = time.perf_counter() - start
    ok = ident <= 1e-14 and err <= 1e-12 and res < 1e-9 and sup <= 1 + 1e-10 and elapsed < 10
    report(3, ok, f"identities (relative) {ident:.1e}, error formulas {err:.1e}, residual {res:.1e}, "
                  f"rescaled sup {sup:.12f}, {elapsed:.1f}s")
    assert ok


# -- 4 and 7 share the sweep --------------------------------------------------

Z4 = BidiskPoint(0.3, 0.3j)
T4 = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


@pytest.fixture(scope="module")
def sweep4():
    start = time.perf_counter()
    spec = SweepSpec(z=Z4, path="Equal", t0=1e-2, ratio=0.1, count=5, c0=1.0)
    records, summary = run_sweep(spec)
    return records, summary, time.perf_counter() - start


def test_criterion_4_three_halves_band(report, sweep4):
    records, summary, elapsed = sweep4
    target = 1.5 * math.log(0.3)
    C1 = lower_bound_constant(1.0).C
    devs = {r.t: r.optimizer_value - target for r in records}
    tail = [d for t, d in devs.items() if t <= 1e-4 * (1 + 1e-12)]
    width = max(tail) - min(tail)
    lowest = min(devs.values())
    p = PoleConfig(1e-6, 1e-6)
    gen = build_generic_case(Z4, p, c0=1.0)
    _, n_resc = rescale_to_bidisk(gen.map, gen.nodes)
    conv = {"raw": gen.cost - target, "rescaled": normalized_cost(n_resc) - target,
            "certified": certify_nodes(gen.nodes, p, Z4).cost - target}
    ok = (width <= 1.0 and lowest >= -C1 - 0.5 and all(abs(v) < 1e-2 for v in conv.values())
          and elapsed < 300)
    report(4, ok, f"band width {width:.4f} (t<=1e-4), min deviation {lowest:.4f} >= {-C1 - 0.5:.4f}, "
                  f"generic cost deviation at t=1e-6 " + ", ".join(f"{k} {v:.2e}" for k, v in conv.items())
                  + f", {elapsed:.1f}s")
    assert ok


# -- 5 ------------------------------------------------------------------------------

Z5 = BidiskPoint(0.05, -0.05)
T5 = (1e-4, 1e-5, 1e-6)


def _resonant_poles(t):
    return PoleConfig(t, (1 - t) * t)


def test_criterion_5_resonant_band(report):
    start = time.perf_counter()
    target = 2 * math.log(0.05)
    from lemlab.constructions import resonant_constant
    c_res = resonant_constant()
    vals = [lempert_upper_via_nodes(Z5, _resonant_poles(t)).value - target for t in T5]
    elapsed = time.perf_counter() - start
    ok = all(-0.2 <= v <= c_res + 0.2 for v in vals) and elapsed < 180
    report("5 (optimizer band)", ok,
            f"optimizer - 2log0.05 in [{min(vals):.4f}, {max(vals):.4f}] within [-0.2, {c_res + 0.2:.4f}], {elapsed:.1f}s")
    assert ok


def test_criterion_5_resonant_construction(report):
    """The node choice with C1 = 40 at z = (0.05, -0.05), as stated."""
    outcomes = []
    for t in T5:
        try:
            r = build_resonant_case(Z5, _resonant_poles(t))
            outcomes.append(r.report.verdict is Verdict.FEASIBLE and all(r.w_bounds_ok))
        except LemlabError as exc:
            outcomes.append(f"{exc.code}: {exc}")
    ok = all(o is True for o in outcomes)
    report("5 (resonant construction at z=(0.05,-0.05))", ok, f"{outcomes[0]}")
    assert ok


def test_criterion_5_resonant_construction_where_it_applies(report):
    """Same node choice where C1 |z1| <= 1/4 holds."""
    z = BidiskPoint(0.005, -0.005)
    rows = []
    for t in (1e-6, 1e-7, 1e-8):
        r = build_resonant_case(z, _resonant_poles(t))
        rows.append((r.report.verdict is Verdict.FEASIBLE, all(r.w_bounds_ok),
                     r.cost <= 2 * math.log(0.005) + r.C_res))
    ok = all(all(row) for row in rows)
    report("5 (supplementary, z=(0.005,-0.005))", ok, f"w bounds {RESONANT_W_BOUNDS}, rows {rows}")
    assert ok


# -- 6 ------------------------------------------------------------------------------

def test_criterion_6_axis_case(report):
    start = time.perf_counter()
    z = BidiskPoint(0.3, 0)
    target = 2 * math.log(0.3)
    rows, ok = [], True
    for k in (3, 4, 5, 6):
        p = PoleConfig(10.0 ** -k, 10.0 ** -k)
        r = build_axis_case(z, p)
        cert = certify_nodes(r.nodes, p, z)
        opt = lempert_upper_via_nodes(z, p).value
        ok &= abs(r.cost - target) < 1e-2 and abs(cert.cost - target) < 1e-2 and opt <= cert.cost
        rows.append(f"k={k}: raw {r.cost - target:+.2e}, disk {cert.cost - target:+.2e}, "
                    f"optimizer {opt - target:+.2e}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120
    report(6, ok, "; ".join(rows) + f"; {elapsed:.1f}s")
    assert ok


# -- 7 ------------------------------------------------------------------------------

def test_criterion_7_no_witness(report, sweep4):
    start = time.perf_counter()
    records, _, _ = sweep4
    consts = lower_bound_constant(1.0)
    bar = 1.5 * math.log(Z4.norm) - consts.C
    found = [r.optimizer_value for r in records]
    p = PoleConfig(T4[-1], T4[-1])
    esc = lempert_upper_via_nodes(Z4, p, OptimizerOptions().escalated(256))
    found.append(esc.value)
    witnesses = 0
    for r in records:
        rep = chain_certificate(Z4, PoleConfig(r.eps1, r.eps2), r.nodes, 1.0, consts)
        witnesses += rep.contradiction_witness
    witnesses += chain_certificate(Z4, p, esc.nodes, 1.0, consts).contradiction_witness
    elapsed = time.perf_counter() - start
    ok = min(found) >= bar and witnesses == 0 and elapsed < 600
    report(7, ok, f"lowest feasible cost {min(found):.4f} >= bar {bar:.4f}, "
                  f"{witnesses} witnesses, escalated run {esc.evaluations} evaluations, {elapsed:.1f}s")
    assert ok


# -- 8 ------------------------------------------------------------------------------

def test_criterion_8_green_sandwich(report):
    start = time.perf_counter()
    rng = np.random.default_rng(808)
    n = 100_000
    a, b = _disk(rng, n, 0.999999), _disk(rng, n, 0.999999)
    bad = 0
    for x, y in zip(a.tolist(), b.tolist()):
        z = BidiskPoint(x, y)
        bad += not g3(z) <= min(g1(z), g2(z))
    # points strictly inside |z2| <= |z1|^2 and its mirror image
    region_bad = 0
    s = rng.uniform(0, 1 - 1e-9, 20_000)
    w = _disk(rng, 20_000, 0.999)
    for k in range(20_000):
        x = complex(w[k])
        if x == 0:
            continue
        y = s[k] * abs(x) ** 2 * cmath.exp(1j * rng.uniform(-3, 3))
        z = BidiskPoint(x, y)
        region_bad += not (region_of(z) is Region.Z2_DOMINATED and g1(z) == g3(z))
        zs = z.swapped()
        region_bad += not (region_of(zs) is Region.Z1_DOMINATED and g2(zs) == g3(zs))
    elapsed = time.perf_counter() - start
    ok = bad == 0 and region_bad == 0 and elapsed < 5
    report(8, ok, f"{bad} sandwich violations, {region_bad} region identity failures, {elapsed:.1f}s")
    assert ok


# -- 9 ------------------------------------------------------------------------------

def test_criterion_9_determinism(report, tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({"z": [[0.3, 0], [0, 0.3]], "path": "Generic", "directions": [[1, 0], [1, 0]],
                               "t0": 1e-3, "ratio": 0.1, "count": 3, "c0": 1.0, "seed": 7,
                               "optimizer": {"starts": 32}}))
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}.csv"
        subprocess.run([sys.executable, "-m", "lemlab.cli", "sweep", "--config", str(cfg),
                        "--out", str(out)], check=True)
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1] and outs[0].startswith(b"lemlab-v1\n")
    report(9, ok, f"{len(outs[0])} bytes, identical={outs[0] == outs[1]}")
    assert ok
