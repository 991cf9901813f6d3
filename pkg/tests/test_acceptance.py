"""Acceptance criteria 1-11, each at its stated tolerance and time limit.

Every test prints one line "C<n> PASS|FAIL <summary>".  Run this file
directly (python tests/test_acceptance.py) to get just the eleven lines.
"""

import functools
import json
import math
import os
import subprocess
import sys
import time

import pytest

from strengthlab.verify import (
    Config,
    criterion_coefficient_rank,
    criterion_diagonal_bridge,
    criterion_euler,
    criterion_gowers,
    criterion_low_rank_singularity,
    criterion_polarization,
    criterion_rank_lower,
    criterion_rank_upper,
    criterion_regularization,
    criterion_taylor_vanishing,
    singularity_corpus,
)

CFG = Config(seed=7)
LINES = {}


def emit(n, ok, summary, capsys=None):
    line = f"C{n} {'PASS' if ok else 'FAIL'} {summary}"
    LINES[n] = line
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


@functools.lru_cache(maxsize=None)
def corpus():
    return tuple(singularity_corpus(CFG, 50))


def test_c1_euler(capsys=None):
    res, dt = timed(criterion_euler, CFG, 200)
    ok = res.passed and res.checked == 200 and dt < 5
    emit(1, ok, f"euler identity on {res.checked}/200 forms in {dt:.2f}s (limit 5s)", capsys)
    assert ok, res.counterexample


def test_c2_polarization(capsys=None):
    res, _ = timed(criterion_polarization, CFG, 200)
    vanish = res.details.get("char_at_most_degree", 0)
    ok = res.passed and res.checked == 200 and vanish > 0
    emit(2, ok, f"diagonal = d! g on {res.checked}/200 forms, {vanish} with p <= d vanish pointwise", capsys)
    assert ok, res.counterexample


def test_c3_taylor_vanishing(capsys=None):
    res, dt = timed(criterion_taylor_vanishing, CFG, literal=True)
    ok = res.passed and dt < 1
    bad = sorted({(r["p"], r["exponent"]) for r in res.details["cases"] if r["g2"] != "0"})
    summary = f"g^2 = 0 checked for (p, exponent) in (2,3), (3,4), (2,5), n = 1..4 in {dt:.3f}s"
    if bad:
        example = next(r for r in res.details["cases"] if (r["p"], r["exponent"]) == bad[0])
        summary += f"; nonzero for {bad}, e.g. n=1 gives g^2 = {example['g2']}"
    emit(3, ok, summary, capsys)
    assert ok, res.counterexample


def test_c4_rank_lower(capsys=None):
    res = criterion_rank_lower(CFG, 50, corpus=list(corpus()))
    rows = res.details["rows"]
    ok = res.passed and len(rows) == 50 and res.details["boundary_instance"]
    emit(4, ok, f"rk >= ceil(c/2) on {len(rows)}/50 exact+stable instances, boundary (2,4) present: "
                f"{res.details['boundary_instance']}", capsys)
    assert ok, res.counterexample


def test_c5_rank_upper(capsys=None):
    res = criterion_rank_upper(CFG, 50, corpus=list(corpus()))
    ok = res.passed and res.checked > 0 and "caveat" in res.details
    emit(5, ok, f"rk <= (d-1) c on {res.checked} char-coprime instances (caveat recorded)", capsys)
    assert ok, res.counterexample


def test_c6_regularization(capsys=None):
    res, dt = timed(criterion_regularization, CFG, 100, r_max=3)
    ok = res.passed and res.checked == 100 and dt < 600
    emit(6, ok, f"membership + regularity + size <= n_1 on {res.checked}/100 inputs in {dt:.1f}s (limit 600s)", capsys)
    assert ok, res.counterexample


def test_c7_gowers(capsys=None):
    res = criterion_gowers(CFG, 50)
    norm = res.details.get("x1*x2 norm", math.nan)
    ok = res.passed and abs(norm - 2 ** -0.5) <= 1e-9 and res.checked >= 51
    emit(7, ok, f"||x1x2||_U2 = {norm:.12f}, {res.checked - 1} annihilation instances, "
                f"min raw average {res.details.get('min_raw_average', math.nan):.3g}", capsys)
    assert ok, res.counterexample


def test_c8_diagonal_bridge(capsys=None):
    res = criterion_diagonal_bridge(CFG, 100)
    ok = res.passed and res.checked == 100
    emit(8, ok, f"F(x,..,x,e_j) = (p-1)! d_j f on {res.checked}/100 forms", capsys)
    assert ok, res.counterexample


def test_c9_low_rank_singularity(capsys=None):
    res = criterion_low_rank_singularity(CFG, 30)
    rows = res.details["rows"]
    exact = all(r["stable"] and isinstance(r["rank"], int) for r in rows)
    ok = res.passed and len(rows) == 30 and exact
    emit(9, ok, f"dim X cap S >= dim X - 2r on {len(rows)}/30 instances (exact ranks, stable estimates)", capsys)
    assert ok, res.counterexample


def test_c10_coefficient_rank(capsys=None):
    res, dt = timed(criterion_coefficient_rank, CFG, 10)
    rows = res.details["rows"]
    exact = all(isinstance(r, int) or r == "inf" for row in rows for r in row["rank_C"] + row["rank_G"])
    ok = res.passed and len(rows) == 10 and exact and dt < 600
    emit(10, ok, f"rk(C_i) >= rk(G_i) on {len(rows)}/10 towers, all ranks exact, in {dt:.1f}s (limit 600s)", capsys)
    assert ok, res.counterexample


def _verify_all(shards):
    cmd = [sys.executable, "-m", "strengthlab", "verify", "--suite", "all", "--seed", "7", "--shards", str(shards)]
    return subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE, env=dict(os.environ))


def test_c11_determinism(capsys=None):
    procs = [_verify_all(1), _verify_all(1), _verify_all(4)]
    outs = [p.communicate() for p in procs]
    codes = [p.returncode for p in procs]
    blobs = [o for o, _ in outs]
    same = blobs[0] == blobs[1] == blobs[2] and len(blobs[0]) > 0
    passed = same and json.loads(blobs[0]).get("pass") is True
    ok = same and all(c == 0 for c in codes)
    emit(11, ok, f"verify --suite all --seed 7: two runs and shards=4 byte-identical: {same} "
                 f"({len(blobs[0])} bytes, suite pass: {passed}, exit codes {codes})", capsys)
    assert ok, [e.decode()[-400:] for _, e in outs]


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_c")]
    for test in sorted(tests, key=lambda t: int(t.__name__.split("_")[1][1:])):
        try:
            test()
        except AssertionError:
            pass
