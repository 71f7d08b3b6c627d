"""Parity checks between the compiled row kernels and the pure fallbacks.

The dispatch in ``profinity._rows`` picks the compiled path only for
packed ``array('q')`` rows, so feeding the same data as plain lists
exercises the pure path inside the same process.  One subprocess test
covers the ``PROFINITY_PURE`` escape hatch end to end.
"""

from __future__ import annotations

import json
import os
import random
import subprocess
import sys
from array import array

import pytest

from profinity import _rows

pytestmark = pytest.mark.skipif(
    not _rows.compiled_backend_active(),
    reason="compiled backend not built; nothing to compare",
)

MODULI = [2, 3, 12, 360, 2**20 + 7, 2**30]


def _random_row(rng, n, L):
    return [rng.randrange(L) for _ in range(n)]


def test_first_nonzero_parity():
    rng = random.Random(99)
    for _ in range(200):
        n = rng.randrange(1, 30)
        L = rng.choice(MODULI)
        row = [0] * n
        for _ in range(rng.randrange(0, n)):
            row[rng.randrange(n)] = rng.randrange(L)
        start = rng.randrange(n + 1) if rng.random() < 0.9 else 0
        assert _rows.first_nonzero(array("q", row), start) == _rows.first_nonzero(
            list(row), start
        )


def test_row_axpy_parity():
    rng = random.Random(100)
    for _ in range(200):
        n = rng.randrange(1, 30)
        L = rng.choice(MODULI)
        dst = _random_row(rng, n, L)
        src = _random_row(rng, n, L)
        q = rng.randrange(L)
        start = rng.randrange(n)
        packed_dst = array("q", dst)
        _rows.row_axpy(packed_dst, array("q", src), q, L, start)
        pure_dst = list(dst)
        _rows.row_axpy(pure_dst, src, q, L, start)
        assert list(packed_dst) == pure_dst


def test_row_combine_parity_with_gcd_shaped_coefficients():
    rng = random.Random(101)
    for _ in range(200):
        n = rng.randrange(1, 30)
        L = rng.choice(MODULI)
        r1 = _random_row(rng, n, L)
        r2 = _random_row(rng, n, L)
        a = rng.randrange(1, L)
        b = rng.randrange(1, L)
        g, x, y = _rows.xgcd(a, b)
        start = rng.randrange(n)
        p1, p2 = array("q", r1), array("q", r2)
        _rows.row_combine(p1, p2, x, y, -(b // g), a // g, L, start)
        q1, q2 = list(r1), list(r2)
        _rows.row_combine(q1, q2, x, y, -(b // g), a // g, L, start)
        assert list(p1) == q1
        assert list(p2) == q2


def test_row_scale_parity():
    rng = random.Random(102)
    for _ in range(200):
        n = rng.randrange(1, 30)
        L = rng.choice(MODULI)
        row = _random_row(rng, n, L)
        u = rng.randrange(1, L)
        packed = array("q", row)
        _rows.row_scale(packed, u, L, 0)
        pure = list(row)
        _rows.row_scale(pure, u, L, 0)
        assert list(packed) == pure


def test_dot_parity():
    rng = random.Random(103)
    for _ in range(200):
        n = rng.randrange(1, 40)
        L = rng.choice(MODULI)
        row = _random_row(rng, n, L)
        vec = _random_row(rng, n, L)
        assert _rows.dot_mod(array("q", row), array("q", vec), L) == _rows.dot_mod(
            list(row), vec, L
        )
        nnz = rng.randrange(0, n)
        idxs = sorted(rng.sample(range(n), nnz))
        vals = [rng.randrange(L) for _ in idxs]
        got = _rows.pairs_dot(array("q", row), array("q", idxs), array("q", vals), L)
        want = _rows.pairs_dot(list(row), list(idxs), list(vals), L)
        assert got == want


def test_pure_env_var_disables_compiled_backend():
    env = dict(os.environ, PROFINITY_PURE="1")
    out = subprocess.run(
        [
            sys.executable,
            "-c",
            "from profinity._rows import compiled_backend_active;"
            "print(compiled_backend_active())",
        ],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "False"


def test_full_pipeline_parity_against_pure_subprocess():
    """The same random congruence systems must produce identical kernel
    presentations under both backends."""
    rng = random.Random(104)
    L = 12
    systems = []
    for _ in range(12):
        n = rng.randrange(1, 5)
        moduli = [rng.choice([2, 3, 4, 6, 12]) for _ in range(n)]
        k = rng.randrange(0, 3)
        rows = [
            [(L // moduli[j]) * rng.randrange(moduli[j]) for j in range(n)]
            for _ in range(k)
        ]
        systems.append({"moduli": moduli, "rows": rows, "L": L})

    script = (
        "import json, sys\n"
        "from profinity.exact_algebra import ModSubquotient\n"
        "from profinity._rows import pack_row, compiled_backend_active\n"
        "systems = json.load(sys.stdin)\n"
        "out = []\n"
        "for s in systems:\n"
        "    L = s['L']\n"
        "    rows = [pack_row([v % L for v in r], L) for r in s['rows']]\n"
        "    sq = ModSubquotient(s['moduli'], rows, L)\n"
        "    out.append({'factors': sq.group.factors,"
        " 'order': sq.kernel_order,"
        " 'reps': [list(r) for r in sq.representatives]})\n"
        "print(json.dumps({'compiled': compiled_backend_active(),"
        " 'results': out}))\n"
    )

    def run(env):
        res = subprocess.run(
            [sys.executable, "-c", script],
            input=json.dumps(systems),
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        return json.loads(res.stdout)

    fast = run(dict(os.environ, PROFINITY_PURE="0"))
    pure = run(dict(os.environ, PROFINITY_PURE="1"))
    assert fast["compiled"] is True
    assert pure["compiled"] is False
    assert fast["results"] == pure["results"]
