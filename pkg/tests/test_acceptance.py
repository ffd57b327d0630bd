"""One test per acceptance criterion; each prints its PASS/FAIL line."""

import subprocess
import sys

import pytest

from specfold.acceptance import (
    _koszul_against,
    c3_species,
    combinatorial_summary,
    d4_species,
    koszul_h2,
    load_golden,
    run_criterion,
)
from specfold.ar_knitting import knit, nakayama_permutation
from specfold.cli import koszul_report

PRIME = 7


def check(n, capsys):
    res = run_criterion(n, PRIME)
    with capsys.disabled():
        print("\n" + res.line())
    return res


C3_H2 = pytest.mark.xfail(strict=True, reason="stated H2 vertex for C3 contradicts sigma(1) = 1; see decisions ledger")


@pytest.mark.parametrize("n", [1, 2, 3, 4, pytest.param(5, marks=C3_H2), 6, 7, 8, 9, 10])
def test_criterion(n, capsys):
    res = check(n, capsys)
    assert res.ok, res.detail


def test_criterion_5_attainable_parts():
    for name, s, i in (("c3_koszul", c3_species(PRIME), 1), ("d4_koszul", d4_species(PRIME), 2)):
        rep = koszul_report(s, i)
        assert _koszul_against(rep, load_golden(name)) == []
    d4 = koszul_report(d4_species(PRIME), 2)
    assert koszul_h2(d4) == [load_golden("d4_koszul")["H2_stated"]]


def test_c3_top_homology_sits_at_sigma():
    s = c3_species(PRIME)
    sigma = nakayama_permutation(knit(s)).sigma
    assert koszul_h2(koszul_report(s, 1)) == [str(sigma[1])] == ["1"]


def test_selftest_is_byte_identical():
    cmd = [sys.executable, "-m", "specfold.cli", "selftest"]
    first = subprocess.run(cmd, capture_output=True)
    second = subprocess.run(cmd, capture_output=True)
    assert first.stdout == second.stdout
    assert first.returncode == second.returncode
    lines = first.stdout.decode().splitlines()
    assert sum(" PASS " in ln or " FAIL " in ln for ln in lines) == 10


def test_combinatorial_summary_ignores_prime():
    assert combinatorial_summary(PRIME) == combinatorial_summary(11)
