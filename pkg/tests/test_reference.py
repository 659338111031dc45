"""Reference resonances: exact relation, Newton solver, embedded tables."""

import numpy as np
import pytest

from helmres.errors import ConfigError, DomainError
from helmres.reference import (
    disk_relation,
    newton_resonance,
    reference_table,
    reference_value,
)


def test_relation_vanishes_at_reference():
    lam1 = 9.021766303207 - 0.273829280623j
    scale = abs(disk_relation(1, lam1 * 1.01))  # local magnitude scale
    assert abs(disk_relation(1, lam1)) <= 1e-10 * scale


def test_relation_mode_symmetry():
    lam = 4.0 - 0.3j
    for m in (1, 2, 5):
        a = disk_relation(m, lam)
        b = disk_relation(-m, lam)
        assert min(abs(a - b), abs(a + b)) < 1e-12 * abs(a)


def test_relation_zero_argument():
    with pytest.raises(DomainError):
        disk_relation(0, 0.0)


def test_newton_reproduces_embedded_records():
    for rec in reference_table("single-disk"):
        lam = newton_resonance(rec.m, rec.seed)
        assert abs(lam - rec.lam) <= 1e-11 * abs(rec.lam), rec.j


def test_newton_specific_rows():
    lam = newton_resonance(0, 19.2 - 0.3j)
    assert abs(lam - (19.243876046899 - 0.274713999601j)) < 1e-11 * abs(lam)
    lam = newton_resonance(14, 8.78 - 0.001j)
    assert abs(lam - (8.783835782061 - 0.000247588219j)) < 1e-11 * abs(lam)


def test_reference_tables():
    single = reference_table("single-disk")
    assert len(single) == 6
    assert all(rec.lam.imag < 0 and rec.lam.real > 0 for rec in single)
    dimer = reference_table("dimer")
    assert len(dimer) == 28
    assert abs(reference_value("dimer", 14) - (19.1765650857 - 0.08415304732j)) == 0.0
    assert abs(reference_value("dimer", 28).real - 99.2229411961) == 0.0
    with pytest.raises(ConfigError):
        reference_table("triangle-lattice")
    with pytest.raises(ConfigError):
        reference_value("dimer", 99)
