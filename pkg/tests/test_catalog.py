import math

import numpy as np
import pytest
from scipy.special import erfcx

from laplace_tails.catalog import (
    FAMILIES, lookup, mittag_leffler_half_density, quadratic_tail_density, resolve,
)
from laplace_tails.errors import LaplaceTailsError
from laplace_tails.inversion import invert_density

NAMES = ["log1p", "iterlog:2", "stable:1", "relativistic:1:1", "stablelog:1", "powres:0.5",
         "logres", "logpowres:0.5", "quadtail", "geometric", "lebesgue", "pointmass",
         "resolvent:log1p", "resolvent:stable:1"]


@pytest.mark.parametrize("name", NAMES)
def test_entries_parse_and_evaluate(name):
    entry = lookup(name)
    assert entry.kind in ("cm", "bf")
    assert math.isfinite(entry.expr(1.0))


def test_families_cover_registry():
    keys = {k.split(":")[0] for k in FAMILIES}
    assert {n.split(":")[0] for n in NAMES} == keys


def test_bad_names():
    for bad in ("nope", "stable:3", "powres:1.5", "stable:abc", "resolvent:geometric"):
        with pytest.raises(LaplaceTailsError):
            lookup(bad)


def test_resolve_falls_back_to_formula():
    assert resolve("1/(2+x)").note == "user formula"
    assert resolve("geometric").name == "geometric"


def test_mittag_leffler_branches_join():
    t = np.array([99.999, 100.001])
    direct = 1 / np.sqrt(math.pi * t) - erfcx(np.sqrt(t))
    assert mittag_leffler_half_density(t) == pytest.approx(direct, rel=1e-9)


def test_quadratic_tail_branches_join():
    t = np.array([0.49999, 0.5])
    vals = quadratic_tail_density(t)
    assert vals[0] == pytest.approx(vals[1], rel=1e-4)
    # behaves like t/3 near zero and 2/t^2 at infinity
    assert quadratic_tail_density(np.array([1e-6]))[0] == pytest.approx(1e-6 / 3, rel=1e-5)
    assert quadratic_tail_density(np.array([1e3]))[0] == pytest.approx(2e-6, rel=1e-9)


@pytest.mark.parametrize("name, t", [("powres:0.5", 0.7), ("quadtail", 2.0), ("geometric", 1.5)])
def test_closed_forms_agree_with_inversion(name, t):
    entry = lookup(name)
    assert invert_density(entry.expr, t, 64, richardson=2) == pytest.approx(float(entry.density(np.array([t]))[0]), rel=1e-3)


def test_relativistic_levy_density_reconstructs_phi():
    from laplace_tails.bernstein import triple_of
    entry = lookup("relativistic:1:1")
    tri = triple_of(entry.expr, levy=entry.density)
    assert tri.reconstruct(2.0) == pytest.approx(math.sqrt(3) - 1, rel=1e-9)
