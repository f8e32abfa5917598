import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def fractions(lo=-6, hi=6, max_den=4):
    return st.builds(Fraction, st.integers(lo, hi), st.integers(1, max_den))


@pytest.fixture(scope="session")
def catalog():
    from solvcx.catalog import load_catalog
    return load_catalog()


@pytest.fixture(scope="session")
def catalog_points(catalog):
    """(label, LieAlgebra, entry, values) at every stored sample point."""
    out = []
    for entry in catalog:
        for vals in entry.points():
            out.append((entry.display_name(vals), entry.algebra(vals, check=False), entry, vals))
    return out


@pytest.fixture(scope="session")
def full_report():
    """One full verification run, shared by the acceptance and verify tests."""
    from solvcx.catalog.verify import verify_all
    return verify_all()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
