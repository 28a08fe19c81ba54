import json
from importlib import resources

import pytest
from hypothesis import settings, strategies as st

from brst_anomaly.graded import GradedPoly
from brst_anomaly.system import ConstraintSystem

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def fixture_data():
    return json.loads(resources.files("brst_anomaly").joinpath("data/fixture.json").read_text())


@pytest.fixture(scope="session")
def fixture_system(fixture_data):
    return ConstraintSystem(**fixture_data["system"])


def monomials(mask=None, max_exp=2):
    ghost = st.sampled_from([0, 1, 2, 3]) if mask is None else st.just(mask)
    return st.tuples(*(st.integers(0, max_exp) for _ in range(4)), ghost)


def graded_polys(mask=None, max_terms=3, max_exp=2):
    """Small polynomials with integer coefficients (exact arithmetic)."""
    return st.dictionaries(
        monomials(mask, max_exp), st.integers(-3, 3).filter(bool), max_size=max_terms
    ).map(GradedPoly)


def homogeneous(parity):
    return st.sampled_from([0, 3] if parity == 0 else [1, 2]).flatmap(
        lambda m: graded_polys(m)
    )


any_parity = st.sampled_from([0, 1]).flatmap(lambda p: st.tuples(st.just(p), homogeneous(p)))
