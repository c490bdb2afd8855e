import pytest

from hexopt import (
    PAPER_MATERIALS,
    FlowConstants,
    NondimDesign,
    ReferenceScales,
    builtin_paper_scenario,
)


@pytest.fixture(scope="session")
def table2():
    return builtin_paper_scenario("table2")


@pytest.fixture(scope="session")
def air(table2):
    return table2.fluid


@pytest.fixture(scope="session")
def scales(table2):
    return ReferenceScales.from_fluid(table2.fluid, table2.t_ref, table2.reference_dp, table2.dp)


@pytest.fixture(scope="session")
def consts():
    return FlowConstants()


@pytest.fixture(scope="session")
def steel():
    return PAPER_MATERIALS["austenitic_steel"]


@pytest.fixture(scope="session")
def baseline_design(table2):
    b = table2.baseline
    return NondimDesign(b.L / table2.t_ref, b.D / table2.t_ref, b.t / table2.t_ref)
