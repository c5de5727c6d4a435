import numpy as np
import pytest

from weakkac import crossed as cr
from weakkac import kernels
from weakkac import weak_kac as wk
from weakkac.config import ToleranceConfig


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # pay the JIT cost once, before anything is timed
    kernels.warmup()


@pytest.fixture(scope="session")
def cfg():
    return ToleranceConfig()


@pytest.fixture(scope="session")
def z2():
    return wk.from_group(wk.cyclic_group_table(2), name="Z2")


@pytest.fixture(scope="session")
def z3():
    return wk.from_group(wk.cyclic_group_table(3), name="Z3")


@pytest.fixture(scope="session")
def z5():
    return wk.from_group(wk.cyclic_group_table(5), name="Z5")


@pytest.fixture(scope="session")
def pair2():
    return wk.from_pair_groupoid(2)


@pytest.fixture(scope="session")
def pair3():
    return wk.from_pair_groupoid(3)


@pytest.fixture(scope="session")
def ds23(z2, z3):
    return wk.direct_sum(z2, z3)


@pytest.fixture(scope="session")
def z2_data(z2, cfg):
    return wk.analyze(z2, cfg)


@pytest.fixture(scope="session")
def z3_data(z3, cfg):
    return wk.analyze(z3, cfg)


@pytest.fixture(scope="session")
def pair2_data(pair2, cfg):
    return wk.analyze(pair2, cfg)


@pytest.fixture(scope="session")
def pair3_data(pair3, cfg):
    return wk.analyze(pair3, cfg)


@pytest.fixture(scope="session")
def ds23_data(ds23, cfg):
    return wk.analyze(ds23, cfg)


@pytest.fixture(scope="session")
def dim8_input(z2, cfg):
    # the order-2 group algebra sitting inside its own dual gives the
    # smallest genuinely weak two-sided example
    return cr.kac_subalgebra_input(z2, np.eye(2), cfg)


@pytest.fixture(scope="session")
def dim8(dim8_input, cfg):
    out, rep = cr.two_sided_crossed_product(dim8_input, cfg)
    assert rep.ok, rep.render()
    return out


@pytest.fixture(scope="session")
def dim8_data(dim8, cfg):
    return wk.analyze(dim8, cfg)
