from fractions import Fraction

import pytest

from irpfl.instance import IapInstance, Instance, Variant


def single_vertex(f=5, d=1, capacity=None, variant=Variant.UNCAP) -> Instance:
    return Instance.create(weights=[[0]], demands={(0, 1): d}, holding={(0, 1, 1): 0},
                           facility_costs=[f], capacity=capacity, variant=variant)


def two_vertex(d=1, capacity=None, variant=Variant.UNCAP, f_u=1, f_v=100) -> Instance:
    # facility candidate u=0, client v=1, distance 2
    return Instance.create(weights=[[0, 2], [2, 0]], demands={(1, 1): d},
                           holding={(1, 1, 1): 0}, facility_costs=[f_u, f_v],
                           capacity=capacity, variant=variant)


def two_day_iap(variant=Variant.CAP_SPLIT) -> IapInstance:
    # U=1, W=1, unit demands on days 1 and 2, expensive early delivery
    return IapInstance.create(distance=1, demands={1: 1, 2: 1},
                              holding={(1, 1): 0, (1, 2): 10, (2, 2): 0},
                              capacity=1, variant=variant)


def ww_iap(W=4, T=3) -> IapInstance:
    # unit demands on every day, holding t - s
    return IapInstance.create(distance=W, demands={t: 1 for t in range(1, T + 1)},
                              holding={(s, t): t - s for t in range(1, T + 1) for s in range(1, t + 1)})


@pytest.fixture
def half():
    return Fraction(1, 2)


# one summary line per acceptance criterion, shown at the end of every run
CRITERIA: dict[str, str] = {}


def record(label: str, ok: bool, detail: str) -> None:
    CRITERIA[label] = f"criterion {label}: {'PASS' if ok else 'FAIL'} {detail}"
    print(CRITERIA[label])


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])
