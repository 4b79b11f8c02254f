import itertools
from fractions import Fraction

import pytest

from irpfl.instance import (GeneratorParams, IapGeneratorParams, IapInstance, Variant,
                            generate_random, generate_random_iap, make_partition_gadget)
from irpfl.lp import LpSolution, build_csiap_lp, build_cssirpfl_lp, build_usirpfl_lp, solve_lp
from irpfl.oracle import exact_iap, min_bins, ww_dp
from irpfl.rounding import (BallSystem, RoundingError, build_balls, latest_half_day,
                            plan_visits_capacitated, plan_visits_uncapacitated, round_csiap,
                            round_cssirpfl, round_usirpfl, select_balls, solve, solve_detailed,
                            unsplit_repack, visits_capacitated, visits_uncapacitated)
from irpfl.schedule import check_schedule

from conftest import two_day_iap, single_vertex, two_vertex, ww_iap

F = Fraction


# -- half-mass days ----------------------------------------------------------

def test_s_star_examples():
    assert latest_half_day({1: F(2, 5), 2: F(3, 10), 3: F(3, 10)}, 3) == 2
    assert latest_half_day({4: F(1)}, 4) == 4
    assert latest_half_day({1: F(1, 2), 2: F(0), 3: F(0)}, 3) == 1


def test_s_star_needs_half_mass():
    with pytest.raises(RoundingError):
        latest_half_day({1: F(1, 3)}, 2)


# -- visit rules -------------------------------------------------------------

def test_uncapacitated_rule_no_overlap():
    plan = visits_uncapacitated({3: 3, 2: 2, 1: 1})
    assert plan.anchors == (3, 2, 1)
    assert plan.assignment == {1: 1, 2: 2, 3: 3}


def test_uncapacitated_rule_merges():
    plan = visits_uncapacitated({3: 2, 2: 1})
    assert plan.anchors == (3,)
    assert plan.assignment == {3: 2, 2: 2}
    assert plan.visit_days == (2,)


def test_capacitated_rule_single_day():
    plan = visits_capacitated({1: 1})
    assert plan.anchors == (1,) and plan.visit_days == (1,)


def test_capacitated_rule_tie_goes_to_latest_deadline():
    plan = visits_capacitated({3: 2, 2: 2, 1: 1})
    assert plan.anchors == (3, 1)
    assert plan.assignment == {3: 2, 2: 2, 1: 1}


def test_capacitated_rule_prefers_latest_half_day():
    # t=2 anchors first (half mass on day 2); its visit also covers t=3
    plan = visits_capacitated({3: 1, 2: 2, 1: 1})
    assert plan.anchors == (2, 1)
    assert plan.assignment == {1: 1, 2: 2, 3: 2}


def _disjoint(intervals):
    iv = sorted(intervals)
    return all(a[1] < b[0] for a, b in zip(iv, iv[1:]))


@pytest.mark.parametrize("seed", range(20))
def test_random_plans_are_disjoint_and_feasible(seed):
    x = generate_random(GeneratorParams(n=2 + seed % 3, T=2 + seed % 3, max_demands=8), seed)
    lp = solve_lp(build_usirpfl_lp(x))
    for v in x.clients:
        for plan in (plan_visits_uncapacitated(lp, v), plan_visits_capacitated(lp, v)):
            assert _disjoint(plan.anchor_intervals())
            for t, day in plan.assignment.items():
                assert plan.s_star[t] <= day <= t
                assert day in plan.visit_days
    c = generate_random(GeneratorParams(n=2 + seed % 2, T=1 + seed % 3, capacity=4,
                                        variant=Variant.CAP_SPLIT, max_demands=6), seed)
    clp = solve_lp(build_cssirpfl_lp(c))
    for v in c.clients:
        plan = plan_visits_capacitated(clp, v)
        assert _disjoint(plan.anchor_intervals())
        assert all(day <= t for t, day in plan.assignment.items())


# -- balls -------------------------------------------------------------------

def test_colocated_ball():
    x = single_vertex()
    lp = solve_lp(build_usirpfl_lp(x))
    b = build_balls(lp, {0: plan_visits_uncapacitated(lp, 0)})
    assert b.seed_radius[0] == 0 and b.balls[0] == {0} and b.cheapest[0] == 0


def test_half_mass_on_far_vertex():
    x = two_vertex()
    model = build_usirpfl_lp(x)
    values = {("Yst", 0, 1, 1, 1): F(1, 2), ("Yst", 1, 1, 1, 1): F(1, 2)}
    lp = LpSolution(model, values, F(0), F(0), F(0), F(0))
    b = build_balls(lp, {1: plan_visits_uncapacitated(lp, 1)})
    assert b.anchor_mass[1] == {1: 1}
    assert b.radius(1) == 4 and b.balls[1] == {0, 1}
    assert b.cheapest[1] == 0


def test_single_client_ball_selected():
    x = two_vertex()
    lp = solve_lp(build_usirpfl_lp(x))
    b = select_balls(build_balls(lp, {1: plan_visits_uncapacitated(lp, 1)}))
    assert b.selected == (1,) and b.opened == {0}


def test_line_metric_selection():
    pts = [F(0), F(3, 2), F(10)]
    w = [[abs(a - b) for b in pts] for a in pts]
    radii = {0: F(1), 1: F(2), 2: F(3, 2)}
    balls = {v: frozenset(u for u in range(3) if w[u][v] <= r) for v, r in radii.items()}
    system = BallSystem(w, {}, {v: r / 4 for v, r in radii.items()}, balls, {v: v for v in balls})
    sel = select_balls(system)
    assert sel.selected == (0, 2)
    assert sel.facility_of == {0: 0, 1: 0, 2: 2}


def test_low_mass_ball_is_an_error():
    w = [[F(0)]]
    system = BallSystem(w, {}, {0: F(0)}, {0: frozenset({0})}, {0: 0}, z_mass={0: F(1, 5)})
    with pytest.raises(RoundingError):
        select_balls(system)


@pytest.mark.parametrize("seed", range(10))
def test_cheapest_facility_in_ball(seed):
    x = generate_random(GeneratorParams(n=4, T=3, max_demands=7), 40 + seed)
    sol = solve_detailed(x)
    b = sol.balls
    for v, ball in b.balls.items():
        assert b.cheapest[v] in ball
        assert all(x.facility_costs[b.cheapest[v]] <= x.facility_costs[q] for q in ball)
    for v in b.selected:
        assert b.z_mass[v] >= F(1, 4)


# -- repacking ---------------------------------------------------------------

def test_repack_examples():
    assert unsplit_repack([3, 3, 2, 2], 5, 2) == [[3, 2], [3, 2]]
    assert unsplit_repack([4, 4, 4], 5, 3) == [[4], [4], [4]]
    assert unsplit_repack([5], 5, 1) == [[5]]


def test_repack_rejects_oversize():
    with pytest.raises(ValueError):
        unsplit_repack([6], 5)


def test_repack_two_for_one_example_is_optimal():
    # two bins are necessary and enough for {3,3,2,2} in capacity 5
    assert len(min_bins(tuple(map(F, [3, 3, 2, 2])), F(5))) == 2


@pytest.mark.parametrize("sizes", [s for r in range(1, 6)
                                   for s in itertools.combinations_with_replacement(range(1, 7), r)])
def test_repack_properties(sizes):
    U = F(6)
    n_split = -(-sum(sizes) // 6)
    trips = unsplit_repack(sizes, U, n_split)
    loads = [sum(t) for t in trips]
    assert sorted(a for t in trips for a in t) == sorted(F(a) for a in sizes)
    assert all(x <= U for x in loads)
    assert len(trips) <= 2 * n_split
    assert sum(1 for x in loads if x <= U / 2) <= 1
    assert sum(1 for a in sizes if a > 3) <= len(trips)


# -- end to end --------------------------------------------------------------

def test_round_single_vertex():
    x = single_vertex()
    s = round_usirpfl(x, solve_lp(build_usirpfl_lp(x)))
    assert s.total == 5 and s.opened == {0}


def test_round_two_vertex_hits_optimum():
    x = two_vertex()
    s = round_usirpfl(x, solve_lp(build_usirpfl_lp(x)))
    assert s.total == 3 and s.opened == {0}
    assert check_schedule(x, s) == []


def test_round_csiap_example():
    x = two_day_iap()
    s = round_csiap(x, solve_lp(build_csiap_lp(x)))
    assert s.total == 2
    assert [d.day for d in s.deliveries] == [1, 2]


def test_round_csiap_single_full_demand():
    x = IapInstance.create(3, {2: 4}, {(1, 2): 1, (2, 2): 0}, capacity=4, variant=Variant.CAP_SPLIT)
    s = round_csiap(x, solve_lp(build_csiap_lp(x)))
    assert s.total == 3 and len(s.deliveries[0].trips) == 1


def test_round_cssirpfl_examples():
    x = single_vertex(d=3, capacity=3, variant=Variant.CAP_SPLIT)
    assert round_cssirpfl(x, solve_lp(build_cssirpfl_lp(x))).total == 5
    y = two_vertex(d=4, capacity=2, variant=Variant.CAP_SPLIT)
    s = round_cssirpfl(y, solve_lp(build_cssirpfl_lp(y)))
    assert s.total == 5 and s.trips_on(1, 1) == 2


def test_solve_gadget():
    g = make_partition_gadget([1, 2, 3, 4], 7)
    sol = solve_detailed(g)
    assert check_schedule(g, sol.schedule) == []
    assert 14 <= sol.schedule.total <= 6 * sol.lp.objective
    assert sol.schedule.holding_cost == sol.split_schedule.holding_cost


def test_solve_uncapacitated_iap_is_exact():
    x = ww_iap()
    s = solve(x)
    assert s.total == 7 == ww_dp(x).optimum


def test_solve_propagates_validation():
    from irpfl.instance import InstanceError
    with pytest.raises(InstanceError):
        solve(single_vertex(d=7, capacity=5, variant=Variant.CAP_SPLIT))


@pytest.mark.parametrize("seed", range(15))
def test_unsplittable_iap_properties(seed):
    x = generate_random_iap(IapGeneratorParams(T=2 + seed % 4, capacity=6, variant=Variant.CAP_UNSPLIT,
                                               items_per_day=2, demand_range=(1, 6)), seed)
    sol = solve_detailed(x)
    assert check_schedule(x, sol.schedule) == []
    assert check_schedule(x, sol.split_schedule, unsplittable=False) == []
    assert sol.schedule.holding_cost == sol.split_schedule.holding_cost
    assert sol.schedule.total <= 2 * sol.split_schedule.total
    assert all(r.unsplit_trips <= 2 * r.split_trips for r in sol.repacks)
    assert sol.schedule.total >= exact_iap(x).optimum
