import numpy as np
import pytest

from opfal.cases import Branch, Bus, Generator, NetworkCase, builtin_case
from opfal.dcopf import (
    ActiveSetLayout,
    InfeasibleError,
    build_dcopf_lp,
    extract_active_set,
    solve_dcopf,
)

from lp_bruteforce import enumerate_lp_min


def single_bus_case():
    return NetworkCase(
        buses=[Bus(id=1, p_demand=50.0, is_ref=True)],
        generators=[Generator(bus=1, cost=5.0, p_min=0.0, p_max=100.0)],
        branches=[],
    )


def three_bus_congested_case():
    # cheap generator at bus 1 walled off by a 25 MW corridor
    return NetworkCase(
        buses=[
            Bus(id=1, is_ref=True),
            Bus(id=2, p_demand=40.0),
            Bus(id=3, p_demand=30.0),
        ],
        generators=[
            Generator(bus=1, cost=5.0, p_min=0.0, p_max=200.0),
            Generator(bus=3, cost=20.0, p_min=0.0, p_max=200.0),
        ],
        branches=[
            Branch(from_bus=1, to_bus=2, susceptance=10.0, flow_limit=25.0),
            Branch(from_bus=2, to_bus=3, susceptance=10.0, flow_limit=60.0),
            Branch(from_bus=1, to_bus=3, susceptance=10.0, flow_limit=25.0),
        ],
    )


def test_single_bus_balance():
    sol = solve_dcopf(single_bus_case(), np.array([30.0]))
    assert sol.p_g == pytest.approx([30.0], abs=1e-9)
    assert sol.objective == pytest.approx(150.0, abs=1e-9)


def test_twobus_uncongested_regime_objective():
    case = builtin_case("twobus")
    sol = solve_dcopf(case, np.array([30.16]))
    assert sol.p_g == pytest.approx([30.16, 0.0], abs=1e-8)
    assert sol.objective == pytest.approx(301.6, abs=1e-8)


def test_twobus_congested_regime_dispatch():
    case = builtin_case("twobus")
    sol = solve_dcopf(case, np.array([40.51]))
    assert sol.p_g == pytest.approx([40.0, 0.51], abs=1e-8)
    # cheap unit saturated, remainder at 30 $/MW
    assert sol.objective == pytest.approx(400.0 + 15.3, abs=1e-6)


def test_three_bus_matches_bruteforce_vertices():
    case = three_bus_congested_case()
    demand = np.array([40.0, 30.0])
    lp = build_dcopf_lp(case, demand)
    oracle = enumerate_lp_min(lp.A, lp.b, lp.c, lp.lo, lp.hi)
    assert oracle is not None
    sol = solve_dcopf(case, demand)
    assert sol.objective == pytest.approx(oracle[0], rel=1e-8)
    # mesh physics caps the cheap export at 35 MW: f12 = 25 forces f13 = 10
    assert sol.p_g[0] == pytest.approx(35.0, abs=1e-6)
    assert sol.flows[0] == pytest.approx(25.0, abs=1e-6)


def test_infeasible_demand_raises_with_residual():
    case = builtin_case("twobus")
    with pytest.raises(InfeasibleError) as exc:
        solve_dcopf(case, np.array([200.0]))
    assert exc.value.residual == pytest.approx(60.0, abs=1e-6)


def test_solution_invariants_hold():
    case = builtin_case("tenbus")
    demand = case.nominal_demand * 0.9
    sol = solve_dcopf(case, demand)
    diff = sol.theta[case.br_from] - sol.theta[case.br_to]
    assert np.allclose(sol.flows, case.base_mva * case.br_b * diff, atol=1e-7)
    assert sol.objective == pytest.approx(float(case.gen_cost @ sol.p_g), abs=1e-7)
    assert sol.cs_residual <= 1e-7
    assert abs(sol.theta[case.ref_pos]) <= 1e-12


def test_active_set_uncongested_twobus():
    case = builtin_case("twobus")
    layout = ActiveSetLayout.from_case(case)
    sol = solve_dcopf(case, np.array([30.16]))
    bits = extract_active_set(case, sol)
    assert bits[layout.gen_upper][0] == 0  # cheap unit below its cap
    assert bits[layout.gen_lower][1] == 1  # expensive unit floored at zero


def test_active_set_congested_twobus():
    case = builtin_case("twobus")
    layout = ActiveSetLayout.from_case(case)
    sol = solve_dcopf(case, np.array([40.51]))
    bits = extract_active_set(case, sol)
    assert bits[layout.gen_upper][0] == 1


def test_active_set_all_zero_when_interior():
    case = single_bus_case()
    sol = solve_dcopf(case, np.array([30.0]))
    bits = extract_active_set(case, sol)
    assert bits[0] == 0 and bits[1] == 0
    assert bits.shape == (2,)


def test_active_set_deterministic():
    case = builtin_case("tenbus")
    demand = case.nominal_demand * 0.95
    a = extract_active_set(case, solve_dcopf(case, demand))
    b = extract_active_set(case, solve_dcopf(case, demand))
    assert np.array_equal(a, b)


def test_gen_bound_bits_not_both_set_unless_pinned():
    case = builtin_case("tenbus")
    layout = ActiveSetLayout.from_case(case)
    for scale in (0.6, 0.8, 0.95, 1.05):
        sol = solve_dcopf(case, case.nominal_demand * scale)
        bits = extract_active_set(case, sol)
        both = bits[layout.gen_lower].astype(bool) & bits[layout.gen_upper].astype(bool)
        pinned = (case.gen_pmax - case.gen_pmin) <= 2e-6
        assert not np.any(both & ~pinned)


def test_monotone_congestion_switch_twobus():
    case = builtin_case("twobus")
    layout = ActiveSetLayout.from_case(case)
    states = []
    for demand in np.linspace(5.0, 55.0, 101):
        sol = solve_dcopf(case, np.array([demand]))
        bits = extract_active_set(case, sol)
        states.append(int(bits[layout.gen_upper][0]))
    flips = sum(1 for a, b in zip(states, states[1:]) if a != b)
    assert states[0] == 0 and states[-1] == 1
    assert flips == 1


def test_angle_bound_binds_on_tenbus_branch():
    # branch 2-7 carries tight +-0.03 rad bounds; push flow through it
    case = builtin_case("tenbus")
    layout = ActiveSetLayout.from_case(case)
    sol = solve_dcopf(case, case.nominal_demand * 1.05)
    bits = extract_active_set(case, sol)
    diff = sol.theta[case.br_from] - sol.theta[case.br_to]
    e = 10  # the 2-7 branch index in the bundled file
    assert case.br_ang_max[e] == pytest.approx(0.03)
    binding = bits[layout.ang_upper][e] or bits[layout.ang_lower][e]
    assert binding == (min(0.03 - diff[e], diff[e] + 0.03) <= 1e-6)
