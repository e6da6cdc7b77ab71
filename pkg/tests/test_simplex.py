import numpy as np
import pytest

from opfal.simplex import (
    InfeasibleLpError,
    LpProblem,
    UnboundedLpError,
    solve_lp,
)

from lp_bruteforce import enumerate_lp_min


def test_single_equality_picks_cheap_generator():
    # min 5 x1 + 9 x2  s.t.  x1 + x2 = 30, 0 <= xi <= 100
    lp = LpProblem(c=[5.0, 9.0], A=[[1.0, 1.0]], b=[30.0], lo=[0.0, 0.0], hi=[100.0, 100.0])
    res = solve_lp(lp)
    assert res.objective == pytest.approx(150.0, abs=1e-9)
    assert res.x == pytest.approx([30.0, 0.0], abs=1e-9)
    assert res.cs_residual <= 1e-7


def test_upper_bound_forces_spill_to_expensive_column():
    lp = LpProblem(c=[1.0, 4.0], A=[[1.0, 1.0]], b=[50.0], lo=[0.0, 0.0], hi=[20.0, 100.0])
    res = solve_lp(lp)
    assert res.x == pytest.approx([20.0, 30.0], abs=1e-9)
    assert res.objective == pytest.approx(140.0, abs=1e-9)


def test_negative_cost_pushes_to_upper_bound():
    lp = LpProblem(c=[-1.0, 0.0], A=[[1.0, 1.0]], b=[5.0], lo=[0.0, 0.0], hi=[10.0, 10.0])
    res = solve_lp(lp)
    assert res.x == pytest.approx([5.0, 0.0], abs=1e-9)


def test_box_only_problem():
    lp = LpProblem(c=[3.0, -2.0, 0.0], A=np.zeros((0, 3)), b=[], lo=[-1.0, -1.0, -1.0], hi=[2.0, 2.0, 2.0])
    res = solve_lp(lp)
    assert res.x == pytest.approx([-1.0, 2.0, -1.0])


def test_infeasible_reports_phase1_residual():
    # total upper bound 10 cannot reach 25
    lp = LpProblem(c=[1.0, 1.0], A=[[1.0, 1.0]], b=[25.0], lo=[0.0, 0.0], hi=[5.0, 5.0])
    with pytest.raises(InfeasibleLpError) as exc:
        solve_lp(lp)
    assert exc.value.residual == pytest.approx(15.0, abs=1e-6)


def test_unbounded_detected():
    # row 0*x = 0 leaves x1 free to run to +inf with negative cost
    lp = LpProblem(c=[-1.0], A=[[0.0]], b=[0.0], lo=[0.0], hi=[np.inf])
    with pytest.raises(UnboundedLpError):
        solve_lp(lp)


def test_fixed_variable_respected():
    lp = LpProblem(
        c=[1.0, 1.0],
        A=[[1.0, 1.0]],
        b=[7.0],
        lo=[3.0, 0.0],
        hi=[3.0, 10.0],
    )
    res = solve_lp(lp)
    assert res.x == pytest.approx([3.0, 4.0], abs=1e-9)


def _random_boxed_lp(rng, m, n):
    A = rng.normal(size=(m, n))
    lo = rng.uniform(-5.0, 0.0, size=n)
    hi = lo + rng.uniform(0.5, 6.0, size=n)
    interior = lo + (hi - lo) * rng.uniform(0.2, 0.8, size=n)
    b = A @ interior
    c = rng.normal(size=n)
    return LpProblem(c=c, A=A, b=b, lo=lo, hi=hi)


def test_random_lps_match_bruteforce_enumeration():
    rng = np.random.default_rng(20240817)
    for trial in range(60):
        m = int(rng.integers(1, 4))
        n = m + int(rng.integers(1, 4))
        lp = _random_boxed_lp(rng, m, n)
        res = solve_lp(lp)
        oracle = enumerate_lp_min(lp.A, lp.b, lp.c, lp.lo, lp.hi)
        assert oracle is not None, f"trial {trial}: oracle found no vertex"
        ref_obj, _ = oracle
        scale = max(1.0, abs(ref_obj))
        assert abs(res.objective - ref_obj) / scale < 1e-8, f"trial {trial}"
        assert res.cs_residual <= 1e-7
        assert np.max(np.abs(lp.A @ res.x - lp.b)) < 1e-7


def test_degenerate_lp_terminates():
    # many redundant rows pinning the same point; exercises degenerate pivots
    A = np.array(
        [
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 1.0],
        ]
    )
    b = np.array([2.0, 2.0, 1.0])
    lp = LpProblem(c=[1.0, 2.0, 3.0, 1.0], A=A, b=b, lo=np.zeros(4), hi=np.full(4, 10.0))
    res = solve_lp(lp)
    assert res.objective == pytest.approx(3.0, abs=1e-9)  # x = [2,0,0,1]
