"""DC optimal power flow as a boxed-variable LP, plus binding-set extraction.

LP variables are generator dispatch, bus angles, and one range variable per
branch for the flow and for the angle difference. Flow rows tie
``flow = susceptance * base_mva * (theta_from - theta_to)``; balance rows
conserve active power at each bus; the reference angle is fixed at zero.
Angles are boxed by a bound loose enough to never bind (any feasible angle
is within n_buses * max_angle_bound of the reference along some path), so
the LP keeps every variable boxed without changing its optima.

The binding-set bit layout is fixed per case:
``[gen lower | gen upper | flow upper | flow lower | angle upper | angle lower]``
giving ``K = 2 * n_generators + 4 * n_branches`` bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cases import NetworkCase
from .simplex import InfeasibleLpError, LpProblem, solve_lp

EPS_FEAS = 1e-7
EPS_ACTIVE = 1e-6
EPS_CS = 1e-7


class InfeasibleError(RuntimeError):
    """The demand cannot be served within the case limits."""

    def __init__(self, residual: float):
        super().__init__(
            f"demand not deliverable; phase-1 imbalance {residual:.6g} MW"
        )
        self.residual = residual


@dataclass
class OpfSolution:
    """Dispatch, angles and flows of one solved instance.

    ``cs_residual`` and ``duality_gap`` are solver diagnostics (largest
    complementarity product and their sum).
    """

    p_g: np.ndarray
    theta: np.ndarray
    flows: np.ndarray
    objective: float
    cs_residual: float = 0.0
    duality_gap: float = 0.0


@dataclass(frozen=True)
class ActiveSetLayout:
    """Slice map for the fixed binding-set bit ordering of a case."""

    n_gen: int
    n_branch: int

    @classmethod
    def from_case(cls, case: NetworkCase) -> "ActiveSetLayout":
        return cls(case.n_generators, case.n_branches)

    @property
    def size(self) -> int:
        return 2 * self.n_gen + 4 * self.n_branch

    @property
    def gen_lower(self) -> slice:
        return slice(0, self.n_gen)

    @property
    def gen_upper(self) -> slice:
        return slice(self.n_gen, 2 * self.n_gen)

    @property
    def flow_upper(self) -> slice:
        base = 2 * self.n_gen
        return slice(base, base + self.n_branch)

    @property
    def flow_lower(self) -> slice:
        base = 2 * self.n_gen + self.n_branch
        return slice(base, base + self.n_branch)

    @property
    def ang_upper(self) -> slice:
        base = 2 * self.n_gen + 2 * self.n_branch
        return slice(base, base + self.n_branch)

    @property
    def ang_lower(self) -> slice:
        base = 2 * self.n_gen + 3 * self.n_branch
        return slice(base, base + self.n_branch)

    def labels(self) -> list[str]:
        out = [f"pg_min[{i}]" for i in range(self.n_gen)]
        out += [f"pg_max[{i}]" for i in range(self.n_gen)]
        out += [f"flow_max[{e}]" for e in range(self.n_branch)]
        out += [f"flow_min[{e}]" for e in range(self.n_branch)]
        out += [f"ang_max[{e}]" for e in range(self.n_branch)]
        out += [f"ang_min[{e}]" for e in range(self.n_branch)]
        return out


def active_set_size(case: NetworkCase) -> int:
    return 2 * case.n_generators + 4 * case.n_branches


def build_dcopf_lp(case: NetworkCase, demand: np.ndarray) -> LpProblem:
    """Assemble the DC-OPF LP for one demand vector (MW at load buses)."""
    d_bus = case.full_demand(demand)
    n_g, n_b, n_e = case.n_generators, case.n_buses, case.n_branches
    pg0, th0 = 0, n_g
    fl0, ad0 = n_g + n_b, n_g + n_b + n_e
    n = n_g + n_b + 2 * n_e
    m = n_b + 2 * n_e

    A = np.zeros((m, n))
    b = np.zeros(m)

    # nodal balance: sum(pg at bus) - outgoing flows + incoming flows = demand
    for g in range(n_g):
        A[case.gen_bus[g], pg0 + g] = 1.0
    for e in range(n_e):
        A[case.br_from[e], fl0 + e] -= 1.0
        A[case.br_to[e], fl0 + e] += 1.0
    b[:n_b] = d_bus

    # flow definition: base * b_e * (theta_from - theta_to) - flow = 0
    coeff = case.base_mva * case.br_b
    for e in range(n_e):
        row = n_b + e
        A[row, th0 + case.br_from[e]] = coeff[e]
        A[row, th0 + case.br_to[e]] = -coeff[e]
        A[row, fl0 + e] = -1.0

    # angle difference: theta_from - theta_to - diff = 0
    for e in range(n_e):
        row = n_b + n_e + e
        A[row, th0 + case.br_from[e]] = 1.0
        A[row, th0 + case.br_to[e]] = -1.0
        A[row, ad0 + e] = -1.0

    lo = np.empty(n)
    hi = np.empty(n)
    lo[pg0:th0] = case.gen_pmin
    hi[pg0:th0] = case.gen_pmax
    ang_mag = 1.0
    if n_e:
        ang_mag = float(np.max(np.abs(np.stack([case.br_ang_min, case.br_ang_max]))))
    theta_box = n_b * ang_mag + 1.0
    lo[th0:fl0] = -theta_box
    hi[th0:fl0] = theta_box
    lo[th0 + case.ref_pos] = 0.0
    hi[th0 + case.ref_pos] = 0.0
    lo[fl0:ad0] = -case.br_limit
    hi[fl0:ad0] = case.br_limit
    lo[ad0:] = case.br_ang_min
    hi[ad0:] = case.br_ang_max

    c = np.zeros(n)
    c[pg0:th0] = case.gen_cost
    return LpProblem(c=c, A=A, b=b, lo=lo, hi=hi)


def solve_dcopf(case: NetworkCase, demand: np.ndarray, *, eps_feas: float = EPS_FEAS) -> OpfSolution:
    """Cost-minimizing dispatch for one demand vector.

    Raises InfeasibleError when the demand exceeds deliverable capacity; the
    error carries the phase-1 imbalance in MW.
    """
    lp = build_dcopf_lp(case, demand)
    assert np.all(np.isfinite(lp.lo)) and np.all(np.isfinite(lp.hi))
    try:
        res = solve_lp(lp, feas_tol=eps_feas)
    except InfeasibleLpError as exc:
        raise InfeasibleError(exc.residual) from exc

    n_g, n_b = case.n_generators, case.n_buses
    p_g = res.x[:n_g]
    theta = res.x[n_g : n_g + n_b]
    flows = case.base_mva * case.br_b * (theta[case.br_from] - theta[case.br_to])
    objective = float(case.gen_cost @ p_g)

    balance = np.zeros(n_b)
    np.add.at(balance, case.gen_bus, p_g)
    np.subtract.at(balance, case.br_from, flows)
    np.add.at(balance, case.br_to, flows)
    residual = float(np.max(np.abs(balance - case.full_demand(demand)), initial=0.0))
    if residual > eps_feas:
        raise RuntimeError(f"solver returned imbalanced dispatch ({residual:.3g} MW)")

    return OpfSolution(
        p_g=p_g,
        theta=theta,
        flows=flows,
        objective=objective,
        cs_residual=res.cs_residual,
        duality_gap=res.duality_gap,
    )


def extract_active_set(
    case: NetworkCase, sol: OpfSolution, eps_active: float = EPS_ACTIVE
) -> np.ndarray:
    """Binding-constraint bits of a feasible solution (slack within tolerance).

    Pure function of the solution: under degenerate optima the bits follow
    whichever optimal point the solver returned.
    """
    layout = ActiveSetLayout.from_case(case)
    bits = np.zeros(layout.size, dtype=np.uint8)
    diff = sol.theta[case.br_from] - sol.theta[case.br_to]
    bits[layout.gen_lower] = (sol.p_g - case.gen_pmin) <= eps_active
    bits[layout.gen_upper] = (case.gen_pmax - sol.p_g) <= eps_active
    bits[layout.flow_upper] = (case.br_limit - sol.flows) <= eps_active
    bits[layout.flow_lower] = (sol.flows + case.br_limit) <= eps_active
    bits[layout.ang_upper] = (case.br_ang_max - diff) <= eps_active
    bits[layout.ang_lower] = (diff - case.br_ang_min) <= eps_active
    return bits
