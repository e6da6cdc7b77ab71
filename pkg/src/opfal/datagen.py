"""Regime-conditioned demand sampling and dataset bookkeeping.

A sample at regime t multiplies the nominal load bus-wise by three factors:
a per-bus regime multiplier m_i drawn uniformly from the regime interval, a
single regional scalar d shared by all buses, and per-bus individual noise
eps_i drawn log-normally and clipped. Labeled generation resamples demands
the solver cannot serve; pool generation skips the solver entirely, so both
consume the random stream identically per draw and produce matching
sequences whenever every draw is feasible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .cases import NetworkCase
from .dcopf import OpfSolution, active_set_size, extract_active_set, solve_dcopf, InfeasibleError


class GenerationStalledError(RuntimeError):
    """Too many consecutive infeasible draws while generating a dataset."""


@dataclass(frozen=True)
class Regime:
    name: str
    lo: float
    hi: float


@dataclass(frozen=True)
class RegimeSpec:
    regimes: tuple = (
        Regime("low", 0.55, 0.70),
        Regime("mid", 0.70, 0.85),
        Regime("high", 0.85, 1.00),
    )

    def __post_init__(self):
        names = [r.name for r in self.regimes]
        if len(set(names)) != len(names):
            raise ValueError("regime names must be unique")
        for r in self.regimes:
            if r.lo < 0 or r.hi <= r.lo:
                raise ValueError(f"regime {r.name}: bad interval [{r.lo}, {r.hi})")

    def get(self, name: str) -> Regime:
        for r in self.regimes:
            if r.name == name:
                return r
        raise KeyError(f"unknown regime {name!r}")


@dataclass(frozen=True)
class PerturbationSpec:
    regional_lo: float = 0.8
    regional_hi: float = 1.2
    noise_mu: float = 0.0
    noise_sigma: float = 0.15
    noise_clip_lo: float = 0.5
    noise_clip_hi: float = 2.0

    def __post_init__(self):
        if self.regional_hi < self.regional_lo:
            raise ValueError("empty regional interval")
        if self.noise_sigma < 0:
            raise ValueError("noise sigma must be nonnegative")


@dataclass
class LabeledInstance:
    index: int
    regime: str
    x: np.ndarray
    solution: OpfSolution
    bits: np.ndarray


@dataclass
class UnlabeledDraw:
    index: int
    regime: str
    x: np.ndarray


@dataclass
class InstancePool:
    """Labeled training set D plus the unlabeled pool D_p, with stable indices."""

    labeled: list = field(default_factory=list)
    unlabeled: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    @property
    def n_labeled(self) -> int:
        return len(self.labeled)

    @property
    def n_unlabeled(self) -> int:
        return len(self.unlabeled)

    def unlabeled_indices(self) -> list:
        return sorted(self.unlabeled)


def draw_components(case: NetworkCase, regime: Regime, pspec: PerturbationSpec, rng):
    """One sample's raw factors (m per bus, regional d, clipped eps per bus)."""
    n = case.n_loads
    m = rng.uniform(regime.lo, regime.hi, size=n)
    d = rng.uniform(pspec.regional_lo, pspec.regional_hi)
    eps = rng.lognormal(pspec.noise_mu, pspec.noise_sigma, size=n)
    eps = np.clip(eps, pspec.noise_clip_lo, pspec.noise_clip_hi)
    return m, d, eps


def sample_demand(
    case: NetworkCase,
    regime_name: str,
    rspec: RegimeSpec,
    pspec: PerturbationSpec,
    rng,
) -> np.ndarray:
    """Draw one demand vector: x_i = d * m_i * x0_i * eps_i."""
    regime = rspec.get(regime_name)
    m, d, eps = draw_components(case, regime, pspec, rng)
    return d * m * case.nominal_demand * eps


def _label(case: NetworkCase, x: np.ndarray, eps_active: float):
    try:
        sol = solve_dcopf(case, x)
    except InfeasibleError:
        return None
    return sol, extract_active_set(case, sol, eps_active)


def _per_regime_counts(rspec: RegimeSpec, n) -> list:
    if isinstance(n, int):
        return [n] * len(rspec.regimes)
    counts = list(n)
    if len(counts) != len(rspec.regimes):
        raise ValueError("one count per regime required")
    return counts


def generate_labeled(
    case: NetworkCase,
    rspec: RegimeSpec,
    pspec: PerturbationSpec,
    n_per_regime,
    rng,
    *,
    eps_active: float = 1e-6,
    stall_factor: int = 100,
) -> list:
    """Labeled instances, one block per regime, resampling infeasible draws.

    ``n_per_regime`` is an int (same count per regime) or a per-regime list.
    Raises GenerationStalledError after ``stall_factor * N`` consecutive
    infeasible draws.
    """
    counts = _per_regime_counts(rspec, n_per_regime)
    out = []
    index = 0
    for regime, count in zip(rspec.regimes, counts):
        stall_limit = stall_factor * max(count, 1)
        consecutive_bad = 0
        produced = 0
        while produced < count:
            x = sample_demand(case, regime.name, rspec, pspec, rng)
            labeled = _label(case, x, eps_active)
            if labeled is None:
                consecutive_bad += 1
                if consecutive_bad >= stall_limit:
                    raise GenerationStalledError(
                        f"{consecutive_bad} consecutive infeasible draws in regime "
                        f"{regime.name!r}"
                    )
                continue
            consecutive_bad = 0
            sol, bits = labeled
            out.append(LabeledInstance(index=index, regime=regime.name, x=x, solution=sol, bits=bits))
            index += 1
            produced += 1
    return out


def generate_pool(
    case: NetworkCase,
    rspec: RegimeSpec,
    pspec: PerturbationSpec,
    n_per_regime,
    rng,
) -> dict:
    """Unlabeled demands with stable indices 0..N-1; no feasibility check."""
    counts = _per_regime_counts(rspec, n_per_regime)
    out = {}
    index = 0
    for regime, count in zip(rspec.regimes, counts):
        for _ in range(count):
            x = sample_demand(case, regime.name, rspec, pspec, rng)
            out[index] = UnlabeledDraw(index=index, regime=regime.name, x=x)
            index += 1
    return out


def label_on_demand(pool: InstancePool, indices, oracle) -> list:
    """Label selected pool entries, moving them from unlabeled to labeled.

    Infeasible instances are removed from the pool, recorded in
    ``pool.skipped`` and omitted from the result. Requesting an index that is
    not in the unlabeled pool raises KeyError.
    """
    indices = list(indices)
    if not indices:
        return []
    if len(set(indices)) != len(indices):
        raise KeyError("duplicate indices in labeling request")
    for idx in indices:
        if idx not in pool.unlabeled:
            raise KeyError(f"index {idx} is not in the unlabeled pool (already labeled?)")
    draws = [pool.unlabeled[idx] for idx in indices]
    results = oracle([d.x for d in draws])
    labeled = []
    for draw, res in zip(draws, results):
        del pool.unlabeled[draw.index]
        if res is None:
            pool.skipped.append(draw.index)
            continue
        sol, bits = res
        inst = LabeledInstance(
            index=draw.index, regime=draw.regime, x=draw.x, solution=sol, bits=bits
        )
        pool.labeled.append(inst)
        labeled.append(inst)
    return labeled


def xy_matrices(instances) -> tuple:
    """Stack instances into (X, Y) with Y = [p_g | theta] per row."""
    X = np.stack([inst.x for inst in instances])
    Y = np.stack(
        [np.concatenate([inst.solution.p_g, inst.solution.theta]) for inst in instances]
    )
    return X, Y


def bits_matrix(instances) -> np.ndarray:
    return np.stack([inst.bits for inst in instances]).astype(float)


def write_labeled_csv(path: str, instances, case: NetworkCase) -> None:
    n_x = case.n_loads
    n_g = case.n_generators
    n_b = case.n_buses
    k = active_set_size(case)
    header = (
        ["index", "regime"]
        + [f"x_{i}" for i in range(n_x)]
        + [f"pg_{i}" for i in range(n_g)]
        + [f"theta_{i}" for i in range(n_b)]
        + ["objective"]
        + [f"a_{i}" for i in range(k)]
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for inst in instances:
            row = [inst.index, inst.regime]
            row += [repr(float(v)) for v in inst.x]
            row += [repr(float(v)) for v in inst.solution.p_g]
            row += [repr(float(v)) for v in inst.solution.theta]
            row.append(repr(float(inst.solution.objective)))
            row += [int(b) for b in inst.bits]
            w.writerow(row)


def read_labeled_csv(path: str, case: NetworkCase) -> list:
    n_x, n_g, n_b = case.n_loads, case.n_generators, case.n_buses
    k = active_set_size(case)
    out = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        expected = 2 + n_x + n_g + n_b + 1 + k
        if len(header) != expected:
            raise ValueError(f"labeled CSV has {len(header)} columns, expected {expected}")
        for row in reader:
            pos = 2
            x = np.array([float(v) for v in row[pos : pos + n_x]]); pos += n_x
            p_g = np.array([float(v) for v in row[pos : pos + n_g]]); pos += n_g
            theta = np.array([float(v) for v in row[pos : pos + n_b]]); pos += n_b
            objective = float(row[pos]); pos += 1
            bits = np.array([int(v) for v in row[pos:]], dtype=np.uint8)
            flows = case.base_mva * case.br_b * (theta[case.br_from] - theta[case.br_to])
            sol = OpfSolution(p_g=p_g, theta=theta, flows=flows, objective=objective)
            out.append(
                LabeledInstance(index=int(row[0]), regime=row[1], x=x, solution=sol, bits=bits)
            )
    return out


def write_unlabeled_csv(path: str, draws: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        first = next(iter(draws.values())) if draws else None
        n_x = len(first.x) if first is not None else 0
        w.writerow(["index", "regime"] + [f"x_{i}" for i in range(n_x)])
        for idx in sorted(draws):
            d = draws[idx]
            w.writerow([d.index, d.regime] + [repr(float(v)) for v in d.x])


def read_unlabeled_csv(path: str) -> dict:
    out = {}
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            idx = int(row[0])
            out[idx] = UnlabeledDraw(
                index=idx, regime=row[1], x=np.array([float(v) for v in row[2:]])
            )
    return out
