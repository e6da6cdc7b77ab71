"""Network data model: buses, generators, branches, with parsing and validation.

Case files are JSON documents with top-level keys ``base_mva``, ``buses``,
``generators`` and ``branches`` (schema in the README). All power quantities
are MW; susceptance is per-unit and branch flow is
``susceptance * base_mva * (theta_i - theta_j)``.

Reserved fields (reactive demand, voltage bounds, shunts) may appear in case
files and are ignored by the DC machinery.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

DEFAULT_ANGLE_BOUND = math.pi / 2

BUILTIN_CASES = ("twobus", "tenbus")


class CaseError(ValueError):
    """Base class for case-file problems."""


class CaseParseError(CaseError):
    """The document does not conform to the case schema."""


class CaseValidationError(CaseError):
    """The document parses but violates a network invariant."""


@dataclass
class Bus:
    id: int
    p_demand: float = 0.0
    is_ref: bool = False


@dataclass
class Generator:
    bus: int
    cost: float
    p_min: float
    p_max: float


@dataclass
class Branch:
    from_bus: int
    to_bus: int
    susceptance: float
    flow_limit: float
    ang_min: float = -DEFAULT_ANGLE_BOUND
    ang_max: float = DEFAULT_ANGLE_BOUND


@dataclass
class NetworkCase:
    """Validated network. Treated as immutable after construction.

    ``__post_init__`` checks the invariants (single reference bus, ordered
    generator bounds, positive flow limits, connected graph) and precomputes
    the index arrays the LP assembly uses.
    """

    buses: list[Bus]
    generators: list[Generator]
    branches: list[Branch]
    base_mva: float = 100.0
    name: str = "case"

    def __post_init__(self):
        if not self.buses:
            raise CaseValidationError("case has no buses")
        if self.base_mva <= 0:
            raise CaseValidationError(f"base_mva must be positive, got {self.base_mva}")

        ids = [b.id for b in self.buses]
        if len(set(ids)) != len(ids):
            raise CaseValidationError("bus ids are not unique")
        self.bus_pos = {b.id: i for i, b in enumerate(self.buses)}

        refs = [b.id for b in self.buses if b.is_ref]
        if len(refs) != 1:
            raise CaseValidationError(
                f"exactly one reference bus required, found {len(refs)}"
            )
        self.ref_pos = self.bus_pos[refs[0]]

        for b in self.buses:
            if b.p_demand < 0:
                raise CaseValidationError(f"bus {b.id}: negative nominal demand")

        for k, g in enumerate(self.generators):
            if g.bus not in self.bus_pos:
                raise CaseValidationError(f"generators[{k}]: unknown bus id {g.bus}")
            if g.p_min > g.p_max:
                raise CaseValidationError(
                    f"generators[{k}]: p_min {g.p_min} exceeds p_max {g.p_max}"
                )

        for k, br in enumerate(self.branches):
            for end in (br.from_bus, br.to_bus):
                if end not in self.bus_pos:
                    raise CaseValidationError(f"branches[{k}]: unknown bus id {end}")
            if br.from_bus == br.to_bus:
                raise CaseValidationError(f"branches[{k}]: self-loop at bus {br.from_bus}")
            if br.flow_limit <= 0:
                raise CaseValidationError(f"branches[{k}]: flow_limit must be positive")
            if br.susceptance <= 0:
                raise CaseValidationError(f"branches[{k}]: susceptance must be positive")
            if br.ang_min >= br.ang_max:
                raise CaseValidationError(f"branches[{k}]: empty angle interval")

        self._check_connected()

        self.gen_bus = np.array([self.bus_pos[g.bus] for g in self.generators], dtype=int)
        self.gen_cost = np.array([g.cost for g in self.generators], dtype=float)
        self.gen_pmin = np.array([g.p_min for g in self.generators], dtype=float)
        self.gen_pmax = np.array([g.p_max for g in self.generators], dtype=float)
        self.br_from = np.array([self.bus_pos[br.from_bus] for br in self.branches], dtype=int)
        self.br_to = np.array([self.bus_pos[br.to_bus] for br in self.branches], dtype=int)
        self.br_b = np.array([br.susceptance for br in self.branches], dtype=float)
        self.br_limit = np.array([br.flow_limit for br in self.branches], dtype=float)
        self.br_ang_min = np.array([br.ang_min for br in self.branches], dtype=float)
        self.br_ang_max = np.array([br.ang_max for br in self.branches], dtype=float)
        self.load_pos = np.array(
            [i for i, b in enumerate(self.buses) if b.p_demand > 0], dtype=int
        )
        self.nominal_demand = np.array(
            [self.buses[i].p_demand for i in self.load_pos], dtype=float
        )

    def _check_connected(self):
        n = len(self.buses)
        adj: list[list[int]] = [[] for _ in range(n)]
        for br in self.branches:
            u, v = self.bus_pos[br.from_bus], self.bus_pos[br.to_bus]
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        frontier = [0]
        while frontier:
            u = frontier.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    frontier.append(v)
        if len(seen) != n:
            missing = sorted(self.buses[i].id for i in range(n) if i not in seen)
            raise CaseValidationError(f"graph not connected; unreachable buses {missing}")

    @property
    def n_buses(self) -> int:
        return len(self.buses)

    @property
    def n_generators(self) -> int:
        return len(self.generators)

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    @property
    def n_loads(self) -> int:
        return len(self.load_pos)

    @property
    def load_bus_ids(self) -> list[int]:
        return [self.buses[i].id for i in self.load_pos]

    def full_demand(self, demand: np.ndarray) -> np.ndarray:
        """Scatter a load-bus demand vector onto all buses (MW)."""
        demand = np.asarray(demand, dtype=float)
        if demand.shape != (self.n_loads,):
            raise ValueError(
                f"demand has shape {demand.shape}, case has {self.n_loads} load buses"
            )
        if np.any(demand < 0):
            raise ValueError("demand entries must be nonnegative")
        full = np.zeros(self.n_buses)
        full[self.load_pos] = demand
        return full


_MISSING = object()


def _field(obj: dict, name: str, kinds, where: str, default=_MISSING):
    if name not in obj:
        if default is not _MISSING:
            return default
        raise CaseParseError(f"{where}: missing field '{name}'")
    val = obj[name]
    if kinds is bool:
        if not isinstance(val, bool):
            raise CaseParseError(f"{where}: field '{name}' must be a boolean")
        return val
    if isinstance(val, bool) or not isinstance(val, kinds):
        raise CaseParseError(f"{where}: field '{name}' has wrong type")
    return val


def parse_case(text: str, name: str = "case") -> NetworkCase:
    """Parse and validate a JSON case document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CaseParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CaseParseError("top level must be an object")

    base_mva = float(_field(doc, "base_mva", (int, float), "top level", 100.0))
    sections = {}
    for key in ("buses", "generators", "branches"):
        arr = _field(doc, key, list, "top level")
        for i, entry in enumerate(arr):
            if not isinstance(entry, dict):
                raise CaseParseError(f"{key}[{i}]: must be an object")
        sections[key] = arr

    buses = [
        Bus(
            id=int(_field(o, "id", int, f"buses[{i}]")),
            p_demand=float(_field(o, "p_demand", (int, float), f"buses[{i}]", 0.0)),
            is_ref=_field(o, "is_ref", bool, f"buses[{i}]", False),
        )
        for i, o in enumerate(sections["buses"])
    ]
    generators = [
        Generator(
            bus=int(_field(o, "bus", int, f"generators[{i}]")),
            cost=float(_field(o, "cost", (int, float), f"generators[{i}]")),
            p_min=float(_field(o, "p_min", (int, float), f"generators[{i}]")),
            p_max=float(_field(o, "p_max", (int, float), f"generators[{i}]")),
        )
        for i, o in enumerate(sections["generators"])
    ]
    branches = [
        Branch(
            from_bus=int(_field(o, "from_bus", int, f"branches[{i}]")),
            to_bus=int(_field(o, "to_bus", int, f"branches[{i}]")),
            susceptance=float(_field(o, "susceptance", (int, float), f"branches[{i}]")),
            flow_limit=float(_field(o, "flow_limit", (int, float), f"branches[{i}]")),
            ang_min=float(
                _field(o, "ang_min", (int, float), f"branches[{i}]", -DEFAULT_ANGLE_BOUND)
            ),
            ang_max=float(
                _field(o, "ang_max", (int, float), f"branches[{i}]", DEFAULT_ANGLE_BOUND)
            ),
        )
        for i, o in enumerate(sections["branches"])
    ]
    return NetworkCase(buses, generators, branches, base_mva=base_mva, name=name)


def load_case(path: str) -> NetworkCase:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_case(text, name=str(path))


def builtin_case(name: str) -> NetworkCase:
    """Load one of the bundled cases ('twobus', 'tenbus')."""
    if name not in BUILTIN_CASES:
        raise KeyError(f"unknown builtin case {name!r}; have {BUILTIN_CASES}")
    text = resources.files("opfal").joinpath("data", f"{name}.json").read_text("utf-8")
    return parse_case(text, name=name)


def resolve_case(spec: str) -> NetworkCase:
    """Treat ``spec`` as a file path if it exists, else as a builtin name."""
    import os

    if os.path.exists(spec):
        return load_case(spec)
    if spec in BUILTIN_CASES:
        return builtin_case(spec)
    raise CaseError(f"no case file at {spec!r} and not a builtin case name")
