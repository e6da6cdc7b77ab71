"""Labeling oracles: the in-process DC solver and a file-exchange adapter.

An oracle is a callable taking a batch of demand vectors and returning, per
instance, either ``(OpfSolution, bits)`` or ``None`` for an undeliverable
demand. The external adapter lets a stronger solver (e.g. a full AC code)
replace the in-repo DC oracle without touching the pipeline:

* request  ``req_<batch>.json``:  ``{"case_ref": str, "instances":
  [{"index": int, "demand": [...]}, ...]}``
* response ``resp_<batch>.json``: ``{"instances": [{"index": int,
  "p_g": [...], "theta": [...], "objective": float,
  "active_bits": [0|1, ...]}, ...]}``

Responses must be written atomically (write to a temp name, then rename);
any readable response file is treated as complete. The adapter is
single-flight per exchange directory: one outstanding request at a time.
"""

from __future__ import annotations

import itertools
import json
import os
import time

import numpy as np

from .cases import NetworkCase
from .dcopf import (
    EPS_ACTIVE,
    InfeasibleError,
    OpfSolution,
    active_set_size,
    extract_active_set,
    solve_dcopf,
)

LabelResult = "tuple[OpfSolution, np.ndarray] | None"


class OracleUnavailableError(RuntimeError):
    """No response arrived within the timeout."""


class OracleResponseError(RuntimeError):
    """The response file is malformed or inconsistent with the request."""


class DcOracle:
    """Labels demands with the built-in DC-OPF solver."""

    def __init__(self, case: NetworkCase, eps_active: float = EPS_ACTIVE):
        self.case = case
        self.eps_active = eps_active

    def __call__(self, demands) -> list:
        out = []
        for x in demands:
            try:
                sol = solve_dcopf(self.case, np.asarray(x, dtype=float))
            except InfeasibleError:
                out.append(None)
                continue
            out.append((sol, extract_active_set(self.case, sol, self.eps_active)))
        return out


class ExternalOracle:
    """Labels batches through request/response files in a shared directory."""

    def __init__(
        self,
        case: NetworkCase,
        exchange_dir: str,
        *,
        case_ref: str | None = None,
        timeout: float = 30.0,
        poll: float = 0.02,
    ):
        self.case = case
        self.exchange_dir = exchange_dir
        self.case_ref = case_ref if case_ref is not None else case.name
        self.timeout = timeout
        self.poll = poll
        self._batch_ids = itertools.count()

    def __call__(self, demands) -> list:
        demands = [np.asarray(x, dtype=float) for x in demands]
        if not demands:
            return []
        batch_id = next(self._batch_ids)
        req_path = os.path.join(self.exchange_dir, f"req_{batch_id}.json")
        resp_path = os.path.join(self.exchange_dir, f"resp_{batch_id}.json")
        request = {
            "case_ref": self.case_ref,
            "instances": [
                {"index": i, "demand": x.tolist()} for i, x in enumerate(demands)
            ],
        }
        tmp = req_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(request, fh)
        os.replace(tmp, req_path)

        deadline = time.monotonic() + self.timeout
        while not os.path.exists(resp_path):
            if time.monotonic() >= deadline:
                raise OracleUnavailableError(
                    f"no response for batch {batch_id} within {self.timeout} s"
                )
            time.sleep(self.poll)
        with open(resp_path, "r", encoding="utf-8") as fh:
            text = fh.read()
        return self._parse_response(text, len(demands))

    def _parse_response(self, text: str, n: int) -> list:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise OracleResponseError(
                f"malformed response at line {exc.lineno}: {exc.msg}"
            ) from exc
        instances = doc.get("instances") if isinstance(doc, dict) else None
        if not isinstance(instances, list):
            raise OracleResponseError("response lacks an 'instances' array")

        n_g, n_b = self.case.n_generators, self.case.n_buses
        k_bits = active_set_size(self.case)
        by_index = {}
        for entry in instances:
            if not isinstance(entry, dict) or "index" not in entry:
                raise OracleResponseError("response instance without an index")
            idx = entry["index"]
            if idx in by_index:
                raise OracleResponseError(f"duplicate response for index {idx}")
            by_index[idx] = entry
        if set(by_index) != set(range(n)):
            raise OracleResponseError(
                f"response indices {sorted(by_index)} do not match request 0..{n - 1}"
            )

        out = []
        for i in range(n):
            entry = by_index[i]
            try:
                p_g = np.asarray(entry["p_g"], dtype=float)
                theta = np.asarray(entry["theta"], dtype=float)
                objective = float(entry["objective"])
                bits = np.asarray(entry["active_bits"], dtype=np.uint8)
            except (KeyError, TypeError, ValueError) as exc:
                raise OracleResponseError(f"instance {i}: bad fields ({exc})") from exc
            if p_g.shape != (n_g,) or theta.shape != (n_b,) or bits.shape != (k_bits,):
                raise OracleResponseError(f"instance {i}: wrong array lengths")
            flows = self.case.base_mva * self.case.br_b * (
                theta[self.case.br_from] - theta[self.case.br_to]
            )
            out.append((OpfSolution(p_g=p_g, theta=theta, flows=flows, objective=objective), bits))
        return out


def respond_with_dc(case: NetworkCase, exchange_dir: str, batch_id: int) -> str:
    """Answer one pending request using the DC oracle (stub responder).

    Utility for tests and for driving the exchange format end-to-end without
    an external solver. Returns the response path.
    """
    req_path = os.path.join(exchange_dir, f"req_{batch_id}.json")
    with open(req_path, "r", encoding="utf-8") as fh:
        request = json.load(fh)
    oracle = DcOracle(case)
    instances = []
    for inst in request["instances"]:
        labeled = oracle([inst["demand"]])[0]
        if labeled is None:
            raise InfeasibleError(float("nan"))
        sol, bits = labeled
        instances.append(
            {
                "index": inst["index"],
                "p_g": sol.p_g.tolist(),
                "theta": sol.theta.tolist(),
                "objective": sol.objective,
                "active_bits": [int(b) for b in bits],
            }
        )
    resp_path = os.path.join(exchange_dir, f"resp_{batch_id}.json")
    tmp = resp_path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump({"instances": instances}, fh)
    os.replace(tmp, resp_path)
    return resp_path
