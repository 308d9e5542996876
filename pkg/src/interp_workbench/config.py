"""Workbench-wide tunables: fitted constants, budgets, oracle domain sizes."""

from __future__ import annotations

from dataclasses import dataclass, asdict


@dataclass
class WorkbenchConfig:
    # fitted constant of the proof-translation size bound f(n,k); calibrated
    # by the test suite against the shipped corpus
    size_bound_c0: int = 4
    # bit budget that turns runaway smash chains into clean errors
    bit_budget: int = 1 << 20
    # default maximal domain for the finite-model consistency oracle
    oracle_domain: int = 4
    # default budgets for bounded refutation search
    refute_max_nodes: int = 64
    refute_max_code: int = 10**9
    # base of the positional desk-scale sequence coding
    seq_base: int = 8

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "WorkbenchConfig":
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})


DEFAULT_CONFIG = WorkbenchConfig()
