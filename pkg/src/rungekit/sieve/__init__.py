"""Congruence sieve for the six-term problem: configurations, curves, cases and the driver."""

from .cases import CaseFailure, case1, case2, case3
from .configs import Configuration, CurveData, curves_for, enumerate_configs
from .db import DBError, GeneratorDB, GeneratorRecord, load_db
from .driver import RunReport, check_against_table, run, solve_config
from .fixtures import SOLUTION_TABLE, table_pairs
from .solutions import Solution, verify_solution, witness

__all__ = [
    "CaseFailure",
    "Configuration",
    "CurveData",
    "DBError",
    "GeneratorDB",
    "GeneratorRecord",
    "SOLUTION_TABLE",
    "RunReport",
    "Solution",
    "case1",
    "case2",
    "case3",
    "check_against_table",
    "curves_for",
    "enumerate_configs",
    "load_db",
    "run",
    "solve_config",
    "table_pairs",
    "verify_solution",
    "witness",
]
