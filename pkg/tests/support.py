"""Bundled fixture loaders shared by the tests."""

from commitorder.cli import fixture_path
from commitorder.model import load_scenario
from commitorder.strategy import load_commitment


def scenario(name):
    return load_scenario(fixture_path(name + ".json"))


def commitment(name):
    return load_commitment(fixture_path(name + ".json"))


def pair(name):
    return commitment(name + "_g1"), commitment(name + "_g2")

# One line per acceptance criterion, printed in the terminal summary.
ACCEPTANCE = {}


def record(criterion, ok, detail):
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return line
