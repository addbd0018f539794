"""Shared helpers: seeded random circuits, and the acceptance report.

Sweeps draw everything from ``random.Random(seed)`` so every run sees the
same instances; there is no test-order or wall-clock dependence.

The acceptance tests append one verdict line each to ``acceptance_report``;
a terminal-summary section prints them at the end of the run, outside
pytest's output capture.
"""
import math
import random

import pytest

from ddqsim.circuit import Circuit, Gate

acceptance_report: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_report:
        terminalreporter.section("acceptance report")
        for line in acceptance_report:
            terminalreporter.write_line(line)

_PLAIN = ("H", "X", "Y", "Z", "S", "SDG", "T", "TDG", "SQRTX", "SQRTY")
_ANGLED = ("RX", "RY", "RZ", "PHASE")


def random_circuit(num_qubits: int, num_gates: int, seed: int) -> Circuit:
    """Mixed gate soup: plain, rotations, controlled gates, swaps."""
    rng = random.Random(seed)
    ops = []
    for _ in range(num_gates):
        roll = rng.random()
        if roll < 0.45 or num_qubits < 2:
            ops.append(Gate(rng.choice(_PLAIN), (rng.randrange(num_qubits),)))
        elif roll < 0.65:
            ops.append(Gate(rng.choice(_ANGLED), (rng.randrange(num_qubits),),
                            angle=rng.uniform(-math.pi, math.pi)))
        elif roll < 0.9:
            t, c = rng.sample(range(num_qubits), 2)
            kind = rng.choice(("X", "Z", "PHASE"))
            angle = rng.uniform(-math.pi, math.pi) if kind == "PHASE" else None
            ops.append(Gate(kind, (t,), controls=(c,), angle=angle))
        else:
            a, b = rng.sample(range(num_qubits), 2)
            ops.append(Gate("SWAP", tuple(sorted((a, b)))))
    return Circuit(num_qubits, ops, name=f"random_{num_qubits}q_s{seed}")


@pytest.fixture
def make_random_circuit():
    return random_circuit
