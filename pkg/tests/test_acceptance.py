"""Acceptance criteria 1-10, one test (and one printed PASS/FAIL line) each.

Run directly with ``python tests/test_acceptance.py`` or through pytest, which
prints the summary lines at the end of the session.
"""

import sys

import pytest

from thermovar.harness import checks as K

CRITERIA = {
    1: ("EOS duality and analytic partials on 100 random states", (K.eos_duality,)),
    2: ("perfect-gas coefficient identity", (K.coefficient_identity,)),
    3: ("two-cell relaxation against the closed form", (K.two_cell_relaxation,)),
    4: ("first law: energy drift and refinement orders", (K.first_law,)),
    5: ("second law: entropy monotone, production non-negative", (K.second_law,)),
    6: ("thermodynamic-type identity", (K.thermodynamic_type,)),
    7: ("temperature vs entropy formulation", (K.formulation_equivalence,)),
    8: ("material vs spatial representation", (K.representation_equivalence,)),
    9: ("reversible limit: specific entropy transported", (K.reversible_limit,)),
    10: ("conduction decay rate", (K.conduction_decay,)),
}

RESULTS = {}


def evaluate(number):
    title, checks = CRITERIA[number]
    verdicts = [v for check in checks for v in check(seed=0)]
    passed = all(v.passed for v in verdicts)
    detail = "; ".join(f"{v.name}={v.measured:.3g}" for v in verdicts)
    line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    RESULTS[number] = line
    return passed, verdicts, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    passed, verdicts, line = evaluate(number)
    print(line)
    assert passed, "\n".join(v.line() for v in verdicts if not v.passed)


if __name__ == "__main__":
    ok = True
    for n in sorted(CRITERIA):
        passed, _, line = evaluate(n)
        print(line, flush=True)
        ok &= passed
    sys.exit(0 if ok else 1)
