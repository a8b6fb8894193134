"""Acceptance criteria 1-10 at their stated tolerances and time limits.

The suite runs once per session; each criterion is then asserted by its own
test. One PASS/FAIL line per criterion is printed (and repeated in the
terminal summary).
"""
import pytest

from ldgraphs import acceptance

import conftest

SEED = 0


@pytest.fixture(scope="session")
def suite(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance")
    lines = []
    results = acceptance.run_suite(seed=SEED, out_dir=out, repeat=True, log=lines.append)
    for line in lines:
        print(line)
    conftest.ACCEPTANCE_LINES.extend(lines)
    return {r.number: r for r in results}


@pytest.mark.slow
@pytest.mark.parametrize("number", range(1, 11), ids=lambda n: f"criterion{n}")
def test_criterion(suite, number):
    r = suite[number]
    assert not r.error, r.error
    failed = [row for row in r.rows if not row["passed"]]
    assert r.checks_ok, failed[:5]
    assert r.runtime_ok, f"{r.seconds:.1f}s exceeds {acceptance.LIMITS[number]}s"
    assert r.passed
