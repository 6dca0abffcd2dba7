import numpy as np
import pytest

from auerbach import (
    block_basis,
    hadamard2_basis,
    identity_basis,
    jinf_basis,
    jp_basis,
    known_constructions,
    sylvester_double,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def verified_bases(p):
    """A spread of Auerbach bases at exponent p (named constructions only)."""
    out = {f"I{n}": identity_basis(n, p) for n in (1, 2, 3, 4)}
    out["H2"] = hadamard2_basis(p)
    out["I1+H2"] = block_basis([identity_basis(1, p), hadamard2_basis(p)])
    out["syl(H2)"] = sylvester_double(hadamard2_basis(p))
    if p == "inf" or p == float("inf"):
        for t in (-1.0, -0.5, 0.0, 0.3, 0.5, 1.0):
            out[f"JINF({t})"] = jinf_basis(t)
    else:
        out["JP"] = jp_basis(p)
        out["syl(JP)"] = sylvester_double(jp_basis(p))
        for n in (3, 4):
            for name, B in known_constructions(n, p).items():
                out[f"n{n}:{name}"] = B
    return out


# -- acceptance report -------------------------------------------------------------------

ACCEPTANCE_LINES = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """record(number, title, ok, detail) prints one PASS/FAIL line per criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, {})

    def record(number, title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}  {title:<44} {detail}".rstrip()
        lines[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, {})
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
