import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from ergodic_workbench import TailedFunction, TailedMeasureSpace

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record one acceptance line: ``acceptance(key, ok, detail)``."""

    def record(key: str, ok: bool, detail: str = ""):
        _ACCEPTANCE[key] = (bool(ok), detail)
        print(f"{'PASS' if ok else 'FAIL'} {key}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k.split()[0].lstrip("AC"))):
        ok, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}  {detail}")


weights_st = st.floats(0.05, 5.0, allow_nan=False)
value_st = st.floats(-10.0, 10.0, allow_nan=False)


@st.composite
def spaces(draw, min_atoms=1, max_atoms=8, tail=None):
    n = draw(st.integers(min_atoms, max_atoms))
    w = draw(st.lists(weights_st, min_size=n, max_size=n))
    has_tail = draw(st.booleans()) if tail is None else tail
    return TailedMeasureSpace(np.array(w), has_tail)


@st.composite
def functions(draw, space=None, tail_zero=False, complex_values=True, **space_kw):
    sp = draw(spaces(**space_kw)) if space is None else space
    n = sp.n_atoms
    re = np.array(draw(st.lists(value_st, min_size=n, max_size=n)))
    im = np.array(draw(st.lists(value_st, min_size=n, max_size=n))) if complex_values else 0.0
    tail = 0.0 if tail_zero else complex(draw(value_st), draw(value_st) if complex_values else 0.0)
    return TailedFunction(sp, re + 1j * im, tail)
