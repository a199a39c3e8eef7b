from __future__ import annotations

import numpy as np
import pytest

from entrorisk.data import generate_synthetic


def write_csv_text(path, text: str):
    path.write_text(text.lstrip("\n"), encoding="utf-8")
    return path


@pytest.fixture
def panel_file(tmp_path):
    """Writer for small panel fixtures: ``panel_file("date,A,MKT,RF\\n...")``."""

    def make(text: str, name: str = "panel.csv"):
        return write_csv_text(tmp_path / name, text)

    return make


@pytest.fixture(scope="session")
def factor_panel():
    """150 securities, 2000 days, betas U(0.5, 1.5), idiosyncratic vols U(0.01, 0.02)."""
    rng = np.random.default_rng(11)
    betas = rng.uniform(0.5, 1.5, 150)
    idio = rng.uniform(0.01, 0.02, 150)
    return generate_synthetic(150, 2000, betas, 0.01, idio, 0.0004, seed=5), betas


@pytest.fixture(scope="session")
def iid_panel():
    """150 independent N(0, 0.01) securities over 2000 days (zero factor loading)."""
    return generate_synthetic(150, 2000, np.zeros(150), 0.01, np.full(150, 0.01), seed=21)


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, in criterion order."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" in props and (rep.when == "call" or outcome == "error"):
                lines.append((props["criterion"], "PASS" if outcome == "passed" else "FAIL", props["title"]))
    if lines:
        terminalreporter.section("acceptance criteria")
        for num, verdict, title in sorted(lines):
            terminalreporter.write_line(f"criterion {num}: {verdict}  {title}")
