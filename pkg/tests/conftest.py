import glob
import os
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
CONFIG_DIR = ROOT / "configs"

# criterion number -> (passed, detail), filled by test_acceptance
ACCEPTANCE: dict = {}


def config_paths():
    """Configs with an Esscher root at every radius (``configs/no_root`` excluded)."""
    return sorted(Path(p) for p in glob.glob(str(CONFIG_DIR / "*.json")))


@pytest.fixture
def configs():
    return config_paths()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


os.environ.setdefault("LEVY_SMALLBALL_THREADS", "1")
