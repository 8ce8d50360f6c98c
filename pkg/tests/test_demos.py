import subprocess
import sys
from pathlib import Path

import pytest

DEMOS = Path(__file__).resolve().parent.parent / "demos"


@pytest.mark.parametrize("name", ["01_soliton_family.py", "04_nehari_minimization.py", "05_twisted_family.py"])
def test_demo_runs(name):
    out = subprocess.run([sys.executable, str(DEMOS / name)], capture_output=True, text=True, timeout=300)
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip()
