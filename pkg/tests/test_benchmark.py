import subprocess
import sys
from pathlib import Path

import pytest

from vtype_sge import _jit

BENCH = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"


@pytest.mark.slow
@pytest.mark.skipif(not _jit.HAS_NUMBA, reason="numba unavailable or disabled")
def test_benchmark_quick_run():
    proc = subprocess.run([sys.executable, str(BENCH), "--quick", "--repeat", "1"],
                          capture_output=True, text=True, check=False, timeout=300)
    assert proc.returncode == 0, proc.stderr
    lines = proc.stdout.strip().splitlines()
    assert lines[0].split()[0] == "case"
    assert len(lines) == 5
    assert all(line.rstrip().endswith("x") for line in lines[1:])
