"""Run the acceptance suite and print just the PASS/FAIL lines.

    python3 scripts/run_acceptance.py
"""
import subprocess
import sys
from pathlib import Path

root = Path(__file__).resolve().parents[1]
proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-s", "-p", "no:cacheprovider",
                       str(root / "tests" / "test_acceptance.py")],
                      cwd=root, capture_output=True, text=True)
lines = sorted({ln for ln in proc.stdout.splitlines() if ln.startswith(("PASS criterion", "FAIL criterion"))},
               key=lambda s: int(s.split(":")[0].split()[-1]))
print("\n".join(lines))
print(f"{sum(ln.startswith('PASS') for ln in lines)}/{len(lines)} criteria pass")
sys.exit(0 if proc.returncode == 0 else 1)
