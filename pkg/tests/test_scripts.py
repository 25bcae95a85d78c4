import subprocess
import sys
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def run_script(name, *args):
    return subprocess.run(
        [sys.executable, str(SCRIPTS / name), *args],
        capture_output=True,
        text=True,
        timeout=300,
    )


def test_canonical_suite_script(tmp_path):
    proc = run_script(
        "run_canonical_suite.py", "--seeds", "2", "--out", str(tmp_path / "canon")
    )
    assert proc.returncode == 0, proc.stderr
    assert "exit status 0" in proc.stdout
    assert (tmp_path / "canon" / "report.json").exists()


def test_margin_survey_script():
    proc = run_script(
        "margin_survey.py", "--seeds", "3", "--checks",
        "est:f0-Norm_SPid,qi:neumann_relation",
    )
    assert proc.returncode == 0, proc.stderr
    lines = [l for l in proc.stdout.splitlines() if l.strip()]
    assert len(lines) == 2
    assert all("min" in l and "median" in l for l in lines)
