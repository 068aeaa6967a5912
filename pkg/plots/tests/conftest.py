import subprocess
import sys
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden"

CAVITY_CFG = """
benchmark = "cavity"
out_dir = "{out}"

[fem]
h = 0.25
degree = 2
jitter = 0.0

[solver]
tol = 1e-8
max_iter = 200

[accel]
methods = ["plain", "csl(exact)"]

[sweep]
k_min = 4.0
k_max = 4.2
k_step = 0.1
error_reference = "series"
"""


@pytest.fixture(scope="session")
def bench_artifacts(tmp_path_factory):
    """Real artifacts produced by the benchmark CLI (file interface only)."""
    root = tmp_path_factory.mktemp("bench")
    cfg = root / "run.toml"
    out = root / "out"
    cfg.write_text(CAVITY_CFG.format(out=out))
    for cmd in (["sweep"], ["diagnose", "--k", "4.1"]):
        subprocess.run([sys.executable, "-m", "helmres.bench.cli", *cmd,
                        "--config", str(cfg)],
                       check=True, capture_output=True)
    return out


@pytest.fixture()
def tiny_inputs(tmp_path):
    """Handcrafted artifact files with exactly known numbers."""
    trace = tmp_path / "trace_1.000000_plain.csv"
    trace.write_text("iter,relres,restart_flag\n0,1.0,0\n1,1e-16,0\n")
    hr = tmp_path / "hr_1.000000.csv"
    hr.write_text("iter,re,im,matched_eig_id,dist\n"
                  "2,0.5,0.0,0,0.1\n2,1.5,0.25,-1,\n4,0.45,0.0,0,0.01\n")
    eigs = tmp_path / "eigs_1.000000.csv"
    eigs.write_text("id,re,im\n0,0.44,0.0\n1,2.0,-0.5\n")
    summary = tmp_path / "summary.csv"
    summary.write_text(
        "k,method,iterations,converged,relres,true_relres,l2_error,plateaus,"
        "trace_file,wall_s\n"
        "12.9,plain,100,1,1e-06,1e-06,0.25,1,t.csv,0.1\n"
        "13.0,plain,160,1,1e-06,1e-06,0.5,1,t.csv,0.1\n"
        "13.1,plain,120,1,1e-06,1e-06,0.125,1,t.csv,0.1\n")
    grid = tmp_path / "grid.csv"
    lines = ["re,im,smin"]
    for im in (0.0, 1.0):
        for re in (0.0, 1.0, 2.0):
            lines.append(f"{re},{im},{abs(re - 0.5) + im + 0.125}")
    grid.write_text("\n".join(lines) + "\n")
    return {"trace": trace, "hr": hr, "eigs": eigs, "summary": summary,
            "grid": grid}
