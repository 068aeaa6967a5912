from helmres.bench.config import RunConfig, load_config
from helmres.bench.runner import (BenchProblem, run_diagnose, run_single,
                                  run_sweep)

__all__ = ["BenchProblem", "RunConfig", "load_config", "run_diagnose",
           "run_single", "run_sweep"]
