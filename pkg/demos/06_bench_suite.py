"""
Running a bench description
===========================

A JSON file lists instances, requirements and algorithms. With the oracle on,
each run is compared with exhaustive search and the summary reports error
statistics per algorithm. Reruns with the same seed write the same CSV.
"""

import json
from pathlib import Path

from colordsp.bench import records_to_csv, run_bench_spec, summarize

suite = Path(__file__).resolve().parent.parent / "tests" / "data" / "bench_suite.json"
records = run_bench_spec(suite)
print(records_to_csv(records)[:1200])

for algo, stats in summarize(records).items():
    print(algo, json.dumps({k: stats[k] for k in ("runs", "optimal_pct", "within_1pct", "max")}))
