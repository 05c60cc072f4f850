"""Scaling benchmark: lens filter time against the model's edge count.

Generates clustered datasets (10 Gaussian blobs on hypercube corners),
builds manifolds over a small neighbour grid, and times only the filter
step of each lens. A least-squares line per lens summarises how compute
time grows with the number of edges.
"""

from graphlens import fit_regression, run_benchmark

report = run_benchmark(
    sizes=(100, 1_000),
    neighbor_grid=(10, 20),
    segment_grid=(6, 24),
    global_mask_grid=(20, 40),
    local_mask_grid=(5, 20),
    repeats=5,
)

print(f"{len(report.rows)} timing rows collected\n")
for lens in ("global_lens", "global_mask", "local_mask"):
    cells = report.median_times(lens)
    fit = fit_regression([e for e, _ in cells], [t for _, t in cells])
    print(
        f"{lens:12s}: slope {fit.slope:8.4f} us/edge  "
        f"intercept {fit.intercept:9.1f} us  R^2 {fit.r_squared:.3f}"
    )

report.write_jsonl("bench_rows.jsonl")
report.write_csv_summary("bench_summary.csv")
print("\nwrote bench_rows.jsonl and bench_summary.csv")
print("(the CLI equivalent: graphlens bench --sizes 100,1000 --repeats 5 --out bench)")
