"""Verify every proved ceiling against Monte Carlo estimates.

Each verdict compares an estimate with a certified bound.  Hitting-time
moments must keep their whole 99% confidence band under the bound; the
per-segment ceilings can be attained exactly (a rise, given that it
started, has length moments exactly at the ceiling when q = 1/2), so
their verdicts fail only if the data contradicts the ceiling.

This is a small run; the command line tool runs the full grid:
    markovup verify          # built-in defaults, 10^5 paths per start
"""

from markovup import BenchmarkModelSpec, KappaSpec, build_benchmark, verify

spec = BenchmarkModelSpec(kappa=KappaSpec(a=0.5, r=0.5), up_jump_s=0.5, floor_n=5)
kernel = build_benchmark(spec)

report = verify(
    kernel, spec,
    x_grid=[6, 12], m_list=[1, 2], n_traj=20_000, seed=7,
)

print(f"{'quantity':18s} {'x':>3s} {'m':>2s} {'estimate':>10s} {'bound':>10s} {'slack':>9s}  verdict")
for v in report.verdicts:
    e = v.estimate
    print(
        f"{e.quantity:18s} {e.x0:3d} {e.m:2d} {e.mean:10.4f} "
        f"{v.bound:10.4f} {v.slack:9.4f}  {'pass' if v.passed else 'FAIL'}"
    )

print(f"\nall {len(report.verdicts)} verdicts passed: {report.all_passed}")
print("(bounds are theorems -- a failure here would mean a bug, not bad luck)")
