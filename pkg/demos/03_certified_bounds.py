"""Evaluate the certified constants behind the hitting-time moment bound.

Every series is reported as a partial sum plus a proven tail bound, so
each printed value brackets the true sum from below within the stated
width.  The final bound on E_x[tau^m] has the shape C1 * (C2 + x^m).
"""

from markovup import (
    KappaSpec,
    fall_length_bound,
    jump_moment,
    make_bound_set,
    overshoot_bound,
    power_series,
    q_bar,
    theorem_bound,
)

kappa = KappaSpec(a=0.5, r=0.5)
s = 0.5

# sum k^m q^k has simple closed forms for small m; the certified
# evaluation reproduces them and works for every m.
print("rise-length ceilings sum(k^m q^k) at q = 0.5:")
for m in (0, 1, 2, 3):
    sv = power_series(m, 0.5)
    print(f"  m={m}: {sv.value:.10f}  (+tail <= {sv.tail_bound:.1e}, {sv.truncation_k} terms)")

print("\nfall-length ceilings sum(i^m (1 - kappa_i)):")
for m in (1, 2, 3):
    sv = fall_length_bound(m, kappa)
    print(f"  m={m}: {sv.value:.10f}")

print("\novershoot ceilings (both assemblies, the larger is used):")
for m in (1, 2, 3):
    dual = overshoot_bound(m, kappa.q, jump_moment(s, m))
    print(
        f"  m={m}: per-step {dual.per_step_form.value:.4f}, "
        f"compact {dual.compact_form.value:.4f} -> {dual.value:.4f}"
    )

qb = q_bar(kappa)
print(f"\nattempt-failure ceiling q_bar = {qb.value:.12f} (+tail <= {qb.tail_bound:.1e})")

print("\nhitting-time moment bound C1*(C2 + x^m) on the benchmark:")
print("   m    x       display      termwise         bound")
for m in (1, 2, 3):
    bs = make_bound_set(m, kappa, s)
    for x in (6, 10, 20):
        tb = theorem_bound(m, x, bs)
        print(f"  {m:2d}  {x:3d}  {tb.display:12.2f}  {tb.termwise:12.2f}  {tb.value:12.2f}")
