"""Simulate a Markov-up process and take one path apart.

The process lives on the non-negative integers.  While it rises it is
Markov; while it falls, the kernel may look at the whole current falling
run.  The benchmark family used here falls by exactly one step with
probability kappa_ell (ell = how long it has been falling) and otherwise
jumps up by a geometric amount.
"""

from markovup import (
    BenchmarkModelSpec,
    KappaSpec,
    build_benchmark,
    decompose_attempts,
    initial_window,
    path_stream,
    simulate_path,
    window_update,
)

spec = BenchmarkModelSpec(kappa=KappaSpec(a=0.5, r=0.5), up_jump_s=0.5, floor_n=5)
kernel = build_benchmark(spec)

# The longer the process falls, the likelier the fall continues:
print("fall-continuation probabilities kappa_ell:")
for ell in range(6):
    print(f"  after {ell} down-steps: {spec.kappa.at(ell):.4f}")

# One reproducible path from x0 = 12 down to the floor set [0, 5].
traj = simulate_path(kernel, 12, max_steps=10**6, rng=path_stream(seed=11, path_index=0))
print(f"\npath from {traj.x0}: {traj.states}")
print(f"hit the floor at time tau = {traj.tau}")

# The kernel's memory: replay the path and watch the fall window grow
# while the process falls and reset whenever it does not.
window = initial_window(traj.states[0])
print("\ntime  state  window (the strictly falling suffix)")
print(f"{0:4d}  {traj.states[0]:5d}  {window.values}")
for n in range(1, len(traj.states)):
    window = window_update(window, traj.states[n], n)
    print(f"{n:4d}  {traj.states[n]:5d}  {window.values}")

# Every path splits into descent attempts separated by rises.  Exactly
# the last attempt reaches the floor.
decomp = decompose_attempts(traj)
print(f"\ncase {decomp.case}: the path starts {'falling' if decomp.case == 'I' else 'rising'}")
for a in decomp.attempts:
    outcome = "SUCCESS" if a.success else "failed"
    print(
        f"attempt {a.index}: fall over [{a.start}, {a.end}] "
        f"(length {a.length}, from state {traj.states[a.start]}) -> {outcome}"
    )
