"""Compare the compiled greedy kernel against the pure-numpy fallback.

Times single greedy runs and a full multistart pass on spiked instances of
growing size, with identical inputs for both backends, and verifies the
outputs agree. Run as `python3 benchmarks/bench_greedy.py`.
"""

import time

import numpy as np

from rspca import SpikedSpec, generate_spiked_instance, psd_sqrt
from rspca.kernels import available_backends, get_kernel


def time_kernel(run, a_half, a, diag_a, starts, r, max_iters, eps):
    best = float("inf")
    outputs = []
    for _ in range(3):
        t0 = time.perf_counter()
        outputs = [run(a_half, a, diag_a, s0, r, max_iters, eps)
                   for s0 in starts]
        best = min(best, time.perf_counter() - t0)
    return best, outputs


def main():
    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; only the python fallback is "
              "available, nothing to compare")
        return

    print(f"{'d':>5} {'k':>4} {'runs':>5} {'python':>10} {'compiled':>10} "
          f"{'speedup':>8}")
    for d, ka, k, n_starts in ((50, 6, 8, 40), (100, 10, 10, 40),
                               (200, 10, 15, 20), (400, 16, 20, 10)):
        spec = SpikedSpec(d=d, ka=ka, m_samples=3 * d, seed=1)
        mat = generate_spiked_instance(spec)
        a = mat.entries
        a_half = psd_sqrt(mat)
        diag_a = np.ascontiguousarray(np.diagonal(a))
        rng = np.random.RandomState(0)
        starts = [np.sort(rng.choice(d, size=k, replace=False))
                  for _ in range(n_starts)]
        eps = 1e-12 * float(np.trace(a))

        t_py, out_py = time_kernel(get_kernel("python"), a_half, a, diag_a,
                                   starts, 2, d, eps)
        t_c, out_c = time_kernel(get_kernel("compiled"), a_half, a, diag_a,
                                 starts, 2, d, eps)

        for (sup_p, _, traj_p, it_p), (sup_c, _, traj_c, it_c) in zip(out_py,
                                                                      out_c):
            assert it_p == it_c
            assert np.array_equal(np.asarray(sup_p), np.asarray(sup_c))
            assert np.allclose(np.asarray(traj_p), np.asarray(traj_c),
                               atol=1e-9)

        print(f"{d:>5} {k:>4} {n_starts:>5} {t_py:>9.3f}s {t_c:>9.3f}s "
              f"{t_py / t_c:>7.1f}x")

    print("\noutputs agree across backends on every run")


if __name__ == "__main__":
    main()
