"""FFT grid evaluation versus direct matrix products: agreement and speed.

Every estimator in the package scores candidate angles through squared
steering-vector correlations.  On the half-wavelength grid those are FFT
column norms (numerators) and a Toeplitz quadratic form driven by one
inverse FFT (projector denominators).  This demo checks both evaluators
agree to rounding and races them as the array grows.  Run:

    python demos/evaluator_race.py
"""

import os

for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
            "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS"):
    os.environ.setdefault(var, "1")

from time import perf_counter

import numpy as np

from doalab.fastgrid import make_grid
from doalab.methods import estimate_method
from doalab.scenario import ScenarioConfig, draw_targets, synthesize_observation, trial_rng
from doalab.subspace import sample_covariance

METHODS = ("music-noise", "omp", "ols", "omp-imusic", "ols-imusic")


def covariance_for(M, seed):
    cfg = ScenarioConfig(targets=8, antennas=M, subcarriers=64, symbols=4,
                         snr_db=30.0, seed=seed)
    rng = trial_rng(cfg.seed, 0)
    truth = draw_targets(cfg, rng)
    return sample_covariance(synthesize_observation(truth, cfg, rng).Y)


def race(M, N=2048, repeats=7):
    grid = make_grid(N, M)
    R = covariance_for(M, seed=40 + M)
    rows = []
    for method in METHODS:
        est_fft = estimate_method(method, R, 8, grid, "fft")
        est_direct = estimate_method(method, R, 8, grid, "direct")
        agree = np.array_equal(np.sort(est_fft), np.sort(est_direct))
        times = {"fft": [], "direct": []}
        for _ in range(repeats):  # interleaved so clock drift is shared
            for evaluator in ("fft", "direct"):
                t0 = perf_counter()
                estimate_method(method, R, 8, grid, evaluator)
                times[evaluator].append(perf_counter() - t0)
        t_fft = float(np.median(times["fft"]))
        t_direct = float(np.median(times["direct"]))
        rows.append((method, agree, 1e3 * t_fft, 1e3 * t_direct, t_direct / t_fft))
    return rows


def main():
    for M in (16, 32, 64):
        print(f"\nM = {M} antennas, N = 2048 grid points, K = 8")
        print(f"{'method':<14} {'same DOAs':>9} {'fft ms':>9} {'direct ms':>10} {'speedup':>8}")
        for method, agree, t_fft, t_direct, ratio in race(M):
            print(f"{method:<14} {'yes' if agree else 'NO':>9} "
                  f"{t_fft:>9.2f} {t_direct:>10.2f} {ratio:>7.2f}x")
    print("\nRatio-form methods (ols, ols-imusic) gain the most: their projector")
    print("denominator collapses to a single inverse FFT.  Pure column-norm")
    print("methods sit near the BLAS/FFT crossover at small M and pull ahead")
    print("as the array grows.")


if __name__ == "__main__":
    main()
