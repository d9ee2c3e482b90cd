"""Random-state study of the smallest optimal overlap."""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import TooLarge
from .fock import random_state
from .optimizer import OptimizerConfig, optimize_slater

MAX_DIMENSION = 10_000
BOUND_SLACK = 1e-8


@dataclass
class EnsembleReport:
    n: int
    d: int
    samples: int
    seed: int
    values: np.ndarray = field(repr=False)
    seeds: list = field(repr=False)

    @property
    def min(self):
        return float(self.values.min())

    @property
    def mean(self):
        return float(self.values.mean())

    @property
    def max(self):
        return float(self.values.max())

    @property
    def bound_2_over_d2(self):
        return 2.0 / self.d ** 2

    @property
    def violations(self):
        return int(np.count_nonzero(self.values < self.bound_2_over_d2 - BOUND_SLACK))

    def summary(self):
        return {
            "N": self.n,
            "d": self.d,
            "samples": self.samples,
            "seed": self.seed,
            "min": self.min,
            "mean": self.mean,
            "max": self.max,
            "bound_2_over_d2": self.bound_2_over_d2,
            "violations": self.violations,
        }

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample_index", "seed", "value"])
            for i, (s, v) in enumerate(zip(self.seeds, self.values)):
                w.writerow([i, s, repr(float(v))])


def sample_seeds(seed, samples):
    """One 63-bit seed per sample, fixed by (seed, index) alone."""
    return [int(np.random.SeedSequence([int(seed), i]).generate_state(2, np.uint64)[0] >> np.uint64(1))
            for i in range(samples)]


def _one(args):
    n, d, s, cfg = args
    state = random_state(n, d, seed=s)
    return optimize_slater(state, cfg.replace(seed=s, workers=1)).value


def run_ensemble(N, d, samples, cfg=None, workers=1, seed=None, csv_path=None, max_dimension=MAX_DIMENSION):
    """Optimal overlaps of ``samples`` random N-fermion states on d orbitals.

    States have i.i.d. complex Gaussian amplitudes. Sample i is generated
    from a seed derived from (seed, i), so the report does not depend on
    ``workers``. ``seed`` defaults to ``cfg.seed``.
    """
    cfg = cfg or OptimizerConfig()
    N, d, samples = int(N), int(d), int(samples)
    if samples < 1:
        raise ValueError("samples must be positive")
    if not 0 < N <= d:
        raise ValueError(f"need 0 < N <= d, got N={N}, d={d}")
    if comb(d, N) > max_dimension:
        raise TooLarge(f"C({d},{N}) = {comb(d, N)} exceeds {max_dimension}")
    seed = cfg.seed if seed is None else int(seed)
    seeds = sample_seeds(seed, samples)
    jobs = [(N, d, s, cfg) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_one, jobs, chunksize=max(1, samples // (4 * workers))))
    else:
        values = [_one(job) for job in jobs]
    report = EnsembleReport(N, d, samples, seed, np.array(values, dtype=float), seeds)
    if csv_path is not None:
        report.write_csv(csv_path)
    return report


__all__ = ["EnsembleReport", "run_ensemble", "sample_seeds"]
