"""Eight metaheuristic drivers behind one generation-step contract.

Every driver keeps a population of continuous position vectors in [1, n]
(one coordinate per city), proposes `population` tentative solutions per
generation, sends each through the hybrid pipeline (decode, repair,
heuristics, evaluation; one objective call each) and receives the feasible
tours written back into the position rows.  The evolutionary driver is the
exception: it works on permutations directly, so its tentative solutions
are feasible before repair.

Single-solution searches (sa, vs) propose `population` neighbours per
generation so call accounting is uniform across kinds.  Update rules follow
the canonical published forms of each algorithm; the fixed control
parameters live in DEFAULT_PARAMS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincinv

from . import _kernels
from .core import Budget, RngStream, Tour
from .hybrid import HybridPipeline, apply_pipeline_batch
from .tsplib import Instance

KINDS = ("bh", "ea", "gsa", "mvs", "pso", "sa", "sca", "vs")

DEFAULT_PARAMS = {
    "bh": {},
    "ea": {"mutations": 10, "elitism": 1},
    "gsa": {"attractive": 5, "g0": 100.0, "alpha": 20.0},
    "mvs": {},
    "pso": {"inertia": 0.715, "c1": 1.7, "c2": 1.7},
    "sa": {"t0": 2000.0, "tf": 1e-5, "factor": 0.9},
    "sca": {"radius": 2.0},
    "vs": {},
}


@dataclass
class MhConfig:
    """Algorithm kind, population/neighbourhood size and control parameters."""

    kind: str
    population: int = 10
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.kind = self.kind.lower()
        if self.kind not in KINDS:
            raise ValueError(f"unknown metaheuristic {self.kind!r}; one of {KINDS}")
        if self.population < 1:
            raise ValueError("population must be >= 1")
        merged = dict(DEFAULT_PARAMS[self.kind])
        unknown = set(self.params) - set(merged)
        if unknown:
            raise ValueError(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        merged.update(self.params)
        self.params = merged


@dataclass
class DriverState:
    """Snapshot of a driver: live positions, incumbent tour, call at best."""

    positions: np.ndarray
    incumbent: Tour
    incumbent_ofc: int
    generation: int
    exhausted: bool


def decode(v: np.ndarray, n: int | None = None) -> np.ndarray:
    """Round half-up, clamp to [1, n], shift to 0-based city indices."""
    v = np.asarray(v, dtype=np.float64)
    out = np.empty(v.shape[0] if n is None else n, dtype=np.int64)
    _kernels.decode_into(v, out)
    return out


def sa_temperature(
    k: int, t0: float = 2000.0, tf: float = 1e-5, factor: float = 0.9
) -> float:
    """Annealing temperature after k decreases: geometric, clamped at tf."""
    return max(tf, t0 * factor**k)


def vs_radius_table(max_gens: int, n: int) -> np.ndarray:
    """Vortex radius schedule driven by the inverse incomplete gamma function.

    The shape argument decays linearly from 1 towards 0 over the planned
    generations, shrinking the sampling radius from half the search range
    to (nearly) zero.
    """
    x = 0.1
    sigma0 = (n - 1) / 2.0
    t = np.arange(max_gens, dtype=np.float64)
    a = np.maximum(1.0 - t / max_gens, 1.0 / max_gens)
    return sigma0 * (1.0 / x) * gammaincinv(a, x)


class Driver:
    """One seeded search run: a metaheuristic bound to a pipeline and budget."""

    def __init__(
        self,
        cfg: MhConfig,
        inst: Instance,
        pipeline: HybridPipeline,
        budget: Budget,
        rng: RngStream,
    ):
        self.cfg = cfg
        self.inst = inst
        self.pipeline = pipeline
        self.budget = budget
        self.rng = rng
        n, pop = inst.n, cfg.population
        self.n = n
        self.pop = pop
        self.t = 0
        self.max_gens = max(1, math.ceil(max(budget.limit - pop, 1) / pop))
        self.positions = np.empty((pop, n), dtype=np.float64)
        self.orders_buf = np.empty((pop, n), dtype=np.int64)
        self.lengths_buf = np.empty(pop, dtype=np.int64)
        self.incumbent_order: np.ndarray | None = None
        self.incumbent_length = np.iinfo(np.int64).max
        self.exhausted = False
        self._init_kind_state()

    # -- kind-specific state ------------------------------------------------

    def _init_kind_state(self):
        n, pop, p = self.n, self.pop, self.cfg.params
        kind = self.cfg.kind
        if kind == "vs":
            self.center = None
            self.center_len = math.inf
            self.radii = vs_radius_table(self.max_gens, n)
        elif kind == "mvs":
            self.centers = None
            self.center_lens = np.full(pop, np.inf)
            self.radii = vs_radius_table(self.max_gens, n)
        elif kind == "sa":
            self.current = None
            self.current_len = math.inf
        elif kind == "pso":
            self.velocity = np.zeros((pop, n))
            self.pbest_pos = np.empty((pop, n))
            self.pbest_len = np.full(pop, np.inf)
            self.gbest_pos = None
            self.gbest_len = math.inf
        elif kind == "sca":
            self.gbest_pos = None
            self.gbest_len = math.inf
        elif kind == "gsa":
            self.velocity = np.zeros((pop, n))
            self.fitness = np.full(pop, np.inf)
        elif kind in ("bh", "ea"):
            self.fitness = np.full(pop, np.inf)

    # -- lifecycle ------------------------------------------------------------

    def initialize(self) -> DriverState:
        """Seed and evaluate the initial population (one call per member)."""
        if self.cfg.kind == "ea":
            base = np.arange(self.n, dtype=np.int64)
            for i in range(self.pop):
                perm = base.copy()
                self.rng.shuffle(perm)
                self.positions[i] = perm + 1.0
        else:
            self.positions[:] = self.rng.uniform(1.0, float(self.n), (self.pop, self.n))
        k = self._evaluate()
        lengths = self.lengths_buf[:k]
        kind = self.cfg.kind
        if kind == "vs":
            best = int(np.argmin(lengths))
            self.center = self.positions[best].copy()
            self.center_len = int(lengths[best])
        elif kind == "mvs":
            self.centers = self.positions.copy()
            self.center_lens[:k] = lengths
        elif kind == "sa":
            best = int(np.argmin(lengths))
            self.current = self.positions[best].copy()
            self.current_len = int(lengths[best])
        elif kind == "pso":
            self.pbest_pos[:] = self.positions
            self.pbest_len[:k] = lengths
            best = int(np.argmin(lengths))
            self.gbest_pos = self.positions[best].copy()
            self.gbest_len = int(lengths[best])
        elif kind == "sca":
            best = int(np.argmin(lengths))
            self.gbest_pos = self.positions[best].copy()
            self.gbest_len = int(lengths[best])
        elif kind in ("gsa", "bh", "ea"):
            self.fitness[:k] = lengths
        return self.state()

    def step(self) -> DriverState:
        """One generation: propose, evaluate through the pipeline, update."""
        if self.exhausted or self.budget.remaining == 0:
            self.exhausted = True
            return self.state()
        getattr(self, f"_propose_{self.cfg.kind}")()
        np.clip(self.positions, 1.0, float(self.n), out=self.positions)
        k = self._evaluate()
        getattr(self, f"_update_{self.cfg.kind}")(k)
        self.t += 1
        return self.state()

    def run(self) -> DriverState:
        """Iterate to budget exhaustion."""
        if self.incumbent_order is None:
            self.initialize()
        while not self.exhausted and self.budget.remaining > 0:
            self.step()
        return self.state()

    def state(self) -> DriverState:
        incumbent = Tour(order=self.incumbent_order, length=int(self.incumbent_length))
        return DriverState(
            positions=self.positions,
            incumbent=incumbent,
            incumbent_ofc=self.budget.best_at,
            generation=self.t,
            exhausted=self.exhausted,
        )

    def _evaluate(self) -> int:
        """Pipeline-evaluate as many proposals as the budget still allows."""
        k = min(self.pop, self.budget.remaining)
        used_before = self.budget.used
        apply_pipeline_batch(
            self.pipeline, self.positions, k, self.inst, self.budget, self.rng,
            self.orders_buf, self.lengths_buf,
        )
        for i in range(k):
            if self.lengths_buf[i] < self.incumbent_length:
                self.incumbent_length = int(self.lengths_buf[i])
                self.incumbent_order = self.orders_buf[i].copy()
                self.budget.best_at = used_before + i + 1
        if k < self.pop or self.budget.remaining == 0:
            self.exhausted = True
        return k

    # -- proposals ------------------------------------------------------------

    def _radius(self) -> float:
        return float(self.radii[min(self.t, self.radii.shape[0] - 1)])

    def _propose_vs(self):
        z = self.rng.normal((self.pop, self.n))
        self.positions[:] = self.center[None, :] + self._radius() * z

    def _propose_mvs(self):
        z = self.rng.normal((self.pop, self.n))
        self.positions[:] = self.centers + self._radius() * z

    def _propose_sa(self):
        p = self.cfg.params
        temp = sa_temperature(self.t, p["t0"], p["tf"], p["factor"])
        sigma = (temp / p["t0"]) * (self.n - 1)
        z = self.rng.normal((self.pop, self.n))
        self.positions[:] = self.current[None, :] + sigma * z

    def _propose_bh(self):
        bh = int(np.argmin(self.fitness))
        hole = self.positions[bh].copy()
        for i in range(self.pop):
            if i == bh:
                continue
            lam = self.rng.u01()
            self.positions[i] += lam * (hole - self.positions[i])

    def _propose_pso(self):
        p = self.cfg.params
        r1 = self.rng.uniform(0.0, 1.0, (self.pop, self.n))
        r2 = self.rng.uniform(0.0, 1.0, (self.pop, self.n))
        self.velocity *= p["inertia"]
        self.velocity += p["c1"] * r1 * (self.pbest_pos - self.positions)
        self.velocity += p["c2"] * r2 * (self.gbest_pos[None, :] - self.positions)
        vmax = float(self.n - 1)
        np.clip(self.velocity, -vmax, vmax, out=self.velocity)
        self.positions += self.velocity

    def _propose_sca(self):
        a = self.cfg.params["radius"]
        r1 = a * (1.0 - self.t / self.max_gens)
        r2 = self.rng.uniform(0.0, 2.0 * math.pi, (self.pop, self.n))
        r3 = self.rng.uniform(0.0, 2.0, (self.pop, self.n))
        r4 = self.rng.uniform(0.0, 1.0, (self.pop, self.n))
        pull = np.abs(r3 * self.gbest_pos[None, :] - self.positions)
        move = np.where(r4 < 0.5, np.sin(r2), np.cos(r2)) * r1 * pull
        self.positions += move

    def _propose_gsa(self):
        p = self.cfg.params
        fit = self.fitness.astype(np.float64)
        worst, best = fit.max(), fit.min()
        if worst == best:
            m = np.ones(self.pop)
        else:
            m = (fit - worst) / (best - worst)
        masses = m / m.sum()
        g = p["g0"] * math.exp(-p["alpha"] * self.t / self.max_gens)
        kbest = min(int(p["attractive"]), self.pop)
        heavy = np.argsort(self.fitness, kind="stable")[:kbest]
        accel = np.zeros((self.pop, self.n))
        eps = 1e-9
        for j in heavy:
            diff = self.positions[j][None, :] - self.positions
            r = np.sqrt((diff * diff).sum(axis=1))
            w = self.rng.uniform(0.0, 1.0, self.pop)
            scale = w * g * masses[j] / (r + eps)
            scale[j] = 0.0
            accel += scale[:, None] * diff
        w = self.rng.uniform(0.0, 1.0, (self.pop, self.n))
        self.velocity = w * self.velocity + accel
        self.positions += self.velocity

    def _propose_ea(self):
        p = self.cfg.params
        offspring = np.empty_like(self.positions)
        self._elite_pos = self.positions[int(np.argmin(self.fitness))].copy()
        self._elite_len = float(self.fitness.min())
        for i in range(self.pop):
            a = self.rng.integers(self.pop)
            b = self.rng.integers(self.pop)
            parent = a if self.fitness[a] <= self.fitness[b] else b
            row = self.positions[parent].copy()
            for _ in range(p["mutations"]):
                u = self.rng.integers(self.n)
                v = self.rng.integers(self.n)
                while v == u:
                    v = self.rng.integers(self.n)
                row[u], row[v] = row[v], row[u]
            offspring[i] = row
        self.positions[:] = offspring

    # -- post-evaluation updates -----------------------------------------------

    def _update_vs(self, k: int):
        if k == 0:
            return
        best = int(np.argmin(self.lengths_buf[:k]))
        if self.lengths_buf[best] < self.center_len:
            self.center = self.positions[best].copy()
            self.center_len = int(self.lengths_buf[best])

    def _update_mvs(self, k: int):
        for i in range(k):
            if self.lengths_buf[i] < self.center_lens[i]:
                self.centers[i] = self.positions[i]
                self.center_lens[i] = self.lengths_buf[i]

    def _update_sa(self, k: int):
        p = self.cfg.params
        temp = sa_temperature(self.t, p["t0"], p["tf"], p["factor"])
        for i in range(k):
            delta = int(self.lengths_buf[i]) - self.current_len
            if delta <= 0 or self.rng.u01() < math.exp(-delta / temp):
                self.current = self.positions[i].copy()
                self.current_len = int(self.lengths_buf[i])

    def _update_bh(self, k: int):
        self.fitness[:k] = self.lengths_buf[:k]
        bh = int(np.argmin(self.fitness))
        hole = self.positions[bh].copy()
        total = float(self.fitness.sum())
        radius = float(self.fitness[bh]) / total if math.isfinite(total) else 0.0
        for i in range(self.pop):
            if i == bh:
                continue
            d = math.sqrt(float(((self.positions[i] - hole) ** 2).sum()))
            if d < radius:
                self.positions[i] = self.rng.uniform(1.0, float(self.n), self.n)
                self.fitness[i] = np.inf

    def _update_pso(self, k: int):
        for i in range(k):
            if self.lengths_buf[i] < self.pbest_len[i]:
                self.pbest_len[i] = self.lengths_buf[i]
                self.pbest_pos[i] = self.positions[i]
                if self.pbest_len[i] < self.gbest_len:
                    self.gbest_len = int(self.pbest_len[i])
                    self.gbest_pos = self.positions[i].copy()

    def _update_sca(self, k: int):
        for i in range(k):
            if self.lengths_buf[i] < self.gbest_len:
                self.gbest_len = int(self.lengths_buf[i])
                self.gbest_pos = self.positions[i].copy()

    def _update_gsa(self, k: int):
        self.fitness[:k] = self.lengths_buf[:k]

    def _update_ea(self, k: int):
        self.fitness[:k] = self.lengths_buf[:k]
        if k == self.pop and self.cfg.params["elitism"] >= 1:
            if self._elite_len < self.fitness.min():
                worst = int(np.argmax(self.fitness))
                self.positions[worst] = self._elite_pos
                self.fitness[worst] = self._elite_len


def make_driver(
    cfg: MhConfig,
    inst: Instance,
    pipeline: HybridPipeline,
    budget: Budget,
    rng: RngStream,
) -> Driver:
    return Driver(cfg, inst, pipeline, budget, rng)
