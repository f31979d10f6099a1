"""Reproducible lattice walkers: classical, censored, long-jump, and comb.

Random numbers come from counter-based Philox streams keyed by
(seed, block index) with a fixed block size, so results are bit-for-bit
reproducible for a given (seed, config) regardless of how the ensemble
is partitioned; reductions merge blocks in a fixed order.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .core import Domain, GridFunction

__all__ = [
    "WalkConfig",
    "CombConfig",
    "CensoredWalkModel",
    "EnsembleResult",
    "run_classical_walk",
    "run_censored_walk",
    "run_free_longjump_walk",
    "run_comb_walk",
    "empirical_density",
    "lattice_normalizer",
]

_BLOCK = 65536


def _block_rngs(seed, n_walkers):
    """Philox generators for consecutive walker blocks, fixed order."""
    n_blocks = (n_walkers + _BLOCK - 1) // _BLOCK
    gens = []
    for b in range(n_blocks):
        ss = np.random.SeedSequence(entropy=(int(seed), b))
        gens.append((np.random.Generator(np.random.Philox(ss)),
                     min(_BLOCK, n_walkers - b * _BLOCK)))
    return gens


def lattice_normalizer(s, head=10 ** 6):
    """C = sum_{k != 0} |k|^(-1-2s) with a midpoint-corrected tail."""
    k = np.arange(1, head + 1, dtype=float)
    return 2.0 * (float(np.sum(k ** (-1.0 - 2.0 * s)))
                  + (head + 0.5) ** (-2.0 * s) / (2.0 * s))


@dataclass
class WalkConfig:
    """Lattice walk parameters; tau follows from the walk kind.

    Classical walks tie tau = h^2; long-jump walks (censored or free)
    tie tau = h^(2s).  ``domain`` restricts the censored walk.
    """

    h: float
    horizon: float
    ensemble: int
    seed: int
    s: Optional[float] = None
    domain: Optional[Domain] = None

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("lattice spacing must be positive")
        if self.ensemble < 1:
            raise ValueError("ensemble must be positive")
        if self.s is not None and not 0.0 < self.s < 1.0:
            raise ValueError("fractional order must lie in (0, 1)")

    @property
    def tau_classical(self):
        return self.h ** 2

    @property
    def tau_longjump(self):
        if self.s is None:
            raise ValueError("long-jump walks need a fractional order")
        return self.h ** (2.0 * self.s)


@dataclass
class EnsembleResult:
    """Final positions plus recorded diagnostics, reproducible per seed."""

    kind: str
    positions: np.ndarray
    n_steps: int
    tau: float
    seed: int
    block_entropy: Tuple[Tuple[int, int], ...]
    msd_steps: Optional[np.ndarray] = None
    msd_values: Optional[np.ndarray] = None
    extras: dict = field(default_factory=dict)

    @property
    def elapsed(self):
        return self.n_steps * self.tau

    @property
    def msd_times(self):
        return None if self.msd_steps is None else self.msd_steps * self.tau


def _snapshot_steps(n_steps, n_snap=24):
    if n_steps <= 1:
        return np.array([n_steps])
    return np.unique(np.geomspace(1, n_steps, n_snap).astype(int))


def run_classical_walk(cfg: WalkConfig) -> EnsembleResult:
    """Nearest-neighbor walk with steps +-h, tau = h^2.

    The second moment grows as MSD(t) = (t/tau) h^2 = t, and at fixed t
    the empirical density approaches the Gaussian of variance t.
    """
    tau = cfg.tau_classical
    n_steps = max(1, int(round(cfg.horizon / tau)))
    snaps = _snapshot_steps(n_steps)
    msd_acc = np.zeros(snaps.size)
    finals = []
    entropy = []
    for b, (rng, n) in enumerate(_block_rngs(cfg.seed, cfg.ensemble)):
        entropy.append((cfg.seed, b))
        pos = np.zeros(n, dtype=np.int64)
        j = 0
        for step in range(1, n_steps + 1):
            pos += 2 * rng.integers(0, 2, size=n, dtype=np.int64) - 1
            if j < snaps.size and step == snaps[j]:
                msd_acc[j] += float(np.sum((cfg.h * pos) ** 2))
                j += 1
        finals.append(cfg.h * pos.astype(float))
    return EnsembleResult("classical", np.concatenate(finals), n_steps, tau,
                          cfg.seed, tuple(entropy),
                          msd_steps=snaps.astype(float),
                          msd_values=msd_acc / cfg.ensemble)


@dataclass
class CensoredWalkModel:
    """Exact per-site jump table of the censored lattice walk.

    Offsets with |j| <= span can land inside the interval; all farther
    jumps are certainly censored (they overshoot the domain), so their
    probability mass joins the stay outcome exactly.  Row sums equal one
    by construction and the jump law is symmetric in (site, site').
    """

    s: float
    h: float
    domain: Domain

    def __post_init__(self):
        if self.domain.kind != "interval":
            raise ValueError("censored walk needs an interval domain")
        a, b = self.domain.a, self.domain.b
        k_lo = int(np.floor(a / self.h)) + 1
        k_hi = int(np.ceil(b / self.h)) - 1
        self.sites = np.arange(k_lo, k_hi + 1)
        if self.sites.size < 64:
            raise ValueError("domain too coarse: fewer than 64 sites")
        self.norm = lattice_normalizer(self.s)
        span = self.sites.size
        j = np.arange(-span, span + 1)
        w = np.zeros(j.size)
        nz = j != 0
        w[nz] = np.abs(j[nz]) ** (-1.0 - 2.0 * self.s) / self.norm
        self.offsets = j
        self.offset_probs = w
        self.far_mass = 1.0 - float(np.sum(w))
        self.cdf = np.cumsum(np.append(w, self.far_mass))

    def stay_probability(self, site):
        """1 - c_h(site): censored mass plus the lumped far-jump mass."""
        targets = site + self.offsets
        inside = (targets >= self.sites[0]) & (targets <= self.sites[-1])
        inside &= self.offsets != 0
        return 1.0 - float(np.sum(self.offset_probs[inside]))

    def transition_row(self, site):
        """Probabilities over self.sites plus the stay mass, summing to 1."""
        row = np.zeros(self.sites.size)
        for j, p in zip(self.offsets, self.offset_probs):
            t = site + j
            if j != 0 and self.sites[0] <= t <= self.sites[-1]:
                row[t - self.sites[0]] += p
        return row, self.stay_probability(site)


def run_censored_walk(cfg: WalkConfig) -> EnsembleResult:
    """Propose-then-freeze censored walk on an interval, tau = h^(2s).

    Jumps are drawn from the full-lattice power law; any proposal landing
    outside the domain is rejected and the walker stays put, which
    realizes the censored transition kernel exactly.
    """
    if cfg.domain is None:
        raise ValueError("censored walk needs a domain")
    model = CensoredWalkModel(cfg.s, cfg.h, cfg.domain)
    tau = cfg.tau_longjump
    n_steps = max(1, int(round(cfg.horizon / tau)))
    lo, hi = model.sites[0], model.sites[-1]
    stay_index = model.offsets.size          # the lumped far-jump outcome

    finals = []
    entropy = []
    stay_draws_center = 0
    center_visits = 0
    for b, (rng, n) in enumerate(_block_rngs(cfg.seed, cfg.ensemble)):
        entropy.append((cfg.seed, b))
        pos = np.zeros(n, dtype=np.int64)
        for _ in range(n_steps):
            u = rng.random(n)
            idx = np.searchsorted(model.cdf, u, side="right")
            jump = np.where(idx >= stay_index, 0, model.offsets[np.minimum(idx, stay_index - 1)])
            at_center = pos == 0
            center_visits += int(np.sum(at_center))
            prop = pos + jump
            ok = (prop >= lo) & (prop <= hi)
            stay_draws_center += int(np.sum(at_center & ~(ok & (jump != 0))))
            pos = np.where(ok, prop, pos)
        finals.append(cfg.h * pos.astype(float))
    res = EnsembleResult("censored", np.concatenate(finals), n_steps, tau,
                         cfg.seed, tuple(entropy))
    res.extras["center_stay_frequency"] = (stay_draws_center / center_visits
                                           if center_visits else math.nan)
    res.extras["model"] = model
    return res


def run_free_longjump_walk(cfg: WalkConfig, jump_law="lattice_power_law",
                           k_max=10 ** 4) -> EnsembleResult:
    """Unrestricted long-jump walk, tau = h^(2s).

    ``lattice_power_law`` draws offsets from the exact lattice law
    truncated at |j| <= k_max (truncated tail mass recorded);
    ``continuum_pareto`` draws signed magnitudes r = r0 U^(-1/2s) beyond a
    matched short-range core, useful when the tail matters more than the
    exact time normalization.
    """
    tau = cfg.tau_longjump
    n_steps = max(1, int(round(cfg.horizon / tau)))
    s = cfg.s
    finals = []
    entropy = []
    extras = {}

    if jump_law == "lattice_power_law":
        norm = lattice_normalizer(s)
        j = np.arange(1, k_max + 1, dtype=float)
        half = j ** (-1.0 - 2.0 * s) / norm
        tail_mass = 1.0 - 2.0 * float(np.sum(half))
        extras["tail_mass"] = tail_mass
        extras["k_max"] = k_max
        # outcomes: -k_max..-1, +1..+k_max, stay-with-prob tail_mass
        probs = np.concatenate([half[::-1], half])
        offsets = np.concatenate([-j[::-1], j]).astype(np.int64)
        cdf = np.cumsum(np.append(probs, tail_mass))
        for b, (rng, n) in enumerate(_block_rngs(cfg.seed, cfg.ensemble)):
            entropy.append((cfg.seed, b))
            pos = np.zeros(n, dtype=np.int64)
            for _ in range(n_steps):
                u = rng.random(n)
                idx = np.searchsorted(cdf, u, side="right")
                pos += np.where(idx >= offsets.size, 0,
                                offsets[np.minimum(idx, offsets.size - 1)])
            finals.append(cfg.h * pos.astype(float))
    elif jump_law == "continuum_pareto":
        r0 = 1.0
        for b, (rng, n) in enumerate(_block_rngs(cfg.seed, cfg.ensemble)):
            entropy.append((cfg.seed, b))
            pos = np.zeros(n, dtype=float)
            for _ in range(n_steps):
                mag = r0 * rng.random(n) ** (-1.0 / (2.0 * s))
                sign = 2.0 * rng.integers(0, 2, size=n) - 1.0
                pos += sign * mag
            finals.append(cfg.h * pos)
        extras["r0"] = r0
    else:
        raise ValueError(f"unknown jump law {jump_law!r}")

    res = EnsembleResult("free", np.concatenate(finals), n_steps, tau,
                         cfg.seed, tuple(entropy))
    res.extras.update(extras)
    return res


@dataclass
class CombConfig:
    """Backbone-and-fingers lattice: horizontal moves only at y = 0."""

    spacing: float = 1.0
    d1: float = 1.0
    d2: float = 1.0
    n_steps: int = 10 ** 4
    ensemble: int = 10 ** 5
    seed: int = 0

    def __post_init__(self):
        if self.d1 <= 0 or self.d2 <= 0:
            raise ValueError("move rates must be positive")
        if self.n_steps < 1 or self.ensemble < 1:
            raise ValueError("steps and ensemble must be positive")


def run_comb_walk(cfg: CombConfig) -> EnsembleResult:
    """Walk on the comb; the backbone displacement is subdiffusive.

    On the backbone a step is horizontal with probability d1/(d1 + d2)
    and vertical otherwise; off the backbone only vertical moves exist.
    Backbone MSD grows like t^(1/2); finger MSD stays diffusive.
    """
    snaps = _snapshot_steps(cfg.n_steps, 28)
    msd_x = np.zeros(snaps.size)
    msd_y = np.zeros(snaps.size)
    on_bb = np.zeros(snaps.size)
    p_horiz = cfg.d1 / (cfg.d1 + cfg.d2)
    finals = []
    entropy = []
    for b, (rng, n) in enumerate(_block_rngs(cfg.seed, cfg.ensemble)):
        entropy.append((cfg.seed, b))
        x = np.zeros(n, dtype=np.int64)
        y = np.zeros(n, dtype=np.int64)
        j = 0
        for step in range(1, cfg.n_steps + 1):
            backbone = y == 0
            horiz = backbone & (rng.random(n) < p_horiz)
            delta = 2 * rng.integers(0, 2, size=n, dtype=np.int64) - 1
            x += np.where(horiz, delta, 0)
            y += np.where(horiz, 0, delta)
            if j < snaps.size and step == snaps[j]:
                msd_x[j] += float(np.sum(x.astype(float) ** 2))
                msd_y[j] += float(np.sum(y.astype(float) ** 2))
                on_bb[j] += float(np.sum(y == 0))
                j += 1
        finals.append(np.stack([x, y], axis=1).astype(float) * cfg.spacing)
    scale = cfg.spacing ** 2 / cfg.ensemble
    res = EnsembleResult("comb", np.concatenate(finals, axis=0),
                         cfg.n_steps, 1.0, cfg.seed, tuple(entropy),
                         msd_steps=snaps.astype(float),
                         msd_values=msd_x * scale)
    res.extras["msd_y"] = msd_y * scale
    res.extras["backbone_fraction"] = on_bb / cfg.ensemble
    return res


def empirical_density(res: EnsembleResult, bins) -> GridFunction:
    """Normalized histogram of final positions as a grid function.

    ``bins`` is an edge array or a count over the sample range; the values
    are scaled so the trapezoid mass is exactly one, which makes the mass
    invariant under bin refinement.
    """
    pos = res.positions
    if pos.ndim != 1:
        raise ValueError("density needs scalar positions (1-d walks)")
    if pos.size == 0:
        raise ValueError("empty ensemble")
    if np.isscalar(bins):
        lo, hi = float(np.min(pos)), float(np.max(pos))
        pad = 1e-9 * max(1.0, hi - lo)
        edges = np.linspace(lo - pad, hi + pad, int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    counts, edges = np.histogram(pos, bins=edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    width = edges[1] - edges[0]
    vals = counts / (pos.size * width)
    gf = GridFunction(Domain.interval(centers[0], centers[-1]), vals)
    mass = gf.trapezoid()
    if mass <= 0:
        raise ValueError("histogram has no mass")
    return GridFunction(gf.domain, vals / mass)
