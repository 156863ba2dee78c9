"""Experiment harnesses.

Three studies over the engine:

* progressive image transfer: singular triplets of an image become the
  data chunks, and each policy's reconstruction-error-vs-step curve
  shows how quickly it builds a usable approximation;
* seeded Monte-Carlo comparison of policy makespans over richness
  distributions (constant, uniform, one very rich site);
* scaling of makespan with chunk count, including the priority
  condition relating the leaf-cutter and all-sites policies.

Everything is reproducible bit for bit from the experiment seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .engine import EngineConfig, Trace, makespan_oracle, run
from .model import ChunkSpec
from .policies import Policy
from .rng import SplitMix64, derive_seed
from .svd import reconstruct, svd

DEFAULT_POLICIES = (Policy("sequential"), Policy("all-sites"), Policy("leaf-cutter"))

DISTRIBUTION_KINDS = ("constant", "uniform", "one-rich")


@dataclass(frozen=True)
class Distribution:
    """Generator family for chunk richness (r_on) values.

    constant: every chunk gets r_on = c.
    uniform: r_on drawn uniformly from [low, high).
    one-rich: one chunk at r_best, the rest uniform in [low, high).
    """

    kind: str
    c: float = 50.0
    low: float = 1.0
    high: float = 100.0
    r_best: float = 1.0

    def __post_init__(self):
        if self.kind not in DISTRIBUTION_KINDS:
            raise ValueError(f"unknown distribution {self.kind!r}")
        for name in ("c", "low", "high", "r_best"):
            value = getattr(self, name)
            if not 0.0 < value <= 100.0:
                raise ValueError(f"distribution.{name} must be in (0, 100], got {value}")
        if self.low > self.high:
            raise ValueError(f"distribution bounds reversed: [{self.low}, {self.high}]")

    def sample(self, n: int, rng: SplitMix64) -> list[float]:
        if self.kind == "constant":
            return [self.c] * n
        if self.kind == "uniform":
            return [rng.uniform(self.low, self.high) for _ in range(n)]
        return [self.r_best] + [rng.uniform(self.low, self.high) for _ in range(n - 1)]

    def label(self) -> str:
        if self.kind == "constant":
            return f"constant({self.c:g})"
        if self.kind == "uniform":
            return f"uniform({self.low:g},{self.high:g})"
        return f"one-rich({self.r_best:g};{self.low:g},{self.high:g})"


def generate_chunks(
    distribution: Distribution,
    n: int,
    seed: int,
    r_off: float = 200.0,
    beta: float = 1.0,
    window: int | None = None,
) -> list[ChunkSpec]:
    """n chunk specs with seeded r_on values from the distribution."""
    rng = SplitMix64(seed)
    return [
        ChunkSpec(id=i, r_on=r, r_off=r_off, beta=beta, window=window)
        for i, r in enumerate(distribution.sample(n, rng))
    ]


# ---------------------------------------------------------------------------
# Monte-Carlo policy comparison


def default_n_range() -> tuple[int, ...]:
    return tuple(range(2, 76)) + (1000,)


@dataclass(frozen=True)
class MonteCarloSpec:
    distribution: Distribution
    n_range: tuple[int, ...] = field(default_factory=default_n_range)
    trials: int = 10
    seed: int = 0
    r_off: float = 200.0
    beta: float = 1.0
    window: int | None = 8

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if any(n < 1 for n in self.n_range):
            raise ValueError("n_range entries must be >= 1")


@dataclass(frozen=True)
class TrialRow:
    n: int
    trial: int
    policy: str
    makespan: int
    win: bool


@dataclass
class MonteCarloResult:
    distribution: str
    rows: list[TrialRow]
    win_rates: dict[tuple[int, str], float]
    mean_makespans: dict[tuple[int, str], float]


def monte_carlo(
    spec: MonteCarloSpec,
    config: EngineConfig,
    policies: tuple[Policy, ...] = DEFAULT_POLICIES,
) -> MonteCarloResult:
    """Run every policy on identical seeded instances and score wins.

    A policy wins a trial when its makespan equals the trial minimum;
    ties credit every tied policy.
    """
    config = replace(config, record_steps=False)
    rows: list[TrialRow] = []
    wins: dict[tuple[int, str], int] = {}
    spans: dict[tuple[int, str], list[int]] = {}
    for n in spec.n_range:
        for trial in range(spec.trials):
            chunk_seed = derive_seed(spec.seed, n, trial)
            chunks = generate_chunks(
                spec.distribution, n, chunk_seed, spec.r_off, spec.beta, spec.window
            )
            makespans: dict[str, int] = {}
            for policy in policies:
                trace = run(chunks, policy, config)
                if trace.makespan is None:
                    raise RuntimeError(
                        f"policy {policy.kind} truncated at n={n}, trial={trial}; "
                        f"raise max_steps"
                    )
                makespans[policy.kind] = trace.makespan
            best = min(makespans.values())
            for policy in policies:
                key = (n, policy.kind)
                win = makespans[policy.kind] == best
                rows.append(TrialRow(n, trial, policy.kind, makespans[policy.kind], win))
                wins[key] = wins.get(key, 0) + (1 if win else 0)
                spans.setdefault(key, []).append(makespans[policy.kind])
    win_rates = {key: count / spec.trials for key, count in wins.items()}
    means = {key: sum(vals) / len(vals) for key, vals in spans.items()}
    return MonteCarloResult(spec.distribution.label(), rows, win_rates, means)


# ---------------------------------------------------------------------------
# Scaling with chunk count


@dataclass(frozen=True)
class ScalingConfig:
    n_values: tuple[int, ...] = (10, 100, 1000)
    distribution: Distribution = Distribution("uniform", low=1.0, high=100.0)
    seed: int = 0
    r_off: float = 200.0
    beta: float = 1.0
    window: int = 50
    continuum_engine: EngineConfig = EngineConfig(
        v_total=0.5, dt=1.0, max_steps=2_000_000, freshness_enabled=False, record_steps=False
    )
    freshness_engine: EngineConfig = EngineConfig(
        v_total=1250.0, dt=1.0, max_steps=2_000_000, freshness_enabled=True, record_steps=False
    )

    def __post_init__(self):
        if any(n < 2 for n in self.n_values):
            raise ValueError("scaling n values must be >= 2")


@dataclass(frozen=True)
class ScalingRow:
    mode: str
    n: int
    policy: str
    makespan: int
    oracle: float


@dataclass
class ScalingResult:
    rows: list[ScalingRow]
    sequential_fit: dict[str, tuple[float, float, float]]  # mode -> slope, intercept, r2


def _linear_fit(xs: list[float], ys: list[float]) -> tuple[float, float, float]:
    coeffs = np.polyfit(xs, ys, 1)
    pred = np.polyval(coeffs, xs)
    resid = np.asarray(ys) - pred
    total = np.asarray(ys) - np.mean(ys)
    ss_tot = float(total @ total)
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    return float(coeffs[0]), float(coeffs[1]), r2


def scaling_study(
    cfg: ScalingConfig, policies: tuple[Policy, ...] = DEFAULT_POLICIES
) -> ScalingResult:
    """Makespan per (mode, policy, n) plus the sequential linear fit."""
    rows: list[ScalingRow] = []
    modes = (
        ("continuum", cfg.continuum_engine, None),
        ("freshness", cfg.freshness_engine, cfg.window),
    )
    for mode, engine, window in modes:
        engine = replace(engine, record_steps=False)
        for n in cfg.n_values:
            chunks = generate_chunks(
                cfg.distribution, n, derive_seed(cfg.seed, n), cfg.r_off, cfg.beta, window
            )
            oracle = makespan_oracle(chunks, engine.v_total)
            for policy in policies:
                trace = run(chunks, policy, engine)
                if trace.makespan is None:
                    raise RuntimeError(f"truncated scaling run: {mode}, n={n}, {policy.kind}")
                rows.append(ScalingRow(mode, n, policy.kind, trace.makespan, oracle))
    fits = {}
    for mode, _, _ in modes:
        pts = [(r.n, r.makespan) for r in rows if r.mode == mode and r.policy == "sequential"]
        fits[mode] = _linear_fit([float(n) for n, _ in pts], [float(m) for _, m in pts])
    return ScalingResult(rows, fits)


# ---------------------------------------------------------------------------
# Leaf-cutter priority condition


@dataclass(frozen=True)
class DominanceResult:
    lhs: float
    rhs: float
    holds: bool


def dominance_condition(specs: list[ChunkSpec], config: EngineConfig) -> DominanceResult:
    """Measure whether prioritizing the richest chunk is predicted to pay off.

    lhs: extra all-sites time caused by including the richest chunk in
    the parallel pool.  rhs: time to drain that chunk alone on full
    bandwidth.  Both in time units (steps * dt), measured by simulation
    under the given config.
    """
    if len(specs) < 2:
        raise ValueError("need at least 2 chunks")
    config = replace(config, record_steps=False)
    richest = min(specs, key=lambda s: (s.r_on, s.id))
    rest = [s for s in specs if s.id != richest.id]
    all_sites = Policy("all-sites")

    def span(chunk_list: list[ChunkSpec], policy: Policy) -> int:
        trace = run(chunk_list, policy, config)
        if trace.makespan is None:
            raise RuntimeError("dominance run truncated; raise max_steps")
        return trace.makespan

    lhs = (span(specs, all_sites) - span(rest, all_sites)) * config.dt
    rhs = span([richest], Policy("sequential")) * config.dt
    return DominanceResult(lhs=lhs, rhs=rhs, holds=lhs < rhs)


# ---------------------------------------------------------------------------
# Progressive transfer of an image via its singular triplets


@dataclass(frozen=True)
class ChunkMap:
    """How normalized singular values map onto chunk richness."""

    r_min: float = 1.0
    r_max: float = 100.0
    r_off: float = 200.0
    beta: float = 1.0
    window: int | None = None

    def __post_init__(self):
        if not 0.0 < self.r_min <= self.r_max <= 100.0:
            raise ValueError(f"need 0 < r_min <= r_max <= 100, got {self.r_min}, {self.r_max}")
        if not self.r_off > self.r_max:
            raise ValueError(f"r_off must exceed r_max, got {self.r_off}")


@dataclass(frozen=True)
class SvdInstance:
    """Ordered singular triplets of a source matrix, plus the richness map.

    matrix, u and v may be absent when the instance was built from a
    bare singular-value list; reconstruction errors then come from the
    sigma tail instead of an explicit difference matrix.
    """

    sigmas: np.ndarray
    u: np.ndarray | None
    v: np.ndarray | None
    matrix: np.ndarray | None
    chunk_map: ChunkMap


def svd_instance_from_matrix(matrix, chunk_map: ChunkMap = ChunkMap()) -> SvdInstance:
    """Decompose a matrix and package its triplets as an instance."""
    a = np.asarray(matrix, dtype=float)
    u, s, v = svd(a)
    _check_triplets(a, u, s, v)
    return SvdInstance(sigmas=s, u=u, v=v, matrix=a, chunk_map=chunk_map)


def svd_instance_from_sigmas(sigmas, chunk_map: ChunkMap = ChunkMap()) -> SvdInstance:
    s = np.asarray(sigmas, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("need a 1-D list of singular values")
    if np.any(s < 0) or np.any(np.diff(s) > 0):
        raise ValueError("singular values must be non-negative and descending")
    return SvdInstance(sigmas=s, u=None, v=None, matrix=None, chunk_map=chunk_map)


def _check_triplets(a: np.ndarray, u: np.ndarray, s: np.ndarray, v: np.ndarray) -> None:
    k = s.size
    ortho_u = np.linalg.norm(u.T @ u - np.eye(k))
    ortho_v = np.linalg.norm(v.T @ v - np.eye(k))
    if max(ortho_u, ortho_v) > 1e-9:
        raise RuntimeError(f"triplet columns not orthonormal: {max(ortho_u, ortho_v):.2e}")
    scale = np.linalg.norm(a)
    if scale > 0:
        resid = np.linalg.norm(a - reconstruct(u, s, v)) / scale
        if resid > 1e-6:
            raise RuntimeError(f"triplets do not reconstruct the matrix: {resid:.2e}")


def chunks_from_svd(instance: SvdInstance) -> list[ChunkSpec]:
    """One chunk per singular triplet; stronger triplets are richer.

    richness_k = sigma_k / sigma_1 maps linearly onto r_on between
    r_min (richest) and r_max, and doubles as the chunk's importance.
    """
    s = instance.sigmas
    if s[0] == 0.0:
        raise ValueError("all singular values are zero; nothing to transfer")
    cm = instance.chunk_map
    specs = []
    for k in range(s.size):
        richness = float(s[k] / s[0])
        r_on = cm.r_min + (cm.r_max - cm.r_min) * (1.0 - richness)
        r_on = min(max(r_on, cm.r_min), 100.0)
        specs.append(
            ChunkSpec(
                id=k,
                r_on=r_on,
                r_off=cm.r_off,
                beta=cm.beta,
                importance=richness,
                window=cm.window,
            )
        )
    return specs


def reconstruction_error(instance: SvdInstance, completed_ids) -> float:
    """Relative Frobenius error of the rank-sum over the completed triplets."""
    done = sorted(set(int(i) for i in completed_ids))
    if done and (done[0] < 0 or done[-1] >= instance.sigmas.size):
        raise ValueError(f"completed ids out of range: {done}")
    if instance.matrix is not None:
        approx = reconstruct(instance.u, instance.sigmas, instance.v, keep=done)
        scale = np.linalg.norm(instance.matrix)
        return float(np.linalg.norm(instance.matrix - approx) / scale)
    total = float(instance.sigmas @ instance.sigmas)
    missing = sum(float(instance.sigmas[k]) ** 2 for k in range(instance.sigmas.size) if k not in set(done))
    return float(np.sqrt(missing / total))


@dataclass
class PolicyCurve:
    policy: str
    makespan: int
    errors: list[float]  # errors[t - 1] = reconstruction error after step t


@dataclass
class SvdExperimentResult:
    curves: dict[str, PolicyCurve]
    horizon: int


def run_svd_experiment(
    instance: SvdInstance,
    policies: tuple[Policy, ...],
    config: EngineConfig,
) -> SvdExperimentResult:
    """Per policy: run the transfer and evaluate the error after every step.

    Curves are padded to the slowest policy's makespan; a finished
    policy keeps its final error.
    """
    if not policies:
        raise ValueError("need at least one policy")
    chunks = chunks_from_svd(instance)
    config = replace(config, record_steps=False)
    raw: dict[str, tuple[int, dict[int, int]]] = {}
    for policy in policies:
        trace = run(chunks, policy, config)
        if trace.makespan is None:
            raise RuntimeError(f"svd experiment truncated for policy {policy.kind}")
        raw[policy.kind] = (trace.makespan, trace.completions)
    horizon = max(makespan for makespan, _ in raw.values())
    curves = {}
    for kind, (makespan, completions) in raw.items():
        events: dict[int, list[int]] = {}
        for cid, step in completions.items():
            events.setdefault(step, []).append(cid)
        done: set[int] = set()
        errors = []
        current = reconstruction_error(instance, done)
        for t in range(1, horizon + 1):
            if t in events:
                done.update(events[t])
                current = reconstruction_error(instance, done)
            errors.append(current)
        curves[kind] = PolicyCurve(policy=kind, makespan=makespan, errors=errors)
    return SvdExperimentResult(curves=curves, horizon=horizon)


def sign_changes(errors_a: list[float], errors_b: list[float], atol: float = 1e-12) -> list[tuple[int, int]]:
    """Sign flips of (a - b), ignoring steps where the curves agree.

    Returns (1-based step, new sign) at each flip; the first decided
    sign is included as the opening entry.
    """
    out: list[tuple[int, int]] = []
    sign = 0
    for i, (ea, eb) in enumerate(zip(errors_a, errors_b)):
        d = ea - eb
        if abs(d) <= atol:
            continue
        new = 1 if d > 0 else -1
        if new != sign:
            out.append((i + 1, new))
            sign = new
    return out


# ---------------------------------------------------------------------------
# Documented default configurations for the regime studies.  These are
# the settings under which the qualitative orderings reported by the
# acceptance suite were established; see README for the reasoning.

REGIME_TRIALS = 100

REGIME_CONSTANT = MonteCarloSpec(
    distribution=Distribution("constant", c=50.0),
    n_range=(4, 8, 16, 20),
    trials=REGIME_TRIALS,
    seed=101,
    window=8,
)
REGIME_CONSTANT_ENGINE = EngineConfig(
    v_total=500.0, dt=1.0, max_steps=200_000, freshness_enabled=True, record_steps=False
)

REGIME_ONE_RICH = MonteCarloSpec(
    distribution=Distribution("one-rich", r_best=1.0, low=80.0, high=100.0),
    n_range=(20,),
    trials=REGIME_TRIALS,
    seed=202,
    window=8,
)
REGIME_ONE_RICH_ENGINE = EngineConfig(
    v_total=2.0, dt=1.0, max_steps=200_000, freshness_enabled=True, record_steps=False
)

REGIME_UNIFORM = MonteCarloSpec(
    distribution=Distribution("uniform", low=1.0, high=100.0),
    n_range=(20, 40, 75),
    trials=REGIME_TRIALS,
    seed=303,
    window=8,
)
REGIME_UNIFORM_ENGINE = EngineConfig(
    v_total=500.0, dt=1.0, max_steps=200_000, freshness_enabled=True, record_steps=False
)

DEFAULT_SCALING = ScalingConfig(seed=404)

# Narrow richness spread keeps the solo advantage of the best chunk
# small, which is where the priority condition comes out true.
DOMINANCE_FAMILY_SEED = 505
DOMINANCE_FAMILY_SIZE = 200
DOMINANCE_ENGINE = EngineConfig(
    v_total=2.0, dt=1.0, max_steps=500_000, freshness_enabled=True, record_steps=False
)

FIG1_CHUNK_MAP = ChunkMap(r_min=1.0, r_max=100.0, r_off=105.0, beta=1.0, window=8)
FIG1_ENGINE = EngineConfig(
    v_total=4.0, dt=1.0, max_steps=100_000, freshness_enabled=True, record_steps=False
)


def dominance_family(
    seed: int = DOMINANCE_FAMILY_SEED,
    count: int = DOMINANCE_FAMILY_SIZE,
    n_min: int = 3,
    n_max: int = 10,
    low: float = 85.0,
    high: float = 100.0,
    window: int | None = 8,
    r_off: float = 200.0,
    beta: float = 1.0,
) -> list[list[ChunkSpec]]:
    """Seeded instances for the priority-condition study."""
    out = []
    dist = Distribution("uniform", low=low, high=high)
    for i in range(count):
        rng = SplitMix64(derive_seed(seed, i))
        n = rng.randint(n_min, n_max)
        specs = [
            ChunkSpec(id=j, r_on=r, r_off=r_off, beta=beta, window=window)
            for j, r in enumerate(dist.sample(n, rng))
        ]
        out.append(specs)
    return out
