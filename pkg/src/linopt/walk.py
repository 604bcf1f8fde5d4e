"""Classical random walks associated to circuit geometries.

Each gate layer induces a lazy walk factor S (hold with probability 1/2,
hop across the beamsplitter with probability 1/2); a circuit step induces
the doubly stochastic kernel P = S^(1) S^(2) ... S^(M).  The mean squared
circuit entries satisfy E|U_{xy}|^2 = (P^d)_{y,x} exactly, which this
module verifies by Monte Carlo, along with reflection equivalence on the
line, total-variation mixing times, and pair pi-meeting times.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GeometrySpec, brickwall_geometry
from .moments import second_moment_matrix
from .sampler import RngStream

__all__ = [
    "WalkKernel",
    "layer_kernel",
    "step_kernel",
    "walk_distribution",
    "tv_distance",
    "mixing_time",
    "mixing_curve",
    "reflect_map",
    "simulate_line_walk",
    "verify_reflection",
    "verify_boson_rw",
    "verify_boson_rw_all",
    "meeting_tail_exact",
    "meeting_tail_curve",
    "meeting_time",
    "meeting_time_tail",
]

_STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True)
class WalkKernel:
    """Doubly stochastic step kernel P with its per-layer lazy factors."""

    n: int
    p: np.ndarray
    factors: tuple

    def __post_init__(self):
        rows = np.abs(self.p.sum(axis=1) - 1.0).max()
        cols = np.abs(self.p.sum(axis=0) - 1.0).max()
        if max(rows, cols) > _STOCHASTIC_TOL:
            raise ValueError(
                f"kernel is not doubly stochastic within {_STOCHASTIC_TOL:.0e} "
                f"(row defect {rows:.3e}, col defect {cols:.3e})")


def layer_kernel(pairing) -> np.ndarray:
    """Lazy factor S of one layer: S_xx = 1 on singletons; 1/2 on the four
    entries of every 2-block."""
    n = pairing.n
    s = np.zeros((n, n))
    singles = pairing.single_rows
    s[singles, singles] = 1.0
    ra, rb = pairing.pair_rows
    s[ra, ra] = 0.5
    s[ra, rb] = 0.5
    s[rb, ra] = 0.5
    s[rb, rb] = 0.5
    return s


def step_kernel(geometry: GeometrySpec) -> WalkKernel:
    """P = S^(pi_1) S^(pi_2) ... S^(pi_M) in layer order."""
    factors = tuple(layer_kernel(layer) for layer in geometry.layers)
    p = factors[0].copy()
    for f in factors[1:]:
        p = p @ f
    return WalkKernel(n=geometry.n, p=p, factors=factors)


def walk_distribution(kernel: WalkKernel, start: int, depth: int) -> np.ndarray:
    """Distribution of Z_depth started at the 1-based mode ``start``."""
    if not 1 <= start <= kernel.n:
        raise ValueError(f"start must be in 1..{kernel.n}, got {start}")
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    dist = np.zeros(kernel.n)
    dist[start - 1] = 1.0
    for _ in range(depth):
        dist = dist @ kernel.p
    total = dist.sum()
    if abs(total - 1.0) > 1e-10:
        raise RuntimeError(f"walk distribution drifted, sum={total!r}")
    return dist


def tv_distance(p, q) -> float:
    """Total variation distance (1/2) sum |p - q| between distributions."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    for name, v in (("p", p), ("q", q)):
        if abs(v.sum() - 1.0) > 1e-9:
            raise ValueError(f"{name} does not sum to 1 (sum={v.sum()!r})")
    return 0.5 * float(np.abs(p - q).sum())


def _max_tv_to_uniform(powmat: np.ndarray) -> float:
    n = powmat.shape[0]
    return 0.5 * float(np.abs(powmat - 1.0 / n).sum(axis=1).max())


def mixing_curve(geometry: GeometrySpec, t_max: int):
    """Yield (t, max over starts of TV(P^t(y, .), uniform)) for t = 1..t_max.

    Computed by exact kernel powers with row renormalization whenever the
    accumulated drift exceeds 1e-12.
    """
    kernel = step_kernel(geometry)
    a = kernel.p.copy()
    for t in range(1, t_max + 1):
        rows = a.sum(axis=1)
        if np.abs(rows - 1.0).max() > _STOCHASTIC_TOL:
            a /= rows[:, None]
        yield t, _max_tv_to_uniform(a)
        if t < t_max:
            a = a @ kernel.p


def mixing_time(geometry: GeometrySpec, epsilon: float, t_max: int):
    """Smallest t <= t_max with worst-start TV distance to uniform <= epsilon,
    or None when not reached."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0,1), got {epsilon}")
    if t_max < 1:
        raise ValueError(f"t_max must be >= 1, got {t_max}")
    for t, max_tv in mixing_curve(geometry, t_max):
        if max_tv <= epsilon:
            return t
    return None


# -- reflected line walk -----------------------------------------------------

def reflect_map(x: int, n: int) -> int:
    """Reflecting map Z -> {1..n}: residue r of x in 1..2n, then r if r <= n
    else 2n+1-r."""
    r = (int(x) - 1) % (2 * n) + 1
    return r if r <= n else 2 * n + 1 - r


def simulate_line_walk(start: int, depth: int, trials: int, gen: np.random.Generator) -> np.ndarray:
    """Positions S_depth of the parity-coupled line walk started at ``start``.

    One step from an odd site is uniform on {-1,0,1,2}; from an even site
    uniform on {-2,-1,0,1} (two brickwall layers fused into one step).
    """
    pos = np.full(trials, int(start), dtype=np.int64)
    for _ in range(depth):
        u = gen.integers(0, 4, size=trials)
        odd = (pos & 1) == 1
        pos += np.where(odd, u - 1, u - 2)
    return pos


@dataclass(frozen=True)
class ReflectionReport:
    n: int
    depth: int
    trials: int
    start: int
    tv_gap: float
    stat_bound: float

    @property
    def passes(self) -> bool:
        return self.tv_gap <= 5.0 * self.stat_bound


def verify_reflection(n: int, depth: int, trials: int, rng: RngStream,
                      start: int = 1) -> ReflectionReport:
    """Compare the reflected line walk R(S_d) against the exact brickwall
    kernel distribution at depth d.

    The statistical bound is (1/2) sum_x sqrt(q_x (1-q_x) / trials), the
    expected-magnitude scale of the empirical TV gap; the check passes when
    the observed gap is within 5x of it.
    """
    if n % 2 != 0:
        raise ValueError(f"n must be even, got {n}")
    gen = rng.generator()
    pos = simulate_line_walk(start, depth, trials, gen)
    r = (pos - 1) % (2 * n) + 1
    reflected = np.where(r <= n, r, 2 * n + 1 - r)
    hist = np.bincount(reflected - 1, minlength=n) / trials
    exact = walk_distribution(step_kernel(brickwall_geometry(n)), start, depth)
    gap = 0.5 * float(np.abs(hist - exact).sum())
    bound = 0.5 * float(np.sum(np.sqrt(exact * (1.0 - exact) / trials)))
    return ReflectionReport(n=n, depth=depth, trials=trials, start=start,
                            tv_gap=gap, stat_bound=bound)


# -- boson random walk identity ----------------------------------------------

@dataclass(frozen=True)
class WalkCheckReport:
    """Monte Carlo vs exact second-moment table for one geometry and depth."""

    geometry: GeometrySpec
    depth: int
    trials: int
    mc: np.ndarray
    stderr: np.ndarray
    exact: np.ndarray
    z: np.ndarray

    @property
    def max_abs_z(self) -> float:
        return float(np.abs(self.z).max())


def verify_boson_rw_all(geometry: GeometrySpec, depth: int, trials: int,
                        rng: RngStream) -> WalkCheckReport:
    """All-pairs check of E|U_{xy}|^2 = P_y[Z_d = x] from shared samples."""
    mc, stderr = second_moment_matrix(geometry, depth, trials, rng)
    kernel = step_kernel(geometry)
    exact = np.empty_like(mc)
    for y in range(1, geometry.n + 1):
        exact[:, y - 1] = walk_distribution(kernel, y, depth)
    diff = mc - exact
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(stderr > 0, diff / stderr, np.where(diff == 0.0, 0.0, np.inf))
    return WalkCheckReport(geometry=geometry, depth=depth, trials=trials,
                           mc=mc, stderr=stderr, exact=exact, z=z)


@dataclass(frozen=True)
class DeviationReport:
    mc: float
    stderr: float
    exact: float
    z: float


def verify_boson_rw(geometry: GeometrySpec, depth: int, x: int, y: int,
                    trials: int, rng: RngStream) -> DeviationReport:
    """Monte Carlo E|U_{xy}|^2 against the exact kernel power entry."""
    report = verify_boson_rw_all(geometry, depth, trials, rng)
    return DeviationReport(mc=float(report.mc[x - 1, y - 1]),
                           stderr=float(report.stderr[x - 1, y - 1]),
                           exact=float(report.exact[x - 1, y - 1]),
                           z=float(report.z[x - 1, y - 1]))


# -- pi-meeting times ---------------------------------------------------------

def _meeting_masks(geometry: GeometrySpec):
    """Per layer: (lazy factor S, survival mask M) with M_ab = 0 iff modes
    a and b sit in the same block of that layer."""
    out = []
    for layer in geometry.layers:
        s = layer_kernel(layer)
        bid = layer.block_id
        mask = (bid[:, None] != bid[None, :]).astype(np.float64)
        out.append((s, mask))
    return out


def _meeting_tail_iter(geometry: GeometrySpec, offset: int):
    """Yield (k, G_k) for layer counts k = offset+1, offset+1+M, ... where
    G_k[x-1, y-1] = P[T > k/M | walks start at (x, y)].

    Uses the backward survival recursion: the tail over layers 1..k equals
    Phi_1(Phi_2(...Phi_k(ones))) with Phi_i(G) = S_j (mask_j * G) S_j for
    j the layer applied at position i.  Because the layer sequence is
    periodic, G_{k+M} = Phi_1(...Phi_M(G_k)), so each further step applies
    the M layer maps once, last layer first, to a single n x n matrix that
    covers every start pair at once.
    """
    sm = _meeting_masks(geometry)
    m = len(sm)
    g = np.ones((geometry.n, geometry.n))
    for j in range(offset, -1, -1):
        s, mask = sm[j]
        g = s @ (mask * g) @ s
    k = offset + 1
    yield k, g
    while True:
        for j in range(m - 1, -1, -1):
            s, mask = sm[j]
            g = s @ (mask * g) @ s
        k += m
        yield k, g


def meeting_tail_curve(geometry: GeometrySpec, t_max_layers: int) -> np.ndarray:
    """Exact tails P[T > k/M] for every start pair and k = 1..t_max_layers.

    Returns an array of shape (t_max_layers, n, n); entry [k-1, x-1, y-1] is
    the probability that two independent walks started at (x, y) have not
    pi-met after k layer applications.
    """
    m = geometry.n_layers
    n = geometry.n
    out = np.empty((t_max_layers, n, n))
    for offset in range(min(m, t_max_layers)):
        for k, g in _meeting_tail_iter(geometry, offset):
            if k > t_max_layers:
                break
            out[k - 1] = g
    return out


def meeting_tail_exact(geometry: GeometrySpec, t) -> np.ndarray:
    """Exact P[T > t] for every start pair; t in units of steps (multiples
    of 1/M)."""
    m = geometry.n_layers
    k = int(round(t * m))
    if abs(k - t * m) > 1e-9:
        raise ValueError(f"t={t} is not a multiple of 1/M (M={m})")
    if k == 0:
        return np.ones((geometry.n, geometry.n))
    for kk, g in _meeting_tail_iter(geometry, (k - 1) % m):
        if kk == k:
            return g.copy()


def meeting_time(geometry: GeometrySpec, epsilon: float, t_max: int):
    """Smallest t in (1/M)N with max-over-starts exact tail <= epsilon, or
    None if not reached by t_max steps."""
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    m = geometry.n_layers
    limit = int(t_max) * m
    iters = [_meeting_tail_iter(geometry, r) for r in range(m)]
    for k in range(1, limit + 1):
        _, g = next(iters[(k - 1) % m])
        if g.max() <= epsilon:
            return k / m
    return None


@dataclass(frozen=True)
class MeetingTailEstimate:
    """Monte Carlo tail estimates at one fractional time, per start pair."""

    t: float
    trials: int
    starts: np.ndarray      # (p, 2) 1-based start pairs, x <= y
    tails: np.ndarray       # (p,)
    stderr: np.ndarray      # (p,)

    @property
    def max_tail(self) -> float:
        return float(self.tails.max())


def meeting_time_tail(geometry: GeometrySpec, t, trials: int,
                      rng: RngStream) -> MeetingTailEstimate:
    """Monte Carlo estimate of P[T > t] for every (unordered) start pair.

    Simulates independent pair walks at fractional 1/M resolution; a pair
    pi-meets the first time its two positions share a block of the layer
    just applied.  The walks are exchangeable, so only start pairs with
    x <= y are simulated.
    """
    m = geometry.n_layers
    k = int(round(t * m))
    if abs(k - t * m) > 1e-9 or k < 0:
        raise ValueError(f"t={t} must be a nonnegative multiple of 1/M (M={m})")
    n = geometry.n
    perms = [layer.permutation for layer in geometry.layers]
    bids = [layer.block_id for layer in geometry.layers]
    starts = np.array([(x, y) for x in range(1, n + 1) for y in range(x, n + 1)],
                      dtype=np.int64)
    gen = rng.generator()
    tails = np.empty(starts.shape[0])
    stderr = np.empty(starts.shape[0])
    for i, (sx, sy) in enumerate(starts):
        zx = np.full(trials, sx - 1, dtype=np.int64)
        zy = np.full(trials, sy - 1, dtype=np.int64)
        alive = np.ones(trials, dtype=bool)
        for layer_i in range(k):
            j = layer_i % m
            perm, bid = perms[j], bids[j]
            hop = gen.random((2, trials))
            zx = np.where(hop[0] < 0.5, zx, perm[zx])
            zy = np.where(hop[1] < 0.5, zy, perm[zy])
            alive &= bid[zx] != bid[zy]
            if not alive.any():
                break
        p = float(alive.mean())
        tails[i] = p
        stderr[i] = math.sqrt(p * (1.0 - p) / trials)
    return MeetingTailEstimate(t=k / m, trials=trials, starts=starts,
                               tails=tails, stderr=stderr)
