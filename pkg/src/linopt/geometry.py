"""Circuit geometries: ordered mode pairings, brickwall/brickwork builders,
and light-cone band predicates.

Modes are numbered 1..n in every public value and file format (internal
kernel plans use 0-based arrays).  A Pairing is a partition of {1..n} into
singletons (phase-shifter sites) and pairs (beamsplitter couplings); one
pairing is one gate layer, and a GeometrySpec is the ordered list of layers
making up a single circuit step.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "GeometryError",
    "Pairing",
    "GeometrySpec",
    "brickwall_geometry",
    "brickwork_d_geometry",
    "custom_geometry",
    "octahedral_geometry",
    "lightcone_band",
    "geometry_from_json",
    "geometry_to_json",
]

BRICKWALL_1D = "brickwall1d"
BRICKWORK_D = "brickworkD"
CUSTOM = "custom"


class GeometryError(ValueError):
    """Invalid pairing or geometry description."""


@dataclass(frozen=True)
class Pairing:
    """A partition of {1..n} into blocks of size 1 or 2 (an involution)."""

    n: int
    blocks: tuple

    def __post_init__(self):
        if self.n < 1:
            raise GeometryError(f"mode count must be >= 1, got {self.n}")
        seen = set()
        norm = []
        for block in self.blocks:
            block = tuple(sorted(int(b) for b in block))
            if len(block) not in (1, 2) or len(set(block)) != len(block):
                raise GeometryError(f"block {block} is not a 1- or 2-element set")
            for mode in block:
                if not 1 <= mode <= self.n:
                    raise GeometryError(f"mode {mode} out of range 1..{self.n}")
                if mode in seen:
                    raise GeometryError(f"mode {mode} appears in more than one block")
                seen.add(mode)
            norm.append(block)
        if len(seen) != self.n:
            missing = sorted(set(range(1, self.n + 1)) - seen)
            raise GeometryError(f"modes {missing} are not covered by any block")
        object.__setattr__(self, "blocks", tuple(norm))

    @cached_property
    def permutation(self) -> np.ndarray:
        """0-based induced involution: perm[x] = partner of x (itself if singleton)."""
        perm = np.arange(self.n, dtype=np.int64)
        for block in self.blocks:
            if len(block) == 2:
                a, b = block[0] - 1, block[1] - 1
                perm[a], perm[b] = b, a
        return perm

    @cached_property
    def block_id(self) -> np.ndarray:
        """0-based map from mode index to the index of its block."""
        bid = np.empty(self.n, dtype=np.int64)
        for i, block in enumerate(self.blocks):
            for mode in block:
                bid[mode - 1] = i
        return bid

    @cached_property
    def pair_rows(self):
        """(rows_a, rows_b) 0-based arrays over the 2-blocks, in block order."""
        pa = [b[0] - 1 for b in self.blocks if len(b) == 2]
        pb = [b[1] - 1 for b in self.blocks if len(b) == 2]
        return np.asarray(pa, dtype=np.int64), np.asarray(pb, dtype=np.int64)

    @cached_property
    def single_rows(self) -> np.ndarray:
        """0-based array of singleton modes, in block order."""
        return np.asarray([b[0] - 1 for b in self.blocks if len(b) == 1], dtype=np.int64)


@dataclass(frozen=True)
class GeometrySpec:
    """Ordered pairing layers defining one circuit step (M = len(layers))."""

    n: int
    layers: tuple
    label: str = CUSTOM
    # brickworkD metadata (side length, dimension, layer-slot order)
    brickwork: tuple = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.layers) < 1:
            raise GeometryError("a geometry needs at least one layer")
        for layer in self.layers:
            if layer.n != self.n:
                raise GeometryError(
                    f"layer mode count {layer.n} does not match geometry n={self.n}")

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @cached_property
    def plan(self):
        """Flattened 0-based kernel plan for one step.

        Returns (pair_a, pair_b, pair_off, single_idx, single_off) with pairs
        and singles concatenated in layer order; layer j occupies
        pair_a[pair_off[j]:pair_off[j+1]] etc.
        """
        pair_a, pair_b, singles = [], [], []
        pair_off = [0]
        single_off = [0]
        for layer in self.layers:
            ra, rb = layer.pair_rows
            pair_a.append(ra)
            pair_b.append(rb)
            singles.append(layer.single_rows)
            pair_off.append(pair_off[-1] + ra.shape[0])
            single_off.append(single_off[-1] + layer.single_rows.shape[0])
        cat = lambda parts: (np.concatenate(parts) if parts else np.empty(0, dtype=np.int64))
        return (
            cat(pair_a),
            cat(pair_b),
            np.asarray(pair_off, dtype=np.int64),
            cat(singles),
            np.asarray(single_off, dtype=np.int64),
        )

    @property
    def pairs_per_step(self) -> int:
        return sum(len(layer.pair_rows[0]) for layer in self.layers)

    @property
    def singles_per_step(self) -> int:
        return sum(len(layer.single_rows) for layer in self.layers)


def _brickwall_layers(n: int):
    left = Pairing(n, tuple((i, i + 1) for i in range(1, n, 2)))
    right_blocks = [(1,)] + [(i, i + 1) for i in range(2, n - 1, 2)] + [(n,)]
    right = Pairing(n, tuple(right_blocks))
    return left, right


def brickwall_geometry(n: int) -> GeometrySpec:
    """1D brickwall step: layer {1,2}{3,4}... then layer {1}{2,3}...{n}."""
    if n < 2 or n % 2 != 0:
        raise GeometryError(f"brickwall geometry needs even n >= 2, got {n}")
    left, right = _brickwall_layers(n)
    return GeometrySpec(n=n, layers=(left, right), label=BRICKWALL_1D)


def brickwork_d_geometry(m: int, dim: int, order=None) -> GeometrySpec:
    """D-dimensional brickwork step on n = m^D modes.

    Modes are tuples in {1..m}^D flattened row-major with axis 1 slowest.
    The step has 2*D layers: an L and an R brickwall layer along each axis.
    ``order`` permutes the layer slots; slot 2j is L along axis j+1 and slot
    2j+1 is R along axis j+1 (0-based slots).  The default order is
    L1, R1, L2, R2, ..., LD, RD.
    """
    if m < 2 or m % 2 != 0:
        raise GeometryError(f"brickwork geometry needs even m >= 2, got {m}")
    if dim < 1:
        raise GeometryError(f"dimension must be >= 1, got {dim}")
    n = m**dim

    def flatten(coords):
        # coords are 1-based; axis 1 is the slowest
        idx = 0
        for c in coords:
            idx = idx * m + (c - 1)
        return idx + 1

    def axis_layer(axis, left):
        blocks = []
        shape = [m] * (dim - 1)
        for rest in np.ndindex(*shape) if dim > 1 else [()]:
            rest = tuple(int(r) + 1 for r in rest)
            pre, post = rest[:axis], rest[axis:]
            if left:
                for lo in range(1, m, 2):
                    blocks.append((flatten(pre + (lo,) + post), flatten(pre + (lo + 1,) + post)))
            else:
                blocks.append((flatten(pre + (1,) + post),))
                for lo in range(2, m - 1, 2):
                    blocks.append((flatten(pre + (lo,) + post), flatten(pre + (lo + 1,) + post)))
                blocks.append((flatten(pre + (m,) + post),))
        return Pairing(n, tuple(blocks))

    slots = []
    for axis in range(dim):
        slots.append(axis_layer(axis, left=True))
        slots.append(axis_layer(axis, left=False))
    if order is None:
        order = list(range(2 * dim))
    order = [int(o) for o in order]
    if sorted(order) != list(range(2 * dim)):
        raise GeometryError(
            f"order must be a permutation of 0..{2 * dim - 1}, got {order}")
    layers = tuple(slots[o] for o in order)
    return GeometrySpec(n=n, layers=layers, label=BRICKWORK_D,
                        brickwork=(m, dim, tuple(order)))


def custom_geometry(n: int, layers) -> GeometrySpec:
    """Validated geometry from explicit layers (each a Pairing or block list)."""
    built = []
    for layer in layers:
        if isinstance(layer, Pairing):
            if layer.n != n:
                raise GeometryError(
                    f"layer mode count {layer.n} does not match n={n}")
            built.append(layer)
        else:
            built.append(Pairing(n, tuple(tuple(b) for b in layer)))
    return GeometrySpec(n=n, layers=tuple(built), label=CUSTOM)


def octahedral_geometry() -> GeometrySpec:
    """6-mode, 4-layer step whose coupling graph is the octahedron."""
    return custom_geometry(6, [
        [(1, 2), (3, 5), (4, 6)],
        [(1, 4), (2, 5), (3, 6)],
        [(2, 3), (4, 5), (1, 6)],
        [(1, 3), (2, 4), (5, 6)],
    ])


def lightcone_band(geometry: GeometrySpec, depth: int) -> int:
    """Guaranteed half-band-width 2d of a depth-d brickwall circuit matrix.

    U_{xy} = 0 exactly whenever |x - y| > 2d (and (UU^T)_{xy} = 0 beyond 4d).
    """
    if geometry.label != BRICKWALL_1D:
        raise GeometryError(
            f"light-cone band is only defined for {BRICKWALL_1D} geometries, "
            f"got {geometry.label!r}")
    if depth < 0:
        raise GeometryError(f"depth must be >= 0, got {depth}")
    return 2 * depth


def geometry_from_json(obj) -> GeometrySpec:
    """Build a GeometrySpec from its config-file JSON object.

    Kinds: {"kind": "brickwall", "n": 8}, {"kind": "brickworkD", "m": 4,
    "D": 2, "order": [0,1,2,3]?}, {"kind": "octahedral"}, or
    {"kind": "custom", "n": 6, "layers": [[[1,2],[3]], ...]} with 1-based
    modes.
    """
    if not isinstance(obj, dict) or "kind" not in obj:
        raise GeometryError("geometry must be a JSON object with a 'kind' field")
    kind = obj["kind"]
    if kind == "brickwall":
        return brickwall_geometry(int(obj["n"]))
    if kind == "brickworkD":
        return brickwork_d_geometry(int(obj["m"]), int(obj["D"]), obj.get("order"))
    if kind == "octahedral":
        return octahedral_geometry()
    if kind == "custom":
        return custom_geometry(int(obj["n"]), obj["layers"])
    raise GeometryError(f"unknown geometry kind {kind!r}")


def geometry_to_json(geometry: GeometrySpec) -> dict:
    """Inverse of geometry_from_json (custom form keeps explicit layers)."""
    if geometry.label == BRICKWALL_1D:
        return {"kind": "brickwall", "n": geometry.n}
    if geometry.label == BRICKWORK_D and geometry.brickwork is not None:
        m, dim, order = geometry.brickwork
        return {"kind": "brickworkD", "m": m, "D": dim, "order": list(order)}
    return {
        "kind": "custom",
        "n": geometry.n,
        "layers": [[list(b) for b in layer.blocks] for layer in geometry.layers],
    }
