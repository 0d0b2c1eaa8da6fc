"""d-left-regular bipartite graphs: random and code-based constructions.

A graph has p left vertices, n right vertices, and every left vertex has
exactly d distinct neighbors, stored as a strictly increasing index list.
The JSON interchange form is an object with integer fields ``p``, ``n``,
``d``, text field ``provenance`` and ``neighbors``, an array of p arrays of
d ascending integers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import CapacityError
from .fields import GF, find_irreducible, poly_eval, poly_from_indices, poly_mod_pow
from .rng import Stream

MAX_SIDE = 1 << 20


@dataclass(frozen=True)
class BipartiteGraph:
    p: int
    n: int
    d: int
    neighbors: tuple[tuple[int, ...], ...]
    provenance: str

    def __post_init__(self):
        if len(self.neighbors) != self.p:
            raise ValueError("neighbor table length differs from p")
        for i, nb in enumerate(self.neighbors):
            if len(nb) != self.d:
                raise ValueError(f"left vertex {i} has degree {len(nb)}, expected {self.d}")
            if any(not 0 <= j < self.n for j in nb):
                raise ValueError(f"left vertex {i} has a neighbor outside [0, {self.n})")
            if any(a >= b for a, b in zip(nb, nb[1:])):
                raise ValueError(f"neighbor list of left vertex {i} is not strictly increasing")


@dataclass(frozen=True)
class ExpanderParams:
    """Expansion order s, constant eps (default 1/8), and the tuning
    exponent alpha / universal constant theta0 of the asymptotic bounds."""

    s: int
    eps: float = 0.125
    alpha: float = 1.0
    theta0: float = 1.0

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.alpha <= 0 or self.theta0 <= 0:
            raise ValueError("alpha and theta0 must be positive")


def matching_graph(n: int) -> BipartiteGraph:
    """Perfect matching i <-> i (d = 1, p = n); its design matrix is the identity."""
    return BipartiteGraph(n, n, 1, tuple((i,) for i in range(n)), f"matching(n={n})")


def random_left_regular(p: int, d: int, n: int, seed: int) -> BipartiteGraph:
    """Each left vertex draws d right vertices uniformly without replacement.

    Draws are independent across left vertices and come from a single
    seeded stream, so identical (p, d, n, seed) give the identical graph.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got d={d}, n={n}")
    rng = Stream(seed)
    neighbors = tuple(tuple(rng.sample_without_replacement(n, d)) for _ in range(p))
    return BipartiteGraph(p, n, d, neighbors,
                          f"random(p={p},d={d},n={n},seed={seed})")


def suggest_random_params(p: int, s: int, c: float) -> tuple[int, int]:
    """Size hints d = ceil(c ln(p/s)), n = ceil(c s ln(p/s)) for the random
    construction. Requires p >= 2s so the log is bounded away from zero."""
    if p < 2 * s:
        raise ValueError(f"need p >= 2s, got p={p}, s={s}")
    if c <= 0:
        raise ValueError("c must be positive")
    lg = math.log(p / s)
    return math.ceil(c * lg), math.ceil(c * s * lg)


def suggest_pv_bounds(p: int, s: int, params: ExpanderParams) -> tuple[float, float]:
    """Asymptotic guarantees for the code-based construction, as stated:
    d <= ((theta0 log p log s)/eps)^(1+1/alpha) and
    n <= s^(1+alpha) ((theta0 log p log s)/eps)^(2+2/alpha).

    Informational only; concrete desk-scale instances must be certified by
    the verifier, never assumed to meet these bounds.
    """
    if not p > s >= 2:
        raise ValueError("need p > s >= 2")
    inner = params.theta0 * math.log(p) * math.log(s) / params.eps
    a = params.alpha
    return inner ** (1.0 + 1.0 / a), s ** (1.0 + a) * inner ** (2.0 + 2.0 / a)


def pv_expander(gf: GF, l: int, m: int, h: int,
                max_left: int = MAX_SIDE, max_right: int = MAX_SIDE) -> BipartiteGraph:
    """Deterministic graph from iterated polynomial powers over GF(q).

    Left vertices are the q**l polynomials f of degree < l over GF(q),
    enumerated by the base-q expansion of their coefficient indices (lowest
    degree least significant). Fix E, the deterministic monic irreducible
    polynomial of degree l over GF(q), and define f_i = f**(h**i) mod E.
    The neighbor of f for a field element y is the tuple
    (y, f_0(y), ..., f_{m-1}(y)) encoded in base q with y most significant,
    so d = q and n = q**(m+1). The first tuple coordinate is y, hence the d
    neighbors of a vertex are automatically distinct.
    """
    if l < 1 or m < 1:
        raise ValueError("need l >= 1 and m >= 1")
    if h < 2:
        raise ValueError("need h >= 2")
    q = gf.q
    p = q**l
    n = q**(m + 1)
    if p > max_left:
        raise CapacityError(f"left side q**l = {p} exceeds limit {max_left}")
    if n > max_right:
        raise CapacityError(f"right side q**(m+1) = {n} exceeds limit {max_right}")

    modulus = find_irreducible(gf, l, limit=max_left)
    exponents = [h**i for i in range(m)]
    ys = [(gf.element(i), i) for i in range(q)]

    neighbors = []
    for code in range(p):
        idxs = []
        c = code
        for _ in range(l):
            idxs.append(c % q)
            c //= q
        f = poly_from_indices(gf, idxs)
        powers = [poly_mod_pow(gf, f, e, modulus) for e in exponents]
        row = []
        for y, y_idx in ys:
            enc = y_idx
            for fi in powers:
                enc = enc * q + gf.index(poly_eval(gf, fi, y))
            row.append(enc)
        row.sort()
        if len(set(row)) != q:
            raise AssertionError("neighbor tuples collided despite distinct y coordinates")
        neighbors.append(tuple(row))
    return BipartiteGraph(p, n, q, tuple(neighbors),
                          f"pv(q={q},l={l},m={m},h={h})")


def neighbor_set(g: BipartiteGraph, left: set[int] | list[int] | tuple[int, ...]) -> set[int]:
    """Union of the neighbor lists of the given left vertices."""
    out: set[int] = set()
    for i in left:
        if not 0 <= i < g.p:
            raise ValueError(f"left index {i} outside [0, {g.p})")
        out.update(g.neighbors[i])
    return out


# ---------------------------------------------------------------------------
# interchange format
# ---------------------------------------------------------------------------

def graph_to_json_dict(g: BipartiteGraph) -> dict:
    return {
        "p": g.p,
        "n": g.n,
        "d": g.d,
        "provenance": g.provenance,
        "neighbors": [list(nb) for nb in g.neighbors],
    }


def graph_from_json_dict(obj: dict) -> BipartiteGraph:
    try:
        return BipartiteGraph(
            int(obj["p"]), int(obj["n"]), int(obj["d"]),
            tuple(tuple(int(j) for j in nb) for nb in obj["neighbors"]),
            str(obj["provenance"]),
        )
    except KeyError as exc:
        raise ValueError(f"graph object is missing field {exc}") from exc


def save_graph(g: BipartiteGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_json_dict(g), fh, indent=2)
        fh.write("\n")


def load_graph(path) -> BipartiteGraph:
    with open(path, encoding="utf-8") as fh:
        return graph_from_json_dict(json.load(fh))
