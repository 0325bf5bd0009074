"""Exact null spaces of matrices over Q(i)(parameters).

Rows are cleared of denominators and reduced by fraction-free (Bareiss)
elimination, dividing each update exactly by the previous pivot.  Pivots are
chosen by lowest total degree, then lowest column index, then lowest row.

Large sparse systems go through a modular pre-pass first: the matrix is
specialised at random parameter values modulo a prime to find which columns
can be nonzero in a null vector and which rows are independent.  The exact
solve then runs on that sub-block, and the result is certified against every
original row; if the certificate fails the full system is solved instead.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Sequence

from flint import nmod_mat

from .arith import MultiPoly, RatFunc, Scalar

log = logging.getLogger(__name__)

# prime = 1 mod 4 so that i has a square root
PRIME = 4611686018427388073
SQRT_M1 = 2483215548549169243

_SPATIAL = {"x", "z", "w", "y"}


@dataclass(frozen=True)
class LinearSystem:
    """``rows`` is a list of equal-length rows; ``labels`` names the unknowns."""

    rows: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        rows = tuple(tuple(RatFunc.coerce(e) for e in row) for row in self.rows)
        labels = tuple(self.labels) or tuple(range(len(rows[0]) if rows else 0))
        for row in rows:
            if len(row) != len(labels):
                raise ValueError("row length does not match the number of unknowns")
            for e in row:
                bad = _SPATIAL.intersection(e.variables())
                if bad:
                    raise ValueError(f"matrix entry depends on {sorted(bad)}; only parameters are allowed")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)

    @property
    def ncols(self) -> int:
        return len(self.labels)

    @classmethod
    def from_sparse(cls, rows: Sequence[dict], labels: Sequence) -> "LinearSystem":
        """Rows given as ``{column index: entry}``."""
        n = len(labels)
        dense = []
        for r in rows:
            full = [RatFunc(0)] * n
            for c, v in r.items():
                full[c] = RatFunc.coerce(v)
            dense.append(full)
        return cls(tuple(dense), tuple(labels))


# --- polynomial rows -----------------------------------------------------

def _lcm(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a.is_constant():
        return b
    if b.is_constant():
        return a
    return a.exquo(a.gcd(b)) * b


def _clear_row(row) -> dict:
    """Scale a row by the lcm of its denominators; return ``{col: MultiPoly}``."""
    items = row.items() if isinstance(row, dict) else enumerate(row)
    items = [(c, RatFunc.coerce(e)) for c, e in items]
    items = [(c, e) for c, e in items if not e.is_zero()]
    den = MultiPoly.constant(1)
    for _, e in items:
        den = _lcm(den, e.den)
    return {c: e.num * den.exquo(e.den) for c, e in items}


def _poly_rows(rows) -> list[dict]:
    out = []
    for row in rows:
        if isinstance(row, dict) and all(isinstance(v, MultiPoly) for v in row.values()):
            r = {c: v for c, v in row.items() if not v.is_zero()}
        else:
            r = _clear_row(row)
        if r:
            out.append(r)
    return out


# --- Bareiss ---------------------------------------------------------------

def _bareiss(rows: list[dict]):
    """Fraction-free elimination; returns the pivot rows as ``(row, col)`` pairs."""
    rows = [dict(r) for r in rows]
    active = list(range(len(rows)))
    prev = MultiPoly.constant(1)
    pivots = []
    while active:
        best = None
        for i in active:
            for c, v in rows[i].items():
                key = (v.total_degree(), c, i)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, pc, pi = best
        prow = rows[pi]
        p = prow[pc]
        active.remove(pi)
        pivots.append((prow, pc))
        for i in active:
            row = rows[i]
            a = row.get(pc)
            new = {}
            if a is None:
                for c, v in row.items():
                    q = (v * p).exquo(prev) if not prev.is_constant() else v * p * (Scalar(1) / prev.constant_value())
                    new[c] = q
            else:
                for c in set(row) | set(prow):
                    if c == pc:
                        continue
                    v = row.get(c)
                    w = prow.get(c)
                    if v is None:
                        num = -(a * w)
                    elif w is None:
                        num = v * p
                    else:
                        num = v * p - a * w
                    if num.is_zero():
                        continue
                    new[c] = num.exquo(prev) if not prev.is_constant() else num * (Scalar(1) / prev.constant_value())
            rows[i] = new
        active = [i for i in active if rows[i]]
        prev = p
    return pivots


def _primitive(vec: dict, anchor: int) -> dict:
    g = None
    for v in vec.values():
        g = v if g is None else g.gcd(v)
        if g.is_constant():
            break
    if g is not None and not g.is_constant():
        vec = {c: v.exquo(g) for c, v in vec.items()}
    lc = vec[anchor].leading_coefficient()
    if lc != 1:
        inv = Scalar(1) / lc
        vec = {c: v * inv for c, v in vec.items()}
    return vec


def _back_substitute(pivots, ncols: int) -> list[dict]:
    pivot_cols = {pc for _, pc in pivots}
    basis = []
    for f in range(ncols):
        if f in pivot_cols:
            continue
        x = {f: MultiPoly.constant(1)}
        for row, pc in reversed(pivots):
            s = None
            for c, v in row.items():
                if c != pc and c in x:
                    term = v * x[c]
                    s = term if s is None else s + term
            if s is None or s.is_zero():
                continue
            pk = row[pc]
            g = s.gcd(pk)
            mult = pk.exquo(g)
            if not mult.is_constant() or mult.constant_value() != 1:
                x = {c: v * mult for c, v in x.items()}
            x[pc] = -s.exquo(g)
        basis.append(_primitive(x, f))
    return basis


def _exact_nullspace(rows: list[dict], ncols: int) -> list[dict]:
    return _back_substitute(_bareiss(rows), ncols)


# --- modular pre-pass ------------------------------------------------------

def _mod_value(p: MultiPoly, point: dict) -> int:
    def part(f):
        if f.is_zero():
            return 0
        q = f(*[point[n] for n in f.context().names()]) if f.context().nvars() else f.coeffs()[0]
        return int(q.p) * pow(int(q.q), -1, PRIME) % PRIME

    v = part(p.re)
    if p.im is not None:
        v = (v + SQRT_M1 * part(p.im)) % PRIME
    return v


def _rref_pivots_of(red: nmod_mat, rank: int) -> list[int]:
    out = []
    for i in range(rank):
        for j in range(red.ncols()):
            if int(red[i, j]) != 0:
                out.append(j)
                break
    return out


def _rref_pivots(m: nmod_mat) -> list[int]:
    return _rref_pivots_of(*m.rref())


def _modular_plan(rows: list[dict], ncols: int, seed: int):
    """Columns that may be nonzero in a null vector, independent rows, and the nullity mod p."""
    names = set()
    for r in rows:
        for v in r.values():
            names.update(v.names)
    rng = random.Random(seed)
    point = {n: rng.randrange(2, 10**9) for n in names}
    entries = []
    for r in rows:
        line = [0] * ncols
        for c, v in r.items():
            line[c] = _mod_value(v, point)
        entries.append(line)
    m = nmod_mat(len(rows), ncols, [e for line in entries for e in line], PRIME)
    red, rank = m.rref()
    nullity = ncols - rank
    piv = _rref_pivots_of(red, rank)
    free = [c for c in range(ncols) if c not in set(piv)]
    live = set(free)
    for i, pc in enumerate(piv):
        if any(int(red[i, f]) != 0 for f in free):
            live.add(pc)
    keep = sorted(live)
    if not keep:
        return keep, [], nullity
    sub = nmod_mat(len(keep), len(rows),
                   [entries[r][c] for c in keep for r in range(len(rows))], PRIME)
    row_sel = _rref_pivots(sub)
    return keep, row_sel, nullity


def _satisfies(rows: list[dict], vec: dict) -> bool:
    for r in rows:
        acc = None
        for c, v in r.items():
            if c in vec:
                t = v * vec[c]
                acc = t if acc is None else acc + t
        if acc is not None and not acc.is_zero():
            return False
    return True


def nullspace_rows(rows: Sequence, ncols: int, *, modular: bool | None = None, seed: int = 0) -> list[dict]:
    """Null space of polynomial/rational rows as sparse ``{col: MultiPoly}`` vectors."""
    prows = _poly_rows(rows)
    if not prows:
        return [{c: MultiPoly.constant(1)} for c in range(ncols)]
    if modular is None:
        modular = ncols > 24 or len(prows) > 48
    if modular:
        keep, row_sel, nullity = _modular_plan(prows, ncols, seed)
        if not keep:
            log.debug("modular pre-pass: null space is trivial")
            cand = []
        else:
            index = {c: k for k, c in enumerate(keep)}
            sub = [{index[c]: v for c, v in prows[i].items() if c in index} for i in row_sel]
            cand = [{keep[c]: v for c, v in vec.items()} for vec in _exact_nullspace(sub, len(keep))]
        if len(cand) == nullity and all(_satisfies(prows, v) for v in cand):
            return cand
        log.info("modular pre-pass not certified (%d vs %d); solving the full system", len(cand), nullity)
    return _exact_nullspace(prows, ncols)


def solve_nullspace(system: LinearSystem, *, modular: bool | None = None) -> list[tuple]:
    """Basis of the null space as tuples of RatFunc (polynomial, primitive)."""
    n = system.ncols
    vecs = nullspace_rows(system.rows, n, modular=modular)
    zero = RatFunc(0)
    return [tuple(RatFunc(v[c]) if c in v else zero for c in range(n)) for v in vecs]


def rank(system: LinearSystem) -> int:
    return system.ncols - len(solve_nullspace(system))


# --- identities -> rows ------------------------------------------------------

def split_monomials(p: MultiPoly, variables: Sequence[str]) -> dict:
    """Group ``p`` by monomials in ``variables``; values are polynomials in the rest."""
    names = p.names
    idx = [names.index(v) if v in names else None for v in variables]
    buckets: dict = {}
    for e, c in p.terms().items():
        key = tuple(e[i] if i is not None else 0 for i in idx)
        rest = tuple(0 if i in idx else k for i, k in enumerate(e))
        buckets.setdefault(key, {})[rest] = c
    return {k: MultiPoly.from_terms(t, names) for k, t in buckets.items()}


def coefficient_rows(columns: Sequence[dict], variables: Sequence[str]) -> list[dict]:
    """Rows of ``sum_c u_c * columns[c][key] == 0`` for every key, as identities in ``variables``.

    Each column maps a key to a RatFunc that may involve ``variables``; the
    identity for a key is cleared of denominators and split by monomials.
    """
    by_key: dict = {}
    for c, col in enumerate(columns):
        for key, f in col.items():
            f = RatFunc.coerce(f)
            if not f.is_zero():
                by_key.setdefault(key, {})[c] = f
    rows = []
    for key in sorted(by_key, key=repr):
        entries = by_key[key]
        den = MultiPoly.constant(1)
        for f in entries.values():
            den = _lcm(den, f.den)
        per_mono: dict = {}
        for c, f in entries.items():
            num = f.num * den.exquo(f.den)
            for mono, coeff in split_monomials(num, variables).items():
                per_mono.setdefault(mono, {})[c] = coeff
        for mono in sorted(per_mono):
            row = {c: v for c, v in per_mono[mono].items() if not v.is_zero()}
            if row:
                rows.append(row)
    return rows
