"""Sorted traces, stutter/mumble deductions, and finitely generated closed sets.

A trace is a non-empty sequence of store transitions delimited by sorts: the
start sort says whether the environment may run before the first transition,
the value sort whether it may run after the last.  Closed sets of traces are
represented by finite generator sets; the closure itself is countably
infinite and never materialised.  Membership in a closure is decided by a
small dynamic program, validated exhaustively against the brute-force
bounded closure.

Two deduction disciplines exist.  The ``sorted`` discipline inserts a
stutter at the very front only when the start sort cedes control, and at the
very back only when the value sort does.  The ``brookes`` discipline (traces
that cede on both ends, written here with cede sorts at both ends) permits
both unconditionally.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .kernel import CEDE, HOLD, Sort, SortMismatch
from .store import Store, StoreSpace, Transition

SORTED = "sorted"
BROOKES = "brookes"

DEFAULT_ORACLE_CAP = 1_000_000


class DisciplineMismatch(Exception):
    pass


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class Trace:
    """A sorted trace: start sort, non-empty transitions, sorted value."""

    start: Sort
    steps: tuple[Transition, ...]
    value_sort: Sort
    value: str

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("a trace needs at least one transition")
        if self.start not in (HOLD, CEDE) or self.value_sort not in (HOLD, CEDE):
            raise ValueError("trace sorts must be hold or cede")

    def render(self) -> str:
        body = " ".join(t.render() for t in self.steps)
        return f"{self.start.symbol} [ {body} ] {self.value_sort.symbol} {self.value}"

    def key(self) -> tuple:
        return (
            len(self.steps),
            self.start.order,
            tuple((t.pre.bits, t.post.bits) for t in self.steps),
            self.value_sort.order,
            self.value,
        )


def trace(start: Sort, steps: Iterable[tuple[Store, Store]], value_sort: Sort, value: str) -> Trace:
    return Trace(start, tuple(Transition(p, q) for p, q in steps), value_sort, value)


@dataclass(frozen=True)
class TraceSet:
    """A closed set of traces, given by finite generators.

    The set denoted is the deductive closure of the generators under the
    named discipline; operations treat the closure semantically and never
    expand it.  Under the sorted discipline all generators share the start
    sort recorded in ``sort``; brookes generators cede on both ends.
    """

    discipline: str
    sort: Sort
    generators: frozenset[Trace]

    def __post_init__(self) -> None:
        if self.discipline not in (SORTED, BROOKES):
            raise ValueError(f"unknown discipline {self.discipline!r}")
        for g in self.generators:
            if self.discipline == SORTED:
                if g.start is not self.sort:
                    raise ValueError(
                        f"generator starts at {g.start.value}, set is {self.sort.value}-sorted"
                    )
            else:
                if g.start is not CEDE or g.value_sort is not CEDE:
                    raise ValueError("brookes generators must cede on both ends")

    def is_empty(self) -> bool:
        return not self.generators

    def ordered(self) -> list[Trace]:
        return sorted(self.generators, key=Trace.key)


def sorted_set(sort: Sort, gens: Iterable[Trace]) -> TraceSet:
    return TraceSet(SORTED, sort, frozenset(gens))


def brookes_set(gens: Iterable[Trace]) -> TraceSet:
    return TraceSet(BROOKES, CEDE, frozenset(gens))


def _space_for(traces: Iterable[Trace]) -> StoreSpace:
    for t in traces:
        width = len(t.steps[0].pre.bits)
        return StoreSpace(tuple(f"l{i}" for i in range(width)))
    raise ValueError("cannot derive a store space from no traces")


# ---------------------------------------------------------------------------
# Deductions and the brute-force bounded closure (the oracle)


def step_deductions(t: Trace, discipline: str, space: StoreSpace) -> frozenset[Trace]:
    """All one-step stutter insertions and mumble fusions of ``t``."""
    front_ok = discipline == BROOKES or t.start is CEDE
    back_ok = discipline == BROOKES or t.value_sort is CEDE
    out: set[Trace] = set()
    n = len(t.steps)
    for pos in range(n + 1):
        if pos == 0 and not front_ok:
            continue
        if pos == n and not back_ok:
            continue
        for sigma in space.stores:
            steps = t.steps[:pos] + (Transition(sigma, sigma),) + t.steps[pos:]
            out.add(Trace(t.start, steps, t.value_sort, t.value))
    for i in range(n - 1):
        a, b = t.steps[i], t.steps[i + 1]
        if a.post == b.pre:
            steps = t.steps[:i] + (Transition(a.pre, b.post),) + t.steps[i + 2 :]
            out.add(Trace(t.start, steps, t.value_sort, t.value))
    return frozenset(out)


def closure_bounded(
    gens: Iterable[Trace],
    discipline: str,
    space: StoreSpace,
    max_len: int,
    *,
    slack: int = 2,
    cap: int | None = None,
) -> frozenset[Trace]:
    """Brute-force closure, truncated to traces of at most ``max_len`` steps.

    Saturation explores up to ``max_len + slack`` steps before filtering;
    normalising derivations (mumbles before stutters) shows slack zero
    already suffices, and the slack-invariance is itself tested.
    """
    gens = list(gens)
    if cap is None:
        cap = int(os.environ.get("BROOKES_ORACLE_CAP", DEFAULT_ORACLE_CAP))
    for g in gens:
        if len(g.steps) > max_len:
            raise ValueError("max_len must cover the longest generator")
    bound = max_len + slack
    seen: set[Trace] = set(gens)
    frontier = deque(gens)
    while frontier:
        t = frontier.popleft()
        for succ in step_deductions(t, discipline, space):
            if len(succ.steps) > bound or succ in seen:
                continue
            seen.add(succ)
            if len(seen) > cap:
                raise BudgetExceeded(f"bounded closure exceeded {cap} traces")
            frontier.append(succ)
    return frozenset(t for t in seen if len(t.steps) <= max_len)


# ---------------------------------------------------------------------------
# Closure membership without materialising the closure


def _gen_contains(g: Trace, t: Trace, lenient_ends: bool) -> bool:
    """Decide whether ``t`` is deducible from the single generator ``g``.

    ``t`` must assign every position either a fused block of consecutive
    chained generator steps (in order, jointly covering all of them) or an
    inserted stutter; end positions accept a stutter only where the sorts
    cede.  The reachable-prefix sets are kept as bitmasks over how many
    generator steps have been consumed.
    """
    if g.start is not t.start or g.value_sort is not t.value_sort or g.value != t.value:
        return False
    gs, ts = g.steps, t.steps
    m, n = len(gs), len(ts)
    front_ok = lenient_ends or t.start is CEDE
    back_ok = lenient_ends or t.value_sort is CEDE
    reach = 1
    for j in range(n):
        pre, post = ts[j]
        nxt = 0
        if pre == post and (j > 0 or front_ok) and (j < n - 1 or back_ok):
            nxt = reach
        for i in range(m):
            if not (reach >> i) & 1 or gs[i].pre != pre:
                continue
            k = i
            while True:
                if gs[k].post == post:
                    nxt |= 1 << (k + 1)
                if k + 1 >= m or gs[k].post != gs[k + 1].pre:
                    break
                k += 1
        reach = nxt
        if not reach:
            return False
    return bool((reach >> m) & 1)


def member(t: Trace, K: TraceSet) -> bool:
    """Is ``t`` in the closure of ``K``'s generators?

    Both deductions are unary, so the closure of a union is the union of the
    closures and membership is a disjunction over generators.
    """
    if K.discipline == BROOKES and (t.start is not CEDE or t.value_sort is not CEDE):
        raise DisciplineMismatch("brookes sets contain only cede-delimited traces")
    lenient = K.discipline == BROOKES
    return any(_gen_contains(g, t, lenient) for g in K.generators)


def _check_comparable(a: TraceSet, b: TraceSet) -> None:
    if a.discipline != b.discipline:
        raise DisciplineMismatch(f"{a.discipline} set compared against {b.discipline} set")
    if a.sort is not b.sort:
        raise SortMismatch(f"{a.sort.value}-sorted set compared against {b.sort.value}-sorted set")


def subset(a: TraceSet, b: TraceSet) -> bool:
    _check_comparable(a, b)
    return all(member(g, b) for g in a.generators)


def equal(a: TraceSet, b: TraceSet) -> bool:
    return subset(a, b) and subset(b, a)


def missing_witness(a: TraceSet, b: TraceSet) -> Trace | None:
    """The least generator of ``a`` (length first) outside the closure of ``b``."""
    _check_comparable(a, b)
    for g in a.ordered():
        if not member(g, b):
            return g
    return None


def canonicalize(K: TraceSet) -> TraceSet:
    """Drop generators deducible from the remaining ones.

    Scanning longest-first lets the shortest representative of mutually
    deducible generators survive, which fixes the canonical enumeration.
    """
    lenient = K.discipline == BROOKES
    buckets: dict[tuple, list[Trace]] = {}
    for g in K.generators:
        buckets.setdefault((g.start, g.value_sort, g.value), []).append(g)
    kept: list[Trace] = []
    for _, group in sorted(buckets.items(), key=lambda kv: kv[0][2]):
        group.sort(key=Trace.key, reverse=True)
        surviving: list[Trace] = []
        for idx, t in enumerate(group):
            rest = group[idx + 1 :] + surviving
            if not any(_gen_contains(g, t, lenient) for g in rest):
                surviving.append(t)
        kept.extend(surviving)
    return TraceSet(K.discipline, K.sort, frozenset(kept))


def prefix(sigma: Store, rho: Store, K: TraceSet) -> TraceSet:
    """Prepend a transition relying on ``sigma`` to every trace relying on ``rho``.

    Works on generators: the first transition of a hold-sorted trace keeps
    its source store under all sorted deductions, so rewriting the first
    transition of each matching generator computes the image of the closure.
    """
    if K.discipline != SORTED:
        raise DisciplineMismatch("prefixing applies to sorted sets")
    if K.sort is not HOLD:
        raise SortMismatch("prefixing applies to hold-sorted sets")
    gens = set()
    for g in K.generators:
        first = g.steps[0]
        if first.pre == rho:
            steps = (Transition(sigma, first.post),) + g.steps[1:]
            gens.add(Trace(HOLD, steps, g.value_sort, g.value))
    return TraceSet(SORTED, HOLD, frozenset(gens))
