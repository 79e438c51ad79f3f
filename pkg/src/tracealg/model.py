"""Free models over closed trace sets, and the state-function model.

``TraceAlgebra`` interprets the two-sorted shared-state signature (and the
two-sorted transition signature) on finitely generated closed trace sets;
``BrookesAlgebra`` interprets the single-sorted transition signature on
cede-delimited traces; ``GTableAlgebra`` interprets nondeterministic global
state as store functions.  All operations work on generators and are exact
for the denoted closures, a fact the oracle tests pin down.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .kernel import (
    CEDE,
    HOLD,
    Algebra,
    MissingBinding,
    Operator,
    Signature,
    Sort,
    SortMismatch,
    Term,
    Var,
    app,
    join as join_term,
)
from .store import Store, StoreSpace, Transition
from .theories import build, cell_assert_term, open_transition_term
from .traces import (
    BROOKES,
    SORTED,
    DisciplineMismatch,
    Trace,
    TraceSet,
    brookes_set,
    canonicalize,
    closure_bounded,
    member,
    sorted_set,
    _space_for,
)


def unit(space: StoreSpace, sort: Sort, value: str) -> TraceSet:
    """The single-stutter traces; this set is already closed."""
    gens = (
        Trace(sort, (Transition(s, s),), sort, value) for s in space.stores
    )
    return sorted_set(sort, gens)


class TraceAlgebra(Algebra):
    """Closed trace sets as a model of the two-sorted signatures.

    Acquire relabels generators to the ceding start sort (front stutters are
    then recovered by closure); release emits each generator both bare and
    behind every possible stutter, since a held start blocks front
    stuttering.  Acquire canonicalizes large results: the stutter-prefixed
    generators release produced collapse once the start sort cedes again,
    which keeps nested delimiter chains from compounding.
    """

    def __init__(
        self,
        space: StoreSpace,
        signature: Signature | None = None,
        canonical_threshold: int = 8,
    ):
        self.space = space
        self.signature = signature or build("S", space).signature
        self.canonical_threshold = canonical_threshold

    def apply(self, op: Operator, args: tuple) -> TraceSet:
        if op.kind == "join":
            return self.join(op.result, args)
        if op.kind == "update":
            return self.update(*op.params, args[0])
        if op.kind == "lookup":
            return self.lookup(*op.params, args[0], args[1])
        if op.kind == "acquire":
            return self.acquire(args[0])
        if op.kind == "release":
            return self.release(args[0])
        if op.kind == "transition":
            return self.transition(*op.params, args[0])
        raise NotImplementedError(f"no trace interpretation for {op.name}")

    def join(self, sort: Sort, args: Sequence[TraceSet]) -> TraceSet:
        gens: set[Trace] = set()
        for k in args:
            if k.sort is not sort:
                raise SortMismatch("joined sets must share their sort")
            gens |= k.generators
        return sorted_set(sort, gens)

    def update(self, loc: int, bit: int, K: TraceSet) -> TraceSet:
        """Union over input stores of prefixing with the store update."""
        self._expect(K, HOLD)
        gens = set()
        for g in K.generators:
            first = g.steps[0]
            if first.pre.get(loc) != bit:
                continue
            for source in (first.pre, first.pre.set(loc, 1 - bit)):
                steps = (Transition(source, first.post),) + g.steps[1:]
                gens.add(Trace(HOLD, steps, g.value_sort, g.value))
        return sorted_set(HOLD, gens)

    def lookup(self, loc: int, K0: TraceSet, K1: TraceSet) -> TraceSet:
        """Branch on the bit at ``loc`` without changing the store."""
        self._expect(K0, HOLD)
        self._expect(K1, HOLD)
        branches = (K0, K1)
        gens = set()
        for sigma in self.space.stores:
            for g in branches[sigma.get(loc)].generators:
                if g.steps[0].pre == sigma:
                    gens.add(g)
        return sorted_set(HOLD, gens)

    def acquire(self, K: TraceSet) -> TraceSet:
        self._expect(K, HOLD)
        gens = frozenset(
            Trace(CEDE, g.steps, g.value_sort, g.value) for g in K.generators
        )
        out = TraceSet(SORTED, CEDE, gens)
        if len(gens) > self.canonical_threshold:
            out = canonicalize(out)
        return out

    def release(self, K: TraceSet) -> TraceSet:
        self._expect(K, CEDE)
        gens = set()
        for g in K.generators:
            gens.add(Trace(HOLD, g.steps, g.value_sort, g.value))
            for sigma in self.space.stores:
                steps = (Transition(sigma, sigma),) + g.steps
                gens.add(Trace(HOLD, steps, g.value_sort, g.value))
        return sorted_set(HOLD, gens)

    def transition(self, pre: Store, post: Store, K: TraceSet) -> TraceSet:
        """Assert the store is ``pre`` and move it to ``post``; used by the
        two-sorted transition signature, and agrees with translating the
        transition into assert/update blocks."""
        self._expect(K, HOLD)
        gens = set()
        for g in K.generators:
            if g.steps[0].pre == post:
                steps = (Transition(pre, g.steps[0].post),) + g.steps[1:]
                gens.add(Trace(HOLD, steps, g.value_sort, g.value))
        return sorted_set(HOLD, gens)

    def unit(self, sort: Sort, value: str) -> TraceSet:
        return unit(self.space, sort, value)

    def kleisli(self, env: Mapping[str, TraceSet], K: TraceSet) -> TraceSet:
        return kleisli(env, K)

    @staticmethod
    def _expect(K: TraceSet, sort: Sort) -> None:
        if K.discipline != SORTED:
            raise DisciplineMismatch("sorted operations need sorted sets")
        if K.sort is not sort:
            raise SortMismatch(f"expected a {sort.value}-sorted set, got {K.sort.value}")


def kleisli(env: Mapping[str, TraceSet], K: TraceSet) -> TraceSet:
    """Substitute continuations for values, generator by generator.

    A ceding value splices the continuation's transitions after the prefix;
    a held value must chain, fusing the boundary transitions around the
    shared intermediate store.  Both parts follow from the ends-invariance
    of closed sets, so generator pairs suffice.
    """
    if K.discipline != SORTED:
        raise DisciplineMismatch("the sorted extension needs a sorted set")
    gens = set()
    for g in K.generators:
        if g.value not in env:
            raise MissingBinding(f"no continuation for value {g.value!r}")
        cont = env[g.value]
        if cont.discipline != SORTED:
            raise DisciplineMismatch("continuations must be sorted sets")
        if cont.sort is not g.value_sort:
            raise SortMismatch(
                f"continuation for {g.value!r} is {cont.sort.value}-sorted, "
                f"value needs {g.value_sort.value}"
            )
        if g.value_sort is CEDE:
            for h in cont.generators:
                gens.add(Trace(g.start, g.steps + h.steps, h.value_sort, h.value))
        else:
            last = g.steps[-1]
            for h in cont.generators:
                first = h.steps[0]
                if last.post != first.pre:
                    continue
                steps = g.steps[:-1] + (Transition(last.pre, first.post),) + h.steps[1:]
                gens.add(Trace(g.start, steps, h.value_sort, h.value))
    return sorted_set(K.sort, gens)


# ---------------------------------------------------------------------------
# Reification: closed sets back to terms


def cell_assert(space: StoreSpace, loc: int, bit: int, body: Term) -> Term:
    sig = build("S", space).signature
    return cell_assert_term(sig, space, loc, bit, body)


def open_transition(space: StoreSpace, pre: Store, post: Store, body: Term) -> Term:
    sig = build("S", space).signature
    return open_transition_term(sig, space, pre, post, body)


def reify_trace(space: StoreSpace, t: Trace) -> Term:
    """The term denoting exactly the closure of the one-trace set."""
    sig = build("S", space).signature
    core: Term = Var(t.value, t.value_sort)
    acc: Term | None = None
    for step in reversed(t.steps):
        if acc is None:
            body = app(sig, "rel", core) if t.value_sort is CEDE else core
        else:
            body = app(sig, "rel", app(sig, "acq", acc))
        acc = open_transition_term(sig, space, step.pre, step.post, body)
    assert acc is not None
    if t.start is CEDE:
        acc = app(sig, "acq", acc)
    return acc


def reify(space: StoreSpace, K: TraceSet) -> Term:
    """Join the reified generators in canonical order."""
    if K.discipline != SORTED:
        raise DisciplineMismatch("reification applies to sorted sets")
    sig = build("S", space).signature
    return join_term(sig, K.sort, tuple(reify_trace(space, g) for g in K.ordered()))


# ---------------------------------------------------------------------------
# Brookes-style sets: all ends ceded


class BrookesAlgebra(Algebra):
    """Cede-delimited trace sets as a model of the transition signature."""

    def __init__(self, space: StoreSpace, signature: Signature | None = None):
        self.space = space
        self.signature = signature or build("B", space).signature

    def apply(self, op: Operator, args: tuple) -> TraceSet:
        if op.kind == "join":
            return self.join(args)
        if op.kind == "transition":
            return self.transition(*op.params, args[0])
        raise NotImplementedError(f"no brookes interpretation for {op.name}")

    def join(self, args: Sequence[TraceSet]) -> TraceSet:
        gens: set[Trace] = set()
        for k in args:
            self._expect(k)
            gens |= k.generators
        return brookes_set(gens)

    def transition(self, pre: Store, post: Store, K: TraceSet) -> TraceSet:
        self._expect(K)
        return brookes_set(
            Trace(CEDE, (Transition(pre, post),) + g.steps, CEDE, g.value)
            for g in K.generators
        )

    def unit(self, value: str) -> TraceSet:
        return brookes_set(
            Trace(CEDE, (Transition(s, s),), CEDE, value) for s in self.space.stores
        )

    def read(self, loc: int, K0: TraceSet, K1: TraceSet) -> TraceSet:
        """Branch on a location: a stutter records the store that was read."""
        self._expect(K0)
        self._expect(K1)
        branches = (K0, K1)
        gens = set()
        for sigma in self.space.stores:
            for g in branches[sigma.get(loc)].generators:
                gens.add(Trace(CEDE, (Transition(sigma, sigma),) + g.steps, CEDE, g.value))
        return brookes_set(gens)

    def write(self, loc: int, bit: int, K: TraceSet) -> TraceSet:
        self._expect(K)
        gens = set()
        for sigma in self.space.stores:
            step = Transition(sigma, sigma.set(loc, bit))
            for g in K.generators:
                gens.add(Trace(CEDE, (step,) + g.steps, CEDE, g.value))
        return brookes_set(gens)

    def kleisli(self, env: Mapping[str, TraceSet], K: TraceSet) -> TraceSet:
        self._expect(K)
        gens = set()
        for g in K.generators:
            if g.value not in env:
                raise MissingBinding(f"no continuation for value {g.value!r}")
            cont = env[g.value]
            self._expect(cont)
            for h in cont.generators:
                gens.add(Trace(CEDE, g.steps + h.steps, CEDE, h.value))
        return brookes_set(gens)

    @staticmethod
    def _expect(K: TraceSet) -> None:
        if K.discipline != BROOKES:
            raise DisciplineMismatch("expected a brookes set")


def strip_cede(K: TraceSet) -> TraceSet:
    """Forget the (cede) sorts on both ends; inverse of ``embed_cede``."""
    if K.discipline != SORTED or K.sort is not CEDE:
        raise SortMismatch("only cede-sorted sets embed into the brookes model")
    for g in K.generators:
        if g.value_sort is not CEDE:
            raise SortMismatch(f"generator holds at its value: {g.render()}")
    return brookes_set(K.generators)


def embed_cede(K: TraceSet) -> TraceSet:
    if K.discipline != BROOKES:
        raise DisciplineMismatch("embedding applies to brookes sets")
    return TraceSet(SORTED, CEDE, K.generators)


def par(K1: TraceSet, K2: TraceSet, pairing: Callable[[str, str], str] | None = None) -> TraceSet:
    """All order-preserving interleavings of generator transition sequences."""
    if K1.discipline != BROOKES or K2.discipline != BROOKES:
        raise DisciplineMismatch("parallel composition applies to brookes sets")
    pairing = pairing or (lambda a, b: f"({a},{b})")
    gens = set()
    for g1 in K1.generators:
        for g2 in K2.generators:
            value = pairing(g1.value, g2.value)
            n1, n2 = len(g1.steps), len(g2.steps)
            for positions in itertools.combinations(range(n1 + n2), n1):
                merged: list[Transition] = []
                it1, it2 = iter(g1.steps), iter(g2.steps)
                chosen = set(positions)
                for slot in range(n1 + n2):
                    merged.append(next(it1) if slot in chosen else next(it2))
                gens.add(Trace(CEDE, tuple(merged), CEDE, value))
    return brookes_set(gens)


# ---------------------------------------------------------------------------
# Yield interpretations, the uniform-stutter rule, and cell-change witnesses


def yield1(K: TraceSet, space: StoreSpace | None = None) -> TraceSet:
    """Prefix every behaviour with an environment step (closure implicit)."""
    if K.discipline != BROOKES:
        raise DisciplineMismatch("yield applies to brookes sets")
    if K.is_empty():
        return K
    space = space or _space_for(K.generators)
    gens = set()
    for sigma in space.stores:
        step = Transition(sigma, sigma)
        for g in K.generators:
            gens.add(Trace(CEDE, (step,) + g.steps, CEDE, g.value))
    return brookes_set(gens)


def yield2(K: TraceSet, space: StoreSpace | None = None) -> TraceSet:
    """Possibly yield: the original behaviours stay available."""
    pre = yield1(K, space)
    return brookes_set(K.generators | pre.generators)


def single_cell_witness(K: TraceSet, space: StoreSpace | None = None) -> bool:
    """Does the closure contain a trace whose every transition changes at
    most one location?

    Stutters never hurt the property, so it is enough to search the bounded
    closure up to the longest generator (all mumble reducts live there).
    """

    def qualifies(t: Trace) -> bool:
        return all(
            sum(a != b for a, b in zip(s.pre.bits, s.post.bits)) <= 1 for s in t.steps
        )

    if K.is_empty():
        return False
    if any(qualifies(g) for g in K.generators):
        return True
    space = space or _space_for(K.generators)
    longest = max(len(g.steps) for g in K.generators)
    closure = closure_bounded(K.generators, K.discipline, space, longest, slack=0)
    return any(qualifies(t) for t in closure)


def hush_step(
    K: TraceSet, space: StoreSpace | None = None, max_len: int | None = None
) -> frozenset[Trace]:
    """Conclusions of the uniform-stutter deletion rule on a bounded closure.

    A stutter position may be deleted (leaving a non-empty remainder) when
    the trace with that position replaced by a stutter at *every* store lies
    in the set.
    """
    if K.is_empty():
        return frozenset()
    space = space or _space_for(K.generators)
    if max_len is None:
        max_len = max(len(g.steps) for g in K.generators) + 1
    out: set[Trace] = set()
    for t in closure_bounded(K.generators, K.discipline, space, max_len):
        if len(t.steps) < 2:
            continue
        for i, step in enumerate(t.steps):
            if not step.is_stutter():
                continue
            rest = t.steps[:i] + t.steps[i + 1 :]
            family_present = all(
                member(
                    Trace(t.start, t.steps[:i] + (Transition(s, s),) + t.steps[i + 1 :], t.value_sort, t.value),
                    K,
                )
                for s in space.stores
            )
            if family_present:
                out.add(Trace(t.start, rest, t.value_sort, t.value))
    return frozenset(out)


# ---------------------------------------------------------------------------
# The state-function model of nondeterministic global state


@dataclass(frozen=True)
class GTable:
    """For each input store (in space order), the set of (value, store) outcomes."""

    rows: tuple[frozenset[tuple[str, Store]], ...]

    def is_empty(self) -> bool:
        return all(not row for row in self.rows)


def gtable_subset(a: GTable, b: GTable) -> bool:
    return all(ra <= rb for ra, rb in zip(a.rows, b.rows))


def variable_gtable(space: StoreSpace, name: str) -> GTable:
    return GTable(tuple(frozenset({(name, s)}) for s in space.stores))


def gtable_to_traceset(space: StoreSpace, table: GTable) -> TraceSet:
    """View outcomes as single-transition held traces; such sets are closed."""
    gens = set()
    for sigma, row in zip(space.stores, table.rows):
        for value, rho in row:
            gens.add(Trace(HOLD, (Transition(sigma, rho),), HOLD, value))
    return sorted_set(HOLD, gens)


class GTableAlgebra(Algebra):
    """Global state interpreted as nondeterministic store functions."""

    def __init__(self, space: StoreSpace, signature: Signature | None = None):
        self.space = space
        self.signature = signature or build("G", space).signature
        self._index = {s: i for i, s in enumerate(space.stores)}

    def apply(self, op: Operator, args: tuple) -> GTable:
        if op.kind == "join":
            rows = tuple(
                frozenset().union(*(k.rows[i] for k in args)) if args else frozenset()
                for i in range(len(self.space.stores))
            )
            return GTable(rows)
        if op.kind == "update":
            loc, bit = op.params
            (k,) = args
            return GTable(
                tuple(k.rows[self._index[s.set(loc, bit)]] for s in self.space.stores)
            )
        if op.kind == "lookup":
            (loc,) = op.params
            k0, k1 = args
            return GTable(
                tuple(
                    (k0, k1)[s.get(loc)].rows[i]
                    for i, s in enumerate(self.space.stores)
                )
            )
        raise NotImplementedError(f"no state-function interpretation for {op.name}")
