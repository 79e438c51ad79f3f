import random

import pytest

from tracealg import (
    CEDE,
    HOLD,
    STAR,
    SampleConfig,
    StoreSpace,
    Trace,
    TraceAlgebra,
    Transition,
    Verdict,
    build,
    check_equal,
    check_refines,
    check_representation,
    check_roundtrip,
    check_sort,
    cross_check_G,
    denote,
    denote_B,
    denote_G,
    equal,
    evaluate,
    member,
    random_closed_set,
    random_term,
    run_nogo2,
    run_nogo3,
    sorted_set,
    subset,
    unit,
    validate_axioms,
    validate_distributivity,
    validate_translation,
)
from tracealg.checker import _validate_instances
from tracealg.theories import AxiomInstance, Bounds, encode_inequation
from tracealg.kernel import Var, app

SP = StoreSpace()
SIG = build("S", SP).signature
X_CEDE = {"x": CEDE}

SMALL = Bounds(max_join_arity=2, max_squash=2)


def sterm(raw, ctx=X_CEDE):
    return check_sort(SIG, ctx, raw)


IRIE = sterm(("acq", ("lkp:y", ("rel", "x"), ("rel", "x"))))
WRITE_TWICE = sterm(("acq", ("upd:x:0", ("rel", ("acq", ("upd:x:1", ("rel", "x")))))))
WRITE_ONCE = sterm(("acq", ("upd:x:1", ("rel", "x"))))


# ---------------------------------------------------------------------------
# The named transformations


def test_irrelevant_read_intro_and_elim_holds():
    assert check_equal("S", X_CEDE, IRIE, sterm("x")).holds


def test_write_elim_holds():
    assert check_refines("S", X_CEDE, WRITE_ONCE, WRITE_TWICE).holds


def test_write_intro_refuted_with_two_changing_transitions():
    verdict = check_refines("S", X_CEDE, WRITE_TWICE, WRITE_ONCE)
    assert not verdict.holds
    witness = verdict.witness
    assert sum(1 for s in witness.steps if s.pre != s.post) == 2
    assert member(witness, denote("S", X_CEDE, WRITE_TWICE, SP))
    assert not member(witness, denote("S", X_CEDE, WRITE_ONCE, SP))


def test_verdict_invariant():
    with pytest.raises(ValueError):
        Verdict(True, Trace(CEDE, (Transition(SP.stores[0], SP.stores[0]),), CEDE, "x"))
    with pytest.raises(ValueError):
        Verdict(False, None)


# ---------------------------------------------------------------------------
# Denotation


def test_denote_empty_block_is_unit():
    d = denote("S", X_CEDE, sterm(("acq", ("rel", "x"))), SP)
    assert equal(d, unit(SP, CEDE, "x"))


def test_denote_bottom_is_empty():
    bot = check_sort(SIG, {}, ("or",), expected=CEDE)
    assert denote("S", {}, bot, SP).is_empty()


def test_denote_is_canonical():
    from tracealg import canonicalize

    d = denote("S", X_CEDE, WRITE_TWICE, SP)
    assert canonicalize(d) == d


def test_denote_overview_term():
    ctx = {"three": CEDE, "seven": CEDE}
    raw = (
        "upd:y:0",
        ("rel", ("acq", ("lkp:y", ("rel", "three"), ("upd:x:1", ("upd:y:1", ("rel", "seven")))))),
    )
    d = denote("S", ctx, sterm(raw, ctx), SP)
    s11, s10 = SP.parse_store("11"), SP.parse_store("10")
    assert member(Trace(HOLD, (Transition(s11, s10), Transition(s11, s11)), CEDE, "seven"), d)


def test_denote_tr_agrees_with_direct_interpretation():
    p = build("Tr", SP)
    rng = random.Random(20)
    ctx = {"a": HOLD, "b": CEDE}
    direct_alg = TraceAlgebra(SP, p.signature)
    for _ in range(40):
        sort = rng.choice((HOLD, CEDE))
        t = random_term(p, ctx, sort, 3, rng)
        via_translation = denote("Tr", ctx, t, SP)
        env = {name: unit(SP, s, name) for name, s in ctx.items()}
        direct = evaluate(direct_alg, env, t)
        assert equal(via_translation, direct)


def test_denote_B_stutter_prefix_refines_return():
    b = build("B", SP)
    ctx = {"x": STAR}
    t = check_sort(b.signature, ctx, ("tr:10:10", "x"))
    d = denote_B(ctx, t, SP)
    assert subset(d, denote_B(ctx, check_sort(b.signature, ctx, "x"), SP))


def test_denote_G_update_lookup():
    g = build("G", SP)
    ctx = {"x0": STAR, "x1": STAR}
    t1 = check_sort(g.signature, ctx, ("upd:y:0", ("lkp:y", "x0", "x1")))
    t2 = check_sort(g.signature, ctx, ("upd:y:0", "x0"))
    assert denote_G(ctx, t1, SP) == denote_G(ctx, t2, SP)
    assert check_equal("G", ctx, t1, t2, SP).holds


def test_check_equal_gtable_witness_is_trace():
    g = build("G", SP)
    ctx = {"x0": STAR, "x1": STAR}
    t1 = check_sort(g.signature, ctx, ("upd:y:0", "x0"))
    t2 = check_sort(g.signature, ctx, ("upd:y:1", "x0"))
    verdict = check_equal("G", ctx, t1, t2, SP)
    assert not verdict.holds and verdict.witness is not None


def test_check_equal_tgs_through_embedding():
    tgs = build("Tgs", SP)
    ctx = {"x": STAR}
    seq = check_sort(tgs.signature, ctx, ("tr:11:10", ("tr:10:00", "x")))
    fused = check_sort(tgs.signature, ctx, ("tr:11:00", "x"))
    assert check_equal("Tgs", ctx, seq, fused, SP).holds


# ---------------------------------------------------------------------------
# Axiom validation


@pytest.mark.parametrize("theory", ["J", "V", "G", "S", "B", "Tgs", "Tr"])
def test_axioms_validate_on_samples(theory):
    cfg = SampleConfig(seed=1, samples=3)
    report = validate_axioms(theory, cfg, SP, SMALL)
    assert report.passed, report.format()


def test_corrupted_fuse_fails_with_witness():
    x = Var("x", HOLD)
    rel_acq = app(SIG, "rel", app(SIG, "acq", x))
    lhs, rhs = encode_inequation(SIG, rel_acq, x, "le")
    bad = AxiomInstance("Fuse-flipped", (("x", HOLD),), lhs, rhs)
    report = _validate_instances("S", [bad], SampleConfig(seed=0, samples=20), SP, "mutation")
    assert not report.passed


def test_distributivity_validates_on_samples():
    report = validate_distributivity("S", SampleConfig(seed=2, samples=2), SP, SMALL)
    assert report.passed, report.format()


def test_translation_validity_all_builtins():
    cfg = SampleConfig(seed=3, samples=2)
    for name in ("E", "E_G", "E_Tgs", "E_Tr", "E_TrS", "E_STr", "E_BS"):
        report = validate_translation(name, cfg, SP, SMALL)
        assert report.passed, f"{name}:\n{report.format()}"


def test_monotonicity_consequence_on_samples():
    # refinements survive wrapping in any operator position
    from tracealg.kernel import App, join

    p = build("S", SP)
    rng = random.Random(77)
    ctx = {"a": HOLD, "b": CEDE}
    for _ in range(40):
        sort = rng.choice((HOLD, CEDE))
        small = random_term(p, ctx, sort, 2, rng)
        extra = random_term(p, ctx, sort, 2, rng)
        big = join(SIG, sort, (small, extra))
        assert check_refines("S", ctx, small, big, SP).holds
        ops = [op for op in SIG.operators.values() if not op.variadic]
        op = rng.choice(ops)
        for pos, want in enumerate(op.args):
            if want is not sort:
                continue
            others = [random_term(p, ctx, s, 1, rng) for s in op.args]

            def wrap(hole):
                args = tuple(hole if i == pos else others[i] for i in range(len(op.args)))
                return App(op.name, args, op.result)

            assert check_refines("S", ctx, wrap(small), wrap(big), SP).holds


def test_same_read_intro_refuted():
    # successive reads can see different values, a single read cannot
    ctx = {f"x{i}{j}": CEDE for i in (0, 1) for j in (0, 1)}

    def read(loc, t0, t1):
        return ("acq", (f"lkp:{loc}", ("rel", t0), ("rel", t1)))

    lhs = sterm(read("y", read("y", "x00", "x01"), read("y", "x10", "x11")), ctx)
    rhs = sterm(read("y", "x00", "x11"), ctx)
    verdict = check_refines("S", ctx, lhs, rhs, SP)
    assert not verdict.holds
    assert verdict.witness.value in ("x01", "x10")


# ---------------------------------------------------------------------------
# Cross-model checks


def test_cross_check_G_examples():
    g = build("G", SP)
    ctx = {"x0": STAR}
    assert cross_check_G(check_sort(g.signature, ctx, ("upd:x:1", "x0")), ctx, SP)
    assert cross_check_G(check_sort(g.signature, ctx, ("or",)), ctx, SP)


def test_cross_check_G_random_terms():
    g = build("G", SP)
    rng = random.Random(21)
    ctx = {"a": STAR, "b": STAR}
    for _ in range(50):
        t = random_term(g, ctx, STAR, 4, rng)
        assert cross_check_G(t, ctx, SP)


def test_roundtrip_smoke():
    cfg = SampleConfig(seed=4, samples=5)
    for pair in ("Tgs~G", "Tr~S"):
        report = check_roundtrip(pair, cfg, SP)
        assert report.passed, report.format()


def test_representation_examples():
    t = sterm(("acq", ("upd:y:0", ("rel", ("acq", ("upd:x:1", ("rel", "x")))))))
    assert check_representation(t, X_CEDE, SP)
    assert check_representation(IRIE, X_CEDE, SP)


def test_representation_random_terms():
    p = build("S", SP)
    rng = random.Random(22)
    ctx = {"a": HOLD, "b": CEDE}
    for _ in range(25):
        t = random_term(p, ctx, rng.choice((HOLD, CEDE)), 4, rng)
        assert check_representation(t, ctx, SP)


def test_read_encoding_matches_brookes_read():
    from tracealg import BrookesAlgebra, embed_cede

    b = BrookesAlgebra(SP)
    ctx = {"x0": CEDE, "x1": CEDE}
    for loc_name, loc in (("x", 0), ("y", 1)):
        encoded = sterm(("acq", (f"lkp:{loc_name}", ("rel", "x0"), ("rel", "x1"))), ctx)
        lhs = denote("S", ctx, encoded, SP)
        rhs = embed_cede(b.read(loc, b.unit("x0"), b.unit("x1")))
        assert equal(lhs, rhs)


def test_write_encoding_matches_brookes_write():
    from tracealg import BrookesAlgebra, embed_cede

    b = BrookesAlgebra(SP)
    for loc_name, loc in (("x", 0), ("y", 1)):
        for bit in (0, 1):
            encoded = sterm(("acq", (f"upd:{loc_name}:{bit}", ("rel", "x"))))
            lhs = denote("S", X_CEDE, encoded, SP)
            rhs = embed_cede(b.write(loc, bit, b.unit("x")))
            assert equal(lhs, rhs)


def test_strictness_of_every_operator():
    # applying any operator to empty sets yields the empty set
    from tracealg import TraceAlgebra, sorted_set

    alg = TraceAlgebra(SP)
    for op in SIG.operators.values():
        arity = 1 if op.variadic else len(op.args)
        args = tuple(sorted_set(s, []) for s in op.scheme(arity))
        assert alg.apply(op, args).is_empty()


# ---------------------------------------------------------------------------
# Experiments


def test_nogo2_small_depth():
    report = run_nogo2(2, SP)
    assert report.passed, report.format()


def test_nogo3_small():
    report = run_nogo3(SampleConfig(seed=5, samples=15), SP)
    assert report.passed, report.format()


# ---------------------------------------------------------------------------
# Sampling


def test_random_closed_set_deterministic():
    cfg = SampleConfig(seed=9, gens=(1, 3), length=(1, 2))
    a = random_closed_set(SP, HOLD, {"v": CEDE}, cfg)
    b = random_closed_set(SP, HOLD, {"v": CEDE}, cfg)
    assert a == b


def test_random_closed_set_empty_when_no_generators():
    cfg = SampleConfig(seed=9, gens=(0, 0))
    assert random_closed_set(SP, HOLD, {"v": CEDE}, cfg).is_empty()


def test_random_closed_set_invariants():
    rng = random.Random(23)
    cfg = SampleConfig(gens=(0, 4), length=(1, 3))
    for _ in range(50):
        K = random_closed_set(SP, CEDE, {"u": HOLD, "v": CEDE}, cfg, rng)
        for g in K.generators:
            assert g.steps
            assert g.start is CEDE
