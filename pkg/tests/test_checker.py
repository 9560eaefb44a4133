import random
from dataclasses import replace
from fractions import Fraction

import pytest

import oracles
from genmodels import random_integration_model
from gfo.checker import (
    INTEGRATION,
    INTEGRATION_NO_PROCESS,
    VALUATION,
    IntegrationWitness,
    Violation,
    check_disjointness,
    check_integration,
    check_presential_dependence,
    complete_integration,
    derive_process,
    detect_continuant_changes,
    detect_process_changes,
    sort_violations,
)
from gfo.chrono import Chronoid, inner_boundary
from gfo.dsl import parse_file
from gfo.errors import MalformedContinuant, UnknownProperty
from gfo.model import (
    CATEGORICAL,
    Continuant,
    Model,
    Presential,
    Process,
    PropertyDef,
    Support,
    ValueDomain,
)
from helpers import CORPUS


@pytest.fixture(scope="module")
def heart():
    return parse_file(CORPUS / "heart.gfo")


@pytest.fixture()
def john():
    return parse_file(CORPUS / "john_incomplete.gfo")


def test_disjointness_clean_models(heart):
    assert check_disjointness(heart) == []
    assert check_disjointness(Model()) == []


def test_disjointness_flags_double_declaration():
    ch = Chronoid("e", Fraction(0), Fraction(1))
    pres = Presential("x", inner_boundary(ch, 0), {})
    cont = Continuant("x", ch, {Fraction(0): "x", Fraction(1): "x"})
    m = Model(chronoids={"e": ch}, presentials={"x": pres}, continuants={"x": cont})
    violations = check_disjointness(m)
    assert len(violations) == 1
    assert violations[0].axiom == "disjointness"
    assert violations[0].subjects == ("x",)


def test_integration_witness_on_consistent_corpus(heart):
    for cid in ("heart", "blood", "veins"):
        result = check_integration(heart, heart.continuants[cid])
        assert isinstance(result, IntegrationWitness)
        assert result.matched_samples == tuple(
            sorted(heart.continuants[cid].exhibit_map)
        )


def test_integration_mismatch_at_one_sample(john):
    p = derive_process(john, john.continuants["John"])
    m = john.with_process(p)
    c = m.continuants["John"]
    other = Presential("impostor", inner_boundary(c.lifetime, 1), {})
    mutated = replace(c, exhibit_map={**c.exhibit_map, Fraction(1): "impostor"})
    m = m.with_presential(other).with_continuant(mutated)
    result = check_integration(m, mutated)
    assert isinstance(result, list) and len(result) == 1
    assert result[0].axiom == INTEGRATION
    assert result[0].at == Fraction(1)
    assert set(result[0].subjects) == {"John", p.id}


def test_integration_no_process_agrees_with_oracle(john):
    c = john.continuants["John"]
    assert oracles.integration_candidates(john, c) == []
    result = check_integration(john, c)
    assert [v.axiom for v in result] == [INTEGRATION_NO_PROCESS]


def test_integration_valuation_mode():
    rng = random.Random(7)
    m, c = random_integration_model(rng, 0)
    p = derive_process(m, c)
    # twin presentials: same coordinates and valuations, fresh identities
    twins = {}
    presentials = dict(m.presentials)
    for t, pid in c.exhibit_map.items():
        src = m.presentials[pid]
        twin = Presential(f"{pid}-twin", src.at, dict(src.valuation))
        presentials[twin.id] = twin
        twins[t] = twin.id
    p = replace(p, boundary_map=twins)
    m = replace(m, presentials=presentials).with_process(p)
    strict = check_integration(m, c)
    assert isinstance(strict, list) and strict  # identity fails
    lax = check_integration(m, c, VALUATION)
    assert isinstance(lax, IntegrationWitness)


def test_derive_process_round_trip(john):
    p = derive_process(john, john.continuants["John"])
    m = john.with_process(p)
    result = check_integration(m, m.continuants["John"])
    assert isinstance(result, IntegrationWitness)
    assert result.process == p.id


def test_derive_process_requires_endpoint_samples():
    ch = Chronoid("e", Fraction(0), Fraction(2))
    pres = Presential("n0", inner_boundary(ch, 0), {})
    c = Continuant("C", ch, {Fraction(0): "n0"})
    m = Model(chronoids={"e": ch}, presentials={"n0": pres}, continuants={"C": c})
    with pytest.raises(MalformedContinuant):
        derive_process(m, c)


def test_derive_twice_yields_distinct_processes(john):
    first = derive_process(john, john.continuants["John"])
    m = john.with_process(first)
    second = derive_process(m, m.continuants["John"])
    assert first.id != second.id
    assert first.boundary_map == second.boundary_map


def test_presential_dependence_with_and_without_completion(john):
    violations = check_presential_dependence(john)
    assert [v.subjects[0] for v in violations] == ["m0", "m1", "m2"]
    completed, derived = complete_integration(john)
    assert derived == ["John-proc"]
    assert check_presential_dependence(completed) == []


def test_presential_dependence_ignores_immaterial():
    ch = Chronoid("e", Fraction(0), Fraction(1))
    ghost = Presential("ghost", inner_boundary(ch, 0), {}, material=False)
    m = Model(chronoids={"e": ch}, presentials={"ghost": ghost})
    assert check_presential_dependence(m) == []


def _ball_like(values_by_t):
    ch = Chronoid("roll", Fraction(0), Fraction(1))
    color = PropertyDef("color", ValueDomain(CATEGORICAL, frozenset({"blue", "red"})))
    presentials = {}
    emap = {}
    for t, valuation in values_by_t.items():
        pid = f"b{t}"
        presentials[pid] = Presential(pid, inner_boundary(ch, t), valuation)
        emap[Fraction(t)] = pid
    c = Continuant("ball", ch, emap)
    m = Model(
        chronoids={"roll": ch},
        presentials=presentials,
        continuants={"ball": c},
        property_defs={"color": color},
    )
    return m, c


def test_continuant_changes_constant():
    m, c = _ball_like({0: {"color": "red"}, 1: {"color": "red"}})
    assert detect_continuant_changes(m, c) == []


def test_continuant_changes_flip():
    m, c = _ball_like({0: {"color": "red"}, 1: {"color": "blue"}})
    assert detect_continuant_changes(m, c) == [
        (Fraction(0), Fraction(1), "color", "red", "blue")
    ]


def test_continuant_changes_to_undefined_matches_oracle():
    m, c = _ball_like({0: {"color": "red"}, 1: {}})
    expected = oracles.continuant_change_pairs(m, c)
    assert expected == [(Fraction(0), Fraction(1), "color", "red", None)]
    assert detect_continuant_changes(m, c) == expected


def test_continuant_changes_never_pair_equal_times(heart):
    for c in heart.continuants.values():
        for t1, t2, *_ in detect_continuant_changes(heart, c):
            assert t1 < t2


def _trajectory_process(samples, domain_kind=CATEGORICAL):
    ch = Chronoid("run", Fraction(0), Fraction(10))
    if domain_kind == CATEGORICAL:
        domain = ValueDomain(CATEGORICAL, frozenset({"off", "on"}))
    else:
        domain = ValueDomain("numeric")
    prop = PropertyDef("w", domain, Support("global"))
    pres = {
        "r0": Presential("r0", inner_boundary(ch, 0), {}),
        "r1": Presential("r1", inner_boundary(ch, 10), {}),
    }
    p = Process(
        "P",
        ch,
        {Fraction(0): "r0", Fraction(10): "r1"},
        {"w": tuple((Fraction(t), v) for t, v in samples)},
    )
    m = Model(
        chronoids={"run": ch},
        presentials=pres,
        processes={"P": p},
        property_defs={"w": prop},
    )
    return m, p


def test_process_changes_constant_trajectory():
    m, p = _trajectory_process([(0, "on"), (5, "on"), (10, "on")])
    assert detect_process_changes(m, p, "w") == []


def test_process_changes_categorical_flip_midpoint():
    m, p = _trajectory_process([(3, "off"), (4, "on")])
    assert detect_process_changes(m, p, "w") == [Fraction(7, 2)]


def test_process_changes_tolerance_absorbs_slope():
    m, p = _trajectory_process([(0, Fraction(0)), (1, Fraction(1))], "numeric")
    assert detect_process_changes(m, p, "w", tol=2) == []
    assert detect_process_changes(m, p, "w", tol=0) == [Fraction(1, 2)]


def test_process_changes_unknown_property():
    m, p = _trajectory_process([(0, "on"), (10, "on")])
    with pytest.raises(UnknownProperty):
        detect_process_changes(m, p, "nope")
    bare = replace(p, trajectories={})
    with pytest.raises(UnknownProperty):
        detect_process_changes(m, bare, "w")


def test_violation_order_is_canonical(john):
    violations = []
    violations.extend(check_presential_dependence(john))
    result = check_integration(john, john.continuants["John"])
    violations.extend(result)
    ordered = sort_violations(violations)
    assert ordered == sort_violations(list(reversed(violations)))
    keys = [v.sort_key() for v in ordered]
    assert keys == sorted(keys)


def test_violation_rejects_unregistered_axiom():
    with pytest.raises(ValueError):
        Violation(axiom="not-an-axiom", subjects=("x",), message="boom")
