import pytest

from gr1chat.ltlspec import (
    And,
    Atom,
    Eventually,
    Always,
    FalseConst,
    GR1Spec,
    Iff,
    Implies,
    Next,
    Not,
    Or,
    PropositionSet,
    SpecError,
    SpecSyntaxError,
    TrueConst,
    Until,
    atoms,
    build_spec,
    conj,
    eval_state,
    eval_transition,
    expand,
    parse_formula,
    parse_spec,
    render,
    serialize,
)
from gr1chat.worldmodel import UnknownRegion, WorldModel, Region, add_region


def test_eventually_expands_to_until():
    phi = Atom("p")
    assert expand(Eventually(phi)) == Until(TrueConst(), phi)


def test_always_expands_via_eventually():
    phi = Atom("p")
    assert expand(Always(phi)) == Not(Until(TrueConst(), Not(phi)))


def test_derived_boolean_expansions_are_primitive():
    f = expand(Iff(Atom("a"), Implies(Atom("b"), Atom("c"))))

    def primitive_only(g):
        if isinstance(g, (Atom, TrueConst, FalseConst)):
            return True
        if isinstance(g, (Not, Next)):
            return primitive_only(g.operand)
        if isinstance(g, (Or, Until)):
            return primitive_only(g.left) and primitive_only(g.right)
        return False

    assert primitive_only(f)


def test_eval_state_and_transition():
    f = Implies(And(Atom("a"), Not(Atom("b"))), Atom("c"))
    assert eval_state(f, {"a": True, "b": True, "c": False})
    assert not eval_state(f, {"a": True, "b": False, "c": False})
    t = Implies(Atom("a"), Next(Atom("a")))
    assert eval_transition(t, {"a": True}, {"a": True})
    assert not eval_transition(t, {"a": True}, {"a": False})
    assert eval_transition(t, {"a": False}, {"a": False})


def test_formula_text_round_trip():
    for text in [
        "a & b | c",
        "!a & !b -> X c",
        "a -> b -> c",
        "a <-> b",
        "TRUE",
        "(a | b) & c",
        "X a | !X b",
    ]:
        f = parse_formula(text)
        assert parse_formula(render(f)) == f


def test_parse_formula_errors():
    with pytest.raises(SpecSyntaxError):
        parse_formula("a &")
    with pytest.raises(SpecSyntaxError):
        parse_formula("(a | b")
    err = None
    try:
        parse_formula("a @ b", line=7)
    except SpecSyntaxError as exc:
        err = exc
    assert err is not None and err.line == 7 and err.column == 3


def test_build_spec_structure(chain_world):
    spec = build_spec(chain_world, "kibo")
    assert spec.props.inputs == ("in_kibo", "in_harmony", "in_columbus")
    assert spec.props.outputs == ("go_kibo", "go_harmony", "go_columbus")
    # exactly-one encodings pin the robot location
    assert eval_state(spec.env_init,
                      {"in_kibo": False, "in_harmony": False, "in_columbus": True,
                       "go_kibo": False, "go_harmony": False, "go_columbus": False})
    assert spec.sys_live == (Atom("in_kibo"),)
    assert len(spec.env_trans) == 1 + 9
    assert len(spec.sys_trans) == 1 + 3 + 3
    for f in (spec.env_init, spec.sys_init, *spec.env_live, *spec.sys_live):
        assert atoms(f) <= set(spec.props.all)


def test_build_spec_unknown_goal(chain_world):
    with pytest.raises(UnknownRegion):
        build_spec(chain_world, "airlock")


def test_exactly_one_under_env_init(chain_world):
    spec = build_spec(chain_world, "kibo")
    satisfying = []
    names = spec.props.inputs
    for bits in range(2 ** len(names)):
        val = {n: bool(bits >> i & 1) for i, n in enumerate(names)}
        val.update({o: False for o in spec.props.outputs})
        if eval_state(spec.env_init, val):
            satisfying.append(val)
    assert len(satisfying) == 1
    assert sum(satisfying[0][n] for n in names) == 1


def test_serialize_eight_sections_single_region():
    w = add_region(WorldModel(), Region("kibo", "kibo"))
    text = serialize(build_spec(w, "kibo"))
    for header in ["[INPUT]", "[OUTPUT]", "[ENV_INIT]", "[ENV_TRANS]",
                   "[ENV_LIVENESS]", "[SYS_INIT]", "[SYS_TRANS]", "[SYS_LIVENESS]"]:
        assert header in text
    assert text.index("[INPUT]") < text.index("[OUTPUT]") < text.index("[ENV_INIT]")


def test_spec_round_trip_and_fixed_point(chain_world):
    spec = build_spec(chain_world, "kibo")
    text = serialize(spec)
    assert parse_spec(text) == spec
    assert serialize(parse_spec(text)) == text


def test_spec_golden_file(chain_world, repo_root):
    golden = (repo_root / "tests" / "golden" / "exp1.spec").read_text("utf-8")
    assert serialize(build_spec(chain_world, "kibo")) == golden


def test_template_determinism(chain_world):
    a = serialize(build_spec(chain_world, "kibo"))
    b = serialize(build_spec(chain_world, "kibo"))
    assert a == b


def test_parse_spec_errors():
    with pytest.raises(SpecSyntaxError):
        parse_spec("[BOGUS]\n")
    with pytest.raises(SpecSyntaxError):
        parse_spec("in_a\n")  # content before any section


def test_spec_validation_rejects_primed_outputs_in_env():
    props = PropositionSet(inputs=("in_a",), outputs=("go_a",))
    with pytest.raises(SpecError):
        GR1Spec(
            props=props,
            env_init=TrueConst(),
            env_trans=(Next(Atom("go_a")),),
            env_live=(TrueConst(),),
            sys_init=TrueConst(),
            sys_trans=(),
            sys_live=(TrueConst(),),
        )


def test_spec_validation_requires_declared_atoms():
    props = PropositionSet(inputs=("in_a",), outputs=("go_a",))
    with pytest.raises(SpecError):
        GR1Spec(
            props=props,
            env_init=Atom("in_b"),
            env_trans=(),
            env_live=(TrueConst(),),
            sys_init=TrueConst(),
            sys_trans=(),
            sys_live=(TrueConst(),),
        )


def test_default_liveness_inserted_on_parse():
    text = (
        "[INPUT]\nin_a\n\n[OUTPUT]\ngo_a\n\n[ENV_INIT]\nin_a\n\n[ENV_TRANS]\n\n"
        "[ENV_LIVENESS]\n\n[SYS_INIT]\ngo_a\n\n[SYS_TRANS]\n\n[SYS_LIVENESS]\n"
    )
    spec = parse_spec(text)
    assert spec.env_live == (TrueConst(),)
    assert spec.sys_live == (TrueConst(),)


def test_conj_left_association():
    f = conj([Atom("a"), Atom("b"), Atom("c")])
    assert f == And(And(Atom("a"), Atom("b")), Atom("c"))
