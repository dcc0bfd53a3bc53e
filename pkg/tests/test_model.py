import json
import random
from fractions import Fraction as Q

import pytest

from pmdpsea.model import (
    InadmissibleError,
    ModelError,
    Pmdp,
    SchedulerError,
    SimpleScheduler,
    induce_pmc,
    instantiate,
    is_admissible,
    load_model,
    model_from_dict,
    model_to_dict,
    validate,
)
from pmdpsea.ratfunc import RationalFunction, parse_expression
from pmdpsea.reach import reachability_function, value_iteration_oracle

from .helpers import MODELS, concrete_mc, discussion, labyrinth, random_interior_valuation


def _model(rows, states=("s", "t", "u"), params=("p",)):
    parsed = {k: [(t, parse_expression(e, params)) for t, e in row] for k, row in rows.items()}
    return Pmdp(states, ("a", "b"), parsed, states[0], {}, params)


class TestValidate:
    def test_labyrinth_2x2_ff_is_valid(self):
        m, _, _ = labyrinth(2, "ff")
        assert validate(m) == []

    def test_row_sum_diagnostic(self):
        m = _model({("s", "a"): [("t", "p"), ("u", "p")]})
        (msg,) = validate(m)
        assert "row sum = 2*p ≠ 1" in msg

    def test_all_sinks(self):
        m = _model({})
        assert validate(m) == []
        assert m.sinks() == ("s", "t", "u")

    def test_unknown_successor(self):
        m = _model({("s", "a"): [("zz", "1")]})
        assert any("unknown successor" in d for d in validate(m))


class TestInduce:
    def test_discussion_alpha(self):
        m, _, q = discussion()
        pmc = induce_pmc(m, SimpleScheduler({"s": "go", "a": "go", "b": "go", "c": "a"}))
        assert reachability_function(pmc, q.source, q.target) == parse_expression("p", ("p",))

    def test_single_action_model_is_unchanged(self):
        m = _model({("s", "a"): [("t", "p"), ("u", "1-p")], ("t", "b"): [("u", "1")]})
        pmc = induce_pmc(m, SimpleScheduler({"s": "a", "t": "b"}))
        assert pmc.row("s") == m.row("s", "a")
        assert pmc.row("t") == m.row("t", "b")
        assert [t for t, _ in pmc.row("u")] == ["u"]

    def test_missing_choice(self):
        m = _model({("s", "a"): [("t", "1")]})
        with pytest.raises(SchedulerError):
            induce_pmc(m, SimpleScheduler({}))

    def test_disabled_choice(self):
        m = _model({("s", "a"): [("t", "1")]})
        with pytest.raises(SchedulerError):
            induce_pmc(m, SimpleScheduler({"s": "b"}))

    def test_2x2_ff_east_north_matches_oracle(self):
        m, space, q = labyrinth(2, "ff")
        xi = SimpleScheduler({"(1,1)": "E", "(2,1)": "N"})
        pmc = induce_pmc(m, xi, absorbing=(q.target,))
        assert len(pmc.states) == 4
        f = reachability_function(pmc, q.source, q.target)
        rng = random.Random(3)
        for _ in range(100):
            v = random_interior_valuation(rng, space, m)
            mc = concrete_mc(m, xi, v, (q.target,))
            assert abs(float(f(v)) - value_iteration_oracle(mc, q.source, q.target)) <= 1e-9

    def test_instantiate_induce_commute(self):
        # instantiate(induce(m)) == induce(instantiate(m))
        m, space, q = labyrinth(3, "fs", sinks=((2, 2),))
        rng = random.Random(5)
        for _ in range(10):
            v = random_interior_valuation(rng, space, m)
            xi = SimpleScheduler({s: rng.choice(m.enabled_actions(s)) for s in m.states if not m.is_sink(s)})
            a = instantiate(induce_pmc(m, xi), v)
            b = instantiate(m, v).induce(xi)
            assert a.transitions == b.transitions


class TestInstantiate:
    def test_deterministic_at_zero(self):
        m, _, _ = labyrinth(2, "ff")
        mdp = instantiate(m, {"l": 0, "r": 0})
        for row in mdp.transitions.values():
            assert len(row) == 1 and row[0][1] == 1

    def test_interior_row(self):
        m, _, _ = labyrinth(3, "ff", sinks=())
        mdp = instantiate(m, {"l": Q(1, 4), "r": Q(1, 4)})
        row = dict(mdp.row("(2,2)", "N"))
        assert row == {"(2,3)": Q(1, 2), "(1,2)": Q(1, 4), "(3,2)": Q(1, 4)}

    def test_negative_success_probability(self):
        m, _, _ = labyrinth(2, "fs")
        with pytest.raises(InadmissibleError):
            instantiate(m, {"l": Q(3, 4), "r": Q(1, 2)})
        assert not is_admissible(m, {"l": Q(3, 4), "r": Q(1, 2)})

    def test_missing_parameter(self):
        m, _, _ = labyrinth(2, "ff")
        with pytest.raises(InadmissibleError):
            instantiate(m, {"l": 0})


class TestJson:
    @pytest.mark.parametrize("name", ["labyrinth_2x2_ff.json", "labyrinth_2x2_fs.json", "discussion.json"])
    def test_round_trip(self, name):
        m, space, q = load_model(MODELS / name)
        m2, space2, q2 = model_from_dict(json.loads(json.dumps(model_to_dict(m, space, q))))
        assert (m2, space2, q2) == (m, space, q)

    def test_golden_matches_generator(self):
        for sc in ("ff", "fs"):
            assert load_model(MODELS / f"labyrinth_2x2_{sc}.json") == labyrinth(2, sc)

    def _doc(self):
        return json.loads((MODELS / "discussion.json").read_text())

    def test_unknown_parameter(self):
        doc = self._doc()
        doc["transitions"][0]["to"][0]["prob"] = "q"
        doc["transitions"][0]["to"][1]["prob"] = "1-q"
        with pytest.raises(ModelError, match="q"):
            model_from_dict(doc)

    def test_missing_initial(self):
        doc = self._doc()
        del doc["initial"]
        with pytest.raises(ModelError, match="initial"):
            model_from_dict(doc)

    def test_bad_row_sum_rejected(self):
        doc = self._doc()
        doc["transitions"][0]["to"][1]["prob"] = "p"
        with pytest.raises(ModelError, match="row sum"):
            model_from_dict(doc)

    def test_float_bound_rejected(self):
        doc = self._doc()
        doc["parameters"][0]["hi"] = 0.5
        with pytest.raises(ModelError):
            model_from_dict(doc)

    def test_rational_bounds(self):
        doc = self._doc()
        doc["parameters"][0]["hi"] = "1/2"
        _, space, _ = model_from_dict(doc)
        assert space.box["p"] == (0, Q(1, 2))
        assert space.density == RationalFunction.constant(1, ("p",))
