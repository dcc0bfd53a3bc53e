import random

import pytest

from pmdpsea.labyrinth import LabyrinthConfig, generate, move_row, parameter_names
from pmdpsea.model import SimpleScheduler, validate
from pmdpsea.ratfunc import RationalFunction, parse_expression
from pmdpsea.schedulers import decision_states, wave_of

from .helpers import labyrinth, random_config

LR = ("l", "r")


def row_text(row, params=LR):
    return {t: f for t, f in row}


def expect(pairs, params=LR):
    return {t: parse_expression(e, params) for t, e in pairs.items()}


class TestRows:
    def test_fs_east_from_corner(self):
        cfg = LabyrinthConfig(2, "fs", "k2", {(1, 2)})
        assert row_text(move_row(cfg, (1, 1), "E", LR)) == expect({"(2,1)": "1-l-r", "(1,2)": "l+r"})

    def test_ff_east_from_corner(self):
        cfg = LabyrinthConfig(2, "ff", "k2", {(1, 2)})
        assert row_text(move_row(cfg, (1, 1), "E", LR)) == expect({"(2,1)": "1-l", "(1,2)": "l"})

    @pytest.mark.parametrize("scenario", ["ff", "fs"])
    @pytest.mark.parametrize("action,ahead,left,right", [
        ("N", "(2,3)", "(1,2)", "(3,2)"),
        ("S", "(2,1)", "(3,2)", "(1,2)"),
        ("E", "(3,2)", "(2,3)", "(2,1)"),
        ("W", "(1,2)", "(2,1)", "(2,3)"),
    ])
    def test_interior(self, scenario, action, ahead, left, right):
        cfg = LabyrinthConfig(3, scenario, "k2")
        got = row_text(move_row(cfg, (2, 2), action, LR))
        assert got == expect({ahead: "1-l-r", left: "l", right: "r"})

    def test_disabled_off_grid(self):
        cfg = LabyrinthConfig(2, "ff", "k2")
        assert move_row(cfg, (1, 1), "S", LR) is None
        assert move_row(cfg, (1, 1), "W", LR) is None

    def test_sinks_have_no_rows(self):
        m, _, _ = labyrinth(3, sinks=((2, 2), (1, 3)))
        assert set(m.sinks()) == {"(2,2)", "(1,3)"}
        assert m.labels == {"(1,3)": "sink", "(2,2)": "sink"}

    def test_moves_into_sinks_stay_enabled(self):
        m, _, _ = labyrinth(2, sinks=((1, 2),))
        assert m.enabled_actions("(1,1)") == ("N", "E")


class TestSchemes:
    def test_parameter_names(self):
        assert parameter_names("k8") == ("l_N", "r_N", "l_S", "r_S", "l_E", "r_E", "l_W", "r_W")
        assert parameter_names("k2") == ("l", "r")
        assert parameter_names("k1") == ("p",)

    def test_k1_space(self):
        _, space, _ = labyrinth(3, scheme="k1", sinks=())
        assert space.parameters == ("p",)
        assert space.box["p"] == (0, parse_expression("1/2", ()).constant_value())

    def test_k2_constraint(self):
        _, space, _ = labyrinth(2)
        assert space.satisfies_constraints({"l": 0.5, "r": 0.5})
        assert not space.satisfies_constraints({"l": 0.75, "r": 0.5})

    @pytest.mark.parametrize("scenario", ["ff", "fs"])
    def test_k1_is_k2_with_l_equal_r(self, scenario):
        m2, _, q = labyrinth(3, scenario, "k2", sinks=((2, 2),))
        m1, _, _ = labyrinth(3, scenario, "k1", sinks=((2, 2),))
        p = RationalFunction.variable("p", ("p",))
        rng = random.Random(2)
        for _ in range(8):
            xi = SimpleScheduler({s: rng.choice(m2.enabled_actions(s)) for s in decision_states(m2, q)})
            f2 = wave_of(m2, q, xi).substitute({"l": p, "r": p}, ("p",))
            assert f2 == wave_of(m1, q, xi)

    def test_k8_uses_per_action_parameters(self):
        cfg = LabyrinthConfig(3, "ff", "k8")
        params = parameter_names("k8")
        row = row_text(move_row(cfg, (2, 2), "W", params), params)
        assert row["(2,1)"] == RationalFunction.variable("l_W", params)


class TestConfig:
    def test_defaults(self):
        cfg = LabyrinthConfig(3)
        assert cfg.target == (3, 3) and cfg.source == (1, 1)

    @pytest.mark.parametrize("kwargs", [
        dict(n=1),
        dict(n=2, scenario="xx"),
        dict(n=2, scheme="k3"),
        dict(n=2, sinks={(3, 1)}),
        dict(n=2, sinks={(2, 2)}),
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            LabyrinthConfig(**kwargs)

    def test_random_configs_validate(self):
        rng = random.Random(8)
        for _ in range(30):
            m, _, _ = generate(random_config(rng))
            assert validate(m) == []
