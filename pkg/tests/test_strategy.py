import pytest

from zol import (
    BudgetError,
    ValidationError,
    duplicator_strategy_move,
    initial_state,
    make_generator,
    play_game,
    verify_state,
)
from zol.strategy import StrategyState


Z = make_generator("z")
T2 = make_generator("tree:2")


class TestInitialState:
    def test_fresh_state(self):
        st = initial_state(Z, Z, 3)
        assert st.round_index == 0
        assert st.pairs == () and st.alpha == ()
        assert st.radius() == 125
        assert verify_state(st)["ok"]

    def test_rounds_positive(self):
        with pytest.raises(ValidationError):
            initial_state(Z, Z, 0)

    def test_vocabulary_mismatch(self):
        with pytest.raises(ValidationError):
            initial_state(Z, make_generator("grid2"), 2)


class TestMoves:
    def test_first_move_answers_base_point(self):
        st = initial_state(Z, Z, 2)
        resp, st = duplicator_strategy_move(st, ("left", "0"))
        assert resp == "0"
        assert st.pairs == (("0", "0"),)
        assert st.round_index == 1 and st.radius() == 5

    def test_near_pick_goes_through_alpha(self):
        st = initial_state(Z, Z, 2)
        _, st = duplicator_strategy_move(st, ("left", "0"))
        resp, st = duplicator_strategy_move(st, ("left", "3"))
        assert resp == "3"
        assert verify_state(st)["ok"]

    def test_far_pick_scans_for_disjoint_ball(self):
        st = initial_state(Z, Z, 2)
        _, st = duplicator_strategy_move(st, ("left", "0"))
        resp, st = duplicator_strategy_move(st, ("left", "60"))
        # nearest center whose unit ball avoids the unit ball around 0
        assert resp == "-4"
        assert st.radius() == 1
        assert verify_state(st)["ok"]

    def test_repeated_pick(self):
        st = initial_state(Z, Z, 2)
        _, st = duplicator_strategy_move(st, ("left", "0"))
        resp, st = duplicator_strategy_move(st, ("left", "0"))
        assert resp == "0"
        assert st.pairs == (("0", "0"), ("0", "0"))

    def test_right_side_pick_is_mirrored(self):
        st = initial_state(Z, Z, 2)
        resp, st = duplicator_strategy_move(st, ("right", "7"))
        assert resp == "0"
        assert st.pairs == (("0", "7"),)
        assert st.alpha_dict()["0"] == "7"
        assert verify_state(st)["ok"]

    def test_alpha_domain_is_the_stated_ball(self):
        st = initial_state(Z, Z, 2)
        _, st = duplicator_strategy_move(st, ("left", "0"))
        dom = set(st.alpha_dict())
        assert dom == {str(i) for i in range(-5, 6)}

    def test_bad_side(self):
        st = initial_state(Z, Z, 1)
        with pytest.raises(ValidationError):
            duplicator_strategy_move(st, ("top", "0"))

    def test_game_over(self):
        st = initial_state(Z, Z, 1)
        _, st = duplicator_strategy_move(st, ("left", "0"))
        with pytest.raises(ValidationError):
            duplicator_strategy_move(st, ("left", "1"))

    def test_scan_cap_budget(self):
        st = initial_state(Z, Z, 2)
        _, st = duplicator_strategy_move(st, ("left", "0"))
        # the first admissible center sits at distance 4 from the base point
        with pytest.raises(BudgetError):
            duplicator_strategy_move(st, ("left", "60"), scan_cap=3)
        resp, _ = duplicator_strategy_move(st, ("left", "60"), scan_cap=4)
        assert resp == "-4"


class TestVerifyState:
    def test_reports_broken_domain(self):
        st = StrategyState(Z, Z, 1, 1, (("0", "0"),), (("0", "0"),))
        report = verify_state(st)
        assert not report["domain_ok"]
        assert not report["ok"]

    def test_reports_pair_mismatch(self):
        alpha = tuple((str(i), str(i)) for i in range(-1, 2))
        st = StrategyState(Z, Z, 1, 1, (("0", "1"),), alpha)
        report = verify_state(st)
        assert not report["pairs_consistent"]

    def test_report_keys(self):
        st = initial_state(Z, Z, 1)
        report = verify_state(st)
        assert set(report) == {
            "round_index",
            "radius",
            "pairs_consistent",
            "domain_ok",
            "image_ok",
            "bijective",
            "tuples_ok",
            "ok",
        }


class TestPlayGame:
    def test_two_round_transcript(self):
        out = play_game(Z, Z, 2, [("left", "0"), ("left", "60")])
        assert out["rounds"] == 2
        assert out["final_state_ok"] is True
        assert out["win"] is True
        assert [m["response"] for m in out["moves"]] == ["0", "-4"]
        assert [m["radius"] for m in out["moves"]] == [5, 1]
        assert all(m["verified"] for m in out["moves"])
        assert out["pairs"] == [["0", "0"], ["60", "-4"]]

    def test_script_length_checked(self):
        with pytest.raises(ValidationError):
            play_game(Z, Z, 2, [("left", "0")])

    def test_mixed_sides(self):
        out = play_game(Z, Z, 2, [("right", "7"), ("left", "8")])
        assert out["win"] is True
        assert out["pairs"][0] == ["0", "7"]

    def test_binary_tree_game(self):
        out = play_game(T2, T2, 2, [("left", ""), ("left", "22222")])
        assert out["win"] is True
        # first interior vertex whose unit ball clears the root's unit ball
        assert out["moves"][1]["response"] == "1111"

    def test_binary_tree_near_pick(self):
        out = play_game(T2, T2, 2, [("left", ""), ("left", "21")])
        assert out["win"] is True
        assert out["moves"][1]["response"] == "21"

    def test_three_round_game(self):
        out = play_game(Z, Z, 3, [("left", "0"), ("left", "1000"), ("right", "3")])
        assert out["win"] is True
        assert [m["radius"] for m in out["moves"]] == [25, 5, 1]
