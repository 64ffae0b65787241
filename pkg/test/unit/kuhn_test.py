from fractions import Fraction

import pytest

from seedfate.games.kuhn import (
    BET,
    CALL,
    CHECK,
    FIRST_INFOSETS,
    FOLD,
    JACK,
    KING,
    QUEEN,
    SECOND_INFOSETS,
    best_response,
    hand_payoff,
    payoff_matrix,
    solve_hand,
    strategy_value,
)

GAME_VALUE = -1 / 18
TOLERANCE = 1e-6


@pytest.fixture(scope="module")
def solution():
    yield solve_hand()


def always(infosets, action):
    return {infoset: action for infoset in infosets}


@pytest.mark.parametrize(
    "cards,first,second,expected",
    [
        ((KING, JACK), BET, CALL, 2),
        ((JACK, KING), BET, CALL, -2),
        ((JACK, KING), BET, FOLD, 1),
        ((QUEEN, JACK), CHECK, CHECK, 1),
        ((JACK, QUEEN), CHECK, CHECK, -1),
    ],
)
def test_hand_payoff(cards, first, second, expected):
    first = always(FIRST_INFOSETS, first)
    second = always(SECOND_INFOSETS, second)
    assert hand_payoff(cards, first, second) == expected


def test_check_bet_fold_loses_the_ante():
    first = always(FIRST_INFOSETS, CHECK)
    first.update({(c, (CHECK, BET)): FOLD for c in (JACK, QUEEN, KING)})
    second = always(SECOND_INFOSETS, BET)
    assert hand_payoff((KING, JACK), first, second) == -1


def test_payoff_matrix_covers_all_pure_strategies():
    firsts, seconds, matrix = payoff_matrix()
    assert len(firsts) == len(seconds) == 64
    assert matrix.shape == (64, 64)


def test_passive_play_is_worth_nothing_to_either_side():
    first = always(FIRST_INFOSETS, CHECK)
    first.update({(c, (CHECK, BET)): CALL for c in (JACK, QUEEN, KING)})
    second = always(SECOND_INFOSETS, CHECK)
    second.update({(c, (BET,)): CALL for c in (JACK, QUEEN, KING)})
    assert strategy_value(first, second) == 0


def test_game_value_is_minus_one_eighteenth(solution):
    assert solution.exact_value == Fraction(-1, 18)
    assert solution.value == pytest.approx(GAME_VALUE, abs=TOLERANCE)


@pytest.mark.parametrize(
    "infoset,expected",
    [
        ((KING, (BET,)), 1.0),
        ((QUEEN, (BET,)), 1 / 3),
        ((JACK, (BET,)), 0.0),
        ((KING, (CHECK,)), 1.0),
        ((QUEEN, (CHECK,)), 0.0),
        ((JACK, (CHECK,)), 1 / 3),
    ],
)
def test_second_actor_equilibrium_is_unique(solution, infoset, expected):
    assert solution.second[infoset] == pytest.approx(expected, abs=TOLERANCE)


def test_first_actor_never_opens_with_the_queen(solution):
    assert solution.first[(QUEEN, ())] == pytest.approx(0.0, abs=TOLERANCE)
    assert solution.first[(KING, ())] == pytest.approx(
        3 * solution.first[(JACK, ())], abs=TOLERANCE
    )


def test_best_response_of_the_second_actor_gains_the_game_value(solution):
    response, value = best_response(solution.first, seat=1)
    assert value == pytest.approx(-GAME_VALUE, abs=TOLERANCE)
    assert response[(KING, (BET,))] == CALL
    assert response[(JACK, (BET,))] == FOLD


def test_best_response_of_the_first_actor_gains_the_game_value(solution):
    response, value = best_response(solution.second, seat=0)
    assert value == pytest.approx(GAME_VALUE, abs=TOLERANCE)
    assert response[(KING, (CHECK, BET))] == CALL
    assert response[(JACK, (CHECK, BET))] == FOLD


def test_best_response_exploits_a_player_who_always_bets():
    bettor = {infoset: 1.0 for infoset in FIRST_INFOSETS}
    response, value = best_response(bettor, seat=1)
    assert response[(QUEEN, (BET,))] == CALL
    # (K calls: +2 +2, Q calls: -2 +2, J folds: -1 -1) / 6
    assert value == pytest.approx(2 / 6)
