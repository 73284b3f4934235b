"""A concrete winning strategy for the duplicator on ambient structures.

After round i of an n-round game the duplicator maintains an isomorphism
alpha_i between the radius-5^(n-i) balls around the chosen elements on the
two sides. A new pick x is answered in one of two ways:

* restriction: if the ball of radius 5^(n-i-1) around x stays within distance
  5^(n-i) - 1 of the old picks, x is answered through alpha_i, and alpha_{i+1}
  is alpha_i restricted to the shrunken ball;
* disjoint copy: otherwise x's small ball is disjoint from the old picks'
  small balls, and the duplicator scans the other side outward from its base
  point for a center whose small ball is center-isomorphic to x's and disjoint
  from the image of the old small balls, then glues that isomorphism onto the
  restriction of alpha_i.

Both sides' structures must have the duplicate substructure property for the
scan to succeed; the scan is capped at distance 4 * 5^n and raises
BudgetError beyond it. Every move re-verifies the invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .ambient import AmbientGenerator, ball_of_set
from .errors import BudgetError, ValidationError
from .morphisms import find_embeddings


@dataclass(frozen=True)
class StrategyState:
    """Game position: picked pairs so far plus the maintained ball isomorphism.

    ``alpha`` maps left ambient ids to right ambient ids; its domain is the
    radius-5^(n-i) ball around the left picks (empty before the first round).
    """

    left: AmbientGenerator
    right: AmbientGenerator
    rounds: int
    round_index: int
    pairs: Tuple[Tuple[str, str], ...]
    alpha: Tuple[Tuple[str, str], ...]

    def radius(self) -> int:
        return 5 ** (self.rounds - self.round_index)

    def alpha_dict(self) -> Dict[str, str]:
        return dict(self.alpha)


def initial_state(
    left: AmbientGenerator, right: AmbientGenerator, rounds: int
) -> StrategyState:
    if rounds < 1:
        raise ValidationError("the game needs at least one round")
    if left.vocabulary != right.vocabulary:
        raise ValidationError("the two sides must share a vocabulary")
    return StrategyState(left, right, rounds, 0, (), ())


def _ball_iso_map(
    left: AmbientGenerator,
    right: AmbientGenerator,
    l_center: str,
    r_center: str,
    radius: int,
) -> Optional[Dict[str, str]]:
    """A center-matching isomorphism between two ambient balls, if one exists."""
    pl = ball_of_set(left, [l_center], radius)
    pr = ball_of_set(right, [r_center], radius)
    if pl.structure.size != pr.structure.size:
        return None
    anchor = {pl.centers[0][1]: pr.centers[0][1]}
    found = find_embeddings(pl.structure, pr.structure, limit=1, anchor=anchor)
    if not found:
        return None
    mapping = found[0].mapping
    return {pl.ids[i]: pr.ids[mapping[i]] for i in range(pl.structure.size)}


def verify_state(state: StrategyState) -> dict:
    """Re-check the invariant: alpha is a ball isomorphism around the picks.

    Returns a report dict with an overall "ok" plus the individual checks.
    """
    n, i = state.rounds, state.round_index
    report = {
        "round_index": i,
        "radius": state.radius(),
        "pairs_consistent": True,
        "domain_ok": True,
        "image_ok": True,
        "bijective": True,
        "tuples_ok": True,
        "ok": True,
    }
    if i == 0:
        report["ok"] = not state.pairs and not state.alpha
        report["pairs_consistent"] = report["ok"]
        return report
    r = state.radius()
    alpha = state.alpha_dict()
    lefts = [l for l, _ in state.pairs]
    rights = [rv for _, rv in state.pairs]
    if any(alpha.get(l) != rv for l, rv in state.pairs):
        report["pairs_consistent"] = False
    dom = set(state.left.ball_ids(sorted(set(lefts), key=state.left.sort_key), r))
    if set(alpha) != dom:
        report["domain_ok"] = False
    img = set(state.right.ball_ids(sorted(set(rights), key=state.right.sort_key), r))
    values = list(alpha.values())
    if len(set(values)) != len(values):
        report["bijective"] = False
    if set(values) != img:
        report["image_ok"] = False
    # tuple preservation both ways across alpha
    if report["domain_ok"] and report["image_ok"] and report["bijective"]:
        inv = {v: k for k, v in alpha.items()}
        for u in alpha:
            for rel, tup in state.left.incident_tuples(u):
                if all(w in alpha for w in tup):
                    if not state.right.has_tuple(rel, tuple(alpha[w] for w in tup)):
                        report["tuples_ok"] = False
                        break
            if not report["tuples_ok"]:
                break
        if report["tuples_ok"]:
            for v in inv:
                for rel, tup in state.right.incident_tuples(v):
                    if all(w in inv for w in tup):
                        if not state.left.has_tuple(rel, tuple(inv[w] for w in tup)):
                            report["tuples_ok"] = False
                            break
                if not report["tuples_ok"]:
                    break
    report["ok"] = all(
        report[k]
        for k in ("pairs_consistent", "domain_ok", "image_ok", "bijective", "tuples_ok")
    )
    return report


def duplicator_strategy_move(
    state: StrategyState,
    spoiler_pick: Tuple[str, str],
    scan_cap: Optional[int] = None,
) -> Tuple[str, StrategyState]:
    """Answer a spoiler pick (side, vertex-id); returns (response, next state)."""
    side, pick = spoiler_pick
    if side not in ("left", "right"):
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    if state.round_index >= state.rounds:
        raise ValidationError("the game is already over")
    if side == "right":
        mirrored = StrategyState(
            state.right,
            state.left,
            state.rounds,
            state.round_index,
            tuple((b, a) for a, b in state.pairs),
            tuple((b, a) for a, b in state.alpha),
        )
        resp, nxt = duplicator_strategy_move(mirrored, ("left", pick), scan_cap)
        return resp, StrategyState(
            state.left,
            state.right,
            nxt.rounds,
            nxt.round_index,
            tuple((b, a) for a, b in nxt.pairs),
            tuple((b, a) for a, b in nxt.alpha),
        )

    left, right = state.left, state.right
    left.validate_id(pick)
    n, i = state.rounds, state.round_index
    r = 5 ** (n - i)
    r_small = 5 ** (n - i - 1)
    alpha = state.alpha_dict()
    lefts = sorted({l for l, _ in state.pairs}, key=left.sort_key)
    rights = sorted({rv for _, rv in state.pairs}, key=right.sort_key)

    pick_ball = left.ball_ids([pick], r_small)

    if state.pairs:
        old_dist = left.ball_ids(lefts, r - 1)
        near = all(z in old_dist for z in pick_ball)
    else:
        near = False

    if near:
        response = alpha[pick]
        centers = sorted({pick, *lefts}, key=left.sort_key)  # pick may repeat
        small_dom = left.ball_ids(centers, r_small)
        new_alpha = {u: alpha[u] for u in small_dom}
    else:
        if state.pairs:
            # the pick's small ball must be disjoint (distance >= 2) from the
            # old picks' small balls for the glued map to stay an isomorphism
            old_small = left.ball_ids(lefts, r_small)
            for z in pick_ball:
                for w in old_small:
                    if left.distance(z, w) <= 1:
                        raise ValidationError(
                            "pick is neither deep inside the old ball nor "
                            "small-ball disjoint from the old picks"
                        )
        cap = scan_cap if scan_cap is not None else 4 * 5**n
        image_small = (
            {alpha[u] for u in left.ball_ids(lefts, r_small)} if state.pairs else set()
        )
        response = None
        beta: Optional[Dict[str, str]] = None
        for d in range(cap + 1):
            for cand in right.sphere(right.base_point, d):
                cand_ball = right.ball_ids([cand], r_small)
                if any(
                    right.distance(u, v) <= 1 for u in cand_ball for v in image_small
                ):
                    continue
                beta = _ball_iso_map(left, right, pick, cand, r_small)
                if beta is not None:
                    response = cand
                    break
            if response is not None:
                break
        if response is None:
            raise BudgetError(
                f"no disjoint isomorphic ball found within distance {cap} "
                "of the base point"
            )
        new_alpha = {u: alpha[u] for u in left.ball_ids(lefts, r_small)} if state.pairs else {}
        new_alpha.update(beta)

    nxt = StrategyState(
        left,
        right,
        n,
        i + 1,
        state.pairs + ((pick, response),),
        tuple(sorted(new_alpha.items())),
    )
    report = verify_state(nxt)
    if not report["ok"]:
        raise ValidationError(f"strategy invariant broken after move: {report}")
    return response, nxt


def play_game(
    left: AmbientGenerator,
    right: AmbientGenerator,
    rounds: int,
    script: List[Tuple[str, str]],
    scan_cap: Optional[int] = None,
) -> dict:
    """Play a scripted game; returns a transcript with per-move verification."""
    if len(script) != rounds:
        raise ValidationError(f"script must have exactly {rounds} moves")
    state = initial_state(left, right, rounds)
    moves = []
    for side, pick in script:
        response, state = duplicator_strategy_move(state, (side, pick), scan_cap)
        moves.append(
            {
                "side": side,
                "pick": pick,
                "response": response,
                "radius": state.radius(),
                "verified": verify_state(state)["ok"],
            }
        )
    final = verify_state(state)
    win = final["ok"] and _pairs_partial_iso(left, right, state.pairs)
    return {
        "rounds": rounds,
        "moves": moves,
        "final_state_ok": final["ok"],
        "pairs": [list(p) for p in state.pairs],
        "win": win,
    }


def _pairs_partial_iso(
    left: AmbientGenerator, right: AmbientGenerator, pairs: Tuple[Tuple[str, str], ...]
) -> bool:
    # repeated picks are fine only if they repeat their partner too
    fwd: Dict[str, str] = {}
    bwd: Dict[str, str] = {}
    for a, b in pairs:
        if fwd.get(a, b) != b or bwd.get(b, a) != a:
            return False
        fwd[a] = b
        bwd[b] = a
    for u in fwd:
        for rel, tup in left.incident_tuples(u):
            if all(w in fwd for w in tup):
                if not right.has_tuple(rel, tuple(fwd[w] for w in tup)):
                    return False
    for v in bwd:
        for rel, tup in right.incident_tuples(v):
            if all(w in bwd for w in tup):
                if not left.has_tuple(rel, tuple(bwd[w] for w in tup)):
                    return False
    return True
