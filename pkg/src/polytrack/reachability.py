"""Trackability decision: witness detection plus the maximal controlled
invariant set fixpoint on the face abstraction.

Abstraction states are ('int', j) for the interior of face j and
('bnd', j, k) with j < k for a shared face boundary. The fixpoint

    W_next = W \\ Reach(Pre2(complement(W)), Pre1(W))

is run on these states: faces holding a witness start outside W, the removal
cascades one adjacency ring per iteration (transitions are intruder-
controlled), and the polygon's connectivity makes the result all-or-nothing:
W* is every face exactly when there is no witness, empty otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .analysis import AnalysisContext, Witness


IntState = tuple[str, int]
BndState = tuple[str, int, int]
State = IntState | BndState


def _bnd(j: int, k: int) -> BndState:
    return ("bnd", min(j, k), max(j, k))


def all_states(automaton) -> set[State]:
    states: set[State] = {("int", m.id) for m in automaton.modes}
    for (j, k) in automaton.transitions:
        states.add(_bnd(j, k))
    return states


def pre1(W: set[State], automaton) -> set[State]:
    """Boundary states both of whose faces stay in W (guards keep control)."""
    return {
        s for s in all_states(automaton)
        if s[0] == "bnd" and ("int", s[1]) in W and ("int", s[2]) in W and s in W
    }


def pre2(Wc: set[State], automaton) -> set[State]:
    """Unsafe interiors plus boundaries from which a transition exits W."""
    out: set[State] = {s for s in Wc if s[0] == "int"}
    for s in all_states(automaton):
        if s[0] == "bnd" and (("int", s[1]) in Wc or ("int", s[2]) in Wc):
            out.add(s)
    return out


def reach(G: set[State], E: set[State], automaton) -> set[State]:
    """States from which the intruder can drive into G while avoiding E."""
    adj: dict[int, set[int]] = {m.id: set(m.sigma) - {m.id} for m in automaton.modes}
    visited = set(G)
    frontier = list(G)
    while frontier:
        s = frontier.pop()
        if s[0] == "bnd":
            nxt = [("int", s[1]), ("int", s[2])]
        else:
            j = s[1]
            nxt = [_bnd(j, k) for k in adj.get(j, ())]
        for t in nxt:
            if t not in visited and t not in E:
                visited.add(t)
                frontier.append(t)
    return visited


@dataclass
class TrackabilityReport:
    trackable: bool
    witnesses: list[Witness]
    forbidden: list[int]            # face ids holding witnesses
    w_star: list[int]               # face ids remaining in W*
    iterations: int
    iteration_trace: list[list[int]] = field(default_factory=list)
    ratio: float = 0.0

    def to_dict(self) -> dict:
        return {
            "trackable": self.trackable,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "iterations": self.iterations,
        }


def find_unsafe_points(ctx: AnalysisContext) -> list[Witness]:
    """Witness list for one context (the direct route to the verdict)."""
    return ctx.witnesses


def maximal_invariant_set(ctx: AnalysisContext) -> TrackabilityReport:
    """Algorithm-style fixpoint over the face abstraction of one context."""
    witnesses = ctx.witnesses
    automaton = ctx.automaton
    partition = ctx.partition
    forbidden = sorted({partition.mode_of(w.point) for w in witnesses})

    states = all_states(automaton)
    W = states - {("int", j) for j in forbidden}
    trace = []
    iterations = 0
    while True:
        iterations += 1
        trace.append(sorted(s[1] for s in W if s[0] == "int"))
        Wc = states - W
        G = pre2(Wc, automaton)
        E = pre1(W, automaton) - G
        R = reach(G, E, automaton)
        W_next = W - R
        if W_next == W:
            break
        W = W_next

    w_star = sorted(s[1] for s in W if s[0] == "int")
    return TrackabilityReport(
        trackable=bool(w_star),
        witnesses=witnesses,
        forbidden=forbidden,
        w_star=w_star,
        iterations=iterations,
        iteration_trace=trace,
        ratio=ctx.ratio,
    )
