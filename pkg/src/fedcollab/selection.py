"""Greedy conflict-free collaborator selection.

Participants are served in nonincreasing order of their potential (total
benefit offered to others). For each participant i, candidates — the
non-competing nodes whose data would benefit i — are scanned in
nonincreasing benefit order, and a candidate j is accepted iff both
conflict guards for the edge j -> i are empty against the current usage
graph. Accepted edges update the reachability closure immediately, so
later candidates of the same step see them. The result always satisfies
the conflict-freedom constraint, and the per-step scan is O(n^3) for an
O(n^4) total.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Instance, UsageGraph, competitor_guards, conflict_free, potentials


@dataclass(frozen=True)
class CandidateDecision:
    """One accept/reject verdict, with the guard sets seen at decision time."""

    candidate: int
    weight: float
    accepted: bool
    guard_upstream: tuple[int, ...]
    guard_downstream: tuple[int, ...]


@dataclass(frozen=True)
class StepTrace:
    participant: int
    potential: float
    decisions: tuple[CandidateDecision, ...]
    objective: float

    @property
    def accepted(self) -> tuple[int, ...]:
        return tuple(d.candidate for d in self.decisions if d.accepted)


@dataclass(frozen=True)
class SelectionTrace:
    """Full replayable record of a selection run."""

    order: tuple[int, ...]
    steps: tuple[StepTrace, ...]

    @property
    def objective(self) -> float:
        return sum(step.objective for step in self.steps)


def processing_order(instance: Instance) -> list[int]:
    """Participants sorted by nonincreasing potential, ties by index."""
    pot = potentials(instance)
    return sorted(range(instance.n), key=lambda k: (-pot[k], k))


def candidate_collaborators(instance: Instance, i: int) -> list[int]:
    """Nodes that benefit i and do not compete with it, best benefit first.

    Ties are broken by ascending node index; comparisons are exact since
    the weights are inputs, not computed quantities.
    """
    i = instance.check_node(i)
    w = instance.benefit[:, i]
    js = [j for j in range(instance.n) if j != i and w[j] > 0.0 and not instance.competing[j, i]]
    return sorted(js, key=lambda j: (-w[j], j))


def select_step(instance: Instance, usage: UsageGraph, i: int) -> StepTrace:
    """Greedily pick i's collaborators, mutating `usage` in place.

    Requires a conflict-free usage graph on entry (guaranteed when driven
    by :func:`select_collaborators`); a violation here is a programming
    error, not an input condition, hence the hard failure.
    """
    if not conflict_free(instance, usage):
        raise RuntimeError("usage graph already violates conflict freedom before selection step")
    w = instance.benefit[:, i]
    decisions = []
    objective = 0.0
    for j in candidate_collaborators(instance, i):
        if usage.x[j, i]:
            # already authorized by an earlier step; part of the realized value
            objective += float(w[j])
            decisions.append(CandidateDecision(j, float(w[j]), True, (), ()))
            continue
        upstream, downstream = competitor_guards(instance, usage, i, j)
        ok = not upstream and not downstream
        if ok:
            usage.add_edge(j, i)
            objective += float(w[j])
        decisions.append(CandidateDecision(
            candidate=j,
            weight=float(w[j]),
            accepted=ok,
            guard_upstream=tuple(sorted(upstream)),
            guard_downstream=tuple(sorted(downstream)),
        ))
    return StepTrace(participant=i, potential=float(potentials(instance)[i]),
                     decisions=tuple(decisions), objective=objective)


def select_collaborators(instance: Instance) -> tuple[UsageGraph, SelectionTrace]:
    """Run the full selection over all participants.

    Deterministic: two runs on the same instance produce identical usage
    graphs and traces. The returned graph is always conflict-free.
    """
    usage = UsageGraph(instance.n)
    order = processing_order(instance)
    steps = tuple(select_step(instance, usage, i) for i in order)
    return usage, SelectionTrace(order=tuple(order), steps=steps)
