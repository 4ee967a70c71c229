import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fedcollab.graphs import (Instance, InvalidInstanceError, PathWitness, UsageGraph,
                              competitor_guards, conflict_free, conflict_violations,
                              potentials)

from conftest import bfs_reachable, closure_by_floyd_warshall, make_instance, make_usage


def instance_no_competition(w: np.ndarray) -> Instance:
    n = w.shape[0]
    return Instance(n, np.zeros((n, n), dtype=bool), w)


class TestInstanceValidation:
    def test_rejects_nonpositive_n(self):
        with pytest.raises(InvalidInstanceError):
            Instance(0, np.zeros((0, 0), bool), np.zeros((0, 0)))

    def test_rejects_asymmetric_competition(self):
        s = np.zeros((3, 3), bool)
        s[0, 1] = True
        with pytest.raises(InvalidInstanceError, match="symmetric"):
            Instance(3, s, np.zeros((3, 3)))

    def test_rejects_competition_self_loops(self):
        s = np.eye(3, dtype=bool)
        with pytest.raises(InvalidInstanceError, match="diagonal"):
            Instance(3, s, np.zeros((3, 3)))

    def test_rejects_complete_competition(self):
        s = ~np.eye(2, dtype=bool)
        with pytest.raises(InvalidInstanceError, match="complete"):
            Instance(2, s, np.zeros((2, 2)))

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf, -0.5])
    def test_rejects_bad_weights(self, bad):
        w = np.zeros((2, 2))
        w[0, 1] = bad
        with pytest.raises(InvalidInstanceError):
            Instance(2, np.zeros((2, 2), bool), w)

    def test_benefit_diagonal_ignored(self):
        w = np.full((2, 2), 3.0)
        inst = Instance(2, np.zeros((2, 2), bool), w)
        assert inst.benefit[0, 0] == 0.0 and inst.benefit[1, 1] == 0.0

    def test_arrays_frozen(self, rng):
        inst = make_instance(rng, 4)
        with pytest.raises(ValueError):
            inst.competing[0, 1] = True
        with pytest.raises(ValueError):
            inst.benefit[0, 1] = 2.0


class TestPotentials:
    def test_empty_benefit(self):
        assert potentials(instance_no_competition(np.zeros((3, 3)))).tolist() == [0, 0, 0]

    def test_single_edge(self):
        w = np.zeros((2, 2))
        w[0, 1] = 2.5
        assert potentials(instance_no_competition(w)).tolist() == [2.5, 0.0]

    def test_matches_row_sum_oracle(self):
        rng = np.random.default_rng(7)
        w = rng.uniform(0, 1, (5, 5))
        inst = instance_no_competition(w)
        expected = [sum(inst.benefit[i, j] for j in range(5) if j != i) for i in range(5)]
        assert potentials(inst).tolist() == pytest.approx(expected, abs=0)


class TestReachability:
    def test_identity(self):
        usage = UsageGraph(4)
        for i in range(4):
            assert usage.reachable_from(i) == {i}
            assert usage.reachable_to(i) == {i}

    def test_chain(self):
        usage = UsageGraph(3).add_edge(0, 1).add_edge(1, 2)
        assert usage.reachable_from(0) == {0, 1, 2}
        assert usage.reachable_to(2) == {0, 1, 2}
        assert usage.reachable_from(2) == {2}

    def test_random_matches_bfs(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(2, 9))
            usage = make_usage(rng, n, max_edges=2 * n)
            for i in range(n):
                assert usage.reachable_from(i) == bfs_reachable(usage.x, i)
                assert usage.reachable_to(i) == bfs_reachable(usage.x.T, i)

    def test_index_errors(self):
        usage = UsageGraph(3)
        with pytest.raises(IndexError):
            usage.reachable_from(3)
        with pytest.raises(IndexError):
            usage.reachable_to(-1)


class TestCompetitorGuards:
    def test_empty_competition_gives_empty_guards(self, rng):
        inst = make_instance(rng, 5, edge_prob=0.0)
        usage = make_usage(rng, 5, max_edges=8)
        for i in range(5):
            for j in range(5):
                if i != j:
                    assert competitor_guards(inst, usage, i, j) == (frozenset(), frozenset())

    def test_competing_pair_worked_case(self):
        # competitors 0 and 1 plus an isolated third node
        s = np.zeros((3, 3), bool)
        s[0, 1] = s[1, 0] = True
        w = np.zeros((3, 3))
        w[0, 1] = 1.0
        inst = Instance(3, s, w)
        upstream, downstream = competitor_guards(inst, UsageGraph(3), i=1, j=0)
        # node 1 competes with 0 (which trivially reaches itself as j's
        # only ancestor) and is reachable from i=1
        assert upstream == frozenset({1})
        assert downstream == frozenset({0})

    def test_definitional_and_intersection_forms_agree(self):
        rng = np.random.default_rng(3)
        for _ in range(60):
            inst = make_instance(rng, 6, edge_prob=0.3)
            usage = make_usage(rng, 6, max_edges=10)
            c, s = usage.closure, inst.competing
            for i in range(6):
                for j in range(6):
                    if i == j:
                        continue
                    # definitional: competitors of ancestors/descendants, filtered
                    ancestors_j = {k for k in range(6) if c[k, j]}
                    comp_of_anc = {k for k in range(6) if any(s[k, p] for p in ancestors_j)}
                    upstream_def = frozenset(k for k in comp_of_anc if c[i, k])
                    descendants_i = {k for k in range(6) if c[i, k]}
                    comp_of_desc = {k for k in range(6) if any(s[p, k] for p in descendants_i)}
                    downstream_def = frozenset(k for k in comp_of_desc if c[k, j])
                    # intersection: descendants/ancestors intersected with them
                    upstream_int = frozenset(descendants_i & comp_of_anc)
                    downstream_int = frozenset(ancestors_j & comp_of_desc)
                    assert upstream_def == upstream_int
                    assert downstream_def == downstream_int
                    assert competitor_guards(inst, usage, i, j) == (upstream_def, downstream_def)

    def test_distinct_node_requirement(self, rng):
        inst = make_instance(rng, 3)
        with pytest.raises(ValueError):
            competitor_guards(inst, UsageGraph(3), 1, 1)
        with pytest.raises(IndexError):
            competitor_guards(inst, UsageGraph(3), 0, 5)


class TestConflictFree:
    def test_identity_always_free(self, rng):
        inst = make_instance(rng, 6, edge_prob=0.5)
        assert conflict_free(inst, UsageGraph(6))

    def test_enemy_of_friend_pattern(self):
        s = np.zeros((3, 3), bool)
        s[0, 2] = s[2, 0] = True
        w = np.ones((3, 3))
        inst = Instance(3, s, w)
        usage = UsageGraph(3).add_edge(0, 1).add_edge(1, 2)
        assert not conflict_free(inst, usage)
        violations = conflict_violations(inst, usage)
        assert (0, 2) in [(j, i) for j, i, _ in violations]
        witness = [wit for j, i, wit in violations if (j, i) == (0, 2)][0]
        assert witness.nodes == (0, 1, 2)

    def test_label_permutation_invariance(self):
        rng = np.random.default_rng(13)
        for _ in range(40):
            n = int(rng.integers(2, 8))
            inst = make_instance(rng, n, edge_prob=0.4)
            usage = make_usage(rng, n, max_edges=2 * n)
            perm = rng.permutation(n)
            inv = np.argsort(perm)
            inst_p = Instance(n, inst.competing[np.ix_(perm, perm)],
                              inst.benefit[np.ix_(perm, perm)])
            usage_p = UsageGraph.from_edges(
                n, [(inv[j], inv[i]) for j, i in usage.edges()])
            assert conflict_free(inst, usage) == conflict_free(inst_p, usage_p)


class TestClosureMaintenance:
    def test_single_edge_closure_delta(self):
        usage = UsageGraph(3).add_edge(0, 1)
        expected = np.eye(3, dtype=bool)
        expected[0, 1] = True
        assert np.array_equal(usage.closure, expected)

    def test_chain_transitivity(self):
        usage = UsageGraph(3).add_edge(0, 1).add_edge(1, 2)
        assert usage.closure[0, 2]

    def test_random_insertions_match_floyd_warshall(self):
        rng = np.random.default_rng(19)
        usage = UsageGraph(8)
        pool = [(j, i) for j in range(8) for i in range(8) if j != i]
        rng.shuffle(pool)
        for j, i in pool[:50]:
            usage.add_edge(j, i)
            assert np.array_equal(usage.closure, closure_by_floyd_warshall(usage.x))

    def test_self_and_duplicate_edges_rejected(self):
        usage = UsageGraph(3).add_edge(0, 1)
        with pytest.raises(ValueError, match="self"):
            usage.add_edge(1, 1)
        with pytest.raises(ValueError, match="already"):
            usage.add_edge(0, 1)

    def test_copy_isolates_state(self):
        usage = UsageGraph(3).add_edge(0, 1)
        dup = usage.copy()
        dup.add_edge(1, 2)
        assert not usage.x[1, 2] and not usage.closure[0, 2]


@st.composite
def edge_sequences(draw):
    n = draw(st.integers(min_value=2, max_value=7))
    pool = [(j, i) for j in range(n) for i in range(n) if j != i]
    picks = draw(st.lists(st.sampled_from(pool), max_size=len(pool), unique=True))
    return n, picks


@settings(max_examples=60, deadline=None)
@given(edge_sequences())
def test_closure_exact_after_any_edge_sequence(seq):
    n, picks = seq
    usage = UsageGraph(n)
    for j, i in picks:
        usage.add_edge(j, i)
    from conftest import closure_by_squaring

    assert np.array_equal(usage.closure, closure_by_squaring(usage.x))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_unreachable_in_benefit_stays_unreachable_in_usage(seed):
    # usage graphs restricted to the benefit support can never connect
    # nodes the benefit graph does not connect
    rng = np.random.default_rng(seed)
    inst = make_instance(rng, int(rng.integers(2, 8)), density=0.4)
    benefit_support = inst.benefit > 0
    usage = make_usage(rng, inst.n, allowed=benefit_support)
    from conftest import closure_by_squaring

    benefit_reach = closure_by_squaring(benefit_support)
    assert not (usage.closure & ~benefit_reach).any()


class TestPathWitness:
    def test_validation(self):
        with pytest.raises(ValueError):
            PathWitness((1,))
        with pytest.raises(ValueError):
            PathWitness((1, 2, 1))
        assert PathWitness((0, 2, 1)).length == 2

    def test_witness_is_a_selected_path(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 9))
            usage = make_usage(rng, n, max_edges=2 * n)
            for j in range(n):
                for i in range(n):
                    if i == j:
                        continue
                    witness = usage.path_witness(j, i)
                    if usage.closure[j, i]:
                        assert witness is not None
                        assert witness.nodes[0] == j and witness.nodes[-1] == i
                        for a, b in zip(witness.nodes, witness.nodes[1:]):
                            assert usage.x[a, b]
                    else:
                        assert witness is None
