import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from scatteropt.topology import (
    Bar,
    MergeTree,
    MergeTreeNode,
    ThresholdPlot,
    auc,
    auc_bins,
    build_merge_tree,
    saliency,
    saliency_bins,
    threshold_plot,
)


def flood_fill_count(field, tau):
    """Oracle: number of 8-connected components of cells with value > tau."""
    rows, cols = field.shape
    seen = np.zeros_like(field, dtype=bool)
    count = 0
    for r0 in range(rows):
        for c0 in range(cols):
            if seen[r0, c0] or field[r0, c0] <= tau:
                continue
            count += 1
            stack = [(r0, c0)]
            seen[r0, c0] = True
            while stack:
                r, c = stack.pop()
                for dr in (-1, 0, 1):
                    for dc in (-1, 0, 1):
                        nr, nc = r + dr, c + dc
                        if 0 <= nr < rows and 0 <= nc < cols:
                            if not seen[nr, nc] and field[nr, nc] > tau:
                                seen[nr, nc] = True
                                stack.append((nr, nc))
    return count


def tree_count_at(tree, tau):
    """Components alive at density threshold tau, reconstructed from the tree."""
    return sum(1 for n in tree.nodes if n.birth > tau >= n.death)


small_fields = arrays(
    dtype=np.float64,
    shape=st.tuples(st.integers(2, 8), st.integers(2, 8)),
    elements=st.integers(0, 9).map(float),
)


class TestBuildMergeTree:
    def test_all_zero_field(self):
        tree = build_merge_tree(np.zeros((20, 20)))
        assert tree.nodes == ()
        assert tree.root is None

    def test_single_cell(self):
        field = np.zeros((20, 20))
        field[3, 7] = 0.5
        tree = build_merge_tree(field)
        assert len(tree.nodes) == 1
        node = tree.nodes[0]
        assert node.birth == 0.5
        assert node.death == 0.0
        assert node.persistence == 0.5
        assert node.birth_cell == 3 * 20 + 7

    def test_two_peak_row(self):
        # Row 0,3,1,5,0: flood fill at thresholds {5,3,1,0+} gives 1,2,2,1
        # components, so peaks persist (5,0) and (3,1).
        field = np.array([[0.0, 3.0, 1.0, 5.0, 0.0]])
        tree = build_merge_tree(field)
        pairs = sorted((n.birth, n.death) for n in tree.nodes)
        assert pairs == [(3.0, 1.0), (5.0, 0.0)]
        assert [tree_count_at(tree, t) for t in (5, 3, 1, 0)] == [0, 1, 2, 1]
        assert tree.nodes[tree.root].death == 0.0

    def test_plateau_is_one_node(self):
        field = np.array([[3.0, 3.0, 5.0]])
        tree = build_merge_tree(field)
        assert len(tree.nodes) == 1
        assert tree.nodes[0].birth == 5.0

    def test_two_plateaus_same_level(self):
        field = np.array([[5.0, 3.0, 5.0]])
        tree = build_merge_tree(field)
        pairs = sorted((n.birth, n.death) for n in tree.nodes)
        assert pairs == [(5.0, 0.0), (5.0, 3.0)]

    def test_disconnected_supports_all_survive(self):
        field = np.zeros((5, 5))
        field[0, 0] = 4.0
        field[4, 4] = 2.0
        tree = build_merge_tree(field)
        assert sorted(n.death for n in tree.nodes) == [0.0, 0.0]
        assert tree.nodes[tree.root].birth == 4.0

    def test_oracle_equivalence_random_fields(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            field = rng.integers(0, 10, size=(8, 8)).astype(float)
            tree = build_merge_tree(field)
            for tau in np.arange(0.0, 9.5, 0.5):
                assert tree_count_at(tree, tau) == flood_fill_count(field, tau)

    @given(small_fields)
    @settings(max_examples=150, deadline=None)
    def test_oracle_equivalence_property(self, field):
        tree = build_merge_tree(field)
        for tau in (0.0, 0.5, 2.0, 4.5, 8.0):
            assert tree_count_at(tree, tau) == flood_fill_count(field, tau)

    @given(small_fields)
    @settings(max_examples=100, deadline=None)
    def test_positive_persistence_and_single_designated_root(self, field):
        tree = build_merge_tree(field)
        assert all(n.persistence > 0 for n in tree.nodes)
        if field.max() > 0:
            assert tree.nodes[tree.root].death == 0.0
            assert tree.nodes[tree.root].birth == field.max()

    @given(small_fields, st.floats(0.1, 50.0))
    @settings(max_examples=100, deadline=None)
    def test_shifting_support_preserves_node_count(self, field, shift):
        tree = build_merge_tree(field)
        shifted = np.where(field > 0, field + shift, 0.0)
        assert len(build_merge_tree(shifted).nodes) == len(tree.nodes)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            build_merge_tree(np.zeros(5))
        with pytest.raises(ValueError):
            build_merge_tree(np.array([[1.0, -0.5]]))


def tree_of(pairs):
    nodes = tuple(MergeTreeNode(birth=b, death=d, birth_cell=i) for i, (b, d) in enumerate(pairs))
    root = max(range(len(nodes)), key=lambda i: nodes[i].birth) if nodes else None
    return MergeTree(nodes=nodes, root=root)


class TestThresholdPlot:
    def test_empty_tree(self):
        plot = threshold_plot(MergeTree(nodes=(), root=None))
        assert plot.bars == ()
        assert plot.domain_max == 0.0

    def test_single_node(self):
        plot = threshold_plot(tree_of([(0.5, 0.0)]))
        assert plot.bars == (Bar(count=1, t_min=0.0, t_max=0.5),)
        assert plot.bars[0].saliency == 0.5

    def test_two_nodes(self):
        # Persistences {5, 2}: count(t) is 2 on [0,2) and 1 on [2,5].
        plot = threshold_plot(tree_of([(5.0, 0.0), (3.0, 1.0)]))
        assert plot.bars == (
            Bar(count=2, t_min=0.0, t_max=2.0),
            Bar(count=1, t_min=2.0, t_max=5.0),
        )
        assert plot.domain_max == 5.0

    def test_duplicate_persistences_merge_into_one_boundary(self):
        plot = threshold_plot(tree_of([(2.0, 0.0), (3.0, 1.0), (5.0, 0.0)]))
        assert [b.count for b in plot.bars] == [3, 1]

    @given(st.lists(st.tuples(st.floats(0.1, 10.0), st.floats(0.0, 0.09)), max_size=12))
    @settings(max_examples=150, deadline=None)
    def test_step_function_properties(self, pairs):
        plot = threshold_plot(tree_of(pairs))
        counts = [b.count for b in plot.bars]
        assert counts == sorted(counts, reverse=True)
        assert len(set(counts)) == len(counts)
        # Bars partition [0, domain_max].
        if plot.bars:
            assert plot.bars[0].t_min == 0.0
            assert plot.bars[-1].t_max == plot.domain_max
            for a, b in zip(plot.bars, plot.bars[1:]):
                assert a.t_max == b.t_min

    @given(st.lists(st.tuples(st.floats(0.1, 10.0), st.floats(0.0, 0.09)), max_size=12))
    @settings(max_examples=150, deadline=None)
    def test_auc_equals_total_persistence(self, pairs):
        tree = tree_of(pairs)
        assert auc(threshold_plot(tree)) == pytest.approx(tree.persistences().sum(), abs=1e-12)


class TestSaliency:
    def setup_method(self):
        self.plot = threshold_plot(tree_of([(5.0, 0.0), (3.0, 1.0)]))

    def test_unrestricted_takes_longest_bar(self):
        score = saliency(self.plot)
        assert score.value == 3.0
        assert score.count == 1

    def test_range_restriction(self):
        score = saliency(self.plot, cluster_range=(2, 10))
        assert score.value == 2.0
        assert score.count == 2

    def test_empty_plot(self):
        score = saliency(ThresholdPlot(bars=(), domain_max=0.0))
        assert score.value == 0.0

    def test_out_of_range_yields_zero(self):
        score = saliency(self.plot, cluster_range=(7, 9))
        assert score.value == 0.0

    def test_ties_prefer_smaller_count(self):
        plot = threshold_plot(tree_of([(2.0, 0.0), (4.0, 0.0)]))  # bars of length 2 and 2
        score = saliency(plot)
        assert score.value == 2.0
        assert score.count == 1


class TestAuc:
    def test_empty(self):
        assert auc(ThresholdPlot(bars=(), domain_max=0.0)) == 0.0

    def test_single(self):
        assert auc(threshold_plot(tree_of([(0.5, 0.0)]))) == 0.5

    def test_two_nodes(self):
        assert auc(threshold_plot(tree_of([(5.0, 0.0), (3.0, 1.0)]))) == 7.0


class TestBins:
    def test_auc_bins_equal_width(self):
        bins = auc_bins(list(np.linspace(0.0, 9.0, 10)))
        assert bins.edges == (3.0, 6.0)
        assert bins.classify(1.0, 8.0) == "DS"
        assert bins.classify(1.0, 2.0) == "SR"
        assert bins.classify(2.0, 4.0) == "SS"

    def test_auc_bins_rejects_constant(self):
        with pytest.raises(ValueError):
            auc_bins([2.0, 2.0, 2.0])

    def test_auc_bins_population_method(self):
        bins = auc_bins([0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 100.0], method="population")
        assert bins.edges[0] == pytest.approx(2.0)
        assert bins.index(50.0) == 2

    def test_saliency_bins_match_published_example(self):
        bins = saliency_bins([0.0, 0.02, 0.05, 0.1])
        assert bins.edges[0] == pytest.approx(0.1 / 3)
        assert bins.edges[1] == pytest.approx(0.2 / 3)
        assert bins.label(0.0) == "Low"
        assert bins.label(0.05) == "Medium"
        assert bins.label(0.1) == "High"

    def test_saliency_bins_rejects_all_zero(self):
        with pytest.raises(ValueError):
            saliency_bins([0.0, 0.0])


class TestScaleEquivariance:
    @given(small_fields, st.sampled_from([0.5, 2.0, 10.0]))
    @settings(max_examples=100, deadline=None)
    def test_scaling_field_scales_everything(self, field, c):
        tree = build_merge_tree(field)
        scaled = build_merge_tree(c * field)
        assert len(scaled.nodes) == len(tree.nodes)
        for a, b in zip(tree.nodes, scaled.nodes):
            assert b.birth == pytest.approx(c * a.birth, rel=1e-9)
            assert b.death == pytest.approx(c * a.death, rel=1e-9)
            assert b.persistence == pytest.approx(c * a.persistence, rel=1e-9)
        plot, splot = threshold_plot(tree), threshold_plot(scaled)
        assert auc(splot) == pytest.approx(c * auc(plot), rel=1e-9)
        if plot.bars:
            assert saliency(splot).value == pytest.approx(c * saliency(plot).value, rel=1e-9)
            assert saliency(splot).count == saliency(plot).count


def test_plot_json_roundtrip_shape():
    plot = threshold_plot(tree_of([(5.0, 0.0), (3.0, 1.0)]))
    doc = plot.to_json()
    assert doc["domain_max"] == 5.0
    assert doc["auc"] == 7.0
    assert doc["bars"][0] == {"count": 2, "t_min": 0.0, "t_max": 2.0, "saliency": 2.0}
