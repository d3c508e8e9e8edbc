import numpy as np
import pytest

from osclab.errors import BadCut, EmptyInterval, ZeroDim
from osclab.lattice import decompose, distance, make_box


def test_single_site_box():
    box = make_box([(0, 0)])
    assert box.n_sites == 1
    assert box.edges() == []


def test_chain_sites_edges_distance():
    box = make_box([(0, 4)])
    assert box.n_sites == 5
    assert box.edges() == [(0, 1), (1, 2), (2, 3), (3, 4)]
    assert distance(box.site(0), box.site(4)) == 4


def test_2x3_grid_edges_by_hand():
    box = make_box([(0, 1), (0, 2)])
    assert box.n_sites == 6
    # enumeration: (0,0) (0,1) (0,2) (1,0) (1,1) (1,2)
    expected = {
        (0, 3), (1, 4), (2, 5),          # along axis 0
        (0, 1), (1, 2), (3, 4), (4, 5),  # along axis 1
    }
    assert set(box.edges()) == expected
    assert len(box.edges()) == 7


def test_distance_examples():
    assert distance((3, 7), (3, 7)) == 0
    assert distance((0, 0), (1, 2)) == 3


@pytest.mark.parametrize(
    "intervals",
    [[(0, 3)], [(0, 1), (0, 2)], [(-2, 1), (5, 7)], [(0, 3), (0, 3), (0, 3)]],
)
def test_index_site_inverse(intervals):
    box = make_box(intervals)
    for i in range(box.n_sites):
        assert box.index(box.site(i)) == i
    seen = {box.site(i) for i in range(box.n_sites)}
    assert len(seen) == box.n_sites


def test_lexicographic_last_fastest():
    box = make_box([(0, 1), (0, 2)])
    assert [box.site(i) for i in range(6)] == [
        (0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2),
    ]


def test_every_edge_unit_distance():
    box = make_box([(0, 2), (0, 2), (0, 1)])
    edges = box.edges()
    assert len(edges) == len(set(edges))
    for i, j in edges:
        assert distance(box.site(i), box.site(j)) == 1
    # count: all unit-distance pairs must appear
    n_pairs = sum(
        1
        for i in range(box.n_sites)
        for j in range(i + 1, box.n_sites)
        if distance(box.site(i), box.site(j)) == 1
    )
    assert len(edges) == n_pairs


@pytest.mark.parametrize("intervals", [[(0, 1), (0, 2)], [(0, 2), (0, 2)], [(0, 1), (0, 1), (0, 1)]])
def test_edges_invariant_under_reflection(intervals):
    box = make_box(intervals)
    for axis in range(box.dim):
        a, b = box.intervals[axis]

        def reflect(site):
            return tuple(
                a + b - c if ax == axis else c for ax, c in enumerate(site)
            )

        mapped = {
            tuple(sorted((box.index(reflect(box.site(i))), box.index(reflect(box.site(j))))))
            for i, j in box.edges()
        }
        assert mapped == {tuple(sorted(e)) for e in box.edges()}


def test_box_errors():
    with pytest.raises(EmptyInterval):
        make_box([(3, 1)])
    with pytest.raises(ZeroDim):
        make_box([])


def test_decompose_1d_single_cut():
    box = make_box([(0, 9)])
    dec = decompose(box, [[5]])
    assert [blk.intervals for blk in dec.blocks] == [((0, 4),), ((5, 9),)]
    assert dec.block_of(box.index((4,))) == 0
    assert dec.block_of(box.index((5,))) == 1


def test_decompose_no_cuts_is_parent():
    box = make_box([(0, 9)])
    dec = decompose(box, [[]])
    assert dec.n_blocks == 1
    assert dec.blocks[0] == box


def test_decompose_singletons():
    box = make_box([(0, 9)])
    dec = decompose(box, [list(range(1, 10))])
    assert dec.n_blocks == 10
    assert all(blk.n_sites == 1 for blk in dec.blocks)


@pytest.mark.parametrize(
    "intervals,cuts",
    [
        ([(0, 3), (0, 3), (0, 3)], [[2], [1, 3], []]),
        ([(0, 3), (0, 2)], [[1, 2], [2]]),
        ([(0, 9)], [[3, 7]]),
    ],
)
def test_decomposition_tiles_parent(intervals, cuts):
    box = make_box(intervals)
    dec = decompose(box, cuts)
    assert sum(blk.n_sites for blk in dec.blocks) == box.n_sites
    covered = np.concatenate([dec.parent_indices(b) for b in range(dec.n_blocks)])
    assert sorted(covered.tolist()) == list(range(box.n_sites))
    for b in range(dec.n_blocks):
        for pi in dec.parent_indices(b):
            assert dec.block_of(int(pi)) == b


def test_bad_cuts():
    box = make_box([(0, 9)])
    with pytest.raises(BadCut):
        decompose(box, [[0]])  # not strictly inside
    with pytest.raises(BadCut):
        decompose(box, [[10]])
    with pytest.raises(BadCut):
        decompose(box, [[4, 4]])
    with pytest.raises(BadCut):
        decompose(box, [[7, 3]])
    with pytest.raises(BadCut):
        decompose(box, [[5], [2]])  # wrong axis count
