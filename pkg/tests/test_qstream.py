import numpy as np
import pytest

from qnetsim.errors import SizeError
from qnetsim.gates import H, X
from qnetsim.qstream import iterate, new_stream, system_at


@pytest.mark.parametrize("n,count,precision,itemsize", [(1, 10, "double", 16), (3, 7, "single", 8),
                                                         (9, 2, "single", 8), (2, 0, "double", 16)])
def test_block_size_is_exact(n, count, precision, itemsize):
    store = new_stream(n, count, precision)
    assert store.nbytes == count * 4**n * itemsize
    assert store.system_nbytes == 4**n * itemsize
    assert store.block.flags["C_CONTIGUOUS"]


def test_every_system_starts_in_ground_state():
    store = new_stream(2, 5)
    for i in range(5):
        m = store.system_at(i).matrix
        assert m[0, 0] == 1 and np.count_nonzero(m) == 1


def test_systems_are_views_into_the_block():
    store = new_stream(1, 3)
    X(store[1].qubit(0))
    assert store.block[1, 1, 1] == 1
    assert store.block[0, 0, 0] == 1 and store.block[2, 0, 0] == 1
    # system i lives at flat offset i * 4**N
    flat = store.block.reshape(-1)
    assert flat[1 * 4 + 3] == 1


def test_iteration_order_and_module_helpers():
    store = new_stream(1, 4)
    assert [s.index for s in iterate(store)] == [0, 1, 2, 3]
    assert list(iter(store)) == []
    store.reset()
    assert len(list(store)) == 4
    assert system_at(store, 2).index == 2
    with pytest.raises(IndexError):
        store.system_at(4)


def test_cursors_are_independent_and_report_progress():
    store = new_stream(1, 3)
    seen = []
    a = store.cursor("A", lambda owner, done, total: seen.append((owner, done, total)))
    b = store.cursor("B")
    assert [s.index for s in a] == [0, 1, 2]
    assert [s.index for s in b] == [0, 1, 2]
    assert seen == [("A", 1, 3), ("A", 2, 3), ("A", 3, 3)]
    assert len(a) == 3 and a.system_size == 1


def test_shared_mutation_visible_through_other_cursor():
    store = new_stream(1, 2)
    for s in store.cursor("writer"):
        H(s.qubit(0))
    for s in store.cursor("reader"):
        np.testing.assert_allclose(s.matrix, np.full((2, 2), 0.5), atol=1e-12)


def test_qubit_refs_identify_their_slot():
    store = new_stream(2, 3)
    q = store[2].qubit(1)
    assert (q.stream_id, q.system_index, q.qubit_index) == (store.id, 2, 1)
    assert q.system.matrix.base is not None
    assert q == store[2].qubit(1)
    assert q != new_stream(2, 3)[2].qubit(1)


@pytest.mark.parametrize("n,count", [(0, 1), (13, 1), (2, -1), (2, 1.5)])
def test_invalid_sizes(n, count):
    with pytest.raises(SizeError):
        new_stream(n, count)
