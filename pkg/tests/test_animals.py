import pytest

from hyperperc import (Animal, TallyTable, animal_stats, enumerate_animals,
                       host_ball, iter_animals, stream_animals)
from hyperperc import animals as animals_mod

from oracles import M4_N2, TABLE1, TABLE1_TOTAL, host_exhaustive_tally, z2_exhaustive_tally


def test_square_lattice_hand_enumeration():
    assert enumerate_animals(4, 2).counts == M4_N2


def test_square_lattice_exhaustive_oracle():
    # fully independent: coordinates on Z^2, subsets via itertools
    assert enumerate_animals(4, 3).counts == z2_exhaustive_tally(3)


@pytest.mark.parametrize("m,n", [(5, 2), (6, 2)])
def test_subset_search_oracle(m, n):
    host = host_ball(m, n)
    assert enumerate_animals(m, n).counts == host_exhaustive_tally(host, n)


def test_full_m5_table(m5n8_tally):
    assert m5n8_tally.counts == TABLE1
    assert m5n8_tally.total_animals() == TABLE1_TOTAL


def test_generator_matches_kernel():
    # the pure Python generator and the compiled kernel are independent
    for m, n in ((4, 4), (5, 4), (6, 3)):
        got: dict = {}
        for e, v, b in iter_animals(m, n):
            got[(e, v, b)] = got.get((e, v, b), 0) + 1
        assert got == enumerate_animals(m, n).counts


def test_worker_count_does_not_change_output():
    one = enumerate_animals(5, 5, workers=1)
    two = enumerate_animals(5, 5, workers=2)
    assert one.to_csv() == two.to_csv()


def test_deterministic_bytes():
    a = enumerate_animals(5, 4).to_csv()
    b = enumerate_animals(5, 4).to_csv()
    assert a == b


def test_stream_animals_counts():
    seen = []
    n = stream_animals(5, 2, lambda e, v, b: seen.append((e, v, b)))
    assert n == len(seen) == 36
    assert seen[0] == (0, 1, 5)  # empty animal first


def test_empty_truncation():
    t = enumerate_animals(5, 0)
    assert t.counts == {(0, 1, 5): 1}


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        enumerate_animals(3, 2)
    with pytest.raises(ValueError):
        enumerate_animals(5, -1)


# -- tally table ------------------------------------------------------------------


def test_csv_round_trip(m5n8_tally):
    again = TallyTable.from_csv(m5n8_tally.to_csv())
    assert again.m == 5 and again.max_edges == 8
    assert again.counts == m5n8_tally.counts
    assert again.digest() == m5n8_tally.digest()


def test_csv_shape(m5n8_tally):
    lines = m5n8_tally.to_csv().splitlines()
    assert lines[0] == "edges,vertices,boundary,count"
    assert len(lines) == 1 + 21
    assert lines[1] == "0,1,5,1"
    # canonical order: edges ascending, vertices then boundary descending
    keys = [tuple(map(int, ln.split(",")[:3])) for ln in lines[1:]]
    assert keys == sorted(keys, key=lambda k: (k[0], -k[1], -k[2]))


def test_from_csv_rejects_garbage():
    with pytest.raises(ValueError):
        TallyTable.from_csv("nope\n0,1,5,1\n")
    with pytest.raises(ValueError):
        TallyTable.from_csv(
            "edges,vertices,boundary,count\n0,1,5,1\n0,1,5,1\n")
    with pytest.raises(ValueError):
        TallyTable.from_csv("edges,vertices,boundary,count\n1,2,8,5\n")


def test_restricted(m5n8_tally):
    small = m5n8_tally.restricted(2)
    assert small.counts == {(0, 1, 5): 1, (1, 2, 8): 5, (2, 3, 11): 30}
    with pytest.raises(ValueError):
        m5n8_tally.restricted(9)


def test_check_consistency_flags_bad_rows():
    bad = TallyTable(m=5, max_edges=2, counts={(0, 1, 5): 1, (2, 4, 11): 7})
    with pytest.raises(ValueError):
        bad.check_consistency()
    bad2 = TallyTable(m=5, max_edges=2, counts={(0, 1, 5): 1, (2, 3, 12): 7})
    with pytest.raises(ValueError):
        bad2.check_consistency()


def test_row_identity(m5n8_tally):
    # m*v edge slots = 2 per animal edge + boundary + chords; chords >= 0
    for e, v, b, _ in m5n8_tally.rows():
        assert 5 * v - 2 * e - b >= 0


# -- individual animals ------------------------------------------------------------


def test_animal_stats_agrees_with_stream():
    host = host_ball(5, 4)
    seen: dict = {}
    for e, v, b, ids in animals_mod._iter_triples(host, 4):
        seen.setdefault((e, v, b), ids and list(ids))
        stats = animal_stats(Animal(edges=frozenset(ids)), host)
        assert stats == (e, v, b)
    assert (0, 1, 5) in seen


def test_animal_stats_rejects_disconnected():
    host = host_ball(5, 3)
    # two edges that do not touch the root or each other
    far = [e for e in range(host.edge_count)
           if host.layer[host.edge_u[e]] >= 2 and host.layer[host.edge_v[e]] >= 2]
    with pytest.raises(ValueError):
        animal_stats(Animal(edges=frozenset(far[:1])), host)


def test_animal_stats_rejects_oversized_for_host():
    host = host_ball(5, 2)
    # a straight path of 3 edges outward exceeds the certified size
    path = []
    v = 0
    for _ in range(3):
        i = int(host.indptr[v])
        e = int(host.adj_edge[i])
        w = int(host.adj_nbr[i])
        if host.layer[w] <= host.layer[v]:
            i += 1
            e = int(host.adj_edge[i])
            w = int(host.adj_nbr[i])
        path.append(e)
        v = w
    with pytest.raises(ValueError):
        animal_stats(Animal(edges=frozenset(path)), host)
