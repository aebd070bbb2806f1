import pytest

import rainbow_forge as rf

from oracle import brute_force_max_rainbow


def test_cycle_layout():
    inst = rf.cycle_instance(3)
    assert inst.r == 2 and inst.n == 3
    assert inst.matchings[0] == inst.matchings[1] == ((0, 1), (2, 3), (4, 5))
    assert inst.matchings[2] == ((0, 5), (1, 2), (3, 4))
    assert inst.partition == (0, 1, 0, 1, 0, 1)
    assert rf.validate_instance(inst) == []


def test_cycle_rejects_small_n():
    with pytest.raises(ValueError):
        rf.cycle_instance(1)


def test_k4_union_layout():
    inst = rf.k4_union_instance(3)
    assert inst.n == 3
    assert all(len(m) == 4 for m in inst.matchings)  # size n + 1
    assert inst.vertex_count() == 8  # 2(n+1) vertices
    assert inst.partition is None
    assert rf.validate_instance(inst) == []


def test_k4_union_rejects_even_n():
    with pytest.raises(ValueError):
        rf.k4_union_instance(4)


def test_ach_layout():
    inst = rf.ach_instance(3, 4)
    assert inst.n == 4
    assert all(len(m) == 4 for m in inst.matchings)
    assert inst.vertex_count() == 12
    # part j holds a_j and b_j of every copy
    assert inst.partition == (0, 1, 2, 0, 1, 2) * 2
    assert rf.validate_instance(inst) == []


def test_ach_repeats_last_class():
    inst = rf.ach_instance(3, 6)
    assert inst.matchings[3] == inst.matchings[4] == inst.matchings[5]
    assert len({inst.matchings[i] for i in range(4)}) == 4


def test_ach_single_gadget_copy_blocks_at_two():
    # each copy alone admits only a single rainbow edge
    inst = rf.ach_instance(3, 4)
    copy0 = rf.Instance(
        r=3,
        matchings=tuple(tuple(e for e in m if max(e) < 6) for m in inst.matchings),
    )
    assert brute_force_max_rainbow(copy0) == 1


def test_ach_rejects_bad_parameters():
    with pytest.raises(ValueError):
        rf.ach_instance(2, 4)
    with pytest.raises(ValueError):
        rf.ach_instance(3, 5)
    with pytest.raises(ValueError):
        rf.ach_instance(4, 6)  # below 2^(r-1)


def test_every_generator_validates_clean():
    instances = [
        rf.cycle_instance(5),
        rf.k4_union_instance(5),
        rf.ach_instance(3, 6),
        rf.ach_instance(4, 8),
        rf.random_instance(3, 6, 4, seed=2),
        rf.dummy_lift(rf.ach_instance(3, 4), 2),
    ]
    for inst in instances:
        assert rf.validate_instance(inst) == [], inst.meta


def test_dummy_lift_identity_and_shape():
    base = rf.cycle_instance(3)
    assert rf.dummy_lift(base, 0) is base
    lifted = rf.dummy_lift(base, 1)
    assert all(len(m) == 4 for m in lifted.matchings)
    dummy = (6, 7)
    assert all(dummy in m for m in lifted.matchings)
    assert rf.validate_instance(lifted) == []


def test_dummy_lift_values():
    # pinned with the brute-force oracle: lifting adds one extendable
    # edge per dummy while unused colours remain
    base = rf.ach_instance(3, 4)
    assert brute_force_max_rainbow(rf.dummy_lift(base, 1)) == 3
    assert brute_force_max_rainbow(rf.dummy_lift(base, 2)) == 4
    assert rf.exact_max_rainbow(rf.dummy_lift(base, 2)).size == 4


def test_dummy_lift_preserves_partition():
    lifted = rf.dummy_lift(rf.ach_instance(3, 4), 2)
    assert lifted.partition is not None
    assert len(lifted.partition) == 12 + 6
    assert rf.validate_instance(lifted) == []


def test_dummy_lift_rejects_negative():
    with pytest.raises(ValueError):
        rf.dummy_lift(rf.cycle_instance(2), -1)


def test_certify_blocking_family():
    inst = rf.ach_instance(3, 4)
    bf = rf.certify_blocking_family(inst, 3)
    assert bf.blocked_size == 3 and bf.certified_max == 2
    with pytest.raises(ValueError, match="not blocked"):
        rf.certify_blocking_family(inst, 2)


def test_blowup_compose_identity_and_bound():
    bf = rf.find_blocking_family(3, 4, 3, budget=20, seed=0)
    assert bf is not None
    single = rf.blowup_compose([bf])
    assert single.matchings == bf.inst.matchings

    comp = rf.blowup_compose([bf, bf])
    assert all(len(m) == 6 for m in comp.matchings)
    assert rf.validate_instance(comp) == []
    assert comp.meta["offsets"] == "0,12"
    # blocked at sum(t) - q + 1 = 5, so the maximum is at most 4
    assert rf.exact_max_rainbow(comp).size <= 4


def test_blowup_compose_rejects_mismatched_parts():
    a = rf.find_blocking_family(3, 4, 2, budget=20, seed=0)
    b = rf.find_blocking_family(3, 3, 2, budget=20, seed=0)
    with pytest.raises(ValueError):
        rf.blowup_compose([a, b])
    with pytest.raises(ValueError):
        rf.blowup_compose([])


def test_find_blocking_family_certified():
    bf = rf.find_blocking_family(3, 4, 2, budget=20, seed=0)
    assert bf is not None
    assert all(len(m) == 2 for m in bf.inst.matchings)
    assert bf.certified_max < bf.blocked_size
    assert rf.exact_max_rainbow(bf.inst).size == bf.certified_max


def test_find_blocking_family_impossible_cases():
    assert rf.find_blocking_family(3, 1, 1, budget=10) is None
    with pytest.raises(ValueError):
        rf.find_blocking_family(3, 0, 2)
    with pytest.raises(ValueError):
        rf.find_blocking_family(3, 2, 0)


def test_find_blocking_family_r2_cycle_seed():
    bf = rf.find_blocking_family(2, 3, 3, budget=20, seed=0)
    assert bf is not None
    assert all(len(m) == 3 for m in bf.inst.matchings)
    assert bf.certified_max < 3


def test_psz_composition_params_values():
    p = rf.psz_composition_params(3, 217)
    assert p == rf.PszParams(a=6, t=63, q=3, s=28, t_prime=91, bound=214)
    p = rf.psz_composition_params(3, 1000)
    assert p == rf.PszParams(a=9, t=90, q=11, s=10, t_prime=100, bound=989)


def test_psz_composition_identity_and_q_bound():
    for r in (3, 4):
        base = 6 ** r
        for n in (base + 1, base + 17, 3 * base, 10 * base):
            p = rf.psz_composition_params(r, n)
            assert n == (p.q - 1) * p.t + p.t_prime
            assert (12 * r * p.q) ** r >= n ** (r - 1)  # q >= n^((r-1)/r)/(12r)


def test_psz_composition_out_of_domain():
    with pytest.raises(ValueError):
        rf.psz_composition_params(3, 216)


def test_random_instance_deterministic_and_valid():
    a = rf.random_instance(3, 2, 2, seed=7)
    b = rf.random_instance(3, 2, 2, seed=7)
    assert a == b
    assert rf.validate_instance(a) == []
    assert a != rf.random_instance(3, 2, 2, seed=8)


def test_random_instance_pool_is_bounded():
    inst = rf.random_instance(3, 5, 5, seed=1)
    assert max(inst.vertices()) < 3 * 5 + 3


def test_random_instance_greedy_floor():
    # with matchings of size n, some rainbow matching of size ceil(n/r) exists
    for seed in (0, 1, 2):
        inst = rf.random_instance(3, 5, 5, seed=seed)
        assert rf.exact_max_rainbow(inst).size >= 2
