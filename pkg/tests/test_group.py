"""Finite matrix groups, Reynolds averaging, Molien counts, stabilizers."""

import itertools

import pytest

from orbint.arith import CyclotomicField, QQ
from orbint.budgets import Budget
from orbint.errors import NotFinite
from orbint.group import (act, act_ideal, enumerate_group, inertia_group,
                          is_invariant, molien, reynolds, setwise_stabilizer)
from orbint.poly import Ideal, MultiPoly

UV = ("u", "v")


def up(name, field=QQ):
    return MultiPoly.var(field, UV, name)


@pytest.fixture(scope="module")
def sign_group():
    return enumerate_group(QQ, [[[-1, 0], [0, -1]]])


@pytest.fixture(scope="module")
def mu3():
    K = CyclotomicField(3)
    z = K.generator
    return enumerate_group(K, [[[z, 0], [0, z * z]]])


def test_enumerate_sign_group(sign_group):
    assert sign_group.order == 2


def test_enumerate_trivial():
    g = enumerate_group(QQ, [[[1, 0], [0, 1]]])
    assert g.order == 1


def test_enumerate_mu3(mu3):
    # closure oracle: powers of the generator until the identity returns
    assert mu3.order == 3


def test_enumerate_not_finite():
    with pytest.raises(NotFinite):
        enumerate_group(QQ, [[[2]]], Budget(group_bound=50))


def test_enumerate_rejects_singular():
    with pytest.raises(ValueError):
        enumerate_group(QQ, [[[1, 0], [1, 0]]])


def test_act(sign_group):
    neg = next(el for el in sign_group if el != sign_group.identity)
    u, v = up("u"), up("v")
    assert act(sign_group, neg, u ** 2) == u ** 2
    assert act(sign_group, neg, u) == -u


def test_act_is_ring_homomorphism(sign_group):
    neg = next(el for el in sign_group if el != sign_group.identity)
    u, v = up("u"), up("v")
    f, g = u ** 2 + v, u * v - 1
    assert act(sign_group, neg, f * g) == \
        act(sign_group, neg, f) * act(sign_group, neg, g)


def test_act_diagonal_cyclotomic(mu3):
    K = mu3.field
    u, v = up("u", K), up("v", K)
    g = next(el for el in mu3 if el != mu3.identity)
    assert act(mu3, g, u * v) == u * v


def test_reynolds(sign_group):
    u, v = up("u"), up("v")
    assert reynolds(sign_group, u ** 2) == u ** 2
    assert reynolds(sign_group, u).is_zero()
    # average of (u^3 + uv) and (-u^3 + uv)
    assert reynolds(sign_group, u ** 3 + u * v) == u * v


def test_reynolds_idempotent_and_invariant(sign_group):
    u, v = up("u"), up("v")
    f = u ** 3 + u * v + v ** 2 - u
    r = reynolds(sign_group, f)
    assert reynolds(sign_group, r) == r
    assert is_invariant(sign_group, r)


def reynolds_rank_oracle(group, degree):
    """Independent Molien oracle: rank of the Reynolds operator on the
    degree-d monomial space, via the span of averaged monomials."""
    field = group.field
    n = group.n
    variables = tuple(f"u{i}" for i in range(n)) if n != 2 else UV
    monos = []
    for combo in itertools.combinations_with_replacement(range(n), degree):
        expo = [0] * n
        for c in combo:
            expo[c] += 1
        monos.append(MultiPoly(field, variables, {tuple(expo): 1}))
    averaged = [reynolds(group, m) for m in monos]
    averaged = [a for a in averaged if not a.is_zero()]
    # rank by greedy elimination over the monomial coefficient vectors
    basis = []
    for a in averaged:
        vec = dict(a.terms)
        for pivot_mon, pivot_vec in basis:
            if pivot_mon in vec:
                c = vec[pivot_mon] / pivot_vec[pivot_mon]
                for m2, v2 in pivot_vec.items():
                    s = vec.get(m2, field.zero) - c * v2
                    if s:
                        vec[m2] = s
                    else:
                        vec.pop(m2, None)
        if vec:
            lead = sorted(vec)[0]
            basis.append((lead, vec))
    return len(basis)


def test_molien_sign_group(sign_group):
    counts = molien(sign_group, 4)
    assert counts == [1, 0, 3, 0, 5]
    for d in range(1, 5):
        assert counts[d] == reynolds_rank_oracle(sign_group, d)


def test_molien_trivial_line():
    g = enumerate_group(QQ, [[[1]]])
    assert molien(g, 2) == [1, 1, 1]


def test_molien_mu3(mu3):
    # Reynolds-rank oracle: invariant monomials are u^a v^b with
    # a + 2b = 0 mod 3; degree 3 gives u^3 and v^3 only.
    counts = molien(mu3, 4)
    for d in range(1, 5):
        assert counts[d] == reynolds_rank_oracle(mu3, d)
    assert counts == [1, 0, 1, 2, 1]


def test_stabilizers_coordinate_line(sign_group):
    u, v = up("u"), up("v")
    line = Ideal(QQ, UV, [u])
    s = setwise_stabilizer(sign_group, line)
    i = inertia_group(sign_group, line)
    # -1 maps the line {u=0} to itself but moves (0,1) to (0,-1)
    assert s.order == 2
    assert i.order == 1
    assert s.verify_closure() and i.verify_closure()


def test_stabilizers_origin(sign_group):
    u, v = up("u"), up("v")
    origin = Ideal(QQ, UV, [u, v])
    assert setwise_stabilizer(sign_group, origin).order == 2
    assert inertia_group(sign_group, origin).order == 2


def test_stabilizers_moved_line(sign_group):
    u, v = up("u"), up("v")
    moved = Ideal(QQ, UV, [v - 1])
    # act(-I, v-1) = -v-1 generates a different ideal
    neg = next(el for el in sign_group if el != sign_group.identity)
    assert act_ideal(sign_group, neg, moved) != moved
    assert setwise_stabilizer(sign_group, moved).order == 1
    assert inertia_group(sign_group, moved).order == 1


def test_inertia_inside_stabilizer(sign_group, mu3):
    cases = [
        (sign_group, Ideal(QQ, UV, [up("u")])),
        (sign_group, Ideal(QQ, UV, [up("u"), up("v")])),
        (mu3, Ideal(mu3.field, UV, [up("u", mu3.field)])),
        (mu3, Ideal(mu3.field, UV, [up("v", mu3.field) - 1])),
    ]
    for group, prime in cases:
        s = setwise_stabilizer(group, prime)
        i = inertia_group(group, prime)
        members = set(s.elements)
        assert all(el in members for el in i.elements)
        assert s.order % i.order == 0


def test_orbit_stabilizer(sign_group):
    u, v = up("u"), up("v")
    for gens in ([u], [u, v], [v - 1], [u - v]):
        prime = Ideal(QQ, UV, gens)
        keys = {act_ideal(sign_group, el, prime).canonical_key()
                for el in sign_group}
        s = setwise_stabilizer(sign_group, prime)
        assert len(keys) * s.order == sign_group.order
