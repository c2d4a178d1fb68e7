import numpy as np
from pytest import raises

from heckelie.modmat import (
    LieElt,
    ResidueMatrix,
    all_lie_elements,
    borel_subgroup,
    conjugate_lie,
    conjugated_kernel_intersection,
    conjugated_kernel_intersection_sizes,
    double_cosets,
    enumerate_sl2,
    fixed_nonresidue,
    generate_subgroup,
    inertia_subgroup,
    inertia_subgroups,
    is_in_kernel,
    kernel_double_cosets,
    kernel_intersection,
    kernel_subgroup,
    legendre,
    lie_embed,
    lift_matrix,
    lie_orbit,
    lie_project,
    lie_u,
    lie_u0,
    lie_v,
    lie_v0,
    nilpotent_cusp_legendre_profile,
    orbit_and_centralizer,
    projective_line_representatives,
    resolve_nonresidue,
    sl2_array,
    sl2_generators,
    sl2_order,
    split_prime_power,
    subgroup_from_array,
    torus_subgroup,
    verify_unimodular,
)
from heckelie.utils import GroupTooLargeError, InvalidInputError, NotInKernelError

LEVELS = [(3, 2), (5, 2), (7, 2)]


def test_residues():
    assert legendre(2, 7) == 1
    assert legendre(3, 7) == -1
    assert legendre(14, 7) == 0
    assert legendre(-1, 13) == 1
    assert all(type(legendre(x, 11)) is int for x in range(-11, 12))
    assert fixed_nonresidue(3) == 2
    assert fixed_nonresidue(7) == 3
    assert fixed_nonresidue(17) == 3
    assert resolve_nonresidue(7) == 3
    assert resolve_nonresidue(7, 5) == 5
    with raises(InvalidInputError):
        resolve_nonresidue(7, 2)
    assert split_prime_power(9) == (3, 2)
    assert split_prime_power(125) == (5, 3)
    with raises(InvalidInputError):
        split_prime_power(12)


def test_residue_matrix():
    g = ResidueMatrix.of(9, 2, 1, 1, 1)
    verify_unimodular(g)
    assert g @ g.inverse() == ResidueMatrix.identity(9)
    assert g.inverse() @ g == ResidueMatrix.identity(9)
    assert g.reduce(3) == ResidueMatrix(3, 2, 1, 1, 1)
    assert ResidueMatrix.of(9, -1, 0, 0, -1) == ResidueMatrix(9, 8, 0, 0, 8)
    with raises(InvalidInputError):
        g.reduce(2)
    with raises(InvalidInputError):
        verify_unimodular(ResidueMatrix.of(9, 2, 0, 0, 1))
    with raises(InvalidInputError):
        g @ ResidueMatrix.identity(3)


def test_lie_elements():
    p = 5
    assert [X.index for X in all_lie_elements(p)] == list(range(p**3))
    assert LieElt.of(p, -1, 6, 0) == LieElt(p, 4, 1, 0)
    assert lie_u(p).trace_pairing(lie_u0(p)) == 1
    assert lie_u(p) + (-lie_u(p)) == LieElt.zero(p)
    assert lie_u(p).scale(2) == lie_v(p)
    assert lie_v0(p) == LieElt(p, 0, 2, 0)
    assert lie_u(p).is_nilpotent()
    assert not LieElt(p, 1, 0, 0).is_nilpotent()
    assert LieElt(p, 1, 1, 4).is_nilpotent()
    assert sum(1 for X in all_lie_elements(p) if X.is_nilpotent()) == p * p


def test_kernel_embedding():
    for X in all_lie_elements(3):
        g = lie_embed(X, 2)
        verify_unimodular(g)
        assert is_in_kernel(g)
        assert lie_project(g) == X
        assert lie_project(lie_embed(X, 3), 3) == X

    # Addition in sl_2 is multiplication in the kernel
    X, Y = LieElt(5, 1, 2, 3), LieElt(5, 4, 0, 2)
    assert lie_embed(X, 2) @ lie_embed(Y, 2) == lie_embed(X + Y, 2)

    with raises(NotInKernelError):
        lie_project(ResidueMatrix.of(9, 2, 1, 1, 1))
    with raises(NotInKernelError):
        lie_project(ResidueMatrix.identity(3))
    assert not is_in_kernel(ResidueMatrix.of(9, 2, 1, 1, 1))


def test_conjugation_factors_through_mod_p():
    p = 5
    for g in sl2_generators(p, 2):
        for X in [lie_u(p), lie_v(p), LieElt(p, 1, 2, 3)]:
            assert conjugate_lie(g, X) == conjugate_lie(g.reduce(p), X)

    # h u_0 h^-1 = [[-ac, a^2], [-c^2, ac]] for h = [[a, b], [c, d]]
    h = ResidueMatrix.of(p, 2, 1, 1, 1)
    assert conjugate_lie(h, lie_u0(p)) == LieElt.of(p, -2, 4, -1)

    # Conjugation is a left action: (gh) X = g (h X)
    elements = enumerate_sl2(3, 2)[::37]
    for X in [lie_u(3), LieElt(3, 1, 2, 0), LieElt(3, 2, 2, 1)]:
        for g in elements:
            for h in elements:
                assert conjugate_lie(g @ h, X) == conjugate_lie(g, conjugate_lie(h, X))
        assert conjugate_lie(ResidueMatrix.identity(9), X) == X


def test_sl2_enumeration():
    assert sl2_order(3, 1) == 24
    assert sl2_order(3, 2) == 648
    for p, r in [(3, 1), (3, 2), (5, 2)]:
        G = sl2_array(p, r)
        m = p**r
        assert len(G) == sl2_order(p, r)
        assert ((G[:, 0] * G[:, 3] - G[:, 1] * G[:, 2]) % m == 1).all()
        assert len(np.unique(G, axis=0)) == len(G)
    assert enumerate_sl2(3, 1)[0] == ResidueMatrix(3, 0, 1, 2, 0)
    assert generate_subgroup(sl2_generators(3, 2), 9).order == 648
    with raises(GroupTooLargeError):
        sl2_array(31, 4)


def test_regular_nilpotent_orbits():
    for p, r in LEVELS:
        orbit_u, centralizer_u = orbit_and_centralizer(lie_u(p), p, r, "enumerate")
        orbit_v, centralizer_v = orbit_and_centralizer(lie_v(p), p, r, "enumerate")
        assert len(orbit_u) * centralizer_u == sl2_order(p, r)
        assert len(orbit_u) == len(orbit_v) == (p * p - 1) // 2
        assert centralizer_u == centralizer_v == 2 * p * p ** (3 * (r - 1))
        assert not orbit_u & orbit_v
        nilpotent = {X for X in all_lie_elements(p) if X.is_nilpotent() and not X.is_zero()}
        assert orbit_u | orbit_v == nilpotent

    assert orbit_and_centralizer(lie_u(3), 3, 2, "closure")[0] == lie_orbit(lie_u(3))
    closure = orbit_and_centralizer(lie_v(7), 7, 2, "closure")
    assert closure == orbit_and_centralizer(lie_v(7), 7, 2, "enumerate")
    assert lie_orbit(LieElt.zero(5)) == frozenset([LieElt.zero(5)])
    with raises(InvalidInputError):
        orbit_and_centralizer(lie_u(3), 3, 2, "guess")


def test_nilpotent_cusp_legendre_profile():
    for p in [5, 7, 11]:
        profile = nilpotent_cusp_legendre_profile(p)
        assert profile["values"] == {0, legendre(lie_u0(p).b, p)}
        assert profile["zero_iff_lower_triangular"]
        assert profile["lower_triangular_conjugates"] == (p - 1) // 2
        assert profile["orbit_size"] == (p * p - 1) // 2


def test_subgroups():
    G_i, G_omega, G_infinity = inertia_subgroups(3, 2)
    assert (G_i.order, G_omega.order, G_infinity.order) == (4, 6, 18)
    assert ResidueMatrix.of(9, -1, 0, 0, -1) in G_omega
    assert inertia_subgroup(5, 2, "infinity").order == 50
    with raises(InvalidInputError):
        inertia_subgroup(5, 2, "rho")

    assert torus_subgroup(7).order == 6
    assert borel_subgroup(3, 1).order == 6
    assert borel_subgroup(3, 2).order == 648 // 4
    assert kernel_subgroup(3, 2).order == 27

    # Generators must have determinant one
    with raises(InvalidInputError):
        generate_subgroup([ResidueMatrix.of(9, 2, 0, 0, 1)], 9)


def test_projective_line_representatives():
    for p, level in [(3, 1), (5, 1), (3, 2)]:
        reps = projective_line_representatives(p, level)
        assert len(reps) == p + 1
        for k, s in enumerate(reps):
            for t in reps[k + 1 :]:
                assert (s.inverse() @ t).c % p != 0

        # The cosets s P partition the group
        P = borel_subgroup(p, level)
        covered = [s @ b for s in reps for b in P.elements]
        assert len(covered) == sl2_order(p, level)
        assert set(covered) == set(enumerate_sl2(p, level))


def test_kernel_intersections():
    p, r = 3, 2
    assert kernel_intersection(kernel_subgroup(p, r), p) == frozenset(all_lie_elements(p))
    assert kernel_intersection(inertia_subgroup(p, r, "i"), p) == {LieElt.zero(p)}

    line = {LieElt(p, 0, m, 0) for m in range(p)}
    assert kernel_intersection(inertia_subgroup(p, r, "infinity"), p) == line
    weyl = ResidueMatrix.of(9, 0, 1, -1, 0)
    lower = {LieElt(p, 0, 0, m) for m in range(p)}
    assert conjugated_kernel_intersection(weyl, inertia_subgroup(p, r, "infinity"), p) == lower

    # Full sweep at (3, 2), every conjugate of G_i and G_omega meets sl_2 trivially
    for j in ["i", "omega"]:
        sizes = conjugated_kernel_intersection_sizes(inertia_subgroup(3, 2, j), 3, 2)
        assert (sizes == 1).all()
    sizes = conjugated_kernel_intersection_sizes(inertia_subgroup(3, 2, "infinity"), 3, 2)
    assert (sizes == 3).all()

    # Sampled at (5, 2) and (7, 2)
    for p in [5, 7]:
        G = sl2_array(p, 2)
        sample = G[:: len(G) // 1000][:1000]
        for j in ["i", "omega"]:
            sizes = conjugated_kernel_intersection_sizes(inertia_subgroup(p, 2, j), p, 2, sample)
            assert (sizes == 1).all()


def test_double_cosets():
    H = kernel_subgroup(3, 2)
    counts = [
        len(double_cosets(H, inertia_subgroup(3, 2, j), 3, 2))
        for j in ["i", "omega", "infinity"]
    ]
    assert counts == [6, 4, 4]

    H = kernel_subgroup(5, 2)
    assert len(double_cosets(H, inertia_subgroup(5, 2, "omega"), 5, 2)) == 20
    assert len(double_cosets(H, inertia_subgroup(5, 2, "i"), 5, 2)) == 30

    reps = double_cosets(kernel_subgroup(3, 2), inertia_subgroup(3, 2, "i"), 3, 2)
    assert reps == sorted(reps)
    assert reps[0] == ResidueMatrix(9, 0, 1, 8, 0)

    # A single double coset when both sides are the whole group
    G = subgroup_from_array(sl2_array(3, 1), 3)
    assert double_cosets(G, G, 3, 1) == [ResidueMatrix(3, 0, 1, 2, 0)]


def test_lift_matrix():
    for g in enumerate_sl2(3, 1) + enumerate_sl2(5, 1)[::7]:
        lifted = lift_matrix(g, g.modulus, 2)
        assert lifted.modulus == g.modulus**2
        assert lifted.reduce(g.modulus) == g
    g = ResidueMatrix.of(9, 0, 1, 8, 0)
    assert lift_matrix(g, 3, 3).reduce(9) == g


def test_kernel_double_cosets():
    for p in [3, 5]:
        H = kernel_subgroup(p, 2)
        for j in ["i", "omega", "infinity"]:
            K = inertia_subgroup(p, 2, j)
            reps = kernel_double_cosets(K, p, 2)
            assert len(reps) == len(double_cosets(H, K, p, 2))
            assert all(s.modulus == p * p for s in reps)

    # Index of K mod p in SL_2(F_p): 1320 / (2, 4, 6, 22) for Gamma(11^2)
    counts = [
        len(kernel_double_cosets(inertia_subgroup(11, 2, j), 11, 2))
        for j in ["i", "omega", "infinity"]
    ]
    assert counts == [330, 220, 60]
