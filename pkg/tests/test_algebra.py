import numpy as np
import pytest

from circulantwl.core import (
    CoherentConfig,
    Relation,
    generated_equivalence,
    radical,
    trivial_config,
)
from circulantwl.algebra import (
    AlgebraicIso,
    CapExceededError,
    automorphism_group,
    enumerate_algebraic_isos,
    extendable_at,
    find_isomorphism,
    identity_iso,
    induced_color_map,
    induced_on_quotient,
    induced_on_restriction,
    is_algebraic_isomorphism,
    is_m_extendable,
    image_parabolic,
    tuple_extension,
)
from circulantwl.wl import wl_closure


def cay(n, conn):
    return wl_closure(
        np.array([[1 if (b - a) % n in conn else 0 for b in range(n)] for a in range(n)])
    )


def unit_map(reg, n, u):
    cmap = [0] * n
    for d in range(n):
        cmap[reg.color_of(0, d)] = reg.color_of(0, (u * d) % n)
    return AlgebraicIso(reg, reg, tuple(cmap))


# -- enumeration ------------------------------------------------------------------


def test_trivial_has_one_algebraic_automorphism():
    t5 = trivial_config(5)
    isos = enumerate_algebraic_isos(t5, t5)
    assert len(isos) == 1 and isos[0].is_identity


def test_regular_z5_has_four():
    z5 = cay(5, {1})
    assert len(enumerate_algebraic_isos(z5, z5)) == 4


def test_rank_mismatch_gives_none():
    assert enumerate_algebraic_isos(cay(5, {1, 4}), trivial_config(5)) == []


def test_all_enumerated_maps_preserve_tensor():
    cc = cay(12, {1, 5, 7, 11})
    for iso in enumerate_algebraic_isos(cc, cc):
        assert is_algebraic_isomorphism(cc, cc, iso.color_map)


def test_iso_group_structure():
    z7 = cay(7, {1})
    isos = enumerate_algebraic_isos(z7, z7)
    assert len(isos) == 6
    maps = {iso.color_map for iso in isos}
    for a in isos:
        assert a.compose(a.inverse()).is_identity
        for b in isos:
            assert a.compose(b).color_map in maps


# -- combinatorial isomorphisms ------------------------------------------------------


def test_identity_on_trivial_finds_identity_first():
    t6 = trivial_config(6)
    assert find_isomorphism(t6, t6, identity_iso(t6)) == tuple(range(6))


def test_every_map_of_a_regular_scheme_is_induced():
    z8 = cay(8, {1})
    for iso in enumerate_algebraic_isos(z8, z8):
        f = find_isomorphism(z8, z8, iso)
        assert f is not None
        assert induced_color_map(z8, z8, f).color_map == iso.color_map


@pytest.mark.parametrize("n,conn", [(6, {1, 5}), (8, {1, 7}), (9, {1, 8}), (10, {2, 8})])
def test_induced_maps_are_enumerated(n, conn):
    cc = cay(n, conn)
    enumerated = {iso.color_map for iso in enumerate_algebraic_isos(cc, cc)}
    for f in automorphism_group(cc, cap=50000):
        assert induced_color_map(cc, cc, f).color_map in enumerated


def test_automorphism_cap():
    with pytest.raises(CapExceededError):
        automorphism_group(trivial_config(8), cap=10)


# -- induced maps -----------------------------------------------------------------------


def test_identity_induces_identities():
    z12 = cay(12, {1})
    e = generated_equivalence(
        Relation(z12, frozenset({z12.color_of(0, d) for d in (0, 4, 8)}))
    )
    assert induced_on_quotient(identity_iso(z12), e).is_identity
    assert induced_on_restriction(
        identity_iso(z12), (0, 4, 8), (0, 4, 8)
    ).is_identity


def test_map_commutes_with_span_and_radical():
    z12 = cay(12, {1})
    phi = unit_map(z12, 12, 5)
    s = Relation(z12, frozenset({z12.color_of(0, d) for d in (1, 5, 7, 11)}))
    phi_s = Relation(z12, phi.apply_set(s.color_set))
    assert image_parabolic(phi, generated_equivalence(s)).blocks == generated_equivalence(phi_s).blocks
    assert image_parabolic(phi, radical(s)).blocks == radical(phi_s).blocks


def test_restriction_rejects_incompatible_targets():
    z12 = cay(12, {1})
    with pytest.raises(ValueError):
        # restricting onto point sets of different sizes cannot be induced
        induced_on_restriction(identity_iso(z12), (0, 4, 8), (0, 6))


def test_unit5_induces_identity_on_quotient():
    z12 = cay(12, {1})
    phi = unit_map(z12, 12, 5)
    e = generated_equivalence(
        Relation(z12, frozenset({z12.color_of(0, d) for d in (0, 4, 8)}))
    )
    induced = induced_on_quotient(phi, e)
    assert induced.source.rank == 4
    assert induced.is_identity  # 5 = 1 mod 4


# -- tuple extensions ----------------------------------------------------------------------


def test_identity_extension_at_matching_tuples():
    cc = cay(6, {1, 5})
    ext = tuple_extension(identity_iso(cc), (0, 2), (0, 2))
    assert ext is not None and ext.lifted.is_identity


def test_regular_extension_lifts_unit_action():
    z12 = cay(12, {1})
    phi = unit_map(z12, 12, 5)
    ext = tuple_extension(phi, (0,), (0,))
    assert ext is not None
    for d in range(12):
        c = ext.ext_source.color_of(0, d)
        a, b = ext.ext_target.representative[ext.lifted(c)]
        assert (b - a) % 12 == (5 * d) % 12


def test_extension_requires_matching_equality_pattern():
    cc = cay(5, {1, 4})
    assert tuple_extension(identity_iso(cc), (0, 0), (0, 1)) is None


def test_extension_unique_color_map_over_image_choices():
    # all successful image tuples give the same action on the old colors
    z8 = cay(8, {1})
    phi = unit_map(z8, 8, 3)
    base_maps = set()
    for b in range(8):
        ext = tuple_extension(phi, (0,), (b,))
        if ext is None:
            continue
        action = []
        for s in range(z8.rank):
            pieces = {
                ext.lifted(c)
                for c in range(ext.ext_source.rank)
                if z8.color_of(*map(int, ext.ext_source.representative[c])) == s
            }
            parents = {
                z8.color_of(*map(int, ext.ext_target.representative[c])) for c in pieces
            }
            assert len(parents) == 1
            action.append(parents.pop())
        base_maps.add(tuple(action))
    assert base_maps == {phi.color_map}


def test_section_compatibility_of_extensions():
    z12 = cay(12, {1})
    phi = unit_map(z12, 12, 5)
    ext = tuple_extension(phi, (0, 3), (0, 15 % 12))
    assert ext is not None
    e = generated_equivalence(
        Relation(z12, frozenset({z12.color_of(0, d) for d in (0, 4, 8)}))
    )
    phi_s = induced_on_quotient(phi, e)
    block = {p: i for i, blk in enumerate(sorted(e.blocks, key=min)) for p in blk}
    x_s = tuple(block[p] for p in (0, 3))
    x_s2 = tuple(block[p] for p in (0, 3))
    assert tuple_extension(phi_s, x_s, x_s2) is not None


# -- extendability ---------------------------------------------------------------------------


def test_zero_extendable_always():
    cc = cay(6, {1, 5})
    for iso in enumerate_algebraic_isos(cc, cc):
        assert is_m_extendable(iso, 0)


@pytest.mark.parametrize("u", [1, 5, 7, 11])
def test_regular_scheme_maps_extend_everywhere(u):
    z12 = cay(12, {1})
    phi = unit_map(z12, 12, u)
    assert is_m_extendable(phi, 2)


def test_extendable_monotone_in_m():
    cc = cay(8, {1, 7})
    for iso in enumerate_algebraic_isos(cc, cc):
        if is_m_extendable(iso, 2):
            assert is_m_extendable(iso, 1)


def test_extendable_at_finds_image_tuple():
    z5 = cay(5, {1})
    phi = unit_map(z5, 5, 2)
    ext = extendable_at(phi, (0, 1))
    assert ext is not None
    assert ext.x == (0, 1)
