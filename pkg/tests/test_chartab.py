import random
from unittest.mock import patch

import pytest

from src.cache import JsonCache
from src.chartab import (
    CORRECTED,
    PRINTED,
    Character,
    CharacterTable,
    build_character_table,
    char_value,
    class_index,
    load_or_build_table,
    orthogonality_defect,
    table_from_json,
    table_to_csv,
    table_to_json,
)
from src.errors import (
    CharacterIndexError,
    DegenerateTableError,
    InvalidModulusError,
    ModulusMismatchError,
    UnsupportedCongruenceError,
)
from src.psl2 import ClassKind, ConjClassLabel, enumerate_group, inverse, standard_generators


def _index(table, family):
    return next(i for i, ch in enumerate(table.chars) if ch.family == family)


def test_p7_degrees(table7):
    assert sorted(ch.degree for ch in table7.chars) == [1, 3, 3, 6, 7, 8]
    assert len(table7.classes) == 6


@pytest.mark.parametrize("p", [7, 11, 19, 23])
def test_degree_sum_and_orthogonality(p):
    table = build_character_table(p)
    assert len(table.chars) == len(table.classes) == (p + 5) // 2
    assert sum(ch.degree ** 2 for ch in table.chars) == p * (p * p - 1) // 2
    assert orthogonality_defect(table) < 1e-9


def test_trivial_row(table11):
    u = table11.chars[_index(table11, "U")]
    assert all(v == 1 for v in u.values)


def test_values_at_identity_are_degrees(table11):
    for ch in table11.chars:
        assert ch.values[0] == pytest.approx(ch.degree)


def test_documented_entries(table7):
    s, t = standard_generators(7)
    e = t * inverse(t)
    v = _index(table7, "V")
    chi = _index(table7, "chi_phi")
    assert char_value(table7, v, t) == pytest.approx(0)
    assert char_value(table7, chi, e) == pytest.approx(6)
    assert char_value(table7, chi, t) == pytest.approx(-1)
    assert char_value(table7, v, s) == pytest.approx(-1)


def test_resolutions_p7(table7):
    """Тест: какие из спорных записей таблицы прошли проверку ортогональности."""
    assert table7.resolutions == {
        "W.split": CORRECTED,
        "V.order_two": CORRECTED,
        "chi_phi.order_two": CORRECTED,
        "chi_psi.order_two": PRINTED,
        "unipotent.uv": CORRECTED,
    }


def test_resolutions_p11(table11):
    assert table11.resolutions["chi_psi.order_two"] == CORRECTED
    assert table11.resolutions["W.split"] == CORRECTED


def test_half_discrete_unipotent_values(table7):
    t = standard_generators(7)[1]
    prime = _index(table7, "chi_prime")
    value = char_value(table7, prime, t)
    assert value.real == pytest.approx(-0.5)
    assert abs(value.imag) == pytest.approx(7 ** 0.5 / 2)


def test_class_function_and_inverse_symmetry(table11):
    rng = random.Random(11)
    elems = enumerate_group(11)
    for _ in range(200):
        g, h = rng.choice(elems), rng.choice(elems)
        k = rng.randrange(len(table11.chars))
        value = char_value(table11, k, g)
        assert char_value(table11, k, h * g * inverse(h)) == pytest.approx(value)
        assert char_value(table11, k, inverse(g)) == pytest.approx(value.conjugate())


@pytest.mark.parametrize(
    "p, error",
    [(13, UnsupportedCongruenceError), (5, UnsupportedCongruenceError), (3, DegenerateTableError), (8, InvalidModulusError)],
)
def test_build_errors(p, error):
    with pytest.raises(error):
        build_character_table(p)


def test_index_errors(table7):
    t = standard_generators(7)[1]
    with pytest.raises(CharacterIndexError):
        char_value(table7, 6, t)
    with pytest.raises(ModulusMismatchError):
        class_index(table7, standard_generators(11)[1])


def test_trivial_group_table():
    trivial = CharacterTable(
        p=1,
        classes=(ConjClassLabel(ClassKind.IDENTITY, None, 1, 1),),
        chars=(Character("U", 1, (1 + 0j,)),),
    )
    assert orthogonality_defect(trivial) == 0


def test_json_round_trip_preserves_table(table7):
    restored = table_from_json(table_to_json(table7))
    assert restored.classes == table7.classes
    assert [c.size for c in restored.classes] == [c.size for c in table7.classes]
    assert restored.resolutions == table7.resolutions
    assert orthogonality_defect(restored) < 1e-9
    t = standard_generators(7)[1]
    for k in range(len(table7.chars)):
        assert char_value(restored, k, t) == pytest.approx(char_value(table7, k, t))


def test_csv_export(table7):
    lines = table_to_csv(table7).strip().splitlines()
    assert lines[0].startswith("character,degree,identity")
    assert len(lines) == 7
    assert lines[1].startswith("U,1,")


def test_cached_table_is_reused(tmp_path, table7):
    cache = JsonCache(tmp_path, enabled=True)
    first = load_or_build_table(7, cache)
    with patch("src.chartab.build_character_table") as mock_build:
        second = load_or_build_table(7, cache)
        mock_build.assert_not_called()
    assert second.classes == first.classes
    assert len(list(tmp_path.glob("*.json"))) == 1
