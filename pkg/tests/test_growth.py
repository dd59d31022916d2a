import pytest

from src.errors import GrowthInputError, ResourceLimitError
from src.growth import (
    CyclicElem,
    GrowthTable,
    cayley_growth,
    compare_quotient_vs_fuchsian,
    cyclic_family_growth,
    exponent_fit,
    family_growth,
    family_sweep,
    growth_rate,
    growth_table_from_json,
    growth_table_to_csv,
    growth_table_to_json,
    polygon_series,
    series_coeffs,
)
from src.psl2 import enumerate_group, standard_generators
from src.signatures import Signature


# --- Cayley graphs ---

def test_cyclic_one_generator():
    table = cayley_growth([CyclicElem(1, 6)], 5)
    assert table.balls == (1, 3, 5, 6, 6, 6)
    assert table.spheres == (1, 2, 2, 1, 0, 0)
    assert table.saturated_at == 3


@pytest.mark.parametrize("nmax, saturated_at", [(2, None), (3, 3), (4, 3)])
def test_saturation_detected_at_last_radius(nmax, saturated_at):
    table = cayley_growth([CyclicElem(1, 6)], nmax)
    assert table.saturated_at == saturated_at
    assert table.balls[-1] == (6 if saturated_at is not None else 5)


def test_cyclic_two_generators():
    table = cayley_growth([CyclicElem(3, 6), CyclicElem(2, 6)], 3)
    assert table.balls[:3] == (1, 4, 6)


def test_generating_set_matters():
    """Тест: рост Z_6 зависит от выбора порождающего множества."""
    one = cayley_growth([CyclicElem(1, 6)], 3)
    two = cayley_growth([CyclicElem(3, 6), CyclicElem(2, 6)], 3)
    assert one.balls[1] != two.balls[1]


def test_all_elements_give_diameter_one():
    gens = [CyclicElem(k, 6) for k in range(1, 6)]
    assert cayley_growth(gens, 2).balls[1] == 6


def test_psl2_standard_generators_saturate():
    table = cayley_growth(standard_generators(7), 60)
    assert table.balls[0] == 1
    assert table.balls[1] == 4
    assert table.balls[-1] == len(enumerate_group(7)) == 168
    assert table.saturated_at is not None
    assert all(b <= 168 for b in table.balls)
    assert list(table.balls) == sorted(table.balls)


def test_cayley_errors():
    with pytest.raises(GrowthInputError):
        cayley_growth([], 3)
    with pytest.raises(ResourceLimitError):
        cayley_growth(standard_generators(11), 30, budget=50)
    with pytest.raises(GrowthInputError):
        CyclicElem(1, 6) * CyclicElem(1, 7)


# --- Families ---

def test_family_of_one_is_identity():
    table = cayley_growth([CyclicElem(1, 6)], 4)
    assert family_growth([table], 4).balls == table.balls


def test_family_takes_pointwise_max():
    one = cayley_growth([CyclicElem(1, 6)], 3)
    two = cayley_growth([CyclicElem(3, 6), CyclicElem(2, 6)], 3)
    assert family_growth([one, two], 3).balls == two.balls


def test_family_needs_aligned_nmax():
    with pytest.raises(GrowthInputError):
        family_growth([cayley_growth([CyclicElem(1, 6)], 2)], 5)


@pytest.mark.parametrize("variant, ball_one", [("one-gen", 3), ("two-gen", 4)])
def test_cyclic_family_first_ball(variant, ball_one):
    assert cyclic_family_growth([(2, 3)], variant, 2).balls[1] == ball_one


def test_cyclic_family_rejects_non_coprime():
    with pytest.raises(GrowthInputError):
        cyclic_family_growth([(2, 4)], "one-gen", 3)


def test_linear_and_quadratic_families():
    pairs = [(2, 3), (4, 5), (6, 7)]
    linear = cyclic_family_growth(pairs, "one-gen", 10)
    assert linear.balls[5] == 11
    assert abs(exponent_fit(linear).exponent - 1) <= 0.2
    quadratic = cyclic_family_growth(pairs, "two-gen", 10)
    fit = exponent_fit(quadratic)
    assert abs(fit.exponent - 2) <= 0.2
    assert fit.window == (1, 3)


def test_family_sweep():
    sweep = family_sweep([7, 11], 80)
    assert sweep.family.balls[-1] == 660
    for table in sweep.tables.values():
        assert all(f >= b for f, b in zip(sweep.family.balls, table.balls))


@pytest.mark.slow
def test_family_sweep_large_primes():
    sweep = family_sweep([7, 11, 19, 23], 120)
    assert sweep.family.balls[-1] == sweep.tables[23].balls[-1] == 6072


# --- Rational series ---

def test_polygon_denominators():
    assert polygon_series(1, "cone3").denominator == (1, -2, -2, -2, -2, -2, 1)
    assert polygon_series(2, "smooth").denominator == (1, -6, -6, -6, 1)


@pytest.mark.parametrize("n, variant", [(1, "cone3"), (2, "cone3"), (2, "smooth"), (5, "smooth")])
def test_polygon_series_palindromic(n, variant):
    s = polygon_series(n, variant)
    assert s.numerator == s.numerator[::-1]
    assert s.denominator == s.denominator[::-1]
    assert all(a >= 0 for a in series_coeffs(s, 500))


def test_polygon_errors():
    with pytest.raises(GrowthInputError):
        polygon_series(0, "cone3")
    with pytest.raises(GrowthInputError):
        polygon_series(1, "smooth")


def test_series_coefficients():
    assert series_coeffs(polygon_series(2, "smooth"), 2) == [1, 8, 56]
    assert series_coeffs(polygon_series(1, "cone3"), 2) == [1, 4, 12]


@pytest.mark.parametrize("n, variant, lo, hi", [(2, "smooth", 6.9, 7.0), (1, "cone3", 2.9, 3.0)])
def test_growth_rate_brackets(n, variant, lo, hi):
    rate = growth_rate(polygon_series(n, variant))
    assert lo < rate.lam < hi
    assert rate.agrees
    assert rate.exponential


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("variant", ["cone3", "smooth"])
def test_growth_rate_near_4n(n, variant):
    rate = growth_rate(polygon_series(n, variant))
    assert 4 * n - 3 <= rate.lam <= 4 * n
    assert rate.dominant_root_check == pytest.approx(rate.lam, rel=1e-6)


# --- Quotients against the polygon group ---

def test_compare_p7():
    report = compare_quotient_vs_fuchsian(7, Signature(1, (3,)), 4, seed=0)
    assert not report.inconclusive
    assert (report.rows[0].gamma_p, report.rows[0].gamma_fuchsian) == (1, 1)
    assert report.rows[1].gamma_p == report.rows[1].gamma_fuchsian == 5
    assert report.inequality_holds
    assert report.equality_depth >= 1
    assert report.to_json()["rows"][1]["equal"] is True


def test_compare_rejects_unknown_polygon():
    with pytest.raises(GrowthInputError):
        compare_quotient_vs_fuchsian(7, Signature(0, (2, 3, 7)), 3)


@pytest.mark.slow
@pytest.mark.parametrize("p", [11, 19, 23])
def test_compare_inequality(p):
    report = compare_quotient_vs_fuchsian(p, Signature(1, (3,)), 5, seed=0)
    assert report.inequality_holds
    assert report.rows[1].equal


# --- Export ---

def test_growth_table_export():
    table = cayley_growth([CyclicElem(1, 6)], 3)
    lines = growth_table_to_csv(table).splitlines()
    assert lines[:3] == ["k,sphere,ball", "0,1,1", "1,2,3"]
    assert growth_table_from_json(growth_table_to_json(table)) == table
    assert GrowthTable.from_balls(table.balls) == GrowthTable.from_spheres(table.spheres)
