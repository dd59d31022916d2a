import pytest

from src.errors import InvalidModulusError, SignatureFormatError
from src.formats import (
    complex_pair,
    format_signature_text,
    pair_complex,
    parse_matrix,
    parse_signature_text,
    write_csv,
)
from src.psl2 import PSL2Elem


@pytest.mark.parametrize(
    "text, expected",
    [
        ("[[6,0],[0,6]] mod 7", PSL2Elem.identity(7)),
        ("[[1, 1], [0, 1]] mod 7", PSL2Elem.from_matrix(1, 1, 0, 1, 7)),
        (" [[-1,0],[0,-1]]mod 11", PSL2Elem.identity(11)),
    ],
)
def test_parse_matrix(text, expected):
    assert parse_matrix(text) == expected


def test_matrix_text_round_trip():
    g = PSL2Elem.from_matrix(2, 3, 1, 2, 7)
    assert str(g) == "[[2,3],[1,2]] mod 7"
    assert parse_matrix(str(g)) == g


def test_parse_matrix_errors():
    with pytest.raises(InvalidModulusError):
        parse_matrix("[[1,1],[0,1]]")
    with pytest.raises(InvalidModulusError):
        parse_matrix("[[1,1],[0,1]] mod 7", p=11)
    with pytest.raises(InvalidModulusError):
        parse_matrix("1 1 0 1")
    assert parse_matrix("[[1,1],[0,1]]", p=7).p == 7


def test_signature_text():
    assert parse_signature_text("0:2,3,7") == (0, (2, 3, 7))
    assert parse_signature_text("2:-") == (2, ())
    assert format_signature_text(2, ()) == "2:-"
    assert format_signature_text(1, (3, 3)) == "1:3,3"
    with pytest.raises(SignatureFormatError):
        parse_signature_text("2")


def test_complex_pairs_have_no_negative_zero():
    pair = complex_pair(complex(-1e-15, -0.0))
    assert pair == [0.0, 0.0]
    assert str(pair[0]) == "0.0"
    assert pair_complex([1.5, -2.0]) == complex(1.5, -2.0)


def test_write_csv():
    assert write_csv(["k", "ball"], [(0, 1), (1, 4)]) == "k,ball\n0,1\n1,4\n"
