import pytest

from strengthlab.field import parse_field
from strengthlab.poly import parse_poly


@pytest.fixture
def P():
    """P("x1*x2", "GF(2)", 4) -> Polynomial."""
    def make(text, field="GF(2)", n=2, blocks=None):
        return parse_poly(text, parse_field(field), n, blocks)
    return make
