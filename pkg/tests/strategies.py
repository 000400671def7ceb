from hypothesis import assume, strategies as st

from recurzeta.errors import RecurZetaError
from recurzeta.lrs_core import RecurrenceSpec, minimal_polynomial
from recurzeta.spectral import normalize

small = st.integers(min_value=-9, max_value=9)


@st.composite
def specs(draw, max_order=5):
    d = draw(st.integers(min_value=1, max_value=max_order))
    coeffs = tuple(draw(st.lists(small, min_size=d, max_size=d)))
    initial = tuple(draw(st.lists(small, min_size=d, max_size=d)))
    assume(any(initial))
    return RecurrenceSpec(d, coeffs, initial)


@st.composite
def admissible_quadratics(draw):
    """Degree-2 specs whose minimal polynomial has degree 2 and that pass the hypotheses."""
    spec = draw(specs(max_order=2).filter(lambda s: s.order == 2))
    try:
        assume(minimal_polynomial(spec).degree == 2)
        normalize(spec)
    except RecurZetaError:
        assume(False)
    return spec
