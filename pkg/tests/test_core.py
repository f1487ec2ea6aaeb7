import math

import pytest
from hypothesis import given, strategies as st

from ghznet.core import binary_entropy, check_probability, transmission

probabilities = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def test_binary_entropy_endpoints():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == 1.0


def test_binary_entropy_quarter():
    # -0.25*log2(0.25) - 0.75*log2(0.75), frozen from a high-precision evaluation
    assert binary_entropy(0.25) == pytest.approx(0.8112781244591328, abs=1e-15)


@pytest.mark.parametrize("bad", [-0.1, 1.1, math.nan])
def test_binary_entropy_domain(bad):
    with pytest.raises(ValueError):
        binary_entropy(bad)


@given(probabilities)
def test_binary_entropy_symmetric(q):
    assert binary_entropy(q) == pytest.approx(binary_entropy(1.0 - q), abs=1e-12)


@given(probabilities, probabilities)
def test_binary_entropy_concave(a, b):
    mid = binary_entropy((a + b) / 2.0)
    assert mid >= (binary_entropy(a) + binary_entropy(b)) / 2.0 - 1e-12


def test_transmission_anchors():
    assert transmission(0.0) == 1.0
    assert transmission(50.0) == pytest.approx(0.1, abs=1e-15)
    # d solving 10^(-0.02 d) = 1/2
    assert transmission(50.0 * math.log10(2.0)) == pytest.approx(0.5, abs=1e-15)


def test_transmission_rejects_negative():
    with pytest.raises(ValueError):
        transmission(-1.0)


@given(
    st.floats(min_value=0.0, max_value=200.0),
    st.floats(min_value=0.0, max_value=200.0),
)
def test_transmission_multiplicative(d1, d2):
    assert transmission(d1 + d2) == pytest.approx(
        transmission(d1) * transmission(d2), abs=1e-12
    )


@given(st.floats(min_value=0.0, max_value=500.0), st.floats(min_value=1e-6, max_value=10.0))
def test_transmission_strictly_decreasing(d, step):
    assert transmission(d + step) < transmission(d)


def test_check_probability():
    assert check_probability(0.3) == 0.3
    with pytest.raises(ValueError):
        check_probability(1.5, "p")
