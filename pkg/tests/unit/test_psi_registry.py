"""Test suite for psi functions, natural functions and the order psi1 << psi2."""
import math

import pytest

from src.core.config import PrecedenceConfig
from src.core.exceptions import DomainError, RelationUndefinedError
from src.domain.models import Precedence, PsiFunction
from src.services.psi_registry import (
    PsiRegistry,
    natural_psi,
    psi_constant,
    psi_power,
    psi_product,
    psi_quotient,
    psi_tilde,
)

GOLDEN_RATIO = 0.5 * (1.0 + math.sqrt(5.0))


@pytest.fixture
def registry():
    return PsiRegistry(PrecedenceConfig())


class TestFamilies:
    """Test cases for the built-in psi families."""

    def test_power(self):
        """Test p^(1/lambda) inside the support and +inf outside."""
        psi = psi_power(2.0)
        assert psi(4.0) == pytest.approx(2.0)
        assert psi(1.0) == math.inf
        assert psi(0.5) == math.inf

    def test_power_restricted_support(self):
        """Test that a finite support cuts the function off at b."""
        psi = psi_power(1.0, 1.0, 3.0)
        assert psi(2.5) == pytest.approx(2.5)
        assert psi(3.0) == math.inf

    def test_constant(self):
        """Test the constant family."""
        assert psi_constant(3.0)(17.0) == 3.0

    def test_invalid_support(self):
        """Test that supports violating 1 <= a < b raise DomainError."""
        with pytest.raises(DomainError):
            psi_power(1.0, 0.5, 2.0)
        with pytest.raises(DomainError):
            psi_power(1.0, 3.0, 2.0)

    def test_invalid_lambda(self):
        """Test that lambda <= 0 raises DomainError."""
        with pytest.raises(DomainError):
            psi_power(0.0)

    def test_scaled(self):
        """Test c * psi."""
        psi = psi_power(1.0).scaled(2.0)
        assert psi(3.0) == pytest.approx(6.0)

    def test_product_and_quotient(self):
        """Test that product and quotient act pointwise on the common support."""
        nu = psi_product(psi_power(1.0, 1.0, 10.0), psi_power(2.0, 2.0, 20.0))
        assert nu.support == (2.0, 10.0)
        assert nu(4.0) == pytest.approx(8.0)
        back = psi_quotient(nu, psi_power(2.0))
        assert back(4.0) == pytest.approx(4.0)

    def test_disjoint_supports(self):
        """Test that disjoint supports raise DomainError."""
        with pytest.raises(DomainError):
            psi_product(psi_power(1.0, 1.0, 2.0), psi_power(1.0, 3.0, 4.0))


class TestPsiTilde:
    """Test cases for the piecewise psi-tilde."""

    def test_golden_ratio(self):
        """Test h(a=1, alpha=1, beta=1) = (1 + sqrt 5) / 2."""
        tilde = psi_tilde(1.0, 1.0, 1.0)
        assert tilde.h == pytest.approx(GOLDEN_RATIO, rel=1e-12)

    @pytest.mark.parametrize("a,alpha,beta", [(1.0, 1.0, 2.0), (2.0, 0.5, 2.0), (1.5, 3.0, 0.25), (5.0, 2.0, 1.0)])
    def test_continuity_at_crossover(self, a, alpha, beta):
        """Test (h - a)^(-alpha) = h^beta at the computed crossover."""
        tilde = psi_tilde(a, alpha, beta)
        assert tilde.h > a
        assert (tilde.h - a) ** (-alpha) == pytest.approx(tilde.h ** beta, rel=1e-8)

    def test_branches(self):
        """Test that each side of h uses its own branch."""
        tilde = psi_tilde(1.0, 1.0, 1.0)
        assert tilde(1.5) == pytest.approx(2.0)
        assert tilde(3.0) == pytest.approx(3.0)
        assert tilde(1.0) == math.inf

    def test_as_psi(self):
        """Test conversion to a PsiFunction on (a, inf)."""
        psi = psi_tilde(2.0, 1.0, 1.0).as_psi()
        assert psi.support == (2.0, math.inf)

    def test_invalid_parameters(self):
        """Test that a < 1 or non-positive exponents raise DomainError."""
        with pytest.raises(DomainError):
            psi_tilde(0.5, 1.0, 1.0)
        with pytest.raises(DomainError):
            psi_tilde(1.0, 0.0, 1.0)


class TestNaturalPsi:
    """Test cases for natural_psi."""

    def test_indicator_exact(self):
        """Test that delta^(1/p) is reproduced between the samples."""
        delta = 7.0
        ps = [1.0, 1.5, 2.0, 4.0, 10.0]
        psi = natural_psi([(p, delta ** (1.0 / p)) for p in ps])
        for p in (1.2, 3.0, 7.5):
            assert psi(p) == pytest.approx(delta ** (1.0 / p), rel=1e-13)
        assert psi.support == (1.0, 10.0)

    def test_requires_increasing_samples(self):
        """Test that unsorted exponents raise DomainError."""
        with pytest.raises(DomainError):
            natural_psi([(2.0, 1.0), (1.5, 1.0)])

    def test_requires_positive_values(self):
        """Test that zero norms raise DomainError."""
        with pytest.raises(DomainError):
            natural_psi([(1.0, 0.0), (2.0, 1.0)])


class TestPrecedes:
    """Test cases for PsiRegistry.precedes."""

    def test_sqrt_precedes_identity(self, registry):
        """Test p^(1/2) << p."""
        verdict = registry.precedes(psi_power(2.0), psi_power(1.0), registry.power_probe())
        assert verdict is Precedence.TRUE

    def test_identity_does_not_precede_itself(self, registry):
        """Test that p << p is false."""
        verdict = registry.precedes(psi_power(1.0), psi_power(1.0), registry.power_probe())
        assert verdict is Precedence.FALSE

    def test_oscillating_ratio(self, registry):
        """Test that a ratio oscillating in [1, 2] is false."""
        wobble = PsiFunction(1.0, math.inf, lambda p: p * (1.0 + math.sin(p) ** 2), "wobble")
        assert registry.precedes(wobble, psi_power(1.0), registry.power_probe()) is Precedence.FALSE

    def test_bounded_psi2(self, registry):
        """Test that a bounded psi2 raises RelationUndefinedError."""
        with pytest.raises(RelationUndefinedError):
            registry.precedes(psi_power(1.0), psi_constant(1.0), registry.power_probe())

    def test_short_probe(self, registry):
        """Test that a probe shorter than the window raises DomainError."""
        with pytest.raises(DomainError):
            registry.precedes(psi_power(2.0), psi_power(1.0), [2.0, 4.0])

    def test_probe_outside_support(self, registry):
        """Test that probe points outside the support raise DomainError."""
        with pytest.raises(DomainError):
            registry.precedes(psi_power(2.0, 1.0, 100.0), psi_power(1.0), registry.power_probe())


class TestDescriptors:
    """Test cases for PsiRegistry.build and from_descriptor."""

    def test_power_descriptor(self, registry):
        """Test parsing of a power descriptor with an explicit support."""
        psi = registry.from_descriptor("power:lambda=2,a=1,b=inf")
        assert psi(9.0) == pytest.approx(3.0)
        assert psi.upper == math.inf

    def test_tilde_descriptor(self, registry):
        """Test that the tilde family builds psi-tilde."""
        psi = registry.from_descriptor("tilde:a=1,alpha=1,beta=1")
        assert psi(GOLDEN_RATIO) == pytest.approx(GOLDEN_RATIO, rel=1e-9)

    def test_unknown_family(self, registry):
        """Test that unknown families raise DomainError."""
        with pytest.raises(DomainError):
            registry.build("exotic")

    def test_malformed(self, registry):
        """Test that a parameter without a value raises DomainError."""
        with pytest.raises(DomainError):
            registry.from_descriptor("power:lambda")
