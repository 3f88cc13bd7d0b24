"""Working field configuration: Q_p or a single quadratic extension Q_p(sqrt d)."""
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import FieldConfigError

DEFAULT_PRECISION = 60
MIN_DIGITS = 8
GUARD = 4


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def vp_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def vp_rational(x, p: int) -> int:
    x = Fraction(x)
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@dataclass(frozen=True)
class FieldConfig:
    """Q_p (``ext_square=None``) or Q_p(theta) with theta**2 == ext_square.

    ``precision`` counts significant p-adic digits.  Internally the unit part of
    every scalar is tracked in digits of the uniformizer, which is ``p`` for
    the base field and the unramified extension and ``theta`` when the
    extension is ramified; ``ram`` (1 or 2) converts between the two.
    """

    prime: int
    precision: int = DEFAULT_PRECISION
    ext_square: int | None = None
    # derived
    ram: int = field(init=False, default=1)
    theta_sq: int | None = field(init=False, default=None)

    def __post_init__(self):
        p, n = self.prime, self.precision
        if not isinstance(p, int) or not is_prime(p):
            raise FieldConfigError(f"{p!r} is not prime")
        if p == 2:
            raise FieldConfigError("p = 2 is not supported (residue characteristic 2)")
        if not isinstance(n, int) or n < MIN_DIGITS:
            raise FieldConfigError(f"precision must be an integer >= {MIN_DIGITS}")
        d = self.ext_square
        if d is None:
            return
        if not isinstance(d, int) or d == 0:
            raise FieldConfigError("ext_square must be a nonzero integer")
        k = vp_int(d, p)
        u = d // p ** k
        if k % 2 == 0 and legendre(u, p) == 1:
            raise FieldConfigError(f"{d} is a square in Q_{p}; no extension needed")
        if k % 2 == 1:
            # Q_p(sqrt d) = Q_p(sqrt(p*u)), totally ramified
            object.__setattr__(self, "ram", 2)
            object.__setattr__(self, "theta_sq", p * u)
        else:
            object.__setattr__(self, "ram", 1)
            object.__setattr__(self, "theta_sq", u)

    @property
    def has_ext(self) -> bool:
        return self.theta_sq is not None

    @property
    def unramified_ext(self) -> bool:
        return self.has_ext and self.ram == 1

    @property
    def residue_order(self) -> int:
        return self.prime ** 2 if self.unramified_ext else self.prime

    @property
    def cap(self) -> int:
        """Relative precision cap in uniformizer digits."""
        return self.precision * self.ram

    @property
    def modulus(self) -> int:
        return self.prime ** (self.precision + GUARD)
