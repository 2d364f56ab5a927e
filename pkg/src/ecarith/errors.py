"""Exception types shared across the package."""


class DomainError(ValueError):
    """Mathematically invalid input: singular curve, off-curve point, bad torsion order."""


class ContextMismatch(TypeError):
    """Two ring elements from different contexts were combined."""


class NonInvertible(ArithmeticError):
    """A nonzero residue shares a factor with the modulus.

    ``factor`` is the nontrivial divisor gcd(value, N). ECM treats this as success.
    """

    def __init__(self, factor: int, modulus: int):
        super().__init__(f"{factor} divides {modulus}")
        self.factor = factor
        self.modulus = modulus


class DivisorCollision(ArithmeticError):
    """An evaluation point hit a zero or pole of an intermediate Miller function."""


class RetriesExhausted(RuntimeError):
    """Every re-randomization of the pairing evaluation points collided."""
