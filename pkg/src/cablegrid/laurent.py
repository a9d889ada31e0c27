"""Integer Laurent polynomials in one variable, used as a knot-type fingerprint."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping


@dataclass(frozen=True)
class LaurentPoly:
    """Sparse integer Laurent polynomial ``sum(c * t**e)``.

    Zero coefficients are never stored. Use :meth:`normalized` to obtain the
    representative with lowest exponent zero and positive lowest coefficient.
    """

    coeffs: tuple[tuple[int, int], ...]

    @classmethod
    def from_map(cls, mapping: Mapping[int, int]) -> LaurentPoly:
        items = sorted((int(e), int(c)) for e, c in mapping.items() if c != 0)
        return cls(tuple(items))

    def as_dict(self) -> dict[int, int]:
        return dict(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def normalized(self) -> LaurentPoly:
        if not self.coeffs:
            return self
        low, lead = self.coeffs[0]
        sign = 1 if lead > 0 else -1
        return LaurentPoly(tuple((e - low, sign * c) for e, c in self.coeffs))

    def __mul__(self, other: LaurentPoly) -> LaurentPoly:
        out: dict[int, int] = {}
        for e1, c1 in self.coeffs:
            for e2, c2 in other.coeffs:
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly.from_map(out)

    def substitute_power(self, k: int) -> LaurentPoly:
        """Return ``p(t**k)``."""
        return LaurentPoly.from_map({e * k: c for e, c in self.coeffs})

    def to_json(self) -> dict:
        return {"coeffs": {str(e): c for e, c in self.coeffs}}

    @classmethod
    def from_json(cls, data: Mapping) -> LaurentPoly:
        return cls.from_map({int(e): int(c) for e, c in data["coeffs"].items()})

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for e, c in reversed(self.coeffs):
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                power = "t" if e == 1 else f"t^{e}"
                body = power if mag == 1 else f"{mag}*{power}"
            terms.append(("-" if c < 0 else "+", body))
        head_sign, head = terms[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text
