"""Registered data for the two worked examples (``data/examples.json``)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .exactcore import Matrix

CASES = ("A0", "A1")


@dataclass(frozen=True)
class ExampleCase:
    id: str
    raw: dict = field(repr=False)

    def value(self, key: str):
        return self.raw[key]["value"]

    @property
    def vertex_matrix(self) -> Matrix:
        return Matrix(self.value("vertex_matrix"))

    @property
    def divisor_matrix(self) -> Matrix:
        return Matrix(self.value("divisor_matrix"))

    @property
    def torus_rows(self) -> list[tuple[int, ...]]:
        return [tuple(r) for r in self.value("torus_coordinates")]

    @property
    def pic_gram_mirror(self) -> Matrix:
        return Matrix(self.value("pic_gram_mirror"))

    @property
    def points(self) -> list[tuple[int, ...]]:
        """Origin followed by the columns of the vertex matrix."""
        B = self.vertex_matrix
        return [(0,) * B.rows] + [B.col(j) for j in range(B.cols)]

    def discriminant(self):
        from .galedisc import LaurentPoly

        terms = self.raw["discriminant"]["terms"]
        return LaurentPoly({tuple(t["exp"]): Fraction(t["coef"]) for t in terms})

    def reduced_discriminant(self):
        from .galedisc import LaurentPoly

        terms = self.raw["reduced_discriminant"]["terms"]
        return LaurentPoly({tuple(t["exp"]): Fraction(t["coef"]) for t in terms})

    def triangulations(self) -> dict[str, list[tuple[int, ...]]]:
        tri = self.value("triangulations")
        return {k: [tuple(s) for s in tri[k]] for k in self.raw["triangulations"]["order"]}

    @property
    def cone_order(self) -> list[str]:
        return list(self.raw["triangulations"]["order"])

    def lattice(self, name: str):
        from .lattice import Lattice, direct_sum, e8, hyperbolic

        parts = []
        for b in self.raw["lattices"][name]["blocks"]:
            if b == "E8":
                parts.append(e8())
            elif b == "U":
                parts.append(hyperbolic(1))
            elif isinstance(b, str) and b.startswith("U(") and b.endswith(")"):
                parts.append(hyperbolic(int(b[2:-1])))
            elif isinstance(b, list):
                parts.append(Lattice(Matrix(b), str(b)))
            else:
                raise ValueError(f"unknown lattice block {b!r}")
        return direct_sum(*parts)


def load_registry(path: str | Path | None = None) -> dict[str, ExampleCase]:
    if path is None:
        text = resources.files("k3lab").joinpath("data/examples.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    data = json.loads(text)
    return {cid: ExampleCase(cid, d) for cid, d in data["cases"].items()}


@lru_cache(maxsize=None)
def _default() -> dict[str, ExampleCase]:
    return load_registry()


def get_case(case: str | ExampleCase) -> ExampleCase:
    if isinstance(case, ExampleCase):
        return case
    try:
        return _default()[case]
    except KeyError:
        raise ValueError(f"unknown case {case!r}; expected one of {CASES}") from None
