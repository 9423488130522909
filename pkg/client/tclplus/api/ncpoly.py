"""Noncommutative polynomials over the TCL symbols.

Symbols are the memory-kernel pieces ``S1, S2, ...``, their adjoints
``S1dag, ...``, the projector ``P`` and the Liouvillian ``L`` together with
their adjoints. Each symbol carries a coupling grade: ``Sm`` has grade ``m``,
``L`` has grade 1 and ``P`` grade 0.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np

from tclplus.exceptions import InvalidOrder


class SymbolKind(str, enum.Enum):
    SIGMA = "S"
    SIGMA_DAGGER = "Sdag"
    P = "P"
    P_DAGGER = "Pdag"
    L = "L"
    L_DAGGER = "Ldag"

    @property
    def is_dagger(self):
        return self in (SymbolKind.SIGMA_DAGGER, SymbolKind.P_DAGGER, SymbolKind.L_DAGGER)

    def dagger(self):
        return _DAGGER_PAIRS[self]


_DAGGER_PAIRS = {
    SymbolKind.SIGMA: SymbolKind.SIGMA_DAGGER,
    SymbolKind.SIGMA_DAGGER: SymbolKind.SIGMA,
    SymbolKind.P: SymbolKind.P_DAGGER,
    SymbolKind.P_DAGGER: SymbolKind.P,
    SymbolKind.L: SymbolKind.L_DAGGER,
    SymbolKind.L_DAGGER: SymbolKind.L,
}

_LABEL_RE = re.compile(r"^(S)(\d+)(dag)?$|^(P|L)(dag)?$")


@dataclass(frozen=True, order=True)
class NcSymbol:
    kind: SymbolKind
    order: int

    def __post_init__(self):
        if self.kind in (SymbolKind.SIGMA, SymbolKind.SIGMA_DAGGER):
            if self.order < 1:
                raise InvalidOrder(f"sigma symbols need order >= 1, got {self.order}")
        elif self.kind in (SymbolKind.L, SymbolKind.L_DAGGER):
            if self.order != 1:
                raise InvalidOrder("L symbols have order 1")
        elif self.order != 0:
            raise InvalidOrder("P symbols have order 0")

    @classmethod
    def sigma(cls, m, dagger=False):
        return cls(SymbolKind.SIGMA_DAGGER if dagger else SymbolKind.SIGMA, m)

    @classmethod
    def from_label(cls, label):
        match = _LABEL_RE.match(label)
        if not match:
            raise ValueError(f"unknown symbol label {label!r}")
        if match.group(1):
            return cls.sigma(int(match.group(2)), dagger=bool(match.group(3)))
        kind = SymbolKind(match.group(4) + (match.group(5) or ""))
        return cls(kind, 1 if match.group(4) == "L" else 0)

    @property
    def grade(self):
        return self.order

    @property
    def is_dagger(self):
        return self.kind.is_dagger

    @property
    def label(self):
        if self.kind is SymbolKind.SIGMA:
            return f"S{self.order}"
        if self.kind is SymbolKind.SIGMA_DAGGER:
            return f"S{self.order}dag"
        return self.kind.value

    def dagger(self):
        return NcSymbol(self.kind.dagger(), self.order)

    def __repr__(self):
        return self.label


P = NcSymbol(SymbolKind.P, 0)
P_DAG = NcSymbol(SymbolKind.P_DAGGER, 0)
L = NcSymbol(SymbolKind.L, 1)
L_DAG = NcSymbol(SymbolKind.L_DAGGER, 1)

Word = Tuple[NcSymbol, ...]


def _sort_key(word: Word):
    return (len(word), tuple((s.kind.is_dagger, s.kind.value, s.order) for s in word))


@dataclass(frozen=True)
class NcMonomial:
    coeff: int
    factors: Word

    @property
    def grade(self):
        return sum(s.grade for s in self.factors)

    @property
    def has_dagger(self):
        return any(s.is_dagger for s in self.factors)

    @property
    def labels(self):
        return [s.label for s in self.factors]

    def __str__(self):
        body = "".join(self.labels) or "I"
        return body if self.coeff == 1 else f"{self.coeff}*{body}"


class NcPolynomial:
    """Integer-coefficient sum of words, like terms merged, zeros dropped."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Word, int] | Iterable[NcMonomial] = ()):
        merged: Dict[Word, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else (
            (m.factors, m.coeff) for m in terms
        )
        for word, coeff in items:
            word = tuple(word)
            merged[word] = merged.get(word, 0) + int(coeff)
        self._terms = {w: c for w, c in merged.items() if c != 0}

    @classmethod
    def symbol(cls, sym: NcSymbol, coeff=1):
        return cls({(sym,): coeff})

    @classmethod
    def one(cls):
        return cls({(): 1})

    @classmethod
    def from_labels(cls, items):
        """Build from ``[(coeff, ["S1", "S2dag"]), ...]``."""
        return cls({tuple(NcSymbol.from_label(x) for x in labels): c for c, labels in items})

    @property
    def terms(self):
        return [NcMonomial(c, w) for w, c in sorted(self._terms.items(), key=lambda i: _sort_key(i[0]))]

    def as_dict(self):
        return dict(self._terms)

    def is_zero(self):
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, NcPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        merged = dict(self._terms)
        for w, c in other._terms.items():
            merged[w] = merged.get(w, 0) + c
        return NcPolynomial(merged)

    def __neg__(self):
        return NcPolynomial({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        if not isinstance(scalar, (int, np.integer)):
            return NotImplemented
        return NcPolynomial({w: int(scalar) * c for w, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return other * self
        return self.multiply(other)

    def multiply(self, other, max_grade=None):
        out: Dict[Word, int] = {}
        for w1, c1 in self._terms.items():
            g1 = sum(s.grade for s in w1)
            if max_grade is not None and g1 > max_grade:
                continue
            for w2, c2 in other._terms.items():
                if max_grade is not None and g1 + sum(s.grade for s in w2) > max_grade:
                    continue
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return NcPolynomial(out)

    def grade_part(self, grade):
        return NcPolynomial({w: c for w, c in self._terms.items() if sum(s.grade for s in w) == grade})

    def dagger_part(self):
        """Terms containing at least one adjoint symbol."""
        return NcPolynomial({w: c for w, c in self._terms.items() if any(s.is_dagger for s in w)})

    def plain_part(self):
        return NcPolynomial({w: c for w, c in self._terms.items() if not any(s.is_dagger for s in w)})

    def adjoint(self):
        return NcPolynomial({tuple(s.dagger() for s in reversed(w)): c for w, c in self._terms.items()})

    def substitute(self, rules: Mapping[NcSymbol, "NcPolynomial"]):
        """Replace symbols by polynomials; symbols without a rule stay."""
        out = NcPolynomial()
        for w, c in self._terms.items():
            acc = NcPolynomial.one()
            for s in w:
                acc = acc * rules.get(s, NcPolynomial.symbol(s))
            out = out + c * acc
        return out

    def evaluate(self, values: Mapping[NcSymbol, np.ndarray], dim: int):
        """Bind symbols to square matrices (or scalars when ``dim`` is 0)."""
        if dim == 0:
            total = 0.0 + 0.0j
            for w, c in self._terms.items():
                total += c * np.prod([values[s] for s in w]) if w else c
            return total
        total = np.zeros((dim, dim), dtype=np.complex128)
        for w, c in self._terms.items():
            prod = np.eye(dim, dtype=np.complex128)
            for s in w:
                prod = prod @ values[s]
            total += c * prod
        return total

    def to_json(self):
        return [{"coeff": m.coeff, "factors": m.labels} for m in self.terms]

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(str(m) for m in self.terms)


def sigma_sum(max_grade, dagger=False):
    """``S1 + S2 + ... + S_max_grade``."""
    return NcPolynomial({(NcSymbol.sigma(m, dagger),): 1 for m in range(1, max_grade + 1)})
