"""Reaction networks with exact integer stoichiometry and mass-action kinetics.

A network is an ordered list of species plus two integer matrices: the source
matrix (reactant coefficients, one column per reaction) and the stoichiometric
matrix (net change per reaction).  Targets are derived as source + stoich and
must be nonnegative.  All structural data is exact; rate constants are kept as
Fractions when the input allows it and floats otherwise.

Text grammar (one reaction per ';'- or newline-separated statement)::

    reaction := complex "->" complex ["@" rational]
    complex  := "0" | term ("+" term)*
    term     := [integer] species-name

Rate constants default to 1 when omitted.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

Number = Union[int, float, Fraction]


class NetworkError(ValueError):
    """Malformed network description."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        if line:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Complex:
    """Formal nonnegative integer combination of species."""

    coefficients: Tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.coefficients):
            raise NetworkError("complex has a negative coefficient")

    @property
    def molecularity(self) -> int:
        return sum(self.coefficients)

    def format(self, species: Sequence[str]) -> str:
        terms = []
        for coef, name in zip(self.coefficients, species):
            if coef == 0:
                continue
            terms.append(name if coef == 1 else f"{coef}{name}")
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class ReactionNetwork:
    """Species list, n x m source matrix and n x m stoichiometric matrix."""

    species: Tuple[str, ...]
    source_matrix: Tuple[Tuple[int, ...], ...]   # rows = species, cols = reactions
    stoich_matrix: Tuple[Tuple[int, ...], ...]
    duplicate_reactions: Tuple[int, ...] = ()    # flagged, not rejected

    def __post_init__(self):
        n = len(self.species)
        if len(set(self.species)) != n:
            raise NetworkError("duplicate species names")
        if len(self.source_matrix) != n or len(self.stoich_matrix) != n:
            raise NetworkError("matrix row count does not match species count")
        m = self.num_reactions
        for row in itertools.chain(self.source_matrix, self.stoich_matrix):
            if len(row) != m:
                raise NetworkError("ragged matrix")
        for j in range(m):
            col_change = False
            for i in range(n):
                a = self.source_matrix[i][j]
                c = self.stoich_matrix[i][j]
                if a < 0:
                    raise NetworkError(f"negative source coefficient in reaction {j}")
                if a + c < 0:
                    raise NetworkError(f"negative target coefficient in reaction {j}")
                col_change = col_change or c != 0
            if not col_change:
                raise NetworkError(f"reaction {j} does not change any species")

    @property
    def num_species(self) -> int:
        return len(self.species)

    @property
    def num_reactions(self) -> int:
        return len(self.source_matrix[0]) if self.species else 0

    def source_of(self, j: int) -> Complex:
        return Complex(tuple(row[j] for row in self.source_matrix))

    def target_of(self, j: int) -> Complex:
        return Complex(tuple(row[j] + crow[j] for row, crow in zip(self.source_matrix, self.stoich_matrix)))

    def reaction_tuples(self) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """(source, target) coefficient tuples, one per reaction."""
        return [
            (self.source_of(j).coefficients, self.target_of(j).coefficients)
            for j in range(self.num_reactions)
        ]

    def render(self) -> str:
        """Inverse of parse_network (up to whitespace)."""
        parts = []
        for j in range(self.num_reactions):
            parts.append(f"{self.source_of(j).format(self.species)} -> {self.target_of(j).format(self.species)}")
        return "; ".join(parts)

    def permuted(self, species_perm: Sequence[int], reaction_perm: Optional[Sequence[int]] = None) -> "ReactionNetwork":
        """Relabel species by `species_perm` (new row i = old row species_perm[i])
        and optionally reorder reactions."""
        rperm = list(reaction_perm) if reaction_perm is not None else list(range(self.num_reactions))
        src = tuple(tuple(self.source_matrix[p][j] for j in rperm) for p in species_perm)
        sto = tuple(tuple(self.stoich_matrix[p][j] for j in rperm) for p in species_perm)
        names = tuple(self.species[p] for p in species_perm)
        return ReactionNetwork(names, src, sto)

    def to_json_dict(self) -> dict:
        return {
            "species": list(self.species),
            "source": [list(r) for r in self.source_matrix],
            "stoich": [list(r) for r in self.stoich_matrix],
        }


_TOKEN = re.compile(r"\s*(->|@|\+|;|\n|-|[0-9]+(?:/[0-9]+|\.[0-9]+)?|[A-Za-z_][A-Za-z_0-9]*)")


def _tokenize(text: str):
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise NetworkError(f"unexpected character {stripped[0]!r}", line, col + (len(text[pos:]) - len(stripped)))
        ws = m.start(1) - pos
        col += ws
        tok = m.group(1)
        tokens.append((tok, line, col))
        if tok == "\n":
            line += 1
            col = 1
        else:
            col += len(tok)
        pos = m.end()
    return tokens


def _parse_rational(tok: str) -> Fraction:
    if "." in tok:
        return Fraction(tok)
    if "/" in tok:
        p, q = tok.split("/")
        return Fraction(int(p), int(q))
    return Fraction(int(tok))


def parse_network(text: str) -> Tuple[ReactionNetwork, List[Fraction]]:
    """Parse the reaction grammar; returns (network, rate constants).

    Species are ordered by first appearance.  Duplicate reactions (identical
    source and target) are kept but flagged on the network.  Reactions that
    change nothing, and negative coefficients, are rejected.
    """
    tokens = _tokenize(text)
    statements: List[List[Tuple[str, int, int]]] = [[]]
    for tok in tokens:
        if tok[0] in (";", "\n"):
            if statements[-1]:
                statements.append([])
        else:
            statements[-1].append(tok)
    if statements and not statements[-1]:
        statements.pop()
    if not statements:
        raise NetworkError("no reactions")

    species: List[str] = []
    index: Dict[str, int] = {}

    def parse_complex(toks, start, stmt_end) -> Tuple[Dict[int, int], int]:
        coefs: Dict[int, int] = {}
        i = start
        expect_term = True
        while i < stmt_end:
            tok, ln, cl = toks[i]
            if tok in ("->", "@"):
                break
            if tok == "+":
                if expect_term:
                    raise NetworkError("misplaced '+'", ln, cl)
                expect_term = True
                i += 1
                continue
            if not expect_term:
                raise NetworkError(f"expected '+' or '->' before {tok!r}", ln, cl)
            sign = 1
            if tok == "-":
                sign = -1
                i += 1
                if i >= stmt_end:
                    raise NetworkError("dangling '-'", ln, cl)
                tok, ln, cl = toks[i]
            coef = 1
            if tok[0].isdigit():
                if "/" in tok or "." in tok:
                    raise NetworkError("species coefficients must be integers", ln, cl)
                coef = int(tok)
                i += 1
                if coef == 0 and (i >= stmt_end or toks[i][0] in ("+", "->", "@")):
                    # bare "0" is the empty complex
                    expect_term = False
                    continue
                if i >= stmt_end:
                    raise NetworkError("dangling coefficient", ln, cl)
                tok, ln, cl = toks[i]
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", tok):
                raise NetworkError(f"expected species name, got {tok!r}", ln, cl)
            if sign < 0:
                raise NetworkError(f"negative target coefficient for species {tok!r}", ln, cl)
            if tok not in index:
                index[tok] = len(species)
                species.append(tok)
            coefs[index[tok]] = coefs.get(index[tok], 0) + coef
            expect_term = False
            i += 1
        if expect_term:
            ln, cl = (toks[start][1], toks[start][2]) if start < len(toks) else (0, 0)
            raise NetworkError("empty complex", ln, cl)
        return coefs, i

    parsed = []  # (source dict, target dict, rate)
    for stmt in statements:
        end = len(stmt)
        src, i = parse_complex(stmt, 0, end)
        if i >= end or stmt[i][0] != "->":
            ln, cl = stmt[min(i, end - 1)][1:]
            raise NetworkError("expected '->'", ln, cl)
        tgt, i = parse_complex(stmt, i + 1, end)
        rate = Fraction(1)
        if i < end:
            tok, ln, cl = stmt[i]
            if tok != "@":
                raise NetworkError(f"unexpected {tok!r} after target", ln, cl)
            if i + 1 >= end:
                raise NetworkError("missing rate constant after '@'", ln, cl)
            rtok, ln, cl = stmt[i + 1]
            try:
                rate = _parse_rational(rtok)
            except (ValueError, ZeroDivisionError):
                raise NetworkError(f"bad rate constant {rtok!r}", ln, cl)
            if rate <= 0:
                raise NetworkError("rate constant must be positive", ln, cl)
            if i + 2 != end:
                raise NetworkError("trailing tokens after rate constant", stmt[i + 2][1], stmt[i + 2][2])
        if src == tgt:
            ln, cl = stmt[0][1], stmt[0][2]
            raise NetworkError("reaction does not change any species", ln, cl)
        parsed.append((src, tgt, rate))

    n = len(species)
    m = len(parsed)
    source = [[0] * m for _ in range(n)]
    stoich = [[0] * m for _ in range(n)]
    for j, (src, tgt, _) in enumerate(parsed):
        for i, c in src.items():
            source[i][j] = c
        for i in range(n):
            stoich[i][j] = tgt.get(i, 0) - src.get(i, 0)
    seen: Dict[Tuple, int] = {}
    dupes = []
    for j, (src, tgt, _) in enumerate(parsed):
        key = (tuple(sorted(src.items())), tuple(sorted(tgt.items())))
        if key in seen:
            dupes.append(j)
        else:
            seen[key] = j
    net = ReactionNetwork(
        tuple(species),
        tuple(tuple(r) for r in source),
        tuple(tuple(r) for r in stoich),
        duplicate_reactions=tuple(dupes),
    )
    return net, [r for (_, _, r) in parsed]


def network_from_reactions(
    reactions: Sequence[Tuple[Sequence[int], Sequence[int]]],
    species: Optional[Sequence[str]] = None,
) -> ReactionNetwork:
    """Build a network from (source, target) coefficient tuples."""
    if not reactions:
        raise NetworkError("no reactions")
    n = len(reactions[0][0])
    names = tuple(species) if species is not None else tuple(_default_names(n))
    source = tuple(tuple(int(r[0][i]) for r in reactions) for i in range(n))
    stoich = tuple(tuple(int(r[1][i]) - int(r[0][i]) for r in reactions) for i in range(n))
    return ReactionNetwork(names, source, stoich)


def _default_names(n: int) -> List[str]:
    base = ["X", "Y", "Z", "W", "V", "U"]
    if n <= len(base):
        return base[:n]
    return [f"X{i+1}" for i in range(n)]


def network_from_json(data: Union[str, dict]) -> Tuple[ReactionNetwork, List[Fraction]]:
    """Inverse of the JSON encoding {"species", "source", "stoich", "kappa"}."""
    obj = json.loads(data) if isinstance(data, str) else data
    net = ReactionNetwork(
        tuple(obj["species"]),
        tuple(tuple(int(v) for v in row) for row in obj["source"]),
        tuple(tuple(int(v) for v in row) for row in obj["stoich"]),
    )
    kappa = [Fraction(str(k)) for k in obj.get("kappa", [1] * net.num_reactions)]
    return net, kappa


@dataclass(frozen=True)
class MassActionSystem:
    """A reaction network together with positive rate constants."""

    network: ReactionNetwork
    kappa: Tuple[Number, ...]

    def __post_init__(self):
        if len(self.kappa) != self.network.num_reactions:
            raise NetworkError("kappa length does not match reaction count")
        if any((k <= 0) for k in self.kappa):
            raise NetworkError("rate constants must be positive")

    @property
    def is_exact(self) -> bool:
        return all(isinstance(k, (int, Fraction)) for k in self.kappa)

    def with_kappa(self, kappa: Sequence[Number]) -> "MassActionSystem":
        return MassActionSystem(self.network, tuple(kappa))

    def to_json_dict(self) -> dict:
        d = self.network.to_json_dict()
        d["kappa"] = [str(k) if isinstance(k, Fraction) else k for k in self.kappa]
        return d


def system(text: str) -> MassActionSystem:
    """Parse a network string into a mass-action system."""
    net, kappa = parse_network(text)
    return MassActionSystem(net, tuple(kappa))


def monomial(x: Sequence[Number], exponents: Sequence[int]) -> Number:
    """x^a with the 0^0 := 1 convention (zero exponents never contribute)."""
    out: Number = 1
    for xi, a in zip(x, exponents):
        if a == 0:
            continue
        out = out * xi ** a
    return out


def reaction_rates(sys: MassActionSystem, x: Sequence[Number]) -> List[Number]:
    """kappa_j * x^(source column j) for every reaction."""
    net = sys.network
    rates = []
    for j in range(net.num_reactions):
        expo = [net.source_matrix[i][j] for i in range(net.num_species)]
        rates.append(sys.kappa[j] * monomial(x, expo))
    return rates


def mass_action_rhs(sys: MassActionSystem, x: Sequence[Number]) -> List[Number]:
    """Right-hand side of the mass-action differential equation at state x.

    Exact when both x and kappa are rational, floating point otherwise.
    Raises on dimension mismatch or negative state.
    """
    net = sys.network
    if len(x) != net.num_species:
        raise NetworkError("state dimension does not match species count")
    if any(xi < 0 for xi in x):
        raise ValueError("state must be nonnegative")
    rates = reaction_rates(sys, x)
    return [
        sum(net.stoich_matrix[i][j] * rates[j] for j in range(net.num_reactions))
        for i in range(net.num_species)
    ]


def molecularity_profile(net: ReactionNetwork) -> Tuple[int, int]:
    """(max source molecularity, max target molecularity)."""
    if net.num_reactions == 0:
        return (0, 0)
    max_src = max(net.source_of(j).molecularity for j in range(net.num_reactions))
    max_tgt = max(net.target_of(j).molecularity for j in range(net.num_reactions))
    return (max_src, max_tgt)


def is_quadratic(net: ReactionNetwork) -> bool:
    return molecularity_profile(net)[0] <= 2


def is_trimolecular(net: ReactionNetwork) -> bool:
    return max(molecularity_profile(net)) <= 3


def trivial_species(net: ReactionNetwork) -> set:
    """Indices of species whose row of the stoichiometric matrix is zero."""
    return {
        i for i in range(net.num_species)
        if all(c == 0 for c in net.stoich_matrix[i])
    }


def drop_trivial_species(net: ReactionNetwork) -> ReactionNetwork:
    """Remove trivial species rows (reactions never degenerate: a column that
    is zero on all nontrivial rows would be zero everywhere, which is
    rejected at construction)."""
    keep = [i for i in range(net.num_species) if i not in trivial_species(net)]
    if len(keep) == net.num_species:
        return net
    if not keep:
        raise NetworkError("all species are trivial")
    return ReactionNetwork(
        tuple(net.species[i] for i in keep),
        tuple(net.source_matrix[i] for i in keep),
        tuple(net.stoich_matrix[i] for i in keep),
    )


def canonical_reaction_key(
    reactions: Sequence[Tuple[Tuple[int, ...], Tuple[int, ...]]],
    n: int,
) -> Tuple:
    """Lexicographically least encoding of a reaction list over all species
    permutations, with reactions sorted within each relabeling.  The key is a
    sorted tuple of (source, stoich-column) pairs."""
    best = None
    for perm in itertools.permutations(range(n)):
        key = tuple(sorted(
            (tuple(s[p] for p in perm), tuple(t[p] - s[p] for p in perm))
            for (s, t) in reactions
        ))
        if best is None or key < best:
            best = key
    return best


def canonical_form(net: ReactionNetwork) -> ReactionNetwork:
    """Lexicographically least relabeling over species and reaction orderings.

    Reaction order is canonicalized by sorting encoded columns, so only the
    n! species permutations are searched explicitly; n <= 5 here.
    """
    n = net.num_species
    cols = list(canonical_reaction_key(net.reaction_tuples(), n))
    source = tuple(tuple(col[0][i] for col in cols) for i in range(n))
    stoich = tuple(tuple(col[1][i] for col in cols) for i in range(n))
    return ReactionNetwork(tuple(_default_names(n)), source, stoich)


def canonical_key(net: ReactionNetwork) -> Tuple:
    """Hashable canonical invariant (usable as a dedup key)."""
    return canonical_reaction_key(net.reaction_tuples(), net.num_species)
