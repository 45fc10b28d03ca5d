"""Prefix-exchange tables: the full-group elements of a shift space.

A homeomorphism of the shift space that preserves shift orbits with
continuous cocycles acts by rewriting a depth-L prefix through a table
Phi: the cylinder of each depth-L word is carried onto the cylinder of
its image word, the suffix untouched.  A table is valid when every image
word ends in a symbol with the same follower row as the domain word and
the image cylinders partition the space.

Group structure is exact: composition, inversion and the canonical
minimal-depth form are all computed symbolically, and two tables denote
the same homeomorphism exactly when their canonical forms are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import (
    BadDomain,
    BadInput,
    ImagesDontCover,
    ImagesOverlap,
    InadmissibleWord,
    MatrixMismatch,
    NotInvariant,
    RowMismatch,
)
from .sft import (
    EMPTY_WORD,
    ClopenSet,
    EPPoint,
    TransitionMatrix,
    Word,
    canonicalize_clopen,
    format_word,
    parse_word,
)


class TableMap:
    """An element of the continuous full group as a prefix-exchange table.

    Immutable after construction.  Structural equality compares the raw
    table; use :meth:`same_map` to compare the homeomorphisms themselves.
    """

    __slots__ = ("matrix", "depth", "entries", "_key")

    def __init__(self, matrix: TransitionMatrix, depth: int, entries: dict[Word, Word]):
        self.matrix = matrix
        self.depth = depth
        self.entries = entries
        self._key = None

    @classmethod
    def identity(cls, matrix: TransitionMatrix) -> "TableMap":
        return cls(matrix, 0, {EMPTY_WORD: EMPTY_WORD})

    def _sorted_items(self) -> tuple[tuple[Word, Word], ...]:
        if self._key is None:
            self._key = tuple(sorted(self.entries.items()))
        return self._key

    def __eq__(self, other):
        return (
            isinstance(other, TableMap)
            and self.matrix == other.matrix
            and self.depth == other.depth
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.matrix, self.depth, self._sorted_items()))

    def __repr__(self):
        if self.is_identity:
            return "TableMap(identity)"
        return f"TableMap(depth={self.depth}, {len(self.entries)} entries)"

    @property
    def is_identity(self) -> bool:
        return all(v == k for k, v in self.entries.items())

    # -- pointwise action ---------------------------------------------------

    def apply(self, point: EPPoint) -> EPPoint:
        """Image of an eventually periodic point; exact."""
        prefix = point.prefix(self.depth)
        image = self.entries.get(prefix)
        if image is None:
            raise InadmissibleWord(f"point prefix {format_word(prefix)} is not admissible")
        tail = point.shift(self.depth)
        return EPPoint.make(image + tail.pre, tail.per)

    # -- group operations ---------------------------------------------------

    def compose(self, inner: "TableMap") -> "TableMap":
        """self after inner, as a canonical table."""
        if self.matrix != inner.matrix:
            raise MatrixMismatch("cannot compose tables over different matrices")
        matrix = self.matrix
        outer_depth = self.depth
        # Refine each entry of `inner` only as far as its own image needs.
        flat: list[tuple[Word, Word]] = []
        for nu, rho in inner._sorted_items():
            stack = [(nu, rho)]
            while stack:
                n, r = stack.pop()
                if len(r) >= outer_depth:
                    flat.append((n, self.entries[r[:outer_depth]] + r[outer_depth:]))
                    continue
                last = r[-1] if r else (n[-1] if n else None)
                succ = matrix.successors(last) if last else matrix.symbols()
                for a in reversed(tuple(succ)):
                    stack.append((n + (a,), r + (a,)))
        depth = max(len(n) for n, _ in flat)
        entries: dict[Word, Word] = {}
        for n, img in flat:
            if len(n) == depth:
                entries[n] = img
            else:
                for w in matrix.extensions(n, depth):
                    entries[w] = img + w[len(n):]
        return TableMap(matrix, depth, entries).reduce()

    def inverse(self) -> "TableMap":
        """The inverse table: entries reversed, refined to uniform depth."""
        matrix = self.matrix
        if self.depth == 0:
            return TableMap.identity(matrix)
        rev = {rho: nu for nu, rho in self.entries.items()}
        depth = max(len(r) for r in rev)
        entries: dict[Word, Word] = {}
        for rho, nu in rev.items():
            if len(rho) == depth:
                entries[rho] = nu
            else:
                for w in matrix.extensions(rho, depth):
                    entries[w] = nu + w[len(rho):]
        return TableMap(matrix, depth, entries)

    def reduce(self) -> "TableMap":
        """The unique minimal-depth table denoting the same homeomorphism."""
        matrix = self.matrix
        depth = self.depth
        entries = self.entries
        while depth > 0:
            merged: dict[Word, Word] = {}
            ok = True
            for nu, rho in entries.items():
                if not rho or rho[-1] != nu[-1]:
                    ok = False
                    break
                parent, img = nu[:-1], rho[:-1]
                prev = merged.get(parent)
                if prev is None:
                    merged[parent] = img
                elif prev != img:
                    ok = False
                    break
            if not ok:
                break
            if depth == 1:
                if merged != {EMPTY_WORD: EMPTY_WORD}:
                    break
            else:
                # a merged image must still end in a row-equivalent symbol
                if any(
                    not img or matrix.row(img[-1]) != matrix.row(p[-1])
                    for p, img in merged.items()
                ):
                    break
            entries = merged
            depth -= 1
        if entries is self.entries:
            return self
        return TableMap(matrix, depth, entries)

    def same_map(self, other: "TableMap") -> bool:
        a, b = self.reduce(), other.reduce()
        return a.depth == b.depth and a.entries == b.entries

    def order(self, bound: int, entry_cap: int = 4096) -> int | None:
        """Least k <= bound with the k-th power trivial, else None."""
        if bound < 1:
            raise BadInput("order bound must be at least 1")
        g = self.reduce()
        if g.is_identity:
            return 1
        acc = g
        for k in range(2, bound + 1):
            acc = g.compose(acc)
            if acc.is_identity:
                return k
            if len(acc.entries) > entry_cap:
                return None
        return None

    def commutes(self, other: "TableMap") -> bool:
        return self.compose(other).same_map(other.compose(self))

    def conjugate_by(self, gamma: "TableMap") -> "TableMap":
        """gamma^-1 . self . gamma"""
        return gamma.inverse().compose(self).compose(gamma)

    # -- refinement ---------------------------------------------------------

    def refine_to(self, depth: int) -> "TableMap":
        if depth < self.depth:
            raise BadInput("cannot refine a table to a smaller depth")
        if depth == self.depth:
            return self
        matrix = self.matrix
        entries: dict[Word, Word] = {}
        for nu, rho in self.entries.items():
            for w in matrix.extensions(nu, depth):
                entries[w] = rho + w[len(nu):]
        return TableMap(matrix, depth, entries)

    # -- supports, fixed sets, cocycles --------------------------------------

    def support_and_fixed(self) -> tuple[ClopenSet, "FixedSet"]:
        """The clopen support and the exact fixed-point set.

        The support is the closure of the moved set: the union of domain
        cylinders whose entry is not the identity rewrite.  Inside a moved
        cylinder the only fixed point candidates come from entries whose
        image properly extends or is properly extended by the domain word;
        each contributes a single eventually periodic point when the loop
        it closes is admissible.
        """
        g = self.reduce()
        matrix = g.matrix
        moved = [nu for nu, rho in g.entries.items() if rho != nu]
        kept = [nu for nu, rho in g.entries.items() if rho == nu]
        support = canonicalize_clopen(matrix, moved, trusted=True)
        fixed_clopen = canonicalize_clopen(matrix, kept, trusted=True)
        isolated = []
        for nu in moved:
            rho = g.entries[nu]
            if len(rho) > len(nu) and rho[: len(nu)] == nu:
                loop = rho[len(nu):]
                if matrix.arc(loop[-1], loop[0]):
                    isolated.append(EPPoint.make(nu, loop))
            elif len(nu) > len(rho) and nu[: len(rho)] == rho:
                loop = nu[len(rho):]
                if matrix.arc(loop[-1], loop[0]):
                    isolated.append(EPPoint.make(rho, loop))
        isolated.sort(key=lambda p: p.sort_key())
        return support, FixedSet(fixed_clopen, tuple(isolated))

    def support(self) -> ClopenSet:
        return self.support_and_fixed()[0]

    def cocycles(self) -> "CocycleTable":
        return CocycleTable(
            self.depth, {nu: (len(rho), self.depth) for nu, rho in self.entries.items()}
        )

    def in_local_subgroup(self, region: ClopenSet) -> bool:
        """Whether this element fixes the complement of the region pointwise.

        A nonempty clopen set has no isolated points, so it cannot hide in
        finitely many isolated fixed points: the clopen fixed part must
        contain the whole complement, equivalently the support must sit
        inside the region.
        """
        if self.matrix != region.matrix:
            raise MatrixMismatch("region lives over a different matrix")
        return self.support().is_subset_of(region)

    def image_clopen(self, clopen: ClopenSet) -> ClopenSet:
        """The image of a clopen set, as a canonical clopen set."""
        if self.matrix != clopen.matrix:
            raise MatrixMismatch("clopen set lives over a different matrix")
        if clopen.is_empty:
            return clopen
        depth = max(clopen.depth, self.depth)
        out = []
        for w in clopen.refine(depth):
            out.append(self.entries[w[: self.depth]] + w[self.depth:])
        return canonicalize_clopen(self.matrix, out, trusted=True)

    def split_invariant(self, region: ClopenSet) -> tuple["TableMap", "TableMap"]:
        """Factor over an invariant clopen set: a piece supported inside it
        times a piece supported in its complement."""
        if self.matrix != region.matrix:
            raise MatrixMismatch("region lives over a different matrix")
        if self.image_clopen(region) != region:
            raise NotInvariant("the map does not carry the given clopen set onto itself")
        depth = max(self.depth, region.depth)
        refined = self.refine_to(depth)
        inside: dict[Word, Word] = {}
        outside: dict[Word, Word] = {}
        for nu, rho in refined.entries.items():
            if region.contains_word(nu):
                inside[nu] = rho
                outside[nu] = nu
            else:
                inside[nu] = nu
                outside[nu] = rho
        part_in = TableMap(self.matrix, depth, inside).reduce()
        part_out = TableMap(self.matrix, depth, outside).reduce()
        return part_in, part_out


@dataclass(frozen=True)
class FixedSet:
    """Exact fixed-point set: a clopen part plus finitely many isolated
    eventually periodic points sitting inside moved cylinders."""

    clopen_part: ClopenSet
    isolated: tuple[EPPoint, ...]


@dataclass
class CocycleTable:
    """Per-cylinder orbit cocycle constants (k, l): shifting the image by k
    equals shifting the point by l, on every point of the cylinder."""

    depth: int
    values: dict[Word, tuple[int, int]]

    def pair(self, word: Word) -> tuple[int, int]:
        return self.values[word]


def validate_table(matrix: TransitionMatrix, raw_entries: Mapping) -> TableMap:
    """Check raw entries and return a valid table, or diagnose the failure.

    Checks, in order: the domain is exactly the set of depth-L words; each
    image is admissible, nonempty for L >= 1, and row-compatible with its
    domain word; the image cylinders are pairwise disjoint; they cover the
    whole space.
    """
    entries = {tuple(k): tuple(v) for k, v in raw_entries.items()}
    if not entries:
        raise BadDomain("table has no entries")
    depths = {len(k) for k in entries}
    if len(depths) != 1:
        raise BadDomain(f"domain words have mixed lengths {sorted(depths)}")
    depth = depths.pop()
    if depth == 0:
        if entries != {EMPTY_WORD: EMPTY_WORD}:
            raise BadDomain("a depth-0 table must map the empty word to itself")
        return TableMap(matrix, 0, {EMPTY_WORD: EMPTY_WORD})
    expected = set(matrix.words(depth))
    have = set(entries)
    if have != expected:
        missing = sorted(expected - have)
        extra = sorted(have - expected)
        if missing:
            raise BadDomain(f"domain misses word {format_word(missing[0])}")
        raise BadDomain(f"domain has bad word {format_word(extra[0])}")
    for nu, rho in entries.items():
        if not rho:
            raise RowMismatch(f"entry {format_word(nu)} has an empty image")
        if not matrix.is_admissible(rho):
            raise InadmissibleWord(f"image {format_word(rho)} is not admissible")
        if matrix.row(rho[-1]) != matrix.row(nu[-1]):
            raise RowMismatch(
                f"entry {format_word(nu)} -> {format_word(rho)}: "
                f"row of {rho[-1]} differs from row of {nu[-1]}"
            )
    images = sorted(entries.values())
    for a, b in zip(images, images[1:]):
        if b[: len(a)] == a:
            raise ImagesOverlap(f"images {format_word(a)} and {format_word(b)} intersect")
    top = max(len(r) for r in images)
    covered = sum(matrix.continuation_count(r[-1], top - len(r)) for r in images)
    if covered != matrix.word_count(top):
        raise ImagesDontCover(
            f"images cover {covered} of {matrix.word_count(top)} depth-{top} cylinders"
        )
    return TableMap(matrix, depth, entries)


def compose(outer: TableMap, inner: TableMap) -> TableMap:
    return outer.compose(inner)


def format_table_text(table: TableMap) -> str:
    lines = [f"L {table.depth}"]
    for nu, rho in table._sorted_items():
        lines.append(f"{format_word(nu)} -> {format_word(rho)}")
    return "\n".join(lines) + "\n"


def parse_table_text(matrix: TransitionMatrix, text: str) -> TableMap:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise BadInput("empty table file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "L":
        raise BadInput(f"bad table header {lines[0]!r}")
    try:
        depth = int(head[1])
    except ValueError:
        raise BadInput(f"bad table depth {head[1]!r}") from None
    entries = {}
    for ln in lines[1:]:
        if "->" not in ln:
            raise BadInput(f"bad table line {ln!r}")
        left, right = ln.split("->", 1)
        entries[parse_word(left)] = parse_word(right)
    table = validate_table(matrix, entries)
    if table.depth != depth:
        raise BadInput(f"declared depth {depth} but entries have depth {table.depth}")
    return table
