"""Classification of three- and four-point root configurations and the
closed-form conditional slope probabilities they determine.

For a pair of root leaves the probability that the second receives a
prescribed direction given the first is 2^-(N-h(u)) when admissible,
u being their youngest common ancestor.  For triples and quadruples the
exponent depends on how the two ycas u, u' sit relative to each other;
the classifier picks the conditioning split (A given, B queried) and the
permutations that make the exponent a function of the configuration
alone.  Every closed form is cross-checked against the exhaustive edge
field enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .sticky import enumerate_conditional, sticky_admissible
from .trees import Vertex, height, is_ancestor, ray_edges, yca


@dataclass(frozen=True)
class ConfigClass:
    """Outcome of classifying a root tuple.

    ``cond``/``query`` are (leaf, slot) lists: conditioning on the slopes
    of ``cond`` the probability of the ``query`` slopes is (1/2)^exponent
    whenever the full tuple is sticky-admissible, else 0.  ``slots`` name
    the original positions, e.g. "t2'" for the second leaf of the second
    pair, so permutation choices stay auditable.
    """

    arity: int
    type_tag: int
    case: str
    swapped: bool
    cond: tuple[Vertex, ...]
    query: tuple[Vertex, ...]
    cond_slots: tuple[str, ...]
    query_slots: tuple[str, ...]
    exponent: int
    h_u: int
    h_uprime: int
    h_u1: int | None = None
    h_u2: int | None = None

    @property
    def label(self) -> str:
        return f"{self.arity}pt-type{self.type_tag}{self.case}"


def k_edges(A: Sequence[Vertex], B: Sequence[Vertex]) -> int:
    """Number of distinct edges on B's rays that are not on A's rays."""
    a_edges = {e for t in A for e in ray_edges(t)}
    b_edges = {e for t in B for e in ray_edges(t)}
    return len(b_edges - a_edges)


def _check_leaves(leaves: Sequence[Vertex], distinct: bool = True):
    n = height(leaves[0])
    for t in leaves:
        if height(t) != n:
            raise ValueError("all leaves must share one height")
    if distinct and len(set(leaves)) != len(leaves):
        raise ValueError("leaves must be distinct")
    return n


def classify4(t1: Vertex, t2: Vertex, t1p: Vertex, t2p: Vertex) -> ConfigClass:
    """Classify an ordered quadruple ((t1,t2),(t1',t2')) of distinct leaves."""
    N = _check_leaves([t1, t2, t1p, t2p])
    u = yca(t1, t2)
    up = yca(t1p, t2p)
    swapped = height(u) > height(up)
    if swapped:
        (t1, t2), (t1p, t2p) = (t1p, t2p), (t1, t2)
        u, up = up, u
    hu, hup = height(u), height(up)
    if swapped:
        names = {"1": "t1'", "2": "t2'", "1p": "t1", "2p": "t2"}
    else:
        names = {"1": "t1", "2": "t2", "1p": "t1'", "2p": "t2'"}
    firsts = {"1": t1, "2": t2}
    primes = {"1": t1p, "2": t2p}

    def build(i_perm, j_perm, case, type_tag, exponent, h_u1=None, h_u2=None,
              deep_conditions=False):
        i1, i2 = i_perm
        j1, j2 = j_perm
        if deep_conditions:
            cond = (firsts[i2], primes[j2])
            cond_slots = (names[i2], names[j2 + "p"])
            query = (firsts[i1], primes[j1])
            query_slots = (names[i1], names[j1 + "p"])
        else:
            cond = (firsts[i1], primes[j1])
            cond_slots = (names[i1], names[j1 + "p"])
            query = (firsts[i2], primes[j2])
            query_slots = (names[i2], names[j2 + "p"])
        return ConfigClass(
            arity=4,
            type_tag=type_tag,
            case=case,
            swapped=swapped,
            cond=cond,
            query=query,
            cond_slots=cond_slots,
            query_slots=query_slots,
            exponent=exponent,
            h_u=hu,
            h_uprime=hup,
            h_u1=h_u1,
            h_u2=h_u2,
        )

    exp1 = 2 * N - hu - hup
    if u != up and not is_ancestor(u, up) and not is_ancestor(up, u):
        # ycas in disjoint cubes
        return build(("1", "2"), ("1", "2"), "a", 1, exp1)
    if u == up:
        cross = {
            (i, j): height(yca(firsts[i], primes[j]))
            for i in ("1", "2")
            for j in ("1", "2")
        }
        if all(h == hu for h in cross.values()):
            # every cross yca equals the shared root
            return build(("1", "2"), ("1", "2"), "b", 1, exp1)
        # type 2: condition on the deepest cross pair
        (i2, j2) = min(k for k, h in cross.items() if h == max(cross.values()))
        i1 = "2" if i2 == "1" else "1"
        j1 = "2" if j2 == "1" else "1"
        h_u2 = cross[(i2, j2)]
        h_u1 = cross[(i1, j1)]
        if h_u1 == hu:
            case = "c"
        elif h_u1 == h_u2:
            case = "a"
        else:
            case = "b"
        return build(
            (i1, i2),
            (j1, j2),
            case,
            2,
            2 * N - hu - h_u1,
            h_u1=h_u1,
            h_u2=h_u2,
            deep_conditions=True,
        )
    # remaining: u' strictly below u
    a1 = height(yca(t1, up))
    a2 = height(yca(t2, up))
    deep_i, shallow_i = ("1", "2") if a1 >= a2 else ("2", "1")
    a_deep = max(a1, a2)
    if a_deep == hu:
        # neither first-pair leaf follows the path toward u'
        return build(("1", "2"), ("1", "2"), "c", 1, exp1)
    if a_deep < hup:
        # one first-pair leaf branches off strictly between u and u'
        return build((deep_i, shallow_i), ("1", "2"), "d", 1, exp1)
    # one first-pair leaf descends through u'
    t_deep = firsts[deep_i]
    x1 = height(yca(t_deep, t1p))
    x2 = height(yca(t_deep, t2p))
    if x1 == hup and x2 == hup:
        return build((deep_i, shallow_i), ("1", "2"), "e", 1, exp1)
    j_deep = "1" if x1 > hup else "2"
    j_other = "2" if j_deep == "1" else "1"
    return build((deep_i, shallow_i), (j_deep, j_other), "f", 1, exp1)


def classify3(t1: Vertex, t2: Vertex, t2p: Vertex) -> ConfigClass:
    """Classify an ordered triple ((t1,t2),(t1,t2')) of distinct leaves."""
    N = _check_leaves([t1, t2, t2p])
    u = yca(t1, t2)
    up = yca(t1, t2p)
    swapped = height(u) > height(up)
    if swapped:
        t2, t2p = t2p, t2
        u, up = up, u
    hu, hup = height(u), height(up)
    u2 = yca(t2, t2p)
    common = dict(
        arity=3,
        swapped=swapped,
        cond=(t1,),
        query=(t2, t2p),
        cond_slots=("t1",),
        query_slots=("t2", "t2'") if not swapped else ("t2'", "t2"),
        h_u=hu,
        h_uprime=hup,
    )
    if hup > hu:
        # both ycas sit on t1's ray, so deeper means strictly nested
        return ConfigClass(
            type_tag=1, case="a", exponent=2 * N - hu - hup, **common
        )
    if u2 == u:
        return ConfigClass(
            type_tag=1, case="b", exponent=2 * N - hu - hup, **common
        )
    return ConfigClass(
        type_tag=2,
        case="a",
        exponent=2 * N - hu - height(u2),
        h_u2=height(u2),
        **common,
    )


# ---------------------------------------------------------------------------
# conditional probabilities
# ---------------------------------------------------------------------------


def cond_prob_pair(t1: Vertex, t2: Vertex, b1: Vertex, b2: Vertex) -> Fraction:
    """Pr(second leaf gets address b2 | first got b1): 2^-(N-h(u)) when the
    addresses are at least as entangled as the leaves, else 0."""
    N = _check_leaves([t1, t2])
    if height(b1) != N or height(b2) != N:
        raise ValueError("addresses must have the leaf height")
    hu = height(yca(t1, t2))
    halpha = height(yca(b1, b2))
    if hu <= halpha:
        return Fraction(1, 2 ** (N - hu))
    return Fraction(0)


def cond_prob_general(
    A: Sequence[tuple[Vertex, Vertex]], B: Sequence[tuple[Vertex, Vertex]]
) -> Fraction:
    """Pr(all of B's point-address assignments | all of A's):
    (1/2)^(new edges of B) when the union is sticky-admissible, else 0."""
    a_leaves = [t for t, _ in A]
    b_leaves = [t for t, _ in B]
    if set(a_leaves) & set(b_leaves):
        raise ValueError("A and B must be disjoint leaf sets")
    if not sticky_admissible(list(A) + list(B)):
        return Fraction(0)
    if not sticky_admissible(list(A)):
        return Fraction(0)
    return Fraction(1, 2 ** k_edges(a_leaves, b_leaves))


def class_probability(
    cc: ConfigClass, assignments: dict[Vertex, Vertex]
) -> Fraction:
    """Closed-form conditional probability of the classified tuple under
    the given leaf -> binary address map."""
    pairs = [(t, assignments[t]) for t in cc.cond + cc.query]
    if not sticky_admissible(pairs):
        return Fraction(0)
    return Fraction(1, 2**cc.exponent)


def oracle_check(
    cc: ConfigClass, assignments: dict[Vertex, Vertex], budget: int = 30
) -> tuple[Fraction, Fraction]:
    """(closed form, exhaustive enumeration) of the same conditional
    probability; they must agree exactly."""
    closed = class_probability(cc, assignments)
    cond = [(t, assignments[t]) for t in cc.cond]
    query = [(t, assignments[t]) for t in cc.query]
    enumerated = enumerate_conditional(cond, query, budget=budget)
    return closed, enumerated
