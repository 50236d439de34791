"""Sparse multivariate polynomials, Groebner bases, and ideal tools.

A MultiPoly maps exponent tuples to nonzero scalars of a fixed Field over an
ordered tuple of variable names.  Ideals cache one reduced Groebner basis per
term order; the cache is filled lazily and never mutated afterwards, so
distinct Ideal values can be used concurrently.

The Buchberger loop uses the normal pair-selection strategy and the standard
update criteria (coprime leading terms, chain criterion).  All loops check a
Budget and raise EffortExceeded instead of running away.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .arith import Field, UniPoly, factor_univariate, squarefree_decomposition
from .budgets import DEFAULT, Budget
from .errors import EffortExceeded, NotZeroDimensional, UnitIdeal

Monomial = tuple[int, ...]


# ---------------------------------------------------------------------------
# term orders
# ---------------------------------------------------------------------------

class TermOrder:
    """Total order on monomials compatible with multiplication.

    kind is one of "grevlex", "lex", "block"; a block order eliminates the
    first `split` variables (graded-reverse-lex inside each block).
    """

    def __init__(self, kind: str = "grevlex", split: int = 0):
        if kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown term order {kind!r}")
        self.kind = kind
        self.split = split

    def key(self, m: Monomial):
        """Sort key; larger key means larger monomial."""
        if self.kind == "grevlex":
            return (sum(m), tuple(-e for e in reversed(m)))
        if self.kind == "lex":
            return m
        left, right = m[:self.split], m[self.split:]
        return ((sum(left), tuple(-e for e in reversed(left))),
                (sum(right), tuple(-e for e in reversed(right))))

    def __eq__(self, other):
        return (isinstance(other, TermOrder) and self.kind == other.kind
                and self.split == other.split)

    def __hash__(self):
        return hash((self.kind, self.split))

    def __repr__(self):
        if self.kind == "block":
            return f"block({self.split})"
        return self.kind


GREVLEX = TermOrder("grevlex")
LEX = TermOrder("lex")


def _mon_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def _mon_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mon_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def _mon_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# multivariate polynomials
# ---------------------------------------------------------------------------

class MultiPoly:
    """Immutable sparse polynomial over an ordered variable tuple."""

    __slots__ = ("field", "vars", "terms", "_hash")

    def __init__(self, field: Field, variables: tuple[str, ...], terms: dict):
        clean = {}
        for mon, coeff in terms.items():
            c = field.coerce(coeff)
            if c:
                if len(mon) != len(variables):
                    raise ValueError("exponent arity mismatch")
                clean[mon] = c
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "vars", tuple(variables))
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *_):
        raise AttributeError("MultiPoly is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, field, variables):
        return cls(field, variables, {})

    @classmethod
    def const(cls, field, variables, value):
        return cls(field, variables, {(0,) * len(variables): value})

    @classmethod
    def var(cls, field, variables, name):
        idx = variables.index(name)
        mon = tuple(1 if i == idx else 0 for i in range(len(variables)))
        return cls(field, variables, {mon: 1})

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_value(self):
        if self.is_zero():
            return self.field.zero
        if not self.is_constant():
            raise ValueError("not a constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def degree_in(self, idx: int) -> int:
        return max((m[idx] for m in self.terms), default=0)

    def support_vars(self) -> set[int]:
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(i)
        return used

    def leading(self, order: TermOrder) -> tuple[Monomial, object]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=order.key)
        return m, self.terms[m]

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other):
        if self.vars != other.vars or self.field != other.field:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(self.field, self.vars, other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c if s is None else s + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return MultiPoly(self.field, self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.field, self.vars,
                         {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(self.field, self.vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = self.field.coerce(other)
            if not c:
                return MultiPoly.zero(self.field, self.vars)
            return MultiPoly(self.field, self.vars,
                             {m: v * c for m, v in self.terms.items()})
        self._check(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mon_mul(m1, m2)
                c = c1 * c2
                s = out.get(m)
                s = c if s is None else s + c
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return MultiPoly(self.field, self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, exp: int):
        if exp < 0:
            raise ValueError("negative power of a polynomial")
        out = MultiPoly.const(self.field, self.vars, 1)
        base = self
        while exp:
            if exp & 1:
                out = out * base
            base = base * base if exp > 1 else base
            exp >>= 1
        return out

    def monic(self, order: TermOrder = GREVLEX) -> "MultiPoly":
        if self.is_zero():
            return self
        _, lc = self.leading(order)
        return self * (self.field.one / lc)

    def derivative(self, idx: int) -> "MultiPoly":
        out = {}
        for m, c in self.terms.items():
            if m[idx]:
                mm = list(m)
                mm[idx] -= 1
                out[tuple(mm)] = c * m[idx]
        return MultiPoly(self.field, self.vars, out)

    def substitute(self, images: dict[str, "MultiPoly"]):
        """Ring morphism sending each variable to its image polynomial.

        Every variable of self must have an image; all images must live in
        one common ring, which is the ring of the result.
        """
        imgs = [images[v] for v in self.vars]
        ring0 = imgs[0]
        acc = MultiPoly.zero(ring0.field, ring0.vars)
        for m, c in self.terms.items():
            term = MultiPoly.const(ring0.field, ring0.vars, c)
            for i, e in enumerate(m):
                if e:
                    term = term * imgs[i] ** e
            acc = acc + term
        return acc

    def eval_scalars(self, values: list):
        """Evaluate at a scalar point (list aligned with self.vars)."""
        acc = self.field.zero
        for m, c in self.terms.items():
            t = c
            for i, e in enumerate(m):
                if e:
                    t = t * (self.field.coerce(values[i]) ** e)
            acc = acc + t
        return acc

    def embed(self, variables: tuple[str, ...]) -> "MultiPoly":
        """Re-express in a larger ring containing all current variables."""
        index = [variables.index(v) for v in self.vars]
        out = {}
        for m, c in self.terms.items():
            mm = [0] * len(variables)
            for i, e in enumerate(m):
                mm[index[i]] = e
            out[tuple(mm)] = c
        return MultiPoly(self.field, variables, out)

    def restrict(self, variables: tuple[str, ...]) -> "MultiPoly":
        """Re-express in a smaller ring; fails if other variables occur."""
        index = {}
        for i, v in enumerate(self.vars):
            index[i] = variables.index(v) if v in variables else None
        out = {}
        for m, c in self.terms.items():
            mm = [0] * len(variables)
            for i, e in enumerate(m):
                if e:
                    if index[i] is None:
                        raise ValueError(f"variable {self.vars[i]} occurs")
                    mm[index[i]] = e
            out[tuple(mm)] = c
        return MultiPoly(self.field, variables, out)

    # -- comparison / repr ---------------------------------------------------

    def sort_key(self):
        items = sorted(self.terms.items(), key=lambda t: t[0])
        return tuple((m, self.field.sort_key(c)) for m, c in items)

    def __eq__(self, other):
        return (isinstance(other, MultiPoly) and self.vars == other.vars
                and self.field == other.field and self.terms == other.terms)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.vars, tuple(sorted(self.terms.items(),
                                              key=lambda t: t[0]))))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=GREVLEX.key, reverse=True):
            c = self.terms[m]
            factors = []
            for i, e in enumerate(m):
                if e == 1:
                    factors.append(self.vars[i])
                elif e > 1:
                    factors.append(f"{self.vars[i]}^{e}")
            body = "*".join(factors)
            cr = str(c) if isinstance(c, Fraction) else repr(c)
            if not body:
                parts.append(cr)
            elif cr == "1":
                parts.append(body)
            elif cr == "-1":
                parts.append(f"-{body}")
            else:
                parts.append(f"{cr}*{body}")
        return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# division and Buchberger
# ---------------------------------------------------------------------------

def normal_form_list(f: MultiPoly, divisors: list[MultiPoly],
                     order: TermOrder = GREVLEX,
                     budget: Budget = DEFAULT) -> MultiPoly:
    """Full remainder of f on division by the divisor list."""
    if f.is_zero() or not divisors:
        return f
    divs = []
    for g in divisors:
        if not g.is_zero():
            lm, lc = g.leading(order)
            divs.append((lm, lc, g))
    divs.sort(key=lambda t: order.key(t[0]))
    work = dict(f.terms)
    remainder: dict = {}
    while work:
        if len(work) > budget.max_terms:
            raise EffortExceeded("term count exceeded during reduction")
        m = max(work, key=order.key)
        c = work.pop(m)
        for lm, lc, g in divs:
            if _mon_divides(lm, m):
                shift = _mon_div(m, lm)
                factor = c / lc
                for gm, gc in g.terms.items():
                    if gm == lm:
                        continue
                    t = _mon_mul(gm, shift)
                    s = work.get(t)
                    s = -factor * gc if s is None else s - factor * gc
                    if s:
                        work[t] = s
                    else:
                        work.pop(t, None)
                break
        else:
            remainder[m] = c
    return MultiPoly(f.field, f.vars, remainder)


def _spoly(f: MultiPoly, g: MultiPoly, order: TermOrder) -> MultiPoly:
    lf, cf = f.leading(order)
    lg, cg = g.leading(order)
    lcm = _mon_lcm(lf, lg)
    mf = MultiPoly(f.field, f.vars, {_mon_div(lcm, lf): f.field.one / cf})
    mg = MultiPoly(f.field, f.vars, {_mon_div(lcm, lg): f.field.one / cg})
    return mf * f - mg * g


def buchberger(gens: list[MultiPoly], order: TermOrder = GREVLEX,
               budget: Budget = DEFAULT) -> list[MultiPoly]:
    """Reduced Groebner basis, deterministic for a given generating set.

    Normal selection strategy; new pairs filtered with the product and chain
    criteria (the [BW]-style update).  The output is inter-reduced, monic,
    and sorted by ascending leading term, which makes it unique for the
    ideal and order.
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return []
    field, variables = gens[0].field, gens[0].vars

    # inter-reduce the input until stable
    current = sorted((g.monic(order) for g in gens),
                     key=lambda g: order.key(g.leading(order)[0]))
    while True:
        reduced = []
        for i, p in enumerate(current):
            r = normal_form_list(p, reduced + current[i + 1:], order, budget)
            if not r.is_zero():
                reduced.append(r.monic(order))
        reduced.sort(key=lambda g: order.key(g.leading(order)[0]))
        if reduced == current:
            break
        current = reduced
    if not current:
        return []
    if any(p.is_constant() for p in current):
        return [MultiPoly.const(field, variables, 1)]

    polys: list[MultiPoly] = []
    lts: list[Monomial] = []
    basis: set[int] = set()
    pairs: set[tuple[int, int]] = set()

    def add_poly(p: MultiPoly) -> int:
        polys.append(p)
        lts.append(p.leading(order)[0])
        return len(polys) - 1

    def update(ih: int):
        """Gebauer-Moeller style pair update for the new element ih."""
        nonlocal basis, pairs
        mh = lts[ih]
        candidates = set(basis)
        fresh: set[tuple[int, int]] = set()
        while candidates:
            ig = candidates.pop()
            mg = lts[ig]
            lcm_hg = _mon_lcm(mh, mg)

            def lcm_divides(ip):
                return _mon_divides(_mon_lcm(mh, lts[ip]), lcm_hg)

            if (_mon_mul(mh, mg) == lcm_hg
                    or (not any(lcm_divides(ip) for ip in candidates)
                        and not any(lcm_divides(pr[1]) for pr in fresh))):
                fresh.add((ih, ig))
        kept: set[tuple[int, int]] = set()
        for (ih2, ig) in fresh:
            if _mon_mul(lts[ih2], lts[ig]) != _mon_lcm(lts[ih2], lts[ig]):
                kept.add((ih2, ig))
        surviving: set[tuple[int, int]] = set()
        for (i1, i2) in pairs:
            lcm12 = _mon_lcm(lts[i1], lts[i2])
            if (not _mon_divides(mh, lcm12)
                    or _mon_lcm(lts[i1], mh) == lcm12
                    or _mon_lcm(lts[i2], mh) == lcm12):
                surviving.add((i1, i2))
        pairs = surviving | kept
        basis = {ig for ig in basis if not _mon_divides(mh, lts[ig])}
        basis.add(ih)

    for p in current:
        update(add_poly(p))

    processed = 0
    while pairs:
        processed += 1
        if processed > budget.max_pairs:
            raise EffortExceeded(f"critical pair budget {budget.max_pairs} exceeded")
        pair = min(pairs, key=lambda pr: (order.key(_mon_lcm(lts[pr[0]], lts[pr[1]])),
                                          pr[0], pr[1]))
        pairs.discard(pair)
        i, j = pair
        s = _spoly(polys[i], polys[j], order)
        ordered = sorted(basis, key=lambda g: order.key(lts[g]))
        h = normal_form_list(s, [polys[g] for g in ordered], order, budget)
        if h.is_zero():
            continue
        if h.is_constant():
            return [MultiPoly.const(field, variables, 1)]
        update(add_poly(h.monic(order)))

    # final inter-reduction of the minimal basis
    final = [polys[i] for i in sorted(basis, key=lambda g: order.key(lts[g]))]
    out = []
    for i, p in enumerate(final):
        others = out + final[i + 1:]
        r = normal_form_list(p, others, order, budget)
        if not r.is_zero():
            out.append(r.monic(order))
    out.sort(key=lambda g: order.key(g.leading(order)[0]))
    return out


# ---------------------------------------------------------------------------
# ideals
# ---------------------------------------------------------------------------

class Ideal:
    """Finitely generated ideal with a lazy per-order Groebner cache.

    The cache is single-writer: computing a basis for a new order stores it
    once; no other mutation happens after construction.
    """

    def __init__(self, field: Field, variables: tuple[str, ...],
                 gens, budget: Budget = DEFAULT):
        self.field = field
        self.vars = tuple(variables)
        self.gens = tuple(g for g in gens if not g.is_zero())
        for g in self.gens:
            if g.vars != self.vars:
                raise ValueError("generator in wrong ring")
        self.budget = budget
        self._gb: dict[TermOrder, tuple[MultiPoly, ...]] = {}

    @property
    def n(self) -> int:
        return len(self.vars)

    def groebner(self, order: TermOrder = GREVLEX) -> tuple[MultiPoly, ...]:
        cached = self._gb.get(order)
        if cached is None:
            cached = tuple(buchberger(list(self.gens), order, self.budget))
            self._gb[order] = cached
        return cached

    def normal_form(self, f: MultiPoly, order: TermOrder = GREVLEX) -> MultiPoly:
        return normal_form_list(f, list(self.groebner(order)), order, self.budget)

    def contains(self, f: MultiPoly) -> bool:
        return self.normal_form(f).is_zero()

    def is_unit(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb[0].is_constant()

    def is_zero_ideal(self) -> bool:
        return not self.groebner()

    def canonical_key(self):
        """Hashable key identifying the ideal (via the grevlex reduced GB)."""
        return tuple(g.sort_key() for g in self.groebner())

    def __eq__(self, other):
        return (isinstance(other, Ideal) and self.vars == other.vars
                and self.field == other.field
                and self.groebner() == other.groebner())

    def __hash__(self):
        return hash((self.vars, self.canonical_key()))

    def __repr__(self):
        inner = ", ".join(repr(g) for g in self.groebner()) or "0"
        return f"<{inner}>"

    def __add__(self, other: "Ideal") -> "Ideal":
        if self.vars != other.vars:
            raise ValueError("ideal sum across different rings")
        return Ideal(self.field, self.vars, self.gens + other.gens, self.budget)

    # -- geometry ------------------------------------------------------------

    def dimension(self) -> int:
        """Krull dimension of the zero set, via independent variable sets
        modulo the leading-term ideal."""
        gb = self.groebner()
        if not gb:
            return self.n
        if self.is_unit():
            raise UnitIdeal("the ideal is the whole ring (empty zero set)")
        lt_supports = []
        for g in gb:
            m = g.leading(GREVLEX)[0]
            lt_supports.append({i for i, e in enumerate(m) if e})
        best = 0
        for size in range(self.n, 0, -1):
            for subset in itertools.combinations(range(self.n), size):
                sset = set(subset)
                if all(not supp <= sset for supp in lt_supports):
                    return size
        return best

    def quotient_basis(self, order: TermOrder = GREVLEX) -> list[Monomial]:
        """Standard monomials of a zero-dimensional ideal, sorted ascending."""
        if self.dimension() != 0:
            raise NotZeroDimensional("quotient basis needs a zero-dimensional ideal")
        gb = self.groebner(order)
        lts = [g.leading(order)[0] for g in gb]
        seen = {(0,) * self.n}
        frontier = [(0,) * self.n]
        standard = []
        while frontier:
            m = frontier.pop()
            if any(_mon_divides(lt, m) for lt in lts):
                continue
            standard.append(m)
            for i in range(self.n):
                mm = list(m)
                mm[i] += 1
                t = tuple(mm)
                if t not in seen:
                    seen.add(t)
                    frontier.append(t)
        standard.sort(key=order.key)
        return standard

    def multiplication_matrix(self, f: MultiPoly,
                              order: TermOrder = GREVLEX) -> list[list]:
        """Matrix of multiplication-by-f on the quotient algebra, columns
        indexed by the quotient basis."""
        basis = self.quotient_basis(order)
        index = {m: i for i, m in enumerate(basis)}
        cols = []
        for m in basis:
            prod = f * MultiPoly(self.field, self.vars, {m: 1})
            nf = self.normal_form(prod, order)
            col = [self.field.zero] * len(basis)
            for mm, c in nf.terms.items():
                col[index[mm]] = c
            cols.append(col)
        # transpose: entry [i][j] = coefficient of basis[i] in f*basis[j]
        return [[cols[j][i] for j in range(len(basis))] for i in range(len(basis))]

    def eliminate(self, keep: list[str]) -> "Ideal":
        """Intersection with the subring on `keep`, via a block order."""
        drop = [v for v in self.vars if v not in keep]
        keep_order = [v for v in self.vars if v in keep]
        if set(keep) - set(self.vars):
            raise ValueError("keep-variables not in the ring")
        new_vars = tuple(drop + keep_order)
        perm = [self.vars.index(v) for v in new_vars]
        moved = [MultiPoly(self.field, new_vars,
                           {tuple(m[i] for i in perm): c
                            for m, c in g.terms.items()})
                 for g in self.gens]
        order = TermOrder("block", split=len(drop))
        gb = buchberger(moved, order, self.budget)
        kept_vars = tuple(keep_order)
        kept = []
        for g in gb:
            if all(all(m[i] == 0 for i in range(len(drop))) for m in g.terms):
                kept.append(MultiPoly(self.field, kept_vars,
                                      {m[len(drop):]: c for m, c in g.terms.items()}))
        return Ideal(self.field, kept_vars, kept, self.budget)

    def saturate(self, f: MultiPoly) -> "Ideal":
        """I : f^infinity via the Rabinowitsch-variable construction."""
        if f.is_zero():
            raise ValueError("cannot saturate by zero")
        aux = "_w"
        while aux in self.vars:
            aux = aux + "w"
        new_vars = (aux,) + self.vars
        gens = [g.embed(new_vars) for g in self.gens]
        w = MultiPoly.var(self.field, new_vars, aux)
        gens.append(w * f.embed(new_vars) - 1)
        big = Ideal(self.field, new_vars, gens, self.budget)
        elim = big.eliminate(list(self.vars))
        return Ideal(self.field, self.vars,
                     [g.embed(self.vars) for g in elim.gens], self.budget)

    def radical_zero_dim(self) -> "Ideal":
        """Radical of a zero-dimensional ideal (squarefree minimal
        polynomials of each coordinate, Seidenberg's construction)."""
        if self.dimension() != 0:
            raise NotZeroDimensional("radical shortcut needs dimension zero")
        extra = []
        for v in self.vars:
            mp = self.minimal_polynomial_of(MultiPoly.var(self.field, self.vars, v))
            sq = UniPoly(self.field, [1])
            for fac, _ in squarefree_decomposition(mp):
                sq = sq * fac
            poly = MultiPoly.zero(self.field, self.vars)
            xv = MultiPoly.var(self.field, self.vars, v)
            for k, c in enumerate(sq.coeffs):
                poly = poly + (xv ** k) * c
            extra.append(poly)
        return Ideal(self.field, self.vars, list(self.gens) + extra, self.budget)

    def minimal_polynomial_of(self, f: MultiPoly) -> UniPoly:
        """Minimal polynomial of f acting on the zero-dimensional quotient."""
        basis = self.quotient_basis()
        index = {m: i for i, m in enumerate(basis)}
        dim = len(basis)

        def vec(poly):
            nf = self.normal_form(poly)
            col = [self.field.zero] * dim
            for mm, c in nf.terms.items():
                col[index[mm]] = c
            return col

        from .arith import solve_linear
        powers = [vec(MultiPoly.const(self.field, self.vars, 1))]
        current = MultiPoly.const(self.field, self.vars, 1)
        for k in range(1, dim + 2):
            current = self.normal_form(current * f)
            target = vec(current)
            rows = [[powers[j][i] for j in range(len(powers))] for i in range(dim)]
            sol = solve_linear(self.field, rows, target)
            if sol.consistent:
                coeffs = list(sol.solution) + [self.field.coerce(-1)]
                mp = UniPoly(self.field, [-c for c in coeffs])
                return mp.monic()
            powers.append(target)
        raise ArithmeticError("minimal polynomial not found")  # pragma: no cover


# ---------------------------------------------------------------------------
# multivariate gcd / factorization
# ---------------------------------------------------------------------------

def _coeffs_in(p: MultiPoly, idx: int) -> list[MultiPoly]:
    """Coefficient polynomials of powers of variable idx (ascending)."""
    deg = p.degree_in(idx)
    cols: list[dict] = [{} for _ in range(deg + 1)]
    for m, c in p.terms.items():
        mm = list(m)
        e = mm[idx]
        mm[idx] = 0
        cols[e][tuple(mm)] = c
    return [MultiPoly(p.field, p.vars, col) for col in cols]


def _from_coeffs_in(field, variables, idx: int, cols: list[MultiPoly]) -> MultiPoly:
    out: dict = {}
    for e, col in enumerate(cols):
        for m, c in col.terms.items():
            mm = list(m)
            mm[idx] += e
            out[tuple(mm)] = c
    return MultiPoly(field, variables, out)


def poly_div_exact(a: MultiPoly, b: MultiPoly) -> MultiPoly | None:
    """Quotient a/b if the division is exact, else None."""
    if b.is_zero():
        raise ZeroDivisionError
    if a.is_zero():
        return a
    order = GREVLEX
    lb, cb = b.leading(order)
    rem = dict(a.terms)
    quot: dict = {}
    while rem:
        m = max(rem, key=order.key)
        c = rem[m]
        if not _mon_divides(lb, m):
            return None
        shift = _mon_div(m, lb)
        factor = c / cb
        quot[shift] = factor
        for gm, gc in b.terms.items():
            t = _mon_mul(gm, shift)
            s = rem.get(t)
            s = -factor * gc if s is None else s - factor * gc
            if s:
                rem[t] = s
            else:
                rem.pop(t, None)
    return MultiPoly(a.field, a.vars, quot)


def mp_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Monic gcd by primitive pseudo-remainder sequences."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    used = a.support_vars() | b.support_vars()
    if not used:
        return MultiPoly.const(a.field, a.vars, 1)
    v = max(used)
    if a.degree_in(v) == 0 or b.degree_in(v) == 0:
        # one argument is free of the main variable: gcd divides contents
        free, other = (a, b) if a.degree_in(v) == 0 else (b, a)
        cont = _content_in(other, v)
        return mp_gcd(free, cont)
    ca, pa = _content_and_pp(a, v)
    cb, pb = _content_and_pp(b, v)
    c = mp_gcd(ca, cb)
    if pa.degree_in(v) < pb.degree_in(v):
        pa, pb = pb, pa
    while True:
        r = _pseudo_rem(pa, pb, v)
        if r.is_zero():
            g = pb
            break
        if r.degree_in(v) == 0:
            g = MultiPoly.const(a.field, a.vars, 1)
            break
        _, r = _content_and_pp(r, v)
        pa, pb = pb, r
    _, g = _content_and_pp(g, v)
    return (c * g).monic()


def _content_in(p: MultiPoly, v: int) -> MultiPoly:
    cols = [c for c in _coeffs_in(p, v) if not c.is_zero()]
    acc = cols[0]
    for col in cols[1:]:
        acc = mp_gcd(acc, col)
        if acc.is_constant():
            break
    return acc.monic()


def _content_and_pp(p: MultiPoly, v: int) -> tuple[MultiPoly, MultiPoly]:
    cont = _content_in(p, v)
    if cont.is_constant():
        return MultiPoly.const(p.field, p.vars, 1), p
    pp = poly_div_exact(p, cont)
    return cont, pp


def _pseudo_rem(a: MultiPoly, b: MultiPoly, v: int) -> MultiPoly:
    """Pseudo-remainder of a by b with respect to variable v."""
    db = b.degree_in(v)
    lb = _coeffs_in(b, v)[db]
    r = a
    while not r.is_zero() and r.degree_in(v) >= db:
        dr = r.degree_in(v)
        lr = _coeffs_in(r, v)[dr]
        shift = MultiPoly(a.field, a.vars,
                          {tuple(dr - db if i == v else 0
                                 for i in range(len(a.vars))): 1})
        r = lb * r - lr * shift * b
    return r


def mp_squarefree_parts(p: MultiPoly) -> list[tuple[MultiPoly, int]]:
    """(factor, multiplicity) pairs with each factor squarefree; their
    product with multiplicities equals p up to a scalar."""
    parts = []
    cur = p
    chain = []
    while not cur.is_constant():
        partials = [cur.derivative(i) for i in sorted(cur.support_vars())]
        g = cur
        acc = None
        for dp in partials:
            acc = dp if acc is None else mp_gcd(acc, dp)
        g = mp_gcd(cur, acc) if acc is not None else cur
        s = poly_div_exact(cur, g)
        chain.append(s.monic())
        cur = g
        if g.is_constant():
            break
    # chain[m-1] = product of irreducibles with multiplicity >= m
    for m in range(len(chain), 0, -1):
        upper = chain[m] if m < len(chain) else None
        t = chain[m - 1] if upper is None else poly_div_exact(chain[m - 1], upper)
        if t is None or t.is_constant():
            continue
        parts.append((t.monic(), m))
    parts.reverse()
    return parts


def mp_factor(p: MultiPoly, budget: Budget = DEFAULT) -> list[tuple[MultiPoly, int]]:
    """Factor a multivariate polynomial into irreducibles with exponents.

    Monomial content is split off first, then squarefree parts, then each
    squarefree part is split by Kronecker substitution: candidate factors
    come from the factorization of a univariate image and are certified by
    exact division, so the result is always a true factorization.
    """
    if p.is_zero():
        raise ValueError("cannot factor zero")
    out = []
    # monomial content
    nvars = len(p.vars)
    mins = [min(m[i] for m in p.terms) for i in range(nvars)]
    if any(mins):
        strip = {tuple(e - mins[i] for i, e in enumerate(m)): c
                 for m, c in p.terms.items()}
        p = MultiPoly(p.field, p.vars, strip)
        for i, e in enumerate(mins):
            if e:
                out.append((MultiPoly.var(p.field, p.vars, p.vars[i]), e))
    if p.is_constant():
        return out
    for part, mult in mp_squarefree_parts(p):
        for fac in _kronecker_split(part, budget):
            out.append((fac, mult))
    out.sort(key=lambda fm: (fm[0].total_degree(), fm[0].sort_key()))
    return out


def _kronecker_split(p: MultiPoly, budget: Budget) -> list[MultiPoly]:
    """Irreducible factors of a squarefree p via Kronecker substitution."""
    used = sorted(p.support_vars())
    if not used:
        return []
    if len(used) == 1:
        v = used[0]
        coeffs = [c.constant_value() for c in _coeffs_in(p, v)]
        uni = UniPoly(p.field, coeffs)
        internal = Budget(degree_bound=max(budget.degree_bound, uni.degree + 1),
                          max_pairs=budget.max_pairs, max_terms=budget.max_terms)
        out = []
        xv = MultiPoly.var(p.field, p.vars, p.vars[v])
        for fac, mult in factor_univariate(uni, internal):
            mpf = MultiPoly.zero(p.field, p.vars)
            for k, c in enumerate(fac.coeffs):
                mpf = mpf + (xv ** k) * c
            out.extend([mpf.monic()] * mult)
        return out
    d = max(p.degree_in(v) for v in used) + 1
    weights = {v: d ** i for i, v in enumerate(used)}

    def image(q: MultiPoly) -> UniPoly:
        coeffs: dict[int, object] = {}
        for m, c in q.terms.items():
            t = sum(m[v] * weights[v] for v in used)
            coeffs[t] = coeffs.get(t, q.field.zero) + c
        top = max(coeffs)
        lst = [coeffs.get(i, q.field.zero) for i in range(top + 1)]
        return UniPoly(q.field, lst)

    def preimage(u: UniPoly) -> MultiPoly | None:
        terms = {}
        for t, c in enumerate(u.coeffs):
            if not c:
                continue
            mon = [0] * len(p.vars)
            rest = t
            for v in used:
                mon[v] = rest % d
                rest //= d
            if rest:
                return None
            terms[tuple(mon)] = c
        return MultiPoly(p.field, p.vars, terms)

    img = image(p)
    internal = Budget(degree_bound=max(budget.degree_bound, img.degree + 1),
                      max_pairs=budget.max_pairs, max_terms=budget.max_terms)
    factors = []
    for fac, mult in factor_univariate(img, internal):
        factors.extend([fac] * mult)
    if len(factors) > 16:
        raise EffortExceeded("Kronecker image has too many factors")
    result = []
    current = p
    remaining = list(range(len(factors)))
    size = 1
    while remaining and 2 * size <= len(remaining):
        extracted = False
        for combo in itertools.combinations(remaining, size):
            cand_img = UniPoly(p.field, [1])
            for idx in combo:
                cand_img = cand_img * factors[idx]
            cand = preimage(cand_img)
            if cand is None:
                continue
            q = poly_div_exact(current, cand)
            if q is not None:
                result.append(cand.monic())
                current = q
                remaining = [i for i in remaining if i not in combo]
                extracted = True
                break
        if not extracted:
            size += 1
    if not current.is_constant():
        result.append(current.monic())
    return result


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RationalFn:
    """num/den in lowest terms with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None):
        if den is None:
            den = MultiPoly.const(num.field, num.vars, 1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = MultiPoly.const(num.field, num.vars, 1)
        else:
            g = mp_gcd(num, den)
            if not g.is_constant():
                num = poly_div_exact(num, g)
                den = poly_div_exact(den, g)
            _, lc = den.leading(GREVLEX)
            inv = num.field.one / lc
            num = num * inv
            den = den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *_):
        raise AttributeError("RationalFn is immutable")

    @property
    def field(self):
        return self.num.field

    @property
    def vars(self):
        return self.num.vars

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    @classmethod
    def from_scalar(cls, field, variables, value):
        return cls(MultiPoly.const(field, variables, value))

    def __add__(self, other):
        other = self._lift(other)
        return RationalFn(self.num * other.den + other.num * self.den,
                          self.den * other.den)

    __radd__ = __add__

    def _lift(self, other) -> "RationalFn":
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, MultiPoly):
            return RationalFn(other)
        return RationalFn(MultiPoly.const(self.field, self.vars, other))

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other.is_zero():
            raise ZeroDivisionError
        return RationalFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __eq__(self, other):
        if not isinstance(other, (RationalFn, MultiPoly, int, Fraction)):
            return NotImplemented
        other = self._lift(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def derivative(self, idx: int) -> "RationalFn":
        return RationalFn(self.num.derivative(idx) * self.den
                          - self.num * self.den.derivative(idx),
                          self.den * self.den)

    def substitute(self, images: dict[str, MultiPoly]) -> "RationalFn":
        """Substitute polynomials for variables; the caller must ensure the
        denominator image is nonzero (checked here)."""
        num = self.num.substitute(images)
        den = self.den.substitute(images)
        if den.is_zero():
            raise ZeroDivisionError("denominator vanishes under substitution")
        return RationalFn(num, den)

    def __repr__(self):
        if self.is_polynomial():
            if self.den.constant_value() == self.field.one:
                return repr(self.num)
        return f"({self.num!r})/({self.den!r})"
