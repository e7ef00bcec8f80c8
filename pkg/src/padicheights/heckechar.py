"""Unramified Hecke characters of even infinity type (ell, 0) and the
coefficients of their theta series.

A character chi with chi((alpha)) = alpha^ell is pinned down by its values
on class-group generators g_i of order d_i: chi(g_i) must be a d_i-th root
of alpha_i^ell, where g_i^{d_i} = (alpha_i).  Values come in three modes:

  exact    elements of K itself (class number 1 only: no roots needed)
  complex  mpmath complex numbers at a fixed decimal working precision
  padic    elements of Z_p, or of its unramified quadratic extension when
           the required root does not exist in the ground ring

The p-adic embedding sends sqrt(D) to the square root of D in Z_p whose
residue mod p is smallest; the distinguished prime above p is the kernel
of reduction under that embedding.

Per class A, r_chi(A, n) sums chi over the integral ideals of norm n in A.
Enumerating a fixed ideal lattice gives an independent route to the same
numbers (times the number of units).
"""

import contextlib
from fractions import Fraction
from math import isqrt

import mpmath
from sympy import isprime

from .padic import PadicError, PadicNumber, nth_root_zp, padic_sqrt
from .quadfield import (KElem, class_group, class_index_of_ideal, ideal_conj,
                        ideal_mult, ideal_norm, ideal_of_form, ideal_pow,
                        ideals_of_norm, kronecker, normalize_ideal,
                        principal_generator, validate_discriminant)

MODES = ("exact", "complex", "padic")


class CharBuildError(ValueError):
    """The requested character cannot be realized in the given mode."""


# ---------------------------------------------------------------------------
# the unramified quadratic extension of Q_p

def smallest_nonresidue(p: int) -> int:
    for c in range(2, p):
        if pow(c, (p - 1) // 2, p) == p - 1:
            return c
    raise PadicError("no quadratic nonresidue (p must be an odd prime)")


class QuadExtValue:
    """a + b*s with s^2 = c, the smallest quadratic nonresidue mod p.

    Components are PadicNumber over the same p; arithmetic follows the
    componentwise rules of Q_p(s).
    """

    __slots__ = ("p", "c", "a", "b")

    def __init__(self, p: int, c: int, a: PadicNumber, b: PadicNumber):
        if a.p != p or b.p != p:
            raise PadicError("mixed primes")
        self.p = p
        self.c = c
        self.a = a
        self.b = b

    @staticmethod
    def from_ground(x: PadicNumber, c: int) -> "QuadExtValue":
        return QuadExtValue(x.p, c, x, PadicNumber.zero(x.p))

    def is_ground(self) -> bool:
        return self.b.is_zero()

    def ground(self) -> PadicNumber:
        if not self.b.is_zero():
            raise PadicError("value is not in the ground ring")
        return self.a

    def _chk(self, o: "QuadExtValue"):
        if self.p != o.p or self.c != o.c:
            raise PadicError("mixed extensions")

    def __add__(self, o):
        if isinstance(o, QuadExtValue):
            self._chk(o)
            return QuadExtValue(self.p, self.c, self.a + o.a, self.b + o.b)
        return QuadExtValue(self.p, self.c, self.a + o, self.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtValue(self.p, self.c, -self.a, -self.b)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, QuadExtValue):
            self._chk(o)
            return QuadExtValue(self.p, self.c,
                                self.a * o.a + self.c * (self.b * o.b),
                                self.a * o.b + self.b * o.a)
        return QuadExtValue(self.p, self.c, self.a * o, self.b * o)

    __rmul__ = __mul__

    def conj(self) -> "QuadExtValue":
        return QuadExtValue(self.p, self.c, self.a, -self.b)

    def norm(self) -> PadicNumber:
        return self.a * self.a - self.c * (self.b * self.b)

    def inv(self) -> "QuadExtValue":
        return self.conj() * self.norm().inv()

    def __truediv__(self, o):
        if isinstance(o, QuadExtValue):
            return self * o.inv()
        return self * Fraction(1, 1) / o  # pragma: no cover - unused path

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inv() ** (-e)
        if e == 0:
            return QuadExtValue.from_ground(
                PadicNumber(self.p, 0, 1, max(self.a.prec, self.b.prec, 1)),
                self.c)
        base, r = self, None
        while e:
            if e & 1:
                r = base if r is None else r * base
            e >>= 1
            if e:
                base = base * base
        return r

    def __eq__(self, o):
        if isinstance(o, QuadExtValue):
            self._chk(o)
            return self.a == o.a and self.b == o.b
        return self.a == o and self.b == 0

    __hash__ = None

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json(),
                "nonresidue": self.c}

    def __repr__(self):
        return f"({self.a!r}) + ({self.b!r})*s"


# residue-level extension arithmetic on int pairs, used while lifting roots

def _ext_mul(x, y, c, mod):
    return ((x[0] * y[0] + c * x[1] * y[1]) % mod,
            (x[0] * y[1] + x[1] * y[0]) % mod)


def _ext_pow(x, e, c, mod):
    r = (1, 0)
    while e:
        if e & 1:
            r = _ext_mul(r, x, c, mod)
        x = _ext_mul(x, x, c, mod)
        e >>= 1
    return r


def _ext_inv(x, c, mod):
    n = (x[0] * x[0] - c * x[1] * x[1]) % mod
    ninv = pow(n, -1, mod)
    return (x[0] * ninv % mod, -x[1] * ninv % mod)


def _ext_nth_root_lift(p, c, x0, a, d, N):
    """Newton-lift the simple residue root x0 of X^d - a to mod p^N."""
    mod = p
    x = x0
    target = p ** N
    while mod < target:
        mod = min(mod * mod, target)
        fx = _ext_pow(x, d, c, mod)
        fx = ((fx[0] - a) % mod, fx[1])
        df = _ext_pow(x, d - 1, c, mod)
        df = (df[0] * d % mod, df[1] * d % mod)
        step = _ext_mul(fx, _ext_inv(df, c, mod), c, mod)
        x = ((x[0] - step[0]) % mod, (x[1] - step[1]) % mod)
    if _ext_pow(x, d, c, target) != (a % target, 0):
        raise PadicError("extension root lift failed (bug)")
    return x


def _all_residue_roots(p, c, a, d):
    """Roots of X^d = a in F_{p^2}: ground ones first, each branch sorted."""
    ground = [(r, 0) for r in range(1, p) if pow(r, d, p) == a % p]
    ext = []
    for b in range(1, p):
        for r in range(p):
            if _ext_pow((r, b), d, c, p) == (a % p, 0):
                ext.append((r, b))
    ext.sort()
    return ground + ext


# ---------------------------------------------------------------------------
# coefficient container

class CoeffSeries:
    """Coefficients c(1), ..., c(bound) of a q-series, 1-based access."""

    __slots__ = ("bound", "values")

    def __init__(self, bound: int, values):
        values = list(values)
        if bound < 1 or len(values) != bound:
            raise ValueError("bound/values length mismatch")
        self.bound = bound
        self.values = values

    def coeff(self, n: int):
        if not 1 <= n <= self.bound:
            raise IndexError(f"coefficient index {n} out of range")
        return self.values[n - 1]

    def __len__(self):
        return self.bound

    def __iter__(self):
        return iter(self.values)

    def __repr__(self):
        return f"CoeffSeries({self.bound}, {self.values!r})"


# ---------------------------------------------------------------------------
# the character

class HeckeChar:
    """Value table of an unramified Hecke character of infinity type (ell, 0).

    Built by build_char; immutable afterwards.  chi_value evaluates on any
    integral ideal, r_chi sums values over the ideals of a given norm and
    class.
    """

    def __init__(self, D, ell, mode, group, p, prec, s_D, nonres, gen_roots,
                 table, prime_above, ground, audit):
        self.D = D
        self.ell = ell
        self.k = ell // 2
        self.mode = mode
        self.group = group
        self.p = p
        self.prec = prec
        self.s_D = s_D
        self.nonres = nonres
        self._gen_roots = gen_roots
        self.table = table
        self.prime_above = prime_above
        self.ground = ground
        self.audit = audit

    def _ctx(self):
        if self.mode == "complex":
            return mpmath.workdps(self.prec)
        return contextlib.nullcontext()

    # -- mode plumbing -------------------------------------------------------

    def one(self):
        if self.mode == "exact":
            return KElem(self.D, 1, 0)
        if self.mode == "complex":
            with self._ctx():
                return mpmath.mpc(1)
        v = PadicNumber(self.p, 0, 1, self.prec)
        return v if self.ground else QuadExtValue.from_ground(v, self.nonres)

    def zero(self):
        if self.mode == "exact":
            return KElem(self.D, 0, 0)
        if self.mode == "complex":
            with self._ctx():
                return mpmath.mpc(0)
        v = PadicNumber.zero(self.p)
        return v if self.ground else QuadExtValue.from_ground(v, self.nonres)

    def embed(self, g: KElem):
        """The mode's image of an element x + y*sqrt(D) of K."""
        if self.mode == "exact":
            return g
        if self.mode == "complex":
            with self._ctx():
                sq = mpmath.sqrt(mpmath.mpf(-self.D))
                x = mpmath.mpf(g.x.numerator) / g.x.denominator
                y = mpmath.mpf(g.y.numerator) / g.y.denominator
                return mpmath.mpc(x, y * sq)
        v = (PadicNumber.from_rational(self.p, g.x, self.prec)
             + PadicNumber.from_rational(self.p, g.y, self.prec) * self.s_D)
        return v if self.ground else QuadExtValue.from_ground(v, self.nonres)

    def close(self, u, v, scale=1) -> bool:
        """Mode-appropriate equality: exact/padic compare directly, complex
        within 10^(5 - prec) relative to max(1, scale, |u|, |v|)."""
        if self.mode == "complex":
            with self._ctx():
                scale = Fraction(scale)
                tol = mpmath.mpf(10) ** (5 - self.prec)
                s = abs(mpmath.mpf(scale.numerator)) / scale.denominator
                bound = max(mpmath.mpf(1), s, abs(u), abs(v))
                return abs(u - v) <= tol * bound
        return u == v

    # -- evaluation ----------------------------------------------------------

    def class_value(self, class_index: int):
        """chi at the canonical (reduced-form) representative of the class."""
        return self.table[class_index]

    def chi_value(self, ideal):
        """chi of an integral ideal (e, a, b)."""
        D = self.D
        ideal = normalize_ideal(D, *ideal)
        ci = class_index_of_ideal(D, ideal)
        exps = self.group.dlog(ci)
        b_id = ideal
        with self._ctx():
            corr = None
            for (gen_ideal, root, ngl), e in zip(self._gen_roots, exps):
                if e:
                    b_id = ideal_mult(D, b_id,
                                      ideal_pow(D, ideal_conj(D, gen_ideal), e))
                    f = (root * ngl) ** e
                    corr = f if corr is None else corr * f
            gamma = principal_generator(D, b_id)
            v = self.embed(gamma) ** self.ell
            return v if corr is None else v * corr

    def r_chi(self, class_index: int, n):
        """Sum of chi over integral ideals of norm n in the class; 0 unless
        n is a positive integer."""
        if n != int(n) or n <= 0:
            return self.zero()
        with self._ctx():
            acc = self.zero()
            for ideal, ci in ideals_of_norm(self.D, int(n)):
                if ci == class_index:
                    acc = acc + self.chi_value(ideal)
            return acc


# ---------------------------------------------------------------------------
# construction

def build_char(D, ell, mode, p=None, prec=None, twist=None):
    """Build a Hecke character table; see the module docstring for modes.

    twist optionally rotates each generator's root choice inside the list
    of admissible roots (one integer per class-group generator); the
    twisted character differs from the default one by a character of the
    class group.
    """
    validate_discriminant(D)
    if ell <= 0 or ell % 2:
        raise CharBuildError("infinity type (ell, 0) needs even ell > 0")
    if mode not in MODES:
        raise CharBuildError(f"unknown mode {mode!r}")
    G = class_group(D)
    if mode == "exact" and G.h > 1:
        raise CharBuildError(
            f"exact mode requires class number 1, got h = {G.h}")
    s_D = None
    nonres = None
    if mode == "padic":
        if p is None or p == 2 or not isprime(p):
            raise CharBuildError("padic mode needs an odd prime p")
        if kronecker(D, p) != 1:
            raise CharBuildError(f"p = {p} does not split in Q(sqrt({D}))")
        prec = 30 if prec is None else prec
        s_D = PadicNumber(p, 0, padic_sqrt(p, D, prec), prec)
        nonres = smallest_nonresidue(p)
    elif mode == "complex":
        prec = 40 if prec is None else prec
    else:
        prec = None
    if twist is not None and len(twist) != len(G.generators):
        raise CharBuildError("twist needs one entry per class-group generator")

    raw_roots = []
    audit = []
    ground = True
    for idx, (gi, di) in enumerate(G.generators):
        gen_ideal = ideal_of_form(D, G.forms[gi])
        ng = ideal_norm(gen_ideal)
        alpha = principal_generator(D, ideal_pow(D, gen_ideal, di))
        t_i = 0 if twist is None else twist[idx]
        entry = {"class": gi, "order": di, "norm": ng,
                 "alpha": [str(alpha.x), str(alpha.y)], "twist": t_i}
        if mode == "complex":
            with mpmath.workdps(prec):
                sq = mpmath.sqrt(mpmath.mpf(-D))
                target = mpmath.mpc(
                    mpmath.mpf(alpha.x.numerator) / alpha.x.denominator,
                    (mpmath.mpf(alpha.y.numerator) / alpha.y.denominator) * sq
                ) ** ell
                root = mpmath.root(target, di)
                if t_i % di:
                    root *= mpmath.expjpi(mpmath.mpf(2 * (t_i % di)) / di)
            entry["root"] = [mpmath.nstr(root.real, 25),
                             mpmath.nstr(root.imag, 25)]
            with mpmath.workdps(prec):
                ngl = mpmath.mpf(1) / (ng ** ell)
            raw_roots.append((gen_ideal, root, ngl))
        else:
            if ng % p == 0:
                raise CharBuildError(
                    f"generator representative has norm divisible by p = {p}")
            if di % p == 0:
                raise CharBuildError(f"generator order {di} divisible by "
                                     f"p = {p} (wild case unsupported)")
            a_emb = (PadicNumber.from_rational(p, alpha.x, prec)
                     + PadicNumber.from_rational(p, alpha.y, prec) * s_D) ** ell
            a_int = a_emb.residue(prec)
            pair = None
            if t_i == 0:
                r0 = nth_root_zp(p, a_int, di, prec)
                pair = None if r0 is None else (r0, 0)
            if pair is None:
                roots = _all_residue_roots(p, nonres, a_int, di)
                if not roots:
                    raise CharBuildError(
                        f"no root: X^{di} = {a_int % p} (mod {p}) has no "
                        f"solution in F_(p^2); chi on the class-group "
                        f"generator of index {gi} cannot take values in Z_{p} "
                        f"or its unramified quadratic extension")
                pair = _ext_nth_root_lift(p, nonres, roots[t_i % len(roots)],
                                          a_int, di, prec)
            if pair[1] != 0:
                ground = False
            entry["root"] = [str(pair[0]), str(pair[1])]
            raw_roots.append((gen_ideal, pair, Fraction(1, ng ** ell)))
        audit.append(entry)

    gen_roots = raw_roots
    if mode == "padic":
        # wrap int-pair roots now that the ground ring is known
        gen_roots = []
        for gen_ideal, pair, ngl in raw_roots:
            a_c = PadicNumber(p, 0, pair[0], prec)
            b_c = PadicNumber(p, 0, pair[1], prec)
            root = a_c if ground else QuadExtValue(p, nonres, a_c, b_c)
            gen_roots.append((gen_ideal, root, ngl))

    prime_above = None
    if mode == "padic":
        b = s_D.residue(1)
        if b % 2 == 0:
            b += p
        prime_above = normalize_ideal(D, 1, p, b)

    char = HeckeChar(D, ell, mode, G, p, prec, s_D, nonres, gen_roots, None,
                     prime_above, ground, audit)
    char.table = [char.chi_value(ideal_of_form(D, f)) for f in G.forms]

    # sanity: stored roots actually solve chi(g)^d = alpha^ell
    with char._ctx():
        for (gen_ideal, root, _), (gi, di) in zip(gen_roots, G.generators):
            alpha = principal_generator(D, ideal_pow(D, gen_ideal, di))
            if not char.close(root ** di, char.embed(alpha) ** ell,
                              scale=abs(alpha.norm()) ** (ell // 2)):
                raise CharBuildError("root verification failed (bug)")
    return char


# ---------------------------------------------------------------------------
# theta coefficients

def theta_coeffs(char: HeckeChar, class_index: int, bound: int) -> CoeffSeries:
    """r_chi(class, n) for n = 1..bound."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    return CoeffSeries(bound, [char.r_chi(class_index, n)
                               for n in range(1, bound + 1)])


def lattice_points_by_norm(D, ideal, bound):
    """Conjugates x-bar of the points of the ideal lattice with
    N(x)/N(ideal) = n, grouped per n = 1..bound (KElem lists)."""
    e, a, b = normalize_ideal(D, *ideal)
    c = (b * b - D) // (4 * a)
    out = [[] for _ in range(bound + 1)]
    smax = isqrt(4 * c * bound // (-D)) + 1
    tmax = isqrt(4 * a * bound // (-D)) + 1
    for s in range(-smax, smax + 1):
        for t in range(-tmax, tmax + 1):
            q = a * s * s + b * s * t + c * t * t
            if 0 < q <= bound:
                # x = e*(s*a + t*(b - sqrt(D))/2), conjugated
                out[q].append(KElem(D, Fraction(e * (2 * s * a + t * b), 2),
                                    Fraction(e * t, 2)))
    return out


def lattice_theta_coeffs(char: HeckeChar, ideal, bound: int) -> CoeffSeries:
    """chi(ideal-bar)^(-1) * sum of x-bar^ell over lattice points of each
    norm ratio n, by direct enumeration; equals (#units) * r_chi termwise."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    D = char.D
    ideal = normalize_ideal(D, *ideal)
    pts = lattice_points_by_norm(D, ideal, bound)
    with char._ctx():
        fac = char.chi_value(ideal_conj(D, ideal))
        inv = 1 / fac if char.mode == "complex" else fac.inv()
        values = []
        for n in range(1, bound + 1):
            acc = KElem(D, 0, 0)
            for xbar in pts[n]:
                acc = acc + xbar ** char.ell
            values.append(char.embed(acc) * inv)
    return CoeffSeries(bound, values)


def weighted_theta(char: HeckeChar, class_index: int, phi, bound: int,
                   modulus=None) -> CoeffSeries:
    """Theta coefficients with each lattice point weighted by phi(Q(x)),
    phi applied to Q(x) mod modulus when a modulus is given.

    The weight enters inside the lattice sum (not as a post-factor), so a
    comparison against phi(n) * lattice_theta_coeffs(...) exercises the
    factorization rather than assuming it.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    D = char.D
    ideal = ideal_of_form(D, char.group.forms[class_index])
    pts = lattice_points_by_norm(D, ideal, bound)
    with char._ctx():
        fac = char.chi_value(ideal_conj(D, ideal))
        inv = 1 / fac if char.mode == "complex" else fac.inv()
        values = []
        for n in range(1, bound + 1):
            acc = None
            for xbar in pts[n]:
                q = n if modulus is None else n % modulus
                term = char.embed(xbar ** char.ell) * phi(q)
                acc = term if acc is None else acc + term
            if acc is None:
                acc = char.zero()
            values.append(acc * inv)
    return CoeffSeries(bound, values)
