"""Axiom suites for vertex, Courant and Lie algebroids on deterministic samples."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable

from .algebroid import COURANT, LIE, VERTEX, AlgebroidElement, AlgebroidStructure, KindError
from .exact.forms import DiffForm, VectorField
from .exact.ring import ChartRing, LaurentPoly

DEFAULT_SEED = 0
RANDOM_SAMPLES = 25

VERTEX_AXIOMS = (
    "v-assoc",
    "zero-minusone",
    "symm-zero",
    "anchor-module",
    "opm-one",
    "zero-one",
    "d-derivation",
    "zero-d",
    "va-1d",
)
VERTEX_EXTRA = ("one-symm", "leibniz", "anchor-bracket")

COURANT_AXIOMS = (
    "complex",
    "bracket-module",
    "pairing-invariance",
    "bracket-d",
    "ip-o",
    "ip-symm",
)
COURANT_EXTRA = ("leibniz", "anchor-bracket", "pairing-symm")

LIE_AXIOMS = ("antisymmetry", "jacobi", "bracket-module", "anchor-bracket")


@dataclass(frozen=True)
class AxiomCheck:
    axiom: str
    sample: str
    lhs: str
    rhs: str
    passed: bool
    discrepancy: str = ""


@dataclass
class AxiomReport:
    """Per-axiom outcomes; failures keep the exact symbolic discrepancy."""

    title: str
    checks: list[AxiomCheck] = field(default_factory=list)
    axioms: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if not c.passed]

    def failed_axioms(self) -> list[str]:
        return sorted({c.axiom for c in self.failures()})

    def counts(self) -> dict[str, tuple[int, int]]:
        out: dict[str, list[int]] = {a: [0, 0] for a in self.axioms}
        for c in self.checks:
            ent = out.setdefault(c.axiom, [0, 0])
            ent[0] += 1
            ent[1] += int(c.passed)
        return {k: (v[0], v[1]) for k, v in out.items()}

    def record(self, axiom: str, sample: str, lhs, rhs) -> None:
        ok = lhs == rhs
        disc = ""
        if not ok:
            try:
                disc = str(lhs - rhs)
            except Exception:  # mismatched shapes still deserve a readable report
                disc = f"{lhs} != {rhs}"
        # passing checks do not keep the (possibly large) rendered sides
        self.checks.append(AxiomCheck(axiom, sample, "" if ok else str(lhs), "" if ok else str(rhs), ok, disc))

    def sorted(self) -> "AxiomReport":
        order = {a: i for i, a in enumerate(self.axioms)}
        rep = AxiomReport(self.title, axioms=self.axioms)
        rep.checks = sorted(self.checks, key=lambda c: (order.get(c.axiom, len(order)), c.axiom))
        return rep

    def merge(self, other: "AxiomReport") -> "AxiomReport":
        rep = AxiomReport(self.title, list(self.checks) + list(other.checks),
                          tuple(dict.fromkeys(self.axioms + other.axioms)))
        return rep

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "counts": {k: {"total": t, "passed": p} for k, (t, p) in sorted(self.counts().items())},
            "failures": [
                {"axiom": c.axiom, "sample": c.sample, "lhs": c.lhs, "rhs": c.rhs, "discrepancy": c.discrepancy}
                for c in self.failures()
            ],
        }


# ---------------------------------------------------------------------------
# samples
# ---------------------------------------------------------------------------

def random_poly(ring: ChartRing, rng: random.Random, max_degree: int = 2, terms: int = 2) -> LaurentPoly:
    """Small random polynomial; inverted variables may carry exponent -1."""
    out = ring.zero()
    n = ring.ngens
    for _ in range(terms):
        exp = [0] * n
        budget = rng.randint(0, max_degree)
        for _ in range(budget):
            exp[rng.randrange(n)] += 1 if n else 0
        for i in range(n):
            if ring.is_inverted(i) and exp[i] == 0 and rng.random() < 0.25:
                exp[i] = -1
        coeff = Fraction(rng.choice([-2, -1, 1, 2, 3])) / rng.choice([1, 1, 2])
        out = out + ring.monomial(tuple(exp), coeff)
    return out


def random_form1(ring: ChartRing, rng: random.Random) -> DiffForm:
    w = DiffForm.zero(ring, 1)
    for k in range(ring.ngens):
        if rng.random() < 0.6:
            w = w + DiffForm.dvar(ring, k) * random_poly(ring, rng, 2, 1)
    return w


def random_element(s: AlgebroidStructure, rng: random.Random) -> AlgebroidElement:
    vf = [random_poly(s.ring, rng) if rng.random() < 0.7 else s.ring.zero() for _ in range(s.n)]
    ker = [random_poly(s.ring, rng, 2, 1) if rng.random() < 0.7 else s.ring.zero() for _ in range(s.m)]
    form = random_form1(s.ring, rng) if s.kind != LIE else DiffForm.zero(s.ring, 1)
    return s.element(vf, ker, form)


@dataclass
class SampleSet:
    """Deterministic samples: basis data plus seeded random combinations."""

    elements: list[AlgebroidElement]
    functions: list[LaurentPoly]
    pairs: list[tuple[AlgebroidElement, AlgebroidElement]]
    triples: list[tuple[AlgebroidElement, AlgebroidElement, AlgebroidElement]]
    function_pairs: list[tuple[LaurentPoly, LaurentPoly]]
    labels: dict[int, str]

    def label(self, e) -> str:
        return self.labels.get(id(e), str(e))


def build_samples(s: AlgebroidStructure, seed: int = DEFAULT_SEED, count: int = RANDOM_SAMPLES,
                  basis_triples: bool = True) -> SampleSet:
    rng = random.Random(seed)
    ring = s.ring
    basis = s.basis_elements()
    labels: dict[int, str] = {}
    names = [f"tau{i + 1}" for i in range(s.n)] + list(s.kernel.basis)
    if s.kind != LIE:
        names += [f"d{v}" for v in ring.variables]
    for e, nm in zip(basis, names):
        labels[id(e)] = nm
    coords = list(ring.gens())
    extra = []
    for i, x in enumerate(coords):
        e = s.minus_one(x, s.tau(i))
        labels[id(e)] = f"{ring.variables[i]}*tau{i + 1}"
        extra.append(e)
        if s.kind != LIE:
            de = s.partial(x * x)
            labels[id(de)] = f"d({ring.variables[i]}^2)"
            extra.append(de)
    randoms = []
    for k in range(count):
        e = random_element(s, rng)
        labels[id(e)] = f"rand{k}"
        randoms.append(e)
    functions = [ring.one()] + coords + [random_poly(ring, rng) for _ in range(count)]
    elements = basis + extra + randoms
    pairs = [(a, b) for a in basis + extra for b in basis + extra]
    pairs += [(randoms[k], randoms[(k * 7 + 3) % count]) for k in range(count)]
    triples = []
    if basis_triples:
        triples = [(a, b, c) for a, b, c in product(basis, repeat=3)]
    triples += [(randoms[k], randoms[(k + 5) % count], randoms[(3 * k + 11) % count]) for k in range(count)]
    fpairs = [(f, g) for f in coords for g in coords]
    fpairs += [(functions[1 + len(coords) + k], functions[1 + len(coords) + (k + 1) % count]) for k in range(count)]
    return SampleSet(elements, functions, pairs, triples, fpairs, labels)


def _memoized(op: Callable, samples: SampleSet) -> Callable:
    """Cache a binary operation on pairs of sample elements (which stay alive)."""
    keep = {id(e) for e in samples.elements}
    cache: dict = {}

    def wrapped(a, b):
        if id(a) in keep and id(b) in keep:
            key = (id(a), id(b))
            if key not in cache:
                cache[key] = op(a, b)
            return cache[key]
        return op(a, b)

    return wrapped


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def check_vertex_axioms(s: AlgebroidStructure, samples: SampleSet | None = None, seed: int = DEFAULT_SEED,
                        extras: bool = True) -> AxiomReport:
    """Check the nine vertex algebroid identities (plus Leibniz and anchor checks)."""
    if s.kind != VERTEX:
        raise KindError("vertex suite needs a vertex structure")
    sm = samples or build_samples(s, seed)
    rep = AxiomReport(f"vertex axioms: {s.name or s.ring.chart_id}", axioms=VERTEX_AXIOMS + (VERTEX_EXTRA if extras else ()))
    L = sm.label
    mo, pi, d = s.minus_one, s.anchor, s.partial
    zp, op = _memoized(s.zero_product, sm), _memoized(s.one_pairing, sm)
    funcs = sm.functions
    # v-assoc, anchor-module over (f, g, v)
    for idx, v in enumerate(sm.elements):
        f = funcs[idx % len(funcs)]
        g = funcs[(idx * 3 + 1) % len(funcs)]
        tag = f"f={f}, g={g}, v={L(v)}"
        rep.record("v-assoc", tag, mo(f, mo(g, v)) - mo(f * g, v),
                   mo(pi(v).apply(f), d(g)) + mo(pi(v).apply(g), d(f)))
        rep.record("anchor-module", tag, pi(mo(f, v)), pi(v) * f)
    for idx, (x, y) in enumerate(sm.pairs):
        f = funcs[idx % len(funcs)]
        tag = f"x={L(x)}, y={L(y)}, f={f}"
        rep.record("zero-minusone", tag, zp(x, mo(f, y)), mo(pi(x).apply(f), y) + mo(f, zp(x, y)))
        rep.record("symm-zero", tag, zp(x, y) + zp(y, x), d(op(x, y)))
        rep.record("opm-one", tag, op(mo(f, x), y), f * op(x, y) - pi(x).apply(pi(y).apply(f)))
        rep.record("zero-d", tag, zp(x, d(f)), d(pi(x).apply(f)))
        rep.record("va-1d", tag, op(x, d(f)), pi(x).apply(f))
        if extras:
            rep.record("one-symm", tag, op(x, y), op(y, x))
            rep.record("anchor-bracket", tag, pi(zp(x, y)), pi(x).bracket(pi(y)))
    for f, g in sm.function_pairs:
        rep.record("d-derivation", f"f={f}, g={g}", d(f * g), mo(f, d(g)) + mo(g, d(f)))
    for v, x, y in sm.triples:
        tag = f"v={L(v)}, x={L(x)}, y={L(y)}"
        rep.record("zero-one", tag, pi(v).apply(op(x, y)), op(zp(v, x), y) + op(x, zp(v, y)))
        if extras:
            rep.record("leibniz", tag, zp(v, zp(x, y)), zp(zp(v, x), y) + zp(x, zp(v, y)))
    return rep


def check_courant_axioms(s: AlgebroidStructure, samples: SampleSet | None = None, seed: int = DEFAULT_SEED) -> AxiomReport:
    """Check the six Courant identities plus Leibniz, anchor and symmetry checks."""
    if s.kind != COURANT:
        raise KindError("Courant suite needs a Courant structure")
    sm = samples or build_samples(s, seed)
    rep = AxiomReport(f"Courant axioms: {s.name or s.ring.chart_id}", axioms=COURANT_AXIOMS + COURANT_EXTRA)
    L = sm.label
    pi, d = s.anchor, s.partial
    br, pr = _memoized(s.zero_product, sm), _memoized(s.one_pairing, sm)
    funcs = sm.functions
    zero_vf = VectorField.zero(s.ring)
    for f in funcs:
        rep.record("complex", f"f={f}", pi(d(f)), zero_vf)
    for idx, (x, y) in enumerate(sm.pairs):
        f = funcs[idx % len(funcs)]
        tag = f"q1={L(x)}, q2={L(y)}, f={f}"
        rep.record("bracket-module", tag, br(x, y * f), br(x, y) * f + y * pi(x).apply(f))
        rep.record("bracket-d", tag, br(x, d(f)), d(pi(x).apply(f)))
        rep.record("ip-o", tag, pr(x, d(f)), pi(x).apply(f))
        rep.record("ip-symm", tag, br(x, y) + br(y, x), d(pr(x, y)))
        rep.record("pairing-symm", tag, pr(x, y), pr(y, x))
        rep.record("anchor-bracket", tag, pi(br(x, y)), pi(x).bracket(pi(y)))
    for q, x, y in sm.triples:
        tag = f"q={L(q)}, q1={L(x)}, q2={L(y)}"
        rep.record("pairing-invariance", tag, pr(br(q, x), y) + pr(x, br(q, y)), pi(q).apply(pr(x, y)))
        rep.record("leibniz", tag, br(q, br(x, y)), br(br(q, x), y) + br(x, br(q, y)))
    return rep


def check_lie_axioms(s: AlgebroidStructure, samples: SampleSet | None = None, seed: int = DEFAULT_SEED) -> AxiomReport:
    if s.kind != LIE:
        raise KindError("Lie suite needs a Lie structure")
    sm = samples or build_samples(s, seed)
    rep = AxiomReport(f"Lie axioms: {s.name or s.ring.chart_id}", axioms=LIE_AXIOMS)
    L = sm.label
    br, pi = _memoized(s.zero_product, sm), s.anchor
    for idx, (x, y) in enumerate(sm.pairs):
        f = sm.functions[idx % len(sm.functions)]
        tag = f"x={L(x)}, y={L(y)}, f={f}"
        rep.record("antisymmetry", tag, br(x, y), -br(y, x))
        rep.record("bracket-module", tag, br(x, y * f), br(x, y) * f + y * pi(x).apply(f))
        rep.record("anchor-bracket", tag, pi(br(x, y)), pi(x).bracket(pi(y)))
    for x, y, z in sm.triples:
        rep.record("jacobi", f"x={L(x)}, y={L(y)}, z={L(z)}", br(x, br(y, z)), br(br(x, y), z) + br(y, br(x, z)))
    return rep


def check_axioms(s: AlgebroidStructure, seed: int = DEFAULT_SEED) -> AxiomReport:
    """Dispatch on the structure kind."""
    if s.kind == VERTEX:
        return check_vertex_axioms(s, seed=seed)
    if s.kind == COURANT:
        return check_courant_axioms(s, seed=seed)
    return check_lie_axioms(s, seed=seed)
