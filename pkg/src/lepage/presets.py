"""Worked examples as fixtures: Dirac and Maxwell fields, and an affine toy.

Each fixture file holds a problem (in the io schema), registered exact
solutions and expected artifacts stored as expression text.  Artifact texts
may use placeholders: ``L`` for the Lagrangian, and for Lagrangians affine in
the velocities ``L0`` and ``Ls_i`` for the parts of ``L = L0 + Ls_i ys_i``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from . import expr as E
from . import linalg
from .chart import Chart
from .errors import LepageError, UnknownPreset
from .gtensor import closedness_check, satellite
from .io import complex_from_json, problem_from_dict
from .lagrangian import GeneralLagrangian, dedonder
from .legendre import (
    LepageanSystem,
    corollary1_check,
    dedonder_identities,
    krupka_matrix,
    legendre_map,
    matrix_regular_at,
    momenta_at,
)
from .parser import parse
from .poly import equals, simplify

NAMES = ("dirac2", "dirac4", "maxwell2", "maxwell4", "affine_toy")


# -- Lagrangian builders ----------------------------------------------------------


def lorentz_metric(n: int) -> list[int]:
    return [-1] + [1] * (n - 1)


def maxwell_lagrangian(n: int) -> E.Expr:
    """``1/2 (y^s_v y^v_s - G^{ss} G_{mm} (y^m_s)^2)`` with diagonal Lorentz G."""
    ch = Chart(n, n)
    G = lorentz_metric(n)
    half = Fraction(1, 2)
    terms = [E.mul(half, E.Var(ch.jet(s, v)), E.Var(ch.jet(v, s)))
             for s in range(1, n + 1) for v in range(1, n + 1)]
    terms += [E.mul(-half * G[s - 1] * G[mu - 1], E.power(E.Var(ch.jet(mu, s)), 2))
              for s in range(1, n + 1) for mu in range(1, n + 1)]
    return simplify(E.add(*terms))


def dirac_lagrangian(n: int) -> E.Expr:
    """``i/2 (psibar gamma^mu d_mu psi + d_mu psibar gamma^mu psi) - psibar m psi``
    with ``psi = y1`` and ``psibar = y2``."""
    text = " + ".join(f"y2*gamma{k}*y1_{k} + y2_{k}*gamma{k}*y1" for k in range(1, n + 1))
    ch = Chart(n, 2)
    return parse(f"im/2*({text}) - y2*m*y1", ch, dirac_params(n))


def dirac_params(n: int) -> tuple[str, ...]:
    return tuple(f"gamma{k}" for k in range(1, n + 1)) + ("m",)


def random_polynomial(chart: Chart, rng: random.Random, degree: int = 2, terms: int = 3) -> E.Expr:
    """A polynomial in (x, y) with small rational coefficients."""
    names = chart.x_names + chart.y_names
    out = []
    for _ in range(terms):
        coef = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 4))
        mono = [E.Var(rng.choice(names)) for _ in range(rng.randint(0, degree))]
        out.append(E.mul(coef, *mono))
    return simplify(E.add(*out))


def random_affine_parts(chart: Chart, seed: int, degree: int = 2) -> dict[str, E.Expr]:
    """Seeded ``L0`` and ``Ls_i`` for an affine Lagrangian."""
    rng = random.Random(seed)
    parts = {"L0": random_polynomial(chart, rng, degree)}
    for s, i in chart.pairs:
        parts[f"L{s}_{i}"] = random_polynomial(chart, rng, degree)
    return parts


def assemble_affine(chart: Chart, parts: dict[str, E.Expr]) -> E.Expr:
    terms = [parts["L0"]]
    terms += [E.mul(parts[f"L{s}_{i}"], E.Var(chart.jet(s, i))) for s, i in chart.pairs]
    return E.add(*terms)


def placeholder_names(chart: Chart) -> tuple[str, ...]:
    return ("L", "L0") + tuple(f"L{s}_{i}" for s, i in chart.pairs)


def placeholder_values(sys: LepageanSystem) -> dict[str, E.Expr]:
    ch = sys.chart
    vals = {"L": sys.lagrangian.expr}
    q = sys.quadratic
    if q is not None and q.is_affine:
        vals["L0"] = q.a
        for s, i in ch.pairs:
            vals[f"L{s}_{i}"] = q.b_coef(s, i)
    return vals


# -- fixtures ---------------------------------------------------------------------


@dataclass(frozen=True)
class Artifact:
    tag: str
    kind: str
    value: object
    options: dict = field(default_factory=dict)


@dataclass
class Preset:
    name: str
    system: LepageanSystem
    solutions: list
    artifacts: list
    notes: list = field(default_factory=list)
    doc: dict = field(default_factory=dict, repr=False)
    solution_bindings: dict = field(default_factory=dict)

    @property
    def chart(self) -> Chart:
        return self.system.chart

    def expected(self, kind: str) -> list[Artifact]:
        return [a for a in self.artifacts if a.kind == kind]

    def artifact(self, tag: str) -> Artifact:
        for a in self.artifacts:
            if a.tag == tag:
                return a
        raise KeyError(tag)

    def parse(self, text: str) -> E.Expr:
        """Parse artifact text, expanding placeholders."""
        ch = self.chart
        e = parse(text, ch, self.system.params, extra_vars=placeholder_names(ch) + ch.mom_names)
        return E.substitute(e, placeholder_values(self.system))


def fixture_text(name: str) -> str:
    if name not in NAMES:
        raise UnknownPreset(name)
    return resources.files("lepage").joinpath(f"data/presets/{name}.json").read_text()


def preset_from_dict(doc: dict) -> Preset:
    sys = problem_from_dict(doc["problem"]).system
    ch = sys.chart
    sols = [tuple(parse(t, ch, sys.params) for t in fields) for fields in doc.get("solutions", [])]
    arts = [Artifact(a["tag"], a["kind"], a["value"], a.get("options", {})) for a in doc.get("artifacts", [])]
    binds = {k: complex_from_json(v, f"solution_bindings/{k}") for k, v in doc.get("solution_bindings", {}).items()}
    return Preset(doc["name"], sys, sols, arts, list(doc.get("notes", [])), doc, binds)


def load_preset(name: str) -> Preset:
    return preset_from_dict(json.loads(fixture_text(name)))


# -- checks -----------------------------------------------------------------------


@dataclass(frozen=True)
class CheckEntry:
    tag: str
    kind: str
    passed: bool
    detail: str = ""


@dataclass
class PresetReport:
    name: str
    entries: list
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "entries": [{"tag": e.tag, "kind": e.kind, "passed": e.passed, "detail": e.detail} for e in self.entries],
            "notes": list(self.notes),
        }


class _Ctx:
    """Lazily computed quantities shared by the checks of one preset."""

    def __init__(self, preset: Preset):
        self.preset = preset
        self.sys = preset.system
        self._lmap = None

    @property
    def lmap(self):
        if self._lmap is None:
            self._lmap = legendre_map(self.sys)
        return self._lmap


def _mismatch(pairs) -> list[str]:
    return [name for name, got, want in pairs if not equals(got, want)]


def _matrix(ctx, value):
    return [[ctx.preset.parse(str(t)) for t in row] for row in value]


def _momentum_lookup(ch: Chart, lmap) -> dict[str, E.Expr]:
    return {ch.mom(s, i): p for (s, i), p in zip(ch.pairs, lmap.p)}


def _check_matrix(ctx, art):
    want = _matrix(ctx, art.value)
    got = ctx.lmap.K
    ok = linalg.matrices_equal(got, want)
    return ok, "" if ok else "regularity matrix differs"


def _check_det(ctx, art):
    got = linalg.symbolic_det(ctx.lmap.K)
    ok = bool(equals(got, ctx.preset.parse(art.value)))
    return ok, f"det = {E.to_text(got)}"


def _check_momenta(ctx, art):
    ch = ctx.preset.chart
    got = _momentum_lookup(ch, ctx.lmap)
    bad = _mismatch((k, got[ch.normalize(k)], ctx.preset.parse(v)) for k, v in art.value.items())
    return not bad, f"mismatch in {bad}" if bad else f"{len(art.value)} momenta"


def _check_inverse(ctx, art):
    """Substituting the momenta into the inverse map must return the jets."""
    ch = ctx.preset.chart
    b = _momentum_lookup(ch, ctx.lmap)
    bad = _mismatch(
        (k, E.substitute(ctx.preset.parse(v), b), E.Var(ch.normalize(k))) for k, v in art.value.items()
    )
    return not bad, f"mismatch in {bad}" if bad else ""


def _check_legendre_h(ctx, art):
    got = ctx.lmap.H_leg
    if got is None:
        return False, "no symbolic Hamiltonian"
    ok = bool(equals(got, ctx.preset.parse(art.value)))
    return ok, "" if ok else f"got {E.to_text(got)}"


def _check_h_probe(ctx, art):
    """Expected H(p) against H_jet(v) with p = p(v) at seeded jet points."""
    sys, ch = ctx.sys, ctx.preset.chart
    probes = int(art.options.get("probes", 100))
    tol = float(art.options.get("tolerance", 1e-9))
    rng = np.random.default_rng(int(art.options.get("seed", 42)))
    want = E.compile_expr(ctx.preset.parse(art.value))
    hj = E.compile_expr(ctx.lmap.H_jet)
    env0 = sys.bindings()
    worst = 0.0
    for _ in range(probes):
        x, y, v = rng.uniform(-1, 1, ch.n), rng.uniform(-1, 1, ch.m), rng.uniform(-1, 1, ch.size)
        p = momenta_at(sys, x, y, v, lmap=ctx.lmap)
        env = {**env0, **dict(zip(ch.x_names, x)), **dict(zip(ch.y_names, y))}
        ej = {**env, **dict(zip(ch.jet_names, v))}
        ep = {**env, **dict(zip(ch.mom_names, p))}
        worst = max(worst, abs(complex(want(ep)) - complex(hj(ej))))
    return worst <= tol, f"max error {worst:.3e} over {probes} probes"


def _expr_check(getter):
    def check(ctx, art):
        got = getter(ctx)
        ok = bool(equals(got, ctx.preset.parse(art.value)))
        return ok, "" if ok else f"got {E.to_text(simplify(got))}"
    return check


def _check_dedonder_momenta(ctx, art):
    ch = ctx.preset.chart
    d = dedonder(ctx.sys.lagrangian)
    got = {ch.mom(s, i): p for (s, i), p in zip(ch.pairs, d.momenta)}
    bad = _mismatch((k, got[ch.normalize(k)], ctx.preset.parse(v)) for k, v in art.value.items())
    return not bad, f"mismatch in {bad}" if bad else ""


def _check_krupka(ctx, art):
    M = krupka_matrix(ctx.sys.lagrangian)
    if isinstance(art.value, list):
        if not linalg.matrices_equal(M, _matrix(ctx, art.value)):
            return False, "Krupka-induced matrix differs"
    d = linalg.symbolic_det(M)
    singular = E.is_zero(simplify(d))
    rejected = not matrix_regular_at(M, ctx.sys.bindings())
    return singular and rejected, f"det = {E.to_text(d)}, checker {'rejects' if rejected else 'accepts'}"


def _check_discrepancy(ctx, art):
    """Passes when a printed form is confirmed to disagree with the computed one."""
    what = art.options.get("compare", "hamiltonian_jet")
    got = {"hamiltonian_jet": lambda: ctx.lmap.H_jet}[what]()
    differs = not equals(got, ctx.preset.parse(art.value))
    return differs, f"printed form {'differs from' if differs else 'matches'} the computed {what}"


def _check_affine_family(ctx, art):
    """Templates in L0, Ls_i checked on seeded random affine Lagrangians that
    share the preset's g."""
    sys, ch = ctx.sys, ctx.preset.chart
    want = art.value
    count = int(art.options.get("instances", 5))
    seed = int(art.options.get("seed", 42))
    extra = placeholder_names(ch) + ch.mom_names
    templates = {
        "momenta": {k: parse(v, ch, sys.params, extra_vars=extra) for k, v in want.get("momenta", {}).items()},
        "inverse_map": {k: parse(v, ch, sys.params, extra_vars=extra) for k, v in want.get("inverse_map", {}).items()},
    }
    H_t = parse(want["hamiltonian"], ch, sys.params, extra_vars=extra) if "hamiltonian" in want else None
    for t in range(count):
        parts = random_affine_parts(ch, seed + t)
        L = GeneralLagrangian(ch, assemble_affine(ch, parts), sys.params, sys.lagrangian.defaults)
        inst = LepageanSystem(L, sys.g)
        lm = legendre_map(inst)
        b = _momentum_lookup(ch, lm)
        for k, tmpl in templates["momenta"].items():
            if not equals(b[ch.normalize(k)], E.substitute(tmpl, parts)):
                return False, f"instance {t}: momentum {k}"
        for k, tmpl in templates["inverse_map"].items():
            if not equals(E.substitute(E.substitute(tmpl, parts), b), E.Var(ch.normalize(k))):
                return False, f"instance {t}: inverse {k}"
        if H_t is not None and not equals(lm.H_leg, E.substitute(H_t, parts)):
            return False, f"instance {t}: Hamiltonian"
    return True, f"{count} instances"


_CHECKS = {
    "lagrangian": _expr_check(lambda c: c.sys.lagrangian.expr),
    "regularity_matrix": _check_matrix,
    "det": _check_det,
    "momenta": _check_momenta,
    "inverse_map": _check_inverse,
    "legendre_hamiltonian": _check_legendre_h,
    "hamiltonian_probe": _check_h_probe,
    "hamiltonian_jet": _expr_check(lambda c: c.lmap.H_jet),
    "satellite": _expr_check(lambda c: satellite(c.sys.g)),
    "dedonderization": _expr_check(lambda c: E.sub(c.sys.lagrangian.expr, satellite(c.sys.g))),
    "hamiltonian_correction": _expr_check(lambda c: E.sub(c.lmap.H_jet, dedonder(c.sys.lagrangian).hamiltonian)),
    "dedonder_momenta": _check_dedonder_momenta,
    "dedonder_hamiltonian": _expr_check(lambda c: dedonder(c.sys.lagrangian).hamiltonian),
    "krupka_singular": _check_krupka,
    "discrepancy": _check_discrepancy,
    "affine_family": _check_affine_family,
}

ARTIFACT_KINDS = tuple(_CHECKS)


def run_preset_checks(preset: Preset, identities: bool = True) -> PresetReport:
    """Compare every stored artifact with the computed one.  Failures and
    errors become report entries."""
    ctx = _Ctx(preset)
    entries = []

    def record(tag, kind, fn):
        try:
            ok, detail = fn()
        except (LepageError, ValueError, ArithmeticError) as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        entries.append(CheckEntry(tag, kind, bool(ok), detail))

    for art in preset.artifacts:
        check = _CHECKS.get(art.kind)
        if check is None:
            entries.append(CheckEntry(art.tag, art.kind, False, "unknown artifact kind"))
            continue
        record(art.tag, art.kind, lambda: check(ctx, art))

    record("regular_at_defaults", "regularity",
           lambda: (matrix_regular_at(ctx.lmap.K, {**ctx.sys.bindings(), **_half_point(preset.chart)}), ""))
    if identities:
        for key, ok in _safe_identities(ctx).items():
            entries.append(CheckEntry(key, "dedonder_identity", ok))
        record("hessian_inverts_K", "corollary", lambda: _corollary(ctx))
    report = closedness_check(preset.system.g)
    entries.append(CheckEntry("eta_closed", "closedness", report.closed,
                              "" if report.closed else f"{len(report.violations)} violations"))
    return PresetReport(preset.name, entries, list(preset.notes))


def _half_point(ch: Chart) -> dict[str, float]:
    return {n: 0.5 for n in ch.x_names + ch.y_names + ch.jet_names}


def _safe_identities(ctx) -> dict[str, bool]:
    try:
        return dedonder_identities(ctx.sys, ctx.lmap)
    except LepageError as exc:
        return {f"identities ({type(exc).__name__})": False}


def _corollary(ctx):
    chk = corollary1_check(ctx.sys, lmap=ctx.lmap)
    return chk.ok, f"{'exact' if chk.exact else 'numeric'}, max error {chk.max_error:.3e}"
