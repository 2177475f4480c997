"""Tightest constants for the twelve A-infinity conditions.

Every evaluator returns a :class:`ConstantReport` holding one value per basis
element (in basis order), their maximum and a witness.  Values are
``Fraction`` on the exact backend, ``float`` on the float backend, and
``math.inf`` for the degenerate cases.

Local conditions depend on a basis element only through the multiset of
``(weight, measure)`` values it holds, so they are evaluated once per
distinct profile (see :attr:`Instance.profiles`).  All evaluators run on the
instance's primitive integer normalisation; each constant is invariant under
``w -> c*w`` and ``mu -> c*mu``, so this changes nothing but speed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Callable, Mapping, Sequence, Union

from .errors import ParameterError, ZeroWeightBase
from .measure import BaseRef, Instance, as_rational, format_rational
from .subsets import Objective, search_profile, subset_from_counts

Value = Union[Fraction, float]

CONDITIONS = ("P1", "P1'", "P2", "P2'", "P3", "P3'", "P4", "P4'", "P5", "P6", "P7", "P8")

EXACT = "exact"
FLOAT = "float"

# which ConditionParams field each condition takes
REQUIRED = {
    "P1": ("p",),
    "P1'": ("delta",),
    "P2'": ("s_grid",),
    "P3": ("q",),
    "P3'": ("delta",),
    "P4": ("alpha",),
    "P4'": ("alpha",),
    "P8": ("beta",),
}

DEFAULTS = {
    "p": Fraction(2),
    "delta": Fraction(1, 2),
    "s_grid": (Fraction(1, 1000), Fraction(1, 100), Fraction(1, 10), Fraction(1, 2), Fraction(9, 10)),
    "q": Fraction(2),
    "alpha": Fraction(1, 2),
    "beta": Fraction(1),
}


def normalize_condition(name: str) -> str:
    key = name.strip().upper().replace("′", "'").replace("_PRIME", "'").replace("PRIME", "'")
    if len(key) == 3 and key.endswith("P"):  # shell-friendly "P1p"
        key = key[:2] + "'"
    if key not in CONDITIONS:
        raise ParameterError(f"unknown condition {name!r}")
    return key


@dataclass(frozen=True)
class ConditionParams:
    p: Fraction | None = None
    delta: Fraction | None = None
    s_grid: tuple | None = None
    q: Fraction | None = None
    alpha: Fraction | None = None
    beta: Fraction | None = None

    def items(self):
        return [(f.name, getattr(self, f.name)) for f in fields(self) if getattr(self, f.name) is not None]

    def __str__(self):
        parts = []
        for name, v in self.items():
            if name == "s_grid":
                parts.append("s_grid=" + ";".join(format_rational(s) for s in v))
            else:
                parts.append(f"{name}={format_rational(v)}")
        return " ".join(parts)


def make_params(condition: str, defaults: bool = False, **given) -> ConditionParams:
    """Validated parameters for ``condition``.

    Parameters the condition does not take are rejected; with ``defaults``
    missing ones are filled from :data:`DEFAULTS`.
    """
    condition = normalize_condition(condition)
    needed = REQUIRED.get(condition, ())
    given = {k: v for k, v in given.items() if v is not None}
    extra = set(given) - set(needed)
    if extra:
        raise ParameterError(f"{condition} takes no parameter {sorted(extra)[0]!r}")
    values = {}
    for name in needed:
        if name not in given:
            if not defaults:
                raise ParameterError(f"{condition} needs parameter {name!r}")
            given[name] = DEFAULTS[name]
        if name == "s_grid":
            grid = tuple(sorted({as_rational(s) for s in given[name]}))
            if not grid or any(not 0 < s < 1 for s in grid):
                raise ParameterError("every s must lie in (0,1)")
            values[name] = grid
            continue
        v = as_rational(given[name])
        if name in ("p", "q") and v <= 1:
            raise ParameterError(f"{name} must exceed 1")
        if name in ("delta", "beta") and v <= 0:
            raise ParameterError(f"{name} must be positive")
        if name == "alpha" and not 0 < v < 1:
            raise ParameterError("alpha must lie in (0,1)")
        values[name] = v
    return ConditionParams(**values)


@dataclass(frozen=True)
class Witness:
    """Where the overall constant is attained.

    ``subset`` is set for P1', P3', P4; ``level`` is the threshold
    ``alpha * w_B`` of the level set for P4'; ``lam`` is the point whose
    right-hand limit attains the supremum for P8; ``s`` for P2'.
    """

    base: int
    base_name: str
    subset: tuple | None = None
    level: Fraction | None = None
    lam: Fraction | None = None
    s: Fraction | None = None


@dataclass(frozen=True)
class ConstantReport:
    condition: str
    params: ConditionParams
    values: tuple
    overall: Value
    witness: Witness
    backend: str
    instance: Instance = field(repr=False, compare=False)
    detail: Mapping = field(default_factory=dict, compare=False)

    @property
    def per_base(self) -> list[tuple[BaseRef, Value]]:
        return [(self.instance.base(i), v) for i, v in enumerate(self.values)]


# -- helpers -----------------------------------------------------------------


def _totals(profile):
    return sum(mu * c for _, mu, c in profile), sum(w * mu * c for w, mu, c in profile)


def _logsumexp(terms: Sequence[float]) -> float:
    top = max(terms)
    if top == -math.inf:
        return top
    return top + math.log(math.fsum(math.exp(t - top) for t in terms))


def _log_power_mean(profile, s: float, total_mu: int) -> float:
    """log of (avg of w**s) over one profile; zero weights contribute 0 (s > 0)."""
    terms = [math.log(mu * c) + s * math.log(w) for w, mu, c in profile if w > 0]
    return _logsumexp(terms) - math.log(total_mu)


def _require_positive(instance: Instance, condition: str):
    profile_of_base, profiles, first = instance.profiles
    for k, prof in enumerate(profiles):
        if _totals(prof)[1] == 0:
            raise ZeroWeightBase(condition, instance.base_names[first[k]])


def _report_from_profiles(instance, condition, params, backend, per_profile: Callable, key=None, witness_extra=None):
    """Evaluate ``per_profile`` once per distinct profile and spread to bases.

    ``per_profile(profile)`` returns ``(value, extra)``; ``key`` maps a value
    to the quantity compared when picking the overall maximum.
    """
    profile_of_base, profiles, first = instance.profiles
    results = [per_profile(p) for p in profiles]
    pvalues = [r[0] for r in results]
    keyed = [key(r) if key else r[0] for r in results]
    best = None
    for k in range(len(profiles)):
        if best is None or keyed[k] > keyed[best] or (keyed[k] == keyed[best] and first[k] < first[best]):
            best = k
    values = tuple(pvalues[k] for k in profile_of_base)
    b = first[best]
    extra = results[best][1] or {}
    witness = Witness(b, instance.base_names[b], **(witness_extra(b, profiles[best], extra) if witness_extra else {}))
    return ConstantReport(condition, params, values, pvalues[best], witness, backend, instance,
                          detail=extra.get("detail", {}))


# -- evaluators ----------------------------------------------------------------


def eval_p1(instance: Instance, p) -> ConstantReport:
    """(avg w) * (avg w^(1-p'))^(p-1) per base."""
    params = make_params("P1", p=p)
    p = params.p
    e = 1 - p / (p - 1)  # 1 - p'
    exact = e.denominator == 1 and (p - 1).denominator == 1

    def one(profile):
        total_mu, total_w = _totals(profile)
        if any(w == 0 for w, _, _ in profile):
            return math.inf, None
        if exact:
            k, ee = int(p - 1), int(e)
            s = sum(Fraction(mu * c) * Fraction(w) ** ee for w, mu, c in profile)
            return Fraction(total_w, total_mu) * (s / total_mu) ** k, None
        ef = float(e)
        log_neg = _logsumexp([math.log(mu * c) + ef * math.log(w) for w, mu, c in profile]) - math.log(total_mu)
        return math.exp(math.log(total_w) - math.log(total_mu) + float(p - 1) * log_neg), None

    return _report_from_profiles(instance, "P1", params, EXACT if exact else FLOAT, one)


def _subset_condition(instance, condition, params, objective: Objective, strategy):
    _require_positive(instance, condition)
    profile_of_base, profiles, first = instance.profiles

    def one(profile):
        res = search_profile(profile, objective, strategy)
        return res.value, {"counts": res.counts, "detail": {"strategy": res.strategy}}

    def witness(b, profile, extra):
        return {"subset": subset_from_counts(instance, b, profile, extra["counts"])}

    backend = EXACT if objective.exact else FLOAT
    return _report_from_profiles(instance, condition, params, backend, one, witness_extra=witness)


def eval_p1_prime(instance: Instance, delta, strategy: str | None = None) -> ConstantReport:
    """sup over nonempty E of (|E|/|B|) / (w(E)/w(B))**delta."""
    params = make_params("P1'", delta=delta)
    return _subset_condition(instance, "P1'", params, Objective("p1-prime", params.delta), strategy)


def eval_p3_prime(instance: Instance, delta, strategy: str | None = None) -> ConstantReport:
    """sup over nonempty E of (w(E)/w(B)) / (|E|/|B|)**delta."""
    params = make_params("P3'", delta=delta)
    return _subset_condition(instance, "P3'", params, Objective("p3-prime", params.delta), strategy)


def eval_p4(instance: Instance, alpha, strategy: str | None = None) -> ConstantReport:
    """beta*(alpha): the largest w(E)/w(B) over E in B with |E| < alpha |B|.

    Condition P4 asks for some alpha whose beta* stays below 1.
    """
    params = make_params("P4", alpha=alpha)
    return _subset_condition(instance, "P4", params, Objective("p4-budget", params.alpha), strategy)


def eval_p2(instance: Instance) -> ConstantReport:
    params = make_params("P2")
    _require_positive(instance, "P2")

    def one(profile):
        total_mu, total_w = _totals(profile)
        if any(w == 0 for w, _, _ in profile):
            return math.inf, None
        mean_log = math.fsum(mu * c * math.log(w) for w, mu, c in profile) / total_mu
        return math.exp(math.log(total_w) - math.log(total_mu) - mean_log), None

    return _report_from_profiles(instance, "P2", params, FLOAT, one)


def eval_p2_prime(instance: Instance, s_grid) -> ConstantReport:
    """Per base the largest of C(s) = w_B / (avg w^s)^(1/s) over the grid.

    ``detail['per_s']`` maps each s to the maximum of C(s) over bases.
    """
    params = make_params("P2'", s_grid=s_grid)
    grid = params.s_grid
    _require_positive(instance, "P2'")

    def one(profile):
        total_mu, total_w = _totals(profile)
        log_avg = math.log(total_w) - math.log(total_mu)
        cs = [math.exp(log_avg - _log_power_mean(profile, float(s), total_mu) / float(s)) for s in grid]
        j = max(range(len(cs)), key=lambda i: (cs[i], -i))
        return cs[j], {"s": grid[j], "cs": cs}

    profile_of_base, profiles, _ = instance.profiles
    report = _report_from_profiles(instance, "P2'", params, FLOAT, one,
                                   witness_extra=lambda b, prof, extra: {"s": extra["s"]})
    per_profile = [one(p)[1]["cs"] for p in profiles]
    per_s = {s: max(cs[j] for cs in per_profile) for j, s in enumerate(grid)}
    return ConstantReport(report.condition, params, report.values, report.overall, report.witness,
                          FLOAT, instance, detail={"per_s": per_s})


def eval_p3(instance: Instance, q) -> ConstantReport:
    """(avg w^q)^(1/q) / avg w per base.

    For integer q the q-th power of the constant is rational; it is kept in
    ``detail['power']`` and bases are compared through it exactly.
    """
    params = make_params("P3", q=q)
    q = params.q
    integral_q = q.denominator == 1
    _require_positive(instance, "P3")

    def one(profile):
        total_mu, total_w = _totals(profile)
        if integral_q:
            k = int(q)
            power = Fraction(sum(mu * c * w**k for w, mu, c in profile) * total_mu ** (k - 1), total_w**k)
            return power ** (1 / float(k)) if power < 2**1000 else math.exp(math.log(power) / k), {"power": power}
        qf = float(q)
        log_q = _log_power_mean(profile, qf, total_mu)
        return math.exp(log_q / qf - (math.log(total_w) - math.log(total_mu))), {}

    key = (lambda r: r[1]["power"]) if integral_q else None
    report = _report_from_profiles(instance, "P3", params, FLOAT, one, key=key)
    if integral_q:
        profile_of_base, profiles, _ = instance.profiles
        power = one(profiles[profile_of_base[report.witness.base]])[1]["power"]
        report = ConstantReport(report.condition, params, report.values, report.overall, report.witness,
                                FLOAT, instance, detail={"power": power})
    return report


def eval_p4_prime(instance: Instance, alpha) -> ConstantReport:
    """beta*(alpha) = max over B of |{x in B : w(x) <= alpha w_B}| / |B|, exact."""
    params = make_params("P4'", alpha=alpha)
    a = params.alpha
    _, _, _, w_unit = instance.scaled

    def one(profile):
        total_mu, total_w = _totals(profile)
        below = sum(mu * c for w, mu, c in profile if w * total_mu * a.denominator <= a.numerator * total_w)
        return Fraction(below, total_mu), None

    def witness(b, profile, extra):
        total_mu, total_w = _totals(profile)
        return {"level": a * Fraction(total_w, total_mu) * w_unit}

    return _report_from_profiles(instance, "P4'", params, EXACT, one, witness_extra=witness)


def _profile_median(profile) -> Fraction:
    total_mu = sum(mu * c for _, mu, c in profile)
    above = total_mu
    for t in [0] + sorted({w for w, _, _ in profile}):
        above = sum(mu * c for w, mu, c in profile if w > t)
        if 2 * above < total_mu:
            return Fraction(t)
    raise AssertionError("unreachable")


def eval_p5(instance: Instance) -> ConstantReport:
    """w_B / m(w;B) per base; inf when the median vanishes below a positive average."""
    params = make_params("P5")

    def one(profile):
        total_mu, total_w = _totals(profile)
        if total_w == 0:
            return Fraction(0), None
        m = _profile_median(profile)
        if m == 0:
            return math.inf, None
        return Fraction(total_w, total_mu) / m, None

    return _report_from_profiles(instance, "P5", params, EXACT, one)


def eval_p6(instance: Instance) -> ConstantReport:
    """(1/w(B)) * sum over B of w log+(w/w_B) |x|."""
    params = make_params("P6")
    _require_positive(instance, "P6")

    def one(profile):
        total_mu, total_w = _totals(profile)
        log_avg = math.log(total_w) - math.log(total_mu)
        s = math.fsum(w * mu * c * (math.log(w) - log_avg) for w, mu, c in profile if w * total_mu > total_w)
        return s / total_w, None

    return _report_from_profiles(instance, "P6", params, FLOAT, one)


def _p8_profile(profile, beta: Fraction):
    """Supremum over lambda > w_B of N(lambda) / (lambda D(beta lambda)).

    N and D are left-continuous step functions with jumps at the weight
    values v and v/beta; between jumps the ratio decreases in lambda, so the
    supremum is a right-hand limit at w_B or at a jump above it.
    """
    total_mu, total_w = _totals(profile)
    avg = Fraction(total_w, total_mu)
    values = sorted({Fraction(w) for w, _, _ in profile})
    points = sorted({avg} | {v for v in values if v > avg} | {v / beta for v in values if v / beta > avg})
    best, best_lam = Fraction(0), None
    for lam in points:
        n_plus = sum(w * mu * c for w, mu, c in profile if w > lam)
        if n_plus == 0:
            break
        d_plus = sum(mu * c for w, mu, c in profile if w > beta * lam)
        if d_plus == 0:
            return math.inf, lam
        v = n_plus / (lam * d_plus)
        if v > best:
            best, best_lam = v, lam
    return best, best_lam


def eval_p8(instance: Instance, beta) -> ConstantReport:
    params = make_params("P8", beta=beta)
    _require_positive(instance, "P8")
    _, _, _, w_unit = instance.scaled

    def one(profile):
        v, lam = _p8_profile(profile, params.beta)
        return v, {"lam": lam}

    def witness(b, profile, extra):
        lam = extra["lam"]
        return {"lam": None if lam is None else lam * w_unit}

    return _report_from_profiles(instance, "P8", params, EXACT, one, witness_extra=witness)


def p7_values(instance: Instance) -> list[Fraction]:
    """(1/w(B)) * sum over x in B of M(w chi_B)(x) |x|, for every B.

    For a fixed B only bases meeting B matter.  Let h be the atom of B lying
    in the most bases.  Every base meeting B in at least two atoms, or in one
    atom other than h, is reached from B minus h through the incidence lists.
    A base meeting B only in h averages to w(h)|h|/|B'|, and the smallest
    such |B'| is dominated by the smallest base containing h at all, which
    averages to at least that much.
    """
    mu, w, _, _ = instance.scaled
    members, inc = instance.members, instance.incidence
    wmu = [a * b for a, b in zip(w, mu)]
    bm = [sum(mu[i] for i in m) for m in members]
    bw = [sum(wmu[i] for i in m) for m in members]
    for b, total in enumerate(bw):
        if total == 0:
            raise ZeroWeightBase("P7", instance.base_names[b])
    min_meas: dict[int, int] = {}
    inc_sets: dict[int, set] = {}

    out = []
    made: dict[tuple[int, int], Fraction] = {}
    for b, atoms in enumerate(members):
        h = atoms[0]
        for y in atoms:
            if len(inc[y]) > len(inc[h]):
                h = y
        acc: dict[int, int] = {}
        get = acc.get
        for y in atoms:
            if y != h:
                v = wmu[y]
                for bp in inc[y]:
                    acc[bp] = get(bp, 0) + v
        hv = wmu[h]
        if len(inc[h]) > 16:
            hs = inc_sets.get(h)
            if hs is None:
                hs = inc_sets[h] = set(inc[h])
        else:
            hs = inc[h]
        with_h = [bp for bp in acc if bp in hs]
        for bp in with_h:
            acc[bp] += hv
        # sum of M(x)|x| as num/den, kept unreduced until the end
        by_den: dict[int, int] = {}
        for y in atoms:
            if y != h:
                best_n, best_d = 0, 1
                for bp in inc[y]:
                    n_ = acc[bp]
                    d_ = bm[bp]
                    if n_ * best_d > best_n * d_:
                        best_n, best_d = n_, d_
                by_den[best_d] = by_den.get(best_d, 0) + best_n * mu[y]
        mm = min_meas.get(h)
        if mm is None:
            mm = min_meas[h] = min(bm[bp] for bp in inc[h])
        best_n, best_d = hv, mm
        for bp in with_h:
            n_ = acc[bp]
            d_ = bm[bp]
            if n_ * best_d > best_n * d_:
                best_n, best_d = n_, d_
        by_den[best_d] = by_den.get(best_d, 0) + best_n * mu[h]
        num, den = 0, 1
        for d_, n_ in by_den.items():
            num, den = num * d_ + n_ * den, den * d_
        key = (num, den * bw[b])
        value = made.get(key)
        if value is None:
            value = made[key] = Fraction(*key)
        out.append(value)
    return out


def eval_p7(instance: Instance) -> ConstantReport:
    params = make_params("P7")
    values = p7_values(instance)
    best = 0
    for b, v in enumerate(values):
        if v > values[best]:
            best = b
    return ConstantReport("P7", params, tuple(values), values[best], Witness(best, instance.base_names[best]),
                          EXACT, instance)


EVALUATORS = {
    "P1": eval_p1,
    "P1'": eval_p1_prime,
    "P2": eval_p2,
    "P2'": eval_p2_prime,
    "P3": eval_p3,
    "P3'": eval_p3_prime,
    "P4": eval_p4,
    "P4'": eval_p4_prime,
    "P5": eval_p5,
    "P6": eval_p6,
    "P7": eval_p7,
    "P8": eval_p8,
}

SUBSET_CONDITIONS = ("P1'", "P3'", "P4")


def evaluate(instance: Instance, condition: str, params: ConditionParams | None = None,
             strategy: str | None = None) -> ConstantReport:
    """Dispatch to the evaluator for ``condition``."""
    condition = normalize_condition(condition)
    if params is None:
        params = make_params(condition, defaults=True)
    kwargs = dict(params.items())
    if condition in SUBSET_CONDITIONS:
        kwargs["strategy"] = strategy
    elif strategy is not None:
        raise ParameterError(f"{condition} takes no subset strategy")
    return EVALUATORS[condition](instance, **kwargs)


# -- witness re-evaluation -------------------------------------------------------


def witness_value(report: ConstantReport) -> Value:
    """Recompute the reported constant from the witness alone.

    Uses the instance's original Fractions and the defining formula at the
    witness base (and subset, level, lambda or s) rather than any of the
    search machinery.
    """
    inst = report.instance
    wit = report.witness
    m = inst.members[wit.base]
    mus = [inst.measures[i] for i in m]
    ws = [inst.weights[i] for i in m]
    size = sum(mus)
    total = sum(a * b for a, b in zip(ws, mus))
    pr = report.params
    cond = report.condition
    if cond in ("P1'", "P3'", "P4"):
        chosen = set(inst.resolve(wit.subset))
        e_mu = sum((inst.measures[i] for i in chosen), Fraction(0))
        e_w = sum((inst.weights[i] * inst.measures[i] for i in chosen), Fraction(0))
        if cond == "P4":
            assert e_mu < pr.alpha * size
            return e_w / total
        rel_mu, rel_w = e_mu / size, e_w / total
        if cond == "P1'":
            if rel_w == 0:
                return math.inf
            if pr.delta.denominator == 1:
                return rel_mu / rel_w ** int(pr.delta)
            return float(rel_mu) / float(rel_w) ** float(pr.delta)
        if pr.delta.denominator == 1:
            return rel_w / rel_mu ** int(pr.delta)
        return float(rel_w) / float(rel_mu) ** float(pr.delta)
    if cond == "P4'":
        assert wit.level == pr.alpha * total / size
        return sum((a for a, b in zip(mus, ws) if b <= wit.level), Fraction(0)) / size
    if cond == "P8":
        lam = wit.lam
        if lam is None:
            return Fraction(0)
        n_plus = sum((a * b for a, b in zip(mus, ws) if b > lam), Fraction(0))
        d_plus = sum((a for a, b in zip(mus, ws) if b > pr.beta * lam), Fraction(0))
        return math.inf if d_plus == 0 else n_plus / (lam * d_plus)
    if cond == "P2'":
        s = float(wit.s)
        mean = sum(float(a) * float(b) ** s for a, b in zip(mus, ws)) / float(size)
        return float(total / size) / mean ** (1 / s)
    return report.values[wit.base]
