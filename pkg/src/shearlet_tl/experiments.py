"""Audits that turn the almost-orthogonality, boundedness and embedding
statements into measured pass/fail reports.

Every audit returns an :class:`AuditReport` whose pass flag is recomputed
from its case table and declared checks alone, so a serialized report can
be re-verified without rerunning anything.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .frame import FrequencyGrid, window_values
from .generators import dyadic_band_hat
from .lattice import Band, ConeTag, ShearletIndex, System, coarse_band, enumerate_indices, min_stretch, stretch
from .spaces import (
    DYADIC,
    SpaceParams,
    SStarParams,
    derivative_peetre_ratio,
    fefferman_stein_ratio,
    function_norm,
    isotropic_peetre_hl_ratio,
    peetre_hl_ratio,
    random_radial_signal,
    s_star,
    s_star_pointwise_ratio,
    sequence_norm,
)
from .transform import (
    CoefficientMap,
    PeriodicSignal,
    analyze,
    random_signal,
    resolved_limit,
    synthesize,
    synthesize_band_spectrum,
)

CP = System.CONE_PROJECTED
H = ConeTag.HORIZONTAL
V = ConeTag.VERTICAL

CSV_COLUMNS = ("case_id", "j", "l", "measured", "bound", "ratio")


# ---------------------------------------------------------------------------
# report plumbing


@dataclass(frozen=True)
class Check:
    """A declared test on one column of the case table.

    ``kind`` is one of ``min_ge``, ``max_le``, ``max_lt``, ``abs_le``,
    ``spread_lt``, ``spread_le``, ``growth_le`` and ``finite``.  ``group``
    restricts the check to cases with that group label.
    """

    name: str
    kind: str
    threshold: float
    field: str = "ratio"
    group: str | None = None

    def values(self, cases: Sequence[dict]) -> list[float]:
        return [float(c[self.field]) for c in cases if self.group is None or c.get("group") == self.group]

    def evaluate(self, cases: Sequence[dict]) -> bool:
        v = self.values(cases)
        if not v:
            return False
        if not all(math.isfinite(x) for x in v):
            return False
        t = self.threshold
        if self.kind == "finite":
            return True
        if self.kind == "min_ge":
            return min(v) >= t
        if self.kind == "max_le":
            return max(v) <= t
        if self.kind == "max_lt":
            return max(v) < t
        if self.kind == "abs_le":
            return max(abs(x) for x in v) <= t
        if self.kind in ("spread_lt", "spread_le"):
            lo, hi = min(v), max(v)
            if lo <= 0:
                return False
            return hi / lo < t if self.kind == "spread_lt" else hi / lo <= t
        if self.kind == "growth_le":
            return v[0] > 0 and max(v) / v[0] <= t
        raise ValueError(f"unknown check kind {self.kind!r}")

    def to_dict(self, cases: Sequence[dict]) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "threshold": self.threshold,
            "field": self.field,
            "group": self.group,
            "passed": self.evaluate(cases),
        }


@dataclass
class AuditReport:
    """Measured constants, a per-case table and the checks applied to it."""

    name: str
    statement: str
    params: dict
    measured: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    cases: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.evaluate(self.cases) for c in self.checks)

    def add_case(self, case_id: str, j, l, measured: float, bound: float, group: str | None = None, **extra) -> dict:
        ratio = measured / bound if bound not in (0, None) and math.isfinite(bound) else float("nan")
        row = {"case_id": case_id, "j": j, "l": l, "measured": float(measured), "bound": float(bound), "ratio": float(ratio)}
        if group is not None:
            row["group"] = group
        row.update(extra)
        self.cases.append(row)
        return row

    def failed_checks(self) -> list[str]:
        return [c.name for c in self.checks if not c.evaluate(self.cases)]

    def to_dict(self) -> dict:
        return {
            "audit": self.name,
            "statement": self.statement,
            "params": self.params,
            "measured": self.measured,
            "checks": [c.to_dict(self.cases) for c in self.checks],
            "passed": self.passed,
            "cases": self.cases,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AuditReport":
        checks = [Check(c["name"], c["kind"], c["threshold"], c.get("field", "ratio"), c.get("group")) for c in d["checks"]]
        return cls(d["audit"], d["statement"], d["params"], d.get("measured", {}), checks, list(d.get("cases", [])))


def _fmt_float(x: float) -> str:
    return repr(float(x)) if math.isfinite(x) else "nan"


def _plain(obj):
    # JSON-ready copy: numpy scalars unwrapped, NaN/inf as None, complex as [re, im]
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return None if obj is None else bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [_plain(obj.real), _plain(obj.imag)]
    if isinstance(obj, str):
        return obj
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj, indent: int = 2) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats, NaN as null."""
    return json.dumps(_plain(obj), sort_keys=True, indent=indent, allow_nan=False)


def report_json(report: AuditReport) -> str:
    return to_json(report.to_dict()) + "\n"


def report_csv(report: AuditReport) -> str:
    """One row per case with the fixed columns; floats with 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in report.cases:
        row = []
        for k in CSV_COLUMNS:
            v = c.get(k)
            if isinstance(v, float):
                row.append(_fmt_float(v))
            else:
                row.append("" if v is None else v)
        w.writerow(row)
    return buf.getvalue()


def _fit_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    return float(np.polyfit(np.asarray(xs, float), np.asarray(ys, float), 1)[0])


# ---------------------------------------------------------------------------
# nested ellipses


def audit_lemma71(j_max: int = 6) -> AuditReport:
    """Exact smallest stretch of B^l A^j against the sharp constant 2^(j - 1/2).

    Also records the weaker constant 2^(j-1), which is what the
    almost-orthogonality arguments actually use.
    """
    if j_max < 0:
        raise ValueError("j_max must be nonnegative")
    rep = AuditReport(
        "lemma71",
        "|B^l A^j x| > 2^(j-1/2) |x| for all j >= 0, |l| <= 2^j",
        {"j_max": j_max},
    )
    best = None
    weak = math.inf
    for j in range(j_max + 1):
        for l in range(-(2**j), 2**j + 1):
            s = min_stretch(j, l)
            bound = 2.0 ** (j - 0.5)
            extremal = abs(l) == 2**j
            row = rep.add_case(
                f"j{j}_l{l}", j, l, s, bound,
                group="extremal" if extremal else "interior",
                weak_ratio=s / 2.0 ** (j - 1),
            )
            row["deviation"] = row["ratio"] - 1.0
            weak = min(weak, row["weak_ratio"])
            if best is None or row["ratio"] < best[2]:
                best = (j, l, row["ratio"])
    diag = stretch(1, 2, (1 / math.sqrt(2), -1 / math.sqrt(2))) / 2.0**0.5
    rep.measured = {
        "min_ratio": best[2],
        "argmin_j": best[0],
        "argmin_l": best[1],
        "min_weak_ratio": weak,
        "diagonal_ratio_j1_l2": diag,
    }
    rep.checks = [
        Check("sharp lower bound", "min_ge", 1 - 1e-12),
        Check("equality at l = +-2^j", "abs_le", 1e-10, field="deviation", group="extremal"),
    ]
    return rep


# ---------------------------------------------------------------------------
# almost orthogonality


def _sample_domain(scale: int, domain: int) -> int:
    return max(1, domain // 2**scale)


def pair_convolution(b1: Band, b2: Band, domain: int = 32):
    """(|g * h| samples, offsets |x|) for the unprojected windows of two bands.

    The spectral product is sampled with spacing 1/L on a period-L cell,
    L = max(1, domain / 2^i), so the spatial decay is resolved at every scale
    with the same number of samples per unit of 2^i |x|.
    """
    i = b2.j
    L = _sample_domain(i, domain)
    n = L * 4 ** max(b1.j, b2.j)
    f = np.fft.fftfreq(n, L / n)
    x1 = np.broadcast_to(f[:, None], (n, n))
    x2 = np.broadcast_to(f[None, :], (n, n))
    prod = window_values(b1, x1, x2, project=False) * window_values(b2, x1, x2, project=False)
    conv = np.fft.ifft2(prod) * n * n / L**2
    y = ((np.arange(n) + n // 2) % n - n // 2) / n * L
    r = np.hypot(y[:, None], y[None, :])
    return np.abs(conv), r


def orthogonality_constant(b1: Band, b2: Band, decay: float, domain: int = 32) -> float:
    """sup_x |Q|^(1/2) |g_(A^-j B^-l) * h_Q(x)| (1 + 2^i |x - x_Q|)^N with x_Q = 0."""
    conv, r = pair_convolution(b1, b2, domain)
    i = b2.j
    return float(np.max(8.0 ** (-i) * conv * (1.0 + 2.0**i * r) ** decay))


def orthogonality_pairs(j: int) -> list[tuple[Band, Band]]:
    """Overlapping pairs (j, 0) against scales j-1, j, j+1."""
    a = Band(CP, H, j, 0)
    out = [(a, Band(CP, H, j, 0)), (a, Band(CP, H, j, 1)), (a, Band(CP, H, j + 1, 1))]
    if j >= 1:
        out.append((a, Band(CP, H, j - 1, 0)))
    return out


def audit_almost_orthogonality(
    j_list: Sequence[int] = (1, 2, 3, 4),
    N_list: Sequence[float] = (3, 5),
    domain: int = 32,
    spread: float = 4.0,
) -> AuditReport:
    """Measured constants of the anisotropic almost-orthogonality estimate.

    For each scale the constant is the maximum over the overlapping pairs
    returned by :func:`orthogonality_pairs`; it must vary by less than
    ``spread`` across scales for every decay exponent.
    """
    rep = AuditReport(
        "orth",
        "|g_(A^-j B^-l) * h_Q(x)| <= C_N |Q|^(-1/2) (1 + 2^i |x - x_Q|)^(-N), |i - j| <= 1",
        {"j_list": list(j_list), "N_list": list(N_list), "domain": domain},
    )
    pair_table = {}
    for j in j_list:
        for b1, b2 in orthogonality_pairs(j):
            conv, r = pair_convolution(b1, b2, domain)
            i = b2.j
            for N in N_list:
                c = float(np.max(8.0 ** (-i) * conv * (1.0 + 2.0**i * r) ** N))
                pair_table.setdefault((N, j), []).append((b2.j, b2.shear, c))
        # spectrally disjoint pair: convolution vanishes identically
        far = Band(CP, H, j, min(3, 2**j))
        conv, _ = pair_convolution(Band(CP, H, j, 0), far, domain)
        rep.add_case(f"disjoint_j{j}", j, far.shear, float(conv.max()), 1e-14, group="disjoint")
    for N in N_list:
        for j in j_list:
            rows = pair_table[(N, j)]
            c = max(v for _, _, v in rows)
            rep.add_case(
                f"N{N}_j{j}", j, 0, c, float("nan"), group=f"N={N}",
                pairs=[{"i": i, "m": m, "constant": v} for i, m, v in rows],
            )
    rep.measured = {
        f"spread_N{N}": _spread([c["measured"] for c in rep.cases if c.get("group") == f"N={N}"]) for N in N_list
    }
    rep.checks = [Check(f"constants stable for N={N}", "spread_lt", spread, field="measured", group=f"N={N}") for N in N_list]
    rep.checks.append(Check("disjoint spectra", "max_le", 1e-14, field="measured", group="disjoint"))
    return rep


def _spread(v: Sequence[float]) -> float:
    v = [x for x in v if math.isfinite(x)]
    return max(v) / min(v) if v and min(v) > 0 else float("inf")


# ---------------------------------------------------------------------------
# shearlet against dyadic wavelet


def shearlet_wavelet_convolution(j: int, l: int, domain: int = 16, oversample: int = 2):
    """Samples of int |psi(B^l A^j (x - y))| |phi(2^(2j) y)| dy and their offsets |x|.

    Both factors are sampled on a period-L cell, L = domain / 2^j, from
    their Fourier transforms; the absolute values are convolved with the FFT.
    """
    L = domain / 2**j
    n = int(round(oversample * 4 * L * 4**j))
    f = np.fft.fftfreq(n, L / n)
    x1 = np.broadcast_to(f[:, None], (n, n))
    x2 = np.broadcast_to(f[None, :], (n, n))
    psi_hat = 8.0 ** (-j) * window_values(Band(CP, H, j, l), x1, x2, project=False)
    phi_hat = 16.0 ** (-j) * dyadic_band_hat(x1 / 4**j, x2 / 4**j)
    psi = np.abs(np.fft.ifft2(psi_hat)) * n * n / L**2
    phi = np.abs(np.fft.ifft2(phi_hat)) * n * n / L**2
    conv = np.real(np.fft.ifft2(np.fft.fft2(psi) * np.fft.fft2(phi))) * (L / n) ** 2
    y = ((np.arange(n) + n // 2) % n - n // 2) / n * L
    r = np.hypot(y[:, None], y[None, :])
    return conv, r


def audit_shearlet_wavelet_decay(
    j_list: Sequence[int] = (1, 2, 3),
    N_list: Sequence[float] = (3, 5),
    domain: int = 16,
    slope_tol: float = 0.3,
    growth: float = 4.0,
) -> AuditReport:
    """Height and envelope of a shearlet convolved with a dyadic wavelet at scale 2j.

    The height at x = 0 is fitted against j (claimed rate -3); the envelope
    constants sup 2^(3j) value (1 + 2^j |x|)^N must not grow by more than
    ``growth`` over the scales, for l = 0 and l = 2^j alike.
    """
    rep = AuditReport(
        "decay",
        "int |psi(B^l A^j (x-y))| |phi(2^(2j) y)| dy <= C 2^(-3j) (1 + 2^j |x|)^(-N)",
        {"j_list": list(j_list), "N_list": list(N_list), "domain": domain},
    )
    heights = []
    env_rows = {N: [] for N in N_list}
    for j in j_list:
        for l in (0, 2**j):
            conv, r = shearlet_wavelet_convolution(j, l, domain)
            h = float(conv[0, 0])
            rep.add_case(f"height_j{j}_l{l}", j, l, h, 2.0 ** (-3 * j), group="height")
            if l == 0:
                heights.append(h)
            for N in N_list:
                env_rows[N].append((j, l, float(np.max(conv * 2.0 ** (3 * j) * (1 + 2.0**j * r) ** N))))
    for N in N_list:
        for j, l, c in env_rows[N]:
            rep.add_case(f"envelope_N{N}_j{j}_l{l}", j, l, c, float("nan"), group=f"envelope N={N}")
    slope = _fit_slope(j_list, np.log2(heights))
    row = rep.add_case("height_slope", None, 0, slope, -3.0, group="slope")
    row["deviation"] = slope + 3.0
    rep.measured = {"height_slope": slope, "heights_l0": heights}
    rep.checks = [Check("height slope", "abs_le", slope_tol, field="deviation", group="slope")]
    rep.checks += [
        Check(f"envelope bounded for N={N}", "growth_le", growth, field="measured", group=f"envelope N={N}") for N in N_list
    ]
    return rep


# ---------------------------------------------------------------------------
# operator boundedness


def random_sparse_map(system: System | str, N: int, j_max: int, rng: np.random.Generator, n_terms: int = 6) -> CoefficientMap:
    """A few random cubes (coarse band included) with complex Gaussian values."""
    system = System(system)
    bands = enumerate_indices(system, j_max, include_coarse=True)
    c = CoefficientMap(system, N, j_max)
    for _ in range(n_terms):
        b = bands[int(rng.integers(len(bands)))]
        k = (int(rng.integers(b.period)), int(rng.integers(b.period)))
        c.set_cube(ShearletIndex(b, k), complex(rng.standard_normal(), rng.standard_normal()))
    return c


def audit_operator_bounds(
    grids: Sequence[int] = (64, 128),
    params_list: Sequence[tuple[float, float, float]] = ((0.3, 2.0, 2.0), (0.1, 1.5, 4.0)),
    j_max: int = 3,
    n_samples: int = 10,
    seed: int = 42,
    drift: float = 2.0,
    system: System | str = CP,
) -> AuditReport:
    """Analysis and synthesis norm ratios and their drift under grid refinement.

    Signals are band-limited to the region the truncated family resolves, so
    the same function class is sampled on every grid; sparse sequences are
    drawn once per seed and reused on every grid.
    """
    system = System(system)
    rep = AuditReport(
        "bounds",
        "analysis F -> f and synthesis f -> F are bounded",
        {"grids": list(grids), "params": [list(p) for p in params_list], "j_max": j_max,
         "n_samples": n_samples, "seed": seed, "system": system.value},
    )
    maxima = {}
    for a, p, q in params_list:
        sp = SpaceParams(a, p, q)
        for N in grids:
            grid = FrequencyGrid(N)
            rng = np.random.default_rng([seed, N])
            srng = np.random.default_rng(seed)
            an, sy = [], []
            for i in range(n_samples):
                f = random_signal(grid, rng, resolved_limit(j_max))
                fn = function_norm(f, sp, system, j_max)
                if fn > 0:
                    an.append(sequence_norm(analyze(f, system, j_max), sp) / fn)
                s = random_sparse_map(system, N, j_max, srng)
                sn = sequence_norm(s, sp)
                if sn > 0:
                    sy.append(function_norm(synthesize(s), sp, system, j_max) / sn)
            for kind, vals in (("analysis", an), ("synthesis", sy)):
                for i, v in enumerate(vals):
                    rep.add_case(f"{kind}_a{a}_p{p}_q{q}_N{N}_{i}", None, None, v, float("nan"), group=kind)
                maxima[(a, p, q, kind, N)] = max(vals)
    for a, p, q in params_list:
        for kind in ("analysis", "synthesis"):
            v = [maxima[(a, p, q, kind, N)] for N in grids]
            d = max(v) / min(v)
            rep.add_case(f"drift_{kind}_a{a}_p{p}_q{q}", None, None, d, drift, group="drift", maxima=v)
    rep.measured = {
        f"max_{kind}_a{a}_p{p}_q{q}_N{N}": v for (a, p, q, kind, N), v in sorted(maxima.items(), key=str)
    }
    rep.checks = [
        Check("ratios finite", "finite", 0.0, field="measured"),
        Check("refinement drift", "max_lt", 1.0, group="drift"),
    ]
    return rep


# ---------------------------------------------------------------------------
# embeddings and fading atoms


def single_atom(band: Band, N: int, value: complex) -> PeriodicSignal:
    """value * psi_(band, k=0) on the N-grid (one frame element, no redundancy weight)."""
    p = band.period
    c = np.zeros((p, p), dtype=complex)
    c[0, 0] = value
    return PeriodicSignal.from_spectrum(synthesize_band_spectrum(c, band, N, weight=1.0))


def atom_sequence(band: Band, N: int, value: complex) -> CoefficientMap:
    """Coefficient map holding the single cube of :func:`single_atom`."""
    c = CoefficientMap(band.system, N, band.j)
    c.set_cube(ShearletIndex(band, (0, 0)), value)
    return c


def dyadic_grid(nu: int) -> int:
    """Smallest grid (at least 64) holding the dyadic band nu."""
    return max(64, 2 ** (nu + 2))


def shear_grid(j: int) -> int:
    """Smallest grid (at least 64) holding every shear band of scale j."""
    return max(64, 2 * 4**j)


EMBED_DYADIC_TO_AB = "dyadic-to-ab"
EMBED_AB_TO_DYADIC = "ab-to-dyadic"


def embedding_hypothesis(direction: str, alpha1: float, alpha2: float, p: float, q: float, lam: float | None) -> str | None:
    """None when the embedding hypothesis holds, otherwise the reason it fails."""
    if direction == EMBED_DYADIC_TO_AB:
        need = 2 * max(1.0, 1.0 / q, 1.0 / p)
        if lam is None or not lam > need:
            return f"lambda must exceed {need}"
        if not 3 * alpha2 + 1.0 / q + lam < alpha1:
            return "requires 3 alpha2 + 1/q + lambda < alpha1"
        return None
    if direction == EMBED_AB_TO_DYADIC:
        return None if alpha1 + 1 <= 3 * alpha2 else "requires alpha1 + 1 <= 3 alpha2"
    return f"unknown direction {direction!r}"


def audit_embeddings(
    direction: str = EMBED_AB_TO_DYADIC,
    alpha1: float = 0.5,
    alpha2: float = 0.5,
    p: float = 2.0,
    q: float = 2.0,
    lam: float | None = None,
    j_list: Sequence[int] = (1, 2, 3),
    n_samples: int = 3,
    atoms: int = 3,
    seed: int = 42,
    growth: float = 2.0,
) -> AuditReport:
    """Norm ratio target / source on random atom ensembles at each scale.

    ``dyadic-to-ab`` draws dyadic atoms at scale 2j and measures
    ||f||_(AB, alpha2) / ||f||_(dyadic, alpha1); ``ab-to-dyadic`` draws shear
    atoms at scale j and measures ||f||_(dyadic, alpha1) / ||f||_(AB, alpha2).
    The largest ratio per scale must not grow by more than ``growth``.
    """
    why = embedding_hypothesis(direction, alpha1, alpha2, p, q, lam)
    if why is not None:
        raise ValueError(why)
    dy = SpaceParams(alpha1, p, q, DYADIC)
    ab = SpaceParams(alpha2, p, q)
    rep = AuditReport(
        "embed",
        "F(dyadic, alpha1) embeds in F(AB, alpha2) if 3 alpha2 + 1/q + lambda < alpha1"
        if direction == EMBED_DYADIC_TO_AB
        else "F(AB, alpha2) embeds in F(dyadic, alpha1) if alpha1 + 1 <= 3 alpha2",
        {"direction": direction, "alpha1": alpha1, "alpha2": alpha2, "p": p, "q": q, "lambda": lam,
         "j_list": list(j_list), "n_samples": n_samples, "atoms": atoms, "seed": seed},
    )
    rng = np.random.default_rng(seed)

    def ratio(f: PeriodicSignal) -> float:
        if direction == EMBED_DYADIC_TO_AB:
            return function_norm(f, ab, CP) / function_norm(f, dy)
        return function_norm(f, dy) / function_norm(f, ab, CP)

    # coarse atom
    cb = coarse_band(System.DYADIC if direction == EMBED_DYADIC_TO_AB else CP)
    rep.add_case("coarse", 0, 0, ratio(single_atom(cb, 64, 1.0)), float("nan"), group="coarse")
    for j in j_list:
        best = 0.0
        for s in range(n_samples):
            if direction == EMBED_DYADIC_TO_AB:
                band_list = [Band(System.DYADIC, ConeTag.ISOTROPIC, 2 * j)]
                N = dyadic_grid(2 * j)
            else:
                band_list = enumerate_indices(CP, j)
                band_list = [b for b in band_list if b.j == j]
                N = shear_grid(j)
            spec = np.zeros((N, N), dtype=complex)
            for _ in range(atoms):
                b = band_list[int(rng.integers(len(band_list)))]
                c = np.zeros((b.period, b.period), dtype=complex)
                c[int(rng.integers(b.period)), int(rng.integers(b.period))] = complex(rng.standard_normal(), rng.standard_normal())
                spec += synthesize_band_spectrum(c, b, N, weight=1.0)
            v = ratio(PeriodicSignal.from_spectrum(spec))
            best = max(best, v)
            rep.add_case(f"j{j}_sample{s}", j, None, v, float("nan"), group="ensemble")
        rep.add_case(f"j{j}_max", j, None, best, float("nan"), group="scale_max")
    rep.measured = {"scale_max": [c["measured"] for c in rep.cases if c.get("group") == "scale_max"]}
    rep.checks = [
        Check("ratios finite", "finite", 0.0, field="measured"),
        Check("bounded across scales", "growth_le", growth, field="measured", group="scale_max"),
    ]
    return rep


FADE_DYADIC = "dyadic-fades"
FADE_AB = "ab-fades"


def fading_hypothesis(direction: str, a1: float, a2: float, p1: float, p2: float, q2: float) -> str | None:
    if direction == FADE_DYADIC:
        return None if 3 * (a2 - 1 / p2) > 2 * a1 - 1 / p1 + 1 else "requires 3(alpha2 - 1/p2) > 2 alpha1 - 1/p1 + 1"
    if direction == FADE_AB:
        return None if 2 * a1 - 4 / p1 > 3 * a2 + 1 / q2 - 1 / p2 else "requires 2 alpha1 - 4/p1 > 3 alpha2 + 1/q2 - 1/p2"
    return f"unknown direction {direction!r}"


def fading_exponent(direction: str, a1: float, a2: float, p1: float, p2: float, q2: float) -> float:
    """Claimed log2 decay rate of the target norm per unit of j."""
    if direction == FADE_DYADIC:
        return 2 * a1 - 3 * (a2 - 1 / p2) + 1 - 1 / p1
    return 3 * a2 - 4 * (a1 / 2 - 1 / p1) + 1 / q2 - 1 / p2


def audit_fading(
    direction: str = FADE_DYADIC,
    alpha1: float = 0.0,
    alpha2: float = 1.0,
    p1: float = 2.0,
    p2: float = 2.0,
    q1: float = 2.0,
    q2: float = 2.0,
    j_list: Sequence[int] = (1, 2, 3, 4),
    slope_tol: float = 0.3,
    source_tol: float = 0.2,
) -> AuditReport:
    """Normalized single atoms whose source norm is 1 while the target norm fades.

    ``dyadic-fades``: f = s psi_(j,0,0), |s| = |P_j|^(alpha2 - 1/p2 + 1/2), source
    f(AB, alpha2, p2, q2), target F(dyadic, alpha1, p1, q1).
    ``ab-fades``: f = s phi_(nu,0) with nu = 2j, |s| = |Q_nu|^(alpha1/2 - 1/p1 + 1/2),
    source f(dyadic, alpha1, p1, q1), target F(AB, alpha2, p2, q2).
    The source norm is the sequence norm of the single coefficient; the
    function-space source norm is recorded alongside.
    """
    why = fading_hypothesis(direction, alpha1, alpha2, p1, p2, q2)
    if why is not None:
        raise ValueError(why)
    rate = fading_exponent(direction, alpha1, alpha2, p1, p2, q2)
    ab_src = SpaceParams(alpha2, p2, q2)
    dy_tgt = SpaceParams(alpha1, p1, q1, DYADIC)
    dy_src = SpaceParams(alpha1, p1, q1, DYADIC)
    ab_tgt = SpaceParams(alpha2, p2, q2)
    rep = AuditReport(
        "fading",
        "single normalized atoms with source norm 1 and target norm decaying like 2^(rate j)",
        {"direction": direction, "alpha1": alpha1, "alpha2": alpha2, "p1": p1, "p2": p2, "q1": q1, "q2": q2,
         "j_list": list(j_list), "claimed_rate": rate},
    )
    logs = []
    for j in j_list:
        if direction == FADE_DYADIC:
            band = Band(CP, H, j, 0)
            N = shear_grid(j)
            s = float(band.cube_measure) ** (alpha2 - 1 / p2 + 0.5)
            f = single_atom(band, N, s)
            src_seq = sequence_norm(atom_sequence(band, N, s), ab_src)
            src_fun = function_norm(f, ab_src, CP)
            tgt = function_norm(f, dy_tgt)
        else:
            nu = 2 * j
            band = Band(System.DYADIC, ConeTag.ISOTROPIC, nu)
            N = dyadic_grid(nu)
            s = float(band.cube_measure) ** (alpha1 / 2 - 1 / p1 + 0.5)
            f = single_atom(band, N, s)
            src_seq = sequence_norm(atom_sequence(band, N, s), dy_src)
            src_fun = function_norm(f, dy_src)
            tgt = function_norm(f, ab_tgt, CP)
        logs.append(math.log2(tgt))
        rep.add_case(f"target_j{j}", j, 0, tgt, 2.0 ** (rate * j), group="target", grid=N)
        row = rep.add_case(f"source_j{j}", j, 0, src_seq, 1.0, group="source", function_norm=src_fun)
        row["deviation"] = src_seq - 1.0
    slope = _fit_slope(j_list, logs)
    row = rep.add_case("slope", None, 0, slope, rate, group="slope")
    row["deviation"] = slope - rate
    rep.measured = {"fitted_slope": slope, "claimed_rate": rate, "log2_target": logs}
    rep.checks = [
        Check("source norms equal 1", "abs_le", source_tol, field="deviation", group="source"),
        Check("fitted slope", "abs_le", slope_tol, field="deviation", group="slope"),
    ]
    return rep


# ---------------------------------------------------------------------------
# maximal functions and s*


def audit_peetre(
    grids: Sequence[int] = (64, 128),
    seeds: Iterable[int] = range(5),
    lam: float = 2.0,
    band_limit: float = 12.0,
    spread: float = 2.0,
) -> AuditReport:
    """Peetre-type maximal inequalities on random band-limited signals.

    Measures, per seed and grid: the shear Peetre function against the
    Hardy-Littlewood bound, the isotropic Peetre function against the same
    bound, and the spectral-derivative Peetre ratio.  Each family of
    constants must be finite and vary by at most ``spread``.
    """
    seeds = list(seeds)
    bands = [Band(CP, H, 1, 0), Band(CP, V, 2, 1)]
    rep = AuditReport(
        "peetre",
        "psi**_lambda f <= C (M |psi * f|^(1/lambda))^lambda; (dg)*_lambda <= C g*_lambda",
        {"grids": list(grids), "seeds": seeds, "lambda": lam, "band_limit": band_limit},
    )
    for N in grids:
        grid = FrequencyGrid(N)
        for s in seeds:
            rng = np.random.default_rng(s)
            f = random_signal(grid, rng, band_limit)
            for b in bands:
                rep.add_case(f"shear_{b.label()}_N{N}_s{s}", b.j, b.shear, peetre_hl_ratio(f, b, lam), float("nan"),
                             group=f"shear {b.label()}")
            g = random_radial_signal(grid, np.random.default_rng(s), band_limit)
            rep.add_case(f"iso_N{N}_s{s}", None, None, isotropic_peetre_hl_ratio(g, lam), float("nan"), group="isotropic")
            rep.add_case(f"deriv_N{N}_s{s}", None, None, derivative_peetre_ratio(g, lam, band_limit), float("nan"),
                         group="derivative")
    groups = sorted({c["group"] for c in rep.cases})
    rep.measured = {g: _spread([c["measured"] for c in rep.cases if c["group"] == g]) for g in groups}
    rep.checks = [Check(f"{g} stable", "spread_le", spread, field="measured", group=g) for g in groups]
    return rep


def audit_sstar(
    grids: Sequence[int] = (64, 128),
    n_seeds: int = 10,
    r: float = 1.0,
    decay: float = 4.0,
    alpha: float = 0.3,
    p: float = 2.0,
    q: float = 2.0,
    a: float = 0.9,
    j_max: int = 3,
    seed: int = 42,
    spread: float = 2.0,
) -> AuditReport:
    """s* against s in the sequence norm, and the pointwise maximal bound on s*.

    Sequences are analysis coefficients of seeded random band-limited
    signals on each grid.
    """
    sp = SpaceParams(alpha, p, q)
    st = SStarParams(r, decay)
    if not st.equivalence_holds(p, q):
        raise ValueError("decay exponent must exceed 3 max(1, r/q, r/p)")
    if not decay > 3 * r / a:
        raise ValueError("pointwise bound needs decay > 3 r / a")
    rep = AuditReport(
        "sstar",
        "||s||_f <= ||s*||_f <= C ||s||_f and (s*)_Q <= C [M(sum |s_P|^a chi_P)]^(1/a)",
        {"grids": list(grids), "n_seeds": n_seeds, "r": r, "N": decay, "alpha": alpha, "p": p, "q": q, "a": a,
         "j_max": j_max, "seed": seed},
    )
    probe = Band(CP, H, 2, 1)
    for N in grids:
        grid = FrequencyGrid(N)
        for i in range(n_seeds):
            rng = np.random.default_rng([seed, N, i])
            s = analyze(random_signal(grid, rng, resolved_limit(j_max)), CP, j_max)
            ratio = sequence_norm(s_star(s, st), sp) / sequence_norm(s, sp)
            rep.add_case(f"norm_N{N}_{i}", None, None, ratio, 1.0, group="norm")
            pw = s_star_pointwise_ratio(s, st, probe, a)
            rep.add_case(f"pointwise_N{N}_{i}", probe.j, probe.shear, pw, float("nan"), group="pointwise")
    rep.measured = {
        "norm_spread": _spread([c["measured"] for c in rep.cases if c["group"] == "norm"]),
        "norm_max": max(c["measured"] for c in rep.cases if c["group"] == "norm"),
        "pointwise_spread": _spread([c["measured"] for c in rep.cases if c["group"] == "pointwise"]),
    }
    rep.checks = [
        Check("lower bound", "min_ge", 1 - 1e-12, field="measured", group="norm"),
        Check("equivalence constant stable", "spread_le", spread, field="measured", group="norm"),
        Check("pointwise constant stable", "spread_le", spread, field="measured", group="pointwise"),
    ]
    return rep


def audit_fs(
    grids: Sequence[int] = (64, 128),
    seeds: Iterable[int] = range(5),
    exponents: Sequence[float] = (1.5, 2.0, 4.0),
    family_size: int = 4,
    spread: float = 2.0,
) -> AuditReport:
    """Vector-valued maximal inequality on random families of band-limited moduli."""
    seeds = list(seeds)
    rep = AuditReport(
        "fs",
        "||(sum (M f_i)^q)^(1/q)||_p <= C ||(sum |f_i|^q)^(1/q)||_p",
        {"grids": list(grids), "seeds": seeds, "exponents": list(exponents), "family_size": family_size},
    )
    for N in grids:
        grid = FrequencyGrid(N)
        for s in seeds:
            rng = np.random.default_rng(s)
            fam = [np.abs(random_signal(grid, rng, 4.0 * 2**i).samples) for i in range(family_size)]
            for p in exponents:
                for q in exponents:
                    v = fefferman_stein_ratio(fam, p, q)
                    rep.add_case(f"p{p}_q{q}_N{N}_s{s}", None, None, v, 1.0, group=f"p={p} q={q}")
    groups = sorted({c["group"] for c in rep.cases})
    rep.measured = {g: _spread([c["measured"] for c in rep.cases if c["group"] == g]) for g in groups}
    rep.checks = [Check("M f >= |f|", "min_ge", 1 - 1e-12, field="measured")]
    rep.checks += [Check(f"{g} stable", "spread_le", spread, field="measured", group=g) for g in groups]
    return rep


AUDITS = {
    "lemma71": audit_lemma71,
    "orth": audit_almost_orthogonality,
    "decay": audit_shearlet_wavelet_decay,
    "bounds": audit_operator_bounds,
    "embed": audit_embeddings,
    "fading": audit_fading,
    "peetre": audit_peetre,
    "sstar": audit_sstar,
    "fs": audit_fs,
}

__all__ = [
    "AUDITS",
    "EMBED_AB_TO_DYADIC",
    "EMBED_DYADIC_TO_AB",
    "FADE_AB",
    "FADE_DYADIC",
    "AuditReport",
    "Check",
    "CSV_COLUMNS",
    "audit_lemma71",
    "audit_almost_orthogonality",
    "audit_shearlet_wavelet_decay",
    "audit_operator_bounds",
    "audit_embeddings",
    "audit_fading",
    "audit_peetre",
    "audit_sstar",
    "audit_fs",
    "report_json",
    "report_csv",
    "to_json",
    "orthogonality_constant",
    "pair_convolution",
    "shearlet_wavelet_convolution",
    "single_atom",
    "atom_sequence",
    "fading_exponent",
    "random_sparse_map",
]
