"""The nine associated-curve families.

A mate is alpha* = alpha + lambda * V with V one of the base Frenet vectors
T, N, B; the association requires V to lie in the osculating (O), normal
(P), or rectifying (R) plane of the mate. For each offset vector the
derivatives of alpha* have closed-form components in the base frame:

    V = T:  alpha*'  = (1 + lambda') T + lambda kappa N
    V = N:  alpha*'  = (1 - lambda kappa) T + lambda' N + lambda tau B
    V = B:  alpha*'  = T - lambda tau N + lambda' B

with matching second and third derivatives. The mate's tangent is the
normalized first derivative, its binormal the normalized cross product of
the first two derivatives, and N* = B* x T*; predicted frames and
curvatures below are evaluated from those exact component vectors. The
catalogued printed curvature formulas are kept verbatim for the formula
audit in :mod:`curvemates.verify`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    PlanarityError,
    SingularConfigurationError,
    SpecificationError,
)
from .geometry import FrameData, FrenetFrame, SampledCurve
from .solvers import LambdaSolution

VECTORS = ("T", "N", "B")
PLANES = ("O", "P", "R")
# Which mate frame vector is normal to each plane.
PLANE_NORMAL = {"O": "B", "P": "T", "R": "N"}
_COEFF_NAMES = {"O": ("a", "b"), "P": ("c", "d"), "R": ("e", "f")}

_DENOM_FLOOR = 1e-12


@dataclass(frozen=True)
class AssociationSpec:
    """Family selector: offset vector, plane of the mate, plane coefficients."""

    vector: str
    plane: str
    coeffs: tuple[float, float]

    def __post_init__(self):
        if self.vector not in VECTORS:
            raise SpecificationError(f"offset vector must be one of {VECTORS}")
        if self.plane not in PLANES:
            raise SpecificationError(f"plane must be one of {PLANES}")
        c = (float(self.coeffs[0]), float(self.coeffs[1]))
        object.__setattr__(self, "coeffs", c)
        if c[0] == 0.0 and c[1] == 0.0:
            raise SpecificationError("plane coefficients must not both vanish")
        if self.vector == "T" and self.plane == "O" and c[1] == 0.0:
            raise SpecificationError("tangent/osculating association requires b != 0")
        if self.vector == "T" and self.plane == "R" and c[1] == 0.0:
            raise SpecificationError("tangent/rectifying association requires f != 0")

    @property
    def code(self) -> str:
        return self.vector + self.plane

    def coeff_names(self) -> tuple[str, str]:
        return _COEFF_NAMES[self.plane]

    def ratio(self) -> float:
        """First-over-second coefficient (a/b or e/f), used by the linear ODE."""
        if self.coeffs[1] == 0.0:
            raise SpecificationError("ratio undefined: second coefficient is zero")
        return self.coeffs[0] / self.coeffs[1]


@dataclass(frozen=True)
class KLMCoefficients:
    """Cross-product components of a normal-offset mate at one point."""

    K: float
    L: float
    M: float

    def norm(self) -> float:
        return math.sqrt(self.K**2 + self.L**2 + self.M**2)


@dataclass(frozen=True)
class XYZCoefficients:
    """Cross-product components of a binormal-offset mate at one point."""

    X: float
    Y: float
    Z: float

    def norm(self) -> float:
        return math.sqrt(self.X**2 + self.Y**2 + self.Z**2)


def plane_unit_vector(frame: FrenetFrame, spec: AssociationSpec) -> np.ndarray:
    """Unit combination of the mate's frame spanning the selected plane."""
    p, q = spec.coeffs
    norm = math.hypot(p, q)
    if norm == 0.0:
        raise SpecificationError("plane coefficients must not both vanish")
    if spec.plane == "O":
        v = p * frame.T + q * frame.N
    elif spec.plane == "P":
        v = p * frame.N + q * frame.B
    else:
        v = p * frame.T + q * frame.B
    return v / norm


def construct_mate(
    base: SampledCurve, offset_vector: str, lam: LambdaSolution
) -> SampledCurve:
    """Pointwise alpha*_i = alpha_i + lambda_i V_i along a base frame vector."""
    if offset_vector not in VECTORS:
        raise SpecificationError(f"offset vector must be one of {VECTORS}")
    if base.frames is None:
        raise SpecificationError("base curve must carry frames")
    lam.require_grid(base.grid)
    V = getattr(base.frames, offset_vector)
    positions = base.positions + lam.lam[:, None] * V
    return SampledCurve(grid=base.grid, positions=positions)


def klm_coefficients(lam, lam_p, lam_pp, kappa, tau, kappa_p, tau_p):
    """Components of alpha*' x alpha*'' for normal offsets (vectorized).

    K and M follow the customary printed forms; L is the actual cross
    product component lam*tau*(-lam*kappa' - 2*lam'*kappa) -
    (1 - lam*kappa)*(lam*tau' + 2*lam'*tau), which differs from a commonly
    printed variant by the sign of its first term. The triple (K, L, M)
    always equals the finite-difference cross product of the constructed
    mate, which is the property tests key on.
    """
    one = 1.0 - lam * kappa
    d = one * kappa - lam * tau**2 + lam_pp
    K = lam_p * (lam * tau_p + 2.0 * lam_p * tau) - lam * tau * d
    L = lam * tau * (-lam * kappa_p - 2.0 * lam_p * kappa) - one * (lam * tau_p + 2.0 * lam_p * tau)
    M = one * d - lam_p * (-lam * kappa_p - 2.0 * lam_p * kappa)
    return K, L, M


def xyz_coefficients(lam, lam_p, lam_pp, kappa, tau, kappa_p, tau_p):
    """Components of alpha*' x alpha*'' for binormal offsets (vectorized)."""
    X = -lam * tau * (-lam * tau**2 + lam_pp) - lam_p * (-lam * tau_p - 2.0 * lam_p * tau + kappa)
    Y = lam * tau**2 - lam_pp + lam_p * lam * tau * kappa
    Z = -lam * tau_p - 2.0 * lam_p * tau + kappa + lam**2 * tau**2 * kappa
    return X, Y, Z


def klm(lam: float, lam_p: float, lam_pp: float, frame: FrenetFrame) -> KLMCoefficients:
    """KLM coefficients at one point from a base frame."""
    K, L, M = klm_coefficients(lam, lam_p, lam_pp, frame.kappa, frame.tau,
                               frame.kappa_prime, frame.tau_prime)
    return KLMCoefficients(K=float(K), L=float(L), M=float(M))


def xyz(lam: float, lam_p: float, lam_pp: float, frame: FrenetFrame) -> XYZCoefficients:
    """XYZ coefficients at one point from a base frame."""
    X, Y, Z = xyz_coefficients(lam, lam_p, lam_pp, frame.kappa, frame.tau,
                               frame.kappa_prime, frame.tau_prime)
    return XYZCoefficients(X=float(X), Y=float(Y), Z=float(Z))


def _first_derivative_components(vector, lam, lam_p, kappa, tau):
    """alpha*' in the base frame basis, per offset vector."""
    zeros = np.zeros_like(lam)
    if vector == "T":
        return np.stack([1.0 + lam_p, lam * kappa, zeros], axis=-1)
    if vector == "N":
        return np.stack([1.0 - lam * kappa, lam_p, lam * tau], axis=-1)
    return np.stack([np.ones_like(lam), -lam * tau, lam_p], axis=-1)


def _cross_components(vector, lam, lam_p, lam_pp, kappa, tau, kappa_p, tau_p):
    """alpha*' x alpha*'' in the base frame basis, per offset vector."""
    if vector == "T":
        wT = lam**2 * kappa**2 * tau
        wN = -(1.0 + lam_p) * lam * kappa * tau
        wB = (1.0 + lam_p) * ((1.0 + lam_p) * kappa + lam_p * kappa + lam * kappa_p) \
            - lam * kappa * (lam_pp - lam * kappa**2)
        return np.stack([wT, wN, wB], axis=-1)
    if vector == "N":
        K, L, M = klm_coefficients(lam, lam_p, lam_pp, kappa, tau, kappa_p, tau_p)
        return np.stack([K, L, M], axis=-1)
    X, Y, Z = xyz_coefficients(lam, lam_p, lam_pp, kappa, tau, kappa_p, tau_p)
    return np.stack([X, Y, Z], axis=-1)


def _third_derivative_components(vector, lam, lam_p, lam_pp, lam_ppp,
                                 kappa, tau, kappa_p, tau_p, kappa_pp, tau_pp):
    """alpha*''' in the base frame basis, per offset vector."""
    if vector == "T":
        cT = lam_ppp - 3.0 * lam_p * kappa**2 - 3.0 * lam * kappa * kappa_p - kappa**2
        cN = (-kappa**3 * lam - lam * kappa * tau**2 + 3.0 * lam_pp * kappa
              + 3.0 * lam_p * kappa_p + lam * kappa_pp + kappa_p)
        cB = 3.0 * lam_p * kappa * tau + lam * kappa * tau_p + 2.0 * lam * kappa_p * tau + kappa * tau
    elif vector == "N":
        cT = (lam * kappa**3 + lam * kappa * tau**2 - 3.0 * lam_p * kappa_p
              - lam * kappa_pp - 3.0 * lam_pp * kappa - kappa**2)
        cN = (lam_ppp - 3.0 * lam_p * (kappa**2 + tau**2)
              - 3.0 * lam * (kappa * kappa_p + tau * tau_p) + kappa_p)
        cB = (kappa * tau - lam * kappa**2 * tau - lam * tau**3
              + 3.0 * lam_p * tau_p + lam * tau_pp + 3.0 * lam_pp * tau)
    else:
        cT = lam * tau * kappa_p + 2.0 * lam * tau_p * kappa + 3.0 * lam_p * tau * kappa - kappa**2
        cN = (lam * tau * kappa**2 + lam * tau**3 - lam * tau_pp
              - 3.0 * lam_pp * tau - 3.0 * lam_p * tau_p + kappa_p)
        cB = lam_ppp - 3.0 * lam * tau * tau_p - 3.0 * lam_p * tau**2 + kappa * tau
    return np.stack([cT, cN, cB], axis=-1)


def _embed(components: np.ndarray, frames: FrameData) -> np.ndarray:
    """Lift frame-basis components (n, 3) to world vectors."""
    return (components[..., 0:1] * frames.T + components[..., 1:2] * frames.N
            + components[..., 2:3] * frames.B)


def predicted_frames_grid(
    frames: FrameData, vector: str, lam_sol: LambdaSolution
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Closed-form mate frames on the whole grid.

    Returns (T*, N*, B*, defined) where ``defined`` masks points at which
    either the mate speed or its cross product vanishes; those rows are NaN.
    """
    lam, lam_p, lam_pp = lam_sol.lam, lam_sol.lam_prime, lam_sol.lam_double_prime
    u = _first_derivative_components(vector, lam, lam_p, frames.kappa, frames.tau)
    w = _cross_components(vector, lam, lam_p, lam_pp, frames.kappa, frames.tau,
                          frames.kappa_prime, frames.tau_prime)
    un = np.linalg.norm(u, axis=-1)
    wn = np.linalg.norm(w, axis=-1)
    defined = (un > _DENOM_FLOOR) & (wn > _DENOM_FLOOR)
    su = np.where(un > 0, un, 1.0)
    sw = np.where(wn > 0, wn, 1.0)
    T_star = _embed(u / su[:, None], frames)
    B_star = _embed(w / sw[:, None], frames)
    N_star = np.cross(B_star, T_star)
    bad = ~defined
    for arr in (T_star, N_star, B_star):
        arr[bad] = np.nan
    return T_star, N_star, B_star, defined


def predicted_frame(
    base_frame: FrenetFrame,
    spec: AssociationSpec,
    lam: float,
    lam_derivs: tuple[float, float],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closed-form mate frame at one point.

    Raises SingularConfigurationError naming the vanishing expression when
    the mate speed or cross product is below 1e-12.
    """
    lam_p, lam_pp = lam_derivs
    lam_a = np.array([float(lam)])
    u = _first_derivative_components(spec.vector, lam_a, np.array([lam_p]),
                                     np.array([base_frame.kappa]), np.array([base_frame.tau]))[0]
    w = _cross_components(spec.vector, lam_a, np.array([lam_p]), np.array([lam_pp]),
                          np.array([base_frame.kappa]), np.array([base_frame.tau]),
                          np.array([base_frame.kappa_prime]), np.array([base_frame.tau_prime]))[0]
    un = float(np.linalg.norm(u))
    wn = float(np.linalg.norm(w))
    if un < _DENOM_FLOOR:
        raise SingularConfigurationError("mate speed vanishes", expression="|alpha*'|")
    if wn < _DENOM_FLOOR:
        raise SingularConfigurationError(
            "mate cross product vanishes", expression="|alpha*' x alpha*''|"
        )
    basis = np.stack([base_frame.T, base_frame.N, base_frame.B])
    T_star = (u / un) @ basis
    B_star = (w / wn) @ basis
    N_star = np.cross(B_star, T_star)
    return T_star, N_star, B_star


def mate_curvatures_closed(
    frames: FrameData, vector: str, lam_sol: LambdaSolution,
    lam_ppp: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact closed-form kappa*, tau* of the mate from base data.

    kappa* = |w| / |u|^3 and tau* = <w, alpha*'''> / |w|^2 with the
    component vectors above. Returns (kappa*, tau*, defined).
    """
    lam, lam_p, lam_pp = lam_sol.lam, lam_sol.lam_prime, lam_sol.lam_double_prime
    if lam_ppp is None:
        lam_ppp = lam_sol.lam_third()
    k, t = frames.kappa, frames.tau
    kp, tp = frames.kappa_prime, frames.tau_prime
    kpp, tpp = frames.kappa_second_or_zero(), frames.tau_second_or_zero()
    u = _first_derivative_components(vector, lam, lam_p, k, t)
    w = _cross_components(vector, lam, lam_p, lam_pp, k, t, kp, tp)
    d3 = _third_derivative_components(vector, lam, lam_p, lam_pp, lam_ppp,
                                      k, t, kp, tp, kpp, tpp)
    un = np.linalg.norm(u, axis=-1)
    wn = np.linalg.norm(w, axis=-1)
    defined = (un > _DENOM_FLOOR) & (wn > _DENOM_FLOOR)
    su = np.where(un > 0, un, 1.0)
    sw = np.where(wn > 0, wn, 1.0)
    kappa_star = wn / su**3
    tau_star = np.einsum("ij,ij->i", w, d3) / sw**2
    kappa_star = np.where(defined, kappa_star, np.nan)
    tau_star = np.where(defined, tau_star, np.nan)
    return kappa_star, tau_star, defined


def _safe_div(num, den):
    den = np.asarray(den, dtype=float)
    ok = np.abs(den) > _DENOM_FLOOR
    out = np.divide(num, np.where(ok, den, 1.0))
    return np.where(ok, out, np.nan)


def predicted_curvature_arrays(
    frames: FrameData, spec: AssociationSpec, lam_sol: LambdaSolution,
    lam_ppp: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Catalogued printed formulas for kappa*, tau*, evaluated verbatim.

    Points where a printed denominator vanishes become NaN; formulas under
    the audit posture are reported and flagged, never silently repaired.
    """
    lam, lam_p, lam_pp = lam_sol.lam, lam_sol.lam_prime, lam_sol.lam_double_prime
    if lam_ppp is None:
        lam_ppp = lam_sol.lam_third()
    k, t = frames.kappa, frames.tau
    kp, tp = frames.kappa_prime, frames.tau_prime
    kpp, tpp = frames.kappa_second_or_zero(), frames.tau_second_or_zero()
    p, q = spec.coeffs
    code = spec.code

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if code == "TO":
            a, b = p, q
            ks = _safe_div(b, lam * math.hypot(a, b))
            ts = np.zeros_like(lam)
        elif code == "TP":
            ks = _safe_div(np.sqrt(k**2 + t**2), lam * k)
            ts = _safe_div(k * tp - kp * t, lam * k * (k**2 + t**2))
        elif code == "TR":
            e, f = p, q
            ks = _safe_div(t * f**2, lam * k * (e**2 + f**2))
            num = f * (k**2 * t * e**3 + k**2 * t * e * f**2 + t**3 * e * f**2
                       + k * tp * e**2 * f + k * tp * f**3
                       - kp * t * e**2 * f - kp * t * f**3)
            den = lam * k * (t**2 * e**2 * f**2 + t**2 * f**4 + k**2 * e**4
                             + 2.0 * k**2 * e**2 * f**2 + k**2 * f**4)
            ts = _safe_div(num, den)
        elif code == "NO":
            a, b = p, q
            K, L, M = klm_coefficients(lam, lam_p, lam_pp, k, t, kp, tp)
            G = M * (lam * k - 1.0) - K * lam * t
            ks = _safe_div(a**4 * G, b * (a**2 + b**2) * lam_p**4)
            third_T = (lam * k**3 + lam * k * t**2 - 3.0 * lam_p * kp
                       - lam * kpp - 3.0 * lam_pp * k - k**2)
            third_B = (k * t - lam * k**2 * t - lam * t**3
                       + 3.0 * lam_p * tp + lam * tpp + 3.0 * lam_pp * t)
            ts = _safe_div(b * lam_p, a * G) * (K * third_T + M * third_B)
        elif code == "NP":
            c, d = p, q
            zeros = np.zeros_like(lam)
            kk, ll, mm = klm_coefficients(lam, zeros, lam_pp, k, t, kp, tp)
            G = mm * (lam * k - 1.0) - kk * lam * t
            ks = _safe_div(ll * c**3 * math.hypot(c, d), d**4 * G**3)
            ts = _safe_div(ll**2 * (c**2 + d**2), d**2) * (
                kk * (k**3 * lam + k * t**2 * lam - lam * kpp - k**2)
                + ll * (-3.0 * lam * t * tp - 3.0 * lam * kp * k + kp)
                + mm * (-k**2 * t * lam - t**3 * lam + lam * tpp + k * t)
            )
        elif code == "NR":
            e, f = p, q
            K, L, M = klm_coefficients(lam, lam_p, lam_pp, k, t, kp, tp)
            ks = _safe_div(e**3 * L, f * (e**2 + f**2) * lam_p**3)
            ts = _safe_div(L**2 * (e**2 + f**2), f**2) * (
                K * (lam * k**3 + lam * k * t**2 - lam * kpp - k**2
                     - 3.0 * lam_pp * k - 3.0 * lam_p * kp)
                + L * (-3.0 * lam * k * kp - 3.0 * lam * t * tp - 3.0 * k**2 * lam_p
                       - 3.0 * lam_p * t**2 + lam_ppp + kp)
                + M * (-lam * k**2 * t - lam * t**3 + lam * tpp + k * t
                       + 3.0 * lam_pp * t + 3.0 * lam_p * tp)
            )
        elif code == "BO":
            a, b = p, q
            X, Y, Z = xyz_coefficients(lam, lam_p, lam_pp, k, t, kp, tp)
            G = X * lam * t + Y
            ks = _safe_div(-(a**4) * G, lam_p**2 * b * (a**2 + b**2) ** 1.5)
            ts = _safe_div(b**2 * lam_p**2, a**2 * G**2) * (
                X * (lam * t * kp + 3.0 * lam_p * t * k + 2.0 * lam * tp * k - k**2)
                + Y * (lam * t**3 + lam * t * k**2 - lam * tpp
                       - 3.0 * lam_p * tp - 3.0 * lam_pp * t + kp)
            )
        elif code == "BP":
            c, d = p, q
            core = -lam * tp + k + lam**2 * t**2
            ks = _safe_div(-(d**2) * math.hypot(c, d) * (lam * t**2 * (1.0 + lam**2 * t**2)) ** 3,
                           c**3 * core**2)
            num = d**2 * (lam**2 * t**3 * (lam * t * kp + 2.0 * tp * k * lam - k**2)
                          + lam * t**2 * (lam * t * k**2 + lam * t**3 - tpp * lam + kp)
                          + core * (-3.0 * tp * t * lam + k * t))
            ts = _safe_div(num, (c**2 + d**2) * core**2)
        elif code == "BR":
            e, f = p, q
            X, Y, Z = xyz_coefficients(lam, lam_p, lam_pp, k, t, kp, tp)
            ks = _safe_div(Z * e**3, f * (e**2 + f**2) * lam_p**3)
            ts = _safe_div(f**2, Z**2 * (e**2 + f**2)) * (
                X * (lam * t * kp + 2.0 * lam * tp * k + 3.0 * lam_p * t * k - k**2)
                + Y * (lam * t * k**2 + lam * t**3 - lam * tpp
                       - 3.0 * lam_pp * t - 3.0 * lam_p * tp + kp)
                + Z * (-3.0 * lam * t * tp - 3.0 * lam_p * t**2 + k * t + lam_ppp)
            )
        else:  # pragma: no cover
            raise SpecificationError(f"unknown family {code}")
    return ks, ts


def predicted_curvatures(
    spec: AssociationSpec,
    frame: FrenetFrame,
    lam: float,
    lam_p: float = 0.0,
    lam_pp: float = 0.0,
    lam_ppp: float = 0.0,
) -> tuple[float, float]:
    """Printed kappa*, tau* at one point; raises on vanishing denominators."""
    grid = np.array([0.0, 1.0])
    ones = np.ones(2)
    frames = FrameData(
        T=np.tile(frame.T, (2, 1)), N=np.tile(frame.N, (2, 1)), B=np.tile(frame.B, (2, 1)),
        kappa=ones * frame.kappa, tau=ones * frame.tau,
        kappa_prime=ones * frame.kappa_prime, tau_prime=ones * frame.tau_prime,
        speed=ones, kappa_second=ones * frame.kappa_second,
        tau_second=ones * frame.tau_second,
    )
    sol = LambdaSolution(grid=grid, lam=ones * lam, lam_prime=ones * lam_p,
                         lam_double_prime=ones * lam_pp, provenance="constant")
    ks, ts = predicted_curvature_arrays(frames, spec, sol, lam_ppp=ones * lam_ppp)
    if not (np.isfinite(ks[0]) and np.isfinite(ts[0])):
        raise SingularConfigurationError(
            f"printed curvature formula of {spec.code} divides by a vanishing expression",
            expression=spec.code,
        )
    return float(ks[0]), float(ts[0])


def classify_special_case(spec: AssociationSpec, lam_sol: LambdaSolution) -> str:
    """involute / bertrand-like / mannheim-like / generic.

    Involutes are exactly the tangent/normal-plane family. Normal offsets
    are Bertrand-like when the osculating combination degenerates to the
    mate normal (a = 0) or when the offset is constant in the normal-plane
    family; binormal/osculating offsets with a = 0 are Mannheim-like. Only
    coefficient ratios matter, so the classification is invariant under
    positive rescaling.
    """
    if spec.vector == "T" and spec.plane == "P":
        return "involute"
    if spec.vector == "N":
        if spec.plane == "O" and spec.coeffs[0] == 0.0:
            return "bertrand-like"
        if spec.plane == "P" and lam_sol.is_constant():
            return "bertrand-like"
    if spec.vector == "B" and spec.plane == "O" and spec.coeffs[0] == 0.0:
        return "mannheim-like"
    return "generic"


@dataclass(frozen=True)
class PredictedMate:
    """A constructed mate with its closed-form frames and curvatures."""

    base: SampledCurve
    mate: SampledCurve
    family: AssociationSpec
    lam: LambdaSolution
    T_star: np.ndarray
    N_star: np.ndarray
    B_star: np.ndarray
    kappa_star: np.ndarray
    tau_star: np.ndarray
    kappa_star_closed: np.ndarray
    tau_star_closed: np.ndarray
    defined: np.ndarray
    classification: str


def associate(
    base: SampledCurve,
    spec: AssociationSpec,
    lam_sol: LambdaSolution,
    planarity_tol: float = 1e-6,
) -> PredictedMate:
    """Construct the mate of ``base`` for the given family.

    Enforces the family prerequisites: tangent/osculating mates exist only
    for planar bases (max |tau| < planarity_tol), and the normal-plane
    families require a constant offset.
    """
    if base.frames is None:
        raise SpecificationError("base curve must carry frames")
    lam_sol.require_grid(base.grid)
    if float(np.max(np.abs(base.frames.speed - 1.0))) > 1e-4:
        raise SpecificationError("base curve must be arc-length parametrized")

    if spec.code == "TO":
        max_tau = float(np.max(np.abs(base.frames.tau)))
        if max_tau >= planarity_tol:
            raise PlanarityError(
                f"tangent/osculating association requires a planar base; max |tau| = {max_tau:.3e}"
            )
    if spec.plane == "P" and spec.vector in ("N", "B") and not lam_sol.is_constant(1e-8):
        raise SpecificationError(
            f"{spec.code} association requires a constant offset (lambda' = 0)"
        )

    mate = construct_mate(base, spec.vector, lam_sol)
    T_star, N_star, B_star, defined = predicted_frames_grid(base.frames, spec.vector, lam_sol)
    ks, ts = predicted_curvature_arrays(base.frames, spec, lam_sol)
    ks_c, ts_c, defined_c = mate_curvatures_closed(base.frames, spec.vector, lam_sol)
    return PredictedMate(
        base=base, mate=mate, family=spec, lam=lam_sol,
        T_star=T_star, N_star=N_star, B_star=B_star,
        kappa_star=ks, tau_star=ts,
        kappa_star_closed=ks_c, tau_star_closed=ts_c,
        defined=defined & defined_c,
        classification=classify_special_case(spec, lam_sol),
    )
