"""Standard normal tail function and its inverse.

The inverse uses Wichura's AS241 (PPND16) rational approximations, accurate to
about 1e-16 relative over the whole open unit interval. Three regions:

* central, ``|p - 1/2| <= 0.425``: ratio of degree-7 polynomials in
  ``0.180625 - (p - 1/2)**2``;
* intermediate tail, ``sqrt(-log(min(p, 1-p))) <= 5``;
* far tail beyond that.
"""

from __future__ import annotations

import math

import numpy as np

from gert.errors import DomainError

_A = (
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
)
_B = (
    1.0,
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
)
_C = (
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
)
_D = (
    1.0,
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
_E = (
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
)
_F = (
    1.0,
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)


def _poly(coefs, x):
    acc = coefs[-1]
    for c in reversed(coefs[:-1]):
        acc = acc * x + c
    return acc


def _ppnd_scalar(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DomainError("probability must lie strictly between 0 and 1")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_A, r) / _poly(_B, r)
    r = math.sqrt(-math.log(p if q < 0.0 else 1.0 - p))
    if r <= 5.0:
        r -= 1.6
        val = _poly(_C, r) / _poly(_D, r)
    else:
        r -= 5.0
        val = _poly(_E, r) / _poly(_F, r)
    return -val if q < 0.0 else val


def ppnd(p):
    """Inverse standard normal CDF (quantile) for ``0 < p < 1``. Vectorised."""
    if isinstance(p, (float, int)):
        return _ppnd_scalar(float(p))
    p = np.asarray(p, dtype=np.float64)
    if np.any(~((p > 0.0) & (p < 1.0))):
        raise DomainError("probability must lie strictly between 0 and 1")
    q = p - 0.5
    out = np.empty_like(p)

    central = np.abs(q) <= 0.425
    if np.any(central):
        qc = q[central]
        r = 0.180625 - qc * qc
        out[central] = qc * _poly(_A, r) / _poly(_B, r)

    tail = ~central
    if np.any(tail):
        qt = q[tail]
        r = np.sqrt(-np.log(np.where(qt < 0.0, p[tail], 1.0 - p[tail])))
        near = r <= 5.0
        rn = r - 1.6
        rf = r - 5.0
        val = np.where(near, _poly(_C, rn) / _poly(_D, rn), _poly(_E, rf) / _poly(_F, rf))
        out[tail] = np.where(qt < 0.0, -val, val)

    return float(out) if out.ndim == 0 else out


def q_tail(z):
    """Upper tail ``P[N(0,1) > z]``."""
    if np.ndim(z) == 0:
        return 0.5 * math.erfc(float(z) / math.sqrt(2.0))
    return np.array([0.5 * math.erfc(v / math.sqrt(2.0)) for v in np.ravel(z)]).reshape(np.shape(z))


def inverse_q(tail_prob):
    """``z`` with ``P[N(0,1) > z] == tail_prob``, for ``0 < tail_prob < 0.5``.

    Evaluated as ``-ppnd(tail_prob)`` so small tails keep full relative precision.
    """
    if isinstance(tail_prob, (float, int)):
        if not 0.0 < tail_prob < 0.5:
            raise DomainError(f"tail probability must lie in (0, 0.5), got {tail_prob}")
        return -_ppnd_scalar(float(tail_prob))
    tp = np.asarray(tail_prob, dtype=np.float64)
    if np.any(~((tp > 0.0) & (tp < 0.5))):
        raise DomainError(f"tail probability must lie in (0, 0.5), got {tail_prob}")
    return -ppnd(tp)
