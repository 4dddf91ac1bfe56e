"""Second-order forward-mode differentiation with truncated Taylor jets.

A :class:`Jet` carries the value, gradient and Hessian of a scalar function of
``n`` variables, batched over a leading axis of evaluation points.  Metric and
almost-complex-structure fields are written once against the helpers in this
module (``sin``, ``cos``, ``sqrt``, ...) and work for plain float arrays as well
as for jets.
"""
import numpy as np


class Jet:
    """Truncated second-order Taylor polynomial at a batch of points.

    ``v`` has shape ``(N,)``, ``d`` shape ``(N, n)`` and ``h`` shape ``(N, n, n)``.
    """

    __slots__ = ("v", "d", "h")
    __array_priority__ = 1000

    def __init__(self, v, d, h):
        self.v = v
        self.d = d
        self.h = h

    @classmethod
    def variables(cls, points):
        """Independent-variable jets for ``points`` of shape ``(N, n)``."""
        points = np.asarray(points, dtype=float)
        N, n = points.shape
        out = []
        for i in range(n):
            d = np.zeros((N, n))
            d[:, i] = 1.0
            out.append(cls(points[:, i].copy(), d, np.zeros((N, n, n))))
        return out

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        c = np.broadcast_to(np.asarray(other, dtype=float), self.v.shape)
        return Jet(c, np.zeros_like(self.d), np.zeros_like(self.h))

    def _chain(self, f0, f1, f2):
        d = f1[:, None] * self.d
        h = f1[:, None, None] * self.h + f2[:, None, None] * self.d[:, :, None] * self.d[:, None, :]
        return Jet(f0, d, h)

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.v + other, self.d, self.h)
        return Jet(self.v + other.v, self.d + other.d, self.h + other.h)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, -self.d, -self.h)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=float)
            return Jet(self.v * c, self.d * c[..., None], self.h * c[..., None, None])
        a, b = self, other
        outer = a.d[:, :, None] * b.d[:, None, :]
        return Jet(
            a.v * b.v,
            a.v[:, None] * b.d + b.v[:, None] * a.d,
            a.v[:, None, None] * b.h + b.v[:, None, None] * a.h + outer + np.swapaxes(outer, 1, 2),
        )

    __rmul__ = __mul__

    def reciprocal(self):
        inv = 1.0 / self.v
        return self._chain(inv, -inv**2, 2.0 * inv**3)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        p = float(p)
        if p == 2.0:
            return self * self
        return self._chain(self.v**p, p * self.v ** (p - 1), p * (p - 1) * self.v ** (p - 2))

    def __repr__(self):
        return f"Jet(v={self.v!r})"


def sin(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.v), np.cos(x.v)
        return x._chain(s, c, -s)
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.v), np.cos(x.v)
        return x._chain(c, -s, -c)
    return np.cos(x)


def exp(x):
    if isinstance(x, Jet):
        e = np.exp(x.v)
        return x._chain(e, e, e)
    return np.exp(x)


def log(x):
    if isinstance(x, Jet):
        return x._chain(np.log(x.v), 1.0 / x.v, -1.0 / x.v**2)
    return np.log(x)


def sqrt(x):
    if isinstance(x, Jet):
        r = np.sqrt(x.v)
        return x._chain(r, 0.5 / r, -0.25 / (r * x.v))
    return np.sqrt(x)


def stack_matrix(entries, npoints, nvars=4):
    """Collect a nested list of jets/constants into value, gradient, Hessian arrays.

    Returns ``(val, grad, hess)`` with shapes ``(N, r, c)``, ``(N, r, c, n)`` and
    ``(N, r, c, n, n)``; ``grad[..., k]`` is the derivative along variable ``k``.
    """
    rows, cols = len(entries), len(entries[0])
    val = np.zeros((npoints, rows, cols))
    grad = np.zeros((npoints, rows, cols, nvars))
    hess = np.zeros((npoints, rows, cols, nvars, nvars))
    for i in range(rows):
        for j in range(cols):
            e = entries[i][j]
            if isinstance(e, Jet):
                val[:, i, j] = e.v
                grad[:, i, j] = e.d
                hess[:, i, j] = e.h
            else:
                val[:, i, j] = e
    return val, grad, hess
