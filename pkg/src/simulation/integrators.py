# integrators.py
# Explicit Runge-Kutta steppers defined by their Butcher tableau.
#
# Every stepper advances y' = f(t, y) by one step h. Embedded pairs also
# return an error estimate (higher minus lower order solution).

import numpy as np


class ExplicitRungeKutta:
    name = None
    order = None
    is_adaptive = False

    # stage times, lower-triangular coefficients, weights
    c = ()
    A = ()
    b = ()
    # weights of the error estimate, adaptive methods only
    e = ()

    @property
    def stages(self):
        return len(self.b)

    def step(self, f, t, y, h):
        """Return ``(y_next, error_estimate_or_None, evaluations)``."""
        k = []
        for i in range(self.stages):
            y_stage = y
            for a_ij, k_j in zip(self.A[i], k):
                if a_ij:
                    y_stage = y_stage + h * a_ij * k_j
            k.append(f(t + self.c[i] * h, y_stage))

        y_next = y + h * sum(b_i * k_i for b_i, k_i in zip(self.b, k) if b_i)
        error = None
        if self.is_adaptive:
            error = h * sum(e_i * k_i for e_i, k_i in zip(self.e, k) if e_i)
        return y_next, error, self.stages


class ExplicitEuler(ExplicitRungeKutta):
    name = "euler"
    order = 1
    c = (0.0,)
    A = ((),)
    b = (1.0,)


class RK4(ExplicitRungeKutta):
    """Classical fourth order Runge-Kutta."""

    name = "rk4"
    order = 4
    c = (0.0, 0.5, 0.5, 1.0)
    A = ((), (0.5,), (0.0, 0.5), (0.0, 0.0, 1.0))
    b = (1 / 6, 1 / 3, 1 / 3, 1 / 6)


class RK45(ExplicitRungeKutta):
    """Dormand-Prince 5(4) pair, propagating the fifth order solution."""

    name = "rk45"
    order = 5
    is_adaptive = True
    c = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
    A = (
        (),
        (1 / 5,),
        (3 / 40, 9 / 40),
        (44 / 45, -56 / 15, 32 / 9),
        (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
        (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
        (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
    )
    b = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
    e = (
        71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
    )


METHODS = {cls.name: cls for cls in (ExplicitEuler, RK4, RK45)}
# long forms accepted in scenario files
ALIASES = {"explicit-euler": "euler", "adaptive-rk45": "rk45"}


def get_integrator(name):
    key = ALIASES.get(name.lower(), name.lower())
    if key not in METHODS:
        raise ValueError(f"unknown integration method {name!r}; choose from {sorted(METHODS)}")
    return METHODS[key]()


def error_norm(error, y_old, y_new, rtol, atol):
    """Max-norm of the error scaled by the mixed tolerance; returns (norm, worst slot)."""
    scale = atol + rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    ratio = np.abs(error) / scale
    worst = int(np.argmax(ratio))
    return float(ratio[worst]), worst
