"""Fixed 3x3 operator set for the three-level ladder system.

Basis ordering is (|0>, |1>, |2>) ascending in energy, so jz is
diag(-1, 0, +1).  All matrices are built once, as dense complex arrays,
and treated as immutable constants.
"""

from dataclasses import dataclass, field

import numpy as np

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class OperatorSet:
    """The ladder operators and the two pulse operators.

    ``p_op`` is the anti-diagonal permutation swapping |0> and |2>;
    ``q_op`` = diag(1, -1, 1).  Both are involutory.
    """

    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray
    jx: np.ndarray
    jy: np.ndarray
    p_op: np.ndarray
    q_op: np.ndarray
    identity: np.ndarray

    def __post_init__(self):
        for name in ("jz", "jplus", "jminus", "jx", "jy", "p_op", "q_op", "identity"):
            getattr(self, name).setflags(write=False)


def build_operator_set() -> OperatorSet:
    """Construct the operator set in the fixed (|0>, |1>, |2>) basis."""
    jz = np.diag([-1.0, 0.0, 1.0]).astype(complex)
    jminus = np.zeros((3, 3), dtype=complex)
    jminus[0, 1] = SQRT2
    jminus[1, 2] = SQRT2
    jplus = jminus.conj().T.copy()
    jx = (jplus + jminus) / 2.0
    jy = (jplus - jminus) / 2.0j
    p_op = np.fliplr(np.eye(3)).astype(complex)
    q_op = np.diag([1.0, -1.0, 1.0]).astype(complex)
    identity = np.eye(3, dtype=complex)
    return OperatorSet(jz, jplus, jminus, jx, jy, p_op, q_op, identity)


def _comm(a, b):
    return a @ b - b @ a


def _anti(a, b):
    return a @ b + b @ a


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    deviation: float
    passed: bool


@dataclass(frozen=True)
class AlgebraReport:
    tol: float
    checks: list = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def deviation(self, name: str) -> float:
        for c in self.checks:
            if c.name == name:
                return c.deviation
        raise KeyError(name)


def check_algebra(ops: OperatorSet, tol: float) -> AlgebraReport:
    """Evaluate the twelve defining operator identities entrywise.

    Each identity is reported as its max-norm deviation from zero together
    with a pass/fail mark against ``tol``.  A failing identity is a report
    entry, not an exception.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    eye = ops.identity
    residuals = {
        "P^2 = I": ops.p_op @ ops.p_op - eye,
        "Q^2 = I": ops.q_op @ ops.q_op - eye,
        "{J_z, P} = 0": _anti(ops.jz, ops.p_op),
        "{J_-, Q} = 0": _anti(ops.jminus, ops.q_op),
        "{J_+, Q} = 0": _anti(ops.jplus, ops.q_op),
        "[P, Q] = 0": _comm(ops.p_op, ops.q_op),
        "[J_z, Q] = 0": _comm(ops.jz, ops.q_op),
        "[P, J_x] = 0": _comm(ops.p_op, ops.jx),
        "[P, [P, J_y]] = 4 J_y": _comm(ops.p_op, _comm(ops.p_op, ops.jy)) - 4.0 * ops.jy,
        "[P, [P, J_z]] = 4 J_z": _comm(ops.p_op, _comm(ops.p_op, ops.jz)) - 4.0 * ops.jz,
        "[Q, [Q, J_x]] = 4 J_x": _comm(ops.q_op, _comm(ops.q_op, ops.jx)) - 4.0 * ops.jx,
        "[Q, [Q, J_y]] = 4 J_y": _comm(ops.q_op, _comm(ops.q_op, ops.jy)) - 4.0 * ops.jy,
    }
    checks = []
    for name, res in residuals.items():
        dev = float(np.max(np.abs(res)))
        checks.append(IdentityCheck(name, dev, dev <= tol))
    return AlgebraReport(tol=tol, checks=checks)
