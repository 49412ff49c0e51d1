r"""Lindblad models for four driven three-level configurations.

Two families are covered.  Each has an (a) member, where two independent
lasers drive transitions sharing one level and one transition is metastable,
and a (b) member, where a single laser drives two transitions whose dipole
moments form an angle phi:

* fig1a: stable ground level 1, lasers on 1<->2 and 1<->3; level 2 decays
  to level 1 (rate 2*gamma21) and to the metastable level 3 (2*gamma23).
* fig1b: Lambda system; unstable level 2' decays into the two close-lying
  lower levels 1' and 3' (rates 2*gamma21, 2*gamma23), one laser drives
  both transitions.
* fig2a: lasers on 1<->2 and on the metastable 2<->3; levels 2 and 3 decay
  into the ground level 1 (rates 2*gamma21, 2*gamma31).
* fig2b: V system; close-lying upper levels 2' and 3' decay to the common
  ground level 1' (rates 2*gamma21, 2*gamma31), one laser drives both
  transitions.

Conventions
-----------
* Array index 0, 1, 2 corresponds to atomic level 1, 2, 3.
* All rates and frequencies are dimensionless in units of a reference rate
  Gamma_ref; time is measured in 1/Gamma_ref.  A stored ``gamma`` is the
  half-width: the Einstein A coefficient of the transition is ``2*gamma``.
* Every generator has the form

      drho/dt = -i [H, rho]
                + sum_ab R[a, b] * (A_a rho A_b^+ - {A_b^+ A_a, rho} / 2)

  with matrix-unit collapse operators A and a real symmetric positive
  semidefinite rate matrix R whose entries carry the factors 2*gamma.  The
  off-diagonal entries of R encode the cross-damping interference terms of
  the single-laser configurations (proportional to cos(phi)).
* Rabi couplings enter H with a positive sign, +Omega (|upper><lower| +
  h.c.); laser phases are absorbed into the level phases.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .linalg import ketbra


class Config(str, enum.Enum):
    """The four supported level configurations."""

    FIG1A = "fig1a"
    FIG1B = "fig1b"
    FIG2A = "fig2a"
    FIG2B = "fig2b"

    def family(self) -> str:
        return "fig1" if self in (Config.FIG1A, Config.FIG1B) else "fig2"


_NEEDS_PHI = (Config.FIG1B, Config.FIG2B)


def _cos_dipole(phi: float) -> float:
    # cos(pi/2) rounds to ~6e-17; a cross rate that small is pure roundoff,
    # so orthogonal dipoles give exactly independent channels
    c = math.cos(phi)
    return 0.0 if abs(c) < 4 * np.finfo(float).eps else c


@dataclass(frozen=True)
class SystemParams:
    """Rates, drives and detunings of one configuration.

    Field semantics depend on ``config``:

    ===============  ==========  ==========  ==========  ==========
    field            fig1a       fig1b       fig2a       fig2b
    ===============  ==========  ==========  ==========  ==========
    gamma21          G21 (2->1)  G21 (2->1)  G21 (2->1)  G21 (2->1)
    gamma23_or_31    G23 (2->3)  G23 (2->3)  G31 (3->1)  G31 (3->1)
    omega_a          O21         O21         O21         O21
    omega_b          O31         O23         O23         O31
    delta2           D21         D2          D2          D2
    delta3           D31         D3          D3          D3
    phi              --          dipole ang  --          dipole ang
    ===============  ==========  ==========  ==========  ==========
    """

    config: Config
    gamma21: float
    gamma23_or_31: float
    omega_a: float
    omega_b: float = 0.0
    delta2: float = 0.0
    delta3: float = 0.0
    phi: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "config", Config(self.config))
        for name in ("gamma21", "gamma23_or_31", "omega_a", "omega_b",
                     "delta2", "delta3"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        for name in ("gamma21", "gamma23_or_31", "omega_a", "omega_b"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.config in _NEEDS_PHI:
            if self.phi is None:
                raise ValueError(f"phi is required for config {self.config.value}")
            if not (0.0 <= self.phi <= math.pi):
                raise ValueError(f"phi must lie in [0, pi], got {self.phi}")


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian plus dissipative channels of one master equation.

    ``collapse_ops`` are bare matrix units; all rate information lives in
    ``rate_matrix``, so the induced Liouvillian is trace preserving by
    construction and the photon-detection superoperator is
    sum_ab R[a, b] A_a rho A_b^+.
    """

    hamiltonian: np.ndarray
    collapse_ops: tuple[np.ndarray, ...]
    rate_matrix: np.ndarray
    config: Config | None = None

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=complex)
        r = np.asarray(self.rate_matrix, dtype=float)
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "rate_matrix", r)
        object.__setattr__(
            self, "collapse_ops",
            tuple(np.asarray(a, dtype=complex) for a in self.collapse_ops),
        )
        if np.linalg.norm(h - h.conj().T) > 1e-12 * max(1.0, np.linalg.norm(h)):
            raise ValueError("hamiltonian must be Hermitian")
        n = len(self.collapse_ops)
        if r.shape != (n, n):
            raise ValueError(f"rate matrix shape {r.shape} does not match "
                             f"{n} collapse operators")
        if n and np.linalg.norm(r - r.T) > 1e-12 * max(1.0, np.linalg.norm(r)):
            raise ValueError("rate matrix must be symmetric")
        if n:
            wmin = float(np.linalg.eigvalsh(0.5 * (r + r.T)).min())
            if wmin < -1e-12 * max(1.0, float(np.abs(r).max())):
                raise ValueError(f"rate matrix is not PSD (min eigenvalue {wmin})")

    def jump_operators(self) -> tuple[np.ndarray, ...]:
        """Rate-weighted jump operators in the diagonal channel basis.

        The rate matrix is PSD, so it diagonalizes as R = O diag(r) O^T and
        c_k = sqrt(r_k) sum_a O[a, k] A_a reproduce the dissipator in the
        standard single-sum Lindblad form.  Channels with zero rate are
        dropped.
        """
        if not self.collapse_ops:
            return ()
        w, o = np.linalg.eigh(self.rate_matrix)
        scale = max(float(w.max()), 0.0)
        ops = []
        for k in range(len(w)):
            if w[k] > 1e-14 * max(scale, 1.0):
                c = np.zeros((3, 3), dtype=complex)
                for a, op in enumerate(self.collapse_ops):
                    c += o[a, k] * op
                ops.append(np.sqrt(w[k]) * c)
        return tuple(ops)

    def total_decay_operator(self) -> np.ndarray:
        """sum_ab R[a, b] A_b^+ A_a, the operator in the anticommutator."""
        k = np.zeros((3, 3), dtype=complex)
        for a, op_a in enumerate(self.collapse_ops):
            for b, op_b in enumerate(self.collapse_ops):
                if self.rate_matrix[a, b] != 0.0:
                    k += self.rate_matrix[a, b] * (op_b.conj().T @ op_a)
        return k

    def effective_hamiltonian(self) -> np.ndarray:
        """Non-Hermitian generator of the no-jump evolution."""
        return self.hamiltonian - 0.5j * self.total_decay_operator()


def _check_config(p: SystemParams, expected: Config):
    if p.config is not expected:
        raise ValueError(
            f"expected params with config {expected.value}, got {p.config.value}"
        )


def build_fig1a(p: SystemParams) -> LindbladModel:
    """Two lasers drive 1<->2 and 1<->3; level 2 decays to 1 and to 3.

    H = diag(0, -delta2, -delta3) + omega_a (|2><1| + h.c.)
      + omega_b (|3><1| + h.c.), channels |1><2| at 2*gamma21 and |3><2| at
      2*gamma23; the anticommutator (gamma21 + gamma23){|2><2|, rho} follows
      from the rate-matrix form.
    """
    _check_config(p, Config.FIG1A)
    h = np.zeros((3, 3), dtype=complex)
    h[1, 1] = -p.delta2
    h[2, 2] = -p.delta3
    h[1, 0] = h[0, 1] = p.omega_a
    h[2, 0] = h[0, 2] = p.omega_b
    ops = (ketbra(0, 1), ketbra(2, 1))
    rates = np.diag([2.0 * p.gamma21, 2.0 * p.gamma23_or_31])
    return LindbladModel(h, ops, rates, Config.FIG1A)


def build_fig1b(p: SystemParams) -> LindbladModel:
    """Lambda system: one laser drives 2'<->1' and 2'<->3' with dipole
    angle phi between the two transition dipole moments.

    H = diag(0, -delta2, delta3 - delta2) + omega_a (|2'><1'| + h.c.)
      + omega_b (|2'><3'| + h.c.).  The decay channels |1'><2'| and
    |3'><2'| interfere with cross weight 2*sqrt(g21*g23)*cos(phi).
    """
    _check_config(p, Config.FIG1B)
    h = np.zeros((3, 3), dtype=complex)
    h[1, 1] = -p.delta2
    h[2, 2] = p.delta3 - p.delta2
    h[1, 0] = h[0, 1] = p.omega_a
    h[1, 2] = h[2, 1] = p.omega_b
    ops = (ketbra(0, 1), ketbra(2, 1))
    g21, g23 = p.gamma21, p.gamma23_or_31
    cross = math.sqrt(g21 * g23) * _cos_dipole(p.phi)
    rates = 2.0 * np.array([[g21, cross], [cross, g23]])
    return LindbladModel(h, ops, rates, Config.FIG1B)


def build_fig2a(p: SystemParams) -> LindbladModel:
    """Lasers drive 1<->2 and 2<->3; levels 2 and 3 decay to level 1.

    H = diag(0, -delta2, delta3 - delta2) + omega_a (|2><1| + h.c.)
      + omega_b (|3><2| + h.c.), channels |1><2| at 2*gamma21 and |1><3| at
      2*gamma31.
    """
    _check_config(p, Config.FIG2A)
    h = np.zeros((3, 3), dtype=complex)
    h[1, 1] = -p.delta2
    h[2, 2] = p.delta3 - p.delta2
    h[1, 0] = h[0, 1] = p.omega_a
    h[2, 1] = h[1, 2] = p.omega_b
    ops = (ketbra(0, 1), ketbra(0, 2))
    rates = np.diag([2.0 * p.gamma21, 2.0 * p.gamma23_or_31])
    return LindbladModel(h, ops, rates, Config.FIG2A)


def build_fig2b(p: SystemParams) -> LindbladModel:
    """V system: one laser drives both 1'<->2' and 1'<->3'; the close-lying
    upper levels decay to the common ground state with dipole angle phi.

    H = diag(0, -delta2, -delta3) + omega_a (|2'><1'| + h.c.)
      + omega_b (|3'><1'| + h.c.).  Channels |1'><2'| and |1'><3'|
    interfere with cross weight 2*sqrt(g21*g31)*cos(phi).
    """
    _check_config(p, Config.FIG2B)
    h = np.zeros((3, 3), dtype=complex)
    h[1, 1] = -p.delta2
    h[2, 2] = -p.delta3
    h[1, 0] = h[0, 1] = p.omega_a
    h[2, 0] = h[0, 2] = p.omega_b
    ops = (ketbra(0, 1), ketbra(0, 2))
    g21, g31 = p.gamma21, p.gamma23_or_31
    cross = math.sqrt(g21 * g31) * _cos_dipole(p.phi)
    rates = 2.0 * np.array([[g21, cross], [cross, g31]])
    return LindbladModel(h, ops, rates, Config.FIG2B)


_BUILDERS = {
    Config.FIG1A: build_fig1a,
    Config.FIG1B: build_fig1b,
    Config.FIG2A: build_fig2a,
    Config.FIG2B: build_fig2b,
}


def build_model(p: SystemParams) -> LindbladModel:
    """Dispatch to the builder matching ``p.config``."""
    return _BUILDERS[p.config](p)
