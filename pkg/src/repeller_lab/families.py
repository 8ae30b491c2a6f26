"""Concrete map families: torus endomorphism models and 1D toys.

The planar model deforms the conformal integer matrix [[3,-1],[1,3]]
(expansion sqrt(10), rotation atan2(1,3)) by a radial multiplier profile
supported in a small disk about the origin.  For mu > 0 the origin turns
into an attracting fixed point whose basin — the open disk bounded by the
radially neutral circle — is the hole; outside the disk the map is the
plain linear action, so the ten inverse branches and their symbolic
coding are those of the linear endomorphism.

The spatial model does the same on T^3 with the companion matrix of
x^3 + 10x - 1 (determinant one, a real eigenvalue ~0.0999 and a complex
expanding pair of modulus ~3.1639): the deformation acts on the expanding
plane in eigencoordinates and is blended away in the contracting
direction.  Only escape-time dynamics are exposed for it.

The one-dimensional families are the tripling map with the middle-thirds
hole, and a degree-two circle covering with a hole segment shrinking like
sqrt(t) whose derivative stays above 1 + sqrt(t) away from the hole.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Region, centered, wrap
from .holes import MapWithHoles
from .profiles import PhiProfile, build_phi, circle_radius, profile_3d

SQRT10 = float(np.sqrt(10.0))
_SNAP = 1e-12


# =====================================================================
# ten-branch torus coding shared by the linear toy and the planar model
# =====================================================================

_A2 = np.array([[3.0, -1.0], [1.0, 3.0]])
_A2_INV = np.linalg.inv(_A2)
_COSETS = np.array([[j, 0.0] for j in range(10)])


def _symbol_reps():
    """Integer lattice points grouped by their branch symbol.

    The symbol of a lattice point m is (3 m0 + m1) mod 10; points sharing
    a symbol differ by an element of the matrix lattice A Z^2 and project
    to the same torus cell.  The range {-5..5}^2 exceeds the covering
    radius of A Z^2 (~2.24) over the reachable slab |y|_inf <= 2, so
    nearest-representative distances computed from it are exact.
    """
    reps = {s: [] for s in range(10)}
    for m0 in range(-5, 6):
        for m1 in range(-5, 6):
            reps[(3 * m0 + m1) % 10].append((float(m0), float(m1)))
    return {s: np.array(v) for s, v in reps.items()}


_REPS = _symbol_reps()


class _TenBranchTorus(MapWithHoles):
    """Symbol machinery of the degree-10 toral endomorphism y = A x."""

    d = 2
    n_branches = 10
    eta = 10

    def _linear_symbols(self, points) -> np.ndarray:
        y = centered(points) @ _A2.T
        m = np.floor(y + 0.5 + _SNAP).astype(np.int64)
        return (3 * m[:, 0] + m[:, 1]) % 10

    def symbol_of(self, points):
        pts = np.atleast_2d(points)
        sym = self._linear_symbols(pts)
        sym[self.in_hole(pts)] = -1
        return sym

    def _linear_margin(self, symbol: int, points) -> np.ndarray:
        """Signed L2 clearance to the torus cell of ``symbol``.

        Computed in the image coordinates y = A x, where the cells are
        the unit boxes around lattice points of the symbol; the conformal
        factor sqrt(10) converts the L-infinity clearance back to a valid
        Euclidean clearance for x.
        """
        y = centered(points) @ _A2.T
        diffs = np.abs(y[:, None, :] - _REPS[symbol][None, :, :]).max(axis=2)
        return (0.5 - diffs.min(axis=1)) / SQRT10

    def cell_margin(self, symbol, points):
        return self._linear_margin(symbol, np.atleast_2d(points))

    def _linear_preimages(self, points) -> np.ndarray:
        """The ten candidate linear preimages, centered, shape (N, 10, 2)."""
        y = centered(points)
        cand = (y[:, None, :] + _COSETS[None, :, :]) @ _A2_INV.T
        return (cand + 0.5) % 1.0 - 0.5


def _select_matching_preimage(system, symbol, candidates):
    """Pick, per point, the candidate preimage carrying the wanted symbol."""
    n, k, d = candidates.shape
    flat = wrap(candidates.reshape(n * k, d))
    match = (system.symbol_of(flat) == symbol).reshape(n, k)
    out = np.full((n, d), np.nan)
    rows, cols = np.nonzero(match)
    out[rows] = flat.reshape(n, k, d)[rows, cols]
    return out


class LinearToy2D(_TenBranchTorus):
    """The undeformed conformal endomorphism, full shift on ten symbols."""

    mu_f = 0.0
    S = 1.0 / SQRT10
    hole = None
    delta_mu = 0.0
    label = "linear-toy-2d"

    def step(self, points):
        return wrap(centered(points) @ _A2.T)

    def deriv_inverse_norm(self, points):
        return np.full(len(np.atleast_2d(points)), 1.0 / SQRT10)

    def jacobian_matrices(self, points):
        return np.broadcast_to(_A2, (len(np.atleast_2d(points)), 2, 2)).copy()

    def lambda_min(self, symbol):
        return 0.5 * np.log(10.0)

    def lip_bound(self, points, rad):
        return np.full(len(np.atleast_2d(points)), SQRT10)

    def inverse_branch(self, symbol, points):
        return _select_matching_preimage(
            self, symbol, self._linear_preimages(np.atleast_2d(points)))


class HopfModel2D(_TenBranchTorus):
    """Planar hole model: linear action outside a disk, radial dip inside.

    Inside the deformation disk of squared radius delta0 the map is, in
    polar coordinates, (rho, theta) -> (Phi(rho^2) rho, theta + alpha)
    with alpha the rotation angle of the linear action.  For mu > 0 the
    profile dips below 1 at the origin, making it attracting; the hole is
    the open disk bounded by the radially neutral circle rho_inv.

    Derived constants: b1 = Phi'(mu, 0); mu_f = pi rho_inv^2 (exact disk
    area); K_mu = mu / mu_f; family constant K = inf K_mu over a positive
    mu grid; threshold coefficient c0 = K / 256; delta_mu = K mu_f is the
    effective argument of the depth-volume bound for this family.
    """

    label = "hopf-2d"

    def __init__(self, mu: float, *, delta0: float = 0.02, delta1: float = 0.01,
                 sigma1: float = 1.2, slope: float = 60.0, quad: float = 0.0):
        self.mu = float(mu)
        self.sigma = SQRT10
        self.alpha = float(np.arctan2(1.0, 3.0))
        self.profile = build_phi(self.mu, SQRT10, delta0, delta1, sigma1,
                                 slope=slope, quad=quad)
        self.delta0, self.delta1 = delta0, delta1
        self.b1 = float(self.profile.derivative(0.0))
        self.rho_inv = circle_radius(self.profile)
        self.w_star = self.rho_inv ** 2
        self.mu_f = float(np.pi) * self.rho_inv ** 2
        self.K_mu = self.mu / self.mu_f if self.mu_f > 0 else float("nan")

        def rescale(m):
            prof = build_phi(m, SQRT10, delta0, delta1, sigma1, slope=slope, quad=quad)
            return m / (np.pi * circle_radius(prof) ** 2)

        grid = np.geomspace(1e-4, 0.1, 17)
        self.K = min(rescale(m) for m in grid)
        self.c0 = self.K / 256.0
        self.delta_mu = self.K * self.mu_f
        self.S = 1.0 / float(self.profile.value(self.w_star))

        if self.mu > 0:
            rho = self.rho_inv
            self.hole = Region(
                contains=lambda p: np.sum(centered(p) ** 2, axis=1) < rho * rho,
                bounding_box=np.array([[0.0, 1.0], [0.0, 1.0]]),
                volume=self.mu_f, label="attracting-basin-disk")
        else:
            self.hole = None
        self._trap_checked = None

    # ------------------------------------------------------------- local

    def _w(self, points):
        p = centered(np.atleast_2d(points))
        return p, np.sum(p * p, axis=1)

    def step(self, points):
        p, w = self._w(points)
        scale = np.ones(len(p))
        inside = w < self.delta0
        scale[inside] = self.profile.value(w[inside]) / self.sigma
        return wrap((p * scale[:, None]) @ _A2.T)

    def deriv_inverse_norm(self, points):
        _, w = self._w(points)
        return 1.0 / self.profile.value(np.minimum(w, self.delta0))

    def log_least_stretch(self, points):
        _, w = self._w(points)
        return np.log(self.profile.value(np.minimum(w, self.delta0)))

    def singular_values(self, points):
        """(least, greatest) singular values of Df: (Phi, Phi + 2 w Phi')."""
        _, w = self._w(points)
        w = np.minimum(w, self.delta0)
        return self.profile.value(w), self.profile.stretch(w)

    def jacobian_log(self, points):
        lo, hi = self.singular_values(points)
        return np.log(lo) + np.log(hi)

    def jacobian_matrices(self, points):
        p, w = self._w(points)
        val = self.profile.value(np.minimum(w, self.delta0))
        dval = np.where(w < self.delta0, self.profile.derivative(w), 0.0)
        eye = np.broadcast_to(np.eye(2), (len(p), 2, 2))
        dh = (val / self.sigma)[:, None, None] * eye \
            + (2 * dval / self.sigma)[:, None, None] * (p[:, :, None] * p[:, None, :])
        return _A2 @ dh

    def lambda_min(self, symbol):
        if symbol == 0:
            # infimum of log Phi over the cell minus the hole: attained on
            # the neutral circle (mu > 0) or at the origin (mu <= 0)
            return 0.0 if self.mu > 0 else float(np.log(1 - self.mu))
        return 0.5 * float(np.log(10.0))

    def lip_bound(self, points, rad):
        p, w = self._w(points)
        dist = np.sqrt(w)
        lo = np.maximum(dist - rad, 0.0) ** 2
        hi = (dist + rad) ** 2
        return self.profile.stretch_bound(lo, hi)

    def cell_margin(self, symbol, points):
        pts = np.atleast_2d(points)
        margin = self._linear_margin(symbol, pts)
        if symbol == 0 and self.mu > 0:
            _, w = self._w(pts)
            margin = np.minimum(margin, np.sqrt(w) - self.rho_inv)
        return margin

    def inverse_branch(self, symbol, points):
        cand = self._linear_preimages(np.atleast_2d(points))
        n, k, _ = cand.shape
        flat = cand.reshape(n * k, 2)
        dist = np.sqrt(np.sum(flat * flat, axis=1))
        need = dist < np.sqrt(self.delta0)
        if need.any():
            flat[need] = self._radial_preimage(flat[need], dist[need])
        sel = _select_matching_preimage(self, symbol, flat.reshape(n, k, 2))
        return sel

    def _radial_preimage(self, p, dist):
        """Invert rho -> Phi(rho^2) rho / sigma on the deformation disk."""
        lo = np.zeros(len(p))
        hi = np.full(len(p), np.sqrt(self.delta0))
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            val = self.profile.value(mid * mid) * mid / self.sigma
            toolow = val < dist
            lo[toolow] = mid[toolow]
            hi[~toolow] = mid[~toolow]
        rho = 0.5 * (lo + hi)
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(dist[:, None] > 0, p / dist[:, None], 0.0)
        return unit * rho[:, None]

    # ----------------------------------------------------------- escapes

    def default_trap(self) -> "TrapRegion":
        return disk_trap(self.rho_inv / 2.0)


# =====================================================================
# spatial model
# =====================================================================

_A3 = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, -10.0, 0.0]])


def _eigensplit(matrix):
    """(lam, sigma, alpha, P): real contracting eigenvalue, expanding
    modulus and rotation, and the real change of basis with
    A P = P blockdiag(sigma R_alpha, lam)."""
    vals, vecs = np.linalg.eig(matrix)
    real_idx = int(np.argmin(np.abs(vals.imag)))
    lam = float(vals[real_idx].real)
    pair_idx = [i for i in range(3) if i != real_idx]
    cplx = vals[pair_idx[0]]
    if cplx.imag < 0:
        cplx = np.conj(cplx)
        u = np.conj(vecs[:, pair_idx[0]])
    else:
        u = vecs[:, pair_idx[0]]
    sigma = float(np.abs(cplx))
    alpha = float(np.angle(cplx))
    v = vecs[:, real_idx].real
    v = v / np.linalg.norm(v)
    P = np.column_stack([u.real, -u.imag, v])
    return lam, sigma, alpha, P


class HopfModel3D:
    """Deformation of a volume-preserving toral automorphism on T^3.

    The linear part has one contracting real eigenvalue and an expanding
    complex pair; the radial profile dips the expanding plane's factor
    near the origin exactly as in the planar model, with the deformation
    blended away in the contracting direction so it stays compactly
    supported.  Exposes forward dynamics, derivative norms, and the
    trapping region; no symbolic coding (escape-time box counting only).
    """

    d = 3
    label = "hopf-3d"

    def __init__(self, mu: float, *, delta0: float = 0.02, delta1: float = 0.01,
                 sigma1: float = 1.2, slope: float = 60.0, quad: float = 0.0):
        self.mu = float(mu)
        self.lam, self.sigma, self.alpha, self.P = _eigensplit(_A3)
        self._certify_spectrum()
        self.P_inv = np.linalg.inv(self.P)
        rot = np.array([[np.cos(self.alpha), -np.sin(self.alpha), 0.0],
                        [np.sin(self.alpha), np.cos(self.alpha), 0.0],
                        [0.0, 0.0, 1.0]])
        self.M = rot * np.array([self.sigma, self.sigma, self.lam])[None, :]
        if not np.allclose(_A3 @ self.P, self.P @ self.M, atol=1e-10):
            raise RuntimeError("eigenbasis does not block-diagonalize the matrix")
        self.PM = self.P @ self.M

        self.profile = build_phi(self.mu, self.sigma, delta0, delta1, sigma1,
                                 slope=slope, quad=quad)
        self.delta0, self.delta1 = delta0, delta1
        self.b1 = float(self.profile.derivative(0.0))
        self.rho_inv = circle_radius(self.profile)
        self._trap_checked = None

    def _certify_spectrum(self):
        det = float(np.linalg.det(_A3))
        if abs(abs(det) - 1.0) > 1e-10:
            raise RuntimeError(f"determinant {det} is not unimodular")
        if abs(self.lam * self.sigma ** 2 - 1.0) > 1e-10:
            raise RuntimeError("eigenvalue product certificate failed")
        if not (0 < self.lam < 1.0 / 9.0 and self.sigma > 3.0):
            raise RuntimeError("spectrum outside the required windows")
        for k in range(1, 5):
            if min(abs(k * self.alpha % (2 * np.pi)),
                   2 * np.pi - (k * self.alpha % (2 * np.pi))) < 1e-2:
                raise RuntimeError(f"resonant rotation angle at order {k}")

    def _coords(self, points):
        p = centered(np.atleast_2d(points))
        c = p @ self.P_inv.T
        w = c[:, 0] ** 2 + c[:, 1] ** 2
        return c, w, c[:, 2]

    def step(self, points):
        c, w, z = self._coords(points)
        inside = (w < self.delta0) & (np.abs(z) < self.delta0)
        scale = np.ones(len(c))
        if inside.any():
            val, _, _ = profile_3d(self.profile, w[inside], z[inside])
            scale[inside] = val / self.sigma
        h = c.copy()
        h[:, 0] *= scale
        h[:, 1] *= scale
        return wrap(h @ self.PM.T)

    def jacobian_matrices(self, points):
        c, w, z = self._coords(points)
        val, dw, dz = profile_3d(self.profile, w, z)
        outside = (w >= self.delta0) | (np.abs(z) >= self.delta0)
        val = np.where(outside, self.sigma, val)
        dw = np.where(outside, 0.0, dw)
        dz = np.where(outside, 0.0, dz)
        n = len(c)
        dh = np.zeros((n, 3, 3))
        s = val / self.sigma
        for i in (0, 1):
            for j in (0, 1):
                dh[:, i, j] = (2 * dw / self.sigma) * c[:, i] * c[:, j]
            dh[:, i, i] += s
            dh[:, i, 2] = (dz / self.sigma) * c[:, i]
        dh[:, 2, 2] = 1.0
        return self.PM @ dh @ self.P_inv

    def deriv_inverse_norm(self, points):
        sv = np.linalg.svd(self.jacobian_matrices(points), compute_uv=False)
        return 1.0 / sv[:, -1]

    def default_trap(self) -> "TrapRegion":
        return cylinder_trap(self)


# =====================================================================
# trapping regions and escape times
# =====================================================================

@dataclass(frozen=True)
class TrapRegion:
    """A region around the attracting fixed point used for escape detection."""

    contains: callable
    boundary_sample: callable
    empty: bool
    label: str = "trap"


def disk_trap(radius: float) -> TrapRegion:
    def contains(points):
        p = centered(np.atleast_2d(points))
        return np.sum(p * p, axis=1) <= radius * radius

    def boundary_sample(count, seed=0):
        theta = np.linspace(0, 2 * np.pi, count, endpoint=False)
        return wrap(radius * np.stack([np.cos(theta), np.sin(theta)], axis=1))

    return TrapRegion(contains=contains, boundary_sample=boundary_sample,
                      empty=radius <= 0, label=f"disk-trap r={radius:.6g}")


def cylinder_trap(model: HopfModel3D) -> TrapRegion:
    """Solid cylinder {rho <= rho_inv/2, |z| <= delta0/2} in eigencoordinates."""
    r = model.rho_inv / 2.0
    zmax = model.delta0 / 2.0

    def contains(points):
        _, w, z = model._coords(points)
        return (w <= r * r) & (np.abs(z) <= zmax)

    def boundary_sample(count, seed=0):
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        n_side = count // 2
        n_cap = count - n_side
        theta = rng.uniform(0, 2 * np.pi, n_side)
        zs = rng.uniform(-zmax, zmax, n_side)
        side = np.stack([r * np.cos(theta), r * np.sin(theta), zs], axis=1)
        theta = rng.uniform(0, 2 * np.pi, n_cap)
        rr = r * np.sqrt(rng.uniform(0, 1, n_cap))
        caps = np.stack([rr * np.cos(theta), rr * np.sin(theta),
                         np.where(rng.random(n_cap) < 0.5, zmax, -zmax)], axis=1)
        return wrap(np.concatenate([side, caps]) @ model.P.T)

    return TrapRegion(contains=contains, boundary_sample=boundary_sample,
                      empty=r <= 0, label=f"cylinder-trap r={r:.6g} z={zmax:.6g}")


def verify_trap(model, trap: TrapRegion, samples: int = 10_000, seed: int = 0) -> bool:
    """Forward-invariance of the trap, sampled on its boundary."""
    if trap.empty:
        return True
    pts = trap.boundary_sample(samples, seed)
    return bool(trap.contains(model.step(pts)).all())


def escape_time(model, points, horizon: int, trap: TrapRegion | None = None):
    """Iterate points and detect entry into the trapping region.

    Returns ``(survives, steps)``: a boolean per point that never entered
    the trap within ``horizon`` iterations, and the entry step (or the
    horizon for survivors).  The trap's forward invariance is verified
    once per model by boundary sampling; a failed verification downgrades
    the run (``model.trap_advisory`` set), it does not raise.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if trap is None:
        trap = model.default_trap()
    if getattr(model, "_trap_checked", None) is None:
        model._trap_checked = verify_trap(model, trap)
    model.trap_advisory = not model._trap_checked

    n = len(pts)
    steps = np.full(n, horizon, dtype=np.int64)
    survives = np.ones(n, dtype=bool)
    if trap.empty:
        return survives, steps

    active_idx = np.arange(n)
    pos = pts.copy()
    caught = trap.contains(pos)
    if caught.any():
        survives[active_idx[caught]] = False
        steps[active_idx[caught]] = 0
        pos, active_idx = pos[~caught], active_idx[~caught]
    for t in range(1, horizon + 1):
        if len(pos) == 0:
            break
        pos = model.step(pos)
        caught = trap.contains(pos)
        if caught.any():
            survives[active_idx[caught]] = False
            steps[active_idx[caught]] = t
            pos, active_idx = pos[~caught], active_idx[~caught]
    return survives, steps


def survivor_grid(model, grid_n: int, horizon: int, trap: TrapRegion | None = None):
    """Grid points whose orbits avoid the trap for ``horizon`` steps."""
    axes = [(np.arange(grid_n) + 0.5) / grid_n] * model.d
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    survives, _ = escape_time(model, pts, horizon, trap)
    return pts[survives]


# =====================================================================
# 1D families
# =====================================================================

class TriplingToy(MapWithHoles):
    """x -> 3x mod 1 with the middle-thirds interval as hole."""

    d = 1
    n_branches = 2
    mu_f = 1.0 / 3.0
    S = 1.0 / 3.0
    eta = 2
    delta_mu = 1.0 / 3.0
    label = "tripling-with-hole"

    CELLS = ((0.0, 1.0 / 3.0), (2.0 / 3.0, 1.0))

    def __init__(self):
        self.hole = Region(
            contains=lambda p: (p[:, 0] > 1.0 / 3.0) & (p[:, 0] < 2.0 / 3.0),
            bounding_box=np.array([[1.0 / 3.0, 2.0 / 3.0]]),
            volume=1.0 / 3.0, label="middle-third")

    def step(self, points):
        return wrap(np.atleast_2d(points) * 3.0)

    def symbol_of(self, points):
        x = np.atleast_2d(points)[:, 0]
        sym = np.full(len(x), -1, dtype=np.int64)
        sym[x <= 1.0 / 3.0] = 0
        sym[x >= 2.0 / 3.0] = 1
        return sym

    def deriv_inverse_norm(self, points):
        return np.full(len(np.atleast_2d(points)), 1.0 / 3.0)

    def jacobian_matrices(self, points):
        return np.full((len(np.atleast_2d(points)), 1, 1), 3.0)

    def cell_margin(self, symbol, points):
        return _interval_margin(np.atleast_2d(points)[:, 0], *self.CELLS[symbol])

    def lambda_min(self, symbol):
        return float(np.log(3.0))

    def lip_bound(self, points, rad):
        return np.full(len(np.atleast_2d(points)), 3.0)

    def inverse_branch(self, symbol, points):
        y = np.atleast_2d(points)
        return (y + 2.0 * symbol) / 3.0

    def cell_bbox(self, symbol):
        return np.array([list(self.CELLS[symbol])])


def _interval_margin(x, a, b):
    """Signed circle-distance clearance to the arc [a, b] of T^1."""
    inside = (x >= a) & (x <= b)
    d_in = np.minimum(x - a, b - x)
    da = np.minimum(np.abs(x - a), 1 - np.abs(x - a))
    db = np.minimum(np.abs(x - b), 1 - np.abs(x - b))
    return np.where(inside, d_in, -np.minimum(da, db))


class DiazVianaFamily(MapWithHoles):
    """Degree-two circle covering with a hole segment of length sqrt(t).

    The hole is the arc of length 2r = sqrt(t) centered at 0; on the
    complementary arc [r, 1-r] the map lifts to

        F(u) = r + c1 (u - r) + c2 [(u - r) - (L/2pi) sin(2pi (u - r)/L)]

    with L = 1 - 2r, c1 = 1 + sqrt(t) and c2 fixed by degree two.  The
    derivative c1 + c2 (1 - cos(...)) attains its minimum c1 > 1 exactly
    at the hole-adjacent endpoints, so the expansion margin over the whole
    domain is sqrt(t).  The second branch maps onto the domain arc exactly:
    hole points have no preimage through it.
    """

    d = 1
    n_branches = 2
    eta = 2
    label = "diaz-viana-1d"

    def __init__(self, t: float, c0: float = 0.25):
        if not (0 < t < 1):
            raise ValueError("parameter t must lie in (0, 1): "
                             "at t = 1 the hole covers the whole circle")
        self.t = float(t)
        self.r = 0.5 * np.sqrt(self.t)
        self.L = 1.0 - 2.0 * self.r
        self.c1 = 1.0 + np.sqrt(self.t)
        self.c2 = (2.0 - 2.0 * self.r) / self.L - self.c1
        if self.c2 <= 0:
            raise ValueError("degree-two closure failed (c2 <= 0)")
        self.mu_f = 2.0 * self.r
        self.delta_mu = self.mu_f
        self.S = 1.0 / self.c1
        self.c0 = float(c0)
        r = self.r
        self.hole = Region(
            contains=lambda p: np.abs(centered(p)[:, 0]) < r,
            bounding_box=np.array([[0.0, 1.0]]), volume=2 * r, label="hole-arc")
        self.u_mid = self._solve_lift(1.0 + self.r)
        self.cells = ((self.r, self.u_mid), (self.u_mid, 1.0 - self.r))

    def lift(self, u):
        s = np.asarray(u, dtype=float) - self.r
        return (self.r + self.c1 * s
                + self.c2 * (s - self.L / (2 * np.pi) * np.sin(2 * np.pi * s / self.L)))

    def derivative(self, u):
        s = np.asarray(u, dtype=float) - self.r
        return self.c1 + self.c2 * (1.0 - np.cos(2 * np.pi * s / self.L))

    def _solve_lift(self, target, lo=None, hi=None):
        lo = self.r if lo is None else lo
        hi = 1.0 - self.r if hi is None else hi
        lo = np.full_like(np.asarray(target, dtype=float), lo, dtype=float)
        hi = np.full_like(lo, hi)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            low = self.lift(mid) < target
            lo = np.where(low, mid, lo)
            hi = np.where(low, hi, mid)
        out = 0.5 * (lo + hi)
        return float(out) if out.ndim == 0 else out

    def step(self, points):
        return wrap(self.lift(np.atleast_2d(points)))

    def symbol_of(self, points):
        x = np.atleast_2d(points)[:, 0]
        sym = np.full(len(x), -1, dtype=np.int64)
        sym[(x >= self.r) & (x <= self.u_mid)] = 0
        sym[(x > self.u_mid) & (x <= 1.0 - self.r)] = 1
        return sym

    def deriv_inverse_norm(self, points):
        return 1.0 / self.derivative(np.atleast_2d(points)[:, 0])

    def jacobian_matrices(self, points):
        return self.derivative(np.atleast_2d(points)[:, 0])[:, None, None]

    def cell_margin(self, symbol, points):
        return _interval_margin(np.atleast_2d(points)[:, 0], *self.cells[symbol])

    def lambda_min(self, symbol):
        # the derivative minimum over either branch sits at a hole-adjacent
        # endpoint where the sine term vanishes, giving exactly c1
        return float(np.log(self.c1))

    def lip_bound(self, points, rad):
        u = np.atleast_2d(points)[:, 0]
        rad = np.broadcast_to(np.asarray(rad, dtype=float), u.shape)
        lo, hi = u - rad, u + rad
        peak = self.r + self.L / 2.0
        cand = np.maximum(self.derivative(lo), self.derivative(hi))
        has_peak = (lo <= peak) & (peak <= hi)
        cand[has_peak] = self.c1 + 2 * self.c2
        return cand

    def inverse_branch(self, symbol, points):
        y = np.atleast_2d(points)[:, 0]
        if symbol == 0:
            target = np.where(y >= self.r, y, y + 1.0)
            return self._solve_lift(target, self.r, self.u_mid)[:, None]
        out = np.full(len(y), np.nan)
        dom = (y >= self.r) & (y <= 1.0 - self.r)
        if dom.any():
            out[dom] = self._solve_lift(y[dom] + 1.0, self.u_mid, 1.0 - self.r)
        return out[:, None]

    def cell_bbox(self, symbol):
        return np.array([list(self.cells[symbol])])


def tripling_toy() -> TriplingToy:
    return TriplingToy()


def linear_toy_2d() -> LinearToy2D:
    return LinearToy2D()


# =====================================================================
# family-level checks
# =====================================================================

def invariant_circle_radius(model, mu: float | None = None) -> float:
    """Radius of the radially neutral circle of a planar/spatial model.

    With no explicit ``mu`` the model's own radius is returned; otherwise
    the profile is rebuilt at ``mu`` with the model's shape parameters and
    the root of Phi(rho^2) = 1 is re-solved (0 for mu <= 0).
    """
    if mu is None:
        return model.rho_inv
    prof = model.profile
    rebuilt = build_phi(mu, prof.sigma, prof.delta0, prof.delta1, prof.sigma1,
                        slope=prof.slope, quad=prof.quad)
    return circle_radius(rebuilt)


@dataclass(frozen=True)
class JacobianCheck:
    """Sampled verification of the two log-Jacobian floor bounds."""

    mu: float
    samples: int
    min_outside_inner_disk: float
    bound_outside_inner_disk: float
    min_outside_hole: float
    bound_outside_hole: float
    analytic_min_outside_hole: float
    mu_cross: float
    counterexamples: tuple

    @property
    def passed(self) -> bool:
        return (self.min_outside_inner_disk >= self.bound_outside_inner_disk
                and self.min_outside_hole >= self.bound_outside_hole)


def jacobian_bounds_check(model: HopfModel2D, samples: int = 100_000,
                          seed: int = 0) -> JacobianCheck:
    """Check the Jacobian floors: 2 log sigma1 outside the inner disk
    {w <= delta1}, and (61/32) mu outside the hole.

    Alongside the sampled minima, reports the analytic infimum of the
    log-Jacobian outside the hole — log of Phi(w*) (Phi(w*) + 2 w* Phi'),
    attained on the neutral circle — and the crossing parameter mu_cross
    where that infimum meets (61/32) mu: above it the second floor fails
    on a thin annulus at the hole boundary, so sampled minima may pass
    while the infimum does not.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    pts = rng.random((samples, 2))
    _, w = model._w(pts)
    logjac = model.jacobian_log(pts)
    mu = model.mu

    outer = w > model.delta1
    bound1 = 2.0 * float(np.log(model.profile.sigma1))
    min1 = float(logjac[outer].min())

    off_hole = ~model.in_hole(pts)
    bound2 = (61.0 / 32.0) * mu
    min2 = float(logjac[off_hole].min())

    wstar = model.w_star
    phi = model.profile
    analytic = float(np.log(phi.value(wstar)) + np.log(phi.stretch(wstar)))

    def gap(m):
        # neutral radius squared solves quad ws^2 + slope ws = m (quadratic
        # zone), where log Phi = 0 and the infimum is log stretch
        if phi.quad == 0:
            ws = m / phi.slope
        else:
            ws = ((-phi.slope + np.sqrt(phi.slope ** 2 + 4 * phi.quad * m))
                  / (2 * phi.quad))
        stretch = 1.0 + 2.0 * ws * (phi.slope + 2.0 * phi.quad * ws)
        return np.log(stretch) - (61.0 / 32.0) * m

    # keep the bracket inside the quadratic zone (ws <= delta1)
    lo, hi = 1e-4, min(0.5, 0.99 * (phi.slope * phi.delta1 + phi.quad * phi.delta1 ** 2))
    mu_cross = float("nan")
    if gap(lo) > 0 > gap(hi):
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            if gap(mid) > 0:
                lo = mid
            else:
                hi = mid
        mu_cross = 0.5 * (lo + hi)

    bad = []
    if min1 < bound1:
        bad.append(("outside-inner-disk", pts[outer][int(np.argmin(logjac[outer]))]))
    if min2 < bound2:
        bad.append(("outside-hole", pts[off_hole][int(np.argmin(logjac[off_hole]))]))
    return JacobianCheck(mu=mu, samples=samples,
                         min_outside_inner_disk=min1, bound_outside_inner_disk=bound1,
                         min_outside_hole=min2, bound_outside_hole=bound2,
                         analytic_min_outside_hole=analytic, mu_cross=mu_cross,
                         counterexamples=tuple(bad))
