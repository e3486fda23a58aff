"""3-D world geometry: RIS element grid, node placement, and distances.

The reflecting surface sits on the Y-Z plane; its element (l_z, l_y) has
its reference vertex at (0, y_offset + l_y*d_ye, l_z*d_ze) for
1 <= l_z, l_y <= n_per_side.  All transmitters and receivers live on the
z = 0 half-plane with x >= 0, i.e. on the front side of the surface.
"""

from dataclasses import dataclass, field

import numpy as np

CELLULAR = "cellular"
D2D = "d2d"

_MAX_SAMPLE_RETRIES = 1000


class ScenarioError(ValueError):
    """Raised when scenario parameters cannot produce a valid layout."""


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    z: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


def distance(a: Position, b: Position) -> float:
    """Euclidean distance in meters."""
    return float(np.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2))


@dataclass(frozen=True)
class RisGeometry:
    """Square reflecting surface with n_per_side x n_per_side elements."""

    n_per_side: int
    d_ye: float = 0.03  # element spacing along Y, meters
    d_ze: float = 0.03  # element spacing along Z, meters
    y_offset: float = 0.0  # deployment position of the reference corner

    def __post_init__(self):
        if self.n_per_side < 1:
            raise ValueError("n_per_side must be >= 1")
        if self.d_ye <= 0 or self.d_ze <= 0:
            raise ValueError("element spacings must be positive")

    @property
    def n_elements(self) -> int:
        return self.n_per_side ** 2

    def element_position(self, l_z: int, l_y: int) -> Position:
        """Vertex of element (l_z, l_y); both indices are 1-based."""
        n = self.n_per_side
        if not (1 <= l_z <= n and 1 <= l_y <= n):
            raise IndexError(f"element index ({l_z}, {l_y}) outside 1..{n}")
        return Position(0.0, self.y_offset + l_y * self.d_ye, l_z * self.d_ze)

    def element_array(self) -> np.ndarray:
        """(n_elements, 3) element positions, l_z-major (row-major) order.

        Flat index k maps to l_z = k // n + 1, l_y = k % n + 1; every module
        that flattens the element grid relies on this order.
        """
        n = self.n_per_side
        lz = np.repeat(np.arange(1, n + 1), n)
        ly = np.tile(np.arange(1, n + 1), n)
        out = np.zeros((n * n, 3))
        out[:, 1] = self.y_offset + ly * self.d_ye
        out[:, 2] = lz * self.d_ze
        return out


@dataclass(frozen=True)
class Link:
    index: int  # 1-based, unique within a scenario
    tx: Position
    rx: Position
    kind: str  # CELLULAR or D2D


@dataclass(frozen=True)
class Rect:
    """Axis-aligned deployment area on the z = 0 plane."""

    x_min: float = 0.0
    x_max: float = 100.0
    y_min: float = -100.0
    y_max: float = 100.0

    def __post_init__(self):
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ScenarioError("deployment area is empty")

    def contains(self, p: Position) -> bool:
        return self.x_min <= p.x <= self.x_max and self.y_min <= p.y <= self.y_max


@dataclass(frozen=True)
class ScenarioParams:
    """Everything needed to sample one network layout."""

    n_d2d: int = 4  # number of D2D pairs sharing the band
    area: Rect = field(default_factory=Rect)
    cellular_distance: float = 10.0  # cellular tx-rx separation, meters
    cellular_x: float = 5.0  # common x-coordinate of the cellular pair
    max_pair_distance: float = 10.0  # D2D tx-rx separation cap, meters

    def __post_init__(self):
        if self.n_d2d < 0:
            raise ScenarioError("n_d2d must be >= 0")
        if self.max_pair_distance <= 0:
            raise ScenarioError("max_pair_distance must be positive")
        if self.cellular_distance <= 0:
            raise ScenarioError("cellular_distance must be positive")
        if self.cellular_x <= 0:
            raise ScenarioError("cellular_x must be positive (front side of the surface)")


@dataclass(frozen=True)
class Scenario:
    links: tuple  # (n_d2d + 1) Link entries, cellular first
    ris: RisGeometry
    area: Rect
    seed: int

    @property
    def n_links(self) -> int:
        return len(self.links)

    def tx_array(self) -> np.ndarray:
        return np.stack([l.tx.as_array() for l in self.links])

    def rx_array(self) -> np.ndarray:
        return np.stack([l.rx.as_array() for l in self.links])


def _cellular_link(params: ScenarioParams, area: Rect) -> Link:
    # Uplink: the user transmits to the base station.  The pair straddles the
    # positive X semi-axis symmetrically, half the separation on either side.
    half = params.cellular_distance / 2.0
    tx = Position(params.cellular_x, -half, 0.0)
    rx = Position(params.cellular_x, half, 0.0)
    for p, name in ((tx, "cellular tx"), (rx, "base station")):
        if not area.contains(p):
            raise ScenarioError(f"{name} at ({p.x}, {p.y}) falls outside the area")
    return Link(index=1, tx=tx, rx=rx, kind=CELLULAR)


def sample_scenario(params: ScenarioParams, ris: RisGeometry, seed) -> Scenario:
    """Draw one network layout; deterministic for a given seed.

    Accepts an integer seed or a numpy SeedSequence (letting callers manage
    substreams).  D2D transmitters are uniform over the area; each receiver
    is uniform in the disk of radius max_pair_distance around its
    transmitter, redrawn until it lands inside the area.
    """
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = np.random.SeedSequence(int(seed))
    rng = np.random.default_rng(ss)
    seed_label = ss.entropy if isinstance(ss.entropy, int) else 0
    area = params.area
    links = [_cellular_link(params, area)]
    for i in range(params.n_d2d):
        tx = Position(
            rng.uniform(area.x_min, area.x_max),
            rng.uniform(area.y_min, area.y_max),
            0.0,
        )
        rx = None
        for _ in range(_MAX_SAMPLE_RETRIES):
            # uniform over the disk: sqrt-radius times random angle
            r = params.max_pair_distance * np.sqrt(rng.uniform())
            phi = rng.uniform(0.0, 2.0 * np.pi)
            cand = Position(tx.x + r * np.cos(phi), tx.y + r * np.sin(phi), 0.0)
            if area.contains(cand) and cand.x >= 0:
                rx = cand
                break
        if rx is None:
            raise ScenarioError(
                f"could not place a D2D receiver near ({tx.x:.2f}, {tx.y:.2f}) "
                f"after {_MAX_SAMPLE_RETRIES} tries"
            )
        links.append(Link(index=i + 2, tx=tx, rx=rx, kind=D2D))
    return Scenario(links=tuple(links), ris=ris, area=area, seed=seed_label)
