"""Order statistics and trimming windows."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DataError, OverTrimmedError, UsageError

TrimMode = Literal["symmetric", "lower", "upper", "explicit"]
TRIM_MODES: tuple[str, ...] = ("symmetric", "lower", "upper", "explicit")


@dataclass(frozen=True)
class TrimSpec:
    """How many order statistics to drop from each end.

    ``symmetric`` removes ``floor(tau * n)`` from both tails, ``lower`` and
    ``upper`` from one tail only. ``explicit`` keeps positions ``k+1 .. l``
    (1-based) regardless of ``n``.
    """

    mode: TrimMode = "symmetric"
    tau: float = 0.0
    k: int | None = None
    l: int | None = None

    def __post_init__(self):
        if self.mode not in TRIM_MODES:
            raise UsageError(f"unknown trim mode {self.mode!r}; expected one of {', '.join(TRIM_MODES)}")
        if self.mode == "explicit":
            if self.k is None or self.l is None:
                raise UsageError("explicit trimming needs both k and l")
            if not 0 <= self.k < self.l:
                raise UsageError(f"explicit trimming needs 0 <= k < l, got k={self.k}, l={self.l}")
        elif not 0.0 <= self.tau < 0.5:
            raise UsageError(f"trimming proportion must lie in [0, 0.5), got {self.tau!r}")

    @classmethod
    def symmetric(cls, tau: float) -> TrimSpec:
        return cls("symmetric", float(tau))

    @classmethod
    def explicit(cls, k: int, l: int) -> TrimSpec:
        return cls("explicit", 0.0, int(k), int(l))

    def with_tau(self, tau: float) -> TrimSpec:
        if self.mode == "explicit":
            return self
        return TrimSpec(self.mode, float(tau))

    def __str__(self) -> str:
        if self.mode == "explicit":
            return f"k={self.k},l={self.l}"
        if self.mode == "symmetric":
            return f"{self.tau:g}"
        return f"{self.mode}:{self.tau:g}"


@dataclass(frozen=True, eq=False)
class TrimmedView:
    """Sorted retained order statistics ``X_(k_n+1) .. X_(l_n)``.

    ``retained`` is a read-only array; views are safe to share.
    """

    retained: np.ndarray
    k_n: int
    l_n: int
    n: int
    tau: float | None = None
    mode: TrimMode = "symmetric"

    @property
    def n_tau(self) -> int:
        return self.l_n - self.k_n

    @property
    def is_untrimmed(self) -> bool:
        return self.k_n == 0 and self.l_n == self.n

    def __len__(self) -> int:
        return self.n_tau


def trim_indices(n: int, spec: TrimSpec) -> tuple[int, int]:
    """Return ``(k_n, l_n)`` for a sample of size ``n``.

    Raises:
        OverTrimmedError: when fewer than two observations would remain.
    """
    if n < 2:
        raise DataError(f"need at least 2 observations, got {n}")
    if spec.mode == "explicit":
        k, l = spec.k, spec.l
        if l > n:
            raise OverTrimmedError(f"explicit window l={l} exceeds sample size {n}")
    else:
        # round first so decimal proportions like 0.29 * 100 give 29, not 28
        cut = math.floor(round(spec.tau * n, 9))
        if spec.mode == "symmetric":
            k, l = cut, n - cut
        elif spec.mode == "lower":
            k, l = cut, n
        else:
            k, l = 0, n - cut
    if l - k < 2:
        raise OverTrimmedError(
            f"over-trimmed: {spec} on n={n} keeps {l - k} observation(s), need at least 2"
        )
    return k, l


def sort_and_trim(values, spec: TrimSpec) -> TrimmedView:
    """Sort ``values`` and keep the window selected by ``spec``.

    The input is copied, never modified. Ties are kept in position order.

    Raises:
        DataError: non-finite input (names the first offending index).
        OverTrimmedError: fewer than two retained observations.
    """
    arr = np.array(values, dtype=float, copy=True).ravel()
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise DataError(f"non-finite value {arr[i]!r} at index {i}", index=i)
    k, l = trim_indices(arr.size, spec)
    arr.sort(kind="stable")
    kept = arr[k:l].copy()
    kept.flags.writeable = False
    tau = None if spec.mode == "explicit" else spec.tau
    return TrimmedView(retained=kept, k_n=k, l_n=l, n=arr.size, tau=tau, mode=spec.mode)
