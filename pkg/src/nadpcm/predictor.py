"""10-2-1 MLP subband predictor and its backward-adaptive training.

Parameter vector layout (25 entries), used by the Jacobian and the trainer:

    [0:20]   hidden weights, row-major: theta[j*10 + i] = w_hidden[j, i]
    [20:22]  hidden biases
    [22:24]  output weights
    [24]     output bias

The training kernels are compiled with numba and written as plain loops so
that the floating-point evaluation order is fixed. Encoder and decoder
call the same kernels on the same decoded data and therefore obtain
bit-identical weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .rng import SplitMix64

ORDER = 10
HIDDEN = 2
NUM_PARAMS = HIDDEN * ORDER + HIDDEN + HIDDEN + 1

MAX_EPOCHS = 50
NUM_STARTS = 4

MU_INITIAL = 1e-3
MU_FACTOR = 10.0
MU_MAX = 1e10
RETRY_CAP = 5

NW_SCALE = 0.7 * HIDDEN ** (1.0 / ORDER)
OUTPUT_INIT_RANGE = 0.1

# lm epoch status codes
ACCEPTED, STALLED, MU_CEILING = 0, 1, 2


@dataclass(frozen=True, eq=False)
class MlpWeights:
    w_hidden: np.ndarray
    b_hidden: np.ndarray
    w_out: np.ndarray
    b_out: float

    def to_vector(self) -> np.ndarray:
        return np.concatenate([
            np.ravel(self.w_hidden), np.ravel(self.b_hidden),
            np.ravel(self.w_out), [self.b_out],
        ]).astype(np.float64)

    @classmethod
    def from_vector(cls, theta) -> MlpWeights:
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (NUM_PARAMS,):
            raise ValueError(f"expected {NUM_PARAMS} parameters, got {theta.shape}")
        return cls(
            w_hidden=theta[:20].reshape(HIDDEN, ORDER).copy(),
            b_hidden=theta[20:22].copy(),
            w_out=theta[22:24].copy(),
            b_out=float(theta[24]),
        )

    @classmethod
    def zeros(cls) -> MlpWeights:
        return cls.from_vector(np.zeros(NUM_PARAMS))

    def __eq__(self, other):
        if not isinstance(other, MlpWeights):
            return NotImplemented
        return self.to_vector().tobytes() == other.to_vector().tobytes()

    __hash__ = None


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def mlp_forward(w: MlpWeights, x):
    """Network output for one input window (shape (10,)) or a batch (N, 10)."""
    x = np.asarray(x, dtype=np.float64)
    h = sigmoid(x @ w.w_hidden.T + w.b_hidden)
    out = h @ w.w_out + w.b_out
    return float(out) if x.ndim == 1 else out


def mlp_jacobian(w: MlpWeights, X) -> np.ndarray:
    """d(output_i)/d(theta) for every row of ``X``; shape (N, 25)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    J = np.empty((X.shape[0], NUM_PARAMS))
    _jacobian(w.to_vector(), np.ascontiguousarray(X), J)
    return J


# numba kernels


@njit(cache=True, nogil=True)
def _sig(z):
    return 1.0 / (1.0 + math.exp(-z))


@njit(cache=True, nogil=True)
def _forward(theta, X, out):
    n = X.shape[0]
    for r in range(n):
        acc = theta[24]
        for j in range(HIDDEN):
            a = theta[20 + j]
            for i in range(ORDER):
                a += theta[j * ORDER + i] * X[r, i]
            acc += theta[22 + j] * _sig(a)
        out[r] = acc


@njit(cache=True, nogil=True)
def _sse(theta, X, y, tmp):
    _forward(theta, X, tmp)
    s = 0.0
    for r in range(X.shape[0]):
        d = y[r] - tmp[r]
        s += d * d
    return s


@njit(cache=True, nogil=True)
def _jacobian(theta, X, J):
    for r in range(X.shape[0]):
        for j in range(HIDDEN):
            a = theta[20 + j]
            for i in range(ORDER):
                a += theta[j * ORDER + i] * X[r, i]
            h = _sig(a)
            dh = theta[22 + j] * h * (1.0 - h)
            for i in range(ORDER):
                J[r, j * ORDER + i] = dh * X[r, i]
            J[r, 20 + j] = dh
            J[r, 22 + j] = h
        J[r, 24] = 1.0


@njit(cache=True, nogil=True)
def _cholesky_solve(A, b, L, out):
    """Solve A x = b for SPD A; returns False if a pivot is not positive."""
    n = A.shape[0]
    for i in range(n):
        for j in range(i + 1):
            s = A[i, j]
            for k in range(j):
                s -= L[i, k] * L[j, k]
            if i == j:
                if not (s > 0.0):
                    return False
                L[i, i] = math.sqrt(s)
            else:
                L[i, j] = s / L[j, j]
    for i in range(n):
        s = b[i]
        for k in range(i):
            s -= L[i, k] * out[k]
        out[i] = s / L[i, i]
    for i in range(n - 1, -1, -1):
        s = out[i]
        for k in range(i + 1, n):
            s -= L[k, i] * out[k]
        out[i] = s / L[i, i]
    return True


@njit(cache=True, nogil=True)
def _lm_epoch(theta, X, y, sse, mu, mu_factor, mu_max, retry_cap):
    """One Levenberg-Marquardt epoch.

    Returns (status, new_theta, new_sse, new_mu, rejections). On acceptance
    mu is divided by ``mu_factor``; every rejected trial multiplies it by
    ``mu_factor`` before retrying.
    """
    n = X.shape[0]
    p = theta.shape[0]
    J = np.empty((n, p))
    _jacobian(theta, X, J)
    tmp = np.empty(n)
    _forward(theta, X, tmp)
    e = np.empty(n)
    for r in range(n):
        e[r] = y[r] - tmp[r]
    H = np.zeros((p, p))
    g = np.zeros(p)
    for a in range(p):
        for c in range(a + 1):
            s = 0.0
            for r in range(n):
                s += J[r, a] * J[r, c]
            H[a, c] = s
            H[c, a] = s
        s = 0.0
        for r in range(n):
            s += J[r, a] * e[r]
        g[a] = s
    A = np.empty((p, p))
    L = np.zeros((p, p))
    delta = np.empty(p)
    cand = np.empty(p)
    rejections = 0
    while True:
        for a in range(p):
            for c in range(p):
                A[a, c] = H[a, c]
            A[a, a] += mu
        if _cholesky_solve(A, g, L, delta):
            finite = True
            for a in range(p):
                cand[a] = theta[a] + delta[a]
                if not math.isfinite(cand[a]):
                    finite = False
            if finite:
                new_sse = _sse(cand, X, y, tmp)
                if new_sse < sse:
                    return ACCEPTED, cand, new_sse, mu / mu_factor, rejections
        rejections += 1
        mu = mu * mu_factor
        if mu > mu_max:
            return MU_CEILING, theta, sse, mu, rejections
        if rejections > retry_cap:
            return STALLED, theta, sse, mu, rejections


@njit(cache=True, nogil=True)
def _lm_run(theta0, Xtr, ytr, Xva, yva, Xte, yte, max_epochs,
            mu0, mu_factor, mu_max, retry_cap):
    p = theta0.shape[0]
    snaps = np.empty((max_epochs, p))
    tr_mse = np.empty(max_epochs)
    va_mse = np.empty(max_epochs)
    te_mse = np.empty(max_epochs)
    theta = theta0.copy()
    tmp = np.empty(max(Xtr.shape[0], Xva.shape[0], Xte.shape[0]))
    sse = _sse(theta, Xtr, ytr, tmp)
    mu = mu0
    count = 0
    for _ in range(max_epochs):
        status, theta, sse, mu, _rej = _lm_epoch(
            theta, Xtr, ytr, sse, mu, mu_factor, mu_max, retry_cap)
        if status != ACCEPTED:
            break
        snaps[count] = theta
        tr_mse[count] = sse / Xtr.shape[0]
        va_mse[count] = _sse(theta, Xva, yva, tmp) / Xva.shape[0] if Xva.shape[0] else 0.0
        te_mse[count] = _sse(theta, Xte, yte, tmp) / Xte.shape[0] if Xte.shape[0] else 0.0
        count += 1
    return snaps[:count], tr_mse[:count], va_mse[:count], te_mse[:count]


# training


@dataclass(frozen=True)
class LmEpoch:
    epoch: int
    weights: MlpWeights
    train_mse: float


def lm_epoch(w: MlpWeights, X, y, mu: float = MU_INITIAL):
    """Single LM epoch from ``w``; returns (status, weights, train_sse, mu, rejections)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    theta = w.to_vector()
    sse = _sse(theta, X, y, np.empty(X.shape[0]))
    status, theta, sse, mu, rej = _lm_epoch(theta, X, y, sse, mu, MU_FACTOR, MU_MAX, RETRY_CAP)
    return int(status), MlpWeights.from_vector(theta), float(sse), float(mu), int(rej)


def lm_train(w0: MlpWeights, X, y, max_epochs: int = MAX_EPOCHS) -> list[LmEpoch]:
    """Train with Levenberg-Marquardt, returning a snapshot after every accepted epoch.

    Training stops early when an epoch exhausts its retries or mu passes
    its ceiling; the snapshots gathered so far are returned.
    """
    if not 0 < max_epochs <= MAX_EPOCHS:
        raise ValueError(f"max_epochs must be in 1..{MAX_EPOCHS}")
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    empty_x = np.empty((0, ORDER))
    empty_y = np.empty(0)
    snaps, tr, _, _ = _lm_run(w0.to_vector(), X, y, empty_x, empty_y, empty_x, empty_y,
                              max_epochs, MU_INITIAL, MU_FACTOR, MU_MAX, RETRY_CAP)
    return [LmEpoch(i + 1, MlpWeights.from_vector(s), float(m))
            for i, (s, m) in enumerate(zip(snaps, tr))]


def nguyen_widrow_init(seed: int) -> MlpWeights:
    """Nguyen-Widrow hidden layer, small uniform output layer; fully seeded.

    Each hidden row is a random direction rescaled to norm
    ``0.7 * H ** (1 / F)``; hidden biases are uniform in ``[-beta, beta]``.
    """
    rng = SplitMix64(seed)
    w_hidden = np.empty((HIDDEN, ORDER))
    for j in range(HIDDEN):
        while True:
            row = np.array([rng.uniform(-1.0, 1.0) for _ in range(ORDER)])
            norm = math.sqrt(float(row @ row))
            if norm > 1e-12:
                break
        w_hidden[j] = row * (NW_SCALE / norm)
    b_hidden = np.array([rng.uniform(-NW_SCALE, NW_SCALE) for _ in range(HIDDEN)])
    w_out = np.array([rng.uniform(-OUTPUT_INIT_RANGE, OUTPUT_INIT_RANGE) for _ in range(HIDDEN)])
    b_out = rng.uniform(-OUTPUT_INIT_RANGE, OUTPUT_INIT_RANGE)
    return MlpWeights(w_hidden, b_hidden, w_out, b_out)


@dataclass(frozen=True)
class TrainingSet:
    """Order-10 sliding windows over a decoded bin track, split 2:1:1 in time."""

    inputs: np.ndarray
    targets: np.ndarray

    @classmethod
    def from_track(cls, track, order: int = ORDER) -> TrainingSet:
        track = np.asarray(track, dtype=np.float64)
        n = track.size - order
        if n < 1:
            raise ValueError(f"track of {track.size} bins is too short for order {order}")
        idx = np.arange(n)[:, None] + np.arange(order)[None, :]
        return cls(np.ascontiguousarray(track[idx]), track[order:].copy())

    def __len__(self):
        return self.targets.size

    @property
    def split_sizes(self) -> tuple[int, int, int]:
        n = len(self)
        n_train, n_val = n // 2, n // 4
        return n_train, n_val, n - n_train - n_val

    def _slice(self, lo, hi):
        return self.inputs[lo:hi], self.targets[lo:hi]

    @property
    def train(self):
        a, _, _ = self.split_sizes
        return self._slice(0, a)

    @property
    def validation(self):
        a, b, _ = self.split_sizes
        return self._slice(a, a + b)

    @property
    def test(self):
        a, b, _ = self.split_sizes
        return self._slice(a + b, len(self))


@dataclass(frozen=True)
class TrainReport:
    chosen_init_index: int
    chosen_epoch: int
    validation_mse: float
    test_mse: float
    weights: MlpWeights
    # per start: accepted-epoch training and validation MSE curves
    train_curves: tuple = field(default=(), repr=False)
    validation_curves: tuple = field(default=(), repr=False)

    @property
    def starts_evaluated(self) -> int:
        return len(self.validation_curves)


def start_seeds(seed_base: int) -> list[int]:
    return [(seed_base + i) & ((1 << 64) - 1) for i in range(1, NUM_STARTS + 1)]


def train_frame(history: TrainingSet, prev_weights: MlpWeights | None,
                seed_base: int, max_epochs: int = MAX_EPOCHS) -> TrainReport:
    """Multi-start, validation-selected LM training on one decoded bin frame.

    Starts 0-2 are Nguyen-Widrow draws seeded ``seed_base + 1..3``. Start 3
    is ``prev_weights`` when given, else a fourth draw (``seed_base + 4``).
    The (start, epoch) snapshot with the lowest validation MSE wins; ties go
    to the lower epoch, then the lower start index.
    """
    n_train, n_val, n_test = history.split_sizes
    if min(n_train, n_val, n_test) < 1:
        raise ValueError(f"training set of {len(history)} samples cannot be split 2:1:1")
    seeds = start_seeds(seed_base)
    inits = [nguyen_widrow_init(s) for s in seeds[:3]]
    inits.append(prev_weights if prev_weights is not None else nguyen_widrow_init(seeds[3]))

    Xtr, ytr = history.train
    Xva, yva = history.validation
    Xte, yte = history.test
    best = None
    train_curves, val_curves = [], []
    for idx, w0 in enumerate(inits):
        snaps, tr, va, te = _lm_run(
            w0.to_vector(), Xtr, ytr, Xva, yva, Xte, yte,
            max_epochs, MU_INITIAL, MU_FACTOR, MU_MAX, RETRY_CAP)
        train_curves.append(tr.copy())
        val_curves.append(va.copy())
        for e in range(va.size):
            key = (va[e], e + 1, idx)
            if best is None or key < best[0]:
                best = (key, snaps[e].copy(), te[e])

    if best is None:
        # no start improved on its initial weights: keep the deterministic start
        theta = inits[3].to_vector()
        va = _sse(theta, Xva, yva, np.empty(n_val)) / n_val
        te = _sse(theta, Xte, yte, np.empty(n_test)) / n_test
        return TrainReport(3, 0, float(va), float(te), inits[3],
                           tuple(train_curves), tuple(val_curves))
    (va, epoch, idx), theta, te = best
    return TrainReport(idx, epoch, float(va), float(te), MlpWeights.from_vector(theta),
                       tuple(train_curves), tuple(val_curves))
