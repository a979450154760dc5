"""Training loop, Adam optimizer and k-fold cross-validation.

Batches are built from a per-epoch shuffled index; each patient runs on its
own tape and contributes loss/B to the accumulated gradients, so one
optimizer step per batch sees the mean-loss gradient regardless of how the
batch divides.  Every random choice (fold assignment, init, shuffling)
derives from the seed, making runs bit-reproducible.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .data import compute_stats, normalize, pad_to_length
from .errors import DataError, NumericError
from .metrics import macro_one_vs_rest
from .model import (
    ModelParams,
    cross_entropy,
    forward,
    one_hot,
    prepare_sample,
)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    batch_size: int = 64
    epochs: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate < 0:
            raise DataError(
                f"train config: negative learning rate {self.learning_rate}"
            )
        if self.batch_size < 1:
            raise DataError(
                f"train config: batch size must be >= 1, got {self.batch_size}"
            )
        if self.epochs < 0:
            raise DataError(
                f"train config: epochs must be >= 0, got {self.epochs}"
            )


class AdamState:
    """First/second moment accumulators, one pair per parameter tensor."""

    def __init__(self, tensors, beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.first = [np.zeros_like(t.data) for t in tensors]
        self.second = [np.zeros_like(t.data) for t in tensors]


def adam_step(named_tensors, state, learning_rate):
    """One bias-corrected Adam update, in place.

    Tensors with no gradient this step (unreachable from the loss) are
    treated as zero-gradient, which decays their moments but leaves the
    values asymptotically put.
    """
    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    bias1 = 1.0 - b1 ** t
    bias2 = 1.0 - b2 ** t
    for i, (name, tensor) in enumerate(named_tensors):
        grad = tensor.grad
        if grad is None:
            grad = np.zeros_like(tensor.data)
        elif not np.all(np.isfinite(grad)):
            raise NumericError(f"non-finite gradient in {name}")
        m = state.first[i]
        v = state.second[i]
        m *= b1
        m += (1.0 - b1) * grad
        v *= b2
        v += (1.0 - b2) * grad * grad
        m_hat = m / bias1
        v_hat = v / bias2
        tensor.data -= learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)


@dataclass
class EpochRecord:
    epoch: int
    mean_loss: float


def train(samples, params, config, train_config):
    """Fit ``params`` on prepared samples; returns the epoch loss log.

    ``params`` is updated in place.  Loss reported per epoch is the mean
    cross-entropy over all patients at the point each was visited.
    """
    samples = list(samples)
    if not samples:
        raise DataError("train: empty training set")
    rng = np.random.default_rng(
        np.random.SeedSequence(train_config.seed, spawn_key=(1,)))
    named = params.named_tensors()
    state = AdamState([t for _, t in named])
    log = []
    n = len(samples)
    for epoch in range(train_config.epochs):
        order = rng.permutation(n)
        loss_total = 0.0
        for start in range(0, n, train_config.batch_size):
            batch = order[start:start + train_config.batch_size]
            inv_b = 1.0 / len(batch)
            params.zero_grads()
            for idx in batch:
                sample = samples[idx]
                with ad.Tape() as tape:
                    probs = forward(sample, params, params.config)
                    onehot = one_hot(sample.label, params.config.n_classes)
                    loss = cross_entropy([probs], onehot[None, :])
                    scaled = ad.scale(loss, inv_b)
                    tape.backward(scaled, leaves=[t for _, t in named])
                loss_total += float(loss.data)
            adam_step(named, state, train_config.learning_rate)
        mean_loss = loss_total / n
        if not np.isfinite(mean_loss):
            raise NumericError(
                f"training diverged: non-finite mean loss at epoch {epoch}"
            )
        log.append(EpochRecord(epoch, mean_loss))
    return log, state


def predict_probs(samples, params):
    """Forward every sample; returns an (N, d) probability matrix."""
    probs = np.empty((len(samples), params.config.n_classes))
    for i, sample in enumerate(samples):
        with ad.Tape():
            out = forward(sample, params, params.config)
        probs[i] = out.data
    return probs


def prepare_cohort(cohort, config):
    """Prepared samples for every patient of an already-padded cohort."""
    return [
        prepare_sample(p.visits, p.static, p.label, config)
        for p in cohort.patients
    ]


@dataclass
class FoldResult:
    fold: int
    test_indices: np.ndarray
    stats: object
    params: ModelParams
    epoch_log: list
    probs: np.ndarray
    labels: np.ndarray
    auroc: object
    auprc: object


@dataclass
class CVResult:
    folds: list
    fold_indices: list

    @property
    def mean_auroc(self):
        return float(np.mean([f.auroc.value for f in self.folds]))

    @property
    def mean_auprc(self):
        return float(np.mean([f.auprc.value for f in self.folds]))


def fold_assignment(n_patients, k, seed):
    """Seeded permutation split into k near-equal disjoint folds."""
    if n_patients < k:
        raise DataError(
            f"cross-validation: {n_patients} patients cannot fill {k} folds"
        )
    if k < 2:
        raise DataError(f"cross-validation: need k >= 2 folds, got {k}")
    rng = np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(0,)))
    permuted = rng.permutation(n_patients)
    return [np.sort(chunk) for chunk in np.array_split(permuted, k)]


def run_fold(cohort, config, train_config, fold, test_indices, param_init=None):
    """Train on everything outside ``test_indices``, evaluate inside.

    Normalization stats come from the training patients only; the held-out
    fold is z-scored with those same stats, never its own.
    """
    test_set = set(int(i) for i in test_indices)
    train_patients = [p for i, p in enumerate(cohort.patients)
                      if i not in test_set]
    test_patients = [p for i, p in enumerate(cohort.patients)
                     if i in test_set]
    stats = compute_stats(train_patients)
    from dataclasses import replace as _replace
    normalized = normalize(
        _replace(cohort, patients=tuple(train_patients + test_patients)),
        stats,
    )
    padded = pad_to_length(normalized, config.t_max)
    n_train = len(train_patients)
    train_cohort = _replace(padded, patients=padded.patients[:n_train])
    test_cohort = _replace(padded, patients=padded.patients[n_train:])
    train_samples = prepare_cohort(train_cohort, config)
    test_samples = prepare_cohort(test_cohort, config)
    fold_seed_rng = np.random.default_rng(
        np.random.SeedSequence(train_config.seed, spawn_key=(2, fold)))
    if param_init is None:
        params = ModelParams.initialized(config, fold_seed_rng)
    else:
        params = param_init(config, fold_seed_rng)
    fold_train_config = TrainConfig(
        learning_rate=train_config.learning_rate,
        batch_size=train_config.batch_size,
        epochs=train_config.epochs,
        seed=int(fold_seed_rng.integers(0, 2 ** 31 - 1)),
    )
    epoch_log, _ = train(train_samples, params, config, fold_train_config)
    probs = predict_probs(test_samples, params)
    labels = np.array([p.label for p in test_patients], dtype=np.int64)
    auroc = macro_one_vs_rest(probs, labels, "auroc")
    auprc = macro_one_vs_rest(probs, labels, "auprc")
    return FoldResult(fold, np.asarray(test_indices), stats, params,
                      epoch_log, probs, labels, auroc, auprc)


def cross_validate(cohort, k, config, train_config, parallel=False,
                   param_init=None):
    """k-fold cross-validation over a raw (unpadded, unnormalized) cohort."""
    folds = fold_assignment(len(cohort.patients), k, train_config.seed)

    def job(fold):
        return run_fold(cohort, config, train_config, fold, folds[fold],
                        param_init)

    if parallel:
        with ThreadPoolExecutor(max_workers=min(k, 8)) as pool:
            results = list(pool.map(job, range(k)))
    else:
        results = [job(fold) for fold in range(k)]
    return CVResult(results, folds)
