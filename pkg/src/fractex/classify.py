"""Gaussian equal-covariance LDA, stratified hold-out, evaluation metrics,
and the ranked-prefix feature selection that yields the reduced descriptors.

The classifier pools the within-class covariance over all classes, adds a
trace-scaled ridge so it stays positive definite in high dimensions, and
derives posteriors from the class-conditional Gaussians with empirical
priors. Feature ranking never sees test data: success rates come from an
internal stratified split of the training set alone.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DatasetError

DEFAULT_RIDGE = 1e-6

_EPS = 1e-9  # unconditional diagonal jitter on the pooled covariance

FEATURE_FLOAT_FORMAT = ".12g"


# ---------------------------------------------------------------------------
# Feature matrices
# ---------------------------------------------------------------------------


@dataclass
class FeatureMatrix:
    """Sample-by-feature matrix with one class label per row."""

    X: np.ndarray
    labels: np.ndarray
    feature_names: list = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=str)
        if self.X.ndim != 2:
            raise ValueError(f"feature matrix must be 2D, got shape {self.X.shape}")
        if len(self.labels) != self.X.shape[0]:
            raise ValueError("one label per row required")
        if not np.all(np.isfinite(self.X)):
            raise ValueError("feature matrix contains NaN or infinite entries")
        if not self.feature_names:
            self.feature_names = [f"f{i}" for i in range(self.X.shape[1])]
        elif len(self.feature_names) != self.X.shape[1]:
            raise ValueError("one feature name per column required")

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    def classes(self):
        return sorted(set(self.labels.tolist()))

    def take_rows(self, idx):
        return FeatureMatrix(self.X[idx], self.labels[idx], list(self.feature_names))

    def take_features(self, idx):
        idx = list(idx)
        return FeatureMatrix(
            self.X[:, idx],
            self.labels,
            [self.feature_names[i] for i in idx],
        )


def features_to_csv(fm):
    lines = [",".join(list(fm.feature_names) + ["label"])]
    for row, label in zip(fm.X, fm.labels):
        cells = [format(v, FEATURE_FLOAT_FORMAT) for v in row]
        cells.append(str(label))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def features_from_csv(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise DatasetError("feature CSV needs a header and at least one row")
    header = lines[0].split(",")
    if header[-1] != "label":
        raise DatasetError("feature CSV must end with a 'label' column")
    names = header[:-1]
    rows, labels = [], []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(header):
            raise DatasetError(f"feature CSV row has {len(cells)} cells, expected {len(header)}")
        try:
            rows.append([float(c) for c in cells[:-1]])
        except ValueError as exc:
            raise DatasetError(f"feature CSV has a non-numeric cell: {exc}") from None
        labels.append(cells[-1])
    return FeatureMatrix(np.array(rows), np.array(labels), names)


# ---------------------------------------------------------------------------
# Stratified hold-out
# ---------------------------------------------------------------------------


def stratified_holdout(features, fraction, seed):
    """Split per class: floor(fraction * count) rows to train, rest to test.

    Both splits keep at least one sample of every class. Row order within
    each split follows the input. Deterministic for a given seed.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"holdout fraction must be in (0, 1), got {fraction}")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for label in features.classes():
        idx = np.flatnonzero(features.labels == label)
        if len(idx) < 2:
            raise DatasetError(f"class {label!r} has {len(idx)} sample(s), need >= 2")
        perm = rng.permutation(idx)
        n_train = int(np.floor(fraction * len(idx)))
        n_train = min(max(n_train, 1), len(idx) - 1)
        train_idx.extend(perm[:n_train].tolist())
        test_idx.extend(perm[n_train:].tolist())
    return features.take_rows(sorted(train_idx)), features.take_rows(sorted(test_idx))


# ---------------------------------------------------------------------------
# LDA
# ---------------------------------------------------------------------------


@dataclass
class LDAModel:
    classes: list
    means: np.ndarray       # (C, d)
    covariance: np.ndarray  # (d, d) pooled within-class, ridged
    priors: np.ndarray      # (C,)
    ridge: float
    precision: np.ndarray   # inverse of the ridged covariance

    @property
    def n_features(self):
        return self.means.shape[1]


def fit_lda(train, ridge=DEFAULT_RIDGE):
    """Fit the pooled-covariance Gaussian discriminant on a feature matrix."""
    if ridge < 0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")
    classes = train.classes()
    if len(classes) < 2:
        raise DatasetError(f"LDA needs >= 2 classes, got {len(classes)}")
    n, d = train.X.shape
    if d == 0:
        raise ValueError("LDA needs at least one feature")

    means = np.empty((len(classes), d))
    priors = np.empty(len(classes))
    scatter = np.zeros((d, d))
    for ci, label in enumerate(classes):
        rows = train.X[train.labels == label]
        means[ci] = rows.mean(axis=0)
        priors[ci] = len(rows) / n
        centered = rows - means[ci]
        scatter += centered.T @ centered
    cov = scatter / max(n - len(classes), 1)
    cov += (ridge * np.trace(cov) / d + _EPS) * np.eye(d)
    precision = np.linalg.inv(cov)
    return LDAModel(
        classes=classes, means=means, covariance=cov,
        priors=priors, ridge=float(ridge), precision=precision,
    )


def _posteriors(model, X):
    # Mahalanobis quadratic per class via the expanded form; the shared
    # covariance normalizer cancels in the softmax.
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.n_features:
        raise ValueError(
            f"feature dimension {X.shape[1]} does not match model ({model.n_features})"
        )
    XP = X @ model.precision
    x_quad = np.einsum("nd,nd->n", XP, X)
    cross = XP @ model.means.T
    m_quad = np.einsum("cd,cd->c", model.means @ model.precision, model.means)
    log_score = np.log(model.priors)[None, :] - 0.5 * (
        x_quad[:, None] - 2.0 * cross + m_quad[None, :]
    )
    log_score -= log_score.max(axis=1, keepdims=True)
    post = np.exp(log_score)
    post /= post.sum(axis=1, keepdims=True)
    return post


def predict_lda(model, x):
    """Label and per-class posteriors for one feature vector.

    Ties go to the lexicographically smallest label (classes are sorted).
    """
    post = _posteriors(model, x)[0]
    return model.classes[int(np.argmax(post))], post


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


@dataclass
class MetricsReport:
    classes: list
    confusion: np.ndarray   # (C, C) counts, rows = true class
    cr: float
    kappa: float
    acr: float
    aer: float
    ae1: float
    ae2: float
    posteriors: np.ndarray  # (n_test, C)
    predicted: np.ndarray   # (n_test,) labels
    actual: np.ndarray      # (n_test,) labels

    def to_dict(self):
        return {
            "classes": list(self.classes),
            "confusion": self.confusion.tolist(),
            "cr": self.cr,
            "kappa": self.kappa,
            "acr": self.acr,
            "aer": self.aer,
            "ae1": self.ae1,
            "ae2": self.ae2,
        }


def confusion_metrics(confusion):
    """CR, kappa, AE1, AE2 of a counts matrix (rows = true class).

    AE1 averages per-class miss rates over the true-class row totals; AE2
    averages per-class false-positive rates over the complement population.
    Classes absent from the test set contribute 0 to the averages.
    """
    cm = np.asarray(confusion, dtype=np.int64)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1]:
        raise ValueError(f"confusion matrix must be square, got {cm.shape}")
    total = int(cm.sum())
    if total == 0:
        raise ValueError("confusion matrix is empty")
    rows = cm.sum(axis=1)
    cols = cm.sum(axis=0)
    diag = np.diag(cm)

    cr = float(diag.sum() / total)
    p_e = float((rows * cols).sum() / total**2)
    kappa = 1.0 if p_e == 1.0 else float((cr - p_e) / (1.0 - p_e))

    with np.errstate(divide="ignore", invalid="ignore"):
        miss = np.where(rows > 0, (rows - diag) / rows, 0.0)
        fp = np.where(total - rows > 0, (cols - diag) / (total - rows), 0.0)
    return {
        "cr": cr,
        "kappa": kappa,
        "ae1": float(miss.mean()),
        "ae2": float(fp.mean()),
    }


def evaluate(model, test):
    """Confusion matrix and the six summary statistics on a test set.

    ACR/AER are the mean maximum posteriors over the correctly and the
    incorrectly classified samples; an empty group reports 1.0 (the
    reliability of a vacuous group is perfect).
    """
    if test.n_samples == 0:
        raise ValueError("test set is empty")
    unknown = sorted(set(test.labels.tolist()) - set(model.classes))
    if unknown:
        raise DatasetError(f"test labels unknown to the model: {', '.join(unknown)}")

    post = _posteriors(model, test.X)
    pred_idx = post.argmax(axis=1)
    class_pos = {label: i for i, label in enumerate(model.classes)}
    true_idx = np.array([class_pos[label] for label in test.labels])

    n_classes = len(model.classes)
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (true_idx, pred_idx), 1)

    summary = confusion_metrics(confusion)
    top = post.max(axis=1)
    correct = pred_idx == true_idx
    acr = float(top[correct].mean()) if correct.any() else 1.0
    aer = float(top[~correct].mean()) if (~correct).any() else 1.0

    predicted = np.array([model.classes[i] for i in pred_idx])
    return MetricsReport(
        classes=list(model.classes),
        confusion=confusion,
        cr=summary["cr"],
        kappa=summary["kappa"],
        acr=acr,
        aer=aer,
        ae1=summary["ae1"],
        ae2=summary["ae2"],
        posteriors=post,
        predicted=predicted,
        actual=test.labels.copy(),
    )


def confusion_to_csv(report):
    lines = ["label," + ",".join(report.classes)]
    for label, row in zip(report.classes, report.confusion):
        lines.append(label + "," + ",".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Feature ranking and prefix selection
# ---------------------------------------------------------------------------


@dataclass
class SelectionResult:
    ranked: np.ndarray      # permutation of feature indices
    n_star: int             # smallest prefix attaining the best accuracy
    accuracies: np.ndarray  # validation accuracy per prefix length

    @property
    def selected(self):
        return self.ranked[: self.n_star]


def _split_accuracy(train, val, feature_idx, ridge):
    model = fit_lda(train.take_features(feature_idx), ridge)
    post = _posteriors(model, val.take_features(feature_idx).X)
    predicted = np.array([model.classes[i] for i in post.argmax(axis=1)])
    return float(np.mean(predicted == val.labels))


def rank_features(train, seed, ridge=DEFAULT_RIDGE):
    """Order features by their solo validation accuracy, descending.

    Each feature is scored with a one-dimensional fit on an internal
    stratified half split of the training data; ties break toward the
    smaller index.
    """
    inner_train, inner_val = stratified_holdout(train, 0.5, seed)
    scores = np.array([
        _split_accuracy(inner_train, inner_val, [f], ridge)
        for f in range(train.n_features)
    ])
    order = np.lexsort((np.arange(train.n_features), -scores))
    return order.astype(np.int64)


def select_mld(train, ranked, seed, ridge=DEFAULT_RIDGE):
    """Best prefix of the ranked features on the internal validation split.

    Evaluates every prefix length; the smallest one attaining the maximum
    accuracy wins.
    """
    ranked = np.asarray(ranked, dtype=np.int64)
    if sorted(ranked.tolist()) != list(range(train.n_features)):
        raise ValueError("ranked must be a permutation of the feature indices")
    inner_train, inner_val = stratified_holdout(train, 0.5, seed)
    accuracies = np.array([
        _split_accuracy(inner_train, inner_val, ranked[: i + 1].tolist(), ridge)
        for i in range(len(ranked))
    ])
    n_star = int(np.argmax(accuracies)) + 1
    return SelectionResult(ranked=ranked, n_star=n_star, accuracies=accuracies)
