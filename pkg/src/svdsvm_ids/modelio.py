"""Line-oriented text serialization of trained pipelines.

Layout::

    SVDSVM-IDS v1
    [CONFIG]      key = value lines
    [ENCODER]     numeric/categorical column descriptions
    [SVD]         optional retained basis and singular values
    [SVM] | [KNN] classifier content
    [CHECKSUM]    sha256 of every byte before this section

Floating point values are written with 17 significant digits, which
round-trips IEEE doubles exactly.
"""
from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .errors import ChecksumMismatch, IoFailure, VersionMismatch
from .features import FeatureEncoder
from .ingest import CATEGORICAL_NAMES, NUMERIC_NAMES, AttackClass
from .kernels import parse_kernel
from .knn import KnnModel
from .linalg import SvdModel
from .pipeline import FORMAT_VERSION, ModelFile
from .svm import BinarySvmModel, SvmEnsemble

MAGIC = "SVDSVM-IDS"


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _nums(values) -> str:
    return " ".join(_num(v) for v in values)


def _class_token(c) -> str:
    return c.value if isinstance(c, AttackClass) else str(c)


def render_model(model: ModelFile) -> str:
    out = [f"{MAGIC} v{model.format_version}", "[CONFIG]"]
    out += [f"{k} = {v}" for k, v in sorted(model.config.items())]

    enc = model.encoder
    out.append("[ENCODER]")
    for name, lo, hi in zip(NUMERIC_NAMES, enc.numeric_min, enc.numeric_max):
        out.append(f"numeric {name} {_num(lo)} {_num(hi)}")
    for name, vocab in zip(CATEGORICAL_NAMES, enc.vocabularies):
        out.append(" ".join(["categorical", name, *vocab]))

    if model.svd is not None:
        svd = model.svd
        out += ["[SVD]", f"shape {svd.p} {svd.k}", f"singular_values {_nums(svd.singular_values)}"]
        out += [f"v {_nums(row)}" for row in svd.v_k]

    clf = model.classifier
    if isinstance(clf, SvmEnsemble):
        out += ["[SVM]", f"kernel {clf.kernel.to_text()}",
                "classes " + " ".join(_class_token(c) for c in clf.class_order)]
        for cls, m in zip(clf.class_order, clf.models):
            out.append(f"model {_class_token(cls)} bias={_num(m.bias)} n_support={m.n_support} "
                       f"converged={int(m.converged)} iterations={m.iterations}")
            for idx, coef, sv in zip(m.support_indices, m.coefficients, m.support_vectors):
                out.append(f"sv {int(idx)} {_num(coef)} {_nums(sv)}")
    else:
        out += ["[KNN]", f"k {clf.k}", f"shape {clf.train_matrix.shape[0]} {clf.train_matrix.shape[1]}"]
        for label, row in zip(clf.train_labels, clf.train_matrix):
            out.append(f"row {_class_token(label)} {_nums(row)}")

    body = "\n".join(out) + "\n"
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return body + f"[CHECKSUM]\nsha256 {digest}\n"


def save_model(model: ModelFile, path) -> None:
    text = render_model(model)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write model file {path}: {exc}") from exc


def _parse_class(token: str):
    try:
        return AttackClass.parse(token)
    except ValueError:
        return token


def _floats(tokens) -> np.ndarray:
    return np.array([float(t) for t in tokens], dtype=np.float64)


def _kv(tokens) -> dict[str, str]:
    return dict(t.split("=", 1) for t in tokens)


def parse_model(data: bytes) -> ModelFile:
    text = data.decode("utf-8", errors="replace")
    header, _, _ = text.partition("\n")
    magic, _, version = header.partition(" ")
    if magic != MAGIC or not version.startswith("v"):
        raise VersionMismatch(f"not a {MAGIC} model file (header {header!r})")
    try:
        version_num = int(version[1:])
    except ValueError:
        raise VersionMismatch(f"unreadable format version {version!r}") from None
    if version_num != FORMAT_VERSION:
        raise VersionMismatch(f"model format v{version_num}, expected v{FORMAT_VERSION}")

    marker = b"[CHECKSUM]\n"
    cut = data.rfind(b"\n" + marker)
    if cut < 0:
        raise ChecksumMismatch("checksum section missing")
    body, tail = data[:cut + 1], data[cut + 1 + len(marker):]
    expected = tail.decode("ascii", errors="replace").strip().removeprefix("sha256 ").strip()
    actual = hashlib.sha256(body).hexdigest()
    if expected != actual:
        raise ChecksumMismatch(f"checksum {actual} does not match recorded {expected}")

    sections: dict[str, list[str]] = {}
    current = None
    for line in body.decode("utf-8").splitlines()[1:]:
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections[current] = []
        elif current is not None and line:
            sections[current].append(line)

    config = {}
    for line in sections.get("CONFIG", []):
        key, _, value = line.partition(" = ")
        config[key] = value

    lows, highs, vocabs = [], [], []
    for line in sections["ENCODER"]:
        kind, _name, *rest = line.split(" ")
        if kind == "numeric":
            lows.append(float(rest[0]))
            highs.append(float(rest[1]))
        else:
            vocabs.append(tuple(rest))
    encoder = FeatureEncoder(tuple(lows), tuple(highs), tuple(vocabs))

    svd = None
    if "SVD" in sections:
        lines = sections["SVD"]
        p, k = (int(t) for t in lines[0].split()[1:])
        sv = _floats(lines[1].split()[1:])
        v = np.array([_floats(line.split()[1:]) for line in lines[2:2 + p]]).reshape(p, k)
        svd = SvdModel(v_k=v, singular_values=sv)

    if "SVM" in sections:
        classifier = _parse_svm(sections["SVM"])
    elif "KNN" in sections:
        classifier = _parse_knn(sections["KNN"])
    else:
        raise ValueError("model file has no classifier section")

    return ModelFile(encoder, classifier, svd, config, version_num, actual)


def _parse_svm(lines: list[str]) -> SvmEnsemble:
    kernel = parse_kernel(lines[0].split(" ", 1)[1])
    order = tuple(_parse_class(t) for t in lines[1].split()[1:])
    models = []
    pos = 2
    for _ in order:
        head = lines[pos].split()
        meta = _kv(head[2:])
        n_sv = int(meta["n_support"])
        rows = [line.split() for line in lines[pos + 1:pos + 1 + n_sv]]
        pos += 1 + n_sv
        width = len(rows[0]) - 3 if rows else 0
        models.append(BinarySvmModel(
            support_vectors=np.array([_floats(r[3:]) for r in rows]).reshape(n_sv, width),
            coefficients=_floats([r[2] for r in rows]),
            bias=float(meta["bias"]),
            kernel=kernel,
            support_indices=np.array([int(r[1]) for r in rows], dtype=np.int64),
            converged=meta.get("converged", "1") == "1",
            iterations=int(meta.get("iterations", 0)),
        ))
    return SvmEnsemble(order, tuple(models))


def _parse_knn(lines: list[str]) -> KnnModel:
    k = int(lines[0].split()[1])
    n, d = (int(t) for t in lines[1].split()[1:])
    rows = [line.split() for line in lines[2:2 + n]]
    matrix = np.array([_floats(r[2:]) for r in rows]).reshape(n, d)
    labels = tuple(_parse_class(r[1]) for r in rows)
    return KnnModel(matrix, labels, k)


def load_model(path) -> ModelFile:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read model file {path}: {exc}") from exc
    return parse_model(data)
