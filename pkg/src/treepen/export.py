"""JSON model documents and DOT / plain-text tree rendering."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from treepen.dataset import TaskKind
from treepen.errors import DataError
from treepen.gain import GainKind
from treepen.grower import GrowConfig, Node, SplitRule, Tree
from treepen.penalty import PenaltyKind

FORMAT_VERSION = 1


class ModelFormatError(DataError):
    pass


def _node_record(node: Node, tree: Tree) -> dict:
    value = int(node.value) if tree.is_classification else float(node.value)
    record = {"n": int(node.n), "value": value, "impurity": float(node.impurity)}
    if not node.is_terminal:
        record["variable"] = tree.feature_names[node.rule.variable]
        record["threshold"] = float(node.rule.threshold)
        record["left"] = _node_record(node.left, tree)
        record["right"] = _node_record(node.right, tree)
    return record


def to_document(tree: Tree, summary: dict | None = None) -> dict:
    c = tree.config
    doc = {
        "format_version": FORMAT_VERSION,
        "task": tree.task.value,
        "feature_names": list(tree.feature_names),
        "class_labels": list(tree.class_labels),
        "config": {
            "gain": c.gain.value,
            "penalty": c.penalty.value,
            "k": float(c.k),
            "min_node_fraction": float(c.min_node_fraction),
            "class_of_interest": c.class_of_interest,
        },
        "n_train": int(tree.n_train),
        "tree": _node_record(tree.root, tree),
    }
    summary = tree.summary if summary is None else summary
    if summary:
        doc["training"] = summary
    return doc


def serialize(tree: Tree, summary: dict | None = None) -> bytes:
    """Canonical JSON: sorted keys, shortest round-trip float repr."""
    text = json.dumps(to_document(tree, summary), sort_keys=True, indent=1,
                      ensure_ascii=False, allow_nan=False)
    return (text + "\n").encode("utf-8")


def deserialize(data: bytes | str) -> Tree:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model document is not valid JSON: {exc}") from None
    return from_document(doc)


def from_document(doc: dict) -> Tree:
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise ModelFormatError("model document has no format_version")
    if doc["format_version"] != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {doc['format_version']!r}")
    try:
        task = TaskKind(doc["task"])
        names = tuple(doc["feature_names"])
        cfg = doc["config"]
        config = GrowConfig(
            gain=GainKind(cfg["gain"]),
            penalty=PenaltyKind(cfg["penalty"]),
            k=cfg["k"],
            min_node_fraction=cfg["min_node_fraction"],
            class_of_interest=cfg["class_of_interest"],
        )
        index = {name: i for i, name in enumerate(names)}
        classification = task is TaskKind.CLASSIFICATION

        def build(rec: dict, depth: int, branch: tuple[int, ...]) -> Node:
            value = int(rec["value"]) if classification else float(rec["value"])
            node = Node(depth, branch, int(rec["n"]), value, float(rec["impurity"]))
            if "variable" in rec:
                v = index[rec["variable"]]
                node.rule = SplitRule(v, float(rec["threshold"]))
                node.left = build(rec["left"], depth + 1, branch + (v,))
                node.right = build(rec["right"], depth + 1, branch + (v,))
            return node

        tree = Tree(build(doc["tree"], 0, ()), config, names, task, int(doc["n_train"]),
                    tuple(doc["class_labels"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model document: {exc!r}") from None
    tree.summary = doc.get("training")
    return tree


def write_atomic(path: str | Path, data: bytes | str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _value_label(node: Node, tree: Tree) -> str:
    if tree.is_classification:
        return tree.class_labels[node.value] if tree.class_labels else str(node.value)
    return f"{node.value:.4g}"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def render_dot(tree: Tree) -> str:
    """Graphviz digraph; left edges are labelled "yes" (``x <= t``)."""
    lines = ["digraph tree {", '  node [shape=box, fontname="Helvetica"];']
    edges = []
    ids: dict[int, int] = {}
    for node in tree.root.walk():
        ids[id(node)] = len(ids)
    for node in tree.root.walk():
        nid = ids[id(node)]
        if node.is_terminal:
            label = f"{_dot_escape(_value_label(node, tree))}\\nn = {node.n}"
            lines.append(f'  n{nid} [label="{label}", shape=ellipse];')
        else:
            name = tree.feature_names[node.rule.variable]
            label = f"{name} ≤ {node.rule.threshold:.4g}"
            lines.append(f'  n{nid} [label="{_dot_escape(label)}"];')
            edges.append(f'  n{nid} -> n{ids[id(node.left)]} [label="yes"];')
            edges.append(f'  n{nid} -> n{ids[id(node.right)]} [label="no"];')
    return "\n".join(lines + edges + ["}"]) + "\n"


def render_text(tree: Tree) -> str:
    """Indented rule listing, one line per node."""
    out = []

    def rec(node: Node, indent: str, prefix: str):
        if node.is_terminal:
            out.append(f"{indent}{prefix}{_value_label(node, tree)} (n={node.n})")
            return
        name = tree.feature_names[node.rule.variable]
        t = f"{node.rule.threshold:.4g}"
        out.append(f"{indent}{prefix}{name} <= {t} (n={node.n})")
        rec(node.left, indent + "  ", "yes: ")
        rec(node.right, indent + "  ", "no:  ")

    rec(tree.root, "", "")
    return "\n".join(out) + "\n"
