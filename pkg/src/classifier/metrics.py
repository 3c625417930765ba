# src/classifier/metrics.py
"""Métricas de evaluación: exactitud, matriz de confusión y reporte por clase (sklearn.metrics)."""
from typing import List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from sklearn.metrics import accuracy_score, confusion_matrix, precision_recall_fscore_support


class ClassReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    precision: float
    recall: float
    f1: float
    support: int


class Metrics(BaseModel):
    """Filas de la matriz de confusión = clase real, columnas = clase predicha."""

    model_config = ConfigDict(frozen=True)

    class_names: List[str]
    accuracy: float
    confusion: List[List[int]]
    per_class: List[ClassReport]
    macro_avg: ClassReport
    weighted_avg: ClassReport

    @property
    def total(self) -> int:
        return int(sum(sum(row) for row in self.confusion))

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def compute_metrics(y_true: Sequence[int], y_pred: Sequence[int], class_names: Sequence[str]) -> Metrics:
    """
    Métricas a partir de índices de clase reales y predichos.
    Las clases sin predicciones o sin ejemplos dan precision/recall 0 (zero_division=0).
    """
    labels = list(range(len(class_names)))
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)

    cm = confusion_matrix(y_true, y_pred, labels=labels)
    precision, recall, f1, support = precision_recall_fscore_support(
        y_true, y_pred, labels=labels, average=None, zero_division=0
    )
    per_class = [
        ClassReport(name=name, precision=float(p), recall=float(r), f1=float(f), support=int(s))
        for name, p, r, f, s in zip(class_names, precision, recall, f1, support)
    ]

    def _average(name: str, average: str) -> ClassReport:
        p, r, f, _ = precision_recall_fscore_support(
            y_true, y_pred, labels=labels, average=average, zero_division=0
        )
        return ClassReport(name=name, precision=float(p), recall=float(r), f1=float(f), support=int(y_true.size))

    return Metrics(
        class_names=list(class_names),
        accuracy=float(accuracy_score(y_true, y_pred)),
        confusion=cm.astype(int).tolist(),
        per_class=per_class,
        macro_avg=_average("macro avg", "macro"),
        weighted_avg=_average("weighted avg", "weighted"),
    )


def metrics_from_confusion(confusion, class_names: Sequence[str]) -> Metrics:
    """Reconstruye los pares (real, predicho) de una matriz de confusión y calcula las métricas."""
    cm = np.asarray(confusion, dtype=np.int64)
    true_idx, pred_idx = np.indices(cm.shape)
    counts = cm.ravel()
    y_true = np.repeat(true_idx.ravel(), counts)
    y_pred = np.repeat(pred_idx.ravel(), counts)
    return compute_metrics(y_true, y_pred, class_names)


def format_report(metrics: Metrics, digits: int = 2) -> str:
    """Reporte de texto con el layout clásico precision/recall/f1-score/support."""
    width = max(len("weighted avg"), *(len(n) for n in metrics.class_names))
    head = f"{'':>{width}} {'precision':>9} {'recall':>9} {'f1-score':>9} {'support':>9}"
    lines = [head, ""]

    def _row(r: ClassReport) -> str:
        return (
            f"{r.name:>{width}} {r.precision:>9.{digits}f} {r.recall:>9.{digits}f} "
            f"{r.f1:>9.{digits}f} {r.support:>9d}"
        )

    lines.extend(_row(r) for r in metrics.per_class)
    lines.append("")
    lines.append(f"{'accuracy':>{width}} {'':>9} {'':>9} {metrics.accuracy:>9.{digits}f} {metrics.total:>9d}")
    lines.append(_row(metrics.macro_avg))
    lines.append(_row(metrics.weighted_avg))
    return "\n".join(lines) + "\n"
