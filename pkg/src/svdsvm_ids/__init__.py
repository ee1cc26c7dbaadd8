"""NSL-KDD intrusion detection: SVD feature reduction, SMO kernel SVM, KNN baseline."""

from .ingest import AttackClass, ConnectionRecord, DatasetSplit, load_split, map_attack_class, parse_record
from .kernels import Linear, Polynomial, Rbf, Sigmoid
from .linalg import SvdModel, project, svd_thin, truncate
from .metrics import EvaluationReport, confusion, summarize
from .svm import BinarySvmModel, SvmEnsemble, TrainConfig, smo_train_binary, train_ovr

__version__ = "0.1.0"
