"""NSL-KDD parsing, attack taxonomy and seeded stratified subsampling."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IoFailure, MalformedRecord, SampleTooLarge, UnknownAttackName

# NSL-KDD column order, 41 features.
FEATURE_NAMES = (
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes",
    "land", "wrong_fragment", "urgent", "hot", "num_failed_logins",
    "logged_in", "num_compromised", "root_shell", "su_attempted",
    "num_root", "num_file_creations", "num_shells", "num_access_files",
    "num_outbound_cmds", "is_host_login", "is_guest_login", "count",
    "srv_count", "serror_rate", "srv_serror_rate", "rerror_rate",
    "srv_rerror_rate", "same_srv_rate", "diff_srv_rate",
    "srv_diff_host_rate", "dst_host_count", "dst_host_srv_count",
    "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate", "dst_host_srv_serror_rate",
    "dst_host_rerror_rate", "dst_host_srv_rerror_rate",
)
CATEGORICAL_INDICES = (1, 2, 3)
CATEGORICAL_NAMES = tuple(FEATURE_NAMES[i] for i in CATEGORICAL_INDICES)
NUMERIC_NAMES = tuple(n for i, n in enumerate(FEATURE_NAMES) if i not in CATEGORICAL_INDICES)
N_FEATURES = len(FEATURE_NAMES)


class AttackClass(enum.Enum):
    NORMAL = "Normal"
    DOS = "DoS"
    PRB = "PRB"
    U2R = "U2R"
    R2L = "R2L"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "AttackClass":
        for member in cls:
            if member.value.lower() == text.strip().lower():
                return member
        raise ValueError(f"not an attack class: {text!r}")


CLASS_ORDER = tuple(AttackClass)

# Every label occurring in KDDTrain+ and KDDTest+. Test-only names are marked.
ATTACK_TAXONOMY = {
    "normal": AttackClass.NORMAL,
    # DoS
    "back": AttackClass.DOS,
    "land": AttackClass.DOS,
    "neptune": AttackClass.DOS,
    "pod": AttackClass.DOS,
    "smurf": AttackClass.DOS,
    "teardrop": AttackClass.DOS,
    "apache2": AttackClass.DOS,  # test only
    "mailbomb": AttackClass.DOS,  # test only
    "processtable": AttackClass.DOS,  # test only
    "udpstorm": AttackClass.DOS,  # test only
    # Probe
    "ipsweep": AttackClass.PRB,
    "nmap": AttackClass.PRB,
    "portsweep": AttackClass.PRB,
    "satan": AttackClass.PRB,
    "mscan": AttackClass.PRB,  # test only
    "saint": AttackClass.PRB,  # test only
    # U2R
    "buffer_overflow": AttackClass.U2R,
    "loadmodule": AttackClass.U2R,
    "perl": AttackClass.U2R,
    "rootkit": AttackClass.U2R,
    "httptunnel": AttackClass.U2R,  # test only
    "ps": AttackClass.U2R,  # test only
    "sqlattack": AttackClass.U2R,  # test only
    "xterm": AttackClass.U2R,  # test only
    # R2L
    "ftp_write": AttackClass.R2L,
    "guess_passwd": AttackClass.R2L,
    "imap": AttackClass.R2L,
    "multihop": AttackClass.R2L,
    "phf": AttackClass.R2L,
    "spy": AttackClass.R2L,
    "warezclient": AttackClass.R2L,
    "warezmaster": AttackClass.R2L,
    "named": AttackClass.R2L,  # test only
    "sendmail": AttackClass.R2L,  # test only
    "snmpgetattack": AttackClass.R2L,  # test only
    "snmpguess": AttackClass.R2L,  # test only
    "xlock": AttackClass.R2L,  # test only
    "xsnoop": AttackClass.R2L,  # test only
    "worm": AttackClass.R2L,  # test only
}

TEST_ONLY_ATTACKS = frozenset({
    "apache2", "mailbomb", "processtable", "udpstorm", "mscan", "saint",
    "httptunnel", "ps", "sqlattack", "xterm", "named", "sendmail",
    "snmpgetattack", "snmpguess", "xlock", "xsnoop", "worm",
})


def map_attack_class(attack_name: str) -> AttackClass:
    try:
        return ATTACK_TAXONOMY[attack_name.strip().lower()]
    except KeyError:
        raise UnknownAttackName(f"attack name not in taxonomy: {attack_name!r}") from None


@dataclass(frozen=True)
class ConnectionRecord:
    """One NSL-KDD row.

    ``numeric`` holds the 38 numeric features in file column order
    (duration first); the three categorical columns are kept as tokens.
    """

    numeric: tuple[float, ...]
    protocol_type: str
    service: str
    flag: str
    attack_name: str
    difficulty: int = 0

    @property
    def duration(self) -> float:
        return self.numeric[0]

    @property
    def attack_class(self) -> AttackClass:
        return map_attack_class(self.attack_name)

    def features(self) -> tuple:
        """The 41 feature values in file column order."""
        values = list(self.numeric)
        values[1:1] = [self.protocol_type, self.service, self.flag]
        return tuple(values)

    def render(self, with_difficulty: bool = True) -> str:
        fields = [_format_number(v) if isinstance(v, float) else v for v in self.features()]
        fields.append(self.attack_name)
        if with_difficulty:
            fields.append(str(self.difficulty))
        return ",".join(fields)


def _format_number(v: float) -> str:
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(v)


def parse_record(line: str) -> ConnectionRecord:
    fields = line.rstrip("\r\n").split(",")
    if len(fields) not in (N_FEATURES + 1, N_FEATURES + 2):
        raise MalformedRecord(
            f"expected {N_FEATURES + 1} or {N_FEATURES + 2} fields, got {len(fields)}")
    fields = [f.strip() for f in fields]
    for pos, token in enumerate(fields):
        if not token:
            raise MalformedRecord(f"empty token in column {pos + 1}")

    numeric = []
    for pos in range(N_FEATURES):
        if pos in CATEGORICAL_INDICES:
            continue
        try:
            value = float(fields[pos])
        except ValueError:
            raise MalformedRecord(
                f"non-numeric value {fields[pos]!r} in column {pos + 1} ({FEATURE_NAMES[pos]})"
            ) from None
        if not math.isfinite(value) or value < 0:
            raise MalformedRecord(
                f"value {fields[pos]!r} in column {pos + 1} is not a finite non-negative number")
        numeric.append(value)

    difficulty = 0
    if len(fields) == N_FEATURES + 2:
        try:
            difficulty = int(fields[-1])
        except ValueError:
            raise MalformedRecord(f"difficulty tag {fields[-1]!r} is not an integer") from None

    return ConnectionRecord(
        numeric=tuple(numeric),
        protocol_type=fields[1],
        service=fields[2],
        flag=fields[3],
        attack_name=fields[N_FEATURES],
        difficulty=difficulty,
    )


@dataclass(frozen=True)
class DatasetSplit:
    records: tuple[ConnectionRecord, ...]
    origin: str
    source_path: str = ""

    def __len__(self) -> int:
        return len(self.records)

    def classes(self) -> list[AttackClass]:
        return [r.attack_class for r in self.records]

    def class_counts(self) -> dict[AttackClass, int]:
        counts = dict.fromkeys(CLASS_ORDER, 0)
        for c in self.classes():
            counts[c] += 1
        return counts


def load_split(path, origin: str) -> DatasetSplit:
    if origin not in ("train", "test"):
        raise ValueError(f"origin must be 'train' or 'test', got {origin!r}")
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            records.append(parse_record(line))
        except MalformedRecord as exc:
            raise MalformedRecord(str(exc), line_number=lineno) from None
    return DatasetSplit(tuple(records), origin, str(Path(path)))


def largest_remainder_quotas(counts, n: int) -> list[int]:
    """Apportion ``n`` across groups proportionally to ``counts``.

    Floors of the exact quotas, then the leftover units go to the largest
    fractional parts (earlier group wins ties).
    """
    total = sum(counts)
    exact = [n * c / total for c in counts]
    quotas = [int(math.floor(q)) for q in exact]
    leftover = n - sum(quotas)
    order = sorted(range(len(counts)), key=lambda i: (-(exact[i] - quotas[i]), i))
    for i in order[:leftover]:
        quotas[i] += 1
    return quotas


def stratified_sample(split: DatasetSplit, n: int, seed: int) -> DatasetSplit:
    """Draw ``n`` records stratified by attack class.

    Randomness comes from numpy's PCG64 generator seeded with ``seed``.
    Selected records keep their original file order.
    """
    total = len(split)
    if n <= 0:
        raise ValueError("sample size must be positive")
    if n > total:
        raise SampleTooLarge(f"requested {n} records from a split of {total}")

    by_class: dict[AttackClass, list[int]] = {c: [] for c in CLASS_ORDER}
    for idx, c in enumerate(split.classes()):
        by_class[c].append(idx)

    quotas = largest_remainder_quotas([len(by_class[c]) for c in CLASS_ORDER], n)
    rng = np.random.Generator(np.random.PCG64(seed))
    chosen: list[int] = []
    for c, quota in zip(CLASS_ORDER, quotas):
        pool = by_class[c]
        if quota == len(pool):
            chosen.extend(pool)
        elif quota:
            picks = rng.choice(len(pool), size=quota, replace=False)
            chosen.extend(pool[i] for i in picks)
    chosen.sort()
    return DatasetSplit(tuple(split.records[i] for i in chosen), split.origin, split.source_path)
