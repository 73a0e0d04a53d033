"""Desk-scale benchmark of the labeling phase.

For a target union size n the benchmark builds a random DNA text and a
lightly mutated copy, sizes them so that their label union is close to n,
and times parsing (preprocessing) and the secure relabeling.
"""

import logging
import random
import time
from dataclasses import dataclass

from src.config import RunConfig
from src.esp import Text, build_esp_tree
from src.hashing import HashConfig
from src.oracles import ORACLE_MODULUS
from src.pipeline.pipeline import RunReport, run_edm
from src.protocol import tentative_label_set

logger = logging.getLogger(__name__)

DNA = b"ACGT"

# Reference single-machine timings at n = 100: seconds, seconds per label.
REFERENCE_TIMINGS: dict[int, tuple[float, float]] = {100: (3.147, 0.010)}


def mutate(text: Text, edits: int, rng: random.Random, alphabet: bytes = DNA) -> bytes:
    """Apply `edits` random insertions, deletions, renames and moves."""
    out = bytearray(text)
    for _ in range(edits):
        kind = rng.choice(("insert", "delete", "rename", "move"))
        i = rng.randrange(len(out)) if out else 0
        if kind == "insert" or not out:
            out.insert(i, rng.choice(alphabet))
        elif kind == "delete" and len(out) > 1:
            del out[i]
        elif kind == "rename":
            out[i] = rng.choice(alphabet)
        elif kind == "move" and len(out) > 2:
            j = rng.randrange(i + 1, len(out) + 1)
            span = out[i:j]
            del out[i:j]
            k = rng.randrange(len(out) + 1)
            out[k:k] = span
    return bytes(out)


def union_size(text_a: Text, text_b: Text) -> int:
    cfg = HashConfig(m=ORACLE_MODULUS)
    a = tentative_label_set(build_esp_tree(text_a, cfg))
    b = tentative_label_set(build_esp_tree(text_b, cfg))
    return len(set(a) | set(b))


def make_pair(n_target: int, rng: random.Random, max_steps: int = 8) -> tuple[bytes, bytes]:
    """Random DNA text and a mutated copy whose label union is about n_target."""
    if n_target < 2:
        raise ValueError(f"target union size must be >= 2, got {n_target}")
    length = max(2, n_target // 2)
    base = bytes(rng.choice(DNA) for _ in range(4 * n_target))
    best: tuple[int, bytes, bytes] | None = None
    for _ in range(max_steps):
        text_a = base[:length]
        text_b = mutate(text_a, max(1, length // 50), rng)
        size = union_size(text_a, text_b)
        if best is None or abs(size - n_target) < abs(best[0] - n_target):
            best = (size, text_a, text_b)
        if abs(size - n_target) <= max(1, n_target // 20):
            break
        length = max(2, min(len(base), round(length * n_target / max(size, 1))))
    return best[1], best[2]


@dataclass(frozen=True)
class BenchResult:
    n_target: int
    text_length: int
    preprocessing_s: float
    relabel_s: float
    report: RunReport

    @property
    def n(self) -> int:
        return self.report.n

    @property
    def relabel_per_label_s(self) -> float:
        return self.relabel_s / max(self.n, 1)

    def lines(self) -> list[str]:
        lines = [
            *self.report.lines(include_timings=True),
            f"bench.n_target={self.n_target}",
            f"bench.text_length={self.text_length}",
            f"bench.preprocessing_s={self.preprocessing_s:.6f}",
            f"bench.relabel_s={self.relabel_s:.6f}",
            f"bench.relabel_per_label_s={self.relabel_per_label_s:.6f}",
        ]
        if self.n_target in REFERENCE_TIMINGS:
            pre, per_label = REFERENCE_TIMINGS[self.n_target]
            lines.append(f"bench.reference_preprocessing_s={pre}")
            lines.append(f"bench.reference_relabel_per_label_s={per_label}")
        return lines


def bench(n_target: int, config: RunConfig) -> BenchResult:
    """Time preprocessing and secure relabeling at union size ~n_target."""
    rng = random.Random(config.seed if config.seed is not None else n_target)
    text_a, text_b = make_pair(n_target, rng)
    started = time.perf_counter()
    hash_config = HashConfig(m=config.select_modulus(n_target), b=config.base)
    for text in (text_a, text_b):
        tentative_label_set(build_esp_tree(text, hash_config))
    preprocessing = time.perf_counter() - started
    if config.modulus is None:
        config = config.model_copy(update={"modulus": hash_config.m})
    report = run_edm(text_a, text_b, config, mode="phase1", command="bench")
    relabel = report.metrics.wall_time.get("phase1", 0.0)
    logger.info(
        "bench_done",
        extra={"n_target": n_target, "n": report.n, "relabel_s": relabel},
    )
    return BenchResult(
        n_target=n_target,
        text_length=len(text_a),
        preprocessing_s=preprocessing,
        relabel_s=relabel,
        report=report,
    )
