"""Image-enhancement demonstration: original / enhanced / leaked triple.

The enhancement function is a 3x3 binary majority (median) filter, a real
salt-and-pepper denoiser small enough (9 inputs) for exhaustive checking.
The pipeline binarizes the input image, optionally salts it with noise to
form the "original", then filters every 3x3 window (border replicated)
through the chosen variant:

  plain     the bare filter; an implant sees everything, so the leaked
            image is the enhanced image itself.
  record1   one random bit over all 9 window inputs.
  record2   two random bits, checkerboard grouping, so a window's center
            and its four edge-adjacent neighbors sit in opposite groups.

Windows are processed in raster order with fresh random bits per window.
The enhanced image is always cross-checked bit for bit against the direct
median-filter oracle.

The implant runs the gradient strategy: per window it xors the visible
encoded center against each visible encoded neighbor, an estimate of the
true pixel difference. Same-group estimates are exact (the shared random
bit cancels); cross-group estimates are masked to coin flips. The leaked
image renders the per-pixel mean of those difference estimates (growing
white with estimated edge strength, mid-gray where no estimate exists).

Scoring, defined here and used by the acceptance checks:

  structural score   F1 of the predicted edge set {pixels with >= 2 of the
                     8 difference estimates set} against the geometric edge
                     set of the clean scene (pixels differing from an
                     8-neighbor). For the plain variant the differences are
                     read off the leaked (= enhanced) image.
  same-group F1      the same predictor restricted to same-group estimates.
  cross accuracy     per-bit accuracy of cross-group estimates against the
                     true differences of the (noisy) filter input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .bits import Bits
from .fixtures import make_maj9
from .netlist import Netlist
from .pgm import read_pgm, write_pgm
from .recordize import PartitionedDesign, RecordConfig, transform
from .rng import RngSpec, bit_stream, derive
from .sim import SimTrace, Stimulus, simulate, simulate_netlist
from .trojan import mutual_information

VARIANTS = ("plain", "record1", "record2")

_NOISE_TAG = 0x6E6F6973655F5F31  # distinct sub-stream for pixel noise

# window offsets in row-major order; index 4 is the center
_OFFSETS = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1)]
_NEIGHBOR_IDX = [0, 1, 2, 3, 5, 6, 7, 8]


@dataclass
class ImageDemoConfig:
    out_dir: str
    input_path: Optional[str] = None
    variant: str = "record1"
    threshold: int = 128
    noise: float = 0.015
    seed: int = 0
    report_path: Optional[str] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError("variant must be one of %s" % (VARIANTS,))
        if not 0 <= self.threshold <= 255:
            raise ValueError("threshold must be in 0..255")
        if not 0 <= self.noise < 1:
            raise ValueError("noise probability must be in [0, 1)")


@dataclass
class DemoResult:
    original_path: str
    enhanced_path: str
    leaked_path: str
    scores: Dict[str, Optional[float]]
    report: dict


def synthetic_scene(width: int = 64, height: int = 64) -> List[int]:
    """Two filled rectangles on empty background, as 0/1 pixels."""
    img = [0] * (width * height)
    for r0, r1, c0, c1 in ((8, 28, 6, 30), (34, 56, 36, 58)):
        for r in range(r0, r1):
            for c in range(c0, c1):
                img[r * width + c] = 1
    return img


def binarize(pixels: Sequence[int], threshold: int) -> List[int]:
    return [1 if p >= threshold else 0 for p in pixels]


def salt_pepper(bits: Sequence[int], p: float, rng: RngSpec) -> List[int]:
    """Flip each pixel independently with probability p (quantized 1/2^16)."""
    cut = int(p * 65536)
    out = list(bits)
    stream = bit_stream(rng)
    for i in range(len(out)):
        draw = 0
        for k in range(16):
            draw |= next(stream) << k
        if draw < cut:
            out[i] ^= 1
    return out


def _clamp(v: int, lo: int, hi: int) -> int:
    return lo if v < lo else hi if v > hi else v


def window_bits(img: Sequence[int], width: int, height: int,
                r: int, c: int) -> List[int]:
    """3x3 window around (r, c), border pixels replicated."""
    out = []
    for dr, dc in _OFFSETS:
        rr = _clamp(r + dr, 0, height - 1)
        cc = _clamp(c + dc, 0, width - 1)
        out.append(img[rr * width + cc])
    return out


def median_filter(img: Sequence[int], width: int, height: int) -> List[int]:
    """Direct 3x3 majority oracle, the reference for every variant."""
    out = []
    for r in range(height):
        for c in range(width):
            out.append(1 if sum(window_bits(img, width, height, r, c)) >= 5
                       else 0)
    return out


def window_stimulus(img: Sequence[int], width: int, height: int) -> Stimulus:
    rows = [window_bits(img, width, height, r, c)
            for r in range(height) for c in range(width)]
    return Stimulus.from_vectors(rows)


def neighbor_differences(img: Sequence[int], width: int,
                         height: int) -> List[Bits]:
    """For each of the 8 neighbor directions, the per-pixel difference map."""
    n = width * height
    maps = []
    for k in _NEIGHBOR_IDX:
        dr, dc = _OFFSETS[k]
        v = 0
        for r in range(height):
            for c in range(width):
                rr = _clamp(r + dr, 0, height - 1)
                cc = _clamp(c + dc, 0, width - 1)
                if img[r * width + c] != img[rr * width + cc]:
                    v |= 1 << (r * width + c)
        maps.append(Bits(v, n))
    return maps


def geometric_edges(img: Sequence[int], width: int, height: int) -> Bits:
    """Pixels whose value differs from at least one 8-neighbor."""
    acc = Bits.zeros(width * height)
    for m in neighbor_differences(img, width, height):
        acc = acc | m
    return acc


def edge_prediction(diff_maps: Sequence[Bits], min_votes: int = 2) -> Bits:
    """Pixels where at least min_votes difference estimates are set."""
    if not diff_maps:
        raise ValueError("no difference estimates")
    n = len(diff_maps[0])
    counts = [0] * n
    for m in diff_maps:
        v = m.value
        idx = 0
        while v:
            if v & 1:
                counts[idx] += 1
            v >>= 1
            idx += 1
    out = 0
    for i, k in enumerate(counts):
        if k >= min_votes:
            out |= 1 << i
    return Bits(out, n)


def f1_score(pred: Bits, truth: Bits) -> float:
    tp = (pred & truth).count()
    fp = (pred & ~truth).count()
    fn = (~pred & truth).count()
    if 2 * tp + fp + fn == 0:
        return 1.0
    return 2 * tp / (2 * tp + fp + fn)


def _design_for(variant: str) -> Tuple[Netlist, Optional[PartitionedDesign]]:
    f = make_maj9()
    if variant == "plain":
        return f, None
    groups = 1 if variant == "record1" else 2
    return f, transform(f, RecordConfig.checkerboard(f, groups))


@dataclass
class _VariantRun:
    enhanced: List[int]
    estimates: List[Bits]            # 8 neighbor-difference estimates
    same_group: List[int]            # indices into estimates
    cross_group: List[int]
    trace: Optional[SimTrace]
    design: Optional[PartitionedDesign]


def _run_variant(variant: str, noisy: Sequence[int], width: int, height: int,
                 seed: int) -> _VariantRun:
    f, design = _design_for(variant)
    stim = window_stimulus(noisy, width, height)
    if design is None:
        trace = simulate_netlist(f, stim)
        enhanced = list(trace.stream("y"))
        est = neighbor_differences(enhanced, width, height)
        return _VariantRun(enhanced, est, list(range(8)), [], None, None)

    trace = simulate(design, stim, RngSpec(seed))
    enhanced = list(trace.stream(design.decoded_outputs[0]))
    center = trace.stream(design.encode_wire("x5"))
    estimates = []
    same, cross = [], []
    g_of = design.config.group_assignment
    for pos, k in enumerate(_NEIGHBOR_IDX):
        neighbor = trace.stream(design.encode_wire("x%d" % (k + 1)))
        estimates.append(center ^ neighbor)
        if g_of["x%d" % (k + 1)] == g_of["x5"]:
            same.append(pos)
        else:
            cross.append(pos)
    return _VariantRun(enhanced, estimates, same, cross, trace, design)


def leaked_image(run: _VariantRun, width: int, height: int) -> List[int]:
    """Render difference estimates as gray levels; enhanced image for plain."""
    if run.design is None:
        return [255 * p for p in run.enhanced]
    n = width * height
    out = []
    k = len(run.estimates)
    for i in range(n):
        if k == 0:
            out.append(128)
            continue
        ones = sum(m[i] for m in run.estimates)
        out.append((255 * ones) // k)
    return out


def demo_image(cfg: ImageDemoConfig) -> DemoResult:
    """Produce the original/enhanced/leaked triple plus a leakage report."""
    if cfg.input_path is None:
        width = height = 64
        clean = synthetic_scene(width, height)
    else:
        width, height, _maxval, pixels = read_pgm(cfg.input_path)
        clean = binarize(pixels, cfg.threshold)

    noisy = salt_pepper(clean, cfg.noise,
                        derive(RngSpec(cfg.seed), _NOISE_TAG))
    run = _run_variant(cfg.variant, noisy, width, height, cfg.seed)

    oracle = median_filter(noisy, width, height)
    if run.enhanced != oracle:
        raise RuntimeError("enhanced image disagrees with the median-filter "
                           "oracle; decode path is broken")

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {name: str(out_dir / ("%s.pgm" % name))
             for name in ("original", "enhanced", "leaked")}
    write_pgm(paths["original"], width, height, [255 * p for p in noisy])
    write_pgm(paths["enhanced"], width, height, [255 * p for p in oracle])
    leaked = leaked_image(run, width, height)
    write_pgm(paths["leaked"], width, height, leaked)

    truth_edges = geometric_edges(clean, width, height)
    scores: Dict[str, Optional[float]] = {
        "structural": f1_score(edge_prediction(run.estimates), truth_edges),
        "same_group_edge_f1": None,
        "cross_group_accuracy": None,
    }
    if run.same_group:
        scores["same_group_edge_f1"] = f1_score(
            edge_prediction([run.estimates[i] for i in run.same_group]),
            truth_edges)
    if run.cross_group:
        true_diffs = neighbor_differences(noisy, width, height)
        total_bits = 0
        agree = 0.0
        for i in run.cross_group:
            total_bits += len(run.estimates[i])
            agree += run.estimates[i].accuracy(true_diffs[i]) \
                * len(run.estimates[i])
        scores["cross_group_accuracy"] = agree / total_bits

    report = {"variant": cfg.variant, "seed": cfg.seed, "noise": cfg.noise,
              "scores": scores}
    if run.design is not None and run.trace is not None:
        d, t = run.design, run.trace
        x5 = t.stream("x5")
        t5 = t.stream(d.encode_wire("x5"))
        report["mi_center_vs_encoded"] = mutual_information(t5, x5)
        pair_mi = {}
        for label, idx_list in (("same_group", run.same_group),
                                ("cross_group", run.cross_group)):
            vals = []
            for pos in idx_list:
                k = _NEIGHBOR_IDX[pos]
                truth = x5 ^ t.stream("x%d" % (k + 1))
                vals.append(mutual_information(run.estimates[pos], truth))
            pair_mi[label] = (sum(vals) / len(vals)) if vals else None
        report["pair_mi"] = pair_mi

    if cfg.report_path:
        with open(cfg.report_path, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2, sort_keys=True)
            f.write("\n")

    return DemoResult(paths["original"], paths["enhanced"], paths["leaked"],
                      scores, report)
