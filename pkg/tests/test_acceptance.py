"""Acceptance suite: one test per release criterion, at pinned tolerances.

Each test prints a PASS/FAIL line (run with ``pytest -s`` to see them all).
The criteria are property-based; no external data or published headline
number is asserted anywhere.
"""

import time

import numpy as np
import pytest

from oracles import exhaustive_sweep
from smoseg.config import PipelineConfig
from smoseg.contrast import contrast_map
from smoseg.features import FeatureField, builtin_feature_field, pool_superpixel_features
from smoseg.matching import brute_force_lap, brute_force_lap_cost, solve_lap
from smoseg.metrics import default_threshold_grid, f_beta, pr_roc_sweep
from smoseg.pipeline import ImagePair, evaluate_dataset, run_pair, sweep_alpha
from smoseg.slic import SlicParams, segment_slic
from smoseg.synth import SynthSpec, blurred_gt_saliency, generate_synthetic_pair


def report(name: str, ok: bool) -> bool:
    print(f"ACCEPTANCE {'PASS' if ok else 'FAIL'}: {name}", flush=True)
    return ok


# --- shared fixture geometry ------------------------------------------------

TINY_SPEC = SynthSpec(height=36, width=36, displacement=2)
TINY_SLIC = SlicParams(region_count_target=9, compactness=25.0)

SEP_SPEC = SynthSpec(height=112, width=112)
SEP_CFG = PipelineConfig(
    working_resolution=(112, 112), slic=SlicParams(region_count_target=120)
)

SWEEP_SPEC = SynthSpec(height=80, width=80)
SWEEP_CFG = PipelineConfig(
    working_resolution=(80, 80), slic=SlicParams(region_count_target=64)
)


def tiny_instance(seed: int):
    """Synthetic pair segmented into at most 12 superpixels per image."""
    pair = generate_synthetic_pair(seed, TINY_SPEC)
    lab_b = segment_slic(pair.before, TINY_SLIC)
    lab_a = segment_slic(pair.after, TINY_SLIC)
    assert lab_b.count <= 12 and lab_a.count <= 12
    feats_b = pool_superpixel_features(builtin_feature_field(pair.before, 5), lab_b)
    feats_a = pool_superpixel_features(builtin_feature_field(pair.after, 5), lab_a)
    return lab_b, lab_a, feats_b, feats_a


# --- criteria ----------------------------------------------------------------

def test_lap_oracle_equivalence():
    """1,000 random cost matrices (sides <= 6): solver == enumeration, < 10 s."""
    rng = np.random.default_rng(1009)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        p, q = rng.integers(1, 7, size=2)
        costs = rng.random((p, q)) * rng.choice([0.1, 1.0, 10.0])
        worst = max(worst, abs(solve_lap(costs).total_cost - brute_force_lap(costs).total_cost))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 10.0
    assert report(f"LAP oracle equivalence (max dev {worst:.2e}, {elapsed:.1f}s)", ok)


def test_contrast_oracle_equivalence():
    """50 tiny synthetic pairs: solver path == brute-force path, < 60 s."""
    start = time.perf_counter()
    worst = 0.0
    for seed in range(50):
        lab_b, lab_a, feats_b, feats_a = tiny_instance(seed)
        fast = contrast_map(lab_b, lab_a, feats_b, feats_a)
        brute = contrast_map(
            lab_b, lab_a, feats_b, feats_a, lap_cost=brute_force_lap_cost
        )
        worst = max(worst, float(np.abs(fast.values - brute.values).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 60.0
    assert report(f"contrast oracle equivalence (max dev {worst:.2e}, {elapsed:.1f}s)", ok)


def test_identity_pair_zero():
    """20 images paired with themselves: contrast and alpha=0 output all zero."""
    cfg = PipelineConfig(working_resolution=(64, 64), slic=SlicParams(region_count_target=36))
    ok = True
    for seed in range(20):
        pair = generate_synthetic_pair(seed, SynthSpec(height=64, width=64))
        result = run_pair(
            cfg, ImagePair(pair_id=f"i{seed}", before=pair.before, after=pair.before),
            alpha=0.0,
        )
        ok = ok and not result.contrast.values.any() and not result.prob.values.any()
    assert report("identity-pair zero maps", ok)


def test_feature_scale_invariance():
    """Scaling every feature field by 0.1 or 7.3 moves no pixel by 1e-9."""
    worst = 0.0
    for seed in (3, 4, 5):
        pair = generate_synthetic_pair(seed, SynthSpec(height=64, width=64))
        lab_b = segment_slic(pair.before, SlicParams(region_count_target=36))
        lab_a = segment_slic(pair.after, SlicParams(region_count_target=36))
        field_b = builtin_feature_field(pair.before)
        field_a = builtin_feature_field(pair.after)
        base = contrast_map(
            lab_b, lab_a,
            pool_superpixel_features(field_b, lab_b),
            pool_superpixel_features(field_a, lab_a),
        )
        for scale in (0.1, 7.3):
            scaled = contrast_map(
                lab_b, lab_a,
                pool_superpixel_features(FeatureField(values=field_b.values * scale), lab_b),
                pool_superpixel_features(FeatureField(values=field_a.values * scale), lab_a),
            )
            worst = max(worst, float(np.abs(scaled.values - base.values).max()))
    ok = worst < 1e-9
    assert report(f"feature-scale invariance (max dev {worst:.2e})", ok)


def test_metric_oracle():
    """1,000 random 8x8 instances against the exhaustive-threshold oracle.

    Values drawn on the 1/256 grid make the fixed 257-point sweep cover
    every distinct value, so F-beta-max and AUC must match to 1e-6.  A
    continuous-valued variant then checks the sweep equals the oracle
    restricted to the same grid and that the off-grid peak deficit stays
    within 5e-3.
    """
    rng = np.random.default_rng(2024)
    grid = default_threshold_grid()

    probs_q = [np.round(rng.random((8, 8)) * 256) / 256 for _ in range(1000)]
    gts = [rng.random((8, 8)) < 0.35 for _ in range(1000)]
    flat_q = [np.concatenate([p.ravel() for p in probs_q])]
    flat_gt = [np.concatenate([g.ravel() for g in gts])]

    rep_q = pr_roc_sweep(probs_q, gts, grid)
    f_oracle, auc_oracle = exhaustive_sweep(flat_q, flat_gt, 0.3)
    quantized_ok = (
        abs(rep_q.f_beta_max - f_oracle) <= 1e-6 and abs(rep_q.auc - auc_oracle) <= 1e-6
    )

    probs_c = [rng.random((8, 8)) for _ in range(1000)]
    flat_c = [np.concatenate([p.ravel() for p in probs_c])]
    rep_c = pr_roc_sweep(probs_c, gts, grid)
    f_grid_oracle, _ = exhaustive_sweep(flat_c, flat_gt, 0.3, thresholds=grid)
    f_full_oracle, _ = exhaustive_sweep(flat_c, flat_gt, 0.3)
    deficit = f_full_oracle - rep_c.f_beta_max
    continuous_ok = (
        abs(rep_c.f_beta_max - f_grid_oracle) <= 1e-6 and -1e-9 <= deficit <= 5e-3
    )

    ok = quantized_ok and continuous_ok
    assert report(
        f"metric oracle (quantized dev {abs(rep_q.f_beta_max - f_oracle):.1e}/"
        f"{abs(rep_q.auc - auc_oracle):.1e}, grid deficit {deficit:.1e})",
        ok,
    )


def test_f_beta_point_checks():
    """Closed-form F-beta values, exact to 1e-12."""
    rng = np.random.default_rng(77)
    ok = abs(f_beta(1.0, 1.0) - 1.0) <= 1e-12 and abs(f_beta(1.0, 0.0)) <= 1e-12
    for v in rng.random(100):
        ok = ok and abs(f_beta(float(v), float(v)) - v) <= 1e-12
    assert report("F-beta point checks", ok)


@pytest.fixture(scope="module")
def separation_maps():
    """Fused + contrast-only maps for the 50-pair separation fixture."""
    fused, contrast_only, gts = [], [], []
    for seed in range(50):
        pair = generate_synthetic_pair(seed, SEP_SPEC)
        ip = ImagePair(
            pair_id=pair.pair_id,
            before=pair.before,
            after=pair.after,
            gt=pair.gt,
            saliency=blurred_gt_saliency(pair.gt),
        )
        result = run_pair(SEP_CFG, ip)
        fused.append(result.prob.values)
        contrast_only.append(result.contrast.values)
        gts.append(result.gt)
    return fused, contrast_only, gts


def test_synthetic_separation(separation_maps):
    """Inside-vs-outside separation on >= 48/50 pairs; fusion not degrading."""
    fused, contrast_only, gts = separation_maps
    separated = sum(
        1 for prob, gt in zip(fused, gts) if prob[gt].mean() > prob[~gt].mean()
    )
    auc_fused = pr_roc_sweep(fused, gts).auc
    auc_contrast = pr_roc_sweep(contrast_only, gts).auc
    ok = separated >= 48 and auc_fused >= auc_contrast - 0.02
    assert report(
        f"synthetic separation ({separated}/50, AUC fused {auc_fused:.3f} "
        f"vs contrast {auc_contrast:.3f})",
        ok,
    )


def test_sweep_cache_correctness():
    """Cached alpha sweep equals independent per-alpha runs bit-exactly."""
    pairs = []
    for seed in range(6):
        pair = generate_synthetic_pair(seed, SWEEP_SPEC)
        pairs.append(
            ImagePair(
                pair_id=pair.pair_id,
                before=pair.before,
                after=pair.after,
                gt=pair.gt,
                saliency=blurred_gt_saliency(pair.gt),
            )
        )
    rows = sweep_alpha(SWEEP_CFG, pairs)
    ok = len(rows) == 11
    for alpha, f_max, auc in rows:
        fresh = evaluate_dataset(SWEEP_CFG, pairs, alpha=alpha).reports["fused"]
        ok = ok and fresh.f_beta_max == f_max and fresh.auc == auc
    assert report("alpha-sweep cache soundness", ok)


def test_performance_budget():
    """One 224x224 pair, 400 superpixels: <= 30 s serial, <= 5 s at jobs=8."""
    pair = generate_synthetic_pair(99, SynthSpec(height=224, width=224))
    cfg = PipelineConfig()
    ip = ImagePair(pair_id="perf", before=pair.before, after=pair.after)

    start = time.perf_counter()
    serial = run_pair(cfg, ip, jobs=1)
    t_serial = time.perf_counter() - start

    start = time.perf_counter()
    parallel = run_pair(cfg, ip, jobs=8)
    t_parallel = time.perf_counter() - start

    identical = np.array_equal(serial.prob.values, parallel.prob.values)
    ok = t_serial <= 30.0 and t_parallel <= 5.0 and identical
    assert report(
        f"performance budget (serial {t_serial:.1f}s, jobs=8 {t_parallel:.1f}s)", ok
    )
