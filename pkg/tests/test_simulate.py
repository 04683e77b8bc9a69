import numpy as np
import pytest

from audiofp.collate import collate_records
from audiofp.dsp import FrequencyFrame
from audiofp.simulate import (
    DeviceProfile,
    PopulationConfig,
    apply_variant,
    choose_variant,
    generate_population,
    paper_like_config,
    perturb,
    perturb_buffer,
    zipf_weights,
)
from audiofp.synth import AudioBuffer
from audiofp.vectors import VECTOR_ORDER, VectorId


def make_frame(seed=0, nbins=64, floor=-100.0):
    rng = np.random.default_rng(seed)
    return FrequencyFrame(rng.uniform(-80.0, -20.0, nbins), floor_db=floor)


class TestPerturb:
    def test_zero_fickleness_depends_only_on_class(self):
        frame = make_frame()
        a = DeviceProfile("cX", perturb_seed=1, variant_count=5, fickleness_p=0.0)
        b = DeviceProfile("cX", perturb_seed=2, variant_count=9, fickleness_p=0.0)
        for it in range(10):
            np.testing.assert_array_equal(
                perturb(frame, a, it).bins, perturb(frame, b, 0).bins
            )

    def test_repeatable_per_profile_iteration(self):
        frame = make_frame()
        p = DeviceProfile("cY", perturb_seed=3, variant_count=26, fickleness_p=0.8)
        for it in (0, 7, 29):
            np.testing.assert_array_equal(
                perturb(frame, p, it).bins, perturb(frame, p, it).bins
            )

    def test_variant_ceiling(self):
        frame = make_frame()
        p = DeviceProfile("cZ", perturb_seed=4, variant_count=26, fickleness_p=0.95)
        outputs = {perturb(frame, p, it).bins.tobytes() for it in range(30)}
        assert len(outputs) <= 26
        unlimited = {perturb(frame, p, it).bins.tobytes() for it in range(2000)}
        assert len(unlimited) == 26  # every variant eventually appears

    def test_base_offset_bounded(self):
        frame = make_frame()
        p = DeviceProfile("cB", perturb_seed=5)
        delta = perturb(frame, p, 0).bins - frame.bins
        assert np.all(np.abs(delta) <= 0.5 + 1e-12)

    def test_micro_offset_bounded(self):
        frame = make_frame()
        p = DeviceProfile("cM", perturb_seed=6, variant_count=4, fickleness_p=1.0)
        base = apply_variant(frame, p, 0).bins
        for v in range(1, 4):
            delta = apply_variant(frame, p, v).bins - base
            assert np.all(np.abs(delta) <= 0.05 + 1e-12)

    def test_respects_floor(self):
        frame = FrequencyFrame(np.full(32, -100.0), floor_db=-100.0)
        p = DeviceProfile("cF", perturb_seed=7)
        out = perturb(frame, p, 0)
        assert np.all(out.bins >= -100.0)

    def test_choose_variant_zero_when_calm(self):
        p = DeviceProfile("cC", perturb_seed=8, variant_count=10, fickleness_p=0.0)
        assert all(choose_variant(p, it) == 0 for it in range(50))

    def test_perturb_buffer_is_class_gain(self):
        buf = AudioBuffer(44100.0, np.linspace(-1, 1, 100))
        p1 = DeviceProfile("cG1")
        p2 = DeviceProfile("cG2")
        out1 = perturb_buffer(buf, p1)
        out2 = perturb_buffer(buf, p2)
        ratio = out1.samples[1:] / buf.samples[1:]
        assert np.allclose(ratio, ratio[0])  # pure gain
        assert abs(20 * np.log10(abs(ratio[0]))) <= 0.5 + 1e-12
        assert not np.array_equal(out1.samples, out2.samples)


class TestPopulationConfig:
    def test_zipf_weights_normalized(self):
        w = zipf_weights(95, 1.2)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.diff(w) < 0)

    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            PopulationConfig(num_users=5, num_classes=3, class_weights=[0.5, 0.2, 0.2])

    def test_rejects_bad_mix(self):
        with pytest.raises(ValueError):
            PopulationConfig(
                num_users=5, num_classes=3, browser_mix={"chrome": 0.7, "firefox": 0.2}
            )

    def test_rejects_missing_fickleness_family(self):
        with pytest.raises(ValueError):
            PopulationConfig(
                num_users=5,
                num_classes=3,
                browser_mix={"brave": 1.0},
            )


class TestGeneratePopulation:
    def test_single_class_no_fickleness_collates_to_one(self):
        cfg = PopulationConfig(
            num_users=12,
            num_classes=1,
            seed=5,
            iterations=4,
            family_fickleness={"chrome": (1, 0.0), "firefox": (1, 0.0)},
        )
        records = generate_population(cfg)
        for v in VECTOR_ORDER:
            graph = collate_records(records, v)
            assert graph.component_count() == 1

    def test_c_classes_no_fickleness_collate_to_c(self):
        cfg = PopulationConfig(
            num_users=40,
            num_classes=6,
            seed=6,
            iterations=3,
            family_fickleness={"chrome": (1, 0.0), "firefox": (1, 0.0)},
        )
        records = generate_population(cfg)
        for v in VECTOR_ORDER:
            graph = collate_records(records, v)
            assert graph.component_count() == 6

    def test_same_seed_bit_identical(self):
        cfg = lambda: PopulationConfig(num_users=15, num_classes=4, seed=77, iterations=3)
        a = generate_population(cfg())
        b = generate_population(cfg())
        for ra, rb in zip(a, b):
            assert ra.user_id == rb.user_id
            assert ra.ua == rb.ua
            assert ra.canvas == rb.canvas
            assert ra.timestamp == rb.timestamp
            for v in VECTOR_ORDER:
                assert [r.fingerprint for r in ra.per_vector[v]] == [
                    r.fingerprint for r in rb.per_vector[v]
                ]

    def test_zero_fickleness_min_max_one(self, quiet_population):
        from audiofp.collate import distinct_per_user

        for v in VECTOR_ORDER:
            lo, hi, mean = distinct_per_user(quiet_population, v)
            assert (lo, hi, mean) == (1, 1, 1.0)

    def test_variant_sets_of_distinct_classes_never_collide(self, fickle_population):
        # digests seen per class never overlap across classes
        by_class: dict = {}
        for rec in fickle_population:
            # class identity is recoverable through the DC digest (one per class)
            key = rec.per_vector[VectorId.DC][0].fingerprint.digest
            pool = by_class.setdefault(key, set())
            for v in VECTOR_ORDER:
                pool.update(r.fingerprint.digest for r in rec.per_vector[v])
        pools = list(by_class.values())
        for i in range(len(pools)):
            for j in range(i + 1, len(pools)):
                assert not (pools[i] & pools[j])

    def test_ua_reflects_family_and_classes_are_homogeneous(self, fickle_population):
        from audiofp.analysis import ua_family

        graph = collate_records(fickle_population, VectorId.FFT)
        labels = graph.components().labels
        fams_by_cluster: dict = {}
        for rec in fickle_population:
            fams_by_cluster.setdefault(labels[rec.user_id], set()).add(
                ua_family(rec.ua)
            )
        assert all(len(fams) == 1 for fams in fams_by_cluster.values())

    def test_paper_like_config_shape(self):
        cfg = paper_like_config()
        assert cfg.num_users == 2093
        assert cfg.num_classes == 95
        assert abs(sum(cfg.browser_mix.values()) - 1.0) < 1e-9
