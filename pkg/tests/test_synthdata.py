import numpy as np
import pytest

from fedcollab.synthdata import (SyntheticConfig, competing_matrix, generate_task,
                                 polynomial_features, preset, strong_noniid_config,
                                 weak_noniid_config)


class TestConfigValidation:
    def test_sample_count_mismatch(self):
        with pytest.raises(ValueError):
            SyntheticConfig(n=2, samples=(10,), flipped=(False, False))

    def test_negative_rho(self):
        with pytest.raises(ValueError):
            SyntheticConfig(n=1, samples=(10,), flipped=(False,), rho=-0.1)

    def test_bad_val_fraction(self):
        with pytest.raises(ValueError):
            SyntheticConfig(n=1, samples=(10,), flipped=(False,), val_fraction=1.5)


class TestPresets:
    def test_weak_preset_values(self):
        cfg, edges = preset("weak_noniid", seed=3)
        assert cfg.rho == 0.01
        assert cfg.samples == (2000, 2000, 100, 100, 2000, 2000, 100, 100)
        assert cfg.flipped == (False,) * 8
        assert cfg.seed == 3
        assert len(edges) == 8

    def test_strong_preset_values(self):
        cfg, edges = preset("strong_noniid")
        assert cfg.samples == (2000,) * 8
        assert cfg.flipped == (False,) * 4 + (True,) * 4
        assert len(edges) == 8

    def test_unknown_preset(self):
        with pytest.raises(ValueError, match="unknown preset"):
            preset("nope")

    def test_competing_matrix_symmetric(self):
        _, edges = preset("strong_noniid")
        s = competing_matrix(8, edges)
        assert np.array_equal(s, s.T) and not s.diagonal().any()


class TestGeneration:
    def test_zero_rho_no_flips_shares_weights(self):
        cfg = SyntheticConfig(n=4, samples=(50,) * 4, flipped=(False,) * 4, rho=0.0, seed=1)
        task = generate_task(cfg)
        for i in range(1, 4):
            assert np.array_equal(task.weights[i], task.weights[0])

    def test_deterministic_in_seed(self):
        cfg = weak_noniid_config(seed=5)
        t1, t2 = generate_task(cfg), generate_task(cfg)
        for i in range(8):
            assert np.array_equal(t1.features[i], t2.features[i])
            assert np.array_equal(t1.labels[i], t2.labels[i])
            assert np.array_equal(t1.train_idx[i], t2.train_idx[i])
        assert np.array_equal(t1.weights, t2.weights)

    def test_different_seed_changes_data(self):
        t1 = generate_task(weak_noniid_config(seed=5))
        t2 = generate_task(weak_noniid_config(seed=6))
        assert not np.array_equal(t1.features[0], t2.features[0])

    def test_split_sizes_and_feature_range(self):
        task = generate_task(strong_noniid_config(seed=2))
        for i in range(8):
            m = task.config.samples[i]
            assert len(task.val_idx[i]) == round(0.2 * m)
            assert len(task.train_idx[i]) == m - round(0.2 * m)
            assert set(task.val_idx[i]) | set(task.train_idx[i]) == set(range(m))
            assert np.abs(task.features[i]).max() <= 1.0

    def test_labels_match_generative_model(self):
        cfg = SyntheticConfig(n=2, samples=(4000, 4000), flipped=(False, True),
                              rho=0.05, seed=9)
        task = generate_task(cfg)
        for i, sign in ((0, 1.0), (1, -1.0)):
            clean = sign * polynomial_features(task.features[i], 3) @ task.weights[i]
            residual = task.labels[i] - clean
            assert abs(residual.mean()) < 0.01
            assert abs(residual.std() - cfg.noise_std) < 0.01

    def test_single_sample_participant(self):
        cfg = SyntheticConfig(n=1, samples=(1,), flipped=(False,), seed=0)
        task = generate_task(cfg)
        assert task.train_idx[0].tolist() == [0]
        assert task.val_idx[0].tolist() == [0]

    def test_weights_built_from_shared_base(self):
        cfg = SyntheticConfig(n=6, samples=(10,) * 6, flipped=(False,) * 6,
                              rho=0.001, seed=4)
        task = generate_task(cfg)
        spread = task.weights.max(axis=0) - task.weights.min(axis=0)
        assert spread.max() < 0.01  # perturbations stay near the shared base
