"""Architecture contracts: shapes, channel schedule, pooling, gradients."""

import numpy as np
import pytest
import torch

from ecgtrain import ModelSpec, build_model


class TestModelSpec:
    def test_default_channel_schedule(self):
        spec = ModelSpec()
        assert spec.channels() == [8, 8, 16, 16, 24, 24, 32, 32, 40, 40, 48, 48, 56, 56, 64]

    def test_pooling_on_odd_blocks(self):
        spec = ModelSpec()
        pools = spec.pools()
        assert [i + 1 for i, p in enumerate(pools) if p] == [1, 3, 5, 7, 9, 11, 13, 15]
        assert spec.num_pools() == 8

    def test_flattened_length(self):
        # 3050 halved (floor) eight times -> 11; 64 channels -> 704
        assert ModelSpec().flattened_len() == 64 * 11

    def test_invalid_specs_rejected(self):
        with pytest.raises(ValueError):
            ModelSpec(num_blocks=0)
        with pytest.raises(ValueError):
            ModelSpec(dropout_rate=1.0)
        with pytest.raises(ValueError):
            ModelSpec(input_len=100)  # too short for 8 pooling stages


class TestForward:
    def test_output_shape_and_softmax_rows(self):
        torch.manual_seed(0)
        model = build_model(ModelSpec(dropout_rate=0.3))
        model.eval()
        for batch_size in (1, 3):
            x = torch.randn(batch_size, 1, 3050)
            probs = model.predict_proba(x)
            assert probs.shape == (batch_size, 4)
            np.testing.assert_allclose(probs.sum(dim=1).detach().numpy(), 1.0, atol=1e-5)
            assert (probs >= 0).all()

    def test_total_pooling_factor(self):
        torch.manual_seed(0)
        model = build_model(ModelSpec())
        x = torch.randn(2, 1, 3050)
        for block in model.blocks:
            x = block(x)
        assert x.shape == (2, 64, 3050 // 2 ** 8)

    def test_initial_loss_is_ln4(self):
        torch.manual_seed(1)
        model = build_model(ModelSpec(dropout_rate=0.0))
        model.eval()
        x = torch.randn(8, 1, 3050)
        y = torch.randint(0, 4, (8,))
        with torch.no_grad():
            loss = torch.nn.functional.cross_entropy(model(x), y)
        assert abs(float(loss) - np.log(4)) <= 0.05

    def test_works_for_small_variants(self):
        torch.manual_seed(2)
        spec = ModelSpec(num_blocks=2, base_filters=4, conv_filter_length=8,
                         dropout_rate=0.0, input_len=64)
        model = build_model(spec)
        model.eval()
        assert model(torch.randn(4, 1, 64)).shape == (4, 4)


class TestGradients:
    def test_first_layer_gradients_match_finite_differences(self):
        # Central finite differences in float64 on a fixed micro-batch vs
        # autograd, on the tiny 2-block / 4-filter variant, eval mode.
        torch.manual_seed(3)
        spec = ModelSpec(num_blocks=2, base_filters=4, conv_filter_length=8,
                         dropout_rate=0.0, input_len=64)
        model = build_model(spec).double()
        # the head starts at zero, which would zero out upstream gradients
        torch.nn.init.normal_(model.head.weight, std=0.1)
        torch.nn.init.normal_(model.head.bias, std=0.1)
        model.eval()
        x = torch.randn(4, 1, 64, dtype=torch.float64)
        y = torch.tensor([0, 1, 2, 3])

        def loss_value():
            return torch.nn.functional.cross_entropy(model(x), y)

        loss = loss_value()
        loss.backward()
        weight = model.blocks[0].conv1.conv.weight
        analytic = weight.grad.detach().clone()

        rng = np.random.default_rng(0)
        flat_indices = rng.choice(weight.numel(), size=20, replace=False)
        eps = 1e-6
        for flat in flat_indices:
            idx = np.unravel_index(int(flat), weight.shape)
            original = weight.data[idx].item()
            with torch.no_grad():
                weight.data[idx] = original + eps
                up = float(loss_value())
                weight.data[idx] = original - eps
                down = float(loss_value())
                weight.data[idx] = original
            numeric = (up - down) / (2 * eps)
            denom = max(abs(numeric), abs(float(analytic[idx])), 1e-8)
            rel = abs(numeric - float(analytic[idx])) / denom
            assert rel <= 1e-3, f"coord {idx}: numeric {numeric} vs analytic {analytic[idx]}"
