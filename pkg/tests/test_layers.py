import numpy as np
import pytest
import torch
import torch.nn.functional as F

import oracles
from fegan.errors import InvalidArgument
from fegan.layers import (
    AttentionNorm,
    DilatedResidualBlock,
    PartialConv2d,
    channel_stats,
    normalize_channels,
    resize_condition,
)


def finite_difference_gradient(fn, tensor, eps=1e-6):
    """Central finite differences of a scalar function w.r.t. every element."""
    grad = torch.zeros_like(tensor)
    flat = tensor.view(-1)
    gflat = grad.view(-1)
    for i in range(flat.numel()):
        orig = flat[i].item()
        flat.data[i] = orig + eps
        f_plus = fn().item()
        flat.data[i] = orig - eps
        f_minus = fn().item()
        flat.data[i] = orig
        gflat[i] = (f_plus - f_minus) / (2 * eps)
    return grad


def assert_grads_match(fn, tensors, rel_tol=1e-3):
    out = fn()
    analytic = torch.autograd.grad(out, tensors, retain_graph=False, allow_unused=False)
    for tensor, an in zip(tensors, analytic):
        fd = finite_difference_gradient(fn, tensor)
        denom = torch.maximum(an.abs(), fd.abs())
        mask = denom > 1e-6
        if mask.any():
            rel = ((an - fd).abs() / denom)[mask]
            assert float(rel.max()) < rel_tol, f"max rel grad error {float(rel.max()):.2e}"
        assert float((an - fd).abs()[~mask].max() if (~mask).any() else 0.0) < 1e-6


def anl_params_dict(module):
    return {
        "embed_w": module.embed.weight.detach().numpy().astype(np.float64),
        "embed_b": module.embed.bias.detach().numpy().astype(np.float64),
        "att_w": module.attention.weight.detach().numpy().astype(np.float64),
        "att_b": module.attention.bias.detach().numpy().astype(np.float64),
        "bias_w": module.bias.weight.detach().numpy().astype(np.float64),
        "bias_b": module.bias.bias.detach().numpy().astype(np.float64),
        "post_w": module.post.weight.detach().numpy().astype(np.float64),
        "post_b": module.post.bias.detach().numpy().astype(np.float64),
    }


class TestChannelStats:
    def test_constant_channel(self):
        x = torch.full((2, 3, 4, 4), 3.0)
        mu, sigma = channel_stats(x)
        assert torch.allclose(mu, torch.full((3,), 3.0))
        assert torch.allclose(sigma, torch.full((3,), float(np.sqrt(1e-5))), atol=1e-7)

    def test_two_point_channel(self):
        x = torch.tensor([1.0, 3.0]).view(1, 1, 1, 2)
        mu, sigma = channel_stats(x)
        assert float(mu) == pytest.approx(2.0)
        assert float(sigma) == pytest.approx(1.0, abs=1e-4)

    def test_matches_scalar_oracle(self, rng):
        x = rng.standard_normal((2, 3, 4, 4))
        mu, sigma = channel_stats(torch.from_numpy(x))
        mu_o, sigma_o = oracles.channel_stats_oracle(x)
        assert np.allclose(mu.numpy(), mu_o, atol=1e-6)
        assert np.allclose(sigma.numpy(), sigma_o, atol=1e-6)

    def test_normalization_property(self, rng):
        x = torch.from_numpy(rng.standard_normal((4, 8, 16, 16)).astype(np.float32))
        xhat = normalize_channels(x)
        mean = xhat.mean(dim=(0, 2, 3))
        var = xhat.var(dim=(0, 2, 3), unbiased=False)
        assert float(mean.abs().max()) <= 1e-4
        assert float((var - 1).abs().max()) <= 1e-3


class TestAttentionNorm:
    def test_output_channel_count(self):
        for channels, out_channels in ((4, None), (6, 3)):
            module = AttentionNorm(channels, out_channels=out_channels)
            x = torch.randn(2, channels, 8, 8)
            d = torch.randn(2, 5, 8, 8)
            out = module(x, d)
            expected = (out_channels or channels) + channels
            assert out.shape == (2, expected, 8, 8)

    def test_zeroed_heads_give_half_attention_zero_bias(self):
        module = AttentionNorm(3)
        with torch.no_grad():
            module.attention.weight.zero_()
            module.attention.bias.zero_()
            module.bias.weight.zero_()
            module.bias.bias.zero_()
        d = torch.randn(1, 5, 6, 6)
        emb = F.relu(module.embed(d))
        alpha = torch.sigmoid(module.attention(emb))
        beta = module.bias(emb)
        assert torch.all(alpha == 0.5)
        assert torch.all(beta == 0.0)

    def test_alpha_strictly_inside_unit_interval(self):
        module = AttentionNorm(4)
        with torch.no_grad():
            d = torch.randn(2, 5, 8, 8) * 3
            emb = F.relu(module.embed(d))
            alpha = torch.sigmoid(module.attention(emb))
        assert float(alpha.min()) > 0.0
        assert float(alpha.max()) < 1.0

    def test_matches_scalar_oracle(self, rng):
        module = AttentionNorm(2, cond_channels=3, embed_channels=4).double()
        x = rng.standard_normal((1, 2, 2, 2))
        d = rng.standard_normal((1, 3, 2, 2))
        out = module(torch.from_numpy(x), torch.from_numpy(d))
        expected = oracles.attention_normalize_oracle(x, d, anl_params_dict(module))
        assert np.allclose(out.detach().numpy(), expected, atol=1e-5)

    def test_spatial_mismatch_is_internal_error(self):
        module = AttentionNorm(2)
        with pytest.raises(RuntimeError):
            module(torch.randn(1, 2, 8, 8), torch.randn(1, 5, 4, 4))

    def test_batch_order_equivariance(self):
        module = AttentionNorm(3)
        x = torch.randn(3, 3, 6, 6)
        d = torch.randn(3, 5, 6, 6)
        perm = torch.tensor([2, 0, 1])
        out = module(x, d)
        out_perm = module(x[perm], d[perm])
        assert torch.allclose(out[perm], out_perm, atol=1e-6)

    def test_gradients_match_finite_differences(self, rng):
        module = AttentionNorm(2, cond_channels=2, embed_channels=3).double()
        x = torch.from_numpy(rng.standard_normal((1, 2, 4, 4))).requires_grad_(True)
        d = torch.from_numpy(rng.standard_normal((1, 2, 4, 4))).requires_grad_(True)
        weight = torch.from_numpy(rng.standard_normal((4, 4, 4)))

        def fn():
            return (module(x, d) * weight).sum()

        tensors = [x, d, module.attention.weight, module.post.weight, module.embed.bias]
        assert_grads_match(fn, tensors)


class TestPartialConv:
    def test_all_ones_mask_equals_plain_convolution(self):
        # padding=0 keeps every window fully covered, so the renormalizer is
        # exactly k^2 / k^2 = 1
        module = PartialConv2d(2, 3, kernel_size=3, padding=0)
        x = torch.randn(1, 2, 6, 6)
        mask = torch.ones(1, 1, 6, 6)
        out, new_mask = module(x, mask)
        plain = F.conv2d(x, module.weight, module.bias)
        assert torch.allclose(out, plain, atol=1e-5)
        assert torch.all(new_mask == 1)

    def test_all_zero_mask_yields_bias(self):
        module = PartialConv2d(2, 3, kernel_size=3, padding=1)
        x = torch.randn(1, 2, 5, 5)
        out, new_mask = module(x, torch.zeros(1, 1, 5, 5))
        assert torch.all(new_mask == 0)
        assert torch.allclose(out, module.bias.view(1, 3, 1, 1).expand_as(out))

    def test_matches_window_loop_oracle(self, rng):
        module = PartialConv2d(1, 1, kernel_size=3, padding=1).double()
        x = rng.standard_normal((1, 1, 5, 5))
        mask = (rng.random((5, 5)) < 0.6).astype(np.float64)
        out, new_mask = module(torch.from_numpy(x), torch.from_numpy(mask).view(1, 1, 5, 5))
        expected, expected_mask = oracles.partial_conv_oracle(
            x, mask, module.weight.detach().numpy(), module.bias.detach().numpy(), padding=1
        )
        assert np.allclose(out.detach().numpy(), expected, atol=1e-6)
        assert np.array_equal(new_mask.squeeze().numpy(), expected_mask)

    def test_strided_oracle_agreement(self, rng):
        module = PartialConv2d(2, 2, kernel_size=3, stride=2, padding=1).double()
        x = rng.standard_normal((1, 2, 7, 7))
        mask = (rng.random((7, 7)) < 0.5).astype(np.float64)
        out, new_mask = module(torch.from_numpy(x), torch.from_numpy(mask).view(1, 1, 7, 7))
        expected, expected_mask = oracles.partial_conv_oracle(
            x, mask, module.weight.detach().numpy(), module.bias.detach().numpy(), stride=2, padding=1
        )
        assert np.allclose(out.detach().numpy(), expected, atol=1e-6)
        assert np.array_equal(new_mask.squeeze().numpy(), expected_mask)

    def test_invalid_region_isolated_from_input(self, rng):
        module = PartialConv2d(1, 2, kernel_size=3, padding=1)
        mask = torch.zeros(1, 1, 8, 8)
        mask[..., :, :3] = 1.0  # columns >= 5 are fully invalid for a 3x3 window
        x = torch.from_numpy(rng.standard_normal((1, 1, 8, 8)).astype(np.float32))
        with torch.no_grad():
            out1, _ = module(x, mask)
            perturbed = x.clone()
            perturbed[..., :, 5:] += torch.randn(1, 1, 8, 3) * 100
            out2, _ = module(perturbed, mask)
        invalid = torch.zeros(8, 8, dtype=torch.bool)
        invalid[:, 5:] = True
        assert float((out1 - out2)[..., invalid].abs().max()) == 0.0

    def test_mask_never_shrinks_for_stride_one(self, rng):
        layers = [PartialConv2d(1, 1, kernel_size=3, padding=1) for _ in range(3)]
        x = torch.randn(1, 1, 10, 10)
        mask = (torch.rand(1, 1, 10, 10) < 0.3).float()
        for layer in layers:
            x, new_mask = layer(x, mask)
            assert torch.all(new_mask >= mask)
            mask = new_mask

    def test_even_kernel_rejected(self):
        with pytest.raises(InvalidArgument):
            PartialConv2d(1, 1, kernel_size=4)

    def test_gradients_match_finite_differences(self, rng):
        module = PartialConv2d(2, 2, kernel_size=3, padding=1).double()
        x = torch.from_numpy(rng.standard_normal((1, 2, 4, 4))).requires_grad_(True)
        mask = torch.from_numpy((rng.random((1, 1, 4, 4)) < 0.7).astype(np.float64))
        weight = torch.from_numpy(rng.standard_normal((2, 4, 4)))

        def fn():
            out, _ = module(x, mask)
            return (out * weight).sum()

        assert_grads_match(fn, [x, module.weight, module.bias])


class TestDilatedResidualBlock:
    def test_zeroed_block_is_identity(self):
        block = DilatedResidualBlock(3, dilation=2)
        with torch.no_grad():
            for param in block.parameters():
                param.zero_()
        x = torch.randn(2, 3, 8, 8)
        assert torch.equal(block(x), x)

    def test_shape_preserved(self):
        block = DilatedResidualBlock(4, dilation=4)
        for h, w in ((8, 8), (13, 9), (16, 24)):
            assert block(torch.randn(1, 4, h, w)).shape == (1, 4, h, w)

    def test_receptive_field_reaches_offset_two(self):
        block = DilatedResidualBlock(1, dilation=2)
        x = torch.zeros(1, 1, 9, 9)
        base = block(x)
        probe = x.clone()
        probe[0, 0, 4 + 2, 4] = 1.0  # distance-2 perturbation
        moved = block(probe)
        assert float((moved - base)[0, 0, 4, 4].abs()) > 0.0

    def test_gradients_match_finite_differences(self, rng):
        block = DilatedResidualBlock(2, dilation=2).double()
        x = torch.from_numpy(rng.standard_normal((1, 2, 4, 4))).requires_grad_(True)
        weight = torch.from_numpy(rng.standard_normal((2, 4, 4)))

        def fn():
            return (block(x) * weight).sum()

        assert_grads_match(fn, [x, block.conv1.weight, block.conv2.bias])


class TestResizeCondition:
    def test_passthrough_when_sizes_match(self):
        cond = torch.randn(1, 5, 8, 8)
        assert resize_condition(cond, (8, 8)) is cond

    def test_sketch_channel_stays_binary(self):
        cond = torch.zeros(1, 5, 8, 8)
        cond[:, 0] = (torch.rand(8, 8) < 0.5).float()
        down = resize_condition(cond, (4, 4))
        assert set(torch.unique(down[:, 0]).tolist()) <= {0.0, 1.0}
