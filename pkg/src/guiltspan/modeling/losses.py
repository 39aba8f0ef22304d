"""Training objectives: rating MSE, token-level rationale MSE, joint sum.

Rating loss: J_r = (1/m) sum_i 0.5 * (pred_i - y_i)^2.
Token loss: per example, 0.5 squared errors averaged over that example's
supervised positions, then averaged over the batch; padded and
special-marker positions carry no target and contribute nothing.
Joint: J = J_r + lambda * J_t.

Note the evaluation metric elsewhere is plain MSE without the 1/2.
"""

import torch


def loss_rating(predictions: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    if predictions.numel() == 0:
        raise ValueError("empty batch")
    return 0.5 * ((predictions - targets) ** 2).mean()


def loss_token(
    predictions: torch.Tensor, targets: torch.Tensor, target_mask: torch.Tensor
) -> torch.Tensor:
    """predictions/targets: [B, T]; target_mask: [B, T] bool, True = supervised."""
    if predictions.numel() == 0:
        raise ValueError("empty batch")
    mask = target_mask.to(predictions.dtype)
    per_position = 0.5 * (predictions - targets) ** 2 * mask
    counts = mask.sum(dim=1)
    if (counts == 0).any():
        raise ValueError("example with no supervised token positions")
    per_example = per_position.sum(dim=1) / counts
    return per_example.mean()


def loss_joint(j_rating: torch.Tensor, j_token: torch.Tensor, lam: float) -> torch.Tensor:
    if lam < 0:
        raise ValueError("loss ratio must be nonnegative")
    if lam == 0:
        return j_rating  # exact degeneracy, no 0 * J_t roundoff term
    return j_rating + lam * j_token
