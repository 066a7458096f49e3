"""Data-side interface of the layer-prediction network.

Implemented here: configuration checks, record loading, the channel layout
of network outputs, the recombination loss with its analytic gradient, and
writing predictions as layer files that the C++ tools read. Building and
training the hourglass network need a deep learning backend and are not
part of this package; those entry points raise NotImplementedError.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _core
from .manifest import Record, read_manifest

# Packed channel layout of a network output, in order.
LAYOUT = (("occlusion", 1), ("irradiance", 3), ("albedo", 3), ("specular", 3))
DIRECTIONAL_LAYOUT = (
    (("occlusion", 1), ("albedo", 3))
    + tuple((f"diffuse{i}", 3) for i in range(6))
    + tuple((f"specular{i}", 3) for i in range(6))
)


def layout(directional: bool):
    return DIRECTIONAL_LAYOUT if directional else LAYOUT


def channel_count(directional: bool) -> int:
    return sum(n for _, n in layout(directional))


@dataclass(frozen=True)
class NetworkConfig:
    input_res: int = 256
    down_blocks: int = 7
    base_channels: int = 32
    directional: bool = False
    # Bottleneck width as a multiple of the output channel count; defaults to
    # 4 for the four-layer variant and 6 for the six-direction one.
    bottleneck_factor: int | None = None

    @classmethod
    def toy(cls, directional: bool = False) -> NetworkConfig:
        return cls(input_res=64, down_blocks=5, base_channels=16, directional=directional)

    @property
    def output_channels(self) -> int:
        return channel_count(self.directional)

    @property
    def bottleneck_res(self) -> int:
        return self.input_res >> self.down_blocks

    @property
    def bottleneck_channels(self) -> int:
        factor = self.bottleneck_factor or (6 if self.directional else 4)
        return self.output_channels * factor

    def kernel_sizes(self) -> list[int]:
        """Per convolution, encoder first: 5x5 for the first and last two, else 3x3."""
        # down_blocks strided convs, 2 bottleneck convs, 2 per decoder block.
        count = self.down_blocks + 2 + 2 * self.down_blocks
        return [5 if i == 0 or i >= count - 2 else 3 for i in range(count)]

    def validate(self) -> None:
        if self.input_res <= 0 or self.down_blocks <= 0 or self.base_channels <= 0:
            raise ValueError("input_res, down_blocks and base_channels must be positive")
        if self.input_res % (1 << self.down_blocks):
            raise ValueError(f"input_res {self.input_res} is not divisible by 2^{self.down_blocks}")
        if self.bottleneck_res < 2:
            raise ValueError(f"{self.down_blocks} stride-2 stages reduce {self.input_res} below 2x2")
        if self.bottleneck_factor is not None and self.bottleneck_factor <= 0:
            raise ValueError("bottleneck_factor must be positive")


@dataclass(frozen=True)
class LossWeights:
    occlusion: float = 1.0
    irradiance: float = 1.0
    albedo: float = 1.0
    specular: float = 1.0
    r1: float = 1.0
    r2: float = 1.0
    r3: float = 1.0


@dataclass(frozen=True)
class TrainConfig:
    manifest: Path | None = None
    checkpoint_dir: Path = Path("checkpoints")
    learning_rate: float = 1e-3
    batch_size: int = 8
    steps: int = 2000
    seed: int = 0
    weights: LossWeights = field(default_factory=LossWeights)
    # "predicted" or "ground_truth": where the O divisor of r2/r3 and the S of r3 come from.
    residual_source: str = "predicted"

    def validate(self) -> None:
        if self.learning_rate <= 0 or self.batch_size <= 0 or self.steps <= 0:
            raise ValueError("learning_rate, batch_size and steps must be positive")
        if self.residual_source not in ("predicted", "ground_truth"):
            raise ValueError("residual_source must be 'predicted' or 'ground_truth'")
        if self.manifest is not None and not Path(self.manifest).exists():
            raise FileNotFoundError(self.manifest)


def pack_layers(layers: dict, directional: bool = False) -> np.ndarray:
    """Layer dict -> (H, W, 10) or (H, W, 40) float32 array."""
    parts = []
    for name, n in layout(directional):
        if directional and name[:-1] in ("diffuse", "specular") and name[-1].isdigit():
            a = np.asarray(layers[name[:-1]])[int(name[-1])]
        else:
            a = np.asarray(layers[name])
        parts.append(a.reshape(a.shape[0], a.shape[1], n))
    return np.concatenate(parts, axis=2).astype(np.float32)


def unpack_layers(packed: np.ndarray, directional: bool = False) -> dict:
    packed = np.asarray(packed, dtype=np.float32)
    if packed.ndim != 3 or packed.shape[2] != channel_count(directional):
        raise ValueError(f"expected (H, W, {channel_count(directional)}), got {packed.shape}")
    out, stacks, at = {}, {"diffuse": [], "specular": []}, 0
    for name, n in layout(directional):
        block = packed[:, :, at : at + n]
        at += n
        if n == 1:
            out[name] = np.ascontiguousarray(block[:, :, 0])
        elif directional and name[-1].isdigit():
            stacks[name[:-1]].append(block)
        else:
            out[name] = np.ascontiguousarray(block)
    if directional:
        out["diffuse"] = np.ascontiguousarray(np.stack(stacks["diffuse"]))
        out["specular"] = np.ascontiguousarray(np.stack(stacks["specular"]))
    return out


def load_record(record: Record) -> tuple[np.ndarray, np.ndarray]:
    """(linear input image, packed target layers) for one dataset record."""
    image = _core.gamma_decode(_core.read_png(record.composite), record.gamma)
    if record.directional:
        target = pack_layers(_core.read_directional_layers(record.path), directional=True)
    else:
        target = pack_layers(_core.read_layers(record.path))
    return image, target


def load_dataset(root: str | Path, directional: bool | None = None):
    """Yields (record, image, target) for every manifest entry, optionally filtered."""
    for record in read_manifest(root):
        if directional is None or record.directional == directional:
            yield (record, *load_record(record))


def prepare_input(image: np.ndarray, res: int) -> np.ndarray:
    """Pads a linear image to a square with white (1.0), then resamples to res x res."""
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape[:2]
    side = max(h, w)
    square = np.ones((side, side, 3))
    top, left = (side - h) // 2, (side - w) // 2
    square[top : top + h, left : left + w] = image
    # Bilinear, pixel-centre aligned, clamped at the border.
    coords = np.clip((np.arange(res) + 0.5) * side / res - 0.5, 0, side - 1)
    i0 = np.floor(coords).astype(int)
    i1 = np.minimum(i0 + 1, side - 1)
    f = coords - i0
    rows = square[i0] * (1 - f)[:, None, None] + square[i1] * f[:, None, None]
    out = rows[:, i0] * (1 - f)[None, :, None] + rows[:, i1] * f[None, :, None]
    return out.astype(np.float32)


def _aggregate(packed: np.ndarray, directional: bool):
    """(O, I, rho, S) views of a packed array; directional parts are summed."""
    if not directional:
        return packed[..., 0], packed[..., 1:4], packed[..., 4:7], packed[..., 7:10]
    diffuse = packed[..., 4:22].reshape(*packed.shape[:2], 6, 3).sum(axis=2)
    specular = packed[..., 22:40].reshape(*packed.shape[:2], 6, 3).sum(axis=2)
    return packed[..., 0], diffuse, packed[..., 1:4], specular


def recombination_loss_and_grad(
    pred: np.ndarray,
    image: np.ndarray,
    gt: np.ndarray,
    weights: LossWeights = LossWeights(),
    epsilon: float = _core.DEFAULT_EPSILON,
    residual_source: str = "predicted",
    directional: bool = False,
) -> tuple[float, np.ndarray]:
    """Per-layer L2 plus mean squared r1, r2, r3; gradient with respect to `pred`.

    r1 = C - O (I rho + S); r2 = C / O' - (I rho + S); r3 = C / O' - S' - I rho,
    where O' = max(O, epsilon) and S' = S, or the ground-truth O and S when
    residual_source is "ground_truth". Layer L2 terms are means over their
    values, residual terms means over pixels of the squared RGB norm.
    """
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    C = np.asarray(image, dtype=np.float64)
    if pred.shape != gt.shape or pred.shape[:2] != C.shape[:2] or pred.shape[2] != channel_count(directional):
        raise ValueError(f"shape mismatch: pred {pred.shape}, gt {gt.shape}, image {C.shape}")
    pixels = pred.shape[0] * pred.shape[1]
    grad = np.zeros_like(pred)
    loss = 0.0

    layer_weight = {
        "occlusion": weights.occlusion,
        "irradiance": weights.irradiance,
        "diffuse": weights.irradiance,
        "albedo": weights.albedo,
        "specular": weights.specular,
    }
    at = 0
    for name, n in layout(directional):
        w = layer_weight[name.rstrip("0123456789")]
        d = pred[..., at : at + n] - gt[..., at : at + n]
        loss += w * np.mean(d * d)
        grad[..., at : at + n] += w * 2.0 * d / d.size
        at += n

    O, I, rho, S = _aggregate(pred, directional)
    Og, _, _, Sg = _aggregate(gt, directional)
    X = I * rho + S
    use_gt = residual_source == "ground_truth"
    if residual_source not in ("predicted", "ground_truth"):
        raise ValueError("residual_source must be 'predicted' or 'ground_truth'")
    div_src = Og if use_gt else O
    div = np.maximum(div_src, epsilon)[..., None]
    unoccluded = C / div

    r1 = C - O[..., None] * X
    r2 = unoccluded - X
    r3 = unoccluded - (Sg if use_gt else S) - I * rho
    loss += weights.r1 * np.sum(r1 * r1) / pixels
    loss += weights.r2 * np.sum(r2 * r2) / pixels
    loss += weights.r3 * np.sum(r3 * r3) / pixels

    g1 = weights.r1 * 2.0 * r1 / pixels
    g2 = weights.r2 * 2.0 * r2 / pixels
    g3 = weights.r3 * 2.0 * r3 / pixels
    dO = -np.sum(g1 * X, axis=-1)
    dI = -(g1 * O[..., None] + g2 + g3) * rho
    drho = -(g1 * O[..., None] + g2 + g3) * I
    dS = -g1 * O[..., None] - g2 - (0.0 if use_gt else g3)
    if not use_gt:
        # d(C / max(O, eps)) / dO
        active = (O > epsilon)[..., None]
        dunocc = np.where(active, -C / (div * div), 0.0)
        dO += np.sum((g2 + g3) * dunocc, axis=-1)

    grad[..., 0] += dO
    if directional:
        grad[..., 1:4] += drho
        grad[..., 4:22] += np.repeat(dI[..., None, :], 6, axis=-2).reshape(*dI.shape[:2], 18)
        grad[..., 22:40] += np.repeat(dS[..., None, :], 6, axis=-2).reshape(*dS.shape[:2], 18)
    else:
        grad[..., 1:4] += dI
        grad[..., 4:7] += drho
        grad[..., 7:10] += dS
    return float(loss), grad


def recombination_loss(pred, image, gt, **kwargs) -> float:
    return recombination_loss_and_grad(pred, image, gt, **kwargs)[0]


def write_prediction(stem: str | Path, packed: np.ndarray, directional: bool = False) -> None:
    """Writes a packed network output as layer files under `stem`."""
    layers = unpack_layers(packed, directional)
    if directional:
        _core.write_directional_layers(stem, layers)
    else:
        _core.write_layers(stem, layers)


_NO_BACKEND = "network {} needs a deep learning backend, which this package does not include"


def build_network(cfg: NetworkConfig):
    cfg.validate()
    raise NotImplementedError(_NO_BACKEND.format("construction"))


def train(cfg: TrainConfig):
    cfg.validate()
    raise NotImplementedError(_NO_BACKEND.format("training"))


def infer(image_path: str | Path, checkpoint: str | Path, out_stem: str | Path, cfg: NetworkConfig | None = None):
    if not Path(checkpoint).exists():
        raise FileNotFoundError(checkpoint)
    raise NotImplementedError(_NO_BACKEND.format("inference"))
