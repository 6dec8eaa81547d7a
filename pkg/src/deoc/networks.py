"""Generator, discriminator, attribute classifier, and the frozen
perceptual feature extractor."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import engine, nn
from .engine import Tensor
from .errors import InvalidTap, ShapeMismatch


def _check_batch(x: Tensor, name: str):
    if x.ndim != 4 or x.shape[1] != 3:
        raise ShapeMismatch(f"{name}: expected (B,3,H,W), got {x.shape}")


@dataclass
class GeneratorConfig:
    base_channels: int = 64
    depth: int = 4
    attribute_injection: bool = False
    n_attributes: int = 0
    inject_channels: int = 64
    image_height: int = 320
    image_width: int = 128
    init_seed: int = 0

    @property
    def channel_schedule(self) -> list[int]:
        return [self.base_channels * 2 ** k for k in range(self.depth)]

    @property
    def bottleneck_channels(self) -> int:
        return self.base_channels * 2 ** self.depth


@dataclass
class DiscriminatorConfig:
    base_channels: int = 64
    image_height: int = 320
    image_width: int = 128
    leaky_slope: float = 0.2
    init_seed: int = 1


@dataclass
class ClassifierConfig:
    n_attributes: int = 8
    backbone: str = "conv6"
    base_channels: int = 32
    init_seed: int = 2


@dataclass(frozen=True)
class FeatureTapSet:
    """Taps (stage, conv) of the 13-conv extractor, 1-based; activation is
    taken after the conv's ReLU, before the stage's pooling."""
    taps: tuple[tuple[int, int], ...] = ((1, 2), (2, 2), (3, 3), (4, 3))

    def validate(self, stage_sizes: list[int]):
        for (i, j) in self.taps:
            if not (1 <= i <= len(stage_sizes)) or not (1 <= j <= stage_sizes[i - 1]):
                raise InvalidTap(f"tap ({i},{j}) not in the extractor layout")


@dataclass
class ExtractorConfig:
    taps: FeatureTapSet = field(default_factory=FeatureTapSet)
    init_seed: int = 3
    weights_file: str | None = None  # optional .npz with pretrained conv arrays


def _double_conv(in_ch: int, out_ch: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, 3), nn.BatchNorm2d(out_ch), nn.ReLU(),
        nn.Conv2d(out_ch, out_ch, 3), nn.BatchNorm2d(out_ch), nn.ReLU(),
    )


class UNetGenerator(nn.Module):
    """Encoder-decoder with skip concatenation.

    Four down blocks (2x conv3x3+BN+ReLU, then 2x2 max-pool), a double-conv
    bottleneck, four mirrored up blocks (nearest 2x upsample, skip concat,
    2x conv3x3+BN+ReLU), then a 1x1 conv to RGB and tanh. Takes no noise
    input; when attribute injection is on, a learned map of the attribute
    vector is concatenated onto the bottleneck.
    """

    def __init__(self, cfg: GeneratorConfig):
        super().__init__()
        self.cfg = cfg
        chans = cfg.channel_schedule
        in_ch = 3
        for k, ch in enumerate(chans):
            setattr(self, f"down{k + 1}", _double_conv(in_ch, ch))
            in_ch = ch
        self.pool = nn.MaxPool2x2()
        self.up = nn.UpsampleNearest2x()
        self.bottleneck = _double_conv(chans[-1], cfg.bottleneck_channels)

        bott_ch = cfg.bottleneck_channels
        if cfg.attribute_injection:
            if cfg.n_attributes < 1:
                raise ShapeMismatch("attribute_injection requires n_attributes >= 1")
            hb = cfg.image_height // 2 ** cfg.depth
            wb = cfg.image_width // 2 ** cfg.depth
            self._bott_hw = (hb, wb)
            self.inject_fc = nn.Linear(cfg.n_attributes, cfg.inject_channels * hb * wb)
            bott_ch += cfg.inject_channels
        prev = bott_ch
        for k in reversed(range(cfg.depth)):
            setattr(self, f"up{k + 1}", _double_conv(prev + chans[k], chans[k]))
            prev = chans[k]
        self.final = nn.Conv2d(chans[0], 3, 1)
        self.act = nn.Tanh()
        nn.init_dcgan(self, np.random.default_rng(np.random.SeedSequence(cfg.init_seed)))

    def inject_attributes(self, bottleneck: Tensor, attrs: Tensor) -> Tensor:
        """FC-map the attribute vector, reshape to C_inj x Hb x Wb, concat."""
        b = bottleneck.shape[0]
        hb, wb = bottleneck.shape[2], bottleneck.shape[3]
        if attrs.ndim != 2 or attrs.shape != (b, self.cfg.n_attributes):
            raise ShapeMismatch(
                f"attrs: expected ({b},{self.cfg.n_attributes}), got {attrs.shape}")
        if (hb, wb) != self._bott_hw:
            raise ShapeMismatch(
                f"bottleneck {hb}x{wb} differs from configured {self._bott_hw}; "
                "attribute injection fixes the input dims")
        v = self.inject_fc(attrs)
        v = engine.reshape(v, (b, self.cfg.inject_channels, hb, wb))
        return engine.concat([bottleneck, v], axis=1)

    def forward(self, x: Tensor, attrs: Tensor | None = None,
                zero_bottleneck: bool = False) -> Tensor:
        _check_batch(x, "generator")
        h, w = x.shape[2], x.shape[3]
        if h % 16 or w % 16:
            raise ShapeMismatch(f"generator input dims must be divisible by 16, got {h}x{w}")
        if self.cfg.attribute_injection and attrs is None:
            raise ShapeMismatch("attribute_injection is on: attrs batch required")
        if not self.cfg.attribute_injection and attrs is not None:
            raise ShapeMismatch("attrs passed but attribute_injection is off")

        skips = []
        t = x
        for k in range(self.cfg.depth):
            t = getattr(self, f"down{k + 1}")(t)
            skips.append(t)
            t = self.pool(t)
        t = self.bottleneck(t)
        if zero_bottleneck:
            t = engine.mul(t, 0.0)
        if self.cfg.attribute_injection:
            t = self.inject_attributes(t, attrs)
        for k in reversed(range(self.cfg.depth)):
            t = self.up(t)
            t = engine.concat([t, skips[k]], axis=1)
            t = getattr(self, f"up{k + 1}")(t)
        return self.act(self.final(t))


class Discriminator(nn.Module):
    """Four 5x5/stride-2 convs (64..512), LeakyReLU 0.2, batch-norm on
    layers 2-4, then flatten, one FC unit, sigmoid. Sees images only: the
    occluded input is never concatenated."""

    def __init__(self, cfg: DiscriminatorConfig):
        super().__init__()
        self.cfg = cfg
        if cfg.image_height % 16 or cfg.image_width % 16:
            raise ShapeMismatch("discriminator dims must be divisible by 16")
        b = cfg.base_channels
        chans = [b, b * 2, b * 4, b * 8]
        in_ch = 3
        for k, ch in enumerate(chans):
            setattr(self, f"conv{k + 1}", nn.Conv2d(in_ch, ch, 5, stride=2))
            if k > 0:
                setattr(self, f"bn{k + 1}", nn.BatchNorm2d(ch))
            in_ch = ch
        self.lrelu = nn.LeakyReLU(cfg.leaky_slope)
        self._flat = chans[-1] * (cfg.image_height // 16) * (cfg.image_width // 16)
        self.fc = nn.Linear(self._flat, 1)
        nn.init_dcgan(self, np.random.default_rng(np.random.SeedSequence(cfg.init_seed)))

    def forward(self, x: Tensor) -> Tensor:
        _check_batch(x, "discriminator")
        if (x.shape[2], x.shape[3]) != (self.cfg.image_height, self.cfg.image_width):
            raise ShapeMismatch(
                f"discriminator expects {self.cfg.image_height}x{self.cfg.image_width}, "
                f"got {x.shape[2]}x{x.shape[3]}")
        t = self.lrelu(self.conv1(x))
        for k in range(2, 5):
            t = self.lrelu(getattr(self, f"bn{k}")(getattr(self, f"conv{k}")(t)))
        t = engine.reshape(t, (x.shape[0], self._flat))
        return engine.sigmoid(self.fc(t))

    def feature_map_shape(self) -> tuple[int, int, int]:
        return (self.cfg.base_channels * 8,
                self.cfg.image_height // 16, self.cfg.image_width // 16)


class AttributeClassifier(nn.Module):
    """Desk-scale multi-attribute classifier: six stride-2 conv blocks,
    global average pooling, FC head with one sigmoid per attribute. The
    backbone is configurable so a deeper residual layout can be slotted in
    when pretrained weights exist."""

    def __init__(self, cfg: ClassifierConfig):
        super().__init__()
        if cfg.backbone != "conv6":
            raise ValueError(f"unknown classifier backbone {cfg.backbone!r}")
        self.cfg = cfg
        b = cfg.base_channels
        chans = [b, b * 2, b * 4, b * 8, b * 16, b * 16]
        in_ch = 3
        for k, ch in enumerate(chans):
            setattr(self, f"block{k + 1}", nn.Sequential(
                nn.Conv2d(in_ch, ch, 3, stride=2), nn.BatchNorm2d(ch), nn.ReLU()))
            in_ch = ch
        self.head = nn.Linear(chans[-1], cfg.n_attributes)
        nn.init_dcgan(self, np.random.default_rng(np.random.SeedSequence(cfg.init_seed)))

    def forward(self, x: Tensor) -> Tensor:
        _check_batch(x, "classifier")
        t = x
        for k in range(1, 7):
            t = getattr(self, f"block{k}")(t)
        t = engine.mean_hw(t)
        return engine.sigmoid(self.head(t))


#: conv widths per pool stage of the 16-layer perceptual extractor layout
VGG16_STAGES: list[list[int]] = [
    [64, 64], [128, 128], [256, 256, 256], [512, 512, 512], [512, 512, 512],
]


class FeatureExtractor(nn.Module):
    """VGG16-layout conv stack used only as a fixed measuring stick.

    Weights are either loaded from an .npz of pretrained arrays or drawn
    once from a seeded He-normal init; they are frozen either way and never
    receive gradient updates.
    """

    def __init__(self, cfg: ExtractorConfig):
        super().__init__()
        self.cfg = cfg
        cfg.taps.validate([len(s) for s in VGG16_STAGES])
        in_ch = 3
        for i, stage in enumerate(VGG16_STAGES, start=1):
            for j, ch in enumerate(stage, start=1):
                setattr(self, f"conv{i}_{j}", nn.Conv2d(in_ch, ch, 3))
                in_ch = ch
        self.pool = nn.MaxPool2x2()
        if cfg.weights_file:
            self._load_npz(cfg.weights_file)
        else:
            nn.init_he(self, np.random.default_rng(np.random.SeedSequence(cfg.init_seed)))
        self.requires_grad_(False)
        self.eval()

    def _load_npz(self, path: str):
        arrs = np.load(path)
        for name, p in self.named_parameters():
            key = name.replace(".", "/")
            if key not in arrs:
                raise KeyError(f"pretrained file missing array {key}")
            if arrs[key].shape != p.data.shape:
                raise ShapeMismatch(f"{key}: {arrs[key].shape} vs {p.data.shape}")
            p.data = arrs[key].astype(p.data.dtype)

    def extract(self, x: Tensor, taps: FeatureTapSet | None = None) -> list[Tensor]:
        """Post-ReLU activations at each requested (stage, conv), in tap order."""
        _check_batch(x, "feature extractor")
        taps = taps or self.cfg.taps
        taps.validate([len(s) for s in VGG16_STAGES])
        wanted = set(taps.taps)
        deepest_stage = max(i for i, _ in taps.taps)
        found: dict[tuple[int, int], Tensor] = {}
        t = x
        for i, stage in enumerate(VGG16_STAGES, start=1):
            if i > deepest_stage:
                break
            for j in range(1, len(stage) + 1):
                t = engine.relu(getattr(self, f"conv{i}_{j}")(t))
                if (i, j) in wanted:
                    found[(i, j)] = t
            if i < deepest_stage:
                t = self.pool(t)
        return [found[t_] for t_ in taps.taps]

    def forward(self, x: Tensor) -> list[Tensor]:
        return self.extract(x)
