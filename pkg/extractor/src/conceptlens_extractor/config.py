"""Extraction run configuration."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

BASELINE_STRATEGIES = ("zero-embedding", "pad-token")


@dataclass(frozen=True)
class ExtractionConfig:
    """Settings shared by embedding extraction and attribution runs.

    ``layer`` indexes encoder blocks 0-based, so valid values are
    0 <= layer < model depth and the highest value selects the final
    block's output. ``ig_steps`` is the Riemann-sum resolution m of the
    attribution path integral.
    """

    model: str
    layer: int = 0
    ig_steps: int = 128
    baseline: str = "zero-embedding"
    batch_size: int = 16
    device: str = "cpu"

    def validate(self) -> None:
        if not self.model:
            raise ConfigError("model identifier must be non-empty")
        if self.layer < 0:
            raise ConfigError("layer must be >= 0", layer=self.layer)
        if self.ig_steps < 1:
            raise ConfigError("ig_steps must be >= 1", ig_steps=self.ig_steps)
        if self.baseline not in BASELINE_STRATEGIES:
            raise ConfigError(
                "unknown baseline strategy",
                baseline=self.baseline,
                allowed=list(BASELINE_STRATEGIES),
            )
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1", batch_size=self.batch_size)

    def validate_against(self, depth: int) -> None:
        """Check the layer index against a loaded model's encoder depth."""
        self.validate()
        if self.layer >= depth:
            raise ConfigError(
                "layer index beyond model depth", layer=self.layer, depth=depth
            )
