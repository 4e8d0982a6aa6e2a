"""Configuration management for hyperflux."""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

try:
    import yaml
except ImportError:
    yaml = None


def get_env(key: str, default: Optional[str] = None) -> Optional[str]:
    """Get environment variable."""
    return os.environ.get(key, default)


@dataclass
class ToleranceConfig:
    """Numerical thresholds."""
    check: Optional[float] = None  # overrides every suite's pass/fail tolerance when set
    series: float = 1e-11
    kernel: float = 1e-9
    eigen: float = 1e-7
    integrability: float = 1e-9
    quadrature: float = 1e-9
    connection: float = 1e-8
    operator: float = 1e-10

    def pick(self, default: float) -> float:
        """Suite tolerance, unless a global check tolerance is configured."""
        return self.check if self.check is not None else default


@dataclass
class QuadratureConfig:
    """Gauss-Jacobi node schedule."""
    nodes: int = 64
    max_nodes: int = 512


@dataclass
class SeriesConfig:
    """Truncation defaults."""
    trunc: int = 10
    evaluation_trunc: int = 40


@dataclass
class KZConfig:
    """Residue family defaults."""
    param_low: float = 0.3
    param_high: float = 1.3
    tex_div: int = 5


@dataclass
class Config:
    """Main configuration for hyperflux."""
    output_dir: str = field(default="./hyperflux-out")
    seed: int = 0

    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    series: SeriesConfig = field(default_factory=SeriesConfig)
    kz: KZConfig = field(default_factory=KZConfig)

    log_level: str = "INFO"

    @classmethod
    def load(cls, config_path: Optional[str] = None) -> "Config":
        """Load configuration from YAML file and environment variables."""
        config_dict = {}

        if config_path and Path(config_path).exists() and yaml:
            with open(config_path, "r", encoding="utf-8") as f:
                config_dict = yaml.safe_load(f) or {}

        output_dir = get_env(
            "HYPERFLUX_OUTPUT_DIR", config_dict.get("output_dir", "./hyperflux-out")
        )
        if output_dir and output_dir.startswith("~"):
            output_dir = str(Path(output_dir).expanduser())

        tol_dict = config_dict.get("tolerances", {})
        check = get_env("HYPERFLUX_TOL", tol_dict.get("check"))
        tolerances = ToleranceConfig(
            check=float(check) if check is not None else None,
            series=float(tol_dict.get("series", 1e-11)),
            kernel=float(tol_dict.get("kernel", 1e-9)),
            eigen=float(tol_dict.get("eigen", 1e-7)),
            integrability=float(tol_dict.get("integrability", 1e-9)),
            quadrature=float(tol_dict.get("quadrature", 1e-9)),
            connection=float(tol_dict.get("connection", 1e-8)),
            operator=float(tol_dict.get("operator", 1e-10)),
        )

        quad_dict = config_dict.get("quadrature", {})
        quadrature = QuadratureConfig(
            nodes=int(get_env("HYPERFLUX_QUAD_NODES", quad_dict.get("nodes", 64))),
            max_nodes=int(get_env("HYPERFLUX_QUAD_MAX_NODES", quad_dict.get("max_nodes", 512))),
        )

        series_dict = config_dict.get("series", {})
        series = SeriesConfig(
            trunc=int(series_dict.get("trunc", 10)),
            evaluation_trunc=int(series_dict.get("evaluation_trunc", 40)),
        )

        kz_dict = config_dict.get("kz", {})
        kz = KZConfig(
            param_low=float(kz_dict.get("param_low", 0.3)),
            param_high=float(kz_dict.get("param_high", 1.3)),
            tex_div=int(kz_dict.get("tex_div", 5)),
        )

        return cls(
            output_dir=output_dir,
            seed=int(get_env("HYPERFLUX_SEED", config_dict.get("seed", 0))),
            tolerances=tolerances,
            quadrature=quadrature,
            series=series,
            kz=kz,
            log_level=get_env("HYPERFLUX_LOG_LEVEL", config_dict.get("log_level", "INFO")),
        )

    @property
    def output_path(self) -> Path:
        """Root directory for written artifacts."""
        return Path(self.output_dir)
