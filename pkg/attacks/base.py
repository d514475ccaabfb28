import abc
import importlib
import inspect
import logging
import pkgutil
from abc import ABC
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import numpy as np

from errors import InputError
from image_core import GrayImage
from model.watermark_task import AttackSpec

logger = logging.getLogger(__name__)


class Attack(ABC):
    attack_name = "Attack"
    default_value: Optional[float] = None

    def __init__(self, value: Optional[float] = None, seed: int = 0):
        self.value = self.default_value if value is None else float(value)
        self.seed = seed
        self.validate()

    def validate(self):
        """Raise InputError when the parameter is out of range."""

    def require(self, condition: bool, requirement: str):
        if not condition:
            raise InputError("{} parameter {} is invalid: {}".format(self.attack_name, self.value, requirement))

    @abc.abstractmethod
    def apply(self, image: GrayImage) -> GrayImage:
        raise NotImplementedError


def to_gray(values: np.ndarray) -> GrayImage:
    """Round and clamp a real grid back into an 8-bit image."""
    return GrayImage(np.clip(np.rint(values), 0, 255).astype(np.uint8))


def get_all_available_attacks() -> Dict[str, type]:
    classes = {}
    for _, module_name, _ in pkgutil.iter_modules([str(Path(__file__).parent)]):
        if module_name == "base":
            continue
        module = importlib.import_module(f"attacks.{module_name}")
        for _, cls in inspect.getmembers(module, inspect.isclass):
            if issubclass(cls, Attack) and cls is not Attack:
                if cls.attack_name in classes and classes[cls.attack_name] is not cls:
                    raise Exception("Duplicate attack name {}".format(cls.attack_name))
                classes[cls.attack_name] = cls
    return classes


attack_classes = get_all_available_attacks()

ATTACK_SUITES: Dict[str, List[str]] = {
    "table": ["gamma:0.8", "histeq", "median:3", "jpeg:70", "sp:0.01", "resize:0.5", "sharpen:1.0",
              "gn:0.005", "crop:0.1", "crop:0.25", "rotate:20", "rotate:45"],
    "rotation": ["rotate:0.5", "rotate:1", "rotate:2", "rotate:25", "rotate:45"],
    "median": ["median:3", "median:5", "median:7"],
    "resize": ["resize:0.5", "resize:0.75", "resize:1.5", "resize:2"],
}
ATTACK_SUITES["all"] = list(dict.fromkeys(
    item for suite in ("table", "rotation", "median", "resize") for item in ATTACK_SUITES[suite]))


def parse_attack(text: str, seed: int = 0) -> AttackSpec:
    name, _, raw = text.strip().lower().partition(":")
    if name not in attack_classes:
        raise InputError("Unknown attack {!r}; known: {}".format(name, ", ".join(sorted(attack_classes))))
    value = None
    if raw:
        try:
            value = float(raw)
        except ValueError:
            raise InputError("Attack parameter in {!r} is not a number".format(text)) from None
    spec = AttackSpec(name=name, value=value, seed=seed)
    build_attack(spec)
    return spec


def expand_attacks(items: Union[str, Iterable[str]], seed: int = 0) -> List[AttackSpec]:
    """Comma-separated specs and suite names, de-duplicated with order kept."""
    if isinstance(items, str):
        items = [items]
    labels = []
    for item in items:
        for part in item.split(","):
            part = part.strip()
            if not part:
                continue
            labels.extend(ATTACK_SUITES.get(part.lower(), [part]))
    unique: Dict[str, AttackSpec] = {}
    for label in labels:
        spec = parse_attack(label, seed)
        unique.setdefault(spec.label(), spec)
    return list(unique.values())


def build_attack(spec: AttackSpec) -> Attack:
    cls = attack_classes.get(spec.name)
    if cls is None:
        raise InputError("Unknown attack {!r}".format(spec.name))
    return cls(spec.value, spec.seed)


def apply_attack(image: GrayImage, spec: Union[AttackSpec, str]) -> GrayImage:
    if isinstance(spec, str):
        spec = parse_attack(spec)
    attacked = build_attack(spec).apply(image)
    logger.debug("Applied %s to %dx%d image", spec.label(), image.width, image.height)
    return attacked
