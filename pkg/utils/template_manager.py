import os
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from utils.algebra_model import AlgebraSpec, RealFrameSpec, algebra_to_json, complexify, realframe_to_json
from utils.config_manager import ConfigManager
from utils.errors import SpecError
from utils.exact_arithmetic import gaussian

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

HALF = gaussian("1/2")


def heis_ext_frame(n: int) -> RealFrameSpec:
    """Central extension of the Heisenberg algebra: [X_j, Y_j] = Z, JX_j = Y_j, JZ = A."""
    J = {"Z": (1, "A"), "A": (-1, "Z")}
    brackets = {}
    for j in range(1, n + 1):
        J[f"X{j}"] = (1, f"Y{j}")
        J[f"Y{j}"] = (-1, f"X{j}")
        brackets[(f"X{j}", f"Y{j}")] = {"Z": 1}
    return RealFrameSpec.build(f"heis_ext(n={n})", [f"X{j}" for j in range(1, n + 1)], ["Z"], J, brackets)


def heis_ext_constants(n: int) -> AlgebraSpec:
    return AlgebraSpec(n, 1, {(1, j, j): gaussian(0, "-1/2") for j in range(1, n + 1)}, f"heis_ext(n={n})")


def heis_sum_frame(m: int, n: int) -> RealFrameSpec:
    """Two Heisenberg blocks sharing a complex center: [X_j, Y_j] = Z, [A_k, B_k] = C, JZ = C."""
    J = {"Z": (1, "C"), "C": (-1, "Z")}
    brackets = {}
    for j in range(1, m + 1):
        J[f"X{j}"] = (1, f"Y{j}")
        J[f"Y{j}"] = (-1, f"X{j}")
        brackets[(f"X{j}", f"Y{j}")] = {"Z": 1}
    for k in range(1, n + 1):
        J[f"A{k}"] = (1, f"B{k}")
        J[f"B{k}"] = (-1, f"A{k}")
        brackets[(f"A{k}", f"B{k}")] = {"C": 1}
    t_basis = [f"X{j}" for j in range(1, m + 1)] + [f"A{k}" for k in range(1, n + 1)]
    return RealFrameSpec.build(f"heis_sum(m={m}, n={n})", t_basis, ["Z"], J, brackets)


def heis_sum_constants(m: int, n: int) -> AlgebraSpec:
    constants = {(1, j, j): gaussian(0, "-1/2") for j in range(1, m + 1)}
    constants.update({(1, j, j): HALF for j in range(m + 1, m + n + 1)})
    return AlgebraSpec(m + n, 1, constants, f"heis_sum(m={m}, n={n})")


def _four_blocks(k: int, block_brackets: Callable[[str, str, str, str], Dict[Tuple[str, str], Dict[str, str]]]):
    """Shared J for the blocks X_{4b+1..4b+4}, b = 0..k, with JX_{4b+1} = X_{4b+2}, JX_{4b+3} = -X_{4b+4}, JZ1 = -Z2."""
    J = {"Z1": (-1, "Z2"), "Z2": (1, "Z1")}
    brackets = {}
    t_basis = []
    for block in range(k + 1):
        a, b, c, d = (f"X{4 * block + i}" for i in range(1, 5))
        J[a] = (1, b)
        J[b] = (-1, a)
        J[c] = (-1, d)
        J[d] = (1, c)
        t_basis += [a, c]
        brackets.update(block_brackets(a, b, c, d))
    return t_basis, J, brackets


def w4n6_frame(k: int) -> RealFrameSpec:
    t_basis, J, brackets = _four_blocks(k, lambda a, b, c, d: {
        (a, c): {"Z1": "-1/2"},
        (b, d): {"Z1": "1/2"},
        (a, d): {"Z2": "-1/2"},
        (b, c): {"Z2": "-1/2"},
    })
    return RealFrameSpec.build(f"W4n6(k={k})", t_basis, ["Z1"], J, brackets)


def w4n6_constants(k: int) -> AlgebraSpec:
    constants = {(1, 2 * b + 1, 2 * b + 2): -HALF for b in range(k + 1)}
    return AlgebraSpec(2 * (k + 1), 1, constants, f"W4n6(k={k})")


def p4n2_frame(k: int) -> RealFrameSpec:
    t_basis, J, brackets = _four_blocks(k, lambda a, b, c, d: {
        (a, b): {"Z1": "-1/2"},
        (a, d): {"Z2": "-1/2"},
        (b, c): {"Z2": "-1/2"},
    })
    return RealFrameSpec.build(f"P4n2(k={k})", t_basis, ["Z1"], J, brackets)


def p4n2_constants(k: int) -> AlgebraSpec:
    quarter = gaussian("1/4")
    constants = {}
    for b in range(k + 1):
        constants[(1, 2 * b + 1, 2 * b + 1)] = gaussian(0, "1/4")
        constants[(1, 2 * b + 1, 2 * b + 2)] = -quarter
        constants[(1, 2 * b + 2, 2 * b + 1)] = -quarter
    return AlgebraSpec(2 * (k + 1), 1, constants, f"P4n2(k={k})")


@dataclass(frozen=True)
class ExampleFamily:
    name: str
    parameters: Tuple[Tuple[str, int, int, str], ...]  # (name, minimum, default, help)
    real_frame: Callable[..., RealFrameSpec]
    constants: Callable[..., AlgebraSpec]


FAMILIES: Dict[str, ExampleFamily] = {
    "heis_ext": ExampleFamily(
        "heis_ext", (("n", 1, 1, "number of Heisenberg pairs (X_j, Y_j)"),),
        heis_ext_frame, heis_ext_constants,
    ),
    "heis_sum": ExampleFamily(
        "heis_sum", (("m", 1, 1, "pairs bracketing into Z"), ("n", 1, 1, "pairs bracketing into JZ")),
        heis_sum_frame, heis_sum_constants,
    ),
    "W4n6": ExampleFamily(
        "W4n6", (("k", 0, 0, "blocks X_{4b+1..4b+4} for b = 0..k"),),
        w4n6_frame, w4n6_constants,
    ),
    "P4n2": ExampleFamily(
        "P4n2", (("k", 0, 0, "blocks X_{4b+1..4b+4} for b = 0..k"),),
        p4n2_frame, p4n2_constants,
    ),
}


class TemplateManager:
    """
    Loads the descriptive metadata of the built-in example families.
    """

    def __init__(self, template_dir: Optional[Union[str, Path]] = None):
        self.template_dir = str(template_dir) if template_dir is not None else str(ConfigManager().get_template_dir())
        self.templates: Dict[str, Dict[str, Any]] = {}
        self._load_templates()

    def _load_templates(self):
        """Loads all JSON template files from the template directory."""
        if not os.path.exists(self.template_dir):
            logging.warning(f"Template directory '{self.template_dir}' not found. Using built-in family metadata.")
            return

        for filename in sorted(os.listdir(self.template_dir)):
            if filename.endswith(".json"):
                filepath = os.path.join(self.template_dir, filename)
                try:
                    with open(filepath, 'r', encoding='utf-8') as f:
                        template_data = json.load(f)
                        template_name = template_data.get("name")
                        if template_name in FAMILIES:
                            self.templates[template_name] = template_data
                            logging.info(f"Loaded template: {template_name}")
                        else:
                            logging.warning(f"Template file '{filename}' does not name a known example family.")
                except json.JSONDecodeError as e:
                    logging.error(f"Error decoding JSON from template file '{filename}': {e}")
                except Exception as e:
                    logging.error(f"Error loading template file '{filename}': {e}")

        if not self.templates:
            logging.warning("No example templates found or loaded. Using built-in family metadata.")

    def get_template_names(self) -> List[str]:
        """Returns the names of all example families."""
        return sorted(FAMILIES.keys())

    def get_template(self, name: str) -> Dict[str, Any]:
        """Returns the metadata of a family, with name-only defaults when no template was loaded."""
        if name not in FAMILIES:
            raise SpecError(f"Unknown example '{name}'. Available: {', '.join(self.get_template_names())}.")
        return self.templates.get(name, {"name": name, "title": name, "citation": "", "description": ""})


def resolve_sizes(name: str, **sizes: Optional[int]) -> Dict[str, int]:
    """
    Fills in default sizes for a family and checks them.

    Raises:
        SpecError: For an unknown family, an unknown size parameter or a
            size below the family minimum.
    """
    family = FAMILIES.get(name)
    if family is None:
        raise SpecError(f"Unknown example '{name}'. Available: {', '.join(sorted(FAMILIES))}.")
    allowed = {parameter for parameter, _, _, _ in family.parameters}
    unexpected = sorted(key for key, value in sizes.items() if value is not None and key not in allowed)
    if unexpected:
        raise SpecError(f"Example '{name}' does not take size parameter(s) {', '.join(unexpected)}.")
    resolved = {}
    for parameter, minimum, default, _ in family.parameters:
        value = sizes.get(parameter)
        value = default if value is None else value
        if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
            raise SpecError(f"Example '{name}' needs {parameter} >= {minimum}, got {value!r}.")
        resolved[parameter] = value
    return resolved


def builtin_example(name: str, **sizes: Optional[int]) -> AlgebraSpec:
    """Structure constants of a built-in family at the given sizes."""
    resolved = resolve_sizes(name, **sizes)
    spec = FAMILIES[name].constants(**resolved)
    logging.info(f"Built example {spec.name} with n={spec.n}, m={spec.m}.")
    return spec


def builtin_frame(name: str, **sizes: Optional[int]) -> RealFrameSpec:
    """Real frame of a built-in family at the given sizes."""
    resolved = resolve_sizes(name, **sizes)
    return FAMILIES[name].real_frame(**resolved)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    title: str
    citation: str
    description: str
    parameters: Dict[str, Dict[str, Any]]
    real_frame: RealFrameSpec
    spec: AlgebraSpec

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "title": self.title,
            "citation": self.citation,
            "description": self.description,
            "parameters": self.parameters,
            "real_frame": realframe_to_json(self.real_frame),
            "constants": algebra_to_json(self.spec),
        }


def example_catalog(template_manager: Optional[TemplateManager] = None) -> List[CatalogEntry]:
    """Every built-in family with its real frame and derived constants at default sizes."""
    manager = template_manager or TemplateManager()
    entries = []
    for name in manager.get_template_names():
        family = FAMILIES[name]
        metadata = manager.get_template(name)
        frame = builtin_frame(name)
        entries.append(CatalogEntry(
            name=name,
            title=metadata.get("title", name),
            citation=metadata.get("citation", ""),
            description=metadata.get("description", ""),
            parameters={
                parameter: {"min": minimum, "default": default, "help": help_text}
                for parameter, minimum, default, help_text in family.parameters
            },
            real_frame=frame,
            spec=complexify(frame),
        ))
    return entries
