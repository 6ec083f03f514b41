import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from utils.algebra_model import AlgebraSpec, ValidationReport, algebra_to_json
from utils.errors import HpssError
from utils.exact_arithmetic import SparseMatrix, gaussian_from_json, rank
from utils.layout_manager import LayoutManager
from utils.operator_builder import Bivector, bivector_to_json
from utils.spectral_analyzer import CohomologyTable, DegeneracyReport
from utils.template_manager import CatalogEntry

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

REPORT_FORMATS = ("table", "json")


def dumps(report: Dict[str, Any]) -> str:
    """Deterministic JSON text of a report."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def render_grid(cells: Iterable[Sequence[int]], top: int) -> str:
    """
    Draws [p, q, value] cells with p increasing to the right and q increasing upward.
    """
    dims = {(p, q): value for p, q, value in cells}
    width = max([len(str(value)) for value in dims.values()] + [len(str(top)), 1])
    lines = []
    for q in range(top, -1, -1):
        row = " ".join(f"{dims.get((p, q), 0):>{width}}" for p in range(top + 1))
        lines.append(f"{q:>{width}} | {row}")
    lines.append(" " * width + " +" + "-" * ((width + 1) * (top + 1)))
    lines.append(" " * (width + 3) + " ".join(f"{p:>{width}}" for p in range(top + 1)))
    return "\n".join(lines)


class ReportGenerator:
    """
    Builds JSON-ready report dictionaries for each command and renders them as text tables.
    """

    def __init__(self, layout_manager: Optional[LayoutManager] = None):
        self.layouts = layout_manager or LayoutManager()

    @staticmethod
    def _base(verb: str, spec: AlgebraSpec, bivector: Optional[Bivector] = None) -> Dict[str, Any]:
        report: Dict[str, Any] = {"verb": verb, "algebra": algebra_to_json(spec)}
        if bivector is not None:
            report["lambda"] = bivector_to_json(spec, bivector)
        return report

    def validation_report(self, spec: AlgebraSpec, validation: ValidationReport) -> Dict[str, Any]:
        report = self._base("validate", spec)
        report["validation"] = validation.to_json()
        return report

    def cohomology_report(self, spec: AlgebraSpec, table: CohomologyTable, bivector: Optional[Bivector] = None) -> Dict[str, Any]:
        report = self._base("cohomology", spec, bivector)
        report.update(table.to_json())
        report["euler_characteristic"] = table.euler_characteristic()
        return report

    def degeneracy_report(
        self,
        spec: AlgebraSpec,
        bivector: Bivector,
        degeneracy: DegeneracyReport,
        verb: str = "degeneracy",
        example: Optional[Dict[str, Any]] = None,
    ) -> Dict[str, Any]:
        """The spectral verb also lists the nonzero differentials of every page."""
        report = self._base(verb, spec, bivector)
        report.update(degeneracy.to_json(include_differentials=verb == "spectral"))
        if example is not None:
            report["example"] = example
        return report

    def catalog_report(self, entries: Sequence[CatalogEntry]) -> Dict[str, Any]:
        return {"verb": "example-list", "examples": [entry.to_json() for entry in entries]}

    def render(self, report: Dict[str, Any], output_format: str) -> str:
        if output_format == "json":
            return dumps(report)
        if output_format == "table":
            return self.render_table(report) + "\n"
        raise ValueError(f"Unknown output format '{output_format}'. Expected one of {', '.join(REPORT_FORMATS)}.")

    def render_table(self, report: Dict[str, Any]) -> str:
        verb = report["verb"]
        if verb == "example-list":
            return "\n".join(self._catalog_lines(report["examples"]))

        algebra = report["algebra"]
        top = algebra["n"] + algebra["m"]
        lines = [self.layouts.format_layout("header", title=verb, name=algebra.get("name", ""), n=algebra["n"], m=algebra["m"])]
        if verb == "validate":
            validation = report["validation"]
            warnings = "\n".join(f"warning: {text}" for text in validation["warnings"])
            lines.append(self.layouts.format_layout(
                "validation",
                accepted=validation["accepted"],
                center_matches=validation["center_matches"],
                m_is_1=validation["m_is_1"],
                warnings=warnings,
            ).rstrip())
        elif verb == "cohomology":
            lines.append(self.layouts.format_layout("dolbeault_grid", grid=render_grid(report["dims"], top)))
            lines.append(self._totals_line("Dolbeault sum", self._diagonal_sums(report["dims"])))
            if "h_lambda" in report:
                lines.append(self._totals_line("H_Lambda", report["h_lambda"]))
        else:
            for page in report["e_pages"]:
                lines.append(self.layouts.format_layout("page_grid", r=page["r"], grid=render_grid(page["dims"], top)))
                for differential in page.get("differentials", []):
                    lines.append(self.layouts.format_layout(
                        "differential",
                        r=page["r"],
                        p=differential["source"][0],
                        q=differential["source"][1],
                        target_p=differential["target"][0],
                        target_q=differential["target"][1],
                        rank=self._matrix_rank(differential["matrix"]),
                    ))
            lines.append(self._totals_line("H_Lambda", report["h_lambda"]))
            checks = "\n".join(f"  {key}: {value}" for key, value in sorted(report["checks"].items()))
            lines.append(self.layouts.format_layout("degeneracy", page=report["degeneracy_page"], checks=checks))
        return "\n".join(lines)

    def _catalog_lines(self, examples: List[Dict[str, Any]]) -> List[str]:
        lines = []
        for example in examples:
            parameters = ", ".join(
                f"{name} >= {schema['min']} (default {schema['default']})"
                for name, schema in sorted(example["parameters"].items())
            )
            lines.append(self.layouts.format_layout(
                "catalog_entry", name=example["name"], title=example["title"], parameters=parameters, citation=example["citation"],
            ))
        return lines

    @staticmethod
    def _matrix_rank(cells: Sequence[Sequence[Any]]) -> int:
        entries = {(i, j): gaussian_from_json(value) for i, j, value in cells}
        shape = (max((i for i, _ in entries), default=-1) + 1, max((j for _, j in entries), default=-1) + 1)
        return rank(SparseMatrix(shape[0], shape[1], entries))

    @staticmethod
    def _diagonal_sums(cells: Iterable[Sequence[int]]) -> List[Tuple[int, int]]:
        sums: Dict[int, int] = {}
        for p, q, value in cells:
            sums[p + q] = sums.get(p + q, 0) + value
        return sorted(sums.items())

    def _totals_line(self, label: str, values: Iterable[Sequence[int]]) -> str:
        text = " ".join(f"{degree}:{value}" for degree, value in values)
        return self.layouts.format_layout("totals", label=label, values=text)


def save_report(text: str, output_path: Union[str, Path]):
    """
    Writes a rendered report, creating parent directories.

    Raises:
        HpssError: If the file cannot be written.
    """
    path = Path(output_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        logging.info(f"Successfully saved report to {path}")
    except PermissionError as e:
        logging.error(f"Permission denied when writing to {path}")
        raise HpssError(f"Permission denied when writing report to {path}.") from e
    except OSError as e:
        logging.error(f"OS error when saving report: {e}")
        raise HpssError(f"Could not write report to {path}: {e}") from e
