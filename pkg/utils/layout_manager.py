import os
import json
import logging
from pathlib import Path
from typing import Dict, Optional, Union

from utils.config_manager import ConfigManager

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

DEFAULT_LAYOUTS: Dict[str, Dict[str, str]] = {
    "header": {
        "layout": "{title} for {name} (n={n}, m={m})",
        "description": "First line of every table report.",
    },
    "page_grid": {
        "layout": "E_{r}  (p rightward, q upward)\n{grid}",
        "description": "One spectral-sequence page as a p/q grid.",
    },
    "dolbeault_grid": {
        "layout": "dim H^q(g^(p,0))  (p rightward, q upward)\n{grid}",
        "description": "Dolbeault dimensions as a p/q grid.",
    },
    "totals": {
        "layout": "{label}: {values}",
        "description": "A row of total-degree dimensions.",
    },
    "validation": {
        "layout": "accepted: {accepted}\ncenter matches derived algebra: {center_matches}\nm = 1: {m_is_1}\n{warnings}",
        "description": "Result of model validation.",
    },
    "degeneracy": {
        "layout": "degeneracy page: {page}\n{checks}",
        "description": "Degeneracy verdict with the theorem flags.",
    },
    "differential": {
        "layout": "d_{r}: ({p},{q}) -> ({target_p},{target_q})  rank {rank}",
        "description": "A nonzero differential block.",
    },
    "catalog_entry": {
        "layout": "{name}: {title}\n  sizes: {parameters}\n  {citation}",
        "description": "One built-in example family.",
    },
}


class LayoutManager:
    """
    Manages the text layouts used for table output.
    """

    def __init__(self, layout_dir: Optional[Union[str, Path]] = None):
        self.layout_dir = str(layout_dir) if layout_dir is not None else str(ConfigManager().get_layout_dir())
        self._load_layouts()

    def _load_layouts(self):
        """Loads layouts from the layout directory on top of the built-in defaults."""
        self.layouts: Dict[str, str] = {name: data["layout"] for name, data in DEFAULT_LAYOUTS.items()}
        if not os.path.exists(self.layout_dir):
            logging.warning(f"Layout directory not found: {self.layout_dir}. Using built-in layouts.")
            return

        for filename in sorted(os.listdir(self.layout_dir)):
            if filename.endswith(".json"):
                filepath = os.path.join(self.layout_dir, filename)
                try:
                    with open(filepath, 'r', encoding='utf-8') as f:
                        layout_data = json.load(f)
                    layout_name = os.path.splitext(filename)[0]
                    layout = layout_data.get("layout")
                    if not isinstance(layout, str):
                        logging.error(f"Layout file {filepath} has no string 'layout' field.")
                        continue
                    self.layouts[layout_name] = layout
                    logging.info(f"Loaded layout: {layout_name}")
                except json.JSONDecodeError as e:
                    logging.error(f"Error decoding JSON from {filepath}: {e}")
                except Exception as e:
                    logging.error(f"Error loading layout {filepath}: {e}")

    def get_layout(self, layout_name: str) -> Optional[str]:
        """Retrieves a layout by name."""
        return self.layouts.get(layout_name)

    def format_layout(self, layout_name: str, **kwargs) -> str:
        """
        Formats a layout with the provided keyword arguments.

        Args:
            layout_name: The name of the layout to use.
            **kwargs: Values for the layout's placeholders.

        Returns:
            The formatted text.

        Raises:
            ValueError: If the layout is unknown or a placeholder has no value.
        """
        layout = self.get_layout(layout_name)
        if layout is None:
            raise ValueError(f"Layout '{layout_name}' not found.")

        try:
            return layout.format(**kwargs)
        except KeyError as e:
            logging.error(f"Missing placeholder in layout '{layout_name}': {e}")
            raise ValueError(f"Missing data for layout placeholder: {e}. Check layout '{layout_name}'.")
