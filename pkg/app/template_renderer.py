"""
Template Renderer for command reports

Jinja2-based rendering of a CommandReport as a plain-text table. Users can
override the default template by providing a custom templates directory.
"""

import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

from jinja2 import FileSystemLoader, StrictUndefined, TemplateNotFound
from jinja2.sandbox import SandboxedEnvironment

logger = logging.getLogger(__name__)

# Default templates directory (shipped with the package)
DEFAULT_TEMPLATES_DIR = Path(__file__).parent / "templates"

REPORT_TEMPLATE = "report.txt.j2"


def exact_filter(value) -> str:
    """
    Render exact values: Fractions as p/q, lists and dicts compactly.

    Usage in template: {{ value | exact }}
    """
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(exact_filter(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {exact_filter(v)}" for k, v in value.items()) + "}"
    if value is None:
        return "-"
    return str(value)


def mark_filter(passed) -> str:
    """
    PASS/FAIL marker for an assertion verdict.

    Usage in template: {{ assertion.passed | mark }}
    """
    return "PASS" if passed else "FAIL"


class ReportRenderer:
    """
    Jinja2 renderer for the table output format.

    Loads templates from a user-provided directory (if given) with fallback
    to the built-in default.
    """

    def __init__(self, custom_templates_dir: Optional[str] = None):
        search_paths = []

        if custom_templates_dir:
            custom_path = Path(custom_templates_dir)
            if custom_path.is_dir():
                search_paths.append(str(custom_path))
                logger.info(f"Custom templates directory: {custom_path}")
            else:
                logger.warning(
                    f"Custom templates directory not found: {custom_path}, "
                    f"using defaults only"
                )

        search_paths.append(str(DEFAULT_TEMPLATES_DIR))

        self.env = SandboxedEnvironment(
            loader=FileSystemLoader(search_paths),
            autoescape=False,
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
            undefined=StrictUndefined,
        )

        self.env.filters["exact"] = exact_filter
        self.env.filters["mark"] = mark_filter

        logger.debug(f"ReportRenderer initialized, search paths: {search_paths}")

    def render(self, context: Dict[str, Any], template_name: str = REPORT_TEMPLATE) -> str:
        """
        Render a report dictionary.

        Args:
            context: CommandReport.to_dict() output
            template_name: Template file to use

        Returns:
            Rendered text

        Raises:
            ValueError: If the template is missing
        """
        try:
            template = self.env.get_template(template_name)
        except TemplateNotFound as e:
            raise ValueError(f"Template not found: {template_name}") from e
        return template.render(report=context)

    def has_template(self, template_name: str = REPORT_TEMPLATE) -> bool:
        """Check if the template exists in the search path."""
        try:
            self.env.get_template(template_name)
            return True
        except TemplateNotFound:
            return False
