"""
Report Utilities - utils/reports.py
Text report templates for command output
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple


@dataclass
class Report:
    """Titled text document with named fields and free-form sections"""

    title: str
    description: Optional[str] = None
    fields: List[Tuple[str, str]] = field(default_factory=list)
    sections: List[Tuple[str, List[str]]] = field(default_factory=list)

    def add_field(self, name: str, value) -> "Report":
        self.fields.append((name, str(value)))
        return self

    def add_section(self, heading: str, lines: Sequence[str]) -> "Report":
        self.sections.append((heading, list(lines)))
        return self

    def render(self) -> str:
        out = [self.title, "=" * len(self.title)]
        if self.description:
            out.append(self.description)
        if self.fields:
            width = max(len(name) for name, _ in self.fields)
            out.extend(f"{name:<{width}} : {value}" for name, value in self.fields)
        for heading, lines in self.sections:
            out.append("")
            out.append(f"## {heading}")
            out.extend(lines if lines else ["(none)"])
        return "\n".join(out) + "\n"


class ReportBuilder:
    """Builders for the four report tones"""

    @staticmethod
    def success(title: str, description: str = None) -> Report:
        return Report(title=f"✅ {title}", description=description)

    @staticmethod
    def error(title: str, description: str = None) -> Report:
        return Report(title=f"❌ {title}", description=description)

    @staticmethod
    def warning(title: str, description: str = None) -> Report:
        return Report(title=f"⚠️ {title}", description=description)

    @staticmethod
    def info(title: str, description: str = None) -> Report:
        return Report(title=title, description=description)
