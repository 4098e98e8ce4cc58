"""
Report rendering for stdout: JSON documents or an indented text summary
"""

import sys
from typing import Any, List, Optional, TextIO

import numpy as np
from pydantic import BaseModel

FORMATS = ("json", "text")


def _scalar(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value).lower() if value is not None else "-"
    if isinstance(value, float):
        return f"{value:.10g}"
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def _describe(value: Any) -> Optional[str]:
    if isinstance(value, np.ndarray):
        return f"<{'x'.join(str(n) for n in value.shape)} array>"
    if isinstance(value, (list, tuple)) and value and isinstance(value[0], np.ndarray):
        return f"<{len(value)} arrays of {'x'.join(str(n) for n in value[0].shape)}>"
    return None


def render_text(model: BaseModel, indent: int = 0) -> List[str]:
    lines = []
    pad = "  " * indent
    for name in type(model).model_fields:
        value = getattr(model, name)
        if isinstance(value, BaseModel):
            lines.append(f"{pad}{name}:")
            lines.extend(render_text(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], BaseModel):
            lines.append(f"{pad}{name}:")
            for item in value:
                lines.extend(render_text(item, indent + 1))
                lines.append("")
        elif isinstance(value, dict):
            lines.append(f"{pad}{name}:")
            lines.extend(f"{pad}  {key}: {_scalar(item)}" for key, item in value.items())
        else:
            described = _describe(value)
            if described is None and isinstance(value, (list, tuple)):
                described = "[" + ", ".join(_scalar(item) for item in value) + "]"
            lines.append(f"{pad}{name}: {described if described is not None else _scalar(value)}")
    return lines


def emit(model: BaseModel, fmt: str = "json", stream: Optional[TextIO] = None) -> None:
    stream = stream or sys.stdout
    if fmt == "json":
        stream.write(model.model_dump_json(indent=2, exclude_none=True) + "\n")
    else:
        stream.write("\n".join(render_text(model)).rstrip() + "\n")
    stream.flush()
