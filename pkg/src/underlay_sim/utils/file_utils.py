"""CSV rendering and file operation utilities."""

import csv
import io
import math
from pathlib import Path

import aiofiles

from ..core.models import Cell, ResultTable
from ..exceptions import FileOperationError


def _format_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return value


def render_csv(table: ResultTable, include_metadata: bool = True) -> str:
    """Render a result table as CSV text.

    Metadata goes first as ``# key: value`` comment lines, followed by the
    header row (names with unit suffixes) and the data rows. Floats use
    their shortest round-trip representation.

    Args:
        table: Result table
        include_metadata: Emit the leading comment lines

    Returns:
        CSV document with ``\\n`` line endings
    """
    buffer = io.StringIO()
    if include_metadata:
        for key, value in table.metadata.items():
            buffer.write(f"# {key}: {value}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.headers)
    for row in table.rows:
        writer.writerow([_format_cell(v) for v in row])
    return buffer.getvalue()


def csv_body(text: str) -> str:
    """CSV text without the leading metadata comment lines."""
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


async def read_file_async(file_path: Path) -> str:
    """Read file contents asynchronously.

    Args:
        file_path: Path to file

    Returns:
        File contents as string

    Raises:
        FileOperationError: If file cannot be read
    """
    try:
        async with aiofiles.open(file_path, encoding="utf-8") as f:
            content: str = await f.read()  # type: ignore[assignment]
            return content
    except Exception as e:
        raise FileOperationError(f"Failed to read file {file_path}: {e}") from e


async def write_file_async(file_path: Path, content: str) -> None:
    """Write content to file asynchronously.

    Args:
        file_path: Path to file
        content: Content to write

    Raises:
        FileOperationError: If file cannot be written
    """
    try:
        # Ensure parent directory exists
        file_path.parent.mkdir(parents=True, exist_ok=True)

        async with aiofiles.open(file_path, "w", encoding="utf-8", newline="") as f:
            await f.write(content)
    except Exception as e:
        raise FileOperationError(f"Failed to write file {file_path}: {e}") from e


async def write_table_async(file_path: Path, table: ResultTable) -> None:
    """Write a result table as CSV.

    Raises:
        FileOperationError: If file cannot be written
    """
    await write_file_async(file_path, render_csv(table))
