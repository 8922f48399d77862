"""Report pipeline: rendering, writing and comparing result records"""
import io
import json
import logging
import sys
from typing import Any, Dict, List, Optional

import pandas as pd

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "human")


def _is_pair(value: Any) -> bool:
    return (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    )


def flatten_record(record: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    """Flat columns for one record: [re, im] pairs split into _re/_im, nested dicts dotted"""
    flat: Dict[str, Any] = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten_record(value, prefix=f"{name}."))
        elif _is_pair(value):
            flat[f"{name}_re"], flat[f"{name}_im"] = float(value[0]), float(value[1])
        elif isinstance(value, (list, tuple)):
            flat[name] = json.dumps(list(value))
        else:
            flat[name] = value
    return flat


class ReportPipeline:
    """Turns lists of result records into JSON lines, CSV or a human table"""

    def to_frame(self, records: List[Dict[str, Any]]) -> pd.DataFrame:
        frame = pd.DataFrame([flatten_record(r) for r in records])
        return frame.reindex(columns=sorted(frame.columns))

    def render(self, records: List[Dict[str, Any]], fmt: str = "json") -> str:
        if fmt == "json":
            return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
        if fmt == "csv":
            return self.to_frame(records).to_csv(index=False)
        if fmt == "human":
            return self.to_frame(records).to_string(index=False) + "\n"
        raise ValueError(f"Unsupported output format: {fmt}. Choices: {list(FORMATS)}")

    def write(self, records: List[Dict[str, Any]], fmt: str = "json", output_path: Optional[str] = None) -> str:
        """Render and write to output_path, or stdout when no path is given"""
        text = self.render(records, fmt)
        if output_path:
            with open(output_path, "w") as f:
                f.write(text)
            logger.info(f"Wrote {len(records)} records to {output_path}")
        else:
            sys.stdout.write(text)
        return text

    def load_report(self, input_path: str) -> List[Dict[str, Any]]:
        """Load records from a JSON document, JSON lines or CSV"""
        if input_path.endswith(".csv"):
            data = pd.read_csv(input_path).to_dict(orient="records")
        elif input_path.endswith((".json", ".jsonl")):
            with open(input_path, "r") as f:
                text = f.read()
            try:
                data = json.loads(text)
            except json.JSONDecodeError:
                data = [json.loads(line) for line in text.splitlines() if line.strip()]
            if isinstance(data, dict):
                data = [data]
        else:
            raise ValueError(f"Unsupported file format: {input_path}")

        logger.info(f"Loaded {len(data)} report records from {input_path}")
        return data

    def matches_report(self, records: List[Dict[str, Any]], reference_path: str) -> bool:
        """True when records render to the same rows as the saved report"""
        saved = self.load_report(reference_path)
        if reference_path.endswith(".csv"):
            text = self.render(records, "csv")
            current = pd.read_csv(io.StringIO(text)).to_dict(orient="records") if records else []
            same = pd.DataFrame(current).equals(pd.DataFrame(saved))
        else:
            current = [json.loads(line) for line in self.render(records, "json").splitlines()]
            same = current == saved
        if not same:
            logger.warning(f"Records differ from the saved report {reference_path}")
        return same


# Global instance
report_pipeline = ReportPipeline()
