import uuid
from datetime import datetime
from pathlib import Path

import duckdb
import pandas as pd

from singular_ssm.utils.logging import get_logger
from singular_ssm.utils.query import ResultQueries

logger = get_logger()

TABLES = {
    "runtime_benchmark": ResultQueries.CREATE_RUNTIME_TABLE,
    "hilbert_benchmark": ResultQueries.CREATE_HILBERT_TABLE,
}


class ResultStore:
    """Appends benchmark tables to a DuckDB database."""

    def __init__(self, db_path: str | Path = "database/benchmarks.db"):
        """
        Initialize the result store.

        Args:
            db_path: Path to the DuckDB database file
        """
        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self.conn = None

    def connect(self):
        """Connect to the database and make sure the result tables exist."""
        try:
            self.conn = duckdb.connect(str(self.db_path))
            for statement in TABLES.values():
                self.conn.execute(statement)
        except Exception as e:
            logger.error(f"Failed to connect to database {self.db_path}: {e}")
            raise

    def insert_frame(self, table_name: str, frame: pd.DataFrame, run_id: str | None = None) -> str:
        """
        Append a benchmark table, tagging every row with a run id and timestamp.

        Args:
            table_name: runtime_benchmark or hilbert_benchmark
            frame: Rows to append; columns must exist in the table
            run_id: Identifier shared by the rows, generated when omitted

        Returns:
            The run id
        """
        if table_name not in TABLES:
            raise ValueError(f"Unknown result table '{table_name}'")
        if not self.conn:
            self.connect()

        run_id = run_id or uuid.uuid4().hex[:12]
        if frame.empty:
            logger.warning(f"No rows to insert into {table_name}")
            return run_id

        rows = frame.assign(run_id=run_id, recorded_at=datetime.now())
        columns = list(rows.columns)
        query = ResultQueries.INSERT_ROWS.format(
            table_name=table_name,
            columns=", ".join(columns),
            placeholders=", ".join("?" for _ in columns),
        )
        try:
            # NaN is stored as NULL
            values = rows.astype(object).where(rows.notna(), None).values.tolist()
            self.conn.executemany(query, values)
        except Exception as e:
            logger.error(f"Failed to insert into {table_name}: {e}")
            raise

        logger.info(f"✅ Stored {len(rows)} rows in {table_name} (run {run_id})")
        return run_id

    def get_run(self, table_name: str, run_id: str) -> pd.DataFrame:
        """Rows of one run."""
        if not self.conn:
            self.connect()
        return self.conn.execute(ResultQueries.GET_RUN.format(table_name=table_name), [run_id]).df()

    def get_table_count(self, table_name: str) -> int:
        """Get the number of records in a table."""
        if not self.conn:
            self.connect()
        result = self.conn.execute(ResultQueries.GET_TABLE_COUNT.format(table_name=table_name)).fetchone()
        return result[0] if result else 0

    def __enter__(self):
        self.connect()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.disconnect()

    def disconnect(self):
        """Disconnect from the database."""
        if self.conn:
            self.conn.close()
            self.conn = None
