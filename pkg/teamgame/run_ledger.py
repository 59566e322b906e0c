"""Run ledger recording every CLI command in a SQLite database."""

import json
import sqlite3
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

DEFAULT_LEDGER = ".teamgame-runs.db"

TIMEFRAMES = {
    'day': "datetime(timestamp) > datetime('now', '-1 day')",
    'week': "datetime(timestamp) > datetime('now', '-7 days')",
    'month': "datetime(timestamp) > datetime('now', '-30 days')",
    'all': "1=1",
}


class RunLedger:
    """Logs command runs (config, status, summary, result) to SQLite."""

    def __init__(self, db_path: Optional[str] = None):
        """Initialize the ledger.

        Args:
            db_path: Path to SQLite database. Defaults to .teamgame-runs.db
        """
        if db_path is None:
            db_path = Path.cwd() / DEFAULT_LEDGER

        self.db_path = Path(db_path)
        self._init_database()

    def _connect(self) -> sqlite3.Connection:
        return sqlite3.connect(self.db_path)

    def _init_database(self):
        """Create the schema and add columns missing from older ledgers."""
        conn = self._connect()
        cursor = conn.cursor()

        cursor.execute('''
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                timestamp TEXT NOT NULL,
                command TEXT NOT NULL,
                config TEXT,
                status TEXT NOT NULL,
                exit_code INTEGER DEFAULT 0,
                summary TEXT,
                result TEXT
            )
        ''')

        cursor.execute("PRAGMA table_info(runs)")
        columns = [column[1] for column in cursor.fetchall()]
        for name, declaration in (('exit_code', 'INTEGER DEFAULT 0'), ('summary', 'TEXT'),
                                  ('result', 'TEXT')):
            if name not in columns:
                cursor.execute(f'ALTER TABLE runs ADD COLUMN {name} {declaration}')

        conn.commit()
        conn.close()

    def log_run(
        self,
        command: str,
        status: str,
        config: Optional[str] = None,
        exit_code: int = 0,
        summary: Optional[str] = None,
        result: Optional[Dict] = None
    ) -> int:
        """Record one command run.

        Args:
            command: CLI command name (validate, dynamics, ...)
            status: Status reported in the JSON document
            config: Scenario config the command ran on
            exit_code: Process exit code
            summary: One-line human summary
            result: The JSON document emitted on stdout

        Returns:
            Row ID of inserted record
        """
        conn = self._connect()
        cursor = conn.cursor()
        cursor.execute('''
            INSERT INTO runs (timestamp, command, config, status, exit_code, summary, result)
            VALUES (?, ?, ?, ?, ?, ?, ?)
        ''', (
            datetime.now(timezone.utc).replace(tzinfo=None).isoformat(),
            command,
            config,
            status,
            exit_code,
            summary,
            json.dumps(result, sort_keys=True) if result is not None else None,
        ))
        row_id = cursor.lastrowid
        conn.commit()
        conn.close()
        return row_id

    def _select(self, where: str, params: tuple, limit: int) -> List[Dict]:
        conn = self._connect()
        conn.row_factory = sqlite3.Row
        cursor = conn.cursor()
        cursor.execute(f'''
            SELECT * FROM runs
            WHERE {where}
            ORDER BY id DESC
            LIMIT ?
        ''', params + (limit,))
        rows = cursor.fetchall()
        conn.close()
        return [dict(row) for row in rows]

    def get_recent_runs(self, limit: int = 50) -> List[Dict]:
        """Most recent runs first."""
        return self._select("1=1", (), limit)

    def get_runs_by_status(self, status: str, limit: int = 50) -> List[Dict]:
        """Runs with the given status, most recent first."""
        return self._select("status = ?", (status,), limit)

    def get_runs_by_timeframe(self, timeframe: str, limit: int = 1000,
                              status: Optional[str] = None) -> List[Dict]:
        """Runs within a timeframe (day, week, month, all), optionally of one status."""
        if timeframe not in TIMEFRAMES:
            raise ValueError(f"Unknown timeframe: {timeframe}")
        if status is None:
            return self._select(TIMEFRAMES[timeframe], (), limit)
        return self._select(f"{TIMEFRAMES[timeframe]} AND status = ?", (status,), limit)

    def get_statistics(self) -> Dict:
        """Counts by status and command, plus activity in the last 24 hours."""
        conn = self._connect()
        cursor = conn.cursor()

        cursor.execute('SELECT status, COUNT(*) FROM runs GROUP BY status')
        status_counts = dict(cursor.fetchall())
        cursor.execute('SELECT command, COUNT(*) FROM runs GROUP BY command')
        command_counts = dict(cursor.fetchall())
        cursor.execute('SELECT COUNT(*) FROM runs')
        total = cursor.fetchone()[0]
        cursor.execute(f"SELECT COUNT(*) FROM runs WHERE {TIMEFRAMES['day']}")
        recent = cursor.fetchone()[0]

        conn.close()
        return {
            'total_runs': total or 0,
            'status_counts': status_counts,
            'command_counts': command_counts,
            'recent_24h': recent or 0,
        }

    def format_run_entry(self, entry: Dict) -> str:
        """Format a ledger entry for display."""
        lines = [f"\n[{entry['timestamp']}] ID: {entry['id']}"]
        lines.append(f"Command: {entry['command']} | Status: {entry['status']} "
                     f"| Exit: {entry.get('exit_code', 0)}")
        if entry.get('config'):
            lines.append(f"Config: {entry['config']}")
        if entry.get('summary'):
            lines.append(f"Summary: {entry['summary']}")
        return "\n".join(lines)
