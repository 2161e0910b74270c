import hashlib
import sqlite3
from datetime import datetime
from pathlib import Path
from typing import Optional

from src.core.models import RunConfig, RunReport
from src.observability.logger import get_logger

logger = get_logger(__name__)


class ReportStore:
    """
    SQLite archive of finished run reports, keyed by the md5 of the
    canonical run configuration
    """

    def __init__(self, db_path: str = "enclose_reports.db"):
        self.db_path = Path(db_path)
        self._init_database()

    def _init_database(self):
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute('''
            CREATE TABLE IF NOT EXISTS reports (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                config_hash TEXT NOT NULL,
                kind TEXT NOT NULL,
                name TEXT NOT NULL,
                report_json TEXT NOT NULL,
                certified INTEGER NOT NULL,
                stored_at TIMESTAMP NOT NULL,
                accessed_count INTEGER DEFAULT 0,
                last_accessed TIMESTAMP
            )
        ''')

        cursor.execute('''
            CREATE INDEX IF NOT EXISTS idx_config_hash
            ON reports(config_hash)
        ''')

        conn.commit()
        conn.close()
        logger.info("💾 report archive ready", path=str(self.db_path))

    @staticmethod
    def key_for(config: RunConfig) -> str:
        return hashlib.md5(config.canonical().encode()).hexdigest()

    def get(self, config: RunConfig) -> Optional[RunReport]:
        """Latest certified report for this configuration, or None"""
        key = self.key_for(config)

        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute('''
            SELECT report_json
            FROM reports
            WHERE config_hash = ? AND certified = 1
            ORDER BY stored_at DESC
            LIMIT 1
        ''', (key,))

        row = cursor.fetchone()
        if not row:
            conn.close()
            return None

        cursor.execute('''
            UPDATE reports
            SET accessed_count = accessed_count + 1,
                last_accessed = ?
            WHERE config_hash = ?
        ''', (datetime.now().isoformat(), key))

        conn.commit()
        conn.close()

        report = RunReport.model_validate_json(row[0])
        report.cached = True
        logger.info("✅ archive hit", kind=report.kind, name=report.name, key=key)
        return report

    def store(self, config: RunConfig, report: RunReport):
        key = self.key_for(config)

        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute('''
            INSERT INTO reports (config_hash, kind, name, report_json, certified, stored_at)
            VALUES (?, ?, ?, ?, ?, ?)
        ''', (key, report.kind, report.name, report.model_dump_json(), int(report.certified),
              datetime.now().isoformat()))

        conn.commit()
        conn.close()

        logger.info("💾 report archived", kind=report.kind, name=report.name, key=key,
                    certified=report.certified)

    def get_stats(self) -> dict:
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute('SELECT COUNT(*) FROM reports')
        total_entries = cursor.fetchone()[0]

        cursor.execute('SELECT SUM(accessed_count) FROM reports')
        total_accesses = cursor.fetchone()[0] or 0

        cursor.execute('SELECT COUNT(*) FROM reports WHERE certified = 0')
        halted = cursor.fetchone()[0]

        conn.close()

        return {
            "total_entries": total_entries,
            "total_accesses": total_accesses,
            "halted_entries": halted,
            "hit_rate": total_accesses / max(total_entries, 1),
        }
