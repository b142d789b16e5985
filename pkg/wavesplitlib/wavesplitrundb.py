"""
Module that contains a SQLite ledger of the command line runs.
"""
############################################################################
#  wavesplitrundb.py
#
#  WaveSplit: incoming/outgoing decomposition of radial Schrodinger data.
#
#  WaveSplit is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  WaveSplit is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with WaveSplit.  If not, see <http://www.gnu.org/licenses/>.
#
#
# Purpose:  One row per run (identified by its run_id) holding the config
#           hash, output directory, timings and exit status, so sweeps can
#           skip runs already done and 'report --ledger' can list them.
#
# History:
# Version 1.0 - Created.
#
############################################################################

import logging
from sqlite3 import Connection as SQLite3Connection

import sqlalchemy
import sqlalchemy.orm
from sqlalchemy import event
from sqlalchemy.engine import Engine

from .wavesplitexception import WaveSplitValidationException

logger = logging.getLogger(__name__)

Base = sqlalchemy.orm.declarative_base()

RUN_STATUS_LIST = ["complete", "failed", "aborted"]


class WaveSplitRun(Base):
    __tablename__ = "WaveSplitRun"
    run_id = sqlalchemy.Column(sqlalchemy.String, primary_key=True)
    subcommand = sqlalchemy.Column(sqlalchemy.String, nullable=False)
    config_hash = sqlalchemy.Column(sqlalchemy.String, nullable=False)
    output_dir = sqlalchemy.Column(sqlalchemy.String, nullable=True)
    started = sqlalchemy.Column(sqlalchemy.String, nullable=True)
    wall_time = sqlalchemy.Column(sqlalchemy.Float, nullable=False, default=0.0)
    exit_code = sqlalchemy.Column(sqlalchemy.Integer, nullable=False, default=0)
    status = sqlalchemy.Column(sqlalchemy.String, nullable=False, default="complete")


@event.listens_for(Engine, "connect")
def set_sqlite_pragma(dbapi_connection, connection_record):
    if isinstance(dbapi_connection, SQLite3Connection):
        cursor = dbapi_connection.cursor()
        cursor.execute("PRAGMA journal_mode = MEMORY")
        cursor.execute("PRAGMA synchronous = OFF")
        cursor.execute("PRAGMA temp_store = MEMORY")
        cursor.close()


def run_status(exit_code):
    if exit_code == 0:
        return "complete"
    if exit_code == 1:
        return "failed"
    return "aborted"


def _row_to_dict(row):
    return {
        "run_id": row.run_id,
        "subcommand": row.subcommand,
        "config_hash": row.config_hash,
        "output_dir": row.output_dir,
        "started": row.started,
        "wall_time": row.wall_time,
        "exit_code": row.exit_code,
        "status": row.status,
    }


class RunLedger(object):
    def __init__(self, sqlite_db_file):
        """
        Constructor for the class.

        :param sqlite_db_file: A file path for the SQLite database must be provided.

        """
        self.sqlite_db_file = sqlite_db_file
        self.sqlite_db_conn = "sqlite:///{}".format(self.sqlite_db_file)

    def _session(self):
        logger.debug("Creating Database Engine and Session.")
        db_engine = sqlalchemy.create_engine(self.sqlite_db_conn, pool_pre_ping=True)
        session_sqlalc = sqlalchemy.orm.sessionmaker(bind=db_engine)
        return session_sqlalc()

    def init_db(self):
        """
        A function which must be called before use if a database file does not
        already exist. Note. if the database does exist then it will be deleted
        and recreated and any data with the existing database will be lost.

        """
        try:
            db_engine = sqlalchemy.create_engine(self.sqlite_db_conn, pool_pre_ping=True)
            Base.metadata.drop_all(db_engine)
            logger.debug("Creating Database.")
            Base.metadata.create_all(db_engine)
        except sqlalchemy.exc.SQLAlchemyError as e:
            raise WaveSplitValidationException(
                "The SQLite database file cannot be opened: '{}' ({})".format(self.sqlite_db_conn, e)
            )

    def ensure_db(self):
        """
        Create the tables when they are missing, keeping any existing rows.
        """
        db_engine = sqlalchemy.create_engine(self.sqlite_db_conn, pool_pre_ping=True)
        Base.metadata.create_all(db_engine)

    def add_run(self, manifest):
        """
        A function which adds a run to the database.

        :param manifest: the run manifest dict, which must contain the keys
                         'run_id', 'subcommand' and 'config_hash'; 'output_dir',
                         'started', 'wall_time' and 'exit_code' are optional.

        """
        for key in ("run_id", "subcommand", "config_hash"):
            if key not in manifest:
                raise WaveSplitValidationException(f"The run manifest has no '{key}' entry.")
        exit_code = int(manifest.get("exit_code", 0))
        ses = self._session()
        try:
            ses.merge(
                WaveSplitRun(
                    run_id=manifest["run_id"],
                    subcommand=manifest["subcommand"],
                    config_hash=manifest["config_hash"],
                    output_dir=manifest.get("output_dir"),
                    started=manifest.get("started"),
                    wall_time=float(manifest.get("wall_time", 0.0)),
                    exit_code=exit_code,
                    status=run_status(exit_code),
                )
            )
            ses.commit()
            logger.debug("Written run %s to the database.", manifest["run_id"])
        finally:
            ses.close()

    def is_run_in_db(self, run_id):
        """
        A function to test whether a run is within the database.

        :param run_id: the run identifier.
        :return: boolean

        """
        ses = self._session()
        try:
            query_result = ses.query(WaveSplitRun).filter(WaveSplitRun.run_id == run_id).one_or_none()
        finally:
            ses.close()
        return query_result is not None

    def get_runs(self, subcommand=None, config_hash=None):
        """
        A function to list runs, optionally filtered.

        :return: list of dicts ordered by start time and run_id.

        """
        ses = self._session()
        try:
            query = ses.query(WaveSplitRun)
            if subcommand is not None:
                query = query.filter(WaveSplitRun.subcommand == subcommand)
            if config_hash is not None:
                query = query.filter(WaveSplitRun.config_hash == config_hash)
            rows = query.order_by(WaveSplitRun.started, WaveSplitRun.run_id).all()
            return [_row_to_dict(row) for row in rows]
        finally:
            ses.close()

    def n_runs(self, status=None):
        """
        Number of runs in the database, optionally with a given status.
        """
        if status is not None and status not in RUN_STATUS_LIST:
            raise WaveSplitValidationException(f"Run status '{status}' is not recognised.")
        ses = self._session()
        try:
            query = ses.query(WaveSplitRun)
            if status is not None:
                query = query.filter(WaveSplitRun.status == status)
            return query.count()
        finally:
            ses.close()
