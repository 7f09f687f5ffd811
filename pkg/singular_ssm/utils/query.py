class ResultQueries:
    """SQL statements for the benchmark result store."""

    CREATE_RUNTIME_TABLE = """
        CREATE TABLE IF NOT EXISTS runtime_benchmark (
            run_id VARCHAR,
            recorded_at TIMESTAMP,
            config VARCHAR,
            precision VARCHAR,
            n INTEGER,
            ell INTEGER,
            r INTEGER,
            T INTEGER,
            reduced_seconds DOUBLE,
            unreduced_seconds DOUBLE,
            ratio DOUBLE,
            predicted_ratio DOUBLE,
            reduction_seconds DOUBLE
        )
    """

    CREATE_HILBERT_TABLE = """
        CREATE TABLE IF NOT EXISTS hilbert_benchmark (
            run_id VARCHAR,
            recorded_at TIMESTAMP,
            n INTEGER,
            ell INTEGER,
            method VARCHAR,
            log10_mae_mean DOUBLE,
            log10_mae_cov DOUBLE,
            log10_mae DOUBLE
        )
    """

    INSERT_ROWS = "INSERT INTO {table_name} ({columns}) VALUES ({placeholders})"

    GET_RUN = "SELECT * FROM {table_name} WHERE run_id = ? ORDER BY recorded_at"

    GET_TABLE_COUNT = "SELECT COUNT(*) FROM {table_name}"
