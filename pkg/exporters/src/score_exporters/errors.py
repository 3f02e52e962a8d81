class ExportError(Exception):
    """Anything that should abort an export with a message instead of a traceback."""
