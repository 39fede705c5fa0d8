from ..errors import IngestError


def read_text(path: str) -> str:
    """File contents as text; undecodable bytes become U+FFFD instead of failing."""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise IngestError(f"could not read {path}: {e}", e)
    return data.decode("utf-8", errors="replace")
