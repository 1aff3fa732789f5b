"""Locates the compiled _core extension for the smoke tests.

An installed wheel provides `microsage` directly. In a plain CMake checkout
the extension lives in the build tree; point MICROSAGE_CORE_DIR at it (the
ctest registration does this automatically).
"""

import os
import sys
from pathlib import Path


def _ensure_core_importable():
    try:
        import microsage._core  # noqa: F401
        return
    except ImportError:
        pass

    repo_root = Path(__file__).resolve().parents[2]
    candidates = []
    env_dir = os.environ.get("MICROSAGE_CORE_DIR")
    if env_dir:
        candidates.append(Path(env_dir))
    candidates.append(repo_root / "build" / "bindings")

    for cand in candidates:
        if cand.is_dir() and any(cand.glob("_core*")):
            # Present the build-tree extension as the microsage._core module.
            sys.path.insert(0, str(repo_root / "python"))
            sys.path.insert(0, str(cand))
            import _core

            sys.modules["microsage._core"] = _core
            return
    raise RuntimeError(
        "cannot import microsage._core; build the project or set MICROSAGE_CORE_DIR"
    )


_ensure_core_importable()
