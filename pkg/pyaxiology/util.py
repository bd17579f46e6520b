from __future__ import annotations
import hashlib
import inspect
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Union

PathLike = Union[str, os.PathLike]


def func_params(function: callable):
    """Returns a list of a functions parameter names.

    If the first parameter is called "self" it is not included.

    Example:
        class MyClass
            def __init__(self, a):
                self.a = a

        def func(a, b, c):
            return a + b + c

        p = func_params(MyClass.__init__)  # p = ["a"]
        p = func_params(func)              # p = ["a", "b", "c"]
    """
    init_sig = inspect.signature(function).parameters
    params = list(init_sig.keys())
    if params and params[0] == "self":
        return params[1:]
    else:
        return params


def sha256_file(path: PathLike) -> str:
    """Returns the hex SHA-256 digest of a file's contents."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write_bytes(path: PathLike, data: bytes):
    """Write a file so that readers never observe a partial write."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: PathLike, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def dump_json(obj: Any) -> str:
    """Serialize with the layout used for every JSON file we write."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
