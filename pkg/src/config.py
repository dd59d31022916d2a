import os
import sys
try:
    from dotenv import load_dotenv
except Exception:  # optional dependency in local runs/tests
    def load_dotenv(*args, **kwargs):  # type: ignore
        return False

# Определяем абсолютный путь к директории, где находится этот файл (src)
src_dir = os.path.dirname(os.path.abspath(__file__))
# Корень проекта (на один уровень выше)
project_root = os.path.dirname(src_dir)

dotenv_path = os.path.join(project_root, '.env')

# .env никогда не перетирает уже заданные переменные окружения.
# Во время pytest тесты управляют окружением сами (patch.dict / monkeypatch).
_running_pytest = bool(os.environ.get("PYTEST_CURRENT_TEST"))
if not _running_pytest:
    load_dotenv(dotenv_path=dotenv_path, override=False)


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in {"1", "true", "yes"}


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        print(f"WARNING: invalid {name}={raw!r}, using {default}", file=sys.stderr)
        return default


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        print(f"WARNING: invalid {name}={raw!r}, using {default}", file=sys.stderr)
        return default


# --- Бюджеты перебора ---
PSL_ENUM_BUDGET = _env_int("PSL_ENUM_BUDGET", 10_000_000)
BFS_NODE_BUDGET = _env_int("BFS_NODE_BUDGET", 10_000_000)

# --- Поиск эпиморфизмов ---
EPI_SAMPLE_BUDGET = _env_int("EPI_SAMPLE_BUDGET", 1_000_000)
EPI_STREAMS = max(1, _env_int("EPI_STREAMS", 4))

# --- Численные допуски ---
CHARTAB_TOLERANCE = _env_float("CHARTAB_TOLERANCE", 1e-9)
NONVANISH_THRESHOLD = _env_float("NONVANISH_THRESHOLD", 1e-6)
ROUNDING_RESIDUE = _env_float("ROUNDING_RESIDUE", 1e-4)

# --- Ряды роста ---
GROWTH_RATE_TERMS = _env_int("GROWTH_RATE_TERMS", 200)

# --- Кэш таблиц (обычные JSON-файлы) ---
CACHE_DIR = os.getenv("CACHE_DIR", os.path.join(project_root, "temp", "cache"))
CACHE_ENABLED = _env_bool("CACHE_ENABLED", "true")

# --- Логирование ---
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").strip().upper() or "INFO"
