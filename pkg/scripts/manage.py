#!/usr/bin/env python3
import os
import sys

# --- Настройка путей для корректного импорта ---
# Этот блок должен выполняться перед импортом модулей из src.
script_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(script_dir)
if project_root not in sys.path:
    sys.path.insert(0, project_root)
src_dir = os.path.join(project_root, "src")
if src_dir not in sys.path:
    sys.path.insert(0, src_dir)

# --- Импорты ---
import json  # noqa: E402
import logging  # noqa: E402

import click  # noqa: E402

from src import config  # noqa: E402
from src.cache import JsonCache  # noqa: E402
from src.chartab import load_or_build_table, table_to_csv, table_to_json  # noqa: E402
from src.errors import AlgebraError  # noqa: E402
from src.formats import parse_matrix  # noqa: E402
from src.growth import (  # noqa: E402
    cayley_growth,
    compare_quotient_vs_fuchsian,
    family_sweep,
    growth_rate,
    growth_table_from_json,
    growth_table_to_csv,
    growth_table_to_json,
    polygon_series,
    series_coeffs,
)
from src.metrics import ERRORS_TOTAL, render_metrics  # noqa: E402
from src.psl2 import standard_generators  # noqa: E402
from src.signatures import (  # noqa: E402
    admissible,
    commutator_evidence,
    consistency_report,
    find_epimorphism,
    genus_one_generating_pairs,
    hyperbolic_area,
    key_lemma_check,
    multiplicities,
    parse_signature,
    rh_genus,
    verify_epimorphism,
    witness_from_json,
    witness_to_json,
)

# --- Настройка и инициализация ---
# Логи идут в stderr, stdout остаётся машиночитаемым.
logging.basicConfig(level=config.LOG_LEVEL, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def _dump(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def _flag(value: bool) -> str:
    return "true" if value else "false"


class AlgebraGroup(click.Group):
    """Доменные ошибки -> exit 1 с текстом '<module>: <reason>'."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except AlgebraError as e:
            ERRORS_TOTAL.labels(type=type(e).__name__).inc()
            raise click.ClickException(str(e))


@click.group(cls=AlgebraGroup)
@click.option('--log-level', default=config.LOG_LEVEL, show_default=True,
              type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False))
@click.option('--metrics', 'show_metrics', is_flag=True, help='Напечатать метрики Prometheus в stderr после команды.')
@click.option('--cache-dir', type=click.Path(file_okay=False), default=None, help='Каталог JSON-кэша.')
@click.option('--no-cache', is_flag=True, help='Не читать и не писать кэш.')
@click.pass_context
def cli(ctx, log_level: str, show_metrics: bool, cache_dir, no_cache: bool):
    """PSL2(F_p): таблицы характеров, сигнатуры, эпиморфизмы, рост."""
    logging.getLogger().setLevel(log_level.upper())
    ctx.ensure_object(dict)
    ctx.obj['cache'] = JsonCache(cache_dir, enabled=False if no_cache else None)
    if show_metrics:
        ctx.call_on_close(lambda: click.echo(render_metrics(), err=True))


# --- chartab ---

@cli.command('chartab')
@click.option('--p', 'p', type=int, required=True, help='Простое p = 3 (mod 4), p >= 7.')
@click.option('--format', 'fmt', type=click.Choice(['json', 'csv']), default='json', show_default=True)
@click.pass_context
def chartab(ctx, p: int, fmt: str):
    """Таблица характеров PSL2(F_p)."""
    table = load_or_build_table(p, ctx.obj['cache'])
    click.echo(_dump(table_to_json(table)) if fmt == 'json' else table_to_csv(table), nl=fmt == 'json')


# --- signature ---

@cli.group('signature')
def signature_group():
    """Проверка сигнатур."""


@signature_group.command('check')
@click.option('--p', 'p', type=int, required=True)
@click.option('--sig', 'sig_text', required=True, help="Сигнатура 'h:m1,m2,...' или 'h:-'.")
@click.option('--format', 'fmt', type=click.Choice(['text', 'json']), default='text', show_default=True)
@click.option('--exhaustive', is_flag=True, help="Для (1; m): полный перебор пар (A, B) вместо леммы.")
@click.pass_context
def signature_check(ctx, p: int, sig_text: str, fmt: str, exhaustive: bool):
    """Допустимость сигнатуры (h; m1, ..., mr) для PSL2(F_p)."""
    sig = parse_signature(sig_text)
    decision = admissible(sig, p)
    payload = {
        "signature": sig.text(),
        "p": p,
        "admissible": decision.ok,
        "reason": decision.reason,
        "rh_genus": str(rh_genus(sig, p)),
        "hyperbolic_area": str(hyperbolic_area(sig)),
        "multiplicities": {role.value: n for role, n in multiplicities(sig, p).items() if n},
    }
    if sig.h == 1 and sig.periods:
        table = load_or_build_table(p, ctx.obj['cache'])
        payload["commutator_evidence"] = [
            {"period": m, "g_class": str(ev.g_class), "x_class": str(ev.x_class), "count": ev.count}
            for m in sorted(set(sig.periods))
            for ev in commutator_evidence(m, p, table)
            if ev.count > 0
        ]
    if exhaustive and sig.h == 1 and sig.r == 1:
        pairs = genus_one_generating_pairs(sig.periods[0], p)
        payload["generating_pairs"] = pairs
        if decision.ok and not pairs:
            logger.warning(f"Сигнатура {sig} допустима по лемме, но при p={p} эпиморфизма нет (полный перебор)")
    if fmt == 'json':
        click.echo(_dump(payload))
        return
    click.echo(f"signature: {sig}")
    click.echo(f"admissible: {_flag(decision.ok)}")
    click.echo(f"reason: {decision.reason}")
    click.echo(f"genus: {payload['rh_genus']}")
    if "generating_pairs" in payload:
        click.echo(f"generating_pairs: {payload['generating_pairs']}")
    for ev in payload.get("commutator_evidence", []):
        click.echo(f"commutator: {ev['g_class']} = [x, h], x in {ev['x_class']} ({ev['count']} pairs)")


@signature_group.command('keylemma')
@click.option('--p', 'p', type=int, required=True)
@click.option('--sig', 'sig_text', required=True)
def signature_keylemma(p: int, sig_text: str):
    """Обе объединённые оценки как есть, плюс применимость."""
    sig = parse_signature(sig_text)
    res = key_lemma_check(sig, p)
    click.echo(f"signature: {sig}")
    click.echo(f"ineq1: {_flag(res.ineq1)} ({float(res.lhs1):.6f} >= 0)")
    click.echo(f"ineq2: {_flag(res.ineq2)} ({float(res.lhs2):.6f} >= 1)")
    click.echo(f"applicable: {_flag(res.applicable)}")


# --- epi ---

@cli.group('epi')
def epi_group():
    """Эпиморфизмы с ядром-поверхностью."""


@epi_group.command('find')
@click.option('--p', 'p', type=int, required=True)
@click.option('--sig', 'sig_text', required=True)
@click.option('--budget', type=int, default=None, help='Бюджет выборок (по умолчанию EPI_SAMPLE_BUDGET).')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), default=None, help='Записать свидетельство в файл.')
@click.pass_context
def epi_find(ctx, p: int, sig_text: str, budget, seed: int, out_path):
    """Поиск свидетельства; неудача по бюджету не доказывает недопустимость."""
    sig = parse_signature(sig_text)
    cache = ctx.obj['cache']
    payload = cache.get("epi", p, sig=sig.text(), seed=seed, budget=budget)
    if payload is None:
        witness = find_epimorphism(sig, p, budget=budget, seed=seed)
        payload = witness_to_json(witness)
        cache.put("epi", p, payload, sig=sig.text(), seed=seed, budget=budget)
    text = _dump(payload)
    if out_path:
        with open(out_path, 'w', encoding='utf-8') as f:
            f.write(text + "\n")
    click.echo(text)


@epi_group.command('verify')
@click.option('--witness', 'witness_path', type=click.Path(exists=True, dir_okay=False), required=True)
def epi_verify(witness_path: str):
    """Проверка свидетельства: порядки, соотношение, порождение."""
    try:
        with open(witness_path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        witness = witness_from_json(data)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise click.ClickException(f"signatures: unreadable witness: {e}")
    result = verify_epimorphism(witness)
    click.echo(f"valid: {_flag(result.ok)}")
    click.echo(f"reason: {result.reason}")
    if not result.ok:
        ctx = click.get_current_context()
        ctx.exit(1)


# --- growth ---

@cli.group('growth')
def growth_group():
    """Функции роста."""


@growth_group.command('cayley')
@click.option('--p', 'p', type=int, required=True)
@click.option('--nmax', type=int, default=20, show_default=True)
@click.option('--gen', 'gens', multiple=True, help="Порождающий '[[a,b],[c,d]]'; по умолчанию S и T.")
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default='csv', show_default=True)
@click.pass_context
def growth_cayley(ctx, p: int, nmax: int, gens, fmt: str):
    """BFS по графу Кэли PSL2(F_p)."""
    elements = [parse_matrix(g, p) for g in gens] if gens else list(standard_generators(p))
    cache = ctx.obj['cache']
    key = {"nmax": nmax, "gens": [str(g) for g in elements]}
    cached = cache.get("cayley", p, **key)
    table = growth_table_from_json(cached) if cached is not None else None
    if table is None:
        table = cayley_growth(elements, nmax)
        cache.put("cayley", p, growth_table_to_json(table), **key)
    if fmt == 'json':
        click.echo(_dump(growth_table_to_json(table)))
    else:
        click.echo(growth_table_to_csv(table), nl=False)


@growth_group.command('series')
@click.option('--variant', type=click.Choice(['cone3', 'smooth']), required=True)
@click.option('--polygon-n', 'n', type=int, required=True)
@click.option('--terms', type=int, default=10, show_default=True)
@click.option('--rate', 'with_rate', is_flag=True, help='Добавить оценку экспоненты роста.')
def growth_series(variant: str, n: int, terms: int, with_rate: bool):
    """Коэффициенты рациональной функции роста многоугольной группы."""
    series = polygon_series(n, variant)
    payload = {
        "variant": variant,
        "n": n,
        "numerator": list(series.numerator),
        "denominator": list(series.denominator),
        "coefficients": series_coeffs(series, terms),
    }
    if with_rate:
        rate = growth_rate(series)
        payload["rate"] = {
            "lambda": rate.lam,
            "dominant_root_check": rate.dominant_root_check,
            "agrees": rate.agrees,
            "exponential": rate.exponential,
        }
    click.echo(_dump(payload))


@growth_group.command('compare')
@click.option('--p', 'p', type=int, required=True)
@click.option('--sig', 'sig_text', default='1:3', show_default=True)
@click.option('--nmax', type=int, default=6, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--budget', type=int, default=None)
def growth_compare(p: int, sig_text: str, nmax: int, seed: int, budget):
    """Рост факторгруппы PSL2(F_p) против фуксовой группы."""
    report = compare_quotient_vs_fuchsian(p, parse_signature(sig_text), nmax, seed=seed, budget=budget)
    click.echo(_dump(report.to_json()))


# --- family ---

@cli.group('family')
def family_group():
    """Семейства конечных групп."""


@family_group.command('sweep')
@click.option('--p-list', 'p_list', required=True, help='Простые через запятую, например 7,11,19,23.')
@click.option('--nmax', type=int, default=20, show_default=True)
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default='csv', show_default=True)
def family_sweep_cmd(p_list: str, nmax: int, fmt: str):
    """Рост семейства PSL2(F_p) с порождающими S, T."""
    try:
        primes = [int(x) for x in p_list.split(',') if x.strip()]
    except ValueError:
        raise click.BadParameter(f"ожидался список чисел: {p_list!r}", param_hint='--p-list')
    sweep = family_sweep(primes, nmax)
    if fmt == 'json':
        click.echo(_dump({
            "family": growth_table_to_json(sweep.family),
            "members": {str(p): growth_table_to_json(t) for p, t in sweep.tables.items()},
        }))
        return
    click.echo(growth_table_to_csv(sweep.family), nl=False)
    for p, t in sweep.tables.items():
        saturated = t.saturated_at if t.saturated_at is not None else "no"
        click.echo(f"# p={p} saturated_at={saturated} ball={t.balls[-1]}", err=True)


# --- consistency ---

@cli.group('consistency')
def consistency_group():
    """Сверка объединённых оценок с разбором случаев."""


@consistency_group.command('report')
@click.option('--p', 'p', type=int, required=True)
@click.option('--samples', type=int, default=1000, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
def consistency_report_cmd(p: int, samples: int, seed: int):
    """Таблица согласия admissible() и key lemma на случайных сигнатурах."""
    click.echo(_dump(consistency_report(p, samples, seed).to_json()))


# --- cache ---

@cli.group('cache')
def cache_group():
    """JSON-кэш."""


@cache_group.command('clear')
@click.pass_context
def cache_clear(ctx):
    removed = ctx.obj['cache'].clear()
    click.echo(f"Удалено файлов кэша: {removed}")


if __name__ == '__main__':
    cli()
