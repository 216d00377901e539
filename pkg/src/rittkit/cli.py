"""Command-line client for the rittkit service.

Every command builds a request, sends it to the FastAPI app (in process by
default, or to a remote server via --url) and renders the response.  Output
is deterministic: identical configurations produce identical bytes.

Exit codes: 0 success, 1 check/assertion failure, 2 usage error.
"""

from __future__ import annotations

import asyncio
import json
import sys
from typing import Optional

import click
import httpx


def _post_in_process(path: str, payload: dict):
    from .service.app import app

    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://rittkit.internal", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _post(url: Optional[str], path: str, payload: dict):
    if url is None:
        response = _post_in_process(path, payload)
    else:
        with httpx.Client(base_url=url, timeout=600.0) as client:
            response = client.post(path, json=payload)
    if response.status_code == 422:
        body = response.json()
        detail = body.get("detail", body)
        raise click.UsageError(f"{path}: {detail}")
    if response.status_code >= 400:
        click.echo(f"{path} failed with status {response.status_code}: {response.text}", err=True)
        sys.exit(1)
    return response.json()


def _emit(data: bytes, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        with open(out, "wb") as fh:
            fh.write(data)


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode("utf-8")


@click.group()
@click.option("--url", default=None, help="Remote service URL; runs in process when omitted.")
@click.pass_context
def main(ctx, url):
    """Experiments on square functions of Ritt operators over matrix algebras."""
    ctx.ensure_object(dict)
    ctx.obj["url"] = url


@main.command()
@click.option("--p", type=float, required=True, help="Schatten exponent, p != 2.")
@click.option("--n-list", "n_list", default=None, help="Comma-separated sizes, e.g. 4,8,16,32,64.")
@click.option("--n", "n_single", type=int, multiple=True, help="Add one size (repeatable).")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--threads", type=int, default=None, help="Cap row parallelism (default RITTKIT_THREADS).")
@click.pass_context
def growth(ctx, p, n_list, n_single, out, fmt, threads):
    """Tabulate column vs row square-function growth and the fitted slope."""
    sizes = list(n_single)
    if n_list:
        try:
            sizes.extend(int(tok) for tok in n_list.split(",") if tok.strip())
        except ValueError:
            raise click.UsageError(f"could not parse --n-list {n_list!r}")
    if not sizes:
        raise click.UsageError("no sizes given; use --n-list or --n")
    if p == 2.0:
        raise click.UsageError("growth experiment requires p != 2")
    payload = {"schema": 1, "p": p, "n_list": sizes}
    if threads is not None:
        payload["threads"] = threads
    body = _post(ctx.obj["url"], "/growth", payload)
    if fmt == "csv":
        _emit(body["csv"].encode("utf-8"), out)
        summary = dict(body["summary"], schema=1)
        click.echo(json.dumps(summary, sort_keys=True), err=True)
    else:
        body.pop("csv", None)
        _emit(_json_bytes(dict(body, schema=1)), out)


@main.command()
@click.option("--p", type=float, required=True, help="Schatten exponent in (1, 2).")
@click.option("--n", type=int, default=6, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option(
    "--splitter",
    type=click.Choice(["all-column", "all-row", "rad-optimal", "thresholded"]),
    default="rad-optimal",
    show_default=True,
)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--k-max", "k", type=int, default=None, help="Override the certified truncation.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["json"]), default="json")
@click.pass_context
def decompose(ctx, p, n, seed, splitter, tol, k, out, fmt):
    """Column/row decomposition of a random matrix under the diagonal model."""
    if not 1.0 < p < 2.0:
        raise click.UsageError("decompose requires p in (1, 2)")
    payload = {"schema": 1, "p": p, "n": n, "seed": seed, "splitter": splitter, "tol": tol}
    if k is not None:
        payload["k"] = k
    body = _post(ctx.obj["url"], "/decompose", payload)
    _emit(_json_bytes(dict(body, schema=1)), out)


@main.command()
@click.option("--p", type=float, required=True)
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--kind", type=click.Choice(["col", "row", "rad", "split"]), default="col")
@click.option("--n", type=int, default=8, show_default=True)
@click.option("--rho", type=float, default=1.0, show_default=True)
@click.option("--operator", type=click.Choice(["left", "right"]), default="left")
@click.option("--input", "input_kind", type=click.Choice(["random", "rank-one"]), default="random")
@click.option("--seed", type=int, default=None, help="Required for random input.")
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--k-max", type=int, default=10**6, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def sqfun(ctx, p, alpha, kind, n, rho, operator, input_kind, seed, tol, k_max, out):
    """Evaluate one square function on the diagonal model."""
    if input_kind == "random" and seed is None:
        raise click.UsageError("--seed is required for random input")
    payload = {
        "schema": 1,
        "p": p,
        "alpha": alpha,
        "kind": kind,
        "n": n,
        "rho": rho,
        "operator": operator,
        "input": input_kind,
        "tol": tol,
        "k_max": k_max,
    }
    if seed is not None:
        payload["seed"] = seed
    body = _post(ctx.obj["url"], "/sqfun", payload)
    _emit(_json_bytes(dict(body, schema=1)), out)


@main.command()
@click.option("--n", type=int, default=4, show_default=True)
@click.option("--c", type=float, default=0.9, show_default=True, help="Toeplitz coefficient.")
@click.option("--p", type=float, default=4.0 / 3.0, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--no-demo", is_flag=True, default=False, help="Skip the decomposition demo.")
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def markov(ctx, n, c, p, seed, no_demo, tol, out):
    """Generate a Toeplitz Schur Markov map, validate it, run the demo."""
    if not 1.0 < p < 2.0:
        raise click.UsageError("markov demo requires p in (1, 2)")
    payload = {
        "schema": 1,
        "n": n,
        "c": c,
        "p": p,
        "seed": seed,
        "demo": not no_demo,
        "tol": tol,
    }
    body = _post(ctx.obj["url"], "/markov", payload)
    _emit(_json_bytes(dict(body, schema=1)), out)


@main.command()
@click.option("--suite", required=True, help="Suite name (identities, norms, markov).")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def check(ctx, suite, out):
    """Run a named invariant suite; nonzero exit on failure."""
    body = _post(ctx.obj["url"], "/check", {"schema": 1, "suite": suite})
    _emit(_json_bytes(dict(body, schema=1)), out)
    for item in body["results"]:
        status = "PASS" if item["passed"] else "FAIL"
        click.echo(f"{status} {item['name']}: {item['detail']}", err=True)
    if not body["passed"]:
        sys.exit(1)


if __name__ == "__main__":
    main()
