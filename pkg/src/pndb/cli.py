"""Command-line interface.

Local commands open the store directory directly; `serve` exposes it over
HTTP and `sync` pulls changes from a master's HTTP feed. Domain errors print
one line to stderr and exit 1; usage errors exit 2.
"""

from __future__ import annotations

import sys
from functools import wraps
from pathlib import Path

import click

from pndb import iov as iovmod
from pndb import sync as syncmod
from pndb import tableio, xmlio
from pndb.errors import PndbError
from pndb.model import ScopePath, render_primitive
from pndb.store import Store, StoreMode

DEFAULT_STORE = "./pndb-store"


def store_option(f):
    return click.option(
        "--store", "store_path", envvar="PNDB_STORE", default=DEFAULT_STORE,
        show_default=True, metavar="DIR", help="Store directory.")(f)


def handle_errors(f):
    @wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except PndbError as exc:
            click.echo(f"error: {exc.code}: {exc}", err=True)
            sys.exit(1)
    return wrapper


def _print_report(report) -> None:
    click.echo(f"imported {report.collections} collection(s), "
               f"{report.dictionaries} new dictionary version(s)")
    for line in report.warnings:
        click.echo(f"warning: {line}")


@click.group()
def main():
    """Versioned detector-parameter database."""


@main.command()
@store_option
@handle_errors
def init(store_path):
    """Create an empty store directory."""
    with Store.create(Path(store_path)) as store:
        click.echo(f"initialized store {store.store_id.hex()} at {store_path}")


@main.command()
@store_option
@click.option("--listen", default="127.0.0.1:8080", show_default=True,
              metavar="HOST:PORT", help="Bind address.")
@click.option("--replica-of", "replica_of", default=None, metavar="URL",
              help="Serve as read-only replica of this master, pulling "
                   "changes once at startup.")
@handle_errors
def serve(store_path, listen, replica_of):
    """Serve the store over HTTP."""
    import uvicorn

    from pndb.service import create_app

    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        raise click.BadParameter("expected HOST:PORT", param_hint="--listen")
    mode = StoreMode.READ_WRITE
    if replica_of is not None:
        mode = StoreMode.REPLICA
        _pull_once(store_path, replica_of)
    app = create_app(store_path, mode)
    uvicorn.run(app, host=host, port=int(port_text))


def _pull_once(store_path, master_url: str) -> None:
    import httpx

    with Store.open(Path(store_path), StoreMode.REPLICA) as store:
        url = f"{master_url.rstrip('/')}/api/sync/changes"
        response = httpx.get(url, params={"since": store.seq}, timeout=30.0)
        response.raise_for_status()
        changeset = syncmod.decode_changeset(response.content)
        applied = syncmod.apply_changes(store, changeset)
        click.echo(f"pulled {len(changeset.records)} record(s), "
                   f"now at seq {applied}")


@main.command("import-table")
@store_option
@click.argument("source", type=click.File("r"))
@handle_errors
def import_table(store_path, source):
    """Load collections from a pipe-separated table file ('-' for stdin)."""
    with Store.open(Path(store_path)) as store:
        _print_report(tableio.import_table(store, source.read()))


@main.command("import-xml")
@store_option
@click.argument("source", type=click.File("r"))
@handle_errors
def import_xml(store_path, source):
    """Load collections from an XML document ('-' for stdin)."""
    with Store.open(Path(store_path)) as store:
        _print_report(xmlio.import_xml(store, source.read()))


@main.command("export-xml")
@store_option
@click.option("--scope", default=None, metavar="PATH",
              help="Restrict to this scope subtree.")
@handle_errors
def export_xml(store_path, scope):
    """Write the XML document for the store to stdout."""
    with Store.open(Path(store_path), StoreMode.READ_ONLY) as store:
        parsed = ScopePath.parse(scope) if scope is not None else None
        click.echo(xmlio.export_xml(store, parsed), nl=False)


@main.command()
@store_option
@click.argument("class_name", metavar="CLASS")
@click.argument("instance")
@click.option("--version", "version", type=int, default=None,
              help="Object version (default: latest).")
@handle_errors
def get(store_path, class_name, instance, version):
    """Print one collection in re-importable table form."""
    with Store.open(Path(store_path), StoreMode.READ_ONLY) as store:
        obj = store.get_object(class_name, instance, version)
        dictionary = store.get_dictionary(class_name, obj.dict_version)
        click.echo(f"#class {class_name}")
        click.echo(f"#instance {instance}")
        click.echo(f"#scope {obj.scope.text}")
        click.echo(f"# dict-version {obj.dict_version} "
                   f"object-version {obj.object_version}")
        for spec, value in zip(dictionary.fields, obj.values):
            click.echo("|".join([spec.name, spec.type.tag,
                                 render_primitive(value), spec.unit or "",
                                 spec.comment]))


@main.command("put-blob")
@store_option
@click.argument("source", type=click.File("rb"))
@handle_errors
def put_blob(store_path, source):
    """Store a file as a blob and print its literal."""
    with Store.open(Path(store_path)) as store:
        click.echo(store.put_blob(source.read()).literal)


@main.command("create-folder")
@store_option
@click.argument("folder")
@click.option("--description", default="", help="Folder description.")
@handle_errors
def create_folder(store_path, folder, description):
    """Create an interval-of-validity folder."""
    with Store.open(Path(store_path)) as store:
        iovmod.create_folder(store, folder, description)
        click.echo(f"created folder {folder}")


@main.command("iov-store")
@store_option
@click.argument("folder")
@click.option("--since", type=int, required=True,
              help="Start of validity (inclusive).")
@click.option("--payload", required=True,
              help="Payload, normally an object address.")
@handle_errors
def iov_store(store_path, folder, since, payload):
    """Append an open-ended validity entry to a folder's HEAD."""
    with Store.open(Path(store_path)) as store:
        entry = iovmod.iov_store(store, folder, since, payload)
        click.echo(f"stored [{entry.interval.since}, inf) -> {entry.payload}")


@main.command("iov-resolve")
@store_option
@click.argument("folder")
@click.option("--tag", default=iovmod.HEAD, show_default=True,
              help="Tag to resolve against.")
@click.option("--at", "at", type=int, required=True, help="Validity time.")
@handle_errors
def iov_resolve(store_path, folder, tag, at):
    """Print the payload valid at a given time."""
    with Store.open(Path(store_path), StoreMode.READ_ONLY) as store:
        click.echo(iovmod.iov_resolve(store, folder, tag, at).payload)


@main.command()
@store_option
@click.argument("folder")
@click.argument("tagname")
@handle_errors
def tag(store_path, folder, tagname):
    """Freeze the folder's current HEAD under an immutable tag."""
    with Store.open(Path(store_path)) as store:
        count = iovmod.tag_head(store, folder, tagname)
        click.echo(f"tagged {count} entr{'y' if count == 1 else 'ies'} "
                   f"as {tagname}")


@main.command()
@store_option
@click.option("--from", "master_url", required=True, metavar="URL",
              help="Master base URL to pull changes from.")
@handle_errors
def sync(store_path, master_url):
    """Pull and apply pending changes from a master."""
    _pull_once(store_path, master_url)


if __name__ == "__main__":
    main()
