import argparse


def add_common_flags(
    parser: argparse.ArgumentParser, config: bool = True, seed: bool = True, out: bool = True, cap: bool = False
) -> None:
    """Flag condivisi dai sottocomandi: --config, --seed, --out, --cap."""
    if config:
        parser.add_argument("--config", help="YAML configuration file, or the name of a bundled one")
    if seed:
        parser.add_argument("--seed", type=int, default=None, help="run only this seed")
    if out:
        parser.add_argument("--out", default=None, help="output directory")
    if cap:
        parser.add_argument("--cap", type=int, default=None, help="maximum number of enumerated action sequences")
