"""Allow `python -m atomguard` as an alias for the `atomguard` script."""

from .cli import main

main()
