"""One module per command of the `ubpi` command line."""
