"""Contains the process-wide cached objects shared by the commands."""
