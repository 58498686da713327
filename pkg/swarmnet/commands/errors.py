"""Exit-code contract of the command line.

Services raise ``ValueError`` subclasses for bad input; the group below turns
them into exit code 1 and anything else into exit code 2, the same way the
HTTP layer of a service turns them into 4xx and 5xx responses.
"""
import logging

import click

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


class CommandFailure(click.ClickException):
    def __init__(self, detail: str, exit_code: int = EXIT_RUNTIME):
        super().__init__(detail)
        self.exit_code = exit_code

    def show(self, file=None) -> None:
        click.echo(f"error: {self.format_message()}", err=True, file=file)


class SwarmnetGroup(click.Group):
    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INVALID
            raise
        except (click.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except ValueError as exc:
            # domain errors and pydantic ValidationError
            logger.debug("command rejected its input", exc_info=True)
            raise CommandFailure(str(exc), EXIT_INVALID) from exc
        except Exception as exc:
            logger.debug("command failed", exc_info=True)
            raise CommandFailure(str(exc) or type(exc).__name__, EXIT_RUNTIME) from exc
