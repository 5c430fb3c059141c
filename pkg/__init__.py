import logging
import sys

import click

from config import Config, settings_of
from models import CausalError


class CausalApp(click.Group):
    """Command group carrying the settings of one config class.

    Exit codes: 0 on success, 1 for usage errors, 2 for data, validation
    and environment errors (reported as ``error: <message>`` on stderr).
    """

    def __init__(self, config: dict, **kwargs):
        super().__init__(**kwargs)
        self.config = config

    def make_context(self, info_name, args, parent=None, **extra):
        extra.setdefault('obj', self.config)
        return super().make_context(info_name, args, parent=parent, **extra)

    def main(self, args=None, prog_name=None, **kwargs):
        kwargs['standalone_mode'] = False
        try:
            rv = super().main(args, prog_name, **kwargs)
        except click.UsageError as error:
            error.show()
            sys.exit(1)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(1)
        except click.ClickException as error:
            click.echo(f"error: {error.format_message()}", err=True)
            sys.exit(2)
        except (CausalError, OSError) as error:
            logging.getLogger(__name__).debug("command failed", exc_info=True)
            click.echo(f"error: {error}", err=True)
            sys.exit(2)
        sys.exit(rv if isinstance(rv, int) else 0)


def create_app(config_class=Config):
    settings = settings_of(config_class)

    def configure(verbose):
        level = {0: settings['LOG_LEVEL'], 1: 'INFO'}.get(verbose, 'DEBUG')
        logging.basicConfig(format=settings['LOG_FORMAT'])
        logging.getLogger().setLevel(level)

    verbose = click.Option(['-v', '--verbose'], count=True, help='More log output (-v info, -vv debug).')
    app = CausalApp(settings, name='cbn', callback=configure, params=[verbose],
                    help='Learn causal Bayesian networks from a simulated smart home and query them.')

    # Register commands
    from commands.data import gen_data
    app.add_command(gen_data)

    from commands.discover import discover, sweep
    app.add_command(discover)
    app.add_command(sweep)

    from commands.fit import fit
    app.add_command(fit)

    from commands.infer import infer
    app.add_command(infer)

    from commands.compare import compare
    app.add_command(compare)

    return app
