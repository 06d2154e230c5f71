"""
Shared plumbing for the analyze, simulate, sweep and power commands
"""
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from protocol.exceptions import ProtocolError
from protocol.runner import Command, RunSpec, execute


class ProtocolCommand(BaseCommand):
    command_name: Command

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, type=Path, help='TOML model config')
        parser.add_argument('--out', type=Path, help='Write the report or CSV here instead of stdout')
        parser.add_argument(
            '--set', dest='overrides', action='append', default=[], metavar='SECTION.KEY=VALUE',
            help='Override one config value; repeatable',
        )
        parser.add_argument('--seed', type=int, help='Root seed for the simulator')
        parser.add_argument('--cycles', type=int, help='Cycles to simulate')

    def handle(self, *args, **options):
        spec = RunSpec(
            command=self.command_name,
            config_path=options['config'],
            output_path=options.get('out'),
            overrides=options.get('overrides') or [],
            seed=options.get('seed'),
            cycles=options.get('cycles'),
        )
        try:
            execute(spec, self.stdout)
        except ProtocolError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code)
        if spec.output_path:
            self.stdout.write(self.style.SUCCESS(f'Wrote {spec.output_path}'))
