from protocol.runner import Command as RunCommand

from ._base import ProtocolCommand


class Command(ProtocolCommand):
    help = 'Closed-form duty cycle and cycle speed for the configured ESI mode'
    command_name = RunCommand.ANALYZE
