from protocol.runner import Command as RunCommand

from ._base import ProtocolCommand


class Command(ProtocolCommand):
    help = 'Monte Carlo estimate of duty cycle and cycle speed with 95% confidence intervals'
    command_name = RunCommand.SIMULATE
