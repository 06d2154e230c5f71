from protocol.runner import Command as RunCommand

from ._base import ProtocolCommand


class Command(ProtocolCommand):
    help = 'Analytic and simulated metrics over sim.u_grid, written as CSV'
    command_name = RunCommand.SWEEP
