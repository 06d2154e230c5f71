from protocol.runner import Command as RunCommand

from ._base import ProtocolCommand


class Command(ProtocolCommand):
    help = 'Transmit power for an SNR-outage target, plus the implied symbol rate'
    command_name = RunCommand.POWER
