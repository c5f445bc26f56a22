"""Address-event representation: 15-bit packet codec, FIFO channel, LUT.

A packet is one spike: 7-bit column, 7-bit row, 1 polarity bit, packed
as bits[14:8]=col, bits[7:1]=row, bit[0]=polarity. The channel model is
step-driven: the sender pushes whenever the bounded FIFO has room
(backpressure, never drop) and the receiver drains according to its
schedule, so delivery order always equals send order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import SGFError, TranslationFault

WORD_BITS = 15
COORD_MAX = 127


@dataclass(frozen=True)
class AerPacket:
    """One address event: column/row address (0..127) and polarity bit."""

    col: int
    row: int
    polarity: int

    def validate(self) -> None:
        if not (0 <= self.col <= COORD_MAX):
            raise SGFError(f"column address {self.col} outside 0..{COORD_MAX}")
        if not (0 <= self.row <= COORD_MAX):
            raise SGFError(f"row address {self.row} outside 0..{COORD_MAX}")
        if self.polarity not in (0, 1):
            raise SGFError(f"polarity bit {self.polarity} not 0/1")


def encode(packet: AerPacket) -> int:
    """Pack a packet into its 15-bit word."""
    packet.validate()
    return (packet.col << 8) | (packet.row << 1) | packet.polarity


def decode(word: int) -> AerPacket:
    """Unpack a 15-bit word; the exact inverse of encode."""
    if not (0 <= word < (1 << WORD_BITS)):
        raise SGFError(f"word {word:#x} does not fit in {WORD_BITS} bits")
    return AerPacket(col=word >> 8, row=(word >> 1) & 0x7F, polarity=word & 1)


class AerFifo:
    """Bounded FIFO with a high-watermark statistic."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise SGFError("FIFO capacity must be >= 1")
        self.capacity = capacity
        self._queue: deque = deque()
        self.high_watermark = 0

    def __len__(self) -> int:
        return len(self._queue)

    @property
    def full(self) -> bool:
        return len(self._queue) >= self.capacity

    @property
    def empty(self) -> bool:
        return not self._queue

    def push(self, item) -> None:
        if self.full:
            raise SGFError("push on a full FIFO (sender must block)")
        self._queue.append(item)
        self.high_watermark = max(self.high_watermark, len(self._queue))

    def pop(self):
        if not self._queue:
            raise SGFError("pop on an empty FIFO")
        return self._queue.popleft()


@dataclass
class DeliveryRecord:
    """Per-packet channel timing: scheduler steps of enqueue and dequeue."""

    packet: AerPacket
    enqueue_step: int
    dequeue_step: int = -1


@dataclass
class DeliveryLog:
    records: list[DeliveryRecord] = field(default_factory=list)
    high_watermark: int = 0
    steps: int = 0
    sender_stalls: int = 0

    def delivered_packets(self) -> list[AerPacket]:
        return [r.packet for r in self.records]


Schedule = Optional[Callable[[int], bool]]


def fifo_transfer(
    packets: Sequence[AerPacket],
    fifo: AerFifo,
    receiver: Optional[Callable[[AerPacket, int], None]] = None,
    sender_ready: Schedule = None,
    receiver_ready: Schedule = None,
) -> DeliveryLog:
    """Drive all packets through the FIFO; returns the delivery log.

    One scheduler step lets the receiver drain one packet (if ready and
    the FIFO is non-empty), then lets the sender push one (if ready and
    there is room). A full FIFO stalls the sender; nothing is dropped.
    """
    log = DeliveryLog()
    pending = deque(DeliveryRecord(p, -1) for p in packets)
    in_flight: deque[DeliveryRecord] = deque()
    step = 0
    while pending or in_flight or not fifo.empty:
        if (receiver_ready is None or receiver_ready(step)) and not fifo.empty:
            fifo.pop()
            record = in_flight.popleft()
            record.dequeue_step = step
            log.records.append(record)
            if receiver is not None:
                receiver(record.packet, step)
        if pending and (sender_ready is None or sender_ready(step)):
            if fifo.full:
                log.sender_stalls += 1
            else:
                record = pending.popleft()
                record.enqueue_step = step
                fifo.push(record.packet)
                in_flight.append(record)
        step += 1
        if step > 10 * (len(packets) + 1) * (fifo.capacity + 2) + 1000:
            raise SGFError("fifo_transfer failed to make progress")
    log.high_watermark = fifo.high_watermark
    log.steps = step
    return log


class AddressLut:
    """Translation table from (col, row) source addresses to core addresses."""

    def __init__(self, mapping: dict[tuple[int, int], int]):
        self.mapping = dict(mapping)

    @classmethod
    def identity(cls, width: int, height: int) -> "AddressLut":
        """Row-major linear destination for every in-range source address."""
        return cls(
            {
                (x, y): y * width + x
                for y in range(height)
                for x in range(width)
            }
        )

    def translate(self, packet: AerPacket) -> int:
        key = (packet.col, packet.row)
        if key not in self.mapping:
            raise TranslationFault(
                f"no destination for source address col={packet.col} "
                f"row={packet.row}"
            )
        return self.mapping[key]


def translate(lut: AddressLut, packet: AerPacket) -> int:
    """Destination core address for a packet; faults on unmapped input."""
    return lut.translate(packet)
