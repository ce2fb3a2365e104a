"""Wire protocol for auditing external agents.

Requests and responses are line-delimited JSON, one in-flight request per
session. A request is ``{"id": int, "term": str, "pei": str, "content":
str}``; the response must echo the id and carry a verdict that parses to
exactly assent, neutral, or dissent. Anything else is a protocol error,
never silently coerced, so a misbehaving agent aborts the affected term's
audit instead of corrupting tallies.

Adapter specs accepted by :func:`external_provider`:

    sim:<policy-file>   in-process simulated agent from a policy JSON file
    cmd:<argv>          subprocess speaking the protocol on stdin/stdout
    tcp:<host:port>     TCP connection speaking the same protocol
"""

from __future__ import annotations

import json
import queue
import shlex
import socket
import subprocess
import threading
from typing import Callable

from .ledger import Verdict
from .simagents import SimAgent, load_policy

__all__ = [
    "AdapterError",
    "AdapterTimeout",
    "AdapterProtocolError",
    "ExternalAgent",
    "SubprocessTransport",
    "TcpTransport",
    "external_provider",
]

DEFAULT_TIMEOUT = 30.0

_VALID_VERDICTS = {"assent", "neutral", "dissent"}


class AdapterError(Exception):
    """Base class for wire adapter failures."""


class AdapterTimeout(AdapterError):
    """No response arrived within the per-verdict timeout."""


class AdapterProtocolError(AdapterError):
    """The agent sent something outside the protocol."""


class _LineTransport:
    """Shared line-oriented plumbing: a writer plus a reader thread."""

    def __init__(self):
        self._queue: queue.Queue[str | None] = queue.Queue()

    def _start_reader(self, readline: Callable[[], str]) -> None:
        def _loop():
            try:
                while True:
                    line = readline()
                    if not line:
                        break
                    line = line.strip()
                    if line:
                        self._queue.put(line)
            except (OSError, ValueError):
                pass
            finally:
                self._queue.put(None)  # end-of-stream sentinel

        thread = threading.Thread(target=_loop, daemon=True)
        thread.start()

    def recv_line(self, timeout: float) -> str:
        try:
            line = self._queue.get(timeout=timeout)
        except queue.Empty:
            raise AdapterTimeout(f"no response within {timeout} s") from None
        if line is None:
            raise AdapterProtocolError("agent closed the connection")
        return line

    def send_line(self, line: str) -> None:
        raise NotImplementedError

    def close(self) -> None:
        raise NotImplementedError


class SubprocessTransport(_LineTransport):
    def __init__(self, argv: list[str]):
        super().__init__()
        self._proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
            bufsize=1,
        )
        if self._proc.stdin is None or self._proc.stdout is None:
            raise AdapterError("failed to open pipes to agent process")
        self._start_reader(self._proc.stdout.readline)

    def send_line(self, line: str) -> None:
        assert self._proc.stdin is not None
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (OSError, ValueError) as exc:
            raise AdapterError(f"agent process not accepting input: {exc}") from exc

    def close(self) -> None:
        if self._proc.poll() is None:
            self._proc.terminate()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()


class TcpTransport(_LineTransport):
    def __init__(self, host: str, port: int):
        super().__init__()
        self._sock = socket.create_connection((host, port))
        # The reader thread owns this file object exclusively; close() only
        # shuts the socket down, which unblocks the thread with EOF.
        reader_file = self._sock.makefile("r", encoding="utf-8")
        self._start_reader(reader_file.readline)

    def send_line(self, line: str) -> None:
        self._sock.sendall((line + "\n").encode("utf-8"))

    def close(self) -> None:
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()


class ExternalAgent:
    """Verdict provider that forwards queries over a line transport.

    One request is in flight at a time. Late replies to a request that
    already timed out are discarded; a response with any other unknown id
    is a protocol error.
    """

    def __init__(self, transport: _LineTransport, agent_id: str,
                 timeout: float = DEFAULT_TIMEOUT):
        self.agent_id = agent_id
        self._transport = transport
        self._timeout = timeout
        self._next_id = 0
        self._lock = threading.Lock()

    def verdict(self, term: str, event) -> Verdict:
        with self._lock:
            rid = self._next_id
            self._next_id += 1
            request = {
                "id": rid,
                "term": term,
                "pei": event.pei,
                "content": getattr(event, "content", ""),
            }
            self._transport.send_line(json.dumps(request, sort_keys=True))
            while True:
                line = self._transport.recv_line(self._timeout)
                try:
                    message = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise AdapterProtocolError(f"unparseable response: {line!r}") from exc
                mid = message.get("id")
                if mid == rid:
                    break
                if isinstance(mid, int) and mid < rid:
                    continue  # late reply to an abandoned request
                raise AdapterProtocolError(
                    f"response id {mid!r} does not match request {rid}"
                )
            raw = message.get("verdict")
            if raw not in _VALID_VERDICTS:
                raise AdapterProtocolError(f"invalid verdict {raw!r}")
            return Verdict(raw)

    def close(self) -> None:
        self._transport.close()


def external_provider(spec: str, agent_id: str = "A1",
                      timeout: float = DEFAULT_TIMEOUT):
    """Build a verdict provider from an adapter spec string."""
    kind, _, rest = spec.partition(":")
    if not rest:
        raise ValueError(f"malformed adapter spec {spec!r}")
    if kind == "sim":
        return SimAgent(load_policy(rest))
    if kind == "cmd":
        return ExternalAgent(SubprocessTransport(shlex.split(rest)),
                             agent_id=agent_id, timeout=timeout)
    if kind == "tcp":
        host, _, port = rest.rpartition(":")
        if not host or not port.isdigit():
            raise ValueError(f"malformed tcp adapter spec {spec!r}")
        return ExternalAgent(TcpTransport(host, int(port)),
                             agent_id=agent_id, timeout=timeout)
    raise ValueError(f"unknown adapter kind {kind!r} in spec {spec!r}")
