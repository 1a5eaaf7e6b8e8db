"""Run a set of agents concurrently, one thread per agent."""

from __future__ import annotations

import queue
import sys
import threading
import time

from .agents import HolderRegistry, OutputSink
from .errors import ConfigurationError, DeadlockError, SimulationError
from .rng import derive_rng, use_rng

DEFAULT_WATCHDOG = 60.0


class ProgressReporter:
    """Per-agent counters of systems consumed, rendered as one status line."""

    def __init__(self, stream=None, interval=0.1):
        self.stream = stream if stream is not None else sys.stderr
        self.interval = interval
        self.counters = {}
        self._last = 0.0

    def update(self, owner, consumed, total):
        self.counters[owner] = (consumed, total)

    def render(self) -> str:
        return " | ".join(f"{name}: {done}/{total}" for name, (done, total) in self.counters.items())

    def refresh(self, force=False):
        now = time.monotonic()
        if not self.counters or (not force and now - self._last < self.interval):
            return
        self._last = now
        self.stream.write("\r" + self.render())
        self.stream.flush()

    def close(self):
        if self.counters:
            self.refresh(force=True)
            self.stream.write("\n")
            self.stream.flush()


class Simulation:
    """A network of agents plus the settings of one run.

    Parameters
    ----------
    *agents : Agent
    seed : int, optional
        Master seed. Each agent's generator is derived from ``(seed, name)``
        and each channel's error-model generator from ``(seed, channel)``,
        so results do not depend on thread scheduling.
    progress : bool
        Print per-agent stream progress to ``progress_stream``.
    watchdog : float
        Seconds every live agent may stay blocked on a receive with no
        channel activity before the run is declared deadlocked.
    debug : bool
        Track qubit holders and raise on sends of qubits held elsewhere.
    """

    def __init__(self, *agents, seed=None, progress=False, watchdog=DEFAULT_WATCHDOG,
                 debug=False, sink=None, progress_stream=None):
        self.agents = list(agents)
        self.seed = seed
        self.progress = progress
        self.watchdog = watchdog
        self.debug = debug
        self.progress_stream = progress_stream
        if sink is None:
            sinks = {id(a.out): a.out for a in self.agents if a.out is not None}
            sink = next(iter(sinks.values())) if len(sinks) == 1 else OutputSink()
        self.sink = sink
        self.reporter = None
        self.holders = None

    def validate(self):
        names = [a.name for a in self.agents]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"agent names must be unique, got {names}")
        known = set(names)
        for a in self.agents:
            for peer in a.endpoints:
                if peer not in known:
                    raise ConfigurationError(f"{a.name} is connected to {peer}, which is not in the simulation")

    def _conduits(self):
        seen = {}
        for a in self.agents:
            for c in a.conduits():
                seen[id(c)] = c
        return list(seen.values())

    def run(self) -> OutputSink:
        """Execute every agent to completion and return the shared output sink."""
        self.validate()
        if not self.agents:
            return self.sink
        abort = threading.Event()
        conduits = self._conduits()
        for c in conduits:
            c.abort = abort
            if self.seed is not None and c.kind == "quantum":
                c.error_model.reseed(derive_rng(self.seed, "channel", c.name))
        progress_queue = queue.Queue()
        self.reporter = ProgressReporter(self.progress_stream) if self.progress else None
        self.holders = HolderRegistry() if self.debug else None
        for a in self.agents:
            if a.out is None:
                a.out = self.sink
            if self.seed is not None:
                a.rng = derive_rng(self.seed, "agent", a.name)
            a.holders = self.holders
            a.progress_queue = progress_queue

        failures = []
        lock = threading.Lock()

        def main(agent):
            try:
                with use_rng(agent.rng):
                    agent.run()
            except BaseException as exc:  # noqa: BLE001 - surfaced by the supervisor
                with lock:
                    failures.append((agent.name, exc))
                abort.set()
            finally:
                for c in agent.qchannels_out.values():
                    c.close()
                for c in agent.cchannels_out.values():
                    c.close()

        threads = {a.name: threading.Thread(target=main, args=(a,), name=a.name, daemon=True)
                   for a in self.agents}
        for t in threads.values():
            t.start()

        def activity():
            return sum(c.sent + c.delivered for c in conduits)

        last_activity = activity()
        stalled_since = None
        try:
            while True:
                alive = [t for t in threads.values() if t.is_alive()]
                if not alive:
                    break
                alive[0].join(0.02)
                self._drain(progress_queue)
                if failures:
                    break
                live = [a for a in self.agents if threads[a.name].is_alive()]
                now = time.monotonic()
                current = activity()
                if live and all(a.blocked_on for a in live) and current == last_activity:
                    if stalled_since is None:
                        stalled_since = now
                    elif now - stalled_since > self.watchdog:
                        blocked = {a.name: a.blocked_on for a in live}
                        abort.set()
                        raise DeadlockError(blocked)
                else:
                    stalled_since = None
                last_activity = current
        finally:
            if failures or abort.is_set():
                abort.set()
                for t in threads.values():
                    t.join(5.0)
            self._drain(progress_queue)
            if self.reporter is not None:
                self.reporter.close()
            for a in self.agents:
                a.progress_queue = None
        if failures:
            name, exc = failures[0]
            raise SimulationError(name, exc) from exc
        return self.sink

    def _drain(self, progress_queue):
        updated = False
        while True:
            try:
                owner, consumed, total = progress_queue.get_nowait()
            except queue.Empty:
                break
            if self.reporter is not None:
                self.reporter.update(owner, consumed, total)
                updated = True
        if updated:
            self.reporter.refresh()


def run(*agents, **kwargs) -> OutputSink:
    return Simulation(*agents, **kwargs).run()
