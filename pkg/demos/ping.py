"""
Ping over a fiber link
======================

Two agents bounce a qubit back and forth over 10 km of fiber. Each hop
costs one pulse at the sender and the flight time ``L / c`` on the way.
"""

from qnetsim import Agent, Simulation, X, new_stream


class Pinger(Agent):
    def run(self):
        for qsys in self.qstream:
            q = qsys.qubit(0)
            self.qsend("Ponger", q)
            q = self.qrecv("Ponger")
            self.output(self.measure(q))


class Ponger(Agent):
    def run(self):
        for _ in self.qstream:
            q = self.qrecv("Pinger")
            X(q)
            self.qsend("Pinger", q)


stream = new_stream(1, 1)
ping = Pinger(stream)
pong = Ponger(stream)
ping.qconnect(pong, length=10.0)

out = Simulation(ping, pong, seed=0).run()
print("qubit came back flipped:", out["Pinger"] == 1)
print(f"Pinger clock: {ping.clock * 1e6:.4f} us")
print(f"Ponger clock: {pong.clock * 1e6:.4f} us")
