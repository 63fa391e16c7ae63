class FakeRng:
    """Scripted stand-in for the run RNG: hands out a fixed draw sequence."""

    def __init__(self, draws):
        self.draws = list(draws)
        self.used = 0

    def random(self) -> float:
        v = self.draws[self.used]
        self.used += 1
        return v
