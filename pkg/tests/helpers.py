# tests/helpers.py

from src.acquisition.genome import Genome, longest_repeat_length


def random_sequence(rng, length, alphabet="ACGT"):
    """Uniform random string over `alphabet`."""
    return "".join(rng.choice(list(alphabet), size=length))


def genome_without_repeats(rng, length, max_repeat):
    """Draws genomes until the longest circular repeat is at most `max_repeat`."""
    while True:
        genome = Genome.from_sequence(random_sequence(rng, length))
        if longest_repeat_length(genome) <= max_repeat:
            return genome
