from collections import Counter
from typing import Optional, Sequence, Tuple

Word = Tuple[int, ...]


def validate_word(w: Sequence[int]) -> Word:
    word = tuple(int(s) for s in w)
    for i in range(1, len(word)):
        if word[i] == word[i - 1]:
            raise ValueError(f"symbol {word[i]} repeats at positions {i - 1} and {i}")
    return word


def _reducible(counts: Counter) -> int:
    k = len(counts)
    if k > 1 and min(counts.values()) >= k:
        return k
    return 0


def find_reducible_subword(w: Sequence[int]) -> Optional[Tuple[int, int, int]]:
    """Shortest (then leftmost) window [start, end) whose k > 1 distinct symbols each occur at least k times."""
    word = validate_word(w)
    length = len(word)
    for size in range(2, length + 1):
        counts = Counter(word[:size])
        for start in range(length - size + 1):
            if start:
                old = word[start - 1]
                counts[old] -= 1
                if not counts[old]:
                    del counts[old]
                counts[word[start + size - 1]] += 1
            k = _reducible(counts)
            if k:
                return start, start + size, k
    return None


def extremal_word(n: int) -> Word:
    """Longest word on symbols 0..n-1 with no reducible window; its length is 2 * n! - 1."""
    if n < 2:
        raise ValueError(f"extremal words need at least 2 symbols, got {n}")
    word: Word = (0,)
    for k in range(2, n + 1):
        word = (word + (k - 1,)) * (k - 1) + word
    return word
