"""Shared fixtures for the service tests."""

import random
from pathlib import Path

import pytest

VOCABULARY = (
    "the cat sat on a mat and then it slept while Alice watched her sister read "
    "book without pictures or conversations thought rabbit ran close by"
).split()


def synthetic_text(sentences: int = 300, seed: int = 0) -> str:
    """Gutenberg-shaped text with every mark class well represented."""
    rng = random.Random(seed)
    body = []
    for number in range(1, sentences + 1):
        if number % 60 == 1:
            body.append(f"\nCHAPTER {number // 60 + 1}. A Title\n")
        words = [rng.choice(VOCABULARY) for _ in range(rng.randint(1, 40))]
        clause = " ".join(w + ("," if rng.random() < 0.15 else "") for w in words)
        body.append(clause + rng.choice([".", ".", ".", ".", "?", "!", ";", ":"]))
        if rng.random() < 0.2:
            body.append("\n")
    return (
        "The Project Gutenberg eBook of a synthetic tale\n"
        "*** START OF THE PROJECT GUTENBERG EBOOK SYNTHETIC ***\n"
        + " ".join(body)
        + "\n*** END OF THE PROJECT GUTENBERG EBOOK SYNTHETIC ***\n"
        "License text.\n"
    )


@pytest.fixture
def story_file(tmp_path: Path) -> Path:
    path = tmp_path / "story.txt"
    path.write_text(synthetic_text(), encoding="utf-8")
    return path


@pytest.fixture
def hi_file(tmp_path: Path) -> Path:
    path = tmp_path / "hi.txt"
    path.write_text("Hi. Bye. Hi.", encoding="utf-8")
    return path


@pytest.fixture
def zipf_file(tmp_path: Path) -> Path:
    """Word i occurs about 400 / i times, interleaved."""
    rng = random.Random(1)
    tokens = [f"w{i}" for i in range(1, 61) for _ in range(400 // i)]
    rng.shuffle(tokens)
    path = tmp_path / "zipfian.txt"
    path.write_text(" ".join(tokens) + ".", encoding="utf-8")
    return path
