"""Freeze Porter stemmer test vectors from NLTK's reference-mode stemmer.

NLTK's MARTIN_EXTENSIONS mode reproduces Martin Porter's C implementation.
Words are harvested from the repository's own text plus a list of
suffix-heavy words, so the vectors exercise every rule family.

    python3 tests/oracles/porter_vectors.py > tests/data/porter_vectors.tsv
"""
import pathlib
import re
import sys

from nltk.stem.porter import PorterStemmer

ROOT = pathlib.Path(__file__).resolve().parents[2]

EXTRA = """
caresses ponies ties caress cats feed agreed plastered bled motoring sing
conflated troubled sized hopping tanned falling hissing fizzed failing filing
happy sky relational conditional rational valenci hesitanci digitizer
conformabli radicalli differentli vileli analogousli vietnamization
predication operator feudalism decisiveness hopefulness callousness formaliti
sensitiviti sensibiliti triplicate formative formalize electriciti electrical
hopeful goodness revival allowance inference airliner gyroscopic adjustable
defensible irritant replacement adjustment dependent adoption homologou
communism activate angulariti homologous effective bowdlerize probate rate
cease controll roll generalization generalizations oscillators abilities
archaeology geology running runs ran generously university universal
agreement abundantly lying dying tying sensational traditional
""".split()


def main():
    words = set(EXTRA)
    for name in ("paper.md", "spec.md"):
        path = ROOT / name
        if path.exists():
            words.update(re.findall(r"[a-z]+", path.read_text().lower()))
    stemmer = PorterStemmer(mode=PorterStemmer.MARTIN_EXTENSIONS)
    out = sys.stdout
    for w in sorted(words):
        out.write(f"{w}\t{stemmer.stem(w)}\n")


if __name__ == "__main__":
    main()
