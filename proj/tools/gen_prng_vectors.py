# Copyright 2026 The errscope Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Generates tests/fixtures/prng_conformance.json.

A standalone implementation of the perturbation stream and the punctuation
and typo rules, written against the documented contract rather than the C++
sources. The C++ test suite checks the engine against the frozen output.

    python3 tools/gen_prng_vectors.py > tests/fixtures/prng_conformance.json
"""

import json
import sys

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

WHITESPACE = set(
    [chr(c) for c in range(0x09, 0x0E)]
    + [chr(c) for c in (0x20, 0x85, 0xA0, 0x1680)]
    + [chr(c) for c in range(0x2000, 0x200B)]
    + [chr(c) for c in (0x2028, 0x2029, 0x202F, 0x205F, 0x3000)]
)
DETACHABLE = set(".,!?;:'\"()")
ENDING = ".,!?;:"
ASCII_SPACE = " \t\n\r\f\v"


def mix(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


class Stream:
    def __init__(self, seed, uid, variant):
        s = mix((seed + GOLDEN * (uid + 1)) & MASK)
        self.state = mix((s + GOLDEN * (variant + 1)) & MASK)

    def next(self):
        self.state = (self.state + GOLDEN) & MASK
        return mix(self.state)

    def below(self, n):
        return self.next() % n


def word_spans(text):
    """(start, end) code point spans of non-punctuation tokens."""
    spans = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] in WHITESPACE:
            i += 1
            continue
        j = i
        while j < n and text[j] not in WHITESPACE:
            j += 1
        a, b = i, j
        while a < b and text[a] in DETACHABLE:
            a += 1
        while b > a and text[b - 1] in DETACHABLE:
            b -= 1
        if a < b:
            spans.append((a, b))
        i = j
    return spans


def perturb(text, uid, seed, typo_variants):
    out = []

    def add(family, name, t):
        if t != text:
            out.append({"test_name": name, "family": family, "text": t})

    base = text.rstrip(ASCII_SPACE)
    core = base.rstrip(ENDING)
    has_ending = core != base
    if not has_ending and base:
        add("punctuation", "ending_period_add", base + ".")
    if core:
        add("punctuation", "ending_question", core + "?")
    if has_ending and core:
        add("punctuation", "ending_strip", core)
    spans = word_spans(text)
    if len(spans) >= 2:
        at = spans[0][1]
        if at >= len(text) or text[at] not in DETACHABLE:
            add("punctuation", "inner_comma", text[:at] + "," + text[at:])

    candidates = [s for s in spans if s[1] - s[0] >= 4]
    if candidates:
        for v in range(typo_variants):
            rng = Stream(seed, uid, v)
            start, end = candidates[rng.below(len(candidates))]
            i = 1 + rng.below(end - start - 3)
            p = start + i
            t = text[:p] + text[p + 1] + text[p] + text[p + 2:]
            add("fuzzy_matching", "typo_swap_%d" % v, t)
    return out


STREAMS = [
    (0, 0, 0),
    (42, 0, 0),
    (42, 1, 0),
    (42, 1, 1),
    (42, 7, 2),
    (7, 123456, 0),
    (MASK, MASK - 1, 5),
    (1234567890123, 99, 3),
]

TEXTS = [
    "what's today's high and low",
    "book a table for two at seven",
    "Transfer $500 from checking to savings!",
    "how do I reset my pin?",
    "hello",
    "hi there",
    "cancel",
    "",
    "   ",
    "What is the weather in Zürich tomorrow...",
    "play \"bohemian rhapsody\" by queen",
    "naïve café crème brûlée recipe",
    "set an alarm　for 6am;",
    "(please) remind me to call mom",
    "is it going to rain, tomorrow?!",
    "a b c d",
    "supercalifragilisticexpialidocious",
    "who wrote the book 'war and peace'",
    "order 2 pizzas, 1 soda, and garlic bread.",
    "日本語のテキスト を 翻訳して ください",
]


def main():
    streams = []
    for seed, uid, variant in STREAMS:
        rng = Stream(seed, uid, variant)
        draws = [rng.next() for _ in range(8)]
        rng = Stream(seed, uid, variant)
        below = [[n, rng.below(n)] for n in (1, 2, 3, 7, 10, 1000, 2**32 + 15)]
        streams.append(
            {"seed": seed, "id": uid, "variant": variant, "draws": draws, "below": below}
        )
    cases = []
    for seed in (42, 2026):
        for uid, text in enumerate(TEXTS):
            cases.append(
                {
                    "seed": seed,
                    "id": uid,
                    "text": text,
                    "typo_variants": 3,
                    "variants": perturb(text, uid, seed, 3),
                }
            )
    json.dump({"streams": streams, "perturbations": cases}, sys.stdout, ensure_ascii=False,
              indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
