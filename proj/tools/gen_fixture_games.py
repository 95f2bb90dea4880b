#!/usr/bin/env python3
# Copyright 2026 The sgflm Authors
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
"""Generates the pro-style 19x19 SGF fixture corpus under data/games/.

The games are synthetic: corner openings, a small joseki library played in
all eight orientations, local fighting and occasional tenuki. Legality is
enforced with a self-contained rules check (captures, no suicide, positional
superko) that shares no code with the C++ engine, so replaying these files
through the engine is a genuine cross-check.

Files are written the way real archives look: a full header, ten moves per
line, CRLF line endings on some files and UTF-8 player names on others.

    python3 tools/gen_fixture_games.py --out data/games --n 240 --seed 2020
"""

import argparse
import os
import random

N = 19
LETTERS = "abcdefghijklmnopqrs"

# Joseki in a top-left frame, (col, row). Colors alternate starting with the
# player to move.
JOSEKI = [
    [(3, 3), (5, 2), (2, 5), (6, 2), (2, 8)],
    [(3, 3), (2, 5), (5, 2), (2, 8)],
    [(3, 3), (5, 3), (5, 2), (6, 2), (4, 2), (7, 3), (3, 6)],
    [(3, 2), (4, 4), (3, 4), (4, 5), (2, 6)],
    [(3, 2), (5, 2), (4, 4), (3, 5)],
    [(3, 2), (2, 4), (2, 3), (3, 4), (4, 3), (4, 4), (5, 3)],
    [(2, 3), (4, 2), (2, 5), (6, 2)],
    [(3, 3), (2, 2), (3, 2), (2, 3), (4, 4), (1, 5)],
    [(3, 2), (2, 5), (5, 3), (2, 7)],
    [(2, 2), (5, 3), (2, 5), (6, 2)],
    [(3, 3), (5, 2), (5, 3), (6, 3), (5, 4), (6, 4), (5, 5), (7, 2)],
    [(2, 3), (3, 5), (4, 3), (2, 7)],
]

OPENING_POINTS = [(3, 3), (3, 2), (2, 3), (2, 2), (4, 3), (3, 4), (4, 2), (2, 4)]

PLAYERS = [
    "Cho Chikun", "Kobayashi Koichi", "Takemiya Masaki", "Otake Hideo",
    "Rin Kaiho", "Ishida Yoshio", "Kato Masao", "Yoda Norimoto",
    "Cho Hunhyun", "Lee Changho", "Nie Weiping", "Ma Xiaochun",
    "Yoo Changhyuk", "O Meien", "Sakata Eio", "Go Seigen",
]
UTF8_PLAYERS = ["Cho Hunhyun 조훈현", "Nie Weiping 聂卫平",
                "Go Seigen 吳清源", "Rin Kaiho 林海峰"]
EVENTS = ["Kisei", "Meijin", "Honinbo", "Judan", "Tengen", "Oza", "Gosei",
          "Aizu Cup", "Fujitsu Cup", "Ing Cup"]
RANKS = ["9d", "8d", "7d", "6d"]


def transform(pt, corner, flip):
    c, r = pt
    if flip:
        c, r = r, c
    if corner & 1:
        c = N - 1 - c
    if corner & 2:
        r = N - 1 - r
    return c, r


def neighbors(p):
    c, r = p
    if c > 0:
        yield (c - 1, r)
    if c < N - 1:
        yield (c + 1, r)
    if r > 0:
        yield (c, r - 1)
    if r < N - 1:
        yield (c, r + 1)


class Board:
    def __init__(self):
        self.grid = {}
        self.history = {self.key()}

    def key(self):
        return frozenset(self.grid.items())

    def group(self, p):
        color = self.grid[p]
        seen, stack, libs = {p}, [p], set()
        while stack:
            q = stack.pop()
            for n in neighbors(q):
                v = self.grid.get(n)
                if v is None:
                    libs.add(n)
                elif v == color and n not in seen:
                    seen.add(n)
                    stack.append(n)
        return seen, libs

    def try_play(self, p, color):
        """Returns the new grid if legal, else None."""
        if p in self.grid:
            return None
        saved = dict(self.grid)
        self.grid[p] = color
        other = "W" if color == "B" else "B"
        for n in neighbors(p):
            if self.grid.get(n) == other:
                stones, libs = self.group(n)
                if not libs:
                    for s in stones:
                        del self.grid[s]
        _, libs = self.group(p)
        ok = bool(libs) and self.key() not in self.history
        result = dict(self.grid) if ok else None
        self.grid = saved
        return result

    def play(self, p, color):
        g = self.try_play(p, color)
        if g is None:
            return False
        self.grid = g
        self.history.add(self.key())
        return True

    def own_eye(self, p, color):
        return all(self.grid.get(n) == color for n in neighbors(p))


def line_weight(p):
    c, r = p
    line = min(c, r, N - 1 - c, N - 1 - r) + 1
    return {1: 0.05, 2: 0.4, 3: 1.6, 4: 1.6, 5: 0.9}.get(line, 0.5)


def pick_local(board, rng, last, color):
    cands, weights = [], []
    for dc in range(-2, 3):
        for dr in range(-2, 3):
            p = (last[0] + dc, last[1] + dr)
            if not (0 <= p[0] < N and 0 <= p[1] < N) or p in board.grid:
                continue
            if board.own_eye(p, color):
                continue
            d = abs(dc) + abs(dr)
            w = {1: 6.0, 2: 3.0, 3: 1.0, 4: 0.3}.get(d, 0.0)
            if w:
                cands.append(p)
                weights.append(w)
    while cands:
        p = rng.choices(cands, weights)[0]
        if board.try_play(p, color) is not None:
            return p
        i = cands.index(p)
        del cands[i], weights[i]
    return None


def pick_tenuki(board, rng, color):
    cands = [(c, r) for c in range(N) for r in range(N)
             if (c, r) not in board.grid and not board.own_eye((c, r), color)]
    weights = [line_weight(p) for p in cands]
    for _ in range(50):
        if not cands:
            break
        p = rng.choices(cands, weights)[0]
        if board.try_play(p, color) is not None:
            return p
    return None


def generate_moves(rng, length):
    board = Board()
    moves = []
    color = "B"

    def play(p):
        nonlocal color
        if not board.play(p, color):
            return False
        moves.append((color, p))
        color = "W" if color == "B" else "B"
        return True

    corners = [0, 1, 2, 3]
    rng.shuffle(corners)
    for corner in corners:
        play(transform(rng.choice(OPENING_POINTS), corner, rng.random() < 0.5))

    rng.shuffle(corners)
    for corner in corners:
        if rng.random() < 0.2:
            continue
        seq = rng.choice(JOSEKI)
        flip = rng.random() < 0.5
        for pt in seq[1:]:
            if len(moves) >= length:
                break
            if not play(transform(pt, corner, flip)):
                break

    while len(moves) < length:
        p = None
        r = rng.random()
        if r < 0.6 and moves:
            p = pick_local(board, rng, moves[-1][1], color)
        elif r < 0.8 and len(moves) >= 2:
            p = pick_local(board, rng, moves[-2][1], color)
        if p is None:
            p = pick_tenuki(board, rng, color)
        if p is None:
            break
        play(p)
    return moves


def result_text(rng):
    winner = rng.choice("BW")
    kind = rng.random()
    if kind < 0.4:
        return winner + "+R"
    return "%s+%d.5" % (winner, rng.randint(0, 20))


def render(rng, index, moves, end_passes):
    use_utf8 = index % 9 == 4
    pb = rng.choice(UTF8_PLAYERS) if use_utf8 else rng.choice(PLAYERS)
    pw = rng.choice([p for p in PLAYERS if p != pb])
    year = rng.randint(1975, 2005)
    header = (
        "(;GM[1]FF[4]SZ[19]\n"
        "EV[%s]RO[%d]PB[%s]BR[%s]PW[%s]WR[%s]TM[%d]KM[%s]RE[%s]DT[%d-%02d-%02d]\n"
        % (rng.choice(EVENTS), rng.randint(1, 7), pb, rng.choice(RANKS), pw,
           rng.choice(RANKS), rng.choice([3, 5, 8]), rng.choice(["5.5", "6.5", "7.5"]),
           result_text(rng), year, rng.randint(1, 12), rng.randint(1, 28)))
    nodes = [";%s[%s%s]" % (c, LETTERS[p[0]], LETTERS[p[1]]) for c, p in moves]
    if end_passes:
        first = "W" if moves and moves[-1][0] == "B" else "B"
        second = "B" if first == "W" else "W"
        payload = "tt" if end_passes == 2 else ""
        nodes += [";%s[%s]" % (first, payload), ";%s[%s]" % (second, payload)]
    lines = ["".join(nodes[i:i + 10]) for i in range(0, len(nodes), 10)]
    text = header + "\n".join(lines) + ")\n"
    if index % 5 == 2:
        text = text.replace("\n", "\r\n")
    return text.encode("utf-8")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/games")
    ap.add_argument("--n", type=int, default=240)
    ap.add_argument("--seed", type=int, default=2020)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    rng = random.Random(args.seed)
    for i in range(args.n):
        # One long game of fixed length for the move-count checks.
        length = 317 if i == 7 else rng.randint(150, 300)
        moves = generate_moves(rng, length)
        end = 0 if i == 7 else rng.choice([0, 0, 0, 0, 0, 0, 1, 2])
        with open(os.path.join(args.out, "game-%04d.sgf" % (i + 1)), "wb") as f:
            f.write(render(rng, i, moves, end))


if __name__ == "__main__":
    main()
