#!/usr/bin/env python3
# Copyright 2026 The sgflm Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Straight-line reference forward pass for a 1-layer, 1-head, dim-4 model.

Parameters are a fixed function of their flat index, p[i] = 0.5 sin(0.7 i + 0.3),
laid out wte, wpe, ln1.g, ln1.b, w_qkv, b_qkv, w_proj, b_proj, ln2.g, ln2.b,
w_fc, b_fc, w_proj, b_proj, ln_f.g, ln_f.b. Prints a C++ initializer of the
8 x 10 logits, or with --check FILE verifies a frozen copy.
"""

import math
import sys

import numpy as np

V, T, C, F = 10, 8, 4, 16
TOKENS = [1, 3, 5, 7, 9, 2, 4, 6]

shapes = [(V, C), (T, C), (C,), (C,), (C, 3 * C), (3 * C,), (C, C), (C,),
          (C,), (C,), (C, F), (F,), (F, C), (C,), (C,), (C,)]
total = sum(int(np.prod(s)) for s in shapes)
flat = 0.5 * np.sin(0.7 * np.arange(total) + 0.3)
tensors = []
off = 0
for s in shapes:
    n = int(np.prod(s))
    tensors.append(flat[off:off + n].reshape(s))
    off += n
(wte, wpe, ln1_g, ln1_b, w_qkv, b_qkv, w_ap, b_ap, ln2_g, ln2_b,
 w_fc, b_fc, w_mp, b_mp, lnf_g, lnf_b) = tensors


def layer_norm(x, g, b):
    out = np.zeros_like(x)
    for t in range(x.shape[0]):
        mu = sum(x[t]) / C
        var = sum((v - mu) ** 2 for v in x[t]) / C
        out[t] = (x[t] - mu) / math.sqrt(var + 1e-5) * g + b
    return out


def gelu(v):
    return 0.5 * v * (1 + math.tanh(math.sqrt(2 / math.pi) * (v + 0.044715 * v ** 3)))


x = np.array([wte[tok] + wpe[t] for t, tok in enumerate(TOKENS)])

h = layer_norm(x, ln1_g, ln1_b)
qkv = h @ w_qkv + b_qkv
q, k, v = qkv[:, :C], qkv[:, C:2 * C], qkv[:, 2 * C:]
y = np.zeros((T, C))
for t in range(T):
    scores = [float(q[t] @ k[u]) / math.sqrt(C) for u in range(t + 1)]
    m = max(scores)
    w = [math.exp(s - m) for s in scores]
    z = sum(w)
    for u in range(t + 1):
        y[t] += w[u] / z * v[u]
x = x + (y @ w_ap + b_ap)

h = layer_norm(x, ln2_g, ln2_b)
a = h @ w_fc + b_fc
a = np.vectorize(gelu)(a)
x = x + (a @ w_mp + b_mp)

x = layer_norm(x, lnf_g, lnf_b)
logits = x @ wte.T

LICENSE = """// Copyright 2026 The sgflm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
"""

lines = LICENSE.splitlines() + ["", "// Generated by tests/oracles/forward_oracle.py",
         "inline constexpr double kOracleLogits[8][10] = {"]
for row in logits:
    lines.append("    {" + ", ".join(f"{v:.17g}" for v in row) + "},")
lines.append("};")
text = "\n".join(lines) + "\n"

if len(sys.argv) == 3 and sys.argv[1] == "--check":
    with open(sys.argv[2]) as f:
        frozen = f.read()
    if frozen != text:
        sys.exit("frozen oracle logits differ from a fresh computation")
    print("frozen oracle logits match")
else:
    sys.stdout.write(text)
