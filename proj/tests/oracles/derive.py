"""Independent NumPy re-derivation of the frozen values in tests/test_oracles.cpp.

Run: python3 tests/oracles/derive.py
"""
import numpy as np

PARENT = [1, -1, 1, 2, 3, 1, 5, 6, 1, 8, 9, 1, 11, 12, 0, 0, 14, 15]
GROUP = [0, 3, 1, 2, 2, 1, 2, 2, 3, 4, 5, 3, 4, 5, 0, 0, 0, 0]
ORDER = [1, 0, 2, 5, 8, 11, 14, 15, 3, 6, 9, 12, 16, 17, 4, 7, 10, 13]

POSE = np.array([
    [262, 80], [256, 140], [200, 141], [195, 215], [190, 280], [312, 139],
    [318, 214], [322, 279], [226, 281], [222, 381], [221, 481], [287, 280],
    [290, 380], [291, 480], [252, 66], [271, 67], [236, 70], [285, 71]], dtype=float)


def wrap(a):
    a = np.arctan2(np.sin(a), np.cos(a))
    return np.pi if a <= -np.pi else a


def seg(p, i):
    base = np.zeros(2) if PARENT[i] < 0 else p[PARENT[i]]
    return p[i] - base


def ref_dir(p, i):
    j = PARENT[i]
    while j >= 0:
        s = seg(p, j)
        n = np.hypot(*s)
        if n > 0:
            return s / n
        j = PARENT[j]
    return np.array([1.0, 0.0])


def to_polar(p):
    out = []
    for i in range(18):
        s = seg(p, i)
        r = ref_dir(p, i)
        alpha = np.arctan2(r[0] * s[1] - r[1] * s[0], r @ s)
        out.append((wrap(alpha), np.hypot(*s)))
    return out


def to_cartesian(polar, root):
    p = np.zeros((18, 2))
    direction = {}
    for i in ORDER:
        a, l = polar[i]
        if PARENT[i] < 0:
            d = np.array([np.cos(a), np.sin(a)])
            p[i] = root
            direction[i] = d if l > 0 else np.array([1.0, 0.0])
            continue
        r = direction[PARENT[i]]
        d = np.array([r[0] * np.cos(a) - r[1] * np.sin(a), r[0] * np.sin(a) + r[1] * np.cos(a)])
        p[i] = p[PARENT[i]] + l * d
        direction[i] = d if l > 0 else r
    return p


def fmt(v):
    return ", ".join(f"{x:.17g}" for x in np.ravel(v))


polar = to_polar(POSE)
print("// polar alpha:", fmt([a for a, _ in polar]))
print("// polar length:", fmt([l for _, l in polar]))
gl = np.zeros(6)
for i in range(18):
    if PARENT[i] >= 0:
        gl[GROUP[i]] += polar[i][1]
print("// group lengths:", fmt(gl))

tau_p = np.array([1.0, 1.2, 0.9, 1.1, 1.0, 0.8])
tau_a = np.array([1.5, 1.0, 1.1, 0.9, 1.3, 1.2])
scaled = [(a, l * (tau_a[GROUP[i]] / tau_p[GROUP[i]] if PARENT[i] >= 0 else 1.0)) for i, (a, l) in enumerate(polar)]
print("// deform:", fmt(to_cartesian(scaled, POSE[1])))

# MLP [3, 4, 2]
W1 = np.array([[0.5, -0.25, 0.1], [-0.3, 0.8, 0.2], [0.05, 0.4, -0.6], [0.7, 0.1, 0.3]])
b1 = np.array([0.1, -0.2, 0.05, 0.0])
W2 = np.array([[0.3, -0.5, 0.25, 0.6], [-0.4, 0.2, 0.9, -0.1]])
b2 = np.array([0.01, -0.02])
x = np.array([0.9, -0.4, 1.3])
print("// mlp relu:", fmt(W2 @ np.maximum(W1 @ x + b1, 0) + b2))
print("// mlp tanh:", fmt(W2 @ np.tanh(W1 @ x + b1) + b2))

F = np.arange(12, dtype=float).reshape(2, 2, 3) / 10.0 - 0.5
Fm = F.reshape(2, -1)
G = Fm @ Fm.T / Fm.size
print("// gram:", fmt(G))
Fb = np.array([0.3, -0.2, 0.7, 0.1, 0.4, -0.6]).reshape(2, 3, 1)
Fbm = Fb.reshape(2, -1)
Gb = Fbm @ Fbm.T / Fbm.size
print("// style:", fmt([np.sum((G - Gb) ** 2)]))
print("// style grad:", fmt(4.0 / Fm.size * (G - Gb) @ Fm))

lengths = np.array([l for _, l in polar])
mean = np.mean([lengths[i] for i in range(18) if PARENT[i] >= 0])
s = np.array([1.3, 0.8, 1.1, 0.9, 1.2, 0.7])
orig = lengths / mean
scl = np.array([orig[i] * (s[GROUP[i]] if PARENT[i] >= 0 else 1.0) for i in range(18)])
raw = np.array([0.2, -0.1, 0.05, 0.0, 0.3, -0.4])
tau = np.exp(raw)
terms = [orig[i] - scl[i] / tau[GROUP[i]] for i in range(18) if PARENT[i] >= 0]
print("// factor loss:", fmt([np.mean(np.abs(terms))]))
grad = np.zeros(6)
for i in range(18):
    if PARENT[i] >= 0:
        d = orig[i] - scl[i] / tau[GROUP[i]]
        grad[GROUP[i]] += np.sign(d) * scl[i] / tau[GROUP[i]] / 17
print("// factor grad:", fmt(grad))
