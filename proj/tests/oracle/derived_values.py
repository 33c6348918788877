"""Independent calculations for the frozen constants in the unit tests.

Run with plain python3; nothing here touches the C++ implementation.
"""
import math

import numpy as np


def main():
    print("normalize(1,1):", 1 / math.sqrt(2))
    print("cos45:", math.cos(math.pi / 4))

    k = np.array([[1.0, 0.5], [0.5, 1.0]]) / 2
    lam = np.linalg.eigvalsh(k)
    print("vendi two vectors cos .5:", math.exp(-sum(l * math.log(l) for l in lam if l > 0)))

    p = [0.75, 0.25]
    print("balance [3,1]:", -sum(x * math.log2(x) for x in p))

    # mean max similarity of (1,0),(0,1),(1,1)
    pts = [np.array(v, float) for v in [(1, 0), (0, 1), (1, 1)]]
    best = []
    for i, a in enumerate(pts):
        sims = [max(0.0, a @ b / np.linalg.norm(a) / np.linalg.norm(b)) for j, b in enumerate(pts) if j != i]
        best.append(max(sims))
    print("mean max sim:", sum(best) / len(best))

    print("frozen novelty ref (1,0), x (1,1):", 1 - math.cos(math.pi / 4))

    # valueOf hand example: target uniform over 2, counts [9,1], class-1 sample, orthogonal, relevant
    t, cur = 0.5, 1 / 10
    bal = max(0.0, t - cur) / t
    print("valueOf balance/total:", bal, 1 * bal + 1 * 1.0 + 1 * 1.0 - 1 * 0.0)

    for c, s in [(2, 1.0), (10, 1.2), (10, 1.5)]:
        w = [(i + 1) ** (-s) for i in range(c)]
        z = sum(w)
        q = [x / z for x in w]
        h = -sum(x * math.log(x) for x in q) / math.log(c)
        print(f"zipf C={c} s={s}: pmf={q} normalized entropy={h}")

    # Adaptive threshold step: eta * (ema - target)
    print("threshold step:", 0.05 * (0.2 - 0.1))


if __name__ == "__main__":
    main()
