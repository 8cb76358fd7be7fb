#!/usr/bin/env python3
"""Generate canonical quadric models of X_Delta(N) from weight-2 cusp forms.

Developer tool, needs cypari2 (PARI/GP >= 2.13). The C++ library never calls
it; its output is committed under data/models/.

    gen_models.py OUTDIR N:g1,g2,... [N:g1,...]

Generators of Delta are given without -1, which is always added. Alongside
each model the script prints p + 1 - tr(T_p) and the F_{p^2} analogue for
the good primes, which tests use as an independent check on point counts.
"""
import sys

import cypari2

pari = cypari2.Pari()
pari.allocatemem(4 * 10**9, silent=True)

# Rows: a Q-basis of S_2(Gamma_Delta(N)), echelonised so that form i starts
# at a strictly larger power of q than form i-1, integral and saturated.
GP_FORMS = """
(N, D, prec) -> my(G = znstar(N, 1), res = List());
  foreach(chargalois(G), chi,
    if (#select(d -> chareval(G, chi, d) != 0, D), next);
    my(mf = mfinit([N, 2, [G, chi]], 1));
    if (!mfdim(mf), next);
    my(o = charorder(G, chi), P = polcyclo(max(o, 3), 't), deg = if (o <= 2, 1, poldegree(P)));
    foreach(mfbasis(mf), f,
      my(c = mfcoefs(f, prec));
      c = apply(a -> if (type(a) == "t_POLMOD", Mod(subst(lift(a), variable(lift(a)), 't), P), Mod(a, P)), c);
      for (j = 0, deg - 1,
        listput(res, apply(a -> if (o <= 2, trace(a) / poldegree(P), trace(Mod('t^j, P) * a)), c)))));
  my(M = matconcat(Vec(res)~));
  M = matimage(M~);
  M = matrixqz(M, -2);
  my(L = #M[,1]);
  M = vecextract(M, Str(L, "..1"), "..");
  M = mathnf(M);
  M = vecextract(M, Str(L, "..1"), "..");
  M~
"""

# p + 1 - sum_chi tr(T_p | S(chi)) and p^2 + 1 - sum_chi tr(T_p^2 - 2 p chi(p)).
GP_TRACES = """
(N, D, p) -> my(G = znstar(N, 1), t1 = 0, t2 = 0);
  foreach(chargalois(G), chi,
    if (#select(d -> chareval(G, chi, d) != 0, D), next);
    my(mf = mfinit([N, 2, [G, chi]], 1), n = mfdim(mf));
    if (!n, next);
    my(o = charorder(G, chi), P = polcyclo(max(o, 3), 't));
    my(T = mfheckemat(mf, p));
    T = apply(a -> if (type(a) == "t_POLMOD", Mod(subst(lift(a), variable(lift(a)), 't), P), Mod(a, P)), T);
    my(z = Mod('t, P)^(chareval(G, chi, p) * o), scale = if (o <= 2, poldegree(P), 1));
    if (o <= 2, z = Mod((-1)^(2 * chareval(G, chi, p)), P));
    t1 += trace(trace(T)) / scale;
    t2 += trace(trace(T^2) - 2 * p * n * z) / scale);
  [p + 1 - t1, p^2 + 1 - t2]
"""


def closure(n, gens):
    gens = [g % n for g in gens] + [n - 1]
    elems = {1}
    frontier = [1]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x * g % n
            if y not in elems:
                elems.add(y)
                frontier.append(y)
    return sorted(elems)


def index_of(n, size):
    psi = n
    for p in pari.factor(n)[0]:
        psi = psi * (int(p) + 1) // int(p)
    return psi * int(pari.eulerphi(n)) // size


def model(n, gens):
    delta = closure(n, gens)
    prec = index_of(n, len(delta)) // 3 + 20
    forms = pari(GP_FORMS)(n, delta, prec)
    g = int(pari.matsize(forms)[0])
    rows = [[int(forms[i, k]) for k in range(prec + 1)] for i in range(g)]
    monos = [(i, j) for i in range(g) for j in range(i, g)]
    prods = []
    for (i, j) in monos:
        p = [0] * (prec + 1)
        for a in range(prec + 1):
            if rows[i][a] == 0:
                continue
            for b in range(prec + 1 - a):
                p[a + b] += rows[i][a] * rows[j][b]
        prods.append(p)
    A = pari.matrix(prec + 1, len(monos), [prods[c][r] for r in range(prec + 1) for c in range(len(monos))])
    K = pari.matkerint(A)
    quads = []
    for c in range(int(pari.matsize(K)[1])):
        quads.append([(monos[r], int(K[r, c])) for r in range(len(monos)) if K[r, c] != 0])
    return delta, g, quads


def fmt_quadric(q):
    parts = []
    for k, ((i, j), c) in enumerate(q):
        mono = f"x{i}^2" if i == j else f"x{i}*x{j}"
        coef = f"{abs(c)}*{mono}" if abs(c) != 1 else mono
        if k == 0:
            parts.append(("-" if c < 0 else "") + coef)
        else:
            parts.append(("- " if c < 0 else "+ ") + coef)
    return " ".join(parts)


def main():
    outdir = sys.argv[1]
    for spec in sys.argv[2:]:
        n_str, gens_str = spec.split(':')
        n = int(n_str)
        gens = [int(x) for x in gens_str.split(',') if x]
        delta, g, quads = model(n, gens)
        half = [d for d in delta if d <= n // 2]
        label = f"{n}.{'.'.join(str(d) for d in half)}"
        expect = (g - 2) * (g - 3) // 2
        print(f"{label}: genus {g}, {len(quads)} quadrics (expected {expect})", file=sys.stderr)
        good = [p for p in (2, 3, 5, 7, 11, 13) if n % p != 0]
        name = f"{outdir}/x{n}_" + '_'.join(str(d) for d in half[1:]) + ".model"
        with open(name[:-len(".model")] + ".counts", 'w') as fh:
            fh.write("# p  #X(F_p)  #X(F_p^2)   from Hecke traces\n")
            for p in good:
                c1, c2 = pari(GP_TRACES)(n, delta, p)
                fh.write(f"{p} {c1} {c2}\n")
        with open(name, 'w') as fh:
            fh.write(f"label: {label}\n")
            fh.write(f"N: {n}\n")
            fh.write(f"delta: {' '.join(str(x) for x in [-1] + gens)}\n")
            fh.write(f"genus: {g}\n")
            fh.write(f"good_primes: {' '.join(map(str, good))}\n")
            for q in quads:
                fh.write(fmt_quadric(q) + "\n")


if __name__ == '__main__':
    main()
