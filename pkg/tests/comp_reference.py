"""A second, deliberately naive reading of the Comp_m recurrence.

f'_n and f_n are defined by mutual recursion exactly as written, with no
shared loop state, so that it can serve as an oracle for itypes.comp.
"""


def comp_literal(m, M, inputs):
    M = set(M)

    def f_prime(n):
        if n - 1 in M:
            return f(n - 1)
        return 0

    def f(n):
        return f_prime(n) + sum(len(set(F) & {n}) for F, _ in inputs)

    F = {n for n in range(m) if f(n) > 0 and n not in M}
    c = f_prime(m) + sum(c for _, c in inputs)
    return frozenset(F), c
