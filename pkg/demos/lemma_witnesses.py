"""Witnesses for the prime-power lemmas used to rule out sparse solutions."""
import sympy

from multsq import primepowers as pp

print("AP lemma witnesses:")
for k in (5, 6, 7):
    rep = pp.verify_ap_lemma(k)
    print(f"  k={k}: passed={rep.passed}, witnesses={[w['a'] for w in rep.witnesses]}")

print("\nsmallest prime not dividing k, against 4k+1:")
for k in (2, 6, 30, 210, 2310):
    print(f"  k={k}: {pp.smallest_nondividing_prime(k)} <= {4 * k + 1}")

inst = pp.applicable_gap_instances(1 << 20)
print(f"\n{len(inst)} gap-lemma instances below 2^20:")
for name, params in inst[:8]:
    print(f"  {name}{params}: {'pass' if pp.verify_gap_lemma(name, *params).passed else 'FAIL'}")

print("\nMersenne witness pairs:")
for q in sympy.primerange(2, 40):
    print(f"  q={q}: {pp.mersenne_witness_search(q)}")
