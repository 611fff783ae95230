"""Tour of the finite-field layer: towers, traces, norms, discrete logs,
and the complex-valued characters built on top of them."""

import numpy as np

from sheafsums import AdditiveCharacter, MultiplicativeCharacter, make_extension, make_prime_field

F7 = make_prime_field(7)
print(f"prime field {F7}, canonical generator {F7.generator()}")

K = make_extension(F7, 2, seed=0)
print(f"\nextension {K}")
print(f"  q = {K.q}, modulus coefficients (ascending) = {K.modulus}")
print(f"  multiplicative generator g = {K.generator.coeffs}")

g = K.generator
print("\nfirst powers of g with trace and norm down to F_7:")
acc = K.one()
for j in range(1, 6):
    acc = acc * g
    print(f"  g^{j} = {acc.coeffs}   Tr = {acc.trace()}   N = {acc.norm()}")

x = g ** 29
print(f"\ndiscrete log recovers exponents: dlog(g^29) = {K.dlog(x)}")

psi = AdditiveCharacter(K, 1)
total = sum(psi(e) for e in K.elements())
print(f"\nadditive character orthogonality: |sum psi| = {abs(total):.2e} over {K.q} elements")

chi = MultiplicativeCharacter(K, (K.q - 1) // 2)
print(f"quadratic character: order = {chi.order}")
gauss = sum(psi(e) * chi(e) for e in K.elements())
print(f"Gauss sum modulus: |G| = {abs(gauss):.6f}, sqrt(q) = {np.sqrt(K.q):.6f}")
