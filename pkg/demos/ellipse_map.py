"""From a contour to its exterior conformal map, and back to the circle.

The ellipse x = 1.1 cos s, y = 0.9 sin s has exterior map inverse to the
Joukowski map z = rho (w + u / w).  The moments are computed by quadrature,
the map by differentiating F, and the boundary is then sent to |w| = 1.
"""

import numpy as np

from todamap.conformal import Contour, boundary_image, exterior_map, moments_from_contour
from todamap.series import build_f

a, b = 1.1, 0.9
contour = Contour.ellipse(a, b)
t = moments_from_contour(contour, 2, 256)
print(f"moments: t0 = {t.t0:.15f} (ab = {a * b}),  t1 = {t.t[0]:.1e},  t2 = {t.t[1].real:.15f}")

rho, u = (a + b) / 2, (a - b) / (a + b)
# inverse Joukowski by reversion: w = z/rho - u rho/z - u^2 rho^3/z^3 - 2 u^3 rho^5/z^5 - ...
exact = {0: 0, 1: -u * rho, 2: 0, 3: -(u**2) * rho**3, 4: 0, 5: -2 * u**3 * rho**5}

J = 6
for K in (4, 6, 8):
    # the map needs d0 dk F for k up to J, beyond the two moments in play
    f = build_f(2, K, halo_index=J, halo_degree=1)
    w = exterior_map(f, t, J)
    err = max(abs(w.tail[j] - exact[j]) for j in range(J))
    mod = np.abs(boundary_image(w, contour, 512))
    print(
        f"K={K}: 1/r = {w.lead:.12f} (exact {1 / rho:.12f}), max coefficient error {err:.1e}, "
        f"|w| on boundary in [{mod.min():.6f}, {mod.max():.6f}]"
    )

print("\nLaurent tail p_j z^-j (K=8):")
for j, p in enumerate(w.tail):
    print(f"  p_{j} = {p.real:+.10f}{p.imag:+.1e}j   reversion: {exact[j]:+.10f}")
print("\nthe residual |w| - 1 is set by cutting the Laurent series at J = 6, not by K")
