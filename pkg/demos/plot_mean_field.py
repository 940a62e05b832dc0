"""
Mean-field epidemic curves
==========================

The four compartment models integrated with fixed-step RK4. SIS settles at
the endemic level 1 - delta/beta; SIR burns out and leaves a removed pool.
"""

from p2pvirus import EpidemicParams, OdeState, integrate_ode

x0 = OdeState.from_infected(0.01)

sis = integrate_ode(x0, EpidemicParams(2.0, delta=1.0), "SIS", 50, 0.01)
print("SIS i(50) =", round(sis.i[-1], 6), "(endemic level 0.5)")

sir = integrate_ode(x0, EpidemicParams(2.0, delta=1.0, reinfection=False), "SIR", 50, 0.01)
print("SIR final removed fraction =", round(sir.r[-1], 4))

# A latent period delays the peak; halving vulnerability lowers the plateau.
seis = integrate_ode(x0, EpidemicParams(2.0, sigma=0.5, delta=1.0), "SEIS", 50, 0.01)
half = integrate_ode(x0, EpidemicParams(2.0, sigma=0.5, delta=1.0, vulnerability=0.75), "SEIS", 50, 0.01)
print("SEIS i(50) =", round(seis.i[-1], 4), " at vulnerability 0.75:", round(half.i[-1], 4))
for t in (5, 10, 20):
    print(f"t={t}: i={seis.at(t)[2]:.4f}")
