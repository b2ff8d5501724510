"""Donor wave-function size in Si and Ge.

The anisotropic effective mass squeezes the bound state along the heavy axis.
The variational result is compared against the tabulated radii and against the
closed-form in-plane estimate, which is the heavy-mass limit of the same ansatz
and therefore overshoots when m_z/m_xy is finite.
"""
from sige_srt import donor, materials

TABLE = {"Si": (25.0, 15.0), "Ge": (64.0, 24.0)}

for name, (t_xy, t_z) in TABLE.items():
    m = materials.endpoint_params(name)
    var = donor.variational_solve(m.epsilon, m.m_xy, m.m_z)
    cf = donor.closed_form_params(m.epsilon, m.m_xy, m.m_z)
    print(f"{name}: eps={m.epsilon}, m_xy={m.m_xy}, m_z={m.m_z}")
    print(f"  variational  a_xy={var.a_xy:6.2f} A  a_z={var.a_z:6.2f} A  E_b={var.binding_energy:6.2f} meV")
    print(f"  closed form  a_xy={cf.a_xy:6.2f} A  a_z={cf.a_z:6.2f} A")
    print(f"  table        a_xy={t_xy:6.2f} A  a_z={t_z:6.2f} A")

# pulling the electron sideways toward a gate: binding weakens, orbit spreads
ge = materials.endpoint_params("Ge")
ge_donor = donor.variational_solve(ge.epsilon, ge.m_xy, ge.m_z)
print("\nGe donor pulled a distance d out of plane (2-D trial orbit)")
for d in (0.0, 20.0, 50.0, 100.0, 200.0):
    dd = donor.DisplacedDonor(d=d, donor=ge_donor, epsilon=ge.epsilon, m_xy=ge.m_xy)
    p = donor.displaced_donor_params(dd)
    print(f"  d={d:5.0f} A   a={p.a_xy:6.1f} A   E_b={p.binding_energy:6.2f} meV")
