"""Ready-made experiment configurations."""

PRESETS = {
    # the minimal direct-coupling experiment
    "default": """\
[coupling]
zeta_n = 0.01
zeta_w = -0.01
theta0 = -1.5707963267948966

[light]
kind = coherent
xi = 5

[run]
N = 100
trials = 2000
master_seed = 0
probe_n0 = 10
sweep_axis = N
sweep_values = 100, 1000, 10000
""",
    # one electron rotates the light by +/- pi/6: clouds are well separated
    "clouds-large-zeta": """\
[coupling]
zeta_n = 0.5235987755982988
zeta_w = -0.5235987755982988
theta0 = -1.5707963267948966

[light]
kind = coherent
xi = 4

[run]
N = 3
qfunc_N = 0, 1, 2, 3
q_points = 161
q_extent = 8
""",
    "banana-small-zeta": """\
[coupling]
zeta_n = 0.02
zeta_w = -0.02
theta0 = -1.5707963267948966

[light]
kind = coherent
xi = 4

[run]
N = 1600
qfunc_N = 0, 100, 400, 1600
q_points = 161
q_extent = 8
""",
    # GaAs-like wires, 10 nm and 12 nm wide, light between the two gaps
    "device": """\
[device]
narrow_width_nm = 10
wide_width_nm = 12
narrow_mass_ratio = 0.067
wide_mass_ratio = 0.067
narrow_intensity_per_nm2 = 2e-6
wide_intensity_per_nm2 = 2e-6
photon_energy_mev = 140
wavenumber_per_nm = 0.1
theta0 = -1.5707963267948966

[light]
kind = coherent
xi = 5

[run]
N = 100
trials = 500
""",
}
