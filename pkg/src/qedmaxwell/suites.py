"""Verification suites behind ``qedmaxwell verify``.

Each suite appends checks to a :class:`VerificationReport` and may return
tables for export. Config lengths, wavenumbers and times are in units of
``1/k0``, ``k0`` and ``1/(c k0)``.
"""

from __future__ import annotations

import math

import numpy as np

from . import evolve as ev
from . import fock
from . import greens as gr
from . import modes as md
from .config import RunConfig
from .report import VerificationReport, fmt
from .units import PhysicalParams, cutoff_wavenumber, group_velocity, minimal_length, omega

SUITES = ("modes", "greens", "fock", "evolve")


class Scales:
    def __init__(self, params: PhysicalParams):
        self.k = cutoff_wavenumber(params)
        self.length = minimal_length(params)
        self.time = self.length / params.c


def report_header(cfg: RunConfig, params: PhysicalParams) -> dict:
    return {
        "units": params.unit_system.value,
        "alpha": fmt(params.alpha),
        "k0": fmt(cutoff_wavenumber(params)),
        "minimal_length": fmt(minimal_length(params)),
        "c": fmt(params.c),
        "hbar": fmt(params.hbar),
        "seed": cfg.run.seed,
        "tolerance_scale": fmt(cfg.verify.tolerance_scale),
        "quadratures_dimensionless": fock.CONVENTIONS["dimensionless"],
        "quadratures_dimensional": fock.CONVENTIONS["dimensional"],
        "gauge": "A0 = 0 for transverse modes; E = -(1/c) dA/dt; B = curl A",
        "wave_operator": "box = (1/c^2) d_t^2 - laplacian; A = -xi/k0^2 on the corrected shell",
        "energy_reference": "Fock energies relative to the vacuum",
        "note_group_velocity": "v_g = c k / sqrt(k^2 - k0^2) exceeds c for every k > k0",
        "note_massless_branch": "box A = 0 with xi = 0 is not evolved",
        "note_i_alpha": "I_abs_vs_closed_form compares with 4 pi w/(k c k0^2); "
                        "the damped radial integral converges to 4 pi/k0^2",
    }


def modes_suite(cfg: RunConfig, params: PhysicalParams, report: VerificationReport) -> dict:
    sc = Scales(params)
    mc = cfg.modes
    grid = md.GridSpec(mc.box_length * sc.length, mc.points, 1)
    mode_set = md.build_mode_set(grid, mc.k_max * sc.k, params)
    s = "modes"
    report.add_bound(s, "mode_count_shortfall_below_16", max(0, 16 - len(mode_set)), 0.0,
                     note=f"{len(mode_set)} propagating modes")

    fields = [md.mode_field(m, grid, params) for m in mode_set]
    conj = [f.conj() for f in fields]
    c_k = np.array(mode_set.normalization_constant)
    gram = np.array([[md.kg_inner_product(a, b) for b in fields] for a in fields])
    cgram = np.array([[md.kg_inner_product(a, b) for b in conj] for a in fields])
    for i, m in enumerate(mode_set):
        report.add(s, f"norm_C_k n={m.n} s={m.s}", gram[i, i], c_k[i], 1e-10, relative=True)
    off = np.abs(gram - np.diag(np.diag(gram))) / np.sqrt(np.outer(c_k, c_k))
    report.add_bound(s, "orthogonality_max_offdiag_over_C_k", off.max(), 1e-10)
    report.add_bound(s, "conjugate_overlap_max_over_C_k", (np.abs(cgram) / c_k[:, None]).max(), 1e-10)

    rng = np.random.default_rng(cfg.run.seed)
    t = 0.37 * sc.time
    cfg_rand = md.random_configuration(mode_set, rng, time=t)
    a_field = md.synthesize_field(cfg_rand, grid, params)
    back = md.project_configuration(a_field, mode_set, params)
    err = max(abs(back.coefficients[m] - cfg_rand.coefficients[m]) for m in mode_set)
    report.add_bound(s, "round_trip_max_coefficient_error", err, 1e-10)

    pos = md.synthesize_field(cfg_rand, grid, params, include_conjugate=False)
    cross = max(abs(md.kg_inner_product(md.mode_field(m, grid, params, t, conjugate=True), pos))
                / mode_set.normalization_constant[i] for i, m in enumerate(mode_set))
    report.add_bound(s, "conjugate_projection_on_positive_field", cross, 1e-10)

    l2 = np.sum(np.abs(pos.values) ** 2) * grid.cell_volume
    expected = sum((amp * abs(cfg_rand.coefficients[m])) ** 2 for m, amp in zip(mode_set, mode_set.amplitude)) * grid.volume
    report.add(s, "parseval_positive_frequency", l2, expected, 1e-10, relative=True)

    cfg2 = md.random_configuration(mode_set, rng, time=t)
    lhs = md.synthesize_field(cfg_rand.combine(cfg2, 0.3, -1.7), grid, params).values
    rhs = 0.3 * a_field.values - 1.7 * md.synthesize_field(cfg2, grid, params).values
    report.add_bound(s, "linearity_max_rel_error", np.abs(lhs - rhs).max() / np.abs(rhs).max(), 1e-12)

    # single mode along +x, polarization y
    probe = next(m for m in mode_set if m.n[0] > 0 and m.s == 1)
    single = md.FieldConfiguration(mode_set, {probe: 1.0}, t)
    env = 2 * np.linalg.norm(md.synthesize_field(single, grid, params, include_conjugate=False).values, axis=0)
    amp = md.mode_amplitude(probe, params)
    report.add_bound(s, "single_mode_envelope_rel_spread", np.abs(env / (2 * amp) - 1).max(), 1e-12)
    e_f, b_f = md.electric_magnetic(single, grid, params)
    w = omega(probe.kmag, params).omega.real
    ratio = np.abs(b_f).max() / np.abs(e_f).max()
    report.add(s, "single_mode_B_over_E", ratio, probe.kmag * params.c / w, 1e-10, relative=True,
               note=f"k/k0 = {probe.kmag / sc.k:.6g}; standard Maxwell gives 1")
    report.add_bound(s, "single_mode_longitudinal_E_B",
                     max(np.abs(e_f[0]).max() / np.abs(e_f).max(), np.abs(b_f[0]).max() / np.abs(b_f).max()), 1e-14)

    g3 = md.GridSpec(mc.transverse_box_length * sc.length, mc.transverse_points, 3)
    ms3 = md.build_mode_set(g3, mc.transverse_k_max * sc.k, params)
    cfg3 = md.random_configuration(ms3, rng, time=t)
    e3, b3 = md.electric_magnetic(cfg3, g3, params)
    div_e = np.abs(md.divergence(e3, g3)).max() / (np.abs(e3).max() * mc.transverse_k_max * sc.k)
    div_b = np.abs(md.divergence(b3, g3)).max() / (np.abs(b3).max() * mc.transverse_k_max * sc.k)
    report.add_bound(s, "transversality_div_E_3d", div_e, 1e-12, note=f"{len(ms3)} modes")
    report.add_bound(s, "transversality_div_B_3d", div_b, 1e-12)

    basis = md.build_wavepacket_basis(mode_set)
    report.add_bound(s, "packet_seed_gram_condition", basis.seed_condition, 1e12)
    packets = [basis.packet_field(j, params) for j in range(len(basis))]
    pg = np.array([[md.kg_inner_product(a, b) for b in packets] for a in packets])
    pc = np.array([[md.kg_inner_product(a.conj(), b) for b in packets] for a in packets])
    report.add_bound(s, "packet_gram_identity_max_dev", np.abs(pg - np.eye(len(packets))).max(), 1e-10)
    report.add_bound(s, "packet_conjugate_gram_max", np.abs(pc).max(), 1e-10)
    u = basis.transform
    report.add_bound(s, "packet_transform_unitarity", np.abs(u.conj().T @ u - np.eye(len(u))).max(), 1e-10)
    return {"mode_set": mode_set}


def greens_suite(cfg: RunConfig, params: PhysicalParams, report: VerificationReport) -> dict:
    sc = Scales(params)
    gc = cfg.greens
    s = "greens"
    rows = []
    ks = np.geomspace(gc.k_min, gc.k_max, gc.points + 2)[1:-1] * sc.k
    for k in ks:
        label = f"k/k0={k / sc.k:.6g}"
        quad = gr.RadialQuadratureSpec.for_wavenumber(k, params)
        est = gr.i_alpha_estimate(k, params, quad)
        mag = abs(est.value)
        closed = gr.i_alpha_closed(k, params)
        limit = abs(gr.i_alpha_limit(k, params))
        report.add(s, f"I_abs_vs_closed_form {label}", mag, closed, 5e-3, relative=True,
                   note=f"phase {math.atan2(est.value.imag, est.value.real):.6g}")
        report.add(s, f"I_abs_vs_regularized_limit {label}", mag, limit, 1e-5, relative=True)
        half = gr.i_alpha_estimate(k, params, quad.halved())
        report.add_bound(s, f"I_extrapolation_halving_change {label}",
                         abs(half.value - est.value) / mag, 1e-4)
        rows.append({
            "k_over_k0": k / sc.k, "abs_I_numeric": mag, "abs_I_closed": closed,
            "relative_error": abs(mag - closed) / closed, "abs_I_limit": limit,
            "phase": math.atan2(est.value.imag, est.value.real),
            "epsilons": " ".join(fmt(e) for e in est.epsilons),
        })

    k = ks[0]
    quad = gr.RadialQuadratureSpec.for_wavenumber(k, params)
    q = omega(k, params).omega / params.c
    e0, r0 = quad.ladder()[0]
    j1 = gr.damped_sine_transform(k, q, e0, r0, quad.nodes)
    j2 = gr.damped_sine_transform(k, q, e0, 2 * r0, quad.nodes)
    report.add_bound(s, "damped_integral_rmax_doubling", abs(j2 - j1) / abs(j1), 1e-8)
    report.add(s, "damped_integral_vs_closed_form", 4 * math.pi / k * j2, gr.damped_i_alpha(k, params, e0),
               1e-8, relative=True)

    kc = gc.convolution_k * sc.k
    qc = omega(kc, params).omega.real / params.c
    x = np.array([0.3, 0.1, 0.2]) * sc.length
    t = 0.5 * sc.time

    def plane_wave(pts, times):
        return np.exp(-1j * (qc * params.c * times - kc * pts[2]))

    conv = gr.retarded_convolution(plane_wave, x, t, params, gr.RadialQuadratureSpec.for_wavenumber(kc, params),
                                   bandwidth=kc + qc)
    spectral = -plane_wave(x.reshape(3, 1), np.array([t]))[0] / sc.k ** 2
    report.add(s, "retarded_convolution_vs_spectral", conv.value, spectral, 1e-6, relative=True,
               note=f"k/k0 = {gc.convolution_k:.6g}")

    mc = cfg.modes
    grid = md.GridSpec(mc.box_length * sc.length, mc.points, 1)
    mode_set = md.build_mode_set(grid, mc.k_max * sc.k, params)
    rng = np.random.default_rng(cfg.run.seed + 1)
    xi = md.random_configuration(mode_set, rng, time=0.21 * sc.time, target=md.Target.XI)
    a_cfg = gr.solve_wave_with_source(xi, grid, params)
    box_a = gr.apply_wave_operator(a_cfg, grid, params)
    xi_field = md.synthesize_field(xi, grid, params).values
    report.add_bound(s, "box_A_plus_xi_max_rel", np.abs(box_a + xi_field).max() / np.abs(xi_field).max(), 1e-10)
    ratio_err = max(abs(a_cfg.coefficients[m] / xi.coefficients[m] * sc.k ** 2 + 1) for m in mode_set)
    report.add_bound(s, "A_over_xi_ratio_vs_minus_inverse_k0_sq", ratio_err, 1e-14)
    return {"greens_rows": rows}


def fock_suite(cfg: RunConfig, params: PhysicalParams, report: VerificationReport) -> dict:
    fc = cfg.fock
    n = fc.dimension
    s = "fock"
    b, bd = fock.truncated_ladder(n)
    defect = fock.commutator(b, bd).entries - np.eye(n)
    edge = defect[n - 1, n - 1]
    defect[n - 1, n - 1] = 0
    report.add_bound(s, "commutator_defect_off_edge_max", np.abs(defect).max(), 1e-12)
    report.add(s, "commutator_edge_entry", edge + 1, 1 - n, 1e-12)

    x, p = fock.quadratures(None, n)
    report.add_bound(s, "quadratures_hermitian",
                     max(np.abs(x.entries - x.entries.conj().T).max(), np.abs(p.entries - p.entries.conj().T).max()),
                     1e-14)
    vac = fock.vacuum(n)
    report.add(s, "vacuum_var_X", fock.variance(x, vac), 0.5, 1e-12)
    report.add(s, "vacuum_var_P", fock.variance(p, vac), 0.5, 1e-12)

    coh = fock.coherent_state(fc.coherent_alpha, None, n)
    report.add(s, "coherent_mean_n", fock.expectation(fock.number_operator(n), coh), abs(fc.coherent_alpha) ** 2, 1e-8)
    report.add(s, "coherent_mean_b", fock.expectation(b, coh), fc.coherent_alpha, 1e-8)
    disp = fock.displacement(fc.coherent_alpha, n).entries[:, 0]
    report.add_bound(s, "coherent_displacement_vs_closed_form", np.abs(disp - coh.amplitudes).max(), 1e-10)

    sq = fock.squeezed_state(fc.squeeze_r, fc.squeeze_phi, None, n)
    vx, vp = fock.variance(x, sq), fock.variance(p, sq)
    if fc.squeeze_phi == 0:
        report.add(s, "squeezed_var_X", vx, math.exp(-2 * fc.squeeze_r) / 2, 1e-6)
        report.add(s, "squeezed_var_P", vp, math.exp(2 * fc.squeeze_r) / 2, 1e-6)
    report.add(s, "squeezed_uncertainty_product", vx * vp, 0.25, 1e-6)
    floor = min(fock.variance(x, st) * fock.variance(p, st) for st in (vac, coh, sq))
    report.add_bound(s, "uncertainty_floor_shortfall", max(0.0, 0.25 - floor), 1e-9)

    sc = Scales(params)
    probe = md.make_mode((1,), 1, md.GridSpec(2 * math.pi / (math.sqrt(2) * sc.k), 4, 1))
    xd, pd = fock.quadratures(probe, n, params, "dimensional")
    comm = fock.commutator(xd, pd).entries[: n - 1, : n - 1]
    report.add_bound(s, "dimensional_XP_commutator_minus_i_hbar",
                     np.abs(comm - 1j * params.hbar * np.eye(n - 1)).max() / params.hbar, 1e-12)
    w = omega(probe.kmag, params).omega.real
    xs, _ = fock.quadratures(probe, n, params, "dimensional", frequency=params.c * probe.kmag)
    report.add(s, "dimensional_var_X_corrected_over_standard_at_sqrt2_k0",
               fock.variance(xd, vac) / fock.variance(xs, vac), params.c * probe.kmag / w, 1e-12, relative=True)
    for kk in np.linspace(1.2, 4.0, 5):
        box = 2 * math.pi / (kk * sc.k)
        mode = md.make_mode((1,), 1, md.GridSpec(box, 4, 1))
        xk, _ = fock.quadratures(mode, n, params, "dimensional")
        wk = omega(mode.kmag, params).omega.real
        report.add(s, f"dimensional_var_X_times_2w_over_hbar k/k0={kk:.6g}",
                   fock.variance(xk, vac) * 2 * wk / params.hbar, 1.0, 1e-8, relative=True)
    return {"coherent": coh, "squeezed": sq}


def evolve_suite(cfg: RunConfig, params: PhysicalParams, report: VerificationReport) -> dict:
    sc = Scales(params)
    ec, pc = cfg.evolve, cfg.packet
    s = "evolve"
    grid = md.GridSpec(ec.box_length * sc.length, ec.points, 1)
    times = np.linspace(0.0, ec.t_final, ec.snapshots) * sc.time

    def run(k_c, model):
        spec = ev.PacketSpec(k_c * sc.k, pc.width * sc.length, pc.x0 * sc.length, pc.amplitude)
        init = ev.init_packet(spec, grid, params, model)
        return ev.trajectory(init, times, params)

    corrected = {}
    for k_c in sorted({pc.k_center, 4.0}):
        traj = run(k_c, ev.Model.CORRECTED)
        corrected[k_c] = traj
        v = ev.measure_group_velocity(traj, params)
        report.add(s, f"group_velocity_corrected k_c/k0={k_c:.6g}", v, group_velocity(k_c * sc.k, params),
                   1e-2, relative=True)
    baseline = []
    for k_c in (2.0, 3.0, 4.0):
        v = ev.measure_group_velocity(run(k_c, ev.Model.STANDARD), params)
        baseline.append(v)
        report.add(s, f"group_velocity_standard k_c/k0={k_c:.6g}", v, params.c, 1e-2, relative=True)
    report.add_bound(s, "standard_velocity_spread_over_c", (max(baseline) - min(baseline)) / params.c, 1e-2)

    traj = corrected[pc.k_center]
    init = traj[0]
    analytic = math.sqrt(2 * math.sqrt(math.pi) * pc.width * sc.length) * abs(pc.amplitude)
    report.add(s, "initial_norm_vs_gaussian", ev.l2_norm(init), analytic, 1e-2, relative=True)
    report.add_bound(s, "reality_max_imag_residue", max(ev.imaginary_residue(x) for x in traj), 1e-10)

    e0 = ev.spectral_energy(init, params)
    state = init
    dt = ec.t_final * sc.time / 1000
    for _ in range(1000):
        state = ev.step(state, dt, params)
    report.add(s, "energy_drift_1000_steps", ev.spectral_energy(state, params), e0, 1e-12, relative=True)
    direct = ev.step(init, 1000 * dt, params)
    report.add_bound(s, "stepping_vs_direct_propagation",
                     np.abs(state.plus - direct.plus).max() / np.abs(init.plus).max(), 1e-10)

    w_grid = ev.frequencies(grid, params, ev.Model.CORRECTED)
    n_axis = np.fft.fftfreq(grid.points_per_axis, d=1.0 / grid.points_per_axis).astype(int)
    allowed = np.flatnonzero(ev.allowed_mask(grid, params, ev.Model.CORRECTED) & (n_axis > 0))
    t_end = times[-1]
    worst = 0.0
    for idx in allowed[:: max(1, allowed.size // 16)]:
        one = ev.single_mode_state(int(n_axis[idx]), grid, params)
        later = ev.step(one, t_end, params)
        measured = np.angle(later.plus[idx] / one.plus[idx])
        expected = -w_grid[idx] * t_end
        diff = (measured - expected + math.pi) % (2 * math.pi) - math.pi
        worst = max(worst, abs(diff))
    report.add_bound(s, "dispersion_phase_fidelity_max_rad", worst, 1e-10)

    a_traj = ev.evolve_sourced_A(traj, grid, params)
    v_xi = ev.measure_group_velocity(traj, params)
    v_a = ev.measure_group_velocity(a_traj, params)
    report.add(s, "sourced_A_velocity_vs_xi", v_a, v_xi, 1e-3, relative=True)
    xi_cfg = ev.to_field_configuration(init, params)
    a_cfg = gr.solve_wave_with_source(md.FieldConfiguration(xi_cfg.mode_set, xi_cfg.coefficients, 0.0, md.Target.XI),
                                      grid, params)
    a_state = a_traj[0]
    worst = 0.0
    floor = 1e-12 * np.abs(a_state.plus).max()
    for mode, coeff in a_cfg.coefficients.items():
        idx = mode.n[0] % grid.points_per_axis
        if abs(a_state.plus[idx]) < floor:
            continue  # subnormal Gaussian tail
        from_state = a_state.plus[idx] / md.mode_amplitude(mode, params)
        worst = max(worst, abs(from_state - coeff) / max(abs(coeff), 1e-300))
    report.add_bound(s, "sourced_A_matches_solver_at_t0", worst, 1e-14)
    return {"trajectory": traj, "grid": grid}


RUNNERS = {
    "modes": modes_suite,
    "greens": greens_suite,
    "fock": fock_suite,
    "evolve": evolve_suite,
}


def run_suites(cfg: RunConfig, names, params: PhysicalParams | None = None) -> tuple[VerificationReport, dict]:
    params = params or cfg.params()
    report = VerificationReport(report_header(cfg, params), tolerance_scale=cfg.verify.tolerance_scale)
    tables = {}
    for name in names:
        tables[name] = RUNNERS[name](cfg, params, report)
    return report, tables
