"""Physical constants, characteristic scales and dimensionless groups.

Everything downstream (kernel matrices, transport coefficients, Poisson
coupling, collision rates) reads its numbers from a single ScalingContext
built here, and every derived value is logged line by line to a
human-readable audit record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ConfigurationError, DomainError

# SI / conversion constants
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m
ELECTRON_MASS = 9.1093837015e-31        # kg
EV_TO_JOULE = 1.60218e-19               # J per eV (also the elementary charge in C)

# Silicon material data used for the default electron-phonon coupling
# strengths.  Deformation-potential values are the usual ones for the
# optical (intervalley-like, single 63 meV mode) and elastic acoustic
# channels of the linearized collision operator.
SILICON_MASS_DENSITY = 2330.0           # kg/m^3
SILICON_SOUND_SPEED = 9040.0            # m/s
SILICON_OPTICAL_DK = 11.4e10            # eV/m, optical deformation field DtK
SILICON_ACOUSTIC_DP = 9.0               # eV, acoustic deformation potential


def silicon_couplings(phonon_energy_ev: float, hbar: float,
                      k_boltzmann: float, lattice_temperature: float) -> tuple[float, float]:
    """Optical and acoustic scattering strengths K, K0 in J m^3 / s.

    K   = (DtK)^2 / (8 pi^2 rho_m omega_p)       (non-polar optical mode)
    K0  = Xi_d^2 K_B T_L / (4 pi^2 hbar rho_m u_l^2)   (elastic acoustic,
          equipartition limit)

    Both normalizations are chosen so that K_l * delta(eps' - eps + l hw)
    integrated over k'-space reproduces the textbook golden-rule rates for
    a parabolic band.
    """
    hw_joule = phonon_energy_ev * EV_TO_JOULE
    omega_p = hw_joule / hbar
    dtk_joule = SILICON_OPTICAL_DK * EV_TO_JOULE
    k_opt = dtk_joule**2 / (8.0 * math.pi**2 * SILICON_MASS_DENSITY * omega_p)
    xi_joule = SILICON_ACOUSTIC_DP * EV_TO_JOULE
    k_ac = (xi_joule**2 * k_boltzmann * lattice_temperature
            / (4.0 * math.pi**2 * hbar * SILICON_MASS_DENSITY * SILICON_SOUND_SPEED**2))
    return k_opt, k_ac


@dataclass(frozen=True)
class PhysicalConstants:
    """Raw physical inputs, SI units unless noted.  All strictly positive."""

    hbar: float = 1.0546e-34                 # J s
    k_boltzmann: float = 1.3805e-23          # J/K
    electron_charge: float = EV_TO_JOULE     # C
    effective_mass: float = 0.32 * ELECTRON_MASS   # kg, conduction band
    lattice_temperature: float = 300.0       # K
    phonon_energy_ev: float = 0.063          # eV, optical phonon
    relative_permittivity: float = 11.7      # silicon
    optical_coupling: float | None = None    # K  [J m^3/s]; None -> silicon default
    acoustic_coupling: float | None = None   # K0 [J m^3/s]; None -> silicon default

    def validated(self) -> "PhysicalConstants":
        for name, value in vars(self).items():
            if value is None and name in ("optical_coupling", "acoustic_coupling"):
                continue
            if not (isinstance(value, (int, float)) and value > 0.0 and math.isfinite(value)):
                raise ConfigurationError(f"physical constant {name!r} must be finite and > 0, got {value!r}")
        k_opt, k_ac = self.optical_coupling, self.acoustic_coupling
        if k_opt is None or k_ac is None:
            k_def, k0_def = silicon_couplings(self.phonon_energy_ev, self.hbar,
                                              self.k_boltzmann, self.lattice_temperature)
            k_opt = k_def if k_opt is None else k_opt
            k_ac = k0_def if k_ac is None else k_ac
        return replace(self, optical_coupling=k_opt, acoustic_coupling=k_ac)


@dataclass(frozen=True)
class ScalingOverrides:
    """Optional knobs for build_scaling.

    beta_sig_figs rounds 1/(K_B T_L) to that many significant digits before
    forming the dimensionless groups.  The published constant chain quotes
    beta to 8 digits and propagates the quoted value, so the default
    reproduces the reference numbers bit-for-bit; set to None for the
    unrounded chain (differs in the 8th decimal of A).
    """

    n_divisor: float = 30.0          # N, random-interval divisor
    r_max: float = 36.0              # dimensionless energy cutoff
    length_scale: float = 1.0e-6     # m   (1 micron device)
    time_scale: float = 1.0e-12      # s   (picosecond)
    voltage_scale: float = 1.0       # V   (potentials kept in volts)
    beta_sig_figs: int | None = 8


def _round_sig(x: float, sig: int) -> float:
    return float(f"{x:.{sig - 1}e}")


@dataclass(frozen=True)
class ScalingContext:
    """All dimensionless groups in one audited, immutable place."""

    constants: PhysicalConstants
    beta: float          # 1/J
    A: float             # beta * hbar omega_p
    N: float             # random-interval divisor
    B: float             # A / N
    n_q: float           # phonon occupation at A
    c_v: float           # x-advection coefficient (a1 = c_v sqrt(r) mu)
    c_E: float           # force coefficient (a4, a5)
    c_P: float           # Poisson coupling
    k_opt_hat: float     # dimensionless optical rate constant (2pi folded in)
    k_ac_hat: float      # dimensionless acoustic rate constant
    length_scale: float  # m
    time_scale: float    # s
    voltage_scale: float # V
    k_scale: float       # 1/m
    r_max: float         # dimensionless energy cutoff
    audit: tuple[str, ...] = field(default=(), repr=False, compare=False)

    @property
    def doping_scale(self) -> float:
        """k_scale^3, the density that maps to dimensionless 1."""
        return self.k_scale**3

    def audit_text(self) -> str:
        return "\n".join(self.audit) + "\n"


def phonon_occupation(a_effective: float) -> float:
    """Bose factor 1/(exp(a) - 1) for a dimensionless phonon energy a > 0."""
    if not a_effective > 0.0:
        raise DomainError(f"phonon occupation needs a positive argument, got {a_effective!r}")
    return 1.0 / math.expm1(a_effective)


def build_scaling(constants: PhysicalConstants | None = None,
                  overrides: ScalingOverrides | None = None) -> ScalingContext:
    """Derive every dimensionless group from raw constants.

    Deterministic and pure: identical inputs give bit-identical outputs.
    The derivation of each group is appended to the audit record carried by
    the returned context (see ScalingContext.audit_text / emit_audit).
    """
    consts = (constants or PhysicalConstants()).validated()
    ovr = overrides or ScalingOverrides()
    if not ovr.n_divisor > 1.0:
        raise ConfigurationError(
            f"N must exceed 1 so the randomized inverse temperature stays positive, got {ovr.n_divisor}")
    for name in ("r_max", "length_scale", "time_scale", "voltage_scale"):
        if not getattr(ovr, name) > 0.0:
            raise ConfigurationError(f"override {name!r} must be > 0")

    lines = ["# scaling audit", "# inputs"]
    for name, value in vars(consts).items():
        lines.append(f"{name} = {value!r}")
    lines.append(f"n_divisor = {ovr.n_divisor!r}")

    kbt = consts.k_boltzmann * consts.lattice_temperature
    lines.append(f"K_B*T_L = {kbt!r} J = {kbt / consts.electron_charge!r} eV")

    beta = 1.0 / kbt
    if ovr.beta_sig_figs is not None:
        beta = _round_sig(beta, ovr.beta_sig_figs)
        lines.append(f"beta = 1/(K_B*T_L) rounded to {ovr.beta_sig_figs} significant digits = {beta!r} 1/J"
                     " (quoted-constant chain)")
    else:
        lines.append(f"beta = 1/(K_B*T_L) = {beta!r} 1/J (unrounded)")

    hw_joule = consts.phonon_energy_ev * consts.electron_charge
    lines.append(f"hbar*omega_p = {consts.phonon_energy_ev} eV = {hw_joule!r} J")

    a_group = beta * hw_joule
    b_group = a_group / ovr.n_divisor
    n_q = phonon_occupation(a_group)
    lines.append(f"A = beta*hbar*omega_p = {a_group!r}")
    lines.append(f"B = A/N = {b_group!r}")
    lines.append(f"n_q = 1/(exp(A)-1) = {n_q!r}")

    if not ovr.r_max > a_group:
        raise ConfigurationError(
            f"r_max = {ovr.r_max} must exceed A = {a_group} (one phonon shell must fit)")

    k_scale = math.sqrt(2.0 * consts.effective_mass * kbt) / consts.hbar
    lines.append(f"k_scale = sqrt(2 m* K_B T_L)/hbar = {k_scale!r} 1/m")

    # a1 = c_v sqrt(r) mu with the group velocity hbar k / m*
    c_v = ovr.time_scale * consts.hbar * k_scale / (ovr.length_scale * consts.effective_mass)
    lines.append(f"c_v = t* hbar k_scale / (l* m*) = {c_v!r}"
                 f"  (thermal speed {consts.hbar * k_scale / consts.effective_mass!r} m/s)")

    # dk/dt = -(q/hbar) E with E in voltage_scale/length_scale units
    e_field_scale = ovr.voltage_scale / ovr.length_scale
    c_e = consts.electron_charge * ovr.time_scale * e_field_scale / (consts.hbar * k_scale)
    lines.append(f"c_E = q t* (V*/l*) / (hbar k_scale) = {c_e!r}  (E measured in {e_field_scale!r} V/m)")

    c_p = consts.electron_charge * k_scale**3 * ovr.length_scale**2 / (
        VACUUM_PERMITTIVITY * ovr.voltage_scale)
    lines.append(f"c_P = q k_scale^3 l*^2 / (eps0 V*) = {c_p!r}")

    # Collision rate constants: K_l t* k_scale^3 / (K_B T_L), the 1/K_B T_L
    # from the energy delta and k_scale^3 from dk'; the azimuthal 2pi of the
    # partner integral is folded in here once.
    rate_norm = 2.0 * math.pi * ovr.time_scale * k_scale**3 / kbt
    k_opt_hat = consts.optical_coupling * rate_norm
    k_ac_hat = consts.acoustic_coupling * rate_norm
    lines.append(f"K_hat  = 2pi K  t* k_scale^3 / (K_B T_L) = {k_opt_hat!r}")
    lines.append(f"K0_hat = 2pi K0 t* k_scale^3 / (K_B T_L) = {k_ac_hat!r}")

    return ScalingContext(
        constants=consts, beta=beta, A=a_group, N=ovr.n_divisor, B=b_group,
        n_q=n_q, c_v=c_v, c_E=c_e, c_P=c_p, k_opt_hat=k_opt_hat,
        k_ac_hat=k_ac_hat, length_scale=ovr.length_scale,
        time_scale=ovr.time_scale, voltage_scale=ovr.voltage_scale,
        k_scale=k_scale, r_max=ovr.r_max, audit=tuple(lines))


def emit_audit(ctx: ScalingContext, path) -> None:
    """Write the derivation log to scaling_audit.txt (or any path)."""
    with open(path, "w") as fh:
        fh.write(ctx.audit_text())
