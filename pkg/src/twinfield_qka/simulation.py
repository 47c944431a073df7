"""Monte Carlo pulse-level simulation of the three-party protocol.

Per pulse, the three parties draw independent phase bits and launch weak
coherent pulses toward the two measurement nodes.  Each node interferes
its two (calibrated, equal-intensity) inputs on a balanced beam splitter:
with ideal visibility the constructive port carries mean photon number
2*m and the destructive port is dark, where m is the per-arm arrival
intensity.  Threshold detectors click with probability

    p_click = 1 - (1 - p_bg) * exp(-m_port)

where p_bg folds the background yield and the dark-count probability into
a single per-gate probability (keeps p <= 1 for any input; at realistic
magnitudes it is indistinguishable from the additive form Y0 + 1 - e^-m).
Exactly one click maps to '+' or '-', zero or two clicks to '?'.

Randomness is drawn from per-block Philox streams keyed by
(seed, block_index) with a fixed block size, so a session is bit-for-bit
reproducible no matter how the pulse loop is chunked or parallelized.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import UsageError, ValidationError
from .keyrate import holevo_closed, transmittance_from_distance
from .linalg import binary_entropy

#: Pulses per random block.  Fixed: changing it changes every session stream.
BLOCK_SIZE = 1 << 20

OUTCOME_CODES = {"+": 1, "-": -1, "?": 0}


def announcements_to_codes(announcements) -> np.ndarray:
    """Normalize a sequence of '+', '-', '?' (or +1/-1/0 codes) to int8."""
    arr = np.asarray(announcements)
    if arr.dtype.kind in "US" or arr.dtype == object:
        try:
            return np.array([OUTCOME_CODES[str(a)] for a in arr], dtype=np.int8)
        except KeyError as exc:
            raise ValidationError(f"unknown announcement symbol {exc.args[0]!r}") from exc
    codes = arr.astype(np.int8)
    if not np.isin(codes, (-1, 0, 1)).all():
        raise ValidationError("announcement codes must be -1, 0 or +1")
    return codes


@dataclass(frozen=True)
class SessionConfig:
    """Everything needed to reproduce one simulated session exactly."""

    n_pulses: int
    mu_a: float = 0.2
    mu_b: float = 0.2
    mu_c: float = 0.2
    #: Fiber lengths (l_A, l_B, l_B', l_C) in km; node AB joins the first
    #: two arms, node BC the last two.
    arm_lengths: tuple = (0.0, 0.0, 0.0, 0.0)
    y0: float = 2.45e-6
    dark_count_prob: float = 1e-6
    repetition_rate: float = 1e9
    seed: int = 0
    ec_efficiency: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "arm_lengths", tuple(self.arm_lengths))
        if self.n_pulses < 1:
            raise ValidationError(f"n_pulses must be >= 1, got {self.n_pulses!r}")
        for name in ("mu_a", "mu_b", "mu_c"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if len(self.arm_lengths) != 4:
            raise ValidationError("arm_lengths must hold four lengths (l_A, l_B, l_B', l_C)")
        if any(l < 0 for l in self.arm_lengths):
            raise ValidationError("arm lengths must be >= 0")
        for name in ("y0", "dark_count_prob"):
            p = getattr(self, name)
            if not 0.0 <= p < 1.0:
                raise ValidationError(f"{name} must lie in [0, 1), got {p!r}")
        if self.repetition_rate <= 0:
            raise ValidationError("repetition_rate must be > 0")
        if self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")
        if self.ec_efficiency < 0:
            raise ValidationError("ec_efficiency must be >= 0")

    @classmethod
    def equal_arms(cls, n_pulses: int, mu: float, total_km: float, **kwargs) -> "SessionConfig":
        """Config with all sources at mu and the total fiber split evenly over 4 arms."""
        if total_km < 0:
            raise ValidationError(f"total_km must be >= 0, got {total_km!r}")
        arm = total_km / 4.0
        return cls(
            n_pulses=n_pulses,
            mu_a=mu,
            mu_b=mu,
            mu_c=mu,
            arm_lengths=(arm, arm, arm, arm),
            **kwargs,
        )


@dataclass(frozen=True)
class SessionResult:
    """Sifted material and rate figures for one session."""

    sifted_ab: tuple  # (alice_bits, bob_bits)
    sifted_bc: tuple  # (bob_bits, charlie_bits)
    conclusive_counts: dict  # {"AB": int, "BC": int}
    qber_ab: float
    qber_bc: float
    sifted_rate: float  # conclusive fraction of the bottleneck link
    chi: float  # Holevo deduction applied to the bottleneck link
    skr_per_pulse: float
    skr_bps: float


def calibrate_source_intensity(target_mu_at_node: float, arm_transmittance: float) -> float:
    """Source intensity needed so the pulse arrives at the node with target_mu."""
    if not 0.0 < arm_transmittance <= 1.0:
        raise ValidationError(
            f"arm transmittance must lie in (0, 1], got {arm_transmittance!r}"
        )
    if target_mu_at_node < 0:
        raise ValidationError("target intensity must be >= 0")
    return target_mu_at_node / arm_transmittance


def background_click_probability(y0: float, dark_count_prob: float) -> float:
    """Single per-gate background probability folding stray light and darks."""
    return 1.0 - (1.0 - y0) * (1.0 - dark_count_prob)


def interfere_and_detect(phase_left, phase_right, mu_at_node: float,
                         y0: float = 0.0, dark_count_prob: float = 0.0,
                         draws=(0.5, 0.5)) -> str:
    """One node measurement: returns '+', '-' or '?'.

    phase_left/phase_right are the phase bits (0/1, or '+'/'-') of the two
    arriving pulses, mu_at_node their common arrival intensity, and draws a
    pair of uniform [0,1) variates, one per detector.
    """
    if mu_at_node < 0:
        raise ValidationError("arrival intensity must be >= 0")
    equal = _phase_bit(phase_left) == _phase_bit(phase_right)
    p_bg = background_click_probability(y0, dark_count_prob)
    p_signal = 1.0 - (1.0 - p_bg) * math.exp(-2.0 * mu_at_node)
    u_plus, u_minus = draws
    click_plus = u_plus < (p_signal if equal else p_bg)
    click_minus = u_minus < (p_bg if equal else p_signal)
    if click_plus and not click_minus:
        return "+"
    if click_minus and not click_plus:
        return "-"
    return "?"


def _phase_bit(value) -> int:
    if value in (0, 1):
        return int(value)
    if value == "+":
        return 0
    if value == "-":
        return 1
    raise ValidationError(f"phase must be a bit (0/1) or '+'/'-', got {value!r}")


def _block_rng(seed: int, block_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block_index,))
    return np.random.Generator(np.random.Philox(ss))


def _announce_block(equal_mask, p_signal, p_bg, u_plus, u_minus) -> np.ndarray:
    """Vectorized node outcome codes (+1/-1/0) for one block of pulses."""
    click_plus = np.where(equal_mask, u_plus < p_signal, u_plus < p_bg)
    click_minus = np.where(equal_mask, u_minus < p_bg, u_minus < p_signal)
    ann = np.zeros(len(u_plus), dtype=np.int8)
    ann[click_plus & ~click_minus] = 1
    ann[click_minus & ~click_plus] = -1
    return ann


def run_session(config: SessionConfig) -> SessionResult:
    """Simulate a full session: sources, nodes, announcements, sifting, rates.

    The per-node arrival intensity is set by calibration: the party with
    the stronger arm attenuates down to its partner's arrival intensity
    (variable attenuators only remove light), so for link AB the common
    arrival is min(mu_a * t(l_A), mu_b * t(l_B)).

    The secret fraction applies the loss-only Holevo deduction evaluated
    at the session's effective per-link working point, plus an optional
    ec_efficiency * h(qber) error-correction leakage; the weaker link caps
    the group key.
    """
    t_a, t_b, t_bp, t_c = (transmittance_from_distance(l) for l in config.arm_lengths)
    m_ab = min(config.mu_a * t_a, config.mu_b * t_b)
    m_bc = min(config.mu_b * t_bp, config.mu_c * t_c)
    eta_ab = t_a * t_b
    eta_bc = t_bp * t_c

    p_bg = background_click_probability(config.y0, config.dark_count_prob)
    p_sig_ab = 1.0 - (1.0 - p_bg) * math.exp(-2.0 * m_ab)
    p_sig_bc = 1.0 - (1.0 - p_bg) * math.exp(-2.0 * m_bc)

    a_parts, b_ab_parts = [], []
    b_bc_parts, c_parts = [], []
    mismatch_ab = 0
    mismatch_bc = 0

    n = config.n_pulses
    n_blocks = (n + BLOCK_SIZE - 1) // BLOCK_SIZE
    for bi in range(n_blocks):
        cnt = min(n - bi * BLOCK_SIZE, BLOCK_SIZE)
        rng = _block_rng(config.seed, bi)
        ka = rng.integers(0, 2, cnt, dtype=np.uint8)
        kb = rng.integers(0, 2, cnt, dtype=np.uint8)
        kc = rng.integers(0, 2, cnt, dtype=np.uint8)
        u = rng.random((4, cnt))

        ann_ab = _announce_block(ka == kb, p_sig_ab, p_bg, u[0], u[1])
        ann_bc = _announce_block(kb == kc, p_sig_bc, p_bg, u[2], u[3])

        conc = ann_ab != 0
        a_bits = ka[conc] ^ (ann_ab[conc] < 0)  # Alice flips on '-'
        b_bits = kb[conc]
        mismatch_ab += int(np.count_nonzero(a_bits != b_bits))
        a_parts.append(a_bits.astype(np.uint8))
        b_ab_parts.append(b_bits)

        conc = ann_bc != 0
        c_bits = kc[conc] ^ (ann_bc[conc] < 0)  # Charlie flips on '-'
        b_bits = kb[conc]
        mismatch_bc += int(np.count_nonzero(c_bits != b_bits))
        c_parts.append(c_bits.astype(np.uint8))
        b_bc_parts.append(b_bits)

    alice = np.concatenate(a_parts) if a_parts else np.zeros(0, dtype=np.uint8)
    bob_ab = np.concatenate(b_ab_parts) if b_ab_parts else np.zeros(0, dtype=np.uint8)
    bob_bc = np.concatenate(b_bc_parts) if b_bc_parts else np.zeros(0, dtype=np.uint8)
    charlie = np.concatenate(c_parts) if c_parts else np.zeros(0, dtype=np.uint8)

    count_ab = len(alice)
    count_bc = len(charlie)
    qber_ab = mismatch_ab / count_ab if count_ab else 0.0
    qber_bc = mismatch_bc / count_bc if count_bc else 0.0
    sift_frac_ab = count_ab / n
    sift_frac_bc = count_bc / n

    chi_ab = holevo_closed(m_ab / math.sqrt(eta_ab), eta_ab) if m_ab > 0 else 0.0
    chi_bc = holevo_closed(m_bc / math.sqrt(eta_bc), eta_bc) if m_bc > 0 else 0.0
    skr_ab = sift_frac_ab * max(
        0.0, 1.0 - chi_ab - config.ec_efficiency * binary_entropy(qber_ab)
    )
    skr_bc = sift_frac_bc * max(
        0.0, 1.0 - chi_bc - config.ec_efficiency * binary_entropy(qber_bc)
    )

    if skr_bc < skr_ab:
        sifted_rate, chi, skr = sift_frac_bc, chi_bc, skr_bc
    else:
        sifted_rate, chi, skr = sift_frac_ab, chi_ab, skr_ab

    return SessionResult(
        sifted_ab=(alice, bob_ab),
        sifted_bc=(bob_bc, charlie),
        conclusive_counts={"AB": count_ab, "BC": count_bc},
        qber_ab=qber_ab,
        qber_bc=qber_bc,
        sifted_rate=sifted_rate,
        chi=chi,
        skr_per_pulse=skr,
        skr_bps=skr * config.repetition_rate,
    )


def sift_pair(my_bits, partner_bits, announcements, role: str):
    """Drop inconclusive rounds and apply the flip rule; returns both sifted keys.

    role 'flipper' inverts my_bits on '-' announcements (Alice's role at
    node AB, Charlie's at node BC); role 'keeper' leaves them alone.
    """
    if role not in ("flipper", "keeper"):
        raise UsageError(f"role must be 'flipper' or 'keeper', got {role!r}")
    mine = np.asarray(my_bits, dtype=np.uint8)
    partner = np.asarray(partner_bits, dtype=np.uint8)
    codes = announcements_to_codes(announcements)
    if not (len(mine) == len(partner) == len(codes)):
        raise ValidationError(
            f"length mismatch: {len(mine)} bits vs {len(partner)} bits "
            f"vs {len(codes)} announcements"
        )
    conc = codes != 0
    mine = mine[conc]
    if role == "flipper":
        mine = (mine ^ (codes[conc] < 0)).astype(np.uint8)
    return mine, partner[conc]


def reconcile_pair(k_ab, k_bc):
    """Bridge announcement k_ab XOR k_bc after truncating to the shorter key.

    Returns (announcement, common_ab, common_bc).  Anyone holding one of
    the truncated keys recovers the other by XOR with the announcement.
    """
    a = _as_key_bits(k_ab)
    b = _as_key_bits(k_bc)
    n = min(len(a), len(b))
    a, b = a[:n], b[:n]
    return (a ^ b).astype(np.uint8), a, b


def _as_key_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValidationError("key bits must be 0 or 1")
    return arr


# --- serialization ----------------------------------------------------------


def session_config_to_json(config: SessionConfig) -> str:
    doc = asdict(config)
    doc["arm_lengths"] = list(config.arm_lengths)
    return json.dumps(doc, sort_keys=True, indent=2)


def session_config_from_json(text: str) -> SessionConfig:
    doc = json.loads(text)
    if "arm_lengths" in doc:
        doc["arm_lengths"] = tuple(doc["arm_lengths"])
    return SessionConfig(**doc)


def _key_digest(bits: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(bits).tobytes()).hexdigest()


def session_result_to_dict(result: SessionResult) -> dict:
    """JSON-ready summary; key material is reported as length + SHA-256 digest."""
    alice, bob_ab = result.sifted_ab
    bob_bc, charlie = result.sifted_bc
    return {
        "conclusive_counts": dict(result.conclusive_counts),
        "qber_ab": result.qber_ab,
        "qber_bc": result.qber_bc,
        "sifted_rate": result.sifted_rate,
        "chi": result.chi,
        "skr_per_pulse": result.skr_per_pulse,
        "skr_bps": result.skr_bps,
        "key_digests": {
            "alice_ab": _key_digest(alice),
            "bob_ab": _key_digest(bob_ab),
            "bob_bc": _key_digest(bob_bc),
            "charlie_bc": _key_digest(charlie),
        },
        "key_lengths": {"ab": len(alice), "bc": len(charlie)},
    }


def format_session_result(result: SessionResult) -> str:
    """Aligned human-readable summary table."""
    d = session_result_to_dict(result)
    rows = [
        ("conclusive AB / BC", f"{d['conclusive_counts']['AB']} / {d['conclusive_counts']['BC']}"),
        ("qber AB / BC", f"{d['qber_ab']:.6g} / {d['qber_bc']:.6g}"),
        ("sifted rate (bottleneck)", f"{d['sifted_rate']:.6g}"),
        ("holevo deduction chi", f"{d['chi']:.6g}"),
        ("secret key rate /pulse", f"{d['skr_per_pulse']:.6g}"),
        ("secret key rate bps", f"{d['skr_bps']:.6g}"),
    ]
    width = max(len(label) for label, _ in rows)
    return "\n".join(f"{label:<{width}}  {value}" for label, value in rows)
