"""Deterministic generator of labeled Juniper-style syslog corpora.

Normal traffic is drawn from templates of everyday router chatter: link
traps, sshd disconnects, inetd exits, SFP throttling notices, repeated
message notices, logins and config commits. Anomalies are chassis alarms,
daemon crash floods, core dumps, OSPF adjacency loss and long hardware-fault
reports. Their fault vocabulary never shows up in normal traffic, while the
amount of ordinary interface context they carry varies.

Variable fields (PIDs, IPs, interface numbers, counts) are numeric so the
normalized vocabulary of each template family is closed.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .ingest import TIMESTAMP_FORMAT

Rng = np.random.Generator


@dataclass(frozen=True)
class SynthConfig:
    n_messages: int = 2040
    anomaly_rate: float = 0.02
    seed: int = 42
    n_devices: int = 20
    start_time: datetime = datetime(2018, 6, 30, 7, 0, 0)
    mean_interarrival: float = 3.0

    def __post_init__(self):
        if self.n_messages < 1:
            raise ValueError("n_messages must be positive")
        if not 0 <= self.anomaly_rate < 1:
            raise ValueError("anomaly_rate must lie in [0, 1)")
        if self.n_devices < 1:
            raise ValueError("n_devices must be positive")
        if not self.mean_interarrival > 0:
            raise ValueError("mean_interarrival must be positive")

    @property
    def n_anomalies(self) -> int:
        return int(round(self.n_messages * self.anomaly_rate))


def _pid(rng: Rng) -> int:
    return int(rng.integers(1000, 99999))


def _ip(rng: Rng) -> str:
    return "172.16.{}.{}".format(*rng.integers(1, 255, size=2))


def _ifname(rng: Rng) -> str:
    prefix = ("ge", "xe")[int(rng.integers(2))]
    return "{}-{}/{}/{}".format(prefix, *rng.integers(0, 8, size=3))


def _pick(rng: Rng, items: Sequence[str]) -> str:
    return items[int(rng.integers(len(items)))]


# -- normal templates --------------------------------------------------------

def _repeated(rng):
    return f"last message repeated {int(rng.integers(2, 60))} times"


def _inetd_exit(rng):
    return f"inetd[{_pid(rng)}]: /usr/sbin/sshd[{_pid(rng)}]: exited, status 255"


def _sshd_disconnect(rng):
    return (f"sshd[{_pid(rng)}]: error: Received disconnect from {_ip(rng)}: 11: "
            "disconnected by user")


def _link_trap(rng):
    state = _pick(rng, ("DOWN", "UP"))
    admin = "up(1)"
    oper = "down(2)" if state == "DOWN" else "up(1)"
    return (f"mib2d[{_pid(rng)}]: SNMP_TRAP_LINK_{state}: ifIndex {int(rng.integers(500, 600))}, "
            f"ifAdminStatus {admin}, ifOperStatus {oper}, ifName {_ifname(rng)}")


def _sfp_throttle(rng):
    return (f"tfeb0 MIC({int(rng.integers(0, 2))}/0) link {int(rng.integers(0, 4))} SFP syslog "
            "throttling: enabling syslogs for receive power alarms and warnings. (0/0)")


def _login(rng):
    user = _pick(rng, ("noc", "admin", "monitor"))
    return (f"sshd[{_pid(rng)}]: Accepted password for {user} from {_ip(rng)} "
            f"port {int(rng.integers(1024, 65535))} ssh2")


def _cli_command(rng):
    user = _pick(rng, ("noc", "admin", "monitor"))
    cmd = _pick(rng, ("show interfaces terse", "show route summary", "show log messages"))
    return f"mgd[{_pid(rng)}]: UI_CMDLINE_READ_LINE: User '{user}', command '{cmd}'"


def _commit(rng):
    user = _pick(rng, ("noc", "admin"))
    return f"mgd[{_pid(rng)}]: UI_COMMIT: User '{user}' requested 'commit' operation"


def _ntp(rng):
    return f"xntpd[{_pid(rng)}]: NTP Server {_ip(rng)} is Reachable"


NORMAL_TEMPLATES: List[Tuple[Callable[[Rng], str], float]] = [
    (_repeated, 0.12),
    (_inetd_exit, 0.14),
    (_sshd_disconnect, 0.14),
    (_link_trap, 0.16),
    (_sfp_throttle, 0.08),
    (_login, 0.10),
    (_cli_command, 0.10),
    (_commit, 0.08),
    (_ntp, 0.08),
]


# -- anomaly templates -------------------------------------------------------
# Fault reports append a variable number of detail phrases drawn from this
# pool; none of these words occur in normal templates.

FAULT_PHRASES = (
    "parity error detected", "uncorrectable ECC fault", "CRC checksum mismatch",
    "packet buffer overflow", "PFE wedge suspected", "fabric plane degraded",
    "thermal sensor critical", "fan tray failure", "power supply voltage sag",
    "midplane link flapping", "memory scrub failed", "watchdog expired",
    "hardware queue stuck", "optics receive loss", "disabling PFE",
    "jtree memory corruption", "lookup chip reset", "cell drops exceeded",
    "backplane clock skew", "flash wear exhausted", "interrupt storm",
    "DMA descriptor timeout", "spurious SERDES errors", "microcode hang",
)

OSPF_STATES = ("Full", "ExStart", "Exchange", "Loading", "TwoWay", "Init")
OSPF_REASONS = ("KillNbr", "InactivityTimer", "SeqNumberMismatch", "BadLSReq",
                "AdjacencyForcedDown", "InterfaceDown")


def _context(rng, lo, hi):
    """Interface/session context in everyday (in-dictionary) vocabulary."""
    parts = []
    for _ in range(int(rng.integers(lo, hi + 1))):
        kind = int(rng.integers(4))
        if kind == 0:
            parts.append(f"ifName {_ifname(rng)} ifIndex {int(rng.integers(500, 600))}")
        elif kind == 1:
            parts.append(f"link {int(rng.integers(0, 4))} ifOperStatus down(2)")
        elif kind == 2:
            parts.append(f"from {_ip(rng)} port {int(rng.integers(1024, 65535))}")
        else:
            parts.append("receive power alarms and warnings")
    return " ".join(parts)


def _details(rng, lo, hi):
    k = int(rng.integers(lo, hi + 1))
    idx = rng.choice(len(FAULT_PHRASES), size=k, replace=False)
    return ", ".join(FAULT_PHRASES[i] for i in sorted(idx))


def _chassis_alarm(rng):
    # alarm floods repeat the same alarm line several times in one report
    reps = int(rng.integers(1, 4))
    alarms = "; ".join(
        f"Alarm set: FPC color=RED, class=CHASSIS, reason=FPC {int(rng.integers(0, 12))} Major Errors"
        for _ in range(reps))
    return f"alarmd[{_pid(rng)}]: {alarms}: {_details(rng, 0, 4)} {_context(rng, 0, 3)}"


def _fru_offline(rng):
    return (f"chassisd[{_pid(rng)}]: CHASSISD_FRU_OFFLINE_NOTICE: Taking FPC "
            f"{int(rng.integers(0, 12))} offline: {_details(rng, 1, 5)} {_context(rng, 0, 4)}")


def _crash_flood(rng):
    # a daemon exiting over and over until inetd gives up on it
    reps = int(rng.integers(2, 13))
    exits = "; ".join(_inetd_exit(rng) for _ in range(reps))
    return f"{exits}; inetd[{_pid(rng)}]: respawn rate exceeded, sshd disabled"


def _core_dump(rng):
    proc = _pick(rng, ("rpd", "dcd", "chassisd", "snmpd", "mib2d", "xntpd"))
    reps = int(rng.integers(1, 5))
    return "; ".join(f"init: {proc} (PID {_pid(rng)}) terminated by signal number 6. Core dumped!"
                     for _ in range(reps))


def _pfe_fault(rng):
    n = int(rng.integers(0, 12))
    return (f"fpc{n} Cmerror Op Set: XMCHIP({n}): FI: Protect: {_details(rng, 4, 14)} "
            f"{_context(rng, 0, 6)}")


def _ospf_down(rng):
    # adjacency loss usually takes several neighbors down at once
    events = "; ".join(
        f"RPD_OSPF_NBRDOWN: OSPF neighbor {_ip(rng)} (realm ospf-v2 {_ifname(rng)}.0 "
        f"area 0.0.0.0) state changed from {_pick(rng, OSPF_STATES)} to Down due to "
        f"{_pick(rng, OSPF_REASONS)}"
        for _ in range(int(rng.integers(1, 4))))
    return f"rpd[{_pid(rng)}]: {events}"


ANOMALY_TEMPLATES: List[Callable[[Rng], str]] = [
    _chassis_alarm,
    _fru_offline,
    _crash_flood,
    _core_dump,
    _pfe_fault,
    _ospf_down,
]


def device_names(n: int, rng: Rng) -> List[str]:
    regions = ("HCM", "HNI", "NBH", "DNG", "CTO", "BDH", "DDA", "Q12")
    models = ("MX5", "MX10", "MX80", "MX480", "MX960")
    names: List[str] = []
    while len(names) < n:
        name = "{}-{}-{}".format(_pick(rng, regions), _pick(rng, regions[3:]) + str(len(names)),
                                 _pick(rng, models))
        names.append(name)
    return names


def generate_corpus(cfg: SynthConfig) -> Tuple[List[str], List[int]]:
    """Produce ``cfg.n_messages`` syslog lines and the zero-based anomaly indices."""
    rng = np.random.default_rng(cfg.seed)
    devices = device_names(cfg.n_devices, rng)
    anomalies = sorted(int(i) for i in rng.choice(cfg.n_messages, cfg.n_anomalies, replace=False))
    is_anomaly = np.zeros(cfg.n_messages, dtype=bool)
    is_anomaly[anomalies] = True

    funcs = [f for f, _ in NORMAL_TEMPLATES]
    weights = np.array([w for _, w in NORMAL_TEMPLATES])
    weights = weights / weights.sum()

    gaps = np.round(rng.exponential(cfg.mean_interarrival, size=cfg.n_messages))
    seconds = np.cumsum(gaps)
    lines = []
    for i in range(cfg.n_messages):
        ts = cfg.start_time + timedelta(seconds=float(seconds[i]))
        device = devices[int(rng.integers(len(devices)))]
        if is_anomaly[i]:
            body = ANOMALY_TEMPLATES[int(rng.integers(len(ANOMALY_TEMPLATES)))](rng)
        else:
            body = funcs[int(rng.choice(len(funcs), p=weights))](rng)
        lines.append(f"{ts.strftime(TIMESTAMP_FORMAT)} {device} {body}")
    return lines, anomalies


def write_corpus(cfg: SynthConfig, log_path, labels_path) -> List[int]:
    lines, anomalies = generate_corpus(cfg)
    with open(log_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(line + "\n" for line in lines)
    with open(labels_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# anomaly line indices (zero-based), seed={cfg.seed}\n")
        fh.writelines(f"{i}\n" for i in anomalies)
    return anomalies
