"""Shared fixtures: the default model, a small reference store, and a
synthetic event-log builder with a plantable two-step attack."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from wilee.dsl import parse
from wilee.stores import DataModel, IocDb, IocRecord, TtpRecord, TtpStore

FIXTURES = Path(__file__).parent / "fixtures"

T1552_PUTTY_SRC = '''def t1552_002():
    winregistrykey1 = WinRegistryKey()
    winregistrykey1.Hive = "Software\\*\\Putty\\Sessions"
    process1 = Process()
    process1.name = "TrojanSpy.Win32.TRICKBOT.AZ"
    process1.observed(winregistrykey1)
'''

T1552_RUNKEY_SRC = '''def t1552_002():
    winregistrykey1 = WinRegistryKey()
    winregistrykey1.Hive = "Software\\*\\OpenSSH\\Agent"
    process1 = Process()
    process1.name = "reg.exe"
    process1.observed(winregistrykey1)
'''

T1059_SRC = '''def t1059_001():
    process1 = Process()
    process1.command_line = "Get-Process -Name \\"powershell\\" | Stop-Process"
'''


def function_from(source: str):
    return parse(source).children[0]


@pytest.fixture(scope="session")
def model() -> DataModel:
    return DataModel.default()


def build_store(model: DataModel, entries) -> TtpStore:
    """entries: iterable of (technique_id, tactic_tags, source, dsl_source)."""
    store = TtpStore()
    for technique_id, tags, source, text in entries:
        store.insert(
            TtpRecord(technique_id, tuple(tags), source, function_from(text)), model
        )
    return store


@pytest.fixture
def putty_store(model) -> TtpStore:
    return build_store(
        model,
        [
            ("T1552.002", ("credential-access",), "SME", T1552_PUTTY_SRC),
            ("T1552.002", ("credential-access",), "SME", T1552_RUNKEY_SRC),
            ("T1059.001", ("execution",), "SME", T1059_SRC),
        ],
    )


@pytest.fixture
def putty_ioc_db() -> IocDb:
    return IocDb(
        (
            IocRecord("registry_hive", "Software\\SimonTatham\\Putty\\Sessions", "T1552.002"),
            IocRecord("registry_hive", "Software\\Wow6432Node\\Putty\\Sessions", "T1552.002"),
            IocRecord("process_name", "TrojanSpy.Win32.TRICKBOT.AZ", "T1552.002"),
            IocRecord(
                "command_line",
                'Get-Process -Name "powershell" | Stop-Process',
                "T1059.001",
                "caldera-stockpile",
            ),
            IocRecord("process_name", "mimikatz.exe", "T1003.001"),
        )
    )


# ---------------------------------------------------------------------------
# Synthetic event logs
# ---------------------------------------------------------------------------

_BASE_TIME = datetime(2026, 3, 1, 0, 0, 0, tzinfo=timezone.utc)

_BENIGN_HIVES = (
    "Software\\Microsoft\\Windows\\CurrentVersion\\Run",
    "Software\\Policies\\Microsoft\\Edge",
    "System\\CurrentControlSet\\Services\\Tcpip",
    "Software\\Classes\\CLSID",
)
_BENIGN_PROCESSES = ("explorer.exe", "svchost.exe", "chrome.exe", "winlogon.exe", "notepad.exe")
_BENIGN_COMMANDS = (
    "ping -n 1 fileserver",
    "tasklist /v",
    "ipconfig /all",
    "whoami /groups",
)
_HOSTS = ("ws-001", "ws-002", "srv-db-01", "srv-web-02", "dc-01")


def iso(moment: datetime) -> str:
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def background_event(rng: random.Random, index: int) -> dict:
    moment = _BASE_TIME + timedelta(seconds=rng.randrange(0, 86_400))
    host = rng.choice(_HOSTS)
    roll = rng.random()
    if roll < 0.35:
        cls, fields = "Process", {
            "name": rng.choice(_BENIGN_PROCESSES),
            "pid": str(rng.randrange(100, 65000)),
            "command_line": rng.choice(_BENIGN_COMMANDS),
        }
    elif roll < 0.55:
        cls, fields = "WinRegistryKey", {"Hive": rng.choice(_BENIGN_HIVES)}
    elif roll < 0.75:
        cls, fields = "File", {
            "path": f"C:\\Users\\u{rng.randrange(100)}\\file{rng.randrange(1000)}.txt",
            "size": str(rng.randrange(1, 10_000_000)),
        }
    else:
        cls, fields = "NetworkConnection", {
            "dst_ip": f"10.0.{rng.randrange(256)}.{rng.randrange(256)}",
            "dst_port": str(rng.choice((80, 443, 53, 445))),
            "protocol": "tcp",
        }
    return {
        "event_id": f"bg{index:06d}",
        "timestamp": iso(moment),
        "host": host,
        "entity_class": cls,
        "fields": fields,
    }


@dataclass(frozen=True)
class PlantedAttack:
    """The three witness events for the two-step putty workflow on one
    host.  Every witness is essential: each backs exactly one obligation."""

    host: str = "ws-002"
    events: tuple[dict, ...] = ()

    @classmethod
    def build(cls, host: str = "ws-002") -> "PlantedAttack":
        t0 = _BASE_TIME + timedelta(hours=6)
        events = (
            {
                "event_id": "atk-reg",
                "timestamp": iso(t0),
                "host": host,
                "entity_class": "WinRegistryKey",
                "fields": {"Hive": "Software\\SimonTatham\\Putty\\Sessions"},
            },
            {
                "event_id": "atk-proc",
                "timestamp": iso(t0 + timedelta(seconds=20)),
                "host": host,
                "entity_class": "Process",
                "fields": {"name": "TrojanSpy.Win32.TRICKBOT.AZ", "pid": "4242"},
            },
            {
                "event_id": "atk-cmd",
                "timestamp": iso(t0 + timedelta(seconds=300)),
                "host": host,
                "entity_class": "Process",
                "fields": {
                    "command_line": 'Get-Process -Name "powershell" | Stop-Process'
                },
            },
        )
        return cls(host, events)

    @property
    def witness_ids(self) -> tuple[str, ...]:
        return tuple(e["event_id"] for e in self.events)


def synth_log(rng: random.Random, count: int, planted: tuple[dict, ...] = ()) -> list[dict]:
    events = [background_event(rng, i) for i in range(count - len(planted))]
    events.extend(planted)
    events.sort(key=lambda e: (e["timestamp"], e["event_id"]))
    return events


def write_ndjson(path: Path, events: list[dict]) -> Path:
    path.write_text("".join(json.dumps(e) + "\n" for e in events), "utf-8")
    return path


@pytest.fixture(scope="session")
def big_log_events() -> list[dict]:
    rng = random.Random(20260301)
    return synth_log(rng, 10_000, PlantedAttack.build().events)


@pytest.fixture(scope="session")
def clean_log_events() -> list[dict]:
    rng = random.Random(20260301)
    return synth_log(rng, 10_000)
