from __future__ import annotations
from typing import Sequence
from ..common import CODES
from .matching import MatchResult
from .profile import SpeakerProfile


def _note(result: MatchResult, t: int) -> str:
    notes = []
    if result.m[t] is None:
        notes.append("unmatched")
    if -1.0 < result.r[t] < 0.0:
        notes.append("negative")
    if result.clamped[t]:
        notes.append("clamped")
    return ",".join(notes)


def trace_records(result: MatchResult, utterances: Sequence[str] = None) -> list[dict]:
    """One record per turn: turn, utterance, r, m, gamma, term and notes."""
    records = []
    for t in range(result.n_turns):
        records.append(
            {
                "turn": t + 1,
                "utterance": utterances[t] if utterances is not None else None,
                "r": result.r[t],
                "m": result.m[t],
                "gamma": result.gamma_of(t),
                "term": result.terms[t],
                "note": _note(result, t),
            }
        )
    return records


def trace_to_dict(result: MatchResult, utterances: Sequence[str] = None) -> dict:
    return {
        "R": result.R,
        "N": result.n_personas,
        "T": result.n_turns,
        "clamp_terms": result.clamp_terms,
        "gamma": list(result.gamma),
        "gamma_unmatched": result.gamma_unmatched,
        "trace": trace_records(result, utterances),
    }


def format_trace(result: MatchResult, utterances: Sequence[str] = None) -> str:
    """Tab separated audit trail of a matching run followed by the reward."""
    lines = ["turn\tr\tm\tgamma\tterm\tnote\tutterance"]
    for rec in trace_records(result, utterances):
        m = "NONE" if rec["m"] is None else str(rec["m"])
        utterance = "" if rec["utterance"] is None else rec["utterance"].replace("\t", " ")
        lines.append(f"{rec['turn']}\t{rec['r']!r}\t{m}\t{rec['gamma']}\t{rec['term']!r}\t{rec['note']}\t{utterance}")
    lines.append(f"R\t{result.R!r}")
    return "\n".join(lines) + "\n"


def profile_to_dict(profile: SpeakerProfile) -> dict:
    return {
        "aggregation": profile.aggregation.value,
        "dimensions": list(CODES),
        "profile": profile.profile.to_list(),
        "per_utterance": [v.to_list() for v in profile.per_utterance],
        "utterances": list(profile.utterances),
    }


def format_profile(profile: SpeakerProfile) -> str:
    """Profile row followed by one row per utterance, columns in canonical dimension order."""
    lines = ["\t".join(("utterance",) + CODES)]
    lines.append("\t".join([f"<{profile.aggregation.value}>"] + [repr(x) for x in profile.profile.components]))
    for text, v in zip(profile.utterances, profile.per_utterance):
        lines.append("\t".join([text.replace("\t", " ")] + [repr(x) for x in v.components]))
    return "\n".join(lines) + "\n"


def plot_data(profile: SpeakerProfile) -> str:
    """Dimension code and value per line, for radar plots."""
    return "".join(f"{code}\t{value!r}\n" for code, value in profile.profile)
