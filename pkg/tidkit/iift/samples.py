"""Instruction-tuning samples: GTI, sequence prediction and evaluation.

An item renders as ``[<canonical TID>] ; <title>``; renderings are joined by
newlines. The trainer-facing joint text of a sample is::

    instruction + "\\n\\n" + input + "\\n" + output

and ``loss_start`` is the character offset of ``output`` inside it.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Any, Generic, Mapping, Sequence, TypeVar

from tidkit.corpus.cross_domain import domain_split
from tidkit.corpus.models import Corpus, InteractionSequence
from tidkit.corpus.sequences import leave_one_out_split, truncate_history
from tidkit.ctg.terms import TermIdSequence
from tidkit.errors import PreconditionError
from tidkit.prompts import PromptTemplates, load_default_templates

logger = logging.getLogger(__name__)

RENDER_SEPARATOR = "\n"
INPUT_SEPARATOR = "\n\n"
DEFAULT_TRUNCATION = 20

_WHITESPACE = re.compile(r"\s+")

S = TypeVar("S")


def render_item(tid: TermIdSequence, title: str) -> str:
    """``[TID] ; title`` on a single line."""
    return f"[{tid.canonical()}] ; {_WHITESPACE.sub(' ', title).strip()}"


def joint_prefix(instruction: str, input_text: str) -> str:
    return f"{instruction}{INPUT_SEPARATOR}{input_text}{RENDER_SEPARATOR}"


@dataclass(frozen=True)
class GtiSample:
    instruction: str
    input: str
    output: str
    item_id: str | None = None

    def to_dict(self) -> dict[str, Any]:
        row: dict[str, Any] = {
            "task": "gti",
            "instruction": self.instruction,
            "input": self.input,
            "output": self.output,
        }
        if self.item_id is not None:
            row["item_id"] = self.item_id
        return row


@dataclass(frozen=True)
class SeqSample:
    instruction: str
    input: str
    output: str
    loss_start: int
    user_id: str | None = None

    def text(self) -> str:
        return joint_prefix(self.instruction, self.input) + self.output

    def loss_text(self) -> str:
        return self.text()[self.loss_start :]

    def to_dict(self) -> dict[str, Any]:
        row: dict[str, Any] = {
            "task": "seq",
            "instruction": self.instruction,
            "input": self.input,
            "output": self.output,
            "loss_start": self.loss_start,
        }
        if self.user_id is not None:
            row["user_id"] = self.user_id
        return row


@dataclass(frozen=True)
class EvalSample:
    user_id: str
    instruction: str
    input: str
    input_items: tuple[str, ...]
    target_tid: str
    target_item_id: str
    domain: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "user_id": self.user_id,
            "instruction": self.instruction,
            "input": self.input,
            "input_items": list(self.input_items),
            "target_tid": self.target_tid,
            "target_item_id": self.target_item_id,
            "domain": self.domain,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EvalSample":
        return cls(
            user_id=data["user_id"],
            instruction=data["instruction"],
            input=data["input"],
            input_items=tuple(data.get("input_items", ())),
            target_tid=data["target_tid"],
            target_item_id=data["target_item_id"],
            domain=data.get("domain"),
        )


@dataclass
class SampleBuild(Generic[S]):
    samples: list[S]
    skipped: int = 0
    counters: dict[str, int] = field(default_factory=dict)


def _render_history(
    items: Sequence[str], corpus: Corpus, tids: Mapping[str, TermIdSequence]
) -> tuple[list[str], list[str], int]:
    """Renderings for items that have a TID, plus the count of those without."""
    kept, renderings = [], []
    for item_id in items:
        tid = tids.get(item_id)
        if tid is None:
            continue
        kept.append(item_id)
        renderings.append(render_item(tid, corpus.items[item_id].title))
    return kept, renderings, len(items) - len(kept)


def build_gti_samples(
    corpus: Corpus,
    tids: Mapping[str, TermIdSequence],
    templates: PromptTemplates | None = None,
) -> SampleBuild[GtiSample]:
    """One metadata -> TID sample per item that has a TID."""
    tpl = templates or load_default_templates()
    samples = []
    excluded = 0
    for item_id in sorted(corpus.items):
        tid = tids.get(item_id)
        if tid is None:
            excluded += 1
            continue
        samples.append(
            GtiSample(
                instruction=tpl.instructions.gti.format(n=len(tid)),
                input=corpus.items[item_id].metadata_text,
                output=tid.canonical(),
                item_id=item_id,
            )
        )
    if excluded:
        logger.warning("Excluded %d items without a TID from GTI samples", excluded)
    return SampleBuild(samples=samples, skipped=excluded)


def training_prefix(sequence: InteractionSequence) -> tuple[str, ...]:
    """Items before every held-out target of the sequence."""
    if sequence.domain_marks:
        cut = min(
            valid if valid is not None else test
            for valid, test in sequence.domain_marks.values()
        )
        return sequence.items[:cut]
    return leave_one_out_split(sequence).train


def _seq_sample(
    instruction: str, renderings: Sequence[str], user_id: str
) -> SeqSample:
    input_text = RENDER_SEPARATOR.join(renderings[:-1])
    return SeqSample(
        instruction=instruction,
        input=input_text,
        output=renderings[-1],
        loss_start=len(joint_prefix(instruction, input_text)),
        user_id=user_id,
    )


def build_seq_samples(
    sequences: Sequence[InteractionSequence],
    tids: Mapping[str, TermIdSequence],
    corpus: Corpus,
    truncation: int = DEFAULT_TRUNCATION,
    per_step: bool = False,
    templates: PromptTemplates | None = None,
) -> SampleBuild[SeqSample]:
    """One trajectory sample per user over the truncated training prefix.

    The first item is the input; every later item is loss-bearing output.
    With ``per_step`` each prefix position k >= 2 additionally yields a
    sample whose input is items 1..k-1 and whose output is item k.
    """
    tpl = templates or load_default_templates()
    instruction = tpl.instructions.seq
    samples: list[SeqSample] = []
    skipped = 0
    missing_tids = 0
    for sequence in sequences:
        prefix = truncate_history(training_prefix(sequence), truncation)
        _, renderings, missing = _render_history(prefix, corpus, tids)
        missing_tids += missing
        if len(renderings) < 2:
            skipped += 1
            continue
        output = RENDER_SEPARATOR.join(renderings[1:])
        samples.append(
            SeqSample(
                instruction=instruction,
                input=renderings[0],
                output=output,
                loss_start=len(joint_prefix(instruction, renderings[0])),
                user_id=sequence.user_id,
            )
        )
        if per_step and len(renderings) > 2:
            samples.extend(
                _seq_sample(instruction, renderings[:k], sequence.user_id)
                for k in range(2, len(renderings) + 1)
            )
    if skipped:
        logger.info("Skipped %d users with a training prefix shorter than 2", skipped)
    return SampleBuild(
        samples=samples,
        skipped=skipped,
        counters={"history_items_without_tid": missing_tids},
    )


def _eval_targets(
    sequence: InteractionSequence, mode: str
) -> list[tuple[tuple[str, ...], str | None, str | None]]:
    """(history, target, domain) triples; target is None when a domain has none."""
    if sequence.domain_marks:
        targets: list[tuple[tuple[str, ...], str | None, str | None]] = []
        for domain in sorted(sequence.domain_marks):
            split = domain_split(sequence, domain, mode=mode)
            if split is None:
                targets.append(((), None, domain))
            else:
                targets.append((split[0], split[1], domain))
        return targets
    split = leave_one_out_split(sequence)
    if mode == "test":
        return [((*split.train, split.valid), split.test, None)]
    return [(split.train, split.valid, None)]


def build_eval_samples(
    sequences: Sequence[InteractionSequence],
    tids: Mapping[str, TermIdSequence],
    corpus: Corpus,
    mode: str = "test",
    truncation: int = DEFAULT_TRUNCATION,
    templates: PromptTemplates | None = None,
) -> SampleBuild[EvalSample]:
    """History -> next-item samples for leave-one-out evaluation.

    ``mode="test"`` targets the last item with the validation item in the
    history; ``mode="valid"`` targets the validation item. Cross-domain
    sequences yield one sample per domain. Samples whose target has no TID
    are dropped and counted, as are domains with no held-out item that has
    history before it. Earlier occurrences of the target are removed from the
    history.
    """
    if mode not in ("test", "valid"):
        raise PreconditionError(f"Unknown eval mode: {mode}")
    tpl = templates or load_default_templates()
    samples: list[EvalSample] = []
    dropped = 0
    repeats = 0
    for sequence in sequences:
        for history, target, domain in _eval_targets(sequence, mode):
            target_tid = tids.get(target) if target is not None else None
            if target is None or target_tid is None:
                dropped += 1
                continue
            clean = [i for i in history if i != target]
            repeats += len(history) - len(clean)
            kept, renderings, _ = _render_history(
                truncate_history(clean, truncation), corpus, tids
            )
            if not renderings:
                dropped += 1
                continue
            samples.append(
                EvalSample(
                    user_id=sequence.user_id,
                    instruction=tpl.instructions.eval,
                    input=RENDER_SEPARATOR.join(renderings),
                    input_items=tuple(kept),
                    target_tid=target_tid.canonical(),
                    target_item_id=target,
                    domain=domain,
                )
            )
    if dropped:
        logger.warning("Dropped %d %s samples without a usable target", dropped, mode)
    return SampleBuild(
        samples=samples, skipped=dropped, counters={"target_repeats_removed": repeats}
    )
