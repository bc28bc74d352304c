"""CTG prompt assembly."""

from __future__ import annotations

import re
from typing import Mapping, Sequence

from tidkit.corpus.models import ItemRecord
from tidkit.ctg.terms import TermIdSequence
from tidkit.errors import PreconditionError
from tidkit.prompts import PromptTemplates, load_default_templates
from tidkit.services.models import GenerationRequest

ITEM_ID_LINE = "Item ID: "
_ITEM_ID = re.compile(r"^Item ID: (.+)$", re.MULTILINE)


def _item_block(item: ItemRecord) -> str:
    return f"{ITEM_ID_LINE}{item.item_id}\n{item.metadata_text.strip()}"


def build_ctg_prompt(
    target: ItemRecord,
    neighbors: Sequence[ItemRecord],
    n: int,
    neighbor_tids: Mapping[str, TermIdSequence] | None = None,
    templates: PromptTemplates | None = None,
) -> tuple[str, str]:
    """Return ``(system_text, user_text)`` for one target item.

    Neighbors that already carry a Term ID are shown with it as an exemplar.
    An empty neighbor list drops the similar-items block entirely.
    """
    if n < 1:
        raise PreconditionError("N must be >= 1")
    tpl = (templates or load_default_templates()).ctg
    neighbor_tids = neighbor_tids or {}

    sections = [f"{tpl.target_header}\n{_item_block(target)}"]
    if neighbors:
        blocks = [tpl.neighbors_header]
        for index, neighbor in enumerate(neighbors, start=1):
            header = tpl.neighbor_header.format(index=index)
            block = f"{header}\n{_item_block(neighbor)}"
            tid = neighbor_tids.get(neighbor.item_id)
            if tid is not None:
                block += f"\n{tpl.exemplar_prefix}{tid.canonical()}"
            blocks.append(block)
        sections.append("\n\n".join(blocks))
    rules = "\n".join(f"- {rule}" for rule in tpl.rules)
    sections.append(f"{tpl.rules_header}\n{rules}")
    sections.append(f"{tpl.output_header}\n{tpl.output.format(n=n)}")
    return tpl.system.format(n=n), "\n\n".join(sections) + "\n"


def target_key(request: GenerationRequest) -> str | None:
    """Item id of the target block of a CTG prompt, if present."""
    match = _ITEM_ID.search(request.user_text)
    return match.group(1).strip() if match else None
