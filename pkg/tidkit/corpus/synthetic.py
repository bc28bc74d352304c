"""Seeded synthetic catalog in the raw line format, used by ``tidkit smoke``."""

from __future__ import annotations

import random
from pathlib import Path

from tidkit.data.store import write_jsonl

CATEGORIES = {
    "Cell Phones": ["Phone", "Charger", "Case", "Screen Protector", "Earbuds"],
    "Beauty": ["Lipstick", "Moisturizer", "Shampoo", "Perfume", "Nail Polish"],
    "Sports": ["Yoga Mat", "Dumbbell", "Running Shoe", "Water Bottle", "Jump Rope"],
    "Toys": ["Puzzle", "Action Figure", "Board Game", "Plush Bear", "Building Set"],
    "Kitchen": ["Skillet", "Blender", "Knife Set", "Kettle", "Cutting Board"],
    "Books": ["Novel", "Cookbook", "Atlas", "Biography", "Workbook"],
    "Garden": ["Hose", "Shovel", "Planter", "Sprinkler", "Pruner"],
    "Office": ["Stapler", "Notebook", "Desk Lamp", "Pen Set", "Organizer"],
}
BRANDS = ["Acme", "Northwind", "Contoso", "Globex", "Initech", "Umbrella", "Vandelay"]
ADJECTIVES = ["Compact", "Premium", "Budget", "Wireless", "Organic", "Deluxe", "Travel"]
COLORS = ["Black", "White", "Red", "Blue", "Green", "Silver"]


def _items(n_items: int, rng: random.Random) -> list[dict]:
    names = list(CATEGORIES)
    records = []
    for index in range(n_items):
        category = names[index % len(names)]
        noun = CATEGORIES[category][(index // len(names)) % len(CATEGORIES[category])]
        brand = rng.choice(BRANDS)
        adjective = rng.choice(ADJECTIVES)
        color = rng.choice(COLORS)
        records.append(
            {
                "item_id": f"I{index:04d}",
                "title": f"{brand} {adjective} {noun} {color} Model {index:03d}",
                "brand": brand,
                "categories": [[category, noun]],
                "description": f"A {adjective.lower()} {color.lower()} {noun.lower()} "
                f"by {brand} for everyday {category.lower()} needs.",
            }
        )
    return records


def _reviews(
    item_ids: list[str], n_users: int, per_user: int, rng: random.Random
) -> list[dict]:
    n_groups = len(CATEGORIES)
    groups = [item_ids[g::n_groups] for g in range(n_groups)]
    reviews = []
    for user in range(n_users):
        group = groups[user % n_groups]
        offset = (user // n_groups) * per_user
        picks = [group[(offset + j) % len(group)] for j in range(per_user)]
        start = 1_500_000_000 + rng.randrange(0, 10_000_000)
        for step, item_id in enumerate(picks):
            reviews.append(
                {
                    "user_id": f"U{user:04d}",
                    "item_id": item_id,
                    "timestamp": start + step * 86_400 + rng.randrange(0, 3_600),
                }
            )
    rng.shuffle(reviews)
    return reviews


def write_synthetic_corpus(
    dest_dir: Path | str,
    n_items: int = 200,
    n_users: int = 250,
    per_user: int = 8,
    seed: int = 7,
) -> tuple[Path, Path]:
    """Write ``metadata.jsonl`` and ``reviews.jsonl``.

    Users walk cyclic windows over one category's items, so every item
    receives at least ``n_users * per_user / n_items`` interactions and the
    whole catalog survives 5-core filtering with the defaults.
    """
    rng = random.Random(seed)
    dest_dir = Path(dest_dir)
    items = _items(n_items, rng)
    reviews = _reviews([r["item_id"] for r in items], n_users, per_user, rng)
    metadata_path = dest_dir / "metadata.jsonl"
    reviews_path = dest_dir / "reviews.jsonl"
    write_jsonl(metadata_path, items)
    write_jsonl(reviews_path, reviews)
    return metadata_path, reviews_path
