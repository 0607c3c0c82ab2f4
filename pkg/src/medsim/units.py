"""Token units: 10^18 base units per display token, for native and access tokens."""

from __future__ import annotations

DECIMALS = 18
ONE_TOKEN = 10**DECIMALS


def to_display(base_units: int) -> str:
    """Render base units as a decimal token amount without float loss."""
    whole, frac = divmod(int(base_units), ONE_TOKEN)
    if frac == 0:
        return str(whole)
    return f"{whole}.{frac:018d}".rstrip("0")


def parse_display(text: str) -> int:
    """Parse a decimal token amount into base units."""
    text = text.strip()
    if text.startswith("-"):
        raise ValueError("amounts cannot be negative")
    whole, _, frac = text.partition(".")
    if len(frac) > DECIMALS:
        raise ValueError(f"more than {DECIMALS} decimal places: {text!r}")
    whole_units = int(whole or "0") * ONE_TOKEN
    frac_units = int((frac or "0").ljust(DECIMALS, "0"))
    return whole_units + frac_units
