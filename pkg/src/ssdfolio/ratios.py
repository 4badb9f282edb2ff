"""The eleven financial ratios, their categories and preferred direction."""

from dataclasses import dataclass
from enum import Enum


class Category(str, Enum):
    LR = "LR"  # liquidity
    PR = "PR"  # profitability
    SR = "SR"  # solvency
    VR = "VR"  # valuation


class Orientation(str, Enum):
    LARGER = "larger-preferable"
    SMALLER = "smaller-preferable"


@dataclass(frozen=True)
class RatioMeta:
    label: str
    name: str
    category: Category

    @property
    def orientation(self) -> Orientation:
        if self.category in (Category.LR, Category.PR):
            return Orientation.LARGER
        return Orientation.SMALLER

    @property
    def sign(self) -> int:
        """+1 when the ratio is maximized, -1 when it is minimized."""
        return 1 if self.orientation is Orientation.LARGER else -1


RATIOS = (
    RatioMeta("QR", "Quick Ratio", Category.LR),
    RatioMeta("CR", "Current Ratio", Category.LR),
    RatioMeta("CCL", "Cash Ratio", Category.LR),
    RatioMeta("NPM", "Net Profit Margin", Category.PR),
    RatioMeta("ROA", "Return on Assets", Category.PR),
    RatioMeta("CPTI", "Cash Profit Ratio", Category.PR),
    RatioMeta("ROE", "Return on Equity", Category.PR),
    RatioMeta("DER", "Debt-Equity Ratio", Category.SR),
    RatioMeta("DAR", "Debt-Asset Ratio", Category.SR),
    RatioMeta("PER", "P/E Ratio", Category.VR),
    RatioMeta("PBR", "P/B Ratio", Category.VR),
)

LABELS = tuple(r.label for r in RATIOS)
CATEGORIES = (Category.LR, Category.PR, Category.SR, Category.VR)
BY_LABEL = {r.label: r for r in RATIOS}
INDEX = {label: i for i, label in enumerate(LABELS)}

# Fixed ratio set of the original two-step sectoral model:
# ROA (profitability), current ratio (liquidity), debt-asset (solvency), P/E (valuation).
SPO_FIXED = ("ROA", "CR", "DAR", "PER")


def meta(label: str) -> RatioMeta:
    try:
        return BY_LABEL[label]
    except KeyError:
        raise KeyError(f"unknown ratio label {label!r}") from None


def signs(labels) -> tuple:
    return tuple(meta(lbl).sign for lbl in labels)
