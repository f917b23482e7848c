"""Akoma Ntoso metadata fragments for classified paragraphs.

Emits the three blocks a marked-up resolution carries: classification
keywords, the TLCConcept references they point at, and the proprietary
per-paragraph confidence records. Output is metadata only, never a full
akomaNtoso document. A canonical serializer guarantees that parsing a
fragment and re-emitting it reproduces the bytes exactly.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass

AKN4UN_NS = "https://unsceb-hlcm.github.io/akn4un"
_NS_PREFIXES = {AKN4UN_NS: "akn4un"}

_EID_RE = re.compile(r"[A-Za-z0-9_]+\Z")
_GOAL_KEY_RE = re.compile(r"goal_[A-Za-z0-9_]+\Z")


class InvalidEId(ValueError):
    pass


@dataclass(frozen=True)
class AknEntry:
    """One classified goal (or target) and the paragraphs it applies to."""

    sdg_key: str  # e.g. "goal_16" or "goal_5_5_2"
    paragraph_refs: tuple[str, ...]  # paragraph eIds, e.g. ("para_3", "para_7")
    confidences: dict[str, float]  # paragraph eId -> classifier score
    show_as: str | None = None  # defaults to "SDG <suffix>"

    @property
    def suffix(self) -> str:
        return self.sdg_key.removeprefix("goal_")

    @property
    def keyword_eid(self) -> str:
        return f"keyword_{self.suffix}"

    @property
    def concept_eid(self) -> str:
        return f"concept_sdg_{self.suffix}"

    @property
    def concept_ref(self) -> str:
        return f"#{self.concept_eid}"

    @property
    def label(self) -> str:
        return self.show_as if self.show_as is not None else f"SDG {self.suffix}"


@dataclass(frozen=True)
class AknAnnotation:
    entries: tuple[AknEntry, ...]
    doc_source: str = "#cirsfidUnibo"
    dictionary: str = "SDGIO"


def _validate(ann: AknAnnotation) -> None:
    for entry in ann.entries:
        if not _GOAL_KEY_RE.match(entry.sdg_key):
            raise InvalidEId(f"bad sdg key: {entry.sdg_key!r}")
        for ref in entry.paragraph_refs:
            if not _EID_RE.match(ref):
                raise InvalidEId(f"bad paragraph eId: {ref!r}")
            if ref not in entry.confidences:
                raise InvalidEId(f"paragraph {ref!r} has no confidence for {entry.sdg_key}")


def format_confidence(value: float) -> str:
    """Shortest decimal that round-trips; integral values drop the '.0'."""
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def emit_classification(ann: AknAnnotation) -> str:
    """The <classification> block: one keyword per classified goal."""
    _validate(ann)
    root = ET.Element("classification", {"source": ann.doc_source})
    for entry in ann.entries:
        ET.SubElement(
            root,
            "keyword",
            {
                "eId": entry.keyword_eid,
                "value": entry.sdg_key,
                "href": " ".join(f"#{ref}" for ref in entry.paragraph_refs),
                "showAs": entry.label,
                "refersTo": entry.concept_ref,
                "dictionary": ann.dictionary,
            },
        )
    return serialize(root)


def emit_tlc_concepts(ann: AknAnnotation) -> str:
    """The TLCConcept set, one element per distinct goal key."""
    _validate(ann)
    root = ET.Element("references", {"source": ann.doc_source})
    seen: set[str] = set()
    for entry in ann.entries:
        if entry.sdg_key in seen:
            continue
        seen.add(entry.sdg_key)
        ET.SubElement(
            root,
            "TLCConcept",
            {
                "eId": entry.concept_eid,
                "href": f"/akn/ontology/concepts/un/sdg/sdgio/{entry.sdg_key}",
                "showAs": entry.label,
            },
        )
    return serialize(root)


def emit_proprietary(ann: AknAnnotation) -> str:
    """The proprietary block with per-paragraph confidence records."""
    _validate(ann)
    root = ET.Element("proprietary", {"source": ann.doc_source})
    paragraph_order: list[str] = []
    for entry in ann.entries:
        for ref in entry.paragraph_refs:
            if ref not in paragraph_order:
                paragraph_order.append(ref)
    for ref in paragraph_order:
        source = ET.SubElement(root, f"{{{AKN4UN_NS}}}source", {"href": f"#{ref}"})
        for entry in ann.entries:
            if ref in entry.paragraph_refs:
                ET.SubElement(
                    source,
                    f"{{{AKN4UN_NS}}}sdgTarget",
                    {
                        "value": entry.sdg_key,
                        "confidence": format_confidence(entry.confidences[ref]),
                        "name": ann.dictionary,
                    },
                )
    return serialize(root)


def emit_all(ann: AknAnnotation) -> str:
    """All three fragments, classification first, concepts, then proprietary."""
    return "\n".join(
        (emit_classification(ann), emit_tlc_concepts(ann), emit_proprietary(ann))
    )


def _prefixed(tag: str) -> str:
    if tag.startswith("{"):
        uri, _, local = tag[1:].partition("}")
        prefix = _NS_PREFIXES.get(uri)
        if prefix is None:
            raise ValueError(f"unknown namespace: {uri}")
        return f"{prefix}:{local}"
    return tag


def _escape_attr(value: str) -> str:
    return (
        value.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _used_namespaces(elem: ET.Element) -> list[str]:
    uris = []
    for node in elem.iter():
        if node.tag.startswith("{"):
            uri = node.tag[1:].split("}", 1)[0]
            if uri not in uris:
                uris.append(uri)
    return uris


def serialize(elem: ET.Element) -> str:
    """Canonical rendering: 2-space indent, attributes in stored order.

    Whitespace-only text is ignored, so re-serializing a parsed fragment is
    byte-identical to the original emission.
    """
    lines: list[str] = []

    def render(node: ET.Element, depth: int, ns_decls: list[str]) -> None:
        indent = "  " * depth
        parts = [f'{key_}="{_escape_attr(val)}"' for key_, val in node.attrib.items()]
        parts += [f'xmlns:{_NS_PREFIXES[uri]}="{uri}"' for uri in ns_decls]
        attrs = (" " + " ".join(parts)) if parts else ""
        children = list(node)
        if node.text and node.text.strip():
            raise ValueError("fragments carry data in attributes only")
        if not children:
            lines.append(f"{indent}<{_prefixed(node.tag)}{attrs}/>")
        else:
            lines.append(f"{indent}<{_prefixed(node.tag)}{attrs}>")
            for child in children:
                render(child, depth + 1, [])
            lines.append(f"{indent}</{_prefixed(node.tag)}>")

    render(elem, 0, _used_namespaces(elem))
    return "\n".join(lines) + "\n"


def reserialize(xml_text: str) -> str:
    """Parse a fragment and render it through the canonical serializer."""
    return serialize(ET.fromstring(xml_text))
