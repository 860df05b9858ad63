"""Class taxonomy for `isa` matching.

Two input formats load into the same forest of classes:

* An RDF/XML subset: ``Class`` descriptions identified by ``rdf:about`` or
  ``rdf:ID``, with ``rdfs:subClassOf`` edges and ``rdfs:label`` synonyms.
* Plain lines: ``Child subClassOf Parent`` and ``Class label Synonym``,
  one statement per line, ``#`` comments allowed.

Matching is case-insensitive.  A value belongs to a class when it equals
the class name, one of its synonyms, or matches any descendant class the
same way.  A class absent from the taxonomy degenerates to plain string
equality, so `isa` works (conservatively) without any taxonomy loaded.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set


class TaxonomyError(ValueError):
    """Malformed taxonomy input (bad syntax or a subclass cycle)."""


@dataclass
class Taxonomy:
    parents: Dict[str, str] = field(default_factory=dict)
    synonyms: Dict[str, List[str]] = field(default_factory=dict)
    _classes: Set[str] = field(default_factory=set)

    def add_class(self, name: str) -> None:
        if name:
            self._classes.add(name.lower())

    def add_subclass(self, child: str, parent: str) -> None:
        child, parent = child.lower(), parent.lower()
        if not child or not parent:
            raise TaxonomyError("subclass statement with an empty class name")
        self._classes.update((child, parent))
        self.parents[child] = parent
        self._check_acyclic(child)

    def add_synonym(self, name: str, synonym: str) -> None:
        name = name.lower()
        self._classes.add(name)
        self.synonyms.setdefault(name, [])
        if synonym.lower() not in (s.lower() for s in self.synonyms[name]):
            self.synonyms[name].append(synonym)

    def _check_acyclic(self, start: str) -> None:
        seen, cur = [start], self.parents.get(start)
        while cur is not None:
            if cur in seen:
                raise TaxonomyError(
                    "subclass cycle: %s" % " -> ".join(seen + [cur])
                )
            seen.append(cur)
            cur = self.parents.get(cur)

    def classes(self) -> Set[str]:
        return set(self._classes)

    def descendants(self, name: str) -> Set[str]:
        """The class itself plus everything below it."""
        name = name.lower()
        out = {name}
        grew = True
        while grew:
            grew = False
            for child, parent in self.parents.items():
                if parent in out and child not in out:
                    out.add(child)
                    grew = True
        return out

    def _names_of(self, cls: str) -> Set[str]:
        return {cls} | {s.lower() for s in self.synonyms.get(cls, ())}

    def isa(self, value: str, class_name: str) -> bool:
        """Does the value denote the class or anything beneath it?"""
        if not value:
            return False
        value_l = value.lower()
        class_l = class_name.lower()
        if value_l == class_l:
            return True
        if class_l not in self._classes:
            return False
        for cls in self.descendants(class_l):
            if value_l in self._names_of(cls):
                return True
        return False

    def isa_any(self, value: str, class_names: Iterable[str]) -> bool:
        return any(self.isa(value, name) for name in class_names)


# ---------------------------------------------------------------------------
# loading

_RDF = "{http://www.w3.org/1999/02/22-rdf-syntax-ns#}"
_RDFS = "{http://www.w3.org/2000/01/rdf-schema#}"


def _local_name(uri: str) -> str:
    for sep in ("#", "/"):
        if sep in uri:
            uri = uri.rsplit(sep, 1)[1]
    return uri


def _load_rdf_xml(text: str) -> Taxonomy:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise TaxonomyError("invalid XML: %s" % exc) from None
    tax = Taxonomy()
    for elem in root.iter():
        if not elem.tag.endswith("Class") and not elem.tag.endswith("Description"):
            continue
        name = elem.get(_RDF + "about") or elem.get(_RDF + "ID") or ""
        name = _local_name(name)
        if not name:
            continue
        tax.add_class(name)
        for sub in elem.findall(_RDFS + "subClassOf"):
            parent = sub.get(_RDF + "resource") or ""
            if not parent:
                nested = sub.find("*")
                if nested is not None:
                    parent = nested.get(_RDF + "about") or nested.get(_RDF + "ID") or ""
            if parent:
                tax.add_subclass(name, _local_name(parent))
        for label in elem.findall(_RDFS + "label"):
            if label.text and label.text.strip():
                tax.add_synonym(name, label.text.strip())
    return tax


def _load_lines(text: str) -> Taxonomy:
    tax = Taxonomy()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[1] not in ("subClassOf", "label"):
            raise TaxonomyError(
                "line %d: expected 'Child subClassOf Parent' or "
                "'Class label Synonym', got %r" % (lineno, raw.strip())
            )
        if parts[1] == "subClassOf":
            tax.add_subclass(parts[0], parts[2])
        else:
            tax.add_synonym(parts[0], parts[2])
    return tax


def load_taxonomy(text: str, format: Optional[str] = None) -> Taxonomy:
    """Parse taxonomy text; format is sniffed unless given.

    ``format`` may be ``rdf-xml`` or ``lines``.
    """
    if format is None:
        format = "rdf-xml" if text.lstrip().startswith("<") else "lines"
    if format == "rdf-xml":
        return _load_rdf_xml(text)
    if format == "lines":
        return _load_lines(text)
    raise TaxonomyError("unknown taxonomy format %r" % (format,))
