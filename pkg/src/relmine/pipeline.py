"""Corpus runs: resource loading and per-document processing with an
optional process pool. Results are merged and sorted deterministically,
so the worker count never changes the output.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .corpus import Document, SegmentationConfig, ingest_text, segment
from .errors import RelmineError
from .grammar import GrammarSet, load_grammar
from .lexicon import Dictionary, EntityMatcher, compile_matcher, load_dictionary
from .ner import EntityMention, extract_entities
from .relate import CoocConfig, RelationInstance, extract_contextual, extract_relations

log = logging.getLogger(__name__)


@dataclass
class Resources:
    dictionaries: list[Dictionary]
    matcher: EntityMatcher
    grammar: GrammarSet | None
    seg_config: SegmentationConfig
    lossy_decode: bool = False


def load_resources(dict_specs: list[tuple[str, str]], grammar_paths: list[str],
                   seg_config: SegmentationConfig | None = None,
                   lossy_decode: bool = False) -> Resources:
    """Parse dictionaries given as (category, path) pairs plus grammar files."""
    dictionaries = [load_dictionary(path, category) for category, path in dict_specs]
    matcher = compile_matcher(dictionaries)
    grammar = load_grammar(grammar_paths) if grammar_paths else None
    return Resources(dictionaries=dictionaries, matcher=matcher, grammar=grammar,
                     seg_config=seg_config or SegmentationConfig(),
                     lossy_decode=lossy_decode)


def corpus_files(corpus_dir: str) -> list[str]:
    names = [n for n in sorted(os.listdir(corpus_dir))
             if n.endswith(".txt") and os.path.isfile(os.path.join(corpus_dir, n))]
    return [os.path.join(corpus_dir, n) for n in names]


def process_document(path: str, resources: Resources) -> tuple[Document, list[EntityMention]]:
    doc_id = os.path.splitext(os.path.basename(path))[0]
    with open(path, "rb") as handle:
        raw = handle.read()
    doc = ingest_text(raw, doc_id, source_path=path, strict=not resources.lossy_decode)
    doc = segment(doc, resources.seg_config, resources.matcher)
    mentions = extract_entities(doc, resources.matcher, resources.grammar)
    return doc, mentions


@dataclass
class CorpusResult:
    documents: list[Document] = field(default_factory=list)
    mentions: list[EntityMention] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)  # (path, error)


_worker_resources: Resources | None = None


def _init_worker(resources: Resources) -> None:
    global _worker_resources
    _worker_resources = resources


def _process_in_worker(path: str):
    try:
        return path, process_document(path, _worker_resources), None
    except (RelmineError, OSError) as exc:
        return path, None, str(exc)


def run_extract(corpus_dir: str, resources: Resources, jobs: int = 1) -> CorpusResult:
    """Extract mentions for every .txt file of a corpus directory."""
    paths = corpus_files(corpus_dir)
    result = CorpusResult()
    if jobs <= 1:
        outcomes = []
        for path in paths:
            try:
                outcomes.append((path, process_document(path, resources), None))
            except (RelmineError, OSError) as exc:
                outcomes.append((path, None, str(exc)))
    else:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(resources,)) as pool:
            outcomes = list(pool.map(_process_in_worker, paths))
    for path, payload, error in outcomes:
        if error is not None:
            log.warning("skipping %s: %s", path, error)
            result.failures.append((path, error))
            continue
        doc, mentions = payload
        result.documents.append(doc)
        result.mentions.extend(mentions)
    result.documents.sort(key=lambda d: d.doc_id)
    result.mentions.sort(key=lambda m: (m.doc_id, m.start_word, -m.length,
                                        m.category, m.canonical))
    return result


def run_relate(result: CorpusResult, cfg: CoocConfig,
               contextual_tags: list[str] | None,
               resources: Resources) -> list[RelationInstance]:
    """Relation extraction over already-processed documents."""
    mentions_by_doc: dict[str, list[EntityMention]] = {}
    for mention in result.mentions:
        mentions_by_doc.setdefault(mention.doc_id, []).append(mention)
    relations: list[RelationInstance] = []
    for doc in result.documents:
        if contextual_tags is not None:
            relations.extend(extract_contextual(doc, contextual_tags,
                                                resources.matcher, resources.grammar))
        else:
            relations.extend(extract_relations(
                doc, mentions_by_doc.get(doc.doc_id, []), cfg))
    relations.sort(key=lambda r: (r.doc_id,
                                  r.evidence_unit if r.evidence_unit is not None else -1,
                                  r.first.start_word, r.second.start_word,
                                  r.first.canonical, r.second.canonical))
    return relations
