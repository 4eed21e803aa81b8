"""Entity and relation extraction for semi-structured text corpora.

Pipeline: ingest and segment documents (corpus), match hierarchical
dictionaries (lexicon) and finite-state local grammars (grammar) into
entity mentions (ner), pair mentions by cooccurrence under document
architecture heuristics (relate), evaluate against gold annotations
(metrics) and aggregate corpus-level analytics (analytics).
"""

from .corpus import (Document, ParagraphSplit, SegmentationConfig, TextUnit,
                     Token, UnitKind, ingest_text, segment)
from .grammar import GrammarSet, load_grammar, match_at, parse_grammar, scan
from .lexicon import (Dictionary, DictionaryEntry, EntityMatcher, EntryKind,
                      compile_matcher, load_dictionary, parse_dictionary, stats)
from .ner import EntityMention, MentionSource, extract_entities, resolve_overlaps
from .relate import (INFINITE, CoocConfig, CoocMode, RelationInstance,
                     cooc_constrained, cooc_text_unit, cooc_window,
                     extract_contextual, extract_relations, transform_paragraphs)
from .metrics import (EvalReport, GoldCorpus, GoldFormat, MatchPolicy, f_measure,
                      load_gold, score)
from .analytics import (RelationRow, RelationStore, TestResult, pairwise_tests,
                        parallel_matrix, proportions, saturation_report,
                        timeline, venn_counts)

__version__ = "0.1.0"
