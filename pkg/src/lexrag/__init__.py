"""Court-judgment summarization and similar-case retrieval engine.

Pipeline: ingest raw judgment text files, annotate them into structured
records, produce two-step (abstractive then extractive) summaries, index
summary chunks in an exact-cosine vector store, and answer queries through
a retrieval-augmented generation loop. A ROUGE harness evaluates the seven
summarization variants against reference headnotes.
"""

__version__ = "0.1.0"
