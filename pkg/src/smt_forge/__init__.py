"""Build engine for interactive logic-modeling tutorials.

Markdown documents with executable SMT code blocks compile into a fully
static site: snippets run at build time through configured external
runners, outputs land in a content-addressed cache, and a solver-backed
game engine judges "guess the secret formula" answers.
"""

__version__ = "0.1.0"
