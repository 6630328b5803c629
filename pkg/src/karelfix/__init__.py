"""Karel DSL toolchain: parser, tracing interpreter, mutations, edit
scripts, trace alignment, and a synthesize/repair search harness."""

__version__ = "0.1.0"
