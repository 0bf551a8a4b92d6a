// Ambient stub: @huggingface/transformers is an optional peer dependency,
// imported dynamically at runtime; the exporter must typecheck without it.
declare module "@huggingface/transformers";
