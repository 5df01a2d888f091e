// Shapes of the service responses, mirroring the JSON schema documents
// shipped with the engine. The UI renders these verbatim; it never derives
// scores or weights of its own.
export {};
