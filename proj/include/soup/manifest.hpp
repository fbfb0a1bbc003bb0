#pragma once

#include <string>

#include "soup/proof.hpp"

namespace soup {

// Serializes a proof to the line-oriented manifest format.  Deterministic:
// equal proofs produce byte-identical text.
std::string serialize_manifest(const UnitProof& proof);

// Parses manifest text; throws InputError with a line number on malformed
// input (unknown section, bound < 1, missing harness fence, ...).
UnitProof parse_manifest(const std::string& text);

// The initializer grammar used inside manifests, reusable on its own
// (e.g. "nondet u32", "alloc u8 size nondet 1 16 as buf_size").
std::string initspec_to_text(const InitSpec& spec);
InitSpec initspec_from_text(const std::string& text);

// One "pre <category> <subject> <rel> ..." line, without the "pre" keyword
// being optional; used for proposals exchanged with resolvers.
std::string precondition_to_text(const PreconditionTerm& term);
PreconditionTerm precondition_from_text(const std::string& line);

} // namespace soup
