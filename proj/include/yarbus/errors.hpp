#pragma once

#include <stdexcept>

namespace yarbus {

// A document that cannot be decoded (bad JSON, missing required field, ...).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Well-formed input that breaks a contract (bad rule mask, goal outside the
// ontology, session-id mismatch, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem trouble: file missing, unreadable, unwritable.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace yarbus
