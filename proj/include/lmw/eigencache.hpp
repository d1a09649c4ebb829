#pragma once
#include <filesystem>
#include <string>

#include "lmw/modsym.hpp"

// Text persistence for eigensystems.  The encoding is line-oriented and
// versioned: a "EIGSYS 1" header, the level, form count, table depth, and
// validated precision, then one block per form carrying the sign, the
// harmonic weight when known, the level eigenvalue with its snap deviation,
// and the full lambda table.  Every floating-point field is written with 15
// significant digits, which reparses to the identical decimal string, so
// parse and serialize are mutually inverse on well-formed files.  Files are
// written through a sibling temporary and renamed into place, so a reader
// never observes a partial file.

namespace lmw::eigencache {

using arith::u64;

// Fixed text encoding of an eigensystem (format version 1).
std::string serialize(const modsym::EigenSystem& es);

// Inverse of serialize.  Throws std::runtime_error on a missing or foreign
// header, on any format version other than 1 (old versions are rejected,
// never migrated), and on structural damage such as truncated lambda tables
// or misnumbered entries.
modsym::EigenSystem parse(const std::string& text);

// Canonical file name for the (level, n_max) key inside a cache directory.
std::filesystem::path cache_path(const std::filesystem::path& dir, u64 level,
                                 u64 n_max);

// Serializes to "<file>.tmp" in the same directory, then renames over the
// target, creating parent directories as needed.  Throws std::runtime_error
// when the temporary cannot be written.
void save(const modsym::EigenSystem& es, const std::filesystem::path& file);

// Reads and parses a cache file.  Throws std::runtime_error when the file
// is unreadable or fails to parse.  Callers keying files by cache_path
// should check the parsed level and depth against the key they asked for.
modsym::EigenSystem load(const std::filesystem::path& file);

}  // namespace lmw::eigencache
