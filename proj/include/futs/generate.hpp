#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "futs/syntax.hpp"

namespace futs::gen {

/// Random well-formed sources: closed, prefix-guarded, rates from a small
/// rational pool, cooperation sets over a three-action alphabet. Biased
/// toward choice/prefix over cooperation (3:3:1) to keep state spaces small.
/// Deterministic for a fixed (seed, count, depth).
std::vector<std::string> corpus(Language lang, std::uint64_t seed, std::size_t count, int depth);

/// Corpus file layout: sections joined by lines holding exactly "---".
std::string corpus_to_text(const std::vector<std::string>& sections);
std::vector<std::string> split_corpus(const std::string& text);

}  // namespace futs::gen
