#pragma once

#include <string>
#include <vector>

namespace qlr {

struct CorpusEntry {
    std::string name;
    std::string source;
};

// Closed well-typed terms, each needing at least two beta steps to normalize.
const std::vector<CorpusEntry>& soundness_corpus();

} // namespace qlr
