#pragma once

#include <string>
#include <vector>

#include "bs/pipeline.hpp"

namespace bs {

// One identity of the golden corpus. Expressions are read from files next to
// the manifest; rhs may be empty for single-sided entries.
struct CorpusEntry {
    std::string name;
    std::string lhs, rhs;  // expression text
    nlohmann::json expect;
    std::string provenance;  // where the expected artifact comes from
    bool slow = false;
    std::string note;
};

struct CorpusOutcome {
    std::string name;
    bool passed = false;
    std::string status;                // prove status, or "CHECKED"
    std::vector<std::string> failures;  // one line per failed expectation
    double seconds = 0;
};

// Reads dir/corpus.json.
std::vector<CorpusEntry> load_corpus(const std::string& dir);

CorpusOutcome run_entry(const CorpusEntry& e, const PipelineBudget& budget = {}, Cache* cache = nullptr);
std::vector<CorpusOutcome> run_corpus(const std::vector<CorpusEntry>& entries, const PipelineBudget& budget,
                                      Cache* cache, int jobs = 1);

nlohmann::json to_json(const CorpusOutcome& o);

// Whole file if the argument names one, else the argument itself.
std::string read_expression(const std::string& arg);

}  // namespace bs
