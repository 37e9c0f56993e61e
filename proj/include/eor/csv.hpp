#pragma once

#include <string>
#include <vector>

#include "eor/core.hpp"

namespace eor {

// Fixed 10-significant-digit formatting; all CLI output goes through this
// so artifacts are diff-able across runs.
std::string formatG10(double v);

std::string sanitizeName(const std::string& name);  // [A-Za-z0-9_] only

// Pool CSV: header id,group,prob[,label]; group names are mapped to
// indices in first-appearance order; label is all-or-nothing per file.
CandidatePool loadPoolCsv(const std::string& path);

struct LoggedQuery {
    std::string query_id;
    CandidatePool pool;  // rows in logged (position-sorted) order
};

// Logged-ranking CSV: header query_id,position,id,group,prob; multiple
// queries per file; duplicate positions within a query are an input error.
std::vector<LoggedQuery> loadLoggedRankingsCsv(const std::string& path);

struct ScoreData {
    std::vector<double> scores;
    std::vector<int> labels;
};

// Calibration CSV: header score,label.
ScoreData loadScoresCsv(const std::string& path);

}  // namespace eor
