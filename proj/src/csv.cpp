#include "eor/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace eor {

std::string formatG10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string sanitizeName(const std::string& name) {
    std::string out;
    for (char c : name)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out.empty() ? std::string("_") : out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> splitCsvLine(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parseDouble(const std::string& s, const std::string& what, std::size_t line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw CsvError("line " + std::to_string(line_no) + ": cannot parse " + what + " '" +
                       s + "'");
    }
}

long parseLong(const std::string& s, const std::string& what, std::size_t line_no) {
    try {
        std::size_t used = 0;
        long v = std::stol(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw CsvError("line " + std::to_string(line_no) + ": cannot parse " + what + " '" +
                       s + "'");
    }
}

std::vector<std::string> readLines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

CandidatePool loadPoolCsv(const std::string& path) {
    auto lines = readLines(path);
    if (lines.empty()) throw CsvError("'" + path + "' is empty");
    auto header = splitCsvLine(lines[0]);
    bool with_label = false;
    if (header.size() == 4 && header[3] == "label") with_label = true;
    else if (header.size() != 3)
        throw CsvError("line 1: expected header id,group,prob[,label]");
    if (header[0] != "id" || header[1] != "group" || header[2] != "prob")
        throw CsvError("line 1: expected header id,group,prob[,label]");

    std::vector<Candidate> cands;
    std::vector<std::string> group_names;
    std::map<std::string, int> group_index;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        auto f = splitCsvLine(lines[ln]);
        if (f.size() != header.size())
            throw CsvError("line " + std::to_string(ln + 1) + ": expected " +
                           std::to_string(header.size()) + " fields, got " +
                           std::to_string(f.size()));
        Candidate c;
        c.id = f[0];
        auto it = group_index.find(f[1]);
        if (it == group_index.end()) {
            it = group_index.emplace(f[1], static_cast<int>(group_names.size())).first;
            group_names.push_back(f[1]);
        }
        c.group = it->second;
        c.prob = parseDouble(f[2], "prob", ln + 1);
        if (!(c.prob >= 0.0 && c.prob <= 1.0))
            throw CsvError("line " + std::to_string(ln + 1) + ": prob out of [0,1]");
        if (with_label) {
            long l = parseLong(f[3], "label", ln + 1);
            if (l != 0 && l != 1)
                throw CsvError("line " + std::to_string(ln + 1) + ": label must be 0 or 1");
            c.label = static_cast<int>(l);
        }
        cands.push_back(std::move(c));
    }
    if (cands.empty()) throw CsvError("'" + path + "' has no candidate rows");
    return CandidatePool(std::move(cands), std::move(group_names));
}

std::vector<LoggedQuery> loadLoggedRankingsCsv(const std::string& path) {
    auto lines = readLines(path);
    if (lines.empty()) throw CsvError("'" + path + "' is empty");
    auto header = splitCsvLine(lines[0]);
    if (header != std::vector<std::string>{"query_id", "position", "id", "group", "prob"})
        throw CsvError("line 1: expected header query_id,position,id,group,prob");

    struct Row {
        long position;
        Candidate candidate;
        std::size_t line_no;
        std::string group_name;
    };
    // Queries keep file order; rows keep position order.
    std::vector<std::string> query_order;
    std::map<std::string, std::vector<Row>> queries;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        auto f = splitCsvLine(lines[ln]);
        if (f.size() != 5)
            throw CsvError("line " + std::to_string(ln + 1) + ": expected 5 fields");
        Row row;
        row.line_no = ln + 1;
        row.position = parseLong(f[1], "position", ln + 1);
        if (row.position < 1)
            throw CsvError("line " + std::to_string(ln + 1) + ": position must be >= 1");
        row.candidate.id = f[2];
        row.group_name = f[3];
        row.candidate.prob = parseDouble(f[4], "prob", ln + 1);
        if (!(row.candidate.prob >= 0.0 && row.candidate.prob <= 1.0))
            throw CsvError("line " + std::to_string(ln + 1) + ": prob out of [0,1]");
        if (queries.find(f[0]) == queries.end()) query_order.push_back(f[0]);
        queries[f[0]].push_back(std::move(row));
    }

    std::vector<LoggedQuery> out;
    for (const std::string& qid : query_order) {
        auto& rows = queries[qid];
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.position < b.position; });
        std::set<long> seen;
        for (const Row& r : rows)
            if (!seen.insert(r.position).second)
                throw CsvError("line " + std::to_string(r.line_no) + ": duplicate position " +
                               std::to_string(r.position) + " in query '" + qid + "'");
        std::vector<std::string> group_names;
        std::map<std::string, int> group_index;
        std::vector<Candidate> cands;
        for (Row& r : rows) {
            auto it = group_index.find(r.group_name);
            if (it == group_index.end()) {
                it = group_index.emplace(r.group_name, static_cast<int>(group_names.size())).first;
                group_names.push_back(r.group_name);
            }
            r.candidate.group = it->second;
            cands.push_back(std::move(r.candidate));
        }
        out.push_back(LoggedQuery{qid, CandidatePool(std::move(cands), std::move(group_names))});
    }
    if (out.empty()) throw CsvError("'" + path + "' has no ranking rows");
    return out;
}

ScoreData loadScoresCsv(const std::string& path) {
    auto lines = readLines(path);
    if (lines.empty()) throw CsvError("'" + path + "' is empty");
    auto header = splitCsvLine(lines[0]);
    if (header != std::vector<std::string>{"score", "label"})
        throw CsvError("line 1: expected header score,label");
    ScoreData data;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        auto f = splitCsvLine(lines[ln]);
        if (f.size() != 2)
            throw CsvError("line " + std::to_string(ln + 1) + ": expected 2 fields");
        data.scores.push_back(parseDouble(f[0], "score", ln + 1));
        long l = parseLong(f[1], "label", ln + 1);
        if (l != 0 && l != 1)
            throw CsvError("line " + std::to_string(ln + 1) + ": label must be 0 or 1");
        data.labels.push_back(static_cast<int>(l));
    }
    if (data.scores.empty()) throw CsvError("'" + path + "' has no data rows");
    return data;
}

}  // namespace eor
