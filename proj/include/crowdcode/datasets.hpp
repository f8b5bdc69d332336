#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "codebook.hpp"
#include "fusion.hpp"
#include "rng.hpp"

namespace crowdcode {

struct TaskRecord {
    std::string task_id;
    double gold = 0.0;
    std::vector<std::optional<double>> worker_values;  // in [0,100], possibly missing
};

struct EvalReport {
    std::string dataset_name;
    double coding_error_fraction = 0.0;
    double majority_error_fraction = 0.0;
    long task_count = 0;
    std::uint64_t matrix_fingerprint = 0;
};

/// Quantize a [0,100] rating into one of M equal intervals; boundaries belong
/// to the upper interval, 100 clamps into the top class.
inline int quantize(double value, int num_classes) {
    if (value < 0.0 || value > 100.0)
        throw std::invalid_argument("quantize: value " + std::to_string(value) +
                                    " outside [0,100]");
    const int cls = static_cast<int>(std::floor(value * num_classes / 100.0));
    return std::min(cls, num_classes - 1);
}

/// CSV with header task_id,gold,w1,...,wN; an empty cell is a missing answer.
inline std::vector<TaskRecord> load_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("load_csv: empty file");
    std::vector<TaskRecord> records;
    std::size_t expected_cols = 0;
    {
        std::stringstream header(line);
        std::string cell;
        while (std::getline(header, cell, ',')) ++expected_cols;
        if (expected_cols < 3)
            throw std::invalid_argument("load_csv: header must be task_id,gold,w1..wN");
    }
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        // a trailing empty cell is dropped by getline; restore it
        while (cells.size() < expected_cols && !line.empty() && line.back() == ',')
            cells.push_back("");
        if (cells.size() != expected_cols)
            throw std::invalid_argument("load_csv: line " + std::to_string(line_no) +
                                        " has " + std::to_string(cells.size()) +
                                        " cells, expected " + std::to_string(expected_cols));
        auto parse = [&](const std::string& s, const char* what) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(s, &pos);
                if (pos != s.size()) throw std::invalid_argument("trailing characters");
                if (v < 0.0 || v > 100.0) throw std::invalid_argument("out of range");
                return v;
            } catch (const std::exception&) {
                throw std::invalid_argument("load_csv: line " + std::to_string(line_no) +
                                            ": bad " + what + " value '" + s + "'");
            }
        };
        TaskRecord rec;
        rec.task_id = cells[0];
        rec.gold = parse(cells[1], "gold");
        bool any_present = false;
        for (std::size_t c = 2; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                rec.worker_values.push_back(std::nullopt);
            } else {
                rec.worker_values.push_back(parse(cells[c], "worker"));
                any_present = true;
            }
        }
        if (!any_present)
            throw std::invalid_argument("load_csv: line " + std::to_string(line_no) +
                                        ": no worker value present");
        records.push_back(std::move(rec));
    }
    return records;
}

inline std::vector<TaskRecord> load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_csv: cannot open " + path);
    return load_csv(in);
}

/// Table-I pipeline: quantize worker ratings to M classes, fuse once with the
/// code matrix (Hamming) and once with bitwise majority, score both against
/// the quantized gold value. Missing ratings propagate as missing bits on the
/// coding side and are excluded from the bit majorities.
inline EvalReport evaluate_dataset(const std::vector<TaskRecord>& records, const CodeMatrix& a,
                                   const std::vector<int>& group_map, std::uint64_t seed,
                                   const std::string& dataset_name = "") {
    if (records.empty()) throw std::invalid_argument("evaluate_dataset: empty dataset");
    const int n = a.num_workers();
    const int m = a.num_classes();
    if (static_cast<int>(group_map.size()) != n)
        throw std::invalid_argument("evaluate_dataset: group map length mismatch");

    long coding_errors = 0, majority_errors = 0;
    std::mt19937_64 rng = make_engine(seed, 0xd5);
    for (std::size_t t = 0; t < records.size(); ++t) {
        const TaskRecord& rec = records[t];
        if (static_cast<int>(rec.worker_values.size()) != n)
            throw std::invalid_argument("evaluate_dataset: task " + rec.task_id + " has " +
                                        std::to_string(rec.worker_values.size()) +
                                        " workers, matrix expects " + std::to_string(n));
        const int gold = quantize(rec.gold, m);
        AnswerVector coded(n, kMissing), bits(n, kMissing);
        for (int j = 0; j < n; ++j) {
            if (!rec.worker_values[j]) continue;
            const int y = quantize(*rec.worker_values[j], m);
            coded[j] = static_cast<Answer>(a.bit(y, j));
            bits[j] = majority_bit_answer(y, group_map[j], m);
        }
        if (decode_hamming(a, coded, rng).decided_class != gold) ++coding_errors;
        if (decode_majority(m, group_map, bits, rng).decided_class != gold) ++majority_errors;
    }
    EvalReport rep;
    rep.dataset_name = dataset_name;
    rep.task_count = static_cast<long>(records.size());
    rep.coding_error_fraction = static_cast<double>(coding_errors) / records.size();
    rep.majority_error_fraction = static_cast<double>(majority_errors) / records.size();
    rep.matrix_fingerprint = a.fingerprint();
    return rep;
}

}  // namespace crowdcode
