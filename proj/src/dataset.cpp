#include "belltree/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "belltree/errors.hpp"
#include "belltree/rng.hpp"

namespace fs = std::filesystem;

namespace belltree {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool parse_double(const std::string& cell, double& out) {
    std::string t = trim(cell);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

// Splits one CSV line; handles double-quoted cells with embedded commas.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string csv_quote(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

// Shortest decimal form that parses back to exactly the same double.
std::string format_value(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    for (int prec = 1; prec <= 17; ++prec) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        if (parse_double(buf, back) && back == v) return buf;
    }
    return "0";
}

bool is_target_name(const std::string& column, const std::string& override_name) {
    if (!override_name.empty()) return to_lower(column) == to_lower(override_name);
    std::string low = to_lower(column);
    return low == "bug" || low == "bugs" || low == "defects";
}

} // namespace

int MetricSchema::feature_index(const std::string& name) const {
    auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end()) return -1;
    return static_cast<int>(it - feature_names.begin());
}

size_t ProjectDataset::defective_count() const {
    return static_cast<size_t>(std::count_if(instances.begin(), instances.end(),
                                             [](const Instance& z) { return z.defective; }));
}

double ProjectDataset::defect_ratio() const {
    if (instances.empty()) return 0.0;
    return static_cast<double>(defective_count()) / static_cast<double>(instances.size());
}

bool ProjectDataset::has_both_classes() const {
    size_t d = defective_count();
    return d > 0 && d < instances.size();
}

std::vector<double> ProjectDataset::feature_column(int feature_idx) const {
    std::vector<double> col;
    col.reserve(instances.size());
    for (const auto& z : instances) col.push_back(z.features[static_cast<size_t>(feature_idx)]);
    return col;
}

std::vector<double> ProjectDataset::feature_stddevs() const {
    const size_t d = schema.feature_names.size();
    const size_t n = instances.size();
    std::vector<double> sd(d, 0.0);
    if (n == 0) return sd;
    for (size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (const auto& z : instances) mean += z.features[j];
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (const auto& z : instances) {
            double dv = z.features[j] - mean;
            ss += dv * dv;
        }
        sd[j] = std::sqrt(ss / static_cast<double>(n));
    }
    return sd;
}

ProjectDataset ProjectDataset::restricted_to(const std::vector<std::string>& features) const {
    std::vector<int> idx;
    idx.reserve(features.size());
    for (const auto& f : features) {
        int i = schema.feature_index(f);
        if (i < 0) fail(Err::IncompatibleSchemas, "feature '" + f + "' missing from " + name);
        idx.push_back(i);
    }
    ProjectDataset out;
    out.name = name;
    out.schema = schema;
    out.schema.feature_names = features;
    out.instances.reserve(instances.size());
    for (const auto& z : instances) {
        Instance r = z;
        std::vector<double> vals;
        vals.reserve(idx.size());
        for (int i : idx) vals.push_back(z.features[static_cast<size_t>(i)]);
        r.features = std::move(vals);
        out.instances.push_back(std::move(r));
    }
    return out;
}

ProjectDataset load_csv(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) fail(Err::IoError, "cannot open '" + path + "'");

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) fail(Err::EmptyDataset, "'" + path + "' has no header row");
    if (rows.size() == 1) fail(Err::EmptyDataset, "'" + path + "' has no data rows");

    std::vector<std::string> header;
    for (auto& h : rows.front()) header.push_back(trim(h));
    const size_t ncol = header.size();
    const size_t nrow = rows.size() - 1;
    for (size_t r = 1; r <= nrow; ++r) {
        if (rows[r].size() != ncol)
            fail(Err::IoError, "'" + path + "' row " + std::to_string(r) + " has " +
                                   std::to_string(rows[r].size()) + " cells, expected " +
                                   std::to_string(ncol));
    }

    MetricSchema schema;
    if (options.schema_hint) {
        schema = *options.schema_hint;
        auto require_column = [&](const std::string& c) {
            if (std::find(header.begin(), header.end(), c) == header.end())
                fail(Err::InvalidParameter, "hinted column '" + c + "' not in '" + path + "'");
        };
        for (const auto& f : schema.feature_names) require_column(f);
        for (const auto& f : schema.identifier_columns) require_column(f);
        require_column(schema.target_column);
    } else {
        // Target by name, then classify the rest by majority numeric parse.
        int target_idx = -1;
        for (size_t c = 0; c < ncol; ++c) {
            if (is_target_name(header[c], options.target_override)) {
                target_idx = static_cast<int>(c);
                break;
            }
        }
        if (target_idx < 0)
            fail(Err::MissingTargetColumn,
                 "no defect column (bug/bugs/defects) in '" + path + "'");
        schema.target_column = header[static_cast<size_t>(target_idx)];
        for (size_t c = 0; c < ncol; ++c) {
            if (static_cast<int>(c) == target_idx) continue;
            size_t numeric = 0;
            for (size_t r = 1; r <= nrow; ++r) {
                double v;
                if (parse_double(rows[r][c], v)) ++numeric;
            }
            if (numeric * 2 > nrow)
                schema.feature_names.push_back(header[c]);
            else
                schema.identifier_columns.push_back(header[c]);
        }
        if (schema.feature_names.empty())
            fail(Err::IncompatibleSchemas, "'" + path + "' has no numeric feature columns");
    }

    auto column_index = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        return static_cast<size_t>(it - header.begin());
    };
    std::vector<size_t> feat_idx, id_idx;
    for (const auto& f : schema.feature_names) feat_idx.push_back(column_index(f));
    for (const auto& f : schema.identifier_columns) id_idx.push_back(column_index(f));
    const size_t target_col = column_index(schema.target_column);

    ProjectDataset data;
    data.name = fs::path(path).stem().string();
    data.schema = schema;
    data.instances.reserve(nrow);
    for (size_t r = 1; r <= nrow; ++r) {
        Instance z;
        z.features.reserve(feat_idx.size());
        for (size_t j = 0; j < feat_idx.size(); ++j) {
            double v;
            if (!parse_double(rows[r][feat_idx[j]], v))
                fail(Err::NonNumericFeature, "cell '" + trim(rows[r][feat_idx[j]]) +
                                                 "' in column '" + schema.feature_names[j] +
                                                 "', row " + std::to_string(r) + " of '" + path + "'");
            z.features.push_back(v);
        }
        double target;
        if (!parse_double(rows[r][target_col], target) || target < 0.0 ||
            std::abs(target - std::round(target)) > 1e-9)
            fail(Err::NonNumericFeature, "cell '" + trim(rows[r][target_col]) +
                                             "' in target column '" + schema.target_column +
                                             "', row " + std::to_string(r) + " of '" + path + "'");
        z.defect_count = static_cast<int>(std::llround(target));
        z.defective = z.defect_count >= 1;
        for (size_t j : id_idx) z.id_cells.push_back(trim(rows[r][j]));
        z.identifier = data.name + "#" + std::to_string(r);
        if (!z.id_cells.empty()) {
            z.identifier += ":";
            for (size_t j = 0; j < z.id_cells.size(); ++j) {
                if (j) z.identifier += "|";
                z.identifier += z.id_cells[j];
            }
        }
        data.instances.push_back(std::move(z));
    }
    return data;
}

void save_csv(const ProjectDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Err::IoError, "cannot write '" + path + "'");
    const auto& s = data.schema;
    bool first = true;
    auto emit = [&](const std::string& cell) {
        if (!first) out << ',';
        out << csv_quote(cell);
        first = false;
    };
    for (const auto& c : s.identifier_columns) emit(c);
    for (const auto& c : s.feature_names) emit(c);
    emit(s.target_column);
    out << '\n';
    for (const auto& z : data.instances) {
        first = true;
        for (size_t j = 0; j < s.identifier_columns.size(); ++j)
            emit(j < z.id_cells.size() ? z.id_cells[j] : "");
        for (double v : z.features) emit(format_value(v));
        emit(std::to_string(z.defect_count));
        out << '\n';
    }
}

ThreeWaySplit three_way_split(const ProjectDataset& data,
                              const std::array<double, 3>& fractions,
                              uint64_t seed) {
    const size_t n = data.size();
    double sum = fractions[0] + fractions[1] + fractions[2];
    for (double f : fractions)
        if (f < 0.0) fail(Err::InvalidParameter, "negative split fraction");
    if (std::abs(sum - 1.0) > 1e-9) fail(Err::InvalidParameter, "split fractions must sum to 1");
    if (n == 0) fail(Err::EmptyDataset, "cannot split empty dataset " + data.name);

    // Whole-dataset part quotas by largest remainder.
    std::array<size_t, 3> quota{};
    std::array<double, 3> remainder{};
    size_t assigned_total = 0;
    for (int k = 0; k < 3; ++k) {
        double ideal = static_cast<double>(n) * fractions[k];
        quota[k] = static_cast<size_t>(std::floor(ideal + 1e-12));
        remainder[k] = ideal - static_cast<double>(quota[k]);
        assigned_total += quota[k];
    }
    for (size_t left = n - assigned_total; left > 0; --left) {
        int best = 0;
        for (int k = 1; k < 3; ++k)
            if (remainder[k] > remainder[best] + 1e-12) best = k;
        quota[best] += 1;
        remainder[best] = -1.0;
    }
    for (int k = 0; k < 3; ++k)
        if (quota[k] == 0)
            fail(Err::TooFewInstances, "split part " + std::to_string(k) + " of " + data.name +
                                           " would be empty");

    // Stratify on the defective flag.
    std::vector<size_t> by_class[2];
    for (size_t i = 0; i < n; ++i) by_class[data.instances[i].defective ? 1 : 0].push_back(i);
    if (by_class[0].empty() || by_class[1].empty())
        fail(Err::TooFewInstances, data.name + " has a single class; stratified split impossible");
    for (int c = 0; c < 2; ++c)
        if (by_class[c].size() < 3)
            fail(Err::TooFewInstances, data.name + " has only " +
                                           std::to_string(by_class[c].size()) +
                                           " instances of one class; each part needs at least one");

    Rng rng(seed);
    shuffle_indices(by_class[1], rng);
    shuffle_indices(by_class[0], rng);

    // Per-class allocation: floors first, then leftover seats to the part with
    // the largest remainder that still has quota capacity.
    std::array<size_t, 3> filled{};
    size_t alloc[2][3];
    for (int c : {1, 0}) {
        size_t nc = by_class[static_cast<size_t>(c)].size();
        std::array<double, 3> rem{};
        size_t placed = 0;
        for (int k = 0; k < 3; ++k) {
            double ideal = static_cast<double>(nc) * fractions[k];
            alloc[c][k] = static_cast<size_t>(std::floor(ideal + 1e-12));
            rem[k] = ideal - static_cast<double>(alloc[c][k]);
            filled[k] += alloc[c][k];
            placed += alloc[c][k];
        }
        for (size_t left = nc - placed; left > 0; --left) {
            int best = -1;
            for (int k = 0; k < 3; ++k) {
                if (filled[k] >= quota[k]) continue;
                if (best < 0 || rem[k] > rem[best] + 1e-12) best = k;
            }
            if (best < 0) {
                for (int k = 0; k < 3; ++k)
                    if (filled[k] < quota[k]) { best = k; break; }
            }
            alloc[c][best] += 1;
            filled[best] += 1;
            rem[best] = -1.0;
        }
    }
    // Guard against per-class seats exceeding quotas: shift overflow to parts
    // with spare capacity (classes are processed defective-first, so the
    // second class absorbs the adjustment).
    for (int k = 0; k < 3; ++k) {
        while (filled[k] > quota[k]) {
            int spare = -1;
            for (int j = 0; j < 3; ++j)
                if (filled[j] < quota[j]) { spare = j; break; }
            int donor = alloc[0][k] > 0 ? 0 : 1;
            alloc[donor][k] -= 1;
            alloc[donor][spare] += 1;
            filled[k] -= 1;
            filled[spare] += 1;
        }
    }

    std::array<std::vector<size_t>, 3> part_rows;
    for (int c : {1, 0}) {
        const auto& order = by_class[static_cast<size_t>(c)];
        size_t pos = 0;
        for (int k = 0; k < 3; ++k)
            for (size_t i = 0; i < alloc[c][k]; ++i) part_rows[k].push_back(order[pos++]);
    }

    auto make_part = [&](int k, const char* tag) {
        ProjectDataset part;
        part.name = data.name + "[" + tag + "]";
        part.schema = data.schema;
        std::sort(part_rows[k].begin(), part_rows[k].end());
        part.instances.reserve(part_rows[k].size());
        for (size_t i : part_rows[k]) part.instances.push_back(data.instances[i]);
        return part;
    };
    ThreeWaySplit split;
    split.planner_train = make_part(0, "planner");
    split.oracle_train = make_part(1, "oracle");
    split.test = make_part(2, "test");
    return split;
}

void align_schemas(std::vector<ProjectDataset>& datasets) {
    if (datasets.empty()) return;
    std::vector<std::string> common;
    for (const auto& f : datasets.front().schema.feature_names) {
        bool everywhere = true;
        for (size_t i = 1; i < datasets.size() && everywhere; ++i)
            everywhere = datasets[i].schema.feature_index(f) >= 0;
        if (everywhere) common.push_back(f);
    }
    if (common.empty())
        fail(Err::IncompatibleSchemas, "projects share no feature columns");
    for (auto& ds : datasets)
        if (ds.schema.feature_names != common) ds = ds.restricted_to(common);
}

std::vector<ProjectDataset> load_project_family(const std::string& directory,
                                                const LoadOptions& options) {
    if (!fs::is_directory(directory)) fail(Err::IoError, "'" + directory + "' is not a directory");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.size() < 2)
        fail(Err::FewerThanTwoProjects, "'" + directory + "' holds " +
                                            std::to_string(files.size()) + " csv file(s)");
    std::vector<ProjectDataset> family;
    family.reserve(files.size());
    for (const auto& f : files) family.push_back(load_csv(f, options));
    align_schemas(family);
    return family;
}

} // namespace belltree
