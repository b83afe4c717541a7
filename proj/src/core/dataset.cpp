#include "core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/textio.hpp"

namespace stepsvm {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::vector<std::string>> read_csv_cells(const std::string& path) {
    std::string contents = read_file(path);
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(contents);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty())
            continue;
        auto cells = split(line, ',');
        for (auto& c : cells)
            c = trim(c);
        rows.push_back(std::move(cells));
    }
    if (rows.empty())
        throw parse_error("'" + path + "': no data rows");
    return rows;
}

double parse_feature_cell(const std::string& cell, const std::string& path,
                          std::size_t line, std::size_t column) {
    auto v = parse_double(cell);
    if (!v)
        throw parse_error("'" + path + "': non-numeric value '" + cell + "' at line " +
                          std::to_string(line) + ", column " + std::to_string(column));
    if (!std::isfinite(*v))
        throw parse_error("'" + path + "': non-finite value '" + cell + "' at line " +
                          std::to_string(line) + ", column " + std::to_string(column));
    return *v;
}

// Maps label strings to dense ids in first-appearance order.
struct LabelMapper {
    std::vector<std::string> names;
    int id_for(const std::string& text) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == text)
                return static_cast<int>(i);
        names.push_back(text);
        return static_cast<int>(names.size() - 1);
    }
};

bool cells_all_numeric(const std::vector<std::string>& cells, std::size_t skip_index) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i == skip_index)
            continue;
        if (!parse_double(cells[i]))
            return false;
    }
    return true;
}

Dataset load_samples_as_rows(const std::string& path,
                             const std::vector<std::vector<std::string>>& rows,
                             const std::string& label_column) {
    bool unlabeled = label_column == "none";

    // Resolve the label position: an index, or a header name.
    std::size_t label_index = 0;
    bool label_by_name = false;
    if (!unlabeled && !label_column.empty()) {
        try {
            std::size_t pos = 0;
            long idx = std::stol(label_column, &pos);
            if (pos == label_column.size() && idx >= 0) {
                label_index = static_cast<std::size_t>(idx);
            } else {
                label_by_name = true;
            }
        } catch (const std::exception&) {
            label_by_name = true;
        }
    }

    std::size_t skip = unlabeled ? rows[0].size() : label_index;
    bool has_header = label_by_name || !cells_all_numeric(rows[0], skip);
    if (label_by_name) {
        auto it = std::find(rows[0].begin(), rows[0].end(), label_column);
        if (it == rows[0].end())
            throw parse_error("'" + path + "': no header column named '" + label_column + "'");
        label_index = static_cast<std::size_t>(it - rows[0].begin());
    }

    std::size_t width = rows[0].size();
    if (!unlabeled && label_index >= width)
        throw parse_error("'" + path + "': label column index " + std::to_string(label_index) +
                          " out of range for " + std::to_string(width) + " columns");
    std::size_t p = unlabeled ? width : width - 1;
    if (p == 0)
        throw parse_error("'" + path + "': no feature columns");

    Dataset d;
    if (has_header) {
        for (std::size_t j = 0; j < width; ++j)
            if (unlabeled || j != label_index)
                d.feature_names.push_back(rows[0][j]);
    } else {
        for (std::size_t j = 0; j < p; ++j)
            d.feature_names.push_back("f" + std::to_string(j));
    }

    std::size_t first_data = has_header ? 1 : 0;
    std::size_t n = rows.size() - first_data;
    if (n == 0)
        throw parse_error("'" + path + "': header but no data rows");

    d.features = Matrix(n, p);
    LabelMapper mapper;
    for (std::size_t r = 0; r < n; ++r) {
        const auto& cells = rows[first_data + r];
        std::size_t file_line = first_data + r + 1;
        if (cells.size() != width)
            throw parse_error("'" + path + "': line " + std::to_string(file_line) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(width));
        std::size_t jj = 0;
        for (std::size_t j = 0; j < width; ++j) {
            if (!unlabeled && j == label_index)
                continue;
            d.features(r, jj++) = parse_feature_cell(cells[j], path, file_line, j + 1);
        }
        d.labels.push_back(unlabeled ? 0 : mapper.id_for(cells[label_index]));
        d.sample_names.push_back("s" + std::to_string(r));
    }
    d.class_names = unlabeled ? std::vector<std::string>{"all"} : mapper.names;
    return d;
}

Dataset load_features_as_rows(const std::string& path,
                              const std::vector<std::vector<std::string>>& rows,
                              const std::string& label_column) {
    // Layout: header "name,<sample names...>", a label row (first row after
    // the header unless label_column names another row), then one row per
    // feature.
    bool unlabeled = label_column == "none";
    const auto& header = rows[0];
    if (header.size() < 2)
        throw parse_error("'" + path + "': header must list at least one sample");
    std::size_t n = header.size() - 1;
    Dataset d;
    for (std::size_t i = 0; i < n; ++i)
        d.sample_names.push_back(header[i + 1]);

    std::size_t label_row = rows.size(); // sentinel: none
    if (!unlabeled) {
        if (label_column.empty()) {
            label_row = 1;
        } else {
            for (std::size_t r = 1; r < rows.size(); ++r)
                if (!rows[r].empty() && rows[r][0] == label_column) {
                    label_row = r;
                    break;
                }
            if (label_row == rows.size())
                throw parse_error("'" + path + "': no row named '" + label_column + "'");
        }
    }

    std::vector<std::vector<double>> feature_rows;
    LabelMapper mapper;
    std::vector<int> labels;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cells = rows[r];
        std::size_t file_line = r + 1;
        if (cells.size() != n + 1)
            throw parse_error("'" + path + "': line " + std::to_string(file_line) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(n + 1));
        if (r == label_row) {
            for (std::size_t i = 0; i < n; ++i)
                labels.push_back(mapper.id_for(cells[i + 1]));
            continue;
        }
        d.feature_names.push_back(cells[0]);
        std::vector<double> vals(n);
        for (std::size_t i = 0; i < n; ++i)
            vals[i] = parse_feature_cell(cells[i + 1], path, file_line, i + 2);
        feature_rows.push_back(std::move(vals));
    }
    if (!unlabeled && labels.empty())
        throw parse_error("'" + path + "': label row not found");
    if (feature_rows.empty())
        throw parse_error("'" + path + "': no feature rows");

    std::size_t p = feature_rows.size();
    d.features = Matrix(n, p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < n; ++i)
            d.features(i, j) = feature_rows[j][i];
    d.labels = unlabeled ? std::vector<int>(n, 0) : labels;
    d.class_names = unlabeled ? std::vector<std::string>{"all"} : mapper.names;
    return d;
}

} // namespace

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(class_count(), 0);
    for (int c : labels)
        ++counts[static_cast<std::size_t>(c)];
    return counts;
}

Dataset Dataset::subset_rows(std::span<const std::size_t> idx) const {
    Dataset d;
    d.features = features.take_rows(idx);
    d.feature_names = feature_names;
    d.class_names = class_names;
    for (std::size_t i : idx) {
        d.labels.push_back(labels[i]);
        d.sample_names.push_back(sample_names[i]);
    }
    return d;
}

Dataset Dataset::subset_cols(std::span<const std::size_t> idx) const {
    Dataset d;
    d.features = features.take_cols(idx);
    d.labels = labels;
    d.sample_names = sample_names;
    d.class_names = class_names;
    for (std::size_t j : idx)
        d.feature_names.push_back(feature_names[j]);
    return d;
}

void Dataset::validate(bool require_multiclass) const {
    if (n() < 2)
        throw validation_error("dataset needs at least 2 samples");
    if (p() < 1)
        throw validation_error("dataset needs at least 1 feature");
    if (labels.size() != n() || sample_names.size() != n() || feature_names.size() != p())
        throw validation_error("dataset field lengths disagree");
    std::size_t k = class_count();
    if (require_multiclass && k < 2)
        throw validation_error("dataset needs at least 2 classes");
    std::vector<bool> seen(k, false);
    for (int c : labels) {
        if (c < 0 || static_cast<std::size_t>(c) >= k)
            throw validation_error("class id out of range");
        seen[static_cast<std::size_t>(c)] = true;
    }
    for (std::size_t c = 0; c < k; ++c)
        if (!seen[c])
            throw validation_error("class '" + class_names[c] + "' has no samples");
    for (double v : features.data())
        if (!std::isfinite(v))
            throw validation_error("dataset contains non-finite feature values");
    std::set<std::string> fn(feature_names.begin(), feature_names.end());
    if (fn.size() != feature_names.size())
        throw validation_error("feature names are not unique");
    std::set<std::string> sn(sample_names.begin(), sample_names.end());
    if (sn.size() != sample_names.size())
        throw validation_error("sample names are not unique");
}

Dataset load_csv(const std::string& path, CsvOrientation orientation,
                 const std::string& label_column) {
    auto rows = read_csv_cells(path);
    Dataset d = orientation == CsvOrientation::samples_as_rows
                    ? load_samples_as_rows(path, rows, label_column)
                    : load_features_as_rows(path, rows, label_column);
    d.validate(label_column != "none");
    return d;
}

void save_csv(const Dataset& d, const std::string& path, CsvOrientation orientation) {
    std::string out;
    if (orientation == CsvOrientation::samples_as_rows) {
        out += "label";
        for (const auto& f : d.feature_names)
            out += "," + f;
        out += "\n";
        for (std::size_t i = 0; i < d.n(); ++i) {
            out += d.class_names[static_cast<std::size_t>(d.labels[i])];
            for (std::size_t j = 0; j < d.p(); ++j)
                out += "," + format_double(d.features(i, j));
            out += "\n";
        }
    } else {
        out += "name";
        for (const auto& s : d.sample_names)
            out += "," + s;
        out += "\nlabel";
        for (int c : d.labels)
            out += "," + d.class_names[static_cast<std::size_t>(c)];
        out += "\n";
        for (std::size_t j = 0; j < d.p(); ++j) {
            out += d.feature_names[j];
            for (std::size_t i = 0; i < d.n(); ++i)
                out += "," + format_double(d.features(i, j));
            out += "\n";
        }
    }
    write_file(path, out);
}

SplitIndices stratified_half_split(const Dataset& d, std::uint64_t seed) {
    auto counts = d.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] < 2)
            throw validation_error("class '" + d.class_names[c] +
                                   "' has fewer than 2 samples; cannot half-split");
    SplitIndices s;
    s.seed = seed;
    Rng rng(seed);
    for (std::size_t c = 0; c < counts.size(); ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < d.n(); ++i)
            if (d.labels[i] == static_cast<int>(c))
                members.push_back(i);
        rng.shuffle(members);
        std::size_t take = (members.size() + 1) / 2; // ties go to train
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < take ? s.train : s.test).push_back(members[i]);
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

std::pair<Dataset, FeatureStats> standardize(const Dataset& d) {
    FeatureStats stats;
    stats.mean.resize(d.p());
    stats.sd.resize(d.p());
    for (std::size_t j = 0; j < d.p(); ++j) {
        auto col = d.features.col(j);
        auto ms = mean_sd(col);
        stats.mean[j] = ms.mean;
        stats.sd[j] = ms.sd;
    }
    return {standardize_with(d, stats), stats};
}

Dataset standardize_with(const Dataset& d, const FeatureStats& stats) {
    if (stats.mean.size() != d.p() || stats.sd.size() != d.p())
        throw validation_error("standardization stats width mismatch");
    Dataset out = d;
    for (std::size_t j = 0; j < d.p(); ++j) {
        double inv = stats.sd[j] > 0.0 ? 1.0 / stats.sd[j] : 0.0;
        for (std::size_t i = 0; i < d.n(); ++i)
            out.features(i, j) = (d.features(i, j) - stats.mean[j]) * inv;
    }
    return out;
}

SynthResult synth_planted(std::size_t n, std::size_t p, std::size_t n_informative,
                          std::size_t k, double effect, std::uint64_t seed) {
    if (k < 2)
        throw validation_error("synth_planted needs k >= 2");
    if (n < 2 * k)
        throw validation_error("synth_planted needs at least 2 samples per class");
    if (p < 1)
        throw validation_error("synth_planted needs p >= 1");
    if (n_informative > p)
        throw validation_error("synth_planted needs n_informative <= p");

    SynthResult r;
    Rng rng(seed);

    // Scatter the informative columns: partial Fisher-Yates over 0..p-1.
    std::vector<std::size_t> cols(p);
    for (std::size_t j = 0; j < p; ++j)
        cols[j] = j;
    for (std::size_t i = 0; i < n_informative; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(p - i));
        std::swap(cols[i], cols[j]);
    }
    r.informative.assign(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(n_informative));
    std::sort(r.informative.begin(), r.informative.end());

    std::vector<bool> is_informative(p, false);
    for (std::size_t j : r.informative)
        is_informative[j] = true;

    Dataset& d = r.data;
    d.features = Matrix(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        int label = static_cast<int>(i % k);
        d.labels.push_back(label);
        for (std::size_t j = 0; j < p; ++j) {
            double v = rng.next_normal();
            if (is_informative[j])
                v += effect * static_cast<double>(label);
            d.features(i, j) = v;
        }
        d.sample_names.push_back("s" + std::to_string(i));
    }
    for (std::size_t j = 0; j < p; ++j)
        d.feature_names.push_back("f" + std::to_string(j));
    for (std::size_t c = 0; c < k; ++c)
        d.class_names.push_back("c" + std::to_string(c));
    d.validate();
    return r;
}

std::uint64_t dataset_digest(const Dataset& d) {
    Digest dg;
    dg.update_u64(d.n());
    dg.update_u64(d.p());
    dg.update_u64(d.class_count());
    for (int c : d.labels)
        dg.update_u64(static_cast<std::uint64_t>(c));
    for (double v : d.features.data())
        dg.update_double(v);
    for (const auto& s : d.feature_names)
        dg.update_string(s);
    for (const auto& s : d.sample_names)
        dg.update_string(s);
    for (const auto& s : d.class_names)
        dg.update_string(s);
    return dg.value();
}

} // namespace stepsvm
