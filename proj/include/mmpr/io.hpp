#pragma once
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>
#include <json.hpp>
#include <mmpr/metrics.hpp>
#include <mmpr/model.hpp>
#include <mmpr/tuner.hpp>

namespace mmpr {

/// Header plus string cells, as read from an RFC-4180 style file.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& text, double& out)
{
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

// shortest text that reads back to the same double
inline std::string format_double(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

} // namespace detail

/**
 * Quoted fields may hold commas, doubled quotes and line breaks. CRLF and LF
 * line endings are both accepted; a UTF-8 BOM is skipped. Blank lines are
 * ignored.
 */
inline CsvTable read_csv(std::istream& in)
{
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);

    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool any = false;  // current record has content
    auto end_field = [&] {
        record.push_back(field);
        field.clear();
    };
    auto end_record = [&] {
        if (any || !field.empty() || !record.empty()) {
            end_field();
            records.push_back(std::move(record));
        }
        record.clear();
        field.clear();
        any = false;
    };
    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        const char ch = text[pos];
        if (quoted) {
            if (ch == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        switch (ch) {
        case '"': quoted = true; any = true; break;
        case ',': end_field(); any = true; break;
        case '\r': break;
        case '\n': end_record(); break;
        default: field += ch; any = true; break;
        }
    }
    if (quoted) throw Error(ErrorClass::data, "MalformedCsv", "unterminated quoted field");
    end_record();

    if (records.empty()) throw Error(ErrorClass::data, "MalformedCsv", "file has no header row");
    CsvTable t;
    t.header = std::move(records.front());
    for (auto& h : t.header) h = detail::trim(h);
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != t.header.size())
            throw Error(ErrorClass::data, "MalformedCsv",
                        "row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                            " fields, header has " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(records[r]));
    }
    return t;
}

struct IngestResult
{
    Dataset data;
    int filled = 0;  // empty cells replaced by 0
};

/// Numeric dataset from a table; rows are numbered from 1 in errors.
inline IngestResult ingest_table(const CsvTable& table, const std::string& response, bool fill_zero)
{
    std::size_t ycol = table.header.size();
    for (std::size_t j = 0; j < table.header.size(); ++j)
        if (table.header[j] == response) ycol = j;
    if (ycol == table.header.size()) throw MissingColumn(response);
    if (table.rows.empty()) throw DimensionMismatch("no data rows");
    if (table.header.size() < 2) throw DimensionMismatch("no covariate columns besides the response");

    const auto n = static_cast<Index>(table.rows.size());
    const auto p = static_cast<Index>(table.header.size() - 1);
    IngestResult out;
    out.data.X.resize(n, p);
    out.data.y.resize(n);
    for (std::size_t j = 0; j < table.header.size(); ++j)
        if (j != ycol) out.data.names.push_back(table.header[j]);

    for (Index l = 0; l < n; ++l) {
        const auto& row = table.rows[static_cast<std::size_t>(l)];
        Index k = 0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            double v = 0.0;
            if (detail::trim(row[j]).empty()) {
                if (!fill_zero) throw MissingValue(static_cast<std::size_t>(l) + 1, table.header[j]);
                ++out.filled;
            } else if (!detail::parse_double(row[j], v)) {
                throw NonNumericCell(static_cast<std::size_t>(l) + 1, table.header[j], row[j]);
            }
            if (j == ycol) out.data.y(l) = v;
            else out.data.X(l, k++) = v;
        }
    }
    out.data.validate();
    return out;
}

inline IngestResult ingest_csv(const std::string& path, const std::string& response, bool fill_zero = false)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorClass::data, "FileNotFound", "cannot open " + path);
    return ingest_table(read_csv(in), response, fill_zero);
}

/// Covariates in name order, then the response column.
inline void write_dataset_csv(std::ostream& out, const Dataset& data, const std::string& response = "y")
{
    for (const auto& nm : data.names) out << detail::csv_quote(nm) << ',';
    out << detail::csv_quote(response) << '\n';
    for (Index l = 0; l < data.n(); ++l) {
        for (Index k = 0; k < data.p(); ++k) out << detail::format_double(data.X(l, k)) << ',';
        out << detail::format_double(data.y(l)) << '\n';
    }
}

inline const std::vector<std::string>& path_csv_columns()
{
    static const std::vector<std::string> cols{"lambda", "omega", "model", "covariate", "coefficient",
                                               "sse", "max_similarity", "converged", "omega_capped"};
    return cols;
}

/// Long format, one row per (lambda, model, covariate). Models are numbered from 1.
inline void write_path_csv(std::ostream& out, const PathResult& path, const StandardizedDesign& design,
                           Scale scale = Scale::standardized)
{
    const auto& cols = path_csv_columns();
    for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << cols[j];
    out << '\n';
    for (const auto& rec : path.records) {
        const Matrix beta = scale == Scale::raw ? destandardize(rec.coef, design).coef.beta : rec.coef.beta;
        for (Index i = 0; i < beta.rows(); ++i)
            for (Index k = 0; k < beta.cols(); ++k)
                out << detail::format_double(rec.lambda) << ',' << detail::format_double(rec.omega) << ','
                    << i + 1 << ',' << detail::csv_quote(design.names[static_cast<std::size_t>(k)]) << ','
                    << detail::format_double(beta(i, k)) << ','
                    << detail::format_double(rec.per_model_sse(i)) << ','
                    << detail::format_double(rec.max_pairwise_similarity) << ','
                    << (rec.converged ? "true" : "false") << ',' << (rec.omega_capped ? "true" : "false")
                    << '\n';
    }
}

namespace detail {

inline nlohmann::json matrix_json(const Matrix& m)
{
    auto rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix json_matrix(const nlohmann::json& j)
{
    const auto r = static_cast<Index>(j.size());
    const auto c = r ? static_cast<Index>(j.at(0).size()) : Index{0};
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        if (static_cast<Index>(j.at(static_cast<std::size_t>(i)).size()) != c)
            throw Error(ErrorClass::data, "MalformedJson", "ragged coefficient matrix");
        for (Index k = 0; k < c; ++k)
            m(i, k) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
    }
    return m;
}

inline nlohmann::json vector_json(const Vector& v)
{
    auto a = nlohmann::json::array();
    for (Index k = 0; k < v.size(); ++k) a.push_back(v(k));
    return a;
}

inline Vector json_vector(const nlohmann::json& j)
{
    Vector v(static_cast<Index>(j.size()));
    for (Index k = 0; k < v.size(); ++k) v(k) = j.at(static_cast<std::size_t>(k)).get<double>();
    return v;
}

} // namespace detail

/// Path records with coefficients on both scales; the standardized block is what path_from_json reads.
inline nlohmann::json path_to_json(const PathResult& path, const StandardizedDesign& design)
{
    nlohmann::json j;
    j["covariates"] = design.names;
    j["records"] = nlohmann::json::array();
    for (const auto& rec : path.records) {
        const RawFit raw = destandardize(rec.coef, design);
        nlohmann::json r;
        r["lambda"] = rec.lambda;
        r["omega"] = rec.omega;
        r["max_similarity"] = rec.max_pairwise_similarity;
        r["objective"] = rec.objective;
        r["converged"] = rec.converged;
        r["omega_capped"] = rec.omega_capped;
        r["monotone_violation"] = rec.monotone_violation;
        r["sweeps"] = rec.sweeps;
        r["sse"] = detail::vector_json(rec.per_model_sse);
        r["coefficients"] = nlohmann::json::array(
            {{{"scale", to_string(Scale::standardized)}, {"beta", detail::matrix_json(rec.coef.beta)}},
             {{"scale", to_string(Scale::raw)},
              {"beta", detail::matrix_json(raw.coef.beta)},
              {"intercepts", detail::vector_json(raw.intercepts)}}});
        j["records"].push_back(std::move(r));
    }
    return j;
}

inline PathResult path_from_json(const nlohmann::json& j)
{
    PathResult path;
    try {
        for (const auto& r : j.at("records")) {
            PathRecord rec;
            rec.lambda = r.at("lambda").get<double>();
            rec.omega = r.at("omega").get<double>();
            rec.max_pairwise_similarity = r.at("max_similarity").get<double>();
            rec.objective = r.at("objective").get<double>();
            rec.converged = r.at("converged").get<bool>();
            rec.omega_capped = r.at("omega_capped").get<bool>();
            rec.monotone_violation = r.value("monotone_violation", false);
            rec.sweeps = r.value("sweeps", 0);
            rec.per_model_sse = detail::json_vector(r.at("sse"));
            bool found = false;
            for (const auto& block : r.at("coefficients")) {
                if (block.at("scale").get<std::string>() != to_string(Scale::standardized)) continue;
                rec.coef.beta = detail::json_matrix(block.at("beta"));
                rec.coef.scale = Scale::standardized;
                found = true;
            }
            if (!found) throw Error(ErrorClass::data, "MalformedJson", "record lacks standardized coefficients");
            path.records.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorClass::data, "MalformedJson", e.what());
    }
    return path;
}

inline nlohmann::json inclusion_to_json(const InclusionTable& t, const std::vector<std::string>& names)
{
    return {{"covariates", names},
            {"replicates", t.replicates},
            {"zero_tol", t.zero_tol},
            {"proportions", detail::matrix_json(t.proportions)},
            {"any_model", detail::vector_json(t.any_model)},
            {"max_over_models", detail::vector_json(t.max_over_models)}};
}

/// Rows model,covariate,proportion; the label-free summaries use model "any" and "max".
inline void write_inclusion_csv(std::ostream& out, const InclusionTable& t, const std::vector<std::string>& names)
{
    out << "model,covariate,proportion\n";
    for (Index i = 0; i < t.proportions.rows(); ++i)
        for (Index k = 0; k < t.proportions.cols(); ++k)
            out << i + 1 << ',' << detail::csv_quote(names[static_cast<std::size_t>(k)]) << ','
                << detail::format_double(t.proportions(i, k)) << '\n';
    for (Index k = 0; k < t.any_model.size(); ++k)
        out << "any," << detail::csv_quote(names[static_cast<std::size_t>(k)]) << ','
            << detail::format_double(t.any_model(k)) << '\n';
    for (Index k = 0; k < t.max_over_models.size(); ++k)
        out << "max," << detail::csv_quote(names[static_cast<std::size_t>(k)]) << ','
            << detail::format_double(t.max_over_models(k)) << '\n';
}

inline nlohmann::json diversity_to_json(const DiversityReport& rep)
{
    return {{"coef_similarity", detail::matrix_json(rep.coef_similarity)},
            {"pred_correlation", detail::matrix_json(rep.pred_correlation)},
            {"per_model_mse", detail::vector_json(rep.per_model_mse)},
            {"per_model_sse", detail::vector_json(rep.per_model_sse)}};
}

/// Rows metric,i,j,value with 1-based model indices; per-model rows leave j empty.
inline void write_diversity_csv(std::ostream& out, const DiversityReport& rep)
{
    out << "metric,i,j,value\n";
    const Index m = rep.coef_similarity.rows();
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j)
            out << "coef_similarity," << i + 1 << ',' << j + 1 << ','
                << detail::format_double(rep.coef_similarity(i, j)) << '\n';
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j)
            out << "pred_correlation," << i + 1 << ',' << j + 1 << ','
                << detail::format_double(rep.pred_correlation(i, j)) << '\n';
    for (Index i = 0; i < m; ++i)
        out << "mse," << i + 1 << ",," << detail::format_double(rep.per_model_mse(i)) << '\n';
    for (Index i = 0; i < m; ++i)
        out << "sse," << i + 1 << ",," << detail::format_double(rep.per_model_sse(i)) << '\n';
}

} // namespace mmpr
