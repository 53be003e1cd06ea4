#include "ugwkit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ugwkit {

void Table::add(std::vector<double> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("row width does not match table columns");
    rows.push_back(std::move(row));
}

std::vector<double> Table::column(const std::string& name) const {
    for (size_t c = 0; c < columns.size(); ++c)
        if (columns[c] == name) {
            std::vector<double> out;
            for (const auto& r : rows) out.push_back(r[c]);
            return out;
        }
    throw std::out_of_range("no column " + name);
}

namespace {

json number_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

double json_real(const json& v) {
    if (v.is_string()) return parse_real(v.get<std::string>());
    return v.get<double>();
}

}  // namespace

json Table::to_json() const {
    json arr = json::array();
    for (const auto& r : rows) {
        json o = json::object();
        for (size_t c = 0; c < columns.size(); ++c) o[columns[c]] = number_json(r[c]);
        arr.push_back(o);
    }
    return arr;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_real(const std::string& s) {
    std::string t;
    for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += static_cast<char>(std::tolower(ch));
    if (t == "inf" || t == "+inf" || t == "infinity") return kInf;
    size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument("not a number: " + s);
    return v;
}

Mat read_matrix_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> r;
        for (const auto& cell : split_csv_line(line)) r.push_back(parse_real(cell));
        if (!rows.empty() && r.size() != rows.front().size()) throw std::runtime_error("ragged matrix in " + path);
        rows.push_back(std::move(r));
    }
    Mat m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

void write_matrix_csv(const std::string& path, const Mat& m) {
    auto out = open_out(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_number(m(i, j));
        out << '\n';
    }
}

Vec read_vector(const std::string& path) {
    auto in = open_in(path);
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        v.push_back(parse_real(line));
    }
    return Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void write_vector(const std::string& path, const Vec& v) {
    auto out = open_out(path);
    for (Eigen::Index i = 0; i < v.size(); ++i) out << format_number(v(i)) << '\n';
}

MmSpace mmspace_from_json(const json& j) {
    const auto& d = j.at("dist");
    const auto& w = j.at("weights");
    const auto n = static_cast<Eigen::Index>(w.size());
    Mat dist(n, n);
    Vec weights(n);
    if (static_cast<Eigen::Index>(d.size()) != n) throw std::invalid_argument("dist and weights sizes differ");
    for (Eigen::Index i = 0; i < n; ++i) {
        weights(i) = json_real(w[i]);
        if (static_cast<Eigen::Index>(d[i].size()) != n) throw std::invalid_argument("dist must be square");
        for (Eigen::Index k = 0; k < n; ++k) dist(i, k) = json_real(d[i][k]);
    }
    return MmSpace(dist, weights, j.value("label", std::string{}));
}

json mmspace_to_json(const MmSpace& x) {
    json d = json::array();
    for (Eigen::Index i = 0; i < x.dist.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < x.dist.cols(); ++k) row.push_back(x.dist(i, k));
        d.push_back(row);
    }
    json w = json::array();
    for (Eigen::Index i = 0; i < x.weights.size(); ++i) w.push_back(x.weights(i));
    return {{"dist", d}, {"weights", w}, {"label", x.label}};
}

MmSpace read_mmspace(const std::string& path) { return mmspace_from_json(read_json(path)); }

MmSpace read_mmspace_csv(const std::string& dist_path, const std::string& weights_path) {
    return MmSpace(read_matrix_csv(dist_path), read_vector(weights_path));
}

void write_mmspace(const std::string& path, const MmSpace& x) { write_json(path, mmspace_to_json(x)); }

WeightedGraph graph_from_json(const json& j) {
    WeightedGraph g;
    g.n = j.at("n").get<int>();
    for (const auto& e : j.at("edges")) g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), json_real(e.at(2))});
    if (j.contains("tags")) g.tags = j.at("tags").get<std::vector<int>>();
    return g;
}

json graph_to_json(const WeightedGraph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges) edges.push_back(json::array({e.i, e.j, e.length}));
    return {{"n", g.n}, {"edges", edges}, {"tags", g.tags}};
}

void write_point_cloud_csv(const std::string& path, const PointCloud& pc) { write_matrix_csv(path, pc.points); }

PointCloud read_point_cloud_csv(const std::string& path) { return {read_matrix_csv(path), {}}; }

void write_table(const std::string& path, const Table& t, const std::string& format) {
    auto out = open_out(path);
    if (format == "json") {
        out << t.to_json().dump(2) << '\n';
        return;
    }
    for (size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
    out << '\n';
    for (const auto& r : t.rows) {
        for (size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_number(r[c]);
        out << '\n';
    }
}

void write_json(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
    auto in = open_in(path);
    return json::parse(in);
}

}  // namespace ugwkit
