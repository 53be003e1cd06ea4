#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ugwkit/geometry.hpp"
#include "ugwkit/measures.hpp"

namespace ugwkit {

using json = nlohmann::json;

// Numeric table with named columns; written as CSV or as a JSON array of row objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row);
    std::vector<double> column(const std::string& name) const;
    json to_json() const;
};

std::string format_number(double v);

Mat read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Mat& m);
Vec read_vector(const std::string& path);
void write_vector(const std::string& path, const Vec& v);

MmSpace mmspace_from_json(const json& j);
json mmspace_to_json(const MmSpace& x);
MmSpace read_mmspace(const std::string& path);  // JSON document
MmSpace read_mmspace_csv(const std::string& dist_path, const std::string& weights_path);
void write_mmspace(const std::string& path, const MmSpace& x);

WeightedGraph graph_from_json(const json& j);
json graph_to_json(const WeightedGraph& g);
void write_point_cloud_csv(const std::string& path, const PointCloud& pc);
PointCloud read_point_cloud_csv(const std::string& path);

void write_table(const std::string& path, const Table& t, const std::string& format);
void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);

// "inf" / "infinity" map to +inf.
double parse_real(const std::string& s);

}  // namespace ugwkit
