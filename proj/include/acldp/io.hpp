#pragma once

// CSV and JSON files. Numbers are written in shortest round-trip form so
// identical results give identical bytes.

#include <string>
#include <vector>

#include <json.hpp>

#include "acldp/flow.hpp"
#include "acldp/spectral.hpp"

namespace acldp {

std::string format_number(double v);

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(std::string const& path, CsvTable const& table);
CsvTable read_csv(std::string const& path);

void write_json(std::string const& path, nlohmann::json const& j);

// Field files: columns xi,value over the interior grid. The boundary class is
// taken from `bc`; the grid must match the domain.
void write_field_csv(std::string const& path, Domain const& d, Field const& f);
Field read_field_csv(std::string const& path, Domain const& d, Boundary bc = Boundary::zero_dirichlet);

// Path files: one row per node, columns t,u1..un on a uniform time grid.
void write_path_csv(std::string const& path, Domain const& d, Path const& p);
Path read_path_csv(std::string const& path, Domain const& d);

}  // namespace acldp
