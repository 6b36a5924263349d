#include "acldp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "acldp/errors.hpp"

namespace acldp {

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto const r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

double parse_cell(std::string const& cell, std::string const& path, int line)
{
    if (cell == "nan")
        return std::nan("");
    if (cell == "inf")
        return INFINITY;
    if (cell == "-inf")
        return -INFINITY;
    double v = 0.0;
    auto const r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (r.ec != std::errc() || r.ptr != cell.data() + cell.size() || cell.empty())
        throw ConfigError(path + ":" + std::to_string(line) + ": not a number: '" + cell + "'");
    return v;
}

std::vector<std::string> split(std::string const& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
    {
        auto const b = cell.find_first_not_of(" \t\r");
        auto const e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

void write_csv(std::string const& path, CsvTable const& table)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (auto const& row : table.rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
    if (!out)
        throw NumericalError("write failed for '" + path + "'");
}

CsvTable read_csv(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read '" + path + "'");
    CsvTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        auto cells = split(line);
        if (t.header.empty())
        {
            t.header = cells;
            continue;
        }
        if (cells.size() != t.header.size())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(t.header.size()) + " columns");
        std::vector<double> row;
        for (auto const& c : cells)
            row.push_back(parse_cell(c, path, lineno));
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty())
        throw ConfigError(path + ": empty file");
    return t;
}

void write_json(std::string const& path, nlohmann::json const& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

void write_field_csv(std::string const& path, Domain const& d, Field const& f)
{
    CsvTable t;
    t.header = {"xi", "value"};
    auto const grid = d.grid();
    for (int j = 0; j < d.size(); ++j)
        t.rows.push_back({grid[j], f.values[j]});
    write_csv(path, t);
}

Field read_field_csv(std::string const& path, Domain const& d, Boundary bc)
{
    CsvTable const t = read_csv(path);
    if (t.header.size() != 2)
        throw ConfigError(path + ": expected columns xi,value");
    if (static_cast<int>(t.rows.size()) != d.size())
        throw ConfigError(path + ": has " + std::to_string(t.rows.size()) + " rows, the domain has " +
                          std::to_string(d.size()) + " interior points");
    auto const grid = d.grid();
    Field f{std::vector<double>(d.size()), bc};
    for (int j = 0; j < d.size(); ++j)
    {
        if (std::abs(t.rows[j][0] - grid[j]) > 1e-9 * std::max(1.0, d.half_length()))
            throw ConfigError(path + ": xi column does not match the domain grid at row " + std::to_string(j + 1));
        f.values[j] = t.rows[j][1];
    }
    return f;
}

void write_path_csv(std::string const& path, Domain const& d, Path const& p)
{
    CsvTable t;
    t.header.push_back("t");
    for (int j = 1; j <= d.size(); ++j)
        t.header.push_back("u" + std::to_string(j));
    for (int i = 0; i <= p.steps(); ++i)
    {
        std::vector<double> row{p.time(i)};
        row.insert(row.end(), p.fields[i].values.begin(), p.fields[i].values.end());
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

Path read_path_csv(std::string const& path, Domain const& d)
{
    CsvTable const t = read_csv(path);
    if (static_cast<int>(t.header.size()) != d.size() + 1)
        throw ConfigError(path + ": expected t plus " + std::to_string(d.size()) + " value columns");
    if (t.rows.size() < 2)
        throw ConfigError(path + ": a path needs at least two nodes");
    Path p;
    p.t0 = t.rows[0][0];
    p.dt = (t.rows.back()[0] - p.t0) / (t.rows.size() - 1);
    if (!(p.dt > 0.0))
        throw ConfigError(path + ": time column must increase");
    for (std::size_t i = 0; i < t.rows.size(); ++i)
    {
        if (std::abs(t.rows[i][0] - (p.t0 + p.dt * i)) > 1e-6 * p.dt)
            throw ConfigError(path + ": time grid is not uniform at row " + std::to_string(i + 1));
        p.fields.push_back(Field{std::vector<double>(t.rows[i].begin() + 1, t.rows[i].end()),
                                 Boundary::zero_dirichlet});
    }
    return p;
}

}  // namespace acldp
