// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nonbloch/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "nonbloch/types.hpp"

namespace nonbloch
{

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns))
{
  require(!columns_.empty(), ErrorCode::InvalidArgument, "table: no columns");
}

void Table::add_row(std::vector<double> row)
{
  require(row.size() == columns_.size(), ErrorCode::DimensionMismatch,
          "table: row width differs from the column count");
  data_.push_back(std::move(row));
}

std::string format_double(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  if (std::isinf(v))
  {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Table::to_csv() const
{
  std::string out;
  for (std::size_t c = 0; c < columns_.size(); c++)
  {
    out += (c ? "," : "") + columns_[c];
  }
  out += '\n';
  for (const auto &row : data_)
  {
    for (std::size_t c = 0; c < row.size(); c++)
    {
      if (c)
      {
        out += ',';
      }
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

void Table::write_csv(const std::string &path) const
{
  std::ofstream f(path, std::ios::binary);
  if (!f)
  {
    throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  }
  f << to_csv();
  if (!f)
  {
    throw Error(ErrorCode::Io, "write failed for '" + path + "'");
  }
}

}  // namespace nonbloch
