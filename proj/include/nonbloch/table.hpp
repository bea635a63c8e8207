// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NONBLOCH_TABLE_HPP
#define NONBLOCH_TABLE_HPP

#include <string>
#include <vector>

namespace nonbloch
{

// Named columns of doubles, written as CSV with 17 significant digits.
class Table
{
public:
  explicit Table(std::vector<std::string> columns);

  void add_row(std::vector<double> row);

  std::size_t rows() const { return data_.size(); }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<std::string> &columns() const { return columns_; }
  double at(std::size_t r, std::size_t c) const { return data_[r][c]; }

  std::string to_csv() const;
  void write_csv(const std::string &path) const;

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> data_;
};

std::string format_double(double v);

}  // namespace nonbloch

#endif  // NONBLOCH_TABLE_HPP
