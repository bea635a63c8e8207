// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nonbloch/model.hpp"

namespace nonbloch
{

using nlohmann::json;

namespace
{

cplx parse_complex(const json &v, const std::string &where)
{
  if (v.is_number())
  {
    return {v.get<double>(), 0.0};
  }
  if (!v.is_object() || !v.contains("re"))
  {
    throw Error(ErrorCode::InvalidArgument, where + ": expected {\"re\": .., \"im\": ..}");
  }
  const double re = v.at("re").get<double>();
  const double im = v.contains("im") ? v.at("im").get<double>() : 0.0;
  return {re, im};
}

const json &field(const json &obj, const char *name, const std::string &where)
{
  if (!obj.is_object() || !obj.contains(name))
  {
    throw Error(ErrorCode::InvalidArgument, where + ": missing field '" + name + "'");
  }
  return obj.at(name);
}

}  // namespace

LaurentModel parse_model_json(std::string_view text)
{
  json doc;
  try
  {
    doc = json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    throw Error(ErrorCode::InvalidArgument, std::string("model config: ") + e.what());
  }
  try
  {
    const int dim = field(doc, "dim", "model config").get<int>();
    const int n_orb = field(doc, "n_orb", "model config").get<int>();
    const auto &coeffs = field(doc, "coeffs", "model config");
    if (!coeffs.is_array())
    {
      throw Error(ErrorCode::InvalidArgument, "model config: field 'coeffs' must be an array");
    }
    LaurentModel::TermMap terms;
    for (std::size_t t = 0; t < coeffs.size(); t++)
    {
      const std::string where = "model config: coeffs[" + std::to_string(t) + "]";
      const auto &entry = coeffs[t];
      const IVec alpha = field(entry, "alpha", where).get<IVec>();
      if (static_cast<int>(alpha.size()) != dim)
      {
        throw Error(ErrorCode::InvalidArgument, where + ".alpha: length differs from dim");
      }
      const auto &rows = field(entry, "matrix", where);
      if (!rows.is_array() || static_cast<int>(rows.size()) != n_orb)
      {
        throw Error(ErrorCode::InvalidArgument, where + ".matrix: expected n_orb rows");
      }
      CMatrix c(n_orb, n_orb);
      for (int i = 0; i < n_orb; i++)
      {
        if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n_orb)
        {
          throw Error(ErrorCode::InvalidArgument, where + ".matrix: expected n_orb columns");
        }
        for (int j = 0; j < n_orb; j++)
        {
          c(i, j) = parse_complex(rows[i][j], where + ".matrix");
        }
      }
      auto [it, inserted] = terms.try_emplace(alpha, c);
      if (!inserted)
      {
        it->second += c;
      }
    }
    return LaurentModel(dim, n_orb, std::move(terms));
  }
  catch (const json::exception &e)
  {
    throw Error(ErrorCode::InvalidArgument, std::string("model config: ") + e.what());
  }
}

LaurentModel load_model_json(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw Error(ErrorCode::Io, "cannot open model config '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_json(ss.str());
}

std::string model_to_json(const LaurentModel &model)
{
  json doc;
  doc["dim"] = model.dim();
  doc["n_orb"] = model.n_orb();
  json coeffs = json::array();
  for (const auto &[alpha, c] : model.terms())
  {
    json rows = json::array();
    for (Eigen::Index i = 0; i < c.rows(); i++)
    {
      json row = json::array();
      for (Eigen::Index j = 0; j < c.cols(); j++)
      {
        row.push_back({{"re", c(i, j).real()}, {"im", c(i, j).imag()}});
      }
      rows.push_back(row);
    }
    coeffs.push_back({{"alpha", alpha}, {"matrix", rows}});
  }
  doc["coeffs"] = coeffs;
  return doc.dump(2);
}

LaurentModel resolve_model(const std::string &source)
{
  for (const auto &name : builtin_model_names())
  {
    if (source == name)
    {
      return builtin_model(name);
    }
  }
  if (std::filesystem::exists(source))
  {
    return load_model_json(source);
  }
  throw Error(ErrorCode::InvalidArgument,
              "model '" + source + "' is neither a built-in name nor a readable file");
}

}  // namespace nonbloch
