#include "adjointkit/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace adjointkit::io {

namespace {

double number(const Json& v, const char* what) {
  if (!v.is_number()) throw InvalidArgument(std::string(what) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidArgument(std::string(what) + ": non-finite value");
  return x;
}

Index dimension(const Json& record, const char* key) {
  if (!record.contains(key) || !record[key].is_number_integer())
    throw InvalidArgument(std::string("operator record: missing integer \"") + key + "\"");
  const auto d = record[key].get<long long>();
  if (d < 1) throw InvalidArgument(std::string("operator record: \"") + key + "\" must be >= 1");
  return static_cast<Index>(d);
}

Matrix nested_rows(const Json& rows) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw InvalidArgument("matrix: expected a non-empty list of rows");
  const Index m = static_cast<Index>(rows.size());
  const Index n = static_cast<Index>(rows[0].size());
  if (n == 0) throw InvalidArgument("matrix: empty row");
  Matrix out(m, n);
  for (Index i = 0; i < m; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n)
      throw InvalidArgument("matrix: ragged rows");
    for (Index j = 0; j < n; ++j) out(i, j) = number(row[static_cast<std::size_t>(j)], "matrix");
  }
  return out;
}

InnerProductSpace metric_from_json(const Json& value, Index dim, const char* key) {
  if (!value.is_array()) throw InvalidArgument(std::string(key) + ": expected a list");
  if (!value.empty() && value[0].is_array()) {
    Matrix m = nested_rows(value);
    if (m.rows() != dim || m.cols() != dim)
      throw InvalidArgument(std::string(key) + ": wrong dimensions");
    return InnerProductSpace(std::move(m));
  }
  const auto size = static_cast<Index>(value.size());
  if (size == dim) {
    Vector d(dim);
    for (Index i = 0; i < dim; ++i) d(i) = number(value[static_cast<std::size_t>(i)], key);
    return InnerProductSpace::weighted(d);
  }
  if (size == dim * dim) {
    Matrix m(dim, dim);
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j)
        m(i, j) = number(value[static_cast<std::size_t>(i * dim + j)], key);
    return InnerProductSpace(std::move(m));
  }
  throw InvalidArgument(std::string(key) + ": expected dim or dim*dim entries");
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("malformed JSON in " + path + ": " + e.what());
  }
}

DenseOperator operator_from_json(const Json& record) {
  if (!record.is_object()) throw InvalidArgument("operator record: expected an object");
  const Index m = dimension(record, "rows");
  const Index n = dimension(record, "cols");
  if (!record.contains("entries") || !record["entries"].is_array())
    throw InvalidArgument("operator record: missing \"entries\"");
  const Json& e = record["entries"];
  Matrix a(m, n);
  if (!e.empty() && e[0].is_array()) {
    a = nested_rows(e);
    if (a.rows() != m || a.cols() != n)
      throw InvalidArgument("operator record: entries do not match rows x cols");
  } else {
    if (static_cast<Index>(e.size()) != m * n)
      throw InvalidArgument("operator record: expected rows*cols entries");
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) a(i, j) = number(e[static_cast<std::size_t>(i * n + j)], "entries");
  }
  InnerProductSpace domain(n);
  InnerProductSpace codomain(m);
  if (record.contains("domain_metric") && !record["domain_metric"].is_null())
    domain = metric_from_json(record["domain_metric"], n, "domain_metric");
  if (record.contains("codomain_metric") && !record["codomain_metric"].is_null())
    codomain = metric_from_json(record["codomain_metric"], m, "codomain_metric");
  return DenseOperator(std::move(domain), std::move(codomain), std::move(a));
}

Json operator_to_json(const DenseOperator& op) {
  Json entries = Json::array();
  for (Index i = 0; i < op.rows(); ++i)
    for (Index j = 0; j < op.cols(); ++j) entries.push_back(op.entries()(i, j));
  Json record = {{"rows", op.rows()}, {"cols", op.cols()}, {"entries", entries}};
  if (!op.domain().is_euclidean()) record["domain_metric"] = matrix_to_json(op.domain().metric());
  if (!op.codomain().is_euclidean())
    record["codomain_metric"] = matrix_to_json(op.codomain().metric());
  return record;
}

Matrix matrix_from_json(const Json& value) {
  if (value.is_object()) return operator_from_json(value).entries();
  return nested_rows(value);
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Vector vector_from_json(const Json& value) {
  const Json& list = value.is_object() && value.contains("entries") ? value["entries"] : value;
  if (!list.is_array() || list.empty()) throw InvalidArgument("vector: expected a non-empty list");
  Vector v(static_cast<Index>(list.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = number(list[static_cast<std::size_t>(i)], "vector");
  return v;
}

Json vector_to_json(const Vector& v) {
  Json list = Json::array();
  for (Index i = 0; i < v.size(); ++i) list.push_back(v(i));
  return list;
}

std::string picard_csv(const PicardTable& table) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "i,sigma,coeff,ratio,cumsum\n";
  for (const auto& r : table.rows)
    out << r.index << ',' << r.sigma << ',' << r.coeff << ',' << r.ratio << ',' << r.cumsum << '\n';
  return out.str();
}

std::string fixed(double value, int decimals) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << value;
  return out.str();
}

std::string sci(double value) {
  std::ostringstream out;
  out << std::scientific << std::setprecision(3) << value;
  return out.str();
}

}  // namespace adjointkit::io
