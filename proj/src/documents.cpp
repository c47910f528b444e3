#include "heightdyn/documents.hpp"

#include <limits>

namespace heightdyn {
namespace {

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& require(const Json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(at(path, key), "missing field");
  return *it;
}

const Json& require_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  return j;
}

Integer parse_integer(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return j.is_number_unsigned() ? Integer(std::to_string(j.get<std::uint64_t>()))
                                                           : Integer(std::to_string(j.get<std::int64_t>()));
  if (j.is_string()) {
    Integer out;
    const auto& s = j.get_ref<const std::string&>();
    if (s.empty() || out.set_str(s, 10) != 0) throw ParseError(path, "bad integer literal \"" + s + "\"");
    return out;
  }
  throw ParseError(path, "expected an integer");
}

long parse_small(const Json& j, const std::string& path, long lo, long hi) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < lo || v > hi) throw ParseError(path, "value " + std::to_string(v) + " out of range");
  return static_cast<long>(v);
}

Json integer_json(const Integer& x) {
  if (mpz_fits_slong_p(x.get_mpz_t())) return Json(x.get_si());
  return Json(x.get_str());
}

template <class F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
}

}  // namespace

QuadraticNumber parse_scalar(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return QuadraticNumber(parse_integer(j, path));
  if (!j.is_string()) throw ParseError(path, "expected a scalar string such as \"7-4√3\"");
  const auto& s = j.get_ref<const std::string&>();
  try {
    return QuadraticNumber::parse(s);
  } catch (const Error& e) {
    throw ParseError(path, "bad scalar literal \"" + s + "\": " + e.what());
  }
}

Rational parse_rational(const Json& j, const std::string& path) {
  auto q = parse_scalar(j, path);
  if (!q.is_rational()) throw ParseError(path, "expected a rational number");
  return q.rational_part();
}

Json to_json(const QuadraticNumber& x) { return x.to_string(); }

PicardLattice parse_lattice(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected a lattice object");
  const auto cone_path = at(path, "cone");
  const Json& cone_json = require(j, path, "cone");
  const Json& type_json = require(cone_json, cone_path, "type");
  if (!type_json.is_string()) throw ParseError(at(cone_path, "type"), "expected a string");
  const auto type = type_json.get<std::string>();
  if (type != "orthant" && type != "quadratic")
    throw ParseError(at(cone_path, "type"), "unknown cone type \"" + type + "\"");

  const auto rank = static_cast<std::size_t>(parse_small(require(j, path, "rank"), at(path, "rank"), 1, 1 << 16));

  ConeSpec cone;
  if (type == "orthant") {
    cone = OrthantCone{};
  } else if (type == "quadratic") {
    QuadraticCone qc;
    const auto gpath = at(cone_path, "gram");
    const Json& gram = require_array(require(cone_json, cone_path, "gram"), gpath);
    if (gram.size() != rank) throw ParseError(gpath, "gram must be " + std::to_string(rank) + "x" + std::to_string(rank));
    for (std::size_t r = 0; r < rank; ++r) {
      const Json& row = require_array(gram[r], at(gpath, r));
      if (row.size() != rank) throw ParseError(at(gpath, r), "row must have " + std::to_string(rank) + " entries");
      qc.gram.emplace_back();
      for (std::size_t c = 0; c < rank; ++c) qc.gram.back().push_back(parse_rational(row[c], at(at(gpath, r), c)));
    }
    const auto lpath = at(cone_path, "linear");
    const Json& linear = require_array(require(cone_json, cone_path, "linear"), lpath);
    if (linear.size() != rank) throw ParseError(lpath, "linear must have " + std::to_string(rank) + " entries");
    for (std::size_t c = 0; c < rank; ++c) qc.linear.push_back(parse_rational(linear[c], at(lpath, c)));
    cone = std::move(qc);
  } else {
    throw ParseError(at(cone_path, "type"), "unknown cone type \"" + type + "\"");
  }

  std::vector<std::string> labels;
  if (auto it = j.find("labels"); it != j.end()) {
    const auto lpath = at(path, "labels");
    require_array(*it, lpath);
    if (it->size() != rank) throw ParseError(lpath, "expected " + std::to_string(rank) + " labels");
    for (std::size_t i = 0; i < rank; ++i) {
      if (!(*it)[i].is_string()) throw ParseError(at(lpath, i), "expected a string");
      labels.push_back((*it)[i].get<std::string>());
    }
  } else {
    for (std::size_t i = 0; i < rank; ++i) labels.push_back("E" + std::to_string(i + 1));
  }

  Integer field = 0;
  if (auto it = j.find("field_d"); it != j.end()) field = parse_integer(*it, at(path, "field_d"));

  const auto wpath = at(path, "witness_ample");
  DivisorClass witness = parse_divisor(require(j, path, "witness_ample"), wpath);
  if (witness.rank() != rank) throw ParseError(wpath, "expected " + std::to_string(rank) + " coefficients");

  return wrap(path, [&] { return PicardLattice::create(std::move(labels), std::move(cone), field, std::move(witness)); });
}

Json to_json(const PicardLattice& lattice) {
  Json j;
  j["rank"] = lattice.rank();
  j["labels"] = lattice.labels();
  j["field_d"] = integer_json(lattice.field());
  if (lattice.is_orthant()) {
    j["cone"] = {{"type", "orthant"}};
  } else {
    const auto& qc = std::get<QuadraticCone>(lattice.cone());
    Json gram = Json::array();
    for (const auto& row : qc.gram) {
      Json r = Json::array();
      for (const auto& x : row) r.push_back(to_json(QuadraticNumber(x)));
      gram.push_back(std::move(r));
    }
    Json linear = Json::array();
    for (const auto& x : qc.linear) linear.push_back(to_json(QuadraticNumber(x)));
    j["cone"] = {{"type", "quadratic"}, {"gram", std::move(gram)}, {"linear", std::move(linear)}};
  }
  j["witness_ample"] = to_json(lattice.witness());
  return j;
}

PullbackMap parse_pullback(const Json& j, const std::string& path) {
  const auto mpath = at(path, "matrix");
  const Json& m = require_array(require(j, path, "matrix"), mpath);
  if (m.empty()) throw ParseError(mpath, "matrix is empty");
  std::vector<std::vector<QuadraticNumber>> rows;
  for (std::size_t r = 0; r < m.size(); ++r) {
    const Json& row = require_array(m[r], at(mpath, r));
    if (row.size() != m.size()) throw ParseError(at(mpath, r), "matrix must be square");
    rows.emplace_back();
    for (std::size_t c = 0; c < row.size(); ++c) rows.back().push_back(parse_scalar(row[c], at(at(mpath, r), c)));
  }
  return wrap(mpath, [&] { return PullbackMap(std::move(rows)); });
}

Json to_json(const PullbackMap& map) {
  Json m = Json::array();
  for (const auto& row : map.rows()) {
    Json r = Json::array();
    for (const auto& x : row) r.push_back(to_json(x));
    m.push_back(std::move(r));
  }
  return Json{{"matrix", std::move(m)}};
}

DivisorClass parse_divisor(const Json& j, const std::string& path) {
  const Json* arr = &j;
  std::string apath = path;
  if (j.is_object()) {
    apath = at(path, "coeffs");
    arr = &require(j, path, "coeffs");
  }
  require_array(*arr, apath);
  if (arr->empty()) throw ParseError(apath, "divisor has no coefficients");
  std::vector<QuadraticNumber> coeffs;
  for (std::size_t i = 0; i < arr->size(); ++i) coeffs.push_back(parse_scalar((*arr)[i], at(apath, i)));
  DivisorClass d(std::move(coeffs));
  wrap(apath, [&] { return d.field(); });
  return d;
}

Json to_json(const DivisorClass& divisor) {
  Json arr = Json::array();
  for (const auto& x : divisor.coeffs()) arr.push_back(to_json(x));
  return arr;
}

MultiHomogeneousMap parse_morphism(const Json& j, const std::string& path) {
  const auto spath = at(path, "signature");
  const Json& sig_json = require_array(require(j, path, "signature"), spath);
  Signature sig;
  for (std::size_t i = 0; i < sig_json.size(); ++i) sig.push_back(static_cast<int>(parse_small(sig_json[i], at(spath, i), 0, 1 << 12)));
  std::size_t variables = 0;
  for (int n : sig) variables += static_cast<std::size_t>(n) + 1;

  const auto tpath = at(path, "targets");
  const Json& targets_json = require_array(require(j, path, "targets"), tpath);
  std::vector<std::vector<Polynomial>> targets;
  for (std::size_t t = 0; t < targets_json.size(); ++t) {
    const auto fpath = at(tpath, t);
    const Json& coords = require_array(targets_json[t], fpath);
    std::vector<Polynomial> polys;
    for (std::size_t c = 0; c < coords.size(); ++c) {
      const auto cpath = at(fpath, c);
      const auto termpath = at(cpath, "terms");
      const Json& terms = require_array(require(coords[c], cpath, "terms"), termpath);
      Polynomial poly;
      for (std::size_t k = 0; k < terms.size(); ++k) {
        const auto kpath = at(termpath, k);
        Term term;
        term.coefficient = parse_integer(require(terms[k], kpath, "c"), at(kpath, "c"));
        const auto epath = at(kpath, "e");
        const Json& e = require_array(require(terms[k], kpath, "e"), epath);
        if (e.size() != variables)
          throw ParseError(epath, "expected " + std::to_string(variables) + " exponents, got " + std::to_string(e.size()));
        for (std::size_t v = 0; v < e.size(); ++v)
          term.exponents.push_back(static_cast<int>(parse_small(e[v], at(epath, v), 0, 1 << 20)));
        poly.push_back(std::move(term));
      }
      polys.push_back(std::move(poly));
    }
    targets.push_back(std::move(polys));
  }
  return wrap(path, [&] { return MultiHomogeneousMap(std::move(sig), std::move(targets)); });
}

Json to_json(const MultiHomogeneousMap& map) {
  Json targets = Json::array();
  for (const auto& coords : map.targets()) {
    Json factor = Json::array();
    for (const auto& poly : coords) {
      Json terms = Json::array();
      for (const auto& t : poly) terms.push_back(Json{{"c", integer_json(t.coefficient)}, {"e", t.exponents}});
      factor.push_back(Json{{"terms", std::move(terms)}});
    }
    targets.push_back(std::move(factor));
  }
  return Json{{"signature", map.source_signature()}, {"targets", std::move(targets)}};
}

MultiPoint parse_point(const Json& j, const std::string& path) {
  const Json* arr = &j;
  std::string ppath = path;
  if (j.is_object()) {
    ppath = at(path, "point");
    arr = &require(j, path, "point");
  }
  require_array(*arr, ppath);
  std::vector<RationalProjectivePoint> factors;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const auto fpath = at(ppath, i);
    const Json& coords = require_array((*arr)[i], fpath);
    std::vector<Integer> raw;
    for (std::size_t c = 0; c < coords.size(); ++c) raw.push_back(parse_integer(coords[c], at(fpath, c)));
    factors.push_back(wrap(fpath, [&] { return RationalProjectivePoint::normalize(std::move(raw)); }));
  }
  if (factors.empty()) throw ParseError(ppath, "point has no factors");
  return MultiPoint(std::move(factors));
}

Json to_json(const RationalProjectivePoint& point) {
  Json arr = Json::array();
  for (const auto& x : point.coords()) arr.push_back(integer_json(x));
  return arr;
}

Json to_json(const MultiPoint& point) {
  Json arr = Json::array();
  for (const auto& f : point.factors()) arr.push_back(to_json(f));
  return arr;
}

IntMatrix parse_int_matrix(const Json& j, const std::string& path) {
  const Json* m = &j;
  std::string mpath = path;
  if (j.is_object()) {
    mpath = at(path, "matrix");
    m = &require(j, path, "matrix");
  }
  require_array(*m, mpath);
  std::vector<std::vector<Integer>> rows;
  for (std::size_t r = 0; r < m->size(); ++r) {
    const Json& row = require_array((*m)[r], at(mpath, r));
    if (!rows.empty() && row.size() != rows.front().size()) throw ParseError(at(mpath, r), "ragged matrix");
    rows.emplace_back();
    for (std::size_t c = 0; c < row.size(); ++c) {
      // Pullback documents may spell integers as scalar strings.
      const auto q = parse_scalar(row[c], at(at(mpath, r), c));
      if (!q.is_rational() || q.rational_part().get_den() != 1)
        throw ParseError(at(at(mpath, r), c), "expected an integer");
      rows.back().push_back(q.rational_part().get_num());
    }
  }
  return IntMatrix(rows);
}

Json to_json(const IntMatrix& matrix) {
  Json m = Json::array();
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < matrix.cols(); ++c) row.push_back(integer_json(matrix(r, c)));
    m.push_back(std::move(row));
  }
  return m;
}

Json to_json(const CoefficientResult& result) {
  Json j;
  if (result.exact)
    j["value"] = to_json(result.exact_value());
  else
    j["value"] = result.as_double();
  j["approx"] = result.as_double();
  j["exact"] = result.exact;
  j["method"] = to_string(result.method);
  return j;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("$", std::string("invalid JSON: ") + e.what());
  }
}

Document parse_document(std::string_view text) {
  const Json j = parse_json(text);
  if (j.is_array()) return parse_divisor(j);
  if (!j.is_object()) throw ParseError("$", "expected a JSON object or array");
  if (j.contains("cone") || j.contains("rank")) return parse_lattice(j);
  if (j.contains("signature") || j.contains("targets")) return parse_morphism(j);
  if (j.contains("matrix")) return parse_pullback(j);
  if (j.contains("coeffs")) return parse_divisor(j);
  throw ParseError("$", "unrecognized document: expected a lattice, pullback, divisor or morphism");
}

Json to_json(const Document& doc) {
  return std::visit([](const auto& x) { return to_json(x); }, doc);
}

}  // namespace heightdyn
