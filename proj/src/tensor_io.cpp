#include "tenscert/tensor_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tenscert {

using nlohmann::json;

DenseTensor<Rational> LoadedTensor::as_rational() const {
  if (exact) return DenseTensor<Rational>(shape, rationals);
  std::vector<Rational> conv;
  conv.reserve(values.size());
  for (double v : values) conv.push_back(rational_from_double(v));
  return DenseTensor<Rational>(shape, std::move(conv));
}

LoadedTensor parse_tensor_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("tensor file must be a JSON object");
  if (!doc.contains("shape") || !doc["shape"].is_array())
    throw ParseError("missing required \"shape\" array");
  if (!doc.contains("data") || !doc["data"].is_array())
    throw ParseError("missing required \"data\" array");

  LoadedTensor out;
  for (const auto& s : doc["shape"]) {
    if (!s.is_number_integer() || s.get<long long>() < 1)
      throw ParseError("\"shape\" entries must be positive integers");
    out.shape.push_back(s.get<int>());
  }
  if (out.shape.empty()) throw ParseError("\"shape\" must have at least one mode");

  std::size_t expected = 1;
  for (int n : out.shape) expected *= static_cast<std::size_t>(n);
  const auto& data = doc["data"];
  if (data.size() != expected) {
    std::ostringstream msg;
    msg << "\"data\" has " << data.size() << " entries but shape requires " << expected;
    throw ParseError(msg.str());
  }

  out.exact = false;
  for (const auto& v : data)
    if (v.is_string()) out.exact = true;

  out.values.reserve(expected);
  if (out.exact) out.rationals.reserve(expected);
  for (const auto& v : data) {
    if (v.is_string()) {
      Rational r;
      try {
        r = parse_rational(v.get<std::string>());
      } catch (const std::exception& e) {
        throw ParseError(std::string("bad rational literal: ") + e.what());
      }
      out.values.push_back(rational_to_double(r));
      out.rationals.push_back(std::move(r));
    } else if (v.is_number()) {
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ParseError("\"data\" entries must be finite");
      out.values.push_back(x);
      if (out.exact) out.rationals.push_back(rational_from_double(x));
    } else {
      throw ParseError("\"data\" entries must be numbers or \"p/q\" strings");
    }
  }

  if (doc.contains("symmetric") && doc["symmetric"].is_boolean() && doc["symmetric"].get<bool>()) {
    out.symmetric_flag = true;
    bool ok;
    if (out.exact) {
      DenseTensor<Rational> t(out.shape, out.rationals);
      ok = t.cubical() && is_symmetric(t, 0.0);
    } else {
      DenseTensor<double> t(out.shape, out.values);
      ok = t.cubical() && is_symmetric(t, 1e-12);
    }
    if (!ok) throw ParseError("file declares \"symmetric\": true but entries are not permutation invariant");
  }
  return out;
}

LoadedTensor load_tensor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tensor_json(buf.str());
}

void save_tensor(const DenseTensor<double>& t, const std::string& path, bool symmetric) {
  json doc;
  doc["shape"] = t.shape();
  doc["data"] = t.data();
  if (symmetric) doc["symmetric"] = true;
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << doc.dump() << "\n";
}

void save_tensor(const DenseTensor<Rational>& t, const std::string& path, bool symmetric) {
  json doc;
  doc["shape"] = t.shape();
  json data = json::array();
  for (const auto& v : t.data()) data.push_back(rational_to_string(v));
  doc["data"] = std::move(data);
  if (symmetric) doc["symmetric"] = true;
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << doc.dump() << "\n";
}

}  // namespace tenscert
