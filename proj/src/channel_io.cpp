#include "qchan/channel_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace qchan {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double number(const std::string& s, const std::string& spec) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) parse_error("bad number '" + s + "' in '" + spec + "'");
    return v;
  } catch (const std::logic_error&) {
    parse_error("bad number '" + s + "' in '" + spec + "'");
  }
}

int integer(const std::string& s, const std::string& spec) {
  const double v = number(s, spec);
  if (v != static_cast<int>(v) || v < 1) parse_error("expected a positive integer, got '" + s + "' in '" + spec + "'");
  return static_cast<int>(v);
}

int dimension(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<int>() < 1)
    parse_error(std::string("channel file needs a positive integer \"") + key + "\"");
  return j[key].get<int>();
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) parse_error("matrix must be a non-empty array of rows");
  const auto rows = j.size(), cols = j[0].size();
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) parse_error("matrix rows have different lengths");
    for (std::size_t c = 0; c < cols; ++c) {
      const Json& z = j[r][c];
      if (z.is_number()) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = z.get<double>();
      } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Complex(z[0].get<double>(), z[1].get<double>());
      } else {
        parse_error("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

Json channel_to_json(const Channel& t, bool as_choi) {
  if (as_choi) return map_to_json(t.map());
  Json kraus = Json::array();
  for (const ComplexMatrix& k : t.kraus()) kraus.push_back(matrix_to_json(k));
  return {{"d_in", t.d_in()}, {"d_out", t.d_out()}, {"kraus", kraus}};
}

Json map_to_json(const LinearMap& m) {
  return {{"d_in", m.d_in()}, {"d_out", m.d_out()}, {"choi", matrix_to_json(m.choi())}};
}

LinearMap map_from_json(const Json& j) {
  if (!j.is_object()) parse_error("channel file must hold a JSON object");
  const int d_in = dimension(j, "d_in"), d_out = dimension(j, "d_out");
  const bool has_kraus = j.contains("kraus"), has_choi = j.contains("choi");
  if (has_kraus == has_choi) parse_error("channel file needs exactly one of \"kraus\" and \"choi\"");
  if (has_choi) {
    ComplexMatrix c = matrix_from_json(j["choi"]);
    if (c.rows() != d_in * d_out || c.cols() != d_in * d_out)
      parse_error("choi must be (d_in d_out) x (d_in d_out)");
    return LinearMap(d_in, d_out, std::move(c));
  }
  if (!j["kraus"].is_array() || j["kraus"].empty()) parse_error("\"kraus\" must be a non-empty array of matrices");
  ComplexMatrix choi = ComplexMatrix::Zero(d_in * d_out, d_in * d_out);
  for (const Json& kj : j["kraus"]) {
    const ComplexMatrix k = matrix_from_json(kj);
    if (k.rows() != d_out || k.cols() != d_in) parse_error("Kraus operators must be d_out x d_in");
    ComplexVector v(d_in * d_out);  // sum_i |i> (x) K|i>
    for (int i = 0; i < d_in; ++i) v.segment(i * d_out, d_out) = k.col(i);
    choi += v * v.adjoint();
  }
  return LinearMap(d_in, d_out, std::move(choi));
}

Channel channel_from_json(const Json& j, double tol) {
  if (j.is_object() && j.contains("kraus") && !j.contains("choi")) {
    map_from_json(j);  // schema checks
    std::vector<ComplexMatrix> kraus;
    for (const Json& kj : j["kraus"]) kraus.push_back(matrix_from_json(kj));
    return Channel::from_kraus(std::move(kraus), tol);
  }
  return Channel::from_map(map_from_json(j), tol);
}

LinearMap load_map(const std::string& source) {
  if (source.rfind("named:", 0) == 0) return parse_named(source);
  std::ifstream in(source);
  if (!in) parse_error("cannot open '" + source + "'");
  try {
    return map_from_json(Json::parse(in));
  } catch (const Json::exception& e) {
    parse_error("'" + source + "': " + e.what());
  }
}

Channel load_channel(const std::string& source, double tol) {
  if (source.rfind("named:", 0) == 0) return Channel::from_map(parse_named(source), tol);
  std::ifstream in(source);
  if (!in) parse_error("cannot open '" + source + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    parse_error("'" + source + "': " + e.what());
  }
  return channel_from_json(j, tol);
}

void save_channel(const std::string& path, const Channel& t, bool as_choi) {
  std::ofstream out(path);
  if (!out) parse_error("cannot write '" + path + "'");
  out << channel_to_json(t, as_choi).dump(2) << '\n';
}

LinearMap parse_named(const std::string& spec) {
  const std::vector<std::string> f = split(spec, ':');
  if (f.size() < 2 || f[0] != "named") parse_error("named specification must start with 'named:'");
  const std::string& kind = f[1];
  const auto expect = [&](std::size_t n) {
    if (f.size() != n + 2)
      parse_error("'" + kind + "' takes " + std::to_string(n) + " parameter(s): '" + spec + "'");
  };
  if (kind == "identity") {
    expect(1);
    return identity_channel(integer(f[2], spec)).map();
  }
  if (kind == "depolarizing") {
    expect(1);
    return completely_depolarizing(integer(f[2], spec)).map();
  }
  if (kind == "transpose") {
    expect(1);
    return transpose_map(integer(f[2], spec));
  }
  if (kind == "t_family") {
    expect(2);
    return t_family_map(integer(f[2], spec), number(f[3], spec));
  }
  if (kind == "amplitude_damping") {
    expect(1);
    return amplitude_damping(number(f[2], spec)).map();
  }
  if (kind == "phase") {
    expect(1);
    ComplexMatrix u = identity(2);
    u(1, 1) = std::polar(1.0, number(f[2], spec));
    return unitary_channel(u).map();
  }
  if (kind == "weyl_mix") {
    expect(1);
    return random_unitary_mix(weyl_unitaries(integer(f[2], spec))).map();
  }
  if (kind == "random_unitary_mix") {
    expect(3);
    RngStream rng(static_cast<std::uint64_t>(number(f[4], spec)));
    return random_unitary_mix(integer(f[2], spec), integer(f[3], spec), rng).map();
  }
  if (kind == "random") {
    expect(4);
    RngStream rng(static_cast<std::uint64_t>(number(f[5], spec)));
    return random_channel(integer(f[2], spec), integer(f[3], spec), integer(f[4], spec), rng).map();
  }
  parse_error("unknown named channel '" + kind + "'");
}

}  // namespace qchan
